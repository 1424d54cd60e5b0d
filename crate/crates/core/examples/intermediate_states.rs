// Interpolation between a number state and a phase-coherent state, with
// the asymptotic values near `|xi| = 1` where large truncations are needed.

use std::f64::consts::PI;

use weyl_uncertainty::analysis::evaluate;
use weyl_uncertainty::families::{closed_form_char, ClosedForm, FamilySpec, Truncation};
use weyl_uncertainty::Complex64;

pub fn run() -> weyl_uncertainty::Result<()> {
    let trunc = Truncation::with_cap(32768);
    let xi = Complex64::new(0.6, 0.0);
    for alpha2 in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let row = evaluate(&FamilySpec::intermediate(alpha2, 2, xi), 1, PI, &trunc)?;
        println!("alpha^2={alpha2:.2}  U={:.4}  U''={:.4}  nbar={:.3}", row.u, row.u_double_prime, row.nbar);
    }
    for r in [0.99, 0.995, 0.999] {
        let spec = FamilySpec::intermediate(0.5, 1, Complex64::new(r, 0.0));
        let row = evaluate(&spec, 1, PI, &trunc)?;
        if let ClosedForm::Asymptotic(cs) = closed_form_char(&spec, 1, PI)? {
            println!(
                "|xi|={r}  |Phi| numeric {:.5}  leading order {:.5}",
                row.abs_phi,
                cs.phi.norm()
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> weyl_uncertainty::Result<()> {
    run()
}
