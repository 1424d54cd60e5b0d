// Bessel-function eigenstates: eigen-equation residual and the value of
// `lambda` minimizing `U` and `U'`.

use std::f64::consts::PI;

use weyl_uncertainty::analysis::{find_extremum, ExtremumKind, Functional};
use weyl_uncertainty::families::{build, FamilySpec, Truncation};
use weyl_uncertainty::fock::mean_photon;
use weyl_uncertainty::verify::bessel_residual;

pub fn run() -> weyl_uncertainty::Result<()> {
    let trunc = Truncation::default();
    for lambda in [0.25, 1.0, 2.5] {
        let s = build(&FamilySpec::Bessel { lambda }, &trunc)?;
        println!(
            "lambda={lambda:<5} n_max={:<3} nbar={:.4}  residual={:.1e}",
            s.n_max(),
            mean_photon(&s),
            bessel_residual(&s, lambda)
        );
    }
    let spec = FamilySpec::Bessel { lambda: 1.0 };
    for f in [Functional::U, Functional::Uprime] {
        let e = find_extremum(&spec, "lambda", f, ExtremumKind::Min, (0.1, 3.0), 1, PI, &trunc)?;
        println!("min {f} at lambda = {:.5}: {:.6}", e.param, e.value);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> weyl_uncertainty::Result<()> {
    run()
}
