// Gaussian number-amplitude states compared with their continuum limit.

use std::f64::consts::PI;

use weyl_uncertainty::analysis::evaluate;
use weyl_uncertainty::families::{gaussian_continuum, FamilySpec, Truncation};

pub fn run() -> weyl_uncertainty::Result<()> {
    let trunc = Truncation::default();
    let k = 16;
    let phi = PI / k as f64;
    println!("  a k^2     U(lattice)  U(continuum)");
    for akk in [0.1, 0.5, PI / 2.0, 4.0, 10.0] {
        let spec = FamilySpec::Gaussian {
            nbar: 400.0,
            a: akk / (k * k) as f64,
            b: 0.0,
        };
        let row = evaluate(&spec, k, phi, &trunc)?;
        let c = gaussian_continuum(akk / (k * k) as f64, 0.0, k as f64, phi);
        println!("{akk:8.4}  {:.6}    {:.6}", row.u, c.u());
    }
    println!("chirped, nbar = 100, a = 1/40:");
    for b in [0.0, 0.5, 1.0, PI / 2.0, 2.0] {
        let spec = FamilySpec::Gaussian { nbar: 100.0, a: 0.025, b };
        let row = evaluate(&spec, 1, PI, &trunc)?;
        println!("  b={b:.4}  U={:.4}  U'={:.4}", row.u, row.u_prime);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> weyl_uncertainty::Result<()> {
    run()
}
