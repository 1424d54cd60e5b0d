// Pauli-matrix form of the two-level case.

use weyl_uncertainty::spin::qubit::{qubit_report, BlochVector};

pub fn run() -> weyl_uncertainty::Result<()> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (x, y, z) in [(h, 0.0, h), (0.0, 0.0, 1.0), (0.5, 0.5, h), (0.3, -0.2, 0.1)] {
        let r = qubit_report(&BlochVector::new(x, y, z)?, 1, 1)?;
        println!(
            "s=({x:+.3},{y:+.3},{z:+.3})  U={:.4}  U'={:.4}  V={:.4}  Omega={:.4}",
            r.u,
            r.u_prime.unwrap_or(f64::NAN),
            r.v,
            r.chars.omega
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> weyl_uncertainty::Result<()> {
    run()
}
