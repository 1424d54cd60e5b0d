// Single-mode relations for random truncated states, including the
// phase distribution and the shifted Weyl relation.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weyl_uncertainty::fock::{
    integrate_periodic, is_applicable, phase_distribution, phase_grid, report, weyl_residual,
    FockState,
};

pub fn run() -> weyl_uncertainty::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 1..=3usize {
        let phi = PI / k as f64;
        let s = FockState::random(12, &mut rng);
        let r = report(&s, k, phi)?;
        println!(
            "k={k} phi=pi/{k}  applicable={}  U={:.4}  U''={:.4}  V={:.4}  det+={:.2e}  det-={:.2e}",
            is_applicable(k, phi),
            r.u,
            r.u_double_prime.unwrap_or(f64::NAN),
            r.v,
            r.det_plus,
            r.det_minus
        );
        assert!(r.is_valid(), "{:?}", r.violations());
        let p = phase_distribution(&s, &phase_grid(64))?;
        println!(
            "      phase density integral {:.15}  weyl residual {:.1e}",
            integrate_periodic(&p),
            weyl_residual(s.amplitudes(), k, 0.7)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> weyl_uncertainty::Result<()> {
    run()
}
