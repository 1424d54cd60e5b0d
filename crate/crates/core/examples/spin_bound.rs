// Weyl pair on a spin-3/2 system: commutation defect, characteristic
// functions of a random state and the `gamma`-dependent bound.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weyl_uncertainty::spin::{
    bound_b, gamma_angle, spin_report, weyl_defect, QuditState, SpinSystem,
};

pub fn run() -> weyl_uncertainty::Result<()> {
    let sys = SpinSystem::from_two_j(3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let state = QuditState::random(sys, &mut rng);
    println!("d = {}, j = {}", sys.dim(), sys.j());
    for (k, ell) in [(1, 1), (1, 2), (2, 2), (1, 3)] {
        let g = gamma_angle(sys, k, ell);
        let r = spin_report(&state, k, ell);
        println!(
            "k={k} l={ell}  gamma/pi={:.3}  B={:.4}  U={:.4}  V={:.4}  defect={:.1e}",
            g / std::f64::consts::PI,
            bound_b(g),
            r.u,
            r.v,
            weyl_defect(sys, k, ell)
        );
        assert!(r.is_valid(), "{:?}", r.violations());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> weyl_uncertainty::Result<()> {
    run()
}
