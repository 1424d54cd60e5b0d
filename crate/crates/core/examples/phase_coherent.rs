// Phase-coherent states against `|xi|`: numerical scan checked against
// the closed form, and the extrema of each functional.

use std::f64::consts::PI;

use weyl_uncertainty::analysis::{find_extremum, scan, ExtremumKind, Functional, Sweep};
use weyl_uncertainty::families::{oracle_check, FamilySpec, Truncation};

pub fn run() -> weyl_uncertainty::Result<()> {
    let trunc = Truncation::default();
    let spec: FamilySpec = "phase-coherent".parse()?;
    let table = scan(&spec, &Sweep::linear("xi", 0.1, 0.9, 9), 1, PI, &trunc)?;
    println!("  |xi|      U       U'      U''     V");
    for r in &table.rows {
        println!(
            "{:6.2}  {:.4}  {:.4}  {:.4}  {:.4}",
            r.param, r.u, r.u_prime, r.u_double_prime, r.v
        );
    }
    let err = oracle_check(&spec.with_param("xi", 0.8, 1)?, 1, PI, &trunc)?;
    println!("closed-form agreement at |xi| = 0.8: {err:.1e}");
    for (f, kind) in [
        (Functional::U, ExtremumKind::Min),
        (Functional::Uprime, ExtremumKind::Min),
        (Functional::Udoubleprime, ExtremumKind::Min),
        (Functional::V, ExtremumKind::Max),
    ] {
        let e = find_extremum(&spec, "xi", f, kind, (0.01, 0.99), 1, PI, &trunc)?;
        println!(
            "{:>12} {kind:?} at |xi| = {:.5} (nbar {:.4}): {:.6}",
            f.to_string(),
            e.param,
            e.nbar.unwrap_or(f64::NAN),
            e.value
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> weyl_uncertainty::Result<()> {
    run()
}
