// Runs the randomized verification suites with a small sample count.

use weyl_uncertainty::verify::{run as verify, Suite};

pub fn run() -> weyl_uncertainty::Result<()> {
    let report = verify(Suite::All, 2024, 50)?;
    for check in &report.checks {
        println!("{check}");
    }
    assert!(report.passed());
    Ok(())
}

#[allow(dead_code)]
fn main() -> weyl_uncertainty::Result<()> {
    run()
}
