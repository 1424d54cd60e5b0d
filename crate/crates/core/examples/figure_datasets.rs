// Writes the four figure datasets as CSV into a temporary directory and
// reports where each curve bottoms out.

use weyl_uncertainty::analysis::{figure_config, figure_dataset, ExtremumKind, Functional};
use weyl_uncertainty::families::Truncation;
use weyl_uncertainty::output::{csv_string, write_atomic};

pub fn run() -> weyl_uncertainty::Result<()> {
    let dir = std::env::temp_dir().join(format!("weyl-figures-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    for id in 1..=4 {
        let cfg = figure_config(id)?;
        let table = figure_dataset(id, &Truncation::default())?;
        let path = dir.join(format!("fig{id}.csv"));
        write_atomic(&path, csv_string(&table).as_bytes())?;
        let best = table.extreme_row(Functional::U, ExtremumKind::Min).unwrap();
        println!(
            "fig{id}: {} rows -> {}  (min U = {:.4} at {} = {:.4})",
            table.rows.len(),
            path.display(),
            best.u,
            cfg.sweep.param,
            best.param
        );
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> weyl_uncertainty::Result<()> {
    run()
}
