//! Figure series through the library and the same run through the CLI entry
//! point.

use mudiv::cli::{figure, FigureOptions};

fn main() -> mudiv::Result<()> {
    let opts = FigureOptions {
        trials: 20_000,
        ..FigureOptions::default()
    };
    for n in 1..=7 {
        let out = figure(n, &opts)?;
        println!("figure {n}: {} rows", out.rows.len());
        for c in &out.checks {
            println!("  [{}] {} ({})", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail);
        }
    }

    let path = std::env::temp_dir().join("mudiv_figure6.csv");
    let status = mudiv::cli::run(["mudiv", "figure", "6", "--mc-trials", "2e4", "--out", path.to_str().unwrap()]);
    println!("\n`mudiv figure 6` exit {status}, CSV at {}", path.display());
    Ok(())
}
