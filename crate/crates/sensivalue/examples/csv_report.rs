//! Run the file-based analysis pipeline as a library: write the two input
//! CSVs, analyze them, and print the JSON report.
//!
//! ```bash
//! cargo run --example csv_report
//! ```

use std::io::Write;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use sensivalue::report::{analyze_files, render_json, render_report_csv, AnalyzeOptions};

fn main() -> sensivalue::Result<()> {
    let dir = std::env::temp_dir().join("sensivalue_example");
    std::fs::create_dir_all(&dir)?;
    let unit_path = dir.join("units.csv");
    let bench_path = dir.join("benchmarks.csv");

    // five event types; benchmarks constructed near the IPW means so the
    // discrepancies hover around zero
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut units = std::fs::File::create(&unit_path)?;
    let mut benches = std::fs::File::create(&bench_path)?;
    writeln!(units, "event_name,y,r,propensity")?;
    writeln!(benches, "event_name,mu_source1,mu_source2")?;
    for event in ["signup", "checkout", "search", "wishlist", "purchase"] {
        let n = 600;
        let mut total = 0.0;
        for _ in 0..n {
            let pi: f64 = rng.gen_range(0.3..0.9);
            let y: f64 = rng.gen_range(0.0..4.0f64).exp() * 0.1;
            let observed = rng.gen_bool(pi);
            if observed {
                total += y / pi;
            }
            writeln!(units, "{event},{y},{},{pi}", observed as u8)?;
        }
        let mu = total / n as f64;
        let (n1, n2): (f64, f64) = (rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05));
        writeln!(benches, "{event},{},{}", mu - n1, mu - n2)?;
    }
    drop(units);
    drop(benches);

    let options = AnalyzeOptions {
        draws: 50_000,
        ..AnalyzeOptions::default()
    };
    let report = analyze_files(&unit_path, &bench_path, &options)?;
    println!("{}", render_json(&report, 6)?);
    println!("--- same report as CSV ---");
    print!("{}", render_report_csv(&report, 6));
    Ok(())
}
