//! Desk-scale version of the first benchmark scenario: a 64-tap random
//! sparse system identified under contaminated-Gaussian noise at 30 dB
//! SNR, with the system regenerated (4 → 8 active taps) at iteration 1501.
//!
//! Runs a reduced ensemble (10 runs instead of 100) over all seven
//! variants, prints the learning-curve landmarks, and writes `nmsd.csv`,
//! `config_resolved`, and `plot_nmsd.py` into `out/case1_example`.
//!
//! ```bash
//! cargo run --release -p srrls --example case1_cg_noise
//! ```

use srrls::config::case1_config;
use srrls::harness::{emit_outputs, run_experiment};

fn main() -> srrls::Result<()> {
    let mut cfg = case1_config();
    cfg.runs = 10;
    cfg.output_dir = "out/case1_example".into();

    eprintln!(
        "identifying a {}-tap sparse system, {} runs x {} iterations (full scale uses runs = 100)",
        cfg.taps, cfg.runs, cfg.iterations
    );
    let curves = run_experiment(&cfg)?;
    emit_outputs(&curves, &cfg, &cfg.output_dir.clone())?;

    let window = |values: &[f64], lo: usize, hi: usize| {
        values[lo - 1..hi].iter().sum::<f64>() / (hi - lo + 1) as f64
    };
    println!(
        "{:<14} {:>12} {:>12} {:>12}",
        "algorithm", "ss[1300-1500]", "k=2200", "final"
    );
    for c in &curves {
        println!(
            "{:<14} {:>12.2} {:>12.2} {:>12.2}",
            c.label,
            window(&c.values, 1300, 1500),
            c.values[2199],
            c.values[2999],
        );
    }
    println!(
        "\nwrote {}/nmsd.csv (plot with plot_nmsd.py)",
        cfg.output_dir.display()
    );
    Ok(())
}
