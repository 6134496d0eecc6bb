//! Step every algorithm variant over one identical stream and watch the
//! learning curves side by side.
//!
//! A small contaminated-Gaussian scenario (16 taps, 2 active) makes the
//! family relations visible in seconds: the plain variants blow up on
//! impulses, the robust ones converge, the sparse robust ones converge
//! deeper, and the adaptive weights remove the tuning burden.
//!
//! ```bash
//! cargo run --release -p srrls --example variant_tour
//! ```

use srrls::config::custom_config;
use srrls::harness::{generate_run_data, nmsd};
use srrls::{AdaptiveFilter, Variant};

fn main() -> srrls::Result<()> {
    let mut cfg = custom_config();
    cfg.taps = 16;
    cfg.active = 2;
    cfg.iterations = 1200;
    cfg.impulse_prob = 0.01;
    cfg.seed = 3;

    // One filter per variant, all fed the same samples.
    let base = cfg.algorithms[0].spec.clone();
    let mut filters: Vec<(Variant, AdaptiveFilter)> = Variant::ALL
        .iter()
        .map(|&variant| {
            let mut spec = base.clone();
            spec.variant = variant;
            Ok((variant, AdaptiveFilter::new(spec, cfg.taps)?))
        })
        .collect::<srrls::Result<_>>()?;

    let data = generate_run_data(&cfg, 0)?;

    print!("{:>6}", "k");
    for (v, _) in &filters {
        print!(" {:>13}", v.label());
    }
    println!();

    for i in 0..cfg.iterations {
        for (_, filter) in filters.iter_mut() {
            filter.step(data.x[i], data.d[i])?;
        }
        let k = i + 1;
        if k % 200 == 0 {
            let truth = data.truth_at(k, cfg.change_at);
            print!("{k:>6}");
            for (_, filter) in &filters {
                print!(" {:>13.2}", nmsd(filter.weights(), &truth.taps)?);
            }
            println!();
        }
    }

    println!(
        "\n(NMSD in dB; {} impulsive samples per thousand, 2 of {} taps active)",
        (cfg.impulse_prob * 1000.0) as u32,
        cfg.taps
    );
    Ok(())
}
