//! Channel files: write the bundled echo response to disk, load it back,
//! and identify it from noisy observations.
//!
//! The file format is one coefficient per line with `#` comments; any
//! measured response in that shape can be dropped into an experiment via
//! the `channel_file` config key.
//!
//! ```bash
//! cargo run --release -p srrls --example channel_file
//! ```

use std::path::Path;

use srrls::config::custom_config;
use srrls::harness::{generate_run_data, nmsd};
use srrls::signal::{load_channel, save_channel, synthetic_echo_channel};
use srrls::{AdaptiveFilter, Variant};

fn main() -> srrls::Result<()> {
    let path = Path::new("out/echo_channel.txt");
    std::fs::create_dir_all("out").ok();

    let channel = synthetic_echo_channel();
    save_channel(path, &channel)?;
    let loaded = load_channel(path)?;
    assert_eq!(loaded.taps, channel.taps);
    println!(
        "wrote and re-read {}: {} taps, {} active, unit energy",
        path.display(),
        loaded.len(),
        loaded.active_count()
    );

    // Identify the loaded channel from 2500 noisy samples.
    let mut cfg = custom_config();
    cfg.taps = loaded.len();
    cfg.channel_file = Some(path.to_path_buf());
    cfg.change_at = None;
    cfg.iterations = 2500;
    cfg.select_algorithms(&["RLM".into()])?;
    let mut spec = cfg.algorithms[0].spec.clone();
    spec.variant = Variant::JoSRrls;

    let data = generate_run_data(&cfg, 0)?;
    let mut filter = AdaptiveFilter::new(spec, cfg.taps)?;
    for i in 0..cfg.iterations {
        filter.step(data.x[i], data.d[i])?;
        if (i + 1) % 500 == 0 {
            println!(
                "  k = {:>4}: NMSD {:>7.2} dB",
                i + 1,
                nmsd(filter.weights(), &loaded.taps)?
            );
        }
    }

    let strongest = (0..loaded.len()).max_by(|&a, &b| {
        loaded.taps[a]
            .abs()
            .partial_cmp(&loaded.taps[b].abs())
            .unwrap()
    });
    if let Some(idx) = strongest {
        println!(
            "strongest tap {idx}: true {:+.4}, estimated {:+.4}",
            loaded.taps[idx],
            filter.weights()[idx]
        );
    }
    Ok(())
}
