//! See the M-estimator gate single impulses out of the update.
//!
//! Feeds a clean stream with three hand-planted impulses through the
//! robust variant and prints what happens at each: the clipping threshold
//! barely moves (the median scale estimator ignores isolated outliers),
//! the robust weight drops to zero, and the weight vector stays put.
//!
//! ```bash
//! cargo run --release -p srrls --example impulse_rejection
//! ```

use srrls::signal::{Ar2State, NoiseModel, SparseSystem};
use srrls::{AdaptiveFilter, AlgorithmSpec, Regressor, Variant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> srrls::Result<()> {
    let taps = 16;
    let system = SparseSystem::random(taps, 3, 42)?;
    let mut input = Ar2State::new(43);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(44);
    let noise = NoiseModel::Gaussian { sigma_g_sq: 1e-3 };

    let impulse_at = [400usize, 650, 900];
    let mut reg = Regressor::new(taps);
    let stream: Vec<(f64, f64)> = (0..1200)
        .map(|i| {
            let x = input.next_sample();
            reg.push(x);
            let mut d = reg.vector().dot(&system.taps) + noise.next_sample(&mut noise_rng);
            if impulse_at.contains(&(i + 1)) {
                d += 25.0; // ~800x the background noise amplitude
            }
            (x, d)
        })
        .collect();

    let mut filter = AdaptiveFilter::new(AlgorithmSpec::new(Variant::Rlm), taps)?;
    let mut rejected = 0usize;
    println!(
        "{:>5} {:>10} {:>10} {:>3} {:>14}",
        "k", "|e|", "xi", "q", "|w - w_prev|"
    );
    for (i, &(x, d)) in stream.iter().enumerate() {
        let w_before = filter.weights().clone();
        let diag = filter.step(x, d)?;
        if diag.q == 0.0 {
            rejected += 1;
        }
        let k = i + 1;
        if impulse_at.contains(&k) || impulse_at.contains(&(k.wrapping_sub(1))) {
            let threshold = filter.robust_state().unwrap().sigma_eps_sq().sqrt() * 2.576;
            let moved = (filter.weights() - &w_before).norm();
            println!(
                "{k:>5} {:>10.3} {:>10.3} {:>3} {:>14.3e}{}",
                diag.e.abs(),
                threshold,
                diag.q,
                moved,
                if impulse_at.contains(&k) {
                    "   <- planted impulse"
                } else {
                    ""
                }
            );
        }
    }

    let final_dev = (filter.weights() - &system.taps).norm();
    println!("\nrejected {rejected} of {} samples", stream.len());
    println!("final weight deviation {final_dev:.2e} (the impulses left no trace)");
    Ok(())
}
