//! Sample the three observation-noise models and print their statistics.
//!
//! Contaminated-Gaussian noise is a Gaussian floor plus rare large
//! impulses; symmetric alpha-stable noise is heavy-tailed with no finite
//! variance for `alpha < 2` and collapses to a Gaussian at `alpha = 2`.
//!
//! ```bash
//! cargo run --release -p srrls --example noise_models
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use srrls::signal::{alpha_stable_next, cg_noise_next};

fn main() {
    let n = 200_000;

    // Contaminated Gaussian: background sigma_g^2 = 1e-3, 0.1% impulses
    // of variance 1.0.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut var, mut impulses, mut max_abs) = (0.0f64, 0usize, 0.0f64);
    for _ in 0..n {
        let (v, fired) = cg_noise_next(1e-3, 0.001, 1.0, &mut rng);
        var += v * v;
        impulses += fired as usize;
        max_abs = max_abs.max(v.abs());
    }
    println!("contaminated Gaussian ({n} samples):");
    println!("  impulses        {impulses} (expected ~{})", n / 1000);
    println!(
        "  sample variance {:.4e} (background 1.0e-3)",
        var / n as f64
    );
    println!(
        "  largest |v|     {max_abs:.2} (background sigma {:.3})\n",
        1e-3f64.sqrt()
    );

    // Alpha-stable at the Gaussian edge and in the heavy-tailed regime.
    for alpha in [2.0, 1.65, 1.2] {
        let gamma = 0.02;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut sorted: Vec<f64> = (0..n)
            .map(|_| alpha_stable_next(alpha, gamma, &mut rng))
            .collect();
        sorted.sort_by(f64::total_cmp);
        let median = 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        let q99 = sorted[(0.995 * n as f64) as usize];
        let max_abs = sorted[0].abs().max(sorted[n - 1].abs());
        let var: f64 = sorted.iter().map(|v| v * v).sum::<f64>() / n as f64;
        println!("alpha-stable alpha = {alpha}, gamma = {gamma} ({n} samples):");
        println!("  median          {median:+.4}");
        println!("  99.5% quantile  {q99:.3}");
        println!("  largest |v|     {max_abs:.3}");
        if alpha == 2.0 {
            println!(
                "  sample variance {var:.4} (Gaussian limit: 2 gamma = {:.3})",
                2.0 * gamma
            );
        } else {
            println!("  sample variance {var:.4} (diverges with n: no second moment)");
        }
        println!();
    }
}
