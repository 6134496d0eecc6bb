//! Log-penalty sparsity machinery: the penalty, its subgradient, and the
//! online adaptation of the sparsity weight `rho`.
//!
//! The penalty `f(w) = sum_m ln(1 + |w_m| / mu)` differentiates active and
//! inactive coefficients via the shrinkage factor `mu`. Each step applies
//! `w = psi - rho * P * grad`; the adaptive rule picks the `rho` that
//! minimizes the post-correction deviation. With `g = P grad` and the true
//! system `w_o`, the deviation change
//!
//! ```text
//! delta(rho) = 2 rho (w_o - psi)^T g + rho^2 ||g||^2
//! ```
//!
//! is an exact quadratic whose minimizer is `(psi - w_o)^T g / ||g||^2`;
//! the online rule substitutes the previous estimate for `w_o` and clips at
//! zero.

use nalgebra::{DMatrix, DVector};

/// How the sparsity weight is chosen each step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoSchedule {
    /// Constant weight; the step applies `rho * (1 - lambda)`.
    Fixed { rho: f64 },
    /// Deviation-minimizing weight, held at zero for the first
    /// `warmup_len` steps while the estimate is still coarse.
    Adaptive { warmup_len: usize },
}

/// Guard below which the correction direction counts as degenerate and the
/// sparsity step is skipped.
const DIRECTION_FLOOR: f64 = 1e-20;

/// Log penalty `sum_m ln(1 + |w_m| / mu)`.
pub fn log_penalty(w: &DVector<f64>, mu: f64) -> f64 {
    w.iter().map(|&v| (1.0 + v.abs() / mu).ln()).sum()
}

/// Subgradient of the log penalty: component `m` is
/// `sgn(w_m) / (mu + |w_m|)`, with `sgn(0) = 0` so exact zeros stay put.
pub fn log_penalty_subgradient(w: &DVector<f64>, mu: f64) -> DVector<f64> {
    w.map(|v| {
        if v == 0.0 {
            0.0
        } else {
            v.signum() / (mu + v.abs())
        }
    })
}

/// Online sparsity weight: `max(((psi - w_prev)^T g) / ||g||^2, 0)` with
/// `g = P grad`, zero during warm-up (`k <= warmup_len`, `k` counting
/// samples from 1) and zero for a degenerate direction.
pub fn rho_opt(
    psi: &DVector<f64>,
    w_prev: &DVector<f64>,
    p: &DMatrix<f64>,
    grad: &DVector<f64>,
    k: usize,
    warmup_len: usize,
) -> f64 {
    rho_opt_from_direction(psi, w_prev, &(p * grad), k, warmup_len)
}

/// Same rule with the correction direction `g = P grad` precomputed.
pub fn rho_opt_from_direction(
    psi: &DVector<f64>,
    w_prev: &DVector<f64>,
    g: &DVector<f64>,
    k: usize,
    warmup_len: usize,
) -> f64 {
    if k <= warmup_len {
        return 0.0;
    }
    let g_norm_sq = g.norm_squared();
    if g_norm_sq < DIRECTION_FLOOR {
        return 0.0;
    }
    (((psi - w_prev).dot(g)) / g_norm_sq).max(0.0)
}

/// Oracle weight using the true system: `((psi - w_true)^T g) / ||g||^2`,
/// unclipped. Only available when the ground truth is known; the harness
/// uses it to measure how far the online rule sits from the optimum.
pub fn rho_oracle(
    psi: &DVector<f64>,
    w_true: &DVector<f64>,
    p: &DMatrix<f64>,
    grad: &DVector<f64>,
) -> f64 {
    let g = p * grad;
    let g_norm_sq = g.norm_squared();
    if g_norm_sq < DIRECTION_FLOOR {
        return 0.0;
    }
    (psi - w_true).dot(&g) / g_norm_sq
}

/// Deviation change `2 rho (w_true - psi)^T g + rho^2 ||g||^2` caused by the
/// sparsity step at weight `rho`.
pub fn deviation_change(
    psi: &DVector<f64>,
    w_true: &DVector<f64>,
    g: &DVector<f64>,
    rho: f64,
) -> f64 {
    2.0 * rho * (w_true - psi).dot(g) + rho * rho * g.norm_squared()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
        DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
    }

    fn random_spd(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        &a * a.transpose() + DMatrix::identity(n, n) * 0.3
    }

    #[test]
    fn penalty_hand_cases() {
        assert_eq!(log_penalty(&DVector::zeros(5), 0.3), 0.0);
        let w = DVector::from_vec(vec![0.7]);
        assert!((log_penalty(&w, 0.7) - 2f64.ln()).abs() <= 1e-15);
        let w = DVector::from_vec(vec![1.0, -2.0]);
        let expect = 101f64.ln() + 201f64.ln();
        assert!((log_penalty(&w, 0.01) - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn subgradient_hand_cases() {
        assert_eq!(
            log_penalty_subgradient(&DVector::zeros(4), 0.01),
            DVector::zeros(4)
        );
        let g = log_penalty_subgradient(&DVector::from_vec(vec![1.0]), 1.0);
        assert_eq!(g[0], 0.5);
        let g = log_penalty_subgradient(&DVector::from_vec(vec![-1.0, 3.0]), 1.0);
        assert_eq!(g[0], -0.5);
        assert_eq!(g[1], 0.25);
    }

    #[test]
    fn subgradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mu = 0.01;
        for _ in 0..100 {
            let w = random_vector(8, &mut rng);
            let grad = log_penalty_subgradient(&w, mu);
            for m in 0..8 {
                if w[m].abs() <= 1e-3 {
                    continue; // too close to the kink for central differences
                }
                let h = 1e-6 * w[m].abs().max(1.0);
                let mut wp = w.clone();
                let mut wm = w.clone();
                wp[m] += h;
                wm[m] -= h;
                let fd = (log_penalty(&wp, mu) - log_penalty(&wm, mu)) / (2.0 * h);
                assert!(
                    (grad[m] - fd).abs() <= 1e-5 * fd.abs().max(1e-12),
                    "coordinate {m}: analytic {} vs fd {}",
                    grad[m],
                    fd
                );
            }
        }
    }

    #[test]
    fn rho_zero_when_half_step_did_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let w = random_vector(6, &mut rng);
        let p = random_spd(6, &mut rng);
        let grad = log_penalty_subgradient(&w, 0.01);
        assert_eq!(rho_opt(&w, &w, &p, &grad, 100, 3), 0.0);
    }

    #[test]
    fn rho_zero_during_warmup() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let psi = random_vector(6, &mut rng);
        let w_prev = random_vector(6, &mut rng);
        let p = random_spd(6, &mut rng);
        let grad = random_vector(6, &mut rng);
        assert_eq!(rho_opt(&psi, &w_prev, &p, &grad, 10, 32), 0.0);
        assert_eq!(rho_opt(&psi, &w_prev, &p, &grad, 32, 32), 0.0);
        assert!(rho_opt(&psi, &w_prev, &p, &grad, 33, 32).is_finite());
    }

    #[test]
    fn rho_zero_for_degenerate_direction() {
        let psi = DVector::from_vec(vec![1.0, 2.0]);
        let w_prev = DVector::zeros(2);
        let p = DMatrix::identity(2, 2);
        let grad = DVector::from_vec(vec![1e-11, 0.0]);
        assert_eq!(rho_opt(&psi, &w_prev, &p, &grad, 100, 0), 0.0);
    }

    #[test]
    fn rho_is_nonnegative_and_finite() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..1_000 {
            let psi = random_vector(5, &mut rng);
            let w_prev = random_vector(5, &mut rng);
            let p = random_spd(5, &mut rng);
            let grad = random_vector(5, &mut rng);
            let rho = rho_opt(&psi, &w_prev, &p, &grad, 100, 0);
            assert!(rho >= 0.0 && rho.is_finite());
        }
    }

    /// Two independently coded routes to the quadratic's minimizer agree.
    #[test]
    fn oracle_matches_quadratic_minimizer() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..200 {
            let psi = random_vector(8, &mut rng);
            let w_true = random_vector(8, &mut rng);
            let p = random_spd(8, &mut rng);
            let grad = random_vector(8, &mut rng);
            let g = &p * &grad;

            let route_a = rho_oracle(&psi, &w_true, &p, &grad);
            let route_b = -((&w_true - &psi).dot(&g)) / g.dot(&g);
            assert!(
                (route_a - route_b).abs() <= 1e-12 * route_a.abs().max(1.0),
                "{route_a} vs {route_b}"
            );
        }
    }

    /// Grid-search oracle over the post-correction deviation: the closed
    /// form must sit at the grid minimum, the deviation change must be
    /// strictly negative inside (0, 2 rho*), and vanish at 2 rho*.
    #[test]
    fn oracle_minimizes_deviation_on_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let mut tested = 0;
        while tested < 50 {
            let m = rng.gen_range(2..=8);
            let w_true = random_vector(m, &mut rng);
            let psi = &w_true + random_vector(m, &mut rng) * 0.3;
            let p = random_spd(m, &mut rng);
            let grad = log_penalty_subgradient(&psi, 0.01);
            let g = &p * &grad;

            let rho_star = rho_oracle(&psi, &w_true, &p, &grad);
            if rho_star <= 1e-6 {
                continue;
            }
            tested += 1;

            let deviation = |rho: f64| (&w_true - (&psi - &g * rho)).norm_squared();
            let mut best_rho = 0.0;
            let mut best = f64::INFINITY;
            let steps = 2_000usize;
            for i in 0..=steps {
                let rho = 2.0 * rho_star * i as f64 / steps as f64;
                let d = deviation(rho);
                if d < best {
                    best = d;
                    best_rho = rho;
                }
            }
            let resolution = 2.0 * rho_star / steps as f64;
            assert!(
                (best_rho - rho_star).abs() <= resolution,
                "grid minimum {best_rho} vs closed form {rho_star}"
            );

            // Strict improvement inside the admissible interval.
            for i in 1..steps {
                let rho = 2.0 * rho_star * i as f64 / steps as f64;
                assert!(
                    deviation_change(&psi, &w_true, &g, rho) < 0.0,
                    "delta not negative at rho = {rho}"
                );
            }
            assert!(deviation_change(&psi, &w_true, &g, 2.0 * rho_star).abs() <= 1e-10);
        }
    }

    /// Scaling the gradient by c scales rho by 1/c, keeping the applied
    /// correction rho * g invariant.
    #[test]
    fn rho_counter_scales_with_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        for _ in 0..100 {
            let psi = random_vector(6, &mut rng);
            let w_prev = random_vector(6, &mut rng);
            let p = random_spd(6, &mut rng);
            let grad = random_vector(6, &mut rng);
            let c = rng.gen_range(0.1..10.0);

            let rho = rho_opt(&psi, &w_prev, &p, &grad, 100, 0);
            let rho_scaled = rho_opt(&psi, &w_prev, &p, &(&grad * c), 100, 0);
            assert!(
                (rho_scaled - rho / c).abs() <= 1e-12 * (rho / c).max(1e-12),
                "rho(c grad) = {rho_scaled}, rho/c = {}",
                rho / c
            );
        }
    }
}
