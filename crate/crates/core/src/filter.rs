//! Core weighted-RLS recursions shared by every algorithm variant.
//!
//! The estimator keeps a coefficient vector `w` and the inverse `P` of the
//! exponentially weighted autocorrelation matrix
//!
//! ```text
//! R_k = lambda * R_{k-1} + q_k * x_k * x_k^T,      P_k = R_k^{-1}
//! ```
//!
//! updated rank-one per sample through the matrix inversion lemma. The
//! robust weight `q_k` scales each sample's contribution; `q_k = 0` rejects
//! the sample outright (zero gain, pure forgetting). The weight update is
//! split in two: an adaptive half step `psi = w + K e` followed by a
//! sparsity correction `w = psi - rho * P * grad` that pulls inactive
//! coefficients toward zero.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Adaptive-filter memory: coefficients, inverse correlation matrix, and
/// the iteration counter.
#[derive(Debug, Clone)]
pub struct FilterState {
    /// Coefficient estimate, length `M`.
    pub weights: DVector<f64>,
    /// Inverse of the time-averaged autocorrelation matrix, `M x M`,
    /// symmetric and positive definite at initialization.
    pub inv_corr: DMatrix<f64>,
    /// Number of completed update steps.
    pub iteration: usize,
}

impl FilterState {
    /// Fresh state: `w = 0`, `P = I / delta`, iteration 0.
    pub fn new(taps: usize, delta: f64) -> Result<Self> {
        if taps == 0 {
            return Err(Error::invalid("taps", "filter length must be at least 1"));
        }
        if !(delta > 0.0) {
            return Err(Error::invalid(
                "delta",
                format!("regularization must be positive, got {delta}"),
            ));
        }
        Ok(FilterState {
            weights: DVector::zeros(taps),
            inv_corr: DMatrix::identity(taps, taps) / delta,
            iteration: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Restore `P = I / delta` leaving the weights untouched.
    pub fn reset_covariance(&mut self, delta: f64) {
        let m = self.len();
        self.inv_corr = DMatrix::identity(m, m) / delta;
    }

    /// Rescale `P` so its largest diagonal entry does not exceed `ceiling`.
    /// Returns true when the clamp actually fired.
    pub fn clamp_covariance(&mut self, ceiling: f64) -> bool {
        let max_diag = self
            .inv_corr
            .diagonal()
            .iter()
            .fold(0.0f64, |a, &v| a.max(v));
        if max_diag > ceiling {
            self.inv_corr *= ceiling / max_diag;
            true
        } else {
            false
        }
    }
}

/// Tapped delay line holding the most recent `M` input samples, newest first.
/// Pre-filled with zeros before the first sample arrives.
#[derive(Debug, Clone)]
pub struct Regressor {
    buf: DVector<f64>,
}

impl Regressor {
    pub fn new(taps: usize) -> Self {
        Regressor {
            buf: DVector::zeros(taps),
        }
    }

    /// Shift the line by one and place `x` at index 0; the oldest sample
    /// falls off the end.
    pub fn push(&mut self, x: f64) {
        self.buf.as_mut_slice().rotate_right(1);
        self.buf[0] = x;
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.buf
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }
}

/// Per-step observability record returned by the algorithm pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    /// A-priori error `e = d - x^T w_{k-1}`.
    pub e: f64,
    /// Intermediate error after the half update, `xi = d - x^T psi`.
    pub xi: f64,
    /// Robust weight in `[0, 1]` (exactly 0 or 1 for the clipping M-estimator).
    pub q: f64,
    /// `theta = q * x^T P_{k-1} x`, nonnegative for PSD `P`.
    pub theta: f64,
    /// Forgetting factor actually used this step.
    pub lambda: f64,
    /// Sparsity weight actually used this step (after absorption/adaptation).
    pub rho: f64,
    /// True when the covariance reset was triggered this step.
    pub reset_fired: bool,
    /// True when the covariance diagonal ceiling rescaled `P` this step.
    pub p_clamped: bool,
}

/// A-priori error `d - x^T w`.
pub fn a_priori_error(weights: &DVector<f64>, x: &DVector<f64>, d: f64) -> f64 {
    d - x.dot(weights)
}

/// Gain vector and excitation level for one weighted sample:
/// `theta = q * x^T P x`, `K = q * P x / (lambda + theta)`.
///
/// `q = 0` rejects the sample: zero gain, zero theta. Errors with
/// [`Error::Degenerate`] if `lambda + theta <= 0`, which cannot happen for
/// positive-semidefinite `P` and valid inputs but guards corrupted state.
pub fn kalman_gain(
    p: &DMatrix<f64>,
    x: &DVector<f64>,
    q: f64,
    lambda: f64,
) -> Result<(DVector<f64>, f64)> {
    if q == 0.0 {
        return Ok((DVector::zeros(x.len()), 0.0));
    }
    let px = p * x;
    let theta = q * x.dot(&px);
    let gain = gain_from_px(&px, q, lambda, theta)?;
    Ok((gain, theta))
}

/// Finish the gain computation from a precomputed `P x` and `theta`.
pub(crate) fn gain_from_px(
    px: &DVector<f64>,
    q: f64,
    lambda: f64,
    theta: f64,
) -> Result<DVector<f64>> {
    let denom = lambda + theta;
    if denom <= 0.0 || !denom.is_finite() {
        return Err(Error::Degenerate(format!(
            "gain denominator lambda + theta = {denom} is not positive"
        )));
    }
    Ok(px.map(|v| q * v / denom))
}

/// Inversion-lemma covariance update `(P - K x^T P) / lambda`, symmetrized
/// as `(A + A^T) / 2` afterwards.
pub fn update_covariance(
    p: &DMatrix<f64>,
    gain: &DVector<f64>,
    x: &DVector<f64>,
    lambda: f64,
) -> DMatrix<f64> {
    let mut out = p.clone();
    let px = p * x;
    update_covariance_in_place(&mut out, gain, &px, lambda);
    out
}

/// In-place variant taking the precomputed `P x` (equal to `(x^T P)^T` for
/// the symmetric `P` this crate maintains).
pub(crate) fn update_covariance_in_place(
    p: &mut DMatrix<f64>,
    gain: &DVector<f64>,
    px: &DVector<f64>,
    lambda: f64,
) {
    p.ger(-1.0, gain, px, 1.0);
    *p /= lambda;
    symmetrize(p);
}

/// Pure forgetting step used when the sample is rejected (`K = 0`): the
/// covariance still inflates by `1 / lambda`.
pub(crate) fn inflate_covariance(p: &mut DMatrix<f64>, lambda: f64) {
    *p /= lambda;
}

fn symmetrize(p: &mut DMatrix<f64>) {
    let n = p.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (p[(i, j)] + p[(j, i)]);
            p[(i, j)] = v;
            p[(j, i)] = v;
        }
    }
}

/// Adaptive half step `psi = w + K e`.
pub fn half_update(weights: &DVector<f64>, gain: &DVector<f64>, e: f64) -> DVector<f64> {
    weights + gain * e
}

/// Sparsity correction `w = psi - rho * P * grad`.
pub fn sparsity_correction(
    psi: &DVector<f64>,
    p: &DMatrix<f64>,
    rho: f64,
    grad: &DVector<f64>,
) -> DVector<f64> {
    psi - (p * grad) * rho
}
