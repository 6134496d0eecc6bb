//! Impulse robustness: clipping M-estimator, median-window scale tracking,
//! and the covariance reset detector.
//!
//! The robust weight is the clipping M-estimator
//!
//! ```text
//! q = 1 if |e| <= xi,   q = 0 otherwise,
//! ```
//!
//! with the threshold `xi = vartheta * sigma_eps` tracked from the median of
//! a sliding window of squared a-priori errors:
//!
//! ```text
//! sigma_eps^2 <- zeta * sigma_eps^2 + c_sigma * (1 - zeta) * med(e_k^2, ..., e_{k-Nw+1}^2)
//! ```
//!
//! The median makes the scale estimate blind to isolated impulses, and the
//! correction factor `c_sigma = 1.483 (1 + 5/(Nw - 1))` maps the median of
//! squared Gaussian errors back to their variance.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Parameters of the median-window M-estimator threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MEstimatorParams {
    /// Sliding-window length `Nw` (at least 2).
    pub window_len: usize,
    /// Exponential weighting factor `zeta` in `[0.9, 1)`; forced to 0 on
    /// the very first sample so the window seeds the estimate.
    pub zeta: f64,
    /// Threshold multiplier `vartheta`; 2.576 keeps 99% of Gaussian errors.
    pub vartheta: f64,
}

impl Default for MEstimatorParams {
    fn default() -> Self {
        MEstimatorParams {
            window_len: 9,
            zeta: 0.99,
            vartheta: 2.576,
        }
    }
}

impl MEstimatorParams {
    pub fn validate(&self) -> Result<()> {
        if self.window_len < 2 {
            return Err(Error::invalid("window_len", "need at least 2 samples"));
        }
        if !(0.9..1.0).contains(&self.zeta) {
            return Err(Error::invalid(
                "zeta",
                format!("weighting factor must lie in [0.9, 1), got {}", self.zeta),
            ));
        }
        if !(self.vartheta > 0.0) {
            return Err(Error::invalid(
                "vartheta",
                "threshold multiplier must be positive",
            ));
        }
        Ok(())
    }
}

/// Scale floor keeping the threshold strictly positive on silent channels.
const SIGMA_EPS_FLOOR: f64 = 1e-12;

/// Sliding-window robust scale estimate of the a-priori error.
#[derive(Debug, Clone)]
pub struct RobustScaleState {
    params: MEstimatorParams,
    c_sigma: f64,
    window: VecDeque<f64>,
    sigma_eps_sq: f64,
    k: usize,
}

impl RobustScaleState {
    pub fn new(params: MEstimatorParams) -> Result<Self> {
        params.validate()?;
        let c_sigma = 1.483 * (1.0 + 5.0 / (params.window_len as f64 - 1.0));
        Ok(RobustScaleState {
            params,
            c_sigma,
            window: VecDeque::with_capacity(params.window_len),
            sigma_eps_sq: 0.0,
            k: 0,
        })
    }

    /// Correction factor `1.483 (1 + 5/(Nw - 1))`.
    pub fn c_sigma(&self) -> f64 {
        self.c_sigma
    }

    /// Current scale estimate `sigma_eps^2`.
    pub fn sigma_eps_sq(&self) -> f64 {
        self.sigma_eps_sq
    }

    /// Push a fresh a-priori error, refresh the scale recursion, and return
    /// the clipping threshold `xi = vartheta * sigma_eps`.
    ///
    /// During warm-up the median runs over the samples seen so far; the
    /// weighting factor is 0 on the first sample.
    pub fn update_threshold(&mut self, e: f64) -> f64 {
        if self.window.len() == self.params.window_len {
            self.window.pop_back();
        }
        self.window.push_front(e * e);

        let med = median_of(self.window.make_contiguous());
        let zeta = if self.k == 0 { 0.0 } else { self.params.zeta };
        self.sigma_eps_sq = zeta * self.sigma_eps_sq + self.c_sigma * (1.0 - zeta) * med;
        if self.sigma_eps_sq < SIGMA_EPS_FLOOR {
            self.sigma_eps_sq = SIGMA_EPS_FLOOR;
        }
        self.k += 1;
        self.params.vartheta * self.sigma_eps_sq.sqrt()
    }
}

/// Robust weight of the clipping M-estimator: 1 for `|e| <= xi`, else 0.
pub fn m_estimate_weight(e: f64, xi: f64) -> f64 {
    if e.abs() <= xi {
        1.0
    } else {
        0.0
    }
}

/// Sample median; even-length inputs average the two central order
/// statistics. Empty input is a parameter-domain error.
pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("values", "median of an empty set"));
    }
    let mut sorted = values.to_vec();
    Ok(median_in_place(&mut sorted))
}

fn median_of(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    median_in_place(&mut sorted)
}

fn median_in_place(sorted: &mut [f64]) -> f64 {
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Parameters of the error-energy reset detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResetParams {
    /// Smoothing constant `t` of the energy average, in `(0, 1)`.
    pub smoothing: f64,
    /// Log10-ratio trigger level.
    pub threshold: f64,
}

impl Default for ResetParams {
    fn default() -> Self {
        ResetParams {
            smoothing: 0.98,
            threshold: 1.5,
        }
    }
}

impl ResetParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.smoothing > 0.0 && self.smoothing < 1.0) {
            return Err(Error::invalid("smoothing", "must lie in (0, 1)"));
        }
        if !(self.threshold > 0.0) {
            return Err(Error::invalid("threshold", "must be positive"));
        }
        Ok(())
    }
}

/// Energy floor so the ratio stays defined on near-silent channels.
const E_AVR_FLOOR: f64 = 1e-12;

/// Detects abrupt system changes from a jump of the accepted error energy
/// `q^2 e^2` over its running average.
#[derive(Debug, Clone)]
pub struct ResetDetectorState {
    params: ResetParams,
    e_avr_sq: f64,
    seeded: bool,
}

impl ResetDetectorState {
    pub fn new(params: ResetParams) -> Result<Self> {
        params.validate()?;
        Ok(ResetDetectorState {
            params,
            e_avr_sq: 0.0,
            seeded: false,
        })
    }

    /// Running average of the accepted error energy.
    pub fn e_avr_sq(&self) -> f64 {
        self.e_avr_sq
    }

    /// Returns true when `log10(q^2 e^2 / e_avr^2)` exceeds the trigger,
    /// then folds the sample into the average. Zero accepted energy never
    /// fires. The average seeds itself from the first nonzero sample.
    pub fn check(&mut self, q: f64, e: f64) -> bool {
        let energy = q * q * e * e;
        if !self.seeded {
            if energy > 0.0 {
                self.e_avr_sq = energy.max(E_AVR_FLOOR);
                self.seeded = true;
            }
            return false;
        }
        let fired = energy > 0.0 && (energy / self.e_avr_sq).log10() > self.params.threshold;
        self.e_avr_sq =
            self.params.smoothing * self.e_avr_sq + (1.0 - self.params.smoothing) * energy;
        if self.e_avr_sq < E_AVR_FLOOR {
            self.e_avr_sq = E_AVR_FLOOR;
        }
        fired
    }
}
