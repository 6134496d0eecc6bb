//! Variable forgetting factor driven by recursive power estimates.
//!
//! Four powers are tracked with exponential smoothing `chi`, the error and
//! desired-signal powers weighted by `q^2` so rejected impulses contribute
//! nothing:
//!
//! ```text
//! sigma_e^2     <- chi sigma_e^2     + (1 - chi) q^2 e^2
//! sigma_theta^2 <- chi sigma_theta^2 + (1 - chi) theta^2
//! sigma_d^2     <- chi sigma_d^2     + (1 - chi) q^2 d^2
//! sigma_y^2     <- chi sigma_y^2     + (1 - chi) y^2
//! ```
//!
//! The background-noise power is recovered as
//! `sigma_v^2 = sigma_d^2 sigma_e^2 / (sigma_e^2 + sigma_y^2)` and the
//! factor selected as
//!
//! ```text
//! lambda = lambda_max                                  if sigma_e^2 < tau sigma_v^2
//! lambda = sigma_theta sigma_v / (|sigma_e - sigma_v| + kappa)   otherwise,
//! ```
//!
//! clamped into `[lambda_min, lambda_max]`. Excess error power beyond the
//! noise floor shortens the memory; at convergence the factor parks at
//! `lambda_max` for minimal misadjustment.

use crate::error::{Error, Result};

/// Parameters of the forgetting-factor adaptation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VffParams {
    /// Power smoothing factor `chi` in `[0.9, 1)`.
    pub chi: f64,
    /// Convergence-state factor `tau` in `[1, 2]`.
    pub tau: f64,
    /// Upper bound of the factor, close to but below 1.
    pub lambda_max: f64,
    /// Stability floor keeping the covariance inflation bounded.
    pub lambda_min: f64,
    /// Small positive constant guarding the denominator.
    pub kappa: f64,
}

impl Default for VffParams {
    fn default() -> Self {
        VffParams {
            chi: 0.96,
            tau: 1.5,
            lambda_max: 0.99999,
            lambda_min: 0.5,
            kappa: 1e-6,
        }
    }
}

impl VffParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.9..1.0).contains(&self.chi) {
            return Err(Error::invalid(
                "chi",
                format!("smoothing factor must lie in [0.9, 1), got {}", self.chi),
            ));
        }
        if !(1.0..=2.0).contains(&self.tau) {
            return Err(Error::invalid(
                "tau",
                format!("convergence factor must lie in [1, 2], got {}", self.tau),
            ));
        }
        if !(self.lambda_max > 0.0 && self.lambda_max < 1.0) {
            return Err(Error::invalid("lambda_max", "must lie in (0, 1)"));
        }
        if !(self.lambda_min > 0.0 && self.lambda_min < self.lambda_max) {
            return Err(Error::invalid("lambda_min", "must lie in (0, lambda_max)"));
        }
        if !(self.kappa > 0.0) {
            return Err(Error::invalid("kappa", "must be positive"));
        }
        Ok(())
    }
}

/// Denominator floor below which the recovered noise power is zero.
const POWER_FLOOR: f64 = 1e-20;

/// Recursive power estimates and the factor-selection state.
#[derive(Debug, Clone)]
pub struct VffState {
    params: VffParams,
    sigma_e_sq: f64,
    sigma_theta_sq: f64,
    sigma_d_sq: f64,
    sigma_y_sq: f64,
    /// Number of samples folded in so far.
    k: usize,
    /// Steps during which the factor is pinned at `lambda_max` while the
    /// scale estimators warm up (typically the M-estimator window length).
    warmup_len: usize,
}

impl VffState {
    pub fn new(params: VffParams, warmup_len: usize) -> Result<Self> {
        params.validate()?;
        Ok(VffState {
            params,
            sigma_e_sq: 0.0,
            sigma_theta_sq: 0.0,
            sigma_d_sq: 0.0,
            sigma_y_sq: 0.0,
            k: 0,
            warmup_len,
        })
    }

    pub fn params(&self) -> &VffParams {
        &self.params
    }

    pub fn sigma_e_sq(&self) -> f64 {
        self.sigma_e_sq
    }

    pub fn sigma_theta_sq(&self) -> f64 {
        self.sigma_theta_sq
    }

    pub fn sigma_d_sq(&self) -> f64 {
        self.sigma_d_sq
    }

    pub fn sigma_y_sq(&self) -> f64 {
        self.sigma_y_sq
    }

    /// Fold one sample into the four power recursions. `y` is the filter
    /// output `x^T w_{k-1}`, `theta` the weighted excitation level of the
    /// same step.
    pub fn update_powers(&mut self, q: f64, e: f64, theta: f64, d: f64, y: f64) {
        let chi = self.params.chi;
        let w = 1.0 - chi;
        self.sigma_e_sq = chi * self.sigma_e_sq + w * q * q * e * e;
        self.sigma_theta_sq = chi * self.sigma_theta_sq + w * theta * theta;
        self.sigma_d_sq = chi * self.sigma_d_sq + w * q * q * d * d;
        self.sigma_y_sq = chi * self.sigma_y_sq + w * y * y;
        self.k += 1;
    }

    /// Background-noise power recovered from the smoothed signal powers.
    pub fn noise_variance(&self) -> f64 {
        let denom = self.sigma_e_sq + self.sigma_y_sq;
        if denom < POWER_FLOOR {
            return 0.0;
        }
        self.sigma_d_sq * self.sigma_e_sq / denom
    }

    /// Forgetting factor for the upcoming update, always inside
    /// `[lambda_min, lambda_max]`.
    pub fn forgetting_factor(&self) -> f64 {
        let p = &self.params;
        if self.k <= self.warmup_len {
            return p.lambda_max;
        }
        let sigma_v_sq = self.noise_variance();
        if self.sigma_e_sq < p.tau * sigma_v_sq {
            return p.lambda_max;
        }
        let sigma_e = self.sigma_e_sq.sqrt();
        let sigma_theta = self.sigma_theta_sq.sqrt();
        let sigma_v = sigma_v_sq.sqrt();
        let lambda = sigma_theta * sigma_v / ((sigma_e - sigma_v).abs() + p.kappa);
        lambda.clamp(p.lambda_min, p.lambda_max)
    }
}
