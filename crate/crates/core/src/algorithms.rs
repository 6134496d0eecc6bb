//! Algorithm variants assembled from the core recursions, one sample at a
//! time behind a single adaptive-filter interface.
//!
//! Every step runs the same pipeline; the variant decides which pieces are
//! live:
//!
//! 1. robust weight `q` (fixed at 1, or gated by the M-estimator),
//! 2. forgetting factor `lambda` (fixed, or from the power-tracking rule),
//! 3. gain, half update `psi = w + K e`, inversion-lemma covariance update,
//! 4. sparsity weight `rho` (zero, fixed with `(1 - lambda)` absorbed, or
//!    deviation-minimizing) and the correction `w = psi - rho P grad`,
//! 5. optional covariance reset on an error-energy jump.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::filter::{self, FilterState, Regressor, StepDiagnostics};
use crate::robust::{
    m_estimate_weight, MEstimatorParams, ResetDetectorState, ResetParams, RobustScaleState,
};
use crate::sparsity::{log_penalty_subgradient, rho_opt_from_direction};
use crate::vff::{VffParams, VffState};

/// The algorithm variants the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Plain exponentially weighted RLS.
    Rls,
    /// RLS with a fixed-weight log-penalty shrinkage step.
    SRls,
    /// RLS with the clipping M-estimator (robust weight).
    Rlm,
    /// Robust RLS plus the fixed-weight shrinkage step.
    SRrls,
    /// Robust RLS with the online-adapted sparsity weight.
    SRrlsOpt,
    /// Adaptive-weight variant plus the covariance reset detector.
    SRrlsOptRs,
    /// Jointly adapted sparsity weight and forgetting factor.
    JoSRrls,
}

impl Variant {
    pub const ALL: [Variant; 7] = [
        Variant::Rls,
        Variant::SRls,
        Variant::Rlm,
        Variant::SRrls,
        Variant::SRrlsOpt,
        Variant::SRrlsOptRs,
        Variant::JoSRrls,
    ];

    /// Canonical display label (also the CSV column name).
    pub fn label(&self) -> &'static str {
        match self {
            Variant::Rls => "RLS",
            Variant::SRls => "S-RLS",
            Variant::Rlm => "RLM",
            Variant::SRrls => "S-RRLS",
            Variant::SRrlsOpt => "S-RRLS-OPT",
            Variant::SRrlsOptRs => "S-RRLS-OPT-RS",
            Variant::JoSRrls => "JO-S-RRLS",
        }
    }

    /// Parse a label as written by `label`, case-insensitively.
    pub fn parse(s: &str) -> Option<Variant> {
        let norm = s.trim().to_ascii_uppercase();
        Variant::ALL.iter().copied().find(|v| v.label() == norm)
    }

    /// Does the variant gate samples through the M-estimator?
    pub fn is_robust(&self) -> bool {
        !matches!(self, Variant::Rls | Variant::SRls)
    }

    /// Does the variant apply a sparsity correction at all?
    pub fn is_sparse(&self) -> bool {
        !matches!(self, Variant::Rls | Variant::Rlm)
    }

    /// Does the variant adapt the sparsity weight online?
    pub fn has_adaptive_rho(&self) -> bool {
        matches!(
            self,
            Variant::SRrlsOpt | Variant::SRrlsOptRs | Variant::JoSRrls
        )
    }

    /// Does the variant adapt the forgetting factor?
    pub fn has_vff(&self) -> bool {
        matches!(self, Variant::JoSRrls)
    }

    /// Does the variant include the reset detector by default?
    pub fn has_reset(&self) -> bool {
        matches!(self, Variant::SRrlsOptRs)
    }
}

/// Complete parameterization of one algorithm instance.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSpec {
    pub variant: Variant,
    /// Fixed forgetting factor in `(0, 1]`; ignored by the jointly
    /// optimized variant.
    pub lambda: f64,
    /// Fixed sparsity weight; the step applies `rho * (1 - lambda)`.
    /// Ignored by adaptive-weight variants.
    pub rho: f64,
    /// Log-penalty shrinkage factor.
    pub mu: f64,
    /// Covariance regularization, `P_0 = I / delta`.
    pub delta: f64,
    /// M-estimator threshold parameters (robust variants).
    pub m_estimator: MEstimatorParams,
    /// Forgetting-factor adaptation parameters (jointly optimized variant).
    pub vff: VffParams,
    /// Reset-detector parameters (reset-enabled variants).
    pub reset: ResetParams,
    /// Extra switch to pair the reset detector with the jointly optimized
    /// variant; the reset variant always carries it.
    pub with_reset: bool,
    /// Steps to hold the adaptive sparsity weight at zero; `None` means
    /// half the filter length.
    pub rho_warmup: Option<usize>,
    /// Covariance diagonal ceiling as a multiple of `1 / delta`.
    pub p_ceiling_factor: f64,
}

impl AlgorithmSpec {
    pub fn new(variant: Variant) -> Self {
        AlgorithmSpec {
            variant,
            lambda: 0.995,
            rho: 0.0,
            mu: 0.01,
            delta: 0.5,
            m_estimator: MEstimatorParams::default(),
            vff: VffParams::default(),
            reset: ResetParams::default(),
            with_reset: false,
            rho_warmup: None,
            p_ceiling_factor: 1e6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) {
            return Err(Error::invalid("delta", "regularization must be positive"));
        }
        if !self.variant.has_vff() && !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(Error::invalid(
                "lambda",
                format!("forgetting factor must lie in (0, 1], got {}", self.lambda),
            ));
        }
        if self.variant.is_sparse() {
            if !(self.mu > 0.0) {
                return Err(Error::invalid("mu", "shrinkage factor must be positive"));
            }
            if !self.variant.has_adaptive_rho() && !(self.rho >= 0.0 && self.rho.is_finite()) {
                return Err(Error::invalid(
                    "rho",
                    "fixed sparsity weight must be nonnegative",
                ));
            }
        }
        if self.variant.is_robust() {
            self.m_estimator.validate()?;
        }
        if self.variant.has_vff() {
            self.vff.validate()?;
        }
        if self.variant.has_reset() || self.with_reset {
            self.reset.validate()?;
        }
        if !(self.p_ceiling_factor > 1.0) {
            return Err(Error::invalid(
                "p_ceiling_factor",
                "covariance ceiling must exceed the initial diagonal",
            ));
        }
        Ok(())
    }
}

/// One adaptive filter: the algorithm spec plus all live state.
#[derive(Debug, Clone)]
pub struct AdaptiveFilter {
    spec: AlgorithmSpec,
    state: FilterState,
    regressor: Regressor,
    robust: Option<RobustScaleState>,
    vff: Option<VffState>,
    reset: Option<ResetDetectorState>,
    rho_warmup: usize,
    p_ceiling: f64,
}

impl AdaptiveFilter {
    pub fn new(spec: AlgorithmSpec, taps: usize) -> Result<Self> {
        spec.validate()?;
        let state = FilterState::new(taps, spec.delta)?;
        let robust = if spec.variant.is_robust() {
            Some(RobustScaleState::new(spec.m_estimator)?)
        } else {
            None
        };
        let vff = if spec.variant.has_vff() {
            Some(VffState::new(spec.vff, spec.m_estimator.window_len)?)
        } else {
            None
        };
        let reset = if spec.variant.has_reset() || spec.with_reset {
            Some(ResetDetectorState::new(spec.reset)?)
        } else {
            None
        };
        let rho_warmup = spec.rho_warmup.unwrap_or_else(|| taps.div_ceil(2));
        let p_ceiling = spec.p_ceiling_factor / spec.delta;
        Ok(AdaptiveFilter {
            spec,
            state,
            regressor: Regressor::new(taps),
            robust,
            vff,
            reset,
            rho_warmup,
            p_ceiling,
        })
    }

    pub fn spec(&self) -> &AlgorithmSpec {
        &self.spec
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.state.weights
    }

    pub fn covariance(&self) -> &nalgebra::DMatrix<f64> {
        &self.state.inv_corr
    }

    pub fn iteration(&self) -> usize {
        self.state.iteration
    }

    pub fn vff_state(&self) -> Option<&VffState> {
        self.vff.as_ref()
    }

    pub fn robust_state(&self) -> Option<&RobustScaleState> {
        self.robust.as_ref()
    }

    /// Restore `P = I / delta`, keeping the weights and all estimator
    /// side-state untouched.
    pub fn reset_covariance(&mut self) {
        self.state.reset_covariance(self.spec.delta);
    }

    /// Consume one input/desired pair and update the filter.
    pub fn step(&mut self, x_sample: f64, d: f64) -> Result<StepDiagnostics> {
        self.regressor.push(x_sample);
        let x = self.regressor.vector();
        let y = x.dot(&self.state.weights);
        let e = d - y;

        // Robust weight first: the power recursions below are gated by it.
        let q = match &mut self.robust {
            Some(scale) => {
                let xi = scale.update_threshold(e);
                m_estimate_weight(e, xi)
            }
            None => 1.0,
        };

        // Weighted excitation level theta = q x^T P x, independent of
        // lambda, so it can feed the forgetting-factor rule.
        let (px, theta) = if q == 0.0 {
            (None, 0.0)
        } else {
            let px = &self.state.inv_corr * x;
            let theta = q * x.dot(&px);
            (Some(px), theta)
        };

        let lambda = match &mut self.vff {
            Some(vff) => {
                vff.update_powers(q, e, theta, d, y);
                vff.forgetting_factor()
            }
            None => self.spec.lambda,
        };

        // Gain, half update, covariance.
        let (psi, p_clamped) = match px {
            Some(px) => {
                let gain = filter::gain_from_px(&px, q, lambda, theta)?;
                let psi = filter::half_update(&self.state.weights, &gain, e);
                filter::update_covariance_in_place(&mut self.state.inv_corr, &gain, &px, lambda);
                let clamped = self.state.clamp_covariance(self.p_ceiling);
                (psi, clamped)
            }
            None => {
                // Rejected sample: zero gain, pure forgetting.
                filter::inflate_covariance(&mut self.state.inv_corr, lambda);
                let clamped = self.state.clamp_covariance(self.p_ceiling);
                (self.state.weights.clone(), clamped)
            }
        };

        let xi_err = d - x.dot(&psi);

        // Sparsity correction against the refreshed covariance.
        let (rho_used, weights_next) = if !self.spec.variant.is_sparse() {
            (0.0, psi)
        } else if self.spec.variant.has_adaptive_rho() {
            let grad = log_penalty_subgradient(&psi, self.spec.mu);
            let g = &self.state.inv_corr * &grad;
            let rho = rho_opt_from_direction(
                &psi,
                &self.state.weights,
                &g,
                self.state.iteration + 1,
                self.rho_warmup,
            );
            let w = if rho == 0.0 { psi } else { &psi - &g * rho };
            (rho, w)
        } else {
            let rho_eff = self.spec.rho * (1.0 - lambda);
            if rho_eff == 0.0 {
                (0.0, psi)
            } else {
                let grad = log_penalty_subgradient(&self.state.weights, self.spec.mu);
                let g = &self.state.inv_corr * &grad;
                (rho_eff, &psi - &g * rho_eff)
            }
        };
        self.state.weights = weights_next;

        // Error-energy reset: restore P_0, keep everything else.
        let mut reset_fired = false;
        if let Some(detector) = &mut self.reset {
            if detector.check(q, e) {
                self.state.reset_covariance(self.spec.delta);
                reset_fired = true;
            }
        }

        self.state.iteration += 1;

        if !self.state.weights.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                what: "weights",
                algorithm: self.spec.variant.label().to_string(),
                iteration: self.state.iteration,
            });
        }
        if !self.state.inv_corr.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                what: "covariance",
                algorithm: self.spec.variant.label().to_string(),
                iteration: self.state.iteration,
            });
        }

        Ok(StepDiagnostics {
            e,
            xi: xi_err,
            q,
            theta,
            lambda,
            rho: rho_used,
            reset_fired,
            p_clamped,
        })
    }
}
