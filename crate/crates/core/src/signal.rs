//! Everything the experiments consume: AR(2) input, sparse ground-truth
//! systems, contaminated-Gaussian and symmetric alpha-stable noise, and
//! channel-file loading.
//!
//! All generators are deterministic under a fixed seed; independent runs
//! own independently seeded generators.

use std::fs;
use std::path::Path;

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// First AR coefficient of the input model `x_k = 0.4 x_{k-1} - 0.4 x_{k-2} + nu_k`.
pub const AR2_A1: f64 = 0.4;
/// Second AR coefficient.
pub const AR2_A2: f64 = -0.4;

/// Second-order autoregressive input generator driven by unit-variance
/// zero-mean Gaussian innovations.
#[derive(Debug, Clone)]
pub struct Ar2State {
    x1: f64,
    x2: f64,
    rng: ChaCha8Rng,
}

impl Ar2State {
    pub fn new(seed: u64) -> Self {
        Ar2State {
            x1: 0.0,
            x2: 0.0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Next input sample with an internally drawn innovation.
    pub fn next_sample(&mut self) -> f64 {
        let nu: f64 = self.rng.sample(StandardNormal);
        self.next_with_innovation(nu)
    }

    /// Next input sample with a caller-supplied innovation (used by tests
    /// that force the driving noise).
    pub fn next_with_innovation(&mut self, nu: f64) -> f64 {
        let x = AR2_A1 * self.x1 + AR2_A2 * self.x2 + nu;
        self.x2 = self.x1;
        self.x1 = x;
        x
    }
}

/// A ground-truth system: tap vector plus the indices of its active taps.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSystem {
    pub taps: DVector<f64>,
    pub support: Vec<usize>,
}

impl SparseSystem {
    /// Random sparse system: `active` support indices drawn uniformly
    /// without replacement, tap values zero-mean Gaussian with variance
    /// `1 / sqrt(active)`.
    pub fn random(taps: usize, active: usize, seed: u64) -> Result<Self> {
        if active == 0 || active > taps {
            return Err(Error::invalid(
                "active",
                format!("need 1 <= active <= {taps}, got {active}"),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        // Partial Fisher-Yates draw of `active` distinct indices.
        let mut indices: Vec<usize> = (0..taps).collect();
        for i in 0..active {
            let j = rng.gen_range(i..taps);
            indices.swap(i, j);
        }
        let mut support: Vec<usize> = indices[..active].to_vec();
        support.sort_unstable();

        let std = (1.0 / (active as f64).sqrt()).sqrt();
        let mut w = DVector::zeros(taps);
        for &idx in &support {
            w[idx] = rng.sample::<f64, _>(StandardNormal) * std;
        }
        Ok(SparseSystem { taps: w, support })
    }

    /// Wrap an explicit tap vector, deriving the support from its nonzeros.
    pub fn from_taps(taps: DVector<f64>) -> Self {
        let support = taps
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| i)
            .collect();
        SparseSystem { taps, support }
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Number of active (nonzero) taps.
    pub fn active_count(&self) -> usize {
        self.support.len()
    }
}

/// Observation-noise model selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    /// Plain zero-mean white Gaussian noise.
    Gaussian { sigma_g_sq: f64 },
    /// Gaussian background plus Bernoulli-gated high-variance impulses.
    ContaminatedGaussian {
        sigma_g_sq: f64,
        p: f64,
        sigma_eta_sq: f64,
    },
    /// Symmetric alpha-stable noise with characteristic function
    /// `exp(-gamma |t|^alpha)`.
    AlphaStable { alpha: f64, gamma: f64 },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::Gaussian { sigma_g_sq } => {
                if sigma_g_sq < 0.0 {
                    return Err(Error::invalid("sigma_g_sq", "variance must be nonnegative"));
                }
            }
            NoiseModel::ContaminatedGaussian {
                sigma_g_sq,
                p,
                sigma_eta_sq,
            } => {
                if sigma_g_sq < 0.0 || sigma_eta_sq < 0.0 {
                    return Err(Error::invalid("sigma_sq", "variances must be nonnegative"));
                }
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::invalid(
                        "p",
                        "impulse probability must lie in [0, 1]",
                    ));
                }
            }
            NoiseModel::AlphaStable { alpha, gamma } => {
                if !(alpha > 0.0 && alpha <= 2.0) {
                    return Err(Error::invalid(
                        "alpha",
                        "stability index must lie in (0, 2]",
                    ));
                }
                if !(gamma > 0.0) {
                    return Err(Error::invalid("gamma", "dispersion must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Draw the next noise sample.
    pub fn next_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            NoiseModel::Gaussian { sigma_g_sq } => cg_noise_next(sigma_g_sq, 0.0, 0.0, rng).0,
            NoiseModel::ContaminatedGaussian {
                sigma_g_sq,
                p,
                sigma_eta_sq,
            } => cg_noise_next(sigma_g_sq, p, sigma_eta_sq, rng).0,
            NoiseModel::AlphaStable { alpha, gamma } => alpha_stable_next(alpha, gamma, rng),
        }
    }
}

/// Contaminated-Gaussian sample `g + b * eta` with `g ~ N(0, sigma_g_sq)`,
/// `b ~ Bernoulli(p)`, `eta ~ N(0, sigma_eta_sq)`. Returns the sample and
/// whether the impulse branch fired. With `p = 0` the draw sequence is
/// identical to the plain Gaussian generator under the same seed.
pub fn cg_noise_next<R: Rng + ?Sized>(
    sigma_g_sq: f64,
    p: f64,
    sigma_eta_sq: f64,
    rng: &mut R,
) -> (f64, bool) {
    let g: f64 = rng.sample::<f64, _>(StandardNormal) * sigma_g_sq.sqrt();
    if p > 0.0 && rng.gen_bool(p) {
        let eta: f64 = rng.sample::<f64, _>(StandardNormal) * sigma_eta_sq.sqrt();
        (g + eta, true)
    } else {
        (g, false)
    }
}

/// Symmetric alpha-stable sample with characteristic function
/// `exp(-gamma |t|^alpha)`, drawn by the Chambers-Mallows-Stuck transform
/// and scaled by `gamma^(1/alpha)`. At `alpha = 2` this reduces to a
/// Gaussian with variance `2 gamma`.
pub fn alpha_stable_next<R: Rng + ?Sized>(alpha: f64, gamma: f64, rng: &mut R) -> f64 {
    let u = clamp_open_unit(rng.gen::<f64>());
    let v = std::f64::consts::PI * (u - 0.5);
    let standard = if (alpha - 1.0).abs() < 1e-12 {
        v.tan()
    } else {
        let w = -clamp_open_unit(rng.gen::<f64>()).ln();
        let t1 = (alpha * v).sin() / v.cos().powf(1.0 / alpha);
        let t2 = (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha);
        t1 * t2
    };
    gamma.powf(1.0 / alpha) * standard
}

fn clamp_open_unit(x: f64) -> f64 {
    x.clamp(1e-15, 1.0 - 1e-15)
}

/// Default pilot length used to estimate the useful signal power.
pub const PILOT_SAMPLES: usize = 100_000;

/// Mean-square output `E[(x^T w_o)^2]` of the system driven by a pilot
/// input stream (zero-prefilled delay line, `n_samples` long).
pub fn estimate_signal_power<F: FnMut() -> f64>(
    system: &DVector<f64>,
    mut next_input: F,
    n_samples: usize,
) -> f64 {
    let mut reg = crate::filter::Regressor::new(system.len());
    let mut acc = 0.0;
    for _ in 0..n_samples {
        reg.push(next_input());
        let y = reg.vector().dot(system);
        acc += y * y;
    }
    acc / n_samples as f64
}

/// Background-noise variance matching a target SNR:
/// `sigma_g^2 = E[(x^T w_o)^2] / 10^(snr_db / 10)`, the signal power
/// estimated from a pilot stream. Errors on an all-zero system.
pub fn snr_to_sigma_g<F: FnMut() -> f64>(
    system: &DVector<f64>,
    next_input: F,
    snr_db: f64,
) -> Result<f64> {
    if system.iter().all(|&v| v == 0.0) {
        return Err(Error::Config(
            "SNR is undefined for an all-zero system".into(),
        ));
    }
    let power = estimate_signal_power(system, next_input, PILOT_SAMPLES);
    Ok(power / 10f64.powf(snr_db / 10.0))
}

/// Load a channel from a plain-text file: one coefficient per line,
/// blank lines and `#` comments ignored.
pub fn load_channel(path: &Path) -> Result<SparseSystem> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut taps = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let value: f64 = trimmed.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            reason: format!("expected a real coefficient, got `{trimmed}`"),
        })?;
        taps.push(value);
    }
    if taps.is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            reason: "channel file contains no coefficients".into(),
        });
    }
    Ok(SparseSystem::from_taps(DVector::from_vec(taps)))
}

/// Write a channel in the same plain-text format `load_channel` reads.
pub fn save_channel(path: &Path, system: &SparseSystem) -> Result<()> {
    let mut out = String::with_capacity(system.len() * 24);
    out.push_str("# channel impulse response, one coefficient per line\n");
    for v in system.taps.iter() {
        out.push_str(&format!("{v}\n"));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Bundled 256-tap sparse echo-like channel: a short bulk delay, a main
/// dispersive burst of decaying oscillating taps, and a weak late
/// reflection. A synthetic stand-in for a measured echo path, not a
/// standardized response.
pub fn synthetic_echo_channel() -> SparseSystem {
    let mut taps = DVector::zeros(256);
    // Main burst after the bulk delay.
    for i in 0..24 {
        let t = i as f64;
        taps[64 + i] = (-t / 6.0).exp() * (0.9f64).powi(i as i32) * (1.1 * t).cos();
    }
    // Weak late reflection.
    for i in 0..8 {
        let t = i as f64;
        taps[180 + i] = 0.12 * (-t / 3.0).exp() * (0.8 * t).sin();
    }
    // Unit-energy normalization.
    let norm = taps.norm();
    taps /= norm;
    SparseSystem::from_taps(taps)
}
