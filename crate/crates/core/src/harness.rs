//! Seeded Monte-Carlo experiment runner and its output files.
//!
//! Each run owns independently seeded generators for the system draw, the
//! input stream, the noise stream, and the SNR pilot; all algorithms inside
//! one run consume the identical input/desired stream so their curves are
//! comparable. Runs execute in parallel, but per-run results reduce in run
//! order, so the averaged curve (and the emitted CSV) is byte-identical
//! for a given configuration.
//!
//! The learning-curve metric is the normalized mean square deviation
//! `10 log10(||w - w_o||^2 / ||w_o||^2)`, averaged across runs in the
//! linear ratio domain before the dB conversion.

use std::fs;
use std::path::Path;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algorithms::AdaptiveFilter;
use crate::config::{CaseKind, ExperimentConfig, NoiseKind};
use crate::error::{Error, Result};
use crate::filter::Regressor;
use crate::signal::{
    estimate_signal_power, load_channel, synthetic_echo_channel, Ar2State, NoiseModel,
    SparseSystem, PILOT_SAMPLES,
};

/// Reported NMSD floor standing in for exact identification (-inf dB).
pub const NMSD_FLOOR_DB: f64 = -300.0;

/// One learning curve: a label and the per-iteration ensemble NMSD in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct NmsdCurve {
    pub label: String,
    pub values: Vec<f64>,
}

/// Normalized mean square deviation in dB, floored at
/// [`NMSD_FLOOR_DB`]. A zero ground truth is a configuration error.
pub fn nmsd(w: &DVector<f64>, w_o: &DVector<f64>) -> Result<f64> {
    let denom = w_o.norm_squared();
    if denom == 0.0 {
        return Err(Error::Config(
            "NMSD is undefined for an all-zero system".into(),
        ));
    }
    Ok(ratio_to_db((w - w_o).norm_squared() / denom))
}

fn ratio_to_db(ratio: f64) -> f64 {
    let db = 10.0 * ratio.log10();
    db.max(NMSD_FLOOR_DB)
}

/// SplitMix64 finalizer used for counter-based seed derivation.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Independent sub-stream seed for (master seed, run index, stream id):
/// two chained SplitMix64 passes over the packed counters. Parallel runs
/// stay reproducible under any scheduling.
pub fn substream_seed(master: u64, run: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(master ^ run.wrapping_mul(0xA076_1D64_78BD_642F)) ^ stream)
}

const STREAM_SYSTEM: u64 = 1;
const STREAM_SYSTEM_CHANGE: u64 = 2;
const STREAM_INPUT: u64 = 3;
const STREAM_NOISE: u64 = 4;
const STREAM_PILOT: u64 = 5;

/// Everything one Monte-Carlo run consumes: the shared input/desired
/// streams and the ground-truth systems they encode.
#[derive(Debug, Clone)]
pub struct RunData {
    pub x: Vec<f64>,
    pub d: Vec<f64>,
    pub system_before: SparseSystem,
    pub system_after: Option<SparseSystem>,
    pub noise: NoiseModel,
    /// Background Gaussian variance implied by the SNR (0 for alpha-stable
    /// noise, which is parameterized directly).
    pub sigma_g_sq: f64,
}

impl RunData {
    /// Ground truth in effect at the given 1-based iteration.
    pub fn truth_at(&self, iteration: usize, change_at: Option<usize>) -> &SparseSystem {
        match (&self.system_after, change_at) {
            (Some(after), Some(change)) if iteration >= change => after,
            _ => &self.system_before,
        }
    }
}

fn resolve_system(
    cfg: &ExperimentConfig,
    run: u64,
) -> Result<(SparseSystem, Option<SparseSystem>)> {
    if cfg.uses_fixed_channel() {
        let system = match &cfg.channel_file {
            Some(path) => load_channel(path)?,
            None => {
                debug_assert_eq!(cfg.case, CaseKind::Case2);
                synthetic_echo_channel()
            }
        };
        if system.len() != cfg.taps {
            return Err(Error::Config(format!(
                "channel has {} taps but the configuration says m = {}",
                system.len(),
                cfg.taps
            )));
        }
        if system.taps.norm_squared() == 0.0 {
            return Err(Error::Config(
                "channel is identically zero; NMSD is undefined".into(),
            ));
        }
        return Ok((system, None));
    }

    let before = SparseSystem::random(
        cfg.taps,
        cfg.active,
        substream_seed(cfg.seed, run, STREAM_SYSTEM),
    )?;
    let after = match cfg.change_at {
        Some(_) => Some(SparseSystem::random(
            cfg.taps,
            cfg.active_after_change,
            substream_seed(cfg.seed, run, STREAM_SYSTEM_CHANGE),
        )?),
        None => None,
    };
    Ok((before, after))
}

/// Generate the input/desired streams for one run of the experiment.
pub fn generate_run_data(cfg: &ExperimentConfig, run: u64) -> Result<RunData> {
    let (system_before, system_after) = resolve_system(cfg, run)?;

    // Noise parameters; the SNR pilot measures the pre-change system.
    let (noise, sigma_g_sq) = match cfg.noise {
        NoiseKind::AlphaStable => (
            NoiseModel::AlphaStable {
                alpha: cfg.alpha,
                gamma: cfg.gamma,
            },
            0.0,
        ),
        kind => {
            let mut pilot = Ar2State::new(substream_seed(cfg.seed, run, STREAM_PILOT));
            let power =
                estimate_signal_power(&system_before.taps, || pilot.next_sample(), PILOT_SAMPLES);
            if power <= 0.0 {
                return Err(Error::Config(
                    "useful signal power is zero; check the system and input model".into(),
                ));
            }
            let sigma_g_sq = power / 10f64.powf(cfg.snr_db / 10.0);
            let model = match kind {
                NoiseKind::Gaussian => NoiseModel::Gaussian { sigma_g_sq },
                NoiseKind::ContaminatedGaussian => NoiseModel::ContaminatedGaussian {
                    sigma_g_sq,
                    p: cfg.impulse_prob,
                    sigma_eta_sq: cfg.impulse_factor * power,
                },
                NoiseKind::AlphaStable => unreachable!(),
            };
            (model, sigma_g_sq)
        }
    };
    noise.validate()?;

    let mut input = Ar2State::new(substream_seed(cfg.seed, run, STREAM_INPUT));
    let x: Vec<f64> = (0..cfg.iterations).map(|_| input.next_sample()).collect();

    let mut noise_rng = ChaCha8Rng::seed_from_u64(substream_seed(cfg.seed, run, STREAM_NOISE));
    let mut truth_reg = Regressor::new(cfg.taps);
    let mut d = Vec::with_capacity(cfg.iterations);
    for (i, &xv) in x.iter().enumerate() {
        truth_reg.push(xv);
        let system = match (&system_after, cfg.change_at) {
            (Some(after), Some(change)) if i + 1 >= change => after,
            _ => &system_before,
        };
        d.push(truth_reg.vector().dot(&system.taps) + noise.next_sample(&mut noise_rng));
    }

    Ok(RunData {
        x,
        d,
        system_before,
        system_after,
        noise,
        sigma_g_sq,
    })
}

/// Per-algorithm, per-iteration squared deviation ratios of one run.
fn run_once(cfg: &ExperimentConfig, run: u64) -> Result<Vec<Vec<f64>>> {
    let data = generate_run_data(cfg, run)?;
    let norm_before = data.system_before.taps.norm_squared();
    if norm_before == 0.0 {
        return Err(Error::Config(
            "ground-truth system is identically zero; NMSD is undefined".into(),
        ));
    }

    let mut ratios = vec![Vec::with_capacity(cfg.iterations); cfg.algorithms.len()];
    for (slot, entry) in cfg.algorithms.iter().enumerate() {
        let mut filter = AdaptiveFilter::new(entry.spec.clone(), cfg.taps)?;
        for i in 0..cfg.iterations {
            filter.step(data.x[i], data.d[i]).map_err(|err| match err {
                Error::NonFinite {
                    what, iteration, ..
                } => Error::NonFinite {
                    what,
                    algorithm: format!("{} (run {run})", entry.label),
                    iteration,
                },
                other => other,
            })?;
            let truth = data.truth_at(i + 1, cfg.change_at);
            let ratio = (filter.weights() - &truth.taps).norm_squared() / truth.taps.norm_squared();
            ratios[slot].push(ratio);
        }
    }
    Ok(ratios)
}

/// Run the full seeded ensemble and average the learning curves.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<NmsdCurve>> {
    cfg.validate()?;

    let per_run: Vec<Result<Vec<Vec<f64>>>> = (0..cfg.runs as u64)
        .into_par_iter()
        .map(|run| run_once(cfg, run))
        .collect();

    // Reduce in run order so float summation is scheduling-independent.
    let mut sums = vec![vec![0.0f64; cfg.iterations]; cfg.algorithms.len()];
    for run_result in per_run {
        let ratios = run_result?;
        for (sum, run_ratios) in sums.iter_mut().zip(&ratios) {
            for (acc, &r) in sum.iter_mut().zip(run_ratios) {
                *acc += r;
            }
        }
    }

    let runs = cfg.runs as f64;
    Ok(cfg
        .algorithms
        .iter()
        .zip(sums)
        .map(|(entry, sum)| NmsdCurve {
            label: entry.label.clone(),
            values: sum.into_iter().map(|s| ratio_to_db(s / runs)).collect(),
        })
        .collect())
}

/// Write `nmsd.csv`, the fully resolved configuration, and a plot script
/// into `output_dir`.
pub fn emit_outputs(curves: &[NmsdCurve], cfg: &ExperimentConfig, output_dir: &Path) -> Result<()> {
    fs::create_dir_all(output_dir).map_err(|e| Error::io(output_dir, e))?;

    let csv_path = output_dir.join("nmsd.csv");
    fs::write(&csv_path, render_csv(curves)).map_err(|e| Error::io(&csv_path, e))?;

    let cfg_path = output_dir.join("config_resolved");
    fs::write(&cfg_path, crate::config::format_config(cfg)).map_err(|e| Error::io(&cfg_path, e))?;

    let plot_path = output_dir.join("plot_nmsd.py");
    fs::write(&plot_path, PLOT_SCRIPT).map_err(|e| Error::io(&plot_path, e))?;
    Ok(())
}

/// CSV with an `iteration` column and one full-precision column per
/// algorithm label.
pub fn render_csv(curves: &[NmsdCurve]) -> String {
    let mut out = String::from("iteration");
    for curve in curves {
        out.push(',');
        out.push_str(&curve.label);
    }
    out.push('\n');
    let iterations = curves.first().map_or(0, |c| c.values.len());
    for i in 0..iterations {
        out.push_str(&(i + 1).to_string());
        for curve in curves {
            out.push(',');
            out.push_str(&curve.values[i].to_string());
        }
        out.push('\n');
    }
    out
}

/// Parse a CSV written by [`render_csv`] back into curves.
pub fn parse_csv(text: &str) -> Result<Vec<NmsdCurve>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("empty CSV".into()))?;
    let labels: Vec<&str> = header.split(',').skip(1).collect();
    let mut curves: Vec<NmsdCurve> = labels
        .iter()
        .map(|&l| NmsdCurve {
            label: l.to_string(),
            values: Vec::new(),
        })
        .collect();
    for (lineno, line) in lines.enumerate() {
        let mut fields = line.split(',');
        let _iter = fields.next();
        for curve in curves.iter_mut() {
            let field = fields
                .next()
                .ok_or_else(|| Error::Config(format!("CSV row {} is short", lineno + 2)))?;
            let value: f64 = field
                .parse()
                .map_err(|_| Error::Config(format!("bad CSV value `{field}`")))?;
            curve.values.push(value);
        }
    }
    Ok(curves)
}

const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Render the NMSD learning curves from nmsd.csv (same directory)."""
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "nmsd.csv")

with open(path, newline="") as fh:
    rows = list(csv.reader(fh))

labels = rows[0][1:]
iterations = [int(r[0]) for r in rows[1:]]
series = [[float(r[i + 1]) for r in rows[1:]] for i in range(len(labels))]

plt.figure(figsize=(8, 5))
for label, values in zip(labels, series):
    plt.plot(iterations, values, label=label, linewidth=1.0)
plt.xlabel("iteration k")
plt.ylabel("NMSD (dB)")
plt.grid(True, alpha=0.3)
plt.legend()
plt.tight_layout()
out = os.path.join(os.path.dirname(path), "nmsd.png")
plt.savefig(out, dpi=150)
print(f"wrote {out}")
"#;
