use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pinning::BoundaryKind;
use crate::sampler::SampleChain;

/// Per-step mixing data for one chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingMetrics {
    /// Spins (over mobile sites) changed by each exposure.
    pub hamming: Vec<f64>,
    /// Monopole count minus the count forced by the boundary condition.
    pub surplus: Vec<f64>,
    pub burn_in: usize,
}

impl MixingMetrics {
    pub fn mean_hamming(&self) -> f64 {
        mean(&self.hamming[self.burn_in.min(self.hamming.len())..])
    }

    pub fn mean_surplus(&self) -> f64 {
        mean(&self.surplus[self.burn_in.min(self.surplus.len())..])
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 }
}

pub fn mixing_metrics(chain: &SampleChain, kind: BoundaryKind) -> MixingMetrics {
    let forced = kind.forced_monopoles() as f64;
    MixingMetrics {
        hamming: chain.steps.iter().map(|s| s.hamming as f64).collect(),
        surplus: chain.steps.iter().map(|s| s.monopoles as f64 - forced).collect(),
        burn_in: chain.burn_in,
    }
}

/// Sample mean with a percentile bootstrap interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// True when the two intervals do not overlap and `self` lies above.
    pub fn clearly_above(&self, other: &Interval) -> bool {
        self.lo > other.hi
    }
}

/// Percentile bootstrap interval for the mean at confidence `level`.
pub fn bootstrap_mean<R: Rng + ?Sized>(values: &[f64], resamples: usize, level: f64, rng: &mut R) -> Result<Interval> {
    if values.is_empty() {
        return Err(Error::Empty("bootstrap sample"));
    }
    if !(0.0 < level && level < 1.0) || resamples == 0 {
        return Err(Error::Config(format!("bad bootstrap settings: level {level}, {resamples} resamples")));
    }
    let n = values.len();
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| values[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    let pick = |p: f64| means[((p * (resamples - 1) as f64).round() as usize).min(resamples - 1)];
    Ok(Interval { mean: mean(values), lo: pick(tail), hi: pick(1.0 - tail) })
}

pub const BOOTSTRAP_RESAMPLES: usize = 2000;

/// Repetition-level summary: bootstrap over per-chain means.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingSummary {
    pub hamming: Interval,
    pub surplus: Interval,
    pub repetitions: usize,
}

pub fn summarize_mixing<R: Rng + ?Sized>(metrics: &[MixingMetrics], rng: &mut R) -> Result<MixingSummary> {
    let h: Vec<f64> = metrics.iter().map(MixingMetrics::mean_hamming).collect();
    let s: Vec<f64> = metrics.iter().map(MixingMetrics::mean_surplus).collect();
    Ok(MixingSummary {
        hamming: bootstrap_mean(&h, BOOTSTRAP_RESAMPLES, 0.95, rng)?,
        surplus: bootstrap_mean(&s, BOOTSTRAP_RESAMPLES, 0.95, rng)?,
        repetitions: metrics.len(),
    })
}
