use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::bessel::{fit_k0, BesselFit};
use super::monopoles::MonopoleMap;
use crate::error::{Error, Result};

/// Bins with fewer vertices than this are dropped.
pub const MIN_BIN_VERTICES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreeningBin {
    pub distance: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreeningProfile {
    /// Pinned vertex `(row, col)`.
    pub origin: (usize, usize),
    pub bins: Vec<ScreeningBin>,
    /// `A K0(x/ξ)` fit over bin means, absent for an all-zero profile.
    pub fit: Option<BesselFit>,
    /// Profiles restricted to even and odd grid (Manhattan) distance.
    pub even: Vec<ScreeningBin>,
    pub odd: Vec<ScreeningBin>,
}

impl ScreeningProfile {
    pub fn xi(&self) -> Option<f64> {
        self.fit.map(|f| f.xi)
    }
}

fn bin(samples: impl Iterator<Item = (u64, f64)>) -> Vec<ScreeningBin> {
    let mut groups: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for (d2, v) in samples {
        groups.entry(d2).or_default().push(v);
    }
    groups
        .into_iter()
        .filter(|(_, v)| v.len() >= MIN_BIN_VERTICES)
        .map(|(d2, v)| ScreeningBin {
            distance: (d2 as f64).sqrt(),
            mean: v.iter().sum::<f64>() / v.len() as f64,
            min: v.iter().copied().fold(f64::INFINITY, f64::min),
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            count: v.len(),
        })
        .collect()
}

/// `(D - C) / mean(C)` per vertex, binned by exact Euclidean distance from
/// the vertex pinned in `pinned_map`, plus a Bessel fit over the bins.
pub fn screening_profile(pinned_map: &MonopoleMap, background: &MonopoleMap) -> Result<ScreeningProfile> {
    if pinned_map.rows != background.rows || pinned_map.cols != background.cols {
        return Err(Error::Analysis("screening maps have different shapes".into()));
    }
    let origin = pinned_map
        .pinned
        .ok_or_else(|| Error::Analysis("pinned map does not mark a pinned vertex".into()))?;
    let norm = background
        .mean_frequency()
        .filter(|&m| m > 0.0)
        .ok_or_else(|| Error::Analysis("background map is all zero; normalization undefined".into()))?;
    let cols = pinned_map.cols;
    let (or, oc) = (origin / cols, origin % cols);
    let mut samples = Vec::new();
    for v in 0..pinned_map.frequency.len() {
        if v == origin || background.pinned == Some(v) {
            continue;
        }
        if let (Some(d), Some(c)) = (pinned_map.frequency[v], background.frequency[v]) {
            let dr = (v / cols).abs_diff(or) as u64;
            let dc = (v % cols).abs_diff(oc) as u64;
            samples.push((dr * dr + dc * dc, dr + dc, (d - c) / norm));
        }
    }
    let bins = bin(samples.iter().map(|&(d2, _, v)| (d2, v)));
    let even = bin(samples.iter().filter(|s| s.1 % 2 == 0).map(|&(d2, _, v)| (d2, v)));
    let odd = bin(samples.iter().filter(|s| s.1 % 2 == 1).map(|&(d2, _, v)| (d2, v)));
    let fit = if bins.len() >= 2 && bins.iter().any(|b| b.mean != 0.0) {
        let x: Vec<f64> = bins.iter().map(|b| b.distance).collect();
        let y: Vec<f64> = bins.iter().map(|b| b.mean).collect();
        Some(fit_k0(&x, &y, None)?)
    } else {
        None
    };
    Ok(ScreeningProfile { origin: (or, oc), bins, fit, even, odd })
}
