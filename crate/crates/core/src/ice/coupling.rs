use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longitudinal fields keyed by site id. Unlisted sites carry `h = 0`.
pub type FieldMap = BTreeMap<usize, f64>;

/// Antiferromagnetic vertex couplings. Energies are in units of the maximum
/// coupling `J_MAX`, so `scale` is `J / J_MAX`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub j_par: f64,
    pub j_perp: f64,
    pub scale: f64,
    #[serde(default)]
    pub fields: FieldMap,
}

impl CouplingSpec {
    pub fn new(j_par: f64, j_perp: f64, scale: f64) -> Self {
        CouplingSpec { j_par, j_perp, scale, fields: FieldMap::new() }
    }

    /// `J_perp = J_par = 1` at overall strength `scale`.
    pub fn degenerate(scale: f64) -> Self {
        Self::new(1.0, 1.0, scale)
    }

    /// `J_perp / J_par = ratio` with `J_par = 1`.
    pub fn with_ratio(ratio: f64, scale: f64) -> Self {
        Self::new(1.0, ratio, scale)
    }

    /// Effective collinear coupling.
    #[inline]
    pub fn par(&self) -> f64 {
        self.scale * self.j_par
    }

    /// Effective perpendicular coupling.
    #[inline]
    pub fn perp(&self) -> f64 {
        self.scale * self.j_perp
    }

    /// Mean of the two effective couplings.
    pub fn energy_scale(&self) -> f64 {
        0.5 * (self.par() + self.perp())
    }

    #[inline]
    pub fn field(&self, site: usize) -> f64 {
        self.fields.get(&site).copied().unwrap_or(0.0)
    }

    pub fn with_fields(mut self, fields: FieldMap) -> Self {
        self.fields = fields;
        self
    }

    pub fn validate(&self, num_sites: usize) -> Result<()> {
        if !(self.j_par > 0.0 && self.j_perp > 0.0) {
            return Err(Error::Config(format!(
                "couplings must be antiferromagnetic, got J_par={} J_perp={}",
                self.j_par, self.j_perp
            )));
        }
        if !(self.scale >= 0.0 && self.scale.is_finite()) {
            return Err(Error::Config(format!("coupling scale {} out of range", self.scale)));
        }
        if let Some((&s, _)) = self.fields.iter().find(|(&s, h)| s >= num_sites || !h.is_finite()) {
            return Err(Error::Config(format!("field on site {s} is out of range")));
        }
        Ok(())
    }
}
