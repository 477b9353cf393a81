use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use super::embed::{CouplerKind, Embedding};
use crate::error::{Error, Result};
use crate::sampler::BondKind;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spread {
    #[default]
    Gaussian,
    /// Uniform on `[-scale, scale]`.
    Uniform,
}

/// Synthetic control errors. Coupler noise is relative, field noise is in
/// coupler units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisorderModel {
    #[serde(default = "default_coupler")]
    pub coupler: f64,
    #[serde(default)]
    pub field: f64,
    /// Relative shift applied to every perpendicular gadget.
    #[serde(default)]
    pub perp_lift: f64,
    #[serde(default)]
    pub spread: Spread,
}

fn default_coupler() -> f64 {
    0.02
}

impl Default for DisorderModel {
    fn default() -> Self {
        DisorderModel { coupler: default_coupler(), field: 0.0, perp_lift: 0.0, spread: Spread::Gaussian }
    }
}

/// One draw of the disorder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisorderRealization {
    /// Multiplier per coupler (or per bond).
    pub coupler: Vec<f64>,
    /// Additive field per qubit (or per site).
    pub field: Vec<f64>,
}

impl DisorderModel {
    pub fn none() -> Self {
        DisorderModel { coupler: 0.0, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.coupler >= 0.0 && self.field >= 0.0) || !self.perp_lift.is_finite() {
            return Err(Error::Config("disorder scales must be non-negative".into()));
        }
        Ok(())
    }

    fn draw<R: Rng + ?Sized>(&self, scale: f64, rng: &mut R) -> f64 {
        if scale == 0.0 {
            return 0.0;
        }
        match self.spread {
            Spread::Gaussian => Normal::new(0.0, scale).expect("finite scale").sample(rng),
            Spread::Uniform => Uniform::new_inclusive(-scale, scale).expect("finite scale").sample(rng),
        }
    }

    /// Disorder on every coupler and qubit of an embedding. Chain couplers
    /// are left exact.
    pub fn realize<R: Rng + ?Sized>(&self, e: &Embedding, num_qubits: usize, rng: &mut R) -> Result<DisorderRealization> {
        self.validate()?;
        let coupler = e
            .couplers
            .iter()
            .map(|c| match c.kind {
                CouplerKind::Fm => 1.0,
                CouplerKind::Par => 1.0 + self.draw(self.coupler, rng),
                CouplerKind::Perp => (1.0 + self.perp_lift) * (1.0 + self.draw(self.coupler, rng)),
            })
            .collect();
        let field = (0..num_qubits).map(|_| self.draw(self.field, rng)).collect();
        Ok(DisorderRealization { coupler, field })
    }

    /// Disorder directly on logical bonds and sites.
    pub fn realize_bonds<R: Rng + ?Sized>(
        &self,
        kinds: &[BondKind],
        num_sites: usize,
        rng: &mut R,
    ) -> Result<DisorderRealization> {
        self.validate()?;
        let coupler = kinds
            .iter()
            .map(|k| {
                let lift = if *k == BondKind::Perp { 1.0 + self.perp_lift } else { 1.0 };
                lift * (1.0 + self.draw(self.coupler, rng))
            })
            .collect();
        let field = (0..num_sites).map(|_| self.draw(self.field, rng)).collect();
        Ok(DisorderRealization { coupler, field })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_disorder_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let d = DisorderModel::none().realize_bonds(&[BondKind::Par, BondKind::Perp], 3, &mut rng).unwrap();
        assert_eq!(d.coupler, vec![1.0, 1.0]);
        assert_eq!(d.field, vec![0.0; 3]);
    }

    #[test]
    fn uniform_stays_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = DisorderModel { coupler: 0.03, spread: Spread::Uniform, ..Default::default() };
        let d = m.realize_bonds(&vec![BondKind::Par; 1000], 0, &mut rng).unwrap();
        assert!(d.coupler.iter().all(|&x| (0.97..=1.03).contains(&x)));
    }

    #[test]
    fn negative_scale_rejected() {
        assert!(DisorderModel { coupler: -0.1, ..Default::default() }.validate().is_err());
    }
}
