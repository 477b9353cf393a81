use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::embed::{CouplerKind, Embedding, CHAIN_COUPLING, COUPLER_RANGE};
use crate::error::Result;
use crate::sampler::{lattice_bonds, BondKind};

/// Everything wrong with an embedding; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub problems: Vec<String>,
    pub chains: usize,
    pub vacancies: usize,
    pub couplers: usize,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Checks chain length and connectivity, defect avoidance, coupler ranges,
/// the two-coupler gadget per logical bond, and that vacancies match the
/// stored lattice.
pub fn validate_embedding(e: &Embedding) -> Result<ValidityReport> {
    let g = e.graph()?;
    let lattice = e.logical_lattice()?;
    let mut problems = Vec::new();
    let mut report = |p: String| {
        if problems.len() < 100 {
            problems.push(p);
        }
    };

    if e.chains.len() != lattice.num_sites() {
        report(format!("{} chains for {} sites", e.chains.len(), lattice.num_sites()));
    }
    let mut owner = BTreeMap::new();
    for (s, chain) in e.chains.iter().enumerate() {
        match (chain, lattice.is_vacant(s)) {
            (None, false) => report(format!("site {s} has no chain but is not vacant")),
            (Some(_), true) => report(format!("vacant site {s} has a chain")),
            _ => {}
        }
        let Some(q) = chain else { continue };
        let distinct: BTreeSet<_> = q.iter().collect();
        if distinct.len() != 4 {
            report(format!("chain {s} does not have four distinct qubits"));
        }
        for &x in q {
            if !g.qubit_ok(x) {
                report(format!("chain {s} uses defective qubit {x}"));
            }
            if let Some(o) = owner.insert(x, s) {
                report(format!("qubit {x} shared by chains {o} and {s}"));
            }
        }
    }

    let (lo, hi) = COUPLER_RANGE;
    let mut fm: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    let mut per_bond: BTreeMap<usize, usize> = BTreeMap::new();
    let bonds = lattice_bonds(&lattice);
    let mut seen = BTreeSet::new();
    for c in &e.couplers {
        let key = (c.a.min(c.b), c.a.max(c.b));
        if !seen.insert(key) {
            report(format!("coupler ({}, {}) programmed twice", c.a, c.b));
        }
        if !g.coupler_ok(c.a, c.b) {
            report(format!("coupler ({}, {}) is not operational", c.a, c.b));
        }
        if !(lo..=hi).contains(&c.value) || !c.value.is_finite() {
            report(format!("coupler ({}, {}) value {} outside [{lo}, {hi}]", c.a, c.b, c.value));
        }
        let (sa, sb) = (owner.get(&c.a).copied(), owner.get(&c.b).copied());
        match c.kind {
            CouplerKind::Fm => {
                if c.value != CHAIN_COUPLING {
                    report(format!("chain coupler ({}, {}) is {} not {CHAIN_COUPLING}", c.a, c.b, c.value));
                }
                match (sa, sb) {
                    (Some(x), Some(y)) if x == y => fm.entry(x).or_default().push((c.a, c.b)),
                    _ => report(format!("chain coupler ({}, {}) spans two chains", c.a, c.b)),
                }
            }
            CouplerKind::Par | CouplerKind::Perp => {
                let Some(b) = c.bond.and_then(|b| bonds.get(b).map(|bond| (b, bond))) else {
                    report(format!("AFM coupler ({}, {}) has no logical bond", c.a, c.b));
                    continue;
                };
                let (k, bond) = b;
                let want = match bond.kind {
                    BondKind::Par => CouplerKind::Par,
                    BondKind::Perp => CouplerKind::Perp,
                };
                if want != c.kind {
                    report(format!("coupler ({}, {}) kind does not match bond {k}", c.a, c.b));
                }
                let ends: BTreeSet<_> = [sa, sb].into_iter().flatten().collect();
                let logical: BTreeSet<_> = [bond.a, bond.b].into_iter().collect();
                if ends != logical {
                    report(format!("coupler ({}, {}) does not join the chains of bond {k}", c.a, c.b));
                }
                *per_bond.entry(k).or_default() += 1;
            }
        }
    }
    for (s, chain) in e.chains.iter().enumerate() {
        let Some(q) = chain else { continue };
        let edges = fm.get(&s).cloned().unwrap_or_default();
        if edges.len() != 3 || !connected(q, &edges) {
            report(format!("chain {s} is not a connected four-qubit path"));
        }
    }
    for k in 0..bonds.len() {
        let n = per_bond.get(&k).copied().unwrap_or(0);
        if n != 2 {
            report(format!("bond {k} realized by {n} couplers instead of 2"));
        }
    }
    if let Some(&k) = per_bond.keys().find(|&&k| k >= bonds.len()) {
        report(format!("couplers refer to missing bond {k}"));
    }

    Ok(ValidityReport {
        chains: e.chains.iter().flatten().count(),
        vacancies: e.chains.iter().filter(|c| c.is_none()).count(),
        couplers: e.couplers.len(),
        problems,
    })
}

fn connected(q: &[usize; 4], edges: &[(usize, usize)]) -> bool {
    let mut reached = BTreeSet::from([q[0]]);
    loop {
        let before = reached.len();
        for &(a, b) in edges {
            if reached.contains(&a) || reached.contains(&b) {
                reached.insert(a);
                reached.insert(b);
            }
        }
        if reached.len() == before {
            break;
        }
    }
    q.iter().all(|x| reached.contains(x)) && reached.len() == 4
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{embed_ice, ChimeraGraph};
    use crate::ice::CouplingSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_embedding_is_valid_and_tampering_is_caught() {
        let g = ChimeraGraph::ideal(5, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (mut e, _) = embed_ice(&g, &mut rng).unwrap();
        e.program(&CouplingSpec::degenerate(1.0));
        assert!(validate_embedding(&e).unwrap().is_valid());

        let mut bad = e.clone();
        bad.couplers.iter_mut().find(|c| c.kind != CouplerKind::Fm).unwrap().value = 1.5;
        assert!(!validate_embedding(&bad).unwrap().is_valid());

        let mut bad = e.clone();
        let k = bad.couplers.iter().position(|c| c.kind != CouplerKind::Fm).unwrap();
        bad.couplers.remove(k);
        assert!(!validate_embedding(&bad).unwrap().is_valid());

        let mut bad = e;
        bad.chains[0].as_mut().unwrap()[0] = bad.chains[1].unwrap()[0];
        assert!(!validate_embedding(&bad).unwrap().is_valid());
    }
}
