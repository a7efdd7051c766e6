//! Instability indices and the equivariantly perfect stratification.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::blowup::enumerate_polystable_loci;
use crate::lattice::{
    canonical_orbit_representative, closest_point_to_origin, molien_series, orbit, stabilizer_of_vector,
    GroupSpec, LatticeVector,
};
use crate::scenario::{Scenario, WeightDiagram};
use crate::series::{projective_space, Rational, RationalSeries};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaDatum {
    pub beta: LatticeVector,
    pub z_weights: WeightDiagram,
    pub n_beta: u32,
    pub codim: u32,
    pub stabilizer: GroupSpec,
    pub orbit_size: usize,
}

impl BetaDatum {
    pub fn norm2(&self) -> Rational {
        self.beta.norm2()
    }
}

/// Every distinct nonzero index, before grouping into orbits.
pub fn all_betas(diagram: &WeightDiagram) -> Vec<LatticeVector> {
    let vs = diagram.distinct_vectors();
    let mut out = alloc::collections::BTreeSet::new();
    for (i, a) in vs.iter().enumerate() {
        out.insert(a.clone());
        for b in &vs[i + 1..] {
            out.insert(closest_point_to_origin(&[a.clone(), b.clone()]).expect("nonempty"));
        }
    }
    out.into_iter().filter(|b| !b.is_zero()).collect()
}

/// Data of the index `beta` computed against the whole diagram.
pub fn beta_datum(s: &Scenario, beta: &LatticeVector) -> BetaDatum {
    let b2 = beta.norm2();
    let pairing = |v: &LatticeVector| v.dot(beta).expect("ranks agree");
    let z_weights = s.diagram.filter(|w| pairing(&w.vector) == b2);
    let n_beta = s
        .diagram
        .weights()
        .iter()
        .filter(|w| pairing(&w.vector) < b2)
        .map(|w| w.multiplicity)
        .sum();
    BetaDatum {
        beta: beta.clone(),
        z_weights,
        n_beta,
        codim: n_beta,
        stabilizer: stabilizer_of_vector(&s.group, beta),
        orbit_size: orbit(beta, &s.group.finite).len(),
    }
}

/// One datum per orbit, sorted by `|β|²` then by representative.
pub fn enumerate_beta(s: &Scenario) -> Vec<BetaDatum> {
    let mut reps: BTreeMap<LatticeVector, ()> = BTreeMap::new();
    for b in all_betas(&s.diagram) {
        reps.insert(canonical_orbit_representative(&b, &s.group.finite), ());
    }
    let mut out: Vec<BetaDatum> = reps.keys().map(|b| beta_datum(s, b)).collect();
    out.sort_by(|a, b| a.norm2().cmp(&b.norm2()).then_with(|| a.beta.cmp(&b.beta)));
    out
}

/// `Z_β` shifted by `-β`, acted on by the stabilizer of `β`.
pub fn slice_scenario(_s: &Scenario, b: &BetaDatum) -> Scenario {
    let diagram = b.z_weights.map_vectors(|v| v.sub(&b.beta));
    Scenario::new(diagram, b.stabilizer.clone()).expect("the stabilizer permutes Z_beta")
}

pub fn ambient_series(s: &Scenario) -> RationalSeries {
    molien_series(&s.group).mul_polynomial(&projective_space(s.projective_dimension()))
}

pub fn semistable_series(s: &Scenario) -> RationalSeries {
    let mut out = ambient_series(s);
    for b in enumerate_beta(s) {
        let slice = semistable_series(&slice_scenario(s, &b));
        out -= &slice.shift(2 * b.codim);
    }
    out
}

pub fn has_strictly_semistable(s: &Scenario) -> bool {
    !enumerate_polystable_loci(s).is_empty()
}
