use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::lattice::{FiniteMatrixGroup, GroupSpec, IntMatrix, LatticeVector};
use crate::series::{Polynomial, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    pub vector: LatticeVector,
    pub multiplicity: u32,
    pub label: String,
}

impl Weight {
    pub fn new(vector: LatticeVector, multiplicity: u32, label: impl Into<String>) -> Self {
        Self { vector, multiplicity, label: label.into() }
    }
}

/// Multiset of weights, kept sorted so that equal diagrams compare equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightDiagram {
    weights: Vec<Weight>,
}

impl WeightDiagram {
    pub fn new(mut weights: Vec<Weight>) -> Self {
        weights.sort();
        Self { weights }
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn rank(&self) -> Option<usize> {
        self.weights.first().map(|w| w.vector.rank())
    }

    pub fn total_multiplicity(&self) -> u32 {
        self.weights.iter().map(|w| w.multiplicity).sum()
    }

    /// Multiplicity per distinct vector.
    pub fn aggregated(&self) -> BTreeMap<LatticeVector, u32> {
        let mut out = BTreeMap::new();
        for w in &self.weights {
            *out.entry(w.vector.clone()).or_insert(0) += w.multiplicity;
        }
        out
    }

    pub fn distinct_vectors(&self) -> Vec<LatticeVector> {
        self.aggregated().into_keys().collect()
    }

    pub fn filter(&self, keep: impl Fn(&Weight) -> bool) -> Self {
        Self::new(self.weights.iter().filter(|w| keep(w)).cloned().collect())
    }

    pub fn map_vectors(&self, f: impl Fn(&LatticeVector) -> LatticeVector) -> Self {
        Self::new(
            self.weights
                .iter()
                .map(|w| Weight::new(f(&w.vector), w.multiplicity, w.label.clone()))
                .collect(),
        )
    }

    pub fn is_invariant_under(&self, m: &IntMatrix) -> bool {
        let agg = self.aggregated();
        agg.iter().all(|(v, n)| agg.get(&m.apply(v)) == Some(n))
    }

    /// Dimension of the rational span of the weight vectors.
    pub fn span_dimension(&self) -> usize {
        span_dimension(&self.distinct_vectors())
    }
}

pub fn span_dimension(vectors: &[LatticeVector]) -> usize {
    let mut rows: Vec<Vec<Rational>> = vectors.iter().map(|v| v.coords().to_vec()).collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !num_traits::Zero::is_zero(&rows[r][c])) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for r in 0..rows.len() {
            if r != rank {
                let f = &rows[r][c] / &pivot[c];
                for k in 0..cols {
                    let d = &f * &pivot[k];
                    rows[r][k] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Connected stabilizer of a polystable locus: the whole torus or a
/// one-parameter subgroup with the given Lie-algebra direction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subtorus {
    Full,
    Line(LatticeVector),
}

impl fmt::Display for Subtorus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subtorus::Full => f.write_str("full"),
            Subtorus::Line(u) => write!(f, "line{u}"),
        }
    }
}

/// Asserted Poincaré polynomial of a center quotient, used when the
/// computed value fails validation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CenterOverride {
    pub subtorus: Subtorus,
    pub polynomial: Polynomial,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scenario {
    pub diagram: WeightDiagram,
    pub group: GroupSpec,
    pub overrides: Vec<CenterOverride>,
    pub truncation_order: Option<u32>,
}

impl Scenario {
    pub fn new(diagram: WeightDiagram, group: GroupSpec) -> Result<Self> {
        if diagram.is_empty() {
            return Err(Error::EmptyDiagram);
        }
        for w in diagram.weights() {
            if w.multiplicity == 0 {
                return Err(Error::ZeroMultiplicity(w.vector.to_string()));
            }
            if w.vector.rank() != group.torus_rank {
                return Err(Error::RankMismatch { expected: group.torus_rank, found: w.vector.rank() });
            }
        }
        for m in group.finite.elements() {
            if !m.is_orthogonal() {
                return Err(Error::InnerProductNotInvariant(m.to_string()));
            }
            if !diagram.is_invariant_under(m) {
                return Err(Error::NotInvariant(m.to_string()));
            }
        }
        Ok(Self { diagram, group, overrides: Vec::new(), truncation_order: None })
    }

    pub fn with_overrides(mut self, overrides: Vec<CenterOverride>) -> Self {
        self.overrides = overrides;
        self
    }

    pub fn with_truncation_order(mut self, order: Option<u32>) -> Self {
        self.truncation_order = order;
        self
    }

    pub fn rank(&self) -> usize {
        self.group.torus_rank
    }

    pub fn projective_dimension(&self) -> u32 {
        self.diagram.total_multiplicity() - 1
    }

    /// Complex dimension of the quotient, assuming generic stabilizers are
    /// finite modulo the subtorus acting trivially.
    pub fn quotient_dimension(&self) -> i64 {
        self.projective_dimension() as i64 - self.diagram.span_dimension() as i64
    }

    /// Exclusive bound for printed truncations.
    pub fn truncation(&self) -> u32 {
        self.truncation_order.unwrap_or(DEFAULT_TRUNCATION)
    }

    /// Override for a locus, matched up to the finite group action.
    pub fn override_for(&self, subtorus: &Subtorus) -> Option<&Polynomial> {
        self.overrides
            .iter()
            .find(|o| match (&o.subtorus, subtorus) {
                (Subtorus::Full, Subtorus::Full) => true,
                (Subtorus::Line(a), Subtorus::Line(b)) => self
                    .group
                    .finite
                    .elements()
                    .iter()
                    .any(|m| m.apply(a).ratio_to(b).is_some()),
                _ => false,
            })
            .map(|o| &o.polynomial)
    }
}

fn monomial_label(i: u32, j: u32) -> String {
    let mut s = String::new();
    for (var, e) in [("x0", i), ("x1", 4 - i), ("y0", j), ("y1", 4 - j)] {
        match e {
            0 => {}
            1 => s.push_str(var),
            _ => s.push_str(&format!("{var}^{e}")),
        }
    }
    s
}

pub fn dihedral_group() -> FiniteMatrixGroup {
    FiniteMatrixGroup::generate(
        2,
        &[
            IntMatrix::diag(&[-1, 1]),
            IntMatrix::diag(&[1, -1]),
            IntMatrix::new(2, vec![0, 1, 1, 0]).expect("2x2"),
        ],
    )
    .expect("the symmetries of the square form a group of order 8")
}

/// `ι`-invariant bidegree (4,4) forms on `P^1 x P^1` under `(C*)^2 ⋊ D_8`:
/// the monomial `x0^i x1^(4-i) y0^j y1^(4-j)` with `i + j` even has weight
/// `(4 - 2i, 4 - 2j)`.
pub fn enriques_scenario() -> Scenario {
    let mut weights = Vec::new();
    for i in 0..=4u32 {
        for j in 0..=4u32 {
            if (i + j) % 2 == 0 {
                let v = LatticeVector::from_ints(&[4 - 2 * i as i64, 4 - 2 * j as i64]);
                weights.push(Weight::new(v, 1, monomial_label(i, j)));
            }
        }
    }
    let group = GroupSpec::new(2, dihedral_group()).expect("rank 2");
    let r2 = CenterOverride {
        subtorus: Subtorus::Line(LatticeVector::from_ints(&[0, 1])),
        polynomial: Polynomial::from_terms([(0, 1), (2, 1)]),
    };
    Scenario::new(WeightDiagram::new(weights), group)
        .expect("the built-in diagram is invariant")
        .with_overrides(vec![r2])
}

pub const DEFAULT_TRUNCATION: u32 = 11;

pub const BUILTIN_NAMES: &[&str] = &["enriques44"];

pub fn builtin(name: &str) -> Option<Scenario> {
    match name {
        "enriques44" => Some(enriques_scenario()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enriques_weights() {
        let s = enriques_scenario();
        assert_eq!(s.diagram.total_multiplicity(), 13);
        assert_eq!(s.projective_dimension(), 12);
        assert_eq!(s.quotient_dimension(), 10);
        let find = |label: &str| s.diagram.weights().iter().find(|w| w.label == label).unwrap().vector.clone();
        assert_eq!(find("x0^2x1^2y0^2y1^2"), LatticeVector::from_ints(&[0, 0]));
        assert_eq!(find("x0^4y1^4"), LatticeVector::from_ints(&[-4, 4]));
        assert_eq!(find("x1^4y0^4"), LatticeVector::from_ints(&[4, -4]));
        assert_eq!(find("x0x1^3y0^3y1"), LatticeVector::from_ints(&[2, -2]));
        assert_eq!(s.group.finite.order(), 8);
        assert_eq!(s.truncation(), 11);
    }

    #[test]
    fn validation() {
        let v = |x: i64| LatticeVector::from_ints(&[x]);
        let d = WeightDiagram::new(vec![Weight::new(v(1), 2, "a"), Weight::new(v(-1), 1, "b")]);
        let flip = FiniteMatrixGroup::generate(1, &[IntMatrix::diag(&[-1])]).unwrap();
        let g = GroupSpec::new(1, flip).unwrap();
        assert!(matches!(Scenario::new(d, g.clone()), Err(Error::NotInvariant(_))));
        assert_eq!(Scenario::new(WeightDiagram::default(), g.clone()), Err(Error::EmptyDiagram));
        let d = WeightDiagram::new(vec![Weight::new(v(0), 0, "a")]);
        assert!(matches!(Scenario::new(d, g), Err(Error::ZeroMultiplicity(_))));
    }

    #[test]
    fn non_orthogonal_symmetry_is_rejected() {
        let d = WeightDiagram::new(
            [[1, 0], [0, 1], [-1, -1]]
                .iter()
                .map(|c| Weight::new(LatticeVector::from_ints(c), 1, ""))
                .collect(),
        );
        let rot = IntMatrix::new(2, vec![0, -1, 1, -1]).unwrap();
        let g = GroupSpec::new(2, FiniteMatrixGroup::generate(2, &[rot]).unwrap()).unwrap();
        assert!(matches!(Scenario::new(d, g), Err(Error::InnerProductNotInvariant(_))));
    }

    #[test]
    fn overrides_match_up_to_symmetry() {
        let s = enriques_scenario();
        let line = |c: &[i64]| Subtorus::Line(LatticeVector::from_ints(c));
        assert!(s.override_for(&line(&[1, 0])).is_some());
        assert!(s.override_for(&line(&[0, 1])).is_some());
        assert!(s.override_for(&line(&[1, 1])).is_none());
        assert!(s.override_for(&Subtorus::Full).is_none());
    }

    #[test]
    fn spans() {
        let v = |c: &[i64]| LatticeVector::from_ints(c);
        assert_eq!(span_dimension(&[v(&[0, 0])]), 0);
        assert_eq!(span_dimension(&[v(&[2, -2]), v(&[-4, 4])]), 1);
        assert_eq!(span_dimension(&[v(&[2, -2]), v(&[0, 4])]), 2);
    }
}
