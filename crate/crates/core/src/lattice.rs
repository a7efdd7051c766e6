//! Rank <= 2 lattice geometry and finite integer matrix groups.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::series::{rat, Polynomial, Rational, RationalSeries};

pub const DEFAULT_CLOSURE_BOUND: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(Vec<Rational>);

impl LatticeVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        Self(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Self(coords.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero(rank: usize) -> Self {
        Self(vec![Rational::zero(); rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &Self) -> Result<Rational> {
        if self.rank() != other.rank() {
            return Err(Error::RankMismatch { expected: self.rank(), found: other.rank() });
        }
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn norm2(&self) -> Rational {
        self.0.iter().map(|a| a * a).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self(self.0.iter().map(|a| a * c).collect())
    }

    /// `Some(λ)` with `self = λ·other`, for nonzero `other`.
    pub fn ratio_to(&self, other: &Self) -> Option<Rational> {
        let pivot = other.0.iter().position(|c| !c.is_zero())?;
        let lambda = &self.0[pivot] / &other.0[pivot];
        (other.scale(&lambda) == *self).then_some(lambda)
    }

    /// Scale to a primitive integer vector whose first nonzero entry is positive.
    pub fn primitive(&self) -> Self {
        let lcm = self.0.iter().fold(num_bigint::BigInt::from(1), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<_> = self.0.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(num_bigint::BigInt::from(0), |acc, c| acc.gcd(c));
        if g.is_zero() {
            return self.clone();
        }
        let sign = ints.iter().find(|c| !c.is_zero()).map_or(1, |c| if c.is_negative() { -1 } else { 1 });
        let g = g * sign;
        Self(ints.into_iter().map(|c| Rational::from_integer(c / &g)).collect())
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// Square integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn new(dim: usize, entries: Vec<i64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::BadMatrix(format!("{} entries for a {dim}x{dim} matrix", entries.len())));
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::BadMatrix(format!("{rows:?} is not square")));
        }
        Self::new(dim, rows.concat())
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        Self { dim, entries }
    }

    pub fn diag(d: &[i64]) -> Self {
        let mut m = Self::identity(d.len());
        for (i, &x) in d.iter().enumerate() {
            m.entries[i * d.len() + i] = x;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.dim.max(1)).take(self.dim).map(<[i64]>::to_vec).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    pub fn apply(&self, v: &LatticeVector) -> LatticeVector {
        debug_assert_eq!(v.rank(), self.dim);
        LatticeVector(
            (0..self.dim)
                .map(|i| (0..self.dim).map(|j| rat(self.entry(i, j)) * &v.0[j]).sum())
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut entries = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = (0..n).map(|k| self.entry(i, k) * other.entry(k, j)).sum();
            }
        }
        Self { dim: n, entries }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        Self { dim: n, entries: (0..n * n).map(|x| self.entry(x % n, x / n)).collect() }
    }

    pub fn det(&self) -> i64 {
        let x = self.char_matrix_det();
        // det(I - xM) has x^n coefficient (-1)^n det M.
        let top = x.coefficient(self.dim as u32).to_integer();
        let top: i64 = top.try_into().unwrap_or(0);
        if self.dim.is_multiple_of(2) { top } else { -top }
    }

    pub fn is_orthogonal(&self) -> bool {
        self.transpose().mul(self).is_identity()
    }

    /// `det(I - xM)` as a polynomial in `x`, by cofactor expansion.
    pub fn char_matrix_det(&self) -> Polynomial {
        let n = self.dim;
        let cells: Vec<Polynomial> = (0..n * n)
            .map(|x| {
                let (i, j) = (x / n, x % n);
                let mut p = Polynomial::from_terms([(1, -self.entry(i, j))]);
                if i == j {
                    p.add_term(0, rat(1));
                }
                p
            })
            .collect();
        let cols: Vec<usize> = (0..n).collect();
        cofactor_det(&cells, n, 0, &cols)
    }
}

fn cofactor_det(cells: &[Polynomial], n: usize, row: usize, cols: &[usize]) -> Polynomial {
    if cols.is_empty() {
        return Polynomial::one();
    }
    let mut acc = Polynomial::zero();
    for (pos, &c) in cols.iter().enumerate() {
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = &cells[row * n + c] * &cofactor_det(cells, n, row + 1, &rest);
        if pos % 2 == 0 {
            acc += &term;
        } else {
            acc -= &term;
        }
    }
    acc
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, row) in self.rows().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{row:?}")?;
        }
        f.write_str("]")
    }
}

/// A finite group of integer matrices, stored as its sorted element list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteMatrixGroup {
    dim: usize,
    elements: Vec<IntMatrix>,
}

impl FiniteMatrixGroup {
    pub fn trivial(dim: usize) -> Self {
        Self { dim, elements: vec![IntMatrix::identity(dim)] }
    }

    pub fn generate(dim: usize, generators: &[IntMatrix]) -> Result<Self> {
        Self::generate_bounded(dim, generators, DEFAULT_CLOSURE_BOUND)
    }

    pub fn generate_bounded(dim: usize, generators: &[IntMatrix], bound: usize) -> Result<Self> {
        for g in generators {
            if g.dim() != dim {
                return Err(Error::RankMismatch { expected: dim, found: g.dim() });
            }
            if g.det().abs() != 1 {
                return Err(Error::NotInvertible(g.to_string()));
            }
        }
        let mut seen: BTreeSet<IntMatrix> = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(IntMatrix::identity(dim));
        queue.push_back(IntMatrix::identity(dim));
        while let Some(m) = queue.pop_front() {
            for g in generators {
                let next = m.mul(g);
                if seen.insert(next.clone()) {
                    if seen.len() > bound {
                        return Err(Error::NotClosed { bound });
                    }
                    queue.push_back(next);
                }
            }
        }
        Ok(Self { dim, elements: seen.into_iter().collect() })
    }

    /// Subset of a group already known to be closed, e.g. a stabilizer.
    fn filtered(&self, keep: impl Fn(&IntMatrix) -> bool) -> Self {
        Self { dim: self.dim, elements: self.elements.iter().filter(|m| keep(m)).cloned().collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[IntMatrix] {
        &self.elements
    }

    pub fn contains(&self, m: &IntMatrix) -> bool {
        self.elements.binary_search(m).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Self) -> bool {
        self.elements.iter().all(|m| other.contains(m))
    }

    pub fn is_closed(&self) -> bool {
        self.contains(&IntMatrix::identity(self.dim))
            && self.elements.iter().all(|a| self.elements.iter().all(|b| self.contains(&a.mul(b))))
    }

    /// Least common multiple of the element orders.
    pub fn exponent(&self) -> u32 {
        self.elements.iter().fold(1u32, |acc, m| {
            let mut p = m.clone();
            let mut k = 1u32;
            while !p.is_identity() {
                p = p.mul(m);
                k += 1;
            }
            acc.lcm(&k)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupSpec {
    pub torus_rank: usize,
    pub finite: FiniteMatrixGroup,
}

impl GroupSpec {
    pub fn new(torus_rank: usize, finite: FiniteMatrixGroup) -> Result<Self> {
        if finite.dim() != torus_rank {
            return Err(Error::RankMismatch { expected: torus_rank, found: finite.dim() });
        }
        Ok(Self { torus_rank, finite })
    }

    pub fn torus(rank: usize) -> Self {
        Self { torus_rank: rank, finite: FiniteMatrixGroup::trivial(rank) }
    }

    pub fn with_finite(&self, finite: FiniteMatrixGroup) -> Self {
        Self { torus_rank: self.torus_rank, finite }
    }
}

/// Nearest point of the convex hull to the origin; `None` for an empty set.
pub fn closest_point_to_origin(points: &[LatticeVector]) -> Option<LatticeVector> {
    let first = points.first()?;
    if origin_in_triangle_hull(points) {
        return Some(LatticeVector::zero(first.rank()));
    }
    let mut best = first.clone();
    let mut consider = |c: LatticeVector| {
        if c.norm2() < best.norm2() {
            best = c;
        }
    };
    for p in points {
        consider(p.clone());
    }
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            let d = q.sub(p);
            let dd = d.norm2();
            if dd.is_zero() {
                continue;
            }
            let s = -p.dot(&d).ok()? / dd;
            let s = s.clamp(Rational::zero(), rat(1));
            consider(p.add(&d.scale(&s)));
        }
    }
    Some(best)
}

// An interior origin is invisible to vertices and edges, so rank 2 needs a
// triangle test as well.
fn origin_in_triangle_hull(points: &[LatticeVector]) -> bool {
    if points.first().is_none_or(|p| p.rank() != 2) {
        return false;
    }
    let cross = |a: &LatticeVector, b: &LatticeVector| &a.0[0] * &b.0[1] - &a.0[1] * &b.0[0];
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (&points[i], &points[j], &points[k]);
                let s = [cross(a, b), cross(b, c), cross(c, a)];
                if s.iter().all(Zero::is_zero) {
                    continue;
                }
                if s.iter().all(|x| !x.is_negative()) || s.iter().all(|x| !x.is_positive()) {
                    return true;
                }
            }
        }
    }
    false
}

pub fn orbit(v: &LatticeVector, group: &FiniteMatrixGroup) -> Vec<LatticeVector> {
    let set: BTreeSet<LatticeVector> = group.elements().iter().map(|m| m.apply(v)).collect();
    set.into_iter().collect()
}

pub fn canonical_orbit_representative(v: &LatticeVector, group: &FiniteMatrixGroup) -> LatticeVector {
    group.elements().iter().map(|m| m.apply(v)).max().unwrap_or_else(|| v.clone())
}

pub fn stabilizer_of_vector(spec: &GroupSpec, v: &LatticeVector) -> GroupSpec {
    spec.with_finite(spec.finite.filtered(|m| m.apply(v) == *v))
}

/// Elements mapping the line through `direction` to itself.
pub fn line_normalizer(spec: &GroupSpec, direction: &LatticeVector) -> GroupSpec {
    spec.with_finite(spec.finite.filtered(|m| m.apply(direction).ratio_to(direction).is_some()))
}

/// Hilbert series of the invariants of the finite part acting on a polynomial
/// ring with `torus_rank` generators in degree 2.
pub fn molien_series(spec: &GroupSpec) -> RationalSeries {
    let r = spec.torus_rank;
    if r == 0 {
        return RationalSeries::one();
    }
    let e = spec.finite.exponent();
    let full = (0..r).fold(Polynomial::one(), |acc, _| &acc * &Polynomial::from_terms([(0, 1), (e, -1)]));
    let mut sum = Polynomial::zero();
    for m in spec.finite.elements() {
        let q = full
            .div_exact(&m.char_matrix_det())
            .expect("det(I - xM) divides (1 - x^e)^r for a finite-order M");
        sum += &q;
    }
    let sum = sum.scale(&Rational::new(1.into(), spec.finite.order().into()));
    RationalSeries::new(sum.substitute_power(2), vec![2 * e; r])
        .expect("exponent is positive")
        .reduced()
}
