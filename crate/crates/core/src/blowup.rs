//! Polystable loci and the correction terms of the staged Kirwan blow-up.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{line_normalizer, orbit, stabilizer_of_vector, GroupSpec, LatticeVector};
use crate::scenario::{Scenario, Subtorus, Weight, WeightDiagram};
use crate::series::{geometric_range, projective_space, rat, Polynomial, Rational, RationalSeries};
use crate::strata::{all_betas, beta_datum, semistable_series, slice_scenario};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolystableLocus {
    pub subtorus: Subtorus,
    pub subtorus_rank: usize,
    pub z_diagram: WeightDiagram,
    pub normalizer: GroupSpec,
    /// Vectors for the full torus, scalars `α·u` for a line `u`.
    pub normal_weights: WeightDiagram,
    pub normal_rank: u32,
    /// Number of conjugate loci folded into this one.
    pub orbit_size: usize,
}

impl PolystableLocus {
    /// Lie-algebra image of a slice index.
    pub fn embed(&self, beta: &LatticeVector) -> LatticeVector {
        match &self.subtorus {
            Subtorus::Full => beta.clone(),
            Subtorus::Line(u) => u.scale(&(&beta.coords()[0] / u.norm2())),
        }
    }

    pub fn z_dimension(&self) -> u32 {
        self.z_diagram.total_multiplicity() - 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeBetaDatum {
    pub beta_prime: LatticeVector,
    pub codim: u32,
    pub w: usize,
    pub slice_stabilizer: GroupSpec,
    /// Multiplicity of slice weights equal to `beta_prime`.
    pub fiber_multiplicity: u32,
    /// All slice weights on the supporting hyperplane equal `beta_prime`.
    pub fiber_closed: bool,
    pub fiber_series: Polynomial,
}

fn cross(a: &LatticeVector, b: &LatticeVector) -> Rational {
    let (a, b) = (a.coords(), b.coords());
    &a[0] * &b[1] - &a[1] * &b[0]
}

fn canonical_line(u: &LatticeVector, g: &GroupSpec) -> LatticeVector {
    g.finite
        .elements()
        .iter()
        .flat_map(|m| {
            let x = m.apply(u);
            let y = x.scale(&rat(-1));
            [x, y]
        })
        .max()
        .expect("the group has an identity")
}

fn line_locus(s: &Scenario, u: LatticeVector) -> PolystableLocus {
    let on_line = |v: &LatticeVector| v.dot(&u).expect("rank 2").is_zero();
    let z_diagram = s.diagram.filter(|w| on_line(&w.vector));
    let normal_weights = WeightDiagram::new(
        s.diagram
            .weights()
            .iter()
            .filter(|w| !on_line(&w.vector))
            .map(|w| Weight::new(LatticeVector::new(alloc::vec![w.vector.dot(&u).expect("rank 2")]), w.multiplicity, w.label.clone()))
            .collect(),
    );
    let lines: BTreeSet<LatticeVector> = orbit(&u, &s.group.finite).into_iter().map(|x| x.primitive()).collect();
    PolystableLocus {
        normal_rank: normal_weights.total_multiplicity(),
        normalizer: line_normalizer(&s.group, &u),
        subtorus: Subtorus::Line(u),
        subtorus_rank: 1,
        z_diagram,
        normal_weights,
        orbit_size: lines.len(),
    }
}

/// Loci of points with closed orbit whose stabilizer is bigger than the
/// generic one, one per orbit, largest subtorus first.
pub fn enumerate_polystable_loci(s: &Scenario) -> Vec<PolystableLocus> {
    let span = s.diagram.span_dimension();
    if span == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    if s.diagram.weights().iter().any(|w| w.vector.is_zero()) {
        let z_diagram = s.diagram.filter(|w| w.vector.is_zero());
        let normal_weights = s.diagram.filter(|w| !w.vector.is_zero());
        out.push(PolystableLocus {
            subtorus: Subtorus::Full,
            subtorus_rank: s.rank(),
            z_diagram,
            normal_rank: normal_weights.total_multiplicity(),
            normal_weights,
            normalizer: s.group.clone(),
            orbit_size: 1,
        });
    }
    if s.rank() == 2 && span == 2 {
        let vs = s.diagram.distinct_vectors();
        let mut dirs = BTreeSet::new();
        for a in vs.iter().filter(|a| !a.is_zero()) {
            let on_line: Vec<&LatticeVector> = vs.iter().filter(|v| cross(v, a).is_zero()).collect();
            let pos = on_line.iter().any(|v| v.dot(a).unwrap().is_positive());
            let neg = on_line.iter().any(|v| v.dot(a).unwrap().is_negative());
            if pos && neg {
                let c = a.coords();
                let u = LatticeVector::new(alloc::vec![-c[1].clone(), c[0].clone()]).primitive();
                dirs.insert(canonical_line(&u, &s.group));
            }
        }
        for u in dirs.into_iter().rev() {
            out.push(line_locus(s, u));
        }
    }
    out
}

pub fn normal_slice_weights(_s: &Scenario, l: &PolystableLocus) -> WeightDiagram {
    l.normal_weights.clone()
}

pub fn normal_rank(_s: &Scenario, l: &PolystableLocus) -> u32 {
    l.normal_rank
}

/// Equivariant series of the strict transform of `Z_R^ss` under `h`.
pub fn strict_transform_series(_s: &Scenario, l: &PolystableLocus, h: &GroupSpec) -> Result<RationalSeries> {
    kirwan_blowup_series(&Scenario::new(l.z_diagram.clone(), h.clone())?)
}

pub fn main_term(s: &Scenario, l: &PolystableLocus) -> Result<RationalSeries> {
    if l.normal_rank <= 1 {
        return Ok(RationalSeries::zero());
    }
    let st = strict_transform_series(s, l, &l.normalizer)?;
    Ok(st.mul_polynomial(&geometric_range(1, l.normal_rank - 1)?))
}

pub fn slice_beta_set(s: &Scenario, l: &PolystableLocus) -> Vec<SlopeBetaDatum> {
    let betas = all_betas(&l.normal_weights);
    let embedded: BTreeSet<LatticeVector> = betas.iter().map(|b| l.embed(b)).collect();
    betas
        .iter()
        .map(|b| {
            let b2 = b.norm2();
            let mut codim = 0;
            let mut on_plane = 0;
            let mut equal = 0;
            for w in l.normal_weights.weights() {
                let p = w.vector.dot(b).expect("slice rank");
                if p < b2 {
                    codim += w.multiplicity;
                } else if p == b2 {
                    on_plane += w.multiplicity;
                    if w.vector == *b {
                        equal += w.multiplicity;
                    }
                }
            }
            let e = l.embed(b);
            let w = orbit(&e, &s.group.finite).iter().filter(|x| embedded.contains(*x)).count();
            SlopeBetaDatum {
                beta_prime: b.clone(),
                codim,
                w,
                slice_stabilizer: stabilizer_of_vector(&l.normalizer, &e),
                fiber_multiplicity: equal,
                fiber_closed: equal == on_plane,
                fiber_series: if equal > 0 { projective_space(equal - 1) } else { Polynomial::zero() },
            }
        })
        .collect()
}

pub fn extra_term(s: &Scenario, l: &PolystableLocus) -> Result<RationalSeries> {
    let data = slice_beta_set(s, l);
    let mut out = RationalSeries::zero();
    match l.subtorus {
        Subtorus::Full => {
            let ns = Scenario::new(l.normal_weights.clone(), l.normalizer.clone())?;
            let base = projective_space(l.z_dimension());
            for d in &data {
                let slice = slice_scenario(&ns, &beta_datum(&ns, &d.beta_prime));
                let term = semistable_series(&slice).mul_polynomial(&base);
                out += &term.shift(2 * d.codim).scale(&Rational::new(1.into(), d.w.into()));
            }
        }
        Subtorus::Line(_) => {
            let mut cache: BTreeMap<GroupSpec, RationalSeries> = BTreeMap::new();
            for d in &data {
                if !d.fiber_closed {
                    return Err(Error::FiberNotClosed {
                        locus: l.subtorus.to_string(),
                        beta: d.beta_prime.to_string(),
                    });
                }
                let st = match cache.get(&d.slice_stabilizer) {
                    Some(x) => x.clone(),
                    None => {
                        let x = strict_transform_series(s, l, &d.slice_stabilizer)?;
                        cache.insert(d.slice_stabilizer.clone(), x.clone());
                        x
                    }
                };
                let term = st.mul_polynomial(&d.fiber_series);
                out += &term.shift(2 * d.codim).scale(&Rational::new(1.into(), d.w.into()));
            }
        }
    }
    Ok(out)
}

/// Main minus extra term.
pub fn a_term(s: &Scenario, l: &PolystableLocus) -> Result<RationalSeries> {
    Ok(main_term(s, l)? - extra_term(s, l)?)
}

/// Distinct fixed lines may only meet in a single point.
pub fn check_stages(s: &Scenario, loci: &[PolystableLocus]) -> Result<()> {
    let lines: usize = loci.iter().filter(|l| l.subtorus_rank == 1 && l.subtorus != Subtorus::Full).map(|l| l.orbit_size).sum();
    let zero: u32 = s.diagram.weights().iter().filter(|w| w.vector.is_zero()).map(|w| w.multiplicity).sum();
    if lines >= 2 && zero > 1 {
        return Err(Error::UnsupportedStages(format!(
            "{lines} fixed lines meet in a projective space of dimension {}",
            zero - 1
        )));
    }
    Ok(())
}

pub fn kirwan_blowup_series(s: &Scenario) -> Result<RationalSeries> {
    let loci = enumerate_polystable_loci(s);
    check_stages(s, &loci)?;
    let mut out = semistable_series(s);
    for l in &loci {
        out += &a_term(s, l)?;
    }
    Ok(out)
}
