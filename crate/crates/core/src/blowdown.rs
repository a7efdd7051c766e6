//! Blow-down corrections and intersection Betti numbers.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::blowup::{
    enumerate_polystable_loci, extra_term, kirwan_blowup_series, main_term, slice_beta_set,
    strict_transform_series, PolystableLocus, SlopeBetaDatum,
};
use crate::error::{Error, Result};
use crate::lattice::{molien_series, FiniteMatrixGroup, GroupSpec, IntMatrix};
use crate::scenario::{Scenario, Subtorus};
use crate::series::{Polynomial, RationalSeries};
use crate::strata::{ambient_series, enumerate_beta, has_strictly_semistable, semistable_series, slice_scenario, BetaDatum};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CenterSource {
    Computed,
    /// Computed, and equal to the configured override.
    ComputedMatchesOverride,
    /// Computed and valid, but the configured override disagrees; the
    /// computed value is used.
    ComputedDiffersFromOverride,
    Override,
}

impl CenterSource {
    pub fn as_str(self) -> &'static str {
        match self {
            CenterSource::Computed => "computed",
            CenterSource::ComputedMatchesOverride => "computed, matches override",
            CenterSource::ComputedDiffersFromOverride => "computed, override disagrees",
            CenterSource::Override => "override",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowdownDatum {
    pub locus: PolystableLocus,
    pub center_quotient: Polynomial,
    pub center_source: CenterSource,
    pub exceptional_ih: Polynomial,
    pub quotient_dim: u32,
    pub correction: Polynomial,
}

/// The subtorus of a locus with the finite action induced by its normalizer.
pub fn subtorus_group(l: &PolystableLocus) -> GroupSpec {
    match &l.subtorus {
        Subtorus::Full => l.normalizer.clone(),
        Subtorus::Line(u) => {
            let flips = l.normalizer.finite.elements().iter().any(|m| m.apply(u) != *u);
            let finite = if flips {
                FiniteMatrixGroup::generate(1, &[IntMatrix::diag(&[-1])]).expect("order 2")
            } else {
                FiniteMatrixGroup::trivial(1)
            };
            GroupSpec::new(1, finite).expect("rank 1")
        }
    }
}

/// Projectivized normal slice acted on by the subtorus and its induced
/// finite group.
pub fn exceptional_slice_scenario(l: &PolystableLocus) -> Result<Scenario> {
    Scenario::new(l.normal_weights.clone(), subtorus_group(l))
}

pub fn exceptional_quotient_ih(_s: &Scenario, l: &PolystableLocus) -> Result<Polynomial> {
    let slice = exceptional_slice_scenario(l)?;
    if has_strictly_semistable(&slice) {
        intersection_series(&slice)
    } else {
        semistable_series(&slice).exact_polynomial()
    }
}

/// Complex dimension of the quotient of the projectivized slice.
pub fn quotient_dimension(l: &PolystableLocus) -> u32 {
    (l.normal_rank as i64 - 1 - l.normal_weights.span_dimension() as i64).max(0) as u32
}

fn is_poincare_polynomial(p: &Polynomial) -> bool {
    let Some(coeffs) = p.integer_coefficients() else {
        return false;
    };
    !coeffs.is_empty() && coeffs.iter().all(|&c| c >= 0) && p.is_palindromic(p.degree().unwrap_or(0))
}

pub fn center_quotient_series(s: &Scenario, l: &PolystableLocus) -> Result<(Polynomial, CenterSource)> {
    let st = strict_transform_series(s, l, &l.normalizer)?;
    let candidate = st.divide_exact(&molien_series(&subtorus_group(l))).ok().filter(is_poincare_polynomial);
    let over = s.override_for(&l.subtorus);
    match (candidate, over) {
        (Some(c), None) => Ok((c, CenterSource::Computed)),
        (Some(c), Some(o)) if c == *o => Ok((c, CenterSource::ComputedMatchesOverride)),
        (Some(c), Some(_)) => Ok((c, CenterSource::ComputedDiffersFromOverride)),
        (None, Some(o)) => Ok((o.clone(), CenterSource::Override)),
        (None, None) => Err(Error::NeedsOverride { locus: l.subtorus.to_string() }),
    }
}

/// `Σ_q t^q IH^{q̂}` with `q̂ = q - 2` up to the quotient dimension and `q̂ = q` above it.
pub fn shifted_exceptional(ih: &Polynomial, quotient_dim: u32) -> Polynomial {
    let mut out = Polynomial::zero();
    for q in 0..=2 * quotient_dim + 2 {
        let q_hat = if q <= quotient_dim { q.checked_sub(2) } else { Some(q) };
        if let Some(h) = q_hat {
            out.add_term(q, ih.coefficient(h));
        }
    }
    out
}

pub fn blowdown_datum(s: &Scenario, l: &PolystableLocus) -> Result<BlowdownDatum> {
    let (center_quotient, center_source) = center_quotient_series(s, l)?;
    let exceptional_ih = exceptional_quotient_ih(s, l)?;
    let quotient_dim = quotient_dimension(l);
    let correction = &center_quotient * &shifted_exceptional(&exceptional_ih, quotient_dim);
    Ok(BlowdownDatum { locus: l.clone(), center_quotient, center_source, exceptional_ih, quotient_dim, correction })
}

pub fn blowdown_correction(s: &Scenario, l: &PolystableLocus) -> Result<Polynomial> {
    Ok(blowdown_datum(s, l)?.correction)
}

pub fn intersection_series(s: &Scenario) -> Result<Polynomial> {
    let mut out = kirwan_blowup_series(s)?.exact_polynomial()?;
    for l in enumerate_polystable_loci(s) {
        out -= &blowdown_correction(s, &l)?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrdinaryBetti {
    pub quotient_dim: u32,
    /// `(i, b_i)` of the GIT quotient, for `i > n + 2`.
    pub quotient: Vec<(u32, i64)>,
    /// `(i, b_i)` of the stable quotient, for `i < n - 2`.
    pub stable: Vec<(u32, i64)>,
}

impl OrdinaryBetti {
    pub fn from_intersection(n: u32, ih: &Polynomial) -> Self {
        let b = |i: u32| ih.coefficient(i).to_integer().try_into().unwrap_or(i64::MAX);
        Self {
            quotient_dim: n,
            quotient: (n + 3..=2 * n).map(|i| (i, b(i))).collect(),
            stable: (0..n.saturating_sub(2)).map(|i| (i, b(i))).collect(),
        }
    }
}

pub fn ordinary_betti_report(s: &Scenario) -> Result<OrdinaryBetti> {
    let ih = intersection_series(s)?;
    Ok(OrdinaryBetti::from_intersection(s.quotient_dimension().max(0) as u32, &ih))
}

#[derive(Clone, Debug)]
pub struct LocusAnalysis {
    pub locus: PolystableLocus,
    pub main: RationalSeries,
    pub extra: RationalSeries,
    pub slope: Vec<SlopeBetaDatum>,
    pub blowdown: BlowdownDatum,
}

impl LocusAnalysis {
    pub fn a_term(&self) -> RationalSeries {
        &self.main - &self.extra
    }
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub scenario: Scenario,
    pub betas: Vec<BetaDatum>,
    /// Equivariant series of each stratum, in the order of `betas`.
    pub strata: Vec<RationalSeries>,
    pub ambient: RationalSeries,
    pub semistable: RationalSeries,
    pub loci: Vec<LocusAnalysis>,
    pub kirwan: Polynomial,
    pub intersection: Polynomial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Checks {
    pub duality: bool,
    pub odd: bool,
    pub consistency: bool,
}

impl Checks {
    pub fn all(&self) -> bool {
        self.duality && self.odd && self.consistency
    }
}

impl Analysis {
    pub fn quotient_dim(&self) -> u32 {
        self.scenario.quotient_dimension().max(0) as u32
    }

    pub fn ordinary_betti(&self) -> OrdinaryBetti {
        OrdinaryBetti::from_intersection(self.quotient_dim(), &self.intersection)
    }

    /// `P^G(X^ss) + Σ (A_R - B_R)`, assembled independently of `intersection`.
    pub fn decomposed_intersection(&self) -> Result<Polynomial> {
        let mut total = self.semistable.clone();
        for l in &self.loci {
            total += &l.a_term();
            total -= &RationalSeries::polynomial(l.blowdown.correction.clone());
        }
        total.exact_polynomial()
    }

    pub fn checks(&self) -> Checks {
        let top = 2 * self.quotient_dim();
        Checks {
            duality: self.kirwan.is_palindromic(top) && self.intersection.is_palindromic(top),
            odd: !self.kirwan.has_odd_terms() && !self.intersection.has_odd_terms(),
            consistency: self.decomposed_intersection().is_ok_and(|p| p == self.intersection),
        }
    }
}

pub fn analyze(s: &Scenario) -> Result<Analysis> {
    let betas = enumerate_beta(s);
    let strata = betas.iter().map(|b| semistable_series(&slice_scenario(s, b))).collect();
    let semistable = semistable_series(s);
    let loci = enumerate_polystable_loci(s);
    crate::blowup::check_stages(s, &loci)?;
    let mut analyses = Vec::new();
    let mut kirwan = semistable.clone();
    let mut intersection_corrections = Polynomial::zero();
    for l in loci {
        let main = main_term(s, &l)?;
        let extra = extra_term(s, &l)?;
        let blowdown = blowdown_datum(s, &l)?;
        kirwan += &(&main - &extra);
        intersection_corrections += &blowdown.correction;
        let slope = slice_beta_set(s, &l);
        analyses.push(LocusAnalysis { locus: l, main, extra, slope, blowdown });
    }
    let kirwan = kirwan.exact_polynomial()?;
    let intersection = &kirwan - &intersection_corrections;
    Ok(Analysis {
        scenario: s.clone(),
        betas,
        strata,
        ambient: ambient_series(s),
        semistable,
        loci: analyses,
        kirwan,
        intersection,
    })
}
