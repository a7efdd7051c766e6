use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use kirwan_core::blowdown::{analyze, blowdown_correction, exceptional_quotient_ih, exceptional_slice_scenario, intersection_series, quotient_dimension, subtorus_group, Analysis};
use kirwan_core::blowup::{enumerate_polystable_loci, extra_term, kirwan_blowup_series, main_term, slice_beta_set, PolystableLocus};
use kirwan_core::lattice::{closest_point_to_origin, molien_series, GroupSpec, IntMatrix, LatticeVector};
use kirwan_core::scenario::{enriques_scenario, Scenario, Subtorus};
use kirwan_core::strata::{beta_datum, enumerate_beta, semistable_series, slice_scenario, BetaDatum};
use kirwan_core::{geometric_range, ratio, Polynomial, Rational, RationalSeries};
use num_traits::{Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn(&Ctx) -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn even(c: &[i64]) -> Polynomial {
    Polynomial::from_terms(c.iter().enumerate().map(|(k, &x)| (2 * k as u32, x)))
}

fn rs(num: &[i64], den: &[u32]) -> RationalSeries {
    RationalSeries::new(even(num), den.to_vec()).unwrap()
}

fn v(c: &[i64]) -> LatticeVector {
    LatticeVector::from_ints(c)
}

fn same<T: PartialEq + std::fmt::Display>(what: &str, got: &T, want: &T) -> Outcome {
    ensure!(got == want, "{what}: got {got}, want {want}");
    Ok(())
}

struct Ctx {
    scenario: Scenario,
    analysis: Analysis,
}

fn locus<'a>(ctx: &'a Ctx, sub: &Subtorus) -> &'a PolystableLocus {
    &ctx.analysis.loci.iter().find(|l| &l.locus.subtorus == sub).expect("locus present").locus
}

fn line(c: &[i64]) -> Subtorus {
    Subtorus::Line(v(c))
}

/// Whether some group element carries `listed` onto the weight set of `z`.
fn weights_match(group: &GroupSpec, listed: &[LatticeVector], z: &BTreeSet<LatticeVector>) -> bool {
    group.finite.elements().iter().any(|m| listed.iter().map(|w| m.apply(w)).collect::<BTreeSet<_>>() == *z)
}

fn row_weights(rows: &[&[i64]]) -> Vec<LatticeVector> {
    rows.iter().map(|c| v(c)).collect()
}

fn table_rows() -> Vec<Vec<LatticeVector>> {
    vec![
        row_weights(&[&[4, -4]]),
        row_weights(&[&[4, 0], &[2, -2], &[0, -4]]),
        row_weights(&[&[4, 4], &[2, -2]]),
        row_weights(&[&[2, 2], &[0, -4]]),
        row_weights(&[&[4, 4], &[0, -4]]),
        row_weights(&[&[2, 2], &[2, -2]]),
        row_weights(&[&[4, 4], &[4, 0], &[4, -4]]),
    ]
}

fn find_row<'a>(s: &Scenario, data: &'a [BetaDatum], listed: &[LatticeVector]) -> Option<&'a BetaDatum> {
    data.iter().find(|b| weights_match(&s.group, listed, &b.z_weights.distinct_vectors().into_iter().collect()))
}

fn c1_semistable(ctx: &Ctx) -> Outcome {
    let want = rs(&[1, 1, 1, 1, 1, 1, 1, 0, -2, -3, -3, -2, 0, 1, 1, 1, 1], &[4, 8]);
    same("closed form", &ctx.analysis.semistable, &want)?;
    same("mod t^11", &ctx.analysis.semistable.truncate(11), &even(&[1, 1, 2, 2, 4, 4]))
}

fn c2_strata(ctx: &Ctx) -> Outcome {
    let s = &ctx.scenario;
    let data = &ctx.analysis.betas;
    ensure!(data.len() == 7, "{} classes", data.len());
    let betas = [v(&[4, -4]), v(&[2, -2]), LatticeVector::new(vec![ratio(12, 5), ratio(-4, 5)]), LatticeVector::new(vec![ratio(6, 5), ratio(-2, 5)]), LatticeVector::new(vec![ratio(8, 5), ratio(-4, 5)]), v(&[2, 0]), v(&[4, 0])];
    let ns = [12, 9, 9, 7, 8, 8, 10];
    let wide = rs(&[1], &[2, 4]);
    let torus = rs(&[1], &[2, 2]);
    let stab = [&wide, &wide, &torus, &torus, &torus, &wide, &wide];
    let bent = rs(&[1, 1, 0, -1], &[2, 4]);
    let flat = rs(&[1], &[2]);
    let strata = [&wide, &bent, &flat, &flat, &flat, &flat, &bent];
    for (i, listed) in table_rows().iter().enumerate() {
        let b = find_row(s, data, listed).ok_or_else(|| format!("row {} unmatched", i + 1))?;
        let pos = data.iter().position(|d| d == b).unwrap();
        ensure!(
            kirwan_core::lattice::orbit(&betas[i], &s.group.finite).contains(&b.beta),
            "row {}: beta {} not conjugate to {}",
            i + 1,
            b.beta,
            betas[i]
        );
        ensure!(b.n_beta == ns[i] && 2 * b.codim == 2 * ns[i], "row {}: n = {}", i + 1, b.n_beta);
        same(&format!("row {} stabilizer", i + 1), &molien_series(&b.stabilizer), stab[i])?;
        same(&format!("row {} stratum", i + 1), &ctx.analysis.strata[pos], strata[i])?;
        same(&format!("row {} stratum recomputed", i + 1), &semistable_series(&slice_scenario(s, b)), strata[i])?;
    }
    Ok(())
}

fn c3_loci(ctx: &Ctx) -> Outcome {
    let l: Vec<&PolystableLocus> = ctx.analysis.loci.iter().map(|x| &x.locus).collect();
    ensure!(l.len() == 3, "{} loci", l.len());
    let subs: Vec<String> = l.iter().map(|x| x.subtorus.to_string()).collect();
    ensure!(subs == ["full", "line(1,1)", "line(1,0)"], "subtori {subs:?}");
    let zd: Vec<u32> = l.iter().map(|x| x.z_dimension()).collect();
    let orders: Vec<usize> = l.iter().map(|x| x.normalizer.finite.order()).collect();
    let ranks: Vec<u32> = l.iter().map(|x| x.normal_rank).collect();
    ensure!(zd == [0, 4, 2], "z dims {zd:?}");
    ensure!(orders == [8, 4, 4], "normalizer orders {orders:?}");
    ensure!(ranks == [12, 8, 10], "normal ranks {ranks:?}");
    Ok(())
}

fn c4_terms(ctx: &Ctx) -> Outcome {
    let s = &ctx.scenario;
    let (r0, r1, r2) = (locus(ctx, &Subtorus::Full), locus(ctx, &line(&[1, 1])), locus(ctx, &line(&[1, 0])));
    let g = |a, b| geometric_range(a, b).unwrap();
    same("R0 main", &main_term(s, r0).unwrap(), &RationalSeries::new(g(1, 11), vec![4, 8]).unwrap())?;
    same("R1 main", &main_term(s, r1).unwrap(), &rs(&[1, 1, 1], &[2]).mul_polynomial(&g(1, 7)))?;
    same("R2 main", &main_term(s, r2).unwrap(), &RationalSeries::new(g(1, 9), vec![2]).unwrap())?;
    let e0 = RationalSeries::new(even(&[1, 2, 1, 0, 0, 0, -1]).shift(12), vec![2, 4]).unwrap();
    same("R0 extra", &extra_term(s, r0).unwrap(), &e0)?;
    same("R0 extra mod t^11", &e0.truncate(11), &Polynomial::zero())?;
    let e1 = rs(&[1, 2, 2, 1], &[2]).mul_polynomial(&even(&[0, 0, 0, 0, 1, 1, 1, 1]));
    same("R1 extra", &extra_term(s, r1).unwrap(), &e1)?;
    let e2 = rs(&[1, 1], &[2]).mul_polynomial(&even(&[0, 0, 0, 0, 0, 1, 1, 1, 1, 1]));
    same("R2 extra", &extra_term(s, r2).unwrap(), &e2)?;

    let codims = |l: &PolystableLocus| {
        slice_beta_set(s, l)
            .into_iter()
            .map(|d| (d.beta_prime.coords()[0].abs(), d.codim))
            .collect::<BTreeSet<(Rational, u32)>>()
    };
    let want1: BTreeSet<_> = [(Rational::from_integer(4.into()), 4), (Rational::from_integer(8.into()), 7)].into();
    let want2: BTreeSet<_> = [(Rational::from_integer(2.into()), 5), (Rational::from_integer(4.into()), 7)].into();
    ensure!(codims(r1) == want1, "R1 slope codims {:?}", codims(r1));
    ensure!(codims(r2) == want2, "R2 slope codims {:?}", codims(r2));

    let slope = slice_beta_set(s, r0);
    let total: usize = slope.len();
    ensure!(total == 40, "{total} slope indices on R0");
    let normal = Scenario::new(r0.normal_weights.clone(), r0.normalizer.clone()).unwrap();
    let ws = [4, 4, 8, 8, 8, 4, 4];
    let ds = [22, 16, 16, 12, 14, 14, 18];
    let wide = rs(&[1], &[2, 4]);
    let bent = rs(&[1, 1, 0, -1], &[2, 4]);
    let flat = rs(&[1], &[2]);
    let series = [&wide, &bent, &flat, &flat, &flat, &flat, &bent];
    let mut covered = 0;
    for (i, listed) in table_rows().iter().enumerate() {
        let hits: Vec<_> = slope
            .iter()
            .filter(|d| {
                let b = beta_datum(&normal, &d.beta_prime);
                weights_match(&s.group, listed, &b.z_weights.distinct_vectors().into_iter().collect())
            })
            .collect();
        ensure!(!hits.is_empty(), "slope row {} unmatched", i + 1);
        covered += hits.len();
        for d in &hits {
            ensure!(d.w == ws[i], "slope row {}: w = {}", i + 1, d.w);
            ensure!(2 * d.codim == ds[i], "slope row {}: 2d = {}", i + 1, 2 * d.codim);
            let b = beta_datum(&normal, &d.beta_prime);
            same(&format!("slope row {} series", i + 1), &semistable_series(&slice_scenario(&normal, &b)), series[i])?;
        }
        ensure!(hits.len() == ws[i], "slope row {}: {} indices", i + 1, hits.len());
    }
    ensure!(covered == total, "rows cover {covered} of {total}");
    Ok(())
}

fn c5_kirwan(ctx: &Ctx) -> Outcome {
    let k = &ctx.analysis.kirwan;
    same("kirwan", k, &even(&[1, 4, 8, 13, 18, 20, 18, 13, 8, 4, 1]))?;
    let direct = kirwan_blowup_series(&ctx.scenario).map_err(|e| e.to_string())?.exact_polynomial().map_err(|e| e.to_string())?;
    same("kirwan recomputed", &direct, k)?;
    ensure!(k.is_palindromic(20), "kirwan not palindromic");
    Ok(())
}

fn c6_nested(ctx: &Ctx) -> Outcome {
    let r0 = locus(ctx, &Subtorus::Full);
    let e = exceptional_slice_scenario(r0).map_err(|e| e.to_string())?;
    ensure!(e.projective_dimension() == 11, "slice is P^{}", e.projective_dimension());
    let k = kirwan_blowup_series(&e).map_err(|e| e.to_string())?.exact_polynomial().map_err(|e| e.to_string())?;
    same("nested kirwan", &k, &even(&[1, 3, 5, 8, 10, 10, 8, 5, 3, 1]))?;
    let ih = intersection_series(&e).map_err(|e| e.to_string())?;
    same("nested IH", &ih, &even(&[1, 1, 2, 2, 3, 3, 2, 2, 1, 1]))?;
    same("nested IH via locus", &exceptional_quotient_ih(&ctx.scenario, r0).unwrap(), &ih)?;
    let loci = enumerate_polystable_loci(&e);
    ensure!(loci.len() == 2, "{} nested loci", loci.len());
    let orbit_total: usize = loci.iter().map(|l| l.orbit_size).sum();
    ensure!(orbit_total == 4, "nested orbit total {orbit_total}");
    let diag = loci.iter().find(|l| l.subtorus == line(&[1, 1])).ok_or("no (1,1) nested locus")?;
    let axis = loci.iter().find(|l| l.subtorus == line(&[1, 0])).ok_or("no (1,0) nested locus")?;
    ensure!(diag.z_dimension() == 3 && axis.z_dimension() == 1, "nested centers P^{} and P^{}", diag.z_dimension(), axis.z_dimension());
    same("nested B (1,1)", &blowdown_correction(&e, diag).unwrap(), &even(&[0, 1, 2, 4, 5, 5, 4, 2, 1]))?;
    same("nested B (1,0)", &blowdown_correction(&e, axis).unwrap(), &even(&[0, 1, 1, 2, 2, 2, 2, 1, 1]))
}

fn c7_blowdown(ctx: &Ctx) -> Outcome {
    let s = &ctx.scenario;
    let b = |sub: &Subtorus| blowdown_correction(s, locus(ctx, sub)).unwrap();
    same("B R2", &b(&line(&[1, 0])), &even(&[0, 1, 2, 3, 4, 4, 4, 3, 2, 1]))?;
    same("B R1", &b(&line(&[1, 1])), &even(&[0, 1, 3, 6, 9, 10, 9, 6, 3, 1]))?;
    same("B R0", &b(&Subtorus::Full), &even(&[0, 1, 1, 2, 2, 3, 2, 2, 1, 1]))?;
    let ih = &ctx.analysis.intersection;
    same("IH", ih, &even(&[1, 1, 2, 2, 3, 3, 3, 2, 2, 1, 1]))?;
    ensure!(ih.is_palindromic(20), "IH not palindromic");
    ensure!(!ih.has_odd_terms(), "IH has odd terms");
    Ok(())
}

fn c8_consistency(ctx: &Ctx) -> Outcome {
    let d = ctx.analysis.decomposed_intersection().map_err(|e| e.to_string())?;
    same("decomposition", &d, &ctx.analysis.intersection)?;
    ensure!(ctx.analysis.checks().all(), "checks {:?}", ctx.analysis.checks());
    Ok(())
}

fn collect_groups(s: &Scenario, out: &mut BTreeSet<GroupSpec>, depth: u32) {
    out.insert(s.group.clone());
    if depth == 0 {
        return;
    }
    for b in enumerate_beta(s) {
        collect_groups(&slice_scenario(s, &b), out, depth - 1);
    }
    for l in enumerate_polystable_loci(s) {
        out.insert(l.normalizer.clone());
        out.insert(subtorus_group(&l));
        if let Ok(z) = Scenario::new(l.z_diagram.clone(), l.normalizer.clone()) {
            collect_groups(&z, out, depth - 1);
        }
        for d in slice_beta_set(s, &l) {
            out.insert(d.slice_stabilizer.clone());
            if let Ok(z) = Scenario::new(l.z_diagram.clone(), d.slice_stabilizer.clone()) {
                collect_groups(&z, out, depth - 1);
            }
        }
        if let Ok(e) = exceptional_slice_scenario(&l) {
            collect_groups(&e, out, depth - 1);
        }
    }
}

fn monomials(rank: usize, degree: u32) -> Vec<Vec<u32>> {
    if rank == 0 {
        return if degree == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=degree {
        for mut rest in monomials(rank - 1, degree - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `m` applied to the monomial `x^e`, with `x_i ↦ Σ_j m_ij x_j`.
fn act(m: &IntMatrix, e: &[u32], basis: &[Vec<u32>]) -> Vec<i64> {
    let r = e.len();
    let mut poly: std::collections::BTreeMap<Vec<u32>, i64> = [(vec![0; r], 1)].into();
    for (i, &p) in e.iter().enumerate() {
        for _ in 0..p {
            let mut next = std::collections::BTreeMap::new();
            for (mono, c) in &poly {
                for j in 0..r {
                    let a = m.entry(i, j);
                    if a != 0 {
                        let mut k = mono.clone();
                        k[j] += 1;
                        *next.entry(k).or_insert(0) += c * a;
                    }
                }
            }
            poly = next;
        }
    }
    basis.iter().map(|b| poly.get(b).copied().unwrap_or(0)).collect()
}

fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let mut r = 0;
    let cols = rows.first().map_or(0, |x| x.len());
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &pivot;
                for k in c..cols {
                    let d = &f * &rows[r][k];
                    rows[i][k] -= d;
                }
            }
        }
        r += 1;
    }
    r
}

/// Dimension of degree-`k` invariants of the finite part, via the Reynolds operator.
fn invariant_dimension(g: &GroupSpec, k: u32) -> usize {
    let basis = monomials(g.torus_rank, k);
    let rows: Vec<Vec<Rational>> = basis
        .iter()
        .map(|e| {
            let mut acc = vec![0i64; basis.len()];
            for m in g.finite.elements() {
                for (a, x) in acc.iter_mut().zip(act(m, e, &basis)) {
                    *a += x;
                }
            }
            acc.into_iter().map(|x| Rational::from_integer(x.into())).collect()
        })
        .collect();
    rank(rows)
}

fn c9a_molien(ctx: &Ctx) -> Outcome {
    let mut groups = BTreeSet::new();
    collect_groups(&ctx.scenario, &mut groups, 3);
    ensure!(groups.len() >= 4, "only {} groups collected", groups.len());
    for g in &groups {
        let series = molien_series(g).truncate(25);
        for deg in 0..25u32 {
            let want = if deg % 2 == 0 { invariant_dimension(g, deg / 2) as i64 } else { 0 };
            let got = series.coefficient(deg);
            ensure!(got == Rational::from_integer(want.into()), "group of order {} rank {}: t^{deg} is {got}, want {want}", g.finite.order(), g.torus_rank);
        }
    }
    Ok(())
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .flat_map(|first| {
            compositions(total - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn c9b_closest_point(_: &Ctx) -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x6b69_7277);
    for case in 0..200 {
        let n = rng.gen_range(1..=6);
        let pts: Vec<LatticeVector> = (0..n)
            .map(|_| {
                let d = rng.gen_range(1..=3);
                LatticeVector::new(vec![ratio(rng.gen_range(-8..=8), d), ratio(rng.gen_range(-8..=8), d)])
            })
            .collect();
        let c = closest_point_to_origin(&pts).ok_or("no closest point")?;
        let c2 = c.norm2();
        for p in &pts {
            let slack = p.sub(&c).dot(&c).unwrap();
            ensure!(!slack.is_negative(), "case {case}: {p} violates optimality of {c}");
        }
        for den in 1..=8u32 {
            for weights in compositions(den, n) {
                let mut g = LatticeVector::zero(2);
                for (p, &w) in pts.iter().zip(&weights) {
                    g = g.add(&p.scale(&ratio(w as i64, den as i64)));
                }
                ensure!(c2 <= g.norm2(), "case {case}: grid point {g} beats {c}");
            }
        }
    }
    Ok(())
}

fn nonnegative_integers(p: &Polynomial) -> bool {
    p.is_nonnegative() && p.integer_coefficients().is_some()
}

fn c9c_final_polynomials(ctx: &Ctx) -> Outcome {
    let a = &ctx.analysis;
    let mut all = vec![("kirwan".to_string(), a.kirwan.clone()), ("IH".to_string(), a.intersection.clone())];
    for l in &a.loci {
        let tag = l.locus.subtorus.to_string();
        all.push((format!("center {tag}"), l.blowdown.center_quotient.clone()));
        all.push((format!("exceptional IH {tag}"), l.blowdown.exceptional_ih.clone()));
        all.push((format!("B {tag}"), l.blowdown.correction.clone()));
    }
    for (name, p) in &all {
        ensure!(nonnegative_integers(p), "{name} = {p}");
    }
    Ok(())
}

fn c9d_exceptional_duality(ctx: &Ctx) -> Outcome {
    for l in &ctx.analysis.loci {
        let qd = quotient_dimension(&l.locus);
        ensure!(qd == l.blowdown.quotient_dim, "{} dimension mismatch", l.locus.subtorus);
        ensure!(l.blowdown.exceptional_ih.is_palindromic(2 * qd), "{} exceptional IH {} not palindromic at {}", l.locus.subtorus, l.blowdown.exceptional_ih, 2 * qd);
    }
    let dims: Vec<u32> = ctx.analysis.loci.iter().map(|l| l.blowdown.quotient_dim).collect();
    ensure!(dims == [9, 6, 8], "quotient dims {dims:?}");
    Ok(())
}

fn c9_properties(ctx: &Ctx) -> Outcome {
    c9a_molien(ctx).map_err(|e| format!("(a) {e}"))?;
    c9b_closest_point(ctx).map_err(|e| format!("(b) {e}"))?;
    c9c_final_polynomials(ctx).map_err(|e| format!("(c) {e}"))?;
    c9d_exceptional_duality(ctx).map_err(|e| format!("(d) {e}"))
}

fn c10_ordinary(ctx: &Ctx) -> Outcome {
    let b = ctx.analysis.ordinary_betti();
    ensure!(b.quotient_dim == 10, "quotient dim {}", b.quotient_dim);
    let qdeg: Vec<u32> = b.quotient.iter().map(|x| x.0).collect();
    let sdeg: Vec<u32> = b.stable.iter().map(|x| x.0).collect();
    ensure!(qdeg == (13..=20).collect::<Vec<_>>(), "quotient degrees {qdeg:?}");
    ensure!(sdeg == (0..8).collect::<Vec<_>>(), "stable degrees {sdeg:?}");
    let ih = &ctx.analysis.intersection;
    for &(i, x) in b.quotient.iter().chain(&b.stable) {
        ensure!(ih.coefficient(i) == Rational::from_integer(x.into()), "b_{i} = {x}");
    }
    let want_q = [0, 2, 0, 2, 0, 1, 0, 1];
    let got_q: Vec<i64> = b.quotient.iter().map(|x| x.1).collect();
    ensure!(got_q == want_q, "quotient Betti {got_q:?}");
    Ok(())
}

fn main() -> ExitCode {
    let scenario = enriques_scenario();
    let analysis = match analyze(&scenario) {
        Ok(a) => a,
        Err(e) => {
            println!("FAIL pipeline: {e}");
            return ExitCode::FAILURE;
        }
    };
    let ctx = Ctx { scenario, analysis };
    let criteria: [Criterion; 10] = [
        ("1 semistable series", c1_semistable),
        ("2 unstable strata", c2_strata),
        ("3 polystable loci", c3_loci),
        ("4 main and extra terms", c4_terms),
        ("5 kirwan blow-up", c5_kirwan),
        ("6 nested exceptional slice", c6_nested),
        ("7 blow-down corrections", c7_blowdown),
        ("8 decomposition consistency", c8_consistency),
        ("9 property suites", c9_properties),
        ("10 ordinary betti numbers", c10_ordinary),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(|| check(&ctx))).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(()) => println!("PASS {name}"),
            Err(e) => {
                failed += 1;
                println!("FAIL {name}: {e}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
