//! Rendering of pipeline results as aligned text, JSON or CSV.

use std::fmt::Write as _;

use clap::ValueEnum;
use kirwan_core::blowdown::{Analysis, Checks, LocusAnalysis};
use kirwan_core::lattice::molien_series;
use kirwan_core::scenario::Scenario;
use kirwan_core::strata::{enumerate_beta, semistable_series, slice_scenario, BetaDatum};
use kirwan_core::{Polynomial, Rational, RationalSeries};
use serde::Serialize;
use serde_json::Value;

use crate::config::{vector_coords, Coord};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum CheckKind {
    Duality,
    Odd,
    Consistency,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Duality => "duality",
            CheckKind::Odd => "odd",
            CheckKind::Consistency => "consistency",
        }
    }

    pub fn outcome(self, c: &Checks) -> bool {
        match self {
            CheckKind::Duality => c.duality,
            CheckKind::Odd => c.odd,
            CheckKind::Consistency => c.consistency,
        }
    }
}

fn coefficient(r: &Rational) -> Value {
    match Coord::from_rational(r) {
        Coord::Int(n) => Value::from(n),
        Coord::Text(s) => Value::from(s),
    }
}

/// Dense coefficients from degree 0.
pub fn coefficients(p: &Polynomial) -> Vec<Value> {
    match p.degree() {
        None => Vec::new(),
        Some(top) => (0..=top).map(|k| coefficient(&p.coefficient(k))).collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesDoc {
    pub text: String,
    pub numerator: Vec<Value>,
    pub denominator: Vec<u32>,
}

impl SeriesDoc {
    pub fn new(s: &RationalSeries) -> Self {
        let s = s.reduced();
        Self { text: s.to_string(), numerator: coefficients(s.numerator()), denominator: s.denominator().to_vec() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioSummary {
    pub torus_rank: usize,
    pub finite_order: usize,
    pub projective_dimension: u32,
    pub quotient_dimension: i64,
    pub weights: usize,
}

impl ScenarioSummary {
    pub fn new(s: &Scenario) -> Self {
        Self {
            torus_rank: s.rank(),
            finite_order: s.group.finite.order(),
            projective_dimension: s.projective_dimension(),
            quotient_dimension: s.quotient_dimension(),
            weights: s.diagram.total_multiplicity() as usize,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StratumRow {
    pub beta: Vec<Coord>,
    pub norm2: String,
    pub orbit_size: usize,
    pub weights: Vec<Vec<Coord>>,
    pub labels: Vec<String>,
    pub n_beta: u32,
    pub two_d: u32,
    pub stabilizer_order: usize,
    pub stabilizer_series: SeriesDoc,
    pub stratum_series: SeriesDoc,
}

impl StratumRow {
    pub fn new(b: &BetaDatum, stratum: &RationalSeries) -> Self {
        Self {
            beta: vector_coords(&b.beta),
            norm2: b.norm2().to_string(),
            orbit_size: b.orbit_size,
            weights: b.z_weights.distinct_vectors().iter().map(vector_coords).collect(),
            labels: b.z_weights.weights().iter().map(|w| w.label.clone()).filter(|l| !l.is_empty()).collect(),
            n_beta: b.n_beta,
            two_d: 2 * b.codim,
            stabilizer_order: b.stabilizer.finite.order(),
            stabilizer_series: SeriesDoc::new(&molien_series(&b.stabilizer)),
            stratum_series: SeriesDoc::new(stratum),
        }
    }
}

pub fn strata_rows(s: &Scenario) -> Vec<StratumRow> {
    enumerate_beta(s)
        .iter()
        .map(|b| StratumRow::new(b, &semistable_series(&slice_scenario(s, b))))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SemistableDoc {
    pub closed_form: SeriesDoc,
    pub truncation_order: u32,
    pub truncated: Vec<Value>,
    pub truncated_text: String,
}

impl SemistableDoc {
    pub fn new(series: &RationalSeries, order: u32) -> Self {
        let t = series.truncate(order);
        Self { closed_form: SeriesDoc::new(series), truncation_order: order, truncated: coefficients(&t), truncated_text: t.to_string() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LocusRow {
    pub subtorus: String,
    pub z_dimension: u32,
    pub normalizer_order: usize,
    pub normal_rank: u32,
    pub orbit_size: usize,
    pub main: SeriesDoc,
    pub extra: SeriesDoc,
    pub a_term: SeriesDoc,
    pub a_term_truncated: Vec<Value>,
    pub a_term_truncated_text: String,
    pub quotient_dim: u32,
    pub center_quotient: Vec<Value>,
    pub center_source: &'static str,
    pub exceptional_ih: Vec<Value>,
    pub correction: Vec<Value>,
    pub correction_text: String,
}

impl LocusRow {
    pub fn new(l: &LocusAnalysis, order: u32) -> Self {
        let a = l.a_term();
        let at = a.truncate(order);
        let b = &l.blowdown;
        Self {
            subtorus: l.locus.subtorus.to_string(),
            z_dimension: l.locus.z_dimension(),
            normalizer_order: l.locus.normalizer.finite.order(),
            normal_rank: l.locus.normal_rank,
            orbit_size: l.locus.orbit_size,
            main: SeriesDoc::new(&l.main),
            extra: SeriesDoc::new(&l.extra),
            a_term: SeriesDoc::new(&a),
            a_term_truncated: coefficients(&at),
            a_term_truncated_text: at.to_string(),
            quotient_dim: b.quotient_dim,
            center_quotient: coefficients(&b.center_quotient),
            center_source: b.center_source.as_str(),
            exceptional_ih: coefficients(&b.exceptional_ih),
            correction: coefficients(&b.correction),
            correction_text: b.correction.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BettiTable {
    pub degrees: Vec<u32>,
    pub kirwan: Vec<Value>,
    pub intersection: Vec<Value>,
}

impl BettiTable {
    /// Even degrees only when both polynomials vanish in odd degrees.
    pub fn new(a: &Analysis) -> Self {
        let top = (2 * a.quotient_dim()).max(a.kirwan.degree().unwrap_or(0)).max(a.intersection.degree().unwrap_or(0));
        let step = if a.kirwan.has_odd_terms() || a.intersection.has_odd_terms() { 1 } else { 2 };
        let degrees: Vec<u32> = (0..=top).step_by(step).collect();
        Self {
            kirwan: degrees.iter().map(|&k| coefficient(&a.kirwan.coefficient(k))).collect(),
            intersection: degrees.iter().map(|&k| coefficient(&a.intersection.coefficient(k))).collect(),
            degrees,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrdinaryDoc {
    pub quotient_dim: u32,
    pub quotient: Vec<(u32, i64)>,
    pub stable: Vec<(u32, i64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckDoc {
    pub name: &'static str,
    pub passed: bool,
}

pub fn check_docs(kinds: &[CheckKind], c: &Checks) -> Vec<CheckDoc> {
    kinds.iter().map(|&k| CheckDoc { name: k.name(), passed: k.outcome(c) }).collect()
}

pub fn assumptions(a: &Analysis) -> Vec<String> {
    let mut out = vec![
        "stratification is equivariantly perfect (equivariant formality)".to_string(),
        "parabolic dimension dim G/P_beta is zero for a torus-by-finite group".to_string(),
        "exceptional quotients are simply connected with finite quotient singularities".to_string(),
    ];
    for l in &a.loci {
        let src = l.blowdown.center_source.as_str();
        if src != "computed" {
            out.push(format!("center quotient of {} is {src}", l.locus.subtorus));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct BlowupDoc {
    pub truncation_order: u32,
    pub semistable: SemistableDoc,
    pub loci: Vec<LocusRow>,
    pub kirwan: Vec<Value>,
    pub kirwan_text: String,
    pub checks: Vec<CheckDoc>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionDoc {
    pub loci: Vec<LocusRow>,
    pub intersection: Vec<Value>,
    pub intersection_text: String,
    pub checks: Vec<CheckDoc>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FullReport {
    pub scenario: ScenarioSummary,
    pub semistable: SemistableDoc,
    pub strata: Vec<StratumRow>,
    pub loci: Vec<LocusRow>,
    pub kirwan: Vec<Value>,
    pub kirwan_text: String,
    pub intersection: Vec<Value>,
    pub intersection_text: String,
    pub betti: BettiTable,
    pub ordinary: OrdinaryDoc,
    pub checks: Vec<CheckDoc>,
    pub assumptions: Vec<String>,
}

pub fn blowup_doc(a: &Analysis, order: u32, checks: &[CheckKind]) -> BlowupDoc {
    BlowupDoc {
        truncation_order: order,
        semistable: SemistableDoc::new(&a.semistable, order),
        loci: a.loci.iter().map(|l| LocusRow::new(l, order)).collect(),
        kirwan: coefficients(&a.kirwan),
        kirwan_text: a.kirwan.to_string(),
        checks: check_docs(checks, &a.checks()),
    }
}

pub fn intersection_doc(a: &Analysis, order: u32, checks: &[CheckKind]) -> IntersectionDoc {
    IntersectionDoc {
        loci: a.loci.iter().map(|l| LocusRow::new(l, order)).collect(),
        intersection: coefficients(&a.intersection),
        intersection_text: a.intersection.to_string(),
        checks: check_docs(checks, &a.checks()),
    }
}

pub fn full_report(a: &Analysis, order: u32) -> FullReport {
    let s = &a.scenario;
    let ob = a.ordinary_betti();
    FullReport {
        scenario: ScenarioSummary::new(s),
        semistable: SemistableDoc::new(&a.semistable, order),
        strata: a.betas.iter().zip(&a.strata).map(|(b, st)| StratumRow::new(b, st)).collect(),
        loci: a.loci.iter().map(|l| LocusRow::new(l, order)).collect(),
        kirwan: coefficients(&a.kirwan),
        kirwan_text: a.kirwan.to_string(),
        intersection: coefficients(&a.intersection),
        intersection_text: a.intersection.to_string(),
        betti: BettiTable::new(a),
        ordinary: OrdinaryDoc { quotient_dim: ob.quotient_dim, quotient: ob.quotient, stable: ob.stable },
        checks: check_docs(&[CheckKind::Duality, CheckKind::Odd, CheckKind::Consistency], &a.checks()),
        assumptions: assumptions(a),
    }
}

pub fn json<T: Serialize>(doc: &T) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("report data serializes");
    out.push('\n');
    out
}

fn value_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn vector_text(v: &[Coord]) -> String {
    let parts: Vec<String> = v
        .iter()
        .map(|c| match c {
            Coord::Int(n) => n.to_string(),
            Coord::Text(s) => s.clone(),
        })
        .collect();
    format!("({})", parts.join(","))
}

/// Left-aligned columns separated by two spaces.
pub fn aligned(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let mut l = String::new();
        for (i, (c, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                l.push_str("  ");
            }
            l.push_str(c);
            l.extend(std::iter::repeat_n(' ', w - c.chars().count()));
        }
        out.push_str(l.trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for r in rows {
        line(r.iter().map(String::as_str).collect());
    }
    out
}

pub fn strata_table(rows: &[StratumRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                vector_text(&r.beta),
                r.norm2.clone(),
                r.orbit_size.to_string(),
                r.weights.iter().map(|w| vector_text(w)).collect::<Vec<_>>().join(" "),
                r.n_beta.to_string(),
                r.two_d.to_string(),
                r.stabilizer_order.to_string(),
                r.stabilizer_series.text.clone(),
                r.stratum_series.text.clone(),
            ]
        })
        .collect();
    aligned(&["beta", "|beta|^2", "orbit", "weights on <beta>", "n", "2d", "|F_beta|", "P(Stab beta)", "P(S_beta)"], &body)
}

pub fn semistable_table(d: &SemistableDoc) -> String {
    format!("semistable: {}\nsemistable mod t^{}: {}\n", d.closed_form.text, d.truncation_order, d.truncated_text)
}

fn checks_table(c: &[CheckDoc]) -> String {
    c.iter().map(|c| format!("check {}: {}\n", c.name, if c.passed { "pass" } else { "FAIL" })).collect()
}

fn blowup_loci_table(loci: &[LocusRow], order: u32) -> String {
    let body: Vec<Vec<String>> = loci
        .iter()
        .map(|l| vec![l.subtorus.clone(), l.main.text.clone(), l.extra.text.clone(), l.a_term_truncated_text.clone()])
        .collect();
    let last = format!("A_R mod t^{order}");
    aligned(&["locus", "main", "extra", &last], &body)
}

fn loci_table(loci: &[LocusRow]) -> String {
    let body: Vec<Vec<String>> = loci
        .iter()
        .map(|l| {
            vec![
                l.subtorus.clone(),
                l.z_dimension.to_string(),
                l.normalizer_order.to_string(),
                l.normal_rank.to_string(),
                l.orbit_size.to_string(),
                l.quotient_dim.to_string(),
            ]
        })
        .collect();
    aligned(&["locus", "dim Z_R", "|N_F(R)|", "normal rank", "orbit", "dim exceptional"], &body)
}

fn coeffs_text(v: &[Value]) -> String {
    let parts: Vec<String> = v.iter().map(value_text).collect();
    format!("[{}]", parts.join(","))
}

fn blowdown_table(loci: &[LocusRow]) -> String {
    let body: Vec<Vec<String>> = loci
        .iter()
        .map(|l| {
            vec![
                l.subtorus.clone(),
                coeffs_text(&l.center_quotient),
                l.center_source.to_string(),
                coeffs_text(&l.exceptional_ih),
                l.correction_text.clone(),
            ]
        })
        .collect();
    aligned(&["locus", "center quotient", "source", "exceptional IH", "B_R"], &body)
}

pub fn blowup_table(d: &BlowupDoc) -> String {
    let mut out = semistable_table(&d.semistable);
    out.push('\n');
    if !d.loci.is_empty() {
        out.push_str(&blowup_loci_table(&d.loci, d.truncation_order));
        out.push('\n');
    }
    let _ = writeln!(out, "kirwan: {}", d.kirwan_text);
    out.push_str(&checks_table(&d.checks));
    out
}

pub fn intersection_table(d: &IntersectionDoc) -> String {
    let mut out = String::new();
    if !d.loci.is_empty() {
        out.push_str(&blowdown_table(&d.loci));
        out.push('\n');
    }
    let _ = writeln!(out, "intersection: {}", d.intersection_text);
    out.push_str(&checks_table(&d.checks));
    out
}

fn betti_table(b: &BettiTable) -> String {
    let row = |name: &str, v: &[Value]| {
        let mut r = vec![name.to_string()];
        r.extend(v.iter().map(value_text));
        r
    };
    let mut header = vec!["i".to_string()];
    header.extend(b.degrees.iter().map(u32::to_string));
    let hdr: Vec<&str> = header.iter().map(String::as_str).collect();
    aligned(&hdr, &[row("P_t(M^K)", &b.kirwan), row("IP_t(M)", &b.intersection)])
}

pub fn report_table(r: &FullReport) -> String {
    let s = &r.scenario;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "scenario: torus rank {}, |F| = {}, P^{}, {} weights, quotient dimension {}",
        s.torus_rank, s.finite_order, s.projective_dimension, s.weights, s.quotient_dimension
    );
    out.push('\n');
    out.push_str(&strata_table(&r.strata));
    out.push('\n');
    out.push_str(&semistable_table(&r.semistable));
    if !r.loci.is_empty() {
        out.push('\n');
        out.push_str(&loci_table(&r.loci));
        out.push('\n');
        out.push_str(&blowup_loci_table(&r.loci, r.semistable.truncation_order));
        out.push('\n');
        out.push_str(&blowdown_table(&r.loci));
    }
    out.push('\n');
    let _ = writeln!(out, "kirwan: {}", r.kirwan_text);
    let _ = writeln!(out, "intersection: {}", r.intersection_text);
    out.push('\n');
    out.push_str(&betti_table(&r.betti));
    out.push('\n');
    let pairs = |v: &[(u32, i64)]| v.iter().map(|(i, b)| format!("b{i}={b}")).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "ordinary betti of the quotient: {}", pairs(&r.ordinary.quotient));
    let _ = writeln!(out, "ordinary betti of the stable part: {}", pairs(&r.ordinary.stable));
    out.push('\n');
    out.push_str(&checks_table(&r.checks));
    out.push('\n');
    for a in &r.assumptions {
        let _ = writeln!(out, "assumes: {a}");
    }
    out
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().from_writer(Vec::new())
}

fn csv_finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 cells")
}

/// `degree,coefficient` rows of the nonzero terms.
pub fn series_csv(coeffs: &[Value]) -> String {
    let mut w = csv_writer();
    w.write_record(["degree", "coefficient"]).expect("in-memory writer");
    for (k, c) in coeffs.iter().enumerate() {
        if c != &Value::from(0) {
            w.write_record([k.to_string(), value_text(c)]).expect("in-memory writer");
        }
    }
    csv_finish(w)
}

pub fn strata_csv(rows: &[StratumRow]) -> String {
    let mut w = csv_writer();
    w.write_record(["beta", "norm2", "orbit", "weights", "n", "2d", "stabilizer_order", "stabilizer_series", "stratum_series"])
        .expect("in-memory writer");
    for r in rows {
        w.write_record([
            vector_text(&r.beta),
            r.norm2.clone(),
            r.orbit_size.to_string(),
            r.weights.iter().map(|x| vector_text(x)).collect::<Vec<_>>().join(" "),
            r.n_beta.to_string(),
            r.two_d.to_string(),
            r.stabilizer_order.to_string(),
            r.stabilizer_series.text.clone(),
            r.stratum_series.text.clone(),
        ])
        .expect("in-memory writer");
    }
    csv_finish(w)
}

/// `series,degree,coefficient` rows for every final polynomial.
pub fn report_csv(r: &FullReport) -> String {
    let mut w = csv_writer();
    w.write_record(["series", "degree", "coefficient"]).expect("in-memory writer");
    let mut emit = |name: &str, coeffs: &[Value]| {
        for (k, c) in coeffs.iter().enumerate() {
            if c != &Value::from(0) {
                w.write_record([name.to_string(), k.to_string(), value_text(c)]).expect("in-memory writer");
            }
        }
    };
    emit(&format!("semistable mod t^{}", r.semistable.truncation_order), &r.semistable.truncated);
    for l in &r.loci {
        emit(&format!("B {}", l.subtorus), &l.correction);
    }
    emit("kirwan", &r.kirwan);
    emit("intersection", &r.intersection);
    csv_finish(w)
}
