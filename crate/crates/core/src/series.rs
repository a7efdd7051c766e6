//! Exact series in one variable `t`, stored as a polynomial numerator over
//! a product of factors `(1 - t^d)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polynomial {
    coeffs: BTreeMap<u32, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, rat(1))
    }

    pub fn monomial(degree: u32, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(degree, c);
        p
    }

    /// Dense integer coefficients, index = degree.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        let mut p = Self::zero();
        for (k, &c) in coeffs.iter().enumerate() {
            p.add_term(k as u32, rat(c));
        }
        p
    }

    /// `Σ c_k t^k` from `(degree, coefficient)` pairs; repeated degrees add up.
    pub fn from_terms<I: IntoIterator<Item = (u32, i64)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (k, c) in terms {
            p.add_term(k, rat(c));
        }
        p
    }

    pub fn add_term(&mut self, degree: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(degree).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&degree);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, degree: u32) -> Rational {
        self.coeffs.get(&degree).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rational)> + '_ {
        self.coeffs.iter().map(|(&k, c)| (k, c))
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.coeffs.keys().next().copied()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for (&k, v) in &self.coeffs {
            out.add_term(k, v * c);
        }
        out
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: u32) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&d, c)| (d + k, c.clone())).collect(),
        }
    }

    /// Substitute `t -> t^k`.
    pub fn substitute_power(&self, k: u32) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&d, c)| (d * k, c.clone())).collect(),
        }
    }

    /// Keep the terms of degree `< order`.
    pub fn truncated(&self, order: u32) -> Self {
        Self {
            coeffs: self.coeffs.range(..order).map(|(&d, c)| (d, c.clone())).collect(),
        }
    }

    /// Long division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        let lead_deg = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coefficient(lead_deg);
        let mut rem = self.clone();
        let mut quot = Polynomial::zero();
        while let Some(d) = rem.degree() {
            if d < lead_deg {
                break;
            }
            let c = rem.coefficient(d) / &lead;
            let step = Polynomial::monomial(d - lead_deg, c.clone());
            rem -= &(&step * divisor);
            quot.add_term(d - lead_deg, c);
        }
        (quot, rem)
    }

    pub fn div_exact(&self, divisor: &Polynomial) -> Result<Polynomial> {
        let (q, r) = self.div_rem(divisor);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::NotPolynomial)
        }
    }

    pub fn divides(&self, other: &Polynomial) -> bool {
        other.div_rem(self).1.is_zero()
    }

    pub fn is_palindromic(&self, top: u32) -> bool {
        if self.degree().is_some_and(|d| d > top) {
            return false;
        }
        (0..=top).all(|k| self.coefficient(k) == self.coefficient(top - k))
    }

    pub fn has_odd_terms(&self) -> bool {
        self.coeffs.keys().any(|k| k % 2 == 1)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.values().all(|c| !c.is_negative())
    }

    /// Dense `i64` coefficients from degree 0 up to the degree, or `None` if a
    /// coefficient is fractional or out of range.
    pub fn integer_coefficients(&self) -> Option<Vec<i64>> {
        let Some(top) = self.degree() else {
            return Some(Vec::new());
        };
        let mut out = vec![0i64; top as usize + 1];
        for (&k, c) in &self.coeffs {
            if !c.is_integer() {
                return None;
            }
            out[k as usize] = c.to_integer().to_i64()?;
        }
        Some(out)
    }

    pub fn to_latex(&self) -> String {
        render(self, |k| format!("t^{{{k}}}"))
    }
}

/// `Σ_{k=lo..=hi} t^{2k}`.
pub fn geometric_range(lo: u32, hi: u32) -> Result<Polynomial> {
    if lo == 0 || lo > hi {
        return Err(Error::EmptyRange { lo, hi });
    }
    Ok(Polynomial::from_terms((lo..=hi).map(|k| (2 * k, 1))))
}

/// Poincaré polynomial of `P^dim`.
pub fn projective_space(dim: u32) -> Polynomial {
    Polynomial::from_terms((0..=dim).map(|k| (2 * k, 1)))
}

/// `∏ (1 - t^d)` expanded.
pub fn denominator_polynomial(exponents: &[u32]) -> Polynomial {
    exponents.iter().fold(Polynomial::one(), |acc, &d| {
        &acc * &Polynomial::from_terms([(0, 1), (d, -1)])
    })
}

fn render(p: &Polynomial, power: impl Fn(u32) -> String) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (&k, c)) in p.coeffs.iter().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = match k {
            0 => String::new(),
            1 => "t".into(),
            _ => power(k),
        };
        if mono.is_empty() {
            out.push_str(&format!("{mag}"));
        } else if mag.is_one() {
            out.push_str(&mono);
        } else if mag.is_integer() {
            out.push_str(&format!("{mag}{mono}"));
        } else {
            out.push_str(&format!("({mag}){mono}"));
        }
    }
    out
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self, |k| format!("t^{k}")))
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (&a, x) in &self.coeffs {
            for (&b, y) in &rhs.coeffs {
                out.add_term(a + b, x * y);
            }
        }
        out
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        for (&k, c) in &rhs.coeffs {
            self.add_term(k, c.clone());
        }
    }
}

impl SubAssign<&Polynomial> for Polynomial {
    fn sub_assign(&mut self, rhs: &Polynomial) {
        for (&k, c) in &rhs.coeffs {
            self.add_term(k, -c.clone());
        }
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&rat(-1))
    }
}

macro_rules! forward_owned {
    ($ty:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a $ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: &$ty) -> $ty { (&self).$m(rhs) }
        }
    )*};
}

forward_owned!(Polynomial, Add add, Sub sub, Mul mul);

/// `numerator / ∏ (1 - t^d)` over the multiset of `denominator` exponents.
#[derive(Clone, Debug)]
pub struct RationalSeries {
    numerator: Polynomial,
    denominator: Vec<u32>,
}

impl RationalSeries {
    pub fn new(numerator: Polynomial, mut denominator: Vec<u32>) -> Result<Self> {
        if denominator.contains(&0) {
            return Err(Error::ZeroDenominatorExponent);
        }
        denominator.sort_unstable();
        Ok(Self { numerator, denominator })
    }

    pub fn polynomial(p: Polynomial) -> Self {
        Self { numerator: p, denominator: Vec::new() }
    }

    pub fn zero() -> Self {
        Self::polynomial(Polynomial::zero())
    }

    pub fn one() -> Self {
        Self::polynomial(Polynomial::one())
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &[u32] {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self { numerator: self.numerator.scale(c), denominator: self.denominator.clone() }
    }

    pub fn shift(&self, k: u32) -> Self {
        Self { numerator: self.numerator.shift(k), denominator: self.denominator.clone() }
    }

    pub fn mul_polynomial(&self, p: &Polynomial) -> Self {
        Self { numerator: &self.numerator * p, denominator: self.denominator.clone() }
    }

    /// Power-series coefficients of degree `< order`.
    pub fn truncate(&self, order: u32) -> Polynomial {
        let n = order as usize;
        let mut c = vec![Rational::zero(); n];
        for (k, v) in self.numerator.terms() {
            if (k as usize) < n {
                c[k as usize] = v.clone();
            }
        }
        for &d in &self.denominator {
            let d = d as usize;
            for k in d..n {
                let prev = c[k - d].clone();
                c[k] += prev;
            }
        }
        let mut out = Polynomial::zero();
        for (k, v) in c.into_iter().enumerate() {
            out.add_term(k as u32, v);
        }
        out
    }

    pub fn exact_polynomial(&self) -> Result<Polynomial> {
        let mut p = self.numerator.clone();
        for &d in &self.denominator {
            p = p.div_exact(&denominator_polynomial(&[d]))?;
        }
        Ok(p)
    }

    /// `self / other` when the quotient is a polynomial.
    pub fn divide_exact(&self, other: &RationalSeries) -> Result<Polynomial> {
        let (a, b) = cancel_common(&self.denominator, &other.denominator);
        let num = &self.numerator * &denominator_polynomial(&b);
        let den = &other.numerator * &denominator_polynomial(&a);
        if den.is_zero() {
            return Err(Error::NotPolynomial);
        }
        num.div_exact(&den)
    }

    /// Cancel cyclotomic factors shared by numerator and denominator, then
    /// rebuild the denominator from the largest `(1 - t^m)` factors available.
    pub fn reduced(&self) -> Self {
        if self.numerator.is_zero() {
            return Self::zero();
        }
        let mut count: BTreeMap<u32, u32> = BTreeMap::new();
        for &d in &self.denominator {
            for k in divisors(d) {
                *count.entry(k).or_default() += 1;
            }
        }
        let mut num = self.numerator.clone();
        for (&k, n) in count.iter_mut() {
            let c = cyclotomic_factor(k);
            while *n > 0 {
                let (q, r) = num.div_rem(&c);
                if !r.is_zero() {
                    break;
                }
                num = q;
                *n -= 1;
            }
        }
        let mut den = Vec::new();
        while let Some(m) = count.iter().rev().find(|(_, &n)| n > 0).map(|(&k, _)| k) {
            for j in divisors(m) {
                match count.get_mut(&j) {
                    Some(n) if *n > 0 => *n -= 1,
                    _ => num = &num * &cyclotomic_factor(j),
                }
            }
            den.push(m);
        }
        den.sort_unstable();
        Self { numerator: num, denominator: den }
    }

    fn over_common(&self, other: &Self) -> (Polynomial, Polynomial, Vec<u32>) {
        let (a_only, b_only) = cancel_common(&self.denominator, &other.denominator);
        let mut den = self.denominator.clone();
        den.extend_from_slice(&b_only);
        den.sort_unstable();
        let a = &self.numerator * &denominator_polynomial(&b_only);
        let b = &other.numerator * &denominator_polynomial(&a_only);
        (a, b, den)
    }

    pub fn to_latex(&self) -> String {
        if self.denominator.is_empty() {
            return self.numerator.to_latex();
        }
        let den: String = group_factors(&self.denominator)
            .into_iter()
            .map(|(d, n)| {
                if n == 1 {
                    format!("(1-t^{{{d}}})")
                } else {
                    format!("(1-t^{{{d}}})^{{{n}}}")
                }
            })
            .collect();
        format!("\\frac{{{}}}{{{den}}}", self.numerator.to_latex())
    }
}

/// Multiset differences `a \ b` and `b \ a`.
fn cancel_common(a: &[u32], b: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let mut rest_b: Vec<u32> = b.to_vec();
    let mut only_a = Vec::new();
    for &d in a {
        if let Some(pos) = rest_b.iter().position(|&x| x == d) {
            rest_b.swap_remove(pos);
        } else {
            only_a.push(d);
        }
    }
    rest_b.sort_unstable();
    (only_a, rest_b)
}

fn group_factors(den: &[u32]) -> Vec<(u32, usize)> {
    let mut out: Vec<(u32, usize)> = Vec::new();
    for &d in den {
        match out.last_mut() {
            Some((x, n)) if *x == d => *n += 1,
            _ => out.push((d, 1)),
        }
    }
    out
}

fn divisors(n: u32) -> impl Iterator<Item = u32> {
    (1..=n).filter(move |k| n.is_multiple_of(*k))
}

/// `1 - t` for `k = 1`, the cyclotomic polynomial `Φ_k` otherwise, so that
/// `1 - t^d` is the product over all divisors of `d`.
fn cyclotomic_factor(k: u32) -> Polynomial {
    let mut p = Polynomial::from_terms([(0, 1), (k, -1)]);
    for j in divisors(k).filter(|&j| j < k) {
        p = p.div_exact(&cyclotomic_factor(j)).expect("cyclotomic division is exact");
    }
    p
}

impl PartialEq for RationalSeries {
    fn eq(&self, other: &Self) -> bool {
        let (a, b, _) = self.over_common(other);
        a == b
    }
}

impl Eq for RationalSeries {}

impl From<Polynomial> for RationalSeries {
    fn from(p: Polynomial) -> Self {
        Self::polynomial(p)
    }
}

impl<'a> Add<&'a RationalSeries> for &'a RationalSeries {
    type Output = RationalSeries;
    fn add(self, rhs: &RationalSeries) -> RationalSeries {
        let (a, b, den) = self.over_common(rhs);
        RationalSeries { numerator: &a + &b, denominator: den }
    }
}

impl<'a> Sub<&'a RationalSeries> for &'a RationalSeries {
    type Output = RationalSeries;
    fn sub(self, rhs: &RationalSeries) -> RationalSeries {
        let (a, b, den) = self.over_common(rhs);
        RationalSeries { numerator: &a - &b, denominator: den }
    }
}

impl<'a> Mul<&'a RationalSeries> for &'a RationalSeries {
    type Output = RationalSeries;
    fn mul(self, rhs: &RationalSeries) -> RationalSeries {
        let mut den = self.denominator.clone();
        den.extend_from_slice(&rhs.denominator);
        den.sort_unstable();
        RationalSeries { numerator: &self.numerator * &rhs.numerator, denominator: den }
    }
}

impl Neg for &RationalSeries {
    type Output = RationalSeries;
    fn neg(self) -> RationalSeries {
        self.scale(&rat(-1))
    }
}

impl AddAssign<&RationalSeries> for RationalSeries {
    fn add_assign(&mut self, rhs: &RationalSeries) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&RationalSeries> for RationalSeries {
    fn sub_assign(&mut self, rhs: &RationalSeries) {
        *self = &*self - rhs;
    }
}

forward_owned!(RationalSeries, Add add, Sub sub, Mul mul);

impl fmt::Display for RationalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator.is_empty() {
            return write!(f, "{}", self.numerator);
        }
        if self.numerator.terms().count() > 1 {
            write!(f, "({})", self.numerator)?;
        } else {
            write!(f, "{}", self.numerator)?;
        }
        f.write_str("/")?;
        let groups = group_factors(&self.denominator);
        let wrap = groups.len() > 1;
        if wrap {
            f.write_str("(")?;
        }
        for (d, n) in groups {
            write!(f, "(1 - t^{d})")?;
            if n > 1 {
                write!(f, "^{n}")?;
            }
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }
}
