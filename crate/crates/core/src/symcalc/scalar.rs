use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::audit;
use super::chart::{Angle, Chart, Symbol, Var};
use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Power product of polynomial variables, sparse and sorted by variable.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(u16, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v.0, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0.iter().find(|(i, _)| *i == v.0).map(|(_, e)| *e).unwrap_or(0)
    }

    pub fn factors(&self) -> impl Iterator<Item = (Var, u32)> + '_ {
        self.0.iter().map(|&(i, e)| (Var(i), e))
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `∂/∂v` of the power product: `(exponent, reduced monomial)`.
    fn derivative(&self, v: Var) -> Option<(u32, Monomial)> {
        let pos = self.0.iter().position(|(i, _)| *i == v.0)?;
        let e = self.0[pos].1;
        let mut rest = self.0.clone();
        if e == 1 {
            rest.remove(pos);
        } else {
            rest[pos].1 = e - 1;
        }
        Some((e, Monomial(rest)))
    }

    fn without(&self, v: Var) -> Monomial {
        Monomial(self.0.iter().copied().filter(|(i, _)| *i != v.0).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Trig {
    Cos,
    Sin,
}

/// `cos(m·θ)` or `sin(m·θ)` for an integer frequency vector `m`.
///
/// Canonical: zero frequencies are dropped, the first nonzero frequency is
/// positive, and `sin` never has an empty frequency vector. The empty `cos`
/// harmonic is the constant 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Harmonic {
    kind: Trig,
    freq: Vec<(u16, i64)>,
}

type Freq = Vec<(u16, i64)>;

fn combine_freq(a: &[(u16, i64)], b: &[(u16, i64)], sign: i64) -> Freq {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i]);
            i += 1;
        } else if take_b {
            out.push((b[j].0, sign * b[j].1));
            j += 1;
        } else {
            let f = a[i].1 + sign * b[j].1;
            if f != 0 {
                out.push((a[i].0, f));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl Harmonic {
    pub fn one() -> Self {
        Harmonic {
            kind: Trig::Cos,
            freq: Vec::new(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.freq.is_empty()
    }

    pub fn kind(&self) -> Trig {
        self.kind
    }

    pub fn frequencies(&self) -> impl Iterator<Item = (Angle, i64)> + '_ {
        self.freq.iter().map(|&(a, m)| (Angle(a), m))
    }

    pub fn frequency(&self, a: Angle) -> i64 {
        self.freq.iter().find(|(i, _)| *i == a.0).map(|(_, m)| *m).unwrap_or(0)
    }

    /// Builds the canonical harmonic; returns the sign it absorbed, or
    /// `None` for `sin(0) = 0`.
    pub fn canonical(kind: Trig, mut freq: Freq) -> Option<(i64, Harmonic)> {
        freq.retain(|(_, m)| *m != 0);
        freq.sort_by_key(|(a, _)| *a);
        if freq.is_empty() {
            return match kind {
                Trig::Cos => Some((1, Harmonic::one())),
                Trig::Sin => None,
            };
        }
        let mut sign = 1;
        if freq[0].1 < 0 {
            for f in freq.iter_mut() {
                f.1 = -f.1;
            }
            if kind == Trig::Sin {
                sign = -1;
            }
        }
        Some((sign, Harmonic { kind, freq }))
    }

    /// Product-to-sum expansion of `self · other`.
    fn product(&self, other: &Harmonic) -> Vec<(Rational, Harmonic)> {
        if self.is_one() {
            return vec![(Rational::one(), other.clone())];
        }
        if other.is_one() {
            return vec![(Rational::one(), self.clone())];
        }
        let diff = combine_freq(&self.freq, &other.freq, -1);
        let sum = combine_freq(&self.freq, &other.freq, 1);
        let half = rat(1, 2);
        // (coefficient sign, kind, frequency) pairs
        let parts: [(i64, Trig, Freq); 2] = match (self.kind, other.kind) {
            (Trig::Cos, Trig::Cos) => [(1, Trig::Cos, diff), (1, Trig::Cos, sum)],
            (Trig::Sin, Trig::Sin) => [(1, Trig::Cos, diff), (-1, Trig::Cos, sum)],
            (Trig::Sin, Trig::Cos) => [(1, Trig::Sin, sum), (1, Trig::Sin, diff)],
            (Trig::Cos, Trig::Sin) => [(1, Trig::Sin, sum), (-1, Trig::Sin, diff)],
        };
        parts
            .into_iter()
            .filter_map(|(s, kind, freq)| Harmonic::canonical(kind, freq).map(|(sign, h)| (&half * int(s * sign), h)))
            .collect()
    }

    fn eval(&self, angles: &[f64]) -> f64 {
        let phase: f64 = self.freq.iter().map(|&(a, m)| m as f64 * angles[a as usize]).sum();
        match self.kind {
            Trig::Cos => phase.cos(),
            Trig::Sin => phase.sin(),
        }
    }

    fn render(&self, chart: &Chart) -> String {
        let mut arg = String::new();
        for (k, (a, m)) in self.frequencies().enumerate() {
            let name = chart.angle_name(a);
            if k > 0 {
                arg.push_str(if m < 0 { " - " } else { " + " });
            } else if m < 0 {
                arg.push('-');
            }
            let mag = m.abs();
            if mag == 1 {
                arg.push_str(name);
            } else {
                arg.push_str(&format!("{mag}*{name}"));
            }
        }
        match self.kind {
            Trig::Cos => format!("cos({arg})"),
            Trig::Sin => format!("sin({arg})"),
        }
    }
}

/// Exact scalar function on a chart: a finite sum of rational coefficient ×
/// power product of coordinates/parameters × harmonic in the angles.
///
/// The representation is canonical, so two scalars are equal exactly when
/// their term maps are equal; the zero scalar is the empty sum.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar {
    terms: BTreeMap<(Monomial, Harmonic), Rational>,
}

/// Result of `(1/2π)∫₀^{2π}∫₀^θ f(s) ds dθ`: `rational + π·pi_coefficient`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IteratedMean {
    pub rational: Scalar,
    pub pi_coefficient: Scalar,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut s = Scalar::zero();
        s.add_term(Monomial::one(), Harmonic::one(), c);
        s
    }

    pub fn int(n: i64) -> Self {
        Scalar::constant(int(n))
    }

    pub fn rat(n: i64, d: i64) -> Self {
        Scalar::constant(rat(n, d))
    }

    pub fn var(v: Var) -> Self {
        let mut s = Scalar::zero();
        s.add_term(Monomial::var(v), Harmonic::one(), Rational::one());
        s
    }

    /// `cos(Σ mᵢθᵢ)` / `sin(Σ mᵢθᵢ)`.
    pub fn trig(kind: Trig, freq: &[(Angle, i64)]) -> Self {
        let mut s = Scalar::zero();
        let f: Freq = freq.iter().map(|&(a, m)| (a.0, m)).collect();
        let mut merged: Freq = Vec::new();
        for (a, m) in f {
            merged = combine_freq(&merged, &[(a, m)], 1);
        }
        if let Some((sign, h)) = Harmonic::canonical(kind, merged) {
            s.add_term(Monomial::one(), h, int(sign));
        }
        s
    }

    pub fn cos(a: Angle, m: i64) -> Self {
        Scalar::trig(Trig::Cos, &[(a, m)])
    }

    pub fn sin(a: Angle, m: i64) -> Self {
        Scalar::trig(Trig::Sin, &[(a, m)])
    }

    fn add_term(&mut self, m: Monomial, h: Harmonic, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((m, h)) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Harmonic, &Rational)> {
        self.terms.iter().map(|((m, h), c)| (m, h, c))
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Exact zero test: true iff the canonical form is the empty sum.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let ((m, h), c) = self.terms.iter().next().unwrap();
                (m.is_one() && h.is_one()).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn depends_on_var(&self, v: Var) -> bool {
        self.terms.keys().any(|(m, _)| m.exponent(v) > 0)
    }

    pub fn depends_on_angle(&self, a: Angle) -> bool {
        self.terms.keys().any(|(_, h)| h.frequency(a) != 0)
    }

    pub fn depends_on_any_angle(&self) -> bool {
        self.terms.keys().any(|(_, h)| !h.is_one())
    }

    /// Degree in `v` (0 for the zero scalar).
    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|(m, _)| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact partial derivative with respect to a polynomial variable.
    pub fn partial(&self, v: Var) -> Scalar {
        let mut out = Scalar::zero();
        for ((m, h), c) in &self.terms {
            if let Some((e, rest)) = m.derivative(v) {
                out.add_term(rest, h.clone(), c * int(e as i64));
            }
        }
        out
    }

    /// Exact partial derivative with respect to a group angle.
    pub fn partial_angle(&self, a: Angle) -> Scalar {
        let mut out = Scalar::zero();
        for ((m, h), c) in &self.terms {
            let k = h.frequency(a);
            if k == 0 {
                continue;
            }
            let (kind, sign) = match h.kind {
                Trig::Cos => (Trig::Sin, -k),
                Trig::Sin => (Trig::Cos, k),
            };
            let (s2, h2) = Harmonic::canonical(kind, h.freq.clone()).expect("nonzero frequency");
            out.add_term(m.clone(), h2, c * int(sign * s2));
        }
        out
    }

    pub fn partial_symbol(&self, s: Symbol) -> Scalar {
        match s {
            Symbol::Var(v) => self.partial(v),
            Symbol::Angle(a) => self.partial_angle(a),
        }
    }

    /// Simultaneous substitution of variables, followed by normalization.
    pub fn substitute(&self, map: &BTreeMap<Var, Scalar>) -> Scalar {
        let mut out = Scalar::zero();
        let mut powers: BTreeMap<(u16, u32), Scalar> = BTreeMap::new();
        for ((m, h), c) in &self.terms {
            let mut kept = Monomial::one();
            let mut factor = Scalar::one();
            for (v, e) in m.factors() {
                match map.get(&v) {
                    Some(image) => {
                        let p = powers.entry((v.0, e)).or_insert_with(|| image.pow(e)).clone();
                        factor = &factor * &p;
                    }
                    None => kept = kept.mul(&Monomial(vec![(v.0, e)])),
                }
            }
            let mut base = Scalar::zero();
            base.add_term(kept, h.clone(), c.clone());
            out += &(&base * &factor);
        }
        out
    }

    /// Linear substitution of angles: `θ ↦ Σ kⱼ φⱼ` with integer `kⱼ`.
    pub fn substitute_angles(&self, map: &BTreeMap<Angle, Vec<(Angle, i64)>>) -> Scalar {
        let mut out = Scalar::zero();
        for ((m, h), c) in &self.terms {
            let mut freq: Freq = Vec::new();
            for (a, k) in h.frequencies() {
                match map.get(&a) {
                    Some(image) => {
                        for &(b, j) in image {
                            freq = combine_freq(&freq, &[(b.0, k * j)], 1);
                        }
                    }
                    None => freq = combine_freq(&freq, &[(a.0, k)], 1),
                }
            }
            if let Some((sign, h2)) = Harmonic::canonical(h.kind, freq) {
                out.add_term(m.clone(), h2, c * int(sign));
            }
        }
        out
    }

    /// Sets the angle `a` to zero.
    pub fn at_angle_zero(&self, a: Angle) -> Scalar {
        let mut map = BTreeMap::new();
        map.insert(a, Vec::new());
        self.substitute_angles(&map)
    }

    /// Exact Haar average over the circle factor `a`: the constant Fourier
    /// coefficient in `a`.
    pub fn average_over_angle(&self, a: Angle) -> Scalar {
        let mut out = Scalar::zero();
        for ((m, h), c) in &self.terms {
            if h.frequency(a) == 0 {
                out.add_term(m.clone(), h.clone(), c.clone());
            }
        }
        audit::record_mean(self, a, &out);
        out
    }

    /// `(1/2π)∫₀^{2π}∫₀^θ f(s) ds dθ` where `s` runs over the angle `a`.
    ///
    /// For a harmonic `cos(k s + c)` with `k ≠ 0` the value is `−sin(c)/k`,
    /// for `sin(k s + c)` it is `cos(c)/k`; terms constant in `a` integrate
    /// to `θ·f` and average to `π·f`, which is returned separately.
    pub fn iterated_mean(&self, a: Angle) -> IteratedMean {
        let mut rational = Scalar::zero();
        let mut pi_coefficient = Scalar::zero();
        for ((m, h), c) in &self.terms {
            let k = h.frequency(a);
            if k == 0 {
                pi_coefficient.add_term(m.clone(), h.clone(), c.clone());
                continue;
            }
            let rest: Freq = h.freq.iter().copied().filter(|(i, _)| *i != a.0).collect();
            let (kind, sign) = match h.kind {
                Trig::Cos => (Trig::Sin, -1),
                Trig::Sin => (Trig::Cos, 1),
            };
            if let Some((s2, h2)) = Harmonic::canonical(kind, rest) {
                rational.add_term(m.clone(), h2, c * rat(sign * s2, k));
            }
        }
        let result = IteratedMean {
            rational,
            pi_coefficient,
        };
        audit::record_iterated(self, a, &result);
        result
    }

    /// Exact `∫₀¹ f dt`.
    pub fn integrate_unit_interval(&self, t: Symbol, chart: &Chart) -> Result<Scalar> {
        match t {
            Symbol::Angle(a) => {
                if self.depends_on_angle(a) {
                    Err(Error::NonPolynomialIntegrand(chart.angle_name(a).to_string()))
                } else {
                    Ok(self.clone())
                }
            }
            Symbol::Var(v) => {
                let mut out = Scalar::zero();
                for ((m, h), c) in &self.terms {
                    let e = m.exponent(v);
                    out.add_term(m.without(v), h.clone(), c * rat(1, e as i64 + 1));
                }
                Ok(out)
            }
        }
    }

    /// Floating-point evaluation, for numerical cross-checks only.
    pub fn eval(&self, vars: &[f64], angles: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|((m, h), c)| {
                let mono: f64 = m.factors().map(|(v, e)| vars[v.0 as usize].powi(e as i32)).product();
                c.to_f64().unwrap_or(f64::NAN) * mono * h.eval(angles)
            })
            .sum()
    }

    pub fn render(&self, chart: &Chart) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, ((m, h), c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            for (v, e) in m.factors() {
                let name = chart.var_name(v);
                factors.push(if e == 1 {
                    name.to_string()
                } else {
                    format!("{name}^{e}")
                });
            }
            if !h.is_one() {
                factors.push(h.render(chart));
            }
            if factors.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&factors.join("*"));
            } else {
                out.push_str(&format!("{}*{}", mag, factors.join("*")));
            }
        }
        out
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, ((m, h), c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (v, e) in m.factors() {
                write!(f, "*v{}^{}", v.0, e)?;
            }
            if !h.is_one() {
                write!(f, "*{:?}{:?}", h.kind, h.freq)?;
            }
        }
        Ok(())
    }
}

impl From<Rational> for Scalar {
    fn from(c: Rational) -> Self {
        Scalar::constant(c)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for ((m, h), c) in &rhs.terms {
            self.add_term(m.clone(), h.clone(), c.clone());
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        for ((m, h), c) in &rhs.terms {
            self.add_term(m.clone(), h.clone(), -c.clone());
        }
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for ((m1, h1), c1) in &self.terms {
            for ((m2, h2), c2) in &rhs.terms {
                let m = m1.mul(m2);
                let c = c1 * c2;
                for (k, h) in h1.product(h2) {
                    out.add_term(m.clone(), h, &c * k);
                }
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        let mut acc = Scalar::zero();
        for s in iter {
            acc += &s;
        }
        acc
    }
}
