//! The defining sequences `a`, `b`, `w` in a closed-form DSL:
//! `r^n * P(n) / Q(n)` with finitely many overridden values.
//!
//! The DSL keeps every limsup, root test and eventual bound exact; see
//! [`crate::asymptotics`]. A callback mode exists for ad-hoc experiments and
//! only ever yields heuristic certificates.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::asymptotics::{Limit, Term};
use crate::error::{Error, Result};
use crate::poly::{Poly, C};
use crate::summation::Neumaier;

pub const DEGREE_CAP: usize = 8;
pub const INDEX_CAP: usize = 1_000_000;
/// Prefix scanned by heuristic (callback) analyses.
pub const HEURISTIC_SCAN: usize = 10_000;
/// Window after `N0` in which certified eventual bounds are re-checked.
const CONFIRM_WINDOW: usize = 1_000;

type Callback = Arc<dyn Fn(usize) -> C + Send + Sync>;

#[derive(Clone)]
pub struct SequenceExpr {
    pub base_ratio: C,
    pub numerator: Poly,
    pub denominator: Poly,
    pub overrides: BTreeMap<usize, C>,
    pub description: String,
    callback: Option<Callback>,
}

impl fmt::Debug for SequenceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SequenceExpr")
            .field("base_ratio", &self.base_ratio)
            .field("numerator", &self.numerator.coeffs)
            .field("denominator", &self.denominator.coeffs)
            .field("overrides", &self.overrides)
            .field("description", &self.description)
            .field("callback", &self.callback.is_some())
            .finish()
    }
}

impl PartialEq for SequenceExpr {
    fn eq(&self, o: &Self) -> bool {
        self.callback.is_none()
            && o.callback.is_none()
            && self.base_ratio == o.base_ratio
            && self.numerator == o.numerator
            && self.denominator == o.denominator
            && self.overrides == o.overrides
    }
}

fn re(x: f64) -> C {
    C::new(x, 0.0)
}

impl SequenceExpr {
    pub fn new(base_ratio: C, numerator: Vec<C>, denominator: Vec<C>) -> Result<Self> {
        let numerator = Poly::new(numerator);
        let denominator = Poly::new(denominator);
        for p in [&numerator, &denominator] {
            if p.degree() > DEGREE_CAP {
                return Err(Error::DegreeTooLarge(p.degree()));
            }
        }
        if denominator.is_zero() {
            return Err(Error::ZeroDenominator(0));
        }
        Ok(SequenceExpr {
            base_ratio,
            numerator,
            denominator,
            overrides: BTreeMap::new(),
            description: String::new(),
            callback: None,
        })
    }

    /// Real-coefficient convenience constructor.
    pub fn real(r: f64, p: &[f64], q: &[f64]) -> Result<Self> {
        Self::new(re(r), p.iter().map(|x| re(*x)).collect(), q.iter().map(|x| re(*x)).collect())
    }

    pub fn constant(v: C) -> Self {
        Self::new(re(1.0), vec![v], vec![re(1.0)]).expect("constant is valid")
    }

    pub fn geometric(r: C) -> Self {
        Self::new(r, vec![re(1.0)], vec![re(1.0)]).expect("geometric is valid")
    }

    /// Ad-hoc sequence from a callback; analyses on it are heuristic.
    pub fn custom(f: impl Fn(usize) -> C + Send + Sync + 'static, description: &str) -> Self {
        SequenceExpr {
            base_ratio: re(1.0),
            numerator: Poly::one(),
            denominator: Poly::one(),
            overrides: BTreeMap::new(),
            description: description.to_string(),
            callback: Some(Arc::new(f)),
        }
    }

    pub fn with_override(mut self, n: usize, v: C) -> Self {
        self.overrides.insert(n, v);
        self
    }

    pub fn describe(mut self, text: &str) -> Self {
        self.description = text.to_string();
        self
    }

    pub fn is_custom(&self) -> bool {
        self.callback.is_some()
    }

    /// Value at `n`: the override if present, else the closed form.
    pub fn eval(&self, n: usize) -> Result<C> {
        if n > INDEX_CAP {
            return Err(Error::IndexTooLarge { index: n, cap: INDEX_CAP });
        }
        if let Some(v) = self.overrides.get(&n) {
            return Ok(*v);
        }
        if let Some(f) = &self.callback {
            return Ok(f(n));
        }
        let x = n as f64;
        let q = self.denominator.eval(x);
        if q == re(0.0) {
            return Err(Error::ZeroDenominator(n));
        }
        Ok(self.base_ratio.powi(n as i32) * self.numerator.eval(x) / q)
    }

    /// `(ln |s_n|, s_n / |s_n|)`, computed without forming `r^n`, so that
    /// geometric factors cannot under- or overflow.
    pub fn eval_log(&self, n: usize) -> Result<LogC> {
        if n > INDEX_CAP {
            return Err(Error::IndexTooLarge { index: n, cap: INDEX_CAP });
        }
        if self.overrides.contains_key(&n) || self.callback.is_some() {
            return Ok(LogC::from_c(self.eval(n)?));
        }
        let x = n as f64;
        let q = self.denominator.eval(x);
        if q == re(0.0) {
            return Err(Error::ZeroDenominator(n));
        }
        let p = self.numerator.eval(x);
        let r = self.base_ratio;
        if r == re(0.0) {
            return Ok(LogC::from_c(if n == 0 { p / q } else { re(0.0) }));
        }
        let ln = x * r.norm().ln() + p.norm().ln() - q.norm().ln();
        let phase = (r / r.norm()).powi(n as i32) * unit(p) / unit(q);
        Ok(LogC { ln, phase })
    }

    /// Signed-index entry point; rejects negative indices.
    pub fn eval_signed(&self, n: i64) -> Result<C> {
        if n < 0 {
            return Err(Error::IndexNegative(n));
        }
        self.eval(n as usize)
    }

    /// Closed form valid past the last override; `None` in callback mode.
    pub fn term(&self) -> Option<Term> {
        if self.callback.is_some() {
            return None;
        }
        let valid_from = self.overrides.keys().next_back().map_or(0, |k| k + 1);
        Some(Term {
            scale: re(1.0),
            ratio: self.base_ratio,
            num: self.numerator.clone(),
            den: self.denominator.clone(),
            valid_from,
        })
    }

    /// Proves `s_n != 0` (and `Q(n) != 0`) for every `n >= 0`: the polynomials
    /// have no integer roots beyond their Cauchy bound, and the finitely many
    /// indices below it are evaluated. Callback sequences are scanned instead.
    pub fn check_nonvanishing(&self, name: &'static str) -> Result<()> {
        for (n, v) in &self.overrides {
            if *v == re(0.0) {
                return Err(Error::ZeroTerm { name, index: *n });
            }
        }
        if let Some(f) = &self.callback {
            for n in 0..=HEURISTIC_SCAN {
                if !self.overrides.contains_key(&n) && f(n) == re(0.0) {
                    return Err(Error::ZeroTerm { name, index: n });
                }
            }
            return Ok(());
        }
        let first_free = |from: usize| (from..).find(|n| !self.overrides.contains_key(n)).unwrap_or(from);
        if self.numerator.is_zero() {
            return Err(Error::ZeroTerm { name, index: first_free(0) });
        }
        if self.base_ratio == re(0.0) {
            // 0^0 = 1, every later power vanishes
            return Err(Error::ZeroTerm { name, index: first_free(1) });
        }
        let limit = |p: &Poly| if p.degree() == 0 { 0 } else { p.root_bound().ceil() as usize };
        for n in 0..=limit(&self.denominator).max(limit(&self.numerator)) {
            if self.overrides.contains_key(&n) {
                continue;
            }
            let x = n as f64;
            let scale: f64 = self.denominator.coeffs.iter().enumerate().map(|(i, c)| c.norm() * x.powi(i as i32)).sum();
            if self.denominator.eval(x).norm() <= 1e-14 * scale {
                return Err(Error::ZeroDenominator(n));
            }
            let scale: f64 = self.numerator.coeffs.iter().enumerate().map(|(i, c)| c.norm() * x.powi(i as i32)).sum();
            if self.numerator.eval(x).norm() <= 1e-14 * scale {
                return Err(Error::ZeroTerm { name, index: n });
            }
        }
        Ok(())
    }
}

fn unit(z: C) -> C {
    if z == re(0.0) {
        re(0.0)
    } else {
        z / z.norm()
    }
}

/// A complex number as `exp(ln) * phase` with `|phase| = 1` (or zero).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogC {
    pub ln: f64,
    pub phase: C,
}

impl LogC {
    pub const ONE: LogC = LogC { ln: 0.0, phase: C { re: 1.0, im: 0.0 } };

    pub fn from_c(z: C) -> Self {
        LogC { ln: z.norm().ln(), phase: unit(z) }
    }

    pub fn to_c(self) -> C {
        self.phase * self.ln.exp()
    }

    pub fn abs(self) -> f64 {
        self.ln.exp()
    }

    pub fn is_zero(self) -> bool {
        self.phase == re(0.0)
    }

    pub fn mul(self, o: LogC) -> LogC {
        LogC { ln: self.ln + o.ln, phase: self.phase * o.phase }
    }

    pub fn div(self, o: LogC) -> LogC {
        LogC { ln: self.ln - o.ln, phase: self.phase * o.phase.conj() }
    }
}

#[derive(Serialize, Deserialize)]
struct RawExpr {
    r: [f64; 2],
    #[serde(rename = "P")]
    p: Vec<[f64; 2]>,
    #[serde(rename = "Q")]
    q: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    overrides: BTreeMap<String, [f64; 2]>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    description: String,
}

fn pair(c: &C) -> [f64; 2] {
    [c.re, c.im]
}

impl Serialize for SequenceExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.callback.is_some() {
            return Err(serde::ser::Error::custom("callback sequences cannot be serialized"));
        }
        RawExpr {
            r: pair(&self.base_ratio),
            p: self.numerator.coeffs.iter().map(pair).collect(),
            q: self.denominator.coeffs.iter().map(pair).collect(),
            overrides: self.overrides.iter().map(|(k, v)| (k.to_string(), pair(v))).collect(),
            description: self.description.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SequenceExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawExpr::deserialize(d)?;
        let cvec = |v: &[[f64; 2]]| v.iter().map(|[a, b]| C::new(*a, *b)).collect::<Vec<_>>();
        let mut e = SequenceExpr::new(C::new(raw.r[0], raw.r[1]), cvec(&raw.p), cvec(&raw.q)).map_err(D::Error::custom)?;
        for (k, [a, b]) in raw.overrides {
            let n: usize = k.parse().map_err(|_| D::Error::custom(format!("override index `{k}` is not a nonnegative integer")))?;
            e.overrides.insert(n, C::new(a, b));
        }
        e.description = raw.description;
        Ok(e)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceTriple {
    pub a: SequenceExpr,
    pub b: SequenceExpr,
    pub w: SequenceExpr,
    #[serde(default)]
    pub label: String,
}

impl SequenceTriple {
    pub fn new(a: SequenceExpr, b: SequenceExpr, w: SequenceExpr, label: &str) -> Self {
        SequenceTriple { a, b, w, label: label.to_string() }
    }

    /// `a_n, b_n, w_n != 0` for all `n`.
    pub fn validate(&self) -> Result<()> {
        self.a.check_nonvanishing("a")?;
        self.b.check_nonvanishing("b")?;
        self.w.check_nonvanishing("w").map_err(|e| match e {
            Error::ZeroTerm { index, .. } => Error::ZeroWeight(index),
            other => other,
        })
    }

    pub fn is_dsl(&self) -> bool {
        !(self.a.is_custom() || self.b.is_custom() || self.w.is_custom())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CertKind {
    Certified,
    Heuristic,
}

impl CertKind {
    pub fn and(self, o: CertKind) -> CertKind {
        if self == CertKind::Certified && o == CertKind::Certified {
            CertKind::Certified
        } else {
            CertKind::Heuristic
        }
    }
}

/// Eventual bound `|s_n| <= bound` for `n >= from_index`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailCert {
    pub kind: CertKind,
    pub bound: f64,
    pub from_index: usize,
    /// Present when the bound is a contraction ratio below one.
    pub ratio: Option<f64>,
}

impl TailCert {
    pub fn certified(bound: f64, from_index: usize) -> Self {
        TailCert { kind: CertKind::Certified, bound, from_index, ratio: (bound < 1.0).then_some(bound) }
    }

    pub fn heuristic(bound: f64, from_index: usize) -> Self {
        TailCert { kind: CertKind::Heuristic, bound, from_index, ratio: (bound < 1.0).then_some(bound) }
    }

    pub fn is_certified(&self) -> bool {
        self.kind == CertKind::Certified
    }
}

/// Eventual bound strictly above a limit `l`.
pub(crate) fn margin_above(l: f64) -> f64 {
    if l == 0.0 {
        0.5
    } else {
        l * 1.01
    }
}

/// `limsup |num_n / den_(n+shift)|` with an eventual bound.
pub fn ratio_limsup(num: &SequenceExpr, den: &SequenceExpr, shift: usize) -> Result<(f64, TailCert)> {
    let value = |n: usize| -> Result<f64> { Ok((num.eval(n)? / den.eval(n + shift)?).norm()) };
    match (num.term(), den.term()) {
        (Some(tn), Some(td)) => {
            let t = tn.div(&td.shift(shift));
            certified_limsup(&t, value)
        }
        _ => heuristic_limsup(value),
    }
}

/// Limsup of `|t_n|` for a closed-form term, with the eventual bound re-checked
/// on a window past `N0` against the production evaluation `value`.
pub fn certified_limsup(t: &Term, value: impl Fn(usize) -> Result<f64>) -> Result<(f64, TailCert)> {
    let p = t.profile();
    let l = match p.limit() {
        Limit::Infinite => return Ok((f64::INFINITY, TailCert::certified(f64::INFINITY, 0))),
        Limit::Finite(l) => l,
    };
    let theta = margin_above(l);
    let Some(n0) = p.eventual_upper(theta, 1usize << 40) else {
        return Err(Error::TailNotCertifiable(format!("no eventual bound {theta} found")));
    };
    for n in n0..(n0 + CONFIRM_WINDOW).min(INDEX_CAP) {
        let v = value(n)?;
        if v > theta * (1.0 + 1e-12) {
            return Err(Error::CertMismatch(format!("|s_{n}| = {v} exceeds eventual bound {theta}")));
        }
    }
    Ok((l, TailCert::certified(theta, n0)))
}

pub(crate) fn heuristic_limsup(value: impl Fn(usize) -> Result<f64>) -> Result<(f64, TailCert)> {
    let from = HEURISTIC_SCAN / 2;
    let mut sup: f64 = 0.0;
    for n in from..=HEURISTIC_SCAN {
        sup = sup.max(value(n)?);
    }
    Ok((sup, TailCert::heuristic(margin_above(sup), from)))
}

/// `R = 1 / limsup (|a_n| + |b_n|)^(1/n)`; polynomial factors drop out of the root test.
pub fn radius_of_disc(a: &SequenceExpr, b: &SequenceExpr) -> Result<(f64, TailCert)> {
    if !a.is_custom() && !b.is_custom() {
        let m = a.base_ratio.norm().max(b.base_ratio.norm());
        let r = if m == 0.0 { f64::INFINITY } else { 1.0 / m };
        return Ok((r, TailCert::certified(m, 0)));
    }
    let n = HEURISTIC_SCAN;
    let s = a.eval(n)?.norm() + b.eval(n)?.norm();
    let root = s.ln() / n as f64;
    if !root.is_finite() && root > 0.0 || root.is_nan() {
        return Err(Error::DegenerateSpace);
    }
    let m = root.exp();
    Ok((if m == 0.0 { f64::INFINITY } else { 1.0 / m }, TailCert::heuristic(m, n)))
}

/// `prod_{k<count} w_(start+k)` as log-magnitude and unit phase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightProduct {
    pub log_magnitude: f64,
    pub phase: C,
}

impl WeightProduct {
    pub fn magnitude(&self) -> f64 {
        self.log_magnitude.exp()
    }

    pub fn value(&self) -> C {
        self.phase * self.magnitude()
    }
}

pub fn product_weights(w: &SequenceExpr, start: usize, count: usize) -> Result<WeightProduct> {
    let mut log = Neumaier::new();
    let mut phase = re(1.0);
    for k in start..start + count {
        let v = w.eval(k)?;
        if v == re(0.0) {
            return Err(Error::ZeroWeight(k));
        }
        log.add(v.norm().ln());
        phase *= v / v.norm();
        phase /= phase.norm();
    }
    Ok(WeightProduct { log_magnitude: log.value(), phase })
}

/// Prefix table `L[m] = sum_{k<m} ln|w_k|` for repeated product queries.
#[derive(Clone, Debug)]
pub struct LogWeightTable {
    prefix: Vec<f64>,
}

impl LogWeightTable {
    pub fn new(w: &SequenceExpr, len: usize) -> Result<Self> {
        let mut prefix = Vec::with_capacity(len + 1);
        let mut acc = Neumaier::new();
        prefix.push(0.0);
        for k in 0..len {
            let v = w.eval(k)?;
            if v == re(0.0) {
                return Err(Error::ZeroWeight(k));
            }
            acc.add(v.norm().ln());
            prefix.push(acc.value());
        }
        Ok(LogWeightTable { prefix })
    }

    pub fn len(&self) -> usize {
        self.prefix.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `ln prod_{k=start}^{start+count-1} |w_k|`.
    pub fn log_product(&self, start: usize, count: usize) -> f64 {
        self.prefix[start + count] - self.prefix[start]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chaos_a() -> SequenceExpr {
        SequenceExpr::real(0.5, &[2.0], &[0.0, 1.0]).unwrap().with_override(0, re(1.0))
    }

    fn chaos_b() -> SequenceExpr {
        SequenceExpr::real(0.25, &[1.0], &[1.0, 1.0]).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert!((chaos_a().eval(2).unwrap() - re(0.25)).norm() < 1e-16);
        let tri = SequenceExpr::real(1.0, &[-1.0, -1.0], &[2.0, 1.0]).unwrap();
        assert_eq!(tri.eval(0).unwrap(), re(-0.5));
        assert_eq!(chaos_a().eval(0).unwrap(), re(1.0));
    }

    #[test]
    fn eval_errors() {
        let s = SequenceExpr::real(1.0, &[1.0], &[-3.0, 1.0]).unwrap();
        assert_eq!(s.eval(3), Err(Error::ZeroDenominator(3)));
        assert_eq!(s.eval_signed(-1), Err(Error::IndexNegative(-1)));
        assert!(matches!(s.eval(INDEX_CAP + 1), Err(Error::IndexTooLarge { .. })));
        assert_eq!(SequenceExpr::real(1.0, &[1.0; 10], &[1.0]).unwrap_err(), Error::DegreeTooLarge(9));
    }

    #[test]
    fn nonvanishing_proof() {
        assert!(chaos_a().check_nonvanishing("a").is_ok());
        // P(n) = n - 5 vanishes at 5
        let s = SequenceExpr::real(1.0, &[-5.0, 1.0], &[1.0]).unwrap();
        assert_eq!(s.check_nonvanishing("a"), Err(Error::ZeroTerm { name: "a", index: 5 }));
        assert!(s.with_override(5, re(1.0)).check_nonvanishing("a").is_ok());
    }

    #[test]
    fn ratio_limsup_examples() {
        let (l, cert) = ratio_limsup(&chaos_b(), &chaos_a(), 1).unwrap();
        assert_eq!(l, 0.0);
        assert!(cert.is_certified());
        let tri = SequenceExpr::real(1.0, &[-1.0, -1.0], &[2.0, 1.0]).unwrap();
        let one = SequenceExpr::constant(re(1.0));
        let (l, cert) = ratio_limsup(&tri, &one, 1).unwrap();
        assert!((l - 1.0).abs() < 1e-15);
        assert!(cert.is_certified());
        let (l, _) = ratio_limsup(&tri, &tri, 0).unwrap();
        assert!((l - 1.0).abs() < 1e-15);
    }

    #[test]
    fn radius_examples() {
        assert_eq!(radius_of_disc(&chaos_a(), &chaos_b()).unwrap().0, 2.0);
        let tri = SequenceExpr::real(1.0, &[-1.0, -1.0], &[2.0, 1.0]).unwrap();
        assert_eq!(radius_of_disc(&SequenceExpr::constant(re(1.0)), &tri).unwrap().0, 1.0);
        let one = SequenceExpr::constant(re(1.0));
        assert_eq!(radius_of_disc(&one, &one).unwrap().0, 1.0);
    }

    #[test]
    fn weight_products() {
        let w = SequenceExpr::constant(re(4.0)).with_override(0, re(1.0));
        assert!((product_weights(&w, 0, 5).unwrap().magnitude() - 256.0).abs() < 1e-10);
        assert_eq!(product_weights(&w, 3, 0).unwrap().log_magnitude, 0.0);
        let two = SequenceExpr::constant(re(2.0));
        assert!((product_weights(&two, 0, 10).unwrap().magnitude() - 1024.0).abs() < 1e-9);
        let z = SequenceExpr::constant(re(2.0)).with_override(4, re(0.0));
        assert_eq!(product_weights(&z, 0, 10), Err(Error::ZeroWeight(4)));
    }

    #[test]
    fn log_evaluation_survives_underflow() {
        let a = chaos_a();
        let l = a.eval_log(3000).unwrap();
        // a_n = 2^(1-n)/n
        let expect = (1.0 - 3000.0) * 2f64.ln() - 3000f64.ln();
        assert!((l.ln - expect).abs() < 1e-10);
        assert_eq!(a.eval(3000).unwrap(), re(0.0));
        let z = SequenceExpr::new(C::new(0.0, 1.0), vec![re(-2.0)], vec![re(1.0)]).unwrap();
        assert!((z.eval_log(3).unwrap().to_c() - z.eval(3).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn json_round_trip() {
        let s = chaos_a().describe("a_n");
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"overrides\":{\"0\":[1.0,0.0]}"));
        let back: SequenceExpr = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"r":[1,0],"P":[[1,0],[1,0],[1,0],[1,0],[1,0],[1,0],[1,0],[1,0],[1,0],[1,0]],"Q":[[1,0]]}"#;
        assert!(serde_json::from_str::<SequenceExpr>(bad).is_err());
    }

    #[test]
    fn custom_sequences_are_heuristic() {
        let s = SequenceExpr::custom(|n| re(1.0 / (n as f64 + 1.0)), "1/(n+1)");
        let one = SequenceExpr::constant(re(1.0));
        let (_, cert) = ratio_limsup(&s, &one, 0).unwrap();
        assert_eq!(cert.kind, CertKind::Heuristic);
        assert!(serde_json::to_string(&s).is_err());
    }
}
