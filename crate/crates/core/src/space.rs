//! Basis algebra of the space with Schauder basis `f_n(z) = (a_n + b_n z) z^n`:
//! basis/Taylor conversions, monomial expansions and norms, the coefficient
//! and evaluation functionals, and dual coordinates.
//!
//! Functions are stored as `f_n`-coordinates, functionals as
//! `f_n^*`-coordinates. With that choice the Taylor coefficient functional
//! `k_n = a_n f_n^* + b_(n-1) f_(n-1)^*` has at most two nonzero entries.

use serde::{Deserialize, Serialize};

use crate::asymptotics::Term;
use crate::config::{Exponent, SpaceConfig};
use crate::error::{Error, Result};
use crate::poly::C;
use crate::sequences::{radius_of_disc, CertKind, LogC, SequenceTriple, TailCert, INDEX_CAP};
use crate::series::{sum_powers, SeriesValue, SumOptions};
use crate::summation::{lp_norm, ComplexNeumaier};

/// Relative half-width accepted for tails that only enter as bounds.
pub const BOUND_TOL: f64 = 1e-4;

fn zero() -> C {
    C::new(0.0, 0.0)
}

/// `ln |z^n|`, with `0^0 = 1`.
fn ln_pow(z: C, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * z.norm().ln()
    }
}

pub(crate) mod pairs {
    use super::C;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[C], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C>, D::Error> {
        Ok(Vec::<[f64; 2]>::deserialize(d)?.into_iter().map(|[a, b]| C::new(a, b)).collect())
    }
}

/// A function as finitely many `f_n`-coordinates plus an `l^p` bound on the rest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionVec {
    #[serde(with = "pairs")]
    pub coeffs: Vec<C>,
    pub tail_bound: f64,
}

impl FunctionVec {
    pub fn new(coeffs: Vec<C>) -> Self {
        FunctionVec { coeffs, tail_bound: 0.0 }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![zero(); n])
    }

    /// The basis vector `f_n` in a list of length `len`.
    pub fn unit(n: usize, len: usize) -> Self {
        let mut v = Self::zeros(len.max(n + 1));
        v.coeffs[n] = C::new(1.0, 0.0);
        v
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// A functional as finitely many `f_n^*`-coordinates plus an `l^q` tail bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualVec {
    #[serde(with = "pairs")]
    pub coeffs: Vec<C>,
    pub tail_bound: f64,
    pub cert: TailCert,
}

impl DualVec {
    /// Finitely supported functional; the tail is exactly zero.
    pub fn finite(coeffs: Vec<C>) -> Self {
        DualVec { coeffs, tail_bound: 0.0, cert: TailCert::certified(0.0, 0) }
    }

    pub fn unit(n: usize, len: usize) -> Self {
        let mut v = vec![zero(); len.max(n + 1)];
        v[n] = C::new(1.0, 0.0);
        Self::finite(v)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// A validated triple together with the space configuration.
#[derive(Clone, Debug)]
pub struct Space {
    pub triple: SequenceTriple,
    pub cfg: SpaceConfig,
    /// `b_n / a_(n+1)` in closed form, when the triple is in the DSL.
    ratio_term: Option<Term>,
}

impl Space {
    pub fn new(triple: SequenceTriple, cfg: SpaceConfig) -> Result<Self> {
        cfg.validate()?;
        triple.validate()?;
        let ratio_term = match (triple.b.term(), triple.a.term()) {
            (Some(b), Some(a)) => Some(b.div(&a.shift(1))),
            _ => None,
        };
        Ok(Space { triple, cfg, ratio_term })
    }

    pub fn with_config(&self, cfg: SpaceConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Space { cfg, ..self.clone() })
    }

    pub fn a(&self, n: usize) -> Result<C> {
        self.triple.a.eval(n)
    }

    pub fn b(&self, n: usize) -> Result<C> {
        self.triple.b.eval(n)
    }

    pub fn w(&self, n: usize) -> Result<C> {
        self.triple.w.eval(n)
    }

    /// Power of the primal norm (infinite for the sup-normed mode).
    pub fn p(&self) -> f64 {
        self.cfg.p.power()
    }

    pub fn q(&self) -> f64 {
        self.cfg.q()
    }

    pub fn sum_options(&self) -> SumOptions {
        SumOptions { tol: self.cfg.tol, min_terms: self.cfg.series_cap, max_terms: 1_000_000 }
    }

    /// Options for series that only feed upper bounds: a certified but
    /// loose tail is enough.
    pub fn bound_options(&self) -> SumOptions {
        SumOptions { tol: BOUND_TOL.max(self.cfg.tol), ..self.sum_options() }
    }

    /// `b_n / a_(n+1)`, through the closed form where it applies so that
    /// geometric factors cancel before they can underflow.
    pub fn step_ratio(&self, n: usize) -> Result<C> {
        match &self.ratio_term {
            Some(t) if n >= t.valid_from => Ok(t.eval(n)),
            _ => Ok(self.b(n)? / self.a(n + 1)?),
        }
    }

    pub fn ratio_term(&self) -> Option<&Term> {
        self.ratio_term.as_ref()
    }

    pub fn radius(&self) -> Result<(f64, TailCert)> {
        radius_of_disc(&self.triple.a, &self.triple.b)
    }

    /// `f_n(z) = (a_n + b_n z) z^n`.
    pub fn eval_basis_fn(&self, n: usize, z: C) -> Result<C> {
        let v = (self.a(n)? + self.b(n)? * z) * z.powi(n as i32);
        if v.is_finite() && (v != zero() || z == zero()) {
            return Ok(v);
        }
        // a_n or z^n under- or overflowed on its own
        let x = self.triple.a.eval_log(n)?;
        let y = self.triple.b.eval_log(n)?.mul(LogC::from_c(z));
        let m = x.ln.max(y.ln);
        if m == f64::NEG_INFINITY {
            return Ok(zero());
        }
        let sum = x.phase * (x.ln - m).exp() + y.phase * (y.ln - m).exp();
        Ok(sum * (m + ln_pow(z, n)).exp() * (z / z.norm()).powi(n as i32))
    }

    /// Taylor coefficients `c_0..c_N` of `sum lambda_n f_n`.
    pub fn coeffs_to_taylor(&self, f: &FunctionVec) -> Result<Vec<C>> {
        let n = f.len();
        let mut c = vec![zero(); n + 1];
        for (i, l) in f.coeffs.iter().enumerate() {
            c[i] += l * self.a(i)?;
            c[i + 1] += l * self.b(i)?;
        }
        Ok(c)
    }

    /// Forward substitution `lambda_n = (c_n - lambda_(n-1) b_(n-1)) / a_n`.
    pub fn taylor_to_coeffs(&self, c: &[C]) -> Result<FunctionVec> {
        let mut out: Vec<C> = Vec::with_capacity(c.len());
        for (n, cn) in c.iter().enumerate() {
            let prev = if n == 0 { zero() } else { out[n - 1] * self.b(n - 1)? };
            out.push((cn - prev) / self.a(n)?);
        }
        // a trailing c_N that closes the last basis function leaves a zero
        while out.len() > 1 && out.last() == Some(&zero()) {
            out.pop();
        }
        Ok(FunctionVec::new(out))
    }

    /// `z^n` in the basis: coefficient `(1/a_n)(-1)^j prod_(k<j) b_(n+k)/a_(n+k+1)`
    /// at position `n + j`, `j < count`, with a tail certificate for the
    /// `l^p` norm of the omitted coefficients.
    pub fn monomial_expansion(&self, n: usize, count: usize) -> Result<(FunctionVec, TailCert)> {
        let mut coeffs = vec![zero(); n + count];
        let mut cur = C::new(1.0, 0.0) / self.a(n)?;
        for j in 0..count {
            coeffs[n + j] = cur;
            cur = -cur * self.step_ratio(n + j)?;
        }
        let tail = self.monomial_series(n, count, self.bound_options())?;
        if tail.divergent {
            return Err(Error::TailNotCertifiable(format!("coefficients of z^{n} are not in l^p")));
        }
        let tail = tail.root(self.p());
        let cert = TailCert { kind: tail.cert, bound: tail.value + tail.tail_bound, from_index: n + count, ratio: None };
        Ok((FunctionVec { coeffs, tail_bound: cert.bound }, cert))
    }

    /// `sum_(j >= skip) |coeff_j|^p` of the expansion of `z^n` (sup in the c_0 mode).
    fn monomial_series(&self, n: usize, skip: usize, opts: SumOptions) -> Result<SeriesValue> {
        let s = self.p();
        let profile = self.ratio_term.as_ref().map(|t| t.shift(n + skip).profile());
        let mut ln = -self.a(n)?.norm().ln();
        for j in 0..skip {
            ln += self.step_ratio(n + j)?.norm().ln();
        }
        let max_terms = INDEX_CAP.saturating_sub(n + skip + 2);
        let opts = SumOptions { max_terms, ..opts };
        let mut acc = crate::summation::Neumaier::new();
        acc.add(ln);
        let mut last = 0usize;
        sum_powers(
            profile.as_ref(),
            |k| {
                while last < k {
                    acc.add(self.step_ratio(n + skip + last)?.norm().ln());
                    last += 1;
                }
                Ok(acc.value())
            },
            s,
            opts,
        )
    }

    /// `sum_(j >= 1) |prod_(m=n)^(n+j-1) b_m / a_(m+1)|^p` (sup in the c_0 mode),
    /// the part of `|a_n|^p ||z^n||^p` beyond the leading coefficient.
    pub fn ratio_power_sum(&self, n: usize, opts: SumOptions) -> Result<SeriesValue> {
        let profile = self.ratio_term.as_ref().map(|t| t.shift(n + 1).profile());
        let opts = SumOptions { max_terms: INDEX_CAP.saturating_sub(n + 2), ..opts };
        let mut acc = crate::summation::Neumaier::new();
        let mut next = 0usize;
        sum_powers(
            profile.as_ref(),
            |k| {
                while next <= k {
                    acc.add(self.step_ratio(n + next)?.norm().ln());
                    next += 1;
                }
                Ok(acc.value())
            },
            self.p(),
            opts,
        )
    }

    /// `||z^n||` with its certificate; infinite when the expansion leaves the space.
    pub fn monomial_norm(&self, n: usize) -> Result<(f64, SeriesValue)> {
        let sv = self.monomial_series(n, 0, self.sum_options())?;
        if sv.divergent {
            return Ok((f64::INFINITY, sv));
        }
        let r = sv.root(self.p());
        Ok((r.value, sv))
    }

    /// `k_n = a_n f_n^* + b_(n-1) f_(n-1)^*`, `k_0 = a_0 f_0^*`.
    pub fn coeff_functional_kn(&self, n: usize) -> Result<DualVec> {
        self.coeff_functional_kn_len(n, self.cfg.n.max(n + 1))
    }

    pub fn coeff_functional_kn_len(&self, n: usize, len: usize) -> Result<DualVec> {
        let mut v = vec![zero(); len.max(n + 1)];
        v[n] = self.a(n)?;
        if n > 0 {
            v[n - 1] = self.b(n - 1)?;
        }
        Ok(DualVec::finite(v))
    }

    /// Upper bound for `||k_n||`: `(|a_n|^q + |b_(n-1)|^q)^(1/q)`.
    pub fn kn_norm_bound(&self, n: usize) -> Result<f64> {
        let a = self.a(n)?.norm();
        if n == 0 {
            return Ok(a);
        }
        let b = self.b(n - 1)?.norm();
        let q = self.q();
        Ok(if q.is_infinite() {
            a.max(b)
        } else {
            (a.powf(q) + b.powf(q)).powf(1.0 / q)
        })
    }

    /// Coefficients of `f_n^*` over `k_0..k_n` (index `m` holds the coefficient of `k_m`).
    pub fn fstar_in_k_basis(&self, n: usize) -> Result<Vec<C>> {
        let mut out = vec![zero(); n + 1];
        let mut cur = C::new(1.0, 0.0) / self.a(n)?;
        out[n] = cur;
        for j in 1..=n {
            cur = -cur * self.b(n - j)? / self.a(n - j)?;
            out[n - j] = cur;
        }
        Ok(out)
    }

    /// The evaluation functional at `z` in dual coordinates `f_n(z)`, with a
    /// certified `l^q` tail; errors when the coordinates are not in `l^q`.
    pub fn ev_functional(&self, z: C) -> Result<DualVec> {
        let n = self.cfg.n;
        let coeffs = (0..n).map(|k| self.eval_basis_fn(k, z)).collect::<Result<Vec<_>>>()?;
        let tail = self.ev_tail(z, n)?;
        if tail.divergent {
            return Err(Error::NotInDual(format!("(f_n({z}))_n is not in l^{}", self.q())));
        }
        let bound = tail.upper();
        Ok(DualVec { coeffs, tail_bound: bound, cert: TailCert { kind: tail.cert, bound, from_index: n, ratio: None } })
    }

    /// `||(f_k(z))_(k >= start)||_q` as a certified value. When `a` and `b`
    /// have different geometric rates the two parts are bounded separately.
    /// `ln |f_n(z)|` without forming `a_n`, `b_n` or `z^n`.
    fn ln_basis_abs(&self, n: usize, z: C) -> Result<f64> {
        let x = self.triple.a.eval_log(n)?;
        let y = self.triple.b.eval_log(n)?.mul(LogC::from_c(z));
        let m = x.ln.max(y.ln);
        if m == f64::NEG_INFINITY {
            return Ok(m);
        }
        let sum = x.phase * (x.ln - m).exp() + y.phase * (y.ln - m).exp();
        Ok(m + sum.norm().ln() + ln_pow(z, n))
    }

    pub fn ev_tail(&self, z: C, start: usize) -> Result<SeriesValue> {
        let q = self.q();
        let (Some(ta), Some(tb)) = (self.triple.a.term(), self.triple.b.term()) else {
            let v = term_norm_tail(None, |k| self.eval_basis_fn(k, z), start, q, self.bound_options())?;
            return Ok(v);
        };
        let zn = Term::geometric(z);
        let tb = tb.scaled(z);
        match ta.add(&tb) {
            Some(t) => {
                let t = t.mul(&zn);
                term_ln_tail(Some(&t), |k| self.ln_basis_abs(k, z), start, q, self.bound_options())
            }
            None => {
                let (ta, tb) = (ta.mul(&zn), tb.mul(&zn));
                let la = |k: usize| Ok(self.triple.a.eval_log(k)?.ln + ln_pow(z, k));
                let lb = |k: usize| Ok(self.triple.b.eval_log(k)?.ln + ln_pow(z, k + 1));
                let va = term_ln_tail(Some(&ta), la, start, q, self.bound_options())?;
                let vb = term_ln_tail(Some(&tb), lb, start, q, self.bound_options())?;
                if va.divergent != vb.divergent {
                    // one part diverges, the other converges: so does the sum
                    return Ok(if va.divergent { va } else { vb });
                }
                // Minkowski: only an upper bound is available
                let up = va.upper() + vb.upper();
                Ok(SeriesValue {
                    value: up / 2.0,
                    partial: 0.0,
                    tail_estimate: up / 2.0,
                    tail_bound: up / 2.0,
                    terms: va.terms.max(vb.terms),
                    cert: va.cert.and(vb.cert),
                    divergent: va.divergent && vb.divergent,
                })
            }
        }
    }

    /// `sum u_n lambda_n` with a Hölder bound on the omitted products.
    pub fn dual_pairing(&self, u: &DualVec, f: &FunctionVec) -> (C, f64) {
        let m = u.len().min(f.len());
        let mut acc = ComplexNeumaier::new();
        for i in 0..m {
            acc.add(u.coeffs[i] * f.coeffs[i]);
        }
        let u_rest = lp_norm(&u.coeffs[m..], self.q()) + u.tail_bound;
        let f_rest = lp_norm(&f.coeffs[m..], self.p()) + f.tail_bound;
        let err = if u_rest == 0.0 || f_rest == 0.0 { 0.0 } else { u_rest * f_rest };
        (acc.value(), err)
    }

    /// Stored-part `l^p` norm and the tail bound.
    pub fn norm_function(&self, f: &FunctionVec) -> (f64, f64) {
        (lp_norm(&f.coeffs, self.p()), f.tail_bound)
    }

    /// Stored-part `l^q` norm and the tail bound.
    pub fn norm_dual(&self, u: &DualVec) -> (f64, f64) {
        (lp_norm(&u.coeffs, self.q()), u.tail_bound)
    }

    pub fn exponent(&self) -> Exponent {
        self.cfg.p
    }
}

/// `||(t_k)_(k >= start)||_s` for a closed-form term (sup when `s` is
/// infinite). `value` evaluates the production sequence for the explicit part.
pub fn term_norm_tail(term: Option<&Term>, value: impl Fn(usize) -> Result<C>, start: usize, s: f64, opts: SumOptions) -> Result<SeriesValue> {
    term_ln_tail(term, |k| Ok(value(k)?.norm().ln()), start, s, opts)
}

/// [`term_norm_tail`] from `ln |t_k|`, for terms that would under- or overflow.
pub fn term_ln_tail(term: Option<&Term>, ln_value: impl Fn(usize) -> Result<f64>, start: usize, s: f64, opts: SumOptions) -> Result<SeriesValue> {
    let profile = term.map(|t| t.shift(1).div(t).shift(start).profile());
    let opts = SumOptions { max_terms: opts.max_terms.min(INDEX_CAP.saturating_sub(start + 1)), ..opts };
    let sv = sum_powers(profile.as_ref(), |k| ln_value(start + k), s, opts)?;
    if sv.divergent {
        return Ok(sv);
    }
    Ok(sv.root(s))
}

/// Certification kind of a finite computation combined with a tail.
pub fn combined_kind(parts: &[CertKind]) -> CertKind {
    parts.iter().fold(CertKind::Certified, |acc, k| acc.and(*k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::SequenceExpr;

    fn c(x: f64) -> C {
        C::new(x, 0.0)
    }

    fn tridiag() -> Space {
        let one = SequenceExpr::constant(c(1.0));
        let b = SequenceExpr::real(1.0, &[-1.0, -1.0], &[2.0, 1.0]).unwrap();
        Space::new(SequenceTriple::new(one.clone(), b, one, "tri"), SpaceConfig::default()).unwrap()
    }

    fn chaos() -> Space {
        let a = SequenceExpr::real(0.5, &[2.0], &[0.0, 1.0]).unwrap().with_override(0, c(1.0));
        let b = SequenceExpr::real(0.25, &[1.0], &[1.0, 1.0]).unwrap().with_override(0, c(1.0));
        let w = SequenceExpr::constant(c(4.0)).with_override(0, c(1.0));
        Space::new(SequenceTriple::new(a, b, w, "chaos"), SpaceConfig::default()).unwrap()
    }

    #[test]
    fn basis_function_values() {
        let s = tridiag();
        assert!((s.eval_basis_fn(3, c(1.0)).unwrap() - c(0.2)).norm() < 1e-15);
        assert_eq!(s.eval_basis_fn(2, c(0.0)).unwrap(), c(0.0));
        assert_eq!(s.eval_basis_fn(0, c(0.0)).unwrap(), c(1.0));
    }

    #[test]
    fn taylor_round_trip_example() {
        let s = tridiag();
        let t = s.coeffs_to_taylor(&FunctionVec::new(vec![c(1.0), c(1.0), c(0.0)])).unwrap();
        assert!((t[0] - c(1.0)).norm() < 1e-15 && (t[1] - c(0.5)).norm() < 1e-15);
        assert!((t[2] + c(2.0 / 3.0)).norm() < 1e-15 && t[3] == c(0.0));
        let back = s.taylor_to_coeffs(&t[..3]).unwrap();
        assert!((back.coeffs[0] - c(1.0)).norm() < 1e-15 && (back.coeffs[1] - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn monomial_norms() {
        let s = tridiag();
        let (v, sv) = s.monomial_norm(0).unwrap();
        assert!(sv.is_certified());
        assert!((v * v - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-10);
        let (v, _) = s.monomial_norm(1).unwrap();
        let expect = 1.0 + 4.0 * (std::f64::consts::PI.powi(2) / 6.0 - 1.25);
        assert!((v * v - expect).abs() < 1e-10);
        let one = SequenceExpr::constant(c(1.0));
        let half = SequenceExpr::constant(c(0.5));
        let g = Space::new(SequenceTriple::new(one.clone(), half, one, "g"), SpaceConfig::default()).unwrap();
        assert!((g.monomial_norm(0).unwrap().0 - (4.0f64 / 3.0).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn monomial_expansion_coefficients() {
        let s = tridiag();
        let (f, cert) = s.monomial_expansion(0, 10).unwrap();
        for j in 0..10 {
            assert!((f.coeffs[j] - c(1.0 / (j as f64 + 1.0))).norm() < 1e-14);
        }
        assert!(cert.bound > 0.0);
        let ch = chaos();
        let (f, _) = ch.monomial_expansion(1, 6).unwrap();
        // b_k/a_(k+1) = 2^-k for k >= 1
        let mut expect = 1.0 / 1.0;
        for j in 0..6 {
            assert!((f.coeffs[1 + j] - c(expect)).norm() < 1e-14 * expect.abs().max(1e-300));
            expect *= -(0.5f64).powi(1 + j as i32);
        }
    }

    #[test]
    fn coefficient_functionals() {
        let s = tridiag();
        let k3 = s.coeff_functional_kn(3).unwrap();
        assert!((k3.coeffs[2] + c(0.75)).norm() < 1e-15 && k3.coeffs[3] == c(1.0));
        let ch = chaos();
        let k3 = ch.coeff_functional_kn(3).unwrap();
        assert!((k3.coeffs[2] - c(1.0 / 48.0)).norm() < 1e-16 && (k3.coeffs[3] - c(1.0 / 12.0)).norm() < 1e-16);
        assert!((s.kn_norm_bound(2).unwrap() - (1.0f64 + 4.0 / 9.0).sqrt()).abs() < 1e-15);
        let p1 = ch.with_config(SpaceConfig::with_p(1.0)).unwrap();
        assert_eq!(p1.kn_norm_bound(2).unwrap(), 0.25);
    }

    #[test]
    fn fstar_composes_to_unit_vector() {
        let s = tridiag();
        let f1 = s.fstar_in_k_basis(1).unwrap();
        assert!((f1[1] - c(1.0)).norm() < 1e-15 && (f1[0] - c(0.5)).norm() < 1e-15);
        let ch = chaos();
        for n in 0..6 {
            let coeffs = ch.fstar_in_k_basis(n).unwrap();
            let mut total = vec![c(0.0); n + 1];
            for (m, cm) in coeffs.iter().enumerate() {
                let k = ch.coeff_functional_kn_len(m, n + 1).unwrap();
                for i in 0..=n {
                    total[i] += cm * k.coeffs[i];
                }
            }
            for (i, t) in total.iter().enumerate() {
                let e = if i == n { 1.0 } else { 0.0 };
                assert!((t - c(e)).norm() < 1e-10, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn evaluation_functional() {
        let s = tridiag();
        let ev = s.ev_functional(c(1.0)).unwrap();
        assert!((ev.coeffs[0] - c(0.5)).norm() < 1e-15 && (ev.coeffs[2] - c(0.25)).norm() < 1e-15);
        let (stored, tail) = s.norm_dual(&ev);
        let total = (stored * stored + tail * tail).sqrt();
        // ||(1/(n+2))||_2 = sqrt(pi^2/6 - 1), tail bound is an upper bound
        assert!(total >= (std::f64::consts::PI.powi(2) / 6.0 - 1.0).sqrt() - 1e-12);
        let ev0 = s.ev_functional(c(0.0)).unwrap();
        assert_eq!(ev0.coeffs[0], c(1.0));
        assert!(ev0.coeffs[1..].iter().all(|x| *x == c(0.0)));
        let half = s.ev_functional(c(0.5)).unwrap();
        for n in 0..20 {
            let expect = (n as f64 + 3.0) / (2.0 * (n as f64 + 2.0)) * 0.5f64.powi(n as i32);
            assert!((half.coeffs[n] - c(expect)).norm() < 1e-15);
        }
        assert!(matches!(s.ev_functional(c(1.5)), Err(Error::NotInDual(_))));
    }

    #[test]
    fn pairing_identities() {
        let s = tridiag();
        let f = FunctionVec::new(vec![c(0.3), c(-1.0), c(2.0), c(0.5)]);
        let taylor = s.coeffs_to_taylor(&f).unwrap();
        for n in 0..4 {
            let (v, err) = s.dual_pairing(&s.coeff_functional_kn(n).unwrap(), &f);
            assert_eq!(err, 0.0);
            assert!((v - taylor[n]).norm() < 1e-14);
        }
        let (v, _) = s.dual_pairing(&DualVec::unit(2, 8), &FunctionVec::unit(2, 8));
        assert_eq!(v, c(1.0));
        let (v, _) = s.dual_pairing(&DualVec::unit(2, 8), &FunctionVec::unit(3, 8));
        assert_eq!(v, c(0.0));
        let z = c(0.4);
        let ev = s.ev_functional(z).unwrap();
        let (v, err) = s.dual_pairing(&ev, &f);
        let horner = taylor.iter().rev().fold(c(0.0), |acc, t| acc * z + t);
        assert!((v - horner).norm() <= err + 1e-14);
    }
}
