//! Certified infinite sums `sum_k t_k^s` (or `sup_k t_k`) of nonnegative
//! terms: an explicit compensated partial sum, then an analytic tail from
//! [`crate::asymptotics`] once it applies and is tight enough.

use serde::Serialize;

use crate::asymptotics::{power_tail, sup_tail, Profile, TailSum};
use crate::error::Result;
use crate::sequences::{CertKind, TailCert};
use crate::summation::Neumaier;

#[derive(Clone, Copy, Debug)]
pub struct SumOptions {
    /// Relative target for the tail half-width.
    pub tol: f64,
    /// Explicit terms always taken.
    pub min_terms: usize,
    /// Explicit terms never exceeded.
    pub max_terms: usize,
}

impl Default for SumOptions {
    fn default() -> Self {
        SumOptions { tol: 1e-12, min_terms: 16, max_terms: 1_000_000 }
    }
}

/// `value = partial + tail_estimate`, `|true - value| <= tail_bound` when certified.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub partial: f64,
    pub tail_estimate: f64,
    pub tail_bound: f64,
    pub terms: usize,
    pub cert: CertKind,
    pub divergent: bool,
}

impl SeriesValue {
    pub fn exact(v: f64, terms: usize) -> Self {
        SeriesValue { value: v, partial: v, tail_estimate: 0.0, tail_bound: 0.0, terms, cert: CertKind::Certified, divergent: false }
    }

    fn divergent(partial: f64, terms: usize, cert: CertKind) -> Self {
        SeriesValue {
            value: f64::INFINITY,
            partial,
            tail_estimate: f64::INFINITY,
            tail_bound: f64::INFINITY,
            terms,
            cert,
            divergent: true,
        }
    }

    pub fn tail_cert(&self) -> TailCert {
        TailCert { kind: self.cert, bound: self.tail_bound, from_index: self.terms, ratio: None }
    }

    pub fn is_certified(&self) -> bool {
        self.cert == CertKind::Certified
    }

    /// Upper bound for the sum (value plus tail bound).
    pub fn upper(&self) -> f64 {
        self.value + self.tail_bound
    }

    /// `(.)^(1/s)` applied to value and bound, for norms from power sums.
    pub fn root(&self, s: f64) -> SeriesValue {
        if s.is_infinite() || s == 1.0 {
            return *self;
        }
        let r = |x: f64| x.max(0.0).powf(1.0 / s);
        let value = r(self.value);
        let bound = (r(self.value + self.tail_bound) - value).max(value - r((self.value - self.tail_bound).max(0.0)));
        SeriesValue {
            value,
            partial: r(self.partial),
            tail_estimate: value - r(self.partial),
            tail_bound: bound,
            ..*self
        }
    }
}

/// Sums `t_k^s` for `k >= 0` (or takes `sup t_k` when `s` is infinite).
///
/// `ln_term(k)` returns `ln t_k` and is called for `k = 0, 1, 2, ...` in
/// order, so it may keep running products. `step` is the modulus profile of
/// `t_(k+1) / t_k` as a function of `k`.
pub fn sum_powers(step: Option<&Profile>, mut ln_term: impl FnMut(usize) -> Result<f64>, s: f64, opts: SumOptions) -> Result<SeriesValue> {
    let sup = s.is_infinite();
    let mut acc = Neumaier::new();
    let mut best: f64 = 0.0;
    let mut next_check = opts.min_terms.max(1);
    let mut prev_ln = f64::NEG_INFINITY;
    let mut k = 0usize;
    loop {
        let ln_t = ln_term(k)?;
        if ln_t == f64::NEG_INFINITY && k > 0 && step.is_some_and(|p| p.zero) {
            let v = if sup { best } else { acc.value() };
            return Ok(SeriesValue::exact(v, k));
        }
        let at_check = (k >= next_check && ln_t > f64::NEG_INFINITY) || k >= opts.max_terms;
        if at_check {
            let t = ln_t.exp();
            let partial = if sup { best } else { acc.value() };
            let verdict = match step {
                Some(p) if sup => sup_tail(p, k, t),
                Some(p) => power_tail(p, k, t, s),
                None => TailSum::Unknown,
            };
            match verdict {
                TailSum::Diverges => return Ok(SeriesValue::divergent(partial, k, CertKind::Certified)),
                TailSum::Converges { estimate, halfwidth } if halfwidth.is_finite() => {
                    let (value, est) = if sup { (best.max(estimate), best.max(estimate) - best) } else { (partial + estimate, estimate) };
                    if halfwidth <= opts.tol * value.abs().max(f64::MIN_POSITIVE) || k >= opts.max_terms {
                        return Ok(SeriesValue {
                            value,
                            partial,
                            tail_estimate: est,
                            tail_bound: halfwidth,
                            terms: k,
                            cert: CertKind::Certified,
                            divergent: false,
                        });
                    }
                }
                TailSum::Converges { .. } | TailSum::Advance(_) | TailSum::Unknown => {}
            }
            if k >= opts.max_terms {
                return Ok(heuristic_finish(partial, ln_t, prev_ln, k, s));
            }
            next_check = (k + k / 2).max(k + 1);
        }
        if sup {
            best = best.max(ln_t.exp());
        } else {
            acc.add((s * ln_t).exp());
        }
        prev_ln = ln_t;
        k += 1;
    }
}

/// Geometric extrapolation from the last two terms, flagged heuristic.
fn heuristic_finish(partial: f64, ln_t: f64, prev_ln: f64, k: usize, s: f64) -> SeriesValue {
    let rho = (ln_t - prev_ln).exp();
    let t = ln_t.exp();
    if s.is_infinite() {
        return if rho <= 1.0 {
            SeriesValue { value: partial.max(t), partial, tail_estimate: 0.0, tail_bound: 0.0, terms: k, cert: CertKind::Heuristic, divergent: false }
        } else {
            SeriesValue::divergent(partial, k, CertKind::Heuristic)
        };
    }
    if !(rho < 1.0) {
        return SeriesValue::divergent(partial, k, CertKind::Heuristic);
    }
    let ts = t.powf(s);
    let tail = ts / (1.0 - rho.powf(s));
    SeriesValue { value: partial + tail, partial, tail_estimate: tail, tail_bound: tail, terms: k, cert: CertKind::Heuristic, divergent: false }
}
