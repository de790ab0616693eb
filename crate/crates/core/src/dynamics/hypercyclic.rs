//! Hypercyclicity and mixing of `F_w^*`: the sufficient `liminf` condition,
//! the necessary growth of `||w_0...w_(n-1) z^n||`, the equivalence under
//! `(sup, limsup)`, and the `||k_n||` criteria.

use serde::Serialize;

use super::{log_add, product_trend, reflexive_guard, scan, step_over_weight, sum_trend, Trend, NU_MAX, N_MAX};
use crate::asymptotics::UNIT_TOL;
use crate::error::{Error, Result};
use crate::operator::check_sup_limsup;
use crate::report::{Conclusion, CriterionReport, Quantity, Verdict};
use crate::sequences::{ratio_limsup, CertKind, LogWeightTable};
use crate::space::Space;

/// `liminf` gives hypercyclicity, `lim` gives mixing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Liminf,
    Lim,
}

/// Numerical threshold below which a scanned quantity counts as vanishing.
const VANISHING: f64 = 1e-10;

/// `ln q(nu, n)`, `q = (|a_(nu+n)| + |b_(nu+n-1)|) / prod_(k<n) |w_(nu+k)|`.
pub fn ln_q(space: &Space, table: &LogWeightTable, nu: usize, n: usize) -> Result<f64> {
    let t = &space.triple;
    let la = t.a.eval_log(nu + n)?.ln;
    let lb = if nu + n >= 1 { t.b.eval_log(nu + n - 1)?.ln } else { f64::NEG_INFINITY };
    Ok(log_add(la, lb) - table.log_product(nu, n))
}

struct Rows {
    /// Per `nu`: minimum over `n in [n_max/2, n_max]`.
    window_min: Vec<f64>,
    /// Per `nu`: value at `n_max`.
    last: Vec<f64>,
}

fn scan_rows(nu_range: std::ops::RangeInclusive<usize>, mut ln: impl FnMut(usize, usize) -> Result<f64>) -> Result<Rows> {
    let mut rows = Rows { window_min: Vec::new(), last: Vec::new() };
    for nu in nu_range {
        let mut m = f64::INFINITY;
        for n in N_MAX / 2..=N_MAX {
            m = m.min(ln(nu, n)?);
        }
        rows.window_min.push(m.exp());
        rows.last.push(ln(nu, N_MAX)?.exp());
    }
    Ok(rows)
}

fn limit_quantity(trend: Trend, estimate: f64) -> Quantity {
    match trend {
        Trend::Zero => Quantity::certified(0.0),
        Trend::Infinity => Quantity::certified(f64::INFINITY),
        Trend::Positive => Quantity::new(estimate, CertKind::Heuristic),
        Trend::Unknown => Quantity::heuristic(estimate),
    }
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

fn trend_name(t: Trend) -> &'static str {
    match t {
        Trend::Zero => "tends to 0",
        Trend::Infinity => "tends to infinity",
        Trend::Positive => "has a positive finite limit",
        Trend::Unknown => "has undetermined behavior",
    }
}

/// `liminf_n q(nu, n) = 0` for every `nu` (or `lim` in mixing mode): sufficient
/// for `F_w^*` to be hypercyclic (mixing).
pub fn hypercyclic_sufficient(space: &Space, mode: Mode) -> Result<CriterionReport> {
    let id = match mode {
        Mode::Liminf => "hypercyclic_sufficient",
        Mode::Lim => "mixing_sufficient",
    };
    if let Some(r) = reflexive_guard(space, id) {
        return Ok(r);
    }
    let t = &space.triple;
    let table = LogWeightTable::new(&t.w, NU_MAX + N_MAX + 1)?;
    let rows = scan_rows(0..=NU_MAX, |nu, n| ln_q(space, &table, nu, n))?;
    let trend = match (step_over_weight(&t.a, &t.w, 0), step_over_weight(&t.b, &t.w, 1)) {
        (Some(ta), Some(tb)) => sum_trend(&[product_trend(&ta), product_trend(&tb)]),
        _ => Trend::Unknown,
    };
    let (goal, what) = match mode {
        Mode::Liminf => (Conclusion::Hypercyclic, "hypercyclic"),
        Mode::Lim => (Conclusion::Mixing, "mixing"),
    };
    let (verdict, conclusion, implication) = match trend {
        Trend::Zero => (Verdict::HoldsCertified, goal, format!("sufficient condition holds for every nu, so F_w^* is {what}")),
        Trend::Infinity | Trend::Positive => (
            Verdict::FailsNumeric,
            Conclusion::NoConclusion,
            "sufficient condition not met; no conclusion".to_string(),
        ),
        Trend::Unknown => (
            Verdict::Inconclusive,
            Conclusion::NoConclusion,
            format!("scan only (nu <= {NU_MAX}, n <= {N_MAX}); the condition is sufficient only"),
        ),
    };
    let window = max_of(&rows.window_min);
    let mut r = CriterionReport::new(id, verdict, conclusion, implication)
        .quantity("limit", limit_quantity(trend, rows.last[0]))
        .quantity("liminf_estimate_max_over_nu", Quantity::heuristic(window))
        .quantity("q_nu0_at_nmax", Quantity::heuristic(rows.last[0]))
        .scan(scan(space, NU_MAX, N_MAX))
        .note(format!("q(nu, n) {} as n -> infinity", trend_name(trend)));
    if trend == Trend::Unknown && window < VANISHING {
        r = r.note("every scanned row falls below 1e-10");
    }
    Ok(r)
}

/// Necessary condition: if `F_w^*` is hypercyclic and `1` lies in the space,
/// then `sup_n ||w_0...w_(n-1) z^n|| = infinity`. A finite supremum therefore
/// rules hypercyclicity out.
pub fn hypercyclic_necessary(space: &Space) -> Result<CriterionReport> {
    let id = "hypercyclic_necessary";
    if let Some(r) = reflexive_guard(space, id) {
        return Ok(r);
    }
    let (n0, _) = space.monomial_norm(0)?;
    if !n0.is_finite() {
        return Err(Error::PolynomialNotInSpace("the constant 1 is not in the space".into()));
    }
    let t = &space.triple;
    let table = LogWeightTable::new(&t.w, N_MAX + 1)?;
    let points: Vec<usize> = (0..=128).chain([256, 512]).collect();
    let mut values = Vec::with_capacity(points.len());
    let mut cert = CertKind::Certified;
    for &n in &points {
        let (norm, sv) = space.monomial_norm(n)?;
        cert = cert.and(sv.cert);
        values.push((table.log_product(0, n) + norm.ln()).exp());
    }
    let sup_scan = max_of(&values);
    let alpha_trend = step_over_weight(&t.a, &t.w, 0).map(|g| product_trend(&g.recip())).unwrap_or(Trend::Unknown);
    let contracting = match ratio_limsup(&t.b, &t.a, 1) {
        Ok((l, c)) => c.is_certified() && l < 1.0 - UNIT_TOL,
        Err(_) => false,
    };
    let last = *values.last().unwrap();
    let mut r;
    if contracting && matches!(alpha_trend, Trend::Zero | Trend::Positive) {
        r = CriterionReport::new(
            id,
            Verdict::FailsNumeric,
            Conclusion::NotHypercyclic,
            "sup_n ||w_0...w_(n-1) z^n|| is finite, so the necessary condition fails and F_w^* is not hypercyclic",
        )
        .quantity("sup_finite", Quantity::certified(1.0));
    } else {
        let note = match alpha_trend {
            Trend::Infinity => "the necessary condition holds (the sequence is unbounded); it is necessary only, so no conclusion",
            _ => "the sequence was scanned but its supremum is not decided; no conclusion",
        };
        r = CriterionReport::new(id, Verdict::Inconclusive, Conclusion::NoConclusion, note);
    }
    r = r
        .quantity("sup_scan", Quantity::new(sup_scan, CertKind::Heuristic))
        .quantity("value_at_512", Quantity::new(last, cert))
        .quantity("growth_128_to_512", Quantity::heuristic(last / values[128]))
        .scan(scan(space, 0, N_MAX));
    Ok(r)
}

/// Under `(sup, limsup)`: `F_w^*` is hypercyclic iff
/// `liminf_n |a_(nu+n) / prod_(k<n) w_(nu+k)| = 0` for every `nu >= 1`.
pub fn hypercyclic_iff(space: &Space) -> Result<CriterionReport> {
    let id = "hypercyclic_iff";
    if let Some(r) = reflexive_guard(space, id) {
        return Ok(r);
    }
    let pre = check_sup_limsup(space)?;
    if !pre.verdict.holds() {
        let mut r = CriterionReport::precondition_not_met(id, "the equivalence needs sup |w_n a_n / a_(n+1)| < inf and limsup |b_n / a_(n+1)| < 1");
        for (k, q) in &pre.quantities {
            r = r.quantity(k, *q);
        }
        return Ok(r);
    }
    let t = &space.triple;
    let table = LogWeightTable::new(&t.w, NU_MAX + N_MAX + 1)?;
    let rows = scan_rows(1..=NU_MAX, |nu, n| Ok(t.a.eval_log(nu + n)?.ln - table.log_product(nu, n)))?;
    let trend = step_over_weight(&t.a, &t.w, 0).map(|g| product_trend(&g)).unwrap_or(Trend::Unknown);
    let pre_cert = pre.verdict == Verdict::HoldsCertified;
    let (verdict, conclusion, implication) = match trend {
        Trend::Zero => (
            if pre_cert { Verdict::HoldsCertified } else { Verdict::HoldsNumeric },
            Conclusion::Hypercyclic,
            "the equivalent condition holds for every nu, so F_w^* is hypercyclic",
        ),
        Trend::Infinity | Trend::Positive => (
            Verdict::FailsNumeric,
            Conclusion::NotHypercyclic,
            "the equivalent condition fails, so F_w^* is not hypercyclic",
        ),
        Trend::Unknown => (Verdict::Inconclusive, Conclusion::NoConclusion, "scan only; the limit is not decided"),
    };
    let mut r = CriterionReport::new(id, verdict, conclusion, implication)
        .quantity("limit", limit_quantity(trend, rows.last[0]))
        .quantity("liminf_estimate_max_over_nu", Quantity::heuristic(max_of(&rows.window_min)))
        .scan(scan(space, NU_MAX, N_MAX));
    for (nu, v) in rows.window_min.iter().enumerate().take(4) {
        r = r.quantity(&format!("liminf_estimate_nu{}", nu + 1), Quantity::heuristic(*v));
    }
    Ok(r)
}

/// `inf_n ||k_n|| / |w_0...w_(n-1)| = 0` gives hypercyclicity, `lim = 0`
/// gives mixing; computed with the upper bound for `||k_n||`.
pub fn generic_kn_criteria(space: &Space) -> Result<CriterionReport> {
    let id = "generic_kn";
    let t = &space.triple;
    let table = LogWeightTable::new(&t.w, N_MAX + 1)?;
    let mut inf = f64::INFINITY;
    let mut last = 0.0;
    for n in 0..=N_MAX {
        let v = (space.kn_norm_bound(n)?.ln() - table.log_product(0, n)).exp();
        inf = inf.min(v);
        last = v;
    }
    let trend = match (step_over_weight(&t.a, &t.w, 0), step_over_weight(&t.b, &t.w, 1)) {
        (Some(ta), Some(tb)) => sum_trend(&[product_trend(&ta), product_trend(&tb)]),
        _ => Trend::Unknown,
    };
    let (verdict, conclusion, implication) = match trend {
        Trend::Zero => (Verdict::HoldsCertified, Conclusion::Mixing, "the ratio tends to 0, so F_w^* is mixing (and hypercyclic)"),
        Trend::Infinity | Trend::Positive => (
            Verdict::FailsNumeric,
            Conclusion::NoConclusion,
            "the ratio is bounded away from 0; these sufficient conditions are not met",
        ),
        Trend::Unknown if inf < VANISHING => (Verdict::HoldsNumeric, Conclusion::NoConclusion, "scanned ratios vanish numerically; sufficient condition only"),
        Trend::Unknown => (Verdict::Inconclusive, Conclusion::NoConclusion, "scan only"),
    };
    Ok(CriterionReport::new(id, verdict, conclusion, implication)
        .quantity("limit", limit_quantity(trend, last))
        .quantity("inf_scan", Quantity::heuristic(inf))
        .scan(scan(space, 0, N_MAX)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SpaceConfig;
    use crate::poly::C;
    use crate::presets;
    use crate::sequences::{SequenceExpr, SequenceTriple};

    fn sp(t: SequenceTriple) -> Space {
        Space::new(t, SpaceConfig::default()).unwrap()
    }

    #[test]
    fn sufficient_examples() {
        let hc = sp(presets::hypercyclic());
        for m in [Mode::Liminf, Mode::Lim] {
            let r = hypercyclic_sufficient(&hc, m).unwrap();
            assert_eq!(r.verdict, Verdict::HoldsCertified);
        }
        let r = hypercyclic_sufficient(&sp(presets::tridiag(C::new(1.0, 0.0)).unwrap()), Mode::Liminf).unwrap();
        assert_eq!(r.verdict, Verdict::FailsNumeric);
        assert!((r.get("limit").unwrap() - 2.0).abs() < 1e-2);
        let mut cfg = SpaceConfig::with_p(1.0);
        cfg.n = 64;
        let r = hypercyclic_sufficient(&Space::new(presets::hypercyclic(), cfg).unwrap(), Mode::Lim).unwrap();
        assert_eq!(r.conclusion, Conclusion::Unsupported);
    }

    #[test]
    fn necessary_examples() {
        let r = hypercyclic_necessary(&sp(presets::decay())).unwrap();
        assert_eq!(r.conclusion, Conclusion::NotHypercyclic);
        let r = hypercyclic_necessary(&sp(presets::hypercyclic())).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        let r = hypercyclic_necessary(&sp(presets::tridiag(C::new(1.0, 0.0)).unwrap())).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.get("growth_128_to_512").unwrap() > 1.5);
    }

    #[test]
    fn iff_examples() {
        assert_eq!(hypercyclic_iff(&sp(presets::hypercyclic())).unwrap().conclusion, Conclusion::Hypercyclic);
        assert_eq!(hypercyclic_iff(&sp(presets::decay())).unwrap().conclusion, Conclusion::NotHypercyclic);
        assert_eq!(hypercyclic_iff(&sp(presets::chaos())).unwrap().conclusion, Conclusion::Hypercyclic);
        assert_eq!(hypercyclic_iff(&sp(presets::tridiag(C::new(1.0, 0.0)).unwrap())).unwrap().conclusion, Conclusion::PreconditionNotMet);
    }

    #[test]
    fn kn_examples() {
        assert_eq!(generic_kn_criteria(&sp(presets::hypercyclic())).unwrap().conclusion, Conclusion::Mixing);
        assert_eq!(generic_kn_criteria(&sp(presets::decay())).unwrap().verdict, Verdict::FailsNumeric);
        let one = SequenceExpr::constant(C::new(1.0, 0.0));
        let t = SequenceTriple::new(one.clone(), SequenceExpr::constant(C::new(0.5, 0.0)), one, "c");
        let r = generic_kn_criteria(&sp(t)).unwrap();
        assert_eq!(r.verdict, Verdict::FailsNumeric);
        assert!(r.get("inf_scan").unwrap() > 0.5);
    }
}
