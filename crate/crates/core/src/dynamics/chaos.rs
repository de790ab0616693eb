//! Chaos of `F_w^*` through the series `sum |a_n / (w_0...w_(n-1))|^q`, the
//! companion double series, the weak unconditional convergence test, and
//! chaos of the backward shift `B_w`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{reflexive_guard, scan, step_over_weight};
use crate::asymptotics::{Limit, Term, UNIT_TOL};
use crate::error::{Error, Result};
use crate::operator::{check_sup_limsup, sup_abs_from};
use crate::poly::C;
use crate::report::{Conclusion, CriterionReport, Quantity, Verdict};
use crate::sequences::{ratio_limsup, CertKind, INDEX_CAP};
use crate::series::{sum_powers, SeriesValue, SumOptions};
use crate::space::{term_norm_tail, FunctionVec, Space};

/// Seed for the random part of the weak-unconditional-convergence battery.
pub const BATTERY_SEED: u64 = 0xc4a0_5eed;

/// `sum_(k >= 0) t_k^s` with `t_k = |x_(n-lag)| / |w_(w_from)...w_(n-1)|`,
/// `n = start + k`, given `ln |x_m|`. `step` is the closed form of
/// `t_(k+1) / t_k` as a function of `m = n - lag`.
fn weighted_series(
    space: &Space,
    ln_x: impl Fn(usize) -> Result<f64>,
    lag: usize,
    w_from: usize,
    start: usize,
    step: Option<&Term>,
    s: f64,
    opts: SumOptions,
) -> Result<SeriesValue> {
    let w = &space.triple.w;
    let mut ln_w = 0.0;
    for i in w_from..start {
        ln_w += w.eval_log(i)?.ln;
    }
    let mut acc = crate::summation::Neumaier::new();
    acc.add(ln_w);
    let mut next = start;
    let profile = step.map(|t| t.shift(start - lag).profile());
    let opts = SumOptions { max_terms: opts.max_terms.min(INDEX_CAP.saturating_sub(start + 2)), ..opts };
    sum_powers(
        profile.as_ref(),
        |k| {
            let n = start + k;
            while next < n {
                acc.add(w.eval_log(next)?.ln);
                next += 1;
            }
            Ok(ln_x(n - lag)? - acc.value())
        },
        s,
        opts,
    )
}

/// `|a_(n+1) / (a_n w_n)|` as a closed form, the step of `|a_n| / |w_0...w_(n-1)|`.
fn a_step(space: &Space) -> Option<Term> {
    step_over_weight(&space.triple.a, &space.triple.w, 0)
}

fn series_quantity(sv: &SeriesValue) -> Quantity {
    if sv.divergent {
        Quantity::new(f64::INFINITY, sv.cert)
    } else {
        Quantity::new(sv.value, sv.cert).with_bound(sv.tail_bound)
    }
}

/// `sum_(n>=1) |a_n / (w_0...w_(n-1))|^q < inf`: under `(sup, limsup)` this
/// makes `F_w^*` chaotic (and mixing). When it diverges and the companion
/// double series converges, `F_w^*` has no non-trivial periodic vector.
pub fn chaos_series(space: &Space) -> Result<CriterionReport> {
    let id = "chaos_series";
    if let Some(r) = reflexive_guard(space, id) {
        return Ok(r);
    }
    let pre = check_sup_limsup(space)?;
    if !pre.verdict.holds() {
        return Ok(CriterionReport::precondition_not_met(id, "the chaos theorem assumes sup |w_n a_n / a_(n+1)| < inf and limsup |b_n / a_(n+1)| < 1"));
    }
    let step = a_step(space);
    let sv = weighted_series(space, |m| Ok(space.triple.a.eval_log(m)?.ln), 0, 0, 1, step.as_ref(), space.q(), space.sum_options())?;
    let certified = sv.is_certified() && pre.verdict == Verdict::HoldsCertified;
    let mut r = if !sv.divergent {
        let verdict = if certified { Verdict::HoldsCertified } else { Verdict::HoldsNumeric };
        let conclusion = if certified { Conclusion::Chaotic } else { Conclusion::NoConclusion };
        CriterionReport::new(id, verdict, conclusion, "the series converges, so F_w^* is chaotic and mixing")
    } else {
        let extra = extra_condition(space)?;
        let (conclusion, implication) = if extra.verdict == Verdict::HoldsCertified && sv.is_certified() {
            (Conclusion::NoPeriodicVectors, "the series diverges and the companion double series converges, so F_w^* has no non-trivial periodic vector and is not chaotic")
        } else {
            (Conclusion::NoConclusion, "the series diverges; without the companion condition a periodic vector cannot be excluded")
        };
        CriterionReport::new(id, Verdict::FailsNumeric, conclusion, implication)
            .quantity("companion_double_series", extra.quantities.get("double_series").copied().unwrap_or(Quantity::heuristic(f64::NAN)))
    };
    r = r
        .quantity("series", series_quantity(&sv))
        .quantity("explicit_terms", Quantity::certified(sv.terms as f64))
        .scan(scan(space, 0, sv.terms));
    Ok(r)
}

/// `sum_(n>=0) (sum_(j>=1) |prod_(k=1)^j b_(n+k-1) / a_(n+k)|^p)^(q/p) < inf`.
pub fn chaos_extra_condition(space: &Space) -> Result<CriterionReport> {
    if let Some(r) = reflexive_guard(space, "chaos_extra_condition") {
        return Ok(r);
    }
    extra_condition(space)
}

fn extra_condition(space: &Space) -> Result<CriterionReport> {
    let id = "chaos_extra_condition";
    let implication = "auxiliary condition: together with a divergent chaos series it excludes non-trivial periodic vectors";
    let (p, q) = (space.p(), space.q());
    let rt = space.ratio_term();
    let limsup = ratio_limsup(&space.triple.b, &space.triple.a, 1).ok();
    let contracting = limsup.is_some_and(|(l, c)| l < 1.0 - UNIT_TOL && c.is_certified());
    if !contracting {
        // a certified lower bound |r_n| >= 1/2 makes every outer term >= 2^(-q)
        let witness = rt.and_then(|t| {
            let pr = t.profile();
            match pr.limit() {
                Limit::Infinite => Some(pr.valid_from),
                Limit::Finite(l) if l >= 1.0 - UNIT_TOL => pr.eventual_lower(0.5, 1 << 40),
                _ => None,
            }
        });
        return Ok(match witness {
            Some(n0) => CriterionReport::new(id, Verdict::FailsNumeric, Conclusion::NoConclusion, implication)
                .quantity("double_series", Quantity::certified(f64::INFINITY))
                .quantity("outer_term_lower_bound", Quantity::certified(0.5f64.powf(q)))
                .note(format!("|b_n / a_(n+1)| >= 1/2 for n >= {n0}: the outer terms do not tend to 0")),
            None => CriterionReport::new(id, Verdict::Inconclusive, Conclusion::NoConclusion, implication)
                .note("limsup |b_n / a_(n+1)| is not certifiably below 1"),
        });
    }
    // from m on |r_m| <= theta < 1
    let mut m = space.cfg.series_cap.max(16);
    let theta = loop {
        let t = sup_abs_from(rt, |k| Ok(space.step_ratio(k)?.norm()), m, 256)?;
        if t.upper < 1.0 {
            break t;
        }
        if m >= 1 << 16 {
            return Ok(CriterionReport::new(id, Verdict::Inconclusive, Conclusion::NoConclusion, implication)
                .note("no contraction bound below 1 found"));
        }
        m *= 2;
    };
    let mut explicit = crate::summation::Neumaier::new();
    let mut err = 0.0;
    let mut cert = theta.cert;
    for n in 0..m {
        let inner = space.ratio_power_sum(n, space.sum_options())?;
        if inner.divergent {
            return Ok(CriterionReport::new(id, Verdict::FailsNumeric, Conclusion::NoConclusion, implication)
                .quantity("double_series", Quantity::new(f64::INFINITY, inner.cert))
                .note(format!("inner series diverges at n = {n}")));
        }
        cert = cert.and(inner.cert);
        let e = q / p;
        let v = inner.value.powf(e);
        explicit.add(v);
        err += ((inner.value + inner.tail_bound).powf(e) - v).abs();
    }
    // n >= m: |r_n|^q <= I_n^(q/p) <= |r_n|^q (1 - theta^p)^(-q/p)
    let tail = term_norm_tail(rt, |k| space.step_ratio(k), m, q, space.sum_options())?;
    cert = cert.and(tail.cert);
    let lo = (tail.value - tail.tail_bound).max(0.0).powf(q);
    let hi = (tail.value + tail.tail_bound).powf(q) * (1.0 - theta.upper.powf(p)).powf(-q / p);
    let value = explicit.value() + 0.5 * (lo + hi);
    let bound = err + 0.5 * (hi - lo);
    let verdict = if cert == CertKind::Certified { Verdict::HoldsCertified } else { Verdict::HoldsNumeric };
    Ok(CriterionReport::new(id, verdict, Conclusion::NoConclusion, implication)
        .quantity("double_series", Quantity::new(value, cert).with_bound(bound))
        .quantity("explicit_outer_terms", Quantity::certified(m as f64))
        .quantity("contraction_bound", theta.quantity())
        .scan(scan(space, 0, m)))
}

/// `sum_(n>=1) |k_n(f)| / |w_0...w_(n-1)|` for one `f`, with
/// `k_n(f) = lambda_n a_n + lambda_(n-1) b_(n-1)`. The part of `f` beyond its
/// stored coordinates enters through Hoelder's inequality.
pub fn wuc_check(space: &Space, f: &FunctionVec) -> Result<CriterionReport> {
    let id = "wuc";
    if let Some(r) = reflexive_guard(space, id) {
        return Ok(r);
    }
    let t = &space.triple;
    let len = f.len();
    let mut acc = crate::summation::Neumaier::new();
    let mut ln_w = 0.0;
    let at = |i: usize| f.coeffs.get(i).copied().unwrap_or_default();
    for n in 1..=len {
        ln_w += t.w.eval_log(n - 1)?.ln;
        let k = at(n) * t.a.eval(n)? + at(n - 1) * t.b.eval(n - 1)?;
        if k.norm() > 0.0 {
            acc.add((k.norm().ln() - ln_w).exp());
        }
    }
    let sum = acc.value();
    let mut r;
    if f.tail_bound == 0.0 {
        r = CriterionReport::new(id, Verdict::HoldsCertified, Conclusion::NoConclusion, "finite for this f; the chaos criterion needs every f")
            .quantity("sum", Quantity::certified(sum));
    } else {
        let q = space.q();
        let start = len.max(1);
        let ta = a_step(space);
        let tb = step_over_weight(&t.b, &t.w, 1);
        let na = weighted_series(space, |m| Ok(t.a.eval_log(m)?.ln), 0, 0, start, ta.as_ref(), q, space.bound_options())?;
        let nb = weighted_series(space, |m| Ok(t.b.eval_log(m)?.ln), 1, 0, start + 1, tb.as_ref(), q, space.bound_options())?;
        let cert = na.cert.and(nb.cert);
        if na.divergent || nb.divergent {
            r = CriterionReport::new(id, Verdict::Inconclusive, Conclusion::NoConclusion, "the weights a_n / (w_0...w_(n-1)) are not in l^q; the tail of f is not controlled")
                .quantity("sum_explicit", Quantity::certified(sum))
                .quantity("tail_weights_divergent", Quantity::new(1.0, cert));
        } else {
            let bound = f.tail_bound * (na.root(q).upper() + nb.root(q).upper());
            let verdict = if cert == CertKind::Certified { Verdict::HoldsCertified } else { Verdict::HoldsNumeric };
            r = CriterionReport::new(id, verdict, Conclusion::NoConclusion, "finite for this f; the chaos criterion needs every f")
                .quantity("sum", Quantity::new(sum, cert).with_bound(bound));
        }
    }
    r = r.scan(scan(space, 0, len));
    Ok(r)
}

/// [`wuc_check`] over truncated monomials `z^m` and seeded random vectors.
pub fn wuc_battery(space: &Space, count: usize) -> Result<CriterionReport> {
    let id = "wuc_battery";
    if let Some(r) = reflexive_guard(space, id) {
        return Ok(r);
    }
    let n = space.cfg.n;
    let mut fs = Vec::new();
    let mut skipped = 0;
    for m in 0..count / 2 {
        match space.monomial_expansion(m, n.saturating_sub(m).max(1)) {
            Ok((f, _)) => fs.push(f),
            Err(Error::TailNotCertifiable(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(BATTERY_SEED);
    for _ in fs.len() + skipped..count {
        let len = rng.gen_range(1..=n);
        fs.push(FunctionVec::new((0..len).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()));
    }
    let (mut finite, mut certified, mut worst) = (0usize, 0usize, 0.0f64);
    for f in &fs {
        let r = wuc_check(space, f)?;
        if let Some(q) = r.quantities.get("sum") {
            finite += 1;
            if r.verdict == Verdict::HoldsCertified {
                certified += 1;
            }
            worst = worst.max(q.value + q.bound.unwrap_or(0.0));
        }
    }
    let verdict = if finite == fs.len() && skipped == 0 { Verdict::HoldsNumeric } else { Verdict::Inconclusive };
    let mut r = CriterionReport::new(id, verdict, Conclusion::NoConclusion, "sample evidence only; the chaos criterion needs the series finite for every f")
        .quantity("vectors", Quantity::certified(fs.len() as f64))
        .quantity("finite", Quantity::certified(finite as f64))
        .quantity("certified", Quantity::certified(certified as f64))
        .quantity("largest_sum", Quantity::heuristic(worst))
        .scan(scan(space, 0, n));
    if skipped > 0 {
        r = r.note(format!("{skipped} monomials are not in the space"));
    }
    Ok(r)
}

/// Chaos of the backward shift `B_w`. The stated pair of conditions is
/// reported literally; the verdict rests on `sum_(n>=1) ||z^n|| / |w_1...w_n| < inf`,
/// which makes `sum z^n / (w_1...w_n)` absolutely, hence weakly
/// unconditionally, convergent.
pub fn backward_shift_chaos_check(space: &Space) -> Result<CriterionReport> {
    let id = "backward_shift_chaos";
    if let Some(r) = reflexive_guard(space, id) {
        return Ok(r);
    }
    for n in 0..2 {
        if !space.monomial_norm(n)?.0.is_finite() {
            return Err(Error::PolynomialNotInSpace(format!("z^{n} is not in the space")));
        }
    }
    let t = &space.triple;
    let p = space.p();
    // u_n = 1 / |w_1...w_n a_n|, step |a_n / (a_(n+1) w_(n+1))|
    let tu = match (t.a.term(), t.w.term()) {
        (Some(ta), Some(tw)) => Some(ta.div(&ta.shift(1)).div(&tw.shift(1))),
        _ => None,
    };
    let u_series = |start: usize, s: f64, opts: SumOptions| {
        // u_n as |x_(n'-1)| / |w_1...w_(n'-1)| with n' = n + 1
        weighted_series(space, |m| Ok(-t.a.eval_log(m)?.ln), 1, 1, start + 1, tu.as_ref(), s, opts)
    };
    let lit1 = u_series(1, p, space.sum_options())?;

    let limsup = ratio_limsup(&t.b, &t.a, 1).ok();
    let contracting = limsup.is_some_and(|(l, c)| l < 1.0 - UNIT_TOL && c.is_certified());
    let mut corrected: Option<(f64, f64, CertKind)> = None;
    let mut note = None;
    if lit1.divergent {
        corrected = Some((f64::INFINITY, 0.0, lit1.cert));
    } else if contracting {
        let rt = space.ratio_term();
        let mut m = space.cfg.series_cap.max(16);
        let theta = loop {
            let th = sup_abs_from(rt, |k| Ok(space.step_ratio(k)?.norm()), m, 256)?;
            if th.upper < 1.0 || m >= 1 << 16 {
                break th;
            }
            m *= 2;
        };
        if theta.upper < 1.0 {
            let mut acc = crate::summation::Neumaier::new();
            let mut err = 0.0;
            let mut cert = theta.cert;
            let mut ln_w = 0.0;
            for n in 1..m {
                let (nr, sv) = space.monomial_norm(n)?;
                ln_w += t.w.eval_log(n)?.ln;
                let v = (nr.ln() - ln_w).exp();
                acc.add(v);
                err += v * sv.root(p).tail_bound / nr.max(f64::MIN_POSITIVE);
                cert = cert.and(sv.cert);
            }
            let s1 = u_series(m, 1.0, space.sum_options())?;
            cert = cert.and(s1.cert);
            if s1.divergent {
                corrected = Some((f64::INFINITY, 0.0, cert));
            } else {
                let lo = s1.value - s1.tail_bound;
                let hi = s1.upper() * (1.0 - theta.upper.powf(p)).powf(-1.0 / p);
                corrected = Some((acc.value() + 0.5 * (lo + hi), err + 0.5 * (hi - lo), cert));
            }
        } else {
            note = Some("no contraction bound below 1 found for b_n / a_(n+1)");
        }
    } else {
        note = Some("limsup |b_n / a_(n+1)| is not certifiably below 1");
    }
    let (verdict, conclusion, implication) = match corrected {
        Some((v, _, c)) if v.is_finite() => (
            if c == CertKind::Certified { Verdict::HoldsCertified } else { Verdict::HoldsNumeric },
            if c == CertKind::Certified { Conclusion::BackwardShiftChaotic } else { Conclusion::NoConclusion },
            "sum ||z^n|| / |w_1...w_n| converges, so B_w is chaotic",
        ),
        Some(_) => (Verdict::FailsNumeric, Conclusion::NoConclusion, "sum ||z^n|| / |w_1...w_n| diverges; no conclusion about B_w"),
        None => (Verdict::Inconclusive, Conclusion::NoConclusion, "the absolute series is not decided"),
    };
    let mut r = CriterionReport::new(id, verdict, conclusion, implication)
        .quantity("weight_series", series_quantity(&lit1))
        .quantity("companion_series_literal", Quantity::certified(f64::INFINITY))
        .scan(scan(space, 0, space.cfg.series_cap))
        .note("the companion double series as stated includes the j = 0 term 1 for every n and therefore always diverges; the verdict uses the absolute series instead");
    if let Some((v, b, c)) = corrected {
        r = r.quantity("absolute_series", if v.is_finite() { Quantity::new(v, c).with_bound(b) } else { Quantity::new(v, c) });
    }
    if let Some(n) = note {
        r = r.note(n);
    }
    Ok(r)
}
