//! Hypercyclicity, mixing and chaos criteria for the adjoint `F_w^*`, each
//! returning a [`CriterionReport`].
//!
//! Closed-form triples are decided through the asymptotics of product
//! sequences `t_(n+1) = g(n) t_n`; other triples fall back to scans.

use serde::Serialize;

use crate::asymptotics::{Limit, Term, UNIT_TOL};
use crate::error::Result;
use crate::report::{CriterionReport, Scan};
use crate::sequences::SequenceExpr;
use crate::space::Space;

pub mod chaos;
pub mod decay;
pub mod hypercyclic;

pub use chaos::{backward_shift_chaos_check, chaos_extra_condition, chaos_series, wuc_battery, wuc_check};
pub use decay::{zero_one_decay_check, DecayCurve};
pub use hypercyclic::{generic_kn_criteria, hypercyclic_iff, hypercyclic_necessary, hypercyclic_sufficient, Mode};

/// Default scan: `nu <= 16`, `n <= 512`.
pub const NU_MAX: usize = 16;
pub const N_MAX: usize = 512;

/// Long-run behavior of a product sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Trend {
    Zero,
    Infinity,
    /// Bounded above and away from zero.
    Positive,
    Unknown,
}

/// Trend of `t_n` with `t_(n+1) / t_n = step(n)`. Finitely many factors do
/// not matter, so the answer holds for every starting index.
pub fn product_trend(step: &Term) -> Trend {
    let p = step.profile();
    if p.zero {
        return Trend::Zero;
    }
    match p.limit() {
        Limit::Infinite => Trend::Infinity,
        Limit::Finite(l) if l < 1.0 - UNIT_TOL => Trend::Zero,
        Limit::Finite(l) if l > 1.0 + UNIT_TOL => Trend::Infinity,
        Limit::Finite(_) => match p.log_expansion() {
            Some(ex) if ex.alpha > 0.0 => Trend::Zero,
            Some(ex) if ex.alpha < 0.0 => Trend::Infinity,
            Some(_) => Trend::Positive,
            None => Trend::Unknown,
        },
    }
}

/// Trend of a sum of nonnegative product sequences.
pub fn sum_trend(parts: &[Trend]) -> Trend {
    if parts.contains(&Trend::Infinity) {
        Trend::Infinity
    } else if parts.contains(&Trend::Unknown) {
        Trend::Unknown
    } else if parts.contains(&Trend::Positive) {
        Trend::Positive
    } else {
        Trend::Zero
    }
}

/// `x(m+1) / (x(m) w(m + lag))` as a closed form.
pub(crate) fn step_over_weight(x: &SequenceExpr, w: &SequenceExpr, lag: usize) -> Option<Term> {
    let (tx, tw) = (x.term()?, w.term()?);
    if tx.is_zero() {
        return Some(tx);
    }
    Some(tx.shift(1).div(&tx).div(&tw.shift(lag)))
}

/// The dynamics theorems need `1 < p < inf`.
pub(crate) fn reflexive_guard(space: &Space, id: &str) -> Option<CriterionReport> {
    space
        .cfg
        .require_reflexive()
        .err()
        .map(|e| CriterionReport::unsupported(id, format!("{e}; the theorem is stated for 1 < p < inf")))
}

pub(crate) fn scan(space: &Space, nu_max: usize, n_max: usize) -> Scan {
    Scan { nu_max, n_max, series_cap: space.cfg.series_cap }
}

/// `ln(e^x + e^y)` without overflow.
pub(crate) fn log_add(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Runs every criterion that applies to the space.
pub fn all_criteria(space: &Space) -> Result<Vec<CriterionReport>> {
    let mut out = vec![
        crate::operator::check_sup_limsup(space)?,
        hypercyclic_sufficient(space, Mode::Liminf)?,
        hypercyclic_sufficient(space, Mode::Lim)?,
        hypercyclic_necessary(space)?,
        hypercyclic_iff(space)?,
        generic_kn_criteria(space)?,
        chaos_series(space)?,
        chaos_extra_condition(space)?,
        wuc_battery(space, 16)?,
        backward_shift_chaos_check(space)?,
    ];
    out.push(decay::zero_one_battery(space, 20)?);
    Ok(out)
}
