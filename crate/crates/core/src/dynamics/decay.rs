//! Coordinatewise decay of adjoint orbits `[F_w^*]^nu u`: under the `sup`/`limsup`
//! hypothesis, decay for every `u` is equivalent to non-hypercyclicity.
//!
//! Coordinate `n` of `[F_w^*]^nu u` is `sum_(i >= n+nu) [F_w^nu]_(i,n) u_i`; it
//! is computed from the columns of `[F_w^nu]` and cross-checked against `nu`
//! iterations of the one-step adjoint.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{reflexive_guard, scan};
use crate::error::Result;
use crate::operator::{apply_adjoint, build_matrix_sized, check_sup_limsup, TruncatedMatrix};
use crate::poly::C;
use crate::report::{Conclusion, CriterionReport, Quantity, Verdict};
use crate::sequences::{CertKind, TailCert};
use crate::space::{DualVec, Space};

/// Orbit length and scanned coordinates.
pub const DECAY_NU: usize = 40;
pub const DECAY_COORDS: usize = 32;
/// A coordinate counts as decayed once it and its error bound sit below this.
pub const DECAY_TOL: f64 = 1e-6;
/// Relative agreement demanded between the two routes.
pub const CROSS_TOL: f64 = 1e-9;
/// Length of the explicit part of battery vectors.
pub const BATTERY_LEN: usize = 256;
pub const BATTERY_SEED: u64 = 0xdeca_7001;

/// `|([F_w^*]^nu u)_n|` for `nu = 1..=nu_max`, with error bounds from the
/// discarded coordinates of `u`.
#[derive(Clone, Debug, Serialize)]
pub struct DecayCurve {
    pub coordinate: usize,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
}

impl DecayCurve {
    pub fn last(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0) + self.errors.last().copied().unwrap_or(0.0)
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Curves for coordinates `0..coords`, plus the largest disagreement between
/// the closed formula and the iterated adjoint relative to the entry scale.
#[derive(Clone, Debug, Serialize)]
pub struct DecayRun {
    pub nu_max: usize,
    pub curves: Vec<DecayCurve>,
    pub cross_check: f64,
    pub cert: CertKind,
}

impl DecayRun {
    pub fn final_max(&self) -> f64 {
        self.curves.iter().map(DecayCurve::last).fold(0.0, f64::max)
    }

    /// First `nu` from which every scanned coordinate stays below `tol`.
    pub fn settled_at(&self, tol: f64) -> Option<usize> {
        let mut at = None;
        for nu in (1..=self.nu_max).rev() {
            if self.curves.iter().all(|c| c.values[nu - 1] + c.errors[nu - 1] < tol) {
                at = Some(nu);
            } else {
                break;
            }
        }
        at
    }
}

/// Matrices `[F_w^nu]`, `nu = 1..=nu_max`, of a common size.
struct Powers {
    mats: Vec<TruncatedMatrix>,
}

impl Powers {
    fn new(space: &Space, nu_max: usize, size: usize) -> Result<Self> {
        let mats = (1..=nu_max).map(|nu| build_matrix_sized(space, nu, size)).collect::<Result<_>>()?;
        Ok(Powers { mats })
    }

    fn size(&self) -> usize {
        self.mats[0].size
    }
}

fn conj_exponent(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// `l^p` norm of column `j` of `m` from row `from` on, discarded rows included.
fn column_norm_from(m: &TruncatedMatrix, j: usize, from: usize) -> f64 {
    let p = m.meta.p;
    let rows = (from.max(j + m.nu)..m.size).map(|i| m.entries[(i, j)].norm());
    if p.is_infinite() {
        rows.fold(m.column_tail[j], f64::max)
    } else {
        (rows.map(|x| x.powf(p)).sum::<f64>() + m.column_tail[j].powf(p)).powf(1.0 / p)
    }
}

fn run(powers: &Powers, u: &DualVec, coords: usize) -> DecayRun {
    let size = powers.size();
    let len = u.len().min(size);
    let q = conj_exponent(powers.mats[0].meta.p);
    let rest = if u.len() > size { crate::summation::lp_norm(&u.coeffs[size..], q) } else { 0.0 } + u.tail_bound;
    let finite = DualVec::finite(u.coeffs[..len].to_vec());
    let coords = coords.min(size);
    let mut curves: Vec<DecayCurve> =
        (0..coords).map(|n| DecayCurve { coordinate: n, values: Vec::new(), errors: Vec::new() }).collect();
    let mut cross: f64 = 0.0;
    let mut cert = if rest > 0.0 { u.cert.kind } else { CertKind::Certified };
    let mut iter = finite.clone();
    for m in &powers.mats {
        cert = cert.and(m.meta.tail_cert);
        iter = apply_adjoint(&powers.mats[0], &iter, None);
        for (n, curve) in curves.iter_mut().enumerate() {
            let mut acc = crate::summation::ComplexNeumaier::new();
            let mut scale = 0.0;
            for i in n + m.nu..len {
                let t = m.entries[(i, n)] * finite.coeffs[i];
                scale += t.norm();
                acc.add(t);
            }
            let v = acc.value();
            let d = (v - iter.coeffs[n]).norm();
            if scale > 0.0 {
                cross = cross.max(d / scale);
            } else {
                cross = cross.max(d);
            }
            curve.values.push(v.norm());
            curve.errors.push(if rest > 0.0 { rest * column_norm_from(m, n, len) } else { 0.0 });
        }
    }
    DecayRun { nu_max: powers.mats.len(), curves, cross_check: cross, cert }
}

/// Orbit coordinates of a single functional.
pub fn decay_curves(space: &Space, u: &DualVec, nu_max: usize, coords: usize) -> Result<DecayRun> {
    let size = u.len().max(coords + nu_max + 2);
    Ok(run(&Powers::new(space, nu_max.max(1), size)?, u, coords))
}

fn precondition(space: &Space, id: &str) -> Result<Option<CriterionReport>> {
    if let Some(r) = reflexive_guard(space, id) {
        return Ok(Some(r));
    }
    let pre = check_sup_limsup(space)?;
    if !pre.verdict.holds() {
        return Ok(Some(CriterionReport::precondition_not_met(
            id,
            format!("sup |alpha_n| < inf and limsup |b_n/a_(n+1)| < 1 not established ({})", pre.verdict.label()),
        )));
    }
    Ok(None)
}

fn run_quantities(r: CriterionReport, d: &DecayRun) -> CriterionReport {
    let q = |v: f64| Quantity::new(v, d.cert);
    r.quantity("final_max", q(d.final_max()))
        .quantity("peak", q(d.curves.iter().map(DecayCurve::peak).fold(0.0, f64::max)))
        .quantity("settled_nu", q(d.settled_at(DECAY_TOL).map_or(f64::INFINITY, |n| n as f64)))
        .quantity("cross_check", Quantity::heuristic(d.cross_check))
}

/// Whether `[F_w^*]^nu u -> 0` coordinatewise along `nu <= 40`, scanning the
/// first 32 coordinates.
pub fn zero_one_decay_check(space: &Space, u: &DualVec) -> Result<CriterionReport> {
    const ID: &str = "zero_one_decay";
    if let Some(r) = precondition(space, ID)? {
        return Ok(r);
    }
    let d = decay_curves(space, u, DECAY_NU, DECAY_COORDS)?;
    let decays = d.final_max() < DECAY_TOL;
    let r = if decays {
        CriterionReport::new(
            ID,
            Verdict::HoldsNumeric,
            Conclusion::NoConclusion,
            "coordinatewise decay of one orbit (necessary for non-hypercyclicity; decay of every orbit is equivalent to it)",
        )
    } else {
        CriterionReport::new(
            ID,
            Verdict::FailsNumeric,
            Conclusion::NoConclusion,
            "an orbit without coordinatewise decay is consistent with hypercyclicity (equivalence under sup/limsup hypothesis)",
        )
    };
    Ok(run_quantities(r, &d).scan(scan(space, DECAY_NU, DECAY_COORDS)).note(format!(
        "closed formula vs iterated adjoint: relative gap {:.3e}",
        d.cross_check
    )))
}

/// Unit functionals `f_0^*..` followed by geometric functionals
/// `u_m = rho^m e^(i phi_m)` with `rho` in `[0.3, 0.9]`; the latter are not
/// finitely supported, so their orbits do not vanish for structural reasons.
pub fn battery(space: &Space, count: usize) -> Vec<DualVec> {
    let q = conj_exponent(space.p());
    let units = count / 4;
    let mut rng = ChaCha8Rng::seed_from_u64(BATTERY_SEED);
    let mut out: Vec<DualVec> = (0..units).map(|n| DualVec::unit(n, BATTERY_LEN)).collect();
    while out.len() < count {
        let rho: f64 = rng.gen_range(0.3..0.9);
        let coeffs: Vec<C> = (0..BATTERY_LEN)
            .map(|m| C::from_polar(rho.powi(m as i32), rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        let tail = if q.is_infinite() {
            rho.powi(BATTERY_LEN as i32)
        } else {
            rho.powi(BATTERY_LEN as i32) / (1.0 - rho.powf(q)).powf(1.0 / q)
        };
        out.push(DualVec { coeffs, tail_bound: tail, cert: TailCert::certified(tail, BATTERY_LEN) });
    }
    out
}

/// Decay over a battery of functionals spanning a dense set; universal decay
/// indicates non-hypercyclicity.
pub fn zero_one_battery(space: &Space, count: usize) -> Result<CriterionReport> {
    const ID: &str = "zero_one_decay_battery";
    if let Some(r) = precondition(space, ID)? {
        return Ok(r);
    }
    let vs = battery(space, count);
    let powers = Powers::new(space, DECAY_NU, BATTERY_LEN)?;
    let runs: Vec<DecayRun> = vs.iter().map(|u| run(&powers, u, DECAY_COORDS)).collect();
    let worst = runs.iter().map(DecayRun::final_max).fold(0.0, f64::max);
    let decayed = runs.iter().filter(|r| r.final_max() < DECAY_TOL).count();
    let cross = runs.iter().map(|r| r.cross_check).fold(0.0, f64::max);
    let cert = runs.iter().fold(CertKind::Certified, |c, r| c.and(r.cert));
    let r = if decayed == runs.len() {
        CriterionReport::new(
            ID,
            Verdict::HoldsNumeric,
            Conclusion::NotHypercyclic,
            "every battery orbit decays coordinatewise: not hypercyclic (equivalence under sup/limsup hypothesis)",
        )
    } else {
        CriterionReport::new(
            ID,
            Verdict::FailsNumeric,
            Conclusion::NoConclusion,
            "some battery orbit does not decay: consistent with hypercyclicity",
        )
    };
    Ok(r.quantity("vectors", Quantity::certified(runs.len() as f64))
        .quantity("decayed", Quantity::certified(decayed as f64))
        .quantity("worst_final", Quantity::new(worst, cert))
        .quantity("cross_check", Quantity::heuristic(cross))
        .scan(scan(space, DECAY_NU, DECAY_COORDS)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SpaceConfig;
    use crate::presets;

    fn sp(t: crate::sequences::SequenceTriple) -> Space {
        Space::new(t, SpaceConfig::default()).unwrap()
    }

    #[test]
    fn unit_functional_vanishes() {
        let s = sp(presets::decay());
        let d = decay_curves(&s, &DualVec::unit(0, 8), 10, 8).unwrap();
        assert!(d.curves.iter().all(|c| c.values.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn geometric_functional_decays_like_quarter_powers() {
        let s = sp(presets::decay());
        let coeffs: Vec<C> = (0..200).map(|m| C::new(0.5f64.powi(m), 0.0)).collect();
        let tail = 0.5f64.powi(200) / (1.0 - 0.25f64).sqrt();
        let u = DualVec { coeffs, tail_bound: tail, cert: TailCert::certified(tail, 200) };
        let d = decay_curves(&s, &u, 30, 4).unwrap();
        let c0 = &d.curves[0].values;
        // ratio of consecutive values tends to 1/4
        let r = c0[29] / c0[28];
        assert!((r - 0.25).abs() < 1e-3, "{r}");
        assert!(d.cross_check < CROSS_TOL, "{}", d.cross_check);
        let rep = zero_one_decay_check(&s, &u).unwrap();
        assert_eq!(rep.verdict, Verdict::HoldsNumeric);
    }

    #[test]
    fn kernel_orbit_grows_then_vanishes() {
        let s = sp(presets::hypercyclic());
        let k5 = s.coeff_functional_kn_len(5, 16).unwrap();
        let d = decay_curves(&s, &k5, 8, 8).unwrap();
        // F^* k_n = w_(n-1) k_(n-1), so coordinate 5-nu carries 2^nu a_(5-nu)
        for nu in 1..=5 {
            assert!((d.curves[5 - nu].values[nu - 1] - 2f64.powi(nu as i32)).abs() < 1e-12);
        }
        assert!(d.curves.iter().all(|c| c.values[5..].iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn battery_on_decay_preset() {
        let r = zero_one_battery(&sp(presets::decay()), 20).unwrap();
        assert_eq!(r.conclusion, Conclusion::NotHypercyclic, "{r:?}");
        assert!(r.get("worst_final").unwrap() < DECAY_TOL);
        assert!(r.get("cross_check").unwrap() < CROSS_TOL);
        let r = zero_one_battery(&sp(presets::hypercyclic()), 20).unwrap();
        assert_eq!(r.verdict, Verdict::FailsNumeric);
    }
}
