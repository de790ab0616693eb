//! Eigenvectors, periodic vectors, nonzero orbital limit points and vanishing
//! orbits of `F_w^*`.

use serde::Serialize;

use super::{OrbitRecord, OrbitVec, Orbiter};
use crate::error::{Error, Result};
use crate::poly::C;
use crate::report::{Conclusion, CriterionReport, Quantity, Scan, Verdict};
use crate::sequences::CertKind;
use crate::space::Space;
use crate::summation::lp_norm;

/// Tolerance for `lambda^m = 1`.
pub const ROOT_TOL: f64 = 1e-12;
/// Relative tolerance of the chain `F^* k_n = w_(n-1) k_(n-1)`.
pub const CHAIN_TOL: f64 = 1e-12;

/// A residual over the stored coordinates with the bound it must respect.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Residual {
    pub value: f64,
    pub bound: f64,
    pub cert: CertKind,
}

impl Residual {
    pub fn within(&self) -> bool {
        self.value <= self.bound
    }
}

fn residual_after(space: &Space, lambda: C, steps: usize, mult: C) -> Result<Residual> {
    let ev = OrbitVec::ev(space, lambda, space.cfg.n)?;
    let mut o = Orbiter::new(space, space.cfg.n)?;
    o.tol = f64::INFINITY;
    let rec = o.run(&ev, steps, Some((&ev, mult)))?;
    let last = rec.last();
    // summation order differs between the two sides
    let rounding = 1e-13 * lp_norm(&ev.stored, space.q()) * (steps as f64 + 1.0);
    Ok(Residual { value: last.distance.unwrap_or(0.0), bound: last.error_budget + rounding, cert: rec.cert })
}

/// `||F^* ev_lambda - lambda ev_lambda||_q` over the stored coordinates.
pub fn eigen_residual(space: &Space, lambda: C) -> Result<Residual> {
    residual_after(space, lambda, 1, lambda)
}

/// `||(F^*)^m ev_lambda - ev_lambda||_q` for `lambda^m = 1`.
pub fn periodic_residual(space: &Space, lambda: C, m: usize) -> Result<Residual> {
    if m == 0 || (lambda.powi(m as i32) - C::new(1.0, 0.0)).norm() > ROOT_TOL {
        return Err(Error::NotRootOfUnity(format!("{lambda} (order {m})")));
    }
    residual_after(space, lambda, m, C::new(1.0, 0.0))
}

/// A step `j` with `|lambda^j - 1| < gap` and the distance of the orbit to
/// `ev_lambda` there.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SubsequencePoint {
    pub step: usize,
    pub gap: f64,
    pub distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitPointRecord {
    /// Distances to `lambda^k ev_lambda`.
    pub record: OrbitRecord,
    /// Steps approaching `ev_lambda` itself.
    pub subsequence: Vec<SubsequencePoint>,
    /// `||ev_lambda||_q` over the stored coordinates: the nonzero limit point.
    pub limit_norm: f64,
}

/// The orbit of `ev_z + ev_lambda` (`|z| < R`, `|lambda| = R`) approaches
/// `lambda^k ev_lambda` like `|z|^k`; along steps with `lambda^j -> 1` it
/// accumulates at `ev_lambda != 0`. Steps are picked greedily against gaps
/// `10^-1, 10^-1.5, ...`.
pub fn limit_point_demo(space: &Space, z: C, lambda: C, steps: usize) -> Result<LimitPointRecord> {
    let (radius, _) = space.radius()?;
    if z.norm() >= radius {
        return Err(Error::InvalidConfig(format!("|z| = {} must be below the radius {radius}", z.norm())));
    }
    let n = space.cfg.n;
    let ev_l = OrbitVec::ev(space, lambda, n)?;
    let f = OrbitVec::ev(space, z, n)?.add(&ev_l)?;
    let mut o = Orbiter::new(space, n)?;
    let record = o.run(&f, steps, Some((&ev_l, lambda)))?;
    let q = space.q();
    let mut subsequence = Vec::new();
    let mut gap = 0.1f64;
    let mut cur = f;
    let mut pow = C::new(1.0, 0.0);
    for j in 1..record.steps.len() {
        cur = o.step(&cur)?.0;
        pow *= lambda;
        let g = (pow - C::new(1.0, 0.0)).norm();
        if g < gap {
            let diff: Vec<C> = cur.stored.iter().zip(&ev_l.stored).map(|(x, y)| x - y).collect();
            subsequence.push(SubsequencePoint { step: j, gap: g, distance: lp_norm(&diff, q) });
            while g < gap {
                gap /= 10f64.sqrt();
            }
        }
    }
    Ok(LimitPointRecord { record, subsequence, limit_norm: lp_norm(&ev_l.stored, q) })
}

/// `(F^*)^(nu+1) k_nu = 0` for `nu <= nu_max`, with the intermediate chain
/// `(F^*)^j k_nu = w_(nu-j)...w_(nu-1) k_(nu-j)`.
pub fn supercyclic_vanishing_check(space: &Space, nu_max: usize) -> Result<CriterionReport> {
    let len = nu_max + 3;
    let mut o = Orbiter::new(space, len)?;
    let q = space.q();
    let mut chain: f64 = 0.0;
    let mut residue: f64 = 0.0;
    for nu in 0..=nu_max {
        let mut cur = OrbitVec::from_dual(&space.coeff_functional_kn_len(nu, len)?, format!("k_{nu}"));
        let mut w = C::new(1.0, 0.0);
        for j in 1..=nu + 1 {
            cur = o.step(&cur)?.0;
            if j <= nu {
                w *= space.w(nu - j)?;
                let k = space.coeff_functional_kn_len(nu - j, len)?;
                let diff: Vec<C> = cur.stored.iter().zip(&k.coeffs).map(|(x, y)| x - w * y).collect();
                let scale = (w.norm() * lp_norm(&k.coeffs, q)).max(f64::MIN_POSITIVE);
                chain = chain.max(lp_norm(&diff, q) / scale);
            }
        }
        residue = residue.max(cur.stored.iter().map(|x| x.norm()).fold(0.0, f64::max));
    }
    let (verdict, implication) = if residue == 0.0 && chain <= CHAIN_TOL {
        (Verdict::HoldsCertified, "(F^*)^(nu+1) k_nu = 0 exactly for every scanned nu; supercyclicity of F_w^* holds unconditionally (stated fact, not computed)")
    } else {
        (Verdict::FailsNumeric, "an orbit of k_nu failed to vanish or left the chain F^* k_n = w_(n-1) k_(n-1)")
    };
    Ok(CriterionReport::new("supercyclic_vanishing", verdict, Conclusion::NoConclusion, implication)
        .quantity("max_residue", Quantity::certified(residue))
        .quantity("max_chain_deviation", Quantity::certified(chain))
        .scan(Scan { nu_max, n_max: len, series_cap: space.cfg.series_cap }))
}
