//! Orbits of the adjoint `F_w^*` in `f_n^*`-coordinates.
//!
//! One step costs `O(N)`: with `r_m = b_m / a_(m+1)`, coordinate `j` of
//! `F_w^* u` is `A_j u_(j+1) + c_j S_j`, where
//! `S_j = sum_(i >= j+2) prod_(m=j+2)^(i-1) (-r_m) u_i` obeys
//! `S_j = u_(j+2) - r_(j+2) S_(j+1)`.
//!
//! Beyond the stored block a functional may carry exact eigen-tails
//! `coef * (f_i(lambda))_(i >= N)`: since `F_w^* ev_lambda = lambda ev_lambda`
//! and coordinate `i` of `F_w^* u` only sees `u_(i+1), u_(i+2), ...`, such
//! tails stay exact under iteration. Whatever is left unmodelled is carried as
//! an `l^q` bound and propagated with a bound on `||F_w||`.

use serde::Serialize;

use crate::asymptotics::{complex_tail_estimate, Term};
use crate::error::{Error, Result};
use crate::operator::{beta_bounds, build_matrix, p_norm_estimate, ShiftCoefficients};
use crate::poly::C;
use crate::sequences::CertKind;
use crate::space::{DualVec, Space};
use crate::summation::{lp_norm, ComplexNeumaier};

pub mod demos;

pub use demos::{eigen_residual, limit_point_demo, periodic_residual, supercyclic_vanishing_check, LimitPointRecord, Residual};

/// Error budget for orbit runs, relative to the initial norm.
pub const ORBIT_TOL: f64 = 1e-3;
/// Explicit terms in the tail series of an eigen-tail.
const TAIL_TERMS: usize = 1 << 14;
/// Safety factor on the power-iteration norm when no certified bound exists.
const NORM_SLACK: f64 = 1.05;

fn zero() -> C {
    C::new(0.0, 0.0)
}

/// `coef * f_i(lambda)` for every `i` past the stored block.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenTail {
    pub coef: C,
    pub lambda: C,
}

/// A functional: stored coordinates, exact eigen-tails, and an `l^q` bound on
/// the unmodelled remainder.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitVec {
    pub stored: Vec<C>,
    pub eigen: Vec<EigenTail>,
    pub free_tail: f64,
    pub label: String,
}

impl OrbitVec {
    pub fn from_dual(u: &DualVec, label: impl Into<String>) -> Self {
        OrbitVec { stored: u.coeffs.clone(), eigen: Vec::new(), free_tail: u.tail_bound, label: label.into() }
    }

    /// `ev_lambda` with its tail carried exactly.
    pub fn ev(space: &Space, lambda: C, len: usize) -> Result<Self> {
        let stored = (0..len).map(|k| space.eval_basis_fn(k, lambda)).collect::<Result<Vec<_>>>()?;
        Ok(OrbitVec { stored, eigen: vec![EigenTail { coef: C::new(1.0, 0.0), lambda }], free_tail: 0.0, label: format!("ev({lambda})") })
    }

    pub fn len(&self) -> usize {
        self.stored.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stored.is_empty()
    }

    pub fn scale(&self, s: C) -> Self {
        OrbitVec {
            stored: self.stored.iter().map(|x| x * s).collect(),
            eigen: self.eigen.iter().map(|e| EigenTail { coef: e.coef * s, lambda: e.lambda }).collect(),
            free_tail: self.free_tail * s.norm(),
            label: format!("{s}*{}", self.label),
        }
    }

    /// Sum of two functionals stored to the same length.
    pub fn add(&self, o: &OrbitVec) -> Result<Self> {
        if self.len() != o.len() {
            return Err(Error::InvalidConfig(format!("stored lengths differ ({} vs {})", self.len(), o.len())));
        }
        let mut eigen = self.eigen.clone();
        for e in &o.eigen {
            match eigen.iter_mut().find(|x| x.lambda == e.lambda) {
                Some(x) => x.coef += e.coef,
                None => eigen.push(*e),
            }
        }
        Ok(OrbitVec {
            stored: self.stored.iter().zip(&o.stored).map(|(x, y)| x + y).collect(),
            eigen,
            free_tail: self.free_tail + o.free_tail,
            label: format!("{}+{}", self.label, o.label),
        })
    }

    pub fn descriptor(&self, q: f64) -> VecDescriptor {
        VecDescriptor { label: self.label.clone(), stored: self.len(), stored_norm: lp_norm(&self.stored, q), tail_bound: self.free_tail }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VecDescriptor {
    pub label: String,
    pub stored: usize,
    pub stored_norm: f64,
    pub tail_bound: f64,
}

/// `G(lambda) = sum_(i >= from) prod_(m=from)^(i-1) (-r_m) f_i(lambda)` and
/// the bound on `||(f_i(lambda))_(i >= from)||_q`.
#[derive(Clone, Copy, Debug)]
struct TailData {
    lambda: C,
    g: [C; 2],
    g_err: [f64; 2],
    f_at: C,
    norm: f64,
    cert: CertKind,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct OrbitStep {
    pub step: usize,
    /// `l^q` norm of the stored coordinates.
    pub norm: f64,
    /// Bound on the `l^q` norm of the eigen-tails past the stored block.
    pub tail_norm: f64,
    pub distance: Option<f64>,
    /// Accumulated bound on everything not computed exactly; nondecreasing.
    pub error_budget: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecord {
    pub steps: Vec<OrbitStep>,
    pub truncation: usize,
    pub initial: VecDescriptor,
    pub target: Option<VecDescriptor>,
    pub op_norm: Option<f64>,
    pub op_norm_cert: CertKind,
    pub cert: CertKind,
    /// Set when the budget exceeded `tol` times the norm scale; the record
    /// stops at the last step within budget.
    pub budget_exceeded: Option<String>,
}

impl OrbitRecord {
    pub fn last(&self) -> &OrbitStep {
        self.steps.last().expect("at least step 0")
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidConfig(format!("csv: {e}"));
        w.write_record(["step", "norm", "tail_norm", "distance", "error_budget"]).map_err(io)?;
        for s in &self.steps {
            let d = s.distance.map_or(String::new(), |d| format!("{d:.16e}"));
            w.write_record([s.step.to_string(), format!("{:.16e}", s.norm), format!("{:.16e}", s.tail_norm), d, format!("{:.16e}", s.error_budget)])
                .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidConfig(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("orbit records serialize")
    }
}

/// Matrix-free adjoint steps on a fixed stored length.
pub struct Orbiter<'a> {
    pub space: &'a Space,
    pub len: usize,
    /// Budget relative to the norm scale.
    pub tol: f64,
    big_a: Vec<C>,
    c: Vec<C>,
    r: Vec<C>,
    tails: Vec<TailData>,
    op_norm: Option<(f64, CertKind)>,
}

impl<'a> Orbiter<'a> {
    pub fn new(space: &'a Space, len: usize) -> Result<Self> {
        if len < 3 {
            return Err(Error::InvalidConfig(format!("orbit length {len} < 3")));
        }
        let coeffs = ShiftCoefficients::new(space, 1);
        let big_a = (0..len).map(|j| coeffs.big_a(j)).collect::<Result<_>>()?;
        let c = (0..len).map(|j| coeffs.c(j)).collect::<Result<_>>()?;
        let r = (0..len + 2).map(|m| space.step_ratio(m)).collect::<Result<_>>()?;
        Ok(Orbiter { space, len, tol: ORBIT_TOL, big_a, c, r, tails: Vec::new(), op_norm: None })
    }

    /// Certified `sup|alpha| + sup|c| + beta2` when finite; otherwise the
    /// power-iteration norm of the leading block with a 5% margin (heuristic).
    pub fn op_norm(&mut self) -> Result<(f64, CertKind)> {
        if let Some(v) = self.op_norm {
            return Ok(v);
        }
        let b = beta_bounds(self.space)?;
        let certified = b.sup_alpha.upper + b.sup_c.upper + b.beta2_upper;
        let v = if certified.is_finite() {
            (certified, b.cert)
        } else {
            let m = build_matrix(self.space, 1)?;
            (p_norm_estimate(&m, None).lower * NORM_SLACK, CertKind::Heuristic)
        };
        self.op_norm = Some(v);
        Ok(v)
    }

    fn tail(&mut self, lambda: C) -> Result<TailData> {
        if let Some(t) = self.tails.iter().find(|t| t.lambda == lambda) {
            return Ok(*t);
        }
        // ev_lambda o F_w = lambda ev_lambda past the block only when w_n = 1 there
        // (ev_0 has no tail)
        let unit = self.space.triple.w.term().is_some_and(|t| {
            t.valid_from < self.len && t.ratio == C::new(1.0, 0.0) && t.num.sub(&t.den).is_zero()
        });
        if !unit && lambda != zero() {
            return Err(Error::InvalidConfig(format!("eigen-tails need w_n = 1 for n >= {}", self.len - 1)));
        }
        let l = self.len;
        let (g0, e0, c0) = self.tail_series(lambda, l)?;
        let (g1, e1, c1) = self.tail_series(lambda, l + 1)?;
        // f_i(0) = 0 for i >= 1
        let nv = if lambda == zero() {
            crate::series::SeriesValue { value: 0.0, partial: 0.0, tail_estimate: 0.0, tail_bound: 0.0, terms: 0, cert: CertKind::Certified, divergent: false }
        } else {
            self.space.ev_tail(lambda, l)?
        };
        if nv.divergent {
            return Err(Error::NotInDual(format!("(f_n({lambda}))_n is not in l^{}", self.space.q())));
        }
        let t = TailData {
            lambda,
            g: [g0, g1],
            g_err: [e0, e1],
            f_at: self.space.eval_basis_fn(l, lambda)?,
            norm: nv.upper(),
            cert: c0.and(c1).and(nv.cert),
        };
        self.tails.push(t);
        Ok(t)
    }

    /// `sum_(i >= from) P_i f_i(lambda)`, `P_from = 1`, `P_(i+1) = -r_i P_i`:
    /// explicit terms, then the asymptotic remainder; the error is the
    /// disagreement of remainders taken at two cut points.
    fn tail_series(&self, lambda: C, from: usize) -> Result<(C, f64, CertKind)> {
        if lambda == zero() {
            return Ok((zero(), 0.0, CertKind::Certified));
        }
        let sp = self.space;
        let mut acc = ComplexNeumaier::new();
        let mut p = C::new(1.0, 0.0);
        let half = TAIL_TERMS / 2;
        let mut mid = None;
        let mut last = zero();
        let mut small = 0;
        for k in 0..TAIL_TERMS {
            let i = from + k;
            if k == half {
                mid = Some((acc.value(), p * sp.eval_basis_fn(i, lambda)?));
            }
            let t = p * sp.eval_basis_fn(i, lambda)?;
            acc.add(t);
            let r = sp.step_ratio(i)?;
            last = -p * r * sp.eval_basis_fn(i + 1, lambda)?;
            p *= -r;
            if p == zero() {
                return Ok((acc.value(), 0.0, CertKind::Certified));
            }
            // stop once terms have fallen geometrically far below the sum
            small = if t.norm() <= 1e-18 * acc.value().norm() { small + 1 } else { 0 };
            if small >= 32 && mid.is_none() {
                return Ok((acc.value(), 64.0 * t.norm(), CertKind::Heuristic));
            }
        }
        let total = acc.value();
        let end = from + TAIL_TERMS;
        match self.ratio_term(lambda) {
            Some(ratio) => {
                let (pm, tm) = mid.expect("half < TAIL_TERMS");
                let est_end = complex_tail_estimate(&ratio, end, last);
                let est_mid = complex_tail_estimate(&ratio, from + half, tm);
                match (est_end, est_mid) {
                    (Some(e1), Some(e0)) => {
                        let v = total + e1;
                        let err = (v - (pm + e0)).norm().max(1e-16 * v.norm());
                        Ok((v, err, CertKind::Heuristic))
                    }
                    _ => Ok((total, last.norm() * TAIL_TERMS as f64, CertKind::Heuristic)),
                }
            }
            None => Ok((total, last.norm() * TAIL_TERMS as f64, CertKind::Heuristic)),
        }
    }

    /// Closed form of `P_(i+1) f_(i+1) / (P_i f_i) = -r_i f_(i+1)(lambda) / f_i(lambda)`.
    fn ratio_term(&self, lambda: C) -> Option<Term> {
        let r = self.space.ratio_term()?;
        let (ta, tb) = (self.space.triple.a.term()?, self.space.triple.b.term()?);
        let f = ta.add(&tb.scaled(lambda))?.mul(&Term::geometric(lambda));
        Some(r.scaled(C::new(-1.0, 0.0)).mul(&f.shift(1).div(&f)))
    }

    /// One adjoint step; returns the image and coordinatewise bounds on the
    /// error introduced by the eigen-tail series.
    pub fn step(&mut self, u: &OrbitVec) -> Result<(OrbitVec, Vec<f64>)> {
        let l = self.len;
        if u.len() != l {
            return Err(Error::InvalidConfig(format!("stored length {} differs from orbit length {l}", u.len())));
        }
        let mut s_tail = [zero(); 2];
        let mut s_err = [0.0; 2];
        let mut u_l = zero();
        for e in &u.eigen {
            let t = self.tail(e.lambda)?;
            for k in 0..2 {
                s_tail[k] += e.coef * t.g[k];
                s_err[k] += e.coef.norm() * t.g_err[k];
            }
            u_l += e.coef * t.f_at;
        }
        let mut out = vec![zero(); l];
        let mut err = vec![0.0; l];
        // S_(L-1), S_(L-2) come from the tails, the rest by recursion
        out[l - 1] = self.big_a[l - 1] * u_l + self.c[l - 1] * s_tail[1];
        err[l - 1] = self.c[l - 1].norm() * s_err[1];
        let mut s = s_tail[0];
        let mut se = s_err[0];
        out[l - 2] = self.big_a[l - 2] * u.stored[l - 1] + self.c[l - 2] * s;
        err[l - 2] = self.c[l - 2].norm() * se;
        for j in (0..l - 2).rev() {
            s = u.stored[j + 2] - self.r[j + 2] * s;
            se *= self.r[j + 2].norm();
            out[j] = self.big_a[j] * u.stored[j + 1] + self.c[j] * s;
            err[j] = self.c[j].norm() * se;
        }
        let eigen = u.eigen.iter().map(|x| EigenTail { coef: x.coef * x.lambda, lambda: x.lambda }).collect();
        Ok((OrbitVec { stored: out, eigen, free_tail: u.free_tail, label: u.label.clone() }, err))
    }

    /// `|F_w^*|` on a vector supported in the stored block, which the adjoint
    /// maps into itself: propagates coordinatewise error bounds exactly.
    fn abs_step(&self, e: &[f64]) -> Vec<f64> {
        let l = self.len;
        let mut out = vec![0.0; l];
        let mut s = 0.0;
        out[l - 2] = self.big_a[l - 2].norm() * e[l - 1];
        for j in (0..l - 2).rev() {
            s = e[j + 2] + self.r[j + 2].norm() * s;
            out[j] = self.big_a[j].norm() * e[j + 1] + self.c[j].norm() * s;
        }
        out
    }

    fn tail_norm(&mut self, u: &OrbitVec) -> Result<f64> {
        let mut n = 0.0;
        for e in u.eigen.iter().filter(|e| e.coef != zero()) {
            n += e.coef.norm() * self.tail(e.lambda)?.norm;
        }
        Ok(n)
    }

    /// `steps` iterations of `F_w^*`; distances to `mult^k target` when a
    /// target is given.
    pub fn run(&mut self, u: &OrbitVec, steps: usize, target: Option<(&OrbitVec, C)>) -> Result<OrbitRecord> {
        let q = self.space.q();
        let mut cert = CertKind::Certified;
        for e in &u.eigen {
            cert = cert.and(self.tail(e.lambda)?.cert);
        }
        let mut op: Option<(f64, CertKind)> = None;
        let scale = lp_norm(&u.stored, q).max(f64::MIN_POSITIVE);
        let mut cur = u.clone();
        let mut free = u.free_tail;
        let mut err = vec![0.0; self.len];
        let mut budget: f64 = 0.0;
        let mut out = Vec::with_capacity(steps + 1);
        let mut mult = C::new(1.0, 0.0);
        let mut exceeded = None;
        for k in 0..=steps {
            if k > 0 {
                let (next, e) = self.step(&cur)?;
                cur = next;
                err = self.abs_step(&err);
                for (x, y) in err.iter_mut().zip(&e) {
                    *x += y;
                }
                if free > 0.0 {
                    let (n, c) = match op {
                        Some(v) => v,
                        None => *op.insert(self.op_norm()?),
                    };
                    cert = cert.and(c);
                    free *= n;
                }
            }
            let acc = free + if err.iter().all(|x| *x == 0.0) { 0.0 } else { lp_norm(&err.iter().map(|x| C::new(*x, 0.0)).collect::<Vec<_>>(), q) };
            let norm = lp_norm(&cur.stored, q);
            let tail_norm = self.tail_norm(&cur)?;
            let mut bound = acc + 1e-14 * norm;
            let distance = match target {
                Some((t, m)) => {
                    let tk = t.scale(mult);
                    let diff: Vec<C> = cur.stored.iter().zip(&tk.stored).map(|(x, y)| x - y).collect();
                    let mut tail_diff = tk.free_tail;
                    let mut lams: Vec<C> = Vec::new();
                    for e in cur.eigen.iter().chain(&tk.eigen) {
                        if !lams.contains(&e.lambda) {
                            lams.push(e.lambda);
                        }
                    }
                    for lam in lams {
                        let a: C = cur.eigen.iter().filter(|e| e.lambda == lam).map(|e| e.coef).sum();
                        let b: C = tk.eigen.iter().filter(|e| e.lambda == lam).map(|e| e.coef).sum();
                        if a != b {
                            tail_diff += (a - b).norm() * self.tail(lam)?.norm;
                        }
                    }
                    bound += tail_diff;
                    mult *= m;
                    Some(lp_norm(&diff, q))
                }
                None => None,
            };
            budget = budget.max(bound);
            if budget > self.tol * scale && k > 0 {
                exceeded = Some(format!(
                    "error budget {budget:.3e} exceeds {:.1e} x {scale:.3e} at step {k}; increase the truncation or shorten the orbit",
                    self.tol
                ));
                break;
            }
            out.push(OrbitStep { step: k, norm, tail_norm, distance, error_budget: budget });
        }
        Ok(OrbitRecord {
            steps: out,
            truncation: self.len,
            initial: u.descriptor(q),
            target: target.map(|t| t.0.descriptor(q)),
            op_norm: op.map(|o| o.0),
            op_norm_cert: op.map_or(CertKind::Certified, |o| o.1),
            cert,
            budget_exceeded: exceeded,
        })
    }
}

/// `steps` applications of `F_w^*` to `u`, the part of `u` past its stored
/// coordinates propagated through a bound on `||F_w||`.
pub fn iterate_adjoint(space: &Space, u: &DualVec, steps: usize, target: Option<&DualVec>) -> Result<OrbitRecord> {
    let len = u.len().max(target.map_or(0, |t| t.len())).max(3);
    let pad = |v: &DualVec| {
        let mut c = v.coeffs.clone();
        c.resize(len, zero());
        DualVec { coeffs: c, ..v.clone() }
    };
    let start = OrbitVec::from_dual(&pad(u), "u");
    let tgt = target.map(|t| OrbitVec::from_dual(&pad(t), "target"));
    Orbiter::new(space, len)?.run(&start, steps, tgt.as_ref().map(|t| (t, C::new(1.0, 0.0))))
}

/// As [`iterate_adjoint`] for a functional with eigen-tails.
pub fn iterate_orbit(space: &Space, u: &OrbitVec, steps: usize, target: Option<(&OrbitVec, C)>) -> Result<OrbitRecord> {
    Orbiter::new(space, u.len())?.run(u, steps, target)
}
