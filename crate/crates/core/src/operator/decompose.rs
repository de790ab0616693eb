//! `F_w` as the diagonal-weight shift `F_alpha` plus the bands below it,
//! which are compact once `c_n -> 0`; essential radii of `F_alpha`.

use serde::Serialize;

use super::bounds::beta_bounds;
use super::matrix::ShiftCoefficients;
use crate::asymptotics::Limit;
use crate::error::Result;
use crate::poly::C;
use crate::report::{ser_f64, Conclusion, CriterionReport, Quantity, Verdict};
use crate::sequences::{CertKind, HEURISTIC_SCAN};
use crate::space::Space;

/// Window lengths for the geometric-mean radii.
pub const RADIUS_WINDOWS: [usize; 4] = [8, 16, 32, 64];
/// Decay threshold for sequences without a closed form.
const HEURISTIC_DECAY: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CDecay {
    pub decays: bool,
    /// `lim |c_n|` (closed form) or `|c_n|` at the last scanned index.
    #[serde(serialize_with = "ser_f64")]
    pub limit: f64,
    pub cert: CertKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WindowRadius {
    pub m: usize,
    pub inner: f64,
    pub outer: f64,
}

/// Estimates of `lim_m inf_k |alpha_k...alpha_(k+m-1)|^(1/m)` (inner) and the
/// same with `sup` (outer). Radii ignore finitely many weights, so windows
/// start past the stored block.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EssentialRadii {
    pub inner: f64,
    pub outer: f64,
    pub windows: Vec<WindowRadius>,
    /// Inner radii nondecreasing and outer radii nonincreasing in `m`.
    pub monotone: bool,
    pub k_range: (usize, usize),
    /// `lim |alpha_n|` when the closed form has one.
    pub alpha_limit: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationDecomposition {
    #[serde(with = "crate::space::pairs")]
    pub alpha: Vec<C>,
    pub band_norms: Vec<f64>,
    pub c_decay: CDecay,
    pub essential_radii: EssentialRadii,
    pub bounded: Verdict,
    pub notes: Vec<String>,
}

impl PerturbationDecomposition {
    pub fn report(&self) -> CriterionReport {
        let cd = &self.c_decay;
        let verdict = match (cd.decays, cd.cert) {
            (true, CertKind::Certified) => Verdict::HoldsCertified,
            (true, CertKind::Heuristic) => Verdict::HoldsNumeric,
            (false, _) => Verdict::FailsNumeric,
        };
        let (conclusion, implication) = if cd.decays {
            (Conclusion::CompactPerturbation, "c_n -> 0: F_w is similar to F_alpha + K with K compact, so both share the essential spectrum")
        } else {
            (Conclusion::NotCompactPerturbation, "c_n does not tend to 0; the compact-perturbation decomposition does not apply")
        };
        let er = &self.essential_radii;
        let mut r = CriterionReport::new("decompose_compact", verdict, conclusion, implication)
            .quantity("c_limit", Quantity::new(cd.limit, cd.cert))
            .quantity("essential_radius_inner", Quantity::heuristic(er.inner))
            .quantity("essential_radius_outer", Quantity::heuristic(er.outer));
        if let Some(l) = er.alpha_limit {
            r = r.quantity("alpha_limit", Quantity::certified(l));
        }
        if !er.monotone {
            r = r.note("window radii are not monotone in m; extrapolation is unreliable");
        }
        for n in &self.notes {
            r = r.note(n.clone());
        }
        r
    }
}

/// Decomposition data: `alpha_i = w_i a_i / a_(i+1)`, band norms, the decay
/// of `c_n` and essential radii estimates.
pub fn decompose_compact(space: &Space) -> Result<PerturbationDecomposition> {
    let co = ShiftCoefficients::new(space, 1);
    let n = space.cfg.n;
    let alpha: Vec<C> = (0..n).map(|i| co.big_a(i)).collect::<Result<_>>()?;
    let bb = beta_bounds(space)?;
    let mut notes = Vec::new();
    if !bb.verdict.holds() {
        notes.push("boundedness of F_w is not certified by the band bound".to_string());
    }
    let c_decay = match co.c_term() {
        Some(t) => match t.profile().limit() {
            Limit::Finite(l) => CDecay { decays: l == 0.0, limit: l, cert: CertKind::Certified },
            Limit::Infinite => CDecay { decays: false, limit: f64::INFINITY, cert: CertKind::Certified },
        },
        None => {
            let last = co.c(HEURISTIC_SCAN)?.norm();
            CDecay { decays: last < HEURISTIC_DECAY, limit: last, cert: CertKind::Heuristic }
        }
    };
    let essential_radii = essential_radii(space, &co)?;
    Ok(PerturbationDecomposition { alpha, band_norms: bb.band_norms, c_decay, essential_radii, bounded: bb.verdict, notes })
}

fn essential_radii(space: &Space, co: &ShiftCoefficients) -> Result<EssentialRadii> {
    let k0 = space.cfg.n;
    let k1 = k0 + 4 * space.cfg.n;
    let mmax = *RADIUS_WINDOWS.last().unwrap();
    // prefix sums of ln |alpha_i|
    let mut prefix = vec![0.0f64; k1 + mmax - k0 + 1];
    for (i, k) in (k0..k1 + mmax).enumerate() {
        prefix[i + 1] = prefix[i] + co.big_a(k)?.norm().ln();
    }
    let mut windows = Vec::new();
    for m in RADIUS_WINDOWS {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..(k1 - k0) {
            let g = (prefix[k + m] - prefix[k]) / m as f64;
            lo = lo.min(g);
            hi = hi.max(g);
        }
        windows.push(WindowRadius { m, inner: lo.exp(), outer: hi.exp() });
    }
    let monotone = windows.windows(2).all(|w| w[1].inner >= w[0].inner * (1.0 - 1e-12) && w[1].outer <= w[0].outer * (1.0 + 1e-12));
    // r(m) = r + c/m through the two longest windows
    let (a, b) = (windows[windows.len() - 2], windows[windows.len() - 1]);
    let mut inner = 2.0 * b.inner - a.inner;
    let mut outer = 2.0 * b.outer - a.outer;
    if !(inner <= outer) {
        let mid = 0.5 * (inner + outer);
        inner = mid;
        outer = mid;
    }
    let alpha_limit = co.a_term().and_then(|t| match t.profile().limit() {
        Limit::Finite(l) => Some(l),
        Limit::Infinite => None,
    });
    Ok(EssentialRadii { inner: inner.max(0.0), outer: outer.max(0.0), windows, monotone, k_range: (k0, k1), alpha_limit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SpaceConfig;
    use crate::sequences::{SequenceExpr, SequenceTriple};

    fn c(x: f64) -> C {
        C::new(x, 0.0)
    }

    fn space(a: SequenceExpr, b: SequenceExpr, w: SequenceExpr) -> Space {
        Space::new(SequenceTriple::new(a, b, w, "t"), SpaceConfig::default()).unwrap()
    }

    #[test]
    fn chaos_decomposition() {
        let a = SequenceExpr::real(0.5, &[2.0], &[0.0, 1.0]).unwrap().with_override(0, c(1.0));
        let b = SequenceExpr::real(0.25, &[1.0], &[1.0, 1.0]).unwrap().with_override(0, c(1.0));
        let w = SequenceExpr::constant(c(4.0)).with_override(0, c(1.0));
        let d = decompose_compact(&space(a, b, w)).unwrap();
        assert!(d.c_decay.decays && d.c_decay.cert == CertKind::Certified);
        assert!((d.alpha[1] - c(16.0)).norm() < 1e-12);
        let er = &d.essential_radii;
        assert!((er.inner - 8.0).abs() < 0.08 && (er.outer - 8.0).abs() < 0.08, "{er:?}");
        assert!((er.alpha_limit.unwrap() - 8.0).abs() < 1e-12);
        assert_eq!(d.report().conclusion, Conclusion::CompactPerturbation);
    }

    #[test]
    fn tridiag_decomposition() {
        let one = SequenceExpr::constant(c(1.0));
        let d = decompose_compact(&space(one.clone(), SequenceExpr::real(1.0, &[-1.0, -1.0], &[2.0, 1.0]).unwrap(), one)).unwrap();
        assert!(d.c_decay.decays);
        assert!(d.alpha.iter().all(|x| (x - c(1.0)).norm() < 1e-15));
        assert!((d.essential_radii.inner - 1.0).abs() < 1e-12 && (d.essential_radii.outer - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_b_has_no_perturbation() {
        let one = SequenceExpr::constant(c(1.0));
        let d = decompose_compact(&space(one.clone(), SequenceExpr::constant(c(0.5)), one)).unwrap();
        assert!(d.c_decay.decays && d.c_decay.limit == 0.0);
        assert!(d.band_norms.iter().all(|x| *x == 0.0));
    }
}
