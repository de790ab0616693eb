//! Random triples paired with independent oracle twins built from the same raw data.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shiftlab::config::SpaceConfig;
use shiftlab::sequences::{SequenceExpr, SequenceTriple};
use shiftlab::space::Space;
use shiftlab::C;
use shiftlab_oracle::DirectSeq;

pub struct Twin {
    pub triple: SequenceTriple,
    pub a: DirectSeq,
    pub b: DirectSeq,
    pub w: DirectSeq,
}

impl Twin {
    pub fn space(&self, cfg: SpaceConfig) -> Space {
        Space::new(self.triple.clone(), cfg).expect("twin triples are valid")
    }
}

fn raw(r: C, p: Vec<C>, q: Vec<C>) -> (SequenceExpr, DirectSeq) {
    (SequenceExpr::new(r, p.clone(), q.clone()).expect("valid raw data"), DirectSeq::new(r, p, q))
}

fn phase(rng: &mut ChaCha8Rng, modulus: f64, complex: bool) -> C {
    if complex {
        C::from_polar(modulus, rng.gen_range(0.0..std::f64::consts::TAU))
    } else {
        C::new(modulus, 0.0)
    }
}

/// A random closed-form triple with `|b_n / a_(n+1)| -> t < 1`, so monomials
/// lie in the space. With `bounded`, `t <= 0.8`, which with the bounded
/// weights makes `F_w` bounded with a certifiable band bound.
pub fn random_twin(rng: &mut ChaCha8Rng, bounded: bool) -> Twin {
    let complex = rng.gen_bool(0.5);
    let ra = rng.gen_range(0.5..1.5);
    let t = if bounded { rng.gen_range(0.1..0.8) } else { rng.gen_range(0.1..0.99) };
    let mut coeffs = |lo: f64, hi: f64| -> (Vec<C>, Vec<C>) {
        let p0 = rng.gen_range(lo..hi);
        let p = vec![phase(rng, p0, complex), C::new(rng.gen_range(0.0..1.0), 0.0)];
        let q = vec![C::new(1.0, 0.0), C::new(rng.gen_range(0.0..1.0), 0.0)];
        (p, q)
    };
    let (pa, qa) = coeffs(0.5, 2.0);
    let (pb, qb) = coeffs(0.1, 2.0);
    let (pw, qw) = coeffs(0.5, 3.0);
    let (a, oa) = raw(C::new(ra, 0.0), pa, qa);
    let (b, ob) = raw(C::new(ra * t, 0.0), pb, qb);
    let (w, ow) = raw(C::new(1.0, 0.0), pw, qw);
    Twin { triple: SequenceTriple::new(a, b, w, "random"), a: oa, b: ob, w: ow }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn c(x: f64) -> C {
    C::new(x, 0.0)
}

/// Oracle twins of the named presets, written out from their definitions.
pub fn preset_twins() -> Vec<(&'static str, DirectSeq, DirectSeq, DirectSeq)> {
    let one = DirectSeq::constant(1.0);
    let half_b = DirectSeq::new(c(0.5), vec![c(0.5)], vec![c(1.0)]);
    vec![
        (
            "EX-CHAOS",
            DirectSeq::new(c(0.5), vec![c(2.0)], vec![c(0.0), c(1.0)]).with_override(0, c(1.0)),
            DirectSeq::new(c(0.25), vec![c(1.0)], vec![c(1.0), c(1.0)]).with_override(0, c(1.0)),
            DirectSeq::constant(4.0).with_override(0, c(1.0)),
        ),
        ("EX-TRIDIAG", one.clone(), DirectSeq::new(c(1.0), vec![c(-1.0), c(-1.0)], vec![c(2.0), c(1.0)]), one.clone()),
        ("EX-HC", one.clone(), half_b.clone(), DirectSeq::constant(2.0)),
        ("EX-DECAY", one, half_b, DirectSeq::constant(0.5)),
    ]
}

/// Maximum coordinate gap, relative to the larger coordinate magnitude (floor 1).
pub fn max_rel_gap(x: &[C], y: &[C]) -> f64 {
    let scale = x.iter().chain(y).map(|v| v.norm()).fold(1.0, f64::max);
    x.iter().zip(y).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max) / scale
}
