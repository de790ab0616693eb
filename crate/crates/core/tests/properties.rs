#![allow(clippy::needless_range_loop)]
mod common;

use common::{random_twin, rng, Twin};
use proptest::prelude::*;
use shiftlab::config::SpaceConfig;
use shiftlab::operator::bounds::beta_bounds;
use shiftlab::operator::rank_one::{rank_one_matrix_orbit, rank_one_perturb_orbit};
use shiftlab::operator::{apply_adjoint, apply_forward, build_matrix_sized};
use shiftlab::orbit::demos::eigen_residual;
use shiftlab::orbit::{OrbitVec, Orbiter};
use shiftlab::sequences::{SequenceExpr, SequenceTriple};
use shiftlab::space::{DualVec, FunctionVec, Space};
use shiftlab::summation::lp_norm;
use shiftlab::C;
use shiftlab_oracle::{lp_norm_dd, taylor_apply_fw, taylor_to_basis, DirectSeq};

fn twin(seed: u64, bounded: bool) -> Twin {
    random_twin(&mut rng(seed), bounded)
}

fn cvec(parts: &[(f64, f64)]) -> Vec<C> {
    parts.iter().map(|&(re, im)| C::new(re, im)).collect()
}

fn coords(len: usize) -> impl Strategy<Value = Vec<C>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), len).prop_map(|v| cvec(&v))
}

fn gap(x: &[C], y: &[C]) -> f64 {
    let scale = x.iter().chain(y).map(|v| v.norm()).fold(1e-300, f64::max);
    x.iter().zip(y).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max) / scale
}

fn dot(x: &[C], y: &[C]) -> C {
    x.iter().zip(y).map(|(u, v)| u * v).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn adjoint_is_the_transpose(seed in any::<u64>(), nu in 1usize..4, f in coords(12), u in coords(24)) {
        let s = twin(seed, false).space(SpaceConfig::default().with_size(24));
        let m = build_matrix_sized(&s, nu, 24).unwrap();
        // f lives in the first 12 coordinates, so F^nu f is inside the block up to its tail
        let mut fv = f.clone();
        fv.resize(24, C::new(0.0, 0.0));
        let img = apply_forward(&m, &FunctionVec::new(fv.clone()), None);
        let back = apply_adjoint(&m, &DualVec::finite(u.clone()), None);
        let lhs = dot(&img.coeffs, &u);
        let rhs = dot(&fv, &back.coeffs);
        let scale: f64 = m.entries.iter().map(|x| x.norm()).sum::<f64>().max(1.0);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn forward_matches_taylor_oracle(seed in any::<u64>(), nu in 1usize..4, f in coords(8)) {
        let t = twin(seed, false);
        let s = t.space(SpaceConfig::default().with_size(16));
        let m = build_matrix_sized(&s, nu, 16).unwrap();
        let mut fv = f.clone();
        fv.resize(16, C::new(0.0, 0.0));
        let ours = apply_forward(&m, &FunctionVec::new(fv), None);
        let taylor = s.coeffs_to_taylor(&FunctionVec::new(f.clone())).unwrap();
        let moved = taylor_apply_fw(&|n| t.w.eval(n), &taylor, nu);
        // compare Taylor coefficients: f_n -> (a_n + b_n z) z^n is stable, its inverse
        // amplifies rounding by prod |b_(n-1) / a_n|
        let k = 8 + nu;
        let c = &ours.coeffs;
        let zero = C::new(0.0, 0.0);
        let parts: Vec<(C, C)> = (0..k).map(|n| (t.a.eval(n) * c[n], if n > 0 { t.b.eval(n - 1) * c[n - 1] } else { zero })).collect();
        // relative to the summands behind each coordinate: rows of [F_w^nu] can cancel
        let row = |i: usize| (0..8).map(|j| m.entries[[i, j]].norm() * f[j].norm()).sum::<f64>();
        let scale = (0..k)
            .map(|n| t.a.eval(n).norm() * row(n) + if n > 0 { t.b.eval(n - 1).norm() * row(n - 1) } else { 0.0 })
            .chain(moved.iter().map(|v| v.norm()))
            .fold(1e-300, f64::max);
        let worst = parts.iter().zip(&moved).map(|((x, y), m)| (x + y - m).norm()).fold(0.0, f64::max) / scale;
        prop_assert!(worst <= 1e-12, "gap {worst}");
    }

    #[test]
    fn taylor_round_trip(seed in any::<u64>(), f in coords(10)) {
        let t = twin(seed, false);
        let s = t.space(SpaceConfig::default());
        let taylor = s.coeffs_to_taylor(&FunctionVec::new(f.clone())).unwrap();
        let back = s.taylor_to_coeffs(&taylor).unwrap();
        // forward substitution amplifies rounding by prod |b_(n-1) / a_n|; compare backward errors
        // (the rounding left in the last coordinate spills one Taylor entry past the end)
        let mut again = s.coeffs_to_taylor(&back).unwrap();
        again.resize(taylor.len(), C::new(0.0, 0.0));
        prop_assert!(gap(&again, &taylor) <= 1e-12);
        let oracle = taylor_to_basis(&|n| t.a.eval(n), &|n| t.b.eval(n), &taylor);
        let mut b = back.coeffs.clone();
        b.resize(f.len(), C::new(0.0, 0.0));
        prop_assert!(gap(&oracle[..f.len()], &b) <= 1e-12);
    }

    #[test]
    fn kernel_chain_on_random_triples(seed in any::<u64>(), n in 1usize..30) {
        let s = twin(seed, false).space(SpaceConfig::default().with_size(32));
        let m = build_matrix_sized(&s, 1, 32).unwrap();
        let img = apply_adjoint(&m, &s.coeff_functional_kn_len(n, 32).unwrap(), None);
        let w = s.w(n - 1).unwrap();
        let expect: Vec<C> = s.coeff_functional_kn_len(n - 1, 32).unwrap().coeffs.iter().map(|x| w * x).collect();
        let k = s.coeff_functional_kn_len(n, 32).unwrap();
        for j in 0..n {
            let mag: f64 = (j + 1..32).map(|i| m.entries[[i, j]].norm() * k.coeffs[i].norm()).sum::<f64>() + expect[j].norm();
            let d = (img.coeffs[j] - expect[j]).norm();
            prop_assert!(d < f64::MIN_POSITIVE || d <= 1e-12 * mag, "j {j}: {d} vs {mag}");
        }
        prop_assert!(img.coeffs[n..].iter().all(|x| *x == C::new(0.0, 0.0)));
    }

    #[test]
    fn orbit_step_is_linear(seed in any::<u64>(), u in coords(20), v in coords(20), sr in -2.0..2.0f64, si in -2.0..2.0f64) {
        let s = twin(seed, false).space(SpaceConfig::default().with_size(20));
        let mut o = Orbiter::new(&s, 20).unwrap();
        let scalar = C::new(sr, si);
        let ou = OrbitVec::from_dual(&DualVec::finite(u), "u");
        let ov = OrbitVec::from_dual(&DualVec::finite(v), "v");
        let lhs = o.step(&ou.scale(scalar).add(&ov).unwrap()).unwrap().0;
        let su = o.step(&ou).unwrap().0;
        let sv = o.step(&ov).unwrap().0;
        let rhs = su.scale(scalar).add(&sv).unwrap();
        prop_assert!(gap(&lhs.stored, &rhs.stored) <= 1e-12);
    }

    #[test]
    fn rank_one_closed_form_matches_powers(theta in 0.0..std::f64::consts::TAU, x in coords(12), n in 0usize..20) {
        let lambda = C::from_polar(1.0, theta);
        let a = rank_one_perturb_orbit(lambda, &x, n).unwrap();
        let b = rank_one_matrix_orbit(lambda, &x, n).unwrap();
        prop_assert!(gap(&a, &b) <= 1e-12);
        prop_assert!(a[1..].iter().enumerate().all(|(i, y)| *y == x.get(i + 1 + n).copied().unwrap_or_default()));
    }

    #[test]
    fn beta_bounds_scale_with_weights(seed in any::<u64>(), factor in 0.1..10.0f64) {
        let t = twin(seed, true);
        let base = beta_bounds(&t.space(SpaceConfig::default())).unwrap();
        let scaled_w = SequenceExpr::new(t.w.r, t.w.p.iter().map(|c| c * factor).collect(), t.w.q.clone()).unwrap();
        let triple = SequenceTriple::new(t.triple.a.clone(), t.triple.b.clone(), scaled_w, "scaled");
        let scaled = beta_bounds(&Space::new(triple, SpaceConfig::default()).unwrap()).unwrap();
        let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(1e-300);
        prop_assert!(rel(base.beta1 * factor, scaled.beta1) <= 1e-9);
        prop_assert!(rel(base.beta2 * factor, scaled.beta2) <= 1e-6, "{} vs {}", base.beta2 * factor, scaled.beta2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn monomial_norms_match_double_double(seed in any::<u64>(), n in 0usize..6) {
        let t = twin(seed, true);
        let s = t.space(SpaceConfig::default());
        let (ours, sv) = s.monomial_norm(n).unwrap();
        prop_assert!(sv.is_certified());
        // t <= 0.8 and the ratio's approach is O(1/k): 4000 terms leave far less than 1e-12
        let mut coeffs = Vec::with_capacity(4000);
        // b_k / a_(k+1) with the geometric factors cancelled by hand
        let poly = |d: &DirectSeq, k: usize| DirectSeq::new(C::new(1.0, 0.0), d.p.clone(), d.q.clone()).eval(k);
        let ratio = |k: usize| (t.b.r / t.a.r).powi(k as i32) / t.a.r * poly(&t.b, k) / poly(&t.a, k + 1);
        let mut cur = C::new(1.0, 0.0) / t.a.eval(n);
        for j in 0..4000 {
            coeffs.push(cur);
            cur = -cur * ratio(n + j);
        }
        let oracle = lp_norm_dd(&coeffs, s.p());
        prop_assert!((ours - oracle).abs() <= 1e-10 * oracle, "{ours} vs {oracle}");
    }

    #[test]
    fn eigenvectors_on_random_triples(seed in any::<u64>(), frac in 0.0..0.9f64, theta in 0.0..std::f64::consts::TAU) {
        let t = twin(seed, true);
        let triple = SequenceTriple::new(t.triple.a.clone(), t.triple.b.clone(), SequenceExpr::constant(C::new(1.0, 0.0)), "unit");
        let s = Space::new(triple, SpaceConfig::default().with_size(48)).unwrap();
        let (radius, _) = s.radius().unwrap();
        let lambda = C::from_polar(frac * radius, theta);
        let r = eigen_residual(&s, lambda).unwrap();
        let norm = lp_norm(&OrbitVec::ev(&s, lambda, 48).unwrap().stored, s.q());
        prop_assert!(r.within(), "{} > {}", r.value, r.bound);
        prop_assert!(r.value <= 1e-9 * norm.max(1.0));
    }
}

#[test]
fn eigen_tails_need_unit_weights() {
    let s = twin(3, true).space(SpaceConfig::default().with_size(32));
    assert!(eigen_residual(&s, C::new(0.1, 0.0)).is_err());
}

#[test]
fn eigenvalue_zero_is_exact() {
    for seed in 0..20 {
        let s = twin(seed, false).space(SpaceConfig::default().with_size(32));
        let r = eigen_residual(&s, C::new(0.0, 0.0)).unwrap();
        assert_eq!(r.value, 0.0, "seed {seed}");
    }
}

#[test]
fn oracle_sequences_match_closed_forms() {
    for seed in 0..50 {
        let t = twin(seed, false);
        for n in 0..200 {
            for (ours, oracle) in [(&t.triple.a, &t.a), (&t.triple.b, &t.b), (&t.triple.w, &t.w)] {
                let (x, y): (C, C) = (ours.eval(n).unwrap(), DirectSeq::eval(oracle, n));
                assert!((x - y).norm() <= 1e-12 * y.norm().max(1e-300), "seed {seed} n {n}: {x} vs {y}");
            }
        }
    }
}
