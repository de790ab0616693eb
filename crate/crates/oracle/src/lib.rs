//! Brute-force reference computations for the shiftlab test suites.
//!
//! Nothing here is shared with the production crate: sequences are evaluated
//! from their raw closed-form data, the operator acts on Taylor coefficients
//! directly, change-of-basis matrices are inverted densely, and series are
//! summed in double-double arithmetic.

pub mod dd;

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::BTreeMap;

pub use dd::DD;

pub type C = Complex64;

/// `r^n * P(n) / Q(n)` with finite overrides, from raw coefficient data.
#[derive(Clone, Debug)]
pub struct DirectSeq {
    pub r: C,
    pub p: Vec<C>,
    pub q: Vec<C>,
    pub overrides: BTreeMap<usize, C>,
}

impl DirectSeq {
    pub fn new(r: C, p: Vec<C>, q: Vec<C>) -> Self {
        DirectSeq { r, p, q, overrides: BTreeMap::new() }
    }

    pub fn with_override(mut self, n: usize, v: C) -> Self {
        self.overrides.insert(n, v);
        self
    }

    pub fn constant(v: f64) -> Self {
        DirectSeq::new(C::new(1.0, 0.0), vec![C::new(v, 0.0)], vec![C::new(1.0, 0.0)])
    }

    pub fn eval(&self, n: usize) -> C {
        if let Some(v) = self.overrides.get(&n) {
            return *v;
        }
        // power sums written out term by term, no Horner
        let x = n as f64;
        let mut num = C::new(0.0, 0.0);
        let mut xk = 1.0;
        for c in &self.p {
            num += c * xk;
            xk *= x;
        }
        let mut den = C::new(0.0, 0.0);
        xk = 1.0;
        for c in &self.q {
            den += c * xk;
            xk *= x;
        }
        pow_loop(self.r, n) * num / den
    }
}

/// `z^n` by left-to-right binary exponentiation.
pub fn pow_loop(z: C, n: usize) -> C {
    if n == 0 {
        return C::new(1.0, 0.0);
    }
    let bits = usize::BITS - n.leading_zeros();
    let mut acc = C::new(1.0, 0.0);
    for i in (0..bits).rev() {
        acc = acc * acc;
        if (n >> i) & 1 == 1 {
            acc *= z;
        }
    }
    acc
}

/// Applies `F_w^nu` on the Taylor side: `sum c_n z^n -> sum c_n w_n z^(n+1)`, repeated.
pub fn taylor_apply_fw(w: &dyn Fn(usize) -> C, taylor: &[C], nu: usize) -> Vec<C> {
    let mut cur = taylor.to_vec();
    for _ in 0..nu {
        let mut next = vec![C::new(0.0, 0.0); cur.len() + 1];
        for (n, c) in cur.iter().enumerate() {
            next[n + 1] = c * w(n);
        }
        cur = next;
    }
    cur
}

/// Basis coefficients of a polynomial given by Taylor coefficients, solving
/// `c_0 = l_0 a_0`, `c_n = l_n a_n + l_(n-1) b_(n-1)` one unknown at a time.
pub fn taylor_to_basis(a: &dyn Fn(usize) -> C, b: &dyn Fn(usize) -> C, taylor: &[C]) -> Vec<C> {
    let mut out: Vec<C> = Vec::with_capacity(taylor.len());
    for (n, c) in taylor.iter().enumerate() {
        let prev = if n == 0 { C::new(0.0, 0.0) } else { out[n - 1] * b(n - 1) };
        out.push((c - prev) / a(n));
    }
    out
}

/// Dense inverse of the triangular change of basis taking `f*_0..f*_n` to
/// `k_0..k_n`. Row `m` of the result holds the coefficients of `f*_m` over
/// `k_0..k_n`.
pub fn dense_basis_inverse(a: &dyn Fn(usize) -> C, b: &dyn Fn(usize) -> C, n: usize) -> Vec<Vec<C>> {
    let dim = n + 1;
    // row i: k_i = a_i f*_i + b_(i-1) f*_(i-1)
    let mut k = DMatrix::<C>::zeros(dim, dim);
    for i in 0..dim {
        k[(i, i)] = a(i);
        if i > 0 {
            k[(i, i - 1)] = b(i - 1);
        }
    }
    let inv = k.try_inverse().expect("triangular change of basis with nonzero diagonal");
    (0..dim).map(|m| (0..dim).map(|j| inv[(m, j)]).collect()).collect()
}

/// Double-double sum of `count` terms starting at `start`, plus an optional tail.
pub fn series_sum_highprec(term: &dyn Fn(usize) -> DD, start: usize, count: usize, tail: Option<DD>) -> DD {
    let mut acc = DD::ZERO;
    for n in start..start + count {
        acc = acc + term(n);
    }
    acc + tail.unwrap_or(DD::ZERO)
}

/// `sum_{j > m} 1/j^2` by Euler-Maclaurin, accurate to about `m^-9`.
pub fn zeta2_tail(m: usize) -> DD {
    let x = DD::new(m as f64);
    let inv = x.recip();
    let inv2 = inv * inv;
    let inv3 = inv2 * inv;
    let inv5 = inv3 * inv2;
    let inv7 = inv5 * inv2;
    // 1/m - 1/(2m^2) + 1/(6m^3) - 1/(30m^5) + 1/(42m^7)
    inv - inv2 / DD::new(2.0) + inv3 / DD::new(6.0) - inv5 / DD::new(30.0) + inv7 / DD::new(42.0)
}

/// pi^2 / 6 in double-double.
pub fn zeta2() -> DD {
    DD::PI * DD::PI / DD::new(6.0)
}

/// `sum_{n >= 1} 1 / (n^2 64^(n-1))`, the q = 2 chaos series of the 8^n example.
pub fn chaos_series_example() -> DD {
    let term = |n: usize| DD::ONE / (DD::new((n * n) as f64) * DD::new(64.0).powi(n as u32 - 1));
    series_sum_highprec(&term, 1, 40, None)
}

/// Modulus-based `l^s` norm of a finite complex list, in double-double.
pub fn lp_norm_dd(v: &[C], s: f64) -> f64 {
    let mut acc = DD::ZERO;
    for x in v {
        acc = acc + DD::new(x.norm().powf(s));
    }
    acc.to_f64().powf(1.0 / s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta2_from_partial_sum_and_tail() {
        let m = 10_000;
        let s = series_sum_highprec(&|j| DD::ONE / DD::new((j * j) as f64), 1, m, Some(zeta2_tail(m)));
        assert!((s - zeta2()).to_f64().abs() < 1e-25);
    }

    #[test]
    fn empty_series_is_zero() {
        let s = series_sum_highprec(&|_| DD::ONE, 0, 0, None);
        assert_eq!(s.to_f64(), 0.0);
    }

    #[test]
    fn chaos_series_value() {
        let v = chaos_series_example().to_f64();
        // independently checked with a 40-digit mpmath sum
        assert!((v - 1.003_933_617_565_046_6).abs() < 1e-15, "{v}");
    }

    #[test]
    fn taylor_shift_examples() {
        let two = |_n: usize| C::new(2.0, 0.0);
        let out = taylor_apply_fw(&two, &[C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)], 1);
        assert_eq!(out[1], C::new(2.0, 0.0));
        let once = taylor_apply_fw(&two, &[C::new(1.0, 0.0), C::new(3.0, 0.0)], 1);
        let twice = taylor_apply_fw(&two, &once, 1);
        assert_eq!(twice, taylor_apply_fw(&two, &[C::new(1.0, 0.0), C::new(3.0, 0.0)], 2));
    }

    #[test]
    fn pow_loop_matches_repeated_product() {
        let z = C::new(0.3, -1.1);
        let mut p = C::new(1.0, 0.0);
        for n in 0..40 {
            assert!((pow_loop(z, n) - p).norm() <= 1e-13 * p.norm().max(1.0));
            p *= z;
        }
    }
}
