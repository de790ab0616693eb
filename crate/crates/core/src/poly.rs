//! Small dense polynomials and truncated power series.
//!
//! Polynomials are stored in ascending order. The asymptotic machinery works
//! with the reversed expansion `P(k) = lead * k^d * (1 + c_1/k + c_2/k^2 + ...)`,
//! which is a truncated power series in `x = 1/k`.

use num_complex::Complex64;

pub type C = Complex64;

/// Complex polynomial in one variable, ascending coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<C>,
}

impl Poly {
    pub fn new(coeffs: Vec<C>) -> Self {
        let mut p = Poly { coeffs };
        p.trim_exact();
        p
    }

    pub fn constant(c: C) -> Self {
        Poly::new(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(C::new(1.0, 0.0))
    }

    fn trim_exact(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(|c| *c == C::new(0.0, 0.0)) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(C::new(0.0, 0.0));
        }
    }

    /// Drops leading coefficients that are below `rel` times the largest one.
    /// Used after subtractions where exact cancellation leaves rounding residue.
    pub fn trimmed(mut self, rel: f64) -> Self {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(|c| c.norm() <= rel * scale) {
            self.coeffs.pop();
        }
        if scale == 0.0 || self.coeffs.len() == 1 && self.coeffs[0].norm() <= rel * scale {
            self.coeffs = vec![C::new(0.0, 0.0)];
        }
        self
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == C::new(0.0, 0.0))
    }

    pub fn lead(&self) -> C {
        *self.coeffs.last().expect("nonempty")
    }

    pub fn eval(&self, x: f64) -> C {
        self.coeffs.iter().rev().fold(C::new(0.0, 0.0), |acc, c| acc * x + c)
    }

    pub fn scale(&self, s: C) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![C::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Poly, i: usize| p.coeffs.get(i).copied().unwrap_or_default();
        Poly::new((0..n).map(|i| get(self, i) + get(other, i)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(C::new(-1.0, 0.0)))
    }

    /// `P(x + s)` via binomial expansion.
    pub fn shift(&self, s: f64) -> Poly {
        if s == 0.0 {
            return self.clone();
        }
        let d = self.coeffs.len();
        let mut out = vec![C::new(0.0, 0.0); d];
        for (k, c) in self.coeffs.iter().enumerate() {
            // (x+s)^k = sum_j C(k,j) s^(k-j) x^j
            let mut binom = 1.0;
            for j in 0..=k {
                if j > 0 {
                    binom = binom * (k + 1 - j) as f64 / j as f64;
                }
                out[j] += c * binom * s.powi((k - j) as i32);
            }
        }
        Poly::new(out)
    }

    /// `|P(x)|^2` for real `x`, as a real polynomial.
    pub fn modulus_sq(&self) -> RealPoly {
        let conj = Poly::new(self.coeffs.iter().map(|c| c.conj()).collect());
        RealPoly::new(self.mul(&conj).coeffs.iter().map(|c| c.re).collect())
    }

    /// `sum_{i<d} |c_i| / |c_d|`: for `x >= 1`, `|P(x)|` lies within
    /// `|c_d| x^d (1 +- K/x)`.
    pub fn envelope_constant(&self) -> f64 {
        let d = self.degree();
        let lead = self.lead().norm();
        self.coeffs[..d].iter().map(|c| c.norm()).sum::<f64>() / lead
    }

    /// Cauchy bound: every root `z` has `|z| <= 1 + max_i |c_i / c_d|`.
    pub fn root_bound(&self) -> f64 {
        let d = self.degree();
        let lead = self.lead().norm();
        1.0 + self.coeffs[..d].iter().map(|c| c.norm() / lead).fold(0.0, f64::max)
    }
}

/// Real polynomial, ascending coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPoly {
    pub coeffs: Vec<f64>,
}

impl RealPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        RealPoly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn lead(&self) -> f64 {
        *self.coeffs.last().expect("nonempty")
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn mul(&self, other: &RealPoly) -> RealPoly {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RealPoly::new(out)
    }

    pub fn envelope_constant(&self) -> f64 {
        let d = self.degree();
        self.coeffs[..d].iter().map(|c| c.abs()).sum::<f64>() / self.lead().abs()
    }

    /// Normalized reversed expansion `[1, c_(d-1)/c_d, c_(d-2)/c_d, ...]`,
    /// i.e. `P(k) / (c_d k^d)` as a power series in `1/k`.
    pub fn reversed_normalized(&self, len: usize) -> Series {
        let d = self.degree();
        let lead = self.lead();
        Series((0..len).map(|i| if i <= d { self.coeffs[d - i] / lead } else { 0.0 }).collect())
    }
}

/// Truncated real power series `s_0 + s_1 x + ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series(pub Vec<f64>);

impl Series {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, o: &Series) -> Series {
        let n = self.len().min(o.len());
        let mut out = vec![0.0; n];
        for i in 0..n {
            for j in 0..n - i {
                out[i + j] += self.0[i] * o.0[j];
            }
        }
        Series(out)
    }

    pub fn div(&self, o: &Series) -> Series {
        let n = self.len().min(o.len());
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.0[i];
            for j in 1..=i {
                acc -= o.0[j] * out[i - j];
            }
            out[i] = acc / o.0[0];
        }
        Series(out)
    }

    pub fn scale(&self, s: f64) -> Series {
        Series(self.0.iter().map(|c| c * s).collect())
    }

    /// `ln(s)` for a series with `s_0 = 1`.
    pub fn ln1(&self) -> Series {
        let n = self.len();
        // (ln s)' = s' / s
        let deriv = Series((1..n).map(|i| i as f64 * self.0[i]).chain(std::iter::once(0.0)).collect());
        let q = deriv.div(self);
        let mut out = vec![0.0; n];
        for i in 1..n {
            out[i] = q.0[i - 1] / i as f64;
        }
        Series(out)
    }

    /// `exp(s)` for a series with `s_0 = 0`.
    pub fn exp0(&self) -> Series {
        let n = self.len();
        let mut out = vec![0.0; n];
        out[0] = 1.0;
        // e' = s' e
        for m in 1..n {
            let mut acc = 0.0;
            for k in 1..=m {
                acc += k as f64 * self.0[k] * out[m - k];
            }
            out[m] = acc / m as f64;
        }
        Series(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C {
        C::new(x, 0.0)
    }

    #[test]
    fn shift_matches_direct_evaluation() {
        let p = Poly::new(vec![c(1.0), C::new(0.5, -2.0), c(3.0)]);
        let s = p.shift(2.5);
        for x in [0.0, 1.0, 7.3] {
            assert!((s.eval(x) - p.eval(x + 2.5)).norm() < 1e-12);
        }
    }

    #[test]
    fn modulus_sq_is_real_square() {
        let p = Poly::new(vec![C::new(1.0, 2.0), C::new(-0.5, 0.25)]);
        let m = p.modulus_sq();
        for x in [0.0, 2.0, 11.0] {
            assert!((m.eval(x) - p.eval(x).norm_sqr()).abs() < 1e-10);
        }
    }

    #[test]
    fn envelope_brackets_modulus() {
        let p = Poly::new(vec![c(3.0), c(-2.0), c(0.5)]);
        let k = p.envelope_constant();
        for x in [10.0, 40.0, 1000.0] {
            let v = p.eval(x).norm();
            let base = 0.5 * x * x;
            assert!(v <= base * (1.0 + k / x) && v >= base * (1.0 - k / x));
        }
    }

    #[test]
    fn trimmed_drops_cancellation_residue() {
        let p = Poly::new(vec![c(1.0), c(2.0), c(1e-18)]).trimmed(1e-13);
        assert_eq!(p.degree(), 1);
    }

    #[test]
    fn series_ln_exp_round_trip() {
        let s = Series(vec![1.0, 0.3, -0.2, 0.05, 0.0, 0.0]);
        let back = s.ln1().exp0();
        for (a, b) in back.0.iter().zip(&s.0) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn series_division() {
        // 1/(1-x) = 1 + x + x^2 + ...
        let one = Series(vec![1.0, 0.0, 0.0, 0.0]);
        let d = Series(vec![1.0, -1.0, 0.0, 0.0]);
        assert_eq!(one.div(&d).0, vec![1.0, 1.0, 1.0, 1.0]);
    }
}
