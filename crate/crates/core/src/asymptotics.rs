//! Exact asymptotics of closed-form terms and certified tails of the series
//! built from them.
//!
//! A [`Term`] is `scale * r^n * N(n) / D(n)` for `n >= valid_from`. Terms are
//! closed under shifts, products and quotients, and under sums when the
//! geometric factors agree. Everything the criteria need (ratios such as
//! `b_n / a_(n+1)`, the weights `w_n a_n / a_(n+1)`, the coefficients `c_n`)
//! is expressed this way, so limits and eventual bounds come from the
//! polynomial data instead of from scanning.
//!
//! Tail bounds rest on the envelope
//! `|c_d| k^d (1 - K/k) <= |P(k)| <= |c_d| k^d (1 + K/k)` with
//! `K = sum_{i<d} |c_i| / |c_d|`, valid for `k >= 1`. Geometric factors whose
//! modulus is within [`UNIT_TOL`] of one are treated as exactly unimodular.

use crate::poly::{Poly, RealPoly, Series, C};

/// Relative tolerance for deciding that two geometric moduli are equal.
pub const UNIT_TOL: f64 = 1e-13;
/// Relative trimming threshold after cancelling subtractions.
pub const TRIM_TOL: f64 = 1e-13;
/// Number of terms in the asymptotic tail expansion.
const PHI_ORDER: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub scale: C,
    pub ratio: C,
    pub num: Poly,
    pub den: Poly,
    pub valid_from: usize,
}

fn same_ratio(a: C, b: C) -> bool {
    (a - b).norm() <= UNIT_TOL * a.norm().max(b.norm())
}

impl Term {
    pub fn constant(c: C) -> Term {
        Term { scale: c, ratio: C::new(1.0, 0.0), num: Poly::one(), den: Poly::one(), valid_from: 0 }
    }

    /// `z^n`.
    pub fn geometric(z: C) -> Term {
        Term { scale: C::new(1.0, 0.0), ratio: z, num: Poly::one(), den: Poly::one(), valid_from: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.scale == C::new(0.0, 0.0) || self.num.is_zero() || self.ratio == C::new(0.0, 0.0)
    }

    pub fn eval(&self, n: usize) -> C {
        self.scale * self.ratio.powi(n as i32) * self.num.eval(n as f64) / self.den.eval(n as f64)
    }

    /// The term `n -> self(n + s)`.
    pub fn shift(&self, s: usize) -> Term {
        Term {
            scale: self.scale * self.ratio.powi(s as i32),
            ratio: self.ratio,
            num: self.num.shift(s as f64),
            den: self.den.shift(s as f64),
            valid_from: self.valid_from.saturating_sub(s),
        }
    }

    pub fn mul(&self, o: &Term) -> Term {
        Term {
            scale: self.scale * o.scale,
            ratio: self.ratio * o.ratio,
            num: self.num.mul(&o.num),
            den: self.den.mul(&o.den),
            valid_from: self.valid_from.max(o.valid_from),
        }
    }

    pub fn recip(&self) -> Term {
        Term {
            scale: self.scale.inv(),
            ratio: self.ratio.inv(),
            num: self.den.clone(),
            den: self.num.clone(),
            valid_from: self.valid_from,
        }
    }

    pub fn div(&self, o: &Term) -> Term {
        self.mul(&o.recip())
    }

    pub fn scaled(&self, s: C) -> Term {
        Term { scale: self.scale * s, ..self.clone() }
    }

    /// Exact sum when both geometric factors agree, `None` otherwise.
    pub fn add(&self, o: &Term) -> Option<Term> {
        if o.is_zero() {
            return Some(self.clone());
        }
        if self.is_zero() {
            return Some(o.clone());
        }
        if !same_ratio(self.ratio, o.ratio) {
            return None;
        }
        let num = self
            .num
            .mul(&o.den)
            .scale(self.scale)
            .add(&o.num.mul(&self.den).scale(o.scale))
            .trimmed(TRIM_TOL);
        Some(Term {
            scale: C::new(1.0, 0.0),
            ratio: self.ratio,
            num,
            den: self.den.mul(&o.den),
            valid_from: self.valid_from.max(o.valid_from),
        })
    }

    pub fn sub(&self, o: &Term) -> Option<Term> {
        self.add(&o.scaled(C::new(-1.0, 0.0)))
    }

    /// Every `n >= valid_from` beyond which the denominator has no root.
    pub fn regular_from(&self) -> usize {
        let bound = if self.den.degree() == 0 { 0.0 } else { self.den.root_bound() };
        self.valid_from.max(bound.ceil() as usize + 1)
    }

    pub fn profile(&self) -> Profile {
        let mut sigma = self.ratio.norm();
        if (sigma - 1.0).abs() <= UNIT_TOL {
            sigma = 1.0;
        }
        Profile {
            sigma,
            c: self.scale.norm(),
            a: self.num.modulus_sq(),
            b: self.den.modulus_sq(),
            valid_from: self.regular_from(),
            zero: self.is_zero(),
        }
    }

    /// `term(k) ~ lead * k^e * (1 + s_1/k + ...)` expansion of the rational
    /// part (complex), normalized by its leading behaviour.
    fn rational_series(&self, len: usize) -> Vec<C> {
        let rev = |p: &Poly| -> Vec<C> {
            let d = p.degree();
            let lead = p.lead();
            (0..len).map(|i| if i <= d { p.coeffs[d - i] / lead } else { C::new(0.0, 0.0) }).collect()
        };
        cdiv(&rev(&self.num), &rev(&self.den))
    }
}

fn cdiv(a: &[C], b: &[C]) -> Vec<C> {
    let n = a.len().min(b.len());
    let mut out = vec![C::new(0.0, 0.0); n];
    for i in 0..n {
        let mut acc = a[i];
        for j in 1..=i {
            acc -= b[j] * out[i - j];
        }
        out[i] = acc / b[0];
    }
    out
}

/// Limit of a nonnegative sequence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Limit {
    Finite(f64),
    Infinite,
}

impl Limit {
    pub fn value(self) -> f64 {
        match self {
            Limit::Finite(v) => v,
            Limit::Infinite => f64::INFINITY,
        }
    }
}

/// Modulus data: `|term(k)| = c * sigma^k * sqrt(A(k) / B(k))` for `k >= valid_from`.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub sigma: f64,
    pub c: f64,
    pub a: RealPoly,
    pub b: RealPoly,
    pub valid_from: usize,
    pub zero: bool,
}

/// `ln g(k) = -alpha/k + E(k)` with `|E(k)| <= beta/k^2` for `k >= k0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogExpansion {
    pub alpha: f64,
    pub beta: f64,
    pub k0: usize,
}

impl Profile {
    fn degree_gap(&self) -> f64 {
        (self.a.degree() as f64 - self.b.degree() as f64) / 2.0
    }

    pub fn eval(&self, k: usize) -> f64 {
        if self.zero {
            return 0.0;
        }
        let x = k as f64;
        self.c * self.sigma.powf(x) * (self.a.eval(x) / self.b.eval(x)).sqrt()
    }

    pub fn limit(&self) -> Limit {
        if self.zero {
            return Limit::Finite(0.0);
        }
        if self.sigma < 1.0 {
            return Limit::Finite(0.0);
        }
        if self.sigma > 1.0 {
            return Limit::Infinite;
        }
        let gap = self.degree_gap();
        if gap < 0.0 {
            Limit::Finite(0.0)
        } else if gap > 0.0 {
            Limit::Infinite
        } else {
            Limit::Finite(self.c * (self.a.lead() / self.b.lead()).sqrt())
        }
    }

    fn ln_upper(&self, k: f64) -> f64 {
        let ka = self.a.envelope_constant();
        let kb = self.b.envelope_constant();
        self.c.ln()
            + k * self.sigma.ln()
            + 0.5
                * ((self.a.lead().abs()).ln() + self.a.degree() as f64 * k.ln() + (1.0 + ka / k).ln()
                    - (self.b.lead().abs()).ln()
                    - self.b.degree() as f64 * k.ln()
                    - (1.0 - kb / k).ln())
    }

    fn ln_lower(&self, k: f64) -> f64 {
        let ka = self.a.envelope_constant();
        let kb = self.b.envelope_constant();
        self.c.ln()
            + k * self.sigma.ln()
            + 0.5
                * ((self.a.lead().abs()).ln() + self.a.degree() as f64 * k.ln() + (1.0 - ka / k).ln()
                    - (self.b.lead().abs()).ln()
                    - self.b.degree() as f64 * k.ln()
                    - (1.0 + kb / k).ln())
    }

    /// Rigorous upper envelope of the modulus at `k` (needs `k > K_B`).
    pub fn upper(&self, k: usize) -> f64 {
        if self.zero {
            return 0.0;
        }
        self.ln_upper(k as f64).exp()
    }

    /// Smallest checked `N0` with `modulus(k) <= theta` for every `k >= N0`,
    /// found by doubling and bisection on the decreasing upper envelope.
    pub fn eventual_upper(&self, theta: f64, cap: usize) -> Option<usize> {
        if self.zero {
            return Some(self.valid_from);
        }
        let kb = self.b.envelope_constant();
        let gap = self.degree_gap() * 2.0;
        // envelope derivative: ln sigma + gap/(2k) + (negative terms)
        let k_mono = if self.sigma < 1.0 {
            if gap > 0.0 {
                (gap / (2.0 * -self.sigma.ln())).ceil()
            } else {
                0.0
            }
        } else if self.sigma == 1.0 && gap <= 0.0 {
            0.0
        } else {
            return None;
        };
        let start = (self.valid_from as f64).max(kb.floor() + 1.0).max(k_mono).max(1.0) as usize;
        let ok = |k: usize| self.ln_upper(k as f64) <= theta.ln();
        if ok(start) {
            return Some(start);
        }
        let mut hi = start.max(1);
        while !ok(hi) {
            if hi >= cap {
                return None;
            }
            hi = (hi * 2).min(cap);
        }
        let mut lo = start;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }

    /// `N0` with `modulus(k) >= theta` for all `k >= N0` (increasing lower envelope).
    pub fn eventual_lower(&self, theta: f64, cap: usize) -> Option<usize> {
        if self.zero {
            return None;
        }
        let ka = self.a.envelope_constant();
        let gap = self.degree_gap() * 2.0;
        let k_mono = if self.sigma > 1.0 {
            if gap < 0.0 {
                (-gap / (2.0 * self.sigma.ln())).ceil()
            } else {
                0.0
            }
        } else if self.sigma == 1.0 && gap >= 0.0 {
            0.0
        } else {
            return None;
        };
        let start = (self.valid_from as f64).max(ka.floor() + 1.0).max(k_mono).max(1.0) as usize;
        let ok = |k: usize| self.ln_lower(k as f64) >= theta.ln();
        let mut hi = start;
        while !ok(hi) {
            if hi >= cap {
                return None;
            }
            hi = (hi * 2).min(cap);
        }
        Some(hi)
    }

    /// Available when the modulus tends to one through a unimodular factor.
    pub fn log_expansion(&self) -> Option<LogExpansion> {
        if self.zero || self.sigma != 1.0 || self.degree_gap() != 0.0 {
            return None;
        }
        let lim = self.c * (self.a.lead() / self.b.lead()).sqrt();
        if (lim - 1.0).abs() > UNIT_TOL {
            return None;
        }
        let sa = self.a.reversed_normalized(self.a.degree() + 1);
        let sb = self.b.reversed_normalized(self.b.degree() + 1);
        // k0 >= 4 max |c_i|^(1/i) keeps |sum c_i k^-i| <= 1/3 for k >= k0; the
        // sums below are weighted by k0 so shifted polynomials stay sharp
        let growth = |s: &Series| s.0.iter().enumerate().skip(1).map(|(i, c)| c.abs().powf(1.0 / i as f64)).fold(0.0, f64::max);
        let k0 = (4.0 * growth(&sa).max(growth(&sb))).ceil().max(self.valid_from as f64).max(2.0);
        let weighted = |s: &Series, from: usize| s.0.iter().enumerate().skip(from).map(|(i, c)| c.abs() * k0.powi(from as i32 - i as i32)).sum::<f64>();
        let first = |s: &Series| s.0.get(1).copied().unwrap_or(0.0);
        let (s_a, s_b) = (weighted(&sa, 1), weighted(&sb, 1));
        let alpha = -0.5 * (first(&sa) - first(&sb));
        let beta = 0.5 * ((s_a * s_a + weighted(&sa, 2)) + (s_b * s_b + weighted(&sb, 2)));
        let k0 = k0 as usize;
        Some(LogExpansion { alpha, beta, k0 })
    }

    /// `g(k)^s` as a power series in `1/k`, normalized so the constant term is
    /// `limit^s`. Requires `sigma == 1` and equal degrees.
    fn power_series(&self, s: f64, len: usize) -> Option<Series> {
        if self.zero || self.sigma != 1.0 || self.degree_gap() != 0.0 {
            return None;
        }
        let sa = self.a.reversed_normalized(len);
        let sb = self.b.reversed_normalized(len);
        let ln = Series(sa.ln1().0.iter().zip(sb.ln1().0.iter()).map(|(x, y)| 0.5 * s * (x - y)).collect());
        let lim = match self.limit() {
            Limit::Finite(v) => v,
            Limit::Infinite => return None,
        };
        Some(ln.exp0().scale(lim.powf(s)))
    }
}

/// Coefficients `d_m` (from `m = -1` when the ratio tends to one, else from
/// `m = 0`) of `phi(k) = sum d_m k^-m` solving `phi(k) - phi(k+1) G(k) = 1`,
/// where `G(k) = sum_i g_i k^-i`. Then `sum_{k>=J} T_k = phi(J) T_J` for terms
/// with `T_(k+1) = G(k) T_k`.
pub fn tail_multiplier_coeffs(g: &[C]) -> (i32, Vec<C>) {
    let one = C::new(1.0, 0.0);
    let len = g.len();
    let unit = (g[0] - one).norm() <= 1e-12;
    // E_m = (1+x)^(-m) G(x), coefficient i
    let e = |m: i32, i: usize| -> C {
        // binomial series of (1+x)^(-m)
        let mut acc = C::new(0.0, 0.0);
        let mut bin = 1.0;
        for j in 0..=i {
            if j > 0 {
                bin *= (-(m as f64) - (j - 1) as f64) / j as f64;
            }
            acc += g[i - j] * bin;
        }
        acc
    };
    if unit {
        // d_(-1) .. d_(len-3)
        let mut d: Vec<C> = Vec::new();
        for n in 0..(len as i32 - 1) {
            let rhs = if n == 0 { one } else { C::new(0.0, 0.0) };
            let mut acc = rhs;
            for (idx, dm) in d.iter().enumerate() {
                let m = idx as i32 - 1;
                if m < n - 1 {
                    acc += dm * e(m, (n - m) as usize);
                }
            }
            let pivot = e(n - 1, 1);
            d.push(-acc / pivot);
        }
        (-1, d)
    } else {
        let mut d: Vec<C> = Vec::new();
        for n in 0..len as i32 {
            let mut acc = if n == 0 { one } else { C::new(0.0, 0.0) };
            for (m, dm) in d.iter().enumerate() {
                acc += dm * e(m as i32, (n as usize) - m);
            }
            d.push(acc / (one - g[0]));
        }
        (0, d)
    }
}

/// Evaluates `phi(J)` from [`tail_multiplier_coeffs`].
pub fn tail_multiplier(g: &[C], j: usize) -> C {
    let (start, d) = tail_multiplier_coeffs(g);
    let x = 1.0 / j as f64;
    d.iter().enumerate().fold(C::new(0.0, 0.0), |acc, (i, c)| acc + c * x.powi(start + i as i32))
}

/// Outcome of a certified tail computation for `sum_{k >= J} t_k^s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailSum {
    /// Estimate of the tail and a rigorous bound on `|tail - estimate|`.
    Converges { estimate: f64, halfwidth: f64 },
    Diverges,
    /// The analysis applies only from this index on; sum further explicitly.
    Advance(usize),
    Unknown,
}

/// Tail `sum_{k >= j} t_k^s` of a product sequence `t_(k+1) = t_k g(k)`,
/// where `g` has the modulus profile `step`.
pub fn power_tail(step: &Profile, j: usize, t_j: f64, s: f64) -> TailSum {
    if t_j == 0.0 {
        return TailSum::Converges { estimate: 0.0, halfwidth: 0.0 };
    }
    if j < step.valid_from {
        return TailSum::Advance(step.valid_from);
    }
    const CAP: usize = 1usize << 40;
    match step.limit() {
        Limit::Infinite => TailSum::Diverges,
        Limit::Finite(l) if l > 1.0 => {
            if step.eventual_lower(0.5 * (1.0 + l), CAP).is_some() {
                TailSum::Diverges
            } else {
                TailSum::Unknown
            }
        }
        Limit::Finite(l) if l < 1.0 => {
            let theta = 0.5 * (1.0 + l);
            match step.eventual_upper(theta, CAP) {
                Some(n0) if j >= n0 => {
                    let lo = t_j.powf(s);
                    let hi = lo / (1.0 - theta.powf(s));
                    let estimate = asymptotic_estimate(step, j, t_j, s).filter(|e| *e >= lo && *e <= hi);
                    let est = estimate.unwrap_or(0.5 * (lo + hi));
                    TailSum::Converges { estimate: est, halfwidth: (hi - est).max(est - lo) }
                }
                Some(n0) => TailSum::Advance(n0),
                None => TailSum::Unknown,
            }
        }
        Limit::Finite(_) => {
            let Some(ex) = step.log_expansion() else {
                return TailSum::Unknown;
            };
            let a = ex.alpha * s;
            if a <= 1.0 {
                return TailSum::Diverges;
            }
            if j < ex.k0 {
                return TailSum::Advance(ex.k0);
            }
            let jf = j as f64;
            let ts = t_j.powf(s);
            let hi = ts * (s * ex.beta / (jf - 1.0)).exp() * (jf / (a - 1.0) + 1.0);
            let lo = ts * (-s * ex.beta / (jf - 1.0)).exp() * ((jf - 1.0) / jf).powf(a) * jf / (a - 1.0);
            let estimate = asymptotic_estimate(step, j, t_j, s).filter(|e| *e >= lo && *e <= hi);
            let est = estimate.unwrap_or(0.5 * (lo + hi));
            TailSum::Converges { estimate: est, halfwidth: (hi - est).max(est - lo) }
        }
    }
}

fn asymptotic_estimate(step: &Profile, j: usize, t_j: f64, s: f64) -> Option<f64> {
    let series = step.power_series(s, PHI_ORDER + 2)?;
    let g: Vec<C> = series.0.iter().map(|v| C::new(*v, 0.0)).collect();
    let phi = tail_multiplier(&g, j);
    let v = phi.re * t_j.powf(s);
    v.is_finite().then_some(v)
}

/// Tail `sup_{k >= j} t_k` of a product sequence.
pub fn sup_tail(step: &Profile, j: usize, t_j: f64) -> TailSum {
    if t_j == 0.0 {
        return TailSum::Converges { estimate: 0.0, halfwidth: 0.0 };
    }
    if j < step.valid_from {
        return TailSum::Advance(step.valid_from);
    }
    match step.limit() {
        Limit::Infinite => TailSum::Diverges,
        Limit::Finite(l) if l > 1.0 => TailSum::Diverges,
        Limit::Finite(l) if l < 1.0 => match step.eventual_upper(0.5 * (1.0 + l), 1usize << 40) {
            Some(n0) if j >= n0 => TailSum::Converges { estimate: t_j, halfwidth: 0.0 },
            Some(n0) => TailSum::Advance(n0),
            None => TailSum::Unknown,
        },
        Limit::Finite(_) => {
            let Some(ex) = step.log_expansion() else {
                return TailSum::Unknown;
            };
            if ex.alpha < 0.0 {
                return TailSum::Diverges;
            }
            let need = if ex.alpha > 0.0 { (ex.beta / ex.alpha).ceil() as usize } else { 0 };
            let need = need.max(ex.k0);
            if j < need {
                return TailSum::Advance(need);
            }
            if ex.alpha > 0.0 {
                TailSum::Converges { estimate: t_j, halfwidth: 0.0 }
            } else {
                let hi = t_j * (ex.beta / (j as f64 - 1.0)).exp();
                TailSum::Converges { estimate: hi, halfwidth: 0.0 }
            }
        }
    }
}

/// Asymptotic estimate of `sum_{k >= j} T_k` for complex terms with
/// `T_(k+1) = ratio(k) T_k` and `ratio -> 1` or `|ratio| -> L < 1`, ratio a
/// closed-form [`Term`] with unit geometric factor. `None` when not applicable.
pub fn complex_tail_estimate(ratio: &Term, j: usize, t_j: C) -> Option<C> {
    let profile = ratio.profile();
    if profile.sigma != 1.0 || (ratio.ratio - C::new(1.0, 0.0)).norm() > UNIT_TOL {
        return None;
    }
    if profile.a.degree() != profile.b.degree() || j < profile.valid_from {
        return None;
    }
    let lead = ratio.scale * ratio.num.lead() / ratio.den.lead();
    let series: Vec<C> = ratio.rational_series(PHI_ORDER + 2).iter().map(|c| c * lead).collect();
    if (series[0] - C::new(1.0, 0.0)).norm() > 1e-12 && series[0].norm() >= 1.0 {
        return None;
    }
    let phi = tail_multiplier(&series, j);
    let v = phi * t_j;
    (v.re.is_finite() && v.im.is_finite()).then_some(v)
}
