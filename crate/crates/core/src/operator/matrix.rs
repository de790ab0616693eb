//! Truncations of `[F_w^nu]` in the `f_n` basis and the forward/adjoint actions.
//!
//! Column `j` of `[F_w^nu]` is the image of `f_j`:
//! row `j+nu` holds `A_(j,nu)`, row `j+nu+1` holds `c_(j,nu)`, and every later
//! row continues by the factor `-b_k / a_(k+1)`. The adjoint acts on
//! `f_n^*`-coordinates by the transpose.

use ndarray::Array2;
use serde::Serialize;

use crate::asymptotics::Term;
use crate::error::{Error, Result};
use crate::poly::C;
use crate::sequences::{CertKind, LogC, INDEX_CAP};
use crate::series::{sum_powers, SumOptions};
use crate::space::{DualVec, FunctionVec, Space};
use crate::summation::{lp_norm, ComplexNeumaier};

/// Powers up to which the coefficients are also kept in closed form
/// (polynomial degrees grow linearly with the power).
const CLOSED_FORM_MAX_NU: usize = 4;

fn zero() -> C {
    C::new(0.0, 0.0)
}

/// `A_(n,nu) = w_n..w_(n+nu-1) a_n / a_(n+nu)` and
/// `c_(n,nu) = w_(n+1)..w_(n+nu) b_n / a_(n+nu+1)
///            - w_n..w_(n+nu-1) a_n b_(n+nu) / (a_(n+nu) a_(n+nu+1))`.
#[derive(Clone, Debug)]
pub struct ShiftCoefficients<'a> {
    space: &'a Space,
    nu: usize,
    a_term: Option<Term>,
    c_term: Option<Term>,
}

fn weight_block(w: &Term, start: usize, count: usize) -> Term {
    (start..start + count).fold(Term::constant(C::new(1.0, 0.0)), |acc, i| acc.mul(&w.shift(i)))
}

impl<'a> ShiftCoefficients<'a> {
    pub fn new(space: &'a Space, nu: usize) -> Self {
        assert!(nu >= 1, "power must be at least one");
        let t = &space.triple;
        let (mut a_term, mut c_term) = (None, None);
        if nu <= CLOSED_FORM_MAX_NU {
            if let (Some(a), Some(b), Some(w)) = (t.a.term(), t.b.term(), t.w.term()) {
                let big_a = weight_block(&w, 0, nu).mul(&a).div(&a.shift(nu));
                let first = weight_block(&w, 1, nu).mul(&b).div(&a.shift(nu + 1));
                let second = big_a.mul(&b.shift(nu)).div(&a.shift(nu + 1));
                c_term = first.sub(&second);
                a_term = Some(big_a);
            }
        }
        ShiftCoefficients { space, nu, a_term, c_term }
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    /// Closed form of `n -> A_(n,nu)` when available.
    pub fn a_term(&self) -> Option<&Term> {
        self.a_term.as_ref()
    }

    /// Closed form of `n -> c_(n,nu)` when available.
    pub fn c_term(&self) -> Option<&Term> {
        self.c_term.as_ref()
    }

    fn w_log(&self, start: usize, count: usize) -> Result<LogC> {
        let mut acc = LogC::ONE;
        for k in start..start + count {
            let v = self.space.triple.w.eval_log(k)?;
            if v.is_zero() {
                return Err(Error::ZeroWeight(k));
            }
            acc = acc.mul(v);
        }
        Ok(acc)
    }

    fn a_log(&self, n: usize) -> Result<LogC> {
        self.space.triple.a.eval_log(n)
    }

    fn b_log(&self, n: usize) -> Result<LogC> {
        self.space.triple.b.eval_log(n)
    }

    fn w_factors(&self, start: usize, count: usize) -> Result<Vec<C>> {
        (start..start + count).map(|k| self.space.triple.w.eval(k)).collect()
    }

    // Entries come from the factored products: the combined closed forms are
    // kept for asymptotics, their expanded numerators cancel when evaluated.
    pub fn big_a(&self, n: usize) -> Result<C> {
        let t = &self.space.triple;
        let num = [self.w_factors(n, self.nu)?, vec![t.a.eval(n)?]].concat();
        match linear(&num, &[t.a.eval(n + self.nu)?]) {
            Some(v) => Ok(v),
            None => Ok(self.big_a_log(n)?.to_c()),
        }
    }

    fn big_a_log(&self, n: usize) -> Result<LogC> {
        Ok(self.w_log(n, self.nu)?.mul(self.a_log(n)?).div(self.a_log(n + self.nu)?))
    }

    pub fn c(&self, n: usize) -> Result<C> {
        let (t, nu) = (&self.space.triple, self.nu);
        let den = [t.a.eval(n + nu + 1)?];
        let first_num = [self.w_factors(n + 1, nu)?, vec![t.b.eval(n)?]].concat();
        let second_num = [self.w_factors(n, nu)?, vec![t.a.eval(n)?, t.b.eval(n + nu)?]].concat();
        let second_den = [t.a.eval(n + nu)?, den[0]];
        if let (Some(f), Some(g)) = (linear(&first_num, &den), linear(&second_num, &second_den)) {
            return Ok(f - g);
        }
        let first = self.w_log(n + 1, nu)?.mul(self.b_log(n)?).div(self.a_log(n + nu + 1)?);
        let second = self.big_a_log(n)?.mul(self.b_log(n + nu)?).div(self.a_log(n + nu + 1)?);
        Ok(first.to_c() - second.to_c())
    }
}

/// `prod num / prod den` in plain arithmetic, when no factor or partial
/// product leaves the normal range. A zero factor may be underflow, so it
/// goes to the log domain too.
fn linear(num: &[C], den: &[C]) -> Option<C> {
    let ok = |z: C| z.re.is_finite() && z.im.is_finite() && z.norm() >= f64::MIN_POSITIVE;
    if !num.iter().chain(den).all(|z| ok(*z)) {
        return None;
    }
    let mut acc = C::new(1.0, 0.0);
    // alternate numerator and denominator factors to keep partial products near one
    let (mut i, mut j) = (0, 0);
    while i < num.len() || j < den.len() {
        if j < den.len() && (acc.norm() >= 1.0 || i == num.len()) {
            acc /= den[j];
            j += 1;
        } else {
            acc *= num[i];
            i += 1;
        }
        if !ok(acc) {
            return None;
        }
    }
    Some(acc)
}

/// `c_(n,nu)` for a single index.
pub fn c_coeff(space: &Space, n: usize, nu: usize) -> Result<C> {
    ShiftCoefficients::new(space, nu).c(n)
}

/// `A_(n,nu)` for a single index.
pub fn a_coeff(space: &Space, n: usize, nu: usize) -> Result<C> {
    ShiftCoefficients::new(space, nu).big_a(n)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatrixMeta {
    pub label: String,
    pub p: f64,
    pub tail_cert: CertKind,
}

/// Leading `N x N` block of `[F_w^nu]` with `l^p` bounds on each column's
/// discarded rows.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedMatrix {
    pub size: usize,
    pub nu: usize,
    pub entries: Array2<C>,
    pub column_tail: Vec<f64>,
    pub meta: MatrixMeta,
}

impl TruncatedMatrix {
    pub fn get(&self, i: usize, j: usize) -> C {
        self.entries[(i, j)]
    }

    pub fn tails_certified(&self) -> bool {
        self.meta.tail_cert == CertKind::Certified
    }

    /// Nonzero entries as `(row, column, value)`, row-major.
    pub fn triplets(&self) -> Vec<(usize, usize, C)> {
        let mut out = Vec::new();
        for i in 0..self.size {
            for j in 0..self.size {
                let v = self.entries[(i, j)];
                if v != zero() {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    /// `||column_tail||_s` over all columns.
    pub fn tail_norm(&self, s: f64) -> f64 {
        let v: Vec<C> = self.column_tail.iter().map(|t| C::new(*t, 0.0)).collect();
        lp_norm(&v, s)
    }

    /// Dense product, used for power consistency.
    pub fn matmul(&self, o: &TruncatedMatrix) -> Array2<C> {
        let n = self.size.min(o.size);
        let mut out = Array2::from_elem((n, n), zero());
        for i in 0..n {
            for j in 0..n {
                let mut acc = ComplexNeumaier::new();
                // both factors are lower triangular
                for k in j..=i {
                    let (x, y) = (self.entries[(i, k)], o.entries[(k, j)]);
                    if x != zero() && y != zero() {
                        acc.add(x * y);
                    }
                }
                out[(i, j)] = acc.value();
            }
        }
        out
    }
}

#[derive(Serialize)]
struct MatrixJson<'a> {
    #[serde(rename = "N")]
    n: usize,
    nu: usize,
    entries: Vec<Vec<[f64; 2]>>,
    #[serde(serialize_with = "ser_vec")]
    column_tail: &'a [f64],
    meta: &'a MatrixMeta,
}

fn ser_vec<S: serde::Serializer>(v: &&[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct F(f64);
    impl Serialize for F {
        fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            crate::report::ser_f64(&self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v.iter() {
        seq.serialize_element(&F(*x))?;
    }
    seq.end()
}

impl Serialize for TruncatedMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            n: self.size,
            nu: self.nu,
            entries: self.entries.rows().into_iter().map(|r| r.iter().map(|c| [c.re, c.im]).collect()).collect(),
            column_tail: &self.column_tail,
            meta: &self.meta,
        }
        .serialize(s)
    }
}

/// Builds the leading `N x N` block of `[F_w^nu]`, `N = cfg.n`.
pub fn build_matrix(space: &Space, nu: usize) -> Result<TruncatedMatrix> {
    build_matrix_sized(space, nu, space.cfg.n)
}

pub fn build_matrix_sized(space: &Space, nu: usize, n: usize) -> Result<TruncatedMatrix> {
    if nu == 0 || n < nu + 2 {
        return Err(Error::InvalidConfig(format!("need nu >= 1 and N >= nu + 2 (nu = {nu}, N = {n})")));
    }
    let coeffs = ShiftCoefficients::new(space, nu);
    // rows N..M-1 explicitly, the rest through a shared product series from M
    let m = n + nu + 1;
    if m + 2 > INDEX_CAP {
        return Err(Error::IndexTooLarge { index: m, cap: INDEX_CAP });
    }
    let ratios: Vec<C> = (0..m).map(|k| space.step_ratio(k)).collect::<Result<_>>()?;
    let s = space.p();
    let (tail_factor, tail_cert) = shared_tail(space, m)?;

    let mut entries = Array2::from_elem((n, n), zero());
    let mut column_tail = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = crate::summation::Neumaier::new();
        let mut sup: f64 = 0.0;
        let mut cur = zero();
        for i in j + nu..=m {
            cur = if i == j + nu {
                coeffs.big_a(j)?
            } else if i == j + nu + 1 {
                coeffs.c(j)?
            } else {
                -cur * ratios[i - 1]
            };
            if i < n {
                entries[(i, j)] = cur;
            } else if i < m {
                if s.is_infinite() {
                    sup = sup.max(cur.norm());
                } else {
                    acc.add(cur.norm().powf(s));
                }
            }
        }
        // `cur` is now the virtual row-M entry
        let tail = if cur == zero() {
            if s.is_infinite() { sup } else { acc.value().powf(1.0 / s) }
        } else if s.is_infinite() {
            sup.max(cur.norm() * tail_factor)
        } else {
            (acc.value() + cur.norm().powf(s) * tail_factor.powf(s)).powf(1.0 / s)
        };
        column_tail.push(tail);
    }
    Ok(TruncatedMatrix {
        size: n,
        nu,
        entries,
        column_tail,
        meta: MatrixMeta { label: space.triple.label.clone(), p: s, tail_cert },
    })
}

/// Upper bound for `||(prod_(k=M)^(M+i-1) |b_k/a_(k+1)|)_(i >= 0)||_p`.
fn shared_tail(space: &Space, m: usize) -> Result<(f64, CertKind)> {
    let s = space.p();
    let profile = space.ratio_term().map(|t| t.shift(m).profile());
    let opts = SumOptions { max_terms: INDEX_CAP - m - 2, ..space.bound_options() };
    let mut acc = crate::summation::Neumaier::new();
    let mut last = 0usize;
    let sv = sum_powers(
        profile.as_ref(),
        |k| {
            while last < k {
                acc.add(space.step_ratio(m + last)?.norm().ln());
                last += 1;
            }
            Ok(acc.value())
        },
        s,
        opts,
    )?;
    if sv.divergent {
        return Ok((f64::INFINITY, sv.cert));
    }
    let up = sv.upper();
    Ok((if s.is_infinite() { up } else { up.powf(1.0 / s) }, sv.cert))
}

/// `F_w^nu f` through the truncation. The result's tail bound covers the
/// discarded rows of stored columns plus `op_norm` times the norm of the
/// coordinates of `f` beyond `N`.
pub fn apply_forward(m: &TruncatedMatrix, f: &FunctionVec, op_norm: Option<f64>) -> FunctionVec {
    let n = m.size;
    let s = m.meta.p;
    let mut out = vec![zero(); n];
    let mut tail = 0.0;
    for (j, l) in f.coeffs.iter().enumerate().take(n) {
        if *l == zero() {
            continue;
        }
        for i in j + m.nu..n {
            out[i] += m.entries[(i, j)] * l;
        }
        tail += l.norm() * m.column_tail[j];
    }
    let rest = if f.len() > n { lp_norm(&f.coeffs[n..], s) } else { 0.0 } + f.tail_bound;
    if rest > 0.0 {
        tail += op_norm.map_or(f64::INFINITY, |b| b * rest);
    }
    FunctionVec { coeffs: out, tail_bound: tail }
}

/// `(F_w^*)^nu u` as the transpose of `[F_w^nu]` acting on `f_n^*`-coordinates.
/// Exact (zero tail) whenever `u` is supported on the first `N` coordinates.
pub fn apply_adjoint(m: &TruncatedMatrix, u: &DualVec, op_norm: Option<f64>) -> DualVec {
    let n = m.size;
    let q = if m.meta.p.is_infinite() { 1.0 } else if m.meta.p == 1.0 { f64::INFINITY } else { m.meta.p / (m.meta.p - 1.0) };
    let mut out = vec![zero(); n];
    let last = u.len().min(n);
    for (j, o) in out.iter_mut().enumerate() {
        let mut acc = ComplexNeumaier::new();
        for i in j + m.nu..last {
            let x = u.coeffs[i];
            if x != zero() {
                acc.add(m.entries[(i, j)] * x);
            }
        }
        *o = acc.value();
    }
    let rest = if u.len() > n { lp_norm(&u.coeffs[n..], q) } else { 0.0 } + u.tail_bound;
    let tail = if rest > 0.0 { rest * (m.tail_norm(q) + op_norm.unwrap_or(f64::INFINITY)) } else { 0.0 };
    let cert = crate::sequences::TailCert {
        kind: if rest > 0.0 { u.cert.kind.and(m.meta.tail_cert) } else { CertKind::Certified },
        bound: tail,
        from_index: n,
        ratio: None,
    };
    DualVec { coeffs: out, tail_bound: tail, cert }
}

/// `max |[F_w]^nu - [F_w^nu]|` over the truncation. Both are lower triangular,
/// so the truncated product involves no discarded rows and only rounding remains.
pub fn matrix_power_consistency(space: &Space, nu: usize) -> Result<f64> {
    if nu <= 1 {
        return Ok(0.0);
    }
    let m1 = build_matrix(space, 1)?;
    let mnu = build_matrix(space, nu)?;
    let mut pow = m1.clone();
    for _ in 1..nu {
        pow.entries = pow.matmul(&m1);
    }
    let mut dev: f64 = 0.0;
    for (x, y) in pow.entries.iter().zip(mnu.entries.iter()) {
        dev = dev.max((x - y).norm());
    }
    Ok(dev)
}
