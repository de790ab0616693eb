//! `B + K_lambda` on sequence coordinates: the backward shift plus the rank-one
//! map `x -> lambda x_0 e_0`. Its `n`-th power sends `x` to
//! `(x_n + lambda x_(n-1) + ... + lambda^n x_0, x_(n+1), x_(n+2), ...)`, so
//! every coordinate past the first only ever sees the shift.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::poly::C;
use crate::summation::ComplexNeumaier;

fn check(lambda: C) -> Result<()> {
    if (lambda.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidConfig(format!("lambda = {lambda} must be unimodular")));
    }
    Ok(())
}

/// `(B + K_lambda)^n x` in closed form, as many coordinates as `x` has.
pub fn rank_one_perturb_orbit(lambda: C, x: &[C], n: usize) -> Result<Vec<C>> {
    check(lambda)?;
    let at = |i: usize| x.get(i).copied().unwrap_or_default();
    let mut out = vec![C::new(0.0, 0.0); x.len().max(1)];
    let mut acc = ComplexNeumaier::new();
    let mut pow = C::new(1.0, 0.0);
    for i in (0..=n).rev() {
        acc.add(pow * at(i));
        pow *= lambda;
    }
    out[0] = acc.value();
    for (i, o) in out.iter_mut().enumerate().skip(1) {
        *o = at(i + n);
    }
    Ok(out)
}

/// The same orbit by explicit matrix powers on a block large enough that no
/// coordinate of `x` is lost.
pub fn rank_one_matrix_orbit(lambda: C, x: &[C], n: usize) -> Result<Vec<C>> {
    check(lambda)?;
    let size = x.len().max(1) + n + 1;
    let mut m = Array2::from_elem((size, size), C::new(0.0, 0.0));
    for i in 0..size - 1 {
        m[(i, i + 1)] = C::new(1.0, 0.0);
    }
    m[(0, 0)] = lambda;
    let mut p = Array2::from_shape_fn((size, size), |(i, j)| if i == j { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) });
    for _ in 0..n {
        p = p.dot(&m);
    }
    let v: Vec<C> = (0..size).map(|i| x.get(i).copied().unwrap_or_default()).collect();
    let y = p.dot(&ndarray::Array1::from(v));
    Ok(y.iter().take(x.len().max(1)).copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn remark_examples() {
        let i = c(0.0, 1.0);
        let e0 = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert_eq!(rank_one_perturb_orbit(i, &e0, 2).unwrap()[0], c(-1.0, 0.0));
        let lam = c(0.6, 0.8);
        let one = rank_one_perturb_orbit(lam, &e0, 1).unwrap();
        assert_eq!(one, vec![lam, c(0.0, 0.0), c(0.0, 0.0)]);
        let x = vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        assert_eq!(rank_one_perturb_orbit(c(1.0, 0.0), &x, 1).unwrap()[0], c(1.0, 0.0));
        assert!(rank_one_perturb_orbit(c(2.0, 0.0), &x, 1).is_err());
    }

    #[test]
    fn closed_form_matches_matrix_powers() {
        let lam = C::from_polar(1.0, 0.7);
        let x: Vec<C> = (0..30).map(|k| c((k as f64).sin(), (k as f64 * 0.3).cos())).collect();
        for n in 0..=20 {
            let a = rank_one_perturb_orbit(lam, &x, n).unwrap();
            let b = rank_one_matrix_orbit(lam, &x, n).unwrap();
            let d = a.iter().zip(&b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
            assert!(d <= 1e-12, "n={n}: {d}");
            assert_eq!(a[1], x[n + 1]);
        }
    }
}
