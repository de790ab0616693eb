//! Named example triples.

use crate::error::{Error, Result};
use crate::poly::C;
use crate::sequences::{SequenceExpr, SequenceTriple};

pub const PRESET_NAMES: [&str; 4] = ["EX-CHAOS", "EX-TRIDIAG", "EX-HC", "EX-DECAY"];

fn c(x: f64) -> C {
    C::new(x, 0.0)
}

/// `a_n = 1/(n 2^(n-1))`, `b_n = 1/((n+1) 4^n)`, `w_n = 4` for `n >= 1`,
/// all equal to one at `n = 0`: a chaotic adjoint with a compact perturbation.
pub fn chaos() -> SequenceTriple {
    let a = SequenceExpr::real(0.5, &[2.0], &[0.0, 1.0]).expect("valid").with_override(0, c(1.0));
    let b = SequenceExpr::real(0.25, &[1.0], &[1.0, 1.0]).expect("valid").with_override(0, c(1.0));
    let w = SequenceExpr::constant(c(4.0)).with_override(0, c(1.0));
    SequenceTriple::new(a, b, w, "EX-CHAOS")
}

/// `a_n = 1`, `b_n = -(1/lambda)(n+1)/(n+2)`, `w_n = 1`: the unweighted shift
/// on a tridiagonal space in which `ev_lambda` is an eigenvector of the adjoint.
pub fn tridiag(lambda: C) -> Result<SequenceTriple> {
    if (lambda.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidConfig(format!("lambda = {lambda} must be unimodular")));
    }
    let m = -C::new(1.0, 0.0) / lambda;
    let b = SequenceExpr::new(c(1.0), vec![m, m], vec![c(2.0), c(1.0)])?;
    let one = SequenceExpr::constant(c(1.0));
    Ok(SequenceTriple::new(one.clone(), b, one, "EX-TRIDIAG"))
}

fn half_powers(w: f64, label: &str) -> SequenceTriple {
    let b = SequenceExpr::real(0.5, &[0.5], &[1.0]).expect("valid");
    SequenceTriple::new(SequenceExpr::constant(c(1.0)), b, SequenceExpr::constant(c(w)), label)
}

/// `a_n = 1`, `b_n = 2^(-n-1)`, `w_n = 2`: hypercyclic and mixing adjoint.
pub fn hypercyclic() -> SequenceTriple {
    half_powers(2.0, "EX-HC")
}

/// `a_n = 1`, `b_n = 2^(-n-1)`, `w_n = 1/2`: adjoint orbits decay.
pub fn decay() -> SequenceTriple {
    half_powers(0.5, "EX-DECAY")
}

/// Looks a preset up by name (case-insensitive); `EX-TRIDIAG` uses `lambda = 1`.
pub fn preset(name: &str) -> Result<SequenceTriple> {
    match name.to_ascii_uppercase().as_str() {
        "EX-CHAOS" => Ok(chaos()),
        "EX-TRIDIAG" => tridiag(c(1.0)),
        "EX-HC" => Ok(hypercyclic()),
        "EX-DECAY" => Ok(decay()),
        _ => Err(Error::InvalidConfig(format!("unknown preset {name:?}; known: {}", PRESET_NAMES.join(", ")))),
    }
}
