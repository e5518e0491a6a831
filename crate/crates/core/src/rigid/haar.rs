//! The finite linear system behind the absence of an invariant functional
//! on one-variable polynomials under `T: z -> z + 1`.

use num_integer::binomial;
use num_bigint::BigInt;
use serde::Serialize;

use crate::matrix::Matrix;
use crate::scalar::{fmt_rational, int};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HaarReport {
    pub degree: u32,
    pub equations: usize,
    /// Kernel basis over the unknowns `l(f_0), ..., l(f_{D+1})`.
    pub kernel: Vec<Vec<String>>,
    /// Every invariant functional vanishes on `f_0, ..., f_D`.
    pub only_zero: bool,
}

/// Rows `l(T f_k) - l(f_k) = sum_{i<k} C(k,i) l(f_i)` for `k = 1..=D+1`.
pub fn haar_system(d: u32) -> Matrix<Rational> {
    let unknowns = d as usize + 2;
    Matrix::from_fn(d as usize + 1, unknowns, |row, i| {
        let k = row + 1;
        if i < k {
            Rational::from_integer(binomial(BigInt::from(k), BigInt::from(i)))
        } else {
            int(0)
        }
    })
}

pub fn haar_obstruction(d: u32) -> HaarReport {
    let m = haar_system(d);
    let kernel = m.nullspace();
    let only_zero = kernel.iter().all(|v| v[..=d as usize].iter().all(|x| *x == int(0)));
    HaarReport {
        degree: d,
        equations: m.rows(),
        kernel: kernel.iter().map(|v| v.iter().map(fmt_rational).collect()).collect(),
        only_zero,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_degrees() {
        // D = 1: l(f_0) = 0 from T f_1 = f_0 + f_1
        let m = haar_system(1);
        assert_eq!(m.row(0), &[int(1), int(0), int(0)]);
        for d in [1, 2, 10] {
            let r = haar_obstruction(d);
            assert!(r.only_zero);
            assert_eq!(r.kernel.len(), 1);
        }
    }
}
