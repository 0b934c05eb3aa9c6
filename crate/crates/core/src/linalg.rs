//! Exact linear algebra over Z and Q.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::matrix::{IntMatrix, RatMatrix};
use crate::poly::{IntPoly, RatPoly};

/// Fraction-free (Bareiss) forward elimination of `[a | b]`.
///
/// Returns the eliminated augmented matrix, the pivot columns, and the sign
/// from row swaps. Every pivot row keeps integer entries throughout.
fn bareiss(mut m: IntMatrix, pivot_cols: usize) -> (IntMatrix, Vec<usize>, bool) {
    let rows = m.rows();
    let cols = m.cols();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut negate = false;
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                let tmp = m[(p, j)].clone();
                m[(p, j)] = m[(r, j)].clone();
                m[(r, j)] = tmp;
            }
            negate = !negate;
        }
        let piv = m[(r, c)].clone();
        for i in r + 1..rows {
            let f = m[(i, c)].clone();
            for j in 0..cols {
                let v = &(&piv * &m[(i, j)]) - &(&f * &m[(r, j)]);
                m[(i, j)] = v / &prev;
            }
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    (m, pivots, negate)
}

pub fn determinant(a: &IntMatrix) -> BigInt {
    assert!(a.is_square());
    let n = a.dim();
    if n == 0 {
        return BigInt::one();
    }
    let (m, pivots, negate) = bareiss(a.clone(), n);
    if pivots.len() < n {
        return BigInt::zero();
    }
    let d = m[(n - 1, n - 1)].clone();
    if negate {
        -d
    } else {
        d
    }
}

pub fn rank(a: &IntMatrix) -> usize {
    let cols = a.cols();
    bareiss(a.clone(), cols).1.len()
}

/// Solves `a · x = b` for square nonsingular `a`; `None` when `a` is singular.
pub fn solve(a: &IntMatrix, b: &IntMatrix) -> Option<RatMatrix> {
    assert!(a.is_square() && a.rows() == b.rows());
    let n = a.dim();
    let k = b.cols();
    let mut aug = IntMatrix::zeros(n, n + k);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)].clone();
        }
        for j in 0..k {
            aug[(i, n + j)] = b[(i, j)].clone();
        }
    }
    let (m, pivots, _) = bareiss(aug, n);
    if pivots.len() < n {
        return None;
    }
    let mut x = RatMatrix::zeros(n, k);
    for col in 0..k {
        for i in (0..n).rev() {
            let mut acc = BigRational::from_integer(m[(i, n + col)].clone());
            for j in i + 1..n {
                acc -= BigRational::from_integer(m[(i, j)].clone()) * &x[(j, col)];
            }
            x[(i, col)] = acc / BigRational::from_integer(m[(i, i)].clone());
        }
    }
    Some(x)
}

/// Incremental row-echelon basis over Q, tracking each stored vector as a
/// combination of the inputs that produced it.
struct EchelonTracker {
    rows: Vec<(usize, Vec<BigRational>, Vec<BigRational>)>,
    inputs: usize,
}

impl EchelonTracker {
    fn new() -> Self {
        EchelonTracker { rows: Vec::new(), inputs: 0 }
    }

    /// Inserts `v`; on linear dependence returns the coefficients `c` with
    /// `v = Σ c_i · input_i` over earlier inputs.
    fn insert(&mut self, mut v: Vec<BigRational>) -> Option<Vec<BigRational>> {
        let idx = self.inputs;
        self.inputs += 1;
        let mut combo = alloc::vec![BigRational::zero(); idx + 1];
        combo[idx] = BigRational::one();
        for (pc, row, rc) in &self.rows {
            if v[*pc].is_zero() {
                continue;
            }
            let f = v[*pc].clone();
            for (a, b) in v.iter_mut().zip(row) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
            for (a, b) in combo.iter_mut().zip(rc) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
        }
        match v.iter().position(|c| !c.is_zero()) {
            Some(pc) => {
                let inv = v[pc].recip();
                for a in v.iter_mut() {
                    *a *= &inv;
                }
                for a in combo.iter_mut() {
                    *a *= &inv;
                }
                self.rows.push((pc, v, combo));
                None
            }
            None => {
                // combo · inputs = 0 with combo[idx] = 1
                combo.pop();
                Some(combo.into_iter().map(|c| -c).collect())
            }
        }
    }
}

/// Monic minimal polynomial from the first dependency among the vectorised
/// powers `I, M, M², …`.
pub fn minimal_polynomial(m: &IntMatrix) -> IntPoly {
    assert!(m.is_square(), "minimal polynomial of a non-square matrix");
    let n = m.dim();
    let mut tracker = EchelonTracker::new();
    let mut power = IntMatrix::identity(n);
    for k in 0..=n {
        let v: Vec<BigRational> = power
            .entries()
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        if let Some(c) = tracker.insert(v) {
            let mut coeffs: Vec<BigRational> = c.into_iter().map(|x| -x).collect();
            coeffs.push(BigRational::one());
            debug_assert_eq!(coeffs.len(), k + 1);
            return RatPoly::new(coeffs)
                .to_int()
                .expect("minimal polynomial of an integer matrix is integral");
        }
        power = power.matmul(m);
    }
    unreachable!("Cayley-Hamilton bounds the degree by the dimension")
}

/// Characteristic polynomial `det(xI - M)` via Faddeev–LeVerrier over Q.
pub fn characteristic_polynomial(m: &IntMatrix) -> IntPoly {
    let n = m.dim();
    let traces: Vec<BigInt> = m.powers(n + 1).iter().map(IntMatrix::trace).collect();
    crate::resultant::poly_from_power_sums(n, &traces)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let a = IntMatrix::from_i64(&[&[2, -1, 0], &[1, 3, 4], &[0, 5, -2]]);
        // 2(3·-2 - 20) + 1(1·-2 - 0) = -52 - 2
        assert_eq!(determinant(&a), BigInt::from(-54));
        let s = IntMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(determinant(&s), BigInt::zero());
        assert_eq!(rank(&s), 1);
    }

    #[test]
    fn solve_rational_system() {
        let a = IntMatrix::from_i64(&[&[2, 1], &[1, 3]]);
        let b = IntMatrix::from_i64(&[&[1], &[2]]);
        let x = solve(&a, &b).unwrap();
        assert_eq!(a.to_rat().matmul(&x), b.to_rat());
        assert!(solve(&IntMatrix::from_i64(&[&[1, 2], &[2, 4]]), &b).is_none());
    }

    #[test]
    fn minimal_polynomial_basics() {
        assert_eq!(minimal_polynomial(&IntMatrix::identity(3)), IntPoly::from_i64(&[-1, 1]));
        let j = IntMatrix::from_i64(&[&[1, 1], &[1, 1]]);
        assert_eq!(minimal_polynomial(&j), IntPoly::from_roots(&[0, 2]));
        let nil = IntMatrix::from_i64(&[&[0, 1], &[0, 0]]);
        assert_eq!(minimal_polynomial(&nil), IntPoly::from_i64(&[0, 0, 1]));
        assert_eq!(characteristic_polynomial(&j), IntPoly::from_roots(&[0, 2]));
    }
}
