//! Resultants, discriminants and Newton power sums.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::linalg::determinant;
use crate::matrix::IntMatrix;
use crate::poly::IntPoly;

/// Resultant as the determinant of the Sylvester matrix.
pub fn resultant(p: &IntPoly, q: &IntPoly) -> BigInt {
    let (Some(n), Some(m)) = (p.degree(), q.degree()) else {
        return BigInt::zero();
    };
    if n == 0 && m == 0 {
        return BigInt::one();
    }
    let size = n + m;
    let mut s = IntMatrix::zeros(size, size);
    for r in 0..m {
        for (i, c) in p.coeffs().iter().rev().enumerate() {
            s[(r, r + i)] = c.clone();
        }
    }
    for r in 0..n {
        for (i, c) in q.coeffs().iter().rev().enumerate() {
            s[(m + r, r + i)] = c.clone();
        }
    }
    determinant(&s)
}

/// Discriminant `(-1)^{n(n-1)/2} Res(p, p') / lc(p)`.
pub fn discriminant(p: &IntPoly) -> BigInt {
    let n = p.deg();
    assert!(n >= 1, "discriminant of a constant");
    if n == 1 {
        return BigInt::one();
    }
    let r = resultant(p, &p.derivative()) / p.lead();
    if (n * (n - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

/// Power sums `[s_0, …, s_count]` of the roots of a monic polynomial.
pub fn newton_power_sums(p: &IntPoly, count: usize) -> Vec<BigInt> {
    assert!(p.is_monic(), "power sums need a monic polynomial");
    let n = p.deg();
    // c[i] = coefficient of x^{n-i}
    let c: Vec<BigInt> = (0..=n).map(|i| p.coeff(n - i)).collect();
    let mut s = Vec::with_capacity(count + 1);
    s.push(BigInt::from(n));
    for k in 1..=count {
        let mut acc = if k <= n { &c[k] * BigInt::from(k) } else { BigInt::zero() };
        for i in 1..=n.min(k - 1) {
            acc += &c[i] * &s[k - i];
        }
        s.push(-acc);
    }
    s
}

/// Monic degree-`n` polynomial whose root power sums are `sums[0..=n]`.
pub fn poly_from_power_sums(n: usize, sums: &[BigInt]) -> IntPoly {
    assert!(sums.len() > n);
    let mut e: Vec<BigRational> = Vec::with_capacity(n + 1);
    e.push(BigRational::one());
    for k in 1..=n {
        let mut acc = BigRational::zero();
        for i in 1..=k {
            let term = &e[k - i] * BigRational::from_integer(sums[i].clone());
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e.push(acc / BigRational::from_integer(BigInt::from(k)));
    }
    let mut coeffs = Vec::with_capacity(n + 1);
    for i in 0..=n {
        // coefficient of x^i is (-1)^{n-i} e_{n-i}
        let v = &e[n - i];
        assert!(v.is_integer(), "power sums do not come from an integer polynomial");
        let v = v.to_integer();
        coeffs.push(if (n - i) % 2 == 1 { -v } else { v });
    }
    IntPoly::new(coeffs)
}
