//! Arithmetic in a simple number field `Q[x]/(g)` and the abelian-splitting test.
//!
//! An irreducible `g` has abelian splitting field exactly when its root
//! field is normal (so `g` splits into linear factors over it) and the
//! resulting automorphisms `α ↦ h_i(α)` commute. Factoring over the root
//! field uses the norm of `g(x - sα)`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::factor::{factor_over_integers, factor_squarefree};
use crate::poly::{IntPoly, RatPoly};
use crate::resultant::{newton_power_sums, poly_from_power_sums};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("polynomial is reducible over Q")]
    Reducible,
    #[error("polynomial must be monic of degree at least one")]
    NotMonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Splitting {
    Abelian,
    Nonabelian,
}

/// The field `Q(α)` with `α` a root of a monic irreducible integer polynomial.
#[derive(Clone, Debug)]
pub struct NumberField {
    modulus: RatPoly,
}

impl NumberField {
    pub fn new(g: &IntPoly) -> Self {
        debug_assert!(g.is_monic());
        NumberField { modulus: g.to_rat() }
    }

    pub fn degree(&self) -> usize {
        self.modulus.deg()
    }

    pub fn modulus(&self) -> &RatPoly {
        &self.modulus
    }

    pub fn reduce(&self, a: &RatPoly) -> RatPoly {
        a.rem_monic(&self.modulus)
    }

    pub fn mul(&self, a: &RatPoly, b: &RatPoly) -> RatPoly {
        self.reduce(&(a * b))
    }

    pub fn inv(&self, a: &RatPoly) -> RatPoly {
        let (g, s, _) = a.xgcd(&self.modulus);
        assert!(g.deg() == 0 && !g.is_zero(), "inverse of zero in a number field");
        self.reduce(&s)
    }

    /// Trace `Tr_{K/Q}` of an element, from the power sums of the modulus.
    pub fn trace(&self, a: &RatPoly, power_sums: &[BigInt]) -> BigRational {
        let r = self.reduce(a);
        r.coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| c * BigRational::from_integer(power_sums[i].clone()))
            .fold(BigRational::zero(), |acc, v| acc + v)
    }

    /// `h(a)` for a polynomial `h` over Q.
    pub fn eval(&self, h: &RatPoly, a: &RatPoly) -> RatPoly {
        let mut acc = RatPoly::zero();
        for c in h.coeffs().iter().rev() {
            acc = &self.mul(&acc, a) + &RatPoly::constant(c.clone());
        }
        acc
    }
}

/// Polynomials over a [`NumberField`], coefficients lowest degree first.
type KPoly = Vec<RatPoly>;

fn kpoly_trim(mut p: KPoly) -> KPoly {
    while p.last().is_some_and(RatPoly::is_zero) {
        p.pop();
    }
    p
}

fn kpoly_rem(k: &NumberField, a: &KPoly, b: &KPoly) -> KPoly {
    let b = kpoly_trim(b.clone());
    let db = b.len() - 1;
    let inv = k.inv(&b[db]);
    let mut r = kpoly_trim(a.clone());
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let f = k.mul(r.last().unwrap(), &inv);
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] = k.reduce(&(&r[shift + i] - &k.mul(&f, bc)));
        }
        r = kpoly_trim(r);
    }
    r
}

fn kpoly_gcd(k: &NumberField, a: &KPoly, b: &KPoly) -> KPoly {
    let (mut a, mut b) = (kpoly_trim(a.clone()), kpoly_trim(b.clone()));
    while !b.is_empty() {
        let r = kpoly_rem(k, &a, &b);
        a = b;
        b = r;
    }
    if let Some(l) = a.last() {
        let inv = k.inv(l);
        a = a.iter().map(|c| k.mul(c, &inv)).collect();
    }
    a
}

fn kpoly_mul(k: &NumberField, a: &KPoly, b: &KPoly) -> KPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![RatPoly::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &k.mul(x, y);
        }
    }
    kpoly_trim(out)
}

/// `g(x - sα)` as a polynomial over `K`.
fn shifted(k: &NumberField, g: &IntPoly, s: i64) -> KPoly {
    let alpha_term = RatPoly::new(vec![BigRational::zero(), BigRational::from_integer(BigInt::from(-s))]);
    let lin: KPoly = vec![k.reduce(&alpha_term), RatPoly::one()];
    let mut acc: KPoly = Vec::new();
    for c in g.coeffs().iter().rev() {
        acc = kpoly_mul(k, &acc, &lin);
        let cst = RatPoly::constant(BigRational::from_integer(c.clone()));
        if acc.is_empty() {
            acc.push(cst);
        } else {
            acc[0] = &acc[0] + &cst;
        }
        acc = kpoly_trim(acc);
    }
    acc
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Norm of `g(x - sα)`: the monic polynomial with roots `α_i + s·α_j`.
fn shifted_norm(g: &IntPoly, s: i64) -> IntPoly {
    let n = g.deg();
    let big = n * n;
    let p = newton_power_sums(g, big);
    let sb = BigInt::from(s);
    let mut sums = Vec::with_capacity(big + 1);
    for r in 0..=big {
        let mut acc = BigInt::zero();
        for c in 0..=r {
            acc += binomial(r, c) * sb.pow((r - c) as u32) * &p[c] * &p[r - c];
        }
        sums.push(acc);
    }
    poly_from_power_sums(big, &sums)
}

/// Roots of `g` inside its own root field, as polynomials in `α`, when `g`
/// splits completely there; `None` when the root field is not normal.
pub fn roots_in_root_field(g: &IntPoly) -> Option<Vec<RatPoly>> {
    let n = g.deg();
    let k = NumberField::new(g);
    let x = RatPoly::new(vec![BigRational::zero(), BigRational::one()]);
    if n == 1 {
        return Some(vec![RatPoly::constant(-BigRational::from_integer(g.coeff(0)))]);
    }
    let s = [1i64, -1, 2, -2, 3, -3, 4, -4, 5, -5, 6, 7, 8, 9, 10, 11, 12]
        .into_iter()
        .find(|&s| {
            let nm = shifted_norm(g, s).to_rat();
            nm.gcd(&nm.derivative()).deg() == 0
        })
        .expect("some shift gives a squarefree norm");
    let norm = shifted_norm(g, s);
    let parts = factor_squarefree(&norm);
    if parts.iter().any(|p| p.deg() != n) {
        return None;
    }
    let gs = shifted(&k, g, s);
    let sx = x.scale(&BigRational::from_integer(BigInt::from(s)));
    let mut roots = Vec::with_capacity(n);
    for part in parts {
        let pk: KPoly = part
            .coeffs()
            .iter()
            .map(|c| RatPoly::constant(BigRational::from_integer(c.clone())))
            .collect();
        let h = kpoly_gcd(&k, &gs, &pk);
        if h.len() != 2 {
            return None;
        }
        // h = x + c0, root of g(x - sα) is -c0, so the root of g is -c0 - sα
        let beta = k.reduce(&(&(-&h[0]) - &sx));
        roots.push(beta);
    }
    Some(roots)
}

/// Abelian-splitting test for a monic irreducible integer polynomial.
pub fn is_abelian_splitting_field(g: &IntPoly) -> Result<Splitting, FieldError> {
    if !g.is_monic() || g.deg() == 0 {
        return Err(FieldError::NotMonic);
    }
    let f = factor_over_integers(g);
    if f.factors.len() != 1 || f.factors[0].1 != 1 {
        return Err(FieldError::Reducible);
    }
    if g.deg() <= 2 {
        return Ok(Splitting::Abelian);
    }
    let Some(roots) = roots_in_root_field(g) else {
        return Ok(Splitting::Nonabelian);
    };
    let k = NumberField::new(g);
    for (i, a) in roots.iter().enumerate() {
        for b in &roots[i + 1..] {
            if k.eval(a, b) != k.eval(b, a) {
                return Ok(Splitting::Nonabelian);
            }
        }
    }
    Ok(Splitting::Abelian)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_fields_are_abelian() {
        let g = IntPoly::from_i64(&[-5, 0, 1]);
        assert_eq!(is_abelian_splitting_field(&g), Ok(Splitting::Abelian));
    }

    #[test]
    fn cyclic_cubic_and_pure_cubic() {
        let cyclic = IntPoly::from_i64(&[-1, -3, 0, 1]);
        assert_eq!(is_abelian_splitting_field(&cyclic), Ok(Splitting::Abelian));
        let roots = roots_in_root_field(&cyclic).unwrap();
        assert_eq!(roots.len(), 3);
        let k = NumberField::new(&cyclic);
        for r in &roots {
            assert!(k.eval(&cyclic.to_rat(), r).is_zero());
        }
        let pure = IntPoly::from_i64(&[-2, 0, 0, 1]);
        assert_eq!(is_abelian_splitting_field(&pure), Ok(Splitting::Nonabelian));
    }

    #[test]
    fn cyclotomic_quartic_is_abelian_and_reducible_rejected() {
        // Φ5 and the real quartic x^4 - 10x^2 + 1 (Galois group C2 × C2)
        let phi5 = IntPoly::from_i64(&[1, 1, 1, 1, 1]);
        assert_eq!(is_abelian_splitting_field(&phi5), Ok(Splitting::Abelian));
        let v4 = IntPoly::from_i64(&[1, 0, -10, 0, 1]);
        assert_eq!(is_abelian_splitting_field(&v4), Ok(Splitting::Abelian));
        let x4m2 = IntPoly::from_i64(&[-2, 0, 0, 0, 1]); // dihedral D4
        assert_eq!(is_abelian_splitting_field(&x4m2), Ok(Splitting::Nonabelian));
        assert_eq!(
            is_abelian_splitting_field(&IntPoly::from_roots(&[1, 2])),
            Err(FieldError::Reducible)
        );
    }

    #[test]
    fn trace_from_power_sums() {
        let g = IntPoly::from_i64(&[-1, 1, 1]);
        let k = NumberField::new(&g);
        let ps = newton_power_sums(&g, 4);
        let alpha = RatPoly::new(vec![BigRational::zero(), BigRational::one()]);
        assert_eq!(k.trace(&alpha, &ps), BigRational::from_integer(BigInt::from(-1)));
        assert_eq!(k.trace(&k.mul(&alpha, &alpha), &ps), BigRational::from_integer(BigInt::from(3)));
    }
}
