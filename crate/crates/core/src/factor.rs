//! Factorisation of monic integer polynomials over Q.
//!
//! Squarefree decomposition, Berlekamp modulo a prime that keeps the
//! polynomial squarefree, linear Hensel lifting past twice the Mignotte
//! bound, then recombination of the lifted factors by trial division.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::modp::{berlekamp_count, berlekamp_factor, small_primes, PolyFp};
use crate::poly::{IntPoly, RatPoly};
use crate::resultant::discriminant;

/// A monic polynomial together with its complete irreducible factorisation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredPolynomial {
    pub original: IntPoly,
    /// Monic irreducible factors with multiplicities, ordered by degree then
    /// coefficients.
    pub factors: Vec<(IntPoly, u32)>,
    pub discriminant: BigInt,
}

impl FactoredPolynomial {
    /// Multiplies the factors back together.
    pub fn expand(&self) -> IntPoly {
        self.factors
            .iter()
            .fold(IntPoly::one(), |acc, (f, e)| &acc * &f.pow(*e))
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }

    /// Irreducible factors with multiplicities dropped.
    pub fn irreducibles(&self) -> impl Iterator<Item = &IntPoly> {
        self.factors.iter().map(|(f, _)| f)
    }

    pub fn linear_root_position(&self, root: &BigInt) -> Option<usize> {
        let target = IntPoly::x_minus(root.clone());
        self.factors.iter().position(|(f, _)| *f == target)
    }
}

/// Yun's squarefree decomposition of a monic polynomial: `(part, multiplicity)`.
pub fn squarefree_decomposition(f: &IntPoly) -> Vec<(IntPoly, u32)> {
    assert!(f.is_monic(), "squarefree decomposition needs a monic polynomial");
    if f.deg() == 0 {
        return Vec::new();
    }
    let fr = f.to_rat();
    let d = fr.derivative();
    let a0 = fr.gcd(&d);
    let mut b = fr.divrem(&a0).0;
    let c = d.divrem(&a0).0;
    let mut dd = &c - &b.derivative();
    let mut out = Vec::new();
    let mut i = 1u32;
    while b.deg() > 0 {
        let a = b.gcd(&dd);
        let nb = b.divrem(&a).0;
        let nc = dd.divrem(&a).0;
        dd = &nc - &nb.derivative();
        b = nb;
        if a.deg() > 0 {
            out.push((to_monic_int(&a), i));
        }
        i += 1;
    }
    out
}

fn to_monic_int(p: &RatPoly) -> IntPoly {
    p.make_monic()
        .to_int()
        .expect("monic factor of a monic integer polynomial is integral")
}

/// Complete factorisation over Q of a monic integer polynomial of degree ≥ 1.
pub fn factor_over_integers(p: &IntPoly) -> FactoredPolynomial {
    assert!(p.is_monic() && p.deg() >= 1, "expected a monic nonconstant polynomial");
    let mut factors = Vec::new();
    for (part, mult) in squarefree_decomposition(p) {
        for f in factor_squarefree(&part) {
            factors.push((f, mult));
        }
    }
    factors.sort_by(|(a, _), (b, _)| poly_order(a, b));
    FactoredPolynomial { original: p.clone(), factors, discriminant: discriminant(p) }
}

pub(crate) fn poly_order(a: &IntPoly, b: &IntPoly) -> core::cmp::Ordering {
    a.deg().cmp(&b.deg()).then_with(|| {
        for i in (0..=a.deg()).rev() {
            let o = a.coeff(i).cmp(&b.coeff(i));
            if o.is_ne() {
                return o;
            }
        }
        core::cmp::Ordering::Equal
    })
}

/// Whether a monic polynomial is irreducible over Q.
pub fn is_irreducible(p: &IntPoly) -> bool {
    let f = factor_over_integers(p);
    f.factors.len() == 1 && f.factors[0].1 == 1
}

/// Irreducible monic factors of a monic squarefree polynomial.
pub(crate) fn factor_squarefree(f: &IntPoly) -> Vec<IntPoly> {
    let n = f.deg();
    if n <= 1 {
        return vec![f.clone()];
    }
    // strip the factor x first so constant-term pruning stays valid
    if f.coeff(0).is_zero() {
        let mut out = vec![IntPoly::from_i64(&[0, 1])];
        out.extend(factor_squarefree(&IntPoly::new(f.coeffs()[1..].to_vec())));
        return out;
    }
    let (p, modular) = choose_prime(f);
    if modular.len() == 1 {
        return vec![f.clone()];
    }
    let bound = coefficient_bound(f);
    let mut modulus = BigInt::from(p);
    let mut k = 1u32;
    while modulus <= &bound * 2 {
        modulus *= p;
        k += 1;
    }
    let lifted = hensel_lift_all(f, &modular, p, k);
    recombine(f, lifted, &modulus)
}

/// Among the first few good primes, the one giving the fewest modular factors.
fn choose_prime(f: &IntPoly) -> (u64, Vec<PolyFp>) {
    let mut best: Option<(u64, usize)> = None;
    let mut tried = 0;
    for p in small_primes() {
        let fp = PolyFp::from_int(f, p);
        if fp.deg() != f.deg() || !fp.is_squarefree(p) {
            continue;
        }
        let r = berlekamp_count(&fp, p);
        if best.is_none_or(|(_, br)| r < br) {
            best = Some((p, r));
        }
        tried += 1;
        if r == 1 || tried >= 8 {
            break;
        }
    }
    let (p, _) = best.expect("some prime keeps a squarefree polynomial squarefree");
    (p, berlekamp_factor(&PolyFp::from_int(f, p), p))
}

/// Bound on the coefficients of any monic factor: `2^n · ‖f‖₂`.
fn coefficient_bound(f: &IntPoly) -> BigInt {
    let norm2: BigInt = f.coeffs().iter().map(|c| c * c).sum();
    (norm2.sqrt() + 1) << f.deg()
}

fn symmetric_mod(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

fn to_fp(f: &IntPoly, p: u64) -> PolyFp {
    PolyFp::from_int(f, p)
}

fn from_fp(f: &PolyFp) -> IntPoly {
    IntPoly::new(f.c.iter().map(|&c| BigInt::from(c)).collect())
}

/// Lifts `f ≡ g·h (mod p)` with monic `g`, `h` to `f ≡ g·h (mod p^k)`.
fn hensel_lift_pair(f: &IntPoly, g: &PolyFp, h: &PolyFp, p: u64, k: u32) -> (IntPoly, IntPoly) {
    let (one, s, t) = g.xgcd(h, p);
    debug_assert_eq!(one, PolyFp::one());
    let pb = BigInt::from(p);
    let mut gz = from_fp(g);
    let mut hz = from_fp(h);
    let mut pj = pb.clone();
    for _ in 1..k {
        let diff = f - &(&gz * &hz);
        let e = IntPoly::new(diff.coeffs().iter().map(|c| c / &pj).collect());
        let e = to_fp(&e, p);
        let b0 = e.mul(&s, p);
        let a0 = e.mul(&t, p);
        let (q, b) = b0.divrem(h, p);
        let a = a0.add(&q.mul(g, p), p);
        gz = &gz + &from_fp(&a).scale(&pj);
        hz = &hz + &from_fp(&b).scale(&pj);
        pj *= &pb;
    }
    (gz, hz)
}

fn hensel_lift_all(f: &IntPoly, modular: &[PolyFp], p: u64, k: u32) -> Vec<IntPoly> {
    let modulus = BigInt::from(p).pow(k);
    let mut out = Vec::with_capacity(modular.len());
    let mut rest = f.clone();
    for i in 0..modular.len() - 1 {
        let g = &modular[i];
        let h = modular[i + 1..]
            .iter()
            .fold(PolyFp::one(), |acc, u| acc.mul(u, p));
        let (gz, hz) = hensel_lift_pair(&rest, g, &h, p, k);
        out.push(reduce(&gz, &modulus));
        rest = reduce(&hz, &modulus);
    }
    out.push(rest);
    out
}

fn reduce(f: &IntPoly, m: &BigInt) -> IntPoly {
    IntPoly::new(f.coeffs().iter().map(|c| c.mod_floor(m)).collect())
}

fn recombine(f: &IntPoly, mut lifted: Vec<IntPoly>, modulus: &BigInt) -> Vec<IntPoly> {
    let mut found = Vec::new();
    let mut f = f.clone();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let mut hit = None;
        for subset in Combinations::new(lifted.len(), size) {
            let prod = subset
                .iter()
                .fold(IntPoly::one(), |acc, &i| reduce(&(&acc * &lifted[i]), modulus));
            let cand = IntPoly::new(prod.coeffs().iter().map(|c| symmetric_mod(c, modulus)).collect());
            let c0 = cand.coeff(0);
            if c0.is_zero() || !f.coeff(0).is_multiple_of(&c0) {
                continue;
            }
            if let Some(q) = f.div_exact(&cand) {
                hit = Some((subset, cand, q));
                break;
            }
        }
        match hit {
            Some((subset, cand, q)) => {
                found.push(cand);
                f = q;
                for &i in subset.iter().rev() {
                    lifted.remove(i);
                }
            }
            None => size += 1,
        }
    }
    found.push(f);
    found
}

/// Lexicographic k-subsets of `0..n`.
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations { n, idx: (0..k).collect(), done: k > n }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt_factor(c: i64) -> IntPoly {
        IntPoly::from_i64(&[-c, 0, 1])
    }

    #[test]
    fn factors_minimal_polynomial_with_quadratic() {
        let p = &IntPoly::from_roots(&[7, -1]) * &sqrt_factor(7);
        let f = factor_over_integers(&p);
        assert_eq!(
            f.factors,
            vec![
                (IntPoly::from_roots(&[7]), 1),
                (IntPoly::from_roots(&[-1]), 1),
                (sqrt_factor(7), 1)
            ]
        );
        assert_eq!(f.expand(), p);
    }

    #[test]
    fn irreducible_quadratic_and_squares() {
        let g = IntPoly::from_i64(&[-1, 1, 1]);
        assert_eq!(factor_over_integers(&g).factors, vec![(g.clone(), 1)]);
        let h = IntPoly::from_i64(&[-1, 0, 1]);
        assert_eq!(factor_over_integers(&h).factors.len(), 2);
        let sq = &IntPoly::from_roots(&[2]) * &g.pow(2);
        let f = factor_over_integers(&sq);
        assert_eq!(f.factors, vec![(IntPoly::from_roots(&[2]), 1), (g, 2)]);
        assert!(f.discriminant.is_zero());
    }

    #[test]
    fn swinnerton_dyer_style_recombination() {
        // x^4 - 10x^2 + 1 is irreducible but splits modulo every prime
        let p = IntPoly::from_i64(&[1, 0, -10, 0, 1]);
        assert!(is_irreducible(&p));
        let q = &p * &IntPoly::from_i64(&[-2, 0, 0, 1]);
        let f = factor_over_integers(&q);
        assert_eq!(f.factors.len(), 2);
        assert_eq!(f.expand(), q);
    }

    #[test]
    fn combinations_enumerate_all() {
        assert_eq!(Combinations::new(4, 2).count(), 6);
        assert_eq!(Combinations::new(3, 0).count(), 1);
    }
}
