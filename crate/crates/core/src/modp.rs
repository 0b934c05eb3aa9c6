//! Polynomials over a small prime field, Berlekamp factorisation.
//!
//! Internal support for integer factorisation; primes stay below 2^31 so
//! every product fits in a `u64`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::poly::IntPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct PolyFp {
    pub c: Vec<u64>,
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    acc
}

impl PolyFp {
    pub fn new(mut c: Vec<u64>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        PolyFp { c }
    }

    pub fn from_int(f: &IntPoly, p: u64) -> Self {
        let pb = BigInt::from(p);
        Self::new(
            f.coeffs()
                .iter()
                .map(|c| c.mod_floor(&pb).to_u64().expect("reduced mod p"))
                .collect(),
        )
    }

    pub fn one() -> Self {
        PolyFp { c: vec![1] }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn add(&self, o: &Self, p: u64) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new(
            (0..n)
                .map(|i| (self.c.get(i).unwrap_or(&0) + o.c.get(i).unwrap_or(&0)) % p)
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self, p: u64) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new(
            (0..n)
                .map(|i| (self.c.get(i).unwrap_or(&0) + p - o.c.get(i).unwrap_or(&0)) % p)
                .collect(),
        )
    }

    pub fn mul(&self, o: &Self, p: u64) -> Self {
        if self.is_zero() || o.is_zero() {
            return PolyFp { c: Vec::new() };
        }
        let mut out = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % p;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: u64, p: u64) -> Self {
        Self::new(self.c.iter().map(|&a| a * s % p).collect())
    }

    pub fn make_monic(&self, p: u64) -> Self {
        match self.c.last() {
            None => self.clone(),
            Some(&l) => self.scale(inv_mod(l, p), p),
        }
    }

    pub fn divrem(&self, d: &Self, p: u64) -> (Self, Self) {
        assert!(!d.is_zero());
        let dd = d.deg();
        if self.c.len() <= dd {
            return (PolyFp { c: Vec::new() }, self.clone());
        }
        let inv = inv_mod(*d.c.last().unwrap(), p);
        let mut r = self.c.clone();
        let mut q = vec![0u64; r.len() - dd];
        for i in (0..q.len()).rev() {
            let f = r[i + dd] * inv % p;
            if f == 0 {
                continue;
            }
            for (j, &dc) in d.c.iter().enumerate() {
                r[i + j] = (r[i + j] + p - f * dc % p) % p;
            }
            q[i] = f;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &Self, p: u64) -> Self {
        self.divrem(d, p).1
    }

    pub fn gcd(&self, o: &Self, p: u64) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b, p);
            a = b;
            b = r;
        }
        a.make_monic(p)
    }

    /// `(g, s, t)` with `s·self + t·o = g` monic.
    pub fn xgcd(&self, o: &Self, p: u64) -> (Self, Self, Self) {
        let zero = PolyFp { c: Vec::new() };
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(), zero.clone());
        let (mut t0, mut t1) = (zero, Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1, p);
            let s = s0.sub(&q.mul(&s1, p), p);
            let t = t0.sub(&q.mul(&t1, p), p);
            r0 = core::mem::replace(&mut r1, r);
            s0 = core::mem::replace(&mut s1, s);
            t0 = core::mem::replace(&mut t1, t);
        }
        let inv = inv_mod(*r0.c.last().unwrap_or(&1), p);
        (r0.scale(inv, p), s0.scale(inv, p), t0.scale(inv, p))
    }

    pub fn derivative(&self, p: u64) -> Self {
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| (i as u64 % p) * a % p)
                .collect(),
        )
    }

    pub fn is_squarefree(&self, p: u64) -> bool {
        self.gcd(&self.derivative(p), p).deg() == 0
    }

    fn mulmod(&self, o: &Self, m: &Self, p: u64) -> Self {
        self.mul(o, p).rem(m, p)
    }
}

/// Kernel basis of `Q - I` over GF(p), where row `i` of `Q` is `x^{ip} mod f`.
fn berlekamp_kernel(f: &PolyFp, p: u64) -> Vec<PolyFp> {
    let n = f.deg();
    let xp = {
        // x^p mod f by square-and-multiply
        let mut acc = PolyFp::one();
        let mut base = PolyFp::new(vec![0, 1]).rem(f, p);
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mulmod(&base, f, p);
            }
            base = base.mulmod(&base, f, p);
            e >>= 1;
        }
        acc
    };
    // m[i][j] = coefficient j of x^{ip} mod f, minus identity
    let mut m = vec![vec![0u64; n]; n];
    let mut row = PolyFp::one();
    for (i, mi) in m.iter_mut().enumerate() {
        for (j, v) in mi.iter_mut().enumerate() {
            *v = *row.c.get(j).unwrap_or(&0);
        }
        mi[i] = (mi[i] + p - 1) % p;
        row = row.mulmod(&xp, f, p);
    }
    // solve v · M = 0: eliminate on the transpose
    let mut t = vec![vec![0u64; n]; n];
    for i in 0..n {
        for j in 0..n {
            t[j][i] = m[i][j];
        }
    }
    let mut pivot_of_col = vec![usize::MAX; n];
    let mut r = 0;
    for c in 0..n {
        let Some(pr) = (r..n).find(|&i| t[i][c] != 0) else {
            continue;
        };
        t.swap(pr, r);
        let inv = inv_mod(t[r][c], p);
        for v in t[r].iter_mut() {
            *v = *v * inv % p;
        }
        for i in 0..n {
            if i != r && t[i][c] != 0 {
                let f = t[i][c];
                for j in 0..n {
                    t[i][j] = (t[i][j] + p - f * t[r][j] % p) % p;
                }
            }
        }
        pivot_of_col[c] = r;
        r += 1;
    }
    let mut basis = Vec::new();
    for free in 0..n {
        if pivot_of_col[free] != usize::MAX {
            continue;
        }
        let mut v = vec![0u64; n];
        v[free] = 1;
        for c in 0..n {
            let pr = pivot_of_col[c];
            if pr != usize::MAX {
                v[c] = (p - t[pr][free]) % p;
            }
        }
        basis.push(PolyFp::new(v));
    }
    basis
}

/// Number of irreducible factors of a squarefree `f` mod `p`.
pub(crate) fn berlekamp_count(f: &PolyFp, p: u64) -> usize {
    berlekamp_kernel(f, p).len()
}

/// Monic irreducible factors of a monic squarefree `f` mod `p`.
pub(crate) fn berlekamp_factor(f: &PolyFp, p: u64) -> Vec<PolyFp> {
    let basis = berlekamp_kernel(f, p);
    let r = basis.len();
    let mut factors = vec![f.make_monic(p)];
    for v in basis.iter().filter(|v| v.deg() > 0) {
        if factors.len() == r {
            break;
        }
        let mut next = Vec::new();
        for g in factors {
            if g.deg() <= 1 {
                next.push(g);
                continue;
            }
            let mut rest = g;
            for s in 0..p {
                if rest.deg() <= 1 {
                    break;
                }
                let shifted = v.sub(&PolyFp::new(vec![s]), p);
                let h = rest.gcd(&shifted, p);
                if h.deg() > 0 && h.deg() < rest.deg() {
                    rest = rest.divrem(&h, p).0.make_monic(p);
                    next.push(h);
                }
            }
            next.push(rest);
        }
        factors = next;
    }
    debug_assert_eq!(factors.len(), r);
    factors.sort_by(|a, b| (a.deg(), &a.c).cmp(&(b.deg(), &b.c)));
    factors
}

/// Odd primes in increasing order.
pub(crate) fn small_primes() -> impl Iterator<Item = u64> {
    (3u64..).step_by(2).filter(|&n| (3..).step_by(2).take_while(|d| d * d <= n).all(|d| n % d != 0))
}
