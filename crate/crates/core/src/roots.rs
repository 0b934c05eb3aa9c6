//! Real root isolation with Sturm sequences and exact dyadic intervals.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::{IntPoly, RatPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootError {
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("zero polynomial has no isolated roots")]
    Zero,
}

/// Closed rational interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(v: BigRational) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn from_int(v: i64) -> Self {
        Self::point(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Sign when the whole interval lies strictly on one side of zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Largest absolute value in the interval.
    pub fn magnitude(&self) -> BigRational {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let mut lo = c[0].clone();
        let mut hi = c[0].clone();
        for v in &c[1..] {
            if *v < lo {
                lo = v.clone();
            }
            if *v > hi {
                hi = v.clone();
            }
        }
        Interval { lo, hi }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let a = &self.lo * s;
        let b = &self.hi * s;
        if s.is_negative() {
            Interval { lo: b, hi: a }
        } else {
            Interval { lo: a, hi: b }
        }
    }

    pub fn shift(&self, s: &BigRational) -> Self {
        Interval { lo: &self.lo + s, hi: &self.hi + s }
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }
}

/// Horner evaluation of a rational polynomial over an interval.
pub fn eval_interval(p: &RatPoly, x: &Interval) -> Interval {
    if x.lo == x.hi {
        return Interval::point(p.eval(&x.lo));
    }
    let mut acc = Interval::point(BigRational::zero());
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(x).shift(c);
    }
    acc
}

/// A certified enclosure of exactly one real root of an integer polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootEnclosure {
    pub polynomial: IntPoly,
    /// Open interval `(lo, hi)` containing exactly one root; a degenerate
    /// interval `lo == hi` means the root is that rational number.
    pub interval: Interval,
    lo_sign: i8,
}

fn sign_of(v: &BigInt) -> i8 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

fn sign_at(p: &IntPoly, x: &BigRational) -> i8 {
    // sign of denom^deg · p(num/denom), computed in integers
    let n = x.numer();
    let d = x.denom();
    let deg = p.deg();
    let mut acc = BigInt::zero();
    let mut dpow = BigInt::one();
    let mut terms: Vec<BigInt> = Vec::with_capacity(deg + 1);
    for _ in 0..=deg {
        terms.push(dpow.clone());
        dpow *= d;
    }
    for (i, c) in p.coeffs().iter().enumerate().rev() {
        acc = acc * n + c * &terms[deg - i];
    }
    sign_of(&acc)
}

impl RootEnclosure {
    pub fn width(&self) -> BigRational {
        self.interval.width()
    }

    /// The root itself when it is rational and has been located exactly.
    pub fn exact(&self) -> Option<&BigRational> {
        (self.interval.lo == self.interval.hi).then_some(&self.interval.lo)
    }

    /// One bisection step; the root stays strictly inside.
    pub fn bisect(&mut self) {
        if self.exact().is_some() {
            return;
        }
        let mid = self.interval.midpoint();
        let s = sign_at(&self.polynomial, &mid);
        if s == 0 {
            self.interval = Interval::point(mid);
        } else if s == self.lo_sign {
            self.interval.lo = mid;
        } else {
            self.interval.hi = mid;
        }
    }

    /// Bisects until the width is at most `width`.
    pub fn refine_to(&mut self, width: &BigRational) {
        while self.exact().is_none() && &self.width() > width {
            self.bisect();
        }
    }

    /// Bisects until the width is at most `2^-bits`.
    pub fn refine_bits(&mut self, bits: u32) {
        let w = BigRational::new(BigInt::one(), BigInt::one() << bits);
        self.refine_to(&w);
    }

    pub fn as_interval(&self) -> Interval {
        self.interval.clone()
    }
}

/// Sturm sequence `g, g', -rem(g, g'), …`.
pub fn sturm_sequence(g: &IntPoly) -> Vec<RatPoly> {
    let mut seq = Vec::new();
    let g0 = g.to_rat();
    let g1 = g0.derivative();
    seq.push(g0);
    if g1.is_zero() {
        return seq;
    }
    seq.push(g1);
    loop {
        let n = seq.len();
        let r = seq[n - 2].rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(-&r);
    }
    seq
}

fn variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn rat_sign(v: &BigRational) -> i8 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

fn variations_at(seq: &[RatPoly], x: &BigRational) -> usize {
    variations(seq.iter().map(|p| rat_sign(&p.eval(x))))
}

/// Number of distinct real roots in `(a, b]`.
pub fn sturm_count(seq: &[RatPoly], a: &BigRational, b: &BigRational) -> usize {
    variations_at(seq, a) - variations_at(seq, b)
}

/// Number of distinct real roots overall.
pub fn real_root_count(g: &IntPoly) -> usize {
    let seq = sturm_sequence(g);
    let at_neg = variations(seq.iter().map(|p| {
        let s = rat_sign(&p.lead());
        if p.deg() % 2 == 1 {
            -s
        } else {
            s
        }
    }));
    let at_pos = variations(seq.iter().map(|p| rat_sign(&p.lead())));
    at_neg - at_pos
}

/// Power of two strictly exceeding every root modulus (Cauchy bound).
fn root_bound(g: &IntPoly) -> BigRational {
    let lead = g.lead();
    let lead = lead.abs();
    let mut max = BigRational::zero();
    for c in &g.coeffs()[..g.deg()] {
        let r = BigRational::new(c.abs(), lead.clone());
        if r > max {
            max = r;
        }
    }
    let bound = max + BigRational::one();
    let mut p = BigRational::one();
    while p <= bound {
        p *= BigRational::from_integer(BigInt::from(2));
    }
    p
}

/// Isolates all real roots of a squarefree integer polynomial, in increasing order.
pub fn isolate_real_roots(g: &IntPoly) -> Result<Vec<RootEnclosure>, RootError> {
    if g.is_zero() {
        return Err(RootError::Zero);
    }
    if g.deg() == 0 {
        return Ok(Vec::new());
    }
    if g.to_rat().gcd(&g.to_rat().derivative()).deg() > 0 {
        return Err(RootError::NotSquarefree);
    }
    let seq = sturm_sequence(g);
    let m = root_bound(g);
    let mut out = Vec::new();
    let mut stack = alloc::vec![Interval::new(-m.clone(), m)];
    while let Some(iv) = stack.pop() {
        let count = sturm_count(&seq, &iv.lo, &iv.hi);
        match count {
            0 => {}
            1 => {
                let hi_sign = sign_at(g, &iv.hi);
                if hi_sign == 0 {
                    out.push(RootEnclosure {
                        polynomial: g.clone(),
                        interval: Interval::point(iv.hi.clone()),
                        lo_sign: 0,
                    });
                } else {
                    let lo_sign = sign_at(g, &iv.lo);
                    debug_assert!(lo_sign != 0 && lo_sign != hi_sign);
                    out.push(RootEnclosure { polynomial: g.clone(), interval: iv, lo_sign });
                }
            }
            _ => {
                // split at a non-root so no root straddles an endpoint
                let w = iv.width();
                let mut mid = iv.midpoint();
                let mut step = w / BigRational::from_integer(BigInt::from(8));
                while sign_at(g, &mid) == 0 {
                    mid += &step;
                    step /= BigRational::from_integer(BigInt::from(2));
                }
                stack.push(Interval::new(mid.clone(), iv.hi));
                stack.push(Interval::new(iv.lo, mid));
            }
        }
    }
    out.sort_by(|a, b| a.interval.lo.cmp(&b.interval.lo));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn isolates_sqrt_five() {
        let g = IntPoly::from_i64(&[-5, 0, 1]);
        let mut roots = isolate_real_roots(&g).unwrap();
        assert_eq!(roots.len(), 2);
        for r in roots.iter_mut() {
            r.refine_to(&rat(1, 4));
        }
        assert!(roots[0].interval.lo >= rat(-5, 2) && roots[0].interval.hi <= rat(-2, 1));
        assert!(roots[1].interval.lo >= rat(2, 1) && roots[1].interval.hi <= rat(5, 2));
    }

    #[test]
    fn linear_and_no_real_roots() {
        let roots = isolate_real_roots(&IntPoly::from_roots(&[7])).unwrap();
        assert_eq!(roots.len(), 1);
        let mut r = roots[0].clone();
        r.refine_bits(20);
        assert!(r.interval.contains(&rat(7, 1)));
        assert!(isolate_real_roots(&IntPoly::from_i64(&[1, 0, 1])).unwrap().is_empty());
        assert_eq!(
            isolate_real_roots(&IntPoly::from_roots(&[1, 1])),
            Err(RootError::NotSquarefree)
        );
    }

    #[test]
    fn rational_roots_on_split_points() {
        // roots at 0 and ±1 land on dyadic split points
        let g = IntPoly::from_roots(&[-1, 0, 1, 2]);
        let roots = isolate_real_roots(&g).unwrap();
        assert_eq!(roots.len(), 4);
        assert_eq!(real_root_count(&g), 4);
        for (r, want) in roots.iter().zip([-1, 0, 1, 2]) {
            let mut r = r.clone();
            r.refine_bits(30);
            assert!(r.interval.contains(&rat(want, 1)));
        }
    }

    #[test]
    fn interval_arithmetic_encloses() {
        let x = Interval::new(rat(-1, 1), rat(2, 1));
        let p = RatPoly::from_ratios(&[(1, 1), (0, 1), (1, 1)]);
        let v = eval_interval(&p, &x);
        assert!(v.contains(&rat(1, 1)) && v.contains(&rat(5, 1)));
    }
}
