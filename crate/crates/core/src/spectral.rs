//! Eigenmatrices, Krein parameters and the dual flags of a validated basis
//! with a multiplicity profile.
//!
//! Eigenvalue `θ_i` of `B_1` lies in the root field of one irreducible
//! factor `g_t`, and `p_i(j) = f_j(θ_i)` is held exactly as `f_j mod g_t`.
//! Sums over whole Galois orbits are traces and are decided exactly. Other
//! signs are decided with interval enclosures refined until either the sign
//! is clear or the enclosure fits below a root-separation bound, a nonzero
//! algebraic integer of degree `N` with conjugates at most `H` in size being
//! at least `H^{1-N}` in absolute value.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::factor::FactoredPolynomial;
use crate::linalg::minimal_polynomial;
use crate::numfield::{is_abelian_splitting_field, NumberField, Splitting};
use crate::poly::{IntPoly, RatPoly};
use crate::resultant::newton_power_sums;
use crate::roots::{eval_interval, isolate_real_roots, Interval, RootEnclosure};
use crate::sieve::MultiplicityProfile;
use crate::sita::SitaBasis;

/// Largest enclosure precision, in bits, before a sign is left undecided.
pub const PRECISION_CAP_BITS: u32 = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct Eigenvalue {
    /// Index into [`SpectralData::factors`]; factor 0 is `x - k_1`.
    pub factor: usize,
    pub enclosure: RootEnclosure,
}

/// Spectral view of a basis under a fixed multiplicity profile.
#[derive(Clone, Debug)]
pub struct SpectralData {
    n: u64,
    k: Vec<u64>,
    polys: Vec<RatPoly>,
    factors: Vec<IntPoly>,
    factor_mult: Vec<u64>,
    fields: Vec<NumberField>,
    power_sums: Vec<Vec<BigInt>>,
    residues: Vec<Vec<RatPoly>>,
    eigen: Vec<Eigenvalue>,
    precision: u32,
}

fn rat(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn sign_of_rational(v: &BigRational) -> Sign {
    match v.cmp(&BigRational::zero()) {
        Ordering::Less => Sign::Negative,
        Ordering::Equal => Sign::Zero,
        Ordering::Greater => Sign::Positive,
    }
}

fn disjoint(a: &Interval, b: &Interval) -> bool {
    a.hi < b.lo || b.hi < a.lo || (a.lo == a.hi && b.lo == b.hi && a.lo != b.lo)
}

pub fn spectral_data(b: &SitaBasis, p: &MultiplicityProfile) -> SpectralData {
    let d = b.d();
    let k: Vec<u64> = (0..=d).map(|i| b.k(i)).collect();
    let n = b.order();
    let mut factors = vec![IntPoly::x_minus(BigInt::from(k[1]))];
    factors.extend(p.factors.iter().cloned());
    let mut factor_mult = vec![1u64];
    factor_mult.extend(p.multiplicities.iter().copied());
    let fields: Vec<NumberField> = factors.iter().map(NumberField::new).collect();
    let power_sums = factors.iter().map(|g| newton_power_sums(g, g.deg())).collect();
    let polys = b.polys().to_vec();
    let residues = fields
        .iter()
        .map(|f| polys.iter().map(|q| f.reduce(q)).collect())
        .collect();
    let mut eigen = Vec::with_capacity(d + 1);
    for (t, g) in factors.iter().enumerate() {
        let roots = isolate_real_roots(g).expect("irreducible factors are squarefree");
        assert_eq!(roots.len(), g.deg(), "B_1 is similar to a symmetric matrix");
        eigen.extend(roots.into_iter().map(|r| Eigenvalue { factor: t, enclosure: r }));
    }
    // separate the enclosures, then order principal first and the rest descending
    loop {
        let mut clash = None;
        'outer: for i in 0..eigen.len() {
            for j in i + 1..eigen.len() {
                if !disjoint(&eigen[i].enclosure.interval, &eigen[j].enclosure.interval) {
                    clash = Some((i, j));
                    break 'outer;
                }
            }
        }
        let Some((i, j)) = clash else { break };
        eigen[i].enclosure.bisect();
        eigen[j].enclosure.bisect();
    }
    eigen.sort_by(|a, b| match (a.factor == 0, b.factor == 0) {
        (true, _) => Ordering::Less,
        (_, true) => Ordering::Greater,
        _ => b.enclosure.interval.lo.cmp(&a.enclosure.interval.lo),
    });
    SpectralData { n, k, polys, factors, factor_mult, fields, power_sums, residues, eigen, precision: 0 }
}

impl SpectralData {
    pub fn d(&self) -> usize {
        self.k.len() - 1
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn eigenvalues(&self) -> &[Eigenvalue] {
        &self.eigen
    }

    pub fn factors(&self) -> &[IntPoly] {
        &self.factors
    }

    /// `m_i` for eigenvalue index `i`.
    pub fn multiplicity(&self, i: usize) -> u64 {
        self.factor_mult[self.eigen[i].factor]
    }

    pub fn multiplicities(&self) -> Vec<u64> {
        (0..=self.d()).map(|i| self.multiplicity(i)).collect()
    }

    /// `f_j mod g_t` for the factor carrying `θ_i`.
    pub fn p_exact(&self, i: usize, j: usize) -> &RatPoly {
        &self.residues[self.eigen[i].factor][j]
    }

    fn refine(&mut self, bits: u32) {
        if bits <= self.precision {
            return;
        }
        for e in &mut self.eigen {
            e.enclosure.refine_bits(bits);
        }
        self.precision = bits;
    }

    fn theta(&self, i: usize) -> Interval {
        self.eigen[i].enclosure.as_interval()
    }

    fn p_at(&self, i: usize, j: usize) -> Interval {
        eval_interval(self.p_exact(i, j), &self.theta(i))
    }

    /// Enclosure of `p_i(j) = f_j(θ_i)` no wider than `width`.
    pub fn p_enclosure(&mut self, i: usize, j: usize, width: &BigRational) -> Interval {
        let mut bits = self.precision.max(16);
        loop {
            self.refine(bits);
            let iv = self.p_at(i, j);
            if &iv.width() <= width || self.eigen[i].enclosure.exact().is_some() {
                return iv;
            }
            bits *= 2;
        }
    }

    /// Enclosure of `q_j(i) = m_i·p_i(j)/k_j` no wider than `width`.
    pub fn q_enclosure(&mut self, i: usize, j: usize, width: &BigRational) -> Interval {
        let scale = rat(self.multiplicity(i)) / rat(self.k[j]);
        let inner = width / &scale;
        self.p_enclosure(i, j, &inner).scale(&scale)
    }

    /// Column orthogonality `Σ_i m_i·p_i(j)·p_i(l) = δ_jl·n·k_j`, exactly by traces.
    pub fn orthogonality(&self) -> bool {
        let d = self.d();
        for j in 0..=d {
            for l in j..=d {
                let mut total = BigRational::zero();
                for (t, field) in self.fields.iter().enumerate() {
                    let prod = field.mul(&self.residues[t][j], &self.residues[t][l]);
                    total += field.trace(&prod, &self.power_sums[t]) * rat(self.factor_mult[t]);
                }
                let want = if j == l { rat(self.n * self.k[j]) } else { BigRational::zero() };
                if total != want {
                    return false;
                }
            }
        }
        true
    }

    /// Whether `P·Q = n·I` holds inside enclosures of the given width.
    pub fn pq_contains_identity(&mut self, width: &BigRational) -> bool {
        let d = self.d();
        let mut p = vec![vec![Interval::from_int(0); d + 1]; d + 1];
        let mut q = vec![vec![Interval::from_int(0); d + 1]; d + 1];
        for i in 0..=d {
            for j in 0..=d {
                p[i][j] = self.p_enclosure(i, j, width);
                q[j][i] = self.q_enclosure(i, j, width);
            }
        }
        for i in 0..=d {
            for c in 0..=d {
                let mut acc = Interval::from_int(0);
                for j in 0..=d {
                    acc = acc.add(&p[i][j].mul(&q[j][c]));
                }
                let want = if i == c { rat(self.n) } else { BigRational::zero() };
                if !acc.contains(&want) {
                    return false;
                }
            }
        }
        true
    }

    /// Refines until `eval` has a definite sign or fits inside `(-bound, bound)`.
    fn decide(&mut self, bound: &BigRational, eval: impl Fn(&Self) -> Interval) -> Sign {
        let mut bits = self.precision.max(64);
        loop {
            self.refine(bits);
            let iv = eval(self);
            match iv.sign() {
                Some(Ordering::Less) => return Sign::Negative,
                Some(Ordering::Greater) => return Sign::Positive,
                _ => {}
            }
            if iv.lo == iv.hi && iv.lo.is_zero() {
                return Sign::Zero;
            }
            if &-&iv.lo < bound && &iv.hi < bound {
                return Sign::Zero;
            }
            if bits >= PRECISION_CAP_BITS {
                return Sign::Unknown;
            }
            bits = (bits * 2).min(PRECISION_CAP_BITS);
        }
    }

    /// Sign of `Σ_l f_l(θ_i)·f_l(θ_j)·f_l(θ_c)/k_l²`, which is `n·q^c_ij/(m_i·m_j)`.
    ///
    /// Each `f_l(θ)` is an eigenvalue of the nonnegative integer matrix
    /// `B_l`, so it is an algebraic integer with all conjugates at most `k_l`.
    fn krein_sign(&mut self, i: usize, j: usize, c: usize) -> Sign {
        let d = self.d();
        let idx = [i, j, c];
        let mut irrational: Vec<usize> = idx
            .iter()
            .copied()
            .filter(|&x| self.eigen[x].enclosure.exact().is_none())
            .collect();
        irrational.sort_unstable();
        irrational.dedup();
        if irrational.len() <= 1 {
            // the sum lies in Q(θ) for the one irrational eigenvalue, if any
            let mut h = RatPoly::zero();
            for l in 0..=d {
                let mut term = RatPoly::constant(BigRational::new(BigInt::one(), BigInt::from(self.k[l] * self.k[l])));
                for &x in &idx {
                    term = match self.eigen[x].enclosure.exact() {
                        Some(r) => term.scale(&self.polys[l].eval(r)),
                        None => &term * &self.polys[l],
                    };
                }
                h = &h + &term;
            }
            let Some(&e) = irrational.first() else {
                return sign_of_rational(&h.coeff(0));
            };
            let res = self.fields[self.eigen[e].factor].reduce(&h);
            if res.is_zero() {
                return Sign::Zero;
            }
            return self.decide(&BigRational::zero(), |s| eval_interval(&res, &s.theta(e)));
        }
        let kk = (0..=d).fold(BigInt::one(), |acc, x| acc.lcm(&BigInt::from(self.k[x] * self.k[x])));
        let degree = self.conjugate_count(&irrational);
        let h = (&kk * BigInt::from(self.n)).max(BigInt::one());
        let bound = BigRational::new(BigInt::one(), &kk * h.pow(degree.saturating_sub(1)));
        let k = self.k.clone();
        self.decide(&bound, |s| {
            let mut acc = Interval::from_int(0);
            for x in 0..=d {
                let term = s.p_at(i, x).mul(&s.p_at(j, x)).mul(&s.p_at(c, x));
                acc = acc.add(&term.scale(&BigRational::new(BigInt::one(), BigInt::from(k[x] * k[x]))));
            }
            acc
        })
    }

    /// Upper bound on the degree of `Q(θ_x : x ∈ roots)` for distinct eigenvalues.
    fn conjugate_count(&self, roots: &[usize]) -> u32 {
        let mut per_factor = vec![0u32; self.factors.len()];
        for &x in roots {
            per_factor[self.eigen[x].factor] += 1;
        }
        let mut total: u32 = 1;
        for (t, &r) in per_factor.iter().enumerate() {
            let n_t = self.factors[t].deg() as u32;
            for s in 0..r {
                total = total.saturating_mul(n_t - s);
            }
        }
        total
    }

    /// Nonnegativity of every `q^c_ij` and the absolute bound.
    pub fn krein_and_absolute_bound(&mut self) -> (Check, bool) {
        let d = self.d();
        let mut signs = vec![Sign::Zero; (d + 1) * (d + 1) * (d + 1)];
        let at = |i: usize, j: usize, c: usize| (i * (d + 1) + j) * (d + 1) + c;
        let mut krein = Check::Pass;
        for i in 1..=d {
            for j in i..=d {
                for c in j..=d {
                    let s = self.krein_sign(i, j, c);
                    match s {
                        Sign::Negative => krein = Check::Fail,
                        Sign::Unknown if krein == Check::Pass => krein = Check::Indeterminate,
                        _ => {}
                    }
                    for (a, b, e) in [(i, j, c), (i, c, j), (j, i, c), (j, c, i), (c, i, j), (c, j, i)] {
                        signs[at(a, b, e)] = s;
                    }
                }
            }
        }
        let mut absolute = true;
        for i in 1..=d {
            for j in i..=d {
                let mut total: u64 = if i == j { self.multiplicity(0) } else { 0 };
                for c in 1..=d {
                    if matches!(signs[at(i, j, c)], Sign::Positive | Sign::Negative) {
                        total += self.multiplicity(c);
                    }
                }
                let (mi, mj) = (self.multiplicity(i), self.multiplicity(j));
                let limit = if i == j { mi * (mi + 1) / 2 } else { mi * mj };
                if total > limit {
                    absolute = false;
                }
            }
        }
        (krein, absolute)
    }

    /// Whether `c_j = Σ_{i∈S} q_j(i)`, `j = 0, …, d`, are pairwise distinct.
    pub fn copolynomial_in(&mut self, subset: &[usize]) -> bool {
        let d = self.d();
        for j in 0..=d {
            for l in j + 1..=d {
                match self.subset_difference_sign(subset, j, l) {
                    Sign::Positive | Sign::Negative => {}
                    Sign::Zero | Sign::Unknown => return false,
                }
            }
        }
        true
    }

    /// Sign of `Σ_{i∈S} m_i·h(θ_i)` with `h = f_j/k_j - f_l/k_l`.
    fn subset_difference_sign(&mut self, subset: &[usize], j: usize, l: usize) -> Sign {
        let h = &self.polys[j].scale(&BigRational::new(BigInt::one(), BigInt::from(self.k[j])))
            - &self.polys[l].scale(&BigRational::new(BigInt::one(), BigInt::from(self.k[l])));
        let nf = self.factors.len();
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); nf];
        for &i in subset {
            members[self.eigen[i].factor].push(i);
        }
        let mut exact = BigRational::zero();
        let mut irrational = 0usize;
        let mut partial: Vec<usize> = Vec::new();
        for t in 0..nf {
            let count = members[t].len();
            if count == 0 {
                continue;
            }
            let field = &self.fields[t];
            let res = field.reduce(&h);
            let m = rat(self.factor_mult[t]);
            let deg = self.factors[t].deg();
            if res.is_zero() {
                continue;
            }
            if count == deg {
                exact += field.trace(&res, &self.power_sums[t]) * &m;
            } else if res.deg() == 0 {
                exact += res.coeff(0) * &m * rat(count as u64);
            } else if count == 1 || count == deg - 1 {
                irrational += 1;
                partial.push(t);
            } else {
                irrational += 2;
                partial.push(t);
            }
        }
        if partial.is_empty() {
            return sign_of_rational(&exact);
        }
        // a single irrational summand cannot cancel a rational one
        let certain_nonzero = irrational == 1;
        let bound = if certain_nonzero {
            BigRational::zero()
        } else {
            // lcm(k_j, k_l)·Δ is an algebraic integer with conjugates at most 2·lcm·Σ m_i
            let kjl = BigInt::from(self.k[j]).lcm(&BigInt::from(self.k[l]));
            let weight: u64 = subset.iter().map(|&i| self.multiplicity(i)).sum();
            let big_h = (BigInt::from(2 * weight) * &kjl).max(BigInt::one());
            let mut degree: u32 = 1;
            for &t in &partial {
                let n_t = self.factors[t].deg() as u64;
                let c = members[t].len() as u64;
                degree = degree.saturating_mul(binomial(n_t, c).to_u32().unwrap_or(u32::MAX));
            }
            BigRational::new(BigInt::one(), kjl * big_h.pow(degree.saturating_sub(1)))
        };
        let sets: Vec<(usize, Vec<usize>)> = partial.iter().map(|&t| (t, members[t].clone())).collect();
        let mults = self.factor_mult.clone();
        self.decide(&bound, |s| {
            let mut acc = Interval::point(exact.clone());
            for (t, idx) in &sets {
                for &i in idx {
                    let v = eval_interval(&h, &s.theta(i)).scale(&rat(mults[*t]));
                    acc = acc.add(&v);
                }
            }
            acc
        })
    }

    /// Singletons `{i}` for which the scheme is copolynomial in `E_i`.
    pub fn copolynomial_in_e(&mut self) -> Vec<usize> {
        (1..=self.d()).filter(|&i| self.copolynomial_in(&[i])).collect()
    }

    /// Lexicographically least nonempty `S ⊆ {1, …, d}` with the scheme
    /// copolynomial in `Σ_{i∈S} E_i`.
    pub fn idempotent_witness(&mut self) -> Option<Vec<usize>> {
        let d = self.d();
        let mut stack: Vec<usize> = Vec::new();
        let mut next = 1usize;
        loop {
            if next <= d {
                stack.push(next);
                if self.copolynomial_in(&stack.clone()) {
                    return Some(stack);
                }
                next += 1;
            } else {
                let last = stack.pop()?;
                next = last + 1;
                if stack.is_empty() && next > d {
                    return None;
                }
            }
        }
    }
}

fn binomial(n: u64, c: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..c {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// The multiplicities forced by row orthogonality,
/// `m_θ = n / Σ_j f_j(θ)²/k_j`, per nontrivial factor in profile order;
/// `None` when they are not positive integers.
pub fn true_multiplicities(b: &SitaBasis, factors: &[IntPoly]) -> Option<Vec<u64>> {
    let n = rat(b.order());
    let mut out = Vec::with_capacity(factors.len());
    for g in factors {
        let field = NumberField::new(g);
        let mut s = RatPoly::zero();
        for (j, f) in b.polys().iter().enumerate() {
            let r = field.reduce(f);
            s = &s + &field.mul(&r, &r).scale(&BigRational::new(BigInt::one(), BigInt::from(b.k(j))));
        }
        if s.deg() > 0 || s.is_zero() {
            return None;
        }
        let m = &n / s.coeff(0);
        if !m.is_integer() || !m.is_positive() {
            return None;
        }
        out.push(m.to_integer().to_u64()?);
    }
    Some(out)
}

/// Some irreducible factor of `μ_1` has a nonabelian splitting field.
pub fn noncyclotomic(fp: &FactoredPolynomial) -> bool {
    fp.irreducibles()
        .filter(|g| g.deg() >= 3)
        .any(|g| is_abelian_splitting_field(g) == Ok(Splitting::Nonabelian))
}

/// `A_j` generates the Bose–Mesner algebra.
pub fn polynomial_in(b: &SitaBasis, j: usize) -> bool {
    minimal_polynomial(b.matrix(j)).deg() == b.d() + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::parse_array;
    use crate::factor::factor_over_integers;
    use crate::sieve::{multiplicity_candidates, nontrivial_factors};
    use crate::sita::derive_sita;

    fn setup(s: &str) -> (SitaBasis, FactoredPolynomial, SpectralData) {
        let b = derive_sita(&parse_array(s).unwrap()).unwrap();
        let fp = factor_over_integers(b.minimal_polynomial());
        let factors = nontrivial_factors(&fp, b.k(1)).unwrap();
        let m = true_multiplicities(&b, &factors).unwrap();
        let prof = multiplicity_candidates(&fp, b.valencies())
            .unwrap()
            .into_iter()
            .find(|p| p.multiplicities == m)
            .unwrap();
        let s = spectral_data(&b, &prof);
        (b, fp, s)
    }

    #[test]
    fn pentagon_spectrum() {
        let (b, fp, mut s) = setup("[[2,2],[1]]");
        assert_eq!(s.multiplicities(), vec![1, 2, 2]);
        assert!(s.orthogonality());
        let w = BigRational::new(BigInt::one(), BigInt::from(1u64 << 20));
        for j in 0..3 {
            assert!(s.p_enclosure(0, j, &w).contains(&rat(b.k(j))));
        }
        assert!(s.pq_contains_identity(&w));
        assert_eq!(s.krein_and_absolute_bound(), (Check::Pass, true));
        assert!(s.copolynomial_in(&[1]));
        assert!(!noncyclotomic(&fp));
        assert!(polynomial_in(&b, 2));
    }

    #[test]
    fn order_27_rational_spectrum() {
        let (_, _, mut s) = setup("[[8,16,2],[3,0;8]]");
        assert_eq!(s.multiplicities(), vec![1, 12, 8, 6]);
        assert!(s.orthogonality());
        assert_eq!(s.krein_and_absolute_bound().0, Check::Pass);
    }

    #[test]
    fn copolynomial_examples() {
        for a in ["[[9,2,12,18],[9,0,3;0,0;6]]", "[[8,1,18,24],[8,0,2;0,0;6]]"] {
            let (b, _, mut s) = setup(a);
            assert!(polynomial_in(&b, 1));
            assert!(s.copolynomial_in_e().is_empty(), "{a}");
            assert!(s.idempotent_witness().is_some(), "{a}");
        }
    }

    #[test]
    fn icosahedron_golden_spectrum() {
        let (_, fp, mut s) = setup("[[5,5,1],[2,0;5]]");
        assert!(!noncyclotomic(&fp));
        assert_eq!(s.multiplicities(), vec![1, 3, 5, 3]);
        assert_eq!(s.krein_and_absolute_bound(), (Check::Pass, true));
    }
}
