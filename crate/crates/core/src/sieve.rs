//! The quick necessary conditions on a validated basis: handshaking,
//! integral multiplicities for the eigenvalues of `B_1`, the Frame number
//! against the discriminant of `μ_1`, and integrality of the standard trace.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::factor::FactoredPolynomial;
use crate::matrix::IntMatrix;
use crate::poly::IntPoly;
use crate::resultant::newton_power_sums;
use crate::sita::SitaBasis;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("x - k_1 is not a factor of the minimal polynomial")]
    MissingPrincipalFactor,
    #[error("minimal polynomial is not squarefree")]
    NotSquarefree,
}

/// Handshaking on the graph of `A_j` restricted to the `A_i`-neighbourhood
/// of a vertex: when `k_i > 1` is odd, `λ_iji = (B_i)_{i,j}` is even for `j > 0`.
pub fn handshake_check(b: &SitaBasis) -> bool {
    let d = b.d();
    (1..=d).filter(|&i| b.k(i) > 1 && b.k(i) % 2 == 1).all(|i| {
        (1..=d).all(|j| b.lambda(i, j, i).is_even())
    })
}

/// The reading with the indices taken literally as `(B_i)_{j,i} = λ_iij`.
pub fn handshake_check_literal(b: &SitaBasis) -> bool {
    let d = b.d();
    (1..=d).filter(|&i| b.k(i) > 1 && b.k(i) % 2 == 1).all(|i| {
        (1..=d).all(|j| b.lambda(i, i, j).is_even())
    })
}

/// Multiplicities for the nontrivial irreducible factors of `μ_1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityProfile {
    /// Irreducible factors other than `x - k_1`, in factorisation order.
    pub factors: Vec<IntPoly>,
    pub multiplicities: Vec<u64>,
    pub frame_number: BigRational,
}

impl MultiplicityProfile {
    fn new(factors: Vec<IntPoly>, multiplicities: Vec<u64>, valencies: &[u64]) -> Self {
        let frame_number = frame_number(&factors, &multiplicities, valencies);
        MultiplicityProfile { factors, multiplicities, frame_number }
    }

    pub fn order(&self) -> u64 {
        1 + self
            .factors
            .iter()
            .zip(&self.multiplicities)
            .map(|(g, m)| g.deg() as u64 * m)
            .sum::<u64>()
    }

    /// `k_1 - Σ m_t·g_{t,1}` for a given `k_1`; zero for an admissible profile.
    pub fn column_residual(&self, k1: u64) -> BigInt {
        let mut acc = BigInt::from(k1);
        for (g, &m) in self.factors.iter().zip(&self.multiplicities) {
            acc -= g.coeff(g.deg() - 1) * BigInt::from(m);
        }
        acc
    }

    /// Power sums `p_0, …, p_count` of `(x - k_1)·Π g_t^{m_t}`.
    pub fn power_sums(&self, k1: u64, count: usize) -> Vec<BigInt> {
        let mut p: Vec<BigInt> = (0..=count).map(|i| BigInt::from(k1).pow(i as u32)).collect();
        for (g, &m) in self.factors.iter().zip(&self.multiplicities) {
            let s = newton_power_sums(g, count);
            for (acc, v) in p.iter_mut().zip(s) {
                *acc += v * BigInt::from(m);
            }
        }
        p
    }
}

fn frame_number(factors: &[IntPoly], mult: &[u64], valencies: &[u64]) -> BigRational {
    let d = valencies.len();
    let n = 1 + valencies.iter().sum::<u64>();
    let mut num = BigInt::from(n).pow(d as u32 + 1);
    for &k in valencies {
        num *= BigInt::from(k);
    }
    let mut den = BigInt::one();
    for (g, &m) in factors.iter().zip(mult) {
        den *= BigInt::from(m).pow(g.deg() as u32);
    }
    BigRational::new(num, den)
}

/// The nontrivial factors of `μ_1`, after checking that `x - k_1` occurs once.
pub fn nontrivial_factors(fp: &FactoredPolynomial, k1: u64) -> Result<Vec<IntPoly>, ProfileError> {
    if !fp.is_squarefree() {
        return Err(ProfileError::NotSquarefree);
    }
    let pos = fp
        .linear_root_position(&BigInt::from(k1))
        .ok_or(ProfileError::MissingPrincipalFactor)?;
    Ok(fp
        .irreducibles()
        .enumerate()
        .filter(|&(i, _)| i != pos)
        .map(|(_, g)| g.clone())
        .collect())
}

/// Calls `visit` on every solution with all `m_t ≥ 1` of
/// `1 + Σ n_t·m_t = n` and `Σ m_t·g_{t,1} = k_1`, in lexicographic order of
/// the multiplicity vector, until `visit` breaks.
pub fn for_each_candidate<B>(
    fp: &FactoredPolynomial,
    valencies: &[u64],
    mut visit: impl FnMut(MultiplicityProfile) -> ControlFlow<B>,
) -> Result<Option<B>, ProfileError> {
    let k1 = valencies[0];
    let n = 1 + valencies.iter().sum::<u64>();
    let factors = nontrivial_factors(fp, k1)?;
    let degs: Vec<i128> = factors.iter().map(|g| g.deg() as i128).collect();
    let Some(coef) = factors
        .iter()
        .map(|g| g.coeff(g.deg() - 1).to_i128())
        .collect::<Option<Vec<i128>>>()
    else {
        return Ok(None);
    };
    if factors.is_empty() {
        return Ok(None);
    }
    let mut m = vec![0i128; factors.len()];
    let flow = dfs(0, n as i128 - 1, k1 as i128, &degs, &coef, &mut m, &mut |m| {
        let mult = m.iter().map(|&v| v as u64).collect();
        visit(MultiplicityProfile::new(factors.clone(), mult, valencies))
    });
    Ok(match flow {
        ControlFlow::Break(b) => Some(b),
        ControlFlow::Continue(()) => None,
    })
}

/// Whether the remaining factors `t..` can still reach column sum `c` using
/// exactly `r` eigenvalues, ignoring integrality.
fn reachable(t: usize, r: i128, c: i128, degs: &[i128], coef: &[i128]) -> bool {
    let base_r: i128 = degs[t..].iter().sum();
    let base_c: i128 = coef[t..].iter().sum();
    let extra = r - base_r;
    if extra < 0 {
        return false;
    }
    let target = c - base_c;
    // extreme ratios coef/deg among the remaining factors
    let (mut lo, mut hi) = (t, t);
    for s in t + 1..degs.len() {
        if coef[s] * degs[lo] < coef[lo] * degs[s] {
            lo = s;
        }
        if coef[s] * degs[hi] > coef[hi] * degs[s] {
            hi = s;
        }
    }
    target * degs[lo] >= extra * coef[lo] && target * degs[hi] <= extra * coef[hi]
}

fn dfs<B>(
    t: usize,
    r: i128,
    c: i128,
    degs: &[i128],
    coef: &[i128],
    m: &mut [i128],
    visit: &mut impl FnMut(&[i128]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let last = degs.len() - 1;
    if t == last {
        if r % degs[t] == 0 {
            let v = r / degs[t];
            if v >= 1 && coef[t] * v == c {
                m[t] = v;
                return visit(m);
            }
        }
        return ControlFlow::Continue(());
    }
    let rest: i128 = degs[t + 1..].iter().sum();
    let top = (r - rest) / degs[t];
    if t + 1 == last {
        // two unknowns left: the pair of linear equations fixes them unless
        // the columns are proportional
        let (a, b) = (degs[t], degs[last]);
        let (p, q) = (coef[t], coef[last]);
        let det = a * q - b * p;
        if det != 0 {
            let num = r * q - b * c;
            if num % det == 0 {
                let v = num / det;
                if (1..=top).contains(&v) {
                    m[t] = v;
                    return dfs(last, r - a * v, c - p * v, degs, coef, m, visit);
                }
            }
            return ControlFlow::Continue(());
        }
    }
    for v in 1..=top {
        let (r2, c2) = (r - degs[t] * v, c - coef[t] * v);
        if !reachable(t + 1, r2, c2, degs, coef) {
            continue;
        }
        m[t] = v;
        dfs(t + 1, r2, c2, degs, coef, m, visit)?;
    }
    ControlFlow::Continue(())
}

/// Every admissible profile; an empty list means no integral multiplicities.
pub fn multiplicity_candidates(
    fp: &FactoredPolynomial,
    valencies: &[u64],
) -> Result<Vec<MultiplicityProfile>, ProfileError> {
    let mut out = Vec::new();
    for_each_candidate::<()>(fp, valencies, |p| {
        out.push(p);
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Frame number of a profile and its compatibility with the discriminant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameVerdict {
    pub frame_number: BigRational,
    pub integral: bool,
    /// `F | D` and `D / F` is the square of an integer.
    pub ratio_square: bool,
}

pub fn frame_check(p: &MultiplicityProfile, discriminant: &BigInt) -> FrameVerdict {
    let f = &p.frame_number;
    let integral = f.is_integer() && f.is_positive();
    let ratio_square = integral && {
        let fi = f.to_integer();
        let (q, r) = discriminant.div_rem(&fi);
        r.is_zero() && !q.is_negative() && {
            let s = q.sqrt();
            &s * &s == q
        }
    };
    FrameVerdict { frame_number: f.clone(), integral, ratio_square }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceVerdict {
    /// `p_i / n` is a nonnegative integer for `i = 0, …, d+1`.
    pub integral: bool,
    /// Additionally `p_i / n = (B_1^i)_{0,0}` on the same range.
    pub standard: bool,
}

/// Standard-trace test on the powers of `A_1` for a candidate spectrum.
pub fn trace_check(p: &MultiplicityProfile, b1: &IntMatrix) -> TraceVerdict {
    let d = b1.dim() - 1;
    let k1 = b1[(0, 1)].to_u64().expect("valency fits");
    let n = BigInt::from(p.order());
    let sums = p.power_sums(k1, d + 1);
    let mut integral = true;
    let mut standard = true;
    let mut power = IntMatrix::identity(d + 1);
    for s in &sums {
        let (q, r) = s.div_rem(&n);
        if !r.is_zero() || q.is_negative() {
            integral = false;
            standard = false;
            break;
        }
        if q != power[(0, 0)] {
            standard = false;
        }
        power = power.matmul(b1);
    }
    TraceVerdict { integral, standard }
}
