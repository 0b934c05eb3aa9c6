//! Validation of a parameter array as the intersection data of a symmetric
//! association scheme whose Bose–Mesner algebra is generated by `A_1`.
//!
//! With `v_i` the first row of `B_1^i`, the polynomial `f_i` with
//! `f_i(B_1)` having first row `k_i e_i` is unique once `v_0, …, v_d` span.
//! Then `B_i = f_i(B_1)` and the remaining work is checking the axioms.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::array::{ModelError, ParameterArray};
use crate::linalg::{minimal_polynomial, rank, solve};
use crate::matrix::{IntMatrix, RatMatrix};
use crate::poly::{IntPoly, RatPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("minimal polynomial of B_1 has degree {degree}, expected {expected}")]
    DegreeDeficient { degree: usize, expected: usize },
    #[error("first rows of B_1^0, …, B_1^d do not span")]
    SpanDeficient,
    #[error("B_{class} has a non-integral entry")]
    NonIntegralBasis { class: usize },
    #[error("B_{class} has a negative entry")]
    NegativeBasis { class: usize },
    #[error("axiom violated: {0}")]
    AxiomViolation(String),
    #[error("derived λ_1{j}{l} disagrees with the array")]
    LambdaMismatch { j: usize, l: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("class {class} is not reached from class 0")]
    NotConnected { class: usize },
}

/// Intersection matrices `B_0, …, B_d` with the polynomials `f_i`,
/// `B_i = f_i(B_1)`, and the full table `λ_{ijl} = (B_i)_{l,j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SitaBasis {
    valencies: Vec<u64>,
    matrices: Vec<IntMatrix>,
    polys: Vec<RatPoly>,
    minimal_polynomial: IntPoly,
}

impl SitaBasis {
    pub fn d(&self) -> usize {
        self.valencies.len()
    }

    pub fn order(&self) -> u64 {
        1 + self.valencies.iter().sum::<u64>()
    }

    pub fn valencies(&self) -> &[u64] {
        &self.valencies
    }

    pub fn k(&self, i: usize) -> u64 {
        if i == 0 {
            1
        } else {
            self.valencies[i - 1]
        }
    }

    pub fn matrices(&self) -> &[IntMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, i: usize) -> &IntMatrix {
        &self.matrices[i]
    }

    pub fn b1(&self) -> &IntMatrix {
        &self.matrices[1]
    }

    pub fn lambda(&self, i: usize, j: usize, l: usize) -> &BigInt {
        &self.matrices[i][(l, j)]
    }

    /// `f_0, …, f_d`.
    pub fn polys(&self) -> &[RatPoly] {
        &self.polys
    }

    pub fn minimal_polynomial(&self) -> &IntPoly {
        &self.minimal_polynomial
    }
}

fn to_int_checked(m: &RatMatrix, class: usize) -> Result<IntMatrix, ValidationError> {
    let int = m.to_int().ok_or(ValidationError::NonIntegralBasis { class })?;
    if int.entries().iter().any(Signed::is_negative) {
        return Err(ValidationError::NegativeBasis { class });
    }
    Ok(int)
}

/// Builds and checks the full intersection algebra of an array.
pub fn derive_sita(a: &ParameterArray) -> Result<SitaBasis, ValidationError> {
    let b1 = a.build_b1()?;
    let d = a.d();
    let n = d + 1;
    let mu = minimal_polynomial(&b1);
    if mu.deg() != n {
        return Err(ValidationError::DegreeDeficient { degree: mu.deg(), expected: n });
    }
    let powers = b1.powers(n);
    // rows of vt are indexed by l, columns by the power i
    let mut vt = IntMatrix::zeros(n, n);
    for (i, p) in powers.iter().enumerate() {
        for l in 0..n {
            vt[(l, i)] = p[(0, l)].clone();
        }
    }
    if rank(&vt) < n {
        return Err(ValidationError::SpanDeficient);
    }
    let mut diag = IntMatrix::zeros(n, n);
    for i in 0..n {
        diag[(i, i)] = BigInt::from(a.k(i));
    }
    let coeffs = solve(&vt, &diag).ok_or(ValidationError::SpanDeficient)?;
    let polys: Vec<RatPoly> = (0..n).map(|i| RatPoly::new(coeffs.column(i))).collect();

    let rat_powers: Vec<RatMatrix> = powers.iter().map(IntMatrix::to_rat).collect();
    let mut matrices = Vec::with_capacity(n);
    for (i, f) in polys.iter().enumerate() {
        let mut m = RatMatrix::zeros(n, n);
        for (e, c) in f.coeffs().iter().enumerate() {
            if !c.is_zero() {
                m = m.add(&rat_powers[e].scale(c));
            }
        }
        matrices.push(to_int_checked(&m, i)?);
    }
    let basis = SitaBasis {
        valencies: a.valencies().to_vec(),
        matrices,
        polys,
        minimal_polynomial: mu,
    };
    check_axioms(&basis)?;
    for j in 1..=d {
        for l in j + 1..=d {
            if *basis.lambda(1, j, l) != BigInt::from(a.lambda(j, l)) {
                return Err(ValidationError::LambdaMismatch { j, l });
            }
        }
    }
    Ok(basis)
}

fn check_axioms(b: &SitaBasis) -> Result<(), ValidationError> {
    let n = b.d() + 1;
    let k: Vec<BigInt> = (0..n).map(|i| BigInt::from(b.k(i))).collect();
    let bad = |s: String| Err(ValidationError::AxiomViolation(s));
    if *b.matrix(0) != IntMatrix::identity(n) {
        return bad(String::from("B_0 is not the identity"));
    }
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { k[i].clone() } else { BigInt::zero() };
            if *b.lambda(i, j, 0) != want {
                return bad(format!("λ_{i}{j}0 should be {want}"));
            }
            let mut weighted = BigInt::zero();
            for l in 0..n {
                let v = b.lambda(i, j, l);
                if v != b.lambda(j, i, l) {
                    return bad(format!("λ_{i}{j}{l} ≠ λ_{j}{i}{l}"));
                }
                if v * &k[l] != b.lambda(i, l, j) * &k[j] {
                    return bad(format!("λ_{i}{j}{l}·k_{l} ≠ λ_{i}{l}{j}·k_{j}"));
                }
                weighted += v * &k[l];
            }
            if weighted != &k[i] * &k[j] {
                return bad(format!("Σ_l λ_{i}{j}l·k_l ≠ k_{i}·k_{j}"));
            }
        }
    }
    for i in 1..n {
        for j in i..n {
            let lhs = b.matrix(i).matmul(b.matrix(j));
            let mut rhs = IntMatrix::zeros(n, n);
            for l in 0..n {
                let c = b.lambda(i, j, l);
                if !c.is_zero() {
                    rhs = rhs.add(&b.matrix(l).scale(c));
                }
            }
            if lhs != rhs {
                return bad(format!("B_{i}·B_{j} ≠ Σ_l λ_{i}{j}l·B_l"));
            }
        }
    }
    Ok(())
}

/// The array of the same scheme with `A_j` as the generating relation; the
/// other classes keep their relative order.
pub fn generator_array(b: &SitaBasis, j: usize) -> ParameterArray {
    let n = b.d() + 1;
    let order: Vec<usize> = [0, j].into_iter().chain((1..n).filter(|&i| i != j)).collect();
    let bj = b.matrix(j);
    let m: Vec<Vec<i64>> = order
        .iter()
        .map(|&r| order.iter().map(|&c| bj[(r, c)].to_i64().expect("bounded by a valency")).collect())
        .collect();
    let valencies: Vec<u64> = order[1..].iter().map(|&i| b.k(i)).collect();
    ParameterArray::from_b1(&m, &valencies)
}

/// The polynomials `f_0, …, f_d`, orthogonal for the weight given by the
/// eigenvalues of `B_1` and their multiplicities.
pub fn orthogonal_polys(b: &SitaBasis) -> Vec<RatPoly> {
    b.polys.clone()
}

/// Classes grouped by their distance from class 0 in the graph of `A_1`.
pub fn distance_partition(b: &SitaBasis) -> Result<Vec<Vec<usize>>, PartitionError> {
    let n = b.d() + 1;
    let mut dist = vec![usize::MAX; n];
    dist[0] = 0;
    let mut row: Vec<BigInt> = (0..n).map(|i| if i == 0 { BigInt::from(1) } else { BigInt::zero() }).collect();
    for step in 1..n {
        row = b.b1().left_mul_vec(&row);
        for (i, v) in row.iter().enumerate() {
            if dist[i] == usize::MAX && !v.is_zero() {
                dist[i] = step;
            }
        }
    }
    if let Some(class) = dist.iter().position(|&x| x == usize::MAX) {
        return Err(PartitionError::NotConnected { class });
    }
    let depth = *dist.iter().max().unwrap();
    let mut blocks = vec![Vec::new(); depth + 1];
    for (i, &t) in dist.iter().enumerate() {
        blocks[t].push(i);
    }
    Ok(blocks)
}

/// Whether the scheme is metric for `A_1`, i.e. every distance class is a single relation.
pub fn is_p_polynomial(b: &SitaBasis) -> bool {
    let Ok(blocks) = distance_partition(b) else { return false };
    if blocks.len() != b.d() + 1 || blocks.iter().any(|blk| blk.len() != 1) {
        return false;
    }
    let order: Vec<usize> = blocks.iter().map(|blk| blk[0]).collect();
    let b1 = b.b1();
    for (r, &l) in order.iter().enumerate() {
        for (c, &j) in order.iter().enumerate() {
            if r.abs_diff(c) > 1 && !b1[(l, j)].is_zero() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::parse_array;
    use crate::factor::factor_over_integers;

    fn basis(s: &str) -> Result<SitaBasis, ValidationError> {
        derive_sita(&parse_array(s).unwrap())
    }

    #[test]
    fn pentagon() {
        let b = basis("[[2,2],[1]]").unwrap();
        assert_eq!(*b.matrix(2), IntMatrix::from_i64(&[&[0, 0, 2], &[0, 1, 1], &[1, 1, 0]]));
        assert_eq!(*b.minimal_polynomial(), &IntPoly::from_roots(&[2]) * &IntPoly::from_i64(&[-1, 1, 1]));
        assert!(is_p_polynomial(&b));
        // f_2 = x^2 - 2
        assert_eq!(b.polys()[2], RatPoly::from_ratios(&[(-2, 1), (0, 1), (1, 1)]));
    }

    #[test]
    fn rank_four_minimal_polynomials() {
        let b = basis("[[5,5,1],[2,0;5]]").unwrap();
        let want = &IntPoly::from_roots(&[5, -1]) * &IntPoly::from_i64(&[-5, 0, 1]);
        assert_eq!(*b.minimal_polynomial(), want);
        let b = basis("[[8,16,2],[3,0;8]]").unwrap();
        assert_eq!(*b.minimal_polynomial(), IntPoly::from_roots(&[8, 2, -1, -4]));
        assert_eq!(factor_over_integers(b.minimal_polynomial()).factors.len(), 4);
    }

    #[test]
    fn non_metric_scheme_has_a_coarse_partition() {
        let b = basis("[[9,2,12,18],[9,0,3;0,0;6]]").unwrap();
        assert!(!is_p_polynomial(&b));
        let parts = distance_partition(&b).unwrap();
        assert_eq!(parts[0], vec![0]);
        assert_eq!(parts[1], vec![1]);
    }

    #[test]
    fn generator_arrays_are_valid() {
        let b = basis("[[4,12,12,6],[1,0,0;1,2;2]]").unwrap();
        assert_eq!(generator_array(&b, 1), parse_array("[[4,12,12,6],[1,0,0;1,2;2]]").unwrap());
        for j in 2..=4 {
            let g = generator_array(&b, j);
            let generates = crate::spectral::polynomial_in(&b, j);
            assert_eq!(derive_sita(&g).is_ok(), generates, "{g}");
        }
    }

    #[test]
    fn rejects_invalid() {
        assert!(matches!(basis("[[2,2],[2]]"), Err(ValidationError::Model(_))));
        // disjoint union of two triangles with an odd matching is not a scheme
        assert!(basis("[[2,2,1],[0,0;2]]").is_err());
    }
}
