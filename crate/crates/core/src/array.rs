//! Parameter arrays `[[k_1,…,k_d],[λ_112,…,λ_11d; λ_123,…; …; λ_1,d-1,d]]`.
//!
//! An array lists the valencies and the entries of `B_1` that lie below the
//! diagonal, column by column. Everything else in `B_1` follows from the
//! reciprocity identity `λ_1jl·k_l = λ_1lj·k_j` and the row sums `k_1`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::matrix::IntMatrix;

/// A QPG parameter array of class `d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParameterArray {
    valencies: Vec<u64>,
    /// Group `j` (0-based `j-1`) holds `λ_{1,j,j+1}, …, λ_{1,j,d}`.
    lambdas: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("malformed brackets or separators")]
    MalformedBrackets,
    #[error("expected {expected} lambda groups, found {found}")]
    WrongGroupCount { expected: usize, found: usize },
    #[error("lambda group {group} should have {expected} entries, found {found}")]
    WrongGroupLength { group: usize, expected: usize, found: usize },
    #[error("negative entry")]
    Negative,
    #[error("invalid integer")]
    InvalidInteger,
    #[error("trailing characters")]
    Trailing,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at character {position}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("valency k_{index} is zero")]
    ZeroValency { index: usize },
    #[error("k_{j} does not divide λ_1{j}{l}·k_{l}")]
    ReciprocityNonIntegral { j: usize, l: usize },
    #[error("row {row} of B_1 needs a negative diagonal entry")]
    NegativeDiagonal { row: usize },
    #[error("class count must be at least 1")]
    Empty,
}

impl ParameterArray {
    /// Builds an array, checking the group shape.
    pub fn new(valencies: Vec<u64>, lambdas: Vec<Vec<u64>>) -> Result<Self, ParseErrorKind> {
        let d = valencies.len();
        if d == 0 {
            return Err(ParseErrorKind::MalformedBrackets);
        }
        let expected = d - 1;
        if lambdas.len() != expected {
            return Err(ParseErrorKind::WrongGroupCount { expected, found: lambdas.len() });
        }
        for (g, group) in lambdas.iter().enumerate() {
            if group.len() != d - g - 1 {
                return Err(ParseErrorKind::WrongGroupLength {
                    group: g + 1,
                    expected: d - g - 1,
                    found: group.len(),
                });
            }
        }
        Ok(ParameterArray { valencies, lambdas })
    }

    /// Class count `d`.
    pub fn d(&self) -> usize {
        self.valencies.len()
    }

    pub fn rank(&self) -> usize {
        self.d() + 1
    }

    /// `k_1, …, k_d`.
    pub fn valencies(&self) -> &[u64] {
        &self.valencies
    }

    /// `k_i` with `k_0 = 1`.
    pub fn k(&self, i: usize) -> u64 {
        if i == 0 {
            1
        } else {
            self.valencies[i - 1]
        }
    }

    pub fn groups(&self) -> &[Vec<u64>] {
        &self.lambdas
    }

    pub fn order(&self) -> u64 {
        1 + self.valencies.iter().sum::<u64>()
    }

    /// `λ_{1jl}` for `1 ≤ j < l ≤ d`.
    pub fn lambda(&self, j: usize, l: usize) -> u64 {
        assert!(1 <= j && j < l && l <= self.d());
        self.lambdas[j - 1][l - j - 1]
    }

    /// Valencies followed by the lambda groups in reading order.
    pub fn flat(&self) -> Vec<u64> {
        let mut v = self.valencies.clone();
        for g in &self.lambdas {
            v.extend_from_slice(g);
        }
        v
    }

    /// `λ_112 > 0` and `k_3 ≤ … ≤ k_d`.
    pub fn is_search_normal(&self) -> bool {
        let d = self.d();
        if d >= 2 && self.lambda(1, 2) == 0 {
            return false;
        }
        self.valencies.get(2..).is_none_or(|ks| ks.windows(2).all(|w| w[0] <= w[1]))
    }

    /// `B_1` as small integers, rows indexed by `l`, columns by `j`.
    pub fn b1_small(&self) -> Result<Vec<Vec<i64>>, ModelError> {
        let d = self.d();
        for (i, &k) in self.valencies.iter().enumerate() {
            if k == 0 {
                return Err(ModelError::ZeroValency { index: i + 1 });
            }
        }
        let k1 = self.k(1) as i64;
        let mut b = vec![vec![0i64; d + 1]; d + 1];
        b[0][1] = k1;
        if d >= 1 {
            b[1][0] = 1;
        }
        for j in 1..=d {
            for l in j + 1..=d {
                let lam = self.lambda(j, l) as i64;
                b[l][j] = lam;
                let num = lam * self.k(l) as i64;
                let kj = self.k(j) as i64;
                if num % kj != 0 {
                    return Err(ModelError::ReciprocityNonIntegral { j, l });
                }
                b[j][l] = num / kj;
            }
        }
        for r in 1..=d {
            let off: i64 = (0..=d).filter(|&c| c != r).map(|c| b[r][c]).sum();
            let diag = k1 - off;
            if diag < 0 {
                return Err(ModelError::NegativeDiagonal { row: r });
            }
            b[r][r] = diag;
        }
        Ok(b)
    }

    /// The intersection matrix `B_1` with entry `(l, j) = λ_{1jl}`.
    pub fn build_b1(&self) -> Result<IntMatrix, ModelError> {
        let b = self.b1_small()?;
        Ok(IntMatrix::from_rows(
            b.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect(),
        ))
    }

    /// Reads an array back from a `B_1` and its valencies.
    pub fn from_b1(b1: &[Vec<i64>], valencies: &[u64]) -> Self {
        let d = valencies.len();
        let lambdas = (1..d)
            .map(|j| (j + 1..=d).map(|l| b1[l][j] as u64).collect())
            .collect();
        ParameterArray { valencies: valencies.to_vec(), lambdas }
    }

    /// Relabels classes `2..=d`: class `i` becomes `perm[i]`.
    ///
    /// `perm` has length `d + 1` and fixes 0 and 1.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self, ModelError> {
        let b = self.b1_small()?;
        Ok(Self::relabel_b1(&b, &self.valencies, perm))
    }

    fn relabel_b1(b: &[Vec<i64>], valencies: &[u64], perm: &[usize]) -> Self {
        let d = valencies.len();
        let mut nb = vec![vec![0i64; d + 1]; d + 1];
        for l in 0..=d {
            for j in 0..=d {
                nb[perm[l]][perm[j]] = b[l][j];
            }
        }
        let mut nk = vec![0u64; d];
        for i in 1..=d {
            nk[perm[i] - 1] = valencies[i - 1];
        }
        Self::from_b1(&nb, &nk)
    }

    /// Least relabelling under `Sym({2,…,d})`, comparing valencies first and
    /// then the lambda groups in reading order.
    pub fn canonicalize(&self) -> Result<(ParameterArray, CanonicalKey), ModelError> {
        let b = self.b1_small()?;
        let d = self.d();
        let mut perm: Vec<usize> = (0..=d).collect();
        let mut best = self.clone();
        let mut best_flat = best.flat();
        if d >= 3 {
            while next_permutation(&mut perm[2..]) {
                let cand = Self::relabel_b1(&b, &self.valencies, &perm);
                let flat = cand.flat();
                if flat < best_flat {
                    best = cand;
                    best_flat = flat;
                }
            }
        }
        let key = CanonicalKey(best.to_string());
        Ok((best, key))
    }
}

/// Advances to the next lexicographic permutation; `false` after the last.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Rendering of the least array in an equivalence class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(pub String);

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for ParameterArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[[")?;
        for (i, k) in self.valencies.iter().enumerate() {
            if i > 0 {
                f.write_char(',')?;
            }
            write!(f, "{k}")?;
        }
        f.write_str("],[")?;
        for (g, group) in self.lambdas.iter().enumerate() {
            if g > 0 {
                f.write_char(';')?;
            }
            for (i, v) in group.iter().enumerate() {
                if i > 0 {
                    f.write_char(',')?;
                }
                write!(f, "{v}")?;
            }
        }
        f.write_str("]]")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Comma,
    Semi,
    Int(u64),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some((pos, c)) = it.next() {
        let tok = match c {
            c if c.is_whitespace() => continue,
            '[' => Tok::Open,
            ']' => Tok::Close,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '-' => return Err(ParseError { position: pos, kind: ParseErrorKind::Negative }),
            '0'..='9' => {
                let mut v: u64 = c.to_digit(10).unwrap().into();
                while let Some(&(_, n)) = it.peek() {
                    let Some(dg) = n.to_digit(10) else { break };
                    v = v
                        .checked_mul(10)
                        .and_then(|v| v.checked_add(dg.into()))
                        .ok_or(ParseError { position: pos, kind: ParseErrorKind::InvalidInteger })?;
                    it.next();
                }
                Tok::Int(v)
            }
            _ => return Err(ParseError { position: pos, kind: ParseErrorKind::InvalidInteger }),
        };
        out.push((pos, tok));
    }
    Ok(out)
}

struct Cursor {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Cursor {
    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.at).map(|t| t.1)
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(t) {
            self.at += 1;
            Ok(())
        } else {
            Err(ParseError { position: self.pos(), kind: ParseErrorKind::MalformedBrackets })
        }
    }

    /// `int ("," int)*`, possibly empty when `allow_empty`.
    fn ints(&mut self, allow_empty: bool) -> Result<Vec<u64>, ParseError> {
        let mut v = Vec::new();
        match self.peek() {
            Some(Tok::Int(x)) => {
                v.push(x);
                self.at += 1;
            }
            _ if allow_empty => return Ok(v),
            _ => return Err(ParseError { position: self.pos(), kind: ParseErrorKind::MalformedBrackets }),
        }
        while self.peek() == Some(Tok::Comma) {
            self.at += 1;
            match self.peek() {
                Some(Tok::Int(x)) => {
                    v.push(x);
                    self.at += 1;
                }
                _ => return Err(ParseError { position: self.pos(), kind: ParseErrorKind::MalformedBrackets }),
            }
        }
        Ok(v)
    }
}

/// Parses the array grammar; whitespace is ignored.
pub fn parse_array(text: &str) -> Result<ParameterArray, ParseError> {
    let mut c = Cursor { toks: tokenize(text)?, at: 0, end: text.len() };
    c.expect(Tok::Open)?;
    c.expect(Tok::Open)?;
    let ks = c.ints(false)?;
    c.expect(Tok::Close)?;
    c.expect(Tok::Comma)?;
    let group_start = c.pos();
    c.expect(Tok::Open)?;
    let mut groups = Vec::new();
    let first = c.ints(true)?;
    let empty_block = first.is_empty() && c.peek() == Some(Tok::Close);
    if !empty_block {
        groups.push(first);
        while c.peek() == Some(Tok::Semi) {
            c.at += 1;
            groups.push(c.ints(false)?);
        }
    }
    c.expect(Tok::Close)?;
    c.expect(Tok::Close)?;
    if c.at != c.toks.len() {
        return Err(ParseError { position: c.pos(), kind: ParseErrorKind::Trailing });
    }
    ParameterArray::new(ks, groups).map_err(|kind| ParseError { position: group_start, kind })
}

impl core::str::FromStr for ParameterArray {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_array(s)
    }
}

/// Valencies plus every below-diagonal `λ_{ijl}` with `1 ≤ i ≤ j < l ≤ d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullParameterSet {
    pub valencies: Vec<u64>,
    pub lambdas: BTreeMap<(usize, usize, usize), u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReconstructError {
    #[error("expected {expected} intersection numbers, found {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("constraints conflict at λ_{0:?}")]
    Inconsistent((usize, usize, usize)),
    #[error("propagation stalls with λ_{0:?} undetermined")]
    Underdetermined((usize, usize, usize)),
}

impl FullParameterSet {
    pub fn d(&self) -> usize {
        self.valencies.len()
    }

    /// `T_{d-1} + … + T_1` with `T_s = s(s+1)/2`.
    pub fn expected_count(d: usize) -> usize {
        (1..d).map(|s| s * (s + 1) / 2).sum()
    }

    /// Reads the below-diagonal entries off a full set of intersection
    /// matrices, `(B_i)_{l,j} = λ_{ijl}`.
    pub fn from_matrices(valencies: &[u64], mats: &[IntMatrix]) -> Self {
        let d = valencies.len();
        let mut lambdas = BTreeMap::new();
        for i in 1..=d {
            for j in i..=d {
                for l in j + 1..=d {
                    let v = mats[i][(l, j)].to_u64().expect("nonnegative intersection number");
                    lambdas.insert((i, j, l), v);
                }
            }
        }
        FullParameterSet { valencies: valencies.to_vec(), lambdas }
    }

    /// Every `B_0, …, B_d` by propagating boundary values, commutativity,
    /// reciprocity and row sums to a fixpoint.
    pub fn reconstruct_all(&self) -> Result<Vec<IntMatrix>, ReconstructError> {
        let d = self.d();
        let expected = Self::expected_count(d);
        if self.lambdas.len() != expected {
            return Err(ReconstructError::WrongCount { expected, found: self.lambdas.len() });
        }
        let n = d + 1;
        let k: Vec<BigRational> = (0..n)
            .map(|i| {
                let v = if i == 0 { 1 } else { self.valencies[i - 1] };
                BigRational::from_integer(BigInt::from(v))
            })
            .collect();
        let idx = |i: usize, j: usize, l: usize| (i * n + j) * n + l;
        let mut val: Vec<Option<BigRational>> = vec![None; n * n * n];

        let set = |val: &mut Vec<Option<BigRational>>,
                       t: (usize, usize, usize),
                       v: BigRational|
         -> Result<bool, ReconstructError> {
            let slot = &mut val[idx(t.0, t.1, t.2)];
            match slot {
                Some(old) if *old == v => Ok(false),
                Some(_) => Err(ReconstructError::Inconsistent(t)),
                None => {
                    if v.is_negative() || !v.is_integer() {
                        return Err(ReconstructError::Inconsistent(t));
                    }
                    *slot = Some(v);
                    Ok(true)
                }
            }
        };

        let zero = BigRational::zero();
        let one = BigRational::from_integer(BigInt::from(1));
        for i in 0..n {
            for j in 0..n {
                let kv = if i == j { k[i].clone() } else { zero.clone() };
                set(&mut val, (i, j, 0), kv)?;
                let dv = if i == j { one.clone() } else { zero.clone() };
                set(&mut val, (i, 0, j), dv.clone())?;
                set(&mut val, (0, i, j), dv)?;
            }
        }
        for (&(i, j, l), &v) in &self.lambdas {
            set(&mut val, (i, j, l), BigRational::from_integer(BigInt::from(v)))?;
        }

        loop {
            let mut changed = false;
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        let cur = val[idx(i, j, l)].clone();
                        if let Some(v) = cur {
                            changed |= set(&mut val, (j, i, l), v.clone())?;
                            let w = &v * &k[l] / &k[j];
                            changed |= set(&mut val, (i, l, j), w)?;
                        }
                    }
                }
            }
            for i in 0..n {
                for l in 0..n {
                    let mut missing = None;
                    let mut count = 0;
                    let mut sum = BigRational::zero();
                    for j in 0..n {
                        match &val[idx(i, j, l)] {
                            Some(v) => sum += v,
                            None => {
                                missing = Some(j);
                                count += 1;
                            }
                        }
                    }
                    match (count, missing) {
                        (0, _) if sum != k[i] => return Err(ReconstructError::Inconsistent((i, 0, l))),
                        (1, Some(j)) => {
                            changed |= set(&mut val, (i, j, l), &k[i] - &sum)?;
                        }
                        _ => {}
                    }
                }
            }
            if !changed {
                break;
            }
        }

        let mut mats = Vec::with_capacity(n);
        for i in 0..n {
            let mut m = IntMatrix::zeros(n, n);
            for l in 0..n {
                for j in 0..n {
                    match &val[idx(i, j, l)] {
                        Some(v) => m[(l, j)] = v.to_integer(),
                        None => return Err(ReconstructError::Underdetermined((i, j, l))),
                    }
                }
            }
            mats.push(m);
        }
        Ok(mats)
    }
}
