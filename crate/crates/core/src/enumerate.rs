//! Enumeration of candidate parameter arrays.
//!
//! A shard fixes the valencies. Within a shard the lambdas are assigned
//! column group by column group of `B_1`, keeping every partial row sum at
//! most `k_1` and every reciprocal entry `λ_1jl·k_l/k_j` integral. Only the
//! two normalisations `λ_112 > 0` and `k_3 ≤ … ≤ k_d` are imposed.

use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;

use crate::array::ParameterArray;

/// One valency tuple `(k_1, …, k_d)` with its order `n = 1 + Σ k_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SearchShard {
    pub order: u64,
    pub valencies: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    pub rank: usize,
    pub min_order: u64,
    pub max_order: u64,
    pub max_valency: u64,
}

impl SearchBounds {
    pub fn d(&self) -> usize {
        self.rank - 1
    }

    pub fn orders(&self) -> core::ops::RangeInclusive<u64> {
        self.min_order.max(self.rank as u64)..=self.max_order
    }
}

/// Valency tuples in order of `n`, then lexicographically.
pub fn enumerate_valencies(b: SearchBounds) -> impl Iterator<Item = SearchShard> {
    let d = b.d();
    b.orders().flat_map(move |n| Compositions::new(d, n - 1, b.max_valency).map(move |v| SearchShard { order: n, valencies: v }))
}

/// Number of shards `enumerate_valencies` yields.
pub fn count_valencies(b: SearchBounds) -> u64 {
    let d = b.d();
    b.orders()
        .map(|n| {
            let total = n - 1;
            let mut count = 0u64;
            for k1 in 1..=b.max_valency.min(total) {
                if d == 1 {
                    count += u64::from(k1 == total);
                    continue;
                }
                for k2 in 1..=total - k1 {
                    count += count_nondecreasing(d - 2, total - k1 - k2, 1);
                }
            }
            count
        })
        .sum()
}

/// Tuples of `len` nondecreasing integers `≥ min` summing to `sum`.
fn count_nondecreasing(len: usize, sum: u64, min: u64) -> u64 {
    if len == 0 {
        return u64::from(sum == 0);
    }
    if len == 1 {
        return u64::from(sum >= min);
    }
    let mut c = 0;
    let mut v = min;
    while v * len as u64 <= sum {
        c += count_nondecreasing(len - 1, sum - v, v);
        v += 1;
    }
    c
}

/// Lexicographic enumeration of `(k_1, …, k_d)` with `k_1 ≤ bound`,
/// `Σ k_i = total` and `k_3 ≤ … ≤ k_d`.
struct Compositions {
    d: usize,
    total: u64,
    bound: u64,
    cur: Option<Vec<u64>>,
    started: bool,
}

impl Compositions {
    fn new(d: usize, total: u64, bound: u64) -> Self {
        Compositions { d, total, bound, cur: None, started: false }
    }

    fn lo(v: &[u64], i: usize) -> u64 {
        if i >= 3 {
            v[i - 1]
        } else {
            1
        }
    }

    /// Overwrites `v[from..]` with the least completion, if one exists.
    fn fill(&self, v: &mut [u64], from: usize) -> bool {
        let used: u64 = v[..from].iter().sum();
        if used >= self.total || v[0] > self.bound {
            return false;
        }
        let mut rem = self.total - used;
        for i in from..self.d - 1 {
            let m = Self::lo(v, i);
            if rem < m {
                return false;
            }
            v[i] = m;
            rem -= m;
        }
        let last = self.d - 1;
        v[last] = rem;
        rem >= Self::lo(v, last)
    }

    fn advance(&self, v: &mut [u64]) -> bool {
        for i in (0..self.d.saturating_sub(1)).rev() {
            let mut w = v.to_vec();
            w[i] += 1;
            if self.fill(&mut w, i + 1) {
                v.copy_from_slice(&w);
                return true;
            }
        }
        false
    }
}

impl Iterator for Compositions {
    type Item = Vec<u64>;
    fn next(&mut self) -> Option<Vec<u64>> {
        if !self.started {
            self.started = true;
            if self.d == 0 || self.bound == 0 || self.total < self.d as u64 {
                return None;
            }
            if self.d == 1 {
                return (self.total <= self.bound).then(|| vec![self.total]);
            }
            let mut v = vec![1u64; self.d];
            if self.fill(&mut v, 1) || self.advance(&mut v) {
                self.cur = Some(v.clone());
                return Some(v);
            }
            return None;
        }
        let mut v = self.cur.take()?;
        if self.advance(&mut v) {
            self.cur = Some(v.clone());
            Some(v)
        } else {
            None
        }
    }
}

struct Walk<'a, F: FnMut(ParameterArray)> {
    d: usize,
    k: Vec<i64>,
    b: Vec<Vec<i64>>,
    row: Vec<i64>,
    positions: Vec<(usize, usize)>,
    valencies: &'a [u64],
    visit: F,
}

impl<F: FnMut(ParameterArray)> Walk<'_, F> {
    fn go(&mut self, at: usize) {
        let k1 = self.k[1];
        if at == self.positions.len() {
            self.finish();
            return;
        }
        let (j, l) = self.positions[at];
        let (kj, kl) = (self.k[j], self.k[l]);
        let step = kj / kj.gcd(&kl);
        let cap_below = k1 - self.row[l];
        // λ·k_l/k_j added to row j
        let cap_above = (k1 - self.row[j]) * kj / kl;
        let cap = cap_below.min(cap_above);
        let start = if (j, l) == (1, 2) { step } else { 0 };
        let mut lam = start;
        while lam <= cap {
            let above = lam * kl / kj;
            self.b[l][j] = lam;
            self.b[j][l] = above;
            self.row[l] += lam;
            self.row[j] += above;
            // row j is complete once its group is done
            let row_done = l == self.d;
            if !row_done || self.row[j] <= k1 {
                self.go(at + 1);
            }
            self.row[l] -= lam;
            self.row[j] -= above;
            lam += step;
        }
        self.b[l][j] = 0;
        self.b[j][l] = 0;
    }

    fn finish(&mut self) {
        let d = self.d;
        let k1 = self.k[1];
        let mut b = self.b.clone();
        for r in 1..=d {
            if self.row[r] > k1 {
                return;
            }
            b[r][r] = k1 - self.row[r];
        }
        if !connected(&b) {
            return;
        }
        debug_assert!((0..=d).all(|j| (0..=d).map(|l| b[l][j] * self.k[l]).sum::<i64>() == k1 * self.k[j]));
        (self.visit)(ParameterArray::from_b1(&b, self.valencies));
    }
}

/// Whether the graph with `i ~ j` for `B[i][j] > 0` is connected.
pub fn connected(b: &[Vec<i64>]) -> bool {
    let n = b.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if !seen[j] && b[i][j] > 0 {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Every array in a shard passing the incremental prunes, in DFS order.
pub fn enumerate_arrays(shard: &SearchShard, visit: impl FnMut(ParameterArray)) {
    let d = shard.valencies.len();
    let k: Vec<i64> = core::iter::once(1).chain(shard.valencies.iter().map(|&v| v as i64)).collect();
    let mut b = vec![vec![0i64; d + 1]; d + 1];
    b[0][1] = k[1];
    b[1][0] = 1;
    let mut row = vec![0i64; d + 1];
    row[1] = 1;
    let positions = (1..d).flat_map(|j| (j + 1..=d).map(move |l| (j, l))).collect();
    let mut w = Walk { d, k, b, row, positions, valencies: &shard.valencies, visit };
    w.go(0);
}

const PRIMES: [u64; 8] = [
    2_147_483_647,
    2_147_483_629,
    2_147_483_587,
    2_147_483_579,
    2_147_483_563,
    2_147_483_549,
    2_147_483_543,
    2_147_483_497,
];
const MAX: usize = 8;

type Mat = [[u64; MAX]; MAX];

#[derive(Clone, Copy)]
struct Zp(u64);

impl Zp {
    fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.0
    }

    fn add(self, a: u64, b: u64) -> u64 {
        (a + b) % self.0
    }

    fn sub(self, a: u64, b: u64) -> u64 {
        (a + self.0 - b) % self.0
    }

    fn inv(self, a: u64) -> u64 {
        let (mut base, mut e, mut acc) = (a, self.0 - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn matmul(self, x: &Mat, y: &Mat, n: usize) -> Mat {
        let mut out = [[0u64; MAX]; MAX];
        for i in 0..n {
            for t in 0..n {
                let a = x[i][t];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out[i][j] = self.add(out[i][j], self.mul(a, y[t][j]));
                }
            }
        }
        out
    }

    /// Solves `V^T · A = diag(k)` in place; `None` when `V` is singular.
    fn solve(self, vt: &[[i128; MAX]; MAX], k: &[u64], n: usize) -> Option<Mat> {
        let mut m = [[0u64; 2 * MAX]; MAX];
        for l in 0..n {
            for i in 0..n {
                m[l][i] = vt[l][i].rem_euclid(self.0 as i128) as u64;
            }
            m[l][n + l] = k[l] % self.0;
        }
        for c in 0..n {
            let piv = (c..n).find(|&r| m[r][c] != 0)?;
            m.swap(piv, c);
            let inv = self.inv(m[c][c]);
            for v in m[c][..2 * n].iter_mut() {
                *v = self.mul(*v, inv);
            }
            for r in 0..n {
                if r != c && m[r][c] != 0 {
                    let f = m[r][c];
                    for t in 0..2 * n {
                        m[r][t] = self.sub(m[r][t], self.mul(f, m[c][t]));
                    }
                }
            }
        }
        let mut a = [[0u64; MAX]; MAX];
        for e in 0..n {
            a[e][..n].copy_from_slice(&m[e][n..2 * n]);
        }
        Some(a)
    }
}

/// Sound modular rejection test: `true` only when the array certainly fails
/// validation. Every `B_i = f_i(B_1)` of a valid array has integer entries in
/// `[0, k_i]` satisfying the structure identities, and those are read off
/// modulo a prime that does not divide the span determinant. When the
/// determinant vanishes modulo enough primes to exceed its Hadamard bound it
/// is zero.
pub fn quick_reject(a: &ParameterArray) -> bool {
    let Ok(b1) = a.b1_small() else { return true };
    let n = b1.len();
    if n > MAX {
        return false;
    }
    let k: Vec<u64> = (0..n).map(|i| a.k(i)).collect();
    // vt[l][i] = (B_1^i)_{0,l}
    let mut vt = [[0i128; MAX]; MAX];
    let mut row = [0i128; MAX];
    row[0] = 1;
    for i in 0..n {
        for l in 0..n {
            vt[l][i] = row[l];
        }
        let mut next = [0i128; MAX];
        for (r, &x) in row[..n].iter().enumerate() {
            if x != 0 {
                for c in 0..n {
                    next[c] += x * i128::from(b1[r][c]);
                }
            }
        }
        row = next;
    }
    let mut hadamard_bits = 0u32;
    for i in 0..n {
        let norm: u128 = (0..n).map(|l| (vt[l][i] * vt[l][i]) as u128).sum();
        hadamard_bits += (128 - norm.leading_zeros()) / 2 + 1;
    }
    let mut tried_bits = 0u32;
    let mut found = None;
    for &p in &PRIMES {
        let f = Zp(p);
        if let Some(sol) = f.solve(&vt, &k, n) {
            found = Some((f, sol));
            break;
        }
        tried_bits += 30;
        if tried_bits > hadamard_bits {
            return true;
        }
    }
    let Some((f, coeffs)) = found else { return false };

    let mut bm = [[0u64; MAX]; MAX];
    for r in 0..n {
        for c in 0..n {
            bm[r][c] = b1[r][c] as u64 % f.0;
        }
    }
    let mut powers = [[[0u64; MAX]; MAX]; MAX];
    for (i, row) in powers[0].iter_mut().enumerate().take(n) {
        row[i] = 1;
    }
    for e in 1..n {
        powers[e] = f.matmul(&powers[e - 1], &bm, n);
    }
    let mut basis = [[[0u64; MAX]; MAX]; MAX];
    for i in 0..n {
        for e in 0..n {
            let c = coeffs[e][i];
            if c == 0 {
                continue;
            }
            for r in 0..n {
                for s in 0..n {
                    basis[i][r][s] = f.add(basis[i][r][s], f.mul(c, powers[e][r][s]));
                }
            }
        }
        if basis[i][..n].iter().any(|r| r[..n].iter().any(|&v| v > k[i])) {
            return true;
        }
    }
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                if k[l] * basis[i][l][j] != k[i] * basis[j][i][l] || basis[i][l][j] != basis[j][l][i] {
                    return true;
                }
            }
        }
    }
    for i in 2..n {
        for j in i..n {
            let lhs = f.matmul(&basis[i], &basis[j], n);
            for r in 0..n {
                for c in 0..n {
                    let rhs = (0..n).fold(0u64, |acc, l| f.add(acc, f.mul(basis[i][l][j], basis[l][r][c])));
                    if lhs[r][c] != rhs {
                        return true;
                    }
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::parse_array;
    use crate::sita::derive_sita;

    fn bounds(rank: usize, lo: u64, hi: u64, kmax: u64) -> SearchBounds {
        SearchBounds { rank, min_order: lo, max_order: hi, max_valency: kmax }
    }

    #[test]
    fn rank_three_order_five_shards() {
        let v: Vec<Vec<u64>> = enumerate_valencies(bounds(3, 5, 5, 4)).map(|s| s.valencies).collect();
        assert_eq!(v, vec![vec![1, 3], vec![2, 2], vec![3, 1]]);
        assert_eq!(count_valencies(bounds(3, 5, 5, 4)), 3);
        assert_eq!(enumerate_valencies(bounds(3, 9, 5, 4)).count(), 0);
    }

    #[test]
    fn shards_sorted_and_counted() {
        for (rank, n, k) in [(4, 14, 6), (5, 16, 5), (6, 13, 3), (7, 14, 12)] {
            let b = bounds(rank, rank as u64, n, k);
            let all: Vec<SearchShard> = enumerate_valencies(b).collect();
            assert_eq!(all.len() as u64, count_valencies(b));
            assert!(all.windows(2).all(|w| w[0] < w[1]));
            for s in &all {
                assert_eq!(s.valencies.iter().sum::<u64>() + 1, s.order);
                assert!(s.valencies[0] <= k);
                assert!(s.valencies.get(2..).unwrap().windows(2).all(|w| w[0] <= w[1]));
            }
        }
        let has = enumerate_valencies(bounds(5, 35, 35, 30)).any(|s| s.valencies == [4, 12, 12, 6]);
        assert!(!has, "k_3 ≤ k_4 excludes the table ordering");
        assert!(enumerate_valencies(bounds(5, 35, 35, 30)).any(|s| s.valencies == [4, 12, 6, 12]));
    }

    #[test]
    fn pentagon_shard() {
        let mut out = Vec::new();
        enumerate_arrays(&SearchShard { order: 5, valencies: vec![2, 2] }, |a| out.push(a));
        assert_eq!(out, vec![parse_array("[[2,2],[1]]").unwrap()]);
    }

    #[test]
    fn prescreen_keeps_valid_arrays() {
        for s in ["[[4,12,6,12],[1,0,0;2,1;1]]", "[[2,2],[1]]", "[[5,5,1],[2,0;5]]", "[[8,16,2],[3,0;8]]", "[[9,2,12,18],[9,0,3;0,0;6]]"] {
            let a = parse_array(s).unwrap();
            assert!(derive_sita(&a).is_ok());
            assert!(!quick_reject(&a), "{s}");
        }
        assert!(quick_reject(&parse_array("[[2,2],[2]]").unwrap()));
    }
}
