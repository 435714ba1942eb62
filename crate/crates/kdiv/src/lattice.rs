//! Integer bilinear forms on a named basis.
//!
//! An [`IntersectionLattice`] is the tracked fragment of H² of a 4-manifold.
//! Its Gram matrix is stored block-diagonally: direct sums append blocks and
//! pairings only touch the blocks a vector is supported on. Generalized knot
//! surgery appends thousands of identical 2×2 blocks, which is why the
//! storage is not one dense square.

use std::collections::BTreeSet;

use crate::arith;
use crate::error::{Error, Result};

/// Integer coefficients over the basis of some lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassVector {
    coeffs: Vec<i64>,
}

impl ClassVector {
    pub fn new(coeffs: Vec<i64>) -> Self {
        Self { coeffs }
    }

    pub fn zeros(len: usize) -> Self {
        Self { coeffs: vec![0; len] }
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut coeffs = vec![0; len];
        coeffs[index] = 1;
        Self { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn get(&self, index: usize) -> i64 {
        self.coeffs[index]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len() == other.len() {
            Ok(())
        } else {
            Err(Error::BasisMismatch { expected: self.len(), got: other.len() })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| arith::add(a, b))
            .collect::<Result<_>>()?;
        Ok(Self { coeffs })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.checked_scale(-1)?)
    }

    pub fn checked_scale(&self, k: i64) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|&a| arith::mul(a, k)).collect::<Result<_>>()?;
        Ok(Self { coeffs })
    }

    /// `self + k·other`.
    pub fn add_multiple(&self, k: i64, other: &Self) -> Result<Self> {
        self.checked_add(&other.checked_scale(k)?)
    }

    /// Pads with zero coefficients for basis elements appended to the lattice.
    pub fn extended(&self, extra: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(self.coeffs.len() + extra, 0);
        Self { coeffs }
    }

    /// Plain dot product with a pairing vector (no Gram matrix involved).
    pub fn dot(&self, pairings: &[i64]) -> Result<i64> {
        if pairings.len() != self.len() {
            return Err(Error::BasisMismatch { expected: self.len(), got: pairings.len() });
        }
        let mut acc = 0i64;
        for (&c, &p) in self.coeffs.iter().zip(pairings) {
            if c != 0 && p != 0 {
                acc = arith::add(acc, arith::mul(c, p)?)?;
            }
        }
        Ok(acc)
    }
}

/// gcd of the absolute coefficients; 0 exactly for the zero vector.
pub fn coefficient_gcd(v: &ClassVector) -> u64 {
    v.coeffs.iter().fold(0u64, |g, &c| num_integer::gcd(g, c.unsigned_abs()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Block {
    start: usize,
    size: usize,
    gram: Vec<i64>,
}

impl Block {
    fn at(&self, i: usize, j: usize) -> i64 {
        self.gram[i * self.size + j]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionLattice {
    names: Vec<String>,
    blocks: Vec<Block>,
    primitive_summand: bool,
}

fn check_square_symmetric(gram: &[Vec<i64>], n: usize) -> Result<()> {
    if gram.len() != n || gram.iter().any(|row| row.len() != n) {
        return Err(Error::MalformedGram);
    }
    for (i, row) in gram.iter().enumerate() {
        if row[..i].iter().enumerate().any(|(j, &v)| v != gram[j][i]) {
            return Err(Error::MalformedGram);
        }
    }
    Ok(())
}

fn check_distinct(names: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(Error::NameCollision(n.clone()));
        }
    }
    Ok(())
}

impl IntersectionLattice {
    pub fn empty() -> Self {
        Self { names: Vec::new(), blocks: Vec::new(), primitive_summand: true }
    }

    /// A lattice with a single dense block.
    pub fn new<S: Into<String>>(
        names: Vec<S>,
        gram: Vec<Vec<i64>>,
        primitive_summand: bool,
    ) -> Result<Self> {
        let mut lat = Self::empty();
        lat.primitive_summand = primitive_summand;
        lat.push_block(names.into_iter().map(Into::into).collect(), gram)?;
        Ok(lat)
    }

    /// Appends a block orthogonal to everything already present.
    pub fn push_block(&mut self, names: Vec<String>, gram: Vec<Vec<i64>>) -> Result<()> {
        let size = names.len();
        check_square_symmetric(&gram, size)?;
        if size == 0 {
            return Ok(());
        }
        let start = self.names.len();
        self.names.extend(names);
        if let Err(e) = check_distinct(&self.names) {
            self.names.truncate(start);
            return Err(e);
        }
        let flat = gram.into_iter().flatten().collect();
        self.blocks.push(Block { start, size, gram: flat });
        Ok(())
    }

    /// Appends `count` copies of a 2×2 block, naming basis elements with
    /// `name(j, 0)` and `name(j, 1)` for `j = 1..=count`.
    pub fn push_repeated_2x2(
        &mut self,
        count: usize,
        gram: [[i64; 2]; 2],
        name: impl Fn(usize, usize) -> String,
    ) -> Result<()> {
        if gram[0][1] != gram[1][0] {
            return Err(Error::MalformedGram);
        }
        let start = self.names.len();
        for j in 1..=count {
            self.names.push(name(j, 0));
            self.names.push(name(j, 1));
        }
        if let Err(e) = check_distinct(&self.names) {
            self.names.truncate(start);
            return Err(e);
        }
        let flat = vec![gram[0][0], gram[0][1], gram[1][0], gram[1][1]];
        for j in 0..count {
            self.blocks.push(Block { start: start + 2 * j, size: 2, gram: flat.clone() });
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_primitive_summand(&self) -> bool {
        self.primitive_summand
    }

    pub fn with_primitive_summand(mut self, flag: bool) -> Self {
        self.primitive_summand = flag;
        self
    }

    fn block_index(&self, i: usize) -> usize {
        // Blocks are sorted by start and tile 0..rank.
        match self.blocks.binary_search_by(|b| b.start.cmp(&i)) {
            Ok(k) => k,
            Err(k) => k - 1,
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        let b = &self.blocks[self.block_index(i)];
        if j < b.start || j >= b.start + b.size {
            0
        } else {
            b.at(i - b.start, j - b.start)
        }
    }

    /// The full Gram matrix, materialized densely.
    pub fn gram(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        let mut g = vec![vec![0; n]; n];
        for b in &self.blocks {
            for i in 0..b.size {
                for j in 0..b.size {
                    g[b.start + i][b.start + j] = b.at(i, j);
                }
            }
        }
        g
    }

    fn check(&self, v: &ClassVector) -> Result<()> {
        if v.len() == self.rank() {
            Ok(())
        } else {
            Err(Error::BasisMismatch { expected: self.rank(), got: v.len() })
        }
    }

    /// `Gram · v`, i.e. the pairings of `v` with every basis element.
    pub fn pairing_vector(&self, v: &ClassVector) -> Result<Vec<i64>> {
        self.check(v)?;
        let mut out = vec![0i64; self.rank()];
        for b in &self.blocks {
            let part = &v.coeffs[b.start..b.start + b.size];
            if part.iter().all(|&c| c == 0) {
                continue;
            }
            for i in 0..b.size {
                let mut acc = 0i64;
                for (j, &c) in part.iter().enumerate() {
                    let g = b.at(i, j);
                    if c != 0 && g != 0 {
                        acc = arith::add(acc, arith::mul(g, c)?)?;
                    }
                }
                out[b.start + i] = acc;
            }
        }
        Ok(out)
    }

    /// The symmetric bilinear value `vᵀ · Gram · w`.
    pub fn pairing(&self, v: &ClassVector, w: &ClassVector) -> Result<i64> {
        self.check(w)?;
        let gv = self.pairing_vector(v)?;
        w.dot(&gv)
    }

    pub fn square(&self, v: &ClassVector) -> Result<i64> {
        self.pairing(v, v)
    }

    /// Block-diagonal sum; the basis of `other` is renamed with `prefix`.
    /// The result is a primitive summand when both inputs are.
    pub fn direct_sum(&self, other: &Self, prefix: &str) -> Result<Self> {
        let mut out = self.clone();
        let offset = self.rank();
        out.names.extend(other.names.iter().map(|n| format!("{prefix}{n}")));
        check_distinct(&out.names)?;
        out.blocks.extend(other.blocks.iter().map(|b| Block {
            start: b.start + offset,
            size: b.size,
            gram: b.gram.clone(),
        }));
        out.primitive_summand = self.primitive_summand && other.primitive_summand;
        Ok(out)
    }

    /// Scales every Gram entry by `k` (pullback under a degree-`k` map).
    pub fn scaled(&self, k: i64) -> Result<Self> {
        let mut out = self.clone();
        for b in &mut out.blocks {
            for g in &mut b.gram {
                *g = arith::mul(*g, k)?;
            }
        }
        Ok(out)
    }

    /// Indices of blocks on which any of the vectors has a nonzero coefficient.
    pub(crate) fn support_blocks(&self, vs: &[&ClassVector]) -> Vec<usize> {
        let mut out = Vec::new();
        for (k, b) in self.blocks.iter().enumerate() {
            let touched = vs
                .iter()
                .any(|v| v.coeffs[b.start..b.start + b.size].iter().any(|&c| c != 0));
            if touched {
                out.push(k);
            }
        }
        out
    }

    /// Basis indices covered by the given blocks, in increasing order.
    pub(crate) fn block_members(&self, blocks: &[usize]) -> Vec<usize> {
        let mut idx: Vec<usize> =
            blocks.iter().flat_map(|&k| self.blocks[k].start..self.blocks[k].start + self.blocks[k].size).collect();
        idx.sort_unstable();
        idx
    }

    /// Rebuilds a lattice from named pieces: kept blocks of `self` (with
    /// their basis renamed through `rename`) followed by new dense blocks.
    pub(crate) fn rebuild(
        &self,
        keep: &[usize],
        rename: &dyn Fn(&str) -> String,
        extra: Vec<(Vec<String>, Vec<Vec<i64>>)>,
        primitive_summand: bool,
    ) -> Result<Self> {
        let mut out = Self::empty();
        out.primitive_summand = primitive_summand;
        for &k in keep {
            let b = &self.blocks[k];
            let start = out.names.len();
            out.names.extend(self.names[b.start..b.start + b.size].iter().map(|n| rename(n)));
            out.blocks.push(Block { start, size: b.size, gram: b.gram.clone() });
        }
        check_distinct(&out.names)?;
        for (names, gram) in extra {
            out.push_block(names, gram)?;
        }
        Ok(out)
    }

    /// Basis-index ranges of all kept blocks, in the order `rebuild` lays them out.
    pub(crate) fn block_range(&self, k: usize) -> std::ops::Range<usize> {
        let b = &self.blocks[k];
        b.start..b.start + b.size
    }

    pub(crate) fn block_count(&self) -> usize {
        self.blocks.len()
    }
}

/// Maximum list length accepted by [`q_set`]; the enumeration is exponential.
pub const Q_SET_MAX_DIVISORS: usize = 21;

/// Validates a divisor list `d_0..d_N` and applies the doubling rule used
/// when `4 | d`. Returns the list whose subset gcds form the Q-set.
pub fn q_set_generators(d: u64, divisors: &[u64]) -> Result<Vec<u64>> {
    let bad = |m: String| Err(Error::InvalidDivisorList(m));
    if d == 0 {
        return bad("d must be positive".into());
    }
    if divisors.is_empty() || divisors[0] != d {
        return bad(format!("the list must start with d_0 = d = {d}"));
    }
    if divisors.len() > Q_SET_MAX_DIVISORS {
        return bad(format!("at most {Q_SET_MAX_DIVISORS} divisors are supported"));
    }
    for &di in divisors {
        if di == 0 || !d.is_multiple_of(di) {
            return bad(format!("{di} does not divide {d}"));
        }
        if d.is_multiple_of(2) && di % 2 != 0 {
            return bad(format!("{di} is odd but d = {d} is even"));
        }
    }
    if d.is_multiple_of(4) {
        Ok(divisors.iter().map(|&di| if di % 4 == 0 { di } else { 2 * di }).collect())
    } else {
        Ok(divisors.to_vec())
    }
}

/// The set of gcds of all non-empty subsets of the (adjusted) divisor list.
///
/// Subset gcds are accumulated incrementally: the gcds of subsets of the
/// first `i+1` elements are those of the first `i`, plus `d_i`, plus
/// `gcd(d_i, g)` for every earlier `g`.
pub fn q_set(d: u64, divisors: &[u64]) -> Result<BTreeSet<u64>> {
    let gens = q_set_generators(d, divisors)?;
    let mut acc = BTreeSet::new();
    for &x in &gens {
        let next: Vec<u64> = acc.iter().map(|&g| num_integer::gcd(g, x)).collect();
        acc.extend(next);
        acc.insert(x);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyperbolic() -> IntersectionLattice {
        IntersectionLattice::new(vec!["a", "b"], vec![vec![0, 1], vec![1, 0]], true).unwrap()
    }

    #[test]
    fn hyperbolic_pairing() {
        let h = hyperbolic();
        let v = ClassVector::new(vec![1, 0]);
        let w = ClassVector::new(vec![0, 1]);
        assert_eq!(h.pairing(&v, &w), Ok(1));
        assert_eq!(h.pairing(&v, &ClassVector::zeros(2)), Ok(0));
    }

    #[test]
    fn singular_cover_square() {
        let lat =
            IntersectionLattice::new(vec!["F1", "F2"], vec![vec![0, 2], vec![2, 0]], true).unwrap();
        let k = ClassVector::new(vec![2, 2]);
        assert_eq!(lat.square(&k), Ok(16));
    }

    #[test]
    fn mismatched_lengths() {
        let h = hyperbolic();
        let err = h.pairing(&ClassVector::zeros(3), &ClassVector::zeros(2)).unwrap_err();
        assert!(matches!(err, Error::BasisMismatch { .. }));
    }

    #[test]
    fn direct_sums() {
        let h = hyperbolic();
        let hh = h.direct_sum(&h, "x.").unwrap();
        assert_eq!(hh.rank(), 4);
        assert_eq!(
            hh.gram(),
            vec![vec![0, 1, 0, 0], vec![1, 0, 0, 0], vec![0, 0, 0, 1], vec![0, 0, 1, 0]]
        );
        assert_eq!(h.direct_sum(&IntersectionLattice::empty(), ""), Ok(h.clone()));
        assert_eq!(h.direct_sum(&h, ""), Err(Error::NameCollision("a".into())));
    }

    #[test]
    fn y21_block_form() {
        let mut lat = IntersectionLattice::empty();
        lat.push_repeated_2x2(2, [[2, 1], [1, 0]], |j, s| format!("v{j}.{s}")).unwrap();
        lat.push_block(vec!["S".into(), "F".into()], vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(lat.rank(), 6);
        assert_eq!(lat.entry(0, 0), 2);
        assert_eq!(lat.entry(2, 3), 1);
        assert_eq!(lat.entry(1, 2), 0);
    }

    #[test]
    fn malformed_gram() {
        assert_eq!(
            IntersectionLattice::new(vec!["a", "b"], vec![vec![0, 1], vec![2, 0]], true),
            Err(Error::MalformedGram)
        );
        assert_eq!(
            IntersectionLattice::new(vec!["a", "a"], vec![vec![0, 1], vec![1, 0]], true),
            Err(Error::NameCollision("a".into()))
        );
    }

    #[test]
    fn gcds() {
        assert_eq!(coefficient_gcd(&ClassVector::new(vec![9, 6])), 3);
        assert_eq!(coefficient_gcd(&ClassVector::new(vec![0, 0])), 0);
        assert_eq!(coefficient_gcd(&ClassVector::new(vec![-4, 0, 6])), 2);
    }

    #[test]
    fn q_sets() {
        let q = q_set(45, &[45, 15, 9, 5]).unwrap();
        assert_eq!(q.into_iter().rev().collect::<Vec<_>>(), vec![45, 15, 9, 5, 3, 1]);
        assert_eq!(q_set(6, &[6, 2]).unwrap().into_iter().collect::<Vec<_>>(), vec![2, 6]);
        assert_eq!(q_set(7, &[7]).unwrap().into_iter().collect::<Vec<_>>(), vec![7]);
        assert!(q_set(6, &[6, 3]).is_err());
        assert!(q_set(6, &[6, 4]).is_err());
        assert!(q_set(6, &[3]).is_err());
    }

    #[test]
    fn q_set_doubling() {
        // d = 8, d_1 = 2 is not divisible by 4 and is doubled to 4.
        assert_eq!(q_set(8, &[8, 2]).unwrap().into_iter().collect::<Vec<_>>(), vec![4, 8]);
    }
}
