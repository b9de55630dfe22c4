//! Set partitions of `[1, k]`, Bell numbers, and the partition that each index of a
//! permutation vector corresponds to.
//!
//! Partitions are stored as restricted growth strings (RGS): `rgs[l]` is the block label
//! of element `l + 1`, labels appearing in first-occurrence order. The canonical order
//! sorts by number of blocks, most first, then by RGS ascending; for `k = 3` it is
//!
//! ```text
//! P1 {1}{2}{3}   P2 {1,2}{3}   P3 {1,3}{2}   P4 {1}{2,3}   P5 {1,2,3}
//! ```

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;

pub const MAX_K: usize = 12;

const BELL: [usize; MAX_K + 1] = [
    1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975, 678570, 4213597,
];

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    rgs: Vec<u8>,
}

impl SetPartition {
    pub fn from_rgs(rgs: Vec<u8>) -> Result<Self> {
        if rgs.is_empty() || rgs.len() > MAX_K {
            return Err(Error::PartitionSizeOutOfRange(rgs.len()));
        }
        let mut max = 0u8;
        for (i, &r) in rgs.iter().enumerate() {
            let limit = if i == 0 { 0 } else { max + 1 };
            if r > limit {
                return Err(Error::InvalidPartition(format!(
                    "{rgs:?} is not a restricted growth string"
                )));
            }
            max = max.max(r);
        }
        Ok(SetPartition { rgs })
    }

    /// From 1-indexed blocks covering `[1, k]` exactly once.
    pub fn from_blocks(blocks: &[Vec<usize>]) -> Result<Self> {
        let k: usize = blocks.iter().map(Vec::len).sum();
        if k == 0 || k > MAX_K {
            return Err(Error::PartitionSizeOutOfRange(k));
        }
        let mut label = vec![usize::MAX; k];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &e in block {
                if e == 0 || e > k {
                    return Err(Error::InvalidPartition(format!(
                        "element {e} outside [1,{k}]"
                    )));
                }
                if label[e - 1] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("element {e} repeated")));
                }
                label[e - 1] = b;
            }
        }
        Ok(SetPartition {
            rgs: canonical_labels(&label),
        })
    }

    pub fn k(&self) -> usize {
        self.rgs.len()
    }

    pub fn rgs(&self) -> &[u8] {
        &self.rgs
    }

    pub fn num_blocks(&self) -> usize {
        self.rgs.iter().copied().max().map_or(0, |m| m as usize + 1)
    }

    /// Blocks as ascending 1-indexed sets, ordered by smallest element.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (l, &b) in self.rgs.iter().enumerate() {
            blocks[b as usize].push(l + 1);
        }
        blocks
    }

    pub fn same_block(&self, l: usize, l2: usize) -> bool {
        self.rgs[l - 1] == self.rgs[l2 - 1]
    }
}

/// Relabels arbitrary labels in first-occurrence order.
fn canonical_labels<T: PartialEq + Copy>(labels: &[T]) -> Vec<u8> {
    let mut seen: Vec<T> = Vec::with_capacity(labels.len());
    labels
        .iter()
        .map(|x| match seen.iter().position(|s| s == x) {
            Some(p) => p as u8,
            None => {
                seen.push(*x);
                (seen.len() - 1) as u8
            }
        })
        .collect()
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for block in self.blocks() {
            let items: Vec<String> = block.iter().map(usize::to_string).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for SetPartition {
    type Err = Error;

    /// Parses `"{1,2}{3}"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('{')
                .ok_or_else(|| Error::parse(rest, "expected `{`"))?;
            let close = body
                .find('}')
                .ok_or_else(|| Error::parse(rest, "unterminated block"))?;
            let block = body[..close]
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::parse(t, "expected a positive integer"))
                })
                .collect::<Result<Vec<_>>>()?;
            blocks.push(block);
            rest = body[close + 1..].trim_start();
        }
        SetPartition::from_blocks(&blocks)
    }
}

pub fn bell_number(k: usize) -> BigUint {
    // Bell triangle: each row starts with the previous row's last entry.
    let mut row = vec![BigUint::one()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().unwrap().clone());
        for x in &row {
            let v = next.last().unwrap() + x;
            next.push(v);
        }
        row = next;
    }
    row.swap_remove(0)
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > MAX_K {
        return Err(Error::PartitionSizeOutOfRange(k));
    }
    Ok(())
}

/// Bell number as a machine integer, for `1 <= k <= 12`.
pub fn bell_small(k: usize) -> Result<usize> {
    check_k(k)?;
    Ok(BELL[k])
}

/// All partitions of `[1, k]` in canonical order.
pub fn enumerate_partitions(k: usize) -> Result<Vec<SetPartition>> {
    check_k(k)?;
    let mut by_blocks: Vec<Vec<SetPartition>> = vec![Vec::new(); k + 1];
    let mut rgs = vec![0u8; k];
    fn rec(i: usize, max: u8, rgs: &mut Vec<u8>, out: &mut Vec<Vec<SetPartition>>) {
        if i == rgs.len() {
            out[max as usize + 1].push(SetPartition { rgs: rgs.clone() });
            return;
        }
        for v in 0..=max + 1 {
            rgs[i] = v;
            rec(i + 1, max.max(v), rgs, out);
        }
    }
    if k == 1 {
        by_blocks[1].push(SetPartition { rgs });
    } else {
        rec(1, 0, &mut rgs, &mut by_blocks);
    }
    Ok(by_blocks.into_iter().rev().flatten().collect())
}

/// Ranks restricted growth strings of a fixed length in canonical order without
/// materialising the partition list.
#[derive(Debug, Clone)]
pub struct PartitionIndex {
    k: usize,
    // completions[r][c][b]: ways to label r more elements, starting from c blocks, ending with b.
    completions: Vec<Vec<Vec<u64>>>,
    // offset[b]: number of partitions with more than b blocks.
    offset: Vec<u64>,
}

impl PartitionIndex {
    pub fn new(k: usize) -> Result<Self> {
        check_k(k)?;
        let mut w = vec![vec![vec![0u64; k + 2]; k + 2]; k];
        for c in 0..=k + 1 {
            if c <= k {
                w[0][c][c] = 1;
            }
        }
        for r in 1..k {
            for c in 0..=k {
                for b in 0..=k {
                    let stay = c as u64 * w[r - 1][c][b];
                    let grow = if c < k { w[r - 1][c + 1][b] } else { 0 };
                    w[r][c][b] = stay + grow;
                }
            }
        }
        // Stirling numbers of the second kind S(k, b) = completions from one block.
        let mut offset = vec![0u64; k + 2];
        for b in (1..=k).rev() {
            offset[b] = offset[b + 1] + w[k - 1][1][b + 1];
        }
        Ok(PartitionIndex {
            k,
            completions: w,
            offset,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        BELL[self.k]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// 0-based canonical slot of a restricted growth string of length `k`.
    pub fn rank(&self, rgs: &[u8]) -> usize {
        debug_assert_eq!(rgs.len(), self.k);
        let b = rgs.iter().copied().max().unwrap_or(0) as usize + 1;
        let mut rank = self.offset[b];
        let mut max = 0usize;
        for (i, &r) in rgs.iter().enumerate().skip(1) {
            let remaining = self.k - i - 1;
            for v in 0..r as usize {
                let blocks = max.max(v) + 1;
                rank += self.completions[remaining][blocks][b];
            }
            max = max.max(r as usize);
        }
        rank as usize
    }

    pub fn rank_of(&self, p: &SetPartition) -> usize {
        self.rank(p.rgs())
    }

    /// Canonical slot of the partition induced by equality of `values`.
    pub fn rank_of_labels(&self, values: &[usize]) -> usize {
        self.rank(&canonical_labels(values))
    }
}

/// `k` permutations on a common `[1, n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationVector {
    perms: Vec<Permutation>,
}

impl PermutationVector {
    pub fn new(perms: Vec<Permutation>) -> Result<Self> {
        let first = perms
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty permutation vector".into()))?;
        let n = first.len();
        if let Some(p) = perms.iter().find(|p| p.len() != n) {
            return Err(Error::SizeMismatch {
                expected: n,
                found: p.len(),
            });
        }
        Ok(PermutationVector { perms })
    }

    /// `(identity, q)`.
    pub fn pair(q: Permutation) -> Self {
        let id = Permutation::identity(q.len()).expect("permutations are non-empty");
        PermutationVector { perms: vec![id, q] }
    }

    pub fn k(&self) -> usize {
        self.perms.len()
    }

    pub fn n(&self) -> usize {
        self.perms[0].len()
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn inverses(&self) -> Vec<Permutation> {
        self.perms.iter().map(Permutation::inverse).collect()
    }
}

/// Number of indices corresponding to each canonical partition slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BellSignature {
    k: usize,
    counts: Vec<usize>,
}

impl BellSignature {
    pub fn new(k: usize, counts: Vec<usize>) -> Result<Self> {
        let b = bell_small(k)?;
        if counts.len() != b {
            return Err(Error::InvalidSignature(format!(
                "k={k} needs {b} counts, got {}",
                counts.len()
            )));
        }
        if counts.iter().sum::<usize>() == 0 {
            return Err(Error::InvalidSignature("counts must sum to n >= 1".into()));
        }
        Ok(BellSignature { k, counts })
    }

    /// Parses `"2,1,0,3,1"`, inferring `k` from the number of entries when not given.
    pub fn parse(s: &str, k: Option<usize>) -> Result<Self> {
        let counts = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::parse(t, "expected a non-negative integer"))
            })
            .collect::<Result<Vec<_>>>()?;
        let k = match k {
            Some(k) => k,
            None => (1..=MAX_K).find(|&k| BELL[k] == counts.len()).ok_or_else(|| {
                Error::parse(s, format!("{} entries is not a Bell number", counts.len()))
            })?,
        };
        BellSignature::new(k, counts)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// The `k = 2` signature of a permutation with `m` fixed points on `[1, n]`.
    pub fn pair(n: usize, m: usize) -> Result<Self> {
        if m > n {
            return Err(Error::InvalidSignature(format!("m={m} exceeds n={n}")));
        }
        BellSignature::new(2, vec![n - m, m])
    }
}

impl fmt::Display for BellSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.counts.iter().map(usize::to_string).collect();
        write!(f, "{}", s.join(","))
    }
}

/// 1-indexed slot `j` of the partition that index `i` corresponds to: `l` and `l'` share
/// a block iff `π_l^{-1}(i) = π_{l'}^{-1}(i)`.
pub fn index_correspondence(pv: &PermutationVector, i: usize) -> Result<usize> {
    if i == 0 || i > pv.n() {
        return Err(Error::InvalidArgument(format!(
            "index {i} outside [1,{}]",
            pv.n()
        )));
    }
    let index = PartitionIndex::new(pv.k())?;
    let pre: Vec<usize> = pv.perms().iter().map(|p| p.inverse().at(i)).collect();
    Ok(index.rank_of_labels(&pre) + 1)
}

pub fn bell_signature(pv: &PermutationVector) -> Result<BellSignature> {
    let index = PartitionIndex::new(pv.k())?;
    Ok(bell_signature_with(&index, &pv.inverses()))
}

/// Signature from precomputed inverses; hot path for enumeration oracles.
pub(crate) fn bell_signature_with(index: &PartitionIndex, inverses: &[Permutation]) -> BellSignature {
    let n = inverses[0].len();
    let mut counts = vec![0usize; index.len()];
    let mut labels = vec![0usize; inverses.len()];
    for i in 0..n {
        for (l, inv) in inverses.iter().enumerate() {
            labels[l] = inv.raw_image()[i];
        }
        counts[index.rank_of_labels(&labels)] += 1;
    }
    BellSignature {
        k: index.k(),
        counts,
    }
}

/// `π_1` is the identity and no two permutations agree at any index.
pub fn is_kfold_derangement(pv: &PermutationVector) -> bool {
    if !pv.perms()[0].is_identity() {
        return false;
    }
    (0..pv.n()).all(|i| {
        let vals: Vec<usize> = pv.perms().iter().map(|p| p.raw_image()[i]).collect();
        vals.iter()
            .enumerate()
            .all(|(a, x)| vals[a + 1..].iter().all(|y| y != x))
    })
}
