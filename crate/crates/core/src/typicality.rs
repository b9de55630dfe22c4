//! Joint types and strong typicality of `k` aligned sequences.
//!
//! A tuple of sequences is ε-typical for `P` when `|N(a)/n - P(a)| <= ε` for every cell
//! `a`, including cells of probability zero. Whenever the probabilities and ε are
//! (recoverably) rational the comparison is done in exact integer arithmetic, so
//! boundary cases such as `|2/4 - 0.45| = 0.05` are decided the same way everywhere.

use std::fmt;

use crate::dist::JointDistribution;
use crate::error::{Error, Result};
use crate::partitions::PermutationVector;

/// `k × n` symbol table; row `l` is the `l`-th sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceSample {
    sizes: Vec<usize>,
    rows: Vec<Vec<usize>>,
}

impl SequenceSample {
    pub fn new(sizes: Vec<usize>, rows: Vec<Vec<usize>>) -> Result<Self> {
        if rows.len() != sizes.len() || rows.is_empty() {
            return Err(Error::InvalidSample(format!(
                "{} rows for {} alphabets",
                rows.len(),
                sizes.len()
            )));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::InvalidSample("sequences must be non-empty".into()));
        }
        for (l, (row, &size)) in rows.iter().zip(&sizes).enumerate() {
            if row.len() != n {
                return Err(Error::InvalidSample(format!(
                    "row {} has length {}, expected {n}",
                    l + 1,
                    row.len()
                )));
            }
            if let Some(i) = row.iter().position(|&s| s >= size) {
                return Err(Error::InvalidSample(format!(
                    "row {} position {} holds symbol {} outside [0,{size})",
                    l + 1,
                    i + 1,
                    row[i]
                )));
            }
        }
        Ok(SequenceSample { sizes, rows })
    }

    /// One row per line, space-separated symbol indices.
    pub fn parse(text: &str, sizes: Vec<usize>) -> Result<Self> {
        let rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|line| {
                line.split_whitespace()
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| Error::parse(t, "expected a symbol index"))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        SequenceSample::new(sizes, rows)
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    pub fn alphabet_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    /// Row `l` replaced by `apply(π_l, row_l)`.
    pub fn permuted(&self, pv: &PermutationVector) -> Result<SequenceSample> {
        if pv.k() != self.k() {
            return Err(Error::SizeMismatch {
                expected: self.k(),
                found: pv.k(),
            });
        }
        let rows = self
            .rows
            .iter()
            .zip(pv.perms())
            .map(|(row, p)| p.apply(row))
            .collect::<Result<Vec<_>>>()?;
        Ok(SequenceSample {
            sizes: self.sizes.clone(),
            rows,
        })
    }
}

impl fmt::Display for SequenceSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            let s: Vec<String> = row.iter().map(usize::to_string).collect();
            writeln!(f, "{}", s.join(" "))?;
        }
        Ok(())
    }
}

/// Cell counts `N(a | x_1, ..., x_k)`, row-major like [`JointDistribution`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointType {
    sizes: Vec<usize>,
    counts: Vec<u64>,
    n: u64,
}

impl JointType {
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn frequency(&self, cell: usize) -> f64 {
        self.counts[cell] as f64 / self.n as f64
    }
}

pub fn joint_type(s: &SequenceSample) -> JointType {
    let mut strides = vec![1usize; s.k()];
    for l in (0..s.k() - 1).rev() {
        strides[l] = strides[l + 1] * s.sizes[l + 1];
    }
    let mut counts = vec![0u64; s.sizes.iter().product()];
    for i in 0..s.n() {
        let cell: usize = s.rows.iter().zip(&strides).map(|(r, st)| r[i] * st).sum();
        counts[cell] += 1;
    }
    JointType {
        sizes: s.sizes.clone(),
        counts,
        n: s.n() as u64,
    }
}

/// Best rational approximation with denominator at most `max_den`, accepted only when
/// it reproduces `x` to within a few ulps.
pub fn recover_rational(x: f64, max_den: i128) -> Option<(i128, i128)> {
    if !x.is_finite() || x < 0.0 {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e15 {
            break;
        }
        let a = a as i128;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= 4.0 * f64::EPSILON * x.max(1.0) {
            return Some((h1, k1));
        }
        let frac = r - a as f64;
        if frac <= 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

const MAX_DENOMINATOR: i128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Target {
    Exact { num: i128, den: i128 },
    Float(f64),
}

/// The ε-typical set of a distribution, precompiled for repeated membership tests.
#[derive(Debug, Clone)]
pub struct TypicalSet {
    sizes: Vec<usize>,
    targets: Vec<Target>,
    eps: Target,
}

impl TypicalSet {
    pub fn new(d: &JointDistribution, eps: f64) -> Result<Self> {
        if !eps.is_finite() || eps < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "ε must be finite and non-negative, got {eps}"
            )));
        }
        let to_target = |x: f64| match recover_rational(x, MAX_DENOMINATOR) {
            Some((num, den)) => Target::Exact { num, den },
            None => Target::Float(x),
        };
        Ok(TypicalSet {
            sizes: d.alphabet_sizes().to_vec(),
            targets: d.probs().iter().map(|&p| to_target(p)).collect(),
            eps: to_target(eps),
        })
    }

    /// `true` when every comparison runs in integer arithmetic.
    pub fn is_exact(&self) -> bool {
        matches!(self.eps, Target::Exact { .. })
            && self.targets.iter().all(|t| matches!(t, Target::Exact { .. }))
    }

    fn cell_ok(&self, target: Target, count: u64, n: u64) -> bool {
        match (target, self.eps) {
            (Target::Exact { num: a, den: b }, Target::Exact { num: c, den: d }) => {
                // |count/n - a/b| <= c/d  <=>  |count·b - n·a|·d <= c·n·b
                let (count, n) = (count as i128, n as i128);
                (count * b - n * a).abs() * d <= c * n * b
            }
            (t, e) => {
                let p = match t {
                    Target::Exact { num, den } => num as f64 / den as f64,
                    Target::Float(p) => p,
                };
                let eps = match e {
                    Target::Exact { num, den } => num as f64 / den as f64,
                    Target::Float(e) => e,
                };
                (count as f64 / n as f64 - p).abs() <= eps
            }
        }
    }

    /// Inclusive `[lo, hi]` count window per cell for sequences of length `n`.
    /// A cell with `lo > hi` can never be satisfied.
    pub fn count_windows(&self, n: u64) -> Vec<(u64, u64)> {
        self.targets
            .iter()
            .map(|&t| {
                let ok = |c: u64| self.cell_ok(t, c, n);
                let p = match t {
                    Target::Exact { num, den } => num as f64 / den as f64,
                    Target::Float(p) => p,
                };
                let eps = match self.eps {
                    Target::Exact { num, den } => num as f64 / den as f64,
                    Target::Float(e) => e,
                };
                let nf = n as f64;
                let guess_lo = ((nf * (p - eps)).floor() - 2.0).clamp(0.0, nf) as u64;
                let guess_hi = ((nf * (p + eps)).ceil() + 2.0).clamp(0.0, nf) as u64;
                let lo = (guess_lo..=guess_hi).find(|&c| ok(c));
                match lo {
                    None => (1, 0),
                    Some(lo) => {
                        let hi = (lo..=guess_hi).rev().find(|&c| ok(c)).unwrap_or(lo);
                        (lo, hi)
                    }
                }
            })
            .collect()
    }

    pub fn contains(&self, jt: &JointType) -> Result<bool> {
        if jt.sizes != self.sizes {
            return Err(Error::InvalidSample(format!(
                "joint type shape {:?} does not match distribution shape {:?}",
                jt.sizes, self.sizes
            )));
        }
        Ok(self
            .targets
            .iter()
            .zip(&jt.counts)
            .all(|(&t, &c)| self.cell_ok(t, c, jt.n)))
    }
}

pub fn is_typical(s: &SequenceSample, d: &JointDistribution, eps: f64) -> Result<bool> {
    TypicalSet::new(d, eps)?.contains(&joint_type(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{all_permutations, Permutation};

    fn pair(x: &[usize], y: &[usize]) -> SequenceSample {
        SequenceSample::new(vec![2, 2], vec![x.to_vec(), y.to_vec()]).unwrap()
    }

    #[test]
    fn joint_type_by_hand() {
        let jt = joint_type(&pair(&[0, 1, 0, 1], &[0, 1, 1, 0]));
        assert_eq!(jt.counts(), &[1, 1, 1, 1]);
        assert_eq!(jt.n(), 4);
        let jt = joint_type(&pair(&[1, 1, 1], &[0, 0, 0]));
        assert_eq!(jt.counts(), &[0, 0, 3, 0]);
    }

    #[test]
    fn typicality_cases() {
        let u = JointDistribution::uniform(vec![2, 2]).unwrap();
        assert!(is_typical(&pair(&[0, 1, 0, 1], &[0, 1, 1, 0]), &u, 0.05).unwrap());
        assert!(is_typical(&pair(&[0, 1, 0, 1], &[0, 1, 1, 0]), &u, 0.0).unwrap());
        assert!(!is_typical(&pair(&[0, 0, 0, 0], &[0, 0, 0, 0]), &u, 0.05).unwrap());
        assert!(is_typical(&pair(&[0, 0, 0, 0], &[0, 0, 0, 0]), &u, 1.0).unwrap());
        assert!(is_typical(&pair(&[0, 0, 0, 0], &[0, 0, 0, 0]), &u, 0.75).unwrap());
        assert!(TypicalSet::new(&u, -0.1).is_err());
    }

    #[test]
    fn boundary_is_closed_and_exact() {
        // 2/4 - 0.45 = 0.05 exactly; plain floating point says 0.05000000000000004.
        let d = JointDistribution::dsbs(0.1).unwrap();
        let s = pair(&[0, 0, 1, 1], &[0, 0, 1, 1]);
        assert!(is_typical(&s, &d, 0.05).unwrap());
        assert!(!is_typical(&s, &d, 0.049).unwrap());
        assert!(TypicalSet::new(&d, 0.05).unwrap().is_exact());
    }

    #[test]
    fn zero_cells_follow_the_literal_definition() {
        let d = JointDistribution::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        // One (0,1) pair out of 10: frequency 0.1 in a zero-probability cell.
        let x = [0, 0, 0, 0, 0, 1, 1, 1, 1, 0];
        let y = [0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
        assert!(is_typical(&pair(&x, &y), &d, 0.1).unwrap());
        assert!(!is_typical(&pair(&x, &y), &d, 0.09).unwrap());
    }

    #[test]
    fn windows_agree_with_membership() {
        let d = JointDistribution::new(vec![2, 3], vec![0.1, 0.25, 0.15, 0.2, 0.05, 0.25]).unwrap();
        for eps in [0.0, 0.03, 0.05, 0.1, 0.25] {
            let ts = TypicalSet::new(&d, eps).unwrap();
            for n in 1..=20u64 {
                let w = ts.count_windows(n);
                for (cell, &(lo, hi)) in w.iter().enumerate() {
                    for c in 0..=n {
                        let inside = lo <= c && c <= hi;
                        assert_eq!(inside, ts.cell_ok(ts.targets[cell], c, n), "eps={eps} n={n} c={c}");
                    }
                }
            }
        }
    }

    #[test]
    fn rational_recovery() {
        assert_eq!(recover_rational(0.45, MAX_DENOMINATOR), Some((9, 20)));
        assert_eq!(recover_rational(1.0 / 3.0, MAX_DENOMINATOR), Some((1, 3)));
        assert_eq!(recover_rational(0.0, MAX_DENOMINATOR), Some((0, 1)));
        assert_eq!(recover_rational(1.0, MAX_DENOMINATOR), Some((1, 1)));
        assert_eq!(recover_rational(std::f64::consts::PI / 10.0, MAX_DENOMINATOR), None);
    }

    #[test]
    fn joint_type_is_invariant_under_a_common_permutation() {
        let d = JointDistribution::uniform(vec![2, 3]).unwrap();
        let _ = d;
        for n in 1..=6 {
            let x: Vec<usize> = (0..n).map(|i| (i * 7 + 1) % 2).collect();
            let y: Vec<usize> = (0..n).map(|i| (i * 5 + 2) % 3).collect();
            let s = SequenceSample::new(vec![2, 3], vec![x, y]).unwrap();
            let base = joint_type(&s);
            for sigma in all_permutations(n) {
                let pv = PermutationVector::new(vec![sigma.clone(), sigma]).unwrap();
                assert_eq!(joint_type(&s.permuted(&pv).unwrap()), base);
            }
        }
    }

    #[test]
    fn monotone_in_epsilon() {
        let d = JointDistribution::dsbs(0.2).unwrap();
        let s = pair(&[0, 1, 1, 0, 1, 0], &[0, 1, 0, 0, 1, 1]);
        let mut was = false;
        for step in 0..=100 {
            let now = is_typical(&s, &d, step as f64 / 100.0).unwrap();
            assert!(!was || now);
            was = now;
        }
        assert!(was);
    }

    #[test]
    fn sample_validation_and_text() {
        assert!(SequenceSample::new(vec![2, 2], vec![vec![0, 1], vec![0]]).is_err());
        assert!(SequenceSample::new(vec![2, 2], vec![vec![0, 2], vec![0, 1]]).is_err());
        let s = SequenceSample::parse("0 1 1\n1 0 1\n", vec![2, 2]).unwrap();
        assert_eq!(s.to_string(), "0 1 1\n1 0 1\n");
        assert!(SequenceSample::parse("0 a", vec![2]).is_err());
        let q = Permutation::parse_image("2 3 1").unwrap();
        let p = s.permuted(&PermutationVector::pair(q)).unwrap();
        assert_eq!(p.rows()[1], vec![0, 1, 1]);
    }
}
