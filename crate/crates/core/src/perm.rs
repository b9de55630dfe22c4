//! Permutations of `[1, n]`.
//!
//! Storage is 0-indexed; every public index, image and cycle is 1-indexed.
//!
//! Conventions:
//! - `compose(p, q)(i) = p(q(i))`.
//! - `apply(p, y)[i] = y[p(i)]`, so `apply(compose(p, q), y) = apply(q, apply(p, y))`.
//! - A cycle `(a b c)` means `p(a) = b`, `p(b) = c`, `p(c) = a`.
//!
//! Reading a permutation `p` as "maps the vector `(1, ..., n)` to `z`" corresponds to
//! [`Permutation::apply_inverse`]: `z[i] = p^{-1}(i)`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    image: Vec<usize>,
}

/// A single non-trivial cycle, listed from its smallest element.
pub type Cycle = Vec<usize>;

/// Conjugacy class descriptor: `m` fixed points plus non-trivial cycle lengths.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycleType {
    m: usize,
    lengths: Vec<usize>,
}

impl CycleType {
    /// Builds a cycle type; `lengths` may come in any order and are stored ascending.
    pub fn new(m: usize, mut lengths: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = lengths.iter().find(|&&l| l < 2) {
            return Err(Error::InvalidCycleType(format!(
                "cycle length {bad} < 2; fixed points belong in m"
            )));
        }
        if m + lengths.iter().sum::<usize>() == 0 {
            return Err(Error::InvalidCycleType("n must be positive".into()));
        }
        lengths.sort_unstable();
        Ok(CycleType { m, lengths })
    }

    pub fn n(&self) -> usize {
        self.m + self.lengths.iter().sum::<usize>()
    }

    /// Number of fixed points.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of non-trivial cycles.
    pub fn c(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn max_length(&self) -> usize {
        self.lengths.last().copied().unwrap_or(1)
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},[", self.m, self.c())?;
        for (i, l) in self.lengths.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "])")
    }
}

/// Ordered cycle-type description, `m=2,c=2,lengths=3,2`.
///
/// The length order is kept so that [`Permutation::standard_ordered`] can honour it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleTypeSpec {
    pub m: usize,
    pub lengths: Vec<usize>,
}

impl CycleTypeSpec {
    pub fn cycle_type(&self) -> Result<CycleType> {
        CycleType::new(self.m, self.lengths.clone())
    }
}

impl FromStr for CycleTypeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut m = None;
        let mut c = None;
        let mut lengths: Option<Vec<usize>> = None;
        let mut in_lengths = false;
        for raw in s.split(',') {
            let tok = raw.trim();
            if tok.is_empty() {
                continue;
            }
            let parse_num = |t: &str| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::parse(t.trim(), "expected a non-negative integer"))
            };
            if let Some((key, val)) = tok.split_once('=') {
                in_lengths = false;
                match key.trim() {
                    "m" => m = Some(parse_num(val)?),
                    "c" => c = Some(parse_num(val)?),
                    "lengths" => {
                        let mut v = Vec::new();
                        if !val.trim().is_empty() {
                            v.push(parse_num(val)?);
                        }
                        lengths = Some(v);
                        in_lengths = true;
                    }
                    other => return Err(Error::parse(other, "unknown key; expected m, c or lengths")),
                }
            } else if in_lengths {
                lengths.as_mut().unwrap().push(parse_num(tok)?);
            } else {
                return Err(Error::parse(tok, "expected key=value"));
            }
        }
        let m = m.ok_or_else(|| Error::parse(s, "missing m="))?;
        let lengths = lengths.unwrap_or_default();
        if let Some(c) = c {
            if c != lengths.len() {
                return Err(Error::parse(
                    s,
                    format!("c={c} but {} lengths given", lengths.len()),
                ));
            }
        }
        let spec = CycleTypeSpec { m, lengths };
        spec.cycle_type()?;
        Ok(spec)
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPermutation("n must be at least 1".into()));
        }
        Ok(Permutation {
            image: (0..n).collect(),
        })
    }

    /// From the one-line image `(p(1), ..., p(n))`, 1-indexed.
    pub fn from_image(image: &[usize]) -> Result<Self> {
        let n = image.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty image".into()));
        }
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for (pos, &v) in image.iter().enumerate() {
            if v == 0 || v > n {
                return Err(Error::InvalidPermutation(format!(
                    "image value {v} at position {} is outside [1,{n}]",
                    pos + 1
                )));
            }
            if std::mem::replace(&mut seen[v - 1], true) {
                return Err(Error::InvalidPermutation(format!(
                    "image value {v} appears more than once"
                )));
            }
            out.push(v - 1);
        }
        Ok(Permutation { image: out })
    }

    /// From disjoint cycles on `[1, n]`; unmentioned points are fixed.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut p = Permutation::identity(n)?;
        let mut seen = vec![false; n];
        for cycle in cycles {
            for &a in cycle {
                if a == 0 || a > n {
                    return Err(Error::InvalidPermutation(format!(
                        "cycle element {a} is outside [1,{n}]"
                    )));
                }
                if std::mem::replace(&mut seen[a - 1], true) {
                    return Err(Error::InvalidPermutation(format!(
                        "element {a} appears in more than one cycle position"
                    )));
                }
            }
            for (t, &a) in cycle.iter().enumerate() {
                let b = cycle[(t + 1) % cycle.len()];
                p.image[a - 1] = b - 1;
            }
        }
        Ok(p)
    }

    /// Parses `"(1 2 5)(3 4)"`; commas between elements are accepted.
    pub fn parse_cycles(n: usize, s: &str) -> Result<Self> {
        let mut cycles = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let Some(body) = rest.strip_prefix('(') else {
                return Err(Error::parse(rest, "expected `(` opening a cycle"));
            };
            let Some(close) = body.find(')') else {
                return Err(Error::parse(rest, "unterminated cycle"));
            };
            let cycle = body[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::parse(t, "expected a positive integer"))
                })
                .collect::<Result<Vec<_>>>()?;
            cycles.push(cycle);
            rest = body[close + 1..].trim_start();
        }
        Permutation::from_cycles(n, &cycles)
    }

    /// Parses the one-line image notation `"5 1 4 3 2"`.
    pub fn parse_image(s: &str) -> Result<Self> {
        let image = s
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::parse(t, "expected a positive integer"))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::from_image(&image)
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    /// `p(i)` for 1-indexed `i`.
    ///
    /// Panics if `i` is outside `[1, n]`.
    pub fn at(&self, i: usize) -> usize {
        self.image[i - 1] + 1
    }

    /// The 1-indexed one-line image.
    pub fn image(&self) -> Vec<usize> {
        self.image.iter().map(|&v| v + 1).collect()
    }

    /// 0-indexed image table, for hot loops.
    pub fn raw_image(&self) -> &[usize] {
        &self.image
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| i == v)
    }

    fn check_len(&self, found: usize) -> Result<()> {
        if self.len() != found {
            return Err(Error::SizeMismatch {
                expected: self.len(),
                found,
            });
        }
        Ok(())
    }

    /// `(self ∘ q)(i) = self(q(i))`.
    pub fn compose(&self, q: &Permutation) -> Result<Permutation> {
        self.check_len(q.len())?;
        Ok(Permutation {
            image: q.image.iter().map(|&j| self.image[j]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.image.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { image: inv }
    }

    /// `s ∘ self ∘ s^{-1}`.
    pub fn conjugate(&self, s: &Permutation) -> Result<Permutation> {
        s.compose(self)?.compose(&s.inverse())
    }

    /// Sequence permutation `z[i] = y[p(i)]`.
    pub fn apply<T: Clone>(&self, y: &[T]) -> Result<Vec<T>> {
        self.check_len(y.len())?;
        Ok(self.image.iter().map(|&j| y[j].clone()).collect())
    }

    /// `apply(inverse(p), y)`, i.e. `z[p(i)] = y[i]`.
    pub fn apply_inverse<T: Clone>(&self, y: &[T]) -> Result<Vec<T>> {
        self.check_len(y.len())?;
        let mut out: Vec<Option<T>> = vec![None; y.len()];
        for (i, &j) in self.image.iter().enumerate() {
            out[j] = Some(y[i].clone());
        }
        Ok(out.into_iter().map(Option::unwrap).collect())
    }

    /// Non-trivial cycles, each from its smallest element, sorted by smallest element.
    pub fn cycles(&self) -> Vec<Cycle> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] || self.image[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = start;
            while !seen[cur] {
                seen[cur] = true;
                cycle.push(cur + 1);
                cur = self.image[cur];
            }
            cycles.push(cycle);
        }
        cycles
    }

    pub fn cycle_type(&self) -> CycleType {
        let cycles = self.cycles();
        let moved: usize = cycles.iter().map(Vec::len).sum();
        CycleType {
            m: self.len() - moved,
            lengths: {
                let mut l: Vec<usize> = cycles.iter().map(Vec::len).collect();
                l.sort_unstable();
                l
            },
        }
    }

    pub fn cycle_decompose(&self) -> (Vec<Cycle>, CycleType) {
        (self.cycles(), self.cycle_type())
    }

    /// Canonical representative of a conjugacy class, cycles laid out by ascending length.
    pub fn standard(ct: &CycleType) -> Permutation {
        Permutation::standard_ordered(ct.m, &ct.lengths)
            .expect("a validated cycle type always yields a permutation")
    }

    /// Consecutive-integer cycles `(1..=l_1)(l_1+1..=l_1+l_2)...` in the given order,
    /// with the last `m` points fixed.
    pub fn standard_ordered(m: usize, lengths: &[usize]) -> Result<Permutation> {
        CycleType::new(m, lengths.to_vec())?;
        let n = m + lengths.iter().sum::<usize>();
        let mut image: Vec<usize> = (0..n).collect();
        let mut start = 0;
        for &len in lengths {
            for t in 0..len {
                image[start + t] = start + (t + 1) % len;
            }
            start += len;
        }
        Ok(Permutation { image })
    }

    /// A uniformly random permutation of the given cycle type.
    pub fn random_with_cycle_type<R: Rng + ?Sized>(ct: &CycleType, rng: &mut R) -> Permutation {
        let s = Permutation::random(ct.n(), rng);
        Permutation::standard(ct)
            .conjugate(&s)
            .expect("sizes agree by construction")
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
        let mut image: Vec<usize> = (0..n).collect();
        image.shuffle(rng);
        Permutation { image }
    }

    pub fn same_cycle_type(&self, q: &Permutation) -> Result<bool> {
        self.check_len(q.len())?;
        Ok(self.cycle_type() == q.cycle_type())
    }

    /// 1-indexed fixed points, ascending.
    pub fn fixed_points(&self) -> Vec<usize> {
        self.image
            .iter()
            .enumerate()
            .filter(|&(i, &v)| i == v)
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn is_derangement(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| i != v)
    }

    /// Cycle notation. With `with_fixed`, fixed points are written as 1-cycles.
    /// The identity without fixed points renders as `()`.
    pub fn cycle_notation(&self, with_fixed: bool) -> String {
        let mut cycles = self.cycles();
        if with_fixed {
            cycles.extend(self.fixed_points().into_iter().map(|i| vec![i]));
            cycles.sort_by_key(|c| c[0]);
        }
        if cycles.is_empty() {
            return "()".into();
        }
        let mut s = String::new();
        for c in cycles {
            s.push('(');
            s.push_str(
                &c.iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(" "),
            );
            s.push(')');
        }
        s
    }

    /// Lexicographic successor, or `None` at the last permutation.
    pub fn next_lex(&self) -> Option<Permutation> {
        let mut image = self.image.clone();
        let n = image.len();
        let i = (0..n.saturating_sub(1)).rev().find(|&i| image[i] < image[i + 1])?;
        let j = (i + 1..n).rev().find(|&j| image[j] > image[i]).unwrap();
        image.swap(i, j);
        image[i + 1..].reverse();
        Some(Permutation { image })
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(image: Vec<usize>) -> Result<Self> {
        Permutation::from_image(&image)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.image()
    }
}

/// One-line image notation.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.image.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", v + 1)?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Permutation::parse_image(s)
    }
}

/// All of `S_n` in lexicographic order of the image.
pub fn all_permutations(n: usize) -> impl Iterator<Item = Permutation> {
    std::iter::successors(Permutation::identity(n).ok(), Permutation::next_lex)
}

/// All cycle types of size `n`: fixed-point count plus an ascending partition of the rest into parts ≥ 2.
pub fn all_cycle_types(n: usize) -> Vec<CycleType> {
    fn parts(rest: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for p in min..=rest {
            cur.push(p);
            parts(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for moved in 0..=n {
        let mut ls = Vec::new();
        parts(moved, 2, &mut Vec::new(), &mut ls);
        for lengths in ls {
            if let Ok(ct) = CycleType::new(n - moved, lengths) {
                out.push(ct);
            }
        }
    }
    out
}
