//! Exact counts and closed-form sandwiches for derangements, permutations with a given
//! number of fixed points, k-fold derangements and Bell permutation vectors.
//!
//! Everything is arbitrary precision. Enumeration oracles refuse to run past
//! [`ENUMERATION_LIMIT`] candidate tuples.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::partitions::{
    bell_signature_with, is_kfold_derangement, BellSignature, PartitionIndex, PermutationVector,
};
use crate::perm::{all_permutations, Permutation};

pub const ENUMERATION_LIMIT: u64 = 10_000_000;

/// `lower <= exact <= upper`, with `exact` present when it could be computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountBounds {
    pub lower: BigUint,
    pub exact: Option<BigUint>,
    pub upper: BigUint,
}

impl CountBounds {
    pub fn holds(&self) -> bool {
        match &self.exact {
            Some(e) => self.lower <= *e && *e <= self.upper,
            None => self.lower <= self.upper,
        }
    }

    pub fn log10_lower(&self) -> f64 {
        ln_big(&self.lower) / std::f64::consts::LN_10
    }

    pub fn log10_upper(&self) -> f64 {
        ln_big(&self.upper) / std::f64::consts::LN_10
    }
}

fn big_number(x: &BigUint) -> serde_json::Number {
    x.to_string()
        .parse()
        .expect("decimal integers are valid JSON numbers")
}

fn float_or_null(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

impl Serialize for CountBounds {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("lower", &big_number(&self.lower))?;
        if let Some(e) = &self.exact {
            map.serialize_entry("exact", &big_number(e))?;
        }
        map.serialize_entry("upper", &big_number(&self.upper))?;
        map.serialize_entry("log10_lower", &float_or_null(self.log10_lower()))?;
        map.serialize_entry("log10_upper", &float_or_null(self.log10_upper()))?;
        map.end()
    }
}

/// Natural log of a big integer; `-inf` for zero.
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("below f64 range").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

pub fn binomial(n: usize, r: usize) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

pub fn multinomial(parts: &[usize]) -> BigUint {
    let mut total = 0;
    let mut acc = BigUint::one();
    for &p in parts {
        total += p;
        acc *= binomial(total, p);
    }
    acc
}

/// `!n` via `!n = (n-1)(!(n-1) + !(n-2))`.
pub fn derangements(n: usize) -> BigUint {
    let (mut prev, mut cur) = (BigUint::one(), BigUint::zero());
    if n == 0 {
        return prev;
    }
    for i in 2..=n {
        let next = BigUint::from(i - 1) * (&cur + &prev);
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

fn check_m(n: usize, m: usize) -> Result<()> {
    if m > n {
        return Err(Error::InvalidArgument(format!("m={m} exceeds n={n}")));
    }
    Ok(())
}

/// `N_m = C(n, m) · !(n - m)`: permutations of `[1, n]` with exactly `m` fixed points.
pub fn count_fixed_point_perms(n: usize, m: usize) -> Result<BigUint> {
    check_m(n, m)?;
    Ok(binomial(n, m) * derangements(n - m))
}

/// `n!/(m!(n-m)) <= N_m <= n^(n-m)`.
///
/// The lower form only holds for `m <= n - 2`. At `m = n` it divides by zero and at
/// `m = n - 1` it evaluates to `n` while `N_m = 0`; both are clamped to the exact count.
pub fn fixed_point_count_bounds(n: usize, m: usize) -> Result<CountBounds> {
    let exact = count_fixed_point_perms(n, m)?;
    let lower = if m + 1 >= n {
        exact.clone()
    } else {
        factorial(n) / (factorial(m) * BigUint::from(n - m))
    };
    Ok(CountBounds {
        lower,
        exact: Some(exact),
        upper: BigUint::from(n).pow((n - m) as u32),
    })
}

/// `log N_m / (n log n)`; 0 when `N_m = 1`, `-inf` when `N_m = 0`.
pub fn normalized_log_fixed_count(n: usize, m: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(normalize(&count_fixed_point_perms(n, m)?, n))
}

fn normalize(count: &BigUint, n: usize) -> f64 {
    if count.is_one() {
        return 0.0;
    }
    if count.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_big(count) / (n as f64 * (n as f64).ln())
}

/// `(n!)^(k-1)`: tuples enumerated when `π_1` is pinned to the identity.
fn tuple_count(n: usize, k: usize) -> BigUint {
    factorial(n).pow(k.saturating_sub(1) as u32)
}

fn guard(what: &'static str, n: usize, k: usize) -> Result<()> {
    let needed = tuple_count(n, k);
    if needed > BigUint::from(ENUMERATION_LIMIT) {
        return Err(Error::Infeasible {
            what,
            needed: needed.to_string(),
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

/// Walks every `(identity, π_2, ..., π_k)` on `[1, n]` and folds a per-chunk accumulator.
/// Chunks are keyed by `π_2`; the fold of each chunk is sequential.
fn fold_vectors<A, F>(n: usize, k: usize, exec: Execution, init: A, visit: F) -> Vec<A>
where
    A: Clone + Send + Sync,
    F: Fn(&mut A, &[Permutation]) + Sync + Send,
{
    let perms: Vec<Permutation> = all_permutations(n).collect();
    let id = Permutation::identity(n).expect("n >= 1");
    if k == 1 {
        let mut acc = init;
        visit(&mut acc, std::slice::from_ref(&id));
        return vec![acc];
    }
    exec.map_chunks(perms.len(), |first| {
        let mut acc = init.clone();
        let mut tuple = vec![id.clone(), perms[first].clone()];
        tuple.resize(k, id.clone());
        let mut idx = vec![0usize; k - 2];
        loop {
            for (slot, &j) in idx.iter().enumerate() {
                tuple[slot + 2] = perms[j].clone();
            }
            visit(&mut acc, &tuple);
            // odometer over the remaining k-2 slots
            let mut pos = idx.len();
            loop {
                if pos == 0 {
                    return acc;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < perms.len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    })
}

/// `d_k(n)` by enumerating every `(identity, π_2, ..., π_k)` and keeping k-fold derangements.
pub fn exact_kfold_derangements(n: usize, k: usize) -> Result<BigUint> {
    exact_kfold_derangements_with(n, k, Execution::default())
}

pub fn exact_kfold_derangements_with(n: usize, k: usize, exec: Execution) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if n == 0 {
        return Ok(BigUint::one());
    }
    guard("k-fold derangement enumeration", n, k)?;
    let counts = fold_vectors(n, k, exec, 0u64, |acc, tuple| {
        let pv = PermutationVector::new(tuple.to_vec()).expect("equal sizes");
        if is_kfold_derangement(&pv) {
            *acc += 1;
        }
    });
    Ok(BigUint::from(counts.iter().sum::<u64>()))
}

/// `d_k(n)` exactly when enumeration is feasible, otherwise `None`.
fn kfold_exact_if_feasible(n: usize, k: usize) -> Option<BigUint> {
    if k <= 1 || n == 0 {
        return Some(BigUint::one());
    }
    if k > n {
        // Pigeonhole: k distinct values at index 1 need k <= n.
        return Some(BigUint::zero());
    }
    if k == 2 {
        return Some(derangements(n));
    }
    exact_kfold_derangements(n, k).ok()
}

/// `((n-k+1)!)^(k-1) <= d_k(n) <= (!n)^(k-1)`, for `1 <= k <= n`.
pub fn kfold_bounds(n: usize, k: usize) -> Result<CountBounds> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "k-fold bounds need 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    Ok(CountBounds {
        lower: factorial(n - k + 1).pow((k - 1) as u32),
        exact: kfold_exact_if_feasible(n, k),
        upper: derangements(n).pow((k - 1) as u32),
    })
}

/// Census of Bell signatures over all `(identity, π_2, ..., π_k)` on `[1, n]`.
pub fn bell_signature_census(n: usize, k: usize) -> Result<BTreeMap<BellSignature, u64>> {
    bell_signature_census_with(n, k, Execution::default())
}

pub fn bell_signature_census_with(
    n: usize,
    k: usize,
    exec: Execution,
) -> Result<BTreeMap<BellSignature, u64>> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidArgument("n and k must be at least 1".into()));
    }
    guard("Bell signature census", n, k)?;
    let index = PartitionIndex::new(k)?;
    let chunks = fold_vectors(n, k, exec, BTreeMap::new(), |acc, tuple| {
        let inverses: Vec<Permutation> = tuple.iter().map(Permutation::inverse).collect();
        *acc.entry(bell_signature_with(&index, &inverses)).or_insert(0u64) += 1;
    });
    let mut total = BTreeMap::new();
    for chunk in chunks {
        for (sig, c) in chunk {
            *total.entry(sig).or_insert(0) += c;
        }
    }
    Ok(total)
}

fn check_signature(n: usize, k: usize, sig: &BellSignature) -> Result<()> {
    if sig.k() != k || sig.n() != n {
        return Err(Error::InvalidSignature(format!(
            "signature {sig} has k={}, n={}; expected k={k}, n={n}",
            sig.k(),
            sig.n()
        )));
    }
    Ok(())
}

/// Number of Bell permutation vectors with `π_1 = identity` and the given signature.
/// Multiply by `n!` to drop the identity constraint.
pub fn exact_bell_count(n: usize, k: usize, sig: &BellSignature) -> Result<BigUint> {
    check_signature(n, k, sig)?;
    let census = bell_signature_census(n, k)?;
    Ok(BigUint::from(census.get(sig).copied().unwrap_or(0)))
}

/// `multinomial · Π_j d_{|P_j|}(i_j) <= N <= multinomial · n^(Σ_j |P_j| i_j - n)`.
///
/// A `d_{|P_j|}(i_j)` that cannot be enumerated is replaced by its closed-form lower
/// bound, so `lower` stays valid.
pub fn bell_count_bounds(n: usize, k: usize, sig: &BellSignature) -> Result<CountBounds> {
    check_signature(n, k, sig)?;
    let partitions = crate::partitions::enumerate_partitions(k)?;
    let multi = multinomial(sig.counts());
    let mut lower = multi.clone();
    let mut weighted = 0usize;
    for (p, &i) in partitions.iter().zip(sig.counts()) {
        let blocks = p.num_blocks();
        weighted += blocks * i;
        let d = kfold_exact_if_feasible(i, blocks)
            .unwrap_or_else(|| factorial(i - blocks + 1).pow((blocks - 1) as u32));
        lower *= d;
    }
    let upper = multi * BigUint::from(n).pow((weighted - n) as u32);
    let exact = if tuple_count(n, k) <= BigUint::from(ENUMERATION_LIMIT) {
        Some(exact_bell_count(n, k, sig)?)
    } else {
        None
    };
    Ok(CountBounds {
        lower,
        exact,
        upper,
    })
}

/// `log N / (n log n)` for a Bell signature count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizedRate {
    pub exact: Option<f64>,
    pub lower: f64,
    pub upper: f64,
}

pub fn normalized_log_bell_count(n: usize, k: usize, sig: &BellSignature) -> Result<NormalizedRate> {
    let b = bell_count_bounds(n, k, sig)?;
    Ok(NormalizedRate {
        exact: b.exact.as_ref().map(|e| normalize(e, n)),
        lower: normalize(&b.lower, n),
        upper: normalize(&b.upper, n),
    })
}

/// `Σ_j |P_j| α_j - 1` with `α_j = i_j / n`.
pub fn bell_rate_limit(sig: &BellSignature) -> Result<f64> {
    let partitions = crate::partitions::enumerate_partitions(sig.k())?;
    let n = sig.n() as f64;
    Ok(partitions
        .iter()
        .zip(sig.counts())
        .map(|(p, &i)| p.num_blocks() as f64 * i as f64 / n)
        .sum::<f64>()
        - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    /// Oracle: count permutations of `[1, n]` by fixed points via direct enumeration.
    fn brute_fixed_histogram(n: usize) -> Vec<u64> {
        let mut h = vec![0u64; n + 1];
        for p in all_permutations(n) {
            h[p.fixed_points().len()] += 1;
        }
        h
    }

    #[test]
    fn derangement_values() {
        assert_eq!(derangements(0), big(1));
        assert_eq!(derangements(1), big(0));
        assert_eq!(derangements(4), big(9));
        assert_eq!(derangements(5), big(44));
        assert_eq!(brute_fixed_histogram(4)[0], 9);
        assert_eq!(brute_fixed_histogram(5)[0], 44);
    }

    #[test]
    fn derangement_iterative_inequality() {
        for n in 2..=50 {
            assert!(derangements(n) >= derangements(n - 1) * BigUint::from(n - 1));
        }
    }

    #[test]
    fn fixed_point_counts_match_enumeration() {
        for n in 1..=7 {
            let h = brute_fixed_histogram(n);
            for m in 0..=n {
                assert_eq!(count_fixed_point_perms(n, m).unwrap(), big(h[m]), "n={n} m={m}");
            }
        }
        assert_eq!(count_fixed_point_perms(5, 2).unwrap(), big(20));
        assert_eq!(count_fixed_point_perms(6, 6).unwrap(), big(1));
        assert_eq!(count_fixed_point_perms(6, 5).unwrap(), big(0));
        assert!(count_fixed_point_perms(3, 4).is_err());
    }

    #[test]
    fn fixed_point_counts_sum_to_factorial() {
        for n in 1..=9 {
            let s: BigUint = (0..=n).map(|m| count_fixed_point_perms(n, m).unwrap()).sum();
            assert_eq!(s, factorial(n));
        }
    }

    #[test]
    fn fixed_point_sandwich() {
        let b = fixed_point_count_bounds(5, 2).unwrap();
        assert_eq!((b.lower.clone(), b.exact.clone().unwrap(), b.upper.clone()), (big(20), big(20), big(125)));
        let b = fixed_point_count_bounds(4, 0).unwrap();
        assert_eq!((b.lower.clone(), b.exact.clone().unwrap(), b.upper.clone()), (big(6), big(9), big(256)));
        let b = fixed_point_count_bounds(4, 4).unwrap();
        assert_eq!((b.lower.clone(), b.exact.clone().unwrap(), b.upper.clone()), (big(1), big(1), big(1)));
        for n in 1..=9 {
            for m in 0..=n {
                assert!(fixed_point_count_bounds(n, m).unwrap().holds(), "n={n} m={m}");
            }
        }
        // The unclamped closed form n!/((n-1)!·1) = n overshoots N_{n-1} = 0.
        let b = fixed_point_count_bounds(6, 5).unwrap();
        assert_eq!((b.lower, b.exact.unwrap()), (big(0), big(0)));
    }

    /// Oracle: log N_m from a sum of logs, independent of the big-integer path.
    fn ln_fixed_count_oracle(n: usize, m: usize) -> f64 {
        let ln_fact = |x: usize| (1..=x).map(|i| (i as f64).ln()).sum::<f64>();
        let ln_binom = ln_fact(n) - ln_fact(m) - ln_fact(n - m);
        // !r = round(r!/e); the rounding is negligible in log space for r >= 7
        let ln_der = ln_fact(n - m) - 1.0;
        ln_binom + ln_der
    }

    #[test]
    fn normalized_fixed_count_rates() {
        let dev = |n: usize| (normalized_log_fixed_count(n, n / 2).unwrap() - 0.5).abs();
        assert!(dev(200) <= 0.1);
        assert!(dev(200) < dev(50));
        assert!(dev(100) < dev(50));
        assert_eq!(normalized_log_fixed_count(30, 30).unwrap(), 0.0);
        assert_eq!(normalized_log_fixed_count(30, 29).unwrap(), f64::NEG_INFINITY);

        for (n, m) in [(50, 25), (100, 0), (200, 100), (120, 7)] {
            let oracle = ln_fixed_count_oracle(n, m) / (n as f64 * (n as f64).ln());
            let got = normalized_log_fixed_count(n, m).unwrap();
            assert!((got - oracle).abs() < 1e-9, "n={n} m={m}: {got} vs {oracle}");
        }
        // m = 0 converges like 1 - 1/ln n; at n = 100 it sits near 0.79.
        let v = normalized_log_fixed_count(100, 0).unwrap();
        assert!((v - 0.7876).abs() < 1e-3, "{v}");
        assert!(normalized_log_fixed_count(5000, 0).unwrap() > v);
    }

    #[test]
    fn ln_big_handles_large_values() {
        let f = factorial(1000);
        let oracle: f64 = (1..=1000).map(|i| (i as f64).ln()).sum();
        assert!((ln_big(&f) - oracle).abs() < 1e-9 * oracle);
        assert_eq!(ln_big(&BigUint::zero()), f64::NEG_INFINITY);
    }

    #[test]
    fn kfold_counts() {
        for n in 1..=6 {
            assert_eq!(exact_kfold_derangements(n, 2).unwrap(), derangements(n));
        }
        assert_eq!(exact_kfold_derangements(3, 3).unwrap(), big(2));
        assert_eq!(exact_kfold_derangements(1, 2).unwrap(), big(0));
        assert_eq!(exact_kfold_derangements(4, 1).unwrap(), big(1));
        assert!(matches!(
            exact_kfold_derangements(6, 4),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn kfold_sandwich() {
        let b = kfold_bounds(3, 3).unwrap();
        assert_eq!((b.lower.clone(), b.exact.clone().unwrap(), b.upper.clone()), (big(1), big(2), big(4)));
        let b = kfold_bounds(4, 2).unwrap();
        assert_eq!((b.lower.clone(), b.exact.clone().unwrap(), b.upper.clone()), (big(6), big(9), big(9)));
        for n in 1..=5 {
            for k in 1..=3.min(n) {
                assert!(kfold_bounds(n, k).unwrap().holds(), "n={n} k={k}");
            }
        }
        assert!(kfold_bounds(2, 3).is_err());
    }

    #[test]
    fn bell_counts_small() {
        let s = |c: &[usize]| BellSignature::new(if c.len() == 5 { 3 } else { 2 }, c.to_vec()).unwrap();
        assert_eq!(exact_bell_count(4, 2, &s(&[4, 0])).unwrap(), big(9));
        assert_eq!(exact_bell_count(4, 2, &s(&[0, 4])).unwrap(), big(1));
        assert_eq!(
            exact_bell_count(3, 3, &s(&[3, 0, 0, 0, 0])).unwrap(),
            exact_kfold_derangements(3, 3).unwrap()
        );
        let b = bell_count_bounds(4, 2, &s(&[4, 0])).unwrap();
        assert_eq!((b.lower.clone(), b.upper.clone()), (big(9), big(256)));
        let b = bell_count_bounds(4, 2, &s(&[0, 4])).unwrap();
        assert_eq!((b.lower.clone(), b.upper.clone()), (big(1), big(1)));
        assert!(exact_bell_count(4, 3, &s(&[4, 0])).is_err());
    }

    #[test]
    fn bell_pair_counts_match_fixed_point_counts() {
        for n in 1..=6 {
            let census = bell_signature_census(n, 2).unwrap();
            for m in 0..=n {
                let sig = BellSignature::pair(n, m).unwrap();
                assert_eq!(
                    big(census.get(&sig).copied().unwrap_or(0)),
                    count_fixed_point_perms(n, m).unwrap()
                );
            }
        }
    }

    #[test]
    fn bell_census_is_worker_independent() {
        let a = bell_signature_census_with(4, 3, Execution::Sequential).unwrap();
        let b = bell_signature_census_with(4, 3, Execution::with_workers(8)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bell_rate_limits() {
        assert_eq!(bell_rate_limit(&BellSignature::pair(10, 0).unwrap()).unwrap(), 1.0);
        let r = normalized_log_bell_count(6, 2, &BellSignature::pair(6, 6).unwrap()).unwrap();
        assert_eq!(r.exact, Some(0.0));
        let r = normalized_log_bell_count(100, 2, &BellSignature::pair(100, 100).unwrap()).unwrap();
        assert_eq!((r.exact, r.lower, r.upper), (None, 0.0, 0.0));
        let sig = BellSignature::pair(100, 50).unwrap();
        let target = bell_rate_limit(&sig).unwrap();
        assert!((target - 0.5).abs() < 1e-12);
        let r = normalized_log_bell_count(100, 2, &sig).unwrap();
        assert!(r.lower <= target && target <= r.upper);
        assert!((r.lower - target).abs() <= 0.15 && (r.upper - target).abs() <= 0.15);
    }

    #[test]
    fn count_bounds_json() {
        let v = serde_json::to_value(fixed_point_count_bounds(5, 2).unwrap()).unwrap();
        assert_eq!(v["lower"], 20);
        assert_eq!(v["exact"], 20);
        assert_eq!(v["upper"], 125);
        assert!((v["log10_upper"].as_f64().unwrap() - 125f64.log10()).abs() < 1e-12);
    }
}
