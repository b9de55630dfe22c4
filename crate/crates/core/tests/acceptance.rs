//! Acceptance suite: nine end-to-end checks, each reported as one PASS/FAIL line.
//!
//! Run with `cargo test --release -p permtypical --test acceptance`. The process exits
//! non-zero if any check fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use permtypical::bounds::{
    information_slack, theorem1_bound, theorem1_exponent_rate, theorem2_bound,
    theorem2_exponent_rate,
};
use permtypical::counting::{
    bell_count_bounds, bell_rate_limit, count_fixed_point_perms, factorial, kfold_bounds,
    normalized_log_bell_count, normalized_log_fixed_count,
};
use permtypical::dist::{mutual_information, JointDistribution};
use permtypical::montecarlo::{
    estimate_typicality_prob, exact_typicality_prob, reference_triple, verify_bounds,
    verify_proposition1, Prop1Options, Sweep, SweepReport, TrialConfig,
};
use permtypical::partitions::enumerate_partitions;
use permtypical::perm::all_permutations;
use permtypical::{BellSignature, Execution, Permutation, PermutationVector, SetPartition};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, started: Instant) -> Result<(), String> {
    let took = started.elapsed();
    ensure(took <= limit, || format!("took {took:.1?}, limit {limit:?}"))
}

fn dsbs_pair() -> [(f64, JointDistribution); 2] {
    [0.1, 0.2].map(|p| (p, JointDistribution::dsbs(p).unwrap()))
}

fn invariance() -> Outcome {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    for (p, d) in dsbs_pair() {
        for n in [3, 4, 5] {
            for eps in [0.05, 0.1] {
                let r = verify_proposition1(&d, n, eps, Prop1Options::default())
                    .map_err(|e| e.to_string())?;
                let members: usize = r.classes.iter().map(|c| c.members).sum();
                let n_fact = (1..=n).product::<usize>();
                ensure(members == n_fact && r.sigmas_checked == n_fact, || {
                    format!("p={p} n={n}: only {members} of {n_fact} permutations checked")
                })?;
                ensure(r.pairs_checked == n_fact * n_fact, || {
                    format!("p={p} n={n}: {} pairs checked", r.pairs_checked)
                })?;
                worst = worst.max(r.max_discrepancy());
            }
        }
    }
    ensure(worst <= 1e-12, || format!("max discrepancy {worst:e}"))?;
    within(Duration::from_secs(120), started)?;
    Ok(format!(
        "max discrepancy {worst:.1e} over 12 configurations in {:.1?}",
        started.elapsed()
    ))
}

fn sweep_outcome(report: &SweepReport, what: &str) -> Outcome {
    let v = report.violations();
    ensure(v.is_empty(), || {
        format!("{} violations, first {}", v.len(), v[0].config_id)
    })?;
    ensure(report.rows.iter().all(|r| r.exact.is_some()), || {
        "some configurations were not enumerated exactly".into()
    })?;
    let nontrivial = report.rows.iter().filter(|r| r.bound < 1.0).count();
    Ok(format!(
        "0 violations over {} {what} configurations ({nontrivial} with bound < 1), min margin {:.4}",
        report.rows.len(),
        report.min_margin()
    ))
}

fn theorem1_soundness() -> Outcome {
    let sweep = Sweep::theorem1_default();
    let ns: BTreeSet<usize> = sweep.cases.iter().map(|c| c.permutations.n()).collect();
    ensure(ns == (1..=5).collect(), || format!("sizes {ns:?}"))?;
    let expected: usize = 2 * 2 * (1..=5).map(|n| (1..=n).product::<usize>()).sum::<usize>();
    ensure(sweep.cases.len() == expected, || {
        format!("{} cases, expected {expected}", sweep.cases.len())
    })?;
    sweep_outcome(
        &verify_bounds(&sweep, Execution::default()).map_err(|e| e.to_string())?,
        "fixed-point",
    )
}

fn single_cycle_soundness() -> Outcome {
    let sweep = Sweep::lemma4_default();
    // The reported bound must be 2^(-(n/2)(I - δ)) exactly.
    for case in &sweep.cases {
        let n = case.permutations.n() as f64;
        let d = &case.distribution;
        let info = mutual_information(d).unwrap();
        let mut delta = 0.0;
        for x in 0..2 {
            for y in 0..2 {
                let pxy = d.prob(&[x, y]);
                let px: f64 = (0..2).map(|b| d.prob(&[x, b])).sum();
                let py: f64 = (0..2).map(|a| d.prob(&[a, y])).sum();
                delta += 2.0 * case.eps * (pxy / (px * py)).log2().abs();
            }
        }
        let want = (-(n / 2.0) * (info - delta)).exp2().min(1.0);
        let got = case.bound().unwrap().explicit_bound;
        ensure((got - want).abs() <= 1e-12 * want.max(1e-300), || {
            format!("n={n} eps={}: bound {got} vs {want}", case.eps)
        })?;
    }
    sweep_outcome(
        &verify_bounds(&sweep, Execution::default()).map_err(|e| e.to_string())?,
        "single-cycle",
    )
}

fn short_cycle_soundness() -> Outcome {
    let sweep = Sweep::lemma5_default();
    let mut kinds = BTreeSet::new();
    for c in &sweep.cases {
        let q = &c.permutations.perms()[1];
        kinds.insert((q.len(), q.cycle_type().max_length()));
    }
    for want in [(4, 2), (6, 2), (6, 3)] {
        ensure(kinds.contains(&want), || format!("no derangement of kind {want:?}"))?;
    }
    sweep_outcome(
        &verify_bounds(&sweep, Execution::default()).map_err(|e| e.to_string())?,
        "short-cycle",
    )
}

fn bell_vector_soundness() -> Outcome {
    let sweep = Sweep::theorem2_default();
    let report = verify_bounds(&sweep, Execution::default()).map_err(|e| e.to_string())?;
    let sigs: BTreeSet<&str> = report.rows.iter().map(|r| r.m_or_signature.as_str()).collect();
    ensure(sigs.len() >= 3, || format!("only {} signatures", sigs.len()))?;
    let d = reference_triple();
    ensure(d.probs().iter().all(|&p| p > 0.0) && d.k() == 3, || "triple is not full support".into())?;
    let positive = report.rows.iter().filter(|r| r.exact.unwrap_or(0.0) > 0.0).count();
    ensure(positive > 0, || "every exact probability is zero".into())?;
    sweep_outcome(&report, &format!("Bell-vector ({} distinct signatures)", sigs.len()))
}

/// Tuples `(identity, π_2, ..., π_k)` on `[1, n]`, fed to `f`.
fn for_each_vector(n: usize, k: usize, f: &mut impl FnMut(&[Permutation])) {
    fn rec(
        all: &[Permutation],
        k: usize,
        acc: &mut Vec<Permutation>,
        f: &mut impl FnMut(&[Permutation]),
    ) {
        if acc.len() == k {
            f(acc);
            return;
        }
        for p in all {
            acc.push(p.clone());
            rec(all, k, acc, f);
            acc.pop();
        }
    }
    let all: Vec<Permutation> = all_permutations(n).collect();
    let mut acc = vec![Permutation::identity(n).unwrap()];
    rec(&all, k, &mut acc, f);
}

/// Every way to write `n` as an ordered sum of `parts` non-negative integers.
fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![n]];
    }
    (0..=n)
        .flat_map(|first| {
            compositions(n - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn counting_exactness() -> Outcome {
    let started = Instant::now();
    // Fixed points, against brute force.
    for n in 1..=7 {
        let mut census = vec![0u64; n + 1];
        for p in all_permutations(n) {
            census[p.fixed_points().len()] += 1;
        }
        let mut total = BigUint::from(0u8);
        for (m, &c) in census.iter().enumerate() {
            let formula = count_fixed_point_perms(n, m).map_err(|e| e.to_string())?;
            ensure(formula == BigUint::from(c), || format!("N_{m}({n}) = {formula}, brute force {c}"))?;
            total += formula;
        }
        ensure(total == factorial(n), || format!("Σ_m N_m({n}) = {total}"))?;
    }
    for (n, m, want) in [(5, 2, 20u32), (4, 0, 9), (5, 0, 44)] {
        ensure(count_fixed_point_perms(n, m).unwrap() == BigUint::from(want), || {
            format!("N_{m}({n}) != {want}")
        })?;
    }

    // k-fold derangements: pairwise disagreement at every index.
    for n in 1..=5 {
        for k in 1..=3.min(n) {
            let mut exact = 0u64;
            for_each_vector(n, k, &mut |v| {
                let ok = (0..k).all(|a| {
                    (a + 1..k).all(|b| (1..=n).all(|i| v[a].at(i) != v[b].at(i)))
                });
                exact += u64::from(ok);
            });
            let b = kfold_bounds(n, k).map_err(|e| e.to_string())?;
            let e = BigUint::from(exact);
            ensure(b.lower <= e && e <= b.upper, || {
                format!("d_{k}({n}) = {exact} outside [{}, {}]", b.lower, b.upper)
            })?;
            ensure(b.exact.as_ref().is_none_or(|x| *x == e), || {
                format!("d_{k}({n}): library exact {:?}, brute force {exact}", b.exact)
            })?;
        }
    }
    let b = kfold_bounds(3, 3).unwrap();
    ensure(
        b.exact == Some(BigUint::from(2u8)) && b.lower == BigUint::from(1u8) && b.upper == BigUint::from(4u8),
        || format!("d_3(3) bounds {b:?}"),
    )?;

    // Bell signatures for k = 3, census computed directly from inverse images.
    let partitions = enumerate_partitions(3).unwrap();
    for n in 1..=4 {
        let mut census: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        for_each_vector(n, 3, &mut |v| {
            let inv: Vec<Permutation> = v.iter().map(Permutation::inverse).collect();
            let mut counts = vec![0usize; partitions.len()];
            for i in 1..=n {
                let labels: Vec<usize> = inv.iter().map(|p| p.at(i)).collect();
                let mut rgs = Vec::new();
                let mut seen: Vec<usize> = Vec::new();
                for l in labels {
                    let pos = seen.iter().position(|&s| s == l).unwrap_or_else(|| {
                        seen.push(l);
                        seen.len() - 1
                    });
                    rgs.push(pos as u8);
                }
                let part = SetPartition::from_rgs(rgs).unwrap();
                counts[partitions.iter().position(|p| *p == part).unwrap()] += 1;
            }
            *census.entry(counts).or_insert(0) += 1;
        });
        let mut total = BigUint::from(0u8);
        for counts in compositions(n, partitions.len()) {
            let sig = BellSignature::new(3, counts.clone()).unwrap();
            let b = bell_count_bounds(n, 3, &sig).map_err(|e| e.to_string())?;
            let want = BigUint::from(census.get(&counts).copied().unwrap_or(0));
            let exact = b.exact.clone().ok_or_else(|| format!("n={n} sig {sig}: no exact count"))?;
            ensure(exact == want, || format!("n={n} sig {sig}: {exact} vs brute force {want}"))?;
            ensure(b.lower <= exact && exact <= b.upper, || {
                format!("n={n} sig {sig}: {exact} outside [{}, {}]", b.lower, b.upper)
            })?;
            total += exact;
        }
        let square = factorial(n).pow(2);
        ensure(total == square, || format!("n={n}: total {total} != (n!)^2"))?;
    }
    within(Duration::from_secs(180), started)?;
    Ok(format!(
        "fixed-point, k-fold and Bell counts match brute force in {:.1?}",
        started.elapsed()
    ))
}

fn asymptotic_rates() -> Outcome {
    let gap = |n: usize| (normalized_log_fixed_count(n, n / 2).unwrap() - 0.5).abs();
    let (g50, g200) = (gap(50), gap(200));
    ensure(g200 < g50, || format!("gap {g200} at n=200 not below {g50} at n=50"))?;
    ensure(g200 <= 0.1, || format!("gap {g200} at n=200"))?;

    let n = 100;
    let sig = BellSignature::new(2, vec![n / 2, n / 2]).unwrap();
    let limit = bell_rate_limit(&sig).unwrap();
    ensure((limit - 0.5).abs() < 1e-15, || format!("limit {limit}"))?;
    let r = normalized_log_bell_count(n, 2, &sig).unwrap();
    let exact = normalized_log_fixed_count(n, n / 2).unwrap();
    ensure(r.lower <= exact && exact <= r.upper, || {
        format!("exact {exact} outside [{}, {}]", r.lower, r.upper)
    })?;
    let worst = (r.lower - limit).abs().max((r.upper - limit).abs());
    ensure(worst <= 0.15, || format!("bracket [{}, {}] vs {limit}", r.lower, r.upper))?;
    Ok(format!(
        "fixed-point gap {g50:.4} (n=50) -> {g200:.4} (n=200); Bell bracket [{:.3}, {:.3}] around {limit}",
        r.lower, r.upper
    ))
}

fn monte_carlo_calibration() -> Outcome {
    let started = Instant::now();
    let id = |n| Permutation::identity(n).unwrap();
    let cyc = |n, s: &str| Permutation::parse_cycles(n, s).unwrap();
    let configs = [
        (JointDistribution::dsbs(0.1).unwrap(), PermutationVector::pair(cyc(8, "(1 2 3)(4 5)")), 0.2),
        (JointDistribution::dsbs(0.2).unwrap(), PermutationVector::pair(cyc(6, "(1 2 3 4 5 6)")), 0.15),
        (JointDistribution::dsbs(0.2).unwrap(), PermutationVector::pair(id(10)), 0.1),
        (JointDistribution::uniform(vec![2, 2]).unwrap(), PermutationVector::pair(cyc(2, "(1 2)")), 0.25),
        (
            reference_triple(),
            PermutationVector::new(vec![id(4), cyc(4, "(1 2)"), cyc(4, "(1 2 3 4)")]).unwrap(),
            0.25,
        ),
    ];
    let mut worst_z: f64 = 0.0;
    for (j, (d, pv, eps)) in configs.into_iter().enumerate() {
        let exact = exact_typicality_prob(&d, &pv, pv.n(), eps).map_err(|e| e.to_string())?;
        let cfg = TrialConfig::new(d, pv, eps, 100_000, 1000 + j as u64).map_err(|e| e.to_string())?;
        let one = estimate_typicality_prob(&cfg, Execution::Sequential).map_err(|e| e.to_string())?;
        let eight = estimate_typicality_prob(&cfg, Execution::with_workers(8)).map_err(|e| e.to_string())?;
        ensure(one == eight, || format!("config {j}: 1 vs 8 workers differ"))?;
        ensure(one.p_hat.to_bits() == eight.p_hat.to_bits(), || format!("config {j}: bits differ"))?;
        let err = (one.p_hat - exact).abs();
        ensure(err <= 3.0 * one.stderr, || {
            format!("config {j}: |{} - {exact}| > 3·{}", one.p_hat, one.stderr)
        })?;
        if one.stderr > 0.0 {
            worst_z = worst_z.max(err / one.stderr);
        }
    }
    within(Duration::from_secs(60), started)?;
    Ok(format!(
        "5 configurations within {worst_z:.2} standard errors, identical across workers, {:.1?}",
        started.elapsed()
    ))
}

fn exponent_structure() -> Outcome {
    let mut worst_reduction: f64 = 0.0;
    for (p, d) in dsbs_pair() {
        let info = mutual_information(&d).unwrap();
        let at_zero = theorem1_exponent_rate(&d, 0.0, 0.0).unwrap();
        ensure((at_zero - info / 4.0).abs() <= 1e-9, || {
            format!("p={p}: rate(0) = {at_zero}, I/4 = {}", info / 4.0)
        })?;
        for eps in [0.0, 0.01, 0.05] {
            let rates: Vec<f64> = (0..=20)
                .map(|i| theorem1_exponent_rate(&d, i as f64 / 20.0, eps).unwrap())
                .collect();
            ensure(rates.windows(2).all(|w| w[1] <= w[0] + 1e-15), || {
                format!("p={p} eps={eps}: not non-increasing: {rates:?}")
            })?;
        }
        for n in [10, 40, 100] {
            for m in [0, n / 4, n / 2, n] {
                for eps in [0.0, 0.02] {
                    let sig = BellSignature::pair(n, m).unwrap();
                    let r1 = theorem1_exponent_rate(&d, m as f64 / n as f64, eps).unwrap();
                    let r2 = theorem2_exponent_rate(&d, &sig, eps).unwrap();
                    let b1 = theorem1_bound(n, m, &d, eps).unwrap().explicit_bound;
                    let b2 = theorem2_bound(n, &sig, &d, eps).unwrap().explicit_bound;
                    let diff = (r1 - r2).abs().max((b1 - b2).abs());
                    worst_reduction = worst_reduction.max(diff);
                    ensure(diff <= 1e-12, || format!("p={p} n={n} m={m}: {r1} vs {r2}, {b1} vs {b2}"))?;
                }
            }
        }
        // The single-cycle slack is twice the short-cycle slack at s = 2.
        ensure(
            (information_slack(&d, 0.1, 2.0).unwrap() - 2.0 * information_slack(&d, 0.1, 1.0).unwrap()).abs() < 1e-12,
            || "slack scaling".into(),
        )?;
    }
    Ok(format!(
        "rate non-increasing on 21-point grids, rate(0) = I/4, k=2 reduction within {worst_reduction:.1e}"
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("permutation invariance", invariance),
        ("fixed-point bound soundness", theorem1_soundness),
        ("single-cycle bound soundness", single_cycle_soundness),
        ("short-cycle bound soundness", short_cycle_soundness),
        ("Bell-vector bound soundness", bell_vector_soundness),
        ("counting exactness", counting_exactness),
        ("asymptotic rates", asymptotic_rates),
        ("Monte Carlo calibration", monte_carlo_calibration),
        ("exponent-rate structure", exponent_structure),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
