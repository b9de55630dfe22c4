//! Exact and Monte Carlo probabilities that permuted i.i.d. sequences are jointly typical,
//! and the harness that checks the permutation-invariance equalities and every bound.
//!
//! The experiment: draw `n` i.i.d. columns from `P_{X^k}`, replace row `l` by
//! `apply(π_l, row_l)`, and test ε-typicality of the result.
//!
//! Randomness is counter based: trial `t` of seed `s` always uses the ChaCha8 stream
//! `(s, t)`, so estimates do not depend on scheduling or worker count.

use std::collections::BTreeMap;
use std::io::Write;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{
    lemma4_applies, lemma4_bound, lemma5_applies, lemma5_bound, theorem1_bound, theorem2_bound,
    BoundReport,
};
use crate::dist::JointDistribution;
use crate::error::{Error, Result};
use crate::exec::{CompensatedSum, Execution};
use crate::partitions::{bell_signature, PermutationVector};
use crate::perm::{all_permutations, CycleType, Permutation};
use crate::typicality::{SequenceSample, TypicalSet};

/// Maximum number of weighted outcomes an exact enumeration may visit.
pub const OUTCOME_LIMIT: u64 = 10_000_000;

const TRIAL_BLOCK: u64 = 2048;

/// The ChaCha8 stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `n` i.i.d. columns drawn from `d`; row `l` is the `l`-th coordinate sequence.
pub fn sample_iid<R: Rng + ?Sized>(d: &JointDistribution, n: usize, rng: &mut R) -> SequenceSample {
    let sampler = CellSampler::new(d);
    let cells = sampler.sample(n, rng);
    let rows = (0..d.k())
        .map(|l| {
            cells
                .iter()
                .map(|&c| (c / d.strides()[l]) % d.alphabet_sizes()[l])
                .collect()
        })
        .collect();
    SequenceSample::new(d.alphabet_sizes().to_vec(), rows).expect("sampled symbols are in range")
}

struct CellSampler {
    support: Vec<usize>,
    index: WeightedIndex<f64>,
}

impl CellSampler {
    fn new(d: &JointDistribution) -> Self {
        let support: Vec<usize> = (0..d.num_cells()).filter(|&c| d.probs()[c] > 0.0).collect();
        let index = WeightedIndex::new(support.iter().map(|&c| d.probs()[c]))
            .expect("a validated distribution has positive mass");
        CellSampler { support, index }
    }

    fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        (0..n).map(|_| self.support[self.index.sample(rng)]).collect()
    }
}

/// Typicality test for columns permuted by a permutation vector.
struct PermutedTypicality {
    // contrib[l][cell]: stride-weighted symbol of coordinate l in `cell`
    contrib: Vec<Vec<usize>>,
    // images[l][i] = π_l(i), 0-indexed
    images: Vec<Vec<usize>>,
    windows: Vec<(u64, u64)>,
}

impl PermutedTypicality {
    fn new(d: &JointDistribution, pv: &PermutationVector, eps: f64) -> Result<Self> {
        if pv.k() != d.k() {
            return Err(Error::SizeMismatch {
                expected: d.k(),
                found: pv.k(),
            });
        }
        let contrib = (0..d.k())
            .map(|l| {
                let st = d.strides()[l];
                (0..d.num_cells())
                    .map(|c| ((c / st) % d.alphabet_sizes()[l]) * st)
                    .collect()
            })
            .collect();
        Ok(PermutedTypicality {
            contrib,
            images: pv.perms().iter().map(|p| p.raw_image().to_vec()).collect(),
            windows: TypicalSet::new(d, eps)?.count_windows(pv.n() as u64),
        })
    }

    /// `columns` are the raw i.i.d. cells; `counts` is scratch of length `num_cells`.
    fn is_typical(&self, columns: &[usize], counts: &mut [u64]) -> bool {
        counts.iter_mut().for_each(|c| *c = 0);
        for i in 0..columns.len() {
            let cell: usize = self
                .contrib
                .iter()
                .zip(&self.images)
                .map(|(contrib, image)| contrib[columns[image[i]]])
                .sum();
            counts[cell] += 1;
        }
        counts
            .iter()
            .zip(&self.windows)
            .all(|(&c, &(lo, hi))| lo <= c && c <= hi)
    }
}

fn outcome_count(support: usize, n: usize) -> Option<u64> {
    let mut total: u64 = 1;
    for _ in 0..n {
        total = total.checked_mul(support as u64)?;
        if total > OUTCOME_LIMIT {
            return None;
        }
    }
    Some(total)
}

pub fn exact_is_feasible(d: &JointDistribution, n: usize) -> bool {
    let support = d.probs().iter().filter(|&&p| p > 0.0).count();
    outcome_count(support, n).is_some()
}

fn check_n(pv: &PermutationVector, n: usize) -> Result<()> {
    if pv.n() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: pv.n(),
        });
    }
    Ok(())
}

/// Exact probability by enumerating every outcome in the support of `d^n`.
pub fn exact_typicality_prob(
    d: &JointDistribution,
    pv: &PermutationVector,
    n: usize,
    eps: f64,
) -> Result<f64> {
    exact_typicality_prob_with(d, pv, n, eps, Execution::default())
}

pub fn exact_typicality_prob_with(
    d: &JointDistribution,
    pv: &PermutationVector,
    n: usize,
    eps: f64,
    exec: Execution,
) -> Result<f64> {
    check_n(pv, n)?;
    let test = PermutedTypicality::new(d, pv, eps)?;
    let support: Vec<usize> = (0..d.num_cells()).filter(|&c| d.probs()[c] > 0.0).collect();
    let s = support.len();
    if outcome_count(s, n).is_none() {
        return Err(Error::Infeasible {
            what: "exact typicality enumeration",
            needed: format!("{s}^{n}"),
            limit: OUTCOME_LIMIT,
        });
    }
    let prefix = n.min(2);
    let chunks = s.pow(prefix as u32);
    let probs = d.probs();

    let parts = exec.map_chunks(chunks, |chunk| {
        let mut digits = vec![0usize; n];
        let mut rest = chunk;
        for i in (0..prefix).rev() {
            digits[i] = rest % s;
            rest /= s;
        }
        let mut columns: Vec<usize> = digits.iter().map(|&j| support[j]).collect();
        let mut counts = vec![0u64; d.num_cells()];
        let mut sum = CompensatedSum::default();
        let (mut typical, mut atypical) = (0u64, 0u64);
        loop {
            let p: f64 = columns.iter().map(|&c| probs[c]).product();
            if test.is_typical(&columns, &mut counts) {
                sum.add(p);
                typical += 1;
            } else {
                atypical += 1;
            }
            // odometer over positions prefix..n, last position fastest
            let mut pos = n;
            loop {
                if pos == prefix {
                    return (sum, typical, atypical);
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < s {
                    columns[pos] = support[digits[pos]];
                    break;
                }
                digits[pos] = 0;
                columns[pos] = support[0];
            }
        }
    });

    let mut total = CompensatedSum::default();
    let (mut typical, mut atypical) = (0u64, 0u64);
    for (part, t, a) in &parts {
        total.merge(part);
        typical += t;
        atypical += a;
    }
    Ok(if atypical == 0 {
        1.0
    } else if typical == 0 {
        0.0
    } else {
        total.value().clamp(0.0, 1.0)
    })
}

/// One Monte Carlo experiment.
#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub distribution: JointDistribution,
    pub permutations: PermutationVector,
    pub n: usize,
    pub eps: f64,
    pub trials: u64,
    pub seed: u64,
}

impl TrialConfig {
    pub fn new(
        distribution: JointDistribution,
        permutations: PermutationVector,
        eps: f64,
        trials: u64,
        seed: u64,
    ) -> Result<Self> {
        if permutations.k() != distribution.k() {
            return Err(Error::SizeMismatch {
                expected: distribution.k(),
                found: permutations.k(),
            });
        }
        if trials == 0 {
            return Err(Error::InvalidArgument("trials must be positive".into()));
        }
        Ok(TrialConfig {
            n: permutations.n(),
            distribution,
            permutations,
            eps,
            trials,
            seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub p_hat: f64,
    pub stderr: f64,
    pub trials: u64,
    pub typical: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundReport>,
}

impl EstimateReport {
    fn from_counts(typical: u64, trials: u64) -> Self {
        let p = typical as f64 / trials as f64;
        EstimateReport {
            p_hat: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
            typical,
            exact: None,
            bound: None,
        }
    }
}

/// Fraction of typical trials; trial `t` draws from [`trial_rng`]`(seed, t)`.
pub fn estimate_typicality_prob(cfg: &TrialConfig, exec: Execution) -> Result<EstimateReport> {
    if cfg.trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    check_n(&cfg.permutations, cfg.n)?;
    let test = PermutedTypicality::new(&cfg.distribution, &cfg.permutations, cfg.eps)?;
    let sampler = CellSampler::new(&cfg.distribution);
    let blocks = cfg.trials.div_ceil(TRIAL_BLOCK);
    let counts = exec.map_chunks(blocks as usize, |b| {
        let start = b as u64 * TRIAL_BLOCK;
        let end = (start + TRIAL_BLOCK).min(cfg.trials);
        let mut scratch = vec![0u64; cfg.distribution.num_cells()];
        (start..end)
            .filter(|&t| {
                let columns = sampler.sample(cfg.n, &mut trial_rng(cfg.seed, t));
                test.is_typical(&columns, &mut scratch)
            })
            .count() as u64
    });
    Ok(EstimateReport::from_counts(counts.iter().sum(), cfg.trials))
}

/// The bound that governs a permutation vector: fixed points for pairs, Bell signature otherwise.
pub fn governing_bound(d: &JointDistribution, pv: &PermutationVector, eps: f64) -> Result<BoundReport> {
    if pv.k() == 2 {
        let rel = pv.perms()[0].inverse().compose(&pv.perms()[1])?;
        theorem1_bound(pv.n(), rel.fixed_points().len(), d, eps)
    } else {
        theorem2_bound(pv.n(), &bell_signature(pv)?, d, eps)
    }
}

/// Monte Carlo estimate plus the exact value when enumeration is feasible and the
/// governing bound.
pub fn evaluate(cfg: &TrialConfig, exec: Execution) -> Result<EstimateReport> {
    let mut report = estimate_typicality_prob(cfg, exec)?;
    if exact_is_feasible(&cfg.distribution, cfg.n) {
        report.exact = Some(exact_typicality_prob_with(
            &cfg.distribution,
            &cfg.permutations,
            cfg.n,
            cfg.eps,
            exec,
        )?);
    }
    if cfg.distribution.k() >= 2 {
        report.bound = Some(governing_bound(&cfg.distribution, &cfg.permutations, cfg.eps)?);
    }
    Ok(report)
}

/// Result of [`typicality_prob_auto`].
#[derive(Debug, Clone, PartialEq)]
pub enum Routed {
    Exact(f64),
    Estimated(EstimateReport),
}

impl Routed {
    pub fn value(&self) -> f64 {
        match self {
            Routed::Exact(p) => *p,
            Routed::Estimated(r) => r.p_hat,
        }
    }

    /// Set when enumeration was skipped.
    pub fn notice(&self) -> Option<String> {
        match self {
            Routed::Exact(_) => None,
            Routed::Estimated(r) => Some(format!(
                "exact enumeration exceeds {OUTCOME_LIMIT} outcomes; estimated from {} trials",
                r.trials
            )),
        }
    }
}

/// Exact enumeration when within [`OUTCOME_LIMIT`], Monte Carlo otherwise.
pub fn typicality_prob_auto(cfg: &TrialConfig, exec: Execution) -> Result<Routed> {
    if exact_is_feasible(&cfg.distribution, cfg.n) {
        exact_typicality_prob_with(&cfg.distribution, &cfg.permutations, cfg.n, cfg.eps, exec)
            .map(Routed::Exact)
    } else {
        estimate_typicality_prob(cfg, exec).map(Routed::Estimated)
    }
}

/// Per-cycle-type summary from the exhaustive check.
#[derive(Debug, Clone, Serialize)]
pub struct ClassSummary {
    pub cycle_type: String,
    pub members: usize,
    pub standard_prob: f64,
    pub min_prob: f64,
    pub max_prob: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Prop1Report {
    pub n: usize,
    pub eps: f64,
    /// `max_σ |P((σX, σY) typical) - P((X, Y) typical)|`.
    pub same_permutation_discrepancy: f64,
    /// `max_π |P((X, πY) typical) - P((X, π_std Y) typical)|` over all of `S_n`.
    pub cycle_type_discrepancy: f64,
    /// `max |P((π_x X, π_y Y) typical) - P((X, π Y) typical)|`, `π` standard for `π_x^{-1}∘π_y`.
    pub relative_discrepancy: f64,
    pub sigmas_checked: usize,
    pub pairs_checked: usize,
    pub classes: Vec<ClassSummary>,
}

impl Prop1Report {
    pub fn max_discrepancy(&self) -> f64 {
        self.same_permutation_discrepancy
            .max(self.cycle_type_discrepancy)
            .max(self.relative_discrepancy)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_discrepancy() <= tol
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Prop1Options {
    /// Exhaustive when the candidate set is at most this large, sampled otherwise.
    pub max_checks: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for Prop1Options {
    fn default() -> Self {
        Prop1Options {
            max_checks: 20_000,
            seed: 0,
            exec: Execution::default(),
        }
    }
}

/// Checks the three permutation-invariance equalities by exact enumeration on a pair
/// distribution.
pub fn verify_proposition1(
    d: &JointDistribution,
    n: usize,
    eps: f64,
    opts: Prop1Options,
) -> Result<Prop1Report> {
    if d.k() != 2 {
        return Err(Error::InvalidArgument("needs a pair distribution".into()));
    }
    if !exact_is_feasible(d, n) {
        return Err(Error::Infeasible {
            what: "permutation-invariance check",
            needed: format!("{}^{n}", d.num_cells()),
            limit: OUTCOME_LIMIT,
        });
    }
    let exact = |a: &Permutation, b: &Permutation| {
        let pv = PermutationVector::new(vec![a.clone(), b.clone()])?;
        exact_typicality_prob_with(d, &pv, n, eps, Execution::Sequential)
    };
    let id = Permutation::identity(n)?;
    let perms: Vec<Permutation> = all_permutations(n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut standard_prob = BTreeMap::new();
    for ct in crate::perm::all_cycle_types(n) {
        let p = exact(&id, &Permutation::standard(&ct))?;
        standard_prob.insert(ct, p);
    }

    // (ii) every permutation against its class representative
    let class_probs = opts
        .exec
        .map_chunks(perms.len(), |j| exact(&id, &perms[j]).map(|p| (perms[j].cycle_type(), p)));
    let mut classes: BTreeMap<CycleType, (usize, f64, f64)> = BTreeMap::new();
    let mut cycle_type_discrepancy: f64 = 0.0;
    for r in class_probs {
        let (ct, p) = r?;
        cycle_type_discrepancy = cycle_type_discrepancy.max((p - standard_prob[&ct]).abs());
        let e = classes.entry(ct).or_insert((0, f64::INFINITY, f64::NEG_INFINITY));
        e.0 += 1;
        e.1 = e.1.min(p);
        e.2 = e.2.max(p);
    }

    // (i) the same permutation on both rows
    let sigmas: Vec<Permutation> = if perms.len() <= opts.max_checks {
        perms.clone()
    } else {
        (0..opts.max_checks).map(|_| Permutation::random(n, &mut rng)).collect()
    };
    let base = standard_prob[&id.cycle_type()];
    let same = opts
        .exec
        .map_chunks(sigmas.len(), |j| exact(&sigmas[j], &sigmas[j]));
    let mut same_permutation_discrepancy: f64 = 0.0;
    for p in same {
        same_permutation_discrepancy = same_permutation_discrepancy.max((p? - base).abs());
    }

    // (iii) arbitrary pairs against the standard permutation of π_x^{-1}∘π_y
    let total_pairs = perms.len().saturating_mul(perms.len());
    let pairs: Vec<(Permutation, Permutation)> = if total_pairs <= opts.max_checks {
        perms
            .iter()
            .flat_map(|a| perms.iter().map(move |b| (a.clone(), b.clone())))
            .collect()
    } else {
        (0..opts.max_checks)
            .map(|_| (Permutation::random(n, &mut rng), Permutation::random(n, &mut rng)))
            .collect()
    };
    let rel = opts.exec.map_chunks(pairs.len(), |j| {
        let (px, py) = &pairs[j];
        let ct = px.inverse().compose(py)?.cycle_type();
        Ok::<_, Error>((exact(px, py)? - standard_prob[&ct]).abs())
    });
    let mut relative_discrepancy: f64 = 0.0;
    for r in rel {
        relative_discrepancy = relative_discrepancy.max(r?);
    }

    Ok(Prop1Report {
        n,
        eps,
        same_permutation_discrepancy,
        cycle_type_discrepancy,
        relative_discrepancy,
        sigmas_checked: sigmas.len(),
        pairs_checked: pairs.len(),
        classes: classes
            .into_iter()
            .map(|(ct, (members, min_prob, max_prob))| ClassSummary {
                cycle_type: ct.to_string(),
                members,
                standard_prob: standard_prob[&ct],
                min_prob,
                max_prob,
            })
            .collect(),
    })
}

/// Which bound a sweep case is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundFamily {
    Theorem1,
    Lemma4,
    Lemma5 { s: usize },
    Theorem2,
}

impl BoundFamily {
    pub fn label(&self) -> String {
        match self {
            BoundFamily::Theorem1 => "thm1".into(),
            BoundFamily::Lemma4 => "lemma4".into(),
            BoundFamily::Lemma5 { s } => format!("lemma5-s{s}"),
            BoundFamily::Theorem2 => "thm2".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepCase {
    pub family: BoundFamily,
    pub dist_name: String,
    pub distribution: JointDistribution,
    pub permutations: PermutationVector,
    pub eps: f64,
}

impl SweepCase {
    /// For pair families the relevant permutation is `π_1^{-1}∘π_2`.
    fn relative(&self) -> Result<Permutation> {
        let p = self.permutations.perms();
        p[0].inverse().compose(&p[1])
    }

    pub fn bound(&self) -> Result<BoundReport> {
        let n = self.permutations.n();
        let d = &self.distribution;
        let pair_only = |name: &str| {
            if self.permutations.k() != 2 {
                return Err(Error::InvalidArgument(format!("{name} needs k=2")));
            }
            Ok(())
        };
        match self.family {
            BoundFamily::Theorem1 => {
                pair_only("thm1")?;
                theorem1_bound(n, self.relative()?.fixed_points().len(), d, self.eps)
            }
            BoundFamily::Lemma4 => {
                pair_only("lemma4")?;
                if !lemma4_applies(&self.relative()?) {
                    return Err(Error::InvalidArgument(
                        "lemma4 needs a single cycle through every index".into(),
                    ));
                }
                lemma4_bound(n, d, self.eps)
            }
            BoundFamily::Lemma5 { s } => {
                pair_only("lemma5")?;
                if !lemma5_applies(&self.relative()?, s) {
                    return Err(Error::InvalidArgument(format!(
                        "lemma5 needs a derangement with all cycles shorter than {s}"
                    )));
                }
                lemma5_bound(n, s, d, self.eps)
            }
            BoundFamily::Theorem2 => {
                theorem2_bound(n, &bell_signature(&self.permutations)?, d, self.eps)
            }
        }
    }

    fn m_or_signature(&self) -> Result<String> {
        Ok(match self.family {
            BoundFamily::Theorem2 => bell_signature(&self.permutations)?.to_string(),
            _ => self.relative()?.fixed_points().len().to_string(),
        })
    }
}

/// A list of cases plus the Monte Carlo fallback for cases too large to enumerate.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub cases: Vec<SweepCase>,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub config_id: String,
    pub n: usize,
    pub m_or_signature: String,
    pub epsilon: f64,
    pub exact: Option<f64>,
    pub p_hat: Option<f64>,
    pub stderr: Option<f64>,
    pub bound: f64,
    /// `bound - exact`, or `bound - (p_hat + 3·stderr)` without an exact value.
    pub margin: f64,
}

impl SweepRow {
    pub fn violated(&self) -> bool {
        self.margin < 0.0
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

pub const SWEEP_CSV_VERSION: &str = "# permtypical-sweep v1";

impl SweepReport {
    pub fn violations(&self) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.violated()).collect()
    }

    pub fn min_margin(&self) -> f64 {
        self.rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{SWEEP_CSV_VERSION}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "config_id",
            "n",
            "m_or_signature",
            "epsilon",
            "exact",
            "p_hat",
            "stderr",
            "bound",
            "margin",
        ])?;
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.config_id.clone(),
                r.n.to_string(),
                r.m_or_signature.clone(),
                r.epsilon.to_string(),
                opt(r.exact),
                opt(r.p_hat),
                opt(r.stderr),
                r.bound.to_string(),
                r.margin.to_string(),
            ])?;
        }
        w.flush()
    }
}

/// Evaluates every case; rows come back in case order.
pub fn verify_bounds(sweep: &Sweep, exec: Execution) -> Result<SweepReport> {
    let rows = exec.map_chunks(sweep.cases.len(), |j| {
        let case = &sweep.cases[j];
        let n = case.permutations.n();
        let bound = case.bound()?.explicit_bound;
        let (exact, p_hat, stderr, observed) = if exact_is_feasible(&case.distribution, n) {
            let e = exact_typicality_prob_with(
                &case.distribution,
                &case.permutations,
                n,
                case.eps,
                Execution::Sequential,
            )?;
            (Some(e), None, None, e)
        } else {
            let cfg = TrialConfig::new(
                case.distribution.clone(),
                case.permutations.clone(),
                case.eps,
                sweep.trials,
                sweep.seed.wrapping_add(j as u64),
            )?;
            let r = estimate_typicality_prob(&cfg, Execution::Sequential)?;
            (None, Some(r.p_hat), Some(r.stderr), r.p_hat + 3.0 * r.stderr)
        };
        Ok::<_, Error>(SweepRow {
            config_id: format!("{}/{}/n{}/{}", case.family.label(), case.dist_name, n, j),
            n,
            m_or_signature: case.m_or_signature()?,
            epsilon: case.eps,
            exact,
            p_hat,
            stderr,
            bound,
            margin: bound - observed,
        })
    });
    Ok(SweepReport {
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}

/// Full-support correlated binary triple used by the collection sweeps.
pub fn reference_triple() -> JointDistribution {
    JointDistribution::new(vec![2, 2, 2], vec![0.2, 0.05, 0.05, 0.1, 0.1, 0.05, 0.05, 0.4])
        .expect("valid table")
}

fn pair_dists() -> Vec<(String, JointDistribution)> {
    [0.1, 0.2]
        .iter()
        .map(|&p| (format!("dsbs{p}"), JointDistribution::dsbs(p).expect("valid crossover")))
        .collect()
}

impl Sweep {
    fn pair_cases(
        family: BoundFamily,
        ns: &[usize],
        eps: &[f64],
        keep: impl Fn(&Permutation) -> bool,
    ) -> Vec<SweepCase> {
        let mut cases = Vec::new();
        for (name, d) in pair_dists() {
            for &n in ns {
                for q in all_permutations(n).filter(|q| keep(q)) {
                    for &e in eps {
                        cases.push(SweepCase {
                            family,
                            dist_name: name.clone(),
                            distribution: d.clone(),
                            permutations: PermutationVector::pair(q.clone()),
                            eps: e,
                        });
                    }
                }
            }
        }
        cases
    }

    /// Every permutation of `[1, n]`, `n <= 5`, both binary sources.
    pub fn theorem1_default() -> Sweep {
        Sweep {
            cases: Sweep::pair_cases(BoundFamily::Theorem1, &[1, 2, 3, 4, 5], &[0.05, 0.1], |_| true),
            trials: 10_000,
            seed: 1,
        }
    }

    /// Every single `n`-cycle, `n ∈ {4, 5, 6}`.
    pub fn lemma4_default() -> Sweep {
        Sweep {
            cases: Sweep::pair_cases(BoundFamily::Lemma4, &[4, 5, 6], &[0.0, 0.1], lemma4_applies),
            trials: 10_000,
            seed: 2,
        }
    }

    /// Every derangement with cycles shorter than `s`, `n ∈ {4, 6}`, `s ∈ {3, 4}`.
    pub fn lemma5_default() -> Sweep {
        let mut cases = Vec::new();
        for s in [3, 4] {
            cases.extend(Sweep::pair_cases(
                BoundFamily::Lemma5 { s },
                &[4, 6],
                &[0.0, 0.05, 0.1],
                |q| lemma5_applies(q, s),
            ));
        }
        Sweep {
            cases,
            trials: 10_000,
            seed: 3,
        }
    }

    /// Every `(identity, π_2, π_3)` on `[1, 4]` for the reference triple.
    pub fn theorem2_default() -> Sweep {
        let d = reference_triple();
        let id = Permutation::identity(4).expect("n = 4");
        let perms: Vec<Permutation> = all_permutations(4).collect();
        let mut cases = Vec::new();
        for a in &perms {
            for b in &perms {
                for eps in [0.05, 0.1, 0.15, 0.25] {
                    cases.push(SweepCase {
                        family: BoundFamily::Theorem2,
                        dist_name: "triple".into(),
                        distribution: d.clone(),
                        permutations: PermutationVector::new(vec![id.clone(), a.clone(), b.clone()])
                            .expect("equal sizes"),
                        eps,
                    });
                }
            }
        }
        Sweep {
            cases,
            trials: 10_000,
            seed: 4,
        }
    }

    pub fn default_suite() -> Sweep {
        let mut cases = Vec::new();
        for s in [
            Sweep::theorem1_default(),
            Sweep::lemma4_default(),
            Sweep::lemma5_default(),
            Sweep::theorem2_default(),
        ] {
            cases.extend(s.cases);
        }
        Sweep {
            cases,
            trials: 10_000,
            seed: 0,
        }
    }
}
