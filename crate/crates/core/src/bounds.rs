//! Upper bounds on the probability that permuted correlated sequences are jointly typical.
//!
//! Each bound has the shape `min(1, (n+1)^a · 2^(-n·r))` where `r` is the per-symbol
//! exponent and `(n+1)^a` is a type-counting factor that makes the bound hold at every
//! finite `n` (`a = 0` for the single-cycle and short-cycle bounds):
//!
//! | bound | exponent `r` | degree `a` |
//! |---|---|---|
//! | fixed points `m` | `(D(P ‖ (1-α)P_X P_Y + α P) - |X||Y|ε) / 4`, `α = m/n` | `4|X||Y|` |
//! | single n-cycle | `(I(X;Y) - δ) / 2`, `δ = 2ε Σ|log2 P/(P_X P_Y)|` | 0 |
//! | cycles shorter than `s` | `(I(X;Y) - δ) / s`, `δ = ε Σ|log2 P/(P_X P_Y)|` | 0 |
//! | Bell signature | `(D(P ‖ Σ_j (i_j/n) P_{X_{P_j}}) - ε Π|X_l|) / (k(k-1)b_k)` | `k(k-1)b_k Π|X_l|` |

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::dist::{kl_divergence, mixture, mutual_information, JointDistribution};
use crate::error::{Error, Result};
use crate::partitions::{bell_small, enumerate_partitions, BellSignature};
use crate::perm::Permutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// Any permutation with `m` fixed points.
    FixedPoints,
    /// A single `n`-cycle.
    SingleCycle,
    /// A derangement whose cycles are all shorter than `s`.
    ShortCycles,
    /// Any Bell permutation vector with the given signature.
    BellVector,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::FixedPoints => "thm1",
            BoundKind::SingleCycle => "lemma4",
            BoundKind::ShortCycles => "lemma5",
            BoundKind::BellVector => "thm2",
        }
    }
}

/// Inputs echoed next to a bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundParams {
    pub n: usize,
    pub eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signature: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

impl BoundParams {
    fn new(n: usize, eps: f64) -> Self {
        BoundParams {
            n,
            eps,
            m: None,
            alpha: None,
            s: None,
            signature: None,
            delta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub kind: BoundKind,
    /// Per-symbol exponent `r`, bits per symbol.
    pub exponent_rate: f64,
    /// `min(1, (n+1)^a · 2^(-n·r))`.
    pub explicit_bound: f64,
    /// Degree `a` of the type-counting factor.
    pub polynomial_degree: f64,
    /// The bound is the trivial value 1.
    pub vacuous: bool,
    pub params: BoundParams,
}

impl BoundReport {
    fn assemble(kind: BoundKind, rate: f64, degree: f64, params: BoundParams) -> Self {
        let n = params.n as f64;
        let log2_bound = degree * (n + 1.0).log2() - n * rate;
        let explicit_bound = if log2_bound.is_nan() || log2_bound >= 0.0 {
            1.0
        } else {
            log2_bound.exp2()
        };
        BoundReport {
            kind,
            exponent_rate: rate,
            explicit_bound,
            polynomial_degree: degree,
            vacuous: explicit_bound >= 1.0,
            params,
        }
    }

    pub fn log2_polynomial_factor(&self) -> f64 {
        self.polynomial_degree * (self.params.n as f64 + 1.0).log2()
    }

    /// `(n+1)^a`; may be `inf` for large degrees.
    pub fn polynomial_factor(&self) -> f64 {
        self.log2_polynomial_factor().exp2()
    }

    /// Smallest `n` from which `(n+1)^a · 2^(-n·r)` is non-increasing, holding the
    /// exponent fixed. `None` when the exponent is not positive.
    pub fn decreasing_from(&self) -> Option<usize> {
        decreasing_from(self.polynomial_degree, self.exponent_rate)
    }
}

/// `d/dn [a log2(n+1) - n r] <= 0` once `n + 1 >= a / (r ln 2)`.
pub fn decreasing_from(degree: f64, rate: f64) -> Option<usize> {
    if rate.is_nan() || rate <= 0.0 {
        return None;
    }
    let n = (degree / (rate * std::f64::consts::LN_2) - 1.0).ceil();
    Some(n.max(0.0) as usize)
}

fn json_f64(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

impl Serialize for BoundReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("bound", self.kind.name())?;
        map.serialize_entry("exponent_rate_bits", &json_f64(self.exponent_rate))?;
        map.serialize_entry("explicit_bound", &json_f64(self.explicit_bound))?;
        map.serialize_entry("polynomial_factor", &json_f64(self.polynomial_factor()))?;
        map.serialize_entry("log2_polynomial_factor", &json_f64(self.log2_polynomial_factor()))?;
        map.serialize_entry("vacuous", &self.vacuous)?;
        map.serialize_entry("params", &self.params)?;
        map.end()
    }
}

fn check_pair(d: &JointDistribution) -> Result<()> {
    if d.k() != 2 {
        return Err(Error::InvalidArgument(format!(
            "pair bounds need a 2-coordinate distribution, got k={}",
            d.k()
        )));
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "ε must be finite and non-negative, got {eps}"
        )));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(())
}

/// `(D(P_XY ‖ (1-α) P_X P_Y + α P_XY) - |X||Y| ε) / 4`.
pub fn theorem1_exponent_rate(d: &JointDistribution, alpha: f64, eps: f64) -> Result<f64> {
    check_pair(d)?;
    check_eps(eps)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("α={alpha} outside [0,1]")));
    }
    let mix = mixture(&[&d.independent_product(), d], &[1.0 - alpha, alpha])?;
    let cells = d.num_cells() as f64;
    Ok((kl_divergence(d, &mix)? - cells * eps) / 4.0)
}

/// Bound for any permutation of `[1, n]` with `m` fixed points.
pub fn theorem1_bound(n: usize, m: usize, d: &JointDistribution, eps: f64) -> Result<BoundReport> {
    check_n(n)?;
    if m > n {
        return Err(Error::InvalidArgument(format!("m={m} exceeds n={n}")));
    }
    let alpha = m as f64 / n as f64;
    let rate = theorem1_exponent_rate(d, alpha, eps)?;
    let mut params = BoundParams::new(n, eps);
    params.m = Some(m);
    params.alpha = Some(alpha);
    Ok(BoundReport::assemble(
        BoundKind::FixedPoints,
        rate,
        4.0 * d.num_cells() as f64,
        params,
    ))
}

/// `scale · ε · Σ_{x,y} |log2 P_XY(x,y) / (P_X(x) P_Y(y))|`.
///
/// Cells outside the product support carry no mass in either distribution and are
/// skipped. A zero cell inside it makes the sum infinite when `ε > 0`.
pub fn information_slack(d: &JointDistribution, eps: f64, scale: f64) -> Result<f64> {
    check_pair(d)?;
    check_eps(eps)?;
    if eps == 0.0 {
        return Ok(0.0);
    }
    let prod = d.independent_product();
    let mut sum = 0.0;
    for (&p, &q) in d.probs().iter().zip(prod.probs()) {
        if q == 0.0 {
            continue;
        }
        if p == 0.0 {
            return Ok(f64::INFINITY);
        }
        sum += (p / q).log2().abs();
    }
    Ok(scale * sum * eps)
}

/// Bound for a single `n`-cycle: `2^(-(n/2)(I - δ))`.
pub fn lemma4_bound(n: usize, d: &JointDistribution, eps: f64) -> Result<BoundReport> {
    check_n(n)?;
    let delta = information_slack(d, eps, 2.0)?;
    let rate = (mutual_information(d)? - delta) / 2.0;
    let mut params = BoundParams::new(n, eps);
    params.delta = Some(delta);
    Ok(BoundReport::assemble(BoundKind::SingleCycle, rate, 0.0, params))
}

/// Bound for a derangement with every cycle shorter than `s`: `2^(-(n/s)(I - δ))`.
pub fn lemma5_bound(n: usize, s: usize, d: &JointDistribution, eps: f64) -> Result<BoundReport> {
    check_n(n)?;
    if s < 2 {
        return Err(Error::InvalidArgument(format!(
            "s={s}: a derangement has no cycle shorter than 2"
        )));
    }
    let delta = information_slack(d, eps, 1.0)?;
    let rate = (mutual_information(d)? - delta) / s as f64;
    let mut params = BoundParams::new(n, eps);
    params.s = Some(s);
    params.delta = Some(delta);
    Ok(BoundReport::assemble(BoundKind::ShortCycles, rate, 0.0, params))
}

/// A single cycle through all of `[1, n]`.
pub fn lemma4_applies(p: &Permutation) -> bool {
    let ct = p.cycle_type();
    ct.m() == 0 && ct.c() == 1
}

/// No fixed points and every cycle strictly shorter than `s`.
pub fn lemma5_applies(p: &Permutation, s: usize) -> bool {
    p.is_derangement() && p.cycle_type().max_length() < s
}

/// `D(P ‖ Σ_j (i_j/n) P_{X_{P_j}})`.
pub fn bell_divergence(d: &JointDistribution, sig: &BellSignature) -> Result<f64> {
    if sig.k() != d.k() {
        return Err(Error::SizeMismatch {
            expected: d.k(),
            found: sig.k(),
        });
    }
    let partitions = enumerate_partitions(d.k())?;
    let n = sig.n() as f64;
    let products = partitions
        .iter()
        .map(|p| d.product_over_partition(p))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&JointDistribution> = products.iter().collect();
    let weights: Vec<f64> = sig.counts().iter().map(|&i| i as f64 / n).collect();
    kl_divergence(d, &mixture(&refs, &weights)?)
}

/// `(D(P ‖ Σ_j (i_j/n) P_{X_{P_j}}) - ε Π|X_l|) / (k(k-1)b_k)`.
pub fn theorem2_exponent_rate(d: &JointDistribution, sig: &BellSignature, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let k = d.k();
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k={k}: need at least 2 sequences")));
    }
    let scale = (k * (k - 1) * bell_small(k)?) as f64;
    Ok((bell_divergence(d, sig)? - eps * d.num_cells() as f64) / scale)
}

/// Bound for any Bell permutation vector with signature `sig` on `[1, n]`.
pub fn theorem2_bound(
    n: usize,
    sig: &BellSignature,
    d: &JointDistribution,
    eps: f64,
) -> Result<BoundReport> {
    check_n(n)?;
    if sig.n() != n {
        return Err(Error::InvalidSignature(format!(
            "signature {sig} sums to {}, expected n={n}",
            sig.n()
        )));
    }
    let rate = theorem2_exponent_rate(d, sig, eps)?;
    let k = d.k();
    let degree = (k * (k - 1) * bell_small(k)? * d.num_cells()) as f64;
    let mut params = BoundParams::new(n, eps);
    params.signature = Some(sig.to_string());
    Ok(BoundReport::assemble(BoundKind::BellVector, rate, degree, params))
}
