//! Finite joint distributions over `X_1 × ... × X_k` and the information measures the
//! bounds consume. All logarithms are base 2.
//!
//! Tables are row-major: the last coordinate varies fastest. The JSON form nests arrays
//! in coordinate order:
//!
//! ```json
//! {"alphabet_sizes":[2,2],"probs":[[0.45,0.05],[0.05,0.45]]}
//! ```

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::partitions::SetPartition;

/// Simplex tolerance applied at construction.
pub const SIMPLEX_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    probs: Vec<f64>,
}

fn strides_for(sizes: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; sizes.len()];
    for l in (0..sizes.len().saturating_sub(1)).rev() {
        strides[l] = strides[l + 1] * sizes[l + 1];
    }
    strides
}

fn fmt_cell(coords: &[usize]) -> String {
    let c: Vec<String> = coords.iter().map(usize::to_string).collect();
    format!("({})", c.join(","))
}

impl JointDistribution {
    pub fn new(sizes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidDistribution("no coordinates".into()));
        }
        if let Some(l) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidDistribution(format!(
                "alphabet {} is empty",
                l + 1
            )));
        }
        let cells: usize = sizes.iter().product();
        if probs.len() != cells {
            return Err(Error::InvalidDistribution(format!(
                "{} probabilities for {cells} cells",
                probs.len()
            )));
        }
        let strides = strides_for(&sizes);
        let d = JointDistribution {
            sizes,
            strides,
            probs,
        };
        for (cell, &p) in d.probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "cell {} has invalid probability {p}",
                    fmt_cell(&d.coords(cell))
                )));
            }
        }
        let total: f64 = d.probs.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(d)
    }

    /// Doubly symmetric binary source: uniform marginals, crossover probability `p`.
    pub fn dsbs(p: f64) -> Result<Self> {
        JointDistribution::new(vec![2, 2], vec![(1.0 - p) / 2.0, p / 2.0, p / 2.0, (1.0 - p) / 2.0])
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        JointDistribution::new(vec![2], vec![1.0 - p, p])
    }

    pub fn uniform(sizes: Vec<usize>) -> Result<Self> {
        let cells: usize = sizes.iter().product();
        JointDistribution::new(sizes, vec![1.0 / cells.max(1) as f64; cells])
    }

    pub fn point_mass(sizes: Vec<usize>, at: &[usize]) -> Result<Self> {
        let cells: usize = sizes.iter().product();
        let mut probs = vec![0.0; cells];
        let strides = strides_for(&sizes);
        if at.len() != sizes.len() || at.iter().zip(&sizes).any(|(a, s)| a >= s) {
            return Err(Error::InvalidDistribution(format!(
                "point {} outside the alphabet",
                fmt_cell(at)
            )));
        }
        probs[at.iter().zip(&strides).map(|(a, s)| a * s).sum::<usize>()] = 1.0;
        JointDistribution::new(sizes, probs)
    }

    /// Independent product of the given factors, coordinates concatenated.
    pub fn product(factors: &[&JointDistribution]) -> Result<Self> {
        let mut sizes = Vec::new();
        let mut probs = vec![1.0];
        for f in factors {
            sizes.extend_from_slice(&f.sizes);
            probs = probs
                .iter()
                .flat_map(|&a| f.probs.iter().map(move |&b| a * b))
                .collect();
        }
        JointDistribution::new(sizes, probs)
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn alphabet_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn num_cells(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn coords(&self, mut cell: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|&s| {
                let c = cell / s;
                cell %= s;
                c
            })
            .collect()
    }

    pub fn cell_index(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.strides).map(|(c, s)| c * s).sum()
    }

    pub fn prob(&self, coords: &[usize]) -> f64 {
        self.probs[self.cell_index(coords)]
    }

    fn same_shape(&self, other: &JointDistribution) -> Result<()> {
        if self.sizes != other.sizes {
            return Err(Error::InvalidDistribution(format!(
                "shape {:?} does not match {:?}",
                self.sizes, other.sizes
            )));
        }
        Ok(())
    }

    /// Marginal on the 1-indexed coordinates `coords` (ascending).
    pub fn marginal(&self, coords: &[usize]) -> Result<JointDistribution> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("empty marginal".into()));
        }
        if coords.windows(2).any(|w| w[0] >= w[1]) || coords.iter().any(|&c| c == 0 || c > self.k()) {
            return Err(Error::InvalidArgument(format!(
                "marginal coordinates {coords:?} must be ascending within [1,{}]",
                self.k()
            )));
        }
        let sizes: Vec<usize> = coords.iter().map(|&c| self.sizes[c - 1]).collect();
        let strides = strides_for(&sizes);
        let mut probs = vec![0.0; sizes.iter().product()];
        for (cell, &p) in self.probs.iter().enumerate() {
            let full = self.coords(cell);
            let target: usize = coords
                .iter()
                .zip(&strides)
                .map(|(&c, s)| full[c - 1] * s)
                .sum();
            probs[target] += p;
        }
        Ok(JointDistribution {
            sizes,
            strides,
            probs,
        })
    }

    /// `Π_blocks marginal(block)(x_block)`.
    pub fn product_over_partition(&self, partition: &SetPartition) -> Result<JointDistribution> {
        if partition.k() != self.k() {
            return Err(Error::SizeMismatch {
                expected: self.k(),
                found: partition.k(),
            });
        }
        let blocks = partition.blocks();
        let marginals = blocks
            .iter()
            .map(|b| self.marginal(b))
            .collect::<Result<Vec<_>>>()?;
        let probs = (0..self.num_cells())
            .map(|cell| {
                let full = self.coords(cell);
                blocks
                    .iter()
                    .zip(&marginals)
                    .map(|(block, m)| {
                        let sub: Vec<usize> = block.iter().map(|&c| full[c - 1]).collect();
                        m.prob(&sub)
                    })
                    .product()
            })
            .collect();
        Ok(JointDistribution {
            sizes: self.sizes.clone(),
            strides: self.strides.clone(),
            probs,
        })
    }

    /// Product of the single-coordinate marginals.
    pub fn independent_product(&self) -> JointDistribution {
        let singletons: Vec<Vec<usize>> = (1..=self.k()).map(|l| vec![l]).collect();
        let p = SetPartition::from_blocks(&singletons).expect("singletons partition [1,k]");
        self.product_over_partition(&p)
            .expect("partition matches arity")
    }

    pub fn to_json(&self) -> Value {
        fn nest(probs: &[f64], sizes: &[usize]) -> Value {
            if sizes.len() == 1 {
                return Value::Array(probs.iter().map(|&p| serde_json::json!(p)).collect());
            }
            let chunk = probs.len() / sizes[0];
            Value::Array(probs.chunks(chunk).map(|c| nest(c, &sizes[1..])).collect())
        }
        serde_json::json!({
            "alphabet_sizes": self.sizes,
            "probs": nest(&self.probs, &self.sizes),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidDistribution(msg.to_string());
        let sizes: Vec<usize> = v
            .get("alphabet_sizes")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing `alphabet_sizes` array"))?
            .iter()
            .map(|s| {
                s.as_u64()
                    .map(|x| x as usize)
                    .ok_or_else(|| bad("alphabet sizes must be positive integers"))
            })
            .collect::<Result<_>>()?;
        let nested = v.get("probs").ok_or_else(|| bad("missing `probs`"))?;
        let mut flat = Vec::new();
        fn walk(v: &Value, sizes: &[usize], path: &mut Vec<usize>, out: &mut Vec<f64>) -> Result<()> {
            match sizes.split_first() {
                None => {
                    let p = v.as_f64().ok_or_else(|| {
                        Error::InvalidDistribution(format!(
                            "cell {} is not a number",
                            fmt_cell(path)
                        ))
                    })?;
                    out.push(p);
                    Ok(())
                }
                Some((&len, rest)) => {
                    let arr = v.as_array().filter(|a| a.len() == len).ok_or_else(|| {
                        Error::InvalidDistribution(format!(
                            "expected an array of length {len} at {}",
                            fmt_cell(path)
                        ))
                    })?;
                    for (i, item) in arr.iter().enumerate() {
                        path.push(i);
                        walk(item, rest, path, out)?;
                        path.pop();
                    }
                    Ok(())
                }
            }
        }
        walk(nested, &sizes, &mut Vec::new(), &mut flat)?;
        JointDistribution::new(sizes, flat)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s)
            .map_err(|e| Error::InvalidDistribution(format!("malformed JSON: {e}")))?;
        JointDistribution::from_json(&v)
    }
}

impl Serialize for JointDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for JointDistribution {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        JointDistribution::from_json(&v).map_err(serde::de::Error::custom)
    }
}

/// Convex combination `Σ w_i d_i`.
pub fn mixture(ds: &[&JointDistribution], weights: &[f64]) -> Result<JointDistribution> {
    let first = ds
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
    if ds.len() != weights.len() {
        return Err(Error::InvalidArgument(format!(
            "{} components but {} weights",
            ds.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
        return Err(Error::InvalidArgument("mixture weights must be non-negative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::InvalidArgument(format!(
            "mixture weights sum to {total}, not 1"
        )));
    }
    for d in &ds[1..] {
        first.same_shape(d)?;
    }
    let probs = (0..first.num_cells())
        .map(|c| ds.iter().zip(weights).map(|(d, w)| w * d.probs[c]).sum())
        .collect();
    Ok(JointDistribution {
        sizes: first.sizes.clone(),
        strides: first.strides.clone(),
        probs,
    })
}

/// `D(p || q)` in bits; `+inf` when `p` puts mass where `q` has none.
pub fn kl_divergence(p: &JointDistribution, q: &JointDistribution) -> Result<f64> {
    p.same_shape(q)?;
    let mut d = 0.0;
    for (&a, &b) in p.probs.iter().zip(&q.probs) {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return Ok(f64::INFINITY);
        }
        d += a * (a / b).log2();
    }
    Ok(d.max(0.0))
}

/// `I(X;Y) = D(P_XY || P_X P_Y)` in bits.
pub fn mutual_information(d: &JointDistribution) -> Result<f64> {
    if d.k() != 2 {
        return Err(Error::InvalidArgument(format!(
            "mutual information needs k=2, got k={}",
            d.k()
        )));
    }
    kl_divergence(d, &d.independent_product())
}

pub fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    h(p) + h(1.0 - p)
}
