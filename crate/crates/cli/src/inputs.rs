//! Parsing of the textual inputs shared by several subcommands: distributions,
//! permutation specs, numeric grids and experiment config files.

use std::path::{Path, PathBuf};

use permtypical::dist::JointDistribution;
use permtypical::montecarlo::{reference_triple, trial_rng};
use permtypical::perm::CycleTypeSpec;
use permtypical::{Permutation, PermutationVector};
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

/// A distribution given as a shorthand or a JSON file.
///
/// Shorthands: `dsbs:P`, `bernoulli:P`, `uniform:2x3[x..]`, `triple`.
pub fn parse_dist(src: &str) -> Result<JointDistribution, CliError> {
    let (head, arg) = src.split_once(':').unwrap_or((src, ""));
    let num = |a: &str| {
        a.trim()
            .parse::<f64>()
            .map_err(|_| CliError::usage(format!("`{a}` in `{src}` is not a number")))
    };
    let d = match head {
        "dsbs" => JointDistribution::dsbs(num(arg)?)?,
        "bernoulli" => JointDistribution::bernoulli(num(arg)?)?,
        "uniform" => {
            let sizes = arg
                .split('x')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| CliError::usage(format!("`{t}` in `{src}` is not a size")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            JointDistribution::uniform(sizes)?
        }
        "triple" if arg.is_empty() => reference_triple(),
        _ => load_dist_file(Path::new(src))?,
    };
    Ok(d)
}

fn load_dist_file(path: &Path) -> Result<JointDistribution, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::usage(format!(
            "`{}` is neither a distribution shorthand nor a readable file: {e}",
            path.display()
        ))
    })?;
    Ok(JointDistribution::from_json_str(&text)?)
}

/// One permutation as written on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum PermSpec {
    Identity,
    Image(Permutation),
    Cycles(String),
    Standard(CycleTypeSpec),
    Random(CycleTypeSpec),
}

impl PermSpec {
    /// `id`, `image:5 1 4 3 2` (or a bare image), `cycles:(1 2)(3 4 5)`,
    /// `standard:m=2,c=2,lengths=3,2`, `random:m=0,c=1,lengths=5`.
    pub fn parse(s: &str) -> Result<PermSpec, CliError> {
        let s = s.trim();
        let (head, arg) = s.split_once(':').unwrap_or(("", s));
        Ok(match head {
            "" if matches!(arg, "id" | "identity") => PermSpec::Identity,
            "" if arg.starts_with('(') => PermSpec::Cycles(arg.to_string()),
            "" | "image" => PermSpec::Image(Permutation::parse_image(arg)?),
            "cycles" => PermSpec::Cycles(arg.to_string()),
            "standard" => PermSpec::Standard(arg.parse()?),
            "random" => PermSpec::Random(arg.parse()?),
            _ => {
                return Err(CliError::usage(format!(
                    "unknown permutation kind `{head}` in `{s}` (expected image, cycles, standard, random or id)"
                )))
            }
        })
    }

    /// Size implied by the spec itself, if any.
    fn own_size(&self) -> Option<usize> {
        match self {
            PermSpec::Image(p) => Some(p.len()),
            PermSpec::Standard(t) | PermSpec::Random(t) => {
                Some(t.m + t.lengths.iter().sum::<usize>())
            }
            PermSpec::Identity | PermSpec::Cycles(_) => None,
        }
    }

    fn build(&self, n: usize, seed: u64, slot: u64) -> Result<Permutation, CliError> {
        let p = match self {
            PermSpec::Identity => Permutation::identity(n)?,
            PermSpec::Image(p) => p.clone(),
            PermSpec::Cycles(c) => Permutation::parse_cycles(n, c)?,
            PermSpec::Standard(t) => Permutation::standard_ordered(t.m, &t.lengths)?,
            // Streams from the top of the range stay clear of trial streams.
            PermSpec::Random(t) => {
                Permutation::random_with_cycle_type(&t.cycle_type()?, &mut trial_rng(seed, u64::MAX - slot))
            }
        };
        if p.len() != n {
            return Err(CliError::usage(format!(
                "permutation {} has size {}, expected n={n}",
                slot + 1,
                p.len()
            )));
        }
        Ok(p)
    }
}

/// Builds the vector from specs: a single spec `π` means `(identity, π)`.
///
/// `n` comes from `--n`, otherwise from any spec that fixes its own size.
pub fn build_vector(
    specs: &[PermSpec],
    n: Option<usize>,
    k: usize,
    seed: u64,
) -> Result<PermutationVector, CliError> {
    let n = match n.or_else(|| specs.iter().find_map(PermSpec::own_size)) {
        Some(n) => n,
        None => return Err(CliError::usage("cannot infer n from the permutations; pass --n")),
    };
    let padded: Vec<PermSpec> = match specs.len() {
        0 => vec![PermSpec::Identity; k],
        1 if k == 2 => vec![PermSpec::Identity, specs[0].clone()],
        len if len == k => specs.to_vec(),
        len => {
            return Err(CliError::usage(format!(
                "the distribution has k={k} coordinates but {len} permutations were given"
            )))
        }
    };
    let perms = padded
        .iter()
        .enumerate()
        .map(|(slot, spec)| spec.build(n, seed, slot as u64))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PermutationVector::new(perms)?)
}

/// `3`, `1,2,5`, or an inclusive range `3..6` / `3..=6`.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = |t: &str| CliError::usage(format!("`{t}` is not a non-negative integer"));
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((a, b)) = tok.split_once("..") {
            let b = b.trim_start_matches('=');
            let lo: usize = a.trim().parse().map_err(|_| bad(a))?;
            let hi: usize = b.trim().parse().map_err(|_| bad(b))?;
            out.extend(lo..=hi);
        } else {
            out.push(tok.parse().map_err(|_| bad(tok))?);
        }
    }
    if out.is_empty() {
        return Err(CliError::usage(format!("empty list `{s}`")));
    }
    Ok(out)
}

/// Comma-separated reals.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, CliError> {
    let out = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::usage(format!("`{t}` is not a finite number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if out.is_empty() {
        return Err(CliError::usage(format!("empty list `{s}`")));
    }
    Ok(out)
}

/// `simulate --config FILE`. Missing optional fields take the flag defaults.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// A shorthand string or an inline distribution table.
    pub dist: Value,
    #[serde(default)]
    pub perms: Vec<String>,
    pub n: Option<usize>,
    /// A number or an array of numbers.
    pub eps: Value,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Option<String>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn distribution(&self) -> Result<JointDistribution, CliError> {
        match &self.dist {
            Value::String(s) => parse_dist(s),
            table => Ok(JointDistribution::from_json(table)?),
        }
    }

    pub fn eps(&self) -> Result<Vec<f64>, CliError> {
        let bad = || CliError::usage("config `eps` must be a number or an array of numbers");
        match &self.eps {
            Value::Array(items) => items.iter().map(|v| v.as_f64().ok_or_else(bad)).collect(),
            v => Ok(vec![v.as_f64().ok_or_else(bad)?]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists() {
        assert_eq!(parse_usize_list("3").unwrap(), vec![3]);
        assert_eq!(parse_usize_list("1, 4,2").unwrap(), vec![1, 4, 2]);
        assert_eq!(parse_usize_list("3..5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_usize_list("3..=5,9").unwrap(), vec![3, 4, 5, 9]);
        assert!(parse_usize_list("x").is_err());
        assert_eq!(parse_f64_list("0.05,0.1").unwrap(), vec![0.05, 0.1]);
        assert!(parse_f64_list("nan").is_err());
    }

    #[test]
    fn perm_specs() {
        let specs = [
            PermSpec::parse("cycles:(1 2 3)").unwrap(),
            PermSpec::parse("standard:m=1,c=1,lengths=4").unwrap(),
        ];
        let pv = build_vector(&specs, None, 2, 0).unwrap();
        assert_eq!(pv.n(), 5);
        assert_eq!(pv.perms()[0].cycle_notation(false), "(1 2 3)");
        assert_eq!(pv.perms()[1].cycle_notation(true), "(1 2 3 4)(5)");

        let one = [PermSpec::parse("2 1 3").unwrap()];
        let pv = build_vector(&one, None, 2, 0).unwrap();
        assert!(pv.perms()[0].is_identity());

        let r = [PermSpec::parse("random:m=1,c=1,lengths=3").unwrap()];
        let a = build_vector(&r, None, 2, 9).unwrap();
        assert_eq!(a, build_vector(&r, None, 2, 9).unwrap());
        assert_eq!(a.perms()[1].fixed_points().len(), 1);

        assert!(build_vector(&[PermSpec::Identity], None, 2, 0).is_err());
        assert!(PermSpec::parse("bogus:1 2").is_err());
        assert!(PermSpec::parse("1 1 2").is_err());
    }

    #[test]
    fn dist_shorthands() {
        assert_eq!(parse_dist("dsbs:0.1").unwrap(), JointDistribution::dsbs(0.1).unwrap());
        assert_eq!(parse_dist("uniform:2x3").unwrap().num_cells(), 6);
        assert_eq!(parse_dist("triple").unwrap().k(), 3);
        assert!(parse_dist("dsbs:abc").is_err());
        assert!(parse_dist("/nonexistent/file.json").is_err());
    }

    #[test]
    fn config_with_inline_table() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"dist": {"alphabet_sizes": [2, 2], "probs": [[0.4, 0.1], [0.1, 0.4]]},
                "perms": ["cycles:(1 2)"], "n": 4, "eps": 0.1}"#,
        )
        .unwrap();
        assert_eq!(cfg.distribution().unwrap(), JointDistribution::dsbs(0.2).unwrap());
        assert_eq!(cfg.eps().unwrap(), vec![0.1]);
        let bad: ExperimentConfig =
            serde_json::from_str(r#"{"dist": "dsbs:0.1", "eps": "x"}"#).unwrap();
        assert!(bad.eps().is_err());
    }
}
