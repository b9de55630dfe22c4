use std::path::Path;

use clap::ValueEnum;
use permtypical::bounds::{
    lemma4_bound, lemma5_bound, theorem1_bound, theorem2_bound, BoundReport,
};
use permtypical::counting::{
    bell_count_bounds, bell_rate_limit, fixed_point_count_bounds, kfold_bounds,
    normalized_log_bell_count, normalized_log_fixed_count, CountBounds,
};
use permtypical::dist::JointDistribution;
use permtypical::montecarlo::{
    evaluate, exact_is_feasible, verify_bounds, verify_proposition1, Prop1Options, Sweep,
    TrialConfig, OUTCOME_LIMIT,
};
use permtypical::perm::CycleTypeSpec;
use permtypical::{BellSignature, Execution, Permutation};
use serde_json::{json, Value};

use crate::inputs::{self, build_vector, parse_dist, parse_f64_list, parse_usize_list, PermSpec};
use crate::output::{emit, table, Records};
use crate::{
    BoundCommand, CliError, Command, CountCommand, CountOutput, PermCommand,
    SimulateArgs, VerifyCommand,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Every family below.
    Default,
    Thm1,
    Lemma4,
    Lemma5,
    Thm2,
}

pub fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Perm(c) => perm(c),
        Command::Count(c) => count(c),
        Command::Bound(c) => bound(c),
        Command::Simulate(a) => simulate(a),
        Command::Verify(c) => verify(c),
    }
}

/// JSON number, or null for non-finite values.
fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn execution(workers: usize) -> Execution {
    if workers == 0 {
        Execution::default()
    } else {
        Execution::with_workers(workers)
    }
}

fn perm(cmd: PermCommand) -> Result<(), CliError> {
    let (p, json) = match cmd {
        PermCommand::Decompose {
            image,
            cycles,
            n,
            json,
        } => {
            let p = match (image, cycles) {
                (Some(img), _) => Permutation::parse_image(&img)?,
                (None, Some(c)) => {
                    let n = match n {
                        Some(n) => n,
                        None => c
                            .split(|ch: char| !ch.is_ascii_digit())
                            .filter_map(|t| t.parse::<usize>().ok())
                            .max()
                            .unwrap_or(0),
                    };
                    Permutation::parse_cycles(n, &c)?
                }
                (None, None) => return Err(CliError::usage("pass --image or --cycles")),
            };
            (p, json)
        }
        PermCommand::Standard { cycle_type, json } => {
            let spec: CycleTypeSpec = cycle_type.parse()?;
            let p = Permutation::standard_ordered(spec.m, &spec.lengths)?;
            if !json {
                return emit(&format!("{}\n", p.cycle_notation(true)), None);
            }
            (p, json)
        }
    };
    let ct = p.cycle_type();
    let fixed = p.fixed_points();
    let text = if json {
        let v = json!({
            "image": p.image(),
            "cycles": p.cycle_notation(false),
            "standard_form": p.cycle_notation(true),
            "cycle_type": ct.to_string(),
            "m": ct.m(),
            "lengths": ct.lengths(),
            "fixed_points": fixed,
            "derangement": p.is_derangement(),
        });
        format!("{}\n", serde_json::to_string_pretty(&v).expect("serializable"))
    } else if p.is_identity() {
        format!("identity; m={}\n", p.len())
    } else {
        let fixed_text = if fixed.is_empty() {
            "none".to_string()
        } else {
            fixed.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
        };
        format!(
            "cycles: {}\ntype: {}\nfixed points: {}\nderangement: {}\n",
            p.cycle_notation(false),
            ct,
            fixed_text,
            if p.is_derangement() { "yes" } else { "no" }
        )
    };
    emit(&text, None)
}

fn count_fields(b: &CountBounds) -> Vec<Value> {
    let v = serde_json::to_value(b).expect("serializable");
    vec![
        v["lower"].clone(),
        v.get("exact").cloned().unwrap_or(Value::Null),
        v["upper"].clone(),
    ]
}

fn count(cmd: CountCommand) -> Result<(), CliError> {
    let (records, out) = match cmd {
        CountCommand::Fixed { n, m, out } => {
            let mut cols = vec!["n", "m", "lower", "exact", "upper"];
            if out.rates {
                cols.extend(["rate", "rate_limit"]);
            }
            let mut rec = Records::new("count-fixed", cols);
            for n in parse_usize_list(&n)? {
                let ms = match &m {
                    Some(m) => parse_usize_list(m)?,
                    None => (0..=n).collect(),
                };
                for m in ms {
                    fixed_row(&mut rec, n, m, out.rates)?;
                }
            }
            (rec, out)
        }
        CountCommand::Derangements { n, out } => {
            let mut cols = vec!["n", "m", "lower", "exact", "upper"];
            if out.rates {
                cols.extend(["rate", "rate_limit"]);
            }
            let mut rec = Records::new("count-fixed", cols);
            for n in parse_usize_list(&n)? {
                fixed_row(&mut rec, n, 0, out.rates)?;
            }
            (rec, out)
        }
        CountCommand::Kfold { n, k, out } => {
            let mut rec = Records::new("count-kfold", vec!["n", "k", "lower", "exact", "upper"]);
            for n in parse_usize_list(&n)? {
                let b = kfold_bounds(n, k)?;
                let mut row = vec![json!(n), json!(k)];
                row.extend(count_fields(&b));
                rec.push(row);
            }
            (rec, out)
        }
        CountCommand::Bell { n, k, sig, out } => {
            let sig = BellSignature::parse(&sig, Some(k))?;
            if sig.n() != n {
                return Err(CliError::usage(format!(
                    "signature {sig} sums to {}, not n={n}",
                    sig.n()
                )));
            }
            let mut cols = vec!["n", "k", "signature", "lower", "exact", "upper"];
            if out.rates {
                cols.extend(["rate", "rate_lower", "rate_upper", "rate_limit"]);
            }
            let mut rec = Records::new("count-bell", cols);
            let b = bell_count_bounds(n, k, &sig)?;
            let mut row = vec![json!(n), json!(k), json!(sig.to_string())];
            row.extend(count_fields(&b));
            if out.rates {
                let r = normalized_log_bell_count(n, k, &sig)?;
                row.extend([
                    r.exact.map_or(Value::Null, num),
                    num(r.lower),
                    num(r.upper),
                    num(bell_rate_limit(&sig)?),
                ]);
            }
            rec.push(row);
            (rec, out)
        }
    };
    finish(&records, &out)
}

fn finish(records: &Records, out: &CountOutput) -> Result<(), CliError> {
    emit(&records.render(out.format)?, out.output.as_deref())
}

fn fixed_row(rec: &mut Records, n: usize, m: usize, rates: bool) -> Result<(), CliError> {
    let b = fixed_point_count_bounds(n, m)?;
    let mut row = vec![json!(n), json!(m)];
    row.extend(count_fields(&b));
    if rates {
        row.push(num(normalized_log_fixed_count(n, m)?));
        row.push(num(1.0 - m as f64 / n as f64));
    }
    rec.push(row);
    Ok(())
}

const BOUND_COLUMNS: [&str; 13] = [
    "bound",
    "n",
    "m",
    "s",
    "signature",
    "eps",
    "alpha",
    "delta",
    "exponent_rate_bits",
    "polynomial_degree",
    "log2_polynomial_factor",
    "explicit_bound",
    "vacuous",
];

fn bound_row(r: &BoundReport) -> Vec<Value> {
    let p = &r.params;
    let opt = |x: Option<Value>| x.unwrap_or(Value::Null);
    vec![
        json!(r.kind.name()),
        json!(p.n),
        opt(p.m.map(|m| json!(m))),
        opt(p.s.map(|s| json!(s))),
        opt(p.signature.clone().map(Value::String)),
        num(p.eps),
        opt(p.alpha.map(num)),
        opt(p.delta.map(num)),
        num(r.exponent_rate),
        num(r.polynomial_degree),
        num(r.log2_polynomial_factor()),
        num(r.explicit_bound),
        json!(r.vacuous),
    ]
}

fn bound(cmd: BoundCommand) -> Result<(), CliError> {
    let grid = match &cmd {
        BoundCommand::Thm1 { grid, .. }
        | BoundCommand::Lemma4 { grid }
        | BoundCommand::Lemma5 { grid, .. }
        | BoundCommand::Thm2 { grid, .. } => grid,
    };
    let d = parse_dist(&grid.dist)?;
    let eps = parse_f64_list(&grid.eps)?;
    let ns = || parse_usize_list(grid.n.as_deref().unwrap_or("100"));
    let mut reports = Vec::new();
    match &cmd {
        BoundCommand::Thm1 { m, .. } => {
            let ms = parse_usize_list(m)?;
            for n in ns()? {
                for &m in &ms {
                    for &e in &eps {
                        reports.push(theorem1_bound(n, m, &d, e)?);
                    }
                }
            }
        }
        BoundCommand::Lemma4 { .. } => {
            for n in ns()? {
                for &e in &eps {
                    reports.push(lemma4_bound(n, &d, e)?);
                }
            }
        }
        BoundCommand::Lemma5 { s, .. } => {
            for n in ns()? {
                for &e in &eps {
                    reports.push(lemma5_bound(n, *s, &d, e)?);
                }
            }
        }
        BoundCommand::Thm2 { k, sig, m, grid } => {
            if let Some(k) = k {
                if *k != d.k() {
                    return Err(CliError::usage(format!(
                        "--k {k} does not match the distribution arity {}",
                        d.k()
                    )));
                }
            }
            let sigs = match (sig, m) {
                (Some(s), _) => {
                    let sig = BellSignature::parse(s, Some(d.k()))?;
                    if let Some(n) = &grid.n {
                        if parse_usize_list(n)? != [sig.n()] {
                            return Err(CliError::usage(format!(
                                "--n {n} disagrees with the signature total {}",
                                sig.n()
                            )));
                        }
                    }
                    vec![sig]
                }
                (None, Some(m)) => {
                    if d.k() != 2 {
                        return Err(CliError::usage("--m describes a signature only for k=2"));
                    }
                    let ms = parse_usize_list(m)?;
                    let mut v = Vec::new();
                    for n in ns()? {
                        for &m in &ms {
                            v.push(BellSignature::pair(n, m)?);
                        }
                    }
                    v
                }
                (None, None) => return Err(CliError::usage("pass --sig or --m")),
            };
            for sig in &sigs {
                for &e in &eps {
                    reports.push(theorem2_bound(sig.n(), sig, &d, e)?);
                }
            }
        }
    }
    let mut rec = Records::new("bound", BOUND_COLUMNS.to_vec());
    for r in &reports {
        rec.push(bound_row(r));
    }
    emit(&rec.render(grid.format)?, grid.output.as_deref())
}

fn simulate(a: SimulateArgs) -> Result<(), CliError> {
    let exec = execution(a.workers);
    let (d, perm_specs, n, eps, trials, seed, format, output) = match &a.config {
        Some(path) => {
            let cfg = inputs::ExperimentConfig::load(path)?;
            let format = match &cfg.format {
                Some(f) => f.parse()?,
                None => a.format,
            };
            (
                cfg.distribution()?,
                cfg.perms.clone(),
                cfg.n,
                cfg.eps()?,
                cfg.trials.unwrap_or(100_000),
                cfg.seed.unwrap_or(0),
                format,
                cfg.output.clone().or(a.output.clone()),
            )
        }
        None => (
            parse_dist(&a.dist)?,
            a.perm.clone(),
            a.n,
            parse_f64_list(&a.eps)?,
            a.trials,
            a.seed,
            a.format,
            a.output.clone(),
        ),
    };
    if trials == 0 {
        return Err(CliError::usage("--trials must be positive"));
    }
    let specs = perm_specs
        .iter()
        .map(|s| PermSpec::parse(s))
        .collect::<Result<Vec<_>, _>>()?;
    let pv = build_vector(&specs, n, d.k(), seed)?;
    if !exact_is_feasible(&d, pv.n()) {
        eprintln!(
            "note: exact enumeration would exceed {OUTCOME_LIMIT} outcomes; reporting the Monte Carlo estimate only"
        );
    }
    let perms_text = pv
        .perms()
        .iter()
        .map(|p| {
            if p.is_identity() {
                "id".to_string()
            } else {
                p.cycle_notation(false)
            }
        })
        .collect::<Vec<_>>()
        .join(";");
    let mut rec = Records::new(
        "estimate",
        vec![
            "seed", "n", "perms", "epsilon", "trials", "typical", "p_hat", "stderr", "exact",
            "bound_kind", "bound",
        ],
    );
    for e in eps {
        let cfg = TrialConfig::new(d.clone(), pv.clone(), e, trials, seed)?;
        let r = evaluate(&cfg, exec)?;
        rec.push(vec![
            json!(seed),
            json!(pv.n()),
            json!(perms_text),
            num(e),
            json!(r.trials),
            json!(r.typical),
            num(r.p_hat),
            num(r.stderr),
            r.exact.map_or(Value::Null, num),
            r.bound.as_ref().map_or(Value::Null, |b| json!(b.kind.name())),
            r.bound.as_ref().map_or(Value::Null, |b| num(b.explicit_bound)),
        ]);
    }
    emit(&rec.render(format)?, output.as_deref())
}

fn verify(cmd: VerifyCommand) -> Result<(), CliError> {
    match cmd {
        VerifyCommand::Prop1 {
            dist,
            n,
            eps,
            tol,
            seed,
            workers,
        } => verify_prop1(&parse_dist(&dist)?, &n, &eps, tol, seed, workers),
        VerifyCommand::Bounds {
            suite,
            output,
            workers,
        } => verify_sweep(suite, output.as_deref(), workers),
    }
}

fn verify_prop1(
    d: &JointDistribution,
    n: &str,
    eps: &str,
    tol: f64,
    seed: u64,
    workers: usize,
) -> Result<(), CliError> {
    let opts = Prop1Options {
        seed,
        exec: execution(workers),
        ..Prop1Options::default()
    };
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for n in parse_usize_list(n)? {
        for e in parse_f64_list(eps)? {
            let r = verify_proposition1(d, n, e, opts)?;
            worst = worst.max(r.max_discrepancy());
            rows.push(vec![
                n.to_string(),
                e.to_string(),
                format!("{:.3e}", r.same_permutation_discrepancy),
                format!("{:.3e}", r.cycle_type_discrepancy),
                format!("{:.3e}", r.relative_discrepancy),
                r.classes.len().to_string(),
                r.pairs_checked.to_string(),
                if r.passed(tol) { "PASS" } else { "FAIL" }.to_string(),
            ]);
        }
    }
    let mut text = table(
        &["n", "eps", "same_perm", "cycle_type", "relative", "classes", "pairs", "status"],
        &rows,
    );
    let pass = worst <= tol;
    text.push_str(&format!(
        "{}, max discrepancy {worst:.3e} {} {tol:e}\n",
        if pass { "PASS" } else { "FAIL" },
        if pass { "≤" } else { ">" }
    ));
    emit(&text, None)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "max discrepancy {worst:e} exceeds {tol:e}"
        )))
    }
}

fn verify_sweep(suite: Suite, output: Option<&Path>, workers: usize) -> Result<(), CliError> {
    let sweep = match suite {
        Suite::Default => Sweep::default_suite(),
        Suite::Thm1 => Sweep::theorem1_default(),
        Suite::Lemma4 => Sweep::lemma4_default(),
        Suite::Lemma5 => Sweep::lemma5_default(),
        Suite::Thm2 => Sweep::theorem2_default(),
    };
    let report = verify_bounds(&sweep, execution(workers))?;
    if let Some(path) = output {
        let mut buf = Vec::new();
        report
            .write_csv(&mut buf)
            .map_err(|e| CliError::usage(format!("csv: {e}")))?;
        emit(std::str::from_utf8(&buf).expect("csv output is UTF-8"), Some(path))?;
    }

    // One summary line per bound family, in first-seen order.
    let mut families: Vec<(String, usize, usize, f64)> = Vec::new();
    for row in &report.rows {
        let family = row.config_id.split('/').next().unwrap_or("").to_string();
        let idx = match families.iter().position(|f| f.0 == family) {
            Some(i) => i,
            None => {
                families.push((family, 0, 0, f64::INFINITY));
                families.len() - 1
            }
        };
        let f = &mut families[idx];
        f.1 += 1;
        f.2 += usize::from(row.violated());
        f.3 = f.3.min(row.margin);
    }
    let rows: Vec<Vec<String>> = families
        .iter()
        .map(|(name, configs, violations, margin)| {
            vec![
                name.clone(),
                configs.to_string(),
                violations.to_string(),
                format!("{margin:.6}"),
            ]
        })
        .collect();
    let mut text = table(&["family", "configs", "violations", "min_margin"], &rows);
    let violations = report.violations();
    if !violations.is_empty() {
        text.push_str("\nviolations:\n");
        let rows: Vec<Vec<String>> = violations
            .iter()
            .map(|r| {
                vec![
                    r.config_id.clone(),
                    r.m_or_signature.clone(),
                    r.epsilon.to_string(),
                    r.exact.or(r.p_hat).map_or(String::new(), |x| x.to_string()),
                    r.bound.to_string(),
                ]
            })
            .collect();
        text.push_str(&table(&["config_id", "m_or_signature", "eps", "probability", "bound"], &rows));
    }
    let pass = violations.is_empty();
    text.push_str(&format!(
        "{}, {} violations across {} configurations\n",
        if pass { "PASS" } else { "FAIL" },
        violations.len(),
        report.rows.len()
    ));
    emit(&text, None)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{} bound violations",
            violations.len()
        )))
    }
}
