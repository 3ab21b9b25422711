//! One function per subcommand: merged parameters in, outputs (plus an optional table) out.

use std::path::Path;

use rectdim::applications::{
    candidate_profiles, exponent_orbit, liminf_rate, linear_forms_dim, mult_dim,
    mult_pair_closed_form, shrinking_target_dim, simultaneous_dim, ApplicationReport, Factor,
    LinearFormsInstance, MultiplicativeInstance, OrbitSample, SimultaneousInstance,
};
use rectdim::coverlab::{
    build_shrinking_level, cover_count, critical_exponent, empirical_critical_exponent, LevelSpec,
};
use rectdim::verify::{
    build_mass_tree, check_conservation, check_containment, check_separation, holder_test,
    min_covering_level, ubiquity_coverage, Ball, CoverageMethod, Rho, TreeConfig,
    UbiquitySystemSpec,
};
use rectdim::{
    build_alphabet, compute_s, compute_s_hat, compute_s_with, sup_over_candidates, DimensionReport,
    Error, ExponentProfile, ProductSpaceSpec, TiePolicy,
};
use serde_json::{json, Value};

use crate::params::{axis, CliError, CliResult, Params};

pub type Row = Vec<(String, Value)>;

/// What a command produced. `failure` marks a completed run whose check did not pass.
#[derive(Debug, Default)]
pub struct Outcome {
    pub outputs: Value,
    pub table: Option<Vec<Row>>,
    pub failure: Option<String>,
}

impl Outcome {
    fn new(outputs: Value) -> Self {
        Self {
            outputs,
            ..Self::default()
        }
    }

    fn with_table(mut self, rows: Vec<Row>) -> Self {
        self.table = Some(rows);
        self
    }
}

fn row<const N: usize>(cells: [(&str, Value); N]) -> Row {
    cells.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn join(ix: &[usize]) -> String {
    ix.iter()
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(";")
}

pub const COMMANDS: [&str; 10] = [
    "dim-core",
    "dim-simultaneous",
    "dim-linear",
    "dim-shrink",
    "dim-mult",
    "orbit",
    "cover-critical",
    "oracle-boxcount",
    "verify-ubiquity",
    "verify-massdist",
];

pub fn run(command: &str, p: &Params) -> CliResult<Outcome> {
    match command {
        "dim-core" => dim_core(p),
        "dim-simultaneous" => dim_simultaneous(p),
        "dim-linear" => dim_linear(p),
        "dim-shrink" => dim_shrink(p),
        "dim-mult" => dim_mult(p),
        "orbit" => orbit(p),
        "cover-critical" => cover_critical(p),
        "oracle-boxcount" => oracle_boxcount(p),
        "verify-ubiquity" => verify_ubiquity(p),
        "verify-massdist" => verify_massdist(p),
        other => Err(CliError::Param {
            key: "command".into(),
            msg: format!("unknown command `{other}`"),
        }),
    }
}

fn seed(p: &Params) -> CliResult<u64> {
    p.parse_or("seed", 0)
}

fn space(p: &Params) -> CliResult<ProductSpaceSpec> {
    Ok(ProductSpaceSpec::new(
        p.list("deltas")?,
        p.parse_or("kappa", 0.0)?,
    )?)
}

fn tie(p: &Params) -> CliResult<TiePolicy> {
    match p.str_or("tie", "default") {
        "default" => Ok(TiePolicy::Default),
        "strict-k1" | "strict_k1" => Ok(TiePolicy::StrictK1),
        "merge-equal-into-k2" | "merge_equal_into_k2" => Ok(TiePolicy::MergeEqualIntoK2),
        other => Err(CliError::Param {
            key: "tie".into(),
            msg: format!("unknown policy `{other}`"),
        }),
    }
}

fn partition_json(r: &DimensionReport) -> Value {
    json!({
        "k1": r.partition.k1.iter().map(|i| i + 1).collect::<Vec<_>>(),
        "k2": r.partition.k2.iter().map(|i| i + 1).collect::<Vec<_>>(),
        "k3": r.partition.k3.iter().map(|i| i + 1).collect::<Vec<_>>(),
    })
}

fn candidate_rows(r: &DimensionReport) -> Vec<Row> {
    r.table
        .iter()
        .map(|c| {
            row([
                ("candidate", json!(c.partition.candidate)),
                ("value", json!(c.value)),
                ("k1", json!(join(&c.partition.k1))),
                ("k2", json!(join(&c.partition.k2))),
                ("k3", json!(join(&c.partition.k3))),
            ])
        })
        .collect()
}

fn dim_core(p: &Params) -> CliResult<Outcome> {
    let space = space(p)?;
    let profile = ExponentProfile::new(p.list("a")?, p.list("t")?)?;
    let r = compute_s_with(&space, &profile, tie(p)?)?;
    let hat = compute_s_hat(&space, &profile)?;
    let outputs = json!({
        "dim": r.value,
        "argmin": r.argmin,
        "partition": partition_json(&r),
        "s_hat": hat.value,
        "full_measure": r.full_measure,
    });
    Ok(Outcome::new(outputs).with_table(candidate_rows(&r)))
}

fn application(r: &ApplicationReport) -> Outcome {
    let outputs = json!({
        "dim": r.value,
        "argmin_i": r.argmin_index,
        "closed_form": r.closed_form,
        "dimcore": r.dimcore.as_ref().map(|d| d.value),
        "full_measure": r.full_measure,
        "permutation": r.permutation.iter().map(|i| i + 1).collect::<Vec<_>>(),
    });
    let table = r.dimcore.as_ref().map(candidate_rows).unwrap_or_default();
    Outcome::new(outputs).with_table(table)
}

fn dim_simultaneous(p: &Params) -> CliResult<Outcome> {
    let inst = SimultaneousInstance::new(&p.list("tau")?)?;
    Ok(application(&simultaneous_dim(&inst)?))
}

fn dim_linear(p: &Params) -> CliResult<Outcome> {
    let inst = LinearFormsInstance::new(p.parse("n")?, &p.list("lambda")?)?;
    Ok(application(&linear_forms_dim(&inst)?))
}

fn dim_shrink(p: &Params) -> CliResult<Outcome> {
    let axes = p.axes()?;
    let r = shrinking_target_dim(&axes, &p.list("t")?)?;
    let outputs = json!({
        "dim": r.dimension.value,
        "argmin": r.dimension.argmin,
        "partition": partition_json(&r.dimension),
        "deltas": axes.iter().map(|a| a.delta()).collect::<Vec<_>>(),
        "full_hausdorff_measure": r.full_hausdorff_measure,
    });
    Ok(Outcome::new(outputs).with_table(candidate_rows(&r.dimension)))
}

/// A factor from `log-X`/`delta-X` or from `base-X`/`digits-X`.
fn factor(p: &Params, side: &str) -> CliResult<Factor> {
    let log_key = format!("log-{side}");
    if p.has(&log_key) {
        return Ok(Factor::new(
            p.parse(&log_key)?,
            p.parse_or(&format!("delta-{side}"), 1.0)?,
        )?);
    }
    let base_key = format!("base-{side}");
    let digits_key = format!("digits-{side}");
    let ax = axis(
        p.parse(&base_key)?,
        p.str_or(&digits_key, "full"),
        &digits_key,
    )?;
    Ok(Factor::from(&ax))
}

fn dim_mult(p: &Params) -> CliResult<Outcome> {
    let (a, b) = (factor(p, "a")?, factor(p, "b")?);
    let t: f64 = p.parse("t")?;
    if p.has("t2") {
        let t2: f64 = p.parse("t2")?;
        let t1: f64 = p.parse_or("t1", t - t2)?;
        let (closed, case) =
            mult_pair_closed_form(a.log_base, b.log_base, a.delta, b.delta, t1, t2)?;
        let space = ProductSpaceSpec::new(vec![a.delta, b.delta], 0.0)?;
        let generic = compute_s(
            &space,
            &ExponentProfile::new(vec![a.log_base, b.log_base], vec![t1, t2])?,
        )?;
        if (closed - generic.value).abs() > 1e-10 {
            return Err(Error::CrossCheck(format!(
                "closed form {closed} vs generic {}",
                generic.value
            ))
            .into());
        }
        let outputs = json!({ "dim": generic.value, "t1": t1, "t2": t2, "case": case, "closed_form": closed });
        return Ok(Outcome::new(outputs));
    }
    let inst = MultiplicativeInstance::from_factors(a, b, t)?;
    let r = mult_dim(&inst)?;
    let outputs = json!({
        "dim": r.dim,
        "regime": r.regime,
        "regime_reason": r.regime_reason,
        "t2_hat": r.that_t2,
        "formula": r.formula,
        "slicing_lower": r.slicing_lower,
        "covering_upper": r.covering_upper,
        "numeric_sup": r.numeric_sup,
        "numeric_argmax": r.numeric_argmax,
        "bracket_verified": r.bracket_verified,
        "crossings": r.crossings,
        "swapped": r.swapped,
    });
    let steps: usize = p.parse_or("profile-points", 101)?;
    let rows = (0..steps)
        .map(|j| {
            let t2 = if steps > 1 {
                t * j as f64 / (steps - 1) as f64
            } else {
                0.0
            };
            Ok(row([
                ("t2", json!(t2)),
                ("f", json!(inst.split_value(t2)?)),
            ]))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Outcome::new(outputs).with_table(rows))
}

fn rho(p: &Params) -> CliResult<Rho> {
    match p.str_or("rho", "inverse") {
        "inverse" => Ok(Rho::Inverse),
        "exp" => Ok(Rho::Exp),
        other => Err(CliError::Param {
            key: "rho".into(),
            msg: format!("expected inverse or exp, got `{other}`"),
        }),
    }
}

/// `n,psi1,…,psid` rows, header optional.
fn read_samples(path: &Path) -> CliResult<Vec<OrbitSample>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let nums: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match nums {
            Ok(v) if v.len() >= 2 => out.push(OrbitSample {
                n: v[0],
                psi: v[1..].to_vec(),
            }),
            Ok(_) => {
                return Err(CliError::Param {
                    key: "samples".into(),
                    msg: "need n and at least one psi".into(),
                })
            }
            Err(_) if out.is_empty() => continue,
            Err(e) => {
                return Err(CliError::Param {
                    key: "samples".into(),
                    msg: e.to_string(),
                })
            }
        }
    }
    Ok(out)
}

/// Phases `e₁,…,e_d` separated by `;`; sample `n` uses phase `n mod #phases`.
fn generated_samples(p: &Params, rho: Rho) -> CliResult<Vec<OrbitSample>> {
    let phases = p
        .str("psi-exponents")?
        .split(';')
        .map(|ph| crate::params::parse_list("psi-exponents", ph))
        .collect::<CliResult<Vec<_>>>()?;
    let start: u64 = p.parse_or("n-min", 2)?;
    let count: u64 = p.parse_or("count", 100)?;
    Ok((start..start + count)
        .map(|n| {
            let e = &phases[(n % phases.len() as u64) as usize];
            let lr = rho.log(n as f64);
            OrbitSample {
                n: n as f64,
                psi: e.iter().map(|ei| (ei * lr).exp()).collect(),
            }
        })
        .collect())
}

fn orbit(p: &Params) -> CliResult<Outcome> {
    let rho = rho(p)?;
    let samples = match p.raw("samples") {
        Some(path) => read_samples(Path::new(path))?,
        None => generated_samples(p, rho)?,
    };
    let report = exponent_orbit(&samples, |n| rho.log(n), p.parse_or("eps", 0.05)?)?;
    let mut outputs = json!({
        "samples": samples.len(),
        "eps": report.eps,
        "clusters": report.clusters,
    });
    if samples[0].psi.len() == 1 {
        let pairs: Vec<(f64, f64)> = samples.iter().map(|s| (s.n, s.psi[0])).collect();
        outputs["liminf_rate"] = json!(liminf_rate(&pairs)?);
    }
    if p.has("a") {
        let profiles = candidate_profiles(&report, &p.list("a")?)?;
        outputs["candidates"] = json!(profiles
            .iter()
            .map(|pr| pr.t().to_vec())
            .collect::<Vec<_>>());
        if p.has("deltas") {
            let (dim, index) = sup_over_candidates(&space(p)?, &profiles)?;
            outputs["dim"] = json!(dim);
            outputs["sup_index"] = json!(index);
        }
    }
    let rows = samples
        .iter()
        .zip(&report.orbit)
        .map(|(s, e)| {
            let mut r = vec![("n".to_string(), json!(s.n))];
            r.extend(
                e.iter()
                    .enumerate()
                    .map(|(i, v)| (format!("e{}", i + 1), json!(v))),
            );
            r
        })
        .collect();
    Ok(Outcome::new(outputs).with_table(rows))
}

fn cover_critical(p: &Params) -> CliResult<Outcome> {
    let space = space(p)?;
    let profile = ExponentProfile::new(p.list("a")?, p.list("t")?)?;
    let n_levels: u32 = p.parse_or("levels", 12)?;
    let levels = (1..=n_levels)
        .map(|n| LevelSpec::new(space.clone(), profile.clone(), (-f64::from(n)).exp()))
        .collect::<Result<Vec<_>, _>>()?;
    let lo = p.parse_or("lo", 0.0)?;
    let hi = p.parse_or("hi", space.total() + 0.5)?;
    let r = critical_exponent(&levels, lo, hi, p.parse_or("tol", 1e-10)?)?;
    let formula = compute_s(&space, &profile)?.value;
    let outputs = json!({
        "s": r.s,
        "iterations": r.iterations,
        "argmin": r.argmin,
        "formula": formula,
        "difference": r.s - formula,
    });
    let alphabet = build_alphabet(&profile).entries;
    let mut rows = Vec::new();
    for level in &levels {
        for &a in &alphabet {
            let lc = cover_count(level, a)?;
            rows.push(row([
                ("log_inv_r", json!(-level.r.ln())),
                ("candidate", json!(a)),
                ("log_count", json!(lc)),
                ("cost", json!(lc + r.s * a * level.r.ln())),
            ]));
        }
    }
    Ok(Outcome::new(outputs).with_table(rows))
}

fn oracle_boxcount(p: &Params) -> CliResult<Outcome> {
    let axes = p.axes()?;
    let anchors = p.anchors(&axes)?;
    let t = p.list("t")?;
    let (lo, hi): (u32, u32) = (p.parse_or("n-min", 1)?, p.parse_or("n-max", 6)?);
    let r = empirical_critical_exponent(&axes, &anchors, &t, lo..=hi, p.parse_or("steps", 64)?)?;
    let last = build_shrinking_level(&axes, &anchors, &t, hi)?;
    let outputs = json!({
        "value": r.value,
        "model": r.model,
        "difference": r.value - r.model,
        "levels": r.levels,
        "alphabet": r.alphabet,
        "grid_step": r.grid_step,
        "last_level_intervals": last.directions.iter().map(|d| d.intervals.len()).collect::<Vec<_>>(),
    });
    let rows = r
        .rows
        .iter()
        .map(|lr| {
            row([
                ("n", json!(lr.n)),
                ("radius_exponent", json!(lr.radius_exponent)),
                ("eps", json!(lr.eps)),
                ("log_count", json!(lr.log_count)),
                ("cost", json!(lr.cost)),
            ])
        })
        .collect();
    Ok(Outcome::new(outputs).with_table(rows))
}

fn verify_ubiquity(p: &Params) -> CliResult<Outcome> {
    let system = p.str("system")?;
    let mut spec = match system {
        "simultaneous" => {
            let a = p.list("a")?;
            let big_m = p.parse_or("m-base", 1u64 << (3 * a.len() + 2))?;
            UbiquitySystemSpec::simultaneous(a, big_m)?
        }
        "linear" | "linear-forms" => {
            let n: usize = p.parse("n")?;
            let a = p.list("a")?;
            let default_m =
                (1u64 << (2 * a.len() + 1)).saturating_mul((n as u64).pow(a.len() as u32));
            UbiquitySystemSpec::linear_forms(n, a, p.parse_or("m-base", default_m)?)?
        }
        "shrinking" => {
            let axes = p.axes()?;
            let anchors = p.anchors(&axes)?;
            UbiquitySystemSpec::shrinking(axes, anchors)?
        }
        other => {
            return Err(CliError::Param {
                key: "system".into(),
                msg: format!("expected simultaneous, linear or shrinking, got `{other}`"),
            })
        }
    };
    if let Some(c) = p.opt::<f64>("constant")? {
        spec = spec.with_constant(c)?;
    }
    let d = spec.dim();
    let center = p.list_or("center", vec![0.5; d])?;
    let ball = Ball::new(center, p.parse_or("radius", 0.5)?)?;

    let one_d_exact = system == "shrinking" || (system == "simultaneous" && d == 1);
    let method = match p.str_or("method", if one_d_exact { "exact" } else { "monte-carlo" }) {
        "exact" => CoverageMethod::Exact1d,
        "monte-carlo" | "monte_carlo" => CoverageMethod::MonteCarlo {
            samples: p.parse_or("samples", 10_000)?,
            seed: seed(p)?,
        },
        other => {
            return Err(CliError::Param {
                key: "method".into(),
                msg: format!("unknown method `{other}`"),
            })
        }
    };
    let levels: Vec<u32> = match p.str_or(
        "levels",
        if system == "simultaneous" && d == 1 {
            "auto"
        } else {
            "1"
        },
    ) {
        "auto" => vec![min_covering_level(spec.big_m, ball.radius).ok_or_else(|| {
            Error::InvalidM(format!(
                "no covering level for M = {} and radius {}",
                spec.big_m, ball.radius
            ))
        })?],
        list => list
            .split(',')
            .map(|s| {
                s.trim().parse().map_err(|_| CliError::Param {
                    key: "levels".into(),
                    msg: format!("`{s}`"),
                })
            })
            .collect::<CliResult<_>>()?,
    };
    let records = levels
        .iter()
        .map(|&k| ubiquity_coverage(&spec, &ball, k, method))
        .collect::<Result<Vec<_>, _>>()?;
    let fraction = records
        .iter()
        .map(|r| r.fraction)
        .fold(f64::INFINITY, f64::min);
    let mut out = Outcome::new(json!({
        "system": spec.kind,
        "m_base": spec.big_m,
        "constant": spec.c,
        "ball": ball,
        "fraction": fraction,
        "records": records,
    }));
    if let Some(min) = p.opt::<f64>("min-fraction")? {
        if fraction < min {
            out.failure = Some(format!("coverage fraction {fraction} below {min}"));
        }
    }
    let rows = records
        .iter()
        .map(|r| {
            row([
                ("level", json!(r.level)),
                ("fraction", json!(r.fraction)),
                ("stderr", json!(r.stderr)),
                ("method", json!(r.method)),
            ])
        })
        .collect();
    Ok(out.with_table(rows))
}

fn verify_massdist(p: &Params) -> CliResult<Outcome> {
    let axes = p.axes()?;
    let anchors = p.anchors(&axes)?;
    let t = p.list("t")?;
    let mut cfg = TreeConfig::new(p.parse_or("depth", 2)?);
    cfg.growth = p.parse_or("growth", cfg.growth)?;
    cfg.node_budget = p.parse_or("budget", cfg.node_budget)?;
    cfg.big_cap = p.opt("big-cap")?;
    cfg.ball_cap = p.opt("ball-cap")?;
    let tree = build_mass_tree(&axes, &anchors, &t, &cfg)?;

    let target = shrinking_target_dim(&axes, &t)?.dimension.value;
    let s = p.parse_or("s", target)?;
    let holder = holder_test(
        &tree,
        s,
        p.parse_or("epsilon", 0.05)?,
        p.parse_or("samples", 2000)?,
        seed(p)?,
    )?;
    let conservation = check_conservation(&tree);
    let containment = check_containment(&tree);
    let separation = check_separation(&tree);

    if let Some(path) = p.raw("tree-out") {
        let doc = json!({ "schema_version": 1, "tree": tree });
        std::fs::write(path, crate::output::to_json(&doc)?)?;
    }
    let problems: Vec<String> = [
        (conservation > 1e-9).then(|| format!("mass conservation error {conservation}")),
        containment.as_ref().err().cloned(),
        separation.as_ref().err().cloned(),
        (!holder.pass).then(|| format!("Hölder slope {} below −{}", holder.slope, holder.epsilon)),
    ]
    .into_iter()
    .flatten()
    .collect();
    let rows = holder
        .bins
        .iter()
        .map(|b| {
            row([
                ("log_r", json!(b.log_r)),
                ("samples", json!(b.samples)),
                ("max_log_ratio", json!(b.max_log_ratio)),
            ])
        })
        .collect();
    let mut out = Outcome::new(json!({
        "nodes": tree.nodes.len(),
        "depth": tree.depth(),
        "stages": tree.stages,
        "leaves": tree.leaves().count(),
        "target_dim": target,
        "conservation_error": conservation,
        "containment": containment.is_ok(),
        "separation": separation.is_ok(),
        "holder": holder,
    }))
    .with_table(rows);
    if !problems.is_empty() {
        out.failure = Some(problems.join("; "));
    }
    Ok(out)
}
