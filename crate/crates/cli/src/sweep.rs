//! Re-running one command over a grid of values for a single parameter.

use serde_json::{json, Value};

use crate::commands::{self, Outcome, Row};
use crate::output::flatten;
use crate::params::{parse_list, CliError, CliResult, Params};

/// Grid from an explicit list `0,0.5,1` or a range `lo:hi:count` (endpoints included).
pub fn grid(p: &Params) -> CliResult<Vec<f64>> {
    if let Some(g) = p.raw("grid") {
        return parse_list("grid", g);
    }
    let range = p.raw("range").ok_or_else(|| CliError::Param {
        key: "grid".into(),
        msg: "empty grid: give --grid or --range".into(),
    })?;
    let bad = |msg: &str| CliError::Param {
        key: "range".into(),
        msg: msg.into(),
    };
    let parts: Vec<&str> = range.split(':').map(str::trim).collect();
    let [lo, hi, n] = parts[..] else {
        return Err(bad("expected lo:hi:count"));
    };
    let (lo, hi): (f64, f64) = (
        lo.parse().map_err(|_| bad("bad lo"))?,
        hi.parse().map_err(|_| bad("bad hi"))?,
    );
    let n: usize = n.parse().map_err(|_| bad("bad count"))?;
    match n {
        0 => Err(bad("empty grid")),
        1 => Ok(vec![lo]),
        _ => Ok((0..n)
            .map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64)
            .collect()),
    }
}

/// `p` carries the target command's parameters plus `command`, `param` and a grid.
pub fn sweep(p: &Params) -> CliResult<Outcome> {
    let target = p.str("command")?;
    if !commands::COMMANDS.contains(&target) {
        return Err(CliError::Param {
            key: "command".into(),
            msg: format!("unknown command `{target}`"),
        });
    }
    let param = p.str("param")?.to_string();
    let values = grid(p)?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Param {
            key: "grid".into(),
            msg: "grid values must be finite".into(),
        });
    }

    let mut rows: Vec<Row> = Vec::with_capacity(values.len());
    let mut points = Vec::with_capacity(values.len());
    let mut failures = Vec::new();
    for &v in &values {
        let mut q = p.clone();
        q.set(&param, v.to_string());
        let out = commands::run(target, &q)?;
        if let Some(f) = &out.failure {
            failures.push(format!("{param}={v}: {f}"));
        }
        let mut r: Row = vec![(param.clone(), json!(v))];
        flatten("", &out.outputs, &mut r);
        rows.push(r);
        points.push(json!({ "value": v, "outputs": out.outputs }));
    }
    Ok(Outcome {
        outputs: json!({ "command": target, "param": param, "points": Value::Array(points) }),
        table: Some(rows),
        failure: (!failures.is_empty()).then(|| failures.join("; ")),
    })
}
