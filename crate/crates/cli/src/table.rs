use std::fs::File;
use std::io::{self, BufWriter, Write};

use besselrad::oracle::integrate_two_bessel;
use besselrad::{bare_integral, Error, IntegralSpec};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{float, oracle_config, rel_discrepancy, CliError, EXIT_UNWRITABLE};
use crate::{Format, Global, TableArgs};

const PARAMS: [&str; 6] = ["lambda1", "lambda2", "power", "k1", "k2", "alpha"];
const INTEGER_PARAMS: usize = 3;

/// Value written in the `value` column when a point has no closed form and
/// no oracle fallback was requested.
pub const ERROR_MARKER: &str = "ERROR";

#[derive(Debug, Clone, PartialEq)]
struct Sweep {
    param: usize,
    values: Vec<f64>,
}

fn parse_sweep(raw: &str) -> Result<Sweep, CliError> {
    let bad = |why: &str| CliError::usage(format!("bad sweep {raw:?}: {why}"));
    let (name, range) = raw.split_once('=').ok_or_else(|| bad("expected param=start:stop:count"))?;
    let param = PARAMS
        .iter()
        .position(|p| *p == name.trim())
        .ok_or_else(|| bad("unknown parameter"))?;
    let parts: Vec<&str> = range.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err(bad("expected start:stop:count"));
    };
    let start: f64 = start.trim().parse().map_err(|_| bad("start is not a number"))?;
    let stop: f64 = stop.trim().parse().map_err(|_| bad("stop is not a number"))?;
    let count: usize = count.trim().parse().map_err(|_| bad("count is not a positive integer"))?;
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(bad("count must be positive and bounds finite"));
    }
    if count == 1 && start != stop {
        return Err(bad("count 1 needs start == stop"));
    }
    let values: Vec<f64> = (0..count)
        .map(|i| {
            if count == 1 {
                start
            } else {
                start + (stop - start) * i as f64 / (count - 1) as f64
            }
        })
        .collect();
    if param < INTEGER_PARAMS && values.iter().any(|v| v.fract() != 0.0 || *v < 0.0) {
        return Err(bad("integer parameter must take non-negative integer values"));
    }
    Ok(Sweep { param, values })
}

/// Every parameter as an axis: swept ones carry their grid, fixed ones a
/// single value.
fn axes(args: &TableArgs) -> Result<Vec<Vec<f64>>, CliError> {
    let fixed = [
        args.lambda1.map(f64::from),
        args.lambda2.map(f64::from),
        args.power.map(f64::from),
        args.k1,
        args.k2,
        args.alpha,
    ];
    let sweeps = args.sweeps.iter().map(|s| parse_sweep(s)).collect::<Result<Vec<_>, _>>()?;
    let mut axes: Vec<Option<Vec<f64>>> = fixed.iter().map(|f| f.map(|v| vec![v])).collect();
    for s in &sweeps {
        if fixed[s.param].is_some() || sweeps.iter().filter(|t| t.param == s.param).count() > 1 {
            return Err(CliError::usage(format!("{} is given more than once", PARAMS[s.param])));
        }
        axes[s.param] = Some(s.values.clone());
    }
    let mut out = Vec::new();
    for (i, axis) in axes.into_iter().enumerate() {
        out.push(axis.ok_or_else(|| CliError::usage(format!("--{} or --sweep {}=... is required", PARAMS[i], PARAMS[i])))?);
    }
    // Sweep order decides nesting: first sweep outermost.
    let order: Vec<usize> = sweeps
        .iter()
        .map(|s| s.param)
        .chain((0..PARAMS.len()).filter(|p| !sweeps.iter().any(|s| s.param == *p)))
        .collect();
    let mut points = vec![[0.0; 6]];
    for &p in &order {
        points = points
            .into_iter()
            .flat_map(|pt| {
                out[p].iter().map(move |&v| {
                    let mut q = pt;
                    q[p] = v;
                    q
                })
            })
            .collect();
    }
    Ok(points.into_iter().map(|p| p.to_vec()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub lambda1: u32,
    pub lambda2: u32,
    pub power: u32,
    pub k1: f64,
    pub k2: f64,
    pub alpha: f64,
    pub value: Option<f64>,
    pub method: String,
    pub condition: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_discrepancy: Option<f64>,
}

fn evaluate(point: &[f64], args: &TableArgs, rel_tol: f64, cfg: &besselrad::QuadratureConfig) -> Result<Row, CliError> {
    let (l1, l2, n) = (point[0] as u32, point[1] as u32, point[2] as u32);
    let (k1, k2, alpha) = (point[3], point[4], point[5]);
    let spec = IntegralSpec::new(n, l1, l2, k1, k2, alpha)?;
    let oracle = || integrate_two_bessel(n, l1, l2, k1, k2, alpha, rel_tol, cfg);
    let mut row = Row {
        lambda1: l1,
        lambda2: l2,
        power: n,
        k1,
        k2,
        alpha,
        value: None,
        method: "NA".to_string(),
        condition: spec.condition(),
        oracle_value: None,
        rel_discrepancy: None,
    };
    match bare_integral(&spec) {
        Ok(r) => {
            row.value = Some(r.value);
            row.method = r.method.label().to_string();
            row.condition = r.condition;
            if args.oracle {
                let o = oracle()?;
                row.oracle_value = Some(o.value);
                row.rel_discrepancy = Some(rel_discrepancy(r.value, o.value));
            }
        }
        Err(Error::FormulaInapplicable { .. }) => {
            if args.fallback_oracle || args.oracle {
                let o = oracle()?;
                row.oracle_value = Some(o.value);
                if args.fallback_oracle {
                    row.value = Some(o.value);
                }
            }
        }
        Err(e) => return Err(e.into()),
    }
    Ok(row)
}

fn opt(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

fn write_csv(rows: &[Row], with_oracle: bool, out: impl Write) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut header: Vec<&str> = PARAMS.to_vec();
    header.extend(["value", "method", "condition"]);
    if with_oracle {
        header.extend(["oracle_value", "rel_discrepancy"]);
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.lambda1.to_string(),
            r.lambda2.to_string(),
            r.power.to_string(),
            float(r.k1),
            float(r.k2),
            float(r.alpha),
            r.value.map(float).unwrap_or_else(|| ERROR_MARKER.to_string()),
            r.method.clone(),
            float(r.condition),
        ];
        if with_oracle {
            rec.push(opt(r.oracle_value));
            rec.push(opt(r.rel_discrepancy));
        }
        w.write_record(&rec)?;
    }
    w.flush()
}

fn write_json(rows: &[Row], mut out: impl Write) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)?;
    out.flush()
}

pub fn run(args: &TableArgs, global: &Global) -> Result<u8, CliError> {
    let points = axes(args)?;
    let rel_tol = global.rel_tol.unwrap_or(1e-8);
    let cfg = oracle_config()?;
    // Collecting from an indexed parallel iterator keeps grid order.
    let rows = points
        .par_iter()
        .map(|p| evaluate(p, args, rel_tol, &cfg))
        .collect::<Result<Vec<_>, _>>()?;

    let unwritable = |e: io::Error| CliError {
        code: EXIT_UNWRITABLE,
        message: format!("cannot write output: {e}"),
    };
    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(unwritable)?)),
        None => Box::new(io::stdout().lock()),
    };
    let format = if global.json { Format::Json } else { args.format };
    match format {
        Format::Csv => write_csv(&rows, args.oracle, sink).map_err(unwritable)?,
        Format::Json => write_json(&rows, sink).map_err(unwritable)?,
    }
    Ok(0)
}
