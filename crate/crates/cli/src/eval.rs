use besselrad::closedform::select_coupling;
use besselrad::oracle::integrate_two_bessel;
use besselrad::{bare_integral, wigner_3j, AngularMomenta3j, Error, IntegralSpec};
use serde::Serialize;

use crate::output::{float, oracle_config, rel_discrepancy, CliError};
use crate::{EvalArgs, Global};

#[derive(Serialize)]
struct EvalJson {
    value: f64,
    method: String,
    condition: f64,
    oracle_value: Option<f64>,
    oracle_abs_error: Option<f64>,
    rel_discrepancy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda3: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    product: Option<f64>,
}

pub fn run(args: &EvalArgs, global: &Global) -> Result<u8, CliError> {
    let rel_tol = global.rel_tol.unwrap_or(1e-8);
    let spec = IntegralSpec::new(args.power, args.lambda1, args.lambda2, args.k1, args.k2, args.alpha)?;
    let cfg = oracle_config()?;
    let oracle = || integrate_two_bessel(spec.n, spec.lambda1, spec.lambda2, spec.k1, spec.k2, spec.alpha, rel_tol, &cfg);

    let mut out = match bare_integral(&spec) {
        Ok(r) => EvalJson {
            value: r.value,
            method: r.method.label().to_string(),
            condition: r.condition,
            oracle_value: None,
            oracle_abs_error: None,
            rel_discrepancy: None,
            lambda3: None,
            product: None,
        },
        Err(Error::FormulaInapplicable { .. }) if args.fallback_oracle => {
            let o = oracle()?;
            EvalJson {
                value: o.value,
                method: "NA".to_string(),
                condition: spec.condition(),
                oracle_value: Some(o.value),
                oracle_abs_error: Some(o.abs_error_estimate),
                rel_discrepancy: None,
                lambda3: None,
                product: None,
            }
        }
        Err(e) => return Err(e.into()),
    };

    if args.oracle && out.oracle_value.is_none() {
        let o = oracle()?;
        out.oracle_value = Some(o.value);
        out.oracle_abs_error = Some(o.abs_error_estimate);
        out.rel_discrepancy = Some(rel_discrepancy(out.value, o.value));
    }
    if args.product {
        if let Ok((lambda3, _)) = select_coupling(spec.n, spec.lambda1, spec.lambda2) {
            let outer = wigner_3j(AngularMomenta3j::zero_projection(spec.lambda1, spec.lambda2, lambda3));
            out.lambda3 = Some(lambda3);
            out.product = Some(outer.to_f64() * out.value);
        }
    }

    if global.json {
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    } else {
        println!("value      {}", float(out.value));
        println!("method     {}", out.method);
        println!("condition  {}", float(out.condition));
        if let (Some(l3), Some(p)) = (out.lambda3, out.product) {
            println!("lambda3    {l3}");
            println!("product    {}", float(p));
        }
        if let Some(v) = out.oracle_value {
            println!("oracle     {}", float(v));
            println!("oracle_err {}", float(out.oracle_abs_error.unwrap_or(f64::NAN)));
        }
        if let Some(d) = out.rel_discrepancy {
            println!("rel_diff   {}", float(d));
        }
    }
    Ok(0)
}
