use besselrad::closedform::{laplace_single_bessel, y_param};
use besselrad::oracle::{
    integrate_kernel, integrate_q_representation, integrate_q_tail, integrate_single_bessel,
    integrate_three_bessel_regularized, integrate_two_bessel, DEFAULT_EPS_LIST,
};
use besselrad::wigner::checks;
use besselrad::{
    q_kernel, three_bessel_product, threej_000_nonzero, two_bessel_equal_order, two_bessel_product,
    wigner_3j, AngularMomenta3j, Error, Offset, QuadratureConfig, QuadratureResult, ThreeBesselSpec,
};
use clap::ValueEnum;
use serde_json::json;

use crate::output::{oracle_config, rel_discrepancy, CliError, EXIT_CHECK_FAILED, EXIT_NONCONVERGENCE};
use crate::{CheckArgs, Global};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Eq28,
    Eq211,
    Eq29,
    Eq26,
    Eq212,
    Eq21,
    Wigner,
    Qfunc,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Eq28 => "eq28",
            Suite::Eq211 => "eq211",
            Suite::Eq29 => "eq29",
            Suite::Eq26 => "eq26",
            Suite::Eq212 => "eq212",
            Suite::Eq21 => "eq21",
            Suite::Wigner => "wigner",
            Suite::Qfunc => "qfunc",
            Suite::All => "all",
        }
    }

    fn tolerance(self) -> f64 {
        match self {
            Suite::Eq28 | Suite::Eq211 | Suite::Eq26 => 1e-7,
            Suite::Eq29 => 1e-8,
            Suite::Eq212 => 1e-6,
            Suite::Eq21 => 1e-3,
            Suite::Qfunc => 1e-9,
            Suite::Wigner | Suite::All => 0.0,
        }
    }
}

const WAVENUMBERS: [f64; 3] = [0.5, 1.0, 2.0];
const ALPHAS: [f64; 3] = [0.5, 1.0, 2.0];

struct Case {
    label: String,
    passed: bool,
    detail: String,
}

/// Collects cases for one suite and stops at the first oracle failure.
struct Runner<'a> {
    cfg: &'a QuadratureConfig,
    tol: f64,
    cases: Vec<Case>,
}

impl Runner<'_> {
    fn compare(&mut self, label: String, got: f64, want: f64) {
        let d = rel_discrepancy(got, want);
        self.cases.push(Case {
            label,
            passed: d <= self.tol,
            detail: format!("rel {d:.3e}"),
        });
    }

    /// Relative check against an oracle, or an absolute one within three
    /// error bars when the oracle cannot tell its value apart from zero.
    fn against(&mut self, label: String, got: f64, o: &QuadratureResult) {
        let bar = 3.0 * o.abs_error_estimate;
        if o.value.abs() <= bar {
            let d = (got - o.value).abs();
            self.cases.push(Case {
                label,
                passed: d <= bar,
                detail: format!("abs {d:.3e} (zero within {bar:.1e})"),
            });
        } else {
            self.compare(label, got, o.value);
        }
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn two_bessel(r: &mut Runner, offset: Offset, max_l: u32) -> Result<(), Error> {
    for l1 in 0..=max_l {
        for l2 in 0..=max_l {
            for l3 in 0..=2 * max_l {
                if !threej_000_nonzero(l1, l2, l3) {
                    continue;
                }
                let outer = wigner_3j(AngularMomenta3j::zero_projection(l1, l2, l3)).to_f64();
                let n = l3 + offset.as_u32();
                for k1 in WAVENUMBERS {
                    for k2 in WAVENUMBERS {
                        for alpha in ALPHAS {
                            let product = two_bessel_product(l1, l2, l3, k1, k2, alpha, offset)?.value;
                            let o = integrate_two_bessel(n, l1, l2, k1, k2, alpha, 1e-10, r.cfg)?;
                            r.against(format!("l=({l1},{l2},{l3}) k=({k1},{k2}) a={alpha}"), product / outer, &o);
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn equal_order(r: &mut Runner, max_l: u32) -> Result<(), Error> {
    for l in 0..=max_l {
        for k1 in WAVENUMBERS {
            for k2 in WAVENUMBERS {
                for alpha in ALPHAS {
                    let closed = two_bessel_equal_order(l, k1, k2, alpha)?.value;
                    let o = integrate_two_bessel(1, l, l, k1, k2, alpha, 1e-11, r.cfg)?;
                    r.against(format!("L={l} k=({k1},{k2}) a={alpha}"), closed, &o);
                }
            }
        }
    }
    Ok(())
}

fn kernel(r: &mut Runner, max_l: u32) -> Result<(), Error> {
    for l in 0..=max_l {
        for l3 in 0..=max_l {
            for k1 in WAVENUMBERS {
                for k2 in WAVENUMBERS {
                    for alpha in ALPHAS {
                        let y = y_param(k1, k2, alpha)?;
                        let closed = q_kernel(l, l3, y)? / (factorial(l3) * (2.0 * k1 * k2).powi(l3 as i32));
                        let o = integrate_kernel(l, l3, k1, k2, alpha, 1e-10, r.cfg)?;
                        r.against(format!("l={l} l3={l3} k=({k1},{k2}) a={alpha}"), closed, &o);
                    }
                }
            }
        }
    }
    Ok(())
}

fn q_tail(r: &mut Runner, max_l: u32) -> Result<(), Error> {
    for l in 0..=max_l {
        for order in 0..=max_l {
            for y0 in [1.1, 1.5, 3.0] {
                let o = integrate_q_tail(l, order, y0, 1e-9, r.cfg)?;
                r.compare(format!("l={l} L={order} y0={y0}"), o.value, q_kernel(l, order, y0)?);
            }
        }
    }
    Ok(())
}

fn three_bessel(r: &mut Runner, max_l: u32) -> Result<(), Error> {
    let orders = [[0, 0, 0], [1, 1, 0], [0, 1, 1], [1, 1, 2], [2, 2, 2]];
    // Two inside the wavenumber triangle, two outside it.
    let triples = [[1.0, 1.0, 1.0], [1.0, 1.5, 2.0], [1.0, 1.0, 3.0], [0.5, 1.0, 2.0]];
    for l in orders.into_iter().filter(|l| l.iter().all(|&x| x <= max_l)) {
        let outer = wigner_3j(AngularMomenta3j::zero_projection(l[0], l[1], l[2])).to_f64();
        for k in triples {
            let spec = ThreeBesselSpec::new(l, k)?;
            let closed = three_bessel_product(&spec)?;
            let o = integrate_three_bessel_regularized(&spec, &DEFAULT_EPS_LIST, 1e-9, r.cfg)?;
            let want = outer * o.value;
            // Absolute where the integral vanishes, relative otherwise.
            let d = (closed - want).abs() / want.abs().max(1.0);
            r.cases.push(Case {
                label: format!("l={l:?} k={k:?}"),
                passed: d <= r.tol,
                detail: format!("diff {d:.3e}"),
            });
        }
    }
    Ok(())
}

fn qfunc(r: &mut Runner, max_l: u32) -> Result<(), Error> {
    for l in 0..=2 * max_l {
        for m in 0..=max_l + 2 {
            for y in [1.01, 1.5, 2.0, 10.0, 100.0] {
                let closed = q_kernel(l, m, y)?;
                let o = integrate_q_representation(l, m, y, 1e-12, r.cfg)?;
                r.compare(format!("L={l} M={m} y={y}"), closed, 0.5 * factorial(m) * o.value);
            }
        }
    }
    for l3 in 0..=max_l {
        for offset in [1, 2] {
            for k3 in WAVENUMBERS {
                for alpha in ALPHAS {
                    let closed = laplace_single_bessel(l3, alpha, k3, offset)?;
                    let o = integrate_single_bessel(l3, alpha, k3, offset, 1e-12, r.cfg)?;
                    r.compare(format!("laplace l3={l3} off={offset} k={k3} a={alpha}"), closed, o.value);
                }
            }
        }
    }
    Ok(())
}

fn wigner(r: &mut Runner, max_l: u32) {
    let mut push = |label: &str, (ok, total): (usize, usize)| {
        r.cases.push(Case {
            label: label.to_string(),
            passed: ok == total,
            detail: format!("{ok}/{total} exact"),
        });
    };
    push("3j orthogonality", checks::orthogonality(max_l.max(1)));
    push("3j symmetries", checks::threej_symmetries(max_l.max(1)));
    push("6j symmetries", checks::sixj_symmetries(max_l.max(1)));
}

fn run_suite(suite: Suite, max_l: u32, tol: f64, cfg: &QuadratureConfig) -> Result<Vec<Case>, Error> {
    let mut r = Runner { cfg, tol, cases: Vec::new() };
    match suite {
        Suite::Eq28 => two_bessel(&mut r, Offset::One, max_l)?,
        Suite::Eq211 => two_bessel(&mut r, Offset::Two, max_l)?,
        Suite::Eq29 => equal_order(&mut r, max_l)?,
        Suite::Eq26 => kernel(&mut r, max_l)?,
        Suite::Eq212 => q_tail(&mut r, max_l)?,
        Suite::Eq21 => three_bessel(&mut r, max_l)?,
        Suite::Qfunc => qfunc(&mut r, max_l)?,
        Suite::Wigner => wigner(&mut r, max_l),
        Suite::All => unreachable!("expanded by the caller"),
    }
    Ok(r.cases)
}

pub fn run(args: &CheckArgs, global: &Global) -> Result<u8, CliError> {
    let cfg = oracle_config()?;
    let suites: Vec<Suite> = match args.suite {
        Suite::All => Suite::value_variants().iter().copied().filter(|s| *s != Suite::All).collect(),
        s => vec![s],
    };
    let mut report = Vec::new();
    let (mut passed, mut total) = (0, 0);
    for suite in suites {
        let tol = global.rel_tol.unwrap_or(suite.tolerance());
        let cases = match run_suite(suite, args.max_l, tol, &cfg) {
            Ok(c) => c,
            Err(e @ Error::NonConvergence { .. }) => {
                return Err(CliError {
                    code: EXIT_NONCONVERGENCE,
                    message: format!("{}: {e}", suite.name()),
                })
            }
            Err(e) => return Err(e.into()),
        };
        for c in &cases {
            if !global.quiet && !global.json {
                let mark = if c.passed { "ok  " } else { "FAIL" };
                println!("{mark} {} {} {}", suite.name(), c.label, c.detail);
            }
        }
        let ok = cases.iter().filter(|c| c.passed).count();
        passed += ok;
        total += cases.len();
        report.push(json!({
            "suite": suite.name(),
            "tolerance": tol,
            "passed": ok,
            "cases": cases.len(),
            "failures": cases.iter().filter(|c| !c.passed)
                .map(|c| format!("{} {}", c.label, c.detail)).collect::<Vec<_>>(),
        }));
    }
    let all = passed == total;
    if global.json {
        let out = json!({ "pass": all, "passed": passed, "cases": total, "suites": report });
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    } else {
        println!("{} {passed}/{total}", if all { "PASS" } else { "FAIL" });
    }
    Ok(if all { 0 } else { EXIT_CHECK_FAILED })
}
