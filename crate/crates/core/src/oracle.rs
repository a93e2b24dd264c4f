//! Numerical oracles: adaptive quadrature of every integral that has a
//! closed form elsewhere in the crate.
//!
//! None of these routines call into [`crate::closedform`]. The only shared
//! pieces are the scalar special functions (`j_l`, `P_l`), which the closed
//! forms do not use, and [`q_kernel`] in the tail integral, which is the
//! object that identity checks.

use std::f64::consts::PI;

use crate::closedform::ThreeBesselSpec;
use crate::error::{invalid, Error, Result};
use crate::specfun::{self, legendre_p_unchecked, q_kernel, spherical_bessel_j, MAX_BESSEL_ORDER};

mod quad;

/// Environment variable that overrides the evaluation budget.
pub const PANEL_BUDGET_ENV: &str = "BESSELRAD_PANEL_BUDGET";

/// Default regularisation sequence for the three-Bessel integral.
pub const DEFAULT_EPS_LIST: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureConfig {
    /// Maximum number of integrand evaluations per oracle call.
    pub max_evaluations: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            max_evaluations: 1_000_000,
        }
    }
}

impl QuadratureConfig {
    /// Default configuration, with the budget taken from
    /// `BESSELRAD_PANEL_BUDGET` when it is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(PANEL_BUDGET_ENV) {
            Ok(raw) => {
                let max_evaluations = raw.trim().parse::<usize>().map_err(|_| {
                    invalid(format!("{PANEL_BUDGET_ENV} must be a non-negative integer, got {raw:?}"))
                })?;
                Ok(Self { max_evaluations })
            }
            Err(_) => Ok(Self::default()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub panels_used: usize,
    pub evaluations: usize,
    pub converged: bool,
}

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if !(1e-12..1.0).contains(&rel_tol) {
        return Err(invalid(format!("rel_tol must lie in [1e-12, 1), got {rel_tol}")));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

/// Upper bound on `|j_l(x)|` valid for all arguments `>= x`.
///
/// `|j_l| <= |h_l|` and `x |h_l(x)| <= sum_k (l+k)! / (k! (l-k)! (2x)^k)`,
/// which is decreasing in `x`.
fn bessel_envelope(l: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..l {
        term *= f64::from(l + k + 1) * f64::from(l - k) / (f64::from(k + 1) * 2.0 * x);
        sum += term;
    }
    (sum / x).min(1.0)
}

/// `∫_R^∞ r^n e^{-α r} dr`.
fn exponential_tail(n: u32, alpha: f64, r: f64) -> f64 {
    // e^{-αR} sum_{j=0}^{n} n!/j! R^j / α^{n-j+1}, accumulated from j = n down.
    let mut term = r.powi(n as i32) / alpha;
    let mut sum = term;
    for j in (1..=n).rev() {
        term *= f64::from(j) / (alpha * r);
        sum += term;
    }
    (-alpha * r).exp() * sum
}

/// `∫_0^∞ r^n e^{-α r} prod_i j_{l_i}(k_i r) dr` with an analytic tail bound.
fn integrate_damped(
    n: u32,
    factors: &[(u32, f64)],
    alpha: f64,
    rel_tol: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    check_positive("alpha", alpha)?;
    for &(l, k) in factors {
        check_positive("wavenumber", k)?;
        if l > MAX_BESSEL_ORDER {
            return Err(invalid(format!("Bessel order {l} exceeds {MAX_BESSEL_ORDER}")));
        }
    }
    let integrand = |r: f64| {
        let mut v = r.powi(n as i32) * (-alpha * r).exp();
        for &(l, k) in factors {
            v *= spherical_bessel_j(l, k * r).expect("validated order and argument");
        }
        v
    };
    let k_sum: f64 = factors.iter().map(|&(_, k)| k).sum();
    let width = if k_sum > 0.0 { PI / k_sum } else { f64::INFINITY }.min(2.0 / alpha);

    let mut budget = cfg.max_evaluations;
    let mut lo = 0.0;
    let mut hi = 40.0 / alpha;
    let mut value = 0.0_f64;
    let mut abs_error = 0.0_f64;
    let mut panels = 0;
    let mut converged = true;
    loop {
        let abs_tol = if lo == 0.0 { 0.0 } else { 0.1 * rel_tol * value.abs() };
        let piece = quad::integrate(
            &integrand,
            &quad::uniform_edges(lo, hi, width),
            0.5 * rel_tol,
            abs_tol,
            &mut budget,
        )
        .map_err(|e| match e {
            Error::NonConvergence {
                value: v,
                abs_error: err,
                ..
            } => Error::NonConvergence {
                evaluations: cfg.max_evaluations - budget,
                value: value + v,
                abs_error: abs_error + err,
            },
            other => other,
        })?;
        value += piece.value;
        abs_error += piece.abs_error;
        panels += piece.panels;
        converged &= piece.converged;

        let envelope: f64 = factors.iter().map(|&(l, k)| bessel_envelope(l, k * hi)).product();
        let tail = envelope * exponential_tail(n, alpha, hi);
        if tail <= 0.1 * rel_tol * value.abs() || tail < f64::MIN_POSITIVE {
            abs_error += tail;
            break;
        }
        lo = hi;
        hi *= 1.5;
    }
    Ok(QuadratureResult {
        value,
        abs_error_estimate: abs_error,
        panels_used: panels,
        evaluations: cfg.max_evaluations - budget,
        converged: converged && abs_error <= rel_tol * value.abs().max(f64::MIN_POSITIVE),
    })
}

/// `∫_0^∞ r^n e^{-α r} j_{λ1}(k1 r) j_{λ2}(k2 r) dr` by adaptive quadrature.
///
/// Panels are no wider than half a period of the fastest oscillation
/// `π / (k1 + k2)`; the range is extended until the analytic tail bound
/// drops below a tenth of the requested relative tolerance.
pub fn integrate_two_bessel(
    n: u32,
    lambda1: u32,
    lambda2: u32,
    k1: f64,
    k2: f64,
    alpha: f64,
    rel_tol: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    check_rel_tol(rel_tol)?;
    integrate_damped(n, &[(lambda1, k1), (lambda2, k2)], alpha, rel_tol, cfg)
}

/// `∫_0^∞ r^(λ3 + offset) e^{-α r} j_λ3(k3 r) dr` for `offset ∈ {1, 2}`.
pub fn integrate_single_bessel(
    lambda3: u32,
    alpha: f64,
    k3: f64,
    offset: u32,
    rel_tol: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    check_rel_tol(rel_tol)?;
    if !(1..=2).contains(&offset) {
        return Err(invalid(format!("offset must be 1 or 2, got {offset}")));
    }
    integrate_damped(lambda3 + offset, &[(lambda3, k3)], alpha, rel_tol, cfg)
}

/// `∫_{-1}^{1} P_L(x) / (y - x)^(M+1) dx` for `y > 1`.
///
/// Integrating by parts `L` times with Rodrigues' formula turns this into
///
/// ```text
/// (M+L)! / (M! 2^L L!) ∫_{-1}^{1} (1 - x^2)^L / (y - x)^(M+L+1) dx,
/// ```
///
/// whose integrand is positive, so no cancellation limits the accuracy even
/// when the result is many orders smaller than the integrand. For
/// `y - 1 < 0.1` the variable `s = ln(y - x)` spreads the peak at `x = 1`.
pub fn integrate_q_representation(
    l: u32,
    m: u32,
    y: f64,
    rel_tol: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    check_rel_tol(rel_tol)?;
    if y.is_nan() || y <= 1.0 {
        return Err(Error::Domain(format!("y must be > 1, got {y}")));
    }
    let prefactor = {
        let c = specfun::binomial(m + l, l)?;
        num_traits::ToPrimitive::to_f64(&c).expect("small binomial") / 2f64.powi(l as i32)
    };
    let power = (m + l + 1) as i32;
    let li = l as i32;
    let mut budget = cfg.max_evaluations;
    let res = if y - 1.0 < 0.1 {
        let (a, b) = (y - 1.0, y + 1.0);
        let f = |s: f64| {
            let t = s.exp();
            let lo = (t - a).max(0.0);
            let hi = (b - t).max(0.0);
            (lo * hi).powi(li) * t.powi(1 - power)
        };
        quad::integrate(&f, &quad::uniform_edges(a.ln(), b.ln(), 0.5), rel_tol, 0.0, &mut budget)?
    } else {
        let f = |x: f64| ((1.0 - x) * (1.0 + x)).powi(li) / (y - x).powi(power);
        quad::integrate(&f, &quad::uniform_edges(-1.0, 1.0, 0.5), rel_tol, 0.0, &mut budget)?
    };
    Ok(QuadratureResult {
        value: prefactor * res.value,
        abs_error_estimate: prefactor * res.abs_error,
        panels_used: res.panels,
        evaluations: res.evaluations,
        converged: res.converged,
    })
}

/// `∫ k3 P_l(Δ) / (k3^2 + α^2)^(λ3+1) dk3` over the wavenumber triangle
/// `|k1 - k2| <= k3 <= k1 + k2`, where `Δ = (k1^2 + k2^2 - k3^2) / (2 k1 k2)`.
///
/// The step factor vanishes outside the triangle, so only this range
/// contributes.
pub fn integrate_kernel(
    l: u32,
    lambda3: u32,
    k1: f64,
    k2: f64,
    alpha: f64,
    rel_tol: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    check_rel_tol(rel_tol)?;
    check_positive("k1", k1)?;
    check_positive("k2", k2)?;
    check_positive("alpha", alpha)?;
    let power = (lambda3 + 1) as i32;
    let f = |k3: f64| {
        let delta = ((k1 * k1 + k2 * k2 - k3 * k3) / (2.0 * k1 * k2)).clamp(-1.0, 1.0);
        k3 / (k3 * k3 + alpha * alpha).powi(power) * legendre_p_unchecked(l, delta)
    };
    let lo = (k1 - k2).abs();
    let hi = k1 + k2;
    // Resolve the peak near k3 ~ α when the lower limit is close to zero.
    let width = ((hi - lo) / 16.0).min(alpha.max(1e-3 * (hi - lo)));
    let mut budget = cfg.max_evaluations;
    let r = quad::integrate(&f, &quad::uniform_edges(lo, hi, width), rel_tol, 0.0, &mut budget)?;
    Ok(QuadratureResult {
        value: r.value,
        abs_error_estimate: r.abs_error,
        panels_used: r.panels,
        evaluations: r.evaluations,
        converged: r.converged,
    })
}

/// `∫_{y0}^∞ q_kernel(l, L + 1, y) dy`, which should reproduce
/// `q_kernel(l, L, y0)`.
///
/// Mapped to `u = y0 / y ∈ (0, 1]`; the integrand decays like
/// `y^(-l-L-2)`, so the mapped integrand is bounded at `u = 0` and no
/// truncation is needed.
pub fn integrate_q_tail(
    l: u32,
    order: u32,
    y0: f64,
    rel_tol: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    check_rel_tol(rel_tol)?;
    if y0.is_nan() || y0 <= 1.0 {
        return Err(Error::Domain(format!("y0 must be > 1, got {y0}")));
    }
    let f = |u: f64| {
        let y = y0 / u;
        q_kernel(l, order + 1, y).unwrap_or(0.0) * y0 / (u * u)
    };
    // Finer panels near u = 1 where the integrand is steepest.
    let edges = [0.0, 0.25, 0.5, 0.7, 0.8, 0.9, 0.95, 0.98, 1.0];
    let mut budget = cfg.max_evaluations;
    let r = quad::integrate(&f, &edges, rel_tol, 0.0, &mut budget)?;
    Ok(QuadratureResult {
        value: r.value,
        abs_error_estimate: r.abs_error,
        panels_used: r.panels,
        evaluations: r.evaluations,
        converged: r.converged,
    })
}

/// Value of the polynomial through `points` at zero (Neville's scheme).
fn extrapolate_to_zero(points: &[(f64, f64)]) -> f64 {
    let mut p: Vec<f64> = points.iter().map(|&(_, v)| v).collect();
    let x: Vec<f64> = points.iter().map(|&(e, _)| e).collect();
    let n = p.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
        }
    }
    p[0]
}

/// `∫_0^∞ r^2 j_λ1(k1 r) j_λ2(k2 r) j_λ3(k3 r) dr` as the `ε -> 0` limit of the
/// damped integrals `∫ r^2 e^{-ε r} (...) dr`, extrapolated with a polynomial
/// in `ε` through every point of `eps_list`.
///
/// The successive extrapolants (using the first 2, 3, ... points) must move
/// by geometrically shrinking amounts; the last move is reported as the
/// error estimate.
pub fn integrate_three_bessel_regularized(
    spec: &ThreeBesselSpec,
    eps_list: &[f64],
    rel_tol: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    check_rel_tol(rel_tol)?;
    spec.validate()?;
    if eps_list.len() < 2 {
        return Err(invalid("eps_list needs at least two values"));
    }
    if eps_list.iter().any(|&e| !(e > 0.0 && e.is_finite()))
        || eps_list.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(invalid("eps_list must be positive and strictly decreasing"));
    }
    let factors = [
        (spec.lambda1, spec.k1),
        (spec.lambda2, spec.k2),
        (spec.lambda3, spec.k3),
    ];
    let mut points = Vec::with_capacity(eps_list.len());
    let mut quad_error: f64 = 0.0;
    let mut panels = 0;
    let mut evaluations = 0;
    let mut converged = true;
    for &eps in eps_list {
        let r = integrate_damped(2, &factors, eps, rel_tol, cfg)?;
        points.push((eps, r.value));
        quad_error = quad_error.max(r.abs_error_estimate);
        panels += r.panels_used;
        evaluations += r.evaluations;
        converged &= r.converged;
    }
    let estimates: Vec<f64> = (2..=points.len())
        .map(|k| extrapolate_to_zero(&points[..k]))
        .collect();
    let mut increments: Vec<f64> = std::iter::once((estimates[0] - points[0].1).abs())
        .chain(estimates.windows(2).map(|w| (w[1] - w[0]).abs()))
        .collect();
    let value = *estimates.last().expect("at least one estimate");
    let noise = 1e3 * quad_error + 1e-12 * value.abs().max(1.0);
    increments.iter_mut().for_each(|d| *d = d.max(noise));
    let shrinking = increments.windows(2).all(|w| w[1] < w[0] || w[1] <= noise);
    let abs_error = increments.last().copied().unwrap_or(noise) + quad_error;
    if !shrinking {
        return Err(Error::NonConvergence {
            evaluations,
            value,
            abs_error,
        });
    }
    Ok(QuadratureResult {
        value,
        abs_error_estimate: abs_error,
        panels_used: panels,
        evaluations,
        converged,
    })
}
