//! Closed forms for damped two- and three-spherical-Bessel integrals.
//!
//! The two-Bessel results fix the *product* of the coupling symbol
//! `(λ1 λ2 λ3; 0 0 0)` with the integral
//!
//! ```text
//! ∫_0^∞ r^(λ3+1) e^{-α r} j_λ1(k1 r) j_λ2(k2 r) dr
//!   = s / (2 k1 k2^(λ3+1)) · C(λ1, λ2, λ3; k2/k1, F_λ3(·, y))
//! ∫_0^∞ r^(λ3+2) e^{-α r} j_λ1(k1 r) j_λ2(k2 r) dr
//!   = s α / (2 k1^2 k2^(λ3+2)) · C(λ1, λ2, λ3; k2/k1, F_(λ3+1)(·, y))
//! ```
//!
//! where `y = (k1^2 + k2^2 + α^2) / (2 k1 k2)`, `F_M(l, y)` is
//! [`q_kernel`], `s = (-1)^((λ1+λ2-λ3)/2)` and `C` is the recoupling sum
//!
//! ```text
//! (2λ3+1)^½ Σ_{L=0}^{λ3} C(2λ3, 2L)^½ (k2/k1)^L Σ_l (2l+1)
//!     (λ1 λ3-L l; 0 0 0)(λ2 L l; 0 0 0){λ1 λ2 λ3; L λ3-L l} g(l).
//! ```
//!
//! Every phase is a real sign; no complex intermediates are formed.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use twofloat::TwoFloat;

use crate::error::{invalid, Error, Result};
use crate::specfun::{self, legendre_p_unchecked, legendre_q, q_kernel_in, real, Real};
use crate::wigner::{threej_000_nonzero, wigner_3j, wigner_6j, AngularMomenta3j, WignerValue};

/// Largest Bessel order accepted by the closed forms.
pub const MAX_LAMBDA: u32 = 20;

/// Which closed form produced a value. The labels are the method names
/// used in CLI output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Power `λ3 + 1` two-Bessel result.
    TwoBesselLinear,
    /// Equal-order special case (`λ3 = 0`).
    EqualOrder,
    /// Power `λ3 + 2` two-Bessel result.
    TwoBesselQuadratic,
    /// Undamped three-Bessel integral.
    ThreeBessel,
    /// Single-Bessel Laplace transform with power `λ + 1`.
    LaplaceLinear,
    /// Single-Bessel Laplace transform with power `λ + 2`.
    LaplaceQuadratic,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::TwoBesselLinear => "EQ_2_8",
            Method::EqualOrder => "EQ_2_9",
            Method::TwoBesselQuadratic => "EQ_2_11",
            Method::ThreeBessel => "EQ_2_1",
            Method::LaplaceLinear => "EQ_2_4",
            Method::LaplaceQuadratic => "EQ_2_10",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Method::TwoBesselLinear,
            Method::EqualOrder,
            Method::TwoBesselQuadratic,
            Method::ThreeBessel,
            Method::LaplaceLinear,
            Method::LaplaceQuadratic,
        ]
        .into_iter()
        .find(|m| m.label() == s)
        .ok_or_else(|| invalid(format!("unknown method {s:?}")))
    }
}

/// Radial power relative to the coupling order: `r^(λ3 + 1)` or `r^(λ3 + 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Offset {
    One,
    Two,
}

impl Offset {
    pub fn from_u32(v: u32) -> Result<Self> {
        match v {
            1 => Ok(Offset::One),
            2 => Ok(Offset::Two),
            _ => Err(invalid(format!("offset must be 1 or 2, got {v}"))),
        }
    }

    pub fn as_u32(self) -> u32 {
        match self {
            Offset::One => 1,
            Offset::Two => 2,
        }
    }
}

/// `∫_0^∞ r^n e^{-α r} j_λ1(k1 r) j_λ2(k2 r) dr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralSpec {
    pub lambda1: u32,
    pub lambda2: u32,
    pub k1: f64,
    pub k2: f64,
    pub alpha: f64,
    pub n: u32,
}

impl IntegralSpec {
    pub fn new(n: u32, lambda1: u32, lambda2: u32, k1: f64, k2: f64, alpha: f64) -> Result<Self> {
        let spec = Self {
            lambda1,
            lambda2,
            k1,
            k2,
            alpha,
            n,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("k1", self.k1)?;
        check_positive("k2", self.k2)?;
        check_positive("alpha", self.alpha)?;
        check_lambda(self.lambda1)?;
        check_lambda(self.lambda2)
    }

    pub fn y(&self) -> f64 {
        (self.k1 * self.k1 + self.k2 * self.k2 + self.alpha * self.alpha) / (2.0 * self.k1 * self.k2)
    }

    /// `1 / (y - 1)`, evaluated as `2 k1 k2 / ((k1 - k2)^2 + α^2)`.
    pub fn condition(&self) -> f64 {
        condition(self.k1, self.k2, self.alpha)
    }

    /// `(λ2, k2, λ1, k1)` swapped; the integral is invariant.
    pub fn swapped(&self) -> Self {
        Self {
            lambda1: self.lambda2,
            lambda2: self.lambda1,
            k1: self.k2,
            k2: self.k1,
            ..*self
        }
    }
}

/// `∫_0^∞ r^2 j_λ1(k1 r) j_λ2(k2 r) j_λ3(k3 r) dr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeBesselSpec {
    pub lambda1: u32,
    pub lambda2: u32,
    pub lambda3: u32,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl ThreeBesselSpec {
    pub fn new(lambdas: [u32; 3], ks: [f64; 3]) -> Result<Self> {
        let spec = Self {
            lambda1: lambdas[0],
            lambda2: lambdas[1],
            lambda3: lambdas[2],
            k1: ks[0],
            k2: ks[1],
            k3: ks[2],
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("k1", self.k1)?;
        check_positive("k2", self.k2)?;
        check_positive("k3", self.k3)?;
        check_lambda(self.lambda1)?;
        check_lambda(self.lambda2)?;
        check_lambda(self.lambda3)
    }

    pub fn delta(&self) -> f64 {
        (self.k1 * self.k1 + self.k2 * self.k2 - self.k3 * self.k3) / (2.0 * self.k1 * self.k2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    pub method: Method,
    /// `1 / (y - 1)`; grows without bound as `k1 -> k2`, `α -> 0`.
    pub condition: f64,
    pub oracle_value: Option<f64>,
    pub oracle_error: Option<f64>,
}

impl EvalResult {
    fn new(value: f64, method: Method, condition: f64) -> Self {
        Self {
            value,
            method,
            condition,
            oracle_value: None,
            oracle_error: None,
        }
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

fn check_lambda(l: u32) -> Result<()> {
    if l > MAX_LAMBDA {
        return Err(invalid(format!("Bessel order {l} exceeds {MAX_LAMBDA}")));
    }
    Ok(())
}

fn condition(k1: f64, k2: f64, alpha: f64) -> f64 {
    let d = k1 - k2;
    2.0 * k1 * k2 / (d * d + alpha * alpha)
}

/// `y = (k1^2 + k2^2 + α^2) / (2 k1 k2)`; always `> 1` for `α > 0`.
pub fn y_param(k1: f64, k2: f64, alpha: f64) -> Result<f64> {
    check_positive("k1", k1)?;
    check_positive("k2", k2)?;
    check_positive("alpha", alpha)?;
    Ok((k1 * k1 + k2 * k2 + alpha * alpha) / (2.0 * k1 * k2))
}

/// `Δ = (k1^2 + k2^2 - k3^2) / (2 k1 k2)`, the cosine of the angle between
/// `k1` and `k2` in the wavenumber triangle.
pub fn delta_param(k1: f64, k2: f64, k3: f64) -> Result<f64> {
    check_positive("k1", k1)?;
    check_positive("k2", k2)?;
    check_positive("k3", k3)?;
    Ok((k1 * k1 + k2 * k2 - k3 * k3) / (2.0 * k1 * k2))
}

/// Triangle step: 1 inside `|Δ| < 1`, 0 outside, ½ on the boundary.
pub fn beta_step(delta: f64) -> f64 {
    let a = delta.abs();
    if a < 1.0 {
        1.0
    } else if a == 1.0 {
        0.5
    } else {
        0.0
    }
}

/// `∫_0^∞ r^(λ3 + offset) e^{-α r} j_λ3(k3 r) dr`:
///
/// * offset 1: `(2 k3)^λ3 λ3! / (k3^2 + α^2)^(λ3+1)`
/// * offset 2: `2 α (2 k3)^λ3 (λ3+1)! / (k3^2 + α^2)^(λ3+2)` (the α-derivative
///   of the first).
pub fn laplace_single_bessel(lambda3: u32, alpha: f64, k3: f64, offset: u32) -> Result<f64> {
    let offset = Offset::from_u32(offset)?;
    check_positive("alpha", alpha)?;
    check_positive("k3", k3)?;
    if lambda3 > 50 {
        return Err(invalid(format!("lambda3 {lambda3} exceeds 50")));
    }
    let s = k3 * k3 + alpha * alpha;
    let mut v = 1.0 / s;
    for i in 1..=lambda3 {
        v *= 2.0 * k3 * f64::from(i) / s;
    }
    Ok(match offset {
        Offset::One => v,
        Offset::Two => 2.0 * alpha * f64::from(lambda3 + 1) * v / s,
    })
}

/// `(l_min, l_max)` for the inner sum, from the selection rules of
/// `(λ1 λ3-L l; 0 0 0)` and `(λ2 L l; 0 0 0)`. Empty when `l_min > l_max`.
pub fn summation_bounds(lambda1: u32, lambda2: u32, lambda3: u32, script_l: u32) -> Result<(u32, u32)> {
    if script_l > lambda3 {
        return Err(invalid(format!("script_l {script_l} exceeds lambda3 {lambda3}")));
    }
    let a = lambda3 - script_l;
    let lo = lambda1.abs_diff(a).max(lambda2.abs_diff(script_l));
    let hi = (lambda1 + a).min(lambda2 + script_l);
    Ok((lo, hi))
}

/// One nonzero term of the recoupling sum:
/// `coefficient = (2λ3+1)^½ C(2λ3,2L)^½ (2l+1) 3j 3j 6j`, exact up to one rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingTerm {
    pub script_l: u32,
    pub l: u32,
    pub coefficient: f64,
    /// Rounding residue: `coefficient + coefficient_lo` carries ~110 bits.
    coefficient_lo: f64,
}

fn exact_product(factors: &[&WignerValue], extra: BigRational) -> WignerValue {
    let mut sign = 1i8;
    let mut square = extra;
    for f in factors {
        sign *= f.sign();
        square *= f.square();
    }
    WignerValue::from_signed_square(sign, &square)
}

fn compute_coupling_terms(lambda1: u32, lambda2: u32, lambda3: u32) -> Vec<CouplingTerm> {
    let mut out = Vec::new();
    for script_l in 0..=lambda3 {
        let (lo, hi) = summation_bounds(lambda1, lambda2, lambda3, script_l).expect("script_l <= lambda3");
        if lo > hi {
            continue;
        }
        let binom = specfun::binomial(2 * lambda3, 2 * script_l).expect("2L <= 2 lambda3");
        for l in lo..=hi {
            let a = lambda3 - script_l;
            if !threej_000_nonzero(lambda1, a, l) || !threej_000_nonzero(lambda2, script_l, l) {
                continue;
            }
            let t1 = wigner_3j(AngularMomenta3j::zero_projection(lambda1, a, l));
            let t2 = wigner_3j(AngularMomenta3j::zero_projection(lambda2, script_l, l));
            let six = wigner_6j(lambda1, lambda2, lambda3, script_l, a, l);
            if six.is_zero() {
                continue;
            }
            // (2λ3+1) C(2λ3, 2L) (2l+1)^2 under the square root
            let extra = BigRational::from_integer(
                BigInt::from(2 * lambda3 + 1) * BigInt::from(binom.clone()) * BigInt::from((2 * l + 1) * (2 * l + 1)),
            );
            let (coefficient, coefficient_lo) = exact_product(&[&t1, &t2, &six], extra).to_f64_pair();
            out.push(CouplingTerm {
                script_l,
                l,
                coefficient,
                coefficient_lo,
            });
        }
    }
    out
}

type CouplingKey = (u32, u32, u32);

/// Nonzero terms of the recoupling sum for `(λ1, λ2, λ3)`, memoised.
pub fn coupling_terms(lambda1: u32, lambda2: u32, lambda3: u32) -> Arc<Vec<CouplingTerm>> {
    static CACHE: OnceLock<Mutex<HashMap<CouplingKey, Arc<Vec<CouplingTerm>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (lambda1, lambda2, lambda3);
    if let Some(terms) = cache.lock().expect("coupling cache poisoned").get(&key) {
        return Arc::clone(terms);
    }
    let terms = Arc::new(compute_coupling_terms(lambda1, lambda2, lambda3));
    cache
        .lock()
        .expect("coupling cache poisoned")
        .entry(key)
        .or_insert(terms)
        .clone()
}

fn recoupling_sum<T: Real>(
    lambda1: u32,
    lambda2: u32,
    lambda3: u32,
    ratio: T,
    mut g: impl FnMut(u32) -> T,
) -> T {
    let mut sum = T::zero();
    for term in coupling_terms(lambda1, lambda2, lambda3).iter() {
        let c = real::<T>(term.coefficient) + real::<T>(term.coefficient_lo);
        sum = sum + c * ratio.powi(term.script_l as i32) * g(term.l);
    }
    sum
}

/// `(-1)^((λ1 + λ2 - λ3) / 2)`, the real value of `i^(λ1+λ2-λ3)` when the
/// exponent is even.
fn even_phase(lambda1: u32, lambda2: u32, lambda3: u32) -> f64 {
    let e = i64::from(lambda1) + i64::from(lambda2) - i64::from(lambda3);
    debug_assert!(e.rem_euclid(2) == 0);
    if (e / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(λ1 λ2 λ3; 0 0 0) × ∫_0^∞ r^2 j_λ1(k1 r) j_λ2(k2 r) j_λ3(k3 r) dr`.
pub fn three_bessel_product(spec: &ThreeBesselSpec) -> Result<f64> {
    spec.validate()?;
    let (l1, l2, l3) = (spec.lambda1, spec.lambda2, spec.lambda3);
    let delta = spec.delta();
    let beta = beta_step(delta);
    if beta == 0.0 || !threej_000_nonzero(l1, l2, l3) {
        return Ok(0.0);
    }
    let delta = delta.clamp(-1.0, 1.0);
    let sum = recoupling_sum(l1, l2, l3, spec.k2 / spec.k1, |l| legendre_p_unchecked(l, delta));
    let prefactor = PI * beta / (4.0 * spec.k1 * spec.k2 * spec.k3)
        * even_phase(l1, l2, l3)
        * (spec.k1 / spec.k3).powi(l3 as i32);
    Ok(prefactor * sum)
}

/// `(λ1 λ2 λ3; 0 0 0) × ∫_0^∞ r^(λ3+offset) e^{-α r} j_λ1(k1 r) j_λ2(k2 r) dr`.
///
/// Returns exact zero, without touching the Q functions, when
/// `λ1 + λ2 + λ3` is odd or the triangle rule fails.
pub fn two_bessel_product(
    lambda1: u32,
    lambda2: u32,
    lambda3: u32,
    k1: f64,
    k2: f64,
    alpha: f64,
    offset: Offset,
) -> Result<EvalResult> {
    let y = y_param(k1, k2, alpha)?;
    check_lambda(lambda1)?;
    check_lambda(lambda2)?;
    check_lambda(lambda3)?;
    let method = match offset {
        Offset::One => Method::TwoBesselLinear,
        Offset::Two => Method::TwoBesselQuadratic,
    };
    let cond = condition(k1, k2, alpha);
    if !threej_000_nonzero(lambda1, lambda2, lambda3) {
        return Ok(EvalResult::new(0.0, method, cond));
    }
    let order = lambda3 + offset.as_u32() - 1;
    specfun::check_q_order(order)?;
    // The sum cancels by many orders near y = 1 at high λ3, so it runs in
    // double-double with y formed from the inputs at that precision.
    let (k1d, k2d, ad) = (TwoFloat::from(k1), TwoFloat::from(k2), TwoFloat::from(alpha));
    let y_dd = (k1d * k1d + k2d * k2d + ad * ad).quot(k1d * k2d * 2.0);
    debug_assert!((y_dd.hi() - y).abs() <= 4.0 * f64::EPSILON * y);
    let sum = recoupling_sum(lambda1, lambda2, lambda3, k2d.quot(k1d), |l| q_kernel_in(l, order, y_dd)).hi();
    let phase = even_phase(lambda1, lambda2, lambda3);
    let prefactor = match offset {
        Offset::One => phase / (2.0 * k1 * k2.powi(lambda3 as i32 + 1)),
        Offset::Two => phase * alpha / (2.0 * k1 * k1 * k2.powi(lambda3 as i32 + 2)),
    };
    Ok(EvalResult::new(prefactor * sum, method, cond))
}

/// `∫_0^∞ r e^{-α r} j_L(k1 r) j_L(k2 r) dr = Q_L(y) / (2 k1 k2)`.
pub fn two_bessel_equal_order(l: u32, k1: f64, k2: f64, alpha: f64) -> Result<EvalResult> {
    let y = y_param(k1, k2, alpha)?;
    check_lambda(l)?;
    let value = legendre_q(l, y)? / (2.0 * k1 * k2);
    Ok(EvalResult::new(value, Method::EqualOrder, condition(k1, k2, alpha)))
}

/// The coupling order the closed forms use for a bare integral with power
/// `n`: `n - 1` if that gives an even `λ1 + λ2 + λ3`, else `n - 2`.
pub fn select_coupling(n: u32, lambda1: u32, lambda2: u32) -> Result<(u32, Offset)> {
    let inapplicable = |reason: String| Error::FormulaInapplicable {
        power: n,
        lambda1,
        lambda2,
        reason,
    };
    if n == 0 {
        return Err(invalid("bare_integral needs n >= 1"));
    }
    let (lambda3, offset) = if (lambda1 + lambda2 + n - 1).is_multiple_of(2) {
        (n - 1, Offset::One)
    } else if n >= 2 {
        (n - 2, Offset::Two)
    } else {
        return Err(inapplicable(format!(
            "n = 1 with odd lambda1 + lambda2 = {} needs lambda3 = -1",
            lambda1 + lambda2
        )));
    };
    if !threej_000_nonzero(lambda1, lambda2, lambda3) {
        return Err(inapplicable(format!(
            "parity-selected lambda3 = {lambda3} violates |lambda1 - lambda2| <= lambda3 <= lambda1 + lambda2"
        )));
    }
    Ok((lambda3, offset))
}

/// `∫_0^∞ r^n e^{-α r} j_λ1(k1 r) j_λ2(k2 r) dr`, recovered from the
/// coupled product by dividing by the exact `(λ1 λ2 λ3; 0 0 0)`.
///
/// Fails with [`Error::FormulaInapplicable`] where no closed form exists.
pub fn bare_integral(spec: &IntegralSpec) -> Result<EvalResult> {
    spec.validate()?;
    let (lambda3, offset) = select_coupling(spec.n, spec.lambda1, spec.lambda2)?;
    let product = two_bessel_product(
        spec.lambda1,
        spec.lambda2,
        lambda3,
        spec.k1,
        spec.k2,
        spec.alpha,
        offset,
    )?;
    let outer = wigner_3j(AngularMomenta3j::zero_projection(spec.lambda1, spec.lambda2, lambda3)).to_f64();
    Ok(EvalResult {
        value: product.value / outer,
        ..product
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn parameter_examples() {
        assert_eq!(y_param(1.0, 1.0, 1.0).unwrap(), 1.5);
        assert_eq!(y_param(1.0, 2.0, 0.5).unwrap(), 1.3125);
        assert!(y_param(1.0, 1.0, 1e-6).unwrap() > 1.0);
        assert!(y_param(1.0, 1.0, 0.0).is_err());
        assert_eq!(delta_param(1.0, 1.0, 1.0).unwrap(), 0.5);
        assert_eq!(delta_param(1.0, 1.0, 2.0).unwrap(), -1.0);
        assert_eq!(delta_param(3.0, 4.0, 5.0).unwrap(), 0.0);
        assert!(delta_param(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta_step(0.3), 1.0);
        assert_eq!(beta_step(1.7), 0.0);
        assert_eq!(beta_step(1.0), 0.5);
        assert_eq!(beta_step(-1.0), 0.5);
    }

    #[test]
    fn laplace_examples() {
        assert_eq!(laplace_single_bessel(0, 1.0, 1.0, 1).unwrap(), 0.5);
        assert_eq!(laplace_single_bessel(0, 1.0, 1.0, 2).unwrap(), 0.5);
        let v = laplace_single_bessel(2, 0.5, 2.0, 1).unwrap();
        assert!(rel(v, 16.0 * 2.0 / 4.25f64.powi(3)) < 1e-15);
        assert!((v - 0.4168532465).abs() < 1e-10);
        assert!(laplace_single_bessel(0, 1.0, 1.0, 3).is_err());
    }

    #[test]
    fn summation_bounds_examples() {
        assert_eq!(summation_bounds(0, 0, 0, 0).unwrap(), (0, 0));
        assert_eq!(summation_bounds(1, 1, 2, 1).unwrap(), (0, 2));
        assert_eq!(summation_bounds(2, 1, 1, 0).unwrap(), (1, 1));
        assert!(summation_bounds(0, 0, 1, 2).is_err());
    }

    #[test]
    fn three_bessel_trivial_cases() {
        let s = ThreeBesselSpec::new([0, 0, 0], [1.0, 1.0, 1.0]).unwrap();
        assert!(rel(three_bessel_product(&s).unwrap(), PI / 4.0) < 1e-15);
        let s = ThreeBesselSpec::new([0, 0, 0], [1.0, 1.0, 3.0]).unwrap();
        assert_eq!(three_bessel_product(&s).unwrap(), 0.0);
        let s = ThreeBesselSpec::new([0, 0, 0], [1.0, 1.0, 2.0]).unwrap();
        // boundary: ½ ∫ sin²r sin2r / r dr = ½ · π/8
        assert!(rel(three_bessel_product(&s).unwrap(), PI / 16.0) < 1e-15);
        let s = ThreeBesselSpec::new([1, 1, 1], [1.0, 1.0, 1.0]).unwrap();
        assert_eq!(three_bessel_product(&s).unwrap(), 0.0);
    }

    #[test]
    fn log_closed_form() {
        let r = two_bessel_product(0, 0, 0, 1.0, 1.0, 1.0, Offset::One).unwrap();
        assert!(rel(r.value, 0.25 * 5f64.ln()) < 1e-15);
        assert_eq!(r.method, Method::TwoBesselLinear);
        assert!(rel(r.condition, 2.0) < 1e-15);
        let e = two_bessel_equal_order(0, 1.0, 2.0, 1.0).unwrap();
        // ¼ · ½ ln(((k1+k2)^2+α^2)/((k1-k2)^2+α^2))
        assert!(rel(e.value, 0.125 * 5f64.ln()) < 1e-15);
        assert!((e.value - 0.2011797390).abs() < 1e-10);
    }

    #[test]
    fn parity_zero_is_exact() {
        for offset in [Offset::One, Offset::Two] {
            let r = two_bessel_product(1, 1, 1, 1.0, 2.0, 0.5, offset).unwrap();
            assert_eq!(r.value, 0.0);
            let r = two_bessel_product(0, 3, 1, 1.0, 2.0, 0.5, offset).unwrap();
            assert_eq!(r.value, 0.0);
        }
    }

    #[test]
    fn bare_integral_routes() {
        let r = bare_integral(&IntegralSpec::new(1, 0, 0, 1.0, 1.0, 1.0).unwrap()).unwrap();
        assert!(rel(r.value, 0.25 * 5f64.ln()) < 1e-15);
        assert_eq!(r.method, Method::TwoBesselLinear);
        // ∫ e^{-r} sin^2 r dr = ½ (1 - 1/5)
        let r = bare_integral(&IntegralSpec::new(2, 0, 0, 1.0, 1.0, 1.0).unwrap()).unwrap();
        assert!(rel(r.value, 0.4) < 1e-14);
        assert_eq!(r.method, Method::TwoBesselQuadratic);
        let e = bare_integral(&IntegralSpec::new(1, 2, 0, 1.0, 1.0, 1.0).unwrap()).unwrap_err();
        assert!(matches!(e, Error::FormulaInapplicable { .. }));
        let e = bare_integral(&IntegralSpec::new(1, 1, 0, 1.0, 1.0, 1.0).unwrap()).unwrap_err();
        assert!(matches!(e, Error::FormulaInapplicable { .. }));
        assert!(bare_integral(&IntegralSpec { n: 0, ..IntegralSpec::new(1, 0, 0, 1.0, 1.0, 1.0).unwrap() }).is_err());
    }

    #[test]
    fn equal_order_matches_general_route() {
        for l in 0..=6 {
            for &(k1, k2, a) in &[(1.0, 1.0, 1.0), (0.5, 2.0, 0.5), (3.0, 1.0, 2.0)] {
                let e = two_bessel_equal_order(l, k1, k2, a).unwrap();
                let b = bare_integral(&IntegralSpec::new(1, l, l, k1, k2, a).unwrap()).unwrap();
                assert!(rel(e.value, b.value) < 1e-12, "l={l}");
                let w = wigner_3j(AngularMomenta3j::zero_projection(l, l, 0)).to_f64();
                let p = two_bessel_product(l, l, 0, k1, k2, a, Offset::One).unwrap();
                assert!(rel(e.value * w, p.value) < 1e-12);
            }
        }
    }

    #[test]
    fn method_labels_round_trip() {
        for m in [
            Method::TwoBesselLinear,
            Method::EqualOrder,
            Method::TwoBesselQuadratic,
            Method::ThreeBessel,
            Method::LaplaceLinear,
            Method::LaplaceQuadratic,
        ] {
            assert_eq!(m.label().parse::<Method>().unwrap(), m);
        }
        assert!("EQ_9".parse::<Method>().is_err());
    }

    #[test]
    fn coupling_terms_simple() {
        // (0 0 0): single term with coefficient 1
        let t = coupling_terms(0, 0, 0);
        assert_eq!(t.len(), 1);
        assert!((t[0].coefficient - 1.0).abs() < 1e-15);
    }
}
