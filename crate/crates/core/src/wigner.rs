//! Exact Wigner 3j and 6j symbols for integer angular momenta.
//!
//! Every symbol with integer arguments squares to a rational number, so a
//! value is stored as `sign * sqrt(num / den)` with the fraction in lowest
//! terms. The Racah single sums are carried out in big-integer rationals.

use std::cmp::{max, min};
use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub mod surd;

pub use surd::Surd;

/// Largest angular momentum covered by the precomputed factorial table.
pub const MAX_J: u32 = 60;

const FACTORIAL_TABLE_LEN: usize = 4 * MAX_J as usize + 2;

fn factorial_table() -> &'static [BigUint] {
    static TABLE: OnceLock<Vec<BigUint>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::with_capacity(FACTORIAL_TABLE_LEN);
        let mut acc = BigUint::one();
        out.push(acc.clone());
        for k in 1..FACTORIAL_TABLE_LEN {
            acc *= k;
            out.push(acc.clone());
        }
        out
    })
}

fn factorial(n: i64) -> BigUint {
    debug_assert!(n >= 0);
    let n = n as usize;
    let table = factorial_table();
    if n < table.len() {
        return table[n].clone();
    }
    let mut acc = table[table.len() - 1].clone();
    for k in table.len()..=n {
        acc *= k;
    }
    acc
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Inputs of a 3j symbol `(j1 j2 j3; m1 m2 m3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AngularMomenta3j {
    pub j1: u32,
    pub j2: u32,
    pub j3: u32,
    pub m1: i32,
    pub m2: i32,
    pub m3: i32,
}

impl AngularMomenta3j {
    pub fn new(j: [u32; 3], m: [i32; 3]) -> Self {
        Self {
            j1: j[0],
            j2: j[1],
            j3: j[2],
            m1: m[0],
            m2: m[1],
            m3: m[2],
        }
    }

    /// The symbol `(j1 j2 j3; 0 0 0)`.
    pub fn zero_projection(j1: u32, j2: u32, j3: u32) -> Self {
        Self::new([j1, j2, j3], [0, 0, 0])
    }
}

/// Exact value `sign * sqrt(num / den)` of a Wigner symbol.
///
/// Zero is `sign = 0` with radicand `0/1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WignerValue {
    sign: i8,
    num: BigUint,
    den: BigUint,
}

impl WignerValue {
    pub fn zero() -> Self {
        Self {
            sign: 0,
            num: BigUint::zero(),
            den: BigUint::one(),
        }
    }

    /// Builds `sign * sqrt(square)`; `square` must be non-negative.
    pub fn from_signed_square(sign: i8, square: &BigRational) -> Self {
        assert!(!square.is_negative(), "radicand must be non-negative");
        if sign == 0 || square.is_zero() {
            return Self::zero();
        }
        // BigRational keeps the fraction reduced with a positive denominator.
        let num = square.numer().magnitude().clone();
        let den = square.denom().magnitude().clone();
        Self {
            sign: sign.signum(),
            num,
            den,
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn radicand_num(&self) -> &BigUint {
        &self.num
    }

    pub fn radicand_den(&self) -> &BigUint {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// The exact square of the value.
    pub fn square(&self) -> BigRational {
        ratio(self.num.clone(), self.den.clone())
    }

    /// `sign * num / den`, i.e. the value squared with the sign re-attached.
    pub fn signed_square(&self) -> BigRational {
        let s = self.square();
        if self.sign < 0 {
            -s
        } else {
            s
        }
    }

    /// Nearest-float conversion (within one ulp).
    ///
    /// The radicand is scaled by an even power of two, the integer square
    /// root is taken with about 115 significant bits, and the single rounding
    /// happens in the final `u128 -> f64` cast.
    pub fn to_f64(&self) -> f64 {
        self.to_f64_pair().0
    }

    /// `(hi, lo)` with `hi + lo` within about `2^-110` of the exact value,
    /// `hi` being [`WignerValue::to_f64`].
    pub fn to_f64_pair(&self) -> (f64, f64) {
        if self.sign == 0 {
            return (0.0, 0.0);
        }
        let bits_diff = self.num.bits() as i64 - self.den.bits() as i64;
        let mut shift = 230 - bits_diff;
        if shift % 2 != 0 {
            shift += 1;
        }
        let scaled = if shift >= 0 {
            (&self.num << shift as usize) / &self.den
        } else {
            &self.num / (&self.den << (-shift) as usize)
        };
        let root = scaled.sqrt();
        let digits = root.to_u64_digits();
        let mut wide: u128 = 0;
        for (i, d) in digits.iter().enumerate().take(2) {
            wide |= u128::from(*d) << (64 * i);
        }
        let hi = wide as f64;
        let lo = (wide as i128 - hi as i128) as f64;
        let sign = f64::from(self.sign);
        let exp = -(shift / 2);
        (sign * scale_pow2(hi, exp), sign * scale_pow2(lo, exp))
    }

    /// Canonical surd form `coefficient * sqrt(kernel)` for exact sums.
    pub fn to_surd(&self) -> Surd {
        Surd::from_wigner(self)
    }
}

fn scale_pow2(mut x: f64, mut exp: i64) -> f64 {
    while exp > 500 {
        x *= 2f64.powi(500);
        exp -= 500;
    }
    while exp < -500 {
        x *= 2f64.powi(-500);
        exp += 500;
    }
    x * 2f64.powi(exp as i32)
}

impl fmt::Display for WignerValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => {
                let prefix = if s < 0 { "-" } else { "" };
                write!(f, "{prefix}sqrt({}/{})", self.num, self.den)
            }
        }
    }
}

fn triangle(a: i64, b: i64, c: i64) -> bool {
    c >= (a - b).abs() && c <= a + b
}

/// Exact triangle coefficient `(a+b-c)!(a-b+c)!(-a+b+c)! / (a+b+c+1)!`.
fn triangle_coefficient(a: i64, b: i64, c: i64) -> BigRational {
    let num = factorial(a + b - c) * factorial(a - b + c) * factorial(-a + b + c);
    ratio(num, factorial(a + b + c + 1))
}

/// True iff `(l1 l2 l3; 0 0 0)` is nonzero: even sum and triangle rule.
pub fn threej_000_nonzero(l1: u32, l2: u32, l3: u32) -> bool {
    (l1 + l2 + l3).is_multiple_of(2) && triangle(i64::from(l1), i64::from(l2), i64::from(l3))
}

/// Exact Wigner 3j symbol via the Racah single-sum formula.
///
/// Total: symbols that violate a selection rule evaluate to exact zero.
pub fn wigner_3j(a: AngularMomenta3j) -> WignerValue {
    let (j1, j2, j3) = (i64::from(a.j1), i64::from(a.j2), i64::from(a.j3));
    let (m1, m2, m3) = (i64::from(a.m1), i64::from(a.m2), i64::from(a.m3));
    if m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3 {
        return WignerValue::zero();
    }
    if m1 + m2 + m3 != 0 || !triangle(j1, j2, j3) {
        return WignerValue::zero();
    }
    if m1 == 0 && m2 == 0 && (j1 + j2 + j3) % 2 != 0 {
        return WignerValue::zero();
    }

    let kmin = max(0, max(j2 - j3 - m1, j1 - j3 + m2));
    let kmax = min(j1 + j2 - j3, min(j1 - m1, j2 + m2));
    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let den = factorial(k)
            * factorial(j3 - j2 + k + m1)
            * factorial(j3 - j1 + k - m2)
            * factorial(j1 + j2 - j3 - k)
            * factorial(j1 - k - m1)
            * factorial(j2 - k + m2);
        let term = ratio(BigUint::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return WignerValue::zero();
    }

    let projections = factorial(j1 + m1)
        * factorial(j1 - m1)
        * factorial(j2 + m2)
        * factorial(j2 - m2)
        * factorial(j3 + m3)
        * factorial(j3 - m3);
    let square = triangle_coefficient(j1, j2, j3)
        * BigRational::from_integer(BigInt::from(projections))
        * &sum
        * &sum;
    let phase: i8 = if (j1 - j2 - m3).rem_euclid(2) == 0 { 1 } else { -1 };
    let sign = phase * sign_of(&sum);
    WignerValue::from_signed_square(sign, &square)
}

fn sign_of(r: &BigRational) -> i8 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Exact Wigner 6j symbol `{j1 j2 j3; j4 j5 j6}` via the Racah sum.
pub fn wigner_6j(j1: u32, j2: u32, j3: u32, j4: u32, j5: u32, j6: u32) -> WignerValue {
    let [j1, j2, j3, j4, j5, j6] = [j1, j2, j3, j4, j5, j6].map(i64::from);
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    if triads.iter().any(|&(a, b, c)| !triangle(a, b, c)) {
        return WignerValue::zero();
    }
    let lower = triads.map(|(a, b, c)| a + b + c);
    let upper = [j1 + j2 + j4 + j5, j2 + j3 + j5 + j6, j3 + j1 + j6 + j4];
    let tmin = *lower.iter().max().expect("four triads");
    let tmax = *upper.iter().min().expect("three sums");

    let mut sum = BigInt::zero();
    let mut common = BigUint::one();
    // Collect terms over a common denominator (the product of the smallest
    // factorials) to keep the rational sum cheap.
    let mut terms: Vec<(BigUint, BigUint, bool)> = Vec::new();
    for t in tmin..=tmax {
        let num = factorial(t + 1);
        let mut den = BigUint::one();
        for l in lower {
            den *= factorial(t - l);
        }
        for u in upper {
            den *= factorial(u - t);
        }
        common = common.lcm(&den);
        terms.push((num, den, t % 2 == 0));
    }
    for (num, den, positive) in terms {
        let scaled = BigInt::from(num * (&common / den));
        if positive {
            sum += scaled;
        } else {
            sum -= scaled;
        }
    }
    if sum.is_zero() {
        return WignerValue::zero();
    }
    let s = BigRational::new(sum, BigInt::from(common));
    let mut square = s.clone() * &s;
    for (a, b, c) in triads {
        square *= triangle_coefficient(a, b, c);
    }
    WignerValue::from_signed_square(sign_of(&s), &square)
}

pub mod checks {
    //! Exact identity checks on the 3j/6j engine (orthogonality and symmetry).

    use super::*;

    fn three_j(j: [u32; 3], m: [i32; 3]) -> WignerValue {
        wigner_3j(AngularMomenta3j::new(j, m))
    }

    /// `sum_{m1,m2} (2 j3 + 1) 3j(j1 j2 j3; m1 m2 m3) 3j(j1 j2 j3'; m1 m2 m3')`
    /// as an exact surd.
    pub fn orthogonality_sum(j1: u32, j2: u32, j3: u32, m3: i32, j3p: u32, m3p: i32) -> Surd {
        let mut total = Surd::zero();
        let (j1i, j2i) = (j1 as i32, j2 as i32);
        for m1 in -j1i..=j1i {
            for m2 in -j2i..=j2i {
                let a = three_j([j1, j2, j3], [m1, m2, m3]);
                if a.is_zero() {
                    continue;
                }
                let b = three_j([j1, j2, j3p], [m1, m2, m3p]);
                if b.is_zero() {
                    continue;
                }
                total = total + a.to_surd() * b.to_surd();
            }
        }
        total.scale(&BigRational::from_integer(BigInt::from(2 * j3 + 1)))
    }

    /// Exact orthogonality over every admissible pair `(j3, m3), (j3', m3')`
    /// with all momenta `<= jmax`. Returns `(passed, total)`.
    pub fn orthogonality(jmax: u32) -> (usize, usize) {
        let mut passed = 0;
        let mut total = 0;
        for j1 in 0..=jmax {
            for j2 in 0..=jmax {
                let lo = j1.abs_diff(j2);
                let hi = (j1 + j2).min(jmax);
                for j3 in lo..=hi {
                    for j3p in lo..=hi {
                        for m3 in -(j3 as i32)..=j3 as i32 {
                            // m3' must equal m3 for any nonzero term; also
                            // check one mismatched projection.
                            let others = [m3, m3 + 1];
                            for &m3p in &others {
                                if m3p.unsigned_abs() > j3p {
                                    continue;
                                }
                                let s = orthogonality_sum(j1, j2, j3, m3, j3p, m3p);
                                let expected = if j3 == j3p && m3 == m3p {
                                    Surd::one()
                                } else {
                                    Surd::zero()
                                };
                                total += 1;
                                if s == expected {
                                    passed += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        (passed, total)
    }

    /// Column permutation and sign-reversal symmetries of the 3j symbol for
    /// all momenta `<= jmax`. Returns `(passed, total)`.
    pub fn threej_symmetries(jmax: u32) -> (usize, usize) {
        let mut passed = 0;
        let mut total = 0;
        let ji = jmax as i32;
        for j1 in 0..=jmax {
            for j2 in 0..=jmax {
                for j3 in 0..=jmax {
                    for m1 in -ji..=ji {
                        for m2 in -ji..=ji {
                            let m3 = -m1 - m2;
                            if m1.unsigned_abs() > j1
                                || m2.unsigned_abs() > j2
                                || m3.unsigned_abs() > j3
                            {
                                continue;
                            }
                            let base = three_j([j1, j2, j3], [m1, m2, m3]);
                            let odd_phase = (j1 + j2 + j3) % 2 == 1;
                            let flip = |v: &WignerValue| {
                                if odd_phase {
                                    negate(v)
                                } else {
                                    v.clone()
                                }
                            };
                            let cases = [
                                (three_j([j2, j3, j1], [m2, m3, m1]), base.clone()),
                                (three_j([j3, j1, j2], [m3, m1, m2]), base.clone()),
                                (three_j([j2, j1, j3], [m2, m1, m3]), flip(&base)),
                                (three_j([j1, j3, j2], [m1, m3, m2]), flip(&base)),
                                (three_j([j3, j2, j1], [m3, m2, m1]), flip(&base)),
                                (three_j([j1, j2, j3], [-m1, -m2, -m3]), flip(&base)),
                            ];
                            for (got, want) in cases {
                                total += 1;
                                if got == want {
                                    passed += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        (passed, total)
    }

    /// Tetrahedral symmetries of the 6j symbol for all entries `<= jmax`.
    pub fn sixj_symmetries(jmax: u32) -> (usize, usize) {
        let mut passed = 0;
        let mut total = 0;
        let range = 0..=jmax;
        for a in range.clone() {
            for b in range.clone() {
                for c in range.clone() {
                    for d in range.clone() {
                        for e in range.clone() {
                            for f in range.clone() {
                                let base = wigner_6j(a, b, c, d, e, f);
                                let variants = [
                                    wigner_6j(b, a, c, e, d, f),
                                    wigner_6j(a, c, b, d, f, e),
                                    wigner_6j(c, b, a, f, e, d),
                                    wigner_6j(d, e, c, a, b, f),
                                    wigner_6j(a, e, f, d, b, c),
                                    wigner_6j(d, b, f, a, e, c),
                                ];
                                for v in variants {
                                    total += 1;
                                    if v == base {
                                        passed += 1;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        (passed, total)
    }

    fn negate(v: &WignerValue) -> WignerValue {
        WignerValue {
            sign: -v.sign,
            num: v.num.clone(),
            den: v.den.clone(),
        }
    }
}
