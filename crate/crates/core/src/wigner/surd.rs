//! Exact sums of square roots of rationals, `sum_k c_k sqrt(n_k)` with
//! distinct square-free kernels `n_k`.
//!
//! Radicands coming out of 3j/6j symbols only carry large primes to even
//! powers, so trial division by the small primes below the factorial table
//! limit leaves a perfect square and the decomposition is canonical.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{WignerValue, FACTORIAL_TABLE_LEN};

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let limit = FACTORIAL_TABLE_LEN as u32;
        (2..=limit)
            .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect()
    })
}

/// Splits `n` as `root^2 * kernel` with `kernel` square-free over the small
/// primes. A non-square cofactor is folded into the kernel unchanged.
fn split_square(n: &BigUint) -> (BigUint, BigUint) {
    let mut rest = n.clone();
    let mut root = BigUint::one();
    let mut kernel = BigUint::one();
    for &p in small_primes() {
        let p = BigUint::from(p);
        let mut count = 0u32;
        loop {
            let (q, r) = rest.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            rest = q;
            count += 1;
        }
        root *= p.pow(count / 2);
        if count % 2 == 1 {
            kernel *= &p;
        }
    }
    let s = rest.sqrt();
    if &s * &s == rest {
        root *= s;
    } else {
        kernel *= rest;
    }
    (root, kernel)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Surd {
    terms: BTreeMap<BigUint, BigRational>,
}

impl Surd {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    pub fn rational(r: BigRational) -> Self {
        let mut s = Self::zero();
        s.push(BigUint::one(), r);
        s
    }

    pub fn from_wigner(v: &WignerValue) -> Self {
        if v.is_zero() {
            return Self::zero();
        }
        // sqrt(p/q) = sqrt(p q) / q
        let (root, kernel) = split_square(&(v.radicand_num() * v.radicand_den()));
        let mut coeff = BigRational::new(BigInt::from(root), BigInt::from(v.radicand_den().clone()));
        if v.sign() < 0 {
            coeff = -coeff;
        }
        let mut s = Self::zero();
        s.push(kernel, coeff);
        s
    }

    fn push(&mut self, kernel: BigUint, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(kernel).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(mut self, factor: &BigRational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        for c in self.terms.values_mut() {
            *c *= factor;
        }
        self
    }

    /// Floating-point value (for diagnostics only).
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.terms
            .iter()
            .map(|(k, c)| c.to_f64().unwrap_or(f64::NAN) * k.to_f64().unwrap_or(f64::NAN).sqrt())
            .sum()
    }
}

impl Add for Surd {
    type Output = Surd;

    fn add(mut self, rhs: Surd) -> Surd {
        for (k, c) in rhs.terms {
            self.push(k, c);
        }
        self
    }
}

impl Mul for Surd {
    type Output = Surd;

    fn mul(self, rhs: Surd) -> Surd {
        let mut out = Surd::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                // sqrt(ka kb) = g sqrt((ka/g)(kb/g)) for square-free ka, kb
                let g = ka.gcd(kb);
                let kernel = (ka / &g) * (kb / &g);
                let coeff = ca * cb * BigRational::from_integer(BigInt::from(g));
                out.push(kernel, coeff);
            }
        }
        out
    }
}
