// Copyright 2026 The qdich Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Exact arithmetic in Q(ω), ω = e^{iπ/4}.
//!
//! Elements are stored in the power basis `c0 + c1·ω + c2·ω² + c3·ω³` with
//! the reduction rule ω⁴ = −1. The coefficient ring is a type parameter: the
//! default [`BigRational`] gives the field itself, while machine or big
//! integers give the ring Z[ω] used by the exact statevector.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Coefficient ring for [`Cyclotomic`].
pub trait Coefficient:
    Clone + fmt::Debug + PartialEq + Num + Signed + ToPrimitive + FromPrimitive + Send + Sync
{
    /// Writes the coefficient in the textual serialization format.
    fn fmt_coeff(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result;
}

impl Coefficient for BigRational {
    fn fmt_coeff(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl Coefficient for BigInt {
    fn fmt_coeff(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}/1")
    }
}

impl Coefficient for i128 {
    fn fmt_coeff(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}/1")
    }
}

impl Coefficient for i64 {
    fn fmt_coeff(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}/1")
    }
}

/// An element `c0 + c1·ω + c2·ω² + c3·ω³` of Q(ω) (or Z[ω] for integer `T`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cyclotomic<T = BigRational> {
    c: [T; 4],
}

impl<T: Coefficient> Cyclotomic<T> {
    pub fn new(c0: T, c1: T, c2: T, c3: T) -> Self {
        Cyclotomic { c: [c0, c1, c2, c3] }
    }

    pub fn from_coeffs(c: [T; 4]) -> Self {
        Cyclotomic { c }
    }

    pub fn coeffs(&self) -> &[T; 4] {
        &self.c
    }

    pub fn into_coeffs(self) -> [T; 4] {
        self.c
    }

    pub fn from_integer(v: i64) -> Self {
        Self::from_coeff(T::from_i64(v).expect("coefficient ring holds small integers"))
    }

    pub fn from_coeff(v: T) -> Self {
        Cyclotomic::new(v, T::zero(), T::zero(), T::zero())
    }

    pub fn omega() -> Self {
        Self::root_power(1)
    }

    /// ω^(k mod 8).
    pub fn root_power(k: i64) -> Self {
        let k = k.rem_euclid(8) as usize;
        let mut c = [T::zero(), T::zero(), T::zero(), T::zero()];
        if k < 4 {
            c[k] = T::one();
        } else {
            c[k - 4] = -T::one();
        }
        Cyclotomic { c }
    }

    /// √2 = ω − ω³.
    pub fn sqrt2() -> Self {
        Cyclotomic::new(T::zero(), T::one(), T::zero(), -T::one())
    }

    /// Multiplication by ω^k, which only permutes and negates coefficients.
    pub fn mul_root(&self, k: i64) -> Self {
        let k = k.rem_euclid(8) as usize;
        let mut out = [T::zero(), T::zero(), T::zero(), T::zero()];
        for (i, ci) in self.c.iter().enumerate() {
            let j = i + k;
            let (slot, negate) = (j % 4, (j / 4) % 2 == 1);
            out[slot] = if negate { -ci.clone() } else { ci.clone() };
        }
        Cyclotomic { c: out }
    }

    /// Complex conjugate: ω ↦ −ω³, ω² ↦ −ω², ω³ ↦ −ω.
    pub fn conj(&self) -> Self {
        let [c0, c1, c2, c3] = &self.c;
        Cyclotomic::new(c0.clone(), -c3.clone(), -c2.clone(), -c1.clone())
    }

    /// `x · conj(x)`, a real element of Q(√2).
    pub fn norm_sqr(&self) -> Self {
        self * &self.conj()
    }

    pub fn is_real(&self) -> bool {
        self.c[2].is_zero() && self.c[3] == -self.c[1].clone()
    }

    /// True when the element lies in the coefficient ring itself.
    pub fn is_rational(&self) -> bool {
        self.c[1].is_zero() && self.c[2].is_zero() && self.c[3].is_zero()
    }

    pub fn scale(&self, s: &T) -> Self {
        Cyclotomic {
            c: [
                self.c[0].clone() * s.clone(),
                self.c[1].clone() * s.clone(),
                self.c[2].clone() * s.clone(),
                self.c[3].clone() * s.clone(),
            ],
        }
    }

    pub fn map<U: Coefficient>(&self, f: impl Fn(&T) -> U) -> Cyclotomic<U> {
        Cyclotomic {
            c: [f(&self.c[0]), f(&self.c[1]), f(&self.c[2]), f(&self.c[3])],
        }
    }

    /// Evaluates the basis expansion at ω = e^{iπ/4}.
    pub fn to_complex(&self) -> (f64, f64) {
        let z = self.to_c64();
        (z.re, z.im)
    }

    pub fn to_c64(&self) -> Complex64 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let f = |t: &T| t.to_f64().unwrap_or(f64::NAN);
        let (c0, c1, c2, c3) = (f(&self.c[0]), f(&self.c[1]), f(&self.c[2]), f(&self.c[3]));
        Complex64::new(c0 + h * (c1 - c3), c2 + h * (c1 + c3))
    }
}

impl Cyclotomic<BigRational> {
    /// 1/√2 = (ω − ω³)/2.
    pub fn inv_sqrt2() -> Self {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        Cyclotomic::new(BigRational::zero(), half.clone(), BigRational::zero(), -half)
    }

    /// (1/√2)^e.
    pub fn inv_sqrt2_pow(e: u32) -> Self {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2)).pow((e / 2) as i32);
        let base = Cyclotomic::from_coeff(half);
        if e % 2 == 1 {
            base * Self::inv_sqrt2()
        } else {
            base
        }
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        Self::from_coeff(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// Largest bit length among the numerators and denominators.
    pub fn bit_length(&self) -> u64 {
        self.c
            .iter()
            .map(|r| r.numer().bits().max(r.denom().bits()))
            .max()
            .unwrap_or(0)
    }
}

impl<T: Coefficient> Zero for Cyclotomic<T> {
    fn zero() -> Self {
        Cyclotomic::from_coeff(T::zero())
    }

    fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }
}

impl<T: Coefficient> One for Cyclotomic<T> {
    fn one() -> Self {
        Cyclotomic::from_coeff(T::one())
    }
}

impl<T: Coefficient> Add<&Cyclotomic<T>> for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;

    fn add(self, rhs: &Cyclotomic<T>) -> Cyclotomic<T> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<T: Coefficient> Add for Cyclotomic<T> {
    type Output = Cyclotomic<T>;

    fn add(mut self, rhs: Cyclotomic<T>) -> Cyclotomic<T> {
        self += &rhs;
        self
    }
}

impl<T: Coefficient> AddAssign<&Cyclotomic<T>> for Cyclotomic<T> {
    fn add_assign(&mut self, rhs: &Cyclotomic<T>) {
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a = a.clone() + b.clone();
        }
    }
}

impl<T: Coefficient> Sub<&Cyclotomic<T>> for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;

    fn sub(self, rhs: &Cyclotomic<T>) -> Cyclotomic<T> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<T: Coefficient> Sub for Cyclotomic<T> {
    type Output = Cyclotomic<T>;

    fn sub(mut self, rhs: Cyclotomic<T>) -> Cyclotomic<T> {
        self -= &rhs;
        self
    }
}

impl<T: Coefficient> SubAssign<&Cyclotomic<T>> for Cyclotomic<T> {
    fn sub_assign(&mut self, rhs: &Cyclotomic<T>) {
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a = a.clone() - b.clone();
        }
    }
}

impl<T: Coefficient> Neg for Cyclotomic<T> {
    type Output = Cyclotomic<T>;

    fn neg(self) -> Cyclotomic<T> {
        let [c0, c1, c2, c3] = self.c;
        Cyclotomic::new(-c0, -c1, -c2, -c3)
    }
}

impl<T: Coefficient> Neg for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;

    fn neg(self) -> Cyclotomic<T> {
        -self.clone()
    }
}

impl<T: Coefficient> Mul<&Cyclotomic<T>> for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;

    fn mul(self, rhs: &Cyclotomic<T>) -> Cyclotomic<T> {
        let mut out = [T::zero(), T::zero(), T::zero(), T::zero()];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let prod = a.clone() * b.clone();
                let k = i + j;
                if k < 4 {
                    out[k] = out[k].clone() + prod;
                } else {
                    out[k - 4] = out[k - 4].clone() - prod;
                }
            }
        }
        Cyclotomic { c: out }
    }
}

impl<T: Coefficient> Mul for Cyclotomic<T> {
    type Output = Cyclotomic<T>;

    fn mul(self, rhs: Cyclotomic<T>) -> Cyclotomic<T> {
        &self * &rhs
    }
}

impl<T: Coefficient> fmt::Display for Cyclotomic<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.c[0].fmt_coeff(f)?;
        f.write_str(" + ")?;
        self.c[1].fmt_coeff(f)?;
        f.write_str("*w + ")?;
        self.c[2].fmt_coeff(f)?;
        f.write_str("*w^2 + ")?;
        self.c[3].fmt_coeff(f)?;
        f.write_str("*w^3")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("malformed cyclotomic literal: {0}")]
pub struct ParseCyclotomicError(String);

impl FromStr for Cyclotomic<BigRational> {
    type Err = ParseCyclotomicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseCyclotomicError(s.to_string());
        let parts: Vec<&str> = s.split(" + ").map(str::trim).collect();
        if parts.len() != 4 {
            return Err(err());
        }
        let suffixes = ["", "*w", "*w^2", "*w^3"];
        let mut c = [BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero()];
        for (k, (part, suffix)) in parts.iter().zip(suffixes).enumerate() {
            let body = part.strip_suffix(suffix).ok_or_else(err)?;
            let (p, q) = body.split_once('/').unwrap_or((body, "1"));
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            c[k] = BigRational::new(p, q);
        }
        Ok(Cyclotomic { c })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type Q = Cyclotomic;

    fn w(k: i64) -> Q {
        Q::root_power(k)
    }

    #[test]
    fn addition() {
        assert!((w(1) + -w(1)).is_zero());
        let s = Q::one() + w(2);
        let one = BigRational::one();
        assert_eq!(s.coeffs(), &[one.clone(), BigRational::zero(), one, BigRational::zero()]);
        let lhs = Q::from_ratio(1, 2) + w(1);
        let rhs = Q::from_ratio(1, 2) + w(3);
        assert_eq!(lhs + rhs, Q::one() + w(1) + w(3));
    }

    #[test]
    fn multiplication() {
        assert_eq!(w(1) * w(3), -Q::one());
        assert_eq!((Q::one() + w(1)) * (Q::one() - w(1)), Q::one() - w(2));
        assert_eq!(w(2) * w(2), -Q::one());
    }

    #[test]
    fn conjugation() {
        assert_eq!(w(1).conj(), -w(3));
        assert_eq!(Q::one().conj(), Q::one());
    }

    #[test]
    fn root_powers() {
        assert_eq!(Q::root_power(4), -Q::one());
        assert_eq!(Q::root_power(8), Q::one());
        assert_eq!(Q::root_power(7), -w(3));
        assert_eq!(Q::root_power(-1), Q::root_power(7));
        for k in -9..17 {
            assert_eq!(Q::one().mul_root(k), Q::root_power(k));
            assert_eq!(w(3).mul_root(k), w(3) * Q::root_power(k));
        }
    }

    #[test]
    fn complex_values() {
        let (re, im) = w(1).to_complex();
        assert!((re - 0.70710678).abs() < 1e-8 && (im - 0.70710678).abs() < 1e-8);
        assert_eq!((-Q::one()).to_complex(), (-1.0, 0.0));
        let (re, im) = (w(1) - w(3)).to_complex();
        assert!((re - 1.41421356).abs() < 1e-8 && im.abs() < 1e-15);
    }

    #[test]
    fn inverse_sqrt2() {
        let h = Q::inv_sqrt2();
        assert_eq!(&h * &h, Q::from_ratio(1, 2));
        assert_eq!(Q::sqrt2() * h.clone(), Q::one());
        assert_eq!(Q::inv_sqrt2_pow(3), &(&h * &h) * &h);
        assert_eq!(Q::inv_sqrt2_pow(0), Q::one());
    }

    #[test]
    fn text_format() {
        let x = Q::from_ratio(-3, 4) + w(2);
        assert_eq!(x.to_string(), "-3/4 + 0/1*w + 1/1*w^2 + 0/1*w^3");
        assert_eq!(x.to_string().parse::<Q>().unwrap(), x);
        assert!("1 + 2".parse::<Q>().is_err());
        assert!("1/0 + 0*w + 0*w^2 + 0*w^3".parse::<Q>().is_err());
    }

    fn small() -> impl Strategy<Value = Q> {
        prop::array::uniform4((-20i64..20, 1i64..9)).prop_map(|c| {
            Q::from_coeffs(c.map(|(p, q)| BigRational::new(p.into(), q.into())))
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in small(), b in small(), c in small()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
        }

        #[test]
        fn conj_involution_and_norm(a in small(), b in small()) {
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            let n = a.norm_sqr();
            prop_assert!(n.is_real());
            prop_assert!(n.to_complex().1.abs() < 1e-12);
        }

        #[test]
        fn complex_embedding_is_homomorphic(a in small(), b in small()) {
            let prod = (&a * &b).to_c64();
            let expect = a.to_c64() * b.to_c64();
            prop_assert!((prod - expect).norm() < 1e-9 * (1.0 + expect.norm()));
        }

        #[test]
        fn display_round_trip(a in small()) {
            prop_assert_eq!(a.to_string().parse::<Q>().unwrap(), a);
        }
    }

    #[test]
    fn roots_match_unit_circle() {
        for k in -16i64..=16 {
            let (re, im) = Q::root_power(k).to_complex();
            let t = k as f64 * std::f64::consts::FRAC_PI_4;
            assert!((re - t.cos()).abs() < 1e-12 && (im - t.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn bit_growth_is_linear() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        // height-bounded factors: coefficients in [-3, 3] over denominators ≤ 4
        let factor = |rng: &mut rand_chacha::ChaCha8Rng| {
            Q::from_coeffs([(); 4].map(|_| {
                BigRational::new(rng.gen_range(-3i64..=3).into(), rng.gen_range(1i64..=4).into())
            }))
        };
        let mut acc = Q::one();
        for m in 1..=64u64 {
            acc = &acc * &factor(&mut rng);
            // each factor adds at most log2(4·4·3) + 2 bits to numerators and 2 to denominators
            assert!(acc.bit_length() <= 8 * m + 8, "m={m} bits={}", acc.bit_length());
        }
    }
}
