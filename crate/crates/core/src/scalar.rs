//! Scalar types for diagram semantics.
//!
//! [`Scalar`] is implemented for `Complex<f32>`/`Complex<f64>` and for the
//! exact cyclotomic field [`Cyclotomic8`] = ℚ(ζ₈), which contains `i`, `√2`
//! and every `e^{iπk/4}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, One, Signed, ToPrimitive, Zero};

use crate::phase::Phase;

pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Whether arithmetic in this type is exact.
    const EXACT: bool;

    /// `e^{iφ}`, or `None` when the type cannot represent it.
    fn from_phase(p: &Phase) -> Option<Self>;
    fn sqrt2() -> Self;
    fn frac_1_sqrt2() -> Self;
    fn imag() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_c64(&self) -> Complex<f64>;
    fn conj(&self) -> Self;
    fn checked_div(&self, rhs: &Self) -> Option<Self>;

    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }
}

impl<F> Scalar for Complex<F>
where
    F: Float + FloatConst + fmt::Debug + Send + Sync + 'static,
{
    const EXACT: bool = false;

    fn from_phase(p: &Phase) -> Option<Self> {
        let theta = F::from(p.radians())?;
        Some(Complex::from_polar(F::one(), theta))
    }

    fn sqrt2() -> Self {
        Complex::new(F::SQRT_2(), F::zero())
    }

    fn frac_1_sqrt2() -> Self {
        Complex::new(F::FRAC_1_SQRT_2(), F::zero())
    }

    fn imag() -> Self {
        Complex::new(F::zero(), F::one())
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        let v = F::from(num).unwrap() / F::from(den).unwrap();
        Complex::new(v, F::zero())
    }

    fn to_c64(&self) -> Complex<f64> {
        Complex::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.norm_sqr() == F::zero() {
            None
        } else {
            Some(*self / *rhs)
        }
    }
}

/// Element `Σₖ cₖ ζᵏ` (k = 0..4) of ℚ(ζ₈) with ζ = e^{iπ/4}, ζ⁴ = −1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic8 {
    c: [BigRational; 4],
}

impl Cyclotomic8 {
    pub fn from_coeffs(c: [BigRational; 4]) -> Self {
        Cyclotomic8 { c }
    }

    pub fn coeffs(&self) -> &[BigRational; 4] {
        &self.c
    }

    fn rational(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    /// ζᵏ for any integer k.
    pub fn zeta_pow(k: i64) -> Self {
        let k = k.rem_euclid(8) as usize;
        let mut c: [BigRational; 4] = Default::default();
        if k < 4 {
            c[k] = BigRational::one();
        } else {
            c[k - 4] = -BigRational::one();
        }
        Cyclotomic8 { c }
    }

    /// Galois automorphism ζ ↦ ζᵏ (k odd).
    fn galois(&self, k: i64) -> Self {
        let mut acc = Cyclotomic8::zero();
        for (j, cj) in self.c.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            let mut t = Cyclotomic8::zeta_pow(k * j as i64);
            for x in t.c.iter_mut() {
                *x = &*x * cj;
            }
            acc = acc + t;
        }
        acc
    }

    /// The rational part, if the element is rational.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.c[1..].iter().all(Zero::is_zero).then_some(&self.c[0])
    }
}

impl Default for Cyclotomic8 {
    fn default() -> Self {
        Cyclotomic8::zero()
    }
}

impl Zero for Cyclotomic8 {
    fn zero() -> Self {
        Cyclotomic8 { c: Default::default() }
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }
}

impl One for Cyclotomic8 {
    fn one() -> Self {
        Cyclotomic8::zeta_pow(0)
    }
}

impl Add for Cyclotomic8 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let [a0, a1, a2, a3] = self.c;
        let [b0, b1, b2, b3] = rhs.c;
        Cyclotomic8 { c: [a0 + b0, a1 + b1, a2 + b2, a3 + b3] }
    }
}

impl Sub for Cyclotomic8 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for Cyclotomic8 {
    type Output = Self;
    fn neg(self) -> Self {
        let [a0, a1, a2, a3] = self.c;
        Cyclotomic8 { c: [-a0, -a1, -a2, -a3] }
    }
}

impl Mul for Cyclotomic8 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<'a> Mul<&'a Cyclotomic8> for &'a Cyclotomic8 {
    type Output = Cyclotomic8;
    fn mul(self, rhs: &Cyclotomic8) -> Cyclotomic8 {
        let mut out: [BigRational; 4] = Default::default();
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let p = a * b;
                let k = i + j;
                if k < 4 {
                    out[k] += p;
                } else {
                    out[k - 4] -= p;
                }
            }
        }
        Cyclotomic8 { c: out }
    }
}

impl Scalar for Cyclotomic8 {
    const EXACT: bool = true;

    fn from_phase(p: &Phase) -> Option<Self> {
        // e^{iπ n/d} = ζ^{4n/d}
        let (n, d) = (p.numer(), p.denom());
        if (4 * n) % d != 0 {
            return None;
        }
        Some(Cyclotomic8::zeta_pow(4 * n / d))
    }

    fn sqrt2() -> Self {
        // ζ − ζ³
        Cyclotomic8::zeta_pow(1) - Cyclotomic8::zeta_pow(3)
    }

    fn frac_1_sqrt2() -> Self {
        let half = Cyclotomic8 { c: [Self::rational(1, 2), Zero::zero(), Zero::zero(), Zero::zero()] };
        &Self::sqrt2() * &half
    }

    fn imag() -> Self {
        Cyclotomic8::zeta_pow(2)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Cyclotomic8 { c: [Self::rational(num, den), Zero::zero(), Zero::zero(), Zero::zero()] }
    }

    fn to_c64(&self) -> Complex<f64> {
        let mut acc = Complex::new(0.0, 0.0);
        for (k, ck) in self.c.iter().enumerate() {
            let v = ck.to_f64().unwrap_or(f64::NAN);
            acc += Complex::from_polar(v, k as f64 * std::f64::consts::FRAC_PI_4);
        }
        acc
    }

    fn conj(&self) -> Self {
        self.galois(7)
    }

    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        // rhs⁻¹ = σ₃σ₅σ₇(rhs) / N(rhs)
        let others = &(&rhs.galois(3) * &rhs.galois(5)) * &rhs.galois(7);
        let norm = rhs * &others;
        let n = norm.as_rational().expect("field norm is rational").clone();
        let inv_n = Cyclotomic8 { c: [n.recip(), Zero::zero(), Zero::zero(), Zero::zero()] };
        Some(&(self * &others) * &inv_n)
    }
}

impl fmt::Debug for Cyclotomic8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cyclotomic8 {
    /// Written in the basis {1, √2, i, i√2}, which is easier to read than
    /// powers of ζ.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // ζ = (1+i)/√2, ζ² = i, ζ³ = (−1+i)/√2
        // c0 + c1 ζ + c2 i + c3 ζ³ = c0 + (c1−c3)/√2 + i (c2 + (c1+c3)/√2)
        let two = BigRational::from_integer(2.into());
        let re_rat = self.c[0].clone();
        let re_sqrt = (&self.c[1] - &self.c[3]) / &two;
        let im_rat = self.c[2].clone();
        let im_sqrt = (&self.c[1] + &self.c[3]) / &two;
        let parts = [(re_rat, ""), (re_sqrt, "√2"), (im_rat, "i"), (im_sqrt, "i√2")];
        let mut first = true;
        for (v, unit) in parts.iter() {
            if v.is_zero() {
                continue;
            }
            let sign = if v.is_negative() { "-" } else if first { "" } else { "+" };
            let mag = v.abs();
            if mag.is_one() && !unit.is_empty() {
                write!(f, "{sign}{unit}")?;
            } else {
                write!(f, "{sign}{mag}{unit}")?;
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}
