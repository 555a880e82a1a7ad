//! Scalar abstraction and log-scale arithmetic.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar the whole crate is generic over: f32 or f64.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
}

/// Shorthand for pulling f64 literals into the generic scalar type.
#[inline]
pub fn cast<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("literal does not fit in scalar type")
}

#[inline]
pub fn from_i64<T: Scalar>(n: i64) -> T {
    T::from_i64(n).expect("index does not fit in scalar type")
}

/// Complex value carried as (ln|z|, arg z); survives products far outside
/// the representable range of the underlying float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogComplex<T> {
    pub ln_abs: T,
    pub arg: T,
}

impl<T: Scalar> LogComplex<T> {
    pub fn one() -> Self {
        LogComplex { ln_abs: T::zero(), arg: T::zero() }
    }

    pub fn from_complex(z: Complex<T>) -> Self {
        LogComplex { ln_abs: z.norm().ln(), arg: z.arg() }
    }

    pub fn from_real(x: T) -> Self {
        let arg = if x < T::zero() { T::PI() } else { T::zero() };
        LogComplex { ln_abs: x.abs().ln(), arg }
    }

    pub fn mul(self, other: Self) -> Self {
        LogComplex { ln_abs: self.ln_abs + other.ln_abs, arg: self.arg + other.arg }
    }

    pub fn div(self, other: Self) -> Self {
        LogComplex { ln_abs: self.ln_abs - other.ln_abs, arg: self.arg - other.arg }
    }

    /// Back to an ordinary complex number; overflows to ±inf as f64 would.
    pub fn to_complex(self) -> Complex<T> {
        Complex::from_polar(self.ln_abs.exp(), self.arg)
    }

    /// Relative deviation |a/b - 1| computed without leaving log scale.
    pub fn rel_deviation(self, other: Self) -> T {
        let r = self.div(other);
        let m = r.ln_abs.exp();
        // |m e^{iθ} - 1|
        let (s, c) = r.arg.sin_cos();
        ((m * c - T::one()).powi(2) + (m * s).powi(2)).sqrt()
    }

    /// a - b with the common magnitude factored out, so operands far outside
    /// float range subtract cleanly.
    pub fn sub(self, other: Self) -> Self {
        let m = self.ln_abs.max(other.ln_abs);
        if m == T::neg_infinity() {
            return LogComplex { ln_abs: T::neg_infinity(), arg: T::zero() };
        }
        let va = Complex::from_polar((self.ln_abs - m).exp(), self.arg);
        let vb = Complex::from_polar((other.ln_abs - m).exp(), other.arg);
        let d = va - vb;
        LogComplex { ln_abs: m + d.norm().ln(), arg: d.arg() }
    }

    pub fn scale(self, factor: T) -> Self {
        LogComplex {
            ln_abs: self.ln_abs + factor.abs().ln(),
            arg: if factor < T::zero() { self.arg + T::PI() } else { self.arg },
        }
    }

    /// Real part sign as ±1 for log values representing real numbers.
    pub fn real_sign(self) -> T {
        if self.arg.cos() >= T::zero() {
            T::one()
        } else {
            -T::one()
        }
    }
}

/// Neumaier compensated accumulator; used wherever a long lattice sum must be
/// both accurate and independent of chunking.
#[derive(Clone, Copy, Debug)]
pub struct Accum<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> Default for Accum<T> {
    fn default() -> Self {
        Accum { sum: T::zero(), comp: T::zero() }
    }
}

impl<T: Scalar> Accum<T> {
    pub fn add(&mut self, v: T) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

/// Iterate the integer window in the fixed report order: ascending |n|,
/// ties negative first (0, -1, 1, -2, 2, ...).
pub fn ordered_window(n_min: i64, n_max: i64) -> impl Iterator<Item = i64> {
    debug_assert!(n_min <= n_max);
    let mag = n_min.unsigned_abs().max(n_max.unsigned_abs()) as i64;
    (0..=mag)
        .flat_map(|m| [-m, m])
        .skip(1) // drop the duplicate -0
        .filter(move |n| (n_min..=n_max).contains(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_window_order_and_coverage() {
        let got: Vec<i64> = ordered_window(-3, 2).collect();
        assert_eq!(got, vec![0, -1, 1, -2, 2, -3]);
        let got: Vec<i64> = ordered_window(1, 3).collect();
        assert_eq!(got, vec![1, 2, 3]);
        let got: Vec<i64> = ordered_window(-2, -1).collect();
        assert_eq!(got, vec![-1, -2]);
    }

    #[test]
    fn accum_matches_exact_on_cancellation() {
        let mut a = Accum::<f64>::default();
        a.add(1e16);
        a.add(1.0);
        a.add(-1e16);
        assert_eq!(a.value(), 1.0);
    }

    #[test]
    fn log_complex_roundtrip() {
        let z = Complex::new(-2.5f64, 1.25);
        let w = LogComplex::from_complex(z).to_complex();
        assert!((w - z).norm() < 1e-14);
        let a = LogComplex::from_real(-3.0f64);
        assert!((a.to_complex() - Complex::new(-3.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn rel_deviation_small_for_close_values() {
        let a = LogComplex::from_complex(Complex::new(1e200f64, 3e199));
        let b = LogComplex::from_complex(Complex::new(1e200f64, 3e199) * 1.0000001);
        assert!(a.rel_deviation(b) < 2e-7);
    }
}
