//! Canonical products built from explicit zero lists.
//!
//! Desk-scale truncation: the window product *is* the function under study.
//! An optional tail law records how the zero set would continue; it is
//! reported for provenance but never folded into values (lattice identities
//! are checked modulo one fitted scalar, which also absorbs the slowly
//! varying factor such a tail would contribute on the check window).

use crate::scalar::{cast, LogComplex, Scalar};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Closed form for zeros beyond the stored window.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum ZeroTailLaw {
    /// Zeros continue along n_k + 1/2 with n_k = base·2^k.
    GeometricHalfShift { base: i64 },
    /// Free-text description for report provenance.
    Note(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProductFunction<T> {
    zeros: Vec<Complex<T>>,
    genus: u8,
    origin_multiplicity: u32,
    pub tail: Option<ZeroTailLaw>,
}

impl<T: Scalar> ProductFunction<T> {
    /// Genus-0 product ∏ (1 - z/z_j); zeros must be nonzero.
    pub fn genus0(zeros: Vec<Complex<T>>) -> Self {
        Self::new(zeros, 0, 0)
    }

    pub fn genus0_real(zeros: &[T]) -> Self {
        Self::new(zeros.iter().map(|&x| Complex::new(x, T::zero())).collect(), 0, 0)
    }

    /// Genus-1 product ∏ (1 - z/z_j) e^{z/z_j}.
    pub fn genus1(zeros: Vec<Complex<T>>) -> Self {
        Self::new(zeros, 1, 0)
    }

    pub fn new(zeros: Vec<Complex<T>>, genus: u8, origin_multiplicity: u32) -> Self {
        assert!(genus <= 1, "only genus 0 and 1 are supported");
        for z in &zeros {
            assert!(z.norm() > T::zero(), "explicit zeros must be nonzero; use origin_multiplicity");
        }
        ProductFunction { zeros, genus, origin_multiplicity, tail: None }
    }

    pub fn with_tail(mut self, tail: ZeroTailLaw) -> Self {
        self.tail = Some(tail);
        self
    }

    pub fn zeros(&self) -> &[Complex<T>] {
        &self.zeros
    }

    pub fn real_zeros(&self) -> Vec<T> {
        self.zeros.iter().map(|z| z.re).collect()
    }

    pub fn genus(&self) -> u8 {
        self.genus
    }

    pub fn origin_multiplicity(&self) -> u32 {
        self.origin_multiplicity
    }

    fn factor(&self, z: Complex<T>, zero: Complex<T>) -> Complex<T> {
        let f = Complex::<T>::new(T::one(), T::zero()) - z / zero;
        if self.genus == 1 {
            f * (z / zero).exp()
        } else {
            f
        }
    }

    /// Direct multiplication; fine while the result stays in range.
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        let mut p = z.powu(self.origin_multiplicity);
        for &zero in &self.zeros {
            p *= self.factor(z, zero);
        }
        p
    }

    pub fn eval_real(&self, x: T) -> T {
        self.eval(Complex::new(x, T::zero())).re
    }

    /// Log-scale evaluation for windows where the product over- or underflows.
    pub fn eval_log(&self, z: Complex<T>) -> LogComplex<T> {
        let mut ln_abs = T::zero();
        let mut arg = T::zero();
        if self.origin_multiplicity > 0 {
            let m = cast::<T>(self.origin_multiplicity as f64);
            ln_abs += m * z.norm().ln();
            arg += m * z.arg();
        }
        for &zero in &self.zeros {
            let f = Complex::<T>::new(T::one(), T::zero()) - z / zero;
            ln_abs += f.norm().ln();
            arg += f.arg();
            if self.genus == 1 {
                let e = z / zero;
                ln_abs += e.re;
                arg += e.im;
            }
        }
        LogComplex { ln_abs, arg }
    }

    /// Derivative at the j-th listed zero (assumed simple).
    pub fn derivative_at_zero(&self, j: usize) -> Complex<T> {
        let zj = self.zeros[j];
        let mut p = zj.powu(self.origin_multiplicity);
        for (i, &zero) in self.zeros.iter().enumerate() {
            if i != j {
                p *= self.factor(zj, zero);
            }
        }
        let d = -zj.inv();
        if self.genus == 1 {
            p * d * (zj / zj).exp() // e^{z_j/z_j} = e
        } else {
            p * d
        }
    }

    /// Sign of the product at a real point with the j-th factor removed
    /// (pass j = usize::MAX to keep all factors).
    pub fn real_sign_skipping(&self, j: usize, x: T) -> T {
        let mut neg = self.origin_multiplicity % 2 == 1 && x < T::zero();
        for (i, &zero) in self.zeros.iter().enumerate() {
            if i != j && x / zero.re > T::one() {
                neg = !neg;
            }
        }
        if neg {
            -T::one()
        } else {
            T::one()
        }
    }

    /// Product with the j-th listed zero's factor removed.
    pub fn eval_skipping(&self, j: usize, z: Complex<T>) -> Complex<T> {
        let mut p = z.powu(self.origin_multiplicity);
        for (i, &zero) in self.zeros.iter().enumerate() {
            if i != j {
                p *= self.factor(z, zero);
            }
        }
        p
    }

    /// Product of the nonzero factors only (origin power dropped).
    pub fn eval_factors_only(&self, z: Complex<T>) -> Complex<T> {
        let mut p = Complex::new(T::one(), T::zero());
        for &zero in &self.zeros {
            p *= self.factor(z, zero);
        }
        p
    }

    /// Ratio self(z)/other(z) with factors interleaved pairwise; stays
    /// representable even when each side alone would overflow.
    pub fn eval_ratio(&self, other: &ProductFunction<T>, z: Complex<T>) -> Complex<T> {
        debug_assert_eq!(self.origin_multiplicity, other.origin_multiplicity);
        debug_assert_eq!(self.genus, other.genus);
        let n = self.zeros.len().max(other.zeros.len());
        let mut r = Complex::new(T::one(), T::zero());
        for i in 0..n {
            if let Some(&zero) = self.zeros.get(i) {
                r *= self.factor(z, zero);
            }
            if let Some(&zero) = other.zeros.get(i) {
                r /= other.factor(z, zero);
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    type C = Complex<f64>;

    #[test]
    fn log_eval_matches_direct_on_200_zeros() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let zeros: Vec<C> = (1..=200)
            .map(|k| C::new(k as f64 + rng.gen_range(-0.3..0.3), 0.0))
            .collect();
        let p = ProductFunction::genus0(zeros);
        for _ in 0..25 {
            let z = C::new(rng.gen_range(-40.0..40.0), rng.gen_range(0.1..3.0));
            let direct = p.eval(z);
            let logged = p.eval_log(z).to_complex();
            assert!(
                (direct - logged).norm() <= 1e-12 * direct.norm(),
                "mismatch at {z}: {direct} vs {logged}"
            );
        }
    }

    #[test]
    fn genus1_pairs_cancel_exponentials() {
        // symmetric zero set: the exponential factors cancel pairwise
        let zeros: Vec<C> =
            (1..=50).flat_map(|k| [C::new(k as f64, 0.0), C::new(-(k as f64), 0.0)]).collect();
        let p0 = ProductFunction::genus0(zeros.clone());
        let p1 = ProductFunction::genus1(zeros);
        let z = C::new(0.37, 0.21);
        assert!((p0.eval(z) - p1.eval(z)).norm() < 1e-12 * p0.eval(z).norm());
    }

    #[test]
    fn derivative_at_zero_matches_finite_difference() {
        let p = ProductFunction::genus0_real(&[1.5, 2.5, -3.5, 7.0]);
        let h = 1e-6;
        for j in 0..4 {
            let zj = p.zeros()[j];
            let fd = (p.eval(zj + C::new(h, 0.0)) - p.eval(zj - C::new(h, 0.0))) / (2.0 * h);
            let an = p.derivative_at_zero(j);
            assert!((fd - an).norm() < 1e-7 * an.norm(), "zero {j}");
        }
    }

    #[test]
    fn origin_zero_multiplicity() {
        let p = ProductFunction::new(vec![C::new(2.0, 0.0)], 0, 1);
        let z = C::new(0.5, 0.0);
        assert!((p.eval(z) - C::new(0.5 * 0.75, 0.0)).norm() < 1e-15);
        assert_eq!(p.eval(C::new(0.0, 0.0)), C::new(0.0, 0.0));
    }

    #[test]
    fn ratio_of_huge_products_is_stable() {
        // each side alone is far outside f64 range at large z; the ratio is O(1)
        let a: Vec<C> = (1..=400).map(|k| C::new((k * k) as f64, 0.0)).collect();
        let b: Vec<C> = (1..=400).map(|k| C::new((k * k) as f64 + 0.5, 0.0)).collect();
        let pa = ProductFunction::genus0(a);
        let pb = ProductFunction::genus0(b);
        let z = C::new(90_000.25, 0.0);
        let r = pa.eval_ratio(&pb, z);
        let lr = pa.eval_log(z).div(pb.eval_log(z)).to_complex();
        assert!(r.is_finite());
        assert!((r - lr).norm() < 1e-9 * r.norm());
    }
}
