//! Windowed coefficient sequences with analytic tail laws.
//!
//! Every lattice sum in the crate is a finite window sum plus a bound on the
//! neglected tail; the bound travels with the value (see [`Summed`]) and is
//! surfaced in every report. Tail contributions are never *added* to values:
//! the truncated object is the object under study, and the bound quantifies
//! its distance to the infinite one.

use crate::scalar::{cast, from_i64, Scalar};
use crate::special::inv_pow_tail;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Decay law for coefficients beyond the stored window: either none
/// (the sequence is genuinely finite) or |c_n| = scale·|n|^{-p}.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub enum TailLaw<T> {
    None,
    Power { exponent: T, scale: T },
}

impl<T: Scalar> TailLaw<T> {
    pub fn power(exponent: T, scale: T) -> Self {
        assert!(
            exponent >= cast(2.0),
            "only power tails with p >= 2 are supported"
        );
        TailLaw::Power { exponent, scale }
    }

    /// Σ_{|n| > limit} |c_n| under this law.
    pub fn mass_beyond(&self, limit: i64) -> T {
        match *self {
            TailLaw::None => T::zero(),
            TailLaw::Power { exponent, scale } => {
                cast::<T>(2.0) * scale * inv_pow_tail(limit, exponent)
            }
        }
    }

    /// Bound on |Σ_{|n|>limit} c_n/(z - n - shift)| for z at distance ≥ `gap`
    /// from the whole tail region.
    pub fn cauchy_tail_bound(&self, limit: i64, shift: T, z: Complex<T>) -> T {
        match *self {
            TailLaw::None => T::zero(),
            TailLaw::Power { exponent, scale } => {
                let right = from_i64::<T>(limit + 1) + shift;
                let left = from_i64::<T>(-limit - 1) + shift;
                let d_right = if z.re >= right {
                    T::zero()
                } else {
                    ((z.re - right).powi(2) + z.im * z.im).sqrt()
                };
                let d_left = if z.re <= left {
                    T::zero()
                } else {
                    ((z.re - left).powi(2) + z.im * z.im).sqrt()
                };
                let d = d_right.min(d_left).max(z.im.abs());
                if d <= T::zero() {
                    return T::infinity();
                }
                scale * inv_pow_tail(limit, exponent) * cast::<T>(2.0) / d
            }
        }
    }

    pub fn combine_product(&self, other: &Self) -> Self {
        match (*self, *other) {
            (TailLaw::Power { exponent: p1, scale: s1 }, TailLaw::Power { exponent: p2, scale: s2 }) => {
                TailLaw::Power { exponent: p1 + p2, scale: s1 * s2 }
            }
            _ => TailLaw::None,
        }
    }
}

/// A value together with the bound on what truncation discarded.
#[derive(Clone, Copy, Debug)]
pub struct Summed<T> {
    pub value: Complex<T>,
    pub tail_bound: T,
}

impl<T: Scalar> Summed<T> {
    pub fn exact(value: Complex<T>) -> Self {
        Summed { value, tail_bound: T::zero() }
    }
}

/// Read-only view of a lattice-indexed coefficient sequence.
pub trait LatticeSeq<T: Scalar> {
    /// Inclusive index window where values are stored.
    fn window(&self) -> (i64, i64);
    fn value(&self, n: i64) -> Complex<T>;
    fn tail(&self) -> TailLaw<T>;

    fn contains(&self, n: i64) -> bool {
        let (a, b) = self.window();
        (a..=b).contains(&n)
    }
}

/// Dense storage over an explicit window.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DenseSeq<T> {
    start: i64,
    values: Vec<Complex<T>>,
    tail: TailLaw<T>,
}

impl<T: Scalar> DenseSeq<T> {
    pub fn new(start: i64, values: Vec<Complex<T>>, tail: TailLaw<T>) -> Self {
        assert!(!values.is_empty(), "empty sequence window");
        DenseSeq { start, values, tail }
    }

    pub fn from_real(start: i64, values: &[T], tail: TailLaw<T>) -> Self {
        DenseSeq::new(
            start,
            values.iter().map(|&v| Complex::new(v, T::zero())).collect(),
            tail,
        )
    }

    /// Single unit mass at index n0 on the window [-w, w].
    pub fn unit_mass(n0: i64, w: i64) -> Self {
        let mut values = vec![Complex::new(T::zero(), T::zero()); (2 * w + 1) as usize];
        values[(n0 + w) as usize] = Complex::new(T::one(), T::zero());
        DenseSeq::new(-w, values, TailLaw::None)
    }

    pub fn map_values(&self, f: impl Fn(i64, Complex<T>) -> Complex<T>) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(self.start + i as i64, v))
            .collect();
        DenseSeq { start: self.start, values, tail: self.tail }
    }
}

impl<T: Scalar> LatticeSeq<T> for DenseSeq<T> {
    fn window(&self) -> (i64, i64) {
        (self.start, self.start + self.values.len() as i64 - 1)
    }

    fn value(&self, n: i64) -> Complex<T> {
        if self.contains(n) {
            self.values[(n - self.start) as usize]
        } else {
            Complex::new(T::zero(), T::zero())
        }
    }

    fn tail(&self) -> TailLaw<T> {
        self.tail
    }
}

/// Real positive sequence following |n|^{-power} off a finite set of
/// override indices, on the symmetric window [-half_window, half_window].
///
/// This is the coefficient shape of the sparse-block construction; keeping
/// the law explicit is what enables the closed-form Cauchy sums in
/// [`crate::special`], so evaluation cost is O(#overrides) rather than
/// O(window).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PowerLawSeq<T> {
    a0: T,
    power: u32,
    overrides: Vec<(i64, T)>,
    half_window: i64,
}

impl<T: Scalar> PowerLawSeq<T> {
    pub fn new(a0: T, power: u32, mut overrides: Vec<(i64, T)>, half_window: i64) -> Self {
        assert!(half_window >= 1);
        assert!((2..=4).contains(&power));
        overrides.sort_by_key(|&(n, _)| n);
        overrides.dedup_by_key(|&mut (n, _)| n);
        for &(n, _) in &overrides {
            assert!(n != 0 && n.abs() <= half_window, "override outside window");
        }
        PowerLawSeq { a0, power, overrides, half_window }
    }

    pub fn plain(a0: T, power: u32, half_window: i64) -> Self {
        PowerLawSeq::new(a0, power, Vec::new(), half_window)
    }

    pub fn half_window(&self) -> i64 {
        self.half_window
    }

    pub fn overrides(&self) -> &[(i64, T)] {
        &self.overrides
    }

    pub fn law(&self, n: i64) -> T {
        if n == 0 {
            self.a0
        } else {
            from_i64::<T>(n.abs()).powi(-(self.power as i32))
        }
    }

    pub fn value_real(&self, n: i64) -> T {
        if n.abs() > self.half_window {
            return T::zero();
        }
        match self.overrides.binary_search_by_key(&n, |&(m, _)| m) {
            Ok(i) => self.overrides[i].1,
            Err(_) => self.law(n),
        }
    }

    /// Entry-wise square; the law exponent doubles.
    pub fn squared(&self) -> Self {
        PowerLawSeq {
            a0: self.a0 * self.a0,
            power: self.power * 2,
            overrides: self.overrides.iter().map(|&(n, v)| (n, v * v)).collect(),
            half_window: self.half_window,
        }
    }

    /// Law part Σ_{1≤|n|≤W} |n|^{-p}/(x-n) for |x| < 1/2 through
    /// -Σ_{i≥0} x^{2i+1}·2H_{p+2+2i}(W). The digamma recursion divides by x
    /// up to p times and loses everything near the origin; this series does
    /// not.
    fn law_sum_small_x(&self, x: T) -> T {
        let x2 = x * x;
        let mut pow_x = x;
        let mut acc = T::zero();
        for i in 0..64u32 {
            let h: T = crate::special::inv_pow_window(self.half_window, self.power + 2 + 2 * i);
            let t = pow_x * (h + h);
            acc -= t;
            if t.abs() <= acc.abs().max(cast(1e-300)) * cast(1e-18) {
                break;
            }
            pow_x *= x2;
        }
        acc
    }

    fn law_sum_small_x_c(&self, z: Complex<T>) -> Complex<T> {
        let z2 = z * z;
        let mut pow_z = z;
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..64u32 {
            let h: T = crate::special::inv_pow_window(self.half_window, self.power + 2 + 2 * i);
            let t = pow_z * (h + h);
            acc -= t;
            if t.norm() <= acc.norm().max(cast(1e-300)) * cast(1e-18) {
                break;
            }
            pow_z *= z2;
        }
        acc
    }

    /// Σ_{|n| ≤ W} value(n)/(x-n) in closed form, real x off the lattice.
    pub fn cauchy_sum_real(&self, x: T) -> T {
        let w = self.half_window;
        let law = if x.abs() < cast(0.5) {
            self.law_sum_small_x(x)
        } else {
            crate::special::weighted_cauchy_range(-w, -1, x, self.power)
                + crate::special::weighted_cauchy_range(1, w, x, self.power)
        };
        let mut s = law + self.a0 / x;
        for &(n, v) in &self.overrides {
            s += (v - self.law(n)) / (x - from_i64(n));
        }
        s
    }

    /// Σ_{|n| ≤ W} value(n)/(z-n), complex z with |Re z| < W.
    pub fn cauchy_sum_complex(&self, z: Complex<T>) -> Complex<T> {
        let law = if z.norm() < cast(0.5) {
            self.law_sum_small_x_c(z)
        } else {
            crate::special::weighted_cauchy_window_c(self.half_window, z, self.power)
        };
        let mut s = law + z.inv() * self.a0;
        for &(n, v) in &self.overrides {
            s += (z - Complex::new(from_i64(n), T::zero())).inv() * (v - self.law(n));
        }
        s
    }

    /// Σ_{n ≠ m} value(n)/(m-n) at an integer lattice point m. All digamma
    /// arguments are positive integers here, so the range forms are exact.
    pub fn cauchy_sum_excluding_at_integer(&self, m: i64) -> T {
        let w = self.half_window;
        debug_assert!(m.abs() <= w);
        let x = from_i64::<T>(m);
        let mut s = T::zero();
        if m == 0 {
            // the law part cancels pairwise across ±n
        } else {
            s += self.a0 / x;
            let side = |a: i64, b: i64| -> T {
                if a > b {
                    T::zero()
                } else {
                    crate::special::weighted_cauchy_range(a, b, x, self.power)
                }
            };
            if m > 0 {
                s += side(-w, -1) + side(1, m - 1) + side(m + 1, w);
            } else {
                s += side(1, w) + side(-w, m - 1) + side(m + 1, -1);
            }
        }
        for &(n, v) in &self.overrides {
            if n != m {
                s += (v - self.law(n)) / (x - from_i64(n));
            }
        }
        s
    }

    /// Σ_{A ≤ n ≤ B} value(n)/(x-n) over a sub-range (clipped to the window).
    pub fn cauchy_sum_range_real(&self, a: i64, b: i64, x: T) -> T {
        let w = self.half_window;
        let (a, b) = (a.max(-w), b.min(w));
        if a > b {
            return T::zero();
        }
        let mut s = T::zero();
        if a <= -1 {
            s += crate::special::weighted_cauchy_range(a, b.min(-1), x, self.power);
        }
        if b >= 1 {
            s += crate::special::weighted_cauchy_range(a.max(1), b, x, self.power);
        }
        if a <= 0 && 0 <= b {
            s += self.a0 / x;
        }
        for &(n, v) in &self.overrides {
            if (a..=b).contains(&n) {
                s += (v - self.law(n)) / (x - from_i64(n));
            }
        }
        s
    }

    /// Σ_{|n| ≤ W} value(n)/(x-n)^2, derivative companion of `cauchy_sum_real`.
    pub fn cauchy_sum_sq_real(&self, x: T) -> T {
        let w = self.half_window;
        let law = if x.abs() < cast(0.5) {
            // d/dx of the small-x series: Σ_{i≥0} (2i+1)x^{2i}·2H_{p+2+2i}(W)
            let x2 = x * x;
            let mut pow_x = T::one();
            let mut acc = T::zero();
            for i in 0..64u32 {
                let h: T =
                    crate::special::inv_pow_window(self.half_window, self.power + 2 + 2 * i);
                let t = pow_x * (h + h) * cast::<T>((2 * i + 1) as f64);
                acc += t;
                if t <= acc.max(cast(1e-300)) * cast(1e-18) {
                    break;
                }
                pow_x *= x2;
            }
            acc
        } else {
            crate::special::weighted_cauchy_sq_range(-w, -1, x, self.power)
                + crate::special::weighted_cauchy_sq_range(1, w, x, self.power)
        };
        let mut s = law + self.a0 / (x * x);
        for &(n, v) in &self.overrides {
            let d = x - from_i64::<T>(n);
            s += (v - self.law(n)) / (d * d);
        }
        s
    }

    /// Σ value(n)^2 over the window (for Parseval norms), closed form for
    /// power 2, plus the tail bound of the infinite object.
    pub fn norm_sq_window(&self) -> T {
        assert_eq!(self.power, 2, "norm closed form only kept for the p=2 law");
        let mut s = self.a0 * self.a0
            + cast::<T>(2.0) * crate::special::inv_pow_range::<T>(1, self.half_window, 4);
        for &(n, v) in &self.overrides {
            let l = self.law(n);
            s += v * v - l * l;
        }
        s
    }
}

impl<T: Scalar> LatticeSeq<T> for PowerLawSeq<T> {
    fn window(&self) -> (i64, i64) {
        (-self.half_window, self.half_window)
    }

    fn value(&self, n: i64) -> Complex<T> {
        Complex::new(self.value_real(n), T::zero())
    }

    fn tail(&self) -> TailLaw<T> {
        TailLaw::Power { exponent: from_i64(self.power as i64), scale: T::one() }
    }
}

/// Sequence defined through a closure; used for derived lattice data
/// (e.g. G(n) along the integers) that would be wasteful to materialize.
pub struct FnSeq<T, F> {
    window: (i64, i64),
    f: F,
    tail: TailLaw<T>,
}

impl<T: Scalar, F: Fn(i64) -> Complex<T>> FnSeq<T, F> {
    pub fn new(window: (i64, i64), tail: TailLaw<T>, f: F) -> Self {
        FnSeq { window, f, tail }
    }
}

impl<T: Scalar, F: Fn(i64) -> Complex<T>> LatticeSeq<T> for FnSeq<T, F> {
    fn window(&self) -> (i64, i64) {
        self.window
    }

    fn value(&self, n: i64) -> Complex<T> {
        if self.contains(n) {
            (self.f)(n)
        } else {
            Complex::new(T::zero(), T::zero())
        }
    }

    fn tail(&self) -> TailLaw<T> {
        self.tail
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_window_and_values() {
        let s = DenseSeq::from_real(-2, &[1.0f64, 2.0, 3.0, 4.0, 5.0], TailLaw::None);
        assert_eq!(s.window(), (-2, 2));
        assert_eq!(s.value(-2).re, 1.0);
        assert_eq!(s.value(2).re, 5.0);
        assert_eq!(s.value(3).re, 0.0);
    }

    #[test]
    fn tail_mass_matches_direct() {
        let law = TailLaw::power(2.0f64, 1.0);
        let direct: f64 = 2.0 * (101i64..3_000_000).map(|k| (k as f64).powi(-2)).sum::<f64>();
        assert!((law.mass_beyond(100) - direct).abs() < 1e-6);
    }

    #[test]
    #[should_panic]
    fn shallow_tail_rejected() {
        let _ = TailLaw::power(1.5f64, 1.0);
    }

    #[test]
    fn law_sums_match_direct() {
        let seq = PowerLawSeq::new(1.0f64, 2, vec![(5, 0.7), (-3, 0.2), (12, 3.0)], 800);
        let x = 4.31f64;
        let direct: f64 = (-800i64..=800).map(|n| seq.value_real(n) / (x - n as f64)).sum();
        assert!((seq.cauchy_sum_real(x) - direct).abs() < 1e-12);
        let direct_sq: f64 =
            (-800i64..=800).map(|n| seq.value_real(n) / (x - n as f64).powi(2)).sum();
        assert!((seq.cauchy_sum_sq_real(x) - direct_sq).abs() < 1e-11);
        let z = Complex::new(-7.25f64, 1.5);
        let direct_c: Complex<f64> = (-800i64..=800)
            .map(|n| Complex::new(seq.value_real(n), 0.0) / (z - n as f64))
            .sum();
        assert!((seq.cauchy_sum_complex(z) - direct_c).norm() < 1e-12);
        let sq = seq.squared();
        let direct4: f64 = (-800i64..=800).map(|n| sq.value_real(n) / (x - n as f64)).sum();
        assert!((sq.cauchy_sum_real(x) - direct4).abs() < 1e-12);
        let direct_norm: f64 = (-800i64..=800).map(|n| seq.value_real(n).powi(2)).sum();
        assert!((seq.norm_sq_window() - direct_norm).abs() < 1e-12);
    }
}
