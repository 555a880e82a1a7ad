//! Zero localization and density statistics for positive-mass Cauchy
//! transforms s(x) = b + Σ c_n/(x - t_n).
//!
//! With positive masses s is strictly decreasing between consecutive poles,
//! so each gap carries exactly one zero when b = 0; everything here leans on
//! that monotonicity.

use crate::error::{Error, Result};
use crate::scalar::{cast, from_i64, Accum, Scalar};
use crate::seq::TailLaw;
use rayon::prelude::*;
use serde::Serialize;

/// b + Σ c_n/(x - t_n) with strictly increasing real poles and positive masses.
#[derive(Clone, Debug)]
pub struct CauchyTransform<T> {
    poles: Vec<T>,
    masses: Vec<T>,
    pub affine: T,
    pub tail: TailLaw<T>,
}

impl<T: Scalar> CauchyTransform<T> {
    pub fn new(poles: Vec<T>, masses: Vec<T>, affine: T) -> Self {
        assert_eq!(poles.len(), masses.len());
        assert!(!poles.is_empty());
        assert!(poles.windows(2).all(|w| w[0] < w[1]), "poles must increase strictly");
        assert!(masses.iter().all(|&c| c > T::zero()), "masses must be positive");
        CauchyTransform { poles, masses, affine, tail: TailLaw::None }
    }

    pub fn poles(&self) -> &[T] {
        &self.poles
    }

    pub fn masses(&self) -> &[T] {
        &self.masses
    }

    pub fn mass_total(&self) -> T {
        let mut acc = Accum::default();
        for &c in &self.masses {
            acc.add(c);
        }
        acc.value()
    }

    pub fn eval(&self, x: T) -> T {
        let mut acc = Accum::default();
        for (&t, &c) in self.poles.iter().zip(&self.masses) {
            acc.add(c / (x - t));
        }
        self.affine + acc.value()
    }
}

/// Bisection on [lo, hi] for a function with f(lo) and f(hi) of opposite
/// sign; refines to `tol` in x.
pub fn bisect<T: Scalar>(mut lo: T, mut hi: T, tol: T, f: impl Fn(T) -> T) -> Result<T> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if (flo > T::zero()) == (fhi > T::zero()) {
        return Err(Error::NoSignChange {
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        });
    }
    let half = cast::<T>(0.5);
    while (hi - lo) > tol {
        let mid = (lo + hi) * half;
        if mid <= lo || mid >= hi {
            break; // interval at floating-point resolution
        }
        let fm = f(mid);
        if fm == T::zero() {
            return Ok(mid);
        }
        if (fm > T::zero()) == (flo > T::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * half)
}

/// One zero per gap (t_n, t_{n+1}), bisected to 1e-12 absolute with a 1e-14
/// endpoint guard. Gaps whose guarded bracket shows no sign change (possible
/// for large |b|) are reported as errors naming the gap.
pub fn locate_gap_zeros<T: Scalar>(ct: &CauchyTransform<T>) -> Result<Vec<T>> {
    let tol = cast::<T>(1e-12);
    let results: Vec<Result<T>> = ct
        .poles
        .par_windows(2)
        .map(|w| {
            let gap = w[1] - w[0];
            // 1e-14 of the gap, floored at the local float resolution
            let guard = (cast::<T>(1e-14) * gap.max(T::one()))
                .max(w[0].abs().max(w[1].abs()).max(T::one()) * T::epsilon() * cast(8.0));
            let lo = w[0] + guard;
            let hi = w[1] - guard;
            bisect(lo, hi, tol, |x| ct.eval(x))
        })
        .collect();
    results.into_iter().collect()
}

/// Fraction of unit intervals [k, k+1], |k| ≤ n_limit, whose located zero
/// sits further than δ from the shifted lattice.
pub fn l_delta<T: Scalar>(zeros: &[T], lattice_shift: T, delta: T, n_limit: i64) -> Result<T> {
    assert!(delta > T::zero() && delta < cast(0.5), "need 0 < δ < 1/2");
    if zeros.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::UnsortedInput);
    }
    let need = from_i64::<T>(n_limit + 1);
    if zeros.is_empty()
        || zeros[0] - lattice_shift > -need + T::one()
        || *zeros.last().unwrap() - lattice_shift < need - T::one()
    {
        return Err(Error::WindowTooSmall {
            have: zeros.last().map(|z| z.to_f64().unwrap_or(0.0) as i64).unwrap_or(0),
            need: n_limit,
        });
    }
    let mut count = 0i64;
    for k in -n_limit..=n_limit {
        let lo = from_i64::<T>(k) + lattice_shift;
        let hi = lo + T::one();
        // distance of the zeros in [k, k+1] to the lattice endpoints
        let far = zeros
            .iter()
            .filter(|&&z| z >= lo && z < hi)
            .any(|&z| (z - lo).min(hi - z) > delta);
        if far {
            count += 1;
        }
    }
    Ok(from_i64::<T>(count) / from_i64::<T>(n_limit))
}

/// Lebesgue measure of {x : |s(x)| ≥ threshold} for b = 0, computed as an
/// exact union of intervals whose endpoints solve s(x) = ±threshold.
pub fn boole_measure<T: Scalar>(ct: &CauchyTransform<T>, threshold: T) -> Result<T> {
    assert!(threshold > T::zero());
    assert!(ct.affine == T::zero(), "Boole identity needs b = 0");
    let tol = cast::<T>(1e-13);
    let total = ct.mass_total();
    let poles = &ct.poles;
    let k = poles.len();
    let mut measure = T::zero();

    // outer rays: s > 0 decreasing to 0 on the right, s < 0 increasing to 0 on the left
    let span = total / threshold + T::one();
    let right = bisect(*poles.last().unwrap() + cast(1e-13), *poles.last().unwrap() + span, tol, |x| {
        ct.eval(x) - threshold
    })?;
    measure += right - *poles.last().unwrap();
    let left = bisect(poles[0] - span, poles[0] - cast(1e-13), tol, |x| ct.eval(x) + threshold)?;
    measure += poles[0] - left;

    // each gap: s runs +∞ → -∞, so {|s| ≥ thr} ∩ gap = (t_n, x⁺] ∪ [x⁻, t_{n+1})
    for i in 0..k.saturating_sub(1) {
        let (a, b) = (poles[i], poles[i + 1]);
        let guard = cast::<T>(1e-13) * (b - a).max(T::one());
        let mid = bisect(a + guard, b - guard, tol, |x| ct.eval(x))?;
        let xp = bisect(a + guard, mid, tol, |x| ct.eval(x) - threshold)?;
        let xm = bisect(mid, b - guard, tol, |x| ct.eval(x) + threshold)?;
        measure += (xp - a) + (b - xm);
    }
    Ok(measure)
}

/// Partial closeness sums Σ_{s_n>0} (t_{n+1}-s_n)/s_n and
/// Σ_{s_n<0} (s_n-t_n)/|s_n|, with a last-quarter Cauchy diagnostic for each.
#[derive(Clone, Debug, Serialize)]
pub struct ClosenessSums<T> {
    pub positive_sum: T,
    pub negative_sum: T,
    /// contribution of the outer quarter of terms, per side
    pub positive_tail_fraction: T,
    pub negative_tail_fraction: T,
}

pub fn closeness_sums<T: Scalar>(poles: &[T], zeros: &[T]) -> Result<ClosenessSums<T>> {
    if zeros.len() + 1 != poles.len() {
        return Err(Error::WindowMismatch((0, poles.len() as i64), (0, zeros.len() as i64)));
    }
    for (n, &s) in zeros.iter().enumerate() {
        if !(poles[n] < s && s < poles[n + 1]) {
            return Err(Error::InterlacingViolation {
                index: n as i64,
                detail: format!("zero {s} outside gap ({}, {})", poles[n], poles[n + 1]),
            });
        }
    }
    let mut pos: Vec<T> = Vec::new();
    let mut neg: Vec<T> = Vec::new();
    for (n, &s) in zeros.iter().enumerate() {
        if s > T::zero() {
            pos.push((poles[n + 1] - s) / s);
        } else if s < T::zero() {
            neg.push((s - poles[n]) / s.abs());
        }
    }
    let sum = |v: &[T]| v.iter().fold(T::zero(), |a, &b| a + b);
    let tail_frac = |v: &[T]| {
        if v.is_empty() {
            return T::zero();
        }
        let q = v.len() - v.len() * 3 / 4;
        let tail = sum(&v[v.len() - q..]);
        let total = sum(v);
        if total == T::zero() {
            T::zero()
        } else {
            tail / total
        }
    };
    // positive zeros: terms ordered by n already; the "last quarter" is the
    // outermost quarter of the window
    Ok(ClosenessSums {
        positive_sum: sum(&pos),
        negative_sum: sum(&neg),
        positive_tail_fraction: tail_frac(&pos),
        negative_tail_fraction: tail_frac(&neg),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_zero_symmetric_and_asymmetric() {
        let ct = CauchyTransform::new(vec![0.0f64, 1.0], vec![1.0, 1.0], 0.0);
        let z = locate_gap_zeros(&ct).unwrap();
        assert!((z[0] - 0.5).abs() < 1e-12);
        // masses {1, 2}: 1/x + 2/(x-1) = 0 at x = 1/3
        let ct = CauchyTransform::new(vec![0.0f64, 1.0], vec![1.0, 2.0], 0.0);
        let z = locate_gap_zeros(&ct).unwrap();
        assert!((z[0] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn zeros_approach_poles_for_nonzero_affine() {
        // window kept at 40: beyond ~46 the zero sits closer to the pole
        // than the endpoint guard and the gap is correctly reported instead
        let poles: Vec<f64> = (-40i64..=40).map(|n| n as f64).collect();
        let masses: Vec<f64> = (-40i64..=40).map(|n| 2f64.powi(-(n.abs() as i32))).collect();
        let ct = CauchyTransform::new(poles, masses, 1.0);
        let zeros = locate_gap_zeros(&ct).unwrap();
        let far: Vec<f64> = zeros
            .iter()
            .filter(|&&z| z.abs() > 33.0)
            .map(|&z| (z - z.round()).abs())
            .collect();
        assert!(!far.is_empty());
        assert!(far.iter().all(|&d| d < 1e-9));
    }

    #[test]
    fn no_sign_change_reported_for_huge_affine() {
        let ct = CauchyTransform::new(vec![0.0f64, 1.0], vec![1.0, 1.0], 1.0e15);
        assert!(matches!(locate_gap_zeros(&ct), Err(Error::NoSignChange { .. })));
    }

    #[test]
    fn l_delta_extremes() {
        let zeros: Vec<f64> = (-30i64..=30).map(|k| k as f64 + 0.5).collect();
        let l = l_delta(&zeros, 0.0, 0.4, 20).unwrap();
        assert_eq!(l, 41.0 / 20.0); // every interval |k| ≤ 20 is far: card = 2N+1
        let zeros: Vec<f64> = (-30i64..=30).map(|k| k as f64 + 1e-3).collect();
        let l = l_delta(&zeros, 0.0, 0.1, 20).unwrap();
        assert_eq!(l, 0.0);
        assert!(matches!(l_delta(&zeros, 0.0, 0.1, 40), Err(Error::WindowTooSmall { .. })));
    }

    #[test]
    fn l_delta_monotone_in_delta() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let zeros: Vec<f64> = (-40i64..=40).map(|k| k as f64 + rng.gen_range(0.01..0.99)).collect();
        let mut prev = f64::INFINITY;
        for d in [0.05, 0.1, 0.2, 0.3, 0.45] {
            let l = l_delta(&zeros, 0.0, d, 30).unwrap();
            assert!(l <= prev);
            prev = l;
        }
    }

    #[test]
    fn boole_identity_single_mass_and_sums() {
        // |1/x| ≥ t on [-1/t, 1/t]: measure 2/t
        let ct = CauchyTransform::new(vec![0.0f64], vec![1.0], 0.0);
        for t in [0.1f64, 0.5, 1.0, 2.0] {
            let m = boole_measure(&ct, t).unwrap();
            assert!((m - 2.0 / t).abs() < 1e-9 / t, "t = {t}");
        }
        // mixed masses summing to 1
        let ct = CauchyTransform::new(
            vec![-2.0f64, -0.5, 0.0, 1.7, 3.0],
            vec![0.1, 0.2, 0.3, 0.25, 0.15],
            0.0,
        );
        for n in [5.0f64, 10.0, 20.0] {
            let m = boole_measure(&ct, 1.0 / n).unwrap();
            assert!((m / (2.0 * n) - 1.0).abs() < 0.01, "N = {n}: measure {m}");
        }
        // threshold → ∞ → measure → 0
        let m = boole_measure(&ct, 1e9).unwrap();
        assert!(m < 1e-8);
    }

    #[test]
    fn boole_measure_scales_with_total_mass() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let poles: Vec<f64> = (0..8).map(|i| i as f64 * 1.3).collect();
        let masses: Vec<f64> = (0..8).map(|_| rng.gen_range(0.05..1.0)).collect();
        let ct = CauchyTransform::new(poles, masses, 0.0);
        let total = ct.mass_total();
        for t in [0.1f64, 0.5, 1.0, 2.0] {
            let m = boole_measure(&ct, t).unwrap();
            assert!((m * t / (2.0 * total) - 1.0).abs() < 0.01, "t = {t}");
        }
    }

    #[test]
    fn gap_zeros_scale_invariant_in_masses() {
        let poles: Vec<f64> = vec![-3.0, -1.0, 0.5, 2.0, 4.5];
        let masses: Vec<f64> = vec![0.3, 1.2, 0.7, 2.0, 0.1];
        let ct1 = CauchyTransform::new(poles.clone(), masses.clone(), 0.0);
        let scaled: Vec<f64> = masses.iter().map(|m| m * 37.5).collect();
        let ct2 = CauchyTransform::new(poles, scaled, 0.0);
        let z1 = locate_gap_zeros(&ct1).unwrap();
        let z2 = locate_gap_zeros(&ct2).unwrap();
        for (a, b) in z1.iter().zip(&z2) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn closeness_sums_hand_cases() {
        // t_n = n, s_n = t_{n+1} - 2^{-n}: first sum ≈ Σ 2^{-n}/(n+1-2^{-n})
        let poles: Vec<f64> = (1..=20).map(|n| n as f64).collect();
        let zeros: Vec<f64> = (1..=19).map(|n| (n + 1) as f64 - 2f64.powi(-n)).collect();
        let cs = closeness_sums(&poles, &zeros).unwrap();
        let direct: f64 = (1..=19).map(|n| 2f64.powi(-n) / ((n + 1) as f64 - 2f64.powi(-n))).sum();
        assert!((cs.positive_sum - direct).abs() < 1e-12);
        assert!(cs.positive_tail_fraction < 1e-3); // convergent: tail negligible

        // midpoints: harmonic-type growth, tail fraction stays substantial
        let zeros_mid: Vec<f64> = (1..=19).map(|n| n as f64 + 0.5).collect();
        let cs_mid = closeness_sums(&poles, &zeros_mid).unwrap();
        let harmonic: f64 = (1..=19).map(|n| 0.5 / (n as f64 + 0.5)).sum();
        assert!((cs_mid.positive_sum - harmonic).abs() < 1e-12);
        assert!(cs_mid.positive_tail_fraction > 0.05);
    }

    #[test]
    fn closeness_rejects_interlacing_violation() {
        let poles = vec![0.0f64, 1.0, 2.0];
        let zeros = vec![1.5f64, 1.6];
        assert!(matches!(
            closeness_sums(&poles, &zeros),
            Err(Error::InterlacingViolation { index: 0, .. })
        ));
    }
}
