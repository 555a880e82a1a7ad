//! Desk-scale de Branges models through Clark data, and the full pipeline
//! that plants a completeness defect over a prescribed tempered spectrum.
//!
//! A model is built from (t_n, μ_n): A is the canonical product over the
//! spectrum, B is defined by B/A = Σ μ_n/(t_n - z) (the finite-window Clark
//! transform; the usual regularizers and the free constant cancel exactly
//! for finite mass sets), and E = A - iB. Everything about the big pipeline
//! models is evaluated in log scale — a window of ten thousand spectrum
//! points puts |A'| far outside f64 range.

use crate::error::{Error, Result};
use crate::herglotz::{self, CauchyTransform};
use crate::product::ProductFunction;
use crate::scalar::{cast, from_i64, LogComplex, Scalar};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

type C<T> = Complex<T>;

fn c_re<T: Scalar>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// Spectrum + positive Clark masses with the derived structure functions.
#[derive(Clone, Debug)]
pub struct ClarkModel<T> {
    spectrum: Vec<T>,
    masses: Vec<T>,
    pub a: ProductFunction<T>,
    pub b_zeros: Vec<T>,
    /// φ(t_{n+1}) - φ(t_n) per gap, from argument tracking
    pub gap_phase_increments: Vec<T>,
    /// max |φ'(t_n)·μ_n - 1| over the sampled spectrum points
    pub phase_mass_defect: T,
}

impl<T: Scalar> ClarkModel<T> {
    /// Construct the model and run the built-in consistency checks:
    /// B-zero interlacing, per-gap phase increment π, the Clark relation
    /// φ'(t_n)μ_n = 1 on a spread of sample points, and the Hermite-Biehler
    /// probe |E| > |E*| at 20 upper-half-plane points.
    pub fn build(spectrum: Vec<T>, masses: Vec<T>) -> Result<Self> {
        assert_eq!(spectrum.len(), masses.len());
        assert!(spectrum.windows(2).all(|w| w[0] < w[1]), "spectrum must increase");
        assert!(masses.iter().all(|&m| m > T::zero()));
        let zeros: Vec<C<T>> =
            spectrum.iter().filter(|&&t| t != T::zero()).map(|&t| c_re(t)).collect();
        let origin = (spectrum.len() - zeros.len()) as u32;
        let a = ProductFunction::new(zeros, 0, origin);

        // zeros of B = zeros of Σ μ/(t-z): one per spectrum gap
        let ct = CauchyTransform::new(spectrum.clone(), masses.clone(), T::zero());
        let b_zeros = herglotz::locate_gap_zeros(&ct)?;
        for (i, &z) in b_zeros.iter().enumerate() {
            if !(spectrum[i] < z && z < spectrum[i + 1]) {
                return Err(Error::InterlacingViolation {
                    index: i as i64,
                    detail: format!("B zero {z} escapes its gap"),
                });
            }
        }

        let mut model = ClarkModel {
            spectrum,
            masses,
            a,
            b_zeros,
            gap_phase_increments: Vec::new(),
            phase_mass_defect: T::zero(),
        };
        model.gap_phase_increments = model.track_gap_increments();
        model.phase_mass_defect = model.check_phase_masses()?;
        model.hermite_biehler_probe(20, 0x5eed)?;
        Ok(model)
    }

    pub fn spectrum(&self) -> &[T] {
        &self.spectrum
    }

    pub fn masses(&self) -> &[T] {
        &self.masses
    }

    /// Clark transform Σ μ_n/(t_n - z).
    pub fn r_sum(&self, z: C<T>) -> C<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (&t, &m) in self.spectrum.iter().zip(&self.masses) {
            acc += c_re::<T>(m) / (c_re(t) - z);
        }
        acc
    }

    pub fn a_log(&self, z: C<T>) -> LogComplex<T> {
        self.a.eval_log(z)
    }

    pub fn b_log(&self, z: C<T>) -> LogComplex<T> {
        self.a.eval_log(z).mul(LogComplex::from_complex(self.r_sum(z)))
    }

    /// B = A·Σ μ/(t-z) with the pole nearest to z cancelled analytically;
    /// finite on the whole plane including the spectrum itself.
    pub fn b_eval(&self, z: C<T>) -> C<T> {
        let j = self
            .spectrum
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                (c_re::<T>(**a) - z).norm().partial_cmp(&(c_re::<T>(**b) - z).norm()).unwrap()
            })
            .map(|(i, _)| i)
            .unwrap();
        let tj = self.spectrum[j];
        if (c_re::<T>(tj) - z).norm() > self.local_gap(tj) * cast(1e-6) {
            return self.a.eval(z) * self.r_sum(z);
        }
        // A(z)/(t_j - z) through the factor-removed product
        let near = if tj == T::zero() {
            -self.a.eval_factors_only(z)
        } else {
            // zeros list skips the origin; map the spectrum index onto it
            let skip = self.spectrum.iter().take(j).filter(|&&t| t != T::zero()).count();
            self.a.eval_skipping(skip, z) / tj
        };
        let mut rest = Complex::new(T::zero(), T::zero());
        for (i, (&t, &m)) in self.spectrum.iter().zip(&self.masses).enumerate() {
            if i != j {
                rest += c_re::<T>(m) / (c_re(t) - z);
            }
        }
        near * self.masses[j] + self.a.eval(z) * rest
    }

    /// E = A - iB; direct value for desk-size models.
    pub fn e_eval(&self, z: C<T>) -> C<T> {
        let i = Complex::new(T::zero(), T::one());
        self.a.eval(z) - i * self.b_eval(z)
    }

    /// ln|E(z)|, usable at any window size.
    pub fn e_ln_abs(&self, z: C<T>) -> T {
        let one = Complex::new(T::one(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        self.a_log(z).ln_abs + (one - i * self.r_sum(z)).norm().ln()
    }

    /// |E(z)| > |E*(z)| sampled in the upper half-plane.
    pub fn hermite_biehler_probe(&self, points: usize, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lo = *self.spectrum.first().unwrap();
        let hi = *self.spectrum.last().unwrap();
        for _ in 0..points {
            let x = cast::<T>(rng.gen_range(-1.0..1.0)) * (hi - lo) * cast(0.5)
                + (hi + lo) * cast(0.5);
            let y = cast::<T>(rng.gen_range(0.1..4.0));
            let z = Complex::new(x, y);
            if self.e_ln_abs(z) <= self.e_ln_abs(z.conj()) {
                return Err(Error::HermiteBiehler { z: format!("{z}") });
            }
        }
        Ok(())
    }

    /// Unnormalized phase angle of (A, B) at a real point, principal value.
    fn angle(&self, x: T) -> T {
        // exactly on the spectrum A = 0 and the A·r log product degenerates;
        // there the angle is ±π/2 with the sign of B = μ_j·A(z)/(t_j - z)
        let j = self.spectrum.partition_point(|&t| t < x);
        for i in [j.saturating_sub(1), j.min(self.spectrum.len() - 1)] {
            let tj = self.spectrum[i];
            if x == tj {
                return self.b_sign_at_spectrum(i) * T::PI() * cast(0.5);
            }
        }
        let la = self.a_log(c_re(x));
        let r = self.r_sum(c_re(x)).re;
        let sign_a = la.real_sign();
        let lb = la.ln_abs + r.abs().ln();
        let sign_b = sign_a * r.signum();
        let m = la.ln_abs.max(lb);
        let va = sign_a * (la.ln_abs - m).exp();
        let vb = sign_b * (lb - m).exp();
        vb.atan2(va)
    }

    fn b_sign_at_spectrum(&self, j: usize) -> T {
        let tj = self.spectrum[j];
        if tj == T::zero() {
            -self.a.real_sign_skipping(usize::MAX, tj)
        } else {
            let skip = self.spectrum.iter().take(j).filter(|&&t| t != T::zero()).count();
            self.a.real_sign_skipping(skip, tj) * tj.signum()
        }
    }

    /// φ(b) - φ(a) by adaptive tracking with per-step increments < π/2.
    pub fn phase_increment(&self, a: T, b: T) -> T {
        let mut total = T::zero();
        let mut stack = vec![(a, self.angle(a), b, self.angle(b), 0u32)];
        let half_pi = T::PI() * cast(0.5);
        while let Some((x0, th0, x1, th1, depth)) = stack.pop() {
            let mut d = th1 - th0;
            let two_pi = T::PI() * cast(2.0);
            d = d - two_pi * (d / two_pi).round();
            if d.abs() < half_pi || depth >= 48 {
                total += d;
            } else {
                let mid = (x0 + x1) * cast(0.5);
                let thm = self.angle(mid);
                stack.push((x0, th0, mid, thm, depth + 1));
                stack.push((mid, thm, x1, th1, depth + 1));
            }
        }
        total
    }

    fn track_gap_increments(&self) -> Vec<T> {
        self.spectrum
            .par_windows(2)
            .map(|w| {
                // nudge off the exact zeros of A so atan2 sees both components
                let eps = (w[1] - w[0]) * cast(1e-9);
                self.phase_increment(w[0] + eps, w[1] - eps)
                    + (self.angle_slope_correction(w[0], eps) + self.angle_slope_correction(w[1], -eps))
            })
            .collect()
    }

    // phase lost to the endpoint nudges, recovered through φ' there
    fn angle_slope_correction(&self, t: T, eps: T) -> T {
        self.phase_derivative(t + eps) * eps.abs()
    }

    /// φ'(x) by a five-point stencil on the local (branch-free) angle.
    pub fn phase_derivative(&self, x: T) -> T {
        let gap = self.local_gap(x);
        let h = gap * cast(1e-3);
        let th = |u: T| self.angle(u);
        // unwrap the five samples around th(x)
        let base = th(x);
        let mut vals = [th(x - h - h), th(x - h), base, th(x + h), th(x + h + h)];
        let two_pi = T::PI() * cast(2.0);
        for v in vals.iter_mut() {
            let mut d = *v - base;
            d = d - two_pi * (d / two_pi).round();
            *v = base + d;
        }
        (vals[0] - vals[4] + cast::<T>(8.0) * (vals[3] - vals[1])) / (cast::<T>(12.0) * h)
    }

    fn local_gap(&self, x: T) -> T {
        let i = self.spectrum.partition_point(|&t| t < x);
        let lo = if i > 0 { self.spectrum[i] - self.spectrum[i - 1] } else { T::one() };
        let hi = if i + 1 < self.spectrum.len() {
            self.spectrum[i + 1] - self.spectrum[i]
        } else {
            T::one()
        };
        lo.min(hi).max(cast(1e-8))
    }

    fn check_phase_masses(&self) -> Result<T> {
        let n = self.spectrum.len();
        let step = (n / 48).max(1);
        let idx: Vec<usize> = (0..n).step_by(step).collect();
        let defect = idx
            .par_iter()
            .map(|&i| {
                let d = self.phase_derivative(self.spectrum[i]) * self.masses[i] - T::one();
                d.abs()
            })
            .reduce(|| T::zero(), T::max);
        Ok(defect)
    }
}

/// Reproducing kernel of H(E); the diagonal at real w is φ'(w)|E(w)|²/π.
pub fn kernel_db<T: Scalar>(m: &ClarkModel<T>, w: C<T>, z: C<T>) -> C<T> {
    let diff = w.conj() - z;
    if diff.norm() < cast(1e-9) && w.im.abs() < cast(1e-9) {
        let e = m.e_eval(c_re(w.re)).norm_sqr();
        return c_re(m.phase_derivative(w.re) * e / T::PI());
    }
    let e_w = m.e_eval(w);
    let e_z = m.e_eval(z);
    let estar_w = m.e_eval(w.conj()).conj();
    let estar_z = m.e_eval(z.conj()).conj();
    let two_pi_i = Complex::new(T::zero(), cast::<T>(2.0) * T::PI());
    (e_w.conj() * e_z - estar_w.conj() * estar_z) / (two_pi_i * diff)
}

/// Discrete Parseval over the orthogonal basis A/(z - t_n):
/// ⟨F, G⟩ = π Σ conj(a_n) b_n for F = A Σ conj(a_n)μ_n^{1/2}/(z-t_n).
pub fn inner_db<T: Scalar>(m: &ClarkModel<T>, a: &[C<T>], b: &[C<T>]) -> Result<C<T>> {
    if a.len() != m.spectrum.len() || b.len() != m.spectrum.len() {
        return Err(Error::WindowMismatch(
            (0, m.spectrum.len() as i64),
            (0, a.len().max(b.len()) as i64),
        ));
    }
    let mut acc = Complex::new(T::zero(), T::zero());
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * *y;
    }
    Ok(acc * T::PI())
}

/// Coefficient vector of a function F = A·Σ conj(a_n) μ^{1/2}/(z-t_n)
/// sampled from its values at the spectrum: a_n = conj(F(t_n)/(A'(t_n) μ_n^{1/2})).
pub fn basis_coefficients<T: Scalar>(m: &ClarkModel<T>, f_at_spectrum: &[C<T>]) -> Vec<C<T>> {
    m.spectrum
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let aprime = a_prime_log(m, i);
            let denom = aprime.to_complex() * num_traits::Float::sqrt(m.masses[i]);
            (f_at_spectrum[i] / denom).conj()
        })
        .collect()
}

/// A'(t_n) by a Richardson-extrapolated central difference in log scale,
/// cross-checked in the tests against the product's own derivative.
pub fn a_prime_log<T: Scalar>(m: &ClarkModel<T>, index: usize) -> LogComplex<T> {
    let t = m.spectrum[index];
    let gap = if index + 1 < m.spectrum.len() {
        m.spectrum[index + 1] - t
    } else {
        t - m.spectrum[index - 1]
    };
    let h = gap * cast(1e-6);
    let diff = |hh: T| -> LogComplex<T> {
        let p = m.a_log(c_re(t + hh));
        let q = m.a_log(c_re(t - hh));
        p.sub(q).scale((hh + hh).recip())
    };
    let d1 = diff(h);
    let d2 = diff(h * cast(0.5));
    // (4 d2 - d1)/3
    d2.scale(cast(4.0 / 3.0)).sub(d1.scale(cast(1.0 / 3.0)))
}

// ---------------------------------------------------------------------------
// the defect pipeline over a general tempered spectrum
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct ExampleSchedule<T> {
    pub n_k: Vec<usize>,
    pub l_k: Vec<usize>,
    pub rho_t0: Vec<T>,
    pub rho_s2: Vec<T>,
    pub hypot_exponent: T,
    pub hypot_constant: T,
    /// smallest achieved dist(s̃_k, spectrum)·|t_{n_k}|^N
    pub separation_margin: T,
}

#[derive(Clone, Debug)]
pub struct PipelineParams<T> {
    pub blocks: usize,
    /// exponent N of the separation bound; also reused for the shift scan
    pub hypot_exponent: T,
    pub seed: u64,
    pub ext_samples: usize,
}

impl<T: Scalar> Default for PipelineParams<T> {
    fn default() -> Self {
        PipelineParams { blocks: 4, hypot_exponent: T::one(), seed: 0, ext_samples: 24 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtReport<T> {
    pub ext1_max_rel_err: T,
    pub ext2_max_rel_err: T,
    pub ext3_max_rel_err: T,
    pub ext3_kappa_ln: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport<T> {
    pub spectrum_points: usize,
    pub hypot_min_c: T,
    pub c_at_blocks: Vec<T>,
    pub c_band_ratio: T,
    pub c_sq_partial_sums: Vec<T>,
    pub c_sq_min_increment: T,
    pub c_sq_weighted_sum: T,
    pub c_sq_weighted_tail: T,
    pub ext: ExtReport<T>,
    pub phase_mass_defect: T,
    pub shifted_zeros_in_half_gap: bool,
}

pub struct PipelineOutcome<T> {
    pub schedule: ExampleSchedule<T>,
    pub spectrum: Vec<T>,
    pub abs_a: Vec<T>,
    pub c: Vec<T>,
    pub gap_zeros: Vec<T>,
    pub t0: ProductFunction<T>,
    pub t0_tilde: ProductFunction<T>,
    pub t1: ProductFunction<T>,
    pub s2: ProductFunction<T>,
    pub g1: ProductFunction<T>,
    pub model: ClarkModel<T>,
    pub report: PipelineReport<T>,
}

/// Power-growth spectrum t_n = sign(n)|n|^γ over n ∈ [-window, window].
pub fn power_spectrum<T: Scalar>(gamma: T, window: i64) -> Vec<T> {
    (-window..=window)
        .map(|n| {
            let a = from_i64::<T>(n.abs()).powf(gamma);
            if n < 0 {
                -a
            } else {
                a
            }
        })
        .collect()
}

fn offset(window: i64, n: i64) -> usize {
    (n + window) as usize
}

/// Shift one located zero toward (but past) its nearer gap endpoint:
/// anchor - k·|z - anchor|·ρ with ρ scanned over 64 candidates in (1, 2).
fn shift_zero<T: Scalar>(
    spectrum: &[T],
    window: i64,
    z: T,
    gap_left: i64,
    k: usize,
    sep_threshold: T,
    exclude: &[T],
) -> Result<(T, T)> {
    let t_lo = spectrum[offset(window, gap_left)];
    let t_hi = spectrum[offset(window, gap_left + 1)];
    let kf = from_i64::<T>(k as i64);
    let (anchor, excl_idx) = if z - t_lo > t_hi - z {
        (t_hi, gap_left + 1)
    } else {
        (t_lo, gap_left)
    };
    let dist = (z - anchor).abs();
    for j in 0..64 {
        let rho = T::one() + (from_i64::<T>(j) + cast(0.5)) / cast(64.0);
        let shifted = if anchor == t_hi {
            t_hi - kf * dist * rho
        } else {
            t_lo - kf * dist * rho
        };
        // stays in the half-gap toward the anchor
        let in_range = if anchor == t_hi {
            shifted > t_hi * cast(0.5) && shifted < t_hi
        } else {
            shifted > t_lo - (t_lo - spectrum[offset(window, gap_left - 1)]) && shifted < t_lo
        };
        if !in_range {
            continue;
        }
        let sep = spectrum
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != offset(window, excl_idx))
            .map(|(_, &t)| (t - shifted).abs())
            .fold(T::infinity(), T::min);
        if sep < sep_threshold {
            continue;
        }
        if exclude.iter().any(|&e| (e - shifted).abs() < sep_threshold) {
            continue;
        }
        return Ok((shifted, rho));
    }
    Err(Error::RhoScanExhausted { block: k })
}

/// The full construction: schedules, amplitude profile, gap zeros, the split
/// S = T₀T₁S₂, the two shifted products, Clark masses μ_n = c_n², the model,
/// and the identity residuals.
pub fn construct_example<T: Scalar>(
    spectrum: Vec<T>,
    params: &PipelineParams<T>,
) -> Result<PipelineOutcome<T>> {
    let points = spectrum.len() as i64;
    if points % 2 == 0 {
        return Err(Error::ScheduleInfeasible("spectrum window must be symmetric".into()));
    }
    let window = (points - 1) / 2;
    assert!(spectrum.windows(2).all(|w| w[0] < w[1]));
    let kk = params.blocks;

    // growth hypothesis: c|t_n|^{-N} ≤ t_{n+1} - t_n, reported as achieved c
    let n_exp = params.hypot_exponent;
    let mut hypot_min_c = T::infinity();
    for i in 0..spectrum.len() - 1 {
        let t = spectrum[i].abs().max(spectrum[i + 1].abs());
        if t > T::zero() {
            hypot_min_c = hypot_min_c.min((spectrum[i + 1] - spectrum[i]) * t.powf(n_exp));
        }
    }

    // (i) block schedules
    let t_at = |n: i64| spectrum[offset(window, n)];
    let mut n_k: Vec<i64> = Vec::with_capacity(kk);
    let mut l_k: Vec<i64> = Vec::with_capacity(kk);
    let mut cursor = 4i64;
    for k in 1..=kk {
        let kf = from_i64::<T>(k as i64);
        let mut n = cursor;
        loop {
            if n + 2 >= window {
                return Err(Error::ScheduleInfeasible(format!(
                    "no room for block {k} inside the window"
                )));
            }
            let cond_gap = kf * (t_at(n + 1) - t_at(n)) <= t_at(n) / cast(100.0);
            if cond_gap && t_at(n) > T::zero() {
                break;
            }
            n += 1;
        }
        // find l with t_{n+l} > 2 t_n
        let mut l = 1i64;
        while t_at(n + l) <= cast::<T>(2.0) * t_at(n) {
            l += 1;
            if n + l + 2 >= window {
                return Err(Error::ScheduleInfeasible(format!(
                    "block {k}: t_(n+l) cannot clear 2 t_n inside the window"
                )));
            }
        }
        n_k.push(n);
        l_k.push(l);
        // next block must start past the doubled l-point
        let mut next = n + l + 1;
        while next < window && t_at(next) <= cast::<T>(2.0) * t_at(n + l) {
            next += 1;
        }
        cursor = next;
    }
    for k in 0..kk - 1 {
        let ok = cast::<T>(2.0) * t_at(n_k[k]) < t_at(n_k[k] + l_k[k])
            && t_at(n_k[k] + l_k[k]) < t_at(n_k[k + 1]) / cast(2.0);
        if !ok {
            return Err(Error::ScheduleInfeasible(format!("block chain broken at k = {}", k + 1)));
        }
    }

    // (ii) amplitude profile |a_n|
    let mut abs_a: Vec<T> = (-window..=window)
        .map(|n| (from_i64::<T>(n.abs()) + T::one()).recip())
        .collect();
    for (k0, (&n, &l)) in n_k.iter().zip(&l_k).enumerate() {
        let v = from_i64::<T>((k0 + 1) as i64).recip();
        for idx in [n, n + 1, n + l, n + l + 1] {
            abs_a[offset(window, idx)] = v;
        }
    }

    // (iii) gap zeros of S, with S/A = Σ a_n²/(z - t_n)
    let sq: Vec<T> = abs_a.iter().map(|&a| a * a).collect();
    let ct = CauchyTransform::new(spectrum.clone(), sq.clone(), T::zero());
    let gap_zeros = herglotz::locate_gap_zeros(&ct)?;
    let zero_in_gap = |n: i64| gap_zeros[offset(window, n)];

    // (iv) ownership split
    let t0_zeros: Vec<T> = n_k.iter().map(|&n| zero_in_gap(n)).collect();
    let s2_zeros: Vec<T> = n_k.iter().zip(&l_k).map(|(&n, &l)| zero_in_gap(n + l)).collect();
    let t1_zeros: Vec<T> = (-window..window)
        .filter(|n| !n_k.contains(n) && !n_k.iter().zip(&l_k).any(|(&m, &l)| m + l == *n))
        .map(zero_in_gap)
        .collect();

    // (v) + (viii) shifted companions
    let mut rho_t0 = Vec::with_capacity(kk);
    let mut rho_s2 = Vec::with_capacity(kk);
    let mut t0_tilde_zeros = Vec::with_capacity(kk);
    let mut g1_zeros = Vec::with_capacity(kk);
    let mut separation_margin = T::infinity();
    let mut forbidden: Vec<T> = t1_zeros.clone();
    forbidden.extend_from_slice(&s2_zeros);
    for (k0, (&n, &l)) in n_k.iter().zip(&l_k).enumerate() {
        let k = k0 + 1;
        let thr = t_at(n).abs().powf(-n_exp);
        let (sz, rho) = shift_zero(&spectrum, window, zero_in_gap(n), n, k, thr, &forbidden)?;
        separation_margin = separation_margin.min(
            spectrum.iter().map(|&t| (t - sz).abs()).fold(T::infinity(), T::min) / thr,
        );
        t0_tilde_zeros.push(sz);
        rho_t0.push(rho);
        forbidden.push(sz);

        let thr2 = t_at(n + l).abs().powf(-n_exp);
        let mut forbidden2 = forbidden.clone();
        forbidden2.extend_from_slice(&t0_zeros);
        let (gz, rho2) = shift_zero(&spectrum, window, zero_in_gap(n + l), n + l, k, thr2, &forbidden2)?;
        g1_zeros.push(gz);
        rho_s2.push(rho2);
        forbidden.push(gz);
    }
    let shifted_zeros_in_half_gap = t0_tilde_zeros
        .iter()
        .zip(&n_k)
        .all(|(&sz, &n)| sz > t_at(n) * cast(0.5) && sz < t_at(n + 1));

    let t0 = ProductFunction::genus0_real(&t0_zeros);
    let t0_tilde = ProductFunction::genus0_real(&t0_tilde_zeros);
    let t1 = ProductFunction::genus0_real(&t1_zeros);
    let s2 = ProductFunction::genus0_real(&s2_zeros);
    let g1 = ProductFunction::genus0_real(&g1_zeros);

    // (vi) c_n = |a_n|·T̃₀(t_n)/T₀(t_n); signs ride along with the ratio
    let c: Vec<T> = (-window..=window)
        .into_par_iter()
        .map(|n| {
            let t = t_at(n);
            abs_a[offset(window, n)] * t0_tilde.eval_ratio(&t0, c_re(t)).re
        })
        .collect();

    // (vii) the Clark model with μ_n = c_n²
    let mu: Vec<T> = c.iter().map(|&v| v * v).collect();
    let model = ClarkModel::build(spectrum.clone(), mu)?;

    // (ix) report
    let c_at_blocks: Vec<T> =
        n_k.iter().map(|&n| c[offset(window, n + 1)].abs()).collect();
    let band_hi = c_at_blocks.iter().cloned().fold(T::zero(), T::max);
    let band_lo = c_at_blocks.iter().cloned().fold(T::infinity(), T::min);

    let mut partials = Vec::with_capacity(kk);
    let mut acc = T::zero();
    let mut cursor_idx = 0i64;
    for (&n, _) in n_k.iter().zip(&l_k) {
        let upto = n + 1;
        while cursor_idx <= upto {
            for m in [cursor_idx, -cursor_idx] {
                if m == 0 && cursor_idx != 0 {
                    continue;
                }
                let v = c[offset(window, m)];
                acc += v * v;
            }
            cursor_idx += 1;
        }
        partials.push(acc);
    }
    let mut min_inc = T::infinity();
    let mut prev = T::zero();
    for &p in &partials {
        min_inc = min_inc.min(p - prev);
        prev = p;
    }
    let mut weighted = T::zero();
    let mut weighted_tail = T::zero();
    let quarter = window - window / 4;
    for n in -window..=window {
        let t = t_at(n);
        if t != T::zero() {
            let v = c[offset(window, n)];
            let term = v * v / (t * t);
            weighted += term;
            if n.abs() > quarter {
                weighted_tail += term;
            }
        }
    }

    let schedule = ExampleSchedule {
        n_k: n_k.iter().map(|&n| n as usize).collect(),
        l_k: l_k.iter().map(|&l| l as usize).collect(),
        rho_t0,
        rho_s2,
        hypot_exponent: n_exp,
        hypot_constant: hypot_min_c,
        separation_margin,
    };
    let outcome_products =
        (t0.clone(), t0_tilde.clone(), t1.clone(), s2.clone(), g1.clone());
    let ext = residual_ext(
        &model,
        &spectrum,
        window,
        &abs_a,
        &c,
        &outcome_products,
        params.ext_samples,
        params.seed,
    )?;

    let report = PipelineReport {
        spectrum_points: spectrum.len(),
        hypot_min_c,
        c_at_blocks,
        c_band_ratio: band_hi / band_lo,
        c_sq_partial_sums: partials,
        c_sq_min_increment: min_inc,
        c_sq_weighted_sum: weighted,
        c_sq_weighted_tail: weighted_tail,
        ext,
        phase_mass_defect: model.phase_mass_defect,
        shifted_zeros_in_half_gap,
    };
    Ok(PipelineOutcome {
        schedule,
        spectrum,
        abs_a,
        c,
        gap_zeros,
        t0,
        t0_tilde,
        t1,
        s2,
        g1,
        model,
        report,
    })
}

/// Align a set of log-space ratios on one fitted scalar and return
/// (ln κ, max relative deviation).
fn fit_log_scalar<T: Scalar>(deltas: &[LogComplex<T>]) -> (T, T) {
    assert!(!deltas.is_empty());
    let n = from_i64::<T>(deltas.len() as i64);
    let kappa_ln = deltas.iter().map(|d| d.ln_abs).fold(T::zero(), |a, b| a + b) / n;
    let two_pi = T::PI() * cast(2.0);
    let principal = |x: T| x - two_pi * (x / two_pi).round();
    let ref_arg = principal(deltas[0].arg);
    let kappa = LogComplex { ln_abs: kappa_ln, arg: ref_arg };
    let max_dev = deltas
        .iter()
        .map(|d| {
            let r = d.div(kappa);
            let m = r.ln_abs.exp();
            let (s, c) = principal(r.arg).sin_cos();
            ((m * c - T::one()).powi(2) + (m * s).powi(2)).sqrt()
        })
        .fold(T::zero(), T::max);
    (kappa_ln, max_dev)
}

type Products<T> = (
    ProductFunction<T>,
    ProductFunction<T>,
    ProductFunction<T>,
    ProductFunction<T>,
    ProductFunction<T>,
);

/// Residuals of the three structure identities, everything in log scale:
/// (ext1) Σ c_n|a_n|/(z-t_n) = κ·h/A at samples, h = T̃₀T₁S₂;
/// (ext2) S G₁/(A S₂) = κ'·Σ w_n a_n/(z-t_n) with the h/(A'|c_n|) weights;
/// (ext3) S(t_n) = κ''·|a_n|² A'(t_n) on the spectrum.
#[allow(clippy::too_many_arguments)]
fn residual_ext<T: Scalar>(
    model: &ClarkModel<T>,
    spectrum: &[T],
    _window: i64,
    abs_a: &[T],
    c: &[T],
    products: &Products<T>,
    samples: usize,
    seed: u64,
) -> Result<ExtReport<T>> {
    let (t0, t0_tilde, t1, s2, _g1) = products;
    let g1 = &products.4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_gaps = spectrum.len() - 1;
    let sample_gaps: Vec<usize> =
        (0..samples).map(|_| rng.gen_range(0..n_gaps)).collect();
    let sample_x: Vec<T> = sample_gaps
        .iter()
        .map(|&i| (spectrum[i] + spectrum[i + 1]) * cast(0.47))
        .collect();

    // ext1: LHS direct sum, RHS = T̃₀T₁S₂/A in logs
    let deltas1: Vec<LogComplex<T>> = sample_x
        .par_iter()
        .map(|&x| {
            let mut lhs = T::zero();
            for (i, &t) in spectrum.iter().enumerate() {
                lhs += c[i] * abs_a[i] / (x - t);
            }
            let z = c_re(x);
            let rhs = t0_tilde
                .eval_log(z)
                .mul(t1.eval_log(z))
                .mul(s2.eval_log(z))
                .div(model.a_log(z));
            LogComplex::from_real(lhs).div(rhs)
        })
        .collect();
    let (_, ext1_err) = fit_log_scalar(&deltas1);

    // ext2: S/A · G₁/S₂ against the weighted sum with h/(A'|c|) weights;
    // the weights use the independent numeric A' route
    let weights: Vec<T> = (0..spectrum.len())
        .into_par_iter()
        .map(|i| {
            let z = c_re(spectrum[i]);
            let h_log = t0_tilde.eval_log(z).mul(t1.eval_log(z)).mul(s2.eval_log(z));
            let ap = a_prime_log(model, i);
            let w = h_log.div(ap);
            let g1_over_s2 = g1.eval_ratio(s2, z).re;
            w.real_sign() * w.ln_abs.exp() / c[i].abs() * abs_a[i] * g1_over_s2
        })
        .collect();
    let deltas2: Vec<LogComplex<T>> = sample_x
        .par_iter()
        .map(|&x| {
            let z = c_re(x);
            let mut s_over_a = T::zero();
            for (i, &t) in spectrum.iter().enumerate() {
                s_over_a += abs_a[i] * abs_a[i] / (x - t);
            }
            let lhs = LogComplex::from_real(s_over_a).mul(g1.eval_log(z)).div(s2.eval_log(z));
            let mut rhs = T::zero();
            for (i, &t) in spectrum.iter().enumerate() {
                rhs += weights[i] / (x - t);
            }
            lhs.div(LogComplex::from_real(rhs))
        })
        .collect();
    let (_, ext2_err) = fit_log_scalar(&deltas2);

    // ext3 on a spread of spectrum points
    let step = (spectrum.len() / 64).max(1);
    let deltas3: Vec<LogComplex<T>> = (0..spectrum.len())
        .step_by(step)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&i| {
            let z = c_re(spectrum[i]);
            let s_log = t0.eval_log(z).mul(t1.eval_log(z)).mul(s2.eval_log(z));
            let rhs = a_prime_log(model, i).scale(abs_a[i] * abs_a[i]);
            s_log.div(rhs)
        })
        .collect();
    let (ext3_kappa_ln, ext3_err) = fit_log_scalar(&deltas3);

    Ok(ExtReport {
        ext1_max_rel_err: ext1_err,
        ext2_max_rel_err: ext2_err,
        ext3_max_rel_err: ext3_err,
        ext3_kappa_ln,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_model() -> ClarkModel<f64> {
        ClarkModel::build(vec![-1.0, 1.0], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn tiny_model_closed_forms() {
        let m = tiny_model();
        // E ∝ (z+i)²: check at a few points (A(0) = 1 normalization gives E = -(z+i)²... up to sign)
        for z in [C::new(0.3, 0.2), C::new(-1.5, 1.0), C::new(0.0, 0.0)] {
            let e = m.e_eval(z);
            let expect = -(z + C::new(0.0, 1.0)).powi(2);
            assert!((e - expect).norm() < 1e-13 * expect.norm().max(1.0), "E at {z}");
        }
        // φ'(±1)·μ = 1
        for t in [-1.0, 1.0] {
            let d = m.phase_derivative(t);
            assert!((d - 1.0).abs() < 1e-10, "φ'({t}) = {d}");
        }
        assert!(m.phase_mass_defect < 1e-10);
        // K_0(0) = φ'(0)|E(0)|²/π = 2/π
        let k00 = kernel_db(&m, C::new(0.0, 0.0), C::new(0.0, 0.0));
        assert!((k00.re - 2.0 / std::f64::consts::PI).abs() < 1e-10, "K_0(0) = {k00}");
        // single-point model {0}, mass 1: A = z, B = -1, E = z + i, φ'(0) = 1
        let m1 = ClarkModel::build(vec![0.0], vec![1.0]).unwrap();
        let e = m1.e_eval(C::new(0.7, 0.4));
        assert!((e - C::new(0.7, 0.4) - C::new(0.0, 1.0)).norm() < 1e-14);
        assert!((m1.phase_derivative(0.0f64) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kernel_symmetry_orthogonality_positivity() {
        use rand::{Rng, SeedableRng};
        let spectrum: Vec<f64> = (1..=8).map(|i| i as f64 + 0.2 * (i as f64).sin()).collect();
        let masses: Vec<f64> = (1..=8).map(|i| 0.5 + 0.1 * i as f64).collect();
        let m = ClarkModel::build(spectrum.clone(), masses).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let w = C::new(rng.gen_range(-3.0..10.0), rng.gen_range(-1.0..1.0));
            let z = C::new(rng.gen_range(-3.0..10.0), rng.gen_range(-1.0..1.0));
            let kwz = kernel_db(&m, w, z);
            let kzw = kernel_db(&m, z, w);
            assert!((kwz - kzw.conj()).norm() < 1e-10 * kwz.norm().max(1e-10), "symmetry");
        }
        // basis orthogonality: K_{t_n}(t_m) = 0 exactly up to roundoff
        let scale = kernel_db(&m, c_re(spectrum[0]), c_re(spectrum[0])).norm();
        for i in 0..spectrum.len() {
            for j in 0..spectrum.len() {
                if i != j {
                    let k = kernel_db(&m, c_re(spectrum[i]), c_re(spectrum[j]));
                    assert!(k.norm() <= 1e-10 * scale, "K(t_{i}, t_{j}) = {k}");
                }
            }
        }
        // diagonal positivity at 20 random real points
        for _ in 0..20 {
            let x = rng.gen_range(-2.0..11.0);
            let k = kernel_db(&m, C::new(x, 0.0), C::new(x, 0.0));
            assert!(k.re > 0.0, "diagonal at {x}");
        }
    }

    #[test]
    fn phase_increments_are_pi_per_gap() {
        let spectrum: Vec<f64> = (-6..=6).map(|i| i as f64 * 1.1).collect();
        let masses: Vec<f64> = (-6..=6).map(|i| 1.0 + 0.05 * (i as f64).cos()).collect();
        let m = ClarkModel::build(spectrum, masses).unwrap();
        for (i, d) in m.gap_phase_increments.iter().enumerate() {
            assert!((d - std::f64::consts::PI).abs() < 1e-6, "gap {i}: Δφ = {d}");
        }
    }

    #[test]
    fn b_zeros_interlace() {
        let spectrum: Vec<f64> = (0..30).map(|i| (i as f64).powf(1.3)).collect();
        let masses: Vec<f64> = (0..30).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let m = ClarkModel::build(spectrum.clone(), masses).unwrap();
        assert_eq!(m.b_zeros.len(), spectrum.len() - 1);
        for (i, &z) in m.b_zeros.iter().enumerate() {
            assert!(spectrum[i] < z && z < spectrum[i + 1]);
        }
    }

    #[test]
    fn parseval_single_and_disjoint() {
        let m = tiny_model();
        let a = vec![C::new(1.0, 0.0), C::new(0.0, 0.0)];
        let ip = inner_db(&m, &a, &a).unwrap();
        assert!((ip - c_re(std::f64::consts::PI)).norm() < 1e-14);
        let b = vec![C::new(0.0, 0.0), C::new(2.0, 0.0)];
        assert_eq!(inner_db(&m, &a, &b).unwrap(), C::new(0.0, 0.0));
        assert!(inner_db(&m, &a[..1].to_vec(), &b).is_err());
    }

    #[test]
    fn a_prime_matches_product_derivative() {
        let spectrum: Vec<f64> = vec![-2.5, -0.75, 0.6, 1.9, 4.2];
        let masses = vec![1.0; 5];
        let m = ClarkModel::build(spectrum, masses).unwrap();
        for i in 0..5 {
            let num = a_prime_log(&m, i);
            let exact = m.a.derivative_at_zero(i);
            let got = num.to_complex();
            assert!((got - exact).norm() < 1e-9 * exact.norm(), "index {i}");
        }
    }

    #[test]
    fn pipeline_on_power_three_halves() {
        let spectrum = power_spectrum(1.5f64, 900);
        let params = PipelineParams { blocks: 2, ..Default::default() };
        let out = construct_example(spectrum, &params).unwrap();
        assert_eq!(out.schedule.n_k.len(), 2);
        assert!(out.report.c_band_ratio <= 10.0, "band {}", out.report.c_band_ratio);
        assert!(out.report.c_sq_min_increment > 0.0);
        assert!(out.report.c_sq_weighted_tail < 1e-3);
        assert!(out.report.ext.ext1_max_rel_err < 1e-6, "ext1 {}", out.report.ext.ext1_max_rel_err);
        assert!(out.report.ext.ext2_max_rel_err < 1e-6, "ext2 {}", out.report.ext.ext2_max_rel_err);
        assert!(out.report.ext.ext3_max_rel_err < 1e-6, "ext3 {}", out.report.ext.ext3_max_rel_err);
        assert!(out.report.phase_mass_defect < 1e-6);
        assert!(out.report.shifted_zeros_in_half_gap);
        assert!(out.report.hypot_min_c > 0.0);
    }

    #[test]
    fn pipeline_infeasible_window_is_clean() {
        let spectrum = power_spectrum(1.5f64, 40);
        let params = PipelineParams { blocks: 4, ..Default::default() };
        assert!(matches!(
            construct_example(spectrum, &params),
            Err(Error::ScheduleInfeasible(_))
        ));
    }

    #[test]
    fn pipeline_on_integer_spectrum() {
        // t_n = n: reproduces the sparse-block structure qualitatively
        let spectrum: Vec<f64> = (-1000..=1000).map(|n| n as f64).collect();
        let params = PipelineParams { blocks: 2, ..Default::default() };
        let out = construct_example(spectrum, &params).unwrap();
        // shifted zeros sit near t_{n_k+1} on the anchor side
        for (k0, &n) in out.schedule.n_k.iter().enumerate() {
            let sz = out.t0_tilde.real_zeros()[k0];
            assert!(sz < out.spectrum[offset(1000, n as i64 + 1)]);
            assert!(sz > out.spectrum[offset(1000, n as i64 + 1)] / 2.0);
        }
        assert!(out.report.ext.ext1_max_rel_err < 1e-6);
    }
}
