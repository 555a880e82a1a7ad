//! Paley-Wiener primitives: cardinal (partial-fraction) series, sinc
//! reproducing kernels, lattice Parseval products, and the two residual sums
//! a defect vector must annihilate.
//!
//! Normalization ledger. Two coefficient conventions appear in the source
//! material and are easy to mix up:
//!
//! * the *mass* convention: f(z) = sin π(z-α) · Σ c_n/(z-n-α), so that
//!   f(m+α) = π(-1)^m c_m;
//! * the *basis* convention: f = Σ conj(a_n) K_{n+α}, i.e. a_n = conj(f(n+α)).
//!
//! The conversion is recorded once, here: c_n = (-1)^n conj(a_n)/π. Types in
//! this crate store masses; [`basis_coeffs_from_masses`] and
//! [`masses_from_basis_coeffs`] translate. Each residual operation documents
//! which convention it consumes.

use crate::error::{Error, Result};
use crate::scalar::{cast, from_i64, Accum, Scalar};
use crate::seq::{DenseSeq, LatticeSeq, PowerLawSeq, Summed, TailLaw};
use crate::special::{dist_to_integers, ln_abs_sin_pi, sin_pi_c, sinc_pi_c};
use num_complex::Complex;

/// Coefficient storage of a sampled series: dense window or power law.
#[derive(Clone, Debug)]
pub enum Coeffs<T> {
    Dense(DenseSeq<T>),
    Law(PowerLawSeq<T>),
}

impl<T: Scalar> Coeffs<T> {
    fn window(&self) -> (i64, i64) {
        match self {
            Coeffs::Dense(s) => s.window(),
            Coeffs::Law(s) => s.window(),
        }
    }

    pub fn value(&self, n: i64) -> Complex<T> {
        match self {
            Coeffs::Dense(s) => s.value(n),
            Coeffs::Law(s) => s.value(n),
        }
    }

    fn tail(&self) -> TailLaw<T> {
        match self {
            Coeffs::Dense(s) => s.tail(),
            Coeffs::Law(s) => s.tail(),
        }
    }

    /// Σ_n c_n/(w - n) over the window; `skip` drops one index from the sum.
    fn cauchy_sum(&self, w: Complex<T>, skip: Option<i64>) -> Complex<T> {
        match self {
            Coeffs::Dense(s) => {
                let (a, b) = s.window();
                let mut re = Accum::<T>::default();
                let mut im = Accum::<T>::default();
                for n in crate::scalar::ordered_window(a, b) {
                    if skip == Some(n) {
                        continue;
                    }
                    let t = s.value(n) / (w - from_i64::<T>(n));
                    re.add(t.re);
                    im.add(t.im);
                }
                Complex::new(re.value(), im.value())
            }
            Coeffs::Law(s) => {
                let mut v = if w.im == T::zero() {
                    Complex::new(s.cauchy_sum_real(w.re), T::zero())
                } else {
                    s.cauchy_sum_complex(w)
                };
                if let Some(m) = skip {
                    v -= s.value(m) / (w - from_i64::<T>(m));
                }
                v
            }
        }
    }
}

/// Entire function f(z) = sin π(z-α) · Σ_n c_n/(z-n-α) given by its masses
/// on a finite window plus a tail decay law.
#[derive(Clone, Debug)]
pub struct SampledEntire<T> {
    shift: T,
    coeffs: Coeffs<T>,
}

impl<T: Scalar> SampledEntire<T> {
    pub fn new(shift: T, coeffs: Coeffs<T>) -> Self {
        assert!(shift >= T::zero() && shift < T::one(), "shift must lie in [0,1)");
        SampledEntire { shift, coeffs }
    }

    pub fn from_dense(shift: T, seq: DenseSeq<T>) -> Self {
        SampledEntire::new(shift, Coeffs::Dense(seq))
    }

    pub fn from_law(seq: PowerLawSeq<T>) -> Self {
        SampledEntire::new(T::zero(), Coeffs::Law(seq))
    }

    pub fn shift(&self) -> T {
        self.shift
    }

    pub fn coeffs(&self) -> &Coeffs<T> {
        &self.coeffs
    }

    pub fn window(&self) -> (i64, i64) {
        self.coeffs.window()
    }

    pub fn mass(&self, n: i64) -> Complex<T> {
        self.coeffs.value(n)
    }

    /// Exact value at the lattice point m+α: π(-1)^m c_m.
    pub fn lattice_value(&self, m: i64) -> Complex<T> {
        let sign = if m.rem_euclid(2) == 0 { T::one() } else { -T::one() };
        self.mass(m) * (T::PI() * sign)
    }

    /// Evaluate anywhere. The nearest lattice term is split off and computed
    /// through a stable sinc, so lattice points come out exact and there is
    /// no cancellation blow-up approaching them.
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.eval_summed(z).value
    }

    pub fn eval_summed(&self, z: Complex<T>) -> Summed<T> {
        let w = z - Complex::new(self.shift, T::zero());
        let m = w.re.round();
        let m_idx = m.to_i64().unwrap_or(0);
        let (lo, hi) = self.window();
        let sin = sin_pi_c(w);
        let tail = self.coeffs.tail().cauchy_tail_bound(hi.max(-lo), self.shift, z) * sin.norm();
        let value = if (lo..=hi).contains(&m_idx) {
            let sign = if m_idx.rem_euclid(2) == 0 { T::one() } else { -T::one() };
            let eps = w - Complex::new(m, T::zero());
            let near = sinc_pi_c(eps) * self.mass(m_idx) * (T::PI() * sign);
            // below 1e-8 the law path switches to the exact at-integer
            // remainder; the first-order error ε·R' is far below roundoff
            let rem = match (&self.coeffs, eps.norm() < cast(1e-8)) {
                (Coeffs::Law(s), true) => {
                    Complex::new(s.cauchy_sum_excluding_at_integer(m_idx), T::zero())
                }
                _ => self.coeffs.cauchy_sum(w, Some(m_idx)),
            };
            near + sin * rem
        } else {
            sin * self.coeffs.cauchy_sum(w, None)
        };
        Summed { value, tail_bound: tail }
    }

    /// The Cauchy part Σ c_n/(z-n-α) alone (no sine factor).
    pub fn cauchy_part(&self, z: Complex<T>) -> Complex<T> {
        self.coeffs.cauchy_sum(z - Complex::new(self.shift, T::zero()), None)
    }

    /// d/dx of the Cauchy part at real x off the lattice.
    pub fn cauchy_part_deriv(&self, x: T) -> T {
        let w = x - self.shift;
        match &self.coeffs {
            Coeffs::Law(s) => -s.cauchy_sum_sq_real(w),
            Coeffs::Dense(s) => {
                let (a, b) = s.window();
                let mut acc = Accum::<T>::default();
                for n in crate::scalar::ordered_window(a, b) {
                    let d = w - from_i64::<T>(n);
                    acc.add(-s.value(n).re / (d * d));
                }
                acc.value()
            }
        }
    }

    /// ln|f(z)|, safe for imaginary parts where sin πz overflows.
    pub fn ln_abs(&self, z: Complex<T>) -> T {
        let w = z - Complex::new(self.shift, T::zero());
        ln_abs_sin_pi(w) + self.coeffs.cauchy_sum(w, None).norm().ln()
    }

    /// ‖f‖² in PW_π via Parseval on the sampling lattice: π² Σ |c_n|².
    pub fn norm_sq(&self) -> Summed<T> {
        let pi2 = T::PI() * T::PI();
        let value = match &self.coeffs {
            Coeffs::Law(s) => s.norm_sq_window(),
            Coeffs::Dense(s) => {
                let (a, b) = s.window();
                let mut acc = Accum::<T>::default();
                for n in crate::scalar::ordered_window(a, b) {
                    acc.add(s.value(n).norm_sqr());
                }
                acc.value()
            }
        };
        let (lo, hi) = self.window();
        let tail = self.coeffs.tail().combine_product(&self.coeffs.tail()).mass_beyond(hi.max(-lo));
        Summed { value: Complex::new(pi2 * value, T::zero()), tail_bound: pi2 * tail }
    }
}

/// Reproducing kernel of PW_π: K_λ(z) = sin π(z - conj λ) / (π (z - conj λ)).
pub fn kernel_pw<T: Scalar>(lambda: Complex<T>, z: Complex<T>) -> Complex<T> {
    sinc_pi_c(z - lambda.conj())
}

/// c_n = (-1)^n conj(a_n)/π
pub fn masses_from_basis_coeffs<T: Scalar>(a: &DenseSeq<T>) -> DenseSeq<T> {
    let pi = T::PI();
    a.map_values(|n, v| {
        let sign = if n.rem_euclid(2) == 0 { T::one() } else { -T::one() };
        v.conj() * (sign / pi)
    })
}

/// a_n = π (-1)^n conj(c_n)
pub fn basis_coeffs_from_masses<T: Scalar>(c: &DenseSeq<T>) -> DenseSeq<T> {
    let pi = T::PI();
    c.map_values(|n, v| {
        let sign = if n.rem_euclid(2) == 0 { T::one() } else { -T::one() };
        v.conj() * (sign * pi)
    })
}

/// Parseval inner product ⟨f, g⟩ = Σ_n f(n+α) conj(g(n+α)) over the union
/// window, with the discarded tail bounded through both decay laws.
pub fn inner_pw<T: Scalar>(f: &SampledEntire<T>, g: &SampledEntire<T>) -> Result<Summed<T>> {
    if f.shift() != g.shift() {
        return Err(Error::MismatchedShifts(
            f.shift().to_f64().unwrap_or(f64::NAN),
            g.shift().to_f64().unwrap_or(f64::NAN),
        ));
    }
    let (fa, fb) = f.window();
    let (ga, gb) = g.window();
    let (a, b) = (fa.min(ga), fb.max(gb));
    let pi2 = T::PI() * T::PI();
    let mut re = Accum::<T>::default();
    let mut im = Accum::<T>::default();
    for n in crate::scalar::ordered_window(a, b) {
        let t = f.mass(n) * g.mass(n).conj();
        re.add(t.re);
        im.add(t.im);
    }
    let tail = f.coeffs.tail().combine_product(&g.coeffs.tail()).mass_beyond(b.max(-a));
    Ok(Summed {
        value: Complex::new(re.value(), im.value()) * pi2,
        tail_bound: pi2 * tail,
    })
}

fn check_lattice_clear<T: Scalar>(lambda: Complex<T>, window: (i64, i64)) -> Result<()> {
    if lambda.im == T::zero() && dist_to_integers(lambda.re) < cast(1e-9) {
        let n = lambda.re.round().to_i64().unwrap_or(0);
        if (window.0..=window.1).contains(&n) {
            return Err(Error::LatticeCollision { n });
        }
    }
    Ok(())
}

/// ⟨G(z)/(z-λ), h⟩ = (1/π) Σ_n a_n G(n)/(n-λ).
///
/// Consumes basis-convention coefficients a_n together with the lattice
/// trace of the generating function; both sequences must share the window.
pub fn biorth_residual<T: Scalar>(
    lambda: Complex<T>,
    a: &dyn LatticeSeq<T>,
    g_lattice: &dyn LatticeSeq<T>,
) -> Result<Summed<T>> {
    if a.window() != g_lattice.window() {
        return Err(Error::WindowMismatch(a.window(), g_lattice.window()));
    }
    check_lattice_clear(lambda, a.window())?;
    let (lo, hi) = a.window();
    let mut re = Accum::<T>::default();
    let mut im = Accum::<T>::default();
    for n in crate::scalar::ordered_window(lo, hi) {
        let t = a.value(n) * g_lattice.value(n) / (Complex::new(from_i64::<T>(n), T::zero()) - lambda);
        re.add(t.re);
        im.add(t.im);
    }
    let tail = a
        .tail()
        .combine_product(&g_lattice.tail())
        .cauchy_tail_bound(hi.max(-lo), T::zero(), lambda)
        / T::PI();
    Ok(Summed {
        value: Complex::new(re.value(), im.value()) / T::PI(),
        tail_bound: tail,
    })
}

/// Σ_n conj(a_n) (-1)^n / (λ-n); equals π·h(λ)/sin πλ in the mass
/// convention (see the module ledger). Consumes basis-convention a_n.
pub fn kernel_residual<T: Scalar>(lambda: Complex<T>, a: &dyn LatticeSeq<T>) -> Result<Summed<T>> {
    check_lattice_clear(lambda, a.window())?;
    let (lo, hi) = a.window();
    let mut re = Accum::<T>::default();
    let mut im = Accum::<T>::default();
    for n in crate::scalar::ordered_window(lo, hi) {
        let sign = if n.rem_euclid(2) == 0 { T::one() } else { -T::one() };
        let t = a.value(n).conj() * sign / (lambda - from_i64::<T>(n));
        re.add(t.re);
        im.add(t.im);
    }
    let tail = a.tail().cauchy_tail_bound(hi.max(-lo), T::zero(), lambda);
    Ok(Summed {
        value: Complex::new(re.value(), im.value()),
        tail_bound: tail,
    })
}
