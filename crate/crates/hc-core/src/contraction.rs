//! Fixed-point construction of the coefficient sequence {a_n}.
//!
//! The unknowns r = (r_1, ..., r_{2K}) sit on a sparse block schedule
//! n_1 < n_2 < ... < n_K (n_{k+1} ≥ 2 n_k); the requirement that both
//! h(z) = sin πz Σ a_n/(z-n) and S(z) = sin πz Σ a_n²/(z-n) vanish at
//! s_k = n_k + 1/2 reduces, after scaling block k by k²/2 and k⁴/2, to
//! `D(r) + W(r) = y*`,
//! with D block-diagonal and invertible near r° ≡ 1 and W a small coupling.
//! The solver iterates T(r) = r* + r - D⁻¹(D(r) + W(r)) on the ball
//! ‖r - r°‖_∞ ≤ 1/100.
//!
//! The infinite system is truncated at K blocks and lattice horizon
//! N = 4·n_K; everything beyond the horizon enters only through reported
//! power-tail bounds. One wrinkle worth recording: in the even (k⁴) rows
//! the correction sum carries a_n², not a_n — that is what the S-equation
//! produces, and the vanishing check fails by ~1e-2 if a_n is used instead.

use crate::cardinal::SampledEntire;
use crate::error::{Error, Result};
use crate::scalar::{cast, from_i64, Scalar};
use crate::seq::PowerLawSeq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const BALL_RADIUS: f64 = 0.01;
pub const SPARSENESS_THRESHOLD: f64 = 1.0 / 200.0;

/// Sparse index schedule {n_k} with the lattice horizon.
#[derive(Clone, Debug, Serialize)]
pub struct Schedule {
    indices: Vec<i64>,
    pub base_m: Option<i64>,
    pub horizon: i64,
}

impl Schedule {
    /// n_k = base_m · 2^k, k = 1..K, horizon 4·n_K.
    pub fn geometric(base_m: i64, blocks: usize) -> Result<Schedule> {
        if blocks == 0 {
            return Err(Error::BadSchedule("need at least one block".into()));
        }
        if base_m < 2 {
            return Err(Error::BadSchedule(format!("base_m = {base_m} puts n_1 below 3")));
        }
        let indices: Vec<i64> = (1..=blocks as u32).map(|k| base_m << k).collect();
        let horizon = 4 * indices[blocks - 1];
        let mut sch = Schedule { indices, base_m: Some(base_m), horizon };
        sch.validate()?;
        sch.base_m = Some(base_m);
        Ok(sch)
    }

    pub fn from_indices(indices: Vec<i64>, horizon: i64) -> Result<Schedule> {
        let sch = Schedule { indices, base_m: None, horizon };
        sch.validate()?;
        Ok(sch)
    }

    fn validate(&self) -> Result<()> {
        if let Some(&first) = self.indices.first() {
            if first < 3 {
                return Err(Error::BadSchedule(format!("n_1 = {first} < 3")));
            }
        }
        // the geometric default n_k = M·2^k meets this with equality
        for w in self.indices.windows(2) {
            if w[1] < 2 * w[0] {
                return Err(Error::BadSchedule(format!("n = {} does not double {}", w[1], w[0])));
            }
        }
        let last = self.indices.last().copied().unwrap_or(0);
        if self.horizon <= last + 2 {
            return Err(Error::BadSchedule(format!(
                "horizon {} must exceed n_K + 2 = {}",
                self.horizon,
                last + 2
            )));
        }
        Ok(())
    }

    pub fn blocks(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn index(&self, k: usize) -> i64 {
        self.indices[k - 1] // blocks are 1-based in the formulas
    }

    pub fn s<T: Scalar>(&self, k: usize) -> T {
        from_i64::<T>(self.index(k)) + cast(0.5)
    }

    /// All indices the off-schedule sums exclude for block k:
    /// every n_l, n_l+1, plus this block's n_k+2.
    fn excluded(&self, k: usize) -> Vec<i64> {
        let mut e: Vec<i64> =
            self.indices.iter().flat_map(|&n| [n, n + 1]).collect();
        e.push(self.index(k) + 2);
        e
    }
}

/// The block vector r with the 1/100-ball bookkeeping.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockState<T> {
    pub r: Vec<T>,
}

impl<T: Scalar> BlockState<T> {
    pub fn ones(blocks: usize) -> Self {
        BlockState { r: vec![T::one(); 2 * blocks] }
    }

    pub fn deviation(&self) -> T {
        self.r.iter().map(|&v| (v - T::one()).abs()).fold(T::zero(), T::max)
    }

    pub fn in_ball(&self) -> bool {
        self.deviation() <= cast(BALL_RADIUS)
    }

    fn odd(&self, k: usize) -> T {
        self.r[2 * k - 2]
    }

    fn even(&self, k: usize) -> T {
        self.r[2 * k - 1]
    }
}

fn sup_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).fold(T::zero(), T::max)
}

/// Coefficient sequence a_n for a given block state: a_0 = a0,
/// a_n = n^{-2} off schedule, and on block k
/// (a_{n_k}, a_{n_k+1}, a_{n_k+2}) = (2 r_{2k-1}, r_{2k}, 3)·k^{-2}.
pub fn base_coefficients<T: Scalar>(sch: &Schedule, r: &BlockState<T>, a0: T) -> PowerLawSeq<T> {
    assert_eq!(r.r.len(), 2 * sch.blocks(), "schedule/state mismatch");
    let mut overrides = Vec::with_capacity(3 * sch.blocks());
    for k in 1..=sch.blocks() {
        let k2 = from_i64::<T>((k * k) as i64).recip();
        let n = sch.index(k);
        overrides.push((n, cast::<T>(2.0) * r.odd(k) * k2));
        overrides.push((n + 1, r.even(k) * k2));
        overrides.push((n + 2, cast::<T>(3.0) * k2));
    }
    PowerLawSeq::new(a0, 2, overrides, sch.horizon)
}

/// The r-independent part of the sequence: law everywhere except the fixed
/// a_{n_k+2} = 3k^{-2} entries. This is what the target vector y* sums.
fn target_seq<T: Scalar>(sch: &Schedule, a0: T) -> PowerLawSeq<T> {
    let overrides = (1..=sch.blocks())
        .map(|k| (sch.index(k) + 2, cast::<T>(3.0) / from_i64::<T>((k * k) as i64)))
        .collect();
    PowerLawSeq::new(a0, 2, overrides, sch.horizon)
}

/// Diagonal block map: (Dr)_{2k-1} = 2r_{2k-1} - r_{2k}, (Dr)_{2k} = 4r²_{2k-1} - r²_{2k}.
pub fn map_d<T: Scalar>(r: &BlockState<T>) -> Vec<T> {
    let mut y = Vec::with_capacity(r.r.len());
    for k in 1..=r.r.len() / 2 {
        let (ro, re) = (r.odd(k), r.even(k));
        y.push(cast::<T>(2.0) * ro - re);
        y.push(cast::<T>(4.0) * ro * ro - re * re);
    }
    y
}

/// Inverse of the diagonal map; fails on y_{2k-1} = 0.
pub fn map_d_inv<T: Scalar>(y: &[T]) -> Result<BlockState<T>> {
    assert_eq!(y.len() % 2, 0);
    let mut r = Vec::with_capacity(y.len());
    for k in 1..=y.len() / 2 {
        let (yo, ye) = (y[2 * k - 2], y[2 * k - 1]);
        if yo == T::zero() {
            return Err(Error::ZeroOddEntry { block: k });
        }
        r.push((ye + yo * yo) / (cast::<T>(4.0) * yo));
        r.push((ye - yo * yo) / (cast::<T>(2.0) * yo));
    }
    Ok(BlockState { r })
}

/// Off-diagonal coupling between blocks.
pub fn map_w<T: Scalar>(sch: &Schedule, r: &BlockState<T>) -> Vec<T> {
    let kk = sch.blocks();
    assert_eq!(r.r.len(), 2 * kk);
    let half = cast::<T>(0.5);
    let mut w = Vec::with_capacity(2 * kk);
    for k in 1..=kk {
        let sk: T = sch.s(k);
        let k2 = from_i64::<T>((k * k) as i64);
        let k4 = k2 * k2;
        let mut odd = T::zero();
        let mut even = T::zero();
        for l in 1..=kk {
            if l == k {
                continue;
            }
            let l2 = from_i64::<T>((l * l) as i64);
            let l4 = l2 * l2;
            let d0 = sk - from_i64::<T>(sch.index(l));
            let d1 = d0 - T::one();
            odd += k2 * r.odd(l) / (l2 * d0) + half * k2 * r.even(l) / (l2 * d1);
            even += cast::<T>(2.0) * k4 * r.odd(l) * r.odd(l) / (l4 * d0)
                + half * k4 * r.even(l) * r.even(l) / (l4 * d1);
        }
        w.push(odd);
        w.push(even);
    }
    w
}

/// Off-schedule correction sums for block k over the horizon window,
/// returned as (Σ' a_n/(s_k-n), Σ' a_n²/(s_k-n)).
fn off_schedule_sums<T: Scalar>(sch: &Schedule, tgt: &PowerLawSeq<T>, k: usize) -> (T, T) {
    let sk: T = sch.s(k);
    let sq = tgt.squared();
    let mut lin = tgt.cauchy_sum_real(sk);
    let mut quad = sq.cauchy_sum_real(sk);
    for e in sch.excluded(k) {
        let d = sk - from_i64::<T>(e);
        lin -= tgt.value_real(e) / d;
        quad -= sq.value_real(e) / d;
    }
    (lin, quad)
}

/// Target vector y*: y°=(1,3,...) corrected by the off-schedule sums.
pub fn target_y_star<T: Scalar>(sch: &Schedule, a0: T) -> Vec<T> {
    let tgt = target_seq(sch, a0);
    let half = cast::<T>(0.5);
    let mut y = Vec::with_capacity(2 * sch.blocks());
    for k in 1..=sch.blocks() {
        let k2 = from_i64::<T>((k * k) as i64);
        let (lin, quad) = off_schedule_sums(sch, &tgt, k);
        y.push(T::one() - half * k2 * lin);
        y.push(cast::<T>(3.0) - half * k2 * k2 * quad);
    }
    y
}

/// Power-tail bound on what the horizon truncation drops from each y* entry.
pub fn target_tail_bound<T: Scalar>(sch: &Schedule) -> T {
    let n = sch.horizon;
    let k = sch.blocks();
    let k4 = from_i64::<T>((k * k * k * k) as i64);
    // |Σ_{|n|>N} a_n/(s_k-n)| ≤ 2 Σ_{n>N} n^{-2}/(N - n_K)
    let gap = from_i64::<T>(n - sch.index(k));
    k4 * crate::special::inv_square_tail::<T>(n) / gap
}

#[derive(Clone, Debug, Serialize)]
pub struct SparsenessReport<T> {
    pub base_m: Option<i64>,
    pub sp1_per_block: Vec<T>,
    pub sp2_max_coupling: T,
    pub sp3_lipschitz: T,
    pub threshold: T,
    pub pass: bool,
}

fn ball_sample<T: Scalar>(rng: &mut ChaCha8Rng, len: usize) -> BlockState<T> {
    let r = (0..len)
        .map(|_| T::one() + cast::<T>(rng.gen_range(-BALL_RADIUS..BALL_RADIUS)))
        .collect();
    BlockState { r }
}

/// Numerical surrogates for the three sparseness conditions: the sp1 sums
/// per block, and ball-sampled size and Lipschitz constant of W. All three
/// are compared against the fixed 1/200 threshold.
pub fn sparseness_report<T: Scalar>(sch: &Schedule, samples: usize, seed: u64) -> SparsenessReport<T> {
    let tgt = target_seq(sch, T::one());
    let half = cast::<T>(0.5);
    let mut sp1 = Vec::with_capacity(sch.blocks());
    for k in 1..=sch.blocks() {
        let sk: T = sch.s(k);
        let nk = sch.index(k);
        let (lo, hi) = (-sch.horizon, sch.horizon);
        // |Σ| splits at s_k where all terms share a sign
        let mut left = tgt.cauchy_sum_range_real(lo, nk, sk);
        let mut right = -tgt.cauchy_sum_range_real(nk + 1, hi, sk);
        for e in sch.excluded(k) {
            let v = tgt.value_real(e);
            if e <= nk {
                left -= v / (sk - from_i64::<T>(e));
            } else {
                right -= v / (from_i64::<T>(e) - sk);
            }
        }
        let k2 = from_i64::<T>((k * k) as i64);
        sp1.push((k2 + k2 * k2) * half * (left + right));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sp2 = T::zero();
    let mut sp3 = T::zero();
    if sch.blocks() > 1 {
        for _ in 0..samples {
            let a = ball_sample::<T>(&mut rng, 2 * sch.blocks());
            let b = ball_sample::<T>(&mut rng, 2 * sch.blocks());
            let wa = map_w(sch, &a);
            let wb = map_w(sch, &b);
            let na = wa.iter().map(|v| v.abs()).fold(T::zero(), T::max);
            sp2 = sp2.max(na);
            let dr = sup_dist(&a.r, &b.r);
            if dr > T::zero() {
                sp3 = sp3.max(sup_dist(&wa, &wb) / dr);
            }
        }
    }

    let threshold = cast::<T>(SPARSENESS_THRESHOLD);
    let pass = sp1.iter().all(|&v| v < threshold) && sp2 < threshold && sp3 < threshold;
    SparsenessReport { base_m: sch.base_m, sp1_per_block: sp1, sp2_max_coupling: sp2, sp3_lipschitz: sp3, threshold, pass }
}

/// Doubling search for the smallest geometric base_M passing sparseness.
pub fn auto_base_m<T: Scalar>(blocks: usize, seed: u64) -> Result<(Schedule, SparsenessReport<T>)> {
    let mut base_m = 12i64;
    let limit = 1i64 << 32;
    while base_m <= limit {
        let sch = Schedule::geometric(base_m, blocks)?;
        let rep = sparseness_report::<T>(&sch, 50, seed);
        if rep.pass {
            return Ok((sch, rep));
        }
        base_m *= 2;
    }
    Err(Error::SparsenessSearchExhausted { limit })
}

/// One application of T(r) = r* + r - D⁻¹(D(r) + W(r)).
pub fn fixed_point_map<T: Scalar>(
    sch: &Schedule,
    r_star: &BlockState<T>,
    r: &BlockState<T>,
) -> Result<BlockState<T>> {
    let mut y = map_d(r);
    for (yi, wi) in y.iter_mut().zip(map_w(sch, r)) {
        *yi += wi;
    }
    let pulled = map_d_inv(&y)?;
    let out = r_star
        .r
        .iter()
        .zip(&r.r)
        .zip(&pulled.r)
        .map(|((&a, &b), &c)| a + b - c)
        .collect();
    Ok(BlockState { r: out })
}

#[derive(Clone, Debug, Serialize)]
pub struct IterRecord<T> {
    pub iter: usize,
    pub step: T,
    pub max_h_at_s: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPoint<T> {
    pub r: BlockState<T>,
    pub r_star: BlockState<T>,
    pub y_star: Vec<T>,
    pub iterations: usize,
    pub trace: Vec<IterRecord<T>>,
    pub a0: T,
}

/// Iterate the contraction from r° until ‖Δr‖_∞ ≤ tol.
pub fn solve_fixed_point<T: Scalar>(
    sch: &Schedule,
    a0: T,
    tol: T,
    max_iter: usize,
) -> Result<FixedPoint<T>> {
    let report = sparseness_report::<T>(sch, 50, 0);
    if !report.pass {
        return Err(Error::BadSchedule(
            "sparseness conditions fail; pick a larger base_M (see sparseness_report)".into(),
        ));
    }
    solve_fixed_point_from(sch, a0, tol, max_iter, BlockState::ones(sch.blocks()))
}

/// Same solver, explicit starting point (must lie in the 1/100 ball).
pub fn solve_fixed_point_from<T: Scalar>(
    sch: &Schedule,
    a0: T,
    tol: T,
    max_iter: usize,
    start: BlockState<T>,
) -> Result<FixedPoint<T>> {
    let y_star = target_y_star(sch, a0);
    let r_star = map_d_inv(&y_star)?;
    let mut r = start;
    let mut trace = Vec::new();
    for iter in 1..=max_iter {
        let next = fixed_point_map(sch, &r_star, &r)?;
        if !next.in_ball() {
            return Err(Error::BallExit {
                iter,
                deviation: next.deviation().to_f64().unwrap_or(f64::NAN),
            });
        }
        let step = sup_dist(&next.r, &r.r);
        r = next;
        let coeffs = base_coefficients(sch, &r, a0);
        let max_h = (1..=sch.blocks())
            .map(|k| coeffs.cauchy_sum_real(sch.s(k)).abs())
            .fold(T::zero(), T::max);
        trace.push(IterRecord { iter, step, max_h_at_s: max_h });
        if step <= tol {
            return Ok(FixedPoint { r, r_star, y_star, iterations: iter, trace, a0 });
        }
    }
    Err(Error::NoConvergence {
        tol: tol.to_f64().unwrap_or(f64::NAN),
        max_iter,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct VanishingRow<T> {
    pub k: usize,
    pub s: T,
    pub h_abs: T,
    pub s_abs: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct VanishingReport<T> {
    pub rows: Vec<VanishingRow<T>>,
    pub max_h: T,
    pub max_s: T,
    pub tail_bound_h: T,
    pub tail_bound_s: T,
}

/// Evaluate |h(s_k)| and |S(s_k)| for the assembled coefficients, with the
/// horizon tail bounds alongside.
pub fn verify_vanishing<T: Scalar>(sch: &Schedule, r: &BlockState<T>, a0: T) -> VanishingReport<T> {
    let coeffs = base_coefficients(sch, r, a0);
    let h = SampledEntire::from_law(coeffs.clone());
    let s_fn = SampledEntire::from_law(coeffs.squared());
    let mut rows = Vec::with_capacity(sch.blocks());
    let mut max_h = T::zero();
    let mut max_s = T::zero();
    let mut tail_h = T::zero();
    let mut tail_s = T::zero();
    for k in 1..=sch.blocks() {
        let sk: T = sch.s(k);
        let z = num_complex::Complex::new(sk, T::zero());
        let hv = h.eval_summed(z);
        let sv = s_fn.eval_summed(z);
        max_h = max_h.max(hv.value.norm());
        max_s = max_s.max(sv.value.norm());
        tail_h = tail_h.max(hv.tail_bound);
        tail_s = tail_s.max(sv.tail_bound);
        rows.push(VanishingRow { k, s: sk, h_abs: hv.value.norm(), s_abs: sv.value.norm() });
    }
    VanishingReport { rows, max_h, max_s, tail_bound_h: tail_h, tail_bound_s: tail_s }
}

/// Empirical Lipschitz factor of T over random pairs in the ball.
pub fn contraction_factor<T: Scalar>(sch: &Schedule, a0: T, pairs: usize, seed: u64) -> Result<T> {
    let y_star = target_y_star(sch, a0);
    let r_star = map_d_inv(&y_star)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = T::zero();
    for _ in 0..pairs {
        let a = ball_sample::<T>(&mut rng, 2 * sch.blocks());
        let b = ball_sample::<T>(&mut rng, 2 * sch.blocks());
        let ta = fixed_point_map(sch, &r_star, &a)?;
        let tb = fixed_point_map(sch, &r_star, &b)?;
        let d = sup_dist(&a.r, &b.r);
        if d > T::zero() {
            worst = worst.max(sup_dist(&ta.r, &tb.r) / d);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_schedule() -> Schedule {
        Schedule::from_indices(vec![12, 48], 400).unwrap()
    }

    #[test]
    fn schedule_validation() {
        assert!(Schedule::geometric(12, 3).is_ok());
        assert!(matches!(Schedule::geometric(1, 2), Err(Error::BadSchedule(_))));
        assert!(Schedule::from_indices(vec![4, 7], 100).is_err()); // 7 < 2·4
        assert!(Schedule::from_indices(vec![2, 5], 100).is_err()); // n_1 < 3
        assert!(Schedule::from_indices(vec![10], 12).is_err()); // horizon too small
    }

    #[test]
    fn base_coefficient_values() {
        let sch = small_schedule();
        let r = BlockState::ones(2);
        let a = base_coefficients(&sch, &r, 1.0f64);
        assert_eq!(a.value_real(12), 2.0);
        assert_eq!(a.value_real(13), 1.0);
        assert_eq!(a.value_real(14), 3.0);
        assert_eq!(a.value_real(48), 2.0 / 4.0);
        assert_eq!(a.value_real(5), 1.0 / 25.0);
        assert_eq!(a.value_real(-5), 1.0 / 25.0);
        assert_eq!(a.value_real(0), 1.0);
    }

    #[test]
    fn coefficients_absolutely_summable() {
        let sch = small_schedule();
        let a = base_coefficients(&sch, &BlockState::ones(2), 1.0f64);
        let window_sum: f64 = (-400i64..=400).map(|n| a.value_real(n).abs()).sum();
        let tail: f64 = crate::seq::TailLaw::power(2.0, 1.0).mass_beyond(400);
        // Σ|a_n| ≈ a0 + 2ζ(2) + schedule deviations; bounded by the window sum plus tail
        assert!(window_sum + tail < 12.0);
        assert!(tail < 0.006);
    }

    #[test]
    fn diagonal_map_and_inverse() {
        // r° → y° = (1,3,...)
        let r0 = BlockState::<f64>::ones(3);
        assert_eq!(map_d(&r0), vec![1.0, 3.0, 1.0, 3.0, 1.0, 3.0]);
        // hand case: single block r = (1.5, 0.5) → (2.5, 8.75)
        let r = BlockState { r: vec![1.5f64, 0.5] };
        assert_eq!(map_d(&r), vec![2.5, 8.75]);
        // zero maps to zero
        let rz = BlockState { r: vec![0.0f64, 0.0] };
        assert_eq!(map_d(&rz), vec![0.0, 0.0]);
        // inverse hand case: y = (2, 4) → r = (0.75, 0.0)... check via the formula
        let y = vec![2.0f64, 4.0];
        let r = map_d_inv(&y).unwrap();
        assert_eq!(r.r, vec![(4.0 + 4.0) / 8.0, (4.0 - 4.0) / 4.0]);
        assert_eq!(map_d(&r), y);
        // y° → r°
        let y0 = vec![1.0f64, 3.0, 1.0, 3.0];
        assert_eq!(map_d_inv(&y0).unwrap().r, vec![1.0; 4]);
        // zero odd entry is rejected with the block named
        assert!(matches!(map_d_inv(&[0.0f64, 1.0]), Err(Error::ZeroOddEntry { block: 1 })));
    }

    #[test]
    fn inverse_roundtrip_on_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let r = ball_sample::<f64>(&mut rng, 8);
            let back = map_d_inv(&map_d(&r)).unwrap();
            assert!(sup_dist(&back.r, &r.r) < 1e-14);
        }
    }

    #[test]
    fn w_vanishes_for_single_block() {
        let sch = Schedule::from_indices(vec![24], 200).unwrap();
        let w = map_w(&sch, &BlockState::<f64>::ones(1));
        assert_eq!(w, vec![0.0, 0.0]);
    }

    #[test]
    fn w_matches_direct_two_block_sum() {
        let sch = small_schedule();
        let r = BlockState::<f64>::ones(2);
        let w = map_w(&sch, &r);
        // block k=1 couples to l=2: s_1 = 12.5, n_2 = 48
        let d0 = 12.5 - 48.0;
        let d1 = 12.5 - 49.0;
        let expect_odd = 1.0 / (4.0 * d0) + 1.0 / (2.0 * 4.0 * d1);
        let expect_even = 2.0 / (16.0 * d0) + 1.0 / (2.0 * 16.0 * d1);
        assert!((w[0] - expect_odd).abs() < 1e-15);
        assert!((w[1] - expect_even).abs() < 1e-15);
        // block k=2 couples to l=1: k² = 4, k⁴ = 16, l = 1
        let d0 = 48.5 - 12.0;
        let d1 = 48.5 - 13.0;
        let expect_odd = 4.0 / d0 + 4.0 / (2.0 * d1);
        let expect_even = 2.0 * 16.0 / d0 + 16.0 / (2.0 * d1);
        assert!((w[2] - expect_odd).abs() < 1e-12);
        assert!((w[3] - expect_even).abs() < 1e-12);
    }

    #[test]
    fn coupling_shrinks_with_base_m() {
        let mut prev = f64::INFINITY;
        for base_m in [12i64, 24, 48] {
            let sch = Schedule::geometric(base_m, 3).unwrap();
            let w = map_w(&sch, &BlockState::<f64>::ones(3));
            let norm = w.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            assert!(norm < prev, "base_m = {base_m}");
            prev = norm;
        }
    }

    #[test]
    fn y_star_reduces_to_y_circle_without_corrections() {
        // artificial run: schedule with the off-schedule sums removed by hand
        let sch = small_schedule();
        let tgt = target_seq(&sch, 1.0f64);
        let mut y = target_y_star(&sch, 1.0f64);
        for k in 1..=2 {
            let (lin, quad) = off_schedule_sums(&sch, &tgt, k);
            let k2 = (k * k) as f64;
            y[2 * k - 2] += 0.5 * k2 * lin;
            y[2 * k - 1] += 0.5 * k2 * k2 * quad;
        }
        assert_eq!(y, vec![1.0, 3.0, 1.0, 3.0]);
    }

    #[test]
    fn y_star_matches_direct_summation() {
        let sch = small_schedule();
        let y = target_y_star(&sch, 1.0f64);
        let tgt = target_seq(&sch, 1.0f64);
        for k in 1..=2usize {
            let sk = sch.index(k) as f64 + 0.5;
            let excl = sch.excluded(k);
            let mut lin = 0.0;
            let mut quad = 0.0;
            for n in -400i64..=400 {
                if excl.contains(&n) {
                    continue;
                }
                let a = tgt.value_real(n);
                lin += a / (sk - n as f64);
                quad += a * a / (sk - n as f64);
            }
            let k2 = (k * k) as f64;
            assert!((y[2 * k - 2] - (1.0 - 0.5 * k2 * lin)).abs() < 1e-12);
            assert!((y[2 * k - 1] - (3.0 - 0.5 * k2 * k2 * quad)).abs() < 1e-12);
        }
    }

    #[test]
    fn y_star_correction_halves_when_base_m_doubles() {
        let dev = |base_m: i64| {
            let sch = Schedule::geometric(base_m, 3).unwrap();
            let y = target_y_star(&sch, 1.0f64);
            y.iter()
                .enumerate()
                .map(|(i, &v)| (v - if i % 2 == 0 { 1.0 } else { 3.0 }).abs())
                .fold(0.0f64, f64::max)
        };
        let (d12, d24, d48) = (dev(12), dev(24), dev(48));
        assert!(d24 <= d12 / 2.0 * 1.05, "12→24: {d12} vs {d24}");
        assert!(d48 <= d24 / 2.0 * 1.05, "24→48: {d24} vs {d48}");
    }

    #[test]
    fn sparseness_small_base_violated_large_base_passes() {
        let sch = Schedule::geometric(2, 3).unwrap();
        let rep = sparseness_report::<f64>(&sch, 25, 1);
        assert!(!rep.pass);
        assert!(rep.sp1_per_block.iter().any(|&v| v >= rep.threshold));
        let (sch, rep) = auto_base_m::<f64>(3, 1).unwrap();
        assert!(rep.pass);
        assert!(sch.base_m.unwrap() >= 1024, "search stopped at {:?}", sch.base_m);
    }

    #[test]
    fn sparseness_single_block_couplings_vanish() {
        let sch = Schedule::geometric(512, 1).unwrap();
        let rep = sparseness_report::<f64>(&sch, 25, 1);
        assert_eq!(rep.sp2_max_coupling, 0.0);
        assert_eq!(rep.sp3_lipschitz, 0.0);
    }

    #[test]
    fn single_block_fixed_point_is_one_step() {
        let (sch, _) = auto_base_m::<f64>(1, 0).unwrap();
        let fp = solve_fixed_point(&sch, 1.0f64, 1e-13, 25).unwrap();
        // W = 0: T(r) ≡ r* up to the D⁻¹∘D roundoff, so the first step lands
        assert!(sup_dist(&fp.r.r, &fp.r_star.r) < 1e-15);
        assert!(fp.iterations <= 2);
    }

    #[test]
    fn fixed_point_start_independence_and_alpha_range() {
        let (sch, _) = auto_base_m::<f64>(4, 0).unwrap();
        let tol = 1e-13;
        let fp1 = solve_fixed_point(&sch, 1.0f64, tol, 25).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let start = ball_sample::<f64>(&mut rng, 8);
        let fp2 = solve_fixed_point_from(&sch, 1.0f64, tol, 25, start).unwrap();
        assert!(sup_dist(&fp1.r.r, &fp2.r.r) < 10.0 * tol);
        for k in 1..=4 {
            let alpha = 2.0 * fp1.r.odd(k);
            assert!(alpha > 1.0 && alpha < 3.0, "α_{k} = {alpha}");
        }
    }

    #[test]
    fn solver_refuses_unsparse_schedule() {
        let sch = Schedule::geometric(12, 3).unwrap();
        assert!(matches!(
            solve_fixed_point(&sch, 1.0f64, 1e-10, 25),
            Err(Error::BadSchedule(_))
        ));
    }

    #[test]
    fn vanishing_residuals_at_fixed_point_and_not_at_r_circle() {
        let (sch, _) = auto_base_m::<f64>(3, 0).unwrap();
        let fp = solve_fixed_point(&sch, 1.0f64, 1e-13, 25).unwrap();
        let good = verify_vanishing(&sch, &fp.r, 1.0f64);
        assert!(good.max_h < good.tail_bound_h + 1e-9, "max |h(s_k)| = {}", good.max_h);
        assert!(good.max_s < good.tail_bound_s + 1e-9, "max |S(s_k)| = {}", good.max_s);
        let bad = verify_vanishing(&sch, &BlockState::ones(3), 1.0f64);
        assert!(bad.max_h > 1e-4, "r° should not satisfy the vanishing: {}", bad.max_h);
    }

    #[test]
    fn vanishing_residuals_do_not_grow_when_tol_halves() {
        let (sch, _) = auto_base_m::<f64>(3, 0).unwrap();
        let loose = solve_fixed_point(&sch, 1.0f64, 1e-6, 25).unwrap();
        let tight = solve_fixed_point(&sch, 1.0f64, 5e-7, 25).unwrap();
        let vl = verify_vanishing(&sch, &loose.r, 1.0f64);
        let vt = verify_vanishing(&sch, &tight.r, 1.0f64);
        assert!(vt.max_h <= vl.max_h * 1.001 + 1e-15);
    }

    #[test]
    fn empty_schedule_yields_empty_report() {
        let sch = Schedule::from_indices(vec![], 10).unwrap();
        let rep = verify_vanishing(&sch, &BlockState { r: vec![] }, 1.0f64);
        assert!(rep.rows.is_empty());
        assert_eq!(rep.max_h, 0.0);
    }
}
