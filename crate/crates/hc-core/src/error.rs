use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sampled series have different shifts: {0} vs {1}")]
    MismatchedShifts(f64, f64),
    #[error("evaluation point collides with lattice point {n}")]
    LatticeCollision { n: i64 },
    #[error("sequences do not share a window: {0:?} vs {1:?}")]
    WindowMismatch((i64, i64), (i64, i64)),
    #[error("zero list is not sorted ascending")]
    UnsortedInput,
    #[error("interlacing violated near index {index}: {detail}")]
    InterlacingViolation { index: i64, detail: String },
    #[error("scalar fit is degenerate: all reference values vanish")]
    DegenerateFit,
    #[error("radius grid is empty")]
    EmptyGrid,
    #[error("grid exceeds the available zero window ({have} < {need})")]
    WindowTooSmall { have: i64, need: i64 },
    #[error("block {block}: odd entry y_{{2k-1}} = 0, diagonal map not invertible")]
    ZeroOddEntry { block: usize },
    #[error("schedule invalid: {0}")]
    BadSchedule(String),
    #[error("iterate left the 1/100 ball at iteration {iter} (deviation {deviation})")]
    BallExit { iter: usize, deviation: f64 },
    #[error("fixed-point iteration did not reach tol {tol} in {max_iter} iterations")]
    NoConvergence { tol: f64, max_iter: usize },
    #[error("sparseness conditions fail for every base_M up to {limit}")]
    SparsenessSearchExhausted { limit: i64 },
    #[error("no sign change in gap ({lo}, {hi}); zero location failed")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("sample point {z} too close to a pole")]
    NearPole { z: String },
    #[error("de Branges schedule infeasible inside the window: {0}")]
    ScheduleInfeasible(String),
    #[error("rho scan exhausted for block {block}: no candidate meets the separation bound")]
    RhoScanExhausted { block: usize },
    #[error("Hermite-Biehler probe failed at {z}: |E| <= |E*|")]
    HermiteBiehler { z: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
