use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Zero or non-finite input where a nonzero finite point is required.
    #[error("domain error: {0}")]
    Domain(&'static str),

    /// A consecutive principal-value increment reached the undersampling
    /// threshold; the caller must refine the path.
    #[error("undersampled path: increment {increment:.6} rad after sample {index}")]
    Undersampled { index: usize, increment: f64 },

    #[error("finite-difference stencil at distance {distance:.3e} from a seam (step {step:.3e})")]
    SeamStencil { distance: f64, step: f64 },

    /// `|f_z| <= |f_zbar|`: the point is not sense preserving or the map is
    /// degenerate there.
    #[error("degenerate or orientation-reversing derivative (|mu| = {mu_abs})")]
    Degenerate { mu_abs: f64 },

    #[error("no closed form for this family or region")]
    NoClosedForm,

    #[error("invalid map spec: {0}")]
    InvalidSpec(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    /// Adaptive refinement hit the sample cap.
    #[error("pathological winding: refinement cap of {cap} samples exceeded")]
    PathologicalWinding { cap: usize },

    #[error("fit error: {0}")]
    Fit(&'static str),

    #[error("distortion is not exponentially integrable at p = {p}")]
    NotIntegrable { p: f64 },

    #[error("no convergence after {iterations} iterations")]
    NonConvergence { iterations: usize },

    /// `f(z0 + 1) = f(z0)`: no constant rescales the map to fix 1.
    #[error("cannot normalize: f(z0 + 1) equals f(z0)")]
    DegenerateNormalization,

    #[error("map is not normalized (f(0) = 0, f(1) = 1 required)")]
    NotNormalized,
}
