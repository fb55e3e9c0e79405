//! Complex-plane primitives.
//!
//! The principal argument uses the branch `(-pi, pi]` with the negative real
//! axis mapped to `+pi`. Every other branch is reached only by continuing the
//! argument along a sampled path, one principal-value increment at a time.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

pub type Complex = num_complex::Complex64;

/// Consecutive increments at or above this size are rejected as
/// undersampled. Half of the ambiguity limit `pi`.
pub const UNDERSAMPLING_THRESHOLD: f64 = FRAC_PI_2;

/// Upper bound on samples when a path is refined by doubling.
pub const MAX_PATH_SAMPLES: usize = 1 << 20;

/// Relative finite-difference step used by [`default_step`].
pub const RELATIVE_STEP: f64 = 1e-5;

/// A map of the plane that can be sampled pointwise.
///
/// `seam_distance` reports how far `z` is from the set where the map is only
/// continuous (piecewise seams and the origin). Finite differences refuse to
/// straddle that set.
pub trait PlaneMap {
    fn eval(&self, z: Complex) -> Complex;

    fn seam_distance(&self, _z: Complex) -> f64 {
        f64::INFINITY
    }
}

impl<F> PlaneMap for F
where
    F: Fn(Complex) -> Complex,
{
    fn eval(&self, z: Complex) -> Complex {
        self(z)
    }
}

pub(crate) fn is_finite(z: Complex) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

fn require_finite(z: Complex) -> Result<()> {
    if is_finite(z) {
        Ok(())
    } else {
        Err(Error::Domain("non-finite complex input"))
    }
}

/// Principal argument in `(-pi, pi]`.
pub fn principal_arg(z: Complex) -> Result<f64> {
    require_finite(z)?;
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Domain("argument of zero"));
    }
    // atan2(-0.0, x < 0) would give -pi
    if z.im == 0.0 && z.re < 0.0 {
        return Ok(PI);
    }
    Ok(z.im.atan2(z.re))
}

/// Principal value of `arg(to) - arg(from)`, computed from
/// `to * conj(from)` after scaling both to unit modulus (so tiny map values
/// do not underflow the product).
pub fn principal_increment(from: Complex, to: Complex) -> Result<f64> {
    require_finite(from)?;
    require_finite(to)?;
    let (a, b) = (from.norm(), to.norm());
    if a == 0.0 || b == 0.0 {
        return Err(Error::Domain("argument of zero"));
    }
    principal_arg((to / b) * (from / a).conj())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() || !theta.is_finite() {
            return Err(Error::Domain("polar point needs finite r > 0"));
        }
        Ok(PolarPoint { r, theta })
    }

    pub fn from_complex(z: Complex) -> Result<Self> {
        let theta = principal_arg(z)?;
        Ok(PolarPoint { r: z.norm(), theta })
    }

    pub fn to_complex(self) -> Complex {
        Complex::from_polar(self.r, self.theta)
    }
}

/// A sampled path together with a branch of `arg` continued along it.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuedArgument {
    points: Vec<Complex>,
    args: Vec<f64>,
}

impl ContinuedArgument {
    pub fn points(&self) -> &[Complex] {
        &self.points
    }

    pub fn args(&self) -> &[f64] {
        &self.args
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `args[last] - args[0]`.
    pub fn total_winding(&self) -> f64 {
        match (self.args.first(), self.args.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }
}

/// Continues the argument along `points`, starting from the principal value
/// at `points[0]`.
pub fn continue_argument(points: Vec<Complex>) -> Result<ContinuedArgument> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument("argument continuation needs at least 2 points"));
    }
    let mut args = Vec::with_capacity(points.len());
    let mut current = principal_arg(points[0])?;
    args.push(current);
    for (index, pair) in points.windows(2).enumerate() {
        let increment = principal_increment(pair[0], pair[1])?;
        if increment.abs() >= UNDERSAMPLING_THRESHOLD {
            return Err(Error::Undersampled { index, increment });
        }
        current += increment;
        args.push(current);
    }
    Ok(ContinuedArgument { points, args })
}

/// Samples `path` on a uniform grid over `[a, b]` and continues the argument,
/// doubling the grid until no increment is undersampled.
///
/// `initial` is the starting number of intervals. The endpoints are always
/// sampled exactly at `a` and `b`.
pub fn continue_along<P>(path: P, a: f64, b: f64, initial: usize) -> Result<ContinuedArgument>
where
    P: Fn(f64) -> Complex,
{
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument("non-finite path parameter"));
    }
    let mut intervals = initial.max(1);
    loop {
        if intervals + 1 > MAX_PATH_SAMPLES {
            return Err(Error::PathologicalWinding { cap: MAX_PATH_SAMPLES });
        }
        let h = (b - a) / intervals as f64;
        let points: Vec<Complex> = (0..=intervals)
            .map(|k| {
                let s = if k == intervals { b } else { a + h * k as f64 };
                path(s)
            })
            .collect();
        match continue_argument(points) {
            Err(Error::Undersampled { .. }) => intervals *= 2,
            other => return other,
        }
    }
}

/// The pair `(f_z, f_zbar)` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WirtingerPair {
    pub fz: Complex,
    pub fzbar: Complex,
}

impl WirtingerPair {
    /// Beltrami coefficient `f_zbar / f_z`.
    pub fn beltrami(&self) -> Complex {
        self.fzbar / self.fz
    }

    pub fn jacobian(&self) -> f64 {
        self.fz.norm_sqr() - self.fzbar.norm_sqr()
    }

    pub fn distortion(&self) -> Result<f64> {
        distortion_from_pair(*self)
    }
}

/// `1e-5 * |z|`, or `1e-5` at the origin.
pub fn default_step(z: Complex) -> f64 {
    let r = z.norm();
    if r > 0.0 {
        RELATIVE_STEP * r
    } else {
        RELATIVE_STEP
    }
}

/// Central-difference Wirtinger derivatives on the four-point stencil
/// `z +- step`, `z +- i step`.
pub fn wirtinger_fd<M>(f: &M, z: Complex, step: f64) -> Result<WirtingerPair>
where
    M: PlaneMap + ?Sized,
{
    require_finite(z)?;
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidArgument("finite-difference step must be positive"));
    }
    let distance = f.seam_distance(z);
    if distance <= 2.0 * step {
        return Err(Error::SeamStencil { distance, step });
    }
    let s = Complex::new(step, 0.0);
    let is = Complex::new(0.0, step);
    let dx = (f.eval(z + s) - f.eval(z - s)) / (2.0 * step);
    let dy = (f.eval(z + is) - f.eval(z - is)) / (2.0 * step);
    let i = Complex::i();
    let pair = WirtingerPair {
        fz: (dx - i * dy) * 0.5,
        fzbar: (dx + i * dy) * 0.5,
    };
    if !is_finite(pair.fz) || !is_finite(pair.fzbar) {
        return Err(Error::Domain("non-finite map value on stencil"));
    }
    Ok(pair)
}

/// `K = (|f_z| + |f_zbar|) / (|f_z| - |f_zbar|)`.
pub fn distortion_from_pair(p: WirtingerPair) -> Result<f64> {
    let a = p.fz.norm();
    let b = p.fzbar.norm();
    if !(a > b) {
        let mu_abs = if a > 0.0 { b / a } else { f64::INFINITY };
        return Err(Error::Degenerate { mu_abs });
    }
    Ok((a + b) / (a - b))
}
