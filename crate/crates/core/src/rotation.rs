//! Pointwise rotation: winding of `f(z0 + t e^{i theta}) - f(z0)` around
//! the origin as `t` runs from 1 down to `r`.
//!
//! Rays are sampled geometrically in `t` (uniform in `log t`), with
//! [`RotationConfig::samples_per_decade`] base samples before refinement.

use alloc::vec::Vec;
use core::f64::consts::{LN_10, PI};

use crate::error::{Error, Result};
use crate::fit::line_fit;
use crate::plane::{continue_along, Complex, PlaneMap};

/// Exponents below `2 - EXPONENT_FLAG_MARGIN` raise the "below 2" flag on a
/// rotation estimate.
pub const EXPONENT_FLAG_MARGIN: f64 = 0.05;

/// Tolerance on `f(0) = 0`, `f(1) = 1` for maps entering the Theorem-1
/// constant.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationConfig {
    pub samples_per_decade: usize,
    pub n_theta: usize,
}

impl Default for RotationConfig {
    fn default() -> Self {
        RotationConfig { samples_per_decade: 64, n_theta: 16 }
    }
}

/// Per-radius winding measurements around one center.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationReport {
    pub z0: Complex,
    /// Strictly decreasing, all in `(0, 1)`.
    pub radii: Vec<f64>,
    pub theta_samples: Vec<f64>,
    /// `winding[i][j]`: `|arg change|` at `radii[i]` along `theta_samples[j]`.
    pub winding: Vec<Vec<f64>>,
    /// Max over directions, per radius.
    pub sup_winding: Vec<f64>,
    pub gamma_estimate: f64,
    /// `None` when some winding is zero and the log-log fit is undefined.
    pub fitted_exponent: Option<f64>,
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::InvalidArgument("no radii"));
    }
    if radii.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::InvalidArgument("radii must lie in (0, 1)"));
    }
    if radii.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument("radii must be strictly decreasing"));
    }
    Ok(())
}

/// Signed continued-argument change from `t = t_start` to `t = t_end`.
fn segment_winding<M>(f: &M, z0: Complex, base: Complex, dir: Complex, t_start: f64, t_end: f64, spd: usize) -> Result<f64>
where
    M: PlaneMap + ?Sized,
{
    let (a, b) = (t_start.ln(), t_end.ln());
    let decades = (a - b).abs() / LN_10;
    let intervals = ((spd as f64 * decades).ceil() as usize).max(1);
    let path = |s: f64| {
        let t = if s == a {
            t_start
        } else if s == b {
            t_end
        } else {
            s.exp()
        };
        f.eval(z0 + dir * t) - base
    };
    Ok(continue_along(path, a, b, intervals)?.total_winding())
}

/// `|winding|` at every radius along one direction, walking the ray once.
pub fn winding_profile_along_ray<M>(f: &M, z0: Complex, theta: f64, radii: &[f64], config: &RotationConfig) -> Result<Vec<f64>>
where
    M: PlaneMap + ?Sized,
{
    check_radii(radii)?;
    let base = f.eval(z0);
    let dir = Complex::from_polar(1.0, theta);
    let mut total = 0.0;
    let mut t = 1.0;
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        total += segment_winding(f, z0, base, dir, t, r, config.samples_per_decade)?;
        t = r;
        out.push(total.abs());
    }
    Ok(out)
}

pub fn winding_along_ray<M>(f: &M, z0: Complex, theta: f64, r: f64) -> Result<f64>
where
    M: PlaneMap + ?Sized,
{
    Ok(winding_profile_along_ray(f, z0, theta, &[r], &RotationConfig::default())?[0])
}

fn directions(n_theta: usize) -> Result<Vec<f64>> {
    if n_theta < 8 {
        return Err(Error::InvalidArgument("need at least 8 directions"));
    }
    Ok((0..n_theta).map(|j| 2.0 * PI * j as f64 / n_theta as f64).collect())
}

/// Max of [`winding_along_ray`] over `n_theta` equispaced directions.
pub fn sup_winding<M>(f: &M, z0: Complex, r: f64, n_theta: usize) -> Result<f64>
where
    M: PlaneMap + ?Sized,
{
    let config = RotationConfig { n_theta, ..RotationConfig::default() };
    Ok(measure(f, z0, &[r], &config)?.sup_winding[0])
}

/// Runs every (radius, direction) measurement and assembles the report.
pub fn measure<M>(f: &M, z0: Complex, radii: &[f64], config: &RotationConfig) -> Result<RotationReport>
where
    M: PlaneMap + ?Sized,
{
    check_radii(radii)?;
    let theta_samples = directions(config.n_theta)?;
    let mut winding = alloc::vec![Vec::with_capacity(theta_samples.len()); radii.len()];
    for &theta in &theta_samples {
        let profile = winding_profile_along_ray(f, z0, theta, radii, config)?;
        for (row, w) in winding.iter_mut().zip(profile) {
            row.push(w);
        }
    }
    let sup_winding: Vec<f64> = winding
        .iter()
        .map(|row| row.iter().cloned().fold(0.0, f64::max))
        .collect();
    let gamma_estimate = quartile_gamma(radii, &sup_winding);
    let mut report = RotationReport {
        z0,
        radii: radii.to_vec(),
        theta_samples,
        winding,
        sup_winding,
        gamma_estimate,
        fitted_exponent: None,
    };
    report.fitted_exponent = exponent_fit(&report).ok();
    Ok(report)
}

/// Max of `sup_winding / log^2(1/r)` over the smallest quarter of the radii.
fn quartile_gamma(radii: &[f64], sup: &[f64]) -> f64 {
    let q = radii.len().div_ceil(4);
    radii[radii.len() - q..]
        .iter()
        .zip(&sup[sup.len() - q..])
        .map(|(r, s)| {
            let l = -r.ln();
            s / (l * l)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaEstimate {
    pub value: f64,
    pub fitted_exponent: Option<f64>,
    /// Winding grows slower than `log^2(1/r)`; the estimate then tends to 0
    /// as the radii shrink.
    pub exponent_below_two: bool,
}

/// Estimate of the rotation `limsup sup_theta |arg| / log^2(1/r)`.
///
/// Radii must number at least 4 and span at least 3 decades.
pub fn gamma_estimate<M>(f: &M, z0: Complex, radii: &[f64]) -> Result<GammaEstimate>
where
    M: PlaneMap + ?Sized,
{
    check_radii(radii)?;
    if radii.len() < 4 || radii[0] / radii[radii.len() - 1] < 1e3 {
        return Err(Error::InvalidArgument("need >= 4 radii spanning >= 3 decades"));
    }
    let report = measure(f, z0, radii, &RotationConfig::default())?;
    Ok(GammaEstimate {
        value: report.gamma_estimate,
        fitted_exponent: report.fitted_exponent,
        exponent_below_two: report
            .fitted_exponent
            .is_some_and(|e| e < 2.0 - EXPONENT_FLAG_MARGIN),
    })
}

/// `max_r p * sup_winding(r) / log^2(1/r)` for a map fixing 0 and 1.
pub fn empirical_theorem1_constant<M>(f: &M, p: f64, radii: &[f64]) -> Result<f64>
where
    M: PlaneMap + ?Sized,
{
    if !(p > 0.0) {
        return Err(Error::InvalidArgument("p must be positive"));
    }
    let zero = Complex::new(0.0, 0.0);
    let one = Complex::new(1.0, 0.0);
    if f.eval(zero).norm() > NORMALIZATION_TOLERANCE || (f.eval(one) - one).norm() > NORMALIZATION_TOLERANCE {
        return Err(Error::NotNormalized);
    }
    let report = measure(f, zero, radii, &RotationConfig::default())?;
    Ok(report
        .radii
        .iter()
        .zip(&report.sup_winding)
        .map(|(r, s)| {
            let l = -r.ln();
            p * s / (l * l)
        })
        .fold(0.0, f64::max))
}

/// Slope of `log sup_winding` against `log log(1/r)`.
pub fn exponent_fit(report: &RotationReport) -> Result<f64> {
    if report.sup_winding.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::Fit("winding must be positive at every radius"));
    }
    let xs: Vec<f64> = report.radii.iter().map(|r| (-r.ln()).ln()).collect();
    let ys: Vec<f64> = report.sup_winding.iter().map(|s| s.ln()).collect();
    Ok(line_fit(&xs, &ys)?.slope)
}
