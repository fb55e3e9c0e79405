//! The analyzed map families.
//!
//! Every family is radially symmetric and written in polar form
//! `e^{i theta} * exp(-A(L) + i B(L))` with `L = log(1/|z|)`:
//!
//! | family             | `|z| < 1/2`                                   | `1/2 <= |z| < 1`                                      |
//! |--------------------|-----------------------------------------------|-------------------------------------------------------|
//! | Spiral             | `A = c1 L^2`, `B = c2 L^2`                    | `A = c1 log2 L`, `B = c2 log2 L`                      |
//! | RotationOnly       | `A = L`, `B = -c2 L^{3/2}` (whole unit disk)  | same                                                  |
//! | GeneralizedSpiral  | `A = c1 L^{1+a}`, `B = c2 L^{(3+a)/2}`        | `A = c1 log^a 2 L`, `B = c2 log^{(1+a)/2} 2 L`        |
//!
//! Outside the unit disk every family is the identity. Going through the
//! polar form avoids the branch ambiguity of `|z|^w` for complex `w`.

use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::fit::line_fit;
use crate::plane::{default_step, wirtinger_fd, Complex, PlaneMap, WirtingerPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Identity,
    Spiral,
    RotationOnly,
    GeneralizedSpiral,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Identity => "identity",
            Family::Spiral => "spiral",
            Family::RotationOnly => "rotation_only",
            Family::GeneralizedSpiral => "generalized_spiral",
        }
    }
}

/// One map family with its parameters. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapSpec {
    family: Family,
    c1: f64,
    c2: f64,
    alpha: f64,
    p: f64,
}

impl MapSpec {
    /// Validating constructor. `alpha` is ignored (stored as 0) outside the
    /// generalized family.
    pub fn new(family: Family, c1: f64, c2: f64, alpha: f64, p: f64) -> Result<Self> {
        if !c1.is_finite() || !c2.is_finite() || !alpha.is_finite() {
            return Err(Error::InvalidSpec("parameters must be finite"));
        }
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::InvalidSpec("p must be positive"));
        }
        match family {
            Family::Spiral | Family::GeneralizedSpiral if !(c1 > 0.0) => {
                return Err(Error::InvalidSpec("c1 must be positive"));
            }
            Family::GeneralizedSpiral if !(alpha > -1.0 && alpha < 1.0) => {
                return Err(Error::InvalidSpec("alpha must lie in (-1, 1)"));
            }
            _ => {}
        }
        let alpha = if family == Family::GeneralizedSpiral { alpha } else { 0.0 };
        Ok(MapSpec { family, c1, c2, alpha, p })
    }

    pub fn identity(p: f64) -> Result<Self> {
        Self::new(Family::Identity, 0.0, 0.0, 0.0, p)
    }

    pub fn spiral(c1: f64, c2: f64, p: f64) -> Result<Self> {
        Self::new(Family::Spiral, c1, c2, 0.0, p)
    }

    pub fn rotation_only(c2: f64, p: f64) -> Result<Self> {
        Self::new(Family::RotationOnly, 0.0, c2, 0.0, p)
    }

    pub fn generalized_spiral(c1: f64, c2: f64, alpha: f64, p: f64) -> Result<Self> {
        Self::new(Family::GeneralizedSpiral, c1, c2, alpha, p)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Radius of the inner piece; the family is the identity for `|z| >= 1`.
    fn inner_radius(&self) -> f64 {
        match self.family {
            Family::Spiral | Family::GeneralizedSpiral => 0.5,
            Family::RotationOnly => 1.0,
            Family::Identity => 0.0,
        }
    }

    /// `(A, B)` at modulus `r`, or `None` where the map is the identity.
    fn profile(&self, r: f64) -> Option<(f64, f64)> {
        if self.family == Family::Identity || r >= 1.0 {
            return None;
        }
        let l = -r.ln();
        let (c1, c2, a) = (self.c1, self.c2, self.alpha);
        Some(match self.family {
            Family::Spiral if r < 0.5 => (c1 * l * l, c2 * l * l),
            Family::Spiral => (c1 * LN_2 * l, c2 * LN_2 * l),
            Family::RotationOnly => (l, -c2 * l.powf(1.5)),
            Family::GeneralizedSpiral if r < 0.5 => {
                (c1 * l.powf(1.0 + a), c2 * l.powf(0.5 * (3.0 + a)))
            }
            Family::GeneralizedSpiral => {
                (c1 * LN_2.powf(a) * l, c2 * LN_2.powf(0.5 * (1.0 + a)) * l)
            }
            Family::Identity => unreachable!(),
        })
    }

    /// Evaluates the map; the origin maps to 0 by continuity.
    pub fn evaluate(&self, z: Complex) -> Complex {
        let r = z.norm();
        if r == 0.0 {
            return Complex::new(0.0, 0.0);
        }
        match self.profile(r) {
            None => z,
            Some((a, b)) => (z / r) * Complex::from_polar((-a).exp(), b),
        }
    }

    /// Continued argument change `arg h(r) - arg h(1)` along the positive
    /// radius, from the polar form. Used as a test and trace oracle.
    pub fn radial_argument(&self, r: f64) -> f64 {
        self.profile(r).map_or(0.0, |(_, b)| b)
    }

    /// Closed-form Wirtinger derivatives of the spiral inside `|z| < 1/2`.
    ///
    /// `f_z = e^{-c1 L^2 + i c2 L^2} / |z| * (1/2 + c1 L - i c2 L)`,
    /// `f_zbar = (z / zbar) e^{-c1 L^2 + i c2 L^2} / |z| * (-1/2 + c1 L - i c2 L)`.
    ///
    /// `z / (zbar |z|)` equals `sqrt(z) / zbar^{3/2}` with principal branches
    /// everywhere except the negative real axis, where the principal-branch
    /// expression flips sign; the chain-rule value is used there.
    pub fn wirtinger_closed(&self, z: Complex) -> Result<WirtingerPair> {
        let r = z.norm();
        if self.family != Family::Spiral || !(r > 0.0 && r < 0.5) {
            return Err(Error::NoClosedForm);
        }
        let l = -r.ln();
        let (c1, c2) = (self.c1, self.c2);
        let common = Complex::from_polar((-c1 * l * l).exp(), c2 * l * l) / r;
        let fz = common * Complex::new(0.5 + c1 * l, -c2 * l);
        let fzbar = (z / z.conj()) * common * Complex::new(-0.5 + c1 * l, -c2 * l);
        Ok(WirtingerPair { fz, fzbar })
    }

    /// Wirtinger pair: closed form where available, finite differences
    /// otherwise.
    pub fn wirtinger(&self, z: Complex) -> Result<WirtingerPair> {
        match self.wirtinger_closed(z) {
            Ok(p) => Ok(p),
            Err(Error::NoClosedForm) => wirtinger_fd(self, z, default_step(z)),
            Err(e) => Err(e),
        }
    }

    /// `|mu| = |f_zbar| / |f_z|`.
    pub fn beltrami_modulus(&self, z: Complex) -> Result<f64> {
        let r = z.norm();
        if r == 0.0 {
            return Err(Error::Domain("Beltrami coefficient requested at the origin"));
        }
        if self.profile(r).is_none() {
            return Ok(0.0);
        }
        let mu = if self.family == Family::Spiral && r < 0.5 {
            let l = -r.ln();
            let (u, v) = (self.c1 * l, self.c2 * l);
            ((u - 0.5) * (u - 0.5) + v * v).sqrt() / ((u + 0.5) * (u + 0.5) + v * v).sqrt()
        } else {
            let p = wirtinger_fd(self, z, default_step(z))?;
            p.fzbar.norm() / p.fz.norm()
        };
        if !(mu < 1.0) {
            return Err(Error::Degenerate { mu_abs: mu });
        }
        Ok(mu)
    }

    /// Distortion `K = (1 + |mu|) / (1 - |mu|)`.
    ///
    /// Inside the spiral's inner disk the cancellation-free form
    /// [`spiral_distortion_exact`] is used.
    pub fn distortion(&self, z: Complex) -> Result<f64> {
        let r = z.norm();
        if r == 0.0 {
            return Err(Error::Domain("distortion requested at the origin"));
        }
        if self.profile(r).is_none() {
            return Ok(1.0);
        }
        if self.family == Family::Spiral && r < 0.5 {
            return Ok(spiral_distortion_exact(self.c1, self.c2, -r.ln()));
        }
        // near a seam the stencil shrinks so that it stays on one side
        let step = default_step(z).min(0.25 * self.seam_distance(z));
        let p = wirtinger_fd(self, z, step)?;
        let (a, b) = (p.fz.norm(), p.fzbar.norm());
        if !(b < a) {
            return Err(Error::Degenerate { mu_abs: b / a });
        }
        Ok((a + b) / (a - b))
    }

    pub fn asymptotic_distortion_coefficient(&self) -> Result<AsymptoticCoefficient> {
        let (c1, c2) = (self.c1, self.c2);
        Ok(match self.family {
            Family::Identity => AsymptoticCoefficient::Conformal,
            Family::Spiral => AsymptoticCoefficient::Analytic(2.0 * c1 + 2.0 * c2 * c2 / c1),
            Family::RotationOnly => AsymptoticCoefficient::Analytic(2.25 * c2 * c2),
            Family::GeneralizedSpiral => {
                let (ls, ks) = self.distortion_samples(FIT_RADII_MIN, FIT_RADII_MAX, FIT_RADII_COUNT)?;
                AsymptoticCoefficient::Fitted(line_fit(&ls, &ks)?.slope)
            }
        })
    }

    /// `(L, K(e^{-L}))` on a geometric radius grid from `r_max` down to
    /// `r_min`.
    fn distortion_samples(&self, r_min: f64, r_max: f64, count: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let (l_lo, l_hi) = (-r_max.ln(), -r_min.ln());
        let mut ls = Vec::with_capacity(count);
        let mut ks = Vec::with_capacity(count);
        for i in 0..count {
            let l = l_lo + (l_hi - l_lo) * i as f64 / (count - 1) as f64;
            ks.push(self.distortion(Complex::new((-l).exp(), 0.0))?);
            ls.push(l);
        }
        Ok((ls, ks))
    }

    /// Measured `xi(r) = K(r) / (beta log(1/r))` at each radius.
    pub fn distortion_profile(&self, radii: &[f64]) -> Result<DistortionProfile> {
        let beta = self.asymptotic_distortion_coefficient()?.value();
        if beta == 0.0 {
            return Err(Error::InvalidArgument("conformal map has no distortion growth"));
        }
        let mut xi_samples = Vec::with_capacity(radii.len());
        for &r in radii {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::InvalidArgument("profile radii must lie in (0, 1)"));
            }
            let k = self.distortion(Complex::new(r, 0.0))?;
            xi_samples.push((r, k / (beta * -r.ln())));
        }
        Ok(DistortionProfile { asymptotic_coefficient: beta, xi_samples })
    }

    /// Left side of the family's integrability condition: `exp(p K)` is
    /// locally integrable iff `lhs < 1/p`.
    pub fn integrability_lhs(&self) -> f64 {
        let (c1, c2, a) = (self.c1, self.c2, self.alpha);
        match self.family {
            Family::Identity => 0.0,
            Family::Spiral => c1 + c2 * c2 / c1,
            Family::RotationOnly => 9.0 * c2 * c2 / 8.0,
            Family::GeneralizedSpiral => {
                let e = 0.5 * (3.0 + a);
                c2 * c2 * e * e / (2.0 * c1 * (1.0 + a))
            }
        }
    }

    /// Strict analytic integrability inequality at exponent `p`.
    pub fn integrability_predicate(&self, p: f64) -> bool {
        self.integrability_lhs() < 1.0 / p
    }

    /// Signed distance `1/p - lhs` to the critical curve; positive means
    /// integrable.
    pub fn criticality_margin(&self, p: f64) -> f64 {
        1.0 / p - self.integrability_lhs()
    }
}

impl PlaneMap for MapSpec {
    fn eval(&self, z: Complex) -> Complex {
        self.evaluate(z)
    }

    fn seam_distance(&self, z: Complex) -> f64 {
        let r = z.norm();
        match self.family {
            Family::Identity => f64::INFINITY,
            _ => {
                let mut d = r.min((r - 1.0).abs());
                if self.inner_radius() == 0.5 {
                    d = d.min((r - 0.5).abs());
                }
                d
            }
        }
    }
}

/// Spiral distortion inside `|z| < 1/2`, as `(S + D)^2 / (2 c1 L)` with
/// `S, D = sqrt((c1 L +- 1/2)^2 + c2^2 L^2)`. Algebraically identical to
/// `(S + D) / (S - D)` but free of the cancellation in `S - D`.
pub fn spiral_distortion_exact(c1: f64, c2: f64, l: f64) -> f64 {
    let (u, v) = (c1 * l, c2 * l);
    let s = ((u + 0.5) * (u + 0.5) + v * v).sqrt();
    let d = ((u - 0.5) * (u - 0.5) + v * v).sqrt();
    (s + d) * (s + d) / (2.0 * u)
}

const FIT_RADII_MIN: f64 = 1e-10;
const FIT_RADII_MAX: f64 = 1e-4;
const FIT_RADII_COUNT: usize = 20;

/// Limit of `K(r) / log(1/r)` as `r -> 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AsymptoticCoefficient {
    /// Identity: bounded distortion, coefficient 0.
    Conformal,
    Analytic(f64),
    /// Least-squares slope of `K` against `log(1/r)` on `[1e-10, 1e-4]`.
    Fitted(f64),
}

impl AsymptoticCoefficient {
    pub fn value(self) -> f64 {
        match self {
            AsymptoticCoefficient::Conformal => 0.0,
            AsymptoticCoefficient::Analytic(v) | AsymptoticCoefficient::Fitted(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionProfile {
    pub asymptotic_coefficient: f64,
    /// `(r, xi(r))` pairs.
    pub xi_samples: Vec<(f64, f64)>,
}

/// `z -> h [f(z0 + z) - f(z0)]` with `h` chosen so that 1 maps to 1.
#[derive(Debug, Clone, Copy)]
pub struct Normalized<M> {
    inner: M,
    z0: Complex,
    base: Complex,
    scale: Complex,
}

impl<M: PlaneMap> Normalized<M> {
    pub fn scale(&self) -> Complex {
        self.scale
    }

    pub fn center(&self) -> Complex {
        self.z0
    }
}

impl<M: PlaneMap> PlaneMap for Normalized<M> {
    fn eval(&self, z: Complex) -> Complex {
        self.scale * (self.inner.eval(self.z0 + z) - self.base)
    }

    fn seam_distance(&self, z: Complex) -> f64 {
        self.inner.seam_distance(self.z0 + z)
    }
}

pub fn normalize_about<M: PlaneMap>(f: M, z0: Complex) -> Result<Normalized<M>> {
    let base = f.eval(z0);
    let one = f.eval(z0 + Complex::new(1.0, 0.0));
    let d = one - base;
    if d.norm() == 0.0 || !crate::plane::is_finite(d) {
        return Err(Error::DegenerateNormalization);
    }
    Ok(Normalized { inner: f, z0, base, scale: Complex::new(1.0, 0.0) / d })
}
