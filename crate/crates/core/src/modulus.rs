//! Modulus estimates for the family of paths joining `E = [z0, 1]` and
//! `F = (-inf, 0]`.
//!
//! Upper side: the dyadic density `rho0`, constant `2 / c_j` on
//! `B_j \ B_{j-1}` with `B_j = B(c_j, c_j)`, `c_j = 2^{j-1} z0`, plugged into
//! the pointwise bound `K rho^2 <= (e^{pK} - 1)/p + rho^2 log(1 + rho^2)/p`.
//!
//! Lower side: along every ray from the origin, the images `f(E)` and `f(F)`
//! cross alternately; each adjacent E/F pair `(x, y)` of crossing radii
//! carries at least `1 / log(y / x)` of any admissible density.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::maps::MapSpec;
use crate::plane::{continue_along, principal_increment, Complex, MAX_PATH_SAMPLES};
use crate::quad::GaussLegendre;

/// `F` is traced on `[-R_MAX, -r_min]`. `rho0` lives inside `B(0, 4)` and
/// the in-scope maps are the identity outside the unit disk.
pub const R_MAX: f64 = 8.0;

/// Endpoint tolerance for paths checked against `E` and `F`.
pub const ENDPOINT_TOLERANCE: f64 = 1e-12;

/// Relative tolerance under which a polyline vertex counts as lying on the
/// ray line; such crossings are discarded.
pub const TANGENCY_TOLERANCE: f64 = 1e-12;

/// Traced images keep consecutive angular increments below this.
pub const TRACE_MAX_INCREMENT: f64 = PI / 8.0;

/// Relative slack absorbed by the floor in [`crossing_count`].
pub const COUNT_FLOOR_SLACK: f64 = 1e-9;

/// Innermost shell contributions below this fraction of the running total
/// end the radial quadrature.
pub const SHELL_STOP_RELATIVE: f64 = 1e-10;

/// Consecutive growing shells that declare the radial quadrature divergent.
pub const DIVERGENCE_RUN: usize = 5;

/// Deepest shell boundary, `2^-60`.
pub const MIN_SHELL_EXPONENT: i32 = -60;

const ANGULAR_NODES: usize = 64;
const RADIAL_NODES: usize = 16;

/// Piecewise-constant density on nested dyadic balls.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleDensity {
    z0: f64,
    /// `c_j = 2^{j-1} z0` for `j = 1..=n`.
    centers: Vec<f64>,
}

impl AdmissibleDensity {
    pub fn new(z0: f64) -> Result<Self> {
        if !(z0 > 0.0 && z0 < 1.0) {
            return Err(Error::InvalidArgument("z0 must lie in (0, 1)"));
        }
        let mut centers = Vec::new();
        let mut c = z0;
        loop {
            centers.push(c);
            if c >= 1.0 {
                break;
            }
            c *= 2.0;
        }
        Ok(AdmissibleDensity { z0, centers })
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    /// Number of balls: the smallest `n` with `2^{n-1} z0 >= 1`.
    pub fn n(&self) -> usize {
        self.centers.len()
    }

    /// Center (and radius) of ball `j`, 1-based.
    pub fn center(&self, j: usize) -> f64 {
        self.centers[j - 1]
    }

    /// `2 / c_j` on `B_j \ B_{j-1}`; the smallest containing ball wins.
    pub fn rho0_value(&self, z: Complex) -> f64 {
        for &c in &self.centers {
            if (z - Complex::new(c, 0.0)).norm() < c {
                return 2.0 / c;
            }
        }
        0.0
    }

    /// `sum_j (2/c_j)^2 * area(B_j \ B_{j-1})` in closed form.
    pub fn square_integral_exact(&self) -> f64 {
        let mut prev = 0.0;
        let mut total = 0.0;
        for &c in &self.centers {
            total += 4.0 / (c * c) * PI * (c * c - prev * prev);
            prev = c;
        }
        total
    }

    /// `sum_j int_{B_j} (2/c_j)^2 = 4 pi n`.
    pub fn square_integral_bound(&self) -> f64 {
        4.0 * PI * self.n() as f64
    }

    /// `int g(rho0(z)) dA` by polar quadrature about the origin.
    ///
    /// Along the ray at angle `phi` the ball boundaries sit at
    /// `2 c_j cos(phi)`; each radial piece is integrated exactly with `rho0`
    /// sampled at its midpoint, and `phi` by Gauss-Legendre.
    pub fn polar_integral<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let gl = GaussLegendre::new(ANGULAR_NODES);
        gl.integrate(-FRAC_PI_2, FRAC_PI_2, |phi| {
            let dir = Complex::from_polar(1.0, phi);
            let mut inner = 0.0;
            let mut acc = 0.0;
            for &c in &self.centers {
                let outer = 2.0 * c * phi.cos();
                let rho = self.rho0_value(dir * (0.5 * (inner + outer)));
                acc += g(rho) * 0.5 * (outer * outer - inner * inner);
                inner = outer;
            }
            acc
        })
    }

    pub fn square_integral(&self) -> f64 {
        self.polar_integral(|rho| rho * rho)
    }
}

/// `int_path rho0 |dz|`, split exactly at the ball boundaries.
pub fn line_integral(d: &AdmissibleDensity, path: &[Complex]) -> f64 {
    let mut total = 0.0;
    for seg in path.windows(2) {
        let (p, q) = (seg[0], seg[1]);
        let dz = q - p;
        let len = dz.norm();
        if len == 0.0 {
            continue;
        }
        let mut cuts = Vec::with_capacity(2 * d.n() + 2);
        cuts.push(0.0);
        cuts.push(1.0);
        for &c in &d.centers {
            // |p + s dz - c|^2 = c^2
            let w = p - Complex::new(c, 0.0);
            let qa = dz.norm_sqr();
            let qb = 2.0 * (dz.conj() * w).re;
            let qc = w.norm_sqr() - c * c;
            let disc = qb * qb - 4.0 * qa * qc;
            if disc > 0.0 {
                let sq = disc.sqrt();
                for s in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
                    if s > 0.0 && s < 1.0 {
                        cuts.push(s);
                    }
                }
            }
        }
        cuts.sort_by(|a, b| a.total_cmp(b));
        for w in cuts.windows(2) {
            if w[1] > w[0] {
                let mid = p + dz * (0.5 * (w[0] + w[1]));
                total += d.rho0_value(mid) * len * (w[1] - w[0]);
            }
        }
    }
    total
}

/// Line integral of `rho0` along a polyline from `E` to `F`; admissible
/// densities give at least 1.
pub fn check_admissibility(d: &AdmissibleDensity, path: &[Complex]) -> Result<f64> {
    let (Some(&start), Some(&end)) = (path.first(), path.last()) else {
        return Err(Error::InvalidArgument("empty path"));
    };
    let tol = ENDPOINT_TOLERANCE;
    let on_e = start.im.abs() <= tol && start.re >= d.z0 - tol && start.re <= 1.0 + tol;
    let on_f = end.im.abs() <= tol && end.re <= tol;
    if !on_e || !on_f {
        return Err(Error::InvalidArgument("path must run from E = [z0, 1] to F = (-inf, 0]"));
    }
    Ok(line_integral(d, path))
}

/// Cumulative radial integral `G(R) = int_0^R (e^{pK(r)} - 1) r dr` on
/// dyadic shells.
struct RadialCumulative<'a> {
    spec: &'a MapSpec,
    p: f64,
    gl: GaussLegendre,
    /// `(r, G(r))` at shell boundaries, increasing in `r`.
    table: Vec<(f64, f64)>,
}

impl<'a> RadialCumulative<'a> {
    fn shell(&self, lo: f64, hi: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (u, w) in self.gl.mapped(lo.ln(), hi.ln()) {
            let r = u.exp();
            let k = self.spec.distortion(Complex::new(r, 0.0))?;
            acc += w * (self.p * k).exp_m1() * r * r;
        }
        if !acc.is_finite() {
            return Err(Error::NotIntegrable { p: self.p });
        }
        Ok(acc)
    }

    fn build(spec: &'a MapSpec, p: f64, r_top: f64) -> Result<Self> {
        let mut this = RadialCumulative { spec, p, gl: GaussLegendre::new(RADIAL_NODES), table: Vec::new() };
        let mut m_top = 0i32;
        while 2f64.powi(m_top) < r_top {
            m_top += 1;
        }
        // descend from the top shell, then accumulate from the bottom
        let mut shells: Vec<(f64, f64)> = Vec::new();
        let mut running = 0.0;
        let mut growing = 0usize;
        let mut stopped = false;
        let mut m = m_top;
        while m > MIN_SHELL_EXPONENT {
            let (lo, hi) = (2f64.powi(m - 1), 2f64.powi(m));
            let s = this.shell(lo, hi)?;
            if let Some(&(_, prev)) = shells.last() {
                if s > prev && lo < 0.5 {
                    growing += 1;
                    if growing >= DIVERGENCE_RUN {
                        return Err(Error::NotIntegrable { p });
                    }
                } else {
                    growing = 0;
                }
            }
            shells.push((lo, s));
            running += s;
            m -= 1;
            if lo < 0.25 && s < SHELL_STOP_RELATIVE * running {
                stopped = true;
                break;
            }
        }
        let tail = if stopped {
            0.0
        } else {
            let n = shells.len();
            let ratio = shells[n - 1].1 / shells[n - 2].1;
            if !(ratio < 1.0) {
                return Err(Error::NotIntegrable { p });
            }
            shells[n - 1].1 * ratio / (1.0 - ratio)
        };
        let mut g = tail;
        let lowest = shells.last().map(|s| s.0).unwrap_or(1.0);
        this.table.push((lowest, g));
        for &(lo, s) in shells.iter().rev() {
            g += s;
            this.table.push((2.0 * lo, g));
        }
        Ok(this)
    }

    fn eval(&self, r: f64) -> Result<f64> {
        let (r0, g0) = self.table[0];
        if r <= r0 {
            // below the resolved depth the remainder is negligible
            return Ok(g0 * (r / r0) * (r / r0));
        }
        let idx = self.table.partition_point(|&(b, _)| b <= r);
        let (lo, g_lo) = self.table[idx - 1];
        if lo == r {
            return Ok(g_lo);
        }
        Ok(g_lo + self.shell(lo, r)?)
    }
}

/// The two parts of the upper bound for `M_{K_f}(Gamma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedUpperBound {
    /// `(1/p) int_{supp rho0} (e^{pK} - 1)`.
    pub exp_term: f64,
    /// `(1/p) int rho0^2 log(1 + rho0^2)`.
    pub density_term: f64,
}

impl WeightedUpperBound {
    pub fn total(&self) -> f64 {
        self.exp_term + self.density_term
    }
}

pub fn weighted_modulus_upper(spec: &MapSpec, z0: f64, p: f64) -> Result<WeightedUpperBound> {
    if !(p > 0.0) {
        return Err(Error::InvalidArgument("p must be positive"));
    }
    let d = AdmissibleDensity::new(z0)?;
    let c_n = d.center(d.n());
    let radial = RadialCumulative::build(spec, p, 2.0 * c_n)?;
    // B_n = {r < 2 c_n cos(phi)}; split phi where that radius crosses the
    // seams 1/2 and 1, where G has kinks
    let mut cuts = alloc::vec![0.0];
    for seam in [1.0, 0.5] {
        let x = seam / (2.0 * c_n);
        if x < 1.0 {
            cuts.push(x.acos());
        }
    }
    cuts.push(FRAC_PI_2);
    let gl = GaussLegendre::new(32);
    let mut exp_integral = 0.0;
    for w in cuts.windows(2) {
        for (phi, wt) in gl.mapped(w[0], w[1]) {
            exp_integral += 2.0 * wt * radial.eval(2.0 * c_n * phi.cos())?;
        }
    }
    let density_integral = d.polar_integral(|rho| rho * rho * (rho * rho).ln_1p());
    Ok(WeightedUpperBound { exp_term: exp_integral / p, density_term: density_integral / p })
}

/// Which preimage segment to trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    /// `E = [z0, 1]`.
    E { z0: f64 },
    /// `[-r_max, -r_min]` on the negative axis.
    F { r_max: f64, r_min: f64 },
}

/// Image polyline of a segment with its real preimage parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageCurve {
    pub params: Vec<f64>,
    pub points: Vec<Complex>,
}

impl ImageCurve {
    /// Continued angular sweep about the origin along the polyline.
    pub fn angular_sweep(&self) -> Result<f64> {
        let mut total = 0.0;
        for w in self.points.windows(2) {
            total += principal_increment(w[0], w[1])?;
        }
        Ok(total)
    }
}

/// Samples the image of `segment` geometrically (`per_decade` points per
/// decade of `|t|`) and bisects until every angular increment about the
/// origin is below `pi / 8`.
pub fn trace_image_curve(spec: &MapSpec, segment: Segment, per_decade: usize) -> Result<ImageCurve> {
    let (lo, hi, sign) = match segment {
        Segment::E { z0 } if z0 > 0.0 && z0 < 1.0 => (z0, 1.0, 1.0),
        Segment::F { r_max, r_min } if r_min > 0.0 && r_max > r_min => (r_min, r_max, -1.0),
        _ => return Err(Error::InvalidArgument("bad segment bounds")),
    };
    let image = |s: f64| spec.evaluate(Complex::new(sign * s, 0.0));
    let (a, b) = (hi.ln(), lo.ln());
    let decades = (a - b) / core::f64::consts::LN_10;
    let n = ((per_decade.max(1) as f64 * decades).ceil() as usize).max(1);
    let mut us: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
    let to_param = |u: f64, k: usize, len: usize| {
        if k == 0 {
            hi
        } else if k + 1 == len {
            lo
        } else {
            u.exp()
        }
    };
    let mut params: Vec<f64> = us.iter().enumerate().map(|(k, &u)| to_param(u, k, us.len())).collect();
    let mut points: Vec<Complex> = params.iter().map(|&s| image(s)).collect();
    // bisect until increments are small, then check every segment once
    // against its midpoint to catch increments aliased by a full turn
    let mut verify = false;
    loop {
        let mut refined = false;
        let mut new_us = Vec::with_capacity(2 * us.len());
        let mut new_points = Vec::with_capacity(2 * us.len());
        let mut new_params = Vec::with_capacity(2 * us.len());
        for k in 0..us.len() {
            new_us.push(us[k]);
            new_points.push(points[k]);
            new_params.push(params[k]);
            if k + 1 < us.len() {
                let inc = principal_increment(points[k], points[k + 1])?;
                if inc.abs() >= TRACE_MAX_INCREMENT || verify {
                    let um = 0.5 * (us[k] + us[k + 1]);
                    let s = um.exp();
                    let zm = image(s);
                    let split = principal_increment(points[k], zm)? + principal_increment(zm, points[k + 1])?;
                    if inc.abs() >= TRACE_MAX_INCREMENT || (split - inc).abs() > 1e-9 {
                        new_us.push(um);
                        new_params.push(s);
                        new_points.push(zm);
                        refined = true;
                    }
                }
            }
        }
        us = new_us;
        points = new_points;
        params = new_params;
        if points.len() > MAX_PATH_SAMPLES {
            return Err(Error::PathologicalWinding { cap: MAX_PATH_SAMPLES });
        }
        if refined {
            verify = false;
        } else if verify {
            break;
        } else {
            verify = true;
        }
    }
    Ok(ImageCurve { params: params.into_iter().map(|s| sign * s).collect(), points })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveLabel {
    E,
    F,
}

/// Adjacent crossing radii `x < y` on one ray, one on each image curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingPair {
    pub x: f64,
    pub y: f64,
    /// Curve owning the inner endpoint `x`.
    pub inner: CurveLabel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingRecord {
    pub theta: f64,
    /// Disjoint, ordered by radius, all below 1.
    pub pairs: Vec<CrossingPair>,
}

impl CrossingRecord {
    /// `sum_i 1 / log(y_i / x_i)`.
    pub fn reverse_holder_sum(&self) -> f64 {
        self.pairs.iter().map(|pr| 1.0 / (pr.y / pr.x).ln()).sum()
    }

    pub fn smallest_radius(&self) -> Option<f64> {
        self.pairs.first().map(|pr| pr.x)
    }
}

/// Radii where the polyline crosses the ray `{r e^{i theta} : r > 0}`.
/// Crossings through a vertex lying on the ray line are discarded.
pub fn ray_intersections(polyline: &[Complex], theta: f64) -> Vec<f64> {
    let rot = Complex::from_polar(1.0, -theta);
    let mut out = Vec::new();
    for seg in polyline.windows(2) {
        let (p, q) = (seg[0] * rot, seg[1] * rot);
        let tp = TANGENCY_TOLERANCE * p.norm();
        let tq = TANGENCY_TOLERANCE * q.norm();
        if p.im.abs() <= tp || q.im.abs() <= tq {
            continue;
        }
        if (p.im > 0.0) == (q.im > 0.0) {
            continue;
        }
        let x = (p.re * q.im - q.re * p.im) / (q.im - p.im);
        if x > 0.0 {
            out.push(x);
        }
    }
    out
}

/// Merges the crossings of both image curves on one ray and extracts the
/// maximal run of disjoint adjacent E/F pairs below radius 1.
pub fn ray_crossings(f_e: &[Complex], f_f: &[Complex], theta: f64) -> CrossingRecord {
    let mut all: Vec<(f64, CurveLabel)> = ray_intersections(f_e, theta)
        .into_iter()
        .map(|r| (r, CurveLabel::E))
        .chain(ray_intersections(f_f, theta).into_iter().map(|r| (r, CurveLabel::F)))
        .filter(|&(r, _)| r < 1.0)
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut pairs = Vec::new();
    let mut i = 0;
    while i + 1 < all.len() {
        let (x, lx) = all[i];
        let (y, ly) = all[i + 1];
        if lx != ly && y > x {
            pairs.push(CrossingPair { x, y, inner: lx });
            i += 2;
        } else {
            i += 1;
        }
    }
    CrossingRecord { theta, pairs }
}

/// Minimum number of equispaced directions for [`lower_bound_modulus`].
pub const MIN_LOWER_BOUND_DIRECTIONS: usize = 16;

/// `2 pi * mean_theta sum_i 1 / log(y_i / x_i)`: a lower bound for
/// `M(f(Gamma))`.
pub fn lower_bound_modulus(records: &[CrossingRecord]) -> Result<f64> {
    if records.len() < MIN_LOWER_BOUND_DIRECTIONS {
        return Err(Error::InvalidArgument("need crossing records for at least 16 directions"));
    }
    let sum: f64 = records.iter().map(CrossingRecord::reverse_holder_sum).sum();
    Ok(2.0 * PI * sum / records.len() as f64)
}

/// `floor(|arg f(z0) - arg f(1)| / 2 pi) - 1`, with the argument continued
/// along `f([z0, 1])`. May be `-1`; clamp before using it in bounds.
pub fn crossing_count(spec: &MapSpec, z0: f64) -> Result<i64> {
    if !(z0 > 0.0 && z0 < 1.0) {
        return Err(Error::InvalidArgument("z0 must lie in (0, 1)"));
    }
    let (a, b) = (0.0, z0.ln());
    let decades = -b / core::f64::consts::LN_10;
    let n = ((64.0 * decades).ceil() as usize).max(1);
    let path = |u: f64| {
        let t = if u == b { z0 } else { u.exp() };
        spec.evaluate(Complex::new(t, 0.0))
    };
    let delta = continue_along(path, a, b, n)?.total_winding().abs();
    let turns = delta / (2.0 * PI);
    Ok((turns + COUNT_FLOOR_SLACK * turns.max(1.0)).floor() as i64 - 1)
}

/// Both sides of the moduli inequality at one `z0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulusEstimate {
    pub z0: f64,
    pub upper: WeightedUpperBound,
    pub lower: f64,
    pub n_z0: i64,
    pub records: Vec<CrossingRecord>,
}

impl ModulusEstimate {
    /// Smallest crossing radius over all directions.
    pub fn smallest_crossing(&self) -> Option<f64> {
        self.records
            .iter()
            .filter_map(CrossingRecord::smallest_radius)
            .reduce(f64::min)
    }
}

/// Traces `f(E)` and `f(F)`, collects crossings on `n_theta` rays and
/// evaluates both bounds.
pub fn estimate_moduli(spec: &MapSpec, z0: f64, p: f64, n_theta: usize) -> Result<ModulusEstimate> {
    let upper = weighted_modulus_upper(spec, z0, p)?;
    let f_e = trace_image_curve(spec, Segment::E { z0 }, 256)?;
    let f_f = trace_image_curve(spec, Segment::F { r_max: R_MAX, r_min: 0.25 * z0 }, 256)?;
    let records: Vec<CrossingRecord> = (0..n_theta)
        .map(|j| ray_crossings(&f_e.points, &f_f.points, 2.0 * PI * j as f64 / n_theta as f64))
        .collect();
    let lower = lower_bound_modulus(&records)?;
    let n_z0 = crossing_count(spec, z0)?;
    Ok(ModulusEstimate { z0, upper, lower, n_z0, records })
}

/// Crossing count implied by `upper >= lower >= 2 pi n^2 / log(1/x1)`.
pub fn crossing_bound_from_moduli(upper: f64, x1: f64) -> f64 {
    (upper * (1.0 / x1).ln() / (2.0 * PI)).sqrt()
}

/// `sum_i 1 / log(a_i / a_{i-1})` over a strictly increasing partition.
pub fn partition_sum(partition: &[f64]) -> Result<f64> {
    if partition.len() < 2 {
        return Err(Error::InvalidArgument("partition needs at least two points"));
    }
    if partition[0] <= 0.0 || partition.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("partition must be positive and strictly increasing"));
    }
    Ok(partition.windows(2).map(|w| 1.0 / (w[1] / w[0]).ln()).sum())
}

/// `n^2 / log(1/a)`, attained by `a_i = a^{(n-i)/n}`.
pub fn lemma_min_closed(a: f64, n: usize) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) || n == 0 {
        return Err(Error::InvalidArgument("need 0 < a < 1 and n >= 1"));
    }
    let n = n as f64;
    Ok(n * n / (1.0 / a).ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaMinimum {
    pub value: f64,
    /// `a = a_0 < ... < a_n = 1`.
    pub partition: Vec<f64>,
    pub sweeps: usize,
}

pub const LEMMA_MAX_N: usize = 12;
pub const LEMMA_TOLERANCE: f64 = 1e-12;
pub const LEMMA_MAX_SWEEPS: usize = 1_000_000;

/// Minimizes the partition sum by repeatedly replacing each interior point
/// with the geometric mean of its neighbours, starting from an evenly
/// spaced partition, until no point moves by more than `1e-12` relative.
pub fn lemma_min_oracle(a: f64, n: usize) -> Result<LemmaMinimum> {
    if !(a > 0.0 && a < 1.0) || n == 0 || n > LEMMA_MAX_N {
        return Err(Error::InvalidArgument("need 0 < a < 1 and 1 <= n <= 12"));
    }
    let mut part: Vec<f64> = (0..=n).map(|i| a + (1.0 - a) * i as f64 / n as f64).collect();
    part[n] = 1.0;
    let mut sweeps = 0;
    loop {
        if sweeps >= LEMMA_MAX_SWEEPS {
            return Err(Error::NonConvergence { iterations: sweeps });
        }
        sweeps += 1;
        let mut moved: f64 = 0.0;
        for j in 1..n {
            let g = (part[j - 1] * part[j + 1]).sqrt();
            moved = moved.max(((g - part[j]) / part[j]).abs());
            part[j] = g;
        }
        if moved < LEMMA_TOLERANCE {
            break;
        }
    }
    Ok(LemmaMinimum { value: partition_sum(&part)?, partition: part, sweeps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn density_ball_count() {
        let d = AdmissibleDensity::new(2f64.powi(-10)).unwrap();
        assert_eq!(d.n(), 11);
        assert_eq!(d.center(11), 1.0);
        for z0 in [0.3, 0.01, 1e-5, 0.999] {
            let d = AdmissibleDensity::new(z0).unwrap();
            let n = d.n() as i32;
            assert!(2f64.powi(n - 1) * z0 >= 1.0);
            assert!(n == 1 || 2f64.powi(n - 2) * z0 < 1.0);
            assert!(d.center(d.n()) < 2.0);
        }
        assert!(AdmissibleDensity::new(1.0).is_err());
        assert!(AdmissibleDensity::new(0.0).is_err());
    }

    #[test]
    fn rho0_values() {
        let z0 = 2f64.powi(-10);
        let d = AdmissibleDensity::new(z0).unwrap();
        assert_eq!(d.rho0_value(c(5.0, 0.0)), 0.0);
        assert_eq!(d.rho0_value(c(-1e-3, 0.0)), 0.0);
        assert_eq!(d.rho0_value(c(z0 / 2.0, 0.0)), 2.0 / z0);
        // direct membership scan
        let z = c(0.3, 0.0);
        let j = (1..=11).find(|&j| (z - c(d.center(j), 0.0)).norm() < d.center(j)).unwrap();
        assert_eq!(d.rho0_value(z), 2.0 / d.center(j));
        assert_eq!(j, 9);
    }

    #[test]
    fn square_integral_matches_closed_form() {
        let d = AdmissibleDensity::new(2f64.powi(-10)).unwrap();
        let exact = d.square_integral_exact();
        assert!((exact - 34.0 * PI).abs() < 1e-9);
        assert!(exact <= d.square_integral_bound());
        assert!((d.square_integral() - exact).abs() < 1e-3 * exact);
    }

    #[test]
    fn admissibility_on_simple_paths() {
        let z0 = 2f64.powi(-6);
        let d = AdmissibleDensity::new(z0).unwrap();
        let straight = [c(z0, 0.0), c(0.0, 0.0)];
        assert!(check_admissibility(&d, &straight).unwrap() >= 1.0 - 1e-9);
        let escape = [c(0.5, 0.0), c(0.5, 5.0), c(-3.0, 0.0)];
        assert!(check_admissibility(&d, &escape).unwrap() >= 1.0 - 1e-9);
        assert!(check_admissibility(&d, &[c(0.5, 0.1), c(-1.0, 0.0)]).is_err());
        assert!(check_admissibility(&d, &[c(0.5, 0.0), c(1.0, 0.0)]).is_err());
        assert!(check_admissibility(&d, &[]).is_err());
    }

    #[test]
    fn line_integral_of_a_diameter() {
        // the diameter of B_1 along the real axis: 2 z0 at 2 / z0 = 4
        let z0 = 0.125;
        let d = AdmissibleDensity::new(z0).unwrap();
        let v = line_integral(&d, &[c(2.0 * z0, 0.0), c(0.0, 0.0)]);
        assert!((v - 4.0).abs() < 1e-12);
    }

    #[test]
    fn identity_upper_bound_closed_form() {
        let id = MapSpec::identity(1.0).unwrap();
        for &(z0, p) in &[(2f64.powi(-10), 1.0), (0.3, 2.0)] {
            let d = AdmissibleDensity::new(z0).unwrap();
            let c_n = d.center(d.n());
            let ub = weighted_modulus_upper(&id, z0, p).unwrap();
            let want_exp = p.exp_m1() * PI * c_n * c_n / p;
            assert!((ub.exp_term - want_exp).abs() < 1e-9 * want_exp, "{} vs {want_exp}", ub.exp_term);
            let mut prev: f64 = 0.0;
            let mut want_density = 0.0;
            for j in 1..=d.n() {
                let cj = d.center(j);
                let rho2 = 4.0 / (cj * cj);
                want_density += rho2 * rho2.ln_1p() * PI * (cj * cj - prev * prev);
                prev = cj;
            }
            assert!((ub.density_term - want_density / p).abs() < 1e-9 * want_density);
        }
    }

    #[test]
    fn upper_bound_rejects_divergent_distortion() {
        let h = MapSpec::spiral(0.5, 0.6, 1.0).unwrap();
        assert!(matches!(weighted_modulus_upper(&h, 0.01, 1.0), Err(Error::NotIntegrable { .. })));
    }

    #[test]
    fn spiral_radial_integral_converges() {
        // Spiral(0.2, 0.3), p = 1: exp term is a finite constant across z0 = 2^-k
        let h = MapSpec::spiral(0.2, 0.3, 1.0).unwrap();
        let a = weighted_modulus_upper(&h, 2f64.powi(-5), 1.0).unwrap();
        let b = weighted_modulus_upper(&h, 2f64.powi(-9), 1.0).unwrap();
        assert!((a.exp_term - b.exp_term).abs() < 1e-9 * a.exp_term);
        assert!(b.density_term > a.density_term);
    }

    #[test]
    fn traced_identity_is_the_segment() {
        let id = MapSpec::identity(1.0).unwrap();
        let curve = trace_image_curve(&id, Segment::E { z0: 0.01 }, 16).unwrap();
        assert_eq!(curve.points.first().unwrap(), &c(1.0, 0.0));
        assert_eq!(curve.points.last().unwrap(), &c(0.01, 0.0));
        assert!(curve.points.iter().all(|z| z.im == 0.0 && z.re >= 0.01 && z.re <= 1.0));
        assert_eq!(curve.angular_sweep().unwrap(), 0.0);
    }

    #[test]
    fn traced_spiral_sweep_and_increments() {
        let h = MapSpec::spiral(0.05, 2.0, 1.0).unwrap();
        let z0 = 2f64.powi(-8);
        let curve = trace_image_curve(&h, Segment::E { z0 }, 8).unwrap();
        let l = -z0.ln();
        let sweep = curve.angular_sweep().unwrap();
        assert!((sweep - 2.0 * l * l).abs() < 1e-6, "{sweep} vs {}", 2.0 * l * l);
        for w in curve.points.windows(2) {
            assert!(principal_increment(w[0], w[1]).unwrap().abs() < TRACE_MAX_INCREMENT);
        }
        let f = trace_image_curve(&h, Segment::F { r_max: R_MAX, r_min: z0 }, 8).unwrap();
        for (s, z) in f.params.iter().zip(&f.points) {
            if *s <= -1.0 {
                assert_eq!(*z, c(*s, 0.0));
            }
        }
    }

    #[test]
    fn ray_intersection_geometry() {
        let square = [c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0), c(-1.0, -1.0), c(1.0, -1.0)];
        let r = ray_intersections(&square, 0.0);
        assert_eq!(r, vec![1.0]);
        let r = ray_intersections(&square, PI / 4.0);
        assert_eq!(r.len(), 0); // passes exactly through the vertex (1, 1)... discarded
        let r = ray_intersections(&square, PI / 2.0 + 0.1);
        assert_eq!(r.len(), 1);
        // tangential: polyline touching the ray line at a vertex
        let touch = [c(0.5, 1.0), c(0.5, 0.0), c(0.7, 1.0)];
        assert!(ray_intersections(&touch, 0.0).is_empty());
    }

    /// Polyline crossing the positive real axis exactly at `radii`, with
    /// returns through the left half-plane.
    fn comb(radii: &[f64]) -> Vec<Complex> {
        let mut out = Vec::new();
        for (k, &x) in radii.iter().enumerate() {
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            out.push(c(x, -s));
            out.push(c(x, s));
            out.push(c(-2.0, s));
        }
        out
    }

    #[test]
    fn crossing_pairs_alternate() {
        assert_eq!(ray_intersections(&comb(&[0.1, 0.3, 0.5]), 0.0), vec![0.1, 0.3, 0.5]);
        let rec = ray_crossings(&comb(&[0.1, 0.3, 0.5]), &comb(&[0.2, 0.25, 0.6, 1.5]), 0.0);
        let got: Vec<(f64, f64, CurveLabel)> = rec.pairs.iter().map(|p| (p.x, p.y, p.inner)).collect();
        assert_eq!(
            got,
            vec![(0.1, 0.2, CurveLabel::E), (0.25, 0.3, CurveLabel::F), (0.5, 0.6, CurveLabel::E)]
        );
        let same = ray_crossings(&comb(&[0.1, 0.2]), &comb(&[0.3]), 0.0);
        assert_eq!(same.pairs.len(), 1);
        assert_eq!((same.pairs[0].x, same.pairs[0].y), (0.2, 0.3));
    }

    #[test]
    fn spiral_moduli_chain() {
        let h = MapSpec::spiral(0.3, 0.3, 1.0).unwrap();
        let z0 = 2f64.powi(-12);
        let est = estimate_moduli(&h, z0, 1.0, 16).unwrap();
        let n = est.n_z0.max(0) as f64;
        let x_min = est.smallest_crossing().unwrap();
        assert!(n >= 1.0);
        assert!(est.lower <= est.upper.total());
        assert!(est.lower >= 2.0 * PI * n * n / (1.0 / x_min).ln() * (1.0 - 1e-9));
        for r in &est.records {
            assert!(r.pairs.len() as f64 >= n);
        }
    }

    #[test]
    fn lower_bound_examples() {
        let empty: Vec<CrossingRecord> = (0..16).map(|j| CrossingRecord { theta: j as f64, pairs: vec![] }).collect();
        assert_eq!(lower_bound_modulus(&empty).unwrap(), 0.0);
        let one: Vec<CrossingRecord> = (0..16)
            .map(|j| CrossingRecord {
                theta: j as f64,
                pairs: vec![CrossingPair { x: (-2.0f64).exp(), y: (-1.0f64).exp(), inner: CurveLabel::E }],
            })
            .collect();
        assert!((lower_bound_modulus(&one).unwrap() - 2.0 * PI).abs() < 1e-12);
        assert!(lower_bound_modulus(&one[..8]).is_err());
    }

    #[test]
    fn crossing_count_examples() {
        let h = MapSpec::spiral(0.1, 2.0 * PI, 1.0).unwrap();
        assert_eq!(crossing_count(&h, (-4.0f64).exp()).unwrap(), 15);
        let id = MapSpec::identity(1.0).unwrap();
        assert_eq!(crossing_count(&id, 0.01).unwrap(), -1);
        let h0 = MapSpec::rotation_only(1.0, 1.0).unwrap();
        assert_eq!(crossing_count(&h0, (-9.0f64).exp()).unwrap(), 3);
    }

    #[test]
    fn lemma_examples() {
        assert!((lemma_min_closed(1.0 / core::f64::consts::E, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((lemma_min_closed(0.01, 3).unwrap() - 1.954_325).abs() < 1e-6);
        assert!((lemma_min_closed(0.1, 5).unwrap() - 10.857_362).abs() < 1e-6);
        let m = lemma_min_oracle(0.01, 3).unwrap();
        let want = [0.01, 0.01f64.powf(2.0 / 3.0), 0.01f64.powf(1.0 / 3.0), 1.0];
        for (got, want) in m.partition.iter().zip(want) {
            assert!((got - want).abs() < 1e-10);
        }
        let m = lemma_min_oracle(0.3, 1).unwrap();
        assert_eq!(m.partition, vec![0.3, 1.0]);
        assert!((m.value - 1.0 / (1.0f64 / 0.3).ln()).abs() < 1e-15);
        assert!(lemma_min_oracle(0.3, 13).is_err());
        assert!(lemma_min_oracle(1.3, 2).is_err());
        assert!(partition_sum(&[0.5, 0.4, 1.0]).is_err());
    }

    #[test]
    fn geometric_smoothing_never_increases_the_sum() {
        let mut part = vec![0.05, 0.06, 0.5, 0.55, 0.9, 1.0];
        let mut prev = partition_sum(&part).unwrap();
        for _ in 0..200 {
            for j in 1..part.len() - 1 {
                part[j] = (part[j - 1] * part[j + 1]).sqrt();
                let s = partition_sum(&part).unwrap();
                assert!(s <= prev + 1e-12);
                prev = s;
            }
        }
    }
}
