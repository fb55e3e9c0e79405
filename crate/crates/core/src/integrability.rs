//! Numeric p-exponential integrability of radial distortion.
//!
//! `int 2 pi r e^{pK(r)} dr` is split into dyadic shells below `r_outer`.
//! With `K(r) ~ beta log(1/r)` the shells scale like `r^{2 - p beta}`, so the
//! fitted slope of the log-contributions against `log(1/r)` estimates
//! `p beta - 2`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fit::least_squares;
use crate::maps::{Family, MapSpec};
use crate::plane::Complex;
use crate::quad::{log_add, log_sum_exp, GaussLegendre};

pub const MIN_SHELL_EXPONENT: i32 = -60;
/// Half-width of the undecided band around `p beta = 2`.
pub const EXPONENT_BAND: f64 = 0.05;
/// Shells at or below `2^-10` enter the trend fit.
pub const TAIL_START_EXPONENT: i32 = -10;
/// Shells whose monotone trend must confirm a verdict.
pub const TREND_RUN: usize = 5;
/// Margin from the critical curve below which inconclusive verdicts are
/// expected rather than disagreements.
pub const CRITICAL_MARGIN: f64 = 0.05;

const SHELL_NODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NumericVerdict {
    /// Value of the integral over `B(0, r_outer)`, with its logarithm.
    Converged { value: f64, log_value: f64 },
    Diverged,
    Inconclusive,
}

impl NumericVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            NumericVerdict::Converged { .. } => "converged",
            NumericVerdict::Diverged => "diverged",
            NumericVerdict::Inconclusive => "inconclusive",
        }
    }

    /// `Some(true)` if converged, `Some(false)` if diverged.
    pub fn decided(&self) -> Option<bool> {
        match self {
            NumericVerdict::Converged { .. } => Some(true),
            NumericVerdict::Diverged => Some(false),
            NumericVerdict::Inconclusive => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shell {
    pub r_inner: f64,
    pub log_contribution: f64,
}

impl Shell {
    pub fn contribution(&self) -> f64 {
        self.log_contribution.exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrabilityVerdict {
    pub p: f64,
    pub analytic: bool,
    pub numeric: NumericVerdict,
    /// Outermost first.
    pub shells: Vec<Shell>,
    /// Fitted `p beta`; `None` when the fit is degenerate.
    pub fitted_exponent: Option<f64>,
}

impl IntegrabilityVerdict {
    pub fn agrees(&self) -> Option<bool> {
        self.numeric.decided().map(|d| d == self.analytic)
    }
}

fn log_shell(spec: &MapSpec, p: f64, gl: &GaussLegendre, lo: f64, hi: f64) -> Result<f64> {
    let mut terms = Vec::with_capacity(gl.len());
    for (u, w) in gl.mapped(lo.ln(), hi.ln()) {
        let k = spec.distortion(Complex::new(u.exp(), 0.0))?;
        terms.push(w.ln() + 2.0 * u + p * k);
    }
    Ok((2.0 * PI).ln() + log_sum_exp(terms))
}

/// Sub-linear terms of `K` in `L = log(1/r)` for the trend fit.
fn basis(spec: &MapSpec, l: f64) -> Vec<f64> {
    let a = spec.alpha().abs();
    if spec.family() == Family::GeneralizedSpiral && a >= 0.2 {
        alloc::vec![1.0, l, l.powf(a), l.powf(-a)]
    } else {
        alloc::vec![1.0, l, l.ln()]
    }
}

pub fn radial_exp_integral(spec: &MapSpec, p: f64, r_outer: f64) -> Result<IntegrabilityVerdict> {
    if !(p > 0.0) {
        return Err(Error::InvalidArgument("p must be positive"));
    }
    if !(r_outer > 0.0 && r_outer <= 1.0) {
        return Err(Error::InvalidArgument("r_outer must lie in (0, 1]"));
    }
    let gl = GaussLegendre::new(SHELL_NODES);
    let floor = 2f64.powi(MIN_SHELL_EXPONENT);
    let mut shells = Vec::new();
    let mut hi = r_outer;
    while hi > floor * 1.5 {
        let lo = 0.5 * hi;
        shells.push(Shell { r_inner: lo, log_contribution: log_shell(spec, p, &gl, lo, hi)? });
        hi = lo;
    }
    let analytic = spec.integrability_predicate(p);
    let tail_r = 2f64.powi(TAIL_START_EXPONENT);
    let tail: Vec<&Shell> = shells.iter().filter(|s| s.r_inner <= tail_r).collect();
    let fitted_exponent = if tail.len() > 6 {
        let rows: Vec<Vec<f64>> = tail.iter().map(|s| basis(spec, -s.r_inner.ln())).collect();
        let ys: Vec<f64> = tail.iter().map(|s| s.log_contribution).collect();
        least_squares(&rows, &ys).ok().map(|coef| 2.0 + coef[1])
    } else {
        None
    };
    let last = &shells[shells.len().saturating_sub(TREND_RUN)..];
    let decreasing = last.windows(2).all(|w| w[1].log_contribution < w[0].log_contribution);
    let increasing = last.windows(2).all(|w| w[1].log_contribution > w[0].log_contribution);
    let constant_k = spec.family() == Family::Identity;
    let numeric = match fitted_exponent {
        _ if constant_k => converged(&shells, 0.25),
        Some(e) if e < 2.0 - EXPONENT_BAND && decreasing => {
            converged(&shells, 2f64.powf(e - 2.0))
        }
        Some(e) if e > 2.0 + EXPONENT_BAND && increasing => NumericVerdict::Diverged,
        _ => NumericVerdict::Inconclusive,
    };
    Ok(IntegrabilityVerdict { p, analytic, numeric, shells, fitted_exponent })
}

/// Shell sum plus a geometric tail with the given ratio.
fn converged(shells: &[Shell], ratio: f64) -> NumericVerdict {
    let head = log_sum_exp(shells.iter().map(|s| s.log_contribution));
    let last = shells.last().map(|s| s.log_contribution).unwrap_or(f64::NEG_INFINITY);
    let log_tail = last + ratio.ln() - (-ratio).ln_1p();
    let log_value = log_add(head, log_tail);
    NumericVerdict::Converged { value: log_value.exp(), log_value }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub spec: MapSpec,
    pub margin: f64,
    pub verdict: IntegrabilityVerdict,
    /// Inconclusive within the critical margin.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridReport {
    pub p: f64,
    pub rows: Vec<GridRow>,
}

impl GridReport {
    /// Rows whose verdict contradicts the analytic predicate, or that are
    /// inconclusive outside the critical margin.
    pub fn disagreements(&self) -> Vec<&GridRow> {
        self.rows
            .iter()
            .filter(|r| !r.flagged && r.verdict.agrees() != Some(true))
            .collect()
    }

    /// Fraction of unflagged rows whose verdict matches the predicate.
    pub fn agreement(&self) -> f64 {
        let judged = self.rows.iter().filter(|r| !r.flagged).count();
        if judged == 0 {
            return 1.0;
        }
        (judged - self.disagreements().len()) as f64 / judged as f64
    }
}

pub fn classify_grid(specs: &[MapSpec], p: f64) -> Result<GridReport> {
    let mut rows = Vec::with_capacity(specs.len());
    for spec in specs {
        let verdict = radial_exp_integral(spec, p, 0.5)?;
        let margin = spec.criticality_margin(p);
        let flagged = margin.abs() < CRITICAL_MARGIN && verdict.numeric == NumericVerdict::Inconclusive;
        rows.push(GridRow { spec: *spec, margin, verdict, flagged });
    }
    Ok(GridReport { p, rows })
}
