//! Small least-squares fits.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Result of an ordinary straight-line fit `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn line_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::Fit("length mismatch"));
    }
    if xs.len() < 2 {
        return Err(Error::Fit("need at least two points"));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Fit("non-finite data"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("degenerate abscissae"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LineFit { slope, intercept, r_squared })
}

/// Least-squares coefficients for `y ~ sum_j c_j * basis_j(x)` via modified
/// Gram-Schmidt QR. `rows[i]` holds the basis values at sample `i`.
pub fn least_squares(rows: &[Vec<f64>], ys: &[f64]) -> Result<Vec<f64>> {
    let m = rows.len();
    if m != ys.len() || m == 0 {
        return Err(Error::Fit("length mismatch"));
    }
    let n = rows[0].len();
    if n == 0 || m < n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Fit("bad design matrix"));
    }
    // column-major copy
    let mut q: Vec<Vec<f64>> = (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut r = vec![vec![0.0; n]; n];
    for j in 0..n {
        for k in 0..j {
            let dot: f64 = q[k].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
            r[k][j] = dot;
            let (lo, hi) = q.split_at_mut(j);
            for (a, b) in hi[0].iter_mut().zip(&lo[k]) {
                *a -= dot * b;
            }
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::Fit("rank-deficient design matrix"));
        }
        r[j][j] = norm;
        for v in q[j].iter_mut() {
            *v /= norm;
        }
    }
    let qty: Vec<f64> = (0..n)
        .map(|j| q[j].iter().zip(ys).map(|(a, b)| a * b).sum())
        .collect();
    let mut coef = vec![0.0; n];
    for j in (0..n).rev() {
        let mut s = qty[j];
        for k in j + 1..n {
            s -= r[j][k] * coef[k];
        }
        coef[j] = s / r[j][j];
    }
    Ok(coef)
}
