//! Least-squares fits over fixed monomial sets, optionally constrained to
//! non-negative coefficients (Lawson-Hanson active set).

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least {need} points for {powers} monomials, got {got}")]
    TooFewPoints {
        need: usize,
        powers: usize,
        got: usize,
    },
    #[error("abscissae must be positive, got {0}")]
    NonPositiveAbscissa(f64),
    #[error("rank-deficient design matrix (duplicated powers or degenerate abscissae)")]
    RankDeficient,
    #[error("powers must be distinct")]
    DuplicatedPowers,
}

/// Fitted monomial weights with their uncertainties and fit quality.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// (power, coefficient), in the order the powers were requested.
    pub coefficients: Vec<(u32, f64)>,
    /// One-sigma standard errors, same order.
    pub std_errors: Vec<f64>,
    /// L2 norm of the (weighted) residual.
    pub residual_norm: f64,
    /// Coefficient of determination on the unweighted data.
    pub r_squared: f64,
}

impl FitResult {
    pub fn coefficient(&self, power: u32) -> Option<f64> {
        self.coefficients
            .iter()
            .find(|(p, _)| *p == power)
            .map(|(_, c)| *c)
    }
}

/// Unweighted least squares of y over the monomials x^p, p in `powers`.
pub fn fit_polynomial(
    points: &[(f64, f64)],
    powers: &[u32],
    nonneg: bool,
) -> Result<FitResult, FitError> {
    let weighted: Vec<(f64, f64, f64)> = points.iter().map(|&(x, y)| (x, y, 1.0)).collect();
    fit_polynomial_weighted(&weighted, powers, nonneg)
}

/// Weighted least squares; the third tuple element is the one-sigma error of
/// the ordinate (weights 1/sigma^2). A sigma of 1.0 on all points recovers
/// the unweighted fit.
pub fn fit_polynomial_weighted(
    points: &[(f64, f64, f64)],
    powers: &[u32],
    nonneg: bool,
) -> Result<FitResult, FitError> {
    let m = powers.len();
    let n = points.len();
    if n < m + 1 {
        return Err(FitError::TooFewPoints {
            need: m + 1,
            powers: m,
            got: n,
        });
    }
    for w in 0..m {
        for v in w + 1..m {
            if powers[w] == powers[v] {
                return Err(FitError::DuplicatedPowers);
            }
        }
    }
    for &(x, _, _) in points {
        if x <= 0.0 {
            return Err(FitError::NonPositiveAbscissa(x));
        }
    }
    // scaled design: rows a_ij = x_i^p_j / sigma_i
    let design = DMatrix::from_fn(n, m, |i, j| {
        points[i].0.powi(powers[j] as i32) / points[i].2
    });
    let rhs = DVector::from_fn(n, |i, _| points[i].1 / points[i].2);

    let coeffs = if nonneg {
        nnls(&design, &rhs)?
    } else {
        solve_normal(&design, &rhs)?
    };

    let fitted = &design * &coeffs;
    let residual = &rhs - &fitted;
    let residual_norm = residual.norm();

    // covariance of the estimate: sigma_hat^2 (A^T A)^-1 with
    // sigma_hat^2 = RSS/(n - m); for weighted fits this scales the stated
    // sigmas by the goodness of fit
    let dof = (n - m).max(1) as f64;
    let sigma2 = residual_norm * residual_norm / dof;
    let gram = design.transpose() * &design;
    let std_errors: Vec<f64> = match gram.try_inverse() {
        Some(inv) => (0..m).map(|j| (sigma2 * inv[(j, j)]).max(0.0).sqrt()).collect(),
        None => vec![f64::NAN; m],
    };

    // r^2 on the unweighted ordinates
    let y_mean = points.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let tss: f64 = points.iter().map(|p| (p.1 - y_mean).powi(2)).sum();
    let rss_unweighted: f64 = points
        .iter()
        .map(|&(x, y, _)| {
            let f: f64 = powers
                .iter()
                .zip(coeffs.iter())
                .map(|(&p, c)| c * x.powi(p as i32))
                .sum();
            (y - f).powi(2)
        })
        .sum();
    let r_squared = if tss > 0.0 {
        1.0 - rss_unweighted / tss
    } else {
        1.0
    };

    Ok(FitResult {
        coefficients: powers.iter().cloned().zip(coeffs.iter().cloned()).collect(),
        std_errors,
        residual_norm,
        r_squared,
    })
}

fn solve_normal(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>, FitError> {
    let gram = a.transpose() * a;
    let atb = a.transpose() * b;
    gram.cholesky()
        .map(|ch| ch.solve(&atb))
        .ok_or(FitError::RankDeficient)
}

/// Lawson-Hanson non-negative least squares.
fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>, FitError> {
    let m = a.ncols();
    let mut passive = vec![false; m];
    let mut x = DVector::zeros(m);
    let tol = 1e-12 * a.amax().max(1.0) * b.amax().max(1.0);

    for _outer in 0..(10 * m + 10) {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..m)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| w[i].partial_cmp(&w[j]).unwrap_or(std::cmp::Ordering::Equal));
        let Some(j_star) = candidate else { break };
        if w[j_star] <= tol {
            break;
        }
        passive[j_star] = true;

        loop {
            let idx: Vec<usize> = (0..m).filter(|&j| passive[j]).collect();
            let sub = a.select_columns(idx.iter());
            let z_sub = solve_normal(&sub, b)?;
            if z_sub.iter().all(|&z| z > 0.0) {
                x.fill(0.0);
                for (k, &j) in idx.iter().enumerate() {
                    x[j] = z_sub[k];
                }
                break;
            }
            // step back along x -> z until the first coefficient hits zero
            let mut alpha = f64::INFINITY;
            for (k, &j) in idx.iter().enumerate() {
                if z_sub[k] <= 0.0 {
                    let d = x[j] / (x[j] - z_sub[k]);
                    alpha = alpha.min(d);
                }
            }
            for (k, &j) in idx.iter().enumerate() {
                x[j] += alpha * (z_sub[k] - x[j]);
                if x[j] <= tol.max(1e-300) {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    Ok(x)
}
