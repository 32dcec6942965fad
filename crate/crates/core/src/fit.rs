//! Least-squares fits of the empirical trend models `a·exp(b·x)` and
//! `c·ln(x) + d`.

use core::fmt;

use crate::error::Error;
use crate::math::{exp, ln, sqrt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitModel {
    /// `coeffs[0] · exp(coeffs[1] · x)`, fitted as a line in `ln y`.
    Exponential,
    /// `coeffs[0] · ln(x) + coeffs[1]`.
    Logarithmic,
}

impl fmt::Display for FitModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitModel::Exponential => "exponential",
            FitModel::Logarithmic => "logarithmic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub model: FitModel,
    pub coeffs: [f64; 2],
    /// Euclidean norm of the residuals in the original `y` space.
    pub residual_norm: f64,
    /// Coefficient of determination in the original `y` space.
    pub r_squared: f64,
}

impl FitResult {
    pub fn eval(&self, x: f64) -> f64 {
        let [p, q] = self.coeffs;
        match self.model {
            FitModel::Exponential => p * exp(q * x),
            FitModel::Logarithmic => p * ln(x) + q,
        }
    }

    pub fn fit(model: FitModel, xs: &[f64], ys: &[f64]) -> Result<FitResult, Error> {
        match model {
            FitModel::Exponential => fit_exponential(xs, ys),
            FitModel::Logarithmic => fit_logarithmic(xs, ys),
        }
    }
}

/// Ordinary least squares `y = slope·x + intercept`.
fn line(xs: &[f64], ys: &[f64]) -> Result<(f64, f64), Error> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::SingularFit);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 1e-300) || !sxx.is_finite() {
        return Err(Error::SingularFit);
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

fn finish(model: FitModel, coeffs: [f64; 2], xs: &[f64], ys: &[f64]) -> Result<FitResult, Error> {
    if !(coeffs[0].is_finite() && coeffs[1].is_finite()) {
        return Err(Error::SingularFit);
    }
    let mut fit = FitResult {
        model,
        coeffs,
        residual_norm: 0.0,
        r_squared: 1.0,
    };
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - fit.eval(x);
            r * r
        })
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    fit.residual_norm = sqrt(ss_res);
    fit.r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res == 0.0 {
        1.0
    } else {
        f64::NEG_INFINITY
    };
    Ok(fit)
}

/// Fit `y = a·exp(b·x)` by linear regression of `ln y` on `x`. All `y` must
/// be positive.
pub fn fit_exponential(xs: &[f64], ys: &[f64]) -> Result<FitResult, Error> {
    if ys.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::InvalidArgument(
            "exponential fit needs positive data".into(),
        ));
    }
    let logs: alloc::vec::Vec<f64> = ys.iter().map(|&y| ln(y)).collect();
    let (b, ln_a) = line(xs, &logs)?;
    finish(FitModel::Exponential, [exp(ln_a), b], xs, ys)
}

/// Fit `y = c·ln(x) + d`. All `x` must be positive.
pub fn fit_logarithmic(xs: &[f64], ys: &[f64]) -> Result<FitResult, Error> {
    if xs.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidArgument(
            "logarithmic fit needs positive abscissae".into(),
        ));
    }
    let logs: alloc::vec::Vec<f64> = xs.iter().map(|&x| ln(x)).collect();
    let (c, d) = line(&logs, ys)?;
    finish(FitModel::Logarithmic, [c, d], xs, ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential() {
        let xs = [0.2, 0.3, 0.5, 0.7, 0.8];
        let ys: Vec<f64> = xs.iter().map(|&x: &f64| 2.0 * (3.0 * x).exp()).collect();
        let f = fit_exponential(&xs, &ys).unwrap();
        assert!((f.coeffs[0] - 2.0).abs() < 1e-8 && (f.coeffs[1] - 3.0).abs() < 1e-8);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_logarithm() {
        let xs = [0.2, 0.3, 0.5, 0.7, 0.8];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| x.ln() + 1.0).collect();
        let f = fit_logarithmic(&xs, &ys).unwrap();
        assert!((f.coeffs[0] - 1.0).abs() < 1e-8 && (f.coeffs[1] - 1.0).abs() < 1e-8);
        assert!(f.residual_norm < 1e-12);
    }

    #[test]
    fn identical_abscissae_are_singular() {
        assert_eq!(
            fit_exponential(&[0.5, 0.5, 0.5], &[1.0, 2.0, 3.0]),
            Err(Error::SingularFit)
        );
        assert_eq!(
            fit_logarithmic(&[0.5, 0.5, 0.5], &[1.0, 2.0, 3.0]),
            Err(Error::SingularFit)
        );
    }

    #[test]
    fn noisy_fit_r_squared_below_one() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [1.0, 2.2, 2.9, 4.3];
        let f = fit_logarithmic(&xs, &ys).unwrap();
        assert!(f.r_squared < 1.0 && f.r_squared > 0.5);
    }
}
