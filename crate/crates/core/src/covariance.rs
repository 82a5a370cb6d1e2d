//! Exponential covariance model.
//!
//! Responses follow `Y = μ + W + ε` with `cov(W(s), W(t)) = σ² exp(−‖s−t‖/ρ)`
//! and iid nugget `ε ~ N(0, τ²)`. The nugget only ever appears on the
//! diagonal of the covariance of `Y`.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spatial::{find_duplicate, Location};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovParams {
    /// Mean.
    pub mu: f64,
    /// Partial sill.
    pub sigma2: f64,
    /// Nugget.
    pub tau2: f64,
    /// Range.
    pub rho: f64,
}

impl CovParams {
    pub fn new(mu: f64, sigma2: f64, tau2: f64, rho: f64) -> Result<Self> {
        let p = CovParams {
            mu,
            sigma2,
            tau2,
            rho,
        };
        p.validate()?;
        Ok(p)
    }

    /// The simulation setting: μ = 0, σ² = 5, τ² = 1, ρ = 0.16.
    pub const fn benchmark() -> Self {
        CovParams {
            mu: 0.0,
            sigma2: 5.0,
            tau2: 1.0,
            rho: 0.16,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.mu.is_finite()
            && self.sigma2.is_finite()
            && self.tau2.is_finite()
            && self.rho.is_finite()
            && self.sigma2 > 0.0
            && self.tau2 >= 0.0
            && self.rho > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "covariance parameters need finite mu, sigma2 > 0, tau2 >= 0, rho > 0: {self:?}"
            )))
        }
    }

    /// Total variance of a single response, `σ² + τ²`.
    pub fn sill(&self) -> f64 {
        self.sigma2 + self.tau2
    }

    /// Kernel of the latent field at distance `d`, no nugget and no checks.
    #[inline]
    pub fn kernel(&self, d: f64) -> f64 {
        self.sigma2 * (-d / self.rho).exp()
    }
}

/// `σ² exp(−d/ρ)`; the nugget is not included.
pub fn exp_cov(d: f64, params: &CovParams) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(Error::NegativeDistance(d));
    }
    Ok(params.kernel(d))
}

/// Covariance matrix of `Y` at `locs`: kernel plus `τ²` on the diagonal.
/// Row-major `n × n`, symmetric by construction.
pub fn cov_matrix_y(locs: &[Location], params: &CovParams) -> Result<Vec<f64>> {
    params.validate()?;
    if params.tau2 == 0.0 && find_duplicate(locs).is_some() {
        return Err(Error::SingularCovariance);
    }
    Ok(cov_matrix_unchecked(locs, params, params.tau2))
}

/// Kernel matrix with `diag` added on the diagonal; no validation.
pub(crate) fn cov_matrix_unchecked(locs: &[Location], params: &CovParams, diag: f64) -> Vec<f64> {
    let n = locs.len();
    let mut c = alloc::vec![0.0; n * n];
    for i in 0..n {
        c[i * n + i] = params.sigma2 + diag;
        for j in 0..i {
            let v = params.kernel(locs[i].dist(locs[j]));
            c[i * n + j] = v;
            c[j * n + i] = v;
        }
    }
    c
}

/// Cross-covariance of the latent field between `query` and each of `locs`.
pub fn cross_cov(query: Location, locs: &[Location], params: &CovParams) -> Vec<f64> {
    locs.iter().map(|&l| params.kernel(query.dist(l))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Cholesky;
    use alloc::vec;

    fn params(sigma2: f64, tau2: f64, rho: f64) -> CovParams {
        CovParams::new(0.0, sigma2, tau2, rho).unwrap()
    }

    #[test]
    fn kernel_values() {
        let p = params(2.0, 0.5, 0.3);
        assert_eq!(exp_cov(0.0, &p).unwrap(), 2.0);
        assert!((exp_cov(0.3, &p).unwrap() - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        let p = CovParams::benchmark();
        // 5 e^{-1}
        assert!((exp_cov(0.16, &p).unwrap() - 1.839_397_205_857_211_6).abs() < 1e-12);
        assert!(matches!(exp_cov(-1e-3, &p), Err(Error::NegativeDistance(_))));
    }

    #[test]
    fn kernel_is_monotone() {
        let p = CovParams::benchmark();
        let mut last = f64::INFINITY;
        for k in 0..200 {
            let v = exp_cov(k as f64 * 0.05, &p).unwrap();
            assert!(v <= last);
            last = v;
        }
        assert!(last < 1e-20);
    }

    #[test]
    fn single_and_pair_matrices() {
        let p = params(2.0, 0.5, 0.3);
        assert_eq!(cov_matrix_y(&[Location::new(0.2, 0.2)], &p).unwrap(), vec![2.5]);
        let c = cov_matrix_y(&[Location::new(0.0, 0.0), Location::new(0.3, 0.4)], &p).unwrap();
        assert_eq!(c[0], 2.5);
        assert_eq!(c[3], 2.5);
        assert_eq!(c[1], 2.0 * (-0.5f64 / 0.3).exp());
        assert_eq!(c[1].to_bits(), c[2].to_bits());
    }

    #[test]
    fn duplicate_sites_without_nugget_are_singular() {
        let locs = [Location::new(0.1, 0.1), Location::new(0.1, 0.1)];
        assert_eq!(
            cov_matrix_y(&locs, &params(1.0, 0.0, 0.2)),
            Err(Error::SingularCovariance)
        );
        assert!(cov_matrix_y(&locs, &params(1.0, 0.1, 0.2)).is_ok());
    }

    #[test]
    fn random_matrix_factors() {
        let locs = [
            Location::new(0.12, 0.80),
            Location::new(0.55, 0.31),
            Location::new(0.91, 0.07),
            Location::new(0.33, 0.49),
            Location::new(0.70, 0.66),
        ];
        let c = cov_matrix_y(&locs, &CovParams::benchmark()).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(c[i * 5 + j].to_bits(), c[j * 5 + i].to_bits());
            }
        }
        let chol = Cholesky::new(&c, 5).unwrap();
        assert!((0..5).all(|i| chol.lower()[i * 5 + i] > 0.0));
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(CovParams::new(0.0, 0.0, 1.0, 0.1).is_err());
        assert!(CovParams::new(0.0, 1.0, -1.0, 0.1).is_err());
        assert!(CovParams::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(CovParams::new(f64::NAN, 1.0, 0.0, 1.0).is_err());
    }
}
