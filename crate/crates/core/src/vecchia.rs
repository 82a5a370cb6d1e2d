//! Vecchia (nearest-neighbor) approximation of the Gaussian log-likelihood
//! and maximum-likelihood estimation of [`CovParams`].
//!
//! The joint density of the ordered responses is replaced by
//! `∏ p(Y_i | Y_{N_i})`, where `N_i` holds the nearest predecessors of site
//! `i`. Each factor is a univariate Gaussian, so an evaluation costs
//! `O(n m³)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::covariance::CovParams;
use crate::error::{Error, Result};
use crate::linalg::{dot, Cholesky};
use crate::spatial::{build_neighbor_table_training, NeighborMode, NeighborTable, SpatialDataset};

/// Distances needed to evaluate one conditional, cached across likelihood
/// evaluations with different parameters.
#[derive(Debug, Clone)]
struct SiteGeometry {
    neighbors: Vec<usize>,
    /// Distance from the site to each neighbor.
    cross: Vec<f64>,
    /// Row-major `k × k` distances among the neighbors.
    pairs: Vec<f64>,
}

/// A dataset and neighbor table prepared for repeated likelihood evaluation.
#[derive(Debug, Clone)]
pub struct VecchiaProblem<'a> {
    responses: &'a [f64],
    sites: Vec<SiteGeometry>,
}

impl<'a> VecchiaProblem<'a> {
    pub fn new(dataset: &'a SpatialDataset, table: &NeighborTable) -> Result<Self> {
        if table.mode() != NeighborMode::Training {
            return Err(Error::InvalidParameter(
                "the Vecchia likelihood needs a training-mode neighbor table".into(),
            ));
        }
        if table.len() != dataset.len() {
            return Err(Error::LengthMismatch {
                what: "dataset and neighbor table",
                left: dataset.len(),
                right: table.len(),
            });
        }
        let locs = dataset.locations();
        let sites = table
            .iter()
            .map(|list| {
                let k = list.len();
                let mut pairs = vec![0.0; k * k];
                for a in 0..k {
                    for b in 0..a {
                        let d = locs[list.indices[a]].dist(locs[list.indices[b]]);
                        pairs[a * k + b] = d;
                        pairs[b * k + a] = d;
                    }
                }
                SiteGeometry {
                    neighbors: list.indices.clone(),
                    cross: list.distances.clone(),
                    pairs,
                }
            })
            .collect();
        Ok(VecchiaProblem {
            responses: dataset.responses(),
            sites,
        })
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Conditional mean and variance of `Y_i` given its neighbors.
    pub fn conditional(&self, i: usize, params: &CovParams) -> Result<(f64, f64)> {
        let site = &self.sites[i];
        let resid: Vec<f64> = site
            .neighbors
            .iter()
            .map(|&j| self.responses[j] - params.mu)
            .collect();
        conditional_moments(params, &site.cross, &site.pairs, &resid)
            .map_err(|e| match e {
                Error::NotPositiveDefinite { pivot, .. } => Error::NotPositiveDefinite { row: i, pivot },
                other => other,
            })
    }

    pub fn loglik(&self, params: &CovParams) -> Result<f64> {
        params.validate()?;
        let mut total = 0.0;
        for i in 0..self.sites.len() {
            let (mean, var) = self.conditional(i, params)?;
            let u = self.responses[i] - mean;
            total += -0.5 * (2.0 * PI * var).ln() - u * u / (2.0 * var);
        }
        Ok(total)
    }
}

/// Mean and variance of a response given `k` neighbors, from the distances
/// to the neighbors (`cross`), the `k × k` distances among them (`pairs`) and
/// the neighbor residuals `Y_N − μ`.
pub(crate) fn conditional_moments(
    params: &CovParams,
    cross: &[f64],
    pairs: &[f64],
    resid: &[f64],
) -> Result<(f64, f64)> {
    let k = cross.len();
    if k == 0 {
        return Ok((params.mu, params.sill()));
    }
    let mut c = vec![0.0; k * k];
    for a in 0..k {
        c[a * k + a] = params.sill();
        for b in 0..a {
            c[a * k + b] = params.kernel(pairs[a * k + b]);
        }
    }
    let chol = Cholesky::from_vec(c, k)?;
    let cross: Vec<f64> = cross.iter().map(|&d| params.kernel(d)).collect();
    let v = chol.solve_lower(&cross);
    let r = chol.solve_lower(resid);
    let var = params.sill() - dot(&v, &v);
    if !(var > 0.0) {
        return Err(Error::NotPositiveDefinite { row: k, pivot: var });
    }
    Ok((params.mu + dot(&v, &r), var))
}

/// `Σ_i log p(Y_i | Y_{N_i})` for an ordered dataset and its training table.
pub fn vecchia_loglik(dataset: &SpatialDataset, table: &NeighborTable, params: &CovParams) -> Result<f64> {
    VecchiaProblem::new(dataset, table)?.loglik(params)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Neighbor count.
    pub m: usize,
    /// Cap on likelihood evaluations.
    pub budget: usize,
    /// Simplex diameter (in transformed coordinates) at which the search stops.
    pub tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            m: 10,
            budget: 2000,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: CovParams,
    pub loglik: f64,
    pub initial_loglik: f64,
    /// False when the evaluation budget ran out before the simplex collapsed.
    pub converged: bool,
    pub evaluations: usize,
}

/// Starting values from the data: sample mean, 80/20 split of the sample
/// variance into sill and nugget, range a tenth of the bounding-box diagonal.
pub fn default_init(dataset: &SpatialDataset) -> CovParams {
    let y = dataset.responses();
    let n = y.len().max(1) as f64;
    let mean = y.iter().sum::<f64>() / n;
    let var = (y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).max(1e-8);
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for l in dataset.locations() {
        lo = [lo[0].min(l.x), lo[1].min(l.y)];
        hi = [hi[0].max(l.x), hi[1].max(l.y)];
    }
    let diag = ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)).sqrt();
    let rho = if diag.is_finite() && diag > 0.0 { 0.1 * diag } else { 1.0 };
    CovParams {
        mu: mean,
        sigma2: 0.8 * var,
        tau2: 0.2 * var,
        rho,
    }
}

/// Maximize the Vecchia log-likelihood over `(μ, log σ², log τ², log ρ)` by
/// Nelder–Mead. The dataset must already be in reference order.
///
/// The returned log-likelihood is never below that of `init`. Responses that
/// are all identical are a degenerate case: the likelihood is unbounded as
/// the variances shrink, so the fit returns `init` with `μ` set to the common
/// value.
pub fn fit_params(dataset: &SpatialDataset, init: CovParams, options: FitOptions) -> Result<FitResult> {
    if dataset.len() < 10 {
        return Err(Error::InvalidParameter(
            "parameter fitting needs at least 10 sites".into(),
        ));
    }
    init.validate()?;
    let table = build_neighbor_table_training(dataset.locations(), options.m)?;
    let problem = VecchiaProblem::new(dataset, &table)?;
    let initial_loglik = problem.loglik(&init)?;

    let y = dataset.responses();
    if y.iter().all(|&v| v == y[0]) {
        let params = CovParams { mu: y[0], ..init };
        let loglik = problem.loglik(&params)?;
        return Ok(FitResult {
            params,
            loglik,
            initial_loglik,
            converged: true,
            evaluations: 2,
        });
    }

    let objective = |theta: &[f64]| -> f64 {
        let p = from_theta(theta);
        match problem.loglik(&p) {
            Ok(v) if v.is_finite() => -v,
            _ => f64::INFINITY,
        }
    };
    let tau2 = if init.tau2 > 0.0 { init.tau2 } else { 1e-6 * init.sill() };
    let start = [init.mu, init.sigma2.ln(), tau2.ln(), init.rho.ln()];
    let steps = [0.5 * init.sill().sqrt(), 0.5, 0.5, 0.5];
    let nm = nelder_mead(objective, &start, &steps, options.tolerance, options.budget);

    let (params, loglik) = if -nm.value >= initial_loglik {
        (from_theta(&nm.point), -nm.value)
    } else {
        (init, initial_loglik)
    };
    Ok(FitResult {
        params,
        loglik,
        initial_loglik,
        converged: nm.converged,
        evaluations: nm.evaluations + 1,
    })
}

fn from_theta(theta: &[f64]) -> CovParams {
    CovParams {
        mu: theta[0],
        sigma2: theta[1].exp(),
        tau2: theta[2].exp(),
        rho: theta[3].exp(),
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// Minimize `f` with the standard Nelder–Mead simplex (reflection 1,
/// expansion 2, contraction ½, shrink ½). The initial simplex is `start` plus
/// `steps[k]` along each axis. Stops when every vertex lies within
/// `tolerance` of the best one, or after `budget` evaluations.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    start: &[f64],
    steps: &[f64],
    tolerance: f64,
    budget: usize,
) -> NelderMeadResult {
    let dim = start.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = eval(start, &mut evals);
    simplex.push((start.to_vec(), v0));
    for k in 0..dim {
        let mut x = start.to_vec();
        x[k] += steps[k];
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    let affine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(ai, bi)| ai + t * (bi - ai)).collect()
    };

    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].0.clone();
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&best)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        if diameter < tolerance {
            converged = true;
            break;
        }
        if evals >= budget {
            break;
        }

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let (worst, f_worst) = simplex[dim].clone();
        let f_best = simplex[0].1;
        let f_second = simplex[dim - 1].1;

        let xr = affine(&centroid, &worst, -1.0);
        let fr = eval(&xr, &mut evals);
        if fr < f_best {
            let xe = affine(&centroid, &worst, -2.0);
            let fe = eval(&xe, &mut evals);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[dim] = (xr, fr);
            continue;
        }
        let (xc, fc, accept) = if fr < f_worst {
            let xc = affine(&centroid, &worst, -0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc, fc <= fr)
        } else {
            let xc = affine(&centroid, &worst, 0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc, fc < f_worst)
        };
        if accept {
            simplex[dim] = (xc, fc);
            continue;
        }
        for vertex in simplex.iter_mut().skip(1) {
            let x = affine(&best, &vertex.0, 0.5);
            let v = eval(&x, &mut evals);
            *vertex = (x, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (point, value) = simplex.swap_remove(0);
    NelderMeadResult {
        point,
        value,
        converged,
        evaluations: evals,
    }
}
