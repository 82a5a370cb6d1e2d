mod common;

use common::{random_locations, rng};
use fourn_core::simulate::{
    critical_beta, sample_gp_sequential_at, sim_gp, sim_gp_sequential, sim_maxstable, sim_potts,
    transform_gp, GevMargins, GpSampler, MaxStableSampler, PottsConfig,
};
use fourn_core::{CovParams, Location};

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)
}

fn covariance(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (a.len() as f64 - 1.0)
}

/// Two-sample Kolmogorov–Smirnov statistic.
fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let rank = |v: &[f64]| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut r = vec![0.0; v.len()];
        for (k, &i) in idx.iter().enumerate() {
            r[i] = k as f64;
        }
        r
    };
    let (ra, rb) = (rank(a), rank(b));
    covariance(&ra, &rb) / (sample_variance(&ra) * sample_variance(&rb)).sqrt()
}

#[test]
fn gp_sample_variance_is_near_the_sill() {
    for seed in 0..3 {
        let v = sample_variance(sim_gp(2000, CovParams::benchmark(), seed).unwrap().responses());
        assert!((4.2..=7.8).contains(&v), "seed {seed}: {v}");
    }
}

#[test]
fn gp_correlogram_decays() {
    let ds = sim_gp(2000, CovParams::benchmark(), 5).unwrap();
    let (locs, y) = (ds.locations(), ds.responses());
    let m = mean(y);
    let bins = 10;
    let width = 0.05;
    let mut sums = vec![0.0; bins];
    let mut counts = vec![0usize; bins];
    for i in 0..locs.len() {
        for j in 0..i {
            let b = (locs[i].dist(locs[j]) / width) as usize;
            if b < bins {
                sums[b] += (y[i] - m) * (y[j] - m);
                counts[b] += 1;
            }
        }
    }
    let cov: Vec<f64> = sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect();
    let centers: Vec<f64> = (0..bins).map(|b| (b as f64 + 0.5) * width).collect();
    assert!(spearman(&centers, &cov) < 0.0, "{cov:?}");
    assert!(cov[0] > cov[bins - 1]);
}

#[test]
fn full_conditioning_sequential_matches_dense_moments() {
    let mut r = rng(40);
    let locs = random_locations(30, &mut r);
    let p = CovParams::benchmark();
    let dense = GpSampler::new(&locs, p).unwrap();
    let sites = [0, 14, 29];
    let reps = 5000;
    let mut a = vec![Vec::new(); 3];
    let mut b = vec![Vec::new(); 3];
    for _ in 0..reps {
        let yd = dense.sample(&mut r);
        let ys = sample_gp_sequential_at(&locs, &p, 29, &mut r).unwrap();
        for (k, &s) in sites.iter().enumerate() {
            a[k].push(yd[s]);
            b[k].push(ys[s]);
        }
    }
    let se_mean = (p.sill() / reps as f64).sqrt();
    for k in 0..3 {
        assert!((mean(&a[k]) - mean(&b[k])).abs() < 5.0 * se_mean * 2f64.sqrt());
        for l in 0..=k {
            let (ca, cb) = (covariance(&a[k], &a[l]), covariance(&b[k], &b[l]));
            let exact = if k == l { p.sill() } else { p.kernel(locs[sites[k]].dist(locs[sites[l]])) };
            // Standard error of a sample covariance is at most sill·√(2/reps).
            let tol = 5.0 * p.sill() * (2.0 / reps as f64).sqrt();
            assert!((ca - exact).abs() < tol && (cb - exact).abs() < tol, "{ca} {cb} {exact}");
        }
    }
}

#[test]
fn dense_and_sequential_marginals_agree_site_by_site() {
    let mut r = rng(41);
    let locs = random_locations(100, &mut r);
    let p = CovParams::benchmark();
    let dense = GpSampler::new(&locs, p).unwrap();
    let reps = 400;
    let da: Vec<Vec<f64>> = (0..reps).map(|_| dense.sample(&mut r)).collect();
    let sa: Vec<Vec<f64>> = (0..reps)
        .map(|_| sample_gp_sequential_at(&locs, &p, 99, &mut r).unwrap())
        .collect();
    // Bonferroni-corrected 5% two-sample KS test at every site.
    let alpha = 0.05 / 100.0;
    let crit = (-(alpha / 2.0f64).ln() / 2.0).sqrt() * (2.0 / reps as f64).sqrt();
    for s in 0..100 {
        let x: Vec<f64> = da.iter().map(|v| v[s]).collect();
        let y: Vec<f64> = sa.iter().map(|v| v[s]).collect();
        assert!(ks_statistic(&x, &y) < crit, "site {s}");
    }
}

#[test]
fn sequential_without_neighbors_is_iid() {
    let p = CovParams::benchmark();
    let ds = sim_gp_sequential(20_000, p, 0, 3).unwrap();
    let y = ds.responses();
    assert!(mean(y).abs() < 4.0 * (6.0f64 / 20_000.0).sqrt());
    assert!((sample_variance(y) - 6.0).abs() < 0.2);
    assert_eq!(ds, sim_gp_sequential(20_000, p, 0, 3).unwrap());
}

#[test]
fn sequential_scales_past_the_dense_cap() {
    let ds = sim_gp_sequential(30_000, CovParams::benchmark(), 10, 1).unwrap();
    let v = sample_variance(ds.responses());
    assert!((4.0..=8.0).contains(&v), "{v}");
}

#[test]
fn transform_preserves_ranks() {
    let ds = sim_gp(500, CovParams::benchmark(), 2).unwrap();
    let y = ds.responses();
    let t: Vec<f64> = y.iter().map(|&v| transform_gp(v)).collect();
    for i in 0..y.len() {
        for j in 0..y.len() {
            assert_eq!(y[i] < y[j], t[i] < t[j]);
        }
    }
}

#[test]
fn maxstable_unit_frechet_marginal() {
    let locs = [
        Location::new(0.0, 0.0),
        Location::new(1.0, 0.0),
        Location::new(0.0, 1.0),
        Location::new(1.0, 1.0),
        Location::new(0.5, 0.5),
    ];
    let sampler = MaxStableSampler::new(&locs, 0.5).unwrap();
    let mut r = rng(50);
    let mut below = 0;
    let mut total = 0;
    for _ in 0..2000 {
        for z in sampler.sample(&mut r).unwrap() {
            assert!(z > 0.0);
            below += (z <= 1.0) as usize;
            total += 1;
        }
    }
    let frac = below as f64 / total as f64;
    assert!((frac - (-1f64).exp()).abs() <= 0.02, "{frac}");
}

#[test]
fn maxstable_extremal_coefficient_grows_with_distance() {
    let locs = [Location::new(0.0, 0.0), Location::new(0.01, 0.0), Location::new(5.0, 0.0)];
    let sampler = MaxStableSampler::new(&locs, 0.5).unwrap();
    let mut r = rng(51);
    let (mut near, mut far) = (0.0, 0.0);
    let reps = 3000;
    for _ in 0..reps {
        let z = sampler.sample(&mut r).unwrap();
        near += 1.0 / z[0].max(z[1]);
        far += 1.0 / z[0].max(z[2]);
    }
    // max(Z₁, Z₂) is Fréchet with scale θ, so E[1 / max] = 1 / θ.
    let theta_near = reps as f64 / near;
    let theta_far = reps as f64 / far;
    assert!(theta_far > theta_near, "{theta_near} vs {theta_far}");
    assert!(theta_far > 1.5 && theta_near < 1.3);
}

#[test]
fn maxstable_margins_before_and_after_mapping() {
    let m = GevMargins::default();
    let unit = fourn_core::simulate::sim_maxstable_unit(500, 0.5, 9).unwrap();
    assert!(unit.responses().iter().all(|&z| z > 0.0 && z.is_finite()));
    let gev = sim_maxstable(500, 0.5, m, 9).unwrap();
    let floor = m.loc - m.scale / m.shape;
    for (z, v) in unit.responses().iter().zip(gev.responses()) {
        assert!(*v > floor && v.is_finite());
        assert_eq!(*v, fourn_core::simulate::frechet_to_gev(*z, &m));
    }
}

#[test]
fn potts_labels_are_uniform_without_interaction() {
    let n = 10_000;
    let s = sim_potts(n, PottsConfig { beta: 0.0, sweeps: 3, ..Default::default() }, 1).unwrap();
    let p = 1.0 / 8.0;
    let bound = 3.0 * (p * (1.0 - p) / n as f64).sqrt();
    for g in 1..=8 {
        let f = s.labels.iter().filter(|&&l| l == g).count() as f64 / n as f64;
        assert!((f - p).abs() <= bound, "label {g}: {f}");
    }
}

#[test]
fn potts_at_critical_coupling_forms_clusters() {
    let s = sim_potts(900, PottsConfig { sweeps: 200, ..Default::default() }, 8).unwrap();
    assert_eq!(PottsConfig::default().beta, critical_beta(8));
    let agree = (0..900)
        .filter(|&i| i % 30 != 29)
        .filter(|&i| s.labels[i] == s.labels[i + 1])
        .count() as f64
        / (30.0 * 29.0);
    assert!(agree > 0.3, "{agree}");
    assert!(s.labels.iter().all(|l| (1..=8).contains(l)));
    assert!(s.dataset.responses().iter().all(|y| y.is_finite()));
    let mean_by_label: Vec<(usize, f64)> = (1..=8)
        .filter_map(|g| {
            let v: Vec<f64> = s.labels.iter().zip(s.dataset.responses()).filter(|(l, _)| **l == g).map(|(_, y)| *y).collect();
            (v.len() > 20).then(|| (g, mean(&v)))
        })
        .collect();
    for (g, m) in mean_by_label {
        let g = g as f64;
        assert!((m - (g * g + 5.0 * g)).abs() < 1.0, "label {g}: {m}");
    }
}

#[test]
fn simulators_are_seed_deterministic() {
    let p = CovParams::benchmark();
    assert_eq!(sim_maxstable(200, 0.5, GevMargins::default(), 3).unwrap(), sim_maxstable(200, 0.5, GevMargins::default(), 3).unwrap());
    let c = PottsConfig { sweeps: 10, ..Default::default() };
    assert_eq!(sim_potts(100, c, 3).unwrap(), sim_potts(100, c, 3).unwrap());
    assert_ne!(sim_gp_sequential(100, p, 5, 3).unwrap(), sim_gp_sequential(100, p, 5, 4).unwrap());
}
