//! Monte Carlo and exact-moment checks of the random-matrix facts the bounds
//! rest on.
//!
//! Limits are never asserted literally. Each check is either an exact
//! finite-size moment compared with simulation, or a statistic whose trend
//! over growing `p` can be observed.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::matrixcore::{
    dot, gaussian_matrix_with, gram_logdet, max_column_norm_sq, random_support, Matrix, SeededStream, Support,
    SupportSearch,
};
use crate::specfun::{digamma_pos, log_gamma, LOG2_E};
use crate::stats::{run_trials, TrialReport};

/// An `m x m` Wishart matrix `G G^T` with `G` an `m x n` Gaussian matrix,
/// and a moment order `r` used by the negative-moment checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WishartSpec {
    pub m: usize,
    pub n: usize,
    pub r: f64,
}

impl WishartSpec {
    /// Requires `1 <= m <= n` and `r > 0`.
    pub fn new(m: usize, n: usize, r: f64) -> Result<Self> {
        if m == 0 || n < m {
            return domain(format!("need 1 <= m <= n, got m = {m}, n = {n}"));
        }
        if !(r > 0.0 && r.is_finite()) {
            return domain(format!("moment order must be positive, got {r}"));
        }
        Ok(Self { m, n, r })
    }

    /// Spec without a meaningful moment order (`r = 1`).
    pub fn dims(m: usize, n: usize) -> Result<Self> {
        Self::new(m, n, 1.0)
    }

    /// `m / n`.
    pub fn ratio(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    fn check_moment(&self) -> Result<()> {
        let cap = (self.n - self.m) as f64 / 2.0;
        if self.r >= cap {
            return domain(format!("negative moment of order {} needs r < (n - m)/2 = {cap}", self.r));
        }
        Ok(())
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return domain("trials must be positive");
    }
    Ok(())
}

/// Outcome of a chi-square upper-tail experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChisqTail {
    pub d: usize,
    pub eps: f64,
    pub trials: u64,
    pub exceedances: u64,
    /// Fraction of trials with `chi2_d >= d (1 + eps)`.
    pub empirical_tail: f64,
    /// `exp(-(3/16) d eps^2)`.
    pub tail_bound: f64,
    /// `sqrt(q (1 - q) / trials)` at the empirical fraction `q`.
    pub binomial_se: f64,
}

impl ChisqTail {
    /// `empirical_tail <= tail_bound + k * binomial_se`.
    pub fn within_bound(&self, k: f64) -> bool {
        self.empirical_tail <= self.tail_bound + k * self.binomial_se
    }
}

/// Draws `trials` chi-square variables with `d` degrees of freedom (as sums
/// of squared normals) and counts how often they reach `d (1 + eps)`.
pub fn chisq_tail_check(d: usize, eps: f64, trials: u64, rng: &SeededStream) -> Result<ChisqTail> {
    if d == 0 {
        return domain("degrees of freedom must be positive");
    }
    if !(eps > 0.0 && eps < 0.5) {
        return domain(format!("eps must lie in (0, 1/2), got {eps}"));
    }
    check_trials(trials)?;
    let threshold = d as f64 * (1.0 + eps);
    let hits = run_trials(trials, |t| {
        let mut r = rng.trial_rng(t);
        let s: f64 = (0..d)
            .map(|_| {
                let g: f64 = r.sample(StandardNormal);
                g * g
            })
            .sum();
        s >= threshold
    });
    let exceedances = hits.iter().filter(|&&h| h).count() as u64;
    let q = exceedances as f64 / trials as f64;
    Ok(ChisqTail {
        d,
        eps,
        trials,
        exceedances,
        empirical_tail: q,
        tail_bound: (-(3.0 / 16.0) * d as f64 * eps * eps).exp(),
        binomial_se: (q * (1.0 - q) / trials as f64).sqrt(),
    })
}

/// Statistics of `(1/n) log2 det(W/n)` over `trials` sampled Wishart
/// matrices.
pub fn wishart_logdet_stats(spec: &WishartSpec, trials: u64, rng: &SeededStream) -> Result<TrialReport> {
    check_trials(trials)?;
    let (m, n) = (spec.m, spec.n);
    let full = Support::full(n);
    let values = run_trials(trials, |t| {
        let g = gaussian_matrix_with(m, n, &mut rng.trial_rng(t));
        gram_logdet(&g, &full, n as f64).map(|v| v / n as f64)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(TrialReport::from_values(&values, rng.seed))
}

/// Exact `E[(1/n) log2 det(W/n)]`:
/// `(1/n) (m + log2 e * sum_{i=1}^m psi((n-i+1)/2) - m log2 n)`.
pub fn wishart_logdet_mean_exact(spec: &WishartSpec) -> Result<f64> {
    let (m, n) = (spec.m, spec.n as f64);
    let psi: f64 = (1..=m).map(|i| digamma_pos((n - i as f64 + 1.0) / 2.0)).sum();
    Ok((m as f64 + LOG2_E * psi - m as f64 * n.log2()) / n)
}

/// `-M(r)` with `E[det(W)^-r] = exp(-M(r))` and
/// `M(r) = r m ln 2 + sum_{i=0}^{m-1} [ln Γ((n-i)/2) - ln Γ((n-i)/2 - r)]`.
///
/// Requires `r < (n - m)/2`.
pub fn wishart_neg_moment_exact(spec: &WishartSpec) -> Result<f64> {
    spec.check_moment()?;
    let (m, n, r) = (spec.m, spec.n as f64, spec.r);
    let mut big_m = r * m as f64 * std::f64::consts::LN_2;
    for i in 0..m {
        let z = (n - i as f64) / 2.0;
        big_m += log_gamma(z)? - log_gamma(z - r)?;
    }
    Ok(-big_m)
}

/// Monte Carlo estimate of `E[det(W)^-r]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegMomentEstimate {
    pub report: TrialReport,
    /// `4r >= n - m`: the estimator has infinite variance and its standard
    /// error is not trustworthy.
    pub heavy_tailed: bool,
}

/// Averages `exp(-r ln det W)` over `trials` sampled Wishart matrices.
pub fn wishart_neg_moment_mc(spec: &WishartSpec, trials: u64, rng: &SeededStream) -> Result<NegMomentEstimate> {
    spec.check_moment()?;
    check_trials(trials)?;
    let (m, n, r) = (spec.m, spec.n, spec.r);
    let full = Support::full(n);
    let values = run_trials(trials, |t| {
        let g = gaussian_matrix_with(m, n, &mut rng.trial_rng(t));
        gram_logdet(&g, &full, 1.0).map(|bits| (-r * bits / LOG2_E).exp())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(NegMomentEstimate {
        report: TrialReport::from_values(&values, rng.seed),
        heavy_tailed: 4.0 * r >= (n - m) as f64,
    })
}

/// Column-norm statistics at one `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColnormPoint {
    pub p: usize,
    pub m_b: usize,
    /// `max_i (1/m_b) ||A(i)||^2`.
    pub max: TrialReport,
    /// `(max_i (1/m_b) ||A(i)||^2 - 1)_+`.
    pub excess: TrialReport,
}

/// Rounds `rho * p` to the nearest integer, ties away from zero.
pub fn rows_for(rho: f64, p: usize) -> usize {
    (rho * p as f64).round() as usize
}

/// For each `p`, the largest normalised squared column norm of Gaussian
/// `m_b x p` matrices with `m_b = round(rho_b p)`. Point `p` uses child
/// stream `p`.
pub fn colnorm_max_trend(p_list: &[usize], rho_b: f64, trials: u64, rng: &SeededStream) -> Result<Vec<ColnormPoint>> {
    if !(rho_b > 0.0 && rho_b <= 0.5) {
        return domain(format!("rho_b must lie in (0, 1/2], got {rho_b}"));
    }
    check_trials(trials)?;
    p_list
        .iter()
        .map(|&p| {
            let m_b = rows_for(rho_b, p);
            if m_b == 0 {
                return domain(format!("round(rho_b * p) is 0 at p = {p}"));
            }
            let stream = rng.child(p as u64);
            let maxima =
                run_trials(trials, |t| max_column_norm_sq(&gaussian_matrix_with(m_b, p, &mut stream.trial_rng(t))));
            let excess: Vec<f64> = maxima.iter().map(|v| (v - 1.0).max(0.0)).collect();
            Ok(ColnormPoint {
                p,
                m_b,
                max: TrialReport::from_values(&maxima, rng.seed),
                excess: TrialReport::from_values(&excess, rng.seed),
            })
        })
        .collect()
}

/// `min_x (1/p) log2 det(A(x) A(x)^T / k)` over weight-`k` supports.
///
/// With [`SupportSearch::Sample`] the minimum is over the sampled supports
/// only, so it overestimates the true minimum. A singular Gram gives `-inf`.
pub fn min_support_logdet(a: &Matrix, k: usize, search: &SupportSearch) -> Result<f64> {
    let (m, p) = (a.rows(), a.cols());
    if k < m || k > p {
        return domain(format!("need rows <= k <= p, got k = {k} for a {m}x{p} matrix"));
    }
    let (supports, _) = search.supports(p, k)?;
    let values = supports
        .par_iter()
        .map(|x| match gram_logdet(a, x, k as f64) {
            Ok(v) => Ok(v / p as f64),
            Err(Error::SingularGram { .. }) => Ok(f64::NEG_INFINITY),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(values.into_iter().fold(f64::INFINITY, f64::min))
}

/// Support-minimised log-determinant at one `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetminPoint {
    pub p: usize,
    pub m_b: usize,
    pub k: usize,
    pub samples: usize,
    /// Sampled [`min_support_logdet`].
    pub value: f64,
    /// `kappa mu(rho_b / kappa)`.
    pub target: f64,
    pub deviation: f64,
}

/// For each `p`: a Gaussian `m_b x p` matrix with `m_b = round(rho_b p)`
/// and the sampled minimum over `samples` supports of weight
/// `round(kappa p)`. Point `p` draws the matrix from child stream `p` and
/// the supports from that stream's child 1.
pub fn detmin_trend(
    p_list: &[usize],
    rho_b: f64,
    kappa: f64,
    samples: usize,
    rng: &SeededStream,
) -> Result<Vec<DetminPoint>> {
    if !(rho_b > 0.0 && rho_b <= 0.5) || !(kappa >= rho_b && kappa <= 1.0) {
        return domain(format!("need 0 < rho_b <= 1/2 and rho_b <= kappa <= 1, got {rho_b}, {kappa}"));
    }
    let target = kappa * crate::specfun::mu(rho_b / kappa)?;
    p_list
        .iter()
        .map(|&p| {
            let m_b = rows_for(rho_b, p);
            let k = rows_for(kappa, p);
            if m_b == 0 {
                return domain(format!("round(rho_b * p) is 0 at p = {p}"));
            }
            let stream = rng.child(p as u64);
            let a = crate::matrixcore::sample_gaussian_matrix(m_b, p, &stream)?;
            let search = SupportSearch::Sample { n: samples, stream: stream.child(1) };
            let value = min_support_logdet(&a, k, &search)?;
            Ok(DetminPoint { p, m_b, k, samples, value, target, deviation: (value - target).abs() })
        })
        .collect()
}

/// Quantities from the eavesdropper-side estimator `X^ = (1/m_e) A_e^T z`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShadowEstimate {
    pub xhat: Vec<f64>,
    /// `sigma_i^2 = (1/m_e^2) sum_{j != i} <A_e(i), A_e(j)>^2 x_j`.
    pub sigma_sq: Vec<f64>,
    /// `max_i | ||A_e(i)||^2 / m_e - 1 |`.
    pub max_colnorm_dev: f64,
    /// `max_i | sigma_i^2 - kappa/rho_e |`.
    pub max_sigma_dev: f64,
}

/// Computes [`ShadowEstimate`] for one channel use.
///
/// `kappa / rho_e` is the limiting interference variance; the caller's
/// ratios are used rather than the instance's `k/p` and `m_e/p`, so rounding
/// at finite `p` shows up in `max_sigma_dev`.
///
/// The interference variance is normalised by `m_e^2`: each inner product
/// `<A_e(i), A_e(j)>` has variance `m_e`, and about `kappa p` of them enter
/// the sum, so this is the scaling that settles at `kappa / rho_e`.
pub fn hxz_shadow(a_e: &Matrix, x: &Support, z: &[f64], kappa: f64, rho_e: f64) -> Result<ShadowEstimate> {
    let (m, p) = (a_e.rows(), a_e.cols());
    a_e.check_support(x)?;
    if z.len() != m {
        return Err(Error::DimensionMismatch(format!("observation of length {} for {m} rows", z.len())));
    }
    if m == 0 {
        return domain("hxz_shadow needs m_e >= 1");
    }
    if !(rho_e > 0.0) || !(kappa >= 0.0) {
        return domain(format!("need rho_e > 0 and kappa >= 0, got {rho_e}, {kappa}"));
    }
    let mf = m as f64;
    let target = kappa / rho_e;
    // column-major copy so each column is contiguous
    let mut cols = vec![0.0; m * p];
    for i in 0..m {
        for (j, &v) in a_e.row(i).iter().enumerate() {
            cols[j * m + i] = v;
        }
    }
    let col = |j: usize| &cols[j * m..(j + 1) * m];

    let xhat: Vec<f64> = (0..p).map(|i| dot(col(i), z) / mf).collect();
    let sigma_sq: Vec<f64> = (0..p)
        .into_par_iter()
        .map(|i| {
            let ci = col(i);
            let s: f64 = x
                .indices()
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| {
                    let g = dot(ci, col(j));
                    g * g
                })
                .sum();
            s / (mf * mf)
        })
        .collect();
    let max_colnorm_dev = (0..p).map(|i| (dot(col(i), col(i)) / mf - 1.0).abs()).fold(0.0, f64::max);
    let max_sigma_dev = sigma_sq.iter().map(|s| (s - target).abs()).fold(0.0, f64::max);
    Ok(ShadowEstimate { xhat, sigma_sq, max_colnorm_dev, max_sigma_dev })
}

/// Estimator statistics at one `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HxzPoint {
    pub p: usize,
    pub m_e: usize,
    pub k: usize,
    pub max_colnorm_dev: TrialReport,
    pub max_sigma_dev: TrialReport,
}

/// For each `p`: Gaussian `A_e` with `m_e = round(rho_e p)`, a uniform
/// support of weight `ceil(kappa p)`, Gaussian gains, and the resulting
/// [`hxz_shadow`] deviations. Point `p` uses child stream `p`.
pub fn hxz_trend(p_list: &[usize], rho_e: f64, kappa: f64, trials: u64, rng: &SeededStream) -> Result<Vec<HxzPoint>> {
    if !(rho_e > 0.0 && rho_e <= 0.5) || !(kappa > 0.0 && kappa <= 1.0) {
        return domain(format!("need rho_e in (0, 1/2] and kappa in (0, 1], got {rho_e}, {kappa}"));
    }
    check_trials(trials)?;
    p_list
        .iter()
        .map(|&p| {
            let m_e = rows_for(rho_e, p);
            let k = ((kappa * p as f64).ceil() as usize).min(p);
            if m_e == 0 {
                return domain(format!("round(rho_e * p) is 0 at p = {p}"));
            }
            let stream = rng.child(p as u64);
            let devs = run_trials(trials, |t| {
                let mut r = stream.trial_rng(t);
                let a_e = gaussian_matrix_with(m_e, p, &mut r);
                let x = random_support(p, k, &mut r)?;
                let mut wx = vec![0.0; p];
                for &j in x.indices() {
                    wx[j] = r.sample(StandardNormal);
                }
                let z = a_e.mul_vec(&wx)?;
                let s = hxz_shadow(&a_e, &x, &z, kappa, rho_e)?;
                Ok((s.max_colnorm_dev, s.max_sigma_dev))
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let (col, sig): (Vec<f64>, Vec<f64>) = devs.into_iter().unzip();
            Ok(HxzPoint {
                p,
                m_e,
                k,
                max_colnorm_dev: TrialReport::from_values(&col, rng.seed),
                max_sigma_dev: TrialReport::from_values(&sig, rng.seed),
            })
        })
        .collect()
}
