//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's numerics: determinants are cofactor expansions,
//! supports come from bitmasks, special functions from plain series.
#![allow(dead_code)]

use cswiretap::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// ln Γ(x): shift up to x ≥ 30, then the Stirling series.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0);
    let (mut z, mut shift) = (x, 0.0);
    while z < 30.0 {
        shift += z.ln();
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
}

/// ψ(x): shift up to x ≥ 30, then the asymptotic series.
pub fn digamma(x: f64) -> f64 {
    assert!(x > 0.0);
    let (mut z, mut shift) = (x, 0.0);
    while z < 30.0 {
        shift += 1.0 / z;
        z += 1.0;
    }
    let inv2 = 1.0 / (z * z);
    z.ln() - 0.5 / z - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0)) - shift
}

/// Exact C(n, k) in integers.
pub fn binom_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn log2_binom(n: u64, k: u64) -> f64 {
    (binom_u128(n, k) as f64).log2()
}

/// `log2 C(n, k)` from [`ln_gamma`], for sizes past `u128`.
pub fn log2_binom_large(n: u64, k: u64) -> f64 {
    let (n, k) = (n as f64, k as f64);
    (ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)) * std::f64::consts::LOG2_E
}

pub fn h2(q: f64) -> f64 {
    if q == 0.0 || q == 1.0 {
        0.0
    } else {
        -q * q.log2() - (1.0 - q) * (1.0 - q).log2()
    }
}

/// All `k`-subsets of `0..p`, from bitmasks.
pub fn subsets(p: usize, k: usize) -> Vec<Vec<usize>> {
    assert!(p < 32);
    (0u32..1 << p)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..p).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

/// Laplace expansion along the first row.
pub fn det_cofactor(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    match n {
        0 => 1.0,
        1 => a[0][0],
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        _ => (0..n)
            .map(|j| {
                let minor: Vec<Vec<f64>> = a[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * a[0][j] * det_cofactor(&minor)
            })
            .sum(),
    }
}

/// `log2 det((1/c) A(x) A(x)^T)` with an explicit Gram and cofactor
/// determinant.
pub fn gram_log2det(a: &Matrix, cols: &[usize], c: f64) -> f64 {
    let m = a.rows();
    let gram: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| cols.iter().map(|&l| a.get(i, l) * a.get(j, l)).sum::<f64>() / c).collect())
        .collect();
    det_cofactor(&gram).log2()
}

pub fn lb1_oracle(a_e: &Matrix, p: usize, m_b: usize) -> f64 {
    let pf = p as f64;
    let rate = log2_binom(p as u64, (m_b - 1) as u64) / pf;
    if a_e.rows() == 0 {
        return rate;
    }
    let all: Vec<usize> = (0..p).collect();
    let full = gram_log2det(a_e, &all, pf);
    let sets = subsets(p, m_b - 1);
    let avg = sets.iter().map(|x| gram_log2det(a_e, x, (m_b - 1) as f64)).sum::<f64>() / sets.len() as f64;
    rate - full / (2.0 * pf) + avg / (2.0 * pf)
}

pub fn min_logdet_oracle(a: &Matrix, k: usize) -> f64 {
    subsets(a.cols(), k).iter().map(|x| gram_log2det(a, x, k as f64) / a.cols() as f64).fold(f64::INFINITY, f64::min)
}

pub fn ub1_oracle(a_b: &Matrix, p: usize, m_b: usize) -> f64 {
    let col = (0..p)
        .map(|i| {
            let norm: f64 = (0..m_b).map(|r| a_b.get(r, i).powi(2)).sum();
            m_b as f64 / 2.0 * (norm / m_b as f64).log2()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let mut best = log2_binom(p as u64, (m_b - 1) as u64);
    for k in m_b..=p {
        let min = subsets(p, k).iter().map(|x| gram_log2det(a_b, x, k as f64)).fold(f64::INFINITY, f64::min);
        best = best.max(col - 0.5 * min);
    }
    best / p as f64 + (p as f64).log2() / p as f64
}

/// Monte Carlo estimate of `H(X | W X + sigma V)` with `X ~ Bernoulli(kappa)`,
/// `sigma^2 = kappa / rho_e`: `H2(kappa) - E[-log2 f(S)] + h(S|X)`.
/// Returns (estimate, standard error).
pub fn mc_mixture_entropy(kappa: f64, rho_e: f64, samples: u64, seed: u64) -> (f64, f64) {
    let s2 = kappa / rho_e;
    let (v0, v1) = (s2, 1.0 + s2);
    let two_pi = 2.0 * std::f64::consts::PI;
    let density = |s: f64| {
        (1.0 - kappa) * (-s * s / (2.0 * v0)).exp() / (two_pi * v0).sqrt()
            + kappa * (-s * s / (2.0 * v1)).exp() / (two_pi * v1).sqrt()
    };
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (mut sum, mut sumsq) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let w: f64 = rng.sample(StandardNormal);
        let v: f64 = rng.sample(StandardNormal);
        let x = rng.random::<f64>() < kappa;
        let s = if x { w } else { 0.0 } + s2.sqrt() * v;
        let l = -density(s).log2();
        sum += l;
        sumsq += l * l;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sumsq - n * mean * mean) / (n - 1.0);
    let e = std::f64::consts::E;
    let h_given_x = (1.0 - kappa) * 0.5 * (two_pi * e * v0).log2() + kappa * 0.5 * (two_pi * e * v1).log2();
    (h2(kappa) - mean + h_given_x, (var / n).sqrt())
}

/// Gaussian matrix from a generator unrelated to the library's streams.
pub fn oracle_gaussian(m: usize, p: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let data = (0..m * p).map(|_| rng.sample(StandardNormal)).collect();
    Matrix::from_row_major(m, p, data).unwrap()
}
