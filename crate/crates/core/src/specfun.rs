//! Scalar special functions and the one-dimensional quadrature used by the
//! bounds: log-gamma, digamma, log-binomial, binary entropy, the Wishart
//! log-determinant limit `mu`, and the two-component mixture conditional
//! entropy `g(kappa, rho_e)`.
//!
//! Everything is computed in nats internally. Functions documented as
//! returning bits convert once, at the end.

use std::f64::consts::{LN_2, PI};

use crate::error::{domain, Error, Result};

/// `log2(e)`.
pub const LOG2_E: f64 = std::f64::consts::LOG2_E;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// Lanczos approximation, g = 607/128, 15 terms.
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEF: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    4.652_362_892_704_858e-5,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_103_2e-3,
    0.217_439_618_115_212_64e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

/// Natural logarithm of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("log_gamma requires a finite x > 0, got {x}"));
    }
    Ok(ln_gamma_pos(x))
}

fn ln_gamma_pos(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if x < 0.5 {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        return (PI / (PI * x).sin()).ln() - ln_gamma_pos(1.0 - x);
    }
    let z = x - 1.0;
    let mut series = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_2PI + (z + 0.5) * t.ln() - t + series.ln()
}

/// Digamma `psi(x) = Γ'(x)/Γ(x)` for `x > 0`.
///
/// Shifts the argument up to at least 10 with `psi(x) = psi(x+1) - 1/x` and
/// finishes with the asymptotic expansion through the `x^-14` term.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("digamma requires a finite x > 0, got {x}"));
    }
    Ok(digamma_pos(x))
}

pub(crate) fn digamma_pos(mut x: f64) -> f64 {
    let mut shift = 0.0;
    while x < 10.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Bernoulli terms B_2k / (2k x^2k), Horner in 1/x^2
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    shift + x.ln() - 0.5 * inv - tail
}

/// `log2 C(p, k)` via log-gamma. Exact zero at `k = 0` and `k = p`.
pub fn log_binomial(p: u64, k: u64) -> Result<f64> {
    if k > p {
        return domain(format!("log_binomial requires 0 <= k <= p, got p={p}, k={k}"));
    }
    let k = k.min(p - k);
    if k == 0 {
        return Ok(0.0);
    }
    let (p, k) = (p as f64, k as f64);
    let nats = ln_gamma_pos(p + 1.0) - ln_gamma_pos(k + 1.0) - ln_gamma_pos(p - k + 1.0);
    Ok(nats / LN_2)
}

/// Binary entropy `H2(q)` in bits, with `H2(0) = H2(1) = 0`.
///
/// Symmetric under `q -> 1 - q` bit-for-bit: the larger of the two masses is
/// formed first and the smaller derived from it exactly.
pub fn binary_entropy(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return domain(format!("binary_entropy requires q in [0, 1], got {q}"));
    }
    Ok(binary_entropy_nats(q) / LN_2)
}

pub(crate) fn binary_entropy_nats(q: f64) -> f64 {
    let hi = if q >= 0.5 { q } else { 1.0 - q };
    let lo = 1.0 - hi;
    if lo == 0.0 {
        return 0.0;
    }
    -lo * lo.ln() - hi * hi.ln()
}

/// Limit of `(1/n) log2 det(W/n)` for an `m x m` Wishart matrix with `n`
/// degrees of freedom as `m/n -> rho`, in bits.
pub fn mu(rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho <= 1.0) {
        return domain(format!("mu requires rho in (0, 1], got {rho}"));
    }
    Ok(mu_nats(rho) / LN_2)
}

pub(crate) fn mu_nats(rho: f64) -> f64 {
    if rho == 1.0 {
        return -1.0;
    }
    -(1.0 - rho) * (-rho).ln_1p() - rho
}

/// Truncation and accuracy settings for [`mixture_entropy_g`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct QuadratureSpec {
    /// Half-width of the integration range in units of the widest component
    /// standard deviation.
    pub half_width_sigmas: f64,
    pub abs_tolerance: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { half_width_sigmas: 10.0, abs_tolerance: 1e-9, max_subdivisions: 1 << 16 }
    }
}

impl QuadratureSpec {
    pub fn new(half_width_sigmas: f64, abs_tolerance: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self { half_width_sigmas, abs_tolerance, max_subdivisions };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width_sigmas >= 6.0) || !self.half_width_sigmas.is_finite() {
            return domain(format!("half_width_sigmas must be >= 6, got {}", self.half_width_sigmas));
        }
        if !(self.abs_tolerance > 0.0) {
            return domain(format!("abs_tolerance must be > 0, got {}", self.abs_tolerance));
        }
        if self.max_subdivisions < 16 {
            return domain(format!("max_subdivisions must be >= 16, got {}", self.max_subdivisions));
        }
        Ok(())
    }
}

const INITIAL_PANELS: usize = 16;

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
///
/// The range is cut into 16 panels up front; each refinement splits one
/// panel and halves its tolerance share. More than `max_subdivisions`
/// refinements is a non-convergence error.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_subdivisions: usize) -> Result<f64> {
    struct Panel {
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
    }
    let simpson = |a: f64, b: f64, fa: f64, fm: f64, fb: f64| (b - a) / 6.0 * (fa + 4.0 * fm + fb);

    let width = (b - a) / INITIAL_PANELS as f64;
    let mut stack = Vec::with_capacity(64);
    let mut f_left = f(a);
    for i in 0..INITIAL_PANELS {
        let pa = a + width * i as f64;
        let pb = if i + 1 == INITIAL_PANELS { b } else { pa + width };
        let fm = f(0.5 * (pa + pb));
        let fb = f(pb);
        stack.push(Panel {
            a: pa,
            b: pb,
            fa: f_left,
            fm,
            fb,
            whole: simpson(pa, pb, f_left, fm, fb),
            tol: tol / INITIAL_PANELS as f64,
        });
        f_left = fb;
    }
    // panels are processed right-to-left; reverse so the sum runs left-to-right
    stack.reverse();

    let mut sum = NeumaierSum::default();
    let mut subdivisions = 0usize;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let flm = f(0.5 * (p.a + m));
        let frm = f(0.5 * (m + p.b));
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        if delta.abs() <= 15.0 * p.tol {
            sum.add(left + right + delta / 15.0);
            continue;
        }
        subdivisions += 1;
        if subdivisions > max_subdivisions {
            return Err(Error::QuadratureNonConvergence { tolerance: tol, max_subdivisions });
        }
        let half_tol = 0.5 * p.tol;
        stack.push(Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right, tol: half_tol });
        stack.push(Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left, tol: half_tol });
    }
    Ok(sum.total())
}

/// Compensated (Neumaier) running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

fn gaussian_entropy_nats(variance: f64) -> f64 {
    0.5 * (2.0 * PI * std::f64::consts::E * variance).ln()
}

fn normal_pdf(s: f64, variance: f64) -> f64 {
    (-0.5 * s * s / variance).exp() / (2.0 * PI * variance).sqrt()
}

/// `g(kappa, rho_e) = H(X | W X + sigma V)` in bits, where
/// `X ~ Bernoulli(kappa)`, `W, V ~ N(0, 1)` independent and
/// `sigma^2 = kappa / rho_e`.
///
/// Evaluated as `H2(kappa) - [h(S) - h(S|X)]`. `h(S|X)` is closed form;
/// `h(S)` is the integral of `-f ln f` for the zero-mean two-component
/// Gaussian mixture density `f`, taken over `[0, U]` and doubled. The mutual
/// information is clamped to `[0, H2(kappa)]`.
///
/// `kappa = 0` returns 0 and `rho_e = 0` returns the limit `H2(kappa)`,
/// both without quadrature.
pub fn mixture_entropy_g(kappa: f64, rho_e: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(0.0..=1.0).contains(&kappa) {
        return domain(format!("kappa must lie in [0, 1], got {kappa}"));
    }
    if !(0.0..=1.0).contains(&rho_e) {
        return domain(format!("rho_e must lie in [0, 1], got {rho_e}"));
    }
    quad.validate()?;
    if kappa == 0.0 {
        return Ok(0.0);
    }
    let h_x = binary_entropy_nats(kappa);
    if rho_e == 0.0 {
        return Ok(h_x / LN_2);
    }

    let var0 = kappa / rho_e;
    let var1 = 1.0 + var0;
    let (w0, w1) = (1.0 - kappa, kappa);
    let h_s_given_x = w0 * gaussian_entropy_nats(var0) + w1 * gaussian_entropy_nats(var1);

    let integrand = |s: f64| {
        let f = w0 * normal_pdf(s, var0) + w1 * normal_pdf(s, var1);
        if f > 0.0 {
            -f * f.ln()
        } else {
            0.0
        }
    };
    let upper = quad.half_width_sigmas * var1.sqrt();
    // the tolerance applies to the doubled integral
    let half = adaptive_simpson(integrand, 0.0, upper, 0.5 * quad.abs_tolerance, quad.max_subdivisions)?;
    let h_s = 2.0 * half;

    let info = (h_s - h_s_given_x).clamp(0.0, h_x);
    Ok((h_x - info) / LN_2)
}
