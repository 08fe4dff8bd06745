use serde::Serialize;

use super::{BoundKind, BoundValue};
use crate::error::{domain, Error, Result};
use crate::matrixcore::{
    check_enumerable, enumerate_supports, gram_logdet, random_support, Matrix, SeededStream, Support, SupportSearch,
};
use crate::specfun::{digamma_pos, log_binomial, NeumaierSum, LOG2_E};
use crate::stats::TrialReport;

/// Finite channel sizes: `p` inputs, `m_b` rows for Bob, `m_e` for Eve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChannelDims {
    p: usize,
    m_b: usize,
    m_e: usize,
}

impl ChannelDims {
    /// Standard regime `0 <= m_e < m_b < p/2`.
    pub fn new(p: usize, m_b: usize, m_e: usize) -> Result<Self> {
        let dims = Self::relaxed(p, m_b, m_e)?;
        if m_e >= m_b {
            return domain(format!("need m_e < m_b, got m_e = {m_e}, m_b = {m_b}"));
        }
        Ok(dims)
    }

    /// Only `1 <= m_b < p/2` and `m_e <= p`; for Bob-only bounds and the
    /// identity-matrix comparison where `m_e >= m_b` is meaningful.
    pub fn relaxed(p: usize, m_b: usize, m_e: usize) -> Result<Self> {
        if m_b == 0 || 2 * m_b >= p {
            return domain(format!("need 1 <= m_b < p/2, got m_b = {m_b}, p = {p}"));
        }
        if m_e > p {
            return domain(format!("m_e = {m_e} exceeds p = {p}"));
        }
        Ok(Self { p, m_b, m_e })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn m_b(&self) -> usize {
        self.m_b
    }

    pub fn m_e(&self) -> usize {
        self.m_e
    }

    fn ensure_eve_below_bob(&self) -> Result<()> {
        if self.m_e >= self.m_b {
            return domain(format!("bound requires m_e < m_b, got m_e = {}, m_b = {}", self.m_e, self.m_b));
        }
        Ok(())
    }
}

fn check_shape(a: &Matrix, rows: usize, cols: usize, name: &str) -> Result<()> {
    if a.rows() != rows || a.cols() != cols {
        return Err(Error::DimensionMismatch(format!("{name} must be {rows}x{cols}, got {}x{}", a.rows(), a.cols())));
    }
    Ok(())
}

/// `(1/p) log2 C(p, m_b - 1)`: the rate of a uniform weight-`(m_b-1)` input.
fn support_entropy_rate(dims: &ChannelDims) -> Result<f64> {
    Ok(log_binomial(dims.p as u64, (dims.m_b - 1) as u64)? / dims.p as f64)
}

/// Secrecy-capacity lower bound for fully linearly independent `A_b`,
/// `A_e`, averaging over every weight-`(m_b-1)` support exactly:
///
/// `(1/p) log2 C(p, m_b-1) - (1/2p) log2 det(A_e A_e^T / p)
///   + mean_x (1/2p) log2 det(A_e(x) A_e(x)^T / (m_b-1))`.
///
/// `A_b` is not an argument; its FLI property is the caller's
/// responsibility.
pub fn lb1_exact(a_e: &Matrix, dims: &ChannelDims) -> Result<BoundValue> {
    dims.ensure_eve_below_bob()?;
    let (p, k) = (dims.p, dims.m_b - 1);
    check_shape(a_e, dims.m_e, p, "A_e")?;
    let rate = support_entropy_rate(dims)?;
    if dims.m_e == 0 {
        return Ok(BoundValue::exact(BoundKind::Lb1Exact, rate).with_meta("supports", 0));
    }
    let count = check_enumerable(p, k)?;
    let full = gram_logdet(a_e, &Support::full(p), p as f64)?;
    let mut sum = NeumaierSum::default();
    for x in enumerate_supports(p, k)? {
        sum.add(gram_logdet(a_e, &x, k as f64)?);
    }
    let mean = sum.total() / count as f64;
    let two_p = 2.0 * p as f64;
    Ok(BoundValue::exact(BoundKind::Lb1Exact, rate - full / two_p + mean / two_p).with_meta("supports", count))
}

/// [`lb1_exact`] with the support average replaced by the mean over
/// `n_samples` i.i.d. uniform supports (unranked from uniform ranks).
pub fn lb1_sampled(a_e: &Matrix, dims: &ChannelDims, n_samples: usize, rng: &SeededStream) -> Result<BoundValue> {
    dims.ensure_eve_below_bob()?;
    if n_samples == 0 {
        return domain("n_samples must be positive");
    }
    let (p, k) = (dims.p, dims.m_b - 1);
    check_shape(a_e, dims.m_e, p, "A_e")?;
    let rate = support_entropy_rate(dims)?;
    let two_p = 2.0 * p as f64;
    let (value, se) = if dims.m_e == 0 {
        (rate, 0.0)
    } else {
        let full = gram_logdet(a_e, &Support::full(p), p as f64)?;
        let mut r = rng.rng();
        let terms = (0..n_samples)
            .map(|_| {
                let x = random_support(p, k, &mut r)?;
                Ok(gram_logdet(a_e, &x, k as f64)? / two_p)
            })
            .collect::<Result<Vec<_>>>()?;
        let report = TrialReport::from_values(&terms, rng.seed);
        (rate - full / two_p + report.mean, report.std_error)
    };
    Ok(BoundValue { bits_per_dim: value, kind: BoundKind::Lb1Sampled, std_error: Some(se), meta: Default::default() }
        .with_meta("n_samples", n_samples)
        .with_meta("seed", rng.seed)
        .with_meta("stream_index", rng.stream_index))
}

/// Lower bound on the expected secrecy capacity over Gaussian `A_e`:
///
/// `(1/p) log2 C(p, m_b-1) - (m_e/2p) log2((m_b-1)/p)
///   - (log2 e / 2p) sum_{i=1}^{m_e} [psi((p-i+1)/2) - psi((m_b-i)/2)]`.
pub fn lb2_expected(dims: &ChannelDims) -> Result<BoundValue> {
    dims.ensure_eve_below_bob()?;
    let (p, m_b, m_e) = (dims.p as f64, dims.m_b as f64, dims.m_e);
    let rate = support_entropy_rate(dims)?;
    if m_e == 0 {
        return Ok(BoundValue::exact(BoundKind::Lb2Expected, rate));
    }
    let mut psi_gap = NeumaierSum::default();
    for i in 1..=m_e {
        let i = i as f64;
        psi_gap.add(digamma_pos((p - i + 1.0) / 2.0) - digamma_pos((m_b - i) / 2.0));
    }
    let value = rate - (m_e as f64 / (2.0 * p)) * ((m_b - 1.0) / p).log2() - LOG2_E / (2.0 * p) * psi_gap.total();
    Ok(BoundValue::exact(BoundKind::Lb2Expected, value))
}

/// The pieces of the main-channel upper bound, before normalisation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ub1Terms {
    /// `log2 C(p, m_b - 1)`.
    pub small_weight_bits: f64,
    /// `max_i (m_b/2) log2(||A_b(i)||^2 / m_b)`.
    pub column_term: f64,
    /// `(k, c~(k))` for `m_b <= k <= p`; `+inf` where some Gram was singular.
    pub ctilde: Vec<(usize, f64)>,
    /// True when every `k` searched all of its supports.
    pub exhaustive: bool,
}

/// Computes `c~(k) = max_i (m_b/2) log2(||A_b(i)||^2/m_b)
/// - min_x (1/2) log2 det(A_b(x) A_b(x)^T / k)` for every `m_b <= k <= p`.
///
/// The second term is a minimum over supports: the conditional entropy
/// `h(Y|X)` is bounded below by its smallest per-support value, and only the
/// minimum gives a valid upper bound. In sample mode the minimum is over the
/// sampled supports (each `k` uses child stream `k`), which can only
/// overestimate it.
pub fn ub1_terms(a_b: &Matrix, dims: &ChannelDims, search: &SupportSearch) -> Result<Ub1Terms> {
    let (p, m_b) = (dims.p, dims.m_b);
    check_shape(a_b, m_b, p, "A_b")?;
    let small_weight_bits = log_binomial(p as u64, (m_b - 1) as u64)?;

    let mut col_norms = vec![0.0; p];
    for i in 0..m_b {
        for (n, v) in col_norms.iter_mut().zip(a_b.row(i)) {
            *n += v * v;
        }
    }
    let column_term =
        col_norms.iter().map(|n| 0.5 * m_b as f64 * (n / m_b as f64).log2()).fold(f64::NEG_INFINITY, f64::max);

    let mut ctilde = Vec::with_capacity(p - m_b + 1);
    let mut exhaustive = true;
    for k in m_b..=p {
        let per_k = match search {
            SupportSearch::Enumerate => SupportSearch::Enumerate,
            SupportSearch::Sample { n, stream } => SupportSearch::Sample { n: *n, stream: stream.child(k as u64) },
        };
        let (supports, complete) = per_k.supports(p, k)?;
        exhaustive &= complete;
        let mut min_logdet = f64::INFINITY;
        for x in &supports {
            match gram_logdet(a_b, x, k as f64) {
                Ok(v) => min_logdet = min_logdet.min(v),
                Err(Error::SingularGram { .. }) => {
                    min_logdet = f64::NEG_INFINITY;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        ctilde.push((k, column_term - 0.5 * min_logdet));
    }
    Ok(Ub1Terms { small_weight_bits, column_term, ctilde, exhaustive })
}

/// Upper bound on Bob's channel capacity:
/// `(1/p) max(log2 C(p, m_b-1), max_k c~(k)) + log2(p)/p`.
///
/// A singular Gram for some `k` drives `c~(k)` to `+inf`; the bound is then
/// reported as `+inf` (vacuous) with `singular_k` and the finite part over
/// the remaining `k` recorded in `meta`. Sampled minima are flagged
/// `optimistic`.
pub fn ub1(a_b: &Matrix, dims: &ChannelDims, search: &SupportSearch) -> Result<BoundValue> {
    let terms = ub1_terms(a_b, dims, search)?;
    let p = dims.p as f64;
    let singular: Vec<String> =
        terms.ctilde.iter().filter(|(_, c)| c.is_infinite()).map(|(k, _)| k.to_string()).collect();
    let finite_max =
        terms.ctilde.iter().map(|&(_, c)| c).filter(|c| c.is_finite()).fold(terms.small_weight_bits, f64::max);
    let finite_bits = finite_max / p + p.log2() / p;
    let bits = if singular.is_empty() { finite_bits } else { f64::INFINITY };

    let mut value = BoundValue::exact(BoundKind::Ub1, bits);
    match search {
        SupportSearch::Enumerate => value = value.with_meta("search", "enumerate"),
        SupportSearch::Sample { n, stream } => {
            value = value
                .with_meta("search", "sample")
                .with_meta("samples_per_k", n)
                .with_meta("seed", stream.seed)
                .with_meta("stream_index", stream.stream_index);
        }
    }
    if !terms.exhaustive {
        value = value.with_meta("optimistic", true);
    }
    if !singular.is_empty() {
        value = value.with_meta("singular_k", singular.join(",")).with_meta("finite_part_bits", finite_bits);
    }
    Ok(value)
}

/// Secrecy capacity when `A_b`, `A_e` are the first `m_b`, `m_e` rows of
/// the identity: `(m_b - m_e)/p`, or 0 when `m_e >= m_b`.
pub fn identity_secrecy(dims: &ChannelDims) -> BoundValue {
    let bits = if dims.m_e < dims.m_b { (dims.m_b - dims.m_e) as f64 / dims.p as f64 } else { 0.0 };
    BoundValue::exact(BoundKind::IdentityCs, bits)
}
