//! The multiplicative Gaussian wiretap channel `Y = A_b W X`, `Z = A_e W X`,
//! a message encoder by support unranking, and the exhaustive
//! subspace-membership decoder.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::bounds::ChannelDims;
use crate::error::{domain, Error, Result};
use crate::matrixcore::{
    binomial, check_enumerable, enumerate_supports, sample_gaussian_matrix, support_rank, support_unrank, ColumnSpan,
    Matrix, SeededStream, Support,
};
use crate::stats::{run_trials, TrialReport};

/// Default relative-residual threshold of the decoder.
///
/// Residuals of the true support sit near `1e-15`. Impostor supports have a
/// minimum residual whose distribution has positive density at zero, so a
/// looser threshold admits them at a rate roughly proportional to it.
pub const DEFAULT_DECODE_TOL: f64 = 1e-10;

/// A pair of channel matrices with matching dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelInstance {
    dims: ChannelDims,
    a_b: Matrix,
    a_e: Matrix,
}

impl ChannelInstance {
    pub fn new(dims: ChannelDims, a_b: Matrix, a_e: Matrix) -> Result<Self> {
        let p = dims.p();
        if a_b.rows() != dims.m_b() || a_b.cols() != p {
            return Err(Error::DimensionMismatch(format!(
                "A_b must be {}x{p}, got {}x{}",
                dims.m_b(),
                a_b.rows(),
                a_b.cols()
            )));
        }
        if a_e.rows() != dims.m_e() || a_e.cols() != p {
            return Err(Error::DimensionMismatch(format!(
                "A_e must be {}x{p}, got {}x{}",
                dims.m_e(),
                a_e.rows(),
                a_e.cols()
            )));
        }
        Ok(Self { dims, a_b, a_e })
    }

    /// Gaussian `A_b` from child stream 0 and `A_e` from child stream 1.
    pub fn gaussian(dims: ChannelDims, stream: &SeededStream) -> Result<Self> {
        let p = dims.p();
        let a_b = sample_gaussian_matrix(dims.m_b(), p, &stream.child(0))?;
        let a_e = if dims.m_e() == 0 {
            Matrix::zeros(0, p)
        } else {
            sample_gaussian_matrix(dims.m_e(), p, &stream.child(1))?
        };
        Self::new(dims, a_b, a_e)
    }

    /// Both matrices are leading rows of the identity.
    pub fn identity_rows(dims: ChannelDims) -> Self {
        let p = dims.p();
        Self { dims, a_b: Matrix::identity_rows(dims.m_b(), p), a_e: Matrix::identity_rows(dims.m_e(), p) }
    }

    pub fn dims(&self) -> &ChannelDims {
        &self.dims
    }

    pub fn a_b(&self) -> &Matrix {
        &self.a_b
    }

    pub fn a_e(&self) -> &Matrix {
        &self.a_e
    }
}

/// One channel use.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransmitResult {
    pub x: Vec<usize>,
    /// Diagonal of `W`; every entry is drawn, only those on `x` matter.
    pub w_diag: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

/// Maps message `s` to the weight-`(m_b - 1)` support of colex rank `s`.
pub fn encode_message(s: u128, dims: &ChannelDims) -> Result<Support> {
    support_unrank(s, dims.p(), dims.m_b() - 1)
}

/// Inverse of [`encode_message`].
pub fn message_of(x: &Support) -> u128 {
    support_rank(x)
}

/// `M W x` using only the columns of `m` on the support.
fn apply_on_support(m: &Matrix, x: &Support, w: &[f64]) -> Vec<f64> {
    (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            x.indices().iter().map(|&j| row[j] * w[j]).sum()
        })
        .collect()
}

/// Sends `x` through both branches with a fresh `W` drawn from `stream`.
pub fn transmit(inst: &ChannelInstance, x: &Support, stream: &SeededStream) -> Result<TransmitResult> {
    transmit_with(inst, x, &mut stream.rng())
}

pub(crate) fn transmit_with<R: Rng + ?Sized>(
    inst: &ChannelInstance,
    x: &Support,
    rng: &mut R,
) -> Result<TransmitResult> {
    inst.a_b.check_support(x)?;
    let w_diag: Vec<f64> = (0..inst.dims.p()).map(|_| rng.sample(StandardNormal)).collect();
    let y = apply_on_support(&inst.a_b, x, &w_diag);
    let z = apply_on_support(&inst.a_e, x, &w_diag);
    Ok(TransmitResult { x: x.indices().to_vec(), w_diag, y, z })
}

/// Exhaustive decoder over all weight-`k` supports, with the column spans
/// precomputed.
#[derive(Debug, Clone)]
pub struct SubspaceDecoder {
    p: usize,
    k: usize,
    rows: usize,
    candidates: Vec<(Support, ColumnSpan)>,
}

impl SubspaceDecoder {
    /// Fails with `TooManySupports` when `C(p, k)` exceeds the guard.
    pub fn new(a_b: &Matrix, k: usize) -> Result<Self> {
        let p = a_b.cols();
        if k > p {
            return domain(format!("weight k = {k} exceeds p = {p}"));
        }
        check_enumerable(p, k)?;
        let candidates =
            enumerate_supports(p, k)?.map(|x| ColumnSpan::new(a_b, &x).map(|s| (x, s))).collect::<Result<Vec<_>>>()?;
        Ok(Self { p, k, rows: a_b.rows(), candidates })
    }

    pub fn weight(&self) -> usize {
        self.k
    }

    pub fn ambient(&self) -> usize {
        self.p
    }

    /// Every support whose relative residual `||y - P y|| / ||y||` is at
    /// most `tol`.
    pub fn matches(&self, y: &[f64], tol: f64) -> Result<Vec<Support>> {
        if !(tol > 0.0) {
            return domain(format!("tolerance must be positive, got {tol}"));
        }
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch(format!("observation of length {} for {} rows", y.len(), self.rows)));
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for (x, span) in &self.candidates {
            if span.residual_norm(y)? <= tol * norm {
                out.push(x.clone());
            }
        }
        Ok(out)
    }

    /// The unique support within `tol`.
    pub fn decode(&self, y: &[f64], tol: f64) -> Result<Support> {
        let mut found = self.matches(y, tol)?;
        match found.len() {
            0 => Err(Error::NoCandidate { tol }),
            1 => Ok(found.pop().expect("one match")),
            n => Err(Error::AmbiguousDecode { candidates: n, tol }),
        }
    }
}

/// One-shot [`SubspaceDecoder::decode`]. `y = 0` yields `NoCandidate`.
pub fn decode_support(a_b: &Matrix, y: &[f64], k: usize, tol: f64) -> Result<Support> {
    SubspaceDecoder::new(a_b, k)?.decode(y, tol)
}

/// End-to-end decoding statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodingReport {
    /// Per-trial error indicator (1 on any failure).
    pub report: TrialReport,
    pub errors: u64,
    pub ambiguous: u64,
    pub no_candidate: u64,
    /// A unique but incorrect support.
    pub wrong: u64,
    pub tol: f64,
}

enum Outcome {
    Ok,
    Ambiguous,
    NoCandidate,
    Wrong,
}

/// Uniform messages, transmitted over `inst` and decoded from `y` alone.
/// Trial `t` draws its message and `W` from `stream.trial_rng(t)`.
pub fn decoding_error_rate(
    inst: &ChannelInstance,
    trials: u64,
    stream: &SeededStream,
    tol: f64,
) -> Result<DecodingReport> {
    if trials == 0 {
        return domain("trials must be positive");
    }
    let dims = inst.dims;
    let k = dims.m_b() - 1;
    let decoder = SubspaceDecoder::new(&inst.a_b, k)?;
    let count = binomial(dims.p() as u64, k as u64).expect("guarded by the decoder");
    let outcomes = run_trials(trials, |t| -> Result<Outcome> {
        let mut rng = stream.trial_rng(t);
        let x = encode_message(rng.random_range(0..count), &dims)?;
        let sent = transmit_with(inst, &x, &mut rng)?;
        Ok(match decoder.decode(&sent.y, tol) {
            Ok(got) if got == x => Outcome::Ok,
            Ok(_) => Outcome::Wrong,
            Err(Error::AmbiguousDecode { .. }) => Outcome::Ambiguous,
            Err(Error::NoCandidate { .. }) => Outcome::NoCandidate,
            Err(e) => return Err(e),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let (mut ambiguous, mut no_candidate, mut wrong) = (0, 0, 0);
    let indicators: Vec<f64> = outcomes
        .iter()
        .map(|o| match o {
            Outcome::Ok => 0.0,
            Outcome::Ambiguous => {
                ambiguous += 1;
                1.0
            }
            Outcome::NoCandidate => {
                no_candidate += 1;
                1.0
            }
            Outcome::Wrong => {
                wrong += 1;
                1.0
            }
        })
        .collect();
    Ok(DecodingReport {
        report: TrialReport::from_values(&indicators, stream.seed),
        errors: ambiguous + no_candidate + wrong,
        ambiguous,
        no_candidate,
        wrong,
        tol,
    })
}
