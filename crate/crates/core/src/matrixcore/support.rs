use std::collections::HashSet;

use rand::seq::index;
use rand::Rng;

use super::SeededStream;
use crate::error::{domain, Error, Result};

/// Largest `C(p, k)` for which exact sums or minima over supports are run.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

/// A binary vector in `{0,1}^p` stored as its strictly increasing index set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct Support {
    ambient: usize,
    indices: Vec<usize>,
}

impl Support {
    pub fn new(ambient: usize, indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return domain("support indices must be strictly increasing");
        }
        if let Some(&last) = indices.last() {
            if last >= ambient {
                return domain(format!("support index {last} out of range for p = {ambient}"));
            }
        }
        Ok(Self { ambient, indices })
    }

    pub fn empty(ambient: usize) -> Self {
        Self { ambient, indices: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self { ambient, indices: (0..ambient).collect() }
    }

    /// Support of a 0/1 indicator vector; any nonzero entry counts as one.
    pub fn from_indicator(bits: &[u8]) -> Self {
        Self {
            ambient: bits.len(),
            indices: bits.iter().enumerate().filter_map(|(i, &b)| (b != 0).then_some(i)).collect(),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn weight(&self) -> usize {
        self.indices.len()
    }

    /// `k / p`.
    pub fn density(&self) -> f64 {
        if self.ambient == 0 {
            0.0
        } else {
            self.weight() as f64 / self.ambient as f64
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn indicator(&self) -> Vec<u8> {
        let mut bits = vec![0u8; self.ambient];
        for &i in &self.indices {
            bits[i] = 1;
        }
        bits
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Exact `C(n, k)`, or `None` when it does not fit in a `u128`.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for j in 0..k {
        // r * (n - j) / (j + 1) with the division pulled forward
        let num = (n - j) as u128;
        let den = (j + 1) as u128;
        let g = gcd(r, den);
        let (r_red, den_red) = (r / g, den / g);
        r = r_red.checked_mul(num / den_red)?;
    }
    Some(r)
}

fn count_string(p: usize, k: usize) -> String {
    match binomial(p as u64, k as u64) {
        Some(c) => c.to_string(),
        None => format!("> {}", u128::MAX),
    }
}

/// `C(p, k)` if it is within [`ENUMERATION_LIMIT`], else `TooManySupports`.
pub(crate) fn check_enumerable(p: usize, k: usize) -> Result<u64> {
    match binomial(p as u64, k as u64) {
        Some(c) if c <= ENUMERATION_LIMIT as u128 => Ok(c as u64),
        _ => Err(Error::TooManySupports { p, k, count: count_string(p, k), limit: ENUMERATION_LIMIT }),
    }
}

/// Colexicographic rank of `x` among the weight-`k` subsets of `[0, p)`
/// (combinatorial number system: `sum_i C(c_i, i + 1)`).
///
/// Panics if the rank does not fit in a `u128`.
pub fn support_rank(x: &Support) -> u128 {
    x.indices
        .iter()
        .enumerate()
        .map(|(i, &c)| binomial(c as u64, i as u64 + 1).expect("rank exceeds u128"))
        .fold(0u128, |acc, b| acc.checked_add(b).expect("rank exceeds u128"))
}

/// The `index`-th weight-`k` subset of `[0, p)` in colexicographic order.
pub fn support_unrank(index: u128, p: usize, k: usize) -> Result<Support> {
    if k > p {
        return domain(format!("weight k = {k} exceeds p = {p}"));
    }
    let total = binomial(p as u64, k as u64);
    if matches!(total, Some(t) if index >= t) {
        return Err(Error::RankOutOfRange { index, p, k, count: count_string(p, k) });
    }
    let mut indices = vec![0usize; k];
    let mut rest = index;
    let mut c = p;
    for i in (1..=k).rev() {
        // largest c with C(c, i) <= rest
        c -= 1;
        loop {
            match binomial(c as u64, i as u64) {
                Some(b) if b <= rest => {
                    rest -= b;
                    break;
                }
                _ => c -= 1,
            }
        }
        indices[i - 1] = c;
    }
    Ok(Support { ambient: p, indices })
}

/// Iterator over all weight-`k` supports of `[0, p)` in colex (unrank) order.
#[derive(Debug, Clone)]
pub struct SupportIter {
    p: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for SupportIter {
    type Item = Support;

    fn next(&mut self) -> Option<Support> {
        let cur = self.current.take()?;
        let out = Support { ambient: self.p, indices: cur.clone() };
        let k = cur.len();
        let mut next = cur;
        // bump the lowest index that has room, reset everything below it
        let mut advanced = false;
        for i in 0..k {
            let limit = if i + 1 < k { next[i + 1] } else { self.p };
            if next[i] + 1 < limit {
                next[i] += 1;
                for (j, slot) in next.iter_mut().enumerate().take(i) {
                    *slot = j;
                }
                advanced = true;
                break;
            }
        }
        if advanced {
            self.current = Some(next);
        }
        Some(out)
    }
}

/// All `C(p, k)` supports of weight `k`, guarded by [`ENUMERATION_LIMIT`].
pub fn enumerate_supports(p: usize, k: usize) -> Result<SupportIter> {
    if k > p {
        return domain(format!("weight k = {k} exceeds p = {p}"));
    }
    check_enumerable(p, k)?;
    Ok(SupportIter { p, current: Some((0..k).collect()) })
}

/// A uniformly random weight-`k` support: unranking of a uniform rank when
/// `C(p, k)` fits in a `u128`, otherwise Floyd's subset sampler.
pub fn random_support<R: Rng + ?Sized>(p: usize, k: usize, rng: &mut R) -> Result<Support> {
    if k > p {
        return domain(format!("weight k = {k} exceeds p = {p}"));
    }
    match binomial(p as u64, k as u64) {
        Some(total) => support_unrank(rng.random_range(0..total), p, k),
        None => {
            let mut indices = index::sample(rng, p, k).into_vec();
            indices.sort_unstable();
            Ok(Support { ambient: p, indices })
        }
    }
}

/// How to range over the weight-`k` supports in a minimisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupportSearch {
    /// Every support, subject to [`ENUMERATION_LIMIT`].
    Enumerate,
    /// `n` distinct supports drawn uniformly without replacement (all of
    /// them when `n >= C(p, k)`).
    Sample { n: usize, stream: SeededStream },
}

impl SupportSearch {
    /// The supports to visit, and whether they cover all of `X_k^p`.
    pub fn supports(&self, p: usize, k: usize) -> Result<(Vec<Support>, bool)> {
        match *self {
            SupportSearch::Enumerate => Ok((enumerate_supports(p, k)?.collect(), true)),
            SupportSearch::Sample { n, stream } => {
                if n == 0 {
                    return domain("sample size must be positive");
                }
                sample_distinct(p, k, n, &stream)
            }
        }
    }
}

fn sample_distinct(p: usize, k: usize, n: usize, stream: &SeededStream) -> Result<(Vec<Support>, bool)> {
    if k > p {
        return domain(format!("weight k = {k} exceeds p = {p}"));
    }
    let total = binomial(p as u64, k as u64);
    if let Some(t) = total {
        if t <= n as u128 {
            return Ok((enumerate_supports(p, k)?.collect(), true));
        }
    }
    let mut rng = stream.rng();
    match total {
        // dense regime: sample ranks without replacement
        Some(t) if t <= 4 * n as u128 => {
            let ranks = index::sample(&mut rng, t as usize, n);
            let out = ranks.into_iter().map(|r| support_unrank(r as u128, p, k)).collect::<Result<Vec<_>>>()?;
            Ok((out, false))
        }
        _ => {
            let mut seen = HashSet::with_capacity(n);
            let mut out = Vec::with_capacity(n);
            while out.len() < n {
                let x = random_support(p, k, &mut rng)?;
                if seen.insert(x.clone()) {
                    out.push(x);
                }
            }
            Ok((out, false))
        }
    }
}
