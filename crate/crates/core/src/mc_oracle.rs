//! Monte-Carlo cross-checks of the grid pipeline: sampled `Z_n`, the
//! Kozachenko–Leonenko entropy estimator and sample averages of
//! `log p - log ψ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::digamma;

use crate::convergence_lab::{Experiment, NormalizerSequence};
use crate::error::{Error, Result};
use crate::grid_density::LogReference;

pub const DEFAULT_K: usize = 5;
pub const FOLDS: usize = 10;
pub const MIN_SAMPLES: usize = 1000;
/// Relative size of the perturbation applied to tied samples.
pub const TIE_JITTER: f64 = 1e-12;
/// Seed of the tie-breaking jitter.
pub const TIE_SEED: u64 = 0x5eed_0f_71e5;
/// Largest share of tied samples tolerated after jittering.
pub const MAX_TIE_FRACTION: f64 = 0.01;

/// Draws per independently seeded stream in [`sample_zn`].
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    /// Standard deviation of the fold estimates over `√FOLDS`.
    pub std_error: f64,
    pub n_samples: usize,
    /// Zero for estimators that use no neighbours.
    pub k_neighbors: usize,
}

impl McEstimate {
    /// `|value - x| / std_error`.
    pub fn z_score(&self, x: f64) -> f64 {
        (self.value - x).abs() / self.std_error
    }
}

/// `m` draws of `Z_n = (X_1 + … + X_n)/b_n - a_n`. Stream `j` of a
/// ChaCha8 generator seeded with `seed` produces draws
/// `[j·4096, (j+1)·4096)`, so the output depends on `seed` only.
pub fn sample_zn<S>(sampler: S, n: usize, norm: &NormalizerSequence, m: usize, seed: u64) -> Result<Vec<f64>>
where
    S: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    if m < MIN_SAMPLES || n == 0 {
        return Err(Error::invalid(format!("sampling needs m >= {MIN_SAMPLES} and n >= 1 (m = {m}, n = {n})")));
    }
    let (a, b) = norm.at(n);
    let chunks: Vec<Vec<f64>> = (0..m.div_ceil(CHUNK))
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j as u64);
            let len = CHUNK.min(m - j * CHUNK);
            (0..len).map(|_| (0..n).map(|_| sampler(&mut rng)).sum::<f64>() / b - a).collect()
        })
        .collect();
    Ok(chunks.concat())
}

fn fold_error(folds: &[f64]) -> f64 {
    let k = folds.len() as f64;
    let mean = folds.iter().sum::<f64>() / k;
    let var = folds.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (var / k).sqrt().max(f64::MIN_POSITIVE)
}

/// Kozachenko–Leonenko estimate from sorted samples:
/// `ψ(m) - ψ(k) + log 2 + mean(log ε_i)` with `ε_i` the distance to the
/// `k`-th nearest neighbour.
fn kl_sorted(xs: &[f64], k: usize) -> Result<f64> {
    let m = xs.len();
    let mut acc = 0.0;
    for i in 0..m {
        let (mut l, mut r) = (i, i);
        let mut eps = 0.0;
        for _ in 0..k {
            let dl = if l > 0 { xs[i] - xs[l - 1] } else { f64::INFINITY };
            let dr = if r + 1 < m { xs[r + 1] - xs[i] } else { f64::INFINITY };
            if dl <= dr {
                l -= 1;
                eps = dl;
            } else {
                r += 1;
                eps = dr;
            }
        }
        if !(eps > 0.0) {
            return Err(Error::DegenerateSample(format!("zero {k}-th neighbour distance at {}", xs[i])));
        }
        acc += eps.ln();
    }
    Ok(digamma(m as f64) - digamma(k as f64) + 2f64.ln() + acc / m as f64)
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn tie_count(sorted: &[f64]) -> usize {
    sorted.windows(2).filter(|w| w[0] == w[1]).count()
}

/// Differential entropy `h` by the `k`-nearest-neighbour estimator, with a
/// standard error from `FOLDS` contiguous folds.
pub fn knn_entropy(samples: &[f64], k: usize) -> Result<McEstimate> {
    let m = samples.len();
    if k == 0 || m < MIN_SAMPLES.max(FOLDS * (k + 1)) {
        return Err(Error::invalid(format!("kNN entropy needs k >= 1 and at least {MIN_SAMPLES} samples")));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::DegenerateSample("non-finite sample".into()));
    }
    let mut xs = samples.to_vec();
    if tie_count(&sorted(&xs)) > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(TIE_SEED);
        for x in xs.iter_mut() {
            *x += TIE_JITTER * x.abs().max(1.0) * (2.0 * rng.random::<f64>() - 1.0);
        }
        let ties = tie_count(&sorted(&xs));
        if ties as f64 > MAX_TIE_FRACTION * m as f64 {
            return Err(Error::DegenerateSample(format!("{ties} of {m} samples tied after jitter")));
        }
    }
    let value = kl_sorted(&sorted(&xs), k)?;
    let size = m / FOLDS;
    let folds: Vec<f64> =
        (0..FOLDS).into_par_iter().map(|f| kl_sorted(&sorted(&xs[f * size..(f + 1) * size]), k)).collect::<Result<_>>()?;
    Ok(McEstimate { value, std_error: fold_error(&folds), n_samples: m, k_neighbors: k })
}

/// `D(p‖ψ)` as the sample mean of `log p - log ψ` over draws from `p`.
pub fn mc_relative_entropy<P, Q>(samples: &[f64], log_p: P, log_psi: Q) -> Result<McEstimate>
where
    P: Fn(f64) -> f64 + Sync,
    Q: Fn(f64) -> f64 + Sync,
{
    let m = samples.len();
    if m < MIN_SAMPLES {
        return Err(Error::invalid(format!("relative entropy needs at least {MIN_SAMPLES} samples")));
    }
    let terms: Vec<f64> = samples.par_iter().map(|&x| log_p(x) - log_psi(x)).collect();
    if let Some(bad) = terms.iter().position(|t| !t.is_finite()) {
        return Err(Error::DegenerateSample(format!("log-ratio is not finite at {}", samples[bad])));
    }
    let size = m / FOLDS;
    let folds: Vec<f64> = (0..FOLDS).map(|f| terms[f * size..(f + 1) * size].iter().sum::<f64>() / size as f64).collect();
    let value = terms.iter().sum::<f64>() / m as f64;
    Ok(McEstimate { value, std_error: fold_error(&folds), n_samples: m, k_neighbors: 0 })
}

/// Grid and Monte-Carlo values of `D_n` and `h(Z_n)` for one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub n: usize,
    pub seed: u64,
    pub grid_relative_entropy: f64,
    pub mc_relative_entropy: McEstimate,
    pub grid_entropy: f64,
    pub knn_entropy: McEstimate,
    /// The relative-entropy estimate lies within three standard errors of
    /// the grid value.
    pub agree: bool,
    /// Same for the entropy estimate (looser in practice: the kNN estimator
    /// is biased for heavy tails).
    pub entropy_agree: bool,
}

/// Samples `Z_n` from the configured source and compares with the grid
/// density `p_n`; `log p` is read off the grid by linear interpolation.
pub fn crosscheck(exp: &Experiment, n: usize, m: usize, seed: u64) -> Result<CrossCheck> {
    let source = exp.config().source;
    let samples = sample_zn(|r| source.sample(r), n, exp.normalizer(), m, seed)?;
    let p = exp.densities(n)?.p_n;
    let reference = exp.target().reference();
    let log_p = |x: f64| p.interpolate(x).max(f64::MIN_POSITIVE).ln();
    let mc = mc_relative_entropy(&samples, log_p, |x| reference.ln_pdf(x))?;
    let knn = knn_entropy(&samples, DEFAULT_K)?;
    let grid_d = exp.relative_entropy(&p);
    let grid_h = p.entropy();
    Ok(CrossCheck {
        n,
        seed,
        grid_relative_entropy: grid_d,
        mc_relative_entropy: mc,
        grid_entropy: grid_h,
        knn_entropy: knn,
        agree: mc.z_score(grid_d) <= 3.0,
        entropy_agree: knn.z_score(grid_h) <= 3.0,
    })
}
