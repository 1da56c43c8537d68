//! Chambers–Mallows–Stuck sampling.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::StableParams;
use crate::error::Result;

/// Uniform draw on the open interval (0, 1).
pub(crate) fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let bits = rng.random::<u64>() >> 11;
    (bits as f64 + 0.5) / (1u64 << 53) as f64
}

/// One draw from the stable law using `rng`.
pub fn sample_with<R: Rng + ?Sized>(params: &StableParams, rng: &mut R) -> f64 {
    let v = PI * (open_unit(rng) - 0.5);
    let w = -open_unit(rng).ln();
    let alpha = params.alpha;
    if alpha == 1.0 {
        // this branch shares the sign of beta with the textbook form
        let beta = params.beta;
        let sigma = params.c;
        let shifted = FRAC_PI_2 + beta * v;
        let x = 2.0 / PI * (shifted * v.tan() - beta * (FRAC_PI_2 * w * v.cos() / shifted).ln());
        return sigma * x + 2.0 / PI * beta * sigma * sigma.ln() + params.a;
    }
    // textbook skewness is the negative of ours when alpha != 1
    let beta = -params.effective_beta();
    let tan = (PI * alpha / 2.0).tan();
    let b = (beta * tan).atan() / alpha;
    let s = (1.0 + beta * beta * tan * tan).powf(1.0 / (2.0 * alpha));
    let x = s * (alpha * (v + b)).sin() / v.cos().powf(1.0 / alpha)
        * ((v - alpha * (v + b)).cos() / w).powf((1.0 - alpha) / alpha);
    params.scale() * x + params.a
}

/// `count` reproducible draws seeded with `seed` (ChaCha8).
pub fn sample(params: &StableParams, count: usize, seed: u64) -> Result<Vec<f64>> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| sample_with(params, &mut rng)).collect())
}
