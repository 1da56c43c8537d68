//! Reproducible Chambers–Mallows–Stuck draws compared with the density.

use stable_entropy::stable_law::{sample, StableDensity, StableParams};

pub fn main() -> stable_entropy::Result<()> {
    let params = StableParams::symmetric(1.5, 1.0)?;
    let xs = sample(&params, 50_000, 42)?;
    assert_eq!(xs, sample(&params, 50_000, 42)?);
    let d = StableDensity::new(params)?;
    // empirical vs exact probability of [-1, 1] (midpoint rule on the pdf)
    let empirical = xs.iter().filter(|x| x.abs() <= 1.0).count() as f64 / xs.len() as f64;
    let h = 1e-3;
    let exact: f64 = (0..2000).map(|j| d.pdf(-1.0 + (j as f64 + 0.5) * h)).sum::<stable_entropy::Result<f64>>()? * h;
    println!("P(|X| <= 1): sampled {empirical:.4}, exact {exact:.4}");
    Ok(())
}
