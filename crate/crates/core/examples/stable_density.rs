//! Pointwise and grid evaluation of stable densities, tail constants and
//! the far-tail log-density.

use stable_entropy::stable_law::{classify, pdf_grid, StableDensity, StableParams};

pub fn main() -> stable_entropy::Result<()> {
    for params in [StableParams::standard_normal(), StableParams::cauchy(), StableParams::new(1.5, 0.5, 1.0, 0.0)?] {
        let d = StableDensity::new(params)?;
        println!("{params:?} ({:?})", classify(&params));
        println!("  pdf(0) = {:.9}, pdf(2) = {:.9}", d.pdf(0.0)?, d.pdf(2.0)?);
        if !params.is_normal() {
            let (c0, c1) = d.tail_constants()?;
            println!("  tail constants c0 = {c0:.6}, c1 = {c1:.6}");
            println!("  log pdf(1e6) = {:.6}", d.log_pdf(1e6)?);
        }
    }
    // the spacing must resolve the characteristic function down to 1e-12
    let grid = pdf_grid(&StableParams::symmetric(0.8, 1.0)?, -4.0, 0.025, 321, 1e-12)?;
    let coarse: Vec<String> = grid.iter().step_by(40).map(|v| format!("{v:.4}")).collect();
    println!("alpha = 0.8 at x = -4, -3, ..., 4: {coarse:?}");
    Ok(())
}
