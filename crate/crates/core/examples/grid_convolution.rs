//! Grid densities: convolution powers, affine maps, distances and
//! entropies.

use stable_entropy::convergence_lab::Target;
use stable_entropy::grid_density::{distance, GridDensity, Metric};
use stable_entropy::stable_law::StableParams;
use stable_entropy::Tolerances;

pub fn main() -> stable_entropy::Result<()> {
    let r3 = 3f64.sqrt();
    let dx = 4.0 * r3 / 1024.0;
    let x_min = -2.0 * r3 + 0.5 * dx;
    let uniform = GridDensity::from_function(move |x| if x.abs() < r3 { 0.5 / r3 } else { 0.0 }, x_min, -x_min, 1024)?;
    let phi = GridDensity::from_stable(&StableParams::standard_normal(), -8.0, 8.0, 4096)?;
    let tol = Tolerances::default();
    for n in [1, 2, 4, 16] {
        let z = uniform.convolve_power(n, &tol)?.affine(0.0, (n as f64).sqrt())?;
        println!(
            "n = {n:2}: var {:.6}, h {:.6}, L1 to N(0,1) {:.2e}, sup {:.2e}",
            z.variance()?,
            z.entropy(),
            distance(&z, &phi, Metric::L1),
            distance(&z, &phi, Metric::Sup)
        );
    }

    // heavy tails: the Cauchy law is reproduced by S_4/4
    let cauchy = GridDensity::from_stable(&StableParams::cauchy(), -100.0, 100.0, 4096)?;
    let z4 = cauchy.convolve_power(4, &tol)?.affine(0.0, 4.0)?;
    let gap = Target::new(StableParams::cauchy())?.sup_gap(&z4);
    println!("Cauchy S_4/4 vs Cauchy density at the grid nodes: sup {gap:.2e}");
    Ok(())
}
