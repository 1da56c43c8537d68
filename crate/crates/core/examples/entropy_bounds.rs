//! Upper bounds on D(p̃_n‖ψ) from the local limit gap.

use stable_entropy::convergence_lab::{bound_6_3_with, bound_6_5_min, c_eps, Target};
use stable_entropy::grid_density::GridDensity;
use stable_entropy::stable_law::StableParams;

pub fn main() -> stable_entropy::Result<()> {
    for eps in [0.1, 0.25, 0.5, 1.0] {
        println!("C_{eps} = {:.6}", c_eps(eps)?);
    }
    let target = Target::new(StableParams::symmetric(1.5, 1.0)?)?;
    let p = GridDensity::from_stable(&StableParams::symmetric(1.5, 1.1)?, -60.0, 60.0, 1 << 12)?;
    let d = p.relative_entropy(target.reference());
    for eps in [0.1, 0.25] {
        println!("D = {d:.3e} <= {:.3e} (eps = {eps})", bound_6_3_with(&p, &target, eps)?);
    }
    let q = GridDensity::from_stable(&StableParams::new(2.0, 0.0, 0.55, 0.0)?, -10.0, 10.0, 1 << 12)?;
    let normal = Target::new(StableParams::standard_normal())?;
    let (b, t) = bound_6_5_min(&q, q.peak())?;
    println!("D = {:.3e} <= {b:.3e} (T = {t})", q.relative_entropy(normal.reference()));
    Ok(())
}
