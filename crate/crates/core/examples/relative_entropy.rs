//! Relative entropy against Gaussian and stable references.

use stable_entropy::entropy_criteria::{entropy_upper_bound_check, identity_2_3_residual, reference_for};
use stable_entropy::grid_density::{GaussianReference, GridDensity};
use stable_entropy::stable_law::StableParams;

pub fn main() -> stable_entropy::Result<()> {
    let shifted = GridDensity::from_stable(&StableParams::new(2.0, 0.0, 0.5, 1.0)?, -11.0, 13.0, 1 << 13)?;
    println!("D(N(1,1) || N(0,1)) = {:.9} (exact 0.5)", shifted.relative_entropy(&GaussianReference::standard()));

    let target = StableParams::symmetric(1.5, 1.0)?;
    let wider = GridDensity::from_stable(&StableParams::symmetric(1.5, 1.3)?, -80.0, 80.0, 1 << 13)?;
    let psi = reference_for(&wider, &target)?;
    println!("D(S(1.5, c=1.3) || S(1.5, c=1)) = {:.9}", wider.relative_entropy(&psi));
    let check = entropy_upper_bound_check(&wider, &target)?;
    println!("h = {:.6} <= cross entropy {:?}: {}", check.h, check.bound, check.pass);
    println!("identity residual {:.1e}", identity_2_3_residual(&wider, &target)?);
    Ok(())
}
