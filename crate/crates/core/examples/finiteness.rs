//! Finiteness of the relative entropy to a stable law and monotonicity of
//! the entropy along convolution powers.

use stable_entropy::entropy_criteria::{finiteness_diagnosis, monotonicity_check};
use stable_entropy::grid_density::GridDensity;
use stable_entropy::stable_law::StableParams;
use stable_entropy::Tolerances;

pub fn main() -> stable_entropy::Result<()> {
    let cauchy = GridDensity::from_stable(&StableParams::cauchy(), -100.0, 100.0, 4096)?;
    for (name, target) in [("normal", StableParams::standard_normal()), ("Cauchy", StableParams::cauchy())] {
        let r = finiteness_diagnosis(&cauchy, &target)?;
        println!("Cauchy source vs {name} target: {:?} (second moment {:?})", r.verdict, r.second_moment);
    }
    let r3 = 3f64.sqrt();
    let uniform = GridDensity::from_function(move |x| if x.abs() < r3 { 0.5 / r3 } else { 0.0 }, -2.0, 2.0, 512)?;
    let m = monotonicity_check(&uniform, &StableParams::standard_normal(), 1, 6, &Tolerances::default())?;
    for row in &m.rows {
        println!("h(S_{}) = {:.6} ({:?})", row.n, row.entropy, row.verdict);
    }
    println!("monotone: {}", m.pass);
    Ok(())
}
