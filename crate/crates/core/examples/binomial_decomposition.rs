//! Splitting a density into bounded and peak parts, the modified density
//! p̃_n and its quantitative checks.

use stable_entropy::decomposition::{fit_cf_tail_decay, modified_density, section3_checks, split};
use stable_entropy::grid_density::GridDensity;
use stable_entropy::Tolerances;

pub fn main() -> stable_entropy::Result<()> {
    let r3 = 3f64.sqrt();
    let p = GridDensity::from_function(move |x| if x.abs() < r3 { 0.5 / r3 } else { 0.0 }, -2.0, 2.0, 512)?;
    let s = split(&p, 0.1)?;
    println!("split b = {}: level {:.6}, sup rho1 {:.6}", s.b, s.level, s.m_bound);

    let tol = Tolerances::default();
    let mut points = Vec::new();
    for n in [4, 8, 12, 16, 20, 24] {
        let b_n = (n as f64).sqrt();
        let pair = modified_density(&s, n, 0.0, b_n, &tol)?;
        let c = section3_checks(&s, &pair, 1.0, 1.0, None);
        println!(
            "n = {n:2}: eps_n {:.2e}, L1 {:.2e}, cf gap {:.2e}, weighted L1 {:.2e} (bound {:.2e})",
            c.eps_n, c.l1_bound.lhs, c.cf_bound.lhs, c.weighted_l1.lhs, c.l1_bound.rhs
        );
        points.push((n, b_n, pair.cf_tail_integral(1.0)));
    }
    let fit = fit_cf_tail_decay(&points)?;
    println!("CF tail decay rate c = {:.4}, R² = {:.4}", fit.c, fit.r_squared);
    Ok(())
}
