use std::f64::consts::PI;

use proptest::prelude::*;
use statrs::function::erf::erfc;

use super::*;

fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

fn cauchy(scale: f64) -> impl Fn(f64) -> f64 {
    move |x| scale / (PI * (scale * scale + x * x))
}

fn uniform01(x: f64) -> f64 {
    if (0.0..1.0).contains(&x) {
        1.0
    } else {
        0.0
    }
}

/// 1024 nodes at spacing 1/256 whose cells have edges at every multiple
/// of 1/256 (so 0, 1 and 2 are cell edges).
fn aligned_grid<F: Fn(f64) -> f64>(f: F) -> GridDensity {
    let dx = 1.0 / 256.0;
    let x_min = -1.0 + 0.5 * dx;
    GridDensity::from_function(f, x_min, x_min + 1023.0 * dx, 1024).unwrap()
}

fn normal_grid() -> GridDensity {
    GridDensity::from_function(phi, -10.0, 10.0, 1 << 12).unwrap()
}

fn cauchy_grid(scale: f64, half_width: f64, n: usize) -> GridDensity {
    GridDensity::from_function_with_tail(cauchy(scale), -half_width, half_width, n, 2.0).unwrap()
}

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn uniform_from_function() {
    let g = GridDensity::from_function(uniform01, -1.0, 2.0, 1 << 10).unwrap();
    assert!((g.mass() - 1.0).abs() < 1e-12);
    for (x, v) in g.nodes() {
        let dx = g.dx();
        if x - 0.5 * dx > 0.0 && x + 0.5 * dx < 1.0 {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn normal_from_function_captures_mass() {
    let g = normal_grid();
    assert!((g.renormalization() - 1.0).abs() < 1e-6);
    assert!((g.mass() - 1.0).abs() < 1e-12);
}

#[test]
fn truncated_cauchy_is_rejected_without_tail() {
    // captured mass is 1 - (2/π) arctan(1/50) plus half a cell at each end
    match GridDensity::from_function(cauchy(1.0), -50.0, 50.0, 1 << 14) {
        Err(Error::Truncation { mass }) => {
            let expect = 1.0 - 2.0 / PI * (1.0f64 / 50.0).atan();
            assert!((mass - expect).abs() < 1e-5, "{mass} vs {expect}");
        }
        other => panic!("expected truncation error, got {other:?}"),
    }
    let g = cauchy_grid(1.0, 50.0, 1 << 14);
    assert!((g.renormalization() - 1.0).abs() < 1e-4);
    let t = g.tail().unwrap();
    assert!((t.left - 1.0 / PI).abs() < 1e-3 && (t.right - 1.0 / PI).abs() < 1e-3);
}

#[test]
fn rejects_bad_inputs() {
    assert!(GridDensity::from_function(phi, -1.0, 1.0, 100).is_err());
    assert!(GridDensity::from_function(phi, -1.0, 1.0, 128).is_err());
    assert!(matches!(
        GridDensity::from_function(|x| x, -1.0, 1.0, 256),
        Err(Error::NegativeSample { .. })
    ));
    assert!(GridDensity::from_values(0.0, 0.1, vec![1.0; 3], None).is_err());
}

#[test]
fn uniform_self_convolution_is_triangle() {
    let g = aligned_grid(uniform01);
    let tri = g.convolve_power(2, &tol()).unwrap();
    assert!((tri.interpolate(1.0) - 1.0).abs() < 1e-6);
    for x in [0.25, 0.5, 1.5, 1.75] {
        assert!((tri.interpolate(x) - (1.0 - (x - 1.0f64).abs())).abs() < 1e-9);
    }
    assert!(tri.interpolate(-0.5).abs() < 1e-12 && tri.interpolate(2.5).abs() < 1e-12);
}

#[test]
fn gaussian_convolution_power() {
    let g = normal_grid();
    let s4 = g.convolve_power(4, &tol()).unwrap();
    let worst = s4.nodes().map(|(x, v)| (v - phi(x / 2.0) / 2.0).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn cauchy_convolution_power() {
    let g = cauchy_grid(1.0, 50.0, 1 << 14);
    let s3 = g.convolve_power(3, &tol()).unwrap();
    let c3 = cauchy(3.0);
    let worst = s3.nodes().filter(|(x, _)| x.abs() <= 50.0).map(|(x, v)| (v - c3(x)).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-4, "{worst}");
    assert!((s3.mass() - 1.0).abs() < 1e-12);
}

#[test]
fn affine_maps() {
    let g = aligned_grid(uniform01);
    assert_eq!(g.affine(0.0, 1.0).unwrap(), g);

    let tri = g.convolve_power(2, &tol()).unwrap();
    let shifted = tri.affine(1.0, 1.0).unwrap();
    for x in [-0.5, 0.0, 0.5] {
        assert!((shifted.interpolate(x) - (1.0 - x.abs())).abs() < 1e-9);
    }

    let n = 1 << 12;
    let dx = 40.0 / (n - 1) as f64;
    let values: Vec<f64> = (0..n).map(|j| phi((-20.0 + j as f64 * dx) / 2.0) / 2.0).collect();
    let wide = GridDensity::from_values(-20.0, dx, values, None).unwrap();
    let unit = wide.affine(0.0, 2.0).unwrap();
    let worst = unit.nodes().map(|(x, v)| (v - phi(x)).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn entropy_golden_values() {
    let h = normal_grid().entropy();
    assert!((h - 0.5 * (2.0 * PI * std::f64::consts::E).ln()).abs() < 1e-4);
    assert!(aligned_grid(uniform01).entropy().abs() < 1e-6);
    let hc = cauchy_grid(1.0, 50.0, 1 << 14).entropy();
    assert!((hc - (4.0 * PI).ln()).abs() < 1e-3, "{hc}");
}

fn cauchy_log(scale: f64) -> FnReference<impl Fn(f64) -> f64 + Sync> {
    FnReference::new(move |x: f64| (scale / PI).ln() - (scale * scale + x * x).ln(), TailGrowth::Logarithmic)
}

#[test]
fn relative_entropy_golden_values() {
    let g = normal_grid();
    assert!(g.relative_entropy(&GaussianReference::standard()).abs() < 1e-6);

    let shifted = GridDensity::from_function(|x| phi(x - 1.0), -10.0, 12.0, 1 << 12).unwrap();
    let d = shifted.relative_entropy(&GaussianReference::standard());
    assert!((d - 0.5).abs() < 1e-4, "{d}");

    let c2 = cauchy_grid(2.0, 200.0, 1 << 15);
    let d = c2.relative_entropy(&cauchy_log(1.0));
    assert!((d - (9.0f64 / 8.0).ln()).abs() < 1e-4, "{d}");
}

/// Independent oracle for the Cauchy KL value: plain midpoint rule with
/// 10^6 nodes after the substitution x = tan(θ).
#[test]
fn cauchy_kl_closed_form_oracle() {
    let n = 1_000_000;
    let h = PI / n as f64;
    let (p, q) = (cauchy(2.0), cauchy(1.0));
    let mut acc = 0.0;
    for i in 0..n {
        let th = -PI / 2.0 + (i as f64 + 0.5) * h;
        let x = th.tan();
        let jac = 1.0 + x * x;
        acc += p(x) * (p(x) / q(x)).ln() * jac * h;
    }
    assert!((acc - (9.0f64 / 8.0).ln()).abs() < 1e-8);
}

#[test]
fn divergent_relative_entropy_is_infinite() {
    let c = cauchy_grid(1.0, 50.0, 1 << 14);
    assert_eq!(c.relative_entropy(&GaussianReference::standard()), f64::INFINITY);
}

#[test]
fn distances() {
    let g = normal_grid();
    for m in [Metric::L1, Metric::WeightedL1(1.0), Metric::Sup] {
        assert_eq!(distance(&g, &g, m), 0.0);
    }
    let u = aligned_grid(uniform01);
    let v = aligned_grid(|x| uniform01(x - 1.0));
    assert!((distance(&u, &v, Metric::L1) - 2.0).abs() < 1e-12);

    let n = 1 << 12;
    let dx = 20.0 / (n - 1) as f64;
    let a = GridDensity::from_values(-10.0, dx, (0..n).map(|j| phi(-10.0 + j as f64 * dx)).collect(), None).unwrap();
    let b =
        GridDensity::from_values(-10.0, dx, (0..n).map(|j| phi(-10.0 + j as f64 * dx - 0.1)).collect(), None)
            .unwrap();
    // dense scan oracle, step 1e-4
    let oracle = (0..200_000)
        .map(|i| {
            let x = -10.0 + i as f64 * 1e-4;
            (phi(x) - phi(x - 0.1)).abs()
        })
        .fold(0.0, f64::max);
    // the maximum sits near x = ±1 where |φ'| peaks, not at the mode
    assert!((oracle - 0.0241769).abs() < 1e-6, "{oracle}");
    assert!((distance(&a, &b, Metric::Sup) - oracle).abs() < 1e-5);
}

#[test]
fn moments() {
    let g = normal_grid();
    assert!((g.abs_moment(2.0).unwrap() - 1.0).abs() < 1e-5);
    assert!((g.abs_moment(1.0).unwrap() - (2.0 / PI).sqrt()).abs() < 1e-5);
    let c = cauchy_grid(1.0, 50.0, 1 << 14);
    assert!((c.abs_moment(0.5).unwrap() - 2f64.sqrt()).abs() < 1e-3);
    assert!(matches!(c.abs_moment(1.0), Err(Error::DivergentMoment { .. })));
}

#[test]
fn characteristic_functions() {
    let g = normal_grid();
    assert!((g.cf(1.0).unwrap().re - (-0.5f64).exp()).abs() < 1e-6);
    assert!((g.cf(0.0).unwrap().re - 1.0).abs() < 1e-12);
    let u = aligned_grid(uniform01);
    assert!(u.cf(2.0 * PI).unwrap().norm() < 1e-8);
    assert!(matches!(g.cf(1e4), Err(Error::BandLimit { .. })));

    let c = cauchy_grid(1.0, 50.0, 1 << 14);
    for t in [0.5, 1.0, 3.0] {
        let z = c.cf(t).unwrap();
        assert!((z.re - (-t).exp()).abs() < 1e-5 && z.im.abs() < 1e-6, "t={t} {z}");
    }
}

#[test]
fn cf_tail_integral_gaussian() {
    let g = normal_grid();
    let exact = (2.0 * PI).sqrt() * erfc(1.0 / 2f64.sqrt());
    let v = g.cf_tail_integral(1.0).unwrap();
    assert!((v - exact).abs() < 5e-4, "{v} vs {exact}");
    assert!((g.cf_tail_integral(0.0).unwrap() - (2.0 * PI).sqrt()).abs() < 5e-4);
    assert!(g.cf_tail_integral(1e4).is_err());
}

#[test]
fn csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let c = cauchy_grid(1.0, 20.0, 1 << 10);
    write_grid(&c, &path).unwrap();
    let back = read_grid(&path).unwrap();
    assert_eq!(back.len(), c.len());
    assert!((back.x0() - c.x0()).abs() < 1e-12);
    assert!(distance(&back, &c, Metric::Sup) < 1e-8);
    assert_eq!(back.tail_exponent(), Some(2.0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("x,value\n"));
}

#[test]
fn stable_grid_reference_matches_pointwise() {
    use crate::stable_law::{pdf, StableParams};
    let p = StableParams::symmetric(1.5, 1.0).unwrap();
    let r = StableGridReference::new(p, -20.0, 20.0, 0.01).unwrap();
    for x in [-7.3, 0.0, 0.004, 3.21, 19.9] {
        let exact = pdf(&p, x, 1e-14).unwrap().ln();
        assert!((r.ln_pdf(x) - exact).abs() < 1e-8, "x={x}");
    }
    // far out the tail expansion takes over; its leading term dominates
    let far = r.ln_pdf(1e5);
    assert!((far - r.density().asymptotic_log_pdf(1e5).unwrap()).abs() < 1e-5);
    assert!(r.window().unwrap().1 < 20.0 + 1.0);
}

fn small_source() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 256).prop_map(|mut v| {
        // smooth, compactly supported bump with random texture
        for (j, x) in v.iter_mut().enumerate() {
            let u = (j as f64 - 128.0) / 40.0;
            *x = (0.2 + *x) * (-u * u).exp();
            if !(32..224).contains(&j) {
                *x = 0.0;
            }
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn convolution_powers_compose(values in small_source(), n in 1usize..4, m in 1usize..4) {
        let p = GridDensity::from_values(-1.0, 2.0 / 255.0, values, None).unwrap();
        let direct = p.convolve_power(n + m, &tol()).unwrap();
        let split = p.convolve_power(n, &tol()).unwrap().convolve(&p.convolve_power(m, &tol()).unwrap(), &tol()).unwrap();
        prop_assert!(distance(&direct, &split, Metric::L1) < 1e-8);
    }

    #[test]
    fn entropy_under_scaling(values in small_source(), a in -3.0f64..3.0, b in 0.1f64..10.0) {
        let p = GridDensity::from_values(-1.0, 2.0 / 255.0, values, None).unwrap();
        let q = p.affine(a, b).unwrap();
        prop_assert!((q.entropy() - (p.entropy() - b.ln())).abs() < 1e-6);
    }

    #[test]
    fn entropy_power_monotone(values in small_source()) {
        let p = GridDensity::from_values(-1.0, 2.0 / 255.0, values, None).unwrap();
        let p2 = p.convolve_power(2, &tol()).unwrap();
        prop_assert!(p2.entropy() >= p.entropy() - 1e-4);
    }

    #[test]
    fn relative_entropy_nonnegative_and_identity(values in small_source(), mean in -1.0f64..1.0, var in 0.05f64..4.0) {
        let p = GridDensity::from_values(-1.0, 2.0 / 255.0, values, None).unwrap();
        let r = GaussianReference { mean, variance: var };
        let d = p.relative_entropy(&r);
        prop_assert!(d >= -1e-6);
        prop_assert!((d + p.entropy() - p.cross_entropy(&r)).abs() < 1e-6);
    }
}
