use super::*;
use crate::grid_density::{distance, Metric};
use crate::stable_law::StableParams;

fn cfg_json(source: &str, target: &str, grid: &str, extra: &str) -> String {
    format!(
        r#"{{"schema_version": 1, "source": {source}, "target": {target}, "n_list": [1, 2, 4],
            "split_b": 0.1, "eps": 0.25, "t0": 1.0, "grid": {grid}, "seed": 7{extra}}}"#
    )
}

const NORMAL: &str = r#"{"alpha": 2.0, "beta": 0.0, "c": 0.5, "a": 0.0}"#;

fn uniform_grid(n_points: usize) -> GridSpec {
    // cell edges land on ±√3
    let dx = 3f64.sqrt() * 4.0 / n_points as f64;
    let x_min = -2.0 * 3f64.sqrt() + 0.5 * dx;
    GridSpec { x_min, x_max: x_min + (n_points - 1) as f64 * dx, n_points }
}

#[test]
fn cauchy_is_a_fixed_point_of_zn() {
    let p = StableParams::cauchy();
    let source = GridDensity::from_stable(&p, -100.0, 100.0, 1 << 12).unwrap();
    let norm = NormalizerSequence::new(1.0, 1.0, Centering::Zero, 0.0).unwrap();
    let z4 = zn_density(&source, 4, &norm, &Tolerances::default()).unwrap();
    let target = Target::new(p).unwrap();
    assert!((z4.mass() - 1.0).abs() < 1e-6);
    let gap = target.sup_gap(&z4);
    assert!(gap < 1e-5, "{gap}");
}

#[test]
fn uniform_pair_sum_is_the_unit_variance_triangle() {
    let src = SourceSpec::Uniform { low: -3f64.sqrt(), high: 3f64.sqrt() };
    let source = src.density(&uniform_grid(1024)).unwrap();
    let norm = NormalizerSequence::new(2.0, 1.0, Centering::Zero, 0.0).unwrap();
    let z2 = zn_density(&source, 2, &norm, &Tolerances::default()).unwrap();
    assert!((z2.variance().unwrap() - 1.0).abs() < 1e-5);
    let r6 = 6f64.sqrt();
    let tri = GridDensity::from_function(move |x| ((r6 - x.abs()) / 6.0).max(0.0), -4.0, 4.0, 1 << 12).unwrap();
    let tri = tri.project(z2.x0(), z2.dx(), z2.len()).unwrap();
    assert!(distance(&z2, &tri, Metric::Sup) < 1e-3);
}

#[test]
fn pareto_sum_keeps_the_tail_exponent() {
    let src = SourceSpec::Pareto { alpha: 1.5 };
    let source = src.density(&GridSpec { x_min: -64.0 + 1.0 / 64.0, x_max: 64.0 - 1.0 / 64.0, n_points: 1 << 12 }).unwrap();
    let cfg = ExperimentConfig::from_json(&cfg_json(
        r#"{"kind": "pareto", "params": {"alpha": 1.5}}"#,
        r#"{"alpha": 1.5, "beta": 0.0, "c": 1.0, "a": 0.0}"#,
        r#"{"x_min": -64, "x_max": 64, "n_points": 4096}"#,
        "",
    ))
    .unwrap();
    let norm = NormalizerSequence::from_config(&cfg).unwrap();
    assert!((norm.scale_const - 1.8455).abs() < 1e-3, "{}", norm.scale_const);
    let z8 = zn_density(&source, 8, &norm, &Tolerances::default()).unwrap();
    let g = fit_tail_exponent(&z8, 0.3 * z8.x_max()).unwrap();
    assert!((g - 2.5).abs() < 0.1, "{g}");
}

#[test]
fn normalizer_constants() {
    let u = ExperimentConfig::from_json(&cfg_json(
        r#"{"kind": "uniform", "params": {"low": 0.0, "high": 1.0}}"#,
        NORMAL,
        r#"{"x_min": -1, "x_max": 2, "n_points": 1024}"#,
        r#", "normalizer": {"centering": "mean_shift"}"#,
    ))
    .unwrap();
    let norm = NormalizerSequence::from_config(&u).unwrap();
    let (a4, b4) = norm.at(4);
    assert!((b4 - 2.0 * (1.0f64 / 12.0).sqrt()).abs() < 1e-15);
    assert!((a4 - 4.0 * 0.5 / b4).abs() < 1e-15);

    let s = ExperimentConfig::from_json(&cfg_json(
        r#"{"kind": "stable", "params": {"alpha": 1.5, "beta": 0.0, "c": 1.0, "a": 0.0}}"#,
        r#"{"alpha": 1.5, "beta": 0.0, "c": 1.0, "a": 0.0}"#,
        r#"{"x_min": -50, "x_max": 50, "n_points": 1024}"#,
        "",
    ))
    .unwrap();
    assert_eq!(NormalizerSequence::from_config(&s).unwrap().scale_const, 1.0);

    let bad = ExperimentConfig::from_json(&cfg_json(
        r#"{"kind": "uniform", "params": {"low": 0.0, "high": 1.0}}"#,
        r#"{"alpha": 1.5, "beta": 0.0, "c": 1.0, "a": 0.0}"#,
        r#"{"x_min": -1, "x_max": 2, "n_points": 1024}"#,
        "",
    ))
    .unwrap();
    assert!(matches!(NormalizerSequence::from_config(&bad), Err(Error::Config(_))));
}

#[test]
fn config_rejects_unknown_fields_and_bad_values() {
    let grid = r#"{"x_min": -1, "x_max": 2, "n_points": 1024}"#;
    let src = r#"{"kind": "uniform", "params": {"low": 0.0, "high": 1.0}}"#;
    assert!(ExperimentConfig::from_json(&cfg_json(src, NORMAL, grid, r#", "colour": 1"#)).is_err());
    let wrong_version = cfg_json(src, NORMAL, grid, "").replace("\"schema_version\": 1", "\"schema_version\": 2");
    assert!(matches!(ExperimentConfig::from_json(&wrong_version), Err(Error::Config(_))));
    let bad_b = cfg_json(src, NORMAL, grid, "").replace("0.1", "0.7");
    assert!(matches!(ExperimentConfig::from_json(&bad_b), Err(Error::Config(_))));
    let bad_grid = cfg_json(src, NORMAL, r#"{"x_min": -1, "x_max": 2, "n_points": 1000}"#, "");
    assert!(matches!(ExperimentConfig::from_json(&bad_grid), Err(Error::Config(_))));
    let bad_eps = cfg_json(src, r#"{"alpha": 1.5, "beta": 0.0, "c": 1.0, "a": 0.0}"#, grid, "")
        .replace("\"eps\": 0.25", "\"eps\": 0.7");
    assert!(matches!(ExperimentConfig::from_json(&bad_eps), Err(Error::Config(_))));
}

#[test]
fn envelope_of_the_normal_law() {
    let phi = GridDensity::from_stable(&StableParams::standard_normal(), -10.0, 10.0, 1 << 10).unwrap();
    let norm = NormalizerSequence::new(2.0, 1.0, Centering::Zero, 0.0).unwrap();
    let env = cf_envelope_check(&phi, &norm, 1, 2.0).unwrap();
    assert!(env.ok && !env.band_truncated);
    // min of (t²/2)/t on [2e-3, 2] sits at the left end
    assert!((env.c_fit - 1e-3).abs() < 1e-6, "{}", env.c_fit);
    assert!(cf_envelope_check(&phi, &norm, 1, 1e3).unwrap().band_truncated);
}

#[test]
fn small_uniform_run() {
    let cfg = ExperimentConfig {
        schema_version: 1,
        source: SourceSpec::Uniform { low: -3f64.sqrt(), high: 3f64.sqrt() },
        target: StableParams::standard_normal(),
        n_list: vec![4, 1, 2, 8],
        split_b: 0.1,
        eps: 0.25,
        t0: 1.0,
        grid: uniform_grid(512),
        seed: 1,
        normalizer: NormalizerSpec::default(),
    };
    let rows = run_convergence(&cfg).unwrap();
    assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![1, 2, 4, 8]);
    // D(U‖N) = ½log(2πe) - log(2√3), up to the midpoint-rule error of the
    // cell-averaged grid
    let d1 = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln() - (2.0 * 3f64.sqrt()).ln();
    assert!((rows[0].d_n - d1).abs() < 5e-5, "{} vs {d1}", rows[0].d_n);
    for r in &rows {
        assert!(r.error.is_none(), "{:?}", r.error);
        assert!(r.d_n > 0.0 && r.convexity_ok && r.cf_envelope_ok);
        assert!(r.bound_6_3 >= r.d_tilde_n - 1e-6, "{r:?}");
    }
    assert!(rows.windows(2).all(|w| w[1].d_n < w[0].d_n));
    assert!(lemma_4_1_check(&rows[3], 8, &Tolerances::default()));

    let mut buf = Vec::new();
    write_rows_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("n,D_n,D_tilde_n,sup_llt,bound_6_3,lemma41_gap,cf_envelope_ok\n"));
    let back = read_rows_csv(buf.as_slice()).unwrap();
    for (a, b) in rows.iter().zip(&back) {
        assert_eq!(a.n, b.n);
        assert!((a.d_n - b.d_n).abs() <= 1e-8 * a.d_n.abs());
    }
}

#[test]
fn trend_rules() {
    let row = |n: usize, v: f64| ConvergenceRow { sup_llt: v, d_n: v, ..ConvergenceRow::failed(n, &NormalizerSequence::new(2.0, 1.0, Centering::Zero, 0.0).unwrap(), 0.1, &Error::invalid("x")) };
    let good: Vec<_> = [(1, 1.0), (2, 0.5), (4, 0.52), (8, 0.05)].iter().map(|&(n, v)| row(n, v)).collect();
    assert!(llt_check(&good).pass);
    let bump: Vec<_> = [(1, 1.0), (2, 0.5), (4, 0.6), (8, 0.05)].iter().map(|&(n, v)| row(n, v)).collect();
    assert_eq!(llt_check(&bump).violations, vec![4]);
    let floor: Vec<_> = [(1, 1e-7), (2, 3e-6), (4, 2e-7), (8, 1e-7)].iter().map(|&(n, v)| row(n, v)).collect();
    assert!(llt_check(&floor).pass);
    assert!(!llt_check(&good[..3]).pass);
}
