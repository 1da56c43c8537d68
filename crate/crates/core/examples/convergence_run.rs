//! A full convergence experiment from a JSON configuration, written as CSV.

use stable_entropy::convergence_lab::{llt_check, write_rows_csv, Experiment, ExperimentConfig};

const CONFIG: &str = r#"{
  "schema_version": 1,
  "source": {"kind": "pareto", "params": {"alpha": 1.5}},
  "target": {"alpha": 1.5, "beta": 0.0, "c": 1.0, "a": 0.0},
  "n_list": [1, 2, 4, 8, 16],
  "split_b": 0.1,
  "eps": 0.25,
  "t0": 1.0,
  "grid": {"x_min": -31.984375, "x_max": 31.984375, "n_points": 2048},
  "seed": 1
}"#;

pub fn main() -> stable_entropy::Result<()> {
    let exp = Experiment::new(ExperimentConfig::from_json(CONFIG)?)?;
    println!("b_n = {:.4}·n^(1/alpha)", exp.normalizer().scale_const);
    let rows = exp.run();
    write_rows_csv(&rows, std::io::stdout())?;
    let trend = llt_check(&rows);
    println!("sup_llt final/initial {:.3}, pass {}", trend.ratio, trend.pass);
    Ok(())
}
