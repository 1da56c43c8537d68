//! Monte-Carlo oracle: sampled normalized sums, kNN entropy and the grid
//! cross-check.

use stable_entropy::convergence_lab::{Experiment, ExperimentConfig};
use stable_entropy::mc_oracle::{crosscheck, knn_entropy, sample_zn, DEFAULT_K};

const CONFIG: &str = r#"{
  "schema_version": 1,
  "source": {"kind": "uniform", "params": {"low": -1.7320508075688772, "high": 1.7320508075688772}},
  "target": {"alpha": 2.0, "beta": 0.0, "c": 0.5, "a": 0.0},
  "n_list": [4],
  "split_b": 0.1,
  "eps": 0.25,
  "t0": 1.0,
  "grid": {"x_min": -3.4607187034042215, "x_max": 3.4607187034042215, "n_points": 1024},
  "seed": 9
}"#;

pub fn main() -> stable_entropy::Result<()> {
    let exp = Experiment::new(ExperimentConfig::from_json(CONFIG)?)?;
    let source = exp.config().source;
    let z = sample_zn(|r| source.sample(r), 4, exp.normalizer(), 50_000, 9)?;
    let h = knn_entropy(&z, DEFAULT_K)?;
    println!("kNN entropy of Z_4: {:.4} ± {:.4}", h.value, h.std_error);
    let c = crosscheck(&exp, 4, 50_000, 9)?;
    println!(
        "D_4: grid {:.3e}, Monte-Carlo {:.3e} ± {:.1e} (agree: {})",
        c.grid_relative_entropy, c.mc_relative_entropy.value, c.mc_relative_entropy.std_error, c.agree
    );
    Ok(())
}
