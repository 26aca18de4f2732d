//! Drives a TOML run description through the batch front end and prints CSV.

use ntn_tilt::cli::commands::sweep;
use ntn_tilt::cli::csv::{render, Metadata};
use ntn_tilt::cli::{Axis, MethodChoice, RunConfig};

const CONFIG: &str = r#"
[network]
lambda_b = 2e-5
rho_g = 0.7

[scheme]
scheme = "es"
tilt_g = 10
tilt_a = -10
rho_bg = 0.6

[sim]
trials = 10000
seed = 5

[sweep]
axis = "tilt_a"
start = -30
stop = 0
step = 10
"#;

fn main() -> Result<(), ntn_tilt::cli::CliError> {
    let cfg = RunConfig::from_toml(CONFIG)?;
    cfg.validate()?;
    let table = sweep(&cfg, MethodChoice::Both, Axis::TiltA, &cfg.sweep.points()?)?;
    let meta = Metadata {
        command: "sweep".into(),
        config_sha256: cfg.sha256(),
        seed: cfg.sim.seed,
    };
    print!("{}", render(&meta, &table));
    Ok(())
}
