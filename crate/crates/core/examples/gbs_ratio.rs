//! Best split of BSs between ground and aerial service as the user mix changes.

use ntn_tilt::analysis::Mode;
use ntn_tilt::antenna::AntennaPattern;
use ntn_tilt::model::{EnvironmentParams, NetworkConfig, SchemeConfig};
use ntn_tilt::optimizer::{optimize_gbs_ratio, optimize_tilt, TiltSearchSpec};

fn main() -> ntn_tilt::Result<()> {
    let env = EnvironmentParams::default();
    let pattern = AntennaPattern::default();
    let spec = TiltSearchSpec {
        mode: Mode::NoiseLimited,
        ..TiltSearchSpec::default()
    };
    let grid: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();

    for lambda_b in [5e-6, 2e-5] {
        println!("lambda_b = {lambda_b:e}");
        for rho_g in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let net = NetworkConfig { lambda_b, rho_g, ..NetworkConfig::default() };
            let es = optimize_gbs_ratio(&net, &env, &pattern, &spec, &grid)?.best;
            let is = optimize_tilt(&SchemeConfig::inclusive(0.0), &net, &env, &pattern, &spec)?;
            println!(
                "  rho_g {rho_g}: ES rho_bg {:.1} tilts ({:6.2}, {:6.2}) outage {:.5} | IS tilt {:6.2} outage {:.5}",
                es.rho_bg, es.tilt_g, es.tilt_a, es.outage, is.tilt_g, is.outage
            );
        }
    }
    Ok(())
}
