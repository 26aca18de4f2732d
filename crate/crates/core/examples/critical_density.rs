//! Density at which ES overtakes IS, for a few BS and AU heights.

use ntn_tilt::analysis::Mode;
use ntn_tilt::antenna::AntennaPattern;
use ntn_tilt::model::{EnvironmentParams, NetworkConfig};
use ntn_tilt::optimizer::{critical_bs_density, TiltSearchSpec};

fn main() -> ntn_tilt::Result<()> {
    let env = EnvironmentParams::default();
    let pattern = AntennaPattern::default();
    let spec = TiltSearchSpec {
        mode: Mode::NoiseLimited,
        ..TiltSearchSpec::default()
    };

    for h_a in [50.0, 70.0] {
        for h_b in [25.0, 40.0] {
            let net = NetworkConfig { h_a, h_b, ..NetworkConfig::default() };
            let c = critical_bs_density(&net, &env, &pattern, &spec, 0.5, [1e-6, 2e-4])?;
            println!("h_a {h_a} h_b {h_b}: lambda_c = {:.4e} BS/m^2 after {} evaluations", c.lambda_c, c.trace.len());
        }
    }

    // Where the optimized outages do not cross, the search says so.
    let net = NetworkConfig::default();
    match critical_bs_density(&net, &env, &pattern, &spec, 0.5, [1e-4, 2e-4]) {
        Err(e) => println!("narrow bracket: {e}"),
        Ok(c) => println!("narrow bracket: lambda_c = {:.4e}", c.lambda_c),
    }
    Ok(())
}
