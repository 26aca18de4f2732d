//! AU outage when UAV heights vary around the nominal altitude.

use ntn_tilt::analysis::{Analyzer, Mode};
use ntn_tilt::antenna::AntennaPattern;
use ntn_tilt::model::{EnvironmentParams, NetworkConfig, SchemeConfig, UserType};
use ntn_tilt::montecarlo::{SimConfig, Simulator};

fn main() -> ntn_tilt::Result<()> {
    let env = EnvironmentParams::default();
    let pattern = AntennaPattern::default();
    let scheme = SchemeConfig::inclusive(0.0);
    let sim = SimConfig {
        trials: 20_000,
        ..SimConfig::default()
    };

    for h_a in [50.0, 70.0] {
        let net = NetworkConfig { h_a, ..NetworkConfig::default() };
        let fixed = Analyzer::new(net, env, pattern, scheme, Mode::General)?.user_outage(UserType::Aerial)?.p;
        print!("h_a {h_a}: analytic at fixed height {fixed:.4}; simulated with spread");
        for spread in [0.0, 5.0, 10.0] {
            let n = NetworkConfig { au_height_spread: spread, ..net };
            let e = Simulator::new(n, env, pattern, scheme, sim)?.estimate_user_outage(UserType::Aerial)?;
            print!("  +/-{spread}: {:.4}", e.p);
        }
        println!();
    }
    Ok(())
}
