//! Analytical outage of both schemes at the default network profile.

use ntn_tilt::analysis::{Analyzer, Mode};
use ntn_tilt::antenna::AntennaPattern;
use ntn_tilt::model::{EnvironmentParams, NetworkConfig, SchemeConfig, UserType};

fn main() -> ntn_tilt::Result<()> {
    let net = NetworkConfig::default();
    let env = EnvironmentParams::default();
    let pattern = AntennaPattern::default();

    let schemes = [
        ("IS, tilt 10", SchemeConfig::inclusive(10.0)),
        ("ES, tilts 20/-20, half the BSs per group", SchemeConfig::exclusive(20.0, -20.0, 0.5)),
    ];
    for (label, scheme) in schemes {
        for mode in [Mode::General, Mode::NoiseLimited] {
            let a = Analyzer::new(net, env, pattern, scheme, mode)?;
            let g = a.user_outage(UserType::Ground)?.p;
            let au = a.user_outage(UserType::Aerial)?.p;
            let total = a.network_outage()?.p;
            println!("{label:<42} {:<14} ground {g:.5}  aerial {au:.5}  network {total:.5}", mode.label());
        }
    }
    Ok(())
}
