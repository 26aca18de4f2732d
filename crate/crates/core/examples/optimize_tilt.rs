//! Outage-minimizing tilts for IS and ES in both environments.

use ntn_tilt::analysis::Mode;
use ntn_tilt::antenna::AntennaPattern;
use ntn_tilt::model::{EnvironmentParams, NetworkConfig, SchemeConfig};
use ntn_tilt::optimizer::{optimize_tilt, TiltSearchSpec};

fn main() -> ntn_tilt::Result<()> {
    let net = NetworkConfig::default();
    let env = EnvironmentParams::default();
    let pattern = AntennaPattern::default();

    for mode in [Mode::NoiseLimited, Mode::General] {
        // A coarser ES grid keeps the general-environment search to a few seconds.
        let spec = TiltSearchSpec {
            mode,
            range: [-40.0, 40.0],
            coarse_step_2d: 5.0,
            ..TiltSearchSpec::default()
        };
        for scheme in [SchemeConfig::inclusive(0.0), SchemeConfig::exclusive(0.0, 0.0, 0.5)] {
            let opt = optimize_tilt(&scheme, &net, &env, &pattern, &spec)?;
            println!(
                "{:<14} {}: tilt_g {:>7.3}  tilt_a {:>7.3}  outage {:.5}  ({} evaluations)",
                mode.label(),
                scheme.scheme.label(),
                opt.tilt_g,
                opt.tilt_a,
                opt.outage,
                opt.trace.len()
            );
        }
    }
    Ok(())
}
