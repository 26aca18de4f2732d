//! Per-type outage against the IS tilt, with the best tilt of each curve.

use ntn_tilt::analysis::{Analyzer, Mode};
use ntn_tilt::antenna::{main_lobe_boundaries, AntennaPattern};
use ntn_tilt::model::{EnvironmentParams, NetworkConfig, SchemeConfig, UserType};
use ntn_tilt::optimizer::grid_points;

fn main() -> ntn_tilt::Result<()> {
    let net = NetworkConfig::default();
    let env = EnvironmentParams::default();
    let pattern = AntennaPattern::default();

    println!("{:>6} {:>9} {:>9} {:>9}   main lobe (GU)", "tilt", "ground", "aerial", "network");
    let mut best = [(f64::NAN, 1.0); 3];
    for tilt in grid_points(-40.0, 40.0, 5.0) {
        let a = Analyzer::new(net, env, pattern, SchemeConfig::inclusive(tilt), Mode::General)?;
        let ps = [a.user_outage(UserType::Ground)?.p, a.user_outage(UserType::Aerial)?.p, a.network_outage()?.p];
        for (b, &p) in best.iter_mut().zip(&ps) {
            if p < b.1 {
                *b = (tilt, p);
            }
        }
        let lobe = main_lobe_boundaries(tilt, UserType::Ground, &net, &pattern);
        println!(
            "{tilt:>6} {:>9.5} {:>9.5} {:>9.5}   [{:.1}, {:.1}] m",
            ps[0],
            ps[1],
            ps[2],
            lobe.r_lb(),
            lobe.r_ub()
        );
    }
    for (label, (tilt, p)) in ["ground", "aerial", "network"].iter().zip(best) {
        println!("best {label:<8} tilt {tilt:>4}  outage {p:.5}");
    }
    Ok(())
}
