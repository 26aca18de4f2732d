//! Simulated outage next to the analysis, with confidence intervals and
//! which kind of BS ends up serving.

use ntn_tilt::analysis::{Analyzer, Mode, UserContext};
use ntn_tilt::antenna::AntennaPattern;
use ntn_tilt::association::AssociationRule;
use ntn_tilt::model::{EnvironmentParams, LinkClass, NetworkConfig, SchemeConfig, Tier, UserType};
use ntn_tilt::montecarlo::{SimConfig, Simulator};

fn main() -> ntn_tilt::Result<()> {
    let net = NetworkConfig::default();
    let env = EnvironmentParams::default();
    let pattern = AntennaPattern::default();
    let scheme = SchemeConfig::exclusive(15.0, -15.0, 0.5);
    let sim = SimConfig {
        trials: 50_000,
        seed: 3,
        ..SimConfig::default()
    };

    let analyzer = Analyzer::new(net, env, pattern, scheme, Mode::General)?;
    let simulator = Simulator::new(net, env, pattern, scheme, sim)?;
    for user in UserType::ALL {
        let a = analyzer.user_outage(user)?.p;
        let tally = simulator.tally(Some(user))?;
        let e = tally.estimate();
        println!("{:<7} analytic {a:.5}  simulated {:.5} +/- {:.5}", user.label(), e.p, e.ci_halfwidth);
        for link in LinkClass::ALL {
            for tier in Tier::ALL {
                let f = tally.association_frequency(link, tier);
                if f > 0.0 {
                    println!("         served by {} tier {}: {f:.4}", link.label(), tier.number());
                }
            }
        }
    }

    let strongest = Simulator::new(net, env, pattern, scheme, SimConfig { rule: AssociationRule::Strongest, ..sim })?;
    println!("network outage, strongest-BS association: {:.5}", strongest.estimate_outage()?.p);

    // Interference seen by a GU served from 120 m away.
    let ctx = UserContext::new(UserType::Ground, &scheme, &net, &env, &pattern, Mode::General)?;
    let zs = [1e6, 1e7, 1e8];
    let empirical = simulator.empirical_laplace(UserType::Ground, 120.0, &zs)?;
    for (z, e) in zs.iter().zip(empirical) {
        println!("E[exp(-zI)] at z = {z:e}: analytic {:.4}  simulated {e:.4}", ctx.total_exponent(*z, 0, 120.0)?.transform());
    }
    Ok(())
}
