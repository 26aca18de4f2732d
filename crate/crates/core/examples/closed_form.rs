//! Simplified-gain closed form in an all-NLoS, noise-limited network.

use ntn_tilt::analysis::{closed_form_outage_published, closed_form_outage_simplified, network_outage, simplified_outage_quadrature, Mode};
use ntn_tilt::antenna::AntennaPattern;
use ntn_tilt::model::{EnvironmentParams, LosModel, NetworkConfig, SchemeConfig};

fn main() -> ntn_tilt::Result<()> {
    let net = NetworkConfig { noise: 1e-12, ..NetworkConfig::default() };
    let env = EnvironmentParams {
        los_model: LosModel::NlosOnly,
        alpha_nlos: 4.0,
        ..EnvironmentParams::default()
    };
    let (side, main) = (0.01, 1.0);
    let pattern = AntennaPattern::simplified(side, main);

    for scheme in [SchemeConfig::inclusive(10.0), SchemeConfig::exclusive(20.0, -20.0, 0.4)] {
        let closed = closed_form_outage_simplified(&scheme, &net, &pattern, side, main)?;
        let quad = simplified_outage_quadrature(&scheme, &net, &pattern, side, main)?;
        let engine = network_outage(&scheme, &net, &env, &pattern, Mode::NoiseLimited)?.p;
        println!("{}: closed form {closed:.9}  quadrature {quad:.9}  engine {engine:.9}", scheme.scheme.label());
    }

    // The printed prefactor overflows once the height gap is realistic.
    let printed = closed_form_outage_published(&SchemeConfig::inclusive(10.0), &net, &pattern, side, main)?;
    println!("printed form at default heights: {printed}");
    Ok(())
}
