//! Figure reproduction recipes. Each starts from the run configuration and
//! overrides only the swept or compared parameters.

use clap::ValueEnum;
use rayon::prelude::*;

use crate::analysis::{Analyzer, Mode};
use crate::association::AssociationRule;
use crate::error::{Error, Result};
use crate::model::{NetworkConfig, SchemeConfig, UserType};
use crate::optimizer::{critical_bs_density, grid_points, optimize_gbs_ratio, optimize_tilt, RatioRecord, TiltSearchSpec};
use crate::row;

use super::commands::simulator;
use super::config::RunConfig;
use super::csv::{fmt_g, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// Aerial-user outage versus AU height for random heights (Monte Carlo).
    Fig3,
    /// Per-type outage versus tilt, analysis against simulation for both rules.
    Fig4,
    /// Per-type outage versus tilt for several interferer densities.
    Fig5,
    /// IS network outage versus tilt for several BS and AU heights.
    Fig6,
    /// Optimized IS and ES outage versus the GU share for several interferer densities.
    Fig7,
    /// Optimal GBS ratio versus the GU share for several BS densities.
    Fig8,
    /// Optimal ES tilts versus the GU share for several BS densities.
    Fig9,
    /// Noise-limited optimized outage of IS, ES and a GU-only baseline.
    Fig10,
    /// Critical BS density versus BS height for several AU heights.
    Fig11,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
            Figure::Fig8 => "fig8",
            Figure::Fig9 => "fig9",
            Figure::Fig10 => "fig10",
            Figure::Fig11 => "fig11",
        }
    }
}

const DENSITIES: [f64; 3] = [5e-6, 1e-5, 2e-5];

fn user_shares() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

fn user_label(u: UserType) -> &'static str {
    match u {
        UserType::Ground => "ground",
        UserType::Aerial => "aerial",
    }
}

fn with_net(cfg: &RunConfig, net: NetworkConfig) -> RunConfig {
    RunConfig { network: net, ..cfg.clone() }
}

fn spec_for(cfg: &RunConfig, mode: Mode) -> TiltSearchSpec {
    TiltSearchSpec { mode, ..cfg.optimizer }
}

pub fn reproduce(fig: Figure, cfg: &RunConfig) -> Result<Table> {
    cfg.validate()?;
    match fig {
        Figure::Fig3 => fig3(cfg),
        Figure::Fig4 => fig4(cfg),
        Figure::Fig5 => fig5(cfg),
        Figure::Fig6 => fig6(cfg),
        Figure::Fig7 => fig7(cfg),
        Figure::Fig8 => ratio_figure(cfg, false),
        Figure::Fig9 => ratio_figure(cfg, true),
        Figure::Fig10 => fig10(cfg),
        Figure::Fig11 => fig11(cfg),
    }
}

fn fig3(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(&["lambda_b", "h_a", "delta", "method", "p", "ci_halfwidth"]);
    let scheme = cfg.scheme();
    let mode = cfg.run.mode;
    for lambda_b in DENSITIES {
        for h_a in [45.0, 55.0, 65.0, 75.0, 85.0] {
            let net = NetworkConfig { lambda_b, h_a, ..cfg.network };
            let p = Analyzer::new(net, cfg.environment, cfg.antenna, scheme, mode)?.user_outage(UserType::Aerial)?.p;
            t.push(row![lambda_b, h_a, 0.0, "analytic", p, 0.0]);
            for delta in [0.0, 5.0, 10.0] {
                let run = with_net(cfg, NetworkConfig { au_height_spread: delta, ..net });
                let e = simulator(&run, scheme, mode)?.estimate_user_outage(UserType::Aerial)?;
                t.push(row![lambda_b, h_a, delta, "monte_carlo", e.p, e.ci_halfwidth]);
            }
        }
    }
    Ok(t)
}

/// Per-type outage against the IS tilt over `[-30, 30]` in 5° steps, `κ = 0.5`.
fn fig4(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(&["user", "mode", "rule", "method", "tilt", "p", "ci_halfwidth"]);
    let base = with_net(cfg, NetworkConfig { interference_fraction: 0.5, ..cfg.network });
    let tilts = grid_points(-30.0, 30.0, 5.0);
    for user in UserType::ALL {
        for mode in [Mode::General, Mode::NoiseLimited] {
            let analytic = tilts
                .par_iter()
                .map(|&tilt| Ok(Analyzer::new(base.network, base.environment, base.antenna, SchemeConfig::inclusive(tilt), mode)?.user_outage(user)?.p))
                .collect::<Result<Vec<f64>>>()?;
            for (&tilt, p) in tilts.iter().zip(analytic) {
                t.push(row![user_label(user), mode.label(), "nearest", "analytic", tilt, p, 0.0]);
            }
            for rule in [AssociationRule::Nearest, AssociationRule::Strongest] {
                let mut run = base.clone();
                run.sim.rule = rule;
                for &tilt in &tilts {
                    let e = simulator(&run, SchemeConfig::inclusive(tilt), mode)?.estimate_user_outage(user)?;
                    t.push(row![user_label(user), mode.label(), rule.label(), "monte_carlo", tilt, e.p, e.ci_halfwidth]);
                }
            }
        }
    }
    Ok(t)
}

fn argmin_note(t: &mut Table, label: String, xs: &[f64], ps: &[f64]) {
    let mut k = 0;
    for (i, p) in ps.iter().enumerate() {
        if *p < ps[k] {
            k = i;
        }
    }
    t.note(format!("optimum {label}: tilt={} p={}", fmt_g(xs[k]), fmt_g(ps[k])));
}

fn fig5(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(&["user", "mode", "kappa", "tilt", "p"]);
    let tilts = grid_points(-60.0, 60.0, 2.0);
    let curves = [(Mode::General, 1.0), (Mode::General, 0.5), (Mode::General, 0.01), (Mode::NoiseLimited, 0.0)];
    for user in UserType::ALL {
        for (mode, kappa) in curves {
            let net = NetworkConfig { interference_fraction: kappa, ..cfg.network };
            let ps = tilts
                .par_iter()
                .map(|&tilt| Ok(Analyzer::new(net, cfg.environment, cfg.antenna, SchemeConfig::inclusive(tilt), mode)?.user_outage(user)?.p))
                .collect::<Result<Vec<f64>>>()?;
            argmin_note(&mut t, format!("user={} mode={} kappa={}", user_label(user), mode.label(), fmt_g(kappa)), &tilts, &ps);
            for (&tilt, p) in tilts.iter().zip(ps) {
                t.push(row![user_label(user), mode.label(), kappa, tilt, p]);
            }
        }
    }
    Ok(t)
}

fn fig6(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(&["kappa", "h_b", "h_a", "tilt", "p"]);
    let tilts = grid_points(-60.0, 60.0, 2.0);
    let heights = [(20.0, 50.0), (30.0, 40.0), (30.0, 50.0), (30.0, 60.0), (40.0, 50.0)];
    for kappa in [0.01, 0.5] {
        for (h_b, h_a) in heights {
            let net = NetworkConfig {
                interference_fraction: kappa,
                h_b,
                h_a,
                ..cfg.network
            };
            let ps = tilts
                .par_iter()
                .map(|&tilt| Ok(Analyzer::new(net, cfg.environment, cfg.antenna, SchemeConfig::inclusive(tilt), Mode::General)?.network_outage()?.p))
                .collect::<Result<Vec<f64>>>()?;
            argmin_note(&mut t, format!("kappa={} h_b={} h_a={}", fmt_g(kappa), fmt_g(h_b), fmt_g(h_a)), &tilts, &ps);
            for (&tilt, p) in tilts.iter().zip(ps) {
                t.push(row![kappa, h_b, h_a, tilt, p]);
            }
        }
    }
    Ok(t)
}

fn compare_schemes(cfg: &RunConfig, net: &NetworkConfig, spec: &TiltSearchSpec) -> Result<(f64, f64, RatioRecord)> {
    let is = optimize_tilt(&SchemeConfig::inclusive(0.0), net, &cfg.environment, &cfg.antenna, spec)?;
    let es = optimize_gbs_ratio(net, &cfg.environment, &cfg.antenna, spec, &cfg.ratio.grid)?;
    Ok((is.tilt_g, is.outage, es.best))
}

fn fig7(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(&["mode", "kappa", "rho_g", "scheme", "rho_bg", "tilt_g", "tilt_a", "outage"]);
    let curves = [(Mode::General, 0.1), (Mode::General, 0.05), (Mode::General, 0.01), (Mode::NoiseLimited, 0.0)];
    for (mode, kappa) in curves {
        let spec = spec_for(cfg, mode);
        for rho_g in user_shares() {
            let net = NetworkConfig {
                interference_fraction: kappa,
                rho_g,
                ..cfg.network
            };
            let (tilt, p_is, es) = compare_schemes(cfg, &net, &spec)?;
            t.push(row![mode.label(), kappa, rho_g, "is", 1.0, tilt, tilt, p_is]);
            t.push(row![mode.label(), kappa, rho_g, "es", es.rho_bg, es.tilt_g, es.tilt_a, es.outage]);
        }
    }
    Ok(t)
}

/// Nested ratio/tilt optimization over the GU share and three densities, `κ = 0.1`.
fn ratio_figure(cfg: &RunConfig, tilts: bool) -> Result<Table> {
    let mut t = if tilts {
        Table::new(&["lambda_b", "rho_g", "rho_bg", "tilt_g", "tilt_a", "outage"])
    } else {
        Table::new(&["lambda_b", "rho_g", "rho_bg", "outage"])
    };
    let spec = spec_for(cfg, cfg.run.mode);
    t.note(format!("mode: {} kappa: 0.1", cfg.run.mode.label()));
    for lambda_b in DENSITIES {
        for rho_g in user_shares() {
            let net = NetworkConfig {
                lambda_b,
                rho_g,
                interference_fraction: 0.1,
                ..cfg.network
            };
            let b = optimize_gbs_ratio(&net, &cfg.environment, &cfg.antenna, &spec, &cfg.ratio.grid)?.best;
            if tilts {
                t.push(row![lambda_b, rho_g, b.rho_bg, b.tilt_g, b.tilt_a, b.outage]);
            } else {
                t.push(row![lambda_b, rho_g, b.rho_bg, b.outage]);
            }
        }
    }
    Ok(t)
}

fn fig10(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(&["lambda_b", "rho_g", "scheme", "rho_bg", "tilt_g", "tilt_a", "outage"]);
    let spec = spec_for(cfg, Mode::NoiseLimited);
    for lambda_b in DENSITIES {
        for rho_g in user_shares() {
            let net = NetworkConfig { lambda_b, rho_g, ..cfg.network };
            let (tilt, p_is, es) = compare_schemes(cfg, &net, &spec)?;
            let ground_only = NetworkConfig { rho_g: 1.0, ..net };
            let base_tilt = optimize_tilt(&SchemeConfig::inclusive(0.0), &ground_only, &cfg.environment, &cfg.antenna, &spec)?.tilt_g;
            let p_base = Analyzer::new(net, cfg.environment, cfg.antenna, SchemeConfig::inclusive(base_tilt), Mode::NoiseLimited)?.network_outage()?.p;
            t.push(row![lambda_b, rho_g, "is", 1.0, tilt, tilt, p_is]);
            t.push(row![lambda_b, rho_g, "es", es.rho_bg, es.tilt_g, es.tilt_a, es.outage]);
            t.push(row![lambda_b, rho_g, "baseline", 1.0, base_tilt, base_tilt, p_base]);
        }
    }
    Ok(t)
}

fn fig11(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(&["h_a", "h_b", "lambda_c", "evaluations"]);
    let spec = spec_for(cfg, Mode::NoiseLimited);
    t.note(format!(
        "noise-limited; rho_bg={} bracket=[{}, {}]",
        fmt_g(cfg.scheme.rho_bg),
        fmt_g(cfg.critical.bracket[0]),
        fmt_g(cfg.critical.bracket[1])
    ));
    for h_a in [50.0, 60.0, 70.0] {
        for h_b in [25.0, 30.0, 35.0, 40.0] {
            let net = NetworkConfig { h_a, h_b, ..cfg.network };
            match critical_bs_density(&net, &cfg.environment, &cfg.antenna, &spec, cfg.scheme.rho_bg, cfg.critical.bracket) {
                Ok(c) => t.push(row![h_a, h_b, c.lambda_c, c.trace.len()]),
                Err(Error::NoSignChange { .. }) => {
                    t.note(format!("h_a={} h_b={}: no crossing inside the bracket", fmt_g(h_a), fmt_g(h_b)));
                    t.push(row![h_a, h_b, f64::NAN, 2usize]);
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(t)
}
