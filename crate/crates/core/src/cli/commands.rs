//! Single evaluations, sweeps and optimizations driven by a [`RunConfig`].

use rayon::prelude::*;

use crate::analysis::{Analyzer, Method, Mode, OutageEstimate};
use crate::association::AssociationRule;
use crate::error::{Error, Result};
use crate::model::{LinkClass, NetworkConfig, SchemeConfig, Tier, UserType};
use crate::montecarlo::Simulator;
use crate::optimizer::{critical_bs_density, optimize_gbs_ratio, optimize_tilt, TiltSearchSpec};
use crate::row;

use super::config::{Axis, MethodChoice, RunConfig};
use super::csv::{fmt_g, Table};

/// Ground, aerial and network outage from one estimator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Outcome {
    pub method: Method,
    pub ground: OutageEstimate,
    pub aerial: OutageEstimate,
    pub network: OutageEstimate,
}

impl Outcome {
    pub fn by_user(&self) -> [(&'static str, OutageEstimate); 3] {
        [("ground", self.ground), ("aerial", self.aerial), ("network", self.network)]
    }
}

/// Network seen by the simulator: noise-limited runs drop all interferers.
pub fn sim_network(net: &NetworkConfig, mode: Mode) -> NetworkConfig {
    match mode {
        Mode::General => *net,
        Mode::NoiseLimited => NetworkConfig {
            interference_fraction: 0.0,
            ..*net
        },
    }
}

pub fn analytic_outcome(cfg: &RunConfig, scheme: SchemeConfig, mode: Mode) -> Result<Outcome> {
    if cfg.sim.rule == AssociationRule::Strongest {
        return Err(Error::UnsupportedAnalytic);
    }
    let a = Analyzer::new(cfg.network, cfg.environment, cfg.antenna, scheme, mode)?;
    Ok(Outcome {
        method: Method::Analytic,
        ground: a.user_outage(UserType::Ground)?,
        aerial: a.user_outage(UserType::Aerial)?,
        network: a.network_outage()?,
    })
}

pub fn simulator(cfg: &RunConfig, scheme: SchemeConfig, mode: Mode) -> Result<Simulator> {
    Simulator::new(sim_network(&cfg.network, mode), cfg.environment, cfg.antenna, scheme, cfg.sim)
}

pub fn mc_outcome(cfg: &RunConfig, scheme: SchemeConfig, mode: Mode) -> Result<Outcome> {
    let s = simulator(cfg, scheme, mode)?;
    Ok(Outcome {
        method: Method::MonteCarlo,
        ground: s.estimate_user_outage(UserType::Ground)?,
        aerial: s.estimate_user_outage(UserType::Aerial)?,
        network: s.estimate_outage()?,
    })
}

pub fn outcomes(cfg: &RunConfig, method: MethodChoice) -> Result<Vec<Outcome>> {
    cfg.validate()?;
    let scheme = cfg.scheme();
    let mut out = Vec::new();
    if method.analytic() {
        out.push(analytic_outcome(cfg, scheme, cfg.run.mode)?);
    }
    if method.monte_carlo() {
        out.push(mc_outcome(cfg, scheme, cfg.run.mode)?);
    }
    Ok(out)
}

pub fn outage(cfg: &RunConfig, method: MethodChoice) -> Result<Table> {
    let mut t = Table::new(&["scheme", "tilt_g", "tilt_a", "rho_bg", "mode", "method", "rule", "user", "p", "ci_halfwidth"]);
    let s = cfg.scheme();
    for o in outcomes(cfg, method)? {
        for (user, e) in o.by_user() {
            t.push(row![s.scheme.label(), s.tilt_g, s.tilt_a, s.rho_bg, cfg.run.mode.label(), o.method.to_string(), cfg.sim.rule.label(), user, e.p, e.ci_halfwidth]);
        }
    }
    Ok(t)
}

pub fn sweep_table(axis: Axis) -> Table {
    Table::new(&[axis.name(), "method", "ground", "aerial", "network", "ci_ground", "ci_aerial", "ci_network"])
}

/// One row per point and method, in axis order.
pub fn sweep(cfg: &RunConfig, method: MethodChoice, axis: Axis, points: &[f64]) -> Result<Table> {
    let per_point = points
        .par_iter()
        .map(|&v| outcomes(&axis.apply(cfg, v), method).map_err(|e| e.in_context(format!("{} = {}", axis.name(), fmt_g(v)))))
        .collect::<Result<Vec<_>>>()?;
    let mut t = sweep_table(axis);
    for (&v, outs) in points.iter().zip(per_point) {
        for o in outs {
            t.push(row![v, o.method.to_string(), o.ground.p, o.aerial.p, o.network.p, o.ground.ci_halfwidth, o.aerial.ci_halfwidth, o.network.ci_halfwidth]);
        }
    }
    Ok(t)
}

fn describe_spec(spec: &TiltSearchSpec) -> String {
    let objective = match spec.objective {
        crate::optimizer::Objective::Analytic => "analytic".to_string(),
        crate::optimizer::Objective::MonteCarlo(sim) => format!("monte_carlo(trials={}, seed={})", sim.trials, sim.seed),
    };
    format!(
        "search: range=[{}, {}] coarse_step={} coarse_step_2d={} refine_iters={} mode={} objective={}",
        fmt_g(spec.range[0]),
        fmt_g(spec.range[1]),
        fmt_g(spec.coarse_step),
        fmt_g(spec.coarse_step_2d),
        spec.refine_iters,
        spec.mode.label(),
        objective
    )
}

pub fn optimize(cfg: &RunConfig, method: MethodChoice) -> Result<Table> {
    cfg.validate()?;
    let spec = cfg.search_spec(method)?;
    let scheme = cfg.scheme();
    let opt = optimize_tilt(&scheme, &cfg.network, &cfg.environment, &cfg.antenna, &spec)?;
    let mut t = Table::new(&["iteration", "stage", "tilt_g", "tilt_a", "outage"]);
    t.note(describe_spec(&spec));
    t.note(format!(
        "optimum: scheme={} tilt_g={} tilt_a={} rho_bg={} outage={}",
        scheme.scheme.label(),
        fmt_g(opt.tilt_g),
        fmt_g(opt.tilt_a),
        fmt_g(scheme.rho_bg),
        fmt_g(opt.outage)
    ));
    for e in &opt.trace {
        t.push(row![e.iteration, e.stage.label(), e.tilt_g, e.tilt_a, e.outage]);
    }
    t.push(row![opt.trace.len(), "optimum", opt.tilt_g, opt.tilt_a, opt.outage]);
    Ok(t)
}

pub fn optimize_ratio(cfg: &RunConfig, method: MethodChoice) -> Result<Table> {
    cfg.validate()?;
    let spec = cfg.search_spec(method)?;
    let opt = optimize_gbs_ratio(&cfg.network, &cfg.environment, &cfg.antenna, &spec, &cfg.ratio.grid)?;
    let mut t = Table::new(&["kind", "rho_bg", "tilt_g", "tilt_a", "outage"]);
    t.note(describe_spec(&spec));
    let b = opt.best;
    t.note(format!(
        "optimum: rho_bg={} tilt_g={} tilt_a={} outage={}",
        fmt_g(b.rho_bg),
        fmt_g(b.tilt_g),
        fmt_g(b.tilt_a),
        fmt_g(b.outage)
    ));
    for r in &opt.records {
        t.push(row!["record", r.rho_bg, r.tilt_g, r.tilt_a, r.outage]);
    }
    t.push(row!["optimum", b.rho_bg, b.tilt_g, b.tilt_a, b.outage]);
    Ok(t)
}

pub fn critical_density(cfg: &RunConfig, method: MethodChoice, bracket: [f64; 2]) -> Result<Table> {
    cfg.validate()?;
    let spec = cfg.search_spec(method)?;
    let c = critical_bs_density(&cfg.network, &cfg.environment, &cfg.antenna, &spec, cfg.scheme.rho_bg, bracket)?;
    let mut t = Table::new(&["iteration", "lambda_b", "outage_is", "outage_es", "delta"]);
    t.note(describe_spec(&spec));
    t.note(format!(
        "critical density: lambda_c={} bracket=[{}, {}] rho_bg={} evaluations={}",
        fmt_g(c.lambda_c),
        fmt_g(bracket[0]),
        fmt_g(bracket[1]),
        fmt_g(cfg.scheme.rho_bg),
        c.trace.len()
    ));
    for s in &c.trace {
        t.push(row![s.iteration, s.lambda_b, s.outage_is, s.outage_es, s.delta()]);
    }
    Ok(t)
}

pub fn montecarlo(cfg: &RunConfig) -> Result<Table> {
    cfg.validate()?;
    let s = simulator(cfg, cfg.scheme(), cfg.run.mode)?;
    let mut columns = vec!["user", "p", "ci_halfwidth", "trials", "outages", "unserved"];
    let names: Vec<String> = LinkClass::ALL
        .iter()
        .flat_map(|l| Tier::ALL.iter().map(move |j| format!("assoc_{}_{}", l.label().to_lowercase(), j.number())))
        .collect();
    columns.extend(names.iter().map(String::as_str));
    let mut t = Table::new(&columns);
    t.note(format!("rule: {} r_max: {}", cfg.sim.rule.label(), fmt_g(s.r_max)));
    for (label, user) in [("ground", Some(UserType::Ground)), ("aerial", Some(UserType::Aerial)), ("network", None)] {
        let tally = s.tally(user)?;
        let e = tally.estimate();
        let mut r = row![label, e.p, e.ci_halfwidth, tally.trials, tally.outages, tally.unserved];
        for l in LinkClass::ALL {
            for j in Tier::ALL {
                r.push(tally.association_frequency(l, j).into());
            }
        }
        t.push(r);
    }
    Ok(t)
}
