//! Tilt, GBS-ratio and critical-density searches.
//!
//! Tilts are found by an exhaustive coarse grid followed by golden-section
//! refinement inside the best grid cell, since the outage is multimodal in the
//! tilt. Every objective evaluation is recorded in a trace.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{Analyzer, Mode};
use crate::antenna::AntennaPattern;
use crate::error::{Error, Result};
use crate::model::{EnvironmentParams, NetworkConfig, Scheme, SchemeConfig, UserType};
use crate::montecarlo::{SimConfig, Simulator};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Relative width at which the density bisection stops.
pub const DENSITY_REL_WIDTH: f64 = 0.01;

/// Source of objective values.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    #[default]
    Analytic,
    /// Monte Carlo estimates; the fixed seed gives common random numbers across tilts.
    MonteCarlo(SimConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TiltSearchSpec {
    /// Search interval in degrees.
    pub range: [f64; 2],
    pub coarse_step: f64,
    /// Grid step of the joint (θ_G, θ_A) search for ES with interference.
    pub coarse_step_2d: f64,
    pub refine_iters: u32,
    #[serde(skip)]
    pub mode: Mode,
    #[serde(skip)]
    pub objective: Objective,
}

impl Default for TiltSearchSpec {
    fn default() -> Self {
        Self {
            range: [-60.0, 60.0],
            coarse_step: 0.5,
            coarse_step_2d: 4.0,
            refine_iters: 20,
            mode: Mode::General,
            objective: Objective::Analytic,
        }
    }
}

impl TiltSearchSpec {
    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.range;
        if !(lo > -90.0 && hi < 90.0 && lo <= hi) {
            return Err(Error::invalid("optimizer.range", "must satisfy -90 < lo <= hi < 90"));
        }
        if !(self.coarse_step > 0.0 && self.coarse_step.is_finite()) {
            return Err(Error::invalid("optimizer.coarse_step", "must be positive"));
        }
        if !(self.coarse_step_2d > 0.0 && self.coarse_step_2d.is_finite()) {
            return Err(Error::invalid("optimizer.coarse_step_2d", "must be positive"));
        }
        Ok(())
    }

    pub fn grid(&self, step: f64) -> Vec<f64> {
        grid_points(self.range[0], self.range[1], step)
    }
}

/// Points `lo, lo + step, …` up to `hi`, with `hi` always included.
pub fn grid_points(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut pts: Vec<f64> = (0..=n).map(|i| lo + i as f64 * step).collect();
    if hi - pts[n] > 1e-9 * step.max(1.0) {
        pts.push(hi);
    }
    pts
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Grid,
    Refine,
}

impl Stage {
    pub fn label(self) -> &'static str {
        match self {
            Stage::Grid => "grid",
            Stage::Refine => "refine",
        }
    }
}

/// One objective evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceEntry {
    pub iteration: usize,
    pub stage: Stage,
    pub tilt_g: f64,
    pub tilt_a: f64,
    pub outage: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TiltOptimum {
    pub scheme: Scheme,
    pub tilt_g: f64,
    pub tilt_a: f64,
    pub outage: f64,
    pub trace: Vec<TraceEntry>,
}

impl TiltOptimum {
    pub fn scheme_config(&self, rho_bg: f64) -> SchemeConfig {
        match self.scheme {
            Scheme::Inclusive => SchemeConfig::inclusive(self.tilt_g),
            Scheme::Exclusive => SchemeConfig::exclusive(self.tilt_g, self.tilt_a, rho_bg),
        }
    }
}

struct Evaluator<'a> {
    net: &'a NetworkConfig,
    env: &'a EnvironmentParams,
    pattern: &'a AntennaPattern,
    spec: &'a TiltSearchSpec,
}

impl Evaluator<'_> {
    fn simulator(&self, scheme: SchemeConfig, sim: SimConfig) -> Result<Simulator> {
        let mut net = *self.net;
        if self.spec.mode == Mode::NoiseLimited {
            net.interference_fraction = 0.0;
        }
        Simulator::new(net, *self.env, *self.pattern, scheme, sim)
    }

    fn network(&self, scheme: SchemeConfig) -> Result<f64> {
        match self.spec.objective {
            Objective::Analytic => Ok(Analyzer::new(*self.net, *self.env, *self.pattern, scheme, self.spec.mode)?.network_outage()?.p),
            Objective::MonteCarlo(sim) => Ok(self.simulator(scheme, sim)?.estimate_outage()?.p),
        }
    }

    fn user(&self, user: UserType, scheme: SchemeConfig) -> Result<f64> {
        match self.spec.objective {
            Objective::Analytic => Ok(Analyzer::new(*self.net, *self.env, *self.pattern, scheme, self.spec.mode)?.user_outage(user)?.p),
            Objective::MonteCarlo(sim) => Ok(self.simulator(scheme, sim)?.estimate_user_outage(user)?.p),
        }
    }
}

/// Result of a one-dimensional search together with its evaluations `(x, f, stage)`.
struct Line {
    x: f64,
    f: f64,
    evals: Vec<(f64, f64, Stage)>,
}

fn argmin(vals: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in vals.iter().enumerate() {
        if *v < vals[best] {
            best = i;
        }
    }
    best
}

/// Grid over `[lo, hi]` followed by golden-section refinement inside the best cell.
fn line_search<F>(lo: f64, hi: f64, step: f64, iters: u32, f: F) -> Result<Line>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let grid = grid_points(lo, hi, step);
    let vals = grid.par_iter().map(|&x| f(x)).collect::<Result<Vec<f64>>>()?;
    let mut evals: Vec<(f64, f64, Stage)> = grid.iter().zip(&vals).map(|(&x, &v)| (x, v, Stage::Grid)).collect();
    let i = argmin(&vals);
    let (mut best_x, mut best_f) = (grid[i], vals[i]);
    let mut a = grid[i.saturating_sub(1)];
    let mut b = grid[(i + 1).min(grid.len() - 1)];
    if b > a && iters > 0 {
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let mut fc = f(c)?;
        let mut fd = f(d)?;
        evals.push((c, fc, Stage::Refine));
        evals.push((d, fd, Stage::Refine));
        for _ in 2..iters.max(2) {
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = f(c)?;
                evals.push((c, fc, Stage::Refine));
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = f(d)?;
                evals.push((d, fd, Stage::Refine));
            }
        }
        for &(x, v, stage) in &evals {
            if stage == Stage::Refine && v < best_f {
                best_x = x;
                best_f = v;
            }
        }
    }
    Ok(Line { x: best_x, f: best_f, evals })
}

fn push_trace(trace: &mut Vec<TraceEntry>, evals: &[(f64, f64, Stage)], map: impl Fn(f64) -> (f64, f64)) {
    for &(x, v, stage) in evals {
        let (tilt_g, tilt_a) = map(x);
        trace.push(TraceEntry {
            iteration: trace.len(),
            stage,
            tilt_g,
            tilt_a,
            outage: v,
        });
    }
}

/// Outage-minimizing tilts. For IS the single tilt is reported in both fields;
/// for ES the GBS ratio of `scheme` is held fixed.
pub fn optimize_tilt(scheme: &SchemeConfig, net: &NetworkConfig, env: &EnvironmentParams, pattern: &AntennaPattern, spec: &TiltSearchSpec) -> Result<TiltOptimum> {
    spec.validate()?;
    net.validate()?;
    scheme.validate()?;
    let ev = Evaluator { net, env, pattern, spec };
    let [lo, hi] = spec.range;
    let iters = spec.refine_iters;
    let mut trace = Vec::new();
    match scheme.scheme {
        Scheme::Inclusive => {
            let line = line_search(lo, hi, spec.coarse_step, iters, |t| ev.network(SchemeConfig::inclusive(t)))?;
            push_trace(&mut trace, &line.evals, |t| (t, t));
            Ok(TiltOptimum {
                scheme: Scheme::Inclusive,
                tilt_g: line.x,
                tilt_a: line.x,
                outage: line.f,
                trace,
            })
        }
        Scheme::Exclusive if spec.mode == Mode::NoiseLimited => {
            // Without interference each user type only sees its own tilt.
            let rho = scheme.rho_bg;
            let g = line_search(lo, hi, spec.coarse_step, iters, |t| ev.user(UserType::Ground, SchemeConfig::exclusive(t, scheme.tilt_a, rho)))?;
            push_trace(&mut trace, &g.evals, |t| (t, scheme.tilt_a));
            let a = line_search(lo, hi, spec.coarse_step, iters, |t| ev.user(UserType::Aerial, SchemeConfig::exclusive(g.x, t, rho)))?;
            push_trace(&mut trace, &a.evals, |t| (g.x, t));
            let outage = net.user_share(UserType::Ground) * g.f + net.user_share(UserType::Aerial) * a.f;
            Ok(TiltOptimum {
                scheme: Scheme::Exclusive,
                tilt_g: g.x,
                tilt_a: a.x,
                outage,
                trace,
            })
        }
        Scheme::Exclusive => optimize_es_joint(scheme.rho_bg, &ev, trace),
    }
}

fn optimize_es_joint(rho: f64, ev: &Evaluator, mut trace: Vec<TraceEntry>) -> Result<TiltOptimum> {
    let spec = ev.spec;
    let [lo, hi] = spec.range;
    let grid = spec.grid(spec.coarse_step_2d);
    let pairs: Vec<(f64, f64)> = grid.iter().flat_map(|&g| grid.iter().map(move |&a| (g, a))).collect();
    let vals = pairs.par_iter().map(|&(g, a)| ev.network(SchemeConfig::exclusive(g, a, rho))).collect::<Result<Vec<f64>>>()?;
    for (&(g, a), &v) in pairs.iter().zip(&vals) {
        trace.push(TraceEntry {
            iteration: trace.len(),
            stage: Stage::Grid,
            tilt_g: g,
            tilt_a: a,
            outage: v,
        });
    }
    let k = argmin(&vals);
    let (mut tg, mut ta) = pairs[k];
    let mut best = vals[k];
    let s = spec.coarse_step_2d;
    let cell_g = ((tg - s).max(lo), (tg + s).min(hi));
    let cell_a = ((ta - s).max(lo), (ta + s).min(hi));
    let step = spec.coarse_step.min(s);
    for _ in 0..3 {
        let before = best;
        let line = line_search(cell_g.0, cell_g.1, step, spec.refine_iters, |t| ev.network(SchemeConfig::exclusive(t, ta, rho)))?;
        let fixed_a = ta;
        push_refine(&mut trace, &line.evals, |t| (t, fixed_a));
        if line.f < best {
            best = line.f;
            tg = line.x;
        }
        let line = line_search(cell_a.0, cell_a.1, step, spec.refine_iters, |t| ev.network(SchemeConfig::exclusive(tg, t, rho)))?;
        let fixed_g = tg;
        push_refine(&mut trace, &line.evals, |t| (fixed_g, t));
        if line.f < best {
            best = line.f;
            ta = line.x;
        }
        if before - best <= 1e-12 {
            break;
        }
    }
    Ok(TiltOptimum {
        scheme: Scheme::Exclusive,
        tilt_g: tg,
        tilt_a: ta,
        outage: best,
        trace,
    })
}

/// Coordinate sweeps inside the 2-D cell are all refinement.
fn push_refine(trace: &mut Vec<TraceEntry>, evals: &[(f64, f64, Stage)], map: impl Fn(f64) -> (f64, f64)) {
    let relabeled: Vec<_> = evals.iter().map(|&(x, v, _)| (x, v, Stage::Refine)).collect();
    push_trace(trace, &relabeled, map);
}

/// Tilt optimum for one candidate GBS ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioRecord {
    pub rho_bg: f64,
    pub tilt_g: f64,
    pub tilt_a: f64,
    pub outage: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioOptimum {
    pub best: RatioRecord,
    pub records: Vec<RatioRecord>,
}

/// ES ratio of GBSs minimizing the outage with tilts re-optimized per ratio.
pub fn optimize_gbs_ratio(net: &NetworkConfig, env: &EnvironmentParams, pattern: &AntennaPattern, spec: &TiltSearchSpec, ratio_grid: &[f64]) -> Result<RatioOptimum> {
    if ratio_grid.is_empty() {
        return Err(Error::invalid("ratio_grid", "must not be empty"));
    }
    if let Some(bad) = ratio_grid.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
        return Err(Error::invalid("ratio_grid", format!("value {bad} outside (0, 1)")));
    }
    let mut records = Vec::with_capacity(ratio_grid.len());
    for &rho in ratio_grid {
        let opt = optimize_tilt(&SchemeConfig::exclusive(0.0, 0.0, rho), net, env, pattern, spec)?;
        records.push(RatioRecord {
            rho_bg: rho,
            tilt_g: opt.tilt_g,
            tilt_a: opt.tilt_a,
            outage: opt.outage,
        });
    }
    let k = argmin(&records.iter().map(|r| r.outage).collect::<Vec<_>>());
    Ok(RatioOptimum { best: records[k], records })
}

/// Both schemes' optimized outages at one density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityStep {
    pub iteration: usize,
    pub lambda_b: f64,
    pub outage_is: f64,
    pub outage_es: f64,
}

impl DensityStep {
    /// `P_IS* − P_ES*`; positive where ES is better.
    pub fn delta(&self) -> f64 {
        self.outage_is - self.outage_es
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalDensity {
    pub lambda_c: f64,
    /// Final bracket around `lambda_c`.
    pub bracket: [f64; 2],
    pub trace: Vec<DensityStep>,
}

/// Optimized IS and ES outages at density `lambda_b`; ES uses GBS ratio `rho_bg`.
pub fn scheme_gap(net: &NetworkConfig, env: &EnvironmentParams, pattern: &AntennaPattern, spec: &TiltSearchSpec, rho_bg: f64, lambda_b: f64, iteration: usize) -> Result<DensityStep> {
    let n = NetworkConfig { lambda_b, ..*net };
    let is = optimize_tilt(&SchemeConfig::inclusive(0.0), &n, env, pattern, spec)?;
    let es = optimize_tilt(&SchemeConfig::exclusive(0.0, 0.0, rho_bg), &n, env, pattern, spec)?;
    Ok(DensityStep {
        iteration,
        lambda_b,
        outage_is: is.outage,
        outage_es: es.outage,
    })
}

/// Maximum bisection steps to shrink `[lo, hi]` to relative width `DENSITY_REL_WIDTH`.
pub fn max_bisections(lo: f64, hi: f64) -> usize {
    let ratio = (hi / lo).ln() / (1.0 + DENSITY_REL_WIDTH).ln();
    if ratio <= 1.0 {
        0
    } else {
        ratio.log2().ceil() as usize
    }
}

/// Density where the optimized IS and ES outages cross, by bisection on `ln λ_B`.
pub fn critical_bs_density(
    net: &NetworkConfig,
    env: &EnvironmentParams,
    pattern: &AntennaPattern,
    spec: &TiltSearchSpec,
    rho_bg: f64,
    bracket: [f64; 2],
) -> Result<CriticalDensity> {
    let [mut lo, mut hi] = bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::invalid("bracket", "requires 0 < lo < hi"));
    }
    let mut trace = vec![scheme_gap(net, env, pattern, spec, rho_bg, lo, 0)?];
    trace.push(scheme_gap(net, env, pattern, spec, rho_bg, hi, 1)?);
    let (d_lo, d_hi) = (trace[0].delta(), trace[1].delta());
    if d_lo == 0.0 {
        return Ok(CriticalDensity { lambda_c: lo, bracket: [lo, lo], trace });
    }
    if d_hi == 0.0 {
        return Ok(CriticalDensity { lambda_c: hi, bracket: [hi, hi], trace });
    }
    if d_lo.signum() == d_hi.signum() {
        return Err(Error::NoSignChange {
            lo,
            hi,
            delta_lo: d_lo,
            delta_hi: d_hi,
        });
    }
    let sign_lo = d_lo.signum();
    while hi / lo > 1.0 + DENSITY_REL_WIDTH {
        let mid = (lo * hi).sqrt();
        let step = scheme_gap(net, env, pattern, spec, rho_bg, mid, trace.len())?;
        let d = step.delta();
        trace.push(step);
        if d == 0.0 {
            return Ok(CriticalDensity { lambda_c: mid, bracket: [mid, mid], trace });
        }
        if d.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CriticalDensity {
        lambda_c: (lo * hi).sqrt(),
        bracket: [lo, hi],
        trace,
    })
}
