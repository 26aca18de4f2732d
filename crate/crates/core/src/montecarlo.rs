//! Monte Carlo simulator of Poisson base-station fields seen by a typical user.
//!
//! Every trial owns two ChaCha8 streams derived from `(seed, trial)`: one for
//! the field and one for the serving-link fading. Trials are grouped into
//! fixed batches whose integer tallies are summed, so results do not depend on
//! the number of worker threads. Base stations are generated outward from the
//! user through cumulative exponential gaps, which keeps the fields of two
//! runs with different disc radii identical on their common disc. Interferers
//! beyond the disc enter through their mean aggregate power.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{Method, OutageEstimate};
use crate::antenna::{boundaries_for_gap, AntennaPattern, TierBoundaries};
use crate::association::{strongest_candidate, AssociationRule, Candidate};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_piecewise, Tolerance};
use crate::model::{BsKind, EnvironmentParams, FadingSampler, LinkClass, NetworkConfig, Scheme, SchemeConfig, Tier, UserChannel, UserType};

/// Trials per reduction batch; part of the determinism contract.
const BATCH: u64 = 2048;

/// 97.5% standard normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub rule: AssociationRule,
    /// Disc radius in meters; when absent, `20/√(π λ_min)` over the eligible densities.
    pub r_max: Option<f64>,
    /// Adds the mean interference of base stations beyond `r_max` to every trial.
    pub far_field: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            trials: 100_000,
            seed: 1,
            rule: AssociationRule::Nearest,
            r_max: None,
            far_field: true,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("sim.trials", "must be at least 1"));
        }
        if let Some(r) = self.r_max {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::invalid("sim.r_max", "must be positive and finite"));
            }
        }
        Ok(())
    }
}

/// One base station of a realized field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BsRecord {
    pub r: f64,
    pub kind: BsKind,
    pub link: LinkClass,
    pub tier: Tier,
    pub gain: f64,
    pub interferer: bool,
    /// Fading power gain; drawn for interferers only, zero otherwise.
    pub fading: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FieldRealization {
    pub user: Option<UserType>,
    pub height: f64,
    /// Sorted by increasing horizontal distance.
    pub bss: Vec<BsRecord>,
}

impl FieldRealization {
    pub fn user(&self) -> UserType {
        self.user.unwrap_or(UserType::Ground)
    }

    pub fn interferer_count(&self) -> usize {
        self.bss.iter().filter(|b| b.interferer).count()
    }
}

/// Result of one simulated drop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DropOutcome {
    Served {
        outage: bool,
        link: LinkClass,
        tier: Tier,
        r: f64,
    },
    /// No eligible base station inside the simulation disc.
    Unserved,
}

impl DropOutcome {
    pub fn is_outage(&self) -> bool {
        match self {
            DropOutcome::Served { outage, .. } => *outage,
            DropOutcome::Unserved => true,
        }
    }
}

/// Tallies of a Monte Carlo run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub trials: u64,
    pub outages: u64,
    pub unserved: u64,
    /// Serving-cell counts indexed `[link][tier]`.
    pub association: [[u64; 3]; 2],
}

impl Tally {
    fn record(&mut self, o: &DropOutcome) {
        self.trials += 1;
        if o.is_outage() {
            self.outages += 1;
        }
        match *o {
            DropOutcome::Served { link, tier, .. } => self.association[link.index()][tier.index()] += 1,
            DropOutcome::Unserved => self.unserved += 1,
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.trials += other.trials;
        self.outages += other.outages;
        self.unserved += other.unserved;
        for v in 0..2 {
            for j in 0..3 {
                self.association[v][j] += other.association[v][j];
            }
        }
        self
    }

    pub fn estimate(&self) -> OutageEstimate {
        let (p, hw) = wilson(self.outages, self.trials);
        OutageEstimate {
            p,
            method: Method::MonteCarlo,
            ci_halfwidth: hw,
        }
    }

    pub fn association_frequency(&self, link: LinkClass, tier: Tier) -> f64 {
        self.association[link.index()][tier.index()] as f64 / self.trials as f64
    }
}

/// Point estimate `k/n` and Wilson 95% half-width.
pub fn wilson(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 0.5);
    }
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = Z95 * Z95;
    let hw = Z95 / (1.0 + z2 / n_f) * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    (p, hw)
}

/// Precomputed simulation state for one configuration.
#[derive(Clone, Debug)]
pub struct Simulator {
    pub net: NetworkConfig,
    pub env: EnvironmentParams,
    pub pattern: AntennaPattern,
    pub scheme: SchemeConfig,
    pub sim: SimConfig,
    pub r_max: f64,
    fading: FadingSampler,
    far: FarField,
}

/// Heights at which the far-field mean is tabulated for random AU heights.
const FAR_FIELD_NODES: usize = 33;

/// Mean far-field interference per user type, tabulated over the AU height range.
#[derive(Clone, Debug, Default)]
struct FarField {
    ground: f64,
    aerial_lo: f64,
    aerial_hi: f64,
    aerial: Vec<f64>,
}

impl FarField {
    fn at(&self, user: UserType, height: f64) -> f64 {
        match user {
            UserType::Ground => self.ground,
            UserType::Aerial if self.aerial.len() <= 1 => self.aerial.first().copied().unwrap_or(0.0),
            UserType::Aerial => {
                let n = self.aerial.len() - 1;
                let x = ((height - self.aerial_lo) / (self.aerial_hi - self.aerial_lo)).clamp(0.0, 1.0) * n as f64;
                let i = (x.floor() as usize).min(n - 1);
                let f = x - i as f64;
                self.aerial[i] * (1.0 - f) + self.aerial[i + 1] * f
            }
        }
    }
}

/// Fixed per-user-height quantities for one trial.
struct TrialGeometry {
    channel: UserChannel,
    bounds_g: TierBoundaries,
    bounds_a: TierBoundaries,
}

impl Simulator {
    pub fn new(net: NetworkConfig, env: EnvironmentParams, pattern: AntennaPattern, scheme: SchemeConfig, sim: SimConfig) -> Result<Self> {
        net.validate()?;
        env.validate()?;
        pattern.validate()?;
        scheme.validate()?;
        sim.validate()?;
        let r_max = sim.r_max.unwrap_or_else(|| default_r_max(&net, &scheme));
        let mut s = Self {
            net,
            env,
            pattern,
            scheme,
            sim,
            r_max,
            fading: FadingSampler::new(&env),
            far: FarField::default(),
        };
        if sim.far_field && net.interference_fraction > 0.0 {
            let d = net.au_height_spread;
            let nodes = if d > 0.0 { FAR_FIELD_NODES } else { 1 };
            let (lo, hi) = (net.h_a - d, net.h_a + d);
            s.far = FarField {
                ground: s.far_field_interference(UserType::Ground, net.h_g)?,
                aerial_lo: lo,
                aerial_hi: hi,
                aerial: (0..nodes)
                    .map(|k| {
                        let h = if nodes == 1 { net.h_a } else { lo + (hi - lo) * k as f64 / (nodes - 1) as f64 };
                        s.far_field_interference(UserType::Aerial, h)
                    })
                    .collect::<Result<_>>()?,
            };
        }
        Ok(s)
    }

    /// Mean interference power from base stations beyond `r_max` at a user of
    /// type `user` flying at `height`: `P_t κ Σ λ_k ∫ Σ_v p_v G_k l_v 2πr dr`.
    pub fn far_field_interference(&self, user: UserType, height: f64) -> Result<f64> {
        let channel = UserChannel::at_height(user, height, &self.net, &self.env)?;
        let groups: Vec<(f64, f64)> = match self.scheme.scheme {
            Scheme::Inclusive => vec![(self.net.lambda_b, self.scheme.tilt_g)],
            Scheme::Exclusive => vec![
                (self.scheme.rho_bg * self.net.lambda_b, self.scheme.tilt_g),
                ((1.0 - self.scheme.rho_bg) * self.net.lambda_b, self.scheme.tilt_a),
            ],
        };
        let mut total = 0.0;
        for (lambda, tilt) in groups {
            if lambda == 0.0 {
                continue;
            }
            let bounds = boundaries_for_gap(channel.dh, tilt, &self.pattern);
            let mut pts = vec![self.r_max];
            pts.extend(bounds.interior_breaks(self.r_max, f64::INFINITY).filter(|x| x.is_finite()));
            pts.push(f64::INFINITY);
            let part = integrate_piecewise(
                |r| {
                    let g = self.pattern.gain_at(r, channel.dh, tilt, &bounds);
                    let mean: f64 = LinkClass::ALL.iter().map(|&v| channel.link_prob(v, r) * channel.path_loss(v, r)).sum();
                    [2.0 * PI * r * g * mean]
                },
                &pts,
                Tolerance::new(0.0, 1e-9),
            )
            .map_err(|e| e.in_context("far-field interference"))?;
            total += lambda * part.value[0];
        }
        Ok(self.net.p_t * self.net.interference_fraction * total)
    }

    pub fn with_scheme(&self, scheme: SchemeConfig) -> Result<Self> {
        Self::new(self.net, self.env, self.pattern, scheme, self.sim)
    }

    fn trial_rngs(&self, trial: u64) -> (ChaCha8Rng, ChaCha8Rng) {
        let mut field = ChaCha8Rng::seed_from_u64(self.sim.seed);
        field.set_stream(2 * trial);
        let mut serving = ChaCha8Rng::seed_from_u64(self.sim.seed);
        serving.set_stream(2 * trial + 1);
        (field, serving)
    }

    fn geometry(&self, user: UserType, height: f64) -> Result<TrialGeometry> {
        let channel = UserChannel::at_height(user, height, &self.net, &self.env)?;
        Ok(TrialGeometry {
            bounds_g: boundaries_for_gap(channel.dh, self.scheme.tilt_g, &self.pattern),
            bounds_a: boundaries_for_gap(channel.dh, self.scheme.tilt_a, &self.pattern),
            channel,
        })
    }

    fn bounds_for<'a>(&self, geo: &'a TrialGeometry, kind: BsKind) -> &'a TierBoundaries {
        match kind {
            BsKind::AerialServing => &geo.bounds_a,
            _ => &geo.bounds_g,
        }
    }

    /// Draws the user (type and height) and the base-station field into `out`.
    /// With `user = None` the type is drawn with probability `ρ_G` of being ground.
    pub fn sample_field_into<R: Rng + ?Sized>(&self, user: Option<UserType>, rng: &mut R, out: &mut FieldRealization) -> Result<()> {
        let u = match user {
            Some(u) => u,
            None => {
                if rng.random::<f64>() < self.net.rho_g {
                    UserType::Ground
                } else {
                    UserType::Aerial
                }
            }
        };
        let height = match u {
            UserType::Aerial if self.net.au_height_spread > 0.0 => {
                let d = self.net.au_height_spread;
                rng.random_range(self.net.h_a - d..=self.net.h_a + d)
            }
            _ => self.net.height(u),
        };
        let geo = self.geometry(u, height)?;
        out.user = Some(u);
        out.height = height;
        out.bss.clear();
        let scale = PI * self.net.lambda_b;
        let mut gamma = 0.0;
        loop {
            gamma += rng.sample::<f64, _>(Exp1);
            let r = (gamma / scale).sqrt();
            if r > self.r_max {
                break;
            }
            let u_link: f64 = rng.random();
            let u_kind: f64 = rng.random();
            let u_interf: f64 = rng.random();
            let link = if u_link < geo.channel.link_prob(LinkClass::Los, r) {
                LinkClass::Los
            } else {
                LinkClass::Nlos
            };
            let kind = match self.scheme.scheme {
                Scheme::Inclusive => BsKind::Inclusive,
                Scheme::Exclusive if u_kind < self.scheme.rho_bg => BsKind::GroundServing,
                Scheme::Exclusive => BsKind::AerialServing,
            };
            let interferer = u_interf < self.net.interference_fraction;
            let fading = if interferer { self.fading.sample(link, rng) } else { 0.0 };
            let bounds = self.bounds_for(&geo, kind);
            let tilt = self.scheme.tilt_of(kind);
            out.bss.push(BsRecord {
                r,
                kind,
                link,
                tier: bounds.tier_of(r),
                gain: self.pattern.gain_at(r, geo.channel.dh, tilt, bounds),
                interferer,
                fading,
            });
        }
        Ok(())
    }

    pub fn sample_field<R: Rng + ?Sized>(&self, user: Option<UserType>, rng: &mut R) -> Result<FieldRealization> {
        let mut f = FieldRealization::default();
        self.sample_field_into(user, rng, &mut f)?;
        Ok(f)
    }

    /// Index of the serving base station under the configured rule.
    pub fn serving_index(&self, field: &FieldRealization, candidates: &mut Vec<Candidate>, index: &mut Vec<usize>) -> Result<Option<usize>> {
        let user = field.user();
        match self.sim.rule {
            AssociationRule::Nearest => Ok(field.bss.iter().position(|b| b.kind.serves(user))),
            AssociationRule::Strongest => {
                candidates.clear();
                index.clear();
                for (i, b) in field.bss.iter().enumerate() {
                    if b.kind.serves(user) {
                        candidates.push(Candidate { r: b.r, link: b.link });
                        index.push(i);
                    }
                }
                if candidates.is_empty() {
                    return Ok(None);
                }
                let channel = UserChannel::at_height(user, field.height, &self.net, &self.env)?;
                let tilt = self.scheme.tilt_for(user);
                Ok(Some(index[strongest_candidate(candidates, &channel, tilt, &self.pattern)?]))
            }
        }
    }

    /// SINR outage indicator for a realized field.
    pub fn simulate_drop<R: Rng + ?Sized>(&self, field: &FieldRealization, rng: &mut R) -> Result<DropOutcome> {
        self.drop_with_buffers(field, rng, &mut Vec::new(), &mut Vec::new())
    }

    fn drop_with_buffers<R: Rng + ?Sized>(
        &self,
        field: &FieldRealization,
        rng: &mut R,
        candidates: &mut Vec<Candidate>,
        index: &mut Vec<usize>,
    ) -> Result<DropOutcome> {
        let Some(s) = self.serving_index(field, candidates, index)? else {
            return Ok(DropOutcome::Unserved);
        };
        let dh = field.height - self.net.h_b;
        let alpha = [self.env.alpha_los, self.env.alpha_nlos];
        let pl = |r: f64, link: LinkClass| (r * r + dh * dh).powf(-0.5 * alpha[link.index()]);
        let serving = &field.bss[s];
        let h = self.fading.sample(serving.link, rng);
        let signal = self.net.p_t * serving.gain * pl(serving.r, serving.link) * h;
        let mut interference = 0.0;
        for (i, b) in field.bss.iter().enumerate() {
            if b.interferer && i != s {
                interference += b.gain * pl(b.r, b.link) * b.fading;
            }
        }
        interference = interference * self.net.p_t + self.far.at(field.user(), field.height);
        let outage = signal < self.net.gamma_t * (interference + self.net.noise);
        Ok(DropOutcome::Served {
            outage,
            link: serving.link,
            tier: serving.tier,
            r: serving.r,
        })
    }

    /// Runs trial `trial` with its own random substreams.
    pub fn run_trial(&self, trial: u64, user: Option<UserType>) -> Result<DropOutcome> {
        let (mut field_rng, mut serving_rng) = self.trial_rngs(trial);
        let field = self.sample_field(user, &mut field_rng)?;
        self.simulate_drop(&field, &mut serving_rng)
    }

    /// Runs all trials in deterministic batches on the current rayon pool.
    pub fn tally(&self, user: Option<UserType>) -> Result<Tally> {
        let trials = self.sim.trials;
        let batches = trials.div_ceil(BATCH);
        let parts: Vec<Result<Tally>> = (0..batches)
            .into_par_iter()
            .map(|b| {
                let mut tally = Tally::default();
                let mut field = FieldRealization::default();
                let mut candidates = Vec::new();
                let mut index = Vec::new();
                for t in b * BATCH..((b + 1) * BATCH).min(trials) {
                    let (mut field_rng, mut serving_rng) = self.trial_rngs(t);
                    self.sample_field_into(user, &mut field_rng, &mut field)?;
                    let o = self.drop_with_buffers(&field, &mut serving_rng, &mut candidates, &mut index)?;
                    tally.record(&o);
                }
                Ok(tally)
            })
            .collect();
        parts.into_iter().try_fold(Tally::default(), |acc, t| Ok(acc.merge(t?)))
    }

    /// Outage over the user mix, each trial drawing the user type.
    pub fn estimate_outage(&self) -> Result<OutageEstimate> {
        Ok(self.tally(None)?.estimate())
    }

    pub fn estimate_user_outage(&self, user: UserType) -> Result<OutageEstimate> {
        Ok(self.tally(Some(user))?.estimate())
    }

    /// Empirical `E[exp(−z I)]` of the interference seen by a user of type `user`
    /// whose serving BS sits at distance `serving_r`: same-group interferers lie
    /// beyond `serving_r`, other-group interferers anywhere in the disc.
    pub fn empirical_laplace(&self, user: UserType, serving_r: f64, zs: &[f64]) -> Result<Vec<f64>> {
        let trials = self.sim.trials;
        let batches = trials.div_ceil(BATCH);
        let dh = self.net.height(user) - self.net.h_b;
        let alpha = [self.env.alpha_los, self.env.alpha_nlos];
        let parts: Vec<Result<Vec<f64>>> = (0..batches)
            .into_par_iter()
            .map(|b| {
                let mut sums = vec![0.0; zs.len()];
                let mut field = FieldRealization::default();
                for t in b * BATCH..((b + 1) * BATCH).min(trials) {
                    let (mut rng, _) = self.trial_rngs(t);
                    self.sample_field_into(Some(user), &mut rng, &mut field)?;
                    let mut interference = 0.0;
                    for bs in &field.bss {
                        if bs.interferer && (!bs.kind.serves(user) || bs.r > serving_r) {
                            interference += bs.gain * (bs.r * bs.r + dh * dh).powf(-0.5 * alpha[bs.link.index()]) * bs.fading;
                        }
                    }
                    interference = interference * self.net.p_t + self.far.at(user, field.height);
                    for (s, z) in sums.iter_mut().zip(zs) {
                        *s += (-z * interference).exp();
                    }
                }
                Ok(sums)
            })
            .collect();
        // Batch partial sums are added in batch order for reproducibility.
        let mut total = vec![0.0; zs.len()];
        for p in parts {
            for (t, v) in total.iter_mut().zip(p?) {
                *t += v;
            }
        }
        Ok(total.into_iter().map(|s| s / trials as f64).collect())
    }
}

/// `20/√(π λ_min)` over the positive eligible-BS densities of the scheme.
pub fn default_r_max(net: &NetworkConfig, scheme: &SchemeConfig) -> f64 {
    let lambda_min = UserType::ALL
        .iter()
        .map(|&u| scheme.serving_density(u, net))
        .filter(|&l| l > 0.0)
        .fold(f64::INFINITY, f64::min);
    let lambda_min = if lambda_min.is_finite() { lambda_min } else { net.lambda_b };
    20.0 / (PI * lambda_min).sqrt()
}

pub fn sample_field<R: Rng + ?Sized>(
    net: &NetworkConfig,
    scheme: &SchemeConfig,
    user: UserType,
    env: &EnvironmentParams,
    pattern: &AntennaPattern,
    rng: &mut R,
) -> Result<FieldRealization> {
    Simulator::new(*net, *env, *pattern, *scheme, SimConfig::default())?.sample_field(Some(user), rng)
}

pub fn simulate_drop<R: Rng + ?Sized>(
    field: &FieldRealization,
    net: &NetworkConfig,
    scheme: &SchemeConfig,
    env: &EnvironmentParams,
    pattern: &AntennaPattern,
    rule: AssociationRule,
    rng: &mut R,
) -> Result<DropOutcome> {
    let sim = SimConfig {
        rule,
        ..SimConfig::default()
    };
    Simulator::new(*net, *env, *pattern, *scheme, sim)?.simulate_drop(field, rng)
}

pub fn estimate_outage(net: &NetworkConfig, scheme: &SchemeConfig, env: &EnvironmentParams, pattern: &AntennaPattern, sim: &SimConfig) -> Result<OutageEstimate> {
    Simulator::new(*net, *env, *pattern, *scheme, *sim)?.estimate_outage()
}

pub fn estimate_user_outage(
    user: UserType,
    net: &NetworkConfig,
    scheme: &SchemeConfig,
    env: &EnvironmentParams,
    pattern: &AntennaPattern,
    sim: &SimConfig,
) -> Result<OutageEstimate> {
    Simulator::new(*net, *env, *pattern, *scheme, *sim)?.estimate_user_outage(user)
}
