//! Serving-distance distributions for the nearest association rule and the
//! strongest-mean-power selection used by the simulator.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::antenna::{boundaries_for_gap, AntennaPattern, TierBoundaries};
use crate::error::{Error, Result};
use crate::model::{EnvironmentParams, LinkClass, NetworkConfig, SchemeConfig, Tier, UserChannel, UserType};
use crate::quadrature::{integrate_piecewise, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssociationRule {
    /// Smallest horizontal distance among eligible base stations.
    #[default]
    Nearest,
    /// Largest mean received power `G · l_v`.
    Strongest,
}

impl AssociationRule {
    pub fn label(self) -> &'static str {
        match self {
            AssociationRule::Nearest => "nearest",
            AssociationRule::Strongest => "strongest",
        }
    }
}

/// Number of `1/√(πλ)` length scales beyond which serving distances are ignored.
pub const TRUNCATION_SCALES: f64 = 20.0;

const ASSOCIATION_TOL: Tolerance = Tolerance::new(1e-12, 1e-11);

/// Serving-side geometry of one user type: channel, main-lobe tiers of the
/// serving tilt and the density of eligible base stations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ServingGeometry {
    pub channel: UserChannel,
    pub bounds: TierBoundaries,
    pub tilt: f64,
    pub lambda: f64,
}

impl ServingGeometry {
    pub fn new(
        user: UserType,
        scheme: &SchemeConfig,
        net: &NetworkConfig,
        env: &EnvironmentParams,
        pattern: &AntennaPattern,
    ) -> Result<Self> {
        let channel = UserChannel::new(user, net, env)?;
        let tilt = scheme.tilt_for(user);
        Ok(Self {
            channel,
            bounds: boundaries_for_gap(channel.dh, tilt, pattern),
            tilt,
            lambda: scheme.serving_density(user, net),
        })
    }

    /// `∫_{b_j}^{clamp(x)} t p_v(t) dt` with `x` clamped into tier `j`.
    fn tier_moment(&self, x: f64, link: LinkClass, tier: Tier) -> f64 {
        let (lo, hi) = self.bounds.range(tier);
        if !(x > lo) || !(hi > lo) {
            return 0.0;
        }
        self.channel.los.moment_between(link, lo, x.min(hi))
    }

    /// Probability that no `(link, tier)` candidate lies within horizontal distance `x`.
    pub fn tier_ccdf(&self, x: f64, link: LinkClass, tier: Tier) -> f64 {
        if self.lambda == 0.0 {
            return 1.0;
        }
        (-2.0 * PI * self.lambda * self.tier_moment(x, link, tier)).exp()
    }

    /// Density of the nearest `(link, tier)` candidate distance on `(b_j, b_{j+1}]`.
    pub fn tier_pdf(&self, x: f64, link: LinkClass, tier: Tier) -> f64 {
        let (lo, hi) = self.bounds.range(tier);
        if !(x > lo) || x > hi || x.is_infinite() {
            return 0.0;
        }
        2.0 * PI * self.lambda * x * self.channel.link_prob(link, x) * self.tier_ccdf(x, link, tier)
    }

    /// Joint density that the nearest eligible BS is a `(link, tier)` BS at distance `r`.
    pub fn nearest_joint_density(&self, r: f64, link: LinkClass, tier: Tier) -> f64 {
        let pdf = self.tier_pdf(r, link, tier);
        if pdf == 0.0 {
            return 0.0;
        }
        let mut others = 0.0;
        for t in Tier::ALL {
            for v in LinkClass::ALL {
                if (v, t) != (link, tier) {
                    others += self.tier_moment(r, v, t);
                }
            }
        }
        pdf * (-2.0 * PI * self.lambda * others).exp()
    }

    /// Distance beyond which the probability of having no eligible BS is negligible.
    pub fn truncation_radius(&self) -> f64 {
        let scale = TRUNCATION_SCALES / (PI * self.lambda).sqrt();
        let b3 = self.bounds.r_ub();
        if b3.is_finite() {
            scale.max(b3)
        } else {
            scale
        }
    }

    /// Breakpoints on `[lo, hi]`: tier boundaries and a few density length scales.
    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let scale = 1.0 / (PI * self.lambda).sqrt();
        let mut pts = vec![lo, hi];
        pts.extend(self.bounds.interior_breaks(lo, hi));
        pts.extend([0.25, 0.5, 1.0, 2.0, 4.0].iter().map(|c| c * scale).filter(|&x| x > lo && x < hi));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Probability that the nearest eligible BS is a `(link, tier)` BS within distance `r`.
    pub fn nearest_joint_probability(&self, r: f64, link: LinkClass, tier: Tier) -> Result<f64> {
        let (lo, hi) = self.bounds.range(tier);
        if self.lambda == 0.0 || !(r > lo) || !(hi > lo) {
            return Ok(0.0);
        }
        let upper = r.min(hi).min(self.truncation_radius().max(lo));
        if !(upper > lo) {
            return Ok(0.0);
        }
        let pts = self.breakpoints(lo, upper);
        integrate_piecewise(|x| [self.nearest_joint_density(x, link, tier)], &pts, ASSOCIATION_TOL)
            .map(|i| i.value[0])
            .map_err(|e| e.in_context(format!("association probability of tier {} ({})", tier.number(), link.label())))
    }

    /// Association probability `A_{vj}` under `rule`.
    pub fn association_probability(&self, link: LinkClass, tier: Tier, rule: AssociationRule) -> Result<f64> {
        match rule {
            AssociationRule::Strongest => Err(Error::UnsupportedAnalytic),
            AssociationRule::Nearest => self.nearest_joint_probability(f64::INFINITY, link, tier),
        }
    }

    /// Serving-distance density conditioned on association with a `(link, tier)` BS.
    pub fn serving_distance_pdf(&self, r: f64, link: LinkClass, tier: Tier) -> Result<f64> {
        let a = self.association_probability(link, tier, AssociationRule::Nearest)?;
        if !(a > 0.0) {
            return Err(Error::UndefinedConditional {
                tier: tier.number(),
                link: link.label(),
            });
        }
        Ok(self.nearest_joint_density(r, link, tier) / a)
    }
}

pub fn tier_ccdf(
    x: f64,
    link: LinkClass,
    tier: Tier,
    user: UserType,
    scheme: &SchemeConfig,
    net: &NetworkConfig,
    env: &EnvironmentParams,
    pattern: &AntennaPattern,
) -> Result<f64> {
    Ok(ServingGeometry::new(user, scheme, net, env, pattern)?.tier_ccdf(x, link, tier))
}

pub fn tier_pdf(
    x: f64,
    link: LinkClass,
    tier: Tier,
    user: UserType,
    scheme: &SchemeConfig,
    net: &NetworkConfig,
    env: &EnvironmentParams,
    pattern: &AntennaPattern,
) -> Result<f64> {
    Ok(ServingGeometry::new(user, scheme, net, env, pattern)?.tier_pdf(x, link, tier))
}

pub fn nearest_joint_probability(
    r: f64,
    link: LinkClass,
    tier: Tier,
    user: UserType,
    scheme: &SchemeConfig,
    net: &NetworkConfig,
    env: &EnvironmentParams,
    pattern: &AntennaPattern,
) -> Result<f64> {
    ServingGeometry::new(user, scheme, net, env, pattern)?.nearest_joint_probability(r, link, tier)
}

pub fn association_probability(
    link: LinkClass,
    tier: Tier,
    user: UserType,
    scheme: &SchemeConfig,
    net: &NetworkConfig,
    env: &EnvironmentParams,
    pattern: &AntennaPattern,
    rule: AssociationRule,
) -> Result<f64> {
    if rule == AssociationRule::Strongest {
        return Err(Error::UnsupportedAnalytic);
    }
    ServingGeometry::new(user, scheme, net, env, pattern)?.association_probability(link, tier, rule)
}

pub fn serving_distance_pdf(
    r: f64,
    link: LinkClass,
    tier: Tier,
    user: UserType,
    scheme: &SchemeConfig,
    net: &NetworkConfig,
    env: &EnvironmentParams,
    pattern: &AntennaPattern,
) -> Result<f64> {
    ServingGeometry::new(user, scheme, net, env, pattern)?.serving_distance_pdf(r, link, tier)
}

/// A realized base station eligible to serve the user.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    pub r: f64,
    pub link: LinkClass,
}

/// Mean received-power metric `G(r) · l_v(r)` of a candidate.
pub fn mean_power_metric(c: &Candidate, channel: &UserChannel, tilt: f64, bounds: &TierBoundaries, pattern: &AntennaPattern) -> f64 {
    pattern.gain_at(c.r, channel.dh, tilt, bounds) * channel.path_loss(c.link, c.r)
}

/// Index of the candidate with the largest mean received power; ties keep the earliest.
pub fn strongest_candidate(
    candidates: &[Candidate],
    channel: &UserChannel,
    tilt: f64,
    pattern: &AntennaPattern,
) -> Result<usize> {
    let bounds = boundaries_for_gap(channel.dh, tilt, pattern);
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in candidates.iter().enumerate() {
        let m = mean_power_metric(c, channel, tilt, &bounds, pattern);
        if best.map_or(true, |(_, b)| m > b) {
            best = Some((i, m));
        }
    }
    best.map(|(i, _)| i).ok_or(Error::NoCandidate)
}
