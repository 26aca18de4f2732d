//! Shared domain types, the height-dependent LoS model, path loss, elevation
//! geometry and Nakagami-m fading.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use serde::{Deserialize, Serialize};
use libm::erfc;

use crate::error::{Error, Result};

/// Smallest accepted |h_user − h_b| in meters.
pub const MIN_HEIGHT_GAP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UserType {
    Ground,
    Aerial,
}

impl UserType {
    pub const ALL: [UserType; 2] = [UserType::Ground, UserType::Aerial];

    pub fn label(self) -> &'static str {
        match self {
            UserType::Ground => "ground",
            UserType::Aerial => "aerial",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkClass {
    Los,
    Nlos,
}

impl LinkClass {
    pub const ALL: [LinkClass; 2] = [LinkClass::Los, LinkClass::Nlos];

    pub fn index(self) -> usize {
        match self {
            LinkClass::Los => 0,
            LinkClass::Nlos => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LinkClass::Los => "los",
            LinkClass::Nlos => "nlos",
        }
    }
}

/// Radial group of base stations relative to a user: tiers 1 and 3 see the
/// side lobe, tier 2 the main lobe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tier {
    Inner,
    Main,
    Outer,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Inner, Tier::Main, Tier::Outer];

    /// Zero-based position; tier `j` spans `[b[j], b[j + 1]]`.
    pub fn index(self) -> usize {
        match self {
            Tier::Inner => 0,
            Tier::Main => 1,
            Tier::Outer => 2,
        }
    }

    /// One-based number as used in reports.
    pub fn number(self) -> usize {
        self.index() + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Every BS serves both user types with one tilt.
    #[serde(alias = "is")]
    Inclusive,
    /// BSs are split into ground-serving and aerial-serving groups.
    #[serde(alias = "es")]
    Exclusive,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::Inclusive => "IS",
            Scheme::Exclusive => "ES",
        }
    }
}

/// Base-station group: the single inclusive group, or the ground/aerial
/// groups of the exclusive scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BsKind {
    Inclusive,
    GroundServing,
    AerialServing,
}

impl BsKind {
    pub fn serves(self, user: UserType) -> bool {
        match self {
            BsKind::Inclusive => true,
            BsKind::GroundServing => user == UserType::Ground,
            BsKind::AerialServing => user == UserType::Aerial,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LosModel {
    /// Distance- and height-dependent blockage model.
    #[default]
    Blockage,
    /// Every link is NLoS.
    NlosOnly,
}

/// Propagation and blockage constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvironmentParams {
    pub mu: f64,
    pub nu: f64,
    /// Meters.
    pub xi: f64,
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    pub m_los: u32,
    pub m_nlos: u32,
    pub los_model: LosModel,
}

impl Default for EnvironmentParams {
    fn default() -> Self {
        Self {
            mu: 0.5,
            nu: 3e-4,
            xi: 40.0,
            alpha_los: 2.5,
            alpha_nlos: 3.5,
            m_los: 3,
            m_nlos: 1,
            los_model: LosModel::Blockage,
        }
    }
}

impl EnvironmentParams {
    pub fn validate(&self) -> Result<()> {
        positive("environment.mu", self.mu)?;
        positive("environment.nu", self.nu)?;
        positive("environment.xi", self.xi)?;
        if !(self.alpha_los >= 2.0) {
            return Err(Error::invalid("environment.alpha_los", "must be at least 2"));
        }
        if !(self.alpha_nlos >= self.alpha_los) || !self.alpha_nlos.is_finite() {
            return Err(Error::invalid("environment.alpha_nlos", "must be finite and at least alpha_los"));
        }
        if self.m_los < 1 || self.m_los as usize > crate::analysis::MAX_NAKAGAMI_M {
            return Err(Error::invalid(
                "environment.m_los",
                format!("must be an integer in 1..={}", crate::analysis::MAX_NAKAGAMI_M),
            ));
        }
        if self.m_nlos != 1 {
            return Err(Error::invalid("environment.m_nlos", "NLoS links use Rayleigh fading (m = 1)"));
        }
        Ok(())
    }

    pub fn alpha(&self, link: LinkClass) -> f64 {
        match link {
            LinkClass::Los => self.alpha_los,
            LinkClass::Nlos => self.alpha_nlos,
        }
    }

    pub fn nakagami_m(&self, link: LinkClass) -> u32 {
        match link {
            LinkClass::Los => self.m_los,
            LinkClass::Nlos => self.m_nlos,
        }
    }
}

/// Topology and radio parameters. Densities in BS/m², heights in m, powers in W.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkConfig {
    pub lambda_b: f64,
    /// Share of base stations reusing the serving sub-band (λ_I / λ_B).
    pub interference_fraction: f64,
    pub h_b: f64,
    pub h_g: f64,
    pub h_a: f64,
    pub rho_g: f64,
    pub p_t: f64,
    pub noise: f64,
    /// Linear target SINR.
    pub gamma_t: f64,
    /// Half-width of the uniform aerial-user height spread (Monte Carlo only).
    pub au_height_spread: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            lambda_b: 1e-5,
            interference_fraction: 0.5,
            h_b: 30.0,
            h_g: 0.0,
            h_a: 50.0,
            rho_g: 0.5,
            p_t: 3.5,
            noise: 1e-9,
            gamma_t: 1.0,
            au_height_spread: 0.0,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        positive("network.lambda_b", self.lambda_b)?;
        unit_interval("network.interference_fraction", self.interference_fraction)?;
        unit_interval("network.rho_g", self.rho_g)?;
        if !(self.h_g >= 0.0) || !self.h_g.is_finite() {
            return Err(Error::invalid("network.h_g", "must be a finite height >= 0"));
        }
        if !(self.h_b > self.h_g) || !self.h_b.is_finite() {
            return Err(Error::invalid("network.h_b", "must exceed h_g"));
        }
        if !(self.h_a > self.h_b) || !self.h_a.is_finite() {
            return Err(Error::invalid("network.h_a", "must exceed h_b"));
        }
        positive("network.p_t", self.p_t)?;
        if !(self.noise >= 0.0) || !self.noise.is_finite() {
            return Err(Error::invalid("network.noise", "must be finite and >= 0"));
        }
        if !(self.gamma_t >= 0.0) || self.gamma_t.is_nan() {
            return Err(Error::invalid("network.gamma_t", "must be >= 0"));
        }
        if !(self.au_height_spread >= 0.0) || !(self.h_a - self.au_height_spread > self.h_b) {
            return Err(Error::invalid(
                "network.au_height_spread",
                "must be >= 0 and keep every aerial user above h_b",
            ));
        }
        Ok(())
    }

    pub fn rho_a(&self) -> f64 {
        1.0 - self.rho_g
    }

    pub fn height(&self, user: UserType) -> f64 {
        match user {
            UserType::Ground => self.h_g,
            UserType::Aerial => self.h_a,
        }
    }

    pub fn user_share(&self, user: UserType) -> f64 {
        match user {
            UserType::Ground => self.rho_g,
            UserType::Aerial => self.rho_a(),
        }
    }
}

/// Service provisioning scheme with its tilt angles (degrees, positive = down-tilt).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub tilt_g: f64,
    pub tilt_a: f64,
    /// Share of base stations serving ground users (exclusive scheme only).
    pub rho_bg: f64,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self::inclusive(10.0)
    }
}

/// An interfering base-station population seen by one user type.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterfererField {
    pub kind: BsKind,
    /// Density of co-channel interferers.
    pub density: f64,
    pub tilt: f64,
    /// True when the population is the one the user associates with, so no
    /// interferer is closer than the serving base station.
    pub excludes_serving_disc: bool,
}

impl SchemeConfig {
    pub fn inclusive(tilt: f64) -> Self {
        Self {
            scheme: Scheme::Inclusive,
            tilt_g: tilt,
            tilt_a: tilt,
            rho_bg: 0.5,
        }
    }

    pub fn exclusive(tilt_g: f64, tilt_a: f64, rho_bg: f64) -> Self {
        Self {
            scheme: Scheme::Exclusive,
            tilt_g,
            tilt_a,
            rho_bg,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (field, t) in [("scheme.tilt_g", self.tilt_g), ("scheme.tilt_a", self.tilt_a)] {
            if !(t > -90.0 && t < 90.0) {
                return Err(Error::invalid(field, "tilt must lie in (-90, 90) degrees"));
            }
        }
        match self.scheme {
            Scheme::Inclusive if self.tilt_g != self.tilt_a => Err(Error::invalid(
                "scheme.tilt_a",
                "the inclusive scheme uses a single tilt (tilt_g == tilt_a)",
            )),
            Scheme::Exclusive => unit_interval("scheme.rho_bg", self.rho_bg),
            _ => Ok(()),
        }
    }

    /// Tilt of the base stations that serve `user`.
    pub fn tilt_for(&self, user: UserType) -> f64 {
        match (self.scheme, user) {
            (Scheme::Inclusive, _) | (Scheme::Exclusive, UserType::Ground) => self.tilt_g,
            (Scheme::Exclusive, UserType::Aerial) => self.tilt_a,
        }
    }

    pub fn tilt_of(&self, kind: BsKind) -> f64 {
        match kind {
            BsKind::Inclusive | BsKind::GroundServing => self.tilt_g,
            BsKind::AerialServing => self.tilt_a,
        }
    }

    /// Density of the base stations eligible to serve `user`.
    pub fn serving_density(&self, user: UserType, net: &NetworkConfig) -> f64 {
        match (self.scheme, user) {
            (Scheme::Inclusive, _) => net.lambda_b,
            (Scheme::Exclusive, UserType::Ground) => self.rho_bg * net.lambda_b,
            (Scheme::Exclusive, UserType::Aerial) => (1.0 - self.rho_bg) * net.lambda_b,
        }
    }

    /// Co-channel interferer populations for a user of type `user`.
    pub fn interferer_fields(&self, user: UserType, net: &NetworkConfig) -> Vec<InterfererField> {
        let kappa = net.interference_fraction;
        match self.scheme {
            Scheme::Inclusive => vec![InterfererField {
                kind: BsKind::Inclusive,
                density: kappa * net.lambda_b,
                tilt: self.tilt_g,
                excludes_serving_disc: true,
            }],
            Scheme::Exclusive => vec![
                InterfererField {
                    kind: BsKind::GroundServing,
                    density: kappa * self.rho_bg * net.lambda_b,
                    tilt: self.tilt_g,
                    excludes_serving_disc: user == UserType::Ground,
                },
                InterfererField {
                    kind: BsKind::AerialServing,
                    density: kappa * (1.0 - self.rho_bg) * net.lambda_b,
                    tilt: self.tilt_a,
                    excludes_serving_disc: user == UserType::Aerial,
                },
            ],
        }
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be positive and finite (got {v})")))
    }
}

fn unit_interval(field: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must lie in [0, 1] (got {v})")))
    }
}

/// Gaussian tail probability `Q(x) = P[N(0,1) > x]`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// LoS probability as a function of horizontal distance for one pair of heights.
///
/// The blockage model is `p_L(r) = B^(r √(μν))` with a base `B ∈ [0, 1)`, i.e.
/// an exponential decay `exp(-k r)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LosCurve {
    Exponential { decay: f64 },
    Never,
}

impl LosCurve {
    pub fn new(h_user: f64, h_b: f64, env: &EnvironmentParams) -> Result<Self> {
        let gap = (h_user - h_b).abs();
        if gap < MIN_HEIGHT_GAP {
            return Err(Error::DegenerateHeight {
                diff: gap,
                min: MIN_HEIGHT_GAP,
            });
        }
        match env.los_model {
            LosModel::NlosOnly => Ok(LosCurve::Never),
            LosModel::Blockage => {
                let dq = (q_function(h_user / env.xi) - q_function(h_b / env.xi)).abs();
                let base = 1.0 - (2.0 * PI).sqrt() * env.xi / gap * dq;
                if !(base > 0.0) {
                    return Err(Error::DegenerateHeight {
                        diff: gap,
                        min: MIN_HEIGHT_GAP,
                    });
                }
                let decay = -(env.mu * env.nu).sqrt() * base.ln();
                Ok(LosCurve::Exponential { decay })
            }
        }
    }

    pub fn los(&self, r: f64) -> f64 {
        match *self {
            LosCurve::Exponential { decay } => (-decay * r).exp(),
            LosCurve::Never => 0.0,
        }
    }

    pub fn prob(&self, link: LinkClass, r: f64) -> f64 {
        match link {
            LinkClass::Los => self.los(r),
            LinkClass::Nlos => 1.0 - self.los(r),
        }
    }

    /// `∫_0^x t p_v(t) dt` in closed form.
    pub fn moment(&self, link: LinkClass, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match (*self, link) {
            (LosCurve::Never, LinkClass::Los) => 0.0,
            (LosCurve::Never, LinkClass::Nlos) => 0.5 * x * x,
            (LosCurve::Exponential { decay }, _) if x.is_infinite() => match link {
                LinkClass::Los => 1.0 / (decay * decay),
                LinkClass::Nlos => f64::INFINITY,
            },
            (LosCurve::Exponential { decay }, _) => {
                let y = decay * x;
                if y < 0.5 {
                    let (los_ratio, nlos_ratio) = small_moment_ratios(y);
                    match link {
                        LinkClass::Los => x * x * los_ratio,
                        LinkClass::Nlos => x * x * nlos_ratio,
                    }
                } else {
                    let los = (-(-y).exp_m1() - y * (-y).exp()) / (decay * decay);
                    match link {
                        LinkClass::Los => los,
                        LinkClass::Nlos => 0.5 * x * x - los,
                    }
                }
            }
        }
    }

    /// `∫_a^b t p_v(t) dt`.
    pub fn moment_between(&self, link: LinkClass, a: f64, b: f64) -> f64 {
        if !(b > a) {
            return 0.0;
        }
        if b.is_infinite() && link == LinkClass::Nlos {
            return f64::INFINITY;
        }
        self.moment(link, b) - self.moment(link, a)
    }
}

/// Series for `(S(y)/y², 1/2 − S(y)/y²)` with `S(y) = 1 − e^{−y}(1 + y)`, `y < 0.5`.
fn small_moment_ratios(y: f64) -> (f64, f64) {
    // S(y)/y² = Σ_{n≥2} (−1)^n (n−1) y^{n−2} / n!
    let mut los = 0.0;
    let mut nlos = 0.0;
    let mut fact = 2.0;
    let mut pow = 1.0;
    for n in 2..30u32 {
        if n > 2 {
            fact *= n as f64;
            pow *= y;
        }
        let term = (n - 1) as f64 * pow / fact;
        let signed = if n % 2 == 0 { term } else { -term };
        los += signed;
        if n >= 3 {
            nlos -= signed;
        }
        if term < 1e-18 {
            break;
        }
    }
    (los, nlos)
}

/// Channel parameters of one user type: heights, LoS curve, path-loss
/// exponents and Nakagami shapes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UserChannel {
    pub user: UserType,
    pub height: f64,
    /// `h_user − h_b`, signed.
    pub dh: f64,
    pub los: LosCurve,
    pub alpha: [f64; 2],
    pub m: [u32; 2],
}

impl UserChannel {
    pub fn new(user: UserType, net: &NetworkConfig, env: &EnvironmentParams) -> Result<Self> {
        Self::at_height(user, net.height(user), net, env)
    }

    pub fn at_height(user: UserType, height: f64, net: &NetworkConfig, env: &EnvironmentParams) -> Result<Self> {
        Ok(Self {
            user,
            height,
            dh: height - net.h_b,
            los: LosCurve::new(height, net.h_b, env)?,
            alpha: [env.alpha_los, env.alpha_nlos],
            m: [env.m_los, env.m_nlos],
        })
    }

    pub fn link_prob(&self, link: LinkClass, r: f64) -> f64 {
        self.los.prob(link, r)
    }

    pub fn path_loss(&self, link: LinkClass, r: f64) -> f64 {
        (r * r + self.dh * self.dh).powf(-0.5 * self.alpha[link.index()])
    }

    pub fn elevation_deg(&self, r: f64) -> f64 {
        elevation_from_gap(r, self.dh)
    }

    pub fn nakagami_m(&self, link: LinkClass) -> u32 {
        self.m[link.index()]
    }
}

pub(crate) fn elevation_from_gap(r: f64, dh: f64) -> f64 {
    if r == 0.0 {
        90.0 * dh.signum()
    } else {
        (dh / r).atan().to_degrees()
    }
}

/// LoS probability between a BS and a user at horizontal distance `r`.
pub fn los_probability(r: f64, user: UserType, net: &NetworkConfig, env: &EnvironmentParams) -> Result<f64> {
    Ok(LosCurve::new(net.height(user), net.h_b, env)?.los(r))
}

/// Distance-dependent path loss `(r² + Δh²)^(−α_v/2)`.
pub fn path_loss(r: f64, user: UserType, link: LinkClass, net: &NetworkConfig, env: &EnvironmentParams) -> f64 {
    let dh = net.height(user) - net.h_b;
    (r * r + dh * dh).powf(-0.5 * env.alpha(link))
}

/// Elevation angle (degrees) from the BS antenna to the user; negative below the antenna.
pub fn elevation_angle(r: f64, user: UserType, net: &NetworkConfig) -> f64 {
    elevation_from_gap(r, net.height(user) - net.h_b)
}

/// Unit-mean Nakagami-m power gain, i.e. `Gamma(shape = m, rate = m)`.
#[derive(Clone, Copy, Debug)]
pub struct FadingSampler {
    los: Gamma<f64>,
    m_los: u32,
}

impl FadingSampler {
    pub fn new(env: &EnvironmentParams) -> Self {
        let m = env.m_los.max(1) as f64;
        Self {
            los: Gamma::new(m, 1.0 / m).expect("shape and scale are positive"),
            m_los: env.m_los.max(1),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, link: LinkClass, rng: &mut R) -> f64 {
        match link {
            LinkClass::Los if self.m_los > 1 => self.los.sample(rng),
            _ => Exp1.sample(rng),
        }
    }
}

/// Draws one fading power gain for a link of class `link`.
pub fn sample_fading<R: Rng + ?Sized>(link: LinkClass, env: &EnvironmentParams, rng: &mut R) -> f64 {
    FadingSampler::new(env).sample(link, rng)
}
