//! Analytical outage probability under the nearest association rule.

pub mod closed_form;
pub mod laplace;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::antenna::AntennaPattern;
use crate::association::ServingGeometry;
use crate::error::{Error, Result};
use crate::model::{BsKind, EnvironmentParams, LinkClass, NetworkConfig, SchemeConfig, Tier, UserType};
use crate::quadrature::{integrate_piecewise, Tolerance};

pub use closed_form::{closed_form_outage_published, closed_form_outage_simplified, simplified_outage_quadrature};
pub use laplace::{InterfererGeometry, LaplaceExponent, MAX_NAKAGAMI_M};
use laplace::{ExponentRequest, SLOTS};

/// Whether co-channel interference is modeled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    General,
    NoiseLimited,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::General => "general",
            Mode::NoiseLimited => "noise_limited",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    MonteCarlo,
    ClosedForm,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Analytic => "analytic",
            Method::MonteCarlo => "monte_carlo",
            Method::ClosedForm => "closed_form",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutageEstimate {
    pub p: f64,
    pub method: Method,
    /// Half-width of the 95% confidence interval; zero for deterministic methods.
    pub ci_halfwidth: f64,
}

impl OutageEstimate {
    pub fn analytic(p: f64) -> Self {
        Self {
            p: p.clamp(0.0, 1.0),
            method: Method::Analytic,
            ci_halfwidth: 0.0,
        }
    }
}

/// Outer (serving-distance) quadrature tolerance.
const OUTER_TOL: Tolerance = Tolerance::new(1e-7, 1e-7);

/// Above this `zσ²` the coverage probability underflows to zero.
const NOISE_CUTOFF: f64 = 700.0;

/// `P(m, x) = 1 − e^(−x) Σ_{n<m} xⁿ/n!` for integer `m ≥ 1`.
pub fn regularized_gamma_p(m: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    if x < m as f64 + 1.0 {
        // e^(−x) Σ_{n≥m} xⁿ/n!
        let mut term = 1.0;
        for n in 1..=m {
            term *= x / n as f64;
        }
        let mut sum = 0.0;
        let mut n = m;
        while term > 1e-17 * sum || sum == 0.0 {
            sum += term;
            n += 1;
            term *= x / n as f64;
            if term == 0.0 {
                break;
            }
        }
        (sum * (-x).exp()).min(1.0)
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 1..m {
            term *= x / n as f64;
            sum += term;
        }
        (1.0 - (-x).exp() * sum).max(0.0)
    }
}

/// Coverage probability `e^(Y₀) Σ_{n<m} (−1)ⁿ/n! Bₙ(Y₁, …, Yₙ)`, where
/// `Yₙ = zⁿ F⁽ⁿ⁾(z)` for `F(z) = −zσ² + A(z)` and `Bₙ` is the complete Bell polynomial.
pub fn coverage_from_scaled(y: &[f64], m: usize) -> f64 {
    let mut bell = vec![0.0; m];
    bell[0] = 1.0;
    for n in 0..m.saturating_sub(1) {
        let mut binom = 1.0;
        let mut acc = 0.0;
        for k in 0..=n {
            acc += binom * bell[n - k] * y[k + 1];
            binom = binom * (n - k) as f64 / (k + 1) as f64;
        }
        bell[n + 1] = acc;
    }
    let mut sum = 0.0;
    let mut fact = 1.0;
    for (n, b) in bell.iter().enumerate() {
        if n > 0 {
            fact *= n as f64;
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * b / fact;
    }
    y[0].exp() * sum
}

/// Per-user-type evaluation context: serving geometry plus interferer populations.
#[derive(Clone, Debug)]
pub struct UserContext {
    pub user: UserType,
    pub serving: ServingGeometry,
    pub fields: Vec<InterfererGeometry>,
    pub net: NetworkConfig,
    pub pattern: AntennaPattern,
    pub mode: Mode,
}

impl UserContext {
    pub fn new(
        user: UserType,
        scheme: &SchemeConfig,
        net: &NetworkConfig,
        env: &EnvironmentParams,
        pattern: &AntennaPattern,
        mode: Mode,
    ) -> Result<Self> {
        let serving = ServingGeometry::new(user, scheme, net, env, pattern)?;
        let fields = scheme
            .interferer_fields(user, net)
            .iter()
            .map(|f| InterfererGeometry::new(f, &serving.channel, pattern, net.p_t))
            .collect();
        Ok(Self {
            user,
            serving,
            fields,
            net: *net,
            pattern: *pattern,
            mode,
        })
    }

    /// Interferer population of the given base-station group.
    pub fn field(&self, kind: BsKind, scheme: &SchemeConfig) -> Option<&InterfererGeometry> {
        let kinds: Vec<BsKind> = scheme.interferer_fields(self.user, &self.net).iter().map(|f| f.kind).collect();
        kinds.iter().position(|&k| k == kind).map(|i| &self.fields[i])
    }

    /// `z = m_v γ_t / (P_t l_v(r) G_j(r))`.
    pub fn z(&self, r: f64, link: LinkClass, tier: Tier) -> f64 {
        let ch = &self.serving.channel;
        let g = self.pattern.tier_gain(tier, r, ch.dh, self.serving.tilt);
        ch.nakagami_m(link) as f64 * self.net.gamma_t / (self.net.p_t * ch.path_loss(link, r) * g)
    }

    /// Summed `zⁿ A⁽ⁿ⁾(z)` over all interferer populations.
    pub fn total_exponent(&self, z: f64, order: usize, serving_r: f64) -> Result<LaplaceExponent> {
        let mut total = LaplaceExponent::zero(z, order);
        for f in &self.fields {
            total.add(&f.exponent(z, order, serving_r, &self.pattern)?);
        }
        Ok(total)
    }

    pub fn conditional_outage_noise_limited(&self, r: f64, link: LinkClass, tier: Tier) -> f64 {
        let m = self.serving.channel.nakagami_m(link);
        regularized_gamma_p(m, self.z(r, link, tier) * self.net.noise)
    }

    pub fn conditional_outage_general(&self, r: f64, link: LinkClass, tier: Tier) -> Result<f64> {
        let m = self.serving.channel.nakagami_m(link) as usize;
        let z = self.z(r, link, tier);
        if z == 0.0 {
            return Ok(0.0);
        }
        if z * self.net.noise > NOISE_CUTOFF || !z.is_finite() {
            return Ok(1.0);
        }
        let a = self.total_exponent(z, m - 1, r)?;
        Ok(outage_from_exponent(&a.scaled, z * self.net.noise, m))
    }

    pub fn conditional_outage(&self, r: f64, link: LinkClass, tier: Tier) -> Result<f64> {
        match self.mode {
            Mode::General => self.conditional_outage_general(r, link, tier),
            Mode::NoiseLimited => Ok(self.conditional_outage_noise_limited(r, link, tier)),
        }
    }

    /// LoS and NLoS conditional outages at the same serving distance, sharing one
    /// interference quadrature.
    fn conditional_pair(&self, r: f64, tier: Tier) -> Result<[f64; 2]> {
        if self.mode == Mode::NoiseLimited {
            return Ok(LinkClass::ALL.map(|v| self.conditional_outage_noise_limited(r, v, tier)));
        }
        let ch = &self.serving.channel;
        let mut out = [1.0; 2];
        let mut requests = Vec::with_capacity(2);
        let mut which = Vec::with_capacity(2);
        for v in LinkClass::ALL {
            let z = self.z(r, v, tier);
            if z == 0.0 {
                out[v.index()] = 0.0;
            } else if z.is_finite() && z * self.net.noise <= NOISE_CUTOFF {
                requests.push(ExponentRequest {
                    z,
                    order: ch.nakagami_m(v) as usize - 1,
                });
                which.push(v);
            }
        }
        if requests.is_empty() {
            return Ok(out);
        }
        let mut slots = [0.0; SLOTS];
        for f in &self.fields {
            let s = f.scaled_exponents(r, &requests, &self.pattern)?;
            for (a, b) in slots.iter_mut().zip(s) {
                *a += b;
            }
        }
        let mut offset = 0;
        for (q, v) in requests.iter().zip(which) {
            let m = q.order + 1;
            out[v.index()] = outage_from_exponent(&slots[offset..offset + m], q.z * self.net.noise, m);
            offset += m;
        }
        Ok(out)
    }

    /// Unconditional outage of a typical user of this type.
    pub fn user_outage(&self) -> Result<f64> {
        if self.net.gamma_t == 0.0 {
            return Ok(0.0);
        }
        if self.serving.lambda == 0.0 {
            return Ok(1.0);
        }
        let r_max = self.serving.truncation_radius();
        let pts = self.serving.breakpoints(0.0, r_max);
        let mut failure: Option<Error> = None;
        let integrand = |r: f64| -> [f64; 1] {
            if failure.is_some() {
                return [0.0];
            }
            let tier = self.serving.bounds.tier_of(r);
            let density = LinkClass::ALL.map(|v| self.serving.nearest_joint_density(r, v, tier));
            if density.iter().all(|&d| d < 1e-300) {
                return [0.0];
            }
            match self.conditional_pair(r, tier) {
                Ok(p) => [density[0] * p[0] + density[1] * p[1]],
                Err(e) => {
                    failure = Some(e);
                    [0.0]
                }
            }
        };
        let res = integrate_piecewise(integrand, &pts, OUTER_TOL);
        if let Some(e) = failure {
            return Err(e.in_context(format!("{} user outage", self.user.label())));
        }
        // Mass beyond the truncation radius: no eligible BS nearby, counted as outage.
        let void = (-std::f64::consts::PI * self.serving.lambda * r_max * r_max).exp();
        Ok((res.map_err(|e| e.in_context(format!("{} user outage", self.user.label())))?.value[0] + void).clamp(0.0, 1.0))
    }
}

/// Outage from the summed interference exponent slots `zⁿ A⁽ⁿ⁾(z)` and `x = zσ²`.
fn outage_from_exponent(scaled: &[f64], noise_term: f64, m: usize) -> f64 {
    let mut y = [0.0; SLOTS];
    y[..m].copy_from_slice(&scaled[..m]);
    y[0] -= noise_term;
    if m > 1 {
        y[1] -= noise_term;
    }
    (1.0 - coverage_from_scaled(&y[..m], m)).clamp(0.0, 1.0)
}

/// Analytical evaluator for one scheme configuration.
#[derive(Clone, Copy, Debug)]
pub struct Analyzer {
    pub net: NetworkConfig,
    pub env: EnvironmentParams,
    pub pattern: AntennaPattern,
    pub scheme: SchemeConfig,
    pub mode: Mode,
}

impl Analyzer {
    pub fn new(net: NetworkConfig, env: EnvironmentParams, pattern: AntennaPattern, scheme: SchemeConfig, mode: Mode) -> Result<Self> {
        net.validate()?;
        env.validate()?;
        pattern.validate()?;
        scheme.validate()?;
        Ok(Self {
            net,
            env,
            pattern,
            scheme,
            mode,
        })
    }

    pub fn with_scheme(&self, scheme: SchemeConfig) -> Self {
        Self { scheme, ..*self }
    }

    pub fn context(&self, user: UserType) -> Result<UserContext> {
        UserContext::new(user, &self.scheme, &self.net, &self.env, &self.pattern, self.mode)
    }

    pub fn user_outage(&self, user: UserType) -> Result<OutageEstimate> {
        Ok(OutageEstimate::analytic(self.context(user)?.user_outage()?))
    }

    /// `ρ_G P_G + ρ_A P_A`; user types with zero share are skipped.
    pub fn network_outage(&self) -> Result<OutageEstimate> {
        let mut p = 0.0;
        for user in UserType::ALL {
            let share = self.net.user_share(user);
            if share > 0.0 {
                p += share * self.context(user)?.user_outage()?;
            }
        }
        Ok(OutageEstimate::analytic(p))
    }
}

/// `zⁿ A⁽ⁿ⁾(z)` of the interferer group `interferer` for a user served at distance `serving_r`.
pub fn log_laplace_with_derivatives(
    z: f64,
    order: usize,
    serving_r: f64,
    serving_user: UserType,
    interferer: BsKind,
    scheme: &SchemeConfig,
    net: &NetworkConfig,
    env: &EnvironmentParams,
    pattern: &AntennaPattern,
) -> Result<LaplaceExponent> {
    let ctx = UserContext::new(serving_user, scheme, net, env, pattern, Mode::General)?;
    match ctx.field(interferer, scheme) {
        Some(f) => f.exponent(z, order, serving_r, pattern),
        None => Ok(LaplaceExponent::zero(z, order)),
    }
}

pub fn conditional_outage_general(
    r: f64,
    link: LinkClass,
    tier: Tier,
    user: UserType,
    scheme: &SchemeConfig,
    net: &NetworkConfig,
    env: &EnvironmentParams,
    pattern: &AntennaPattern,
) -> Result<f64> {
    UserContext::new(user, scheme, net, env, pattern, Mode::General)?.conditional_outage_general(r, link, tier)
}

pub fn conditional_outage_noise_limited(
    r: f64,
    link: LinkClass,
    tier: Tier,
    user: UserType,
    scheme: &SchemeConfig,
    net: &NetworkConfig,
    env: &EnvironmentParams,
    pattern: &AntennaPattern,
) -> Result<f64> {
    Ok(UserContext::new(user, scheme, net, env, pattern, Mode::NoiseLimited)?.conditional_outage_noise_limited(r, link, tier))
}

pub fn user_type_network_outage(
    user: UserType,
    scheme: &SchemeConfig,
    net: &NetworkConfig,
    env: &EnvironmentParams,
    pattern: &AntennaPattern,
    mode: Mode,
) -> Result<OutageEstimate> {
    Analyzer::new(*net, *env, *pattern, *scheme, mode)?.user_outage(user)
}

pub fn network_outage(
    scheme: &SchemeConfig,
    net: &NetworkConfig,
    env: &EnvironmentParams,
    pattern: &AntennaPattern,
    mode: Mode,
) -> Result<OutageEstimate> {
    Analyzer::new(*net, *env, *pattern, *scheme, mode)?.network_outage()
}
