//! Closed-form noise-limited outage for the two-level gain model when every
//! link is NLoS with path-loss exponent 4.
//!
//! With `u = r² + h̃²` the per-tier coverage integral
//! `∫ exp(−ω u²/G̃ⱼ) 2πλ r e^(−πλr²) dr` is a Gaussian integral in `u`:
//!
//! ```text
//! πλ e^(πλh̃²) ∫ exp(−ω u²/G̃ − πλ u) du
//!   = (√π/2) √(G̃/ω) πλ exp(πλh̃² + π²λ²G̃/(4ω)) [erf(x(b_{j+1})) − erf(x(b_j))],
//! x(b) = (πλG̃ + 2ω(b² + h̃²)) / (2√(ωG̃)),   ω = γ_t σ² / P_t.
//! ```
//!
//! Each bracket term is evaluated as `erfcx(x) · exp(−πλb² − ωu²/G̃)` so that
//! nothing overflows.

use std::f64::consts::PI;

use libm::{erf, erfc};

use crate::antenna::{boundaries_for_gap, AntennaPattern};
use crate::error::{Error, Result};
use crate::model::{NetworkConfig, SchemeConfig, Tier, UserType};
use crate::quadrature::{integrate_piecewise, Tolerance};

/// Scaled complementary error function `exp(x²) erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    if x < 25.0 {
        (x * x).exp() * erfc(x)
    } else {
        // Asymptotic series 1/(x√π) Σ (−1)ⁿ (2n−1)!! / (2x²)ⁿ.
        let inv = 1.0 / (2.0 * x * x);
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 1..8 {
            term *= -((2 * n - 1) as f64) * inv;
            sum += term;
        }
        sum / (x * PI.sqrt())
    }
}

struct Setup {
    omega: f64,
    g_side: f64,
    g_main: f64,
}

fn setup(net: &NetworkConfig, g_side: f64, g_main: f64) -> Result<Setup> {
    net.validate()?;
    if !(g_side > 0.0 && g_side <= g_main && g_main <= 1.0) {
        return Err(Error::invalid("antenna.gain", "requires 0 < side <= main <= 1"));
    }
    Ok(Setup {
        omega: net.gamma_t * net.noise / net.p_t,
        g_side,
        g_main,
    })
}

fn tier_gain(s: &Setup, tier: Tier) -> f64 {
    if tier == Tier::Main {
        s.g_main
    } else {
        s.g_side
    }
}

/// Coverage-integral antiderivative term `T(b)`; coverage of tier `j` is `T(b_j) − T(b_{j+1})`.
fn coverage_term(b: f64, h: f64, lambda: f64, g: f64, omega: f64) -> f64 {
    if b.is_infinite() {
        return 0.0;
    }
    let u = b * b + h * h;
    let x = (PI * lambda * g + 2.0 * omega * u) / (2.0 * (omega * g).sqrt());
    let pref = 0.5 * PI.sqrt() * (g / omega).sqrt() * PI * lambda;
    pref * erfcx(x) * (-PI * lambda * b * b - omega * u * u / g).exp()
}

/// Corrected closed form of the network outage under the simplified gain model.
pub fn closed_form_outage_simplified(scheme: &SchemeConfig, net: &NetworkConfig, pattern: &AntennaPattern, g_side: f64, g_main: f64) -> Result<f64> {
    let s = setup(net, g_side, g_main)?;
    let mut outage = 0.0;
    for user in UserType::ALL {
        let share = net.user_share(user);
        if share == 0.0 {
            continue;
        }
        let lambda = scheme.serving_density(user, net);
        if s.omega == 0.0 {
            continue;
        }
        if lambda == 0.0 {
            outage += share;
            continue;
        }
        let dh = net.height(user) - net.h_b;
        let bounds = boundaries_for_gap(dh, scheme.tilt_for(user), pattern);
        let mut coverage = 0.0;
        for tier in Tier::ALL {
            if bounds.is_empty(tier) {
                continue;
            }
            let (lo, hi) = bounds.range(tier);
            let g = tier_gain(&s, tier);
            coverage += coverage_term(lo, dh, lambda, g, s.omega) - coverage_term(hi, dh, lambda, g, s.omega);
        }
        outage += share * (1.0 - coverage);
    }
    Ok(outage.clamp(0.0, 1.0))
}

/// The closed form exactly as printed, with prefactor
/// `√G̃ π^(3/2) λ exp((4ωh̃² + πG̃λ)/(4ω)) / (2√ω)`. Kept to document its disagreement
/// with the integral it is derived from; it overflows for realistic heights.
pub fn closed_form_outage_published(scheme: &SchemeConfig, net: &NetworkConfig, pattern: &AntennaPattern, g_side: f64, g_main: f64) -> Result<f64> {
    let s = setup(net, g_side, g_main)?;
    let mut sum = 0.0;
    for user in UserType::ALL {
        let share = net.user_share(user);
        let lambda = scheme.serving_density(user, net);
        let h = (net.h_b - net.height(user)).abs();
        let bounds = boundaries_for_gap(net.height(user) - net.h_b, scheme.tilt_for(user), pattern);
        for tier in Tier::ALL {
            if bounds.is_empty(tier) {
                continue;
            }
            let g = tier_gain(&s, tier);
            let gj = |b: f64| {
                if b.is_infinite() {
                    1.0
                } else {
                    let root = (b * b + h * h).sqrt();
                    erf((g * lambda * PI + 2.0 * s.omega * root * root) / (2.0 * (s.omega * g).sqrt()))
                }
            };
            let (lo, hi) = bounds.range(tier);
            let factor = g.sqrt() * PI.powf(1.5) * lambda * ((4.0 * s.omega * h * h + PI * g * lambda) / (4.0 * s.omega)).exp() / (2.0 * s.omega.sqrt());
            sum += share * (gj(hi) - gj(lo)) * factor;
        }
    }
    Ok(1.0 - sum)
}

/// Direct quadrature of the per-tier coverage integrals, the reference for both closed forms.
pub fn simplified_outage_quadrature(scheme: &SchemeConfig, net: &NetworkConfig, pattern: &AntennaPattern, g_side: f64, g_main: f64) -> Result<f64> {
    let s = setup(net, g_side, g_main)?;
    let tol = Tolerance::new(1e-13, 1e-12);
    let mut outage = 0.0;
    for user in UserType::ALL {
        let share = net.user_share(user);
        if share == 0.0 {
            continue;
        }
        let lambda = scheme.serving_density(user, net);
        if lambda == 0.0 {
            outage += share;
            continue;
        }
        let h = net.height(user) - net.h_b;
        let bounds = boundaries_for_gap(h, scheme.tilt_for(user), pattern);
        let scale = 1.0 / (PI * lambda).sqrt();
        let mut coverage = 0.0;
        for tier in Tier::ALL {
            if bounds.is_empty(tier) {
                continue;
            }
            let (lo, hi) = bounds.range(tier);
            let g = tier_gain(&s, tier);
            let mut pts = vec![lo];
            pts.extend([0.5, 1.0, 2.0, 4.0, 8.0].iter().map(|c| c * scale).filter(|&x| x > lo && x < hi));
            pts.push(hi);
            let part = integrate_piecewise(
                |r| {
                    let u = r * r + h * h;
                    [(-s.omega * u * u / g).exp() * 2.0 * PI * lambda * r * (-PI * lambda * r * r).exp()]
                },
                &pts,
                tol,
            )?;
            coverage += part.value[0];
        }
        outage += share * (1.0 - coverage);
    }
    Ok(outage.clamp(0.0, 1.0))
}
