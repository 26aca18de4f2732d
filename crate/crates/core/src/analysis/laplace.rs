//! Log-Laplace transform of the interference from one thinned base-station
//! population, with exact derivatives in `z`.
//!
//! Derivatives are returned in the scaled form `zⁿ A⁽ⁿ⁾(z)`, which is
//! dimensionless and is exactly what the Bell-polynomial outage formula needs.

use std::f64::consts::PI;

use crate::antenna::{boundaries_for_gap, AntennaPattern, TierBoundaries};
use crate::error::{Error, Result};
use crate::model::{InterfererField, LinkClass, UserChannel};
use crate::quadrature::{integrate_piecewise, Tolerance};

/// Largest supported LoS Nakagami shape; derivative orders run up to `m_L − 1`.
pub const MAX_NAKAGAMI_M: usize = 8;

pub(crate) const SLOTS: usize = MAX_NAKAGAMI_M + 1;

const LAPLACE_TOL: Tolerance = Tolerance::new(1e-10, 1e-9);

/// `zⁿ A⁽ⁿ⁾(z)` for `n = 0..=order`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplaceExponent {
    pub z: f64,
    pub scaled: Vec<f64>,
}

impl LaplaceExponent {
    pub fn zero(z: f64, order: usize) -> Self {
        Self {
            z,
            scaled: vec![0.0; order + 1],
        }
    }

    pub fn order(&self) -> usize {
        self.scaled.len() - 1
    }

    /// `A(z)`.
    pub fn value(&self) -> f64 {
        self.scaled[0]
    }

    /// `A⁽ⁿ⁾(z)`.
    pub fn derivative(&self, n: usize) -> f64 {
        if n == 0 {
            self.scaled[0]
        } else {
            self.scaled[n] / self.z.powi(n as i32)
        }
    }

    /// Laplace transform `E[exp(−z I)] = exp(A(z))`.
    pub fn transform(&self) -> f64 {
        self.scaled[0].exp()
    }

    pub(crate) fn add(&mut self, other: &LaplaceExponent) {
        for (a, b) in self.scaled.iter_mut().zip(&other.scaled) {
            *a += b;
        }
    }
}

/// Scaled derivatives of `g(z) = 1 − (1 + z a/m)^(−m)` at `x = z a / m`:
/// `out[n] = zⁿ g⁽ⁿ⁾(z) = (−1)^(n+1) (m)ₙ xⁿ (1 + x)^(−m−n)` for `n ≥ 1`.
pub(crate) fn scaled_kernel(m: f64, x: f64, out: &mut [f64]) {
    out[0] = -(-m * x.ln_1p()).exp_m1();
    if out.len() == 1 {
        return;
    }
    let base = (-m * x.ln_1p()).exp();
    let ratio = x / (1.0 + x);
    let mut coeff = 1.0;
    let mut pow = 1.0;
    for n in 1..out.len() {
        coeff *= m + (n - 1) as f64;
        pow *= ratio;
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        out[n] = sign * coeff * pow * base;
    }
}

/// One interfering population as seen by a user of a given channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterfererGeometry {
    pub channel: UserChannel,
    /// Main-lobe tiers of the interferers' tilt towards this user.
    pub bounds: TierBoundaries,
    pub tilt: f64,
    pub density: f64,
    pub excludes_serving_disc: bool,
    pub p_t: f64,
}

/// A request for `zⁿ A⁽ⁿ⁾(z)`, `n = 0..=order`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ExponentRequest {
    pub z: f64,
    pub order: usize,
}

impl InterfererGeometry {
    pub fn new(field: &InterfererField, channel: &UserChannel, pattern: &AntennaPattern, p_t: f64) -> Self {
        Self {
            channel: *channel,
            bounds: boundaries_for_gap(channel.dh, field.tilt, pattern),
            tilt: field.tilt,
            density: field.density,
            excludes_serving_disc: field.excludes_serving_disc,
            p_t,
        }
    }

    /// Closest possible interferer given a serving BS at horizontal distance `r`.
    pub fn lower_limit(&self, serving_r: f64) -> f64 {
        if self.excludes_serving_disc {
            serving_r
        } else {
            0.0
        }
    }

    /// Integration breakpoints on `[lower, ∞)`.
    fn breakpoints(&self, serving_r: f64) -> Vec<f64> {
        let lo = self.lower_limit(serving_r);
        let mut pts = vec![lo];
        pts.extend(self.bounds.interior_breaks(lo, f64::INFINITY));
        if serving_r > 0.0 {
            pts.extend([1.0, 2.0, 4.0, 16.0].iter().map(|c| c * serving_r).filter(|&x| x > lo));
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts.push(f64::INFINITY);
        pts
    }

    /// Evaluates every request in one adaptive pass; returns the packed slots.
    pub(crate) fn scaled_exponents(
        &self,
        serving_r: f64,
        requests: &[ExponentRequest],
        pattern: &AntennaPattern,
    ) -> Result<[f64; SLOTS]> {
        let used: usize = requests.iter().map(|q| q.order + 1).sum();
        if used > SLOTS {
            return Err(Error::invalid("environment.m_los", format!("at most {MAX_NAKAGAMI_M} is supported")));
        }
        if self.density == 0.0 || requests.iter().all(|q| q.z == 0.0) {
            return Ok([0.0; SLOTS]);
        }
        let ch = &self.channel;
        let m = [ch.m[0] as f64, ch.m[1] as f64];
        let integrand = |t: f64| -> [f64; SLOTS] {
            let mut acc = [0.0; SLOTS];
            let mut scratch = [0.0; SLOTS];
            let g = pattern.gain_at(t, ch.dh, self.tilt, &self.bounds);
            let p_los = ch.link_prob(LinkClass::Los, t);
            for link in LinkClass::ALL {
                let p = if link == LinkClass::Los { p_los } else { 1.0 - p_los };
                if p == 0.0 {
                    continue;
                }
                let a = self.p_t * g * ch.path_loss(link, t);
                let mv = m[link.index()];
                let mut offset = 0;
                for q in requests {
                    let out = &mut scratch[offset..offset + q.order + 1];
                    scaled_kernel(mv, q.z * a / mv, out);
                    for (slot, v) in acc[offset..].iter_mut().zip(out.iter()) {
                        *slot += p * v;
                    }
                    offset += q.order + 1;
                }
            }
            acc.map(|v| -2.0 * PI * self.density * t * v)
        };
        let pts = self.breakpoints(serving_r);
        integrate_piecewise(integrand, &pts, LAPLACE_TOL)
            .map(|i| i.value)
            .map_err(|e| e.in_context(format!("interference Laplace exponent at z = {:e}", requests[0].z)))
    }

    /// `zⁿ A⁽ⁿ⁾(z)` for `n = 0..=order` given a serving BS at distance `serving_r`.
    pub fn exponent(&self, z: f64, order: usize, serving_r: f64, pattern: &AntennaPattern) -> Result<LaplaceExponent> {
        let slots = self.scaled_exponents(serving_r, &[ExponentRequest { z, order }], pattern)?;
        Ok(LaplaceExponent {
            z,
            scaled: slots[..=order].to_vec(),
        })
    }
}
