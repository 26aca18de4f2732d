//! Vertical 3GPP antenna pattern, main-lobe boundaries and the tier partition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{elevation_from_gap, NetworkConfig, Tier, UserType};

/// Gain law applied on top of the tier partition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GainModel {
    /// `10^(−min(12((θ + θ_t)/θ_3dB)², η)/10)`.
    #[default]
    ThreeGpp,
    /// Constant `main` gain in tier 2 and `side` gain in tiers 1 and 3.
    Simplified { side: f64, main: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AntennaPattern {
    /// 3 dB beamwidth in degrees.
    pub theta_3db: f64,
    /// Side-lobe attenuation floor in dB.
    pub eta_db: f64,
    pub gain: GainModel,
}

impl Default for AntennaPattern {
    fn default() -> Self {
        Self {
            theta_3db: 10.0,
            eta_db: 20.0,
            gain: GainModel::ThreeGpp,
        }
    }
}

impl AntennaPattern {
    pub fn simplified(side: f64, main: f64) -> Self {
        Self {
            gain: GainModel::Simplified { side, main },
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta_3db > 0.0 && self.theta_3db.is_finite()) {
            return Err(Error::invalid("antenna.theta_3db", "must be positive"));
        }
        if !(self.eta_db > 0.0 && self.eta_db.is_finite()) {
            return Err(Error::invalid("antenna.eta_db", "must be positive"));
        }
        if let GainModel::Simplified { side, main } = self.gain {
            if !(side > 0.0 && side <= main && main <= 1.0) {
                return Err(Error::invalid("antenna.gain", "requires 0 < side <= main <= 1"));
            }
        }
        Ok(())
    }

    /// Half-width of the elevation band served by the main lobe, `θ_3dB √(η/12)`.
    pub fn theta_th(&self) -> f64 {
        self.theta_3db * (self.eta_db / 12.0).sqrt()
    }

    /// Linear side-lobe floor `10^(−η/10)`.
    pub fn side_lobe(&self) -> f64 {
        10f64.powf(-self.eta_db / 10.0)
    }

    /// Smallest gain the pattern can produce.
    pub fn min_gain(&self) -> f64 {
        match self.gain {
            GainModel::ThreeGpp => self.side_lobe(),
            GainModel::Simplified { side, .. } => side,
        }
    }

    /// 3GPP gain at elevation `elevation` (degrees) for a beam tilted by `tilt`.
    pub fn gain_at_elevation(&self, elevation: f64, tilt: f64) -> f64 {
        let x = (elevation + tilt) / self.theta_3db;
        10f64.powf(-(12.0 * x * x).min(self.eta_db) / 10.0)
    }

    /// Gain towards a user at height offset `dh = h_user − h_b` and horizontal distance `r`.
    pub fn gain_at(&self, r: f64, dh: f64, tilt: f64, bounds: &TierBoundaries) -> f64 {
        match self.gain {
            GainModel::ThreeGpp => self.gain_at_elevation(elevation_from_gap(r, dh), tilt),
            GainModel::Simplified { side, main } => {
                if bounds.tier_of(r) == Tier::Main {
                    main
                } else {
                    side
                }
            }
        }
    }

    /// Main-lobe gain of tier `tier` at distance `r`, as used inside tier integrals.
    pub fn tier_gain(&self, tier: Tier, r: f64, dh: f64, tilt: f64) -> f64 {
        match (self.gain, tier) {
            (GainModel::ThreeGpp, Tier::Main) => {
                let x = (elevation_from_gap(r, dh) + tilt) / self.theta_3db;
                10f64.powf(-1.2 * x * x).max(self.side_lobe())
            }
            (GainModel::ThreeGpp, _) => self.side_lobe(),
            (GainModel::Simplified { main, .. }, Tier::Main) => main,
            (GainModel::Simplified { side, .. }, _) => side,
        }
    }
}

/// Radii `0 = b₁ ≤ b₂ ≤ b₃ ≤ b₄ = ∞` delimiting the three tiers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TierBoundaries {
    pub b: [f64; 4],
}

impl TierBoundaries {
    pub fn new(r_lb: f64, r_ub: f64) -> Self {
        let lb = r_lb.max(0.0);
        Self {
            b: [0.0, lb, r_ub.max(lb), f64::INFINITY],
        }
    }

    pub fn r_lb(&self) -> f64 {
        self.b[1]
    }

    pub fn r_ub(&self) -> f64 {
        self.b[2]
    }

    /// `(b_j, b_{j+1})` for `tier`.
    pub fn range(&self, tier: Tier) -> (f64, f64) {
        let j = tier.index();
        (self.b[j], self.b[j + 1])
    }

    pub fn is_empty(&self, tier: Tier) -> bool {
        let (lo, hi) = self.range(tier);
        !(hi > lo)
    }

    /// Tier containing horizontal distance `r`; boundary ties go to the main lobe.
    pub fn tier_of(&self, r: f64) -> Tier {
        if r < self.b[1] {
            Tier::Inner
        } else if r <= self.b[2] {
            Tier::Main
        } else {
            Tier::Outer
        }
    }

    /// Finite breakpoints `b₂`, `b₃` that lie strictly inside `(lo, hi)`.
    pub fn interior_breaks(&self, lo: f64, hi: f64) -> impl Iterator<Item = f64> + '_ {
        self.b[1..3].iter().copied().filter(move |&x| x > lo && x < hi && x.is_finite())
    }
}

/// Main-lobe boundaries for a user at height offset `dh = h_user − h_b`.
pub fn boundaries_for_gap(dh: f64, tilt: f64, pattern: &AntennaPattern) -> TierBoundaries {
    let th = pattern.theta_th();
    let tan_deg = |deg: f64| deg.to_radians().tan();
    let (lb, ub) = if dh < 0.0 {
        let lb = if tilt > -th { dh / tan_deg(-tilt - th) } else { f64::INFINITY };
        let ub = if tilt > th { dh / tan_deg(-tilt + th) } else { f64::INFINITY };
        (lb, ub)
    } else {
        let lb = if tilt < th { dh / tan_deg(-tilt + th) } else { f64::INFINITY };
        let ub = if tilt < -th { dh / tan_deg(-tilt - th) } else { f64::INFINITY };
        (lb, ub)
    };
    TierBoundaries::new(lb, ub)
}

/// Linear antenna gain towards a user of type `user` at horizontal distance `r`.
pub fn gain(r: f64, tilt: f64, user: UserType, net: &NetworkConfig, pattern: &AntennaPattern) -> f64 {
    let dh = net.height(user) - net.h_b;
    match pattern.gain {
        GainModel::ThreeGpp => pattern.gain_at_elevation(elevation_from_gap(r, dh), tilt),
        GainModel::Simplified { .. } => pattern.gain_at(r, dh, tilt, &boundaries_for_gap(dh, tilt, pattern)),
    }
}

/// Main-lobe service annulus `[r_lb, r_ub]`; negative radii are clamped to 0.
pub fn main_lobe_boundaries(tilt: f64, user: UserType, net: &NetworkConfig, pattern: &AntennaPattern) -> TierBoundaries {
    boundaries_for_gap(net.height(user) - net.h_b, tilt, pattern)
}

/// `r_ub − r_lb`; infinite whenever either bound is.
pub fn main_lobe_width(tilt: f64, user: UserType, net: &NetworkConfig, pattern: &AntennaPattern) -> f64 {
    let b = main_lobe_boundaries(tilt, user, net, pattern);
    if b.r_lb().is_infinite() || b.r_ub().is_infinite() {
        f64::INFINITY
    } else {
        (b.r_ub() - b.r_lb()).abs()
    }
}

pub fn tier_of(r: f64, tilt: f64, user: UserType, net: &NetworkConfig, pattern: &AntennaPattern) -> Tier {
    main_lobe_boundaries(tilt, user, net, pattern).tier_of(r)
}

/// Two-level gain: `g_main` in the main-lobe annulus, `g_side` elsewhere.
pub fn simplified_gain(r: f64, tilt: f64, user: UserType, net: &NetworkConfig, g_side: f64, g_main: f64) -> f64 {
    let pattern = AntennaPattern::simplified(g_side, g_main);
    if tier_of(r, tilt, user, net, &pattern) == Tier::Main {
        g_main
    } else {
        g_side
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net() -> NetworkConfig {
        NetworkConfig::default()
    }

    #[test]
    fn theta_th_default() {
        let p = AntennaPattern::default();
        assert!((p.theta_th() - 12.909_944_487_358_056).abs() < 1e-12);
    }

    #[test]
    fn gain_reference_values() {
        let p = AntennaPattern::default();
        let n = net();
        // Boresight: θ(r) = −tilt.
        assert!((gain(30.0, 45.0, UserType::Ground, &n, &p) - 1.0).abs() < 1e-12);
        assert!((gain(1000.0, -40.0, UserType::Ground, &n, &p) - 0.01).abs() < 1e-15);
        // θ = −45°, tilt 40° → 10^(−0.3).
        assert!((gain(30.0, 40.0, UserType::Ground, &n, &p) - 10f64.powf(-0.3)).abs() < 1e-12);
    }

    #[test]
    fn boundary_examples() {
        let p = AntennaPattern::default();
        let n = net();
        // Hand evaluation: −30 / tan(−32.9099°) and −30 / tan(−7.0901°).
        let th = p.theta_th().to_radians();
        let g = main_lobe_boundaries(20.0, UserType::Ground, &n, &p);
        let lb = 30.0 / (20f64.to_radians() + th).tan();
        let ub = 30.0 / (20f64.to_radians() - th).tan();
        assert!((g.r_lb() - lb).abs() < 1e-9 && (g.r_lb() - 46.36).abs() < 0.05);
        assert!((g.r_ub() - ub).abs() < 1e-9 && (g.r_ub() - 241.2).abs() < 0.2);

        let low = main_lobe_boundaries(5.0, UserType::Ground, &n, &p);
        assert!(low.r_lb().is_finite() && low.r_ub().is_infinite());

        let a = main_lobe_boundaries(-20.0, UserType::Aerial, &n, &p);
        assert!((a.r_lb() - 20.0 / (20f64.to_radians() + th).tan()).abs() < 1e-9);
        assert!((a.r_lb() - 30.90).abs() < 0.01 && (a.r_ub() - 160.8).abs() < 0.1);

        let none = main_lobe_boundaries(-20.0, UserType::Ground, &n, &p);
        assert_eq!(none.tier_of(1e6), Tier::Inner);
    }

    #[test]
    fn tiers_for_reference_geometry() {
        let p = AntennaPattern::default();
        let n = net();
        assert_eq!(tier_of(30.0, 20.0, UserType::Ground, &n, &p), Tier::Inner);
        assert_eq!(tier_of(100.0, 20.0, UserType::Ground, &n, &p), Tier::Main);
        assert_eq!(tier_of(300.0, 20.0, UserType::Ground, &n, &p), Tier::Outer);
        let b = main_lobe_boundaries(20.0, UserType::Ground, &n, &p);
        assert_eq!(b.tier_of(b.r_lb()), Tier::Main);
        assert_eq!(b.tier_of(b.r_ub()), Tier::Main);
    }

    #[test]
    fn steep_tilts_clamp_lower_bound() {
        let p = AntennaPattern::default();
        let n = net();
        let g = main_lobe_boundaries(85.0, UserType::Ground, &n, &p);
        assert_eq!(g.r_lb(), 0.0);
        assert_eq!(tier_of(0.0, 85.0, UserType::Ground, &n, &p), Tier::Main);
        let a = main_lobe_boundaries(-85.0, UserType::Aerial, &n, &p);
        assert_eq!(a.r_lb(), 0.0);
    }

    #[test]
    fn width_ordering_and_divergence() {
        let p = AntennaPattern::default();
        let n = net();
        assert!(main_lobe_width(20.0, UserType::Ground, &n, &p) > main_lobe_width(25.0, UserType::Ground, &n, &p));
        assert!(main_lobe_width(-25.0, UserType::Aerial, &n, &p) < main_lobe_width(-20.0, UserType::Aerial, &n, &p));
        let th = p.theta_th();
        assert!(main_lobe_width(th + 1e-9, UserType::Ground, &n, &p) > 1e9);
        assert!(main_lobe_width(th - 1e-9, UserType::Ground, &n, &p).is_infinite());
    }

    #[test]
    fn simplified_gain_levels() {
        let n = net();
        assert_eq!(simplified_gain(100.0, 20.0, UserType::Ground, &n, 0.01, 1.0), 1.0);
        assert_eq!(simplified_gain(30.0, 20.0, UserType::Ground, &n, 0.01, 1.0), 0.01);
        assert_eq!(simplified_gain(30.0, 20.0, UserType::Ground, &n, 0.3, 0.3), 0.3);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn user(aerial: bool) -> UserType {
            if aerial {
                UserType::Aerial
            } else {
                UserType::Ground
            }
        }

        proptest! {
            #[test]
            fn gain_bounded(r in 0.0f64..1e5, tilt in -89.0f64..89.0, aerial in any::<bool>()) {
                let p = AntennaPattern::default();
                let g = gain(r, tilt, user(aerial), &net(), &p);
                prop_assert!(g >= 0.01 && g <= 1.0);
            }

            #[test]
            fn tier_consistent_with_gain(r in 0.0f64..5000.0, tilt in -89.0f64..89.0, aerial in any::<bool>()) {
                let p = AntennaPattern::default();
                let n = net();
                let u = user(aerial);
                let theta = elevation_from_gap(r, n.height(u) - n.h_b);
                let x = (theta + tilt) / p.theta_3db;
                let exponent = 12.0 * x * x;
                let tier = tier_of(r, tilt, u, &n, &p);
                if (exponent - p.eta_db).abs() > 1e-9 {
                    prop_assert_eq!(tier == Tier::Main, exponent <= p.eta_db);
                }
            }

            #[test]
            fn gain_continuous_at_boundaries(tilt in -80.0f64..80.0, aerial in any::<bool>()) {
                let p = AntennaPattern::default();
                let n = net();
                let u = user(aerial);
                let b = main_lobe_boundaries(tilt, u, &n, &p);
                for &x in &[b.r_lb(), b.r_ub()] {
                    if x.is_finite() && x > 1e-3 {
                        let lo = gain(x * (1.0 - 1e-9), tilt, u, &n, &p);
                        let hi = gain(x * (1.0 + 1e-9), tilt, u, &n, &p);
                        prop_assert!((lo - hi).abs() < 1e-6);
                        prop_assert!((gain(x, tilt, u, &n, &p) - 0.01).abs() < 1e-9);
                    }
                }
            }

            #[test]
            fn boundaries_ordered(tilt in -89.9f64..89.9, aerial in any::<bool>(), h_b in 5.0f64..60.0) {
                let p = AntennaPattern::default();
                let n = NetworkConfig { h_b, h_a: h_b + 20.0, ..net() };
                let b = main_lobe_boundaries(tilt, user(aerial), &n, &p);
                prop_assert!(b.b[0] == 0.0 && b.b[0] <= b.b[1] && b.b[1] <= b.b[2] && b.b[3].is_infinite());
            }
        }

        #[test]
        fn corollary_monotonicity_scan() {
            let p = AntennaPattern::default();
            let n = net();
            let th = p.theta_th();
            let mut prev = f64::INFINITY;
            let mut t = (th * 10.0).ceil() / 10.0;
            while t <= 60.0 + 1e-9 {
                let w = main_lobe_width(t, UserType::Ground, &n, &p);
                assert!(w < prev, "GU width not decreasing at {t}");
                let b = main_lobe_boundaries(t, UserType::Ground, &n, &p);
                let b2 = main_lobe_boundaries(t + 0.1, UserType::Ground, &n, &p);
                assert!(b2.r_lb() < b.r_lb() && b2.r_ub() < b.r_ub());
                prev = w;
                t += 0.1;
            }
            let mut prev = 0.0;
            let mut t = -60.0;
            while t < -th {
                let w = main_lobe_width(t, UserType::Aerial, &n, &p);
                assert!(w > prev, "AU width not increasing at {t}");
                prev = w;
                t += 0.1;
            }
        }
    }
}
