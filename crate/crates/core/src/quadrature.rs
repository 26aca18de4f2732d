//! Adaptive Gauss–Kronrod (10/21-point) quadrature for vector-valued integrands.
//!
//! Every component of the integrand shares the same subdivision, so a value
//! and its derivatives can be integrated in a single pass. Semi-infinite
//! ranges are mapped onto `(0, 1]` with `t = a + (1 - s) / s`.

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for the odd-indexed Kronrod abscissae.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and limits for [`integrate`].
#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            max_intervals: 2000,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-10, 1e-10)
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Integral<const N: usize> {
    pub value: [f64; N],
    pub error: [f64; N],
    pub intervals: usize,
}

#[derive(Clone, Copy)]
struct Segment<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
}

fn kronrod21<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Segment<N>
where
    F: FnMut(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = [0.0; N];
    let mut gauss = [0.0; N];
    for i in 0..N {
        kron[i] = fc[i] * WGK[10];
    }
    for (k, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(10).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for i in 0..N {
            let s = f1[i] + f2[i];
            kron[i] += w * s;
            if k % 2 == 1 {
                gauss[i] += WG[k / 2] * s;
            }
        }
    }
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for i in 0..N {
        value[i] = kron[i] * half;
        error[i] = ((kron[i] - gauss[i]) * half).abs();
    }
    Segment { a, b, value, error }
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<const N: usize, F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    if a == b {
        return Ok(Integral {
            value: [0.0; N],
            error: [0.0; N],
            intervals: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut segments = vec![kronrod21(&mut f, lo, hi)];
    loop {
        let mut total = [0.0; N];
        let mut err = [0.0; N];
        for s in &segments {
            for i in 0..N {
                total[i] += s.value[i];
                err[i] += s.error[i];
            }
        }
        let limits: [f64; N] = std::array::from_fn(|i| tol.abs.max(tol.rel * total[i].abs()));
        if !(total.iter().chain(err.iter()).all(|v| v.is_finite())) {
            return Err(Error::NumericFailure {
                context: format!("integral over [{lo}, {hi}] is not finite"),
                error: f64::NAN,
                intervals: segments.len(),
            });
        }
        if (0..N).all(|i| err[i] <= limits[i]) {
            return Ok(Integral {
                value: total.map(|v| v * sign),
                error: err,
                intervals: segments.len(),
            });
        }
        if segments.len() >= tol.max_intervals {
            let worst = (0..N).map(|i| err[i]).fold(0.0, f64::max);
            return Err(Error::NumericFailure {
                context: format!("integral over [{lo}, {hi}]"),
                error: worst,
                intervals: segments.len(),
            });
        }
        let score = |s: &Segment<N>| -> f64 {
            (0..N)
                .map(|i| s.error[i] / limits[i].max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max)
        };
        let (idx, _) = segments
            .iter()
            .enumerate()
            .map(|(i, s)| (i, score(s)))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        let worst = segments.swap_remove(idx);
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            let worst_err = (0..N).map(|i| err[i]).fold(0.0, f64::max);
            return Err(Error::NumericFailure {
                context: format!("interval [{}, {}] cannot be bisected further", worst.a, worst.b),
                error: worst_err,
                intervals: segments.len() + 1,
            });
        }
        segments.push(kronrod21(&mut f, worst.a, mid));
        segments.push(kronrod21(&mut f, mid, worst.b));
    }
}

/// Integrates `f` over `[a, ∞)`.
pub fn integrate_to_infinity<const N: usize, F>(f: F, a: f64, tol: Tolerance) -> Result<Integral<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    integrate_to_infinity_scaled(f, a, 1.0, tol)
}

/// Integrates `f` over `[a, ∞)` through `t = a + L (1 - s) / s`, where `L` is the
/// length scale on which the integrand decays.
pub fn integrate_to_infinity_scaled<const N: usize, F>(mut f: F, a: f64, scale: f64, tol: Tolerance) -> Result<Integral<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    integrate(
        |s: f64| {
            if s <= 0.0 {
                return [0.0; N];
            }
            let t = a + scale * (1.0 - s) / s;
            let jac = scale / (s * s);
            f(t).map(|v| v * jac)
        },
        0.0,
        1.0,
        tol,
    )
}

/// Integrates over the ordered breakpoints `points`, where the last point may be
/// `f64::INFINITY`. Breakpoints are where the integrand may lose smoothness.
/// An infinite last piece `[a, ∞)` is mapped with length scale `max(a, 1)`.
pub fn integrate_piecewise<const N: usize, F>(mut f: F, points: &[f64], tol: Tolerance) -> Result<Integral<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    let mut out = Integral {
        value: [0.0; N],
        error: [0.0; N],
        intervals: 0,
    };
    let pieces = points.len().saturating_sub(1).max(1) as f64;
    let piece_tol = Tolerance {
        abs: tol.abs / pieces,
        ..tol
    };
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            continue;
        }
        let part = if b.is_infinite() {
            integrate_to_infinity_scaled(&mut f, a, a.abs().max(1.0), piece_tol)?
        } else {
            integrate(&mut f, a, b, piece_tol)?
        };
        for i in 0..N {
            out.value[i] += part.value[i];
            out.error[i] += part.error[i];
        }
        out.intervals += part.intervals;
    }
    Ok(out)
}

/// Scalar convenience wrapper around [`integrate`].
pub fn integrate_scalar<F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate(|x| [f(x)], a, b, tol).map(|r| r.value[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        let kron: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        let gauss: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((kron - 2.0).abs() < 1e-14);
        assert!((gauss - 2.0).abs() < 1e-14);
    }

    #[test]
    fn single_panel_exact_for_polynomials() {
        // Kronrod-21 is exact through degree 31, Gauss-10 through degree 19.
        for deg in 0..=31u32 {
            let mut f = |x: f64| [x.powi(deg as i32)];
            let seg = kronrod21(&mut f, -1.0, 1.0);
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((seg.value[0] - exact).abs() < 1e-13, "degree {deg}");
            if deg <= 19 {
                assert!(seg.error[0] < 1e-13, "gauss mismatch at degree {deg}");
            }
        }
    }

    #[test]
    fn adaptive_handles_peaks_and_tails() {
        let tol = Tolerance::new(1e-12, 1e-12);
        let v = integrate_scalar(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, tol).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v - exact).abs() / exact < 1e-10);

        let tail = integrate_to_infinity(|t| [(-t).exp(), 1.0 / (1.0 + t * t)], 0.0, tol).unwrap();
        assert!((tail.value[0] - 1.0).abs() < 1e-10);
        assert!((tail.value[1] - std::f64::consts::FRAC_PI_2).abs() < 1e-10);

        let far = integrate_to_infinity_scaled(|t| [t.powf(-3.5)], 500.0, 500.0, Tolerance::new(0.0, 1e-12)).unwrap();
        let exact = 500f64.powf(-2.5) / 2.5;
        assert!((far.value[0] - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let tol = Tolerance::default();
        let v = integrate_scalar(|x| x * x, 2.0, 0.0, tol).unwrap();
        assert!((v + 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn piecewise_skips_empty_pieces() {
        let tol = Tolerance::default();
        let r = integrate_piecewise(|x| [x.abs()], &[-1.0, 0.0, 0.0, 1.0], tol).unwrap();
        assert!((r.value[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nonconvergence_is_reported() {
        let tol = Tolerance {
            abs: 1e-14,
            rel: 0.0,
            max_intervals: 4,
        };
        let err = integrate_scalar(|x| (1.0 / x).sin(), 1e-6, 1.0, tol).unwrap_err();
        assert!(matches!(err, Error::NumericFailure { .. }));
    }
}
