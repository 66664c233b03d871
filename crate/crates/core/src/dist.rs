//! Symmetric unimodal location-family primitives.
//!
//! All interval constructions in this crate are stated for a generic symmetric
//! unimodal density `f` with distribution function `F`; the only backend shipped
//! is the standard normal. Quantities follow the upper-quantile convention
//! `c_p = F⁻¹(1 − p)`.

use crate::error::{Error, Result};

/// A location family with density symmetric about zero and unimodal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocationFamily {
    StandardNormal,
}

impl LocationFamily {
    /// Density f(x).
    pub fn pdf(self, x: f64) -> f64 {
        match self {
            LocationFamily::StandardNormal => {
                const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_68;
                INV_SQRT_2PI * (-0.5 * x * x).exp()
            }
        }
    }

    /// Distribution function F(x).
    pub fn cdf(self, x: f64) -> f64 {
        match self {
            LocationFamily::StandardNormal => {
                // Φ(x) = erfc(−x/√2)/2; the erfc route keeps full relative
                // accuracy in the lower tail, which the upper tail inherits
                // by symmetry at the call sites that need it.
                0.5 * erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
            }
        }
    }

    /// F⁻¹(p) for p ∈ (0, 1).
    pub fn inv_cdf(self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!(
                "inv_cdf requires p in (0,1), got {p}"
            )));
        }
        match self {
            LocationFamily::StandardNormal => Ok(normal_inv_cdf(p)),
        }
    }

    /// Upper quantile c_p = F⁻¹(1 − p).
    ///
    /// Evaluated as −F⁻¹(p), which preserves tail accuracy for small p where
    /// forming 1 − p directly would lose precision.
    pub fn upper_quantile(self, p: f64) -> Result<f64> {
        Ok(-self.inv_cdf(p)?)
    }
}

/// Abramowitz–Stegun 7.1.26-class rational erf/erfc (Cody's SPECFUN fits),
/// relative error below 1.5e-16 on the whole line.
#[cfg(test)]
fn erf(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        erf_small(x)
    } else {
        let e = erfc_large(y);
        if x >= 0.0 {
            1.0 - e
        } else {
            e - 1.0
        }
    }
}

fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        1.0 - erf_small(x)
    } else if x > 0.0 {
        erfc_large(y)
    } else {
        2.0 - erfc_large(y)
    }
}

fn erf_small(x: f64) -> f64 {
    const A: [f64; 5] = [
        3.161_123_743_870_565_6e0,
        1.138_641_541_510_501_6e2,
        3.774_852_376_853_020_2e2,
        3.209_377_589_138_469_5e3,
        1.857_777_061_846_031_5e-1,
    ];
    const B: [f64; 4] = [
        2.360_129_095_234_412e1,
        2.440_246_379_344_441_7e2,
        1.282_616_526_077_372_3e3,
        2.844_236_833_439_171e3,
    ];
    let z = x * x;
    let mut num = A[4] * z;
    let mut den = z;
    for i in 0..3 {
        num = (num + A[i]) * z;
        den = (den + B[i]) * z;
    }
    x * (num + A[3]) / (den + B[3])
}

/// erfc(y) for y > 0.46875.
fn erfc_large(y: f64) -> f64 {
    const C: [f64; 9] = [
        5.641_884_969_886_701e-1,
        8.883_149_794_388_376e0,
        6.611_919_063_714_163e1,
        2.986_351_381_974_001_3e2,
        8.819_522_212_417_691e2,
        1.712_047_612_634_070_6e3,
        2.051_078_377_826_071_5e3,
        1.230_339_354_797_997_2e3,
        2.153_115_354_744_038_5e-8,
    ];
    const D: [f64; 8] = [
        1.574_492_611_070_983_5e1,
        1.176_939_508_913_125e2,
        5.371_811_018_620_098_5e2,
        1.621_389_574_566_690_2e3,
        3.290_799_235_733_459_7e3,
        4.362_619_090_143_247e3,
        3.439_367_674_143_721_6e3,
        1.230_339_354_803_749_4e3,
    ];
    const P: [f64; 6] = [
        3.053_266_349_612_323_4e-1,
        3.603_448_999_498_044_4e-1,
        1.257_817_261_112_292_5e-1,
        1.608_378_514_874_227_6e-2,
        6.587_491_615_298_378e-4,
        1.631_538_713_730_209_8e-2,
    ];
    const Q: [f64; 5] = [
        2.568_520_192_289_822_4e0,
        1.872_952_849_923_460_4e0,
        5.279_051_029_514_284e-1,
        6.051_834_131_244_132e-2,
        2.335_204_976_268_691_8e-3,
    ];
    const INV_SQRT_PI: f64 = 5.641_895_835_477_563e-1;

    if y > 26.5 {
        // erfc underflows to ~1e-306 near 26.5; beyond that return 0.
        return 0.0;
    }
    let r = if y <= 4.0 {
        let mut num = C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + C[i]) * y;
            den = (den + D[i]) * y;
        }
        (num + C[7]) / (den + D[7])
    } else {
        let z = 1.0 / (y * y);
        let mut num = P[5] * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + P[i]) * z;
            den = (den + Q[i]) * z;
        }
        (INV_SQRT_PI - z * (num + P[4]) / (den + Q[4])) / y
    };
    // exp(−y²) split via the truncated square keeps the product accurate.
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp() * r
}

/// Acklam's rational approximation to Φ⁻¹ with one Newton polish step.
fn normal_inv_cdf(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239e0,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838e0,
        -2.549_732_539_343_734e0,
        4.374_664_141_464_968e0,
        2.938_163_982_698_783e0,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996e0,
        3.754_408_661_907_416e0,
    ];
    const P_LOW: f64 = 0.02425;

    // Delegate p > 1/2 to the lower half so both tails get the full relative
    // accuracy of the lower-tail branch.
    if p > 0.5 {
        return -normal_inv_cdf(1.0 - p);
    }

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };

    // One Newton step against the high-accuracy CDF; the residual after this
    // is dominated by f64 rounding for any p not deep in the tails.
    let fam = LocationFamily::StandardNormal;
    if x * x < 1400.0 {
        let e = fam.cdf(x) - p;
        let d = fam.pdf(x);
        if d > 0.0 {
            return x - e / d;
        }
    }
    x
}

/// Bisection root finder for a monotone function with a sign change on [lo, hi].
///
/// Runs until the bracket width is at most `tol` and returns the bracket
/// midpoint. Fails if f(lo)·f(hi) > 0.
pub fn find_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut lo = lo;
    let mut hi = hi;
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracket(format!(
            "no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}"
        )));
    }
    let mut iter = 0usize;
    while hi - lo > tol && iter < 200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket below f64 resolution
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        iter += 1;
    }
    Ok(0.5 * (lo + hi))
}

/// Fisher z-transform of a sample correlation: atanh(r)·√(n − 3).
pub fn fisher_z(r: f64, n: usize) -> Result<f64> {
    if !(r.is_finite() && r.abs() < 1.0) {
        return Err(Error::Domain(format!("fisher_z requires |r| < 1, got {r}")));
    }
    if n < 4 {
        return Err(Error::Domain(format!("fisher_z requires n >= 4, got {n}")));
    }
    Ok(r.atanh() * ((n - 3) as f64).sqrt())
}

/// Inverse of [`fisher_z`]: maps a z-scale value back to a correlation in (−1, 1).
pub fn fisher_z_inv(z: f64, n: usize) -> Result<f64> {
    if n < 4 {
        return Err(Error::Domain(format!(
            "fisher_z_inv requires n >= 4, got {n}"
        )));
    }
    Ok((z / ((n - 3) as f64).sqrt()).tanh())
}
