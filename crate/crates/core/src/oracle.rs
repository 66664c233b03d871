//! Independent brute-force validators for the fast paths: grid inversion of
//! acceptance regions, coverage quadrature driven only by the interval rule,
//! the literal step-up count, and the exact non-coverage probability of the
//! MQC sign-determination event.
//!
//! Everything here is deliberately slow and simple; tests compare it against
//! the closed-form implementations.

use crate::dist::{find_root, LocationFamily};
use crate::error::{Error, Result};
use crate::interval::{classify, classify_outside, Interval};
use crate::marginal::MarginalFamily;

/// A scan grid for acceptance-region inversion.
#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(lo < hi) || !(step > 0.0) {
            return Err(Error::Domain(format!(
                "invalid grid [{lo}, {hi}] step {step}"
            )));
        }
        Ok(GridSpec { lo, hi, step })
    }

    pub fn n_points(&self) -> usize {
        ((self.hi - self.lo) / self.step).round() as usize + 1
    }

    pub fn point(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step
    }
}

/// Scans θ over the grid and returns the convex hull [min, max] of the
/// accepted values {θ : y ∈ ar(θ)}. Endpoint error is at most one grid step.
pub fn invert_acceptance_grid(
    ar: &dyn Fn(f64) -> Interval,
    y: f64,
    grid: &GridSpec,
) -> Result<Interval> {
    let mut min = None;
    let mut max = None;
    for i in 0..grid.n_points() {
        let theta = grid.point(i);
        if ar(theta).contains(y) {
            if min.is_none() {
                min = Some(theta);
            }
            max = Some(theta);
        }
    }
    match (min, max) {
        (Some(a), Some(b)) => Ok(Interval::closed(a, b)),
        _ => Err(Error::Numeric(format!(
            "empty acceptance inversion at y={y}"
        ))),
    }
}

/// Batch variant of [`invert_acceptance_grid`]: the acceptance boundaries are
/// evaluated once per grid point and each y gets two early-exit scans.
/// Returns (min, max) of the accepted set per y, or None when empty.
pub fn invert_acceptance_batch(
    ar: &dyn Fn(f64) -> Interval,
    ys: &[f64],
    grid: &GridSpec,
) -> Vec<Option<(f64, f64)>> {
    let n = grid.n_points();
    let regions: Vec<Interval> = (0..n).map(|i| ar(grid.point(i))).collect();
    ys.iter()
        .map(|&y| {
            let lo = (0..n).find(|&i| regions[i].contains(y))?;
            let hi = (lo..n)
                .rev()
                .find(|&i| regions[i].contains(y))
                .unwrap_or(lo);
            Some((grid.point(lo), grid.point(hi)))
        })
        .collect()
}

/// Which inversion-based family an [`AcceptanceOracle`] describes.
#[derive(Clone, Copy, Debug)]
pub enum AcceptanceFamily {
    Qc { psi: f64 },
    Mqc { psi: f64 },
    MqcDelta { delta: f64 },
}

/// The 1−α acceptance regions of the inversion-based families, written
/// directly from their defining formulas (not from the piecewise interval
/// forms they invert to).
#[derive(Clone, Copy, Debug)]
pub struct AcceptanceOracle {
    dist: LocationFamily,
    alpha: f64,
    kind: OracleKind,
}

#[derive(Clone, Copy, Debug)]
enum OracleKind {
    Qc {
        cbar: f64,
        ctilde: f64,
        c_half: f64,
    },
    Mqc {
        cbar: f64,
        c_half: f64,
    },
    MqcDelta {
        delta: f64,
        cbar_d: f64,
        c_half: f64,
    },
}

impl AcceptanceOracle {
    pub fn new(dist: LocationFamily, alpha: f64, family: AcceptanceFamily) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!(
                "alpha must lie in (0,1), got {alpha}"
            )));
        }
        let c_half = dist.upper_quantile(alpha / 2.0)?;
        let kind = match family {
            AcceptanceFamily::Qc { psi } => OracleKind::Qc {
                cbar: dist.upper_quantile(psi * alpha)?,
                ctilde: dist.upper_quantile((1.0 - psi) * alpha)?,
                c_half,
            },
            AcceptanceFamily::Mqc { psi } => OracleKind::Mqc {
                cbar: dist.upper_quantile(psi * alpha)?,
                c_half,
            },
            AcceptanceFamily::MqcDelta { delta } => {
                let cbar_d = find_root(
                    |c| dist.cdf(c) - dist.cdf(-2.0 * delta - c) - (1.0 - alpha),
                    0.0,
                    c_half,
                    1e-12,
                )?;
                OracleKind::MqcDelta {
                    delta,
                    cbar_d,
                    c_half,
                }
            }
        };
        Ok(AcceptanceOracle { dist, alpha, kind })
    }

    /// g(θ) = θ + F⁻¹{1 − α + F(−b − θ)} for a shift b.
    fn g(&self, b: f64, theta: f64) -> f64 {
        let tail = self.alpha - self.dist.cdf(-b - theta);
        theta + self.dist.upper_quantile(tail).expect("tail in (0,1)")
    }

    /// The acceptance region A(θ).
    pub fn region(&self, theta: f64) -> Interval {
        if theta < 0.0 {
            return self.region(-theta).reflect();
        }
        match self.kind {
            // At θ = 0 both families use the θ → 0⁺ limit of the region. The
            // asymmetric region (−∞, c_α) printed for θ = 0 realizes the
            // weak-closure label of the interval at zero, not its hull
            // geometry: inverting it literally would glue θ = 0 into the hull
            // at every negative y.
            OracleKind::Qc {
                cbar,
                ctilde,
                c_half,
            } => {
                if theta <= cbar {
                    Interval::open(theta - cbar, theta + ctilde)
                } else if theta <= c_half {
                    // (0, θ + F⁻¹(1 − α + F(−θ)))
                    Interval::open(0.0, self.g(0.0, theta))
                } else {
                    Interval::open(theta - c_half, theta + c_half)
                }
            }
            OracleKind::Mqc { cbar, c_half } => {
                if theta <= cbar + c_half {
                    Interval::open(-cbar, self.g(cbar, theta))
                } else {
                    Interval::open(theta - c_half, theta + c_half)
                }
            }
            OracleKind::MqcDelta {
                delta,
                cbar_d,
                c_half,
            } => {
                let shift = delta + cbar_d;
                if theta <= delta {
                    Interval::open(-shift, shift)
                } else if theta < shift + c_half {
                    Interval::open(-shift, self.g(shift, theta))
                } else {
                    Interval::open(theta - c_half, theta + c_half)
                }
            }
        }
    }
}

/// Coverage probability P_θ(θ ∈ C(Y; α)) computed only from the interval rule:
/// the covered y-set is located by boolean bisection on the monotone interval
/// boundaries, then refined into cells at the rule's breakpoints and summed as
/// exact F-differences.
pub fn coverage_quadrature(fam: &MarginalFamily, theta: f64, alpha: f64) -> Result<f64> {
    let rule = fam.at_level(alpha)?;
    let covered = |y: f64| rule.interval(y).contains(theta);
    if !covered(theta) {
        return Err(Error::Numeric(format!(
            "interval at y=θ={theta} does not cover θ; rule is inconsistent"
        )));
    }
    let lo_bracket = theta.min(0.0) - 50.0;
    let hi_bracket = theta.max(0.0) + 50.0;

    // Boundary between an uncovered and a covered point, to 1e-12.
    let boundary = |mut out: f64, mut inside: f64| -> f64 {
        for _ in 0..200 {
            if (out - inside).abs() <= 1e-12 {
                break;
            }
            let mid = 0.5 * (out + inside);
            if covered(mid) {
                inside = mid;
            } else {
                out = mid;
            }
        }
        0.5 * (out + inside)
    };
    let b_lo = if covered(lo_bracket) {
        lo_bracket
    } else {
        boundary(lo_bracket, theta)
    };
    let b_hi = if covered(hi_bracket) {
        hi_bracket
    } else {
        boundary(hi_bracket, theta)
    };

    let mut cuts = vec![b_lo, b_hi];
    for b in rule.breakpoints() {
        if b > b_lo && b < b_hi {
            cuts.push(b);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let dist = fam.dist();
    let mut p = 0.0;
    for w in cuts.windows(2) {
        if covered(0.5 * (w[0] + w[1])) {
            p += dist.cdf(w[1] - theta) - dist.cdf(w[0] - theta);
        }
    }
    Ok(p)
}

/// The selection count taken literally: for r from m down to 1, construct the
/// interval of the r-th largest |z| at level r·q/m and test the determination
/// predicate directly.
pub fn naive_r(z: &[f64], fam: &MarginalFamily, q: f64) -> Result<usize> {
    if z.is_empty() {
        return Err(Error::Input("empty observation list".into()));
    }
    let m = z.len();
    let mut sorted: Vec<f64> = z.to_vec();
    sorted.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).unwrap());
    for r in (1..=m).rev() {
        let rule = fam.at_level(r as f64 * q / m as f64)?;
        let iv = rule.interval(sorted[r - 1]);
        let determined = if rule.band_delta() > 0.0 {
            classify_outside(&iv, rule.band_delta()).is_some()
        } else {
            classify(&iv).is_determining()
        };
        if determined {
            return Ok(r);
        }
    }
    Ok(0)
}

/// P_θ(|Y| ≥ c̄, θ ∉ CI) for the MQC interval under the standard normal,
/// evaluated exactly through the effective acceptance regions (the regions
/// whose plain inversion equals the convex hull).
pub fn noncover_sign_prob(theta: f64, alpha: f64, psi: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    if !(0.5..1.0).contains(&psi) {
        return Err(Error::Domain(format!("psi must lie in [0.5,1), got {psi}")));
    }
    let d = LocationFamily::StandardNormal;
    let th = theta.abs(); // the probability is symmetric in θ
    let cbar = d.upper_quantile(psi * alpha)?;
    let c_half = d.upper_quantile(alpha / 2.0)?;
    let ctilde = d.upper_quantile((1.0 - psi) * alpha)?;

    let (l, u) = if th == 0.0 {
        (-c_half, c_half)
    } else if th <= ctilde - cbar {
        (-cbar, ctilde)
    } else if th <= cbar + c_half {
        let tail = alpha - d.cdf(-cbar - th);
        (-cbar, th + d.upper_quantile(tail)?)
    } else {
        (th - c_half, th + c_half)
    };

    // {|Y| ≥ c̄} ∩ {Y ∉ (l, u)} as up to four disjoint pieces.
    let f = |x: f64| d.cdf(x - th);
    let mut p = f(l.min(-cbar));
    if u <= -cbar {
        p += f(-cbar) - f(u);
    }
    if l >= cbar {
        p += f(l) - f(cbar);
    }
    p += 1.0 - f(u.max(cbar));
    Ok(p)
}

/// Solves c̃ + c̄ = 2c_{α/4} in ψ (the tuning value below which the interior
/// non-coverage dip stays above α/2).
pub fn psi_star(alpha: f64, dist: LocationFamily) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    let target = 2.0 * dist.upper_quantile(alpha / 4.0)?;
    find_root(
        |psi| {
            dist.upper_quantile(psi * alpha).unwrap()
                + dist.upper_quantile((1.0 - psi) * alpha).unwrap()
                - target
        },
        0.5,
        1.0 - 1e-13,
        1e-13,
    )
    .map_err(|_| Error::Numeric(format!("psi* not bracketed for alpha={alpha}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marginal::FamilyKind;
    use crate::selection::{sdci, ProcedureConfig, Unit};
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;
    use rand_distr::StandardNormal;

    const N: LocationFamily = LocationFamily::StandardNormal;

    #[test]
    fn grid_inversion_symmetric_region() {
        let c = 1.5;
        let ar = move |theta: f64| Interval::open(theta - c, theta + c);
        let grid = GridSpec::new(-10.0, 10.0, 1e-3).unwrap();
        let hull = invert_acceptance_grid(&ar, 0.0, &grid).unwrap();
        assert!((hull.lower() + c).abs() <= 2e-3);
        assert!((hull.upper() - c).abs() <= 2e-3);
    }

    #[test]
    fn grid_inversion_empty_is_error() {
        let ar = |_theta: f64| Interval::open(100.0, 101.0);
        let grid = GridSpec::new(-1.0, 1.0, 0.1).unwrap();
        assert!(invert_acceptance_grid(&ar, 0.0, &grid).is_err());
    }

    #[test]
    fn batch_matches_single() {
        let oracle = AcceptanceOracle::new(N, 0.05, AcceptanceFamily::Mqc { psi: 0.7 }).unwrap();
        let ar = |t: f64| oracle.region(t);
        let grid = GridSpec::new(-9.0, 9.0, 1e-3).unwrap();
        let ys = [-2.5, -0.3, 0.0, 1.9, 2.3, 5.0];
        let batch = invert_acceptance_batch(&ar, &ys, &grid);
        for (y, b) in ys.iter().zip(batch) {
            let single = invert_acceptance_grid(&ar, *y, &grid).unwrap();
            let (lo, hi) = b.unwrap();
            assert_eq!(single.lower(), lo, "y={y}");
            assert_eq!(single.upper(), hi, "y={y}");
        }
    }

    #[test]
    fn mqc_inversion_matches_closed_form_spotwise() {
        let fam = MarginalFamily::standard(FamilyKind::Mqc { psi: 0.7 }).unwrap();
        let rule = fam.at_level(0.05).unwrap();
        let oracle = AcceptanceOracle::new(N, 0.05, AcceptanceFamily::Mqc { psi: 0.7 }).unwrap();
        let ar = |t: f64| oracle.region(t);
        let grid = GridSpec::new(-10.0, 10.0, 1e-4).unwrap();
        for y in [0.0, 0.8, 1.85, 2.05, 2.3, 3.0, 4.9, 5.5, 6.0, -2.3] {
            let hull = invert_acceptance_grid(&ar, y, &grid).unwrap();
            let closed = rule.interval(y);
            assert!(
                (hull.lower() - closed.lower()).abs() <= 1e-3,
                "y={y}: {} vs {}",
                hull.lower(),
                closed.lower()
            );
            assert!((hull.upper() - closed.upper()).abs() <= 1e-3, "y={y}");
        }
    }

    #[test]
    fn mqc_delta_inversion_above_band() {
        let oracle =
            AcceptanceOracle::new(N, 0.1, AcceptanceFamily::MqcDelta { delta: 0.5 }).unwrap();
        let ar = |t: f64| oracle.region(t);
        let grid = GridSpec::new(-8.0, 8.0, 1e-4).unwrap();
        let hull = invert_acceptance_grid(&ar, 1.9, &grid).unwrap();
        assert!(
            hull.lower() > 0.5,
            "lower {} should clear the band",
            hull.lower()
        );
        assert!((hull.lower() - 0.5716587386586106).abs() < 1e-3);
    }

    #[test]
    fn coverage_symmetric_exact() {
        let fam = MarginalFamily::standard(FamilyKind::Symmetric).unwrap();
        for alpha in [0.01, 0.05, 0.2] {
            for theta in [-3.0, 0.0, 0.7, 5.0] {
                let p = coverage_quadrature(&fam, theta, alpha).unwrap();
                assert!((p - (1.0 - alpha)).abs() < 1e-10, "theta={theta}: {p}");
            }
        }
    }

    #[test]
    fn coverage_mqc_exact_zone_and_floor() {
        let fam = MarginalFamily::standard(FamilyKind::Mqc { psi: 0.7 }).unwrap();
        let alpha = 0.05;
        // Region where the effective and raw acceptance regions coincide:
        // c̃ − c̄ < θ ≤ c̄ + c_{α/2}.
        for theta in [0.5, 1.0, 2.0, 3.0, 3.7] {
            let p = coverage_quadrature(&fam, theta, alpha).unwrap();
            assert!((p - 0.95).abs() < 1e-8, "theta={theta}: {p}");
        }
        // Everywhere: at least 1 − α.
        let mut theta = -8.0;
        while theta <= 8.0 {
            let p = coverage_quadrature(&fam, theta, alpha).unwrap();
            assert!(p >= 0.95 - 1e-6, "theta={theta}: {p}");
            theta += 0.13;
        }
    }

    #[test]
    fn coverage_mqc_delta_floor() {
        let fam = MarginalFamily::standard(FamilyKind::MqcDelta { delta: 0.5 }).unwrap();
        let mut worst: f64 = 1.0;
        let mut theta = -6.0;
        while theta <= 6.0 {
            let p = coverage_quadrature(&fam, theta, 0.1).unwrap();
            worst = worst.min(p);
            theta += 0.11;
        }
        assert!(worst >= 0.9 - 1e-6, "worst coverage {worst}");
    }

    #[test]
    fn naive_r_matches_fast_step_up() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let kinds = [
            FamilyKind::Symmetric,
            FamilyKind::OneSided,
            FamilyKind::Pratt,
            FamilyKind::Qc { psi: 0.8 },
            FamilyKind::Mqc { psi: 0.8 },
            FamilyKind::MqcDelta { delta: 0.3 },
        ];
        for trial in 0..120 {
            let m = rng.gen_range(1..=30);
            let z: Vec<f64> = (0..m)
                .map(|_| {
                    let noise: f64 = rng.sample(StandardNormal);
                    noise
                        + if rng.gen_bool(0.5) {
                            rng.gen_range(-4.0..4.0)
                        } else {
                            0.0
                        }
                })
                .collect();
            let q = rng.gen_range(0.02..0.3);
            let fam = MarginalFamily::standard(kinds[trial % kinds.len()]).unwrap();
            let naive = naive_r(&z, &fam, q).unwrap();
            let units: Vec<Unit> = z
                .iter()
                .enumerate()
                .map(|(i, &v)| Unit::new(format!("u{i}"), v))
                .collect();
            let fast = sdci(&units, &ProcedureConfig::new(q, fam)).unwrap();
            assert_eq!(naive, fast.r, "trial {trial}");
        }
    }

    #[test]
    fn naive_r_trivial_cases() {
        let fam = MarginalFamily::standard(FamilyKind::Symmetric).unwrap();
        assert_eq!(naive_r(&[0.0, 0.0, 0.0], &fam, 0.1).unwrap(), 0);
        let t = fam.sign_threshold(0.1).unwrap();
        assert_eq!(naive_r(&[t + 0.01], &fam, 0.1).unwrap(), 1);
        assert_eq!(naive_r(&[t - 0.01], &fam, 0.1).unwrap(), 0);
    }

    #[test]
    fn noncover_probability_at_zero_is_alpha() {
        for alpha in [0.01, 0.05, 0.1, 0.2] {
            for psi in [0.5, 0.7, 0.85] {
                let p = noncover_sign_prob(0.0, alpha, psi).unwrap();
                assert!((p - alpha).abs() < 1e-8, "alpha={alpha}, psi={psi}: {p}");
            }
        }
    }

    #[test]
    fn noncover_probability_floor_half_alpha() {
        for alpha in [0.01, 0.1, 0.2, 0.24] {
            for psi in [0.5, 0.7, 0.85, 0.89] {
                let mut theta = -10.0;
                while theta <= 10.0 {
                    let p = noncover_sign_prob(theta, alpha, psi).unwrap();
                    assert!(
                        p >= alpha / 2.0 - 1e-9,
                        "alpha={alpha}, psi={psi}, theta={theta}: {p}"
                    );
                    theta += 0.05;
                }
            }
        }
    }

    #[test]
    fn psi_star_near_limit() {
        let p = psi_star(1e-4, N).unwrap();
        assert!(p > 0.9 && p < 0.94, "psi* = {p}");
        assert!((p - 0.9397163748884829).abs() < 1e-6);
    }
}
