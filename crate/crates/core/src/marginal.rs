//! Marginal confidence-interval families and their sign-determination
//! thresholds.
//!
//! Every family is a rule C(y; α) valid at each level α and satisfying the two
//! monotonicity requirements used by the selection procedure: nesting in α
//! (MON 1), and reflection symmetry C(−y; α) = −C(y; α) with a lower boundary
//! increasing in y > 0 (MON 2). The quasi-conventional (QC) and modified
//! quasi-conventional (MQC) families trade early sign determination, starting
//! at c̄ = F⁻¹(1 − ψα), against maximum interval length; the band-avoiding
//! variant (`MqcDelta`) produces intervals that stay outside [−δ, δ] starting
//! at the smallest possible |y|.

use crate::dist::{find_root, LocationFamily};
use crate::error::{Error, Result};
use crate::interval::Interval;

/// Which interval family to use, with family-specific tuning parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FamilyKind {
    /// y ± c_{α/2}.
    Symmetric,
    /// (−∞, ∞) until |y| reaches c_α, then a half line of the matching sign.
    OneSided,
    /// Pratt-style interval: sign determination at c_α with finite length.
    Pratt,
    /// Quasi-conventional interval with tuning parameter ψ ∈ [1/2, 1).
    Qc { psi: f64 },
    /// Modified quasi-conventional interval, ψ ∈ [1/2, 1).
    Mqc { psi: f64 },
    /// Band-avoiding modification: intervals exclude [−δ, δ] once determined.
    MqcDelta { delta: f64 },
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Symmetric => "symmetric",
            FamilyKind::OneSided => "one-sided",
            FamilyKind::Pratt => "pratt",
            FamilyKind::Qc { .. } => "qc",
            FamilyKind::Mqc { .. } => "mqc",
            FamilyKind::MqcDelta { .. } => "mqc-delta",
        }
    }
}

/// A marginal confidence-interval family over a location family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarginalFamily {
    kind: FamilyKind,
    dist: LocationFamily,
}

impl MarginalFamily {
    pub fn new(kind: FamilyKind, dist: LocationFamily) -> Result<Self> {
        match kind {
            FamilyKind::Qc { psi } | FamilyKind::Mqc { psi } if !(0.5..1.0).contains(&psi) => Err(
                Error::Config(format!("psi must lie in [0.5, 1), got {psi}")),
            ),
            FamilyKind::MqcDelta { delta } if !(delta > 0.0 && delta.is_finite()) => Err(
                Error::Config(format!("delta must be positive, got {delta}")),
            ),
            _ => Ok(MarginalFamily { kind, dist }),
        }
    }

    pub fn standard(kind: FamilyKind) -> Result<Self> {
        MarginalFamily::new(kind, LocationFamily::StandardNormal)
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn dist(&self) -> LocationFamily {
        self.dist
    }

    /// Resolves all level-specific constants once; the returned rule builds
    /// intervals at this α without further root-finding except g⁻¹.
    pub fn at_level(&self, alpha: f64) -> Result<LevelRule> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!(
                "alpha must lie in (0,1), got {alpha}"
            )));
        }
        let d = self.dist;
        let shape = match self.kind {
            FamilyKind::Symmetric => RuleShape::Symmetric {
                c_half: d.upper_quantile(alpha / 2.0)?,
            },
            FamilyKind::OneSided => RuleShape::OneSided {
                c_alpha: d.upper_quantile(alpha)?,
            },
            FamilyKind::Pratt => RuleShape::Pratt {
                c_alpha: d.upper_quantile(alpha)?,
            },
            FamilyKind::Qc { psi } => {
                let c_half = d.upper_quantile(alpha / 2.0)?;
                let cbar = d.upper_quantile(psi * alpha)?;
                let ctilde = d.upper_quantile((1.0 - psi) * alpha)?;
                RuleShape::Qc {
                    cbar,
                    ctilde,
                    c_half,
                }
            }
            FamilyKind::Mqc { psi } => {
                let c_half = d.upper_quantile(alpha / 2.0)?;
                let cbar = d.upper_quantile(psi * alpha)?;
                let ctilde = d.upper_quantile((1.0 - psi) * alpha)?;
                // ψ ≤ ψ₁ ⟺ c̃ ≤ 2c̄ + c_{α/2} and ψ ≤ ψ₂ ⟺ c̃ ≤ c̄ + 2c_{α/2},
                // both by monotonicity of c̃ − c̄ in ψ.
                let case = if ctilde <= 2.0 * cbar + c_half {
                    let g_edge = g_shift(d, alpha, cbar, cbar + c_half, 1.0);
                    MqcCase::Low { g_edge }
                } else if ctilde <= cbar + 2.0 * c_half {
                    MqcCase::Mid
                } else {
                    MqcCase::High
                };
                RuleShape::Mqc {
                    cbar,
                    ctilde,
                    c_half,
                    case,
                }
            }
            FamilyKind::MqcDelta { delta } => {
                let c_half = d.upper_quantile(alpha / 2.0)?;
                let cbar_d = cbar_delta(d, alpha, delta)?;
                let shift = delta + cbar_d;
                let g_edge = g_shift(d, alpha, shift, shift + c_half, 1.0);
                RuleShape::MqcDelta {
                    delta,
                    cbar_d,
                    c_half,
                    g_edge,
                }
            }
        };
        Ok(LevelRule {
            alpha,
            dist: d,
            shape,
        })
    }

    /// The marginal 1−α interval at observation y.
    pub fn interval(&self, y: f64, alpha: f64) -> Result<Interval> {
        if !y.is_finite() {
            return Err(Error::Input(format!("observation must be finite, got {y}")));
        }
        Ok(self.at_level(alpha)?.interval(y))
    }

    /// The smallest |y| at which the marginal interval determines the sign
    /// (for `MqcDelta`: avoids the band [−δ, δ]).
    pub fn sign_threshold(&self, alpha: f64) -> Result<f64> {
        Ok(self.at_level(alpha)?.sign_threshold())
    }
}

/// Constant c̄_δ of the band-avoiding family: the solution of
/// F(c) − F(−2δ − c) = 1 − α, the worst-case coverage at θ = δ.
fn cbar_delta(d: LocationFamily, alpha: f64, delta: f64) -> Result<f64> {
    let c_half = d.upper_quantile(alpha / 2.0)?;
    find_root(
        |c| d.cdf(c) - d.cdf(-2.0 * delta - c) - (1.0 - alpha),
        0.0,
        c_half,
        1e-12,
    )
    .map_err(|_| {
        Error::Domain(format!(
            "no positive band constant: alpha={alpha} too large for delta={delta}"
        ))
    })
}

/// g(t) = t + F⁻¹{1 − α + F(−b − t)} at scale s, where b is the shift
/// (c̄ for MQC, δ + c̄_δ for the band variant). The inner quantile is taken
/// through the upper tail to avoid cancellation in 1 − α + F(·).
fn g_shift(d: LocationFamily, alpha: f64, b: f64, t: f64, s: f64) -> f64 {
    let tail = alpha - d.cdf((-b * s - t) / s);
    debug_assert!(tail > 0.0 && tail < 1.0);
    t + s * d.upper_quantile(tail).expect("tail probability in (0,1)")
}

/// Inverse of `g_shift` in t by bisection on the increasing branch.
fn g_shift_inv(d: LocationFamily, alpha: f64, b: f64, y: f64, lo: f64, hi: f64, s: f64) -> f64 {
    if y <= g_shift(d, alpha, b, lo, s) {
        return lo;
    }
    if y >= g_shift(d, alpha, b, hi, s) {
        return hi;
    }
    find_root(
        |t| g_shift(d, alpha, b, t, s) - y,
        lo,
        hi,
        1e-11 * s.max(1.0),
    )
    .expect("bracketed by construction")
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum MqcCase {
    /// ψ ≤ ψ₁: the lower bound follows g⁻¹ on [c̃, g(c̄ + c_{α/2})].
    Low { g_edge: f64 },
    /// ψ₁ < ψ ≤ ψ₂: the lower bound jumps to c̄ + c_{α/2} at y = c̃.
    Mid,
    /// ψ > ψ₂: the interval is symmetric as soon as it separates from zero.
    High,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum RuleShape {
    Symmetric {
        c_half: f64,
    },
    OneSided {
        c_alpha: f64,
    },
    Pratt {
        c_alpha: f64,
    },
    Qc {
        cbar: f64,
        ctilde: f64,
        c_half: f64,
    },
    Mqc {
        cbar: f64,
        ctilde: f64,
        c_half: f64,
        case: MqcCase,
    },
    MqcDelta {
        delta: f64,
        cbar_d: f64,
        c_half: f64,
        g_edge: f64,
    },
}

/// A marginal family with all constants resolved at a fixed level α.
#[derive(Clone, Copy, Debug)]
pub struct LevelRule {
    alpha: f64,
    dist: LocationFamily,
    shape: RuleShape,
}

impl LevelRule {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The 1−α interval at observation y (standardized scale).
    pub fn interval(&self, y: f64) -> Interval {
        self.interval_at_scale(y, 1.0)
    }

    /// The 1−α interval for an observation on scale s > 0, built entirely in
    /// the scaled units (constants and g both scaled by s).
    pub fn interval_at_scale(&self, y: f64, s: f64) -> Interval {
        debug_assert!(y.is_finite() && s > 0.0);
        match self.shape {
            RuleShape::Symmetric { c_half } => Interval::open(y - s * c_half, y + s * c_half),
            RuleShape::OneSided { c_alpha } => {
                if y >= s * c_alpha {
                    Interval::open(0.0, f64::INFINITY)
                } else if y <= -s * c_alpha {
                    Interval::open_closed(f64::NEG_INFINITY, 0.0)
                } else {
                    Interval::all()
                }
            }
            RuleShape::Pratt { c_alpha } => {
                let c = s * c_alpha;
                if y >= c {
                    Interval::open(0.0, y + c)
                } else if y <= -c {
                    Interval::open_closed(y - c, 0.0)
                } else {
                    Interval::open(y - c, y + c)
                }
            }
            _ if y < 0.0 => self.positive_side(-y, s).reflect(),
            _ => self.positive_side(y, s),
        }
    }

    /// Piecewise form for y ≥ 0 of the inversion-based families.
    fn positive_side(&self, y: f64, s: f64) -> Interval {
        match self.shape {
            RuleShape::Qc {
                cbar,
                ctilde,
                c_half,
            } => {
                let (cb, ct, ch) = (s * cbar, s * ctilde, s * c_half);
                if y == 0.0 {
                    // The acceptance regions on (c̄, c_{α/2}] exclude y ≤ 0,
                    // so the hull at exactly zero stops at ±c̄.
                    Interval::open(-cb, cb)
                } else if y < cb {
                    Interval::open(y - cb, y + ch)
                } else if y < ch {
                    Interval::closed_open(0.0, y + ch)
                } else if y < ct {
                    Interval::open(0.0, y + ch)
                } else if y < cb + ct {
                    Interval::open(y - ct, y + ch)
                } else {
                    Interval::open(y - ch, y + ch)
                }
            }
            RuleShape::Mqc {
                cbar,
                ctilde,
                c_half,
                case,
            } => {
                let (cb, ct, ch) = (s * cbar, s * ctilde, s * c_half);
                if y < cb {
                    Interval::open(-cb - ch, cb + ch)
                } else if y < ch {
                    Interval::closed_open(0.0, y + ch)
                } else if y < ct {
                    Interval::open(0.0, y + ch)
                } else {
                    match case {
                        MqcCase::Low { g_edge } if y <= s * g_edge => {
                            let lo =
                                g_shift_inv(self.dist, self.alpha, cbar, y, ch - cb, cb + ch, s);
                            Interval::open(lo, y + ch)
                        }
                        MqcCase::Low { .. } | MqcCase::Mid if y <= cb + 2.0 * ch => {
                            Interval::open(cb + ch, y + ch)
                        }
                        _ => Interval::open(y - ch, y + ch),
                    }
                }
            }
            RuleShape::MqcDelta {
                delta,
                cbar_d,
                c_half,
                g_edge,
            } => {
                let shift = delta + cbar_d;
                let (dd, ch) = (s * shift, s * c_half);
                if y < dd {
                    Interval::open(-dd - ch, dd + ch)
                } else if y < s * g_edge {
                    let lo = g_shift_inv(self.dist, self.alpha, shift, y, s * delta, dd + ch, s);
                    Interval::open(lo, y + ch)
                } else if y < dd + 2.0 * ch {
                    Interval::open(dd + ch, y + ch)
                } else {
                    Interval::open(y - ch, y + ch)
                }
            }
            _ => unreachable!("explicit families handled in interval_at_scale"),
        }
    }

    /// Smallest |y| at which the interval determines the sign
    /// (avoids [−δ, δ] for the band variant).
    pub fn sign_threshold(&self) -> f64 {
        match self.shape {
            RuleShape::Symmetric { c_half } => c_half,
            RuleShape::OneSided { c_alpha } | RuleShape::Pratt { c_alpha } => c_alpha,
            RuleShape::Qc { cbar, .. } | RuleShape::Mqc { cbar, .. } => cbar,
            RuleShape::MqcDelta { delta, cbar_d, .. } => delta + cbar_d,
        }
    }

    /// The half-width of the band the `MqcDelta` family avoids, zero otherwise.
    pub fn band_delta(&self) -> f64 {
        match self.shape {
            RuleShape::MqcDelta { delta, .. } => delta,
            _ => 0.0,
        }
    }

    /// Observation values at which the piecewise definition changes,
    /// mirrored around zero and sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let pos: Vec<f64> = match self.shape {
            RuleShape::Symmetric { .. } => vec![],
            RuleShape::OneSided { c_alpha } | RuleShape::Pratt { c_alpha } => vec![c_alpha],
            RuleShape::Qc {
                cbar,
                ctilde,
                c_half,
            } => {
                vec![cbar, c_half, ctilde, cbar + ctilde]
            }
            RuleShape::Mqc {
                cbar,
                ctilde,
                c_half,
                case,
            } => match case {
                MqcCase::Low { g_edge } => {
                    vec![cbar, c_half, ctilde, g_edge, cbar + 2.0 * c_half]
                }
                MqcCase::Mid => vec![cbar, c_half, ctilde, cbar + 2.0 * c_half],
                MqcCase::High => vec![cbar, c_half, ctilde],
            },
            RuleShape::MqcDelta {
                delta,
                cbar_d,
                c_half,
                g_edge,
            } => {
                let dd = delta + cbar_d;
                vec![dd, g_edge, dd + 2.0 * c_half]
            }
        };
        let mut all = vec![0.0];
        for b in pos {
            all.push(b);
            all.push(-b);
        }
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        all
    }
}

/// The two ψ breakpoints of the MQC piecewise form at a given α:
/// ψ₁ solves c̃ = 2c̄ + c_{α/2} and ψ₂ solves c̃ = c̄ + 2c_{α/2}.
pub fn mqc_psi_breakpoints(alpha: f64, dist: LocationFamily) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    let c_half = dist.upper_quantile(alpha / 2.0)?;
    let spread = |psi: f64| -> f64 {
        let cbar = dist
            .upper_quantile(psi * alpha)
            .expect("psi*alpha in (0,1)");
        let ctilde = dist
            .upper_quantile((1.0 - psi) * alpha)
            .expect("(1-psi)*alpha in (0,1)");
        ctilde - cbar
    };
    let hi = 1.0 - 1e-13;
    let psi1 = find_root(
        |p| spread(p) - (dist.upper_quantile(p * alpha).unwrap() + c_half),
        0.5,
        hi,
        1e-13,
    )
    .map_err(|_| Error::Numeric(format!("psi1 not bracketed for alpha={alpha}")))?;
    let psi2 = find_root(|p| spread(p) - 2.0 * c_half, 0.5, hi, 1e-13)
        .map_err(|_| Error::Numeric(format!("psi2 not bracketed for alpha={alpha}")))?;
    Ok((psi1, psi2))
}
