//! Two-dimensional extension: dominance/recessiveness effects from 2×3
//! case-control allele tables, principal-component Z-scores, the
//! Cochran-Armitage trend test, and rectangular confidence regions whose
//! PC2 side is selection-adjusted.
//!
//! The dominance effect is the log-odds increment of the first minor-allele
//! copy and the recessiveness effect that of the second copy. The two
//! estimates are negatively correlated by construction, so the second
//! principal component is a weighted sum of the effects and its sign matches
//! their common sign; selection therefore operates on the PC2 Z-score.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::marginal::MarginalFamily;

/// Allele-count table: rows are controls/cases, columns are 0, 1, 2 copies of
/// the minor allele.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Table2x3 {
    pub controls: [u64; 3],
    pub cases: [u64; 3],
}

impl Table2x3 {
    pub fn new(controls: [u64; 3], cases: [u64; 3]) -> Self {
        Table2x3 { controls, cases }
    }
}

/// Estimated (β̂_dom, β̂_rec) with its 2×2 covariance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BivariateEffect {
    pub beta_dom: f64,
    pub beta_rec: f64,
    pub var_dom: f64,
    pub var_rec: f64,
    pub cov: f64,
}

/// Log-odds-increment estimates and their estimated covariance.
///
/// With `correction` set, 0.5 is added to every cell; otherwise any zero cell
/// is an error because the log-odds are undefined.
pub fn effects_from_table(t: &Table2x3, correction: bool) -> Result<BivariateEffect> {
    let mut n1 = [0.0f64; 3];
    let mut n2 = [0.0f64; 3];
    for j in 0..3 {
        let add = if correction { 0.5 } else { 0.0 };
        n1[j] = t.controls[j] as f64 + add;
        n2[j] = t.cases[j] as f64 + add;
        if n1[j] == 0.0 || n2[j] == 0.0 {
            return Err(Error::Numeric(format!(
                "zero cell in genotype column {j}; enable the continuity correction"
            )));
        }
    }
    let gamma: Vec<f64> = (0..3).map(|j| (n2[j] / n1[j]).ln()).collect();
    Ok(BivariateEffect {
        beta_dom: gamma[1] - gamma[0],
        beta_rec: gamma[2] - gamma[1],
        var_dom: 1.0 / n2[0] + 1.0 / n1[0] + 1.0 / n2[1] + 1.0 / n1[1],
        var_rec: 1.0 / n2[1] + 1.0 / n1[1] + 1.0 / n2[2] + 1.0 / n1[2],
        cov: -(1.0 / n2[1] + 1.0 / n1[1]),
    })
}

/// Eigen-decomposition of the 2×2 effect covariance.
///
/// `pc2` is the minimum-variance direction, sign-fixed so both components are
/// non-negative; `pc1` is `pc2` rotated by +90°.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PcDecomposition {
    pub pc1: [f64; 2],
    pub var1: f64,
    pub pc2: [f64; 2],
    pub var2: f64,
}

pub fn principal_components(e: &BivariateEffect) -> Result<PcDecomposition> {
    let (a, b, c) = (e.var_dom, e.cov, e.var_rec);
    let det = a * c - b * b;
    if !(a > 0.0 && c > 0.0 && det > 0.0) {
        return Err(Error::Numeric(format!(
            "covariance matrix not positive definite: var_dom={a}, var_rec={c}, cov={b}"
        )));
    }
    let mean = 0.5 * (a + c);
    let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let var1 = mean + disc;
    let var2 = mean - disc;

    let mut pc2 = if disc <= f64::EPSILON * mean {
        // isotropic: any orthonormal pair works; keep the convention.
        [0.0, 1.0]
    } else {
        // Eigenvector for var2 from whichever row gives the larger residual.
        let cand1 = [b, var2 - a];
        let cand2 = [var2 - c, b];
        let n1 = cand1[0] * cand1[0] + cand1[1] * cand1[1];
        let n2 = cand2[0] * cand2[0] + cand2[1] * cand2[1];
        let v = if n1 >= n2 { cand1 } else { cand2 };
        let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
        [v[0] / norm, v[1] / norm]
    };
    // Sign convention: both pc2 components non-negative. For cov ≤ 0 the
    // minimum-variance direction always allows it; otherwise the dominant
    // component is made non-negative.
    if pc2[0] + pc2[1] < 0.0 {
        pc2 = [-pc2[0], -pc2[1]];
    }
    let pc1 = [-pc2[1], pc2[0]];
    Ok(PcDecomposition {
        pc1,
        var1,
        pc2,
        var2,
    })
}

impl PcDecomposition {
    pub fn project(&self, beta_dom: f64, beta_rec: f64) -> (f64, f64) {
        (
            beta_dom * self.pc1[0] + beta_rec * self.pc1[1],
            beta_dom * self.pc2[0] + beta_rec * self.pc2[1],
        )
    }

    /// Standardized scores along the two principal axes.
    pub fn z_scores(&self, e: &BivariateEffect) -> (f64, f64) {
        let (t1, t2) = self.project(e.beta_dom, e.beta_rec);
        (t1 / self.var1.sqrt(), t2 / self.var2.sqrt())
    }
}

/// The association score: distance of the effect estimate from the
/// zero-association diagonal in PC2 standard deviations.
pub fn z_pc2(e: &BivariateEffect) -> Result<f64> {
    let pc = principal_components(e)?;
    Ok(pc.z_scores(e).1)
}

/// Signed Cochran-Armitage trend statistic with genotype weights `w`,
/// no continuity correction. Positive values mean minor-allele excess in
/// cases.
pub fn cochran_armitage(t: &Table2x3, w: [f64; 3]) -> Result<f64> {
    let n1: Vec<f64> = t.controls.iter().map(|&x| x as f64).collect();
    let n2: Vec<f64> = t.cases.iter().map(|&x| x as f64).collect();
    let r1: f64 = n1.iter().sum();
    let r2: f64 = n2.iter().sum();
    let total = r1 + r2;
    if r1 == 0.0 || r2 == 0.0 {
        return Err(Error::Numeric("a row of the table is empty".into()));
    }
    let cols: Vec<f64> = (0..3).map(|j| n1[j] + n2[j]).collect();
    if cols.contains(&0.0) {
        return Err(Error::Numeric(
            "a genotype column of the table is empty".into(),
        ));
    }
    let pbar = r2 / total;
    let score: f64 = (0..3).map(|j| w[j] * (n2[j] - cols[j] * pbar)).sum();
    let sw: f64 = (0..3).map(|j| cols[j] * w[j]).sum();
    let sww: f64 = (0..3).map(|j| cols[j] * w[j] * w[j]).sum();
    let var = pbar * (1.0 - pbar) * (sww - sw * sw / total);
    if !(var > 0.0) {
        return Err(Error::Numeric(format!("degenerate trend variance {var}")));
    }
    Ok(score / var.sqrt())
}

/// A rectangular confidence region aligned with the principal axes.
#[derive(Clone, Copy, Debug)]
pub struct RectRegion {
    pub pc: PcDecomposition,
    /// Interval along pc1 in effect units.
    pub interval_pc1: Interval,
    /// Interval along pc2 in effect units.
    pub interval_pc2: Interval,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl RectRegion {
    /// Joint coverage level: (1−α₁)(1−α₂), with an unconstrained PC1 side
    /// (α₁ = 1 requested) contributing factor 1.
    pub fn joint_level(&self) -> f64 {
        let p1 = if self.interval_pc1 == Interval::all() {
            1.0
        } else {
            1.0 - self.alpha1
        };
        p1 * (1.0 - self.alpha2)
    }

    /// Membership of a point (β_dom, β_rec), tested by projection.
    pub fn contains(&self, beta_dom: f64, beta_rec: f64) -> bool {
        let (t1, t2) = self.pc.project(beta_dom, beta_rec);
        self.interval_pc1.contains(t1) && self.interval_pc2.contains(t2)
    }

    /// The four corners in (β_dom, β_rec) coordinates, or None when a side is
    /// unbounded.
    pub fn corners(&self) -> Option<[[f64; 2]; 4]> {
        let ends = [
            (self.interval_pc1.lower(), self.interval_pc2.lower()),
            (self.interval_pc1.lower(), self.interval_pc2.upper()),
            (self.interval_pc1.upper(), self.interval_pc2.upper()),
            (self.interval_pc1.upper(), self.interval_pc2.lower()),
        ];
        if ends.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return None;
        }
        Some(ends.map(|(t1, t2)| {
            [
                t1 * self.pc.pc1[0] + t2 * self.pc.pc2[0],
                t1 * self.pc.pc1[1] + t2 * self.pc.pc2[1],
            ]
        }))
    }
}

/// Builds the rectangle: a symmetric two-sided 1−α₁ interval along PC1 and a
/// `family2` interval along PC2 at the (possibly selection-adjusted) level
/// `adjusted_alpha2`. Passing α₁ = 1 leaves the PC1 side unconstrained,
/// reducing the region to a one-dimensional PC2 statement.
pub fn rect_region(
    e: &BivariateEffect,
    alpha1: f64,
    alpha2: f64,
    family2: &MarginalFamily,
    adjusted_alpha2: f64,
) -> Result<RectRegion> {
    if !(alpha1 > 0.0 && alpha1 <= 1.0) {
        return Err(Error::Domain(format!(
            "alpha1 must lie in (0,1], got {alpha1}"
        )));
    }
    if !(alpha2 > 0.0 && alpha2 < 1.0) {
        return Err(Error::Domain(format!(
            "alpha2 must lie in (0,1), got {alpha2}"
        )));
    }
    let pc = principal_components(e)?;
    let (z1, z2) = pc.z_scores(e);
    let interval_pc1 = if alpha1 >= 1.0 {
        Interval::all()
    } else {
        MarginalFamily::standard(crate::marginal::FamilyKind::Symmetric)?
            .at_level(alpha1)?
            .interval(z1)
            .scale(pc.var1.sqrt())
    };
    let interval_pc2 = family2
        .at_level(adjusted_alpha2)?
        .interval(z2)
        .scale(pc.var2.sqrt());
    Ok(RectRegion {
        pc,
        interval_pc1,
        interval_pc2,
        alpha1,
        alpha2,
    })
}

/// Per-unit outcome of the selective rectangle procedure.
#[derive(Clone, Debug)]
pub struct RectItem {
    pub z_pc2: f64,
    pub selected: bool,
    pub region: Option<RectRegion>,
}

#[derive(Clone, Debug)]
pub struct RectSelection {
    pub r: usize,
    pub adjusted_alpha2: f64,
    pub items: Vec<RectItem>,
}

/// Level-(q₁, q₂) FCR adjustment for a selection rule driven by the PC2
/// scores only: selection is the sign-determining step-up of `family2` on
/// Z(PC²) at level q₂; selected units get their PC2 interval at level R·q₂/m
/// and their PC1 interval at the fixed level 1−q₁.
pub fn rect_sdci(
    effects: &[BivariateEffect],
    q1: f64,
    q2: f64,
    family2: &MarginalFamily,
) -> Result<RectSelection> {
    if effects.is_empty() {
        return Err(Error::Input("empty effect list".into()));
    }
    if !(q2 > 0.0 && q2 < 1.0) {
        return Err(Error::Domain(format!("q2 must lie in (0,1), got {q2}")));
    }
    let m = effects.len();
    let z2: Vec<f64> = effects.iter().map(z_pc2).collect::<Result<Vec<f64>>>()?;
    let mut sorted: Vec<f64> = z2.iter().map(|v| v.abs()).collect();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let taus = (1..=m)
        .map(|r| family2.sign_threshold(r as f64 * q2 / m as f64))
        .collect::<Result<Vec<f64>>>()?;
    let r = (1..=m)
        .rev()
        .find(|&r| taus[r - 1] <= sorted[r - 1])
        .unwrap_or(0);

    let adjusted_alpha2 = if r == 0 {
        0.0
    } else {
        r as f64 * q2 / m as f64
    };
    let items = effects
        .iter()
        .zip(&z2)
        .map(|(e, &z)| {
            let selected = r > 0 && z.abs() >= taus[r - 1];
            let region = if selected {
                Some(rect_region(e, q1, q2, family2, adjusted_alpha2)?)
            } else {
                None
            };
            Ok(RectItem {
                z_pc2: z,
                selected,
                region,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RectSelection {
        r,
        adjusted_alpha2,
        items,
    })
}

/// Table-level wrapper for [`rect_sdci`]; every table must be non-degenerate.
pub fn rect_sdci_tables(
    tables: &[Table2x3],
    correction: bool,
    q1: f64,
    q2: f64,
    family2: &MarginalFamily,
) -> Result<RectSelection> {
    let effects = tables
        .iter()
        .map(|t| effects_from_table(t, correction))
        .collect::<Result<Vec<_>>>()?;
    rect_sdci(&effects, q1, q2, family2)
}
