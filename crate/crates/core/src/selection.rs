//! Selection-and-construction procedures.
//!
//! The core routine is the FCR-adjusted selective procedure: standardize the
//! estimates, find the largest R such that the R-th largest |z| clears the
//! sign-determination threshold of the marginal family at level R·q/m, then
//! construct the marginal interval at that adjusted level for every selected
//! unit. With the symmetric family this selects exactly the level-q BH
//! rejections; one-sided and Pratt families select like BH at 2q, and the
//! QC/MQC families like BH at 2ψq.

use crate::dist::LocationFamily;
use crate::error::{Error, Result};
use crate::interval::{classify, Interval, SignDecision};
use crate::marginal::MarginalFamily;

/// One estimated parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct Unit {
    pub id: String,
    pub estimate: f64,
    pub sd: f64,
}

impl Unit {
    pub fn new(id: impl Into<String>, estimate: f64) -> Self {
        Unit {
            id: id.into(),
            estimate,
            sd: 1.0,
        }
    }

    pub fn with_sd(id: impl Into<String>, estimate: f64, sd: f64) -> Self {
        Unit {
            id: id.into(),
            estimate,
            sd,
        }
    }
}

/// How the working level is derived from the nominal level q.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DependencyMode {
    /// Use q directly (valid under independent estimators).
    Independent,
    /// Rescale to q / Σ_{j=1..m} 1/j, valid under arbitrary dependency.
    GeneralDependency,
}

/// Full configuration of a selective procedure.
#[derive(Clone, Copy, Debug)]
pub struct ProcedureConfig {
    pub q: f64,
    pub family: MarginalFamily,
    pub dependency: DependencyMode,
}

impl ProcedureConfig {
    pub fn new(q: f64, family: MarginalFamily) -> Self {
        ProcedureConfig {
            q,
            family,
            dependency: DependencyMode::Independent,
        }
    }
}

/// Per-unit outcome of a selection procedure.
#[derive(Clone, Debug)]
pub struct UnitResult {
    pub id: String,
    pub selected: bool,
    pub decision: SignDecision,
    /// Constructed interval on the original (sd-rescaled) scale; absent for
    /// unselected units and for decision-only procedures.
    pub interval: Option<Interval>,
}

/// Outcome of a selection procedure over all units.
#[derive(Clone, Debug)]
pub struct SelectionResult {
    /// Number of selected units.
    pub r: usize,
    /// Level used for every constructed interval (R·q_eff/m; 0 when R = 0).
    pub adjusted_alpha: f64,
    pub units: Vec<UnitResult>,
}

impl SelectionResult {
    pub fn selected_indices(&self) -> Vec<usize> {
        self.units
            .iter()
            .enumerate()
            .filter_map(|(i, u)| u.selected.then_some(i))
            .collect()
    }
}

/// Realized error counts and proportions for one dataset.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ErrorMetrics {
    /// Intervals constructed.
    pub r_ci: usize,
    /// Constructed intervals that miss their parameter.
    pub v_ci: usize,
    /// False coverage proportion V_ci / max(R_ci, 1).
    pub fcp: f64,
    /// Directional decisions made.
    pub r_d: usize,
    /// Incorrect weak directional decisions.
    pub v_d: usize,
    /// Weak directional false discovery proportion V_d / max(R_d, 1).
    pub wdfdp: f64,
}

/// Harmonic number Σ_{j=1..m} 1/j.
pub fn harmonic(m: usize) -> f64 {
    (1..=m).map(|j| 1.0 / j as f64).sum()
}

fn validate_units(units: &[Unit]) -> Result<()> {
    if units.is_empty() {
        return Err(Error::Input("empty unit list".into()));
    }
    for u in units {
        if !u.estimate.is_finite() {
            return Err(Error::Input(format!(
                "unit {}: non-finite estimate {}",
                u.id, u.estimate
            )));
        }
        if !(u.sd > 0.0 && u.sd.is_finite()) {
            return Err(Error::Input(format!(
                "unit {}: sd must be positive, got {}",
                u.id, u.sd
            )));
        }
    }
    Ok(())
}

/// A selective procedure with its per-rank thresholds resolved for a fixed m.
///
/// τ(r) = sign_threshold(family, r·q_eff/m) is decreasing in r, so the step-up
/// pass over the ordered |z| values reproduces the literal rule "largest r
/// whose interval at level r·q_eff/m determines the sign".
#[derive(Clone, Debug)]
pub struct Procedure {
    family: MarginalFamily,
    q_eff: f64,
    m: usize,
    taus: Vec<f64>,
}

impl Procedure {
    pub fn prepare(cfg: &ProcedureConfig, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Input("empty unit list".into()));
        }
        if !(cfg.q > 0.0 && cfg.q < 1.0) {
            return Err(Error::Domain(format!("q must lie in (0,1), got {}", cfg.q)));
        }
        let q_eff = match cfg.dependency {
            DependencyMode::Independent => cfg.q,
            DependencyMode::GeneralDependency => cfg.q / harmonic(m),
        };
        let taus = (1..=m)
            .map(|r| cfg.family.sign_threshold(r as f64 * q_eff / m as f64))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Procedure {
            family: cfg.family,
            q_eff,
            m,
            taus,
        })
    }

    pub fn q_eff(&self) -> f64 {
        self.q_eff
    }

    /// Step-up count on the standardized absolute values.
    fn step_up(&self, abs_z: &[f64]) -> usize {
        let mut sorted: Vec<f64> = abs_z.to_vec();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        (1..=self.m)
            .rev()
            .find(|&r| self.taus[r - 1] <= sorted[r - 1])
            .unwrap_or(0)
    }

    /// Runs the procedure; `units` must have length m.
    pub fn run(&self, units: &[Unit]) -> Result<SelectionResult> {
        validate_units(units)?;
        if units.len() != self.m {
            return Err(Error::Input(format!(
                "procedure prepared for m={}, got {} units",
                self.m,
                units.len()
            )));
        }
        let z: Vec<f64> = units.iter().map(|u| u.estimate / u.sd).collect();
        let abs_z: Vec<f64> = z.iter().map(|v| v.abs()).collect();
        let r = self.step_up(&abs_z);

        if r == 0 {
            let units = units
                .iter()
                .map(|u| UnitResult {
                    id: u.id.clone(),
                    selected: false,
                    decision: SignDecision::NotDetermining,
                    interval: None,
                })
                .collect();
            return Ok(SelectionResult {
                r: 0,
                adjusted_alpha: 0.0,
                units,
            });
        }

        let adjusted_alpha = r as f64 * self.q_eff / self.m as f64;
        let rule = self.family.at_level(adjusted_alpha)?;
        let threshold = self.taus[r - 1];
        let results = units
            .iter()
            .zip(&z)
            .map(|(u, &zi)| {
                if zi.abs() >= threshold {
                    let interval = rule.interval(zi).scale(u.sd);
                    UnitResult {
                        id: u.id.clone(),
                        selected: true,
                        decision: classify(&interval),
                        interval: Some(interval),
                    }
                } else {
                    UnitResult {
                        id: u.id.clone(),
                        selected: false,
                        decision: SignDecision::NotDetermining,
                        interval: None,
                    }
                }
            })
            .collect::<Vec<_>>();
        debug_assert_eq!(results.iter().filter(|u| u.selected).count(), r);
        Ok(SelectionResult {
            r,
            adjusted_alpha,
            units: results,
        })
    }
}

/// Level-q FCR-adjusted selective sign-determining CI procedure.
pub fn sdci(units: &[Unit], cfg: &ProcedureConfig) -> Result<SelectionResult> {
    Procedure::prepare(cfg, units.len())?.run(units)
}

/// Directional BH: select by the step-up rule on two-sided p-values, classify
/// strictly by the sign of the estimate, construct no intervals.
pub fn bh_directional(units: &[Unit], q: f64) -> Result<SelectionResult> {
    validate_units(units)?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("q must lie in (0,1), got {q}")));
    }
    let dist = LocationFamily::StandardNormal;
    let m = units.len();
    let p: Vec<f64> = units
        .iter()
        .map(|u| 2.0 * dist.cdf(-(u.estimate / u.sd).abs()))
        .collect();
    let mut sorted = p.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let r = (1..=m)
        .rev()
        .find(|&r| sorted[r - 1] <= r as f64 * q / m as f64)
        .unwrap_or(0);

    let cutoff = if r == 0 {
        -1.0
    } else {
        r as f64 * q / m as f64
    };
    let results = units
        .iter()
        .zip(&p)
        .map(|(u, &pi)| {
            let selected = r > 0 && pi <= cutoff;
            let decision = if !selected {
                SignDecision::NotDetermining
            } else if u.estimate > 0.0 {
                SignDecision::Positive
            } else {
                SignDecision::Negative
            };
            UnitResult {
                id: u.id.clone(),
                selected,
                decision,
                interval: None,
            }
        })
        .collect();
    Ok(SelectionResult {
        r,
        adjusted_alpha: if r == 0 { 0.0 } else { cutoff },
        units: results,
    })
}

/// BY FCR adjustment: marginal intervals at level R_min·q/m for a selection
/// made by an arbitrary rule. The caller supplies R_min; for simple rules
/// (step-up included) R_min equals the number of selected units.
pub fn by_adjust(
    selected: &[usize],
    r_min: usize,
    units: &[Unit],
    family: &MarginalFamily,
    q: f64,
) -> Result<Vec<Interval>> {
    validate_units(units)?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("q must lie in (0,1), got {q}")));
    }
    let m = units.len();
    if selected.is_empty() {
        return Ok(Vec::new());
    }
    if r_min < 1 || r_min > m {
        return Err(Error::Domain(format!("R_min={r_min} outside [1, {m}]")));
    }
    let rule = family.at_level(r_min as f64 * q / m as f64)?;
    selected
        .iter()
        .map(|&i| {
            let u = units
                .get(i)
                .ok_or_else(|| Error::Input(format!("selected index {i} out of range")))?;
            Ok(rule.interval(u.estimate / u.sd).scale(u.sd))
        })
        .collect()
}

/// Counts coverage and directional errors of a selection result against the
/// true parameter values.
pub fn evaluate(result: &SelectionResult, truth: &[f64]) -> Result<ErrorMetrics> {
    if truth.len() != result.units.len() {
        return Err(Error::Input(format!(
            "truth has length {}, result has {} units",
            truth.len(),
            result.units.len()
        )));
    }
    let mut r_ci = 0usize;
    let mut v_ci = 0usize;
    let mut r_d = 0usize;
    let mut v_d = 0usize;
    for (u, &theta) in result.units.iter().zip(truth) {
        if let Some(iv) = &u.interval {
            r_ci += 1;
            if !iv.contains(theta) {
                v_ci += 1;
            }
        }
        let wrong = match u.decision {
            SignDecision::Positive => theta <= 0.0,
            SignDecision::Negative => theta >= 0.0,
            SignDecision::NonNegative => theta < 0.0,
            SignDecision::NonPositive => theta > 0.0,
            SignDecision::NotDetermining => {
                continue;
            }
        };
        r_d += 1;
        if wrong {
            v_d += 1;
        }
    }
    Ok(ErrorMetrics {
        r_ci,
        v_ci,
        fcp: v_ci as f64 / r_ci.max(1) as f64,
        r_d,
        v_d,
        wdfdp: v_d as f64 / r_d.max(1) as f64,
    })
}
