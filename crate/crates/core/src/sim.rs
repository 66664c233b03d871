//! Monte Carlo experiments: realized FCP/wdFDP of the selective procedures
//! under configurable signal models and noise, including spatially smoothed
//! Gaussian noise fields, plus the rectangle-FCR experiment for the
//! two-dimensional extension.
//!
//! Replicates run in parallel on counter-based RNG substreams derived from the
//! master seed, so results are bit-identical regardless of thread scheduling.

use crate::dist::fisher_z;
use crate::error::{Error, Result};
use crate::marginal::MarginalFamily;
use crate::selection::{evaluate, ErrorMetrics, Procedure, ProcedureConfig, Unit};
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Exp, Normal, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

/// How the true parameter vector is generated.
#[derive(Clone, Debug)]
pub enum ThetaModel {
    /// A fixed vector, used as-is in every draw.
    Fixed(Vec<f64>),
    /// n_exp exponential draws plus n_norm normal draws, each optionally
    /// multiplied by an independent random sign.
    ExpNormalMix {
        n_exp: usize,
        exp_mean: f64,
        n_norm: usize,
        norm_mean: f64,
        norm_sd: f64,
        random_signs: bool,
    },
    /// Independent N(0, sd²) parameters.
    NormalPrior { sd: f64 },
    /// Each voxel carries the z-scale transform of correlation rho1 with
    /// probability pi1, and zero otherwise.
    SparseField {
        pi1: f64,
        rho1: f64,
        n_subjects: usize,
    },
}

/// Noise attached to the parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseModel {
    /// Independent standard normal errors.
    Independent,
    /// A smoothed Gaussian field over a 3-D grid with unit marginal variance;
    /// the kernel width is given as full width at half maximum.
    SmoothedField { dims: [usize; 3], fwhm: f64 },
}

/// A declarative Monte Carlo experiment.
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub m: usize,
    pub theta: ThetaModel,
    pub noise: NoiseModel,
    pub procedure: ProcedureConfig,
    pub n_reps: usize,
    pub seed: u64,
    /// Draw θ once and reuse it in every replicate.
    pub theta_fixed: bool,
}

/// Aggregated simulation estimates with Monte Carlo standard errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SimSummary {
    pub mean_fcp: f64,
    pub se_fcp: f64,
    pub mean_wdfdp: f64,
    pub se_wdfdp: f64,
    pub mean_r: f64,
    pub reps: usize,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn validate(cfg: &SimConfig) -> Result<()> {
    if cfg.m == 0 {
        return Err(Error::Config("m must be positive".into()));
    }
    if cfg.n_reps == 0 {
        return Err(Error::Config("n_reps must be positive".into()));
    }
    match &cfg.theta {
        ThetaModel::Fixed(v) => {
            if v.len() != cfg.m {
                return Err(Error::Config(format!(
                    "fixed theta has length {}, expected m={}",
                    v.len(),
                    cfg.m
                )));
            }
        }
        ThetaModel::ExpNormalMix {
            n_exp,
            exp_mean,
            n_norm,
            norm_sd,
            ..
        } => {
            if n_exp + n_norm != cfg.m {
                return Err(Error::Config(format!(
                    "n_exp + n_norm = {} does not match m={}",
                    n_exp + n_norm,
                    cfg.m
                )));
            }
            if !(*exp_mean > 0.0) {
                return Err(Error::Config(format!(
                    "exp_mean must be positive, got {exp_mean}"
                )));
            }
            if !(*norm_sd > 0.0) {
                return Err(Error::Config(format!(
                    "norm_sd must be positive, got {norm_sd}"
                )));
            }
        }
        ThetaModel::NormalPrior { sd } => {
            if !(*sd > 0.0) {
                return Err(Error::Config(format!(
                    "prior sd must be positive, got {sd}"
                )));
            }
        }
        ThetaModel::SparseField {
            pi1,
            rho1,
            n_subjects,
        } => {
            if !(0.0..=1.0).contains(pi1) {
                return Err(Error::Config(format!("pi1 must lie in [0,1], got {pi1}")));
            }
            if !(rho1.abs() < 1.0) {
                return Err(Error::Config(format!(
                    "rho1 must lie in (-1,1), got {rho1}"
                )));
            }
            if *n_subjects < 4 {
                return Err(Error::Config(format!(
                    "n_subjects must be >= 4, got {n_subjects}"
                )));
            }
        }
    }
    if let NoiseModel::SmoothedField { dims, fwhm } = cfg.noise {
        if dims.iter().product::<usize>() != cfg.m {
            return Err(Error::Config(format!(
                "field dims {dims:?} give {} voxels, expected m={}",
                dims.iter().product::<usize>(),
                cfg.m
            )));
        }
        if !(fwhm > 0.0) {
            return Err(Error::Config(format!("fwhm must be positive, got {fwhm}")));
        }
    }
    Ok(())
}

fn draw_theta(model: &ThetaModel, m: usize, rng: &mut ChaCha12Rng) -> Result<Vec<f64>> {
    Ok(match model {
        ThetaModel::Fixed(v) => v.clone(),
        ThetaModel::ExpNormalMix {
            n_exp,
            exp_mean,
            n_norm,
            norm_mean,
            norm_sd,
            random_signs,
        } => {
            let exp = Exp::new(1.0 / exp_mean).map_err(|e| Error::Config(e.to_string()))?;
            let norm =
                Normal::new(*norm_mean, *norm_sd).map_err(|e| Error::Config(e.to_string()))?;
            let mut theta = Vec::with_capacity(m);
            for _ in 0..*n_exp {
                theta.push(rng.sample(exp));
            }
            for _ in 0..*n_norm {
                theta.push(rng.sample(norm));
            }
            if *random_signs {
                for t in theta.iter_mut() {
                    if rng.gen_bool(0.5) {
                        *t = -*t;
                    }
                }
            }
            theta
        }
        ThetaModel::NormalPrior { sd } => (0..m)
            .map(|_| rng.sample::<f64, _>(StandardNormal) * sd)
            .collect(),
        ThetaModel::SparseField {
            pi1,
            rho1,
            n_subjects,
        } => {
            let signal = fisher_z(*rho1, *n_subjects)?;
            (0..m)
                .map(|_| if rng.gen_bool(*pi1) { signal } else { 0.0 })
                .collect()
        }
    })
}

/// One smoothing pass along `axis` with a truncated Gaussian kernel,
/// renormalized at every position so the output keeps exact unit variance
/// when the input values are independent with unit variance.
fn smooth_axis(data: &[f64], dims: [usize; 3], axis: usize, weights: &[f64]) -> Vec<f64> {
    let h = (weights.len() - 1) / 2;
    let (nx, ny, nz) = (dims[0], dims[1], dims[2]);
    let stride = [1, nx, nx * ny];
    let len_axis = dims[axis];
    let mut out = vec![0.0; data.len()];
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let pos = [x, y, z];
                let idx = x + nx * (y + ny * z);
                let a = pos[axis] as isize;
                let mut acc = 0.0;
                let mut norm = 0.0;
                for (k, &w) in weights.iter().enumerate() {
                    let off = k as isize - h as isize;
                    let j = a + off;
                    if j < 0 || j >= len_axis as isize {
                        continue;
                    }
                    let neighbor = (idx as isize + off * stride[axis] as isize) as usize;
                    acc += w * data[neighbor];
                    norm += w * w;
                }
                out[idx] = acc / norm.sqrt();
            }
        }
    }
    out
}

/// A Gaussian random field on `dims` with unit marginal variance: white noise
/// convolved separably with a Gaussian kernel of the given FWHM, truncated at
/// ±4σ, with per-voxel renormalization at the boundaries (no wraparound).
pub fn smoothed_field_noise(dims: [usize; 3], fwhm: f64, rng: &mut impl Rng) -> Vec<f64> {
    let m: usize = dims.iter().product();
    let mut field: Vec<f64> = (0..m)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let sigma = fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt());
    let h = (4.0 * sigma).ceil() as usize;
    if h == 0 {
        return field;
    }
    let weights: Vec<f64> = (-(h as isize)..=h as isize)
        .map(|k| (-(k as f64) * (k as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    for axis in 0..3 {
        if dims[axis] > 1 {
            field = smooth_axis(&field, dims, axis, &weights);
        }
    }
    field
}

fn one_rep(
    cfg: &SimConfig,
    proc_: &Procedure,
    theta_shared: Option<&Vec<f64>>,
    rep: usize,
) -> Result<ErrorMetrics> {
    let mut rng = stream_rng(cfg.seed, rep as u64 + 1);
    let theta_local;
    let theta: &Vec<f64> = match theta_shared {
        Some(t) => t,
        None => {
            theta_local = draw_theta(&cfg.theta, cfg.m, &mut rng)?;
            &theta_local
        }
    };
    let noise: Vec<f64> = match cfg.noise {
        NoiseModel::Independent => (0..cfg.m)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect(),
        NoiseModel::SmoothedField { dims, fwhm } => smoothed_field_noise(dims, fwhm, &mut rng),
    };
    let units: Vec<Unit> = theta
        .iter()
        .zip(&noise)
        .map(|(&t, &e)| Unit::new(String::new(), t + e))
        .collect();
    let res = proc_.run(&units)?;
    let em = evaluate(&res, theta)?;
    // Deterministic inequality between the two error proportions; a violation
    // means the procedure produced an interval conflicting with its decision.
    if em.wdfdp > em.fcp + 1e-12 {
        return Err(Error::Numeric(format!(
            "replicate {rep}: wdFDP {} exceeds FCP {}",
            em.wdfdp, em.fcp
        )));
    }
    Ok(em)
}

/// Per-replicate error metrics, ordered by replicate index.
pub fn run_reps(cfg: &SimConfig) -> Result<Vec<ErrorMetrics>> {
    validate(cfg)?;
    let proc_ = Procedure::prepare(&cfg.procedure, cfg.m)?;
    let theta_shared = if cfg.theta_fixed {
        Some(draw_theta(&cfg.theta, cfg.m, &mut stream_rng(cfg.seed, 0))?)
    } else {
        None
    };
    (0..cfg.n_reps)
        .into_par_iter()
        .map(|rep| one_rep(cfg, &proc_, theta_shared.as_ref(), rep))
        .collect()
}

fn mean_se(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let mean = values.clone().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss = values.map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt())
}

/// Runs the configured experiment and aggregates the replicates.
pub fn run(cfg: &SimConfig) -> Result<SimSummary> {
    let reps = run_reps(cfg)?;
    let n = reps.len();
    let (mean_fcp, se_fcp) = mean_se(reps.iter().map(|m| m.fcp), n);
    let (mean_wdfdp, se_wdfdp) = mean_se(reps.iter().map(|m| m.wdfdp), n);
    let mean_r = reps.iter().map(|m| m.r_ci as f64).sum::<f64>() / n as f64;
    Ok(SimSummary {
        mean_fcp,
        se_fcp,
        mean_wdfdp,
        se_wdfdp,
        mean_r,
        reps: n,
    })
}

/// Configuration of the rectangle-FCR experiment: independent bivariate
/// normal scores around (θ₁ᵢ, θ₂ᵢ), selection on the second coordinate.
#[derive(Clone, Debug)]
pub struct RectSimConfig {
    pub theta1: Vec<f64>,
    pub theta2: Vec<f64>,
    pub q1: f64,
    pub q2: f64,
    pub family2: MarginalFamily,
    pub n_reps: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RectSimSummary {
    /// Mean realized false coverage proportion of the rectangles.
    pub fcr_rect: f64,
    pub se_rect: f64,
    /// Mean realized FCP of the PC2 intervals alone.
    pub fcr_pc2: f64,
    pub se_pc2: f64,
    /// Fraction of replicates with at least one selection.
    pub p_any_selection: f64,
    pub mean_r: f64,
    /// Mean of Q_rect − q₁·1{R ≥ 1} − (1 − q₁)·Q₂, which has expectation zero
    /// when the PC1 side has exact coverage and selection depends only on the
    /// second coordinate.
    pub identity_gap: f64,
    pub se_gap: f64,
    pub reps: usize,
}

/// Simulates the level-(q₁, q₂) rectangle adjustment and the decomposition of
/// its FCR into the PC1 and PC2 contributions.
pub fn run_rect(cfg: &RectSimConfig) -> Result<RectSimSummary> {
    let m = cfg.theta1.len();
    if m == 0 || cfg.theta2.len() != m {
        return Err(Error::Config(format!(
            "theta vectors must be nonempty and equal length: {} vs {}",
            m,
            cfg.theta2.len()
        )));
    }
    if !(cfg.q1 > 0.0 && cfg.q1 < 1.0) || !(cfg.q2 > 0.0 && cfg.q2 < 1.0) {
        return Err(Error::Domain(format!(
            "q1={}, q2={} must lie in (0,1)",
            cfg.q1, cfg.q2
        )));
    }
    if cfg.n_reps == 0 {
        return Err(Error::Config("n_reps must be positive".into()));
    }
    let sym = MarginalFamily::standard(crate::marginal::FamilyKind::Symmetric)?;
    let rule1 = sym.at_level(cfg.q1)?;
    let taus = (1..=m)
        .map(|r| cfg.family2.sign_threshold(r as f64 * cfg.q2 / m as f64))
        .collect::<Result<Vec<f64>>>()?;

    struct Rep {
        q_rect: f64,
        q_pc2: f64,
        any: f64,
        r: usize,
    }

    let reps: Vec<Rep> = (0..cfg.n_reps)
        .into_par_iter()
        .map(|rep| -> Result<Rep> {
            let mut rng = stream_rng(cfg.seed, rep as u64 + 1);
            let y1: Vec<f64> = cfg
                .theta1
                .iter()
                .map(|t| t + rng.sample::<f64, _>(StandardNormal))
                .collect();
            let y2: Vec<f64> = cfg
                .theta2
                .iter()
                .map(|t| t + rng.sample::<f64, _>(StandardNormal))
                .collect();
            let mut sorted: Vec<f64> = y2.iter().map(|v| v.abs()).collect();
            sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let r = (1..=m)
                .rev()
                .find(|&r| taus[r - 1] <= sorted[r - 1])
                .unwrap_or(0);
            if r == 0 {
                return Ok(Rep {
                    q_rect: 0.0,
                    q_pc2: 0.0,
                    any: 0.0,
                    r: 0,
                });
            }
            let rule2 = cfg.family2.at_level(r as f64 * cfg.q2 / m as f64)?;
            let mut v_rect = 0usize;
            let mut v_pc2 = 0usize;
            for i in 0..m {
                if y2[i].abs() < taus[r - 1] {
                    continue;
                }
                let miss2 = !rule2.interval(y2[i]).contains(cfg.theta2[i]);
                let miss1 = !rule1.interval(y1[i]).contains(cfg.theta1[i]);
                if miss2 {
                    v_pc2 += 1;
                }
                if miss1 || miss2 {
                    v_rect += 1;
                }
            }
            Ok(Rep {
                q_rect: v_rect as f64 / r as f64,
                q_pc2: v_pc2 as f64 / r as f64,
                any: 1.0,
                r,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let n = reps.len();
    let (fcr_rect, se_rect) = mean_se(reps.iter().map(|r| r.q_rect), n);
    let (fcr_pc2, se_pc2) = mean_se(reps.iter().map(|r| r.q_pc2), n);
    let gaps: Vec<f64> = reps
        .iter()
        .map(|r| r.q_rect - cfg.q1 * r.any - (1.0 - cfg.q1) * r.q_pc2)
        .collect();
    let (identity_gap, se_gap) = mean_se(gaps.iter().copied(), n);
    let p_any_selection = reps.iter().map(|r| r.any).sum::<f64>() / n as f64;
    let mean_r = reps.iter().map(|r| r.r as f64).sum::<f64>() / n as f64;
    Ok(RectSimSummary {
        fcr_rect,
        se_rect,
        fcr_pc2,
        se_pc2,
        p_any_selection,
        mean_r,
        identity_gap,
        se_gap,
        reps: n,
    })
}
