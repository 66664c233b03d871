//! Flag-to-family resolution shared by the subcommands.

use crate::errors::{CliError, CliResult};
use sdci_core::marginal::{FamilyKind, MarginalFamily};

/// Builds a marginal family from its flag name, enforcing that ψ is given
/// exactly for qc/mqc and δ exactly for mqc-delta.
pub fn build_family(name: &str, psi: Option<f64>, delta: Option<f64>) -> CliResult<MarginalFamily> {
    let kind = match name {
        "symmetric" => FamilyKind::Symmetric,
        "one-sided" => FamilyKind::OneSided,
        "pratt" => FamilyKind::Pratt,
        "qc" | "mqc" => {
            let psi =
                psi.ok_or_else(|| CliError::Usage(format!("family '{name}' requires --psi")))?;
            if name == "qc" {
                FamilyKind::Qc { psi }
            } else {
                FamilyKind::Mqc { psi }
            }
        }
        "mqc-delta" => {
            let delta = delta
                .ok_or_else(|| CliError::Usage("family 'mqc-delta' requires --delta".into()))?;
            FamilyKind::MqcDelta { delta }
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown family {other:?}; expected symmetric|one-sided|pratt|qc|mqc|mqc-delta"
            )))
        }
    };
    match kind {
        FamilyKind::Qc { .. } | FamilyKind::Mqc { .. } => {
            if delta.is_some() {
                return Err(CliError::Usage(format!(
                    "--delta does not apply to family '{name}'"
                )));
            }
        }
        FamilyKind::MqcDelta { .. } => {
            if psi.is_some() {
                return Err(CliError::Usage(
                    "--psi does not apply to family 'mqc-delta'".into(),
                ));
            }
        }
        _ => {
            if psi.is_some() || delta.is_some() {
                return Err(CliError::Usage(format!(
                    "--psi/--delta do not apply to family '{name}'"
                )));
            }
        }
    }
    Ok(MarginalFamily::standard(kind)?)
}
