//! Stability report shared by the Hartree and Schrodinger-wave analyses.

use serde::{Deserialize, Serialize};

use crate::hartree_spec::HartreeModeVerdict;
use crate::modes::Mode;
use crate::sw_spec::{SwCountReport, UnstableRoot};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// "hartree" or "schrodinger-wave".
    pub system: String,
    pub k: Mode,
    pub spectrally_stable: bool,
    /// "spectrally stable", "spectrally unstable" or "out of proven regime".
    pub verdict: String,
    pub in_proven_regime: bool,
    pub unstable_modes: Vec<Mode>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hartree_modes: Vec<HartreeModeVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<SwCountReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub roots: Vec<UnstableRoot>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_star: Option<f64>,
}
