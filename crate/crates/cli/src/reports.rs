//! Serializable report bodies, one per subcommand. Exact values carry both a
//! rational string and a decimal rendering.

use std::path::Path;

use serde::Serialize;

use geomex_core::bounds::{CertifyReport, Verdict, WalkBound};
use geomex_core::complex::{TypedComplex, ValidationReport, VertexId};
use geomex_core::discrepancy::{DiscMethod, DiscrepancyResult, SpectralBound};
use geomex_core::geometry::CoverageResult;
use geomex_core::numeric::{rat_string, rat_to_f64};
use geomex_core::spectral::{IdentityStatus, LambdaResult, WalkDecomposition};

use crate::manifest::sha256_hex;

#[derive(Serialize)]
pub struct GenerateReport {
    pub d: usize,
    pub class_sizes: Vec<usize>,
    pub chambers: usize,
    pub out: String,
    pub out_sha256: String,
    pub pruned: Vec<String>,
    pub valid: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
}

impl GenerateReport {
    pub fn new(
        cx: &TypedComplex,
        out: &Path,
        pruned: &[VertexId],
        validation: &ValidationReport,
    ) -> Self {
        let bytes = std::fs::read(out).unwrap_or_default();
        GenerateReport {
            d: cx.d(),
            class_sizes: cx.class_sizes(),
            chambers: cx.chambers().len(),
            out: out.display().to_string(),
            out_sha256: sha256_hex(&bytes),
            pruned: pruned.iter().map(|id| id.0.clone()).collect(),
            valid: validation.is_valid(),
            violations: validation
                .violations
                .iter()
                .map(|v| v.to_string())
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct LambdaEntry {
    #[serde(rename = "type")]
    pub type_label: usize,
    pub value: f64,
    pub connected: bool,
    pub exact_zero: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    pub per_component: Vec<f64>,
}

impl LambdaEntry {
    pub fn new(type_label: usize, r: &LambdaResult) -> Self {
        LambdaEntry {
            type_label,
            value: r.value,
            connected: r.connected,
            exact_zero: r.exact_zero,
            iterations: r.iterations,
            per_component: r.per_component.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct WalkEntry {
    #[serde(rename = "type")]
    pub type_label: usize,
    pub n: usize,
    pub uniform: bool,
    pub identity_exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity_witness: Option<String>,
    /// Row per start vertex when non-uniform, single row otherwise.
    pub alpha: Vec<Vec<String>>,
    pub alpha_decimal: Vec<Vec<f64>>,
}

impl WalkEntry {
    pub fn new(type_label: usize, wd: &WalkDecomposition) -> Self {
        let rows: Vec<&Vec<_>> = if wd.uniform {
            vec![&wd.alpha[0]]
        } else {
            wd.alpha.iter().collect()
        };
        let alpha: Vec<Vec<String>> = rows
            .iter()
            .map(|r| r.iter().map(rat_string).collect())
            .collect();
        let alpha_decimal: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(rat_to_f64).collect())
            .collect();
        let (identity_exact, identity_witness) = match &wd.identity {
            IdentityStatus::Exact => (true, None),
            IdentityStatus::NonConstantSphere { vertex, radius } => (
                false,
                Some(format!(
                    "walk mass not constant on the radius-{radius} sphere of left vertex {vertex}"
                )),
            ),
        };
        WalkEntry {
            type_label,
            n: wd.n,
            uniform: wd.uniform,
            identity_exact,
            identity_witness,
            alpha,
            alpha_decimal,
        }
    }
}

#[derive(Serialize)]
pub struct WalkBoundEntry {
    pub k: u64,
    pub bound: String,
    pub bound_decimal: f64,
    pub vacuous: bool,
}

impl WalkBoundEntry {
    pub fn new(k: u64, wb: &WalkBound) -> Self {
        WalkBoundEntry {
            k,
            bound: rat_string(&wb.value),
            bound_decimal: rat_to_f64(&wb.value),
            vacuous: wb.vacuous,
        }
    }
}

#[derive(Serialize)]
pub struct SpectralReport {
    pub lambda: Vec<LambdaEntry>,
    pub walk: WalkEntry,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walk_bounds: Option<Vec<WalkBoundEntry>>,
}

#[derive(Serialize)]
pub struct DiscReport {
    pub method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_rational: Option<String>,
    pub value_decimal: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_type: Option<Vec<f64>>,
}

impl DiscReport {
    pub fn from_result(r: &DiscrepancyResult) -> Self {
        DiscReport {
            method: match r.method {
                DiscMethod::Exact => "exact",
                DiscMethod::LocalSearch => "local-search",
            },
            value_rational: Some(rat_string(&r.value)),
            value_decimal: r.value_f64(),
            witness: Some(
                r.witness
                    .subsets
                    .iter()
                    .map(|class| class.iter().map(|id| id.0.clone()).collect())
                    .collect(),
            ),
            per_type: None,
        }
    }

    pub fn from_bound(_d: usize, b: &SpectralBound) -> Self {
        DiscReport {
            method: "spectral-bound",
            value_rational: b.exact_zero.then(|| "0".to_owned()),
            value_decimal: b.value,
            witness: None,
            per_type: Some(b.per_type.clone()),
        }
    }
}

#[derive(Serialize)]
pub struct OverlapReport {
    pub mode: &'static str,
    pub point: Vec<String>,
    pub point_decimal: Vec<f64>,
    pub covered: usize,
    pub total: usize,
    pub fraction: String,
    pub fraction_decimal: f64,
    pub witnesses: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub degenerate_chambers: Vec<usize>,
}

impl OverlapReport {
    pub fn new(mode: &'static str, r: &CoverageResult) -> Self {
        OverlapReport {
            mode,
            point: r.point.iter().map(rat_string).collect(),
            point_decimal: r.point.iter().map(rat_to_f64).collect(),
            covered: r.covered,
            total: r.total,
            fraction: rat_string(&r.fraction),
            fraction_decimal: r.fraction_f64(),
            witnesses: r.witnesses.clone(),
            degenerate_chambers: r.degenerate.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct CertifyReportJson {
    pub d: usize,
    pub c_d: String,
    pub c_d_provenance: String,
    pub threshold: String,
    pub threshold_decimal: f64,
    pub disc_bound: f64,
    pub per_type: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_exact: Option<String>,
    #[serde(flatten)]
    pub verdict: Verdict,
}

impl CertifyReportJson {
    pub fn new(r: &CertifyReport, provenance: &str) -> Self {
        CertifyReportJson {
            d: r.d,
            c_d: rat_string(&r.c_d),
            c_d_provenance: provenance.to_owned(),
            threshold: rat_string(&r.threshold),
            threshold_decimal: rat_to_f64(&r.threshold),
            disc_bound: r.disc_bound,
            per_type: r.per_type.clone(),
            epsilon_exact: r.epsilon_exact.as_ref().map(rat_string),
            verdict: r.verdict.clone(),
        }
    }

    pub fn summary(&self) -> String {
        match &self.verdict {
            Verdict::CertifiedOverlap { epsilon } => match &self.epsilon_exact {
                Some(exact) => format!("certified overlap with epsilon = {exact} (exactly)"),
                None => format!("certified overlap with epsilon = {epsilon:.6}"),
            },
            Verdict::Inconclusive { gap } => {
                format!("inconclusive: measured bound exceeds threshold by {gap:.6}")
            }
        }
    }
}
