//! Machine-readable report documents. The JSON layout is described by
//! `schema/report.schema.json`.

use std::fmt::Write as _;

use dfs_core::analysis::{AnalysisReport, Checked, FeedbackProtocol};
use dfs_core::VerificationReport;
use serde::{Deserialize, Serialize};

pub const TOOL: &str = "dfsctl";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `[re, im]`.
pub type JsonComplex = [f64; 2];
/// Row-major matrix of `[re, im]` entries.
pub type JsonMatrix = Vec<Vec<JsonComplex>>;

pub fn encode_matrix(m: &dfs_core::ComplexMatrix) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        }
    }
}

/// One scalar check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub status: Status,
    pub value: Option<f64>,
    pub threshold: f64,
    pub reason: Option<String>,
}

impl CheckEntry {
    fn measured(value: f64, threshold: f64) -> Self {
        Self {
            status: Status::from_bool(value <= threshold),
            value: Some(value),
            threshold,
            reason: None,
        }
    }

    fn from_checked(c: &Checked<f64>, threshold: f64) -> Self {
        match c {
            Checked::Done(v) => Self::measured(*v, threshold),
            Checked::Skipped { reason } => Self {
                status: Status::Skipped,
                value: None,
                threshold,
                reason: Some(reason.clone()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfsEntry {
    pub status: Status,
    pub second_eigenvalue: Option<f64>,
    pub restricted_eigenvalues: Option<Vec<f64>>,
    pub channel_residual: Option<f64>,
    pub threshold: f64,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checks {
    pub tpcp: CheckEntry,
    pub range: CheckEntry,
    pub dfs: DfsEntry,
    pub cross_term: CheckEntry,
    pub theorem: CheckEntry,
    pub coherence_sensitivity: CheckEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub u_a: JsonMatrix,
    pub coeffs: Vec<JsonComplex>,
    pub unitarity_residual: f64,
    pub proportionality_residual: f64,
    pub coefficient_norm_residual: f64,
    pub channel_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolEntry {
    pub u_a: JsonMatrix,
    pub corrections: Vec<JsonMatrix>,
}

impl From<&FeedbackProtocol> for ProtocolEntry {
    fn from(p: &FeedbackProtocol) -> Self {
        Self {
            u_a: encode_matrix(&p.u_a),
            corrections: p.correction.iter().map(encode_matrix).collect(),
        }
    }
}

/// Output of `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub input_digest: String,
    pub tolerance: f64,
    pub dim: usize,
    pub dim_a: usize,
    pub passed: bool,
    pub checks: Checks,
    pub certificate: Option<CertificateEntry>,
    pub protocol: Option<ProtocolEntry>,
    pub corollary_applies: bool,
    pub notes: Vec<String>,
}

impl ReportDocument {
    pub fn new(report: &AnalysisReport, protocol: Option<&FeedbackProtocol>, input_digest: &str) -> Self {
        let tol = report.tolerance;
        let dfs_threshold = tol * report.dim_a as f64;
        let dfs = match &report.dfs {
            Checked::Done(d) => DfsEntry {
                status: Status::from_bool(d.passed()),
                second_eigenvalue: Some(d.second_eigenvalue),
                restricted_eigenvalues: Some(d.restricted_eigenvalues.clone()),
                channel_residual: Some(d.channel_residual),
                threshold: dfs_threshold,
                reason: None,
            },
            Checked::Skipped { reason } => DfsEntry {
                status: Status::Skipped,
                second_eigenvalue: None,
                restricted_eigenvalues: None,
                channel_residual: None,
                threshold: dfs_threshold,
                reason: Some(reason.clone()),
            },
        };
        let certificate = report.dfs_certificate().map(|c| CertificateEntry {
            u_a: encode_matrix(&c.u_a),
            coeffs: c.coeffs.iter().map(|z| [z.re, z.im]).collect(),
            unitarity_residual: c.unitarity_residual,
            proportionality_residual: c.proportionality_residual,
            coefficient_norm_residual: c.coefficient_norm_residual,
            channel_residual: c.channel_residual,
        });
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            input_digest: input_digest.into(),
            tolerance: tol,
            dim: report.dim,
            dim_a: report.dim_a,
            passed: report.passed(),
            checks: Checks {
                tpcp: tpcp_entry(&report.tpcp),
                range: CheckEntry::measured(report.range.residual, tol),
                dfs,
                cross_term: CheckEntry::from_checked(&report.cross_term_residual, tol),
                theorem: CheckEntry::from_checked(&report.theorem_residual, report.theorem_tolerance),
                coherence_sensitivity: CheckEntry::from_checked(&report.coherence_sensitivity, tol),
            },
            certificate,
            protocol: protocol.map(ProtocolEntry::from),
            corollary_applies: report.corollary_applies,
            notes: report.notes.clone(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}  input {}", self.tool, self.version, self.input_digest);
        let _ = writeln!(
            s,
            "dim {}  dim_a {}  tolerance {:e}",
            self.dim, self.dim_a, self.tolerance
        );
        let c = &self.checks;
        line(&mut s, "trace preserving", &c.tpcp);
        line(&mut s, "range condition", &c.range);
        let _ = write!(s, "{:<22}{}", "decoherence-free", c.dfs.status.label());
        if let Some(v) = c.dfs.second_eigenvalue {
            let _ = write!(s, "  second eigenvalue {v:.3e} (threshold {:.1e})", c.dfs.threshold);
        }
        if let Some(r) = &c.dfs.reason {
            let _ = write!(s, "  ({r})");
        }
        s.push('\n');
        line(&mut s, "cross term", &c.cross_term);
        line(&mut s, "coherence destroyed", &c.theorem);
        line(&mut s, "coherence sensitivity", &c.coherence_sensitivity);
        if let Some(cert) = &self.certificate {
            let _ = writeln!(s, "U_A:");
            for row in &cert.u_a {
                let cells: Vec<String> = row.iter().map(|[re, im]| format!("{re:+.6}{im:+.6}i")).collect();
                let _ = writeln!(s, "  {}", cells.join("  "));
            }
        }
        if let Some(p) = &self.protocol {
            let _ = writeln!(
                s,
                "feedback protocol: U_A on outcome A, {} correction operator(s) on outcome Ā",
                p.corrections.len()
            );
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        let _ = writeln!(s, "overall {}", if self.passed { "PASS" } else { "FAIL" });
        s
    }
}

fn tpcp_entry(r: &VerificationReport) -> CheckEntry {
    CheckEntry {
        status: Status::from_bool(r.passed),
        value: Some(r.residual),
        threshold: r.tolerance,
        reason: None,
    }
}

fn line(s: &mut String, name: &str, e: &CheckEntry) {
    let _ = write!(s, "{name:<22}{}", e.status.label());
    if let Some(v) = e.value {
        let _ = write!(s, "  {v:.3e} (threshold {:.1e})", e.threshold);
    }
    if let Some(r) = &e.reason {
        let _ = write!(s, "  ({r})");
    }
    s.push('\n');
}

/// Output of `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyDocument {
    pub tool: String,
    pub version: String,
    pub input_digest: String,
    pub tolerance: f64,
    pub passed: bool,
    pub tpcp: CheckEntry,
    pub range: CheckEntry,
}

impl VerifyDocument {
    pub fn new(tpcp: &VerificationReport, range: &dfs_core::RangeCheck, tol: f64, input_digest: &str) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            input_digest: input_digest.into(),
            tolerance: tol,
            passed: tpcp.passed && range.passed,
            tpcp: tpcp_entry(tpcp),
            range: CheckEntry::measured(range.residual, tol),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}  input {}", self.tool, self.version, self.input_digest);
        line(&mut s, "trace preserving", &self.tpcp);
        line(&mut s, "range condition", &self.range);
        let _ = writeln!(s, "overall {}", if self.passed { "PASS" } else { "FAIL" });
        s
    }
}

/// Output of `sample`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleDocument {
    pub tool: String,
    pub version: String,
    pub input_digest: String,
    pub tolerance: f64,
    pub seed: u64,
    pub n: usize,
    pub corollary_applies: bool,
    pub purity_min: f64,
    pub purity_median: f64,
    pub purity_max: f64,
    /// Draws with purity ≥ 1 − tolerance.
    pub pure_count: usize,
    /// Indices of draws flagged as exception states.
    pub exception_hits: Vec<usize>,
    /// Draws with `ψ_A = 0` or `ψ_Ā = 0`.
    pub vacuous_count: usize,
}

impl SampleDocument {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}  input {}", self.tool, self.version, self.input_digest);
        let _ = writeln!(
            s,
            "draws {}  seed {}  tolerance {:e}",
            self.n, self.seed, self.tolerance
        );
        let _ = writeln!(
            s,
            "purity min {:.6}  median {:.6}  max {:.6}",
            self.purity_min, self.purity_median, self.purity_max
        );
        let _ = writeln!(s, "purity ≥ 1 − tol: {} of {}", self.pure_count, self.n);
        let _ = writeln!(
            s,
            "exception states: {} {:?}",
            self.exception_hits.len(),
            self.exception_hits
        );
        if !self.corollary_applies {
            let _ = writeln!(s, "note: d_A = 1, pure outputs are expected");
        }
        s
    }
}
