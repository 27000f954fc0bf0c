//! Subcommand implementations. Each returns the process exit code:
//! 0 pass, 1 violation, 2 usage or input error. Reports go to `out`,
//! diagnostics to `err`.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use dfs_core::analysis::{self, corollary_check, extract_feedback_protocol, protocol_to_channel};
use dfs_core::generators::{self, counterexample_channel, random_dfs_channel, reset_channel, Seed};
use dfs_core::{DfsChannelSpec, SubspaceSplit, Tolerance};
use serde::Serialize;
use serde_json::json;

use crate::format::{self, ChannelFile};
use crate::report::{ReportDocument, SampleDocument, VerifyDocument, TOOL, VERSION};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoCase {
    Counterexample,
    Reset,
    Random,
}

#[derive(Debug, Clone, Copy)]
pub struct DemoOptions {
    pub case: DemoCase,
    pub seed: u64,
    pub dim_a: usize,
    pub dim_abar: usize,
    pub n_kraus: usize,
    pub target: usize,
}

fn load(path: &Path, flag_tol: Option<f64>, err: &mut dyn Write) -> Result<(ChannelFile, Tolerance), u8> {
    let file = format::read_channel_file(path).map_err(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_INPUT
    })?;
    let tol = match flag_tol {
        Some(eps) => Tolerance::new(eps).map_err(|e| {
            let _ = writeln!(err, "error: --tolerance: {e}");
            EXIT_INPUT
        })?,
        None => file.tolerance.unwrap_or_default(),
    };
    Ok((file, tol))
}

fn emit<T: Serialize>(doc: &T, text: impl FnOnce() -> String, fmt: OutputFormat, out: &mut dyn Write) {
    let rendered = match fmt {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("report serialises");
            s.push('\n');
            s
        }
        OutputFormat::Text => text(),
    };
    let _ = out.write_all(rendered.as_bytes());
}

fn fail_internal(e: dfs_core::Error, err: &mut dyn Write) -> u8 {
    let _ = writeln!(err, "error: {e}");
    EXIT_INPUT
}

pub fn verify(path: &Path, tol: Option<f64>, fmt: OutputFormat, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let (file, tol) = match load(path, tol, err) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let tpcp = file.channel.verify_tpcp(tol);
    let range = match analysis::check_range_condition(&file.channel, &file.split, tol) {
        Ok(r) => r,
        Err(e) => return fail_internal(e, err),
    };
    let doc = VerifyDocument::new(&tpcp, &range, tol.eps(), &file.digest);
    emit(&doc, || doc.to_text(), fmt, out);
    if doc.passed {
        EXIT_PASS
    } else {
        EXIT_VIOLATION
    }
}

pub fn analyze(path: &Path, tol: Option<f64>, fmt: OutputFormat, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let (file, tol) = match load(path, tol, err) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let report = match analysis::analyze(&file.channel, &file.split, tol) {
        Ok(r) => r,
        Err(e) => return fail_internal(e, err),
    };
    let protocol = if report.passed() {
        extract_feedback_protocol(&file.channel, &file.split, tol).ok()
    } else {
        None
    };
    let doc = ReportDocument::new(&report, protocol.as_ref(), &file.digest);
    emit(&doc, || doc.to_text(), fmt, out);
    if doc.passed {
        EXIT_PASS
    } else {
        EXIT_VIOLATION
    }
}

/// Writes the measure-then-correct protocol as a channel file (its `kraus`
/// field is the protocol's own realisation) with `u_a` and `corrections`
/// added.
pub fn decompose(
    path: &Path,
    tol: Option<f64>,
    out_path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> u8 {
    let (file, tol) = match load(path, tol, err) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let protocol = match extract_feedback_protocol(&file.channel, &file.split, tol) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "no feedback decomposition: {e}");
            return EXIT_VIOLATION;
        }
    };
    let rebuilt = match protocol_to_channel(&protocol, &file.split, tol) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "no feedback decomposition: {e}");
            return EXIT_VIOLATION;
        }
    };
    let mut doc = format::channel_to_json(&rebuilt, &file.split, file.tolerance);
    let obj = doc.as_object_mut().expect("channel document is an object");
    obj.insert("u_a".into(), format::matrix_to_json(&protocol.u_a));
    obj.insert(
        "corrections".into(),
        serde_json::Value::Array(protocol.correction.iter().map(format::matrix_to_json).collect()),
    );
    obj.insert("source_digest".into(), json!(file.digest));
    let mut text = serde_json::to_string_pretty(&doc).expect("document serialises");
    text.push('\n');
    match out_path {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text) {
                let _ = writeln!(err, "error: cannot write {}: {e}", p.display());
                return EXIT_INPUT;
            }
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    EXIT_PASS
}

/// Draws `n` Haar pure states (draw `i` uses sub-seed `seed.child(i)`) and
/// reports the output purity distribution.
pub fn sample(
    path: &Path,
    n: usize,
    seed: u64,
    tol: Option<f64>,
    fmt: OutputFormat,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> u8 {
    let (file, tol) = match load(path, tol, err) {
        Ok(v) => v,
        Err(code) => return code,
    };
    if n == 0 {
        let _ = writeln!(err, "error: --n must be ≥ 1");
        return EXIT_INPUT;
    }
    match analysis::check_range_condition(&file.channel, &file.split, tol) {
        Ok(r) if r.passed => {}
        Ok(r) => {
            let _ = writeln!(
                err,
                "range condition fails (residual {:e}); sampling needs a DFS control channel",
                r.residual
            );
            return EXIT_VIOLATION;
        }
        Err(e) => return fail_internal(e, err),
    }
    let base = Seed(seed);
    let mut purities = Vec::with_capacity(n);
    let mut exception_hits = Vec::new();
    let mut vacuous_count = 0;
    for i in 0..n {
        let psi = generators::random_pure_state(file.split.dim(), base.child(i as u64));
        match corollary_check(&file.channel, &file.split, &psi, tol) {
            Ok(r) => {
                purities.push(r.purity);
                if r.exception {
                    exception_hits.push(i);
                }
                if r.vacuous {
                    vacuous_count += 1;
                }
            }
            Err(e) => {
                let _ = writeln!(err, "cannot sample: {e}");
                return EXIT_VIOLATION;
            }
        }
    }
    let pure_count = purities.iter().filter(|&&p| p >= 1.0 - tol.eps()).count();
    let mut sorted = purities.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let doc = SampleDocument {
        tool: TOOL.into(),
        version: VERSION.into(),
        input_digest: file.digest.clone(),
        tolerance: tol.eps(),
        seed,
        n,
        corollary_applies: file.split.corollary_applies(),
        purity_min: sorted[0],
        purity_median: median,
        purity_max: sorted[n - 1],
        pure_count,
        exception_hits,
        vacuous_count,
    };
    emit(&doc, || doc.to_text(), fmt, out);
    EXIT_PASS
}

pub fn demo(opts: DemoOptions, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let built = match opts.case {
        DemoCase::Counterexample => Ok(counterexample_channel()),
        DemoCase::Reset => reset_channel(opts.dim_a, opts.dim_abar, opts.target).and_then(|ch| {
            let split = SubspaceSplit::standard(opts.dim_a + opts.dim_abar, opts.dim_a)?;
            Ok((ch, split))
        }),
        DemoCase::Random => random_dfs_channel(DfsChannelSpec {
            dim_a: opts.dim_a,
            dim_abar: opts.dim_abar,
            n_kraus: opts.n_kraus,
            seed: Seed(opts.seed),
        })
        .map(|inst| (inst.channel, inst.split)),
    };
    let (ch, split) = match built {
        Ok(v) => v,
        Err(e) => return fail_internal(e, err),
    };
    let doc = format::channel_to_json(&ch, &split, None);
    let mut text = serde_json::to_string_pretty(&doc).expect("document serialises");
    text.push('\n');
    let _ = out.write_all(text.as_bytes());
    EXIT_PASS
}
