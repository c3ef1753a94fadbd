//! The four subcommands.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use chgeo_core::flow::{evolve as integrate, FlowConfig, FlowState};
use chgeo_core::metric::CurvatureReport;
use chgeo_core::modes::{ModeFilter, ModeVectors, SurveyRow};
use chgeo_core::spectral::TrigPoly;
use chgeo_core::verify::{run_suites, SuiteResult, VerifyError};
use chgeo_core::AlgebraElement;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::output::{num, sidecar_path, write_all_atomic};
use crate::CliError;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Malformed(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Comma-separated rows plus the same table as whitespace columns.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    fn dat(&self, preamble: &[String]) -> String {
        let mut out = String::new();
        for line in preamble {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(out, "# {}", self.header.join(" "));
        for row in &self.rows {
            let cells: Vec<&str> = row
                .iter()
                .map(|c| match c.as_str() {
                    "true" => "1",
                    "false" => "0",
                    other => other,
                })
                .collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CurvatureInput {
    u: AlgebraElement,
    v: AlgebraElement,
}

pub fn curvature(input: &Path, output: &Path) -> Result<(), CliError> {
    let CurvatureInput { u, v } = read_json(input)?;
    let report = CurvatureReport::compute(&u, &v);
    if report.k.is_none() {
        let det = report.gram_uu * report.gram_vv - report.gram_uv * report.gram_uv;
        return Err(CliError::Degenerate(format!(
            "Gram determinant {det:e} relative to ⟨u,u⟩⟨v,v⟩ = {:e}",
            report.gram_uu * report.gram_vv
        )));
    }
    write_all_atomic(&[(output, to_json(&report)?)])
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SurveyInput {
    k1: [u32; 2],
    k2: [u32; 2],
    l1: [u32; 2],
    l2: [u32; 2],
    /// Absolute α values.
    #[serde(default)]
    alpha: Vec<f64>,
    /// Multiples `c` giving `α = c·M²` with `M = max{2πk₁, 2πl₁}`.
    #[serde(default)]
    alpha_m2: Vec<f64>,
    #[serde(default = "one")]
    beta: f64,
    #[serde(default)]
    modes: ModeFilter,
}

fn one() -> f64 {
    1.0
}

fn mode_range(name: &str, [lo, hi]: [u32; 2]) -> Result<std::ops::RangeInclusive<u32>, CliError> {
    if lo == 0 {
        return Err(CliError::Malformed(format!(
            "{name} range starts at 0; modes start at 1"
        )));
    }
    Ok(lo..=hi)
}

fn survey_grid(inp: &SurveyInput) -> Result<Vec<ModeVectors>, CliError> {
    if let Some(x) = inp
        .alpha
        .iter()
        .chain(&inp.alpha_m2)
        .find(|x| !x.is_finite())
    {
        return Err(CliError::Malformed(format!("non-finite alpha entry {x}")));
    }
    if !inp.beta.is_finite() {
        return Err(CliError::Malformed(format!("non-finite beta {}", inp.beta)));
    }
    let (r1, r2) = (mode_range("k1", inp.k1)?, mode_range("k2", inp.k2)?);
    let (r3, r4) = (mode_range("l1", inp.l1)?, mode_range("l2", inp.l2)?);
    let mut grid = Vec::new();
    for k1 in r1 {
        for k2 in r2.clone() {
            for l1 in r3.clone() {
                for l2 in r4.clone() {
                    if !inp.modes.admits(k1, k2, l1, l2) {
                        continue;
                    }
                    let probe = ModeVectors::new(k1, k2, l1, l2, 0.0, inp.beta)
                        .map_err(|e| CliError::Malformed(e.to_string()))?;
                    let m2 = probe.max_frequency().powi(2);
                    let mut alphas: Vec<f64> = inp
                        .alpha
                        .iter()
                        .copied()
                        .chain(inp.alpha_m2.iter().map(|c| c * m2))
                        .collect();
                    alphas.sort_by(f64::total_cmp);
                    for alpha in alphas {
                        grid.push(ModeVectors { alpha, ..probe });
                    }
                }
            }
        }
    }
    Ok(grid)
}

const SURVEY_HEADER: [&str; 17] = [
    "k1", "k2", "l1", "l2", "alpha", "beta", "S", "S_2ch", "K1", "K2", "K3", "K4", "K5", "bound1",
    "bound2", "K", "passed",
];

fn survey_cells(r: &SurveyRow) -> Vec<String> {
    let m = &r.modes;
    let mut cells = vec![
        m.k1.to_string(),
        m.k2.to_string(),
        m.l1.to_string(),
        m.l2.to_string(),
    ];
    cells.extend([m.alpha, m.beta, r.s, r.s_2ch].map(num));
    cells.extend(r.terms.as_array().map(num));
    cells.extend([r.bound1, r.bound2, r.k].map(num));
    cells.push(r.passed.to_string());
    cells
}

pub fn survey(input: &Path, output: &Path) -> Result<(), CliError> {
    let inp: SurveyInput = read_json(input)?;
    let grid = survey_grid(&inp)?;
    let rows: Vec<SurveyRow> = grid.par_iter().map(SurveyRow::compute).collect();
    let table = Table {
        header: SURVEY_HEADER.to_vec(),
        rows: rows.iter().map(survey_cells).collect(),
    };
    let preamble = [
        format!("modes={}", inp.modes.name()),
        format!("rows={}", rows.len()),
    ];
    write_all_atomic(&[
        (output, table.csv()),
        (&sidecar_path(output), table.dat(&preamble)),
    ])
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EvolveInput {
    u: TrigPoly,
    rho: TrigPoly,
    alpha: f64,
    #[serde(rename = "N")]
    n: usize,
    dt: f64,
    t_end: f64,
    #[serde(default)]
    monitor_stride: Option<usize>,
    #[serde(default)]
    blowup_threshold: Option<f64>,
}

pub fn evolve(input: &Path, output: &Path) -> Result<(), CliError> {
    let inp: EvolveInput = read_json(input)?;
    let st = FlowState::new(inp.u, inp.rho, inp.alpha);
    let mut cfg = FlowConfig::new(inp.n, inp.dt, inp.t_end);
    if let Some(stride) = inp.monitor_stride {
        cfg.monitor_stride = stride;
    }
    if let Some(threshold) = inp.blowup_threshold {
        cfg.blowup_threshold = threshold;
    }
    let traj = integrate(&st, &cfg)?;
    let table = Table {
        header: vec!["t", "energy", "mu0_1_norm", "mu0_2_norm", "mu0_3", "sup_ux"],
        rows: traj
            .diagnostics
            .iter()
            .map(|d| {
                [d.t, d.energy, d.mu0_1_norm, d.mu0_2_norm, d.mu0_3, d.sup_ux]
                    .map(num)
                    .to_vec()
            })
            .collect(),
    };
    let preamble = [format!(
        "N={} dt={} t_end={} monitor_stride={} blowup_threshold={}",
        cfg.truncation, cfg.dt, cfg.t_end, cfg.monitor_stride, cfg.blowup_threshold
    )];
    write_all_atomic(&[
        (output, table.csv()),
        (&sidecar_path(output), table.dat(&preamble)),
    ])
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyInput {
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct VerifySummary {
    seed: u64,
    passed: bool,
    suites: BTreeMap<&'static str, SuiteResult>,
}

pub fn verify(
    input: Option<&Path>,
    output: &Path,
    seed: Option<u64>,
    tol: Vec<(String, f64)>,
) -> Result<(), CliError> {
    let file: VerifyInput = match input {
        Some(path) => read_json(path)?,
        None => VerifyInput::default(),
    };
    let seed = seed.or(file.seed).unwrap_or(0);
    let mut overrides = file.tolerances;
    if let Some((name, value)) = overrides.iter().find(|(_, v)| v.is_nan() || **v < 0.0) {
        return Err(CliError::Malformed(format!(
            "tolerance for {name} must be non-negative, got {value}"
        )));
    }
    overrides.extend(tol);
    let suites = run_suites(seed, &overrides).map_err(|e| match e {
        VerifyError::UnknownSuite(_) => CliError::Malformed(e.to_string()),
        other => CliError::Runtime(other.to_string()),
    })?;
    let failed = suites.values().filter(|r| !r.passed).count();
    let summary = VerifySummary {
        seed,
        passed: failed == 0,
        suites,
    };
    write_all_atomic(&[(output, to_json(&summary)?)])?;
    for (name, r) in summary.suites.iter().filter(|(_, r)| !r.passed) {
        eprintln!(
            "FAIL {name}: worst residual {:e} > tolerance {:e}",
            r.worst_residual, r.tolerance
        );
    }
    if failed > 0 {
        return Err(CliError::VerifyFailed { failed });
    }
    Ok(())
}
