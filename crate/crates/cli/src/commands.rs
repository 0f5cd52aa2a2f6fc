//! `compute`, `sweep` and `compare`.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use udw_core::harvest::{
    assemble_rho, compare_methods, compute_blocks_with, figure_prefactor, negativity, BlockEntry,
    ComparisonReport, DensityMatrixBlocks, Method, PerturbativityWarning, TwoDetectorState,
};
use udw_core::model::Scenario;

use crate::config::{MethodChoice, RunConfig};
use crate::error::CliError;
use crate::table::{complex, optional, real, to_csv};

/// Blocks, state and negativity for one scenario and method.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub method: Method,
    pub blocks: DensityMatrixBlocks,
    pub state: TwoDetectorState,
    pub negativity: f64,
    pub warning: Option<PerturbativityWarning>,
    /// `𝓜` over the common closed-form prefactor, for equal gaps and β > 0.
    pub scaled_m: Option<Complex64>,
}

pub fn evaluate(config: &RunConfig, scenario: &Scenario, method: Method) -> Result<Evaluation, CliError> {
    let blocks = compute_blocks_with(scenario, method, config.fast_tolerance()?, config.oracle_tolerance()?)?;
    let (state, warning) = assemble_rho(&blocks, config.lambda_a, config.lambda_b);
    let scaled_m = (scenario.equal_gaps() && scenario.beta() > 0.0)
        .then(|| blocks.m_total.value / figure_prefactor(scenario.alpha_a(), scenario.beta(), 1.0));
    Ok(Evaluation { method, negativity: negativity(&state), blocks, state, warning, scaled_m })
}

fn entry_line(out: &mut String, name: &str, e: &BlockEntry) {
    let _ = writeln!(
        out,
        "{name:<9} {:<26} {:>24} {:>24} {:>10.3e} {:>11}",
        e.method.name(),
        real(e.value.re),
        real(e.value.im),
        e.error_estimate,
        e.evaluations
    );
}

fn describe(out: &mut String, ev: &Evaluation) {
    let b = &ev.blocks;
    let _ = writeln!(out, "method {}", ev.method.name());
    let _ = writeln!(
        out,
        "{:<9} {:<26} {:>24} {:>24} {:>10} {:>11}",
        "block", "evaluated_by", "re", "im", "error", "evaluations"
    );
    entry_line(out, "l_aa", &b.l_aa);
    entry_line(out, "l_bb", &b.l_bb);
    entry_line(out, "l_ab", &b.l_ab);
    if let Some(p) = &b.m_plus {
        entry_line(out, "m_plus", p);
    }
    if let Some(m) = &b.m_minus {
        entry_line(out, "m_minus", m);
    }
    entry_line(out, "m", &b.m_total);
    if let Some(s) = ev.scaled_m {
        let _ = writeln!(out, "m_scaled  {} {}", real(s.re), real(s.im));
    }
    let _ = writeln!(out, "rho (basis gg, eg, ge, ee)");
    for row in &ev.state.matrix {
        let cells: Vec<String> = row.iter().map(|z| format!("{:+.6e}{:+.6e}i", z.re, z.im)).collect();
        let _ = writeln!(out, "  {}", cells.join("  "));
    }
    let _ = writeln!(out, "negativity {}", real(ev.negativity));
    if let Some(w) = &ev.warning {
        let _ = writeln!(out, "warning: {w}");
    }
}

fn header(out: &mut String, config: &RunConfig) {
    let p = config.params();
    let _ = writeln!(
        out,
        "scenario alpha_a={} alpha_b={} beta={} gamma={} delta_a={} delta_b={} lambda_a={} lambda_b={} mass={}",
        p.alpha_a, p.alpha_b, p.beta, p.gamma, p.delta_a, p.delta_b, p.lambda_a, p.lambda_b, p.mass
    );
    let _ = writeln!(out, "blocks per unit coupling; rho and negativity at the configured couplings");
}

fn deviation(a: Complex64, b: Complex64) -> f64 {
    if b.norm() > 0.0 {
        (a - b).norm() / b.norm()
    } else {
        (a - b).norm()
    }
}

pub fn compute(config: &RunConfig) -> Result<String, CliError> {
    let scenario = config.scenario()?;
    let mut out = String::new();
    header(&mut out, config);
    match config.method {
        MethodChoice::One(method) => describe(&mut out, &evaluate(config, &scenario, method)?),
        MethodChoice::All => {
            let mut done = Vec::new();
            for method in Method::ALL {
                // the references only exist for pointlike massless detectors
                match evaluate(config, &scenario, method) {
                    Ok(ev) => done.push(ev),
                    Err(CliError::Unsupported(e)) if method == Method::Oracle => {
                        let _ = writeln!(out, "method oracle skipped: {e}");
                        continue;
                    }
                    Err(e) => return Err(e),
                }
                out.push('\n');
                describe(&mut out, done.last().expect("just pushed"));
            }
            let base = &done[0];
            let _ = writeln!(out, "\ndeviations relative to {}", base.method.name());
            for ev in &done[1..] {
                for (name, a, b) in [
                    ("l_aa", ev.blocks.l_aa.value, base.blocks.l_aa.value),
                    ("l_bb", ev.blocks.l_bb.value, base.blocks.l_bb.value),
                    ("l_ab", ev.blocks.l_ab.value, base.blocks.l_ab.value),
                    ("m", ev.blocks.m_total.value, base.blocks.m_total.value),
                ] {
                    let _ = writeln!(out, "deviation {} {name} {}", ev.method.name(), real(deviation(a, b)));
                }
            }
        }
    }
    Ok(out)
}

pub const SWEEP_BLOCKS: [&str; 6] = ["l_aa", "l_bb", "l_ab", "m_plus", "m_minus", "m"];

pub fn sweep_header(axis: &str) -> Vec<String> {
    let mut h = vec![axis.to_string()];
    for b in SWEEP_BLOCKS {
        h.extend([format!("re_{b}"), format!("im_{b}"), format!("err_{b}")]);
    }
    h.extend(["re_m_scaled", "im_m_scaled", "negativity", "evaluations", "error"].map(String::from));
    h
}

fn sweep_row(value: f64, result: &Result<Evaluation, CliError>, width: usize) -> Vec<String> {
    let mut row = vec![real(value)];
    match result {
        Ok(ev) => {
            let b = &ev.blocks;
            for e in [Some(&b.l_aa), Some(&b.l_bb), Some(&b.l_ab), b.m_plus.as_ref(), b.m_minus.as_ref(), Some(&b.m_total)] {
                row.extend(complex(e.map(|e| e.value)));
                row.push(optional(e.map(|e| e.error_estimate)));
            }
            row.extend(complex(ev.scaled_m));
            row.push(real(ev.negativity));
            row.push(b.evaluations().to_string());
            row.push(String::new());
        }
        Err(e) => {
            row.resize(width - 1, String::new());
            row.push(e.to_string());
        }
    }
    row
}

/// One CSV row per grid point; failures land in the `error` column.
pub fn sweep(config: &RunConfig) -> Result<String, CliError> {
    let method = match config.method {
        MethodChoice::One(m) => m,
        MethodChoice::All => {
            return Err(crate::config::ConfigError::InvalidValue {
                key: "method".into(),
                value: "all".into(),
                reason: "a sweep runs a single method".into(),
            }
            .into())
        }
    };
    // fail fast on settings that no grid point can satisfy
    config.fast_tolerance()?;
    config.oracle_tolerance()?;
    let axis = config.sweep_axis;
    let grid = config.sweep_grid()?;
    let header = sweep_header(axis.name());
    let rows: Vec<Vec<String>> = grid
        .par_iter()
        .map(|&v| {
            let point = config.at(axis, v);
            let result = point.scenario().map_err(CliError::from).and_then(|s| evaluate(&point, &s, method));
            sweep_row(v, &result, header.len())
        })
        .collect();
    Ok(to_csv(&header, &rows))
}

fn compare_text(r: &ComparisonReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "compare alpha_a={} alpha_b={} beta={} gamma={} target_rel={:e}",
        r.alpha_a, r.alpha_b, r.beta, r.gamma, r.target_rel
    );
    let _ = writeln!(
        out,
        "{:<5} {:>24} {:>24} {:>24} {:>24} {:>10} {:>10} {:>12} {:>10} {:>10}",
        "name", "re_fast", "im_fast", "re_oracle", "im_oracle", "rel_dev", "evals_fast", "evals_oracle", "t_fast_s", "t_oracle_s"
    );
    for e in &r.entries {
        let [fr, fi] = complex(e.fast_value);
        let [or, oi] = complex(e.oracle_value);
        let _ = writeln!(
            out,
            "{:<5} {fr:>24} {fi:>24} {or:>24} {oi:>24} {:>10} {:>10} {:>12} {:>10.3e} {:>10.3e}",
            e.quantity,
            e.rel_deviation.map(|d| format!("{d:.3e}")).unwrap_or_default(),
            e.evaluations_fast,
            e.evaluations_oracle,
            e.wall_time_fast_s,
            e.wall_time_oracle_s
        );
        for p in &e.oracle_ladder {
            let _ = writeln!(out, "  ladder {} epsilon={:e} {} {}", e.quantity, p.epsilon, real(p.value.re), real(p.value.im));
        }
        if let Some(ratio) = e.oracle_difference_ratio {
            let _ = writeln!(out, "  difference_ratio {} {ratio:.4}", e.quantity);
        }
        if let Some(err) = &e.error {
            let _ = writeln!(out, "  error {}: {err}", e.quantity);
        }
    }
    if let Some(x) = r.evaluation_ratio {
        let _ = writeln!(out, "evaluation_ratio {x:.1}");
    }
    if let Some(x) = r.speedup {
        let _ = writeln!(out, "speedup {x:.1}");
    }
    out
}

/// Text summary plus the JSON report. A reference that failed to
/// extrapolate or ran out of budget is a numerical failure.
pub fn compare(config: &RunConfig) -> Result<(String, String, ComparisonReport), CliError> {
    let scenario = config.scenario()?;
    let report = compare_methods(&scenario, config.comparison_tolerance()?)?;
    let text = compare_text(&report);
    let json = serde_json::to_string_pretty(&report).expect("report serialises");
    Ok((text, json, report))
}

pub fn failed_entries(report: &ComparisonReport) -> Vec<String> {
    report.entries.iter().filter_map(|e| e.error.as_ref().map(|m| format!("{}: {m}", e.quantity))).collect()
}
