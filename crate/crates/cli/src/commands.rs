use std::fs;
use std::io::Write;

use absorder::axioms::verify_space;
use absorder::generators::families::map_matrix;
use absorder::io::read_map;
use absorder::maps::classify::classify;
use absorder::report::AxiomReport;
use absorder::theorems::{counterexample_search, default_spaces, run_theorem_suite};
use absorder::{Witness, VERSION};
use serde::Serialize;

use crate::config::{Command, Format, RunConfig};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

/// Witnesses echoed to stderr on failure; the report keeps all of them.
const WITNESS_ECHO: usize = 10;

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    version: &'static str,
    config: &'a RunConfig,
    status: &'static str,
    exit_code: u8,
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    warnings: &'a [String],
    result: &'a T,
}

struct Outcome<T> {
    passed: bool,
    result: T,
    text: String,
    warnings: Vec<String>,
    witnesses: Vec<(String, Witness)>,
}

#[derive(Serialize)]
struct AxiomRun {
    spaces: Vec<AxiomReport>,
}

pub fn run(config: &RunConfig) -> u8 {
    let done = match config.command {
        Command::VerifyAxioms => verify_axioms(config).and_then(|o| finish(config, o)),
        Command::ClassifyMap => classify_map(config).and_then(|o| finish(config, o)),
        Command::TheoremSuite => theorem_suite(config).and_then(|o| finish(config, o)),
        Command::CounterexampleSearch => search(config).and_then(|o| finish(config, o)),
    };
    match done {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
    }
}

fn verify_axioms(config: &RunConfig) -> Result<Outcome<AxiomRun>, String> {
    if config.models.is_empty() {
        return Err("verify-axioms needs at least one --model".into());
    }
    let mut spaces = Vec::new();
    for model in &config.models {
        let model = config.fault.apply_model(model);
        let top = if model.is_lattice() { 1 } else { config.levels };
        for n in 1..=top {
            spaces.extend(verify_space(&model, n, &config.tolerance).map_err(|e| e.to_string())?);
        }
    }
    let passed = spaces.iter().all(AxiomReport::all_passed);
    let mut text: String = spaces.iter().map(AxiomReport::render_text).collect();
    text.push_str(if passed {
        "all axioms hold\n"
    } else {
        "axiom failures found\n"
    });
    let witnesses = spaces
        .iter()
        .flat_map(|r| {
            r.checks.iter().filter_map(move |c| {
                c.witness
                    .clone()
                    .map(|w| (format!("{} / {}", r.space, c.name), w))
            })
        })
        .collect();
    Ok(Outcome {
        passed,
        result: AxiomRun { spaces },
        text,
        warnings: Vec::new(),
        witnesses,
    })
}

fn classify_map(config: &RunConfig) -> Result<Outcome<absorder::ClassificationReport>, String> {
    let path = config.map.as_ref().ok_or("classify-map needs --map FILE")?;
    let map = read_map(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let map = config.fault.apply(map);
    let report = classify(&map, config.levels, &config.tolerance);
    Ok(Outcome {
        passed: true,
        text: report.render_text(),
        result: report,
        warnings: Vec::new(),
        witnesses: Vec::new(),
    })
}

fn theorem_suite(config: &RunConfig) -> Result<Outcome<absorder::theorems::TheoremRun>, String> {
    let specs = match &config.maps {
        Some(list) => list.clone(),
        None => map_matrix(config.map_count, config.tolerance.seed),
    };
    let mut warnings = Vec::new();
    let spaces = match (config.models.is_empty(), specs.is_empty()) {
        (false, _) => config.models.clone(),
        (true, false) => default_spaces(),
        (true, true) => Vec::new(),
    };
    if specs.is_empty() {
        warnings.push("empty map matrix: no map suites were run".to_string());
    }
    let run = run_theorem_suite(
        &specs,
        &spaces,
        config.levels,
        config.fault,
        &config.tolerance,
    )
    .map_err(|e| e.to_string())?;
    Ok(Outcome {
        passed: run.consistent(),
        text: run.render_text(),
        witnesses: run.witnesses(),
        result: run,
        warnings,
    })
}

fn search(config: &RunConfig) -> Result<Outcome<absorder::theorems::SearchReport>, String> {
    let report =
        counterexample_search(config.fault, &config.tolerance).map_err(|e| e.to_string())?;
    let witnesses = report
        .entries
        .iter()
        .filter_map(|e| e.verdict.witness().map(|w| (e.target.clone(), w.clone())))
        .collect();
    Ok(Outcome {
        passed: report.ok(),
        text: report.render_text(),
        result: report,
        warnings: Vec::new(),
        witnesses,
    })
}

fn finish<T: Serialize>(config: &RunConfig, outcome: Outcome<T>) -> Result<u8, String> {
    let code = if outcome.passed {
        EXIT_PASS
    } else {
        EXIT_FAILURE
    };
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    let body = match config.format {
        Format::Text => outcome.text,
        Format::Machine => {
            let report = Report {
                version: VERSION,
                config,
                status: if outcome.passed { "pass" } else { "fail" },
                exit_code: code,
                warnings: &outcome.warnings,
                result: &outcome.result,
            };
            let mut s = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
            s.push('\n');
            s
        }
    };
    match &config.out {
        Some(path) => fs::write(path, &body).map_err(|e| format!("{}: {e}", path.display()))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes()).map_err(|e| e.to_string())?;
        }
    }
    if code == EXIT_FAILURE {
        eprintln!("{} witness(es); first ones:", outcome.witnesses.len());
        for (origin, w) in outcome.witnesses.iter().take(WITNESS_ECHO) {
            let json = serde_json::to_string(w).unwrap_or_else(|_| "null".into());
            eprintln!("{origin}: {json}");
        }
    }
    Ok(code)
}
