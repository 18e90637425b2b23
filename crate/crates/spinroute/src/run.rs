//! The work behind each subcommand, returning output text.

use std::fmt::Write;
use std::path::Path;

use spinroute_core::code::{compute_logicals, tasks_from_code};
use spinroute_core::compiler::{replicate_rounds, schedule_round};
use spinroute_core::emit::{emit_memory_circuit, EmitOptions};
use spinroute_core::error::EmitError;
use spinroute_core::metrics::{
    efficiency_factor, ideal_lower_bound, overhead_report, shuttle_stats, IdealBound, ShuttleStats, TourConvention,
};
use spinroute_core::pauli::shuttle_segment_faults;
use spinroute_core::tableau::simulate_noiseless;
use spinroute_core::validate::validate_schedule;
use spinroute_core::{build_grid, CssCode, DataLayout, NoiseConfig, Schedule, StabCircuit};

use crate::config::{InputHash, Instance, RunConfig};
use crate::error::{Error, Result};
use crate::schedule_io::{parse_schedule, provenance_header, write_schedule, ScheduleFile};

/// Shuttle flip rate used by the tailoring scan when the configuration has none.
const SCAN_P_SHUTTLE: f64 = 1e-3;

/// A compiled instance and the configuration that produced it.
pub struct Compiled {
    pub config: RunConfig,
    pub instance: Instance,
    pub schedule: Schedule,
}

impl Compiled {
    pub fn file(&self) -> ScheduleFile {
        ScheduleFile::new(Some(self.config.clone()), self.instance.inputs.clone(), self.schedule.clone())
    }
}

pub fn compile(config: &RunConfig) -> Result<Compiled> {
    let instance = config.instance()?;
    let round = schedule_round(&instance.code, &instance.chip, &instance.data, &config.compile_options()?)?;
    let schedule = replicate_rounds(&round, config.rounds);
    Ok(Compiled { config: config.clone(), instance, schedule })
}

/// Reads a schedule in either format; JSON is recognised by its leading `{`.
pub fn load_schedule(path: &Path) -> Result<ScheduleFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim_start().starts_with('{') {
        ScheduleFile::from_json(&text)
    } else {
        parse_schedule(&text)
    }
}

pub fn schedule_output(file: &ScheduleFile, json: bool) -> Result<String> {
    if json {
        file.to_json()
    } else {
        write_schedule(file)
    }
}

pub fn memory_circuit(
    config: &RunConfig,
    code: &CssCode,
    schedule: &Schedule,
    noise: &NoiseConfig,
    debug_ticks: bool,
) -> Result<StabCircuit> {
    let opts = EmitOptions { per_edge_noise: config.per_edge_noise, debug_ticks };
    Ok(emit_memory_circuit(schedule, code, &compute_logicals(code), noise, config.basis()?, &opts)?)
}

pub fn emit_output(config: &RunConfig, code: &CssCode, file: &ScheduleFile, debug_ticks: bool) -> Result<String> {
    let circuit = memory_circuit(config, code, &file.schedule, &config.noise(), debug_ticks)?;
    let mut out = provenance_header("#", Some(config), &file.inputs)?;
    let _ = writeln!(
        out,
        "# basis {} rounds {} per_edge_noise {}",
        config.basis, file.schedule.rounds, config.per_edge_noise
    );
    out.push_str(&circuit.to_stim());
    Ok(out)
}

pub struct VerifyReport {
    pub text: String,
    pub passed: bool,
}

/// Structural validation, noiseless determinism and the shuttle phase-flip scan.
pub fn verify(config: &RunConfig, code: &CssCode, file: &ScheduleFile) -> Result<VerifyReport> {
    let schedule = &file.schedule;
    let (w, h) = schedule.provenance.grid;
    let chip = build_grid(w, h)?;
    let mut text = provenance_header("#", Some(config), &file.inputs)?;
    let mut passed = true;

    let report = validate_schedule(schedule, &chip, &tasks_from_code(code));
    if report.is_valid() {
        let _ = writeln!(text, "PASS schedule: {} events, no violations", schedule.event_count());
    } else {
        passed = false;
        let _ = writeln!(text, "FAIL schedule: {} violations", report.violations.len());
        for v in &report.violations {
            let _ = writeln!(text, "  {v}");
        }
    }

    let noiseless = NoiseConfig::noiseless();
    match memory_circuit(config, code, schedule, &noiseless, false) {
        Ok(c) => {
            let sim = simulate_noiseless(&c);
            if sim.all_quiet() {
                let _ = writeln!(
                    text,
                    "PASS determinism: {} detectors quiet, {} observables fixed",
                    sim.detectors.len(),
                    sim.observables.len()
                );
            } else {
                passed = false;
                let loud = sim.detectors.iter().filter(|d| **d != Some(false)).count();
                let random = sim.observables.iter().filter(|o| o.is_none()).count();
                let _ = writeln!(text, "FAIL determinism: {loud} detectors not quiet, {random} observables random");
            }
        }
        Err(Error::Emit(EmitError::NoLogicals)) => {
            let _ = writeln!(text, "SKIP determinism: no logical operators in basis {}", config.basis);
        }
        Err(e) => {
            passed = false;
            let _ = writeln!(text, "FAIL determinism: {e}");
        }
    }

    let mut noise = NoiseConfig::noiseless();
    noise.p_shuttle = if config.p_shuttle > 0.0 { config.p_shuttle } else { SCAN_P_SHUTTLE };
    let tailored = schedule.ancillae.iter().any(|a| a.tailored);
    match memory_circuit(config, code, schedule, &noise, false) {
        Ok(c) => {
            let faults = shuttle_segment_faults(&c);
            let n = code.n();
            let benign = faults.iter().filter(|f| f.is_benign(&c)).count();
            let spread: Vec<_> = faults.iter().filter(|f| !f.data_residue.is_empty()).collect();
            let verdict = match (tailored, benign == faults.len()) {
                (true, true) => "PASS",
                (true, false) => {
                    passed = false;
                    "FAIL"
                }
                (false, _) => "INFO",
            };
            let _ = writeln!(
                text,
                "{verdict} tailoring: {benign} of {} shuttle segments flip only their own measurement, {} reach data",
                faults.len(),
                spread.len()
            );
            let listed: Vec<_> =
                if tailored { faults.iter().filter(|f| !f.is_benign(&c)).collect() } else { spread.clone() };
            for f in listed {
                let residue: Vec<String> = f.data_residue.iter().map(|(q, p)| format!("{p}{q}")).collect();
                let _ = writeln!(
                    text,
                    "  a{} round {} instruction {}: {} later CX, data residue [{}], flips records {:?}",
                    f.qubit - n,
                    f.round,
                    f.instr,
                    f.later_cx,
                    residue.join(" "),
                    f.flipped
                );
            }
        }
        Err(Error::Emit(EmitError::NoLogicals)) => {
            let _ = writeln!(text, "SKIP tailoring: no logical operators in basis {}", config.basis);
        }
        Err(e) => {
            passed = false;
            let _ = writeln!(text, "FAIL tailoring: {e}");
        }
    }
    let _ = writeln!(text, "{}", if passed { "verify: PASS" } else { "verify: FAIL" });
    Ok(VerifyReport { text, passed })
}

/// One row of the shuttle statistics table.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct StatsRow {
    pub code: String,
    pub n: usize,
    pub k: usize,
    pub d: Option<u32>,
    pub check_weight: usize,
    pub ancillae: usize,
    pub mean_shuttles: f64,
    pub max_shuttles: usize,
    pub makespan_ns: u64,
    pub convention: &'static str,
    pub ideal_mean: f64,
    pub overhead: f64,
    pub efficiency: Option<String>,
}

pub fn stats_row(
    config: &RunConfig,
    code: &CssCode,
    schedule: &Schedule,
    convention: TourConvention,
) -> Result<StatsRow> {
    Ok(measure(config, code, schedule, convention)?.0)
}

fn measure(
    config: &RunConfig,
    code: &CssCode,
    schedule: &Schedule,
    convention: TourConvention,
) -> Result<(StatsRow, ShuttleStats, IdealBound)> {
    let data = DataLayout::new(schedule.provenance.data_cells.clone())?;
    let homes: Vec<_> = schedule.ancillae.iter().map(|a| a.home).collect();
    let ideal = ideal_lower_bound(&tasks_from_code(code), &data, &homes, convention, config.exact_limit)?;
    let stats = shuttle_stats(schedule).with_ideal(&ideal);
    let row = StatsRow {
        code: code.name.clone(),
        n: code.n(),
        k: code.k(),
        d: code.distance,
        check_weight: code.check_weight(),
        ancillae: schedule.ancillae.len(),
        mean_shuttles: stats.mean,
        max_shuttles: stats.max,
        makespan_ns: stats.makespan,
        convention: convention.name(),
        ideal_mean: ideal.mean,
        overhead: stats.overhead.unwrap_or(1.0),
        efficiency: efficiency_factor(code).ok().map(|r| r.to_string()),
    };
    Ok((row, stats, ideal))
}

/// Statistics rows and their geometric-mean overhead.
pub struct StatsTable {
    pub rows: Vec<StatsRow>,
    pub geomean: f64,
    pub inputs: Vec<InputHash>,
}

/// Statistics for compiled instances.
pub fn stats_table(runs: &[Compiled], convention: TourConvention) -> Result<StatsTable> {
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    let mut inputs = Vec::new();
    for c in runs {
        let (row, stats, ideal) = measure(&c.config, &c.instance.code, &c.schedule, convention)?;
        entries.push((row.code.clone(), stats, ideal));
        rows.push(row);
        inputs.extend(c.instance.inputs.iter().cloned());
    }
    Ok(StatsTable { rows, geomean: overhead_report(&entries).geomean, inputs })
}

/// Compiles every `*.code` file under `dir`, in file-name order.
pub fn compile_corpus(config: &RunConfig, dir: &Path) -> Result<Vec<Compiled>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for e in entries {
        let p = e.map_err(|e| Error::io(dir, e))?.path();
        if p.extension().is_some_and(|x| x == "code") {
            paths.push(p);
        }
    }
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let mut cfg = config.clone();
            cfg.code = p.to_string_lossy().into_owned();
            compile(&cfg)
        })
        .collect()
}

pub fn stats_output(config: &RunConfig, table: &StatsTable, csv_out: bool) -> Result<String> {
    let mut out = provenance_header("#", Some(config), &table.inputs)?;
    let rows = &table.rows;
    if csv_out {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        out.push_str(&String::from_utf8_lossy(&bytes));
        return Ok(out);
    }
    let _ = writeln!(
        out,
        "{:<24} {:>5} {:>3} {:>4} {:>3} {:>5} {:>7} {:>4} {:>10} {:>7} {:>8} {:>8}",
        "code", "n", "k", "d", "w", "anc", "mean", "max", "makespan", "ideal", "overhead", "kd2/n"
    );
    for r in rows {
        let d = r.d.map_or("?".to_string(), |d| d.to_string());
        let eff = r.efficiency.clone().unwrap_or_else(|| "?".into());
        let _ = writeln!(
            out,
            "{:<24} {:>5} {:>3} {:>4} {:>3} {:>5} {:>7.3} {:>4} {:>10} {:>7.3} {:>8.4} {:>8}",
            r.code,
            r.n,
            r.k,
            d,
            r.check_weight,
            r.ancillae,
            r.mean_shuttles,
            r.max_shuttles,
            r.makespan_ns,
            r.ideal_mean,
            r.overhead,
            eff
        );
    }
    if let Some(r) = rows.first() {
        let _ = writeln!(out, "geomean overhead ({}): {:.4}", r.convention, table.geomean);
    }
    Ok(out)
}
