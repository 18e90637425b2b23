//! Schedule files.
//!
//! Header lines start with `#`; every other line is one event:
//!
//! ```text
//! <a#|d#> <EVENT> <start_ns> <duration_ns> <component> [partner]
//! ```
//!
//! Lines are stably sorted by start time, then qubit (data before ancillae).
//! Each CX appears twice, once from each side; the data-side copies are
//! skipped on parse.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use spinroute_core::arch::{ComponentId, ComponentKind};
use spinroute_core::code::Basis;
use spinroute_core::compiler::{AncillaSchedule, Event, EventKind, OrderPolicy, Provenance, Schedule};
use spinroute_core::{build_grid, Cell, ChipLayout, TimingConfig};

use crate::config::{InputHash, RunConfig};
use crate::error::{Error, Result};

pub const TOOL: &str = concat!("spinroute ", env!("CARGO_PKG_VERSION"));

/// A schedule with the configuration and inputs that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub tool: String,
    pub config: Option<RunConfig>,
    pub inputs: Vec<InputHash>,
    pub schedule: Schedule,
}

impl ScheduleFile {
    pub fn new(config: Option<RunConfig>, inputs: Vec<InputHash>, schedule: Schedule) -> Self {
        Self { tool: TOOL.into(), config, inputs, schedule }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Provenance lines shared by every output file, each prefixed by `comment`.
pub fn provenance_header(comment: &str, config: Option<&RunConfig>, inputs: &[InputHash]) -> Result<String> {
    let mut out = format!("{comment} {TOOL}\n");
    if let Some(c) = config {
        let _ = writeln!(out, "{comment} config {}", serde_json::to_string(c)?);
    }
    for i in inputs {
        let _ = writeln!(out, "{comment} input {} {} sha256 {}", i.name, i.source, i.sha256);
    }
    Ok(out)
}

fn cell(c: Cell) -> String {
    format!("{},{}", c.x, c.y)
}

fn basis_name(b: Basis) -> &'static str {
    match b {
        Basis::X => "X",
        Basis::Z => "Z",
    }
}

pub fn write_schedule(file: &ScheduleFile) -> Result<String> {
    let s = &file.schedule;
    let p = &s.provenance;
    let t = &s.timing;
    let layout = build_grid(p.grid.0, p.grid.1)?;
    let mut out = provenance_header("#", file.config.as_ref(), &file.inputs)?;
    let _ = writeln!(out, "# grid {} {}", p.grid.0, p.grid.1);
    let _ = writeln!(out, "# timing {} {} {} {} {} {}", t.t_cx, t.t_h, t.t_init, t.t_meas, t.t_shuttle, t.t_displace);
    let _ = writeln!(out, "# rounds {} period {} makespan {}", s.rounds, s.period, s.makespan);
    let _ = writeln!(out, "# code {}", p.code_name);
    let order: Vec<String> = p.order.iter().map(|a| a.to_string()).collect();
    let _ = writeln!(out, "# plan {} {} {}", p.policy.name(), p.seed, order.join(" "));
    let data: Vec<String> = p.data_cells.iter().map(|&c| cell(c)).collect();
    let _ = writeln!(out, "# data {}", data.join(" "));
    for a in &s.ancillae {
        let targets: Vec<String> = a.targets.iter().map(|q| q.to_string()).collect();
        let _ = writeln!(
            out,
            "# ancilla {} {} {} {} {} {}",
            a.ancilla,
            basis_name(a.basis),
            cell(a.home),
            a.tailored as u8,
            a.ordered as u8,
            targets.join(" ")
        );
    }

    let n = p.data_cells.len();
    let mut lines: Vec<(u64, usize, String)> = Vec::new();
    for a in &s.ancillae {
        for e in &a.events {
            let comp = layout.component(e.component);
            let mut line = format!("a{} {} {} {} {comp}", a.ancilla, e.kind.name(), e.start, e.duration);
            if let Some(q) = e.partner {
                let _ = write!(line, " d{q}");
                lines.push((
                    e.start,
                    q,
                    format!("d{q} {} {} {} {comp} a{}", e.kind.name(), e.start, e.duration, a.ancilla),
                ));
            }
            lines.push((e.start, n + a.ancilla, line));
        }
    }
    lines.sort_by_key(|(t, q, _)| (*t, *q));
    for (_, _, l) in lines {
        out.push_str(&l);
        out.push('\n');
    }
    Ok(out)
}

/// Parses `x,y`.
fn parse_cell(s: &str, line: usize) -> Result<Cell> {
    let (x, y) = s.split_once(',').ok_or_else(|| Error::parse(line, format!("bad cell `{s}`")))?;
    let num = |v: &str| v.trim().parse::<u32>().map_err(|_| Error::parse(line, format!("bad cell `{s}`")));
    Ok(Cell::new(num(x)?, num(y)?))
}

/// Parses a component label such as `isec(1,2)` or `ch(1,2;2,2)`.
pub fn parse_component(layout: &ChipLayout, s: &str, line: usize) -> Result<ComponentId> {
    let bad = || Error::parse(line, format!("unknown component `{s}`"));
    let (kind, rest) = s.split_once('(').ok_or_else(bad)?;
    let inner = rest.strip_suffix(')').ok_or_else(bad)?;
    let found = match kind {
        "isec" => layout.at(parse_cell(inner, line)?, ComponentKind::Intersection),
        "zone" => layout.at(parse_cell(inner, line)?, ComponentKind::Interaction),
        "ro" => layout.at(parse_cell(inner, line)?, ComponentKind::Readout),
        "ch" => {
            let (a, b) = inner.split_once(';').ok_or_else(bad)?;
            layout.channel_between(parse_cell(a, line)?, parse_cell(b, line)?)
        }
        _ => None,
    };
    found.ok_or_else(bad)
}

pub fn parse_schedule(text: &str) -> Result<ScheduleFile> {
    let mut config = None;
    let mut inputs = Vec::new();
    let mut grid = None;
    let mut timing = None;
    let mut rounds = None;
    let mut code_name = String::new();
    let mut plan = (OrderPolicy::LongestFirst, 0, Vec::new());
    let mut data_cells = Vec::new();
    let mut ancillae: Vec<AncillaSchedule> = Vec::new();
    let mut layout: Option<ChipLayout> = None;

    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let nums = |toks: &[&str]| -> Result<Vec<u64>> {
            toks.iter().map(|t| t.parse().map_err(|_| Error::parse(ln, format!("bad number `{t}`")))).collect()
        };
        if let Some(h) = line.strip_prefix('#') {
            let h = h.trim();
            let (key, rest) = h.split_once(' ').unwrap_or((h, ""));
            let toks: Vec<&str> = rest.split_whitespace().collect();
            match key {
                "config" => config = Some(serde_json::from_str(rest)?),
                "input" => match toks.as_slice() {
                    [name, source, "sha256", hash] => inputs.push(InputHash {
                        name: name.to_string(),
                        source: source.to_string(),
                        sha256: hash.to_string(),
                    }),
                    _ => return Err(Error::parse(ln, "input lines are `name source sha256 hex`")),
                },
                "grid" => {
                    let v = nums(&toks)?;
                    let [w, h] = v[..] else { return Err(Error::parse(ln, "grid needs width and height")) };
                    grid = Some((w as u32, h as u32));
                    layout = Some(build_grid(w as u32, h as u32)?);
                }
                "timing" => {
                    let v = nums(&toks)?;
                    let [t_cx, t_h, t_init, t_meas, t_shuttle, t_displace] = v[..] else {
                        return Err(Error::parse(ln, "timing needs six durations"));
                    };
                    timing = Some(TimingConfig { t_cx, t_h, t_init, t_meas, t_shuttle, t_displace });
                }
                "rounds" => match toks.as_slice() {
                    [r, "period", p, "makespan", m] => {
                        let v = nums(&[r, p, m])?;
                        rounds = Some((v[0] as u32, v[1], v[2]));
                    }
                    _ => return Err(Error::parse(ln, "expected `rounds R period P makespan M`")),
                },
                "code" => code_name = rest.to_string(),
                "plan" => {
                    let (p, rest) = toks.split_first().ok_or_else(|| Error::parse(ln, "empty plan"))?;
                    let policy =
                        OrderPolicy::parse(p).ok_or_else(|| Error::parse(ln, format!("unknown policy `{p}`")))?;
                    let v = nums(rest)?;
                    let (&seed, order) = v.split_first().ok_or_else(|| Error::parse(ln, "plan needs a seed"))?;
                    plan = (policy, seed, order.iter().map(|&a| a as usize).collect());
                }
                "data" => data_cells = toks.iter().map(|c| parse_cell(c, ln)).collect::<Result<_>>()?,
                "ancilla" => {
                    if toks.len() < 5 {
                        return Err(Error::parse(ln, "ancilla lines are `id basis home tailored ordered targets...`"));
                    }
                    let id = nums(&toks[..1])?[0] as usize;
                    if id != ancillae.len() {
                        return Err(Error::parse(ln, format!("ancilla {id} out of sequence")));
                    }
                    let basis = match toks[1] {
                        "X" => Basis::X,
                        "Z" => Basis::Z,
                        b => return Err(Error::parse(ln, format!("unknown basis `{b}`"))),
                    };
                    let flags = nums(&toks[3..5])?;
                    ancillae.push(AncillaSchedule {
                        ancilla: id,
                        basis,
                        tailored: flags[0] == 1,
                        home: parse_cell(toks[2], ln)?,
                        ordered: flags[1] == 1,
                        targets: nums(&toks[5..])?.into_iter().map(|q| q as usize).collect(),
                        events: Vec::new(),
                    });
                }
                _ => {}
            }
            continue;
        }

        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 5 || toks.len() > 6 {
            return Err(Error::parse(ln, "event lines are `qubit EVENT start duration component [partner]`"));
        }
        if toks[0].starts_with('d') {
            continue;
        }
        let id: usize = toks[0]
            .strip_prefix('a')
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::parse(ln, format!("bad qubit `{}`", toks[0])))?;
        let kind = EventKind::parse(toks[1]).ok_or_else(|| Error::parse(ln, format!("unknown event `{}`", toks[1])))?;
        let v = nums(&toks[2..4])?;
        let layout = layout.as_ref().ok_or_else(|| Error::parse(ln, "event before grid header"))?;
        let component = parse_component(layout, toks[4], ln)?;
        let partner = match toks.get(5) {
            Some(p) => Some(
                p.strip_prefix('d')
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| Error::parse(ln, format!("bad partner `{p}`")))?,
            ),
            None => None,
        };
        let a = ancillae.get_mut(id).ok_or_else(|| Error::parse(ln, format!("undeclared ancilla a{id}")))?;
        a.events.push(Event { kind, start: v[0], duration: v[1], component, partner });
    }

    let missing = |what: &str| Error::parse(0, format!("missing `{what}` header"));
    let grid = grid.ok_or_else(|| missing("grid"))?;
    let timing = timing.ok_or_else(|| missing("timing"))?;
    let (rounds, period, makespan) = rounds.ok_or_else(|| missing("rounds"))?;
    for a in &mut ancillae {
        a.events.sort_by_key(|e| e.start);
    }
    let provenance = Provenance { code_name, grid, data_cells, seed: plan.1, policy: plan.0, order: plan.2 };
    let tool = text.lines().next().and_then(|l| l.strip_prefix("# ")).unwrap_or(TOOL).to_string();
    Ok(ScheduleFile {
        tool,
        config,
        inputs,
        schedule: Schedule { ancillae, rounds, period, makespan, timing, provenance },
    })
}
