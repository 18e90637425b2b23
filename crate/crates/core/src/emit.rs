//! Lowering a schedule into a noisy memory-experiment circuit.
//!
//! Qubits `0..n` are data, `n..n+m` the ancillae in check order. Operations
//! are ordered by start time; a TICK closes every round and the round's
//! detectors sit just before it.

use alloc::vec;
use alloc::vec::Vec;

use crate::arch::{NoiseConfig, Time};
use crate::circuit::{Channel, Instr, MemoryLayout, NoiseSource, StabCircuit};
use crate::code::{compute_logicals, Basis, CssCode, LogicalOperators};
use crate::compiler::{EventKind, Schedule};
use crate::error::EmitError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EmitOptions {
    /// One phase-flip channel per traversed edge instead of one per run.
    pub per_edge_noise: bool,
    /// TICK at every 100 ns slice boundary.
    pub debug_ticks: bool,
}

/// Probability that an odd number of `k` independent flips of probability
/// `p` occur.
pub fn compose_flips(p: f64, k: u32) -> f64 {
    (1.0 - libm::pow(1.0 - 2.0 * p, k as f64)) / 2.0
}

/// `1 − e^(−Δt/T)`; zero when `T` is infinite.
pub fn idle_probability(dt_ns: Time, t_ns: f64) -> f64 {
    if !t_ns.is_finite() {
        return 0.0;
    }
    1.0 - libm::exp(-(dt_ns as f64) / t_ns)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tag {
    Check { ancilla: usize, round: usize },
    Data(usize),
}

struct Op {
    time: Time,
    /// Round markers sort before operations at the same instant.
    class: u8,
    seq: usize,
    instrs: Vec<Instr>,
    tag: Option<Tag>,
}

/// Physical operations on one qubit, in time order: `(start, end, is_reset)`.
type Timeline = Vec<(Time, Time, bool)>;

struct Builder<'a> {
    noise: &'a NoiseConfig,
    ops: Vec<Op>,
}

impl Builder<'_> {
    fn op(&mut self, time: Time, instrs: Vec<Instr>, tag: Option<Tag>) {
        let seq = self.ops.len();
        self.ops.push(Op { time, class: 1, seq, instrs, tag });
    }

    fn with_noise(&self, out: &mut Vec<Instr>, channel: Channel, p: f64, qubits: [usize; 2], source: NoiseSource) {
        if p > 0.0 {
            out.push(Instr::Noise { channel, p, qubits, source });
        }
    }

    fn idle(&self, out: &mut Vec<Instr>, q: usize, dt: Time) {
        if dt == 0 {
            return;
        }
        let px = idle_probability(dt, self.noise.t1_ns);
        let pz = idle_probability(dt, self.noise.t2_ns);
        self.with_noise(out, Channel::XError, px, [q, q], NoiseSource::Idle);
        self.with_noise(out, Channel::ZError, pz, [q, q], NoiseSource::Idle);
    }
}

/// Idle gap before the operation starting at `start` on a qubit whose
/// previous operation ended at the latest entry of `timeline`.
fn gap_before(timeline: &Timeline, start: Time) -> Time {
    let prev = timeline.iter().rev().find(|&&(s, _, _)| s < start);
    prev.map_or(0, |&(_, e, _)| start.saturating_sub(e))
}

/// Noisy memory experiment for every round of `schedule`, with detectors
/// and observables for `basis`.
pub fn emit_memory_circuit(
    schedule: &Schedule,
    code: &CssCode,
    logicals: &LogicalOperators,
    noise: &NoiseConfig,
    basis: Basis,
    opts: &EmitOptions,
) -> Result<StabCircuit, EmitError> {
    if logicals.of_basis(basis).is_empty() {
        return Err(EmitError::NoLogicals);
    }
    if schedule.ancillae.len() != code.num_checks() {
        return Err(EmitError::AncillaCountMismatch { schedule: schedule.ancillae.len(), code: code.num_checks() });
    }
    let circuit = lower(schedule, code, noise, basis, opts);
    Ok(add_detectors_with(&circuit, code, logicals, basis))
}

fn lower(schedule: &Schedule, code: &CssCode, noise: &NoiseConfig, basis: Basis, opts: &EmitOptions) -> StabCircuit {
    let n = code.n();
    let m = schedule.ancillae.len();
    let t = &schedule.timing;
    let period = schedule.period;
    let rounds = schedule.rounds as usize;
    let end = period * schedule.rounds as Time;

    // Physical timelines first: idle gaps depend on each qubit's neighbours in time.
    let mut lines: Vec<Timeline> = vec![Vec::new(); n + m];
    for line in &mut lines[..n] {
        line.push((0, t.t_init, true));
        if basis == Basis::X {
            line.push((t.t_init, t.t_init + t.t_h, false));
        }
    }
    for a in &schedule.ancillae {
        for e in a.events.iter().filter(|e| e.kind != EventKind::Wait) {
            lines[n + a.ancilla].push((e.start, e.end(), e.kind == EventKind::Init));
            if e.kind == EventKind::Cx {
                let q = e.partner.expect("CX names its data qubit");
                lines[q].push((e.start, e.end(), false));
            }
        }
    }
    let final_meas = end + if basis == Basis::X { t.t_h } else { 0 };
    for line in &mut lines[..n] {
        if basis == Basis::X {
            line.push((end, end + t.t_h, false));
        }
        line.push((final_meas, final_meas + t.t_meas, false));
    }
    for l in &mut lines {
        l.sort();
    }

    let mut b = Builder { noise, ops: Vec::new() };
    let idle_into = |b: &Builder<'_>, out: &mut Vec<Instr>, q: usize, start: Time, is_reset: bool| {
        if !is_reset {
            b.idle(out, q, gap_before(&lines[q], start));
        }
    };

    for q in 0..n {
        let mut v = vec![Instr::Reset(q)];
        b.with_noise(&mut v, Channel::XError, noise.p_init, [q, q], NoiseSource::Init);
        b.op(0, v, None);
        if basis == Basis::X {
            let mut v = Vec::new();
            idle_into(&b, &mut v, q, t.t_init, false);
            v.push(Instr::H(q));
            b.with_noise(&mut v, Channel::Depolarize1, noise.p_h, [q, q], NoiseSource::Gate);
            b.op(t.t_init, v, None);
        }
    }

    for a in &schedule.ancillae {
        let aq = n + a.ancilla;
        let ev = &a.events;
        for (i, e) in ev.iter().enumerate() {
            let mut v = Vec::new();
            let round = e.start.checked_div(period).map_or(0, |r| (r as usize).min(rounds.saturating_sub(1)));
            let mut tag = None;
            match e.kind {
                EventKind::Wait => continue,
                EventKind::Init => {
                    v.push(Instr::Reset(aq));
                    b.with_noise(&mut v, Channel::XError, noise.p_init, [aq, aq], NoiseSource::Init);
                }
                EventKind::H => {
                    idle_into(&b, &mut v, aq, e.start, false);
                    v.push(Instr::H(aq));
                    b.with_noise(&mut v, Channel::Depolarize1, noise.p_h, [aq, aq], NoiseSource::Gate);
                }
                EventKind::Cx => {
                    let q = e.partner.expect("CX names its data qubit");
                    idle_into(&b, &mut v, aq, e.start, false);
                    idle_into(&b, &mut v, q, e.start, false);
                    let (c, tq) = if a.basis == Basis::X { (aq, q) } else { (q, aq) };
                    v.push(Instr::Cx(c, tq));
                    b.with_noise(&mut v, Channel::Depolarize2, noise.p_cx, [c, tq], NoiseSource::Gate);
                }
                EventKind::Measure => {
                    idle_into(&b, &mut v, aq, e.start, false);
                    b.with_noise(&mut v, Channel::XError, noise.p_meas, [aq, aq], NoiseSource::Measure);
                    v.push(Instr::Measure(aq));
                    tag = Some(Tag::Check { ancilla: a.ancilla, round });
                }
                EventKind::Displace => {
                    idle_into(&b, &mut v, aq, e.start, false);
                    b.with_noise(&mut v, Channel::ZError, noise.p_displace, [aq, aq], NoiseSource::Displace);
                }
                EventKind::Shuttle => {
                    idle_into(&b, &mut v, aq, e.start, false);
                    if opts.per_edge_noise {
                        b.with_noise(&mut v, Channel::ZError, noise.p_shuttle, [aq, aq], NoiseSource::Shuttle);
                    } else {
                        let run_end = ev.get(i + 1).is_none_or(|next| next.kind != EventKind::Shuttle);
                        if run_end {
                            let k = ev[..=i].iter().rev().take_while(|x| x.kind == EventKind::Shuttle).count();
                            let p = compose_flips(noise.p_shuttle, k as u32);
                            b.with_noise(&mut v, Channel::ZError, p, [aq, aq], NoiseSource::Shuttle);
                        }
                    }
                }
            }
            if !v.is_empty() || tag.is_some() {
                b.op(e.start, v, tag);
            }
        }
    }

    for q in 0..n {
        if basis == Basis::X {
            let mut v = Vec::new();
            idle_into(&b, &mut v, q, end, false);
            v.push(Instr::H(q));
            b.with_noise(&mut v, Channel::Depolarize1, noise.p_h, [q, q], NoiseSource::Gate);
            b.op(end, v, None);
        }
        let mut v = Vec::new();
        idle_into(&b, &mut v, q, final_meas, false);
        b.with_noise(&mut v, Channel::XError, noise.p_meas, [q, q], NoiseSource::Measure);
        v.push(Instr::Measure(q));
        b.op(final_meas, v, Some(Tag::Data(q)));
    }

    let mut ops = b.ops;
    for r in 0..rounds {
        let seq = ops.len();
        ops.push(Op { time: period * (r as Time + 1), class: 0, seq, instrs: vec![Instr::Tick], tag: None });
    }
    ops.sort_by_key(|o| (o.time, o.class, o.seq));

    let mut circuit = StabCircuit::new(n + m);
    circuit.coords = (0..n)
        .map(|q| {
            let c = schedule.data_cell(q);
            [c.x as f64, c.y as f64, 0.0]
        })
        .chain(schedule.ancillae.iter().map(|a| [a.home.x as f64, a.home.y as f64, 1.0]))
        .collect();
    let mut check_records = vec![vec![usize::MAX; m]; rounds];
    let mut data_records = vec![usize::MAX; n];
    let mut round_ticks = Vec::with_capacity(rounds);
    let mut measured = 0;
    let mut slice = None;
    for op in ops {
        if opts.debug_ticks && op.class == 1 {
            let s = op.time / 100;
            if slice.is_some_and(|p| p != s) {
                circuit.push(Instr::Tick);
            }
            slice = Some(s);
        }
        if op.class == 0 {
            round_ticks.push(circuit.instrs.len());
        }
        for instr in op.instrs {
            if matches!(instr, Instr::Measure(_)) {
                match op.tag {
                    Some(Tag::Check { ancilla, round }) => check_records[round][ancilla] = measured,
                    Some(Tag::Data(q)) => data_records[q] = measured,
                    None => {}
                }
                measured += 1;
            }
            circuit.push(instr);
        }
    }
    circuit.memory = Some(MemoryLayout {
        basis,
        data_qubits: n,
        check_records,
        data_records,
        round_ticks,
        check_coords: schedule.ancillae.iter().map(|a| (a.home.x, a.home.y)).collect(),
    });
    circuit
}

/// Inserts memory-experiment detectors and observables for `basis`.
pub fn add_detectors(circuit: &StabCircuit, code: &CssCode, basis: Basis) -> StabCircuit {
    add_detectors_with(circuit, code, &compute_logicals(code), basis)
}

fn add_detectors_with(circuit: &StabCircuit, code: &CssCode, logicals: &LogicalOperators, basis: Basis) -> StabCircuit {
    let Some(mem) = &circuit.memory else {
        return circuit.clone();
    };
    let checks = code.num_checks();
    let of_basis: Vec<usize> = (0..checks).filter(|&c| code.check_basis(c) == basis).collect();
    let coords = |c: usize, r: usize| {
        let (x, y) = mem.check_coords[c];
        [x as f64, y as f64, r as f64]
    };
    let rounds = mem.check_records.len();
    let mut out = StabCircuit::new(circuit.num_qubits);
    out.coords = circuit.coords.clone();
    let mut ticks = Vec::with_capacity(rounds);
    let mut next_round = 0;
    for (i, instr) in circuit.instrs.iter().enumerate() {
        if next_round < rounds && mem.round_ticks[next_round] == i {
            let r = next_round;
            let rec = &mem.check_records;
            if r == 0 {
                for &c in &of_basis {
                    out.push(Instr::Detector { coords: coords(c, 0), records: vec![rec[0][c]] });
                }
            } else {
                for (c, (&before, &now)) in rec[r - 1].iter().zip(&rec[r]).enumerate().take(checks) {
                    out.push(Instr::Detector { coords: coords(c, r), records: vec![before, now] });
                }
            }
            ticks.push(out.instrs.len());
            next_round += 1;
        }
        out.push(instr.clone());
    }
    if rounds > 0 {
        for &c in &of_basis {
            let mut records = vec![mem.check_records[rounds - 1][c]];
            records.extend(code.check(c).ones().map(|q| mem.data_records[q]));
            out.push(Instr::Detector { coords: coords(c, rounds), records });
        }
    }
    for (k, l) in logicals.of_basis(basis).iter().enumerate() {
        out.push(Instr::Observable { index: k, records: l.ones().map(|q| mem.data_records[q]).collect() });
    }
    out.memory = Some(MemoryLayout { round_ticks: ticks, ..mem.clone() });
    out
}
