//! Independent schedule checks: collisions, completeness, trajectory
//! contiguity, operation durations, tailoring structure and CX ordering.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::arch::{ChipLayout, ComponentId, ComponentKind, Time};
use crate::code::{Basis, CheckTask};
use crate::compiler::{AncillaSchedule, EventKind, Schedule};
use crate::qsipp::{occupancy_intervals, Action};
use crate::sipp::TimeInterval;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Two occupancies of one component overlap.
    Collision {
        component: ComponentId,
        first: usize,
        second: usize,
        at: Time,
    },
    MissingCx {
        ancilla: usize,
        target: usize,
        round: u32,
    },
    DuplicateCx {
        ancilla: usize,
        target: usize,
        round: u32,
    },
    UnexpectedCx {
        ancilla: usize,
        target: usize,
        round: u32,
    },
    OrderViolation {
        ancilla: usize,
        round: u32,
    },
    /// Event `event` cannot follow the ancilla's previous location or time.
    Discontinuity {
        ancilla: usize,
        event: usize,
    },
    BadDuration {
        ancilla: usize,
        event: usize,
    },
    /// A movement segment of a tailored ancilla lacks an adjacent H.
    MissingTailoringH {
        ancilla: usize,
        event: usize,
    },
    /// The X check and Z check have an odd number of shared qubits on
    /// which the Z-check CX comes first.
    Interleaving {
        x_ancilla: usize,
        z_ancilla: usize,
        round: u32,
    },
    /// The ancilla is not back in its home readout at a round boundary.
    NotPeriodic {
        ancilla: usize,
        round: u32,
    },
    TaskMismatch {
        ancilla: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Collision { component, first, second, at } => {
                write!(f, "collision on component {} between a{first} and a{second} at t={at}", component.0)
            }
            Self::MissingCx { ancilla, target, round } => {
                write!(f, "a{ancilla} never couples to d{target} in round {round}")
            }
            Self::DuplicateCx { ancilla, target, round } => {
                write!(f, "a{ancilla} couples to d{target} more than once in round {round}")
            }
            Self::UnexpectedCx { ancilla, target, round } => {
                write!(f, "a{ancilla} couples to d{target}, which is not in its check (round {round})")
            }
            Self::OrderViolation { ancilla, round } => {
                write!(f, "a{ancilla} visits targets out of order in round {round}")
            }
            Self::Discontinuity { ancilla, event } => write!(f, "a{ancilla} event {event} breaks its trajectory"),
            Self::BadDuration { ancilla, event } => write!(f, "a{ancilla} event {event} has the wrong duration"),
            Self::MissingTailoringH { ancilla, event } => {
                write!(f, "a{ancilla} movement at event {event} is not wrapped in H gates")
            }
            Self::Interleaving { x_ancilla, z_ancilla, round } => write!(
                f,
                "CX order of a{x_ancilla} and a{z_ancilla} makes their round-{round} outcomes nondeterministic"
            ),
            Self::NotPeriodic { ancilla, round } => {
                write!(f, "a{ancilla} ends round {round} away from its home readout")
            }
            Self::TaskMismatch { ancilla } => write!(f, "a{ancilla} does not match its check task"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn collisions(&self) -> usize {
        self.violations.iter().filter(|v| matches!(v, Violation::Collision { .. })).count()
    }
}

fn expected_duration(kind: EventKind, s: &Schedule) -> Option<Time> {
    let t = &s.timing;
    match kind {
        EventKind::Init => Some(t.t_init),
        EventKind::Displace => Some(t.t_displace),
        EventKind::Shuttle => Some(t.t_shuttle),
        EventKind::H => Some(t.t_h),
        EventKind::Cx => Some(t.t_cx),
        EventKind::Measure => Some(t.t_meas),
        EventKind::Wait => None,
    }
}

fn round_of(s: &Schedule, t: Time) -> u32 {
    t.checked_div(s.period).map_or(0, |r| r.min(s.rounds.saturating_sub(1) as Time) as u32)
}

/// Walks one ancilla's events, reporting trajectory faults and returning
/// movement actions per round.
fn walk(a: &AncillaSchedule, s: &Schedule, layout: &ChipLayout, out: &mut Vec<Violation>) -> Vec<Vec<(Action, Time)>> {
    let id = a.ancilla;
    let home = layout.readout(a.home);
    let mut moves = vec![Vec::new(); s.rounds as usize];
    let mut loc = home;
    let mut busy_until = 0;
    let mut round = 0;
    for (i, e) in a.events.iter().enumerate() {
        let r = round_of(s, e.start);
        while round < r {
            if loc != home {
                out.push(Violation::NotPeriodic { ancilla: id, round });
                loc = home;
            }
            round += 1;
        }
        if e.start < busy_until || layout.get(e.component).is_none() {
            out.push(Violation::Discontinuity { ancilla: id, event: i });
            busy_until = busy_until.max(e.end());
            continue;
        }
        busy_until = e.end();
        match expected_duration(e.kind, s) {
            Some(d) if d != e.duration => out.push(Violation::BadDuration { ancilla: id, event: i }),
            None if e.duration == 0 => out.push(Violation::BadDuration { ancilla: id, event: i }),
            _ => {}
        }
        let here = *layout.component(loc);
        let ok = match e.kind {
            EventKind::Init | EventKind::Measure => e.component == loc && here.kind == ComponentKind::Readout,
            EventKind::H | EventKind::Wait => e.component == loc,
            EventKind::Cx => match e.partner {
                Some(q) if q < s.provenance.data_cells.len() => {
                    e.component == loc && here.kind == ComponentKind::Interaction && here.cell == s.data_cell(q)
                }
                _ => false,
            },
            EventKind::Displace => {
                let to = *layout.component(e.component);
                let star = match here.kind {
                    ComponentKind::Intersection => {
                        matches!(to.kind, ComponentKind::Interaction | ComponentKind::Readout)
                    }
                    ComponentKind::Interaction | ComponentKind::Readout => to.kind == ComponentKind::Intersection,
                    ComponentKind::Channel => false,
                };
                if star && to.cell == here.cell {
                    moves[r as usize].push((Action::Displace { from: loc, to: e.component }, e.start));
                    loc = e.component;
                    true
                } else {
                    false
                }
            }
            EventKind::Shuttle => {
                let link = (here.kind == ComponentKind::Intersection)
                    .then(|| layout.shuttle_links(loc).iter().find(|(ch, _)| *ch == e.component))
                    .flatten();
                match link {
                    Some(&(channel, to)) => {
                        moves[r as usize].push((Action::Shuttle { from: loc, channel, to }, e.start));
                        loc = to;
                        true
                    }
                    None => false,
                }
            }
        };
        if !ok {
            out.push(Violation::Discontinuity { ancilla: id, event: i });
        }
    }
    while round < s.rounds {
        if loc != home {
            out.push(Violation::NotPeriodic { ancilla: id, round });
            loc = home;
        }
        round += 1;
    }
    moves
}

fn check_tasks(a: &AncillaSchedule, s: &Schedule, task: &CheckTask, out: &mut Vec<Violation>) {
    let id = a.ancilla;
    if task.basis != a.basis || task.targets != a.targets || task.ordered != a.ordered {
        out.push(Violation::TaskMismatch { ancilla: id });
    }
    for round in 0..s.rounds {
        let seq: Vec<usize> = a
            .events
            .iter()
            .filter(|e| e.kind == EventKind::Cx && round_of(s, e.start) == round)
            .filter_map(|e| e.partner)
            .collect();
        for &q in &seq {
            if !task.targets.contains(&q) {
                out.push(Violation::UnexpectedCx { ancilla: id, target: q, round });
            }
        }
        for &q in &task.targets {
            match seq.iter().filter(|&&x| x == q).count() {
                0 => out.push(Violation::MissingCx { ancilla: id, target: q, round }),
                1 => {}
                _ => out.push(Violation::DuplicateCx { ancilla: id, target: q, round }),
            }
        }
        if task.ordered && seq.len() == task.targets.len() && seq != task.targets {
            out.push(Violation::OrderViolation { ancilla: id, round });
        }
    }
}

fn check_tailoring(a: &AncillaSchedule, out: &mut Vec<Violation>) {
    if !a.tailored {
        return;
    }
    let ev = &a.events;
    let mut i = 0;
    while i < ev.len() {
        if !ev[i].kind.is_movement() {
            i += 1;
            continue;
        }
        let start = i;
        while i < ev.len() && ev[i].kind.is_movement() {
            i += 1;
        }
        let before = start.checked_sub(1).map(|j| ev[j].kind);
        let after = ev.get(i).map(|e| e.kind);
        if before != Some(EventKind::H) || after != Some(EventKind::H) {
            out.push(Violation::MissingTailoringH { ancilla: a.ancilla, event: start });
        }
    }
}

fn check_collisions(s: &Schedule, layout: &ChipLayout, moves: &[Vec<Vec<(Action, Time)>>], out: &mut Vec<Violation>) {
    let mut by_comp: BTreeMap<ComponentId, Vec<(TimeInterval, usize)>> = BTreeMap::new();
    for (a, per_round) in s.ancillae.iter().zip(moves) {
        let home = layout.readout(a.home);
        for (r, actions) in per_round.iter().enumerate() {
            let lo = s.period * r as Time;
            let hi = lo + s.period;
            for (c, iv) in occupancy_intervals(home, lo, lo, actions.iter().copied(), &s.timing, hi) {
                by_comp.entry(c).or_default().push((iv, a.ancilla));
            }
        }
    }
    for (component, mut list) in by_comp {
        list.sort();
        let mut active: Option<(TimeInterval, usize)> = None;
        for (iv, a) in list {
            match active {
                Some((held, b)) if iv.start < held.end => {
                    out.push(Violation::Collision { component, first: b, second: a, at: iv.start });
                    if iv.end > held.end {
                        active = Some((iv, a));
                    }
                }
                _ => active = Some((iv, a)),
            }
        }
    }
}

fn check_interleaving(s: &Schedule, out: &mut Vec<Violation>) {
    for round in 0..s.rounds {
        let cx_times: Vec<BTreeMap<usize, Time>> = s
            .ancillae
            .iter()
            .map(|a| {
                a.events
                    .iter()
                    .filter(|e| e.kind == EventKind::Cx && round_of(s, e.start) == round)
                    .filter_map(|e| Some((e.partner?, e.start)))
                    .collect()
            })
            .collect();
        for xa in s.ancillae.iter().filter(|a| a.basis == Basis::X) {
            for za in s.ancillae.iter().filter(|a| a.basis == Basis::Z) {
                let (xt, zt) = (&cx_times[xa.ancilla], &cx_times[za.ancilla]);
                let flips = xt.iter().filter(|(q, &tx)| zt.get(q).is_some_and(|&tz| tz < tx)).count();
                if flips % 2 == 1 {
                    out.push(Violation::Interleaving { x_ancilla: xa.ancilla, z_ancilla: za.ancilla, round });
                }
            }
        }
    }
}

/// Checks `schedule` against the chip and the check tasks; an empty report
/// means the schedule is executable and complete.
pub fn validate_schedule(schedule: &Schedule, layout: &ChipLayout, tasks: &[CheckTask]) -> ValidationReport {
    let mut out = Vec::new();
    if tasks.len() != schedule.ancillae.len() {
        for a in tasks.len().min(schedule.ancillae.len())..tasks.len().max(schedule.ancillae.len()) {
            out.push(Violation::TaskMismatch { ancilla: a });
        }
    }
    let mut moves = Vec::with_capacity(schedule.ancillae.len());
    for (i, a) in schedule.ancillae.iter().enumerate() {
        if !layout.contains(a.home) {
            out.push(Violation::TaskMismatch { ancilla: i });
            moves.push(vec![Vec::new(); schedule.rounds as usize]);
            continue;
        }
        moves.push(walk(a, schedule, layout, &mut out));
        if let Some(task) = tasks.get(i) {
            check_tasks(a, schedule, task, &mut out);
        }
        check_tailoring(a, &mut out);
    }
    check_collisions(schedule, layout, &moves, &mut out);
    check_interleaving(schedule, &mut out);
    ValidationReport { violations: out }
}
