//! Reference solver for single-ancilla searches.
//!
//! Plain Dijkstra over `(component, completed targets, time, fresh)` with
//! time advanced in whole quanta. `fresh` marks an ancilla that arrived at
//! the current instant and so still owes its component one quantum. Every
//! move checks the exact component occupancy it implies against the
//! reservation table, so no safe-interval reasoning is shared with the
//! search it checks.

use alloc::collections::{BTreeSet, BinaryHeap};
use core::cmp::Reverse;

use crate::arch::{ComponentId, ComponentKind, Time, FOREVER};
use crate::qsipp::{Goal, SearchProblem, SearchState};
use crate::sipp::TimeInterval;

type Node = (Time, ComponentId, u64, bool);

/// Earliest goal arrival from `start` entered at `time`, or `None` when no
/// goal is reachable before the horizon.
pub fn discrete_optimum(problem: &SearchProblem<'_>, start: ComponentId, time: Time) -> Option<Time> {
    earliest_goal(problem, start, time, 0)
}

/// Remaining time from `state` (just arrived) to the earliest goal arrival.
pub fn cost_to_go(problem: &SearchProblem<'_>, state: &SearchState) -> Option<Time> {
    earliest_goal(problem, state.component, state.g, state.done).map(|t| t - state.g)
}

fn earliest_goal(problem: &SearchProblem<'_>, start: ComponentId, time: Time, done0: u64) -> Option<Time> {
    let layout = problem.layout;
    let t = &problem.timing;
    let q = t.quantum();
    let m = problem.targets.len();
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let forbidden = |c: ComponentId| problem.forbidden.contains(&c);
    let free = |c: ComponentId, from: Time, to: Time| {
        to <= from || problem.table.is_free(c, TimeInterval { start: from, end: to })
    };

    // Past the last reservation every component is free forever; any
    // optimum reaches the goal within one unconstrained route after that.
    let mut last = time;
    for i in 0..layout.component_count() {
        if let Ok(occ) = problem.table.occupied(ComponentId(i as u32)) {
            for iv in occ {
                last = last.max(if iv.end == FOREVER { iv.start } else { iv.end });
            }
        }
    }
    let last = last.max(problem.release.iter().copied().max().unwrap_or(0));
    let per_cell = 2 * t.t_displace + t.t_shuttle + problem.gate_duration + 2 * q;
    let horizon = last + (layout.component_count() as Time + 2) * (m as Time + 1) * per_cell + problem.tail;

    let gate_target = |cell, done: u64| {
        let pending = full & !done;
        if pending == 0 {
            return None;
        }
        if problem.ordered {
            let next = pending.trailing_zeros() as usize;
            (problem.targets[next] == cell).then_some(next)
        } else {
            (0..m).find(|&j| pending >> j & 1 == 1 && problem.targets[j] == cell)
        }
    };

    if forbidden(start) || !free(start, time, time + q) {
        return None;
    }
    let mut seen: BTreeSet<Node> = BTreeSet::new();
    let mut frontier: BinaryHeap<Reverse<Node>> = BinaryHeap::new();
    frontier.push(Reverse((time, start, done0, true)));
    while let Some(Reverse((now, comp, done, fresh))) = frontier.pop() {
        if !seen.insert((now, comp, done, fresh)) {
            continue;
        }
        let here = layout.component(comp);
        let owed = if fresh { now + q } else { now };

        if done == full && here.kind == ComponentKind::Readout {
            let home_ok = match problem.goal {
                Goal::AnyReadout => true,
                Goal::Readout(cell) => here.cell == cell,
            };
            if home_ok && free(comp, now, (now + problem.tail).max(owed)) {
                return Some(now);
            }
        }
        let mut next = |n: Node| {
            if n.0 <= horizon {
                frontier.push(Reverse(n));
            }
        };

        if free(comp, now, now + q) {
            next((now + q, comp, done, false));
        }

        if here.kind == ComponentKind::Intersection && free(comp, now, owed) {
            for &(channel, to) in layout.shuttle_links(comp) {
                if forbidden(channel) || forbidden(to) {
                    continue;
                }
                if free(channel, now, now + t.t_shuttle) {
                    next((now + t.t_shuttle, to, done, true));
                }
            }
        }

        let layers: &[ComponentKind] = match here.kind {
            ComponentKind::Intersection => &[ComponentKind::Interaction, ComponentKind::Readout],
            ComponentKind::Interaction | ComponentKind::Readout => &[ComponentKind::Intersection],
            ComponentKind::Channel => &[],
        };
        for &kind in layers {
            let Some(to) = layout.at(here.cell, kind) else { continue };
            let arrive = now + t.t_displace;
            if !forbidden(to) && free(comp, now, arrive.max(owed)) && free(to, now, arrive) {
                next((arrive, to, done, true));
            }
        }

        if here.kind == ComponentKind::Interaction {
            if let Some(k) = gate_target(here.cell, done) {
                if now >= problem.release[k] {
                    let end = now + problem.gate_duration;
                    if free(comp, now, end.max(owed)) {
                        next((end, comp, done | 1 << k, false));
                    }
                }
            }
        }
    }
    None
}
