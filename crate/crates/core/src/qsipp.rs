//! Safe-interval A* for a single mobile ancilla.
//!
//! A search state is `(component, safe-interval index, completed targets)`;
//! the time is not part of the key. Each state remembers the earliest
//! arrival `g` found so far, and because a qubit may idle anywhere inside a
//! safe interval, the earliest arrival dominates every later one.
//!
//! Occupancy rules, shared with the schedule validator:
//! - shuttling holds the source intersection until departure, the channel
//!   for the whole traversal and the destination from arrival;
//! - displacing holds both components for the full displacement;
//! - every arrival holds its component for at least one time quantum.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::cmp::Reverse;

use crate::arch::{Cell, ChipLayout, ComponentId, ComponentKind, Time, TimingConfig, FOREVER};
use crate::error::SearchError;
use crate::sipp::{ReservationTable, TimeInterval};
use crate::tsp::{self, DistanceMatrix, SubsetPaths, DEFAULT_EXACT_LIMIT};

/// Where the ancilla must end up parked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Goal {
    AnyReadout,
    Readout(Cell),
}

/// Everything a single-ancilla search needs.
#[derive(Clone, Debug)]
pub struct SearchProblem<'a> {
    pub layout: &'a ChipLayout,
    pub table: &'a ReservationTable,
    pub timing: TimingConfig,
    /// Target cells, in visit order when `ordered`.
    pub targets: Vec<Cell>,
    pub ordered: bool,
    /// Earliest start of the gate block at each target.
    pub release: Vec<Time>,
    /// Duration of one gate stop (`t_cx`, or `t_cx + 2 t_h` when tailored).
    pub gate_duration: Time,
    pub goal: Goal,
    /// Time the goal readout must stay free after arrival.
    pub tail: Time,
    /// Components the ancilla may never enter.
    pub forbidden: Vec<ComponentId>,
    pub exact_limit: usize,
}

impl<'a> SearchProblem<'a> {
    pub fn new(layout: &'a ChipLayout, table: &'a ReservationTable, timing: TimingConfig, targets: Vec<Cell>) -> Self {
        let m = targets.len();
        Self {
            layout,
            table,
            timing,
            targets,
            ordered: false,
            release: vec![0; m],
            gate_duration: timing.t_cx,
            goal: Goal::AnyReadout,
            tail: 0,
            forbidden: Vec::new(),
            exact_limit: DEFAULT_EXACT_LIMIT,
        }
    }

    pub fn ordered(mut self, ordered: bool) -> Self {
        self.ordered = ordered;
        self
    }

    pub fn goal(mut self, goal: Goal) -> Self {
        self.goal = goal;
        self
    }

    pub fn gate_duration(mut self, d: Time) -> Self {
        self.gate_duration = d;
        self
    }

    pub fn release(mut self, release: Vec<Time>) -> Self {
        assert_eq!(release.len(), self.targets.len());
        self.release = release;
        self
    }

    pub fn tail(mut self, tail: Time) -> Self {
        self.tail = tail;
        self
    }

    pub fn forbid(mut self, comps: impl IntoIterator<Item = ComponentId>) -> Self {
        self.forbidden.extend(comps);
        self
    }

    fn full_mask(&self) -> u64 {
        if self.targets.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.targets.len()) - 1
        }
    }
}

/// `⟨component, interval, completed targets⟩` plus the earliest known arrival.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchState {
    pub component: ComponentId,
    pub interval: usize,
    /// Bit `j` set once target `j` has been gated.
    pub done: u64,
    pub g: Time,
}

impl SearchState {
    pub fn key(&self) -> StateKey {
        StateKey { component: self.component.0, interval: self.interval as u32, done: self.done }
    }

    pub fn loc(&self, layout: &ChipLayout) -> Cell {
        layout.component(self.component).cell
    }

    pub fn kind(&self, layout: &ChipLayout) -> ComponentKind {
        layout.component(self.component).kind
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateKey {
    pub component: u32,
    pub interval: u32,
    pub done: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Action {
    Wait {
        component: ComponentId,
    },
    Shuttle {
        from: ComponentId,
        channel: ComponentId,
        to: ComponentId,
    },
    Displace {
        from: ComponentId,
        to: ComponentId,
    },
    /// Gate block with target `target` (index into the problem's targets).
    Gate {
        component: ComponentId,
        target: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathStep {
    pub action: Action,
    pub start: Time,
    pub duration: Time,
}

impl PathStep {
    pub fn end(&self) -> Time {
        self.start + self.duration
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Successor {
    pub state: SearchState,
    pub action: Action,
    /// When the action begins; the ancilla idles in place before it.
    pub start: Time,
}

/// A complete single-ancilla plan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub start_component: ComponentId,
    pub start_time: Time,
    pub steps: Vec<PathStep>,
    /// Arrival at the goal readout.
    pub arrival: Time,
    pub end_component: ComponentId,
    pub expansions: usize,
}

impl Path {
    /// Duration from the start time to goal arrival.
    pub fn cost(&self) -> Time {
        self.arrival - self.start_time
    }

    pub fn shuttle_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s.action, Action::Shuttle { .. })).count()
    }

    /// Component occupancies implied by the path. The start component is
    /// held from `held_from`, the final one until `hold_until`.
    pub fn occupancies(
        &self,
        timing: &TimingConfig,
        held_from: Time,
        hold_until: Time,
    ) -> Vec<(ComponentId, TimeInterval)> {
        occupancy_intervals(
            self.start_component,
            held_from,
            self.start_time,
            self.steps.iter().map(|s| (s.action, s.start)),
            timing,
            hold_until,
        )
    }
}

/// Occupancy intervals for a movement trace starting at `start` (held
/// from `held_from`, present since `arrived`).
pub fn occupancy_intervals(
    start: ComponentId,
    held_from: Time,
    arrived: Time,
    actions: impl IntoIterator<Item = (Action, Time)>,
    timing: &TimingConfig,
    hold_until: Time,
) -> Vec<(ComponentId, TimeInterval)> {
    let q = timing.quantum();
    let mut out = Vec::new();
    let mut cur = start;
    let mut enter = held_from;
    let mut arrival = arrived;
    let mut push = |comp, from: Time, to: Time| {
        if to > from {
            out.push((comp, TimeInterval { start: from, end: to }));
        }
    };
    for (action, t) in actions {
        match action {
            Action::Wait { .. } | Action::Gate { .. } => {}
            Action::Shuttle { channel, to, .. } => {
                push(cur, enter, t.max(arrival + q));
                push(channel, t, t + timing.t_shuttle);
                cur = to;
                enter = t + timing.t_shuttle;
                arrival = enter;
            }
            Action::Displace { to, .. } => {
                push(cur, enter, (t + timing.t_displace).max(arrival + q));
                cur = to;
                enter = t;
                arrival = t + timing.t_displace;
            }
        }
    }
    let end = if hold_until == FOREVER { FOREVER } else { hold_until.max(arrival + q) };
    push(cur, enter, end);
    out
}

/// Lazily computed safe spans plus the cached shortest-path tables.
struct Context<'p, 'a> {
    p: &'p SearchProblem<'a>,
    q: Time,
    spans: RefCell<Vec<Option<Vec<TimeInterval>>>>,
    forbidden: Vec<bool>,
    paths: Option<SubsetPaths>,
    fallback: RefCell<BTreeMap<(Cell, u64), u64>>,
}

impl<'p, 'a> Context<'p, 'a> {
    fn new(p: &'p SearchProblem<'a>) -> Self {
        let mut forbidden = vec![false; p.layout.component_count()];
        for c in &p.forbidden {
            forbidden[c.index()] = true;
        }
        let m = p.targets.len();
        let paths = (!p.ordered && m <= p.exact_limit)
            .then(|| SubsetPaths::new(m, |a, b| p.layout.distance_unchecked(p.targets[a], p.targets[b])));
        Self {
            p,
            q: p.timing.quantum(),
            spans: RefCell::new(vec![None; p.layout.component_count()]),
            forbidden,
            paths,
            fallback: RefCell::new(BTreeMap::new()),
        }
    }

    fn spans(&self, comp: ComponentId) -> core::cell::Ref<'_, Vec<TimeInterval>> {
        {
            let mut cache = self.spans.borrow_mut();
            if cache[comp.index()].is_none() {
                cache[comp.index()] = Some(self.p.table.safe_spans(comp).unwrap_or_default());
            }
        }
        core::cell::Ref::map(self.spans.borrow(), |c| c[comp.index()].as_ref().expect("filled above"))
    }

    fn span(&self, comp: ComponentId, i: usize) -> TimeInterval {
        self.spans(comp)[i]
    }

    /// Target index gated at `cell` next, if any.
    fn gate_target(&self, cell: Cell, done: u64) -> Option<usize> {
        let pending = self.p.full_mask() & !done;
        if pending == 0 {
            return None;
        }
        if self.p.ordered {
            let next = pending.trailing_zeros() as usize;
            (self.p.targets[next] == cell).then_some(next)
        } else {
            (0..self.p.targets.len()).find(|&j| pending >> j & 1 == 1 && self.p.targets[j] == cell)
        }
    }

    fn successors(&self, s: &SearchState) -> Vec<Successor> {
        let p = self.p;
        let layout = p.layout;
        let t = &p.timing;
        let here = layout.component(s.component);
        let span = self.span(s.component, s.interval);
        let mut out = Vec::new();

        if here.kind == ComponentKind::Intersection {
            for &(channel, to) in layout.shuttle_links(s.component) {
                if self.forbidden[channel.index()] || self.forbidden[to.index()] {
                    continue;
                }
                let ch_spans = self.spans(channel).clone();
                let dest = self.spans(to).clone();
                for (j, b) in dest.iter().enumerate() {
                    if b.start > span.end.saturating_add(t.t_shuttle) {
                        break;
                    }
                    let found = ch_spans.iter().find_map(|c| {
                        let dep = s.g.max(c.start).max(b.start.saturating_sub(t.t_shuttle));
                        let arr = dep + t.t_shuttle;
                        (dep <= span.end && arr <= c.end && arr.saturating_add(self.q) <= b.end).then_some(dep)
                    });
                    if let Some(dep) = found {
                        out.push(Successor {
                            state: SearchState { component: to, interval: j, done: s.done, g: dep + t.t_shuttle },
                            action: Action::Shuttle { from: s.component, channel, to },
                            start: dep,
                        });
                    }
                }
            }
        }

        let layers: &[ComponentKind] = match here.kind {
            ComponentKind::Intersection => &[ComponentKind::Interaction, ComponentKind::Readout],
            ComponentKind::Interaction | ComponentKind::Readout => &[ComponentKind::Intersection],
            ComponentKind::Channel => &[],
        };
        for &kind in layers {
            let to = layout.at(here.cell, kind).expect("cell layers exist");
            if self.forbidden[to.index()] {
                continue;
            }
            let dest = self.spans(to).clone();
            for (j, y) in dest.iter().enumerate() {
                let start = s.g.max(y.start);
                let arr = start + t.t_displace;
                if arr > span.end {
                    break;
                }
                if arr.saturating_add(self.q) <= y.end {
                    out.push(Successor {
                        state: SearchState { component: to, interval: j, done: s.done, g: arr },
                        action: Action::Displace { from: s.component, to },
                        start,
                    });
                }
            }
        }

        if here.kind == ComponentKind::Interaction {
            if let Some(k) = self.gate_target(here.cell, s.done) {
                let start = s.g.max(p.release[k]);
                if start + p.gate_duration <= span.end {
                    out.push(Successor {
                        state: SearchState {
                            component: s.component,
                            interval: s.interval,
                            done: s.done | 1 << k,
                            g: start + p.gate_duration,
                        },
                        action: Action::Gate { component: s.component, target: k },
                        start,
                    });
                }
            }
        }
        out
    }

    fn heuristic(&self, s: &SearchState) -> Time {
        let p = self.p;
        let t = &p.timing;
        let layout = p.layout;
        let here = layout.component(s.component);
        let mut pending = p.full_mask() & !s.done;
        if pending == 0 {
            return if here.kind == ComponentKind::Readout { 0 } else { t.t_displace };
        }
        let cur = here.cell;
        let mut cost = 0;
        let at_target = self.gate_target(cur, s.done);
        match (here.kind, at_target) {
            (ComponentKind::Interaction, Some(k)) => {
                cost += p.gate_duration + t.t_displace;
                pending &= !(1 << k);
            }
            (ComponentKind::Interaction, None) => {}
            (_, None) => cost += t.t_displace,
            (_, Some(_)) => {}
        }
        let stops = pending.count_ones() as Time;
        let edges = self.tour_length(cur, pending);
        cost + edges * t.t_shuttle + stops * (p.gate_duration + 2 * t.t_displace)
    }

    /// Shortest open path (in edges) from `cur` through the pending targets.
    fn tour_length(&self, cur: Cell, pending: u64) -> u64 {
        let p = self.p;
        let layout = p.layout;
        if pending == 0 {
            return 0;
        }
        if p.ordered {
            let mut total = 0u64;
            let mut at = cur;
            let mut bits = pending;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                total += layout.distance_unchecked(at, p.targets[j]) as u64;
                at = p.targets[j];
            }
            return total;
        }
        if let Some(paths) = &self.paths {
            return paths.cost(pending as usize, |j| layout.distance_unchecked(cur, p.targets[j])) as u64;
        }
        if let Some(&v) = self.fallback.borrow().get(&(cur, pending)) {
            return v;
        }
        let idx: Vec<usize> = (0..p.targets.len()).filter(|&j| pending >> j & 1 == 1).collect();
        let mut pts = Vec::with_capacity(idx.len() + 1);
        pts.push(cur);
        pts.extend(idx.iter().map(|&j| p.targets[j]));
        let dist = DistanceMatrix::from_fn(pts.len(), |a, b| layout.distance_unchecked(pts[a], pts[b]) as u64);
        let v = tsp::solve(&dist, false, p.exact_limit).length;
        self.fallback.borrow_mut().insert((cur, pending), v);
        v
    }

    fn is_goal(&self, s: &SearchState) -> bool {
        if s.done != self.p.full_mask() {
            return false;
        }
        let c = self.p.layout.component(s.component);
        if c.kind != ComponentKind::Readout {
            return false;
        }
        if let Goal::Readout(cell) = self.p.goal {
            if c.cell != cell {
                return false;
            }
        }
        s.g.saturating_add(self.p.tail) <= self.span(s.component, s.interval).end
    }
}

/// Successor states of `s`, each carrying its earliest arrival time.
pub fn get_successors(problem: &SearchProblem<'_>, s: &SearchState) -> Vec<Successor> {
    Context::new(problem).successors(s)
}

/// Admissible estimate of the remaining time to the goal.
pub fn heuristic(problem: &SearchProblem<'_>, s: &SearchState) -> Time {
    Context::new(problem).heuristic(s)
}

/// Builds the start state for an ancilla sitting in `component` at `time`.
pub fn start_state(
    problem: &SearchProblem<'_>,
    component: ComponentId,
    time: Time,
) -> Result<SearchState, SearchError> {
    let spans = problem.table.safe_spans(component).unwrap_or_default();
    let interval = spans.iter().position(|s| s.contains(time)).ok_or(SearchError::StartBlocked { component, time })?;
    Ok(SearchState { component, interval, done: 0, g: time })
}

type OpenEntry = (Time, u32, Time, StateKey, usize);

struct Node {
    state: SearchState,
    parent: Option<usize>,
    action: Option<Action>,
    action_start: Time,
    /// Shuttles taken so far; breaks ties between equally early arrivals.
    shuttles: u32,
}

/// Time-optimal path from `start` (given fixed reservations) that completes
/// every target and parks in a goal readout.
pub fn qsipp_search(problem: &SearchProblem<'_>, start: SearchState) -> Result<Path, SearchError> {
    if problem.targets.len() > 64 {
        return Err(SearchError::TooManyTargets(problem.targets.len()));
    }
    if let Some(&c) = problem.targets.iter().find(|c| !problem.layout.contains(**c)) {
        return Err(SearchError::TargetOffChip(c));
    }
    let ctx = Context::new(problem);
    {
        let spans = ctx.spans(start.component);
        match spans.get(start.interval) {
            Some(span) if span.start <= start.g && start.g < span.end => {}
            _ => return Err(SearchError::StartBlocked { component: start.component, time: start.g }),
        }
    }

    let mut nodes: Vec<Node> = Vec::new();
    let mut index: BTreeMap<StateKey, usize> = BTreeMap::new();
    // (f, shuttles, h, key, node): smaller f, then fewer shuttles, then
    // smaller h, then smaller key
    let mut open: BinaryHeap<Reverse<OpenEntry>> = BinaryHeap::new();

    let h0 = ctx.heuristic(&start);
    nodes.push(Node { state: start, parent: None, action: None, action_start: start.g, shuttles: 0 });
    index.insert(start.key(), 0);
    open.push(Reverse((start.g + h0, 0, h0, start.key(), 0)));
    let mut expansions = 0;

    while let Some(Reverse((f, shuttles, h, _, id))) = open.pop() {
        let s = nodes[id].state;
        if s.g + h != f || nodes[id].shuttles != shuttles {
            continue; // stale entry
        }
        expansions += 1;
        if ctx.is_goal(&s) {
            return Ok(trace(problem, &nodes, id, expansions));
        }
        for succ in ctx.successors(&s) {
            let key = succ.state.key();
            let moved = shuttles + matches!(succ.action, Action::Shuttle { .. }) as u32;
            let node = Node {
                state: succ.state,
                parent: Some(id),
                action: Some(succ.action),
                action_start: succ.start,
                shuttles: moved,
            };
            let target = match index.get(&key) {
                Some(&n) if (succ.state.g, moved) >= (nodes[n].state.g, nodes[n].shuttles) => continue,
                Some(&n) => {
                    nodes[n] = node;
                    n
                }
                None => {
                    nodes.push(node);
                    index.insert(key, nodes.len() - 1);
                    nodes.len() - 1
                }
            };
            let hs = ctx.heuristic(&succ.state);
            open.push(Reverse((succ.state.g + hs, moved, hs, key, target)));
        }
    }
    Err(SearchError::NoPath)
}

/// Path with the fewest shuttles among those reaching a goal readout by
/// `deadline`, if it uses fewer than `limit`. Best-first on shuttle count,
/// keeping the earliest arrival per state and count; gives up after
/// `budget` expansions.
pub fn fewest_shuttles(
    problem: &SearchProblem<'_>,
    start: SearchState,
    deadline: Time,
    limit: usize,
    budget: usize,
) -> Result<Option<Path>, SearchError> {
    if problem.targets.len() > 64 {
        return Err(SearchError::TooManyTargets(problem.targets.len()));
    }
    let ctx = Context::new(problem);
    let limit = limit as u32;
    let mut nodes: Vec<Node> = Vec::new();
    let mut index: BTreeMap<(StateKey, u32), usize> = BTreeMap::new();
    // (shuttles + remaining edges, g, key, node)
    let mut open: BinaryHeap<Reverse<(u32, Time, StateKey, usize)>> = BinaryHeap::new();
    let edges_left = |s: &SearchState| ctx.tour_length(s.loc(problem.layout), problem.full_mask() & !s.done) as u32;

    nodes.push(Node { state: start, parent: None, action: None, action_start: start.g, shuttles: 0 });
    index.insert((start.key(), 0), 0);
    open.push(Reverse((edges_left(&start), start.g, start.key(), 0)));
    let mut expansions = 0;

    while let Some(Reverse((f, g, _, id))) = open.pop() {
        if f >= limit || expansions >= budget {
            return Ok(None);
        }
        let s = nodes[id].state;
        if s.g != g {
            continue; // stale entry
        }
        expansions += 1;
        if ctx.is_goal(&s) {
            return Ok(Some(trace(problem, &nodes, id, expansions)));
        }
        let shuttles = nodes[id].shuttles;
        for succ in ctx.successors(&s) {
            if succ.state.g.saturating_add(ctx.heuristic(&succ.state)) > deadline {
                continue;
            }
            let moved = shuttles + matches!(succ.action, Action::Shuttle { .. }) as u32;
            let key = (succ.state.key(), moved);
            let node = Node {
                state: succ.state,
                parent: Some(id),
                action: Some(succ.action),
                action_start: succ.start,
                shuttles: moved,
            };
            let target = match index.get(&key) {
                Some(&n) if succ.state.g >= nodes[n].state.g => continue,
                Some(&n) => {
                    nodes[n] = node;
                    n
                }
                None => {
                    nodes.push(node);
                    index.insert(key, nodes.len() - 1);
                    nodes.len() - 1
                }
            };
            open.push(Reverse((moved + edges_left(&succ.state), succ.state.g, key.0, target)));
        }
    }
    Ok(None)
}

fn trace(problem: &SearchProblem<'_>, nodes: &[Node], goal: usize, expansions: usize) -> Path {
    let mut chain = Vec::new();
    let mut cur = Some(goal);
    while let Some(i) = cur {
        chain.push(i);
        cur = nodes[i].parent;
    }
    chain.reverse();
    let t = &problem.timing;
    let first = nodes[chain[0]].state;
    let mut steps = Vec::new();
    let mut now = first.g;
    let mut comp = first.component;
    for &i in &chain[1..] {
        let node = &nodes[i];
        let action = node.action.expect("non-root node has an action");
        if node.action_start > now {
            steps.push(PathStep {
                action: Action::Wait { component: comp },
                start: now,
                duration: node.action_start - now,
            });
        }
        let duration = match action {
            Action::Shuttle { .. } => t.t_shuttle,
            Action::Displace { .. } => t.t_displace,
            Action::Gate { .. } => problem.gate_duration,
            Action::Wait { .. } => unreachable!("waits are implicit in the search"),
        };
        steps.push(PathStep { action, start: node.action_start, duration });
        now = node.action_start + duration;
        debug_assert_eq!(now, node.state.g);
        comp = node.state.component;
    }
    Path { start_component: first.component, start_time: first.g, steps, arrival: now, end_component: comp, expansions }
}
