//! Prioritized planning of a full syndrome-extraction round.
//!
//! Ancillae are planned one at a time; each committed path becomes a fixed
//! obstacle for every later search. Each ancilla starts and ends a round in
//! its own home readout, so the round pattern repeats with period equal to
//! the single-round makespan.
//!
//! On every data qubit all X-check CXs of a round precede all Z-check CXs.
//! X ancillae are planned first and their CX end times become release times
//! for the Z ancillae, which keeps every check measurement deterministic no
//! matter how the paths interleave.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arch::{Cell, ChipLayout, ComponentId, Time, TimingConfig, FOREVER};
use crate::code::{tasks_from_code, Basis, CheckTask, CssCode, DataLayout};
use crate::error::CompileError;
use crate::qsipp::{self, Action, Goal, SearchProblem};
use crate::sipp::ReservationTable;
use crate::tsp::DEFAULT_EXACT_LIMIT;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EventKind {
    Init,
    Displace,
    Shuttle,
    H,
    Cx,
    Wait,
    Measure,
}

impl EventKind {
    pub const ALL: [EventKind; 7] = [
        EventKind::Init,
        EventKind::Displace,
        EventKind::Shuttle,
        EventKind::H,
        EventKind::Cx,
        EventKind::Wait,
        EventKind::Measure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EventKind::Init => "INIT",
            EventKind::Displace => "DISPLACE",
            EventKind::Shuttle => "SHUTTLE",
            EventKind::H => "H",
            EventKind::Cx => "CX",
            EventKind::Wait => "WAIT",
            EventKind::Measure => "MEASURE",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn is_movement(self) -> bool {
        matches!(self, EventKind::Displace | EventKind::Shuttle | EventKind::Wait)
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One timed operation of an ancilla.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Event {
    pub kind: EventKind,
    pub start: Time,
    pub duration: Time,
    /// Where the event happens. SHUTTLE names the channel and DISPLACE the
    /// destination.
    pub component: ComponentId,
    /// Data qubit of a CX.
    pub partner: Option<usize>,
}

impl Event {
    pub fn end(&self) -> Time {
        self.start + self.duration
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AncillaSchedule {
    pub ancilla: usize,
    pub basis: Basis,
    /// Basis changes wrap every movement segment.
    pub tailored: bool,
    pub home: Cell,
    pub targets: Vec<usize>,
    pub ordered: bool,
    /// Time-sorted, non-overlapping.
    pub events: Vec<Event>,
}

impl AncillaSchedule {
    /// True for ancillae that carry H at both ends of the round.
    pub fn uses_hadamard(&self) -> bool {
        self.basis == Basis::X || self.tailored
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum OrderPolicy {
    /// Descending single-ancilla lower bound, ties by index.
    #[default]
    LongestFirst,
    Index,
    /// Seeded shuffle.
    Random,
}

impl OrderPolicy {
    pub fn name(self) -> &'static str {
        match self {
            OrderPolicy::LongestFirst => "longest-first",
            OrderPolicy::Index => "index",
            OrderPolicy::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [OrderPolicy::LongestFirst, OrderPolicy::Index, OrderPolicy::Random].into_iter().find(|p| p.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Provenance {
    pub code_name: String,
    pub grid: (u32, u32),
    pub data_cells: Vec<Cell>,
    pub seed: u64,
    pub policy: OrderPolicy,
    /// Ancillae in planning order.
    pub order: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Schedule {
    /// Indexed by ancilla id.
    pub ancillae: Vec<AncillaSchedule>,
    pub rounds: u32,
    /// Single-round makespan; round `r` occupies `[r·period, (r+1)·period)`.
    pub period: Time,
    pub makespan: Time,
    pub timing: TimingConfig,
    pub provenance: Provenance,
}

impl Schedule {
    pub fn data_cell(&self, qubit: usize) -> Cell {
        self.provenance.data_cells[qubit]
    }

    pub fn event_count(&self) -> usize {
        self.ancillae.iter().map(|a| a.events.len()).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompileOptions {
    pub timing: TimingConfig,
    pub policy: OrderPolicy,
    pub tailor: bool,
    pub seed: u64,
    pub exact_limit: usize,
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self {
            timing: TimingConfig::default(),
            policy: OrderPolicy::LongestFirst,
            tailor: false,
            seed: 0,
            exact_limit: DEFAULT_EXACT_LIMIT,
        }
    }
}

/// Squared distance from `cell` to the centroid of `targets`, as an exact
/// fraction `num / den`.
fn centroid_distance(cell: Cell, targets: &[Cell]) -> (u128, u128) {
    let m = targets.len() as i128;
    if m == 0 {
        return (0, 1);
    }
    let sx: i128 = targets.iter().map(|c| c.x as i128).sum();
    let sy: i128 = targets.iter().map(|c| c.y as i128).sum();
    let dx = m * cell.x as i128 - sx;
    let dy = m * cell.y as i128 - sy;
    ((dx * dx + dy * dy) as u128, (m * m) as u128)
}

/// Distinct home cell per task, greedily nearest to the task's target
/// centroid. Ties prefer the cell nearer the first target, then lower
/// `(y, x)`, then lower ancilla index.
pub fn assign_homes(
    tasks: &[CheckTask],
    layout: &ChipLayout,
    data_layout: &DataLayout,
) -> Result<Vec<Cell>, CompileError> {
    let cells: Vec<Cell> = layout.cells().collect();
    if tasks.len() > cells.len() {
        return Err(CompileError::InsufficientCells { ancillae: tasks.len(), cells: cells.len() });
    }
    struct Pair {
        dist: (u128, u128),
        first: u32,
        cell: Cell,
        ancilla: usize,
    }
    let mut pairs = Vec::with_capacity(tasks.len() * cells.len());
    for (a, task) in tasks.iter().enumerate() {
        let targets: Vec<Cell> = task.targets.iter().map(|&q| data_layout.cell(q)).collect();
        for &cell in &cells {
            pairs.push(Pair {
                dist: centroid_distance(cell, &targets),
                first: targets.first().map_or(0, |&t| cell.manhattan(t)),
                cell,
                ancilla: a,
            });
        }
    }
    pairs.sort_by(|p, q| {
        (p.dist.0 * q.dist.1)
            .cmp(&(q.dist.0 * p.dist.1))
            .then(p.first.cmp(&q.first))
            .then((p.cell.y, p.cell.x).cmp(&(q.cell.y, q.cell.x)))
            .then(p.ancilla.cmp(&q.ancilla))
    });
    let mut home: Vec<Option<Cell>> = vec![None; tasks.len()];
    let mut taken = vec![false; cells.len()];
    let width = layout.width();
    let mut left = tasks.len();
    for p in pairs {
        if left == 0 {
            break;
        }
        let ci = (p.cell.y * width + p.cell.x) as usize;
        if home[p.ancilla].is_some() || taken[ci] {
            continue;
        }
        home[p.ancilla] = Some(p.cell);
        taken[ci] = true;
        left -= 1;
    }
    Ok(home.into_iter().map(|h| h.expect("every ancilla receives a cell")).collect())
}

struct Plan<'a> {
    task: &'a CheckTask,
    home: Cell,
    tailored: bool,
}

impl Plan<'_> {
    fn uses_hadamard(&self) -> bool {
        self.task.basis == Basis::X || self.tailored
    }

    fn start_time(&self, t: &TimingConfig) -> Time {
        t.t_init + if self.uses_hadamard() { t.t_h } else { 0 }
    }

    fn tail(&self, t: &TimingConfig) -> Time {
        t.t_meas + if self.uses_hadamard() { t.t_h } else { 0 }
    }

    fn gate_duration(&self, t: &TimingConfig) -> Time {
        t.t_cx + if self.tailored { 2 * t.t_h } else { 0 }
    }
}

fn planning_order(
    plans: &[Plan<'_>],
    layout: &ChipLayout,
    data_layout: &DataLayout,
    opts: &CompileOptions,
) -> Vec<usize> {
    let empty = ReservationTable::new(layout.component_count());
    let mut groups: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (a, p) in plans.iter().enumerate() {
        groups[usize::from(p.task.basis == Basis::Z)].push(a);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::with_capacity(plans.len());
    for mut group in groups {
        match opts.policy {
            OrderPolicy::Index => {}
            OrderPolicy::Random => group.shuffle(&mut rng),
            OrderPolicy::LongestFirst => {
                let bound = |a: usize| {
                    let p = &plans[a];
                    let targets = p.task.targets.iter().map(|&q| data_layout.cell(q)).collect();
                    let problem = SearchProblem::new(layout, &empty, opts.timing, targets)
                        .ordered(p.task.ordered)
                        .gate_duration(p.gate_duration(&opts.timing))
                        .goal(Goal::Readout(p.home));
                    let s = qsipp::SearchState { component: layout.readout(p.home), interval: 0, done: 0, g: 0 };
                    qsipp::heuristic(&problem, &s)
                };
                let mut keyed: Vec<(Time, usize)> = group.iter().map(|&a| (bound(a), a)).collect();
                keyed.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
                group = keyed.into_iter().map(|(_, a)| a).collect();
            }
        }
        out.extend(group);
    }
    out
}

/// Expansions allowed when looking for a route with fewer shuttles.
const REFINE_BUDGET: usize = 20_000;

/// Plans one syndrome-extraction round for every check of `code`.
pub fn schedule_round(
    code: &CssCode,
    layout: &ChipLayout,
    data_layout: &DataLayout,
    opts: &CompileOptions,
) -> Result<Schedule, CompileError> {
    opts.timing.validate()?;
    if data_layout.len() != code.n() {
        return Err(crate::error::CodeError::LayoutSize { expected: code.n(), got: data_layout.len() }.into());
    }
    data_layout.check_fits(layout)?;
    let t = opts.timing;
    let tasks = tasks_from_code(code);
    let homes = assign_homes(&tasks, layout, data_layout)?;
    let plans: Vec<Plan<'_>> = tasks
        .iter()
        .zip(&homes)
        .map(|(task, &home)| Plan { task, home, tailored: opts.tailor && task.basis == Basis::Z })
        .collect();
    let order = planning_order(&plans, layout, data_layout, opts);
    let home_readouts: Vec<ComponentId> = homes.iter().map(|&h| layout.readout(h)).collect();

    let mut table = ReservationTable::new(layout.component_count());
    // End of the latest X-check CX on each data qubit.
    let mut x_done = vec![0 as Time; code.n()];
    let mut schedules: Vec<Option<AncillaSchedule>> = vec![None; tasks.len()];
    let mut makespan = 0;

    for &a in &order {
        let plan = &plans[a];
        let task = plan.task;
        let targets: Vec<Cell> = task.targets.iter().map(|&q| data_layout.cell(q)).collect();
        let pre = if plan.tailored { t.t_h } else { 0 };
        let release: Vec<Time> = match task.basis {
            Basis::X => vec![0; targets.len()],
            Basis::Z => task.targets.iter().map(|&q| x_done[q].saturating_sub(pre)).collect(),
        };
        let home = home_readouts[a];
        let problem = SearchProblem::new(layout, &table, t, targets)
            .ordered(task.ordered)
            .release(release)
            .gate_duration(plan.gate_duration(&t))
            .goal(Goal::Readout(plan.home))
            .tail(plan.tail(&t))
            .forbid(home_readouts.iter().enumerate().filter(|&(b, _)| b != a).map(|(_, &c)| c));
        let problem = SearchProblem { exact_limit: opts.exact_limit, ..problem };
        let search = |e| CompileError::Search { ancilla: a, source: e };
        let start = qsipp::start_state(&problem, home, plan.start_time(&t)).map_err(search)?;
        let mut path = qsipp::qsipp_search(&problem, start).map_err(search)?;
        // Finishing as late as the round already does costs nothing, so
        // trade that slack for fewer shuttles.
        let finish = path.arrival + plan.tail(&t);
        if makespan > finish {
            let deadline = makespan - plan.tail(&t);
            if let Some(p) = qsipp::fewest_shuttles(&problem, start, deadline, path.shuttle_count(), REFINE_BUDGET)
                .map_err(search)?
            {
                path = p;
            }
        }

        for (comp, iv) in path.occupancies(&t, 0, FOREVER) {
            table.reserve(comp, iv).map_err(|e| CompileError::Reservation { ancilla: a, source: e })?;
        }

        let events = build_events(plan, &path, home, &t);
        if task.basis == Basis::X {
            for e in events.iter().filter(|e| e.kind == EventKind::Cx) {
                let q = e.partner.expect("CX names its data qubit");
                x_done[q] = x_done[q].max(e.end());
            }
        }
        makespan = makespan.max(events.last().map_or(0, Event::end));
        schedules[a] = Some(AncillaSchedule {
            ancilla: a,
            basis: task.basis,
            tailored: plan.tailored,
            home: plan.home,
            targets: task.targets.clone(),
            ordered: task.ordered,
            events,
        });
    }

    Ok(Schedule {
        ancillae: schedules.into_iter().map(|s| s.expect("every ancilla planned")).collect(),
        rounds: 1,
        period: makespan,
        makespan,
        timing: t,
        provenance: Provenance {
            code_name: code.name.clone(),
            grid: (layout.width(), layout.height()),
            data_cells: data_layout.cells().to_vec(),
            seed: opts.seed,
            policy: opts.policy,
            order,
        },
    })
}

fn build_events(plan: &Plan<'_>, path: &qsipp::Path, home: ComponentId, t: &TimingConfig) -> Vec<Event> {
    let mut out = Vec::with_capacity(path.steps.len() + 8);
    let at = |kind, start, duration, component| Event { kind, start, duration, component, partner: None };
    out.push(at(EventKind::Init, 0, t.t_init, home));
    if plan.uses_hadamard() {
        out.push(at(EventKind::H, t.t_init, t.t_h, home));
    }
    for step in &path.steps {
        match step.action {
            Action::Wait { component } => out.push(at(EventKind::Wait, step.start, step.duration, component)),
            Action::Displace { to, .. } => out.push(at(EventKind::Displace, step.start, step.duration, to)),
            Action::Shuttle { channel, .. } => out.push(at(EventKind::Shuttle, step.start, step.duration, channel)),
            Action::Gate { component, target } => {
                let partner = Some(plan.task.targets[target]);
                let mut s = step.start;
                if plan.tailored {
                    out.push(at(EventKind::H, s, t.t_h, component));
                    s += t.t_h;
                }
                out.push(Event { kind: EventKind::Cx, start: s, duration: t.t_cx, component, partner });
                s += t.t_cx;
                if plan.tailored {
                    out.push(at(EventKind::H, s, t.t_h, component));
                }
            }
        }
    }
    let mut s = path.arrival;
    if plan.uses_hadamard() {
        out.push(at(EventKind::H, s, t.t_h, path.end_component));
        s += t.t_h;
    }
    out.push(at(EventKind::Measure, s, t.t_meas, path.end_component));
    out
}

/// Repeats the schedule `rounds` times back to back.
pub fn replicate_rounds(schedule: &Schedule, rounds: u32) -> Schedule {
    assert!(rounds >= 1, "at least one round");
    let block = schedule.period * schedule.rounds as Time;
    let mut out = schedule.clone();
    for (dst, src) in out.ancillae.iter_mut().zip(&schedule.ancillae) {
        dst.events = (0..rounds as Time)
            .flat_map(|r| src.events.iter().map(move |e| Event { start: e.start + r * block, ..*e }))
            .collect();
    }
    out.rounds = schedule.rounds * rounds;
    out.makespan = schedule.period * out.rounds as Time;
    out
}

/// Compares by `(start, ancilla)` for global listings.
pub fn event_order(a: (usize, &Event), b: (usize, &Event)) -> Ordering {
    (a.1.start, a.0).cmp(&(b.1.start, b.0))
}

/// Number of SHUTTLE events per ancilla in round `round`.
pub fn shuttles_in_round(schedule: &Schedule, round: u32) -> Vec<usize> {
    let lo = schedule.period * round as Time;
    let hi = lo + schedule.period;
    schedule
        .ancillae
        .iter()
        .map(|a| a.events.iter().filter(|e| e.kind == EventKind::Shuttle && (lo..hi).contains(&e.start)).count())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::build_grid;
    use crate::code::surface_code;
    use crate::gf2::BitMatrix;

    fn surface(d: u32, tailor: bool) -> (CssCode, ChipLayout, DataLayout, Schedule) {
        let (code, data) = surface_code(d).unwrap();
        let data = data.normalized(1);
        let layout = build_grid(d + 2, d + 2).unwrap();
        let opts = CompileOptions { tailor, ..CompileOptions::default() };
        let s = schedule_round(&code, &layout, &data, &opts).unwrap();
        (code, layout, data, s)
    }

    #[test]
    fn homes_are_distinct_and_near() {
        let (code, data) = surface_code(3).unwrap();
        let data = data.normalized(1);
        let layout = build_grid(5, 5).unwrap();
        let tasks = tasks_from_code(&code);
        let homes = assign_homes(&tasks, &layout, &data).unwrap();
        assert_eq!(homes.len(), 8);
        let mut sorted = homes.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 8);
        for (task, home) in tasks.iter().zip(&homes) {
            let near = task.targets.iter().map(|&q| data.cell(q).manhattan(*home)).min().unwrap();
            assert!(near <= 1, "home {home} far from its check");
        }
    }

    #[test]
    fn identical_centroids_prefer_lower_index() {
        let hx = BitMatrix::from_dense(&[&[1, 1, 1, 1], &[1, 1, 1, 1]]);
        let hz = BitMatrix::empty(4);
        let code = CssCode::new("dup", hx, hz, None).unwrap();
        let data = DataLayout::new(vec![Cell::new(1, 1), Cell::new(2, 1), Cell::new(1, 2), Cell::new(2, 2)]).unwrap();
        let layout = build_grid(4, 4).unwrap();
        let homes = assign_homes(&tasks_from_code(&code), &layout, &data).unwrap();
        assert_ne!(homes[0], homes[1]);
        assert_eq!(homes[0], Cell::new(1, 1));
    }

    #[test]
    fn too_many_ancillae() {
        let hx = BitMatrix::from_dense(&[&[1, 1], &[1, 1], &[1, 1]]);
        let code = CssCode::new("x", hx, BitMatrix::empty(2), None).unwrap();
        let data = DataLayout::new(vec![Cell::new(0, 0), Cell::new(1, 0)]).unwrap();
        let layout = build_grid(2, 1).unwrap();
        assert_eq!(
            assign_homes(&tasks_from_code(&code), &layout, &data),
            Err(CompileError::InsufficientCells { ancillae: 3, cells: 2 })
        );
    }

    #[test]
    fn surface_round_basic_shape() {
        let (code, _, _, s) = surface(3, false);
        assert_eq!(s.ancillae.len(), code.num_checks());
        for a in &s.ancillae {
            let cx: Vec<usize> = a.events.iter().filter_map(|e| e.partner).collect();
            assert_eq!(cx, a.targets);
            assert_eq!(a.events.first().unwrap().kind, EventKind::Init);
            assert_eq!(a.events.last().unwrap().kind, EventKind::Measure);
            for w in a.events.windows(2) {
                assert!(w[0].end() <= w[1].start);
            }
        }
        let shuttles = shuttles_in_round(&s, 0);
        let mean = shuttles.iter().sum::<usize>() as f64 / shuttles.len() as f64;
        assert!(mean <= 4.0, "mean shuttles {mean}");
        // X planned before Z
        let first_z = s.provenance.order.iter().position(|&a| s.ancillae[a].basis == Basis::Z).unwrap();
        assert!(s.provenance.order[..first_z].iter().all(|&a| s.ancillae[a].basis == Basis::X));
    }

    #[test]
    fn x_before_z_on_every_qubit() {
        let (code, _, _, s) = surface(3, true);
        for q in 0..code.n() {
            let times = |b: Basis| -> Vec<Time> {
                s.ancillae
                    .iter()
                    .filter(|a| a.basis == b)
                    .flat_map(|a| a.events.iter())
                    .filter(|e| e.partner == Some(q))
                    .map(|e| e.start)
                    .collect()
            };
            let x_last = times(Basis::X).into_iter().max().unwrap_or(0);
            assert!(times(Basis::Z).into_iter().all(|t| t >= x_last + 100));
        }
    }

    #[test]
    fn tailored_z_has_flanking_hadamards() {
        let (_, _, _, s) = surface(3, true);
        for a in s.ancillae.iter().filter(|a| a.basis == Basis::Z) {
            assert!(a.tailored);
            let kinds: Vec<EventKind> = a.events.iter().map(|e| e.kind).collect();
            for (i, k) in kinds.iter().enumerate() {
                if k.is_movement() {
                    let before = kinds[..i].iter().rev().find(|k| !k.is_movement()).unwrap();
                    let after = kinds[i..].iter().find(|k| !k.is_movement()).unwrap();
                    assert_eq!((*before, *after), (EventKind::H, EventKind::H));
                }
            }
            let hs = kinds.iter().filter(|&&k| k == EventKind::H).count();
            assert_eq!(hs, 2 * (a.targets.len() + 1));
        }
    }

    #[test]
    fn deterministic_for_fixed_inputs() {
        let (_, _, _, a) = surface(3, false);
        let (_, _, _, b) = surface(3, false);
        assert_eq!(a, b);
        let (code, data) = surface_code(3).unwrap();
        let data = data.normalized(1);
        let layout = build_grid(5, 5).unwrap();
        let opts = CompileOptions { policy: OrderPolicy::Random, seed: 9, ..CompileOptions::default() };
        let r1 = schedule_round(&code, &layout, &data, &opts).unwrap();
        let r2 = schedule_round(&code, &layout, &data, &opts).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn replication_is_periodic() {
        let (_, _, _, s) = surface(3, false);
        assert_eq!(replicate_rounds(&s, 1), s);
        let r = replicate_rounds(&s, 3);
        assert_eq!(r.makespan, 3 * s.makespan);
        assert_eq!(r.event_count(), 3 * s.event_count());
        assert_eq!(r.rounds, 3);
        let again = replicate_rounds(&r, 2);
        assert_eq!(again.rounds, 6);
        assert_eq!(again.makespan, 6 * s.period);
    }

    #[test]
    fn policies_all_produce_complete_rounds() {
        let (code, data) = surface_code(3).unwrap();
        let data = data.normalized(1);
        let layout = build_grid(5, 5).unwrap();
        for policy in [OrderPolicy::LongestFirst, OrderPolicy::Index, OrderPolicy::Random] {
            let opts = CompileOptions { policy, seed: 4, ..CompileOptions::default() };
            let s = schedule_round(&code, &layout, &data, &opts).unwrap();
            let mut order = s.provenance.order.clone();
            order.sort();
            assert_eq!(order, (0..8).collect::<Vec<_>>());
            assert_eq!(OrderPolicy::parse(policy.name()), Some(policy));
        }
    }
}
