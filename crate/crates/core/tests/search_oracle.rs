#![cfg(feature = "oracle")]

use proptest::prelude::*;
use spinroute_core::arch::{build_grid, Cell, ComponentId, TimingConfig};
use spinroute_core::oracle::discrete_optimum;
use spinroute_core::qsipp::{qsipp_search, start_state, Goal, SearchProblem};
use spinroute_core::sipp::{ReservationTable, TimeInterval};

#[derive(Debug, Clone)]
struct Instance {
    w: u32,
    h: u32,
    targets: Vec<(u32, u32)>,
    home: (u32, u32),
    blocks: Vec<(u32, u64, u64)>,
    ordered: bool,
    home_goal: bool,
    release: Vec<u64>,
    tail: u64,
}

fn instance() -> impl Strategy<Value = Instance> {
    (1u32..=4, 1u32..=4)
        .prop_filter("two cells", |(w, h)| w * h >= 2)
        .prop_flat_map(|(w, h)| {
            let cell = (0..w, 0..h);
            (
                Just(w),
                Just(h),
                proptest::collection::btree_set(cell.clone(), 1..=4),
                cell,
                proptest::collection::vec((any::<u32>(), 0u64..60, 1u64..30), 0..=3),
                any::<bool>(),
                any::<bool>(),
                proptest::collection::vec(0u64..40, 4),
                prop_oneof![Just(0u64), Just(500u64)],
            )
        })
        .prop_map(|(w, h, targets, home, blocks, ordered, home_goal, release, tail)| Instance {
            w,
            h,
            targets: targets.into_iter().collect(),
            home,
            blocks,
            ordered,
            home_goal,
            release,
            tail,
        })
}

fn solve(inst: &Instance) -> (Option<u64>, Option<u64>) {
    let layout = build_grid(inst.w, inst.h).unwrap();
    let mut table = ReservationTable::new(layout.component_count());
    for &(c, s, l) in &inst.blocks {
        let comp = ComponentId(c % layout.component_count() as u32);
        let _ = table.reserve(comp, TimeInterval { start: s * 100, end: (s + l) * 100 });
    }
    let targets: Vec<Cell> = inst.targets.iter().map(|&(x, y)| Cell::new(x, y)).collect();
    let home = Cell::new(inst.home.0, inst.home.1);
    let release = inst.release[..targets.len()].iter().map(|r| r * 100).collect();
    let goal = if inst.home_goal { Goal::Readout(home) } else { Goal::AnyReadout };
    let p = SearchProblem::new(&layout, &table, TimingConfig::default(), targets)
        .ordered(inst.ordered)
        .goal(goal)
        .release(release)
        .tail(inst.tail);
    let start = layout.readout(home);
    let searched = start_state(&p, start, 0).ok().and_then(|s| qsipp_search(&p, s).ok()).map(|path| path.arrival);
    (searched, discrete_optimum(&p, start, 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn search_matches_discrete_optimum(inst in instance()) {
        let (searched, oracle) = solve(&inst);
        prop_assert_eq!(searched, oracle);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn heuristic_never_overestimates(inst in instance(), comp in any::<u32>(), done in any::<u64>(), g in 0u64..50) {
        let layout = build_grid(inst.w, inst.h).unwrap();
        let table = ReservationTable::new(layout.component_count());
        let targets: Vec<Cell> = inst.targets.iter().map(|&(x, y)| Cell::new(x, y)).collect();
        let m = targets.len();
        let p = SearchProblem::new(&layout, &table, TimingConfig::default(), targets).ordered(inst.ordered);
        let component = ComponentId(comp % layout.component_count() as u32);
        prop_assume!(layout.component(component).kind != spinroute_core::ComponentKind::Channel);
        let done = if inst.ordered { (1u64 << (done as usize % (m + 1))) - 1 } else { done & ((1 << m) - 1) };
        let s = spinroute_core::qsipp::SearchState { component, interval: 0, done, g: g * 100 };
        let exact = spinroute_core::oracle::cost_to_go(&p, &s).unwrap();
        prop_assert!(spinroute_core::qsipp::heuristic(&p, &s) <= exact);
    }
}
