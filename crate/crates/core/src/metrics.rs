//! Schedule-quality statistics.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::arch::{gcd, Cell, Time};
use crate::code::{CheckTask, CssCode, DataLayout};
use crate::compiler::{shuttles_in_round, Schedule};
use crate::error::MetricsError;
use crate::tsp::{solve, DistanceMatrix};

/// Unit-edge shuttles of the first round.
#[derive(Clone, Debug, PartialEq)]
pub struct ShuttleStats {
    pub per_ancilla: Vec<usize>,
    pub mean: f64,
    pub max: usize,
    pub makespan: Time,
    /// Mean achieved over mean ideal, once an ideal bound is attached.
    pub overhead: Option<f64>,
}

impl ShuttleStats {
    pub fn with_ideal(mut self, ideal: &IdealBound) -> Self {
        self.overhead = Some(ratio(self.mean, ideal.mean));
        self
    }
}

pub fn shuttle_stats(schedule: &Schedule) -> ShuttleStats {
    let per_ancilla = if schedule.rounds == 0 { Vec::new() } else { shuttles_in_round(schedule, 0) };
    ShuttleStats {
        mean: mean(per_ancilla.iter().map(|&c| c as u64)),
        max: per_ancilla.iter().copied().max().unwrap_or(0),
        per_ancilla,
        makespan: schedule.makespan,
        overhead: None,
    }
}

/// Which legs of an ancilla's route the collision-free bound counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TourConvention {
    /// Home, every target, back home.
    #[default]
    Closed,
    /// Home then every target; no return leg.
    Open,
}

impl TourConvention {
    pub fn name(self) -> &'static str {
        match self {
            Self::Closed => "closed",
            Self::Open => "open",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdealBound {
    pub convention: TourConvention,
    pub per_ancilla: Vec<u64>,
    pub mean: f64,
}

/// Shortest Manhattan route per ancilla ignoring every other ancilla.
/// Ordered tasks follow their forced sequence.
pub fn ideal_lower_bound(
    tasks: &[CheckTask],
    data: &DataLayout,
    homes: &[Cell],
    convention: TourConvention,
    exact_limit: usize,
) -> Result<IdealBound, MetricsError> {
    let closed = convention == TourConvention::Closed;
    let mut per_ancilla = Vec::with_capacity(tasks.len());
    for task in tasks {
        let home = homes[task.ancilla];
        let cells: Vec<Cell> = task.targets.iter().map(|&q| data.cell(q)).collect();
        let length = if task.ordered {
            let mut at = home;
            let mut sum = 0u64;
            for &c in &cells {
                sum += at.manhattan(c) as u64;
                at = c;
            }
            if closed {
                sum += at.manhattan(home) as u64;
            }
            sum
        } else {
            if cells.len() > exact_limit {
                return Err(MetricsError::TooManyTargets {
                    ancilla: task.ancilla,
                    targets: cells.len(),
                    limit: exact_limit,
                });
            }
            let pt = |i: usize| if i == 0 { home } else { cells[i - 1] };
            let dist = DistanceMatrix::from_fn(cells.len() + 1, |a, b| pt(a).manhattan(pt(b)) as u64);
            solve(&dist, closed, exact_limit).length
        };
        per_ancilla.push(length);
    }
    let mean = mean(per_ancilla.iter().copied());
    Ok(IdealBound { convention, per_ancilla, mean })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverheadReport {
    pub per_code: Vec<(String, f64)>,
    pub geomean: f64,
}

/// Achieved-over-ideal mean shuttle ratio per code and their geometric mean.
pub fn overhead_report(entries: &[(String, ShuttleStats, IdealBound)]) -> OverheadReport {
    let per_code: Vec<(String, f64)> =
        entries.iter().map(|(name, s, i)| (name.clone(), ratio(s.mean, i.mean))).collect();
    let geomean = if per_code.is_empty() {
        1.0
    } else {
        let logs: f64 = per_code.iter().map(|(_, r)| libm::log(*r)).sum();
        libm::exp(logs / per_code.len() as f64)
    };
    OverheadReport { per_code, geomean }
}

fn ratio(achieved: f64, ideal: f64) -> f64 {
    if achieved == ideal {
        1.0
    } else {
        achieved / ideal
    }
}

fn mean(xs: impl ExactSizeIterator<Item = u64>) -> f64 {
    let n = xs.len();
    if n == 0 {
        return 0.0;
    }
    xs.sum::<u64>() as f64 / n as f64
}

/// Reduced non-negative fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        let g = gcd(num, den).max(1);
        Self { num: num / g, den: den / g }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// `k·d²/n`.
pub fn efficiency_factor(code: &CssCode) -> Result<Ratio, MetricsError> {
    let d = code.distance.ok_or(MetricsError::MissingDistance)? as u64;
    if code.n() == 0 {
        return Err(MetricsError::ZeroQubits);
    }
    Ok(Ratio::new(code.k() as u64 * d * d, code.n() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::build_grid;
    use crate::code::{surface_code, tasks_from_code, Basis};
    use crate::compiler::{schedule_round, CompileOptions};
    use crate::gf2::BitMatrix;
    use crate::tsp::DEFAULT_EXACT_LIMIT;
    use alloc::string::ToString;
    use alloc::vec;

    fn task(targets: Vec<usize>, ordered: bool) -> CheckTask {
        CheckTask { ancilla: 0, basis: Basis::X, targets, ordered }
    }

    fn bound(t: CheckTask, cells: Vec<Cell>, home: Cell, conv: TourConvention) -> u64 {
        let data = DataLayout::new(cells).unwrap();
        ideal_lower_bound(&[t], &data, &[home], conv, DEFAULT_EXACT_LIMIT).unwrap().per_ancilla[0]
    }

    #[test]
    fn single_target() {
        let c = vec![Cell::new(2, 0)];
        assert_eq!(bound(task(vec![0], false), c.clone(), Cell::new(0, 0), TourConvention::Open), 2);
        assert_eq!(bound(task(vec![0], false), c, Cell::new(0, 0), TourConvention::Closed), 4);
    }

    #[test]
    fn square_corners() {
        let c = vec![Cell::new(0, 0), Cell::new(1, 0), Cell::new(0, 1), Cell::new(1, 1)];
        let home = Cell::new(0, 0);
        assert_eq!(bound(task(vec![0, 1, 2, 3], false), c.clone(), home, TourConvention::Open), 3);
        assert_eq!(bound(task(vec![0, 1, 2, 3], false), c.clone(), home, TourConvention::Closed), 4);
        // forced zig-zag: 0 + 1 + 2 + 1
        assert_eq!(bound(task(vec![0, 1, 2, 3], true), c, home, TourConvention::Open), 4);
    }

    #[test]
    fn limit_is_enforced() {
        let cells: Vec<Cell> = (0..5).map(|x| Cell::new(x, 0)).collect();
        let data = DataLayout::new(cells).unwrap();
        let r =
            ideal_lower_bound(&[task(vec![0, 1, 2, 3, 4], false)], &data, &[Cell::new(0, 0)], TourConvention::Open, 4);
        assert_eq!(r, Err(MetricsError::TooManyTargets { ancilla: 0, targets: 5, limit: 4 }));
    }

    #[test]
    fn surface_overhead_at_least_one() {
        for d in [3, 5] {
            let (code, data) = surface_code(d).unwrap();
            let data = data.normalized(1);
            let layout = build_grid(d + 2, d + 2).unwrap();
            let s = schedule_round(&code, &layout, &data, &CompileOptions::default()).unwrap();
            let homes: Vec<Cell> = s.ancillae.iter().map(|a| a.home).collect();
            let tasks = tasks_from_code(&code);
            let ideal = ideal_lower_bound(&tasks, &data, &homes, TourConvention::Closed, DEFAULT_EXACT_LIMIT).unwrap();
            let stats = shuttle_stats(&s).with_ideal(&ideal);
            for (a, &i) in stats.per_ancilla.iter().zip(&ideal.per_ancilla) {
                assert!(*a as u64 >= i);
            }
            assert!(stats.overhead.unwrap() >= 1.0);
            assert!(stats.mean <= stats.max as f64);
        }
    }

    #[test]
    fn overhead_geomean() {
        let stats = |m: f64| ShuttleStats { per_ancilla: vec![], mean: m, max: 0, makespan: 0, overhead: None };
        let ideal = |m: f64| IdealBound { convention: TourConvention::Closed, per_ancilla: vec![], mean: m };
        let one = overhead_report(&[("a".into(), stats(3.0), ideal(2.0))]);
        assert_eq!(one.geomean, 1.5);
        let r = overhead_report(&[
            ("a".into(), stats(2.0), ideal(1.0)),
            ("b".into(), stats(4.0), ideal(2.0)),
            ("z".into(), stats(0.0), ideal(0.0)),
        ]);
        assert!((r.geomean - libm::pow(4.0, 1.0 / 3.0)).abs() < 1e-12);
        assert_eq!(r.per_code[2].1, 1.0);
    }

    #[test]
    fn efficiency() {
        let (code, _) = surface_code(5).unwrap();
        assert_eq!(efficiency_factor(&code), Ok(Ratio::new(1, 1)));
        let mut anon =
            CssCode::new("rep", BitMatrix::zeros(0, 3), BitMatrix::from_dense(&[&[1, 1, 0], &[0, 1, 1]]), None)
                .unwrap();
        assert_eq!(efficiency_factor(&anon), Err(MetricsError::MissingDistance));
        anon.distance = Some(1);
        assert_eq!(efficiency_factor(&anon).unwrap().to_string(), "1/3");
    }
}
