//! Shortest tours over small target sets.
//!
//! Exact answers come from Held–Karp bitmask dynamic programming; above the
//! exact size limit a nearest-neighbour tour improved by 2-opt is returned
//! and flagged as inexact.

use alloc::vec;
use alloc::vec::Vec;

use crate::arch::Cell;

/// Largest target count solved exactly by default.
pub const DEFAULT_EXACT_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tour {
    /// Indices into the pending list, in visit order.
    pub order: Vec<usize>,
    /// Total distance including the leg from the origin (and back, when closed).
    pub length: u64,
    pub exact: bool,
}

/// Minimum-Manhattan open path from `origin` through every pending cell.
pub fn solve_tsp(origin: Cell, pending: &[Cell], exact_limit: usize) -> Tour {
    let m = pending.len();
    let mut pts = Vec::with_capacity(m + 1);
    pts.push(origin);
    pts.extend_from_slice(pending);
    let dist = DistanceMatrix::from_fn(m + 1, |a, b| pts[a].manhattan(pts[b]) as u64);
    solve(&dist, false, exact_limit)
}

/// Square distance matrix; node 0 is the origin.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<u64>,
}

impl DistanceMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> u64) -> Self {
        let mut d = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                d[a * n + b] = f(a, b);
            }
        }
        Self { n, d }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> u64 {
        self.d[a * self.n + b]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// Shortest tour from node 0 through nodes `1..n`; `closed` adds the return to node 0.
pub fn solve(dist: &DistanceMatrix, closed: bool, exact_limit: usize) -> Tour {
    let m = dist.len().saturating_sub(1);
    if m == 0 {
        return Tour { order: Vec::new(), length: 0, exact: true };
    }
    if m <= exact_limit {
        held_karp(dist, closed)
    } else {
        nearest_neighbor_2opt(dist, closed)
    }
}

fn held_karp(dist: &DistanceMatrix, closed: bool) -> Tour {
    let m = dist.len() - 1;
    let full = (1usize << m) - 1;
    const INF: u64 = u64::MAX / 4;
    // dp[mask * m + j]: shortest path from the origin covering `mask`, ending at target j
    let mut dp = vec![INF; (full + 1) * m];
    let mut parent = vec![usize::MAX; (full + 1) * m];
    for j in 0..m {
        dp[(1 << j) * m + j] = dist.get(0, j + 1);
    }
    for mask in 1..=full {
        for j in 0..m {
            let cur = dp[mask * m + j];
            if cur >= INF || mask >> j & 1 == 0 {
                continue;
            }
            let mut rest = full & !mask;
            while rest != 0 {
                let k = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let next = mask | 1 << k;
                let cand = cur + dist.get(j + 1, k + 1);
                if cand < dp[next * m + k] {
                    dp[next * m + k] = cand;
                    parent[next * m + k] = j;
                }
            }
        }
    }
    let (mut best, mut end) = (INF, 0);
    for j in 0..m {
        let total = dp[full * m + j] + if closed { dist.get(j + 1, 0) } else { 0 };
        if total < best {
            best = total;
            end = j;
        }
    }
    let mut order = Vec::with_capacity(m);
    let (mut mask, mut j) = (full, end);
    loop {
        order.push(j);
        let p = parent[mask * m + j];
        mask &= !(1 << j);
        if p == usize::MAX {
            break;
        }
        j = p;
    }
    order.reverse();
    Tour { order, length: best, exact: true }
}

fn tour_length(dist: &DistanceMatrix, order: &[usize], closed: bool) -> u64 {
    let mut prev = 0;
    let mut total = 0;
    for &t in order {
        total += dist.get(prev, t + 1);
        prev = t + 1;
    }
    if closed {
        total += dist.get(prev, 0);
    }
    total
}

fn nearest_neighbor_2opt(dist: &DistanceMatrix, closed: bool) -> Tour {
    let m = dist.len() - 1;
    let mut visited = vec![false; m];
    let mut order = Vec::with_capacity(m);
    let mut cur = 0;
    for _ in 0..m {
        let next = (0..m)
            .filter(|&j| !visited[j])
            .min_by_key(|&j| (dist.get(cur, j + 1), j))
            .expect("unvisited target remains");
        visited[next] = true;
        order.push(next);
        cur = next + 1;
    }
    let mut best = tour_length(dist, &order, closed);
    let mut improved = true;
    while improved {
        improved = false;
        for i in 0..m {
            for k in i + 1..m {
                order[i..=k].reverse();
                let len = tour_length(dist, &order, closed);
                if len < best {
                    best = len;
                    improved = true;
                } else {
                    order[i..=k].reverse();
                }
            }
        }
    }
    Tour { order, length: best, exact: false }
}

/// Precomputed shortest open paths over every subset of a fixed target
/// list: `cost(origin_dists, mask)` answers "shortest path from an origin
/// through all targets in `mask`" in `O(|mask|)`.
#[derive(Clone, Debug)]
pub struct SubsetPaths {
    m: usize,
    /// suffix[mask * m + j]: shortest path starting at j covering `mask` (j in mask).
    suffix: Vec<u32>,
}

impl SubsetPaths {
    /// `pair(a, b)` is the distance between targets `a` and `b`.
    pub fn new(m: usize, pair: impl Fn(usize, usize) -> u32) -> Self {
        let size = 1usize << m;
        let mut suffix = vec![u32::MAX; size * m];
        for j in 0..m {
            suffix[(1 << j) * m + j] = 0;
        }
        for mask in 1..size {
            if mask.count_ones() < 2 {
                continue;
            }
            let mut bits = mask;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let rest = mask & !(1 << j);
                let mut best = u32::MAX;
                let mut r = rest;
                while r != 0 {
                    let k = r.trailing_zeros() as usize;
                    r &= r - 1;
                    best = best.min(pair(j, k) + suffix[rest * m + k]);
                }
                suffix[mask * m + j] = best;
            }
        }
        Self { m, suffix }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// `origin(j)` is the distance from the origin to target `j`.
    pub fn cost(&self, mask: usize, origin: impl Fn(usize) -> u32) -> u32 {
        if mask == 0 {
            return 0;
        }
        let mut best = u32::MAX;
        let mut bits = mask;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            best = best.min(origin(j) + self.suffix[mask * self.m + j]);
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn permutations(items: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == items.len() {
            f(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            permutations(items, k + 1, f);
            items.swap(k, i);
        }
    }

    fn brute(origin: Cell, pending: &[Cell], closed: bool) -> u64 {
        let mut idx: Vec<usize> = (0..pending.len()).collect();
        let mut best = u64::MAX;
        permutations(&mut idx, 0, &mut |p| {
            let mut cur = origin;
            let mut len = 0u64;
            for &i in p {
                len += cur.manhattan(pending[i]) as u64;
                cur = pending[i];
            }
            if closed {
                len += cur.manhattan(origin) as u64;
            }
            best = best.min(len);
        });
        best
    }

    #[test]
    fn trivial_cases() {
        let t = solve_tsp(Cell::new(0, 0), &[], DEFAULT_EXACT_LIMIT);
        assert_eq!((t.order.len(), t.length), (0, 0));
        let t = solve_tsp(Cell::new(0, 0), &[Cell::new(0, 2), Cell::new(0, 1)], DEFAULT_EXACT_LIMIT);
        assert_eq!(t.order, [1, 0]);
        assert_eq!(t.length, 2);
    }

    #[test]
    fn matches_brute_force_on_seven_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let origin = Cell::new(rng.gen_range(0..6), rng.gen_range(0..6));
            let pending: Vec<Cell> = (0..7).map(|_| Cell::new(rng.gen_range(0..6), rng.gen_range(0..6))).collect();
            let t = solve_tsp(origin, &pending, DEFAULT_EXACT_LIMIT);
            assert_eq!(t.length, brute(origin, &pending, false));
            let mut sorted = t.order.clone();
            sorted.sort();
            assert_eq!(sorted, (0..7).collect::<Vec<_>>());

            let mut pts = vec![origin];
            pts.extend(&pending);
            let dist = DistanceMatrix::from_fn(8, |a, b| pts[a].manhattan(pts[b]) as u64);
            assert_eq!(solve(&dist, true, DEFAULT_EXACT_LIMIT).length, brute(origin, &pending, true));
        }
    }

    #[test]
    fn heuristic_fallback_is_flagged_and_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pending: Vec<Cell> = (0..8).map(|_| Cell::new(rng.gen_range(0..10), rng.gen_range(0..10))).collect();
        let approx = solve_tsp(Cell::new(0, 0), &pending, 4);
        let exact = solve_tsp(Cell::new(0, 0), &pending, DEFAULT_EXACT_LIMIT);
        assert!(!approx.exact && exact.exact);
        assert!(approx.length >= exact.length);
        let mut cur = Cell::new(0, 0);
        let mut len = 0;
        for &i in &approx.order {
            len += cur.manhattan(pending[i]) as u64;
            cur = pending[i];
        }
        assert_eq!(len, approx.length);
    }

    #[test]
    fn subset_paths_agree_with_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let targets: Vec<Cell> = (0..6).map(|_| Cell::new(rng.gen_range(0..5), rng.gen_range(0..5))).collect();
        let table = SubsetPaths::new(6, |a, b| targets[a].manhattan(targets[b]));
        for _ in 0..50 {
            let origin = Cell::new(rng.gen_range(0..5), rng.gen_range(0..5));
            let mask: usize = rng.gen_range(0..64);
            let sub: Vec<Cell> = (0..6).filter(|j| mask >> j & 1 == 1).map(|j| targets[j]).collect();
            let expect = solve_tsp(origin, &sub, DEFAULT_EXACT_LIMIT).length as u32;
            assert_eq!(table.cost(mask, |j| origin.manhattan(targets[j])), expect);
        }
    }
}
