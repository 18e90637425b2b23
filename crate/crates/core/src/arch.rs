//! Tiled unit-cell chip model.
//!
//! Every unit cell owns one intersection, one interaction zone and one
//! readout zone. Intersections of neighbouring cells are joined by shuttle
//! channels. Inside a cell the intersection is the hub: a qubit displaces
//! between the intersection and either zone, never directly between the two
//! zones.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::ArchError;

/// Time in integer nanoseconds.
pub type Time = u64;

/// Open end of an unbounded interval.
pub const FOREVER: Time = Time::MAX;

/// Unit-cell coordinate, `x` to the right and `y` upwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Cell {
    pub x: u32,
    pub y: u32,
}

impl Cell {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    pub fn manhattan(self, other: Cell) -> u32 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ComponentKind {
    Intersection,
    Channel,
    Interaction,
    Readout,
}

impl ComponentKind {
    /// Layers a qubit can rest in at a single cell.
    pub const CELL_LAYERS: [ComponentKind; 3] =
        [ComponentKind::Intersection, ComponentKind::Interaction, ComponentKind::Readout];
}

/// Dense index into a [`ChipLayout`]'s component registry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComponentId(pub u32);

impl ComponentId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Component {
    pub kind: ComponentKind,
    /// Owning cell; for channels, the first endpoint of the ordered pair.
    pub cell: Cell,
    /// Second endpoint for channels.
    pub other: Option<Cell>,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y) = (self.cell.x, self.cell.y);
        match (self.kind, self.other) {
            (ComponentKind::Intersection, _) => write!(f, "isec({x},{y})"),
            (ComponentKind::Interaction, _) => write!(f, "zone({x},{y})"),
            (ComponentKind::Readout, _) => write!(f, "ro({x},{y})"),
            (ComponentKind::Channel, Some(o)) => write!(f, "ch({x},{y};{},{})", o.x, o.y),
            (ComponentKind::Channel, None) => write!(f, "ch({x},{y})"),
        }
    }
}

/// Cell connectivity of a tiling. The square grid is the only tiling built
/// in; other tilings (e.g. hexagonal) plug in here.
pub trait Tiling {
    /// Neighbouring cells joined to `cell` by a shuttle channel.
    fn neighbors(&self, cell: Cell, width: u32, height: u32) -> Vec<Cell>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SquareTiling;

impl Tiling for SquareTiling {
    fn neighbors(&self, cell: Cell, width: u32, height: u32) -> Vec<Cell> {
        let mut out = Vec::with_capacity(4);
        if cell.x > 0 {
            out.push(Cell::new(cell.x - 1, cell.y));
        }
        if cell.x + 1 < width {
            out.push(Cell::new(cell.x + 1, cell.y));
        }
        if cell.y > 0 {
            out.push(Cell::new(cell.x, cell.y - 1));
        }
        if cell.y + 1 < height {
            out.push(Cell::new(cell.x, cell.y + 1));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Metric {
    Manhattan,
    /// All-pairs hop counts, row-major over cell indices.
    Table(Vec<u32>),
}

/// The chip: a `width × height` array of unit cells plus channels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChipLayout {
    width: u32,
    height: u32,
    components: Vec<Component>,
    adjacency: Vec<Vec<ComponentId>>,
    /// Per intersection: `(channel, neighbouring intersection)`.
    links: Vec<Vec<(ComponentId, ComponentId)>>,
    metric: Metric,
}

/// A rectangular grid of `width × height` cells with channels between
/// horizontally and vertically adjacent intersections.
pub fn build_grid(width: u32, height: u32) -> Result<ChipLayout, ArchError> {
    let mut layout = ChipLayout::from_tiling(width, height, &SquareTiling)?;
    layout.metric = Metric::Manhattan;
    Ok(layout)
}

impl ChipLayout {
    /// Builds a layout from an arbitrary tiling. Distances are BFS hop
    /// counts over the channel graph.
    pub fn from_tiling<T: Tiling>(width: u32, height: u32, tiling: &T) -> Result<Self, ArchError> {
        if width == 0 || height == 0 {
            return Err(ArchError::EmptyGrid { width, height });
        }
        let cells = (width * height) as usize;
        let mut components = Vec::with_capacity(cells * 5);
        for y in 0..height {
            for x in 0..width {
                let cell = Cell::new(x, y);
                for kind in ComponentKind::CELL_LAYERS {
                    components.push(Component { kind, cell, other: None });
                }
            }
        }
        let mut links = vec![Vec::new(); cells * 3];
        for y in 0..height {
            for x in 0..width {
                let a = Cell::new(x, y);
                for b in tiling.neighbors(a, width, height) {
                    // one channel per unordered pair, keyed by the ordered pair
                    if (b.y, b.x) <= (a.y, a.x) {
                        continue;
                    }
                    let ch = ComponentId(components.len() as u32);
                    components.push(Component { kind: ComponentKind::Channel, cell: a, other: Some(b) });
                    let ia = intersection_index(a, width);
                    let ib = intersection_index(b, width);
                    links[ia.index()].push((ch, ib));
                    links[ib.index()].push((ch, ia));
                }
            }
        }
        links.resize(components.len(), Vec::new());
        for l in links.iter_mut() {
            l.sort();
        }

        let mut adjacency = vec![Vec::new(); components.len()];
        for c in 0..cells {
            let isec = ComponentId((3 * c) as u32);
            for zone in [ComponentId((3 * c + 1) as u32), ComponentId((3 * c + 2) as u32)] {
                adjacency[isec.index()].push(zone);
                adjacency[zone.index()].push(isec);
            }
            for &(ch, _) in &links[isec.index()] {
                adjacency[isec.index()].push(ch);
                adjacency[ch.index()].push(isec);
            }
        }
        for a in adjacency.iter_mut() {
            a.sort();
            a.dedup();
        }

        let mut layout = Self { width, height, components, adjacency, links, metric: Metric::Manhattan };
        layout.metric = Metric::Table(layout.bfs_table());
        Ok(layout)
    }

    fn bfs_table(&self) -> Vec<u32> {
        let cells = self.cell_count();
        let mut table = vec![u32::MAX; cells * cells];
        let mut queue = alloc::collections::VecDeque::new();
        for src in 0..cells {
            let row = &mut table[src * cells..(src + 1) * cells];
            row[src] = 0;
            queue.clear();
            queue.push_back(src);
            while let Some(c) = queue.pop_front() {
                let isec = ComponentId((3 * c) as u32);
                for &(_, nb) in &self.links[isec.index()] {
                    let n = nb.index() / 3;
                    if row[n] == u32::MAX {
                        row[n] = row[c] + 1;
                        queue.push_back(n);
                    }
                }
            }
        }
        table
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn cell_count(&self) -> usize {
        (self.width * self.height) as usize
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.x < self.width && cell.y < self.height
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.height).flat_map(move |y| (0..self.width).map(move |x| Cell::new(x, y)))
    }

    pub fn component(&self, id: ComponentId) -> &Component {
        &self.components[id.index()]
    }

    pub fn get(&self, id: ComponentId) -> Option<&Component> {
        self.components.get(id.index())
    }

    pub fn components(&self) -> impl Iterator<Item = (ComponentId, &Component)> {
        self.components.iter().enumerate().map(|(i, c)| (ComponentId(i as u32), c))
    }

    pub fn channel_count(&self) -> usize {
        self.components.len() - 3 * self.cell_count()
    }

    /// Component of `kind` at `cell`. Channels are looked up with [`Self::channel_between`].
    pub fn at(&self, cell: Cell, kind: ComponentKind) -> Option<ComponentId> {
        if !self.contains(cell) {
            return None;
        }
        let base = 3 * (cell.y * self.width + cell.x);
        match kind {
            ComponentKind::Intersection => Some(ComponentId(base)),
            ComponentKind::Interaction => Some(ComponentId(base + 1)),
            ComponentKind::Readout => Some(ComponentId(base + 2)),
            ComponentKind::Channel => None,
        }
    }

    pub fn intersection(&self, cell: Cell) -> ComponentId {
        intersection_index(cell, self.width)
    }

    pub fn interaction(&self, cell: Cell) -> ComponentId {
        ComponentId(intersection_index(cell, self.width).0 + 1)
    }

    pub fn readout(&self, cell: Cell) -> ComponentId {
        ComponentId(intersection_index(cell, self.width).0 + 2)
    }

    pub fn channel_between(&self, a: Cell, b: Cell) -> Option<ComponentId> {
        if !self.contains(a) || !self.contains(b) {
            return None;
        }
        let ib = self.intersection(b);
        self.links[self.intersection(a).index()].iter().find(|&&(_, n)| n == ib).map(|&(ch, _)| ch)
    }

    /// All components adjacent to `id`. Symmetric.
    pub fn neighbors(&self, id: ComponentId) -> &[ComponentId] {
        &self.adjacency[id.index()]
    }

    /// `(channel, destination intersection)` pairs reachable from an intersection.
    pub fn shuttle_links(&self, intersection: ComponentId) -> &[(ComponentId, ComponentId)] {
        &self.links[intersection.index()]
    }

    /// Shortest channel-path length between two cells.
    pub fn grid_distance(&self, a: Cell, b: Cell) -> Result<u32, ArchError> {
        for c in [a, b] {
            if !self.contains(c) {
                return Err(ArchError::OutOfBounds { cell: c, width: self.width, height: self.height });
            }
        }
        Ok(self.distance_unchecked(a, b))
    }

    /// [`Self::grid_distance`] for cells already known to be on the chip.
    pub fn distance_unchecked(&self, a: Cell, b: Cell) -> u32 {
        match &self.metric {
            Metric::Manhattan => a.manhattan(b),
            Metric::Table(t) => {
                let n = self.cell_count();
                let ia = (a.y * self.width + a.x) as usize;
                let ib = (b.y * self.width + b.x) as usize;
                t[ia * n + ib]
            }
        }
    }
}

fn intersection_index(cell: Cell, width: u32) -> ComponentId {
    ComponentId(3 * (cell.y * width + cell.x))
}

/// Operation durations in nanoseconds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimingConfig {
    pub t_cx: Time,
    pub t_h: Time,
    pub t_init: Time,
    pub t_meas: Time,
    /// Per unit edge.
    pub t_shuttle: Time,
    pub t_displace: Time,
}

impl Default for TimingConfig {
    fn default() -> Self {
        Self { t_cx: 100, t_h: 100, t_init: 500, t_meas: 500, t_shuttle: 1000, t_displace: 200 }
    }
}

impl TimingConfig {
    pub fn validate(&self) -> Result<(), ArchError> {
        for (name, v) in self.named() {
            if v == 0 {
                return Err(ArchError::NonPositiveDuration(name));
            }
        }
        Ok(())
    }

    fn named(&self) -> [(&'static str, Time); 6] {
        [
            ("t_cx", self.t_cx),
            ("t_h", self.t_h),
            ("t_init", self.t_init),
            ("t_meas", self.t_meas),
            ("t_shuttle", self.t_shuttle),
            ("t_displace", self.t_displace),
        ]
    }

    /// Greatest common divisor of all durations. Every arrival holds its
    /// component for at least this long, so two qubits can never pass
    /// through the same intersection at the same instant.
    pub fn quantum(&self) -> Time {
        self.named().iter().fold(0, |g, &(_, v)| gcd(g, v)).max(1)
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Error rates per operation. Idle decoherence uses `t1_ns`/`t2_ns`;
/// an infinite value disables that idle channel.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoiseConfig {
    pub p_cx: f64,
    pub p_h: f64,
    pub p_init: f64,
    pub p_meas: f64,
    /// Phase-flip probability per unit edge.
    pub p_shuttle: f64,
    pub p_displace: f64,
    pub t1_ns: f64,
    pub t2_ns: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            p_cx: 1e-3,
            p_h: 1e-3,
            p_init: 1e-3,
            p_meas: 1e-3,
            p_shuttle: 1e-3,
            p_displace: 1e-3,
            t1_ns: 10e9,
            t2_ns: 10e6,
        }
    }
}

impl NoiseConfig {
    /// All probabilities zero, idle channels disabled.
    pub fn noiseless() -> Self {
        Self {
            p_cx: 0.0,
            p_h: 0.0,
            p_init: 0.0,
            p_meas: 0.0,
            p_shuttle: 0.0,
            p_displace: 0.0,
            t1_ns: f64::INFINITY,
            t2_ns: f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<(), ArchError> {
        let probs = [
            ("p_cx", self.p_cx),
            ("p_h", self.p_h),
            ("p_init", self.p_init),
            ("p_meas", self.p_meas),
            ("p_shuttle", self.p_shuttle),
            ("p_displace", self.p_displace),
        ];
        for (name, p) in probs {
            if !(0.0..=0.75).contains(&p) {
                return Err(ArchError::ProbabilityOutOfRange(name, p));
            }
        }
        for (name, t) in [("t1_ns", self.t1_ns), ("t2_ns", self.t2_ns)] {
            if t.is_nan() || t <= 0.0 {
                return Err(ArchError::NonPositiveCoherence(name, t));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::VecDeque;

    #[test]
    fn single_cell() {
        let l = build_grid(1, 1).unwrap();
        assert_eq!(l.cell_count(), 1);
        assert_eq!(l.channel_count(), 0);
        let kinds: Vec<_> = l.components().map(|(_, c)| c.kind).collect();
        assert_eq!(kinds, [ComponentKind::Intersection, ComponentKind::Interaction, ComponentKind::Readout]);
    }

    #[test]
    fn channel_counts() {
        assert_eq!(build_grid(2, 2).unwrap().channel_count(), 4);
        // explicit enumeration of adjacent pairs against 2wh - w - h
        for (w, h) in [(3u32, 3u32), (1, 5), (4, 2), (7, 3)] {
            let mut pairs = 0;
            for y in 0..h {
                for x in 0..w {
                    if x + 1 < w {
                        pairs += 1;
                    }
                    if y + 1 < h {
                        pairs += 1;
                    }
                }
            }
            let l = build_grid(w, h).unwrap();
            assert_eq!(l.channel_count(), pairs);
            assert_eq!(pairs as u32, 2 * w * h - w - h);
        }
        assert_eq!(build_grid(3, 3).unwrap().channel_count(), 12);
    }

    #[test]
    fn zero_sized_grid_rejected() {
        assert!(build_grid(0, 3).is_err());
    }

    #[test]
    fn degrees_and_symmetry() {
        let l = build_grid(4, 3).unwrap();
        for cell in l.cells() {
            let deg = l.shuttle_links(l.intersection(cell)).len();
            let border = (cell.x == 0 || cell.x == 3) as usize + (cell.y == 0 || cell.y == 2) as usize;
            assert_eq!(deg, 4 - border);
        }
        for (id, _) in l.components() {
            for &n in l.neighbors(id) {
                assert!(l.neighbors(n).contains(&id));
            }
        }
        for (_, c) in l.components() {
            if c.kind == ComponentKind::Channel {
                assert_eq!(c.cell.manhattan(c.other.unwrap()), 1);
            }
        }
    }

    #[test]
    fn zones_hang_off_the_intersection_only() {
        let l = build_grid(2, 2).unwrap();
        let c = Cell::new(1, 0);
        assert_eq!(l.neighbors(l.interaction(c)), &[l.intersection(c)]);
        assert_eq!(l.neighbors(l.readout(c)), &[l.intersection(c)]);
    }

    #[test]
    fn distance_examples() {
        let l = build_grid(4, 4).unwrap();
        assert_eq!(l.grid_distance(Cell::new(0, 0), Cell::new(0, 0)).unwrap(), 0);
        assert_eq!(l.grid_distance(Cell::new(0, 0), Cell::new(2, 3)).unwrap(), 5);
        assert!(l.grid_distance(Cell::new(0, 0), Cell::new(4, 0)).is_err());
    }

    fn bfs(l: &ChipLayout, a: Cell, b: Cell) -> u32 {
        let mut dist = vec![u32::MAX; l.component_count()];
        let mut q = VecDeque::new();
        let s = l.intersection(a);
        dist[s.index()] = 0;
        q.push_back(s);
        while let Some(c) = q.pop_front() {
            for &(_, n) in l.shuttle_links(c) {
                if dist[n.index()] == u32::MAX {
                    dist[n.index()] = dist[c.index()] + 1;
                    q.push_back(n);
                }
            }
        }
        dist[l.intersection(b).index()]
    }

    #[test]
    fn manhattan_matches_bfs_and_tiling_table() {
        let l = build_grid(5, 4).unwrap();
        let t = ChipLayout::from_tiling(5, 4, &SquareTiling).unwrap();
        for a in l.cells() {
            for b in l.cells() {
                let d = l.grid_distance(a, b).unwrap();
                assert_eq!(d, bfs(&l, a, b));
                assert_eq!(d, t.grid_distance(a, b).unwrap());
            }
        }
    }

    #[test]
    fn default_durations() {
        let t = TimingConfig::default();
        t.validate().unwrap();
        assert_eq!(t.quantum(), 100);
        assert!(TimingConfig { t_h: 0, ..t }.validate().is_err());
        NoiseConfig::default().validate().unwrap();
        NoiseConfig::noiseless().validate().unwrap();
        assert!(NoiseConfig { p_cx: 0.8, ..Default::default() }.validate().is_err());
        assert!(NoiseConfig { t2_ns: 0.0, ..Default::default() }.validate().is_err());
    }
}
