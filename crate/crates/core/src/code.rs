//! CSS codes, data-qubit placement and per-ancilla check tasks.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::arch::{Cell, ChipLayout};
use crate::error::CodeError;
use crate::gf2::{BitMatrix, BitVec, SpanBasis};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Basis {
    X,
    Z,
}

impl Basis {
    pub fn letter(self) -> char {
        match self {
            Basis::X => 'X',
            Basis::Z => 'Z',
        }
    }
}

/// A CSS code given by its X and Z parity-check matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssCode {
    pub name: String,
    hx: BitMatrix,
    hz: BitMatrix,
    k: usize,
    /// Claimed distance; never recomputed.
    pub distance: Option<u32>,
    /// Optional target visit order per check, X rows first.
    orders: Vec<Option<Vec<usize>>>,
}

impl CssCode {
    /// Validates commutation and computes `k = n - rank(Hx) - rank(Hz)`.
    pub fn new(
        name: impl Into<String>,
        hx: BitMatrix,
        hz: BitMatrix,
        distance: Option<u32>,
    ) -> Result<Self, CodeError> {
        if hx.num_cols() != hz.num_cols() {
            return Err(CodeError::ColumnMismatch { hx: hx.num_cols(), hz: hz.num_cols() });
        }
        for (i, x) in hx.rows().iter().enumerate() {
            for (j, z) in hz.rows().iter().enumerate() {
                if x.dot(z) {
                    return Err(CodeError::Anticommuting { x_row: i, z_row: j });
                }
            }
        }
        for (row, r) in hx.rows().iter().chain(hz.rows()).enumerate() {
            if r.is_zero() {
                return Err(CodeError::EmptyCheck { row });
            }
        }
        let n = hx.num_cols();
        let k = n - hx.rank() - hz.rank();
        let checks = hx.num_rows() + hz.num_rows();
        Ok(Self { name: name.into(), hx, hz, k, distance, orders: vec![None; checks] })
    }

    /// Fixes the visit order of check `row` (X rows first, then Z rows).
    pub fn with_order(mut self, row: usize, order: Vec<usize>) -> Result<Self, CodeError> {
        let support = self.check(row).support();
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted != support {
            return Err(CodeError::BadOrder { row });
        }
        self.orders[row] = Some(order);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.hx.num_cols()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn hx(&self) -> &BitMatrix {
        &self.hx
    }

    pub fn hz(&self) -> &BitMatrix {
        &self.hz
    }

    pub fn num_checks(&self) -> usize {
        self.hx.num_rows() + self.hz.num_rows()
    }

    /// Row `row` of the stacked `[Hx; Hz]`.
    pub fn check(&self, row: usize) -> &BitVec {
        if row < self.hx.num_rows() {
            self.hx.row(row)
        } else {
            self.hz.row(row - self.hx.num_rows())
        }
    }

    pub fn check_basis(&self, row: usize) -> Basis {
        if row < self.hx.num_rows() {
            Basis::X
        } else {
            Basis::Z
        }
    }

    pub fn order(&self, row: usize) -> Option<&[usize]> {
        self.orders[row].as_deref()
    }

    pub fn check_weight(&self) -> usize {
        self.hx.max_row_weight().max(self.hz.max_row_weight())
    }
}

/// Injective placement of data qubits on cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataLayout {
    cells: Vec<Cell>,
}

impl DataLayout {
    pub fn new(cells: Vec<Cell>) -> Result<Self, CodeError> {
        let mut idx: Vec<usize> = (0..cells.len()).collect();
        idx.sort_by_key(|&i| (cells[i].y, cells[i].x));
        for w in idx.windows(2) {
            if cells[w[0]] == cells[w[1]] {
                let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(CodeError::LayoutNotInjective { a, b, cell: cells[a] });
            }
        }
        Ok(Self { cells })
    }

    /// Row-major square placement: qubit `i` at `(i mod s, i div s)`
    /// with `s = ⌈√n⌉`.
    pub fn row_major(n: usize) -> Self {
        let side = ceil_sqrt(n) as usize;
        let cells = (0..n).map(|i| Cell::new((i % side.max(1)) as u32, (i / side.max(1)) as u32)).collect();
        Self { cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell(&self, qubit: usize) -> Cell {
        self.cells[qubit]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// `(min_x, min_y, max_x, max_y)`, or `None` for an empty layout.
    pub fn bounding_box(&self) -> Option<(u32, u32, u32, u32)> {
        let first = self.cells.first()?;
        let mut b = (first.x, first.y, first.x, first.y);
        for c in &self.cells {
            b = (b.0.min(c.x), b.1.min(c.y), b.2.max(c.x), b.3.max(c.y));
        }
        Some(b)
    }

    /// Moves the bounding box to start at `(margin, margin)`.
    pub fn normalized(&self, margin: u32) -> Self {
        let Some((x0, y0, _, _)) = self.bounding_box() else {
            return self.clone();
        };
        let cells = self.cells.iter().map(|c| Cell::new(c.x - x0 + margin, c.y - y0 + margin)).collect();
        Self { cells }
    }

    pub fn check_fits(&self, layout: &ChipLayout) -> Result<(), CodeError> {
        for (qubit, &cell) in self.cells.iter().enumerate() {
            if !layout.contains(cell) {
                return Err(CodeError::LayoutOutOfBounds { qubit, cell });
            }
        }
        Ok(())
    }
}

pub(crate) fn ceil_sqrt(n: usize) -> u32 {
    let mut s = libm::sqrt(n as f64) as u64;
    while s * s > n as u64 {
        s -= 1;
    }
    while s * s < n as u64 {
        s += 1;
    }
    s as u32
}

/// Row-major placement on `layout`, which must fit a `⌈√n⌉ × ⌈√n⌉` block.
pub fn default_layout(code: &CssCode, layout: &ChipLayout) -> Result<DataLayout, CodeError> {
    let side = ceil_sqrt(code.n());
    if layout.width() < side || layout.height() < side {
        return Err(CodeError::LayoutTooSmall { side, width: layout.width(), height: layout.height() });
    }
    Ok(DataLayout::row_major(code.n()))
}

/// One ancilla's job: couple to each target once per round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckTask {
    pub ancilla: usize,
    pub basis: Basis,
    /// Data-qubit indices, in visit order when `ordered`.
    pub targets: Vec<usize>,
    pub ordered: bool,
}

/// One task per check row: X rows first, ancilla id = stacked row index.
pub fn tasks_from_code(code: &CssCode) -> Vec<CheckTask> {
    (0..code.num_checks())
        .map(|row| {
            let (targets, ordered) = match code.order(row) {
                Some(o) => (o.to_vec(), true),
                None => (code.check(row).support(), false),
            };
            CheckTask { ancilla: row, basis: code.check_basis(row), targets, ordered }
        })
        .collect()
}

/// `k` paired logical operators: `x[i]·z[j] = δ_ij`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalOperators {
    /// X-type supports; commute with every Z check.
    pub x: Vec<BitVec>,
    /// Z-type supports; commute with every X check.
    pub z: Vec<BitVec>,
}

impl LogicalOperators {
    pub fn k(&self) -> usize {
        self.x.len()
    }

    pub fn of_basis(&self, basis: Basis) -> &[BitVec] {
        match basis {
            Basis::X => &self.x,
            Basis::Z => &self.z,
        }
    }
}

/// Coset representatives of `ker(checks) / rowspace(stabilizers)`.
fn logical_candidates(checks: &BitMatrix, stabilizers: &BitMatrix) -> Vec<BitVec> {
    let mut span = SpanBasis::from_matrix(stabilizers);
    let mut out = Vec::new();
    for v in checks.nullspace() {
        if span.insert(v.clone()) {
            out.push(v);
        }
    }
    out
}

pub fn compute_logicals(code: &CssCode) -> LogicalOperators {
    let x = logical_candidates(code.hz(), code.hx());
    let z = logical_candidates(code.hx(), code.hz());
    debug_assert_eq!(x.len(), code.k());
    debug_assert_eq!(z.len(), code.k());
    if x.is_empty() {
        return LogicalOperators { x, z };
    }
    let xm = BitMatrix::from_rows(code.n(), x.clone());
    let zm = BitMatrix::from_rows(code.n(), z.clone());
    let gram = xm.mul_transpose(&zm);
    let inv = gram.inverse().expect("logical pairing matrix is nonsingular for a valid CSS code");
    let paired = (0..z.len())
        .map(|j| {
            let mut v = BitVec::zeros(code.n());
            for (l, zl) in z.iter().enumerate() {
                if inv.get(l, j) {
                    v.xor_assign(zl);
                }
            }
            v
        })
        .collect();
    LogicalOperators { x, z: paired }
}

/// Rotated surface code `[[d², 1, d]]` on a `d × d` data block.
///
/// X checks sit on the top/bottom boundaries, Z checks on the left/right.
/// Both visit their plaquette cyclically so that the last two targets form
/// a pair perpendicular to the same-type logical operator (X hooks are
/// horizontal, Z hooks vertical).
pub fn surface_code(d: u32) -> Result<(CssCode, DataLayout), CodeError> {
    if d < 3 {
        return Err(CodeError::DistanceTooSmall(d));
    }
    if d.is_multiple_of(2) {
        return Err(CodeError::EvenDistance(d));
    }
    let n = (d * d) as usize;
    let di = d as i32;
    let qubit = |x: i32, y: i32| -> Option<usize> {
        (0..di).contains(&x).then_some(())?;
        (0..di).contains(&y).then_some(())?;
        Some((y * di + x) as usize)
    };
    let mut x_checks = Vec::new();
    let mut z_checks = Vec::new();
    for py in -1..di {
        for px in -1..di {
            let is_x = (px + py).rem_euclid(2) == 0;
            let interior_x = (0..di - 1).contains(&px);
            let interior_y = (0..di - 1).contains(&py);
            let keep = match (interior_x, interior_y) {
                (true, true) => true,
                (true, false) => is_x,
                (false, true) => !is_x,
                (false, false) => false,
            };
            if !keep {
                continue;
            }
            let corners = if is_x {
                [(px, py), (px + 1, py), (px + 1, py + 1), (px, py + 1)]
            } else {
                [(px, py), (px, py + 1), (px + 1, py + 1), (px + 1, py)]
            };
            let order: Vec<usize> = corners.iter().filter_map(|&(x, y)| qubit(x, y)).collect();
            if is_x {
                x_checks.push(order);
            } else {
                z_checks.push(order);
            }
        }
    }
    let to_matrix =
        |checks: &[Vec<usize>]| BitMatrix::from_rows(n, checks.iter().map(|c| BitVec::from_support(n, c)).collect());
    let mut code = CssCode::new(format!("surface-d{d}"), to_matrix(&x_checks), to_matrix(&z_checks), Some(d))?;
    for (row, order) in x_checks.into_iter().chain(z_checks).enumerate() {
        code = code.with_order(row, order)?;
    }
    let layout = DataLayout::new((0..n).map(|i| Cell::new(i as u32 % d, i as u32 / d)).collect())?;
    Ok((code, layout))
}

/// Hypergraph product of two classical parity-check matrices:
/// `Hx = [H1 ⊗ I | I ⊗ H2ᵀ]`, `Hz = [I ⊗ H2 | H1ᵀ ⊗ I]`.
pub fn hypergraph_product(name: impl Into<String>, h1: &BitMatrix, h2: &BitMatrix) -> Result<CssCode, CodeError> {
    let (r1, n1) = (h1.num_rows(), h1.num_cols());
    let (r2, n2) = (h2.num_rows(), h2.num_cols());
    let left = n1 * n2;
    let n = left + r1 * r2;
    let mut hx = BitMatrix::zeros(r1 * n2, n);
    for i in 0..r1 {
        for b in 0..n2 {
            let row = i * n2 + b;
            for a in h1.row(i).ones() {
                hx.set(row, a * n2 + b, true);
            }
            for j in 0..r2 {
                if h2.get(j, b) {
                    hx.set(row, left + i * r2 + j, true);
                }
            }
        }
    }
    let mut hz = BitMatrix::zeros(n1 * r2, n);
    for a in 0..n1 {
        for j in 0..r2 {
            let row = a * r2 + j;
            for b in h2.row(j).ones() {
                hz.set(row, a * n2 + b, true);
            }
            for i in 0..r1 {
                if h1.get(i, a) {
                    hz.set(row, left + i * r2 + j, true);
                }
            }
        }
    }
    CssCode::new(name, hx, hz, None)
}

/// Short human-readable summary, e.g. `[[9,1,3]]`.
pub fn parameters(code: &CssCode) -> String {
    match code.distance {
        Some(d) => format!("[[{},{},{}]]", code.n(), code.k(), d),
        None => format!("[[{},{},?]]", code.n(), code.k()),
    }
}

impl core::fmt::Display for CssCode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{} {}", self.name, parameters(self))
    }
}
