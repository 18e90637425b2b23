use core::fmt;

use crate::arch::{Cell, ComponentId, Time};
use crate::sipp::TimeInterval;

#[derive(Clone, Debug, PartialEq)]
pub enum ArchError {
    EmptyGrid { width: u32, height: u32 },
    OutOfBounds { cell: Cell, width: u32, height: u32 },
    NonPositiveDuration(&'static str),
    ProbabilityOutOfRange(&'static str, f64),
    NonPositiveCoherence(&'static str, f64),
}

impl fmt::Display for ArchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptyGrid { width, height } => write!(f, "grid must be at least 1x1, got {width}x{height}"),
            Self::OutOfBounds { cell, width, height } => {
                write!(f, "cell {cell} outside {width}x{height} layout")
            }
            Self::NonPositiveDuration(name) => write!(f, "duration {name} must be positive"),
            Self::ProbabilityOutOfRange(name, p) => write!(f, "{name}={p} outside [0, 0.75]"),
            Self::NonPositiveCoherence(name, t) => write!(f, "{name}={t} must be positive"),
        }
    }
}

impl core::error::Error for ArchError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodeError {
    ColumnMismatch {
        hx: usize,
        hz: usize,
    },
    NonBinary,
    /// X row `x_row` and Z row `z_row` overlap on an odd number of qubits.
    Anticommuting {
        x_row: usize,
        z_row: usize,
    },
    LogicalCountMismatch {
        declared: usize,
        computed: usize,
    },
    EvenDistance(u32),
    DistanceTooSmall(u32),
    LayoutSize {
        expected: usize,
        got: usize,
    },
    LayoutNotInjective {
        a: usize,
        b: usize,
        cell: Cell,
    },
    LayoutTooSmall {
        side: u32,
        width: u32,
        height: u32,
    },
    LayoutOutOfBounds {
        qubit: usize,
        cell: Cell,
    },
    EmptyCheck {
        row: usize,
    },
    BadOrder {
        row: usize,
    },
}

impl fmt::Display for CodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ColumnMismatch { hx, hz } => write!(f, "Hx has {hx} columns but Hz has {hz}"),
            Self::NonBinary => write!(f, "check matrices must be binary"),
            Self::Anticommuting { x_row, z_row } => {
                write!(f, "X check {x_row} and Z check {z_row} anticommute (odd overlap)")
            }
            Self::LogicalCountMismatch { declared, computed } => {
                write!(f, "declared k={declared} but n - rank(Hx) - rank(Hz) = {computed}")
            }
            Self::EvenDistance(d) => write!(f, "surface code distance must be odd, got {d}"),
            Self::DistanceTooSmall(d) => write!(f, "surface code distance must be >= 3, got {d}"),
            Self::LayoutSize { expected, got } => write!(f, "layout lists {got} qubits, code has {expected}"),
            Self::LayoutNotInjective { a, b, cell } => {
                write!(f, "data qubits {a} and {b} both placed at {cell}")
            }
            Self::LayoutTooSmall { side, width, height } => {
                write!(f, "{width}x{height} layout cannot hold a {side}x{side} data block")
            }
            Self::LayoutOutOfBounds { qubit, cell } => write!(f, "data qubit {qubit} placed off-chip at {cell}"),
            Self::EmptyCheck { row } => write!(f, "check row {row} has no support"),
            Self::BadOrder { row } => write!(f, "visit order for check {row} is not a permutation of its support"),
        }
    }
}

impl core::error::Error for CodeError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SippError {
    UnknownComponent(ComponentId),
    EmptyInterval { start: Time, end: Time },
    Overlap { component: ComponentId, existing: TimeInterval, requested: TimeInterval },
}

impl fmt::Display for SippError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnknownComponent(c) => write!(f, "unknown component {}", c.0),
            Self::EmptyInterval { start, end } => write!(f, "interval [{start}, {end}) is empty"),
            Self::Overlap { component, existing, requested } => {
                write!(f, "reservation {requested} on component {} overlaps existing {existing}", component.0)
            }
        }
    }
}

impl core::error::Error for SippError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchError {
    /// The start component has no safe interval containing the start time.
    StartBlocked {
        component: ComponentId,
        time: Time,
    },
    TooManyTargets(usize),
    TargetOffChip(Cell),
    /// Open list exhausted.
    NoPath,
}

impl fmt::Display for SearchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::StartBlocked { component, time } => {
                write!(f, "start component {} is occupied at t={time}", component.0)
            }
            Self::TooManyTargets(n) => write!(f, "{n} targets exceed the 64-target task limit"),
            Self::TargetOffChip(c) => write!(f, "target cell {c} is off-chip"),
            Self::NoPath => write!(f, "no collision-free path exists"),
        }
    }
}

impl core::error::Error for SearchError {}

#[derive(Clone, Debug, PartialEq)]
pub enum CompileError {
    InsufficientCells { ancillae: usize, cells: usize },
    Search { ancilla: usize, source: SearchError },
    Reservation { ancilla: usize, source: SippError },
    Code(CodeError),
    Arch(ArchError),
}

impl fmt::Display for CompileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InsufficientCells { ancillae, cells } => {
                write!(f, "{ancillae} ancillae need distinct homes but the chip has {cells} cells")
            }
            Self::Search { ancilla, source } => write!(f, "planning ancilla {ancilla} failed: {source}"),
            Self::Reservation { ancilla, source } => {
                write!(f, "committing ancilla {ancilla} failed: {source}")
            }
            Self::Code(e) => write!(f, "{e}"),
            Self::Arch(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for CompileError {}

impl From<CodeError> for CompileError {
    fn from(e: CodeError) -> Self {
        Self::Code(e)
    }
}

impl From<ArchError> for CompileError {
    fn from(e: ArchError) -> Self {
        Self::Arch(e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EmitError {
    /// Memory basis has no logical operators (k = 0).
    NoLogicals,
    AncillaCountMismatch {
        schedule: usize,
        code: usize,
    },
}

impl fmt::Display for EmitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoLogicals => write!(f, "code has no logical operators to observe"),
            Self::AncillaCountMismatch { schedule, code } => {
                write!(f, "schedule has {schedule} ancillae but the code has {code} checks")
            }
        }
    }
}

impl core::error::Error for EmitError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MetricsError {
    MissingDistance,
    ZeroQubits,
    TooManyTargets { ancilla: usize, targets: usize, limit: usize },
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MissingDistance => write!(f, "code distance is not known"),
            Self::ZeroQubits => write!(f, "code has no data qubits"),
            Self::TooManyTargets { ancilla, targets, limit } => {
                write!(f, "ancilla {ancilla} has {targets} targets, exact tour limit is {limit}")
            }
        }
    }
}

impl core::error::Error for MetricsError {}
