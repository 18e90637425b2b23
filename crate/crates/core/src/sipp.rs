//! Reservation table and safe intervals.
//!
//! Every component holds a sorted list of disjoint, half-open occupied
//! intervals. The safe intervals of a component are the complement of its
//! occupancy over `[0, ∞)`, numbered in increasing start order.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::arch::{ComponentId, Time, FOREVER};
use crate::error::SippError;

/// Half-open `[start, end)`; `end == FOREVER` means unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimeInterval {
    pub start: Time,
    pub end: Time,
}

impl TimeInterval {
    pub fn new(start: Time, end: Time) -> Result<Self, SippError> {
        if start >= end {
            return Err(SippError::EmptyInterval { start, end });
        }
        Ok(Self { start, end })
    }

    pub const fn unbounded(start: Time) -> Self {
        Self { start, end: FOREVER }
    }

    pub fn contains(&self, t: Time) -> bool {
        self.start <= t && t < self.end
    }

    pub fn overlaps(&self, other: &TimeInterval) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn len(&self) -> Time {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn is_unbounded(&self) -> bool {
        self.end == FOREVER
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unbounded() {
            write!(f, "[{}, inf)", self.start)
        } else {
            write!(f, "[{}, {})", self.start, self.end)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SafeInterval {
    pub component: ComponentId,
    pub index: usize,
    pub span: TimeInterval,
}

/// Occupied intervals per component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReservationTable {
    occupied: Vec<Vec<TimeInterval>>,
}

impl ReservationTable {
    pub fn new(component_count: usize) -> Self {
        Self { occupied: vec![Vec::new(); component_count] }
    }

    pub fn component_count(&self) -> usize {
        self.occupied.len()
    }

    fn list(&self, comp: ComponentId) -> Result<&Vec<TimeInterval>, SippError> {
        self.occupied.get(comp.index()).ok_or(SippError::UnknownComponent(comp))
    }

    pub fn occupied(&self, comp: ComponentId) -> Result<&[TimeInterval], SippError> {
        self.list(comp).map(Vec::as_slice)
    }

    /// Marks `interval` occupied. Touching neighbours are coalesced; any
    /// overlap is an error and leaves the table unchanged.
    pub fn reserve(&mut self, comp: ComponentId, interval: TimeInterval) -> Result<(), SippError> {
        if interval.start >= interval.end {
            return Err(SippError::EmptyInterval { start: interval.start, end: interval.end });
        }
        let list = self.occupied.get_mut(comp.index()).ok_or(SippError::UnknownComponent(comp))?;
        // first interval ending after our start
        let pos = list.partition_point(|iv| iv.end <= interval.start);
        if let Some(next) = list.get(pos) {
            if next.overlaps(&interval) {
                return Err(SippError::Overlap { component: comp, existing: *next, requested: interval });
            }
        }
        let mut merged = interval;
        let mut lo = pos;
        let mut hi = pos;
        if lo > 0 && list[lo - 1].end == merged.start {
            lo -= 1;
            merged.start = list[lo].start;
        }
        if hi < list.len() && list[hi].start == merged.end {
            merged.end = list[hi].end;
            hi += 1;
        }
        list.splice(lo..hi, [merged]);
        Ok(())
    }

    /// Complement of the occupancy as bare spans.
    pub fn safe_spans(&self, comp: ComponentId) -> Result<Vec<TimeInterval>, SippError> {
        let list = self.list(comp)?;
        Ok(complement(list))
    }

    pub fn safe_intervals(&self, comp: ComponentId) -> Result<Vec<SafeInterval>, SippError> {
        Ok(self
            .safe_spans(comp)?
            .into_iter()
            .enumerate()
            .map(|(index, span)| SafeInterval { component: comp, index, span })
            .collect())
    }

    /// Safe interval whose span contains `t`, if `t` is not occupied.
    pub fn interval_containing(&self, comp: ComponentId, t: Time) -> Option<SafeInterval> {
        self.safe_intervals(comp).ok()?.into_iter().find(|s| s.span.contains(t))
    }

    /// True if `interval` lies entirely inside one safe interval.
    pub fn is_free(&self, comp: ComponentId, interval: TimeInterval) -> bool {
        match self.list(comp) {
            Ok(list) => !list.iter().any(|iv| iv.overlaps(&interval)),
            Err(_) => false,
        }
    }
}

pub(crate) fn complement(occupied: &[TimeInterval]) -> Vec<TimeInterval> {
    let mut out = Vec::with_capacity(occupied.len() + 1);
    let mut cursor = 0;
    for iv in occupied {
        if iv.start > cursor {
            out.push(TimeInterval { start: cursor, end: iv.start });
        }
        cursor = iv.end;
    }
    if cursor != FOREVER {
        out.push(TimeInterval::unbounded(cursor));
    }
    out
}
