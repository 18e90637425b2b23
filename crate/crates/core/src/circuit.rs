//! Stabilizer circuits with tagged noise channels and their text form.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::code::Basis;

/// Which physical process a noise channel models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NoiseSource {
    Init,
    Measure,
    Gate,
    Shuttle,
    Displace,
    Idle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Channel {
    XError,
    ZError,
    Depolarize1,
    Depolarize2,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::XError => "X_ERROR",
            Channel::ZError => "Z_ERROR",
            Channel::Depolarize1 => "DEPOLARIZE1",
            Channel::Depolarize2 => "DEPOLARIZE2",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instr {
    Reset(usize),
    H(usize),
    /// Control, target.
    Cx(usize, usize),
    /// Z-basis measurement; appends one record.
    Measure(usize),
    Noise {
        channel: Channel,
        p: f64,
        qubits: [usize; 2],
        source: NoiseSource,
    },
    /// Parity of absolute measurement records.
    Detector {
        coords: [f64; 3],
        records: Vec<usize>,
    },
    Observable {
        index: usize,
        records: Vec<usize>,
    },
    Tick,
}

impl Instr {
    pub fn noise(channel: Channel, p: f64, q: usize, source: NoiseSource) -> Self {
        Instr::Noise { channel, p, qubits: [q, q], source }
    }

    pub fn is_noise(&self) -> bool {
        matches!(self, Instr::Noise { .. })
    }
}

/// Where the measurement records of a memory experiment live.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemoryLayout {
    pub basis: Basis,
    pub data_qubits: usize,
    /// `check_records[round][check]`.
    pub check_records: Vec<Vec<usize>>,
    /// Final data measurement record per data qubit.
    pub data_records: Vec<usize>,
    /// Instruction index of the TICK that closes each round.
    pub round_ticks: Vec<usize>,
    /// Home cell of each ancilla, used for detector coordinates.
    pub check_coords: Vec<(u32, u32)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabCircuit {
    pub num_qubits: usize,
    pub coords: Vec<[f64; 3]>,
    pub instrs: Vec<Instr>,
    pub memory: Option<MemoryLayout>,
}

impl StabCircuit {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, coords: Vec::new(), instrs: Vec::new(), memory: None }
    }

    pub fn push(&mut self, i: Instr) {
        self.instrs.push(i);
    }

    pub fn num_measurements(&self) -> usize {
        self.instrs.iter().filter(|i| matches!(i, Instr::Measure(_))).count()
    }

    pub fn num_detectors(&self) -> usize {
        self.instrs.iter().filter(|i| matches!(i, Instr::Detector { .. })).count()
    }

    pub fn num_observables(&self) -> usize {
        self.instrs
            .iter()
            .filter_map(|i| match i {
                Instr::Observable { index, .. } => Some(index + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn count(&self, pred: impl Fn(&Instr) -> bool) -> usize {
        self.instrs.iter().filter(|i| pred(i)).count()
    }

    /// Text in the common stabilizer-circuit format (`rec[-k]` lookbacks).
    pub fn to_stim(&self) -> String {
        let mut out = String::new();
        for (q, c) in self.coords.iter().enumerate() {
            let _ = writeln!(out, "QUBIT_COORDS({}, {}, {}) {q}", c[0], c[1], c[2]);
        }
        let mut measured = 0usize;
        let recs = |out: &mut String, records: &[usize], measured: usize| {
            for r in records {
                let _ = write!(out, " rec[-{}]", measured - r);
            }
        };
        for i in &self.instrs {
            match i {
                Instr::Reset(q) => {
                    let _ = writeln!(out, "R {q}");
                }
                Instr::H(q) => {
                    let _ = writeln!(out, "H {q}");
                }
                Instr::Cx(c, t) => {
                    let _ = writeln!(out, "CX {c} {t}");
                }
                Instr::Measure(q) => {
                    measured += 1;
                    let _ = writeln!(out, "M {q}");
                }
                Instr::Noise { channel, p, qubits, .. } => {
                    if *channel == Channel::Depolarize2 {
                        let _ = writeln!(out, "{}({p}) {} {}", channel.name(), qubits[0], qubits[1]);
                    } else {
                        let _ = writeln!(out, "{}({p}) {}", channel.name(), qubits[0]);
                    }
                }
                Instr::Detector { coords, records } => {
                    let _ = write!(out, "DETECTOR({}, {}, {})", coords[0], coords[1], coords[2]);
                    recs(&mut out, records, measured);
                    out.push('\n');
                }
                Instr::Observable { index, records } => {
                    let _ = write!(out, "OBSERVABLE_INCLUDE({index})");
                    recs(&mut out, records, measured);
                    out.push('\n');
                }
                Instr::Tick => out.push_str("TICK\n"),
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn stim_text_uses_lookbacks() {
        let mut c = StabCircuit::new(2);
        c.coords = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 1.0]];
        c.push(Instr::Reset(0));
        c.push(Instr::noise(Channel::XError, 0.001, 0, NoiseSource::Init));
        c.push(Instr::Cx(0, 1));
        c.push(Instr::Noise { channel: Channel::Depolarize2, p: 0.01, qubits: [0, 1], source: NoiseSource::Gate });
        c.push(Instr::Measure(0));
        c.push(Instr::Measure(1));
        c.push(Instr::Detector { coords: [1.0, 0.0, 0.0], records: vec![0] });
        c.push(Instr::Observable { index: 0, records: vec![0, 1] });
        c.push(Instr::Tick);
        let text = c.to_stim();
        assert!(text.contains("QUBIT_COORDS(1, 0, 1) 1\n"));
        assert!(text.contains("X_ERROR(0.001) 0\n"));
        assert!(text.contains("DEPOLARIZE2(0.01) 0 1\n"));
        assert!(text.contains("DETECTOR(1, 0, 0) rec[-2]\n"));
        assert!(text.contains("OBSERVABLE_INCLUDE(0) rec[-2] rec[-1]\n"));
        assert_eq!((c.num_measurements(), c.num_detectors(), c.num_observables()), (2, 1, 1));
    }
}
