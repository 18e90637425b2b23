//! Pauli strings and Pauli-frame propagation through Clifford circuits.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::circuit::{Channel, Instr, NoiseSource, StabCircuit};
use crate::gf2::BitVec;

/// `i^phase` times a tensor product of `I X Y Z`; `x = z = 1` is `Y`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub x: BitVec,
    pub z: BitVec,
    /// Power of `i`, mod 4.
    pub phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self { x: BitVec::zeros(n), z: BitVec::zeros(n), phase: 0 }
    }

    /// Single-qubit Pauli `p` (one of `I X Y Z`) on qubit `q`.
    pub fn single(n: usize, q: usize, p: char) -> Self {
        let mut s = Self::identity(n);
        s.set(q, p);
        s
    }

    /// Parses `"XIZY"`-style strings; `None` on any other character.
    pub fn parse(text: &str) -> Option<Self> {
        let n = text.chars().count();
        let mut s = Self::identity(n);
        for (q, c) in text.chars().enumerate() {
            if !matches!(c, 'I' | 'X' | 'Y' | 'Z' | '_') {
                return None;
            }
            s.set(q, c);
        }
        Some(s)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn get(&self, q: usize) -> char {
        match (self.x.get(q), self.z.get(q)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    pub fn set(&mut self, q: usize, p: char) {
        let (x, z) = match p {
            'X' => (true, false),
            'Y' => (true, true),
            'Z' => (false, true),
            _ => (false, false),
        };
        self.x.set(q, x);
        self.z.set(q, z);
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn weight(&self) -> usize {
        (0..self.len()).filter(|&q| self.x.get(q) || self.z.get(q)).count()
    }

    /// Non-identity positions.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&q| self.x.get(q) || self.z.get(q)).collect()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        self.x.dot(&other.z) == self.z.dot(&other.x)
    }

    /// `self ← self · other`, tracking the phase.
    pub fn mul_assign(&mut self, other: &PauliString) {
        let mut phase = self.phase as u32 + other.phase as u32;
        for q in 0..self.len() {
            phase += qubit_product_phase(self.get(q), other.get(q));
        }
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
        self.phase = (phase % 4) as u8;
    }

    pub fn apply_h(&mut self, q: usize) {
        let (x, z) = (self.x.get(q), self.z.get(q));
        if x && z {
            self.phase = (self.phase + 2) % 4;
        }
        self.x.set(q, z);
        self.z.set(q, x);
    }

    pub fn apply_cx(&mut self, c: usize, t: usize) {
        let (xc, zc, xt, zt) = (self.x.get(c), self.z.get(c), self.x.get(t), self.z.get(t));
        if xc && zt && (xt == zc) {
            self.phase = (self.phase + 2) % 4;
        }
        self.x.set(t, xt ^ xc);
        self.z.set(c, zc ^ zt);
    }

    /// Restriction to qubits `0..n`.
    pub fn truncated(&self, n: usize) -> PauliString {
        let mut s = PauliString::identity(n);
        for q in 0..n.min(self.len()) {
            s.set(q, self.get(q));
        }
        s
    }
}

/// Power of `i` in `a·b` for single-qubit Paulis: `XY = iZ` and cyclic.
fn qubit_product_phase(a: char, b: char) -> u32 {
    match (a, b) {
        ('X', 'Y') | ('Y', 'Z') | ('Z', 'X') => 1,
        ('Y', 'X') | ('Z', 'Y') | ('X', 'Z') => 3,
        _ => 0,
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len()).map(|q| self.get(q)).collect();
        write!(f, "{}{s}", ["+", "+i", "-", "-i"][self.phase as usize])
    }
}

/// Effect of a fault pushed to a point in the circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaultEffect {
    /// Frame at the stop point.
    pub residue: PauliString,
    /// Measurement records whose outcome the fault flips.
    pub flipped: Vec<usize>,
}

/// Pushes `fault` (inserted just before instruction `at`) through the rest
/// of the circuit.
pub fn propagate_fault(circuit: &StabCircuit, fault: &PauliString, at: usize) -> FaultEffect {
    propagate_fault_until(circuit, fault, at, circuit.instrs.len())
}

/// Like [`propagate_fault`] but stops before instruction `end`.
pub fn propagate_fault_until(circuit: &StabCircuit, fault: &PauliString, at: usize, end: usize) -> FaultEffect {
    let mut record =
        circuit.instrs[..at.min(circuit.instrs.len())].iter().filter(|i| matches!(i, Instr::Measure(_))).count();
    let mut frame = fault.clone();
    let mut flipped = Vec::new();
    for instr in &circuit.instrs[at.min(end)..end.min(circuit.instrs.len())] {
        match *instr {
            Instr::Reset(q) => frame.set(q, 'I'),
            Instr::H(q) => frame.apply_h(q),
            Instr::Cx(c, t) => frame.apply_cx(c, t),
            Instr::Measure(q) => {
                if frame.x.get(q) {
                    flipped.push(record);
                }
                record += 1;
            }
            Instr::Noise { .. } | Instr::Detector { .. } | Instr::Observable { .. } | Instr::Tick => {}
        }
    }
    FaultEffect { residue: frame, flipped }
}

/// Detector and observable flips caused by one Pauli at one noise site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaultSignature {
    pub instr: usize,
    pub source: NoiseSource,
    pub pauli: Vec<(usize, char)>,
    pub detectors: Vec<usize>,
    pub observables: Vec<usize>,
}

fn channel_paulis(channel: Channel, qubits: [usize; 2]) -> Vec<Vec<(usize, char)>> {
    const P: [char; 3] = ['X', 'Y', 'Z'];
    match channel {
        Channel::XError => vec![vec![(qubits[0], 'X')]],
        Channel::ZError => vec![vec![(qubits[0], 'Z')]],
        Channel::Depolarize1 => P.iter().map(|&p| vec![(qubits[0], p)]).collect(),
        Channel::Depolarize2 => {
            let mut out = Vec::new();
            for a in ['I', 'X', 'Y', 'Z'] {
                for b in ['I', 'X', 'Y', 'Z'] {
                    if (a, b) != ('I', 'I') {
                        let mut v = Vec::new();
                        if a != 'I' {
                            v.push((qubits[0], a));
                        }
                        if b != 'I' {
                            v.push((qubits[1], b));
                        }
                        out.push(v);
                    }
                }
            }
            out
        }
    }
}

/// Every single-Pauli fault of every noise channel with its detector and
/// observable signature.
pub fn single_fault_scan(circuit: &StabCircuit) -> Vec<FaultSignature> {
    let mut detectors = Vec::new();
    let mut observables: Vec<Vec<usize>> = Vec::new();
    for instr in &circuit.instrs {
        match instr {
            Instr::Detector { records, .. } => detectors.push(records.clone()),
            Instr::Observable { index, records } => {
                if observables.len() <= *index {
                    observables.resize(index + 1, Vec::new());
                }
                observables[*index].extend(records);
            }
            _ => {}
        }
    }
    let m = circuit.num_measurements();
    let mut out = Vec::new();
    for (i, instr) in circuit.instrs.iter().enumerate() {
        let Instr::Noise { channel, qubits, source, .. } = *instr else {
            continue;
        };
        for pauli in channel_paulis(channel, qubits) {
            let mut fault = PauliString::identity(circuit.num_qubits);
            for &(q, p) in &pauli {
                fault.set(q, p);
            }
            let effect = propagate_fault(circuit, &fault, i + 1);
            let mut flips = vec![false; m];
            for r in effect.flipped {
                flips[r] = true;
            }
            let parity = |recs: &[usize]| recs.iter().filter(|&&r| flips[r]).count() % 2 == 1;
            out.push(FaultSignature {
                instr: i,
                source,
                pauli,
                detectors: (0..detectors.len()).filter(|&d| parity(&detectors[d])).collect(),
                observables: (0..observables.len()).filter(|&o| parity(&observables[o])).collect(),
            });
        }
    }
    out
}

/// A phase flip on a mobile ancilla at the end of one shuttle run, pushed to
/// the close of its round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentFault {
    pub instr: usize,
    pub qubit: usize,
    pub round: usize,
    /// Non-identity frame entries on data qubits.
    pub data_residue: Vec<(usize, char)>,
    pub flipped: Vec<usize>,
    /// CX gates on the same ancilla later in the round.
    pub later_cx: usize,
}

impl SegmentFault {
    /// Whether the fault only flips the ancilla's own measurement of this round.
    pub fn is_benign(&self, circuit: &StabCircuit) -> bool {
        let Some(mem) = &circuit.memory else { return false };
        let own = mem.check_records[self.round][self.qubit - mem.data_qubits];
        self.data_residue.is_empty() && self.flipped == [own]
    }
}

/// One entry per shuttle noise site of a memory circuit.
pub fn shuttle_segment_faults(circuit: &StabCircuit) -> Vec<SegmentFault> {
    let Some(mem) = &circuit.memory else { return Vec::new() };
    let mut out = Vec::new();
    for (i, instr) in circuit.instrs.iter().enumerate() {
        let Instr::Noise { source: NoiseSource::Shuttle, qubits, .. } = *instr else {
            continue;
        };
        let q = qubits[0];
        let Some(round) = mem.round_ticks.iter().position(|&t| t > i) else {
            continue;
        };
        let end = mem.round_ticks[round];
        let effect = propagate_fault_until(circuit, &PauliString::single(circuit.num_qubits, q, 'Z'), i + 1, end);
        let later_cx =
            circuit.instrs[i + 1..end].iter().filter(|x| matches!(x, Instr::Cx(c, t) if *c == q || *t == q)).count();
        out.push(SegmentFault {
            instr: i,
            qubit: q,
            round,
            data_residue: (0..mem.data_qubits).map(|d| (d, effect.residue.get(d))).filter(|&(_, p)| p != 'I').collect(),
            flipped: effect.flipped,
            later_cx,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tableau::Tableau;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Z-check ancilla 4 measuring data 0..4 via CX(data → ancilla).
    fn z_check(tailored: bool) -> (StabCircuit, usize) {
        let mut c = StabCircuit::new(5);
        let a = 4;
        c.push(Instr::Reset(a));
        if tailored {
            c.push(Instr::H(a));
        }
        let mut after_second = 0;
        for q in 0..4 {
            if tailored {
                c.push(Instr::H(a));
            }
            c.push(Instr::Cx(q, a));
            if tailored {
                c.push(Instr::H(a));
            }
            if q == 1 {
                after_second = c.instrs.len();
            }
        }
        if tailored {
            c.push(Instr::H(a));
        }
        c.push(Instr::Measure(a));
        (c, after_second)
    }

    #[test]
    fn untailored_z_fault_spreads_to_data() {
        let (c, at) = z_check(false);
        let e = propagate_fault(&c, &PauliString::single(5, 4, 'Z'), at);
        assert_eq!(e.residue.truncated(4), PauliString::parse("IIZZ").unwrap());
        assert!(e.flipped.is_empty());
    }

    #[test]
    fn tailored_z_fault_becomes_measurement_flip() {
        let (c, at) = z_check(true);
        let e = propagate_fault(&c, &PauliString::single(5, 4, 'Z'), at);
        assert!(e.residue.truncated(4).is_identity());
        assert_eq!(e.flipped, [0]);
    }

    #[test]
    fn identity_fault_is_inert() {
        let (c, at) = z_check(false);
        let e = propagate_fault(&c, &PauliString::identity(5), at);
        assert!(e.residue.is_identity() && e.flipped.is_empty());
    }

    #[test]
    fn x_ancilla_ignores_phase_flips() {
        // X check: R, H, CX(a → data)*, H, M
        let mut c = StabCircuit::new(5);
        c.push(Instr::Reset(4));
        c.push(Instr::H(4));
        let mut sites = vec![c.instrs.len()];
        for q in 0..4 {
            c.push(Instr::Cx(4, q));
            sites.push(c.instrs.len());
        }
        let end = c.instrs.len();
        c.push(Instr::H(4));
        c.push(Instr::Measure(4));
        for at in sites {
            let e = propagate_fault_until(&c, &PauliString::single(5, 4, 'Z'), at, end);
            assert!(e.residue.truncated(4).is_identity());
        }
    }

    #[test]
    fn multiplication_phases() {
        let x = PauliString::parse("X").unwrap();
        let z = PauliString::parse("Z").unwrap();
        let mut xz = x.clone();
        xz.mul_assign(&z);
        // X·Z = -iY
        assert_eq!((xz.get(0), xz.phase), ('Y', 3));
        let mut zx = z.clone();
        zx.mul_assign(&x);
        assert_eq!((zx.get(0), zx.phase), ('Y', 1));
        assert!(!x.commutes_with(&z));
        let mut xx = x.clone();
        xx.mul_assign(&x);
        assert!(xx.is_identity() && xx.phase == 0);
    }

    #[test]
    fn frame_matches_tableau_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 8;
        for _ in 0..500 {
            let mut circuit = Vec::new();
            for _ in 0..rng.gen_range(1..40) {
                if rng.gen_bool(0.4) {
                    circuit.push(Instr::H(rng.gen_range(0..n)));
                } else {
                    let c = rng.gen_range(0..n);
                    let mut t = rng.gen_range(0..n - 1);
                    if t >= c {
                        t += 1;
                    }
                    circuit.push(Instr::Cx(c, t));
                }
            }
            let mut tab = Tableau::new(n);
            for i in &circuit {
                match *i {
                    Instr::H(q) => tab.h(q),
                    Instr::Cx(c, t) => tab.cx(c, t),
                    _ => unreachable!(),
                }
            }
            let mut p = PauliString::identity(n);
            for q in 0..n {
                p.set(q, ['I', 'X', 'Y', 'Z'][rng.gen_range(0..4)]);
            }
            // image of p is the product of the images of its X and Z factors
            let mut image = PauliString::identity(n);
            for q in 0..n {
                if p.x.get(q) {
                    image.mul_assign(&tab.destabilizer(q));
                }
                if p.z.get(q) {
                    image.mul_assign(&tab.stabilizer(q));
                }
            }
            let circ = StabCircuit { num_qubits: n, coords: Vec::new(), instrs: circuit, memory: None };
            let frame = propagate_fault(&circ, &p, 0).residue;
            assert_eq!((&frame.x, &frame.z), (&image.x, &image.z));
        }
    }

    #[test]
    fn scan_enumerates_channel_paulis() {
        let mut c = StabCircuit::new(2);
        c.push(Instr::Reset(0));
        c.push(Instr::Reset(1));
        c.push(Instr::Noise { channel: Channel::Depolarize2, p: 0.1, qubits: [0, 1], source: NoiseSource::Gate });
        c.push(Instr::noise(Channel::XError, 0.1, 0, NoiseSource::Measure));
        c.push(Instr::Measure(0));
        c.push(Instr::Measure(1));
        c.push(Instr::Detector { coords: [0.0; 3], records: vec![0] });
        c.push(Instr::Observable { index: 0, records: vec![0, 1] });
        let scan = single_fault_scan(&c);
        assert_eq!(scan.len(), 16);
        let xm = scan.iter().find(|s| s.source == NoiseSource::Measure).unwrap();
        assert_eq!((xm.detectors.as_slice(), xm.observables.as_slice()), (&[0usize][..], &[0usize][..]));
        let xx = scan.iter().find(|s| s.pauli == [(0, 'X'), (1, 'X')]).unwrap();
        assert_eq!((xx.detectors.as_slice(), xx.observables.as_slice()), (&[0usize][..], &[][..]));
    }
}
