//! Stabilizer tableau simulation with symbolic measurement outcomes.
//!
//! Every random measurement introduces a fresh binary variable. Row phases
//! and outcomes are affine functions of those variables over GF(2), so a
//! single run decides which outcomes and detector parities are
//! deterministic and what their values are.

use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{Instr, StabCircuit};
use crate::gf2::BitVec;
use crate::pauli::PauliString;

/// `constant ⊕ Σ vars`, variables packed in 64-bit words.
#[derive(Clone, Debug, Default)]
pub struct Affine {
    pub constant: bool,
    vars: Vec<u64>,
}

impl Affine {
    pub fn constant(c: bool) -> Self {
        Self { constant: c, vars: Vec::new() }
    }

    pub fn variable(v: usize) -> Self {
        let mut vars = vec![0; v / 64 + 1];
        vars[v / 64] |= 1 << (v % 64);
        Self { constant: false, vars }
    }

    pub fn is_constant(&self) -> bool {
        self.vars.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &Affine) {
        self.constant ^= other.constant;
        if self.vars.len() < other.vars.len() {
            self.vars.resize(other.vars.len(), 0);
        }
        for (a, b) in self.vars.iter_mut().zip(&other.vars) {
            *a ^= b;
        }
    }
}

impl PartialEq for Affine {
    fn eq(&self, other: &Self) -> bool {
        let word = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
        let len = self.vars.len().max(other.vars.len());
        self.constant == other.constant && (0..len).all(|i| word(&self.vars, i) == word(&other.vars, i))
    }
}

impl Eq for Affine {}

/// Destabilizer rows `0..n`, stabilizer rows `n..2n`.
#[derive(Clone, Debug)]
pub struct Tableau {
    n: usize,
    x: Vec<BitVec>,
    z: Vec<BitVec>,
    phase: Vec<Affine>,
    vars: usize,
}

impl Tableau {
    /// The all-zero state.
    pub fn new(n: usize) -> Self {
        let mut x = vec![BitVec::zeros(n); 2 * n];
        let mut z = vec![BitVec::zeros(n); 2 * n];
        for i in 0..n {
            x[i].set(i, true);
            z[n + i].set(i, true);
        }
        Self { n, x, z, phase: vec![Affine::default(); 2 * n], vars: 0 }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    fn row(&self, i: usize) -> PauliString {
        let phase = if self.phase[i].constant { 2 } else { 0 };
        PauliString { x: self.x[i].clone(), z: self.z[i].clone(), phase }
    }

    /// Image of `X_q` under the applied unitary (before any measurement).
    pub fn destabilizer(&self, q: usize) -> PauliString {
        self.row(q)
    }

    /// Image of `Z_q` under the applied unitary (before any measurement).
    pub fn stabilizer(&self, q: usize) -> PauliString {
        self.row(self.n + q)
    }

    pub fn h(&mut self, a: usize) {
        for i in 0..2 * self.n {
            let (xa, za) = (self.x[i].get(a), self.z[i].get(a));
            if xa && za {
                self.phase[i].constant ^= true;
            }
            self.x[i].set(a, za);
            self.z[i].set(a, xa);
        }
    }

    pub fn cx(&mut self, c: usize, t: usize) {
        for i in 0..2 * self.n {
            let (xc, zc, xt, zt) = (self.x[i].get(c), self.z[i].get(c), self.x[i].get(t), self.z[i].get(t));
            if xc && zt && (xt == zc) {
                self.phase[i].constant ^= true;
            }
            self.x[i].set(t, xt ^ xc);
            self.z[i].set(c, zc ^ zt);
        }
    }

    /// Row `h ← row i · row h`; the sign is exact when the rows commute.
    fn rowsum_into(&self, hx: &mut BitVec, hz: &mut BitVec, hp: &mut Affine, i: usize) {
        let mut g: i64 = 0;
        let (ix, iz) = (&self.x[i], &self.z[i]);
        let mut support = ix.clone();
        for q in iz.ones() {
            support.set(q, true);
        }
        for q in support.ones() {
            let (x1, z1, x2, z2) = (ix.get(q), iz.get(q), hx.get(q), hz.get(q));
            g += match (x1, z1) {
                (false, false) => 0,
                (true, true) => z2 as i64 - x2 as i64,
                (true, false) => z2 as i64 * (2 * x2 as i64 - 1),
                (false, true) => x2 as i64 * (1 - 2 * z2 as i64),
            };
        }
        hp.xor_assign(&self.phase[i]);
        if g.rem_euclid(4) == 2 {
            hp.constant ^= true;
        }
        hx.xor_assign(ix);
        hz.xor_assign(iz);
    }

    fn rowsum(&mut self, h: usize, i: usize) {
        let mut hx = core::mem::replace(&mut self.x[h], BitVec::zeros(0));
        let mut hz = core::mem::replace(&mut self.z[h], BitVec::zeros(0));
        let mut hp = core::mem::take(&mut self.phase[h]);
        self.rowsum_into(&mut hx, &mut hz, &mut hp, i);
        self.x[h] = hx;
        self.z[h] = hz;
        self.phase[h] = hp;
    }

    /// Z-basis measurement; the outcome is an affine expression.
    pub fn measure(&mut self, a: usize) -> Affine {
        let n = self.n;
        if let Some(p) = (n..2 * n).find(|&i| self.x[i].get(a)) {
            for i in 0..2 * n {
                if i != p && self.x[i].get(a) {
                    self.rowsum(i, p);
                }
            }
            self.x[p - n] = self.x[p].clone();
            self.z[p - n] = self.z[p].clone();
            self.phase[p - n] = self.phase[p].clone();
            self.x[p] = BitVec::zeros(n);
            self.z[p] = BitVec::zeros(n);
            self.z[p].set(a, true);
            let outcome = Affine::variable(self.vars);
            self.vars += 1;
            self.phase[p] = outcome.clone();
            outcome
        } else {
            let mut sx = BitVec::zeros(n);
            let mut sz = BitVec::zeros(n);
            let mut sp = Affine::default();
            for i in 0..n {
                if self.x[i].get(a) {
                    self.rowsum_into(&mut sx, &mut sz, &mut sp, i + n);
                }
            }
            sp
        }
    }

    /// Resets qubit `a` to `|0⟩`.
    pub fn reset(&mut self, a: usize) {
        let m = self.measure(a);
        // conditional X flips the sign of every row with a Z on `a`
        for i in 0..2 * self.n {
            if self.z[i].get(a) {
                self.phase[i].xor_assign(&m);
            }
        }
    }
}

/// Outcome of a noiseless run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simulation {
    pub outcomes: Vec<Affine>,
    /// `None` marks a random detector or observable.
    pub detectors: Vec<Option<bool>>,
    pub observables: Vec<Option<bool>>,
}

impl Simulation {
    pub fn deterministic(&self, record: usize) -> bool {
        self.outcomes[record].is_constant()
    }

    pub fn value(&self, record: usize) -> bool {
        self.outcomes[record].constant
    }

    /// Every detector deterministically zero and every observable deterministic.
    pub fn all_quiet(&self) -> bool {
        self.detectors.iter().all(|d| *d == Some(false)) && self.observables.iter().all(Option::is_some)
    }
}

fn parity(outcomes: &[Affine], records: &[usize]) -> Affine {
    let mut acc = Affine::default();
    for &r in records {
        acc.xor_assign(&outcomes[r]);
    }
    acc
}

/// Runs `circuit` ignoring noise channels.
pub fn simulate_noiseless(circuit: &StabCircuit) -> Simulation {
    let mut tab = Tableau::new(circuit.num_qubits);
    let mut outcomes = Vec::new();
    let mut detectors = Vec::new();
    let mut observables: Vec<Affine> = Vec::new();
    for instr in &circuit.instrs {
        match instr {
            Instr::Reset(q) => tab.reset(*q),
            Instr::H(q) => tab.h(*q),
            Instr::Cx(c, t) => tab.cx(*c, *t),
            Instr::Measure(q) => outcomes.push(tab.measure(*q)),
            Instr::Detector { records, .. } => detectors.push(parity(&outcomes, records)),
            Instr::Observable { index, records } => {
                if observables.len() <= *index {
                    observables.resize(index + 1, Affine::default());
                }
                let p = parity(&outcomes, records);
                observables[*index].xor_assign(&p);
            }
            Instr::Noise { .. } | Instr::Tick => {}
        }
    }
    let decide = |a: &Affine| a.is_constant().then_some(a.constant);
    Simulation {
        detectors: detectors.iter().map(decide).collect(),
        observables: observables.iter().map(decide).collect(),
        outcomes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(n: usize, instrs: Vec<Instr>) -> Simulation {
        simulate_noiseless(&StabCircuit { num_qubits: n, coords: Vec::new(), instrs, memory: None })
    }

    #[test]
    fn reset_measure_is_zero() {
        let s = run(1, vec![Instr::Reset(0), Instr::Measure(0)]);
        assert!(s.deterministic(0) && !s.value(0));
    }

    #[test]
    fn hadamard_measure_is_random() {
        let s = run(1, vec![Instr::Reset(0), Instr::H(0), Instr::Measure(0)]);
        assert!(!s.deterministic(0));
    }

    #[test]
    fn repeated_random_measurement_agrees() {
        let s = run(
            1,
            vec![
                Instr::H(0),
                Instr::Measure(0),
                Instr::Measure(0),
                Instr::Detector { coords: [0.0; 3], records: vec![0, 1] },
            ],
        );
        assert!(!s.deterministic(0));
        assert_eq!(s.detectors, [Some(false)]);
    }

    #[test]
    fn bell_pair_parity() {
        let s = run(
            2,
            vec![
                Instr::H(0),
                Instr::Cx(0, 1),
                Instr::Measure(0),
                Instr::Measure(1),
                Instr::Detector { coords: [0.0; 3], records: vec![0, 1] },
            ],
        );
        assert!(!s.deterministic(0));
        assert_eq!(s.detectors, [Some(false)]);
    }

    #[test]
    fn reset_after_random_outcome_is_clean() {
        let s = run(2, vec![Instr::H(0), Instr::Cx(0, 1), Instr::Reset(0), Instr::Measure(0), Instr::Measure(1)]);
        assert!(s.deterministic(0) && !s.value(0));
        assert!(!s.deterministic(1));
    }

    #[test]
    fn ghz_outcomes_share_one_variable() {
        let mut t = Tableau::new(3);
        t.h(0);
        t.cx(0, 1);
        t.cx(1, 2);
        let a = t.measure(0);
        let b = t.measure(1);
        let c = t.measure(2);
        assert!(!a.is_constant());
        assert_eq!(a, b);
        assert_eq!(b, c);
    }

    #[test]
    fn plus_state_survives_basis_change() {
        let s = run(1, vec![Instr::Reset(0), Instr::H(0), Instr::H(0), Instr::Measure(0)]);
        assert!(s.deterministic(0) && !s.value(0));
        let s =
            run(2, vec![Instr::H(0), Instr::Cx(0, 1), Instr::H(0), Instr::H(1), Instr::Measure(0), Instr::Measure(1)]);
        // XX becomes ZZ: individually random, jointly fixed
        let mut p = s.outcomes[0].clone();
        p.xor_assign(&s.outcomes[1]);
        assert!(!s.deterministic(0) && p == Affine::constant(false));
    }
}
