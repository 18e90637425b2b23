mod common;

use spinroute_core::circuit::{Instr, NoiseSource};
use spinroute_core::code::{compute_logicals, Basis};
use spinroute_core::compiler::Schedule;
use spinroute_core::emit::{emit_memory_circuit, EmitOptions};
use spinroute_core::pauli::{propagate_fault_until, shuttle_segment_faults, PauliString};
use spinroute_core::{CssCode, NoiseConfig, StabCircuit};

fn shuttle_only(code: &CssCode, s: &Schedule) -> StabCircuit {
    let noise = NoiseConfig { p_shuttle: 1e-3, ..NoiseConfig::noiseless() };
    let opts = EmitOptions { per_edge_noise: true, ..EmitOptions::default() };
    emit_memory_circuit(s, code, &compute_logicals(code), &noise, Basis::Z, &opts).unwrap()
}

fn is_z_ancilla(code: &CssCode, q: usize) -> bool {
    q >= code.n() && code.check_basis(q - code.n()) == Basis::Z
}

#[test]
fn tailored_z_shuttle_faults_only_flip_their_own_measurement() {
    for d in [3, 5] {
        let (code, _, _, s) = common::surface(d, true, 2);
        let c = shuttle_only(&code, &s);
        let faults: Vec<_> = shuttle_segment_faults(&c).into_iter().filter(|f| is_z_ancilla(&code, f.qubit)).collect();
        assert!(!faults.is_empty());
        for f in &faults {
            assert!(f.is_benign(&c), "d={d}: {f:?}");
        }
    }
}

#[test]
fn untailored_z_shuttle_faults_reach_data_before_a_gate() {
    for d in [3, 5] {
        let (code, _, _, s) = common::surface(d, false, 2);
        let c = shuttle_only(&code, &s);
        let faults: Vec<_> = shuttle_segment_faults(&c).into_iter().filter(|f| is_z_ancilla(&code, f.qubit)).collect();
        assert!(faults.iter().any(|f| f.later_cx > 0));
        for f in faults.iter().filter(|f| f.later_cx > 0) {
            assert!(!f.data_residue.is_empty(), "d={d}: {f:?}");
        }
    }
}

#[test]
fn x_ancilla_phase_flips_stay_off_the_data() {
    let (code, _, _, s) = common::surface(3, false, 1);
    let c = shuttle_only(&code, &s);
    let mem = c.memory.clone().unwrap();
    let end = mem.round_ticks[0];
    let mut checked = 0;
    for a in (0..code.num_checks()).filter(|&a| code.check_basis(a) == Basis::X) {
        let q = code.n() + a;
        let hs: Vec<usize> = (0..end).filter(|&i| c.instrs[i] == Instr::H(q)).collect();
        assert_eq!(hs.len(), 2);
        for at in hs[0] + 1..=hs[1] {
            let e = propagate_fault_until(&c, &PauliString::single(c.num_qubits, q, 'Z'), at, end);
            assert!((0..code.n()).all(|d| e.residue.get(d) == 'I'));
            checked += 1;
        }
    }
    assert!(checked > 0);
    // shuttle sites exist on X ancillae too
    assert!(c.instrs.iter().any(
        |i| matches!(i, Instr::Noise { source: NoiseSource::Shuttle, qubits, .. } if !is_z_ancilla(&code, qubits[0]))
    ));
}
