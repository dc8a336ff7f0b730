//! Interpreter for adaptive circuits over stabilizer tableaux, with optional
//! Pauli noise insertion.
//!
//! Noise faults follow the executed operation and are supported on exactly
//! its qubits: a uniformly random non-identity Pauli after each single-qubit
//! gate (`p1`) or CNOT (`p2`), a classical flip of each recorded measurement
//! bit (`pm`), and an X fault after each reset (`pi`). RNG consumption is
//! fixed and documented: one 32-bit draw per random measurement outcome (in
//! program order), one draw per fault-occurrence test for operations whose
//! fault probability is strictly positive, and one draw to pick the fault
//! kind when a fault fires. Probabilities equal to zero draw nothing, so a
//! run with an all-zero noise model is bit-identical to a noiseless run.

use super::{AdaptiveCircuit, Instruction};
use crate::pauli::{PauliKind, PauliString};
use crate::prep::NoiseModel;
use crate::tableau::{CliffordGate, StabilizerTableau, TableauError};
use rand::RngCore;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExecError {
    #[error("circuit uses {circuit} qubits but the tableau has {tableau}")]
    QubitCountMismatch { circuit: usize, tableau: usize },
    #[error(transparent)]
    Tableau(#[from] TableauError),
}

/// Outcome of one circuit execution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecRecord {
    /// Final classical bits, flat, in register declaration order.
    pub bits: Vec<bool>,
    /// Recorded measurement bits in program order (after any `pm` flip).
    pub measurements: Vec<bool>,
    /// Instruction indices of conditional gates whose condition held.
    pub fired: Vec<usize>,
}

impl ExecRecord {
    /// Final classical state grouped by register.
    pub fn registers(&self, circuit: &AdaptiveCircuit) -> Vec<(String, Vec<bool>)> {
        circuit
            .cregs()
            .iter()
            .map(|r| (r.name.clone(), self.bits[r.offset..r.offset + r.width].to_vec()))
            .collect()
    }
}

pub(crate) fn fault_occurs<R: RngCore + ?Sized>(rng: &mut R, p: f64) -> bool {
    if p <= 0.0 {
        return false;
    }
    f64::from(rng.next_u32()) < p * 4294967296.0
}

fn single_qubit_fault<R: RngCore + ?Sized>(
    t: &mut StabilizerTableau,
    q: usize,
    rng: &mut R,
) -> Result<(), TableauError> {
    let kind = match rng.next_u32() % 3 {
        0 => PauliKind::X,
        1 => PauliKind::Y,
        _ => PauliKind::Z,
    };
    t.apply_pauli(&PauliString::single(t.n_qubits(), q, kind)?)
}

fn two_qubit_fault<R: RngCore + ?Sized>(
    t: &mut StabilizerTableau,
    a: usize,
    b: usize,
    rng: &mut R,
) -> Result<(), TableauError> {
    let idx = 1 + rng.next_u32() % 15; // 15 non-identity pairs
    let kinds = [PauliKind::I, PauliKind::X, PauliKind::Y, PauliKind::Z];
    let ka = kinds[(idx / 4) as usize];
    let kb = kinds[(idx % 4) as usize];
    let mut p = PauliString::identity(t.n_qubits());
    if ka != PauliKind::I {
        p.mul_assign(&PauliString::single(t.n_qubits(), a, ka)?);
    }
    if kb != PauliKind::I {
        p.mul_assign(&PauliString::single(t.n_qubits(), b, kb)?);
    }
    t.apply_pauli(&p)
}

fn apply_gate_with_noise<R: RngCore + ?Sized>(
    t: &mut StabilizerTableau,
    gate: CliffordGate,
    rng: &mut R,
    noise: Option<&NoiseModel>,
) -> Result<(), TableauError> {
    t.apply(gate)?;
    if let Some(nm) = noise {
        match gate {
            CliffordGate::Cnot(a, b) => {
                if fault_occurs(rng, nm.p2) {
                    two_qubit_fault(t, a, b, rng)?;
                }
            }
            g => {
                if fault_occurs(rng, nm.p1) {
                    let (q, _) = g.qubits();
                    single_qubit_fault(t, q, rng)?;
                }
            }
        }
    }
    Ok(())
}

/// Run `circuit` on `t`, mutating it in place.
///
/// Instructions execute in order; conditions are evaluated against the live
/// classical state. With `noise` present, sampled Pauli faults follow each
/// gate, measurement records may flip, and resets may leave an X fault.
pub fn execute<R: RngCore + ?Sized>(
    circuit: &AdaptiveCircuit,
    t: &mut StabilizerTableau,
    rng: &mut R,
    noise: Option<&NoiseModel>,
) -> Result<ExecRecord, ExecError> {
    if circuit.n_qubits() != t.n_qubits() {
        return Err(ExecError::QubitCountMismatch {
            circuit: circuit.n_qubits(),
            tableau: t.n_qubits(),
        });
    }
    let mut bits = vec![false; circuit.n_cbits()];
    let mut measurements = Vec::new();
    let mut fired = Vec::new();
    for (idx, ins) in circuit.instructions().iter().enumerate() {
        match ins {
            Instruction::Gate(g) => apply_gate_with_noise(t, *g, rng, noise)?,
            Instruction::CondGate { cond, gate } => {
                if bits[cond.bit] == cond.value {
                    fired.push(idx);
                    apply_gate_with_noise(t, *gate, rng, noise)?;
                }
            }
            Instruction::Measure { qubit, target } => {
                let m = t.measure_single(*qubit, PauliKind::Z, rng)?;
                let mut bit = m.value < 0;
                if let Some(nm) = noise {
                    if fault_occurs(rng, nm.pm) {
                        bit = !bit;
                    }
                }
                bits[*target] = bit;
                measurements.push(bit);
            }
            Instruction::Reset { qubit } => {
                let m = t.measure_single(*qubit, PauliKind::Z, rng)?;
                if m.value < 0 {
                    t.apply(CliffordGate::X(*qubit))?;
                }
                if let Some(nm) = noise {
                    if fault_occurs(rng, nm.pi) {
                        t.apply(CliffordGate::X(*qubit))?;
                    }
                }
            }
            Instruction::Assign { target, expr } => {
                bits[*target] = expr.eval(&bits);
            }
            Instruction::Barrier => {}
        }
    }
    Ok(ExecRecord { bits, measurements, fired })
}

/// Exact joint distribution of the recorded measurement bits of a noiseless
/// run, by branching the tableau at every random measurement. Probabilities
/// per branch are exact (products of 1/2); deterministic measurements do not
/// branch.
pub fn outcome_distribution(
    circuit: &AdaptiveCircuit,
    init: &StabilizerTableau,
) -> Result<std::collections::BTreeMap<Vec<bool>, f64>, ExecError> {
    if circuit.n_qubits() != init.n_qubits() {
        return Err(ExecError::QubitCountMismatch {
            circuit: circuit.n_qubits(),
            tableau: init.n_qubits(),
        });
    }
    let mut out = std::collections::BTreeMap::new();
    let bits = vec![false; circuit.n_cbits()];
    branch(circuit, init.clone(), bits, Vec::new(), 1.0, 0, &mut out)?;
    Ok(out)
}

fn branch(
    circuit: &AdaptiveCircuit,
    mut t: StabilizerTableau,
    mut bits: Vec<bool>,
    mut measured: Vec<bool>,
    mut prob: f64,
    from: usize,
    out: &mut std::collections::BTreeMap<Vec<bool>, f64>,
) -> Result<(), ExecError> {
    for (idx, ins) in circuit.instructions().iter().enumerate().skip(from) {
        match ins {
            Instruction::Gate(g) => t.apply(*g)?,
            Instruction::CondGate { cond, gate } => {
                if bits[cond.bit] == cond.value {
                    t.apply(*gate)?;
                }
            }
            Instruction::Measure { qubit, target } => {
                let p = PauliString::single(t.n_qubits(), *qubit, PauliKind::Z)
                    .map_err(TableauError::from)?;
                let mut minus = t.clone();
                let p_plus = t.project_pauli(&p, 1)?;
                if p_plus == 0.5 {
                    minus.project_pauli(&p, -1)?;
                    let mut bits_minus = bits.clone();
                    bits_minus[*target] = true;
                    let mut measured_minus = measured.clone();
                    measured_minus.push(true);
                    branch(circuit, minus, bits_minus, measured_minus, prob * 0.5, idx + 1, out)?;
                    prob *= 0.5;
                    bits[*target] = false;
                    measured.push(false);
                } else {
                    // deterministic: p_plus is 1.0 or 0.0
                    let bit = p_plus == 0.0;
                    if bit {
                        t = minus;
                        t.project_pauli(&p, -1)?;
                    }
                    bits[*target] = bit;
                    measured.push(bit);
                    continue;
                }
            }
            Instruction::Reset { qubit } => {
                let p = PauliString::single(t.n_qubits(), *qubit, PauliKind::Z)
                    .map_err(TableauError::from)?;
                let mut minus = t.clone();
                let p_plus = t.project_pauli(&p, 1)?;
                if p_plus == 0.5 {
                    minus.project_pauli(&p, -1)?;
                    minus.apply(CliffordGate::X(*qubit))?;
                    branch(circuit, minus, bits.clone(), measured.clone(), prob * 0.5, idx + 1, out)?;
                    prob *= 0.5;
                } else if p_plus == 0.0 {
                    t = minus;
                    t.project_pauli(&p, -1)?;
                    t.apply(CliffordGate::X(*qubit))?;
                }
            }
            Instruction::Assign { target, expr } => bits[*target] = expr.eval(&bits),
            Instruction::Barrier => {}
        }
    }
    if prob > 0.0 {
        *out.entry(measured).or_insert(0.0) += prob;
    }
    Ok(())
}
