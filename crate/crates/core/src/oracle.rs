//! Dense statevector simulation (≤ 20 qubits): the brute-force oracle that
//! cross-checks the tableau engine on measurement distributions, expectation
//! values and fidelities. Qubit 0 is the least-significant index bit.

use crate::circuit::{AdaptiveCircuit, Instruction};
use crate::pauli::{PauliKind, PauliString};
use crate::tableau::{BasisState, CliffordGate, StabilizerTableau};
use num_complex::Complex64;
use rand::RngCore;
use std::collections::BTreeMap;
use thiserror::Error;

pub const MAX_QUBITS: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{0} qubits exceed the statevector ceiling of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("state sizes differ: {0} vs {1} qubits")]
    SizeMismatch(usize, usize),
    #[error("circuit uses {circuit} qubits but the state has {state}")]
    QubitCountMismatch { circuit: usize, state: usize },
    #[error("projection onto a zero-probability branch")]
    ImpossibleBranch,
}

/// Exact complex-amplitude state of up to 20 qubits.
#[derive(Clone, Debug)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(n_qubits: usize) -> Result<Self, OracleError> {
        if n_qubits > MAX_QUBITS {
            return Err(OracleError::TooManyQubits(n_qubits));
        }
        let mut amps = vec![Complex64::ZERO; 1 << n_qubits];
        amps[0] = Complex64::ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Product state with qubit i in |0⟩ or |+⟩.
    pub fn from_basis(basis: &[BasisState]) -> Result<Self, OracleError> {
        let mut sv = Self::zero_state(basis.len())?;
        for (q, &b) in basis.iter().enumerate() {
            if b == BasisState::XPlus {
                sv.apply_gate(CliffordGate::H(q));
            }
        }
        Ok(sv)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn apply_gate(&mut self, gate: CliffordGate) {
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        match gate {
            CliffordGate::H(q) => {
                let mask = 1usize << q;
                for i in 0..self.amps.len() {
                    if i & mask == 0 {
                        let a = self.amps[i];
                        let b = self.amps[i | mask];
                        self.amps[i] = (a + b) * inv_sqrt2;
                        self.amps[i | mask] = (a - b) * inv_sqrt2;
                    }
                }
            }
            CliffordGate::X(q) => {
                let mask = 1usize << q;
                for i in 0..self.amps.len() {
                    if i & mask == 0 {
                        self.amps.swap(i, i | mask);
                    }
                }
            }
            CliffordGate::Z(q) => {
                let mask = 1usize << q;
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask != 0 {
                        *a = -*a;
                    }
                }
            }
            CliffordGate::S(q) => {
                let mask = 1usize << q;
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask != 0 {
                        *a *= Complex64::I;
                    }
                }
            }
            CliffordGate::Cnot(c, t) => {
                let cm = 1usize << c;
                let tm = 1usize << t;
                for i in 0..self.amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amps.swap(i, i | tm);
                    }
                }
            }
        }
    }

    /// Apply a Pauli string exactly: |b⟩ → i^e (−1)^(z·b) |b ⊕ x⟩.
    pub fn apply_pauli(&mut self, p: &PauliString) {
        let n = self.n_qubits;
        let mut x_mask = 0usize;
        let mut z_mask = 0usize;
        for q in 0..n {
            if p.x_bits().get(q) {
                x_mask |= 1 << q;
            }
            if p.z_bits().get(q) {
                z_mask |= 1 << q;
            }
        }
        // phase of the X-then-Z ordered form
        let e_xz = (u32::from(p.phase_exp()) + p.x_bits().and_count(p.z_bits())) % 4;
        let global = match e_xz {
            0 => Complex64::ONE,
            1 => Complex64::I,
            2 => -Complex64::ONE,
            _ => -Complex64::I,
        };
        let mut out = vec![Complex64::ZERO; self.amps.len()];
        for (b, &a) in self.amps.iter().enumerate() {
            let sign = if (b & z_mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            out[b ^ x_mask] = global * sign * a;
        }
        self.amps = out;
    }

    /// ⟨ψ|P|ψ⟩ (real for Hermitian P).
    pub fn expectation_pauli(&self, p: &PauliString) -> f64 {
        let mut phi = self.clone();
        phi.apply_pauli(p);
        self.amps
            .iter()
            .zip(&phi.amps)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    /// Probability that measuring `p` yields +1.
    pub fn prob_plus(&self, p: &PauliString) -> f64 {
        0.5 * (1.0 + self.expectation_pauli(p))
    }

    /// Project onto the `desired` (±1) eigenspace of `p` and renormalize,
    /// returning the branch probability.
    pub fn project_pauli(&mut self, p: &PauliString, desired: i8) -> Result<f64, OracleError> {
        let mut phi = self.clone();
        phi.apply_pauli(p);
        let sign = f64::from(desired);
        let mut norm = 0.0;
        for (a, b) in self.amps.iter_mut().zip(&phi.amps) {
            *a = 0.5 * (*a + sign * b);
            norm += a.norm_sqr();
        }
        if norm < 1e-24 {
            return Err(OracleError::ImpossibleBranch);
        }
        let scale = norm.sqrt().recip();
        for a in &mut self.amps {
            *a *= scale;
        }
        Ok(norm)
    }

    /// Born-rule measurement of qubit `q` in the X or Z basis; one 32-bit
    /// draw decides the branch against its exact probability.
    pub fn measure_single<R: RngCore + ?Sized>(
        &mut self,
        q: usize,
        basis: PauliKind,
        rng: &mut R,
    ) -> i8 {
        let p = PauliString::single(self.n_qubits, q, basis).expect("qubit in range");
        let p_plus = self.prob_plus(&p).clamp(0.0, 1.0);
        let u = f64::from(rng.next_u32()) / 4294967296.0;
        let outcome: i8 = if u < p_plus { 1 } else { -1 };
        self.project_pauli(&p, outcome).expect("chosen branch has positive probability");
        outcome
    }

    /// |⟨self|other⟩|².
    pub fn overlap(&self, other: &Self) -> Result<f64, OracleError> {
        if self.n_qubits != other.n_qubits {
            return Err(OracleError::SizeMismatch(self.n_qubits, other.n_qubits));
        }
        let ip: Complex64 =
            self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum();
        Ok(ip.norm_sqr())
    }

    /// ⟨∏_i (1+G_i)/2⟩: probability that measuring each generator in turn
    /// yields +1. Mirrors the tableau-side computation.
    pub fn overlap_with_generators(&self, generators: &[PauliString]) -> f64 {
        let mut work = self.clone();
        let mut prob = 1.0;
        for g in generators {
            let p_plus = work.prob_plus(g).clamp(0.0, 1.0);
            // stabilizer branch probabilities are dyadic; anything this
            // small is a floating-point zero
            if p_plus < 1e-9 {
                return 0.0;
            }
            prob *= p_plus;
            work.project_pauli(g, 1).expect("branch probability positive");
        }
        prob
    }

    /// Exact statevector for a stabilizer tableau, built by projecting every
    /// stabilizer onto |0…0⟩. Whenever the projection annihilates the state,
    /// the corresponding destabilizer maps it back into the +1 branch.
    pub fn from_tableau(t: &StabilizerTableau) -> Result<Self, OracleError> {
        let mut sv = Self::zero_state(t.n_qubits())?;
        for (i, s) in t.stabilizers().iter().enumerate() {
            let mut branch = sv.clone();
            match branch.project_pauli(s, 1) {
                Ok(_) => sv = branch,
                Err(OracleError::ImpossibleBranch) => {
                    sv.apply_pauli(&t.destabilizers()[i]);
                    sv.project_pauli(s, 1)?;
                }
                Err(e) => return Err(e),
            }
        }
        Ok(sv)
    }
}

/// Result of one oracle execution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleExecRecord {
    pub bits: Vec<bool>,
    pub measurements: Vec<bool>,
}

/// Execute an adaptive circuit on a statevector (noiseless; noise lives in
/// the tableau engine).
pub fn execute(
    circuit: &AdaptiveCircuit,
    sv: &mut StateVector,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<OracleExecRecord, OracleError> {
    if circuit.n_qubits() != sv.n_qubits() {
        return Err(OracleError::QubitCountMismatch {
            circuit: circuit.n_qubits(),
            state: sv.n_qubits(),
        });
    }
    let mut bits = vec![false; circuit.n_cbits()];
    let mut measurements = Vec::new();
    for ins in circuit.instructions() {
        match ins {
            Instruction::Gate(g) => sv.apply_gate(*g),
            Instruction::CondGate { cond, gate } => {
                if bits[cond.bit] == cond.value {
                    sv.apply_gate(*gate);
                }
            }
            Instruction::Measure { qubit, target } => {
                let v = sv.measure_single(*qubit, PauliKind::Z, rng);
                bits[*target] = v < 0;
                measurements.push(v < 0);
            }
            Instruction::Reset { qubit } => {
                let v = sv.measure_single(*qubit, PauliKind::Z, rng);
                if v < 0 {
                    sv.apply_gate(CliffordGate::X(*qubit));
                }
            }
            Instruction::Assign { target, expr } => bits[*target] = expr.eval(&bits),
            Instruction::Barrier => {}
        }
    }
    Ok(OracleExecRecord { bits, measurements })
}

/// Exact joint distribution of recorded measurement bits, by depth-first
/// branching over measurement outcomes with exact Born probabilities.
pub fn measurement_distribution(
    circuit: &AdaptiveCircuit,
    init: &StateVector,
) -> Result<BTreeMap<Vec<bool>, f64>, OracleError> {
    if circuit.n_qubits() != init.n_qubits() {
        return Err(OracleError::QubitCountMismatch {
            circuit: circuit.n_qubits(),
            state: init.n_qubits(),
        });
    }
    let mut out = BTreeMap::new();
    let bits = vec![false; circuit.n_cbits()];
    branch(circuit, init.clone(), bits, Vec::new(), 1.0, 0, &mut out)?;
    Ok(out)
}

const BRANCH_EPS: f64 = 1e-12;

fn branch(
    circuit: &AdaptiveCircuit,
    mut sv: StateVector,
    mut bits: Vec<bool>,
    mut measured: Vec<bool>,
    mut prob: f64,
    from: usize,
    out: &mut BTreeMap<Vec<bool>, f64>,
) -> Result<(), OracleError> {
    for (idx, ins) in circuit.instructions().iter().enumerate().skip(from) {
        match ins {
            Instruction::Gate(g) => sv.apply_gate(*g),
            Instruction::CondGate { cond, gate } => {
                if bits[cond.bit] == cond.value {
                    sv.apply_gate(*gate);
                }
            }
            Instruction::Measure { qubit, target } => {
                let p = PauliString::single(sv.n_qubits(), *qubit, PauliKind::Z)
                    .expect("qubit in range");
                let p_plus = sv.prob_plus(&p).clamp(0.0, 1.0);
                if p_plus > BRANCH_EPS && p_plus < 1.0 - BRANCH_EPS {
                    let mut minus = sv.clone();
                    minus.project_pauli(&p, -1)?;
                    let mut bits_m = bits.clone();
                    bits_m[*target] = true;
                    let mut meas_m = measured.clone();
                    meas_m.push(true);
                    branch(circuit, minus, bits_m, meas_m, prob * (1.0 - p_plus), idx + 1, out)?;
                    sv.project_pauli(&p, 1)?;
                    prob *= p_plus;
                    bits[*target] = false;
                    measured.push(false);
                } else {
                    let minus = p_plus <= BRANCH_EPS;
                    sv.project_pauli(&p, if minus { -1 } else { 1 })?;
                    bits[*target] = minus;
                    measured.push(minus);
                }
            }
            Instruction::Reset { qubit } => {
                let p = PauliString::single(sv.n_qubits(), *qubit, PauliKind::Z)
                    .expect("qubit in range");
                let p_plus = sv.prob_plus(&p).clamp(0.0, 1.0);
                if p_plus > BRANCH_EPS && p_plus < 1.0 - BRANCH_EPS {
                    let mut minus = sv.clone();
                    minus.project_pauli(&p, -1)?;
                    minus.apply_gate(CliffordGate::X(*qubit));
                    branch(circuit, minus, bits.clone(), measured.clone(), prob * (1.0 - p_plus), idx + 1, out)?;
                    sv.project_pauli(&p, 1)?;
                    prob *= p_plus;
                } else {
                    let minus = p_plus <= BRANCH_EPS;
                    sv.project_pauli(&p, if minus { -1 } else { 1 })?;
                    if minus {
                        sv.apply_gate(CliffordGate::X(*qubit));
                    }
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse;
    use crate::rng::shot_rng;

    #[test]
    fn qubit_ceiling() {
        assert_eq!(StateVector::zero_state(21).unwrap_err(), OracleError::TooManyQubits(21));
        assert!(StateVector::zero_state(20).is_ok());
    }

    #[test]
    fn h_makes_uniform_superposition() {
        let mut sv = StateVector::zero_state(1).unwrap();
        sv.apply_gate(CliffordGate::H(0));
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((sv.amplitudes()[0].re - r).abs() < 1e-12);
        assert!((sv.amplitudes()[1].re - r).abs() < 1e-12);
        assert!((sv.norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cnot_on_basis_state() {
        let mut sv = StateVector::zero_state(2).unwrap();
        sv.apply_gate(CliffordGate::X(0));
        sv.apply_gate(CliffordGate::Cnot(0, 1));
        // |10⟩ (qubit 0 set) → |11⟩ = index 3
        assert!((sv.amplitudes()[3].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_application_phases() {
        use crate::pauli::PauliKind::*;
        let mut sv = StateVector::zero_state(1).unwrap();
        sv.apply_pauli(&PauliString::single(1, 0, Y).unwrap());
        // Y|0⟩ = i|1⟩
        assert!((sv.amplitudes()[1] - Complex64::I).norm() < 1e-12);
        let mut sv = StateVector::zero_state(1).unwrap();
        sv.apply_gate(CliffordGate::H(0));
        assert!((sv.expectation_pauli(&PauliString::single(1, 0, X).unwrap()) - 1.0).abs() < 1e-12);
        assert!(sv.expectation_pauli(&PauliString::single(1, 0, Z).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn bell_pair_correlations() {
        let mut sv = StateVector::zero_state(2).unwrap();
        sv.apply_gate(CliffordGate::H(0));
        sv.apply_gate(CliffordGate::Cnot(0, 1));
        for seed in 0..20 {
            let mut s = sv.clone();
            let mut rng = shot_rng(seed, 0);
            let a = s.measure_single(0, PauliKind::Z, &mut rng);
            let b = s.measure_single(1, PauliKind::Z, &mut rng);
            assert_eq!(a, b, "Z outcomes are perfectly correlated");
        }
    }

    #[test]
    fn overlap_of_identical_and_orthogonal_states() {
        let a = StateVector::zero_state(2).unwrap();
        let mut b = StateVector::zero_state(2).unwrap();
        assert!((a.overlap(&a).unwrap() - 1.0).abs() < 1e-12);
        b.apply_gate(CliffordGate::X(0));
        assert!(a.overlap(&b).unwrap() < 1e-12);
    }

    #[test]
    fn from_tableau_handles_negative_branches() {
        // |1⟩: projecting +Z annihilates |0⟩, the destabilizer rescues it.
        let mut t = StabilizerTableau::zero_state(2);
        t.apply(CliffordGate::X(0)).unwrap();
        t.apply(CliffordGate::H(1)).unwrap();
        t.apply(CliffordGate::Cnot(1, 0)).unwrap();
        let sv = StateVector::from_tableau(&t).unwrap();
        let mut expect = StateVector::zero_state(2).unwrap();
        expect.apply_gate(CliffordGate::X(0));
        expect.apply_gate(CliffordGate::H(1));
        expect.apply_gate(CliffordGate::Cnot(1, 0));
        assert!((sv.overlap(&expect).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn execute_matches_feedforward_semantics() {
        let c = parse(
            "qreg q[2]; creg c[1]; h q[0]; cx q[0],q[1]; measure q[1] -> c[0]; if (c[0]==1) x q[0];",
        )
        .unwrap();
        for seed in 0..16 {
            let mut sv = StateVector::zero_state(2).unwrap();
            execute(&c, &mut sv, &mut shot_rng(seed, 0)).unwrap();
            let z0 = PauliString::single(2, 0, PauliKind::Z).unwrap();
            assert!((sv.expectation_pauli(&z0) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn distribution_of_bell_measurement() {
        let c = parse("qreg q[2]; creg c[2]; h q[0]; cx q[0],q[1]; measure q[0] -> c[0]; measure q[1] -> c[1];").unwrap();
        let dist =
            measurement_distribution(&c, &StateVector::zero_state(2).unwrap()).unwrap();
        assert_eq!(dist.len(), 2);
        assert!((dist[&vec![false, false]] - 0.5).abs() < 1e-12);
        assert!((dist[&vec![true, true]] - 0.5).abs() < 1e-12);
    }
}
