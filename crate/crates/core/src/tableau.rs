//! Stabilizer/destabilizer tableau states with projective Pauli measurement.
//!
//! A `StabilizerTableau` holds 2n Hermitian Pauli rows: n stabilizers whose
//! joint +1 eigenspace is the state, and n destabilizers forming the dual
//! half of the symplectic frame (destabilizer i anticommutes with stabilizer
//! i and commutes with every other row). The dual frame makes deterministic
//! measurement outcomes exact: a Pauli that commutes with the whole
//! stabilizer group equals the product of the stabilizers indexed by the
//! destabilizers it anticommutes with, so the outcome sign falls out of a
//! row product with no tolerance anywhere.
//!
//! Measurements of Pauli operators that anticommute with some stabilizer are
//! genuinely random; each such measurement consumes exactly one 32-bit draw
//! from the supplied RNG (outcome = low bit), in program order.

use crate::bits::BitVec;
use crate::gf2;
use crate::pauli::{PauliError, PauliKind, PauliString};
use rand::RngCore;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableauError {
    #[error("basis list has length {got}, expected {expected}")]
    BasisLengthMismatch { got: usize, expected: usize },
    #[error("tableau has no qubits")]
    Empty,
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("gate targets must be distinct and in range")]
    BadTargets,
    #[error("target generators must commute pairwise")]
    NonCommutingGenerators,
    #[error("target generators are linearly dependent")]
    DependentGenerators,
    #[error("tableau invariant violated: {0}")]
    InvariantViolation(String),
}

/// Initial single-qubit basis state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisState {
    /// |0⟩, stabilized by +Z.
    ZPlus,
    /// |+⟩, stabilized by +X.
    XPlus,
}

/// Clifford gates supported by the engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CliffordGate {
    H(usize),
    X(usize),
    Z(usize),
    S(usize),
    Cnot(usize, usize),
}

impl CliffordGate {
    pub fn qubits(self) -> (usize, Option<usize>) {
        match self {
            CliffordGate::H(q)
            | CliffordGate::X(q)
            | CliffordGate::Z(q)
            | CliffordGate::S(q) => (q, None),
            CliffordGate::Cnot(c, t) => (c, Some(t)),
        }
    }

    pub fn is_two_qubit(self) -> bool {
        matches!(self, CliffordGate::Cnot(..))
    }
}

/// Result of a projective Pauli measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasurementOutcome {
    /// Measured eigenvalue, +1 or −1.
    pub value: i8,
    /// True when the operator was already (±) in the stabilizer group.
    pub was_deterministic: bool,
}

/// Pure n-qubit stabilizer state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerTableau {
    n_qubits: usize,
    stab_rows: Vec<PauliString>,
    destab_rows: Vec<PauliString>,
}

impl StabilizerTableau {
    /// Product state with qubit i stabilized by +Z or +X per `basis`.
    pub fn new(n_qubits: usize, basis: &[BasisState]) -> Result<Self, TableauError> {
        if n_qubits == 0 {
            return Err(TableauError::Empty);
        }
        if basis.len() != n_qubits {
            return Err(TableauError::BasisLengthMismatch { got: basis.len(), expected: n_qubits });
        }
        let mut stab_rows = Vec::with_capacity(n_qubits);
        let mut destab_rows = Vec::with_capacity(n_qubits);
        for (q, &b) in basis.iter().enumerate() {
            let (s, d) = match b {
                BasisState::ZPlus => (PauliKind::Z, PauliKind::X),
                BasisState::XPlus => (PauliKind::X, PauliKind::Z),
            };
            stab_rows.push(PauliString::single(n_qubits, q, s)?);
            destab_rows.push(PauliString::single(n_qubits, q, d)?);
        }
        Ok(Self { n_qubits, stab_rows, destab_rows })
    }

    /// All-|0⟩ state.
    pub fn zero_state(n_qubits: usize) -> Self {
        Self::new(n_qubits, &vec![BasisState::ZPlus; n_qubits]).expect("n_qubits > 0")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.stab_rows
    }

    pub fn destabilizers(&self) -> &[PauliString] {
        &self.destab_rows
    }

    fn check_targets(&self, gate: CliffordGate) -> Result<(), TableauError> {
        let (a, b) = gate.qubits();
        if a >= self.n_qubits {
            return Err(TableauError::BadTargets);
        }
        if let Some(b) = b {
            if b >= self.n_qubits || b == a {
                return Err(TableauError::BadTargets);
            }
        }
        Ok(())
    }

    /// Conjugate every row by `gate`.
    pub fn apply(&mut self, gate: CliffordGate) -> Result<(), TableauError> {
        self.check_targets(gate)?;
        for row in self.stab_rows.iter_mut().chain(self.destab_rows.iter_mut()) {
            match gate {
                CliffordGate::H(q) => row.conj_h(q),
                CliffordGate::X(q) => row.conj_x(q),
                CliffordGate::Z(q) => row.conj_z(q),
                CliffordGate::S(q) => row.conj_s(q),
                CliffordGate::Cnot(c, t) => row.conj_cnot(c, t),
            }
        }
        Ok(())
    }

    /// Apply a Hermitian Pauli as a gate: rows anticommuting with it flip sign.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<(), TableauError> {
        if !p.is_hermitian() {
            return Err(PauliError::NotHermitian(p.phase_exp()).into());
        }
        for row in self.stab_rows.iter_mut().chain(self.destab_rows.iter_mut()) {
            if !row.commutes_with(p) {
                row.negate();
            }
        }
        Ok(())
    }

    /// Expectation value of a Hermitian Pauli: ±1 if ±P is in the stabilizer
    /// group, 0 otherwise.
    pub fn expectation(&self, p: &PauliString) -> Result<i8, TableauError> {
        let sign = p.sign()?;
        if self.stab_rows.iter().any(|s| !s.commutes_with(p)) {
            return Ok(0);
        }
        let group_elem = self.resolve_in_group(p);
        debug_assert_eq!(group_elem.x_bits(), p.x_bits());
        debug_assert_eq!(group_elem.z_bits(), p.z_bits());
        Ok(group_elem.sign()? * sign)
    }

    // For P commuting with the whole stabilizer group, return the group
    // element with P's component bits (its sign decides the outcome). The
    // destabilizers act as the dual basis: stabilizer i participates iff P
    // anticommutes with destabilizer i.
    fn resolve_in_group(&self, p: &PauliString) -> PauliString {
        let mut acc = PauliString::identity(self.n_qubits);
        for (d, s) in self.destab_rows.iter().zip(&self.stab_rows) {
            if !d.commutes_with(p) {
                acc.mul_assign(s);
            }
        }
        acc
    }

    /// Projectively measure Hermitian Pauli `p`.
    ///
    /// Deterministic case: the tableau is unchanged and the stored sign is
    /// returned. Random case: one 32-bit word is drawn from `rng`, the
    /// outcome is its low bit, and the tableau is projected accordingly.
    pub fn measure_pauli<R: RngCore + ?Sized>(
        &mut self,
        p: &PauliString,
        rng: &mut R,
    ) -> Result<MeasurementOutcome, TableauError> {
        let sign = p.sign()?;
        match self.anticommuting_stab(p) {
            None => {
                let stored = self.resolve_in_group(p).sign()?;
                Ok(MeasurementOutcome { value: stored * sign, was_deterministic: true })
            }
            Some(pivot) => {
                let value: i8 = if rng.next_u32() & 1 == 0 { 1 } else { -1 };
                self.project_random(p, pivot, value * sign);
                Ok(MeasurementOutcome { value, was_deterministic: false })
            }
        }
    }

    /// Measure qubit `q` in the X or Z basis (weight-1 Pauli measurement).
    pub fn measure_single<R: RngCore + ?Sized>(
        &mut self,
        qubit: usize,
        basis: PauliKind,
        rng: &mut R,
    ) -> Result<MeasurementOutcome, TableauError> {
        let p = PauliString::single(self.n_qubits, qubit, basis)?;
        self.measure_pauli(&p, rng)
    }

    /// Project onto the `desired` (±1) eigenspace of `p`, returning the Born
    /// probability of that branch: 1.0 or 0.0 when deterministic, 0.5 when
    /// random. The state is updated only when the probability is nonzero.
    pub fn project_pauli(&mut self, p: &PauliString, desired: i8) -> Result<f64, TableauError> {
        debug_assert!(desired == 1 || desired == -1);
        let sign = p.sign()?;
        match self.anticommuting_stab(p) {
            None => {
                let stored = self.resolve_in_group(p).sign()?;
                Ok(if stored * sign == desired { 1.0 } else { 0.0 })
            }
            Some(pivot) => {
                self.project_random(p, pivot, desired * sign);
                Ok(0.5)
            }
        }
    }

    fn anticommuting_stab(&self, p: &PauliString) -> Option<usize> {
        self.stab_rows.iter().position(|s| !s.commutes_with(p))
    }

    // Standard frame update for a random measurement outcome. `outcome_sign`
    // is the sign to store for the bare (phase-0) component pattern of `p`.
    fn project_random(&mut self, p: &PauliString, pivot: usize, outcome_sign: i8) {
        let old_stab = self.stab_rows[pivot].clone();
        for (i, row) in self.stab_rows.iter_mut().enumerate() {
            if i != pivot && !row.commutes_with(p) {
                row.mul_assign(&old_stab);
            }
        }
        for row in self.destab_rows.iter_mut() {
            if !row.commutes_with(p) {
                row.mul_assign(&old_stab);
            }
        }
        self.destab_rows[pivot] = old_stab;
        let mut new_stab = p.clone();
        if new_stab.sign().expect("checked Hermitian") != outcome_sign {
            new_stab.negate();
        }
        self.stab_rows[pivot] = new_stab;
    }

    /// ⟨∏_i (1+G_i)/2⟩ for independent, pairwise-commuting Hermitian
    /// generators: the probability that sequentially measuring every G_i
    /// yields +1. Equals |⟨target|ψ⟩|² when the G_i count reaches n.
    pub fn overlap_with_generators(
        &self,
        generators: &[PauliString],
    ) -> Result<f64, TableauError> {
        for (i, a) in generators.iter().enumerate() {
            a.sign()?;
            for b in &generators[i + 1..] {
                if !a.commutes_with(b) {
                    return Err(TableauError::NonCommutingGenerators);
                }
            }
        }
        let rows: Vec<BitVec> = generators.iter().map(PauliString::symplectic_row).collect();
        if gf2::rank(&rows) != generators.len() {
            return Err(TableauError::DependentGenerators);
        }
        let mut work = self.clone();
        let mut prob = 1.0;
        for g in generators {
            let p = work.project_pauli(g, 1)?;
            prob *= p;
            if prob == 0.0 {
                break;
            }
        }
        Ok(prob)
    }

    /// Squared overlap with another tableau on the same qubit count.
    pub fn overlap_with_state(&self, other: &Self) -> Result<f64, TableauError> {
        if self.n_qubits != other.n_qubits {
            return Err(PauliError::SizeMismatch(self.n_qubits, other.n_qubits).into());
        }
        self.overlap_with_generators(other.stabilizers())
    }

    /// Verify the frame invariants; used by tests and debug assertions.
    pub fn check_invariants(&self) -> Result<(), TableauError> {
        let n = self.n_qubits;
        let fail = |msg: String| Err(TableauError::InvariantViolation(msg));
        for row in self.stab_rows.iter().chain(&self.destab_rows) {
            if !row.is_hermitian() || row.phase_exp() % 2 != 0 {
                return fail(format!("non-Hermitian row {row}"));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !self.stab_rows[i].commutes_with(&self.stab_rows[j]) {
                    return fail(format!("stabilizers {i},{j} anticommute"));
                }
                let want_comm = i != j;
                if self.destab_rows[i].commutes_with(&self.stab_rows[j]) != want_comm {
                    return fail(format!("destabilizer {i} vs stabilizer {j} pattern broken"));
                }
            }
        }
        let rows: Vec<BitVec> = self
            .stab_rows
            .iter()
            .chain(&self.destab_rows)
            .map(PauliString::symplectic_row)
            .collect();
        if gf2::rank(&rows) != 2 * n {
            return fail("rows not full rank over GF(2)".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn z(n: usize, q: usize) -> PauliString {
        PauliString::single(n, q, PauliKind::Z).unwrap()
    }

    fn x(n: usize, q: usize) -> PauliString {
        PauliString::single(n, q, PauliKind::X).unwrap()
    }

    #[test]
    fn new_tableau_bases() {
        let t = StabilizerTableau::new(2, &[BasisState::ZPlus, BasisState::XPlus]).unwrap();
        t.check_invariants().unwrap();
        assert_eq!(t.expectation(&z(2, 0)).unwrap(), 1);
        assert_eq!(t.expectation(&x(2, 1)).unwrap(), 1);
        assert_eq!(t.expectation(&x(2, 0)).unwrap(), 0);
    }

    #[test]
    fn basis_length_mismatch() {
        let err = StabilizerTableau::new(2, &[BasisState::ZPlus]).unwrap_err();
        assert_eq!(err, TableauError::BasisLengthMismatch { got: 1, expected: 2 });
    }

    #[test]
    fn h_turns_zero_into_plus() {
        let mut t = StabilizerTableau::zero_state(1);
        t.apply(CliffordGate::H(0)).unwrap();
        assert_eq!(t.expectation(&x(1, 0)).unwrap(), 1);
        t.check_invariants().unwrap();
    }

    #[test]
    fn x_flips_z_sign() {
        let mut t = StabilizerTableau::zero_state(1);
        t.apply(CliffordGate::X(0)).unwrap();
        assert_eq!(t.expectation(&z(1, 0)).unwrap(), -1);
    }

    #[test]
    fn cnot_makes_bell_pair() {
        let mut t = StabilizerTableau::zero_state(2);
        t.apply(CliffordGate::H(0)).unwrap();
        t.apply(CliffordGate::Cnot(0, 1)).unwrap();
        t.check_invariants().unwrap();
        let xx = PauliString::on_support(2, PauliKind::X, &[0, 1]).unwrap();
        let zz = PauliString::on_support(2, PauliKind::Z, &[0, 1]).unwrap();
        assert_eq!(t.expectation(&xx).unwrap(), 1);
        assert_eq!(t.expectation(&zz).unwrap(), 1);
        assert_eq!(t.expectation(&z(2, 0)).unwrap(), 0);
    }

    #[test]
    fn duplicate_targets_rejected() {
        let mut t = StabilizerTableau::zero_state(2);
        assert_eq!(t.apply(CliffordGate::Cnot(1, 1)), Err(TableauError::BadTargets));
        assert_eq!(t.apply(CliffordGate::H(2)), Err(TableauError::BadTargets));
    }

    #[test]
    fn deterministic_measurement_repeats() {
        let mut t = StabilizerTableau::zero_state(1);
        let m = t.measure_pauli(&z(1, 0), &mut rng(0)).unwrap();
        assert_eq!(m, MeasurementOutcome { value: 1, was_deterministic: true });
    }

    #[test]
    fn random_measurement_is_unbiased_and_sticky() {
        let mut ones = 0;
        for seed in 0..200 {
            let mut t = StabilizerTableau::zero_state(1);
            t.apply(CliffordGate::H(0)).unwrap();
            let mut r = rng(seed);
            let m = t.measure_pauli(&z(1, 0), &mut r).unwrap();
            assert!(!m.was_deterministic);
            if m.value == 1 {
                ones += 1;
            }
            // same operator again: deterministic, same value
            let m2 = t.measure_pauli(&z(1, 0), &mut r).unwrap();
            assert!(m2.was_deterministic);
            assert_eq!(m2.value, m.value);
            t.check_invariants().unwrap();
        }
        assert!((60..=140).contains(&ones), "biased outcomes: {ones}/200");
    }

    #[test]
    fn measuring_negative_operator_flips_reported_value() {
        let mut t = StabilizerTableau::zero_state(1);
        let mut minus_z = z(1, 0);
        minus_z.negate();
        let m = t.measure_pauli(&minus_z, &mut rng(0)).unwrap();
        assert_eq!(m.value, -1);
        assert!(m.was_deterministic);
    }

    #[test]
    fn projection_probabilities() {
        let mut t = StabilizerTableau::zero_state(1);
        assert_eq!(t.project_pauli(&z(1, 0), 1).unwrap(), 1.0);
        assert_eq!(t.project_pauli(&z(1, 0), -1).unwrap(), 0.0);
        let p = t.project_pauli(&x(1, 0), 1).unwrap();
        assert_eq!(p, 0.5);
        assert_eq!(t.expectation(&x(1, 0)).unwrap(), 1);
    }

    #[test]
    fn overlap_with_generators_counts_halves() {
        // |00⟩ against the Bell generators {XX, ZZ}: 1/2.
        let t = StabilizerTableau::zero_state(2);
        let gens = vec![
            PauliString::on_support(2, PauliKind::X, &[0, 1]).unwrap(),
            PauliString::on_support(2, PauliKind::Z, &[0, 1]).unwrap(),
        ];
        assert_eq!(t.overlap_with_generators(&gens).unwrap(), 0.5);
    }

    #[test]
    fn overlap_rejects_bad_generator_lists() {
        let t = StabilizerTableau::zero_state(2);
        let bad = vec![z(2, 0), x(2, 0)];
        assert_eq!(
            t.overlap_with_generators(&bad).unwrap_err(),
            TableauError::NonCommutingGenerators
        );
        let dep = vec![z(2, 0), z(2, 0)];
        assert_eq!(
            t.overlap_with_generators(&dep).unwrap_err(),
            TableauError::DependentGenerators
        );
    }

    #[test]
    fn overlap_is_order_invariant() {
        let mut t = StabilizerTableau::zero_state(3);
        t.apply(CliffordGate::H(0)).unwrap();
        t.apply(CliffordGate::Cnot(0, 1)).unwrap();
        let gens = vec![
            PauliString::on_support(3, PauliKind::X, &[0, 1]).unwrap(),
            z(3, 2),
            PauliString::on_support(3, PauliKind::Z, &[0, 1]).unwrap(),
        ];
        let mut perm = gens.clone();
        perm.reverse();
        let a = t.overlap_with_generators(&gens).unwrap();
        let b = t.overlap_with_generators(&perm).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invariants_hold_under_random_circuits() {
        let mut r = rng(7);
        for _ in 0..20 {
            let mut t = StabilizerTableau::zero_state(5);
            for step in 0..30 {
                match step % 4 {
                    0 => t.apply(CliffordGate::H(step % 5)).unwrap(),
                    1 => t.apply(CliffordGate::S((step + 1) % 5)).unwrap(),
                    2 => t.apply(CliffordGate::Cnot(step % 5, (step + 2) % 5)).unwrap(),
                    _ => {
                        t.measure_single(step % 5, PauliKind::Z, &mut r).unwrap();
                    }
                }
            }
            t.check_invariants().unwrap();
        }
    }
}
