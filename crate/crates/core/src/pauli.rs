//! Bit-packed n-qubit Pauli operators.
//!
//! A `PauliString` is stored as two bit vectors (X and Z components) plus a
//! phase exponent: the operator is `i^phase · ⊗_j σ(x_j, z_j)` with
//! `σ(0,0) = I`, `σ(1,0) = X`, `σ(0,1) = Z`, `σ(1,1) = Y`. Hermitian
//! operators therefore carry phase 0 (+1) or 2 (−1), which is the only case
//! the stabilizer machinery admits for its rows.
//!
//! Products are computed limb-parallel: the component bits XOR, and the
//! mod-4 phase correction is a sum of three AND-popcounts (see `mul`).

use crate::bits::BitVec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PauliError {
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("operator is not Hermitian (phase exponent {0} is odd)")]
    NotHermitian(u8),
    #[error("operand sizes differ: {0} vs {1} qubits")]
    SizeMismatch(usize, usize),
}

/// Single-qubit Pauli kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliKind {
    I,
    X,
    Y,
    Z,
}

impl PauliKind {
    fn bits(self) -> (bool, bool) {
        match self {
            PauliKind::I => (false, false),
            PauliKind::X => (true, false),
            PauliKind::Y => (true, true),
            PauliKind::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliKind::I,
            (true, false) => PauliKind::X,
            (true, true) => PauliKind::Y,
            (false, true) => PauliKind::Z,
        }
    }
}

/// An n-qubit Pauli operator `i^phase_exp · ⊗ σ(x, z)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    n_qubits: usize,
    x_bits: BitVec,
    z_bits: BitVec,
    phase_exp: u8, // power of i, mod 4
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            x_bits: BitVec::zeros(n_qubits),
            z_bits: BitVec::zeros(n_qubits),
            phase_exp: 0,
        }
    }

    pub fn from_parts(n_qubits: usize, x_bits: BitVec, z_bits: BitVec, phase_exp: u8) -> Self {
        assert_eq!(x_bits.len(), n_qubits);
        assert_eq!(z_bits.len(), n_qubits);
        Self { n_qubits, x_bits, z_bits, phase_exp: phase_exp % 4 }
    }

    /// Weight-1 operator `kind` on `qubit`.
    pub fn single(n_qubits: usize, qubit: usize, kind: PauliKind) -> Result<Self, PauliError> {
        if qubit >= n_qubits {
            return Err(PauliError::QubitOutOfRange { index: qubit, n_qubits });
        }
        let mut p = Self::identity(n_qubits);
        let (x, z) = kind.bits();
        p.x_bits.set(qubit, x);
        p.z_bits.set(qubit, z);
        Ok(p)
    }

    /// Uniform-kind operator on a support set, e.g. a plaquette stabilizer.
    pub fn on_support(
        n_qubits: usize,
        kind: PauliKind,
        support: &[usize],
    ) -> Result<Self, PauliError> {
        let mut p = Self::identity(n_qubits);
        let (x, z) = kind.bits();
        for &q in support {
            if q >= n_qubits {
                return Err(PauliError::QubitOutOfRange { index: q, n_qubits });
            }
            p.x_bits.set(q, x);
            p.z_bits.set(q, z);
        }
        Ok(p)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_bits(&self) -> &BitVec {
        &self.x_bits
    }

    pub fn z_bits(&self) -> &BitVec {
        &self.z_bits
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase_exp
    }

    pub fn kind_at(&self, qubit: usize) -> PauliKind {
        PauliKind::from_bits(self.x_bits.get(qubit), self.z_bits.get(qubit))
    }

    /// Number of non-identity sites.
    pub fn weight(&self) -> usize {
        let mut u = self.x_bits.clone();
        u.xor_assign(&self.z_bits);
        (u.count_ones() + self.x_bits.and_count(&self.z_bits)) as usize
    }

    pub fn is_identity_support(&self) -> bool {
        self.x_bits.is_zero() && self.z_bits.is_zero()
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase_exp % 2 == 0
    }

    /// +1 or −1 for a Hermitian operator.
    pub fn sign(&self) -> Result<i8, PauliError> {
        match self.phase_exp {
            0 => Ok(1),
            2 => Ok(-1),
            p => Err(PauliError::NotHermitian(p)),
        }
    }

    /// Multiply the phase by i^k.
    pub fn mul_phase(&mut self, k: u8) {
        self.phase_exp = (self.phase_exp + k) % 4;
    }

    pub fn negate(&mut self) {
        self.mul_phase(2);
    }

    /// True iff `self` and `other` commute (symplectic product is even).
    pub fn commutes_with(&self, other: &Self) -> bool {
        debug_assert_eq!(self.n_qubits, other.n_qubits);
        self.x_bits.and_parity(&other.z_bits) == self.z_bits.and_parity(&other.x_bits)
    }

    /// In-place product `self ← self · other` with exact phase tracking.
    pub fn mul_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.n_qubits, other.n_qubits);
        // i^e_r σ_r = (i^e_p σ_p)(i^e_q σ_q) with
        // e_r = e_p + e_q + |x_p∧z_p| + |x_q∧z_q| + 2|z_p∧x_q| − |x_r∧z_r| (mod 4)
        let y_self = self.x_bits.and_count(&self.z_bits);
        let y_other = other.x_bits.and_count(&other.z_bits);
        let anti = self.z_bits.and_count(&other.x_bits);
        self.x_bits.xor_assign(&other.x_bits);
        self.z_bits.xor_assign(&other.z_bits);
        let y_prod = self.x_bits.and_count(&self.z_bits);
        let e = u32::from(self.phase_exp) + u32::from(other.phase_exp) + y_self + y_other
            + 2 * anti
            + 3 * y_prod; // −1 ≡ 3 (mod 4)
        self.phase_exp = (e % 4) as u8;
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r.mul_assign(other);
        r
    }

    /// Concatenated (x | z) component row, used for GF(2) rank checks.
    pub fn symplectic_row(&self) -> BitVec {
        let mut row = BitVec::zeros(2 * self.n_qubits);
        for i in 0..self.n_qubits {
            if self.x_bits.get(i) {
                row.set(i, true);
            }
            if self.z_bits.get(i) {
                row.set(self.n_qubits + i, true);
            }
        }
        row
    }

    // Clifford conjugations used by the tableau. Phase updates follow the
    // usual sign rules for Hermitian rows (phase stays in {0, 2}).

    pub(crate) fn conj_h(&mut self, q: usize) {
        let x = self.x_bits.get(q);
        let z = self.z_bits.get(q);
        if x && z {
            self.negate(); // Y → −Y
        }
        self.x_bits.set(q, z);
        self.z_bits.set(q, x);
    }

    pub(crate) fn conj_s(&mut self, q: usize) {
        let x = self.x_bits.get(q);
        let z = self.z_bits.get(q);
        if x && z {
            self.negate(); // Y → −X
        }
        self.z_bits.set(q, x ^ z);
    }

    pub(crate) fn conj_x(&mut self, q: usize) {
        if self.z_bits.get(q) {
            self.negate();
        }
    }

    pub(crate) fn conj_z(&mut self, q: usize) {
        if self.x_bits.get(q) {
            self.negate();
        }
    }

    pub(crate) fn conj_cnot(&mut self, c: usize, t: usize) {
        let xc = self.x_bits.get(c);
        let zc = self.z_bits.get(c);
        let xt = self.x_bits.get(t);
        let zt = self.z_bits.get(t);
        if xc && zt && (xt == zc) {
            self.negate();
        }
        self.x_bits.set(t, xt ^ xc);
        self.z_bits.set(c, zc ^ zt);
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.phase_exp {
            0 => write!(f, "+")?,
            1 => write!(f, "+i")?,
            2 => write!(f, "-")?,
            3 => write!(f, "-i")?,
            _ => unreachable!(),
        }
        for q in 0..self.n_qubits {
            let c = match self.kind_at(q) {
                PauliKind::I => '.',
                PauliKind::X => 'X',
                PauliKind::Y => 'Y',
                PauliKind::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(q: PauliKind) -> PauliString {
        PauliString::single(1, 0, q).unwrap()
    }

    #[test]
    fn single_qubit_products_match_pauli_algebra() {
        use PauliKind::*;
        // (a, b, product kind, phase exponent of i)
        let table = [
            (X, X, I, 0),
            (Y, Y, I, 0),
            (Z, Z, I, 0),
            (X, Y, Z, 1),
            (Y, X, Z, 3),
            (Y, Z, X, 1),
            (Z, Y, X, 3),
            (Z, X, Y, 1),
            (X, Z, Y, 3),
            (I, X, X, 0),
            (Y, I, Y, 0),
        ];
        for (a, b, kind, phase) in table {
            let p = single(a).mul(&single(b));
            assert_eq!(p.kind_at(0), kind, "{a:?}*{b:?}");
            assert_eq!(p.phase_exp(), phase, "{a:?}*{b:?}");
        }
    }

    #[test]
    fn commutation() {
        use PauliKind::*;
        assert!(!single(X).commutes_with(&single(Z)));
        assert!(single(X).commutes_with(&single(X)));
        let xx = PauliString::on_support(2, X, &[0, 1]).unwrap();
        let zz = PauliString::on_support(2, Z, &[0, 1]).unwrap();
        assert!(xx.commutes_with(&zz));
        let zi = PauliString::single(2, 0, Z).unwrap();
        assert!(!xx.commutes_with(&zi));
    }

    #[test]
    fn product_associativity_and_phase_consistency() {
        use PauliKind::*;
        let kinds = [I, X, Y, Z];
        for &a in &kinds {
            for &b in &kinds {
                for &c in &kinds {
                    let lhs = single(a).mul(&single(b)).mul(&single(c));
                    let rhs = single(a).mul(&single(b).mul(&single(c)));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn weight_counts_nonidentity_sites() {
        let mut p = PauliString::on_support(5, PauliKind::X, &[0, 2]).unwrap();
        p.mul_assign(&PauliString::single(5, 2, PauliKind::Z).unwrap()); // site 2 becomes Y (×i phase)
        assert_eq!(p.weight(), 2);
        assert_eq!(p.kind_at(2), PauliKind::Y);
    }

    #[test]
    fn hermitian_sign() {
        let mut z = single(PauliKind::Z);
        assert_eq!(z.sign().unwrap(), 1);
        z.negate();
        assert_eq!(z.sign().unwrap(), -1);
        let mut y_ish = single(PauliKind::X);
        y_ish.mul_phase(1);
        assert_eq!(y_ish.sign(), Err(PauliError::NotHermitian(1)));
    }
}
