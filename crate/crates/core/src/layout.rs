//! Thin rotated-surface-code strips: qubit layout, stabilizer sets, logical
//! operators, connectivity and the four-layer syndrome-extraction schedule.
//!
//! The strip of length `L` (odd) has data qubits `d(r,c)` on a 2×(L+1) grid,
//! indexed row-major by (row, col). Full plaquettes sit between columns c and
//! c+1: Z-type for even c, X-type for odd c. Each X-type full plaquette P_c
//! contributes weight-2 Z stabilizers above ({d(1,c), d(1,c+1)}) and below
//! ({d(0,c), d(0,c+1)}); the left and right columns carry weight-2 X
//! stabilizers. The logical X̄ runs along the bottom row; Z̄ has weight-2
//! representatives on the left and right columns. One ancilla serves each Z
//! stabilizer, and the data–ancilla CNOT pattern defines the connectivity
//! graph.
//!
//! Z stabilizers (and their ancillas, classical syndrome bits, and the
//! defect-purge order) are stored in "chain order": the order in which the
//! correction walk first visits them (T1, P0, B1, P2, T3, P4, B3, ... for
//! growing L; just P0 for L = 1).

use crate::pauli::{PauliKind, PauliString};
use crate::tableau::{StabilizerTableau, TableauError};
use serde::Serialize;
use serde_json::json;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LayoutError {
    #[error("strip length must be odd and >= 1, got {0}")]
    BadLength(usize),
}

/// Kind of Z stabilizer on the strip.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ZStabKind {
    /// Weight-4 plaquette between two columns, spanning both rows.
    Full,
    /// Weight-2 pair on the top row.
    TopPair,
    /// Weight-2 pair on the bottom row.
    BottomPair,
}

/// One Z stabilizer with its ancilla and extraction schedule.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZStabilizer {
    pub id: String,
    pub kind: ZStabKind,
    /// Leftmost column of the support.
    pub col: usize,
    /// Data-qubit indices of the support.
    pub data: Vec<usize>,
    /// Global index of the measuring ancilla.
    pub ancilla: usize,
    /// CNOT layer (1..=4) for each entry of `data`.
    pub layers: Vec<u8>,
}

/// One X stabilizer (no ancilla; satisfied by initialization).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XStabilizer {
    pub id: String,
    pub data: Vec<usize>,
}

/// Geometry and operator content of one strip.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeLayout {
    l: usize,
    n_data: usize,
    z_stabilizers: Vec<ZStabilizer>,
    x_stabilizers: Vec<XStabilizer>,
    logical_x: Vec<usize>,
    logical_z_left: Vec<usize>,
    logical_z_right: Vec<usize>,
    connectivity: BTreeSet<(usize, usize)>,
    data_pos: Vec<(f64, f64)>,
    ancilla_pos: Vec<(f64, f64)>,
}

impl CodeLayout {
    /// Build the strip of odd length `l`.
    pub fn strip(l: usize) -> Result<Self, LayoutError> {
        if l == 0 || l % 2 == 0 {
            return Err(LayoutError::BadLength(l));
        }
        let cols = l + 1;
        let n_data = 2 * cols;
        let data_index = |row: usize, col: usize| row * cols + col;

        // Z stabilizers in chain order (see module docs).
        let mut specs: Vec<(String, ZStabKind, usize)> = Vec::new();
        if l == 1 {
            specs.push(("P0".into(), ZStabKind::Full, 0));
        } else {
            specs.push(("T1".into(), ZStabKind::TopPair, 1));
            specs.push(("P0".into(), ZStabKind::Full, 0));
            specs.push(("B1".into(), ZStabKind::BottomPair, 1));
            specs.push(("P2".into(), ZStabKind::Full, 2));
            let mut c = 4;
            while c <= l - 1 {
                specs.push((format!("T{}", c - 1), ZStabKind::TopPair, c - 1));
                specs.push((format!("P{c}"), ZStabKind::Full, c));
                specs.push((format!("B{}", c - 1), ZStabKind::BottomPair, c - 1));
                c += 2;
            }
        }

        let mut z_stabilizers = Vec::with_capacity(specs.len());
        let mut connectivity = BTreeSet::new();
        let mut ancilla_pos = Vec::with_capacity(specs.len());
        for (i, (id, kind, col)) in specs.into_iter().enumerate() {
            let ancilla = n_data + i;
            // Plaquette corners NW,NE,SW,SE take layers 1-4; top pairs take
            // west 1 / east 2, bottom pairs west 3 / east 4. Per layer every
            // data qubit then appears in at most one CNOT.
            let (data, layers, pos) = match kind {
                ZStabKind::Full => (
                    vec![
                        data_index(1, col),
                        data_index(1, col + 1),
                        data_index(0, col),
                        data_index(0, col + 1),
                    ],
                    vec![1, 2, 3, 4],
                    (col as f64 + 0.5, 0.5),
                ),
                ZStabKind::TopPair => (
                    vec![data_index(1, col), data_index(1, col + 1)],
                    vec![1, 2],
                    (col as f64 + 0.5, 1.7),
                ),
                ZStabKind::BottomPair => (
                    vec![data_index(0, col), data_index(0, col + 1)],
                    vec![3, 4],
                    (col as f64 + 0.5, -0.7),
                ),
            };
            for &d in &data {
                connectivity.insert((d.min(ancilla), d.max(ancilla)));
            }
            ancilla_pos.push(pos);
            z_stabilizers.push(ZStabilizer { id, kind, col, data, ancilla, layers });
        }

        let mut x_stabilizers = Vec::new();
        x_stabilizers.push(XStabilizer {
            id: "XL".into(),
            data: vec![data_index(0, 0), data_index(1, 0)],
        });
        for c in (1..l).step_by(2) {
            x_stabilizers.push(XStabilizer {
                id: format!("XP{c}"),
                data: vec![
                    data_index(0, c),
                    data_index(0, c + 1),
                    data_index(1, c),
                    data_index(1, c + 1),
                ],
            });
        }
        x_stabilizers.push(XStabilizer {
            id: "XR".into(),
            data: vec![data_index(0, l), data_index(1, l)],
        });

        let data_pos = (0..n_data).map(|i| ((i % cols) as f64, (i / cols) as f64)).collect();

        Ok(Self {
            l,
            n_data,
            z_stabilizers,
            x_stabilizers,
            logical_x: (0..cols).map(|c| data_index(0, c)).collect(),
            logical_z_left: vec![data_index(0, 0), data_index(1, 0)],
            logical_z_right: vec![data_index(0, l), data_index(1, l)],
            connectivity,
            data_pos,
            ancilla_pos,
        })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn id(&self) -> String {
        format!("strip-l{}", self.l)
    }

    pub fn n_data(&self) -> usize {
        self.n_data
    }

    pub fn n_ancilla(&self) -> usize {
        self.z_stabilizers.len()
    }

    /// Total qubits: data plus one ancilla per Z stabilizer.
    pub fn n_qubits(&self) -> usize {
        self.n_data + self.n_ancilla()
    }

    pub fn columns(&self) -> usize {
        self.l + 1
    }

    /// Global index of data qubit (row, col); row 0 is the bottom row.
    pub fn data_index(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < 2 && col <= self.l);
        row * self.columns() + col
    }

    pub fn z_stabilizers(&self) -> &[ZStabilizer] {
        &self.z_stabilizers
    }

    pub fn x_stabilizers(&self) -> &[XStabilizer] {
        &self.x_stabilizers
    }

    pub fn z_index_of(&self, id: &str) -> Option<usize> {
        self.z_stabilizers.iter().position(|z| z.id == id)
    }

    pub fn logical_x(&self) -> &[usize] {
        &self.logical_x
    }

    pub fn logical_z_left(&self) -> &[usize] {
        &self.logical_z_left
    }

    pub fn logical_z_right(&self) -> &[usize] {
        &self.logical_z_right
    }

    pub fn connectivity(&self) -> &BTreeSet<(usize, usize)> {
        &self.connectivity
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.connectivity.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, q: usize) -> Vec<usize> {
        self.connectivity
            .iter()
            .filter_map(|&(a, b)| {
                if a == q {
                    Some(b)
                } else if b == q {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Z stabilizers (chain order) containing data qubit `q`.
    pub fn z_stabs_on(&self, q: usize) -> Vec<usize> {
        self.z_stabilizers
            .iter()
            .enumerate()
            .filter_map(|(i, z)| z.data.contains(&q).then_some(i))
            .collect()
    }

    /// The extraction schedule as four layers of (data, ancilla) CNOTs.
    pub fn schedule_layers(&self) -> [Vec<(usize, usize)>; 4] {
        let mut layers: [Vec<(usize, usize)>; 4] = Default::default();
        for z in &self.z_stabilizers {
            for (&d, &layer) in z.data.iter().zip(&z.layers) {
                layers[layer as usize - 1].push((d, z.ancilla));
            }
        }
        layers
    }

    fn pauli_on(&self, kind: PauliKind, support: &[usize]) -> PauliString {
        PauliString::on_support(self.n_qubits(), kind, support).expect("support in range")
    }

    /// S^Z as Pauli operators over the full (data + ancilla) index space.
    pub fn z_generators(&self) -> Vec<PauliString> {
        self.z_stabilizers.iter().map(|z| self.pauli_on(PauliKind::Z, &z.data)).collect()
    }

    /// S^X over the full index space.
    pub fn x_generators(&self) -> Vec<PauliString> {
        self.x_stabilizers.iter().map(|x| self.pauli_on(PauliKind::X, &x.data)).collect()
    }

    pub fn logical_x_pauli(&self) -> PauliString {
        self.pauli_on(PauliKind::X, &self.logical_x)
    }

    pub fn logical_z_left_pauli(&self) -> PauliString {
        self.pauli_on(PauliKind::Z, &self.logical_z_left)
    }

    pub fn logical_z_right_pauli(&self) -> PauliString {
        self.pauli_on(PauliKind::Z, &self.logical_z_right)
    }

    /// The 2(L+1) generators stabilizing the target logical |+̄⟩ state on the
    /// data qubits: S^X ∪ S^Z ∪ {X̄}.
    pub fn target_generators(&self) -> Vec<PauliString> {
        let mut gens = self.x_generators();
        gens.extend(self.z_generators());
        gens.push(self.logical_x_pauli());
        gens
    }

    /// −Σ⟨S⟩ − Σ⟨S′⟩ with each stabilizer expectation in {−1, 0, +1}.
    pub fn energy(&self, t: &StabilizerTableau) -> Result<f64, TableauError> {
        let mut e = 0i64;
        for g in self.x_generators().iter().chain(self.z_generators().iter()) {
            e -= i64::from(t.expectation(g)?);
        }
        Ok(e as f64)
    }

    /// Z-stabilizer/data incidence matrix H_Z: one row per Z stabilizer in
    /// chain order, columns over data qubits.
    pub fn z_parity_check(&self) -> Vec<crate::bits::BitVec> {
        self.z_stabilizers
            .iter()
            .map(|z| crate::bits::BitVec::from_support(self.n_data, &z.data))
            .collect()
    }

    /// Structured layout document (stable field names; see README).
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "id": self.id(),
            "l": self.l,
            "n_data": self.n_data,
            "n_ancilla": self.n_ancilla(),
            "n_qubits": self.n_qubits(),
            "data_qubits": (0..self.n_data).map(|i| json!({
                "index": i,
                "row": i / self.columns(),
                "col": i % self.columns(),
                "pos": [self.data_pos[i].0, self.data_pos[i].1],
            })).collect::<Vec<_>>(),
            "ancilla_qubits": self.z_stabilizers.iter().enumerate().map(|(i, z)| json!({
                "index": z.ancilla,
                "stabilizer": z.id,
                "pos": [self.ancilla_pos[i].0, self.ancilla_pos[i].1],
            })).collect::<Vec<_>>(),
            "z_stabilizers": self.z_stabilizers.iter().map(|z| json!({
                "id": z.id,
                "kind": z.kind,
                "data": z.data,
                "ancilla": z.ancilla,
                "layers": z.layers,
            })).collect::<Vec<_>>(),
            "x_stabilizers": self.x_stabilizers.iter().map(|x| json!({
                "id": x.id,
                "data": x.data,
            })).collect::<Vec<_>>(),
            "logical_x": self.logical_x,
            "logical_z_left": self.logical_z_left,
            "logical_z_right": self.logical_z_right,
            "connectivity": self.connectivity.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
        })
    }

    /// Stable content hash of the layout document (FNV-1a over canonical JSON).
    pub fn hash(&self) -> String {
        let text = self.to_json().to_string();
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in text.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}
