//! Why depth-4 local unitaries cap at fidelity 1/2: past causal cones on the
//! connectivity graph, connected correlations, and the POVM (Bhattacharyya)
//! bound, plus a random-circuit harness that stress-tests the bound on
//! exactly solvable Clifford samples.
//!
//! The POVM elements are the four products π_L^± π_R^± of projectors onto
//! the ±1 eigenspaces of the left/right logical-Z representatives. The ideal
//! state gives p = (1/2, 0, 0, 1/2); any state produced from a product state
//! by a circuit whose Z̄_L and Z̄_R cones are disjoint gives a product-form
//! q = (ab, a(1−b), (1−a)b, (1−a)(1−b)), and the Bhattacharyya overlap of
//! those two distributions never exceeds 1/2.

use crate::layout::CodeLayout;
use crate::rng::shot_rng;
use crate::tableau::{BasisState, CliffordGate, StabilizerTableau, TableauError};
use once_cell::sync::Lazy;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BoundError {
    #[error("not a probability vector: {0}")]
    NotProbabilities(String),
    #[error("grid step {0} outside (0, 0.01]")]
    BadGridStep(f64),
}

/// Qubits reachable from `support` in at most `depth` neighborhood-growth
/// steps on the connectivity graph (one step per layer of two-qubit gates).
pub fn past_cone(layout: &CodeLayout, support: &[usize], depth: usize) -> BTreeSet<usize> {
    let mut cone: BTreeSet<usize> = support.iter().copied().collect();
    for _ in 0..depth {
        let frontier: Vec<usize> = cone.iter().copied().collect();
        for q in frontier {
            cone.extend(layout.neighbors(q));
        }
    }
    cone
}

/// Cone membership of both logical-Z representatives and their overlap
/// verdict at a given depth.
#[derive(Clone, Debug, Serialize)]
pub struct ConeReport {
    pub layout: String,
    pub depth: usize,
    pub left_cone: Vec<usize>,
    pub right_cone: Vec<usize>,
    pub disjoint: bool,
}

pub fn cones_disjoint(layout: &CodeLayout, depth: usize) -> ConeReport {
    let left = past_cone(layout, layout.logical_z_left(), depth);
    let right = past_cone(layout, layout.logical_z_right(), depth);
    let disjoint = left.is_disjoint(&right);
    ConeReport {
        layout: layout.id(),
        depth,
        left_cone: left.into_iter().collect(),
        right_cone: right.into_iter().collect(),
        disjoint,
    }
}

/// POVM probabilities of the ideal |+̄⟩ state: (1/2, 0, 0, 1/2).
pub fn ideal_povm() -> [f64; 4] {
    [0.5, 0.0, 0.0, 0.5]
}

/// Product-form POVM vector (ab, a(1−b), (1−a)b, (1−a)(1−b)).
pub fn product_form(a: f64, b: f64) -> [f64; 4] {
    [a * b, a * (1.0 - b), (1.0 - a) * b, (1.0 - a) * (1.0 - b)]
}

fn check_probabilities(v: &[f64; 4]) -> Result<(), BoundError> {
    if v.iter().any(|&p| !(0.0..=1.0 + 1e-12).contains(&p) || p.is_nan()) {
        return Err(BoundError::NotProbabilities(format!("{v:?}")));
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(BoundError::NotProbabilities(format!("{v:?} sums to {sum}")));
    }
    Ok(())
}

/// Fidelity ceiling (Σ_j √(p_j q_j))² from two POVM outcome distributions.
pub fn bhattacharyya_bound(p: &[f64; 4], q: &[f64; 4]) -> Result<f64, BoundError> {
    check_probabilities(p)?;
    check_probabilities(q)?;
    let s: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    Ok(s * s)
}

/// Closed form of the bound against product-form q: ½(√(ab) + √((1−a)(1−b)))².
pub fn product_form_bound_closed(a: f64, b: f64) -> f64 {
    let dot = (a * b).sqrt() + ((1.0 - a) * (1.0 - b)).sqrt();
    0.5 * dot * dot
}

/// Grid maximum over (a, b) ∈ [0,1]² of the Bhattacharyya bound against the
/// ideal distribution; equals 1/2 (attained along a = b).
pub fn max_product_form_bound(grid_step: f64) -> Result<f64, BoundError> {
    if !(grid_step > 0.0 && grid_step <= 0.01) {
        return Err(BoundError::BadGridStep(grid_step));
    }
    let n = (1.0 / grid_step).round() as usize;
    let p = ideal_povm();
    let mut best = 0.0f64;
    for i in 0..=n {
        let a = i as f64 / n as f64;
        for j in 0..=n {
            let b = j as f64 / n as f64;
            let bound = bhattacharyya_bound(&p, &product_form(a, b))?;
            best = best.max(bound);
        }
    }
    Ok(best)
}

/// POVM probabilities of a tableau state over π_L^± π_R^±, plus the product
/// marginals a = Pr[π_L^+], b = Pr[π_R^+].
#[derive(Clone, Debug, Serialize)]
pub struct PovmProfile {
    pub p: [f64; 4],
    pub q: [f64; 4],
    pub a: f64,
    pub b: f64,
}

impl PovmProfile {
    /// Largest deviation of `q` from the product form rebuilt from (a, b).
    pub fn product_gap(&self) -> f64 {
        let pf = product_form(self.a, self.b);
        self.q.iter().zip(&pf).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }
}

pub fn povm_profile(t: &StabilizerTableau, layout: &CodeLayout) -> Result<PovmProfile, TableauError> {
    let zl = layout.logical_z_left_pauli();
    let zr = layout.logical_z_right_pauli();
    let el = f64::from(t.expectation(&zl)?);
    let er = f64::from(t.expectation(&zr)?);
    let elr = f64::from(t.expectation(&zl.mul(&zr))?);
    let q = [
        (1.0 + el + er + elr) / 4.0,
        (1.0 + el - er - elr) / 4.0,
        (1.0 - el + er - elr) / 4.0,
        (1.0 - el - er + elr) / 4.0,
    ];
    Ok(PovmProfile { p: ideal_povm(), q, a: q[0] + q[1], b: q[0] + q[2] })
}

/// ⟨Z̄_L Z̄_R⟩ − ⟨Z̄_L⟩⟨Z̄_R⟩ with each expectation read from the
/// stabilizer group (exact: each factor is −1, 0 or +1).
pub fn connected_correlation(
    t: &StabilizerTableau,
    layout: &CodeLayout,
) -> Result<f64, TableauError> {
    let zl = layout.logical_z_left_pauli();
    let zr = layout.logical_z_right_pauli();
    let joint = f64::from(t.expectation(&zl.mul(&zr))?);
    let el = f64::from(t.expectation(&zl)?);
    let er = f64::from(t.expectation(&zr)?);
    Ok(joint - el * er)
}

// ---------------------------------------------------------------------------
// Random-circuit falsification harness.

/// The full two-qubit Clifford group (11520 elements), each stored as a
/// short generator sequence on qubits (0, 1). Built once by breadth-first
/// closure over {H, S, CNOT} and reused for uniform sampling.
static TWO_QUBIT_CLIFFORDS: Lazy<Vec<Vec<CliffordGate>>> = Lazy::new(|| {
    use std::collections::HashMap;
    let gens = [
        CliffordGate::H(0),
        CliffordGate::H(1),
        CliffordGate::S(0),
        CliffordGate::S(1),
        CliffordGate::Cnot(0, 1),
        CliffordGate::Cnot(1, 0),
    ];
    let key = |t: &StabilizerTableau| -> Vec<u8> {
        let mut k = Vec::new();
        for row in t.stabilizers().iter().chain(t.destabilizers()) {
            for q in 0..2 {
                k.push(row.x_bits().get(q) as u8);
                k.push(row.z_bits().get(q) as u8);
            }
            k.push(row.phase_exp());
        }
        k
    };
    let start = StabilizerTableau::zero_state(2);
    let mut seen: HashMap<Vec<u8>, Vec<CliffordGate>> = HashMap::new();
    seen.insert(key(&start), Vec::new());
    let mut frontier = vec![(start, Vec::new())];
    while let Some((t, seq)) = frontier.pop() {
        for g in gens {
            let mut t2 = t.clone();
            t2.apply(g).unwrap();
            let k = key(&t2);
            if !seen.contains_key(&k) {
                let mut seq2 = seq.clone();
                seq2.push(g);
                seen.insert(k, seq2.clone());
                frontier.push((t2, seq2));
            }
        }
    }
    // sort by canonical key so sampled indices are stable across runs
    let mut entries: Vec<(Vec<u8>, Vec<CliffordGate>)> = seen.into_iter().collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    entries.into_iter().map(|(_, seq)| seq).collect()
});

fn remap(g: CliffordGate, a: usize, b: usize) -> CliffordGate {
    let m = |q: usize| if q == 0 { a } else { b };
    match g {
        CliffordGate::H(q) => CliffordGate::H(m(q)),
        CliffordGate::X(q) => CliffordGate::X(m(q)),
        CliffordGate::Z(q) => CliffordGate::Z(m(q)),
        CliffordGate::S(q) => CliffordGate::S(m(q)),
        CliffordGate::Cnot(c, t) => CliffordGate::Cnot(m(c), m(t)),
    }
}

/// Apply a uniformly random two-qubit Clifford to qubits (a, b).
fn random_two_qubit_clifford<R: RngCore>(
    t: &mut StabilizerTableau,
    a: usize,
    b: usize,
    rng: &mut R,
) {
    let table = &*TWO_QUBIT_CLIFFORDS;
    let seq = &table[rng.gen_range(0..table.len())];
    for &g in seq {
        t.apply(remap(g, a, b)).unwrap();
    }
}

/// A random product state: each qubit in a uniformly chosen single-qubit
/// stabilizer state (one of the six Pauli eigenstates).
fn random_product_state<R: RngCore>(n: usize, rng: &mut R) -> StabilizerTableau {
    let mut t = StabilizerTableau::zero_state(n);
    for q in 0..n {
        match rng.gen_range(0..6u8) {
            0 => {} // |0⟩
            1 => t.apply(CliffordGate::X(q)).unwrap(), // |1⟩
            2 => t.apply(CliffordGate::H(q)).unwrap(), // |+⟩
            3 => {
                t.apply(CliffordGate::X(q)).unwrap();
                t.apply(CliffordGate::H(q)).unwrap(); // |−⟩
            }
            4 => {
                t.apply(CliffordGate::H(q)).unwrap();
                t.apply(CliffordGate::S(q)).unwrap(); // |+i⟩
            }
            _ => {
                t.apply(CliffordGate::X(q)).unwrap();
                t.apply(CliffordGate::H(q)).unwrap();
                t.apply(CliffordGate::S(q)).unwrap(); // |−i⟩
            }
        }
    }
    t
}

/// One depth-`depth` connectivity-respecting random circuit applied to a
/// random product input. Each layer is a random partial matching on the
/// connectivity edges dressed with uniformly random two-qubit Cliffords.
pub fn sample_random_state<R: RngCore>(
    layout: &CodeLayout,
    depth: usize,
    rng: &mut R,
) -> StabilizerTableau {
    let mut t = random_product_state(layout.n_qubits(), rng);
    let edges: Vec<(usize, usize)> = layout.connectivity().iter().copied().collect();
    for _ in 0..depth {
        let mut order = edges.clone();
        order.shuffle(rng);
        let mut used = vec![false; layout.n_qubits()];
        for (a, b) in order {
            if !used[a] && !used[b] && rng.gen_range(0..10u8) < 8 {
                used[a] = true;
                used[b] = true;
                random_two_qubit_clifford(&mut t, a, b, rng);
            }
        }
    }
    t
}

/// The extraction-style state: run the actual depth-4 CNOT schedule on the
/// all-|+⟩ data / all-|0⟩ ancilla input, with no measurement or correction.
/// Included in the harness as a structured sample.
fn extraction_state(layout: &CodeLayout) -> StabilizerTableau {
    let mut basis = vec![BasisState::XPlus; layout.n_data()];
    basis.extend(vec![BasisState::ZPlus; layout.n_ancilla()]);
    let mut t = StabilizerTableau::new(layout.n_qubits(), &basis).unwrap();
    for layer in layout.schedule_layers() {
        for (d, a) in layer {
            t.apply(CliffordGate::Cnot(d, a)).unwrap();
        }
    }
    t
}

/// Relay CNOTs (data–ancilla–data, three layers, ancilla returned to |0⟩)
/// turn every weight-2 stabilizer pair into a Bell pair, satisfying both
/// weight-2 sectors, the bulk X plaquettes and X̄ — everything except the
/// full Z plaquettes (fidelity 2^-3 at L = 5).
fn paired_bell_state(layout: &CodeLayout) -> StabilizerTableau {
    let mut basis = vec![BasisState::ZPlus; layout.n_qubits()];
    // Bell sources in |+⟩: the west qubit of each T/B pair.
    for z in layout.z_stabilizers() {
        if z.kind != crate::layout::ZStabKind::Full {
            basis[z.data[0]] = BasisState::XPlus;
        }
    }
    // boundary columns stay |+⟩
    for &q in layout.x_stabilizers().first().map(|x| &x.data).into_iter().flatten() {
        basis[q] = BasisState::XPlus;
    }
    for &q in layout.x_stabilizers().last().map(|x| &x.data).into_iter().flatten() {
        basis[q] = BasisState::XPlus;
    }
    let mut t = StabilizerTableau::new(layout.n_qubits(), &basis).unwrap();
    for z in layout.z_stabilizers() {
        if z.kind != crate::layout::ZStabKind::Full {
            let (w, e, a) = (z.data[0], z.data[1], z.ancilla);
            t.apply(CliffordGate::Cnot(w, a)).unwrap();
            t.apply(CliffordGate::Cnot(a, e)).unwrap();
            t.apply(CliffordGate::Cnot(w, a)).unwrap();
        }
    }
    t
}

/// The maximizer of the depth-4 ceiling at L = 5: fidelity exactly 1/2.
///
/// Dropping the middle Z plaquette P2 from the target group (and adding
/// X on {d(0,0), d(0,1), d(0,2)}, which commutes with everything else)
/// splits the state into two mirror-image 6-qubit blocks, columns 0–2 and
/// 3–5. Each block is built in four layers by a sequential-GHZ walk: the
/// full plaquette's ancilla starts in |+⟩, CNOTs its bit through three
/// corners, and is swapped out into the fourth, while the weight-2
/// ancillas copy the just-Hadamarded corners outward (CNOT then SWAP, two
/// layers, ancilla left in |0⟩). Every ancilla ends clean, all two-qubit
/// gates sit on connectivity edges, and the two blocks run in parallel, so
/// the whole state needs exactly four layers. It shares 11 of the 12
/// target generators, hence fidelity 2^-1 — the POVM ceiling is tight.
fn half_fidelity_state(layout: &CodeLayout) -> Option<StabilizerTableau> {
    if layout.l() != 5 {
        return None;
    }
    let mut t = StabilizerTableau::zero_state(layout.n_qubits());
    let anc = |id: &str| layout.z_stabilizers()[layout.z_index_of(id).unwrap()].ancilla;
    let swap = |t: &mut StabilizerTableau, a: usize, b: usize| {
        t.apply(CliffordGate::Cnot(a, b)).unwrap();
        t.apply(CliffordGate::Cnot(b, a)).unwrap();
        t.apply(CliffordGate::Cnot(a, b)).unwrap();
    };
    // (plaquette ancilla, top/bottom pair ancillas, plaquette inner column,
    //  boundary column, pair copy column): left block and its mirror
    let blocks = [
        (anc("P0"), anc("T1"), anc("B1"), 1usize, 0usize, 2usize),
        (anc("P4"), anc("T3"), anc("B3"), 4, 5, 3),
    ];
    for (a, c_top, c_bot, inner, outer, copy) in blocks {
        let d = |r, c| layout.data_index(r, c);
        t.apply(CliffordGate::H(a)).unwrap();
        // layer 1
        t.apply(CliffordGate::Cnot(a, d(1, inner))).unwrap();
        t.apply(CliffordGate::H(d(1, inner))).unwrap();
        // layer 2
        t.apply(CliffordGate::Cnot(a, d(0, inner))).unwrap();
        t.apply(CliffordGate::Cnot(d(1, inner), c_top)).unwrap();
        t.apply(CliffordGate::H(d(0, inner))).unwrap();
        // layer 3
        t.apply(CliffordGate::Cnot(a, d(0, outer))).unwrap();
        swap(&mut t, c_top, d(1, copy));
        t.apply(CliffordGate::Cnot(d(0, inner), c_bot)).unwrap();
        // layer 4
        swap(&mut t, a, d(1, outer));
        swap(&mut t, c_bot, d(0, copy));
        t.apply(CliffordGate::H(d(0, outer))).unwrap();
        t.apply(CliffordGate::H(d(1, outer))).unwrap();
    }
    Some(t)
}

/// Per-sample results of the falsification harness.
#[derive(Clone, Debug, Serialize)]
pub struct HarnessSample {
    pub fidelity: f64,
    pub bound: f64,
    pub product_gap: f64,
}

/// Aggregate report over all samples.
#[derive(Clone, Debug, Serialize)]
pub struct HarnessReport {
    pub n_samples: usize,
    pub depth: usize,
    pub cones_disjoint: bool,
    pub max_fidelity: f64,
    /// Samples where exact fidelity exceeded the Bhattacharyya bound.
    pub bound_violations: usize,
    /// Largest |q − product_form(a, b)|∞ over samples (cones disjoint ⇒ 0).
    pub max_product_gap: f64,
}

/// Evaluate `n_samples` depth-`depth` connectivity-respecting Clifford
/// circuits on product inputs: exact fidelity with |+̄⟩, the POVM bound and
/// the product-form gap for each. Three structured samples — the
/// half-fidelity construction, the relay Bell-pair state and the bare
/// extraction state — are included; the rest are random.
pub fn random_circuit_harness(
    layout: &CodeLayout,
    depth: usize,
    n_samples: usize,
    master_seed: u64,
) -> Result<HarnessReport, TableauError> {
    let disjoint = cones_disjoint(layout, depth).disjoint;
    let samples: Vec<HarnessSample> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = shot_rng(master_seed, i);
            let t = match i {
                0 if depth >= 4 => match half_fidelity_state(layout) {
                    Some(t) => t,
                    None => paired_bell_state(layout),
                },
                1 => paired_bell_state(layout),
                2 => extraction_state(layout),
                _ => sample_random_state(layout, depth, &mut rng),
            };
            let fid = crate::fidelity::exact_fidelity(&t, layout)?;
            let profile = povm_profile(&t, layout)?;
            let bound = bhattacharyya_bound(&profile.p, &profile.q)
                .expect("tableau expectations form probabilities");
            Ok(HarnessSample { fidelity: fid, bound, product_gap: profile.product_gap() })
        })
        .collect::<Result<_, TableauError>>()?;
    let max_fidelity = samples.iter().map(|s| s.fidelity).fold(0.0, f64::max);
    let bound_violations =
        samples.iter().filter(|s| s.fidelity > s.bound + 1e-12).count();
    let max_product_gap = samples.iter().map(|s| s.product_gap).fold(0.0, f64::max);
    Ok(HarnessReport {
        n_samples,
        depth,
        cones_disjoint: disjoint,
        max_fidelity,
        bound_violations,
        max_product_gap,
    })
}
