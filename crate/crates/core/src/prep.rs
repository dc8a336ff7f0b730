//! Adaptive preparation of the logical |+̄⟩ state: initialization, depth-4
//! syndrome extraction, measurement into a classical register, and
//! feed-forward X corrections that purge every −1 Z-plaquette defect.
//!
//! Two correction routes are provided and cross-checked. The greedy chain
//! walks the Z stabilizers in chain order, flipping the shared data qubit
//! whenever the left stabilizer of the current step holds a defect; a
//! terminal boundary segment flushes the final defect off the strip. The
//! GF(2) solver returns any solution of `H_Z x = syndrome`; both land on the
//! same state because syndrome-matching corrections differ by an element of
//! ⟨S^X, X̄⟩, which stabilizes |+̄⟩.

use crate::bits::BitVec;
use crate::circuit::{
    execute, AdaptiveCircuit, CTerm, Condition, ExecError, Instruction, XorExpr,
};
use crate::fidelity;
use crate::gf2;
use crate::layout::CodeLayout;
use crate::pauli::PauliKind;
use crate::rng::shot_rng;
use crate::tableau::{CliffordGate, StabilizerTableau};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PrepError {
    #[error("noise probability {name}={value} outside [0, 1]")]
    BadProbability { name: &'static str, value: f64 },
    #[error("syndrome has {got} bits, expected {expected}")]
    SyndromeLengthMismatch { got: usize, expected: usize },
    #[error("H_Z x = s has no solution; layout incidence matrix is defective")]
    InconsistentSyndrome,
    #[error(transparent)]
    Exec(#[from] ExecError),
}

/// Independent-fault Pauli noise model. All probabilities in [0, 1].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Uniform non-identity single-qubit Pauli after each 1q gate.
    pub p1: f64,
    /// Uniform non-identity two-qubit Pauli (15 cases) after each CNOT.
    pub p2: f64,
    /// Flip of each recorded measurement bit.
    pub pm: f64,
    /// X fault after each qubit initialization (reset).
    pub pi: f64,
}

impl NoiseModel {
    pub fn ideal() -> Self {
        Self { p1: 0.0, p2: 0.0, pm: 0.0, pi: 0.0 }
    }

    pub fn is_zero(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0 && self.pm == 0.0 && self.pi == 0.0
    }

    pub fn validate(&self) -> Result<(), PrepError> {
        for (name, value) in
            [("p1", self.p1), ("p2", self.p2), ("pm", self.pm), ("pi", self.pi)]
        {
            if !(0.0..=1.0).contains(&value) || value.is_nan() {
                return Err(PrepError::BadProbability { name, value });
            }
        }
        Ok(())
    }
}

/// Final-measurement basis of a shot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    #[serde(rename = "x")]
    X,
    #[serde(rename = "z")]
    Z,
}

/// One step of the defect-purge walk: flip `qubit` if chain stabilizer
/// `left` holds a defect, toggling `left` and `right` (if any). `right` is
/// `None` on the terminal boundary step, where the defect leaves the strip.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorrectionStep {
    pub qubit: usize,
    pub left: usize,
    pub right: Option<usize>,
}

/// The defect-purge walk in chain order.
///
/// For L = 5 the walk is T1 — P0 — B1 — P2 — T3 — P4 — B3 through the shared
/// data qubits d(1,1), d(0,1), d(0,2), d(1,3), d(1,4), d(0,4), followed by
/// the boundary flush through d(0,4), d(0,5). Larger strips repeat the
/// middle block; processing the walk left to right purges every defect for
/// every syndrome (verified exhaustively in tests).
pub fn correction_chain(layout: &CodeLayout) -> Vec<CorrectionStep> {
    let l = layout.l();
    let d = |r, c| layout.data_index(r, c);
    let z = |id: &str| layout.z_index_of(id).expect("chain stabilizer id");
    let mut steps = Vec::new();
    if l == 1 {
        steps.push(CorrectionStep { qubit: d(0, 1), left: z("P0"), right: None });
    } else {
        steps.push(CorrectionStep { qubit: d(1, 1), left: z("T1"), right: Some(z("P0")) });
        steps.push(CorrectionStep { qubit: d(0, 1), left: z("P0"), right: Some(z("B1")) });
        steps.push(CorrectionStep { qubit: d(0, 2), left: z("B1"), right: Some(z("P2")) });
        let mut c = 2;
        while c <= l - 3 {
            let (p, t, b, pn) =
                (z(&format!("P{c}")), z(&format!("T{}", c + 1)), z(&format!("B{}", c + 1)), z(&format!("P{}", c + 2)));
            steps.push(CorrectionStep { qubit: d(1, c + 1), left: p, right: Some(t) });
            steps.push(CorrectionStep { qubit: d(1, c + 2), left: t, right: Some(pn) });
            steps.push(CorrectionStep { qubit: d(0, c + 2), left: pn, right: Some(b) });
            steps.push(CorrectionStep { qubit: d(0, c + 2), left: b, right: Some(pn) });
            c += 2;
        }
        steps.push(CorrectionStep {
            qubit: d(0, l),
            left: z(&format!("P{}", l - 1)),
            right: None,
        });
    }
    // Each step's qubit must sit in exactly the step's chain stabilizers.
    debug_assert!(steps.iter().all(|s| {
        let mut want = vec![s.left];
        want.extend(s.right);
        want.sort_unstable();
        layout.z_stabs_on(s.qubit) == want
    }));
    steps
}

/// Run the greedy purge on a syndrome, returning (correction support over
/// data qubits, leftover defects). The leftover is all-zero for every
/// syndrome on a valid strip.
pub fn simulate_chain(chain: &[CorrectionStep], syndrome: &BitVec, n_data: usize) -> (BitVec, BitVec) {
    let mut defects = syndrome.clone();
    let mut support = BitVec::zeros(n_data);
    for step in chain {
        if defects.get(step.left) {
            support.flip(step.qubit);
            defects.flip(step.left);
            if let Some(r) = step.right {
                defects.flip(r);
            }
        }
    }
    (support, defects)
}

/// Solve `H_Z x = syndrome` over GF(2), returning one correction support.
pub fn solve_correction_gf2(
    layout: &CodeLayout,
    syndrome: &BitVec,
) -> Result<Vec<usize>, PrepError> {
    let h = layout.z_parity_check();
    if syndrome.len() != h.len() {
        return Err(PrepError::SyndromeLengthMismatch { got: syndrome.len(), expected: h.len() });
    }
    let x = gf2::solve(&h, syndrome).ok_or(PrepError::InconsistentSyndrome)?;
    Ok(x.support())
}

/// Generate the full preparation program.
///
/// Layout: reset every qubit, Hadamard the data into |+⟩, run the four
/// scheduled CNOT layers, measure each ancilla into `s` in chain order
/// (resetting it afterwards), then the unrolled purge: for every chain step,
/// a conditional X on the shared data qubit plus the XOR bookkeeping that
/// updates the affected stabilizer bits.
pub fn build_prep_circuit(layout: &CodeLayout) -> AdaptiveCircuit {
    let mut c = AdaptiveCircuit::new();
    c.add_qreg("q", layout.n_qubits());
    let s0 = c.add_creg("s", layout.n_ancilla());
    for q in 0..layout.n_qubits() {
        c.push(Instruction::Reset { qubit: q });
    }
    for q in 0..layout.n_data() {
        c.push(Instruction::Gate(CliffordGate::H(q)));
    }
    for layer in layout.schedule_layers() {
        for (data, ancilla) in layer {
            c.push(Instruction::Gate(CliffordGate::Cnot(data, ancilla)));
        }
    }
    for (j, z) in layout.z_stabilizers().iter().enumerate() {
        c.push(Instruction::Measure { qubit: z.ancilla, target: s0 + j });
        c.push(Instruction::Reset { qubit: z.ancilla });
    }
    for step in correction_chain(layout) {
        c.push(Instruction::CondGate {
            cond: Condition { bit: s0 + step.left, value: true },
            gate: CliffordGate::X(step.qubit),
        });
        if let Some(r) = step.right {
            c.push(Instruction::Assign {
                target: s0 + r,
                expr: XorExpr { terms: vec![CTerm::Bit(s0 + r), CTerm::Bit(s0 + step.left)] },
            });
        }
        c.push(Instruction::Assign {
            target: s0 + step.left,
            expr: XorExpr { terms: vec![CTerm::Const(false)] },
        });
    }
    c
}

/// Everything recorded about one shot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub shot_index: u64,
    pub basis: Basis,
    pub rng_seed: u64,
    /// Pre-correction Z-stabilizer outcomes in chain order (+1 → 0, −1 → 1).
    pub syndrome: Vec<u8>,
    /// Data qubits where the feed-forward applied a net X.
    pub correction_support: Vec<usize>,
    /// Per-data-qubit ±1 outcomes in the chosen basis, by (row, col) order.
    pub final_bits: Vec<i8>,
}

/// Shot driver: compiles the preparation circuit once and runs seeded shots.
pub struct ShotRunner<'a> {
    layout: &'a CodeLayout,
    circuit: AdaptiveCircuit,
    noise: NoiseModel,
}

impl<'a> ShotRunner<'a> {
    pub fn new(layout: &'a CodeLayout, noise: NoiseModel) -> Result<Self, PrepError> {
        noise.validate()?;
        Ok(Self { layout, circuit: build_prep_circuit(layout), noise })
    }

    pub fn circuit(&self) -> &AdaptiveCircuit {
        &self.circuit
    }

    /// Run one shot on stream `(master_seed, shot_index)`.
    pub fn run(&self, basis: Basis, master_seed: u64, shot_index: u64) -> ShotRecord {
        self.run_inner(basis, master_seed, shot_index, false).0
    }

    /// As `run`, also returning the exact fidelity of the post-correction
    /// state (computed before the destructive basis measurement; consumes no
    /// randomness, so records are identical either way).
    pub fn run_with_fidelity(
        &self,
        basis: Basis,
        master_seed: u64,
        shot_index: u64,
    ) -> (ShotRecord, f64) {
        let (record, fid) = self.run_inner(basis, master_seed, shot_index, true);
        (record, fid.expect("fidelity requested"))
    }

    fn run_inner(
        &self,
        basis: Basis,
        master_seed: u64,
        shot_index: u64,
        want_fidelity: bool,
    ) -> (ShotRecord, Option<f64>) {
        let mut rng = shot_rng(master_seed, shot_index);
        let mut t = StabilizerTableau::zero_state(self.layout.n_qubits());
        let noise = (!self.noise.is_zero()).then_some(&self.noise);
        let exec = execute(&self.circuit, &mut t, &mut rng, noise)
            .expect("generated circuit executes");
        let syndrome: Vec<u8> =
            exec.measurements.iter().take(self.layout.n_ancilla()).map(|&b| u8::from(b)).collect();
        let mut support = BitVec::zeros(self.layout.n_data());
        for &idx in &exec.fired {
            if let Instruction::CondGate { gate: CliffordGate::X(q), .. } =
                &self.circuit.instructions()[idx]
            {
                support.flip(*q);
            }
        }
        let fid = want_fidelity
            .then(|| fidelity::exact_fidelity(&t, self.layout).expect("valid generators"));
        let kind = match basis {
            Basis::X => PauliKind::X,
            Basis::Z => PauliKind::Z,
        };
        let mut final_bits = Vec::with_capacity(self.layout.n_data());
        for q in 0..self.layout.n_data() {
            let m = t.measure_single(q, kind, &mut rng).expect("qubit in range");
            let mut bit = m.value;
            if crate::circuit::fault_occurs(&mut rng, self.noise.pm) {
                bit = -bit;
            }
            final_bits.push(bit);
        }
        let record = ShotRecord {
            shot_index,
            basis,
            rng_seed: master_seed,
            syndrome,
            correction_support: support.support(),
            final_bits,
        };
        (record, fid)
    }
}

/// Run a one-off shot (compiles the circuit internally).
pub fn run_shot(
    layout: &CodeLayout,
    noise: NoiseModel,
    basis: Basis,
    master_seed: u64,
    shot_index: u64,
) -> Result<ShotRecord, PrepError> {
    Ok(ShotRunner::new(layout, noise)?.run(basis, master_seed, shot_index))
}

/// Run `n_x` X-basis shots (streams 0..n_x) followed by `n_z` Z-basis shots
/// (streams n_x..n_x+n_z), in parallel, merged by shot index.
pub fn run_experiment(
    layout: &CodeLayout,
    noise: NoiseModel,
    n_x: u64,
    n_z: u64,
    master_seed: u64,
) -> Result<Vec<ShotRecord>, PrepError> {
    let runner = ShotRunner::new(layout, noise)?;
    let records = (0..n_x + n_z)
        .into_par_iter()
        .map(|i| {
            let basis = if i < n_x { Basis::X } else { Basis::Z };
            runner.run(basis, master_seed, i)
        })
        .collect();
    Ok(records)
}

/// As `run_experiment`, additionally returning the mean exact fidelity of
/// the post-correction states across all shots.
pub fn run_experiment_with_fidelity(
    layout: &CodeLayout,
    noise: NoiseModel,
    n_x: u64,
    n_z: u64,
    master_seed: u64,
) -> Result<(Vec<ShotRecord>, f64), PrepError> {
    let runner = ShotRunner::new(layout, noise)?;
    let pairs: Vec<(ShotRecord, f64)> = (0..n_x + n_z)
        .into_par_iter()
        .map(|i| {
            let basis = if i < n_x { Basis::X } else { Basis::Z };
            runner.run_with_fidelity(basis, master_seed, i)
        })
        .collect();
    let n = pairs.len().max(1) as f64;
    let mean_fid = pairs.iter().map(|(_, f)| f).sum::<f64>() / n;
    Ok((pairs.into_iter().map(|(r, _)| r).collect(), mean_fid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tableau::BasisState;

    fn all_plus_with_ancillas(layout: &CodeLayout) -> StabilizerTableau {
        let mut basis = vec![BasisState::XPlus; layout.n_data()];
        basis.extend(vec![BasisState::ZPlus; layout.n_ancilla()]);
        StabilizerTableau::new(layout.n_qubits(), &basis).unwrap()
    }

    #[test]
    fn noise_model_validation() {
        assert!(NoiseModel::ideal().validate().is_ok());
        let bad = NoiseModel { p1: 1.5, ..NoiseModel::ideal() };
        assert!(matches!(bad.validate(), Err(PrepError::BadProbability { name: "p1", .. })));
    }

    #[test]
    fn chain_matches_decided_l5_walk() {
        let lay = CodeLayout::strip(5).unwrap();
        let chain = correction_chain(&lay);
        let d = |r, c| lay.data_index(r, c);
        let qubits: Vec<usize> = chain.iter().map(|s| s.qubit).collect();
        assert_eq!(
            qubits,
            vec![d(1, 1), d(0, 1), d(0, 2), d(1, 3), d(1, 4), d(0, 4), d(0, 4), d(0, 5)]
        );
        assert_eq!(chain.last().unwrap().right, None);
    }

    #[test]
    fn chain_purges_all_syndromes_for_small_l() {
        for l in [1usize, 3, 5, 7, 9] {
            let lay = CodeLayout::strip(l).unwrap();
            let chain = correction_chain(&lay);
            let nz = lay.n_ancilla();
            for s in 0..(1u32 << nz) {
                let syndrome =
                    BitVec::from_bools(&(0..nz).map(|j| s >> j & 1 == 1).collect::<Vec<_>>());
                let (support, left) = simulate_chain(&chain, &syndrome, lay.n_data());
                assert!(left.is_zero(), "l={l} syndrome={s:#b} leaves defects");
                // the support also solves H_Z x = s
                for (row, h) in lay.z_parity_check().iter().enumerate() {
                    assert_eq!(h.and_parity(&support), syndrome.get(row), "l={l} s={s:#b}");
                }
            }
        }
    }

    #[test]
    fn single_left_boundary_defect_flips_a_prefix() {
        let lay = CodeLayout::strip(5).unwrap();
        let chain = correction_chain(&lay);
        let mut syndrome = BitVec::zeros(7);
        syndrome.set(0, true); // T1, start of the chain
        let (support, left) = simulate_chain(&chain, &syndrome, lay.n_data());
        assert!(left.is_zero());
        // T1's defect walks the whole chain to the right boundary
        let d = |r, c| lay.data_index(r, c);
        assert_eq!(support.support(), {
            let mut v = vec![d(1, 1), d(0, 1), d(0, 2), d(1, 3), d(1, 4), d(0, 5)];
            v.sort_unstable();
            v
        });
    }

    #[test]
    fn gf2_solver_solves_every_syndrome() {
        let lay = CodeLayout::strip(5).unwrap();
        let h = lay.z_parity_check();
        assert_eq!(gf2::rank(&h), 7, "H_Z has full row rank");
        for s in 0..128u32 {
            let syndrome =
                BitVec::from_bools(&(0..7).map(|j| s >> j & 1 == 1).collect::<Vec<_>>());
            let x = solve_correction_gf2(&lay, &syndrome).unwrap();
            let xv = BitVec::from_support(lay.n_data(), &x);
            for (row, hrow) in h.iter().enumerate() {
                assert_eq!(hrow.and_parity(&xv), syndrome.get(row));
            }
        }
    }

    #[test]
    fn gf2_example_middle_plaquette() {
        // Syndrome with only P2 set: {d(0,0), d(0,1), d(0,2)} is one valid solution.
        let lay = CodeLayout::strip(5).unwrap();
        let mut syndrome = BitVec::zeros(7);
        syndrome.set(lay.z_index_of("P2").unwrap(), true);
        let named = BitVec::from_support(
            lay.n_data(),
            &[lay.data_index(0, 0), lay.data_index(0, 1), lay.data_index(0, 2)],
        );
        for (row, h) in lay.z_parity_check().iter().enumerate() {
            assert_eq!(h.and_parity(&named), syndrome.get(row));
        }
        // and the solver's answer solves it too
        let x = solve_correction_gf2(&lay, &syndrome).unwrap();
        let xv = BitVec::from_support(lay.n_data(), &x);
        for (row, h) in lay.z_parity_check().iter().enumerate() {
            assert_eq!(h.and_parity(&xv), syndrome.get(row));
        }
    }

    #[test]
    fn chain_and_gf2_differ_by_logical_or_x_stabilizer() {
        let lay = CodeLayout::strip(5).unwrap();
        let chain = correction_chain(&lay);
        let mut kernel: Vec<BitVec> = lay
            .x_stabilizers()
            .iter()
            .map(|x| BitVec::from_support(lay.n_data(), &x.data))
            .collect();
        kernel.push(BitVec::from_support(lay.n_data(), lay.logical_x()));
        assert_eq!(gf2::rank(&kernel), 5, "kernel of H_Z has dimension 5 at L=5");
        for s in 0..128u32 {
            let syndrome =
                BitVec::from_bools(&(0..7).map(|j| s >> j & 1 == 1).collect::<Vec<_>>());
            let (chain_supp, _) = simulate_chain(&chain, &syndrome, lay.n_data());
            let gf2_supp = BitVec::from_support(
                lay.n_data(),
                &solve_correction_gf2(&lay, &syndrome).unwrap(),
            );
            let mut diff = chain_supp.clone();
            diff.xor_assign(&gf2_supp);
            assert!(gf2::in_span(&kernel, &diff), "s={s:#b}");
        }
    }

    #[test]
    fn prep_circuit_shape_l5() {
        let lay = CodeLayout::strip(5).unwrap();
        let c = build_prep_circuit(&lay);
        assert_eq!(c.n_qubits(), 19);
        assert_eq!(c.n_cbits(), 7);
        let cnots = c
            .instructions()
            .iter()
            .filter(|i| matches!(i, Instruction::Gate(CliffordGate::Cnot(..))))
            .count();
        assert_eq!(cnots, 20);
        let measures =
            c.instructions().iter().filter(|i| matches!(i, Instruction::Measure { .. })).count();
        assert_eq!(measures, 7);
        assert!(c.connectivity_violations(&lay).is_empty());
        assert_eq!(c.depth(), 4);
    }

    #[test]
    fn prep_depth_is_four_for_all_lengths() {
        for l in [1usize, 3, 5, 7, 9] {
            let lay = CodeLayout::strip(l).unwrap();
            assert_eq!(build_prep_circuit(&lay).depth(), 4, "l={l}");
        }
    }

    #[test]
    fn noiseless_shot_lands_exactly_on_target() {
        let lay = CodeLayout::strip(5).unwrap();
        let runner = ShotRunner::new(&lay, NoiseModel::ideal()).unwrap();
        for seed in 0..25 {
            let (record, fid) = runner.run_with_fidelity(Basis::X, seed, 0);
            assert_eq!(fid, 1.0, "seed {seed}");
            // recorded correction solves the recorded syndrome
            let syndrome = BitVec::from_bools(
                &record.syndrome.iter().map(|&b| b == 1).collect::<Vec<_>>(),
            );
            let support = BitVec::from_support(lay.n_data(), &record.correction_support);
            for (row, h) in lay.z_parity_check().iter().enumerate() {
                assert_eq!(h.and_parity(&support), syndrome.get(row));
            }
        }
    }

    #[test]
    fn all_plus_syndrome_is_uniform_over_measurements() {
        // A zero syndrome applies zero corrections.
        let lay = CodeLayout::strip(5).unwrap();
        let runner = ShotRunner::new(&lay, NoiseModel::ideal()).unwrap();
        let mut seen_zero = false;
        for seed in 0..400 {
            let record = runner.run(Basis::Z, seed, 0);
            if record.syndrome.iter().all(|&b| b == 0) {
                assert!(record.correction_support.is_empty());
                seen_zero = true;
                break;
            }
        }
        assert!(seen_zero, "all-+1 syndrome should occur within 400 seeds (p=1/128 each)");
    }

    #[test]
    fn stripped_conditionals_miss_the_target_on_defect_syndromes() {
        // Remove the feed-forward: any −1 syndrome leaves overlap < 1.
        let lay = CodeLayout::strip(5).unwrap();
        let full = build_prep_circuit(&lay);
        let mut stripped = AdaptiveCircuit::new();
        stripped.add_qreg("q", lay.n_qubits());
        stripped.add_creg("s", lay.n_ancilla());
        for ins in full.instructions() {
            if !matches!(ins, Instruction::CondGate { .. }) {
                stripped.push(ins.clone());
            }
        }
        let gens = lay.target_generators();
        let mut hit_defect = false;
        for seed in 0..20 {
            let mut t = StabilizerTableau::zero_state(lay.n_qubits());
            let rec = execute(&stripped, &mut t, &mut shot_rng(seed, 0), None).unwrap();
            let overlap = t.overlap_with_generators(&gens).unwrap();
            if rec.measurements.iter().any(|&b| b) {
                assert_eq!(overlap, 0.0, "defect state is orthogonal to |+̄⟩");
                hit_defect = true;
            } else {
                assert_eq!(overlap, 1.0);
            }
        }
        assert!(hit_defect);
    }

    #[test]
    fn pre_correction_state_keeps_x_sector() {
        // After extraction + measurement but before correction, the state is
        // still stabilized by S^X and X̄, and by ±S' per the syndrome.
        let lay = CodeLayout::strip(5).unwrap();
        let mut t = all_plus_with_ancillas(&lay);
        let mut rng = shot_rng(11, 0);
        let mut syndrome = Vec::new();
        for z in lay.z_generators() {
            let m = t.measure_pauli(&z, &mut rng).unwrap();
            syndrome.push(m.value);
        }
        for x in lay.x_generators() {
            assert_eq!(t.expectation(&x).unwrap(), 1);
        }
        assert_eq!(t.expectation(&lay.logical_x_pauli()).unwrap(), 1);
        for (z, &v) in lay.z_generators().iter().zip(&syndrome) {
            assert_eq!(t.expectation(z).unwrap(), v);
        }
    }

    #[test]
    fn chain_and_gf2_states_coincide_for_all_syndromes() {
        let lay = CodeLayout::strip(5).unwrap();
        let chain = correction_chain(&lay);
        let zgens = lay.z_generators();
        for s in 0..128u32 {
            let syndrome =
                BitVec::from_bools(&(0..7).map(|j| s >> j & 1 == 1).collect::<Vec<_>>());
            // force the post-measurement state with this syndrome
            let mut t = all_plus_with_ancillas(&lay);
            for (j, z) in zgens.iter().enumerate() {
                let desired = if syndrome.get(j) { -1 } else { 1 };
                let p = t.project_pauli(z, desired).unwrap();
                assert_eq!(p, 0.5);
            }
            let mut ta = t.clone();
            let mut tb = t;
            let (chain_supp, _) = simulate_chain(&chain, &syndrome, lay.n_data());
            for q in chain_supp.support() {
                ta.apply(CliffordGate::X(q)).unwrap();
            }
            for q in solve_correction_gf2(&lay, &syndrome).unwrap() {
                tb.apply(CliffordGate::X(q)).unwrap();
            }
            assert_eq!(ta.overlap_with_state(&tb).unwrap(), 1.0, "s={s:#b}");
            // both land exactly on |+̄⟩
            assert_eq!(ta.overlap_with_generators(&lay.target_generators()).unwrap(), 1.0);
        }
    }

    #[test]
    fn experiment_records_are_deterministic_and_ordered() {
        let lay = CodeLayout::strip(3).unwrap();
        let noise = NoiseModel { p1: 0.01, p2: 0.02, pm: 0.01, pi: 0.005 };
        let a = run_experiment(&lay, noise, 20, 20, 7).unwrap();
        let b = run_experiment(&lay, noise, 20, 20, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().enumerate().all(|(i, r)| r.shot_index == i as u64));
        assert!(a[..20].iter().all(|r| r.basis == Basis::X));
        assert!(a[20..].iter().all(|r| r.basis == Basis::Z));
        // even under noise, the applied correction solves the recorded syndrome
        for r in &a {
            let syndrome =
                BitVec::from_bools(&r.syndrome.iter().map(|&b| b == 1).collect::<Vec<_>>());
            let support = BitVec::from_support(lay.n_data(), &r.correction_support);
            for (row, h) in lay.z_parity_check().iter().enumerate() {
                assert_eq!(h.and_parity(&support), syndrome.get(row), "shot {}", r.shot_index);
            }
        }
    }

    #[test]
    fn maximal_cnot_noise_breaks_perfection() {
        let lay = CodeLayout::strip(5).unwrap();
        let noise = NoiseModel { p2: 1.0, ..NoiseModel::ideal() };
        let (_, mean_fid) = run_experiment_with_fidelity(&lay, noise, 50, 0, 3).unwrap();
        assert!(mean_fid < 1.0);
    }
}
