//! Cross-engine equivalence suite: the tableau engine against the dense
//! statevector oracle on the preparation circuits it can both run.

use crate::bound;
use crate::circuit::{self, outcome_distribution};
use crate::fidelity;
use crate::layout::{CodeLayout, LayoutError};
use crate::oracle::{self, OracleError, StateVector, MAX_QUBITS};
use crate::prep::{build_prep_circuit, NoiseModel, ShotRunner};
use crate::rng::shot_rng;
use crate::tableau::StabilizerTableau;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EquivError {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("equivalence checks failed: {0}")]
    Internal(String),
}

/// Results of the tableau-vs-oracle comparison at one strip length.
#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub l: usize,
    pub n_qubits: usize,
    pub shots: u64,
    /// TVD between the two engines' exact syndrome distributions.
    pub exact_joint_tvd: f64,
    /// TVD between `shots` sampled tableau syndromes and the oracle's exact
    /// distribution.
    pub sampled_tvd: f64,
    /// Expected TVD from sampling noise alone at this shot count.
    pub sampling_floor: f64,
    /// Deterministic outcomes (post-correction stabilizer values) agree.
    pub deterministic_match: bool,
    /// Largest |tableau fidelity − statevector fidelity| over probe states.
    pub max_fidelity_gap: f64,
    pub pass: bool,
}

fn tvd(a: &BTreeMap<Vec<bool>, f64>, b: &BTreeMap<Vec<bool>, f64>) -> f64 {
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    0.5 * keys
        .into_iter()
        .map(|k| (a.get(k).unwrap_or(&0.0) - b.get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

/// Expected TVD of an empirical distribution from its exact counterpart,
/// from per-cell binomial fluctuations.
pub fn expected_sampling_tvd(exact: &BTreeMap<Vec<bool>, f64>, shots: u64) -> f64 {
    let n = shots as f64;
    0.5 * (2.0 / std::f64::consts::PI).sqrt()
        * exact.values().map(|&p| (p * (1.0 - p) / n).sqrt()).sum::<f64>()
}

/// Run the full comparison for strip length `l` (oracle ceiling permitting).
pub fn oracle_equivalence(
    l: usize,
    shots: u64,
    master_seed: u64,
) -> Result<EquivalenceReport, EquivError> {
    let layout = CodeLayout::strip(l)?;
    if layout.n_qubits() > MAX_QUBITS {
        return Err(OracleError::TooManyQubits(layout.n_qubits()).into());
    }
    let prep = build_prep_circuit(&layout);
    let init_t = StabilizerTableau::zero_state(layout.n_qubits());
    let init_sv = StateVector::zero_state(layout.n_qubits())?;

    // Exact joint syndrome distribution from both engines.
    let tableau_exact = outcome_distribution(&prep, &init_t)
        .map_err(|e| EquivError::Internal(e.to_string()))?;
    let oracle_exact = oracle::measurement_distribution(&prep, &init_sv)?;
    let exact_joint_tvd = tvd(&tableau_exact, &oracle_exact);

    // Tableau empirical sampling against the oracle's exact law.
    let runner = ShotRunner::new(&layout, NoiseModel::ideal())
        .map_err(|e| EquivError::Internal(e.to_string()))?;
    let mut counts: BTreeMap<Vec<bool>, f64> = BTreeMap::new();
    for i in 0..shots {
        let rec = runner.run(crate::prep::Basis::Z, master_seed, i);
        let key: Vec<bool> = rec.syndrome.iter().map(|&b| b == 1).collect();
        *counts.entry(key).or_insert(0.0) += 1.0 / shots as f64;
    }
    let sampled_tvd = tvd(&counts, &oracle_exact);
    let sampling_floor = expected_sampling_tvd(&oracle_exact, shots);

    // Deterministic outcomes: the corrected state satisfies every target
    // generator with certainty, in both engines, for every probe seed.
    let gens = layout.target_generators();
    let mut deterministic_match = true;
    for seed in 0..8u64 {
        let mut t = StabilizerTableau::zero_state(layout.n_qubits());
        circuit::execute(&prep, &mut t, &mut shot_rng(master_seed ^ 0xd5, seed), None)
            .map_err(|e| EquivError::Internal(e.to_string()))?;
        let tab_fid = t
            .overlap_with_generators(&gens)
            .map_err(|e| EquivError::Internal(e.to_string()))?;
        let mut sv = StateVector::zero_state(layout.n_qubits())?;
        oracle::execute(&prep, &mut sv, &mut shot_rng(master_seed ^ 0xa7, seed))?;
        let sv_fid = sv.overlap_with_generators(&gens);
        if tab_fid != 1.0 || (sv_fid - 1.0).abs() > 1e-10 {
            deterministic_match = false;
        }
    }

    // Exact fidelity against the statevector route on probe states.
    let mut max_fidelity_gap = 0.0f64;
    for seed in 0..6u64 {
        let t = bound::sample_random_state(&layout, 4, &mut shot_rng(master_seed ^ 0x51, seed));
        let tab_fid = fidelity::exact_fidelity(&t, &layout)
            .map_err(|e| EquivError::Internal(e.to_string()))?;
        let sv = StateVector::from_tableau(&t)?;
        let sv_fid = sv.overlap_with_generators(&gens);
        max_fidelity_gap = max_fidelity_gap.max((tab_fid - sv_fid).abs());
    }

    let pass = exact_joint_tvd < 1e-12
        && deterministic_match
        && max_fidelity_gap < 1e-10
        && sampled_tvd < (0.02f64).max(2.5 * sampling_floor);
    Ok(EquivalenceReport {
        l,
        n_qubits: layout.n_qubits(),
        shots,
        exact_joint_tvd,
        sampled_tvd,
        sampling_floor,
        deterministic_match,
        max_fidelity_gap,
        pass,
    })
}
