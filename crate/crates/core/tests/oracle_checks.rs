//! Brute-force statevector cross-checks of the tableau engine: frozen
//! expected values for the preparation protocol come from the oracle.

use adaptive_sim::circuit::{execute, outcome_distribution, parse};
use adaptive_sim::fidelity::exact_fidelity;
use adaptive_sim::layout::CodeLayout;
use adaptive_sim::oracle::{self, StateVector};
use adaptive_sim::prep::build_prep_circuit;
use adaptive_sim::rng::shot_rng;
use adaptive_sim::tableau::{BasisState, CliffordGate, StabilizerTableau};
use adaptive_sim::{PauliKind, PauliString};

fn all_plus_tableau(layout: &CodeLayout) -> StabilizerTableau {
    let mut basis = vec![BasisState::XPlus; layout.n_data()];
    basis.extend(vec![BasisState::ZPlus; layout.n_ancilla()]);
    StabilizerTableau::new(layout.n_qubits(), &basis).unwrap()
}

fn all_plus_sv(layout: &CodeLayout) -> StateVector {
    let mut basis = vec![BasisState::XPlus; layout.n_data()];
    basis.extend(vec![BasisState::ZPlus; layout.n_ancilla()]);
    StateVector::from_basis(&basis).unwrap()
}

#[test]
fn strip_syndrome_law_is_uniform_in_both_engines() {
    // Measuring the 7 strip Z stabilizers on all-|+⟩ data: every syndrome
    // equally likely, exactly 2^-7 each, in both representations.
    let layout = CodeLayout::strip(5).unwrap();
    let n = layout.n_qubits();
    let mut sv = all_plus_sv(&layout);
    let mut product = 1.0;
    for z in layout.z_generators() {
        // both outcomes exactly 1/2 likely on the statevector side
        let p_plus = sv.prob_plus(&z);
        assert!((p_plus - 0.5).abs() < 1e-12);
        product *= sv.project_pauli(&z, 1).unwrap();
    }
    assert!((product - 2f64.powi(-7)).abs() < 1e-12);
    // tableau side: same sequential probabilities
    let t = all_plus_tableau(&layout);
    let overlap = t.overlap_with_generators(&layout.z_generators()).unwrap();
    assert!((overlap - 2f64.powi(-7)).abs() < 1e-15);
    let _ = n;
}

#[test]
fn all_plus_overlap_with_target_is_two_to_minus_seven() {
    let layout = CodeLayout::strip(5).unwrap();
    let t = all_plus_tableau(&layout);
    let f = exact_fidelity(&t, &layout).unwrap();
    assert!((f - 2f64.powi(-7)).abs() < 1e-15);
    // oracle agrees
    let sv = all_plus_sv(&layout);
    let f_sv = sv.overlap_with_generators(&layout.target_generators());
    assert!((f - f_sv).abs() < 1e-10);
}

#[test]
fn energies_match_frozen_values() {
    let layout = CodeLayout::strip(5).unwrap();
    // ideal state: all 11 generators at +1
    let mut ideal = all_plus_tableau(&layout);
    for z in layout.z_generators() {
        ideal.project_pauli(&z, 1).unwrap();
    }
    assert_eq!(layout.energy(&ideal).unwrap(), -11.0);
    // product state: only the 4 X stabilizers fixed
    assert_eq!(layout.energy(&all_plus_tableau(&layout)).unwrap(), -4.0);
    // single flipped Z stabilizer: −11 + 2
    let mut one_defect = all_plus_tableau(&layout);
    for (j, z) in layout.z_generators().iter().enumerate() {
        one_defect.project_pauli(z, if j == 3 { -1 } else { 1 }).unwrap();
    }
    assert_eq!(layout.energy(&one_defect).unwrap(), -9.0);
}

#[test]
fn single_x_error_is_orthogonal_to_target() {
    let layout = CodeLayout::strip(5).unwrap();
    let mut t = all_plus_tableau(&layout);
    for z in layout.z_generators() {
        t.project_pauli(&z, 1).unwrap();
    }
    t.apply(CliffordGate::X(layout.data_index(0, 2))).unwrap();
    assert_eq!(exact_fidelity(&t, &layout).unwrap(), 0.0);
    // cross-check through the statevector
    let sv = StateVector::from_tableau(&t).unwrap();
    let f = sv.overlap_with_generators(&layout.target_generators());
    assert!(f.abs() < 1e-10);
}

#[test]
fn ideal_state_built_by_oracle_projection_matches_tableau_export() {
    let layout = CodeLayout::strip(3).unwrap();
    // oracle route: project Z stabilizers onto all-|+⟩ data
    let mut sv = all_plus_sv(&layout);
    for z in layout.z_generators() {
        sv.project_pauli(&z, 1).unwrap();
    }
    // tableau route, exported to amplitudes
    let mut t = all_plus_tableau(&layout);
    for z in layout.z_generators() {
        t.project_pauli(&z, 1).unwrap();
    }
    let exported = StateVector::from_tableau(&t).unwrap();
    assert!((sv.overlap(&exported).unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn prep_circuit_distributions_agree_exactly() {
    for l in [1usize, 3] {
        let layout = CodeLayout::strip(l).unwrap();
        let prep = build_prep_circuit(&layout);
        let t_dist =
            outcome_distribution(&prep, &StabilizerTableau::zero_state(layout.n_qubits()))
                .unwrap();
        let sv_dist = oracle::measurement_distribution(
            &prep,
            &StateVector::zero_state(layout.n_qubits()).unwrap(),
        )
        .unwrap();
        assert_eq!(t_dist.len(), sv_dist.len(), "l={l}");
        for (k, p) in &t_dist {
            let q = sv_dist.get(k).copied().unwrap_or(0.0);
            assert!((p - q).abs() < 1e-10, "l={l} syndrome {k:?}: {p} vs {q}");
        }
        // uniform over 2^(#ancilla) syndromes
        let cells = 1usize << layout.n_ancilla();
        assert_eq!(t_dist.len(), cells);
        for p in t_dist.values() {
            assert!((p - 1.0 / cells as f64).abs() < 1e-12);
        }
    }
}

#[test]
fn random_clifford_circuits_agree_between_engines() {
    // deterministic outcomes identical; random-outcome probabilities exactly
    // one half; fidelities within 1e-10
    let layout = CodeLayout::strip(1).unwrap();
    let gens = layout.target_generators();
    for seed in 0..24u64 {
        let t = adaptive_sim::bound::sample_random_state(
            &layout,
            4,
            &mut shot_rng(0xace, seed),
        );
        let sv = StateVector::from_tableau(&t).unwrap();
        for g in &gens {
            let e_t = f64::from(t.expectation(g).unwrap());
            let e_sv = sv.expectation_pauli(g);
            assert!((e_t - e_sv).abs() < 1e-10, "seed {seed}");
        }
        let f_t = exact_fidelity(&t, &layout).unwrap();
        let f_sv = sv.overlap_with_generators(&gens);
        assert!((f_t - f_sv).abs() < 1e-10, "seed {seed}");
    }
}

#[test]
fn x_basis_measurement_parities_are_even_on_ideal_state() {
    // X-measuring all data qubits of |+̄⟩: every X-stabilizer parity and the
    // X̄ parity come out even, for any seed.
    let layout = CodeLayout::strip(5).unwrap();
    for seed in 0..10u64 {
        let mut t = all_plus_tableau(&layout);
        for z in layout.z_generators() {
            t.project_pauli(&z, 1).unwrap();
        }
        let mut rng = shot_rng(3, seed);
        let bits: Vec<i8> = (0..layout.n_data())
            .map(|q| t.measure_single(q, PauliKind::X, &mut rng).unwrap().value)
            .collect();
        let parity = |support: &[usize]| -> i8 {
            support.iter().map(|&q| bits[q]).product()
        };
        for x in layout.x_stabilizers() {
            assert_eq!(parity(&x.data), 1, "seed {seed}");
        }
        assert_eq!(parity(layout.logical_x()), 1, "seed {seed}");
    }
}

#[test]
fn bell_feedforward_matches_four_dim_oracle() {
    let c = parse(
        "qreg q[2]; creg c[1]; h q[0]; cx q[0],q[1]; measure q[1] -> c[0]; if (c[0]==1) x q[0];",
    )
    .unwrap();
    let z0 = PauliString::single(2, 0, PauliKind::Z).unwrap();
    for seed in 0..20u64 {
        let mut t = StabilizerTableau::zero_state(2);
        execute(&c, &mut t, &mut shot_rng(1, seed), None).unwrap();
        assert_eq!(t.expectation(&z0).unwrap(), 1);
        let mut sv = StateVector::zero_state(2).unwrap();
        oracle::execute(&c, &mut sv, &mut shot_rng(2, seed)).unwrap();
        assert!((sv.expectation_pauli(&z0) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn measurement_outcome_distribution_tvd_small_at_ten_k_shots() {
    // Empirical tableau syndromes vs the oracle's exact law at 10^4 shots.
    for (l, limit) in [(1usize, 0.02), (3usize, 0.02)] {
        let r = adaptive_sim::equiv::oracle_equivalence(l, 10_000, 11).unwrap();
        assert!(r.exact_joint_tvd < 1e-12, "l={l}");
        assert!(r.sampled_tvd < limit, "l={l}: tvd {}", r.sampled_tvd);
        assert!(r.pass, "l={l}: {r:?}");
    }
}
