//! Development search: find a depth-4 connectivity-respecting circuit that
//! prepares the 6-qubit "half-strip block" with clean (unentangled)
//! ancillas. Simulated annealing over layered edge-local Clifford circuits.
//!
//! Block qubits: 0=d00 1=d01 2=d02 3=d10 4=d11 5=d12, ancillas 6=aP0 7=aB1
//! 8=aT1 (and optionally 9=aP2). Target generators (data only):
//!   P0=Z{0,1,3,4} T1=Z{4,5} B1=Z{1,2} XL=X{0,3} XP1=X{1,2,4,5} W=X{0,1,2}

use adaptive_sim::pauli::{PauliKind, PauliString};
use adaptive_sim::tableau::{CliffordGate, StabilizerTableau};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

const DEPTH: usize = 4;

#[derive(Clone)]
struct Config {
    inputs: Vec<u8>,                       // 0..6 per qubit
    layers: Vec<Vec<(usize, usize)>>,      // (edge index, clifford index)
}

fn gens(n: usize) -> Vec<PauliString> {
    let z = |s: &[usize]| PauliString::on_support(n, PauliKind::Z, s).unwrap();
    let x = |s: &[usize]| PauliString::on_support(n, PauliKind::X, s).unwrap();
    vec![z(&[0, 1, 3, 4]), z(&[4, 5]), z(&[1, 2]), x(&[0, 3]), x(&[1, 2, 4, 5]), x(&[0, 1, 2])]
}

fn clifford_table() -> Vec<Vec<CliffordGate>> {
    use std::collections::HashMap;
    let gateset = [
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
        for g in gateset {
            let mut t2 = t.clone();
            t2.apply(g).unwrap();
            let k = key(&t2);
            if !seen.contains_key(&k) {
                let mut s2 = seq.clone();
                s2.push(g);
                seen.insert(k, s2.clone());
                frontier.push((t2, s2));
            }
        }
    }
    let mut entries: Vec<_> = seen.into_iter().collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    entries.into_iter().map(|(_, s)| s).collect()
}

fn prepare_input(n: usize, inputs: &[u8]) -> StabilizerTableau {
    let mut t = StabilizerTableau::zero_state(n);
    for (q, &v) in inputs.iter().enumerate() {
        match v {
            0 => {}
            1 => t.apply(CliffordGate::X(q)).unwrap(),
            2 => t.apply(CliffordGate::H(q)).unwrap(),
            3 => {
                t.apply(CliffordGate::X(q)).unwrap();
                t.apply(CliffordGate::H(q)).unwrap();
            }
            4 => {
                t.apply(CliffordGate::H(q)).unwrap();
                t.apply(CliffordGate::S(q)).unwrap();
            }
            _ => {
                t.apply(CliffordGate::X(q)).unwrap();
                t.apply(CliffordGate::H(q)).unwrap();
                t.apply(CliffordGate::S(q)).unwrap();
            }
        }
    }
    t
}

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

fn evaluate(
    cfg: &Config,
    n: usize,
    edges: &[(usize, usize)],
    table: &[Vec<CliffordGate>],
    target: &[PauliString],
) -> f64 {
    let mut t = prepare_input(n, &cfg.inputs);
    for layer in &cfg.layers {
        for &(e, c) in layer {
            let (a, b) = edges[e];
            for &g in &table[c] {
                t.apply(remap(g, a, b)).unwrap();
            }
        }
    }
    t.overlap_with_generators(target).unwrap()
}

fn layer_ok(layer: &[(usize, usize)], edges: &[(usize, usize)]) -> bool {
    let mut used = std::collections::HashSet::new();
    for &(e, _) in layer {
        let (a, b) = edges[e];
        if !used.insert(a) || !used.insert(b) {
            return false;
        }
    }
    true
}

fn search(n: usize, edges: Vec<(usize, usize)>, label: &str) {
    let table = clifford_table();
    let target = gens(n);
    let best = (0..64u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = StdRng::seed_from_u64(0x5eed ^ trial);
            let mut cfg = Config {
                inputs: (0..n).map(|_| rng.gen_range(0..6u8)).collect(),
                layers: vec![Vec::new(); DEPTH],
            };
            let mut score = evaluate(&cfg, n, &edges, &table, &target);
            let mut best_cfg = cfg.clone();
            let mut best_score = score;
            let steps = 60_000;
            for step in 0..steps {
                let temp = 0.6 * (1.0 - step as f64 / steps as f64) + 0.02;
                let mut cand = cfg.clone();
                match rng.gen_range(0..10u8) {
                    0..=1 => {
                        let q = rng.gen_range(0..n);
                        cand.inputs[q] = rng.gen_range(0..6);
                    }
                    2..=4 => {
                        // toggle a gate
                        let l = rng.gen_range(0..DEPTH);
                        if !cand.layers[l].is_empty() && rng.gen_bool(0.4) {
                            let i = rng.gen_range(0..cand.layers[l].len());
                            cand.layers[l].remove(i);
                        } else {
                            let e = rng.gen_range(0..edges.len());
                            let c = rng.gen_range(0..table.len());
                            cand.layers[l].push((e, c));
                            if !layer_ok(&cand.layers[l], &edges) {
                                cand.layers[l].pop();
                            }
                        }
                    }
                    _ => {
                        // rewrite one gate's clifford (or edge)
                        let l = rng.gen_range(0..DEPTH);
                        if cand.layers[l].is_empty() {
                            continue;
                        }
                        let i = rng.gen_range(0..cand.layers[l].len());
                        if rng.gen_bool(0.8) {
                            cand.layers[l][i].1 = rng.gen_range(0..table.len());
                        } else {
                            let old = cand.layers[l][i];
                            cand.layers[l][i] = (rng.gen_range(0..edges.len()), old.1);
                            if !layer_ok(&cand.layers[l], &edges) {
                                cand.layers[l][i] = old;
                            }
                        }
                    }
                }
                let s = evaluate(&cand, n, &edges, &table, &target);
                let d = (s + 1e-9).log2() - (score + 1e-9).log2();
                if d >= 0.0 || rng.gen_bool((d / temp).exp().min(1.0)) {
                    cfg = cand;
                    score = s;
                    if score > best_score {
                        best_score = score;
                        best_cfg = cfg.clone();
                        if best_score >= 1.0 {
                            break;
                        }
                    }
                }
            }
            (best_score, best_cfg, trial)
        })
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .unwrap();
    println!("== {label}: best overlap {}", best.0);
    if best.0 >= 1.0 {
        println!("inputs: {:?}", best.1.inputs);
        for (l, layer) in best.1.layers.iter().enumerate() {
            for &(e, c) in layer {
                let (a, b) = edges[e];
                println!("layer {l}: edge ({a},{b}) seq {:?}", table[c].iter().map(|g| remap(*g, a, b)).collect::<Vec<_>>());
            }
        }
    }
}

fn main() {
    let edges3 = vec![(0, 6), (1, 6), (3, 6), (4, 6), (1, 7), (2, 7), (4, 8), (5, 8)];
    search(9, edges3, "three ancillas (aP0, aB1, aT1)");
    let edges4 = vec![
        (0, 6), (1, 6), (3, 6), (4, 6), (1, 7), (2, 7), (4, 8), (5, 8), (2, 9), (5, 9),
    ];
    search(10, edges4, "four ancillas (+aP2)");
}
