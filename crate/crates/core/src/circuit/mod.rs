//! Adaptive-circuit IR: a minimal gate set plus mid-circuit measurement into
//! classical registers, single-gate conditionals and XOR bit updates.
//!
//! The text form is a small OpenQASM-2-flavoured language (see `parse`); the
//! IR here is fully resolved — every qubit and classical bit reference is a
//! flat index, with register declarations kept only for serialization.

mod exec;
mod parse;

pub use exec::{execute, outcome_distribution, ExecError, ExecRecord};
pub(crate) use exec::fault_occurs;
pub use parse::{parse, ParseError};

use crate::layout::CodeLayout;
use crate::tableau::CliffordGate;
use serde::{Deserialize, Serialize};

/// A named register of qubits or classical bits, occupying a contiguous flat
/// index range starting at `offset`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegDecl {
    pub name: String,
    pub width: usize,
    pub offset: usize,
}

/// One XOR term: a classical bit or a constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CTerm {
    Bit(usize),
    Const(bool),
}

/// XOR of one or more terms; the only classical expression form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XorExpr {
    pub terms: Vec<CTerm>,
}

impl XorExpr {
    pub fn eval(&self, bits: &[bool]) -> bool {
        self.terms.iter().fold(false, |acc, t| {
            acc ^ match *t {
                CTerm::Bit(i) => bits[i],
                CTerm::Const(c) => c,
            }
        })
    }
}

/// Equality test on a single classical bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub bit: usize,
    pub value: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instruction {
    Gate(CliffordGate),
    Measure { qubit: usize, target: usize },
    Reset { qubit: usize },
    CondGate { cond: Condition, gate: CliffordGate },
    Assign { target: usize, expr: XorExpr },
    Barrier,
}

/// A parsed or generated adaptive circuit.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AdaptiveCircuit {
    qregs: Vec<RegDecl>,
    cregs: Vec<RegDecl>,
    instructions: Vec<Instruction>,
}

impl AdaptiveCircuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_qreg(&mut self, name: &str, width: usize) -> usize {
        let offset = self.n_qubits();
        self.qregs.push(RegDecl { name: name.to_string(), width, offset });
        offset
    }

    pub fn add_creg(&mut self, name: &str, width: usize) -> usize {
        let offset = self.n_cbits();
        self.cregs.push(RegDecl { name: name.to_string(), width, offset });
        offset
    }

    pub fn push(&mut self, ins: Instruction) {
        debug_assert!(self.instruction_in_range(&ins), "instruction out of range: {ins:?}");
        self.instructions.push(ins);
    }

    pub fn n_qubits(&self) -> usize {
        self.qregs.iter().map(|r| r.width).sum()
    }

    pub fn n_cbits(&self) -> usize {
        self.cregs.iter().map(|r| r.width).sum()
    }

    pub fn qregs(&self) -> &[RegDecl] {
        &self.qregs
    }

    pub fn cregs(&self) -> &[RegDecl] {
        &self.cregs
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    fn instruction_in_range(&self, ins: &Instruction) -> bool {
        let nq = self.n_qubits();
        let nc = self.n_cbits();
        let gate_ok = |g: &CliffordGate| {
            let (a, b) = g.qubits();
            a < nq && b.map_or(true, |b| b < nq && b != a)
        };
        match ins {
            Instruction::Gate(g) => gate_ok(g),
            Instruction::CondGate { cond, gate } => cond.bit < nc && gate_ok(gate),
            Instruction::Measure { qubit, target } => *qubit < nq && *target < nc,
            Instruction::Reset { qubit } => *qubit < nq,
            Instruction::Assign { target, expr } => {
                *target < nc
                    && expr.terms.iter().all(|t| match t {
                        CTerm::Bit(i) => *i < nc,
                        CTerm::Const(_) => true,
                    })
            }
            Instruction::Barrier => true,
        }
    }

    /// Two-qubit-gate depth: the longest chain of CNOTs (conditional or not)
    /// linked by shared qubits, in program order. Single-qubit gates,
    /// measurements and classical operations contribute nothing.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.n_qubits()];
        let mut max = 0;
        for ins in &self.instructions {
            let gate = match ins {
                Instruction::Gate(g) => Some(g),
                Instruction::CondGate { gate, .. } => Some(gate),
                _ => None,
            };
            if let Some(CliffordGate::Cnot(a, b)) = gate {
                let d = level[*a].max(level[*b]) + 1;
                level[*a] = d;
                level[*b] = d;
                max = max.max(d);
            }
        }
        max
    }

    /// Check every two-qubit gate against the layout's connectivity graph,
    /// returning indices of violating instructions.
    pub fn connectivity_violations(&self, layout: &CodeLayout) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, ins) in self.instructions.iter().enumerate() {
            let gate = match ins {
                Instruction::Gate(g) => g,
                Instruction::CondGate { gate, .. } => gate,
                _ => continue,
            };
            if let CliffordGate::Cnot(a, b) = gate {
                if !layout.is_edge(*a, *b) {
                    out.push(i);
                }
            }
        }
        out
    }

    fn flat_to_ref(regs: &[RegDecl], flat: usize) -> (&str, usize) {
        for r in regs {
            if flat >= r.offset && flat < r.offset + r.width {
                return (&r.name, flat - r.offset);
            }
        }
        panic!("flat index {flat} not covered by any register");
    }

    fn qref(&self, flat: usize) -> String {
        let (name, i) = Self::flat_to_ref(&self.qregs, flat);
        format!("{name}[{i}]")
    }

    fn cref(&self, flat: usize) -> String {
        let (name, i) = Self::flat_to_ref(&self.cregs, flat);
        format!("{name}[{i}]")
    }

    fn gate_text(&self, g: &CliffordGate) -> String {
        match g {
            CliffordGate::H(q) => format!("h {}", self.qref(*q)),
            CliffordGate::X(q) => format!("x {}", self.qref(*q)),
            CliffordGate::Z(q) => format!("z {}", self.qref(*q)),
            CliffordGate::S(q) => format!("s {}", self.qref(*q)),
            CliffordGate::Cnot(c, t) => format!("cx {},{}", self.qref(*c), self.qref(*t)),
        }
    }

    /// Canonical text form; `parse(serialize(c))` reproduces the IR exactly.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for r in &self.qregs {
            out.push_str(&format!("qreg {}[{}];\n", r.name, r.width));
        }
        for r in &self.cregs {
            out.push_str(&format!("creg {}[{}];\n", r.name, r.width));
        }
        for ins in &self.instructions {
            match ins {
                Instruction::Gate(g) => out.push_str(&format!("{};\n", self.gate_text(g))),
                Instruction::Measure { qubit, target } => out.push_str(&format!(
                    "measure {} -> {};\n",
                    self.qref(*qubit),
                    self.cref(*target)
                )),
                Instruction::Reset { qubit } => {
                    out.push_str(&format!("reset {};\n", self.qref(*qubit)));
                }
                Instruction::CondGate { cond, gate } => out.push_str(&format!(
                    "if ({}=={}) {};\n",
                    self.cref(cond.bit),
                    u8::from(cond.value),
                    self.gate_text(gate)
                )),
                Instruction::Assign { target, expr } => {
                    let terms: Vec<String> = expr
                        .terms
                        .iter()
                        .map(|t| match t {
                            CTerm::Bit(i) => self.cref(*i),
                            CTerm::Const(c) => u8::from(*c).to_string(),
                        })
                        .collect();
                    out.push_str(&format!("{} = {};\n", self.cref(*target), terms.join(" ^ ")));
                }
                Instruction::Barrier => out.push_str("barrier;\n"),
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell_feedforward() -> AdaptiveCircuit {
        let mut c = AdaptiveCircuit::new();
        c.add_qreg("q", 2);
        c.add_creg("c", 1);
        c.push(Instruction::Gate(CliffordGate::H(0)));
        c.push(Instruction::Gate(CliffordGate::Cnot(0, 1)));
        c.push(Instruction::Measure { qubit: 1, target: 0 });
        c.push(Instruction::CondGate {
            cond: Condition { bit: 0, value: true },
            gate: CliffordGate::X(0),
        });
        c
    }

    #[test]
    fn depth_counts_only_two_qubit_chains() {
        let mut c = AdaptiveCircuit::new();
        c.add_qreg("q", 4);
        assert_eq!(c.depth(), 0);
        c.push(Instruction::Gate(CliffordGate::H(0)));
        assert_eq!(c.depth(), 0);
        c.push(Instruction::Gate(CliffordGate::Cnot(0, 1)));
        c.push(Instruction::Gate(CliffordGate::Cnot(2, 3)));
        assert_eq!(c.depth(), 1, "disjoint CNOTs share a layer");
        c.push(Instruction::Gate(CliffordGate::Cnot(1, 2)));
        assert_eq!(c.depth(), 2, "shared qubit forces a new layer");
        c.push(Instruction::Barrier);
        c.push(Instruction::Gate(CliffordGate::H(1)));
        assert_eq!(c.depth(), 2, "barriers and 1q gates do not add depth");
    }

    #[test]
    fn conditional_two_qubit_gates_count() {
        let mut c = AdaptiveCircuit::new();
        c.add_qreg("q", 2);
        c.add_creg("c", 1);
        c.push(Instruction::CondGate {
            cond: Condition { bit: 0, value: true },
            gate: CliffordGate::Cnot(0, 1),
        });
        assert_eq!(c.depth(), 1);
    }

    #[test]
    fn serialize_is_stable() {
        let c = bell_feedforward();
        let text = c.serialize();
        assert!(text.contains("cx q[0],q[1];"));
        assert!(text.contains("measure q[1] -> c[0];"));
        assert!(text.contains("if (c[0]==1) x q[0];"));
    }

    #[test]
    fn connectivity_violations_flag_data_data_gates() {
        use crate::layout::CodeLayout;
        let lay = CodeLayout::strip(5).unwrap();
        let mut c = AdaptiveCircuit::new();
        c.add_qreg("q", lay.n_qubits());
        let anc_p0 = lay.z_stabilizers()[lay.z_index_of("P0").unwrap()].ancilla;
        c.push(Instruction::Gate(CliffordGate::Cnot(lay.data_index(0, 0), anc_p0)));
        c.push(Instruction::Gate(CliffordGate::Cnot(
            lay.data_index(0, 0),
            lay.data_index(0, 1),
        )));
        c.push(Instruction::Gate(CliffordGate::H(0)));
        // only the data-data CNOT violates: no data-data edges exist
        assert_eq!(c.connectivity_violations(&lay), vec![1]);
    }

    #[test]
    fn xor_expr_eval() {
        let e = XorExpr {
            terms: vec![CTerm::Bit(0), CTerm::Bit(1), CTerm::Const(true)],
        };
        assert!(e.eval(&[false, false]));
        assert!(!e.eval(&[true, false]));
        assert!(e.eval(&[true, true]));
    }
}
