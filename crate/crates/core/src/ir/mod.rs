// Copyright 2026 The qdich Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Circuit and cost-function data model.
//!
//! Qubit indices are 0-based. In amplitude indexing qubit 0 is the most
//! significant bit, and a two-variable term table is indexed by
//! `2·x[support[0]] + x[support[1]]`.

mod graph;
mod json;

pub use graph::{interaction_graph, InteractionGraph};
pub use json::{
    circuit_from_json, circuit_to_json, instance_from_json, instance_to_json, to_json_string,
    CircuitFile, GateRecord, InstanceFile, TermRecord, FORMAT_TAG,
};

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_4;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IrError {
    #[error("gate {kind} expects {expected} qubit(s), got {got}")]
    Arity { kind: &'static str, expected: usize, got: usize },
    #[error("gate {kind} repeats qubit {qubit}")]
    RepeatedQubit { kind: &'static str, qubit: usize },
    #[error("phase residue {0} is outside 0..8")]
    PhaseResidue(u8),
    #[error("term table has {got} entries, support of size {support} needs {expected}")]
    TableLength { support: usize, expected: usize, got: usize },
    #[error("term support must have 1 or 2 distinct variables, got {0:?}")]
    Support(Vec<usize>),
    #[error("term references variable {var} but the cost has {n_vars} variables")]
    VariableOutOfRange { var: usize, n_vars: usize },
    #[error("cost is flagged integer-valued but a table holds {0}")]
    NonIntegerEntry(f64),
    #[error("expected {p} gammas and betas, got {gammas} and {betas}")]
    ParameterCount { p: usize, gammas: usize, betas: usize },
    #[error("malformed input: {0}")]
    Format(String),
}

/// Gate vocabulary. Diagonal phase residues `d` stand for e^{−iπd/4};
/// `XRot(θ)` is e^{−iθX}.
#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    H,
    Tdg,
    CZ,
    PhaseDiag1([u8; 2]),
    PhaseDiag2([u8; 4]),
    XRot(f64),
    GeneralDiag1([Complex64; 2]),
    GeneralDiag2([Complex64; 4]),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::Tdg => "Tdg",
            GateKind::CZ => "CZ",
            GateKind::PhaseDiag1(_) => "PhaseDiag1",
            GateKind::PhaseDiag2(_) => "PhaseDiag2",
            GateKind::XRot(_) => "XRot",
            GateKind::GeneralDiag1(_) => "GeneralDiag1",
            GateKind::GeneralDiag2(_) => "GeneralDiag2",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            GateKind::CZ | GateKind::PhaseDiag2(_) | GateKind::GeneralDiag2(_) => 2,
            _ => 1,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        !matches!(self, GateKind::H | GateKind::XRot(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Result<Self, IrError> {
        if qubits.len() != kind.arity() {
            return Err(IrError::Arity { kind: kind.name(), expected: kind.arity(), got: qubits.len() });
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(IrError::RepeatedQubit { kind: kind.name(), qubit: qubits[0] });
        }
        let residues: &[u8] = match &kind {
            GateKind::PhaseDiag1(d) => d,
            GateKind::PhaseDiag2(d) => d,
            _ => &[],
        };
        if let Some(&bad) = residues.iter().find(|&&d| d >= 8) {
            return Err(IrError::PhaseResidue(bad));
        }
        Ok(Gate { kind, qubits })
    }

    pub fn h(q: usize) -> Self {
        Gate { kind: GateKind::H, qubits: vec![q] }
    }

    pub fn tdg(q: usize) -> Self {
        Gate { kind: GateKind::Tdg, qubits: vec![q] }
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Gate::new(GateKind::CZ, vec![a, b]).expect("CZ on distinct qubits")
    }

    pub fn phase1(q: usize, d: [u8; 2]) -> Self {
        Gate::new(GateKind::PhaseDiag1(d.map(|x| x % 8)), vec![q]).unwrap()
    }

    pub fn phase2(a: usize, b: usize, d: [u8; 4]) -> Self {
        Gate::new(GateKind::PhaseDiag2(d.map(|x| x % 8)), vec![a, b]).expect("distinct qubits")
    }

    pub fn xrot(q: usize, angle: f64) -> Self {
        Gate { kind: GateKind::XRot(angle), qubits: vec![q] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prep {
    Zero,
    Plus,
}

/// An ordered gate list with a post-selection register and a map from
/// logical output wires to physical qubits.
///
/// `post_select` maps each post-selected qubit to the gate position at
/// which it is projected onto |0⟩: no gate at or after that position may
/// touch it.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub prep: Vec<Prep>,
    pub gates: Vec<Gate>,
    pub post_select: BTreeMap<usize, usize>,
    pub output_map: BTreeMap<usize, usize>,
}

impl Circuit {
    /// Empty circuit with every qubit an output wire of the same index.
    pub fn new(n_qubits: usize, prep: Prep) -> Self {
        Circuit {
            n_qubits,
            prep: vec![prep; n_qubits],
            gates: Vec::new(),
            post_select: BTreeMap::new(),
            output_map: (0..n_qubits).map(|q| (q, q)).collect(),
        }
    }

    pub fn with_gates(n_qubits: usize, prep: Prep, gates: Vec<Gate>) -> Self {
        let mut c = Circuit::new(n_qubits, prep);
        c.gates = gates;
        c
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    /// Adds a fresh qubit with the given preparation and returns its index.
    pub fn add_qubit(&mut self, prep: Prep) -> usize {
        self.prep.push(prep);
        self.n_qubits += 1;
        self.n_qubits - 1
    }

    /// Projects `q` onto |0⟩ after the gates pushed so far.
    pub fn post_select_now(&mut self, q: usize) {
        self.post_select.insert(q, self.gates.len());
    }

    pub fn post_selected(&self) -> BTreeSet<usize> {
        self.post_select.keys().copied().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    PrepLength { expected: usize, got: usize },
    QubitOutOfRange { gate: usize, qubit: usize },
    Arity { gate: usize, kind: &'static str },
    RepeatedQubit { gate: usize, qubit: usize },
    PhaseResidue { gate: usize },
    GateAfterPostSelection { gate: usize, qubit: usize },
    PostSelectOutOfRange { qubit: usize },
    OutputOutOfRange { wire: usize, qubit: usize },
    OutputPostSelected { wire: usize, qubit: usize },
    OutputNotInjective { qubit: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PrepLength { expected, got } => {
                write!(f, "prep lists {got} qubits, circuit has {expected}")
            }
            Violation::QubitOutOfRange { gate, qubit } => {
                write!(f, "gate {gate} acts on out-of-range qubit {qubit}")
            }
            Violation::Arity { gate, kind } => write!(f, "gate {gate} ({kind}) has the wrong qubit count"),
            Violation::RepeatedQubit { gate, qubit } => write!(f, "gate {gate} repeats qubit {qubit}"),
            Violation::PhaseResidue { gate } => write!(f, "gate {gate} has a phase residue outside 0..8"),
            Violation::GateAfterPostSelection { gate, qubit } => {
                write!(f, "gate {gate} acts on qubit {qubit} after its post-selection")
            }
            Violation::PostSelectOutOfRange { qubit } => {
                write!(f, "post-selected qubit {qubit} is out of range")
            }
            Violation::OutputOutOfRange { wire, qubit } => {
                write!(f, "output wire {wire} maps to out-of-range qubit {qubit}")
            }
            Violation::OutputPostSelected { wire, qubit } => {
                write!(f, "output wire {wire} maps to post-selected qubit {qubit}")
            }
            Violation::OutputNotInjective { qubit } => {
                write!(f, "several output wires map to qubit {qubit}")
            }
        }
    }
}

/// Checks every circuit invariant; an empty list means the circuit is well formed.
pub fn validate(circuit: &Circuit) -> Vec<Violation> {
    let n = circuit.n_qubits;
    let mut out = Vec::new();
    if circuit.prep.len() != n {
        out.push(Violation::PrepLength { expected: n, got: circuit.prep.len() });
    }
    for (i, gate) in circuit.gates.iter().enumerate() {
        if gate.qubits.len() != gate.kind.arity() {
            out.push(Violation::Arity { gate: i, kind: gate.kind.name() });
        }
        if gate.qubits.len() == 2 && gate.qubits[0] == gate.qubits[1] {
            out.push(Violation::RepeatedQubit { gate: i, qubit: gate.qubits[0] });
        }
        let bad_residue = match &gate.kind {
            GateKind::PhaseDiag1(d) => d.iter().any(|&x| x >= 8),
            GateKind::PhaseDiag2(d) => d.iter().any(|&x| x >= 8),
            _ => false,
        };
        if bad_residue {
            out.push(Violation::PhaseResidue { gate: i });
        }
        for &q in &gate.qubits {
            if q >= n {
                out.push(Violation::QubitOutOfRange { gate: i, qubit: q });
            } else if let Some(&at) = circuit.post_select.get(&q) {
                if i >= at {
                    out.push(Violation::GateAfterPostSelection { gate: i, qubit: q });
                }
            }
        }
    }
    for &q in circuit.post_select.keys() {
        if q >= n {
            out.push(Violation::PostSelectOutOfRange { qubit: q });
        }
    }
    let mut seen = BTreeSet::new();
    for (&wire, &q) in &circuit.output_map {
        if q >= n {
            out.push(Violation::OutputOutOfRange { wire, qubit: q });
        }
        if circuit.post_select.contains_key(&q) {
            out.push(Violation::OutputPostSelected { wire, qubit: q });
        }
        if !seen.insert(q) {
            out.push(Violation::OutputNotInjective { qubit: q });
        }
    }
    out
}

/// A cost term on one or two variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub support: Vec<usize>,
    pub table: Vec<f64>,
}

impl Term {
    pub fn new(support: Vec<usize>, table: Vec<f64>) -> Result<Self, IrError> {
        let k = support.len();
        if !(1..=2).contains(&k) || (k == 2 && support[0] == support[1]) {
            return Err(IrError::Support(support));
        }
        if table.len() != 1 << k {
            return Err(IrError::TableLength { support: k, expected: 1 << k, got: table.len() });
        }
        Ok(Term { support, table })
    }

    pub fn one(v: usize, table: [f64; 2]) -> Self {
        Term { support: vec![v], table: table.to_vec() }
    }

    pub fn two(u: usize, v: usize, table: [f64; 4]) -> Self {
        Term::new(vec![u, v], table.to_vec()).expect("distinct support")
    }

    /// Value under a full assignment.
    pub fn value(&self, bits: &[bool]) -> f64 {
        let idx = self.support.iter().fold(0usize, |acc, &v| 2 * acc + bits[v] as usize);
        self.table[idx]
    }

    /// Whether flipping the variable at `slot` of the support can change the value.
    pub fn depends_on_slot(&self, slot: usize) -> bool {
        let k = self.support.len();
        let mask = 1 << (k - 1 - slot);
        (0..self.table.len()).any(|idx| self.table[idx] != self.table[idx ^ mask])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostFunction {
    pub n_vars: usize,
    pub terms: Vec<Term>,
    pub integer_valued: bool,
}

impl CostFunction {
    pub fn new(n_vars: usize, terms: Vec<Term>, integer_valued: bool) -> Result<Self, IrError> {
        for term in &terms {
            Term::new(term.support.clone(), term.table.clone())?;
            if let Some(&var) = term.support.iter().find(|&&v| v >= n_vars) {
                return Err(IrError::VariableOutOfRange { var, n_vars });
            }
            if integer_valued {
                if let Some(&x) = term.table.iter().find(|x| x.fract() != 0.0 || !x.is_finite()) {
                    return Err(IrError::NonIntegerEntry(x));
                }
            }
        }
        Ok(CostFunction { n_vars, terms, integer_valued })
    }

    pub fn real(n_vars: usize, terms: Vec<Term>) -> Result<Self, IrError> {
        Self::new(n_vars, terms, false)
    }

    pub fn integer(n_vars: usize, terms: Vec<Term>) -> Result<Self, IrError> {
        Self::new(n_vars, terms, true)
    }

    pub fn evaluate(&self, bits: &[bool]) -> f64 {
        self.terms.iter().map(|t| t.value(bits)).sum()
    }
}

/// A depth-`p` QAOA instance with mixer B = Σ_j X_j and an optional
/// post-selection register.
#[derive(Clone, Debug, PartialEq)]
pub struct QaoaInstance {
    pub n: usize,
    pub p: usize,
    pub cost: CostFunction,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    pub post_select: BTreeSet<usize>,
    pub output_map: BTreeMap<usize, usize>,
}

impl QaoaInstance {
    /// Plain instance: no post-selection, identity output map.
    pub fn new(cost: CostFunction, gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self, IrError> {
        let p = gammas.len();
        if betas.len() != p {
            return Err(IrError::ParameterCount { p, gammas: gammas.len(), betas: betas.len() });
        }
        let n = cost.n_vars;
        Ok(QaoaInstance {
            n,
            p,
            cost,
            gammas,
            betas,
            post_select: BTreeSet::new(),
            output_map: (0..n).map(|q| (q, q)).collect(),
        })
    }
}

/// Residue `m` with `angle ≈ m·π/4`, if any.
pub(crate) fn eighth_turns(angle: f64) -> Option<i64> {
    let m = angle / FRAC_PI_4;
    let r = m.round();
    ((m - r).abs() < 1e-12).then_some(r as i64)
}

fn term_gate(term: &Term, gamma: f64, integer_valued: bool) -> Gate {
    let kind = match eighth_turns(gamma).filter(|_| integer_valued) {
        Some(m) => {
            let res = |t: f64| (m * t as i64).rem_euclid(8) as u8;
            match term.support.len() {
                1 => GateKind::PhaseDiag1([res(term.table[0]), res(term.table[1])]),
                _ => GateKind::PhaseDiag2(std::array::from_fn(|i| res(term.table[i]))),
            }
        }
        None => {
            let ph = |t: f64| Complex64::from_polar(1.0, -gamma * t);
            match term.support.len() {
                1 => GateKind::GeneralDiag1([ph(term.table[0]), ph(term.table[1])]),
                _ => GateKind::GeneralDiag2(std::array::from_fn(|i| ph(term.table[i]))),
            }
        }
    };
    Gate { kind, qubits: term.support.clone() }
}

/// Expands an instance into its gate-level circuit.
///
/// Layer `k` emits one diagonal gate per term followed by `XRot(β_k)` on
/// every qubit. Integer-valued costs at γ a multiple of π/4 become exact
/// `PhaseDiag` gates; everything else becomes `GeneralDiag`.
pub fn qaoa_to_circuit(instance: &QaoaInstance) -> Circuit {
    let mut circuit = Circuit::new(instance.n, Prep::Plus);
    for (&gamma, &beta) in instance.gammas.iter().zip(&instance.betas) {
        for term in &instance.cost.terms {
            circuit.push(term_gate(term, gamma, instance.cost.integer_valued));
        }
        for q in 0..instance.n {
            circuit.push(Gate::xrot(q, beta));
        }
    }
    circuit.post_select = instance.post_select.iter().map(|&q| (q, circuit.gates.len())).collect();
    circuit.output_map = instance.output_map.clone();
    circuit
}

/// Same unitary as [`qaoa_to_circuit`] for `p = 1`, but each mixer is
/// placed right after the last phase gate on its qubit and each
/// post-selection right after its mixer. Diagonal gates commute, so only
/// the gate order changes. Few qubits are live at once when the terms are
/// listed in chain order, which keeps statevector checks of compiled
/// instances small. Other depths fall back to the layered order.
pub fn qaoa_to_circuit_local(instance: &QaoaInstance) -> Circuit {
    if instance.p != 1 {
        return qaoa_to_circuit(instance);
    }
    let (gamma, beta) = (instance.gammas[0], instance.betas[0]);
    let mut last = vec![None; instance.n];
    for (t, term) in instance.cost.terms.iter().enumerate() {
        for &q in &term.support {
            last[q] = Some(t);
        }
    }
    let mut circuit = Circuit::new(instance.n, Prep::Plus);
    let finish = |circuit: &mut Circuit, q: usize| {
        circuit.push(Gate::xrot(q, beta));
        if instance.post_select.contains(&q) {
            circuit.post_select_now(q);
        }
    };
    for q in (0..instance.n).filter(|&q| last[q].is_none()) {
        finish(&mut circuit, q);
    }
    for (t, term) in instance.cost.terms.iter().enumerate() {
        circuit.push(term_gate(term, gamma, instance.cost.integer_valued));
        for &q in &term.support {
            if last[q] == Some(t) {
                finish(&mut circuit, q);
            }
        }
    }
    circuit.output_map = instance.output_map.clone();
    circuit
}
