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

//! Compiles Clifford+T circuits into post-selected QAOA (or IQP) instances.
//!
//! The pipeline is `preprocess` → `hadamard_substitute` → `collect_phases`.
//! Every intermediate Hadamard becomes a fresh auxiliary qubit joined to
//! the current wire by a diagonal coupling, after which the old wire gets
//! the completing gate and is post-selected on 0.

mod gadget;

pub use gadget::{gadget_solve, Gadget, GadgetError, GadgetSpec, Unitary2};

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_4;

use serde::Serialize;
use thiserror::Error;

use crate::ir::{
    eighth_turns, interaction_graph, validate, Circuit, CostFunction, Gate, GateKind, IrError, Prep,
    QaoaInstance, Term, Violation,
};

/// Coupling residues for the `e^{−iπX/4}` completion.
pub const MIXER_COUPLING: [u8; 4] = [0, 6, 0, 2];
/// Diagonal that turns `H, P, H, e^{−iπX/4}` into the identity on |0⟩.
pub const ENDPOINT_PHASE: [u8; 2] = [7, 1];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompileError {
    #[error("gate {index} ({kind}) is not in the H, Tdg, CZ gate set")]
    UnsupportedGate { index: usize, kind: &'static str },
    #[error("source circuits may not carry post-selection")]
    PostSelectedSource,
    #[error("invalid circuit: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidCircuit(Vec<Violation>),
    #[error("preprocessed circuit breaks an invariant: {0}")]
    InvariantViolated(String),
    #[error("gate {index} ({kind}) is not diagonal and is not a final mixer")]
    NonDiagonalResidue { index: usize, kind: &'static str },
    #[error("qubit {0} has no final mixer")]
    MissingMixer(usize),
    #[error("cost function is not integer-valued")]
    NotIntegerValued,
    #[error(transparent)]
    Ir(#[from] IrError),
}

/// What completes each wire segment: `e^{−iπX/4}` for QAOA, `H` for IQP.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Mixer,
    Hadamard,
}

impl Endpoint {
    fn completion(self, q: usize) -> Gate {
        match self {
            Endpoint::Mixer => Gate::xrot(q, FRAC_PI_4),
            Endpoint::Hadamard => Gate::h(q),
        }
    }

    fn coupling(self, aux: usize, q: usize) -> Gate {
        match self {
            Endpoint::Mixer => Gate::phase2(aux, q, MIXER_COUPLING),
            Endpoint::Hadamard => Gate::cz(aux, q),
        }
    }

    fn is_completion(self, kind: &GateKind) -> bool {
        match (self, kind) {
            (Endpoint::Mixer, GateKind::XRot(t)) => eighth_turns(*t) == Some(1),
            (Endpoint::Hadamard, GateKind::H) => true,
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Wire {
    /// Still in the |+⟩ preparation with nothing applied.
    Fresh,
    /// Last operation was a Hadamard; `emitted` is false when it only
    /// lives in the preparation.
    AfterH { emitted: bool },
    AfterDiag,
}

/// Rewrites `circuit` so every qubit starts in |+⟩, at most one diagonal
/// gate sits between consecutive Hadamards, and each wire ends in the
/// completion gate.
pub fn preprocess(circuit: &Circuit) -> Result<Circuit, CompileError> {
    preprocess_with(circuit, Endpoint::Mixer)
}

pub fn preprocess_with(circuit: &Circuit, endpoint: Endpoint) -> Result<Circuit, CompileError> {
    let violations = validate(circuit);
    if !violations.is_empty() {
        return Err(CompileError::InvalidCircuit(violations));
    }
    if !circuit.post_select.is_empty() {
        return Err(CompileError::PostSelectedSource);
    }
    let n = circuit.n_qubits;
    let mut out = Circuit::new(n, Prep::Plus);
    out.output_map = circuit.output_map.clone();
    let mut state: Vec<Wire> = circuit
        .prep
        .iter()
        .map(|p| match p {
            Prep::Zero => Wire::Fresh,
            Prep::Plus => Wire::AfterH { emitted: false },
        })
        .collect();

    let ready = |out: &mut Circuit, state: &mut [Wire], q: usize| {
        match state[q] {
            Wire::Fresh => out.push(Gate::h(q)),
            Wire::AfterDiag => {
                out.push(Gate::h(q));
                out.push(Gate::h(q));
            }
            Wire::AfterH { .. } => return,
        }
        state[q] = Wire::AfterH { emitted: true };
    };

    for (index, gate) in circuit.gates.iter().enumerate() {
        match gate.kind {
            GateKind::H => {
                let q = gate.qubits[0];
                state[q] = match state[q] {
                    Wire::Fresh => Wire::AfterH { emitted: false },
                    _ => {
                        out.push(Gate::h(q));
                        Wire::AfterH { emitted: true }
                    }
                };
            }
            GateKind::Tdg | GateKind::CZ => {
                for &q in &gate.qubits {
                    ready(&mut out, &mut state, q);
                }
                out.push(gate.clone());
                for &q in &gate.qubits {
                    state[q] = Wire::AfterDiag;
                }
            }
            _ => return Err(CompileError::UnsupportedGate { index, kind: gate.kind.name() }),
        }
    }

    for (q, s) in state.into_iter().enumerate() {
        match endpoint {
            Endpoint::Mixer => {
                if s != Wire::Fresh {
                    out.push(Gate::h(q));
                }
                out.push(Gate::phase1(q, ENDPOINT_PHASE));
                out.push(Gate::h(q));
                out.push(Gate::xrot(q, FRAC_PI_4));
            }
            Endpoint::Hadamard => match s {
                Wire::Fresh => out.push(Gate::h(q)),
                // the emitted Hadamard is already the last gate on the wire
                Wire::AfterH { emitted: true } => {}
                Wire::AfterH { emitted: false } | Wire::AfterDiag => {
                    out.push(Gate::h(q));
                    out.push(Gate::h(q));
                }
            },
        }
    }
    Ok(out)
}

/// Physical qubits each source wire passes through, in order.
/// Consecutive entries are joined by one coupling.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct WireChain {
    pub chains: Vec<Vec<usize>>,
}

impl WireChain {
    pub fn auxiliary_count(&self) -> usize {
        self.chains.iter().map(|c| c.len() - 1).sum()
    }

    /// Final physical qubit of `wire`.
    pub fn end(&self, wire: usize) -> usize {
        *self.chains[wire].last().expect("chains are never empty")
    }

    /// `(old, new)` pairs joined by a coupling.
    pub fn couplings(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.chains.iter().flat_map(|c| c.windows(2).map(|w| (w[0], w[1])))
    }
}

pub fn hadamard_substitute(pre: &Circuit) -> Result<(Circuit, WireChain), CompileError> {
    hadamard_substitute_with(pre, Endpoint::Mixer)
}

/// Replaces every intermediate Hadamard of a preprocessed circuit by an
/// auxiliary qubit, a coupling and a post-selected completion. Auxiliaries
/// are numbered from `n` upwards in creation order.
pub fn hadamard_substitute_with(pre: &Circuit, endpoint: Endpoint) -> Result<(Circuit, WireChain), CompileError> {
    let n = pre.n_qubits;
    if pre.prep.iter().any(|&p| p != Prep::Plus) {
        return Err(CompileError::InvariantViolated("every qubit must start in |+>".into()));
    }
    if !pre.post_select.is_empty() {
        return Err(CompileError::PostSelectedSource);
    }
    let mut last = vec![None; n];
    for (i, g) in pre.gates.iter().enumerate() {
        for &q in &g.qubits {
            last[q] = Some(i);
        }
    }
    for (q, l) in last.iter().enumerate() {
        if !l.is_some_and(|i| endpoint.is_completion(&pre.gates[i].kind)) {
            return Err(CompileError::InvariantViolated(format!("wire {q} does not end in its completion gate")));
        }
    }

    let mut sub = Circuit::new(n, Prep::Plus);
    let mut cursor: Vec<usize> = (0..n).collect();
    let mut chain = WireChain { chains: (0..n).map(|q| vec![q]).collect() };
    let mut diag_run = vec![0usize; n];
    let mut done = vec![false; n];

    for (i, gate) in pre.gates.iter().enumerate() {
        if let Some(&q) = gate.qubits.iter().find(|&&q| done[q]) {
            return Err(CompileError::InvariantViolated(format!("gate {i} acts on wire {q} after its completion")));
        }
        if last[gate.qubits[0]] == Some(i) && gate.kind.arity() == 1 && endpoint.is_completion(&gate.kind) {
            let q = gate.qubits[0];
            sub.push(Gate { kind: gate.kind.clone(), qubits: vec![cursor[q]] });
            done[q] = true;
            continue;
        }
        match gate.kind {
            GateKind::H => {
                let q = gate.qubits[0];
                let j = cursor[q];
                let a = sub.add_qubit(Prep::Plus);
                sub.push(endpoint.coupling(a, j));
                sub.push(endpoint.completion(j));
                sub.post_select_now(j);
                cursor[q] = a;
                chain.chains[q].push(a);
                diag_run[q] = 0;
            }
            ref k if k.is_diagonal() => {
                for &q in &gate.qubits {
                    diag_run[q] += 1;
                    if diag_run[q] > 1 {
                        return Err(CompileError::InvariantViolated(format!(
                            "wire {q} has two diagonal gates without a Hadamard between them (gate {i})"
                        )));
                    }
                }
                sub.push(Gate { kind: gate.kind.clone(), qubits: gate.qubits.iter().map(|&q| cursor[q]).collect() });
            }
            _ => return Err(CompileError::NonDiagonalResidue { index: i, kind: gate.kind.name() }),
        }
    }
    sub.output_map = pre.output_map.iter().map(|(&w, &q)| (w, cursor[q])).collect();
    Ok((sub, chain))
}

fn diagonal_term(gate: &Gate) -> Option<Term> {
    let t = |d: &[u8]| d.iter().map(|&x| f64::from(x)).collect::<Vec<_>>();
    let table = match &gate.kind {
        GateKind::Tdg => vec![0.0, 1.0],
        GateKind::CZ => vec![0.0, 0.0, 0.0, 4.0],
        GateKind::PhaseDiag1(d) => t(d),
        GateKind::PhaseDiag2(d) => t(d),
        _ => return None,
    };
    Some(Term { support: gate.qubits.clone(), table })
}

/// Phase-polynomial form of a substituted circuit: an integer cost `C`
/// with the circuit equal to `completion^{⊗n} · e^{−iπC/4}` on |+⟩^n.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseForm {
    pub cost: CostFunction,
    pub post_select: BTreeSet<usize>,
    pub output_map: BTreeMap<usize, usize>,
}

fn collect_with(sub: &Circuit, endpoint: Endpoint) -> Result<PhaseForm, CompileError> {
    if sub.prep.iter().any(|&p| p != Prep::Plus) {
        return Err(CompileError::InvariantViolated("every qubit must start in |+>".into()));
    }
    let n = sub.n_qubits;
    let mut completed = vec![false; n];
    let mut terms = Vec::new();
    for (index, gate) in sub.gates.iter().enumerate() {
        if let Some(&q) = gate.qubits.iter().find(|&&q| completed[q]) {
            return Err(CompileError::InvariantViolated(format!("gate {index} acts on qubit {q} after its mixer")));
        }
        if let Some(term) = diagonal_term(gate) {
            terms.push(term);
        } else if endpoint.is_completion(&gate.kind) {
            completed[gate.qubits[0]] = true;
        } else {
            return Err(CompileError::NonDiagonalResidue { index, kind: gate.kind.name() });
        }
    }
    if let Some(q) = completed.iter().position(|&c| !c) {
        return Err(CompileError::MissingMixer(q));
    }
    Ok(PhaseForm {
        cost: CostFunction::integer(n, terms)?,
        post_select: sub.post_selected(),
        output_map: sub.output_map.clone(),
    })
}

/// Reads off the `p = 1`, `γ = β = π/4` instance of a substituted circuit.
pub fn collect_phases(sub: &Circuit) -> Result<QaoaInstance, CompileError> {
    collect_with(sub, Endpoint::Mixer).map(PhaseForm::into_qaoa)
}

impl PhaseForm {
    pub fn into_qaoa(self) -> QaoaInstance {
        let mut inst = QaoaInstance::new(self.cost, vec![FRAC_PI_4], vec![FRAC_PI_4]).expect("one layer");
        inst.post_select = self.post_select;
        inst.output_map = self.output_map;
        inst
    }

    pub fn into_iqp(self) -> IqpInstance {
        IqpInstance { n: self.cost.n_vars, cost: self.cost, post_select: self.post_select, output_map: self.output_map }
    }
}

/// `H^{⊗n} e^{−iπC/4} H^{⊗n}` on |0⟩^n with post-selection.
#[derive(Clone, Debug, PartialEq)]
pub struct IqpInstance {
    pub n: usize,
    pub cost: CostFunction,
    pub post_select: BTreeSet<usize>,
    pub output_map: BTreeMap<usize, usize>,
}

fn iqp_phase_gate(term: &Term) -> Gate {
    let res = |t: &f64| (*t as i64).rem_euclid(8) as u8;
    let kind = match term.support.len() {
        1 => GateKind::PhaseDiag1([res(&term.table[0]), res(&term.table[1])]),
        _ => GateKind::PhaseDiag2(std::array::from_fn(|i| res(&term.table[i]))),
    };
    Gate { kind, qubits: term.support.clone() }
}

impl IqpInstance {
    pub fn to_circuit(&self) -> Circuit {
        let mut c = Circuit::new(self.n, Prep::Zero);
        for q in 0..self.n {
            c.push(Gate::h(q));
        }
        for term in &self.cost.terms {
            c.push(iqp_phase_gate(term));
        }
        for q in 0..self.n {
            c.push(Gate::h(q));
        }
        c.post_select = self.post_select.iter().map(|&q| (q, c.gates.len())).collect();
        c.output_map = self.output_map.clone();
        c
    }

    /// Same unitary as [`IqpInstance::to_circuit`] with the first H layer
    /// folded into |+⟩ preparations and each final H (and projection)
    /// moved right after the last phase gate on its qubit.
    pub fn to_local_circuit(&self) -> Circuit {
        let mut last = vec![None; self.n];
        for (t, term) in self.cost.terms.iter().enumerate() {
            for &q in &term.support {
                last[q] = Some(t);
            }
        }
        let mut c = Circuit::new(self.n, Prep::Plus);
        let finish = |c: &mut Circuit, q: usize| {
            c.push(Gate::h(q));
            if self.post_select.contains(&q) {
                c.post_select_now(q);
            }
        };
        for q in (0..self.n).filter(|&q| last[q].is_none()) {
            finish(&mut c, q);
        }
        for (t, term) in self.cost.terms.iter().enumerate() {
            c.push(iqp_phase_gate(term));
            for &q in &term.support {
                if last[q] == Some(t) {
                    finish(&mut c, q);
                }
            }
        }
        c.output_map = self.output_map.clone();
        c
    }
}

/// Shifts every table entry by a multiple of 8 so each term, and hence the
/// cost, is non-decreasing under flipping any variable from 0 to 1. The
/// values mod 8, and so `e^{−iπC/4}`, are unchanged.
pub fn make_monotone(cost: &CostFunction) -> Result<CostFunction, CompileError> {
    if !cost.integer_valued {
        return Err(CompileError::NotIntegerValued);
    }
    let lift = |t: f64, floor: f64| {
        let r = (t as i64).rem_euclid(8) as f64;
        r + 8.0 * ((floor - r).max(0.0) / 8.0).ceil()
    };
    let terms = cost
        .terms
        .iter()
        .map(|term| {
            let t = &term.table;
            // entries in popcount order; each is bounded below by its subsets
            let table = match t.len() {
                2 => {
                    let t0 = lift(t[0], 0.0);
                    vec![t0, lift(t[1], t0)]
                }
                _ => {
                    let t00 = lift(t[0], 0.0);
                    let t01 = lift(t[1], t00);
                    let t10 = lift(t[2], t00);
                    vec![t00, t01, t10, lift(t[3], t01.max(t10))]
                }
            };
            Term { support: term.support.clone(), table }
        })
        .collect();
    Ok(CostFunction::integer(cost.n_vars, terms)?)
}

/// Every intermediate artifact of one compilation.
#[derive(Clone, Debug, PartialEq)]
pub struct Compilation {
    pub endpoint: Endpoint,
    pub preprocessed: Circuit,
    pub substituted: Circuit,
    pub chain: WireChain,
    pub form: PhaseForm,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompileReport {
    pub endpoint: Endpoint,
    pub source_qubits: usize,
    pub auxiliary_qubits: usize,
    pub total_qubits: usize,
    pub post_selected: usize,
    pub terms: usize,
    pub max_degree: usize,
    /// `degree_histogram[d]` counts qubits of interaction degree `d`.
    pub degree_histogram: Vec<usize>,
}

impl Compilation {
    pub fn report(&self) -> CompileReport {
        let g = interaction_graph(&self.form.cost);
        CompileReport {
            endpoint: self.endpoint,
            source_qubits: self.chain.chains.len(),
            auxiliary_qubits: self.chain.auxiliary_count(),
            total_qubits: self.form.cost.n_vars,
            post_selected: self.form.post_select.len(),
            terms: self.form.cost.terms.len(),
            max_degree: g.max_degree,
            degree_histogram: g.degree_histogram(),
        }
    }

    pub fn qaoa(&self) -> QaoaInstance {
        self.form.clone().into_qaoa()
    }

    pub fn iqp(&self) -> IqpInstance {
        self.form.clone().into_iqp()
    }
}

pub fn compile_with(circuit: &Circuit, endpoint: Endpoint, monotone: bool) -> Result<Compilation, CompileError> {
    let preprocessed = preprocess_with(circuit, endpoint)?;
    let (substituted, chain) = hadamard_substitute_with(&preprocessed, endpoint)?;
    let mut form = collect_with(&substituted, endpoint)?;
    if monotone {
        form.cost = make_monotone(&form.cost)?;
    }
    Ok(Compilation { endpoint, preprocessed, substituted, chain, form })
}

/// Compiles an H/Tdg/CZ circuit into a one-layer post-selected QAOA instance
/// with the same output distribution.
pub fn compile(circuit: &Circuit, monotone: bool) -> Result<QaoaInstance, CompileError> {
    compile_with(circuit, Endpoint::Mixer, monotone).map(|c| c.qaoa())
}

pub fn compile_iqp(circuit: &Circuit) -> Result<IqpInstance, CompileError> {
    compile_with(circuit, Endpoint::Hadamard, false).map(|c| c.iqp())
}
