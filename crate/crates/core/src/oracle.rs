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

//! Brute-force statevector oracle.
//!
//! The state is generic over its [`Amplitude`] type. The exact backend
//! stores amplitudes in Z[ω] and keeps a shared power of 1/√2 outside the
//! vector; the floating backend folds every scale factor into `Complex<F>`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Float, One, ToPrimitive, Zero};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::cyclotomic::Cyclotomic;
use crate::ir::{eighth_turns, validate, Circuit, GateKind, Prep, Violation};

pub const MAX_QUBITS: usize = 24;

/// Conditioning probabilities below this are treated as zero on the float backend.
pub const FLOAT_POSTSELECT_FLOOR: f64 = 1e-12;

/// Exact amplitude ring Z[ω].
pub type ExactAmplitude = Cyclotomic<i128>;
/// Exact probability weights, real elements of Z[√2].
pub type ExactWeight = Cyclotomic<BigInt>;

pub type ExactState = StateVector<ExactAmplitude>;
pub type FloatState = StateVector<Complex64>;
pub type ExactDistribution = Distribution<ExactWeight>;
pub type FloatDistribution = Distribution<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{0} qubits exceeds the oracle limit of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("gate {index} ({kind}) has entries outside Q(e^(i*pi/4))")]
    ExactBackendUnsupportedGate { index: usize, kind: &'static str },
    #[error("the post-selection register has zero probability of reading all zeros")]
    ZeroPostSelectionProbability,
    #[error("invalid circuit: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidCircuit(Vec<Violation>),
    #[error("invalid marginal query: {0}")]
    InvalidQuery(String),
    #[error("exact amplitudes outgrew the 128-bit coefficient range")]
    ExactOverflow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Float,
}

/// A gate's matrix with a factor (1/√2)^`inv_sqrt2` pulled out.
#[derive(Clone, Debug)]
pub enum Lowered<A> {
    /// Row-major 2×2.
    Matrix([A; 4], u32),
    Diag1([A; 2]),
    Diag2([A; 4]),
}

/// Probability weight: `|amplitude|²` before the shared scale factor.
pub trait Weight: Clone + fmt::Debug + PartialEq + Zero + Add<Output = Self> + Mul<Output = Self> + Send + Sync {
    const EXACT: bool;
    fn to_f64(&self) -> f64;
}

impl Weight for f64 {
    const EXACT: bool = false;
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Weight for f32 {
    const EXACT: bool = false;
    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Weight for ExactWeight {
    const EXACT: bool = true;
    fn to_f64(&self) -> f64 {
        self.to_c64().re
    }
}

pub trait Amplitude:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    type Weight: Weight;
    const BACKEND: Backend;

    fn lower(kind: &GateKind) -> Option<Lowered<Self>>;
    /// Amplitudes of |+⟩ with their 1/√2 exponent.
    fn plus() -> ([Self; 2], u32);
    fn weight(&self) -> Self::Weight;
    /// Unscaled value as a double-precision complex number.
    fn to_c64(&self) -> Complex64;

    /// Keeps amplitudes representable; may trade vector factors for the exponent.
    fn renormalize(_amps: &mut [Self], _inv_sqrt2: &mut u32) -> Result<(), OracleError> {
        Ok(())
    }
}

fn omega(k: i64) -> ExactAmplitude {
    ExactAmplitude::root_power(k)
}

impl Amplitude for ExactAmplitude {
    type Weight = ExactWeight;
    const BACKEND: Backend = Backend::Exact;

    fn lower(kind: &GateKind) -> Option<Lowered<Self>> {
        let one = Self::one;
        Some(match kind {
            GateKind::H => Lowered::Matrix([one(), one(), one(), -one()], 1),
            GateKind::Tdg => Lowered::Diag1([one(), omega(-1)]),
            GateKind::CZ => Lowered::Diag2([one(), one(), one(), -one()]),
            GateKind::PhaseDiag1(d) => Lowered::Diag1(d.map(|x| omega(-i64::from(x)))),
            GateKind::PhaseDiag2(d) => Lowered::Diag2(d.map(|x| omega(-i64::from(x)))),
            GateKind::XRot(theta) => {
                // e^{-iθX} = cos θ − i sin θ X with θ = mπ/4
                let m = eighth_turns(*theta)?;
                let t = m as f64 * std::f64::consts::FRAC_PI_4;
                let (scale, e) = if m % 2 == 0 { (1.0, 0) } else { (std::f64::consts::SQRT_2, 1) };
                let c = (t.cos() * scale).round() as i64;
                let s = (t.sin() * scale).round() as i64;
                let diag = Self::from_integer(c);
                let off = omega(6) * Self::from_integer(s);
                Lowered::Matrix([diag.clone(), off.clone(), off, diag], e)
            }
            GateKind::GeneralDiag1(_) | GateKind::GeneralDiag2(_) => return None,
        })
    }

    fn plus() -> ([Self; 2], u32) {
        ([Self::one(), Self::one()], 1)
    }

    fn weight(&self) -> ExactWeight {
        self.map(|&c| BigInt::from(c)).norm_sqr()
    }

    fn to_c64(&self) -> Complex64 {
        Cyclotomic::to_c64(self)
    }

    fn renormalize(amps: &mut [Self], inv_sqrt2: &mut u32) -> Result<(), OracleError> {
        const LIMIT: i128 = 1 << 100;
        let mut all_even = true;
        let mut max = 0i128;
        for a in amps.iter() {
            for &c in a.coeffs() {
                all_even &= c % 2 == 0;
                max = max.max(c.abs());
            }
        }
        if max == 0 {
            return Ok(());
        }
        if all_even && *inv_sqrt2 >= 2 {
            let shift = amps
                .iter()
                .flat_map(|a| a.coeffs().iter())
                .filter(|&&c| c != 0)
                .map(|c| c.trailing_zeros())
                .min()
                .unwrap_or(0)
                .min(*inv_sqrt2 / 2);
            for a in amps.iter_mut() {
                *a = Self::from_coeffs(a.coeffs().map(|c| c >> shift));
            }
            *inv_sqrt2 -= 2 * shift;
            max >>= shift;
        }
        if max >= LIMIT {
            return Err(OracleError::ExactOverflow);
        }
        Ok(())
    }
}

impl<F> Amplitude for Complex<F>
where
    F: Float + Weight + fmt::Debug + Send + Sync,
{
    type Weight = F;
    const BACKEND: Backend = Backend::Float;

    fn lower(kind: &GateKind) -> Option<Lowered<Self>> {
        let c = |z: Complex64| Complex::new(F::from(z.re).unwrap(), F::from(z.im).unwrap());
        let phase = |d: u8| c(Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4 * f64::from(d)));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Some(match kind {
            GateKind::H => {
                let r = |x: f64| c(Complex64::new(x, 0.0));
                Lowered::Matrix([r(h), r(h), r(h), r(-h)], 0)
            }
            GateKind::Tdg => Lowered::Diag1([phase(0), phase(1)]),
            GateKind::CZ => Lowered::Diag2([phase(0), phase(0), phase(0), phase(4)]),
            GateKind::PhaseDiag1(d) => Lowered::Diag1(d.map(phase)),
            GateKind::PhaseDiag2(d) => Lowered::Diag2(d.map(phase)),
            GateKind::XRot(theta) => {
                let diag = c(Complex64::new(theta.cos(), 0.0));
                let off = c(Complex64::new(0.0, -theta.sin()));
                Lowered::Matrix([diag, off, off, diag], 0)
            }
            GateKind::GeneralDiag1(e) => Lowered::Diag1(e.map(c)),
            GateKind::GeneralDiag2(e) => Lowered::Diag2(e.map(c)),
        })
    }

    fn plus() -> ([Self; 2], u32) {
        let h = Complex::new(F::from(std::f64::consts::FRAC_1_SQRT_2).unwrap(), F::zero());
        ([h, h], 0)
    }

    fn weight(&self) -> F {
        self.norm_sqr()
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(ToPrimitive::to_f64(&self.re).unwrap(), ToPrimitive::to_f64(&self.im).unwrap())
    }
}

/// Dense state; the represented vector is `amps · (1/√2)^inv_sqrt2`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<A> {
    pub n_qubits: usize,
    pub amps: Vec<A>,
    pub inv_sqrt2: u32,
}

impl<A: Amplitude> StateVector<A> {
    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index].to_c64() * std::f64::consts::FRAC_1_SQRT_2.powi(self.inv_sqrt2 as i32)
    }

    /// Σ|amplitude|² including the shared scale.
    pub fn norm_sqr(&self) -> f64 {
        let sum = self.amps.iter().fold(A::Weight::zero(), |acc, a| acc + a.weight());
        sum.to_f64() * 0.5f64.powi(self.inv_sqrt2 as i32)
    }

    fn shift(&self, q: usize) -> usize {
        self.n_qubits - 1 - q
    }

    pub fn bit(&self, index: usize, q: usize) -> usize {
        (index >> self.shift(q)) & 1
    }

    fn apply(&mut self, gate: &Lowered<A>, qubits: &[usize]) -> Result<(), OracleError> {
        match gate {
            Lowered::Matrix(m, e) => {
                let mask = 1 << self.shift(qubits[0]);
                for i in 0..self.amps.len() {
                    if i & mask != 0 {
                        continue;
                    }
                    let j = i | mask;
                    let (a, b) = (self.amps[i].clone(), self.amps[j].clone());
                    self.amps[i] = combine(&m[0], &a, &m[1], &b);
                    self.amps[j] = combine(&m[2], &a, &m[3], &b);
                }
                self.inv_sqrt2 += e;
            }
            Lowered::Diag1(d) => {
                let s = self.shift(qubits[0]);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    let entry = &d[(i >> s) & 1];
                    if !entry.is_one() {
                        *a = entry.clone() * a.clone();
                    }
                }
            }
            Lowered::Diag2(d) => {
                let (s0, s1) = (self.shift(qubits[0]), self.shift(qubits[1]));
                for (i, a) in self.amps.iter_mut().enumerate() {
                    let entry = &d[2 * ((i >> s0) & 1) + ((i >> s1) & 1)];
                    if !entry.is_one() {
                        *a = entry.clone() * a.clone();
                    }
                }
            }
        }
        A::renormalize(&mut self.amps, &mut self.inv_sqrt2)
    }
}

fn combine<A: Amplitude>(ma: &A, a: &A, mb: &A, b: &A) -> A {
    match (ma.is_zero(), mb.is_zero()) {
        (true, true) => A::zero(),
        (true, false) => mb.clone() * b.clone(),
        (false, true) => ma.clone() * a.clone(),
        (false, false) => ma.clone() * a.clone() + mb.clone() * b.clone(),
    }
}

impl ExactState {
    /// Exact amplitude in Q(ω), with the 1/√2 scale substituted as (ω − ω³)/2.
    pub fn exact_amplitude(&self, index: usize) -> Cyclotomic {
        let a = self.amps[index].map(|&c| BigRational::from_integer(BigInt::from(c)));
        a * Cyclotomic::inv_sqrt2_pow(self.inv_sqrt2)
    }
}

fn lower_all<A: Amplitude>(circuit: &Circuit) -> Result<Vec<Lowered<A>>, OracleError> {
    let violations = validate(circuit);
    if !violations.is_empty() {
        return Err(OracleError::InvalidCircuit(violations));
    }
    circuit
        .gates
        .iter()
        .enumerate()
        .map(|(index, g)| {
            A::lower(&g.kind).ok_or(OracleError::ExactBackendUnsupportedGate { index, kind: g.kind.name() })
        })
        .collect()
}

impl<A: Amplitude> StateVector<A> {
    /// Tensors a new qubit on as the least significant bit.
    fn push_qubit(&mut self, prep: Prep) {
        let pair = match prep {
            Prep::Zero => [A::one(), A::zero()],
            Prep::Plus => {
                let (pair, e) = A::plus();
                self.inv_sqrt2 += e;
                pair
            }
        };
        self.amps = self.amps.iter().flat_map(|a| [a.clone() * pair[0].clone(), a.clone() * pair[1].clone()]).collect();
        self.n_qubits += 1;
    }

    /// Projects the qubit at position `q` onto |0⟩ and drops it, without renormalizing.
    fn project_out(&mut self, q: usize) {
        let s = self.shift(q);
        let low = (1usize << s) - 1;
        let half = self.amps.len() / 2;
        let old = std::mem::take(&mut self.amps);
        self.amps = (0..half).map(|k| old[((k >> s) << (s + 1)) | (k & low)].clone()).collect();
        self.n_qubits -= 1;
    }
}

/// Final state of `circuit` before measurement and before post-selection
/// conditioning.
pub fn simulate<A: Amplitude>(circuit: &Circuit) -> Result<StateVector<A>, OracleError> {
    let lowered = lower_all::<A>(circuit)?;
    let n = circuit.n_qubits;
    if n > MAX_QUBITS {
        return Err(OracleError::TooManyQubits(n));
    }
    // qubit 0 is the most significant bit, so tensor the preparations in order
    let mut state = StateVector { n_qubits: 0, amps: vec![A::one()], inv_sqrt2: 0 };
    for &prep in &circuit.prep {
        state.push_qubit(prep);
    }
    for (gate, low) in circuit.gates.iter().zip(&lowered) {
        state.apply(low, &gate.qubits)?;
    }
    Ok(state)
}

/// State of the qubits that survive post-selection, already projected.
/// `live[k]` is the physical qubit held at position `k`.
struct Reduced<A> {
    state: StateVector<A>,
    live: Vec<usize>,
}

impl<A> Reduced<A> {
    fn shift_of(&self, q: usize) -> usize {
        let k = self.live.iter().position(|&l| l == q).expect("qubit is live");
        self.live.len() - 1 - k
    }
}

/// Simulates with qubits allocated at first use and removed at their
/// projection, so the width is the peak number of simultaneously live
/// qubits rather than the total count.
fn reduce<A: Amplitude>(circuit: &Circuit) -> Result<Reduced<A>, OracleError> {
    let lowered = lower_all::<A>(circuit)?;
    let mut state = StateVector { n_qubits: 0, amps: vec![A::one()], inv_sqrt2: 0 };
    let mut live: Vec<usize> = Vec::new();
    let mut projections: Vec<Vec<usize>> = vec![Vec::new(); circuit.gates.len() + 1];
    for (&q, &at) in &circuit.post_select {
        projections[at.min(circuit.gates.len())].push(q);
    }
    let ensure = |state: &mut StateVector<A>, live: &mut Vec<usize>, q: usize| -> Result<usize, OracleError> {
        if let Some(k) = live.iter().position(|&l| l == q) {
            return Ok(k);
        }
        if live.len() == MAX_QUBITS {
            return Err(OracleError::TooManyQubits(MAX_QUBITS + 1));
        }
        state.push_qubit(circuit.prep[q]);
        live.push(q);
        Ok(live.len() - 1)
    };
    let project = |state: &mut StateVector<A>, live: &mut Vec<usize>, qs: &[usize]| -> Result<(), OracleError> {
        for &q in qs {
            let k = ensure(state, live, q)?;
            state.project_out(k);
            live.remove(k);
        }
        Ok(())
    };
    for (i, (gate, low)) in circuit.gates.iter().zip(&lowered).enumerate() {
        project(&mut state, &mut live, &projections[i])?;
        let pos = gate.qubits.iter().map(|&q| ensure(&mut state, &mut live, q)).collect::<Result<Vec<_>, _>>()?;
        state.apply(low, &pos)?;
    }
    project(&mut state, &mut live, &projections[circuit.gates.len()])?;
    for q in 0..circuit.n_qubits {
        if !circuit.post_select.contains_key(&q) {
            ensure(&mut state, &mut live, q)?;
        }
    }
    Ok(Reduced { state, live })
}

/// Output distribution over the logical output wires conditioned on the
/// post-selection register reading all zeros.
///
/// Weights are unnormalized and share the factor `2^-inv_sqrt2`; outcome
/// index bit order puts the lowest logical wire leftmost.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<W> {
    pub wires: Vec<usize>,
    pub weights: Vec<W>,
    pub total: W,
    pub inv_sqrt2: u32,
}

impl<W: Weight> Distribution<W> {
    pub fn width(&self) -> usize {
        self.wires.len()
    }

    pub fn probability(&self, outcome: usize) -> f64 {
        self.weights[outcome].to_f64() / self.total.to_f64()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let t = self.total.to_f64();
        self.weights.iter().map(|w| w.to_f64() / t).collect()
    }

    /// Probability that the post-selection register reads all zeros.
    pub fn conditioning_probability(&self) -> f64 {
        self.total.to_f64() * 0.5f64.powi(self.inv_sqrt2 as i32)
    }

    /// Outcomes with nonzero weight.
    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&x| !self.weights[x].is_zero()).collect()
    }

    /// Pointwise equality of the conditional distributions, decided by
    /// cross-multiplication so no division is needed.
    pub fn same_distribution(&self, other: &Distribution<W>) -> bool {
        self.weights.len() == other.weights.len()
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| a.clone() * other.total.clone() == b.clone() * self.total.clone())
    }

    pub fn bitstring(&self, outcome: usize) -> String {
        let m = self.width();
        (0..m).map(|k| if (outcome >> (m - 1 - k)) & 1 == 1 { '1' } else { '0' }).collect()
    }

    /// `{"outcomes": {bitstring: probability}, "conditioning_probability": c}`
    /// listing only the support.
    pub fn to_json(&self) -> Value {
        let mut outcomes = Map::new();
        for x in self.support() {
            outcomes.insert(self.bitstring(x), json!(self.probability(x)));
        }
        json!({ "outcomes": outcomes, "conditioning_probability": self.conditioning_probability() })
    }
}

fn check_conditioning<W: Weight>(total: &W, inv_sqrt2: u32) -> Result<(), OracleError> {
    let zero = if W::EXACT {
        total.is_zero()
    } else {
        total.to_f64() * 0.5f64.powi(inv_sqrt2 as i32) < FLOAT_POSTSELECT_FLOOR
    };
    if zero {
        Err(OracleError::ZeroPostSelectionProbability)
    } else {
        Ok(())
    }
}

pub fn post_selected_distribution<A: Amplitude>(circuit: &Circuit) -> Result<Distribution<A::Weight>, OracleError> {
    let reduced = reduce::<A>(circuit)?;
    let wires: Vec<usize> = circuit.output_map.keys().copied().collect();
    let shifts: Vec<usize> = circuit.output_map.values().map(|&q| reduced.shift_of(q)).collect();
    let state = reduced.state;
    let m = wires.len();
    let mut weights = vec![A::Weight::zero(); 1 << m];
    for (i, a) in state.amps.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let x = shifts.iter().fold(0, |x, &s| 2 * x + ((i >> s) & 1));
        weights[x] = weights[x].clone() + a.weight();
    }
    let total = weights.iter().fold(A::Weight::zero(), |acc, w| acc + w.clone());
    check_conditioning(&total, state.inv_sqrt2)?;
    Ok(Distribution { wires, weights, total, inv_sqrt2: state.inv_sqrt2 })
}

/// `numer / denom` with both weights sharing the same scale factor.
#[derive(Clone, Debug, PartialEq)]
pub struct Probability<W> {
    pub numer: W,
    pub denom: W,
}

impl<W: Weight> Probability<W> {
    pub fn to_f64(&self) -> f64 {
        self.numer.to_f64() / self.denom.to_f64()
    }
}

/// Pr[Z_S = z_S] on physical qubits, conditioned on the post-selection
/// register when it is nonempty.
pub fn marginal_oracle<A: Amplitude>(
    circuit: &Circuit,
    subset: &[usize],
    outcome: &[bool],
) -> Result<Probability<A::Weight>, OracleError> {
    if subset.len() != outcome.len() {
        return Err(OracleError::InvalidQuery(format!(
            "{} qubits but {} outcome bits",
            subset.len(),
            outcome.len()
        )));
    }
    for (i, &q) in subset.iter().enumerate() {
        if q >= circuit.n_qubits {
            return Err(OracleError::InvalidQuery(format!("qubit {q} is out of range")));
        }
        if circuit.post_select.contains_key(&q) {
            return Err(OracleError::InvalidQuery(format!("qubit {q} is post-selected")));
        }
        if subset[..i].contains(&q) {
            return Err(OracleError::InvalidQuery(format!("qubit {q} is listed twice")));
        }
    }
    let reduced = reduce::<A>(circuit)?;
    let (mut mask, mut want) = (0usize, 0usize);
    for (&q, &b) in subset.iter().zip(outcome) {
        mask |= 1 << reduced.shift_of(q);
        want |= (b as usize) << reduced.shift_of(q);
    }
    let state = reduced.state;
    let mut numer = A::Weight::zero();
    let mut denom = A::Weight::zero();
    for (i, a) in state.amps.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let w = a.weight();
        if i & mask == want {
            numer = numer + w.clone();
        }
        denom = denom + w;
    }
    check_conditioning(&denom, state.inv_sqrt2)?;
    Ok(Probability { numer, denom })
}

/// Smallest `c ≥ 1` with `D(x)/c ≤ D'(x) ≤ c·D(x)` for every `x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MultiplicativeError {
    Finite(f64),
    Infinite,
}

impl MultiplicativeError {
    pub fn is_exactly_one(&self) -> bool {
        *self == MultiplicativeError::Finite(1.0)
    }
}

impl fmt::Display for MultiplicativeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultiplicativeError::Finite(c) => write!(f, "{c}"),
            MultiplicativeError::Infinite => f.write_str("inf"),
        }
    }
}

pub fn multiplicative_error(d: &[f64], d2: &[f64]) -> MultiplicativeError {
    assert_eq!(d.len(), d2.len(), "distributions over different outcome spaces");
    let mut c = 1.0f64;
    for (&a, &b) in d.iter().zip(d2) {
        match (a == 0.0, b == 0.0) {
            (true, true) => {}
            (true, false) | (false, true) => return MultiplicativeError::Infinite,
            (false, false) => c = c.max(a / b).max(b / a),
        }
    }
    MultiplicativeError::Finite(c)
}

/// Multiplicative error between two oracle distributions; exactly 1 when the
/// exact backend certifies pointwise equality.
pub fn distribution_error<W: Weight>(d: &Distribution<W>, d2: &Distribution<W>) -> MultiplicativeError {
    if W::EXACT && d.same_distribution(d2) {
        return MultiplicativeError::Finite(1.0);
    }
    multiplicative_error(&d.probabilities(), &d2.probabilities())
}
