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

//! Post-selected QAOA compilation and degree-2 QAOA simulation.

pub mod compiler;
pub mod cyclotomic;
pub mod ir;
pub mod oracle;
pub mod tnsim;

pub use cyclotomic::{Coefficient, Cyclotomic};
pub use oracle::{ExactAmplitude, ExactDistribution, ExactState, FloatDistribution, FloatState};

/// Q(ω) with arbitrary-precision rational coefficients.
pub type RationalCyclotomic = Cyclotomic<num_rational::BigRational>;
/// The ring Z[ω] with arbitrary-precision coefficients.
pub type IntegerCyclotomic = Cyclotomic<num_bigint::BigInt>;
/// Double-precision tensor-network simulator.
pub type Simulator = tnsim::Simulator<f64>;
/// Single-precision tensor-network simulator.
pub type Simulator32 = tnsim::Simulator<f32>;
