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


//! Shared generators for the integration tests.

#![allow(dead_code)]

use proptest::prelude::*;
use qdich_core::ir::{Circuit, CostFunction, Gate, Prep, QaoaInstance, Term};
use rand::seq::SliceRandom;
use rand::Rng;

/// `(kind, a, b)` triples: kind 0 = H, 1 = Tdg, 2 = CZ.
pub type GateSpec = (u8, usize, usize);

pub fn clifford_t(n: usize, preps: &[bool], spec: &[GateSpec]) -> Circuit {
    let mut c = Circuit::new(n, Prep::Zero);
    for (q, &plus) in preps.iter().take(n).enumerate() {
        if plus {
            c.prep[q] = Prep::Plus;
        }
    }
    for &(kind, a, b) in spec {
        let (a, b) = (a % n, b % n);
        c.push(match kind % 3 {
            0 => Gate::h(a),
            1 => Gate::tdg(a),
            _ if a == b => Gate::h(a),
            _ => Gate::cz(a, b),
        });
    }
    c
}

/// Circuits over H, Tdg and CZ with up to `max_n` qubits and `max_gates` gates.
pub fn arb_clifford_t(max_n: usize, max_gates: usize) -> impl Strategy<Value = Circuit> {
    (
        1..=max_n,
        prop::collection::vec(any::<bool>(), max_n),
        prop::collection::vec((0u8..3, 0usize..16, 0usize..16), 0..=max_gates),
    )
        .prop_map(|(n, preps, spec)| clifford_t(n, &preps, &spec))
}

pub fn random_clifford_t<R: Rng>(rng: &mut R, n: usize, gates: usize) -> Circuit {
    let preps: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let spec: Vec<GateSpec> = (0..gates).map(|_| (rng.gen_range(0..3), rng.gen_range(0..n), rng.gen_range(0..n))).collect();
    clifford_t(n, &preps, &spec)
}

/// Random edges of max degree 2: shuffled vertices cut into paths and
/// cycles, with some vertices left isolated.
pub fn degree2_edges<R: Rng>(rng: &mut R, n: usize) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    let mut i = 0;
    while i < n {
        let len = rng.gen_range(1..=(n - i).min(8));
        let block = &order[i..i + len];
        for w in block.windows(2) {
            edges.push((w[0], w[1]));
        }
        if len >= 3 && rng.gen_bool(0.5) {
            edges.push((block[len - 1], block[0]));
        }
        i += len;
    }
    edges
}

/// Degree-≤2 cost: one term per edge, which always couples both of its
/// variables, plus random 1-local fields. Entries are uniform in `[-bound, bound]`.
pub fn degree2_cost<R: Rng>(rng: &mut R, n: usize, bound: f64) -> CostFunction {
    let table = |rng: &mut R, len: usize| (0..len).map(|_| rng.gen_range(-bound..=bound)).collect::<Vec<f64>>();
    let mut terms = Vec::new();
    for (u, v) in degree2_edges(rng, n) {
        let mut t = table(rng, 4);
        // keep the interaction term away from separable
        if (t[0] - t[1] - t[2] + t[3]).abs() < 0.1 {
            t[3] += 0.5;
        }
        terms.push(Term::new(vec![u, v], t).unwrap());
    }
    for v in 0..n {
        if rng.gen_bool(0.5) {
            let t = table(rng, 2);
            terms.push(Term::new(vec![v], t).unwrap());
        }
    }
    CostFunction::real(n, terms).unwrap()
}

/// Random degree-≤2 instance with angles uniform in `angles`.
pub fn degree2_instance_in<R: Rng>(rng: &mut R, n: usize, p: usize, bound: f64, angles: std::ops::Range<f64>) -> QaoaInstance {
    let cost = degree2_cost(rng, n, bound);
    let gammas = (0..p).map(|_| rng.gen_range(angles.clone())).collect();
    let betas = (0..p).map(|_| rng.gen_range(angles.clone())).collect();
    QaoaInstance::new(cost, gammas, betas).unwrap()
}

pub fn degree2_instance<R: Rng>(rng: &mut R, n: usize, p: usize) -> QaoaInstance {
    degree2_instance_in(rng, n, p, 1.5, -1.0..1.0)
}

/// Path `0 - 1 - … - (n-1)` with random couplings and fields.
pub fn path_instance<R: Rng>(rng: &mut R, n: usize, p: usize) -> QaoaInstance {
    let mut terms: Vec<Term> = (0..n - 1)
        .map(|i| Term::two(i, i + 1, std::array::from_fn(|k| if k == 3 { 1.0 } else { rng.gen_range(-1.0..1.0) })))
        .collect();
    terms.extend((0..n).map(|v| Term::one(v, [0.0, rng.gen_range(-1.0..1.0)])));
    let cost = CostFunction::real(n, terms).unwrap();
    let gammas = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let betas = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
    QaoaInstance::new(cost, gammas, betas).unwrap()
}

/// All `width`-bit strings, most significant first.
pub fn bitstrings(width: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1usize << width).map(move |x| (0..width).map(|k| (x >> (width - 1 - k)) & 1 == 1).collect())
}
