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


mod common;

use std::collections::BTreeMap;

use num_complex::Complex64;
use qdich_core::ir::{qaoa_to_circuit, CostFunction, QaoaInstance, Term};
use qdich_core::oracle::{marginal_oracle, post_selected_distribution};
use qdich_core::tnsim::{marginal, ComponentKind, Simulator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{bitstrings, degree2_instance};

fn oracle(inst: &QaoaInstance, subset: &[usize], outcome: &[bool]) -> f64 {
    marginal_oracle::<Complex64>(&qaoa_to_circuit(inst), subset, outcome).unwrap().to_f64()
}

fn random_params(rng: &mut ChaCha8Rng, p: usize) -> (Vec<f64>, Vec<f64>) {
    let two_pi = 2.0 * std::f64::consts::PI;
    ((0..p).map(|_| rng.gen_range(0.0..two_pi)).collect(), (0..p).map(|_| rng.gen_range(0.0..two_pi)).collect())
}

#[test]
fn path_of_three_full_strings() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cost = CostFunction::real(
        3,
        vec![Term::two(0, 1, [0.3, -1.2, 0.8, 1.9]), Term::two(1, 2, [1.0, 0.0, -0.4, 0.7]), Term::one(1, [0.2, -0.5])],
    )
    .unwrap();
    let (g, b) = random_params(&mut rng, 1);
    let inst = QaoaInstance::new(cost, g, b).unwrap();
    let sim = Simulator::<f64>::new(&inst).unwrap();
    assert_eq!(sim.components()[0].kind, ComponentKind::Path);
    let mut total = 0.0;
    for z in bitstrings(3) {
        let m = sim.marginal(&[0, 1, 2], &z).unwrap();
        assert!((m - oracle(&inst, &[0, 1, 2], &z)).abs() < 1e-12);
        total += m;
    }
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn cycle_of_six_two_constraints() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let terms = (0..6)
        .map(|i| {
            let t: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
            Term::two(i, (i + 1) % 6, t)
        })
        .collect();
    let (g, b) = random_params(&mut rng, 2);
    let inst = QaoaInstance::new(CostFunction::real(6, terms).unwrap(), g, b).unwrap();
    let sim = Simulator::<f64>::new(&inst).unwrap();
    assert_eq!(sim.components()[0].kind, ComponentKind::Cycle);
    for z in bitstrings(2) {
        let m = sim.marginal(&[1, 4], &z).unwrap();
        assert!((m - oracle(&inst, &[1, 4], &z)).abs() < 1e-12, "{m}");
    }
}

#[test]
fn empty_constraints_give_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let inst = degree2_instance(&mut rng, 12, 3);
    let sim = Simulator::<f64>::new(&inst).unwrap();
    for i in 0..sim.components().len() {
        let m = sim.component_marginal(i, &BTreeMap::new()).unwrap();
        assert!((m - 1.0).abs() < 1e-12);
    }
    assert_eq!(sim.marginal(&[], &[]).unwrap(), 1.0);
}

#[test]
fn disjoint_paths_factor() {
    let cost = CostFunction::real(
        5,
        vec![Term::two(0, 1, [0.0, 1.0, 0.5, -0.3]), Term::two(2, 3, [0.2, 0.0, 1.1, 0.4]), Term::two(3, 4, [1.0, 0.0, 0.0, 1.0])],
    )
    .unwrap();
    let inst = QaoaInstance::new(cost, vec![0.7, -0.2], vec![0.4, 1.3]).unwrap();
    let sim = Simulator::<f64>::new(&inst).unwrap();
    let both = sim.marginal(&[1, 3], &[true, false]).unwrap();
    let a = sim.marginal(&[1], &[true]).unwrap();
    let b = sim.marginal(&[3], &[false]).unwrap();
    assert!((both - a * b).abs() < 1e-15);
    assert!((both - oracle(&inst, &[1, 3], &[true, false])).abs() < 1e-12);
}

#[test]
fn ten_qubits_mixed_components() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..3 {
        let inst = degree2_instance(&mut rng, 10, 2);
        let circuit = qaoa_to_circuit(&inst);
        let dist = post_selected_distribution::<Complex64>(&circuit).unwrap();
        let sim = Simulator::<f64>::new(&inst).unwrap();
        let all: Vec<usize> = (0..10).collect();
        for (x, z) in bitstrings(10).enumerate().step_by(37) {
            assert!((sim.marginal(&all, &z).unwrap() - dist.probability(x)).abs() < 1e-12);
        }
    }
}

#[test]
fn nested_queries_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..20 {
        let inst = degree2_instance(&mut rng, 9, 2);
        let sim = Simulator::<f64>::new(&inst).unwrap();
        let k = rng.gen_range(0..8);
        let subset: Vec<usize> = (0..k).collect();
        let z: Vec<bool> = (0..k).map(|_| rng.gen()).collect();
        let whole = sim.marginal(&subset, &z).unwrap();
        let mut more = subset.clone();
        more.push(k);
        let split: f64 = [false, true]
            .iter()
            .map(|&b| {
                let mut zb = z.clone();
                zb.push(b);
                sim.marginal(&more, &zb).unwrap()
            })
            .sum();
        assert!((whole - split).abs() < 1e-10);
    }
}

#[test]
fn single_precision_is_close() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let inst = degree2_instance(&mut rng, 8, 2);
    let z = [true, false, true];
    let lo = Simulator::<f32>::new(&inst).unwrap().marginal(&[0, 4, 7], &z).unwrap();
    let hi = marginal(&inst, &[0, 4, 7], &z).unwrap();
    assert!((f64::from(lo) - hi).abs() < 1e-4);
}

#[test]
fn depth_zero_is_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let inst = degree2_instance(&mut rng, 6, 0);
    let m = marginal(&inst, &[0, 2, 5], &[true, true, false]).unwrap();
    assert!((m - 0.125).abs() < 1e-15);
}

#[test]
fn chain_rule_product_matches_marginal() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let n = rng.gen_range(3..12);
        let p = rng.gen_range(1..4);
        let inst = degree2_instance(&mut rng, n, p);
        let sim = Simulator::<f64>::new(&inst).unwrap();
        let sampler = sim.sampler();
        let all: Vec<usize> = (0..n).collect();
        for _ in 0..5 {
            let trace = sampler.sample_trace(&mut rng);
            let full = sim.marginal(&all, &trace.bits).unwrap();
            assert!((trace.probability() - full).abs() < 1e-10);
            assert_eq!(trace.conditionals.len(), n);
        }
    }
}

#[test]
fn seeded_samples_repeat() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let inst = degree2_instance(&mut rng, 12, 2);
    let sim = Simulator::<f64>::new(&inst).unwrap();
    let a = sim.sampler().sample(42, 50);
    let b = sim.sampler().sample(42, 50);
    assert_eq!(a, b);
    assert_ne!(a, sim.sampler().sample(43, 50));
    assert!(sim.sampler().sample(1, 0).is_empty());
}
