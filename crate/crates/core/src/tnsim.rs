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

//! Exact marginals and chain-rule sampling for QAOA instances whose
//! interaction graph has maximum degree 2.
//!
//! Such a graph splits into isolated vertices, paths and cycles, and the
//! output state factors over them. Probabilities are contracted on the
//! doubled (ket ⊗ bra) network along each component. A vertex carries one
//! doubled basis value per phase layer, so a frontier between neighbours
//! has dimension `4^p`, or `4^{2p}` on a cycle whose wrap edge is held open.
//!
//! A doubled configuration `c` packs digit `d_k = 2·x^k + y^k` at base-4
//! position `k`, where `x` is the ket history and `y` the bra history of
//! the vertex before layer `k`.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_complex::Complex;
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::ir::{interaction_graph, InteractionGraph, QaoaInstance};

/// Scalar type for the contraction.
pub trait Real: Float + Debug + Send + Sync + 'static {}

impl<F: Float + Debug + Send + Sync + 'static> Real for F {}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TnError {
    #[error("vertex {vertex} has degree {degree}; the simulator needs degree at most 2")]
    DegreeTooHigh { vertex: usize, degree: usize },
    #[error("instances with post-selection are not supported")]
    PostSelectionUnsupported,
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    Isolated,
    Path,
    Cycle,
}

/// A connected component in canonical order. `edges[i]` joins
/// `vertices[i]` and `vertices[i + 1]`; a cycle's last edge wraps back
/// to `vertices[0]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    pub kind: ComponentKind,
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

/// Splits a degree-≤2 graph into components sorted by lowest vertex.
/// Paths start at their lower-indexed endpoint; cycles start at their
/// lowest vertex and head toward its lower-indexed neighbour.
pub fn decompose(graph: &InteractionGraph) -> Result<Vec<Component>, TnError> {
    for v in 0..graph.n {
        let degree = graph.degree(v);
        if degree > 2 {
            return Err(TnError::DegreeTooHigh { vertex: v, degree });
        }
    }
    let mut seen = vec![false; graph.n];
    let mut out = Vec::new();
    for start in 0..graph.n {
        if seen[start] {
            continue;
        }
        // collect the component, then pick its canonical start
        let mut members = vec![start];
        seen[start] = true;
        let mut i = 0;
        while i < members.len() {
            for u in graph.neighbors(members[i]) {
                if !seen[u] {
                    seen[u] = true;
                    members.push(u);
                }
            }
            i += 1;
        }
        let kind = match members.len() {
            1 => ComponentKind::Isolated,
            _ if members.iter().all(|&v| graph.degree(v) == 2) => ComponentKind::Cycle,
            _ => ComponentKind::Path,
        };
        let first = match kind {
            ComponentKind::Path => *members.iter().filter(|&&v| graph.degree(v) == 1).min().expect("path endpoint"),
            _ => *members.iter().min().expect("nonempty"),
        };
        let mut order = vec![first];
        let mut prev = usize::MAX;
        let mut cur = first;
        loop {
            let next = graph.neighbors(cur).filter(|&u| u != prev && u != first).min();
            match next {
                Some(u) if order.len() < members.len() => {
                    order.push(u);
                    prev = cur;
                    cur = u;
                }
                _ => break,
            }
        }
        let mut edges: Vec<(usize, usize)> = order.windows(2).map(|w| (w[0], w[1])).collect();
        if kind == ComponentKind::Cycle {
            edges.push((order[order.len() - 1], order[0]));
        }
        out.push(Component { kind, vertices: order, edges });
    }
    Ok(out)
}

/// Crossing counts for each cut of a linear qubit ordering. Cut `i`
/// (1-based) separates the first `i` qubits of the ordering from the rest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutProfile {
    pub ordering: Vec<usize>,
    pub p: usize,
    /// Gates of the layered circuit crossing each cut.
    pub gate_crossings: Vec<usize>,
    /// Interaction-graph edges crossing each cut.
    pub edge_crossings: Vec<usize>,
    pub max_gate_crossings: usize,
    /// `p · max δ`.
    pub width: usize,
}

/// Cut profile of `instance` under `ordering`. Works for any degree.
pub fn cut_width(instance: &QaoaInstance, ordering: &[usize]) -> Result<CutProfile, TnError> {
    let n = instance.n;
    let mut pos = vec![usize::MAX; n];
    for (i, &q) in ordering.iter().enumerate() {
        if q >= n || pos[q] != usize::MAX {
            return Err(TnError::InvalidQuery(format!("ordering is not a permutation of 0..{n}")));
        }
        pos[q] = i;
    }
    if ordering.len() != n {
        return Err(TnError::InvalidQuery(format!("ordering is not a permutation of 0..{n}")));
    }
    let cuts = n.saturating_sub(1);
    let span = |a: usize, b: usize| (pos[a].min(pos[b]), pos[a].max(pos[b]));
    let mut gate_crossings = vec![0; cuts];
    for term in instance.cost.terms.iter().filter(|t| t.support.len() == 2) {
        let (lo, hi) = span(term.support[0], term.support[1]);
        for c in &mut gate_crossings[lo..hi] {
            *c += instance.p;
        }
    }
    let mut edge_crossings = vec![0; cuts];
    for &(a, b) in &interaction_graph(&instance.cost).edges {
        let (lo, hi) = span(a, b);
        for c in &mut edge_crossings[lo..hi] {
            *c += 1;
        }
    }
    Ok(CutProfile {
        ordering: ordering.to_vec(),
        p: instance.p,
        max_gate_crossings: gate_crossings.iter().copied().max().unwrap_or(0),
        width: instance.p * edge_crossings.iter().copied().max().unwrap_or(0),
        gate_crossings,
        edge_crossings,
    })
}

type C<F> = Complex<F>;

fn real<F: Real>(x: f64) -> F {
    F::from(x).expect("representable")
}

fn phase<F: Real>(angle: F) -> C<F> {
    Complex::from_polar(F::one(), -angle)
}

/// Applies `Π_k e_k` along the base-4 digits: `out[c'] = Σ_c v[c] Π_k e_k[d_k(c)][d_k(c')]`.
fn transfer<F: Real>(v: &[C<F>], mats: &[[[C<F>; 4]; 4]]) -> Vec<C<F>> {
    let mut cur = v.to_vec();
    let mut next = vec![C::new(F::zero(), F::zero()); v.len()];
    let mut stride = 1;
    for e in mats {
        let block = 4 * stride;
        for base in (0..cur.len()).step_by(block) {
            for off in 0..stride {
                let i = base + off;
                let a = [cur[i], cur[i + stride], cur[i + 2 * stride], cur[i + 3 * stride]];
                for (dp, slot) in (0..4).map(|dp| (dp, i + dp * stride)) {
                    next[slot] = a[0] * e[0][dp] + a[1] * e[1][dp] + a[2] * e[2][dp] + a[3] * e[3][dp];
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
        stride *= 4;
    }
    cur
}

fn dot<F: Real>(a: &[C<F>], b: &[C<F>], c: &[C<F>]) -> C<F> {
    a.iter().zip(b).zip(c).fold(C::new(F::zero(), F::zero()), |acc, ((x, y), z)| acc + *x * *y * *z)
}

/// Spreads bit `k` of `x` to bit `2k`.
fn spread(x: usize) -> usize {
    (0..usize::BITS as usize / 2).fold(0, |acc, k| acc | (((x >> k) & 1) << (2 * k)))
}

/// Degree-≤2 QAOA instance prepared for contraction.
#[derive(Clone, Debug)]
pub struct Simulator<F: Real> {
    n: usize,
    p: usize,
    gammas: Vec<F>,
    betas: Vec<F>,
    /// Summed 1-local tables.
    fields: Vec<[F; 2]>,
    /// Summed coupling tables keyed by `(min, max)`, indexed `2·x_min + x_max`.
    couplings: BTreeMap<(usize, usize), [F; 4]>,
    components: Vec<Component>,
    component_of: Vec<usize>,
}

impl<F: Real> Simulator<F> {
    pub fn new(instance: &QaoaInstance) -> Result<Self, TnError> {
        if !instance.post_select.is_empty() {
            return Err(TnError::PostSelectionUnsupported);
        }
        let n = instance.n;
        let graph = interaction_graph(&instance.cost);
        let components = decompose(&graph)?;
        let mut fields = vec![[F::zero(); 2]; n];
        let mut couplings: BTreeMap<(usize, usize), [F; 4]> = BTreeMap::new();
        for term in &instance.cost.terms {
            let t: Vec<F> = term.table.iter().map(|&x| real(x)).collect();
            match term.support[..] {
                [v] => {
                    fields[v][0] = fields[v][0] + t[0];
                    fields[v][1] = fields[v][1] + t[1];
                }
                [a, b] if graph.has_edge(a, b) => {
                    let (key, oriented) = if a < b { ((a, b), [t[0], t[1], t[2], t[3]]) } else { ((b, a), [t[0], t[2], t[1], t[3]]) };
                    let slot = couplings.entry(key).or_insert([F::zero(); 4]);
                    for i in 0..4 {
                        slot[i] = slot[i] + oriented[i];
                    }
                }
                // off the graph the term depends on at most one of its variables
                [a, b] => {
                    if term.depends_on_slot(0) {
                        fields[a][0] = fields[a][0] + t[0];
                        fields[a][1] = fields[a][1] + t[2];
                    } else if term.depends_on_slot(1) {
                        fields[b][0] = fields[b][0] + t[0];
                        fields[b][1] = fields[b][1] + t[1];
                    }
                }
                _ => unreachable!("terms have one or two variables"),
            }
        }
        let mut component_of = vec![0; n];
        for (i, comp) in components.iter().enumerate() {
            for &v in &comp.vertices {
                component_of[v] = i;
            }
        }
        Ok(Simulator {
            n,
            p: instance.p,
            gammas: instance.gammas.iter().map(|&g| real(g)).collect(),
            betas: instance.betas.iter().map(|&b| real(b)).collect(),
            fields,
            couplings,
            components,
            component_of,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    fn dim(&self) -> usize {
        1 << (2 * self.p)
    }

    /// Coupling table oriented as `2·x_a + x_b`.
    fn coupling(&self, a: usize, b: usize) -> [F; 4] {
        if a < b {
            self.couplings[&(a, b)]
        } else {
            let t = self.couplings[&(b, a)];
            [t[0], t[2], t[1], t[3]]
        }
    }

    /// Per-layer 4×4 factors of the doubled edge tensor from `a` to `b`.
    fn edge_mats(&self, a: usize, b: usize) -> Vec<[[C<F>; 4]; 4]> {
        let j = self.coupling(a, b);
        self.gammas
            .iter()
            .map(|&g| {
                std::array::from_fn(|da| {
                    std::array::from_fn(|db| {
                        let (xa, ya, xb, yb) = (da >> 1, da & 1, db >> 1, db & 1);
                        phase(g * (j[2 * xa + xb] - j[2 * ya + yb]))
                    })
                })
            })
            .collect()
    }

    fn mixer(&self, k: usize, to: usize, from: usize) -> C<F> {
        let b = self.betas[k];
        if to == from {
            C::new(b.cos(), F::zero())
        } else {
            C::new(F::zero(), -b.sin())
        }
    }

    /// Single-vertex amplitude `A(x, z)` for every history `x` (bit `k`
    /// is `x^k`) and final value `z`.
    fn amplitudes(&self, v: usize) -> Vec<[C<F>; 2]> {
        let h = self.fields[v];
        let half = real::<F>(std::f64::consts::FRAC_1_SQRT_2);
        (0..1usize << self.p)
            .map(|x| {
                std::array::from_fn(|z| {
                    let mut a = C::new(half, F::zero());
                    for k in 0..self.p {
                        let xk = (x >> k) & 1;
                        let to = if k + 1 == self.p { z } else { (x >> (k + 1)) & 1 };
                        a = a * phase(self.gammas[k] * h[xk]) * self.mixer(k, to, xk);
                    }
                    a
                })
            })
            .collect()
    }

    /// Doubled local tensor `L(c) = Σ_{z allowed} A(x, z)·conj(A(y, z))`.
    fn local(&self, v: usize, allowed: Option<bool>) -> Vec<C<F>> {
        let amps = self.amplitudes(v);
        let mut out = vec![C::new(F::zero(), F::zero()); self.dim()];
        let zs: &[usize] = match allowed {
            None => &[0, 1],
            Some(false) => &[0],
            Some(true) => &[1],
        };
        for (x, ax) in amps.iter().enumerate() {
            for (y, ay) in amps.iter().enumerate() {
                let c = (spread(x) << 1) | spread(y);
                out[c] = zs.iter().fold(C::new(F::zero(), F::zero()), |acc, &z| acc + ax[z] * ay[z].conj());
            }
        }
        out
    }

    fn isolated_probs(&self, v: usize) -> [F; 2] {
        let h = self.fields[v];
        let half = real::<F>(std::f64::consts::FRAC_1_SQRT_2);
        let mut s = [C::new(half, F::zero()); 2];
        for k in 0..self.p {
            for (b, a) in s.iter_mut().enumerate() {
                *a = *a * phase(self.gammas[k] * h[b]);
            }
            s = [
                self.mixer(k, 0, 0) * s[0] + self.mixer(k, 0, 1) * s[1],
                self.mixer(k, 1, 0) * s[0] + self.mixer(k, 1, 1) * s[1],
            ];
        }
        [s[0].norm_sqr(), s[1].norm_sqr()]
    }

    /// Wrap tensor `E(c, c1)` of a cycle, stored by rows `c1`.
    fn wrap_matrix(&self, comp: &Component) -> Vec<Vec<C<F>>> {
        let (last, first) = *comp.edges.last().expect("cycle has edges");
        let mats = self.edge_mats(last, first);
        let d = self.dim();
        (0..d)
            .map(|c1| {
                (0..d)
                    .map(|c| {
                        mats.iter().enumerate().fold(C::new(F::one(), F::zero()), |acc, (k, e)| {
                            acc * e[(c >> (2 * k)) & 3][(c1 >> (2 * k)) & 3]
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// Marginal of one component under a partial assignment of its vertices.
    pub fn component_marginal(&self, index: usize, constraints: &BTreeMap<usize, bool>) -> Result<F, TnError> {
        let comp = self
            .components
            .get(index)
            .ok_or_else(|| TnError::InvalidQuery(format!("no component {index}")))?;
        if let Some(v) = constraints.keys().find(|&&v| v >= self.n || self.component_of[v] != index) {
            return Err(TnError::InvalidQuery(format!("vertex {v} is not in component {index}")));
        }
        let allowed = |v: usize| constraints.get(&v).copied();
        let verts = &comp.vertices;
        Ok(match comp.kind {
            ComponentKind::Isolated => {
                let pr = self.isolated_probs(verts[0]);
                match allowed(verts[0]) {
                    None => pr[0] + pr[1],
                    Some(b) => pr[b as usize],
                }
            }
            ComponentKind::Path => {
                let mut m = self.local(verts[0], allowed(verts[0]));
                for w in verts.windows(2) {
                    m = transfer(&m, &self.edge_mats(w[0], w[1]));
                    for (a, l) in m.iter_mut().zip(self.local(w[1], allowed(w[1]))) {
                        *a = *a * l;
                    }
                }
                m.iter().fold(F::zero(), |acc, a| acc + a.re)
            }
            ComponentKind::Cycle => {
                let d = self.dim();
                let first = self.local(verts[0], allowed(verts[0]));
                let mut rows: Vec<Vec<C<F>>> = (0..d)
                    .map(|c1| {
                        let mut r = vec![C::new(F::zero(), F::zero()); d];
                        r[c1] = first[c1];
                        r
                    })
                    .collect();
                for w in verts.windows(2) {
                    let mats = self.edge_mats(w[0], w[1]);
                    let l = self.local(w[1], allowed(w[1]));
                    for r in rows.iter_mut() {
                        *r = transfer(r, &mats);
                        for (a, x) in r.iter_mut().zip(&l) {
                            *a = *a * *x;
                        }
                    }
                }
                let wrap = self.wrap_matrix(comp);
                rows.iter().zip(&wrap).fold(F::zero(), |acc, (r, e)| {
                    acc + r.iter().zip(e).fold(F::zero(), |s, (a, b)| s + (*a * *b).re)
                })
            }
        })
    }

    /// `Pr[Z_S = z_S]` as a product of per-component marginals.
    pub fn marginal(&self, subset: &[usize], outcome: &[bool]) -> Result<F, TnError> {
        if subset.len() != outcome.len() {
            return Err(TnError::InvalidQuery(format!("{} qubits but {} outcome bits", subset.len(), outcome.len())));
        }
        let mut per: BTreeMap<usize, BTreeMap<usize, bool>> = BTreeMap::new();
        for (&q, &b) in subset.iter().zip(outcome) {
            if q >= self.n {
                return Err(TnError::InvalidQuery(format!("qubit {q} is out of range")));
            }
            if per.entry(self.component_of[q]).or_default().insert(q, b).is_some() {
                return Err(TnError::InvalidQuery(format!("qubit {q} is listed twice")));
            }
        }
        per.iter().try_fold(F::one(), |acc, (&i, cons)| Ok(acc * self.component_marginal(i, cons)?))
    }

    /// Precomputes the right environments used by chain-rule sampling.
    pub fn sampler(&self) -> Sampler<'_, F> {
        let envs = self.components.iter().map(|comp| self.environment(comp)).collect();
        Sampler { sim: self, envs }
    }

    fn environment(&self, comp: &Component) -> Env<F> {
        let verts = &comp.vertices;
        let len = verts.len();
        match comp.kind {
            ComponentKind::Isolated => Env::Isolated(self.isolated_probs(verts[0])),
            ComponentKind::Path => {
                // right[t](c) contracts vertices t+1.. with no constraints
                let mut right = vec![vec![C::new(F::one(), F::zero()); self.dim()]; len];
                for t in (0..len - 1).rev() {
                    let mut g = self.local(verts[t + 1], None);
                    for (a, r) in g.iter_mut().zip(&right[t + 1]) {
                        *a = *a * *r;
                    }
                    right[t] = transfer(&g, &self.edge_mats(verts[t + 1], verts[t]));
                }
                Env::Path { right, locals: self.split_locals(verts) }
            }
            ComponentKind::Cycle => {
                // right[t][c1](c) closes the cycle back onto first-vertex value c1
                let mut right = vec![self.wrap_matrix(comp); len];
                for t in (0..len - 1).rev() {
                    let l = self.local(verts[t + 1], None);
                    let mats = self.edge_mats(verts[t + 1], verts[t]);
                    right[t] = right[t + 1]
                        .iter()
                        .map(|col| {
                            let g: Vec<C<F>> = col.iter().zip(&l).map(|(a, b)| *a * *b).collect();
                            transfer(&g, &mats)
                        })
                        .collect();
                }
                Env::Cycle { right, locals: self.split_locals(verts) }
            }
        }
    }

    fn split_locals(&self, verts: &[usize]) -> Vec<[Vec<C<F>>; 2]> {
        verts.iter().map(|&v| [self.local(v, Some(false)), self.local(v, Some(true))]).collect()
    }
}

#[derive(Clone, Debug)]
enum Env<F: Real> {
    Isolated([F; 2]),
    Path { right: Vec<Vec<C<F>>>, locals: Vec<[Vec<C<F>>; 2]> },
    Cycle { right: Vec<Vec<Vec<C<F>>>>, locals: Vec<[Vec<C<F>>; 2]> },
}

/// One drawn string with the conditional probability of every bit, in
/// sampling order.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleTrace {
    /// Qubit `q` at index `q`.
    pub bits: Vec<bool>,
    /// `(qubit, Pr[Z_q = bit | earlier bits])` in sampling order.
    pub conditionals: Vec<(usize, f64)>,
}

impl SampleTrace {
    /// Product of the conditionals, i.e. the probability of the whole string.
    pub fn probability(&self) -> f64 {
        self.conditionals.iter().map(|&(_, c)| c).product()
    }

    pub fn bitstring(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// Exact sampler. Components are drawn in ascending lowest-vertex order,
/// vertices in their canonical order.
pub struct Sampler<'a, F: Real> {
    sim: &'a Simulator<F>,
    envs: Vec<Env<F>>,
}

fn draw<F: Real, R: Rng>(rng: &mut R, p0: F, p1: F) -> (bool, F, F) {
    let (p0, p1) = (p0.max(F::zero()), p1.max(F::zero()));
    let total = p0 + p1;
    let one = rng.gen::<f64>() < (p1 / total).to_f64().expect("finite");
    let chosen = if one { p1 } else { p0 };
    (one, chosen, chosen / total)
}

impl<F: Real> Sampler<'_, F> {
    pub fn sample_trace<R: Rng>(&self, rng: &mut R) -> SampleTrace {
        let sim = self.sim;
        let zero = C::new(F::zero(), F::zero());
        let mut bits = vec![false; sim.n];
        let mut conditionals = Vec::with_capacity(sim.n);
        let mut record = |q: usize, b: bool, cond: F| {
            bits[q] = b;
            conditionals.push((q, cond.to_f64().expect("finite")));
        };
        for (comp, env) in sim.components.iter().zip(&self.envs) {
            let verts = &comp.vertices;
            match env {
                Env::Isolated(pr) => {
                    let (b, _, cond) = draw(rng, pr[0], pr[1]);
                    record(verts[0], b, cond);
                }
                Env::Path { right, locals } => {
                    let mut left = vec![C::new(F::one(), F::zero()); sim.dim()];
                    for t in 0..verts.len() {
                        if t > 0 {
                            left = transfer(&left, &sim.edge_mats(verts[t - 1], verts[t]));
                        }
                        let p0 = dot(&left, &locals[t][0], &right[t]).re;
                        let p1 = dot(&left, &locals[t][1], &right[t]).re;
                        let (b, chosen, cond) = draw(rng, p0, p1);
                        record(verts[t], b, cond);
                        // keep the prefix weight at 1 so long chains do not underflow
                        for (a, l) in left.iter_mut().zip(&locals[t][b as usize]) {
                            *a = *a * *l / chosen;
                        }
                    }
                }
                Env::Cycle { right, locals } => {
                    let d = sim.dim();
                    let mut rows: Vec<Vec<C<F>>> = (0..d)
                        .map(|c1| {
                            let mut r = vec![zero; d];
                            r[c1] = C::new(F::one(), F::zero());
                            r
                        })
                        .collect();
                    for t in 0..verts.len() {
                        if t > 0 {
                            let mats = sim.edge_mats(verts[t - 1], verts[t]);
                            for r in rows.iter_mut() {
                                *r = transfer(r, &mats);
                            }
                        }
                        let weight = |b: usize| {
                            rows.iter().zip(&right[t]).fold(F::zero(), |acc, (r, g)| acc + dot(r, &locals[t][b], g).re)
                        };
                        let (b, chosen, cond) = draw(rng, weight(0), weight(1));
                        record(verts[t], b, cond);
                        for r in rows.iter_mut() {
                            for (a, l) in r.iter_mut().zip(&locals[t][b as usize]) {
                                *a = *a * *l / chosen;
                            }
                        }
                    }
                }
            }
        }
        SampleTrace { bits, conditionals }
    }

    /// `count` strings from `ChaCha8Rng::seed_from_u64(seed)`.
    pub fn sample(&self, seed: u64, count: usize) -> Vec<Vec<bool>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.sample_trace(&mut rng).bits).collect()
    }
}

/// Double-precision marginal of a degree-≤2 instance.
pub fn marginal(instance: &QaoaInstance, subset: &[usize], outcome: &[bool]) -> Result<f64, TnError> {
    Simulator::<f64>::new(instance)?.marginal(subset, outcome)
}

/// `count` exact samples, deterministic in `seed`.
pub fn sample(instance: &QaoaInstance, seed: u64, count: usize) -> Result<Vec<Vec<bool>>, TnError> {
    let sim = Simulator::<f64>::new(instance)?;
    Ok(sim.sampler().sample(seed, count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{CostFunction, Term};

    fn graph(n: usize, edges: &[(usize, usize)]) -> InteractionGraph {
        InteractionGraph::from_edges(n, edges.iter().copied())
    }

    fn chain_instance(k: usize, p: usize, cycle: bool) -> QaoaInstance {
        let mut terms: Vec<Term> = (0..k - 1).map(|i| Term::two(i, i + 1, [0.0, 1.0, 1.0, 0.0])).collect();
        if cycle {
            terms.push(Term::two(0, k - 1, [0.0, 1.0, 1.0, 0.0]));
        }
        let cost = CostFunction::real(k, terms).unwrap();
        QaoaInstance::new(cost, vec![0.3; p], vec![0.2; p]).unwrap()
    }

    #[test]
    fn decompose_examples() {
        let comps = decompose(&graph(5, &[])).unwrap();
        assert_eq!(comps.len(), 5);
        assert!(comps.iter().all(|c| c.kind == ComponentKind::Isolated && c.edges.is_empty()));

        let comps = decompose(&graph(3, &[(0, 1), (1, 2)])).unwrap();
        assert_eq!(comps, vec![Component { kind: ComponentKind::Path, vertices: vec![0, 1, 2], edges: vec![(0, 1), (1, 2)] }]);

        let comps = decompose(&graph(3, &[(0, 1), (1, 2), (2, 0)])).unwrap();
        assert_eq!(comps[0].kind, ComponentKind::Cycle);
        assert_eq!(comps[0].edges.len(), 3);

        let err = decompose(&graph(4, &[(0, 1), (0, 2), (0, 3)])).unwrap_err();
        assert_eq!(err, TnError::DegreeTooHigh { vertex: 0, degree: 3 });
    }

    #[test]
    fn canonical_orders() {
        // path 4-2-0-3 starts at endpoint 3
        let comps = decompose(&graph(5, &[(4, 2), (2, 0), (0, 3)])).unwrap();
        assert_eq!(comps[0].vertices, vec![3, 0, 2, 4]);
        assert_eq!(comps[1].vertices, vec![1]);
        // cycle 1-5-3-4-1 starts at 1 heading to 4
        let comps = decompose(&graph(6, &[(1, 5), (5, 3), (3, 4), (4, 1)])).unwrap();
        let cyc = comps.iter().find(|c| c.kind == ComponentKind::Cycle).unwrap();
        assert_eq!(cyc.vertices, vec![1, 4, 3, 5]);
        assert_eq!(cyc.edges.last(), Some(&(5, 1)));
    }

    #[test]
    fn cut_width_formulas() {
        for k in 3..=12 {
            for p in 1..=5 {
                let order: Vec<usize> = (0..k).collect();
                let path = cut_width(&chain_instance(k, p, false), &order).unwrap();
                assert_eq!((path.max_gate_crossings, path.width), (p, p));
                let cyc = cut_width(&chain_instance(k, p, true), &order).unwrap();
                assert_eq!((cyc.max_gate_crossings, cyc.width), (2 * p, 2 * p));
                // the wrap edge crosses every cut
                assert!(cyc.edge_crossings.iter().all(|&d| d == 2));
            }
        }
        assert!(cut_width(&chain_instance(3, 1, false), &[0, 0, 1]).is_err());
    }

    #[test]
    fn transfer_matches_explicit_sum() {
        let inst = chain_instance(2, 2, false);
        let sim = Simulator::<f64>::new(&inst).unwrap();
        let mats = sim.edge_mats(0, 1);
        let v: Vec<C<f64>> = (0..16).map(|i| C::new(i as f64 * 0.1, 1.0 - i as f64 * 0.05)).collect();
        let out = transfer(&v, &mats);
        for cp in 0..16 {
            let mut want = C::new(0.0, 0.0);
            for c in 0..16 {
                let e = mats[0][c & 3][cp & 3] * mats[1][c >> 2][cp >> 2];
                want += v[c] * e;
            }
            assert!((out[cp] - want).norm() < 1e-14);
        }
    }

    #[test]
    fn isolated_vertex_stays_uniform_at_zero_gamma() {
        let cost = CostFunction::real(1, vec![Term::one(0, [0.0, 1.3])]).unwrap();
        for beta in [0.0, 0.4, 1.1, 2.9] {
            let inst = QaoaInstance::new(cost.clone(), vec![0.0], vec![beta]).unwrap();
            let m = marginal(&inst, &[0], &[true]).unwrap();
            assert!((m - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_queries() {
        let mut inst = chain_instance(3, 1, false);
        let sim = Simulator::<f64>::new(&inst).unwrap();
        assert!(sim.marginal(&[0, 0], &[true, true]).is_err());
        assert!(sim.marginal(&[7], &[true]).is_err());
        assert!(sim.marginal(&[0], &[]).is_err());
        inst.post_select.insert(1);
        assert_eq!(Simulator::<f64>::new(&inst).unwrap_err(), TnError::PostSelectionUnsupported);
    }
}
