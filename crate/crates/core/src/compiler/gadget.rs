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

//! Diagonal coupling that teleports a wire through a Hadamard.
//!
//! For a completing gate `F` with first row `r_b = ⟨0|F|b⟩`, the coupling
//! entries are `w_ab = λ(−1)^{ab} / r_b`. A unitary diagonal solution exists
//! exactly when `|r0| = |r1|`, and then `|λ| = |r0|` leaves only the phase
//! of λ free.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::cyclotomic::Cyclotomic;
use crate::ir::{eighth_turns, GateKind};
use crate::oracle::{Amplitude, ExactAmplitude, Lowered};

const FLOAT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GadgetError {
    #[error("first row of F has a zero entry (r0 = {r0}, r1 = {r1})")]
    ZeroMatrixElement { r0: Complex64, r1: Complex64 },
    #[error("|r0| = {abs0} differs from |r1| = {abs1}; no unitary diagonal coupling exists")]
    NoUnitaryW { abs0: f64, abs1: f64 },
    #[error("unknown single-qubit gate {0:?}")]
    UnknownGate(String),
}

/// A 2×2 completing gate, row-major.
#[derive(Clone, Debug, PartialEq)]
pub enum Unitary2 {
    Exact([Cyclotomic; 4]),
    Float([Complex64; 4]),
}

impl Unitary2 {
    /// Exact when the gate's entries lie in Q(ω).
    pub fn from_gate(kind: &GateKind) -> Self {
        if kind.arity() != 1 {
            panic!("completing gate must act on one qubit, got {}", kind.name());
        }
        if let Some(low) = ExactAmplitude::lower(kind) {
            let q = |a: &ExactAmplitude| a.map(|&c| BigRational::from_integer(BigInt::from(c)));
            let m = match low {
                Lowered::Matrix(m, e) => {
                    let s = Cyclotomic::inv_sqrt2_pow(e);
                    m.map(|a| q(&a) * s.clone())
                }
                Lowered::Diag1([d0, d1]) => [q(&d0), Cyclotomic::zero(), Cyclotomic::zero(), q(&d1)],
                Lowered::Diag2(_) => unreachable!("one-qubit gate"),
            };
            return Unitary2::Exact(m);
        }
        let mut c = Circuit1::new();
        c.apply(kind);
        Unitary2::Float(c.m)
    }

    /// `H`, `Htilde` (e^{−iπX/4}), `Tdg`, `T`, `X`, `I`, or `xrot:<angle>`.
    pub fn named(name: &str) -> Result<Self, GadgetError> {
        use std::f64::consts::FRAC_PI_4;
        let kind = match name {
            "H" => GateKind::H,
            "Htilde" => GateKind::XRot(FRAC_PI_4),
            "Tdg" => GateKind::Tdg,
            "T" => GateKind::PhaseDiag1([0, 7]),
            "X" => {
                // X = i·e^{−iπX/2}
                let Unitary2::Exact(m) = Self::from_gate(&GateKind::XRot(2.0 * FRAC_PI_4)) else { unreachable!() };
                return Ok(Unitary2::Exact(m.map(|x| x.mul_root(2))));
            }
            "I" => GateKind::PhaseDiag1([0, 0]),
            other => match other.strip_prefix("xrot:").and_then(|a| a.parse::<f64>().ok()) {
                Some(angle) => GateKind::XRot(angle),
                None => return Err(GadgetError::UnknownGate(other.to_string())),
            },
        };
        Ok(Self::from_gate(&kind))
    }

    pub fn to_c64(&self) -> [Complex64; 4] {
        match self {
            Unitary2::Exact(m) => std::array::from_fn(|i| m[i].to_c64()),
            Unitary2::Float(m) => *m,
        }
    }
}

/// Evaluates a one-qubit gate as a complex matrix.
struct Circuit1 {
    m: [Complex64; 4],
}

impl Circuit1 {
    fn new() -> Self {
        Circuit1 { m: [Complex64::new(1.0, 0.0), Complex64::zero(), Complex64::zero(), Complex64::new(1.0, 0.0)] }
    }

    fn apply(&mut self, kind: &GateKind) {
        match Complex64::lower(kind).expect("float backend lowers every gate") {
            Lowered::Matrix(m, _) => self.m = m,
            Lowered::Diag1([a, b]) => self.m = [a, Complex64::zero(), Complex64::zero(), b],
            Lowered::Diag2(_) => unreachable!(),
        }
    }
}

/// Solved coupling. `w` is indexed `2a + b` with `a` the auxiliary.
#[derive(Clone, Debug, PartialEq)]
pub struct GadgetSpec<S> {
    pub f: [S; 4],
    pub r0: S,
    pub r1: S,
    pub lambda: S,
    pub w: [S; 4],
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gadget {
    Exact(GadgetSpec<Cyclotomic>),
    Float(GadgetSpec<Complex64>),
}

impl Gadget {
    pub fn w_c64(&self) -> [Complex64; 4] {
        match self {
            Gadget::Exact(g) => std::array::from_fn(|i| g.w[i].to_c64()),
            Gadget::Float(g) => g.w,
        }
    }

    pub fn lambda_c64(&self) -> Complex64 {
        match self {
            Gadget::Exact(g) => g.lambda.to_c64(),
            Gadget::Float(g) => g.lambda,
        }
    }

    /// Residues `d` with `w_ab = e^{−iπd/4}`, when every entry is an eighth root of unity.
    pub fn phase_residues(&self) -> Option<[u8; 4]> {
        let Gadget::Exact(g) = self else { return None };
        let mut out = [0u8; 4];
        for (slot, w) in out.iter_mut().zip(&g.w) {
            *slot = (0..8u8).find(|&d| *w == Cyclotomic::root_power(-i64::from(d)))?;
        }
        Some(out)
    }
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| BigRational::new(sn, sd))
}

/// Exact `|r|` for `|r|² = q` when it lies in Q(ω): `s` or `s/√2` with `s` rational.
fn exact_abs(q: &BigRational) -> Option<Cyclotomic> {
    if let Some(s) = rational_sqrt(q) {
        return Some(Cyclotomic::from_coeff(s));
    }
    let two = BigRational::from_integer(BigInt::from(2));
    rational_sqrt(&(q * &two)).map(|s| Cyclotomic::from_coeff(s) * Cyclotomic::inv_sqrt2())
}

fn solve_exact(f: &[Cyclotomic; 4], lambda_phase: Option<f64>) -> Option<Result<GadgetSpec<Cyclotomic>, GadgetError>> {
    let (r0, r1) = (f[0].clone(), f[1].clone());
    if r0.is_zero() || r1.is_zero() {
        return Some(Err(GadgetError::ZeroMatrixElement { r0: r0.to_c64(), r1: r1.to_c64() }));
    }
    let (n0, n1) = (r0.norm_sqr(), r1.norm_sqr());
    if n0 != n1 {
        return Some(Err(GadgetError::NoUnitaryW { abs0: r0.to_c64().norm(), abs1: r1.to_c64().norm() }));
    }
    let phase = match lambda_phase {
        None => 0,
        Some(phi) => eighth_turns(phi)?,
    };
    if !n0.is_rational() {
        return None;
    }
    let q = n0.coeffs()[0].clone();
    let abs = exact_abs(&q)?;
    let lambda = abs.mul_root(phase);
    let inv_q = Cyclotomic::from_coeff(q.recip());
    let w = std::array::from_fn(|i| {
        let (a, b) = (i / 2, i % 2);
        let r = if b == 0 { &r0 } else { &r1 };
        let sign = if a * b == 1 { -Cyclotomic::one() } else { Cyclotomic::one() };
        // λ(−1)^{ab}/r_b = λ(−1)^{ab} conj(r_b)/|r_b|²
        &(&(&lambda * &sign) * &r.conj()) * &inv_q
    });
    Some(Ok(GadgetSpec { f: f.clone(), r0, r1, lambda, w }))
}

fn solve_float(f: [Complex64; 4], lambda_phase: Option<f64>) -> Result<GadgetSpec<Complex64>, GadgetError> {
    let (r0, r1) = (f[0], f[1]);
    if r0.norm() < FLOAT_TOL || r1.norm() < FLOAT_TOL {
        return Err(GadgetError::ZeroMatrixElement { r0, r1 });
    }
    let (abs0, abs1) = (r0.norm(), r1.norm());
    if (abs0 - abs1).abs() > FLOAT_TOL {
        return Err(GadgetError::NoUnitaryW { abs0, abs1 });
    }
    let lambda = Complex64::from_polar(abs0, lambda_phase.unwrap_or(0.0));
    let w = std::array::from_fn(|i| {
        let (a, b) = (i / 2, i % 2);
        let r = if b == 0 { r0 } else { r1 };
        let sign = if a * b == 1 { -1.0 } else { 1.0 };
        lambda * sign / r
    });
    Ok(GadgetSpec { f, r0, r1, lambda, w })
}

/// Solves for the diagonal coupling `W` completed by `f`. λ has modulus
/// `|r0|` and phase `lambda_phase` (default 0, so λ is real positive).
/// The exact path is taken whenever `f`, `|r0|` and the phase all live in Q(ω).
pub fn gadget_solve(f: &Unitary2, lambda_phase: Option<f64>) -> Result<Gadget, GadgetError> {
    if let Unitary2::Exact(m) = f {
        if let Some(res) = solve_exact(m, lambda_phase) {
            return res.map(Gadget::Exact);
        }
    }
    solve_float(f.to_c64(), lambda_phase).map(Gadget::Float)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};

    fn exact(g: Gadget) -> GadgetSpec<Cyclotomic> {
        match g {
            Gadget::Exact(s) => s,
            Gadget::Float(_) => panic!("expected the exact path"),
        }
    }

    #[test]
    fn hadamard_gives_cz() {
        let g = exact(gadget_solve(&Unitary2::named("H").unwrap(), None).unwrap());
        assert_eq!(g.lambda, Cyclotomic::inv_sqrt2());
        let one = Cyclotomic::one();
        assert_eq!(g.w, [one.clone(), one.clone(), one.clone(), -one]);
    }

    #[test]
    fn htilde_gives_quarter_phase_coupling() {
        let g = gadget_solve(&Unitary2::named("Htilde").unwrap(), None).unwrap();
        assert_eq!(g.phase_residues(), Some([0, 6, 0, 2]));
        let g = exact(g);
        let i = Cyclotomic::root_power(2);
        assert_eq!(g.w, [Cyclotomic::one(), i.clone(), Cyclotomic::one(), -i]);
    }

    #[test]
    fn sixth_turn_rotation_has_no_unitary_coupling() {
        let f = Unitary2::from_gate(&GateKind::XRot(FRAC_PI_6));
        assert!(matches!(f, Unitary2::Float(_)));
        assert!(matches!(gadget_solve(&f, None), Err(GadgetError::NoUnitaryW { .. })));
    }

    #[test]
    fn diagonal_completion_is_rejected() {
        let f = Unitary2::named("Tdg").unwrap();
        assert!(matches!(gadget_solve(&f, None), Err(GadgetError::ZeroMatrixElement { .. })));
        assert!(matches!(gadget_solve(&Unitary2::named("X").unwrap(), None), Err(GadgetError::ZeroMatrixElement { .. })));
    }

    #[test]
    fn unknown_names() {
        assert!(Unitary2::named("Q").is_err());
        assert!(matches!(Unitary2::named("xrot:0.25").unwrap(), Unitary2::Float(_)));
    }

    #[test]
    fn exact_solution_satisfies_defining_relation() {
        for name in ["H", "Htilde", "xrot:-0.7853981633974483"] {
            for phase in [None, Some(FRAC_PI_4), Some(-3.0 * FRAC_PI_4)] {
                let g = exact(gadget_solve(&Unitary2::named(name).unwrap(), phase).unwrap());
                for i in 0..4 {
                    let (a, b) = (i / 2, i % 2);
                    assert_eq!(g.w[i].norm_sqr(), Cyclotomic::one(), "|w| = 1");
                    let r = if b == 0 { &g.r0 } else { &g.r1 };
                    let rhs = if a * b == 1 { -g.lambda.clone() } else { g.lambda.clone() };
                    assert_eq!(&g.w[i] * r, rhs);
                }
            }
        }
    }

    #[test]
    fn irrational_phase_falls_back_to_floats() {
        let g = gadget_solve(&Unitary2::named("H").unwrap(), Some(0.3)).unwrap();
        let Gadget::Float(g) = g else { panic!() };
        assert!((g.lambda.arg() - 0.3).abs() < 1e-12);
        for w in g.w {
            assert!((w.norm() - 1.0).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn lambda_phase_is_a_global_phase(phi in -6.0f64..6.0, name in prop::sample::select(vec!["H", "Htilde"])) {
            let base = gadget_solve(&Unitary2::named(name).unwrap(), None).unwrap().w_c64();
            let w = gadget_solve(&Unitary2::named(name).unwrap(), Some(phi)).unwrap().w_c64();
            for i in 1..4 {
                prop_assert!((w[i] / w[0] - base[i] / base[0]).norm() < 1e-12);
            }
            prop_assert!((w[0] / base[0] - Complex64::from_polar(1.0, phi)).norm() < 1e-12);
        }

        #[test]
        fn float_rotations_only_balance_at_odd_quarter_turns(beta in 0.05f64..1.5) {
            let f = Unitary2::Float(Unitary2::from_gate(&GateKind::XRot(beta)).to_c64());
            let balanced = (beta.cos().abs() - beta.sin().abs()).abs() <= FLOAT_TOL;
            prop_assert_eq!(gadget_solve(&f, None).is_ok(), balanced);
        }
    }
}
