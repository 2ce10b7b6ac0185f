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

//! JSON circuit and instance files (`"format": "qdich-v1"`).

use std::collections::{BTreeMap, BTreeSet};
use std::io;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use super::{Circuit, CostFunction, Gate, GateKind, IrError, Prep, QaoaInstance, Term};

pub const FORMAT_TAG: &str = "qdich-v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub kind: String,
    pub qubits: Vec<usize>,
    #[serde(default)]
    pub params: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitFile {
    pub format: String,
    pub n: usize,
    #[serde(default)]
    pub prep: Vec<String>,
    pub gates: Vec<GateRecord>,
    #[serde(default)]
    pub post_select: Vec<usize>,
    /// Gate position at which each post-selected qubit is projected;
    /// defaults to the end of the circuit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post_select_at: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_map: Option<BTreeMap<String, usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub support: Vec<usize>,
    pub table: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub format: String,
    pub n: usize,
    pub p: usize,
    pub terms: Vec<TermRecord>,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    #[serde(default)]
    pub post_select: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_map: Option<BTreeMap<String, usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integer_valued: Option<bool>,
}

fn bad(msg: impl Into<String>) -> IrError {
    IrError::Format(msg.into())
}

fn check_format(tag: &str) -> Result<(), IrError> {
    if tag == FORMAT_TAG {
        Ok(())
    } else {
        Err(bad(format!("unsupported format tag {tag:?}, expected {FORMAT_TAG:?}")))
    }
}

fn parse_output_map(map: &BTreeMap<String, usize>) -> Result<BTreeMap<usize, usize>, IrError> {
    map.iter()
        .map(|(k, &v)| {
            k.parse::<usize>().map(|w| (w, v)).map_err(|_| bad(format!("output_map key {k:?} is not an index")))
        })
        .collect()
}

fn emit_output_map(map: &BTreeMap<usize, usize>) -> BTreeMap<String, usize> {
    map.iter().map(|(w, q)| (w.to_string(), *q)).collect()
}

fn param_u8s<const N: usize>(params: &[Value]) -> Result<[u8; N], IrError> {
    if params.len() != N {
        return Err(bad(format!("expected {N} phase residues, got {}", params.len())));
    }
    let mut out = [0u8; N];
    for (slot, v) in out.iter_mut().zip(params) {
        *slot = v
            .as_u64()
            .filter(|&d| d < 8)
            .ok_or_else(|| bad(format!("phase residue {v} is not an integer in 0..8")))? as u8;
    }
    Ok(out)
}

fn param_complex<const N: usize>(params: &[Value]) -> Result<[Complex64; N], IrError> {
    if params.len() != N {
        return Err(bad(format!("expected {N} complex entries, got {}", params.len())));
    }
    let mut out = [Complex64::new(0.0, 0.0); N];
    for (slot, v) in out.iter_mut().zip(params) {
        let pair = v.as_array().filter(|a| a.len() == 2);
        let re_im = pair.and_then(|a| Some((a[0].as_f64()?, a[1].as_f64()?)));
        let (re, im) = re_im.ok_or_else(|| bad(format!("complex entry {v} must be [re, im]")))?;
        *slot = Complex64::new(re, im);
    }
    Ok(out)
}

impl TryFrom<&GateRecord> for Gate {
    type Error = IrError;

    fn try_from(rec: &GateRecord) -> Result<Self, IrError> {
        let p = &rec.params;
        let kind = match rec.kind.as_str() {
            "H" => GateKind::H,
            "Tdg" => GateKind::Tdg,
            "CZ" => GateKind::CZ,
            "PhaseDiag1" => GateKind::PhaseDiag1(param_u8s(p)?),
            "PhaseDiag2" => GateKind::PhaseDiag2(param_u8s(p)?),
            "XRot" => {
                let angle = p.first().and_then(Value::as_f64).filter(|_| p.len() == 1);
                GateKind::XRot(angle.ok_or_else(|| bad("XRot takes one angle parameter"))?)
            }
            "GeneralDiag1" => GateKind::GeneralDiag1(param_complex(p)?),
            "GeneralDiag2" => GateKind::GeneralDiag2(param_complex(p)?),
            other => return Err(bad(format!("unknown gate kind {other:?}"))),
        };
        Gate::new(kind, rec.qubits.clone())
    }
}

impl From<&Gate> for GateRecord {
    fn from(g: &Gate) -> Self {
        let complex = |z: &Complex64| Value::from(vec![z.re, z.im]);
        let params = match &g.kind {
            GateKind::H | GateKind::Tdg | GateKind::CZ => vec![],
            GateKind::PhaseDiag1(d) => d.iter().map(|&x| Value::from(x)).collect(),
            GateKind::PhaseDiag2(d) => d.iter().map(|&x| Value::from(x)).collect(),
            GateKind::XRot(a) => vec![Value::from(*a)],
            GateKind::GeneralDiag1(e) => e.iter().map(complex).collect(),
            GateKind::GeneralDiag2(e) => e.iter().map(complex).collect(),
        };
        GateRecord { kind: g.kind.name().to_string(), qubits: g.qubits.clone(), params }
    }
}

impl TryFrom<&CircuitFile> for Circuit {
    type Error = IrError;

    fn try_from(file: &CircuitFile) -> Result<Self, IrError> {
        check_format(&file.format)?;
        let prep = if file.prep.is_empty() {
            vec![Prep::Zero; file.n]
        } else {
            file.prep
                .iter()
                .map(|s| match s.as_str() {
                    "zero" => Ok(Prep::Zero),
                    "plus" => Ok(Prep::Plus),
                    other => Err(bad(format!("unknown prep {other:?}"))),
                })
                .collect::<Result<Vec<_>, _>>()?
        };
        if prep.len() != file.n {
            return Err(bad(format!("prep lists {} qubits, n = {}", prep.len(), file.n)));
        }
        let gates = file.gates.iter().map(Gate::try_from).collect::<Result<Vec<_>, _>>()?;
        let at = match &file.post_select_at {
            Some(at) if at.len() != file.post_select.len() => {
                return Err(bad("post_select_at must parallel post_select"));
            }
            Some(at) => at.clone(),
            None => vec![gates.len(); file.post_select.len()],
        };
        let post_select: BTreeMap<usize, usize> = file.post_select.iter().copied().zip(at).collect();
        let output_map = match &file.output_map {
            Some(m) => parse_output_map(m)?,
            None => (0..file.n).filter(|q| !post_select.contains_key(q)).map(|q| (q, q)).collect(),
        };
        Ok(Circuit { n_qubits: file.n, prep, gates, post_select, output_map })
    }
}

impl From<&Circuit> for CircuitFile {
    fn from(c: &Circuit) -> Self {
        let end = c.gates.len();
        let at: Vec<usize> = c.post_select.values().copied().collect();
        CircuitFile {
            format: FORMAT_TAG.to_string(),
            n: c.n_qubits,
            prep: c
                .prep
                .iter()
                .map(|p| match p {
                    Prep::Zero => "zero".to_string(),
                    Prep::Plus => "plus".to_string(),
                })
                .collect(),
            gates: c.gates.iter().map(GateRecord::from).collect(),
            post_select: c.post_select.keys().copied().collect(),
            post_select_at: at.iter().any(|&a| a != end).then_some(at),
            output_map: Some(emit_output_map(&c.output_map)),
        }
    }
}

impl TryFrom<&InstanceFile> for QaoaInstance {
    type Error = IrError;

    fn try_from(file: &InstanceFile) -> Result<Self, IrError> {
        check_format(&file.format)?;
        if file.gammas.len() != file.p || file.betas.len() != file.p {
            return Err(IrError::ParameterCount { p: file.p, gammas: file.gammas.len(), betas: file.betas.len() });
        }
        let terms = file
            .terms
            .iter()
            .map(|t| Term::new(t.support.clone(), t.table.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let integer = file
            .integer_valued
            .unwrap_or_else(|| terms.iter().all(|t| t.table.iter().all(|x| x.fract() == 0.0)));
        let cost = CostFunction::new(file.n, terms, integer)?;
        let mut inst = QaoaInstance::new(cost, file.gammas.clone(), file.betas.clone())?;
        inst.post_select = file.post_select.iter().copied().collect::<BTreeSet<_>>();
        if let Some(&q) = inst.post_select.iter().find(|&&q| q >= file.n) {
            return Err(bad(format!("post-selected qubit {q} is out of range")));
        }
        inst.output_map = match &file.output_map {
            Some(m) => parse_output_map(m)?,
            None => (0..file.n).filter(|q| !inst.post_select.contains(q)).map(|q| (q, q)).collect(),
        };
        Ok(inst)
    }
}

impl From<&QaoaInstance> for InstanceFile {
    fn from(inst: &QaoaInstance) -> Self {
        InstanceFile {
            format: FORMAT_TAG.to_string(),
            n: inst.n,
            p: inst.p,
            terms: inst
                .cost
                .terms
                .iter()
                .map(|t| TermRecord { support: t.support.clone(), table: t.table.clone() })
                .collect(),
            gammas: inst.gammas.clone(),
            betas: inst.betas.clone(),
            post_select: inst.post_select.iter().copied().collect(),
            output_map: Some(emit_output_map(&inst.output_map)),
            integer_valued: Some(inst.cost.integer_valued),
        }
    }
}

pub fn circuit_from_json(text: &str) -> Result<Circuit, IrError> {
    let file: CircuitFile = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    Circuit::try_from(&file)
}

pub fn circuit_to_json(circuit: &Circuit) -> String {
    to_json_string(&CircuitFile::from(circuit))
}

pub fn instance_from_json(text: &str) -> Result<QaoaInstance, IrError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    QaoaInstance::try_from(&file)
}

pub fn instance_to_json(instance: &QaoaInstance) -> String {
    to_json_string(&InstanceFile::from(instance))
}

/// Pretty JSON with every float printed to 17 significant digits.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SignificantDigits::default());
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[derive(Default)]
struct SignificantDigits<'a> {
    pretty: PrettyFormatter<'a>,
}

impl Formatter for SignificantDigits<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(w)
    }
}
