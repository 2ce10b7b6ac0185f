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


//! `qdich` command-line front end.
//!
//! Exit codes: 0 on success, 1 for bad input or usage, 2 when an internal
//! invariant fails. JSON goes to stdout, diagnostics to stderr.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use qdich_core::compiler::{compile_with, gadget_solve, CompileError, Endpoint, Gadget, Unitary2};
use qdich_core::ir::{
    circuit_from_json, circuit_to_json, instance_from_json, instance_to_json, interaction_graph, qaoa_to_circuit_local,
    to_json_string, Circuit,
};
use qdich_core::oracle::{
    distribution_error, post_selected_distribution, Amplitude, Distribution, ExactAmplitude, MultiplicativeError,
    OracleError, Weight,
};
use qdich_core::tnsim::{cut_width, decompose, Simulator, TnError};
use qdich_core::Cyclotomic;

#[derive(Parser)]
#[command(name = "qdich", version, about = "Post-selected QAOA compiler and degree-2 QAOA simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

#[derive(Subcommand)]
enum Command {
    /// Compile an H/Tdg/CZ circuit into a post-selected QAOA (or IQP) instance.
    Compile {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Use H completions and CZ couplings and write the IQP circuit.
        #[arg(long)]
        iqp: bool,
        /// Shift the cost so it is monotone and maximal at all ones.
        #[arg(long)]
        monotone: bool,
    },
    /// Marginal probability of a subset of qubits in a degree-2 instance.
    Marginal {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated qubit indices.
        #[arg(long, default_value = "")]
        subset: String,
        /// One bit per listed qubit, e.g. 101.
        #[arg(long, default_value = "")]
        outcome: String,
    },
    /// Exact samples from a degree-2 instance, one bitstring per line with qubit 0 leftmost.
    Sample {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Post-selected output distribution of a circuit by statevector simulation.
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = BackendArg::Exact)]
        backend: BackendArg,
    },
    /// Solve for the diagonal coupling completed by a single-qubit gate.
    Gadget {
        /// H, Htilde, Tdg, T, X, I, xrot:<radians>, or a JSON array of four
        /// row-major entries, each [re, im] or an exact string like "1/2 + 0/1*w + ...".
        #[arg(long = "F")]
        f: String,
        /// Phase of lambda in radians.
        #[arg(long = "lambda-phase", allow_hyphen_values = true)]
        lambda_phase: Option<f64>,
    },
    /// Compile a circuit and compare its distribution with the source's.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = BackendArg::Exact)]
        backend: BackendArg,
        #[arg(long)]
        iqp: bool,
        #[arg(long)]
        monotone: bool,
    },
    /// Components, degrees and cut profile of an instance.
    GraphInfo {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

/// Error carrying its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl fmt::Debug for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { code: 1, error: e.into() }
    }
}

fn internal(error: anyhow::Error) -> Failure {
    Failure { code: 2, error }
}

fn compile_failure(e: CompileError) -> Failure {
    match e {
        CompileError::InvariantViolated(_) | CompileError::NonDiagonalResidue { .. } | CompileError::MissingMixer(_) => {
            internal(e.into())
        }
        _ => e.into(),
    }
}

fn oracle_failure(e: OracleError) -> Failure {
    match e {
        OracleError::ExactOverflow => internal(e.into()),
        _ => e.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    Ok(fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    Ok(fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?)
}

fn read_circuit(path: &Path) -> Result<Circuit, Failure> {
    Ok(circuit_from_json(&read(path)?).with_context(|| format!("{} is not a circuit", path.display()))?)
}

fn read_instance(path: &Path) -> Result<qdich_core::ir::QaoaInstance, Failure> {
    Ok(instance_from_json(&read(path)?).with_context(|| format!("{} is not an instance", path.display()))?)
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(anyhow::Error::from(e).context("cannot write to stdout").into()),
        _ => Ok(()),
    }
}

fn print(value: &Value) -> Result<(), Failure> {
    emit(&(to_json_string(value) + "\n"))
}

fn parse_subset(subset: &str, outcome: &str) -> Result<(Vec<usize>, Vec<bool>), Failure> {
    let qubits = subset
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().with_context(|| format!("bad qubit index {s:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    let bits = outcome
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(anyhow!("outcome must be a string of 0s and 1s, got {outcome:?}")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if qubits.len() != bits.len() {
        return Err(anyhow!("{} qubits but {} outcome bits", qubits.len(), bits.len()).into());
    }
    Ok((qubits, bits))
}

fn cyclotomic_json(x: &Cyclotomic) -> Value {
    let c = x.to_c64();
    json!({ "exact": x.to_string(), "re": c.re, "im": c.im })
}

fn complex_json(c: Complex64) -> Value {
    json!({ "re": c.re, "im": c.im })
}

fn parse_unitary(spec: &str) -> Result<Unitary2, Failure> {
    if !spec.trim_start().starts_with('[') {
        return Ok(Unitary2::named(spec)?);
    }
    let entries: Vec<Value> = serde_json::from_str(spec).context("matrix must be a JSON array")?;
    if entries.len() != 4 {
        return Err(anyhow!("matrix needs 4 row-major entries, got {}", entries.len()).into());
    }
    if entries.iter().all(Value::is_string) {
        let m = entries
            .iter()
            .map(|e| e.as_str().unwrap().parse::<Cyclotomic>().map_err(|err| anyhow!("{err}")))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(Unitary2::Exact(m.try_into().expect("four entries")));
    }
    let m = entries
        .iter()
        .map(|e| match serde_json::from_value::<[f64; 2]>(e.clone()) {
            Ok([re, im]) => Ok(Complex64::new(re, im)),
            Err(_) => Err(anyhow!("matrix entries must be [re, im] pairs or exact strings, got {e}")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Unitary2::Float(m.try_into().expect("four entries")))
}

fn gadget_json(g: &Gadget) -> Value {
    let residues = g.phase_residues().map_or(Value::Null, |r| json!(r));
    match g {
        Gadget::Exact(s) => json!({
            "path": "exact",
            "F": s.f.iter().map(cyclotomic_json).collect::<Vec<_>>(),
            "r0": cyclotomic_json(&s.r0),
            "r1": cyclotomic_json(&s.r1),
            "lambda": cyclotomic_json(&s.lambda),
            "W": s.w.iter().map(cyclotomic_json).collect::<Vec<_>>(),
            "W_residues": residues,
        }),
        Gadget::Float(s) => json!({
            "path": "float",
            "F": s.f.iter().copied().map(complex_json).collect::<Vec<_>>(),
            "r0": complex_json(s.r0),
            "r1": complex_json(s.r1),
            "lambda": complex_json(s.lambda),
            "W": s.w.iter().copied().map(complex_json).collect::<Vec<_>>(),
            "W_residues": residues,
        }),
    }
}

fn error_json(e: MultiplicativeError) -> Value {
    match e {
        MultiplicativeError::Finite(c) => json!(c),
        MultiplicativeError::Infinite => json!("infinite"),
    }
}

fn compare<A: Amplitude>(source: &Circuit, compiled: &Circuit) -> Result<(Distribution<A::Weight>, Distribution<A::Weight>), Failure> {
    let s = post_selected_distribution::<A>(source).map_err(oracle_failure)?;
    let c = post_selected_distribution::<A>(compiled).map_err(oracle_failure)?;
    Ok((s, c))
}

fn verify_report<W: Weight>(s: &Distribution<W>, c: &Distribution<W>) -> (f64, MultiplicativeError) {
    let dev = s.probabilities().iter().zip(c.probabilities()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    (dev, distribution_error(s, c))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compile { input, out, iqp, monotone } => {
            let circuit = read_circuit(&input)?;
            let endpoint = if iqp { Endpoint::Hadamard } else { Endpoint::Mixer };
            let comp = compile_with(&circuit, endpoint, monotone).map_err(compile_failure)?;
            let text = if iqp { circuit_to_json(&comp.iqp().to_circuit()) } else { instance_to_json(&comp.qaoa()) };
            write(&out, &text)?;
            let report = serde_json::to_value(comp.report()).map_err(|e| internal(e.into()))?;
            let mut sidecar = out.clone().into_os_string();
            sidecar.push(".report.json");
            write(Path::new(&sidecar), &to_json_string(&report))?;
            print(&report)?;
        }
        Command::Marginal { input, subset, outcome } => {
            let inst = read_instance(&input)?;
            let (qubits, bits) = parse_subset(&subset, &outcome)?;
            let sim = Simulator::<f64>::new(&inst)?;
            let p = sim.marginal(&qubits, &bits)?;
            print(&json!({ "subset": qubits, "outcome": outcome, "probability": p }))?;
        }
        Command::Sample { input, count, seed, out } => {
            let inst = read_instance(&input)?;
            let sim = Simulator::<f64>::new(&inst)?;
            let mut text = String::new();
            for bits in sim.sampler().sample(seed, count) {
                text.extend(bits.iter().map(|&b| if b { '1' } else { '0' }));
                text.push('\n');
            }
            match out {
                Some(path) => write(&path, &text)?,
                None => emit(&text)?,
            }
        }
        Command::Oracle { input, backend } => {
            let circuit = read_circuit(&input)?;
            let value = match backend {
                BackendArg::Exact => post_selected_distribution::<ExactAmplitude>(&circuit).map_err(oracle_failure)?.to_json(),
                BackendArg::Float => post_selected_distribution::<Complex64>(&circuit).map_err(oracle_failure)?.to_json(),
            };
            print(&value)?;
        }
        Command::Gadget { f, lambda_phase } => {
            let unitary = parse_unitary(&f)?;
            let g = gadget_solve(&unitary, lambda_phase)?;
            print(&gadget_json(&g))?;
        }
        Command::Verify { input, backend, iqp, monotone } => {
            let circuit = read_circuit(&input)?;
            let endpoint = if iqp { Endpoint::Hadamard } else { Endpoint::Mixer };
            let comp = compile_with(&circuit, endpoint, monotone).map_err(compile_failure)?;
            let compiled = if iqp { comp.iqp().to_local_circuit() } else { qaoa_to_circuit_local(&comp.qaoa()) };
            let (dev, err) = match backend {
                BackendArg::Exact => {
                    let (s, c) = compare::<ExactAmplitude>(&circuit, &compiled)?;
                    verify_report(&s, &c)
                }
                BackendArg::Float => {
                    let (s, c) = compare::<Complex64>(&circuit, &compiled)?;
                    verify_report(&s, &c)
                }
            };
            print(&json!({
                "backend": format!("{backend:?}").to_lowercase(),
                "endpoint": endpoint,
                "source_qubits": circuit.n_qubits,
                "compiled_qubits": compiled.n_qubits,
                "post_selected": compiled.post_select.len(),
                "max_deviation": dev,
                "multiplicative_error": error_json(err),
            }))?;
            if backend == BackendArg::Exact && !err.is_exactly_one() {
                return Err(internal(anyhow!("compiled distribution differs from the source (c = {err})")));
            }
        }
        Command::GraphInfo { input } => {
            let inst = read_instance(&input)?;
            let graph = interaction_graph(&inst.cost);
            let (components, ordering) = match decompose(&graph) {
                Ok(comps) => {
                    let order: Vec<usize> = comps.iter().flat_map(|c| c.vertices.iter().copied()).collect();
                    (serde_json::to_value(&comps).map_err(|e| internal(e.into()))?, order)
                }
                Err(TnError::DegreeTooHigh { vertex, degree }) => {
                    (json!({ "error": format!("vertex {vertex} has degree {degree}") }), (0..inst.n).collect())
                }
                Err(e) => return Err(internal(e.into())),
            };
            let profile = cut_width(&inst, &ordering)?;
            print(&json!({
                "n": inst.n,
                "p": inst.p,
                "edges": graph.edges.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
                "max_degree": graph.max_degree,
                "degree_histogram": graph.degree_histogram(),
                "components": components,
                "cut_profile": profile,
            }))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(std::env::args_os()) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
