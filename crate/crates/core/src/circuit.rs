//! Circuits over `{CX, RZ}`: parity extraction, CX metrics and an
//! OpenQASM 2.0 subset.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::arch::Architecture;
use crate::expr::eval_angle;
use crate::gf2::{BitMatrix, BitVector};
use crate::phasepoly::{Angle, PhasePolynomial};

/// Default per-coefficient tolerance, in radians, for [`Circuit::verify`].
pub const VERIFY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("qubit {qubit} out of range for a {n}-qubit circuit")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("CX control and target are both qubit {0}")]
    SameQubit(usize),
    #[error("expected a CX-only circuit, found {0}")]
    NotCxOnly(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Cx { control: usize, target: usize },
    Rz { qubit: usize, angle: Angle },
}

impl Gate {
    pub fn cx(control: usize, target: usize) -> Self {
        Gate::Cx { control, target }
    }

    pub fn rz(qubit: usize, angle: impl Into<Angle>) -> Self {
        Gate::Rz {
            qubit,
            angle: angle.into(),
        }
    }

    pub fn is_cx(&self) -> bool {
        matches!(self, Gate::Cx { .. })
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Cx { control, target } => write!(f, "cx q[{control}],q[{target}];"),
            Gate::Rz { qubit, angle } => write!(f, "rz({angle}) q[{qubit}];"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit {
            n,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(
        n: usize,
        gates: impl IntoIterator<Item = Gate>,
    ) -> Result<Self, CircuitError> {
        let mut c = Circuit::new(n);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        let check = |q: usize| {
            if q >= self.n {
                Err(CircuitError::QubitOutOfRange {
                    qubit: q,
                    n: self.n,
                })
            } else {
                Ok(())
            }
        };
        match gate {
            Gate::Cx { control, target } => {
                check(control)?;
                check(target)?;
                if control == target {
                    return Err(CircuitError::SameQubit(control));
                }
            }
            Gate::Rz { qubit, .. } => check(qubit)?,
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends every gate of `other`, which must not use more qubits.
    pub fn append(&mut self, other: &Circuit) -> Result<(), CircuitError> {
        for &g in &other.gates {
            self.push(g)?;
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn cx_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_cx()).count()
    }

    /// Critical path length counting CX gates only.
    pub fn cx_depth(&self) -> usize {
        let mut level = vec![0usize; self.n];
        let mut depth = 0;
        for g in &self.gates {
            if let Gate::Cx { control, target } = *g {
                let l = level[control].max(level[target]) + 1;
                level[control] = l;
                level[target] = l;
                depth = depth.max(l);
            }
        }
        depth
    }

    /// Wire labels after the circuit: row `i` is the parity of the inputs
    /// carried by wire `i`. `CX(c, t)` adds the label of `c` into `t`.
    pub fn wire_labels(&self) -> BitMatrix {
        let mut labels = BitMatrix::identity(self.n);
        for g in &self.gates {
            if let Gate::Cx { control, target } = *g {
                labels.row_add(target, control).expect("validated gate");
            }
        }
        labels
    }

    /// Recovers `(f, A)` by labelling each wire segment with its parity.
    /// Every RZ adds its angle to the coefficient of its wire's current
    /// label; `A` is the final label matrix.
    pub fn extract_phase_polynomial(&self) -> PhasePolynomial {
        let mut labels: Vec<BitVector> = (0..self.n).map(|i| BitVector::unit(self.n, i)).collect();
        let mut terms: BTreeMap<BitVector, Angle> = BTreeMap::new();
        for g in &self.gates {
            match *g {
                Gate::Cx { control, target } => {
                    let src = labels[control].clone();
                    labels[target].xor_assign(&src);
                }
                Gate::Rz { qubit, angle } => {
                    *terms.entry(labels[qubit].clone()).or_default() += angle;
                }
            }
        }
        let transform = BitMatrix::from_rows(labels).expect("labels have length n");
        PhasePolynomial::from_parts(self.n, terms, transform)
    }

    pub fn to_qasm(&self) -> String {
        let mut out = format!(
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[{}];\n",
            self.n
        );
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the subset written by [`Circuit::to_qasm`]: one `qreg`,
    /// `cx`, `rz` and `u1` (read as `rz`). `OPENQASM`, `include` and
    /// `//` comments are skipped.
    pub fn from_qasm(text: &str) -> Result<Self, CircuitError> {
        let mut circuit: Option<Circuit> = None;
        let mut reg = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |message: String| CircuitError::Parse {
                line: line_no,
                message,
            };
            let line = raw.split("//").next().unwrap_or("");
            for stmt in line.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                if stmt.starts_with("OPENQASM") || stmt.starts_with("include") {
                    continue;
                }
                let (head, args) = split_head(stmt);
                if head == "qreg" {
                    if circuit.is_some() {
                        return Err(err("only one qreg is supported".into()));
                    }
                    let (name, size) = parse_ref(args).map_err(err)?;
                    reg = name.to_string();
                    circuit = Some(Circuit::new(size));
                    continue;
                }
                let c = circuit
                    .as_mut()
                    .ok_or_else(|| err("gate before qreg declaration".into()))?;
                let qubit = |operand: &str| -> Result<usize, String> {
                    let (name, index) = parse_ref(operand)?;
                    if name != reg {
                        return Err(format!("unknown register {name:?}"));
                    }
                    Ok(index)
                };
                let gate = match head {
                    "cx" | "CX" => {
                        let ops: Vec<&str> = args.split(',').map(str::trim).collect();
                        if ops.len() != 2 {
                            return Err(err("cx takes two operands".into()));
                        }
                        Gate::cx(qubit(ops[0]).map_err(err)?, qubit(ops[1]).map_err(err)?)
                    }
                    _ if head.starts_with("rz(") || head.starts_with("u1(") => {
                        let expr = head[3..]
                            .strip_suffix(')')
                            .ok_or_else(|| err("missing ')' after angle".into()))?;
                        let angle = eval_angle(expr).map_err(err)?;
                        Gate::rz(qubit(args.trim()).map_err(err)?, angle)
                    }
                    _ => return Err(err(format!("unsupported gate {stmt:?}"))),
                };
                c.push(gate).map_err(|e| err(e.to_string()))?;
            }
        }
        circuit.ok_or(CircuitError::Parse {
            line: text.lines().count().max(1),
            message: "missing qreg declaration".into(),
        })
    }
}

/// First property a circuit fails when checked against a polynomial and
/// an architecture.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("qubit count: circuit has {circuit}, polynomial {poly}, architecture {arch}")]
    QubitCount {
        circuit: usize,
        poly: usize,
        arch: usize,
    },
    #[error("connectivity: gate {index} is CX({control},{target}) on a non-edge")]
    Connectivity {
        index: usize,
        control: usize,
        target: usize,
    },
    #[error("phase polynomial: {0}")]
    Polynomial(String),
}

impl Circuit {
    /// Checks qubit counts, that every CX lies on an edge of `g`, and that
    /// the extracted polynomial equals `p` within `tolerance` radians.
    pub fn verify(
        &self,
        p: &PhasePolynomial,
        g: &Architecture,
        tolerance: f64,
    ) -> Result<(), Violation> {
        if self.n != p.n_qubits() || self.n != g.n_qubits() {
            return Err(Violation::QubitCount {
                circuit: self.n,
                poly: p.n_qubits(),
                arch: g.n_qubits(),
            });
        }
        for (index, gate) in self.gates.iter().enumerate() {
            if let Gate::Cx { control, target } = *gate {
                if !g.is_adjacent(control, target) {
                    return Err(Violation::Connectivity {
                        index,
                        control,
                        target,
                    });
                }
            }
        }
        match self
            .extract_phase_polynomial()
            .first_difference(p, tolerance)
        {
            Some(diff) => Err(Violation::Polynomial(diff)),
            None => Ok(()),
        }
    }
}

/// Splits a statement into its head (gate name with any parameter list)
/// and operands.
fn split_head(stmt: &str) -> (&str, &str) {
    let end = match stmt.find('(') {
        Some(open) if !stmt[..open].contains(char::is_whitespace) => stmt[open..]
            .find(')')
            .map(|c| open + c + 1)
            .unwrap_or(stmt.len()),
        _ => stmt.find(char::is_whitespace).unwrap_or(stmt.len()),
    };
    (stmt[..end].trim(), stmt[end..].trim())
}

/// Parses `name[index]`.
fn parse_ref(s: &str) -> Result<(&str, usize), String> {
    let s = s.trim();
    let open = s
        .find('[')
        .ok_or_else(|| format!("expected name[index], got {s:?}"))?;
    let index = s[open + 1..]
        .strip_suffix(']')
        .and_then(|i| i.trim().parse().ok())
        .ok_or_else(|| format!("bad index in {s:?}"))?;
    Ok((s[..open].trim(), index))
}
