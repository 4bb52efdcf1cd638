//! Architecture-aware synthesis of phase polynomials.
//!
//! The parity matrix `P` (qubits × gadgets) is reduced by recursing on
//! non-cutting vertices of the coupling graph. Placing `CX(c, t)` replaces
//! row `c` with `row c ^ row t`; a column with a single one at row `q` is
//! emitted as `RZ` on `q`. Once every gadget is placed, the remaining
//! basis change is synthesised with [`steiner_gauss`].
//!
//! The recursion runs on an explicit work stack, so its depth is bounded
//! only by memory.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::arch::{ArchError, Architecture};
use crate::circuit::{Circuit, Gate};
use crate::gf2::{BitMatrix, BitVector};
use crate::phasepoly::{ParityMatrix, PhasePolynomial};
use crate::steiner_gauss::{simulate_linear_action, steiner_gauss, SteinerGaussError};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("polynomial has {poly} qubits but the architecture has {arch}")]
    QubitMismatch { poly: usize, arch: usize },
    #[error("CX({control},{target}) is not an edge of the architecture")]
    ConnectivityViolation { control: usize, target: usize },
    #[error("tie-break: {0}")]
    TieBreak(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Arch(#[from] ArchError),
    #[error(transparent)]
    SteinerGauss(#[from] SteinerGaussError),
}

/// Chooses among equally good candidates. Only called with two or more
/// candidates, given in increasing order.
pub trait TieBreak {
    fn pick_row(&mut self, tied: &[usize]) -> Result<usize, SynthError>;

    fn pick_neighbour(&mut self, tied: &[usize]) -> Result<usize, SynthError> {
        Ok(tied[0])
    }
}

/// Always the lowest qubit index.
#[derive(Debug, Clone, Copy, Default)]
pub struct LowestIndex;

impl TieBreak for LowestIndex {
    fn pick_row(&mut self, tied: &[usize]) -> Result<usize, SynthError> {
        Ok(tied[0])
    }
}

/// Consumes a fixed list of row picks, one per tied row decision, then
/// falls back to the lowest index. Neighbour ties use the lowest index.
#[derive(Debug, Clone, Default)]
pub struct ScriptedRows {
    picks: VecDeque<usize>,
}

impl ScriptedRows {
    pub fn new(picks: impl IntoIterator<Item = usize>) -> Self {
        ScriptedRows {
            picks: picks.into_iter().collect(),
        }
    }

    pub fn remaining(&self) -> usize {
        self.picks.len()
    }
}

impl TieBreak for ScriptedRows {
    fn pick_row(&mut self, tied: &[usize]) -> Result<usize, SynthError> {
        match self.picks.pop_front() {
            None => Ok(tied[0]),
            Some(pick) if tied.contains(&pick) => Ok(pick),
            Some(pick) => Err(SynthError::TieBreak(format!(
                "scripted row {pick} is not among the tied rows {tied:?}"
            ))),
        }
    }
}

/// One step of a traced run, with the live part of `P` afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    pub action: String,
    pub matrix: String,
}

/// Everything produced by one synthesis run.
#[derive(Debug, Clone)]
pub struct Synthesis {
    /// Gadget phase followed by post-processing.
    pub circuit: Circuit,
    /// Gates placed while reducing `P`, including preprocessing.
    pub gadget_circuit: Circuit,
    /// CX circuit realising the leftover basis change.
    pub post_circuit: Circuit,
    /// Linear action of the gadget phase's CX gates.
    pub p_prime: BitMatrix,
    pub trace: Vec<TraceEvent>,
}

/// Synthesises `p` on `g` with lowest-index tie-breaking.
pub fn synthesize(p: &PhasePolynomial, g: &Architecture) -> Result<Circuit, SynthError> {
    Ok(synthesize_with(p, g, &mut LowestIndex, false)?.circuit)
}

/// Full synthesis with a custom tie-break and optional tracing.
pub fn synthesize_with(
    p: &PhasePolynomial,
    g: &Architecture,
    tie_break: &mut dyn TieBreak,
    trace: bool,
) -> Result<Synthesis, SynthError> {
    if p.n_qubits() != g.n_qubits() {
        return Err(SynthError::QubitMismatch {
            poly: p.n_qubits(),
            arch: g.n_qubits(),
        });
    }
    let mut state = SynthState::new(g, p.to_parity_matrix())?;
    if trace {
        state.enable_trace();
    }
    let cols = state.all_columns();
    let cols = state.reduce_columns(&cols);
    state.record("preprocessing".into());
    state.run_recursion(cols, tie_break)?;
    let (gadget_circuit, trace) = state.finish()?;

    let p_prime = simulate_linear_action(&cx_only(&gadget_circuit)).expect("CX-only");
    let target = p_prime
        .invert()
        .expect("CX circuits are invertible")
        .multiply(&p.transform().transpose())
        .expect("square matrices of equal size");
    let post_circuit = steiner_gauss(&target, g)?;
    let mut circuit = gadget_circuit.clone();
    circuit.append(&post_circuit).expect("same qubit count");
    Ok(Synthesis {
        circuit,
        gadget_circuit,
        post_circuit,
        p_prime,
        trace,
    })
}

fn cx_only(c: &Circuit) -> Circuit {
    Circuit::from_gates(c.n_qubits(), c.gates().iter().copied().filter(Gate::is_cx))
        .expect("gates already validated")
}

enum Frame {
    Base {
        cols: BitVector,
        qubits: BitVector,
    },
    Ones {
        cols: BitVector,
        qubits: BitVector,
        chosen: usize,
    },
}

/// Live state of a synthesis run. Column sets are masks over the columns
/// of the parity matrix.
pub struct SynthState<'a> {
    g: &'a Architecture,
    p: ParityMatrix,
    weights: Vec<usize>,
    live: BitVector,
    circuit: Circuit,
    trace: Option<Vec<TraceEvent>>,
}

impl<'a> SynthState<'a> {
    pub fn new(g: &'a Architecture, p: ParityMatrix) -> Result<Self, SynthError> {
        if p.n_qubits() != g.n_qubits() {
            return Err(SynthError::QubitMismatch {
                poly: p.n_qubits(),
                arch: g.n_qubits(),
            });
        }
        let k = p.n_columns();
        let weights = (0..k).map(|j| p.column(j).count_ones()).collect();
        Ok(SynthState {
            g,
            weights,
            live: BitVector::ones(k),
            circuit: Circuit::new(p.n_qubits()),
            p,
            trace: None,
        })
    }

    pub fn enable_trace(&mut self) {
        self.trace = Some(Vec::new());
        self.record("initial".into());
    }

    pub fn parity_matrix(&self) -> &ParityMatrix {
        &self.p
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn all_columns(&self) -> BitVector {
        BitVector::ones(self.p.n_columns())
    }

    /// Columns not yet emitted as an RZ.
    pub fn live_columns(&self) -> &BitVector {
        &self.live
    }

    /// Emits an RZ for every column of `cols` with a single one and
    /// returns the columns that remain.
    pub fn reduce_columns(&mut self, cols: &BitVector) -> BitVector {
        let mut remaining = cols.clone();
        for j in cols.iter_ones() {
            if self.weights[j] != 1 {
                continue;
            }
            let q = (0..self.p.n_qubits())
                .find(|&q| self.p.matrix().get(q, j))
                .expect("weight-one column has a one");
            let angle = self.p.angle(j);
            self.circuit
                .push(Gate::rz(q, angle))
                .expect("qubit in range");
            remaining.set(j, false);
            self.live.set(j, false);
            self.record(format!("RZ(a{}) on x{}", j + 1, q + 1));
        }
        remaining
    }

    /// Appends `CX(control, target)` and adds row `target` into row
    /// `control`.
    pub fn place_cx(&mut self, control: usize, target: usize) -> Result<(), SynthError> {
        if !self.g.is_adjacent(control, target) {
            return Err(SynthError::ConnectivityViolation { control, target });
        }
        let m = self.p.matrix();
        let (row_c, row_t) = (m.row(control), m.row(target));
        for j in row_t.iter_ones() {
            if row_c.get(j) {
                self.weights[j] -= 1;
            } else {
                self.weights[j] += 1;
            }
        }
        self.p
            .matrix_mut()
            .row_add(control, target)
            .expect("adjacent qubits are distinct and in range");
        self.circuit
            .push(Gate::cx(control, target))
            .expect("qubits in range");
        self.record(format!("CX(x{}, x{})", control + 1, target + 1));
        Ok(())
    }

    /// Splits `cols` by the value of `row`: `(zeros, ones)`.
    pub fn split_cols_on_row(&self, cols: &BitVector, row: usize) -> (BitVector, BitVector) {
        let r = self.p.matrix().row(row);
        (cols.and_not(r), cols.and(r))
    }

    fn row_ones(&self, row: usize, cols: &BitVector) -> usize {
        self.p.matrix().row(row).count_ones_and(cols)
    }

    /// Runs the base step on `cols` over every qubit, then all steps it
    /// spawns.
    pub fn run_recursion(
        &mut self,
        cols: BitVector,
        tie_break: &mut dyn TieBreak,
    ) -> Result<(), SynthError> {
        let n = self.p.n_qubits();
        let k = self.p.n_columns();
        let budget = n.saturating_mul(k).saturating_mul(n + 1).saturating_add(1);
        let mut frames = 0usize;
        let mut stack = vec![Frame::Base {
            cols,
            qubits: self.g.all_vertices(),
        }];
        while let Some(frame) = stack.pop() {
            frames += 1;
            if frames > budget {
                return Err(SynthError::Internal(format!(
                    "recursion exceeded {budget} steps"
                )));
            }
            match frame {
                Frame::Base { cols, qubits } => {
                    self.base_step(cols, qubits, tie_break, &mut stack)?
                }
                Frame::Ones {
                    cols,
                    qubits,
                    chosen,
                } => self.ones_step(cols, qubits, chosen, tie_break, &mut stack)?,
            }
        }
        Ok(())
    }

    fn base_step(
        &mut self,
        cols: BitVector,
        qubits: BitVector,
        tie_break: &mut dyn TieBreak,
        stack: &mut Vec<Frame>,
    ) -> Result<(), SynthError> {
        if cols.is_zero() || qubits.is_zero() {
            return Ok(());
        }
        let total = cols.count_ones();
        let mut best = 0;
        let mut tied = Vec::new();
        for r in self.g.non_cutting_vertices(&qubits)? {
            let ones = self.row_ones(r, &cols);
            let score = ones.max(total - ones);
            if score > best {
                best = score;
                tied.clear();
            }
            if score == best {
                tied.push(r);
            }
        }
        let chosen = if tied.len() > 1 {
            tie_break.pick_row(&tied)?
        } else {
            tied[0]
        };
        let (cols0, cols1) = self.split_cols_on_row(&cols, chosen);
        if let Some(j) = cols1.iter_ones().find(|&j| self.weights[j] < 2) {
            return Err(SynthError::Internal(format!(
                "column {j} is trivial after splitting on x{}",
                chosen + 1
            )));
        }
        self.record_split(chosen, &cols0, &cols1);
        let mut rest = qubits.clone();
        rest.set(chosen, false);
        stack.push(Frame::Ones {
            cols: cols1,
            qubits,
            chosen,
        });
        stack.push(Frame::Base {
            cols: cols0,
            qubits: rest,
        });
        Ok(())
    }

    fn ones_step(
        &mut self,
        cols: BitVector,
        qubits: BitVector,
        chosen: usize,
        tie_break: &mut dyn TieBreak,
        stack: &mut Vec<Frame>,
    ) -> Result<(), SynthError> {
        if cols.is_zero() {
            return Ok(());
        }
        let neighbours = self.g.neighbours_within(chosen, &qubits);
        if neighbours.is_empty() {
            return Err(SynthError::Internal(format!(
                "x{} has no neighbour in its qubit set",
                chosen + 1
            )));
        }
        let counts: Vec<usize> = neighbours
            .iter()
            .map(|&v| self.row_ones(v, &cols))
            .collect();
        let best = *counts.iter().max().expect("nonempty");
        let tied: Vec<usize> = neighbours
            .iter()
            .zip(&counts)
            .filter(|(_, &c)| c == best)
            .map(|(&v, _)| v)
            .collect();
        let neighbour = if tied.len() > 1 {
            tie_break.pick_neighbour(&tied)?
        } else {
            tied[0]
        };
        if !tied.contains(&neighbour) {
            return Err(SynthError::TieBreak(format!(
                "neighbour {neighbour} is not among {tied:?}"
            )));
        }

        let size = cols.count_ones();
        let cols = if best > 0 {
            self.place_cx(chosen, neighbour)?;
            self.reduce_columns(&cols)
        } else {
            self.place_cx(neighbour, chosen)?;
            self.place_cx(chosen, neighbour)?;
            cols
        };
        let (cols0, cols1) = self.split_cols_on_row(&cols, chosen);
        if cols1.count_ones() >= size {
            return Err(SynthError::Internal(format!(
                "no progress on row x{}",
                chosen + 1
            )));
        }
        self.record_split(chosen, &cols0, &cols1);
        let mut rest = qubits.clone();
        rest.set(chosen, false);
        stack.push(Frame::Ones {
            cols: cols1,
            qubits,
            chosen,
        });
        stack.push(Frame::Base {
            cols: cols0,
            qubits: rest,
        });
        Ok(())
    }

    fn finish(self) -> Result<(Circuit, Vec<TraceEvent>), SynthError> {
        if let Some(j) = self.live.first_one() {
            return Err(SynthError::Internal(format!("column {j} was never placed")));
        }
        Ok((self.circuit, self.trace.unwrap_or_default()))
    }

    pub fn into_circuit(self) -> Circuit {
        self.circuit
    }

    fn record(&mut self, action: String) {
        if self.trace.is_some() {
            let matrix = self.render_live();
            if let Some(trace) = self.trace.as_mut() {
                trace.push(TraceEvent { action, matrix });
            }
        }
    }

    fn record_split(&mut self, row: usize, cols0: &BitVector, cols1: &BitVector) {
        if self.trace.is_some() {
            let names = |c: &BitVector| {
                c.iter_ones()
                    .map(|j| format!("a{}", j + 1))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            self.record(format!(
                "split on x{}: zeros {{{}}}, ones {{{}}}",
                row + 1,
                names(cols0),
                names(cols1)
            ));
        }
    }

    /// Live columns of `P`, one labelled row per qubit.
    fn render_live(&self) -> String {
        let cols: Vec<usize> = self.live.iter_ones().collect();
        let mut out = String::from("   ");
        for j in &cols {
            let _ = write!(out, " {:>3}", format!("a{}", j + 1));
        }
        for q in 0..self.p.n_qubits() {
            let _ = write!(out, "\n{:<3}", format!("x{}", q + 1));
            for &j in &cols {
                let _ = write!(out, " {:>3}", u8::from(self.p.matrix().get(q, j)));
            }
        }
        out
    }
}
