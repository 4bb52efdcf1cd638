//! Architecture-aware synthesis of phase polynomials into `{CX, RZ}`
//! circuits that respect a qubit coupling graph.
//!
//! ```
//! use phasesynth::{synthesize, Architecture, PhasePolynomial};
//!
//! let p = PhasePolynomial::parse("qubits 3\n011 pi/4\n111 0.5\n").unwrap();
//! let g = Architecture::line(3);
//! let c = synthesize(&p, &g).unwrap();
//! assert!(c.extract_phase_polynomial().approx_eq(&p, 1e-9));
//! ```

pub mod arch;
pub mod circuit;
mod expr;
pub mod gf2;
pub mod phasepoly;
pub mod steiner_gauss;
pub mod synth;

pub use arch::{ArchError, Architecture, SteinerTree};
pub use circuit::{Circuit, CircuitError, Gate, Violation, VERIFY_TOLERANCE};
pub use gf2::{BitMatrix, BitVector, Gf2Error};
pub use phasepoly::{Angle, ParityMatrix, PhasePolyError, PhasePolynomial};
pub use steiner_gauss::{simulate_linear_action, steiner_gauss, SteinerGaussError};
pub use synth::{
    synthesize, synthesize_with, LowestIndex, ScriptedRows, SynthError, SynthState, Synthesis,
    TieBreak, TraceEvent,
};
