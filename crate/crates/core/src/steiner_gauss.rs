//! Connectivity-constrained synthesis of CX-only circuits.
//!
//! # Orientation
//!
//! The linear action `S(C)` of a CX-only circuit is the product, in gate
//! order, of the elementary matrices `G(c, t) = I + e_c e_tᵀ`. Left
//! multiplication by `G(c, t)` is the row operation "row `c` ^= row `t`",
//! which is how placing `CX(c, t)` updates a parity matrix. `S(C)` is the
//! transpose of the circuit's wire-label matrix.
//!
//! [`steiner_gauss`] reduces `m` to the identity with row operations
//! between adjacent rows and emits `CX(a, b)` for each operation
//! "row `a` ^= row `b`", in elimination order. Since every `G` is an
//! involution, the emitted circuit satisfies `S(C) = m`.

use thiserror::Error;

use crate::arch::{ArchError, Architecture};
use crate::circuit::{Circuit, CircuitError, Gate};
use crate::gf2::{BitMatrix, BitVector};

#[derive(Debug, Error)]
pub enum SteinerGaussError {
    #[error("matrix is {rows}x{cols}, architecture has {qubits} qubits")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        qubits: usize,
    },
    #[error("matrix is singular over GF(2)")]
    Singular,
    #[error(transparent)]
    Arch(#[from] ArchError),
}

/// Linear action `S(C)` of a CX-only circuit; see the module docs.
pub fn simulate_linear_action(c: &Circuit) -> Result<BitMatrix, CircuitError> {
    if let Some(g) = c.gates().iter().find(|g| !g.is_cx()) {
        return Err(CircuitError::NotCxOnly(g.to_string()));
    }
    Ok(c.wire_labels().transpose())
}

/// CX circuit `C` with `S(C) = m` whose gates all act on edges of `g`.
///
/// Rows are eliminated one at a time. Each pivot is the lowest-index
/// vertex that does not disconnect the rows still in play, so the
/// remaining rows always induce a connected subgraph. For a pivot `p`,
/// a Steiner tree over the rows holding a one in column `p` is first
/// filled and then cleared, leaving column `p` equal to `e_p`. Row `p` is
/// then reduced to `e_p` by adding the combination of remaining rows that
/// matches it, accumulated up a second Steiner tree rooted at `p`.
pub fn steiner_gauss(m: &BitMatrix, g: &Architecture) -> Result<Circuit, SteinerGaussError> {
    let n = g.n_qubits();
    if m.num_rows() != n || m.num_cols() != n {
        return Err(SteinerGaussError::DimensionMismatch {
            rows: m.num_rows(),
            cols: m.num_cols(),
            qubits: n,
        });
    }
    if !m.is_invertible() {
        return Err(SteinerGaussError::Singular);
    }
    let mut work = Elimination {
        m: m.clone(),
        circuit: Circuit::new(n),
    };
    let mut remaining = g.all_vertices();
    while !remaining.is_zero() {
        let pivot = g.non_cutting_vertices(&remaining)?[0];
        work.clear_column(g, &remaining, pivot)?;
        work.clear_row(g, &remaining, pivot)?;
        remaining.set(pivot, false);
    }
    debug_assert!(work.m.is_identity());
    Ok(work.circuit)
}

struct Elimination {
    m: BitMatrix,
    circuit: Circuit,
}

impl Elimination {
    /// `row[target] ^= row[source]`, recorded as `CX(target, source)`.
    fn add(&mut self, target: usize, source: usize) {
        self.m.row_add(target, source).expect("rows in range");
        self.circuit
            .push(Gate::cx(target, source))
            .expect("qubits in range");
    }

    fn clear_column(
        &mut self,
        g: &Architecture,
        remaining: &BitVector,
        pivot: usize,
    ) -> Result<(), ArchError> {
        let ones: Vec<usize> = remaining
            .iter_ones()
            .filter(|&r| self.m.get(r, pivot))
            .collect();
        let tree = g.steiner_tree_within(remaining, pivot, &ones)?;
        for &(parent, child) in tree.edges.iter().rev() {
            if !self.m.get(parent, pivot) && self.m.get(child, pivot) {
                self.add(parent, child);
            }
        }
        for &(parent, child) in tree.edges.iter().rev() {
            self.add(child, parent);
        }
        Ok(())
    }

    fn clear_row(
        &mut self,
        g: &Architecture,
        remaining: &BitVector,
        pivot: usize,
    ) -> Result<(), ArchError> {
        let rest: Vec<usize> = remaining.iter_ones().filter(|&r| r != pivot).collect();
        if rest.is_empty() {
            return Ok(());
        }
        // Rows of `rest` combining to the pivot row on the `rest` columns.
        let b_inv = self
            .m
            .select(&rest, &rest)
            .invert()
            .expect("trailing block of an invertible matrix");
        let mut z = BitVector::zeros(rest.len());
        for (i, &c) in rest.iter().enumerate() {
            if self.m.get(pivot, c) {
                z.xor_assign(b_inv.row(i));
            }
        }
        let chosen: Vec<usize> = z.iter_ones().map(|i| rest[i]).collect();
        if chosen.is_empty() {
            return Ok(());
        }
        let tree = g.steiner_tree_within(remaining, pivot, &chosen)?;
        // Fold each Steiner node into its first child, deepest first, so
        // its own row cancels out of the accumulated sum.
        for &(_, s) in tree.edges.iter().rev() {
            if tree.terminals.binary_search(&s).is_err() {
                let child = tree.first_child(s).expect("Steiner nodes are never leaves");
                self.add(child, s);
            }
        }
        for &(parent, child) in tree.edges.iter().rev() {
            self.add(parent, child);
        }
        Ok(())
    }
}
