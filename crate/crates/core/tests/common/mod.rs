//! Test oracles shared by the integration tests.
//!
//! Nothing here uses the library's own extraction or elimination code:
//! circuits are checked by simulating basis states directly.
#![allow(dead_code)]

use std::f64::consts::TAU;

use phasesynth::{Architecture, BitMatrix, BitVector, Circuit, Gate, PhasePolynomial};
use rand::seq::SliceRandom;
use rand::Rng;

pub const ANGLE_TOL: f64 = 1e-9;

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Runs the circuit on basis input `x`. Returns the output basis state
/// and the accumulated phase, with `RZ(θ)` read as `diag(1, e^{iθ})` (equal
/// to the usual `RZ` up to a global phase).
pub fn path_sum(c: &Circuit, x: &[bool]) -> (Vec<bool>, f64) {
    let mut bits = x.to_vec();
    let mut phase = 0.0;
    for g in c.gates() {
        match *g {
            Gate::Cx { control, target } => bits[target] ^= bits[control],
            Gate::Rz { qubit, angle } => {
                if bits[qubit] {
                    phase += angle.radians();
                }
            }
        }
    }
    (bits, phase)
}

/// Phase `Σ f̂(y)(y·x)` and output `A x` predicted by `p` on input `x`.
pub fn predicted(p: &PhasePolynomial, x: &[bool]) -> (Vec<bool>, f64) {
    let xv = BitVector::from_bits(x);
    let phase = p
        .terms()
        .filter(|(y, _)| y.dot(&xv))
        .map(|(_, a)| a.radians())
        .sum();
    let a = p.transform();
    let out = (0..a.num_rows()).map(|i| a.row(i).dot(&xv)).collect();
    (out, phase)
}

/// Compares the circuit with `p` on one basis input.
pub fn check_input(c: &Circuit, p: &PhasePolynomial, x: &[bool]) -> Result<(), String> {
    let (out, phase) = path_sum(c, x);
    let (want_out, want_phase) = predicted(p, x);
    if out != want_out {
        return Err(format!(
            "input {x:?}: output {out:?}, expected {want_out:?}"
        ));
    }
    if circular_distance(phase, want_phase) > ANGLE_TOL {
        return Err(format!("input {x:?}: phase {phase}, expected {want_phase}"));
    }
    Ok(())
}

fn bits_of(value: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| (value >> i) & 1 == 1).collect()
}

/// Checks every one of the `2^n` basis inputs.
pub fn check_all_inputs(c: &Circuit, p: &PhasePolynomial) -> Result<(), String> {
    let n = c.n_qubits();
    assert!(n <= 16, "exhaustive check on {n} qubits");
    (0..1u64 << n).try_for_each(|v| check_input(c, p, &bits_of(v, n)))
}

/// Checks `samples` random basis inputs plus all unit vectors, which
/// together pin down `A` and expose any wrong coefficient with high
/// probability.
pub fn check_sampled_inputs(
    c: &Circuit,
    p: &PhasePolynomial,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<(), String> {
    let n = c.n_qubits();
    for i in 0..n {
        let mut x = vec![false; n];
        x[i] = true;
        check_input(c, p, &x)?;
    }
    for _ in 0..samples {
        let x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        check_input(c, p, &x)?;
    }
    Ok(())
}

/// First CX whose endpoints are not adjacent in `g`.
pub fn connectivity_violation(c: &Circuit, g: &Architecture) -> Option<(usize, usize)> {
    let edges: std::collections::HashSet<(usize, usize)> = g.edges().iter().copied().collect();
    c.gates().iter().find_map(|gate| match *gate {
        Gate::Cx { control, target } => {
            let e = (control.min(target), control.max(target));
            (!edges.contains(&e)).then_some((control, target))
        }
        Gate::Rz { .. } => None,
    })
}

/// Linear action of a CX circuit computed gate by gate as a product of
/// elementary matrices `I + e_c e_tᵀ`, multiplied on the right in order.
pub fn product_of_elementaries(c: &Circuit) -> Vec<Vec<bool>> {
    let n = c.n_qubits();
    let mut m: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
    for g in c.gates() {
        if let Gate::Cx { control, target } = *g {
            // M (I + e_c e_tᵀ): column t gains column c.
            for row in m.iter_mut() {
                row[target] ^= row[control];
            }
        }
    }
    m
}

pub fn to_rows(m: &BitMatrix) -> Vec<Vec<bool>> {
    (0..m.num_rows()).map(|i| m.row(i).to_bits()).collect()
}

pub fn random_circuit(n: usize, len: usize, rng: &mut impl Rng) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..len {
        if n >= 2 && rng.gen_bool(0.5) {
            let control = rng.gen_range(0..n);
            let mut target = rng.gen_range(0..n - 1);
            if target >= control {
                target += 1;
            }
            c.push(Gate::cx(control, target)).unwrap();
        } else {
            c.push(Gate::rz(rng.gen_range(0..n), rng.gen_range(0.0..TAU)))
                .unwrap();
        }
    }
    c
}

/// Uniform invertible matrix by rejection sampling.
pub fn random_invertible(n: usize, rng: &mut impl Rng) -> BitMatrix {
    loop {
        let rows: Vec<BitVector> = (0..n)
            .map(|_| BitVector::from_bits(&(0..n).map(|_| rng.gen()).collect::<Vec<bool>>()))
            .collect();
        let m = BitMatrix::from_rows(rows).unwrap();
        if m.is_invertible() {
            return m;
        }
    }
}

/// Random invertible basis transform built from a permutation and
/// random row additions.
pub fn random_transform(n: usize, rng: &mut impl Rng) -> BitMatrix {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let rows = perm.iter().map(|&i| BitVector::unit(n, i)).collect();
    let mut m = BitMatrix::from_rows(rows).unwrap();
    if n >= 2 {
        for _ in 0..3 * n {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                m.row_add(a, b).unwrap();
            }
        }
    }
    m
}

/// Architecture of the given family with `n` qubits, or `None` if the
/// family has no member of that size.
pub fn family(name: &str, n: usize) -> Option<Architecture> {
    match name {
        "line" => Some(Architecture::line(n)),
        "cycle" => Some(Architecture::cycle(n)),
        "grid" => {
            let rows = (1..=n)
                .filter(|r| n.is_multiple_of(*r) && r * r <= n)
                .max()?;
            Some(Architecture::grid(rows, n / rows))
        }
        "complete" => Some(Architecture::complete(n)),
        "aspen" => (n == 16).then(|| Architecture::from_catalog("aspen_16").unwrap()),
        "singapore" => (n == 20).then(|| Architecture::from_catalog("singapore_20").unwrap()),
        _ => None,
    }
}

pub const FAMILIES: [&str; 6] = ["line", "cycle", "grid", "complete", "aspen", "singapore"];

/// Every fixed-size catalog device plus a few generic shapes.
pub fn catalog_sample() -> Vec<Architecture> {
    [
        "line_6",
        "cycle_7",
        "grid_3x4",
        "square_16",
        "complete_5",
        "aspen_16",
        "singapore_20",
    ]
    .iter()
    .map(|name| Architecture::from_catalog(name).unwrap())
    .collect()
}

/// Connectedness of an edge list by BFS over an adjacency matrix,
/// skipping the vertex `removed`.
pub fn connected_without(n: usize, edges: &[(usize, usize)], removed: Option<usize>) -> bool {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    let alive: Vec<usize> = (0..n).filter(|&v| Some(v) != removed).collect();
    let Some(&start) = alive.first() else {
        return true;
    };
    let mut seen = vec![false; n];
    let mut queue = vec![start];
    seen[start] = true;
    while let Some(v) = queue.pop() {
        for u in 0..n {
            if adj[v][u] && !seen[u] && Some(u) != removed {
                seen[u] = true;
                queue.push(u);
            }
        }
    }
    alive.iter().all(|&v| seen[v])
}

/// Vertices whose removal leaves the graph connected, by brute force.
pub fn brute_force_non_cutting(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    (0..n)
        .filter(|&v| connected_without(n, edges, Some(v)))
        .collect()
}
