//! Phase polynomials `(f, A)` and their parity-matrix form.
//!
//! A polynomial maps each nonzero parity `y` (a bit string over the
//! qubits) to an angle `f̂(y)`, and carries an invertible basis transform
//! `A` whose row `i` is the parity found on output wire `i`.

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, AddAssign};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::expr::eval_angle;
use crate::gf2::{BitMatrix, BitVector};

/// Angles closer than this to a multiple of 2π count as zero.
pub const ZERO_ANGLE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhasePolyError {
    #[error("parity {0} is all zeros")]
    ZeroParity(String),
    #[error("parity {parity} has length {got}, expected {expected}")]
    LengthMismatch {
        parity: String,
        expected: usize,
        got: usize,
    },
    #[error("duplicate parity column {0}")]
    DuplicateColumn(String),
    #[error("cannot draw {gadgets} distinct nonzero parities on {qubits} qubits")]
    TooManyGadgets { qubits: usize, gadgets: usize },
    #[error("qubit count must be positive")]
    NoQubits,
    #[error("basis transform must be {n}x{n}")]
    TransformShape { n: usize },
    #[error("basis transform is not invertible over GF(2)")]
    SingularTransform,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A rotation angle in radians, normalised to `[0, 2π)`.
#[derive(Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    pub fn new(radians: f64) -> Self {
        let r = radians.rem_euclid(TAU);
        // rem_euclid can round up to TAU for tiny negative inputs.
        Angle(if r >= TAU { 0.0 } else { r })
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 < ZERO_ANGLE_TOLERANCE || TAU - self.0 < ZERO_ANGLE_TOLERANCE
    }

    /// Distance on the circle, in `[0, π]`.
    pub fn distance(self, other: Angle) -> f64 {
        let d = (self.0 - other.0).abs();
        d.min(TAU - d)
    }

    pub fn approx_eq(self, other: Angle, tolerance: f64) -> bool {
        self.distance(other) <= tolerance
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        Angle::new(self.0 + rhs.0)
    }
}

impl AddAssign for Angle {
    fn add_assign(&mut self, rhs: Angle) {
        *self = *self + rhs;
    }
}

impl From<f64> for Angle {
    fn from(radians: f64) -> Self {
        Angle::new(radians)
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Angle({})", self.0)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_radians(self.0))
    }
}

/// Formats a real with 17 significant digits, enough to round-trip any
/// `f64` exactly.
pub fn format_radians(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.16e}")
    }
}

/// Parses an angle expression (`0.5`, `pi/4`, `-3*pi/8`, ...).
pub fn parse_angle(text: &str) -> Result<Angle, String> {
    eval_angle(text).map(Angle::new)
}

#[derive(Clone, PartialEq)]
pub struct PhasePolynomial {
    n: usize,
    terms: BTreeMap<BitVector, Angle>,
    transform: BitMatrix,
}

impl PhasePolynomial {
    /// Builds `(f, I)` from `(parity, angle)` pairs. Repeated parities are
    /// summed modulo 2π and terms whose angle vanishes are dropped.
    pub fn from_terms<I, A>(n: usize, terms: I) -> Result<Self, PhasePolyError>
    where
        I: IntoIterator<Item = (BitVector, A)>,
        A: Into<Angle>,
    {
        if n == 0 {
            return Err(PhasePolyError::NoQubits);
        }
        let mut merged: BTreeMap<BitVector, Angle> = BTreeMap::new();
        for (parity, angle) in terms {
            if parity.len() != n {
                return Err(PhasePolyError::LengthMismatch {
                    parity: parity.to_string(),
                    expected: n,
                    got: parity.len(),
                });
            }
            if parity.is_zero() {
                return Err(PhasePolyError::ZeroParity(parity.to_string()));
            }
            *merged.entry(parity).or_default() += angle.into();
        }
        merged.retain(|_, a| !a.is_zero());
        Ok(PhasePolynomial {
            n,
            terms: merged,
            transform: BitMatrix::identity(n),
        })
    }

    /// Replaces the basis transform. `transform` must be `n x n` and
    /// invertible; row `i` is the parity carried by output wire `i`.
    pub fn with_transform(mut self, transform: BitMatrix) -> Result<Self, PhasePolyError> {
        if transform.num_rows() != self.n || transform.num_cols() != self.n {
            return Err(PhasePolyError::TransformShape { n: self.n });
        }
        if !transform.is_invertible() {
            return Err(PhasePolyError::SingularTransform);
        }
        self.transform = transform;
        Ok(self)
    }

    /// Assembles a polynomial from already-merged parts. Callers guarantee
    /// nonzero parities of length `n` and an invertible transform.
    pub(crate) fn from_parts(
        n: usize,
        terms: BTreeMap<BitVector, Angle>,
        transform: BitMatrix,
    ) -> Self {
        let mut terms = terms;
        terms.retain(|_, a| !a.is_zero());
        PhasePolynomial {
            n,
            terms,
            transform,
        }
    }

    /// `k` distinct nonzero parities drawn uniformly by rejection, each with
    /// an angle uniform in `[0, 2π)`. The same seed always gives the same
    /// polynomial.
    pub fn random(n: usize, k: usize, seed: u64) -> Result<Self, PhasePolyError> {
        if n == 0 {
            return Err(PhasePolyError::NoQubits);
        }
        if n < 64 && k as u128 > (1u128 << n) - 1 {
            return Err(PhasePolyError::TooManyGadgets {
                qubits: n,
                gadgets: k,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = HashSet::with_capacity(k);
        let mut terms = Vec::with_capacity(k);
        while terms.len() < k {
            let bits: Vec<bool> = (0..n).map(|_| rng.gen::<bool>()).collect();
            let parity = BitVector::from_bits(&bits);
            if parity.is_zero() || !seen.insert(parity.clone()) {
                continue;
            }
            let angle = loop {
                let a = Angle::new(rng.gen_range(0.0..TAU));
                if !a.is_zero() {
                    break a;
                }
            };
            terms.push((parity, angle));
        }
        Self::from_terms(n, terms)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (bit string) order.
    pub fn terms(&self) -> impl Iterator<Item = (&BitVector, Angle)> {
        self.terms.iter().map(|(p, a)| (p, *a))
    }

    pub fn coefficient(&self, parity: &BitVector) -> Angle {
        self.terms.get(parity).copied().unwrap_or(Angle::ZERO)
    }

    pub fn transform(&self) -> &BitMatrix {
        &self.transform
    }

    /// Equality up to `tolerance` radians per coefficient; a parity missing
    /// on one side counts as angle zero there.
    pub fn approx_eq(&self, other: &PhasePolynomial, tolerance: f64) -> bool {
        self.first_difference(other, tolerance).is_none()
    }

    /// Describes the first mismatch against `other`, if any.
    pub fn first_difference(&self, other: &PhasePolynomial, tolerance: f64) -> Option<String> {
        if self.n != other.n {
            return Some(format!("qubit count {} vs {}", self.n, other.n));
        }
        if self.transform != other.transform {
            return Some(format!(
                "basis transform differs:\n{}\nvs\n{}",
                self.transform, other.transform
            ));
        }
        for parity in self.terms.keys().chain(other.terms.keys()) {
            let (a, b) = (self.coefficient(parity), other.coefficient(parity));
            if !a.approx_eq(b, tolerance) {
                return Some(format!("coefficient of {parity}: {a} vs {b}"));
            }
        }
        None
    }

    /// Parity matrix with one column per term, columns in canonical order.
    pub fn to_parity_matrix(&self) -> ParityMatrix {
        let columns: Vec<BitVector> = self.terms.keys().cloned().collect();
        ParityMatrix {
            matrix: BitMatrix::from_columns(self.n, &columns).expect("parities have length n"),
            angles: self.terms.values().copied().collect(),
        }
    }

    /// Parses the text format:
    ///
    /// ```text
    /// qubits 3
    /// 011 0.5
    /// 110 3*pi/4
    /// transform
    /// 100
    /// 010
    /// 001
    /// ```
    ///
    /// Blank lines and `#` comments are ignored. The `transform` block is
    /// optional and defaults to the identity.
    pub fn parse(text: &str) -> Result<Self, PhasePolyError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let err = |line: usize, message: String| PhasePolyError::Parse { line, message };

        let (line_no, header) = lines
            .next()
            .ok_or_else(|| err(1, "missing header".into()))?;
        let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["qubits", count] => count
                .parse::<usize>()
                .map_err(|_| err(line_no, format!("bad qubit count {count:?}")))?,
            _ => return Err(err(line_no, "expected `qubits N`".into())),
        };
        if n == 0 {
            return Err(PhasePolyError::NoQubits);
        }

        let mut terms = Vec::new();
        let mut transform_rows: Option<Vec<BitVector>> = None;
        for (line_no, line) in lines {
            if let Some(rows) = transform_rows.as_mut() {
                let row: BitVector = line
                    .parse()
                    .map_err(|_| err(line_no, format!("bad transform row {line:?}")))?;
                if row.len() != n {
                    return Err(err(line_no, format!("transform row must have {n} bits")));
                }
                rows.push(row);
                continue;
            }
            if line == "transform" {
                transform_rows = Some(Vec::with_capacity(n));
                continue;
            }
            let (bits, angle) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| err(line_no, "expected `<bits> <angle>`".into()))?;
            let parity: BitVector = bits
                .parse()
                .map_err(|_| err(line_no, format!("bad parity {bits:?}")))?;
            if parity.len() != n {
                return Err(err(
                    line_no,
                    format!("parity {bits} has {} bits, expected {n}", parity.len()),
                ));
            }
            let angle = parse_angle(angle.trim()).map_err(|m| err(line_no, m))?;
            terms.push((parity, angle));
        }
        let poly = Self::from_terms(n, terms)?;
        match transform_rows {
            None => Ok(poly),
            Some(rows) => {
                if rows.len() != n {
                    return Err(PhasePolyError::TransformShape { n });
                }
                poly.with_transform(BitMatrix::from_rows(rows).expect("rows have length n"))
            }
        }
    }

    /// Renders the text format read by [`PhasePolynomial::parse`]. The
    /// transform block is written only when it is not the identity.
    pub fn render(&self) -> String {
        let mut out = format!("qubits {}\n", self.n);
        for (parity, angle) in &self.terms {
            out.push_str(&format!("{parity} {angle}\n"));
        }
        if !self.transform.is_identity() {
            out.push_str("transform\n");
            for row in self.transform.rows() {
                out.push_str(&format!("{row}\n"));
            }
        }
        out
    }
}

impl fmt::Debug for PhasePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhasePolynomial")
            .field("n", &self.n)
            .field("terms", &self.terms)
            .field("transform", &self.transform)
            .finish()
    }
}

/// Binary matrix with one row per qubit and one column per phase gadget,
/// plus the angle attached to each column.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityMatrix {
    matrix: BitMatrix,
    angles: Vec<Angle>,
}

impl ParityMatrix {
    /// Columns must be unique, nonzero and of length `n`.
    pub fn new(n: usize, columns: Vec<(BitVector, Angle)>) -> Result<Self, PhasePolyError> {
        let mut seen = HashSet::new();
        for (col, _) in &columns {
            if col.len() != n {
                return Err(PhasePolyError::LengthMismatch {
                    parity: col.to_string(),
                    expected: n,
                    got: col.len(),
                });
            }
            if col.is_zero() {
                return Err(PhasePolyError::ZeroParity(col.to_string()));
            }
            if !seen.insert(col.clone()) {
                return Err(PhasePolyError::DuplicateColumn(col.to_string()));
            }
        }
        let (cols, angles): (Vec<BitVector>, Vec<Angle>) = columns.into_iter().unzip();
        Ok(ParityMatrix {
            matrix: BitMatrix::from_columns(n, &cols).expect("columns have length n"),
            angles,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.matrix.num_rows()
    }

    pub fn n_columns(&self) -> usize {
        self.matrix.num_cols()
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut BitMatrix {
        &mut self.matrix
    }

    pub fn column(&self, j: usize) -> BitVector {
        self.matrix.column(j)
    }

    pub fn angle(&self, j: usize) -> Angle {
        self.angles[j]
    }

    pub fn angles(&self) -> &[Angle] {
        &self.angles
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn angle_normalisation() {
        assert_eq!(Angle::new(-PI / 2.0).radians(), 3.0 * PI / 2.0);
        assert!(Angle::new(TAU).is_zero());
        assert!(Angle::new(-1e-18).is_zero());
        assert!((Angle::new(PI) + Angle::new(PI)).is_zero());
        assert!(Angle::new(0.1).approx_eq(Angle::new(0.1 + TAU), 1e-12));
        assert!(Angle::new(1e-13).approx_eq(Angle::new(TAU - 1e-13), 1e-12));
    }

    #[test]
    fn format_round_trips_exactly() {
        for x in [0.1, PI, 5.999999999999, 1e-7, 3.0e-11, TAU - 1e-3] {
            let s = format_radians(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_radians(0.5), "0.50000000000000000");
    }

    #[test]
    fn from_terms_merges_and_drops() {
        let p = PhasePolynomial::from_terms(2, [(bv("01"), PI), (bv("01"), PI)]).unwrap();
        assert!(p.is_empty());
        let q = PhasePolynomial::from_terms(3, [(bv("011"), 0.25), (bv("011"), 0.5)]).unwrap();
        assert_eq!(q.len(), 1);
        assert!(q.coefficient(&bv("011")).approx_eq(Angle::new(0.75), 1e-15));
        assert_eq!(
            PhasePolynomial::from_terms(3, [(bv("000"), 1.0)]),
            Err(PhasePolyError::ZeroParity("000".into()))
        );
        assert!(matches!(
            PhasePolynomial::from_terms(3, [(bv("01"), 1.0)]),
            Err(PhasePolyError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn three_qubit_example_parity_matrix() {
        // f = a1 (x2+x3) + a2 (x1+x2) + a3 (x1+x3) + a4 x3
        let p = PhasePolynomial::from_terms(
            3,
            [
                (bv("011"), 0.1),
                (bv("110"), 0.2),
                (bv("101"), 0.3),
                (bv("001"), 0.4),
            ],
        )
        .unwrap();
        assert_eq!(p.len(), 4);
        let pm = p.to_parity_matrix();
        // Canonical order sorts the columns as 001, 011, 101, 110.
        assert_eq!(
            *pm.matrix(),
            BitMatrix::parse_rows(&["0011", "0101", "1110"]).unwrap()
        );
        assert_eq!(pm.angle(0).radians(), 0.4);
        assert_eq!(pm.angle(3).radians(), 0.2);
    }

    #[test]
    fn appendix_polynomial_parity_matrix() {
        let p = PhasePolynomial::from_terms(
            4,
            [
                (bv("0110"), 1.0),
                (bv("1000"), 2.0),
                (bv("1001"), 3.0),
                (bv("1101"), 4.0),
                (bv("1100"), 5.0),
                (bv("1110"), 6.0),
            ],
        )
        .unwrap();
        let pm = p.to_parity_matrix();
        let cols: Vec<String> = (0..6).map(|j| pm.column(j).to_string()).collect();
        assert_eq!(cols, ["0110", "1000", "1001", "1100", "1101", "1110"]);
        let mut expected = vec!["0110", "1000", "1001", "1101", "1100", "1110"];
        expected.sort();
        assert_eq!(cols, expected);
    }

    #[test]
    fn single_term_matrix() {
        let p = PhasePolynomial::from_terms(2, [(bv("11"), 1.0)]).unwrap();
        assert_eq!(
            *p.to_parity_matrix().matrix(),
            BitMatrix::parse_rows(&["1", "1"]).unwrap()
        );
    }

    #[test]
    fn parse_and_render() {
        let p = PhasePolynomial::parse("qubits 3\n011 0.5\n").unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.coefficient(&bv("011")).radians(), 0.5);

        let q = PhasePolynomial::parse(
            "# comment\nqubits 2\n10 pi/4\n11 -pi/2 # trailing\ntransform\n11\n01\n",
        )
        .unwrap();
        assert_eq!(
            q.transform(),
            &BitMatrix::parse_rows(&["11", "01"]).unwrap()
        );
        assert_eq!(PhasePolynomial::parse(&q.render()).unwrap(), q);

        assert_eq!(
            PhasePolynomial::parse("qubits 2\n11 0.1\ntransform\n11\n11\n"),
            Err(PhasePolyError::SingularTransform)
        );
        assert!(matches!(
            PhasePolynomial::parse("qubits 2\n111 0.1\n"),
            Err(PhasePolyError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            PhasePolynomial::parse("qubits 2\n11 zz\n"),
            Err(PhasePolyError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn random_is_deterministic_and_exhaustive() {
        let a = PhasePolynomial::random(6, 20, 7).unwrap();
        assert_eq!(a, PhasePolynomial::random(6, 20, 7).unwrap());
        assert_ne!(a, PhasePolynomial::random(6, 20, 8).unwrap());
        let full = PhasePolynomial::random(2, 3, 1).unwrap();
        let keys: Vec<String> = full.terms().map(|(p, _)| p.to_string()).collect();
        assert_eq!(keys, ["01", "10", "11"]);
        assert_eq!(
            PhasePolynomial::random(2, 4, 1),
            Err(PhasePolyError::TooManyGadgets {
                qubits: 2,
                gadgets: 4
            })
        );
    }

    #[test]
    fn parity_matrix_rejects_bad_columns() {
        assert!(matches!(
            ParityMatrix::new(
                2,
                vec![(bv("11"), Angle::new(1.0)), (bv("11"), Angle::new(2.0))]
            ),
            Err(PhasePolyError::DuplicateColumn(_))
        ));
        assert!(matches!(
            ParityMatrix::new(2, vec![(bv("00"), Angle::new(1.0))]),
            Err(PhasePolyError::ZeroParity(_))
        ));
    }
}
