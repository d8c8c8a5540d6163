use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};
use crate::qcore::{HermitianOperator, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// `(x, z)` bits with `Y ∝ XZ`.
    pub(crate) fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    /// `self · other = i^k · result`.
    pub fn mul_with_phase(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    pub fn operator(self) -> HermitianOperator {
        match self {
            Pauli::I => HermitianOperator::identity(2),
            Pauli::X => HermitianOperator::pauli_x(),
            Pauli::Y => HermitianOperator::pauli_y(),
            Pauli::Z => HermitianOperator::pauli_z(),
        }
    }

    /// The +1 eigenvector.
    pub fn plus_eigenvector(self) -> [C64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Pauli::I | Pauli::Z => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            Pauli::X => [C64::new(h, 0.0), C64::new(h, 0.0)],
            Pauli::Y => [C64::new(h, 0.0), C64::new(0.0, h)],
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// `i^phase · P_1 ⊗ … ⊗ P_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    phase: u8,
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(sign: i8, letters: Vec<Pauli>) -> Self {
        Self {
            phase: if sign < 0 { 2 } else { 0 },
            letters,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(1, vec![Pauli::I; n])
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn n(&self) -> usize {
        self.letters.len()
    }

    /// `±1`, or an error if the phase is imaginary.
    pub fn sign(&self) -> Result<i8> {
        match self.phase {
            0 => Ok(1),
            2 => Ok(-1),
            p => Err(Error::Numerical(format!("Pauli product {self} has imaginary phase i^{p}"))),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&l| l == Pauli::I)
    }

    pub fn negated(&self) -> Self {
        Self {
            phase: (self.phase + 2) % 4,
            letters: self.letters.clone(),
        }
    }

    /// Letterwise product with accumulated phase.
    pub fn try_mul(&self, rhs: &PauliString) -> Result<PauliString> {
        if self.n() != rhs.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                actual: rhs.n(),
            });
        }
        let mut phase = self.phase + rhs.phase;
        let letters = self
            .letters
            .iter()
            .zip(&rhs.letters)
            .map(|(&a, &b)| {
                let (k, p) = a.mul_with_phase(b);
                phase += k;
                p
            })
            .collect();
        Ok(Self {
            phase: phase % 4,
            letters,
        })
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// Applies the string to a qubit amplitude vector (party 0 most
    /// significant).
    pub fn apply(&self, dims: &[usize], amps: &[C64]) -> Vec<C64> {
        let n = self.n();
        assert!(dims.len() == n && dims.iter().all(|&d| d == 2), "Pauli strings act on qubits");
        assert_eq!(amps.len(), 1 << n);
        let (mut xmask, mut zmask, mut ys) = (0usize, 0usize, 0u8);
        for (p, &l) in self.letters.iter().enumerate() {
            let (x, z) = l.bits();
            let bit = 1 << (n - 1 - p);
            if x {
                xmask |= bit;
            }
            if z {
                zmask |= bit;
            }
            if x && z {
                ys += 1;
            }
        }
        let base = C64::i().powu(((self.phase + ys) % 4) as u32);
        let mut out = vec![C64::new(0.0, 0.0); amps.len()];
        for (b, &a) in amps.iter().enumerate() {
            let s = if (b & zmask).count_ones() % 2 == 1 { -base } else { base };
            out[b ^ xmask] = s * a;
        }
        out
    }

    /// Letters of `self` compactly as `±XZZI`.
    pub fn compact(&self) -> String {
        let sign = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        let letters: String = self.letters.iter().map(|l| l.as_char()).collect();
        format!("{sign}{letters}")
    }
}

impl fmt::Display for PauliString {
    /// `-X₁X₂X₃`-style with identities omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SUB: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
        f.write_str(match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        })?;
        if self.is_identity() {
            return f.write_str("I");
        }
        for (p, &l) in self.letters.iter().enumerate() {
            if l != Pauli::I {
                write!(f, "{}", l.as_char())?;
                for d in (p + 1).to_string().chars() {
                    write!(f, "{}", SUB[d.to_digit(10).unwrap() as usize])?;
                }
            }
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts `-XZZI`, `+YIY`, `XXX`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (sign, body) = match s.chars().next() {
            Some('-') | Some('−') => (-1, s.trim_start_matches(['-', '−'])),
            Some('+') => (1, &s[1..]),
            _ => (1, s),
        };
        let letters = body
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                'I' | '1' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::Parse(format!("bad Pauli letter {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::Parse("empty Pauli string".into()));
        }
        Ok(Self::new(sign, letters))
    }
}

impl Mul for &PauliString {
    type Output = PauliString;

    fn mul(self, rhs: &PauliString) -> PauliString {
        self.try_mul(rhs).expect("Pauli strings of equal length")
    }
}

/// `g_i = X_i ⊗_{j∈N(i)} Z_j` for 1-based `i`.
pub fn generator(graph: &Graph, i: usize) -> Result<PauliString> {
    let n = graph.n();
    if i == 0 || i > n {
        return Err(Error::InvalidParameter(format!("vertex {i} outside 1..={n}")));
    }
    let mut letters = vec![Pauli::I; n];
    letters[i - 1] = Pauli::X;
    for j in graph.neighbors(i) {
        letters[j - 1] = Pauli::Z;
    }
    Ok(PauliString::new(1, letters))
}

/// Product of generators over the vertex set `mask` (bit `i-1` for vertex
/// `i`), taken in increasing vertex order.
pub fn stabilizer_element(graph: &Graph, mask: u64) -> Result<PauliString> {
    let n = graph.n();
    if n < 64 && mask >> n != 0 {
        return Err(Error::InvalidParameter(format!("vertex set {mask:#b} outside 1..={n}")));
    }
    let mut acc = PauliString::identity(n);
    for i in 1..=n {
        if mask >> (i - 1) & 1 == 1 {
            acc = acc.try_mul(&generator(graph, i)?)?;
        }
    }
    acc.sign()?;
    Ok(acc)
}

/// Bitmask of 1-based vertices.
pub fn vertex_mask(vertices: &[usize]) -> u64 {
    vertices.iter().fold(0, |m, &v| m | 1 << (v - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_table_matches_matrices() {
        use Pauli::*;
        for a in [I, X, Y, Z] {
            for b in [I, X, Y, Z] {
                let (k, c) = a.mul_with_phase(b);
                let lhs = a.operator().matrix() * b.operator().matrix();
                let rhs = c.operator().matrix() * C64::i().powu(k as u32);
                assert!((lhs - rhs).norm() < 1e-15, "{a:?}{b:?}");
            }
        }
    }

    #[test]
    fn ring_generators() {
        let g = Graph::ring(3).unwrap();
        assert_eq!(generator(&g, 1).unwrap().compact(), "+XZZ");
        assert_eq!(stabilizer_element(&g, 0b111).unwrap().compact(), "-XXX");
        assert_eq!(stabilizer_element(&g, 0).unwrap(), PauliString::identity(3));
        let g4 = Graph::ring(4).unwrap();
        assert_eq!(stabilizer_element(&g4, vertex_mask(&[1, 4])).unwrap().compact(), "+YZZY");
    }

    #[test]
    fn complete_and_isolated() {
        let g = Graph::complete(4).unwrap();
        assert_eq!(generator(&g, 2).unwrap().compact(), "+ZXZZ");
        let lone = Graph::new(3, &[(1, 2)]).unwrap();
        assert_eq!(generator(&lone, 3).unwrap().compact(), "+IIX");
        assert!(generator(&lone, 4).is_err());
    }

    #[test]
    fn display_and_parse() {
        let s: PauliString = "-XIZ".parse().unwrap();
        assert_eq!(s.to_string(), "-X₁Z₃");
        assert_eq!(s.sign().unwrap(), -1);
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn apply_matches_dense_operator() {
        let s: PauliString = "-YXZ".parse().unwrap();
        let dense = crate::qcore::tensor_product(&s.letters().iter().map(|l| l.operator()).collect::<Vec<_>>());
        let v: Vec<C64> = (0..8).map(|k| C64::new(k as f64, 1.0 - k as f64)).collect();
        let out = s.apply(&[2, 2, 2], &v);
        let expect = dense.matrix() * nalgebra::DVector::from_vec(v) * C64::new(-1.0, 0.0);
        for (a, b) in out.iter().zip(expect.iter()) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
