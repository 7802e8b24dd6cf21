//! Pauli matrices and exact Pauli-string algebra.
//!
//! Products of Pauli strings only ever pick up a power of `i`, so sums of
//! strings with Gaussian-integer coefficients are closed under multiplication
//! and can be compared against zero without rounding.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use crate::matrix::{c, kron_all, ComplexMatrix, I, ONE, ZERO};

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]])
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_rows([[ZERO, -I], [I, ZERO]])
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_rows([[ONE, ZERO], [ZERO, -ONE]])
}

/// `n_x σ_x + n_y σ_y + n_z σ_z`
pub fn bloch_operator(v: [f64; 3]) -> ComplexMatrix {
    ComplexMatrix::from_rows([
        [c(v[2], 0.0), c(v[0], -v[1])],
        [c(v[0], v[1]), c(-v[2], 0.0)],
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// `σ_0 = I, σ_1 = X, σ_2 = Y, σ_3 = Z`
    pub fn from_index(k: usize) -> Pauli {
        Self::ALL[k % 4]
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Pauli::I => ComplexMatrix::identity(2),
            Pauli::X => sigma_x(),
            Pauli::Y => sigma_y(),
            Pauli::Z => sigma_z(),
        }
    }

    /// `self · other = i^k · result`, returned as `(k, result)`.
    pub fn product(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, X) => (3, Z),
            (Y, Z) => (1, X),
            (Z, Y) => (3, X),
            (Z, X) => (1, Y),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }
}

/// Gaussian integer `re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GaussInt {
    pub re: i64,
    pub im: i64,
}

impl GaussInt {
    pub const ONE: GaussInt = GaussInt { re: 1, im: 0 };

    pub fn i_pow(k: u8) -> GaussInt {
        match k % 4 {
            0 => GaussInt { re: 1, im: 0 },
            1 => GaussInt { re: 0, im: 1 },
            2 => GaussInt { re: -1, im: 0 },
            _ => GaussInt { re: 0, im: -1 },
        }
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }
}

impl Add for GaussInt {
    type Output = GaussInt;

    fn add(self, o: GaussInt) -> GaussInt {
        GaussInt {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Mul for GaussInt {
    type Output = GaussInt;

    fn mul(self, o: GaussInt) -> GaussInt {
        GaussInt {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

/// Tensor product of single-qubit Paulis, qubit 0 leftmost.
pub type PauliString = Vec<Pauli>;

fn string_product(a: &[Pauli], b: &[Pauli]) -> (u8, PauliString) {
    assert_eq!(a.len(), b.len(), "Pauli strings of different length");
    let mut k = 0u8;
    let s = a
        .iter()
        .zip(b)
        .map(|(p, q)| {
            let (kk, r) = p.product(*q);
            k = (k + kk) % 4;
            r
        })
        .collect();
    (k, s)
}

/// Linear combination of Pauli strings with Gaussian-integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PauliSum {
    terms: BTreeMap<PauliString, GaussInt>,
}

impl PauliSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(string: PauliString, coeff: GaussInt) -> Self {
        let mut s = Self::zero();
        s.add_term(string, coeff);
        s
    }

    /// A single Pauli acting on `qubit` of an `n`-qubit register.
    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut s = vec![Pauli::I; n];
        s[qubit] = p;
        Self::term(s, GaussInt::ONE)
    }

    pub fn add_term(&mut self, string: PauliString, coeff: GaussInt) {
        let entry = self.terms.entry(string.clone()).or_default();
        *entry = *entry + coeff;
        if entry.is_zero() {
            self.terms.remove(&string);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &GaussInt)> {
        self.terms.iter()
    }

    /// Number of strings with a nonzero coefficient.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `P · self · P` for a Pauli string `P`.
    pub fn conjugated_by(&self, p: &[Pauli]) -> PauliSum {
        let mut out = PauliSum::zero();
        for (s, coeff) in &self.terms {
            let (k1, ps) = string_product(p, s);
            let (k2, psp) = string_product(&ps, p);
            out.add_term(psp, *coeff * GaussInt::i_pow(k1 + k2));
        }
        out
    }

    pub fn sum(&self, other: &PauliSum) -> PauliSum {
        let mut out = self.clone();
        for (s, coeff) in &other.terms {
            out.add_term(s.clone(), *coeff);
        }
        out
    }

    pub fn to_matrix(&self, n: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(1 << n);
        for (s, coeff) in &self.terms {
            let mats: Vec<ComplexMatrix> = s.iter().map(|p| p.matrix()).collect();
            let refs: Vec<&ComplexMatrix> = mats.iter().collect();
            m += &kron_all(&refs).scale(c(coeff.re as f64, coeff.im as f64));
        }
        m
    }
}
