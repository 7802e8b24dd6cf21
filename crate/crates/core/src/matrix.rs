//! Dense complex matrices and state vectors for Hilbert spaces of a few qubits.
//!
//! Storage is row-major and always square. The largest space in this crate is
//! two system qubits plus two environment qubits (dimension 16), so everything
//! here is written for clarity rather than asymptotic speed.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
pub use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::{DEGENERACY_GAP, HERMITIAN_TOL, IMAG_TOL, NORM_TOL};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    dim: usize,
    /// Row-major `[re, im]` pairs.
    entries: Vec<[f64; 2]>,
}

impl TryFrom<RawMatrix> for ComplexMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        let data = raw.entries.iter().map(|[re, im]| c(*re, *im)).collect();
        ComplexMatrix::from_vec(raw.dim, data)
    }
}

impl From<ComplexMatrix> for RawMatrix {
    fn from(m: ComplexMatrix) -> Self {
        RawMatrix {
            dim: m.dim,
            entries: m.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "{} entries cannot form a {dim}x{dim} matrix",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from rows; panics on ragged input, meant for literals.
    pub fn from_rows<const N: usize>(rows: [[Complex64; N]; N]) -> Self {
        Self {
            dim: N,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, z) in entries.iter().enumerate() {
            m[(i, i)] = *z;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `(A + A†) / 2`
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_re(0.5)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Frobenius norm of `H - H^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() < tol
    }

    /// Frobenius norm of `U^dagger U - I`.
    pub fn unitarity_defect(&self) -> f64 {
        (&(&self.adjoint() * self) - &Self::identity(self.dim)).frobenius_norm()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() < tol
    }

    /// `u · self · u^dagger`
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        &(u * self) * &u.adjoint()
    }

    pub fn commutator(&self, other: &ComplexMatrix) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        assert_eq!(self.dim, v.dim(), "operator/state dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * n..(i + 1) * n];
            *o = row.iter().zip(v.as_slice()).map(|(a, b)| a * b).sum();
        }
        StateVector(out)
    }

    /// `<u|self|v>`
    pub fn sandwich(&self, u: &StateVector, v: &StateVector) -> Complex64 {
        u.inner(&self.apply(v))
    }

    /// Eigen-decomposition of a Hermitian matrix.
    ///
    /// Eigenvalues come back ascending; eigenvectors are the columns of the
    /// returned matrix. When two eigenvalues are closer than the degeneracy gap
    /// the eigenvector set is re-orthonormalized.
    pub fn eigh(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        let defect = self.hermiticity_defect();
        if defect >= HERMITIAN_TOL * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        let n = self.dim;
        // symmetrize so rounding noise in the strict upper triangle is not lost
        let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (self[(i, j)] + self[(j, i)].conj()));
        let eig = m.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut vectors = ComplexMatrix::from_fn(n, |i, j| eig.eigenvectors[(i, order[j])]);
        if values.windows(2).any(|w| (w[1] - w[0]).abs() < DEGENERACY_GAP) {
            vectors.orthonormalize_columns();
        }
        Ok((values, vectors))
    }

    /// Modified Gram-Schmidt over the columns, two passes.
    fn orthonormalize_columns(&mut self) {
        let n = self.dim;
        for _ in 0..2 {
            for j in 0..n {
                for k in 0..j {
                    let proj: Complex64 = (0..n).map(|i| self[(i, k)].conj() * self[(i, j)]).sum();
                    for i in 0..n {
                        let v = self[(i, k)];
                        self[(i, j)] -= proj * v;
                    }
                }
                let norm = (0..n).map(|i| self[(i, j)].norm_sqr()).sum::<f64>().sqrt();
                for i in 0..n {
                    self[(i, j)] /= norm;
                }
            }
        }
    }

    /// Trace norm, the sum of singular values.
    pub fn trace_norm(&self) -> f64 {
        let gram = &self.adjoint() * self;
        match gram.eigh() {
            Ok((vals, _)) => vals.iter().map(|v| v.max(0.0).sqrt()).sum(),
            Err(_) => f64::NAN,
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self * &rhs
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self + &rhs
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self - &rhs
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_re(-1.0)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Column state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(pub Vec<Complex64>);

impl StateVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self(entries)
    }

    /// Computational basis state `|index>` in a space of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = vec![ZERO; dim];
        v[index] = ONE;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self(self.0.iter().map(|z| z / n).collect())
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|self><other|`
    pub fn outer(&self, other: &StateVector) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), |i, j| self.0[i] * other.0[j].conj())
    }

    pub fn projector(&self) -> ComplexMatrix {
        self.outer(self)
    }

    pub fn kron(&self, other: &StateVector) -> StateVector {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.0 {
            for b in &other.0 {
                out.push(a * b);
            }
        }
        Self(out)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(self.0.iter().map(|z| z * s).collect())
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Tensor product with `a`'s indices major.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (n, m) = (a.dim(), b.dim());
    ComplexMatrix::from_fn(n * m, |i, j| a[(i / m, j / m)] * b[(i % m, j % m)])
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    factors
        .iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// `exp(-i · s · h)` for Hermitian `h`, through its eigen-decomposition.
pub fn expm_hermitian(h: &ComplexMatrix, s: f64) -> Result<ComplexMatrix> {
    let (vals, vecs) = h.eigh()?;
    let n = h.dim();
    let phases: Vec<Complex64> = vals.iter().map(|&e| Complex64::from_polar(1.0, -s * e)).collect();
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = ZERO;
            for (k, p) in phases.iter().enumerate() {
                acc += vecs[(i, k)] * p * vecs[(j, k)].conj();
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Reduced density matrix on the subsystems listed in `keep`.
///
/// `dims` lists subsystem dimensions with the first entry most significant,
/// matching [`kron`] ordering. `keep` may be given in any order; the result is
/// ordered by ascending subsystem index.
pub fn partial_trace(rho: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::Dimension(format!(
            "subsystem dimensions {dims:?} multiply to {total}, matrix has dimension {}",
            rho.dim()
        )));
    }
    if let Some(&k) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::Dimension(format!("subsystem {k} does not exist")));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();

    let digits = |mut idx: usize| -> Vec<usize> {
        let mut d = vec![0; dims.len()];
        for s in (0..dims.len()).rev() {
            d[s] = idx % dims[s];
            idx /= dims[s];
        }
        d
    };
    let compose = |d: &[usize], subs: &[usize]| -> usize {
        subs.iter().fold(0, |acc, &s| acc * dims[s] + d[s])
    };

    let out_dim: usize = kept.iter().map(|&s| dims[s]).product();
    let mut out = ComplexMatrix::zeros(out_dim);
    let all_digits: Vec<Vec<usize>> = (0..total).map(digits).collect();
    for i in 0..total {
        let di = &all_digits[i];
        for j in 0..total {
            let dj = &all_digits[j];
            if traced.iter().all(|&s| di[s] == dj[s]) {
                out[(compose(di, &kept), compose(dj, &kept))] += rho[(i, j)];
            }
        }
    }
    Ok(out)
}

/// `Re <psi|rho|psi>` for a normalized pure target state.
pub fn state_fidelity(psi: &StateVector, rho: &ComplexMatrix) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(Error::Dimension(format!(
            "state has dimension {}, density matrix {}",
            psi.dim(),
            rho.dim()
        )));
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let f = rho.sandwich(psi, psi);
    assert!(
        f.im.abs() < IMAG_TOL,
        "fidelity has imaginary part {:e}; rho is not Hermitian",
        f.im
    );
    Ok(f.re)
}

/// `|tr(U^dagger V)| / d`, insensitive to a global phase between the gates.
pub fn trace_fidelity(u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
    (&u.adjoint() * v).trace().norm() / u.dim() as f64
}

/// Trace distance `||U - V||_1 / 2`.
pub fn trace_distance(u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
    0.5 * (u - v).trace_norm()
}

/// Checks the density-matrix invariants: Hermitian, unit trace, PSD.
pub fn is_density_matrix(rho: &ComplexMatrix, tol: f64) -> bool {
    if !rho.is_hermitian(tol.max(HERMITIAN_TOL)) || (rho.trace() - ONE).norm() > tol {
        return false;
    }
    match rho.eigh() {
        Ok((vals, _)) => vals.iter().all(|&v| v >= -1e-12),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{sigma_x, sigma_y, sigma_z};
    use std::f64::consts::PI;

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        (a - b).frobenius_norm() < tol
    }

    #[test]
    fn kron_identity_and_diagonal() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let zi = kron(&sigma_z(), &i2);
        assert_eq!(zi, ComplexMatrix::diag(&[ONE, ONE, -ONE, -ONE]));
    }

    #[test]
    fn kron_xx_flips_both_bits() {
        let xx = kron(&sigma_x(), &sigma_x());
        let out = xx.apply(&StateVector::basis(4, 0));
        assert_eq!(out, StateVector::basis(4, 3));
    }

    #[test]
    fn expm_examples() {
        let u = expm_hermitian(&sigma_x(), PI / 2.0).unwrap();
        assert!(close(&u, &sigma_x().scale(-I), 1e-12));
        let z = expm_hermitian(&ComplexMatrix::zeros(4), 3.7).unwrap();
        assert!(close(&z, &ComplexMatrix::identity(4), 1e-15));
        for n in [2, 4, 10] {
            let p = expm_hermitian(&sigma_z(), PI * n as f64).unwrap();
            assert!(close(&p, &ComplexMatrix::identity(2), 1e-12));
        }
    }

    #[test]
    fn expm_rejects_non_hermitian() {
        let mut m = sigma_x();
        m[(0, 1)] = c(2.0, 0.0);
        assert!(matches!(expm_hermitian(&m, 1.0), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn expm_handles_degenerate_spectrum() {
        // Heisenberg exchange has a three-fold degenerate triplet.
        let h = &(&kron(&sigma_x(), &sigma_x()) + &kron(&sigma_y(), &sigma_y())) + &kron(&sigma_z(), &sigma_z());
        let u = expm_hermitian(&h, 0.37).unwrap();
        assert!(u.unitarity_defect() < 1e-12);
        let (vals, vecs) = h.eigh().unwrap();
        assert!(vecs.unitarity_defect() < 1e-12);
        assert!((vals[0] + 3.0).abs() < 1e-12 && vals[1..].iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn partial_trace_examples() {
        let zz = StateVector::basis(4, 0).projector();
        let r = partial_trace(&zz, &[2, 2], &[0]).unwrap();
        assert_eq!(r, StateVector::basis(2, 0).projector());

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::new(vec![c(s, 0.0), ZERO, ZERO, c(s, 0.0)]);
        let r = partial_trace(&bell.projector(), &[2, 2], &[0]).unwrap();
        assert!(close(&r, &ComplexMatrix::identity(2).scale_re(0.5), 1e-15));

        let rho_a = ComplexMatrix::from_rows([[c(0.7, 0.0), c(0.1, 0.2)], [c(0.1, -0.2), c(0.3, 0.0)]]);
        let rho_b = ComplexMatrix::from_rows([[c(0.4, 0.0), c(0.0, -0.3)], [c(0.0, 0.3), c(0.6, 0.0)]]);
        let r = partial_trace(&kron(&rho_a, &rho_b), &[2, 2], &[1]).unwrap();
        assert!(close(&r, &rho_b, 1e-15));
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        let rho = ComplexMatrix::identity(4);
        assert!(matches!(partial_trace(&rho, &[2, 3], &[0]), Err(Error::Dimension(_))));
        assert!(matches!(partial_trace(&rho, &[2, 2], &[2]), Err(Error::Dimension(_))));
    }

    #[test]
    fn partial_trace_over_everything_is_trace() {
        let rho = ComplexMatrix::from_fn(8, |i, j| if i == j { c(0.125, 0.0) } else { c(0.01, 0.0) });
        let r = partial_trace(&rho, &[2, 2, 2], &[]).unwrap();
        assert_eq!(r.dim(), 1);
        assert!((r[(0, 0)] - rho.trace()).norm() < 1e-15);
    }

    #[test]
    fn fidelity_examples() {
        let zero = StateVector::basis(2, 0);
        let one = StateVector::basis(2, 1);
        assert!((state_fidelity(&zero, &zero.projector()).unwrap() - 1.0).abs() < 1e-15);
        assert!(state_fidelity(&zero, &one.projector()).unwrap().abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::new(vec![c(s, 0.0), c(s, 0.0)]);
        let mixed = ComplexMatrix::identity(2).scale_re(0.5);
        assert!((state_fidelity(&plus, &mixed).unwrap() - 0.5).abs() < 1e-15);
        let bad = StateVector::new(vec![ONE, ONE]);
        assert!(matches!(state_fidelity(&bad, &mixed), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn matrix_round_trips_through_json() {
        let m = sigma_y();
        let s = serde_json::to_string(&m).unwrap();
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
        assert!(serde_json::from_str::<ComplexMatrix>(r#"{"dim":2,"entries":[[1,0]]}"#).is_err());
    }
}
