use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An `n x n` real matrix: the value type of `K`, `M` and `Psi`.
///
/// Serialized as a row-major list of rows.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentMatrix(DMatrix<f64>);

impl MomentMatrix {
    pub fn zeros(n: usize) -> Self {
        MomentMatrix(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        MomentMatrix(DMatrix::identity(n, n))
    }

    pub fn from_matrix(m: DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "moment matrices are square");
        MomentMatrix(m)
    }

    /// Builds from rows; panics unless the rows form a square matrix.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "rows must form a square matrix");
        MomentMatrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn transpose(&self) -> Self {
        MomentMatrix(self.0.transpose())
    }

    pub fn symmetric_part(&self) -> Self {
        MomentMatrix((&self.0 + self.0.transpose()) * 0.5)
    }

    pub fn antisymmetric_part(&self) -> Self {
        MomentMatrix((&self.0 - self.0.transpose()) * 0.5)
    }

    /// Frobenius inner product `<A, B>`.
    pub fn frobenius_dot(&self, other: &Self) -> f64 {
        self.0.dot(&other.0)
    }

    /// `phi * self * phi^t`.
    pub fn congruence(&self, phi: &DMatrix<f64>) -> Self {
        MomentMatrix(phi * &self.0 * phi.transpose())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        MomentMatrix(&self.0 * &other.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// Symmetric within `rel_tol * max(1, |entries|_max)`.
    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let scale = self.0.amax().max(1.0);
        let n = self.dim();
        (0..n).all(|i| (0..i).all(|j| (self.0[(i, j)] - self.0[(j, i)]).abs() <= rel_tol * scale))
    }

    /// Smallest eigenvalue of the symmetric part.
    pub fn min_symmetric_eigenvalue(&self) -> f64 {
        let sym = self.symmetric_part().0;
        sym.symmetric_eigenvalues().min()
    }

    /// `|self - other|_F / max(|other|_F, floor)`.
    pub fn relative_error(&self, other: &Self, floor: f64) -> f64 {
        (self - other).frobenius_norm() / other.frobenius_norm().max(floor)
    }
}

impl Add for &MomentMatrix {
    type Output = MomentMatrix;
    fn add(self, rhs: &MomentMatrix) -> MomentMatrix {
        MomentMatrix(&self.0 + &rhs.0)
    }
}

impl Add for MomentMatrix {
    type Output = MomentMatrix;
    fn add(self, rhs: MomentMatrix) -> MomentMatrix {
        MomentMatrix(self.0 + rhs.0)
    }
}

impl AddAssign<&MomentMatrix> for MomentMatrix {
    fn add_assign(&mut self, rhs: &MomentMatrix) {
        self.0 += &rhs.0;
    }
}

impl Sub for &MomentMatrix {
    type Output = MomentMatrix;
    fn sub(self, rhs: &MomentMatrix) -> MomentMatrix {
        MomentMatrix(&self.0 - &rhs.0)
    }
}

impl Sub for MomentMatrix {
    type Output = MomentMatrix;
    fn sub(self, rhs: MomentMatrix) -> MomentMatrix {
        MomentMatrix(self.0 - rhs.0)
    }
}

impl Mul<f64> for &MomentMatrix {
    type Output = MomentMatrix;
    fn mul(self, rhs: f64) -> MomentMatrix {
        MomentMatrix(&self.0 * rhs)
    }
}

impl Mul<f64> for MomentMatrix {
    type Output = MomentMatrix;
    fn mul(self, rhs: f64) -> MomentMatrix {
        MomentMatrix(self.0 * rhs)
    }
}

impl Neg for MomentMatrix {
    type Output = MomentMatrix;
    fn neg(self) -> MomentMatrix {
        MomentMatrix(-self.0)
    }
}

impl Serialize for MomentMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MomentMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("matrix rows must form a square matrix"));
        }
        Ok(MomentMatrix::from_rows(&rows))
    }
}
