//! Minimal dense matrix support for the affine maps used by isometries and
//! quadratic forms. Row-major storage; Gaussian elimination with partial
//! pivoting for determinants and inverses.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse("matrix must be square and non-empty".into()));
        }
        Ok(Self {
            n,
            data: rows.concat(),
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self {
            n,
            data: vec![0.0; n * n],
        };
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        let mut m = Self::identity(n);
        for i in 0..n {
            m.data[i * n + i] = s;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut out = Matrix {
            n,
            data: vec![0.0; n * n],
        };
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, s);
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// x^T A x
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let ax = self.apply(x);
        x.iter().zip(&ax).map(|(a, b)| a * b).sum()
    }

    pub fn det(&self) -> f64 {
        let mut lu = self.data.clone();
        let n = self.n;
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&a, &b| {
                    lu[a * n + col]
                        .abs()
                        .partial_cmp(&lu[b * n + col].abs())
                        .unwrap()
                })
                .unwrap();
            if lu[pivot * n + col].abs() < 1e-300 {
                return 0.0;
            }
            if pivot != col {
                for j in 0..n {
                    lu.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            det *= lu[col * n + col];
            for row in (col + 1)..n {
                let f = lu[row * n + col] / lu[col * n + col];
                for j in col..n {
                    lu[row * n + j] -= f * lu[col * n + j];
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = Matrix::identity(n).data;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| {
                    a[x * n + col]
                        .abs()
                        .partial_cmp(&a[y * n + col].abs())
                        .unwrap()
                })
                .unwrap();
            if a[pivot * n + col].abs() < 1e-14 * self.max_abs().max(1.0) {
                return Err(Error::Parse("matrix is singular".into()));
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                    inv.swap(col * n + j, pivot * n + j);
                }
            }
            let d = a[col * n + col];
            for j in 0..n {
                a[col * n + j] /= d;
                inv[col * n + j] /= d;
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let f = a[row * n + col];
                if f != 0.0 {
                    for j in 0..n {
                        a[row * n + j] -= f * a[col * n + j];
                        inv[row * n + j] -= f * inv[col * n + j];
                    }
                }
            }
        }
        Ok(Matrix { n, data: inv })
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Positive semi-definiteness check by pivoted Cholesky-like sweep,
    /// with a small slack for rounding.
    pub fn is_psd(&self, tol: f64) -> bool {
        let n = self.n;
        let mut a = self.data.clone();
        for k in 0..n {
            let d = a[k * n + k];
            if d < -tol {
                return false;
            }
            if d <= tol {
                // Degenerate direction: the row/column must vanish too.
                for j in 0..n {
                    if a[k * n + j].abs() > tol.sqrt().max(tol) {
                        return false;
                    }
                }
                continue;
            }
            for i in (k + 1)..n {
                for j in (k + 1)..n {
                    a[i * n + j] -= a[i * n + k] * a[k * n + j] / d;
                }
            }
        }
        true
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Matrix::from_rows(&rows)
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        (0..m.n)
            .map(|i| (0..m.n).map(|j| m.get(i, j)).collect())
            .collect()
    }
}
