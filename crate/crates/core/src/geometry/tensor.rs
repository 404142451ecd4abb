use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest condition number accepted when inverting a metric.
pub const MAX_CONDITION: f64 = 1e12;

/// Fisher metric `g_ij` (row-major, `d×d`).
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMatrix {
    dim: usize,
    entries: Vec<f64>,
    pub horizon: f64,
}

impl MetricMatrix {
    pub fn zeros(dim: usize, horizon: f64) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
            horizon,
        }
    }

    pub fn diagonal(diag: &[f64], horizon: f64) -> Self {
        let mut m = Self::zeros(diag.len(), horizon);
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>], horizon: f64) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::domain("metric rows must form a square matrix"));
        }
        Ok(Self {
            dim,
            entries: rows.concat(),
            horizon,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .chunks(self.dim.max(1))
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> f64 {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
                .unwrap_or(col);
            if a[pivot * n + col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in col + 1..n {
                let factor = a[r * n + col] / p;
                for k in col..n {
                    a[r * n + k] -= factor * a[col * n + k];
                }
            }
        }
        det
    }

    /// `g^{ij}` by Gauss–Jordan elimination, rejecting matrices that are not
    /// positive definite or whose 1-norm condition number exceeds [`MAX_CONDITION`].
    pub fn inverse(&self) -> Result<MetricMatrix> {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut inv = vec![0.0; n * n];
        for i in 0..n {
            inv[i * n + i] = 1.0;
        }
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
                .unwrap_or(col);
            if a[pivot * n + col] == 0.0 {
                return Err(Error::IllConditioned {
                    condition: f64::INFINITY,
                });
            }
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
                inv.swap(col * n + k, pivot * n + k);
            }
            let p = a[col * n + col];
            for k in 0..n {
                a[col * n + k] /= p;
                inv[col * n + k] /= p;
            }
            for r in 0..n {
                if r != col {
                    let factor = a[r * n + col];
                    for k in 0..n {
                        a[r * n + k] -= factor * a[col * n + k];
                        inv[r * n + k] -= factor * inv[col * n + k];
                    }
                }
            }
        }
        let inverse = MetricMatrix {
            dim: n,
            entries: inv,
            horizon: self.horizon,
        };
        let condition = self.norm_1() * inverse.norm_1();
        if !(condition.is_finite() && condition <= MAX_CONDITION) || !self.is_positive_definite() {
            return Err(Error::IllConditioned { condition });
        }
        Ok(inverse)
    }

    fn norm_1(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Sylvester's criterion on the leading principal minors.
    pub fn is_positive_definite(&self) -> bool {
        (1..=self.dim).all(|k| {
            let mut sub = MetricMatrix::zeros(k, self.horizon);
            for i in 0..k {
                for j in 0..k {
                    sub.set(i, j, self.get(i, j));
                }
            }
            sub.det() > 0.0
        })
    }

    /// Largest relative difference `|a_ij − b_ij| / max(|a_ij|, |b_ij|)`.
    ///
    /// Entries where both matrices are below `1e-10·max|entry|` count as
    /// zeros and are compared on that absolute scale.
    pub fn max_relative_deviation(&self, other: &MetricMatrix) -> f64 {
        max_relative_deviation(&self.entries, &other.entries)
    }

    /// Restriction to the given coordinate indices (in order).
    pub fn select(&self, indices: &[usize]) -> MetricMatrix {
        let mut m = MetricMatrix::zeros(indices.len(), self.horizon);
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                m.set(a, b, self.get(i, j));
            }
        }
        m
    }
}

/// α-connection coefficients `Γ^{(α)}_{ij,k}`, stored as `[i][j][k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionTensor {
    dim: usize,
    entries: Vec<f64>,
    pub alpha: f64,
}

impl ConnectionTensor {
    pub fn zeros(dim: usize, alpha: f64) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim * dim],
            alpha,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.entries[(i * self.dim + j) * self.dim + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.entries[(i * self.dim + j) * self.dim + k] = v;
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Nested `[i][j][k]` arrays.
    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| (0..self.dim).map(|k| self.get(i, j, k)).collect())
                    .collect()
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn max_relative_deviation(&self, other: &ConnectionTensor) -> f64 {
        max_relative_deviation(&self.entries, &other.entries)
    }

    pub fn select(&self, indices: &[usize]) -> ConnectionTensor {
        let mut t = ConnectionTensor::zeros(indices.len(), self.alpha);
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                for (c, &k) in indices.iter().enumerate() {
                    t.set(a, b, c, self.get(i, j, k));
                }
            }
        }
        t
    }
}

fn max_relative_deviation(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let scale = a.iter().chain(b).fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-10 * scale;
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let diff = (x - y).abs();
            let size = x.abs().max(y.abs());
            if size <= floor {
                if floor > 0.0 {
                    diff / scale
                } else {
                    0.0
                }
            } else {
                diff / size
            }
        })
        .fold(0.0, f64::max)
}
