//! Dense symmetric linear algebra: Laplacians, eigen-decompositions,
//! Rayleigh quotients, projections and pseudo-inverse square roots.

mod eigen;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Eigenvalues below `DEFAULT_RANK_TOL · λ_max` are treated as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Symmetric matrix stored as its packed lower triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    lower: Vec<f64>,
}

#[inline]
fn packed(i: usize, j: usize) -> usize {
    let (r, c) = if i >= j { (i, j) } else { (j, i) };
    r * (r + 1) / 2 + c
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            lower: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    /// Builds from `f(i, j)` evaluated on the lower triangle only.
    pub fn from_fn<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut lower = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                lower.push(f(i, j));
            }
        }
        Self { n, lower }
    }

    /// Reads the lower triangle of a row-major square array.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        Self::from_fn(rows.len(), |i, j| rows[i][j])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.lower[packed(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.lower[packed(i, j)] = x;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, x: f64) {
        self.lower[packed(i, j)] += x;
    }

    /// `self += s · v vᵀ`.
    pub fn add_rank_one(&mut self, s: f64, v: &[f64]) {
        let mut idx = 0;
        for i in 0..self.n {
            let svi = s * v[i];
            for &vj in &v[..=i] {
                self.lower[idx] += svi * vj;
                idx += 1;
            }
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        let mut idx = 0;
        for i in 0..self.n {
            for j in 0..i {
                let a = self.lower[idx];
                y[i] += a * x[j];
                y[j] += a * x[i];
                idx += 1;
            }
            y[i] += self.lower[idx] * x[i];
            idx += 1;
        }
        y
    }

    /// `xᵀ M x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.mul_vec(x))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..=i {
                let x = self.get(i, j);
                s += if i == j { x * x } else { 2.0 * x * x };
            }
        }
        s.sqrt()
    }

    /// Row-major copy of the full matrix.
    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.n;
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let x = self.get(i, j);
                m.set(i, j, x);
                m.set(j, i, x);
            }
        }
        m
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            lower: self.lower.iter().zip(&other.lower).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            n: self.n,
            lower: self.lower.iter().map(|a| a * c).collect(),
        }
    }

    fn check_finite(&self) -> Result<()> {
        for i in 0..self.n {
            for j in 0..=i {
                if !self.get(i, j).is_finite() {
                    return Err(Error::NonFinite(i, j));
                }
            }
        }
        Ok(())
    }
}

/// General dense matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in orow.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `Mᵀ x`.
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (yj, &a) in y.iter_mut().zip(self.row(i)) {
                *yj += a * xi;
            }
        }
        y
    }

    /// Lower triangle of a (numerically) symmetric square result.
    pub fn to_symmetric(&self) -> SymmetricMatrix {
        assert_eq!(self.rows, self.cols);
        SymmetricMatrix::from_fn(self.rows, |i, j| 0.5 * (self.get(i, j) + self.get(j, i)))
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetricSpectrum {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column-major orthonormal eigenvectors, column `j` pairs with `values[j]`.
    #[serde(skip)]
    pub vectors: Option<Vec<f64>>,
}

impl SymmetricSpectrum {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, j: usize) -> Option<&[f64]> {
        let n = self.n();
        self.vectors.as_ref().map(|v| &v[j * n..(j + 1) * n])
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("nonempty spectrum")
    }

    /// Eigenvectors as the columns of a dense matrix.
    pub fn basis(&self) -> Option<DenseMatrix> {
        let n = self.n();
        self.vectors.as_ref().map(|v| {
            let mut m = DenseMatrix::zeros(n, n);
            for j in 0..n {
                for i in 0..n {
                    m.set(i, j, v[j * n + i]);
                }
            }
            m
        })
    }
}

/// Eigen-decomposition with eigenvalues ascending. Each eigenvector is signed
/// so that its largest-magnitude entry (first one on ties) is positive.
pub fn eig(m: &SymmetricMatrix, want_vectors: bool) -> Result<SymmetricSpectrum> {
    m.check_finite()?;
    let n = m.n();
    let dense = m.to_dense();
    // The dense copy is symmetric, so its row-major layout is also column-major.
    let (values, mut vectors) = eigen::symmetric_eigen(n, dense.data, want_vectors)?;
    if let Some(vs) = vectors.as_mut() {
        for col in vs.chunks_mut(n) {
            let mut best = 0;
            for (i, x) in col.iter().enumerate() {
                if x.abs() > col[best].abs() {
                    best = i;
                }
            }
            if col[best] < 0.0 {
                for x in col.iter_mut() {
                    *x = -*x;
                }
            }
        }
    }
    Ok(SymmetricSpectrum { values, vectors })
}

/// `L = D - W`.
pub fn laplacian(g: &WeightedGraph) -> SymmetricMatrix {
    let mut l = SymmetricMatrix::zeros(g.n());
    for e in g.edges() {
        l.add(e.u, e.u, e.w);
        l.add(e.v, e.v, e.w);
        l.set(e.u, e.v, -e.w);
    }
    l
}

/// Weighted adjacency matrix `W`.
pub fn adjacency(g: &WeightedGraph) -> SymmetricMatrix {
    let mut a = SymmetricMatrix::zeros(g.n());
    for e in g.edges() {
        a.set(e.u, e.v, e.w);
    }
    a
}

/// `fᵀ L f = Σ_{uv ∈ E} w(u,v) (f(u) - f(v))²`.
pub fn laplacian_form(g: &WeightedGraph, f: &[f64]) -> f64 {
    g.edges()
        .iter()
        .map(|e| {
            let d = f[e.u] - f[e.v];
            e.w * d * d
        })
        .sum()
}

pub fn rayleigh(m: &SymmetricMatrix, f: &[f64]) -> Result<f64> {
    if f.len() != m.n() {
        return Err(Error::LengthMismatch(f.len(), m.n()));
    }
    let norm2 = dot(f, f);
    if norm2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(m.quad_form(f) / norm2)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LambdaRatio {
    pub lambda2: f64,
    pub lambdan: f64,
    pub ratio: f64,
}

/// `λ_n / λ_2` of the Laplacian. A graph with `λ_2 <= DEFAULT_RANK_TOL · λ_n`
/// is reported as disconnected.
pub fn lambda_ratio(g: &WeightedGraph) -> Result<LambdaRatio> {
    if g.n() < 2 {
        return Err(Error::Precondition("lambda ratio needs n >= 2".into()));
    }
    let spec = eig(&laplacian(g), false)?;
    lambda_ratio_from_spectrum(&spec.values)
}

pub fn lambda_ratio_from_spectrum(values: &[f64]) -> Result<LambdaRatio> {
    let lambda2 = values[1];
    let lambdan = values[values.len() - 1];
    if lambda2 <= DEFAULT_RANK_TOL * lambdan.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::Disconnected { lambda2 });
    }
    Ok(LambdaRatio {
        lambda2,
        lambdan,
        ratio: lambdan / lambda2,
    })
}

/// `f - (⟨f, 1⟩ / n) 1`.
pub fn project_orth_ones(f: &[f64]) -> Vec<f64> {
    if f.is_empty() {
        return Vec::new();
    }
    let mean = f.iter().sum::<f64>() / f.len() as f64;
    f.iter().map(|x| x - mean).collect()
}

/// `M^{+1/2}`: eigenvalues below `rank_tol · λ_max` are dropped, the rest
/// replaced by their inverse square roots.
pub fn pinv_sqrt(m: &SymmetricMatrix, rank_tol: f64) -> Result<SymmetricMatrix> {
    let n = m.n();
    let spec = eig(m, true)?;
    let top = spec.values.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let cutoff = rank_tol * top;
    let mut out = SymmetricMatrix::zeros(n);
    for (j, &lam) in spec.values.iter().enumerate() {
        if lam < -cutoff {
            return Err(Error::NotPsd(lam));
        }
        if lam <= cutoff {
            continue;
        }
        out.add_rank_one(1.0 / lam.sqrt(), spec.vector(j).expect("vectors requested"));
    }
    Ok(out)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a)
}
