//! Dense complex matrices: arithmetic, Hermitian eigendecomposition, tensor
//! products, and partial traces. Everything else in the crate sits on top of
//! this module.

pub use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entrywise tolerance below which an operator counts as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite components.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(
                "matrix dimensions must be positive".into(),
            ));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidParameter(
                "matrix entries must be finite".into(),
            ));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from nested rows; rejects ragged input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidParameter(
                "matrix needs at least one row".into(),
            ));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse("ragged row lengths".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_entries(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_entries(other, |a, b| a - b)
    }

    fn zip_entries(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Hilbert-Schmidt inner product `tr(a b*)`.
    pub fn hs_inner(&self, other: &Self) -> Result<Complex64> {
        if !self.is_square() || self.rows != other.rows || other.rows != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "hs_inner needs equal square matrices, got {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        // tr(a b*) = sum_ij a_ij conj(b_ij)
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| a * b.conj())
            .sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max_ij |a_ij - conj(a_ji)|`; zero iff exactly Hermitian.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// Splits `a` into Hermitian parts: `a = h + i k` with `h = (a + a*)/2`
    /// and `k = (a - a*)/(2i)`, both Hermitian.
    pub fn hermitian_parts(&self) -> Result<(Self, Self)> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "hermitian_parts needs a square matrix".into(),
            ));
        }
        let adj = self.adjoint();
        let h = self.add(&adj)?.scale_re(0.5);
        let k = self.sub(&adj)?.scale(Complex64::new(0.0, -0.5));
        Ok((h, k))
    }

    /// Kronecker product; the first factor is the slow index:
    /// `(a ⊗ b)[(i1*rb + i2, j1*cb + j2)] = a[i1,j1] * b[i2,j2]`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.get(i1, j1);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for i2 in 0..other.rows {
                    for j2 in 0..other.cols {
                        out.set(
                            i1 * other.rows + i2,
                            j1 * other.cols + j2,
                            a * other.get(i2, j2),
                        );
                    }
                }
            }
        }
        out
    }

    /// Traces out the second tensor factor of a `(d1*d2) x (d1*d2)` matrix:
    /// `out[i][j] = sum_k a[i*d2+k][j*d2+k]`. Preserves the trace.
    pub fn partial_trace_second(&self, dim_first: usize, dim_second: usize) -> Result<Self> {
        let n = dim_first * dim_second;
        if !self.is_square() || self.rows != n {
            return Err(Error::DimensionMismatch(format!(
                "partial trace expects a square {n}x{n} matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let mut out = Self::zeros(dim_first, dim_first);
        for i in 0..dim_first {
            for j in 0..dim_first {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..dim_second {
                    acc += self.get(i * dim_second + k, j * dim_second + k);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns, vector has {} entries",
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect())
    }

    /// Quadratic form `<psi| a |psi>`.
    pub fn quadratic_form(&self, psi: &[Complex64]) -> Result<Complex64> {
        let av = self.apply_vec(psi)?;
        Ok(psi.iter().zip(&av).map(|(&p, &q)| p.conj() * q).sum())
    }

    /// Hermitian eigendecomposition via cyclic Jacobi sweeps with complex
    /// plane rotations.
    ///
    /// The input must be Hermitian within [`HERMITIAN_TOL`]; it is not
    /// symmetrized, so an asymmetric input surfaces as an error instead of a
    /// silently perturbed spectrum. Sweeps stop once the off-diagonal
    /// Frobenius norm drops below `1e-13 * ||a||_F`; at most 100 sweeps.
    /// Eigenvalues come back ascending with matching eigenvector columns.
    pub fn hermitian_eigen(&self) -> Result<EigenDecomposition> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "eigendecomposition needs a square matrix".into(),
            ));
        }
        let defect = self.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian { defect });
        }
        let n = self.rows;
        let norm = self.frobenius_norm();
        let tol = 1e-13 * norm;
        let max_sweeps = 100;

        let mut a = self.clone();
        let mut v = Self::identity(n);
        // Force exact Hermitian symmetry of the working copy so the update
        // rules below stay consistent.
        for i in 0..n {
            let d = a.get(i, i);
            a.set(i, i, Complex64::new(d.re, 0.0));
            for j in (i + 1)..n {
                let m = (a.get(i, j) + a.get(j, i).conj()) * 0.5;
                a.set(i, j, m);
                a.set(j, i, m.conj());
            }
        }

        let off_norm = |a: &Self| -> f64 {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        s += a.get(i, j).norm_sqr();
                    }
                }
            }
            s.sqrt()
        };

        let mut converged = off_norm(&a) <= tol;
        let mut sweeps = 0;
        while !converged && sweeps < max_sweeps {
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    let r = apq.norm();
                    if r == 0.0 {
                        continue;
                    }
                    let phase = apq / r; // e^{i phi}
                    let app = a.get(p, p).re;
                    let aqq = a.get(q, q).re;
                    // Rotation angle: tan(2 theta) = 2r / (app - aqq),
                    // smaller-magnitude root for stability.
                    let tau = (app - aqq) / (2.0 * r);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + f64::hypot(1.0, tau))
                    } else {
                        -1.0 / (-tau + f64::hypot(1.0, tau))
                    };
                    let c = 1.0 / f64::hypot(1.0, t);
                    let s = t * c;
                    let s_back = s * phase.conj(); // s e^{-i phi}
                    let s_fwd = s * phase; // s e^{+i phi}

                    for j in 0..n {
                        if j == p || j == q {
                            continue;
                        }
                        let ajp = a.get(j, p);
                        let ajq = a.get(j, q);
                        let njp = ajp * c + ajq * s_back;
                        let njq = ajq * c - ajp * s_fwd;
                        a.set(j, p, njp);
                        a.set(j, q, njq);
                        a.set(p, j, njp.conj());
                        a.set(q, j, njq.conj());
                    }
                    let napp = c * c * app + 2.0 * c * s * r + s * s * aqq;
                    let naqq = s * s * app - 2.0 * c * s * r + c * c * aqq;
                    a.set(p, p, Complex64::new(napp, 0.0));
                    a.set(q, q, Complex64::new(naqq, 0.0));
                    a.set(p, q, Complex64::new(0.0, 0.0));
                    a.set(q, p, Complex64::new(0.0, 0.0));

                    for j in 0..n {
                        let vjp = v.get(j, p);
                        let vjq = v.get(j, q);
                        v.set(j, p, vjp * c + vjq * s_back);
                        v.set(j, q, vjq * c - vjp * s_fwd);
                    }
                }
            }
            sweeps += 1;
            converged = off_norm(&a) <= tol;
        }
        if !converged {
            return Err(Error::NoConvergence { sweeps });
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a.get(i, i).re.partial_cmp(&a.get(j, j).re).unwrap());
        let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
        let mut vectors = Self::zeros(n, n);
        for (col, &src) in order.iter().enumerate() {
            for row in 0..n {
                vectors.set(row, col, v.get(row, src));
            }
        }
        Ok(EigenDecomposition {
            eigenvalues,
            eigenvectors: vectors,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&MatrixJson::from(self)).expect("matrix serialization cannot fail")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: MatrixJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.into_matrix()
    }
}

/// Eigenvalues (ascending) and matching unit eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    /// The k-th eigenvector column.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        (0..self.eigenvectors.rows())
            .map(|i| self.eigenvectors.get(i, k))
            .collect()
    }

    /// Reconstructs `V diag(lambda) V*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let lam = self.eigenvalues[k];
            for i in 0..n {
                let vik = self.eigenvectors.get(i, k);
                for j in 0..n {
                    let add = vik * self.eigenvectors.get(j, k).conj() * lam;
                    out.set(i, j, out.get(i, j) + add);
                }
            }
        }
        out
    }
}

/// Wire schema: `{"rows": N, "cols": N, "re": [[...]], "im": [[...]]}` with
/// `im` optional (defaults to zero).
#[derive(Serialize, Deserialize)]
pub(crate) struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn into_matrix(self) -> Result<ComplexMatrix> {
        let check_shape = |name: &str, grid: &Vec<Vec<f64>>| -> Result<()> {
            if grid.len() != self.rows {
                return Err(Error::Parse(format!(
                    "field '{name}' has {} rows, header says {}",
                    grid.len(),
                    self.rows
                )));
            }
            for row in grid {
                if row.len() != self.cols {
                    return Err(Error::Parse(format!(
                        "ragged '{name}' row: {} entries, header says {}",
                        row.len(),
                        self.cols
                    )));
                }
            }
            Ok(())
        };
        check_shape("re", &self.re)?;
        if let Some(im) = &self.im {
            check_shape("im", im)?;
        }
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let re = self.re[i][j];
                let im = self.im.as_ref().map_or(0.0, |g| g[i][j]);
                entries.push(Complex64::new(re, im));
            }
        }
        ComplexMatrix::new(self.rows, self.cols, entries)
    }
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let re = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m.get(i, j).re).collect())
            .collect();
        let im = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m.get(i, j).im).collect())
            .collect();
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            re,
            im: Some(im),
        }
    }
}
