//! Joint numerical ranges of Hermitian tuples: the range map, Monte-Carlo
//! sampling, support functions in R^m, and the factorization of the range
//! map through the orthogonal projection onto the span of the (traceless
//! parts of the) tuple.
//!
//! Joint ranges of more than two operators need not be convex, and no exact
//! boundary algorithm is provided for that case: the module exposes point
//! sampling plus support functions of the convex hull, and no operation
//! assumes a sampled cloud is convex.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HERMITIAN_TOL};
use crate::rng::{parallel_map_indexed, SeededRng};
use crate::states::{haar_sample, pauli_basis, traceless_orthogonal_basis, PureState};

/// Ordered list of m Hermitian N x N operators.
#[derive(Debug, Clone)]
pub struct HermitianTuple {
    dim: usize,
    operators: Vec<ComplexMatrix>,
}

impl HermitianTuple {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidParameter(
                "tuple needs at least one operator".into(),
            ));
        }
        let dim = operators[0].rows();
        for (j, op) in operators.iter().enumerate() {
            if op.rows() != dim || op.cols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "operator {j} is {}x{}, expected {dim}x{dim}",
                    op.rows(),
                    op.cols()
                )));
            }
            let defect = op.hermitian_defect();
            if defect > HERMITIAN_TOL {
                return Err(Error::NotHermitian { defect });
            }
        }
        Ok(Self { dim, operators })
    }

    /// The Pauli triple on C^2.
    pub fn pauli() -> Self {
        Self::new(pauli_basis()).expect("pauli matrices are hermitian")
    }

    /// The eight Gell-Mann matrices on C^3.
    pub fn gellmann() -> Self {
        Self::new(traceless_orthogonal_basis(3).expect("valid dim")).expect("hermitian basis")
    }

    /// Pauli matrices extended to C^4 by tensoring with the identity:
    /// `sigma_j (x) 1_2`.
    pub fn pauli_extended() -> Self {
        let id2 = ComplexMatrix::identity(2);
        Self::new(pauli_basis().iter().map(|s| s.tensor(&id2)).collect())
            .expect("tensor with identity preserves hermiticity")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of operators m.
    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn get(&self, j: usize) -> &ComplexMatrix {
        &self.operators[j]
    }

    /// The linear image `X -> (tr(X A_1), ..., tr(X A_m))` of a Hermitian
    /// argument.
    pub fn hs_image(&self, x: &ComplexMatrix) -> Result<Vec<f64>> {
        if x.rows() != self.dim || x.cols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "argument is {}x{}, tuple dimension is {}",
                x.rows(),
                x.cols(),
                self.dim
            )));
        }
        self.operators
            .iter()
            .map(|a| Ok(x.hs_inner(a)?.re)) // tr(X A*) = tr(X A) for hermitian A
            .collect()
    }

    /// Barycenter `(tr(A_1)/N, ..., tr(A_m)/N)`, the mean of the shadow.
    pub fn barycenter(&self) -> Vec<f64> {
        self.operators
            .iter()
            .map(|a| a.trace().re / self.dim as f64)
            .collect()
    }
}

/// Range-map value `(<psi|A_1|psi>, ..., <psi|A_m|psi>)`.
pub fn jnr_map(tuple: &HermitianTuple, psi: &PureState) -> Result<Vec<f64>> {
    if psi.dim() != tuple.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} vs tuple dimension {}",
            psi.dim(),
            tuple.dim()
        )));
    }
    tuple
        .operators
        .iter()
        .map(|a| Ok(a.quadratic_form(psi.amplitudes())?.re))
        .collect()
}

/// `count` range points of independent Haar states. Sample `i` draws from
/// `SeededRng::substream(seed, i)`, so the result does not depend on the
/// worker count.
pub fn jnr_sample(
    tuple: &HermitianTuple,
    count: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<Vec<f64>>> {
    if count == 0 {
        return Err(Error::InvalidParameter(
            "sample count must be at least 1".into(),
        ));
    }
    let dim = tuple.dim();
    Ok(parallel_map_indexed(count, workers, |i| {
        let mut rng = SeededRng::substream(seed, i as u64);
        let psi = haar_sample(dim, &mut rng).expect("dim >= 1");
        jnr_map(tuple, &psi).expect("dimensions match")
    }))
}

/// Support function of the convex hull of the joint numerical range:
/// `h(u) = lambda_max(sum_j u_j A_j)` for the normalized direction `u`.
pub fn jnr_support(tuple: &HermitianTuple, direction: &[f64]) -> Result<f64> {
    if direction.len() != tuple.len() {
        return Err(Error::DimensionMismatch(format!(
            "direction has {} components, tuple has {} operators",
            direction.len(),
            tuple.len()
        )));
    }
    let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-300 {
        return Err(Error::InvalidParameter("direction must be nonzero".into()));
    }
    let mut acc = ComplexMatrix::zeros(tuple.dim(), tuple.dim());
    for (u, a) in direction.iter().zip(&tuple.operators) {
        acc = acc.add(&a.scale_re(u / norm))?;
    }
    Ok(acc.hermitian_eigen()?.lambda_max())
}

/// Factorization of the range map `L(X) = (tr(X A_j))_j` through the span of
/// the traceless parts of the tuple.
///
/// The operators are centered internally (`A_j - tr(A_j)/N * 1`); the removed
/// offsets are kept so the affine identity
/// `L(X) = M(Pr(X)) + offsets * tr(X)` still reproduces the raw map.
#[derive(Debug, Clone)]
pub struct ProjectionFactorization {
    subspace_basis: Vec<ComplexMatrix>,
    /// m x p real matrix of the induced map in the orthonormal basis.
    coefficient_map: Vec<Vec<f64>>,
    rank: usize,
    trace_offsets: Vec<f64>,
    condition_number: Option<f64>,
}

impl ProjectionFactorization {
    pub fn subspace_basis(&self) -> &[ComplexMatrix] {
        &self.subspace_basis
    }

    pub fn coefficient_map(&self) -> &[Vec<f64>] {
        &self.coefficient_map
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn trace_offsets(&self) -> &[f64] {
        &self.trace_offsets
    }

    /// Condition number of the coefficient map when it is square (rank = m);
    /// a finite value certifies the affine isomorphism.
    pub fn condition_number(&self) -> Option<f64> {
        self.condition_number
    }

    /// Coordinates of the orthogonal projection of a Hermitian `x` onto the
    /// spanned subspace.
    pub fn project_coordinates(&self, x: &ComplexMatrix) -> Result<Vec<f64>> {
        self.subspace_basis
            .iter()
            .map(|e| Ok(x.hs_inner(e)?.re))
            .collect()
    }

    /// Applies the coefficient map to projection coordinates.
    pub fn apply_map(&self, coords: &[f64]) -> Vec<f64> {
        self.coefficient_map
            .iter()
            .map(|row| row.iter().zip(coords).map(|(m, c)| m * c).sum())
            .collect()
    }

    /// `M(Pr(x)) + offsets * tr(x)`; equals the raw image `(tr(x A_j))_j`.
    pub fn affine_image(&self, x: &ComplexMatrix) -> Result<Vec<f64>> {
        let coords = self.project_coordinates(x)?;
        let tr = x.trace().re;
        Ok(self
            .apply_map(&coords)
            .into_iter()
            .zip(&self.trace_offsets)
            .map(|(v, off)| v + off * tr)
            .collect())
    }

    /// Largest component gap between the factored and the direct image.
    pub fn identity_defect(&self, tuple: &HermitianTuple, x: &ComplexMatrix) -> Result<f64> {
        let direct = tuple.hs_image(x)?;
        let factored = self.affine_image(x)?;
        Ok(direct
            .iter()
            .zip(&factored)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Dependency threshold of the Gram-Schmidt pass: a traceless part is
/// dependent when its residual keeps less than 1e-10 of its original norm.
const GS_RELATIVE_THRESHOLD: f64 = 1e-10;

/// Orthonormalizes the traceless parts of the tuple under the
/// Hilbert-Schmidt inner product and expresses the range map through the
/// resulting projection.
pub fn factorize(tuple: &HermitianTuple) -> Result<ProjectionFactorization> {
    let n = tuple.dim();
    let identity = ComplexMatrix::identity(n);
    let mut offsets = Vec::with_capacity(tuple.len());
    let mut traceless = Vec::with_capacity(tuple.len());
    for a in &tuple.operators {
        let off = a.trace().re / n as f64;
        offsets.push(off);
        traceless.push(a.sub(&identity.scale_re(off))?);
    }

    let mut basis: Vec<ComplexMatrix> = Vec::new();
    for t in &traceless {
        let original_norm = t.frobenius_norm();
        if original_norm == 0.0 {
            continue;
        }
        let mut v = t.clone();
        // Two projection passes keep the basis orthonormal to ~1e-15.
        for _ in 0..2 {
            for e in &basis {
                let coeff = v.hs_inner(e)?.re;
                v = v.sub(&e.scale_re(coeff))?;
            }
        }
        let residual = v.frobenius_norm();
        if residual < GS_RELATIVE_THRESHOLD * original_norm {
            continue;
        }
        basis.push(v.scale_re(1.0 / residual));
    }
    if basis.is_empty() {
        return Err(Error::TrivialSpan);
    }

    let mut coefficient_map = Vec::with_capacity(tuple.len());
    for t in &traceless {
        let mut row = Vec::with_capacity(basis.len());
        for e in &basis {
            row.push(t.hs_inner(e)?.re);
        }
        coefficient_map.push(row);
    }

    let rank = basis.len();
    let condition_number = if rank == tuple.len() {
        Some(condition_of(&coefficient_map)?)
    } else {
        None
    };

    Ok(ProjectionFactorization {
        subspace_basis: basis,
        coefficient_map,
        rank,
        trace_offsets: offsets,
        condition_number,
    })
}

/// Spectral condition number of a square real matrix via the eigenvalues of
/// `M^T M`.
fn condition_of(m: &[Vec<f64>]) -> Result<f64> {
    let k = m.len();
    let mut gram = ComplexMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let dot: f64 = (0..k).map(|l| m[l][i] * m[l][j]).sum();
            gram.set(i, j, Complex64::new(dot, 0.0));
        }
    }
    let eig = gram.hermitian_eigen()?;
    let min = eig.lambda_min();
    let max = eig.lambda_max();
    if min <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((max / min).sqrt())
}

/// One failed implication "equal range points but different rays".
#[derive(Debug, Clone, Serialize)]
pub struct InjectivityViolation {
    pub trial: usize,
    pub point_gap: f64,
    pub overlap_deviation: f64,
}

/// Outcome of [`verify_affine_injectivity`].
#[derive(Debug, Clone, Serialize)]
pub struct InjectivityReport {
    pub rank: usize,
    pub condition_number: Option<f64>,
    pub trials: usize,
    pub tolerance: f64,
    pub violations: Vec<InjectivityViolation>,
}

impl InjectivityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Numerically checks that the range map is injective on rays when the tuple
/// spans the full traceless space (rank N^2 - 1): whenever two states give
/// the same range point within 1e-8, their overlap must have unit modulus.
///
/// Each trial tests an independent random pair plus a phase-shifted copy of
/// one state (which must map to the same point).
pub fn verify_affine_injectivity(
    tuple: &HermitianTuple,
    trials: usize,
    seed: u64,
) -> Result<InjectivityReport> {
    let required = tuple.dim() * tuple.dim() - 1;
    let fact = factorize(tuple)?;
    if fact.rank() != required {
        return Err(Error::RankDeficient {
            rank: fact.rank(),
            required,
        });
    }
    let tol = 1e-8;
    let mut violations = Vec::new();
    for trial in 0..trials {
        let mut rng = SeededRng::substream(seed, trial as u64);
        let psi = haar_sample(tuple.dim(), &mut rng)?;
        let phi = haar_sample(tuple.dim(), &mut rng)?;
        let alpha = std::f64::consts::TAU * rng.uniform();
        let shifted = PureState::new(
            psi.amplitudes()
                .iter()
                .map(|&z| z * Complex64::from_polar(1.0, alpha))
                .collect(),
        )?;

        for other in [&phi, &shifted] {
            let a = jnr_map(tuple, &psi)?;
            let b = jnr_map(tuple, other)?;
            let gap = a
                .iter()
                .zip(&b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            if gap <= tol {
                let overlap = psi.inner(other).norm();
                if (overlap - 1.0).abs() > tol {
                    violations.push(InjectivityViolation {
                        trial,
                        point_gap: gap,
                        overlap_deviation: (overlap - 1.0).abs(),
                    });
                }
            }
        }
    }
    Ok(InjectivityReport {
        rank: fact.rank(),
        condition_number: fact.condition_number(),
        trials,
        tolerance: tol,
        violations,
    })
}

/// CSV rows `x1,...,xm` at full double precision.
pub fn write_points_csv<W: Write>(points: &[Vec<f64>], w: &mut W) -> std::io::Result<()> {
    let m = points.first().map_or(0, Vec::len);
    let header: Vec<String> = (1..=m).map(|j| format!("x{j}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for p in points {
        let row: Vec<String> = p.iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
