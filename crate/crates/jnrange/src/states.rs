//! Pure and mixed quantum states, Haar sampling on the unit sphere, and
//! Bloch-vector decompositions over traceless orthogonal operator bases.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, MatrixJson, HERMITIAN_TOL};
use crate::rng::SeededRng;

/// Unit vector in C^N.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Accepts an already-normalized amplitude vector (norm within 1e-12 of 1).
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidParameter(
                "state needs at least one amplitude".into(),
            ));
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        let defect = (norm_sq - 1.0).abs();
        if defect > 1e-12 {
            return Err(Error::NotNormalized { defect });
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq.sqrt() < 1e-12 {
            return Err(Error::ZeroVector);
        }
        let inv = 1.0 / norm_sq.sqrt();
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z * inv).collect(),
        })
    }

    /// Computational basis vector `|index>`.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(&a, &b)| a.conj() * b)
            .sum()
    }
}

/// Positive trace-one Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-12), unit trace (1e-12), and positivity
    /// (minimum eigenvalue at least -1e-10).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotDensity("matrix is not square".into()));
        }
        let h = matrix.hermitian_defect();
        if h > HERMITIAN_TOL {
            return Err(Error::NotDensity(format!("hermitian defect {h:.3e}")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::NotDensity(format!("trace {tr} is not 1")));
        }
        let eig = matrix.hermitian_eigen()?;
        if eig.lambda_min() < -1e-10 {
            return Err(Error::NotDensity(format!(
                "minimum eigenvalue {:.3e} is negative",
                eig.lambda_min()
            )));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// The two scalings in use for Bloch coordinates over a traceless orthogonal
/// basis `lambda_1, ..., lambda_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlochConvention {
    /// Expansion coefficients: `tau_j = tr(rho lambda_j) / tr(lambda_j^2)`,
    /// so `rho = I/N + sum_j tau_j lambda_j`. Pure qubits have `||tau|| = 1/2`.
    Coefficient,
    /// Raw expectation values: `tau_j = tr(rho lambda_j)`. Pure qubits have
    /// `||tau|| = 1`.
    Expectation,
}

/// Real coordinate vector of a state in an operator basis, tagged with the
/// normalization that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochVector {
    pub components: Vec<f64>,
    pub convention: BlochConvention,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        self.components.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Rank-one projector `|psi><psi|`.
pub fn projector(psi: &PureState) -> DensityMatrix {
    let n = psi.dim();
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, psi.amplitudes[i] * psi.amplitudes[j].conj());
        }
    }
    // Exact by construction: Hermitian, trace = |psi|^2 = 1, rank one.
    DensityMatrix { matrix: m }
}

/// Draws a Haar-distributed unit vector: N independent complex Gaussian
/// amplitudes, normalized. Rotation invariance of the Gaussian makes the
/// result exactly Fubini-Study distributed.
pub fn haar_sample(dim: usize, rng: &mut SeededRng) -> Result<PureState> {
    if dim == 0 {
        return Err(Error::InvalidParameter(
            "dimension must be at least 1".into(),
        ));
    }
    loop {
        let mut amplitudes = Vec::with_capacity(dim);
        for _ in 0..dim {
            let (x, y) = rng.normal_pair();
            amplitudes.push(Complex64::new(x, y));
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq > 1e-280 {
            let inv = 1.0 / norm_sq.sqrt();
            for z in &mut amplitudes {
                *z *= inv;
            }
            return Ok(PureState { amplitudes });
        }
    }
}

/// Haar-random unitary: Gram-Schmidt applied to a square complex Gaussian
/// matrix (QR with positive diagonal).
pub fn random_unitary(dim: usize, rng: &mut SeededRng) -> ComplexMatrix {
    let cols = random_isometry_columns(dim, dim, rng);
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            u.set(i, j, v);
        }
    }
    u
}

/// `count` orthonormal columns in C^rows, distributed as the leading columns
/// of a Haar unitary. Gram-Schmidt with one re-orthogonalization pass.
pub(crate) fn random_isometry_columns(
    rows: usize,
    count: usize,
    rng: &mut SeededRng,
) -> Vec<Vec<Complex64>> {
    assert!(count <= rows);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(count);
    while basis.len() < count {
        let mut v: Vec<Complex64> = (0..rows)
            .map(|_| {
                let (x, y) = rng.normal_pair();
                Complex64::new(x, y)
            })
            .collect();
        for _ in 0..2 {
            for e in &basis {
                let coeff: Complex64 = e.iter().zip(&v).map(|(&ei, &vi)| ei.conj() * vi).sum();
                for (vi, &ei) in v.iter_mut().zip(e) {
                    *vi -= coeff * ei;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue; // essentially dependent draw; try again
        }
        for z in &mut v {
            *z /= norm;
        }
        basis.push(v);
    }
    basis
}

/// Random Hermitian matrix: `(G + G*)/2` for a complex Gaussian `G`.
pub fn random_hermitian(dim: usize, rng: &mut SeededRng) -> ComplexMatrix {
    let mut g = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let (x, y) = rng.normal_pair();
            g.set(i, j, Complex64::new(x, y));
        }
    }
    let adj = g.adjoint();
    g.add(&adj).expect("same shape").scale_re(0.5)
}

/// The three Pauli matrices.
pub fn pauli_basis() -> Vec<ComplexMatrix> {
    let c = Complex64::new;
    vec![
        ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap(),
        ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap(),
        ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
        ])
        .unwrap(),
    ]
}

/// The eight Gell-Mann matrices, normalized so that `tr(l_j l_k) = 2 d_jk`.
pub fn gellmann_basis() -> Vec<ComplexMatrix> {
    traceless_orthogonal_basis(3).expect("dimension 3 is valid")
}

/// Traceless Hermitian basis of su(N): symmetric pairs, antisymmetric pairs,
/// and the diagonal ladder, ordered so that each dimension's generators come
/// before the next diagonal rung. Satisfies `tr(l_j l_k) = 2 d_jk`; reduces
/// to the Pauli (N=2) and Gell-Mann (N=3) matrices.
pub fn traceless_orthogonal_basis(dim: usize) -> Result<Vec<ComplexMatrix>> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!(
            "operator basis needs dimension >= 2, got {dim}"
        )));
    }
    let mut basis = Vec::with_capacity(dim * dim - 1);
    for k in 1..dim {
        for j in 0..k {
            let mut sym = ComplexMatrix::zeros(dim, dim);
            sym.set(j, k, Complex64::new(1.0, 0.0));
            sym.set(k, j, Complex64::new(1.0, 0.0));
            basis.push(sym);

            let mut anti = ComplexMatrix::zeros(dim, dim);
            anti.set(j, k, Complex64::new(0.0, -1.0));
            anti.set(k, j, Complex64::new(0.0, 1.0));
            basis.push(anti);
        }
        let scale = (2.0 / (k as f64 * (k as f64 + 1.0))).sqrt();
        let mut diag = ComplexMatrix::zeros(dim, dim);
        for i in 0..k {
            diag.set(i, i, Complex64::new(scale, 0.0));
        }
        diag.set(k, k, Complex64::new(-(k as f64) * scale, 0.0));
        basis.push(diag);
    }
    Ok(basis)
}

fn validate_bloch_basis(dim: usize, basis: &[ComplexMatrix]) -> Result<()> {
    if basis.is_empty() {
        return Err(Error::InvalidBasis("basis is empty".into()));
    }
    for (j, op) in basis.iter().enumerate() {
        if op.rows() != dim || op.cols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "basis operator {j} is {}x{}, state dimension is {dim}",
                op.rows(),
                op.cols()
            )));
        }
        if op.hermitian_defect() > HERMITIAN_TOL {
            return Err(Error::InvalidBasis(format!(
                "operator {j} is not hermitian"
            )));
        }
        if op.trace().norm() > 1e-10 {
            return Err(Error::InvalidBasis(format!(
                "operator {j} is not traceless"
            )));
        }
    }
    for j in 0..basis.len() {
        for k in (j + 1)..basis.len() {
            let g = basis[j].hs_inner(&basis[k])?;
            if g.norm() > 1e-10 {
                return Err(Error::InvalidBasis(format!(
                    "operators {j} and {k} are not orthogonal (inner product {g})"
                )));
            }
        }
    }
    Ok(())
}

/// Coordinates of `rho` in a traceless orthogonal Hermitian basis.
pub fn bloch_decompose(
    rho: &DensityMatrix,
    basis: &[ComplexMatrix],
    convention: BlochConvention,
) -> Result<BlochVector> {
    validate_bloch_basis(rho.dim(), basis)?;
    let mut components = Vec::with_capacity(basis.len());
    for op in basis {
        let raw = rho.matrix().hs_inner(op)?.re;
        let tau = match convention {
            BlochConvention::Expectation => raw,
            BlochConvention::Coefficient => raw / op.hs_inner(op)?.re,
        };
        components.push(tau);
    }
    Ok(BlochVector {
        components,
        convention,
    })
}

/// Inverse of [`bloch_decompose`]: `I/N + sum_j c_j lambda_j` with the
/// coefficients `c_j` inferred from the vector's convention.
pub fn bloch_reconstruct(tau: &BlochVector, basis: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    if tau.components.len() != basis.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} components vs {} basis operators",
            tau.components.len(),
            basis.len()
        )));
    }
    if basis.is_empty() {
        return Err(Error::InvalidBasis("basis is empty".into()));
    }
    let n = basis[0].rows();
    let mut out = ComplexMatrix::identity(n).scale_re(1.0 / n as f64);
    for (j, op) in basis.iter().enumerate() {
        let coeff = match tau.convention {
            BlochConvention::Coefficient => tau.components[j],
            BlochConvention::Expectation => tau.components[j] / op.hs_inner(op)?.re,
        };
        out = out.add(&op.scale_re(coeff))?;
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    kind: String,
    #[serde(flatten)]
    matrix: MatrixJson,
}

/// Serializes a pure state as an N x 1 column with `"kind": "state"`.
pub fn pure_state_to_json(psi: &PureState) -> String {
    let col = ComplexMatrix::new(psi.dim(), 1, psi.amplitudes.to_vec()).expect("valid column");
    serde_json::to_string(&StateJson {
        kind: "state".into(),
        matrix: MatrixJson::from(&col),
    })
    .expect("state serialization cannot fail")
}

pub fn pure_state_from_json(text: &str) -> Result<PureState> {
    let raw: StateJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if raw.kind != "state" {
        return Err(Error::Parse(format!(
            "expected kind 'state', got '{}'",
            raw.kind
        )));
    }
    let m = raw.matrix.into_matrix()?;
    if m.cols() != 1 {
        return Err(Error::Parse("pure state must be a single column".into()));
    }
    PureState::new(m.entries().to_vec())
}

/// Serializes a density matrix with `"kind": "density"`.
pub fn density_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string(&StateJson {
        kind: "density".into(),
        matrix: MatrixJson::from(rho.matrix()),
    })
    .expect("density serialization cannot fail")
}

pub fn density_from_json(text: &str) -> Result<DensityMatrix> {
    let raw: StateJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if raw.kind != "density" {
        return Err(Error::Parse(format!(
            "expected kind 'density', got '{}'",
            raw.kind
        )));
    }
    DensityMatrix::new(raw.matrix.into_matrix()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn projector_basis_state() {
        let rho = projector(&PureState::basis_state(2, 0));
        let expect = ComplexMatrix::from_real(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(rho.matrix().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn projector_uniform_superposition() {
        let inv = 1.0 / 2.0f64.sqrt();
        let psi = PureState::new(vec![c(inv, 0.0), c(inv, 0.0)]).unwrap();
        let rho = projector(&psi);
        let expect = ComplexMatrix::from_real(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!(rho.matrix().max_abs_diff(&expect) < 1e-15);
        // idempotent: rho^2 = rho
        let sq = rho.matrix().matmul(rho.matrix()).unwrap();
        assert!(sq.max_abs_diff(rho.matrix()) < 1e-10);
    }

    #[test]
    fn projector_ignores_global_phase() {
        let mut rng = SeededRng::new(8);
        let psi = haar_sample(3, &mut rng).unwrap();
        let phase = Complex64::from_polar(1.0, 1.234);
        let rotated =
            PureState::new(psi.amplitudes().iter().map(|&z| z * phase).collect()).unwrap();
        assert!(
            projector(&rotated)
                .matrix()
                .max_abs_diff(projector(&psi).matrix())
                < 1e-14
        );
    }

    #[test]
    fn normalized_rejects_zero_vector() {
        assert!(matches!(
            PureState::normalized(vec![c(0.0, 0.0), c(0.0, 0.0)]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn haar_dim_one_is_pure_phase() {
        let mut rng = SeededRng::new(1);
        for _ in 0..20 {
            let psi = haar_sample(1, &mut rng).unwrap();
            assert!((psi.amplitudes()[0].norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn haar_is_deterministic_per_seed() {
        let a = haar_sample(4, &mut SeededRng::new(33)).unwrap();
        let b = haar_sample(4, &mut SeededRng::new(33)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn haar_first_component_moment() {
        // E |psi_1|^2 = 1/2 for dim 2; binomial-style MC bound.
        let n = 100_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for i in 0..n {
            let mut rng = SeededRng::substream(7, i);
            let psi = haar_sample(2, &mut rng).unwrap();
            let v = psi.amplitudes()[0].norm_sqr();
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / n as f64;
        let var = (sum_sq / n as f64 - mean * mean).max(0.0);
        let sigma = (var / n as f64).sqrt();
        assert!(
            (mean - 0.5).abs() <= 3.0 * sigma,
            "mean {mean}, sigma {sigma}"
        );
    }

    #[test]
    fn haar_mean_projector_is_maximally_mixed() {
        let n = 100_000usize;
        let dim = 3;
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for i in 0..n {
            let mut rng = SeededRng::substream(11, i as u64);
            let rho = projector(&haar_sample(dim, &mut rng).unwrap());
            acc = acc.add(rho.matrix()).unwrap();
        }
        let mean = acc.scale_re(1.0 / n as f64);
        let target = ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64);
        // Entrywise MC standard error is at most ~1/sqrt(n).
        let four_sigma = 4.0 / (n as f64).sqrt();
        assert!(
            mean.max_abs_diff(&target) <= four_sigma,
            "deviation {} vs bound {}",
            mean.max_abs_diff(&target),
            four_sigma
        );
    }

    #[test]
    fn haar_unitary_invariance_of_moments() {
        // First and second moments of U psi match those of psi within 4 MC
        // standard errors.
        let n = 100_000usize;
        let dim = 2;
        let u = random_unitary(dim, &mut SeededRng::new(99));
        let mut mean_direct = ComplexMatrix::zeros(dim, dim);
        let mut mean_rotated = ComplexMatrix::zeros(dim, dim);
        let mut first_direct = vec![Complex64::new(0.0, 0.0); dim];
        let mut first_rotated = vec![Complex64::new(0.0, 0.0); dim];
        for i in 0..n {
            let psi = haar_sample(dim, &mut SeededRng::substream(21, i as u64)).unwrap();
            let rotated = PureState::new(u.apply_vec(psi.amplitudes()).unwrap()).unwrap();
            mean_direct = mean_direct.add(projector(&psi).matrix()).unwrap();
            mean_rotated = mean_rotated.add(projector(&rotated).matrix()).unwrap();
            for d in 0..dim {
                first_direct[d] += psi.amplitudes()[d];
                first_rotated[d] += rotated.amplitudes()[d];
            }
        }
        let four_sigma = 4.0 / (n as f64).sqrt();
        let gap = mean_direct
            .scale_re(1.0 / n as f64)
            .max_abs_diff(&mean_rotated.scale_re(1.0 / n as f64));
        assert!(gap <= four_sigma, "second-moment gap {gap}");
        for d in 0..dim {
            let a = first_direct[d] / n as f64;
            let b = first_rotated[d] / n as f64;
            assert!((a - b).norm() <= four_sigma);
        }
    }

    #[test]
    fn pauli_basis_matches_construction() {
        let explicit = pauli_basis();
        let constructed = traceless_orthogonal_basis(2).unwrap();
        for (a, b) in explicit.iter().zip(&constructed) {
            assert!(a.max_abs_diff(b) < 1e-15);
        }
    }

    #[test]
    fn gellmann_gram_matrix() {
        let basis = gellmann_basis();
        assert_eq!(basis.len(), 8);
        for (j, a) in basis.iter().enumerate() {
            for (k, b) in basis.iter().enumerate() {
                let g = a.hs_inner(b).unwrap();
                let expect = if j == k { 2.0 } else { 0.0 };
                assert!((g.re - expect).abs() < 1e-14 && g.im.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn gellmann_explicit_matrices_spot_check() {
        let basis = gellmann_basis();
        // lambda_4 couples levels 1 and 3.
        let mut l4 = ComplexMatrix::zeros(3, 3);
        l4.set(0, 2, c(1.0, 0.0));
        l4.set(2, 0, c(1.0, 0.0));
        assert!(basis[3].max_abs_diff(&l4) < 1e-15);
        // lambda_8 = diag(1,1,-2)/sqrt(3).
        let s = 1.0 / 3.0f64.sqrt();
        let l8 = ComplexMatrix::from_real(&[
            vec![s, 0.0, 0.0],
            vec![0.0, s, 0.0],
            vec![0.0, 0.0, -2.0 * s],
        ])
        .unwrap();
        assert!(basis[7].max_abs_diff(&l8) < 1e-15);
    }

    #[test]
    fn generalized_basis_properties() {
        for dim in [2usize, 3, 4, 5] {
            let basis = traceless_orthogonal_basis(dim).unwrap();
            assert_eq!(basis.len(), dim * dim - 1);
            for (j, a) in basis.iter().enumerate() {
                assert!(a.trace().norm() < 1e-14);
                assert!(a.hermitian_defect() < 1e-15);
                for (k, b) in basis.iter().enumerate() {
                    let g = a.hs_inner(b).unwrap().re;
                    let expect = if j == k { 2.0 } else { 0.0 };
                    assert!((g - expect).abs() < 1e-13);
                }
            }
        }
        assert!(traceless_orthogonal_basis(1).is_err());
    }

    #[test]
    fn bloch_decompose_maximally_mixed() {
        let rho = DensityMatrix::new(ComplexMatrix::identity(2).scale_re(0.5)).unwrap();
        let tau = bloch_decompose(&rho, &pauli_basis(), BlochConvention::Coefficient).unwrap();
        assert!(tau.norm() < 1e-14);
    }

    #[test]
    fn bloch_decompose_basis_state_both_conventions() {
        let rho = projector(&PureState::basis_state(2, 0));
        let coeff = bloch_decompose(&rho, &pauli_basis(), BlochConvention::Coefficient).unwrap();
        assert!((coeff.components[0]).abs() < 1e-14);
        assert!((coeff.components[1]).abs() < 1e-14);
        assert!((coeff.components[2] - 0.5).abs() < 1e-14);
        assert!((coeff.norm() - 0.5).abs() < 1e-12);

        let expect = bloch_decompose(&rho, &pauli_basis(), BlochConvention::Expectation).unwrap();
        assert!((expect.components[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bloch_roundtrip_identity() {
        let mut rng = SeededRng::new(17);
        for dim in [2usize, 3] {
            let basis = traceless_orthogonal_basis(dim).unwrap();
            for _ in 0..10 {
                let rho = projector(&haar_sample(dim, &mut rng).unwrap());
                let tau = bloch_decompose(&rho, &basis, BlochConvention::Coefficient).unwrap();
                let back = bloch_reconstruct(&tau, &basis).unwrap();
                assert!(back.max_abs_diff(rho.matrix()) <= 1e-10);
            }
        }
    }

    #[test]
    fn bloch_pure_states_sit_on_the_half_sphere() {
        // 10^4 Haar qubit states: the coefficient-convention norm is 1/2.
        for i in 0..10_000u64 {
            let psi = haar_sample(2, &mut SeededRng::substream(400, i)).unwrap();
            let tau = bloch_decompose(
                &projector(&psi),
                &pauli_basis(),
                BlochConvention::Coefficient,
            )
            .unwrap();
            assert!(
                (tau.norm() - 0.5).abs() <= 1e-10,
                "norm {} at sample {i}",
                tau.norm()
            );
        }
    }

    #[test]
    fn bloch_rejects_bad_bases() {
        let rho = DensityMatrix::new(ComplexMatrix::identity(2).scale_re(0.5)).unwrap();
        // Not traceless.
        let bad = vec![ComplexMatrix::identity(2)];
        assert!(matches!(
            bloch_decompose(&rho, &bad, BlochConvention::Coefficient),
            Err(Error::InvalidBasis(_))
        ));
        // Not orthogonal.
        let p = pauli_basis();
        let bad = vec![p[0].clone(), p[0].clone()];
        assert!(matches!(
            bloch_decompose(&rho, &bad, BlochConvention::Coefficient),
            Err(Error::InvalidBasis(_))
        ));
    }

    #[test]
    fn density_validation_rejects_junk() {
        // Wrong trace.
        assert!(DensityMatrix::new(ComplexMatrix::identity(2)).is_err());
        // Negative eigenvalue.
        let m = ComplexMatrix::from_real(&[vec![1.5, 0.0], vec![0.0, -0.5]]).unwrap();
        assert!(DensityMatrix::new(m).is_err());
        // Not Hermitian.
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.5, 0.0), c(0.1, 0.0)],
            vec![c(0.3, 0.0), c(0.5, 0.0)],
        ])
        .unwrap();
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = SeededRng::new(3);
        for dim in [2usize, 3, 5] {
            let u = random_unitary(dim, &mut rng);
            let gram = u.adjoint().matmul(&u).unwrap();
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(dim)) < 1e-12);
        }
    }

    #[test]
    fn state_json_roundtrips_and_checks_kind() {
        let mut rng = SeededRng::new(55);
        let psi = haar_sample(3, &mut rng).unwrap();
        let text = pure_state_to_json(&psi);
        let back = pure_state_from_json(&text).unwrap();
        assert!(back
            .amplitudes()
            .iter()
            .zip(psi.amplitudes())
            .all(|(a, b)| (a - b).norm() < 1e-15));
        assert!(pure_state_from_json(&density_to_json(&projector(&psi))).is_err());

        let rho = projector(&psi);
        let back = density_from_json(&density_to_json(&rho)).unwrap();
        assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }
}
