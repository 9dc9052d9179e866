//! Quantum maps defined by Kraus operators: `Phi(a) = sum_i X_i a X_i*`.
//!
//! A tuple satisfying `sum_i X_i X_i* = 1` (an identity resolution) gives a
//! unital map; the dual condition `sum_i X_i* X_i = 1` gives a trace
//! preserving one. Unital maps shrink numerical ranges, which
//! [`verify_inclusion`] checks through support-function dominance.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jnr::{jnr_sample, jnr_support, HermitianTuple};
use crate::linalg::{ComplexMatrix, MatrixJson};
use crate::rng::SeededRng;
use crate::states::{random_isometry_columns, PureState};

/// Defect threshold for the unital / trace-preserving predicates.
pub const RESOLUTION_TOL: f64 = 1e-10;

/// A k-tuple of N x N Kraus operators.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidParameter(
                "channel needs at least one Kraus operator".into(),
            ));
        }
        let dim = kraus[0].rows();
        for (i, x) in kraus.iter().enumerate() {
            if x.rows() != dim || x.cols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {i} is {}x{}, expected {dim}x{dim}",
                    x.rows(),
                    x.cols()
                )));
            }
        }
        Ok(Self { dim, kraus })
    }

    /// Qubit decaying channel: `X_1 = diag(1, sqrt(1-p))`,
    /// `X_2 = sqrt(p) |0><1|`, for `p` in (0,1).
    pub fn decaying(p: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) || p == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "decaying channel needs p in (0,1), got {p}"
            )));
        }
        let c = Complex64::new;
        let x1 = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c((1.0 - p).sqrt(), 0.0)],
        ])?;
        let x2 = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(p.sqrt(), 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ])?;
        Self::new(vec![x1, x2])
    }

    /// Qubit phase-flip channel: `X_1 = sqrt(1-p) 1`, `X_2 = sqrt(p) sigma_1`,
    /// for `p` in (0,1).
    pub fn phase_flip(p: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) || p == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "phase-flip channel needs p in (0,1), got {p}"
            )));
        }
        let x1 = ComplexMatrix::identity(2).scale_re((1.0 - p).sqrt());
        let sigma1 = ComplexMatrix::from_real(&[vec![0.0, 1.0], vec![1.0, 0.0]])?;
        let x2 = sigma1.scale_re(p.sqrt());
        Self::new(vec![x1, x2])
    }

    /// Qutrit double-flip channel: identity with weight `1-p-q` plus the two
    /// bit-flip permutations with weights `p` and `q` (`p,q >= 0`,
    /// `p+q <= 1`).
    pub fn double_flip(p: f64, q: f64) -> Result<Self> {
        if p < 0.0 || q < 0.0 || p + q > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "double-flip channel needs p,q >= 0 with p+q <= 1, got p={p}, q={q}"
            )));
        }
        let x1 = ComplexMatrix::identity(3).scale_re((1.0 - p - q).sqrt());
        let swap01 = ComplexMatrix::from_real(&[
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])?;
        let swap12 = ComplexMatrix::from_real(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
        ])?;
        Self::new(vec![
            x1,
            swap01.scale_re(p.sqrt()),
            swap12.scale_re(q.sqrt()),
        ])
    }

    /// Unitary conjugation by the swap operator on C^2 (x) C^2.
    pub fn swap_conjugation() -> Self {
        Self::new(vec![swap_operator()]).expect("single unitary Kraus operator")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn len(&self) -> usize {
        self.kraus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kraus.is_empty()
    }

    /// `sum_i X_i a X_i*`.
    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.rows() != self.dim || a.cols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "argument is {}x{}, channel dimension is {}",
                a.rows(),
                a.cols(),
                self.dim
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for x in &self.kraus {
            out = out.add(&x.matmul(a)?.matmul(&x.adjoint())?)?;
        }
        Ok(out)
    }

    /// `Phi^times(a)`.
    pub fn iterate(&self, a: &ComplexMatrix, times: usize) -> Result<ComplexMatrix> {
        let mut out = a.clone();
        for _ in 0..times {
            out = self.apply(&out)?;
        }
        Ok(out)
    }

    /// The adjoint map with respect to the Hilbert-Schmidt product: Kraus
    /// list `(X_1*, ..., X_k*)`.
    pub fn adjoint_channel(&self) -> Self {
        Self {
            dim: self.dim,
            kraus: self.kraus.iter().map(ComplexMatrix::adjoint).collect(),
        }
    }

    /// Composition `self . inner` (apply `inner` first): Kraus products
    /// `X_self X_inner` over all pairs.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if self.dim != inner.dim {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose channels of dimension {} and {}",
                self.dim, inner.dim
            )));
        }
        let mut kraus = Vec::with_capacity(self.len() * inner.len());
        for a in &self.kraus {
            for b in &inner.kraus {
                kraus.push(a.matmul(b)?);
            }
        }
        Self::new(kraus)
    }

    /// Unital / trace-preserving predicates with their defects.
    pub fn analyze(&self) -> ChannelReport {
        let identity = ComplexMatrix::identity(self.dim);
        let mut forward = ComplexMatrix::zeros(self.dim, self.dim);
        let mut backward = ComplexMatrix::zeros(self.dim, self.dim);
        for x in &self.kraus {
            let adj = x.adjoint();
            forward = forward
                .add(&x.matmul(&adj).expect("square"))
                .expect("square");
            backward = backward
                .add(&adj.matmul(x).expect("square"))
                .expect("square");
        }
        let unital_defect = forward.max_abs_diff(&identity);
        let tp_defect = backward.max_abs_diff(&identity);
        ChannelReport {
            is_unital: unital_defect <= RESOLUTION_TOL,
            is_trace_preserving: tp_defect <= RESOLUTION_TOL,
            unital_defect,
            tp_defect,
        }
    }

    /// Image of a pure state as an explicit mixture:
    /// `Phi(|psi><psi|) = sum_i ||X_i psi||^2 |psi_i><psi_i|` with
    /// `psi_i = X_i psi / ||X_i psi||`, dropping terms with
    /// `||X_i psi|| <= 1e-14`.
    pub fn decompose_pure(&self, psi: &PureState) -> Result<PureDecomposition> {
        if psi.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "state dimension {} vs channel dimension {}",
                psi.dim(),
                self.dim
            )));
        }
        let mut weights = Vec::new();
        let mut states = Vec::new();
        for x in &self.kraus {
            let image = x.apply_vec(psi.amplitudes())?;
            let norm = image.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm <= 1e-14 {
                continue;
            }
            weights.push(norm * norm);
            states.push(PureState::normalized(image)?);
        }
        if weights.is_empty() {
            return Err(Error::AllTermsVanish);
        }
        Ok(PureDecomposition { weights, states })
    }

    /// Applies the channel to every operator of a Hermitian tuple.
    pub fn apply_tuple(&self, tuple: &HermitianTuple) -> Result<HermitianTuple> {
        let images: Result<Vec<ComplexMatrix>> =
            tuple.operators().iter().map(|a| self.apply(a)).collect();
        HermitianTuple::new(images?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&ChannelJson {
            dim: self.dim,
            kraus: self.kraus.iter().map(MatrixJson::from).collect(),
        })
        .expect("channel serialization cannot fail")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: ChannelJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let kraus: Result<Vec<ComplexMatrix>> =
            raw.kraus.into_iter().map(MatrixJson::into_matrix).collect();
        let channel = Self::new(kraus?)?;
        if channel.dim != raw.dim {
            return Err(Error::Parse(format!(
                "header dim {} does not match {}x{} Kraus operators",
                raw.dim, channel.dim, channel.dim
            )));
        }
        Ok(channel)
    }
}

/// The swap unitary on C^2 (x) C^2, exchanging the tensor factors.
pub fn swap_operator() -> ComplexMatrix {
    ComplexMatrix::from_real(&[
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
    ])
    .expect("constant matrix")
}

/// Built-in channels addressable by name, e.g. from a CLI flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuiltinChannel {
    Decaying { p: f64 },
    PhaseFlip { p: f64 },
    DoubleFlip { p: f64, q: f64 },
    SwapConjugation,
}

impl BuiltinChannel {
    pub fn build(self) -> Result<KrausChannel> {
        match self {
            BuiltinChannel::Decaying { p } => KrausChannel::decaying(p),
            BuiltinChannel::PhaseFlip { p } => KrausChannel::phase_flip(p),
            BuiltinChannel::DoubleFlip { p, q } => KrausChannel::double_flip(p, q),
            BuiltinChannel::SwapConjugation => Ok(KrausChannel::swap_conjugation()),
        }
    }

    /// Parses `name[:param[,param]]` specs such as `decaying:0.5`,
    /// `phase_flip:0.25`, `double_flip:0.5,0.4`, `swap_conjugation`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, params) = match spec.split_once(':') {
            Some((n, p)) => (n, p),
            None => (spec, ""),
        };
        let values: Vec<f64> = if params.is_empty() {
            Vec::new()
        } else {
            params
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("bad channel parameter '{s}': {e}")))
                })
                .collect::<Result<_>>()?
        };
        match (name, values.as_slice()) {
            ("decaying", [p]) => Ok(BuiltinChannel::Decaying { p: *p }),
            ("phase_flip", [p]) => Ok(BuiltinChannel::PhaseFlip { p: *p }),
            ("double_flip", [p, q]) => Ok(BuiltinChannel::DoubleFlip { p: *p, q: *q }),
            ("swap_conjugation", []) => Ok(BuiltinChannel::SwapConjugation),
            _ => Err(Error::Parse(format!("unknown channel spec '{spec}'"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    dim: usize,
    kraus: Vec<MatrixJson>,
}

/// Structural predicates of a channel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelReport {
    pub is_unital: bool,
    pub is_trace_preserving: bool,
    /// `|| sum X_i X_i* - 1 ||_max`
    pub unital_defect: f64,
    /// `|| sum X_i* X_i - 1 ||_max`
    pub tp_defect: f64,
}

/// Mixture representation of the image of a pure state.
#[derive(Debug, Clone)]
pub struct PureDecomposition {
    pub weights: Vec<f64>,
    pub states: Vec<PureState>,
}

impl PureDecomposition {
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `sum_i p_i |psi_i><psi_i|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.states[0].dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (w, s) in self.weights.iter().zip(&self.states) {
            let amp = s.amplitudes();
            for i in 0..n {
                for j in 0..n {
                    let add = amp[i] * amp[j].conj() * w;
                    out.set(i, j, out.get(i, j) + add);
                }
            }
        }
        out
    }
}

/// Random channel with independent Gaussian Kraus operators (no structure).
pub fn random_channel(dim: usize, k: usize, rng: &mut SeededRng) -> KrausChannel {
    let scale = 1.0 / ((dim * k) as f64).sqrt();
    let kraus = (0..k)
        .map(|_| {
            let entries = (0..dim * dim)
                .map(|_| {
                    let (x, y) = rng.normal_pair();
                    Complex64::new(x * scale, y * scale)
                })
                .collect();
            ComplexMatrix::new(dim, dim, entries).expect("finite gaussian entries")
        })
        .collect();
    KrausChannel::new(kraus).expect("k >= 1")
}

/// Random unital channel: the first block-column of a Haar unitary on
/// C^(dim*k), sliced into k blocks `B_i`, gives `X_i = B_i*` with
/// `sum_i X_i X_i* = 1` exactly (up to orthonormalization roundoff).
pub fn random_unital_channel(dim: usize, k: usize, rng: &mut SeededRng) -> KrausChannel {
    assert!(k >= 1);
    let cols = random_isometry_columns(dim * k, dim, rng);
    let mut kraus = Vec::with_capacity(k);
    for block in 0..k {
        let mut b = ComplexMatrix::zeros(dim, dim);
        for (j, col) in cols.iter().enumerate() {
            for i in 0..dim {
                b.set(i, j, col[block * dim + i]);
            }
        }
        kraus.push(b.adjoint());
    }
    KrausChannel::new(kraus).expect("k >= 1")
}

/// Random trace-preserving channel (the adjoint of a random unital one).
pub fn random_tp_channel(dim: usize, k: usize, rng: &mut SeededRng) -> KrausChannel {
    random_unital_channel(dim, k, rng).adjoint_channel()
}

/// Outcome of [`verify_inclusion`].
#[derive(Debug, Clone, Serialize)]
pub struct InclusionReport {
    pub directions_checked: usize,
    pub samples_checked: usize,
    pub tolerance: f64,
    /// Largest value of `h_image(u) - h_source(u)` over all checks (negative
    /// when the image range sits strictly inside).
    pub max_violation: f64,
    pub violations: usize,
    pub hypothesis_defects: ChannelReport,
}

impl InclusionReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks that a unital channel shrinks the joint numerical range:
/// `h_{Phi(tuple)}(u) <= h_tuple(u) + 1e-8` over random unit directions, and
/// sampled image points stay inside the source hull. Refuses non-unital
/// channels, for which the inclusion has no reason to hold.
pub fn verify_inclusion(
    channel: &KrausChannel,
    tuple: &HermitianTuple,
    directions: usize,
    samples: usize,
    seed: u64,
) -> Result<InclusionReport> {
    let defects = channel.analyze();
    if defects.unital_defect > RESOLUTION_TOL {
        return Err(Error::NotUnital {
            defect: defects.unital_defect,
        });
    }
    let tol = 1e-8;
    let image = channel.apply_tuple(tuple)?;
    let mut dir_rng = SeededRng::new(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut max_violation = f64::NEG_INFINITY;
    let mut violations = 0usize;
    let mut checked_dirs = Vec::with_capacity(directions);
    for _ in 0..directions {
        let u = dir_rng.unit_direction(tuple.len());
        let h_src = jnr_support(tuple, &u)?;
        let h_img = jnr_support(&image, &u)?;
        let gap = h_img - h_src;
        max_violation = max_violation.max(gap);
        if gap > tol {
            violations += 1;
        }
        checked_dirs.push((u, h_src));
    }
    let mut samples_checked = 0;
    if samples > 0 {
        for point in jnr_sample(&image, samples, seed, 1)? {
            samples_checked += 1;
            for (u, h_src) in &checked_dirs {
                let dot: f64 = u.iter().zip(&point).map(|(a, b)| a * b).sum();
                let gap = dot - h_src;
                max_violation = max_violation.max(gap);
                if gap > tol {
                    violations += 1;
                }
            }
        }
    }
    Ok(InclusionReport {
        directions_checked: directions,
        samples_checked,
        tolerance: tol,
        max_violation,
        violations,
        hypothesis_defects: defects,
    })
}
