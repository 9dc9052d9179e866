//! Joint numerical shadows: the push-forward of the Haar measure on pure
//! states under the joint numerical range map, estimated by Monte Carlo.
//!
//! Shadows are kept as raw sample clouds. The underlying density is singular
//! whenever the range is a lower-dimensional set (the qubit sphere, for
//! instance), so histograms and moment tables are derived views rather than
//! the primary representation.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jnr::{jnr_map, jnr_sample, HermitianTuple};
use crate::linalg::ComplexMatrix;
use crate::rng::{parallel_map_indexed, SeededRng};
use crate::states::{
    bloch_decompose, haar_sample, pauli_basis, projector, BlochConvention, DensityMatrix, PureState,
};

/// 99.9% critical value of the chi-square distribution with 7 degrees of
/// freedom (8 equal-probability cells).
pub const CHI2_CRIT_99_9_DF7: f64 = 24.321886347856854;

/// 99.9% point of the asymptotic Kolmogorov distribution; the critical KS
/// statistic for n samples is this value divided by sqrt(n).
pub const KS_COEFF_99_9: f64 = 1.949474603504375;

/// Monte-Carlo sample cloud of a joint numerical shadow in R^m.
#[derive(Debug, Clone)]
pub struct ShadowEstimate {
    dimension_m: usize,
    samples: Vec<Vec<f64>>,
    seed: u64,
    sample_count: usize,
}

impl ShadowEstimate {
    pub fn dimension(&self) -> usize {
        self.dimension_m
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        crate::jnr::write_points_csv(&self.samples, w)
    }
}

/// Samples the shadow of a Hermitian tuple: range-map images of independent
/// Haar states, one substream per sample index.
pub fn estimate_shadow(
    tuple: &HermitianTuple,
    count: usize,
    seed: u64,
    workers: usize,
) -> Result<ShadowEstimate> {
    let samples = jnr_sample(tuple, count, seed, workers)?;
    Ok(ShadowEstimate {
        dimension_m: tuple.len(),
        samples,
        seed,
        sample_count: count,
    })
}

/// Shadow of a single complex matrix, realized as the m = 2 shadow of its
/// Hermitian and anti-Hermitian parts (`a = h + i k`).
pub fn estimate_shadow_complex(
    a: &ComplexMatrix,
    count: usize,
    seed: u64,
    workers: usize,
) -> Result<ShadowEstimate> {
    let (h, k) = a.hermitian_parts()?;
    let tuple = HermitianTuple::new(vec![h, k])?;
    estimate_shadow(&tuple, count, seed, workers)
}

/// One estimated moment with its Monte-Carlo standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentEntry {
    pub estimate: f64,
    pub std_error: f64,
}

/// Mixed moments `E[x_1^{k_1} ... x_m^{k_m}]` indexed by multi-index.
#[derive(Debug, Clone)]
pub struct MomentTable {
    dimension_m: usize,
    entries: BTreeMap<Vec<u32>, MomentEntry>,
}

impl MomentTable {
    pub fn dimension(&self) -> usize {
        self.dimension_m
    }

    pub fn get(&self, index: &[u32]) -> Option<MomentEntry> {
        self.entries.get(index).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u32>, &MomentEntry)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// CSV rows `k1,...,km,estimate,std_error`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        let header: Vec<String> = (1..=self.dimension_m).map(|j| format!("k{j}")).collect();
        writeln!(w, "{},estimate,std_error", header.join(","))?;
        for (index, entry) in &self.entries {
            let ks: Vec<String> = index.iter().map(u32::to_string).collect();
            writeln!(
                w,
                "{},{:.16e},{:.16e}",
                ks.join(","),
                entry.estimate,
                entry.std_error
            )?;
        }
        Ok(())
    }
}

fn multi_indices(m: usize, max_total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; m];
    fn recurse(axis: usize, remaining: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if axis == current.len() {
            out.push(current.clone());
            return;
        }
        for k in 0..=remaining {
            current[axis] = k;
            recurse(axis + 1, remaining - k, current, out);
        }
        current[axis] = 0;
    }
    recurse(0, max_total, &mut current, &mut out);
    out
}

/// Empirical moments for every multi-index of total degree at most
/// `max_total_degree`.
pub fn moments(estimate: &ShadowEstimate, max_total_degree: u32) -> MomentTable {
    let m = estimate.dimension_m;
    let n = estimate.sample_count as f64;
    let mut entries = BTreeMap::new();
    for index in multi_indices(m, max_total_degree) {
        if index.iter().all(|&k| k == 0) {
            // The zero moment of a probability measure is identically 1.
            entries.insert(
                index,
                MomentEntry {
                    estimate: 1.0,
                    std_error: 0.0,
                },
            );
            continue;
        }
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for sample in &estimate.samples {
            let mut v = 1.0;
            for (x, &k) in sample.iter().zip(&index) {
                if k > 0 {
                    v *= x.powi(k as i32);
                }
            }
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / n;
        let std_error = if estimate.sample_count > 1 {
            let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        entries.insert(
            index,
            MomentEntry {
                estimate: mean,
                std_error,
            },
        );
    }
    MomentTable {
        dimension_m: m,
        entries,
    }
}

/// Dense histogram over a rectangular grid (at most 3 axes).
#[derive(Debug, Clone)]
pub struct Histogram {
    pub bounds: Vec<(f64, f64)>,
    pub bins_per_axis: usize,
    /// Row-major counts, the first axis slowest.
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Histogram {
    /// Counts projected onto one axis.
    pub fn marginal(&self, axis: usize) -> Vec<u64> {
        let m = self.bounds.len();
        assert!(axis < m);
        let b = self.bins_per_axis;
        let mut out = vec![0u64; b];
        for (flat, &count) in self.counts.iter().enumerate() {
            let mut rest = flat;
            let mut idx = 0;
            for a in 0..m {
                let stride = b.pow((m - 1 - a) as u32);
                let i = rest / stride;
                rest %= stride;
                if a == axis {
                    idx = i;
                }
            }
            out[idx] += count;
        }
        out
    }

    /// JSON document `{"bounds": ..., "bins": ..., "counts": ...}`.
    pub fn to_json_string(&self) -> String {
        #[derive(Serialize)]
        struct HistogramJson<'a> {
            bounds: &'a [(f64, f64)],
            bins: usize,
            counts: &'a [u64],
        }
        serde_json::to_string(&HistogramJson {
            bounds: &self.bounds,
            bins: self.bins_per_axis,
            counts: &self.counts,
        })
        .expect("histogram serialization cannot fail")
    }
}

/// Bins the samples on a rectangular grid. Default bounds are the sample
/// bounding box inflated by 1e-9 per side; with explicit bounds, samples
/// falling outside are dropped (and `total` counts only the binned ones).
pub fn histogram(
    estimate: &ShadowEstimate,
    bins_per_axis: usize,
    bounds: Option<Vec<(f64, f64)>>,
) -> Result<Histogram> {
    let m = estimate.dimension_m;
    if m > 3 {
        return Err(Error::TooManyAxes(m));
    }
    if bins_per_axis == 0 {
        return Err(Error::InvalidParameter(
            "bins_per_axis must be at least 1".into(),
        ));
    }
    let cells = bins_per_axis
        .checked_pow(m as u32)
        .filter(|&c| c <= 1 << 24)
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "{bins_per_axis}^{m} histogram cells exceed the dense-storage budget"
            ))
        })?;
    let bounds = match bounds {
        Some(b) => {
            if b.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "{} bound pairs for {} axes",
                    b.len(),
                    m
                )));
            }
            for &(lo, hi) in &b {
                if lo >= hi {
                    return Err(Error::InvalidParameter(format!(
                        "empty bound interval [{lo}, {hi}]"
                    )));
                }
            }
            b
        }
        None => (0..m)
            .map(|j| {
                let lo = estimate
                    .samples
                    .iter()
                    .map(|s| s[j])
                    .fold(f64::INFINITY, f64::min);
                let hi = estimate
                    .samples
                    .iter()
                    .map(|s| s[j])
                    .fold(f64::NEG_INFINITY, f64::max);
                (lo - 1e-9, hi + 1e-9)
            })
            .collect(),
    };
    let mut counts = vec![0u64; cells];
    let mut total = 0u64;
    'samples: for sample in &estimate.samples {
        let mut flat = 0usize;
        for (j, &x) in sample.iter().enumerate() {
            let (lo, hi) = bounds[j];
            if x < lo || x > hi {
                continue 'samples;
            }
            let frac = (x - lo) / (hi - lo);
            let idx = ((frac * bins_per_axis as f64) as usize).min(bins_per_axis - 1);
            flat = flat * bins_per_axis + idx;
        }
        counts[flat] += 1;
        total += 1;
    }
    Ok(Histogram {
        bounds,
        bins_per_axis,
        counts,
        total,
    })
}

/// Push-forward under `v -> a v`: every sample scaled in place.
pub fn scale_pushforward(estimate: &ShadowEstimate, a: f64) -> ShadowEstimate {
    ShadowEstimate {
        dimension_m: estimate.dimension_m,
        samples: estimate
            .samples
            .iter()
            .map(|s| s.iter().map(|x| a * x).collect())
            .collect(),
        seed: estimate.seed,
        sample_count: estimate.sample_count,
    }
}

/// Empirical convolution: sums of independently resampled pairs (with
/// replacement), one per output sample. The output count is the smaller of
/// the two input counts.
///
/// Note that convolving the shadows of two tuples is not the shadow of the
/// entrywise sum of the tuples: the summed tuple evaluates both operator
/// families at the *same* random state, while the convolution draws two
/// independent states. Already `nu_{2A} != nu_A * nu_A` unless the shadow is
/// a point mass. The convolution is offered as a distributional utility, not
/// as an identity about tuple arithmetic.
pub fn convolve(e1: &ShadowEstimate, e2: &ShadowEstimate, seed: u64) -> Result<ShadowEstimate> {
    if e1.dimension_m != e2.dimension_m {
        return Err(Error::DimensionMismatch(format!(
            "convolution needs equal dimensions, got {} and {}",
            e1.dimension_m, e2.dimension_m
        )));
    }
    let count = e1.sample_count.min(e2.sample_count);
    let mut rng = SeededRng::new(seed);
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let a = &e1.samples[rng.below(e1.sample_count as u64) as usize];
        let b = &e2.samples[rng.below(e2.sample_count as u64) as usize];
        samples.push(a.iter().zip(b).map(|(x, y)| x + y).collect());
    }
    Ok(ShadowEstimate {
        dimension_m: e1.dimension_m,
        samples,
        seed,
        sample_count: count,
    })
}

/// Outcome of [`unitary_invariance_check`].
#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub sample_count: usize,
    pub degree: u32,
    pub moments_compared: usize,
    pub worst_index: Vec<u32>,
    /// Largest `|difference| / (5 combined std errors)`; at most 1 on a pass.
    pub worst_ratio: f64,
    pub pass: bool,
}

/// Compares the moment tables of a tuple and its unitary conjugate
/// `(U A_1 U*, ..., U A_m U*)`, sampled with independent seeds. The shadows
/// agree in distribution, so every moment pair must match within five
/// combined standard errors.
pub fn unitary_invariance_check(
    tuple: &HermitianTuple,
    u: &ComplexMatrix,
    count: usize,
    degree: u32,
    seeds: (u64, u64),
    workers: usize,
) -> Result<InvarianceReport> {
    let n = tuple.dim();
    if u.rows() != n || u.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "unitary is {}x{}, tuple dimension is {n}",
            u.rows(),
            u.cols()
        )));
    }
    let gram = u.adjoint().matmul(u)?;
    let defect = gram.max_abs_diff(&ComplexMatrix::identity(n));
    if defect > 1e-10 {
        return Err(Error::NotUnitary { defect });
    }
    let u_adj = u.adjoint();
    let conjugated: Result<Vec<ComplexMatrix>> = tuple
        .operators()
        .iter()
        .map(|a| u.matmul(a)?.matmul(&u_adj))
        .collect();
    let conj_tuple = HermitianTuple::new(conjugated?)?;

    let table_a = moments(&estimate_shadow(tuple, count, seeds.0, workers)?, degree);
    let table_b = moments(
        &estimate_shadow(&conj_tuple, count, seeds.1, workers)?,
        degree,
    );

    let mut worst_ratio = 0.0f64;
    let mut worst_index = vec![0u32; tuple.len()];
    let mut compared = 0usize;
    for (index, a) in table_a.iter() {
        let b = table_b.get(index).expect("same index set");
        compared += 1;
        let diff = (a.estimate - b.estimate).abs();
        let combined = (a.std_error * a.std_error + b.std_error * b.std_error).sqrt();
        let ratio = if diff == 0.0 {
            0.0
        } else if combined == 0.0 {
            f64::INFINITY
        } else {
            diff / (5.0 * combined)
        };
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst_index = index.clone();
        }
    }
    Ok(InvarianceReport {
        sample_count: count,
        degree,
        moments_compared: compared,
        worst_index,
        worst_ratio,
        pass: worst_ratio <= 1.0,
    })
}

/// Chi-square statistic of the octant occupation of a 3D sample cloud
/// against the uniform 1/8-per-octant law (7 degrees of freedom).
pub fn octant_chi_square(samples: &[Vec<f64>]) -> f64 {
    let mut counts = [0u64; 8];
    for s in samples {
        let mut cell = 0usize;
        for &x in s.iter().take(3) {
            cell = cell * 2 + usize::from(x >= 0.0);
        }
        counts[cell] += 1;
    }
    let expected = samples.len() as f64 / 8.0;
    counts
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum()
}

/// Kolmogorov-Smirnov statistic of the sample radii against a radial CDF.
pub fn radial_ks_statistic(samples: &[Vec<f64>], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut radii: Vec<f64> = samples
        .iter()
        .map(|s| s.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = radii.len() as f64;
    let mut d = 0.0f64;
    for (i, &r) in radii.iter().enumerate() {
        let f = cdf(r);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i as f64 + 1.0) / n - f).abs());
    }
    d
}

/// Outcome of [`ball_shadow_check`].
#[derive(Debug, Clone, Serialize)]
pub struct BallShadowReport {
    pub sample_count: usize,
    pub swap_conjugated: bool,
    pub max_norm: f64,
    pub ks_statistic: f64,
    pub ks_critical: f64,
    pub second_moments: Vec<f64>,
    pub second_moment_std_errors: Vec<f64>,
    /// Largest pointwise gap between the range-map route and the
    /// partial-trace route.
    pub max_route_gap: f64,
    pub pass: bool,
}

/// Shadow of the extended Pauli tuple `(s_1 (x) 1, s_2 (x) 1, s_3 (x) 1)` on
/// C^4, which fills the unit ball with the uniform (Lebesgue) law.
///
/// Checks, per run: all norms at most 1 + 1e-10; the radial empirical CDF
/// against `F(r) = r^3` (KS at the 99.9% level); coordinate second moments
/// 1/5 within five standard errors; and pointwise agreement (1e-12) between
/// the range-map coordinates and the Bloch vector of the partial trace of
/// each sampled state. With `swap_conjugated` the tuple is conjugated by the
/// swap unitary and the states are swapped before tracing, exercising the
/// unitary invariance of the shadow.
pub fn ball_shadow_check(
    count: usize,
    seed: u64,
    swap_conjugated: bool,
    workers: usize,
) -> Result<BallShadowReport> {
    if count == 0 {
        return Err(Error::InvalidParameter(
            "sample count must be at least 1".into(),
        ));
    }
    let base = HermitianTuple::pauli_extended();
    let swap = crate::channels::swap_operator();
    let tuple = if swap_conjugated {
        let conjugated: Result<Vec<ComplexMatrix>> = base
            .operators()
            .iter()
            .map(|a| swap.matmul(a)?.matmul(&swap))
            .collect();
        HermitianTuple::new(conjugated?)?
    } else {
        base
    };
    let paulis = pauli_basis();

    struct PerSample {
        point: Vec<f64>,
        route_gap: f64,
    }
    let results: Vec<Result<PerSample>> = parallel_map_indexed(count, workers, |i| {
        let mut rng = SeededRng::substream(seed, i as u64);
        let psi = haar_sample(4, &mut rng)?;
        let point = jnr_map(&tuple, &psi)?;

        let traced_state = if swap_conjugated {
            PureState::new(swap.apply_vec(psi.amplitudes())?)?
        } else {
            psi
        };
        let omega = projector(&traced_state)
            .matrix()
            .partial_trace_second(2, 2)?;
        let tau = bloch_decompose(
            &DensityMatrix::new(omega)?,
            &paulis,
            BlochConvention::Expectation,
        )?;
        let route_gap = point
            .iter()
            .zip(&tau.components)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        Ok(PerSample { point, route_gap })
    });

    let mut points = Vec::with_capacity(count);
    let mut max_route_gap = 0.0f64;
    for r in results {
        let r = r?;
        max_route_gap = max_route_gap.max(r.route_gap);
        points.push(r.point);
    }

    let max_norm = points
        .iter()
        .map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let ks_statistic = radial_ks_statistic(&points, |r| (r * r * r).clamp(0.0, 1.0));
    let ks_critical = KS_COEFF_99_9 / (count as f64).sqrt();

    let n = count as f64;
    let mut second_moments = Vec::with_capacity(3);
    let mut second_moment_std_errors = Vec::with_capacity(3);
    for j in 0..3 {
        let mean = points.iter().map(|p| p[j] * p[j]).sum::<f64>() / n;
        let var = points
            .iter()
            .map(|p| (p[j] * p[j] - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        second_moments.push(mean);
        second_moment_std_errors.push((var / n).sqrt());
    }

    let moments_ok = second_moments
        .iter()
        .zip(&second_moment_std_errors)
        .all(|(m, se)| (m - 0.2).abs() <= 5.0 * se);
    let pass = max_norm <= 1.0 + 1e-10
        && ks_statistic < ks_critical
        && moments_ok
        && max_route_gap <= 1e-12;

    Ok(BallShadowReport {
        sample_count: count,
        swap_conjugated,
        max_norm,
        ks_statistic,
        ks_critical,
        second_moments,
        second_moment_std_errors,
        max_route_gap,
        pass,
    })
}
