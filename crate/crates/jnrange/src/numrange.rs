//! Numerical range of a complex matrix: support-function boundary sweeps,
//! the closed-form ellipse for 2x2 matrices, and membership tests.
//!
//! The numerical range `W(A) = { <psi|A|psi> : |psi| = 1 }` is convex, so it
//! is determined by its support function `h(theta) = max Re(e^{-i theta} z)`,
//! which equals the top eigenvalue of the Hermitian part of
//! `e^{-i theta} A`.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::states::PureState;

/// Discretized support-function sweep of a numerical range boundary.
#[derive(Debug, Clone)]
pub struct RangeBoundary {
    angles: Vec<f64>,
    support_values: Vec<f64>,
    boundary_points: Vec<Complex64>,
}

impl RangeBoundary {
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn support_values(&self) -> &[f64] {
        &self.support_values
    }

    pub fn boundary_points(&self) -> &[Complex64] {
        &self.boundary_points
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Support-value membership: `z` is accepted iff
    /// `Re(e^{-i theta} z) <= h(theta) + tol` at every tabulated angle.
    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        self.angles
            .iter()
            .zip(&self.support_values)
            .all(|(&theta, &h)| (Complex64::from_polar(1.0, -theta) * z).re <= h + tol)
    }

    pub fn max_modulus(&self) -> f64 {
        self.boundary_points
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn min_modulus(&self) -> f64 {
        self.boundary_points
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// CSV rows `theta,support,re,im` at full double precision.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "theta,support,re,im")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.angles[i],
                self.support_values[i],
                self.boundary_points[i].re,
                self.boundary_points[i].im
            )?;
        }
        Ok(())
    }
}

/// Support value and a maximizing unit vector in direction `theta`:
/// the top eigenpair of `(e^{-i theta} a + e^{i theta} a*)/2`. The returned
/// state's range point `<psi|a|psi>` lies on the boundary of `W(a)`.
pub fn support_function(a: &ComplexMatrix, theta: f64) -> Result<(f64, PureState)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(
            "numerical range needs a square matrix".into(),
        ));
    }
    let rotated = a.scale(Complex64::from_polar(1.0, -theta));
    let (herm, _) = rotated.hermitian_parts()?;
    let eig = herm.hermitian_eigen()?;
    let top = eig.eigenvector(a.rows() - 1);
    Ok((eig.lambda_max(), PureState::normalized(top)?))
}

/// Sweeps `num_angles` equally spaced directions `theta_t = 2 pi t / n`.
pub fn boundary(a: &ComplexMatrix, num_angles: usize) -> Result<RangeBoundary> {
    if num_angles < 3 {
        return Err(Error::InvalidParameter(format!(
            "boundary sweep needs at least 3 angles, got {num_angles}"
        )));
    }
    let mut angles = Vec::with_capacity(num_angles);
    let mut support_values = Vec::with_capacity(num_angles);
    let mut boundary_points = Vec::with_capacity(num_angles);
    for t in 0..num_angles {
        let theta = std::f64::consts::TAU * t as f64 / num_angles as f64;
        let (h, psi) = support_function(a, theta)?;
        let z = a.quadratic_form(psi.amplitudes())?;
        angles.push(theta);
        support_values.push(h);
        boundary_points.push(z);
    }
    Ok(RangeBoundary {
        angles,
        support_values,
        boundary_points,
    })
}

/// Numerical range of a 2x2 matrix in closed form: an ellipse (possibly a
/// segment or a point) with foci at the eigenvalues.
#[derive(Debug, Clone)]
pub struct EllipseParams {
    pub center: Complex64,
    pub semi_major: f64,
    pub semi_minor: f64,
    /// Direction of the focal axis, radians.
    pub tilt: f64,
    pub foci: (Complex64, Complex64),
}

impl EllipseParams {
    /// Support function of the ellipse, for cross-checks against boundary
    /// sweeps.
    pub fn support(&self, theta: f64) -> f64 {
        let c = (Complex64::from_polar(1.0, -theta) * self.center).re;
        let phi = theta - self.tilt;
        c + (self.semi_major * self.semi_major * phi.cos() * phi.cos()
            + self.semi_minor * self.semi_minor * phi.sin() * phi.sin())
        .sqrt()
    }
}

/// Eigenvalues of a 2x2 complex matrix by the quadratic formula.
pub fn eigenvalues_2x2(a: &ComplexMatrix) -> Result<(Complex64, Complex64)> {
    if a.rows() != 2 || a.cols() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "expected a 2x2 matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let mid = a.trace() * 0.5;
    let det = a.get(0, 0) * a.get(1, 1) - a.get(0, 1) * a.get(1, 0);
    let s = (mid * mid - det).sqrt();
    Ok((mid + s, mid - s))
}

/// Elliptical numerical range of a 2x2 matrix: foci at the eigenvalues,
/// minor semi-axis `b` with `b^2 = (tr(a* a) - |l1|^2 - |l2|^2)/4`.
pub fn ellipse_2x2(a: &ComplexMatrix) -> Result<EllipseParams> {
    let (l1, l2) = eigenvalues_2x2(a)?;
    let center = a.trace() * 0.5;
    let power = a.hs_inner(a)?.re; // tr(a a*) = sum |a_ij|^2
    let b_sq = (power - l1.norm_sqr() - l2.norm_sqr()) / 4.0;
    let b_sq = if b_sq < 0.0 {
        if b_sq < -1e-12 {
            return Err(Error::InvalidParameter(format!(
                "minor semi-axis squared is {b_sq:.3e}, beyond roundoff"
            )));
        }
        0.0
    } else {
        b_sq
    };
    let focal = (l1 - l2) * 0.5;
    let c_sq = focal.norm_sqr();
    let semi_minor = b_sq.sqrt();
    let semi_major = (b_sq + c_sq).sqrt();
    let tilt = if focal.norm() > 0.0 { focal.arg() } else { 0.0 };
    Ok(EllipseParams {
        center,
        semi_major,
        semi_minor,
        tilt,
        foci: (l1, l2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use crate::states::{haar_sample, pauli_basis, random_hermitian};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn shift_matrix() -> ComplexMatrix {
        ComplexMatrix::from_real(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap()
    }

    fn random_complex(n: usize, rng: &mut SeededRng) -> ComplexMatrix {
        let entries = (0..n * n)
            .map(|_| {
                let (x, y) = rng.normal_pair();
                Complex64::new(x, y)
            })
            .collect();
        ComplexMatrix::new(n, n, entries).unwrap()
    }

    #[test]
    fn support_of_sigma3_along_real_axis() {
        let p = pauli_basis();
        let (value, psi) = support_function(&p[2], 0.0).unwrap();
        assert!((value - 1.0).abs() < 1e-12);
        assert!((psi.amplitudes()[0].norm() - 1.0).abs() < 1e-10);
        assert!(psi.amplitudes()[1].norm() < 1e-10);
    }

    #[test]
    fn support_of_shift_is_constant_half() {
        let a = shift_matrix();
        for t in 0..16 {
            let theta = std::f64::consts::TAU * t as f64 / 16.0;
            let (value, psi) = support_function(&a, theta).unwrap();
            assert!((value - 0.5).abs() < 1e-12, "theta {theta}: {value}");
            let z = a.quadratic_form(psi.amplitudes()).unwrap();
            assert!((z.norm() - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn support_of_normal_matrix_is_spectral() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
        ])
        .unwrap();
        let (value, _) = support_function(&a, 0.0).unwrap();
        assert!((value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_of_shift_is_a_circle() {
        let b = boundary(&shift_matrix(), 360).unwrap();
        for z in b.boundary_points() {
            assert!((z.norm() - 0.5).abs() <= 1e-9);
        }
        assert!((b.max_modulus() - 0.5).abs() < 1e-9);
        assert!((b.min_modulus() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn boundary_of_hermitian_is_a_segment() {
        let a = ComplexMatrix::from_real(&[vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let b = boundary(&a, 256).unwrap();
        for z in b.boundary_points() {
            assert!(z.im.abs() < 1e-10);
            assert!((-1e-10..=1.0 + 1e-10).contains(&z.re));
        }
    }

    #[test]
    fn boundary_invariants_hold() {
        let mut rng = SeededRng::new(4);
        let a = random_complex(4, &mut rng);
        let b = boundary(&a, 128).unwrap();
        for (t, &z) in b.boundary_points().iter().enumerate() {
            assert!(b.contains(z, 1e-9), "point {t} fails membership");
            let own = (Complex64::from_polar(1.0, -b.angles()[t]) * z).re;
            assert!(
                own >= b.support_values()[t] - 1e-9,
                "point {t} misses its support value"
            );
        }
    }

    #[test]
    fn normal_matrix_hull_equals_eigenvalue_hull() {
        // For a normal matrix both hulls have the same support function.
        let eigs = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, -1.0)];
        let mut a = ComplexMatrix::zeros(3, 3);
        for (i, &l) in eigs.iter().enumerate() {
            a.set(i, i, l);
        }
        let b = boundary(&a, 512).unwrap();
        for (t, &theta) in b.angles().iter().enumerate() {
            let dir = Complex64::from_polar(1.0, -theta);
            let h_points = b
                .boundary_points()
                .iter()
                .map(|&z| (dir * z).re)
                .fold(f64::NEG_INFINITY, f64::max);
            let h_eigs = eigs
                .iter()
                .map(|&l| (dir * l).re)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((h_points - h_eigs).abs() <= 1e-8, "angle {t}");
            assert!((b.support_values()[t] - h_eigs).abs() <= 1e-8);
        }
    }

    #[test]
    fn convexity_midpoints_stay_inside() {
        let mut rng = SeededRng::new(9);
        for n in 2..=5usize {
            let a = random_complex(n, &mut rng);
            let b = boundary(&a, 256).unwrap();
            for _ in 0..50 {
                let p1 = haar_sample(n, &mut rng).unwrap();
                let p2 = haar_sample(n, &mut rng).unwrap();
                let z1 = a.quadratic_form(p1.amplitudes()).unwrap();
                let z2 = a.quadratic_form(p2.amplitudes()).unwrap();
                let mid = (z1 + z2) * 0.5;
                assert!(b.contains(mid, 1e-8), "midpoint escaped for n={n}");
            }
        }
    }

    #[test]
    fn translation_scaling_covariance() {
        let mut rng = SeededRng::new(13);
        let a = random_complex(3, &mut rng);
        let alpha = 1.7;
        let beta = c(0.3, -0.8);
        let mut shifted = a.scale_re(alpha);
        for i in 0..3 {
            shifted.set(i, i, shifted.get(i, i) + beta);
        }
        let ba = boundary(&a, 128).unwrap();
        let bs = boundary(&shifted, 128).unwrap();
        for t in 0..128 {
            let theta = ba.angles()[t];
            let expected =
                alpha * ba.support_values()[t] + (Complex64::from_polar(1.0, -theta) * beta).re;
            assert!((bs.support_values()[t] - expected).abs() <= 1e-10);
        }
    }

    #[test]
    fn ellipse_of_shift_is_a_disc() {
        let e = ellipse_2x2(&shift_matrix()).unwrap();
        assert!(e.center.norm() < 1e-14);
        assert!((e.semi_major - 0.5).abs() < 1e-12);
        assert!((e.semi_minor - 0.5).abs() < 1e-12);
        assert!(e.foci.0.norm() < 1e-12 && e.foci.1.norm() < 1e-12);
    }

    #[test]
    fn ellipse_of_hermitian_degenerates_to_segment() {
        let a = ComplexMatrix::from_real(&[vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let e = ellipse_2x2(&a).unwrap();
        assert!(e.semi_minor.abs() < 1e-12);
        assert!((e.semi_major - 0.5).abs() < 1e-12);
        let mut foci = [e.foci.0, e.foci.1];
        foci.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!(foci[0].norm() < 1e-12);
        assert!((foci[1] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn ellipse_against_sweep_oracle() {
        // Independent oracle: dense support sweep plus axis extraction.
        let a = ComplexMatrix::from_real(&[vec![0.0, 0.75], vec![0.25, 0.0]]).unwrap();
        let sweep = boundary(&a, 4096).unwrap();
        let center = a.trace() * 0.5;
        let radial: Vec<f64> = sweep
            .boundary_points()
            .iter()
            .map(|&z| (z - center).norm())
            .collect();
        let major_oracle = radial.iter().fold(0.0f64, |m, &r| m.max(r));
        let minor_oracle = radial.iter().fold(f64::INFINITY, |m, &r| m.min(r));

        let e = ellipse_2x2(&a).unwrap();
        assert!((e.semi_major - major_oracle).abs() <= 1e-8);
        assert!((e.semi_minor - minor_oracle).abs() <= 1e-8);
        // Frozen values computed with the oracle above.
        assert!((e.semi_major - 0.5).abs() <= 1e-12);
        assert!((e.semi_minor - 0.25).abs() <= 1e-12);
        assert!(e.center.norm() <= 1e-14);
    }

    #[test]
    fn ellipse_focus_distance_invariant() {
        let mut rng = SeededRng::new(21);
        for _ in 0..50 {
            let a = random_complex(2, &mut rng);
            let e = ellipse_2x2(&a).unwrap();
            assert!(e.semi_major >= e.semi_minor);
            let focal_dist = (e.foci.0 - e.foci.1).norm();
            let expect = 2.0 * (e.semi_major * e.semi_major - e.semi_minor * e.semi_minor).sqrt();
            assert!((focal_dist - expect).abs() <= 1e-10);
        }
    }

    #[test]
    fn ellipse_matches_boundary_for_random_matrices() {
        let mut rng = SeededRng::new(30);
        for trial in 0..100 {
            let a = random_complex(2, &mut rng);
            let e = ellipse_2x2(&a).unwrap();
            let b = boundary(&a, 256).unwrap();
            for (t, &theta) in b.angles().iter().enumerate() {
                let gap = (e.support(theta) - b.support_values()[t]).abs();
                assert!(gap <= 1e-8, "trial {trial}, angle {t}: gap {gap}");
            }
        }
    }

    #[test]
    fn ellipse_rejects_wrong_size() {
        assert!(ellipse_2x2(&ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn contains_on_the_disc() {
        let b = boundary(&shift_matrix(), 512).unwrap();
        assert!(b.contains(c(0.0, 0.0), 0.0));
        assert!(b.contains(c(0.5, 0.0), 1e-9));
        assert!(!b.contains(c(0.51, 0.0), 1e-9));
    }

    #[test]
    fn boundary_needs_three_angles() {
        assert!(boundary(&shift_matrix(), 2).is_err());
    }

    #[test]
    fn csv_shape() {
        let b = boundary(&shift_matrix(), 8).unwrap();
        let mut buf = Vec::new();
        b.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "theta,support,re,im");
        assert_eq!(lines.len(), 9);
        assert_eq!(lines[1].split(',').count(), 4);
    }

    #[test]
    fn support_matches_external_oracle() {
        // Fixed non-normal 3x3 matrix; support values at 8 angles computed
        // independently with LAPACK and frozen.
        let b = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 1.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.25)],
        ])
        .unwrap();
        let expected = [
            1.5359161338051217,
            1.4852752489189194,
            1.1731667395785106,
            1.5067146627986905,
            1.6585877443992434,
            1.3938854044215487,
            1.2937676602606385,
            1.3726742282581175,
        ];
        for (t, want) in expected.iter().enumerate() {
            let theta = std::f64::consts::TAU * t as f64 / 8.0;
            let (got, _) = support_function(&b, theta).unwrap();
            assert!((got - want).abs() <= 1e-10, "angle {t}: {got} vs {want}");
        }
    }

    // Random Hermitian matrices have real segments as ranges; quick sanity
    // check tying support values to the spectrum.
    #[test]
    fn hermitian_support_is_extreme_eigenvalue() {
        let mut rng = SeededRng::new(77);
        let h = random_hermitian(4, &mut rng);
        let eig = h.hermitian_eigen().unwrap();
        let (v0, _) = support_function(&h, 0.0).unwrap();
        let (vpi, _) = support_function(&h, std::f64::consts::PI).unwrap();
        assert!((v0 - eig.lambda_max()).abs() < 1e-10);
        assert!((vpi + eig.lambda_min()).abs() < 1e-10);
    }
}
