//! Property tests for the algebraic invariants that every module leans on.

use jnrange::jnr::{factorize, HermitianTuple};
use jnrange::linalg::ComplexMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn entry() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(entry(), n * n)
        .prop_map(move |entries| ComplexMatrix::new(n, n, entries).unwrap())
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(n).prop_map(|g| {
        let adj = g.adjoint();
        g.add(&adj).unwrap().scale_re(0.5)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_mixed_product(a in matrix(2), b in matrix(2), c in matrix(2), d in matrix(2)) {
        let lhs = a.tensor(&b).matmul(&c.tensor(&d)).unwrap();
        let rhs = a.matmul(&c).unwrap().tensor(&b.matmul(&d).unwrap());
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn tensor_is_bilinear(a in matrix(2), b in matrix(2), c in matrix(2), s in -2.0..2.0f64) {
        let lhs = a.add(&b).unwrap().scale_re(s).tensor(&c);
        let rhs = a.tensor(&c).scale_re(s).add(&b.tensor(&c).scale_re(s)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn hs_inner_with_itself_is_the_squared_frobenius_norm(a in matrix(3)) {
        let g = a.hs_inner(&a).unwrap();
        prop_assert!(g.im.abs() <= 1e-12);
        prop_assert!(g.re >= 0.0);
        let fro = a.frobenius_norm();
        prop_assert!((g.re - fro * fro).abs() <= 1e-10);
    }

    #[test]
    fn partial_trace_preserves_the_trace(a in matrix(6)) {
        let reduced = a.partial_trace_second(2, 3).unwrap();
        prop_assert!((reduced.trace() - a.trace()).norm() <= 1e-12);
    }

    #[test]
    fn adjoint_is_an_involution(a in matrix(3)) {
        prop_assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn eigen_reconstructs_random_hermitians(h in hermitian(4)) {
        let eig = h.hermitian_eigen().unwrap();
        prop_assert!(eig.reconstruct().max_abs_diff(&h) <= 1e-10);
        let gram = eig.eigenvectors.adjoint().matmul(&eig.eigenvectors).unwrap();
        prop_assert!(gram.max_abs_diff(&ComplexMatrix::identity(4)) <= 1e-10);
        for w in eig.eigenvalues.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn factorization_reproduces_the_range_map(
        ops in prop::collection::vec(hermitian(3), 1..5),
        x in hermitian(3),
    ) {
        let tuple = HermitianTuple::new(ops).unwrap();
        match factorize(&tuple) {
            Ok(fact) => prop_assert!(fact.identity_defect(&tuple, &x).unwrap() <= 1e-10),
            Err(jnrange::Error::TrivialSpan) => {
                // Every operator was a multiple of the identity; nothing to test.
            }
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error: {e}"))),
        }
    }
}
