use fixdim::linalg::{gram_sqrt, psd_sqrt, qr, svd, symmetric_eigen};
use fixdim::Matrix;
use proptest::prelude::*;

fn matrix(rows: std::ops::RangeInclusive<usize>, cols: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Matrix> {
    (rows, cols).prop_flat_map(|(n, d)| {
        let n = n.max(d);
        prop::collection::vec(-10.0f64..10.0, n * d).prop_map(move |v| Matrix::from_vec(n, d, v).unwrap())
    })
}

fn rel(a: &Matrix, b: &Matrix) -> f64 {
    a.sub(b).unwrap().frobenius_norm() / b.frobenius_norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn svd_reconstructs(a in matrix(1..=20, 1..=6)) {
        let f = svd(&a).unwrap();
        prop_assert!(rel(&f.reconstruct(), &a) < 1e-10);
        prop_assert!(f.sigma.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(f.sigma.iter().all(|&s| s >= 0.0));
        let vtv = f.v.t_matmul(&f.v).unwrap();
        prop_assert!(vtv.sub(&Matrix::identity(a.cols())).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn qr_factors(a in matrix(1..=20, 1..=6)) {
        if let Ok((q, r)) = qr(&a) {
            prop_assert!(rel(&q.matmul(&r).unwrap(), &a) < 1e-10);
            prop_assert!(q.t_matmul(&q).unwrap().sub(&Matrix::identity(a.cols())).unwrap().max_abs() < 1e-10);
            for i in 0..r.rows() {
                prop_assert!(r[(i, i)] > 0.0);
                for j in 0..i {
                    prop_assert_eq!(r[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn eigen_reconstructs(a in matrix(1..=12, 1..=6)) {
        let s = a.gram();
        let e = symmetric_eigen(&s).unwrap();
        prop_assert!(rel(&e.reconstruct_with(|v| v), &s) < 1e-10);
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn roots_square_to_gram(a in matrix(1..=20, 1..=6)) {
        let s = a.gram();
        let t = psd_sqrt(&s).unwrap();
        prop_assert!(t.max_asymmetry() <= 1e-12 * t.max_abs().max(1.0));
        prop_assert!(t.matmul(&t).unwrap().sub(&s).unwrap().max_abs() <= 1e-9 * s.max_abs().max(1.0));
        let g = gram_sqrt(&a).unwrap();
        prop_assert!(g.root.matmul(&g.root).unwrap().sub(&s).unwrap().max_abs() <= 1e-9 * s.max_abs().max(1.0));
        prop_assert!(g.root.sub(&t).unwrap().max_abs() <= 1e-6 * t.max_abs().max(1.0) || t.max_abs() < 1e-12);
    }
}
