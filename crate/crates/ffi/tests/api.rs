use std::ffi::{CStr, CString};
use std::ptr;

use fixdim_ffi::*;

fn gaussian(n: usize, d: usize, seed: u64) -> Vec<f64> {
    fixdim::sketch::sample_gaussian(fixdim::Rng::new(seed), n * d, 1.0)
}

fn handle(n: usize, d: usize, data: &[f64]) -> *mut FixdimMatrix {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { fixdim_matrix_new(n, d, data.as_ptr(), &mut m) }, FixdimStatus::Ok);
    m
}

fn last_error() -> String {
    let p = fixdim_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn matrix_round_trip() {
    let data: Vec<f64> = (0..12).map(|i| i as f64 * 0.5).collect();
    let m = handle(4, 3, &data);
    unsafe {
        assert_eq!(fixdim_matrix_rows(m), 4);
        assert_eq!(fixdim_matrix_cols(m), 3);
        let mut out = vec![0.0; 12];
        assert_eq!(fixdim_matrix_copy(m, out.as_mut_ptr(), 12), FixdimStatus::Ok);
        assert_eq!(out, data);
        assert_eq!(fixdim_matrix_copy(m, out.as_mut_ptr(), 11), FixdimStatus::Dimension);
        fixdim_matrix_free(m);
        fixdim_matrix_free(ptr::null_mut());
    }
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("m.mtb").to_str().unwrap()).unwrap();
    let data = gaussian(5, 2, 1);
    let m = handle(5, 2, &data);
    unsafe {
        assert_eq!(fixdim_matrix_write(m, path.as_ptr()), FixdimStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(fixdim_matrix_read(path.as_ptr(), &mut back), FixdimStatus::Ok);
        let mut out = vec![0.0; 10];
        fixdim_matrix_copy(back, out.as_mut_ptr(), 10);
        assert_eq!(out, data);
        fixdim_matrix_free(back);
        fixdim_matrix_free(m);
        let missing = CString::new(dir.path().join("none.csv").to_str().unwrap()).unwrap();
        let mut h = ptr::null_mut();
        assert_eq!(fixdim_matrix_read(missing.as_ptr(), &mut h), FixdimStatus::Io);
        assert!(h.is_null());
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(fixdim_matrix_new(2, 2, ptr::null(), &mut m), FixdimStatus::NullPointer);
        assert!(last_error().contains("data"));
        let a = handle(64, 4, &gaussian(64, 4, 2));
        let mut out = ptr::null_mut();
        assert_eq!(fixdim_embed_l2(a, 1.5, 10.0, 0, &mut out), FixdimStatus::Param);
        assert!(out.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(fixdim_embed_l2(ptr::null(), 0.5, 10.0, 0, &mut out), FixdimStatus::NullPointer);
        fixdim_matrix_free(a);
    }
}

#[test]
fn embed_l2_preserves_gram() {
    let (n, d) = (512, 4);
    let data = gaussian(n, d, 3);
    let a = handle(n, d, &data);
    unsafe {
        let mut e = ptr::null_mut();
        assert_eq!(fixdim_embed_l2_sketch(a, FixdimSketch::Srht, 256, 7, &mut e), FixdimStatus::Ok);
        assert_eq!((fixdim_matrix_rows(e), fixdim_matrix_cols(e)), (d, d));
        let mut et = vec![0.0; d * d];
        fixdim_matrix_copy(e, et.as_mut_ptr(), d * d);
        let x = [1.0, -2.0, 0.5, 3.0];
        let norm = |m: &[f64], rows: usize| -> f64 {
            (0..rows).map(|i| (0..d).map(|j| m[i * d + j] * x[j]).sum::<f64>().powi(2)).sum::<f64>().sqrt()
        };
        let ratio = norm(&et, d) / norm(&data, n);
        assert!((0.5..=1.5).contains(&ratio), "{ratio}");
        fixdim_matrix_free(e);
        fixdim_matrix_free(a);
    }
}

#[test]
fn embed_l1_shape() {
    let (n, d) = (600, 10);
    let a = handle(n, d, &gaussian(n, d, 4));
    unsafe {
        let mut e = ptr::null_mut();
        let small = handle(50, 3, &gaussian(50, 3, 4));
        assert_eq!(fixdim_embed_l1(small, 10.0, 0.0, 1, &mut e), FixdimStatus::Param);
        fixdim_matrix_free(small);
        assert_eq!(fixdim_embed_l1(a, 10.0, 0.0, 1, &mut e), FixdimStatus::Ok);
        assert_eq!(fixdim_matrix_cols(e), d);
        assert!(fixdim_matrix_rows(e) > d);
        fixdim_matrix_free(e);
        fixdim_matrix_free(a);
    }
}

#[test]
fn weights_sum_to_rank() {
    let (n, d) = (200, 5);
    let a = handle(n, d, &gaussian(n, d, 5));
    let mut tau = vec![0.0; n];
    let mut w = vec![0.0; n];
    unsafe {
        assert_eq!(fixdim_leverage(a, 128, 3, tau.as_mut_ptr(), n), FixdimStatus::Ok);
        assert_eq!(fixdim_lewis_weights(a, 0, w.as_mut_ptr(), n), FixdimStatus::Ok);
        fixdim_matrix_free(a);
    }
    let st: f64 = tau.iter().sum();
    let sw: f64 = w.iter().sum();
    assert!((st - d as f64).abs() < 1.0, "{st}");
    assert!((sw - d as f64).abs() < 0.5, "{sw}");
}

#[test]
fn regressions_recover_consistent_rhs() {
    let (n, d) = (400, 3);
    let data = gaussian(n, d, 6);
    let x0 = [0.5, -1.0, 2.0];
    let b: Vec<f64> = (0..n).map(|i| (0..d).map(|j| data[i * d + j] * x0[j]).sum()).collect();
    let a = handle(n, d, &data);
    unsafe {
        let mut x = [0.0; 3];
        let mut cost = f64::NAN;
        assert_eq!(fixdim_regress_l2(a, b.as_ptr(), n, 64, 1, x.as_mut_ptr(), 3, &mut cost), FixdimStatus::Ok);
        assert!(cost < 1e-16, "{cost}");
        for p in [FixdimPipeline::WcBasisL1, FixdimPipeline::Lewis, FixdimPipeline::Uniform] {
            let s = fixdim_regress_l1(a, b.as_ptr(), n, p, 60, 0.5, 2, x.as_mut_ptr(), 3, &mut cost);
            assert_eq!(s, FixdimStatus::Ok, "{p:?}");
            assert!(cost < 1e-8, "{p:?}: {cost}");
        }
        let s = fixdim_regress_l1(a, b.as_ptr(), n, FixdimPipeline::Uniform, 0, 0.5, 2, x.as_mut_ptr(), 3, ptr::null_mut());
        assert_eq!(s, FixdimStatus::Param);
        let s = fixdim_regress_l1(a, b.as_ptr(), n - 1, FixdimPipeline::Lewis, 60, 0.5, 2, x.as_mut_ptr(), 3, ptr::null_mut());
        assert_eq!(s, FixdimStatus::Dimension);
        fixdim_matrix_free(a);
    }
}
