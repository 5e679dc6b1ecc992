use std::ffi::CStr;
use std::ptr;

use ergokde::estimator::{psi_d, EvaluationGrid};
use ergokde::kernel::build_order_kernel;
use ergokde_ffi::*;

fn last_error() -> String {
    let p = ergokde_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn kernel_matches_library() {
    unsafe {
        let mut k = ptr::null_mut();
        assert_eq!(ergokde_kernel_new(2, 2, &mut k), ErgokdeStatus::Ok);
        let mut order = 0;
        assert_eq!(ergokde_kernel_order(k, &mut order), ErgokdeStatus::Ok);
        assert_eq!(order, 3);
        let reference = build_order_kernel(2, 3).unwrap();
        let u = [0.1, -0.2];
        let mut v = 0.0;
        assert_eq!(ergokde_kernel_eval(k, u.as_ptr(), 2, &mut v), ErgokdeStatus::Ok);
        assert_eq!(v, reference.eval(&u));
        assert_eq!(ergokde_kernel_eval(k, u.as_ptr(), 1, &mut v), ErgokdeStatus::Validation);
        ergokde_kernel_free(k);
    }
}

#[test]
fn simulate_estimate_round_trip() {
    unsafe {
        let id = [1.0, 0.0, 0.0, 1.0];
        let mut path = ptr::null_mut();
        let st = ergokde_simulate_ou(2, id.as_ptr(), id.as_ptr(), 100.0, 0.01, ptr::null(), -1.0, 7, &mut path);
        assert_eq!(st, ErgokdeStatus::Ok);
        let (mut d, mut rows, mut dt) = (0, 0, 0.0);
        assert_eq!(ergokde_path_shape(path, &mut d, &mut rows, &mut dt), ErgokdeStatus::Ok);
        assert_eq!((d, rows), (2, 10_001));
        assert!((dt - 0.01).abs() < 1e-15);

        let mut states = vec![0.0; rows * d];
        assert_eq!(ergokde_path_states(path, states.as_mut_ptr(), 3), ErgokdeStatus::BufferTooSmall);
        assert!(last_error().contains("20002"));
        assert_eq!(ergokde_path_states(path, states.as_mut_ptr(), states.len()), ErgokdeStatus::Ok);

        let mut copy = ptr::null_mut();
        assert_eq!(ergokde_path_from_states(2, dt, states.as_ptr(), rows, &mut copy), ErgokdeStatus::Ok);

        let mut k = ptr::null_mut();
        assert_eq!(ergokde_kernel_new(2, 1, &mut k), ErgokdeStatus::Ok);
        let (lo, hi) = ([-1.0, -1.0], [1.0, 1.0]);
        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        assert_eq!(ergokde_estimate(path, k, 0.4, lo.as_ptr(), hi.as_ptr(), 9, &mut a), ErgokdeStatus::Ok);
        assert_eq!(ergokde_estimate(copy, k, 0.4, lo.as_ptr(), hi.as_ptr(), 9, &mut b), ErgokdeStatus::Ok);
        let mut n = 0;
        assert_eq!(ergokde_estimate_len(a, &mut n), ErgokdeStatus::Ok);
        assert_eq!(n, 81);
        let mut va = vec![0.0; n];
        let mut vb = vec![0.0; n];
        assert_eq!(ergokde_estimate_values(a, va.as_mut_ptr(), n), ErgokdeStatus::Ok);
        assert_eq!(ergokde_estimate_values(b, vb.as_mut_ptr(), n), ErgokdeStatus::Ok);
        assert_eq!(va, vb);
        assert!(va.iter().all(|v| v.is_finite() && *v >= -1e-12));
        let grid = EvaluationGrid::cube(2, -1.0, 1.0, 9).unwrap();
        assert_eq!(grid.len(), n);

        let mut h = 0.0;
        let st = ergokde_select_bandwidth(path, k, 2.0, 1, lo.as_ptr(), hi.as_ptr(), 9, &mut h);
        assert_eq!(st, ErgokdeStatus::EmptyGrid);
        assert!(last_error().contains("empty bandwidth grid"));

        ergokde_estimate_free(a);
        ergokde_estimate_free(b);
        ergokde_kernel_free(k);
        ergokde_path_free(path);
        ergokde_path_free(copy);
    }
}

#[test]
fn formulas_and_errors() {
    unsafe {
        let mut v = 0.0;
        assert_eq!(ergokde_psi(0.5, 3, &mut v), ErgokdeStatus::Ok);
        assert_eq!(v, psi_d(0.5, 3).unwrap());
        assert_eq!(ergokde_psi(5.0, 3, &mut v), ErgokdeStatus::Validation);
        assert_eq!(ergokde_sigma(1.0, 1e4, 3, 1, &mut v), ErgokdeStatus::Ok);
        assert_eq!(v, 0.0);
        assert_eq!(ergokde_upsilon(0.5, 1e4, 1.0, 3, &mut v), ErgokdeStatus::Ok);
        assert_eq!(ergokde_rate_phi(1, 2.0, 1e4, &mut v), ErgokdeStatus::Ok);
        assert!((v - 0.01).abs() < 1e-15);
        assert_eq!(ergokde_rate_psi(3, 2.0, 1e4, &mut v), ErgokdeStatus::Ok);
        let mut clipped = false;
        let t = 4f64.exp();
        assert_eq!(ergokde_theoretical_bandwidth(1, 2.0, t, 1.0, &mut v, &mut clipped), ErgokdeStatus::Ok);
        assert!(clipped);
        assert_eq!(v, 1.0);
        assert_eq!(ergokde_psi(0.5, 3, ptr::null_mut()), ErgokdeStatus::NullPointer);
        assert!(last_error().contains("null pointer"));
        assert_eq!(ergokde_kernel_order(ptr::null(), &mut 0), ErgokdeStatus::NullPointer);
        let id = [1.0];
        let mut p = ptr::null_mut();
        let st = ergokde_simulate_ou(1, id.as_ptr(), id.as_ptr(), 10.0, -1.0, ptr::null(), -1.0, 1, &mut p);
        assert_eq!(st, ErgokdeStatus::Validation);
        assert!(p.is_null());
        ergokde_path_free(ptr::null_mut());
    }
}
