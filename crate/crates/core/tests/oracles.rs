mod common;

use approx::assert_relative_eq;
use robin_corner::reference;

#[test]
fn bessel_against_series_and_quadrature() {
    for &x in &[0.2, 1.0, 3.0, 5.5] {
        assert_relative_eq!(reference::bessel_i(0, x), common::i_n(0, x), max_relative = 1e-13);
        assert_relative_eq!(reference::bessel_i(1, x), common::i_n(1, x), max_relative = 1e-13);
        assert_relative_eq!(reference::bessel_k(0, x), common::k0(x), max_relative = 1e-10);
    }
}

#[test]
fn disk_eigenvalues_agree() {
    for &(a, r) in &[(1.0, 1.0), (5.0, 1.0), (3.0, 2.0)] {
        assert_relative_eq!(reference::disk_robin_eigenvalue(a, r).unwrap(), common::disk_eigenvalue(a, r), max_relative = 1e-11);
    }
}

#[test]
fn circle_delta_eigenvalues_agree() {
    for &(a, r) in &[(6.0, 1.0), (4.0, 1.5)] {
        assert_relative_eq!(
            reference::circle_delta_eigenvalue(a, r).unwrap(),
            common::circle_delta_eigenvalue(a, r),
            max_relative = 1e-9
        );
    }
}

#[test]
fn square_eigenvalues_agree() {
    for &a in &[4.0, 8.0, 32.0] {
        assert_relative_eq!(
            reference::rectangle_robin_eigenvalue(a, 1.0, 1.0).unwrap(),
            common::square_eigenvalue(a, 1.0),
            max_relative = 1e-12
        );
    }
    // k > α, so λ/α² approaches −2 from below
    let r4 = common::square_eigenvalue(4.0, 1.0) / 16.0;
    let r8 = common::square_eigenvalue(8.0, 1.0) / 64.0;
    assert!(r4 < r8 && r8 < -2.0);
}
