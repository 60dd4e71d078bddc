//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::DMatrix;

/// `exp(M)` by scaling and squaring. The Taylor series of the scaled matrix
/// stops once a term is negligible in double precision, well inside the
/// `1e-12` target after squaring.
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    assert!(m.is_square(), "matrix exponential of a non-square matrix");
    let n = m.nrows();
    let norm = m.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut s = 0u32;
    while norm / 2f64.powi(s as i32) > 0.5 {
        s += 1;
    }
    let a = m / 2f64.powi(s as i32);
    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..60 {
        term = &term * &a / k as f64;
        sum += &term;
        if term.abs().max() <= 1e-16 * sum.abs().max() {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Zero-order-hold discretisation: `Ad = exp(A Ts)`,
/// `Bd = ∫₀^Ts exp(Aτ) dτ B`, read off the exponential of `[[A, B], [0, 0]]·Ts`.
pub fn zoh(a: &DMatrix<f64>, b: &DMatrix<f64>, ts: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    assert!(ts > 0.0, "sample period must be positive");
    let n = a.nrows();
    let m = b.ncols();
    let mut aug = DMatrix::<f64>::zeros(n + m, n + m);
    aug.view_mut((0, 0), (n, n)).copy_from(&(a * ts));
    aug.view_mut((0, n), (n, m)).copy_from(&(b * ts));
    let e = expm(&aug);
    (
        e.view((0, 0), (n, n)).into_owned(),
        e.view((0, n), (n, m)).into_owned(),
    )
}

/// Largest singular value, by power iteration on `AᵀA` to relative
/// tolerance `1e-10`.
pub fn max_singular_value(a: &DMatrix<f64>) -> f64 {
    let ata = a.transpose() * a;
    let n = ata.nrows();
    if n == 0 {
        return 0.0;
    }
    // deterministic start with no exact orthogonality to typical eigenvectors
    let mut v = nalgebra::DVector::from_fn(n, |i, _| 1.0 + 0.1 * i as f64);
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..10_000 {
        let w = &ata * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = v.dot(&w);
        v = w / norm;
        if (next - lambda).abs() <= 1e-10 * next.abs().max(1e-300) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda.max(0.0).sqrt()
}

/// Moore–Penrose pseudo-inverse.
pub fn pinv(a: &DMatrix<f64>) -> DMatrix<f64> {
    a.clone()
        .pseudo_inverse(1e-12)
        .expect("SVD-based pseudo-inverse with a non-negative tolerance")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_exponential() {
        let e = expm(&DMatrix::from_element(1, 1, 0.5));
        assert!((e[(0, 0)] - 0.5f64.exp()).abs() < 1e-13);
        let e = expm(&DMatrix::from_element(1, 1, -7.0));
        assert!((e[(0, 0)] / (-7.0f64).exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_exponential() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let e = expm(&m);
        assert!((e[(0, 0)] - 1f64.cos()).abs() < 1e-13);
        assert!((e[(1, 0)] - 1f64.sin()).abs() < 1e-13);
    }

    #[test]
    fn zoh_examples() {
        let (ad, bd) = zoh(&DMatrix::zeros(2, 2), &DMatrix::identity(2, 2), 0.5);
        assert!((ad - DMatrix::<f64>::identity(2, 2)).abs().max() < 1e-15);
        assert!((bd - DMatrix::<f64>::identity(2, 2) * 0.5).abs().max() < 1e-15);

        let (ad, bd) = zoh(&DMatrix::from_element(1, 1, 1.0), &DMatrix::from_element(1, 1, 1.0), 0.5);
        assert!((ad[(0, 0)] - 1.648721).abs() < 1e-6);
        assert!((bd[(0, 0)] - 0.648721).abs() < 1e-6);

        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 0.0]));
        let (ad, _) = zoh(&a, &DMatrix::identity(3, 3), 0.5);
        assert!((ad[(0, 0)] - 0.5f64.exp()).abs() < 1e-12);
        assert!((ad[(1, 1)] - 0.5f64.exp()).abs() < 1e-12);
        assert!((ad[(2, 2)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_values() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 0.0]));
        assert!((max_singular_value(&a) - 1.0).abs() < 1e-9);
        let b = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 4.0, 5.0]);
        let svd = b.clone().svd(false, false).singular_values.max();
        assert!((max_singular_value(&b) - svd).abs() < 1e-8);
    }

    #[test]
    fn pseudo_inverse_of_selector() {
        let b = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let p = pinv(&b);
        assert!((&p * &b - DMatrix::<f64>::identity(2, 2)).abs().max() < 1e-12);
    }
}
