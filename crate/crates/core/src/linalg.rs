//! Small dense symmetric eigenproblems.

/// Eigen-decomposition of a symmetric 4x4 matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order with the matching unit eigenvectors.
pub fn symmetric_eigen4(m: [[f64; 4]; 4]) -> ([f64; 4], [[f64; 4]; 4]) {
    let mut a = m;
    let mut v = [[0.0; 4]; 4];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..64 {
        let off: f64 = (0..4)
            .flat_map(|i| (0..4).filter(move |j| *j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: f64 = (0..4).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..3 {
            for q in (p + 1)..4 {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + crate::real::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / crate::real::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..4 {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..4 {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|i, j| a[*i][*i].total_cmp(&a[*j][*j]));
    let mut values = [0.0; 4];
    let mut vectors = [[0.0; 4]; 4];
    for (slot, &i) in order.iter().enumerate() {
        values[slot] = a[i][i];
        for k in 0..4 {
            vectors[slot][k] = v[k][i];
        }
    }
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat_vec(m: &[[f64; 4]; 4], x: &[f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for i in 0..4 {
            out[i] = (0..4).map(|j| m[i][j] * x[j]).sum();
        }
        out
    }

    #[test]
    fn diagonal_matrix() {
        let m = [[3.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 4.0, 0.0], [0.0, 0.0, 0.0, 2.0]];
        let (vals, vecs) = symmetric_eigen4(m);
        assert_eq!(vals, [1.0, 2.0, 3.0, 4.0]);
        assert_eq!(vecs[0][1].abs(), 1.0);
    }

    #[test]
    fn dense_matrix_residuals() {
        let m = [
            [4.0, 1.0, -2.0, 0.5],
            [1.0, 2.0, 0.0, 1.0],
            [-2.0, 0.0, 3.0, -1.5],
            [0.5, 1.0, -1.5, 1.0],
        ];
        let (vals, vecs) = symmetric_eigen4(m);
        let trace: f64 = vals.iter().sum();
        assert!((trace - 10.0).abs() < 1e-12);
        for (lambda, x) in vals.iter().zip(&vecs) {
            let mx = mat_vec(&m, x);
            for k in 0..4 {
                assert!((mx[k] - lambda * x[k]).abs() < 1e-12);
            }
            let norm: f64 = x.iter().map(|t| t * t).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }
}
