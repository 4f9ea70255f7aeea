//! Small dense real linear algebra: cyclic Jacobi eigendecomposition of
//! symmetric matrices plus the few matrix helpers the GNS code needs.

pub type Matrix = Vec<Vec<f64>>;

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a symmetric matrix, sorted by ascending eigenvalue.
/// `vectors[k]` is the unit eigenvector for `values[k]`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl SymmetricEigen {
    pub fn min(&self) -> Option<(f64, &[f64])> {
        self.values
            .first()
            .map(|v| (*v, self.vectors[0].as_slice()))
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

fn offdiag_norm(a: &Matrix) -> f64 {
    let n = a.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i][j] * a[i][j];
            }
        }
    }
    s.sqrt()
}

pub fn frobenius(a: &Matrix) -> f64 {
    a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cyclic Jacobi sweeps until the off-diagonal Frobenius norm drops below
/// `1e-14` times the Frobenius norm of the input.
pub fn jacobi_eigen(input: &Matrix) -> SymmetricEigen {
    let n = input.len();
    // symmetrize: callers pass exactly symmetric data, this only guards rounding
    let mut a: Matrix = (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (input[i][j] + input[j][i])).collect())
        .collect();
    let mut v: Matrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale = frobenius(&a);
    let threshold = 1e-14 * scale;

    for _ in 0..MAX_SWEEPS {
        if scale == 0.0 || offdiag_norm(&a) < threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    SymmetricEigen {
        values: order.iter().map(|&i| a[i][i]).collect(),
        vectors: order
            .iter()
            .map(|&i| (0..n).map(|k| v[k][i]).collect())
            .collect(),
    }
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let inner = b.len();
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for k in 0..inner {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn transpose(a: &Matrix) -> Matrix {
    let n = a.len();
    let m = a.first().map_or(0, Vec::len);
    (0..m).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

pub fn matvec(a: &Matrix, x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum())
        .collect()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `xᵀ A x`.
pub fn quad_form(a: &Matrix, x: &[f64]) -> f64 {
    dot(x, &matvec(a, x))
}

pub fn max_abs(a: &Matrix) -> f64 {
    a.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hilbert(n: usize) -> Matrix {
        (0..n)
            .map(|i| (0..n).map(|j| 1.0 / (i + j + 1) as f64).collect())
            .collect()
    }

    #[test]
    fn diagonal() {
        let e = jacobi_eigen(&vec![vec![1.0, 0.0], vec![0.0, -1.0]]);
        assert_eq!(e.values, vec![-1.0, 1.0]);
        assert!((e.vectors[0][1].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3
        let e = jacobi_eigen(&vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn reconstructs_hilbert() {
        let h = hilbert(5);
        let e = jacobi_eigen(&h);
        // A = V diag(λ) Vᵀ
        for i in 0..5 {
            for j in 0..5 {
                let r: f64 = (0..5)
                    .map(|k| e.values[k] * e.vectors[k][i] * e.vectors[k][j])
                    .sum();
                assert!((r - h[i][j]).abs() < 1e-14, "{i},{j}");
            }
        }
        assert!(e.values.iter().all(|v| *v > 0.0));
        // smallest eigenvalue of the 3x3 Hilbert matrix is ~0.0026873
        let e3 = jacobi_eigen(&hilbert(3));
        assert!((e3.values[0] - 0.002_687_340_355_773_529).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let e = jacobi_eigen(&vec![vec![0.0; 3]; 3]);
        assert!(e.values.iter().all(|v| *v == 0.0));
    }
}
