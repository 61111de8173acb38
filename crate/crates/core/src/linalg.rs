//! Cyclic Jacobi eigendecomposition for real symmetric matrices.

/// Eigenpairs sorted by descending eigenvalue. `vectors[k]` is the unit
/// eigenvector belonging to `values[k]`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

const MAX_SWEEPS: usize = 64;

/// Diagonalizes the row-major symmetric `n x n` matrix `a`. Sweeps stop
/// once the off-diagonal Frobenius norm falls below `tol` times the
/// Frobenius norm of the input.
pub fn symmetric_eigen(a: &[f64], n: usize, tol: f64) -> SymmetricEigen {
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    let mut m = a.to_vec();
    // rows of `vt` are the eigenvector estimates
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }
    let total: f64 = m.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = tol * total.max(f64::MIN_POSITIVE);

    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        if off_diagonal_norm(&m, n) <= target {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                // entry below rounding of both diagonal entries
                let g = 100.0 * apq.abs();
                if sweeps > 4 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    m[p * n + q] = 0.0;
                    m[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut m, n, p, q, c, s);
                m[p * n + p] = app - t * apq;
                m[q * n + q] = aqq + t * apq;
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                rotate_rows(&mut vt, n, p, q, c, s);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].total_cmp(&m[i * n + i]));
    SymmetricEigen {
        values: order.iter().map(|&i| m[i * n + i]).collect(),
        vectors: order.iter().map(|&i| vt[i * n..(i + 1) * n].to_vec()).collect(),
        sweeps,
    }
}

fn off_diagonal_norm(m: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[i * n + j] * m[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Applies the Jacobi rotation to rows p, q and mirrors into columns.
fn rotate(m: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = m.split_at_mut(q * n);
    let row_p = &mut head[p * n..(p + 1) * n];
    let row_q = &mut tail[..n];
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let (akp, akq) = (row_p[k], row_q[k]);
        row_p[k] = c * akp - s * akq;
        row_q[k] = s * akp + c * akq;
    }
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        m[k * n + p] = m[p * n + k];
        m[k * n + q] = m[q * n + k];
    }
}

fn rotate_rows(vt: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = vt.split_at_mut(q * n);
    let row_p = &mut head[p * n..(p + 1) * n];
    let row_q = &mut tail[..n];
    for (vp, vq) in row_p.iter_mut().zip(row_q.iter_mut()) {
        let (a, b) = (*vp, *vq);
        *vp = c * a - s * b;
        *vq = s * a + c * b;
    }
}
