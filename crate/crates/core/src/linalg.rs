//! Small dense linear-algebra helpers.
//!
//! Every matrix in this crate is tiny (4x4 up to a few dozen modes), so these
//! routines favour determinism and robustness over asymptotic speed.

use ndarray::Array2;
use num_complex::Complex64;

/// Largest entry of |U†U - I|.
pub fn unitarity_residual(u: &Array2<Complex64>) -> f64 {
    let n = u.nrows();
    assert_eq!(n, u.ncols(), "unitarity check needs a square matrix");
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += u[(k, i)].conj() * u[(k, j)];
            }
            if i == j {
                acc -= Complex64::new(1.0, 0.0);
            }
            let r = acc.norm();
            if !r.is_finite() {
                return f64::INFINITY;
            }
            if r > worst {
                worst = r;
            }
        }
    }
    worst
}

/// True iff `u` is square and unitary within `tolerance`.
pub fn is_unitary(u: &Array2<Complex64>, tolerance: f64) -> bool {
    u.nrows() == u.ncols() && unitarity_residual(u) <= tolerance
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(a: &Array2<Complex64>) -> Complex64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "determinant needs a square matrix");
    let mut m = a.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if m[(row, col)].norm() > m[(pivot, col)].norm() {
                pivot = row;
            }
        }
        if m[(pivot, col)].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for k in 0..n {
                let tmp = m[(col, k)];
                m[(col, k)] = m[(pivot, k)];
                m[(pivot, k)] = tmp;
            }
            det = -det;
        }
        let d = m[(col, col)];
        det *= d;
        for row in col + 1..n {
            let factor = m[(row, col)] / d;
            for k in col..n {
                let sub = factor * m[(col, k)];
                m[(row, k)] -= sub;
            }
        }
    }
    det
}

/// Eigenvalues (ascending) and matching orthonormal eigenvector columns of a
/// Hermitian matrix, via the cyclic complex Jacobi method.
pub fn hermitian_eigen(a: &Array2<Complex64>) -> (Vec<f64>, Array2<Complex64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigensolver needs a square matrix");
    let mut m = a.clone();
    let mut v = Array2::<Complex64>::eye(n);

    // Quadratic convergence makes 40 sweeps a generous cap for n <= 32.
    for _ in 0..40 {
        let mut fro = 0.0f64;
        let mut off = 0.0f64;
        for p in 0..n {
            for q in 0..n {
                let e = m[(p, q)].norm();
                fro += e * e;
                if p < q && e > off {
                    off = e;
                }
            }
        }
        if off <= 1e-15 * fro.sqrt().max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let abs = apq.norm();
                if abs < 1e-300 {
                    continue;
                }
                // Remove the phase of the pivot, then apply the classic real
                // Jacobi rotation that zeroes the (p, q) entry.
                let phase = apq / abs;
                let tau = (m[(q, q)].re - m[(p, p)].re) / (2.0 * abs);
                // Smaller-magnitude root of t^2 - 2 tau t - 1 = 0, the stable
                // choice for this rotation's sign convention.
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sp = phase * s; // J_qp entry is s * e^{-i arg}, used conjugated below
                // Columns: m <- m J with J = [[c, -s], [s e^{-ib}, c e^{-ib}]].
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp + sp.conj() * mkq;
                    m[(k, q)] = -s * mkp + c * phase.conj() * mkq;
                }
                // Rows: m <- J† m.
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk + sp * mqk;
                    m[(q, k)] = -s * mpk + c * phase * mqk;
                }
                // Accumulate eigenvectors.
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp + sp.conj() * vkq;
                    v[(k, q)] = -s * vkp + c * phase.conj() * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[(i, i)]
            .re
            .partial_cmp(&m[(j, j)].re)
            .expect("eigenvalues must be finite")
    });
    let values: Vec<f64> = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = Array2::<Complex64>::zeros((n, n));
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, new_col)] = v[(k, old_col)];
        }
    }
    (values, vectors)
}

/// Unit vector minimising |A v| (right singular vector of the smallest
/// singular value).  The first non-negligible component is rotated to be real
/// positive so the result is reproducible.
pub fn smallest_right_singular_vector(a: &Array2<Complex64>) -> Vec<Complex64> {
    let n = a.ncols();
    let mut h = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..a.nrows() {
                acc += a[(k, i)].conj() * a[(k, j)];
            }
            h[(i, j)] = acc;
        }
    }
    let (_, vectors) = hermitian_eigen(&h);
    let mut v: Vec<Complex64> = (0..n).map(|k| vectors[(k, 0)]).collect();
    fix_phase(&mut v);
    v
}

/// Rotate a vector's global phase so its first component with magnitude above
/// 1e-8 of the maximum is real positive.
pub fn fix_phase(v: &mut [Complex64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    if max == 0.0 {
        return;
    }
    for k in 0..v.len() {
        let norm = v[k].norm();
        if norm > 1e-8 * max {
            let rot = v[k].conj() / norm;
            for z in v.iter_mut() {
                *z *= rot;
            }
            return;
        }
    }
}

/// Numerical rank of a Gram (Hermitian PSD) matrix: eigenvalues whose square
/// roots fall below `cutoff` times the largest singular value count as zero.
pub fn gram_rank(g: &Array2<Complex64>, cutoff: f64) -> usize {
    let (values, _) = hermitian_eigen(g);
    let largest = values.iter().cloned().fold(0.0f64, f64::max);
    if largest <= 1e-300 {
        return 0;
    }
    values
        .iter()
        .filter(|&&lambda| lambda > cutoff * cutoff * largest)
        .count()
}

/// Orthonormalize the columns in place (two passes of modified Gram-Schmidt,
/// which leaves the implicit triangular factor with a real positive diagonal).
pub fn orthonormalize_columns(a: &mut Array2<Complex64>) {
    let n = a.ncols();
    let rows = a.nrows();
    for j in 0..n {
        for _pass in 0..2 {
            for i in 0..j {
                let mut r = Complex64::new(0.0, 0.0);
                for k in 0..rows {
                    r += a[(k, i)].conj() * a[(k, j)];
                }
                for k in 0..rows {
                    let sub = r * a[(k, i)];
                    a[(k, j)] -= sub;
                }
            }
        }
        let mut norm = 0.0f64;
        for k in 0..rows {
            norm += a[(k, j)].norm_sqr();
        }
        let norm = norm.sqrt();
        assert!(norm > 0.0, "columns must be linearly independent");
        for k in 0..rows {
            a[(k, j)] /= norm;
        }
    }
}
