//! Minimal dense linear algebra for small Hermitian matrices.

use ndarray::Array2;
use num_complex::Complex64 as C64;

/// Largest |a_ij - conj(a_ji)| over all pairs.
pub fn hermiticity_defect(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub fn trace(m: &Array2<C64>) -> C64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

pub fn trace_of_product(a: &Array2<C64>, b: &Array2<C64>) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Adequate for the ≤ 20-dimensional density matrices used here; returns the
/// eigenvalues sorted ascending.
pub fn hermitian_eigenvalues(m: &Array2<C64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    // Symmetrize away rounding noise so diagonals stay real.
    for i in 0..n {
        for j in 0..n {
            let h = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = h;
            a[(j, i)] = h.conj();
        }
    }
    let off = |a: &Array2<C64>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a[(i, j)].norm_sqr();
            }
        }
        s
    };
    let scale: f64 = (0..n).map(|i| a[(i, i)].re.abs()).fold(1e-300, f64::max);
    let tol = (scale * 1e-14).powi(2) * (n * n) as f64;
    for _sweep in 0..60 {
        if off(&a) <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() < scale * 1e-15 {
                    continue;
                }
                // Phase that makes the pivot real, then a real Jacobi rotation.
                let theta_phase = apq / apq.norm();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let b = apq.norm();
                let tau = (aqq - app) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U = I with block [[c, s*phase], [-s*conj(phase), c]] in (p, q).
                let upq = theta_phase * s;
                let uqp = -theta_phase.conj() * s;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * uqp;
                    a[(k, q)] = akp * upq + akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * uqp.conj();
                    a[(q, k)] = apk * upq.conj() + aqk * c;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}
