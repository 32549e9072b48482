#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use ritz_core::linalg::{ComplexMatrix, HermitianMatrix, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn hermitian(rng: &mut ChaCha8Rng, d: usize) -> HermitianMatrix {
    HermitianMatrix::new(gaussian(rng, d, d)).unwrap()
}

pub fn positive_definite(rng: &mut ChaCha8Rng, d: usize) -> HermitianMatrix {
    let b = gaussian(rng, d, d);
    let m = b.matmul(&b.adjoint()).unwrap().add(&ComplexMatrix::identity(d).scale_real(0.1)).unwrap();
    HermitianMatrix::new(m).unwrap()
}

pub fn real_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Eigenvalues (non-increasing) by Householder reduction to a real
/// tridiagonal matrix followed by Sturm-sequence bisection. Shares no code
/// with the Jacobi solver under test.
pub fn sturm_eigenvalues(a: &HermitianMatrix) -> Vec<f64> {
    let n = a.dim();
    let mut m: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| a.as_matrix()[(i, j)]).collect()).collect();
    for col in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (col + 1..n).map(|i| m[i][col]).collect();
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 { C64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        let mut v = x.clone();
        v[0] += phase * norm;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if vn == 0.0 {
            continue;
        }
        // H = I − 2 v v*/(v*v) acting on indices col+1..n
        let off = col + 1;
        // M ← H M
        for j in 0..n {
            let s: C64 = (0..v.len()).map(|i| v[i].conj() * m[off + i][j]).sum();
            let f = s * (2.0 / vn);
            for i in 0..v.len() {
                m[off + i][j] -= v[i] * f;
            }
        }
        // M ← M H
        for i in 0..n {
            let s: C64 = (0..v.len()).map(|j| m[i][off + j] * v[j]).sum();
            let f = s * (2.0 / vn);
            for j in 0..v.len() {
                m[i][off + j] -= f * v[j].conj();
            }
        }
    }
    let diag: Vec<f64> = (0..n).map(|i| m[i][i].re).collect();
    let off2: Vec<f64> = (1..n).map(|i| m[i][i - 1].norm_sqr()).collect();

    // number of eigenvalues strictly below x
    let below = |x: f64| -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..n {
            q = diag[i] - x - if i == 0 { 0.0 } else { off2[i - 1] / q };
            if q == 0.0 {
                q = -f64::EPSILON * (1.0 + x.abs());
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let radius = (0..n)
        .map(|i| {
            let l = if i > 0 { off2[i - 1].sqrt() } else { 0.0 };
            let r = if i + 1 < n { off2[i].sqrt() } else { 0.0 };
            diag[i].abs() + l + r
        })
        .fold(0.0, f64::max)
        + 1.0;
    let mut out: Vec<f64> = (0..n)
        .map(|k| {
            // k-th smallest eigenvalue: smallest x with below(x) > k
            let (mut lo, mut hi) = (-radius, radius);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if below(mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect();
    out.reverse();
    out
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
