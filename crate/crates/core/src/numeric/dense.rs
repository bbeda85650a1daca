//! Dense complex matrices: Householder reduction to Hessenberg form and
//! single-shift QR for the eigenvalues.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::cmath::c;
use crate::{Error, Result, C64};

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C64::default(); n * n] }
    }

    pub fn from_rows(rows: &[&[C64]]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch("rows must form a square matrix"));
            }
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        Ok(m)
    }

    pub fn from_diagonal(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    /// Companion matrix of the monic polynomial `x^n + a[n-1] x^(n-1) + ... + a[0]`.
    pub fn companion(lower_coeffs: &[C64]) -> Self {
        let n = lower_coeffs.len();
        let mut m = Self::zeros(n);
        for i in 1..n {
            m[(i, i - 1)] = c(1.0, 0.0);
        }
        for (i, &a) in lower_coeffs.iter().enumerate() {
            m[(i, n - 1)] = -a;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

impl core::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

/// Unitary similarity to upper Hessenberg form, in place.
pub fn hessenberg(a: &mut DenseMatrix) {
    let n = a.n;
    if n < 3 {
        return;
    }
    let mut v = vec![C64::default(); n];
    for k in 0..n - 2 {
        let norm: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { c(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        for i in k + 1..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for i in k + 1..n {
            v[i] /= vnorm;
        }
        // A <- (I - 2 v v^H) A
        for j in k..n {
            let mut s = C64::default();
            for i in k + 1..n {
                s += v[i].conj() * a[(i, j)];
            }
            s *= 2.0;
            for i in k + 1..n {
                let vi = v[i];
                a[(i, j)] -= vi * s;
            }
        }
        // A <- A (I - 2 v v^H)
        for i in 0..n {
            let mut s = C64::default();
            for j in k + 1..n {
                s += a[(i, j)] * v[j];
            }
            s *= 2.0;
            for j in k + 1..n {
                let vj = v[j].conj();
                a[(i, j)] -= s * vj;
            }
        }
        for i in k + 2..n {
            a[(i, k)] = C64::default();
        }
    }
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: C64, b: C64, cc: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * cc).sqrt();
    let e1 = (a + d) * 0.5 + disc;
    let e2 = (a + d) * 0.5 - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// All eigenvalues of a general complex matrix.
pub fn eigenvalues(mut a: DenseMatrix, max_iter_per_value: usize) -> Result<Vec<C64>> {
    hessenberg(&mut a);
    hessenberg_eigenvalues(a, max_iter_per_value)
}

/// Eigenvalues of an upper Hessenberg matrix by shifted QR with Givens rotations.
pub fn hessenberg_eigenvalues(mut h: DenseMatrix, max_iter_per_value: usize) -> Result<Vec<C64>> {
    let n = h.n;
    let mut out = vec![C64::default(); n];
    if n == 0 {
        return Ok(out);
    }
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let mut rot: Vec<(C64, C64)> = vec![(C64::default(), C64::default()); n];
    loop {
        // Locate the bottom of the active unreduced block.
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let diag = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if sub <= f64::EPSILON * diag || sub < f64::MIN_POSITIVE {
                h[(l, l - 1)] = C64::default();
                break;
            }
            l -= 1;
        }
        if l == hi {
            out[hi] = h[(hi, hi)];
            if hi == 0 {
                return Ok(out);
            }
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if iter > max_iter_per_value {
            return Err(Error::NoConvergence(total));
        }
        let mu = if iter % 11 == 0 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + c(h[(hi, hi - 1)].norm(), 0.0) * 0.75
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for k in l..=hi {
            h[(k, k)] -= mu;
        }
        for k in l..hi {
            let a = h[(k, k)];
            let b = h[(k + 1, k)];
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (cs, sn) = if r == 0.0 { (c(1.0, 0.0), C64::default()) } else { (a / r, b / r) };
            rot[k] = (cs, sn);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = cs.conj() * x + sn.conj() * y;
                h[(k + 1, j)] = -sn * x + cs * y;
            }
        }
        for k in l..hi {
            let (cs, sn) = rot[k];
            let top = (k + 2).min(hi);
            for i in l..=top {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * cs + y * sn;
                h[(i, k + 1)] = -x * sn.conj() + y * cs.conj();
            }
        }
        for k in l..=hi {
            h[(k, k)] += mu;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn diagonal_matrix() {
        let d = [c(3.0, 1.0), c(-1.0, 0.0), c(0.5, -2.0)];
        let ev = sorted(eigenvalues(DenseMatrix::from_diagonal(&d), 50).unwrap());
        let want = sorted(d.to_vec());
        for (a, b) in ev.iter().zip(&want) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn swap_matrix() {
        let o = c(0.0, 0.0);
        let i = c(1.0, 0.0);
        let m = DenseMatrix::from_rows(&[&[o, i], &[i, o]]).unwrap();
        let ev = sorted(eigenvalues(m, 50).unwrap());
        assert!((ev[0] + 1.0).norm() < 1e-14);
        assert!((ev[1] - 1.0).norm() < 1e-14);
    }

    #[test]
    fn rotation_has_complex_eigenvalues() {
        let o = c(0.0, 0.0);
        let i = c(1.0, 0.0);
        let m = DenseMatrix::from_rows(&[&[o, -i], &[i, o]]).unwrap();
        let ev = sorted(eigenvalues(m, 50).unwrap());
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-14 || (ev[0] - c(0.0, 1.0)).norm() < 1e-14);
        assert!((ev[0] + ev[1]).norm() < 1e-14);
    }

    #[test]
    fn companion_roots() {
        // (x - 1)(x - 2)(x - 3) = x^3 - 6x^2 + 11x - 6
        let m = DenseMatrix::companion(&[c(-6.0, 0.0), c(11.0, 0.0), c(-6.0, 0.0)]);
        let ev = sorted(eigenvalues(m, 50).unwrap());
        for (k, z) in ev.iter().enumerate() {
            assert!((z - (k as f64 + 1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn hessenberg_preserves_trace_and_shape() {
        let n = 7;
        let mut m = DenseMatrix::zeros(n);
        let mut seed = 1u64;
        for i in 0..n {
            for j in 0..n {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let x = ((seed >> 11) as f64) / ((1u64 << 53) as f64) - 0.5;
                m[(i, j)] = c(x, 0.3 * x * (i as f64 - j as f64));
            }
        }
        let trace: C64 = (0..n).map(|i| m[(i, i)]).sum();
        let mut h = m.clone();
        hessenberg(&mut h);
        for i in 2..n {
            for j in 0..i - 1 {
                assert_eq!(h[(i, j)], C64::default());
            }
        }
        let t2: C64 = (0..n).map(|i| h[(i, i)]).sum();
        assert!((trace - t2).norm() < 1e-13);
        let ev = eigenvalues(m, 60).unwrap();
        let s: C64 = ev.iter().sum();
        assert!((s - trace).norm() < 1e-12);
    }

    #[test]
    fn tridiagonal_toeplitz_spectrum() {
        // Eigenvalues of tridiag(-1, 2, -1) are 2 - 2 cos(k pi/(n+1)).
        let n = 40;
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = c(2.0, 0.0);
            if i + 1 < n {
                m[(i, i + 1)] = c(-1.0, 0.0);
                m[(i + 1, i)] = c(-1.0, 0.0);
            }
        }
        let ev = sorted(eigenvalues(m, 60).unwrap());
        for (k, z) in ev.iter().enumerate() {
            let want = 2.0 - 2.0 * (core::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((z - want).norm() < 1e-12, "{k}: {z} vs {want}");
        }
    }
}
