//! Tridiagonal kernels: a pivoted LU solve and the implicit QL iteration for
//! complex symmetric matrices.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::cmath::c;
use crate::{Error, Result, C64};

/// LU factors of `T - shift` for a tridiagonal `T`, with partial pivoting.
#[derive(Debug, Clone)]
pub struct TridiagLu {
    // Row k of U holds u0[k], u1[k], u2[k] on columns k, k+1, k+2.
    u0: Vec<C64>,
    u1: Vec<C64>,
    u2: Vec<C64>,
    mult: Vec<C64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    /// Factors the matrix with `lower[k] = T[k+1][k]`, `diag[k] = T[k][k]`,
    /// `upper[k] = T[k][k+1]`, shifted by `shift`.
    pub fn factor(lower: &[C64], diag: &[C64], upper: &[C64], shift: C64) -> Result<Self> {
        let n = diag.len();
        if n == 0 || lower.len() + 1 != n || upper.len() + 1 != n {
            return Err(Error::DimensionMismatch("tridiagonal bands"));
        }
        let scale = diag.iter().chain(lower).chain(upper).map(|z| z.norm()).fold(0.0, f64::max).max(shift.norm());
        let tiny = scale * f64::EPSILON * 1e-3;
        let mut u0: Vec<C64> = diag.iter().map(|d| d - shift).collect();
        let mut u1: Vec<C64> = upper.to_vec();
        u1.push(C64::default());
        let mut u2 = vec![C64::default(); n];
        let mut mult = vec![C64::default(); n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for k in 0..n - 1 {
            let sub = lower[k];
            if sub.norm() > u0[k].norm() {
                // Swap rows k and k+1.
                swapped[k] = true;
                let (a0, a1) = (u0[k], u1[k]);
                u0[k] = sub;
                u1[k] = u0[k + 1];
                u2[k] = u1[k + 1];
                let m = a0 / sub;
                mult[k] = m;
                u0[k + 1] = a1 - m * u1[k];
                u1[k + 1] = -m * u2[k];
            } else {
                if u0[k].norm() <= tiny {
                    return Err(Error::ShiftIsEigenvalue);
                }
                let m = sub / u0[k];
                mult[k] = m;
                u0[k + 1] -= m * u1[k];
            }
        }
        if u0[n - 1].norm() <= tiny {
            return Err(Error::ShiftIsEigenvalue);
        }
        Ok(Self { u0, u1, u2, mult, swapped })
    }

    pub fn dim(&self) -> usize {
        self.u0.len()
    }

    /// Solves `(T - shift) x = b` in place.
    pub fn solve(&self, b: &mut [C64]) {
        let n = self.dim();
        for k in 0..n - 1 {
            if self.swapped[k] {
                b.swap(k, k + 1);
            }
            let bk = b[k];
            b[k + 1] -= self.mult[k] * bk;
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            if k + 1 < n {
                s -= self.u1[k] * b[k + 1];
            }
            if k + 2 < n {
                s -= self.u2[k] * b[k + 2];
            }
            b[k] = s / self.u0[k];
        }
    }
}

/// `sqrt(a^2 + b^2)` without overflow, for complex `a`, `b`.
fn csqrt_sum_sq(a: C64, b: C64) -> C64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        return C64::default();
    }
    let (x, y) = (a / s, b / s);
    (x * x + y * y).sqrt() * s
}

const EXCEPTIONAL_EVERY: usize = 10;

/// Eigenvalues of the complex symmetric tridiagonal matrix with diagonal `d`
/// and off-diagonal `e` (`e.len() == d.len() - 1`), by implicit QL with
/// Wilkinson shifts. The rotations are complex orthogonal (`G^T G = I`); when
/// one degenerates the sweep is redone with an exceptional shift.
pub fn symmetric_ql_eigenvalues(d: &[C64], e: &[C64], max_iter_per_value: usize) -> Result<Vec<C64>> {
    let n = d.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if e.len() + 1 != n {
        return Err(Error::DimensionMismatch("off-diagonal length"));
    }
    let mut d = d.to_vec();
    let mut e: Vec<C64> = e.iter().copied().chain(core::iter::once(C64::default())).collect();
    let mut total_iter = 0usize;
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].norm() + d[m + 1].norm();
                if e[m].norm() <= f64::EPSILON * dd || e[m].norm() < f64::MIN_POSITIVE {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iter >= max_iter_per_value {
                return Err(Error::NoConvergence(total_iter));
            }
            iter += 1;
            total_iter += 1;
            let exceptional = iter % EXCEPTIONAL_EVERY == 0;
            if !ql_sweep(&mut d, &mut e, l, m, exceptional, iter) {
                // Degenerate rotation: retry the same block with an exceptional shift.
                if !ql_sweep(&mut d, &mut e, l, m, true, iter + 1) {
                    return Err(Error::NoConvergence(total_iter));
                }
            }
        }
    }
    Ok(d)
}

/// One implicit QL sweep on the block `l..=m`. Returns false, leaving the
/// block untouched, if a rotation degenerates.
fn ql_sweep(d: &mut [C64], e: &mut [C64], l: usize, m: usize, exceptional: bool, salt: usize) -> bool {
    let saved_d: Vec<C64> = d[l..=m].to_vec();
    let saved_e: Vec<C64> = e[l..=m].to_vec();
    let mut g = if exceptional {
        let k = salt as f64;
        let mu = d[l] + e[l].norm() * c(0.75 + 0.1 * (k * 1.3).sin(), 0.35 * (k * 0.7).cos());
        d[m] - mu
    } else {
        let g0 = (d[l + 1] - d[l]) / (2.0 * e[l]);
        let r = csqrt_sum_sq(g0, c(1.0, 0.0));
        let den = if (g0 + r).norm() >= (g0 - r).norm() { g0 + r } else { g0 - r };
        d[m] - d[l] + e[l] / den
    };
    let (mut s, mut cc, mut p) = (c(1.0, 0.0), c(1.0, 0.0), C64::default());
    let mut i = m;
    while i > l {
        i -= 1;
        let f = s * e[i];
        let b = cc * e[i];
        let r = csqrt_sum_sq(f, g);
        let size = f.norm().max(g.norm());
        if r.norm() <= 1e-8 * size || !r.re.is_finite() || !r.im.is_finite() {
            d[l..=m].copy_from_slice(&saved_d);
            e[l..=m].copy_from_slice(&saved_e);
            return false;
        }
        e[i + 1] = r;
        if size == 0.0 {
            // Exact deflation inside the block.
            d[i + 1] -= p;
            e[m] = C64::default();
            return true;
        }
        s = f / r;
        cc = g / r;
        g = d[i + 1] - p;
        let r2 = (d[i] - g) * s + 2.0 * cc * b;
        p = s * r2;
        d[i + 1] = g + p;
        g = cc * r2 - b;
    }
    d[l] -= p;
    e[l] = g;
    e[m] = C64::default();
    true
}

/// `p'(z) / p(z)` for `p(z) = det(T - z)`, `T` symmetric tridiagonal, from
/// the ratios `p_k / p_(k-1)` of the leading minors.
fn log_det_derivative(d: &[C64], e: &[C64], z: C64) -> C64 {
    let mut r = d[0] - z;
    let mut dr = c(-1.0, 0.0);
    let mut q = C64::default();
    for k in 0..d.len() {
        if k > 0 {
            let e2 = e[k - 1] * e[k - 1];
            let (rp, drp) = (r, dr);
            r = d[k] - z - e2 / rp;
            dr = -1.0 + e2 * drp / (rp * rp);
        }
        if r.norm() == 0.0 {
            r = c(f64::EPSILON * (d[k].norm() + 1.0), 0.0);
        }
        q += dr / r;
    }
    q
}

/// Newton steps on `det(T - z)` from each approximate eigenvalue. Each value
/// may move at most a third of the way to its nearest neighbour, so it cannot
/// be captured by another root; a step is kept only while steps shrink.
pub fn polish_eigenvalues(d: &[C64], e: &[C64], values: &mut [C64], steps: usize) {
    let starts = values.to_vec();
    for (k, z) in values.iter_mut().enumerate() {
        let start = starts[k];
        let gap = starts
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, w)| (w - start).norm())
            .fold(f64::INFINITY, f64::min);
        let max_move = gap / 3.0;
        let mut last = f64::INFINITY;
        for _ in 0..steps {
            let q = log_det_derivative(d, e, *z);
            if q.norm() == 0.0 || !q.re.is_finite() || !q.im.is_finite() {
                break;
            }
            let step = 1.0 / q;
            let size = step.norm();
            if size >= last || (*z - step - start).norm() > max_move {
                break;
            }
            *z -= step;
            last = size;
            if size <= 4.0 * f64::EPSILON * z.norm().max(1.0) {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::dense::{eigenvalues, DenseMatrix};
    use proptest::prelude::*;

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    fn dense_of(lower: &[C64], diag: &[C64], upper: &[C64]) -> DenseMatrix {
        let n = diag.len();
        let mut a = DenseMatrix::zeros(n);
        for k in 0..n {
            a[(k, k)] = diag[k];
            if k + 1 < n {
                a[(k + 1, k)] = lower[k];
                a[(k, k + 1)] = upper[k];
            }
        }
        a
    }

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
    }

    #[test]
    fn lu_solves_with_and_without_pivoting() {
        let lower = [c(5.0, 1.0), c(0.1, 0.0), c(-3.0, 2.0)];
        let diag = [c(1.0, 0.0), c(2.0, -1.0), c(0.0, 0.0), c(4.0, 0.5)];
        let upper = [c(1.0, 1.0), c(-2.0, 0.0), c(0.5, 0.5)];
        let x = [c(1.0, 2.0), c(-1.0, 0.0), c(0.5, -0.5), c(3.0, 1.0)];
        let a = dense_of(&lower, &diag, &upper);
        let mut b: Vec<C64> = (0..4).map(|i| (0..4).map(|j| a[(i, j)] * x[j]).sum()).collect();
        let lu = TridiagLu::factor(&lower, &diag, &upper, C64::default()).unwrap();
        lu.solve(&mut b);
        for k in 0..4 {
            assert!((b[k] - x[k]).norm() < 1e-13, "{k}: {}", b[k]);
        }
    }

    #[test]
    fn exact_eigenvalue_shift_is_reported() {
        let z = [c(0.0, 0.0)];
        let lu = TridiagLu::factor(&z, &[c(2.0, 0.0), c(2.0, 0.0)], &z, c(2.0, 0.0));
        assert!(matches!(lu, Err(Error::ShiftIsEigenvalue)));
    }

    #[test]
    fn two_by_two_swap_matrix() {
        let ev = sorted(symmetric_ql_eigenvalues(&[C64::default(); 2], &[c(1.0, 0.0)], 50).unwrap());
        assert!((ev[0] + 1.0).norm() < 1e-14 && (ev[1] - 1.0).norm() < 1e-14);
    }

    #[test]
    fn diagonal_matrix() {
        let d = [c(3.0, 1.0), c(-1.0, 0.0), c(2.0, -2.0)];
        let ev = symmetric_ql_eigenvalues(&d, &[C64::default(); 2], 50).unwrap();
        assert_eq!(ev, d.to_vec());
    }

    #[test]
    fn real_symmetric_laplacian() {
        let n = 50;
        let ev = sorted(symmetric_ql_eigenvalues(&vec![c(2.0, 0.0); n], &vec![c(-1.0, 0.0); n - 1], 50).unwrap());
        for (k, z) in ev.iter().enumerate() {
            let want = 2.0 - 2.0 * (core::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((z - want).norm() < 1e-12, "{k}: {z}");
        }
    }

    #[test]
    fn agrees_with_dense_qr_on_random_complex_symmetric() {
        let mut seed = 11u64;
        for n in [5usize, 17, 60] {
            let d: Vec<C64> = (0..n).map(|_| c(lcg(&mut seed) * 4.0, lcg(&mut seed))).collect();
            let e: Vec<C64> = (0..n - 1).map(|_| c(lcg(&mut seed) * 2.0, lcg(&mut seed))).collect();
            let ql = symmetric_ql_eigenvalues(&d, &e, 60).unwrap();
            let qr = eigenvalues(dense_of(&e, &d, &e), 200).unwrap();
            for z in &ql {
                let best = qr.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
                assert!(best < 1e-9, "n={n}: {z} off by {best}");
            }
        }
    }

    #[test]
    fn polishing_recovers_perturbed_eigenvalues() {
        let n = 40;
        let mut seed = 5u64;
        let d: Vec<C64> = (0..n).map(|k| c(k as f64, lcg(&mut seed))).collect();
        let e: Vec<C64> = (0..n - 1).map(|_| c(0.3, 0.2 * lcg(&mut seed))).collect();
        let exact = eigenvalues(dense_of(&e, &d, &e), 200).unwrap();
        let mut rough: Vec<C64> = exact.iter().map(|z| z + c(1e-6, -2e-6)).collect();
        polish_eigenvalues(&d, &e, &mut rough, 6);
        for (a, b) in rough.iter().zip(&exact) {
            assert!((a - b).norm() < 1e-11, "{a} vs {b}");
        }
    }

    proptest! {
        #[test]
        fn trace_is_preserved(vals in proptest::collection::vec(-3.0f64..3.0, 12)) {
            let d: Vec<C64> = vals[..6].iter().zip(&vals[6..]).map(|(a, b)| c(*a, 0.3 * b)).collect();
            let e: Vec<C64> = vals[1..6].iter().map(|a| c(0.5 + 0.1 * a, 0.2)).collect();
            let ev = symmetric_ql_eigenvalues(&d, &e, 60).unwrap();
            let tr: C64 = d.iter().sum();
            let s: C64 = ev.iter().sum();
            prop_assert!((tr - s).norm() < 1e-10);
        }

        #[test]
        fn lu_residual_is_small(vals in proptest::collection::vec(-2.0f64..2.0, 16)) {
            let n = 6;
            let diag: Vec<C64> = (0..n).map(|k| c(vals[k], vals[k + 6] * 0.5)).collect();
            let lower: Vec<C64> = (0..n - 1).map(|k| c(vals[k + 1], 0.3)).collect();
            let upper: Vec<C64> = (0..n - 1).map(|k| c(vals[k + 10 - 5], -0.2)).collect();
            if let Ok(lu) = TridiagLu::factor(&lower, &diag, &upper, c(0.1, 0.05)) {
                let b0: Vec<C64> = (0..n).map(|k| c(1.0, k as f64)).collect();
                let mut x = b0.clone();
                lu.solve(&mut x);
                let a = dense_of(&lower, &diag, &upper);
                let scale: f64 = x.iter().map(|z| z.norm()).fold(1.0, f64::max);
                for i in 0..n {
                    let ax: C64 = (0..n).map(|j| a[(i, j)] * x[j]).sum::<C64>() - c(0.1, 0.05) * x[i];
                    prop_assert!((ax - b0[i]).norm() < 1e-9 * scale);
                }
            }
        }
    }
}
