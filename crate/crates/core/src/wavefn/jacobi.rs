//! Jacobi polynomials with complex parameters and the terminating Gauss series.

use alloc::vec;
use alloc::vec::Vec;

use crate::cmath::c;
use crate::{Error, Result, C64};

/// How the Jacobi parameters are obtained from `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JacobiConvention {
    /// `(2u, 2v)`. Solves the Eckart equation.
    #[default]
    Standard,
    /// `(u/2, v/2)`. Kept for comparison; it fails the residual test for `N >= 1`.
    Halved,
}

impl JacobiConvention {
    pub fn parameters(self, u: C64, v: C64) -> (C64, C64) {
        match self {
            JacobiConvention::Standard => (2.0 * u, 2.0 * v),
            JacobiConvention::Halved => (0.5 * u, 0.5 * v),
        }
    }
}

fn recurrence_coeffs(k: u32, alpha: C64, beta: C64) -> (C64, C64, C64, C64) {
    // 2(k+1)(k+a+b+1)(2k+a+b) P_{k+1}
    //   = (2k+a+b+1)[(2k+a+b+2)(2k+a+b) z + a^2 - b^2] P_k - 2(k+a)(k+b)(2k+a+b+2) P_{k-1}
    let kf = f64::from(k);
    let s = 2.0 * kf + alpha + beta;
    let a0 = 2.0 * (kf + 1.0) * (kf + alpha + beta + 1.0) * s;
    let a1 = (s + 1.0) * (alpha * alpha - beta * beta);
    let a2 = (s + 1.0) * (s + 2.0) * s;
    let a3 = 2.0 * (kf + alpha) * (kf + beta) * (s + 2.0);
    (a0, a1, a2, a3)
}

/// `P_N^(alpha, beta)(z)` by the three-term recurrence.
pub fn jacobi_poly(n: u32, alpha: C64, beta: C64, z: C64) -> C64 {
    if n == 0 {
        return c(1.0, 0.0);
    }
    let mut prev = c(1.0, 0.0);
    let mut cur = (alpha + 1.0) + (alpha + beta + 2.0) * (z - 1.0) * 0.5;
    for k in 1..n {
        let (a0, a1, a2, a3) = recurrence_coeffs(k, alpha, beta);
        let next = ((a1 + a2 * z) * cur - a3 * prev) / a0;
        prev = cur;
        cur = next;
    }
    cur
}

/// `d/dz P_N^(alpha, beta)(z) = (N + alpha + beta + 1)/2 P_{N-1}^(alpha+1, beta+1)(z)`.
pub fn jacobi_derivative(n: u32, alpha: C64, beta: C64, z: C64) -> C64 {
    if n == 0 {
        return C64::default();
    }
    (f64::from(n) + alpha + beta + 1.0) * 0.5 * jacobi_poly(n - 1, alpha + 1.0, beta + 1.0, z)
}

/// Power-basis coefficients of `P_N^(alpha, beta)`, constant term first.
pub fn jacobi_coefficients(n: u32, alpha: C64, beta: C64) -> Vec<C64> {
    let mut prev = vec![c(1.0, 0.0)];
    if n == 0 {
        return prev;
    }
    let half = 0.5 * (alpha + beta + 2.0);
    let mut cur = vec![(alpha + 1.0) - half, half];
    for k in 1..n {
        let (a0, a1, a2, a3) = recurrence_coeffs(k, alpha, beta);
        let mut next = vec![C64::default(); cur.len() + 1];
        for (j, &x) in cur.iter().enumerate() {
            next[j] += a1 * x;
            next[j + 1] += a2 * x;
        }
        for (j, &x) in prev.iter().enumerate() {
            next[j] -= a3 * x;
        }
        for x in next.iter_mut() {
            *x /= a0;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// `2F1(a, b; c; z)` for `b = -N`, summed exactly.
pub fn hyp2f1_terminating(a: C64, b: C64, c_param: C64, z: C64) -> Result<C64> {
    let nf = -b.re;
    if b.im != 0.0 || nf < 0.0 || nf.fract() != 0.0 {
        return Err(Error::BadParameters("b must be a non-positive integer"));
    }
    let n = nf as u32;
    for j in 0..n {
        if (c_param + f64::from(j)).norm() == 0.0 {
            return Err(Error::BadParameters("c is a non-positive integer above -N"));
        }
    }
    let mut term = c(1.0, 0.0);
    let mut sum = term;
    for k in 0..n {
        let kf = f64::from(k);
        term = term * (a + kf) * (b + kf) / ((c_param + kf) * (kf + 1.0)) * z;
        sum += term;
    }
    Ok(sum)
}
