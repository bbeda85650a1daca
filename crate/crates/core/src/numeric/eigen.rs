//! Eigenvalues and eigenvectors of a [`DiscreteOperator`].

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::cmath::c;
use crate::{Error, Result, C64};

use super::dense::eigenvalues;
use super::operator::DiscreteOperator;
use super::tridiag::{polish_eigenvalues, symmetric_ql_eigenvalues, TridiagLu};

/// Largest operator dimension accepted by [`eigen_all`].
pub const DEFAULT_DENSE_CAP: usize = 2000;
/// Relative change of successive Rayleigh quotients that counts as converged.
pub const NEAR_TOL: f64 = 1e-12;

const MAX_SWEEPS_PER_VALUE: usize = 60;
const POLISH_STEPS: usize = 8;
const MAX_INVERSE_STEPS: usize = 400;
const SHIFT_RETRIES: usize = 4;
/// Once the quotient has settled this far, the shift follows it.
const RAYLEIGH_SWITCH: f64 = 1e-6;

/// An eigenvalue with its right eigenvector on the full grid (boundary zeros
/// included), scaled to unit maximum modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: C64,
    pub vector: Vec<C64>,
    pub iterations: usize,
    /// `|value - guess|` for [`eigen_near`]; zero otherwise.
    pub distance_from_guess: f64,
}

impl EigenPair {
    /// Largest modulus among the `points` outermost values on each side,
    /// relative to the peak. Boundary zeros are skipped.
    pub fn tail_ratio(&self, points: usize) -> f64 {
        let v = &self.vector;
        let n = v.len();
        let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if peak == 0.0 || n < 2 * points + 2 {
            return 1.0;
        }
        let edge = v[1..=points].iter().chain(&v[n - 1 - points..n - 1]).map(|z| z.norm()).fold(0.0, f64::max);
        edge / peak
    }
}

fn check_cap(op: &DiscreteOperator, cap: usize) -> Result<()> {
    if op.dim() > cap {
        return Err(Error::DimensionTooLarge { dim: op.dim(), cap });
    }
    Ok(())
}

/// All eigenvalues, from the complex symmetric form of the operator: implicit
/// QL, then Newton steps on the characteristic polynomial to remove the error
/// the non-unitary rotations accumulate.
pub fn eigen_all(op: &DiscreteOperator) -> Result<Vec<C64>> {
    eigen_all_with_cap(op, DEFAULT_DENSE_CAP)
}

pub fn eigen_all_with_cap(op: &DiscreteOperator, cap: usize) -> Result<Vec<C64>> {
    check_cap(op, cap)?;
    let (d, e, _) = op.symmetric_form();
    let mut values = symmetric_ql_eigenvalues(&d, &e, MAX_SWEEPS_PER_VALUE)?;
    polish_eigenvalues(&d, &e, &mut values, POLISH_STEPS);
    Ok(values)
}

/// All eigenvalues by Hessenberg reduction and shifted QR on the dense matrix.
/// `O(n^3)`; meant for cross-checks on small operators.
pub fn eigen_all_dense(op: &DiscreteOperator, cap: usize) -> Result<Vec<C64>> {
    check_cap(op, cap)?;
    eigenvalues(op.to_dense(), 200)
}

/// `y^T S y / y^T y`, falling back to `y^H S y / y^H y` when `y^T y` nearly vanishes.
fn rayleigh(d: &[C64], e: &[C64], y: &[C64]) -> C64 {
    let n = d.len();
    let sy: Vec<C64> = (0..n)
        .map(|i| {
            let mut s = d[i] * y[i];
            if i > 0 {
                s += e[i - 1] * y[i - 1];
            }
            if i + 1 < n {
                s += e[i] * y[i + 1];
            }
            s
        })
        .collect();
    let yy: C64 = y.iter().map(|a| a * a).sum();
    let norm2: f64 = y.iter().map(|a| a.norm_sqr()).sum();
    if yy.norm() > 1e-3 * norm2 {
        y.iter().zip(&sy).map(|(a, b)| a * b).sum::<C64>() / yy
    } else {
        y.iter().zip(&sy).map(|(a, b)| a.conj() * b).sum::<C64>() / norm2
    }
}

fn normalize(y: &mut [C64]) {
    let peak = y.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak > 0.0 {
        y.iter_mut().for_each(|z| *z /= peak);
    }
}

fn factor_near(e: &[C64], d: &[C64], shift: C64) -> Result<(TridiagLu, C64)> {
    let mut s = shift;
    for k in 0..SHIFT_RETRIES {
        match TridiagLu::factor(e, d, e, s) {
            Ok(lu) => return Ok((lu, s)),
            Err(Error::ShiftIsEigenvalue) => {
                let bump = 1e-10 * s.norm().max(1.0) * f64::from(1 << k);
                s += c(bump, 0.7 * bump);
            }
            Err(other) => return Err(other),
        }
    }
    Err(Error::ShiftIsEigenvalue)
}

/// Inverse iteration from `guess`: solves with the fixed shift until the
/// Rayleigh quotient settles, then lets the shift follow the quotient until
/// successive quotients agree to [`NEAR_TOL`]. A shift that is an eigenvalue
/// to working precision is nudged and retried.
pub fn eigen_near(op: &DiscreteOperator, guess: C64) -> Result<EigenPair> {
    let (d, e, w) = op.symmetric_form();
    let n = d.len();
    let (mut lu, _) = factor_near(&e, &d, guess)?;
    let mut y: Vec<C64> = (0..n).map(|k| c(1.0, 0.1 * ((k % 7) as f64))).collect();
    let mut prev = guess;
    let mut following = false;
    for it in 1..=MAX_INVERSE_STEPS {
        lu.solve(&mut y);
        normalize(&mut y);
        let rho = rayleigh(&d, &e, &y);
        let change = (rho - prev).norm() / rho.norm().max(1.0);
        if change < NEAR_TOL && it > 1 {
            return Ok(finish(op, &w, y, rho, it, guess));
        }
        if !following && change < RAYLEIGH_SWITCH && it > 1 {
            following = true;
        }
        if following {
            match factor_near(&e, &d, rho) {
                Ok((f, _)) => lu = f,
                // The quotient is an eigenvalue to working precision.
                Err(Error::ShiftIsEigenvalue) => return Ok(finish(op, &w, y, rho, it, guess)),
                Err(other) => return Err(other),
            }
        }
        prev = rho;
    }
    Err(Error::NoConvergence(MAX_INVERSE_STEPS))
}

fn finish(op: &DiscreteOperator, w: &[C64], y: Vec<C64>, value: C64, iterations: usize, guess: C64) -> EigenPair {
    let mut psi: Vec<C64> = y.iter().zip(w).map(|(a, b)| a / b).collect();
    normalize(&mut psi);
    EigenPair { value, vector: op.pad(&psi), iterations, distance_from_guess: (value - guess).norm() }
}

/// Eigenvector for an eigenvalue already known to working precision: a few
/// inverse-iteration steps with the shift held at `value`.
pub fn eigenvector_at(op: &DiscreteOperator, value: C64) -> Result<EigenPair> {
    let (d, e, w) = op.symmetric_form();
    let n = d.len();
    let (lu, _) = factor_near(&e, &d, value)?;
    let mut y = vec![c(1.0, 0.0); n];
    for k in 0..n {
        y[k] = c(1.0, 0.01 * ((k % 11) as f64));
    }
    for _ in 0..3 {
        lu.solve(&mut y);
        normalize(&mut y);
    }
    Ok(finish(op, &w, y, value, 3, value))
}

/// Which eigenvalues count as bound states of the continuum-free problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpuriousFilter {
    /// Outermost interior points examined at each end.
    pub tail_points: usize,
    /// Largest allowed tail modulus relative to the peak.
    pub tail_ratio: f64,
    /// Largest allowed `|Im E| / max(1, |E|)`.
    pub max_rel_imag: f64,
    /// Largest allowed `|E|`.
    pub energy_cap: f64,
}

impl Default for SpuriousFilter {
    fn default() -> Self {
        Self { tail_points: 3, tail_ratio: 1e-3, max_rel_imag: 1e-6, energy_cap: 3000.0 }
    }
}

impl SpuriousFilter {
    pub fn passes_value(&self, z: C64) -> bool {
        z.norm() <= self.energy_cap && z.im.abs() <= self.max_rel_imag * z.norm().max(1.0)
    }
}

/// Eigenpairs that pass `filter`, sorted by real part. Eigenvectors are computed
/// only for values that pass the cheap tests.
pub fn filter_bound_states(op: &DiscreteOperator, values: &[C64], filter: &SpuriousFilter) -> Result<Vec<EigenPair>> {
    let mut out = Vec::new();
    for &z in values.iter().filter(|z| filter.passes_value(**z)) {
        let pair = eigenvector_at(op, z)?;
        if pair.tail_ratio(filter.tail_points) <= filter.tail_ratio {
            out.push(pair);
        }
    }
    out.sort_by(|a, b| a.value.re.total_cmp(&b.value.re));
    Ok(out)
}
