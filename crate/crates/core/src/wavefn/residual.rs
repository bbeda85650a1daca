//! Finite-difference residual of the Schrodinger equation along the contour.

use alloc::vec;
use alloc::vec::Vec;

use crate::cmath::c;
use crate::contour::ContourGrid;
use crate::potentials::Model;
use crate::{Error, Result, C64};

use super::{check_len, WaveSamples};

/// Half-width of the default central stencil (11 points).
pub const DEFAULT_STENCIL_HALF_WIDTH: usize = 5;

/// Values below this magnitude are treated as underflowed and skipped.
const UNDERFLOW: f64 = 1e-250;

/// Weights of the first and second derivative on the nodes `-m..=m` (unit spacing).
pub fn fornberg_weights(m: usize) -> (Vec<f64>, Vec<f64>) {
    let n = 2 * m + 1;
    let x: Vec<f64> = (0..n).map(|j| j as f64 - m as f64).collect();
    let order = 2;
    let mut w = vec![[0.0f64; 3]; n];
    w[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0];
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i];
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    w[i][k] = c1 * (k as f64 * w[i - 1][k - 1] - c5 * w[i - 1][k]) / c2;
                }
                w[i][0] = -c1 * c5 * w[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                w[j][k] = (c4 * w[j][k] - k as f64 * w[j][k - 1]) / c3;
            }
            w[j][0] = c4 * w[j][0] / c3;
        }
        c1 = c2;
    }
    (w.iter().map(|r| r[1]).collect(), w.iter().map(|r| r[2]).collect())
}

/// `max |-psi'' + (V - E) psi| / max(|psi| |V - E|, floor)` over interior points,
/// with derivatives in the model's own coordinate, using the default 11-point stencil.
pub fn schrodinger_residual(samples: &WaveSamples, model: &Model, energy: C64, grid: &ContourGrid) -> Result<f64> {
    check_len(samples, grid)?;
    schrodinger_residual_values(&samples.values, model, energy, grid, DEFAULT_STENCIL_HALF_WIDTH)
}

pub fn schrodinger_residual_values(
    values: &[C64],
    model: &Model,
    energy: C64,
    grid: &ContourGrid,
    half_width: usize,
) -> Result<f64> {
    let n = grid.len();
    let required = (2 * half_width + 3).max(7);
    if n < required || half_width == 0 {
        return Err(Error::GridTooCoarse { points: n, required });
    }
    if values.len() != n {
        return Err(Error::DimensionMismatch("samples and grid differ in length"));
    }
    let (w1, w2) = fornberg_weights(half_width);
    let h = grid.step();
    let profile = grid.profile();
    let mut worst: f64 = 0.0;
    for i in half_width..n - half_width {
        let psi = values[i];
        if psi.norm() < UNDERFLOW {
            continue;
        }
        let mut d1 = C64::default();
        let mut d2 = C64::default();
        for j in 0..=2 * half_width {
            let v = values[i + j - half_width];
            d1 += w1[j] * v;
            d2 += w2[j] * v;
        }
        d1 /= h;
        d2 /= h * h;
        let t = grid.points()[i].t;
        let (x1, x2) = model.metric(c(t, 0.0), profile)?;
        let psi_x = d1 / x1;
        let psi_xx = (d2 - psi_x * x2) / (x1 * x1);
        let vme = model.value_on_grid(grid, i)? - energy;
        let res = (-psi_xx + vme * psi).norm() / (psi.norm() * vme.norm()).max(f64::MIN_POSITIVE);
        worst = worst.max(res);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::{build_grid, EpsilonProfile};
    use crate::potentials::{EckartParams, NatanzonParams};
    use crate::spectrum::Branch;
    use crate::wavefn::{sample_state, JacobiConvention, StateSpec};

    #[test]
    fn weights_are_the_classical_ones() {
        let (w1, w2) = fornberg_weights(2);
        let want1 = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        let want2 = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        for j in 0..5 {
            assert!((w1[j] - want1[j]).abs() < 1e-14);
            assert!((w2[j] - want2[j]).abs() < 1e-14);
        }
        let (w1, w2) = fornberg_weights(5);
        // Exact on polynomials up to degree 10.
        let d1: f64 = w1.iter().enumerate().map(|(j, w)| w * (j as f64 - 5.0).powi(9)).sum();
        let d2: f64 = w2.iter().enumerate().map(|(j, w)| w * (j as f64 - 5.0).powi(2)).sum();
        assert!(d1.abs() < 1e-8);
        assert!((d2 - 2.0).abs() < 1e-12);
    }

    fn grid() -> ContourGrid {
        build_grid(EpsilonProfile::decaying(0.25).unwrap(), -12.0, 12.0, 2001).unwrap()
    }

    #[test]
    fn eckart_ground_state() {
        let g = grid();
        let p = EckartParams::new(3.0, 1.0).unwrap();
        let s = sample_state(&StateSpec::eckart(p, 0).unwrap(), &g).unwrap();
        let res = schrodinger_residual(&s, &Model::Eckart(p), c(-3.75, 0.0), &g).unwrap();
        assert!(res < 1e-6, "{res}");
    }

    #[test]
    fn natanzon_doublet_both_branches() {
        let g = grid();
        let p = NatanzonParams::new(1.0, 10.0).unwrap();
        for b in [Branch::Minus, Branch::Plus] {
            let st = StateSpec::natanzon(p, 0, b).unwrap();
            let s = sample_state(&st, &g).unwrap();
            let res = schrodinger_residual(&s, &Model::Natanzon(p), c(st.energy(), 0.0), &g).unwrap();
            assert!(res < 1e-5, "{b:?}: {res}");
        }
    }

    #[test]
    fn five_point_stencil_is_not_enough_for_the_fast_branch() {
        let g = grid();
        let p = NatanzonParams::new(1.0, 10.0).unwrap();
        let st = StateSpec::natanzon(p, 0, Branch::Plus).unwrap();
        let s = sample_state(&st, &g).unwrap();
        let res = schrodinger_residual_values(&s.values, &Model::Natanzon(p), c(st.energy(), 0.0), &g, 2).unwrap();
        assert!(res > 1e-4, "{res}");
    }

    #[test]
    fn halved_jacobi_convention_fails() {
        let g = grid();
        let p = EckartParams::new(3.0, 1.0).unwrap();
        let st = StateSpec::eckart(p, 1).unwrap().with_convention(JacobiConvention::Halved);
        let s = sample_state(&st, &g).unwrap();
        let res = schrodinger_residual(&s, &Model::Eckart(p), c(0.0, 0.0), &g).unwrap();
        assert!(res > 1e-2, "{res}");
    }

    #[test]
    fn random_samples_are_not_solutions() {
        let g = grid();
        let p = EckartParams::new(3.0, 1.0).unwrap();
        let mut seed = 7u64;
        let values: Vec<C64> = (0..g.len())
            .map(|_| {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
                c(1.0 + ((seed >> 11) as f64) / ((1u64 << 53) as f64), 0.5)
            })
            .collect();
        let res = schrodinger_residual_values(&values, &Model::Eckart(p), c(-3.75, 0.0), &g, 5).unwrap();
        assert!(res > 0.1, "{res}");
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let g = build_grid(EpsilonProfile::decaying(0.25).unwrap(), -1.0, 1.0, 9).unwrap();
        let p = EckartParams::new(3.0, 1.0).unwrap();
        let err = schrodinger_residual_values(&[c(1.0, 0.0); 9], &Model::Eckart(p), C64::default(), &g, 5);
        assert!(matches!(err, Err(Error::GridTooCoarse { .. })));
    }
}
