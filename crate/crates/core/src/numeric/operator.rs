//! The Schrodinger operator discretised along the contour in flux form:
//! `-(1/x_t) d/dt [(1/x_t) d psi/dt] + V psi`, with `x` the model's coordinate.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::cmath::c;
use crate::contour::ContourGrid;
use crate::potentials::Model;
use crate::{Error, Result, C64};

use super::dense::DenseMatrix;

/// Smallest accepted number of grid points.
pub const MIN_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// `psi = 0` at both grid ends.
    #[default]
    Dirichlet,
}

/// `[-m_-/h^2, (m_- + m_+)/h^2 + V, -m_+/h^2]` with `m_-+ = 1 / (x_t x_t(mid -+))`.
pub fn flux_row(x_t: C64, x_t_left_mid: C64, x_t_right_mid: C64, v: C64, h: f64) -> [C64; 3] {
    let h2 = h * h;
    let m_minus = 1.0 / (x_t * x_t_left_mid);
    let m_plus = 1.0 / (x_t * x_t_right_mid);
    [-m_minus / h2, (m_minus + m_plus) / h2 + v, -m_plus / h2]
}

/// Tridiagonal operator on the interior grid points; the two boundary values
/// are fixed at zero and are not unknowns.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    grid: ContourGrid,
    model: Model,
    boundary: Boundary,
    lower: Vec<C64>,
    diag: Vec<C64>,
    upper: Vec<C64>,
    /// `x_t` at interior points.
    x_t: Vec<C64>,
}

pub fn discretize(grid: &ContourGrid, model: &Model) -> Result<DiscreteOperator> {
    let n = grid.len();
    if n < MIN_POINTS {
        return Err(Error::GridTooCoarse { points: n, required: MIN_POINTS });
    }
    let h = grid.step();
    let profile = grid.profile();
    let ts: Vec<f64> = grid.ts().collect();
    let mid: Vec<C64> = (0..n - 1)
        .map(|k| model.metric(c(0.5 * (ts[k] + ts[k + 1]), 0.0), profile).map(|m| m.0))
        .collect::<Result<_>>()?;
    let m = n - 2;
    let (mut lower, mut diag, mut upper, mut x_t) =
        (Vec::with_capacity(m - 1), Vec::with_capacity(m), Vec::with_capacity(m - 1), Vec::with_capacity(m));
    for i in 1..n - 1 {
        let xt = model.metric(c(ts[i], 0.0), profile)?.0;
        let v = model.value_on_grid(grid, i)?;
        let row = flux_row(xt, mid[i - 1], mid[i], v, h);
        if row.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::SingularPoint(c(ts[i], 0.0)));
        }
        if i > 1 {
            lower.push(row[0]);
        }
        diag.push(row[1]);
        if i < n - 2 {
            upper.push(row[2]);
        }
        x_t.push(xt);
    }
    Ok(DiscreteOperator { grid: grid.clone(), model: *model, boundary: Boundary::Dirichlet, lower, diag, upper, x_t })
}

impl DiscreteOperator {
    pub fn grid(&self) -> &ContourGrid {
        &self.grid
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Number of unknowns (interior points).
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `H[k+1][k]`.
    pub fn lower(&self) -> &[C64] {
        &self.lower
    }

    pub fn diag(&self) -> &[C64] {
        &self.diag
    }

    /// `H[k][k+1]`.
    pub fn upper(&self) -> &[C64] {
        &self.upper
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.lower[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.dim();
        let mut a = DenseMatrix::zeros(n);
        for i in 0..n {
            a[(i, i)] = self.diag[i];
            if i + 1 < n {
                a[(i + 1, i)] = self.lower[i];
                a[(i, i + 1)] = self.upper[i];
            }
        }
        a
    }

    /// `H = W^-1 K` with `K` symmetric and `W = diag(x_t)`, so
    /// `S = W^(1/2) H W^(-1/2)` is complex symmetric. Returns the diagonal and
    /// off-diagonal of `S` and the diagonal of `W^(1/2)`.
    pub fn symmetric_form(&self) -> (Vec<C64>, Vec<C64>, Vec<C64>) {
        let w: Vec<C64> = self.x_t.iter().map(|x| x.sqrt()).collect();
        let off = (0..self.dim().saturating_sub(1))
            .map(|k| self.upper[k] * self.x_t[k] / (w[k] * w[k + 1]))
            .collect();
        (self.diag.clone(), off, w)
    }

    /// Interior unknowns padded with the two boundary zeros.
    pub fn pad(&self, interior: &[C64]) -> Vec<C64> {
        let mut out = Vec::with_capacity(interior.len() + 2);
        out.push(C64::default());
        out.extend_from_slice(interior);
        out.push(C64::default());
        out
    }
}
