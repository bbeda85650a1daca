//! Closed-form wavefunctions and the checks run on them.

mod analysis;
mod jacobi;
mod nodes;
mod residual;
mod states;
mod uv;

use alloc::vec::Vec;

pub use analysis::{decay_rate, decay_rate_with, default_t_asym, liouville_ratio_spread, pt_symmetry_defect};
pub use jacobi::{hyp2f1_terminating, jacobi_coefficients, jacobi_derivative, jacobi_poly, JacobiConvention};
pub use nodes::{
    count_nodes, count_nodes_in, default_window, model_window, jacobi_root_count, node_count_sweep, round_winding, singular_depths,
    singular_distances, winding_of_samples,
    NodeWindow,
};
pub use residual::{
    fornberg_weights, schrodinger_residual, schrodinger_residual_values, DEFAULT_STENCIL_HALF_WIDTH,
};
pub use states::{log_sqrt_dxi_dr, psi_eckart, psi_natanzon, StateSpec};
pub use uv::{derive_uv, UvParams};

use crate::contour::ContourGrid;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Raw closed-form values; only ratios and log-derivatives are meaningful.
    #[default]
    Unnormalized,
}

/// Wavefunction values on the points of a contour grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSamples {
    /// The closed form the values came from, if any.
    pub state: Option<StateSpec>,
    pub values: Vec<C64>,
    /// `log psi`, continuous along the grid; avoids underflow in the tails.
    pub log_values: Vec<C64>,
    pub normalization: Normalization,
    pub decay_fit: Option<(f64, f64)>,
    pub node_count: Option<u32>,
}

impl WaveSamples {
    pub fn from_values(values: Vec<C64>) -> Self {
        let log_values = values.iter().map(|v| v.ln()).collect();
        Self {
            state: None,
            values,
            log_values,
            normalization: Normalization::Unnormalized,
            decay_fit: None,
            node_count: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Fills `decay_fit` and `node_count`.
    pub fn analyse(&mut self, grid: &ContourGrid) -> Result<()> {
        self.decay_fit = Some(decay_rate(self, grid)?);
        self.node_count = Some(count_nodes(self, grid)?);
        Ok(())
    }
}

/// Samples the closed form of `state` on every grid point. Natanzon states are
/// evaluated from `xi` with branches anchored on the grid.
pub fn sample_state(state: &StateSpec, grid: &ContourGrid) -> Result<WaveSamples> {
    let mut log_values = Vec::with_capacity(grid.len());
    for p in grid.points() {
        let lv = match state {
            StateSpec::Eckart { .. } => state.log_psi_r(p.r)?.0,
            StateSpec::Natanzon { .. } => state.log_psi_xi(p.xi, grid)?,
        };
        log_values.push(lv);
    }
    let values = log_values.iter().map(|l| l.exp()).collect();
    Ok(WaveSamples {
        state: Some(*state),
        values,
        log_values,
        normalization: Normalization::Unnormalized,
        decay_fit: None,
        node_count: None,
    })
}

pub(crate) fn check_len(samples: &WaveSamples, grid: &ContourGrid) -> Result<()> {
    if samples.len() != grid.len() {
        return Err(Error::DimensionMismatch("samples and grid differ in length"));
    }
    Ok(())
}
