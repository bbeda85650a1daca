//! Pairing numerical eigenvalues with analytic levels, and the two-grid
//! pipeline that produces the numerical side.
//!
//! This is the only place where both sides meet; the analytic energies come in
//! as plain numbers.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Result, C64};

use super::continuation::{eigenvector_nodes, EigenvectorNodes};
use super::eigen::{eigen_all, eigen_near, filter_bound_states, EigenPair, SpuriousFilter};
use super::operator::DiscreteOperator;

/// A numerical level ready for matching.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericLevel {
    pub energy: C64,
    pub node_count: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenMatch {
    pub analytic_energy: C64,
    /// `None` when no numerical level was left within tolerance.
    pub numeric_energy: Option<C64>,
    /// `|numeric - analytic| / max(|analytic|, 1)`; infinite when unmatched.
    pub relative_error: f64,
    pub node_count: Option<u32>,
    pub converged: bool,
}

pub fn relative_error(numeric: C64, analytic: C64) -> f64 {
    (numeric - analytic).norm() / analytic.norm().max(1.0)
}

/// Greedy nearest-neighbour pairing: the closest remaining pair is taken
/// first. Analytic levels with no numerical level within `tol` (relative) are
/// returned unmatched, in input order.
pub fn match_spectrum(numeric: &[NumericLevel], analytic: &[C64], tol: f64) -> Vec<EigenMatch> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, a) in analytic.iter().enumerate() {
        for (j, n) in numeric.iter().enumerate() {
            let e = relative_error(n.energy, *a);
            if e <= tol {
                pairs.push((e, i, j));
            }
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<EigenMatch> = analytic
        .iter()
        .map(|a| EigenMatch { analytic_energy: *a, numeric_energy: None, relative_error: f64::INFINITY, node_count: None, converged: false })
        .collect();
    let mut used = alloc::vec![false; numeric.len()];
    for (e, i, j) in pairs {
        if out[i].converged || used[j] {
            continue;
        }
        used[j] = true;
        out[i] = EigenMatch {
            analytic_energy: analytic[i],
            numeric_energy: Some(numeric[j].energy),
            relative_error: e,
            node_count: numeric[j].node_count,
            converged: true,
        };
    }
    out
}

/// Removes the `h^2` error term of a second-order scheme from values on grids
/// with spacing `h` (coarse) and `h/2` (fine).
pub fn richardson(coarse: C64, fine: C64) -> C64 {
    (4.0 * fine - coarse) / 3.0
}

/// One bound state seen on both grids.
#[derive(Debug, Clone)]
pub struct RefinedLevel {
    pub coarse: C64,
    pub fine: C64,
    pub extrapolated: C64,
    /// Eigenpair on the coarse grid, used for the node count.
    pub pair: EigenPair,
    /// `None` when not requested; `Err` when the count could not be trusted.
    pub nodes: Option<Result<EigenvectorNodes>>,
}

impl RefinedLevel {
    pub fn level(&self) -> NumericLevel {
        NumericLevel { energy: self.extrapolated, node_count: self.nodes.as_ref().and_then(|r| r.as_ref().ok()).map(|n| n.count) }
    }
}

/// All eigenvalues of `coarse`, filtered to bound states, each refined on
/// `fine` by inverse iteration from the coarse value and extrapolated.
/// `fine` should have half the spacing of `coarse` over the same interval.
/// Node counts are computed only when `count_nodes` is set.
pub fn refine_bound_states(
    coarse: &DiscreteOperator,
    fine: &DiscreteOperator,
    filter: &SpuriousFilter,
    count_nodes: bool,
) -> Result<Vec<RefinedLevel>> {
    let values = eigen_all(coarse)?;
    let pairs = filter_bound_states(coarse, &values, filter)?;
    let mut out = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let fine_value = eigen_near(fine, pair.value)?.value;
        let extrapolated = richardson(pair.value, fine_value);
        let nodes = count_nodes.then(|| eigenvector_nodes(coarse, &pair, Some(extrapolated)));
        out.push(RefinedLevel { coarse: pair.value, fine: fine_value, extrapolated, pair, nodes });
    }
    Ok(out)
}
