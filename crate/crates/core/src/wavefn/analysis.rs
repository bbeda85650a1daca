//! Tail decay, PT symmetry and the Liouville map between the two models.

#[allow(unused_imports)]
use num_traits::Float;

use crate::contour::ContourGrid;
use crate::{Error, Result, C64};

use super::states::log_sqrt_dxi_dr;
use super::{check_len, StateSpec, WaveSamples};

const MIN_TAIL_POINTS: usize = 20;
const LOG_UNDERFLOW: f64 = -575.6; // ln 1e-250

/// Two thirds of the shorter half-length of the grid.
pub fn default_t_asym(grid: &ContourGrid) -> f64 {
    (2.0 / 3.0) * grid.t_min().abs().min(grid.t_max().abs())
}

pub fn decay_rate(samples: &WaveSamples, grid: &ContourGrid) -> Result<(f64, f64)> {
    decay_rate_with(samples, grid, default_t_asym(grid))
}

/// Least-squares slopes of `ln|psi|` against `Z` over `t < -t_asym` and `t > t_asym`.
pub fn decay_rate_with(samples: &WaveSamples, grid: &ContourGrid, t_asym: f64) -> Result<(f64, f64)> {
    check_len(samples, grid)?;
    let fit = |left: bool| -> Result<f64> {
        let (mut n, mut sx, mut sy, mut sxx, mut sxy) = (0usize, 0.0, 0.0, 0.0, 0.0);
        for (p, lv) in grid.points().iter().zip(&samples.log_values) {
            let inside = if left { p.t < -t_asym } else { p.t > t_asym };
            if !inside || lv.re < LOG_UNDERFLOW || !lv.re.is_finite() {
                continue;
            }
            n += 1;
            sx += p.z;
            sy += lv.re;
            sxx += p.z * p.z;
            sxy += p.z * lv.re;
        }
        if n < MIN_TAIL_POINTS {
            return Err(Error::TailTooShort { points: n, required: MIN_TAIL_POINTS });
        }
        let nf = n as f64;
        Ok((nf * sxy - sx * sy) / (nf * sxx - sx * sx))
    };
    Ok((fit(true)?, fit(false)?))
}

/// `max_t | |psi(-t)| - |psi(t)| | / max |psi|` on a grid symmetric about `t = 0`.
pub fn pt_symmetry_defect(samples: &WaveSamples, grid: &ContourGrid) -> Result<f64> {
    check_len(samples, grid)?;
    if !grid.is_symmetric() {
        return Err(Error::AsymmetricGrid);
    }
    let v = &samples.values;
    let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(0.0);
    }
    let n = v.len();
    let worst = (0..n).map(|k| (v[k].norm() - v[n - 1 - k].norm()).abs()).fold(0.0, f64::max);
    Ok(worst / peak)
}

/// Relative spread of `psi^(D) / (sqrt(xi') psi^(E)(r))` over the grid, for
/// samples of a Natanzon state and its Eckart partner `A = delta + N + 1`.
pub fn liouville_ratio_spread(samples: &WaveSamples, grid: &ContourGrid) -> Result<f64> {
    check_len(samples, grid)?;
    let state = samples.state.ok_or(Error::InvalidParameters("samples carry no closed form"))?;
    if !matches!(state, StateSpec::Natanzon { .. }) {
        return Err(Error::InvalidParameters("expected Natanzon samples"));
    }
    let partner = state.eckart_partner()?;
    let mut worst: f64 = 0.0;
    let mid = grid.len() / 2;
    let log_ratio = |k: usize| -> Result<C64> {
        let r = grid.points()[k].r;
        Ok(samples.log_values[k] - log_sqrt_dxi_dr(r) - partner.log_psi_r(r)?.0)
    };
    let l0 = log_ratio(mid)?;
    for k in 0..grid.len() {
        let d = log_ratio(k)? - l0;
        worst = worst.max((d.exp() - 1.0).norm());
    }
    Ok(worst)
}
