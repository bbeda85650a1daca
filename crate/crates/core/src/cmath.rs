//! Complex helpers shared by the contour, potential and wavefunction code.
//!
//! The logarithms here are analytic on fixed horizontal strips of the
//! `r`-plane. On the working contours they coincide with the principal value
//! at `t = 0` continued along the contour.

use core::f64::consts::{LN_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

pub type C64 = Complex64;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `exp(z) - 1` without cancellation for small `|z|`.
pub(crate) fn expm1(z: C64) -> C64 {
    let (s, co) = z.im.sin_cos();
    let ex = z.re.exp();
    let half = (0.5 * z.im).sin();
    c(z.re.exp_m1() * co - 2.0 * half * half, ex * s)
}

/// `log sinh r`, analytic on `-pi < Im r < 0` (closure at `Im r = 0` from below).
///
/// Equals the principal logarithm at `r = -i eps`, `0 < eps < pi`.
pub(crate) fn log_sinh_lower(r: C64) -> C64 {
    if r.re >= 0.0 {
        // sinh r = e^r (1 - e^{-2r}) / 2
        r - LN_2 + (-expm1(-2.0 * r)).ln()
    } else {
        // sinh r = -e^{-r} (1 - e^{2r}) / 2
        -r - LN_2 - I * PI + (-expm1(2.0 * r)).ln()
    }
}

/// `log cosh r`, analytic on `|Im r| < pi/2`, real for real `r`.
pub(crate) fn log_cosh_strip(r: C64) -> C64 {
    if r.re >= 0.0 {
        r - LN_2 + (1.0 + (-2.0 * r).exp()).ln()
    } else {
        -r - LN_2 + (1.0 + (2.0 * r).exp()).ln()
    }
}

/// Magnitude below which `sinh`, `cosh` or `1 - exp(2 i xi)` count as zero.
pub(crate) const SINGULAR_TOL: f64 = 1e-14;

pub(crate) fn coth(r: C64) -> C64 {
    r.cosh() / r.sinh()
}

/// Smallest `|z - k pi|` over integers `k`.
pub(crate) fn distance_to_pi_lattice(z: C64) -> f64 {
    let k = (z.re / PI).round();
    (z - c(k * PI, 0.0)).norm()
}

/// Adds the multiple of `2 pi i` that brings `log_value` closest to `reference`.
pub(crate) fn nearest_sheet(log_value: C64, reference: C64) -> C64 {
    let k = ((reference.im - log_value.im) / (2.0 * PI)).round();
    c(log_value.re, log_value.im + 2.0 * PI * k)
}

/// Picks `root` or `-root`, whichever lies closer to `reference`.
pub(crate) fn nearest_sign(root: C64, reference: C64) -> C64 {
    if (root - reference).norm_sqr() <= (root + reference).norm_sqr() {
        root
    } else {
        -root
    }
}

/// Continuity unwrapping of a sequence of square roots: flips signs so that
/// consecutive entries stay on one sheet, starting from `values[anchor]`.
pub(crate) fn unwrap_roots(values: &mut [C64], anchor: usize) {
    for k in anchor + 1..values.len() {
        values[k] = nearest_sign(values[k], values[k - 1]);
    }
    for k in (0..anchor).rev() {
        values[k] = nearest_sign(values[k], values[k + 1]);
    }
}

/// Continuity unwrapping of a sequence of logarithms, anchored at `anchor`.
pub(crate) fn unwrap_logs(values: &mut [C64], anchor: usize) {
    for k in anchor + 1..values.len() {
        values[k] = nearest_sheet(values[k], values[k - 1]);
    }
    for k in (0..anchor).rev() {
        values[k] = nearest_sheet(values[k], values[k + 1]);
    }
}
