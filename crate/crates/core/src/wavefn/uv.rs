use crate::cmath::{c, I};
use crate::{Error, Result, C64};

/// Exponents and hypergeometric parameters of an Eckart state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UvParams {
    pub u: C64,
    pub v: C64,
    pub a: C64,
    pub b: C64,
    pub c: C64,
}

/// `u = (delta - i beta/delta)/2`, `v = (delta + i beta/delta)/2`,
/// `a = 2 delta + N + 1`, `b = -N`, `c = 1 + 2u`.
pub fn derive_uv(n: u32, delta: f64, beta: f64) -> Result<UvParams> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidDelta(delta));
    }
    let k = beta / delta;
    let u = c(0.5 * delta, -0.5 * k);
    let v = c(0.5 * delta, 0.5 * k);
    let nf = f64::from(n);
    let p = UvParams { u, v, a: c(2.0 * delta + nf + 1.0, 0.0), b: c(-nf, 0.0), c: 1.0 + 2.0 * u };
    debug_assert!(p.consistency_defect(beta) <= 1e-12 * (1.0 + delta * delta + k * k));
    Ok(p)
}

impl UvParams {
    /// `-(u+v)^2 - (u-v)^2`, which is `-delta^2 + beta^2/delta^2`.
    pub fn energy(&self) -> f64 {
        let s = self.u + self.v;
        let d = self.u - self.v;
        (-(s * s) - d * d).re
    }

    /// `max(|4u^2 + 2 i beta + E|, |4v^2 - 2 i beta + E|)`.
    pub fn consistency_defect(&self, beta: f64) -> f64 {
        let e = self.energy();
        let a = 4.0 * self.u * self.u + 2.0 * I * beta + e;
        let b = 4.0 * self.v * self.v - 2.0 * I * beta + e;
        a.norm().max(b.norm())
    }
}
