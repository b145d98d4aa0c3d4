//! Rounding helpers that absorb floating-point noise in shot arithmetic.
//!
//! Ratios such as `s_tot·|c_i|/M` are mathematically integral far more often
//! than their `f64` evaluation is, e.g. `100·0.29 = 28.999999999999996`.

const ROUNDING_SLACK: f64 = 1e-9;

fn near_integer(x: f64) -> Option<f64> {
    let r = x.round();
    ((x - r).abs() <= ROUNDING_SLACK * x.abs().max(1.0)).then_some(r)
}

pub(crate) fn floor_tol(x: f64) -> f64 {
    near_integer(x).unwrap_or_else(|| x.floor())
}

pub(crate) fn ceil_tol(x: f64) -> f64 {
    near_integer(x).unwrap_or_else(|| x.ceil())
}
