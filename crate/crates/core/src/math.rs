//! Float helpers backed by `libm` so the crate stays `no_std`.

#[inline]
pub(crate) fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub(crate) fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn pow(x: f64, e: f64) -> f64 {
    libm::pow(x, e)
}

#[inline]
pub(crate) fn powi2(exp: u32) -> f64 {
    libm::pow(2.0, exp as f64)
}

#[inline]
pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}

/// Position discount `1 / log2(1 + pos)` for a 1-based position.
#[inline]
pub(crate) fn discount(pos: usize) -> f64 {
    1.0 / log2(1.0 + pos as f64)
}
