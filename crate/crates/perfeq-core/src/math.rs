//! Float math shim: `std` intrinsics when available, `libm` otherwise.

#[cfg(feature = "std")]
#[inline]
pub(crate) fn powf(base: f64, exp: f64) -> f64 {
    base.powf(exp)
}

#[cfg(not(feature = "std"))]
#[inline]
pub(crate) fn powf(base: f64, exp: f64) -> f64 {
    libm::pow(base, exp)
}

#[cfg(feature = "std")]
#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    x.ln()
}

#[cfg(not(feature = "std"))]
#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    if x < 0.0 {
        -x
    } else {
        x
    }
}
