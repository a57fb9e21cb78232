//! Activation function and the difference-of-Gaussians lateral-interaction
//! kernel shared by both neural fields.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ratio between the inhibitory and excitatory Gaussian widths.
pub const INHIBITION_WIDTH_RATIO: f64 = 3.0;

/// Bounded, non-negative activation: `1 - exp(-u)` for `u > 0`, else `0`.
///
/// Evaluated through `exp_m1` so that tiny positive inputs stay positive.
#[inline]
pub fn phi(u: f64) -> f64 {
    if u > 0.0 {
        -(-u).exp_m1()
    } else {
        0.0
    }
}

/// Amplitudes and scale of the "Mexican hat" interaction kernel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    /// Excitation amplitude.
    pub a: f64,
    /// Inhibition amplitude.
    pub b: f64,
    /// Interaction scale in feature-space distance units.
    pub sigma: f64,
}

impl Default for KernelParams {
    /// `a = 3/2`, `b = 1/2` puts the kernel maximum at exactly 1.
    fn default() -> Self {
        KernelParams {
            a: 1.5,
            b: 0.5,
            sigma: 1.0,
        }
    }
}

impl KernelParams {
    pub fn new(a: f64, b: f64, sigma: f64) -> Result<Self> {
        let params = KernelParams { a, b, sigma };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.a > self.b && self.a.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kernel amplitudes must satisfy a > b > 0 (a = {}, b = {})",
                self.a, self.b
            )));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kernel scale must be positive (sigma = {})",
                self.sigma
            )));
        }
        Ok(())
    }

    /// Same amplitudes at a different scale.
    #[inline]
    pub fn with_sigma(self, sigma: f64) -> Self {
        KernelParams { sigma, ..self }
    }
}

/// Difference-of-Gaussians kernel evaluated at a distance.
#[inline]
pub fn dog_kernel(dist: f64, params: &KernelParams) -> f64 {
    let d2 = dist * dist;
    let s2 = params.sigma * params.sigma;
    let wide = INHIBITION_WIDTH_RATIO * INHIBITION_WIDTH_RATIO * s2;
    params.a * (-d2 / (2.0 * s2)).exp() - params.b * (-d2 / (2.0 * wide)).exp()
}

/// Distance at which the kernel crosses zero: `(3 sigma / 2) sqrt(ln(a / b))`.
///
/// Inside this radius a query excites a stored neuron; outside it inhibits.
/// Returns 0 when `a <= b` (no excitatory region).
pub fn excitatory_radius(params: &KernelParams) -> f64 {
    if params.a <= params.b {
        return 0.0;
    }
    1.5 * params.sigma * (params.a / params.b).ln().sqrt()
}
