//! Conditional outage probability of a reference link given its
//! interference profile, plus the code-rate map.
//!
//! The reference link's subframe-average fading gain is gamma distributed
//! with integer shape `K` and unit mean: `K = 2 m0` when the two slots of
//! a subframe hop to independently faded channels, `K = m0` when the fading
//! is constant across the subframe. With `beta0 = K beta` and `z = 1/gamma0`,
//!
//! ```text
//! eps = 1 - e^{-beta0 z} sum_{s<K} (beta0 z)^s sum_{t<=s} z^{-t} / (s-t)! H_t
//! ```
//!
//! where `H_t` is the coefficient of `u^t` in the product over interference
//! terms of `sum_l G_l u^l`.

use crate::error::{invalid, Error, Result};
use crate::radio::{InterferenceProfile, InterfererPeriodTerm};

/// Tolerated round-off outside `[0, 1]` before a result is rejected.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

/// `(beta0 Omega C / m + 1)^-1`.
pub fn psi(beta0: f64, omega: f64, c: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(invalid(format!(
            "Nakagami parameter must be positive, got {m}"
        )));
    }
    if omega < 0.0 || c < 0.0 || beta0 < 0.0 {
        return Err(invalid("omega, C and beta0 must be nonnegative"));
    }
    Ok(1.0 / (beta0 * omega * c / m + 1.0))
}

/// `Gamma(l + m) / (l! Gamma(m))` by its product form.
pub fn rising_ratio(l: u32, m: f64) -> f64 {
    (1..=l).fold(1.0, |acc, n| acc * (m + n as f64 - 1.0) / n as f64)
}

/// Laplace-series coefficient `G_l` of one interference term.
pub fn g_coeff(l: u32, q: f64, omega: f64, c: f64, m: f64, beta0: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(invalid(format!("collision probability {q} outside [0, 1]")));
    }
    let p = psi(beta0, omega, c, m)?;
    if l == 0 {
        return Ok(1.0 - q * (1.0 - p.powf(m)));
    }
    let a = omega * c / m;
    Ok(q * rising_ratio(l, m) * a.powi(l as i32) * p.powf(m + l as f64))
}

/// `G_0 ..= G_max` for one term, by the ratio `G_l / G_{l-1}`.
pub fn g_series(term: &InterfererPeriodTerm, beta0: f64, max: usize) -> Result<Vec<f64>> {
    let InterfererPeriodTerm { omega, q, c, m } = *term;
    if !(0.0..=1.0).contains(&q) {
        return Err(invalid(format!("collision probability {q} outside [0, 1]")));
    }
    let p = psi(beta0, omega, c, m)?;
    let pm = p.powf(m);
    let mut out = Vec::with_capacity(max + 1);
    out.push(1.0 - q * (1.0 - pm));
    if max == 0 {
        return Ok(out);
    }
    let step = omega * c / m * p;
    let mut g = q * pm * m * step;
    out.push(g);
    for l in 2..=max {
        g *= (m + l as f64 - 1.0) / l as f64 * step;
        out.push(g);
    }
    Ok(out)
}

/// `H_0 ..= H_max` as the truncated product of the terms' coefficient series.
pub fn h_coeffs(max: usize, terms: &[InterfererPeriodTerm], beta0: f64) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; max + 1];
    acc[0] = 1.0;
    let mut next = vec![0.0; max + 1];
    for term in terms {
        let g = g_series(term, beta0, max)?;
        for (t, slot) in next.iter_mut().enumerate() {
            *slot = (0..=t).map(|l| acc[t - l] * g[l]).sum();
        }
        std::mem::swap(&mut acc, &mut next);
    }
    Ok(acc)
}

/// `H_t` alone.
pub fn h_poly(t: usize, terms: &[InterfererPeriodTerm], beta0: f64) -> Result<f64> {
    Ok(h_coeffs(t, terms, beta0)?[t])
}

/// Inputs of one conditional outage evaluation.
#[derive(Debug, Clone, Copy)]
pub struct OutageInputs<'a> {
    /// SINR threshold, linear.
    pub beta: f64,
    pub profile: &'a InterferenceProfile,
    /// Independent fading in the two slots of the subframe.
    pub hopping: bool,
}

impl<'a> OutageInputs<'a> {
    pub fn new(profile: &'a InterferenceProfile, beta: f64) -> Self {
        Self {
            beta,
            profile,
            hopping: true,
        }
    }

    pub fn without_hopping(mut self) -> Self {
        self.hopping = false;
        self
    }

    /// Gamma shape of the subframe-average reference fading gain.
    pub fn reference_shape(&self) -> u32 {
        if self.hopping {
            2 * self.profile.m0
        } else {
            self.profile.m0
        }
    }

    pub fn beta0(&self) -> f64 {
        self.reference_shape() as f64 * self.beta
    }
}

/// Outage probability of the reference link conditioned on its profile.
pub fn conditional_outage(inputs: OutageInputs<'_>) -> Result<f64> {
    let profile = inputs.profile;
    if profile.m0 == 0 {
        return Err(invalid(
            "reference Nakagami parameter must be a positive integer",
        ));
    }
    if !(inputs.beta > 0.0) || !inputs.beta.is_finite() {
        return Err(invalid(format!(
            "SINR threshold must be positive and finite, got {}",
            inputs.beta
        )));
    }
    if !(profile.gamma0 > 0.0) {
        return Err(invalid("gamma0 must be positive"));
    }
    let shape = inputs.reference_shape() as usize;
    let beta0 = inputs.beta0();
    let z = profile.z();
    let x = beta0 * z;
    let h = h_coeffs(shape - 1, &profile.terms, beta0)?;

    // sum_t beta0^t H_t sum_{u <= K-1-t} x^u / u!, grouped so z never divides
    let mut partial = Vec::with_capacity(shape);
    let mut term = 1.0;
    let mut sum = 0.0;
    for u in 0..shape {
        if u > 0 {
            term *= x / u as f64;
        }
        sum += term;
        partial.push(sum);
    }
    let mut total = 0.0;
    let mut b_pow = 1.0;
    for (t, ht) in h.iter().enumerate() {
        total += b_pow * ht * partial[shape - 1 - t];
        b_pow *= beta0;
    }
    let eps = 1.0 - (-x).exp() * total;
    clamp_probability(eps)
}

fn clamp_probability(eps: f64) -> Result<f64> {
    if !(-CLAMP_TOLERANCE..=1.0 + CLAMP_TOLERANCE).contains(&eps) {
        return Err(Error::NumericalFailure(format!(
            "outage probability {eps} outside [0, 1]"
        )));
    }
    Ok(eps.clamp(0.0, 1.0))
}

/// Code rate `log2(1 + l_s beta)` in bits per channel use.
pub fn code_rate(beta: f64, shannon_loss: f64) -> Result<f64> {
    if !(beta > 0.0) || !(shannon_loss > 0.0) {
        return Err(invalid("threshold and loss factor must be positive"));
    }
    Ok((shannon_loss * beta).ln_1p() / std::f64::consts::LN_2)
}

/// Threshold that supports rate `rate`, `(2^R - 1) / l_s`.
pub fn beta_for_rate(rate: f64, shannon_loss: f64) -> Result<f64> {
    if !(rate > 0.0) || !(shannon_loss > 0.0) {
        return Err(invalid("rate and loss factor must be positive"));
    }
    Ok((rate * std::f64::consts::LN_2).exp_m1() / shannon_loss)
}
