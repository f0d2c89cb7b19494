//! Brute-force Monte Carlo estimate of the conditional outage probability,
//! sampling collisions and gamma fading gains directly.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{invalid, Result};
use crate::outage::{conditional_outage, OutageInputs};
use crate::par::{map_indexed, Execution};
use crate::radio::{fractional_durations, InterferenceProfile, InterfererPeriodTerm};
use crate::stream::{stream, Purpose};

/// Smallest draw count [`estimate_outage`] accepts.
pub const MIN_DRAWS: u64 = 1_000;

const SHARD: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub outage: f64,
    /// `sqrt(p (1 - p) / draws)` at the estimate.
    pub stderr: f64,
    pub draws: u64,
}

impl OracleEstimate {
    fn from_count(hits: u64, draws: u64) -> Self {
        let p = hits as f64 / draws as f64;
        Self {
            outage: p,
            stderr: (p * (1.0 - p) / draws as f64).sqrt(),
            draws,
        }
    }

    /// Binomial standard error of the estimate if the true value were `p`.
    pub fn stderr_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.draws as f64).sqrt()
    }
}

/// Unit-mean gamma law with shape `m`, the power gain of Nakagami-m fading.
fn unit_gamma(m: f64) -> Result<Gamma<f64>> {
    Gamma::new(m, 1.0 / m).map_err(|e| invalid(format!("gamma shape {m}: {e}")))
}

/// Pre-built sampler for the subframe-average SINR of one profile.
#[derive(Debug, Clone)]
pub struct SinrSampler {
    z: f64,
    hopping: bool,
    reference: Gamma<f64>,
    terms: Vec<(f64, f64, Gamma<f64>)>,
}

impl SinrSampler {
    pub fn new(profile: &InterferenceProfile, hopping: bool) -> Result<Self> {
        if profile.m0 == 0 {
            return Err(invalid(
                "reference Nakagami parameter must be a positive integer",
            ));
        }
        let terms = profile
            .terms
            .iter()
            .filter(|t| !t.is_inert())
            .map(|t| Ok((t.q, t.omega * t.c, unit_gamma(t.m)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            z: profile.z(),
            hopping,
            reference: unit_gamma(profile.m0 as f64)?,
            terms,
        })
    }

    /// One draw of the average SINR.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let signal = if self.hopping {
            0.5 * (self.reference.sample(rng) + self.reference.sample(rng))
        } else {
            self.reference.sample(rng)
        };
        let mut denom = self.z;
        for (q, weight, fade) in &self.terms {
            if rng.random::<f64>() < *q {
                denom += weight * fade.sample(rng);
            }
        }
        signal / denom
    }
}

/// A single SINR draw for `profile`.
pub fn draw_sinr<R: Rng + ?Sized>(
    profile: &InterferenceProfile,
    hopping: bool,
    rng: &mut R,
) -> Result<f64> {
    Ok(SinrSampler::new(profile, hopping)?.draw(rng))
}

/// Fraction of `draws` SINR samples at or below `beta`. Draws are split
/// into fixed shards with their own streams, so the estimate depends only
/// on `seed`, never on scheduling.
pub fn estimate_outage(
    profile: &InterferenceProfile,
    beta: f64,
    draws: u64,
    hopping: bool,
    seed: u64,
    exec: Execution,
) -> Result<OracleEstimate> {
    if draws < MIN_DRAWS {
        return Err(invalid(format!(
            "need at least {MIN_DRAWS} draws, got {draws}"
        )));
    }
    let sampler = SinrSampler::new(profile, hopping)?;
    let shards = draws.div_ceil(SHARD) as usize;
    let counts = map_indexed(exec, shards, |s| {
        let mut rng = stream(seed, Purpose::Oracle, &[s as u64]);
        let n = SHARD.min(draws - s as u64 * SHARD);
        (0..n).filter(|_| sampler.draw(&mut rng) <= beta).count() as u64
    });
    Ok(OracleEstimate::from_count(counts.iter().sum(), draws))
}

/// Chance that a correct closed form lands outside the 4-stderr gate,
/// the two-sided normal tail at 4.
pub const GATE_MISS_PROB: f64 = 6.334_248_366_623_996e-5;

/// Misses tolerated among `cases` gated comparisons: the smallest `k`, at
/// least 2, with `P[Binomial(cases, GATE_MISS_PROB) > k] <= 1e-6`.
pub fn miss_allowance(cases: usize) -> usize {
    let p = GATE_MISS_PROB;
    let n = cases as f64;
    let mut pmf = (1.0 - p).powf(n);
    let mut cdf = pmf;
    let mut k = 0;
    while 1.0 - cdf > 1e-6 && k < cases {
        pmf *= (n - k as f64) / (k as f64 + 1.0) * p / (1.0 - p);
        cdf += pmf;
        k += 1;
    }
    k.max(2)
}

/// A randomized profile and threshold for the closed-form check.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationCase {
    pub profile: InterferenceProfile,
    pub beta: f64,
    pub hopping: bool,
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// `n` cases with 1 to 5 interferers over four periods (none when
/// `interference` is false), `m0` in {1, 2}, `z` in `[1e-4, 1]` and `beta`
/// in `[0.25, 8]`, both log-uniform. Hopping alternates between cases.
pub fn validation_cases(n: usize, seed: u64, interference: bool) -> Vec<ValidationCase> {
    let mut rng = stream(seed, Purpose::Oracle, &[u64::MAX]);
    (0..n)
        .map(|case| {
            let interferers = if interference {
                rng.random_range(1..=5)
            } else {
                0
            };
            let m0 = rng.random_range(1..=2);
            let z = log_uniform(&mut rng, 1e-4, 1.0);
            let beta = log_uniform(&mut rng, 0.25, 8.0);
            let mut terms = Vec::with_capacity(4 * interferers);
            for _ in 0..interferers {
                let omega = log_uniform(&mut rng, 0.01, 2.0);
                let m = 1.0 + rng.random::<f64>();
                let q = rng.random_range(0.05..=1.0);
                let t = rng.random::<f64>();
                for c in fractional_durations(t, 1.0).expect("offset in [0, 1)") {
                    terms.push(InterfererPeriodTerm { omega, q, c, m });
                }
            }
            ValidationCase {
                profile: InterferenceProfile {
                    gamma0: 1.0 / z,
                    m0,
                    terms,
                },
                beta,
                hopping: case % 2 == 0,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationResult {
    pub closed_form: f64,
    pub estimate: OracleEstimate,
    /// Deviation at most 4 standard errors, taken at the larger of the
    /// estimate and the closed form so a zero count cannot shrink the gate.
    pub pass: bool,
}

pub fn validate_case(
    case: &ValidationCase,
    draws: u64,
    seed: u64,
    exec: Execution,
) -> Result<ValidationResult> {
    let closed_form = conditional_outage(OutageInputs {
        beta: case.beta,
        profile: &case.profile,
        hopping: case.hopping,
    })?;
    let estimate = estimate_outage(&case.profile, case.beta, draws, case.hopping, seed, exec)?;
    let gate = 4.0 * estimate.stderr.max(estimate.stderr_at(closed_form));
    Ok(ValidationResult {
        closed_form,
        estimate,
        pass: (closed_form - estimate.outage).abs() <= gate,
    })
}
