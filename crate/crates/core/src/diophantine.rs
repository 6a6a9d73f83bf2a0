//! Minimum-distance computation for scaled integer combinations of channel
//! gains, and Monte Carlo estimates of the measure of the bad-channel sets on
//! which that distance collapses.
//!
//! The decoders separate symbols from a single real observation because the
//! gains are rationally independent for almost every draw; the quantitative
//! version is a lower bound on
//! `d_min = min |sum A_i g_i dq_i|` over nonzero integer difference tuples,
//! holding outside an outage set whose Lebesgue measure shrinks like a power
//! of P.


use crate::channel::{sample_h_with, stream_rng, HMatrix};
use crate::constellation::halfwidth_from_lambda;
use crate::error::{Error, Result};
use crate::simlab::McEstimate;

/// `min |sum A_i g_i dq_i|` over difference tuples from symmetric q-ranges.
#[derive(Debug, Clone)]
pub struct MinDistProblem {
    /// Scale factors `A_i`, positive.
    pub scales: Vec<f64>,
    /// Gains `g_i`.
    pub gains: Vec<f64>,
    /// Symbol half-ranges `Q_i`; symbols run over `[-floor(Q_i), floor(Q_i)]`
    /// and differences over twice that window. Non-integer values are used
    /// as-is and floored only here.
    pub q_ranges: Vec<f64>,
}

pub const DEFAULT_ENUM_CAP: u128 = 10_000_000;

impl MinDistProblem {
    fn validate(&self) -> Result<()> {
        let n = self.scales.len();
        if !(2..=3).contains(&n) || self.gains.len() != n || self.q_ranges.len() != n {
            return Err(Error::BadTermCount(n));
        }
        for &a in &self.scales {
            if !(a > 0.0) {
                return Err(Error::NonpositiveCoeff(a));
            }
        }
        if self.q_ranges.iter().all(|&q| q.floor() < 1.0) {
            return Err(Error::InvalidConstellation(
                "every q-range is empty; no nonzero difference exists".into(),
            ));
        }
        Ok(())
    }

    fn windows(&self) -> Vec<i64> {
        self.q_ranges.iter().map(|&q| 2 * q.floor().max(0.0) as i64).collect()
    }
}

/// Exact minimum over the difference lattice. Enumerating differences instead
/// of symbol pairs saves the `(2Q+1)^n` pair factor; the unit tests pin the
/// equivalence against the plain pair scan.
pub fn min_distance(p: &MinDistProblem, cap: u128) -> Result<f64> {
    p.validate()?;
    let w = p.windows();
    let mut volume: u128 = 1;
    for &m in &w {
        volume = volume.saturating_mul(2 * m as u128 + 1);
    }
    if volume > cap {
        return Err(Error::SearchSpaceExceeded { size: volume, cap });
    }
    let c: Vec<f64> = p.scales.iter().zip(p.gains.iter()).map(|(a, g)| a * g).collect();
    let mut best = f64::INFINITY;
    if c.len() == 2 {
        for d0 in -w[0]..=w[0] {
            let base = c[0] * d0 as f64;
            for d1 in -w[1]..=w[1] {
                if d0 == 0 && d1 == 0 {
                    continue;
                }
                let v = (base + c[1] * d1 as f64).abs();
                if v < best {
                    best = v;
                }
            }
        }
    } else {
        for d0 in -w[0]..=w[0] {
            let b0 = c[0] * d0 as f64;
            for d1 in -w[1]..=w[1] {
                let b1 = b0 + c[1] * d1 as f64;
                for d2 in -w[2]..=w[2] {
                    if d0 == 0 && d1 == 0 && d2 == 0 {
                        continue;
                    }
                    let v = (b1 + c[2] * d2 as f64).abs();
                    if v < best {
                        best = v;
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Which bad-set instance to draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutageInstance {
    /// Interference channel, 2/3 <= alpha < 1: two-term separation of the
    /// common layer and the aligned sum.
    IcJoint,
    /// Multiple access, alpha <= 2/3 with B <= (2 alpha - 1)^+: two-term
    /// separation of `v2c` and `v1p` after the top layer is peeled.
    MacTwoTerm { b: f64 },
    /// Multiple access, 2/3 <= alpha < 1 with B <= 3 alpha - 2: three-term
    /// separation of `v1p`, `v1c`, `v2c`.
    MacThreeTerm { b: f64 },
    /// Multiple access at alpha = 1: two-term separation of the two common
    /// layers.
    MacAlphaOne { d1: f64, d2: f64 },
}

/// Identifier for the closed-form outage-measure bounds, one per decoder
/// instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutageBoundId {
    /// Interference two-term instance: bound `64 kappa P^(-eps/2)`.
    IcTwoTerm,
    /// MAC two-term instance: bound `3584 kappa P^(-eps/2)`.
    MacTwoTerm,
    /// MAC three-term instance: bound `193536 kappa P^(-eps/2)`.
    MacThreeTerm,
    /// MAC alpha = 1 instance: bound `1792 kappa P^(-eps/2)`.
    MacAlphaOne,
}

impl OutageBoundId {
    pub fn parse(s: &str) -> Result<OutageBoundId> {
        match s {
            "ic2" => Ok(OutageBoundId::IcTwoTerm),
            "mac2" => Ok(OutageBoundId::MacTwoTerm),
            "mac3" => Ok(OutageBoundId::MacThreeTerm),
            "mac1" => Ok(OutageBoundId::MacAlphaOne),
            other => Err(Error::UnknownBoundId(other.into())),
        }
    }

    pub fn constant(&self) -> f64 {
        match self {
            OutageBoundId::IcTwoTerm => 64.0,
            OutageBoundId::MacTwoTerm => 3584.0,
            OutageBoundId::MacThreeTerm => 193_536.0,
            OutageBoundId::MacAlphaOne => 1792.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureBound {
    pub value: f64,
    /// The coefficient space (1,2]^4 has total measure 1; a bound at or above
    /// it says nothing.
    pub vacuous: bool,
}

/// Closed-form outage-measure bound `C kappa P^(-eps/2)`.
pub fn measure_bound(id: OutageBoundId, kappa: f64, eps: f64, p: f64) -> MeasureBound {
    let value = id.constant() * kappa * p.powf(-eps / 2.0);
    MeasureBound { value, vacuous: value >= 1.0 }
}

/// Generic two-term bad-set measure bound
/// `8 beta (eta - 1) min(Q0 Q1/A1, Q0 Q1/A0, Q0 eta/A1, Q1 eta/A0)`,
/// the general estimate the per-instance constants specialize.
pub fn pair_outage_measure(beta: f64, eta: f64, a0: f64, a1: f64, q0: f64, q1: f64) -> f64 {
    8.0 * beta
        * (eta - 1.0)
        * (q0 * q1 / a1)
            .min(q0 * q1 / a0)
            .min(q0 * eta / a1)
            .min(q1 * eta / a0)
}

fn eta_realized(q_m: u64, q_n: u64) -> f64 {
    let rho = q_m as f64 / q_n as f64;
    rho.ceil() / rho
}

/// Instantiate the minimum-distance problem and its threshold for one
/// channel draw, from the scheme parameters.
fn instantiate(
    inst: OutageInstance,
    alpha: f64,
    p: f64,
    eps: f64,
    kappa: f64,
    h: &HMatrix,
) -> Result<(MinDistProblem, f64)> {
    match inst {
        OutageInstance::IcJoint => {
            if !(2.0 / 3.0..1.0).contains(&alpha) {
                return Err(Error::UnsupportedRegime {
                    alpha,
                    reason: "two-term interference instance needs 2/3 <= alpha < 1".into(),
                });
            }
            let qmax = halfwidth_from_lambda(p, alpha / 2.0 - eps) as f64;
            Ok((
                MinDistProblem {
                    scales: vec![p.powf((1.0 - alpha) / 2.0), 1.0],
                    gains: vec![h.h11, h.h12],
                    q_ranges: vec![qmax, 2.0 * qmax],
                },
                kappa * p.powf(-(1.5 * alpha - 1.0) / 2.0),
            ))
        }
        OutageInstance::MacTwoTerm { b } => {
            if !(0.0..=2.0 / 3.0).contains(&alpha) || b > (2.0 * alpha - 1.0).max(0.0) {
                return Err(Error::UnsupportedRegime {
                    alpha,
                    reason: "two-term MAC instance needs alpha <= 2/3, B <= (2a-1)+".into(),
                });
            }
            let q1c = halfwidth_from_lambda(p, alpha - eps);
            let q2c = halfwidth_from_lambda(p, b - eps);
            let eta2 = eta_realized(q1c.max(q2c), q1c.min(q2c).max(1));
            Ok((
                MinDistProblem {
                    scales: vec![
                        p.powf((2.0 * alpha - 1.0 - b + eps) / 2.0),
                        p.powf((b + eps) / 2.0),
                    ],
                    gains: vec![eta2 * h.h12 * h.h21 / h.h22, h.h11 / 2.0],
                    q_ranges: vec![
                        halfwidth_from_lambda(p, b - eps) as f64,
                        halfwidth_from_lambda(p, 1.0 - alpha - b - eps) as f64,
                    ],
                },
                kappa * p.powf(eps / 2.0),
            ))
        }
        OutageInstance::MacThreeTerm { b } => {
            if !(2.0 / 3.0..1.0).contains(&alpha) || b > 3.0 * alpha - 2.0 {
                return Err(Error::UnsupportedRegime {
                    alpha,
                    reason: "three-term MAC instance needs 2/3 <= alpha < 1, B <= 3a-2".into(),
                });
            }
            let q1c = halfwidth_from_lambda(p, alpha - b - eps);
            let q2c = halfwidth_from_lambda(p, b - eps);
            let (eta1, eta2) = if q1c >= q2c {
                (1.0, eta_realized(q1c, q2c))
            } else {
                (eta_realized(q2c, q1c), 1.0)
            };
            Ok((
                MinDistProblem {
                    scales: vec![
                        1.0,
                        p.powf((1.0 - alpha + b) / 2.0),
                        p.powf((2.0 * alpha - 1.0 - b) / 2.0),
                    ],
                    gains: vec![
                        h.h11 / 4.0,
                        eta1 * h.h11 / 2.0,
                        eta2 * h.h12 * h.h21 / (2.0 * h.h22),
                    ],
                    q_ranges: vec![
                        halfwidth_from_lambda(p, 1.0 - alpha - eps) as f64,
                        q1c as f64,
                        q2c as f64,
                    ],
                },
                kappa * p.powf(eps / 2.0),
            ))
        }
        OutageInstance::MacAlphaOne { d1, d2 } => {
            let q1 = halfwidth_from_lambda(p, d1 - eps);
            let q2 = halfwidth_from_lambda(p, d2 - eps);
            let (eta1, eta2) = if q1 >= q2 {
                (1.0, eta_realized(q1, q2))
            } else {
                (eta_realized(q2, q1), 1.0)
            };
            Ok((
                MinDistProblem {
                    scales: vec![
                        p.powf((1.0 - d1 + eps) / 2.0),
                        p.powf((1.0 - d2 + eps) / 2.0),
                    ],
                    gains: vec![eta1 * h.h11, eta2 * h.h12 * h.h21 / h.h22],
                    q_ranges: vec![q1 as f64, q2 as f64],
                },
                kappa * p.powf(eps / 2.0),
            ))
        }
    }
}

const PURPOSE_OUTAGE: u64 = 0x0d;

/// Monte Carlo fraction of uniform channel draws whose minimum distance falls
/// below the instance threshold.
pub fn outage_fraction(
    alpha: f64,
    p: f64,
    eps: f64,
    kappa: f64,
    inst: OutageInstance,
    n_draws: u64,
    seed: u64,
) -> Result<McEstimate> {
    if n_draws == 0 {
        return Err(Error::NoTrials);
    }
    let mut hits = 0u64;
    for i in 0..n_draws {
        let mut rng = stream_rng(seed, PURPOSE_OUTAGE, i);
        let h = sample_h_with(&mut rng);
        let (prob, threshold) = instantiate(inst, alpha, p, eps, kappa, &h)?;
        let d = min_distance(&prob, DEFAULT_ENUM_CAP)?;
        if d < threshold {
            hits += 1;
        }
    }
    let mean = hits as f64 / n_draws as f64;
    let stderr = (mean * (1.0 - mean) / n_draws as f64).sqrt();
    Ok(McEstimate { mean, stderr, trials: n_draws, seed })
}

/// The per-draw problem and threshold, exposed for cross-checks against the
/// joint decoder.
pub fn outage_instance_for_draw(
    inst: OutageInstance,
    alpha: f64,
    p: f64,
    eps: f64,
    kappa: f64,
    h: &HMatrix,
) -> Result<(MinDistProblem, f64)> {
    instantiate(inst, alpha, p, eps, kappa, h)
}
