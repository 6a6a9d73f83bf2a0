//! Receiver-side estimators.
//!
//! Two styles cover every design here: peel-and-cancel over layers whose
//! spacing dominates the worst-case interference below them, and a joint
//! nearest-point search over scaled integer combinations when two or three
//! layers arrive too close in power to separate one at a time.

use crate::constellation::PamSet;
use crate::error::{Error, Result};

/// Gaussian tail `Q(x) = P(N(0,1) > x)`.
pub fn qfunc(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Outcome of a single-layer decode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerDecode {
    /// Estimated constellation index.
    pub index: i64,
    /// Estimated symbol value, `step * index`.
    pub value: f64,
    /// Analytic error bound `2 Q(coeff*step/2 - interference)` clamped to 1;
    /// valid when the residual interference really is bounded as claimed.
    pub err_bound: f64,
}

/// Round with exact midpoints going down; keeps midway observations mapping
/// to the lower symbol deterministically.
fn round_half_down(x: f64) -> f64 {
    (x - 0.5).ceil()
}

fn clamp_index(k: f64, q: u64) -> i64 {
    let q = q as f64;
    k.max(-q).min(q) as i64
}

/// Nearest-point estimate of a PAM symbol observed as
/// `y = coeff * symbol + g + z` with `|g| <= interference_bound`.
pub fn awgn_layer_decode(
    y: f64,
    coeff: f64,
    set: &PamSet,
    interference_bound: f64,
) -> Result<LayerDecode> {
    if !(coeff > 0.0) {
        return Err(Error::NonpositiveCoeff(coeff));
    }
    let spacing = coeff * set.step();
    let index = clamp_index(round_half_down(y / spacing), set.halfwidth());
    let err_bound = (2.0 * qfunc(spacing / 2.0 - interference_bound)).min(1.0);
    Ok(LayerDecode { index, value: set.value(index), err_bound })
}

/// One stage of a peel-and-cancel plan. `coeff` multiplies the symbol value
/// at the receiver and may be signed; `interference_bound` must dominate
/// everything below this layer (noise excluded).
#[derive(Debug, Clone)]
pub struct SuccessiveStep {
    pub coeff: f64,
    pub set: PamSet,
    pub interference_bound: f64,
}

/// Peel-and-cancel: decode the top layer, subtract it exactly, recurse.
///
/// Every step is certified up front: the half spacing must exceed the stated
/// interference bound, otherwise the step could be swamped even without
/// noise and the plan is refused.
pub fn successive_decode(y: f64, plan: &[SuccessiveStep]) -> Result<Vec<LayerDecode>> {
    for (i, step) in plan.iter().enumerate() {
        if step.coeff == 0.0 {
            return Err(Error::NonpositiveCoeff(step.coeff));
        }
        let half = step.coeff.abs() * step.set.step() / 2.0;
        if step.interference_bound >= half {
            return Err(Error::Uncertifiable {
                step: i,
                bound: step.interference_bound,
                half_spacing: half,
            });
        }
    }
    let mut rest = y;
    let mut out = Vec::with_capacity(plan.len());
    for step in plan {
        let spacing = step.coeff * step.set.step();
        let index = clamp_index(round_half_down(rest / spacing), step.set.halfwidth());
        let value = step.set.value(index);
        rest -= step.coeff * value;
        let err_bound =
            (2.0 * qfunc(spacing.abs() / 2.0 - step.interference_bound)).min(1.0);
        out.push(LayerDecode { index, value, err_bound });
    }
    Ok(out)
}

/// One term of a joint search: `coeff * q` with `q` an integer in
/// `[-halfrange, halfrange]`.
#[derive(Debug, Clone, Copy)]
pub struct JointTerm {
    pub coeff: f64,
    pub halfrange: i64,
}

#[derive(Debug, Clone)]
pub struct JointDecode {
    pub qs: Vec<i64>,
    /// `|y - sum coeff_i * q_i|` at the minimizer.
    pub residual_abs: f64,
    /// Whether the residual is inside the caller-certified noise-plus-bounded
    /// magnitude; a decode outside it means the observation left the model.
    pub within_bound: bool,
}

pub const DEFAULT_SEARCH_CAP: u128 = 10_000_000;

/// Joint minimizer of `|y - sum coeff_i q_i|` over 2- or 3-term integer
/// boxes.
///
/// The search is exact: all axes but the widest are enumerated, and for each
/// combination the widest axis is solved in closed form (nearest integer,
/// checked against its two neighbors before clamping). `cap` bounds the full
/// box volume exactly as a plain exhaustive scan would.
pub fn joint_lattice_decode(
    y: f64,
    terms: &[JointTerm],
    noise_plus_bounded: f64,
    cap: u128,
) -> Result<JointDecode> {
    if !(2..=3).contains(&terms.len()) {
        return Err(Error::BadTermCount(terms.len()));
    }
    let mut volume: u128 = 1;
    for t in terms {
        if t.coeff == 0.0 {
            return Err(Error::NonpositiveCoeff(t.coeff));
        }
        if t.halfrange < 0 {
            return Err(Error::InvalidConstellation("negative range".into()));
        }
        volume = volume.saturating_mul(2 * t.halfrange as u128 + 1);
    }
    if volume > cap {
        return Err(Error::SearchSpaceExceeded { size: volume, cap });
    }

    let pivot = terms
        .iter()
        .enumerate()
        .max_by_key(|(_, t)| t.halfrange)
        .map(|(i, _)| i)
        .unwrap();
    let cp = terms[pivot].coeff;
    let qp_max = terms[pivot].halfrange;

    let others: Vec<usize> = (0..terms.len()).filter(|&i| i != pivot).collect();
    let mut best: Option<(f64, Vec<i64>)> = None;
    let mut qs = vec![0i64; terms.len()];

    let consider = |qs: &mut Vec<i64>, best: &mut Option<(f64, Vec<i64>)>, partial: f64| {
        let target = (y - partial) / cp;
        let center = target.round() as i64;
        for qcand in [center - 1, center, center + 1] {
            let qc = qcand.clamp(-qp_max, qp_max);
            let r = (y - partial - cp * qc as f64).abs();
            if best.as_ref().is_none_or(|(b, _)| r < *b) {
                qs[pivot] = qc;
                *best = Some((r, qs.clone()));
            }
        }
    };

    match others.len() {
        1 => {
            let i = others[0];
            for qi in -terms[i].halfrange..=terms[i].halfrange {
                qs[i] = qi;
                let partial = terms[i].coeff * qi as f64;
                consider(&mut qs, &mut best, partial);
            }
        }
        2 => {
            let (i, j) = (others[0], others[1]);
            for qi in -terms[i].halfrange..=terms[i].halfrange {
                for qj in -terms[j].halfrange..=terms[j].halfrange {
                    qs[i] = qi;
                    qs[j] = qj;
                    let partial = terms[i].coeff * qi as f64 + terms[j].coeff * qj as f64;
                    consider(&mut qs, &mut best, partial);
                }
            }
        }
        _ => unreachable!(),
    }

    let (residual_abs, qs) = best.unwrap();
    Ok(JointDecode { within_bound: residual_abs <= noise_plus_bounded, qs, residual_abs })
}
