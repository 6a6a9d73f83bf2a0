//! Per-regime decode plans assembled from the receiver decompositions.
//!
//! Layers are sorted by received power. A layer whose half spacing dominates
//! the worst-case interference underneath it is peeled; when that fails the
//! layer is decoded jointly with the next one as a two-term integer search,
//! which is exactly where the designs rely on rational independence of the
//! gains. A trailing layer that cannot be certified is still decoded (errors
//! are counted honestly); refusal semantics live in the standalone decoder
//! API, not in the Monte Carlo path.

use std::collections::BTreeMap;

use crate::channel::{ChannelConfig, Setting};
use crate::constellation::PamSet;
use crate::decoder::{joint_lattice_decode, JointTerm, DEFAULT_SEARCH_CAP};
use crate::design::{RxDecomposition, SchemeDesign, Source, Term};
use crate::error::Result;
use crate::{scheme_ic, scheme_macwt, scheme_wth};

/// What a decode layer estimates.
#[derive(Debug, Clone, PartialEq)]
pub enum LayerTarget {
    Src(Source),
    /// An aligned sum observed only as a whole; decoded to strip it, never
    /// counted as a message error.
    Sum(Vec<Source>),
}

#[derive(Debug, Clone)]
pub struct DecodeLayer {
    pub target: LayerTarget,
    /// Signed coefficient multiplying the symbol value at the receiver
    /// (power scale included).
    pub coeff: f64,
    /// Value lattice of the target.
    pub set: PamSet,
    /// Message user whose error count this layer feeds, if any.
    pub user: Option<u8>,
}

impl DecodeLayer {
    fn max_amplitude(&self) -> f64 {
        self.coeff.abs() * self.set.max_amplitude()
    }
}

#[derive(Debug, Clone)]
pub enum PlanStep {
    Peel {
        layer: DecodeLayer,
        interference: f64,
        certified: bool,
    },
    Joint {
        layers: Vec<DecodeLayer>,
    },
}

#[derive(Debug, Clone)]
pub struct DecodePlan {
    pub receiver: u8,
    pub steps: Vec<PlanStep>,
    /// Genie-given contributions subtracted before decoding: `(source,
    /// coefficient, constellation step)`; the subtraction is coefficient
    /// times the true symbol value.
    pub conditioned: Vec<(Source, f64, f64)>,
    pub residual_bound: f64,
}

pub fn decompositions(design: &SchemeDesign, cfg: &ChannelConfig) -> [RxDecomposition<f64>; 2] {
    match design.setting {
        Setting::IcSc => scheme_ic::decompose::<f64>(design, cfg),
        Setting::Wth => scheme_wth::decompose::<f64>(design, cfg),
        Setting::MacWt => scheme_macwt::decompose::<f64>(design, cfg),
    }
}

fn term_amp_coeff(t: &Term<f64>, p: f64) -> f64 {
    t.coeff * p.powf(t.exponent / 2.0)
}

/// Merge member sets of an aligned group (equal coefficients, integer step
/// ratios) into the lattice of their sum.
fn sum_set(design: &SchemeDesign, sources: &[Source]) -> PamSet {
    let sets: Vec<&PamSet> = sources
        .iter()
        .map(|s| design.constellation(*s).expect("aligned member has a set"))
        .collect();
    let fine = sets.iter().map(|s| s.step()).fold(f64::INFINITY, f64::min);
    let mut hw: u64 = 0;
    for s in &sets {
        let ratio = (s.step() / fine).round() as u64;
        hw += ratio * s.halfwidth();
    }
    PamSet::new(fine, hw).expect("valid sum lattice")
}

/// Build the decode plan for one receiver. `condition_user` removes that
/// user's layers and schedules their exact subtraction (the genie used by the
/// conditional-rate estimates; only meaningful where no aligned group
/// involves that user, i.e. receiver 1 of the multiple access design).
pub fn build_plan(
    design: &SchemeDesign,
    cfg: &ChannelConfig,
    receiver: u8,
    condition_user: Option<u8>,
) -> DecodePlan {
    let decomp = &decompositions(design, cfg)[receiver as usize - 1];
    let p = design.p;

    let mut conditioned = Vec::new();
    let mut layers: Vec<(f64, DecodeLayer)> = Vec::new();
    for t in &decomp.desired {
        let coeff = term_amp_coeff(t, p);
        if condition_user.is_some() && t.source.message_user() == condition_user {
            let step = design.constellation(t.source).map(|s| s.step()).unwrap_or(0.0);
            conditioned.push((t.source, coeff, step));
            continue;
        }
        layers.push((
            t.exponent,
            DecodeLayer {
                target: LayerTarget::Src(t.source),
                coeff,
                set: *design.constellation(t.source).expect("desired source has a set"),
                user: t.source.message_user(),
            },
        ));
    }
    for group in &decomp.aligned {
        let sources: Vec<Source> = group.iter().map(|t| t.source).collect();
        layers.push((
            group[0].exponent,
            DecodeLayer {
                target: LayerTarget::Sum(sources.clone()),
                coeff: term_amp_coeff(&group[0], p),
                set: sum_set(design, &sources),
                user: None,
            },
        ));
    }
    let mut residual_bound = decomp.residual_amplitude(p, &|s| design.max_amplitude(s));
    for t in &decomp.residual {
        if condition_user.is_some() && t.source.message_user() == condition_user {
            let coeff = term_amp_coeff(t, p);
            let step = design.constellation(t.source).map(|s| s.step()).unwrap_or(0.0);
            conditioned.push((t.source, coeff, step));
            residual_bound -= coeff.abs() * design.max_amplitude(t.source);
        }
    }

    // Strongest first; ties broken on the target for determinism.
    layers.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then_with(|| format!("{:?}", a.1.target).cmp(&format!("{:?}", b.1.target)))
    });

    let amps: Vec<f64> = layers.iter().map(|(_, l)| l.max_amplitude()).collect();
    let mut steps = Vec::new();
    let mut i = 0;
    while i < layers.len() {
        let below: f64 = amps[i + 1..].iter().sum::<f64>() + residual_bound;
        let half = layers[i].1.coeff.abs() * layers[i].1.set.step() / 2.0;
        if half > below {
            steps.push(PlanStep::Peel {
                layer: layers[i].1.clone(),
                interference: below,
                certified: true,
            });
            i += 1;
        } else if i + 1 < layers.len() {
            steps.push(PlanStep::Joint {
                layers: vec![layers[i].1.clone(), layers[i + 1].1.clone()],
            });
            i += 2;
        } else {
            steps.push(PlanStep::Peel {
                layer: layers[i].1.clone(),
                interference: below,
                certified: false,
            });
            i += 1;
        }
    }

    DecodePlan { receiver, steps, conditioned, residual_bound }
}

fn round_half_down(x: f64) -> f64 {
    (x - 0.5).ceil()
}

fn nearest_index(y: f64, coeff: f64, set: &PamSet) -> i64 {
    let q = set.halfwidth() as f64;
    round_half_down(y / (coeff * set.step())).max(-q).min(q) as i64
}

/// Run the plan on one observation. Returns, per user, whether any of that
/// user's layers decoded incorrectly.
pub fn execute(
    plan: &DecodePlan,
    y: f64,
    truth: &BTreeMap<Source, i64>,
) -> Result<[bool; 2]> {
    let mut rest = y;
    for (src, coeff, step) in &plan.conditioned {
        let idx = truth.get(src).copied().unwrap_or(0);
        rest -= coeff * step * idx as f64;
    }
    let mut wrong = [false; 2];
    let mut mark = |layer: &DecodeLayer, idx: i64, truth: &BTreeMap<Source, i64>| {
        if let (Some(user), LayerTarget::Src(s)) = (layer.user, &layer.target) {
            if truth.get(s).copied() != Some(idx) {
                wrong[user as usize - 1] = true;
            }
        }
    };
    for step in &plan.steps {
        match step {
            PlanStep::Peel { layer, .. } => {
                let idx = nearest_index(rest, layer.coeff, &layer.set);
                mark(layer, idx, truth);
                rest -= layer.coeff * layer.set.value(idx);
            }
            PlanStep::Joint { layers } => {
                let terms: Vec<JointTerm> = layers
                    .iter()
                    .map(|l| JointTerm {
                        coeff: l.coeff * l.set.step(),
                        halfrange: l.set.halfwidth() as i64,
                    })
                    .collect();
                let got = joint_lattice_decode(rest, &terms, f64::INFINITY, DEFAULT_SEARCH_CAP)?;
                for (l, &q) in layers.iter().zip(got.qs.iter()) {
                    mark(l, q, truth);
                    rest -= l.coeff * l.set.value(q);
                }
            }
        }
    }
    Ok(wrong)
}
