//! Monte Carlo experiment engine: symbol-error curves, leakage estimates
//! against the analytic penalty bounds, secure-rate proxies, and numeric
//! checks of the converse inequalities.
//!
//! Reproducibility contract: every trial owns an independent RNG stream keyed
//! by `(seed, purpose, trial index)`, and reductions are order-independent
//! (integer counts) or run over index-ordered buffers, so results are
//! bit-identical across runs and thread counts.

pub mod plan;

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::channel::{receive, stream_rng, ChannelConfig, HMatrix, Setting};
use crate::design::{MacRegime, Regime, SchemeDesign, Source, Term};
use crate::error::{Error, Result};
use crate::gdof::GdofPoint;

/// A Monte Carlo statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

const PURPOSE_MC: u64 = 1;
const PURPOSE_LEAK: u64 = 2;

fn draw_symbols<R: Rng>(design: &SchemeDesign, rng: &mut R) -> BTreeMap<Source, i64> {
    let mut out = BTreeMap::new();
    for s in design.active_sources() {
        let q = design.constellation(s).unwrap().halfwidth() as i64;
        out.insert(s, rng.gen_range(-q..=q));
    }
    out
}

fn symbol_values(design: &SchemeDesign, idx: &BTreeMap<Source, i64>) -> BTreeMap<Source, f64> {
    idx.iter()
        .map(|(&s, &k)| (s, design.constellation(s).unwrap().value(k)))
        .collect()
}

/// Receivers that decode messages in this setting.
fn decoding_receivers(setting: Setting) -> &'static [u8] {
    match setting {
        Setting::IcSc => &[1, 2],
        Setting::Wth | Setting::MacWt => &[1],
    }
}

/// Error rates of the per-regime decode plans.
#[derive(Debug, Clone, Copy)]
pub struct ErrorRates {
    /// Any targeted layer wrong.
    pub any: McEstimate,
    /// Per-user message error.
    pub user: [McEstimate; 2],
}

/// Monte Carlo symbol-error run; `condition_user` hands that user's symbols
/// to the receiver (used by the conditional-rate proxies on the multiple
/// access channel).
pub fn mc_errors(
    design: &SchemeDesign,
    cfg: &ChannelConfig,
    trials: u64,
    seed: u64,
    noiseless: bool,
    condition_user: Option<u8>,
) -> Result<ErrorRates> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let plans: Vec<plan::DecodePlan> = decoding_receivers(design.setting)
        .iter()
        .map(|&rx| plan::build_plan(design, cfg, rx, condition_user))
        .collect();

    let flags: Vec<[bool; 2]> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, PURPOSE_MC, t);
            let idx = draw_symbols(design, &mut rng);
            let vals = symbol_values(design, &idx);
            let (x1, x2) = design.modulate(&vals).expect("symbols from own sets");
            let (z1, z2) = if noiseless {
                (0.0, 0.0)
            } else {
                crate::channel::noise_pair(&mut rng)
            };
            let (y1, y2) = receive(cfg, x1, x2, z1, z2);
            let mut wrong = [false; 2];
            for p in &plans {
                let y = if p.receiver == 1 { y1 } else { y2 };
                let w = plan::execute(p, y, &idx).expect("plan executes");
                wrong[0] |= w[0];
                wrong[1] |= w[1];
            }
            wrong
        })
        .collect();

    let n = trials as f64;
    let count_any = flags.iter().filter(|w| w[0] || w[1]).count() as f64;
    let mk = |c: f64| McEstimate {
        mean: c / n,
        stderr: ((c / n) * (1.0 - c / n) / n).sqrt(),
        trials,
        seed,
    };
    Ok(ErrorRates {
        any: mk(count_any),
        user: [
            mk(flags.iter().filter(|w| w[0]).count() as f64),
            mk(flags.iter().filter(|w| w[1]).count() as f64),
        ],
    })
}

/// Fraction of trials in which any targeted layer decodes incorrectly.
pub fn mc_error_rate(
    design: &SchemeDesign,
    cfg: &ChannelConfig,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    Ok(mc_errors(design, cfg, trials, seed, false, None)?.any)
}

/// Noiseless override of [`mc_error_rate`].
pub fn mc_error_rate_noiseless(
    design: &SchemeDesign,
    cfg: &ChannelConfig,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    Ok(mc_errors(design, cfg, trials, seed, true, None)?.any)
}

/// Leakage estimate against the analytic penalty bound.
#[derive(Debug, Clone)]
pub struct LeakageReport {
    /// Discrete part plus Gaussian-residue part, in bits.
    pub estimate: McEstimate,
    /// Exact entropy difference of the aligned stacks.
    pub discrete_bits: f64,
    /// Plug-in differential-entropy residue, in bits.
    pub residue_bits: f64,
    /// Closed-form penalty cap for this design, in bits.
    pub analytic_bound_bits: f64,
}

/// Terms arriving at `rx`, conditioned sources removed.
fn rx_terms(
    design: &SchemeDesign,
    cfg: &ChannelConfig,
    rx: u8,
    condition_user: Option<u8>,
) -> Vec<Term<f64>> {
    let h = [[cfg.h.h11, cfg.h.h12], [cfg.h.h21, cfg.h.h22]];
    let mut out = Vec::new();
    for tx in 1..=2usize {
        let exp_link = if rx as usize == tx { 1.0 } else { cfg.alpha };
        for layer in &design.tx_layers[tx - 1] {
            if condition_user.is_some() && layer.source.message_user() == condition_user {
                continue;
            }
            out.push(Term {
                source: layer.source,
                coeff: design.eps_reg * layer.coeff * h[rx as usize - 1][tx - 1],
                exponent: exp_link - layer.beta,
            });
        }
    }
    out
}

/// Closed-form leakage cap for the design, in bits.
pub fn analytic_leakage_bound_bits(design: &SchemeDesign) -> f64 {
    let tau = design.tau as f64;
    match design.regime {
        Regime::Ic(_) => 1.0 + 0.5 * (4f64.powf(tau + 1.0) + 5.0).log2(),
        Regime::Wth(_) => (2.0 * 5f64.sqrt()).log2(),
        Regime::Mac(MacRegime::AlphaOne) => 3f64.log2(),
        Regime::Mac(_) => {
            let residue = 8.0 / (3.0 * tau * tau)
                + 2.0 / (3.0 * tau * tau * 4f64.powf(tau))
                + 1.0;
            3f64.log2()
                + 0.5 * residue.log2()
                + if design.has_source(Source::U2) { 1.0 } else { 0.0 }
        }
    }
}

fn leakage_estimate_at(
    design: &SchemeDesign,
    cfg: &ChannelConfig,
    eavesdropper: u8,
    condition_user: Option<u8>,
    trials: u64,
    seed: u64,
) -> Result<LeakageReport> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let mut terms = rx_terms(design, cfg, eavesdropper, condition_user);
    terms.sort_by(|a, b| {
        b.exponent
            .partial_cmp(&a.exponent)
            .unwrap()
            .then(a.source.cmp(&b.source))
    });

    // Cluster terms by arrival exponent and net out same-source images.
    let mut clusters: Vec<(f64, BTreeMap<Source, f64>)> = Vec::new();
    for t in &terms {
        match clusters.last_mut() {
            Some((e, map)) if (*e - t.exponent).abs() <= 1e-9 => {
                *map.entry(t.source).or_insert(0.0) += t.coeff;
            }
            _ => {
                let mut map = BTreeMap::new();
                map.insert(t.source, t.coeff);
                clusters.push((t.exponent, map));
            }
        }
    }

    let mut discrete_bits = 0.0;
    let mut residue_terms: Vec<(Source, f64)> = Vec::new();
    for (exp, map) in &clusters {
        let scale = map.values().fold(0.0f64, |m, c| m.max(c.abs()));
        let live: Vec<(Source, f64)> = map
            .iter()
            .filter(|(_, c)| c.abs() > 1e-9 * scale.max(f64::MIN_POSITIVE))
            .map(|(&s, &c)| (s, c))
            .collect();
        if live.is_empty() {
            continue; // fully neutralized stack
        }
        let has_message = live.iter().any(|(s, _)| s.message_user().is_some());
        if has_message && *exp > 1e-9 {
            // Aligned stack: only the sum is observable, and subtracting the
            // jam entropy leaves the discrete penalty.
            let mut sum_dist = design.constellation(live[0].0).unwrap().distribution();
            for (s, _) in live.iter().skip(1) {
                sum_dist = sum_dist.convolve(&design.constellation(*s).unwrap().distribution());
            }
            let mut jam_bits = 0.0;
            for (s, _) in live.iter().filter(|(s, _)| s.is_jam()) {
                jam_bits += design.constellation(*s).unwrap().entropy_bits();
            }
            discrete_bits += sum_dist.entropy_bits() - jam_bits;
        } else {
            let amp_scale = cfg.p.powf(exp / 2.0);
            for (s, c) in live {
                residue_terms.push((s, c * amp_scale));
            }
        }
    }

    // Gaussian plug-in for the differential-entropy residue.
    let samples: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, PURPOSE_LEAK, t);
            let mut x: f64 = StandardNormal.sample(&mut rng);
            for (s, amp) in &residue_terms {
                let set = design.constellation(*s).unwrap();
                let q = set.halfwidth() as i64;
                x += amp * set.value(rng.gen_range(-q..=q));
            }
            x
        })
        .collect();
    let n = trials as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    let m4 = samples
        .iter()
        .map(|x| {
            let d = x - mean;
            d * d * d * d
        })
        .sum::<f64>()
        / n;
    let residue_bits = 0.5 * var.log2();
    let var_of_var = ((m4 - var * var) / n).max(0.0);
    let stderr = var_of_var.sqrt() / (2.0 * std::f64::consts::LN_2 * var);

    Ok(LeakageReport {
        estimate: McEstimate {
            mean: discrete_bits + residue_bits,
            stderr,
            trials,
            seed,
        },
        discrete_bits,
        residue_bits,
        analytic_bound_bits: analytic_leakage_bound_bits(design),
    })
}

/// Leakage of the protected message(s) at the tapped receiver: user 1's
/// message at receiver 2 with the other message given (interference setting),
/// the single message at receiver 2 (helper setting), or both messages at
/// receiver 2 (multiple access setting).
pub fn leakage_estimate(
    design: &SchemeDesign,
    cfg: &ChannelConfig,
    trials: u64,
    seed: u64,
) -> Result<LeakageReport> {
    let cond = match design.setting {
        Setting::IcSc => Some(2),
        _ => None,
    };
    leakage_estimate_at(design, cfg, 2, cond, trials, seed)
}

/// Mirrored leakage for user 2 of the interference setting.
pub fn leakage_estimate_user2(
    design: &SchemeDesign,
    cfg: &ChannelConfig,
    trials: u64,
    seed: u64,
) -> Result<LeakageReport> {
    leakage_estimate_at(design, cfg, 1, Some(1), trials, seed)
}

/// Secure-rate proxies normalized by half log P.
#[derive(Debug, Clone)]
pub struct RateReport {
    pub d1_proxy: f64,
    pub d2_proxy: f64,
    pub dsum_proxy: f64,
    pub dc_proxy: f64,
    pub err: ErrorRates,
    pub leak_user1: LeakageReport,
    pub leak_user2: Option<LeakageReport>,
    /// Normalizer, bits.
    pub half_log_p: f64,
}

/// Decode-success Fano chain minus the leakage estimate, per message, plus
/// the shared-randomness rate, all over half log P.
pub fn secure_rate_eval(
    design: &SchemeDesign,
    cfg: &ChannelConfig,
    trials: u64,
    seed: u64,
) -> Result<RateReport> {
    let l = 0.5 * cfg.p.log2();
    let entropy_user = |u: u8| -> f64 {
        design
            .message_sources(u)
            .iter()
            .map(|s| design.constellation(*s).unwrap().entropy_bits())
            .sum()
    };
    let dc_proxy = design
        .active_sources()
        .filter(|s| s.is_jam())
        .map(|s| design.constellation(s).unwrap().entropy_bits())
        .sum::<f64>()
        / l;

    let err = mc_errors(design, cfg, trials, seed, false, None)?;
    let leak1 = leakage_estimate(design, cfg, trials, seed)?;
    match design.setting {
        Setting::IcSc => {
            let leak2 = leakage_estimate_user2(design, cfg, trials, seed)?;
            let d1 = ((1.0 - err.user[0].mean) * entropy_user(1) - 1.0 - leak1.estimate.mean) / l;
            let d2 = ((1.0 - err.user[1].mean) * entropy_user(2) - 1.0 - leak2.estimate.mean) / l;
            Ok(RateReport {
                d1_proxy: d1,
                d2_proxy: d2,
                dsum_proxy: d1 + d2,
                dc_proxy,
                err,
                leak_user1: leak1,
                leak_user2: Some(leak2),
                half_log_p: l,
            })
        }
        Setting::Wth => {
            let d1 = ((1.0 - err.user[0].mean) * entropy_user(1) - 1.0 - leak1.estimate.mean) / l;
            Ok(RateReport {
                d1_proxy: d1,
                d2_proxy: 0.0,
                dsum_proxy: d1,
                dc_proxy,
                err,
                leak_user1: leak1,
                leak_user2: None,
                half_log_p: l,
            })
        }
        Setting::MacWt => {
            // Sum rate from the joint decode; per-user rates with the other
            // message handed to the receiver.
            let h_all = entropy_user(1) + entropy_user(2);
            let dsum = ((1.0 - err.any.mean) * h_all - 1.0 - leak1.estimate.mean) / l;
            let e1 = mc_errors(design, cfg, trials, seed, false, Some(2))?;
            let e2 = mc_errors(design, cfg, trials, seed, false, Some(1))?;
            let d1 = ((1.0 - e1.user[0].mean) * entropy_user(1) - 1.0) / l;
            let d2 = ((1.0 - e2.user[1].mean) * entropy_user(2) - 1.0) / l;
            Ok(RateReport {
                d1_proxy: d1,
                d2_proxy: d2,
                dsum_proxy: dsum,
                dc_proxy,
                err,
                leak_user1: leak1,
                leak_user2: None,
                half_log_p: l,
            })
        }
    }
}

/// Result of checking a claimed operating point against the converse bounds.
#[derive(Debug, Clone, Copy)]
pub struct ConverseReport {
    /// Common randomness the bounds demand for this point.
    pub required_dc: f64,
    /// `dc - required_dc`; nonnegative means the point is consistent.
    pub slack: f64,
    pub pass: bool,
    /// Finite-P penalty terms, bits per channel use.
    pub finite_p: Option<FinitePenalties>,
}

#[derive(Debug, Clone, Copy)]
pub struct FinitePenalties {
    /// `1/2 log2(1 + P^(1-alpha) h11^2 / h21^2)`.
    pub user1_bits: f64,
    /// Companion bound for the second message where one exists.
    pub user2_bits: Option<f64>,
}

/// GDoF-level converse inequality plus, when (P, h) is given, the finite-P
/// penalty terms entering the underlying rate bounds.
pub fn converse_check(
    setting: Setting,
    alpha: f64,
    point: GdofPoint,
    finite: Option<(f64, HMatrix)>,
) -> Result<ConverseReport> {
    if alpha < 0.0 {
        return Err(Error::NegativeAlpha(alpha));
    }
    let up = (1.0 - alpha).max(0.0);
    let down = (alpha - 1.0).max(0.0);
    let required_dc = match setting {
        Setting::IcSc => point.dsum() / 2.0 - up,
        Setting::Wth => point.d1 - up,
        Setting::MacWt => (point.d1 - up).max(point.d2 - down),
    };
    let slack = point.dc - required_dc;
    let finite_p = finite.map(|(p, h)| {
        let pen = |num: f64, den: f64, e: f64| 0.5 * (1.0 + p.powf(e) * num * num / (den * den)).log2();
        let user1_bits = pen(h.h11, h.h21, 1.0 - alpha);
        let user2_bits = match setting {
            Setting::IcSc => Some(pen(h.h22, h.h12, 1.0 - alpha)),
            Setting::MacWt => Some(pen(h.h12, h.h22, alpha - 1.0)),
            Setting::Wth => None,
        };
        FinitePenalties { user1_bits, user2_bits }
    });
    Ok(ConverseReport { required_dc, slack, pass: slack >= -1e-12, finite_p })
}
