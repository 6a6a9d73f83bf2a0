//! Transmit designs for the multiple access wiretap channel.
//!
//! Receiver 1 decodes both messages; receiver 2 is the eavesdropper. Up to
//! two shared-randomness streams are spent: `u1` rides on top of both common
//! message layers at the eavesdropper, `u2` masks the mid-power layer `v2m`
//! when the rate split `B` calls for one. The step sizes of the two common
//! layers are nudged by factors `eta` in [1, 2) so that their minimum
//! distances stand in an exact integer ratio, which caps the entropy of the
//! three-way aligned sum seen by the eavesdropper.
//!
//! Only `alpha <= 1` is designed directly; a tuple achievable at `alpha` maps
//! to one at `1/alpha` by exchanging the transmitter roles, scaling every
//! GDoF component by `1/alpha`.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::channel::{ChannelConfig, HMatrix, Setting};
use crate::constellation::{halfwidth_from_lambda, PamSet};
use crate::design::{
    check_lambda, cpow, default_eps, power_regularizer, Coeff, Hm, MacRegime, Regime,
    RxDecomposition, SchemeDesign, Source, Term, TxLayer,
};
use crate::error::{Error, Result};
use crate::gdof::{mac_region_contains, GdofPoint};

/// Inputs selecting one multiple-access design.
#[derive(Debug, Clone)]
pub struct MacDesignInput {
    pub cfg: ChannelConfig,
    /// Rate-split knob in [0, alpha]; used for alpha < 1. Defaults to alpha/2.
    pub b: Option<f64>,
    /// Target GDoF pair; used at alpha = 1. Defaults to (1/2, 1/2).
    pub target_pair: Option<(f64, f64)>,
}

/// Exchange transmitter roles: a tuple achievable at `alpha` becomes
/// `(d2/alpha, d1/alpha, dc/alpha)` at `1/alpha`.
pub fn role_swap(point: GdofPoint, alpha: f64) -> Result<(GdofPoint, f64)> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::NegativeAlpha(alpha));
    }
    Ok((
        GdofPoint::new(point.d2 / alpha, point.d1 / alpha, point.dc / alpha),
        1.0 / alpha,
    ))
}

/// Chain length per stream: even, at least as long as both neutralization
/// budgets demand.
pub fn chain_len(alpha: f64, b: f64) -> u32 {
    if alpha == 1.0 {
        return 2;
    }
    let t1 = crate::design::ceil_tol(alpha / (1.0 - alpha));
    let t2 = crate::design::ceil_tol((1.0 - alpha + b) / (1.0 - alpha));
    (2.0 * crate::design::ceil_tol(t1.max(t2) / 2.0)) as u32
}

pub fn default_gamma(tau: u32) -> f64 {
    1.0 / (tau as f64 * 2f64.powi(tau as i32))
}

fn delta1<T: Coeff>(alpha_one: bool, h: &Hm<T>, ell: u32) -> T {
    if alpha_one {
        -(h.h12.clone() * h.h21.clone()) / h.det()
    } else {
        -cpow(&h.cross_ratio(), ell)
    }
}

fn delta2<T: Coeff>(alpha_one: bool, h: &Hm<T>, ell: u32) -> T {
    if alpha_one {
        (h.h11.clone() * h.h21.clone()) / h.det()
    } else {
        h.h21.clone() / h.h22.clone() * cpow(&h.cross_ratio(), ell - 1)
    }
}

/// `beta_{1,k,l} = (2l - k + 1)(1 - alpha)`; zero at alpha = 1.
fn beta_u1(alpha: f64, tx: u8, ell: u32) -> f64 {
    if alpha == 1.0 {
        0.0
    } else {
        (2.0 * ell as f64 - tx as f64 + 1.0) * (1.0 - alpha)
    }
}

/// The second stream runs the same chain shifted up by `1 + B - 2 alpha`.
fn beta_u2(alpha: f64, b: f64, tx: u8, ell: u32) -> f64 {
    beta_u1(alpha, tx, ell) - (1.0 + b - 2.0 * alpha)
}

/// Step-ratio regularizer in its idealized form, from unrounded rate
/// exponents: `ceil(sqrt(P^(lm - ln))) / sqrt(P^(lm - ln))`.
pub fn eta_formula(p: f64, lambda_m: f64, lambda_n: f64) -> f64 {
    let root = p.powf((lambda_m - lambda_n) / 2.0);
    root.ceil() / root
}

/// Realized step-ratio regularizer from the two integer half-widths:
/// `ceil(Qm/Qn) / (Qm/Qn)`, so the step ratio is an exact integer at any
/// finite P.
fn eta_realized(q_m: u64, q_n: u64) -> f64 {
    let rho = q_m as f64 / q_n as f64;
    rho.ceil() / rho
}

#[derive(Debug, Clone, Copy)]
struct MacColumn {
    regime: MacRegime,
    has_v2c: bool,
    has_v2m: bool,
    has_v1p: bool,
}

fn column_for(alpha: f64, b: f64) -> MacColumn {
    let thresh = (2.0 * alpha - 1.0).max(0.0);
    let (regime, small_b) = if alpha <= 2.0 / 3.0 {
        if b <= thresh {
            (MacRegime::LowAlphaSmallB, true)
        } else {
            (MacRegime::LowAlphaLargeB, false)
        }
    } else if b <= thresh {
        (MacRegime::MidAlphaSmallB, true)
    } else {
        (MacRegime::MidAlphaLargeB, false)
    };
    MacColumn {
        regime,
        has_v2c: true, // trimmed later if its rate budget is zero
        has_v2m: !small_b,
        has_v1p: regime != MacRegime::MidAlphaLargeB,
    }
}

/// Build the multiple-access design. `alpha > 1` is served by
/// [`design_macwt_swapped`]; here it is rejected with a pointer to the swap.
pub fn design_macwt(
    input: &MacDesignInput,
    eps: Option<f64>,
    gamma: Option<f64>,
) -> Result<SchemeDesign> {
    let cfg = &input.cfg;
    let alpha = cfg.alpha;
    if alpha > 1.0 {
        return Err(Error::UnsupportedRegime {
            alpha,
            reason: "build the design at 1/alpha and exchange transmitter roles (role_swap)"
                .into(),
        });
    }
    if alpha == 1.0 {
        design_macwt_alpha_one(input, eps, gamma)
    } else {
        design_macwt_below_one(input, eps, gamma)
    }
}

fn design_macwt_below_one(
    input: &MacDesignInput,
    eps: Option<f64>,
    gamma: Option<f64>,
) -> Result<SchemeDesign> {
    let cfg = &input.cfg;
    let alpha = cfg.alpha;
    let b = input.b.unwrap_or(alpha / 2.0);
    if !(0.0..=alpha).contains(&b) {
        return Err(Error::BOutOfRange { b, lo: 0.0, hi: alpha });
    }
    let mut col = column_for(alpha, b);
    let tau = crate::design::check_chain_len(alpha, chain_len(alpha, b))?;
    let gbound = default_gamma(tau);
    let gamma = gamma.unwrap_or(gbound);
    if !(gamma > 0.0 && gamma <= gbound) {
        return Err(Error::GammaOutOfRange { gamma, bound: gbound });
    }

    let thresh = (2.0 * alpha - 1.0).max(0.0);
    // Rate budgets per the design table; multiplier is the back-off count.
    let lambda_2c_budget = if col.has_v2m { thresh } else { b };
    let lambda_2m_budget = if col.has_v2m { b - thresh } else { 0.0 };
    let lambda_1p_budget = match col.regime {
        MacRegime::LowAlphaSmallB => 1.0 - alpha - b,
        MacRegime::LowAlphaLargeB => (b.max(1.0 - alpha) - b).max(0.0),
        MacRegime::MidAlphaSmallB => (1.0 - alpha).min(2.0 * alpha - 1.0 - b),
        _ => 0.0,
    };
    let lambda_1c_mult = match col.regime {
        MacRegime::LowAlphaSmallB | MacRegime::MidAlphaLargeB => 1.0,
        _ => 2.0,
    };
    let lambda_1c_budget = match col.regime {
        MacRegime::LowAlphaSmallB => alpha,
        MacRegime::MidAlphaLargeB => 1.0 - b,
        _ => (1.0 - b - lambda_1p_budget).max(0.0),
    };
    let eps = eps.unwrap_or_else(|| {
        default_eps(&[
            (lambda_2c_budget, 1.0),
            (lambda_2m_budget, 1.0),
            (lambda_1p_budget, 1.0),
            (lambda_1c_budget, lambda_1c_mult + 1.0),
        ])
    });

    col.has_v2c = lambda_2c_budget > 0.0;
    col.has_v1p = col.has_v1p && lambda_1p_budget > 0.0;
    col.has_v2m = col.has_v2m && lambda_2m_budget > 0.0;

    let lambda_1p = if col.has_v1p {
        Some(check_lambda("v_1p", eps, lambda_1p_budget - eps)?)
    } else {
        None
    };
    // The table ties lambda_1c to the realized lambda_1p.
    let lambda_1c = check_lambda(
        "v_1c",
        eps,
        match col.regime {
            MacRegime::LowAlphaSmallB => alpha - eps,
            MacRegime::MidAlphaLargeB => 1.0 - b - eps,
            _ => (1.0 - b - lambda_1p.unwrap_or(0.0)).max(0.0) - 2.0 * eps,
        },
    )?;
    let lambda_2c = if col.has_v2c {
        Some(check_lambda("v_2c", eps, lambda_2c_budget - eps)?)
    } else {
        None
    };
    let lambda_2m = if col.has_v2m {
        Some(check_lambda("v_2m", eps, lambda_2m_budget - eps)?)
    } else {
        None
    };

    // Constellations. The two common layers get an exact integer ratio of
    // minimum distances through eta.
    let q1 = halfwidth_from_lambda(cfg.p, lambda_1c);
    let q2 = lambda_2c.map(|l| halfwidth_from_lambda(cfg.p, l));
    let (eta1, eta2) = match q2 {
        Some(q2) => {
            if lambda_1c >= lambda_2c.unwrap() {
                (1.0, eta_realized(q1, q2))
            } else {
                (eta_realized(q2, q1), 1.0)
            }
        }
        None => (1.0, 1.0),
    };
    let q_u = q1.max(q2.unwrap_or(1));

    let mut constellations = BTreeMap::new();
    let mut lambdas = BTreeMap::new();
    constellations.insert(Source::V1c, PamSet::new(eta1 * gamma / q1 as f64, q1)?);
    lambdas.insert(Source::V1c, lambda_1c);
    if let (Some(l2c), Some(q2)) = (lambda_2c, q2) {
        constellations.insert(Source::V2c, PamSet::new(eta2 * gamma / q2 as f64, q2)?);
        lambdas.insert(Source::V2c, l2c);
    }
    constellations.insert(Source::U, PamSet::new(gamma / q_u as f64, q_u)?);
    lambdas.insert(Source::U, lambda_1c.max(lambda_2c.unwrap_or(0.0)));
    if let Some(lp) = lambda_1p {
        let qp = halfwidth_from_lambda(cfg.p, lp);
        constellations.insert(Source::V1p, PamSet::new(gamma / (2.0 * qp as f64), qp)?);
        lambdas.insert(Source::V1p, lp);
    }
    if let Some(lm) = lambda_2m {
        let qm = halfwidth_from_lambda(cfg.p, lm);
        let set = PamSet::new(gamma / (2.0 * qm as f64), qm)?;
        constellations.insert(Source::V2m, set);
        constellations.insert(Source::U2, set);
        lambdas.insert(Source::V2m, lm);
        lambdas.insert(Source::U2, lm);
    }

    let hm = Hm::<f64>::from_matrix(&cfg.h);
    let v2_scale = cfg.h.h21 / cfg.h.h22;
    let mut tx1 = vec![TxLayer { source: Source::V1c, coeff: 1.0, beta: 0.0 }];
    if lambda_1p.is_some() {
        tx1.push(TxLayer { source: Source::V1p, coeff: 1.0, beta: alpha });
    }
    let mut tx2 = Vec::new();
    if col.has_v2c {
        tx2.push(TxLayer { source: Source::V2c, coeff: v2_scale, beta: 1.0 - alpha });
    }
    if col.has_v2m {
        tx2.push(TxLayer { source: Source::V2m, coeff: v2_scale, beta: alpha - b });
    }
    for ell in 1..=tau / 2 {
        tx1.push(TxLayer {
            source: Source::U,
            coeff: delta1(false, &hm, ell),
            beta: beta_u1(alpha, 1, ell),
        });
        tx2.push(TxLayer {
            source: Source::U,
            coeff: delta2(false, &hm, ell),
            beta: beta_u1(alpha, 2, ell),
        });
        if col.has_v2m {
            tx1.push(TxLayer {
                source: Source::U2,
                coeff: delta1(false, &hm, ell),
                beta: beta_u2(alpha, b, 1, ell),
            });
            tx2.push(TxLayer {
                source: Source::U2,
                coeff: delta2(false, &hm, ell),
                beta: beta_u2(alpha, b, 2, ell),
            });
        }
    }

    let dc_ideal = lambda_1c_budget.max(lambda_2c_budget) + lambda_2m_budget;
    let d1_real = lambda_1c + lambda_1p.unwrap_or(0.0);
    let d2_real = lambda_2c.unwrap_or(0.0) + lambda_2m.unwrap_or(0.0);
    let dc_real = lambdas[&Source::U] + lambda_2m.unwrap_or(0.0);
    Ok(SchemeDesign {
        setting: Setting::MacWt,
        regime: Regime::Mac(col.regime),
        alpha,
        p: cfg.p,
        tau,
        gamma,
        eps_reg: power_regularizer(cfg)?,
        eps,
        constellations,
        lambdas,
        tx_layers: [tx1, tx2],
        claimed: GdofPoint::new(1.0 - b, b, dc_ideal),
        eps_deficit: GdofPoint::new(
            (1.0 - b - d1_real) / eps,
            (b - d2_real) / eps,
            (dc_ideal - dc_real) / eps,
        ),
        b: Some(b),
        target_pair: None,
        eta: Some((eta1, eta2)),
    })
}

fn design_macwt_alpha_one(
    input: &MacDesignInput,
    eps: Option<f64>,
    gamma: Option<f64>,
) -> Result<SchemeDesign> {
    let cfg = &input.cfg;
    let (d1, d2) = input.target_pair.unwrap_or((0.5, 0.5));
    if !mac_region_contains(1.0, d1, d2) {
        return Err(Error::PointOutsideRegion { alpha: 1.0, d1, d2 });
    }
    let tau = 2u32;
    let gbound = default_gamma(tau);
    let gamma = gamma.unwrap_or(gbound);
    if !(gamma > 0.0 && gamma <= gbound) {
        return Err(Error::GammaOutOfRange { gamma, bound: gbound });
    }
    let eps = eps.unwrap_or_else(|| default_eps(&[(d1, 1.0), (d2, 1.0)]));
    let lambda_1c = if d1 > 0.0 {
        Some(check_lambda("v_1c", eps, d1 - eps)?)
    } else {
        None
    };
    let lambda_2c = if d2 > 0.0 {
        Some(check_lambda("v_2c", eps, d2 - eps)?)
    } else {
        None
    };

    let q1 = lambda_1c.map(|l| halfwidth_from_lambda(cfg.p, l));
    let q2 = lambda_2c.map(|l| halfwidth_from_lambda(cfg.p, l));
    let (eta1, eta2) = match (q1, q2) {
        (Some(a), Some(bq)) => {
            if lambda_1c >= lambda_2c {
                (1.0, eta_realized(a, bq))
            } else {
                (eta_realized(bq, a), 1.0)
            }
        }
        _ => (1.0, 1.0),
    };
    let q_u = q1.unwrap_or(1).max(q2.unwrap_or(1));

    let mut constellations = BTreeMap::new();
    let mut lambdas = BTreeMap::new();
    if let (Some(l), Some(q)) = (lambda_1c, q1) {
        constellations.insert(Source::V1c, PamSet::new(eta1 * gamma / q as f64, q)?);
        lambdas.insert(Source::V1c, l);
    }
    if let (Some(l), Some(q)) = (lambda_2c, q2) {
        constellations.insert(Source::V2c, PamSet::new(eta2 * gamma / q as f64, q)?);
        lambdas.insert(Source::V2c, l);
    }
    constellations.insert(Source::U, PamSet::new(gamma / q_u as f64, q_u)?);
    lambdas.insert(
        Source::U,
        lambda_1c.unwrap_or(0.0).max(lambda_2c.unwrap_or(0.0)),
    );

    let hm = Hm::<f64>::from_matrix(&cfg.h);
    if cfg.h.det().abs() < 1e-13 {
        return Err(Error::DegenerateChannel);
    }
    let v2_scale = cfg.h.h21 / cfg.h.h22;
    let mut tx1 = Vec::new();
    if lambda_1c.is_some() {
        tx1.push(TxLayer { source: Source::V1c, coeff: 1.0, beta: 0.0 });
    }
    tx1.push(TxLayer { source: Source::U, coeff: delta1(true, &hm, 1), beta: 0.0 });
    let mut tx2 = Vec::new();
    if lambda_2c.is_some() {
        tx2.push(TxLayer { source: Source::V2c, coeff: v2_scale, beta: 0.0 });
    }
    tx2.push(TxLayer { source: Source::U, coeff: delta2(true, &hm, 1), beta: 0.0 });

    let dc_real = lambdas[&Source::U];
    Ok(SchemeDesign {
        setting: Setting::MacWt,
        regime: Regime::Mac(MacRegime::AlphaOne),
        alpha: 1.0,
        p: cfg.p,
        tau,
        gamma,
        eps_reg: power_regularizer(cfg)?,
        eps,
        constellations,
        lambdas,
        tx_layers: [tx1, tx2],
        claimed: GdofPoint::new(d1, d2, d1.max(d2)),
        eps_deficit: GdofPoint::new(
            if lambda_1c.is_some() { 1.0 } else { 0.0 },
            if lambda_2c.is_some() { 1.0 } else { 0.0 },
            (d1.max(d2) - dc_real) / eps,
        ),
        b: None,
        target_pair: Some((d1, d2)),
        eta: Some((eta1, eta2)),
    })
}

/// Descriptor tying a design built at `alpha_built <= 1` to the channel at
/// `alpha_target = 1/alpha_built` via the transmitter-role exchange.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoleSwap {
    pub alpha_built: f64,
    pub alpha_target: f64,
}

impl RoleSwap {
    pub fn map(&self, point: GdofPoint) -> GdofPoint {
        GdofPoint::new(
            point.d2 / self.alpha_built,
            point.d1 / self.alpha_built,
            point.dc / self.alpha_built,
        )
    }
}

/// For `alpha > 1`: build the equivalent design on the role-swapped channel
/// (`alpha' = 1/alpha`, `P' = P^alpha`, coefficients exchanged) plus the swap
/// descriptor mapping its claims back to the original channel.
pub fn design_macwt_swapped(
    cfg: &ChannelConfig,
    b_prime: Option<f64>,
    eps: Option<f64>,
    gamma: Option<f64>,
) -> Result<(SchemeDesign, RoleSwap)> {
    if cfg.alpha <= 1.0 {
        return Err(Error::UnsupportedRegime {
            alpha: cfg.alpha,
            reason: "role swap only serves alpha > 1; call design_macwt directly".into(),
        });
    }
    let swapped_h = HMatrix::new(cfg.h.h12, cfg.h.h11, cfg.h.h22, cfg.h.h21)?;
    let swapped = ChannelConfig::new(
        cfg.p.powf(cfg.alpha),
        1.0 / cfg.alpha,
        swapped_h,
        Setting::MacWt,
    )?;
    let design = design_macwt(
        &MacDesignInput { cfg: swapped, b: b_prime, target_pair: None },
        eps,
        gamma,
    )?;
    Ok((
        design,
        RoleSwap { alpha_built: 1.0 / cfg.alpha, alpha_target: cfg.alpha },
    ))
}

/// Ideal operating points traced by sweeping B across both columns.
pub fn b_sweep(alpha: f64, points_per_column: usize) -> Result<Vec<(f64, GdofPoint)>> {
    if !(0.0 < alpha && alpha <= 1.0) {
        return Err(Error::UnsupportedRegime {
            alpha,
            reason: "sweep runs the direct design, so alpha must be in (0, 1]".into(),
        });
    }
    let thresh = (2.0 * alpha - 1.0).max(0.0);
    let mut out = Vec::new();
    let push_range = |lo: f64, hi: f64, out: &mut Vec<(f64, GdofPoint)>| {
        if hi < lo {
            return;
        }
        let n = if hi - lo < 1e-12 { 1 } else { points_per_column.max(2) };
        for i in 0..n {
            let b = if n == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            };
            let dc = if b <= thresh {
                // single-stream column
                let l2c = b;
                let l1c = if alpha <= 2.0 / 3.0 { alpha } else { 1.0 - b - (1.0 - alpha).min(2.0 * alpha - 1.0 - b) };
                l1c.max(l2c)
            } else {
                let l2c = thresh;
                let l1p = if alpha <= 2.0 / 3.0 { (b.max(1.0 - alpha) - b).max(0.0) } else { 0.0 };
                let l1c = 1.0 - b - l1p;
                l1c.max(l2c) + (b - thresh)
            };
            out.push((b, GdofPoint::new(1.0 - b, b, dc)));
        }
    };
    push_range(0.0, thresh, &mut out);
    push_range(thresh, alpha, &mut out);
    out.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12);
    Ok(out)
}

/// Receiver-side structural grouping; receiver 1 decodes, receiver 2 taps.
pub fn decompose<T: Coeff>(design: &SchemeDesign, cfg: &ChannelConfig) -> [RxDecomposition<T>; 2] {
    let Regime::Mac(regime) = design.regime else {
        panic!("not a multiple-access design");
    };
    let alpha_one = regime == MacRegime::AlphaOne;
    let h = Hm::<T>::from_matrix(&cfg.h);
    let alpha = design.alpha;
    let b = design.b.unwrap_or(0.0);
    let half = design.tau / 2;
    let ereg = T::from_f64(design.eps_reg);
    let d1 = |ell: u32| ereg.clone() * delta1::<T>(alpha_one, &h, ell);
    let d2 = |ell: u32| ereg.clone() * delta2::<T>(alpha_one, &h, ell);
    let v2_scale = h.h21.clone() / h.h22.clone();

    let has = |s: Source| design.has_source(s);
    let cross_image = ereg.clone() * h.h12.clone() * v2_scale.clone(); // h12 h21 / h22

    // Receiver 1.
    let mut desired1 = Vec::new();
    if has(Source::V1c) {
        desired1.push(Term {
            source: Source::V1c,
            coeff: ereg.clone() * h.h11.clone(),
            exponent: 1.0,
        });
    }
    if has(Source::V2c) {
        desired1.push(Term {
            source: Source::V2c,
            coeff: cross_image.clone(),
            exponent: if alpha_one { 1.0 } else { 2.0 * alpha - 1.0 },
        });
    }
    if has(Source::V2m) {
        desired1.push(Term { source: Source::V2m, coeff: cross_image.clone(), exponent: b });
    }
    if has(Source::V1p) {
        desired1.push(Term {
            source: Source::V1p,
            coeff: ereg.clone() * h.h11.clone(),
            exponent: 1.0 - alpha,
        });
    }
    let mut pairs1 = Vec::new();
    let chain_top = if alpha_one { 1 } else { half };
    for ell in 1..=chain_top {
        pairs1.push((
            Term {
                source: Source::U,
                coeff: d1(ell) * h.h11.clone(),
                exponent: 1.0 - beta_u1(alpha, 1, ell),
            },
            Term {
                source: Source::U,
                coeff: d2(ell) * h.h12.clone(),
                exponent: alpha - beta_u1(alpha, 2, ell),
            },
        ));
        if has(Source::U2) {
            pairs1.push((
                Term {
                    source: Source::U2,
                    coeff: d1(ell) * h.h11.clone(),
                    exponent: 1.0 - beta_u2(alpha, b, 1, ell),
                },
                Term {
                    source: Source::U2,
                    coeff: d2(ell) * h.h12.clone(),
                    exponent: alpha - beta_u2(alpha, b, 2, ell),
                },
            ));
        }
    }

    // Receiver 2: the aligned stack(s), the chain cancellations, leftovers.
    let mut aligned2: Vec<Vec<Term<T>>> = Vec::new();
    let mut group1 = Vec::new();
    if has(Source::V1c) {
        group1.push(Term {
            source: Source::V1c,
            coeff: ereg.clone() * h.h21.clone(),
            exponent: alpha,
        });
    }
    if has(Source::V2c) {
        group1.push(Term {
            source: Source::V2c,
            coeff: ereg.clone() * h.h22.clone() * v2_scale.clone(),
            exponent: if alpha_one { 1.0 } else { 1.0 - (1.0 - alpha) },
        });
    }
    group1.push(Term {
        source: Source::U,
        coeff: if alpha_one {
            d1(1) * h.h21.clone() + d2(1) * h.h22.clone()
        } else {
            d2(1) * h.h22.clone()
        },
        exponent: if alpha_one { 1.0 } else { 1.0 - beta_u1(alpha, 2, 1) },
    });
    aligned2.push(group1);
    if has(Source::V2m) {
        aligned2.push(vec![
            Term {
                source: Source::V2m,
                coeff: ereg.clone() * h.h22.clone() * v2_scale.clone(),
                exponent: 1.0 - (alpha - b),
            },
            Term {
                source: Source::U2,
                coeff: d2(1) * h.h22.clone(),
                exponent: 1.0 - beta_u2(alpha, b, 2, 1),
            },
        ]);
    }
    let mut pairs2 = Vec::new();
    let mut residual2 = Vec::new();
    if !alpha_one {
        for ell in 1..half {
            pairs2.push((
                Term {
                    source: Source::U,
                    coeff: d1(ell) * h.h21.clone(),
                    exponent: alpha - beta_u1(alpha, 1, ell),
                },
                Term {
                    source: Source::U,
                    coeff: d2(ell + 1) * h.h22.clone(),
                    exponent: 1.0 - beta_u1(alpha, 2, ell + 1),
                },
            ));
            if has(Source::U2) {
                pairs2.push((
                    Term {
                        source: Source::U2,
                        coeff: d1(ell) * h.h21.clone(),
                        exponent: alpha - beta_u2(alpha, b, 1, ell),
                    },
                    Term {
                        source: Source::U2,
                        coeff: d2(ell + 1) * h.h22.clone(),
                        exponent: 1.0 - beta_u2(alpha, b, 2, ell + 1),
                    },
                ));
            }
        }
        residual2.push(Term {
            source: Source::U,
            coeff: d1(half) * h.h21.clone(),
            exponent: alpha - beta_u1(alpha, 1, half),
        });
        if has(Source::U2) {
            residual2.push(Term {
                source: Source::U2,
                coeff: d1(half) * h.h21.clone(),
                exponent: alpha - beta_u2(alpha, b, 1, half),
            });
        }
        if has(Source::V1p) {
            // tx1 reaches the tap through h21; the private layer lands at the
            // noise floor there.
            residual2.push(Term {
                source: Source::V1p,
                coeff: ereg.clone() * h.h21.clone(),
                exponent: 0.0,
            });
        }
    }

    [
        RxDecomposition {
            receiver: 1,
            desired: desired1,
            aligned: Vec::new(),
            neutralized_pairs: pairs1,
            residual: Vec::new(),
        },
        RxDecomposition {
            receiver: 2,
            desired: Vec::new(),
            aligned: aligned2,
            neutralized_pairs: pairs2,
            residual: residual2,
        },
    ]
}

pub fn rx_decompose_macwt(
    design: &SchemeDesign,
    cfg: &ChannelConfig,
) -> (RxDecomposition<f64>, RxDecomposition<f64>) {
    let [a, b] = decompose::<f64>(design, cfg);
    (a, b)
}

pub fn rx_decompose_macwt_exact(
    design: &SchemeDesign,
    cfg: &ChannelConfig,
) -> (RxDecomposition<BigRational>, RxDecomposition<BigRational>) {
    let [a, b] = decompose::<BigRational>(design, cfg);
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sample_h;
    use std::collections::BTreeMap;

    fn mk(alpha: f64, b: Option<f64>, p: f64, seed: u64) -> MacDesignInput {
        MacDesignInput {
            cfg: ChannelConfig::new(p, alpha, sample_h(seed), Setting::MacWt).unwrap(),
            b,
            target_pair: None,
        }
    }

    #[test]
    fn chain_len_example() {
        // alpha = 0.5, B = 0.25: max(ceil(1), ceil(1.5)) = 2, rounded up to even.
        assert_eq!(chain_len(0.5, 0.25), 2);
        assert_eq!(chain_len(0.8, 0.5), 4);
        assert_eq!(chain_len(1.0, 0.0), 2);
    }

    #[test]
    fn alpha_above_one_is_deferred_to_role_swap() {
        let input = mk(1.5, Some(0.2), 1e6, 1);
        assert!(matches!(
            design_macwt(&input, None, None),
            Err(Error::UnsupportedRegime { .. })
        ));
        let (d, swap) = design_macwt_swapped(&input.cfg, Some(0.25), None, None).unwrap();
        assert!((d.alpha - 1.0 / 1.5).abs() < 1e-15);
        assert!((swap.alpha_target - 1.5).abs() < 1e-15);
        let mapped = swap.map(d.claimed);
        assert!(mac_region_contains(1.5, mapped.d1, mapped.d2));
    }

    #[test]
    fn b_out_of_range_rejected() {
        let input = mk(0.5, Some(0.7), 1e6, 2);
        assert!(matches!(design_macwt(&input, None, None), Err(Error::BOutOfRange { .. })));
    }

    #[test]
    fn role_swap_examples() {
        let (p, a) = role_swap(GdofPoint::new(0.5, 0.5, 0.5), 1.0).unwrap();
        assert!((a - 1.0).abs() < 1e-15 && (p.d1 - 0.5).abs() < 1e-15);
        let (p, a) = role_swap(GdofPoint::new(0.6, 0.4, 0.3), 0.5).unwrap();
        assert!((a - 2.0).abs() < 1e-15);
        assert!((p.d1 - 0.8).abs() < 1e-15 && (p.d2 - 1.2).abs() < 1e-15 && (p.dc - 0.6).abs() < 1e-15);
        assert!(role_swap(GdofPoint::new(0.1, 0.1, 0.1), 0.0).is_err());
    }

    #[test]
    fn role_swap_is_an_involution() {
        for (d1, d2, dc, alpha) in [(0.3, 0.4, 0.2, 0.7), (0.9, 0.05, 0.9, 0.51), (0.0, 0.6, 0.6, 0.61)] {
            let p = GdofPoint::new(d1, d2, dc);
            let (q, a) = role_swap(p, alpha).unwrap();
            let (r, b) = role_swap(q, a).unwrap();
            assert!((b - alpha).abs() < 1e-12);
            assert!((r.d1 - p.d1).abs() < 1e-12 && (r.d2 - p.d2).abs() < 1e-12 && (r.dc - p.dc).abs() < 1e-12);
        }
    }

    #[test]
    fn swapped_points_stay_in_region() {
        for alpha in [0.5f64, 0.8] {
            for (_, pt) in b_sweep(alpha, 9).unwrap() {
                let (sw, ap) = role_swap(pt, alpha).unwrap();
                assert!(
                    mac_region_contains(ap, sw.d1, sw.d2),
                    "alpha'={ap} point=({}, {})",
                    sw.d1,
                    sw.d2
                );
            }
        }
    }

    #[test]
    fn eta_formula_example() {
        // P = 1e6, lambda_m = 0.5, lambda_n = 0.3: ceil(P^0.1)/P^0.1 = 4/3.98107...
        let e = eta_formula(1e6, 0.5, 0.3);
        assert!((e - 4.0 / 1e6f64.powf(0.1)).abs() < 1e-12);
        assert!((e - 1.004754).abs() < 1e-6);
    }

    #[test]
    fn eta_integral_step_ratio_in_designs() {
        for (alpha, b, seed) in [(0.5, Some(0.25), 3u64), (0.6, Some(0.1), 4), (0.8, Some(0.5), 5), (0.8, Some(0.7), 6)] {
            let input = mk(alpha, b, 1e6, seed);
            let d = design_macwt(&input, None, None).unwrap();
            let (e1, e2) = d.eta.unwrap();
            assert!((1.0..2.0).contains(&e1) && (1.0..2.0).contains(&e2));
            if let (Some(c1), Some(c2)) = (d.constellation(Source::V1c), d.constellation(Source::V2c)) {
                let ratio = if c1.step() >= c2.step() {
                    c1.step() / c2.step()
                } else {
                    c2.step() / c1.step()
                };
                assert!(
                    (ratio - ratio.round()).abs() < 1e-9 * ratio,
                    "ratio {ratio} is not an integer"
                );
            }
        }
        // alpha = 1 with a symmetric pair: both eta are 1, steps equal.
        let mut input = mk(1.0, None, 1e6, 7);
        input.target_pair = Some((0.5, 0.5));
        if input.cfg.h.det().abs() > 1e-9 {
            let d = design_macwt(&input, None, None).unwrap();
            let (e1, e2) = d.eta.unwrap();
            assert!((e1 - 1.0).abs() < 1e-15 && (e2 - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn aligned_sum_entropy_is_capped() {
        // Entropy of v1c + v2c + u1 stays within log2(6 Q' + 1).
        let input = mk(0.8, Some(0.5), 1e6, 8);
        let d = design_macwt(&input, None, None).unwrap();
        let v1 = d.constellation(Source::V1c).unwrap();
        let v2 = d.constellation(Source::V2c).unwrap();
        let u = d.constellation(Source::U).unwrap();
        let sum = v1.distribution().convolve(&v2.distribution()).convolve(&u.distribution());
        let qp = u.halfwidth().max(v1.halfwidth()).max(v2.halfwidth());
        assert!(sum.entropy_bits() <= ((6 * qp + 1) as f64).log2() + 1e-9);
    }

    #[test]
    fn structure_checks_all_columns() {
        use rand::Rng;
        let cases = [
            (0.6, Some(0.1), 100u64),  // low alpha, small B
            (0.5, Some(0.25), 200),    // low alpha, large B (two streams)
            (0.8, Some(0.5), 300),     // mid alpha, small B
            (0.8, Some(0.7), 400),     // mid alpha, large B
        ];
        for (alpha, b, seed0) in cases {
            for s in 0..100u64 {
                let input = mk(alpha, b, 1e6, seed0 + s);
                let d = design_macwt(&input, None, None).unwrap();
                let (r1, r2) = rx_decompose_macwt(&d, &input.cfg);
                for r in [&r1, &r2] {
                    for def in r.pair_defects() {
                        assert!(def <= 1e-10, "alpha={alpha} defect={def}");
                    }
                    assert!(r.alignment_defect() <= 1e-10);
                    assert!(r.exponent_defect() <= 1e-12);
                }
                let (e1, e2) = rx_decompose_macwt_exact(&d, &input.cfg);
                for r in [&e1, &e2] {
                    for sum in r.pair_sums() {
                        assert!(sum.is_zero());
                    }
                    for g in &r.aligned {
                        for t in g.iter().skip(1) {
                            assert_eq!(t.coeff, g[0].coeff);
                        }
                    }
                }
                for tx in 1..=2 {
                    assert!(d.exact_power(tx) <= 1.0, "alpha={alpha} tx={tx}");
                }
                // Residuals at the tap sit at or below the noise scale.
                for t in &r2.residual {
                    assert!(t.exponent <= 1e-12, "alpha={alpha} exp={}", t.exponent);
                }
                // Noiseless receive matches the grouped reconstruction.
                let mut rng = crate::channel::stream_rng(11, 3, seed0 + s);
                let mut sym = BTreeMap::new();
                for src in d.active_sources() {
                    let set = d.constellation(src).unwrap();
                    let q = set.halfwidth() as i64;
                    sym.insert(src, set.value(rng.gen_range(-q..=q)));
                }
                let (x1, x2) = d.modulate(&sym).unwrap();
                let (y1, y2) = crate::channel::receive(&input.cfg, x1, x2, 0.0, 0.0);
                assert!((y1 - r1.evaluate(input.cfg.p, &sym)).abs() <= 1e-12 * y1.abs().max(1.0));
                assert!((y2 - r2.evaluate(input.cfg.p, &sym)).abs() <= 1e-12 * y2.abs().max(1.0));
            }
        }
    }

    #[test]
    fn alpha_one_structure() {
        use rand::Rng;
        for s in 0..100u64 {
            let mut input = mk(1.0, None, 1e6, 900 + s);
            input.target_pair = Some((0.5, 0.5));
            if input.cfg.h.det().abs() < 1e-9 {
                continue;
            }
            let d = design_macwt(&input, None, None).unwrap();
            assert!((d.claimed.dc - 0.5).abs() < 1e-15);
            let (r1, r2) = rx_decompose_macwt(&d, &input.cfg);
            for def in r1.pair_defects() {
                assert!(def <= 1e-10);
            }
            assert!(r2.alignment_defect() <= 1e-10);
            let (e1, e2) = rx_decompose_macwt_exact(&d, &input.cfg);
            for sum in e1.pair_sums() {
                assert!(sum.is_zero());
            }
            for g in &e2.aligned {
                for t in g.iter().skip(1) {
                    assert_eq!(t.coeff, g[0].coeff);
                }
            }
            let mut rng = crate::channel::stream_rng(12, 3, s);
            let mut sym = BTreeMap::new();
            for src in d.active_sources() {
                let set = d.constellation(src).unwrap();
                let q = set.halfwidth() as i64;
                sym.insert(src, set.value(rng.gen_range(-q..=q)));
            }
            let (x1, x2) = d.modulate(&sym).unwrap();
            let (y1, y2) = crate::channel::receive(&input.cfg, x1, x2, 0.0, 0.0);
            assert!((y1 - r1.evaluate(input.cfg.p, &sym)).abs() <= 1e-12 * y1.abs().max(1.0));
            assert!((y2 - r2.evaluate(input.cfg.p, &sym)).abs() <= 1e-12 * y2.abs().max(1.0));
        }
    }

    #[test]
    fn b_sweep_traces_the_sum_face() {
        for alpha in [0.5, 0.8, 0.99, 1.0] {
            for (b, pt) in b_sweep(alpha, 33).unwrap() {
                assert!((pt.d1 + pt.d2 - 1.0).abs() < 1e-12, "b={b}");
                assert!(mac_region_contains(alpha, pt.d1, pt.d2));
                assert!(pt.dc <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn claimed_dc_at_alpha_one_matches_minimum() {
        let mut input = mk(1.0, None, 1e8, 40);
        input.target_pair = Some((0.7, 0.2));
        if input.cfg.h.det().abs() < 1e-9 {
            return;
        }
        let d = design_macwt(&input, None, None).unwrap();
        assert!((d.claimed.dc - crate::gdof::mac_min_dc_alpha1(0.7, 0.2).unwrap()).abs() < 1e-15);
    }
}
