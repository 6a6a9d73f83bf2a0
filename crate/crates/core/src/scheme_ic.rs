//! Transmit designs for the interference channel with confidential messages.
//!
//! Both transmitters embed the shared randomness `u` into a chain of layers
//! `delta_{k,l} * sqrt(P^-beta_l) * u`. The first chain element of one
//! transmitter lands on the other receiver with exactly the coefficient and
//! power of the cross message layer (alignment); each later element cancels
//! the image the previous one created at the opposite receiver, and the chain
//! is cut once the leftover sits at or below the noise floor.
//!
//! Five design columns cover alpha in (1/2, 2/3], [2/3, 1), {1}, (1, 2] and
//! [2, inf). Boundary values resolve to the lower column; both columns agree
//! there.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::channel::{ChannelConfig, Setting};
use crate::constellation::{halfwidth_from_lambda, PamSet};
use crate::design::{
    check_lambda, cpow, default_eps, power_regularizer, Coeff, Hm, IcRegime, Regime,
    RxDecomposition, SchemeDesign, Source, Term, TxLayer,
};
use crate::error::{Error, Result};
use crate::gdof::{ic_min_dc, ic_sum_gdof, GdofPoint};

/// Regime column for a given alpha; boundaries resolve downward.
pub fn regime_for(alpha: f64) -> Result<IcRegime> {
    if alpha <= 0.5 {
        return Err(Error::UnsupportedRegime {
            alpha,
            reason: "for alpha <= 1/2 the optimum needs no shared randomness; \
                     this laboratory only builds the jamming designs"
                .into(),
        });
    }
    Ok(if alpha <= 2.0 / 3.0 {
        IcRegime::HalfTwoThirds
    } else if alpha < 1.0 {
        IcRegime::TwoThirdsOne
    } else if alpha == 1.0 {
        IcRegime::One
    } else if alpha <= 2.0 {
        IcRegime::OneTwo
    } else {
        IcRegime::TwoPlus
    })
}

/// Chain length: `ceil(alpha/(1-alpha))` below 1, `ceil(alpha/(alpha-1))`
/// above 1, and 1 on the seam.
pub fn chain_len(alpha: f64) -> u32 {
    if alpha < 1.0 {
        crate::design::ceil_tol(alpha / (1.0 - alpha)) as u32
    } else if alpha > 1.0 {
        crate::design::ceil_tol(alpha / (alpha - 1.0)) as u32
    } else {
        1
    }
}

pub fn default_gamma(tau: u32) -> f64 {
    1.0 / (tau as f64 * 2f64.powi(tau as i32))
}

/// Chain coefficient for alpha < 1 (both design columns below 1 share it).
/// Odd elements carry the cross-over-direct entry of the own row; even
/// elements are pure powers of the cross ratio.
fn delta_low<T: Coeff>(h: &Hm<T>, tx: u8, ell: u32) -> T {
    let r = h.cross_ratio();
    if ell.is_multiple_of(2) {
        -cpow(&r, ell / 2)
    } else {
        let other = if tx == 1 { 2 } else { 1 };
        h.entry(tx, other) / h.entry(tx, tx) * cpow(&r, (ell - 1) / 2)
    }
}

/// Chain coefficient for alpha > 1; powers run over the inverse ratio.
fn delta_high<T: Coeff>(h: &Hm<T>, tx: u8, ell: u32) -> T {
    let rinv = T::one() / h.cross_ratio();
    if ell.is_multiple_of(2) {
        let other = if tx == 1 { 2 } else { 1 };
        // -(h_ii / h_ij) with i the other user, j = tx.
        let c = h.entry(other, other) / h.entry(other, tx);
        -(c * cpow(&rinv, ell / 2 - 1))
    } else {
        cpow(&rinv, (ell - 1) / 2)
    }
}

/// Single-element chain on the alpha = 1 seam.
fn delta_one<T: Coeff>(h: &Hm<T>, tx: u8) -> T {
    let det = h.det();
    if tx == 1 {
        (h.h22.clone() * h.h12.clone() - h.h12.clone() * h.h21.clone()) / det
    } else {
        (h.h11.clone() * h.h21.clone() - h.h21.clone() * h.h12.clone()) / det
    }
}

pub fn delta<T: Coeff>(regime: IcRegime, h: &Hm<T>, tx: u8, ell: u32) -> T {
    match regime {
        IcRegime::HalfTwoThirds | IcRegime::TwoThirdsOne => delta_low(h, tx, ell),
        IcRegime::OneTwo | IcRegime::TwoPlus => delta_high(h, tx, ell),
        IcRegime::One => delta_one(h, tx),
    }
}

fn beta_u(regime: IcRegime, alpha: f64, ell: u32) -> f64 {
    match regime {
        IcRegime::HalfTwoThirds | IcRegime::TwoThirdsOne => (1.0 - alpha) * ell as f64,
        IcRegime::One => 0.0,
        IcRegime::OneTwo | IcRegime::TwoPlus => (alpha - 1.0) * (ell as f64 - 1.0),
    }
}

struct Column {
    /// (budget, eps multiplier) for the common layer.
    lambda_c: (f64, f64),
    /// Private-layer budget; `None` when the layer is absent.
    lambda_p: Option<(f64, f64)>,
    beta_p: f64,
}

fn column(regime: IcRegime, alpha: f64) -> Column {
    match regime {
        IcRegime::HalfTwoThirds => Column {
            lambda_c: (2.0 * alpha - 1.0, 1.0),
            lambda_p: Some((1.0 - alpha, 1.0)),
            beta_p: alpha,
        },
        IcRegime::TwoThirdsOne => Column {
            lambda_c: (alpha / 2.0, 1.0),
            lambda_p: Some((1.0 - alpha, 1.0)),
            beta_p: alpha,
        },
        IcRegime::One => Column {
            lambda_c: (0.5, 1.0),
            lambda_p: None,
            beta_p: f64::INFINITY,
        },
        IcRegime::OneTwo => Column {
            lambda_c: (alpha / 2.0, 1.0),
            lambda_p: None,
            beta_p: f64::INFINITY,
        },
        IcRegime::TwoPlus => Column {
            lambda_c: (1.0, 1.0),
            lambda_p: None,
            beta_p: f64::INFINITY,
        },
    }
}

/// Build the interference-channel design for `cfg`, forcing a regime column.
/// Seam tests use this to exercise both columns at a boundary alpha.
pub fn design_ic_in_regime(
    cfg: &ChannelConfig,
    regime: IcRegime,
    eps: Option<f64>,
    gamma: Option<f64>,
) -> Result<SchemeDesign> {
    let alpha = cfg.alpha;
    let tau = crate::design::check_chain_len(
        alpha,
        match regime {
            IcRegime::One => 1,
            _ => chain_len(alpha),
        },
    )?;
    let gbound = default_gamma(tau);
    let gamma = gamma.unwrap_or(gbound);
    if !(gamma > 0.0 && gamma <= gbound) {
        return Err(Error::GammaOutOfRange { gamma, bound: gbound });
    }
    let col = column(regime, alpha);
    let mut budgets = vec![col.lambda_c];
    if let Some(lp) = col.lambda_p {
        budgets.push(lp);
    }
    let eps = eps.unwrap_or_else(|| default_eps(&budgets));

    let lambda_c = check_lambda("v_kc", eps, col.lambda_c.0 - col.lambda_c.1 * eps)?;
    let lambda_p = match col.lambda_p {
        Some((b, m)) if b > 0.0 => Some(check_lambda("v_kp", eps, b - m * eps)?),
        _ => None,
    };

    let qc = halfwidth_from_lambda(cfg.p, lambda_c);
    let set_c = PamSet::new(gamma / qc as f64, qc)?;
    let mut constellations = BTreeMap::new();
    let mut lambdas = BTreeMap::new();
    constellations.insert(Source::V1c, set_c);
    constellations.insert(Source::V2c, set_c);
    constellations.insert(Source::U, set_c);
    lambdas.insert(Source::V1c, lambda_c);
    lambdas.insert(Source::V2c, lambda_c);
    lambdas.insert(Source::U, lambda_c);
    if let Some(lp) = lambda_p {
        let qp = halfwidth_from_lambda(cfg.p, lp);
        let set_p = PamSet::new(gamma / (2.0 * qp as f64), qp)?;
        constellations.insert(Source::V1p, set_p);
        constellations.insert(Source::V2p, set_p);
        lambdas.insert(Source::V1p, lp);
        lambdas.insert(Source::V2p, lp);
    }

    let hm = Hm::<f64>::from_matrix(&cfg.h);
    let eps_reg = power_regularizer(cfg)?;
    if regime == IcRegime::One && cfg.h.det().abs() < 1e-13 {
        return Err(Error::DegenerateChannel);
    }

    let mut tx_layers: [Vec<TxLayer>; 2] = [Vec::new(), Vec::new()];
    for tx in 1..=2u8 {
        let msg_c = if tx == 1 { Source::V1c } else { Source::V2c };
        let layers = &mut tx_layers[tx as usize - 1];
        layers.push(TxLayer { source: msg_c, coeff: 1.0, beta: 0.0 });
        if lambda_p.is_some() {
            let msg_p = if tx == 1 { Source::V1p } else { Source::V2p };
            layers.push(TxLayer { source: msg_p, coeff: 1.0, beta: col.beta_p });
        }
        for ell in 1..=tau {
            layers.push(TxLayer {
                source: Source::U,
                coeff: delta(regime, &hm, tx, ell),
                beta: beta_u(regime, alpha, ell),
            });
        }
    }

    let dsum = ic_sum_gdof(alpha)?;
    let dc = ic_min_dc(alpha)?;
    let per_user_deficit = col.lambda_c.1 + col.lambda_p.map(|p| p.1).unwrap_or(0.0);
    Ok(SchemeDesign {
        setting: Setting::IcSc,
        regime: Regime::Ic(regime),
        alpha,
        p: cfg.p,
        tau,
        gamma,
        eps_reg,
        eps,
        constellations,
        lambdas,
        tx_layers,
        claimed: GdofPoint::new(dsum / 2.0, dsum / 2.0, dc),
        eps_deficit: GdofPoint::new(per_user_deficit, per_user_deficit, 1.0),
        b: None,
        target_pair: None,
        eta: None,
    })
}

/// Build the interference-channel design for `cfg` with optional overrides of
/// the back-off and the chain amplitude cap.
pub fn design_ic(cfg: &ChannelConfig, eps: Option<f64>, gamma: Option<f64>) -> Result<SchemeDesign> {
    design_ic_in_regime(cfg, regime_for(cfg.alpha)?, eps, gamma)
}

/// Receiver-side structural grouping, generic over the coefficient scalar.
pub fn decompose<T: Coeff>(design: &SchemeDesign, cfg: &ChannelConfig) -> [RxDecomposition<T>; 2] {
    let Regime::Ic(regime) = design.regime else {
        panic!("not an interference-channel design");
    };
    let h = Hm::<T>::from_matrix(&cfg.h);
    let alpha = design.alpha;
    let tau = design.tau;
    let ereg = T::from_f64(design.eps_reg);
    let d = |tx: u8, ell: u32| ereg.clone() * delta(regime, &h, tx, ell);
    let has_private = design.has_source(Source::V1p);

    let mut out: Vec<RxDecomposition<T>> = Vec::with_capacity(2);
    for rx in 1..=2u8 {
        let other = if rx == 1 { 2 } else { 1 };
        let (own_c, own_p, cross_c, cross_p) = if rx == 1 {
            (Source::V1c, Source::V1p, Source::V2c, Source::V2p)
        } else {
            (Source::V2c, Source::V2p, Source::V1c, Source::V1p)
        };
        let hd = ereg.clone() * h.entry(rx, rx);
        let hc = ereg.clone() * h.entry(rx, other);

        let mut desired = vec![Term { source: own_c, coeff: hd.clone(), exponent: 1.0 }];
        if has_private {
            desired.push(Term {
                source: own_p,
                coeff: hd.clone(),
                exponent: 1.0 - alpha,
            });
        }

        let mut aligned = Vec::new();
        let mut pairs = Vec::new();
        let mut residual = Vec::new();
        match regime {
            IcRegime::HalfTwoThirds | IcRegime::TwoThirdsOne => {
                // Own chain element 1 masks the cross common layer; element
                // l+1 of the own chain cancels element l of the cross chain.
                aligned.push(vec![
                    Term { source: cross_c, coeff: hc.clone(), exponent: alpha },
                    Term {
                        source: Source::U,
                        coeff: d(rx, 1) * h.entry(rx, rx),
                        exponent: 1.0 - beta_u(regime, alpha, 1),
                    },
                ]);
                for ell in 1..tau {
                    pairs.push((
                        Term {
                            source: Source::U,
                            coeff: d(rx, ell + 1) * h.entry(rx, rx),
                            exponent: 1.0 - beta_u(regime, alpha, ell + 1),
                        },
                        Term {
                            source: Source::U,
                            coeff: d(other, ell) * h.entry(rx, other),
                            exponent: alpha - beta_u(regime, alpha, ell),
                        },
                    ));
                }
                residual.push(Term {
                    source: Source::U,
                    coeff: d(other, tau) * h.entry(rx, other),
                    exponent: (tau as f64 + 1.0) * alpha - tau as f64,
                });
                residual.push(Term { source: cross_p, coeff: hc.clone(), exponent: 0.0 });
            }
            IcRegime::One => {
                // Single element per chain; the two images of u combine into
                // exactly the cross coefficient, so u rides on the cross
                // common layer with no leftover.
                aligned.push(vec![
                    Term { source: cross_c, coeff: hc.clone(), exponent: 1.0 },
                    Term {
                        source: Source::U,
                        coeff: d(rx, 1) * h.entry(rx, rx) + d(other, 1) * h.entry(rx, other),
                        exponent: 1.0,
                    },
                ]);
            }
            IcRegime::OneTwo | IcRegime::TwoPlus => {
                // The cross chain element 1 masks the cross common layer;
                // element l+1 of the cross chain cancels element l of the own
                // chain.
                aligned.push(vec![
                    Term { source: cross_c, coeff: hc.clone(), exponent: alpha },
                    Term {
                        source: Source::U,
                        coeff: d(other, 1) * h.entry(rx, other),
                        exponent: alpha - beta_u(regime, alpha, 1),
                    },
                ]);
                for ell in 1..tau {
                    pairs.push((
                        Term {
                            source: Source::U,
                            coeff: d(rx, ell) * h.entry(rx, rx),
                            exponent: 1.0 - beta_u(regime, alpha, ell),
                        },
                        Term {
                            source: Source::U,
                            coeff: d(other, ell + 1) * h.entry(rx, other),
                            exponent: alpha - beta_u(regime, alpha, ell + 1),
                        },
                    ));
                }
                residual.push(Term {
                    source: Source::U,
                    coeff: d(rx, tau) * h.entry(rx, rx),
                    exponent: tau as f64 - (tau as f64 - 1.0) * alpha,
                });
            }
        }
        out.push(RxDecomposition { receiver: rx, desired, aligned, neutralized_pairs: pairs, residual });
    }
    let snd = out.pop().unwrap();
    let fst = out.pop().unwrap();
    [fst, snd]
}

/// Float-coefficient decomposition for simulation.
pub fn rx_decompose_ic(
    design: &SchemeDesign,
    cfg: &ChannelConfig,
) -> (RxDecomposition<f64>, RxDecomposition<f64>) {
    let [a, b] = decompose::<f64>(design, cfg);
    (a, b)
}

/// Exact-rational decomposition for structure verification.
pub fn rx_decompose_ic_exact(
    design: &SchemeDesign,
    cfg: &ChannelConfig,
) -> (RxDecomposition<BigRational>, RxDecomposition<BigRational>) {
    let [a, b] = decompose::<BigRational>(design, cfg);
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_h, HMatrix};
    use std::collections::BTreeMap;

    fn cfg(alpha: f64, p: f64, seed: u64) -> ChannelConfig {
        ChannelConfig::new(p, alpha, sample_h(seed), Setting::IcSc).unwrap()
    }

    #[test]
    fn chain_lengths() {
        assert_eq!(chain_len(0.6), 2);
        assert_eq!(chain_len(0.8), 4);
        assert_eq!(chain_len(4.0 / 3.0), 4);
        assert_eq!(chain_len(2.5), 2);
        assert_eq!(chain_len(2.0), 2);
    }

    #[test]
    fn low_alpha_rejected() {
        assert!(matches!(
            design_ic(&cfg(0.4, 1e6, 3), None, None),
            Err(Error::UnsupportedRegime { .. })
        ));
    }

    #[test]
    fn alpha_too_close_to_one_is_rejected_not_overflowed() {
        // The chain would need hundreds of layers whose amplitudes leave the
        // double-precision range.
        assert!(matches!(
            design_ic(&cfg(0.999, 1e6, 3), None, None),
            Err(Error::UnsupportedRegime { .. })
        ));
        // tau = 49 still fits comfortably.
        assert!(design_ic(&cfg(0.98, 1e6, 3), None, None).is_ok());
    }

    #[test]
    fn alpha_one_regularizer_and_delta() {
        let h = HMatrix::new(2.0, 1.5, 1.5, 2.0).unwrap();
        let c = ChannelConfig::new(1e6, 1.0, h, Setting::IcSc).unwrap();
        let d = design_ic(&c, Some(0.05), None).unwrap();
        assert!((d.eps_reg - 0.21875).abs() < 1e-15);
        let hm = Hm::<f64>::from_matrix(&h);
        let d11 = delta(IcRegime::One, &hm, 1, 1);
        assert!((d11 - 3.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn four_thirds_matches_worked_example() {
        let c = cfg(4.0 / 3.0, 1e8, 11);
        let d = design_ic(&c, Some(0.1), None).unwrap();
        assert_eq!(d.tau, 4);
        // beta_{u_l} = (alpha - 1)(l - 1) = (l - 1)/3.
        let u_layers: Vec<&TxLayer> = d.tx_layers[0]
            .iter()
            .filter(|l| l.source == Source::U)
            .collect();
        for (i, l) in u_layers.iter().enumerate() {
            assert!((l.beta - i as f64 / 3.0).abs() < 1e-12);
        }
        assert!((d.lambdas[&Source::V1c] - (2.0 / 3.0 - 0.1)).abs() < 1e-12);
        assert!((d.lambdas[&Source::U] - (2.0 / 3.0 - 0.1)).abs() < 1e-12);
        assert!((d.claimed.dsum() - 4.0 / 3.0).abs() < 1e-12);
        assert!((d.claimed.dc - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn two_layer_chain_matches_displayed_form_at_alpha_0_6() {
        // x1's chain must read  sqrt(P^(a-1)) h12/h11 - sqrt(P^(2a-2)) h12h21/(h11h22).
        let c = cfg(0.6, 1e6, 19);
        let d = design_ic(&c, Some(0.05), None).unwrap();
        assert_eq!(d.tau, 2);
        let u: Vec<&TxLayer> = d.tx_layers[0].iter().filter(|l| l.source == Source::U).collect();
        assert_eq!(u.len(), 2);
        assert!((u[0].beta - (1.0 - 0.6)).abs() < 1e-12);
        assert!((u[0].coeff - c.h.h12 / c.h.h11).abs() < 1e-12);
        assert!((u[1].beta - 2.0 * (1.0 - 0.6)).abs() < 1e-12);
        assert!((u[1].coeff + c.h.h12 * c.h.h21 / (c.h.h11 * c.h.h22)).abs() < 1e-12);
    }

    #[test]
    fn alpha_geq_two_chain_matches_displayed_form() {
        // x1 = v1c + (1 - sqrt(P^(1-a)) h22/h21) u at alpha >= 2.
        let c = cfg(2.5, 1e6, 23);
        let d = design_ic(&c, Some(0.1), None).unwrap();
        assert_eq!(d.tau, 2);
        let u: Vec<&TxLayer> = d.tx_layers[0].iter().filter(|l| l.source == Source::U).collect();
        assert_eq!(u.len(), 2);
        assert!((u[0].coeff - 1.0).abs() < 1e-12 && u[0].beta.abs() < 1e-12);
        assert!((u[1].coeff + c.h.h22 / c.h.h21).abs() < 1e-12);
        assert!((u[1].beta - (2.5 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn neutralization_and_alignment_float_and_exact() {
        for (alpha, seed0) in [(0.6, 100), (0.8, 200), (1.0, 300), (4.0 / 3.0, 400), (2.5, 500)] {
            for s in 0..100u64 {
                let c = cfg(alpha, 1e6, seed0 + s);
                if alpha == 1.0 && c.h.det().abs() < 1e-9 {
                    continue;
                }
                let d = design_ic(&c, None, None).unwrap();
                let (r1, r2) = rx_decompose_ic(&d, &c);
                for r in [&r1, &r2] {
                    for def in r.pair_defects() {
                        assert!(def <= 1e-10, "alpha={alpha} seed={s} defect={def}");
                    }
                    assert!(r.alignment_defect() <= 1e-10);
                    assert!(r.exponent_defect() <= 1e-12);
                }
                let (e1, e2) = rx_decompose_ic_exact(&d, &c);
                for r in [&e1, &e2] {
                    for sum in r.pair_sums() {
                        assert!(sum.is_zero(), "exact pair sum nonzero at alpha={alpha}");
                    }
                    for g in &r.aligned {
                        for t in g.iter().skip(1) {
                            assert_eq!(t.coeff, g[0].coeff, "exact alignment at alpha={alpha}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn residual_exponents_are_nonpositive_scale() {
        // 2/3 <= alpha < 1: residual exponent (tau+1)alpha - tau <= 0;
        // alpha >= 2: residual exponent 2 - alpha <= 0.
        let c = cfg(0.8, 1e8, 42);
        let d = design_ic(&c, None, None).unwrap();
        let (r1, _) = rx_decompose_ic(&d, &c);
        for t in &r1.residual {
            assert!(t.exponent <= 1e-12);
        }
        let c = cfg(2.5, 1e8, 43);
        let d = design_ic(&c, None, None).unwrap();
        let (r1, _) = rx_decompose_ic(&d, &c);
        assert!((r1.residual[0].exponent - (2.0 - 2.5)).abs() < 1e-12);
    }

    #[test]
    fn power_constraint_exact_and_monte_carlo() {
        use rand::Rng;
        for (alpha, seed) in [(0.6, 1u64), (0.8, 2), (1.0, 3), (4.0 / 3.0, 4), (2.5, 5)] {
            let c = cfg(alpha, 1e6, seed);
            for gamma_scale in [1.0, 0.5, 0.1] {
                let d0 = design_ic(&c, None, None).unwrap();
                let d = design_ic(&c, None, Some(d0.gamma * gamma_scale)).unwrap();
                for tx in 1..=2 {
                    assert!(d.exact_power(tx) <= 1.0, "alpha={alpha} tx={tx}");
                }
                // Cross-check the closed form against sampling.
                let mut rng = crate::channel::stream_rng(77, 4, seed);
                let mut acc = [0.0f64; 2];
                let n = 20_000;
                for _ in 0..n {
                    let mut sym = BTreeMap::new();
                    for s in d.active_sources() {
                        let set = d.constellation(s).unwrap();
                        let q = set.halfwidth() as i64;
                        let idx = rng.gen_range(-q..=q);
                        sym.insert(s, set.value(idx));
                    }
                    let (x1, x2) = d.modulate(&sym).unwrap();
                    acc[0] += x1 * x1;
                    acc[1] += x2 * x2;
                }
                for tx in 1..=2usize {
                    let mc = acc[tx - 1] / n as f64;
                    let exact = d.exact_power(tx);
                    // 5 sigma of the sample mean of x^2 (bounded by max amp^4).
                    assert!(
                        (mc - exact).abs() <= 5.0 * (exact / (n as f64).sqrt()).max(1e-9),
                        "alpha={alpha} tx={tx} mc={mc} exact={exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn noiseless_receive_matches_decomposition() {
        use rand::Rng;
        for (alpha, seed) in [(0.6, 31u64), (0.8, 32), (1.0, 33), (4.0 / 3.0, 34), (2.5, 35)] {
            let c = cfg(alpha, 1e6, seed);
            let d = design_ic(&c, None, None).unwrap();
            let (r1, r2) = rx_decompose_ic(&d, &c);
            let mut rng = crate::channel::stream_rng(5, 6, seed);
            for _ in 0..50 {
                let mut sym = BTreeMap::new();
                for s in d.active_sources() {
                    let set = d.constellation(s).unwrap();
                    let q = set.halfwidth() as i64;
                    sym.insert(s, set.value(rng.gen_range(-q..=q)));
                }
                let (x1, x2) = d.modulate(&sym).unwrap();
                let (y1, y2) = crate::channel::receive(&c, x1, x2, 0.0, 0.0);
                let v1 = r1.evaluate(c.p, &sym);
                let v2 = r2.evaluate(c.p, &sym);
                assert!((y1 - v1).abs() <= 1e-12 * y1.abs().max(1.0), "alpha={alpha}");
                assert!((y2 - v2).abs() <= 1e-12 * y2.abs().max(1.0), "alpha={alpha}");
            }
        }
    }

    #[test]
    fn claimed_point_matches_closed_forms() {
        for alpha in [0.55, 0.6, 2.0 / 3.0, 0.8, 1.0, 1.2, 4.0 / 3.0, 2.0, 2.5, 3.0] {
            let c = cfg(alpha, 1e6, 77);
            if alpha == 1.0 && c.h.det().abs() < 1e-9 {
                continue;
            }
            let d = design_ic(&c, None, None).unwrap();
            assert!((d.claimed.dsum() - ic_sum_gdof(alpha).unwrap()).abs() < 1e-12);
            assert!((d.claimed.dc - ic_min_dc(alpha).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn seam_columns_agree() {
        // At alpha = 2/3 and alpha = 2 the adjacent columns build the same
        // layers, so either dispatch is valid.
        let c = cfg(2.0 / 3.0, 1e6, 88);
        let a = design_ic_in_regime(&c, IcRegime::HalfTwoThirds, Some(0.05), None).unwrap();
        let b = design_ic_in_regime(&c, IcRegime::TwoThirdsOne, Some(0.05), None).unwrap();
        assert_eq!(a.tau, b.tau);
        for tx in 0..2 {
            for (la, lb) in a.tx_layers[tx].iter().zip(b.tx_layers[tx].iter()) {
                assert!((la.coeff - lb.coeff).abs() < 1e-12 && (la.beta - lb.beta).abs() < 1e-12);
            }
        }
        let c = cfg(2.0, 1e6, 89);
        let a = design_ic_in_regime(&c, IcRegime::OneTwo, Some(0.05), None).unwrap();
        let b = design_ic_in_regime(&c, IcRegime::TwoPlus, Some(0.05), None).unwrap();
        for tx in 0..2 {
            for (la, lb) in a.tx_layers[tx].iter().zip(b.tx_layers[tx].iter()) {
                assert!((la.coeff - lb.coeff).abs() < 1e-12 && (la.beta - lb.beta).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eps_too_large_is_rejected() {
        let c = cfg(0.6, 1e6, 90);
        // lambda_c budget is 2 alpha - 1 = 0.2.
        assert!(matches!(
            design_ic(&c, Some(0.25), None),
            Err(Error::EpsTooLarge { .. })
        ));
    }

    #[test]
    fn layer_table_is_deterministic() {
        let c = cfg(4.0 / 3.0, 1e8, 7);
        let d = design_ic(&c, Some(0.1), None).unwrap();
        let a = d.layer_table();
        let b = design_ic(&c, Some(0.1), None).unwrap().layer_table();
        assert_eq!(a, b);
        assert!(a.contains("tau=4"));
        // Four chain layers per transmitter.
        assert_eq!(a.matches(",u,").count(), 8);
    }
}
