//! Transmit designs for the wiretap channel with a helper.
//!
//! Transmitter 1 carries the only message; transmitter 2 sends nothing but
//! jamming layers built from the shared randomness. The helper's first chain
//! element arrives at the eavesdropper with exactly the coefficient and power
//! of the message layer; the two transmitters then alternate cancelling each
//! other's images at the legitimate receiver and the eavesdropper until the
//! leftover drops to the noise floor.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::channel::{ChannelConfig, Setting};
use crate::constellation::{halfwidth_from_lambda, PamSet};
use crate::design::{
    check_lambda, cpow, default_eps, power_regularizer, Coeff, Hm, Regime, RxDecomposition,
    SchemeDesign, Source, Term, TxLayer, WthRegime,
};
use crate::error::{Error, Result};
use crate::gdof::{wth_gdof, wth_min_dc, GdofPoint};

pub fn regime_for(alpha: f64) -> Result<WthRegime> {
    if alpha <= 0.5 {
        return Err(Error::UnsupportedRegime {
            alpha,
            reason: "for alpha <= 1/2 the optimum needs no shared randomness; \
                     this laboratory only builds the jamming designs"
                .into(),
        });
    }
    Ok(if alpha < 1.0 {
        WthRegime::BelowOne
    } else if alpha == 1.0 {
        WthRegime::One
    } else {
        WthRegime::AboveOne
    })
}

/// Chain length: `ceil(1/(2(1-alpha)))` below 1, `ceil(1/(2(alpha-1)))`
/// above 1, and 1 on the seam.
pub fn chain_len(alpha: f64) -> u32 {
    if alpha < 1.0 {
        crate::design::ceil_tol(1.0 / (2.0 * (1.0 - alpha))) as u32
    } else if alpha > 1.0 {
        crate::design::ceil_tol(1.0 / (2.0 * (alpha - 1.0))) as u32
    } else {
        1
    }
}

/// Helper designs cap the chain amplitude harder than the interference
/// designs: gamma <= 1/((tau + 2) 4^tau).
pub fn default_gamma(tau: u32) -> f64 {
    1.0 / ((tau as f64 + 2.0) * 4f64.powi(tau as i32))
}

/// Message-side chain elements. Below 1 the element index runs 1..tau-1; above
/// 1 it runs 0..tau with the plain `u` term at index 0.
fn delta1<T: Coeff>(regime: WthRegime, h: &Hm<T>, ell: u32) -> T {
    match regime {
        WthRegime::BelowOne => -cpow(&h.cross_ratio(), ell),
        WthRegime::AboveOne => cpow(&(T::one() / h.cross_ratio()), ell),
        WthRegime::One => -(h.h12.clone() * h.h21.clone()) / h.det(),
    }
}

/// Helper-side chain elements, index 1..tau.
fn delta2<T: Coeff>(regime: WthRegime, h: &Hm<T>, ell: u32) -> T {
    match regime {
        WthRegime::BelowOne => {
            h.h21.clone() / h.h22.clone() * cpow(&h.cross_ratio(), ell - 1)
        }
        WthRegime::AboveOne => {
            -(h.h11.clone() / h.h12.clone() * cpow(&(T::one() / h.cross_ratio()), ell - 1))
        }
        WthRegime::One => (h.h11.clone() * h.h21.clone()) / h.det(),
    }
}

fn beta_u(regime: WthRegime, alpha: f64, ell: u32) -> f64 {
    match regime {
        WthRegime::BelowOne => 2.0 * ell as f64 * (1.0 - alpha),
        WthRegime::One => 0.0,
        WthRegime::AboveOne => 2.0 * ell as f64 * (alpha - 1.0),
    }
}

fn beta_u_helper(regime: WthRegime, alpha: f64, ell: u32) -> f64 {
    match regime {
        WthRegime::BelowOne => (2.0 * ell as f64 - 1.0) * (1.0 - alpha),
        WthRegime::One => 0.0,
        WthRegime::AboveOne => (2.0 * ell as f64 - 1.0) * (alpha - 1.0),
    }
}

/// Build the helper design for `cfg`.
pub fn design_wth(cfg: &ChannelConfig, eps: Option<f64>, gamma: Option<f64>) -> Result<SchemeDesign> {
    let alpha = cfg.alpha;
    let regime = regime_for(alpha)?;
    let tau = crate::design::check_chain_len(alpha, chain_len(alpha))?;
    let gbound = default_gamma(tau);
    let gamma = gamma.unwrap_or(gbound);
    if !(gamma > 0.0 && gamma <= gbound) {
        return Err(Error::GammaOutOfRange { gamma, bound: gbound });
    }

    let (lambda_c_budget, lambda_p_budget) = match regime {
        WthRegime::BelowOne => (alpha, 1.0 - alpha),
        _ => (1.0, 0.0),
    };
    let eps = eps.unwrap_or_else(|| default_eps(&[(lambda_c_budget, 1.0), (lambda_p_budget, 1.0)]));
    let lambda_c = check_lambda("v_c", eps, lambda_c_budget - eps)?;
    let lambda_p = if lambda_p_budget > 0.0 {
        Some(check_lambda("v_p", eps, lambda_p_budget - eps)?)
    } else {
        None
    };

    let qc = halfwidth_from_lambda(cfg.p, lambda_c);
    let set_c = PamSet::new(gamma / qc as f64, qc)?;
    let mut constellations = BTreeMap::new();
    let mut lambdas = BTreeMap::new();
    constellations.insert(Source::V1c, set_c);
    constellations.insert(Source::U, set_c);
    lambdas.insert(Source::V1c, lambda_c);
    lambdas.insert(Source::U, lambda_c);
    if let Some(lp) = lambda_p {
        let qp = halfwidth_from_lambda(cfg.p, lp);
        constellations.insert(Source::V1p, PamSet::new(gamma / (2.0 * qp as f64), qp)?);
        lambdas.insert(Source::V1p, lp);
    }

    let hm = Hm::<f64>::from_matrix(&cfg.h);
    let eps_reg = power_regularizer(cfg)?;

    // Transmitter 1: message layers plus its half of the chain.
    let mut tx1 = vec![TxLayer { source: Source::V1c, coeff: 1.0, beta: 0.0 }];
    if lambda_p.is_some() {
        tx1.push(TxLayer { source: Source::V1p, coeff: 1.0, beta: alpha });
    }
    match regime {
        WthRegime::BelowOne => {
            for ell in 1..tau {
                tx1.push(TxLayer {
                    source: Source::U,
                    coeff: delta1(regime, &hm, ell),
                    beta: beta_u(regime, alpha, ell),
                });
            }
        }
        WthRegime::One => {
            tx1.push(TxLayer { source: Source::U, coeff: delta1(regime, &hm, 1), beta: 0.0 });
        }
        WthRegime::AboveOne => {
            for ell in 0..=tau {
                tx1.push(TxLayer {
                    source: Source::U,
                    coeff: delta1(regime, &hm, ell),
                    beta: beta_u(regime, alpha, ell),
                });
            }
        }
    }
    // Transmitter 2 (helper): jamming only, no message sources at all.
    let mut tx2 = Vec::new();
    for ell in 1..=tau {
        tx2.push(TxLayer {
            source: Source::U,
            coeff: delta2(regime, &hm, ell),
            beta: beta_u_helper(regime, alpha, ell),
        });
    }

    Ok(SchemeDesign {
        setting: Setting::Wth,
        regime: Regime::Wth(regime),
        alpha,
        p: cfg.p,
        tau,
        gamma,
        eps_reg,
        eps,
        constellations,
        lambdas,
        tx_layers: [tx1, tx2],
        claimed: GdofPoint::new(wth_gdof(alpha)?, 0.0, wth_min_dc(alpha)?),
        eps_deficit: GdofPoint::new(
            if lambda_p.is_some() { 2.0 } else { 1.0 },
            0.0,
            1.0,
        ),
        b: None,
        target_pair: None,
        eta: None,
    })
}

/// Receiver-side structural grouping; receiver 1 is the legitimate receiver,
/// receiver 2 the eavesdropper.
pub fn decompose<T: Coeff>(design: &SchemeDesign, cfg: &ChannelConfig) -> [RxDecomposition<T>; 2] {
    let Regime::Wth(regime) = design.regime else {
        panic!("not a helper design");
    };
    let h = Hm::<T>::from_matrix(&cfg.h);
    let alpha = design.alpha;
    let tau = design.tau;
    let ereg = T::from_f64(design.eps_reg);
    let d1 = |ell: u32| ereg.clone() * delta1::<T>(regime, &h, ell);
    let d2 = |ell: u32| ereg.clone() * delta2::<T>(regime, &h, ell);
    let has_private = design.has_source(Source::V1p);

    let mut desired1 = vec![Term {
        source: Source::V1c,
        coeff: ereg.clone() * h.h11.clone(),
        exponent: 1.0,
    }];
    if has_private {
        desired1.push(Term {
            source: Source::V1p,
            coeff: ereg.clone() * h.h11.clone(),
            exponent: 1.0 - alpha,
        });
    }
    let mut pairs1 = Vec::new();
    let mut residual1 = Vec::new();
    let mut aligned2 = vec![vec![
        Term { source: Source::V1c, coeff: ereg.clone() * h.h21.clone(), exponent: alpha },
    ]];
    let mut pairs2 = Vec::new();
    let mut residual2 = Vec::new();

    match regime {
        WthRegime::BelowOne => {
            for ell in 1..tau {
                pairs1.push((
                    Term {
                        source: Source::U,
                        coeff: d1(ell) * h.h11.clone(),
                        exponent: 1.0 - beta_u(regime, alpha, ell),
                    },
                    Term {
                        source: Source::U,
                        coeff: d2(ell) * h.h12.clone(),
                        exponent: alpha - beta_u_helper(regime, alpha, ell),
                    },
                ));
            }
            residual1.push(Term {
                source: Source::U,
                coeff: d2(tau) * h.h12.clone(),
                exponent: 2.0 * tau as f64 * alpha + 1.0 - 2.0 * tau as f64,
            });
            aligned2[0].push(Term {
                source: Source::U,
                coeff: d2(1) * h.h22.clone(),
                exponent: 1.0 - beta_u_helper(regime, alpha, 1),
            });
            for ell in 1..tau {
                pairs2.push((
                    Term {
                        source: Source::U,
                        coeff: d1(ell) * h.h21.clone(),
                        exponent: alpha - beta_u(regime, alpha, ell),
                    },
                    Term {
                        source: Source::U,
                        coeff: d2(ell + 1) * h.h22.clone(),
                        exponent: 1.0 - beta_u_helper(regime, alpha, ell + 1),
                    },
                ));
            }
            if has_private {
                residual2.push(Term {
                    source: Source::V1p,
                    coeff: ereg.clone() * h.h21.clone(),
                    exponent: 0.0,
                });
            }
        }
        WthRegime::One => {
            // tau = 1: one cancellation pair at the legitimate receiver, one
            // aligned jam at the eavesdropper, nothing left over.
            pairs1.push((
                Term { source: Source::U, coeff: d1(1) * h.h11.clone(), exponent: 1.0 },
                Term { source: Source::U, coeff: d2(1) * h.h12.clone(), exponent: 1.0 },
            ));
            aligned2[0].push(Term {
                source: Source::U,
                coeff: d1(1) * h.h21.clone() + d2(1) * h.h22.clone(),
                exponent: 1.0,
            });
        }
        WthRegime::AboveOne => {
            for ell in 0..tau {
                pairs1.push((
                    Term {
                        source: Source::U,
                        coeff: d1(ell) * h.h11.clone(),
                        exponent: 1.0 - beta_u(regime, alpha, ell),
                    },
                    Term {
                        source: Source::U,
                        coeff: d2(ell + 1) * h.h12.clone(),
                        exponent: alpha - beta_u_helper(regime, alpha, ell + 1),
                    },
                ));
            }
            residual1.push(Term {
                source: Source::U,
                coeff: d1(tau) * h.h11.clone(),
                exponent: -2.0 * tau as f64 * alpha + 2.0 * tau as f64 + 1.0,
            });
            aligned2[0].push(Term {
                source: Source::U,
                coeff: d1(0) * h.h21.clone(),
                exponent: alpha,
            });
            for ell in 1..=tau {
                pairs2.push((
                    Term {
                        source: Source::U,
                        coeff: d1(ell) * h.h21.clone(),
                        exponent: alpha - beta_u(regime, alpha, ell),
                    },
                    Term {
                        source: Source::U,
                        coeff: d2(ell) * h.h22.clone(),
                        exponent: 1.0 - beta_u_helper(regime, alpha, ell),
                    },
                ));
            }
        }
    }

    [
        RxDecomposition {
            receiver: 1,
            desired: desired1,
            aligned: Vec::new(),
            neutralized_pairs: pairs1,
            residual: residual1,
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

pub fn rx_decompose_wth(
    design: &SchemeDesign,
    cfg: &ChannelConfig,
) -> (RxDecomposition<f64>, RxDecomposition<f64>) {
    let [a, b] = decompose::<f64>(design, cfg);
    (a, b)
}

pub fn rx_decompose_wth_exact(
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
        ChannelConfig::new(p, alpha, sample_h(seed), Setting::Wth).unwrap()
    }

    #[test]
    fn chain_lengths_and_gamma_bound() {
        assert_eq!(chain_len(0.75), 2);
        assert_eq!(chain_len(2.0), 1);
        assert_eq!(chain_len(1.1), 5);
        assert!((default_gamma(2) - 1.0 / 64.0).abs() < 1e-18);
    }

    #[test]
    fn helper_carries_no_message() {
        let c = cfg(0.75, 1e6, 1);
        let d = design_wth(&c, None, None).unwrap();
        assert!(d.tx_layers[1].iter().all(|l| l.source == Source::U));
        assert!(d.message_sources(2).is_empty());
    }

    #[test]
    fn helper_exponents_below_one() {
        let c = cfg(0.75, 1e6, 2);
        let d = design_wth(&c, None, None).unwrap();
        assert_eq!(d.tau, 2);
        let u2: Vec<&TxLayer> = d.tx_layers[1].iter().collect();
        for (i, l) in u2.iter().enumerate() {
            let ell = i as f64 + 1.0;
            assert!((l.beta - (2.0 * ell - 1.0) * (1.0 - 0.75)).abs() < 1e-12);
        }
    }

    #[test]
    fn alpha_two_deltas() {
        let h = HMatrix::new(1.7, 1.3, 1.9, 1.2).unwrap();
        let c = ChannelConfig::new(1e6, 2.0, h, Setting::Wth).unwrap();
        let d = design_wth(&c, Some(0.1), None).unwrap();
        assert_eq!(d.tau, 1);
        let u1: Vec<&TxLayer> = d.tx_layers[0].iter().filter(|l| l.source == Source::U).collect();
        assert!((u1[0].coeff - 1.0).abs() < 1e-12 && u1[0].beta.abs() < 1e-12);
        let u2 = &d.tx_layers[1][0];
        assert!((u2.coeff + h.h11 / h.h12).abs() < 1e-12);
    }

    #[test]
    fn alpha_one_deltas() {
        let h = HMatrix::new(1.8, 1.2, 1.4, 1.6).unwrap();
        let c = ChannelConfig::new(1e6, 1.0, h, Setting::Wth).unwrap();
        let d = design_wth(&c, Some(0.1), None).unwrap();
        let det = h.det();
        let u1: Vec<&TxLayer> = d.tx_layers[0].iter().filter(|l| l.source == Source::U).collect();
        assert!((u1[0].coeff + h.h12 * h.h21 / det).abs() < 1e-12);
        assert!((d.tx_layers[1][0].coeff - h.h11 * h.h21 / det).abs() < 1e-12);
    }

    #[test]
    fn neutralization_alignment_power_all_regimes() {
        use rand::Rng;
        for (alpha, seed0) in [(0.75, 1000u64), (1.0, 2000), (1.6, 3000), (1.1, 4000)] {
            for s in 0..100u64 {
                let c = cfg(alpha, 1e6, seed0 + s);
                if alpha == 1.0 && c.h.det().abs() < 1e-9 {
                    continue;
                }
                let d = design_wth(&c, None, None).unwrap();
                let (r1, r2) = rx_decompose_wth(&d, &c);
                for r in [&r1, &r2] {
                    for def in r.pair_defects() {
                        assert!(def <= 1e-10, "alpha={alpha} defect={def}");
                    }
                    assert!(r.alignment_defect() <= 1e-10);
                    assert!(r.exponent_defect() <= 1e-12);
                }
                let (e1, e2) = rx_decompose_wth_exact(&d, &c);
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
                    assert!(d.exact_power(tx) <= 1.0);
                }
                // Noiseless receive matches the grouped reconstruction.
                let mut rng = crate::channel::stream_rng(9, 2, seed0 + s);
                let mut sym = BTreeMap::new();
                for src in d.active_sources() {
                    let set = d.constellation(src).unwrap();
                    let q = set.halfwidth() as i64;
                    sym.insert(src, set.value(rng.gen_range(-q..=q)));
                }
                let (x1, x2) = d.modulate(&sym).unwrap();
                let (y1, y2) = crate::channel::receive(&c, x1, x2, 0.0, 0.0);
                assert!((y1 - r1.evaluate(c.p, &sym)).abs() <= 1e-12 * y1.abs().max(1.0));
                assert!((y2 - r2.evaluate(c.p, &sym)).abs() <= 1e-12 * y2.abs().max(1.0));
            }
        }
    }

    #[test]
    fn residual_amplitude_bound_above_one() {
        // |residual at rx1| <= 4^tau * 2 * gamma <= (4 alpha - 4)/(4 alpha - 3).
        for (alpha, seed) in [(1.2f64, 50u64), (1.6, 51), (2.0, 52), (3.0, 53)] {
            let c = cfg(alpha, 1e8, seed);
            let d = design_wth(&c, None, None).unwrap();
            let (r1, _) = rx_decompose_wth(&d, &c);
            let amp = r1.residual_amplitude(c.p, &|s| d.max_amplitude(s));
            let cap = (4.0 * alpha - 4.0) / (4.0 * alpha - 3.0);
            assert!(amp <= cap + 1e-12, "alpha={alpha} amp={amp} cap={cap}");
            assert!(r1.residual[0].exponent <= 1e-12);
        }
    }

    #[test]
    fn residual_exponent_zero_at_three_quarters() {
        let c = cfg(0.75, 1e8, 60);
        let d = design_wth(&c, None, None).unwrap();
        let (r1, _) = rx_decompose_wth(&d, &c);
        // 2 tau alpha + 1 - 2 tau = 0 at alpha = 3/4, tau = 2.
        assert!(r1.residual[0].exponent.abs() < 1e-12);
    }

    #[test]
    fn eavesdropper_view_at_alpha_one_is_fully_masked() {
        let c = cfg(1.0, 1e6, 70);
        if c.h.det().abs() < 1e-9 {
            return;
        }
        let d = design_wth(&c, None, None).unwrap();
        let (r1, r2) = rx_decompose_wth(&d, &c);
        assert!(r1.residual.is_empty() && r2.residual.is_empty());
        assert_eq!(r2.aligned[0].len(), 2);
    }

    #[test]
    fn claimed_matches_closed_forms() {
        for alpha in [0.6, 0.75, 1.0, 1.3, 2.0] {
            let c = cfg(alpha, 1e6, 80);
            if alpha == 1.0 && c.h.det().abs() < 1e-9 {
                continue;
            }
            let d = design_wth(&c, None, None).unwrap();
            assert!((d.claimed.d1 - 1.0).abs() < 1e-15);
            assert!((d.claimed.dc - wth_min_dc(alpha).unwrap()).abs() < 1e-15);
        }
    }
}
