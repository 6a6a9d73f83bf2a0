//! Shared machinery for the per-setting transmit designs: layered signals,
//! receiver-side decompositions, and a small scalar abstraction that lets the
//! coefficient algebra run either in `f64` (simulation) or in exact rationals
//! (structure verification). The chained cancellation coefficients are
//! telescoping products, so float error compounds with the chain length; the
//! rational mode sidesteps that entirely.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;

use crate::channel::{ChannelConfig, HMatrix, Setting};
use crate::constellation::PamSet;
use crate::error::{Error, Result};
use crate::gdof::GdofPoint;

/// Scalar used by the coefficient algebra.
pub trait Coeff:
    Clone
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;
}

impl Coeff for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Coeff for BigRational {
    fn from_f64(x: f64) -> Self {
        // Every finite f64 is a dyadic rational, so this conversion is exact.
        BigRational::from_float(x).expect("finite input")
    }
    fn zero() -> Self {
        <BigRational as num_traits::Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as num_traits::One>::one()
    }
    fn is_zero(&self) -> bool {
        <BigRational as num_traits::Zero>::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// `x^n` by repeated multiplication (chain exponents stay small).
pub fn cpow<T: Coeff>(x: &T, n: u32) -> T {
    let mut acc = T::one();
    for _ in 0..n {
        acc = acc * x.clone();
    }
    acc
}

/// The coefficient matrix lifted into the chosen scalar type.
#[derive(Clone)]
pub struct Hm<T: Coeff> {
    pub h11: T,
    pub h12: T,
    pub h21: T,
    pub h22: T,
}

impl<T: Coeff> Hm<T> {
    pub fn from_matrix(h: &HMatrix) -> Self {
        Self {
            h11: T::from_f64(h.h11),
            h12: T::from_f64(h.h12),
            h21: T::from_f64(h.h21),
            h22: T::from_f64(h.h22),
        }
    }

    /// `h12 h21 / (h11 h22)`, the cross-to-direct product ratio that every
    /// cancellation chain telescopes over.
    pub fn cross_ratio(&self) -> T {
        self.h12.clone() * self.h21.clone() / (self.h11.clone() * self.h22.clone())
    }

    pub fn det(&self) -> T {
        self.h11.clone() * self.h22.clone() - self.h12.clone() * self.h21.clone()
    }

    /// Entry `h_{rx,tx}` with 1-based indices.
    pub fn entry(&self, rx: u8, tx: u8) -> T {
        match (rx, tx) {
            (1, 1) => self.h11.clone(),
            (1, 2) => self.h12.clone(),
            (2, 1) => self.h21.clone(),
            (2, 2) => self.h22.clone(),
            _ => unreachable!("indices are 1 or 2"),
        }
    }
}

/// Symbol sources appearing in the layered transmit signals.
///
/// `U` is the primary shared-randomness symbol (also the only one for the
/// two-transmitter settings); `U2` is the secondary stream used by the
/// multiple access design when the rate split calls for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    V1c,
    V1p,
    V2c,
    V2p,
    V2m,
    U,
    U2,
}

impl Source {
    pub fn label(&self, setting: Setting) -> &'static str {
        match self {
            Source::V1c => match setting {
                Setting::Wth => "vc",
                _ => "v1c",
            },
            Source::V1p => match setting {
                Setting::Wth => "vp",
                _ => "v1p",
            },
            Source::V2c => "v2c",
            Source::V2p => "v2p",
            Source::V2m => "v2m",
            Source::U => match setting {
                Setting::MacWt => "u1",
                _ => "u",
            },
            Source::U2 => "u2",
        }
    }

    /// Shared-randomness sources (jamming streams).
    pub fn is_jam(&self) -> bool {
        matches!(self, Source::U | Source::U2)
    }

    /// Message sources owned by transmitter 1 / transmitter 2.
    pub fn message_user(&self) -> Option<u8> {
        match self {
            Source::V1c | Source::V1p => Some(1),
            Source::V2c | Source::V2p | Source::V2m => Some(2),
            _ => None,
        }
    }
}

/// One layered component of a transmit signal:
/// `coeff * sqrt(P^-beta) * symbol(source)`, before the common regularizer.
#[derive(Debug, Clone)]
pub struct TxLayer {
    pub source: Source,
    pub coeff: f64,
    pub beta: f64,
}

/// One term of a receiver observation: `coeff * sqrt(P^exponent) * symbol`.
/// The coefficient includes the power regularizer and the channel gain.
#[derive(Debug, Clone)]
pub struct Term<T: Coeff> {
    pub source: Source,
    pub coeff: T,
    pub exponent: f64,
}

impl<T: Coeff> Term<T> {
    pub fn amplitude_scale(&self, p: f64) -> f64 {
        self.coeff.to_f64().abs() * p.powf(self.exponent / 2.0)
    }
}

/// Receiver-side grouping of an observation into structural roles.
#[derive(Debug, Clone)]
pub struct RxDecomposition<T: Coeff> {
    pub receiver: u8,
    /// Layers the receiver must decode.
    pub desired: Vec<Term<T>>,
    /// Groups in which a jamming term arrives with exactly the coefficient
    /// and power of a message term, so only their sum is observable. The
    /// first entry of a group is the message term.
    pub aligned: Vec<Vec<Term<T>>>,
    /// Pairs whose coefficients cancel exactly; both members share one power
    /// exponent.
    pub neutralized_pairs: Vec<(Term<T>, Term<T>)>,
    /// Leftover terms with amplitude bounded independently of P.
    pub residual: Vec<Term<T>>,
}

impl<T: Coeff> RxDecomposition<T> {
    /// Exact coefficient sum of each cancellation pair.
    pub fn pair_sums(&self) -> Vec<T> {
        self.neutralized_pairs
            .iter()
            .map(|(a, b)| a.coeff.clone() + b.coeff.clone())
            .collect()
    }

    /// Relative defect `|ca + cb| / max(|ca|, |cb|)` of each pair.
    pub fn pair_defects(&self) -> Vec<f64> {
        self.neutralized_pairs
            .iter()
            .map(|(a, b)| {
                let ca = a.coeff.to_f64();
                let cb = b.coeff.to_f64();
                (ca + cb).abs() / ca.abs().max(cb.abs()).max(f64::MIN_POSITIVE)
            })
            .collect()
    }

    /// Worst relative mismatch between aligned coefficients, and the worst
    /// exponent mismatch inside aligned groups and cancellation pairs.
    pub fn alignment_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for group in &self.aligned {
            let reference = group[0].coeff.to_f64();
            for t in group.iter().skip(1) {
                let c = t.coeff.to_f64();
                worst = worst.max((c - reference).abs() / reference.abs().max(f64::MIN_POSITIVE));
            }
        }
        worst
    }

    pub fn exponent_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for group in &self.aligned {
            for t in group.iter().skip(1) {
                worst = worst.max((t.exponent - group[0].exponent).abs());
            }
        }
        for (a, b) in &self.neutralized_pairs {
            worst = worst.max((a.exponent - b.exponent).abs());
        }
        worst
    }

    /// Worst-case residual amplitude given the symbol bounds.
    pub fn residual_amplitude(&self, p: f64, max_amp: &dyn Fn(Source) -> f64) -> f64 {
        self.residual
            .iter()
            .map(|t| t.amplitude_scale(p) * max_amp(t.source))
            .sum()
    }

    /// Evaluate the grouped observation on concrete symbols (noiseless).
    pub fn evaluate(&self, p: f64, symbols: &BTreeMap<Source, f64>) -> f64 {
        let term = |t: &Term<T>| {
            t.coeff.to_f64() * p.powf(t.exponent / 2.0) * symbols.get(&t.source).copied().unwrap_or(0.0)
        };
        let mut y = 0.0;
        for t in &self.desired {
            y += term(t);
        }
        for g in &self.aligned {
            for t in g {
                y += term(t);
            }
        }
        for (a, b) in &self.neutralized_pairs {
            y += term(a) + term(b);
        }
        for t in &self.residual {
            y += term(t);
        }
        y
    }
}

/// Design-table regimes, named by the alpha interval they cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IcRegime {
    /// 1/2 < alpha <= 2/3
    HalfTwoThirds,
    /// 2/3 <= alpha < 1
    TwoThirdsOne,
    /// alpha = 1
    One,
    /// 1 < alpha <= 2
    OneTwo,
    /// alpha >= 2
    TwoPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WthRegime {
    /// 1/2 < alpha < 1
    BelowOne,
    /// alpha = 1
    One,
    /// alpha > 1
    AboveOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacRegime {
    /// alpha <= 2/3, B <= (2 alpha - 1)^+
    LowAlphaSmallB,
    /// alpha <= 2/3, (2 alpha - 1)^+ < B <= alpha
    LowAlphaLargeB,
    /// 2/3 < alpha < 1, B <= 2 alpha - 1
    MidAlphaSmallB,
    /// 2/3 < alpha < 1, 2 alpha - 1 < B <= alpha
    MidAlphaLargeB,
    /// alpha = 1, parameterized by a target pair
    AlphaOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Ic(IcRegime),
    Wth(WthRegime),
    Mac(MacRegime),
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::Ic(IcRegime::HalfTwoThirds) => "ic:1/2-2/3",
            Regime::Ic(IcRegime::TwoThirdsOne) => "ic:2/3-1",
            Regime::Ic(IcRegime::One) => "ic:1",
            Regime::Ic(IcRegime::OneTwo) => "ic:1-2",
            Regime::Ic(IcRegime::TwoPlus) => "ic:2+",
            Regime::Wth(WthRegime::BelowOne) => "wth:1/2-1",
            Regime::Wth(WthRegime::One) => "wth:1",
            Regime::Wth(WthRegime::AboveOne) => "wth:1+",
            Regime::Mac(MacRegime::LowAlphaSmallB) => "mac:low-a-small-b",
            Regime::Mac(MacRegime::LowAlphaLargeB) => "mac:low-a-large-b",
            Regime::Mac(MacRegime::MidAlphaSmallB) => "mac:mid-a-small-b",
            Regime::Mac(MacRegime::MidAlphaLargeB) => "mac:mid-a-large-b",
            Regime::Mac(MacRegime::AlphaOne) => "mac:1",
        }
    }
}

/// Complete per-regime transmit recipe.
#[derive(Debug, Clone)]
pub struct SchemeDesign {
    pub setting: Setting,
    pub regime: Regime,
    pub alpha: f64,
    pub p: f64,
    pub tau: u32,
    pub gamma: f64,
    /// Power regularizer: 1 off the alpha = 1 seam, det(h)/8 on it.
    pub eps_reg: f64,
    /// GDoF back-off applied to the rate exponents.
    pub eps: f64,
    /// Constellation per active source.
    pub constellations: BTreeMap<Source, PamSet>,
    /// Rate exponent (after back-off) per active source.
    pub lambdas: BTreeMap<Source, f64>,
    /// Layered components of x1 and x2 (regularizer excluded).
    pub tx_layers: [Vec<TxLayer>; 2],
    /// Ideal (back-off -> 0) operating point the design is built for.
    pub claimed: GdofPoint,
    /// Back-off multiples lost by each claimed component at finite eps.
    pub eps_deficit: GdofPoint,
    /// Rate-split knob of the multiple access design, when applicable.
    pub b: Option<f64>,
    /// Target pair of the multiple access design at alpha = 1.
    pub target_pair: Option<(f64, f64)>,
    /// Step-ratio regularizers (eta1, eta2) of the multiple access design.
    pub eta: Option<(f64, f64)>,
}

impl SchemeDesign {
    pub fn constellation(&self, s: Source) -> Option<&PamSet> {
        self.constellations.get(&s)
    }

    pub fn has_source(&self, s: Source) -> bool {
        self.constellations.contains_key(&s)
    }

    pub fn active_sources(&self) -> impl Iterator<Item = Source> + '_ {
        self.constellations.keys().copied()
    }

    pub fn message_sources(&self, user: u8) -> Vec<Source> {
        self.active_sources()
            .filter(|s| s.message_user() == Some(user))
            .collect()
    }

    pub fn max_amplitude(&self, s: Source) -> f64 {
        self.constellations
            .get(&s)
            .map(|c| c.max_amplitude())
            .unwrap_or(0.0)
    }

    /// Net amplitude multiplying `source` in `x_k` (regularizer included):
    /// sum over its layers of `coeff * sqrt(P^-beta)`.
    pub fn net_tx_coeff(&self, tx: usize, source: Source) -> f64 {
        self.eps_reg
            * self.tx_layers[tx - 1]
                .iter()
                .filter(|l| l.source == source)
                .map(|l| l.coeff * self.p.powf(-l.beta / 2.0))
                .sum::<f64>()
    }

    /// Channel inputs for one symbol draw. Every supplied symbol must be a
    /// point of its constellation.
    pub fn modulate(&self, symbols: &BTreeMap<Source, f64>) -> Result<(f64, f64)> {
        for (&s, &v) in symbols {
            if let Some(set) = self.constellations.get(&s) {
                if set.index_of(v).is_none() {
                    return Err(Error::SymbolOutsideSet {
                        layer: s.label(self.setting).into(),
                        value: v,
                    });
                }
            }
        }
        let mut x = [0.0f64; 2];
        for (k, x_k) in x.iter_mut().enumerate() {
            for layer in &self.tx_layers[k] {
                let sym = symbols.get(&layer.source).copied().unwrap_or(0.0);
                *x_k += layer.coeff * self.p.powf(-layer.beta / 2.0) * sym;
            }
            *x_k *= self.eps_reg;
        }
        Ok((x[0], x[1]))
    }

    /// Exact transmit power `E|x_k|^2` under independent uniform symbols.
    pub fn exact_power(&self, tx: usize) -> f64 {
        self.active_sources()
            .map(|s| {
                let c = self.net_tx_coeff(tx, s);
                let m = self
                    .constellations
                    .get(&s)
                    .map(|set| set.second_moment())
                    .unwrap_or(0.0);
                c * c * m
            })
            .sum()
    }

    /// Copy of the design with every shared-randomness layer removed; the
    /// negative control for leakage experiments.
    pub fn without_common_randomness(&self) -> SchemeDesign {
        let mut d = self.clone();
        for layers in d.tx_layers.iter_mut() {
            layers.retain(|l| !l.source.is_jam());
        }
        d.constellations.retain(|s, _| !s.is_jam());
        d.lambdas.retain(|s, _| !s.is_jam());
        d
    }

    /// Deterministic, human-readable layer table for golden-file tests.
    pub fn layer_table(&self) -> String {
        let mut out = String::new();
        let _ = write!(
            out,
            "setting={} regime={} alpha={} p={} tau={} gamma={} eps={} eps_reg={}",
            self.setting.label(),
            self.regime.label(),
            fmt(self.alpha),
            fmt(self.p),
            self.tau,
            fmt(self.gamma),
            fmt(self.eps),
            fmt(self.eps_reg),
        );
        if let Some(b) = self.b {
            let _ = write!(out, " b={}", fmt(b));
        }
        if let Some((d1, d2)) = self.target_pair {
            let _ = write!(out, " d1={} d2={}", fmt(d1), fmt(d2));
        }
        if let Some((e1, e2)) = self.eta {
            let _ = write!(out, " eta1={e1:.17e} eta2={e2:.17e}");
        }
        out.push('\n');
        out.push_str("tx,source,coeff,beta\n");
        for (k, layers) in self.tx_layers.iter().enumerate() {
            for l in layers {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    k + 1,
                    l.source.label(self.setting),
                    fmt(l.coeff),
                    fmt(l.beta)
                );
            }
        }
        out.push_str("source,step,halfwidth,lambda\n");
        for (s, set) in &self.constellations {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                s.label(self.setting),
                fmt(set.step()),
                set.halfwidth(),
                fmt(self.lambdas[s])
            );
        }
        let _ = writeln!(
            out,
            "claimed,d1={},d2={},dc={}",
            fmt(self.claimed.d1),
            fmt(self.claimed.d2),
            fmt(self.claimed.dc)
        );
        out
    }
}

/// 12 significant digits; the deterministic float format used by all exported
/// tables and CSV files.
pub fn fmt(x: f64) -> String {
    format!("{x:.11e}")
}

/// Ceiling with an absolute guard against float dust: ratios like
/// `0.8 / (1 - 0.8)` land at `4.000000000000001` and must still count as 4.
pub fn ceil_tol(x: f64) -> f64 {
    (x - 1e-9).ceil()
}

/// Longest cancellation chain the double-precision coefficient algebra can
/// carry: the chain amplitudes reach `2^tau` and the amplitude cap shrinks
/// like `1/(tau 2^tau)`, so alphas too close to 1 are rejected rather than
/// silently overflowed.
pub const MAX_CHAIN_LEN: u32 = 64;

pub fn check_chain_len(alpha: f64, tau: u32) -> crate::error::Result<u32> {
    if tau > MAX_CHAIN_LEN {
        return Err(crate::error::Error::UnsupportedRegime {
            alpha,
            reason: format!(
                "cancellation chain of length {tau} exceeds double-precision headroom                  (cap {MAX_CHAIN_LEN}); alpha sits too close to 1"
            ),
        });
    }
    Ok(tau)
}

/// Power regularizer: 1 off the alpha = 1 seam, `det(h)/8` on it.
pub fn power_regularizer(cfg: &ChannelConfig) -> Result<f64> {
    if cfg.alpha == 1.0 {
        let det = cfg.h.det();
        if det.abs() < 1e-13 {
            return Err(Error::DegenerateChannel);
        }
        Ok(det / 8.0)
    } else {
        Ok(1.0)
    }
}

/// Default back-off: at most 0.1, and no more than half the smallest
/// per-back-off-unit budget among active layers, so every realized rate
/// exponent stays positive.
pub fn default_eps(budgets: &[(f64, f64)]) -> f64 {
    let mut eps: f64 = 0.1;
    for &(budget, mult) in budgets {
        if budget > 0.0 && mult > 0.0 {
            eps = eps.min(budget / (2.0 * mult));
        }
    }
    eps
}

/// Validate a realized rate exponent; `budget - mult * eps` must stay
/// positive for a layer that exists.
pub fn check_lambda(layer: &str, eps: f64, lambda: f64) -> Result<f64> {
    if lambda <= 0.0 {
        return Err(Error::EpsTooLarge {
            eps,
            layer: layer.into(),
            lambda,
        });
    }
    Ok(lambda)
}
