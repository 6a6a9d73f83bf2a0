use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("alpha must be nonnegative, got {0}")]
    NegativeAlpha(f64),

    #[error("alpha = {alpha} unsupported: {reason}")]
    UnsupportedRegime { alpha: f64, reason: String },

    #[error("epsilon = {eps} too large: layer {layer} would get rate exponent {lambda} <= 0")]
    EpsTooLarge { eps: f64, layer: String, lambda: f64 },

    #[error("gamma = {gamma} outside (0, {bound}]")]
    GammaOutOfRange { gamma: f64, bound: f64 },

    #[error("B = {b} outside [{lo}, {hi}]")]
    BOutOfRange { b: f64, lo: f64, hi: f64 },

    #[error("GDoF pair ({d1}, {d2}) lies outside the region at alpha = {alpha}")]
    PointOutsideRegion { alpha: f64, d1: f64, d2: f64 },

    #[error("degenerate channel: h11*h22 - h12*h21 is zero")]
    DegenerateChannel,

    #[error("invalid channel parameter: {0}")]
    InvalidChannel(String),

    #[error("invalid constellation: {0}")]
    InvalidConstellation(String),

    #[error("symbol {value} is not a point of the constellation for {layer}")]
    SymbolOutsideSet { layer: String, value: f64 },

    #[error("coefficient must be positive, got {0}")]
    NonpositiveCoeff(f64),

    #[error("decoding step {step} uncertifiable: interference bound {bound} >= half spacing {half_spacing}")]
    Uncertifiable { step: usize, bound: f64, half_spacing: f64 },

    #[error("joint search space of {size} points exceeds cap {cap}")]
    SearchSpaceExceeded { size: u128, cap: u128 },

    #[error("joint decode supports 2 or 3 terms, got {0}")]
    BadTermCount(usize),

    #[error("trial/draw count must be positive")]
    NoTrials,

    #[error("unknown outage-bound id {0} (expected ic2, mac2, mac3, or mac1)")]
    UnknownBoundId(String),
}
