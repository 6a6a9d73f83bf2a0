//! Structural verification of a transmit design against its channel: every
//! cancellation pair must vanish, every aligned stack must share one
//! coefficient, and the exact transmit power must respect the unit budget.
//! Floating point gives the engineering view; the rational mode settles the
//! identities exactly.

use num_rational::BigRational;

use crate::channel::{ChannelConfig, Setting};
use crate::design::{Coeff, RxDecomposition, SchemeDesign};
use crate::error::Result;
use crate::{scheme_ic, scheme_macwt, scheme_wth};

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub pairs_checked: usize,
    pub worst_pair_defect: f64,
    pub worst_alignment_defect: f64,
    pub worst_exponent_defect: f64,
    pub exact_pairs_zero: bool,
    pub exact_aligned_equal: bool,
    pub power: [f64; 2],
    /// Worst-case treated-as-noise amplitude seen by each receiver.
    pub residual_amplitude: [f64; 2],
}

impl VerifyReport {
    pub fn all_ok(&self) -> bool {
        self.worst_pair_defect <= 1e-10
            && self.worst_alignment_defect <= 1e-10
            && self.worst_exponent_defect <= 1e-12
            && self.exact_pairs_zero
            && self.exact_aligned_equal
            && self.power[0] <= 1.0
            && self.power[1] <= 1.0
    }

    pub fn render(&self) -> String {
        format!(
            "neutralization pairs={} worst_defect={} exact_zero={}\n\
             alignment worst_defect={} exact_equal={} worst_exponent_defect={}\n\
             power tx1={} tx2={} within_unit={}\n\
             residual_amplitude rx1={} rx2={}\n\
             structure_ok={}\n",
            self.pairs_checked,
            crate::design::fmt(self.worst_pair_defect),
            self.exact_pairs_zero,
            crate::design::fmt(self.worst_alignment_defect),
            self.exact_aligned_equal,
            crate::design::fmt(self.worst_exponent_defect),
            crate::design::fmt(self.power[0]),
            crate::design::fmt(self.power[1]),
            self.power[0] <= 1.0 && self.power[1] <= 1.0,
            crate::design::fmt(self.residual_amplitude[0]),
            crate::design::fmt(self.residual_amplitude[1]),
            self.all_ok(),
        )
    }
}

fn decompose_pair<T: Coeff>(design: &SchemeDesign, cfg: &ChannelConfig) -> [RxDecomposition<T>; 2] {
    match design.setting {
        Setting::IcSc => scheme_ic::decompose::<T>(design, cfg),
        Setting::Wth => scheme_wth::decompose::<T>(design, cfg),
        Setting::MacWt => scheme_macwt::decompose::<T>(design, cfg),
    }
}

pub fn verify_design(design: &SchemeDesign, cfg: &ChannelConfig) -> Result<VerifyReport> {
    let float = decompose_pair::<f64>(design, cfg);
    let exact = decompose_pair::<BigRational>(design, cfg);

    let mut pairs_checked = 0;
    let mut worst_pair: f64 = 0.0;
    let mut worst_align: f64 = 0.0;
    let mut worst_exp: f64 = 0.0;
    let mut residual = [0.0f64; 2];
    for (i, rx) in float.iter().enumerate() {
        pairs_checked += rx.neutralized_pairs.len();
        for d in rx.pair_defects() {
            worst_pair = worst_pair.max(d);
        }
        worst_align = worst_align.max(rx.alignment_defect());
        worst_exp = worst_exp.max(rx.exponent_defect());
        residual[i] = rx.residual_amplitude(design.p, &|s| design.max_amplitude(s));
    }
    let mut exact_pairs_zero = true;
    let mut exact_aligned_equal = true;
    for rx in &exact {
        for s in rx.pair_sums() {
            exact_pairs_zero &= s.is_zero();
        }
        for g in &rx.aligned {
            for t in g.iter().skip(1) {
                exact_aligned_equal &= t.coeff == g[0].coeff;
            }
        }
    }

    Ok(VerifyReport {
        pairs_checked,
        worst_pair_defect: worst_pair,
        worst_alignment_defect: worst_align,
        worst_exponent_defect: worst_exp,
        exact_pairs_zero,
        exact_aligned_equal,
        power: [design.exact_power(1), design.exact_power(2)],
        residual_amplitude: residual,
    })
}
