//! Closed-form secure GDoF values, regions, and minimal common-randomness
//! rates for the three settings, plus the quoted comparison anchors.

use crate::error::{Error, Result};

/// A GDoF operating point: per-user values and the common-randomness rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GdofPoint {
    pub d1: f64,
    pub d2: f64,
    pub dc: f64,
}

impl GdofPoint {
    pub fn new(d1: f64, d2: f64, dc: f64) -> Self {
        Self { d1, d2, dc }
    }

    pub fn dsum(&self) -> f64 {
        self.d1 + self.d2
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha < 0.0 || !alpha.is_finite() {
        return Err(Error::NegativeAlpha(alpha));
    }
    Ok(())
}

/// Optimal secure sum GDoF of the interference channel with transmitter-shared
/// randomness; identical to the unconstrained sum-GDoF "W" curve.
pub fn ic_sum_gdof(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(if alpha <= 0.5 {
        2.0 * (1.0 - alpha)
    } else if alpha <= 2.0 / 3.0 {
        2.0 * alpha
    } else if alpha <= 1.0 {
        2.0 * (1.0 - alpha / 2.0)
    } else if alpha <= 2.0 {
        alpha
    } else {
        2.0
    })
}

/// Minimal common-randomness GDoF achieving `ic_sum_gdof`:
/// `d_sum/2 - (1 - alpha)^+`.
pub fn ic_min_dc(alpha: f64) -> Result<f64> {
    Ok(ic_sum_gdof(alpha)? / 2.0 - (1.0 - alpha).max(0.0))
}

/// Optimal secure GDoF of the wiretap channel with a helper: 1 for all alpha.
pub fn wth_gdof(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(1.0)
}

/// Minimal common-randomness GDoF for the helper setting:
/// `1 - (1 - alpha)^+`.
pub fn wth_min_dc(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(1.0 - (1.0 - alpha).max(0.0))
}

/// Membership in the optimal secure GDoF region of the multiple access
/// wiretap channel: `d1 + d2 <= max(1, alpha)`, `0 <= d1 <= 1`,
/// `0 <= d2 <= alpha`.
pub fn mac_region_contains(alpha: f64, d1: f64, d2: f64) -> bool {
    if alpha < 0.0 {
        return false;
    }
    let tol = 1e-12;
    d1 >= -tol
        && d2 >= -tol
        && d1 <= 1.0 + tol
        && d2 <= alpha + tol
        && d1 + d2 <= 1f64.max(alpha) + tol
}

/// Vertices of the MAC region polygon, counterclockwise from the origin.
pub fn mac_region_vertices(alpha: f64) -> Vec<(f64, f64)> {
    let mut v = if alpha <= 1.0 {
        vec![(0.0, 0.0), (1.0, 0.0), (1.0 - alpha, alpha), (0.0, alpha)]
    } else {
        vec![(0.0, 0.0), (1.0, 0.0), (1.0, alpha - 1.0), (0.0, alpha)]
    };
    v.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
    v
}

/// Minimal common-randomness GDoF for a MAC-WT pair at alpha = 1:
/// `max(d1, d2)`. Only alpha = 1 is characterized; other alphas are an open
/// problem and are rejected by the caller-facing API.
pub fn mac_min_dc_alpha1(d1: f64, d2: f64) -> Result<f64> {
    if !mac_region_contains(1.0, d1, d2) {
        return Err(Error::PointOutsideRegion { alpha: 1.0, d1, d2 });
    }
    Ok(d1.max(d2))
}

/// Quoted comparison anchors for the interference channel at one alpha.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferencePoint {
    pub alpha: f64,
    /// Sum GDoF without any secrecy constraint (the "W" curve).
    pub no_secrecy: f64,
    /// Secure sum GDoF without shared randomness; only the alpha = 4/3 value
    /// 8/9 is quoted, the full curve is out of scope here.
    pub secrecy_no_cr: Option<f64>,
    /// Secure sum GDoF with shared randomness (equals the no-secrecy value).
    pub with_cr: f64,
}

/// Reference anchors at `alpha`; the no-CR field is populated only at the
/// single quoted abscissa alpha = 4/3.
pub fn reference_point(alpha: f64) -> Result<ReferencePoint> {
    let w = ic_sum_gdof(alpha)?;
    let no_cr = if (alpha - 4.0 / 3.0).abs() < 1e-12 {
        Some(8.0 / 9.0)
    } else {
        None
    };
    Ok(ReferencePoint {
        alpha,
        no_secrecy: w,
        secrecy_no_cr: no_cr,
        with_cr: w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_gdof_table() {
        let cases = [
            (0.0, 2.0),
            (0.25, 1.5),
            (0.5, 1.0),
            (0.6, 1.2),
            (2.0 / 3.0, 4.0 / 3.0),
            (0.8, 1.2),
            (1.0, 1.0),
            (4.0 / 3.0, 4.0 / 3.0),
            (1.5, 1.5),
            (2.0, 2.0),
            (3.0, 2.0),
        ];
        for (a, want) in cases {
            assert!(
                (ic_sum_gdof(a).unwrap() - want).abs() < 1e-12,
                "alpha = {a}"
            );
        }
    }

    #[test]
    fn min_dc_table() {
        let cases = [
            (0.0, 0.0),
            (0.25, 0.0),
            (0.5, 0.0),
            (0.6, 0.2),
            (2.0 / 3.0, 1.0 / 3.0),
            (0.8, 0.4),
            (1.0, 0.5),
            (4.0 / 3.0, 2.0 / 3.0),
            (1.5, 0.75),
            (2.0, 1.0),
            (3.0, 1.0),
        ];
        for (a, want) in cases {
            assert!((ic_min_dc(a).unwrap() - want).abs() < 1e-12, "alpha = {a}");
        }
    }

    #[test]
    fn sum_gdof_continuous_at_breakpoints() {
        for bp in [0.5, 2.0 / 3.0, 1.0, 2.0] {
            let eps = 1e-9;
            let lo = ic_sum_gdof(bp - eps).unwrap();
            let hi = ic_sum_gdof(bp + eps).unwrap();
            let at = ic_sum_gdof(bp).unwrap();
            assert!((lo - at).abs() < 1e-8 && (hi - at).abs() < 1e-8);
        }
    }

    #[test]
    fn min_dc_zero_exactly_below_half() {
        for i in 0..=300 {
            let a = i as f64 * 0.01;
            let dc = ic_min_dc(a).unwrap();
            assert!(dc >= -1e-15);
            if a <= 0.5 {
                assert!(dc.abs() < 1e-12, "alpha = {a}");
            } else {
                assert!(dc > 1e-12, "alpha = {a}");
            }
        }
    }

    #[test]
    fn wth_values() {
        assert!((wth_gdof(0.75).unwrap() - 1.0).abs() < 1e-15);
        assert!((wth_min_dc(0.75).unwrap() - 0.75).abs() < 1e-15);
        assert!((wth_min_dc(2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(wth_min_dc(0.0).unwrap().abs() < 1e-15);
        assert!(wth_gdof(-0.1).is_err());
    }

    #[test]
    fn mac_region_examples() {
        assert!(mac_region_contains(1.0, 0.5, 0.5));
        assert!(!mac_region_contains(0.5, 0.6, 0.5));
        assert!(mac_region_contains(2.0, 1.0, 1.0));
        assert!(!mac_region_contains(2.0, 1.0, 1.2));
    }

    #[test]
    fn mac_region_vertices_satisfy_constraints() {
        for alpha in [0.3, 0.5, 0.8, 1.0, 1.25, 2.0] {
            for (d1, d2) in mac_region_vertices(alpha) {
                assert!(mac_region_contains(alpha, d1, d2), "alpha = {alpha}");
            }
        }
    }

    #[test]
    fn mac_min_dc_alpha1_values() {
        assert!((mac_min_dc_alpha1(0.5, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((mac_min_dc_alpha1(1.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(mac_min_dc_alpha1(0.0, 0.0).unwrap().abs() < 1e-15);
        assert!(mac_min_dc_alpha1(0.8, 0.5).is_err());
    }

    #[test]
    fn reference_anchors() {
        let r = reference_point(4.0 / 3.0).unwrap();
        assert!((r.no_secrecy - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.secrecy_no_cr, Some(8.0 / 9.0));
        assert!((r.with_cr - r.no_secrecy).abs() < 1e-15);
        assert!(reference_point(0.9).unwrap().secrecy_no_cr.is_none());
    }
}
