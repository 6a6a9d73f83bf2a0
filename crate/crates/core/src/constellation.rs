//! PAM constellations and exact discrete distributions.
//!
//! A constellation is the set `{step * a : a in [-Q, Q] integer}`: `2Q + 1`
//! points, symmetric about zero, spacing exactly `step`. All moments and
//! entropies have closed forms under the uniform prior; sums of independent
//! symbols are handled as exact discrete convolutions.

use crate::error::{Error, Result};

/// Symmetric PAM set `{step * a : a in [-Q, Q]}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PamSet {
    step: f64,
    halfwidth: u64,
}

impl PamSet {
    pub fn new(step: f64, halfwidth: u64) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::InvalidConstellation(format!(
                "step must be positive and finite, got {step}"
            )));
        }
        if halfwidth == 0 {
            return Err(Error::InvalidConstellation(
                "halfwidth must be a positive integer".into(),
            ));
        }
        Ok(Self { step, halfwidth })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn halfwidth(&self) -> u64 {
        self.halfwidth
    }

    pub fn cardinality(&self) -> u64 {
        2 * self.halfwidth + 1
    }

    /// Largest symbol magnitude, `step * Q`.
    pub fn max_amplitude(&self) -> f64 {
        self.step * self.halfwidth as f64
    }

    pub fn value(&self, index: i64) -> f64 {
        self.step * index as f64
    }

    /// Index of `value` if it is (numerically) a constellation point.
    pub fn index_of(&self, value: f64) -> Option<i64> {
        let q = self.halfwidth as i64;
        let k = (value / self.step).round() as i64;
        if k < -q || k > q {
            return None;
        }
        if (value - self.value(k)).abs() <= self.step * 1e-9 {
            Some(k)
        } else {
            None
        }
    }

    /// `E|v|^2 = step^2 * Q(Q+1)/3` under the uniform prior.
    pub fn second_moment(&self) -> f64 {
        let q = self.halfwidth as f64;
        self.step * self.step * q * (q + 1.0) / 3.0
    }

    /// `log2(2Q + 1)` bits.
    pub fn entropy_bits(&self) -> f64 {
        (self.cardinality() as f64).log2()
    }

    /// Uniform distribution over the set.
    pub fn distribution(&self) -> DiscreteDist {
        let n = self.cardinality() as usize;
        let p = 1.0 / n as f64;
        DiscreteDist {
            values: (-(self.halfwidth as i64)..=self.halfwidth as i64)
                .map(|a| self.value(a))
                .collect(),
            probs: vec![p; n],
        }
    }
}

/// Realized half-width `Q = max(1, floor(P^(lambda/2)))`.
///
/// Flooring keeps the bound directions of the rate and power arguments while
/// making the set realizable at any finite `P`.
pub fn halfwidth_from_lambda(p: f64, lambda: f64) -> u64 {
    let q = p.powf(lambda / 2.0).floor();
    if q < 1.0 {
        1
    } else {
        q as u64
    }
}

/// Probability mass on a finite support, values strictly increasing.
#[derive(Debug, Clone)]
pub struct DiscreteDist {
    values: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteDist {
    pub fn support(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .zip(self.probs.iter())
            .filter(|(_, &p)| p > 0.0)
            .map(|(&v, &p)| (v, p))
    }

    pub fn support_len(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn entropy_bits(&self) -> f64 {
        -self
            .probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.log2())
            .sum::<f64>()
    }

    fn min_gap(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Exact distribution of the sum of two independent variables.
    ///
    /// When both supports are even lattices with an integer step ratio the sum
    /// stays on the finer lattice and the support collapses; otherwise every
    /// distinct pairwise sum becomes its own support point.
    pub fn convolve(&self, other: &DiscreteDist) -> DiscreteDist {
        if let Some(d) = self.lattice_convolve(other) {
            return d;
        }
        let mut sums: Vec<(f64, f64)> = Vec::with_capacity(self.values.len() * other.values.len());
        for (va, pa) in self.support() {
            for (vb, pb) in other.support() {
                sums.push((va + vb, pa * pb));
            }
        }
        sums.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let tol = self.min_gap().min(other.min_gap()) * 1e-9;
        let mut values = Vec::new();
        let mut probs: Vec<f64> = Vec::new();
        for (v, p) in sums {
            let merge = values.last().is_some_and(|&lv| (v - lv) <= tol);
            if merge {
                *probs.last_mut().unwrap() += p;
            } else {
                values.push(v);
                probs.push(p);
            }
        }
        DiscreteDist { values, probs }
    }

    fn lattice_step(&self) -> Option<f64> {
        if self.values.len() < 2 {
            return Some(1.0);
        }
        let step = self.values[1] - self.values[0];
        for w in self.values.windows(2) {
            if ((w[1] - w[0]) - step).abs() > step * 1e-9 {
                return None;
            }
        }
        Some(step)
    }

    fn lattice_convolve(&self, other: &DiscreteDist) -> Option<DiscreteDist> {
        let sa = self.lattice_step()?;
        let sb = other.lattice_step()?;
        let (fine, coarse, sf, sc) = if sa <= sb {
            (self, other, sa, sb)
        } else {
            (other, self, sb, sa)
        };
        let ratio = sc / sf;
        let k = ratio.round();
        if (ratio - k).abs() > 1e-9 * ratio.max(1.0) || k < 1.0 {
            return None;
        }
        let k = k as usize;
        let n = fine.values.len() + (coarse.values.len() - 1) * k;
        let mut probs = vec![0.0; n];
        for (j, &pc) in coarse.probs.iter().enumerate() {
            if pc == 0.0 {
                continue;
            }
            for (i, &pf) in fine.probs.iter().enumerate() {
                probs[i + j * k] += pf * pc;
            }
        }
        let origin = fine.values[0] + coarse.values[0];
        Some(DiscreteDist {
            values: (0..n).map(|i| origin + i as f64 * sf).collect(),
            probs,
        })
    }
}

/// Exact distribution of the sum of two independent uniform PAM symbols.
pub fn pam_sum_distribution(a: &PamSet, b: &PamSet) -> DiscreteDist {
    a.distribution().convolve(&b.distribution())
}
