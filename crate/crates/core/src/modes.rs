//! Closed-form curvature of planes spanned by cosine modes.
//!
//! For integer modes `k₁, k₂, l₁, l₂ ≥ 1` (physical frequencies `2πk₁`, …)
//! the vectors are
//!
//! ```text
//! u = (cos k₁x, cos k₂x, α),   v = (cos l₁x, cos l₂x, β)
//! ```
//!
//! and the curvature splits as `S(u,v) = S_2CH(ũ,ṽ) + K₁ + … + K₅`. Every
//! `Kᵢ` reduces to Kronecker deltas of integer mode combinations via
//! `∫cos(ξx)cos(ηx) = ½(δ_{ξ,η} + δ_{ξ,-η})`, so no floating-point equality
//! test is ever made.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::AlgebraElement;
use crate::metric::{gram, s_2ch, sectional_nonnormalized_gamma};
use crate::spectral::{mode_frequency, TrigPoly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModeError {
    #[error("mode indices must be at least 1, got ({k1}, {k2}, {l1}, {l2})")]
    InvalidMode { k1: u32, k2: u32, l1: u32, l2: u32 },
    #[error("the positivity estimate requires beta = 1, got {0}")]
    BetaNotOne(f64),
}

/// The pair `u = (cos k₁x, cos k₂x, α)`, `v = (cos l₁x, cos l₂x, β)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeVectors {
    pub k1: u32,
    pub k2: u32,
    pub l1: u32,
    pub l2: u32,
    pub alpha: f64,
    pub beta: f64,
}

impl ModeVectors {
    pub fn new(
        k1: u32,
        k2: u32,
        l1: u32,
        l2: u32,
        alpha: f64,
        beta: f64,
    ) -> Result<Self, ModeError> {
        if [k1, k2, l1, l2].contains(&0) {
            return Err(ModeError::InvalidMode { k1, k2, l1, l2 });
        }
        Ok(ModeVectors {
            k1,
            k2,
            l1,
            l2,
            alpha,
            beta,
        })
    }

    pub fn u(&self) -> AlgebraElement {
        AlgebraElement::new(
            TrigPoly::cos_mode(self.k1 as usize, 1.0),
            TrigPoly::cos_mode(self.k2 as usize, 1.0),
            self.alpha,
        )
    }

    pub fn v(&self) -> AlgebraElement {
        AlgebraElement::new(
            TrigPoly::cos_mode(self.l1 as usize, 1.0),
            TrigPoly::cos_mode(self.l2 as usize, 1.0),
            self.beta,
        )
    }

    /// `M = max{k₁, l₁}` as a physical frequency.
    pub fn max_frequency(&self) -> f64 {
        mode_frequency(self.k1.max(self.l1) as usize)
    }
}

/// Which mode quadruples a survey admits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeFilter {
    /// Every quadruple.
    All,
    /// `k₁ ≠ k₂` and `l₁ ≠ l₂`.
    Theorem,
    /// Additionally `k₁ ≠ l₁` and `k₂ ≠ l₂`, so that `⟨u,v⟩ = αβ/2`.
    #[default]
    Strict,
}

impl ModeFilter {
    pub fn admits(self, k1: u32, k2: u32, l1: u32, l2: u32) -> bool {
        match self {
            ModeFilter::All => true,
            ModeFilter::Theorem => k1 != k2 && l1 != l2,
            ModeFilter::Strict => k1 != k2 && l1 != l2 && k1 != l1 && k2 != l2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModeFilter::All => "all",
            ModeFilter::Theorem => "theorem",
            ModeFilter::Strict => "strict",
        }
    }
}

/// `δ_{a,b} + δ_{a,-b}` for integer modes with `b > 0`.
fn delta_pair(a: i64, b: i64) -> f64 {
    let plus = a == b;
    let minus = a == -b;
    // For b > 0 at most one member of the pair can fire.
    assert!(!(plus && minus), "delta pair ({a}, {b}) fired twice");
    f64::from(u8::from(plus) + u8::from(minus))
}

/// The five vorticity terms of the cosine-mode curvature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeTerms {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub k5: f64,
}

impl ModeTerms {
    pub fn sum(&self) -> f64 {
        self.k1 + self.k2 + self.k3 + self.k4 + self.k5
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.k1, self.k2, self.k3, self.k4, self.k5]
    }
}

/// `K₁ … K₅` in closed form.
///
/// With `w = αv₁ + βu₁`, `q = u₁v₁ + ½u₁ₓv₁ₓ + ½u₂v₂` and `qᵤ`, `qᵥ` the
/// quadratic forms of `ũ`, `ṽ` these are
///
/// ```text
/// K₁ = ¼∫wₓ A⁻¹∂ₓw        K₂ = -αβ∫u₁ₓ A⁻¹∂ₓv₁      K₃ = -∫qₓ A⁻¹∂ₓw
/// K₄ = β∫(qᵤ)ₓ A⁻¹∂ₓv₁    K₅ = α∫(qᵥ)ₓ A⁻¹∂ₓu₁
/// ```
pub fn mode_correction_terms(mv: &ModeVectors) -> ModeTerms {
    let (n1, n2, m1, m2) = (
        i64::from(mv.k1),
        i64::from(mv.k2),
        i64::from(mv.l1),
        i64::from(mv.l2),
    );
    let k1 = mode_frequency(mv.k1 as usize);
    let l1 = mode_frequency(mv.l1 as usize);
    let (a, b) = (mv.alpha, mv.beta);
    let hk = 1.0 + k1 * k1;
    let hl = 1.0 + l1 * l1;
    let same = delta_pair(n1, m1);

    let t1 = 0.25 * (0.5 * a * a + 0.5 * b * b + a * b * same)
        - 0.25 * (a * a / (2.0 * hl) + b * b / (2.0 * hk) + 0.5 * (a * b / hl + a * b / hk) * same);

    let t2 = 0.5 * a * b * (-same + same / hl);

    // Triple products cos(k₁x)cos(l₁x)cos(ηx) and friends, against η = l₁ or k₁.
    let block = |eta: i64| {
        0.5 * (delta_pair(n1 + m1, eta) + delta_pair(n1 - m1, eta))
            + 0.25 * k1 * l1 * (delta_pair(n1 - m1, eta) - delta_pair(n1 + m1, eta))
            + 0.25 * (delta_pair(n2 + m2, eta) + delta_pair(n2 - m2, eta))
    };
    let t3 = -0.5 * a * (l1 * l1 / hl) * block(m1) - 0.5 * b * (k1 * k1 / hk) * block(n1);

    let t4 = 0.25
        * b
        * (l1 * l1 / hl)
        * ((1.0 - 0.5 * k1 * k1) * delta_pair(2 * n1, m1) + 0.5 * delta_pair(2 * n2, m1));
    let t5 = 0.25
        * a
        * (k1 * k1 / hk)
        * ((1.0 - 0.5 * l1 * l1) * delta_pair(2 * m1, n1) + 0.5 * delta_pair(2 * m2, n1));

    ModeTerms {
        k1: t1,
        k2: t2,
        k3: t3,
        k4: t4,
        k5: t5,
    }
}

/// `S_2CH` of the vorticity-free parts, evaluated through `Γ⁰`.
pub fn s2ch_modes(mv: &ModeVectors) -> f64 {
    s_2ch(&(&mv.u()).into(), &(&mv.v()).into())
}

/// `S(u,v) = S_2CH(ũ,ṽ) + K₁ + … + K₅`.
pub fn sectional_modes(mv: &ModeVectors) -> f64 {
    s2ch_modes(mv) + mode_correction_terms(mv).sum()
}

/// Lower bound for `S_2CH` of the cosine family:
/// `(p²/16)[1/p² - 1/p + ¼ - 1/(2p²) - 2/p]` with `p = k₁l₁` in physical
/// frequencies.
pub fn s2ch_lower_bound(k1: u32, l1: u32) -> f64 {
    let p = mode_frequency(k1 as usize) * mode_frequency(l1 as usize);
    let p2 = p * p;
    p2 / 16.0 * (1.0 / p2 - 1.0 / p + 0.25 - 1.0 / (2.0 * p2) - 2.0 / p)
}

/// The two lower estimates for `S` when `β = 1`: the seven-term estimate and
/// the simplified `(α² - 5αM² - 5M²)/10`.
pub fn lower_bound_chain(mv: &ModeVectors) -> (f64, f64) {
    let a = mv.alpha;
    let k1 = mode_frequency(mv.k1 as usize);
    let l1 = mode_frequency(mv.l1 as usize);
    let m2 = mv.max_frequency().powi(2);
    let h = 1.0 + mode_frequency(1).powi(2);
    let kl = k1 * l1;
    let bound1 = (a * a + 1.0) / 8.0
        - (a * a + 1.0) / (8.0 * h)
        - a / (4.0 * h)
        - a / 2.0
        - (a + 1.0) / 2.0 * (1.5 + 0.25 * kl)
        - 0.25 * kl * kl / (1.0 + l1 * l1)
        - a / 4.0 * kl * kl / (1.0 + k1 * k1);
    let bound2 = (a * a - 5.0 * a * m2 - 5.0 * m2) / 10.0;
    (bound1, bound2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityCertificate {
    pub s_value: f64,
    pub bound1: f64,
    pub bound2: f64,
    /// `max{k₁, l₁}` as a physical frequency.
    pub m: f64,
    /// `S ≥ bound2 > 0`.
    pub passed: bool,
}

pub fn positivity_certificate(mv: &ModeVectors) -> Result<PositivityCertificate, ModeError> {
    if mv.beta != 1.0 {
        return Err(ModeError::BetaNotOne(mv.beta));
    }
    let s_value = sectional_modes(mv);
    let (bound1, bound2) = lower_bound_chain(mv);
    Ok(PositivityCertificate {
        s_value,
        bound1,
        bound2,
        m: mv.max_frequency(),
        passed: bound2 > 0.0 && s_value >= bound2,
    })
}

fn gram_v(l1: u32) -> f64 {
    let l = mode_frequency(l1 as usize);
    0.5 * (1.0 + 0.5 * (l * l + 1.0)) - 0.25
}

/// `(1/10) / (½(1 + ½(l₁² + 1)) - ¼)`: the large-α limit of the lower
/// estimate for `K`.
pub fn normalized_limit(l1: u32) -> f64 {
    0.1 / gram_v(l1)
}

/// Large-α limit of `K` itself for distinct modes and `β = 1`. The leading
/// `α²` coefficient of `S` is `l₁²/(8(1+l₁²))`, coming from `K₁`.
pub fn normalized_asymptote(l1: u32) -> f64 {
    let l = mode_frequency(l1 as usize);
    (l * l / (8.0 * (1.0 + l * l))) / gram_v(l1)
}

/// Gram entries `(⟨u,u⟩, ⟨v,v⟩, ⟨u,v⟩)` for distinct modes:
/// `1 + ½(k₁² + α²)`, `1 + ½(l₁² + β²)`, `αβ/2`.
pub fn gram_closed_form(mv: &ModeVectors) -> (f64, f64, f64) {
    let k = mode_frequency(mv.k1 as usize);
    let l = mode_frequency(mv.l1 as usize);
    (
        1.0 + 0.5 * (k * k + mv.alpha * mv.alpha),
        1.0 + 0.5 * (l * l + mv.beta * mv.beta),
        0.5 * mv.alpha * mv.beta,
    )
}

/// One row of a curvature survey.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub modes: ModeVectors,
    pub s: f64,
    pub s_2ch: f64,
    pub terms: ModeTerms,
    pub bound1: f64,
    pub bound2: f64,
    /// `NaN` for a degenerate plane.
    pub k: f64,
    /// `β = 1` and `S ≥ bound2 > 0`.
    pub passed: bool,
}

impl SurveyRow {
    pub fn compute(mv: &ModeVectors) -> Self {
        let s_2ch = s2ch_modes(mv);
        let terms = mode_correction_terms(mv);
        let s = s_2ch + terms.sum();
        let (bound1, bound2) = lower_bound_chain(mv);
        let (uu, vv, uv) = gram(&mv.u(), &mv.v());
        let det = uu * vv - uv * uv;
        let k = if det > crate::metric::DEGENERATE_PLANE_TOL * uu * vv {
            s / det
        } else {
            f64::NAN
        };
        SurveyRow {
            modes: *mv,
            s,
            s_2ch,
            terms,
            bound1,
            bound2,
            k,
            passed: mv.beta == 1.0 && bound2 > 0.0 && s >= bound2,
        }
    }
}

/// `S` through the full Christoffel pipeline on the assembled vectors.
pub fn sectional_pipeline(mv: &ModeVectors) -> f64 {
    sectional_nonnormalized_gamma(&mv.u(), &mv.v())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{correction_closed_form, sectional_normalized};
    use crate::test_support::approx_rel;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const TAU: f64 = 2.0 * PI;

    fn mv(k1: u32, k2: u32, l1: u32, l2: u32, alpha: f64, beta: f64) -> ModeVectors {
        ModeVectors::new(k1, k2, l1, l2, alpha, beta).unwrap()
    }

    fn theorem_alpha(k1: u32, l1: u32) -> f64 {
        6.0 * mode_frequency(k1.max(l1) as usize).powi(2)
    }

    #[test]
    fn rejects_zero_modes() {
        assert!(ModeVectors::new(0, 1, 2, 3, 1.0, 1.0).is_err());
    }

    #[test]
    fn delta_pairs() {
        assert_eq!(delta_pair(3, 3), 1.0);
        assert_eq!(delta_pair(-3, 3), 1.0);
        assert_eq!(delta_pair(0, 3), 0.0);
    }

    #[test]
    fn no_deltas_fire_for_scattered_modes() {
        let t = mode_correction_terms(&mv(1, 5, 3, 7, 2.0, 1.0));
        assert_eq!(t.k2, 0.0);
        assert_eq!(t.k3, 0.0);
        assert_eq!(t.k4, 0.0);
        assert_eq!(t.k5, 0.0);
    }

    #[test]
    fn equal_leading_modes() {
        let (a, b) = (3.0, 0.5);
        for n in 1..4 {
            let t = mode_correction_terms(&mv(n, n + 1, n, n + 2, a, b));
            let xi = mode_frequency(n as usize);
            assert!(approx_rel(
                t.k2,
                0.5 * a * b * (-1.0 + 1.0 / (1.0 + xi * xi)),
                1e-14
            ));
        }
    }

    #[test]
    fn k4_with_doubled_mode() {
        // 2k₁ = l₁ with modes 1 and 2
        let t = mode_correction_terms(&mv(1, 3, 2, 5, 0.0, 1.0));
        let l = 2.0 * TAU;
        let want = 0.25 * l * l / (1.0 + l * l) * (1.0 - 0.5 * TAU * TAU);
        assert!(approx_rel(t.k4, want, 1e-14));
    }

    #[test]
    fn terms_match_integral_forms() {
        for &(k1, k2, l1, l2) in &[
            (1, 2, 2, 4),
            (2, 1, 1, 3),
            (1, 1, 1, 1),
            (3, 2, 1, 2),
            (2, 4, 4, 1),
        ] {
            for (a, b) in [(3.0, 1.0), (100.0, 1.0), (2.0, -0.5)] {
                let m = mv(k1, k2, l1, l2, a, b);
                let t = mode_correction_terms(&m);
                let closed = correction_closed_form(&m.u(), &m.v());
                assert!((t.sum() - closed).abs() <= 1e-8 * (1.0 + closed.abs()));
            }
        }
    }

    #[test]
    fn zero_vorticity_reduces_to_s2ch() {
        let m = mv(1, 2, 3, 4, 0.0, 0.0);
        assert_eq!(sectional_modes(&m), s2ch_modes(&m));
    }

    #[test]
    fn lower_bound_examples() {
        let b = s2ch_lower_bound(1, 1);
        assert!((b - 16.98).abs() < 0.01, "{b}");
        for k1 in 1..=32 {
            for l1 in 1..=32 {
                assert!(s2ch_lower_bound(k1, l1) > 0.0);
            }
        }
        let p = mode_frequency(100).powi(2);
        assert!(approx_rel(s2ch_lower_bound(100, 100), p * p / 64.0, 1e-3));
    }

    #[test]
    fn certificate_examples() {
        let m = mv(1, 2, 1, 2, 6.0 * TAU * TAU, 1.0);
        let c = positivity_certificate(&m).unwrap();
        assert!(c.passed);
        assert!(c.s_value >= c.bound2);
        assert!(approx_rel(c.m, TAU, 1e-15));

        let c = positivity_certificate(&mv(1, 2, 3, 4, 0.0, 1.0)).unwrap();
        assert!(approx_rel(c.bound2, -c.m * c.m / 2.0, 1e-14));
        assert!(!c.passed);

        assert!(matches!(
            positivity_certificate(&mv(1, 2, 3, 4, 1.0, 2.0)),
            Err(ModeError::BetaNotOne(_))
        ));
    }

    #[test]
    fn certificate_sweep_passes() {
        for k1 in 1..=6 {
            for l1 in 1..=6 {
                let m = mv(k1, k1 % 6 + 1, l1, l1 % 6 + 1, theorem_alpha(k1, l1), 1.0);
                let c = positivity_certificate(&m).unwrap();
                assert!(c.passed, "{m:?}");
                assert!(c.s_value >= c.bound1 && c.bound1 >= c.bound2, "{m:?}");
            }
        }
    }

    #[test]
    fn limit_examples() {
        assert!(
            (normalized_limit(1) - 9.64e-3).abs() < 1e-4,
            "{}",
            normalized_limit(1)
        );
        for l1 in 1..50 {
            assert!(normalized_limit(l1) > 0.0);
        }
        let l = mode_frequency(1000);
        assert!(approx_rel(normalized_limit(1000), 0.4 / (l * l), 1e-6));
    }

    #[test]
    fn normalized_curvature_approaches_asymptote() {
        for l1 in 1..=3 {
            let mut last = f64::INFINITY;
            for alpha in [1e3, 1e4, 1e5] {
                let m = mv(l1 + 1, l1 + 3, l1, l1 + 2, alpha, 1.0);
                let k = sectional_normalized(&m.u(), &m.v()).unwrap();
                let rel = (k - normalized_asymptote(l1)).abs() / normalized_asymptote(l1);
                assert!(rel < last);
                if alpha == 1e4 {
                    assert!(rel < 0.05, "{rel}");
                }
                assert!(k > normalized_limit(l1));
                last = rel;
            }
        }
    }

    #[test]
    fn survey_row_matches_components() {
        let m = mv(1, 2, 3, 4, theorem_alpha(1, 3), 1.0);
        let r = SurveyRow::compute(&m);
        assert!(r.passed);
        assert!(approx_rel(r.s, sectional_pipeline(&m), 1e-10));
        let det = {
            let (uu, vv, uv) = gram_closed_form(&m);
            uu * vv - uv * uv
        };
        assert!(approx_rel(r.k, r.s / det, 1e-10));
    }

    #[test]
    fn filters() {
        assert!(ModeFilter::All.admits(1, 1, 1, 1));
        assert!(!ModeFilter::Theorem.admits(1, 1, 2, 3));
        assert!(ModeFilter::Theorem.admits(1, 2, 1, 3));
        assert!(!ModeFilter::Strict.admits(1, 2, 1, 3));
        assert!(ModeFilter::Strict.admits(1, 2, 3, 4));
    }

    fn modes() -> impl Strategy<Value = (u32, u32, u32, u32)> {
        (1u32..=6, 1u32..=6, 1u32..=6, 1u32..=6)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn closed_form_matches_pipeline((k1, k2, l1, l2) in modes(), alpha in -50.0..500.0f64, beta in -2.0..2.0f64) {
            let m = mv(k1, k2, l1, l2, alpha, beta);
            let s = sectional_pipeline(&m);
            prop_assert!((sectional_modes(&m) - s).abs() <= 1e-8 * (1.0 + s.abs()));
        }

        #[test]
        fn theorem_family_is_positive((k1, k2, l1, l2) in modes()) {
            prop_assume!(ModeFilter::Strict.admits(k1, k2, l1, l2));
            let m = mv(k1, k2, l1, l2, theorem_alpha(k1, l1), 1.0);
            let c = positivity_certificate(&m).unwrap();
            prop_assert!(c.s_value > 0.0 && c.passed);
            prop_assert!(c.s_value >= c.bound1 && c.bound1 >= c.bound2);
        }

        #[test]
        fn gram_closed_form_matches_metric((k1, k2, l1, l2) in modes(), alpha in -20.0..20.0f64) {
            prop_assume!(ModeFilter::Strict.admits(k1, k2, l1, l2));
            let m = mv(k1, k2, l1, l2, alpha, 1.0);
            let (a, b, c) = gram_closed_form(&m);
            let (x, y, z) = gram(&m.u(), &m.v());
            prop_assert!(approx_rel(a, x, 1e-12) && approx_rel(b, y, 1e-12) && approx_rel(c, z, 1e-12));
        }
    }
}
