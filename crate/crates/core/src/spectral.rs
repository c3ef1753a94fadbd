//! Real trigonometric polynomials on the unit circle S = R/Z.
//!
//! A [`TrigPoly`] stores the coefficients of
//!
//! ```text
//! f(x) = mean + sum_{n=1}^{N} cos_n cos(2πn x) + sin_n sin(2πn x)
//! ```
//!
//! Mode `n` has physical frequency `ξ = 2πn`. All operations are exact on the
//! coefficient sequences: products are full linear convolutions (the degree
//! grows, nothing is aliased), and the Helmholtz operator `A = 1 - ∂ₓ²` is the
//! diagonal multiplier `1 + ξ²`.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest degree that composition-type operations may produce.
pub const DEFAULT_DEGREE_CAP: usize = 512;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("coefficient {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("{samples} samples cannot resolve degree {degree} (need more than {need})")]
    Undersampled {
        samples: usize,
        degree: usize,
        need: usize,
    },
}

/// Physical frequency `2πn` of mode `n`.
#[inline]
pub fn mode_frequency(n: usize) -> f64 {
    2.0 * PI * n as f64
}

/// Symbol `1 + (2πn)²` of the Helmholtz operator on mode `n`.
#[inline]
pub fn helmholtz_symbol(n: usize) -> f64 {
    let xi = mode_frequency(n);
    1.0 + xi * xi
}

/// Real trigonometric polynomial with period 1.
///
/// Trailing all-zero modes are trimmed on construction, so the derived
/// equality is coefficient-wise equality of the trimmed sequences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrigPolyRepr", into = "TrigPolyRepr")]
pub struct TrigPoly {
    mean: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TrigPolyRepr {
    #[serde(default)]
    mean: f64,
    #[serde(default)]
    cos: Vec<f64>,
    #[serde(default)]
    sin: Vec<f64>,
}

impl TryFrom<TrigPolyRepr> for TrigPoly {
    type Error = SpectralError;

    fn try_from(r: TrigPolyRepr) -> Result<Self, Self::Error> {
        TrigPoly::new(r.mean, r.cos, r.sin)
    }
}

impl From<TrigPoly> for TrigPolyRepr {
    fn from(p: TrigPoly) -> Self {
        TrigPolyRepr {
            mean: p.mean,
            cos: p.cos,
            sin: p.sin,
        }
    }
}

impl Default for TrigPoly {
    fn default() -> Self {
        Self::zero()
    }
}

impl TrigPoly {
    /// Builds a polynomial from its coefficients. `cos[n-1]` and `sin[n-1]`
    /// multiply `cos(2πn x)` and `sin(2πn x)`; the two lists may differ in
    /// length.
    pub fn new(mean: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self, SpectralError> {
        if !mean.is_finite() {
            return Err(SpectralError::NonFinite {
                index: 0,
                value: mean,
            });
        }
        for (i, &v) in cos.iter().chain(sin.iter()).enumerate() {
            if !v.is_finite() {
                return Err(SpectralError::NonFinite {
                    index: i + 1,
                    value: v,
                });
            }
        }
        Ok(Self::from_raw(mean, cos, sin))
    }

    fn from_raw(mean: f64, mut cos: Vec<f64>, mut sin: Vec<f64>) -> Self {
        let n = cos.len().max(sin.len());
        cos.resize(n, 0.0);
        sin.resize(n, 0.0);
        let mut p = TrigPoly { mean, cos, sin };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while let (Some(&c), Some(&s)) = (self.cos.last(), self.sin.last()) {
            if c == 0.0 && s == 0.0 {
                self.cos.pop();
                self.sin.pop();
            } else {
                break;
            }
        }
    }

    pub fn zero() -> Self {
        TrigPoly {
            mean: 0.0,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_raw(c, Vec::new(), Vec::new())
    }

    /// `amp · cos(2πn x)`; mode 0 gives the constant `amp`.
    pub fn cos_mode(n: usize, amp: f64) -> Self {
        if n == 0 {
            return Self::constant(amp);
        }
        let mut cos = vec![0.0; n];
        cos[n - 1] = amp;
        Self::from_raw(0.0, cos, Vec::new())
    }

    /// `amp · sin(2πn x)`; mode 0 gives zero.
    pub fn sin_mode(n: usize, amp: f64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        let mut sin = vec![0.0; n];
        sin[n - 1] = amp;
        Self::from_raw(0.0, Vec::new(), sin)
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    /// Highest mode with a nonzero coefficient (0 for constants).
    pub fn degree(&self) -> usize {
        self.cos.len()
    }

    /// `(cos_n, sin_n)` for `n ≥ 1`, `(mean, 0)` for `n = 0`, zeros past the degree.
    pub fn coeff(&self, n: usize) -> (f64, f64) {
        if n == 0 {
            (self.mean, 0.0)
        } else if n <= self.degree() {
            (self.cos[n - 1], self.sin[n - 1])
        } else {
            (0.0, 0.0)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mean == 0.0 && self.cos.is_empty()
    }

    fn map_modes(
        &self,
        mean: impl Fn(f64) -> f64,
        f: impl Fn(usize, f64, f64) -> (f64, f64),
    ) -> Self {
        let mut cos = Vec::with_capacity(self.degree());
        let mut sin = Vec::with_capacity(self.degree());
        for (i, (&c, &s)) in self.cos.iter().zip(&self.sin).enumerate() {
            let (c2, s2) = f(i + 1, c, s);
            cos.push(c2);
            sin.push(s2);
        }
        Self::from_raw(mean(self.mean), cos, sin)
    }

    /// Exact derivative `∂ₓf`; the mean of the result is zero.
    pub fn differentiate(&self) -> Self {
        self.map_modes(
            |_| 0.0,
            |n, c, s| {
                let xi = mode_frequency(n);
                (xi * s, -xi * c)
            },
        )
    }

    /// `A f = (1 - ∂ₓ²) f`.
    pub fn helmholtz(&self) -> Self {
        self.map_modes(
            |m| m,
            |n, c, s| {
                let a = helmholtz_symbol(n);
                (a * c, a * s)
            },
        )
    }

    /// `A⁻¹ f`, the exact inverse of [`TrigPoly::helmholtz`].
    pub fn helmholtz_inverse(&self) -> Self {
        self.map_modes(
            |m| m,
            |n, c, s| {
                let a = helmholtz_symbol(n);
                (c / a, s / a)
            },
        )
    }

    /// `A⁻¹∂ₓ f`, fused.
    pub fn helmholtz_inverse_dx(&self) -> Self {
        self.map_modes(
            |_| 0.0,
            |n, c, s| {
                let xi = mode_frequency(n);
                let a = 1.0 + xi * xi;
                (xi * s / a, -xi * c / a)
            },
        )
    }

    /// `A⁻¹∂ₓ² f = A⁻¹f - f`, fused.
    pub fn helmholtz_inverse_dxx(&self) -> Self {
        self.map_modes(
            |_| 0.0,
            |n, c, s| {
                let xi = mode_frequency(n);
                let r = -xi * xi / (1.0 + xi * xi);
                (r * c, r * s)
            },
        )
    }

    /// Exact product by product-to-sum reduction of every mode pair.
    pub fn multiply(&self, other: &TrigPoly) -> TrigPoly {
        let (f, g) = (self, other);
        let deg = f.degree() + g.degree();
        let mut cos = vec![0.0; deg];
        let mut sin = vec![0.0; deg];
        let mut mean = f.mean * g.mean;

        // constant × oscillating parts
        for n in 1..=g.degree() {
            cos[n - 1] += f.mean * g.cos[n - 1];
            sin[n - 1] += f.mean * g.sin[n - 1];
        }
        for n in 1..=f.degree() {
            cos[n - 1] += g.mean * f.cos[n - 1];
            sin[n - 1] += g.mean * f.sin[n - 1];
        }

        for i in 1..=f.degree() {
            let (a, b) = (f.cos[i - 1], f.sin[i - 1]);
            if a == 0.0 && b == 0.0 {
                continue;
            }
            for j in 1..=g.degree() {
                let (c, d) = (g.cos[j - 1], g.sin[j - 1]);
                let cc = a * c;
                let ss = b * d;
                let cs = a * d;
                let sc = b * c;
                // cos(i+j), sin(i+j)
                cos[i + j - 1] += 0.5 * (cc - ss);
                sin[i + j - 1] += 0.5 * (cs + sc);
                // cos(i-j), sin(i-j)
                let diff_sin = 0.5 * (sc - cs);
                match i.cmp(&j) {
                    std::cmp::Ordering::Equal => mean += 0.5 * (cc + ss),
                    std::cmp::Ordering::Greater => {
                        cos[i - j - 1] += 0.5 * (cc + ss);
                        sin[i - j - 1] += diff_sin;
                    }
                    std::cmp::Ordering::Less => {
                        cos[j - i - 1] += 0.5 * (cc + ss);
                        sin[j - i - 1] -= diff_sin;
                    }
                }
            }
        }
        Self::from_raw(mean, cos, sin)
    }

    /// `∫_S f dx`, the mean coefficient.
    pub fn integrate(&self) -> f64 {
        self.mean
    }

    /// L²(S) inner product `∫ f g dx`.
    pub fn l2_inner(&self, other: &TrigPoly) -> f64 {
        let mut acc = self.mean * other.mean;
        let n = self.degree().min(other.degree());
        for i in 0..n {
            acc += 0.5 * (self.cos[i] * other.cos[i] + self.sin[i] * other.sin[i]);
        }
        acc
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_inner(self).sqrt()
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_modes(|m| c * m, |_, a, b| (c * a, c * b))
    }

    /// Drops all modes above `n`.
    pub fn truncate(&self, n: usize) -> Self {
        let k = n.min(self.degree());
        Self::from_raw(self.mean, self.cos[..k].to_vec(), self.sin[..k].to_vec())
    }

    /// Drops trailing modes whose coefficients are at most
    /// `rel_tol · max_abs_coeff`.
    pub fn chop(&self, rel_tol: f64) -> Self {
        let floor = rel_tol * self.max_abs_coeff();
        let mut k = self.degree();
        while k > 0 && self.cos[k - 1].abs() <= floor && self.sin[k - 1].abs() <= floor {
            k -= 1;
        }
        self.truncate(k)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.cos
            .iter()
            .chain(&self.sin)
            .fold(self.mean.abs(), |m, v| m.max(v.abs()))
    }

    /// Largest coefficient-wise difference.
    pub fn max_coeff_diff(&self, other: &TrigPoly) -> f64 {
        let n = self.degree().max(other.degree());
        let mut worst = (self.mean - other.mean).abs();
        for k in 1..=n {
            let (a, b) = self.coeff(k);
            let (c, d) = other.coeff(k);
            worst = worst.max((a - c).abs()).max((b - d).abs());
        }
        worst
    }

    /// Point evaluation at any real `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let theta = 2.0 * PI * x;
        let (s1, c1) = theta.sin_cos();
        let (mut c, mut s) = (1.0, 0.0);
        let mut acc = self.mean;
        for (&a, &b) in self.cos.iter().zip(&self.sin) {
            let cn = c * c1 - s * s1;
            let sn = s * c1 + c * s1;
            c = cn;
            s = sn;
            acc += a * c + b * s;
        }
        acc
    }

    /// Values at the uniform grid `x_j = j/m`, `j = 0..m`.
    pub fn sample(&self, m: usize) -> Vec<f64> {
        let table = PhaseTable::new(m);
        (0..m)
            .map(|j| {
                let mut acc = self.mean;
                for (k, (&a, &b)) in self.cos.iter().zip(&self.sin).enumerate() {
                    let (c, s) = table.at((k + 1) * j);
                    acc += a * c + b * s;
                }
                acc
            })
            .collect()
    }

    /// Least-squares projection of samples on `x_j = j/m` onto degree `degree`
    /// by discrete orthogonality. Needs `m > 2·degree`.
    pub fn from_samples(values: &[f64], degree: usize) -> Result<Self, SpectralError> {
        let m = values.len();
        if m <= 2 * degree {
            return Err(SpectralError::Undersampled {
                samples: m,
                degree,
                need: 2 * degree,
            });
        }
        let table = PhaseTable::new(m);
        let inv = 1.0 / m as f64;
        let mean = values.iter().sum::<f64>() * inv;
        let mut cos = vec![0.0; degree];
        let mut sin = vec![0.0; degree];
        for n in 1..=degree {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, &v) in values.iter().enumerate() {
                let (c, s) = table.at(n * j);
                a += v * c;
                b += v * s;
            }
            cos[n - 1] = 2.0 * a * inv;
            sin[n - 1] = 2.0 * b * inv;
        }
        TrigPoly::new(mean, cos, sin)
    }
}

/// `cos`/`sin` of `2πk/m` with exact integer phase reduction.
pub(crate) struct PhaseTable {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl PhaseTable {
    pub(crate) fn new(m: usize) -> Self {
        let (sin, cos) = (0..m)
            .map(|k| (2.0 * PI * k as f64 / m as f64).sin_cos())
            .unzip();
        PhaseTable { cos, sin }
    }

    #[inline]
    pub(crate) fn at(&self, k: usize) -> (f64, f64) {
        let i = k % self.cos.len();
        (self.cos[i], self.sin[i])
    }
}

/// Uniform grid `j/m`.
pub fn uniform_grid(m: usize) -> Vec<f64> {
    (0..m).map(|j| j as f64 / m as f64).collect()
}

/// Composite trapezoid rule on `m` uniform points; exact for integrands of
/// degree below `m`.
pub fn trapezoid(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn zip_with(f: &TrigPoly, g: &TrigPoly, op: impl Fn(f64, f64) -> f64) -> TrigPoly {
    let n = f.degree().max(g.degree());
    let mut cos = Vec::with_capacity(n);
    let mut sin = Vec::with_capacity(n);
    for k in 1..=n {
        let (a, b) = f.coeff(k);
        let (c, d) = g.coeff(k);
        cos.push(op(a, c));
        sin.push(op(b, d));
    }
    TrigPoly::from_raw(op(f.mean, g.mean), cos, sin)
}

impl Add for &TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        zip_with(self, rhs, |a, b| a + b)
    }
}

impl Sub for &TrigPoly {
    type Output = TrigPoly;
    fn sub(self, rhs: &TrigPoly) -> TrigPoly {
        zip_with(self, rhs, |a, b| a - b)
    }
}

impl Mul for &TrigPoly {
    type Output = TrigPoly;
    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        self.multiply(rhs)
    }
}

impl Mul<&TrigPoly> for f64 {
    type Output = TrigPoly;
    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        rhs.scale(self)
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for TrigPoly {
            type Output = TrigPoly;
            fn $m(self, rhs: TrigPoly) -> TrigPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&TrigPoly> for TrigPoly {
            type Output = TrigPoly;
            fn $m(self, rhs: &TrigPoly) -> TrigPoly {
                (&self).$m(rhs)
            }
        }
        impl $tr<TrigPoly> for &TrigPoly {
            type Output = TrigPoly;
            fn $m(self, rhs: TrigPoly) -> TrigPoly {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Mul<TrigPoly> for f64 {
    type Output = TrigPoly;
    fn mul(self, rhs: TrigPoly) -> TrigPoly {
        rhs.scale(self)
    }
}

impl Neg for TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        self.scale(-1.0)
    }
}

impl AddAssign<&TrigPoly> for TrigPoly {
    fn add_assign(&mut self, rhs: &TrigPoly) {
        *self = &*self + rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TAU: f64 = 2.0 * PI;

    fn close(a: &TrigPoly, b: &TrigPoly, tol: f64) -> bool {
        a.max_coeff_diff(b) <= tol * (1.0 + a.max_abs_coeff().max(b.max_abs_coeff()))
    }

    #[test]
    fn differentiate_examples() {
        let d = TrigPoly::cos_mode(1, 1.0).differentiate();
        assert_eq!(d, TrigPoly::sin_mode(1, -TAU));
        assert!(TrigPoly::constant(3.5).differentiate().is_zero());
        let d = TrigPoly::sin_mode(2, 1.0).differentiate();
        assert_eq!(d, TrigPoly::cos_mode(2, 2.0 * TAU));
    }

    #[test]
    fn helmholtz_examples() {
        let a1 = 1.0 + TAU * TAU;
        let a2 = 1.0 + 4.0 * TAU * TAU;
        assert_eq!(
            TrigPoly::cos_mode(1, 1.0).helmholtz(),
            TrigPoly::cos_mode(1, a1)
        );
        assert_eq!(TrigPoly::constant(2.0).helmholtz(), TrigPoly::constant(2.0));
        let f = TrigPoly::sin_mode(1, 1.0) + TrigPoly::cos_mode(2, 1.0);
        let want = TrigPoly::sin_mode(1, a1) + TrigPoly::cos_mode(2, a2);
        assert!(close(&f.helmholtz(), &want, 1e-15));

        let inv = TrigPoly::cos_mode(1, 1.0).helmholtz_inverse();
        assert!(close(&inv, &TrigPoly::cos_mode(1, 1.0 / a1), 1e-16));
        assert_eq!(
            TrigPoly::constant(1.0).helmholtz_inverse(),
            TrigPoly::constant(1.0)
        );
    }

    #[test]
    fn fused_operators_match_composition() {
        let f = TrigPoly::new(0.3, vec![1.0, -2.0, 0.5], vec![0.1, 0.7, -0.4]).unwrap();
        assert!(close(
            &f.helmholtz_inverse_dx(),
            &f.differentiate().helmholtz_inverse(),
            1e-15
        ));
        let dxx = f.differentiate().differentiate().helmholtz_inverse();
        assert!(close(&f.helmholtz_inverse_dxx(), &dxx, 1e-15));
        // A⁻¹∂ₓ² = A⁻¹ - 1 on the oscillating part
        let alt = f.helmholtz_inverse() - &f;
        assert!(close(&f.helmholtz_inverse_dxx(), &alt, 1e-14));
    }

    #[test]
    fn product_to_sum_examples() {
        let p = TrigPoly::cos_mode(1, 1.0) * TrigPoly::cos_mode(2, 1.0);
        assert_eq!(p, TrigPoly::cos_mode(1, 0.5) + TrigPoly::cos_mode(3, 0.5));
        let s = TrigPoly::sin_mode(1, 1.0);
        assert_eq!(
            &s * &s,
            TrigPoly::constant(0.5) - TrigPoly::cos_mode(2, 0.5)
        );
        assert!((&s * &TrigPoly::zero()).is_zero());
        // sin ξ₁ cos ξ₂ = ½(sin(ξ₁-ξ₂) + sin(ξ₁+ξ₂)) with ξ₁ < ξ₂
        let p = TrigPoly::sin_mode(1, 1.0) * TrigPoly::cos_mode(3, 1.0);
        assert_eq!(p, TrigPoly::sin_mode(2, -0.5) + TrigPoly::sin_mode(4, 0.5));
    }

    #[test]
    fn integral_examples() {
        let c = TrigPoly::cos_mode(1, 1.0);
        assert_eq!((&c * &c).integrate(), 0.5);
        assert_eq!((&c * &TrigPoly::sin_mode(2, 1.0)).integrate(), 0.0);
        assert_eq!(TrigPoly::constant(1.0).integrate(), 1.0);
    }

    #[test]
    fn trimming_gives_coefficientwise_equality() {
        let a = TrigPoly::new(1.0, vec![2.0, 0.0, 0.0], vec![0.0]).unwrap();
        let b = TrigPoly::new(1.0, vec![2.0], vec![]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.degree(), 1);
        assert!(TrigPoly::new(f64::NAN, vec![], vec![]).is_err());
        assert!(TrigPoly::new(0.0, vec![1.0, f64::INFINITY], vec![]).is_err());
    }

    #[test]
    fn sampling_and_projection_roundtrip() {
        let f = TrigPoly::new(0.2, vec![1.0, -0.5, 0.25], vec![0.0, 0.3, -0.1]).unwrap();
        let vals = f.sample(16);
        for (j, v) in vals.iter().enumerate() {
            assert!((v - f.eval(j as f64 / 16.0)).abs() < 1e-14);
        }
        let g = TrigPoly::from_samples(&vals, 3).unwrap();
        assert!(close(&f, &g, 1e-15));
        assert!(matches!(
            TrigPoly::from_samples(&vals[..6], 3),
            Err(SpectralError::Undersampled { .. })
        ));
    }

    fn poly(max_degree: usize) -> impl Strategy<Value = TrigPoly> {
        (0..=max_degree).prop_flat_map(|n| {
            (
                -2.0..2.0f64,
                prop::collection::vec(-2.0..2.0f64, n),
                prop::collection::vec(-2.0..2.0f64, n),
            )
                .prop_map(|(m, c, s)| TrigPoly::new(m, c, s).unwrap())
        })
    }

    proptest! {
        #[test]
        fn helmholtz_roundtrip(f in poly(8)) {
            let g = f.helmholtz().helmholtz_inverse();
            prop_assert!(close(&f, &g, 1e-14));
            let h = f.helmholtz_inverse().helmholtz();
            prop_assert!(close(&f, &h, 1e-14));
        }

        #[test]
        fn leibniz_rule(f in poly(16), g in poly(16)) {
            let lhs = (&f * &g).differentiate();
            let rhs = &f.differentiate() * &g + &f * &g.differentiate();
            prop_assert!(close(&lhs, &rhs, 1e-12));
        }

        #[test]
        fn derivative_has_zero_integral(f in poly(16)) {
            prop_assert_eq!(f.differentiate().integrate(), 0.0);
        }

        #[test]
        fn periodicity(f in poly(16)) {
            let v = (&f * &f.differentiate()).integrate();
            prop_assert!(v.abs() <= 1e-12 * (1.0 + f.max_abs_coeff().powi(2)) * (1 + f.degree()) as f64);
        }

        #[test]
        fn commutative_and_bilinear(f in poly(8), g in poly(8), h in poly(8), a in -3.0..3.0f64) {
            prop_assert!(close(&(&f * &g), &(&g * &f), 1e-14));
            let lhs = &(&f + &h.scale(a)) * &g;
            let rhs = &f * &g + (&h * &g).scale(a);
            prop_assert!(close(&lhs, &rhs, 1e-13));
        }

        #[test]
        fn product_matches_pointwise(f in poly(6), g in poly(6), x in 0.0..1.0f64) {
            let p = &f * &g;
            let direct = f.eval(x) * g.eval(x);
            prop_assert!((p.eval(x) - direct).abs() <= 1e-12 * (1.0 + direct.abs()) * 50.0);
        }
    }
}
