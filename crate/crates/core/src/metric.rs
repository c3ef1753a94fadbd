//! Right-invariant metric, Christoffel operators and sectional curvature at
//! the identity.
//!
//! The metric on the algebra is
//!
//! ```text
//! ⟨U, V⟩ = ∫(Au₁)v₁ + ∫u₂v₂ - ½v₃∫u₁ - ½u₃∫v₁ + ½u₃v₃
//! ```
//!
//! with inertia operator `𝔸U = (Au₁ - ½u₃, u₂, ½(u₃ - ∫u₁))`, so that
//! `⟨U, V⟩ = ∫(𝔸U)·V`. Curvature is available through two routes: the
//! Christoffel form `⟨Γ(u,v),Γ(u,v)⟩ - ⟨Γ(u,u),Γ(v,v)⟩` and the tensor form
//! `⟨R(u,v)v, u⟩` built from derivatives of `Γ`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    compose_with_diffeo, eulerian_velocity, projection_degree, AlgebraElement, AlgebraError,
    GroupElement, GroupVelocity,
};
use crate::spectral::TrigPoly;

/// Relative Gram-determinant threshold below which a plane is degenerate.
pub const DEGENERATE_PLANE_TOL: f64 = 1e-12;

/// Sharp constants `c`, `C` in `c‖U‖² ≤ ⟨U,U⟩ ≤ C‖U‖²` with
/// `‖U‖² = ‖u₁‖²_{H¹} + ‖u₂‖² + u₃²`: the eigenvalues `(3 ∓ √5)/4` of the
/// form `[[1, -½], [-½, ½]]` acting on `(∫u₁, u₃)`. Every other direction
/// has ratio exactly one.
pub const NORM_EQUIVALENCE: (f64, f64) = (0.190_983_005_625_052_6, 1.309_016_994_374_947_5);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("degenerate plane: Gram determinant {det:.3e} is below {threshold:.3e}")]
    DegeneratePlane { det: f64, threshold: f64 },
}

/// Momentum `𝔸U` together with the velocity it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Momentum {
    pub m1: TrigPoly,
    pub m2: TrigPoly,
    pub m3: f64,
    pub source: AlgebraElement,
}

impl Momentum {
    pub fn from_velocity(u: &AlgebraElement) -> Self {
        Momentum {
            m1: &u.u1.helmholtz() - &TrigPoly::constant(0.5 * u.u3),
            m2: u.u2.clone(),
            m3: 0.5 * (u.u3 - u.u1.integrate()),
            source: u.clone(),
        }
    }

    /// Builds a momentum from its components, recovering the velocity with
    /// the exact inverse `u₃ = 4m₃ + 2∫m₁`, `u₁ = A⁻¹(m₁ + u₃/2)`, `u₂ = m₂`.
    pub fn from_components(m1: TrigPoly, m2: TrigPoly, m3: f64) -> Self {
        let u3 = 4.0 * m3 + 2.0 * m1.integrate();
        let u1 = (&m1 + &TrigPoly::constant(0.5 * u3)).helmholtz_inverse();
        let source = AlgebraElement::new(u1, m2.clone(), u3);
        Momentum { m1, m2, m3, source }
    }
}

/// `𝔸U`.
pub fn inertia_apply(u: &AlgebraElement) -> Momentum {
    Momentum::from_velocity(u)
}

/// `⟨U, V⟩_𝔸`.
pub fn metric_inner(u: &AlgebraElement, v: &AlgebraElement) -> f64 {
    u.u1.helmholtz().l2_inner(&v.u1) + u.u2.l2_inner(&v.u2)
        - 0.5 * v.u3 * u.u1.integrate()
        - 0.5 * u.u3 * v.u1.integrate()
        + 0.5 * u.u3 * v.u3
}

/// Vorticity-free part `(u₁, u₂)` of an algebra element.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReducedElement {
    pub u1: TrigPoly,
    pub u2: TrigPoly,
}

impl ReducedElement {
    pub fn new(u1: TrigPoly, u2: TrigPoly) -> Self {
        ReducedElement { u1, u2 }
    }

    pub fn lift(&self, u3: f64) -> AlgebraElement {
        AlgebraElement::new(self.u1.clone(), self.u2.clone(), u3)
    }
}

impl From<&AlgebraElement> for ReducedElement {
    fn from(u: &AlgebraElement) -> Self {
        ReducedElement::new(u.u1.clone(), u.u2.clone())
    }
}

/// Metric of the system without vorticity: `∫(Au₁)v₁ + ∫u₂v₂`.
pub fn reduced_inner(u: &ReducedElement, v: &ReducedElement) -> f64 {
    u.u1.helmholtz().l2_inner(&v.u1) + u.u2.l2_inner(&v.u2)
}

/// `Γ⁰(ũ, ṽ) = (-A⁻¹∂ₓ(u₁v₁ + ½u₁ₓv₁ₓ + ½u₂v₂), -½u₂v₁ₓ - ½u₁ₓv₂)`.
pub fn christoffel0(u: &ReducedElement, v: &ReducedElement) -> ReducedElement {
    let u1x = u.u1.differentiate();
    let v1x = v.u1.differentiate();
    let q = &u.u1 * &v.u1 + (&u1x * &v1x).scale(0.5) + (&u.u2 * &v.u2).scale(0.5);
    let first = -q.helmholtz_inverse_dx();
    let second = (&u.u2 * &v1x + &u1x * &v.u2).scale(-0.5);
    ReducedElement::new(first, second)
}

/// `Γ(U, V) = (Γ⁰(ũ, ṽ), 0) + (½A⁻¹∂ₓ(u₃v₁ + u₁v₃), 0, 0)`.
pub fn christoffel(u: &AlgebraElement, v: &AlgebraElement) -> AlgebraElement {
    let g0 = christoffel0(&u.into(), &v.into());
    let w = v.u1.scale(u.u3) + u.u1.scale(v.u3);
    AlgebraElement::new(&g0.u1 + &w.helmholtz_inverse_dx().scale(0.5), g0.u2, 0.0)
}

/// Christoffel operator at a group element `g = (φ, f, s)`, acting on
/// tangent vectors in the trivialization: `Γ(X̂, Ŷ)∘φ` with `X̂`, `Ŷ` the
/// Eulerian velocities.
pub fn christoffel_at(
    g: &GroupElement,
    x: &GroupVelocity,
    y: &GroupVelocity,
) -> Result<GroupVelocity, AlgebraError> {
    let xe = eulerian_velocity(g, x)?;
    let ye = eulerian_velocity(g, y)?;
    let gamma = christoffel(&xe, &ye);
    if g.phi.is_identity() {
        return Ok(GroupVelocity {
            phi_t: gamma.u1,
            f_t: gamma.u2,
            s_t: 0.0,
        });
    }
    let d = projection_degree(&[g.phi.displacement().degree(), gamma.degree()])?;
    Ok(GroupVelocity {
        phi_t: compose_with_diffeo(&gamma.u1, &g.phi, d)?,
        f_t: compose_with_diffeo(&gamma.u2, &g.phi, d)?,
        s_t: 0.0,
    })
}

/// `(h₁ₓv₁, h₂ₓv₁, 0)`: the transport of `h` along the first component of `v`.
fn transport(h: &AlgebraElement, v1: &TrigPoly) -> AlgebraElement {
    AlgebraElement::new(&h.u1.differentiate() * v1, &h.u2.differentiate() * v1, 0.0)
}

/// Derivative of `Γ` along the group direction at the identity:
/// `D₁Γ(w, u)v = -Γ((w₁ₓv₁, w₂ₓv₁, 0), u) - Γ(w, (u₁ₓv₁, u₂ₓv₁, 0)) + Γ(w, u)ₓv₁`.
pub fn christoffel_derivative(
    w: &AlgebraElement,
    u: &AlgebraElement,
    v: &AlgebraElement,
) -> AlgebraElement {
    let a = christoffel(&transport(w, &v.u1), u);
    let b = christoffel(w, &transport(u, &v.u1));
    let c = transport(&christoffel(w, u), &v.u1);
    &(&c - &a) - &b
}

/// `R(u, v)v = D₁Γ(v,u)v - D₁Γ(v,v)u + Γ(Γ(v,v), u) - Γ(Γ(v,u), v)`.
pub fn curvature_rvv(u: &AlgebraElement, v: &AlgebraElement) -> AlgebraElement {
    let gvv = christoffel(v, v);
    let gvu = christoffel(v, u);
    let first = &christoffel_derivative(v, u, v) - &christoffel_derivative(v, v, u);
    let second = &christoffel(&gvv, u) - &christoffel(&gvu, v);
    &first + &second
}

/// `⟨Γ(u,v),Γ(u,v)⟩ - ⟨Γ(u,u),Γ(v,v)⟩`.
pub fn sectional_nonnormalized_gamma(u: &AlgebraElement, v: &AlgebraElement) -> f64 {
    let guv = christoffel(u, v);
    metric_inner(&guv, &guv) - metric_inner(&christoffel(u, u), &christoffel(v, v))
}

/// `⟨R(u,v)v, u⟩`.
pub fn sectional_nonnormalized_tensor(u: &AlgebraElement, v: &AlgebraElement) -> f64 {
    metric_inner(&curvature_rvv(u, v), u)
}

/// Sectional curvature of the system without vorticity,
/// `⟨Γ⁰(ũ,ṽ),Γ⁰(ũ,ṽ)⟩ - ⟨Γ⁰(ũ,ũ),Γ⁰(ṽ,ṽ)⟩` in the reduced metric.
pub fn s_2ch(u: &ReducedElement, v: &ReducedElement) -> f64 {
    let guv = christoffel0(u, v);
    reduced_inner(&guv, &guv) - reduced_inner(&christoffel0(u, u), &christoffel0(v, v))
}

/// Vorticity corrections with `S(u,v) = S_2CH(ũ,ṽ) + J₁ + J₂ + J₃`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrectionTerms {
    pub j1: f64,
    pub j2: f64,
    pub j3: f64,
}

impl CorrectionTerms {
    pub fn sum(&self) -> f64 {
        self.j1 + self.j2 + self.j3
    }
}

pub fn correction_terms_j(u: &AlgebraElement, v: &AlgebraElement) -> CorrectionTerms {
    let (u1, u2, u3) = (&u.u1, &u.u2, u.u3);
    let (v1, v2, v3) = (&v.u1, &v.u2, v.u3);
    let u1x = u1.differentiate();
    let v1x = v1.differentiate();
    let au1 = u1.helmholtz();
    let ur: ReducedElement = u.into();
    let vr: ReducedElement = v.into();

    let w = u1.scale(v3) + v1.scale(u3);
    let a1w = w.helmholtz_inverse_dx();
    let a2w = w.helmholtz_inverse_dxx();
    let g_vu = christoffel0(&vr, &ur).u1.differentiate();
    let j1 = -0.5 * (&w * &g_vu).integrate() + 0.5 * (&(&au1 * v1) * &a2w).integrate()
        - 0.25 * u3 * (v1 * &a2w).integrate()
        + 0.25 * (&(u2 * v2) * &a2w).integrate()
        - 0.5 * (&u1x * &(v1 * &a1w + (&v1x * &a2w).scale(0.5) - a1w.scale(0.5 * v3))).integrate()
        + 0.5 * (&u1x * &(&u1x * v1).scale(v3) + &(&u1x * v1) * &v1x.scale(u3)).integrate();

    let z = v1.scale(v3);
    let a1z = z.helmholtz_inverse_dx();
    let a2z = z.helmholtz_inverse_dxx();
    let g_vv = christoffel0(&vr, &vr).u1.differentiate();
    let j2 = u3 * (u1 * &g_vv).integrate() + 0.5 * u3 * (u1 * &a2z).integrate()
        - 0.5 * u3 * (&u1x * &a1z).integrate();

    let j3 = (&u1x * &(u1 * &a1z + (&u1x * &a2z).scale(0.5))).integrate()
        - 0.5 * (&(u2 * u2) * &a2z).integrate()
        - (&(&au1 * u1) * &a2z).integrate()
        - v3 * (&(u1 * &u1x) * &v1x).integrate();

    CorrectionTerms { j1, j2, j3 }
}

/// The five-integral closed form of `J₁ + J₂ + J₃`:
///
/// ```text
/// -∫∂ₓq A⁻¹∂ₓw + ¼∫∂ₓw A⁻¹∂ₓw + ∫∂ₓqᵤ A⁻¹∂ₓ(v₁v₃) + ∫∂ₓqᵥ A⁻¹∂ₓ(u₁u₃)
///   - ∫∂ₓ(u₁u₃) A⁻¹∂ₓ(v₁v₃)
/// ```
///
/// with `w = u₃v₁ + u₁v₃`, `q = u₁v₁ + ½u₁ₓv₁ₓ + ½u₂v₂` and `qᵤ`, `qᵥ` the
/// corresponding quadratic forms.
pub fn correction_closed_form(u: &AlgebraElement, v: &AlgebraElement) -> f64 {
    let q = |a: &AlgebraElement, b: &AlgebraElement| {
        &a.u1 * &b.u1
            + (&a.u1.differentiate() * &b.u1.differentiate()).scale(0.5)
            + (&a.u2 * &b.u2).scale(0.5)
    };
    let w = v.u1.scale(u.u3) + u.u1.scale(v.u3);
    let zu = u.u1.scale(u.u3);
    let zv = v.u1.scale(v.u3);
    let a1w = w.helmholtz_inverse_dx();
    let a1zu = zu.helmholtz_inverse_dx();
    let a1zv = zv.helmholtz_inverse_dx();
    -(q(u, v).differentiate() * &a1w).integrate()
        + 0.25 * (w.differentiate() * &a1w).integrate()
        + (q(u, u).differentiate() * &a1zv).integrate()
        + (q(v, v).differentiate() * &a1zu).integrate()
        - (zu.differentiate() * &a1zv).integrate()
}

/// Gram entries `(⟨u,u⟩, ⟨v,v⟩, ⟨u,v⟩)`.
pub fn gram(u: &AlgebraElement, v: &AlgebraElement) -> (f64, f64, f64) {
    (metric_inner(u, u), metric_inner(v, v), metric_inner(u, v))
}

fn normalize(s: f64, uu: f64, vv: f64, uv: f64) -> Result<f64, MetricError> {
    let det = uu * vv - uv * uv;
    let threshold = DEGENERATE_PLANE_TOL * uu * vv;
    if det.is_nan() || det <= threshold {
        return Err(MetricError::DegeneratePlane { det, threshold });
    }
    Ok(s / det)
}

/// `K(u,v) = S(u,v) / (⟨u,u⟩⟨v,v⟩ - ⟨u,v⟩²)`.
pub fn sectional_normalized(u: &AlgebraElement, v: &AlgebraElement) -> Result<f64, MetricError> {
    let (uu, vv, uv) = gram(u, v);
    normalize(sectional_nonnormalized_gamma(u, v), uu, vv, uv)
}

/// Every curvature quantity of a plane at the identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    #[serde(rename = "S_gamma")]
    pub s_gamma: f64,
    #[serde(rename = "S_tensor")]
    pub s_tensor: f64,
    #[serde(rename = "S_2ch")]
    pub s_2ch: f64,
    #[serde(rename = "J1")]
    pub j1: f64,
    #[serde(rename = "J2")]
    pub j2: f64,
    #[serde(rename = "J3")]
    pub j3: f64,
    pub gram_uu: f64,
    pub gram_vv: f64,
    pub gram_uv: f64,
    /// `None` when the plane is degenerate.
    #[serde(rename = "K")]
    pub k: Option<f64>,
}

impl CurvatureReport {
    pub fn compute(u: &AlgebraElement, v: &AlgebraElement) -> Self {
        let s_gamma = sectional_nonnormalized_gamma(u, v);
        let j = correction_terms_j(u, v);
        let (gram_uu, gram_vv, gram_uv) = gram(u, v);
        CurvatureReport {
            s_gamma,
            s_tensor: sectional_nonnormalized_tensor(u, v),
            s_2ch: s_2ch(&u.into(), &v.into()),
            j1: j.j1,
            j2: j.j2,
            j3: j.j3,
            gram_uu,
            gram_vv,
            gram_uv,
            k: normalize(s_gamma, gram_uu, gram_vv, gram_uv).ok(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::trapezoid;
    use crate::test_support::{algebra_element, approx_rel};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const TAU: f64 = 2.0 * PI;

    fn cos_family(k1: usize, k2: usize, alpha: f64) -> AlgebraElement {
        AlgebraElement::new(
            TrigPoly::cos_mode(k1, 1.0),
            TrigPoly::cos_mode(k2, 1.0),
            alpha,
        )
    }

    #[test]
    fn inertia_examples() {
        let z = inertia_apply(&AlgebraElement::zero());
        assert!(z.m1.is_zero() && z.m2.is_zero() && z.m3 == 0.0);

        let m = inertia_apply(&AlgebraElement::new(
            TrigPoly::constant(1.0),
            TrigPoly::zero(),
            0.0,
        ));
        assert_eq!((m.m1.clone(), m.m3), (TrigPoly::constant(1.0), -0.5));

        let u = AlgebraElement::new(TrigPoly::cos_mode(1, 1.0), TrigPoly::sin_mode(1, 1.0), 2.0);
        let m = inertia_apply(&u);
        let want = TrigPoly::new(-1.0, vec![1.0 + TAU * TAU], vec![]).unwrap();
        assert!(m.m1.max_coeff_diff(&want) < 1e-13);
        assert_eq!(m.m2, TrigPoly::sin_mode(1, 1.0));
        assert_eq!(m.m3, 1.0);
    }

    #[test]
    fn momentum_components_recover_source() {
        let u = AlgebraElement::new(
            TrigPoly::new(0.4, vec![1.0, -0.3], vec![0.2]).unwrap(),
            TrigPoly::cos_mode(2, 0.7),
            -1.3,
        );
        let m = inertia_apply(&u);
        let back = Momentum::from_components(m.m1.clone(), m.m2.clone(), m.m3);
        assert!(back.source.max_coeff_diff(&u) < 1e-14);
    }

    #[test]
    fn metric_examples() {
        for (k1, k2, alpha) in [(1, 2, 0.5), (3, 1, 7.0)] {
            let u = cos_family(k1, k2, alpha);
            let k = TAU * k1 as f64;
            assert!(approx_rel(
                metric_inner(&u, &u),
                1.0 + 0.5 * (k * k + alpha * alpha),
                1e-12
            ));
        }
        let u = cos_family(1, 2, 3.0);
        let v = cos_family(3, 4, 1.0);
        assert!(approx_rel(metric_inner(&u, &v), 1.5, 1e-12));
        let e3 = AlgebraElement::new(TrigPoly::zero(), TrigPoly::zero(), 1.0);
        assert_eq!(metric_inner(&e3, &e3), 0.5);
    }

    #[test]
    fn christoffel0_examples() {
        let c = ReducedElement::new(TrigPoly::constant(2.0), TrigPoly::zero());
        let g = christoffel0(&c, &c);
        assert!(g.u1.is_zero() && g.u2.is_zero());

        // cos² = ½ + ½cos(4πx), sin² = ½ - ½cos(4πx); A⁻¹∂ₓcos(ξx) = -ξ sin(ξx)/(1+ξ²)
        let u = ReducedElement::new(TrigPoly::cos_mode(1, 1.0), TrigPoly::zero());
        let g = christoffel0(&u, &u);
        let xi = 2.0 * TAU;
        let amp = 0.5 - 0.25 * TAU * TAU;
        let want = TrigPoly::sin_mode(2, amp * xi / (1.0 + xi * xi));
        assert!(g.u1.max_coeff_diff(&want) < 1e-13);
        assert!(g.u2.is_zero());
    }

    #[test]
    fn christoffel_examples() {
        let a = AlgebraElement::new(TrigPoly::zero(), TrigPoly::zero(), 3.0);
        assert_eq!(christoffel(&a, &a), AlgebraElement::zero());

        let u = AlgebraElement::new(TrigPoly::cos_mode(1, 1.0), TrigPoly::zero(), 0.0);
        let v = AlgebraElement::new(TrigPoly::zero(), TrigPoly::zero(), 1.0);
        let g = christoffel(&u, &v);
        let want = TrigPoly::sin_mode(1, -PI / (1.0 + TAU * TAU));
        assert!(g.u1.max_coeff_diff(&want) < 1e-15);
        assert!(g.u2.is_zero() && g.u3 == 0.0);
    }

    #[test]
    fn sectional_examples() {
        let u = cos_family(1, 2, 1.5);
        assert_eq!(sectional_nonnormalized_gamma(&u, &u), 0.0);
        assert!(sectional_nonnormalized_tensor(&u, &u).abs() < 1e-9);

        let m = 2.0 * TAU;
        let u = cos_family(1, 2, 6.0 * m * m);
        let v = cos_family(2, 3, 1.0);
        assert!(sectional_nonnormalized_gamma(&u, &v) > 0.0);

        let u = AlgebraElement::new(TrigPoly::cos_mode(1, 1.0), TrigPoly::zero(), 0.0);
        let v = AlgebraElement::new(TrigPoly::cos_mode(2, 1.0), TrigPoly::zero(), 0.0);
        let s2 = s_2ch(&(&u).into(), &(&v).into());
        assert!(approx_rel(sectional_nonnormalized_gamma(&u, &v), s2, 1e-14));
        assert!(approx_rel(
            sectional_nonnormalized_tensor(&u, &v),
            s2,
            1e-10
        ));
    }

    #[test]
    fn normalized_examples() {
        let u = cos_family(1, 2, 3.0);
        assert!(matches!(
            sectional_normalized(&u, &u),
            Err(MetricError::DegeneratePlane { .. })
        ));
        let v = cos_family(3, 4, 1.0);
        let k = sectional_normalized(&u, &v).unwrap();
        let k2 = sectional_normalized(&u.scale(2.0), &v).unwrap();
        assert!(approx_rel(k, k2, 1e-10));
    }

    #[test]
    fn vorticity_free_planes_have_no_corrections() {
        let u = AlgebraElement::new(TrigPoly::cos_mode(1, 1.0), TrigPoly::sin_mode(2, 0.5), 0.0);
        let v = AlgebraElement::new(TrigPoly::cos_mode(3, 1.0), TrigPoly::cos_mode(1, 0.5), 0.0);
        let j = correction_terms_j(&u, &v);
        assert_eq!((j.j1, j.j2, j.j3), (0.0, 0.0, 0.0));
        let r = CurvatureReport::compute(&u, &v);
        assert!(approx_rel(r.s_gamma, r.s_2ch, 1e-13));
    }

    /// Collocation route: products and powers formed pointwise on a grid,
    /// operators applied after projecting back.
    struct Grid {
        m: usize,
    }

    impl Grid {
        fn s(&self, f: &TrigPoly) -> Vec<f64> {
            f.sample(self.m)
        }
        fn poly(&self, v: &[f64]) -> TrigPoly {
            TrigPoly::from_samples(v, self.m / 2 - 1).unwrap()
        }
        fn op(&self, v: &[f64], f: impl Fn(&TrigPoly) -> TrigPoly) -> Vec<f64> {
            self.s(&f(&self.poly(v)))
        }
        fn int(v: &[f64]) -> f64 {
            trapezoid(v)
        }
    }

    #[test]
    fn j_terms_match_quadrature_oracle() {
        let u = AlgebraElement::new(TrigPoly::cos_mode(1, 1.0), TrigPoly::zero(), 2.0);
        let v = AlgebraElement::new(TrigPoly::cos_mode(2, 1.0), TrigPoly::zero(), 1.0);
        let g = Grid { m: 4096 };
        let (u1, v1) = (g.s(&u.u1), g.s(&v.u1));
        let u1x = g.s(&u.u1.differentiate());
        let v1x = g.s(&v.u1.differentiate());
        let au1 = g.s(&u.u1.helmholtz());
        let w: Vec<f64> = (0..g.m).map(|j| u1[j] * v.u3 + u.u3 * v1[j]).collect();
        let a1w = g.op(&w, TrigPoly::helmholtz_inverse_dx);
        let a2w = g.op(&w, TrigPoly::helmholtz_inverse_dxx);
        let q: Vec<f64> = (0..g.m)
            .map(|j| v1[j] * u1[j] + 0.5 * v1x[j] * u1x[j])
            .collect();
        let g01x = g.op(&q, |p| -p.helmholtz_inverse_dx().differentiate());
        let mut terms = vec![0.0; g.m];
        for j in 0..g.m {
            terms[j] = -0.5 * w[j] * g01x[j] + 0.5 * au1[j] * v1[j] * a2w[j]
                - 0.25 * u.u3 * v1[j] * a2w[j]
                - 0.5 * u1x[j] * (v1[j] * a1w[j] + 0.5 * v1x[j] * a2w[j] - 0.5 * v.u3 * a1w[j])
                + 0.5 * u1x[j] * (u1x[j] * v1[j] * v.u3 + v1[j] * v1x[j] * u.u3);
        }
        let j1 = Grid::int(&terms);

        let z: Vec<f64> = v1.iter().map(|x| x * v.u3).collect();
        let a1z = g.op(&z, TrigPoly::helmholtz_inverse_dx);
        let a2z = g.op(&z, TrigPoly::helmholtz_inverse_dxx);
        let qv: Vec<f64> = (0..g.m)
            .map(|j| v1[j] * v1[j] + 0.5 * v1x[j] * v1x[j])
            .collect();
        let gvvx = g.op(&qv, |p| -p.helmholtz_inverse_dx().differentiate());
        let j2 = u.u3
            * Grid::int(
                &(0..g.m)
                    .map(|j| u1[j] * gvvx[j] + 0.5 * u1[j] * a2z[j] - 0.5 * u1x[j] * a1z[j])
                    .collect::<Vec<_>>(),
            );
        let j3 = Grid::int(
            &(0..g.m)
                .map(|j| {
                    u1x[j] * (u1[j] * a1z[j] + 0.5 * u1x[j] * a2z[j])
                        - au1[j] * u1[j] * a2z[j]
                        - v.u3 * u1[j] * u1x[j] * v1x[j]
                })
                .collect::<Vec<_>>(),
        );

        let got = correction_terms_j(&u, &v);
        for (a, b) in [(got.j1, j1), (got.j2, j2), (got.j3, j3)] {
            assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn j_sum_matches_closed_form_for_equal_arguments() {
        let u = AlgebraElement::new(TrigPoly::cos_mode(1, 1.0), TrigPoly::cos_mode(2, 1.0), 1.0);
        let j = correction_terms_j(&u, &u);
        assert!((j.sum() - correction_closed_form(&u, &u)).abs() < 1e-9);
    }

    #[test]
    fn christoffel_at_identity_is_christoffel() {
        let x = GroupVelocity {
            phi_t: TrigPoly::cos_mode(1, 1.0),
            f_t: TrigPoly::sin_mode(1, 0.3),
            s_t: 0.5,
        };
        let g = christoffel_at(&GroupElement::identity(), &x, &x).unwrap();
        let u = AlgebraElement::new(x.phi_t.clone(), x.f_t.clone(), x.s_t);
        let want = christoffel(&u, &u);
        assert_eq!((g.phi_t, g.f_t, g.s_t), (want.u1, want.u2, 0.0));
    }

    #[test]
    fn metric_equals_l2_pairing_of_momentum() {
        let u = AlgebraElement::new(TrigPoly::cos_mode(2, 1.0), TrigPoly::sin_mode(1, 0.5), 1.5);
        let v = AlgebraElement::new(
            TrigPoly::new(0.3, vec![0.2], vec![0.1]).unwrap(),
            TrigPoly::constant(1.0),
            -0.5,
        );
        let pairing = crate::algebra::l2_pairing(&inertia_apply(&u), &v);
        assert!((pairing - metric_inner(&u, &v)).abs() < 1e-12);
    }

    #[test]
    fn norm_equivalence_constants_are_attained() {
        let (lo, hi) = NORM_EQUIVALENCE;
        assert!(approx_rel(lo, (3.0 - 5f64.sqrt()) / 4.0, 1e-15));
        assert!(approx_rel(hi, (3.0 + 5f64.sqrt()) / 4.0, 1e-15));
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        for (u3, expected) in [(golden, lo), (1.0 - golden, hi)] {
            let u = AlgebraElement::new(TrigPoly::constant(1.0), TrigPoly::zero(), u3);
            let ratio = metric_inner(&u, &u) / (1.0 + u3 * u3);
            assert!(approx_rel(ratio, expected, 1e-14), "{ratio} vs {expected}");
        }
        // below the commonly quoted factor 1/4
        assert!(lo < 0.25);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn metric_is_positive_and_equivalent_to_hilbert_norm(u in algebra_element(4, 5.0)) {
            let norm = u.u1.l2_norm().powi(2)
                + u.u1.differentiate().l2_norm().powi(2)
                + u.u2.l2_norm().powi(2)
                + u.u3 * u.u3;
            prop_assume!(norm > 1e-12);
            let g = metric_inner(&u, &u);
            prop_assert!(g > 0.0);
            let (lo, hi) = NORM_EQUIVALENCE;
            prop_assert!(g >= lo * norm * (1.0 - 1e-12) && g <= hi * norm * (1.0 + 1e-12), "{} vs {}", g, norm);
        }

        #[test]
        fn metric_is_symmetric(u in algebra_element(4, 5.0), v in algebra_element(4, 5.0)) {
            prop_assert!(approx_rel(metric_inner(&u, &v), metric_inner(&v, &u), 1e-12));
        }

        #[test]
        fn christoffel_is_symmetric(u in algebra_element(6, 5.0), v in algebra_element(6, 5.0)) {
            let a = christoffel(&u, &v);
            let b = christoffel(&v, &u);
            prop_assert!(a.max_coeff_diff(&b) <= 1e-12 * (1.0 + a.max_abs_coeff()));
        }

        #[test]
        fn curvature_routes_agree(u in algebra_element(4, 5.0), v in algebra_element(4, 5.0)) {
            let sg = sectional_nonnormalized_gamma(&u, &v);
            let st = sectional_nonnormalized_tensor(&u, &v);
            prop_assert!((st - sg).abs() <= 1e-8 * (1.0 + sg.abs()), "{} vs {}", st, sg);
        }

        #[test]
        fn sectional_is_symmetric(u in algebra_element(4, 5.0), v in algebra_element(4, 5.0)) {
            let a = sectional_nonnormalized_gamma(&u, &v);
            let b = sectional_nonnormalized_gamma(&v, &u);
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
        }

        #[test]
        fn j_identity(u in algebra_element(4, 5.0), v in algebra_element(4, 5.0)) {
            let j = correction_terms_j(&u, &v).sum();
            let c = correction_closed_form(&u, &v);
            prop_assert!((j - c).abs() <= 1e-9 * (1.0 + c.abs()), "{} vs {}", j, c);
        }

        #[test]
        fn corrections_split_the_curvature(u in algebra_element(4, 5.0), v in algebra_element(4, 5.0)) {
            let s = sectional_nonnormalized_gamma(&u, &v);
            let split = s_2ch(&(&u).into(), &(&v).into()) + correction_terms_j(&u, &v).sum();
            prop_assert!((s - split).abs() <= 1e-9 * (1.0 + s.abs()));
        }
    }
}
