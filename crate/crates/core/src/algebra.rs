//! The group `(Diff(S) ⋉ C∞(S)) × R` and its Lie algebra.
//!
//! Group elements are triples `(φ, f, s)` with `φ(x) = x + p(x)` an
//! orientation-preserving circle diffeomorphism, `f` a periodic function and
//! `s` a real number. The product is
//!
//! ```text
//! (φ₁, f₁, s₁) * (φ₂, f₂, s₂) = (φ₁∘φ₂, f₂ + f₁∘φ₂, s₁ + s₂)
//! ```
//!
//! Compositions with `φ` or `φ⁻¹` leave the space of trigonometric
//! polynomials, so they are sampled on an oversampled uniform grid and
//! projected back by discrete orthogonality.

use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::Momentum;
use crate::spectral::{uniform_grid, SpectralError, TrigPoly, DEFAULT_DEGREE_CAP};

/// Floor for the degree of projected compositions.
pub const DEFAULT_PROJECTION_DEGREE: usize = 64;

/// Trailing modes below this fraction of the largest coefficient are
/// roundoff from the discrete projection and are dropped.
const PROJECTION_CHOP: f64 = 1e-15;

/// Minimum number of grid points used for the monotonicity check.
const MONOTONE_CHECK_POINTS: usize = 1024;

const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX_ITER: usize = 100;
/// Below this slope Newton steps are replaced by bisection.
const NEWTON_MIN_SLOPE: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("map is not orientation preserving: min φₓ = {min_slope:.3e}")]
    NotMonotone { min_slope: f64 },
    #[error("projection degree {degree} exceeds the cap {cap}")]
    DegreeCap { degree: usize, cap: usize },
    #[error("Newton inversion of φ did not converge at x = {x}")]
    NewtonNonConvergence { x: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Orientation-preserving diffeomorphism `φ(x) = x + p(x)` with `p` periodic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrigPoly", into = "TrigPoly")]
pub struct Diffeo {
    displacement: TrigPoly,
}

impl TryFrom<TrigPoly> for Diffeo {
    type Error = AlgebraError;
    fn try_from(p: TrigPoly) -> Result<Self, AlgebraError> {
        Diffeo::new(p)
    }
}

impl From<Diffeo> for TrigPoly {
    fn from(d: Diffeo) -> TrigPoly {
        d.displacement
    }
}

impl Diffeo {
    pub fn identity() -> Self {
        Diffeo {
            displacement: TrigPoly::zero(),
        }
    }

    /// Fails unless `1 + pₓ > 0` on a fine grid.
    pub fn new(displacement: TrigPoly) -> Result<Self, AlgebraError> {
        let m = MONOTONE_CHECK_POINTS.max(16 * displacement.degree());
        let min_slope = displacement
            .differentiate()
            .sample(m)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
            + 1.0;
        if min_slope <= 0.0 {
            return Err(AlgebraError::NotMonotone { min_slope });
        }
        Ok(Diffeo { displacement })
    }

    pub fn displacement(&self) -> &TrigPoly {
        &self.displacement
    }

    pub fn is_identity(&self) -> bool {
        self.displacement.is_zero()
    }

    pub fn eval(&self, x: f64) -> f64 {
        x + self.displacement.eval(x)
    }

    /// `φₓ = 1 + pₓ`.
    pub fn derivative(&self) -> TrigPoly {
        &TrigPoly::constant(1.0) + &self.displacement.differentiate()
    }

    /// Solves `φ(y) = x` by Newton's method safeguarded with bisection.
    pub fn inverse_at(&self, x: f64) -> Result<f64, AlgebraError> {
        InverseSolver::new(self).solve(x)
    }

    /// `φ⁻¹(j/m)` for `j = 0..m`.
    pub fn inverse_samples(&self, m: usize) -> Result<Vec<f64>, AlgebraError> {
        let solver = InverseSolver::new(self);
        uniform_grid(m)
            .into_iter()
            .map(|x| solver.solve(x))
            .collect()
    }

    /// `φ⁻¹`, projected to `out_degree`.
    pub fn inverse(&self, out_degree: usize) -> Result<Diffeo, AlgebraError> {
        if self.is_identity() {
            return Ok(Diffeo::identity());
        }
        check_cap(out_degree)?;
        let m = sample_count(out_degree, self.displacement.degree());
        let grid = uniform_grid(m);
        let values: Vec<f64> = self
            .inverse_samples(m)?
            .into_iter()
            .zip(&grid)
            .map(|(y, x)| y - x)
            .collect();
        Diffeo::new(project_samples(&values, out_degree)?)
    }

    /// `self ∘ other`, projected to `out_degree`.
    pub fn compose(&self, other: &Diffeo, out_degree: usize) -> Result<Diffeo, AlgebraError> {
        // (φ₁∘φ₂)(x) = x + p₂(x) + p₁(φ₂(x))
        let inner = compose_with_diffeo(&self.displacement, other, out_degree)?;
        Diffeo::new(&other.displacement + &inner)
    }
}

struct InverseSolver<'a> {
    p: &'a TrigPoly,
    dp: TrigPoly,
    bound: f64,
}

impl<'a> InverseSolver<'a> {
    fn new(phi: &'a Diffeo) -> Self {
        let p = &phi.displacement;
        let bound = p
            .cos_coeffs()
            .iter()
            .chain(p.sin_coeffs())
            .fold(p.mean().abs(), |acc, v| acc + v.abs());
        InverseSolver {
            p,
            dp: p.differentiate(),
            bound,
        }
    }

    fn solve(&self, x: f64) -> Result<f64, AlgebraError> {
        // φ(y) - y = p(y) is bounded, so the root lies within `bound` of x.
        let mut lo = x - self.bound - 1e-12;
        let mut hi = x + self.bound + 1e-12;
        let mut y = x;
        for _ in 0..NEWTON_MAX_ITER {
            let r = y + self.p.eval(y) - x;
            if r.abs() <= NEWTON_TOL {
                return Ok(y);
            }
            if r > 0.0 {
                hi = y;
            } else {
                lo = y;
            }
            if hi - lo <= 4.0 * f64::EPSILON * (1.0 + x.abs()) {
                return Ok(0.5 * (lo + hi));
            }
            let slope = 1.0 + self.dp.eval(y);
            let step = y - r / slope;
            y = if slope.abs() < NEWTON_MIN_SLOPE || !(step > lo && step < hi) {
                0.5 * (lo + hi)
            } else {
                step
            };
        }
        Err(AlgebraError::NewtonNonConvergence { x })
    }
}

/// Projects uniform samples onto degree `degree`, dropping roundoff-level
/// trailing modes.
pub fn project_samples(values: &[f64], degree: usize) -> Result<TrigPoly, AlgebraError> {
    Ok(TrigPoly::from_samples(values, degree)?.chop(PROJECTION_CHOP))
}

fn check_cap(degree: usize) -> Result<(), AlgebraError> {
    if degree > DEFAULT_DEGREE_CAP {
        return Err(AlgebraError::DegreeCap {
            degree,
            cap: DEFAULT_DEGREE_CAP,
        });
    }
    Ok(())
}

fn sample_count(out_degree: usize, input_degree: usize) -> usize {
    (4 * (out_degree + input_degree))
        .max(2 * out_degree + 1)
        .max(16)
}

/// Projection degree used by the group operations for inputs of the given
/// degrees.
pub fn projection_degree(degrees: &[usize]) -> Result<usize, AlgebraError> {
    let total: usize = degrees.iter().sum();
    let d = DEFAULT_PROJECTION_DEGREE.max(2 * total);
    check_cap(d)?;
    Ok(d)
}

/// `h∘φ` projected onto degree `out_degree` from
/// `4·(out_degree + deg h)` uniform samples.
pub fn compose_with_diffeo(
    h: &TrigPoly,
    phi: &Diffeo,
    out_degree: usize,
) -> Result<TrigPoly, AlgebraError> {
    if phi.is_identity() || h.degree() == 0 {
        return Ok(h.truncate(out_degree));
    }
    check_cap(out_degree)?;
    let m = sample_count(out_degree, h.degree());
    let p = phi.displacement.sample(m);
    let values: Vec<f64> = uniform_grid(m)
        .into_iter()
        .zip(p)
        .map(|(x, px)| h.eval(x + px))
        .collect();
    project_samples(&values, out_degree)
}

/// `h∘φ⁻¹` projected onto degree `out_degree`.
pub fn compose_with_inverse(
    h: &TrigPoly,
    phi: &Diffeo,
    out_degree: usize,
) -> Result<TrigPoly, AlgebraError> {
    if phi.is_identity() || h.degree() == 0 {
        return Ok(h.truncate(out_degree));
    }
    check_cap(out_degree)?;
    let m = sample_count(out_degree, h.degree() + phi.displacement.degree());
    let values: Vec<f64> = phi
        .inverse_samples(m)?
        .into_iter()
        .map(|y| h.eval(y))
        .collect();
    project_samples(&values, out_degree)
}

/// Element `(φ, f, s)` of the group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub phi: Diffeo,
    pub f: TrigPoly,
    pub s: f64,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement {
            phi: Diffeo::identity(),
            f: TrigPoly::zero(),
            s: 0.0,
        }
    }

    pub fn new(phi: Diffeo, f: TrigPoly, s: f64) -> Self {
        GroupElement { phi, f, s }
    }

    fn degree(&self) -> usize {
        self.phi.displacement.degree().max(self.f.degree())
    }

    /// `self * rhs = (φ₁∘φ₂, f₂ + f₁∘φ₂, s₁ + s₂)`.
    pub fn product(&self, rhs: &GroupElement) -> Result<GroupElement, AlgebraError> {
        let d = projection_degree(&[self.degree(), rhs.degree()])?;
        let phi = self.phi.compose(&rhs.phi, d)?;
        let f = &rhs.f + &compose_with_diffeo(&self.f, &rhs.phi, d)?;
        Ok(GroupElement {
            phi,
            f,
            s: self.s + rhs.s,
        })
    }

    /// `(φ⁻¹, -f∘φ⁻¹, -s)`.
    pub fn inverse(&self) -> Result<GroupElement, AlgebraError> {
        if self.phi.is_identity() {
            return Ok(GroupElement {
                phi: Diffeo::identity(),
                f: -&self.f,
                s: -self.s,
            });
        }
        let d = projection_degree(&[self.degree()])?;
        let m = sample_count(d, self.degree());
        let grid = uniform_grid(m);
        let ys = self.phi.inverse_samples(m)?;
        let q: Vec<f64> = ys.iter().zip(&grid).map(|(y, x)| y - x).collect();
        let g: Vec<f64> = ys.iter().map(|&y| -self.f.eval(y)).collect();
        Ok(GroupElement {
            phi: Diffeo::new(project_samples(&q, d)?)?,
            f: project_samples(&g, d)?,
            s: -self.s,
        })
    }
}

/// Element `(u₁, u₂, u₃)` of the Lie algebra: velocity, density, vorticity.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AlgebraElement {
    pub u1: TrigPoly,
    pub u2: TrigPoly,
    pub u3: f64,
}

impl AlgebraElement {
    pub fn new(u1: TrigPoly, u2: TrigPoly, u3: f64) -> Self {
        AlgebraElement { u1, u2, u3 }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scale(&self, c: f64) -> Self {
        AlgebraElement::new(self.u1.scale(c), self.u2.scale(c), c * self.u3)
    }

    pub fn degree(&self) -> usize {
        self.u1.degree().max(self.u2.degree())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.u1
            .max_abs_coeff()
            .max(self.u2.max_abs_coeff())
            .max(self.u3.abs())
    }

    pub fn max_coeff_diff(&self, other: &AlgebraElement) -> f64 {
        self.u1
            .max_coeff_diff(&other.u1)
            .max(self.u2.max_coeff_diff(&other.u2))
            .max((self.u3 - other.u3).abs())
    }

    pub fn truncate(&self, n: usize) -> Self {
        AlgebraElement::new(self.u1.truncate(n), self.u2.truncate(n), self.u3)
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::new(&self.u1 + &rhs.u1, &self.u2 + &rhs.u2, self.u3 + rhs.u3)
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::new(&self.u1 - &rhs.u1, &self.u2 - &rhs.u2, self.u3 - rhs.u3)
    }
}

/// Tangent vector `(φₜ, fₜ, sₜ)` at a group element, in the trivialization
/// `TG ≅ G × (C∞ × C∞ × R)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GroupVelocity {
    pub phi_t: TrigPoly,
    pub f_t: TrigPoly,
    pub s_t: f64,
}

/// `Ad_g V = ((v₁φₓ)∘φ⁻¹, (v₂ + fₓv₁)∘φ⁻¹, v₃)`.
pub fn adjoint_action(
    g: &GroupElement,
    v: &AlgebraElement,
) -> Result<AlgebraElement, AlgebraError> {
    let first = &v.u1 * &g.phi.derivative();
    let second = &v.u2 + &(&g.f.differentiate() * &v.u1);
    if g.phi.is_identity() {
        return Ok(AlgebraElement::new(first, second, v.u3));
    }
    let d = projection_degree(&[g.degree(), v.degree()])?;
    Ok(AlgebraElement::new(
        compose_with_inverse(&first, &g.phi, d)?,
        compose_with_inverse(&second, &g.phi, d)?,
        v.u3,
    ))
}

/// Lie bracket `ad_U V = (u₁ₓv₁ - v₁ₓu₁, u₂ₓv₁ - v₂ₓu₁, 0)`.
pub fn bracket(u: &AlgebraElement, v: &AlgebraElement) -> AlgebraElement {
    let u1x = u.u1.differentiate();
    let v1x = v.u1.differentiate();
    let first = &u1x * &v.u1 - &v1x * &u.u1;
    let second = &u.u2.differentiate() * &v.u1 - &v.u2.differentiate() * &u.u1;
    AlgebraElement::new(first, second, 0.0)
}

/// Metric adjoint of the bracket: `⟨ad*_U V, W⟩_𝔸 = ⟨V, ad_U W⟩_𝔸`.
///
/// With `U = (u₁, ρ₁, α₁)`, `V = (u₂, ρ₂, α₂)` and
/// `I = ∫(u₁ₓAu₂ + ρ₁ₓρ₂)`:
///
/// ```text
/// ũ = A⁻¹(2u₁ₓAu₂ + u₁Au₂ₓ - α₂u₁ₓ + ρ₁ₓρ₂) + I
/// ρ̃ = (u₁ρ₂)ₓ
/// α̃ = 2I
/// ```
pub fn ad_star(u: &AlgebraElement, v: &AlgebraElement) -> AlgebraElement {
    let u1x = u.u1.differentiate();
    let m2 = v.u1.helmholtz();
    let rho1x = u.u2.differentiate();
    let integral = (&u1x * &m2).integrate() + (&rho1x * &v.u2).integrate();

    let inner =
        (&u1x * &m2).scale(2.0) + &u.u1 * &m2.differentiate() - u1x.scale(v.u3) + &rho1x * &v.u2;
    let first = &inner.helmholtz_inverse() + &TrigPoly::constant(integral);
    let second = (&u.u1 * &v.u2).differentiate();
    AlgebraElement::new(first, second, 2.0 * integral)
}

/// L² pairing of a momentum with an algebra element:
/// `∫m₁v₁ + ∫m₂v₂ + m₃v₃`.
pub fn l2_pairing(mu: &Momentum, v: &AlgebraElement) -> f64 {
    mu.m1.l2_inner(&v.u1) + mu.m2.l2_inner(&v.u2) + mu.m3 * v.u3
}

/// Coadjoint action dual to [`adjoint_action`] under the L² pairing:
/// `⟨Ad*_g μ, V⟩ = ⟨μ, Ad_g V⟩`.
///
/// With `μ = (m - α/2, ρ, μ₃)`, `m = Au`:
///
/// ```text
/// μ₀ = ([(m∘φ) - α/2]φₓ² + (ρ∘φ)fₓφₓ, (ρ∘φ)φₓ, μ₃)
/// ```
pub fn coadjoint_ad_star(g: &GroupElement, mu: &Momentum) -> Result<Momentum, AlgebraError> {
    let phix = g.phi.derivative();
    let fx = g.f.differentiate();
    let (m1_phi, m2_phi) = if g.phi.is_identity() {
        (mu.m1.clone(), mu.m2.clone())
    } else {
        let d = projection_degree(&[g.degree(), mu.m1.degree().max(mu.m2.degree())])?;
        (
            compose_with_diffeo(&mu.m1, &g.phi, d)?,
            compose_with_diffeo(&mu.m2, &g.phi, d)?,
        )
    };
    let rho_phix = &m2_phi * &phix;
    let first = &(&m1_phi * &phix) * &phix + &rho_phix * &fx;
    Ok(Momentum::from_components(first, rho_phix, mu.m3))
}

/// Adjoint of `Ad_g` with respect to the metric: `𝔸⁻¹ Ad*_g 𝔸`.
pub fn metric_adjoint_ad(
    g: &GroupElement,
    u: &AlgebraElement,
) -> Result<AlgebraElement, AlgebraError> {
    let mu = coadjoint_ad_star(g, &Momentum::from_velocity(u))?;
    Ok(mu.source)
}

/// Right-trivialized velocity `(φₜ∘φ⁻¹, fₜ∘φ⁻¹, sₜ)`.
pub fn eulerian_velocity(
    g: &GroupElement,
    gdot: &GroupVelocity,
) -> Result<AlgebraElement, AlgebraError> {
    if g.phi.is_identity() {
        return Ok(AlgebraElement::new(
            gdot.phi_t.clone(),
            gdot.f_t.clone(),
            gdot.s_t,
        ));
    }
    let d = projection_degree(&[g.degree(), gdot.phi_t.degree().max(gdot.f_t.degree())])?;
    Ok(AlgebraElement::new(
        compose_with_inverse(&gdot.phi_t, &g.phi, d)?,
        compose_with_inverse(&gdot.f_t, &g.phi, d)?,
        gdot.s_t,
    ))
}

/// Left-trivialized velocity `(φₜ/φₓ, fₜ - fₓφₜ/φₓ, sₜ)`.
pub fn body_velocity(
    g: &GroupElement,
    gdot: &GroupVelocity,
) -> Result<AlgebraElement, AlgebraError> {
    if g.phi.is_identity() {
        let second = &gdot.f_t - &(&g.f.differentiate() * &gdot.phi_t);
        return Ok(AlgebraElement::new(gdot.phi_t.clone(), second, gdot.s_t));
    }
    let d = projection_degree(&[g.degree(), gdot.phi_t.degree().max(gdot.f_t.degree())])?;
    let m = sample_count(d, g.degree());
    let phix = g.phi.derivative().sample(m);
    let ratio: Vec<f64> = gdot
        .phi_t
        .sample(m)
        .into_iter()
        .zip(phix)
        .map(|(a, b)| a / b)
        .collect();
    let ratio = project_samples(&ratio, d)?;
    let second = &gdot.f_t - &(&g.f.differentiate() * &ratio);
    Ok(AlgebraElement::new(ratio, second, gdot.s_t))
}
