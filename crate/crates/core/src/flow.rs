//! Time integration of the system
//!
//! ```text
//! uₜ + uuₓ = -A⁻¹∂ₓ(u² + ½uₓ² + ½ρ² - αu)
//! ρₜ + (ρu)ₓ = 0
//! αₜ = 0
//! ```
//!
//! with classical RK4 and Galerkin truncation to a fixed degree, together
//! with the Lagrangian flow `φ' = u∘φ`, `f' = ρ∘φ`, `s' = α` and the body
//! momentum `μ₀ = Ad*_g 𝔸U`, which is conserved.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    ad_star, coadjoint_ad_star, compose_with_diffeo, project_samples, projection_degree,
    AlgebraElement, AlgebraError, Diffeo, GroupElement, GroupVelocity,
};
use crate::metric::{inertia_apply, metric_inner, Momentum};
use crate::spectral::{uniform_grid, TrigPoly, DEFAULT_DEGREE_CAP};

/// Default `sup|uₓ|` above which integration is aborted.
pub const DEFAULT_BLOWUP_THRESHOLD: f64 = 1e3;

/// Largest admissible `dt·(sup|u₀| + 1)·N`.
const STABILITY_LIMIT: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("invalid flow configuration: {0}")]
    InvalidConfig(String),
    #[error("blow-up guard tripped at t = {t}: sup|uₓ| = {sup_ux:.3e}")]
    BlowUp { t: f64, sup_ux: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// State `(u, ρ, α)` at time `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub u: TrigPoly,
    pub rho: TrigPoly,
    pub alpha: f64,
    pub t: f64,
}

impl FlowState {
    pub fn new(u: TrigPoly, rho: TrigPoly, alpha: f64) -> Self {
        FlowState {
            u,
            rho,
            alpha,
            t: 0.0,
        }
    }

    pub fn velocity(&self) -> AlgebraElement {
        AlgebraElement::new(self.u.clone(), self.rho.clone(), self.alpha)
    }

    pub fn energy(&self) -> f64 {
        let v = self.velocity();
        metric_inner(&v, &v)
    }

    fn degree(&self) -> usize {
        self.u.degree().max(self.rho.degree())
    }
}

/// Time derivative of a [`FlowState`].
#[derive(Clone, Debug, PartialEq)]
pub struct FlowRhs {
    pub du: TrigPoly,
    pub drho: TrigPoly,
    pub dalpha: f64,
}

/// Right-hand side of the weak form, truncated to degree `n` after exact
/// evaluation.
pub fn weak_rhs(st: &FlowState, n: usize) -> FlowRhs {
    let u = &st.u;
    let ux = u.differentiate();
    let flux = u * u + (&ux * &ux).scale(0.5) + (&st.rho * &st.rho).scale(0.5) - u.scale(st.alpha);
    let du = -(u * &ux) - flux.helmholtz_inverse_dx();
    let drho = -(u * &st.rho).differentiate();
    FlowRhs {
        du: du.truncate(n),
        drho: drho.truncate(n),
        dalpha: 0.0,
    }
}

/// `Uₜ = -ad*_U U`, truncated to degree `n`.
pub fn euler_arnold_rhs(st: &FlowState, n: usize) -> FlowRhs {
    let v = st.velocity();
    let a = ad_star(&v, &v);
    FlowRhs {
        du: (-a.u1).truncate(n),
        drho: (-a.u2).truncate(n),
        dalpha: -a.u3,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    /// Galerkin truncation degree `N`.
    pub truncation: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Number of steps between recorded states.
    pub monitor_stride: usize,
    #[serde(default = "default_blowup_threshold")]
    pub blowup_threshold: f64,
}

fn default_blowup_threshold() -> f64 {
    DEFAULT_BLOWUP_THRESHOLD
}

impl FlowConfig {
    pub fn new(truncation: usize, dt: f64, t_end: f64) -> Self {
        FlowConfig {
            truncation,
            dt,
            t_end,
            monitor_stride: 1,
            blowup_threshold: DEFAULT_BLOWUP_THRESHOLD,
        }
    }

    /// Checks the configuration against the initial state and returns the
    /// number of steps.
    pub fn validate(&self, st0: &FlowState) -> Result<usize, FlowError> {
        let bad = |msg: String| Err(FlowError::InvalidConfig(msg));
        let n = self.truncation;
        if n == 0 || n > DEFAULT_DEGREE_CAP {
            return bad(format!("truncation {n} outside 1..={DEFAULT_DEGREE_CAP}"));
        }
        if n < 2 * st0.degree() {
            return bad(format!(
                "truncation {n} is below twice the initial degree {}",
                st0.degree()
            ));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt = {} must be positive", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end = {} must be non-negative", self.t_end));
        }
        if self.monitor_stride == 0 {
            return bad("monitor_stride must be at least 1".into());
        }
        if !st0.alpha.is_finite() {
            return bad("alpha must be finite".into());
        }
        let steps = (self.t_end / self.dt).round();
        if (steps * self.dt - self.t_end).abs() > 1e-9 * self.t_end.max(1.0) {
            return bad(format!(
                "t_end = {} is not a multiple of dt = {}",
                self.t_end, self.dt
            ));
        }
        let steps = steps as usize;
        if !steps.is_multiple_of(self.monitor_stride) {
            return bad(format!(
                "{steps} steps are not a multiple of monitor_stride {}",
                self.monitor_stride
            ));
        }
        let sup_u = sup_abs(&st0.u, 4 * n);
        let courant = self.dt * (sup_u + 1.0) * n as f64;
        if courant > STABILITY_LIMIT {
            return bad(format!(
                "dt·(sup|u₀| + 1)·N = {courant:.3} exceeds {STABILITY_LIMIT}"
            ));
        }
        Ok(steps)
    }
}

fn sup_abs(f: &TrigPoly, m: usize) -> f64 {
    f.sample(m).into_iter().fold(0.0, |a, v| a.max(v.abs()))
}

/// Particle data of the Lagrangian flow on a uniform reference grid:
/// `φ`, `φₓ`, `f`, `fₓ` at each grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LagrangianSamples {
    pub phi: Vec<f64>,
    pub phix: Vec<f64>,
    pub f: Vec<f64>,
    pub fx: Vec<f64>,
}

impl LagrangianSamples {
    fn identity(m: usize) -> Self {
        LagrangianSamples {
            phi: uniform_grid(m),
            phix: vec![1.0; m],
            f: vec![0.0; m],
            fx: vec![0.0; m],
        }
    }

    fn len(&self) -> usize {
        self.phi.len()
    }

    fn rate(&self, u: &TrigPoly, rho: &TrigPoly) -> LagrangianSamples {
        let ux = u.differentiate();
        let rx = rho.differentiate();
        let m = self.len();
        let mut out = LagrangianSamples {
            phi: Vec::with_capacity(m),
            phix: Vec::with_capacity(m),
            f: Vec::with_capacity(m),
            fx: Vec::with_capacity(m),
        };
        for j in 0..m {
            let y = self.phi[j];
            out.phi.push(u.eval(y));
            out.phix.push(ux.eval(y) * self.phix[j]);
            out.f.push(rho.eval(y));
            out.fx.push(rx.eval(y) * self.phix[j]);
        }
        out
    }

    fn axpy(&self, h: f64, d: &LagrangianSamples) -> LagrangianSamples {
        let comb = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + h * y).collect();
        LagrangianSamples {
            phi: comb(&self.phi, &d.phi),
            phix: comb(&self.phix, &d.phix),
            f: comb(&self.f, &d.f),
            fx: comb(&self.fx, &d.fx),
        }
    }

    fn rk4_combine(&self, h: f64, k: [&LagrangianSamples; 4]) -> LagrangianSamples {
        let comb = |s: &[f64], sel: fn(&LagrangianSamples) -> &[f64]| {
            (0..s.len())
                .map(|j| {
                    s[j] + h / 6.0
                        * (sel(k[0])[j] + 2.0 * sel(k[1])[j] + 2.0 * sel(k[2])[j] + sel(k[3])[j])
                })
                .collect()
        };
        LagrangianSamples {
            phi: comb(&self.phi, |s| &s.phi),
            phix: comb(&self.phix, |s| &s.phix),
            f: comb(&self.f, |s| &s.f),
            fx: comb(&self.fx, |s| &s.fx),
        }
    }

    /// Body momentum `μ₀` at each reference point for the Eulerian state
    /// `st`: `([(Au)∘φ - α/2]φₓ² + (ρ∘φ)fₓφₓ, (ρ∘φ)φₓ)` and the constant
    /// `½(α - ∫u)`.
    pub fn body_momentum(&self, st: &FlowState) -> (Vec<f64>, Vec<f64>, f64) {
        let m = st.u.helmholtz();
        let (mut first, mut second) = (
            Vec::with_capacity(self.len()),
            Vec::with_capacity(self.len()),
        );
        for j in 0..self.len() {
            let y = self.phi[j];
            let r = st.rho.eval(y);
            let px = self.phix[j];
            first.push((m.eval(y) - 0.5 * st.alpha) * px * px + r * self.fx[j] * px);
            second.push(r * px);
        }
        (first, second, 0.5 * (st.alpha - st.u.integrate()))
    }

    /// Projects the samples onto a group element at time `t`.
    pub fn group_element(&self, alpha: f64, t: f64) -> Result<GroupElement, FlowError> {
        let m = self.len();
        let degree = m / 4;
        let p: Vec<f64> = self
            .phi
            .iter()
            .zip(uniform_grid(m))
            .map(|(y, x)| y - x)
            .collect();
        let phi = Diffeo::new(project_samples(&p, degree)?)?;
        let f = project_samples(&self.f, degree)?;
        Ok(GroupElement::new(phi, f, alpha * t))
    }
}

/// Scalar diagnostics of a recorded state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub t: f64,
    /// `⟨U, U⟩_𝔸`.
    pub energy: f64,
    /// L² norms of the first two components of `μ₀`.
    pub mu0_1_norm: f64,
    pub mu0_2_norm: f64,
    pub mu0_3: f64,
    pub sup_ux: f64,
}

fn rms(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub config: FlowConfig,
    pub states: Vec<FlowState>,
    pub diagnostics: Vec<Diagnostics>,
    /// Particle data integrated jointly with the states.
    pub particles: Vec<LagrangianSamples>,
}

fn combine(a: &TrigPoly, h: f64, d: &TrigPoly) -> TrigPoly {
    a + &d.scale(h)
}

fn stage(base: &FlowState, h: f64, d: &FlowRhs) -> FlowState {
    FlowState {
        u: combine(&base.u, h, &d.du),
        rho: combine(&base.rho, h, &d.drho),
        alpha: base.alpha,
        t: base.t + h,
    }
}

fn record(st: &FlowState, particles: &LagrangianSamples, n: usize) -> Diagnostics {
    let (mu1, mu2, mu3) = particles.body_momentum(st);
    Diagnostics {
        t: st.t,
        energy: st.energy(),
        mu0_1_norm: rms(&mu1),
        mu0_2_norm: rms(&mu2),
        mu0_3: mu3,
        sup_ux: sup_abs(&st.u.differentiate(), 4 * n),
    }
}

/// Integrates from `st0` with RK4 on the weak form, carrying the particle
/// ODEs `φ' = u∘φ`, `φₓ' = (uₓ∘φ)φₓ`, `f' = ρ∘φ`, `fₓ' = (ρₓ∘φ)φₓ` on
/// `4N` reference points inside the same stages.
pub fn evolve(st0: &FlowState, cfg: &FlowConfig) -> Result<Trajectory, FlowError> {
    let steps = cfg.validate(st0)?;
    let n = cfg.truncation;
    let dt = cfg.dt;
    let mut st = FlowState {
        u: st0.u.truncate(n),
        rho: st0.rho.truncate(n),
        alpha: st0.alpha,
        t: 0.0,
    };
    let mut particles = LagrangianSamples::identity(4 * n);
    let mut traj = Trajectory {
        config: cfg.clone(),
        states: vec![st.clone()],
        diagnostics: vec![record(&st, &particles, n)],
        particles: vec![particles.clone()],
    };

    for k in 1..=steps {
        let k1 = weak_rhs(&st, n);
        let p1 = particles.rate(&st.u, &st.rho);
        let s2 = stage(&st, 0.5 * dt, &k1);
        let k2 = weak_rhs(&s2, n);
        let p2 = particles.axpy(0.5 * dt, &p1).rate(&s2.u, &s2.rho);
        let s3 = stage(&st, 0.5 * dt, &k2);
        let k3 = weak_rhs(&s3, n);
        let p3 = particles.axpy(0.5 * dt, &p2).rate(&s3.u, &s3.rho);
        let s4 = stage(&st, dt, &k3);
        let k4 = weak_rhs(&s4, n);
        let p4 = particles.axpy(dt, &p3).rate(&s4.u, &s4.rho);

        let w = |y: &TrigPoly, a: &TrigPoly, b: &TrigPoly, c: &TrigPoly, d: &TrigPoly| {
            y + &(a + &(b + c).scale(2.0) + d).scale(dt / 6.0)
        };
        st = FlowState {
            u: w(&st.u, &k1.du, &k2.du, &k3.du, &k4.du),
            rho: w(&st.rho, &k1.drho, &k2.drho, &k3.drho, &k4.drho),
            alpha: st.alpha,
            t: k as f64 * dt,
        };
        particles = particles.rk4_combine(dt, [&p1, &p2, &p3, &p4]);

        let sup_ux = sup_abs(&st.u.differentiate(), 4 * n);
        if !sup_ux.is_finite() || !st.rho.max_abs_coeff().is_finite() {
            return Err(FlowError::NonFinite { t: st.t });
        }
        if sup_ux > cfg.blowup_threshold {
            return Err(FlowError::BlowUp { t: st.t, sup_ux });
        }
        if k % cfg.monitor_stride == 0 {
            traj.diagnostics.push(record(&st, &particles, n));
            traj.states.push(st.clone());
            traj.particles.push(particles.clone());
        }
    }
    Ok(traj)
}

/// Rebuilds the group path `(φ, f, s)(t)` at every recorded time by
/// integrating the particle ODEs with RK4, one step per recorded interval.
/// Between recorded states, `u` and `ρ` are interpolated by cubic Hermite
/// polynomials in time with slopes from [`weak_rhs`].
pub fn reconstruct_flow(traj: &Trajectory) -> Result<Vec<GroupElement>, FlowError> {
    let n = traj.config.truncation;
    let h = traj.config.dt * traj.config.monitor_stride as f64;
    let mut particles = LagrangianSamples::identity(4 * n);
    let alpha = traj.states.first().map_or(0.0, |s| s.alpha);
    let mut out = vec![particles.group_element(alpha, 0.0)?];
    for pair in traj.states.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let (ra, rb) = (weak_rhs(a, n), weak_rhs(b, n));
        let hermite = |fa: &TrigPoly, da: &TrigPoly, fb: &TrigPoly, db: &TrigPoly, s: f64| {
            let h00 = 2.0 * s.powi(3) - 3.0 * s * s + 1.0;
            let h10 = s.powi(3) - 2.0 * s * s + s;
            let h01 = -2.0 * s.powi(3) + 3.0 * s * s;
            let h11 = s.powi(3) - s * s;
            fa.scale(h00) + da.scale(h10 * h) + fb.scale(h01) + db.scale(h11 * h)
        };
        let mid_u = hermite(&a.u, &ra.du, &b.u, &rb.du, 0.5);
        let mid_rho = hermite(&a.rho, &ra.drho, &b.rho, &rb.drho, 0.5);

        let p1 = particles.rate(&a.u, &a.rho);
        let p2 = particles.axpy(0.5 * h, &p1).rate(&mid_u, &mid_rho);
        let p3 = particles.axpy(0.5 * h, &p2).rate(&mid_u, &mid_rho);
        let p4 = particles.axpy(h, &p3).rate(&b.u, &b.rho);
        particles = particles.rk4_combine(h, [&p1, &p2, &p3, &p4]);
        out.push(particles.group_element(alpha, b.t)?);
    }
    Ok(out)
}

/// `μ₀ = Ad*_g 𝔸U`.
pub fn momentum_body(g: &GroupElement, st: &FlowState) -> Result<Momentum, FlowError> {
    Ok(coadjoint_ad_star(g, &inertia_apply(&st.velocity()))?)
}

/// Velocity `(u∘φ, ρ∘φ, α)` of the group path through `g` generated by `st`.
pub fn lagrangian_velocity(g: &GroupElement, st: &FlowState) -> Result<GroupVelocity, FlowError> {
    let d = projection_degree(&[g.phi.displacement().degree(), st.degree()])?;
    Ok(GroupVelocity {
        phi_t: compose_with_diffeo(&st.u, &g.phi, d)?,
        f_t: compose_with_diffeo(&st.rho, &g.phi, d)?,
        s_t: st.alpha,
    })
}

/// Largest coefficient magnitude among modes above `3n/4`, relative to the
/// L² norm. Small values indicate adequate resolution at truncation `n`.
pub fn tail_ratio(f: &TrigPoly, n: usize) -> f64 {
    let norm = f.l2_norm();
    if norm == 0.0 {
        return 0.0;
    }
    let start = 3 * n / 4 + 1;
    (start..=f.degree())
        .map(|k| {
            let (a, b) = f.coeff(k);
            a.abs().max(b.abs())
        })
        .fold(0.0, f64::max)
        / norm
}
