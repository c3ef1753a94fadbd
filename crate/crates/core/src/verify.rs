//! Seeded randomized cross-checks.
//!
//! Each suite draws inputs from a ChaCha8 stream seeded by the caller and
//! returns the worst residual it observed. A suite passes when that residual
//! is at most its tolerance.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    ad_star, adjoint_action, bracket, coadjoint_ad_star, l2_pairing, AlgebraElement, Diffeo,
    GroupElement,
};
use crate::flow::{euler_arnold_rhs, evolve, weak_rhs, FlowConfig, FlowError, FlowState};
use crate::metric::{
    christoffel, correction_closed_form, correction_terms_j, inertia_apply, metric_inner,
    sectional_nonnormalized_gamma, sectional_nonnormalized_tensor, NORM_EQUIVALENCE,
};
use crate::modes::{
    gram_closed_form, positivity_certificate, sectional_modes, sectional_pipeline, ModeFilter,
    ModeVectors,
};
use crate::spectral::{mode_frequency, TrigPoly};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// Trigonometric polynomial of exact degree `degree` with coefficients
/// uniform in `[-amp, amp]`.
pub fn random_trig_poly(rng: &mut impl Rng, degree: usize, amp: f64) -> TrigPoly {
    let mut draw = || rng.gen_range(-amp..=amp);
    let mean = draw();
    let cos = (0..degree).map(|_| draw()).collect();
    let sin = (0..degree).map(|_| draw()).collect();
    TrigPoly::new(mean, cos, sin).expect("finite coefficients")
}

/// Trigonometric polynomial of random degree in `0..=max_degree`.
pub fn random_poly_upto(rng: &mut impl Rng, max_degree: usize, amp: f64) -> TrigPoly {
    let degree = rng.gen_range(0..=max_degree);
    random_trig_poly(rng, degree, amp)
}

/// Algebra element with components of degree at most `max_degree` and
/// `|u₃| ≤ max_u3`.
pub fn random_algebra_element(
    rng: &mut impl Rng,
    max_degree: usize,
    max_u3: f64,
) -> AlgebraElement {
    let d1 = rng.gen_range(0..=max_degree);
    let d2 = rng.gen_range(0..=max_degree);
    let u1 = random_trig_poly(rng, d1, 1.0);
    let u2 = random_trig_poly(rng, d2, 1.0);
    AlgebraElement::new(u1, u2, rng.gen_range(-max_u3..=max_u3))
}

/// Group element near the identity: `|pₓ| ≤ ½`.
pub fn random_group_element(rng: &mut impl Rng, max_degree: usize) -> GroupElement {
    let d = rng.gen_range(1..=max_degree);
    let p = random_trig_poly(rng, d, 1.0);
    let bound = (1..=d)
        .map(|k| {
            let (a, b) = p.coeff(k);
            mode_frequency(k) * (a.abs() + b.abs())
        })
        .sum::<f64>();
    let p = p.scale(0.5 / bound.max(1e-300));
    let phi = Diffeo::new(p).expect("slope bounded below by 1/2");
    let f = random_poly_upto(rng, max_degree, 1.0);
    GroupElement::new(phi, f, rng.gen_range(-1.0..1.0))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

/// `|S_tensor - S_gamma| / (1 + |S_gamma|)`.
pub fn route_equality(rng: &mut ChaCha8Rng, cases: usize) -> f64 {
    (0..cases)
        .map(|_| {
            let u = random_algebra_element(rng, 4, 5.0);
            let v = random_algebra_element(rng, 4, 5.0);
            rel(
                sectional_nonnormalized_tensor(&u, &v),
                sectional_nonnormalized_gamma(&u, &v),
            )
        })
        .fold(0.0, f64::max)
}

/// `|J₁ + J₂ + J₃ - closed form| / (1 + |closed form|)`.
pub fn j_identity(rng: &mut ChaCha8Rng, cases: usize) -> f64 {
    (0..cases)
        .map(|_| {
            let mut u = random_algebra_element(rng, 4, 5.0);
            let mut v = random_algebra_element(rng, 4, 5.0);
            // keep the third components away from zero
            u.u3 = u.u3.signum() * (0.5 + u.u3.abs());
            v.u3 = v.u3.signum() * (0.5 + v.u3.abs());
            rel(
                correction_terms_j(&u, &v).sum(),
                correction_closed_form(&u, &v),
            )
        })
        .fold(0.0, f64::max)
}

/// Coefficient-wise `|weak_rhs - euler_arnold_rhs|` on random states.
pub fn euler_arnold_equivalence(rng: &mut ChaCha8Rng, cases: usize) -> f64 {
    (0..cases)
        .map(|_| {
            let u = random_poly_upto(rng, 4, 1.0);
            let rho = random_poly_upto(rng, 4, 1.0);
            let st = FlowState::new(u, rho, rng.gen_range(-5.0..5.0));
            let a = weak_rhs(&st, 8);
            let b = euler_arnold_rhs(&st, 8);
            a.du.max_coeff_diff(&b.du)
                .max(a.drho.max_coeff_diff(&b.drho))
                .max((a.dalpha - b.dalpha).abs())
        })
        .fold(0.0, f64::max)
}

fn helmholtz_roundtrip(rng: &mut ChaCha8Rng, cases: usize) -> f64 {
    (0..cases)
        .map(|_| {
            let f = random_poly_upto(rng, 16, 1.0);
            let g = f.helmholtz_inverse().helmholtz();
            g.max_coeff_diff(&f) / f.max_abs_coeff().max(1e-300)
        })
        .fold(0.0, f64::max)
}

fn leibniz(rng: &mut ChaCha8Rng, cases: usize) -> f64 {
    (0..cases)
        .map(|_| {
            let f = random_poly_upto(rng, 16, 1.0);
            let g = random_poly_upto(rng, 16, 1.0);
            let lhs = (&f * &g).differentiate();
            let rhs = &f.differentiate() * &g + &f * &g.differentiate();
            lhs.max_coeff_diff(&rhs) / lhs.max_abs_coeff().max(1.0)
        })
        .fold(0.0, f64::max)
}

/// Worst relative excursion of `⟨U,U⟩ / ‖U‖²` outside the sharp
/// equivalence interval, with `‖U‖² = ‖u₁‖²_{H¹} + ‖u₂‖² + u₃²`; infinite if
/// the metric is not positive.
fn metric_equivalence(rng: &mut ChaCha8Rng, cases: usize) -> f64 {
    let (lo, hi) = NORM_EQUIVALENCE;
    (0..cases)
        .map(|_| {
            let u = random_algebra_element(rng, 4, 5.0);
            let norm = u.u1.l2_norm().powi(2)
                + u.u1.differentiate().l2_norm().powi(2)
                + u.u2.l2_norm().powi(2)
                + u.u3 * u.u3;
            let g = metric_inner(&u, &u);
            if norm == 0.0 {
                0.0
            } else if g > 0.0 {
                let r = g / norm;
                ((lo - r) / lo).max((r - hi) / hi).max(0.0)
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max)
}

fn metric_l2_pairing(rng: &mut ChaCha8Rng, cases: usize) -> f64 {
    (0..cases)
        .map(|_| {
            let u = random_algebra_element(rng, 4, 5.0);
            let v = random_algebra_element(rng, 4, 5.0);
            rel(l2_pairing(&inertia_apply(&u), &v), metric_inner(&u, &v))
        })
        .fold(0.0, f64::max)
}

fn christoffel_symmetry(rng: &mut ChaCha8Rng, cases: usize) -> f64 {
    (0..cases)
        .map(|_| {
            let u = random_algebra_element(rng, 6, 5.0);
            let v = random_algebra_element(rng, 6, 5.0);
            let a = christoffel(&u, &v);
            a.max_coeff_diff(&christoffel(&v, &u)) / (1.0 + a.max_abs_coeff())
        })
        .fold(0.0, f64::max)
}

fn sectional_symmetry(rng: &mut ChaCha8Rng, cases: usize) -> f64 {
    (0..cases)
        .map(|_| {
            let u = random_algebra_element(rng, 4, 5.0);
            let v = random_algebra_element(rng, 4, 5.0);
            let s = sectional_nonnormalized_gamma(&u, &v);
            rel(sectional_nonnormalized_gamma(&v, &u), s)
                .max(sectional_nonnormalized_gamma(&u, &u).abs())
        })
        .fold(0.0, f64::max)
}

fn ad_star_adjoint(rng: &mut ChaCha8Rng, cases: usize) -> f64 {
    (0..cases)
        .map(|_| {
            let u = random_algebra_element(rng, 4, 5.0);
            let v = random_algebra_element(rng, 4, 5.0);
            let w = random_algebra_element(rng, 4, 5.0);
            rel(
                metric_inner(&ad_star(&u, &v), &w),
                metric_inner(&v, &bracket(&u, &w)),
            )
        })
        .fold(0.0, f64::max)
}

fn coadjoint_pairing(rng: &mut ChaCha8Rng, cases: usize) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let g = random_group_element(rng, 3);
        let u = random_algebra_element(rng, 3, 5.0);
        let w = random_algebra_element(rng, 3, 5.0);
        let mu = inertia_apply(&u);
        let residual = match (coadjoint_ad_star(&g, &mu), adjoint_action(&g, &w)) {
            (Ok(mu0), Ok(adw)) => rel(l2_pairing(&mu0, &w), l2_pairing(&mu, &adw)),
            _ => f64::INFINITY,
        };
        worst = worst.max(residual);
    }
    worst
}

fn random_modes(rng: &mut ChaCha8Rng) -> (u32, u32, u32, u32) {
    (
        rng.gen_range(1..=6),
        rng.gen_range(1..=6),
        rng.gen_range(1..=6),
        rng.gen_range(1..=6),
    )
}

/// `|sectional_modes - pipeline| / (1 + |S|)` on random cosine-mode planes.
fn mode_closed_form(rng: &mut ChaCha8Rng, cases: usize) -> f64 {
    (0..cases)
        .map(|_| {
            let (k1, k2, l1, l2) = random_modes(rng);
            let mv = ModeVectors::new(
                k1,
                k2,
                l1,
                l2,
                rng.gen_range(-50.0..500.0),
                rng.gen_range(-2.0..2.0),
            )
            .expect("positive modes");
            rel(sectional_modes(&mv), sectional_pipeline(&mv))
        })
        .fold(0.0, f64::max)
}

fn gram_closed_forms(rng: &mut ChaCha8Rng, cases: usize) -> f64 {
    let mut worst = 0.0f64;
    let mut drawn = 0;
    while drawn < cases {
        let (k1, k2, l1, l2) = random_modes(rng);
        if !ModeFilter::Strict.admits(k1, k2, l1, l2) {
            continue;
        }
        drawn += 1;
        let mv = ModeVectors::new(k1, k2, l1, l2, rng.gen_range(-20.0..20.0), 1.0)
            .expect("positive modes");
        let (a, b, c) = gram_closed_form(&mv);
        let (u, v) = (mv.u(), mv.v());
        worst = worst
            .max(rel(metric_inner(&u, &u), a))
            .max(rel(metric_inner(&v, &v), b))
            .max(rel(metric_inner(&u, &v), c));
    }
    worst
}

/// Worst shortfall `max(bound2 - S, -S, 0)` over the positivity grid.
/// Deterministic: the grid is exhaustive.
fn theorem_positivity(_rng: &mut ChaCha8Rng, _cases: usize) -> f64 {
    let mut worst = 0.0f64;
    for k1 in 1..=6u32 {
        for k2 in 1..=6u32 {
            for l1 in 1..=6u32 {
                for l2 in 1..=6u32 {
                    if !ModeFilter::Strict.admits(k1, k2, l1, l2) {
                        continue;
                    }
                    let alpha = 6.0 * mode_frequency(k1.max(l1) as usize).powi(2);
                    let mv = ModeVectors::new(k1, k2, l1, l2, alpha, 1.0).expect("positive modes");
                    let c = positivity_certificate(&mv).expect("beta is one");
                    worst = worst.max(c.bound2 - c.s_value).max(-c.s_value);
                }
            }
        }
    }
    worst
}

/// Relative drift of the body momentum on the smooth benchmark
/// `u₀ = 0.2cos 2πx`, `ρ₀ = 0.1cos 2πx`, `α = 1`, `N = 64`, `dt = 10⁻³`.
pub fn conservation_drift(t_end: f64) -> Result<[f64; 3], FlowError> {
    let st = FlowState::new(TrigPoly::cos_mode(1, 0.2), TrigPoly::cos_mode(1, 0.1), 1.0);
    let mut cfg = FlowConfig::new(64, 1e-3, t_end);
    cfg.monitor_stride = (t_end / 1e-3).round().max(1.0) as usize;
    let traj = evolve(&st, &cfg)?;
    let (a1, a2, a3) = traj.particles[0].body_momentum(&traj.states[0]);
    let last = traj.states.len() - 1;
    let (b1, b2, b3) = traj.particles[last].body_momentum(&traj.states[last]);
    let drift = |a: &[f64], b: &[f64]| {
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        a.iter()
            .zip(b)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
            / scale
    };
    Ok([drift(&a1, &b1), drift(&a2, &b2), ((a3 - b3) / a3).abs()])
}

/// Run to `T = ½`: the benchmark steepens towards breaking near `T = 1`,
/// where `N = 64` no longer resolves it.
fn conservation(_rng: &mut ChaCha8Rng, _cases: usize) -> f64 {
    conservation_drift(0.5).map_or(f64::INFINITY, |d| d.into_iter().fold(0.0, f64::max))
}

type SuiteFn = fn(&mut ChaCha8Rng, usize) -> f64;

/// A named check with its default case count and tolerance.
#[derive(Clone, Copy)]
pub struct Suite {
    pub name: &'static str,
    pub cases: usize,
    pub tolerance: f64,
    run: SuiteFn,
}

pub const SUITES: &[Suite] = &[
    Suite {
        name: "helmholtz_roundtrip",
        cases: 100,
        tolerance: 1e-14,
        run: helmholtz_roundtrip,
    },
    Suite {
        name: "leibniz",
        cases: 100,
        tolerance: 1e-12,
        run: leibniz,
    },
    Suite {
        name: "metric_norm_equivalence",
        cases: 1000,
        tolerance: 1e-12,
        run: metric_equivalence,
    },
    Suite {
        name: "metric_l2_pairing",
        cases: 100,
        tolerance: 1e-12,
        run: metric_l2_pairing,
    },
    Suite {
        name: "christoffel_symmetry",
        cases: 100,
        tolerance: 1e-12,
        run: christoffel_symmetry,
    },
    Suite {
        name: "curvature_route_equality",
        cases: 100,
        tolerance: 1e-8,
        run: route_equality,
    },
    Suite {
        name: "sectional_symmetry",
        cases: 100,
        tolerance: 1e-10,
        run: sectional_symmetry,
    },
    Suite {
        name: "j_identity",
        cases: 100,
        tolerance: 1e-9,
        run: j_identity,
    },
    Suite {
        name: "ad_star_adjoint",
        cases: 100,
        tolerance: 1e-9,
        run: ad_star_adjoint,
    },
    Suite {
        name: "coadjoint_pairing",
        cases: 20,
        tolerance: 1e-9,
        run: coadjoint_pairing,
    },
    Suite {
        name: "mode_closed_form",
        cases: 200,
        tolerance: 1e-8,
        run: mode_closed_form,
    },
    Suite {
        name: "gram_closed_form",
        cases: 100,
        tolerance: 1e-12,
        run: gram_closed_forms,
    },
    Suite {
        name: "theorem_positivity",
        cases: 1,
        tolerance: 0.0,
        run: theorem_positivity,
    },
    Suite {
        name: "euler_arnold_equivalence",
        cases: 100,
        tolerance: 1e-10,
        run: euler_arnold_equivalence,
    },
    Suite {
        name: "momentum_conservation",
        cases: 1,
        tolerance: 1e-6,
        run: conservation,
    },
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub passed: bool,
    pub worst_residual: f64,
    pub tolerance: f64,
}

/// Runs every suite. Each suite gets its own stream derived from `seed`, so
/// results do not depend on suite order.
pub fn run_suites(
    seed: u64,
    overrides: &BTreeMap<String, f64>,
) -> Result<BTreeMap<&'static str, SuiteResult>, VerifyError> {
    if let Some(name) = overrides
        .keys()
        .find(|k| !SUITES.iter().any(|s| s.name == k.as_str()))
    {
        return Err(VerifyError::UnknownSuite(name.clone()));
    }
    Ok(SUITES
        .iter()
        .enumerate()
        .map(|(i, suite)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let worst = (suite.run)(&mut rng, suite.cases);
            let tolerance = overrides
                .get(suite.name)
                .copied()
                .unwrap_or(suite.tolerance);
            let result = SuiteResult {
                passed: worst <= tolerance,
                worst_residual: worst,
                tolerance,
            };
            (suite.name, result)
        })
        .collect())
}
