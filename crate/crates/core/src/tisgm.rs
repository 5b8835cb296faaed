//! Translation-invariant boundary laws.
//!
//! For `m = 2` the compatibility system in `x = z0^{1/k}`, `y = z1^{1/k}` is
//!
//! ```text
//! x = (x^k + θ y^k) / (1 + θ y^k)
//! y = θ (x^k + 1) / (1 + θ y^k)
//! ```
//!
//! Its first equation splits into `x = 1` (the symmetric solution, with `y`
//! the positive root of `θ y^{k+1} + y − 2θ`) and `θ y^k = x + … + x^{k−1}`,
//! which leads to `θ^{k+1} = η(x)`. `η` is invariant under `x ↦ 1/x`, peaks
//! at `x = 1`, and its peak value fixes the critical coupling `θ_cr(k)`.
//! Below `θ_cr` there are exactly two asymmetric solutions `x₁ > 1` and
//! `x₂ = 1/x₁`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_order, check_theta, Branch, ModelParams, TisgmSolution};
use crate::rootfind::{expand_bracket_decreasing, find_root, Bracket, RootConfig};

/// Residual bound every returned solution must satisfy.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Couplings closer than this to `θ_cr(k)` are treated as critical: only the
/// symmetric solution is reported.
pub const CRITICAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalTheta {
    pub k: u32,
    pub value: f64,
}

impl CriticalTheta {
    pub fn new(k: u32) -> Result<Self> {
        Ok(Self { k, value: theta_cr(k)? })
    }

    /// `η(1) = (k−1) k^k / 2^k`, the maximum of `η`.
    pub fn eta_max(&self) -> f64 {
        eta_max(self.k)
    }
}

fn eta_max(k: u32) -> f64 {
    (k - 1) as f64 * (k as f64 / 2.0).powi(k as i32)
}

/// `θ_cr(k) = ((k−1) k^k / 2^k)^{1/(k+1)}`.
pub fn theta_cr(k: u32) -> Result<f64> {
    check_order(k)?;
    Ok(eta_max(k).powf(1.0 / (k + 1) as f64))
}

/// `1 + u + … + u^{n−1}` by Horner accumulation.
fn geometric_sum(u: f64, n: u32) -> f64 {
    (0..n).fold(0.0, |acc, _| acc * u + 1.0)
}

/// `u + u² + … + u^{k−1}`.
fn upper_sum(u: f64, k: u32) -> f64 {
    u * geometric_sum(u, k - 1)
}

/// `η(x) = (Σ_{i=1}^{k−1} x^i)(Σ_{i=0}^{k−1} x^i)^k / (x^k + 1)^k`.
///
/// Evaluated at `min(x, 1/x)` so that no power exceeds one.
pub fn eta(x: f64, k: u32) -> Result<f64> {
    check_order(k)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("eta needs x > 0, got {x}")));
    }
    Ok(eta_unchecked(x, k))
}

fn eta_unchecked(x: f64, k: u32) -> f64 {
    let u = if x > 1.0 { 1.0 / x } else { x };
    let s0 = geometric_sum(u, k);
    let s1 = upper_sum(u, k);
    s1 * (s0 / (u.powi(k as i32) + 1.0)).powi(k as i32)
}

/// `f(y) = θ y^{k+1} + y − 2θ`.
pub fn symmetric_polynomial(y: f64, k: u32, theta: f64) -> f64 {
    theta * y.powi(k as i32 + 1) + y - 2.0 * theta
}

/// The symmetric solution `(1, y*)`, `y* ∈ (0, 2^{1/(k+1)})`.
pub fn solve_symmetric(k: u32, theta: f64) -> Result<TisgmSolution> {
    check_order(k)?;
    check_theta(theta)?;
    let f = |y: f64| symmetric_polynomial(y, k, theta);
    let hi = 2f64.powf(1.0 / (k + 1) as f64);
    let bracket = Bracket::new(f, 0.0, hi)?;
    let y = find_root(f, &bracket, &RootConfig::default())?;
    let sol = TisgmSolution { x: 1.0, y, branch: Branch::Symmetric };
    check_residual(&sol, k, theta, "symmetric solution")?;
    Ok(sol)
}

/// `y*(k, θ)` in radicals for `k = 2` (Cardano) and `k = 3` (Ferrari).
pub fn symmetric_y_closed_form(k: u32, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    match k {
        2 => {
            let t = theta;
            let c = (3.0 * t * (81.0 * t.powi(4) + 3.0 * t).sqrt() + 27.0 * t.powi(3)).cbrt();
            Ok(c / (3.0 * t) - 1.0 / c)
        }
        3 => {
            // y⁴ + y/θ − 2 = 0. The resolvent s³ + 2s − 1/(8θ²) = 0 makes
            // (y² + s)² a perfect square.
            let q = 1.0 / (8.0 * theta * theta);
            let u = (q / 2.0 + (q * q / 4.0 + 8.0 / 27.0).sqrt()).cbrt();
            let s = u - 2.0 / (3.0 * u);
            let r = (2.0 * s).sqrt();
            Ok((1.0 / (2.0 * theta * r) - s / 2.0).sqrt() - (s / 2.0).sqrt())
        }
        _ => Err(Error::Unsupported(format!("closed-form y* only for k = 2, 3 (got {k})"))),
    }
}

fn recover_y(x: f64, k: u32, theta: f64) -> f64 {
    (upper_sum(x, k) / theta).powf(1.0 / k as f64)
}

fn check_residual(sol: &TisgmSolution, k: u32, theta: f64, what: &str) -> Result<()> {
    let residual = sol.residual(k, theta);
    if !(residual < RESIDUAL_TOL) {
        return Err(Error::Consistency { what: format!("{what} at k = {k}, theta = {theta}"), residual });
    }
    Ok(())
}

/// The asymmetric pair `[Upper, Lower]`, or nothing when `θ ≥ θ_cr(k) − CRITICAL_TOL`.
///
/// `x₁` is the root of `η(x) = θ^{k+1}` on `(1, ∞)`; `x₂ = 1/x₁`.
pub fn solve_asymmetric(k: u32, theta: f64) -> Result<Vec<TisgmSolution>> {
    check_order(k)?;
    check_theta(theta)?;
    if theta >= theta_cr(k)? - CRITICAL_TOL {
        return Ok(Vec::new());
    }
    let target = theta.powi(k as i32 + 1);
    let eta_k = |x: f64| eta_unchecked(x, k);
    let bracket = expand_bracket_decreasing(eta_k, 1.0, target)?;
    let x1 = find_root(|x| eta_k(x) - target, &bracket, &RootConfig::default())?;
    let x2 = 1.0 / x1;

    let upper = TisgmSolution { x: x1, y: recover_y(x1, k, theta), branch: Branch::Upper };
    let lower = TisgmSolution { x: x2, y: recover_y(x2, k, theta), branch: Branch::Lower };
    if upper.branch != Branch::from_x(x1) || lower.branch != Branch::from_x(x2) {
        return Err(Error::Consistency {
            what: format!("asymmetric root {x1} too close to 1 at k = {k}, theta = {theta}"),
            residual: (x1 - 1.0).abs(),
        });
    }
    check_residual(&upper, k, theta, "upper solution")?;
    check_residual(&lower, k, theta, "lower solution")?;
    Ok(vec![upper, lower])
}

/// The `k = 2` asymmetric pair through `ρ = x + 1/x`, which solves
/// `θ³ρ² − ρ − 2 = 0`. Only the root `ρ₁ > 2` is admissible.
pub fn solve_k2_closed_form(theta: f64) -> Result<Vec<TisgmSolution>> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Domain(format!(
            "asymmetric k = 2 solutions exist only for 0 < theta < 1, got {theta}"
        )));
    }
    let rho = rho_roots(theta).0;
    let disc = (rho * rho - 4.0).max(0.0).sqrt();
    let x1 = (rho + disc) / 2.0;
    let x2 = (rho - disc) / 2.0;
    Ok(vec![
        TisgmSolution { x: x1, y: (x1 / theta).sqrt(), branch: Branch::from_x(x1) },
        TisgmSolution { x: x2, y: (x2 / theta).sqrt(), branch: Branch::from_x(x2) },
    ])
}

/// Both roots `(ρ₁, ρ₂)` of `θ³ρ² − ρ − 2 = 0`.
pub fn rho_roots(theta: f64) -> (f64, f64) {
    let t3 = theta.powi(3);
    let sq = (1.0 + 8.0 * t3).sqrt();
    ((1.0 + sq) / (2.0 * t3), (1.0 - sq) / (2.0 * t3))
}

/// All fixed points at `(k, θ)`, ordered Symmetric, Upper, Lower.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub k: u32,
    pub theta: f64,
    pub theta_cr: f64,
    pub solutions: Vec<TisgmSolution>,
    /// `θ` lies within [`CRITICAL_TOL`] of `θ_cr`; the merging asymmetric
    /// roots are not reported.
    pub critical: bool,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn get(&self, branch: Branch) -> Option<&TisgmSolution> {
        self.solutions.iter().find(|s| s.branch == branch)
    }
}

pub fn enumerate(k: u32, theta: f64) -> Result<SolutionSet> {
    let theta_cr = theta_cr(k)?;
    let mut solutions = vec![solve_symmetric(k, theta)?];
    solutions.extend(solve_asymmetric(k, theta)?);
    Ok(SolutionSet {
        k,
        theta,
        theta_cr,
        solutions,
        critical: (theta - theta_cr).abs() < CRITICAL_TOL,
    })
}

/// A translation-invariant boundary law `(z0, …, zm)` normalised to `zm = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLaw {
    z: Vec<f64>,
}

impl BoundaryLaw {
    pub fn new(z: Vec<f64>) -> Result<Self> {
        if z.len() < 3 {
            return Err(Error::Domain(format!("boundary law needs m + 1 >= 3 entries, got {}", z.len())));
        }
        if let Some((i, v)) = z.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::Domain(format!("boundary law entry z[{i}] = {v} is not positive")));
        }
        if *z.last().unwrap() != 1.0 {
            return Err(Error::Domain("boundary law must end with z_m = 1".into()));
        }
        Ok(Self { z })
    }

    pub fn ones(m: usize) -> Self {
        Self { z: vec![1.0; m + 1] }
    }

    /// The law of an `m = 2` solution: `(x^k, y^k, 1)`.
    pub fn from_solution(sol: &TisgmSolution, k: u32) -> Self {
        Self { z: vec![sol.x.powi(k as i32), sol.y.powi(k as i32), 1.0] }
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn m(&self) -> usize {
        self.z.len() - 1
    }

    /// `(z0^{1/k}, z1^{1/k})` for an `m = 2` law.
    pub fn to_solution(&self, k: u32) -> Result<TisgmSolution> {
        if self.m() != 2 {
            return Err(Error::Unsupported(format!("to_solution needs m = 2, got m = {}", self.m())));
        }
        let inv = 1.0 / k as f64;
        TisgmSolution::new(self.z[0].powf(inv), self.z[1].powf(inv))
    }

    /// Max-norm of `F(z) − z` for the compatibility map `F`.
    pub fn residual(&self, params: &ModelParams) -> f64 {
        let next = apply_map(params, &self.z);
        next.iter().zip(&self.z).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// One step of the compatibility map:
/// `z_i ← (N_i / N_m)^k` with `N_i = Σ_j λ_ij z_j` and `z_m = 1`.
fn apply_map(params: &ModelParams, z: &[f64]) -> Vec<f64> {
    let m = params.m();
    let act = params.activity();
    let weighted = |i: usize| -> f64 {
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(m);
        (lo..=hi).map(|j| act.weight(i, j) * z[j]).sum()
    };
    let denom = weighted(m);
    let mut next: Vec<f64> = (0..m).map(|i| (weighted(i) / denom).powi(params.k() as i32)).collect();
    next.push(1.0);
    next
}

const TAIL_LEN: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub iterations: usize,
    /// Max-norm of the last step taken.
    pub last_step: f64,
    /// Some entry overflowed to a non-finite value.
    pub escaped: bool,
    /// The last few iterates, oldest first.
    pub tail: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum IterationOutcome {
    Converged { law: BoundaryLaw, iterations: usize, residual: f64 },
    Diverged(DivergenceReport),
}

impl IterationOutcome {
    pub fn converged(&self) -> Option<&BoundaryLaw> {
        match self {
            IterationOutcome::Converged { law, .. } => Some(law),
            IterationOutcome::Diverged(_) => None,
        }
    }
}

/// Plain forward iteration of the compatibility map from `init`.
///
/// Stops when two successive iterates are within `tol` in max-norm. Running
/// out of iterations (or overflowing) yields a [`DivergenceReport`]; a
/// non-positive component is an error.
pub fn iterate_boundary_law(
    params: &ModelParams,
    init: &BoundaryLaw,
    max_iter: usize,
    tol: f64,
) -> Result<IterationOutcome> {
    if init.m() != params.m() {
        return Err(Error::Domain(format!(
            "initial law has m = {}, model has m = {}",
            init.m(),
            params.m()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    let mut z = init.z.clone();
    let mut tail: Vec<Vec<f64>> = Vec::with_capacity(TAIL_LEN + 1);
    let mut last_step = f64::INFINITY;
    for iteration in 1..=max_iter {
        let next = apply_map(params, &z);
        if next.iter().any(|v| !v.is_finite()) {
            tail.push(next);
            if tail.len() > TAIL_LEN {
                tail.remove(0);
            }
            return Ok(IterationOutcome::Diverged(DivergenceReport {
                iterations: iteration,
                last_step,
                escaped: true,
                tail,
            }));
        }
        if let Some((index, &value)) = next.iter().enumerate().find(|(_, v)| **v <= 0.0) {
            return Err(Error::NumericalDomain { iteration, index, value });
        }
        last_step = next.iter().zip(&z).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        z = next;
        tail.push(z.clone());
        if tail.len() > TAIL_LEN {
            tail.remove(0);
        }
        if last_step < tol {
            let law = BoundaryLaw { z };
            let residual = law.residual(params);
            return Ok(IterationOutcome::Converged { law, iterations: iteration, residual });
        }
    }
    Ok(IterationOutcome::Diverged(DivergenceReport { iterations: max_iter, last_step, escaped: false, tail }))
}
