//! Extremality of the translation-invariant measures.
//!
//! Two sufficient conditions are used: the Kesten–Stigum bound `k·s₂² > 1`
//! certifies non-extremality, and the MSW bound `k·κ·γ < 1` certifies
//! extremality. For μ0 both reduce to comparing `k·s₂²` with one, so the
//! classification is complete away from the boundary value.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chain::{
    gamma_of, gamma_of_matrix, k2_asymmetric_matrix, kappa_k2_closed_form, kappa_of, kernel_of,
    spectrum_asymmetric_k2, spectrum_numeric, spectrum_symmetric,
};
use crate::error::{Error, Result};
use crate::model::{check_order, check_theta, Measure, TisgmSolution};
use crate::rootfind::{expand_bracket_decreasing, find_root, Bracket, RootConfig};
use crate::tisgm::{solve_asymmetric, solve_k2_closed_form, solve_symmetric, theta_cr};

/// Width of the undecided band around `k·s₂² = 1` (and `k·κ·γ = 1`).
pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Extreme,
    NonExtreme,
    Undetermined,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Extreme => "extreme",
            Verdict::NonExtreme => "non-extreme",
            Verdict::Undetermined => "undetermined",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl std::str::FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "extreme" => Ok(Verdict::Extreme),
            "non-extreme" => Ok(Verdict::NonExtreme),
            "undetermined" => Ok(Verdict::Undetermined),
            other => Err(Error::Domain(format!("unknown verdict {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalityVerdict {
    pub measure: Measure,
    pub verdict: Verdict,
    pub solution: TisgmSolution,
    pub s2: f64,
    pub kappa: f64,
    pub gamma: f64,
    /// `k·s₂²`
    pub ks_value: f64,
    /// `k·κ·γ`
    pub msw_value: f64,
}

/// `(k·s₂² > 1, k·s₂²)`. `true` certifies non-extremality.
pub fn kesten_stigum(k: u32, s2: f64) -> (bool, f64) {
    let v = k as f64 * s2 * s2;
    (v > 1.0, v)
}

/// `(k·κ·γ < 1, k·κ·γ)`. `true` certifies extremality.
pub fn msw_extreme(k: u32, kappa: f64, gamma: f64) -> (bool, f64) {
    let v = k as f64 * kappa * gamma;
    (v < 1.0, v)
}

fn decide(ks_value: f64, msw_value: f64, tol: f64, allow_non_extreme: bool) -> Verdict {
    if allow_non_extreme && ks_value > 1.0 + tol {
        Verdict::NonExtreme
    } else if msw_value < 1.0 - tol {
        Verdict::Extreme
    } else {
        Verdict::Undetermined
    }
}

/// Classifies μ0 at `(k, θ)`.
pub fn classify_mu0(k: u32, theta: f64, boundary_tol: f64) -> Result<ExtremalityVerdict> {
    let sol = solve_symmetric(k, theta)?;
    let kern = kernel_of(&sol, k, theta)?;
    let s2 = spectrum_symmetric(sol.y, theta, k).s2;
    let (kappa, gamma) = (kappa_of(&kern), gamma_of(&kern));
    let ks_value = kesten_stigum(k, s2).1;
    let msw_value = msw_extreme(k, kappa, gamma).1;
    Ok(ExtremalityVerdict {
        measure: Measure::Mu0,
        verdict: decide(ks_value, msw_value, boundary_tol, true),
        solution: sol,
        s2,
        kappa,
        gamma,
        ks_value,
        msw_value,
    })
}

fn k2_pair_verdict(theta: f64, measure: Measure, boundary_tol: f64) -> Result<ExtremalityVerdict> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::MeasureAbsent { measure: measure.to_string(), k: 2, theta });
    }
    let pair = solve_k2_closed_form(theta)?;
    let sol = if measure == Measure::Mu1 { pair[0] } else { pair[1] };
    let s2 = spectrum_asymmetric_k2(sol.x)?.s2;
    let kappa = kappa_k2_closed_form(sol.x);
    let gamma = match kernel_of(&sol, 2, theta) {
        Ok(kern) => gamma_of(&kern),
        // within a few ulps of θ = 1 the closed-form pair can miss the
        // residual bound; fall back to the x-only matrix
        Err(_) => gamma_of_matrix(&k2_asymmetric_matrix(sol.x)),
    };
    let ks_value = kesten_stigum(2, s2).1;
    let msw_value = msw_extreme(2, kappa, gamma).1;
    Ok(ExtremalityVerdict {
        measure,
        // KS never holds here, so NonExtreme is never claimed
        verdict: decide(ks_value, msw_value, boundary_tol, false),
        solution: sol,
        s2,
        kappa,
        gamma,
        ks_value,
        msw_value,
    })
}

/// Classifies μ1 at `k = 2`, `0 < θ < 1`. μ2 has identical witnesses.
pub fn classify_mu12_k2(theta: f64, boundary_tol: f64) -> Result<ExtremalityVerdict> {
    k2_pair_verdict(theta, Measure::Mu1, boundary_tol)
}

/// Classifies any of μ0, μ1, μ2 at `(k, θ)`.
///
/// For `k ≥ 3` the asymmetric measures get a numeric `s₂`; they are
/// reported NonExtreme only when Kesten–Stigum strictly holds and are
/// otherwise Undetermined.
pub fn classify(k: u32, theta: f64, measure: Measure, boundary_tol: f64) -> Result<ExtremalityVerdict> {
    check_order(k)?;
    check_theta(theta)?;
    match (measure, k) {
        (Measure::Mu0, _) => classify_mu0(k, theta, boundary_tol),
        (_, 2) => k2_pair_verdict(theta, measure, boundary_tol),
        _ => {
            let absent = || Error::MeasureAbsent { measure: measure.to_string(), k, theta };
            let pair = solve_asymmetric(k, theta)?;
            let sol = *pair.iter().find(|s| s.branch == measure.branch()).ok_or_else(absent)?;
            let kern = kernel_of(&sol, k, theta)?;
            let s2 = spectrum_numeric(&kern).s2;
            let (kappa, gamma) = (kappa_of(&kern), gamma_of(&kern));
            let ks_value = kesten_stigum(k, s2).1;
            let msw_value = msw_extreme(k, kappa, gamma).1;
            let verdict = if ks_value > 1.0 + boundary_tol { Verdict::NonExtreme } else { Verdict::Undetermined };
            Ok(ExtremalityVerdict { measure, verdict, solution: sol, s2, kappa, gamma, ks_value, msw_value })
        }
    }
}

/// All measures existing at `(k, θ)`, ordered μ0, μ1, μ2.
pub fn classify_all(k: u32, theta: f64, boundary_tol: f64) -> Result<Vec<ExtremalityVerdict>> {
    let mut out = vec![classify_mu0(k, theta, boundary_tol)?];
    if theta < theta_cr(k)? - crate::tisgm::CRITICAL_TOL {
        for m in [Measure::Mu1, Measure::Mu2] {
            out.push(classify(k, theta, m, boundary_tol)?);
        }
    }
    Ok(out)
}

/// `h_k(θ) = k/(θy*^k + 1)² − 1`: the KS margin of μ0 for `θ ≤ 1`.
pub fn h_func(k: u32, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Domain(format!("h_func needs 0 < theta <= 1, got {theta}")));
    }
    let y = solve_symmetric(k, theta)?.y;
    let a = theta * y.powi(k as i32);
    Ok(k as f64 / ((a + 1.0) * (a + 1.0)) - 1.0)
}

/// `q_k(θ) = k·(θy*^k/(θy*^k + 1))² − 1`: the KS margin of μ0 for `θ ≥ 1`.
pub fn q_func(k: u32, theta: f64) -> Result<f64> {
    if !(theta >= 1.0 && theta.is_finite()) {
        return Err(Error::Domain(format!("q_func needs theta >= 1, got {theta}")));
    }
    let y = solve_symmetric(k, theta)?.y;
    let a = theta * y.powi(k as i32);
    let r = a / (a + 1.0);
    Ok(k as f64 * r * r - 1.0)
}

/// Lower μ0 threshold in radicals. With `θ = y/(2 − y^{k+1})` on the
/// symmetric branch, `1/(1+a) = (2 − y^{k+1})/2`, so `h_k = 0` at
/// `y^{k+1} = 2 − 2/√k` and `θ = y√k/2`.
pub fn lower_threshold_closed_form(k: u32) -> f64 {
    let rk = (k as f64).sqrt();
    let y = (2.0 - 2.0 / rk).powf(1.0 / (k + 1) as f64);
    y * rk / 2.0
}

/// Upper μ0 threshold in radicals: `q_k = 0` at `y^{k+1} = 2/√k`.
pub fn upper_threshold_closed_form(k: u32) -> f64 {
    let c = 2.0 / (k as f64).sqrt();
    let y = c.powf(1.0 / (k + 1) as f64);
    y / (2.0 - c)
}

/// `θ₁ = ½∛(4√2 − 4)`.
pub fn theta1_closed_form() -> f64 {
    0.5 * (4.0 * 2f64.sqrt() - 4.0).cbrt()
}

/// `θ₂ = ½∛(28 + 20√2)`.
pub fn theta2_closed_form() -> f64 {
    0.5 * (28.0 + 20.0 * 2f64.sqrt()).cbrt()
}

/// `θ₅ = ∛((2 + √(2 + 2√2)) / (2 + 2√2))`.
pub fn theta5_closed_form() -> f64 {
    let s2 = 2f64.sqrt();
    ((2.0 + (2.0 + 2.0 * s2).sqrt()) / (2.0 + 2.0 * s2)).cbrt()
}

/// `2κ² − 1` for μ1 at `k = 2`, with `x₁` from the η root (not the `ρ` formula).
pub fn mu1_k2_msw_margin(theta: f64) -> Result<f64> {
    let pair = solve_asymmetric(2, theta)?;
    let x1 = pair.first().ok_or(Error::MeasureAbsent { measure: "mu1".into(), k: 2, theta })?.x;
    let kappa = kappa_k2_closed_form(x1);
    Ok(2.0 * kappa * kappa - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    /// A formula stated in radicals.
    ClosedForm,
    /// Solved numerically from the defining function.
    RootFound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub name: String,
    /// Which measure the threshold refers to.
    pub measure: Measure,
    pub closed_form: f64,
    pub root_found: f64,
    /// Value quoted alongside the result in the literature (rounded).
    pub quoted: f64,
}

impl Threshold {
    pub fn difference(&self) -> f64 {
        (self.closed_form - self.root_found).abs()
    }

    pub fn value(&self, provenance: Provenance) -> f64 {
        match provenance {
            Provenance::ClosedForm => self.closed_form,
            Provenance::RootFound => self.root_found,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdTable {
    pub k: u32,
    pub entries: Vec<Threshold>,
}

impl ThresholdTable {
    pub fn get(&self, name: &str) -> Option<&Threshold> {
        self.entries.iter().find(|t| t.name == name)
    }
}

pub const NO_THRESHOLDS_NOTE: &str =
    "for k >= 4 the symmetric measure mu0 is non-extreme for every theta > 0 (k*s2^2 >= 1 everywhere, \
     with equality only at k = 4, theta = 1); there are no extremality thresholds";

fn root_cfg() -> RootConfig {
    RootConfig { abs_tol: 1e-13, ..RootConfig::default() }
}

/// Root of the decreasing `h_k` on `(0, 1]`.
pub fn root_of_h(k: u32) -> Result<f64> {
    let h = |t: f64| h_func(k, t).unwrap_or(f64::NAN);
    let bracket = Bracket::new(h, 1e-3, 1.0)?;
    Ok(find_root(h, &bracket, &root_cfg())?)
}

/// Root of the increasing `q_k` on `[1, ∞)`.
pub fn root_of_q(k: u32) -> Result<f64> {
    let neg_q = |t: f64| -q_func(k, t).unwrap_or(f64::NAN);
    let bracket = expand_bracket_decreasing(neg_q, 1.0, 0.0)?;
    Ok(find_root(neg_q, &bracket, &root_cfg())?)
}

/// Root in `θ` of `2κ² = 1` for the `k = 2` asymmetric measures.
pub fn root_of_k2_msw() -> Result<f64> {
    let g = |t: f64| mu1_k2_msw_margin(t).unwrap_or(f64::NAN);
    let bracket = Bracket::new(g, 0.5, 1.0 - 1e-6)?;
    Ok(find_root(g, &bracket, &root_cfg())?)
}

/// Thresholds for `k = 2` (θ₁, θ₂, θ₅) and `k = 3` (θ₃, θ₄).
pub fn thresholds(k: u32) -> Result<ThresholdTable> {
    check_order(k)?;
    let entries = match k {
        2 => vec![
            Threshold {
                name: "theta1".into(),
                measure: Measure::Mu0,
                closed_form: theta1_closed_form(),
                root_found: root_of_h(2)?,
                quoted: 0.5916,
            },
            Threshold {
                name: "theta2".into(),
                measure: Measure::Mu0,
                closed_form: theta2_closed_form(),
                root_found: root_of_q(2)?,
                quoted: 1.9161,
            },
            Threshold {
                name: "theta5".into(),
                measure: Measure::Mu1,
                closed_form: theta5_closed_form(),
                root_found: root_of_k2_msw()?,
                quoted: 0.954,
            },
        ],
        3 => vec![
            Threshold {
                name: "theta3".into(),
                measure: Measure::Mu0,
                closed_form: lower_threshold_closed_form(3),
                root_found: root_of_h(3)?,
                quoted: 0.801,
            },
            Threshold {
                name: "theta4".into(),
                measure: Measure::Mu0,
                closed_form: upper_threshold_closed_form(3),
                root_found: root_of_q(3)?,
                quoted: 1.8462,
            },
        ],
        _ => return Err(Error::Unsupported(NO_THRESHOLDS_NOTE.into())),
    };
    Ok(ThresholdTable { k, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn ks_examples() {
        assert_eq!(kesten_stigum(2, 0.5), (false, 0.5));
        assert_eq!(kesten_stigum(4, 0.5), (false, 1.0));
        let y = solve_symmetric(4, 0.5).unwrap().y;
        let s2 = spectrum_symmetric(y, 0.5, 4).s2;
        assert!(kesten_stigum(4, s2).0);
    }

    #[test]
    fn msw_examples() {
        assert_eq!(msw_extreme(2, 0.5, 0.5), (true, 0.5));
        let x = (1.0 + 2f64.sqrt()).sqrt() - 1e-6;
        let kappa = kappa_k2_closed_form(x);
        assert!(msw_extreme(2, kappa, kappa).0);
        let (ok, v) = msw_extreme(3, 0.6, 0.6);
        assert!(!ok && close(v, 1.08, 1e-12));
    }

    #[test]
    fn mu0_examples() {
        let tol = DEFAULT_BOUNDARY_TOL;
        assert_eq!(classify_mu0(2, 0.3, tol).unwrap().verdict, Verdict::NonExtreme);
        assert_eq!(classify_mu0(2, 1.0, tol).unwrap().verdict, Verdict::Extreme);
        assert_eq!(classify_mu0(5, 2.5, tol).unwrap().verdict, Verdict::NonExtreme);
        assert_eq!(classify_mu0(2, 2.5, tol).unwrap().verdict, Verdict::NonExtreme);
        // k = 4, θ = 1 sits exactly on k·s₂² = 1
        let v = classify_mu0(4, 1.0, tol).unwrap();
        assert_eq!(v.verdict, Verdict::Undetermined);
        assert!(close(v.ks_value, 1.0, 1e-12));
    }

    #[test]
    fn mu0_ks_equals_msw() {
        for k in 2..8 {
            for theta in [0.1, 0.6, 0.99, 1.0, 1.01, 1.9, 4.0] {
                let v = classify_mu0(k, theta, DEFAULT_BOUNDARY_TOL).unwrap();
                assert!(close(v.ks_value, v.msw_value, 1e-12), "k={k} θ={theta}");
            }
        }
    }

    #[test]
    fn mu12_examples() {
        let tol = DEFAULT_BOUNDARY_TOL;
        assert_eq!(classify_mu12_k2(0.98, tol).unwrap().verdict, Verdict::Extreme);
        assert_eq!(classify_mu12_k2(0.5, tol).unwrap().verdict, Verdict::Undetermined);
        assert!(matches!(classify_mu12_k2(1.2, tol), Err(Error::MeasureAbsent { .. })));
        assert!(matches!(classify_mu12_k2(1.0, tol), Err(Error::MeasureAbsent { .. })));
        for theta in [0.05, 0.3, 0.7, 0.95, 0.999] {
            let v = classify_mu12_k2(theta, tol).unwrap();
            assert!(v.ks_value < 1.0);
            assert_ne!(v.verdict, Verdict::NonExtreme);
            let mu2 = classify(2, theta, Measure::Mu2, tol).unwrap();
            assert!(close(mu2.kappa, v.kappa, 1e-12) && close(mu2.s2, v.s2, 1e-12));
            assert_eq!(mu2.verdict, v.verdict);
        }
    }

    #[test]
    fn asymmetric_general_k() {
        let tol = DEFAULT_BOUNDARY_TOL;
        let v = classify(3, 1.2, Measure::Mu1, tol).unwrap();
        assert_ne!(v.verdict, Verdict::Extreme);
        assert!(matches!(classify(3, 2.0, Measure::Mu1, tol), Err(Error::MeasureAbsent { .. })));
        let all = classify_all(3, 1.2, tol).unwrap();
        assert_eq!(all.len(), 3);
        assert_eq!(classify_all(3, 2.0, tol).unwrap().len(), 1);
    }

    #[test]
    fn h_and_q_values() {
        assert!(close(h_func(2, 0.2).unwrap(), 0.8846, 1e-3));
        assert!(close(h_func(2, 1.0).unwrap(), -0.5, 1e-12));
        assert!(close(q_func(2, 1.0).unwrap(), -0.5, 1e-12));
        assert!(close(q_func(2, 4.0).unwrap(), 0.4476, 1e-3));
        // 40-digit references
        assert!(close(h_func(2, 0.2).unwrap(), 0.884_628_039_469_262_6, 1e-11));
        assert!(close(q_func(2, 4.0).unwrap(), 0.447_617_791_942_938_5, 1e-11));
        assert!(h_func(2, 1.5).is_err());
        assert!(q_func(2, 0.5).is_err());
    }

    #[test]
    fn closed_form_thresholds() {
        assert!(close(theta1_closed_form(), 0.591_649_869_417_972_2, 1e-15));
        assert!(close(theta2_closed_form(), 1.916_162_574_293_472_7, 1e-14));
        assert!(close(theta5_closed_form(), 0.954_385_421_100_026_7, 1e-15));
        assert!(close(lower_threshold_closed_form(2), theta1_closed_form(), 1e-14));
        assert!(close(upper_threshold_closed_form(2), theta2_closed_form(), 1e-14));
        assert!(close(lower_threshold_closed_form(3), 0.830_392_235_676_294_5, 1e-14));
        assert!(close(upper_threshold_closed_form(3), 1.226_328_297_477_568_3, 1e-14));
    }

    #[test]
    fn threshold_tables() {
        let t2 = thresholds(2).unwrap();
        for entry in &t2.entries {
            assert!(entry.difference() < 1e-8, "{entry:?}");
        }
        let (t1, th2, t5) = (t2.get("theta1").unwrap(), t2.get("theta2").unwrap(), t2.get("theta5").unwrap());
        assert!(t1.root_found < th2.root_found && t5.root_found < 1.0);

        let t3 = thresholds(3).unwrap();
        let (a, b) = (t3.get("theta3").unwrap(), t3.get("theta4").unwrap());
        assert!(a.difference() < 1e-8 && b.difference() < 1e-8);
        assert!(a.root_found < b.root_found);

        assert!(matches!(thresholds(4), Err(Error::Unsupported(_))));
    }

    #[test]
    fn verdict_roundtrip() {
        for v in [Verdict::Extreme, Verdict::NonExtreme, Verdict::Undetermined] {
            assert_eq!(v.as_str().parse::<Verdict>().unwrap(), v);
        }
    }
}
