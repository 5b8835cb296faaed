//! Model parameters, the wand admissibility graph and the edge activity.
//!
//! Spins live in `{0, 1, ..., m}` with `m` even. Two neighbouring spins are
//! admissible when they differ by one, or when they are equal and even
//! (loops sit on the even spins only). Admissible edges between different
//! spins carry weight `θ`; loops carry weight `1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Band around `x = 1` inside which a solution is tagged [`Branch::Symmetric`].
pub const BRANCH_TOL: f64 = 1e-9;

/// One model instance: tree order `k`, coupling `θ = e^J` and spin range `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    k: u32,
    theta: f64,
    m: usize,
}

impl ModelParams {
    pub fn new(k: u32, theta: f64, m: usize) -> Result<Self> {
        check_order(k)?;
        check_theta(theta)?;
        if m < 2 || !m.is_multiple_of(2) {
            return Err(Error::Domain(format!("m must be even and >= 2, got {m}")));
        }
        Ok(Self { k, theta, m })
    }

    /// The three-state model (`m = 2`) studied in closed form.
    pub fn three_state(k: u32, theta: f64) -> Result<Self> {
        Self::new(k, theta, 2)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn admissibility(&self) -> WandAdmissibility {
        WandAdmissibility { m: self.m }
    }

    pub fn activity(&self) -> Activity {
        Activity { m: self.m, theta: self.theta }
    }
}

pub(crate) fn check_order(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::Domain(format!("tree order k must be >= 2, got {k}")));
    }
    Ok(())
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::Domain(format!("theta must be positive and finite, got {theta}")));
    }
    Ok(())
}

/// Edge predicate of the wand graph on `{0, ..., m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WandAdmissibility {
    m: usize,
}

impl WandAdmissibility {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 || !m.is_multiple_of(2) {
            return Err(Error::Domain(format!("m must be even and >= 2, got {m}")));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_admissible(&self, i: usize, j: usize) -> Result<bool> {
        check_spin(i, self.m)?;
        check_spin(j, self.m)?;
        Ok(i.abs_diff(j) == 1 || (i == j && i.is_multiple_of(2)))
    }
}

/// Edge weights `λ_ij`: `1` on even loops, `θ` between neighbours, `0` elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Activity {
    m: usize,
    theta: f64,
}

impl Activity {
    pub fn new(m: usize, theta: f64) -> Result<Self> {
        WandAdmissibility::new(m)?;
        check_theta(theta)?;
        Ok(Self { m, theta })
    }

    pub fn activity_of(&self, i: usize, j: usize) -> Result<f64> {
        check_spin(i, self.m)?;
        check_spin(j, self.m)?;
        Ok(self.weight(i, j))
    }

    // Unchecked; callers iterate over 0..=m.
    pub(crate) fn weight(&self, i: usize, j: usize) -> f64 {
        if i == j && i.is_multiple_of(2) {
            1.0
        } else if i.abs_diff(j) == 1 {
            self.theta
        } else {
            0.0
        }
    }
}

fn check_spin(s: usize, m: usize) -> Result<()> {
    if s > m {
        return Err(Error::SpinOutOfRange { spin: s, m });
    }
    Ok(())
}

/// Which fixed point of the `m = 2` system a solution is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `x = 1`, the measure μ0.
    Symmetric,
    /// `x > 1`, the measure μ1.
    Upper,
    /// `x < 1`, the measure μ2.
    Lower,
}

impl Branch {
    pub fn from_x(x: f64) -> Self {
        if (x - 1.0).abs() < BRANCH_TOL {
            Branch::Symmetric
        } else if x > 1.0 {
            Branch::Upper
        } else {
            Branch::Lower
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Symmetric => "symmetric",
            Branch::Upper => "upper",
            Branch::Lower => "lower",
        }
    }

    pub fn measure(&self) -> Measure {
        match self {
            Branch::Symmetric => Measure::Mu0,
            Branch::Upper => Measure::Mu1,
            Branch::Lower => Measure::Mu2,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(Branch::Symmetric),
            "upper" => Ok(Branch::Upper),
            "lower" => Ok(Branch::Lower),
            other => Err(Error::Domain(format!("unknown branch {other:?}"))),
        }
    }
}

/// The translation-invariant measures, named after the solution they come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Mu0,
    Mu1,
    Mu2,
}

impl Measure {
    pub fn branch(&self) -> Branch {
        match self {
            Measure::Mu0 => Branch::Symmetric,
            Measure::Mu1 => Branch::Upper,
            Measure::Mu2 => Branch::Lower,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Measure::Mu0 => "mu0",
            Measure::Mu1 => "mu1",
            Measure::Mu2 => "mu2",
        })
    }
}

/// A positive fixed point `(x, y)` of the `m = 2` compatibility system, where
/// `x = z0^{1/k}` and `y = z1^{1/k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TisgmSolution {
    pub x: f64,
    pub y: f64,
    pub branch: Branch,
}

impl TisgmSolution {
    /// Tags the branch from `x`.
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
            return Err(Error::Domain(format!("solution must be positive, got ({x}, {y})")));
        }
        Ok(Self { x, y, branch: Branch::from_x(x) })
    }

    /// Relative residual of both equations
    /// `x = (x^k + θy^k)/(1 + θy^k)` and `y = θ(x^k + 1)/(1 + θy^k)`.
    pub fn residual(&self, k: u32, theta: f64) -> f64 {
        let xk = self.x.powi(k as i32);
        let a = theta * self.y.powi(k as i32);
        let rhs_x = (xk + a) / (1.0 + a);
        let rhs_y = theta * (xk + 1.0) / (1.0 + a);
        let rx = (self.x - rhs_x).abs() / self.x.abs().max(1.0);
        let ry = (self.y - rhs_y).abs() / self.y.abs().max(1.0);
        rx.max(ry)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility_examples() {
        let a = WandAdmissibility::new(2).unwrap();
        assert!(a.is_admissible(0, 1).unwrap());
        assert!(!a.is_admissible(1, 1).unwrap());
        assert!(!a.is_admissible(0, 2).unwrap());
        assert!(a.is_admissible(2, 2).unwrap());
        assert!(matches!(a.is_admissible(3, 0), Err(Error::SpinOutOfRange { spin: 3, m: 2 })));
    }

    #[test]
    fn activity_examples() {
        let act = Activity::new(2, 0.7).unwrap();
        assert_eq!(act.activity_of(2, 2).unwrap(), 1.0);
        assert_eq!(act.activity_of(1, 2).unwrap(), 0.7);
        assert_eq!(act.activity_of(0, 2).unwrap(), 0.0);
        assert!(act.activity_of(0, 5).is_err());
    }

    #[test]
    fn exhaustive_symmetry_and_support() {
        for m in (2..=20).step_by(2) {
            let a = WandAdmissibility::new(m).unwrap();
            let act = Activity::new(m, 1.3).unwrap();
            for i in 0..=m {
                for j in 0..=m {
                    let adm = a.is_admissible(i, j).unwrap();
                    assert_eq!(adm, a.is_admissible(j, i).unwrap());
                    assert_eq!(adm, act.activity_of(i, j).unwrap() != 0.0, "m={m} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn params_domain() {
        assert!(ModelParams::new(1, 0.5, 2).is_err());
        assert!(ModelParams::new(2, 0.0, 2).is_err());
        assert!(ModelParams::new(2, f64::NAN, 2).is_err());
        assert!(ModelParams::new(2, 0.5, 3).is_err());
        assert!(ModelParams::new(2, 0.5, 0).is_err());
        let p = ModelParams::new(3, 0.5, 4).unwrap();
        assert_eq!((p.k(), p.theta(), p.m()), (3, 0.5, 4));
    }

    #[test]
    fn branch_tagging() {
        assert_eq!(Branch::from_x(1.0 + 5e-10), Branch::Symmetric);
        assert_eq!(Branch::from_x(1.0 + 2e-9), Branch::Upper);
        assert_eq!(Branch::from_x(0.5), Branch::Lower);
        assert_eq!("upper".parse::<Branch>().unwrap(), Branch::Upper);
    }

    #[test]
    fn trivial_fixed_point_residual() {
        let s = TisgmSolution::new(1.0, 1.0).unwrap();
        assert_eq!(s.residual(2, 1.0), 0.0);
        assert!(TisgmSolution::new(-1.0, 1.0).is_err());
    }
}
