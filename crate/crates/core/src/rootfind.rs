//! Certified bracketed root finding for scalar functions.
//!
//! Bisection does the work; an optional secant step on the final bracket
//! (a Newton step with the bracket's slope as derivative) is kept only when
//! it lands inside the bracket and lowers `|f|`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("f({x}) = {fx} is not finite")]
    NotFinite { x: f64, fx: f64 },

    /// Iteration budget exhausted; carries the best estimate so far.
    #[error("no convergence after {iterations} iterations, best estimate {best} in [{lo}, {hi}]")]
    MaxIter { iterations: usize, best: f64, lo: f64, hi: f64 },

    #[error("f(lo) = {f_lo} is not above the target {target}")]
    StartBelowTarget { lo: f64, f_lo: f64, target: f64 },

    #[error("no bracket found after {doublings} doublings (last hi = {hi})")]
    Unbounded { doublings: u32, hi: f64 },

    #[error("invalid root configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(v: f64) -> Sign {
        if v > 0.0 {
            Sign::Positive
        } else if v < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Sign::Negative => "-",
            Sign::Zero => "0",
            Sign::Positive => "+",
        })
    }
}

/// An interval `[lo, hi]` on which a function was seen to change sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    lo: f64,
    hi: f64,
    f_lo_sign: Sign,
    f_hi_sign: Sign,
}

impl Bracket {
    /// Evaluates `f` at both ends and certifies the sign change.
    /// A zero at either end counts as a sign change.
    pub fn new<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<Self, RootError> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(RootError::InvalidInterval { lo, hi });
        }
        let (f_lo, f_hi) = (f(lo), f(hi));
        for (x, fx) in [(lo, f_lo), (hi, f_hi)] {
            if fx.is_nan() {
                return Err(RootError::NotFinite { x, fx });
            }
        }
        let (s_lo, s_hi) = (Sign::of(f_lo), Sign::of(f_hi));
        if s_lo == s_hi {
            return Err(RootError::NoSignChange { lo, hi, f_lo, f_hi });
        }
        Ok(Self { lo, hi, f_lo_sign: s_lo, f_hi_sign: s_hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn f_lo_sign(&self) -> Sign {
        self.f_lo_sign
    }

    pub fn f_hi_sign(&self) -> Sign {
        self.f_hi_sign
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootConfig {
    pub abs_tol: f64,
    pub max_iter: usize,
    pub polish: bool,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-12, max_iter: 200, polish: true }
    }
}

impl RootConfig {
    pub fn validate(&self) -> Result<(), RootError> {
        if !(self.abs_tol > 0.0) {
            return Err(RootError::Config(format!("abs_tol must be > 0, got {}", self.abs_tol)));
        }
        if self.max_iter == 0 {
            return Err(RootError::Config("max_iter must be >= 1".into()));
        }
        Ok(())
    }
}

/// Outcome of [`solve`], with the final bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootReport {
    pub root: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
    pub polished: bool,
}

/// Root of `f` inside `b`. See [`solve`].
pub fn find_root<F: Fn(f64) -> f64>(f: F, b: &Bracket, cfg: &RootConfig) -> Result<f64, RootError> {
    solve(f, b, cfg).map(|r| r.root)
}

/// Bisects until the bracket is narrower than `abs_tol` or no float lies
/// strictly inside it, then optionally polishes.
pub fn solve<F: Fn(f64) -> f64>(f: F, b: &Bracket, cfg: &RootConfig) -> Result<RootReport, RootError> {
    cfg.validate()?;
    let (mut lo, mut hi) = (b.lo, b.hi);
    let (mut f_lo, mut f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Ok(RootReport { root: lo, lo, hi: lo, iterations: 0, polished: false });
    }
    if f_hi == 0.0 {
        return Ok(RootReport { root: hi, lo: hi, hi, iterations: 0, polished: false });
    }
    if Sign::of(f_lo) == Sign::of(f_hi) {
        return Err(RootError::NoSignChange { lo, hi, f_lo, f_hi });
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        let mid = lo + 0.5 * (hi - lo);
        if hi - lo <= cfg.abs_tol || mid <= lo || mid >= hi {
            converged = true;
            break;
        }
        let f_mid = f(mid);
        if f_mid.is_nan() {
            return Err(RootError::NotFinite { x: mid, fx: f_mid });
        }
        iterations += 1;
        if f_mid == 0.0 {
            return Ok(RootReport { root: mid, lo: mid, hi: mid, iterations, polished: false });
        }
        if Sign::of(f_mid) == Sign::of(f_lo) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    if !converged {
        let mid = lo + 0.5 * (hi - lo);
        converged = hi - lo <= cfg.abs_tol || mid <= lo || mid >= hi;
    }

    let (mut root, f_root) = if f_lo.abs() <= f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    if !converged {
        return Err(RootError::MaxIter { iterations, best: root, lo, hi });
    }

    let mut polished = false;
    if cfg.polish && f_hi != f_lo {
        let candidate = lo - f_lo * (hi - lo) / (f_hi - f_lo);
        if candidate >= lo && candidate <= hi {
            let f_c = f(candidate);
            if f_c.abs() < f_root.abs() {
                root = candidate;
                polished = true;
            }
        }
    }
    Ok(RootReport { root, lo, hi, iterations, polished })
}

const MAX_DOUBLINGS: u32 = 60;

/// Brackets `f(x) = target` for `f` strictly decreasing on `[lo, ∞)` with
/// `f(lo) > target`. The step from the last good point doubles until `f`
/// drops below the target. The returned bracket is for `x ↦ f(x) - target`.
pub fn expand_bracket_decreasing<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    target: f64,
) -> Result<Bracket, RootError> {
    let f_lo = f(lo);
    if !(f_lo > target) {
        return Err(RootError::StartBelowTarget { lo, f_lo, target });
    }
    let mut left = lo;
    let mut step = 1.0;
    for _ in 0..MAX_DOUBLINGS {
        let hi = lo + step;
        let f_hi = f(hi);
        if f_hi.is_nan() {
            return Err(RootError::NotFinite { x: hi, fx: f_hi });
        }
        if f_hi <= target {
            return Bracket::new(|x| f(x) - target, left, hi);
        }
        left = hi;
        step *= 2.0;
    }
    Err(RootError::Unbounded { doublings: MAX_DOUBLINGS, hi: lo + step / 2.0 })
}
