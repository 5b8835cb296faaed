//! Tree-indexed Markov chain of a translation-invariant measure.
//!
//! A solution `(x, y)` gives the 3×3 transition matrix
//!
//! ```text
//! | x^k/(x^k+a)   a/(x^k+a)    0         |
//! | x^k/(1+x^k)   0            1/(1+x^k) |      a = θ y^k
//! | 0             a/(1+a)      1/(1+a)   |
//! ```
//!
//! whose second eigenvalue feeds the Kesten–Stigum test and whose row
//! distances give the `κ`, `γ` of the MSW extremality test.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_order, check_theta, TisgmSolution};
use crate::tisgm::RESIDUAL_TOL;

/// Imaginary parts above this mark a spectrum as complex.
pub const COMPLEX_TOL: f64 = 1e-10;

pub type Matrix3 = [[f64; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionKernel {
    p: Matrix3,
    source: TisgmSolution,
    k: u32,
    theta: f64,
}

impl TransitionKernel {
    pub fn p(&self) -> &Matrix3 {
        &self.p
    }

    pub fn source(&self) -> &TisgmSolution {
        &self.source
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn row_sums(&self) -> [f64; 3] {
        self.p.map(|r| r.iter().sum())
    }

    /// `v P` for a row vector `v`.
    pub fn left_apply(&self, v: &[f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, vi) in v.iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                *o += vi * self.p[i][j];
            }
        }
        out
    }
}

/// Transition matrix of the chain built on `sol`.
pub fn kernel_of(sol: &TisgmSolution, k: u32, theta: f64) -> Result<TransitionKernel> {
    check_order(k)?;
    check_theta(theta)?;
    let residual = sol.residual(k, theta);
    if !(residual < RESIDUAL_TOL) {
        return Err(Error::Consistency {
            what: format!("kernel source ({}, {}) is not a fixed point at k = {k}, theta = {theta}", sol.x, sol.y),
            residual,
        });
    }
    let xk = sol.x.powi(k as i32);
    let a = theta * sol.y.powi(k as i32);
    let p = [
        [xk / (xk + a), a / (xk + a), 0.0],
        [xk / (1.0 + xk), 0.0, 1.0 / (1.0 + xk)],
        [0.0, a / (1.0 + a), 1.0 / (1.0 + a)],
    ];
    if p.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Consistency {
            what: format!("degenerate kernel for ({}, {})", sol.x, sol.y),
            residual: f64::NAN,
        });
    }
    Ok(TransitionKernel { p, source: *sol, k, theta })
}

/// The `k = 2` asymmetric kernel written in `x` alone (it uses `θy² = x`).
pub fn k2_asymmetric_matrix(x: f64) -> Matrix3 {
    let x2 = x * x;
    [
        [x / (x + 1.0), 1.0 / (x + 1.0), 0.0],
        [x2 / (1.0 + x2), 0.0, 1.0 / (1.0 + x2)],
        [0.0, x / (1.0 + x), 1.0 / (1.0 + x)],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Sorted by descending modulus; the first entry is the Perron root 1.
    /// For a complex pair only the real parts are stored.
    pub eigenvalues: [f64; 3],
    /// Modulus of the second eigenvalue.
    pub s2: f64,
    /// The second eigenvalue with its sign (real part if complex).
    pub s2_signed: f64,
    pub closed_form_used: bool,
    pub complex: bool,
}

impl SpectrumReport {
    fn real(second: f64, third: f64, closed_form_used: bool) -> Self {
        let (a, b) = if second.abs() >= third.abs() { (second, third) } else { (third, second) };
        Self { eigenvalues: [1.0, a, b], s2: a.abs(), s2_signed: a, closed_form_used, complex: false }
    }
}

/// Closed-form spectrum of the symmetric kernel: `{1, −a/(a+1), 1/(a+1)}`.
///
/// The second eigenvalue is `1/(a+1)` for `θ ≤ 1` and `−a/(a+1)` for `θ > 1`.
pub fn spectrum_symmetric(y: f64, theta: f64, k: u32) -> SpectrumReport {
    let a = theta * y.powi(k as i32);
    let lambda1 = -a / (a + 1.0);
    let lambda2 = 1.0 / (a + 1.0);
    let (second, third) = if theta <= 1.0 { (lambda2, lambda1) } else { (lambda1, lambda2) };
    SpectrumReport {
        eigenvalues: [1.0, second, third],
        s2: second.abs(),
        s2_signed: second,
        closed_form_used: true,
        complex: false,
    }
}

/// `s₂ = √2·x / ((x+1)√(x²+1))`; the spectrum is `{1, s₂, −s₂}`.
pub fn s2_asymmetric_k2(x: f64) -> f64 {
    2f64.sqrt() * x / ((x + 1.0) * (x * x + 1.0).sqrt())
}

pub fn spectrum_asymmetric_k2(x: f64) -> Result<SpectrumReport> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    let s2 = s2_asymmetric_k2(x);
    Ok(SpectrumReport { eigenvalues: [1.0, s2, -s2], s2, s2_signed: s2, closed_form_used: true, complex: false })
}

/// Eigenvalues of a row-stochastic 3×3 matrix.
///
/// The root `1` is divided out of the characteristic cubic, leaving
/// `λ² − (tr − 1)λ + det`, which is solved in closed form.
pub fn spectrum_of_matrix(p: &Matrix3) -> SpectrumReport {
    let tr = p[0][0] + p[1][1] + p[2][2];
    let det = p[0][0] * (p[1][1] * p[2][2] - p[1][2] * p[2][1])
        - p[0][1] * (p[1][0] * p[2][2] - p[1][2] * p[2][0])
        + p[0][2] * (p[1][0] * p[2][1] - p[1][1] * p[2][0]);
    let b = 1.0 - tr;
    let c = det;
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q, c / q) };
        SpectrumReport::real(r1, r2, false)
    } else {
        let re = -b / 2.0;
        let im = (-disc).sqrt() / 2.0;
        if im > COMPLEX_TOL {
            let modulus = c.max(0.0).sqrt();
            SpectrumReport {
                eigenvalues: [1.0, re, re],
                s2: modulus,
                s2_signed: re,
                closed_form_used: false,
                complex: true,
            }
        } else {
            SpectrumReport::real(re, re, false)
        }
    }
}

pub fn spectrum_numeric(kern: &TransitionKernel) -> SpectrumReport {
    spectrum_of_matrix(&kern.p)
}

/// Characteristic polynomial `det(λI − P)`.
pub fn characteristic(p: &Matrix3, lambda: f64) -> f64 {
    let m = [
        [lambda - p[0][0], -p[0][1], -p[0][2]],
        [-p[1][0], lambda - p[1][1], -p[1][2]],
        [-p[2][0], -p[2][1], lambda - p[2][2]],
    ];
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Stationary distribution `π P = π`, `Σπ = 1`.
///
/// `π_i` is proportional to the principal minor of `I − P` with row and
/// column `i` removed, expanded as a sum of products of off-diagonal
/// entries (spanning trees into `i`). No term is subtracted, so rows with
/// entries far below machine epsilon keep full relative precision.
pub fn stationary(kern: &TransitionKernel) -> Result<[f64; 3]> {
    let p = &kern.p;
    let weight = |i: usize| {
        let (a, b) = match i {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        p[a][b] * p[b][i] + p[a][i] * p[b][a] + p[a][i] * p[b][i]
    };
    let w = [weight(0), weight(1), weight(2)];
    let total: f64 = w.iter().sum();
    if !(total > 0.0 && total.is_finite()) || w.iter().any(|v| *v < 0.0) {
        return Err(Error::Consistency { what: "singular stationary solve".into(), residual: total });
    }
    Ok(w.map(|v| v / total))
}

fn half_l1(p: &Matrix3, i: usize, j: usize) -> f64 {
    0.5 * (0..3).map(|l| (p[i][l] - p[j][l]).abs()).sum::<f64>()
}

/// `κ = ½ max_{i,j} Σ_l |P_il − P_jl|`.
pub fn kappa_of(kern: &TransitionKernel) -> f64 {
    kappa_of_matrix(&kern.p)
}

pub fn kappa_of_matrix(p: &Matrix3) -> f64 {
    let mut best = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            best = best.max(half_l1(p, i, j));
        }
    }
    best
}

/// `γ` from the three boundary-spin swaps `0↔1`, `1↔2`, `0↔2`.
pub fn gamma_of(kern: &TransitionKernel) -> f64 {
    gamma_of_matrix(&kern.p)
}

pub fn gamma_of_matrix(p: &Matrix3) -> f64 {
    let d01 = half_l1(p, 0, 1);
    let d12 = half_l1(p, 1, 2);
    let d02 = half_l1(p, 0, 2);
    d01.max(d12).max(d02)
}

/// `κ` of the symmetric kernel: `1/(1+a)` below `θ = 1`, `a/(1+a)` above.
pub fn kappa_symmetric_closed_form(y: f64, theta: f64, k: u32) -> f64 {
    let a = theta * y.powi(k as i32);
    if theta < 1.0 {
        1.0 / (1.0 + a)
    } else {
        a / (1.0 + a)
    }
}

/// `κ` of the `k = 2` asymmetric kernel: `x²/(x²+1)` for `x > 1`, `1/(x²+1)` for `x < 1`.
pub fn kappa_k2_closed_form(x: f64) -> f64 {
    let x2 = x * x;
    if x > 1.0 {
        x2 / (x2 + 1.0)
    } else {
        1.0 / (x2 + 1.0)
    }
}
