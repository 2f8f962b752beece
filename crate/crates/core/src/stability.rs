//! Linear stability of the homogeneous equilibrium and Turing conditions.
//!
//! Perturbations `w ∝ e^{ℓt} cos(k·x)` around the equilibrium satisfy
//! `ℓ² + a(k²) ℓ + b(k²) = 0` with
//!
//! ```text
//! a(k²) = k² tr(D̂) − tr(J)
//! b(k²) = det(D̂) k⁴ + g k² + det(J)
//! g     = −(D̂11 J22 + D̂22 J11 − D̂12 J21 − D̂21 J12)
//! ```
//!
//! where `D̂` is the diffusion matrix linearized at the equilibrium. In
//! ratio form (`δ = D̂22/D̂11`, `δij = D̂ij/D̂11`) the two Turing conditions
//! are `s1 < 0` (that is `g < 0`) and `s2 > 0` (`g² > 4 det D̂ det J`).

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{jacobian, positive_equilibrium, Jacobian, ModelParams};

/// Diffusion matrix of the linearized system at the equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearizedDiffusion {
    pub d11: f64,
    pub d12: f64,
    pub d21: f64,
    pub d22: f64,
}

impl LinearizedDiffusion {
    pub fn diagonal(d11: f64, d22: f64) -> Self {
        LinearizedDiffusion {
            d11,
            d12: 0.0,
            d21: 0.0,
            d22,
        }
    }

    pub fn delta(&self) -> f64 {
        self.d22 / self.d11
    }

    pub fn delta12(&self) -> f64 {
        self.d12 / self.d11
    }

    pub fn delta21(&self) -> f64 {
        self.d21 / self.d11
    }

    pub fn trace(&self) -> f64 {
        self.d11 + self.d22
    }

    pub fn det(&self) -> f64 {
        self.d11 * self.d22 - self.d12 * self.d21
    }
}

/// `D̂ii = c_i(n̄)² D_i`, `D̂ij = −c_i(n̄) D_i n̄_i λ_i(n̄)`.
pub fn linearized_diffusion(p: &ModelParams) -> Result<LinearizedDiffusion> {
    let eq = positive_equilibrium(p)?;
    let (n1, n2) = (eq.n1, eq.n2);
    let c1 = p.c1_at(n1, n2)?;
    let c2 = p.c2_at(n1, n2)?;
    let l1 = p.lam1_at(n1, n2)?;
    let l2 = p.lam2_at(n1, n2)?;
    let d1 = p.d1;
    let d2 = p.d2()?;
    Ok(LinearizedDiffusion {
        d11: c1 * c1 * d1,
        d12: -c1 * d1 * n1 * l1,
        d21: -c2 * d2 * n2 * l2,
        d22: c2 * c2 * d2,
    })
}

/// Stability of the equilibrium to spatially uniform perturbations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomogeneousStability {
    NoPositiveEquilibrium,
    Unstable,
    /// `tr(J) = 0`: a pair of purely imaginary eigenvalues.
    HopfBoundary,
    Stable,
}

/// Relative tolerance on `tr(J)` for [`HomogeneousStability::HopfBoundary`].
pub const HOPF_TOL: f64 = 1e-12;

pub fn homogeneous_stability(p: &ModelParams) -> HomogeneousStability {
    if !p.has_positive_equilibrium() {
        return HomogeneousStability::NoPositiveEquilibrium;
    }
    let Ok(jac) = jacobian(p) else {
        return HomogeneousStability::NoPositiveEquilibrium;
    };
    let scale = jac.j[0][0].abs() + jac.j[1][1].abs();
    if jac.trace.abs() <= HOPF_TOL * scale {
        HomogeneousStability::HopfBoundary
    } else if jac.trace > 0.0 {
        HomogeneousStability::Unstable
    } else {
        HomogeneousStability::Stable
    }
}

/// `g`, the `k²` coefficient of `b(k²)`.
pub fn g_coefficient(jac: &Jacobian, d: &LinearizedDiffusion) -> f64 {
    let j = &jac.j;
    -(d.d11 * j[1][1] + d.d22 * j[0][0] - d.d12 * j[1][0] - d.d21 * j[0][1])
}

/// `a(k²)` and `b(k²)` of the dispersion relation.
pub fn dispersion_coefficients(jac: &Jacobian, d: &LinearizedDiffusion, k2: f64) -> (f64, f64) {
    let a = k2 * d.trace() - jac.trace;
    let b = d.det() * k2 * k2 + g_coefficient(jac, d) * k2 + jac.det;
    (a, b)
}

/// Largest real part of the roots of `ℓ² + a ℓ + b = 0`.
pub fn max_real_root(a: f64, b: f64) -> f64 {
    let disc = a * a - 4.0 * b;
    if disc >= 0.0 {
        0.5 * (-a + disc.sqrt())
    } else {
        -0.5 * a
    }
}

/// Growth rate of the mode with wavenumber `k²`.
pub fn growth_rate(jac: &Jacobian, d: &LinearizedDiffusion, k2: f64) -> f64 {
    let (a, b) = dispersion_coefficients(jac, d, k2);
    max_real_root(a, b)
}

/// `a`, `b` and the leading growth rate sampled on a uniform `k²` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionCurve {
    pub k2: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub re_lmax: Vec<f64>,
    /// The equilibrium is stable to uniform perturbations.
    pub stable: bool,
}

impl DispersionCurve {
    /// Some sampled `k²` has `b < 0`.
    pub fn has_negative_b(&self) -> bool {
        self.b.iter().any(|&b| b < 0.0)
    }
}

/// Samples `k2_steps` uniform points on `[0, k2_max]`.
pub fn dispersion(
    p: &ModelParams,
    d: &LinearizedDiffusion,
    k2_max: f64,
    k2_steps: usize,
) -> Result<DispersionCurve> {
    if !(k2_max > 0.0 && k2_max.is_finite()) {
        return Err(Error::NonPositive {
            name: "k2_max",
            value: k2_max,
        });
    }
    if k2_steps < 2 {
        return Err(Error::InvalidArgument(alloc::format!(
            "k2_steps must be at least 2, got {k2_steps}"
        )));
    }
    let jac = jacobian(p)?;
    let n = k2_steps;
    let mut curve = DispersionCurve {
        k2: Vec::with_capacity(n),
        a: Vec::with_capacity(n),
        b: Vec::with_capacity(n),
        re_lmax: Vec::with_capacity(n),
        stable: homogeneous_stability(p) == HomogeneousStability::Stable,
    };
    for i in 0..n {
        let k2 = k2_max * i as f64 / (n - 1) as f64;
        let (a, b) = dispersion_coefficients(&jac, d, k2);
        curve.k2.push(k2);
        curve.a.push(a);
        curve.b.push(b);
        curve.re_lmax.push(max_real_root(a, b));
    }
    Ok(curve)
}

/// Default sampling: 1000 points on `[0, max(4 k_c², 100)]`.
pub fn default_dispersion(p: &ModelParams, d: &LinearizedDiffusion) -> Result<DispersionCurve> {
    let k2_max = match critical_k2(p, d) {
        Ok(kc2) => (4.0 * kc2).max(100.0),
        Err(_) => 100.0,
    };
    dispersion(p, d, k2_max, 1000)
}

/// Minimizer `k_c² = −g / (2 det D̂)` of `b(k²)`.
pub fn critical_k2(p: &ModelParams, d: &LinearizedDiffusion) -> Result<f64> {
    let jac = jacobian(p)?;
    let g = g_coefficient(&jac, d);
    let det = d.det();
    if !(det > 0.0) || !(g < 0.0) {
        return Err(Error::NoCriticalMode);
    }
    Ok(-g / (2.0 * det))
}

/// Turing conditions in ratio form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuringConditions {
    pub s1: f64,
    pub s2: f64,
    /// `s1 < 0`.
    pub cond_g: bool,
    /// `s2 > 0`.
    pub cond_disc: bool,
    pub turing: bool,
}

/// `s1(δ, δ12, δ21)` for the reaction parameters of `p`.
pub fn s1(p: &ModelParams, delta: f64, delta12: f64, delta21: f64) -> f64 {
    let z = p.zeta;
    -p.beta * (delta21 + 1.0) + delta12 * (z - 1.0) * (z - 1.0) - delta * z + delta + z * p.nu
}

/// `s2(δ, δ12, δ21)` for the reaction parameters of `p`.
pub fn s2(p: &ModelParams, delta: f64, delta12: f64, delta21: f64) -> f64 {
    let z = p.zeta;
    let first = s1(p, delta, delta12, delta21);
    first * first + 4.0 * (z - 1.0) * z * (p.beta - p.nu) * (delta12 * delta21 - delta)
}

/// Evaluates the conditions with strict sign tests shifted by `tol`.
pub fn conditions_from_ratios(
    p: &ModelParams,
    delta: f64,
    delta12: f64,
    delta21: f64,
    tol: f64,
) -> TuringConditions {
    let s1 = s1(p, delta, delta12, delta21);
    let s2 = s2(p, delta, delta12, delta21);
    let cond_g = s1 < -tol;
    let cond_disc = s2 > tol;
    TuringConditions {
        s1,
        s2,
        cond_g,
        cond_disc,
        turing: cond_g && cond_disc,
    }
}

pub fn turing_conditions(p: &ModelParams, d: &LinearizedDiffusion) -> TuringConditions {
    conditions_from_ratios(p, d.delta(), d.delta12(), d.delta21(), 0.0)
}

/// Barred quantities of the specialized conditions for the reference
/// coefficient families, with `λ̄_i` carrying the density factor `n̄_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarredCoefficients {
    pub lam1: f64,
    pub lam2: f64,
    /// `(c2(n̄) / c1(n̄))²`.
    pub c: f64,
}

/// Unit-speed reading: `λ̄_i = n̄_i λ_i(n̄)`.
pub fn barred_unit_speed(p: &ModelParams) -> Result<BarredCoefficients> {
    let eq = positive_equilibrium(p)?;
    Ok(BarredCoefficients {
        lam1: eq.n1 * p.lam1_at(eq.n1, eq.n2)?,
        lam2: eq.n2 * p.lam2_at(eq.n1, eq.n2)?,
        c: 1.0,
    })
}

/// Density-speed reading: `λ̄1 = n̄1 λ1 / c1`, `λ̄2 = n̄2 λ2 c2 / c1²`,
/// `c̄ = (c2 / c1)²`.
pub fn barred_density_speed(p: &ModelParams) -> Result<BarredCoefficients> {
    let eq = positive_equilibrium(p)?;
    let (n1, n2) = (eq.n1, eq.n2);
    let c1 = p.c1_at(n1, n2)?;
    let c2 = p.c2_at(n1, n2)?;
    Ok(BarredCoefficients {
        lam1: n1 * p.lam1_at(n1, n2)? / c1,
        lam2: n2 * p.lam2_at(n1, n2)? * c2 / (c1 * c1),
        c: (c2 / c1) * (c2 / c1),
    })
}

/// The specialized pair of conditions written with barred coefficients.
///
/// `delta` here is the ratio of the base diffusivities `D2/D1`; with unit
/// speeds it coincides with `D̂22/D̂11`.
pub fn specialized_conditions(p: &ModelParams, delta: f64, bar: &BarredCoefficients) -> (f64, f64) {
    let (z, b, n) = (p.zeta, p.beta, p.nu);
    let lin =
        (1.0 - z) * (bar.c * delta + (z - 1.0) * bar.lam1) + b * (delta * bar.lam2 - 1.0) + z * n;
    let quad = 4.0 * delta * z * (z - 1.0) * (bar.lam1 * bar.lam2 - bar.c) * (b - n) + lin * lin;
    (lin, quad)
}

/// Turing threshold on `δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaThreshold {
    /// Smallest `δ̄` with `s1 < 0` and `s2 > 0` for every `δ > δ̄`.
    pub value: f64,
    /// Root of `s1` in `δ`.
    pub s1_root: f64,
    /// Larger real root of `s2` in `δ`, if any.
    pub s2_root: Option<f64>,
    /// `[β(2ζ−1) − ζν]/(ζ−1) + 2√(βζ(β−ν)/(ζ−1))`, without cross-diffusion.
    pub closed_form: Option<f64>,
    /// `(2βζ − β² − ζν)/(ζ−1) + 2√(βζ(β−ν)/(ζ−1))`, the expression with the
    /// `β²` numerator. It is not a root of `s2` and is reported for
    /// comparison only.
    pub printed_form: Option<f64>,
}

/// Checks `ζ > 1`, `β > ν`, `ν > 1` and `ζ > (1−β)/(1−ν)`.
pub fn require_stable_reaction(p: &ModelParams) -> Result<()> {
    if !p.has_positive_equilibrium() {
        return Err(Error::Infeasible(
            "no positive equilibrium (zeta > 1, beta > nu)",
        ));
    }
    if !(p.nu > 1.0) {
        return Err(Error::Infeasible("nu must exceed 1"));
    }
    if !(p.zeta > (1.0 - p.beta) / (1.0 - p.nu)) {
        return Err(Error::Infeasible("zeta must exceed (1 - beta)/(1 - nu)"));
    }
    Ok(())
}

pub fn delta_threshold(p: &ModelParams, delta12: f64, delta21: f64) -> Result<DeltaThreshold> {
    require_stable_reaction(p)?;
    let (z, b, n) = (p.zeta, p.beta, p.nu);
    let zm1 = z - 1.0;
    // s1(δ) = e − (ζ−1) δ
    let e = -b * (delta21 + 1.0) + delta12 * zm1 * zm1 + z * n;
    let s1_root = e / zm1;
    // s2(δ) = (e − (ζ−1)δ)² + 4(ζ−1)ζ(β−ν)(δ12 δ21 − δ) = A δ² + B δ + C
    let q = 4.0 * zm1 * z * (b - n);
    let qa = zm1 * zm1;
    let qb = -2.0 * e * zm1 - q;
    let qc = e * e + q * delta12 * delta21;
    let disc = qb * qb - 4.0 * qa * qc;
    let s2_root = if disc >= 0.0 {
        let sq = disc.sqrt();
        // Larger root, computed without cancellation.
        let r = if qb <= 0.0 {
            (-qb + sq) / (2.0 * qa)
        } else {
            2.0 * qc / (-qb - sq)
        };
        Some(r)
    } else {
        None
    };
    let value = match s2_root {
        Some(r) => r.max(s1_root),
        None => s1_root,
    };
    let (closed_form, printed_form) = if delta12 == 0.0 && delta21 == 0.0 {
        let root = 2.0 * (b * z * (b - n) / zm1).sqrt();
        (
            Some((b * (2.0 * z - 1.0) - z * n) / zm1 + root),
            Some((2.0 * b * z - b * b - z * n) / zm1 + root),
        )
    } else {
        (None, None)
    };
    Ok(DeltaThreshold {
        value,
        s1_root,
        s2_root,
        closed_form,
        printed_form,
    })
}
