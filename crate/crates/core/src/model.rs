//! Macroscopic model: parameters, coefficient laws, reaction kinetics,
//! homogeneous equilibrium and its Jacobian.
//!
//! The two densities obey
//!
//! ```text
//! ∂t n1 = c1 D1 ∇·(c1 ∇n1 − λ1 n1 ∇n2) + ζ n1² n2 / (n1 + β n2) − n1 n2
//! ∂t n2 = c2 D2 ∇·(c2 ∇n2 − λ2 n2 ∇n1) + ζ β n1 n2² / (n1 + β n2) − τ n2 − ν n2²
//! ```
//!
//! with zero-flux boundary conditions. `c_i` and `λ_i` are density-dependent
//! laws drawn from the closed family [`CoeffSpec`].

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{require_positive, Error, Result};

/// A density-dependent coefficient law, evaluated as `f(n_self, n_other)`.
///
/// For species 1 the arguments are `(n1, n2)`, for species 2 `(n2, n1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoeffSpec {
    /// `k`, independent of the densities.
    Constant(f64),
    /// `base + amp · (n_self / (n_self + n_other))^exponent`.
    SpeedLaw { base: f64, amp: f64, exponent: f64 },
    /// `amp · (1 / (√n_self · (n_self + n_other)))^exponent`.
    ///
    /// A positive `amp` is the attractive case, a negative one repulsive.
    TurningLaw { amp: f64, exponent: f64 },
}

impl CoeffSpec {
    pub const ONE: CoeffSpec = CoeffSpec::Constant(1.0);
    pub const ZERO: CoeffSpec = CoeffSpec::Constant(0.0);

    /// The speed law `1 + 0.5 (n_i / (n_i + n_j))^(2/3)`.
    pub fn reference_speed() -> Self {
        CoeffSpec::SpeedLaw {
            base: 1.0,
            amp: 0.5,
            exponent: 2.0 / 3.0,
        }
    }

    /// The turning law `amp (1 / (√n_i (n_i + n_j)))^(2/3)`.
    pub fn reference_turning(amp: f64) -> Self {
        CoeffSpec::TurningLaw {
            amp,
            exponent: 2.0 / 3.0,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, CoeffSpec::Constant(_))
    }

    /// Multiplies the whole law by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            CoeffSpec::Constant(k) => CoeffSpec::Constant(k * factor),
            CoeffSpec::SpeedLaw {
                base,
                amp,
                exponent,
            } => CoeffSpec::SpeedLaw {
                base: base * factor,
                amp: amp * factor,
                exponent,
            },
            CoeffSpec::TurningLaw { amp, exponent } => CoeffSpec::TurningLaw {
                amp: amp * factor,
                exponent,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            CoeffSpec::Constant(k) if !k.is_finite() => Err(Error::InvalidArgument(
                alloc::format!("constant coefficient {k} is not finite"),
            )),
            CoeffSpec::Constant(_) => Ok(()),
            CoeffSpec::SpeedLaw {
                base,
                amp,
                exponent,
            } => {
                require_positive("speed-law base", base)?;
                require_positive("speed-law exponent", exponent)?;
                if amp.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(alloc::format!(
                        "speed-law amp {amp} is not finite"
                    )))
                }
            }
            CoeffSpec::TurningLaw { amp, exponent } => {
                require_positive("turning-law exponent", exponent)?;
                if amp.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(alloc::format!(
                        "turning-law amp {amp} is not finite"
                    )))
                }
            }
        }
    }

    /// Evaluates the law. Non-constant laws need `n_self > 0` and
    /// `n_self + n_other > 0`.
    pub fn eval(&self, n_self: f64, n_other: f64) -> Result<f64> {
        match *self {
            CoeffSpec::Constant(k) => Ok(k),
            CoeffSpec::SpeedLaw {
                base,
                amp,
                exponent,
            } => {
                check_domain(n_self, n_other)?;
                Ok(base + amp * (n_self / (n_self + n_other)).powf(exponent))
            }
            CoeffSpec::TurningLaw { amp, exponent } => {
                check_domain(n_self, n_other)?;
                let inner = 1.0 / (n_self.sqrt() * (n_self + n_other));
                Ok(amp * inner.powf(exponent))
            }
        }
    }
}

fn check_domain(n_self: f64, n_other: f64) -> Result<()> {
    if n_self > 0.0 && n_self + n_other > 0.0 && n_other.is_finite() && n_self.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { n_self, n_other })
    }
}

/// Free-function form of [`CoeffSpec::eval`].
pub fn eval_coeff(spec: &CoeffSpec, n1: f64, n2: f64) -> Result<f64> {
    spec.eval(n1, n2)
}

/// How `delta` fixes the base diffusivity of species 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeltaRatio {
    /// `δ = D̂22 / D̂11`, the ratio of the linearized self-diffusivities at
    /// equilibrium.
    #[default]
    Linearized,
    /// `δ = D2 / D1`, the ratio of the base diffusivities.
    Base,
}

/// Dimensionless macroscopic parameters.
///
/// The base diffusivity of species 2 is derived from `delta` with
/// [`ModelParams::d2`]; the two readings coincide for constant speeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub zeta: f64,
    pub beta: f64,
    pub tau: f64,
    pub nu: f64,
    pub d1: f64,
    pub delta: f64,
    pub delta_ratio: DeltaRatio,
    pub c1: CoeffSpec,
    pub c2: CoeffSpec,
    pub lam1: CoeffSpec,
    pub lam2: CoeffSpec,
}

/// The four coefficient configurations used for the bifurcation diagrams
/// and the reference simulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientCase {
    /// (a): unit speeds, attractive turning `λ = 0.25(...)^(2/3)`.
    Attractive,
    /// (b): unit speeds, no turning.
    SelfDiffusion,
    /// (c): density-dependent speeds, attractive turning.
    DensitySpeed,
    /// (d): unit speeds, repulsive turning `λ = −0.25(...)^(2/3)`.
    Repulsive,
}

impl CoefficientCase {
    pub const ALL: [CoefficientCase; 4] = [
        CoefficientCase::Attractive,
        CoefficientCase::SelfDiffusion,
        CoefficientCase::DensitySpeed,
        CoefficientCase::Repulsive,
    ];

    /// `(c1, c2, lam1, lam2)`.
    pub fn specs(self) -> (CoeffSpec, CoeffSpec, CoeffSpec, CoeffSpec) {
        let attract = CoeffSpec::reference_turning(0.25);
        match self {
            CoefficientCase::Attractive => (CoeffSpec::ONE, CoeffSpec::ONE, attract, attract),
            CoefficientCase::SelfDiffusion => (
                CoeffSpec::ONE,
                CoeffSpec::ONE,
                CoeffSpec::ZERO,
                CoeffSpec::ZERO,
            ),
            CoefficientCase::DensitySpeed => (
                CoeffSpec::reference_speed(),
                CoeffSpec::reference_speed(),
                attract,
                attract,
            ),
            CoefficientCase::Repulsive => {
                let repel = CoeffSpec::reference_turning(-0.25);
                (CoeffSpec::ONE, CoeffSpec::ONE, repel, repel)
            }
        }
    }
}

impl ModelParams {
    /// Self-diffusion model with unit speeds and no turning.
    pub fn new(zeta: f64, beta: f64, tau: f64, nu: f64, d1: f64, delta: f64) -> Self {
        ModelParams {
            zeta,
            beta,
            tau,
            nu,
            d1,
            delta,
            delta_ratio: DeltaRatio::Linearized,
            c1: CoeffSpec::ONE,
            c2: CoeffSpec::ONE,
            lam1: CoeffSpec::ZERO,
            lam2: CoeffSpec::ZERO,
        }
    }

    /// `β = 1.5, τ = 2, ν = 1.4, D1 = 0.1` with the given `ζ`, `δ` and
    /// coefficient case. Density-dependent speeds read `δ` as `D2 / D1`.
    pub fn reference(zeta: f64, delta: f64, case: CoefficientCase) -> Self {
        let (c1, c2, lam1, lam2) = case.specs();
        let delta_ratio = match case {
            CoefficientCase::DensitySpeed => DeltaRatio::Base,
            _ => DeltaRatio::Linearized,
        };
        ModelParams {
            delta_ratio,
            c1,
            c2,
            lam1,
            lam2,
            ..ModelParams::new(zeta, 1.5, 2.0, 1.4, 0.1, delta)
        }
    }

    pub fn with_speeds(mut self, c1: CoeffSpec, c2: CoeffSpec) -> Self {
        self.c1 = c1;
        self.c2 = c2;
        self
    }

    pub fn with_turning(mut self, lam1: CoeffSpec, lam2: CoeffSpec) -> Self {
        self.lam1 = lam1;
        self.lam2 = lam2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("zeta", self.zeta)?;
        require_positive("beta", self.beta)?;
        require_positive("tau", self.tau)?;
        require_positive("nu", self.nu)?;
        require_positive("d1", self.d1)?;
        require_positive("delta", self.delta)?;
        for spec in [self.c1, self.c2, self.lam1, self.lam2] {
            spec.validate()?;
        }
        Ok(())
    }

    /// Whether the equilibrium is positive: `ζ > 1` and `β > ν`.
    pub fn has_positive_equilibrium(&self) -> bool {
        self.zeta > 1.0 && self.beta > self.nu
    }

    /// `c1(n1, n2)`.
    pub fn c1_at(&self, n1: f64, n2: f64) -> Result<f64> {
        self.c1.eval(n1, n2)
    }

    /// `c2(n2, n1)`.
    pub fn c2_at(&self, n1: f64, n2: f64) -> Result<f64> {
        self.c2.eval(n2, n1)
    }

    /// `λ1(n1, n2)`.
    pub fn lam1_at(&self, n1: f64, n2: f64) -> Result<f64> {
        self.lam1.eval(n1, n2)
    }

    /// `λ2(n2, n1)`.
    pub fn lam2_at(&self, n1: f64, n2: f64) -> Result<f64> {
        self.lam2.eval(n2, n1)
    }

    /// Base diffusivity of species 2: `D2 = δ D1 (c1(n̄) / c2(n̄))²` for
    /// [`DeltaRatio::Linearized`], `D2 = δ D1` for [`DeltaRatio::Base`].
    ///
    /// Constant speeds do not need the equilibrium; density-dependent ones
    /// require it to be positive.
    pub fn d2(&self) -> Result<f64> {
        let ratio = match (self.delta_ratio, self.c1, self.c2) {
            (DeltaRatio::Base, _, _) => 1.0,
            (_, CoeffSpec::Constant(a), CoeffSpec::Constant(b)) => a / b,
            _ => {
                let eq = equilibrium(self)?;
                if !eq.positive {
                    return Err(Error::NoPositiveEquilibrium);
                }
                self.c1_at(eq.n1, eq.n2)? / self.c2_at(eq.n1, eq.n2)?
            }
        };
        let d2 = self.delta * self.d1 * ratio * ratio;
        if d2.is_finite() && d2 > 0.0 {
            Ok(d2)
        } else {
            Err(Error::NonPositive {
                name: "d2",
                value: d2,
            })
        }
    }
}

/// The cooperative term `n1 n2 / (n1 + β n2)`, extended by zero where the
/// denominator vanishes.
fn cooperative(beta: f64, n1: f64, n2: f64) -> Result<f64> {
    let denom = n1 + beta * n2;
    if denom > 0.0 {
        Ok(n1 * n2 / denom)
    } else if n1 == 0.0 && n2 == 0.0 {
        Ok(0.0)
    } else {
        Err(Error::Domain {
            n_self: n1,
            n_other: n2,
        })
    }
}

/// Reaction terms `(r1, r2)`.
pub fn reaction_rhs(p: &ModelParams, n1: f64, n2: f64) -> Result<(f64, f64)> {
    let q = cooperative(p.beta, n1, n2)?;
    let r1 = p.zeta * n1 * q - n1 * n2;
    let r2 = p.zeta * p.beta * n2 * q - p.tau * n2 - p.nu * n2 * n2;
    Ok((r1, r2))
}

/// Per-capita reaction factors `(f1, f2)` with `r_i = f_i n_i`.
pub fn reaction_factors(p: &ModelParams, n1: f64, n2: f64) -> Result<(f64, f64)> {
    let q = cooperative(p.beta, n1, n2)?;
    let f1 = p.zeta * q - n2;
    let f2 = p.zeta * p.beta * q - p.tau - p.nu * n2;
    Ok((f1, f2))
}

/// Homogeneous steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub n1: f64,
    pub n2: f64,
    /// Both components positive (`ζ > 1`, `β > ν`).
    pub positive: bool,
}

/// `n̄1 = βτ / ((ζ−1)(β−ν))`, `n̄2 = τ / (β−ν)`.
pub fn equilibrium(p: &ModelParams) -> Result<Equilibrium> {
    if p.zeta == 1.0 {
        return Err(Error::Degenerate("zeta = 1"));
    }
    if p.beta == p.nu {
        return Err(Error::Degenerate("beta = nu"));
    }
    let n2 = p.tau / (p.beta - p.nu);
    let n1 = p.beta * p.tau / ((p.zeta - 1.0) * (p.beta - p.nu));
    Ok(Equilibrium {
        n1,
        n2,
        positive: n1 > 0.0 && n2 > 0.0,
    })
}

/// Positive equilibrium or [`Error::NoPositiveEquilibrium`].
pub fn positive_equilibrium(p: &ModelParams) -> Result<Equilibrium> {
    let eq = equilibrium(p)?;
    if eq.positive {
        Ok(eq)
    } else {
        Err(Error::NoPositiveEquilibrium)
    }
}

/// Reaction Jacobian at the homogeneous equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian {
    pub j: [[f64; 2]; 2],
    pub trace: f64,
    pub det: f64,
}

pub fn jacobian(p: &ModelParams) -> Result<Jacobian> {
    if p.zeta == 1.0 {
        return Err(Error::Degenerate("zeta = 1"));
    }
    if p.beta == p.nu {
        return Err(Error::Degenerate("beta = nu"));
    }
    let (z, b, t, n) = (p.zeta, p.beta, p.tau, p.nu);
    let s = z * (b - n);
    let j = [
        [t * (z - 1.0) / s, b * t / (z * (n - b))],
        [t * (z - 1.0) * (z - 1.0) / s, t * (b - z * n) / s],
    ];
    let trace = t * (b - 1.0 + z * (1.0 - n)) / s;
    let det = t * t * (z - 1.0) / s;
    Ok(Jacobian { j, trace, det })
}

/// Kinetic-level rates feeding the macroscopic coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicroRates {
    /// Host-interaction frequencies `η̄1`, `η̄2`.
    pub eta1: f64,
    pub eta2: f64,
    /// Interspecific destruction rate `ν̄12`.
    pub nu12: f64,
    /// Intraspecific destruction rate `ν̄22`.
    pub nu22: f64,
    /// Natural death rate `τ̄2`.
    pub tau2: f64,
    /// Cooperative production `σ̄12 γ12`.
    pub sigma_gamma: f64,
    /// Nutrient uptake products `μ̄_iL θ_iL`.
    pub mu1l_theta: f64,
    pub mu2l_theta: f64,
    /// Raw turning strengths `λ12`, `λ21`.
    pub lam12: f64,
    pub lam21: f64,
    /// Attraction (+1) or repulsion (−1).
    pub p12: f64,
    pub p21: f64,
}

/// Macroscopic coefficients derived from [`MicroRates`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroModel {
    /// Unit speeds and constant turning `λ_i = π p_ij λ_ij`.
    pub params: ModelParams,
    /// `D_i = D̃_i / ν̄12`.
    pub d: [f64; 2],
    /// `D̃_i = 1 / (6 η̄_i)`.
    pub tilde_d: [f64; 2],
    /// `χ̃_i = π / (6 η̄_i)`.
    pub tilde_chi: [f64; 2],
}

pub fn macro_from_micro(m: &MicroRates) -> Result<MacroModel> {
    for (name, v) in [
        ("eta1", m.eta1),
        ("eta2", m.eta2),
        ("nu12", m.nu12),
        ("nu22", m.nu22),
        ("tau2", m.tau2),
        ("sigma_gamma", m.sigma_gamma),
        ("mu1l_theta", m.mu1l_theta),
        ("mu2l_theta", m.mu2l_theta),
    ] {
        require_positive(name, v)?;
    }
    for (name, v) in [("lam12", m.lam12), ("lam21", m.lam21)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "{name} must be non-negative and finite, got {v}"
            )));
        }
    }
    for v in [m.p12, m.p21] {
        if v != 1.0 && v != -1.0 {
            return Err(Error::InvalidArgument(alloc::format!(
                "turning sign must be +1 or -1, got {v}"
            )));
        }
    }
    let pi = core::f64::consts::PI;
    let tilde_d = [1.0 / (6.0 * m.eta1), 1.0 / (6.0 * m.eta2)];
    let tilde_chi = [pi / (6.0 * m.eta1), pi / (6.0 * m.eta2)];
    let d = [tilde_d[0] / m.nu12, tilde_d[1] / m.nu12];
    let params = ModelParams {
        zeta: m.sigma_gamma / m.nu12,
        beta: m.mu2l_theta / m.mu1l_theta,
        tau: m.tau2 / m.nu12,
        nu: m.nu22 / m.nu12,
        d1: d[0],
        delta: d[1] / d[0],
        delta_ratio: DeltaRatio::Linearized,
        c1: CoeffSpec::ONE,
        c2: CoeffSpec::ONE,
        lam1: CoeffSpec::Constant(pi * m.p12 * m.lam12),
        lam2: CoeffSpec::Constant(pi * m.p21 * m.lam21),
    };
    Ok(MacroModel {
        params,
        d,
        tilde_d,
        tilde_chi,
    })
}
