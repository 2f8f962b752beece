//! Backward Euler in time with Picard linearization.
//!
//! Each step solves
//!
//! ```text
//! (M/Δt + K(pʲ) − F(pʲ)) pʲ⁺¹ = M nᵏ / Δt,   p⁰ = nᵏ
//! ```
//!
//! until `‖pʲ⁺¹ − pʲ‖₂ < picard_tol` on the stacked coefficient vector, with
//! at least two solves per step.
//!
//! # Initial noise
//!
//! [`initial_condition`] perturbs the equilibrium with Gaussian noise of
//! standard deviation `√(n̄_i · noise_rel)`. The generator is ChaCha8 seeded
//! with `seed_from_u64(seed)`; each 64-bit output `x` becomes a uniform
//! `u = ((x >> 11) + 1) · 2⁻⁵³ ∈ (0, 1]`, and pairs `(u1, u2)` go through
//! Box–Muller, `√(−2 ln u1)·(cos 2πu2, sin 2πu2)`, using both outputs. Values
//! are drawn for all species-1 nodes first, then species 2.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{require_positive, Error, Result};
use crate::fem::{bicgstab, integrate_field, Assembler, CsrMatrix, FieldPair, Mesh};
use crate::model::{equilibrium, positive_equilibrium, CoeffSpec, ModelParams};

/// Largest mode index used by [`ModeProjector`].
pub const MAX_MODE: usize = 12;

const LINEAR_MAX_ITERS: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_final: f64,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub linear_solver_tol: f64,
    /// Time between snapshots.
    pub snapshot_every: f64,
    pub seed: u64,
    pub noise_rel: f64,
    /// Include the reaction terms.
    pub reactions: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 0.01,
            t_final: 1.0,
            picard_tol: 0.01,
            picard_max_iters: 50,
            linear_solver_tol: 1e-10,
            snapshot_every: 10.0,
            seed: 1,
            noise_rel: 0.01,
            reactions: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        require_positive("dt", self.dt)?;
        require_positive("picard_tol", self.picard_tol)?;
        require_positive("linear_solver_tol", self.linear_solver_tol)?;
        if self.picard_max_iters == 0 {
            return Err(Error::InvalidArgument(
                "picard_max_iters must be at least 1".into(),
            ));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "t_final must be finite and non-negative, got {}",
                self.t_final
            )));
        }
        if !(self.snapshot_every >= self.dt && self.snapshot_every.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "snapshot_every ({}) must be at least dt ({})",
                self.snapshot_every,
                self.dt
            )));
        }
        if !(self.noise_rel >= 0.0 && self.noise_rel.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "noise_rel must be finite and non-negative, got {}",
                self.noise_rel
            )));
        }
        Ok(())
    }

    /// Number of steps to reach `t_final`.
    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt - 1e-9).ceil().max(0.0) as usize
    }

    /// Steps between snapshots.
    pub fn snapshot_stride(&self) -> usize {
        ((self.snapshot_every / self.dt).round() as usize).max(1)
    }
}

/// Deterministic standard-normal stream.
pub struct GaussianStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        GaussianStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on `(0, 1]`.
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * core::f64::consts::PI * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

/// Equilibrium plus seeded Gaussian noise at every node.
pub fn initial_condition(mesh: &Mesh, p: &ModelParams, cfg: &SolverConfig) -> Result<FieldPair> {
    let eq = positive_equilibrium(p)?;
    let n = mesh.n_nodes();
    let mut fields = FieldPair::uniform(n, eq.n1, eq.n2);
    if cfg.noise_rel > 0.0 {
        let mut g = GaussianStream::new(cfg.seed);
        let s1 = (eq.n1 * cfg.noise_rel).sqrt();
        let s2 = (eq.n2 * cfg.noise_rel).sqrt();
        for v in fields.n1.iter_mut() {
            *v += s1 * g.next_normal();
        }
        for v in fields.n2.iter_mut() {
            *v += s2 * g.next_normal();
        }
    }
    Ok(fields)
}

/// Projection onto `cos(mπx/Lx) cos(nπy/Ly)`, `0 ≤ m, n ≤ 12`, in the mass
/// inner product.
///
/// The amplitude of mode `ψ` is `⟨f − f̄, ψ⟩_M / ⟨ψ, ψ⟩_M`, so a field equal
/// to `A·ψ` has amplitude `A`. For `m, n ≥ 1` the raw inner product
/// `⟨f, ψ⟩_M` is `|Γ|/4 · A`.
#[derive(Debug, Clone)]
pub struct ModeProjector {
    area: f64,
    /// `Mψ / ⟨ψ, ψ⟩_M` per mode, `m` major.
    weights: Vec<Vec<f64>>,
    norms: Vec<f64>,
    mass: CsrMatrix,
    mesh_ones: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeAmplitude {
    pub m: usize,
    pub n: usize,
    /// Normalized coefficient.
    pub amplitude: f64,
    /// `⟨f − f̄, ψ⟩_M`.
    pub inner: f64,
}

impl ModeProjector {
    pub fn new(mesh: &Mesh, mass: &CsrMatrix) -> Self {
        let (lx, ly) = (mesh.lx, mesh.ly);
        let pi = core::f64::consts::PI;
        let mut weights = Vec::with_capacity((MAX_MODE + 1) * (MAX_MODE + 1));
        let mut norms = Vec::with_capacity(weights.capacity());
        for m in 0..=MAX_MODE {
            for n in 0..=MAX_MODE {
                let psi = mesh.interpolate(|x, y| {
                    (m as f64 * pi * x / lx).cos() * (n as f64 * pi * y / ly).cos()
                });
                let mpsi = mass.matvec(&psi);
                let norm: f64 = psi.iter().zip(&mpsi).map(|(a, b)| a * b).sum();
                weights.push(mpsi.into_iter().map(|v| v / norm).collect());
                norms.push(norm);
            }
        }
        ModeProjector {
            area: mesh.lx * mesh.ly,
            weights,
            norms,
            mass: mass.clone(),
            mesh_ones: vec![1.0; mesh.n_nodes()],
        }
    }

    fn mean(&self, field: &[f64]) -> f64 {
        let total: f64 = self
            .mass
            .matvec(&self.mesh_ones)
            .iter()
            .zip(field)
            .map(|(a, b)| a * b)
            .sum();
        total / self.area
    }

    pub fn amplitude(&self, field: &[f64], m: usize, n: usize) -> ModeAmplitude {
        let mean = self.mean(field);
        self.amplitude_centered(field, mean, m, n)
    }

    fn amplitude_centered(&self, field: &[f64], mean: f64, m: usize, n: usize) -> ModeAmplitude {
        let k = m * (MAX_MODE + 1) + n;
        let w = &self.weights[k];
        let amplitude: f64 = w.iter().zip(field).map(|(a, b)| a * (b - mean)).sum();
        ModeAmplitude {
            m,
            n,
            amplitude,
            inner: amplitude * self.norms[k],
        }
    }

    /// Mode `(m, n) ≠ (0, 0)` with the largest `|amplitude|`.
    pub fn dominant(&self, field: &[f64]) -> ModeAmplitude {
        let mean = self.mean(field);
        let mut best = ModeAmplitude {
            m: 0,
            n: 0,
            amplitude: 0.0,
            inner: 0.0,
        };
        for m in 0..=MAX_MODE {
            for n in 0..=MAX_MODE {
                if m == 0 && n == 0 {
                    continue;
                }
                let a = self.amplitude_centered(field, mean, m, n);
                if a.amplitude.abs() > best.amplitude.abs() {
                    best = a;
                }
            }
        }
        best
    }
}

/// `(m, n, amplitude)` of the dominant cosine mode of `field`.
pub fn dominant_mode(mesh: &Mesh, field: &[f64]) -> (usize, usize, f64) {
    let mass = crate::fem::assemble_mass(mesh);
    let d = ModeProjector::new(mesh, &mass).dominant(field);
    (d.m, d.n, d.amplitude)
}

/// One diagnostics record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub mass1: f64,
    pub mass2: f64,
    pub min1: f64,
    pub max1: f64,
    pub min2: f64,
    pub max2: f64,
    /// `‖n1 − n̄1‖` in the mass norm.
    pub l2dev1: f64,
    pub l2dev2: f64,
    /// Dominant mode of `n1`.
    pub mode_m: usize,
    pub mode_n: usize,
    pub picard_iters: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub diagnostics: Vec<DiagnosticsRow>,
    pub snapshots: Vec<FieldPair>,
    pub final_state: FieldPair,
}

/// Aborted run: the error, the last accepted state and the records so far.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub error: Error,
    pub last_good: FieldPair,
    pub diagnostics: Vec<DiagnosticsRow>,
}

/// Time integrator for one parameter set on one mesh.
#[derive(Debug, Clone)]
pub struct Simulator {
    asm: Assembler,
    params: ModelParams,
    cfg: SolverConfig,
    mass: CsrMatrix,
    /// `M/Δt` on the block pattern.
    mass_dt: CsrMatrix,
    /// `M/Δt + K` when `K` does not depend on the state.
    frozen: Option<CsrMatrix>,
    reference: [f64; 2],
    projector: ModeProjector,
}

impl Simulator {
    pub fn new(mesh: Mesh, params: ModelParams, cfg: SolverConfig) -> Result<Self> {
        params.validate()?;
        cfg.validate()?;
        let asm = Assembler::new(mesh);
        let mass = asm.mass();
        let mut mass_dt = asm.block_pattern().zeroed();
        asm.add_mass(&mut mass_dt.values, 1.0 / cfg.dt);
        let constant_k = params.c1.is_constant()
            && params.c2.is_constant()
            && params.lam1 == CoeffSpec::ZERO
            && params.lam2 == CoeffSpec::ZERO;
        let frozen = if constant_k {
            let mut a = mass_dt.clone();
            let dummy = FieldPair::uniform(asm.n_nodes(), 1.0, 1.0);
            asm.add_stiffness(&mut a.values, 1.0, &params, &dummy)?;
            Some(a)
        } else {
            None
        };
        let reference = match equilibrium(&params) {
            Ok(eq) if eq.positive => [eq.n1, eq.n2],
            _ => [1.0, 1.0],
        };
        let projector = ModeProjector::new(asm.mesh(), &mass);
        Ok(Simulator {
            asm,
            params,
            cfg,
            mass,
            mass_dt,
            frozen,
            reference,
            projector,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        self.asm.mesh()
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    pub fn projector(&self) -> &ModeProjector {
        &self.projector
    }

    pub fn initial_condition(&self) -> Result<FieldPair> {
        initial_condition(self.mesh(), &self.params, &self.cfg)
    }

    fn system(&self, iterate: &FieldPair) -> Result<CsrMatrix> {
        let mut a = match &self.frozen {
            Some(a) => a.clone(),
            None => {
                let mut a = self.mass_dt.clone();
                self.asm
                    .add_stiffness(&mut a.values, 1.0, &self.params, iterate)?;
                a
            }
        };
        if self.cfg.reactions {
            self.asm
                .add_reaction(&mut a.values, -1.0, &self.params, iterate)?;
        }
        Ok(a)
    }

    fn check_state(&self, v: &[f64], time: f64) -> Result<()> {
        let n = v.len() / 2;
        for (i, &x) in v.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite { time });
            }
            let species = usize::from(i >= n);
            if x < -1e-10 * self.reference[species] {
                return Err(Error::NegativeDensity {
                    node: i % n,
                    value: x,
                    time,
                });
            }
        }
        Ok(())
    }

    /// Advances one step of length `dt`; returns the new state and the
    /// number of linear solves.
    pub fn picard_step(&self, state: &FieldPair) -> Result<(FieldPair, usize)> {
        let t_new = state.t + self.cfg.dt;
        let old = state.stacked();
        let rhs = self.mass_dt.matvec(&old);
        let mut current = state.clone();
        let mut x = old;
        let mut increment = f64::INFINITY;
        for j in 1..=self.cfg.picard_max_iters {
            let a = self.system(&current)?;
            let prev = x.clone();
            bicgstab(
                &a,
                &rhs,
                &mut x,
                self.cfg.linear_solver_tol,
                LINEAR_MAX_ITERS,
            )?;
            self.check_state(&x, t_new)?;
            increment = x
                .iter()
                .zip(&prev)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            current = FieldPair::from_stacked(&x, t_new);
            // The first increment is the change over the step, not a
            // fixed-point test.
            if (j >= 2 || self.cfg.picard_max_iters == 1) && increment < self.cfg.picard_tol {
                return Ok((current, j));
            }
        }
        Err(Error::PicardDiverged {
            time: t_new,
            iterations: self.cfg.picard_max_iters,
            increment,
        })
    }

    pub fn diagnostics(&self, state: &FieldPair, picard_iters: usize) -> DiagnosticsRow {
        let mesh = self.mesh();
        let minmax = |v: &[f64]| {
            v.iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                    (lo.min(x), hi.max(x))
                })
        };
        let (min1, max1) = minmax(&state.n1);
        let (min2, max2) = minmax(&state.n2);
        let dev = |v: &[f64], bar: f64| {
            let d: Vec<f64> = v.iter().map(|x| x - bar).collect();
            let md = self.mass.matvec(&d);
            d.iter()
                .zip(&md)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                .max(0.0)
                .sqrt()
        };
        let mode = self.projector.dominant(&state.n1);
        DiagnosticsRow {
            t: state.t,
            mass1: integrate_field(mesh, &state.n1),
            mass2: integrate_field(mesh, &state.n2),
            min1,
            max1,
            min2,
            max2,
            l2dev1: dev(&state.n1, self.reference[0]),
            l2dev2: dev(&state.n2, self.reference[1]),
            mode_m: mode.m,
            mode_n: mode.n,
            picard_iters,
        }
    }

    /// Runs from `initial` to `t_final`, calling `observer` on the initial
    /// record and after every step.
    pub fn run_observed(
        &self,
        initial: FieldPair,
        mut observer: impl FnMut(&FieldPair, &DiagnosticsRow),
    ) -> core::result::Result<RunOutput, RunFailure> {
        let steps = self.cfg.n_steps();
        let stride = self.cfg.snapshot_stride();
        let mut state = initial;
        let mut diagnostics = Vec::with_capacity(steps + 1);
        let mut snapshots = Vec::new();
        let row = self.diagnostics(&state, 0);
        observer(&state, &row);
        diagnostics.push(row);
        for k in 1..=steps {
            match self.picard_step(&state) {
                Ok((mut next, iters)) => {
                    next.t = k as f64 * self.cfg.dt;
                    let row = self.diagnostics(&next, iters);
                    observer(&next, &row);
                    diagnostics.push(row);
                    state = next;
                    if k % stride == 0 || k == steps {
                        snapshots.push(state.clone());
                    }
                }
                Err(error) => {
                    return Err(RunFailure {
                        error,
                        last_good: state,
                        diagnostics,
                    })
                }
            }
        }
        Ok(RunOutput {
            diagnostics,
            snapshots,
            final_state: state,
        })
    }

    pub fn run_from(&self, initial: FieldPair) -> core::result::Result<RunOutput, RunFailure> {
        self.run_observed(initial, |_, _| {})
    }
}

/// Seeded run from the perturbed equilibrium.
pub fn run(
    mesh: &Mesh,
    p: &ModelParams,
    cfg: &SolverConfig,
) -> core::result::Result<RunOutput, RunFailure> {
    let fail = |error: Error| RunFailure {
        error,
        last_good: FieldPair::uniform(0, 0.0, 0.0),
        diagnostics: Vec::new(),
    };
    let sim = Simulator::new(mesh.clone(), *p, *cfg).map_err(fail)?;
    let initial = sim.initial_condition().map_err(fail)?;
    sim.run_from(initial)
}
