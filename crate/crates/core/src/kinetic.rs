//! One-dimensional discrete-velocity solver for the scaled kinetic equation
//!
//! ```text
//! ∂t f + (u c cos θ / ε) ∂x f = (η / ε²) (ρ / 4π − f),   ρ = ∫∫ f dθ du
//! ```
//!
//! on `[0, L]` with specular walls, velocity direction `θ ∈ [0, 2π)` and
//! activity `u ∈ [−1, 1]`. Its diffusive limit is `∂t ρ = D ∂xx ρ` with
//! `D = c² / (6η)`.
//!
//! A step is transport (forward Euler, finite volumes) followed by an exact
//! implicit relaxation. Distribution values are stored velocity-major:
//! `f[(j·Nu + l)·Nx + i]` for direction `j`, activity `l`, cell `i`.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{require_positive, Error, Result};

const FOUR_PI: f64 = 4.0 * core::f64::consts::PI;

/// Phase-space grid.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticGrid {
    pub nx: usize,
    pub ntheta: usize,
    pub nu: usize,
    pub length: f64,
    pub dx: f64,
    pub theta: Vec<f64>,
    pub u: Vec<f64>,
    /// Weight `(2π/Nθ)(2/Nu)` of one velocity node.
    pub weight: f64,
}

impl KineticGrid {
    pub fn new(nx: usize, ntheta: usize, nu: usize, length: f64) -> Result<Self> {
        require_positive("length", length)?;
        if nx < 2 || nu == 0 || ntheta < 2 || !ntheta.is_multiple_of(2) {
            return Err(Error::InvalidArgument(alloc::format!(
                "kinetic grid needs nx >= 2, nu >= 1 and an even ntheta >= 2, got nx={nx}, ntheta={ntheta}, nu={nu}"
            )));
        }
        let two_pi = 2.0 * core::f64::consts::PI;
        let theta = (0..ntheta)
            .map(|j| (j as f64 + 0.5) * two_pi / ntheta as f64)
            .collect();
        let u = (0..nu)
            .map(|l| -1.0 + (l as f64 + 0.5) * 2.0 / nu as f64)
            .collect();
        Ok(KineticGrid {
            nx,
            ntheta,
            nu,
            length,
            dx: length / nx as f64,
            theta,
            u,
            weight: (two_pi / ntheta as f64) * (2.0 / nu as f64),
        })
    }

    pub fn n_velocities(&self) -> usize {
        self.ntheta * self.nu
    }

    /// Discrete measure of the velocity space.
    pub fn measure(&self) -> f64 {
        self.weight * self.n_velocities() as f64
    }

    pub fn cell_centers(&self) -> Vec<f64> {
        (0..self.nx).map(|i| (i as f64 + 0.5) * self.dx).collect()
    }

    /// Direction index of the specular image `π − θ_j`.
    pub fn mirror(&self, j: usize) -> usize {
        let half = self.ntheta / 2;
        (self.ntheta + half - 1 - j) % self.ntheta
    }

    /// `u c cos θ / ε` for velocity `(j, l)`.
    fn speed(&self, j: usize, l: usize, c: f64, eps: f64) -> f64 {
        self.u[l] * c * self.theta[j].cos() / eps
    }

    fn max_abs_velocity(&self) -> f64 {
        let umax = self.u.iter().fold(0.0f64, |m, &u| m.max(u.abs()));
        let cmax = self.theta.iter().fold(0.0f64, |m, &t| m.max(t.cos().abs()));
        umax * cmax
    }

    /// Cell averages of `cos(πx/L)`.
    pub fn cosine_profile(&self) -> Vec<f64> {
        let k = core::f64::consts::PI / self.length;
        (0..self.nx)
            .map(|i| {
                let (a, b) = (i as f64 * self.dx, (i + 1) as f64 * self.dx);
                ((k * b).sin() - (k * a).sin()) / (k * self.dx)
            })
            .collect()
    }
}

/// Spatial reconstruction used in the transport sub-step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransportScheme {
    /// First-order upwind.
    Upwind,
    /// Van Leer limited linear reconstruction.
    #[default]
    Muscl,
}

impl TransportScheme {
    /// Fraction of the characteristic CFL bound that keeps the scheme stable.
    pub fn cfl_fraction(self) -> f64 {
        match self {
            TransportScheme::Upwind => 1.0,
            TransportScheme::Muscl => 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KineticState {
    pub f: Vec<f64>,
    pub epsilon: f64,
    pub eta: f64,
    pub c: f64,
    pub t: f64,
}

impl KineticState {
    /// Isotropic state `f = ρ(x) / 4π`.
    pub fn isotropic(
        grid: &KineticGrid,
        rho: &[f64],
        epsilon: f64,
        eta: f64,
        c: f64,
    ) -> Result<Self> {
        require_positive("epsilon", epsilon)?;
        require_positive("eta", eta)?;
        require_positive("c", c)?;
        if rho.len() != grid.nx {
            return Err(Error::InvalidArgument(alloc::format!(
                "density has {} cells, grid has {}",
                rho.len(),
                grid.nx
            )));
        }
        let mut f = Vec::with_capacity(grid.n_velocities() * grid.nx);
        for _ in 0..grid.n_velocities() {
            f.extend(rho.iter().map(|r| r / FOUR_PI));
        }
        Ok(KineticState {
            f,
            epsilon,
            eta,
            c,
            t: 0.0,
        })
    }

    /// `ρ0 = 1 + 0.5 cos(πx/L)` in cell averages, isotropic.
    pub fn cosine(grid: &KineticGrid, epsilon: f64, eta: f64, c: f64) -> Result<Self> {
        let rho: Vec<f64> = grid
            .cosine_profile()
            .iter()
            .map(|p| 1.0 + 0.5 * p)
            .collect();
        Self::isotropic(grid, &rho, epsilon, eta, c)
    }

    pub fn density(&self, grid: &KineticGrid) -> Vec<f64> {
        let nx = grid.nx;
        let mut rho = vec![0.0; nx];
        for block in self.f.chunks_exact(nx) {
            for (r, v) in rho.iter_mut().zip(block) {
                *r += v;
            }
        }
        rho.iter_mut().for_each(|r| *r *= grid.weight);
        rho
    }

    pub fn mass(&self, grid: &KineticGrid) -> f64 {
        self.density(grid).iter().sum::<f64>() * grid.dx
    }

    /// `Σ (f − ρ/4π)² w Δx`.
    pub fn anisotropy(&self, grid: &KineticGrid) -> f64 {
        let rho = self.density(grid);
        let mut s = 0.0;
        for block in self.f.chunks_exact(grid.nx) {
            for (v, r) in block.iter().zip(&rho) {
                let d = v - r / FOUR_PI;
                s += d * d;
            }
        }
        s * grid.weight * grid.dx
    }
}

/// Largest stable time step for the scheme.
pub fn max_dt(grid: &KineticGrid, s: &KineticState, scheme: TransportScheme) -> f64 {
    scheme.cfl_fraction() * s.epsilon * grid.dx / (s.c * grid.max_abs_velocity())
}

fn van_leer(a: f64, b: f64) -> f64 {
    if a * b > 0.0 {
        2.0 * a * b / (a + b)
    } else {
        0.0
    }
}

/// Face values of one velocity line including mirrored ghost cells.
fn line_fluxes(
    line: &[f64],
    mirror: &[f64],
    speed: f64,
    scheme: TransportScheme,
    flux: &mut [f64],
) {
    let nx = line.len();
    // ext[k] is cell k − 2.
    let at = |k: isize| -> f64 {
        if k < 0 {
            mirror[(-1 - k) as usize]
        } else if k as usize >= nx {
            mirror[2 * nx - 1 - k as usize]
        } else {
            line[k as usize]
        }
    };
    let slope = |k: isize| -> f64 {
        match scheme {
            TransportScheme::Upwind => 0.0,
            TransportScheme::Muscl => van_leer(at(k) - at(k - 1), at(k + 1) - at(k)),
        }
    };
    // Interior faces 1..nx-1; walls are set by the caller.
    for face in 1..nx {
        let fc = face as isize;
        let value = if speed > 0.0 {
            at(fc - 1) + 0.5 * slope(fc - 1)
        } else {
            at(fc) - 0.5 * slope(fc)
        };
        flux[face] = speed * value;
    }
    // Outgoing wall fluxes.
    if speed < 0.0 {
        flux[0] = speed * (at(0) - 0.5 * slope(0));
    }
    if speed > 0.0 {
        let last = nx as isize - 1;
        flux[nx] = speed * (at(last) + 0.5 * slope(last));
    }
}

/// One transport + relaxation step of length `dt`.
pub fn relax_transport_step(
    grid: &KineticGrid,
    s: &mut KineticState,
    dt: f64,
    scheme: TransportScheme,
) -> Result<()> {
    let limit = max_dt(grid, s, scheme);
    if !(dt > 0.0 && dt <= limit * (1.0 + 1e-12)) {
        return Err(Error::Cfl { dt, limit });
    }
    let nx = grid.nx;
    let nvel = grid.n_velocities();
    let ratio = dt / grid.dx;
    let mut fluxes = vec![0.0; nvel * (nx + 1)];
    for j in 0..grid.ntheta {
        let jm = grid.mirror(j);
        for l in 0..grid.nu {
            let v = j * grid.nu + l;
            let vm = jm * grid.nu + l;
            let speed = grid.speed(j, l, s.c, s.epsilon);
            let line = &s.f[v * nx..(v + 1) * nx];
            let mirror = &s.f[vm * nx..(vm + 1) * nx];
            line_fluxes(
                line,
                mirror,
                speed,
                scheme,
                &mut fluxes[v * (nx + 1)..(v + 1) * (nx + 1)],
            );
        }
    }
    // Incoming wall flux is the negated outgoing flux of the mirror velocity.
    for j in 0..grid.ntheta {
        let jm = grid.mirror(j);
        for l in 0..grid.nu {
            let v = j * grid.nu + l;
            let vm = jm * grid.nu + l;
            let speed = grid.speed(j, l, s.c, s.epsilon);
            if speed > 0.0 {
                fluxes[v * (nx + 1)] = -fluxes[vm * (nx + 1)];
            } else if speed < 0.0 {
                fluxes[v * (nx + 1) + nx] = -fluxes[vm * (nx + 1) + nx];
            }
        }
    }
    for v in 0..nvel {
        let fl = &fluxes[v * (nx + 1)..(v + 1) * (nx + 1)];
        for (i, value) in s.f[v * nx..(v + 1) * nx].iter_mut().enumerate() {
            *value -= ratio * (fl[i + 1] - fl[i]);
        }
    }
    relax(grid, s, dt);
    s.t += dt;
    Ok(())
}

/// Implicit relaxation `f ← (f + r ρ/4π) / (1 + r)`, `r = dt η / ε²`.
pub fn relax(grid: &KineticGrid, s: &mut KineticState, dt: f64) {
    let r = dt * s.eta / (s.epsilon * s.epsilon);
    let rho = s.density(grid);
    let inv = 1.0 / (1.0 + r);
    for block in s.f.chunks_exact_mut(grid.nx) {
        for (v, rh) in block.iter_mut().zip(&rho) {
            *v = (*v + r * rh / FOUR_PI) * inv;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticRunConfig {
    pub t_final: f64,
    /// Fraction of [`max_dt`] used as the step.
    pub cfl: f64,
    pub scheme: TransportScheme,
    /// Approximate number of recorded densities after the initial one.
    pub records: usize,
}

impl Default for KineticRunConfig {
    fn default() -> Self {
        KineticRunConfig {
            t_final: 0.5,
            cfl: 0.9,
            scheme: TransportScheme::Muscl,
            records: 100,
        }
    }
}

/// Recorded densities `ρ(t, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityHistory {
    pub x: Vec<f64>,
    pub times: Vec<f64>,
    pub rho: Vec<Vec<f64>>,
    pub dt: f64,
    pub steps: usize,
}

pub fn run_kinetic(
    grid: &KineticGrid,
    s0: &KineticState,
    cfg: &KineticRunConfig,
) -> Result<(DensityHistory, KineticState)> {
    if !(cfg.t_final >= 0.0 && cfg.t_final.is_finite()) {
        return Err(Error::InvalidArgument(alloc::format!(
            "t_final must be non-negative, got {}",
            cfg.t_final
        )));
    }
    if !(cfg.cfl > 0.0 && cfg.cfl <= 1.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "cfl must lie in (0, 1], got {}",
            cfg.cfl
        )));
    }
    let dt_max = cfg.cfl * max_dt(grid, s0, cfg.scheme);
    let steps = (cfg.t_final / dt_max).ceil() as usize;
    let dt = if steps == 0 {
        0.0
    } else {
        cfg.t_final / steps as f64
    };
    let stride = (steps / cfg.records.max(1)).max(1);
    let mut s = s0.clone();
    let mut history = DensityHistory {
        x: grid.cell_centers(),
        times: vec![s.t],
        rho: vec![s.density(grid)],
        dt,
        steps,
    };
    for k in 1..=steps {
        relax_transport_step(grid, &mut s, dt, cfg.scheme)?;
        s.t = s0.t + k as f64 * dt;
        if k % stride == 0 || k == steps {
            history.times.push(s.t);
            history.rho.push(s.density(grid));
        }
    }
    Ok((history, s))
}

/// Least-squares amplitude of `profile` in `ρ − mean(ρ)`.
pub fn cosine_amplitude(rho: &[f64], profile: &[f64]) -> f64 {
    let mean = rho.iter().sum::<f64>() / rho.len() as f64;
    let num: f64 = rho.iter().zip(profile).map(|(r, p)| (r - mean) * p).sum();
    let den: f64 = profile.iter().map(|p| p * p).sum();
    num / den
}

/// Relative L² size of the part of `ρ − mean` not explained by `profile`.
pub fn shape_error(rho: &[f64], profile: &[f64]) -> f64 {
    let mean = rho.iter().sum::<f64>() / rho.len() as f64;
    let a = cosine_amplitude(rho, profile);
    let (mut res, mut tot) = (0.0, 0.0);
    for (r, p) in rho.iter().zip(profile) {
        let d = r - mean;
        res += (d - a * p) * (d - a * p);
        tot += d * d;
    }
    (res / tot).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusivityEstimate {
    pub d_est: f64,
    /// `(t, A(t))` over the fit window.
    pub samples: Vec<(f64, f64)>,
}

/// Log-linear fit of the cosine amplitude over `t ∈ [0.2, 1.0]·t_final`.
pub fn estimate_diffusivity(
    history: &DensityHistory,
    grid: &KineticGrid,
) -> Result<DiffusivityEstimate> {
    let t_final = *history.times.last().unwrap_or(&0.0);
    let profile = grid.cosine_profile();
    let k = core::f64::consts::PI / grid.length;
    let samples: Vec<(f64, f64)> = history
        .times
        .iter()
        .zip(&history.rho)
        .filter(|(t, _)| **t >= 0.2 * t_final - 1e-12 && **t <= t_final + 1e-12)
        .map(|(t, r)| (*t, cosine_amplitude(r, &profile)))
        .collect();
    if samples.len() < 2 {
        return Err(Error::InvalidArgument(
            "fit window holds fewer than two records".into(),
        ));
    }
    if let Some(&(t, a)) = samples.iter().find(|(_, a)| !(*a > 0.0)) {
        return Err(Error::InvalidArgument(alloc::format!(
            "non-positive amplitude {a} at t={t}"
        )));
    }
    let n = samples.len() as f64;
    let (st, sy) = samples
        .iter()
        .fold((0.0, 0.0), |(a, b), (t, y)| (a + t, b + y.ln()));
    let (mt, my) = (st / n, sy / n);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, y) in &samples {
        sxy += (t - mt) * (y.ln() - my);
        sxx += (t - mt) * (t - mt);
    }
    let slope = sxy / sxx;
    Ok(DiffusivityEstimate {
        d_est: -slope / (k * k),
        samples,
    })
}

/// Discrete L² distance `(Σ (ρ − ρ_D)² Δx)^½` to the diffusion solution
/// `1 + 0.5 e^{−D k² t} cos(kx)` in cell averages.
pub fn analytic_l2_error(rho: &[f64], grid: &KineticGrid, d: f64, t: f64) -> f64 {
    let k = core::f64::consts::PI / grid.length;
    let decay = 0.5 * (-d * k * k * t).exp();
    let s: f64 = rho
        .iter()
        .zip(grid.cosine_profile())
        .map(|(r, p)| {
            let e = r - (1.0 + decay * p);
            e * e
        })
        .sum();
    (s * grid.dx).sqrt()
}

/// Predicted macroscopic diffusivity `c² / (6η)`.
pub fn predicted_diffusivity(eta: f64, c: f64) -> f64 {
    c * c / (6.0 * eta)
}

/// Discrete auxiliary solution and limit tensors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KCheck {
    /// `max |G[k] − v̂ u / 4π|` over velocity nodes and components.
    pub residual: f64,
    /// `D̃ = −Σ u v̂ ⊗ k w`.
    pub d_tensor: [[f64; 2]; 2],
    /// `χ̃ = D̃ · Σ cos²θ w_θ`.
    pub chi: f64,
    /// `1 / (6η)`.
    pub d_expected: f64,
    /// `π / (6η)`.
    pub chi_expected: f64,
}

impl KCheck {
    pub fn off_diagonal(&self) -> f64 {
        self.d_tensor[0][1].abs().max(self.d_tensor[1][0].abs())
    }

    pub fn anisotropy(&self) -> f64 {
        (self.d_tensor[0][0] - self.d_tensor[1][1]).abs()
    }
}

/// Evaluates the relaxation operator on `k = −v̂ u / (4πη)`.
pub fn check_k_solution(grid: &KineticGrid, eta: f64) -> Result<KCheck> {
    require_positive("eta", eta)?;
    let mut k = Vec::with_capacity(grid.n_velocities());
    for &th in &grid.theta {
        let (s, c) = th.sin_cos();
        for &u in &grid.u {
            k.push([-c * u / (FOUR_PI * eta), -s * u / (FOUR_PI * eta)]);
        }
    }
    let rho = k.iter().fold([0.0, 0.0], |acc, v| {
        [acc[0] + v[0] * grid.weight, acc[1] + v[1] * grid.weight]
    });
    let mut residual: f64 = 0.0;
    let mut d = [[0.0; 2]; 2];
    for (j, &th) in grid.theta.iter().enumerate() {
        let (s, c) = th.sin_cos();
        let vhat = [c, s];
        for (l, &u) in grid.u.iter().enumerate() {
            let kv = k[j * grid.nu + l];
            for a in 0..2 {
                let g = eta * (rho[a] / FOUR_PI - kv[a]);
                residual = residual.max((g - vhat[a] * u / FOUR_PI).abs());
                for b in 0..2 {
                    d[a][b] -= u * vhat[a] * kv[b] * grid.weight;
                }
            }
        }
    }
    let w_theta = 2.0 * core::f64::consts::PI / grid.ntheta as f64;
    let cos2: f64 = grid.theta.iter().map(|t| t.cos() * t.cos() * w_theta).sum();
    Ok(KCheck {
        residual,
        d_tensor: d,
        chi: d[0][0] * cos2,
        d_expected: 1.0 / (6.0 * eta),
        chi_expected: core::f64::consts::PI / (6.0 * eta),
    })
}
