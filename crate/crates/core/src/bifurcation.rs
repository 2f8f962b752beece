//! Region maps over two-parameter grids.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::stability::{
    conditions_from_ratios, delta_threshold, homogeneous_stability, linearized_diffusion,
    require_stable_reaction, HomogeneousStability,
};

/// Region of the parameter plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    /// No positive equilibrium.
    Infeasible,
    /// Positive equilibrium that is not stable to uniform perturbations.
    HomogUnstable,
    /// Neither Turing condition holds.
    None,
    /// Only `s1 < 0`.
    I,
    /// Only `s2 > 0`.
    II,
    /// Both conditions: Turing instability.
    III,
}

impl RegionLabel {
    pub fn name(self) -> &'static str {
        match self {
            RegionLabel::Infeasible => "Infeasible",
            RegionLabel::HomogUnstable => "HomogUnstable",
            RegionLabel::None => "None",
            RegionLabel::I => "I",
            RegionLabel::II => "II",
            RegionLabel::III => "III",
        }
    }

    fn from_conditions(cond_g: bool, cond_disc: bool) -> Self {
        match (cond_g, cond_disc) {
            (true, true) => RegionLabel::III,
            (true, false) => RegionLabel::I,
            (false, true) => RegionLabel::II,
            (false, false) => RegionLabel::None,
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Cross-diffusion ratios that replace the ones derived from the turning laws.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RatioOverrides {
    pub delta12: Option<f64>,
    pub delta21: Option<f64>,
}

/// Labels a single parameter point.
pub fn classify_point(p: &ModelParams) -> RegionLabel {
    classify_with(p, RatioOverrides::default())
}

pub fn classify_with(p: &ModelParams, ov: RatioOverrides) -> RegionLabel {
    match homogeneous_stability(p) {
        HomogeneousStability::NoPositiveEquilibrium => return RegionLabel::Infeasible,
        HomogeneousStability::Unstable | HomogeneousStability::HopfBoundary => {
            return RegionLabel::HomogUnstable
        }
        HomogeneousStability::Stable => {}
    }
    let Ok(d) = linearized_diffusion(p) else {
        return RegionLabel::Infeasible;
    };
    let delta12 = ov.delta12.unwrap_or_else(|| d.delta12());
    let delta21 = ov.delta21.unwrap_or_else(|| d.delta21());
    let t = conditions_from_ratios(p, d.delta(), delta12, delta21, 0.0);
    RegionLabel::from_conditions(t.cond_g, t.cond_disc)
}

/// Parameters that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Zeta,
    Delta,
    Beta,
    Nu,
    Tau,
    /// Multiplies the turning law of species 1.
    Delta12Scale,
    /// Multiplies the turning law of species 2.
    Delta21Scale,
    /// Sets `D̂12 / D̂11` directly.
    Delta12,
    /// Sets `D̂21 / D̂11` directly.
    Delta21,
}

impl SweepParam {
    pub const ALL: [SweepParam; 9] = [
        SweepParam::Zeta,
        SweepParam::Delta,
        SweepParam::Beta,
        SweepParam::Nu,
        SweepParam::Tau,
        SweepParam::Delta12Scale,
        SweepParam::Delta21Scale,
        SweepParam::Delta12,
        SweepParam::Delta21,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Zeta => "zeta",
            SweepParam::Delta => "delta",
            SweepParam::Beta => "beta",
            SweepParam::Nu => "nu",
            SweepParam::Tau => "tau",
            SweepParam::Delta12Scale => "delta12_scale",
            SweepParam::Delta21Scale => "delta21_scale",
            SweepParam::Delta12 => "delta12",
            SweepParam::Delta21 => "delta21",
        }
    }

    fn apply(self, p: &mut ModelParams, ov: &mut RatioOverrides, value: f64) {
        match self {
            SweepParam::Zeta => p.zeta = value,
            SweepParam::Delta => p.delta = value,
            SweepParam::Beta => p.beta = value,
            SweepParam::Nu => p.nu = value,
            SweepParam::Tau => p.tau = value,
            SweepParam::Delta12Scale => p.lam1 = p.lam1.scaled(value),
            SweepParam::Delta21Scale => p.lam2 = p.lam2.scaled(value),
            SweepParam::Delta12 => ov.delta12 = Some(value),
            SweepParam::Delta21 => ov.delta21 = Some(value),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepParam::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = SweepParam::ALL.iter().map(|p| p.name()).collect();
                Error::InvalidArgument(alloc::format!(
                    "unknown sweep parameter `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// Uniform grid `min, …, max` with `count` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Range {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        let r = Range { min, max, count };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::InvalidArgument(alloc::format!(
                "range count must be at least 2, got {}",
                self.count
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::InvalidArgument(alloc::format!(
                "range needs finite min < max, got {}:{}",
                self.min,
                self.max
            )));
        }
        Ok(())
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

impl FromStr for Range {
    type Err = Error;

    /// Parses `min:max:count`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(alloc::format!("expected min:max:count, got `{s}`"));
        let mut it = s.split(':');
        let (Some(a), Some(b), Some(c), None) = (it.next(), it.next(), it.next(), it.next()) else {
            return Err(bad());
        };
        let min = a.trim().parse::<f64>().map_err(|_| bad())?;
        let max = b.trim().parse::<f64>().map_err(|_| bad())?;
        let count = c.trim().parse::<usize>().map_err(|_| bad())?;
        Range::new(min, max, count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub param: SweepParam,
    pub range: Range,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub base: ModelParams,
    pub axis1: Axis,
    pub axis2: Axis,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.axis1.range.validate()?;
        self.axis2.range.validate()?;
        if self.axis1.param == self.axis2.param {
            return Err(Error::InvalidArgument(alloc::format!(
                "param1 and param2 are both `{}`",
                self.axis1.param
            )));
        }
        Ok(())
    }

    /// Parameter point and overrides at a grid node.
    pub fn point(&self, v1: f64, v2: f64) -> (ModelParams, RatioOverrides) {
        let mut p = self.base;
        let mut ov = RatioOverrides::default();
        self.axis1.param.apply(&mut p, &mut ov, v1);
        self.axis2.param.apply(&mut p, &mut ov, v2);
        (p, ov)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionRow {
    pub p1: f64,
    pub p2: f64,
    pub label: RegionLabel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap {
    pub param1: SweepParam,
    pub param2: SweepParam,
    pub count1: usize,
    pub count2: usize,
    /// Row-major with `param1` as the outer index.
    pub rows: Vec<RegionRow>,
}

impl RegionMap {
    pub fn label(&self, i1: usize, i2: usize) -> RegionLabel {
        self.rows[i1 * self.count2 + i2].label
    }
}

pub fn sweep(spec: &SweepSpec) -> Result<RegionMap> {
    spec.validate()?;
    let v1 = spec.axis1.range.values();
    let v2 = spec.axis2.range.values();
    let mut rows = Vec::with_capacity(v1.len() * v2.len());
    for &a in &v1 {
        for &b in &v2 {
            let (p, ov) = spec.point(a, b);
            rows.push(RegionRow {
                p1: a,
                p2: b,
                label: classify_with(&p, ov),
            });
        }
    }
    Ok(RegionMap {
        param1: spec.axis1.param,
        param2: spec.axis2.param,
        count1: v1.len(),
        count2: v2.len(),
        rows,
    })
}

/// `δ̄` over a `(δ12, δ21)` grid, row-major with `δ12` outer.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSurface {
    pub delta12: Vec<f64>,
    pub delta21: Vec<f64>,
    pub values: Vec<f64>,
}

impl ThresholdSurface {
    pub fn at(&self, i12: usize, i21: usize) -> f64 {
        self.values[i12 * self.delta21.len() + i21]
    }
}

pub fn threshold_surface(
    p: &ModelParams,
    delta12: Range,
    delta21: Range,
) -> Result<ThresholdSurface> {
    require_stable_reaction(p)?;
    delta12.validate()?;
    delta21.validate()?;
    let d12 = delta12.values();
    let d21 = delta21.values();
    let mut values = Vec::with_capacity(d12.len() * d21.len());
    for &a in &d12 {
        for &b in &d21 {
            values.push(delta_threshold(p, a, b)?.value);
        }
    }
    Ok(ThresholdSurface {
        delta12: d12,
        delta21: d21,
        values,
    })
}
