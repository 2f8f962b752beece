//! CSV formats. Floats use Rust's shortest round-trip representation.

use std::io::{self, Write};

use phyllo_core::bifurcation::RegionMap;
use phyllo_core::fem::{FieldPair, Mesh};
use phyllo_core::kinetic::DensityHistory;
use phyllo_core::stability::DispersionCurve;
use phyllo_core::timestepper::DiagnosticsRow;

pub const DIAGNOSTICS_HEADER: &str =
    "t,mass1,mass2,min1,max1,min2,max2,l2dev1,l2dev2,mode_m,mode_n,picard_iters";

pub fn write_dispersion(w: &mut dyn Write, curve: &DispersionCurve) -> io::Result<()> {
    writeln!(w, "k2,a,b,re_lambda")?;
    for i in 0..curve.k2.len() {
        writeln!(
            w,
            "{},{},{},{}",
            curve.k2[i], curve.a[i], curve.b[i], curve.re_lmax[i]
        )?;
    }
    Ok(())
}

pub fn write_region_map(w: &mut dyn Write, map: &RegionMap) -> io::Result<()> {
    writeln!(w, "{},{},region", map.param1, map.param2)?;
    for row in &map.rows {
        writeln!(w, "{},{},{}", row.p1, row.p2, row.label)?;
    }
    Ok(())
}

/// `# t=<time>`, header `x,y,n1,n2`, one row per mesh node.
pub fn write_snapshot(w: &mut dyn Write, mesh: &Mesh, state: &FieldPair) -> io::Result<()> {
    writeln!(w, "# t={}", state.t)?;
    writeln!(w, "x,y,n1,n2")?;
    for (i, [x, y]) in mesh.nodes.iter().enumerate() {
        writeln!(w, "{},{},{},{}", x, y, state.n1[i], state.n2[i])?;
    }
    Ok(())
}

pub fn write_diagnostics(w: &mut dyn Write, rows: &[DiagnosticsRow]) -> io::Result<()> {
    writeln!(w, "{DIAGNOSTICS_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.t,
            r.mass1,
            r.mass2,
            r.min1,
            r.max1,
            r.min2,
            r.max2,
            r.l2dev1,
            r.l2dev2,
            r.mode_m,
            r.mode_n,
            r.picard_iters
        )?;
    }
    Ok(())
}

pub fn write_density_history(w: &mut dyn Write, h: &DensityHistory) -> io::Result<()> {
    writeln!(w, "t,x,rho")?;
    for (t, rho) in h.times.iter().zip(&h.rho) {
        for (x, r) in h.x.iter().zip(rho) {
            writeln!(w, "{t},{x},{r}")?;
        }
    }
    Ok(())
}
