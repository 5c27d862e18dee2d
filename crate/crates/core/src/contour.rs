//! Numerical verification of the deformed integration paths: evaluates
//! Im(Phi + 2 pi m z) over complex grids, its closed-form partial
//! derivatives, level-set extraction by marching squares, and grid export.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ConeAngles, Knot};
use crate::potential::{branch_cuts, im_phi_real, phi_unchecked, PotentialSpec};

/// Rectangular evaluation window with node counts per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub nu: u32,
    pub nv: u32,
}

impl GridSpec {
    /// Default window: u spans [-0.1, alpha_min/2 + 0.1], v spans [-1.5, 1.5]
    /// at 1200 x 800 nodes. The deformed paths live well inside this box.
    pub fn default_for(spec: &PotentialSpec) -> GridSpec {
        GridSpec {
            u_min: -0.1,
            u_max: spec.angles().min_angle() / 2.0 + 0.1,
            v_min: -1.5,
            v_max: 1.5,
            nu: 1200,
            nv: 800,
        }
    }

    pub fn du(&self) -> f64 {
        (self.u_max - self.u_min) / (self.nu - 1) as f64
    }

    pub fn dv(&self) -> f64 {
        (self.v_max - self.v_min) / (self.nv - 1) as f64
    }

    pub fn u_at(&self, iu: u32) -> f64 {
        self.u_min + self.du() * iu as f64
    }

    pub fn v_at(&self, iv: u32) -> f64 {
        self.v_min + self.dv() * iv as f64
    }
}

/// Sampled values of Im(Phi + 2 pi m z) with a mask flagging nodes within
/// one cell of a branch cut (plus the origin cell for the rings, where the
/// closed-form derivatives diverge).
#[derive(Clone, Debug)]
pub struct FieldGrid {
    pub grid: GridSpec,
    pub m: i32,
    values: Vec<f64>,
    masked: Vec<bool>,
}

impl FieldGrid {
    fn index(&self, iu: u32, iv: u32) -> usize {
        (iv * self.grid.nu + iu) as usize
    }

    pub fn is_masked(&self, iu: u32, iv: u32) -> bool {
        self.masked[self.index(iu, iv)]
    }

    /// Node value; None on masked nodes.
    pub fn value(&self, iu: u32, iv: u32) -> Option<f64> {
        if self.is_masked(iu, iv) {
            None
        } else {
            Some(self.values[self.index(iu, iv)])
        }
    }

    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (v, &m) in self.values.iter().zip(&self.masked) {
            if !m {
                lo = lo.min(*v);
                hi = hi.max(*v);
            }
        }
        (lo, hi)
    }
}

/// Pointwise Im(Phi + 2 pi m z) over the grid, masked near cuts.
pub fn field(spec: &PotentialSpec, m: i32, grid: &GridSpec) -> FieldGrid {
    let cuts = branch_cuts(spec, grid.u_min - grid.du(), grid.u_max + grid.du());
    let du = grid.du();
    let dv = grid.dv();
    let origin_masked = spec.knot() == Knot::B;
    let rows: Vec<Vec<(f64, bool)>> = (0..grid.nv)
        .into_par_iter()
        .map(|iv| {
            let v = grid.v_at(iv);
            (0..grid.nu)
                .map(|iu| {
                    let u = grid.u_at(iu);
                    let near_cut = cuts.iter().any(|cut| {
                        let side = if cut.upward { v > -dv } else { v < dv };
                        side && (u - cut.anchor).abs() < du
                    });
                    let near_origin = origin_masked && u.abs() < du && v.abs() < dv;
                    if near_cut || near_origin {
                        return (f64::NAN, true);
                    }
                    match phi_unchecked(spec, Complex64::new(u, v)) {
                        Ok(p) => (p.im + 2.0 * PI * m as f64 * v, false),
                        Err(_) => (f64::NAN, true),
                    }
                })
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity((grid.nu * grid.nv) as usize);
    let mut masked = Vec::with_capacity((grid.nu * grid.nv) as usize);
    for row in rows {
        for (val, msk) in row {
            values.push(val);
            masked.push(msk);
        }
    }
    FieldGrid {
        grid: *grid,
        m,
        values,
        masked,
    }
}

/// Closed-form partial derivatives (d/du, d/dv) of Im(Phi + 2 pi m z).
/// Errors on the singular loci where a logarithm argument vanishes.
pub fn partials(spec: &PotentialSpec, m: i32, z: Complex64) -> Result<(f64, f64)> {
    let (u, v) = (z.re, z.im);
    let term = |a: f64| -> Result<(f64, f64)> {
        // contribution of the pair -Li2(e^{2i(a+z)})/2 + Li2(e^{2i(a-z)})/2
        let g1 = Complex64::new(1.0, 0.0) - Complex64::from_polar((-2.0 * v).exp(), a + 2.0 * u);
        let g2 = Complex64::new(1.0, 0.0) - Complex64::from_polar((2.0 * v).exp(), a - 2.0 * u);
        if g1.norm() < 1e-14 || g2.norm() < 1e-14 {
            return Err(Error::Singularity(format!(
                "log argument vanishes at z = {z} for angle {a}"
            )));
        }
        Ok((g1.norm().ln() + g2.norm().ln(), -g1.arg() - g2.arg() + a))
    };
    match *spec.angles() {
        ConeAngles::E { alpha } => {
            let (du, dv) = term(alpha)?;
            Ok((du, dv + 2.0 * PI * m as f64))
        }
        ConeAngles::B { alpha } => {
            let mut du = 0.0;
            let mut dv = 0.0;
            for a in alpha {
                let (tu, tv) = term(a)?;
                du += tu;
                dv += tv;
            }
            // -Li2(e^{2iz}) and +Li2(e^{4iz}) plus the polynomial part
            let h1 = Complex64::new(1.0, 0.0) - Complex64::from_polar((-2.0 * v).exp(), 2.0 * u);
            let h2 = Complex64::new(1.0, 0.0) - Complex64::from_polar((-4.0 * v).exp(), 4.0 * u);
            if h1.norm() < 1e-14 || h2.norm() < 1e-14 {
                return Err(Error::Singularity(format!(
                    "log argument vanishes at z = {z}"
                )));
            }
            du += 2.0 * h1.norm().ln() - 4.0 * h2.norm().ln() - 6.0 * v;
            dv += -2.0 * h1.arg() + 4.0 * h2.arg() + 5.0 * PI - 6.0 * u + 2.0 * PI * m as f64;
            Ok((du, dv))
        }
    }
}

/// Which closed quadrant a path is confined to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Quadrant {
    First,
    Fourth,
}

/// How a path endpoint terminates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EndpointKind {
    /// Within one cell of the real axis.
    Axis,
    /// Against a masked branch-cut wall.
    CutWall,
}

/// A connected polyline along one level of the field, confined to a closed
/// quadrant, with both ends on the real axis or pressed against a cut.
#[derive(Clone, Debug, Serialize)]
pub struct LevelPath {
    pub points: Vec<(f64, f64)>,
    pub level: f64,
    pub quadrant: Quadrant,
    pub endpoints: [EndpointKind; 2],
}

impl LevelPath {
    pub fn arc_length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| ((w[1].0 - w[0].0).powi(2) + (w[1].1 - w[0].1).powi(2)).sqrt())
            .sum()
    }
}

/// Midpoint of Im Phi(alpha_min/2) and Im Phi(x0): the default level for
/// path extraction.
pub fn default_level(spec: &PotentialSpec) -> Result<f64> {
    let x0 = crate::potential::critical_points(spec)?.x0();
    let at_half = im_phi_real(spec, spec.angles().min_angle() / 2.0);
    Ok(0.5 * (at_half + im_phi_real(spec, x0)))
}

/// Marching-squares extraction of the level component that reproduces the
/// deformed integration path: both endpoints near the real axis, or one on
/// the axis and the other terminating on a branch-cut wall.
///
/// Returns None when no such component exists at this resolution.
pub fn level_path(
    spec: &PotentialSpec,
    m: i32,
    level: f64,
    quadrant: Quadrant,
    grid: &GridSpec,
) -> Result<Option<LevelPath>> {
    let fg = field(spec, m, grid);
    let g = &fg.grid;
    // rows restricted to the closed quadrant
    let rows: Vec<u32> = (0..g.nv)
        .filter(|&iv| match quadrant {
            Quadrant::First => g.v_at(iv) >= -1e-14,
            Quadrant::Fourth => g.v_at(iv) <= 1e-14,
        })
        .collect();
    if rows.len() < 2 {
        return Ok(None);
    }

    let segments = march_cells(&fg, level, &rows);
    let chains = chain_segments(&segments);

    let axis_v = match quadrant {
        Quadrant::First => rows
            .iter()
            .map(|&iv| g.v_at(iv))
            .fold(f64::INFINITY, f64::min),
        Quadrant::Fourth => rows
            .iter()
            .map(|&iv| g.v_at(iv))
            .fold(f64::NEG_INFINITY, f64::max),
    };
    let dv = g.dv();
    let du = g.du();

    let classify = |pt: (f64, f64)| -> Option<EndpointKind> {
        if (pt.1 - axis_v).abs() <= dv * 1.5 {
            return Some(EndpointKind::Axis);
        }
        // wall contact: a masked node within one cell
        let iu = ((pt.0 - g.u_min) / du).round() as i64;
        let iv = ((pt.1 - g.v_min) / dv).round() as i64;
        for ou in -1..=1i64 {
            for ov in -1..=1i64 {
                let (cu, cv) = (iu + ou, iv + ov);
                if cu >= 0
                    && cv >= 0
                    && (cu as u32) < g.nu
                    && (cv as u32) < g.nv
                    && fg.is_masked(cu as u32, cv as u32)
                {
                    return Some(EndpointKind::CutWall);
                }
            }
        }
        None
    };

    let mut best: Option<LevelPath> = None;
    let mut wall_blocked = 0usize;
    for chain in chains {
        if chain.len() < 2 {
            continue;
        }
        let e0 = classify(*chain.first().unwrap());
        let e1 = classify(*chain.last().unwrap());
        let valid = match (e0, e1) {
            (Some(EndpointKind::Axis), Some(k)) => Some([EndpointKind::Axis, k]),
            (Some(k), Some(EndpointKind::Axis)) => Some([k, EndpointKind::Axis]),
            _ => None,
        };
        if let Some(endpoints) = valid {
            let candidate = LevelPath {
                points: chain,
                level,
                quadrant,
                endpoints,
            };
            let better = best
                .as_ref()
                .map(|b| candidate.arc_length() > b.arc_length())
                .unwrap_or(true);
            if better {
                best = Some(candidate);
            }
        } else if matches!(e0, Some(EndpointKind::CutWall))
            || matches!(e1, Some(EndpointKind::CutWall))
        {
            wall_blocked += 1;
        }
    }
    if best.is_none() && wall_blocked >= 2 {
        return Err(Error::Resolution(format!(
            "{wall_blocked} level components terminate on masked cells with no axis contact"
        )));
    }
    Ok(best)
}

type Segment = ((u64, (f64, f64)), (u64, (f64, f64)));

/// Classic marching squares over the unmasked cells of the selected rows;
/// every crossing point is keyed by its grid edge so that segments from
/// adjacent cells join exactly.
fn march_cells(fg: &FieldGrid, level: f64, rows: &[u32]) -> Vec<Segment> {
    let g = &fg.grid;
    let mut segments = Vec::new();
    for w in rows.windows(2) {
        let (iv0, iv1) = (w[0], w[1]);
        for iu in 0..g.nu - 1 {
            let corners = [
                fg.value(iu, iv0),
                fg.value(iu + 1, iv0),
                fg.value(iu + 1, iv1),
                fg.value(iu, iv1),
            ];
            if corners.iter().any(|c| c.is_none()) {
                continue;
            }
            let vals = [
                corners[0].unwrap(),
                corners[1].unwrap(),
                corners[2].unwrap(),
                corners[3].unwrap(),
            ];
            let above: Vec<bool> = vals.iter().map(|&v| v > level).collect();
            if above.iter().all(|&b| b) || above.iter().all(|&b| !b) {
                continue;
            }
            let pos = [
                (g.u_at(iu), g.v_at(iv0)),
                (g.u_at(iu + 1), g.v_at(iv0)),
                (g.u_at(iu + 1), g.v_at(iv1)),
                (g.u_at(iu), g.v_at(iv1)),
            ];
            // edge ids: unique per geometric grid edge
            let eid = [
                edge_id(g, iu, iv0, true),
                edge_id(g, iu + 1, iv0, false),
                edge_id(g, iu, iv1, true),
                edge_id(g, iu, iv0, false),
            ];
            let mut crossings: Vec<(u64, (f64, f64))> = Vec::with_capacity(4);
            for (e, (a, b)) in [
                (0usize, (0usize, 1usize)),
                (1, (1, 2)),
                (2, (3, 2)),
                (3, (0, 3)),
            ] {
                if above[a] != above[b] {
                    let t = (level - vals[a]) / (vals[b] - vals[a]);
                    let p = (
                        pos[a].0 + t * (pos[b].0 - pos[a].0),
                        pos[a].1 + t * (pos[b].1 - pos[a].1),
                    );
                    crossings.push((eid[e], p));
                }
            }
            match crossings.len() {
                2 => segments.push((crossings[0], crossings[1])),
                4 => {
                    // saddle: split by the cell-center average
                    let center = 0.25 * (vals[0] + vals[1] + vals[2] + vals[3]);
                    // crossings arrive in edge order bottom, right, top, left
                    if (center > level) == above[0] {
                        segments.push((crossings[0], crossings[1]));
                        segments.push((crossings[2], crossings[3]));
                    } else {
                        segments.push((crossings[0], crossings[3]));
                        segments.push((crossings[1], crossings[2]));
                    }
                }
                _ => {}
            }
        }
    }
    segments
}

fn edge_id(g: &GridSpec, iu: u32, iv: u32, horizontal: bool) -> u64 {
    let base = (iv as u64) * (g.nu as u64) + iu as u64;
    base * 2 + if horizontal { 0 } else { 1 }
}

/// Join the segment soup into polylines by walking matching edge ids.
fn chain_segments(segments: &[Segment]) -> Vec<Vec<(f64, f64)>> {
    use std::collections::HashMap;
    let mut adj: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, seg) in segments.iter().enumerate() {
        adj.entry(seg.0 .0).or_default().push(i);
        adj.entry(seg.1 .0).or_default().push(i);
    }
    let mut used = vec![false; segments.len()];
    let mut chains = Vec::new();
    // endpoints (degree-1 edges) first so that open chains start at an end
    let mut starts: Vec<u64> = adj
        .iter()
        .filter(|(_, v)| v.len() == 1)
        .map(|(&k, _)| k)
        .collect();
    starts.sort_unstable();
    let all_keys: Vec<u64> = {
        let mut ks: Vec<u64> = adj.keys().copied().collect();
        ks.sort_unstable();
        ks
    };
    for start in starts.into_iter().chain(all_keys) {
        let Some(first_candidates) = adj.get(&start) else {
            continue;
        };
        let Some(&first) = first_candidates.iter().find(|&&i| !used[i]) else {
            continue;
        };
        let mut chain = Vec::new();
        let mut edge = start;
        let mut seg_idx = first;
        loop {
            used[seg_idx] = true;
            let seg = &segments[seg_idx];
            let (here, next) = if seg.0 .0 == edge {
                (seg.0, seg.1)
            } else {
                (seg.1, seg.0)
            };
            if chain.is_empty() {
                chain.push(here.1);
            }
            chain.push(next.1);
            edge = next.0;
            let Some(cands) = adj.get(&edge) else { break };
            let Some(&ni) = cands.iter().find(|&&i| !used[i]) else {
                break;
            };
            seg_idx = ni;
        }
        if chain.len() >= 2 {
            chains.push(chain);
        }
    }
    chains
}

/// Lossless grid export. CSV rows are `u,v,value,masked` with shortest
/// round-trip decimals and an empty value on masked nodes; JSON is one
/// record per node in the same order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

pub fn export_grid(fg: &FieldGrid, format: ExportFormat, out: &mut dyn Write) -> Result<()> {
    let g = &fg.grid;
    match format {
        ExportFormat::Csv => {
            writeln!(out, "u,v,value,masked")?;
            for iv in 0..g.nv {
                for iu in 0..g.nu {
                    let u = g.u_at(iu);
                    let v = g.v_at(iv);
                    match fg.value(iu, iv) {
                        Some(val) => writeln!(out, "{u},{v},{val},0")?,
                        None => writeln!(out, "{u},{v},,1")?,
                    }
                }
            }
        }
        ExportFormat::Json => {
            for iv in 0..g.nv {
                for iu in 0..g.nu {
                    let u = g.u_at(iu);
                    let v = g.v_at(iv);
                    match fg.value(iu, iv) {
                        Some(val) => {
                            writeln!(out, "{{\"u\":{u},\"v\":{v},\"value\":{val},\"masked\":0}}")?
                        }
                        None => {
                            writeln!(out, "{{\"u\":{u},\"v\":{v},\"value\":null,\"masked\":1}}")?
                        }
                    }
                }
            }
        }
    }
    Ok(())
}
