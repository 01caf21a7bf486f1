//! Node values on a uniform lattice with finite-difference jets.
//!
//! Nodes use 5-point central differences (fourth order). Between nodes a
//! 6-point tensor Lagrange stencil is differentiated, which keeps the value
//! and both derivative orders consistent with the node formulas. Points
//! closer than `2h` to the edge are out of domain.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::graph::{SurfaceJet, Window};
use crate::space::{Side, SpaceParams};

const NODE_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct GridData {
    pub x0: f64,
    pub y0: f64,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    /// Row-major: index `j * nx + i` holds the node `(x0 + i h, y0 + j h)`.
    pub values: Vec<f64>,
}

/// Metadata written next to a grid CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSidecar {
    pub kappa: f64,
    pub bundle: f64,
    pub side: Side,
    pub window: Window,
    pub h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_mean_curvature: Option<f64>,
}

fn lattice_count(a: f64, b: f64, h: f64) -> Result<usize> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(GeomError::InvalidParameter(format!("grid spacing must be positive, got {h}")));
    }
    let steps = (b - a) / h;
    let n = steps.round();
    if (steps - n).abs() > 1e-6 || n < 1.0 {
        return Err(GeomError::UnsupportedWindow(format!("interval [{a}, {b}] is not a whole number of steps of {h}")));
    }
    Ok(n as usize + 1)
}

/// Finite-difference weights for derivatives 0, 1, 2 at `z` from nodes `xs`
/// (Fornberg's recursion).
fn fornberg(z: f64, xs: &[f64]) -> [Vec<f64>; 3] {
    let n = xs.len();
    let m = 2;
    let mut c = vec![[0.0f64; 3]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    let mut out = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for (j, row) in c.iter().enumerate() {
        for k in 0..3 {
            out[k][j] = row[k];
        }
    }
    out
}

/// Stencil start index and weights in index units along one axis.
fn axis_stencil(t: f64, n: usize) -> Option<(usize, [Vec<f64>; 3])> {
    let last = n as f64 - 3.0;
    if n < 5 || t < 2.0 - NODE_SNAP || t > last + NODE_SNAP {
        return None;
    }
    let r = t.round();
    if (t - r).abs() <= NODE_SNAP {
        let w0 = vec![0.0, 0.0, 1.0, 0.0, 0.0];
        let w1 = vec![1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        let w2 = vec![-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        return Some((r as usize - 2, [w0, w1, w2]));
    }
    let f = t.floor();
    let start = f as isize - 2;
    if start < 0 || f as usize + 3 > n - 1 {
        return None;
    }
    let xs: Vec<f64> = (0..6).map(|k| (start + k) as f64).collect();
    Some((start as usize, fornberg(t, &xs)))
}

impl GridData {
    pub fn zeros(window: &Window, h: f64) -> Result<Self> {
        let nx = lattice_count(window.x0, window.x1, h)?;
        let ny = lattice_count(window.y0, window.y1, h)?;
        Ok(Self { x0: window.x0, y0: window.y0, h, nx, ny, values: vec![0.0; nx * ny] })
    }

    pub fn from_fn(window: &Window, h: f64, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut g = Self::zeros(window, h)?;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let (x, y) = g.node(i, j);
                g.values[j * g.nx + i] = f(x, y);
            }
        }
        Ok(g)
    }

    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x0 + i as f64 * self.h, self.y0 + j as f64 * self.h)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[j * self.nx + i] = v;
    }

    pub fn extent(&self) -> Window {
        Window {
            x0: self.x0,
            x1: self.x0 + (self.nx - 1) as f64 * self.h,
            y0: self.y0,
            y1: self.y0 + (self.ny - 1) as f64 * self.h,
        }
    }

    /// Points where a full stencil is available.
    pub fn jet_window(&self) -> Window {
        let e = self.extent();
        let d = 2.0 * self.h;
        Window { x0: e.x0 + d, x1: e.x1 - d, y0: e.y0 + d, y1: e.y1 - d }
    }

    /// Index of the node at `(x, y)` if there is one.
    pub fn node_index(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let tx = (x - self.x0) / self.h;
        let ty = (y - self.y0) / self.h;
        let (rx, ry) = (tx.round(), ty.round());
        if (tx - rx).abs() > NODE_SNAP || (ty - ry).abs() > NODE_SNAP {
            return None;
        }
        if rx < 0.0 || ry < 0.0 || rx as usize >= self.nx || ry as usize >= self.ny {
            return None;
        }
        Some((rx as usize, ry as usize))
    }

    pub fn jet(&self, x: f64, y: f64) -> Result<SurfaceJet> {
        let tx = (x - self.x0) / self.h;
        let ty = (y - self.y0) / self.h;
        let (sx, wx) = axis_stencil(tx, self.nx).ok_or(GeomError::OutOfWindow { x, y })?;
        let (sy, wy) = axis_stencil(ty, self.ny).ok_or(GeomError::OutOfWindow { x, y })?;
        let mut acc = [0.0f64; 6];
        for (b, _) in wy[0].iter().enumerate() {
            let row = (sy + b) * self.nx + sx;
            // Partial sums along x for this row, then weight by y.
            let mut rx = [0.0f64; 3];
            for (a, _) in wx[0].iter().enumerate() {
                let f = self.values[row + a];
                rx[0] += wx[0][a] * f;
                rx[1] += wx[1][a] * f;
                rx[2] += wx[2][a] * f;
            }
            acc[0] += wy[0][b] * rx[0];
            acc[1] += wy[0][b] * rx[1];
            acc[2] += wy[1][b] * rx[0];
            acc[3] += wy[0][b] * rx[2];
            acc[4] += wy[1][b] * rx[1];
            acc[5] += wy[2][b] * rx[0];
        }
        let h = self.h;
        Ok(SurfaceJet {
            u: acc[0],
            ux: acc[1] / h,
            uy: acc[2] / h,
            uxx: acc[3] / (h * h),
            uxy: acc[4] / (h * h),
            uyy: acc[5] / (h * h),
        })
    }

    pub fn to_csv(&self, header: &str) -> String {
        let mut s = String::with_capacity(self.values.len() * 72);
        s.push_str(header);
        s.push('\n');
        for j in 0..self.ny {
            for i in 0..self.nx {
                let (x, y) = self.node(i, j);
                let _ = writeln!(s, "{:.16e},{:.16e},{:.16e}", x, y, self.get(i, j));
            }
        }
        s
    }

    pub fn sidecar(&self, space: &SpaceParams, target: Option<f64>) -> GridSidecar {
        GridSidecar {
            kappa: space.kappa,
            bundle: space.bundle,
            side: space.side,
            window: self.extent(),
            h: self.h,
            target_mean_curvature: target,
        }
    }

    /// Writes `<stem>.csv` with header `x,y,value` and `<stem>.json`.
    pub fn write(&self, dir: &Path, stem: &str, space: &SpaceParams, target: Option<f64>) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(format!("{stem}.csv")), self.to_csv("x,y,value"))?;
        let meta = serde_json::to_string_pretty(&self.sidecar(space, target))?;
        fs::write(dir.join(format!("{stem}.json")), meta + "\n")?;
        Ok(())
    }

    pub fn read(csv: &Path, sidecar: &Path) -> Result<(Self, GridSidecar)> {
        let meta: GridSidecar = serde_json::from_str(&fs::read_to_string(sidecar)?)?;
        let mut grid = Self::zeros(&meta.window, meta.h)?;
        let text = fs::read_to_string(csv)?;
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "x,y,value" => {}
            other => return Err(GeomError::Io(format!("unexpected grid header {other:?}"))),
        }
        let mut count = 0;
        for (k, line) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
            let fields: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| GeomError::Io(format!("line {}: {e}", k + 2)))?;
            if fields.len() != 3 {
                return Err(GeomError::Io(format!("line {}: expected 3 fields", k + 2)));
            }
            let (i, j) = grid
                .node_index(fields[0], fields[1])
                .ok_or_else(|| GeomError::Io(format!("line {}: ({}, {}) is not a node", k + 2, fields[0], fields[1])))?;
            grid.set(i, j, fields[2]);
            count += 1;
        }
        if count != grid.nx * grid.ny {
            return Err(GeomError::Io(format!("expected {} rows, found {count}", grid.nx * grid.ny)));
        }
        Ok((grid, meta))
    }
}
