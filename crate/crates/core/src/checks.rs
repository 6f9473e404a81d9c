//! Mass, scaling and L_p slope checks for Z and Y on one parameter set.

use serde::Serialize;

use crate::error::Result;
use crate::grid::Grid;
use crate::kernels::{lp_threshold, suggest_grid, validate_lp_laws, y_mass, KernelKind, KernelSet, Route};
use crate::symbol::{SpectralMeasure, Symbol};

pub const MASS_TOL: f64 = 1e-6;
pub const SCALING_TOL: f64 = 1e-6;
pub const SLOPE_TOL: f64 = 0.05;

pub const SUITE_TIMES: [f64; 3] = [0.1, 0.5, 1.0];

#[derive(Debug, Clone, Serialize)]
pub struct KernelCheck {
    pub check: &'static str,
    pub kind: &'static str,
    /// t for mass and scaling rows, p for slope rows.
    pub at: f64,
    pub value: f64,
    pub expected: f64,
    pub deviation: f64,
    pub tol: f64,
    pub pass: bool,
}

pub const CHECK_CSV_HEADER: &str = "check,kind,at,value,expected,deviation,tol,pass";

impl KernelCheck {
    fn new(check: &'static str, kind: &'static str, at: f64, value: f64, expected: f64, deviation: f64, tol: f64) -> Self {
        KernelCheck { check, kind, at, value, expected, deviation, tol, pass: deviation <= tol }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:e},{:e},{:e},{:e},{}",
            self.check, self.kind, self.at, self.value, self.expected, self.deviation, self.tol, self.pass
        )
    }
}

/// The t = 1 grid used when none is given.
pub fn default_suite_grid(alpha: f64, beta: f64, dim: usize) -> Result<Grid> {
    let max_n = if dim == 1 { 1 << 16 } else { 1024 };
    suggest_grid(alpha, beta, dim, 1.0, 1.0, 8.0, max_n)
}

fn rescaled(g: &Grid, alpha: f64, beta: f64, t: f64) -> Result<Grid> {
    Grid::new(g.dim(), g.n(), g.half_width() * t.powf(alpha / beta))
}

fn name(kind: KernelKind) -> &'static str {
    match kind {
        KernelKind::Z => "Z",
        KernelKind::Y => "Y",
        KernelKind::G => "G",
    }
}

/// Runs every check. `grid` is the t = 1 grid; other times use the same n on
/// the domain scaled by t^{α/β}.
pub fn kernel_suite(alpha: f64, beta: f64, measure: &SpectralMeasure, grid: Grid) -> Result<Vec<KernelCheck>> {
    let dim = grid.dim();
    let d = dim as f64;
    let ks1 = KernelSet::new(alpha, Symbol::new(beta, measure.clone())?, grid, Route::Spectral)?;
    let z1 = ks1.kernel_z(1.0)?;
    let y1 = ks1.kernel_y(1.0)?;
    let mut out = Vec::new();
    for &t in &SUITE_TIMES {
        let ks = ks1.with_grid(rescaled(&grid, alpha, beta, t)?)?;
        let z = ks.kernel_z(t)?;
        let y = ks.kernel_y(t)?;
        let mz = z.integral();
        out.push(KernelCheck::new("mass", "Z", t, mz, 1.0, (mz - 1.0).abs(), MASS_TOL));
        let my = y.integral();
        let gy = y_mass(alpha, t)?;
        out.push(KernelCheck::new("mass", "Y", t, my, gy, ((my - gy) / gy).abs(), MASS_TOL));
        if t != 1.0 {
            let sz = t.powf(-alpha * d / beta);
            let sy = t.powf(alpha - 1.0 - alpha * d / beta);
            for (kind, f, f1, s) in [("Z", &z, &z1, sz), ("Y", &y, &y1, sy)] {
                let peak = f.max_abs();
                let dev = f
                    .values()
                    .iter()
                    .zip(f1.values())
                    .map(|(a, b)| (a - s * b).abs())
                    .fold(0.0, f64::max)
                    / peak;
                out.push(KernelCheck::new("scaling", kind, t, dev, 0.0, dev, SCALING_TOL));
            }
        }
    }
    let times: Vec<f64> = (0..9).map(|j| 10f64.powf(-2.0 + 2.0 * j as f64 / 8.0)).collect();
    for kind in [KernelKind::Z, KernelKind::Y] {
        for p in [1.0, 2.0] {
            if p >= lp_threshold(kind, beta, dim) {
                continue;
            }
            let r = validate_lp_laws(&ks1, kind, p, &times)?;
            out.push(KernelCheck::new("slope", name(kind), p, r.slope, r.predicted, r.deviation, SLOPE_TOL));
        }
    }
    Ok(out)
}
