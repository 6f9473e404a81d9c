//! Uniform periodic grids on [-L, L)^d, sampled fields and the spectral
//! multiplier engine.
//!
//! Nodes sit at x_i = -L + i h, so the origin is node n/2 on every axis.
//! Frequencies follow the FFT ordering ξ_j = π j' / L with j' = j for
//! j < n/2 and j' = j - n otherwise. Multi-dimensional arrays are row-major
//! with the first coordinate slowest.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::{Arc, OnceLock, RwLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    half_width: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, half_width: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::domain(format!("grids exist for d ∈ {{1,2}}, got {dim}")));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::domain(format!("points per axis must be a power of two >= 16, got {n}")));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::domain(format!("half width must be positive, got {half_width}")));
        }
        Ok(Grid { dim, n, half_width })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Cell volume h^d.
    pub fn cell(&self) -> f64 {
        self.h().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.h()
    }

    /// Index of the origin along one axis.
    pub fn origin(&self) -> usize {
        self.n / 2
    }

    /// Flat index of the node closest to `x` (clamped to the grid).
    pub fn nearest(&self, x: &[f64]) -> usize {
        let h = self.h();
        let mut idx = 0;
        for c in x.iter().take(self.dim) {
            let i = ((c + self.half_width) / h).round().clamp(0.0, (self.n - 1) as f64) as usize;
            idx = idx * self.n + i;
        }
        idx
    }

    /// Coordinates of the node with flat index `idx`.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        if self.dim == 1 {
            [self.coord(idx), 0.0]
        } else {
            [self.coord(idx / self.n), self.coord(idx % self.n)]
        }
    }

    /// |x| at flat index `idx`.
    pub fn radius(&self, idx: usize) -> f64 {
        let p = self.point(idx);
        p[0].hypot(p[1])
    }

    /// Axis wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n as isize;
        (0..n)
            .map(|j| {
                let js = if j < n / 2 { j } else { j - n };
                PI * js as f64 / self.half_width
            })
            .collect()
    }

    /// Tabulates `m(ξ)` over the frequency lattice in FFT order.
    pub fn tabulate<F: FnMut(&[f64]) -> f64>(&self, mut m: F) -> Vec<f64> {
        let k = self.wavenumbers();
        if self.dim == 1 {
            k.iter().map(|x| m(&[*x])).collect()
        } else {
            let mut out = Vec::with_capacity(self.len());
            for kx in &k {
                for ky in &k {
                    out.push(m(&[*kx, *ky]));
                }
            }
            out
        }
    }

    fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::domain("fields live on different grids"))
        }
    }
}

/// A real function sampled at the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::domain(format!(
                "field has {} values, grid needs {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Field { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Field {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Field {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn from_fn<F: FnMut(&[f64]) -> f64>(grid: Grid, mut f: F) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                let p = grid.point(i);
                f(&p[..grid.dim()])
            })
            .collect();
        Field { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Σ v h^d.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Value at the node nearest to `x`.
    pub fn at(&self, x: &[f64]) -> f64 {
        self.values[self.grid.nearest(x)]
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.grid.check_same(&other.grid)?;
        Ok(Field {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.grid.check_same(&other.grid)?;
        Ok(Field {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    /// Largest value on the outermost layer of nodes.
    pub fn boundary_max_abs(&self) -> f64 {
        let n = self.grid.n;
        let mut m: f64 = 0.0;
        if self.grid.dim == 1 {
            m = m.max(self.values[0].abs()).max(self.values[n - 1].abs());
        } else {
            for i in 0..n {
                for j in [0, n - 1] {
                    m = m.max(self.values[i * n + j].abs()).max(self.values[j * n + i].abs());
                }
            }
        }
        m
    }

    /// CSV with columns x[,y],value.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        if self.grid.dim == 1 {
            writeln!(w, "x,value")?;
        } else {
            writeln!(w, "x,y,value")?;
        }
        for (i, v) in self.values.iter().enumerate() {
            let p = self.grid.point(i);
            if self.grid.dim == 1 {
                writeln!(w, "{},{}", p[0], v)?;
            } else {
                writeln!(w, "{},{},{}", p[0], p[1], v)?;
            }
        }
        Ok(())
    }
}

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn plans(n: usize) -> PlanPair {
    static CACHE: OnceLock<RwLock<HashMap<usize, PlanPair>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(p) = cache.read().expect("fft plan cache poisoned").get(&n) {
        return p.clone();
    }
    let mut w = cache.write().expect("fft plan cache poisoned");
    w.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

/// Unnormalised in-place d-dimensional transform.
fn fft_nd(data: &mut [Complex64], n: usize, dim: usize, inverse: bool) {
    let (fwd, inv) = plans(n);
    let plan = if inverse { inv } else { fwd };
    let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
    plan.process_with_scratch(data, &mut scratch);
    if dim == 2 {
        transpose(data, n);
        plan.process_with_scratch(data, &mut scratch);
        transpose(data, n);
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Forward transform of a field (unnormalised).
pub fn forward(f: &Field) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = f.values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    fft_nd(&mut buf, f.grid.n, f.grid.dim, false);
    buf
}

/// Inverse transform with 1/n^d normalisation; the imaginary part is
/// checked against the real part and discarded.
pub fn inverse_real(grid: Grid, mut spec: Vec<Complex64>) -> Result<Field> {
    fft_nd(&mut spec, grid.n, grid.dim, true);
    let scale = 1.0 / grid.len() as f64;
    let mut max_re: f64 = 0.0;
    let mut max_im: f64 = 0.0;
    let values: Vec<f64> = spec
        .iter()
        .map(|c| {
            max_re = max_re.max(c.re.abs());
            max_im = max_im.max(c.im.abs());
            c.re * scale
        })
        .collect();
    if max_im > 1e-8 * max_re && max_im * scale > 1e-300 {
        return Err(Error::Consistency(format!(
            "inverse transform left an imaginary residue of {:.3e} relative to the field",
            max_im / max_re
        )));
    }
    Ok(Field { grid, values })
}

/// Multiplies the spectrum of `f` by `m(ξ)`.
pub fn apply_multiplier<F: FnMut(&[f64]) -> f64>(f: &Field, m: F) -> Result<Field> {
    let table = f.grid.tabulate(m);
    apply_multiplier_table(f, &table)
}

/// Multiplies the spectrum of `f` by a tabulated multiplier in FFT order.
pub fn apply_multiplier_table(f: &Field, m: &[f64]) -> Result<Field> {
    if m.len() != f.grid.len() {
        return Err(Error::domain("multiplier table does not match the grid"));
    }
    let mut spec = forward(f);
    for (c, v) in spec.iter_mut().zip(m) {
        *c *= *v;
    }
    inverse_real(f.grid, spec)
}

/// The periodic kernel whose Fourier coefficients are `m`, sampled at the
/// nodes: K(x) = (2L)^{-d} Σ_ξ m(ξ) e^{iξ·x}. Its grid integral is m(0).
pub fn kernel_from_multiplier(grid: Grid, m: &[f64]) -> Result<Field> {
    if m.len() != grid.len() {
        return Err(Error::domain("multiplier table does not match the grid"));
    }
    let n = grid.n;
    // x = (i - n/2) h shifts the phase by (-1)^{j}
    let sign = |j: usize| if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    let spec: Vec<Complex64> = m
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let s = if grid.dim == 1 {
                sign(idx)
            } else {
                sign(idx / n) * sign(idx % n)
            };
            Complex64::new(v * s, 0.0)
        })
        .collect();
    let mut k = inverse_real(grid, spec)?;
    let scale = grid.len() as f64 / (2.0 * grid.half_width).powi(grid.dim as i32);
    for v in &mut k.values {
        *v *= scale;
    }
    Ok(k)
}

/// Discrete L_p norm (Σ|v|^p h^d)^{1/p}; `p = ∞` gives the max norm.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::domain(format!("L_p norm needs p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let cell = f.grid.cell();
    if p == 1.0 {
        return Ok(f.values.iter().map(|v| v.abs()).sum::<f64>() * cell);
    }
    if p == 2.0 {
        return Ok((f.values.iter().map(|v| v * v).sum::<f64>() * cell).sqrt());
    }
    // scale by the max to keep |v|^p representable
    let m = f.max_abs();
    if m == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = f.values.iter().map(|v| (v.abs() / m).powf(p)).sum();
    Ok(m * (s * cell).powf(1.0 / p))
}

/// Σ over nodes with |x| ≤ ε of v h^d.
pub fn local_mass(f: &Field, eps: f64) -> Result<f64> {
    if !(eps > 1.0) {
        return Err(Error::domain(format!("local mass radius must exceed 1, got {eps}")));
    }
    if eps >= f.grid.half_width {
        return Err(Error::domain(format!(
            "ball of radius {eps} does not fit in the domain of half width {}",
            f.grid.half_width
        )));
    }
    let mut s = 0.0;
    for (i, v) in f.values.iter().enumerate() {
        if f.grid.radius(i) <= eps {
            s += v;
        }
    }
    Ok(s * f.grid.cell())
}

/// Initial data families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    /// |x|^{-τ} on the closed ball of radius R.
    Singular { tau: f64, radius: f64 },
    Constant(f64),
    /// amplitude · exp(-|x|² / (2σ²)).
    Gaussian { amplitude: f64, sigma: f64 },
    /// amplitude · (1 + |x|²)^{-decay/2} on |x| < cutoff.
    PowerTail { amplitude: f64, decay: f64, cutoff: f64 },
}

impl InitialData {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match *self {
            InitialData::Singular { tau, radius } => {
                if !(tau > 0.0) || tau >= dim as f64 {
                    return Err(Error::domain(format!(
                        "singular datum needs 0 < tau < d = {dim}, got tau = {tau}"
                    )));
                }
                if !(radius > 1.0) || !radius.is_finite() {
                    return Err(Error::domain(format!("singular datum needs R > 1, got {radius}")));
                }
            }
            InitialData::Constant(c) => {
                if !c.is_finite() {
                    return Err(Error::domain("constant datum must be finite"));
                }
            }
            InitialData::Gaussian { amplitude, sigma } => {
                if !amplitude.is_finite() || !(sigma > 0.0) || !sigma.is_finite() {
                    return Err(Error::domain("gaussian datum needs finite amplitude and sigma > 0"));
                }
            }
            InitialData::PowerTail { amplitude, decay, cutoff } => {
                if !amplitude.is_finite() || !(decay >= 0.0) || !decay.is_finite() || !(cutoff > 0.0) {
                    return Err(Error::domain("power-tail datum needs finite amplitude, decay >= 0 and cutoff > 0"));
                }
            }
        }
        Ok(())
    }
}

/// Samples the initial datum. The cell holding the origin receives the cell
/// average of |x|^{-τ}; all other nodes the point value.
pub fn sample_u0(g: &Grid, data: &InitialData) -> Result<Field> {
    data.validate(g.dim())?;
    match *data {
        InitialData::Constant(c) => Ok(Field::constant(*g, c)),
        InitialData::Gaussian { amplitude, sigma } => Ok(Field::from_fn(*g, |x| {
            let r2: f64 = x.iter().map(|c| c * c).sum();
            amplitude * (-r2 / (2.0 * sigma * sigma)).exp()
        })),
        InitialData::PowerTail { amplitude, decay, cutoff } => Ok(Field::from_fn(*g, |x| {
            let r2: f64 = x.iter().map(|c| c * c).sum();
            if r2 < cutoff * cutoff {
                amplitude * (1.0 + r2).powf(-0.5 * decay)
            } else {
                0.0
            }
        })),
        InitialData::Singular { tau, radius } => {
            let h = g.h();
            if h >= radius / 8.0 {
                return Err(Error::Resolution(format!(
                    "spacing {h} does not resolve the support radius {radius} (need h < R/8)"
                )));
            }
            let mut f = Field::from_fn(*g, |x| {
                let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
                if r > 0.0 && r <= radius {
                    r.powf(-tau)
                } else {
                    0.0
                }
            });
            let o = g.origin();
            let idx = if g.dim() == 1 { o } else { o * g.n() + o };
            f.values[idx] = origin_cell_average(g.dim(), h, tau);
            Ok(f)
        }
    }
}

/// Average of |x|^{-τ} over the cell [-h/2, h/2]^d.
fn origin_cell_average(dim: usize, h: f64, tau: f64) -> f64 {
    let a = 0.5 * h;
    if dim == 1 {
        return a.powf(-tau) / (1.0 - tau);
    }
    // 8 ∫_0^{π/4} ∫_0^{a/cos θ} r^{1-τ} dr dθ / h²
    let (x, w) = crate::quad::gauss_legendre(40);
    let mut s = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let th = PI / 8.0 * (xi + 1.0);
        s += wi * PI / 8.0 * (a / th.cos()).powf(2.0 - tau) / (2.0 - tau);
    }
    8.0 * s / (h * h)
}
