//! The Green function G, the fundamental solution Z and the resolvent kernel
//! Y on a periodic grid.
//!
//! In frequency the three kernels are
//!
//! ```text
//! Ĝ(t) = exp(-t ψ)
//! Ẑ(t) = E_{α,1}(-t^α ψ)          = ∫ M_α(s) exp(-t^α s ψ) ds
//! Ŷ(t) = t^{α-1} E_{α,α}(-t^α ψ)  = α t^{α-1} ∫ s M_α(s) exp(-t^α s ψ) ds
//! ```
//!
//! The spectral route evaluates the Mittag-Leffler forms, the subordination
//! route the M-Wright integrals with a fixed Gauss rule in log s.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{apply_multiplier_table, kernel_from_multiplier, lp_norm, Field, Grid};
use crate::quad::{composite_gauss, gauss_legendre};
use crate::specfun::{gamma_kernel, m_wright, m_wright_support, rgamma, MlTable};
use crate::symbol::Symbol;

/// Largest boundary-to-peak ratio a kernel field may show.
pub const ALIAS_TOL: f64 = 1e-6;

const SUB_PANELS: usize = 20;
const SUB_ORDER: usize = 10;
const SUB_S_MIN: f64 = 1e-10;
const SUB_TAIL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Spectral,
    Subordination,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KernelKind {
    G,
    Z,
    Y,
}

/// Gauss rule on (0, ∞) against the M-Wright density.
#[derive(Debug, Clone)]
pub struct Subordinator {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// M_α at the nodes.
    pub density: Vec<f64>,
}

impl Subordinator {
    pub fn new(alpha: f64) -> Result<Self> {
        let s_max = m_wright_support(alpha, SUB_TAIL);
        // half the panels below s = 1, half across the steep decay above it
        let (mut u, mut w) = composite_gauss(SUB_S_MIN.ln(), 0.0, SUB_PANELS / 2, SUB_ORDER);
        let (u2, w2) = composite_gauss(0.0, s_max.ln(), SUB_PANELS / 2, SUB_ORDER);
        u.extend(u2);
        w.extend(w2);
        let nodes: Vec<f64> = u.iter().map(|v| v.exp()).collect();
        let weights: Vec<f64> = w.iter().zip(&nodes).map(|(w, s)| w * s).collect();
        let density = nodes
            .iter()
            .map(|s| m_wright(alpha, *s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Subordinator {
            nodes,
            weights,
            density,
        })
    }

    /// Σ w_j M(s_j), which should be 1.
    pub fn mass(&self) -> f64 {
        self.weights.iter().zip(&self.density).map(|(w, m)| w * m).sum()
    }

    /// Σ w_j s_j M(s_j), which should be 1/Γ(1+α).
    pub fn first_moment(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.density)
            .zip(&self.nodes)
            .map(|((w, m), s)| w * m * s)
            .sum()
    }
}

/// Evaluators of G, Z and Y on a fixed grid.
#[derive(Debug, Clone)]
pub struct KernelSet {
    alpha: f64,
    symbol: Symbol,
    grid: Grid,
    route: Route,
    psi: Arc<Vec<f64>>,
    ml_z: Arc<MlTable>,
    ml_y: Arc<MlTable>,
    sub: Option<Arc<Subordinator>>,
}

impl KernelSet {
    pub fn new(alpha: f64, symbol: Symbol, grid: Grid, route: Route) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0,1), got {alpha}")));
        }
        if symbol.dim() != grid.dim() {
            return Err(Error::domain(format!(
                "symbol lives in d={} but the grid in d={}",
                symbol.dim(),
                grid.dim()
            )));
        }
        let psi = Arc::new(grid.tabulate(|xi| symbol.psi(xi)));
        let sub = match route {
            Route::Subordination => {
                let s = Subordinator::new(alpha)?;
                if (s.mass() - 1.0).abs() > 1e-6 {
                    return Err(Error::Consistency(format!(
                        "subordination weights integrate M to {}",
                        s.mass()
                    )));
                }
                Some(Arc::new(s))
            }
            Route::Spectral => None,
        };
        Ok(KernelSet {
            alpha,
            symbol,
            grid,
            route,
            psi,
            ml_z: MlTable::shared(alpha, 1.0)?,
            ml_y: MlTable::shared(alpha, alpha)?,
            sub,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.symbol.beta()
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn route(&self) -> Route {
        self.route
    }

    /// ψ over the frequency lattice in FFT order.
    pub fn psi_table(&self) -> &[f64] {
        &self.psi
    }

    /// The same operator on another grid.
    pub fn with_grid(&self, grid: Grid) -> Result<Self> {
        let mut out = self.clone();
        if grid.dim() != self.grid.dim() {
            return Err(Error::domain("grid dimension differs from the symbol's"));
        }
        out.psi = Arc::new(grid.tabulate(|xi| self.symbol.psi(xi)));
        out.grid = grid;
        Ok(out)
    }

    pub fn with_route(&self, route: Route) -> Result<Self> {
        KernelSet::new(self.alpha, self.symbol.clone(), self.grid, route)
    }

    /// E_{α,1}(-y), y ≥ 0.
    #[inline]
    pub fn ml_z(&self, y: f64) -> f64 {
        self.ml_z.eval(y)
    }

    /// E_{α,α}(-y), y ≥ 0.
    #[inline]
    pub fn ml_y(&self, y: f64) -> f64 {
        self.ml_y.eval(y)
    }

    fn check_t(t: f64) -> Result<()> {
        if t > 0.0 && t.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(format!("time must be positive and finite, got {t}")))
        }
    }

    /// Fourier multiplier of the requested kernel at time t.
    pub fn multiplier(&self, kind: KernelKind, t: f64) -> Result<Vec<f64>> {
        Self::check_t(t)?;
        let a = self.alpha;
        let ta = t.powf(a);
        let out = match (kind, &self.sub) {
            (KernelKind::G, _) => self.psi.iter().map(|p| (-t * p).exp()).collect(),
            (KernelKind::Z, None) => self.psi.iter().map(|p| self.ml_z.eval(ta * p)).collect(),
            (KernelKind::Y, None) => {
                let pre = t.powf(a - 1.0);
                self.psi.iter().map(|p| pre * self.ml_y.eval(ta * p)).collect()
            }
            (KernelKind::Z, Some(sub)) => self
                .psi
                .iter()
                .map(|p| subordinate(sub, ta * p, false))
                .collect(),
            (KernelKind::Y, Some(sub)) => {
                let pre = a * t.powf(a - 1.0);
                self.psi
                    .iter()
                    .map(|p| pre * subordinate(sub, ta * p, true))
                    .collect()
            }
        };
        Ok(out)
    }

    fn kernel(&self, kind: KernelKind, t: f64) -> Result<Field> {
        let m = self.multiplier(kind, t)?;
        let k = kernel_from_multiplier(self.grid, &m)?;
        let peak = k.max_abs();
        let edge = k.boundary_max_abs();
        if edge > ALIAS_TOL * peak {
            return Err(Error::Resolution(format!(
                "{kind:?}(t={t}) reaches {:.3e} of its peak on the boundary; enlarge the domain",
                edge / peak
            )));
        }
        Ok(k)
    }

    pub fn green_g(&self, t: f64) -> Result<Field> {
        self.kernel(KernelKind::G, t)
    }

    pub fn kernel_z(&self, t: f64) -> Result<Field> {
        self.kernel(KernelKind::Z, t)
    }

    pub fn kernel_y(&self, t: f64) -> Result<Field> {
        self.kernel(KernelKind::Y, t)
    }

    /// Kernel field without the aliasing check.
    pub fn kernel_unchecked(&self, kind: KernelKind, t: f64) -> Result<Field> {
        kernel_from_multiplier(self.grid, &self.multiplier(kind, t)?)
    }

    fn apply(&self, kind: KernelKind, t: f64, v: &Field) -> Result<Field> {
        if v.grid() != &self.grid {
            return Err(Error::domain("field and kernel set live on different grids"));
        }
        let m = self.multiplier(kind, t)?;
        apply_multiplier_table(v, &m)
    }

    /// S(t)v = Z(t) ⋆ v.
    pub fn s_apply(&self, t: f64, v: &Field) -> Result<Field> {
        self.apply(KernelKind::Z, t, v)
    }

    /// R(t)v = Y(t) ⋆ v.
    pub fn r_apply(&self, t: f64, v: &Field) -> Result<Field> {
        self.apply(KernelKind::Y, t, v)
    }
}

/// Σ w_j M_j exp(-y s_j), optionally with an extra factor s_j.
fn subordinate(sub: &Subordinator, y: f64, first_moment: bool) -> f64 {
    let mut acc = 0.0;
    for ((s, w), m) in sub.nodes.iter().zip(&sub.weights).zip(&sub.density) {
        let e = (-y * s).exp();
        if e == 0.0 {
            break;
        }
        acc += w * m * e * if first_moment { *s } else { 1.0 };
    }
    acc
}

/// Convenience helper: half width and point count for kernels at times up
/// to `t_max`, so that tails sit well below the aliasing threshold and the
/// core at `t_min` is resolved by about `per_scale` nodes.
pub fn suggest_grid(
    alpha: f64,
    beta: f64,
    dim: usize,
    t_min: f64,
    t_max: f64,
    per_scale: f64,
    max_n: usize,
) -> Result<Grid> {
    let l_max = t_max.powf(alpha / beta);
    let l_min = t_min.powf(alpha / beta);
    let half = 2.0 * l_max * (1e7f64).powf(1.0 / (dim as f64 + beta));
    let h = l_min / per_scale;
    let n = ((2.0 * half / h).ceil() as usize).next_power_of_two().clamp(16, max_n);
    Grid::new(dim, n, half)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BandRegime {
    Inner,
    Outer,
}

/// The envelope the two-sided estimates predict at one sample.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateBand {
    pub x: Vec<f64>,
    pub omega: f64,
    pub regime: BandRegime,
    pub envelope: f64,
    pub value: f64,
    pub ratio: f64,
}

/// Envelope shape at (t, |x|) for Z or Y, with Ω = |x|^β t^{-α}.
pub fn envelope(kind: KernelKind, alpha: f64, beta: f64, dim: usize, t: f64, r: f64) -> (f64, BandRegime) {
    let d = dim as f64;
    let omega = r.powf(beta) * t.powf(-alpha);
    let base = match kind {
        KernelKind::Y => t.powf(-d * alpha / beta + alpha - 1.0),
        _ => t.powf(-d * alpha / beta),
    };
    if omega >= 1.0 {
        return (base * omega.powf(-1.0 - d / beta), BandRegime::Outer);
    }
    let crit = match kind {
        KernelKind::Y => 2.0 * beta,
        _ => beta,
    };
    let env = if (d - crit).abs() < 1e-12 {
        // d = β for Z gives t^{-α}; d = 2β for Y gives t^{-α-1}
        base * (omega.ln().abs() + 1.0)
    } else if d < crit {
        base
    } else {
        base * omega.powf(crit / beta - d / beta)
    };
    (env, BandRegime::Inner)
}

#[derive(Debug, Clone, Serialize)]
pub struct BandReport {
    pub kind: KernelKind,
    pub t: f64,
    pub samples: Vec<EstimateBand>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub inner_spread: f64,
    pub outer_spread: f64,
}

/// Kernel-to-envelope ratios at the given sample points (the origin is
/// skipped, Ω = 0 there).
pub fn validate_pointwise_bands(
    ks: &KernelSet,
    kind: KernelKind,
    t: f64,
    points: &[Vec<f64>],
) -> Result<BandReport> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::domain(format!("band validation needs t in (0, 1], got {t}")));
    }
    if kind == KernelKind::G {
        return Err(Error::domain("band validation covers Z and Y"));
    }
    let k = ks.kernel_unchecked(kind, t)?;
    let mut samples = Vec::new();
    let (mut inner, mut outer) = ((f64::INFINITY, 0.0f64), (f64::INFINITY, 0.0f64));
    for x in points {
        if x.len() != ks.dim() {
            return Err(Error::domain("sample point dimension mismatch"));
        }
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if r == 0.0 {
            continue;
        }
        let (env, regime) = envelope(kind, ks.alpha, ks.beta(), ks.dim(), t, r);
        let value = k.at(x);
        let ratio = value / env;
        let slot = if regime == BandRegime::Inner { &mut inner } else { &mut outer };
        slot.0 = slot.0.min(ratio);
        slot.1 = slot.1.max(ratio);
        samples.push(EstimateBand {
            x: x.clone(),
            omega: r.powf(ks.beta()) * t.powf(-ks.alpha),
            regime,
            envelope: env,
            value,
            ratio,
        });
    }
    let min_ratio = inner.0.min(outer.0);
    let max_ratio = inner.1.max(outer.1);
    let spread = |p: (f64, f64)| if p.0.is_finite() { p.1 / p.0 } else { f64::NAN };
    Ok(BandReport {
        kind,
        t,
        samples,
        min_ratio,
        max_ratio,
        inner_spread: spread(inner),
        outer_spread: spread(outer),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeReport {
    pub kind: KernelKind,
    pub p: f64,
    pub threshold: f64,
    pub member: bool,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub slope: f64,
    pub predicted: f64,
    pub deviation: f64,
    /// Range of ‖·‖_p / t^{predicted}: the fitted two-sided constants.
    pub c_lower: f64,
    pub c_upper: f64,
    /// Norm growth at t = 1 under grid refinement (only when not a member).
    pub refinement_growth: Vec<f64>,
}

/// κ₁ = d/(d-β) for Z, κ₂ = d/(d-2β) for Y; ∞ when the denominator is ≤ 0.
pub fn lp_threshold(kind: KernelKind, beta: f64, dim: usize) -> f64 {
    let d = dim as f64;
    let c = if kind == KernelKind::Y { 2.0 * beta } else { beta };
    if d > c {
        d / (d - c)
    } else {
        f64::INFINITY
    }
}

/// Predicted exponent of ‖Z(t)‖_p or ‖Y(t)‖_p in t.
pub fn lp_exponent(kind: KernelKind, alpha: f64, beta: f64, dim: usize, p: f64) -> f64 {
    let base = -(alpha * dim as f64 / beta) * (1.0 - 1.0 / p);
    if kind == KernelKind::Y {
        base + alpha - 1.0
    } else {
        base
    }
}

/// Fits log‖K(t)‖_p against log t. The grid of `ks` is taken as the t = 1
/// grid and rescaled by t^{α/β} for every other time.
pub fn validate_lp_laws(ks: &KernelSet, kind: KernelKind, p: f64, times: &[f64]) -> Result<SlopeReport> {
    if times.len() < 2 {
        return Err(Error::domain("slope fit needs at least two times"));
    }
    let (a, b, d) = (ks.alpha, ks.beta(), ks.dim());
    let threshold = lp_threshold(kind, b, d);
    let predicted = lp_exponent(kind, a, b, d, p);
    let member = p < threshold;
    let g1 = *ks.grid();
    let mut norms = Vec::with_capacity(times.len());
    for &t in times {
        let g = Grid::new(d, g1.n(), g1.half_width() * t.powf(a / b))?;
        let kt = ks.with_grid(g)?;
        let field = match kind {
            KernelKind::Z => kt.kernel_z(t)?,
            KernelKind::Y => kt.kernel_y(t)?,
            KernelKind::G => kt.green_g(t)?,
        };
        norms.push(lp_norm(&field, p)?);
    }
    let xs: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    let ratios: Vec<f64> = times
        .iter()
        .zip(&norms)
        .map(|(t, v)| v / t.powf(predicted))
        .collect();
    let mut refinement_growth = Vec::new();
    if !member {
        let mut prev = None;
        for level in 0..3 {
            let g = Grid::new(d, g1.n() << level, g1.half_width())?;
            let f = ks.with_grid(g)?.kernel_unchecked(kind, 1.0)?;
            let v = lp_norm(&f, p)?;
            if let Some(pv) = prev {
                refinement_growth.push(v / pv);
            }
            prev = Some(v);
        }
    }
    Ok(SlopeReport {
        kind,
        p,
        threshold,
        member,
        times: times.to_vec(),
        norms,
        slope,
        predicted,
        deviation: (slope - predicted).abs(),
        c_lower: ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        c_upper: ratios.iter().cloned().fold(0.0, f64::max),
        refinement_growth,
    })
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Residual of Z(t) = ∫_0^t g_{1-α}(t-s) Y(s) ds per frequency.
///
/// With s = tσ and y = t^α ψ the identity reads
/// E_{α,1}(-y) = Γ(1-α)^{-1} ∫_0^1 (1-σ)^{-α} σ^{α-1} E_{α,α}(-y σ^α) dσ.
/// The integral is split at σ = 1/2; the left half uses v = (2σ)^α on
/// geometrically graded panels, the right half w = (2(1-σ))^{1-α}.
pub fn volterra_link_multiplier(ks: &KernelSet, t: f64) -> Result<Vec<f64>> {
    KernelSet::check_t(t)?;
    let a = ks.alpha;
    let ta = t.powf(a);
    let rule = VolterraRule::new(a);
    let mut cache: Vec<(f64, f64)> = Vec::new();
    let out = ks
        .psi
        .iter()
        .map(|p| {
            let y = ta * p;
            // many frequencies share ψ; reuse the last few results
            if let Some((_, r)) = cache.iter().find(|(yy, _)| *yy == y) {
                return *r;
            }
            let r = ks.ml_z(y) - rule.integral(ks, y);
            if cache.len() > 8 {
                cache.remove(0);
            }
            cache.push((y, r));
            r
        })
        .collect();
    Ok(out)
}

struct VolterraRule {
    alpha: f64,
    gx: Vec<f64>,
    gw: Vec<f64>,
}

impl VolterraRule {
    fn new(alpha: f64) -> Self {
        let (gx, gw) = gauss_legendre(12);
        VolterraRule { alpha, gx, gw }
    }

    fn integral(&self, ks: &KernelSet, y: f64) -> f64 {
        let a = self.alpha;
        let two_a = 2f64.powf(a);
        let mut left = 0.0;
        // v ∈ (0, 1], σ = v^{1/α} / 2, σ^{α-1} dσ = dv / (α 2^α)
        let mut hi: f64 = 1.0;
        for _ in 0..60 {
            let lo = hi * 0.5;
            left += self.panel(lo, hi, |v| {
                let sigma = v.powf(1.0 / a) * 0.5;
                (1.0 - sigma).powf(-a) * ks.ml_y(y * v / two_a)
            });
            hi = lo;
            if y * hi / two_a < 1e-18 && hi < 1e-16 {
                break;
            }
        }
        left /= a * two_a;
        // w ∈ (0, 1], 1 - σ = w^{1/(1-α)} / 2, (1-σ)^{-α} dσ = dw / ((1-α) 2^{1-α})
        let right = self.panel(0.0, 1.0, |w| {
            let sigma = 1.0 - w.powf(1.0 / (1.0 - a)) * 0.5;
            sigma.powf(a - 1.0) * ks.ml_y(y * sigma.powf(a))
        }) / ((1.0 - a) * 2f64.powf(1.0 - a));
        (left + right) * rgamma(1.0 - a)
    }

    fn panel<F: Fn(f64) -> f64>(&self, lo: f64, hi: f64, f: F) -> f64 {
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        self.gx.iter().zip(&self.gw).map(|(x, w)| w * f(c + h * x)).sum::<f64>() * h
    }
}

/// max_x |Z(t,x) − (g_{1−α} ∗ Y(·,x))(t)| relative to max Z.
pub fn volterra_link_residual(ks: &KernelSet, t: f64) -> Result<f64> {
    let res = kernel_from_multiplier(*ks.grid(), &volterra_link_multiplier(ks, t)?)?;
    let z = ks.kernel_unchecked(KernelKind::Z, t)?;
    Ok(res.max_abs() / z.max_abs())
}

/// ∫ Y(t, x) dx predicted by the theory.
pub fn y_mass(alpha: f64, t: f64) -> Result<f64> {
    gamma_kernel(alpha, t)
}

/// The periodised Cauchy kernel Σ_m t / (π(t² + (x + 2Lm)²)).
pub fn periodic_cauchy(t: f64, x: f64, half_width: f64) -> f64 {
    let a = PI * t / half_width;
    let b = PI * x / half_width;
    // sinh a / (cosh a - cos b) / (2L), written to avoid cancellation
    let num = a.sinh();
    let den = 2.0 * (0.5 * a).sinh().powi(2) + 2.0 * (0.5 * b).sin().powi(2);
    num / den / (2.0 * half_width)
}
