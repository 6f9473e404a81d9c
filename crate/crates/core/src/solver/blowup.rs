//! Divergence probe for the first Picard iterate
//!
//! ```text
//! J = ∫_{B(ε)} S(t)u₀ dx + ∫_{B(ε)} ∫₀^t R(t−s) f(S(s)u₀) ds dx
//! ```
//!
//! with u₀ = |x|^{−τ} 𝟙_{B(0,R)}. The homogeneity of |x|^{−τ} and the
//! scaling of Z give, for s ≤ 1,
//!
//! ```text
//! S(s)u₀(y) ≥ s^{−ατ/β} w(s^{−α/β} y),    w = S(1)u₀,
//! ```
//!
//! so one profile per grid bounds z at every scale. With δ = ε − 1 and
//! m = min over |y| ≤ δ, τ' ∈ [t/2, t] of ∫_{B(ε)} Y(τ', x − y) dx,
//!
//! ```text
//! J ≥ m ∫_0^{t/2} s^{αd/β} ∫_{|η|≤δ} f(s^{−ατ/β} w(η)) dη ds,
//! ```
//!
//! evaluated in log s and log f. Level ℓ of the ladder uses the truncation
//! f_ℓ (threshold index ℓ) and a grid with base_n·2^{ℓ−1} points, so the
//! time quadrature reaches further towards s = 0 as ℓ grows.

use std::f64::consts::PI;

use serde::Serialize;

use super::annulus::{sphere_minimum, sphere_times};
use crate::error::{Error, Result};
use crate::grid::{local_mass, sample_u0, Grid, InitialData};
use crate::kernels::{KernelKind, KernelSet};
use crate::osgood::{OsgoodFunction, TruncationIndex};
use crate::quad::gauss_legendre;
use crate::regimes::{blowup_condition, tau_rho_margin, RegimeParams};

#[derive(Debug, Clone, Serialize)]
pub struct ProbeSetup {
    pub q: f64,
    pub tau: f64,
    pub rho: f64,
    pub eps: f64,
    /// Observation time in (0, 1].
    pub t: f64,
    /// Support radius R of the datum.
    pub radius: f64,
    pub levels: usize,
    pub base_n: usize,
    pub half_width: f64,
    /// Width of the Gauss panels in log s.
    pub panel_width: f64,
}

impl Default for ProbeSetup {
    fn default() -> Self {
        ProbeSetup {
            q: 1.0,
            tau: 0.9,
            rho: 0.7,
            eps: 1.5,
            t: 1.0,
            radius: 2.0,
            levels: 5,
            base_n: 4096,
            half_width: 16.0,
            panel_width: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LadderPolicy {
    /// Minimum growth factor between consecutive levels.
    pub factor: f64,
    pub min_levels: usize,
    /// |log ratio| below which the last step counts as converged.
    pub converge_tol: f64,
}

impl Default for LadderPolicy {
    fn default() -> Self {
        LadderPolicy { factor: 1.5, min_levels: 4, converge_tol: 1e-2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeVerdict {
    DivergenceEvidence,
    NoDivergence,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlowupLevel {
    pub level: usize,
    pub n: usize,
    pub log_phi: f64,
    pub local_mass: f64,
    pub log_functional: f64,
    /// log10 of J_ℓ / J_{ℓ−1}; absent on the first level.
    pub log10_ratio: Option<f64>,
    pub time_nodes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlowupReport {
    pub verdict: ProbeVerdict,
    pub control: bool,
    pub levels: Vec<BlowupLevel>,
    pub policy: LadderPolicy,
    pub window_mass: f64,
    pub sphere_min: f64,
    /// k − (dρ+1)/(τρ).
    pub analytic_exponent: f64,
    /// Slope of the log-domain annulus lower bound against log φ_i.
    pub analytic_fit_exponent: f64,
    /// Slope of log J_ℓ against log φ_ℓ.
    pub observed_exponent: f64,
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn log_sum(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    crate::kernels::least_squares_slope(xs, ys)
}

/// Surface measure of the unit sphere divided by d: the volume of B(0,1).
fn unit_ball(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        _ => PI,
    }
}

/// min over |y| = δ and τ' in [t/2, t] of ∫_{B(ε)} Y(τ', x − y) dx.
fn window_mass(ks: &KernelSet, t: f64, eps: f64, delta: f64) -> Result<f64> {
    let g = *ks.grid();
    if eps + delta >= g.half_width() {
        return Err(Error::Resolution("window B(eps) shifted by delta leaves the domain".into()));
    }
    let shifts: Vec<[f64; 2]> = if g.dim() == 1 {
        vec![[delta, 0.0], [-delta, 0.0]]
    } else {
        (0..16).map(|j| {
            let a = 2.0 * PI * j as f64 / 16.0;
            [delta * a.cos(), delta * a.sin()]
        }).collect()
    };
    let mut best = f64::INFINITY;
    for j in 0..8 {
        let tt = t * (0.5 + 0.5 * j as f64 / 7.0);
        let y = ks.kernel_unchecked(KernelKind::Y, tt)?;
        for s in &shifts {
            let mut acc = 0.0;
            for (i, v) in y.values().iter().enumerate() {
                let p = g.point(i);
                if (p[0] - s[0]).hypot(p[1] - s[1]) <= eps {
                    acc += v;
                }
            }
            best = best.min(acc * g.cell());
        }
    }
    Ok(best)
}

/// log of the annulus lower bound at threshold i:
/// m f̃(φ_i) |B_1| ∫_0^{t_i} (s^{dρ} − s^{dα/β}) ds with t_i = (φ_i/M)^{−1/(τρ)}.
pub fn analytic_lower_bound(
    of: &OsgoodFunction,
    alpha: f64,
    beta: f64,
    dim: usize,
    setup: &ProbeSetup,
    window_mass: f64,
    sphere_min: f64,
    i: usize,
) -> f64 {
    let d = dim as f64;
    let (tau, rho) = (setup.tau, setup.rho);
    let delta = setup.eps - 1.0;
    let log_ti = -(of.log_phi(i) - sphere_min.ln()) / (tau * rho);
    let log_ti = log_ti.min((0.5 * setup.t).ln()).min(delta.ln() / rho);
    let a1 = d * rho + 1.0;
    let a2 = d * alpha / beta + 1.0;
    // t^{a1}/a1 − t^{a2}/a2 with a2 > a1
    let vol = a1 * log_ti - a1.ln() + (-(((a2 - a1) * log_ti) + a1.ln() - a2.ln()).exp()).ln_1p();
    window_mass.ln() + of.log_step(i + 1) + unit_ball(dim).ln() + vol
}

pub fn blowup_probe(
    ks: &KernelSet,
    source: Option<&OsgoodFunction>,
    setup: &ProbeSetup,
    policy: &LadderPolicy,
    phi0_for_control: f64,
) -> Result<BlowupReport> {
    let (alpha, beta, dim) = (ks.alpha(), ks.beta(), ks.dim());
    let d = dim as f64;
    let (tau, rho) = (setup.tau, setup.rho);
    if !(setup.t > 0.0 && setup.t <= 1.0) {
        return Err(Error::domain(format!("observation time must lie in (0,1], got {}", setup.t)));
    }
    if !(setup.eps > 1.0) {
        return Err(Error::domain("eps must exceed 1"));
    }
    if setup.levels == 0 || !(setup.panel_width > 0.0) {
        return Err(Error::domain("need at least one level and a positive panel width"));
    }
    let control = source.is_none();
    let of = match source {
        Some(of) => of.clone(),
        None => OsgoodFunction::new(2.0, phi0_for_control)?,
    };
    if !control {
        let p = RegimeParams::new(alpha, beta, dim, of.k(), setup.q)?;
        if !blowup_condition(&p) {
            return Err(Error::Precondition(format!("blow-up condition fails for {p:?}")));
        }
        if !(tau > 0.0 && tau * setup.q < d) {
            return Err(Error::Precondition(format!("need 0 < tau q < d, got tau = {tau}")));
        }
        if !(rho > 0.0 && rho < alpha / beta) {
            return Err(Error::Precondition(format!("need 0 < rho < alpha/beta, got rho = {rho}")));
        }
        let margin = tau_rho_margin(of.k(), dim, tau, rho);
        if !(margin > 0.0) {
            return Err(Error::Precondition(format!("k - (d + 1/rho)/tau = {margin} is not positive")));
        }
    }
    let data = InitialData::Singular { tau, radius: setup.radius };
    let delta = setup.eps - 1.0;
    let m_win = window_mass(ks, setup.t, setup.eps, delta)?;
    if !(m_win > 0.0) {
        return Err(Error::Consistency(format!("window mass of Y is {m_win}")));
    }
    let (gl_x, gl_w) = gauss_legendre(8);
    let c = 1.0 + alpha * d / beta;
    let mut levels = Vec::with_capacity(setup.levels);
    let mut sphere_min = f64::NAN;
    for lvl in 1..=setup.levels {
        let n = setup.base_n << (lvl - 1);
        let grid = Grid::new(dim, n, setup.half_width)?;
        let ksl = ks.with_grid(grid)?;
        let u0 = sample_u0(&grid, &data)?;
        let z_t = ksl.s_apply(setup.t, &u0)?;
        let lm = local_mass(&z_t, setup.eps)?;
        if lvl == 1 {
            sphere_min = sphere_minimum(&ksl, &u0, &sphere_times())?.0;
        }
        let mut log_j = lm.max(0.0).ln();
        let mut nodes = 0;
        if !control {
            let w = ksl.s_apply(1.0, &u0)?;
            let lw: Vec<f64> = (0..grid.len())
                .filter(|i| grid.radius(*i) <= delta)
                .map(|i| w.values()[i])
                .filter(|v| *v > 0.0)
                .map(f64::ln)
                .collect();
            if lw.is_empty() {
                return Err(Error::Resolution("profile has no positive values inside B(delta)".into()));
            }
            let min_lw = lw.iter().cloned().fold(f64::INFINITY, f64::min);
            let trunc = TruncationIndex::new(lvl)?;
            let u_hi = (0.5 * setup.t).ln();
            let u_sat = -(beta / (alpha * tau)) * (of.log_phi(lvl) - min_lw);
            let u_lo = u_sat.min(u_hi) - 40.0 / c;
            let panels = ((u_hi - u_lo) / setup.panel_width).ceil() as usize;
            let hw = 0.5 * (u_hi - u_lo) / panels as f64;
            let log_cell = grid.cell().ln();
            let mut terms = Vec::with_capacity(panels * gl_x.len());
            let mut buf = vec![0.0; lw.len()];
            for p in 0..panels {
                let mid = u_lo + (2 * p + 1) as f64 * hw;
                for (x, wq) in gl_x.iter().zip(&gl_w) {
                    let u = mid + hw * x;
                    let sigma = -(alpha * tau / beta) * u;
                    for (b, l) in buf.iter_mut().zip(&lw) {
                        *b = of.log_f_n(trunc, sigma + l)?;
                    }
                    let log_phi_int = log_sum(&buf) + log_cell;
                    terms.push((wq * hw).ln() + c * u + log_phi_int);
                }
            }
            nodes = terms.len();
            let log_i = m_win.ln() + log_sum(&terms);
            log_j = log_add(log_j, log_i);
        }
        let log10_ratio = levels
            .last()
            .map(|prev: &BlowupLevel| (log_j - prev.log_functional) / std::f64::consts::LN_10);
        levels.push(BlowupLevel {
            level: lvl,
            n,
            log_phi: of.log_phi(lvl),
            local_mass: lm,
            log_functional: log_j,
            log10_ratio,
            time_nodes: nodes,
        });
    }

    let ratios: Vec<f64> = levels.iter().filter_map(|l| l.log10_ratio).collect();
    let lf = policy.factor.log10();
    let verdict = if levels.len() < policy.min_levels {
        ProbeVerdict::Inconclusive
    } else if !control && ratios.iter().all(|r| *r >= lf) {
        ProbeVerdict::DivergenceEvidence
    } else if ratios.last().is_some_and(|r| r.abs() * std::f64::consts::LN_10 <= policy.converge_tol)
        && ratios.iter().all(|r| *r < lf)
    {
        ProbeVerdict::NoDivergence
    } else {
        ProbeVerdict::Inconclusive
    };

    let analytic_exponent = of.k() - (d * rho + 1.0) / (tau * rho);
    let xs: Vec<f64> = levels.iter().map(|l| l.log_phi).collect();
    let bounds: Vec<f64> = (1..=setup.levels)
        .map(|i| analytic_lower_bound(&of, alpha, beta, dim, setup, m_win, sphere_min, i))
        .collect();
    let ys: Vec<f64> = levels.iter().map(|l| l.log_functional).collect();
    let (analytic_fit_exponent, observed_exponent) = if xs.len() >= 2 {
        (slope(&xs, &bounds), slope(&xs, &ys))
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(BlowupReport {
        verdict,
        control,
        levels,
        policy: policy.clone(),
        window_mass: m_win,
        sphere_min,
        analytic_exponent,
        analytic_fit_exponent,
        observed_exponent,
    })
}
