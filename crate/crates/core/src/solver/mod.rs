//! Mild solutions u = S(t)u₀ + ∫₀^t R(t−s) f(u(s)) ds on a time mesh.
//!
//! f(u(s)) is frozen at the left node of each interval and the time integral
//! of the R-multiplier over [t_j, t_{j+1}] is taken exactly:
//!
//! ```text
//! W_{n,j}(ψ) = [E_α(−(t_n−t_{j+1})^α ψ) − E_α(−(t_n−t_j)^α ψ)] / ψ
//! ```
//!
//! with the ψ → 0 limit ((t_n−t_j)^α − (t_n−t_{j+1})^α)/Γ(1+α).

mod annulus;
mod blowup;
mod global;

pub use annulus::{annulus_bound_check, sphere_minimum, sphere_times, AnnulusReport, ANNULUS_SLACK};
pub use blowup::{
    analytic_lower_bound, blowup_probe, BlowupLevel, BlowupReport, LadderPolicy, ProbeSetup, ProbeVerdict,
};
pub use global::{estimate_power_constant, global_study, GlobalReport, GlobalSetup};

use std::collections::HashMap;

use num::complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{forward, inverse_real, local_mass, lp_norm, Field};
use crate::kernels::KernelSet;
use crate::osgood::{OsgoodFunction, TruncationIndex};
use crate::specfun::{rgamma, MlTable};

/// Below this |ψ| the weights use the ψ → 0 limit.
pub const PSI_LIMIT: f64 = 1e-8;

/// Cached weights are kept when they fit in this many f64 values.
const WEIGHT_CACHE_BUDGET: usize = 1 << 25;

#[derive(Debug, Clone, PartialEq)]
pub enum Nonlinearity {
    Osgood(OsgoodFunction),
    /// λ|u|^{k−1}u.
    Power { lambda: f64, k: f64 },
    Truncated(OsgoodFunction, TruncationIndex),
}

impl Nonlinearity {
    pub fn zero() -> Self {
        Nonlinearity::Power { lambda: 0.0, k: 1.0 }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Nonlinearity::Power { lambda, .. } if *lambda == 0.0)
    }

    /// f(u). The Osgood family is defined on s ≥ 0; negative rounding noise
    /// is mapped to 0.
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Nonlinearity::Power { lambda, k } => {
                if *lambda == 0.0 {
                    0.0
                } else if *k == 1.0 {
                    lambda * u
                } else {
                    lambda * u.abs().powf(k - 1.0) * u
                }
            }
            Nonlinearity::Osgood(of) => {
                if u.is_nan() {
                    f64::NAN
                } else if u <= 0.0 {
                    0.0
                } else {
                    of.f(u).unwrap_or(f64::INFINITY)
                }
            }
            Nonlinearity::Truncated(of, n) => of.f_n(*n, u).unwrap_or(f64::NAN),
        }
    }
}

/// Strictly increasing nodes 0 = t₀ < … < t_N.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeMesh {
    nodes: Vec<f64>,
    grading: f64,
}

impl TimeMesh {
    /// t_n = T (n/N)^γ.
    pub fn graded(t_end: f64, steps: usize, grading: f64) -> Result<Self> {
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(Error::domain(format!("final time must be positive, got {t_end}")));
        }
        if steps == 0 {
            return Err(Error::domain("need at least one time step"));
        }
        if !(grading >= 1.0) {
            return Err(Error::domain(format!("grading exponent must be >= 1, got {grading}")));
        }
        let nodes = (0..=steps)
            .map(|n| t_end * (n as f64 / steps as f64).powf(grading))
            .collect();
        Ok(TimeMesh { nodes, grading })
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || nodes[0] != 0.0 {
            return Err(Error::domain("mesh must start at 0 and have at least two nodes"));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || !nodes.iter().all(|t| t.is_finite()) {
            return Err(Error::domain("mesh nodes must be finite and strictly increasing"));
        }
        Ok(TimeMesh { nodes, grading: 1.0 })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn t_end(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }
}

/// Arguments t^α ψ below this use the power series of the difference.
const SERIES_ARG: f64 = 0.5;

/// [E_α(−a^α ψ) − E_α(−b^α ψ)]/ψ for 0 ≤ a < b, summed termwise:
/// Σ_{m≥1} (−ψ)^{m−1} (b^{αm} − a^{αm}) / Γ(1+αm).
fn series_difference(alpha: f64, a: f64, b: f64, psi: f64) -> f64 {
    let lr = if a > 0.0 { (a / b).ln() } else { f64::NEG_INFINITY };
    let yb = b.powf(alpha);
    let mut sum = 0.0;
    let mut pw = yb; // ψ^{m−1} b^{αm}
    for m in 1..200 {
        let mf = m as f64;
        let gap = if lr.is_finite() { -(alpha * mf * lr).exp_m1() } else { 1.0 };
        let term = pw * gap * rgamma(1.0 + alpha * mf);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        pw *= -psi * yb;
    }
    sum
}

/// W_{n,j}(ψ) for j < n on a single frequency.
pub fn time_weights(ml: &MlTable, alpha: f64, nodes: &[f64], n: usize, psi: f64) -> Vec<f64> {
    let tn = nodes[n];
    if psi.abs() < PSI_LIMIT {
        let g = rgamma(1.0 + alpha);
        return (0..n)
            .map(|j| ((tn - nodes[j]).powf(alpha) - (tn - nodes[j + 1]).powf(alpha)) * g)
            .collect();
    }
    let e: Vec<f64> = (0..=n).map(|j| ml.eval((tn - nodes[j]).powf(alpha) * psi)).collect();
    (0..n)
        .map(|j| {
            let b = tn - nodes[j];
            if b.powf(alpha) * psi <= SERIES_ARG {
                series_difference(alpha, tn - nodes[j + 1], b, psi)
            } else {
                (e[j + 1] - e[j]) / psi
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub kernels: KernelSet,
    pub nonlinearity: Nonlinearity,
    pub mesh: TimeMesh,
    pub u0: Field,
    pub tolerance: f64,
    pub max_iter: usize,
    /// Exponent of the norm used for residuals and the trace.
    pub q: f64,
    /// Exponent of the data space; enables the weighted norm column.
    pub q_prime: Option<f64>,
    /// Radius of the local-mass functional.
    pub eps: Option<f64>,
}

impl SolverConfig {
    pub fn new(kernels: KernelSet, nonlinearity: Nonlinearity, mesh: TimeMesh, u0: Field) -> Result<Self> {
        let cfg = SolverConfig {
            kernels,
            nonlinearity,
            mesh,
            u0,
            tolerance: 1e-10,
            max_iter: 200,
            q: 2.0,
            q_prime: None,
            eps: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.u0.grid() != self.kernels.grid() {
            return Err(Error::domain("initial datum and kernels live on different grids"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::domain("tolerance must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::domain("max_iter must be at least 1"));
        }
        if !(self.q >= 1.0) {
            return Err(Error::domain(format!("norm exponent must be >= 1, got {}", self.q)));
        }
        if let Some(qp) = self.q_prime {
            if !(qp >= 1.0) {
                return Err(Error::domain(format!("q' must be >= 1, got {qp}")));
            }
        }
        if !self.u0.is_finite() {
            return Err(Error::domain("initial datum has non-finite values"));
        }
        Ok(())
    }

    /// Exponent of the weight t^{(αd/β)(1/q′ − 1/q)} in the E-norm.
    pub fn weight_exponent(&self) -> Option<f64> {
        let ks = &self.kernels;
        self.q_prime
            .map(|qp| ks.alpha() * ks.dim() as f64 / ks.beta() * (1.0 / qp - 1.0 / self.q))
    }
}

/// Values of u at every mesh node.
pub type History = Vec<Field>;

/// Frequency data shared by all applications of 𝓕 for one configuration.
pub struct Propagator {
    alpha: f64,
    nodes: Vec<f64>,
    /// Distinct ψ values and, per frequency, the index into them.
    psi: Vec<f64>,
    slot: Vec<u32>,
    ml: std::sync::Arc<MlTable>,
    u0_hat: Vec<Complex64>,
    /// Per node: E_α(−t_n^α ψ) on the distinct values.
    s_mult: Vec<Vec<f64>>,
    /// weights[n][j] on the distinct values, when they fit in memory.
    weights: Option<Vec<Vec<Vec<f64>>>>,
}

impl Propagator {
    pub fn new(cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let alpha = cfg.kernels.alpha();
        let mut index: HashMap<u64, u32> = HashMap::new();
        let mut psi = Vec::new();
        let slot: Vec<u32> = cfg
            .kernels
            .psi_table()
            .iter()
            .map(|p| {
                *index.entry(p.to_bits()).or_insert_with(|| {
                    psi.push(*p);
                    (psi.len() - 1) as u32
                })
            })
            .collect();
        let ml = MlTable::shared(alpha, 1.0)?;
        let nodes = cfg.mesh.nodes().to_vec();
        let s_mult = nodes
            .iter()
            .map(|t| {
                let ta = t.powf(alpha);
                psi.iter().map(|p| ml.eval(ta * p)).collect()
            })
            .collect();
        let n = nodes.len() - 1;
        let mut prop = Propagator {
            alpha,
            nodes,
            psi,
            slot,
            ml,
            u0_hat: forward(&cfg.u0),
            s_mult,
            weights: None,
        };
        if n * (n + 1) / 2 * prop.psi.len() <= WEIGHT_CACHE_BUDGET {
            let w = (0..=n).map(|m| prop.weights_for(m)).collect();
            prop.weights = Some(w);
        }
        Ok(prop)
    }

    /// weights_for(n)[j][u] = W_{n,j}(ψ_u).
    fn weights_for(&self, n: usize) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.psi.len()]; n];
        for (u, p) in self.psi.iter().enumerate() {
            let w = time_weights(&self.ml, self.alpha, &self.nodes, n, *p);
            for (j, v) in w.into_iter().enumerate() {
                out[j][u] = v;
            }
        }
        out
    }

    pub fn distinct_frequencies(&self) -> usize {
        self.psi.len()
    }

    /// S(t_n)u₀ at every node (u₀ itself at t₀ = 0).
    pub fn linear_part(&self, cfg: &SolverConfig) -> Result<History> {
        let grid = *cfg.u0.grid();
        let mut out = Vec::with_capacity(self.nodes.len());
        out.push(cfg.u0.clone());
        for n in 1..self.nodes.len() {
            let spec = self.u0_hat.iter().zip(&self.slot).map(|(c, s)| c * self.s_mult[n][*s as usize]).collect();
            out.push(inverse_real(grid, spec)?);
        }
        Ok(out)
    }

    /// 𝓕u at every node. A history with non-finite values is passed through
    /// unchanged; callers check `is_finite` on the result.
    pub fn apply(&self, cfg: &SolverConfig, u: &History) -> Result<History> {
        if u.len() != self.nodes.len() {
            return Err(Error::domain("history length does not match the mesh"));
        }
        let grid = *cfg.u0.grid();
        let zero_f = cfg.nonlinearity.is_zero();
        let f_hat: Vec<Vec<Complex64>> = if zero_f {
            Vec::new()
        } else {
            u[..u.len() - 1].iter().map(|v| forward(&v.map(|x| cfg.nonlinearity.eval(x)))).collect()
        };
        let mut out = Vec::with_capacity(self.nodes.len());
        out.push(cfg.u0.clone());
        for n in 1..self.nodes.len() {
            let mut acc: Vec<Complex64> =
                self.u0_hat.iter().zip(&self.slot).map(|(c, s)| c * self.s_mult[n][*s as usize]).collect();
            if !zero_f {
                let owned;
                let w = match &self.weights {
                    Some(w) => &w[n],
                    None => {
                        owned = self.weights_for(n);
                        &owned
                    }
                };
                for (j, wj) in w.iter().enumerate() {
                    for ((a, f), s) in acc.iter_mut().zip(&f_hat[j]).zip(&self.slot) {
                        *a += f * wj[*s as usize];
                    }
                }
            }
            let field = if acc.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
                inverse_real(grid, acc)?
            } else {
                Field::constant(grid, f64::NAN)
            };
            out.push(field);
        }
        Ok(out)
    }
}

/// Largest per-node norm of the difference of two histories, skipping t₀.
pub fn history_distance(a: &History, b: &History, q: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (x, y) in a.iter().zip(b).skip(1) {
        worst = worst.max(lp_norm(&x.sub(y)?, q)?);
    }
    Ok(worst)
}

/// sup over mesh times t > 0 of t^w ‖v(t)‖_q.
pub fn e_norm(v: &History, nodes: &[f64], q: f64, w: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (t, f) in nodes.iter().zip(v).skip(1) {
        worst = worst.max(t.powf(w) * lp_norm(f, q)?);
    }
    Ok(worst)
}

/// Increment between Picard iterates: the E-norm when q′ is configured,
/// otherwise the plain max over nodes.
fn increment(cfg: &SolverConfig, next: &History, prev: &History) -> Result<f64> {
    match cfg.weight_exponent() {
        Some(w) => {
            let diff: History = next.iter().zip(prev).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?;
            e_norm(&diff, cfg.mesh.nodes(), cfg.q, w)
        }
        None => history_distance(next, prev, cfg.q),
    }
}

fn history_finite(u: &History) -> bool {
    u.iter().all(|f| f.is_finite())
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceRecord {
    pub t: f64,
    pub lq_norm: f64,
    pub weighted_norm: f64,
    pub local_mass: f64,
    pub residual: f64,
    pub iters: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlowUpFlag {
    pub iteration: usize,
    pub step: usize,
    pub functional: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverTrace {
    pub records: Vec<TraceRecord>,
    pub converged: bool,
    pub iterations: usize,
    /// Distance between successive iterates (E-norm when q′ is set).
    pub increments: Vec<f64>,
    pub blow_up: Option<BlowUpFlag>,
}

impl SolverTrace {
    /// Ratios of successive increments, the empirical contraction factors.
    pub fn contraction_factors(&self) -> Vec<f64> {
        self.increments.windows(2).filter(|w| w[0] > 0.0).map(|w| w[1] / w[0]).collect()
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        write_trace_csv(&self.records, w)
    }
}

pub const TRACE_CSV_HEADER: &str = "t,lq_norm,weighted_norm,local_mass,residual,iters";

pub fn write_trace_csv<W: std::io::Write>(records: &[TraceRecord], mut w: W) -> Result<()> {
    writeln!(w, "{TRACE_CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{:e},{:e},{:e},{:e},{:e},{}",
            r.t, r.lq_norm, r.weighted_norm, r.local_mass, r.residual, r.iters
        )?;
    }
    Ok(())
}

fn first_non_finite(u: &History) -> Option<usize> {
    u.iter().position(|f| !f.is_finite())
}

fn build_trace(
    cfg: &SolverConfig,
    u: &History,
    fu: Option<&History>,
    iterations: usize,
) -> Result<Vec<TraceRecord>> {
    let wexp = cfg.weight_exponent();
    let mut out = Vec::with_capacity(u.len());
    for (n, (t, v)) in cfg.mesh.nodes().iter().zip(u).enumerate() {
        let lq = lp_norm(v, cfg.q)?;
        let weighted = match wexp {
            Some(e) if *t > 0.0 => t.powf(e) * lq,
            _ => f64::NAN,
        };
        let lm = match cfg.eps {
            Some(eps) => local_mass(v, eps)?,
            None => f64::NAN,
        };
        let residual = match fu {
            Some(fu) => lp_norm(&v.sub(&fu[n])?, cfg.q)?,
            None => f64::NAN,
        };
        out.push(TraceRecord { t: *t, lq_norm: lq, weighted_norm: weighted, local_mass: lm, residual, iters: iterations });
    }
    Ok(out)
}

/// 𝓕 applied once to a history.
pub fn apply_f(cfg: &SolverConfig, u: &History) -> Result<History> {
    Propagator::new(cfg)?.apply(cfg, u)
}

/// Picard iteration u ← 𝓕u from u⁰ = S(·)u₀.
pub fn fixed_point_solve(cfg: &SolverConfig) -> Result<(History, SolverTrace)> {
    let prop = Propagator::new(cfg)?;
    let start = prop.linear_part(cfg)?;
    picard_from(cfg, &prop, start)
}

/// Picard iteration from a given initial history.
pub fn picard_from(cfg: &SolverConfig, prop: &Propagator, start: History) -> Result<(History, SolverTrace)> {
    let mut u = start;
    let mut increments = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut blow_up = None;
    while iterations < cfg.max_iter {
        let next = prop.apply(cfg, &u)?;
        iterations += 1;
        if let Some(step) = first_non_finite(&next) {
            blow_up = Some(BlowUpFlag { iteration: iterations, step, functional: "non-finite field value".into() });
            u = next;
            break;
        }
        let inc = increment(cfg, &next, &u)?;
        increments.push(inc);
        u = next;
        if inc <= cfg.tolerance {
            converged = true;
            break;
        }
    }
    let fu = if blow_up.is_none() { Some(prop.apply(cfg, &u)?) } else { None };
    let records = build_trace(cfg, &u, fu.as_ref().filter(|h| history_finite(h)), iterations)?;
    Ok((u, SolverTrace { records, converged, iterations, increments, blow_up }))
}

#[derive(Debug, Clone, Serialize)]
pub struct SuperSolutionReport {
    pub pass: bool,
    /// min over nodes and points of u − 𝓕u.
    pub worst: f64,
    pub worst_step: usize,
    pub scale: f64,
}

/// u ≥ 𝓕u within −1e−8·max|u| at every node.
pub fn is_supersolution(cfg: &SolverConfig, u: &History) -> Result<SuperSolutionReport> {
    let prop = Propagator::new(cfg)?;
    supersolution_with(cfg, &prop, u)
}

fn supersolution_with(cfg: &SolverConfig, prop: &Propagator, u: &History) -> Result<SuperSolutionReport> {
    let fu = prop.apply(cfg, u)?;
    let scale = u.iter().map(|f| f.max_abs()).fold(0.0, f64::max);
    let mut worst = f64::INFINITY;
    let mut worst_step = 0;
    for (n, (a, b)) in u.iter().zip(&fu).enumerate() {
        let m = a.sub(b)?.min();
        if m < worst {
            worst = m;
            worst_step = n;
        }
    }
    Ok(SuperSolutionReport { pass: worst >= -1e-8 * scale, worst, worst_step, scale })
}

/// Decreasing iteration 𝓕u ≥ 𝓕²u ≥ … from a super-solution.
pub fn monotone_iterate(cfg: &SolverConfig, super_sol: History) -> Result<(History, SolverTrace)> {
    let prop = Propagator::new(cfg)?;
    let rep = supersolution_with(cfg, &prop, &super_sol)?;
    if !rep.pass {
        return Err(Error::Precondition(format!(
            "starting history is not a super-solution (worst u - Fu = {:.3e} at step {})",
            rep.worst, rep.worst_step
        )));
    }
    let scale = rep.scale.max(f64::MIN_POSITIVE);
    let mut u = super_sol;
    let mut increments = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        let next = prop.apply(cfg, &u)?;
        iterations += 1;
        for (n, (a, b)) in next.iter().zip(&u).enumerate() {
            let rise = a.sub(b)?.max();
            if rise > 1e-10 * scale {
                return Err(Error::Consistency(format!(
                    "monotone iteration increased by {rise:.3e} at step {n}, iteration {iterations}"
                )));
            }
        }
        let inc = history_distance(&next, &u, cfg.q)?;
        increments.push(inc);
        u = next;
        if inc <= cfg.tolerance {
            converged = true;
            break;
        }
    }
    let fu = prop.apply(cfg, &u)?;
    let records = build_trace(cfg, &u, Some(&fu), iterations)?;
    Ok((u, SolverTrace { records, converged, iterations, increments, blow_up: None }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::kernels::Route;
    use crate::specfun::mittag_leffler;
    use crate::symbol::{SpectralMeasure, Symbol};
    use approx::assert_relative_eq;

    fn ks(n: usize, l: f64) -> KernelSet {
        let sym = Symbol::new(1.0, SpectralMeasure::symmetric_1d()).unwrap();
        KernelSet::new(0.5, sym, Grid::new(1, n, l).unwrap(), Route::Spectral).unwrap()
    }

    #[test]
    fn weights_telescope_at_zero_frequency() {
        let ml = MlTable::new(0.5, 1.0).unwrap();
        let mesh = TimeMesh::graded(1.0, 40, 2.0).unwrap();
        for n in [1, 7, 40] {
            let w = time_weights(&ml, 0.5, mesh.nodes(), n, 0.0);
            let tn = mesh.nodes()[n];
            assert_relative_eq!(w.iter().sum::<f64>(), tn.sqrt() * rgamma(1.5), max_relative = 1e-12);
        }
    }

    #[test]
    fn weights_positive_and_close_to_limit() {
        let ml = MlTable::new(0.5, 1.0).unwrap();
        let mesh = TimeMesh::graded(1.0, 16, 2.0).unwrap();
        let a = time_weights(&ml, 0.5, mesh.nodes(), 16, 2e-8);
        let b = time_weights(&ml, 0.5, mesh.nodes(), 16, 0.0);
        for (x, y) in a.iter().zip(&b) {
            assert!(*x > 0.0);
            assert_relative_eq!(*x, *y, max_relative = 1e-7);
        }
    }

    #[test]
    fn zero_nonlinearity_gives_linear_part() {
        let k = ks(64, 8.0);
        let u0 = Field::from_fn(*k.grid(), |x| (-x[0] * x[0]).exp());
        let mesh = TimeMesh::graded(1.0, 8, 2.0).unwrap();
        let cfg = SolverConfig::new(k.clone(), Nonlinearity::zero(), mesh, u0.clone()).unwrap();
        let (u, trace) = fixed_point_solve(&cfg).unwrap();
        assert!(trace.converged && trace.iterations == 1);
        let direct = k.s_apply(1.0, &u0).unwrap();
        assert!(u[8].sub(&direct).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn linear_constant_data() {
        let k = ks(16, 4.0);
        let u0 = Field::constant(*k.grid(), 1.0);
        let mesh = TimeMesh::graded(1.0, 256, 2.0).unwrap();
        let mut cfg = SolverConfig::new(k, Nonlinearity::Power { lambda: -0.25, k: 1.0 }, mesh, u0).unwrap();
        cfg.tolerance = 1e-14;
        let (u, trace) = fixed_point_solve(&cfg).unwrap();
        assert!(trace.converged);
        let exact = mittag_leffler(0.5, 1.0, -0.25).unwrap();
        assert!((u[256].values()[3] - exact).abs() < 1e-3);
    }

    #[test]
    fn mesh_validation() {
        assert!(TimeMesh::graded(1.0, 0, 2.0).is_err());
        assert!(TimeMesh::graded(1.0, 4, 0.5).is_err());
        assert!(TimeMesh::from_nodes(vec![0.0, 1.0, 1.0]).is_err());
        assert!(TimeMesh::from_nodes(vec![0.1, 1.0]).is_err());
    }

    #[test]
    fn nonlinearity_values() {
        let of = OsgoodFunction::new(2.0, 4.0).unwrap();
        assert_eq!(Nonlinearity::Osgood(of.clone()).eval(-1e-12), 0.0);
        assert_relative_eq!(Nonlinearity::Osgood(of.clone()).eval(2.0), 3.0, max_relative = 1e-14);
        assert_relative_eq!(Nonlinearity::Power { lambda: 2.0, k: 3.0 }.eval(-2.0), -16.0);
        let n1 = TruncationIndex::new(1).unwrap();
        assert_relative_eq!(Nonlinearity::Truncated(of, n1).eval(1e6), 240.0, max_relative = 1e-13);
    }
}
