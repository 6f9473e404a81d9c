//! Small-data global study: Picard iteration for the power source λ|u|^{k−1}u
//! in the weighted norm sup_t t^{(αd/β)(1/q′−1/q)}‖u(t)‖_q, followed by a
//! monotone iteration for the Osgood source started from the power solution.

use serde::Serialize;

use super::{
    apply_f, fixed_point_solve, is_supersolution, monotone_iterate, e_norm, History, Nonlinearity, SolverConfig,
    SuperSolutionReport, TimeMesh, TraceRecord,
};
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::kernels::{least_squares_slope, KernelSet};
use crate::osgood::{osgood_type_check, OsgoodFunction};
use crate::regimes::{global_window, RegimeParams};

#[derive(Debug, Clone, Serialize)]
pub struct GlobalSetup {
    pub q: f64,
    pub t_end: f64,
    pub steps: usize,
    pub grading: f64,
    /// The decay slope is fitted on [fit_from·T, T].
    pub fit_from: f64,
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for GlobalSetup {
    fn default() -> Self {
        GlobalSetup { q: 3.0, t_end: 100.0, steps: 56, grading: 2.0, fit_from: 0.01, tolerance: 1e-10, max_iter: 60 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GlobalReport {
    pub q: f64,
    pub q_prime: f64,
    pub power_constant: f64,
    pub lambda: f64,
    pub converged: bool,
    pub iterations: usize,
    pub contraction_factors: Vec<f64>,
    pub max_contraction: f64,
    pub weighted_sup: f64,
    pub expected_slope: f64,
    pub decay_slope: f64,
    /// E-norm of the first correction at doubled amplitude over the one at
    /// the given amplitude.
    pub doubling_ratio: f64,
    pub supersolution: SuperSolutionReport,
    pub monotone_converged: bool,
    pub monotone_iterations: usize,
    /// Trace of the power fixed point.
    #[serde(skip)]
    pub trace: Vec<TraceRecord>,
}

/// sup f(s)/s^k of the Osgood function over a log sweep of [s_min, s_max].
pub fn estimate_power_constant(of: &OsgoodFunction, s_min: f64, s_max: f64, samples: usize) -> Result<f64> {
    let k = of.k();
    let rep = osgood_type_check(|s| s.powf(k), of, s_min, s_max, samples)?;
    if !(rep.min > 0.0) {
        return Err(Error::Consistency("power comparison degenerated".into()));
    }
    Ok(1.0 / rep.min)
}

fn first_correction_norm(cfg: &SolverConfig, w: f64) -> Result<f64> {
    let zero = SolverConfig { nonlinearity: Nonlinearity::zero(), ..cfg.clone() };
    let lin = apply_f(&zero, &vec![cfg.u0.clone(); cfg.mesh.nodes().len()])?;
    let next = apply_f(cfg, &lin)?;
    let diff: History = next.iter().zip(&lin).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?;
    e_norm(&diff, cfg.mesh.nodes(), cfg.q, w)
}

pub fn global_study(ks: &KernelSet, of: &OsgoodFunction, u0: &Field, setup: &GlobalSetup) -> Result<GlobalReport> {
    let p = RegimeParams::new(ks.alpha(), ks.beta(), ks.dim(), of.k(), setup.q)?;
    let v = global_window(&p);
    if !(v.q_in_window && v.q_prime_ge_1) {
        return Err(Error::Precondition(format!(
            "q = {} is outside the window ({}, {}) or q' = {} < 1",
            setup.q, v.q_lo, v.q_hi, v.q_prime
        )));
    }
    if !(setup.fit_from > 0.0 && setup.fit_from < 1.0) {
        return Err(Error::domain("fit_from must lie in (0,1)"));
    }
    if u0.values().iter().any(|x| *x < 0.0) {
        return Err(Error::domain("the comparison argument needs non-negative data"));
    }
    let c = estimate_power_constant(of, 1e-6, of.phi(6).min(1e150), 4000)?;
    let lambda = 1.0 / c;
    let mesh = TimeMesh::graded(setup.t_end, setup.steps, setup.grading)?;
    let mut cfg = SolverConfig::new(ks.clone(), Nonlinearity::Power { lambda, k: of.k() }, mesh, u0.clone())?;
    cfg.q = setup.q;
    cfg.q_prime = Some(v.q_prime);
    cfg.tolerance = setup.tolerance;
    cfg.max_iter = setup.max_iter;
    let w = cfg.weight_exponent().unwrap_or(0.0);

    let (u, trace) = fixed_point_solve(&cfg)?;
    if trace.blow_up.is_some() {
        return Err(Error::Consistency("power iteration produced non-finite values".into()));
    }
    let contraction_factors = trace.contraction_factors();
    let max_contraction = contraction_factors.iter().cloned().fold(0.0, f64::max);
    let weighted_sup = trace.records.iter().skip(1).map(|r| r.weighted_norm).fold(0.0, f64::max);
    let lo = setup.fit_from * setup.t_end;
    let (xs, ys): (Vec<f64>, Vec<f64>) = trace
        .records
        .iter()
        .filter(|r| r.t >= lo * (1.0 - 1e-12) && r.lq_norm > 0.0)
        .map(|r| (r.t.ln(), r.lq_norm.ln()))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::Resolution("fewer than three mesh nodes in the fit window".into()));
    }
    let decay_slope = least_squares_slope(&xs, &ys);

    let base = first_correction_norm(&cfg, w)?;
    let doubled = SolverConfig { u0: u0.map(|x| 2.0 * x), ..cfg.clone() };
    let doubling_ratio = first_correction_norm(&doubled, w)? / base;

    let ocfg = SolverConfig { nonlinearity: Nonlinearity::Osgood(of.clone()), ..cfg.clone() };
    let supersolution = is_supersolution(&ocfg, &u)?;
    let (monotone_converged, monotone_iterations) = if supersolution.pass {
        let (_, mt) = monotone_iterate(&ocfg, u)?;
        (mt.converged, mt.iterations)
    } else {
        (false, 0)
    };

    Ok(GlobalReport {
        q: setup.q,
        q_prime: v.q_prime,
        power_constant: c,
        lambda,
        converged: trace.converged,
        iterations: trace.iterations,
        contraction_factors,
        max_contraction,
        weighted_sup,
        expected_slope: -w,
        decay_slope,
        doubling_ratio,
        supersolution,
        monotone_converged,
        monotone_iterations,
        trace: trace.records,
    })
}
