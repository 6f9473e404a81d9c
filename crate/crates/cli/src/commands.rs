use std::fmt::Write as _;

use nongauss_core::checks::{
    default_suite_grid, kernel_suite, CHECK_CSV_HEADER, MASS_TOL, SCALING_TOL, SLOPE_TOL, SUITE_TIMES,
};
use nongauss_core::config::{parse_tuples, RunConfig};
use nongauss_core::grid::{sample_u0, Grid, InitialData};
use nongauss_core::kernels::{KernelSet, Route};
use nongauss_core::osgood::{junction_defect, osgood_divergence_report, osgood_type_check};
use nongauss_core::regimes::{global_window, pick_tau_rho, verdict_csv_row, VERDICT_CSV_HEADER};
use nongauss_core::solver::{
    annulus_bound_check, blowup_probe, fixed_point_solve, global_study, sphere_minimum, sphere_times,
    write_trace_csv, BlowupReport, GlobalSetup, LadderPolicy, ProbeSetup, ProbeVerdict, SolverConfig,
    ANNULUS_SLACK,
};
use nongauss_core::symbol::Symbol;
use serde_json::{json, Value};

use crate::artifacts::Artifacts;
use crate::{Failure, Outcome};

type Run = Result<Outcome, Failure>;

fn ev<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serialises")
}

fn outcome(pass: bool) -> Outcome {
    if pass {
        Outcome::Pass
    } else {
        Outcome::Inconclusive
    }
}

fn kernels(cfg: &RunConfig, grid: Grid) -> Result<KernelSet, Failure> {
    let alpha = cfg.f64_req("params.alpha")?;
    let beta = cfg.f64_req("params.beta")?;
    let measure = cfg.measure(grid.dim())?;
    Ok(KernelSet::new(alpha, Symbol::new(beta, measure)?, grid, Route::Spectral)?)
}

fn grid_or(cfg: &RunConfig, dim: usize, n: usize, l: f64) -> Result<Grid, Failure> {
    let n = cfg.usize_or("grid.n", n)?;
    let l = cfg.f64_or("grid.L", l)?;
    Ok(Grid::new(dim, n, l)?)
}

pub fn kernel_validate(cfg: &RunConfig, out: &mut Artifacts) -> Run {
    let alpha = cfg.f64_req("params.alpha")?;
    let beta = cfg.f64_req("params.beta")?;
    let d = cfg.dim()?;
    let measure = cfg.measure(d)?;
    let grid = if cfg.get("grid.n").is_some() || cfg.get("grid.L").is_some() {
        cfg.grid(d)?
    } else {
        default_suite_grid(alpha, beta, d)?
    };
    let checks = kernel_suite(alpha, beta, &measure, grid)?;
    let mut text = format!("{CHECK_CSV_HEADER}\n");
    for c in &checks {
        text.push_str(&c.csv_row());
        text.push('\n');
    }
    out.csv("kernel_checks.csv", &text)?;
    let pass = checks.iter().all(|c| c.pass);
    out.verdict(
        if pass { "pass" } else { "fail" },
        checks.iter().map(ev).collect(),
        json!({
            "mass_tol": MASS_TOL,
            "scaling_tol": SCALING_TOL,
            "slope_tol": SLOPE_TOL,
            "times": SUITE_TIMES,
            "grid": { "n": grid.n(), "L": grid.half_width() },
        }),
    )?;
    Ok(outcome(pass))
}

pub fn osgood_table(cfg: &RunConfig, out: &mut Artifacts) -> Run {
    let k = cfg.f64_req("params.k")?;
    let of = cfg.osgood(k)?;
    let s_min = cfg.f64_or("osgood.s_min", of.phi0() / 16.0)?;
    let s_max = cfg.f64_or("osgood.s_max", of.phi(2).min(1e300))?;
    let samples = cfg.usize_or("osgood.samples", 400)?;
    if !(s_min > 0.0 && s_max > s_min) || samples < 2 {
        return Err(Failure::Validation(
            "config error at `osgood`: need 0 < s_min < s_max and samples >= 2".into(),
        ));
    }
    let mut text = String::from("s,f,f_tilde\n");
    let mut tilde_ok = true;
    let (a, b) = (s_min.ln(), s_max.ln());
    for j in 0..samples {
        let s = (a + (b - a) * j as f64 / (samples - 1) as f64).exp();
        let f = of.f(s)?;
        let ft = of.f_tilde(s)?;
        tilde_ok &= ft <= f * (1.0 + 1e-12);
        writeln!(text, "{s:e},{f:e},{ft:e}").expect("string write");
    }
    out.csv("osgood_table.csv", &text)?;
    let defect = junction_defect(&of, 30);
    let div = osgood_divergence_report(&of, 100)?;
    let block30 = of.block_integral(30)?;
    let sum100 = *div.partial_sums.last().expect("100 blocks");
    let power = osgood_type_check(|s| s.powf(k), &of, 1.0, of.phi(8).min(1e100), 2000)?;
    let pass = defect <= 1e-12 && tilde_ok && (block30 - 0.5).abs() <= 1e-6 && sum100 > 25.0 && !power.bounded;
    out.verdict(
        if pass { "pass" } else { "fail" },
        vec![
            json!({ "junction_defect": defect }),
            json!({ "f_tilde_below_f": tilde_ok }),
            json!({ "block_integral_30": block30 }),
            json!({ "partial_sum_100": sum100 }),
            json!({ "power_ratio": ev(&power) }),
        ],
        json!({ "k": k, "phi0": of.phi0(), "s_min": s_min, "s_max": s_max, "samples": samples }),
    )?;
    Ok(outcome(pass))
}

pub fn regime_classify(cfg: &RunConfig, out: &mut Artifacts) -> Run {
    let tuples = match cfg.get("regimes.tuples") {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Validation(format!("config error at `regimes.tuples`: {path}: {e}")))?;
            parse_tuples(&text)?
        }
        None => vec![cfg.params()?],
    };
    let mut text = format!("{VERDICT_CSV_HEADER}\n");
    let mut evidence = Vec::with_capacity(tuples.len());
    for p in &tuples {
        let v = global_window(p);
        text.push_str(&verdict_csv_row(p, &v));
        text.push('\n');
        evidence.push(json!({ "params": ev(p), "verdict": ev(&v) }));
    }
    out.csv("regimes.csv", &text)?;
    out.verdict("classified", evidence, json!({ "tuples": tuples.len() }))?;
    Ok(Outcome::Pass)
}

pub fn simulate(cfg: &RunConfig, out: &mut Artifacts) -> Run {
    let d = cfg.dim()?;
    let grid = cfg.grid(d)?;
    let ks = kernels(cfg, grid)?;
    let mesh = cfg.mesh()?;
    let f = cfg.nonlinearity()?;
    let u0 = sample_u0(&grid, &cfg.initial_data(d)?)?;
    let mut sc = SolverConfig::new(ks, f, mesh, u0)?;
    sc.tolerance = cfg.f64_or("solver.tolerance", sc.tolerance)?;
    sc.max_iter = cfg.usize_or("solver.max_iter", sc.max_iter)?;
    sc.q = cfg.f64_or("solver.norm_q", sc.q)?;
    sc.q_prime = cfg.f64_opt("solver.q_prime")?;
    sc.eps = cfg.f64_opt("solver.eps")?;
    sc.validate()?;
    let (u, trace) = fixed_point_solve(&sc)?;
    let mut buf = Vec::new();
    trace.write_csv(&mut buf)?;
    out.csv("trace.csv", &String::from_utf8(buf).expect("ascii csv"))?;
    let mut buf = Vec::new();
    u.last().expect("mesh has nodes").write_csv(&mut buf)?;
    out.csv("u_final.csv", &String::from_utf8(buf).expect("ascii csv"))?;
    let verdict = match (&trace.blow_up, trace.converged) {
        (Some(_), _) => "blow_up_flagged",
        (None, true) => "converged",
        (None, false) => "not_converged",
    };
    out.verdict(
        verdict,
        vec![json!({
            "iterations": trace.iterations,
            "increments": trace.increments,
            "contraction_factors": trace.contraction_factors(),
            "blow_up": ev(&trace.blow_up),
        })],
        json!({ "tolerance": sc.tolerance, "max_iter": sc.max_iter, "q": sc.q }),
    )?;
    Ok(outcome(verdict == "converged"))
}

fn blowup_rows(text: &mut String, run: &str, r: &BlowupReport) {
    for l in &r.levels {
        let ratio = l.log10_ratio.map(|x| format!("{x:e}")).unwrap_or_default();
        writeln!(
            text,
            "{run},{},{},{:e},{:e},{:e},{ratio},{}",
            l.level, l.n, l.log_phi, l.local_mass, l.log_functional, l.time_nodes
        )
        .expect("string write");
    }
}

pub fn blowup_study(cfg: &RunConfig, out: &mut Artifacts) -> Run {
    let p = cfg.params()?;
    let grid = grid_or(cfg, p.d, 4096, 16.0)?;
    let ks = kernels(cfg, grid)?;
    let of = cfg.osgood(p.k)?;
    let (tau, rho) = match (cfg.f64_opt("u0.tau")?, cfg.f64_opt("blowup.rho")?) {
        (Some(t), Some(r)) => (t, r),
        (t, r) => {
            let tr = pick_tau_rho(&p)?;
            (t.unwrap_or(tr.tau), r.unwrap_or(tr.rho))
        }
    };
    let setup = ProbeSetup {
        q: p.q,
        tau,
        rho,
        eps: cfg.f64_or("blowup.eps", 1.5)?,
        t: cfg.f64_or("blowup.t", 1.0)?,
        radius: cfg.f64_or("u0.radius", 2.0)?,
        levels: cfg.usize_or("blowup.levels", 5)?,
        base_n: cfg.usize_or("blowup.base_n", grid.n())?,
        half_width: grid.half_width(),
        panel_width: 0.5,
    };
    let policy = LadderPolicy {
        factor: cfg.f64_or("blowup.factor", 1.5)?,
        min_levels: cfg.usize_or("blowup.min_levels", 4)?,
        ..LadderPolicy::default()
    };
    let probe = blowup_probe(&ks, Some(&of), &setup, &policy, of.phi0())?;
    let control = if cfg.bool_or("blowup.control", true)? {
        Some(blowup_probe(&ks, None, &setup, &policy, of.phi0())?)
    } else {
        None
    };
    let mut text = String::from("run,level,n,log_phi,local_mass,log_functional,log10_ratio,time_nodes\n");
    blowup_rows(&mut text, "probe", &probe);
    if let Some(c) = &control {
        blowup_rows(&mut text, "control", c);
    }
    out.csv("blowup_levels.csv", &text)?;
    let control_ok = control.as_ref().is_none_or(|c| c.verdict == ProbeVerdict::NoDivergence);
    let pass = probe.verdict == ProbeVerdict::DivergenceEvidence && control_ok;
    let verdict = if pass {
        "divergence_evidence"
    } else if !control_ok {
        "control_not_converged"
    } else {
        match probe.verdict {
            ProbeVerdict::NoDivergence => "no_divergence",
            _ => "inconclusive",
        }
    };
    let mut evidence = vec![json!({ "run": "probe", "report": ev(&probe) })];
    if let Some(c) = &control {
        evidence.push(json!({ "run": "control", "report": ev(c) }));
    }
    out.verdict(verdict, evidence, json!({ "ladder": ev(&policy), "setup": ev(&setup) }))?;
    Ok(outcome(pass))
}

pub fn global_study_cmd(cfg: &RunConfig, out: &mut Artifacts) -> Run {
    let p = cfg.params()?;
    let grid = cfg.grid(p.d)?;
    let ks = kernels(cfg, grid)?;
    let of = cfg.osgood(p.k)?;
    let u0 = sample_u0(&grid, &cfg.initial_data(p.d)?)?;
    let defaults = GlobalSetup::default();
    let setup = GlobalSetup {
        q: p.q,
        t_end: cfg.f64_req("time.T")?,
        steps: cfg.usize_req("time.steps")?,
        grading: cfg.f64_or("time.grading", defaults.grading)?,
        fit_from: cfg.f64_or("global.fit_from", defaults.fit_from)?,
        tolerance: cfg.f64_or("solver.tolerance", defaults.tolerance)?,
        max_iter: cfg.usize_or("solver.max_iter", defaults.max_iter)?,
    };
    let r = global_study(&ks, &of, &u0, &setup)?;
    let mut buf = Vec::new();
    write_trace_csv(&r.trace, &mut buf)?;
    out.csv("global_trace.csv", &String::from_utf8(buf).expect("ascii csv"))?;
    let slope_ok = (r.decay_slope - r.expected_slope).abs() <= 0.1;
    let pass = r.converged && r.max_contraction < 1.0 && r.weighted_sup.is_finite() && slope_ok && r.supersolution.pass;
    out.verdict(
        if pass { "global_evidence" } else { "inconclusive" },
        vec![ev(&r)],
        json!({ "setup": ev(&setup), "slope_tol": 0.1, "contraction_below": 1.0 }),
    )?;
    Ok(outcome(pass))
}

pub fn annulus_check(cfg: &RunConfig, out: &mut Artifacts) -> Run {
    let d = cfg.dim()?;
    let grid = cfg.grid(d)?;
    let ks = kernels(cfg, grid)?;
    let data = cfg.initial_data(d)?;
    if !matches!(data, InitialData::Singular { .. }) {
        return Err(Failure::Validation("config error at `u0.kind`: annulus-check needs `singular`".into()));
    }
    let rho = cfg.f64_req("annulus.rho")?;
    let factors = cfg.list_or("annulus.phi_factors", &[1.0, 2.0, 5.0])?;
    if factors.iter().any(|f| *f < 1.0) {
        return Err(Failure::Validation("config error at `annulus.phi_factors`: factors must be >= 1".into()));
    }
    let u0 = sample_u0(&grid, &data)?;
    let (m, _) = sphere_minimum(&ks, &u0, &sphere_times())?;
    let mut text = String::from("phi_factor,phi,m,t_bound,samples,worst_ratio,worst_t,worst_x,pass\n");
    let mut evidence = Vec::new();
    let mut pass = true;
    for f in factors {
        let r = annulus_bound_check(&ks, &data, rho, f * m)?;
        writeln!(
            text,
            "{f},{:e},{:e},{:e},{},{:e},{:e},{:e},{}",
            r.phi, r.m, r.t_bound, r.samples, r.worst_ratio, r.worst_t, r.worst_x, r.pass
        )
        .expect("string write");
        pass &= r.pass;
        evidence.push(ev(&r));
    }
    out.csv("annulus.csv", &text)?;
    out.verdict(
        if pass { "pass" } else { "fail" },
        evidence,
        json!({ "rho": rho, "slack": ANNULUS_SLACK }),
    )?;
    Ok(outcome(pass))
}
