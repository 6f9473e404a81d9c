use nongauss_core::grid::{sample_u0, Field, Grid, InitialData};
use nongauss_core::kernels::{KernelSet, Route};
use nongauss_core::osgood::{OsgoodFunction, TruncationIndex};
use nongauss_core::solver::{
    blowup_probe, fixed_point_solve, global_study, history_distance, picard_from, time_weights, GlobalSetup,
    History, LadderPolicy, Nonlinearity, ProbeSetup, Propagator, SolverConfig, TimeMesh,
};
use nongauss_core::specfun::{mittag_leffler, rgamma, MlTable};
use nongauss_core::symbol::{SpectralMeasure, Symbol};
use nongauss_core::Error;

fn ks(alpha: f64, beta: f64, n: usize, l: f64) -> KernelSet {
    let sym = Symbol::new(beta, SpectralMeasure::symmetric_1d()).unwrap();
    KernelSet::new(alpha, sym, Grid::new(1, n, l).unwrap(), Route::Spectral).unwrap()
}

/// y = c + λ I^a y by product trapezoid on t_n = T(n/N)³, implicit in y_n.
fn volterra_trapezoid(a: f64, lambda: f64, c: f64, t_end: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let t: Vec<f64> = (0..=n).map(|i| t_end * (i as f64 / n as f64).powi(3)).collect();
    let ga = rgamma(a);
    let mut y = vec![c; n + 1];
    for m in 1..=n {
        let mut acc = 0.0;
        let mut diag = 0.0;
        for j in 0..m {
            let (big, small) = (t[m] - t[j], t[m] - t[j + 1]);
            let h = t[j + 1] - t[j];
            let i0 = (big.powf(a) - small.powf(a)) / a;
            let i1 = (big.powf(a + 1.0) - small.powf(a + 1.0)) / (a + 1.0);
            let left = (i1 - small * i0) / h * ga;
            let right = (big * i0 - i1) / h * ga;
            acc += left * y[j];
            if j + 1 == m {
                diag = right;
            } else {
                acc += right * y[j + 1];
            }
        }
        y[m] = (c + lambda * acc) / (1.0 - lambda * diag);
    }
    (t, y)
}

#[test]
fn scalar_volterra_matches_mittag_leffler() {
    for a in [0.3, 0.5, 0.8] {
        let (t, y) = volterra_trapezoid(a, -1.0, 1.0, 1.0, 2000);
        let err = t
            .iter()
            .zip(&y)
            .map(|(s, v)| (v - mittag_leffler(a, 1.0, -s.powf(a)).unwrap()).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-6, "a={a}: {err}");
    }
}

#[test]
fn zero_frequency_weights_sum_to_fractional_integral() {
    let a = 0.65;
    let ml = MlTable::new(a, 1.0).unwrap();
    let mesh = TimeMesh::graded(2.0, 40, 2.0).unwrap();
    let nodes = mesh.nodes();
    for n in [1, 7, 40] {
        let s: f64 = time_weights(&ml, a, nodes, n, 0.0).iter().sum();
        let want = nodes[n].powf(a) * rgamma(1.0 + a);
        assert!((s - want).abs() <= 1e-10 * want, "n={n}");
    }
}

fn osgood_cfg(u0: Field) -> SolverConfig {
    let of = OsgoodFunction::new(2.0, 4.0).unwrap();
    let nl = Nonlinearity::Truncated(of, TruncationIndex::new(2).unwrap());
    let mut cfg = SolverConfig::new(ks(0.6, 1.2, 128, 8.0), nl, TimeMesh::graded(0.5, 48, 2.0).unwrap(), u0).unwrap();
    cfg.tolerance = 1e-12;
    cfg
}

fn bump(g: Grid, amp: f64) -> Field {
    Field::from_fn(g, |x| amp * (-x[0] * x[0]).exp())
}

fn scale(h: &History) -> f64 {
    h.iter().map(Field::max_abs).fold(0.0, f64::max)
}

#[test]
fn iterates_stay_nonnegative() {
    let g = Grid::new(1, 128, 8.0).unwrap();
    let cfg = osgood_cfg(bump(g, 0.3));
    let (u, trace) = fixed_point_solve(&cfg).unwrap();
    assert!(trace.converged);
    let s = scale(&u);
    for f in &u {
        assert!(f.min() >= -1e-8 * s);
    }
}

#[test]
fn larger_data_gives_larger_solution() {
    let g = Grid::new(1, 128, 8.0).unwrap();
    let (u, _) = fixed_point_solve(&osgood_cfg(bump(g, 0.3))).unwrap();
    let (v, _) = fixed_point_solve(&osgood_cfg(bump(g, 0.3).map(|x| 0.5 * x + 0.01 * x * x))).unwrap();
    let s = scale(&u);
    for (a, b) in u.iter().zip(&v) {
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!(*x >= y - 1e-8 * s);
        }
    }
}

#[test]
fn picard_limit_does_not_depend_on_start() {
    let g = Grid::new(1, 128, 8.0).unwrap();
    let cfg = osgood_cfg(bump(g, 0.3));
    let prop = Propagator::new(&cfg).unwrap();
    let lin = prop.linear_part(&cfg).unwrap();
    let zero: History = lin.iter().map(|f| Field::zeros(*f.grid())).collect();
    let doubled: History = lin.iter().map(|f| f.map(|x| 2.0 * x)).collect();
    let (a, _) = picard_from(&cfg, &prop, zero).unwrap();
    let (b, _) = picard_from(&cfg, &prop, doubled).unwrap();
    assert!(history_distance(&a, &b, cfg.q).unwrap() <= 10.0 * cfg.tolerance * scale(&a).max(1.0));
}

#[test]
fn blowup_probe_rejects_failing_hypotheses() {
    let k = ks(0.8, 1.0, 1024, 16.0);
    let of = OsgoodFunction::new(4.0, 4.0).unwrap();
    let p = LadderPolicy::default();
    // k = 4 does not exceed q(1 + β/(αd)) for q = 2
    let bad_q = ProbeSetup { q: 2.0, ..ProbeSetup::default() };
    assert!(matches!(blowup_probe(&k, Some(&of), &bad_q, &p, 4.0), Err(Error::Precondition(_))));
    let bad_rho = ProbeSetup { rho: 0.9, ..ProbeSetup::default() };
    assert!(matches!(blowup_probe(&k, Some(&of), &bad_rho, &p, 4.0), Err(Error::Precondition(_))));
    let bad_eps = ProbeSetup { eps: 1.0, ..ProbeSetup::default() };
    assert!(blowup_probe(&k, Some(&of), &bad_eps, &p, 4.0).is_err());
}

#[test]
fn global_study_rejects_q_outside_window() {
    let k = ks(0.9, 0.5, 256, 64.0);
    let of = OsgoodFunction::new(2.0, 4.0).unwrap();
    let u0 = sample_u0(k.grid(), &InitialData::PowerTail { amplitude: 0.05, decay: 0.5, cutoff: 32.0 }).unwrap();
    for q in [1.5, 4.0] {
        let setup = GlobalSetup { q, ..GlobalSetup::default() };
        assert!(matches!(global_study(&k, &of, &u0, &setup), Err(Error::Precondition(_))), "q={q}");
    }
    let neg = u0.map(|x| -x);
    assert!(global_study(&k, &of, &neg, &GlobalSetup::default()).is_err());
}
