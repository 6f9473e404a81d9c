use std::f64::consts::PI;

use nongauss_core::grid::{apply_multiplier, lp_norm, Field, Grid};
use nongauss_core::kernels::{KernelKind, KernelSet, Route};
use nongauss_core::osgood::{OsgoodFunction, TruncationIndex};
use nongauss_core::regimes::{
    below_critical, blowup_condition, global_window, lattice, pick_tau_rho, tau_rho_margin, RegimeParams,
};
use nongauss_core::specfun::mittag_leffler;
use nongauss_core::symbol::{omega_nu, symbol_psi, SpectralMeasure, Symbol};
use proptest::prelude::*;

fn atoms_2d() -> Symbol {
    let m = SpectralMeasure::atoms(2, vec![0.3, 1.9, 4.0], vec![0.5, 1.25, 0.8]).unwrap();
    Symbol::new(1.3, m).unwrap()
}

fn density_2d(beta: f64) -> Symbol {
    let m = SpectralMeasure::from_density(|a| 1.0 + 0.4 * (2.0 * a).cos() + 0.2 * (3.0 * a).sin()).unwrap();
    Symbol::new(beta, m).unwrap()
}

fn min_phi0(k: f64) -> f64 {
    2f64.powf(1.0 / (k - 1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ml_stays_in_unit_interval(a in 0.05f64..=1.0, x in -200.0f64..=0.0) {
        let v = mittag_leffler(a, 1.0, x).unwrap();
        prop_assert!(v > 0.0 && v <= 1.0, "E_{}({}) = {}", a, x, v);
    }

    #[test]
    fn ml_order_one_is_exp(x in -50.0f64..=0.0) {
        let v = mittag_leffler(1.0, 1.0, x).unwrap();
        prop_assert!(((v - x.exp()) / x.exp()).abs() <= 1e-10);
    }

    #[test]
    fn psi_is_homogeneous(c in 0.01f64..100.0, x in -5.0f64..5.0, y in -5.0f64..5.0, beta in 0.2f64..1.9) {
        prop_assume!(x.hypot(y) > 1e-3);
        for sym in [atoms_2d(), density_2d(beta)] {
            let b = sym.beta();
            let lhs = symbol_psi(&sym, &[c * x, c * y]);
            let rhs = c.powf(b) * symbol_psi(&sym, &[x, y]);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
        }
        let s1 = Symbol::new(beta, SpectralMeasure::two_atom_1d(0.7, 0.2).unwrap()).unwrap();
        let lhs = symbol_psi(&s1, &[c * x]);
        let rhs = c.powf(beta) * symbol_psi(&s1, &[x]);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
    }

    #[test]
    fn omega_is_even(theta in 0.0f64..(2.0 * PI), beta in 0.2f64..1.9) {
        let dir = [theta.cos(), theta.sin()];
        let opp = [-dir[0], -dir[1]];
        for sym in [atoms_2d(), density_2d(beta)] {
            let a = omega_nu(&sym, &dir).unwrap();
            let b = omega_nu(&sym, &opp).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
        let s1 = Symbol::new(beta, SpectralMeasure::two_atom_1d(0.9, 0.1).unwrap()).unwrap();
        let (p, m) = (omega_nu(&s1, &[1.0]).unwrap(), omega_nu(&s1, &[-1.0]).unwrap());
        prop_assert!((p - m).abs() <= 1e-14);
    }

    #[test]
    fn uniform_symbol_is_radial(r in 0.01f64..20.0, a in 0.0f64..(2.0 * PI), b in 0.0f64..(2.0 * PI), beta in 0.2f64..1.9) {
        let sym = Symbol::new(beta, SpectralMeasure::uniform(2).unwrap()).unwrap();
        let u = symbol_psi(&sym, &[r * a.cos(), r * a.sin()]);
        let v = symbol_psi(&sym, &[r * b.cos(), r * b.sin()]);
        prop_assert!((u - v).abs() <= 1e-10 * u.abs());
    }

    #[test]
    fn mean_survives_unit_multiplier(seed in proptest::collection::vec(-1.0f64..1.0, 64), c in 0.1f64..5.0) {
        let g = Grid::new(1, 64, 3.0).unwrap();
        let f = Field::new(g, seed).unwrap();
        let out = apply_multiplier(&f, |xi| (-c * xi[0] * xi[0]).exp()).unwrap();
        prop_assert!((out.integral() - f.integral()).abs() <= 1e-12 * f.max_abs().max(1.0));
    }

    #[test]
    fn parseval_holds_for_identity(seed in proptest::collection::vec(-2.0f64..2.0, 128)) {
        let g = Grid::new(1, 128, 5.0).unwrap();
        let f = Field::new(g, seed).unwrap();
        let out = apply_multiplier(&f, |_| 1.0).unwrap();
        let (a, b) = (lp_norm(&f, 2.0).unwrap(), lp_norm(&out, 2.0).unwrap());
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-300));
    }

    #[test]
    fn osgood_is_monotone_and_positive(k in 1.5f64..5.0, lift in 0.05f64..3.0, pts in proptest::collection::vec(-20.0f64..40.0, 2..40)) {
        let of = OsgoodFunction::new(k, min_phi0(k) * (1.0 + lift)).unwrap();
        prop_assert_eq!(of.f(0.0).unwrap(), 0.0);
        let mut ls = pts;
        ls.sort_by(|a, b| a.total_cmp(b));
        let vals: Vec<f64> = ls.iter().map(|l| of.log_f(*l).unwrap()).collect();
        for w in vals.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-13 * w[0].abs().max(1.0));
        }
        for l in &ls {
            prop_assert!(of.f(l.exp()).unwrap() > 0.0);
        }
    }

    #[test]
    fn truncation_respects_lipschitz(k in 1.5f64..4.0, lift in 0.05f64..3.0, n in 1usize..4, u in 0.0f64..1.0) {
        let of = OsgoodFunction::new(k, min_phi0(k) * (1.0 + lift)).unwrap();
        let idx = TruncationIndex::new(n).unwrap();
        let c = of.lipschitz(idx);
        let top = of.log_phi(n) + 0.5;
        let s = (-10.0 + (top + 10.0) * u).exp();
        let h = 1e-4 * s;
        let q = (of.f_n(idx, s + h).unwrap() - of.f_n(idx, s).unwrap()) / h;
        prop_assert!(q <= c * (1.0 + 1e-10) + 1e-9 * c, "slope {} above {}", q, c);
    }

    #[test]
    fn regime_forms_agree(ai in 1u32..20, bi in 1u32..40, d in 1usize..=2, kn in 21u32..120, qn in 20u32..120) {
        let p = RegimeParams::new(ai as f64 / 20.0, bi as f64 / 20.0, d, kn as f64 / 20.0, qn as f64 / 20.0).unwrap();
        prop_assert_eq!(below_critical(&p), blowup_condition(&p));
    }

    #[test]
    fn picked_pair_is_admissible(ai in 1u32..20, bi in 1u32..40, d in 1usize..=2, kn in 21u32..200, qn in 20u32..60) {
        let p = RegimeParams::new(ai as f64 / 20.0, bi as f64 / 20.0, d, kn as f64 / 20.0, qn as f64 / 20.0).unwrap();
        prop_assume!(blowup_condition(&p));
        let tr = pick_tau_rho(&p).unwrap();
        prop_assert!(tr.tau > 0.0 && tr.tau < d as f64 / p.q);
        prop_assert!(tr.rho > 0.0 && tr.rho < p.alpha / p.beta);
        prop_assert!(tau_rho_margin(p.k, p.d, tr.tau, tr.rho) > 0.0);
    }
}

#[test]
fn osgood_steps_match_threshold_gaps() {
    for (k, phi0) in [(2.0, 4.0), (3.0, 2.5), (1.5, 5.0)] {
        let of = OsgoodFunction::new(k, phi0).unwrap();
        for i in 1..6 {
            let want = of.phi(i) - of.phi(i - 1);
            let got = of.f(of.phi(i - 1)).unwrap();
            assert!(((got - want) / want).abs() < 1e-12, "k={k} i={i}: {got} vs {want}");
        }
    }
}

#[test]
fn window_and_blowup_disjoint_on_lattice() {
    let clash: Vec<_> = lattice()
        .into_iter()
        .filter(|p| p.q > p.k && blowup_condition(p) && global_window(p).q_in_window)
        .collect();
    assert!(clash.is_empty(), "{clash:?}");
}

#[test]
fn kernels_nonnegative_in_one_dimension() {
    for a in [0.3, 0.5, 0.8] {
        for b in [0.8, 1.0, 1.5] {
            let sym = Symbol::new(b, SpectralMeasure::symmetric_1d()).unwrap();
            let ks = KernelSet::new(a, sym, Grid::new(1, 1 << 13, 400.0).unwrap(), Route::Spectral).unwrap();
            for kind in [KernelKind::Z, KernelKind::Y] {
                for t in [0.1, 1.0] {
                    let k = ks.kernel_unchecked(kind, t).unwrap();
                    assert!(k.min() >= -1e-8 * k.max(), "a={a} b={b} {kind:?} t={t}: {}", k.min() / k.max());
                }
            }
        }
    }
}
