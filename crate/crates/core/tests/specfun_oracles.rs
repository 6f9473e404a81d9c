//! Special functions against 20-digit reference values computed with
//! arbitrary-precision series.
#![allow(clippy::excessive_precision)]

use approx::assert_relative_eq;
use nongauss_core::specfun::{gamma_kernel, m_wright, mittag_leffler, rgamma, MlTable};

/// e^{x²} erfc(x) at x = j/2.
const ERFCX: [f64; 61] = [
    1.0,
    0.61569034419292587487,
    0.42758357615580700441,
    0.32158541645431750235,
    0.25539567631050574387,
    0.21080636406114358065,
    0.17900115118138995042,
    0.1552936556088942974,
    0.13699945762506138989,
    0.12248480427384141755,
    0.11070463773306862637,
    0.10096221839949908823,
    0.092776567800538354389,
    0.085805670104894601778,
    0.07980005432915293349,
    0.074573693062876683005,
    0.069985166200880927723,
    0.065925122499980351741,
    0.062307724037774684147,
    0.059064678352563890854,
    0.056140992743822585858,
    0.053491899746564116726,
    0.05108059475808844371,
    0.048876546895982276458,
    0.04685422101489376262,
    0.044992099001027920845,
    0.043271921864609692663,
    0.041678096764088149221,
    0.040197228650218459306,
    0.038817747074647219383,
    0.037529606388505765746,
    0.036324043059485428598,
    0.035193377824930837566,
    0.034130853321913274415,
    0.0331304999997255367,
    0.032187024738230408088,
    0.031295717815905209886,
    0.030452374799774609709,
    0.029653230641262163525,
    0.028894903811938217647,
    0.028174348741051319319,
    0.027488815151934872126,
    0.026835813158647956642,
    0.026213083193818982508,
    0.025618570005879452668,
    0.025050400098010076092,
    0.024506862089282605906,
    0.023986389566134008505,
    0.023487546063682640519,
    0.023009011874778182188,
    0.022549572432641358944,
    0.022108108052519826561,
    0.021683584850562906616,
    0.021275046685371105955,
    0.020881607990420940674,
    0.020502447384614797762,
    0.020136801964214276777,
    0.01978396219291317117,
    0.01944326731822284258,
    0.019114101252028536752,
    0.018795888861416751497,
];
const ML_SERIES: [(f64, f64, f64, f64); 16] = [
    (0.3, 1.0, -0.5, 0.63264900594359902246),
    (0.3, 1.0, -2.0, 0.29023222616787535504),
    (0.3, 1.0, -3.0, 0.21180263319643578203),
    (0.3, 0.3, -1.0, 0.077316799030089672914),
    (0.3, 0.3, -3.0, 0.01724331642174413418),
    (0.5, 0.5, -1.0, 0.13660600739194928254),
    (0.5, 0.5, -4.0, 0.01619175304751072739),
    (0.8, 1.0, -5.0, 0.057595384762152244264),
    (0.8, 1.0, -15.0, 0.01584380074779079787),
    (0.8, 0.8, -2.0, 0.092077465517931656239),
    (0.8, 0.8, -12.0, 0.0015091599225381109734),
    (0.65, 1.0, -7.5, 0.05620493258228826794),
    (0.65, 0.65, -7.5, 0.0051661089650981387372),
    (0.9, 1.0, -20.0, 0.0057495078161091125836),
    (0.5, 1.0, 0.75, 3.0031716636274523087),
    (0.9998063082551065, 1.0, -12.03286840613471, 0.000025787708493573921663),
];
const M_WRIGHT: [(f64, f64, f64); 10] = [
    (0.3, 0.0, 0.77038318386656600928),
    (0.3, 0.5, 0.56100164873166428441),
    (0.3, 1.5, 0.26115102031517885327),
    (0.3, 3.0, 0.063511233653723873331),
    (0.8, 0.0, 0.2178248842116672104),
    (0.8, 0.3, 0.31784607656988482044),
    (0.8, 1.0, 0.68203369935693100764),
    (0.8, 1.8, 0.33431412345558131994),
    (0.65, 1.2, 0.48935946105030037207),
    (0.65, 2.5, 0.097149197730417872343),
];

#[test]
fn ml_half_is_scaled_erfc() {
    for (j, want) in ERFCX.iter().enumerate() {
        let x = j as f64 / 2.0;
        assert_relative_eq!(mittag_leffler(0.5, 1.0, -x).unwrap(), *want, max_relative = 1e-12);
    }
}

#[test]
fn ml_two_parameter_values() {
    for (a, b, x, want) in ML_SERIES {
        match mittag_leffler(a, b, x) {
            Ok(v) => assert_relative_eq!(v, want, max_relative = 1e-11),
            Err(_) => assert!(x > 0.0, "E_{{{a},{b}}}({x}) rejected"),
        }
    }
}

#[test]
fn ml_table_matches_direct() {
    for a in [0.3, 0.65, 0.9] {
        let t = MlTable::new(a, 1.0).unwrap();
        for (a2, b, x, want) in ML_SERIES {
            if a2 == a && b == 1.0 {
                assert_relative_eq!(t.eval(-x), want, max_relative = 1e-9);
            }
        }
    }
}

#[test]
fn m_wright_values() {
    for (a, s, want) in M_WRIGHT {
        assert_relative_eq!(m_wright(a, s).unwrap(), want, max_relative = 1e-11);
    }
}

#[test]
fn gamma_helpers() {
    assert_relative_eq!(rgamma(0.5), 1.0 / std::f64::consts::PI.sqrt(), max_relative = 1e-14);
    assert_eq!(rgamma(0.0), 0.0);
    assert_eq!(rgamma(-2.0), 0.0);
    // t^{ρ−1}/Γ(ρ)
    assert_relative_eq!(gamma_kernel(0.5, 4.0).unwrap(), 0.5 / std::f64::consts::PI.sqrt(), max_relative = 1e-14);
}

#[test]
fn domain_errors() {
    assert!(mittag_leffler(0.0, 1.0, -1.0).is_err());
    assert!(mittag_leffler(1.5, 1.0, -1.0).is_err());
    assert!(m_wright(1.0, 1.0).is_err());
    assert!(m_wright(0.5, -1.0).is_err());
}
