//! Critical exponents and classification of (α, β, d, k, q) tuples.
//!
//! Strict inequalities are decided exactly when every input is recognised as
//! a short rational (denominator up to 10^6 reproducing the f64 bit pattern),
//! and with a 1e-12 guard band otherwise. Equality always counts as "not
//! satisfied".

use num::{BigInt, BigRational, One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};

const MAX_DEN: i64 = 1_000_000;
const GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeParams {
    pub alpha: f64,
    pub beta: f64,
    pub d: usize,
    pub k: f64,
    pub q: f64,
}

impl RegimeParams {
    pub fn new(alpha: f64, beta: f64, d: usize, k: f64, q: f64) -> Result<Self> {
        let p = RegimeParams { alpha, beta, d, k, q };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0,1), got {}", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta < 2.0) {
            return Err(Error::domain(format!("beta must lie in (0,2), got {}", self.beta)));
        }
        if self.d == 0 {
            return Err(Error::domain("d must be at least 1"));
        }
        if !(self.k > 1.0) || !self.k.is_finite() {
            return Err(Error::domain(format!("k must exceed 1, got {}", self.k)));
        }
        if !(self.q >= 1.0) || !self.q.is_finite() {
            return Err(Error::domain(format!("q must lie in [1, inf), got {}", self.q)));
        }
        Ok(())
    }
}

/// Shortest continued-fraction convergent that reproduces x exactly.
pub fn exact_rational(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let neg = x < 0.0;
    let ax = x.abs();
    let (mut h0, mut h1): (i64, i64) = (0, 1);
    let (mut k0, mut k1): (i64, i64) = (1, 0);
    let mut r = ax;
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e12 {
            break;
        }
        let ai = a as i64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > MAX_DEN {
            return None;
        }
        if (h2 as f64) / (k2 as f64) == ax {
            let v = BigRational::new(BigInt::from(h2), BigInt::from(k2));
            return Some(if neg { -v } else { v });
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

struct Exact {
    alpha: BigRational,
    beta: BigRational,
    d: BigRational,
    k: BigRational,
    q: BigRational,
}

fn exact(p: &RegimeParams) -> Option<Exact> {
    Some(Exact {
        alpha: exact_rational(p.alpha)?,
        beta: exact_rational(p.beta)?,
        d: BigRational::from_integer(BigInt::from(p.d)),
        k: exact_rational(p.k)?,
        q: exact_rational(p.q)?,
    })
}

/// lhs > rhs with equality (and anything inside the guard band) false.
fn strictly_greater(lhs: f64, rhs: f64) -> bool {
    lhs - rhs > GUARD * lhs.abs().max(rhs.abs()).max(1.0)
}

/// q_c = k(1 − β/(αd+β)).
pub fn q_critical(p: &RegimeParams) -> f64 {
    let ad = p.alpha * p.d as f64;
    p.k * (1.0 - p.beta / (ad + p.beta))
}

/// q < q_c, decided from the q_c form.
pub fn below_critical(p: &RegimeParams) -> bool {
    match exact(p) {
        Some(e) => {
            let ad = &e.alpha * &e.d;
            let qc = &e.k * (BigRational::one() - &e.beta / (&ad + &e.beta));
            e.q < qc
        }
        None => strictly_greater(q_critical(p), p.q),
    }
}

/// k > q(1 + β/(αd)), the hypothesis of the non-existence result.
pub fn blowup_condition(p: &RegimeParams) -> bool {
    match exact(p) {
        Some(e) => {
            let rhs = &e.q * (BigRational::one() + &e.beta / (&e.alpha * &e.d));
            e.k > rhs
        }
        None => {
            let rhs = p.q * (1.0 + p.beta / (p.alpha * p.d as f64));
            strictly_greater(p.k, rhs)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegimeVerdict {
    pub q_c: f64,
    pub q_prime: f64,
    pub q_lo: f64,
    pub q_hi: f64,
    pub blowup_condition: bool,
    pub global_window_nonempty: bool,
    pub q_in_window: bool,
    pub q_prime_ge_1: bool,
}

/// q' = d(k−1)/β and the window (max(d/β, k, q'), αdk(k−1)/β).
pub fn global_window(p: &RegimeParams) -> RegimeVerdict {
    let d = p.d as f64;
    let q_prime = d * (p.k - 1.0) / p.beta;
    let q_lo = (d / p.beta).max(p.k).max(q_prime);
    let q_hi = p.alpha * d * p.k * (p.k - 1.0) / p.beta;
    let (nonempty, inside, qp_ge_1) = match exact(p) {
        Some(e) => {
            let one = BigRational::one();
            let qp = &e.d * (&e.k - &one) / &e.beta;
            let mut lo = &e.d / &e.beta;
            if e.k > lo {
                lo = e.k.clone();
            }
            if qp > lo {
                lo = qp.clone();
            }
            let hi = &e.alpha * &e.d * &e.k * (&e.k - &one) / &e.beta;
            (lo < hi, lo < e.q && e.q < hi, qp >= one)
        }
        None => (
            strictly_greater(q_hi, q_lo),
            strictly_greater(p.q, q_lo) && strictly_greater(q_hi, p.q),
            q_prime >= 1.0 - GUARD,
        ),
    };
    RegimeVerdict {
        q_c: q_critical(p),
        q_prime,
        q_lo,
        q_hi,
        blowup_condition: blowup_condition(p),
        global_window_nonempty: nonempty,
        q_in_window: inside,
        q_prime_ge_1: qp_ge_1,
    }
}

impl RegimeVerdict {
    pub fn global_ok(&self) -> bool {
        self.q_in_window && self.q_prime_ge_1
    }
}

pub const VERDICT_CSV_HEADER: &str = "alpha,beta,d,k,q,q_c,q_prime,q_lo,q_hi,blowup,global_ok";

/// One row of the verdict table; floats use the shortest round-trip form.
pub fn verdict_csv_row(p: &RegimeParams, v: &RegimeVerdict) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        p.alpha,
        p.beta,
        p.d,
        p.k,
        p.q,
        v.q_c,
        v.q_prime,
        v.q_lo,
        v.q_hi,
        v.blowup_condition,
        v.global_ok()
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauRho {
    pub tau: f64,
    pub rho: f64,
    /// k − (1/τ)(d + 1/ρ).
    pub margin: f64,
}

pub fn tau_rho_margin(k: f64, d: usize, tau: f64, rho: f64) -> f64 {
    k - (d as f64 + 1.0 / rho) / tau
}

/// Searches the box (0, d/q) × (0, α/β), shrunk by 1% from its boundary, for
/// the pair with the largest margin. The shrink is halved when the best
/// margin is not positive, up to a depth cap.
pub fn pick_tau_rho(p: &RegimeParams) -> Result<TauRho> {
    p.validate()?;
    if !blowup_condition(p) {
        return Err(Error::Precondition(format!(
            "k = {} does not exceed q(1 + beta/(alpha d)) = {}",
            p.k,
            p.q * (1.0 + p.beta / (p.alpha * p.d as f64))
        )));
    }
    let tau_max = p.d as f64 / p.q;
    let rho_max = p.alpha / p.beta;
    const GRID: usize = 64;
    let mut shrink = 0.01;
    for _ in 0..40 {
        let mut best: Option<TauRho> = None;
        for i in 0..=GRID {
            let tau = tau_max * (shrink + (1.0 - 2.0 * shrink) * i as f64 / GRID as f64);
            for j in 0..=GRID {
                let rho = rho_max * (shrink + (1.0 - 2.0 * shrink) * j as f64 / GRID as f64);
                let m = tau_rho_margin(p.k, p.d, tau, rho);
                if best.is_none_or(|b| m > b.margin) {
                    best = Some(TauRho { tau, rho, margin: m });
                }
            }
        }
        let b = best.expect("grid is non-empty");
        if b.margin > 0.0 {
            return Ok(b);
        }
        shrink *= 0.5;
    }
    Err(Error::Evaluation {
        branch: "pick_tau_rho",
        detail: format!("no feasible (tau, rho) found for {p:?}"),
    })
}

/// Tuples on a fixed lattice used by the equivalence and disjointness sweeps.
pub fn lattice() -> Vec<RegimeParams> {
    let alphas = [0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.75, 0.8, 0.9];
    let betas = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75];
    let ks = [1.5, 2.0, 2.5, 3.0, 4.0, 6.0];
    let qs = [1.0, 1.25, 1.5, 2.0, 2.25, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 8.0];
    let mut out = Vec::new();
    for &alpha in &alphas {
        for &beta in &betas {
            for d in 1..=2 {
                for &k in &ks {
                    for &q in &qs {
                        out.push(RegimeParams { alpha, beta, d, k, q });
                    }
                }
            }
        }
    }
    out
}

/// Converts an exact rational back to f64, used in reports.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rational_recovery() {
        let r = exact_rational(0.8).unwrap();
        assert_eq!(r, BigRational::new(4.into(), 5.into()));
        assert_eq!(exact_rational(2.25).unwrap(), BigRational::new(9.into(), 4.into()));
        assert!(exact_rational(std::f64::consts::PI).is_none());
        assert_eq!(rational_to_f64(&exact_rational(-0.3).unwrap()), -0.3);
    }

    #[test]
    fn critical_examples() {
        let p = RegimeParams::new(0.5, 1.0, 2, 2.0, 1.0).unwrap();
        assert_relative_eq!(q_critical(&p), 1.0, max_relative = 1e-15);
        assert!(!below_critical(&p));
        // αd = 0.5, αd + β = 1
        let p = RegimeParams::new(0.5, 0.5, 1, 3.0, 1.0).unwrap();
        assert_relative_eq!(q_critical(&p), 1.5, max_relative = 1e-15);
    }

    #[test]
    fn blowup_examples() {
        assert!(blowup_condition(&RegimeParams::new(0.8, 1.0, 1, 4.0, 1.0).unwrap()));
        assert!(!blowup_condition(&RegimeParams::new(0.8, 1.0, 1, 2.0, 1.0).unwrap()));
        // exactly on the threshold 2.25
        assert!(!blowup_condition(&RegimeParams::new(0.8, 1.0, 1, 2.25, 1.0).unwrap()));
    }

    #[test]
    fn window_examples() {
        let v = global_window(&RegimeParams::new(0.9, 0.5, 1, 2.0, 3.0).unwrap());
        assert_relative_eq!(v.q_prime, 2.0);
        assert_relative_eq!(v.q_lo, 2.0);
        assert_relative_eq!(v.q_hi, 3.6, max_relative = 1e-15);
        assert!(v.global_window_nonempty && v.q_in_window && v.q_prime_ge_1);
        let v = global_window(&RegimeParams::new(0.5, 0.5, 1, 2.0, 3.0).unwrap());
        assert_relative_eq!(v.q_hi, 2.0);
        assert!(!v.global_window_nonempty);
    }

    #[test]
    fn tau_rho_example() {
        let p = RegimeParams::new(0.8, 1.0, 1, 4.0, 1.0).unwrap();
        let m = tau_rho_margin(4.0, 1, 0.9, 0.7);
        assert_relative_eq!(4.0 - m, (1.0 + 1.0 / 0.7) / 0.9, max_relative = 1e-15);
        let tr = pick_tau_rho(&p).unwrap();
        assert!(tr.margin > 0.0 && tr.tau < 1.0 && tr.rho < 0.8);
        let low = RegimeParams::new(0.8, 1.0, 1, 2.0, 1.0).unwrap();
        assert!(matches!(pick_tau_rho(&low), Err(Error::Precondition(_))));
    }
}
