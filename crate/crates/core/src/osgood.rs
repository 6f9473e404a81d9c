//! The staircase family f^[k], its lower envelope and Lipschitz truncations.
//!
//! Thresholds grow as φ_i = φ_{i-1}^k, so everything is located on log s:
//! log φ_i = k^i log φ₀. On the constant pieces I_i = [φ_{i-1}, φ_i/2] the
//! function equals φ_i − φ_{i-1}; on J_i = (φ_i/2, φ_i) it interpolates
//! linearly up to φ_{i+1} − φ_i.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest threshold index the evaluators will look up.
pub const MAX_INDEX: usize = 4096;

#[derive(Debug, Clone, Copy)]
enum Piece {
    Power,
    Flat(usize),
    Ramp(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OsgoodFunction {
    k: f64,
    phi0: f64,
    log_phi0: f64,
}

/// Truncation level of f_n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationIndex(usize);

impl TruncationIndex {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("truncation index must be at least 1"));
        }
        Ok(TruncationIndex(n))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// ln(e^a − e^b) for a > b.
fn log_diff(a: f64, b: f64) -> f64 {
    a + (-(b - a).exp()).ln_1p()
}

impl OsgoodFunction {
    pub fn new(k: f64, phi0: f64) -> Result<Self> {
        if !(k > 1.0) || !k.is_finite() {
            return Err(Error::domain(format!("k must exceed 1, got {k}")));
        }
        let floor = 2f64.powf(1.0 / (k - 1.0));
        if !(phi0 > floor) || !phi0.is_finite() {
            return Err(Error::domain(format!(
                "phi0 must exceed 2^(1/(k-1)) = {floor}, got {phi0}"
            )));
        }
        Ok(OsgoodFunction { k, phi0, log_phi0: phi0.ln() })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    /// log φ_i.
    pub fn log_phi(&self, i: usize) -> f64 {
        self.k.powi(i as i32) * self.log_phi0
    }

    /// φ_i, infinite once it leaves the floating range.
    pub fn phi(&self, i: usize) -> f64 {
        self.log_phi(i).exp()
    }

    /// log(φ_i − φ_{i-1}) for i ≥ 1, which is also log f(φ_{i-1}).
    pub fn log_step(&self, i: usize) -> f64 {
        debug_assert!(i >= 1);
        log_diff(self.log_phi(i), self.log_phi(i - 1))
    }

    /// Smallest i ≥ 0 with log s < log φ_i, or None when log s < log φ₀ is
    /// false for every index up to MAX_INDEX.
    fn bracket(&self, ls: f64) -> Option<usize> {
        if ls < self.log_phi0 {
            return Some(0);
        }
        let guess = ((ls / self.log_phi0).ln() / self.k.ln()).floor().max(0.0) as usize;
        let mut i = guess.saturating_sub(1);
        while i <= MAX_INDEX {
            if ls < self.log_phi(i) {
                return Some(i);
            }
            i += 1;
        }
        None
    }

    fn log_branch(&self, piece: Piece, ls: f64) -> f64 {
        match piece {
            Piece::Power => {
                let c = (-((1.0 - self.k) * self.log_phi0).exp()).ln_1p();
                c + self.k * ls
            }
            Piece::Flat(i) => self.log_step(i),
            Piece::Ramp(i) => self.log_ramp(i, ls - self.log_phi(i)),
        }
    }

    /// Ramp on J_i at log s = log φ_i + off, off ∈ [−ln 2, 0]. Deep
    /// thresholds leave off with an absolute rounding error of ulp(log φ_i),
    /// so the position is clamped to [0, 1].
    fn log_ramp(&self, i: usize, off: f64) -> f64 {
        let la = self.log_step(i);
        let lb = self.log_step(i + 1);
        let u = (2.0 * off.exp() - 1.0).clamp(0.0, 1.0);
        // ln(u e^{lb} + (1−u) e^{la})
        let a = lb + u.ln();
        let b = la + (1.0 - u).ln();
        let m = a.max(b);
        m + ((a - m).exp() + (b - m).exp()).ln()
    }

    /// log f^[k] at log s. Returns −∞ at s = 0.
    pub fn log_f(&self, ls: f64) -> Result<f64> {
        if ls.is_nan() {
            return Err(Error::domain("log s is NaN"));
        }
        if ls == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        let i = self
            .bracket(ls)
            .ok_or_else(|| Error::domain(format!("log s = {ls} beyond threshold index {MAX_INDEX}")))?;
        let piece = if i == 0 {
            Piece::Power
        } else if ls <= self.log_phi(i) - std::f64::consts::LN_2 {
            Piece::Flat(i)
        } else {
            Piece::Ramp(i)
        };
        Ok(self.log_branch(piece, ls))
    }

    /// f^[k](s) for s ≥ 0.
    pub fn f(&self, s: f64) -> Result<f64> {
        if s < 0.0 || s.is_nan() {
            return Err(Error::domain(format!("f^[k] needs s >= 0, got {s}")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        Ok(self.log_f(s.ln())?.exp())
    }

    /// Spec-style entry point: with `in_log` the argument is log s and the
    /// result is log f.
    pub fn f_eval(&self, s: f64, in_log: bool) -> Result<f64> {
        if in_log {
            self.log_f(s)
        } else {
            self.f(s)
        }
    }

    /// log f̃^[k] at log s: −∞ below φ₀, log(φ_i − φ_{i-1}) on [φ_{i-1}, φ_i).
    pub fn log_f_tilde(&self, ls: f64) -> Result<f64> {
        if ls.is_nan() {
            return Err(Error::domain("log s is NaN"));
        }
        match self.bracket(ls) {
            Some(0) => Ok(f64::NEG_INFINITY),
            Some(i) => Ok(self.log_step(i)),
            None => Err(Error::domain(format!("log s = {ls} beyond threshold index {MAX_INDEX}"))),
        }
    }

    pub fn f_tilde(&self, s: f64) -> Result<f64> {
        if s < 0.0 || s.is_nan() {
            return Err(Error::domain(format!("f~ needs s >= 0, got {s}")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        Ok(self.log_f_tilde(s.ln())?.exp())
    }

    /// log f_n at log s: log f on s ≤ φ_n and log f(φ_n) beyond.
    pub fn log_f_n(&self, n: TruncationIndex, ls: f64) -> Result<f64> {
        self.log_f(ls.min(self.log_phi(n.get())))
    }

    /// f_n(s): 0 for s < 0, f on [0, φ_n], f(φ_n) beyond.
    pub fn f_n(&self, n: TruncationIndex, s: f64) -> Result<f64> {
        if s.is_nan() {
            return Err(Error::domain("s is NaN"));
        }
        if s <= 0.0 {
            return Ok(0.0);
        }
        Ok(self.log_f_n(n, s.ln())?.exp())
    }

    /// Lipschitz constant of f_n: the largest slope over [0, φ_n].
    pub fn lipschitz(&self, n: TruncationIndex) -> f64 {
        let lc0 = (self.k - 1.0) * self.log_phi0;
        let mut best = self.k.ln() + log_diff(lc0, 0.0);
        for i in 1..=n.get() {
            // 2(φ_{i+1} − 2φ_i + φ_{i-1})/φ_i = 2(φ_{i+1} − φ_i − (φ_i − φ_{i-1}))/φ_i
            let l = std::f64::consts::LN_2 + log_diff(self.log_step(i + 1), self.log_step(i)) - self.log_phi(i);
            best = best.max(l);
        }
        best.exp()
    }

    /// ∫_{I_i} ds / f for block i ≥ 1: (1/2 − r)/(1 − r) with r = φ_{i-1}/φ_i.
    pub fn block_integral(&self, i: usize) -> Result<f64> {
        if i == 0 {
            return Err(Error::domain("blocks are numbered from 1"));
        }
        let r = (self.log_phi(i - 1) - self.log_phi(i)).exp();
        Ok((0.5 - r) / (1.0 - r))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceReport {
    pub blocks: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// Last block contribution; the sums grow without bound when it stays
    /// away from zero.
    pub limit_estimate: f64,
}

pub fn osgood_divergence_report(of: &OsgoodFunction, blocks: usize) -> Result<DivergenceReport> {
    if blocks == 0 {
        return Err(Error::domain("need at least one block"));
    }
    let mut out = Vec::with_capacity(blocks);
    let mut sums = Vec::with_capacity(blocks);
    let mut acc = 0.0;
    for i in 1..=blocks {
        let b = of.block_integral(i)?;
        acc += b;
        out.push(b);
        sums.push(acc);
    }
    Ok(DivergenceReport { limit_estimate: *out.last().unwrap(), blocks: out, partial_sums: sums })
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioReport {
    pub min: f64,
    pub max: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub samples: usize,
    /// Largest ratio found inside each threshold interval that the sweep
    /// covers completely.
    pub block_max: Vec<f64>,
    pub bounded: bool,
}

/// Spread max/min above which a sweep counts as unbounded.
pub const RATIO_SPREAD_CAP: f64 = 1e3;

/// Compares f against f^[k] on a log-spaced sweep of [s_min, s_max]; s = 0 is
/// excluded because both functions vanish there.
pub fn osgood_type_check<F: Fn(f64) -> f64>(
    f: F,
    of: &OsgoodFunction,
    s_min: f64,
    s_max: f64,
    samples: usize,
) -> Result<RatioReport> {
    if !(s_min > 0.0) || !(s_max > s_min) || samples < 2 {
        return Err(Error::domain("sweep needs 0 < s_min < s_max and at least two samples"));
    }
    let (a, b) = (s_min.ln(), s_max.ln());
    let mut min = f64::INFINITY;
    let mut max = 0.0f64;
    let mut block_max: Vec<f64> = Vec::new();
    let mut current: Option<(usize, f64)> = None;
    // Junction points are added so the sweep always sees the ratio at φ_i/2.
    let mut pts: Vec<f64> = (0..samples).map(|j| a + (b - a) * j as f64 / (samples - 1) as f64).collect();
    let mut i = 1;
    while of.log_phi(i) - std::f64::consts::LN_2 < b && i < MAX_INDEX {
        let lh = of.log_phi(i) - std::f64::consts::LN_2;
        if lh > a {
            pts.push(lh);
        }
        i += 1;
    }
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    for ls in pts {
        let s = ls.exp();
        let v = f(s);
        if v.is_nan() || v < 0.0 {
            return Err(Error::domain(format!("f({s}) = {v} is negative")));
        }
        let r = (v.ln() - of.log_f(ls)?).exp();
        min = min.min(r);
        max = max.max(r);
        let blk = of.bracket(ls).unwrap_or(MAX_INDEX);
        match current {
            Some((idx, m)) if idx == blk => current = Some((idx, m.max(r))),
            Some((idx, m)) => {
                if ls > a && idx > 0 && of.log_phi(idx - 1) >= a {
                    block_max.push(m);
                }
                current = Some((blk, r));
            }
            None => current = Some((blk, r)),
        }
    }
    let bounded = min > 0.0 && max.is_finite() && max / min <= RATIO_SPREAD_CAP;
    Ok(RatioReport { min, max, s_min, s_max, samples, block_max, bounded })
}

/// Continuity defect at the junctions φ₀, φ_i/2 and φ_i for i ≤ up_to:
/// largest relative gap between the two adjacent branch formulas evaluated
/// at the junction.
pub fn junction_defect(of: &OsgoodFunction, up_to: usize) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let mut worst: f64 = 0.0;
    let mut gap = |a: f64, b: f64| worst = worst.max((a - b).abs());
    let l0 = of.log_phi(0);
    gap(of.log_branch(Piece::Power, l0), of.log_branch(Piece::Flat(1), l0));
    for i in 1..=up_to {
        let half = of.log_phi(i) - ln2;
        gap(of.log_branch(Piece::Flat(i), half), of.log_ramp(i, -ln2));
        let end = of.log_phi(i);
        gap(of.log_ramp(i, 0.0), of.log_branch(Piece::Flat(i + 1), end));
    }
    worst.exp_m1()
}
