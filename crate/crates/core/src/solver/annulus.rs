//! Lower bound for z = S(t)u₀ with u₀ = |x|^{−τ} 𝟙_{B(0,R)} on the annulus
//! t^{α/β} ≤ |x| ≤ t^ρ for t ≤ (φ/M)^{−1/(τρ)}.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{sample_u0, Field, InitialData};
use crate::kernels::KernelSet;

/// Slack applied to every discrete lower-bound comparison.
pub const ANNULUS_SLACK: f64 = 5e-2;

const SPHERE_TIMES: usize = 41;
const REGION_TIMES: usize = 24;

fn log_lattice(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 || lo == hi {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

/// Times of the lattice used for M: log-spaced in [1e−4, 1].
pub fn sphere_times() -> Vec<f64> {
    log_lattice(1e-4, 1.0, SPHERE_TIMES)
}

fn sphere_points(z: &Field) -> Vec<usize> {
    let g = z.grid();
    let h = g.h();
    (0..g.len()).filter(|i| (g.radius(*i) - 1.0).abs() <= 0.5 * h).collect()
}

/// M = min over the unit sphere and the time lattice of z(t, x̂), with the
/// time at which it is attained.
pub fn sphere_minimum(ks: &KernelSet, u0: &Field, times: &[f64]) -> Result<(f64, f64)> {
    let mut best = (f64::INFINITY, f64::NAN);
    let mut pts: Option<Vec<usize>> = None;
    for &t in times {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::domain(format!("sphere lattice times must lie in (0,1], got {t}")));
        }
        let z = ks.s_apply(t, u0)?;
        let idx = pts.get_or_insert_with(|| sphere_points(&z));
        if idx.is_empty() {
            return Err(Error::Resolution("no grid point lies on the unit sphere".into()));
        }
        for &i in idx.iter() {
            if z.values()[i] < best.0 {
                best = (z.values()[i], t);
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Serialize)]
pub struct AnnulusReport {
    pub m: f64,
    pub m_time: f64,
    pub phi: f64,
    pub t_bound: f64,
    pub samples: usize,
    /// min over samples of z/φ.
    pub worst_ratio: f64,
    pub worst_t: f64,
    pub worst_x: f64,
    pub pass: bool,
    /// min of z / (|x|^{−τ} M) over |x| ≤ 1, t ≤ |x|^{β/α}.
    pub intermediate_worst: f64,
    pub intermediate_samples: usize,
    pub intermediate_pass: bool,
}

pub fn annulus_bound_check(ks: &KernelSet, data: &InitialData, rho: f64, phi: f64) -> Result<AnnulusReport> {
    let (tau, _radius) = match *data {
        InitialData::Singular { tau, radius } => (tau, radius),
        _ => return Err(Error::domain("the annulus bound needs the singular initial datum")),
    };
    let ab = ks.alpha() / ks.beta();
    if !(rho > 0.0 && rho < ab) {
        return Err(Error::domain(format!("rho must lie in (0, alpha/beta = {ab}), got {rho}")));
    }
    let g = *ks.grid();
    if g.half_width() <= 1.0 {
        return Err(Error::Resolution("domain does not contain the unit sphere".into()));
    }
    let u0 = sample_u0(&g, data)?;
    let (m, m_time) = sphere_minimum(ks, &u0, &sphere_times())?;
    if !(m > 0.0) {
        return Err(Error::Consistency(format!("sphere minimum M = {m} is not positive")));
    }
    if phi < m * (1.0 - 1e-12) {
        return Err(Error::Precondition(format!("phi = {phi} is below M = {m}")));
    }
    let t_bound = (phi / m).powf(-1.0 / (tau * rho)).min(1.0);
    let h = g.h();
    let t_lo = (8.0 * h).powf(1.0 / rho);
    if !(t_lo < t_bound) {
        return Err(Error::Resolution(format!(
            "annulus for t <= {t_bound:.3e} is thinner than the grid resolves (h = {h:.3e})"
        )));
    }
    let mut samples = 0;
    let mut worst = (f64::INFINITY, f64::NAN, f64::NAN);
    for t in log_lattice(t_lo, t_bound, REGION_TIMES) {
        let z = ks.s_apply(t, &u0)?;
        let (r_in, r_out) = (t.powf(ab), t.powf(rho));
        for (i, v) in z.values().iter().enumerate() {
            let r = g.radius(i);
            if r >= r_in && r <= r_out {
                samples += 1;
                let ratio = v / phi;
                if ratio < worst.0 {
                    worst = (ratio, t, r);
                }
            }
        }
    }
    if samples == 0 {
        return Err(Error::Resolution("no grid point falls inside the annulus".into()));
    }
    let mut inter_samples = 0;
    let mut inter_worst = f64::INFINITY;
    for t in sphere_times() {
        let z = ks.s_apply(t, &u0)?;
        let r_in = t.powf(ab);
        for (i, v) in z.values().iter().enumerate() {
            let r = g.radius(i);
            if r >= r_in && r <= 1.0 && r > 0.0 {
                inter_samples += 1;
                inter_worst = inter_worst.min(v / (r.powf(-tau) * m));
            }
        }
    }
    Ok(AnnulusReport {
        m,
        m_time,
        phi,
        t_bound,
        samples,
        worst_ratio: worst.0,
        worst_t: worst.1,
        worst_x: worst.2,
        pass: worst.0 >= 1.0 - ANNULUS_SLACK,
        intermediate_worst: inter_worst,
        intermediate_samples: inter_samples,
        intermediate_pass: inter_worst >= 1.0 - ANNULUS_SLACK,
    })
}
