//! Spectral measures on the unit sphere and the operator symbol
//! ψ_β(ξ) = |ξ|^β ω_ν(ξ/|ξ|), with ω_ν(θ) = ∫ |θ·η|^β ν(dη).

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::rgamma;

/// Number of equispaced samples a tabulated circle density is stored with.
pub const DENSITY_SAMPLES: usize = 256;

/// Directions at which ω_ν is cached for tabulated densities.
const OMEGA_CACHE: usize = 4096;

/// A finite measure on 𝕊^{d-1}, d ∈ {1, 2}.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralMeasure {
    /// Point masses. In d = 1 the directions are ±1; in d = 2 each atom is
    /// given by its angle.
    Atoms {
        dim: usize,
        angles: Vec<f64>,
        weights: Vec<f64>,
    },
    /// Normalised surface measure.
    Uniform { dim: usize },
    /// Density on the circle (with respect to arc length) sampled at
    /// `DENSITY_SAMPLES` equispaced angles starting at 0.
    Tabulated { samples: Vec<f64> },
}

impl SpectralMeasure {
    /// ν({+1}) = w_plus, ν({-1}) = w_minus on 𝕊⁰.
    pub fn two_atom_1d(w_plus: f64, w_minus: f64) -> Result<Self> {
        Self::atoms(1, vec![0.0, PI], vec![w_plus, w_minus])
    }

    pub fn symmetric_1d() -> Self {
        SpectralMeasure::Atoms {
            dim: 1,
            angles: vec![0.0, PI],
            weights: vec![0.5, 0.5],
        }
    }

    /// Atoms at the given angles. In d = 1 only the angles 0 (direction +1)
    /// and π (direction −1) are meaningful.
    pub fn atoms(dim: usize, angles: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if angles.is_empty() || angles.len() != weights.len() {
            return Err(Error::domain("atom angles and weights must be non-empty and of equal length"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::domain("atom weights must be finite and strictly positive"));
        }
        if !weights.iter().sum::<f64>().is_finite() {
            return Err(Error::domain("atom weights overflow"));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::domain("atom angles must be finite"));
        }
        if dim == 1 {
            for a in &angles {
                let c = a.cos();
                if (c.abs() - 1.0).abs() > 1e-12 {
                    return Err(Error::domain("1-d atoms must sit at angle 0 (+1) or π (-1)"));
                }
            }
        }
        Ok(SpectralMeasure::Atoms {
            dim,
            angles,
            weights,
        })
    }

    pub fn uniform(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(SpectralMeasure::Uniform { dim })
    }

    /// A density on the circle. Samples must be finite and non-negative with
    /// positive total; strict positivity is what `h2_check` reports on.
    pub fn tabulated(samples: Vec<f64>) -> Result<Self> {
        if samples.len() != DENSITY_SAMPLES {
            return Err(Error::domain(format!(
                "tabulated density needs {DENSITY_SAMPLES} samples, got {}",
                samples.len()
            )));
        }
        if samples.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::domain("density samples must be finite and non-negative"));
        }
        let total = samples.iter().sum::<f64>();
        if total <= 0.0 {
            return Err(Error::domain("density has zero total mass"));
        }
        if !(total * 2.0 * PI).is_finite() {
            return Err(Error::domain("density total mass overflows"));
        }
        Ok(SpectralMeasure::Tabulated { samples })
    }

    /// Samples the density `rho(angle)` at the standard nodes.
    pub fn from_density<F: Fn(f64) -> f64>(rho: F) -> Result<Self> {
        let samples = (0..DENSITY_SAMPLES)
            .map(|j| rho(2.0 * PI * j as f64 / DENSITY_SAMPLES as f64))
            .collect();
        Self::tabulated(samples)
    }

    pub fn dim(&self) -> usize {
        match self {
            SpectralMeasure::Atoms { dim, .. } | SpectralMeasure::Uniform { dim } => *dim,
            SpectralMeasure::Tabulated { .. } => 2,
        }
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            SpectralMeasure::Atoms { weights, .. } => weights.iter().sum(),
            SpectralMeasure::Uniform { .. } => 1.0,
            SpectralMeasure::Tabulated { samples } => {
                samples.iter().sum::<f64>() * 2.0 * PI / DENSITY_SAMPLES as f64
            }
        }
    }

    /// Trigonometric interpolant of a tabulated density.
    pub fn density_at(&self, angle: f64) -> Option<f64> {
        match self {
            SpectralMeasure::Tabulated { samples } => Some(trig_interp(samples, angle)),
            _ => None,
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 2 {
        Ok(())
    } else {
        Err(Error::domain(format!("spectral measures are supported for d ∈ {{1,2}}, got {dim}")))
    }
}

/// Evaluates the trigonometric interpolant through equispaced samples on
/// [0, 2π). An even count uses the symmetric Nyquist convention.
fn trig_interp(samples: &[f64], angle: f64) -> f64 {
    let n = samples.len();
    let nf = n as f64;
    let h = 2.0 * PI / nf;
    let x = angle.rem_euclid(2.0 * PI);
    let mut acc = 0.0;
    for (j, s) in samples.iter().enumerate() {
        let d = x - j as f64 * h;
        let half = 0.5 * d;
        let sh = half.sin();
        let kernel = if sh.abs() < 1e-14 {
            1.0
        } else {
            // Dirichlet kernel for even n: sin(n d/2) cot(d/2) / n
            (nf * half).sin() * half.cos() / (sh * nf)
        };
        acc += s * kernel;
    }
    acc
}

/// The symbol ψ_β together with a cached evaluator of ω_ν.
#[derive(Debug, Clone)]
pub struct Symbol {
    beta: f64,
    measure: SpectralMeasure,
    omega_cache: Option<Vec<f64>>,
    uniform_const: f64,
}

impl Symbol {
    pub fn new(beta: f64, measure: SpectralMeasure) -> Result<Self> {
        if !(beta > 0.0 && beta < 2.0) {
            return Err(Error::domain(format!("beta must lie in (0,2), got {beta}")));
        }
        let uniform_const = match &measure {
            SpectralMeasure::Uniform { dim: 1 } => 1.0,
            // (1/2π) ∫ |cos θ|^β dθ
            SpectralMeasure::Uniform { .. } => {
                rgamma(0.5 * beta + 1.0) / rgamma(0.5 * (beta + 1.0)) / PI.sqrt()
            }
            _ => 0.0,
        };
        let omega_cache = match &measure {
            SpectralMeasure::Tabulated { samples } => Some(build_omega_cache(beta, samples)),
            _ => None,
        };
        Ok(Symbol {
            beta,
            measure,
            omega_cache,
            uniform_const,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dim(&self) -> usize {
        self.measure.dim()
    }

    pub fn measure(&self) -> &SpectralMeasure {
        &self.measure
    }

    /// ω_ν at the direction with the given angle (d = 2) or at ±1 (d = 1,
    /// angle 0 or π).
    pub fn omega_angle(&self, angle: f64) -> f64 {
        let beta = self.beta;
        match &self.measure {
            SpectralMeasure::Atoms { angles, weights, .. } => angles
                .iter()
                .zip(weights)
                .map(|(a, w)| w * (angle - a).cos().abs().powf(beta))
                .sum(),
            SpectralMeasure::Uniform { .. } => self.uniform_const,
            SpectralMeasure::Tabulated { .. } => {
                let cache = self.omega_cache.as_ref().expect("cache built for tabulated density");
                let u = angle.rem_euclid(2.0 * PI) / (2.0 * PI) * OMEGA_CACHE as f64;
                cubic_periodic(cache, u)
            }
        }
    }

    /// ψ_β(ξ) for a frequency vector of length d.
    pub fn psi(&self, xi: &[f64]) -> f64 {
        match xi {
            [x] => self.psi_1d(*x),
            [x, y] => self.psi_2d(*x, *y),
            _ => f64::NAN,
        }
    }

    #[inline]
    pub fn psi_1d(&self, xi: f64) -> f64 {
        if xi == 0.0 {
            return 0.0;
        }
        let dir = if xi > 0.0 { 0.0 } else { PI };
        xi.abs().powf(self.beta) * self.omega_angle(dir)
    }

    #[inline]
    pub fn psi_2d(&self, x: f64, y: f64) -> f64 {
        let r = x.hypot(y);
        if r == 0.0 {
            return 0.0;
        }
        r.powf(self.beta) * self.omega_angle(y.atan2(x))
    }
}

fn build_omega_cache(beta: f64, samples: &[f64]) -> Vec<f64> {
    // ω = |cos|^β ⊛ ρ on the circle. Both factors are expanded in Fourier
    // modes: ρ from its samples, |cos θ|^β from the closed form
    // (1/2π)∫|cos θ|^β e^{-imθ} dθ = Γ(β+1) / (2^β Γ(1+(β+m)/2) Γ(1+(β-m)/2))
    // for even m, zero for odd m.
    let n = samples.len();
    let half = n / 2;
    let g = crate::specfun::rgamma(beta + 1.0).recip() / 2f64.powf(beta);
    let mut modes = Vec::with_capacity(half + 1);
    for m in 0..=half {
        if m % 2 == 1 {
            continue;
        }
        let (mut re, mut im) = (0.0, 0.0);
        for (j, v) in samples.iter().enumerate() {
            let ph = 2.0 * PI * (m * j) as f64 / n as f64;
            re += v * ph.cos();
            im -= v * ph.sin();
        }
        // one-sided real expansion: interior modes appear twice
        let scale = if m == 0 || m == half { 1.0 } else { 2.0 } / n as f64;
        let mf = m as f64;
        let c = g * rgamma(1.0 + 0.5 * (beta + mf)) * rgamma(1.0 + 0.5 * (beta - mf));
        modes.push((mf, re * scale * 2.0 * PI * c, im * scale * 2.0 * PI * c));
    }
    (0..OMEGA_CACHE)
        .map(|i| {
            let th = 2.0 * PI * i as f64 / OMEGA_CACHE as f64;
            modes
                .iter()
                .map(|(m, a, b)| a * (m * th).cos() - b * (m * th).sin())
                .sum()
        })
        .collect()
}

fn cubic_periodic(table: &[f64], u: f64) -> f64 {
    let n = table.len();
    let i = u.floor() as isize;
    let t = u - i as f64;
    let at = |k: isize| table[k.rem_euclid(n as isize) as usize];
    let (p0, p1, p2, p3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
    let l0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    let l1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    let l2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    let l3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    p0 * l0 + p1 * l1 + p2 * l2 + p3 * l3
}

/// ω_ν(θ) for a unit direction θ.
pub fn omega_nu(sym: &Symbol, theta: &[f64]) -> Result<f64> {
    if theta.len() != sym.dim() {
        return Err(Error::domain(format!(
            "direction has {} components, measure lives in d={}",
            theta.len(),
            sym.dim()
        )));
    }
    let norm = theta.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!("direction is not a unit vector (|θ| = {norm})")));
    }
    Ok(match theta {
        [x] => sym.omega_angle(if *x > 0.0 { 0.0 } else { PI }),
        [x, y] => sym.omega_angle(y.atan2(*x)),
        _ => unreachable!(),
    })
}

/// ψ_β(ξ); zero at the origin.
pub fn symbol_psi(sym: &Symbol, xi: &[f64]) -> f64 {
    sym.psi(xi)
}

#[derive(Debug, Clone, Serialize)]
pub struct H2Report {
    pub min_omega: f64,
    pub argmin_angle: f64,
    pub min_density: Option<f64>,
    pub samples: usize,
    pub pass: bool,
}

/// Strict positivity of ν's density (when it has one) and of ω_ν over a
/// direction sweep. Smoothness is not checked.
pub fn h2_check(sym: &Symbol, samples: usize) -> Result<H2Report> {
    if samples < 8 {
        return Err(Error::domain("h2_check needs at least 8 directions"));
    }
    let dirs: Vec<f64> = if sym.dim() == 1 {
        vec![0.0, PI]
    } else {
        (0..samples).map(|j| 2.0 * PI * j as f64 / samples as f64).collect()
    };
    let mut min_omega = f64::INFINITY;
    let mut argmin_angle = 0.0;
    for a in dirs {
        let w = sym.omega_angle(a);
        if w < min_omega {
            min_omega = w;
            argmin_angle = a;
        }
    }
    let min_density = match sym.measure() {
        SpectralMeasure::Tabulated { samples } => Some(samples.iter().cloned().fold(f64::INFINITY, f64::min)),
        SpectralMeasure::Uniform { .. } => Some(1.0),
        SpectralMeasure::Atoms { .. } => None,
    };
    let pass = min_omega > 0.0 && min_density.is_none_or(|m| m > 0.0);
    Ok(H2Report {
        min_omega,
        argmin_angle,
        min_density,
        samples,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn symmetric_1d_omega_is_one() {
        for beta in [0.3, 1.0, 1.7] {
            let s = Symbol::new(beta, SpectralMeasure::symmetric_1d()).unwrap();
            assert_eq!(omega_nu(&s, &[1.0]).unwrap(), 1.0);
            assert_eq!(omega_nu(&s, &[-1.0]).unwrap(), 1.0);
        }
        let s = Symbol::new(1.5, SpectralMeasure::symmetric_1d()).unwrap();
        assert_relative_eq!(symbol_psi(&s, &[2.0]), 2f64.powf(1.5), max_relative = 1e-15);
        assert_eq!(symbol_psi(&s, &[0.0]), 0.0);
    }

    #[test]
    fn two_atom_2d_example() {
        let m = SpectralMeasure::atoms(2, vec![0.0, PI / 2.0], vec![0.7, 0.3]).unwrap();
        let s = Symbol::new(1.0, m).unwrap();
        let th = [0.5f64.sqrt(), 0.5f64.sqrt()];
        let w = omega_nu(&s, &th).unwrap();
        assert_relative_eq!(w, 0.5f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(symbol_psi(&s, &[3.0, 3.0]), 18f64.sqrt() * w, max_relative = 1e-14);
        let r = h2_check(&s, 360).unwrap();
        assert!(r.pass);
        assert_relative_eq!(r.min_omega, 0.3, max_relative = 1e-12);
        assert_relative_eq!(r.argmin_angle.cos().abs(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn uniform_2d_is_constant() {
        let s = Symbol::new(1.0, SpectralMeasure::uniform(2).unwrap()).unwrap();
        // (1/2π)∫|cos| = 2/π
        assert_relative_eq!(s.omega_angle(0.3), 2.0 / PI, max_relative = 1e-14);
        let r = h2_check(&s, 64).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn tabulated_uniform_matches_closed_form() {
        let m = SpectralMeasure::from_density(|_| 1.0 / (2.0 * PI)).unwrap();
        for beta in [0.5, 1.0, 1.5] {
            let s = Symbol::new(beta, m.clone()).unwrap();
            let u = Symbol::new(beta, SpectralMeasure::uniform(2).unwrap()).unwrap();
            for a in [0.0, 0.4, 2.0, 5.5] {
                assert_relative_eq!(s.omega_angle(a), u.omega_angle(a), max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn tabulated_omega_matches_direct_quadrature() {
        let rho = |a: f64| 1.0 + 0.6 * (2.0 * a).cos() + 0.2 * (a - 0.3).sin();
        let s = Symbol::new(1.3, SpectralMeasure::from_density(rho).unwrap()).unwrap();
        for th in [0.0, 0.7, 2.9, 4.4] {
            let mut pts = vec![0.0, 2.0 * PI];
            for k in [th - PI / 2.0, th + PI / 2.0] {
                pts.push(k.rem_euclid(2.0 * PI));
            }
            pts.sort_by(f64::total_cmp);
            let r = crate::quad::integrate(
                |e: f64| (th - e).cos().abs().powf(1.3) * rho(e),
                &pts,
                0.0,
                1e-13,
                1000,
            );
            assert_relative_eq!(s.omega_angle(th), r.value, max_relative = 1e-9);
        }
    }

    #[test]
    fn tabulated_zero_sample_fails_h2() {
        let mut samples = vec![1.0; DENSITY_SAMPLES];
        samples[17] = 0.0;
        let s = Symbol::new(1.0, SpectralMeasure::tabulated(samples).unwrap()).unwrap();
        let r = h2_check(&s, 64).unwrap();
        assert!(!r.pass);
        assert_eq!(r.min_density, Some(0.0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Symbol::new(2.0, SpectralMeasure::symmetric_1d()).is_err());
        assert!(SpectralMeasure::two_atom_1d(1.0, 0.0).is_err());
        assert!(SpectralMeasure::uniform(3).is_err());
        assert!(SpectralMeasure::tabulated(vec![1.0; 10]).is_err());
        let s = Symbol::new(1.0, SpectralMeasure::uniform(2).unwrap()).unwrap();
        assert!(omega_nu(&s, &[1.0, 1.0]).is_err());
        assert!(h2_check(&s, 4).is_err());
    }

    #[test]
    fn trig_interp_reproduces_low_modes() {
        let f = |a: f64| 2.0 + (3.0 * a).cos() - 0.5 * (7.0 * a).sin();
        let samples: Vec<f64> = (0..DENSITY_SAMPLES)
            .map(|j| f(2.0 * PI * j as f64 / DENSITY_SAMPLES as f64))
            .collect();
        for a in [0.01, 1.0, 3.3, 6.0] {
            assert_relative_eq!(trig_interp(&samples, a), f(a), max_relative = 1e-12);
        }
    }
}
