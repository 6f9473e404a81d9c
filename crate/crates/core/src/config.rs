//! Plain-text run configuration (`section.key = value`), the parameter-tuple
//! CSV format and the spectral-measure spec strings.
//!
//! Measure specs:
//!
//! ```text
//! symmetric                     ν = (δ₊₁ + δ₋₁)/2 on 𝕊⁰
//! two-atom:<w+>,<w->            ν = w+ δ₊₁ + w- δ₋₁
//! uniform                       normalised surface measure
//! atoms:<angle>@<w>;<angle>@<w> point masses on 𝕊¹ (angles in radians)
//! density:<v0>,<v1>,...         256 equispaced density samples on 𝕊¹
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{Grid, InitialData};
use crate::osgood::{OsgoodFunction, TruncationIndex};
use crate::regimes::RegimeParams;
use crate::solver::{Nonlinearity, TimeMesh};
use crate::symbol::{SpectralMeasure, DENSITY_SAMPLES};

/// Every key a run config may contain, in canonical order.
pub const KEYS: &[&str] = &[
    "params.alpha",
    "params.beta",
    "params.d",
    "params.k",
    "params.q",
    "measure.spec",
    "grid.n",
    "grid.L",
    "time.T",
    "time.steps",
    "time.grading",
    "nonlinearity.kind",
    "nonlinearity.lambda",
    "nonlinearity.phi0",
    "nonlinearity.index",
    "u0.kind",
    "u0.tau",
    "u0.radius",
    "u0.value",
    "u0.amplitude",
    "u0.sigma",
    "u0.decay",
    "u0.cutoff",
    "solver.tolerance",
    "solver.max_iter",
    "solver.norm_q",
    "solver.eps",
    "solver.q_prime",
    "osgood.s_min",
    "osgood.s_max",
    "osgood.samples",
    "blowup.t",
    "blowup.eps",
    "blowup.rho",
    "blowup.levels",
    "blowup.base_n",
    "blowup.factor",
    "blowup.min_levels",
    "blowup.control",
    "annulus.rho",
    "annulus.phi_factors",
    "global.fit_from",
    "regimes.tuples",
    "output.dir",
    "output.formats",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    entries: BTreeMap<String, String>,
}

fn key_rank(k: &str) -> usize {
    KEYS.iter().position(|x| *x == k).unwrap_or(usize::MAX)
}

impl RunConfig {
    /// Parses `section.key = value` lines. Blank lines and lines starting
    /// with `#` are skipped. Unknown and repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::config(format!("line {}", lineno + 1), "expected `section.key = value`")
            })?;
            let k = k.trim();
            if cfg.entries.contains_key(k) {
                return Err(Error::config(k, format!("duplicate key on line {}", lineno + 1)));
            }
            cfg.set(k, v.trim())?;
        }
        Ok(cfg)
    }

    /// Sets one key, replacing any earlier value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::config(key, "unknown key"));
        }
        if value.is_empty() {
            return Err(Error::config(key, "empty value"));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Applies a `section.key=value` override.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (k, v) = spec
            .split_once('=')
            .ok_or_else(|| Error::config(spec, "override must look like section.key=value"))?;
        self.set(k.trim(), v.trim())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::config(key, format!("expected {what}, got `{v}`"))),
        }
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>> {
        let v: Option<f64> = self.parsed(key, "a number")?;
        match v {
            Some(x) if !x.is_finite() => Err(Error::config(key, "value must be finite")),
            _ => Ok(v),
        }
    }

    pub fn f64_req(&self, key: &str) -> Result<f64> {
        self.f64_opt(key)?.ok_or_else(|| Error::config(key, "missing field"))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    pub fn usize_opt(&self, key: &str) -> Result<Option<usize>> {
        self.parsed(key, "a non-negative integer")
    }

    pub fn usize_req(&self, key: &str) -> Result<usize> {
        self.usize_opt(key)?.ok_or_else(|| Error::config(key, "missing field"))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.usize_opt(key)?.unwrap_or(default))
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        Ok(self.parsed(key, "true or false")?.unwrap_or(default))
    }

    /// Comma-separated numbers.
    pub fn list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| Error::config(key, format!("bad list entry `{}`", s.trim())))
                })
                .collect(),
        }
    }

    /// d alone, for subcommands that only need the dimension.
    pub fn dim(&self) -> Result<usize> {
        let d = self.usize_req("params.d")?;
        if d != 1 && d != 2 {
            return Err(Error::config("params.d", format!("d must be 1 or 2, got {d}")));
        }
        Ok(d)
    }

    pub fn params(&self) -> Result<RegimeParams> {
        let alpha = self.f64_req("params.alpha")?;
        let beta = self.f64_req("params.beta")?;
        let d = self.dim()?;
        let k = self.f64_req("params.k")?;
        let q = self.f64_req("params.q")?;
        RegimeParams::new(alpha, beta, d, k, q).map_err(|e| Error::config("params", e.to_string()))
    }

    /// The measure spec, defaulting to the symmetric pair in d = 1 and the
    /// uniform measure in d = 2.
    pub fn measure(&self, dim: usize) -> Result<SpectralMeasure> {
        match self.get("measure.spec") {
            Some(s) => parse_measure_spec(s, dim).map_err(|e| Error::config("measure.spec", e.to_string())),
            None if dim == 1 => Ok(SpectralMeasure::symmetric_1d()),
            None => SpectralMeasure::uniform(dim),
        }
    }

    pub fn grid(&self, dim: usize) -> Result<Grid> {
        let n = self.usize_req("grid.n")?;
        let l = self.f64_req("grid.L")?;
        Grid::new(dim, n, l).map_err(|e| Error::config("grid", e.to_string()))
    }

    pub fn mesh(&self) -> Result<TimeMesh> {
        let t = self.f64_req("time.T")?;
        let steps = self.usize_req("time.steps")?;
        let grading = self.f64_or("time.grading", 1.0)?;
        TimeMesh::graded(t, steps, grading).map_err(|e| Error::config("time", e.to_string()))
    }

    pub fn osgood(&self, k: f64) -> Result<OsgoodFunction> {
        let phi0 = self.f64_req("nonlinearity.phi0")?;
        OsgoodFunction::new(k, phi0).map_err(|e| Error::config("nonlinearity.phi0", e.to_string()))
    }

    /// kind ∈ {zero, power, osgood, truncated}; every kind but zero reads
    /// params.k.
    pub fn nonlinearity(&self) -> Result<Nonlinearity> {
        let kind = self.get("nonlinearity.kind").ok_or_else(|| Error::config("nonlinearity.kind", "missing field"))?;
        if kind == "zero" { return Ok(Nonlinearity::zero()) }
        let k = self.f64_req("params.k")?;
        match kind {
            "power" => {
                let lambda = self.f64_req("nonlinearity.lambda")?;
                Ok(Nonlinearity::Power { lambda, k })
            }
            "osgood" => Ok(Nonlinearity::Osgood(self.osgood(k)?)),
            "truncated" => {
                let n = TruncationIndex::new(self.usize_req("nonlinearity.index")?)
                    .map_err(|e| Error::config("nonlinearity.index", e.to_string()))?;
                Ok(Nonlinearity::Truncated(self.osgood(k)?, n))
            }
            other => Err(Error::config("nonlinearity.kind", format!("unknown kind `{other}`"))),
        }
    }

    /// kind ∈ {singular, constant, gaussian, tail}.
    pub fn initial_data(&self, dim: usize) -> Result<InitialData> {
        let kind = self.get("u0.kind").ok_or_else(|| Error::config("u0.kind", "missing field"))?;
        let data = match kind {
            "singular" => InitialData::Singular { tau: self.f64_req("u0.tau")?, radius: self.f64_or("u0.radius", 2.0)? },
            "constant" => InitialData::Constant(self.f64_req("u0.value")?),
            "gaussian" => InitialData::Gaussian {
                amplitude: self.f64_req("u0.amplitude")?,
                sigma: self.f64_req("u0.sigma")?,
            },
            "tail" => InitialData::PowerTail {
                amplitude: self.f64_req("u0.amplitude")?,
                decay: self.f64_req("u0.decay")?,
                cutoff: self.f64_req("u0.cutoff")?,
            },
            other => return Err(Error::config("u0.kind", format!("unknown kind `{other}`"))),
        };
        data.validate(dim).map_err(|e| Error::config("u0", e.to_string()))?;
        Ok(data)
    }

    /// Canonical text with keys in declaration order.
    pub fn resolved(&self) -> String {
        let mut keys: Vec<&String> = self.entries.keys().collect();
        keys.sort_by_key(|k| key_rank(k));
        keys.iter().map(|k| format!("{k} = {}\n", self.entries[*k])).collect()
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }
}

fn number(s: &str, ctx: &str) -> Result<f64> {
    let t = s.trim();
    let bad = || Error::config(ctx, format!("`{t}` is not a number"));
    let plain = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
    // angles may be written pi, pi/x or x*pi, with an optional sign
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, t),
    };
    let v = if body == "pi" {
        sign * PI
    } else if let Some(den) = body.strip_prefix("pi/") {
        sign * PI / plain(den)?
    } else if let Some(num) = body.strip_suffix("*pi") {
        sign * plain(num)? * PI
    } else {
        t.parse::<f64>().map_err(|_| bad())?
    };
    if !v.is_finite() {
        return Err(Error::config(ctx, format!("`{t}` is not finite")));
    }
    Ok(v)
}

pub fn parse_measure_spec(spec: &str, dim: usize) -> Result<SpectralMeasure> {
    let spec = spec.trim();
    let (head, body) = match spec.split_once(':') {
        Some((h, b)) => (h.trim(), Some(b)),
        None => (spec, None),
    };
    let need_dim = |want: usize| -> Result<()> {
        if dim != want {
            return Err(Error::config("measure", format!("`{head}` is a d = {want} measure, run has d = {dim}")));
        }
        Ok(())
    };
    match (head, body) {
        ("symmetric", None) => {
            need_dim(1)?;
            Ok(SpectralMeasure::symmetric_1d())
        }
        ("uniform", None) => SpectralMeasure::uniform(dim),
        ("two-atom", Some(b)) => {
            need_dim(1)?;
            let parts: Vec<&str> = b.split(',').collect();
            if parts.len() != 2 {
                return Err(Error::config("measure.two-atom", "expected two weights"));
            }
            SpectralMeasure::two_atom_1d(number(parts[0], "measure.two-atom")?, number(parts[1], "measure.two-atom")?)
        }
        ("atoms", Some(b)) => {
            let mut angles = Vec::new();
            let mut weights = Vec::new();
            for item in b.split(';') {
                let (a, w) = item
                    .split_once('@')
                    .ok_or_else(|| Error::config("measure.atoms", format!("expected angle@weight, got `{item}`")))?;
                angles.push(number(a, "measure.atoms")?);
                weights.push(number(w, "measure.atoms")?);
            }
            SpectralMeasure::atoms(dim, angles, weights)
        }
        ("density", Some(b)) => {
            need_dim(2)?;
            let samples = b.split(',').map(|s| number(s, "measure.density")).collect::<Result<Vec<_>>>()?;
            if samples.len() != DENSITY_SAMPLES {
                return Err(Error::config(
                    "measure.density",
                    format!("expected {DENSITY_SAMPLES} samples, got {}", samples.len()),
                ));
            }
            SpectralMeasure::tabulated(samples)
        }
        _ => Err(Error::config("measure", format!("unrecognised spec `{spec}`"))),
    }
}

/// Columns of a parameter tuple file, in any order; extra columns are errors.
pub const TUPLE_COLUMNS: [&str; 5] = ["alpha", "beta", "d", "k", "q"];

/// Reads parameter tuples from CSV with a header naming the five columns.
/// Lines starting with `#` are comments.
pub fn parse_tuples(text: &str) -> Result<Vec<RegimeParams>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| Error::config("tuples.header", e.to_string()))?.clone();
    let mut index = [usize::MAX; 5];
    for (j, h) in headers.iter().enumerate() {
        let pos = TUPLE_COLUMNS
            .iter()
            .position(|c| *c == h)
            .ok_or_else(|| Error::config("tuples.header", format!("unknown column `{h}`")))?;
        if index[pos] != usize::MAX {
            return Err(Error::config("tuples.header", format!("repeated column `{h}`")));
        }
        index[pos] = j;
    }
    if let Some(m) = index.iter().position(|i| *i == usize::MAX) {
        return Err(Error::config("tuples.header", format!("missing column `{}`", TUPLE_COLUMNS[m])));
    }
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let path = format!("tuples.row{}", row + 1);
        let rec = rec.map_err(|e| Error::config(&path, e.to_string()))?;
        if rec.len() != 5 {
            return Err(Error::config(&path, format!("expected 5 fields, got {}", rec.len())));
        }
        let v: Vec<f64> = index.iter().map(|&j| number(&rec[j], &path)).collect::<Result<_>>()?;
        let d = v[2];
        if d != 1.0 && d != 2.0 {
            return Err(Error::config(&path, format!("d must be 1 or 2, got {d}")));
        }
        let p = RegimeParams::new(v[0], v[1], d as usize, v[3], v[4]).map_err(|e| Error::config(&path, e.to_string()))?;
        out.push(p);
    }
    Ok(out)
}
