//! INI-style run configuration: `[section]` headers, `key = value` lines,
//! `#` or `;` comments. Every key is known in advance; the resolved values
//! are echoed in a canonical form whose SHA-256 identifies the run.

use std::collections::BTreeMap;
use std::fmt;

use sha2::{Digest, Sha256};

use crate::experiments::Scenario;
use crate::faddeev::{CouplingPath, GridSpec};
use crate::model::{self, CouplingConfig, MassSet, ModelSpec, Pair, PotentialKind, PotentialSpec};
use crate::twobody;
use crate::variational::BasisSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigErrorKind {
    Parse,
    UnknownKey,
    InvariantViolation,
}

impl ConfigErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            ConfigErrorKind::Parse => "parse-error",
            ConfigErrorKind::UnknownKey => "unknown-key",
            ConfigErrorKind::InvariantViolation => "invariant-violation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub kind: ConfigErrorKind,
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: `{}`", self.kind.name(), self.key)?;
        if let Some(l) = self.line {
            write!(f, " (line {l})")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Absolute(f64),
    /// Multiple of the pair's own threshold `λ*`.
    Ratio(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairConfig {
    pub kind: PotentialKind,
    pub depth: f64,
    pub range: f64,
    pub table: Vec<(f64, f64)>,
    pub coupling: Coupling,
    pub configured: bool,
}

impl Default for PairConfig {
    fn default() -> Self {
        Self { kind: PotentialKind::Gaussian, depth: 0.0, range: 1.0, table: Vec::new(), coupling: Coupling::Absolute(0.0), configured: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Numerics {
    pub radial_nodes: usize,
    pub momentum_nodes: usize,
    pub momentum_breaks: Vec<f64>,
    pub angle_nodes: usize,
    pub check_angles: bool,
    pub basis_scales: usize,
    /// Basis length range in units of the largest potential range.
    pub basis_min: f64,
    pub basis_max: f64,
    pub correlations: usize,
    pub stochastic: usize,
    pub seed: Option<u64>,
    pub tol: f64,
    pub gram_floor: f64,
    pub symmetrize: bool,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            radial_nodes: 24,
            momentum_nodes: 24,
            momentum_breaks: model::DEFAULT_MOMENTUM_BREAKS.to_vec(),
            angle_nodes: 32,
            check_angles: true,
            basis_scales: 18,
            basis_min: 0.05,
            basis_max: 3e3,
            correlations: 3,
            stochastic: 0,
            seed: None,
            tol: 1e-6,
            gram_floor: 1e-12,
            symmetrize: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub scenario: Option<Scenario>,
    pub path: CouplingPath,
    pub values: Vec<f64>,
    /// Radii in units of the largest potential range.
    pub radii: Vec<f64>,
    /// Energy targets in units of the largest depth.
    pub targets: Vec<f64>,
    pub floor: f64,
    pub ceiling: f64,
    pub eps_num: f64,
    pub bracket: Option<(f64, f64)>,
    pub pair: Pair,
    pub k_list: Vec<f64>,
    pub z_list: Vec<f64>,
    pub xi_list: Vec<f64>,
    pub eps0: f64,
    pub merkuriev_radius: f64,
    pub require_resonance: bool,
}

impl Default for Experiment {
    fn default() -> Self {
        Self {
            scenario: None,
            path: CouplingPath::Overall,
            values: Vec::new(),
            radii: vec![10.0, 30.0],
            targets: vec![-1e-1, -1e-2, -1e-3, -1e-4],
            floor: 0.25,
            ceiling: 0.1,
            eps_num: crate::variational::EPS_NUM,
            bracket: None,
            pair: Pair::P12,
            k_list: vec![1e-2, 1e-3, 1e-4],
            z_list: vec![1e-3, 1e-2, 1e-1, 1.0],
            xi_list: vec![0.5, 1.0, 10.0],
            eps0: 1.0,
            merkuriev_radius: 1.0,
            require_resonance: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub masses: [f64; 3],
    pub margin_epsilon: f64,
    pub pairs: [PairConfig; 3],
    pub numerics: Numerics,
    pub experiment: Experiment,
    lines: BTreeMap<String, usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            masses: [1.0; 3],
            margin_epsilon: 0.1,
            pairs: Default::default(),
            numerics: Numerics::default(),
            experiment: Experiment::default(),
            lines: BTreeMap::new(),
        }
    }
}

fn fnum(x: f64) -> String {
    format!("{x:.16e}")
}

fn flist(v: &[f64]) -> String {
    v.iter().map(|x| fnum(*x)).collect::<Vec<_>>().join(", ")
}

fn parse_f64(key: &str, line: usize, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v.trim().parse().map_err(|_| ConfigError { kind: ConfigErrorKind::Parse, key: key.into(), line: Some(line), message: format!("`{v}` is not a number") })?;
    if !x.is_finite() {
        return Err(ConfigError { kind: ConfigErrorKind::Parse, key: key.into(), line: Some(line), message: format!("`{v}` is not finite") });
    }
    Ok(x)
}

fn parse_list(key: &str, line: usize, v: &str) -> Result<Vec<f64>, ConfigError> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| parse_f64(key, line, s)).collect()
}

fn parse_usize(key: &str, line: usize, v: &str) -> Result<usize, ConfigError> {
    v.trim().parse().map_err(|_| ConfigError { kind: ConfigErrorKind::Parse, key: key.into(), line: Some(line), message: format!("`{v}` is not a non-negative integer") })
}

fn parse_bool(key: &str, line: usize, v: &str) -> Result<bool, ConfigError> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(ConfigError { kind: ConfigErrorKind::Parse, key: key.into(), line: Some(line), message: format!("`{v}` is not a boolean") }),
    }
}

fn pair_section(section: &str) -> Option<Pair> {
    section.strip_prefix("model.pair").and_then(Pair::parse)
}

fn parse_path(key: &str, line: usize, v: &str) -> Result<CouplingPath, ConfigError> {
    match v.trim() {
        "overall" => Ok(CouplingPath::Overall),
        other => other
            .strip_prefix("lambda")
            .and_then(Pair::parse)
            .map(CouplingPath::Single)
            .ok_or_else(|| ConfigError { kind: ConfigErrorKind::Parse, key: key.into(), line: Some(line), message: format!("path `{other}` is not overall, lambda12, lambda13 or lambda23") }),
    }
}

impl RunConfig {
    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut section = String::new();
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split(['#', ';']).next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| ConfigError { kind: ConfigErrorKind::Parse, key: content.into(), line: Some(line), message: "unterminated section header".into() })?;
                let name = name.trim().to_string();
                let known = matches!(name.as_str(), "model" | "numerics" | "experiment") || pair_section(&name).is_some();
                if !known {
                    return Err(ConfigError { kind: ConfigErrorKind::UnknownKey, key: name, line: Some(line), message: "unknown section".into() });
                }
                section = name;
                continue;
            }
            let (k, v) = content.split_once('=').ok_or_else(|| ConfigError { kind: ConfigErrorKind::Parse, key: content.into(), line: Some(line), message: "expected `key = value`".into() })?;
            let k = k.trim();
            let v = v.trim();
            if section.is_empty() {
                return Err(ConfigError { kind: ConfigErrorKind::Parse, key: k.into(), line: Some(line), message: "key outside any section".into() });
            }
            let full = format!("{section}.{k}");
            if let Some(prev) = seen.insert(full.clone(), line) {
                return Err(ConfigError { kind: ConfigErrorKind::Parse, key: full, line: Some(line), message: format!("duplicate key, first set on line {prev}") });
            }
            cfg.set(&section, k, v, &full, line)?;
        }
        cfg.lines = seen;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Command-line `--seed` and `--tol`; applied before hashing.
    pub fn apply_overrides(&mut self, seed: Option<u64>, tol: Option<f64>) -> Result<(), ConfigError> {
        if let Some(s) = seed {
            self.numerics.seed = Some(s);
        }
        if let Some(t) = tol {
            self.numerics.tol = t;
        }
        self.validate()
    }

    pub fn parse_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError { kind: ConfigErrorKind::Parse, key: path.display().to_string(), line: None, message: format!("cannot read: {e}") })?;
        Self::parse_str(&text)
    }

    fn set(&mut self, section: &str, k: &str, v: &str, full: &str, line: usize) -> Result<(), ConfigError> {
        let unknown = || ConfigError { kind: ConfigErrorKind::UnknownKey, key: full.into(), line: Some(line), message: "no such key".into() };
        if let Some(pair) = pair_section(section) {
            let p = &mut self.pairs[pair.index()];
            p.configured = true;
            match k {
                "kind" => {
                    p.kind = PotentialKind::parse(v).ok_or_else(|| ConfigError { kind: ConfigErrorKind::Parse, key: full.into(), line: Some(line), message: format!("unknown potential `{v}`") })?;
                }
                "depth" => p.depth = parse_f64(full, line, v)?,
                "range" => p.range = parse_f64(full, line, v)?,
                "coupling" => p.coupling = Coupling::Absolute(parse_f64(full, line, v)?),
                "coupling_ratio" => p.coupling = Coupling::Ratio(parse_f64(full, line, v)?),
                "table" => {
                    p.table = v
                        .split(',')
                        .map(|entry| {
                            let (r, val) = entry.split_once(':').ok_or_else(|| ConfigError { kind: ConfigErrorKind::Parse, key: full.into(), line: Some(line), message: format!("table entry `{entry}` is not `r:value`") })?;
                            Ok((parse_f64(full, line, r)?, parse_f64(full, line, val)?))
                        })
                        .collect::<Result<_, _>>()?;
                }
                _ => return Err(unknown()),
            }
            return Ok(());
        }
        match section {
            "model" => match k {
                "masses" => {
                    let m = parse_list(full, line, v)?;
                    if m.len() != 3 {
                        return Err(ConfigError { kind: ConfigErrorKind::Parse, key: full.into(), line: Some(line), message: "expected three masses".into() });
                    }
                    self.masses = [m[0], m[1], m[2]];
                }
                "margin_epsilon" => self.margin_epsilon = parse_f64(full, line, v)?,
                _ => return Err(unknown()),
            },
            "numerics" => {
                let n = &mut self.numerics;
                match k {
                    "radial_nodes" => n.radial_nodes = parse_usize(full, line, v)?,
                    "momentum_nodes" => n.momentum_nodes = parse_usize(full, line, v)?,
                    "momentum_breaks" => n.momentum_breaks = parse_list(full, line, v)?,
                    "angle_nodes" => n.angle_nodes = parse_usize(full, line, v)?,
                    "check_angles" => n.check_angles = parse_bool(full, line, v)?,
                    "basis_scales" => n.basis_scales = parse_usize(full, line, v)?,
                    "basis_min" => n.basis_min = parse_f64(full, line, v)?,
                    "basis_max" => n.basis_max = parse_f64(full, line, v)?,
                    "correlations" => n.correlations = parse_usize(full, line, v)?,
                    "stochastic" => n.stochastic = parse_usize(full, line, v)?,
                    "seed" => {
                        n.seed = Some(v.parse().map_err(|_| ConfigError { kind: ConfigErrorKind::Parse, key: full.into(), line: Some(line), message: format!("`{v}` is not a u64") })?)
                    }
                    "tol" => n.tol = parse_f64(full, line, v)?,
                    "gram_floor" => n.gram_floor = parse_f64(full, line, v)?,
                    "symmetrize" => n.symmetrize = parse_bool(full, line, v)?,
                    _ => return Err(unknown()),
                }
            }
            "experiment" => {
                let e = &mut self.experiment;
                match k {
                    "scenario" => {
                        e.scenario = Some(Scenario::parse(v).ok_or_else(|| ConfigError { kind: ConfigErrorKind::Parse, key: full.into(), line: Some(line), message: format!("unknown scenario `{v}`") })?)
                    }
                    "path" => e.path = parse_path(full, line, v)?,
                    "values" => e.values = parse_list(full, line, v)?,
                    "radii" => e.radii = parse_list(full, line, v)?,
                    "targets" => e.targets = parse_list(full, line, v)?,
                    "floor" => e.floor = parse_f64(full, line, v)?,
                    "ceiling" => e.ceiling = parse_f64(full, line, v)?,
                    "eps_num" => e.eps_num = parse_f64(full, line, v)?,
                    "bracket" => {
                        let b = parse_list(full, line, v)?;
                        if b.len() != 2 {
                            return Err(ConfigError { kind: ConfigErrorKind::Parse, key: full.into(), line: Some(line), message: "expected `lo, hi`".into() });
                        }
                        e.bracket = Some((b[0], b[1]));
                    }
                    "pair" => {
                        e.pair = Pair::parse(v).ok_or_else(|| ConfigError { kind: ConfigErrorKind::Parse, key: full.into(), line: Some(line), message: format!("unknown pair `{v}`") })?
                    }
                    "k_list" => e.k_list = parse_list(full, line, v)?,
                    "z_list" => e.z_list = parse_list(full, line, v)?,
                    "xi_list" => e.xi_list = parse_list(full, line, v)?,
                    "eps0" => e.eps0 = parse_f64(full, line, v)?,
                    "merkuriev_radius" => e.merkuriev_radius = parse_f64(full, line, v)?,
                    "require_resonance" => e.require_resonance = parse_bool(full, line, v)?,
                    _ => return Err(unknown()),
                }
            }
            _ => return Err(unknown()),
        }
        Ok(())
    }

    fn invariant(&self, key: &str, message: String) -> ConfigError {
        ConfigError { kind: ConfigErrorKind::InvariantViolation, key: key.into(), line: self.lines.get(key).copied(), message }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        for (i, m) in self.masses.iter().enumerate() {
            if !(*m > 0.0) {
                return Err(self.invariant("model.masses", format!("mass {} must be positive, got {m}", i + 1)));
            }
        }
        if !(self.margin_epsilon > 0.0) {
            return Err(self.invariant("model.margin_epsilon", "must be positive".into()));
        }
        for pair in Pair::ALL {
            let p = &self.pairs[pair.index()];
            let key = |k: &str| format!("model.pair{}.{k}", pair.label());
            if p.kind == PotentialKind::Tabulated {
                if let Err(e) = PotentialSpec::tabulated(p.table.clone()) {
                    return Err(self.invariant(&key("table"), e.to_string()));
                }
            } else {
                if !(p.depth >= 0.0) {
                    return Err(self.invariant(&key("depth"), format!("must be non-negative, got {}", p.depth)));
                }
                if !(p.range > 0.0) {
                    return Err(self.invariant(&key("range"), format!("must be positive, got {}", p.range)));
                }
            }
            let (ck, c) = match p.coupling {
                Coupling::Absolute(c) => ("coupling", c),
                Coupling::Ratio(c) => ("coupling_ratio", c),
            };
            if !(c >= 0.0) {
                return Err(self.invariant(&key(ck), format!("must be non-negative, got {c}")));
            }
        }
        let n = &self.numerics;
        for (k, v) in [("numerics.tol", n.tol), ("numerics.gram_floor", n.gram_floor), ("experiment.eps_num", self.experiment.eps_num)] {
            if !(v > 0.0) {
                return Err(self.invariant(k, format!("tolerance must be positive, got {v}")));
            }
        }
        if n.radial_nodes < 4 || n.momentum_nodes < 2 || n.angle_nodes < 2 {
            return Err(self.invariant("numerics.radial_nodes", "grids need at least 4 radial, 2 momentum and 2 angle nodes".into()));
        }
        let b = &n.momentum_breaks;
        if b.len() < 2 || b[0] != 0.0 || b.windows(2).any(|w| w[1] <= w[0]) || !b.contains(&1.0) {
            return Err(self.invariant("numerics.momentum_breaks", "must increase from 0 and contain 1".into()));
        }
        if !(n.basis_min > 0.0 && n.basis_max > n.basis_min) {
            return Err(self.invariant("numerics.basis_min", "need 0 < basis_min < basis_max".into()));
        }
        if !(1..=3).contains(&n.correlations) {
            return Err(self.invariant("numerics.correlations", "must be 1, 2 or 3".into()));
        }
        if n.stochastic > 0 && n.seed.is_none() {
            return Err(self.invariant("numerics.stochastic", "stochastic widths need numerics.seed".into()));
        }
        let e = &self.experiment;
        if e.radii.iter().any(|r| !(*r >= 0.0)) {
            return Err(self.invariant("experiment.radii", "radii must be non-negative".into()));
        }
        if !(e.floor > 0.0 && e.floor <= 1.0) || !(e.ceiling > 0.0 && e.ceiling < 1.0) {
            return Err(self.invariant("experiment.floor", "floor in (0, 1] and ceiling in (0, 1) required".into()));
        }
        if e.targets.iter().any(|t| !(*t < 0.0)) {
            return Err(self.invariant("experiment.targets", "energy targets must be negative".into()));
        }
        if let Some((lo, hi)) = e.bracket {
            if !(hi > lo) {
                return Err(self.invariant("experiment.bracket", format!("need lo < hi, got [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    /// Canonical dump of every resolved key.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        out.push_str("[model]\n");
        out.push_str(&format!("masses = {}\n", flist(&self.masses)));
        out.push_str(&format!("margin_epsilon = {}\n", fnum(self.margin_epsilon)));
        for pair in Pair::ALL {
            let p = &self.pairs[pair.index()];
            if !p.configured {
                continue;
            }
            out.push_str(&format!("[model.pair{}]\n", pair.label()));
            out.push_str(&format!("kind = {}\n", p.kind.name()));
            if p.kind == PotentialKind::Tabulated {
                let t: Vec<String> = p.table.iter().map(|(r, v)| format!("{}:{}", fnum(*r), fnum(*v))).collect();
                out.push_str(&format!("table = {}\n", t.join(", ")));
            } else {
                out.push_str(&format!("depth = {}\nrange = {}\n", fnum(p.depth), fnum(p.range)));
            }
            match p.coupling {
                Coupling::Absolute(c) => out.push_str(&format!("coupling = {}\n", fnum(c))),
                Coupling::Ratio(c) => out.push_str(&format!("coupling_ratio = {}\n", fnum(c))),
            }
        }
        let n = &self.numerics;
        out.push_str("[numerics]\n");
        out.push_str(&format!(
            "radial_nodes = {}\nmomentum_nodes = {}\nmomentum_breaks = {}\nangle_nodes = {}\ncheck_angles = {}\n",
            n.radial_nodes,
            n.momentum_nodes,
            flist(&n.momentum_breaks),
            n.angle_nodes,
            n.check_angles
        ));
        out.push_str(&format!(
            "basis_scales = {}\nbasis_min = {}\nbasis_max = {}\ncorrelations = {}\nstochastic = {}\n",
            n.basis_scales,
            fnum(n.basis_min),
            fnum(n.basis_max),
            n.correlations,
            n.stochastic
        ));
        if let Some(s) = n.seed {
            out.push_str(&format!("seed = {s}\n"));
        }
        out.push_str(&format!("tol = {}\ngram_floor = {}\nsymmetrize = {}\n", fnum(n.tol), fnum(n.gram_floor), n.symmetrize));
        let e = &self.experiment;
        out.push_str("[experiment]\n");
        if let Some(s) = e.scenario {
            out.push_str(&format!("scenario = {}\n", s.name()));
        }
        let path = match e.path {
            CouplingPath::Overall => "overall".to_string(),
            CouplingPath::Single(p) => format!("lambda{}", p.label()),
        };
        out.push_str(&format!("path = {path}\nvalues = {}\nradii = {}\ntargets = {}\n", flist(&e.values), flist(&e.radii), flist(&e.targets)));
        out.push_str(&format!("floor = {}\nceiling = {}\neps_num = {}\n", fnum(e.floor), fnum(e.ceiling), fnum(e.eps_num)));
        if let Some((lo, hi)) = e.bracket {
            out.push_str(&format!("bracket = {}, {}\n", fnum(lo), fnum(hi)));
        }
        out.push_str(&format!(
            "pair = {}\nk_list = {}\nz_list = {}\nxi_list = {}\neps0 = {}\nmerkuriev_radius = {}\nrequire_resonance = {}\n",
            e.pair.label(),
            flist(&e.k_list),
            flist(&e.z_list),
            flist(&e.xi_list),
            fnum(e.eps0),
            fnum(e.merkuriev_radius),
            e.require_resonance
        ));
        out
    }

    /// SHA-256 of [`echo`](Self::echo), hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.echo().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn potential(&self, pair: Pair) -> crate::Result<PotentialSpec> {
        let p = &self.pairs[pair.index()];
        if !p.configured {
            return Ok(PotentialSpec::zero());
        }
        match p.kind {
            PotentialKind::Tabulated => PotentialSpec::tabulated(p.table.clone()),
            k => PotentialSpec::new(k, p.depth, p.range),
        }
    }

    /// Resolved model; ratio couplings are converted with the pair
    /// threshold on the configured radial grid.
    pub fn model(&self) -> crate::Result<ModelSpec> {
        let masses = MassSet::new(self.masses[0], self.masses[1], self.masses[2])?;
        let pots = [self.potential(Pair::P12)?, self.potential(Pair::P13)?, self.potential(Pair::P23)?];
        let mut c = [0.0; 3];
        let template = ModelSpec::new(masses, pots.clone(), CouplingConfig::new(0.0, 0.0, 0.0, self.margin_epsilon)?);
        for pair in Pair::ALL {
            c[pair.index()] = match self.pairs[pair.index()].coupling {
                Coupling::Absolute(x) => x,
                Coupling::Ratio(0.0) => 0.0,
                Coupling::Ratio(r) => {
                    let pot = template.frame_potential(pair);
                    r * twobody::critical_coupling(&pot, &model::radial_grid(&pot, self.numerics.radial_nodes), 1e-6)?
                }
            };
        }
        Ok(ModelSpec::new(masses, pots, CouplingConfig::new(c[0], c[1], c[2], self.margin_epsilon)?))
    }

    pub fn grid_spec(&self) -> GridSpec {
        let n = &self.numerics;
        GridSpec { radial_nodes: n.radial_nodes, momentum_nodes: n.momentum_nodes, momentum_breaks: n.momentum_breaks.clone(), angle_nodes: n.angle_nodes, check_angles: n.check_angles }
    }

    pub fn basis_spec(&self, model: &ModelSpec) -> BasisSpec {
        let n = &self.numerics;
        let range = model.max_range();
        BasisSpec { min_scale: n.basis_min * range, max_scale: n.basis_max * range, n_scales: n.basis_scales, correlations: n.correlations, stochastic: n.stochastic, seed: n.seed }
    }

    pub fn line_of(&self, key: &str) -> Option<usize> {
        self.lines.get(key).copied()
    }
}
