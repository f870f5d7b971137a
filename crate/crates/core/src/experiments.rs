//! Threshold tuning, spreading along coupling paths, the double-resonance
//! level scan, the hyperradial model family and the two-solver comparison.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::faddeev::{self, CouplingPath, GridSpec, RadiusScan, ThresholdResult};
use crate::model::{self, ModelSpec, Pair};
use crate::quadrature;
use crate::twobody::{self, Margins, PairClass};
use crate::variational::{self, probability_profile, VariationalProblem, EPS_NUM};

/// Energies below this (relative to the continuum) count as clearly bound.
pub const CLEARLY_BOUND: f64 = 1e-4;

/// Couplings at parameter `s` on `path` from `template`.
pub fn couplings_on(path: CouplingPath, template: [f64; 3], s: f64) -> [f64; 3] {
    let mut c = template;
    match path {
        CouplingPath::Overall => c.iter_mut().for_each(|x| *x *= s),
        CouplingPath::Single(p) => c[p.index()] = s,
    }
    c
}

/// `E_gr - E_thr` at one path point.
fn binding(problem: &VariationalProblem, couplings: [f64; 3]) -> Result<(f64, f64)> {
    let e = problem.lowest(couplings)?;
    let thr = problem.threshold(couplings)?;
    Ok((e, thr))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta0 {
    pub theta0: f64,
    pub energy: f64,
    pub threshold: f64,
    pub iterations: usize,
}

/// Path parameter where the variational ground state crosses
/// `E_thr - level`, by bisection. `lo` must be unbound (`E ≥ E_thr - level`)
/// and `hi` clearly bound.
pub fn find_theta0(problem: &VariationalProblem, template: [f64; 3], path: CouplingPath, bracket: (f64, f64), tol: f64, level: f64) -> Result<Theta0> {
    let (mut lo, mut hi) = bracket;
    if !(hi > lo) || !(tol > 0.0) {
        return Err(Error::BracketInvalid(format!("[{lo}, {hi}] with tol {tol}")));
    }
    let f = |s: f64| -> Result<(f64, f64)> { binding(problem, couplings_on(path, template, s)) };
    let (elo, tlo) = f(lo)?;
    if elo < tlo - level {
        return Err(Error::BracketInvalid(format!("already bound at {lo}: E - E_thr = {:e}", elo - tlo)));
    }
    let (ehi, thi) = f(hi)?;
    if ehi >= thi - CLEARLY_BOUND.max(level) {
        return Err(Error::BracketInvalid(format!("not clearly bound at {hi}: E - E_thr = {:e}", ehi - thi)));
    }
    let mut iterations = 0;
    let mut last = (ehi, thi);
    while hi - lo > tol * hi.abs().max(1.0) {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let (e, t) = f(mid)?;
        if e < t - level {
            hi = mid;
            last = (e, t);
        } else {
            lo = mid;
        }
    }
    Ok(Theta0 { theta0: hi, energy: last.0, threshold: last.1, iterations })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    NoPairResonance,
    PairResonance,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::NoPairResonance => "no-pair-resonance",
            Scenario::PairResonance => "pair-resonance",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "no-pair-resonance" => Some(Scenario::NoPairResonance),
            "pair-resonance" => Some(Scenario::PairResonance),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NonSpreading,
    TotallySpreading,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::NonSpreading => "non-spreading",
            Verdict::TotallySpreading => "totally-spreading",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DichotomyConfig {
    pub r0: f64,
    /// Secondary radius, default `3 r0`.
    pub r1: f64,
    /// Target values of `E_gr - E_thr`, approached in the given order.
    pub targets: Vec<f64>,
    pub floor: f64,
    pub ceiling: f64,
    pub eps_num: f64,
}

impl DichotomyConfig {
    /// `r0 = 10 × range`; targets `-10^{-1} … -10^{-4}` times `depth`.
    pub fn for_model(model: &ModelSpec) -> Self {
        let range = model.max_range();
        let depth = model.potentials.iter().filter(|p| !p.is_zero()).map(|p| p.depth.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        Self {
            r0: 10.0 * range,
            r1: 30.0 * range,
            targets: [-1e-1, -1e-2, -1e-3, -1e-4].iter().map(|t| t * depth).collect(),
            floor: 0.25,
            ceiling: 0.1,
            eps_num: EPS_NUM,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint {
    pub parameter: f64,
    pub couplings: [f64; 3],
    pub energy: f64,
    pub threshold: f64,
    pub p_r0: f64,
    pub p_r1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DichotomyReport {
    pub scenario: Scenario,
    pub path: CouplingPath,
    pub template: [f64; 3],
    pub r0: f64,
    pub r1: f64,
    pub points: Vec<PathPoint>,
    pub verdict: Verdict,
}

pub fn path_label(path: CouplingPath) -> String {
    match path {
        CouplingPath::Overall => "overall".into(),
        CouplingPath::Single(p) => format!("lambda{}", p.label()),
    }
}

/// Default template and path of a scenario in units of the pair
/// thresholds: every pair at `0.8 λ*` scaled together, or `λ12 = λ*`,
/// `λ23 = 0.9 λ*` with `λ13` varied.
pub fn default_path(scenario: Scenario, lambda_star: [f64; 3]) -> ([f64; 3], CouplingPath) {
    match scenario {
        Scenario::NoPairResonance => (lambda_star.map(|l| 0.8 * l), CouplingPath::Overall),
        Scenario::PairResonance => ([lambda_star[0], 0.0, 0.9 * lambda_star[2]], CouplingPath::Single(Pair::P13)),
    }
}

/// Pair thresholds `λ*` in the Jacobi variable of each pair.
pub fn pair_thresholds(model: &ModelSpec, radial_nodes: usize) -> Result<[f64; 3]> {
    let mut out = [f64::INFINITY; 3];
    for p in Pair::ALL {
        let pot = model.frame_potential(p);
        if !pot.is_zero() {
            out[p.index()] = twobody::critical_coupling(&pot, &model::radial_grid(&pot, radial_nodes), 1e-6)?;
        }
    }
    Ok(out)
}

fn pair_classes(model: &ModelSpec, couplings: [f64; 3], radial_nodes: usize) -> Result<[PairClass; 3]> {
    let margins = Margins { epsilon: model.couplings.margin_epsilon, resonance_tol: twobody::RESONANCE_TOL };
    let mut out = [PairClass::UnboundWithMargin; 3];
    for p in Pair::ALL {
        let pot = model.frame_potential(p);
        out[p.index()] = twobody::classify_pair(&pot, couplings[p.index()], margins, &model::radial_grid(&pot, radial_nodes))?;
    }
    Ok(out)
}

fn verdict(points: &[PathPoint], cfg: &DichotomyConfig) -> Verdict {
    if points.is_empty() || points.iter().any(|p| p.energy >= p.threshold - cfg.eps_num) {
        return Verdict::Inconclusive;
    }
    let min = points.iter().map(|p| p.p_r0).fold(f64::INFINITY, f64::min);
    if min >= cfg.floor {
        return Verdict::NonSpreading;
    }
    let first = points[0].p_r0;
    let last = points[points.len() - 1].p_r0;
    let monotone = points.windows(2).all(|w| w[1].p_r0 <= w[0].p_r0);
    if monotone && last < cfg.ceiling * first {
        Verdict::TotallySpreading
    } else {
        Verdict::Inconclusive
    }
}

/// Ground state and `P(r0)`, `P(r1)` at each energy target along the path.
/// The path parameter for a target comes from the definite pencil of
/// [`VariationalProblem::scale_for_level`] and is checked against a direct
/// solve.
pub fn spreading_dichotomy(problem: &VariationalProblem, scenario: Scenario, template: [f64; 3], path: CouplingPath, cfg: &DichotomyConfig) -> Result<DichotomyReport> {
    let model = &problem.model;
    let nodes = 48;
    if scenario == Scenario::PairResonance {
        let classes = pair_classes(model, template, nodes)?;
        if classes[0] != PairClass::Resonant {
            return Err(Error::PreconditionViolation(format!("pair 12 must sit at its threshold, classified {}", classes[0].name())));
        }
        if model.potential(Pair::P23).is_zero() || template[2] == 0.0 {
            return Err(Error::PreconditionViolation("pair 23 must interact".into()));
        }
        if path != CouplingPath::Single(Pair::P13) {
            return Err(Error::PreconditionViolation("the pair-resonance path varies lambda13".into()));
        }
    }
    let (base, direction) = match path {
        CouplingPath::Overall => ([0.0; 3], template),
        CouplingPath::Single(p) => {
            let mut b = template;
            b[p.index()] = 0.0;
            let mut d = [0.0; 3];
            d[p.index()] = 1.0;
            (b, d)
        }
    };
    let mut params = Vec::with_capacity(cfg.targets.len());
    for &target in &cfg.targets {
        // the continuum stays at 0 as long as the pairs are unbound; checked below
        let s = problem
            .scale_for_level(base, direction, target)?
            .ok_or_else(|| Error::PathPointUnbound(format!("level {target:e} not reached on path {}", path_label(path))))?;
        params.push(s);
    }
    let points: Vec<Result<PathPoint>> = params
        .iter()
        .map(|&s| {
            let c = couplings_on(path, template, s);
            let classes = pair_classes(model, c, nodes)?;
            for (k, cls) in classes.iter().enumerate() {
                let ok = match scenario {
                    Scenario::NoPairResonance => *cls == PairClass::UnboundWithMargin,
                    Scenario::PairResonance => k == 0 || matches!(cls, PairClass::UnboundWithMargin | PairClass::Subcritical),
                };
                if !ok {
                    return Err(Error::ClassificationDrift(format!("pair {} classified {} at parameter {s}", Pair::ALL[k].label(), cls.name())));
                }
            }
            let gs = problem.solve(c)?;
            if gs.energy >= gs.threshold {
                return Err(Error::PathPointUnbound(format!("E - E_thr = {:e} at parameter {s}", gs.energy - gs.threshold)));
            }
            let probe = probability_profile(&gs, &[cfg.r0, cfg.r1])?;
            Ok(PathPoint { parameter: s, couplings: c, energy: gs.energy, threshold: gs.threshold, p_r0: probe.probabilities[0], p_r1: probe.probabilities[1] })
        })
        .collect();
    let points = points.into_iter().collect::<Result<Vec<_>>>()?;
    let verdict = verdict(&points, cfg);
    Ok(DichotomyReport { scenario, path, template, r0: cfg.r0, r1: cfg.r1, points, verdict })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfimovTable {
    pub couplings: [f64; 3],
    pub threshold: f64,
    /// Bound levels below `E_thr - EPS_NUM`, ascending.
    pub levels: Vec<f64>,
    /// `E_n / E_{n+1}` for consecutive levels measured from the threshold.
    pub ratios: Vec<f64>,
}

impl EfimovTable {
    pub fn count(&self) -> usize {
        self.levels.len()
    }
}

/// Bound levels with at least two resonant pairs. With `require_resonance`
/// false the precondition is skipped, for detuned comparisons.
pub fn efimov_scan(problem: &VariationalProblem, couplings: [f64; 3], require_resonance: bool) -> Result<EfimovTable> {
    if require_resonance {
        let classes = pair_classes(&problem.model, couplings, 48)?;
        let resonant = classes.iter().filter(|c| **c == PairClass::Resonant).count();
        if resonant < 2 {
            return Err(Error::PreconditionViolation(format!("{resonant} resonant pairs, need two")));
        }
    }
    let threshold = problem.threshold(couplings)?;
    let levels: Vec<f64> = problem.spectrum(couplings)?.into_iter().filter(|&e| e < threshold - EPS_NUM).collect();
    let ratios = levels.windows(2).map(|w| (w[0] - threshold) / (w[1] - threshold)).collect();
    Ok(EfimovTable { couplings, threshold, levels, ratios })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MerkurievRow {
    pub k: f64,
    pub r: f64,
    /// `1 - e^{-2kR}`
    pub closed_form: f64,
    pub quadrature: f64,
}

/// `P(R)` for `ψ ∝ ρ^{-5/2} e^{-kρ}`: the six-dimensional volume factor
/// `π³ρ⁵` cancels the power, leaving the radial density `2k e^{-2kρ}`.
pub fn merkuriev_spreading(k_list: &[f64], r: f64) -> Result<Vec<MerkurievRow>> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("R must be positive, got {r}")));
    }
    k_list
        .iter()
        .map(|&k| {
            if !(k > 0.0) {
                return Err(Error::InvalidInput(format!("k must be positive, got {k}")));
            }
            let closed_form = -(-2.0 * k * r).exp_m1();
            let c2 = 2.0 * k / std::f64::consts::PI.powi(3);
            let density = |rho: f64| c2 * rho.powi(-5) * (-2.0 * k * rho).exp() * std::f64::consts::PI.powi(3) * rho.powi(5);
            let quadrature = quadrature::integrate(density, 0.0, r, 1e-15, 1e-13)?;
            Ok(MerkurievRow { k, r, closed_form, quadrature })
        })
        .collect()
}

/// Variational solution and BS radius at one path point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub parameter: f64,
    pub couplings: [f64; 3],
    pub energy: f64,
    pub threshold: f64,
    pub probabilities: Vec<f64>,
    /// Spectral radius at the smallest extrapolation `z`; NaN when a pair is
    /// at or above its threshold.
    pub bs_radius: f64,
    pub bound_states: usize,
}

pub fn sweep_point(problem: &VariationalProblem, scan: Option<&RadiusScan>, template: [f64; 3], path: CouplingPath, index: usize, s: f64, radii: &[f64]) -> Result<SweepRow> {
    let c = couplings_on(path, template, s);
    let gs = problem.solve(c)?;
    let probabilities = if radii.is_empty() { Vec::new() } else { probability_profile(&gs, radii)?.probabilities };
    let bs_radius = match scan {
        Some(scan) => match scan.radius_at(s, 1) {
            Ok(r) => r,
            Err(Error::PairAtOrAboveThreshold { .. }) => f64::NAN,
            Err(e) => return Err(e),
        },
        None => f64::NAN,
    };
    Ok(SweepRow { index, parameter: s, couplings: c, energy: gs.energy, threshold: gs.threshold, probabilities, bs_radius, bound_states: gs.bound_energies.len() })
}

/// Rows for every parameter value, in input order.
pub fn sweep(problem: &VariationalProblem, scan: Option<&RadiusScan>, template: [f64; 3], path: CouplingPath, values: &[f64], radii: &[f64]) -> Result<Vec<SweepRow>> {
    // the probability kernel is parallel already; nesting it slows things down
    values.iter().enumerate().map(|(i, &s)| sweep_point(problem, scan, template, path, i, s, radii)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyRow {
    pub scale: f64,
    pub radius: f64,
    pub energy: f64,
    pub threshold: f64,
    /// `false` only when the radius contradicts a decided sign of the
    /// binding energy; the band `-1e-4 < E - E_thr < -EPS_NUM` is undecided.
    pub consistent: bool,
    pub decided: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub bs: ThresholdResult,
    pub variational: Theta0,
    pub relative_difference: f64,
    pub rows: Vec<ConsistencyRow>,
}

impl CrossValidation {
    pub fn sign_violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.consistent).count()
    }
}

/// Variational crossing level used for the threshold comparison.
pub const CROSSING_LEVEL: f64 = 1e-6;

/// BS critical scale and variational crossing on `path`, plus a sign check
/// of `radius - 1` against `E_gr - E_thr` at each `scan` value.
pub fn cross_validate(problem: &VariationalProblem, path: CouplingPath, grid: &GridSpec, bracket: (f64, f64), scan: &[f64], tol: f64) -> Result<CrossValidation> {
    let template = problem.model.couplings.as_array();
    let bs = faddeev::bs_threshold_coupling(&problem.model, path, tol, grid, None)?;
    let variational = find_theta0(problem, template, path, bracket, tol, CROSSING_LEVEL)?;
    let relative_difference = (variational.theta0 - bs.scale).abs() / bs.scale.abs();
    let radius_scan = RadiusScan::new(&problem.model, path, grid)?;
    let rows: Vec<Result<ConsistencyRow>> = scan
        .par_iter()
        .map(|&s| {
            let radius = radius_scan.extrapolated(s)?;
            let (energy, threshold) = binding(problem, couplings_on(path, template, s))?;
            let gap = energy - threshold;
            let (decided, consistent) = if gap >= -EPS_NUM {
                (true, radius < 1.0)
            } else if gap < -CLEARLY_BOUND {
                (true, radius > 1.0)
            } else {
                (false, true)
            };
            Ok(ConsistencyRow { scale: s, radius, energy, threshold, consistent, decided })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(CrossValidation { bs, variational, relative_difference, rows })
}

/// Bound-state energy of a variational problem at the couplings of its model.
pub fn ground_energy(problem: &VariationalProblem) -> Result<f64> {
    problem.lowest(problem.model.couplings.as_array())
}

pub use variational::hvz_bottom;
