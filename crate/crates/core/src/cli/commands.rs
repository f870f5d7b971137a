//! Subcommand bodies. Each returns a complete table; stderr notes and the
//! inconclusive flag travel alongside it.

use std::path::Path;

use super::config::RunConfig;
use super::csv::{float, pass_fail, Table};
use super::store::ResultStore;
use super::CliError;
use crate::experiments::{self, couplings_on, DichotomyConfig, Scenario, Verdict};
use crate::faddeev::{self, CouplingPath, RadiusScan, EXTRAPOLATION_Z, OFF_PAIRS};
use crate::model::{self, ModelSpec, Pair};
use crate::twobody::{self, Margins};
use crate::variational::{build_basis, VariationalProblem};

#[derive(Debug)]
pub struct Outcome {
    pub table: Table,
    pub notes: Vec<String>,
    pub inconclusive: bool,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Self { table, notes: Vec::new(), inconclusive: false }
    }
}

type Res = Result<Outcome, CliError>;

fn couplings_header() -> [&'static str; 3] {
    ["lambda12", "lambda13", "lambda23"]
}

fn pair_grid(model: &ModelSpec, pair: Pair, cfg: &RunConfig) -> (model::PotentialSpec, crate::quadrature::Grid1d) {
    let pot = model.frame_potential(pair);
    let grid = model::radial_grid(&pot, cfg.numerics.radial_nodes);
    (pot, grid)
}

fn interacting_pot(model: &ModelSpec, pair: Pair, cfg: &RunConfig) -> Result<(model::PotentialSpec, crate::quadrature::Grid1d), CliError> {
    let (pot, grid) = pair_grid(model, pair, cfg);
    if pot.is_zero() {
        return Err(CliError::Usage(format!("pair {} has no potential; set experiment.pair", pair.label())));
    }
    Ok((pot, grid))
}

fn problem(cfg: &RunConfig) -> Result<VariationalProblem, CliError> {
    let model = cfg.model()?;
    let basis = build_basis(&cfg.basis_spec(&model), &model.masses)?;
    Ok(VariationalProblem::with_options(&model, basis, cfg.numerics.gram_floor, cfg.numerics.symmetrize)?)
}

fn scaled(list: &[f64], unit: f64) -> Vec<f64> {
    list.iter().map(|x| x * unit).collect()
}

pub fn two_body_threshold(cfg: &RunConfig) -> Res {
    let model = cfg.model()?;
    let pair = cfg.experiment.pair;
    let (pot, grid) = interacting_pot(&model, pair, cfg)?;
    let tol = cfg.numerics.tol;
    let star = twobody::critical_coupling(&pot, &grid, tol)?;
    let raw = model.potential(pair);
    let mut t = Table::new(&["potential", "depth", "range", "lambda_star", "tol"]);
    t.push(vec![raw.kind.name().into(), float(raw.depth), float(raw.range), float(star), float(tol)]);
    Ok(t.into())
}

pub fn two_body_mu_curve(cfg: &RunConfig) -> Res {
    let model = cfg.model()?;
    let pair = cfg.experiment.pair;
    let (pot, grid) = interacting_pot(&model, pair, cfg)?;
    let lambda = model.coupling(pair);
    let mus = twobody::mu_curve(&pot, lambda, &grid, &cfg.experiment.k_list)?;
    let mut t = Table::new(&["k", "coupling", "mu"]);
    for (k, mu) in cfg.experiment.k_list.iter().zip(mus) {
        t.push(vec![float(*k), float(lambda), float(mu)]);
    }
    Ok(t.into())
}

pub fn two_body_classify(cfg: &RunConfig) -> Res {
    let model = cfg.model()?;
    let margins = Margins { epsilon: model.couplings.margin_epsilon, resonance_tol: twobody::RESONANCE_TOL };
    let mut t = Table::new(&["pair", "potential", "coupling", "lambda_star", "ratio", "class"]);
    for pair in Pair::ALL {
        let (pot, grid) = pair_grid(&model, pair, cfg);
        if pot.is_zero() {
            continue;
        }
        let lambda = model.coupling(pair);
        let star = twobody::critical_coupling(&pot, &grid, cfg.numerics.tol)?;
        let class = twobody::classify_pair(&pot, lambda, margins, &grid)?;
        t.push(vec![pair.label().into(), pot.kind.name().into(), float(lambda), float(star), float(lambda / star), class.name().into()]);
    }
    Ok(t.into())
}

pub fn two_body_w_probe(cfg: &RunConfig) -> Res {
    let model = cfg.model()?;
    let (pot, grid) = interacting_pot(&model, cfg.experiment.pair, cfg)?;
    let res = twobody::resonance_data(&pot, &grid)?;
    let rows = twobody::w_decomposition_probe(&res, &cfg.experiment.k_list)?;
    let mut t = Table::new(&["k", "a", "mu", "norm_w", "ak_norm_w", "norm_z", "gap"]);
    for r in rows {
        t.push(vec![float(r.k), float(res.a_coefficient), float(r.mu), float(r.norm_w), float(r.ak_norm_w), float(r.norm_z), float(r.gap)]);
    }
    Ok(t.into())
}

pub fn three_body_ground(cfg: &RunConfig) -> Res {
    let p = problem(cfg)?;
    let c = p.model.couplings.as_array();
    let gs = p.solve(c)?;
    let radii = scaled(&cfg.experiment.radii, p.model.max_range());
    let probe = crate::variational::probability_profile(&gs, &radii)?;
    let mut t = Table::new(&["lambda12", "lambda13", "lambda23", "energy", "threshold", "binding", "bound_states", "basis_size", "retained", "radius", "probability"]);
    for (r, pr) in probe.radii.iter().zip(&probe.probabilities) {
        t.push(vec![
            float(c[0]),
            float(c[1]),
            float(c[2]),
            float(gs.energy),
            float(gs.threshold),
            float(gs.energy - gs.threshold),
            gs.bound_energies.len().to_string(),
            p.basis.len().to_string(),
            p.retained.to_string(),
            float(*r),
            float(*pr),
        ]);
    }
    let mut out: Outcome = t.into();
    if !gs.is_bound() {
        out.notes.push("ground state is not below the continuum threshold".into());
    }
    Ok(out)
}

fn sweep_header(n_radii: usize) -> Vec<String> {
    let mut h: Vec<String> = ["index", "parameter"].iter().map(|s| s.to_string()).collect();
    h.extend(couplings_header().iter().map(|s| s.to_string()));
    h.extend(["energy", "threshold", "bs_radius", "bound_states"].iter().map(|s| s.to_string()));
    h.extend((1..=n_radii).map(|i| format!("p{i}")));
    h
}

fn sweep_row(r: &experiments::SweepRow) -> Vec<String> {
    let mut row = vec![r.index.to_string(), float(r.parameter)];
    row.extend(r.couplings.iter().map(|c| float(*c)));
    row.extend([float(r.energy), float(r.threshold), float(r.bs_radius), r.bound_states.to_string()]);
    row.extend(r.probabilities.iter().map(|p| float(*p)));
    row
}

pub fn three_body_sweep(cfg: &RunConfig, store: Option<&Path>) -> Res {
    let p = problem(cfg)?;
    let e = &cfg.experiment;
    if e.values.is_empty() {
        return Err(CliError::Usage("experiment.values is empty".into()));
    }
    let template = p.model.couplings.as_array();
    let radii = scaled(&e.radii, p.model.max_range());
    let scan = RadiusScan::new(&p.model, e.path, &cfg.grid_spec())?;
    let header = sweep_header(radii.len());
    match store {
        None => {
            let rows = experiments::sweep(&p, Some(&scan), template, e.path, &e.values, &radii)?;
            let mut t = Table::with_header(header);
            rows.iter().for_each(|r| t.push(sweep_row(r)));
            Ok(t.into())
        }
        Some(path) => {
            let mut st = ResultStore::open(path, &cfg.hash())?;
            let resumed = st.len();
            for (i, &s) in e.values.iter().enumerate() {
                if st.contains(i) {
                    continue;
                }
                let r = experiments::sweep_point(&p, Some(&scan), template, e.path, i, s, &radii)?;
                st.append(i, sweep_row(&r))?;
            }
            let mut out: Outcome = st.table(header).into();
            if resumed > 0 {
                out.notes.push(format!("resumed {resumed} stored points from {}", path.display()));
            }
            Ok(out)
        }
    }
}

pub fn three_body_dichotomy(cfg: &RunConfig, scenario: Option<Scenario>) -> Res {
    let scenario = scenario.or(cfg.experiment.scenario).ok_or_else(|| CliError::Usage("no scenario: pass --scenario or set experiment.scenario".into()))?;
    let p = problem(cfg)?;
    let model = &p.model;
    let e = &cfg.experiment;
    let (template, path) = if cfg.line_of("experiment.path").is_some() {
        (model.couplings.as_array(), e.path)
    } else {
        let stars = experiments::pair_thresholds(model, cfg.numerics.radial_nodes)?;
        experiments::default_path(scenario, stars.map(|s| if s.is_finite() { s } else { 0.0 }))
    };
    let mut dc = DichotomyConfig::for_model(model);
    let range = model.max_range();
    let depth = model.potentials.iter().map(|p| p.depth).fold(0.0, f64::max);
    if let Some(r0) = e.radii.first() {
        dc.r0 = r0 * range;
        dc.r1 = e.radii.get(1).map_or(3.0 * dc.r0, |r1| r1 * range);
    }
    dc.targets = scaled(&e.targets, depth);
    dc.floor = e.floor;
    dc.ceiling = e.ceiling;
    dc.eps_num = e.eps_num;
    let report = experiments::spreading_dichotomy(&p, scenario, template, path, &dc)?;
    let mut t = Table::new(&["scenario", "path", "step", "parameter", "lambda12", "lambda13", "lambda23", "energy", "threshold", "binding", "r0", "p_r0", "r1", "p_r1"]);
    let label = experiments::path_label(path);
    for (i, pt) in report.points.iter().enumerate() {
        t.push(vec![
            scenario.name().into(),
            label.clone(),
            i.to_string(),
            float(pt.parameter),
            float(pt.couplings[0]),
            float(pt.couplings[1]),
            float(pt.couplings[2]),
            float(pt.energy),
            float(pt.threshold),
            float(pt.energy - pt.threshold),
            float(report.r0),
            float(pt.p_r0),
            float(report.r1),
            float(pt.p_r1),
        ]);
    }
    Ok(Outcome { table: t, notes: vec![format!("verdict: {}", report.verdict.name())], inconclusive: report.verdict == Verdict::Inconclusive })
}

pub fn three_body_efimov(cfg: &RunConfig) -> Res {
    let p = problem(cfg)?;
    let table = experiments::efimov_scan(&p, p.model.couplings.as_array(), cfg.experiment.require_resonance)?;
    let mut t = Table::new(&["level", "energy", "threshold", "binding", "ratio_to_next"]);
    for (i, e) in table.levels.iter().enumerate() {
        let ratio = table.ratios.get(i).copied().unwrap_or(f64::NAN);
        t.push(vec![i.to_string(), float(*e), float(table.threshold), float(e - table.threshold), float(ratio)]);
    }
    let mut out: Outcome = t.into();
    out.notes.push(format!("bound states: {}", table.count()));
    Ok(out)
}

pub fn three_body_theta0(cfg: &RunConfig) -> Res {
    let p = problem(cfg)?;
    let e = &cfg.experiment;
    let bracket = e.bracket.ok_or_else(|| CliError::Usage("theta0 needs experiment.bracket".into()))?;
    let th = experiments::find_theta0(&p, p.model.couplings.as_array(), e.path, bracket, cfg.numerics.tol, experiments::CROSSING_LEVEL)?;
    let mut t = Table::new(&["path", "theta0", "energy", "threshold", "level", "iterations"]);
    t.push(vec![experiments::path_label(e.path), float(th.theta0), float(th.energy), float(th.threshold), float(experiments::CROSSING_LEVEL), th.iterations.to_string()]);
    Ok(t.into())
}

pub fn three_body_bs_radius(cfg: &RunConfig) -> Res {
    let model = cfg.model()?;
    let e = &cfg.experiment;
    let scan = RadiusScan::new(&model, e.path, &cfg.grid_spec())?;
    let template = model.couplings.as_array();
    let values = if e.values.is_empty() {
        match e.path {
            CouplingPath::Overall => vec![1.0],
            CouplingPath::Single(p) => vec![template[p.index()]],
        }
    } else {
        e.values.clone()
    };
    let mut t = Table::new(&["parameter", "lambda12", "lambda13", "lambda23", "z1", "radius_z1", "z2", "radius_z2", "radius_extrapolated"]);
    for s in values {
        let c = couplings_on(e.path, template, s);
        let r = [scan.radius_at(s, 0)?, scan.radius_at(s, 1)?];
        let r0 = faddeev::extrapolate_to_zero(EXTRAPOLATION_Z, r);
        t.push(vec![float(s), float(c[0]), float(c[1]), float(c[2]), float(EXTRAPOLATION_Z[0]), float(r[0]), float(EXTRAPOLATION_Z[1]), float(r[1]), float(r0)]);
    }
    Ok(t.into())
}

pub fn three_body_cross_validate(cfg: &RunConfig) -> Res {
    let p = problem(cfg)?;
    let e = &cfg.experiment;
    let bracket = e.bracket.ok_or_else(|| CliError::Usage("cross-validate needs experiment.bracket".into()))?;
    let cv = experiments::cross_validate(&p, e.path, &cfg.grid_spec(), bracket, &e.values, cfg.numerics.tol)?;
    let mut t = Table::new(&["kind", "scale", "radius", "energy", "threshold", "status"]);
    t.push(vec!["bs-threshold".into(), float(cv.bs.scale), float(1.0), float(f64::NAN), float(f64::NAN), format!("evaluations={}", cv.bs.evaluations)]);
    t.push(vec!["variational-theta0".into(), float(cv.variational.theta0), float(f64::NAN), float(cv.variational.energy), float(cv.variational.threshold), format!("iterations={}", cv.variational.iterations)]);
    t.push(vec!["relative-difference".into(), float(cv.relative_difference), float(f64::NAN), float(f64::NAN), float(f64::NAN), String::new()]);
    for r in &cv.rows {
        let status = match (r.decided, r.consistent) {
            (false, _) => "undecided",
            (true, true) => "consistent",
            (true, false) => "inconsistent",
        };
        t.push(vec!["scan".into(), float(r.scale), float(r.radius), float(r.energy), float(r.threshold), status.into()]);
    }
    let mut out: Outcome = t.into();
    out.notes.push(format!("sign violations: {}", cv.sign_violations()));
    Ok(out)
}

pub fn checks_bounds(cfg: &RunConfig) -> Res {
    let model = cfg.model()?;
    let spec = cfg.grid_spec();
    let e = &cfg.experiment;
    let mut t = Table::new(&["check", "item", "z", "value", "bound", "status"]);
    for &z in e.z_list.iter().filter(|z| **z > 0.0 && **z <= 1.0) {
        for (a, b) in OFF_PAIRS {
            let (pa, pb) = (Pair::ALL[a], Pair::ALL[b]);
            if model.frame_potential(pa).is_zero() || model.frame_potential(pb).is_zero() {
                continue;
            }
            let r = faddeev::hs_norm_k2(&model, pa, pb, z, &spec)?;
            t.push(vec!["hs-bound".into(), format!("{}-{}", pa.label(), pb.label()), float(z), float(r.hs_norm_sq), float(r.bound), pass_fail(r.pass())]);
        }
    }
    let mut zs: Vec<f64> = e.z_list.clone();
    zs.sort_by(f64::total_cmp);
    let z_pairs: Vec<(f64, f64)> = zs.windows(2).map(|w| (w[0], w[1])).collect();
    for r in faddeev::continuity_check(&model, &z_pairs, &spec)? {
        if model.frame_potential(r.a).is_zero() || model.frame_potential(r.b).is_zero() {
            continue;
        }
        t.push(vec!["continuity".into(), format!("{}-{}:{}", r.a.label(), r.b.label(), float(r.z1)), float(r.z2), float(r.norm_diff), float(r.bound), pass_fail(r.pass())]);
    }
    for pair in Pair::ALL {
        let (pot, grid) = pair_grid(&model, pair, cfg);
        if pot.is_zero() {
            continue;
        }
        match faddeev::subthreshold_bound_check(&pot, model.coupling(pair), model.couplings.margin_epsilon, &e.z_list, &grid) {
            Ok(rep) => {
                for r in &rep.rows {
                    let status = if r.value <= r.bound + rep.tol {
                        pass_fail(true)
                    } else if rep.saturated && r.value <= 1.0 + rep.tol {
                        "saturated".into()
                    } else {
                        pass_fail(false)
                    };
                    t.push(vec!["subthreshold".into(), pair.label().into(), float(r.z), float(r.value), float(r.bound), status]);
                }
            }
            Err(crate::Error::PreconditionViolation(msg)) => {
                t.push(vec!["subthreshold".into(), pair.label().into(), float(f64::NAN), float(f64::NAN), float(f64::NAN), format!("skipped: {msg}")]);
            }
            Err(err) => return Err(err.into()),
        }
    }
    for r in faddeev::green6_bound_check(&e.xi_list)? {
        t.push(vec!["green6-bound".into(), "xi".into(), float(r.xi), float(r.g0), float(r.bound), pass_fail(r.pass())]);
    }
    Ok(t.into())
}

pub fn checks_green6(cfg: &RunConfig) -> Res {
    let mut t = Table::new(&["xi", "g0", "bound", "status"]);
    for r in faddeev::green6_bound_check(&cfg.experiment.xi_list)? {
        t.push(vec![float(r.xi), float(r.g0), float(r.bound), pass_fail(r.pass())]);
    }
    Ok(t.into())
}

/// z grid for the log-divergence fit when `experiment.z_list` is not set.
pub fn default_jlog_z() -> Vec<f64> {
    (0..=12).map(|i| 10f64.powf(-4.0 + 0.25 * i as f64)).collect()
}

pub fn checks_jlog(cfg: &RunConfig) -> Res {
    let model = cfg.model()?;
    let pot = model.potential(cfg.experiment.pair);
    if pot.is_zero() {
        return Err(CliError::Usage(format!("pair {} has no potential; set experiment.pair", cfg.experiment.pair.label())));
    }
    let z = if cfg.line_of("experiment.z_list").is_some() { cfg.experiment.z_list.clone() } else { default_jlog_z() };
    let rep = faddeev::j_epsilon_divergence(pot, cfg.experiment.eps0, &z)?;
    let mut t = Table::new(&["z", "log_inv_z", "j", "lower_bound", "status"]);
    for r in &rep.rows {
        t.push(vec![float(r.z), float((1.0 / r.z).ln()), float(r.j), float(r.lower_bound), pass_fail(r.j >= r.lower_bound)]);
    }
    let mut out: Outcome = t.into();
    out.notes.push(format!("fit: slope {:.6e}, intercept {:.6e}, r_squared {:.8}", rep.slope, rep.intercept, rep.r_squared));
    Ok(out)
}

pub fn checks_merkuriev(cfg: &RunConfig) -> Res {
    let mut t = Table::new(&["k", "r", "closed_form", "quadrature", "abs_diff"]);
    for r in experiments::merkuriev_spreading(&cfg.experiment.k_list, cfg.experiment.merkuriev_radius)? {
        t.push(vec![float(r.k), float(r.r), float(r.closed_form), float(r.quadrature), float((r.closed_form - r.quadrature).abs())]);
    }
    Ok(t.into())
}
