//! Correlated-Gaussian variational solver for `H = -Δ_x - Δ_y - Σ λ_p V_p`
//! in the Jacobi coordinates of pair 12.
//!
//! Basis functions are `exp(-ξᵀ A ξ)` with `ξ = (x, y)` and a 2×2 positive
//! definite `A`; the three spatial components share it. Every matrix element
//! is a Gaussian integral; pair potentials enter through
//! [`PotentialSpec::gaussian_average`].

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::model::{kinematic_rotation, MassSet, ModelSpec, Pair, PotentialSpec};
use crate::quadrature;
use crate::twobody;

/// Energies at or above `-EPS_NUM` (relative to the continuum) count as
/// unbound.
pub const EPS_NUM: f64 = 1e-8;
/// Default Gram floor, relative to the largest eigenvalue.
pub const GRAM_FLOOR: f64 = 1e-12;
const MAX_CONDITION: f64 = 1e14;

/// Symmetric 2×2 width matrix `[[xx, xy], [xy, yy]]`; the Gaussian is
/// `exp(-xx x² - yy y² - 2 xy x·y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Width {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
}

impl Width {
    /// `exp(-a x² - b y² - c x·y)`
    pub fn from_abc(a: f64, b: f64, c: f64) -> Result<Self> {
        let w = Self { xx: a, yy: b, xy: 0.5 * c };
        if !w.is_positive_definite() {
            return Err(Error::InvalidInput(format!("width (a={a}, b={b}, c={c}) is not positive definite")));
        }
        Ok(w)
    }

    /// `x_f²/bx² + y_f²/by²` for frame coordinates `x_f = u·ξ`, `y_f = v·ξ`.
    pub fn from_frame(u: (f64, f64), v: (f64, f64), bx: f64, by: f64) -> Self {
        let (ax, ay) = (1.0 / (bx * bx), 1.0 / (by * by));
        Self { xx: ax * u.0 * u.0 + ay * v.0 * v.0, yy: ax * u.1 * u.1 + ay * v.1 * v.1, xy: ax * u.0 * u.1 + ay * v.0 * v.1 }
    }

    pub fn is_positive_definite(&self) -> bool {
        self.xx > 0.0 && self.yy > 0.0 && self.det() > 0.0 && self.xx.is_finite() && self.yy.is_finite()
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    fn add(&self, o: &Self) -> Self {
        Self { xx: self.xx + o.xx, yy: self.yy + o.yy, xy: self.xy + o.xy }
    }

    /// Image under particle exchange 1 ↔ 2, which flips `x`.
    pub fn exchanged(&self) -> Self {
        Self { xy: -self.xy, ..*self }
    }

    fn eigenvalues(&self) -> (f64, f64) {
        let m = 0.5 * (self.xx + self.yy);
        let d = (0.25 * (self.xx - self.yy).powi(2) + self.xy * self.xy).sqrt();
        let hi = m + d;
        // product form keeps the small eigenvalue accurate
        (self.det() / hi, hi)
    }
}

/// Geometric width grid per frame plus optional seeded random widths.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    pub min_scale: f64,
    pub max_scale: f64,
    pub n_scales: usize,
    /// Number of frames (pair correlations) used, 1 to 3.
    pub correlations: usize,
    pub stochastic: usize,
    pub seed: Option<u64>,
}

impl BasisSpec {
    /// 18 scales over `[0.05, 3·10³] × range` in all three frames.
    pub fn for_range(range: f64) -> Self {
        Self { min_scale: 0.05 * range, max_scale: 3e3 * range, n_scales: 18, correlations: 3, stochastic: 0, seed: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianBasis {
    pub widths: Vec<Width>,
    pub min_scale: f64,
    pub max_scale: f64,
}

impl GaussianBasis {
    pub fn len(&self) -> usize {
        self.widths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.widths.is_empty()
    }

    pub fn from_widths(widths: Vec<Width>) -> Result<Self> {
        if let Some(w) = widths.iter().find(|w| !w.is_positive_definite()) {
            return Err(Error::InvalidInput(format!("width {w:?} is not positive definite")));
        }
        let lengths = widths.iter().map(|w| {
            let (lo, hi) = w.eigenvalues();
            (1.0 / hi.sqrt(), 1.0 / lo.sqrt())
        });
        let (min_scale, max_scale) = lengths.fold((f64::INFINITY, 0.0f64), |acc, (a, b)| (acc.0.min(a), acc.1.max(b)));
        Ok(Self { widths, min_scale, max_scale })
    }
}

const FRAME_ORDER: [Pair; 3] = [Pair::P12, Pair::P23, Pair::P13];

/// Frame `f` directions `(x_f, y_f)` as vectors over the pair-12 `(x, y)`.
fn frame_axes(masses: &MassSet, f: Pair) -> ((f64, f64), (f64, f64)) {
    let (c, s) = kinematic_rotation(masses, Pair::P12, f);
    ((c, s), (-s, c))
}

/// `n_scales²·correlations` geometric widths, then `stochastic` random ones
/// drawn log-uniformly from the same range with a ChaCha8 stream.
pub fn build_basis(spec: &BasisSpec, masses: &MassSet) -> Result<GaussianBasis> {
    if !(spec.min_scale > 0.0 && spec.max_scale > spec.min_scale) {
        return Err(Error::InvalidInput(format!("scale range [{}, {}] is invalid", spec.min_scale, spec.max_scale)));
    }
    if spec.n_scales < 2 || !(1..=3).contains(&spec.correlations) {
        return Err(Error::InvalidInput("need at least 2 scales and 1 to 3 correlations".into()));
    }
    if spec.stochastic > 0 && spec.seed.is_none() {
        return Err(Error::InvalidInput("stochastic refinement needs a seed".into()));
    }
    let ratio = (spec.max_scale / spec.min_scale).powf(1.0 / (spec.n_scales - 1) as f64);
    let scales: Vec<f64> = (0..spec.n_scales).map(|i| spec.min_scale * ratio.powi(i as i32)).collect();
    let mut widths = Vec::with_capacity(spec.n_scales * spec.n_scales * spec.correlations + spec.stochastic);
    for &f in &FRAME_ORDER[..spec.correlations] {
        let (u, v) = frame_axes(masses, f);
        for &bx in &scales {
            for &by in &scales {
                widths.push(Width::from_frame(u, v, bx, by));
            }
        }
    }
    if let Some(seed) = spec.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lmin, lmax) = (spec.min_scale.ln(), spec.max_scale.ln());
        for _ in 0..spec.stochastic {
            let f = FRAME_ORDER[rng.random_range(0..spec.correlations)];
            let bx = rng.random_range(lmin..lmax).exp();
            let by = rng.random_range(lmin..lmax).exp();
            let (u, v) = frame_axes(masses, f);
            widths.push(Width::from_frame(u, v, bx, by));
        }
    }
    let mut basis = GaussianBasis::from_widths(widths)?;
    basis.min_scale = spec.min_scale;
    basis.max_scale = spec.max_scale;
    Ok(basis)
}

struct Elements {
    s: f64,
    t: f64,
    v: [f64; 3],
}

fn elements(a: &Width, b: &Width, pair_w: &[(f64, f64); 3], pots: &[PotentialSpec; 3]) -> Elements {
    let c = a.add(b);
    let det = c.det();
    let (ixx, iyy, ixy) = (c.yy / det, c.xx / det, -c.xy / det);
    let s = (PI * PI / det).powf(1.5);
    // tr(A C^{-1} B)
    let m = [[a.xx * ixx + a.xy * ixy, a.xx * ixy + a.xy * iyy], [a.xy * ixx + a.yy * ixy, a.xy * ixy + a.yy * iyy]];
    let tr = m[0][0] * b.xx + m[0][1] * b.xy + m[1][0] * b.xy + m[1][1] * b.yy;
    let mut v = [0.0; 3];
    for p in 0..3 {
        if pots[p].is_zero() {
            continue;
        }
        let (wx, wy) = pair_w[p];
        let q = wx * wx * ixx + 2.0 * wx * wy * ixy + wy * wy * iyy;
        v[p] = s * pots[p].gaussian_average(1.0 / q);
    }
    Elements { s, t: 6.0 * tr * s, v }
}

/// Matrices of one basis for one mass/potential set, with couplings left
/// free, and their reduction to an orthonormal span.
#[derive(Debug, Clone)]
pub struct VariationalProblem {
    pub basis: GaussianBasis,
    pub model: ModelSpec,
    pub overlap: Matrix,
    pub kinetic: Matrix,
    /// Unit-coupling pair potentials in `Pair::ALL` order.
    pub potentials: [Matrix; 3],
    /// `X` with `Xᵀ S X = 1` on the retained span.
    transform: Matrix,
    t_red: Matrix,
    v_red: [Matrix; 3],
    /// Condition number of the unit-diagonal Gram before regularisation.
    pub raw_condition: f64,
    pub retained: usize,
    pub symmetrized: bool,
}

/// Ground state in a basis, normalised to `cᵀ S c = 1`.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub coefficients: Vec<f64>,
    pub gram: Matrix,
    pub widths: Vec<Width>,
    pub symmetrized: bool,
    /// `cᵀ S c`
    pub normalization: f64,
    /// All variational eigenvalues below `threshold - EPS_NUM`, ascending.
    pub bound_energies: Vec<f64>,
    /// Bottom of the essential spectrum at these couplings.
    pub threshold: f64,
    pub couplings: [f64; 3],
}

impl GroundState {
    pub fn is_bound(&self) -> bool {
        self.energy < self.threshold - EPS_NUM
    }
}

impl VariationalProblem {
    pub fn new(model: &ModelSpec, basis: GaussianBasis) -> Result<Self> {
        Self::with_options(model, basis, GRAM_FLOOR, false)
    }

    /// `symmetrize` projects onto states even under 1 ↔ 2; the model must
    /// then be exchange symmetric.
    pub fn with_options(model: &ModelSpec, basis: GaussianBasis, gram_floor: f64, symmetrize: bool) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::InvalidInput("empty basis".into()));
        }
        let range = model.max_range();
        if basis.min_scale > 0.1 * range * (1.0 + 1e-9) || basis.max_scale < 1e3 * range * (1.0 - 1e-9) {
            return Err(Error::InvalidInput(format!(
                "basis scales [{}, {}] must cover [0.1, 1000] × range {range}",
                basis.min_scale, basis.max_scale
            )));
        }
        if symmetrize {
            let m = &model.masses;
            let p = &model.potentials;
            if m.m1 != m.m2 || p[1] != p[2] || model.couplings.lambda13 != model.couplings.lambda23 {
                return Err(Error::InvalidInput("exchange symmetrisation needs m1 = m2 and identical 13/23 pairs".into()));
            }
        }
        let frame = model.frame(Pair::P12);
        let pair_w = Pair::ALL.map(|p| frame.pair_vector(p));
        let pots = model.potentials.clone();
        let n = basis.len();
        let widths = &basis.widths;
        let rows: Vec<Vec<Elements>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..=i)
                    .map(|j| {
                        let mut e = elements(&widths[i], &widths[j], &pair_w, &pots);
                        if symmetrize {
                            let x = elements(&widths[i], &widths[j].exchanged(), &pair_w, &pots);
                            e.s += x.s;
                            e.t += x.t;
                            // V13 and V23 swap under the exchange
                            e.v[0] += x.v[0];
                            let mixed = 0.5 * (e.v[1] + x.v[1] + e.v[2] + x.v[2]);
                            e.v[1] = mixed;
                            e.v[2] = mixed;
                        }
                        e
                    })
                    .collect()
            })
            .collect();
        let mut overlap = Matrix::zeros(n, n);
        let mut kinetic = Matrix::zeros(n, n);
        let mut potentials = [Matrix::zeros(n, n), Matrix::zeros(n, n), Matrix::zeros(n, n)];
        for (i, row) in rows.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                overlap[(i, j)] = e.s;
                overlap[(j, i)] = e.s;
                kinetic[(i, j)] = e.t;
                kinetic[(j, i)] = e.t;
                for p in 0..3 {
                    potentials[p][(i, j)] = e.v[p];
                    potentials[p][(j, i)] = e.v[p];
                }
            }
        }
        let d: Vec<f64> = (0..n).map(|i| 1.0 / overlap[(i, i)].sqrt()).collect();
        let scaled = |m: &Matrix| Matrix::from_fn(n, n, |i, j| d[i] * m[(i, j)] * d[j]);
        let (ev, u) = linalg::sym_eigen(&scaled(&overlap))?;
        let top = ev[n - 1];
        let bottom = ev[0];
        let raw_condition = if bottom > 0.0 { top / bottom } else { f64::INFINITY };
        let keep: Vec<usize> = (0..n).filter(|&k| ev[k] > gram_floor * top).collect();
        if keep.is_empty() {
            return Err(Error::IllConditionedBasis("no Gram direction survives the floor".into()));
        }
        let kept_condition = top / ev[keep[0]];
        if kept_condition > MAX_CONDITION {
            return Err(Error::IllConditionedBasis(format!("condition number {kept_condition:e} after regularisation")));
        }
        let m = keep.len();
        let transform = Matrix::from_fn(n, m, |i, k| d[i] * u[(i, keep[k])] / ev[keep[k]].sqrt());
        let reduce = |a: &Matrix| {
            let tmp = a * &transform;
            let mut r = transform.transpose() * &tmp;
            // restore exact symmetry
            for i in 0..m {
                for j in 0..i {
                    let s = 0.5 * (r[(i, j)] + r[(j, i)]);
                    r[(i, j)] = s;
                    r[(j, i)] = s;
                }
            }
            r
        };
        let t_red = reduce(&kinetic);
        let v_red = [reduce(&potentials[0]), reduce(&potentials[1]), reduce(&potentials[2])];
        Ok(Self { basis, model: model.clone(), overlap, kinetic, potentials, transform, t_red, v_red, raw_condition, retained: m, symmetrized: symmetrize })
    }

    fn hamiltonian(&self, couplings: [f64; 3]) -> Matrix {
        let m = self.retained;
        Matrix::from_fn(m, m, |i, j| {
            self.t_red[(i, j)] - couplings[0] * self.v_red[0][(i, j)] - couplings[1] * self.v_red[1][(i, j)] - couplings[2] * self.v_red[2][(i, j)]
        })
    }

    /// Variational eigenvalues, ascending.
    pub fn spectrum(&self, couplings: [f64; 3]) -> Result<Vec<f64>> {
        linalg::sym_eigenvalues(&self.hamiltonian(couplings))
    }

    pub fn lowest(&self, couplings: [f64; 3]) -> Result<f64> {
        Ok(self.spectrum(couplings)?[0])
    }

    pub fn threshold(&self, couplings: [f64; 3]) -> Result<f64> {
        hvz_bottom(&self.model.with_couplings(couplings))
    }

    pub fn solve(&self, couplings: [f64; 3]) -> Result<GroundState> {
        let (ev, w) = linalg::sym_eigen(&self.hamiltonian(couplings))?;
        let threshold = self.threshold(couplings)?;
        let n = self.basis.len();
        let mut coefficients: Vec<f64> = (0..n).map(|i| (0..self.retained).map(|k| self.transform[(i, k)] * w[(k, 0)]).sum()).collect();
        if coefficients.iter().sum::<f64>() < 0.0 {
            coefficients.iter_mut().for_each(|c| *c = -*c);
        }
        let sc = linalg::matvec(&self.overlap, &coefficients);
        let normalization = linalg::dot(&coefficients, &sc);
        let bound_energies = ev.iter().copied().filter(|&e| e < threshold - EPS_NUM).collect();
        Ok(GroundState {
            energy: ev[0],
            coefficients,
            gram: self.overlap.clone(),
            widths: self.basis.widths.clone(),
            symmetrized: self.symmetrized,
            normalization,
            bound_energies,
            threshold,
            couplings,
        })
    }

    /// Smallest scale `s` of `direction` on top of `base` at which the lowest
    /// variational eigenvalue reaches `level`, from the definite pencil
    /// `(T - Σ base V - level) u = s (Σ direction V) u`. `None` when the
    /// level is already reached at `s = 0` or never reached.
    pub fn scale_for_level(&self, base: [f64; 3], direction: [f64; 3], level: f64) -> Result<Option<f64>> {
        let m = self.retained;
        let h = self.hamiltonian(base);
        let mut buf: Vec<f64> = (0..m * m).map(|k| h[(k / m, k % m)] - if k / m == k % m { level } else { 0.0 }).collect();
        if linalg::cholesky_in_place(&mut buf, m).is_err() {
            return Ok(None);
        }
        let b = Matrix::from_fn(m, m, |i, j| (0..3).map(|p| direction[p] * self.v_red[p][(i, j)]).sum());
        // L^{-1} B L^{-T}
        let mut cols = vec![0.0; m * m];
        for j in 0..m {
            let mut col: Vec<f64> = (0..m).map(|i| b[(i, j)]).collect();
            linalg::forward_substitute(&buf, m, &mut col);
            for i in 0..m {
                cols[i * m + j] = col[i];
            }
        }
        let mut red = Matrix::zeros(m, m);
        for i in 0..m {
            let mut row: Vec<f64> = cols[i * m..(i + 1) * m].to_vec();
            linalg::forward_substitute(&buf, m, &mut row);
            for j in 0..m {
                red[(i, j)] = row[j];
            }
        }
        for i in 0..m {
            for j in 0..i {
                let s = 0.5 * (red[(i, j)] + red[(j, i)]);
                red[(i, j)] = s;
                red[(j, i)] = s;
            }
        }
        let ev = linalg::sym_eigenvalues(&red)?;
        let top = ev[m - 1];
        Ok(if top > 0.0 { Some(1.0 / top) } else { None })
    }
}

pub fn solve_ground(model: &ModelSpec, basis: GaussianBasis) -> Result<GroundState> {
    VariationalProblem::new(model, basis)?.solve(model.couplings.as_array())
}

/// `min(0, lowest two-body energy)`, each pair by shooting in its own
/// Jacobi variable.
pub fn hvz_bottom(model: &ModelSpec) -> Result<f64> {
    let mut e = 0.0f64;
    for pair in Pair::ALL {
        let lam = model.coupling(pair);
        let pot = model.frame_potential(pair);
        if lam == 0.0 || pot.is_zero() {
            continue;
        }
        if let Some(ep) = twobody::shooting_ground_energy(&pot, lam, 1e-12)? {
            e = e.min(ep);
        }
    }
    Ok(e)
}

pub fn bound_state_count(model: &ModelSpec, basis: GaussianBasis) -> Result<usize> {
    let problem = VariationalProblem::new(model, basis)?;
    let c = model.couplings.as_array();
    let thr = problem.threshold(c)?;
    Ok(problem.spectrum(c)?.iter().filter(|&&e| e < thr - EPS_NUM).count())
}

/// `g(t) = 1 - e^{-t}(t² + 2t + 2)/2`, the regularised `Γ(3, t)` complement.
fn ball_radial(t: f64) -> f64 {
    if t < 1e-3 {
        // series: t³/6 - t⁴/8 + t⁵/20
        t * t * t * (1.0 / 6.0 - t / 8.0 + t * t / 20.0)
    } else {
        1.0 - (-t).exp() * (t * t + 2.0 * t + 2.0) / 2.0
    }
}

/// Fraction of `∫ exp(-ξᵀCξ) d⁶ξ` inside `|ξ| ≤ R`.
pub fn ball_fraction(c: &Width, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Ok(0.0);
    }
    let (n1, n2) = c.eigenvalues();
    if n1 * r * r > 45.0 {
        return Ok(1.0);
    }
    // hyperangle substitution leaves (16/π) ∫ sin²cos² g(κ R²) dθ
    let f = |th: f64| {
        let (s, co) = th.sin_cos();
        let kappa = 1.0 / (co * co / n1 + s * s / n2);
        s * s * co * co * ball_radial(kappa * r * r)
    };
    let v = quadrature::integrate(f, 0.0, 0.5 * PI, 1e-15, 1e-11)?;
    Ok((16.0 / PI * v).clamp(0.0, 1.0))
}

/// `P(R) = ∫_{|ξ|≤R} |ψ|² d⁶ξ` for the normalised ground state.
pub fn probability_inside(gs: &GroundState, r: f64) -> Result<f64> {
    Ok(probability_profile(gs, &[r])?.probabilities[0])
}

/// Localisation probabilities at several radii.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadingProbe {
    pub radii: Vec<f64>,
    pub probabilities: Vec<f64>,
}

pub fn probability_profile(gs: &GroundState, radii: &[f64]) -> Result<SpreadingProbe> {
    let n = gs.widths.len();
    let c = &gs.coefficients;
    let norm = gs.normalization;
    let rows: Vec<Result<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![0.0; radii.len()];
            for j in 0..=i {
                let f = if i == j { 1.0 } else { 2.0 };
                let w = f * c[i] * c[j];
                if w == 0.0 {
                    continue;
                }
                let mut pairs = vec![(gs.widths[i].add(&gs.widths[j]), 1.0)];
                if gs.symmetrized {
                    pairs.push((gs.widths[i].add(&gs.widths[j].exchanged()), 1.0));
                }
                for (cw, _) in pairs {
                    let s = (PI * PI / cw.det()).powf(1.5);
                    for (k, &r) in radii.iter().enumerate() {
                        acc[k] += w * s * ball_fraction(&cw, r)?;
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![0.0; radii.len()];
    for row in rows {
        for (t, v) in total.iter_mut().zip(row?) {
            *t += v;
        }
    }
    let probabilities = total.iter().map(|t| (t / norm).clamp(0.0, 1.0)).collect();
    Ok(SpreadingProbe { radii: radii.to_vec(), probabilities })
}
