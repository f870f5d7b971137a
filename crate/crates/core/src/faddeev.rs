//! Three-body Birman-Schwinger block system
//! `C_{a;b}(z) = V_a^{1/2} (H0 + z²)^{-1} V_b^{1/2}` in the s-wave mixed
//! representation `(|x_a|, |p_{y_a}|)`, the Faddeev threshold condition, and
//! numerical checks of the operator bounds behind the threshold theorems.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::model::{self, kinematic_rotation, KernelConstants, ModelSpec, Pair, PotentialSpec};
use crate::quadrature::{self, Grid1d};
use crate::twobody::{self, Margins, PairClass};

pub use crate::model::t_function;

/// Radial grid inside each pair and spectator-momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedGrid {
    pub x: Grid1d,
    pub p: Grid1d,
}

impl MixedGrid {
    pub fn len(&self) -> usize {
        self.x.len() * self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Discretisation parameters of the three-body system.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub radial_nodes: usize,
    pub momentum_nodes: usize,
    /// Panel breaks of the momentum grid; must contain 1 so that the cutoff
    /// of `t(p)` falls on a panel edge.
    pub momentum_breaks: Vec<f64>,
    pub angle_nodes: usize,
    /// Re-assemble off-diagonal blocks with doubled angle nodes and reject
    /// a relative change above `1e-4`.
    pub check_angles: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { radial_nodes: 24, momentum_nodes: 24, momentum_breaks: model::DEFAULT_MOMENTUM_BREAKS.to_vec(), angle_nodes: 32, check_angles: true }
    }
}

pub fn mixed_grid(frame_pot: &PotentialSpec, spec: &GridSpec) -> MixedGrid {
    MixedGrid { x: model::radial_grid(frame_pot, spec.radial_nodes), p: model::momentum_grid(&spec.momentum_breaks, spec.momentum_nodes) }
}

/// Diagonal block of pair `a` at unit coupling: one `N_x × N_x` matrix for
/// each spectator momentum node, each equal to the two-body operator at
/// `k = √(p² + z²)`.
pub fn assemble_diagonal_block(frame_pot: &PotentialSpec, coupling: f64, z: f64, grid: &MixedGrid) -> Result<Vec<Matrix>> {
    if !(z > 0.0) {
        return Err(Error::InvalidInput(format!("z must be positive, got {z}")));
    }
    grid.p
        .nodes
        .par_iter()
        .map(|&p| Ok(twobody::assemble_bs(frame_pot, coupling, (p * p + z * z).sqrt(), &grid.x)?.matrix))
        .collect()
}

fn j0(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

fn offdiagonal_with_angles(
    rot: (f64, f64),
    pot_a: &PotentialSpec,
    pot_b: &PotentialSpec,
    z: f64,
    ga: &MixedGrid,
    gb: &MixedGrid,
    angle_nodes: usize,
) -> Matrix {
    let (c, s) = rot;
    let s_abs = s.abs();
    let (t, wt) = quadrature::gauss_legendre(angle_nodes);
    let p = &ga.p.nodes;
    let wp = &ga.p.weights;
    let (nxa, nxb, np) = (ga.x.len(), gb.x.len(), p.len());
    let ra = &ga.x.nodes;
    let rb = &gb.x.nodes;
    let fa: Vec<f64> = (0..nxa).map(|i| ra[i] * ga.x.weights[i].sqrt() * pot_a.value(ra[i]).sqrt()).collect();
    let fb: Vec<f64> = (0..nxb).map(|i| rb[i] * gb.x.weights[i].sqrt() * pot_b.value(rb[i]).sqrt()).collect();
    let fp: Vec<f64> = (0..np).map(|j| p[j] * wp[j].sqrt()).collect();
    let pref = 1.0 / (PI * s_abs.powi(3));
    let rows: Vec<Vec<f64>> = (0..np)
        .into_par_iter()
        .map(|j| {
            // row-block j: entries [(i, n, m)] flattened as i * (np * nxb) + n * nxb + m
            let mut out = vec![0.0; nxa * np * nxb];
            let mut ja = vec![0.0; angle_nodes * nxa];
            let mut jb = vec![0.0; angle_nodes * nxb];
            let mut wd = vec![0.0; angle_nodes];
            for n in 0..np {
                let (pj, qn) = (p[j], p[n]);
                for k in 0..angle_nodes {
                    let cross = 2.0 * c * pj * qn * t[k];
                    let a = (c * c * pj * pj + qn * qn - cross).max(0.0).sqrt() / s_abs;
                    let b = (pj * pj + c * c * qn * qn - cross).max(0.0).sqrt() / s_abs;
                    let d = (pj * pj + qn * qn - cross) / (s_abs * s_abs) + z * z;
                    wd[k] = wt[k] / d;
                    for i in 0..nxa {
                        ja[k * nxa + i] = j0(a * ra[i]);
                    }
                    for m in 0..nxb {
                        jb[k * nxb + m] = j0(b * rb[m]);
                    }
                }
                let scale = pref * fp[j] * fp[n];
                for i in 0..nxa {
                    for m in 0..nxb {
                        let mut acc = 0.0;
                        for k in 0..angle_nodes {
                            acc += wd[k] * ja[k * nxa + i] * jb[k * nxb + m];
                        }
                        out[i * np * nxb + n * nxb + m] = scale * fa[i] * fb[m] * acc;
                    }
                }
            }
            out
        })
        .collect();
    let mut mtx = Matrix::zeros(np * nxa, np * nxb);
    for (j, row) in rows.iter().enumerate() {
        for i in 0..nxa {
            for n in 0..np {
                for m in 0..nxb {
                    mtx[(j * nxa + i, n * nxb + m)] = row[i * np * nxb + n * nxb + m];
                }
            }
        }
    }
    mtx
}

/// Off-diagonal block `C_{a;b}(z)` at unit couplings, rows in the frame of
/// `a`, columns in the frame of `b`.
///
/// The s-wave projection of the rotated free resolvent leaves a single
/// angular integral over `cos(p_a, p_b)`, done by Gauss-Legendre.
pub fn assemble_offdiagonal_block(model: &ModelSpec, a: Pair, b: Pair, z: f64, ga: &MixedGrid, gb: &MixedGrid, spec: &GridSpec) -> Result<Matrix> {
    if a == b {
        return Err(Error::InvalidInput("off-diagonal block needs two different pairs".into()));
    }
    if !(z > 0.0) {
        return Err(Error::InvalidInput(format!("z must be positive, got {z}")));
    }
    let pa = model.frame_potential(a);
    let pb = model.frame_potential(b);
    if pa.is_zero() || pb.is_zero() {
        return Ok(Matrix::zeros(ga.len(), gb.len()));
    }
    let rot = kinematic_rotation(&model.masses, a, b);
    let m = offdiagonal_with_angles(rot, &pa, &pb, z, ga, gb, spec.angle_nodes);
    if spec.check_angles {
        let fine = offdiagonal_with_angles(rot, &pa, &pb, z, ga, gb, 2 * spec.angle_nodes);
        let diff = Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] - fine[(i, j)]);
        let change = (linalg::frobenius_sq(&diff) / linalg::frobenius_sq(&fine).max(1e-300)).sqrt();
        if change > 1e-4 {
            return Err(Error::AngleUnderresolved { change });
        }
        return Ok(fine);
    }
    Ok(m)
}

pub const OFF_PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Unit-coupling blocks of the three-body system at fixed `z`.
#[derive(Debug, Clone)]
pub struct BlockOperator {
    pub z: f64,
    pub grids: [MixedGrid; 3],
    /// Per pair, one matrix per momentum node.
    pub diag: [Vec<Matrix>; 3],
    /// Blocks `(a, b)` with `a < b`; `(b, a)` is the transpose.
    pub off: [Matrix; 3],
    pub couplings: [f64; 3],
}

impl BlockOperator {
    pub fn assemble(model: &ModelSpec, z: f64, spec: &GridSpec) -> Result<Self> {
        if !(z > 0.0) {
            return Err(Error::InvalidInput(format!("z must be positive, got {z}")));
        }
        let grids = Pair::ALL.map(|p| mixed_grid(&model.frame_potential(p), spec));
        let nx = grids[0].x.len();
        if grids.iter().any(|g| g.x.len() != nx) {
            return Err(Error::InvalidInput("all pairs need the same radial node count".into()));
        }
        let mut diag: [Vec<Matrix>; 3] = Default::default();
        for pair in Pair::ALL {
            diag[pair.index()] = assemble_diagonal_block(&model.frame_potential(pair), 1.0, z, &grids[pair.index()])?;
        }
        let mut off: [Matrix; 3] = [Matrix::zeros(0, 0), Matrix::zeros(0, 0), Matrix::zeros(0, 0)];
        for (k, &(a, b)) in OFF_PAIRS.iter().enumerate() {
            off[k] = assemble_offdiagonal_block(model, Pair::ALL[a], Pair::ALL[b], z, &grids[a], &grids[b], spec)?;
        }
        Ok(Self { z, grids, diag, off, couplings: model.couplings.as_array() })
    }

    pub fn component_len(&self) -> usize {
        self.grids[0].len()
    }

    pub fn off_block(&self, a: usize, b: usize) -> (&Matrix, bool) {
        let k = OFF_PAIRS.iter().position(|&(x, y)| (x, y) == (a.min(b), a.max(b))).expect("off-diagonal pair");
        (&self.off[k], a > b)
    }

    /// Spectral norm of the unit-coupling diagonal block of pair `a`.
    pub fn diagonal_norm(&self, a: usize) -> Result<f64> {
        let mut best = 0.0f64;
        for m in &self.diag[a] {
            best = best.max(linalg::sym_spectral_norm(m)?);
        }
        Ok(best)
    }
}

/// Result of the reduced Faddeev eigenproblem at fixed `z`.
#[derive(Debug, Clone)]
pub struct FaddeevSolution {
    pub z: f64,
    /// Perron root of `T = (1 - D)^{-1} O`, where `D` holds the coupled
    /// diagonal blocks and `O` the coupled off-diagonal ones.
    pub spectral_radius: f64,
    /// Components `φ_a` on the mixed grids, signed so their sum is positive,
    /// jointly unit-normalised.
    pub components: [Vec<f64>; 3],
    /// `‖T φ - r φ‖ / ‖φ‖`
    pub residual: f64,
    /// Defect of the component equation with the off-diagonal driving
    /// rescaled by `1/r`: `‖(D + O/r) φ - φ‖ / ‖φ‖`. It vanishes at a bound
    /// state, where `r = 1`.
    pub defect: f64,
}

struct Factorised {
    nx: usize,
    np: usize,
    /// `chol[a][j]`: lower Cholesky factor of `1 - λ_a C_aa(p_j)`, row-major.
    chol: [Vec<Vec<f64>>; 3],
}

impl Factorised {
    fn new(op: &BlockOperator, couplings: [f64; 3]) -> Result<Self> {
        let nx = op.grids[0].x.len();
        let np = op.grids[0].p.len();
        let mut chol: [Vec<Vec<f64>>; 3] = Default::default();
        for a in 0..3 {
            for m in &op.diag[a] {
                let mut buf = vec![0.0; nx * nx];
                for i in 0..nx {
                    for j in 0..nx {
                        buf[i * nx + j] = if i == j { 1.0 } else { 0.0 } - couplings[a] * m[(i, j)];
                    }
                }
                if linalg::cholesky_in_place(&mut buf, nx).is_err() {
                    let mu = linalg::sym_spectral_norm(m)?;
                    return Err(Error::PairAtOrAboveThreshold { pair: Pair::ALL[a].label(), value: couplings[a] * mu });
                }
                chol[a].push(buf);
            }
        }
        Ok(Self { nx, np, chol })
    }

    fn block_range(&self, a: usize, j: usize) -> std::ops::Range<usize> {
        let n = self.nx * self.np;
        let start = a * n + j * self.nx;
        start..start + self.nx
    }

    fn solve_lower(&self, v: &mut [f64]) {
        for a in 0..3 {
            for j in 0..self.np {
                let r = self.block_range(a, j);
                linalg::forward_substitute(&self.chol[a][j], self.nx, &mut v[r]);
            }
        }
    }

    fn solve_upper(&self, v: &mut [f64]) {
        for a in 0..3 {
            for j in 0..self.np {
                let r = self.block_range(a, j);
                linalg::back_substitute_transpose(&self.chol[a][j], self.nx, &mut v[r]);
            }
        }
    }
}

fn apply_off(op: &BlockOperator, couplings: [f64; 3], v: &[f64]) -> Vec<f64> {
    let n = op.component_len();
    let mut out = vec![0.0; 3 * n];
    for (k, &(a, b)) in OFF_PAIRS.iter().enumerate() {
        let f = (couplings[a] * couplings[b]).sqrt();
        if f == 0.0 {
            continue;
        }
        let m = &op.off[k];
        let (va, vb) = (&v[a * n..(a + 1) * n], &v[b * n..(b + 1) * n]);
        let ab = linalg::matvec(m, vb);
        for i in 0..n {
            out[a * n + i] += f * ab[i];
        }
        for j in 0..n {
            let col = m.col(j);
            let mut s = 0.0;
            for i in 0..n {
                s += col[i] * va[i];
            }
            out[b * n + j] += f * s;
        }
    }
    out
}

fn apply_diag(op: &BlockOperator, couplings: [f64; 3], v: &[f64]) -> Vec<f64> {
    let nx = op.grids[0].x.len();
    let np = op.grids[0].p.len();
    let n = nx * np;
    let mut out = vec![0.0; 3 * n];
    for a in 0..3 {
        for j in 0..np {
            let m = &op.diag[a][j];
            let base = a * n + j * nx;
            for i in 0..nx {
                let mut s = 0.0;
                for l in 0..nx {
                    s += m[(i, l)] * v[base + l];
                }
                out[base + i] = couplings[a] * s;
            }
        }
    }
    out
}

/// Perron root of the reduced component system at the couplings stored in
/// `op`, optionally overridden.
pub fn faddeev_solve_operator(op: &BlockOperator, couplings: Option<[f64; 3]>) -> Result<FaddeevSolution> {
    let lam = couplings.unwrap_or(op.couplings);
    if lam.iter().any(|&c| !(c >= 0.0 && c.is_finite())) {
        return Err(Error::InvalidInput(format!("couplings must be non-negative, got {lam:?}")));
    }
    let fac = Factorised::new(op, lam)?;
    let total = 3 * op.component_len();
    // symmetric form S = L^{-1} O L^{-T}
    let apply_s = |x: &[f64]| -> Vec<f64> {
        let mut y = x.to_vec();
        fac.solve_upper(&mut y);
        let mut w = apply_off(op, lam, &y);
        fac.solve_lower(&mut w);
        w
    };
    let start = vec![1.0; total];
    let (r, v) = linalg::lanczos_top(apply_s, total, &start, 1e-13, 300)?;
    let mut phi = v;
    fac.solve_upper(&mut phi);
    if phi.iter().sum::<f64>() < 0.0 {
        phi.iter_mut().for_each(|x| *x = -*x);
    }
    let norm = linalg::norm2(&phi);
    if norm > 0.0 {
        phi.iter_mut().for_each(|x| *x /= norm);
    }
    let o_phi = apply_off(op, lam, &phi);
    let d_phi = apply_diag(op, lam, &phi);
    // T φ = (1 - D)^{-1} O φ
    let mut t_phi = o_phi.clone();
    fac.solve_lower(&mut t_phi);
    fac.solve_upper(&mut t_phi);
    let residual = t_phi.iter().zip(&phi).map(|(a, b)| (a - r * b).powi(2)).sum::<f64>().sqrt();
    let defect = if r > 0.0 {
        d_phi.iter().zip(&o_phi).zip(&phi).map(|((d, o), p)| (d + o / r - p).powi(2)).sum::<f64>().sqrt()
    } else {
        f64::NAN
    };
    let n = op.component_len();
    let components = [phi[..n].to_vec(), phi[n..2 * n].to_vec(), phi[2 * n..].to_vec()];
    Ok(FaddeevSolution { z: op.z, spectral_radius: r.max(0.0), components, residual, defect })
}

pub fn faddeev_solve(model: &ModelSpec, z: f64, spec: &GridSpec) -> Result<FaddeevSolution> {
    let op = BlockOperator::assemble(model, z, spec)?;
    faddeev_solve_operator(&op, None)
}

/// One-parameter coupling family used by the threshold search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingPath {
    /// Every coupling multiplied by `s`.
    Overall,
    /// The coupling of one pair set to `s`, the others held.
    Single(Pair),
}

impl CouplingPath {
    pub fn couplings(&self, template: &ModelSpec, s: f64) -> [f64; 3] {
        let mut c = template.couplings.as_array();
        match self {
            CouplingPath::Overall => c.iter_mut().for_each(|x| *x *= s),
            CouplingPath::Single(p) => c[p.index()] = s,
        }
        c
    }
}

/// Spectator-energy points used for the `z → 0` extrapolation.
pub const EXTRAPOLATION_Z: [f64; 2] = [1e-2, 1e-3];

/// `r(0) ≈ (z1 r(z2) - z2 r(z1)) / (z1 - z2)`, linear in `z`.
pub fn extrapolate_to_zero(z: [f64; 2], r: [f64; 2]) -> f64 {
    (z[0] * r[1] - z[1] * r[0]) / (z[0] - z[1])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    pub scale: f64,
    pub couplings: [f64; 3],
    /// Extrapolated radius at `scale ∓ 10 tol`.
    pub radius_below: f64,
    pub radius_above: f64,
    pub evaluations: usize,
}

/// Evaluates the extrapolated zero-energy spectral radius along a coupling
/// path with the blocks assembled once.
pub struct RadiusScan {
    template: ModelSpec,
    path: CouplingPath,
    ops: Vec<BlockOperator>,
    z: [f64; 2],
}

impl RadiusScan {
    pub fn new(template: &ModelSpec, path: CouplingPath, spec: &GridSpec) -> Result<Self> {
        Self::with_z(template, path, spec, EXTRAPOLATION_Z)
    }

    pub fn with_z(template: &ModelSpec, path: CouplingPath, spec: &GridSpec, z: [f64; 2]) -> Result<Self> {
        let ops = z.iter().map(|&zz| BlockOperator::assemble(template, zz, spec)).collect::<Result<Vec<_>>>()?;
        Ok(Self { template: template.clone(), path, ops, z })
    }

    pub fn radius_at(&self, s: f64, z_index: usize) -> Result<f64> {
        let c = self.path.couplings(&self.template, s);
        Ok(faddeev_solve_operator(&self.ops[z_index], Some(c))?.spectral_radius)
    }

    pub fn extrapolated(&self, s: f64) -> Result<f64> {
        let r = [self.radius_at(s, 0)?, self.radius_at(s, 1)?];
        Ok(extrapolate_to_zero(self.z, r))
    }

    /// Largest scale keeping every pair strictly below its threshold.
    pub fn max_scale(&self) -> Result<f64> {
        let mut best = f64::INFINITY;
        let lam = self.template.couplings.as_array();
        for pair in Pair::ALL {
            let pot = self.template.frame_potential(pair);
            if pot.is_zero() {
                continue;
            }
            let grid = &self.ops[0].grids[pair.index()].x;
            let star = twobody::critical_coupling(&pot, grid, 1e-6)?;
            let limit = match self.path {
                CouplingPath::Overall => {
                    if lam[pair.index()] > 0.0 {
                        star / lam[pair.index()]
                    } else {
                        f64::INFINITY
                    }
                }
                CouplingPath::Single(p) if p == pair => star,
                CouplingPath::Single(_) => {
                    if lam[pair.index()] >= star {
                        return Err(Error::PairAtOrAboveThreshold { pair: pair.label(), value: lam[pair.index()] / star });
                    }
                    f64::INFINITY
                }
            };
            best = best.min(limit);
        }
        Ok(best)
    }
}

/// Critical scale on `path` where the extrapolated radius crosses 1, by
/// bisection on `[lo, hi]` (default `hi` just below the first pair
/// threshold).
pub fn bs_threshold_coupling(template: &ModelSpec, path: CouplingPath, tol: f64, spec: &GridSpec, bracket: Option<(f64, f64)>) -> Result<ThresholdResult> {
    let scan = RadiusScan::new(template, path, spec)?;
    let smax = scan.max_scale()?;
    let (mut lo, mut hi) = match bracket {
        Some(b) => b,
        None => {
            let hi = if smax.is_finite() { smax * (1.0 - 1e-6) } else { 1e3 };
            (0.0, hi)
        }
    };
    if hi > smax {
        hi = smax * (1.0 - 1e-6);
    }
    if !(hi > lo) {
        return Err(Error::BracketInvalid(format!("[{lo}, {hi}]")));
    }
    let mut evals = 0;
    let f = |s: f64, evals: &mut usize| -> Result<f64> {
        *evals += 1;
        scan.extrapolated(s)
    };
    if f(hi, &mut evals)? < 1.0 || (lo > 0.0 && f(lo, &mut evals)? > 1.0) {
        return Err(Error::NoThresholdInBracket { lo, hi });
    }
    while hi - lo > tol * hi.abs().max(1e-300) {
        let mid = 0.5 * (lo + hi);
        if f(mid, &mut evals)? > 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let scale = 0.5 * (lo + hi);
    let step = 10.0 * tol * scale;
    let radius_below = f((scale - step).max(0.0), &mut evals)?;
    let radius_above = if scale + step < smax { f(scale + step, &mut evals)? } else { f64::INFINITY };
    Ok(ThresholdResult { scale, couplings: path.couplings(template, scale), radius_below, radius_above, evaluations: evals })
}

/// Hilbert-Schmidt check of the regular part `K2` of `B_a^{-1} C_{a;b}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsReport {
    pub z: f64,
    /// Discretised `‖K2(z)‖_2^2` on the s-wave grids.
    pub hs_norm_sq: f64,
    /// Closed-form value of the full-space norm, as a 1D momentum integral.
    pub hs_formula: f64,
    /// `c c' c~ / (2^5 π^4)`
    pub bound: f64,
    pub constants: KernelConstants,
}

impl HsReport {
    pub fn pass(&self) -> bool {
        self.hs_norm_sq <= self.bound
    }
}

pub fn hs_norm_k2(model: &ModelSpec, a: Pair, b: Pair, z: f64, spec: &GridSpec) -> Result<HsReport> {
    if !(z > 0.0 && z <= 1.0) {
        return Err(Error::InvalidInput(format!("z must lie in (0, 1], got {z}")));
    }
    let ga = mixed_grid(&model.frame_potential(a), spec);
    let gb = mixed_grid(&model.frame_potential(b), spec);
    let block = assemble_offdiagonal_block(model, a, b, z, &ga, &gb, spec)?;
    let nx = ga.x.len();
    let mut hs = 0.0;
    for (j, &p) in ga.p.nodes.iter().enumerate() {
        let g = if p <= 1.0 { 1.0 / (z + p.sqrt()) - 1.0 / (z + 1.0) } else { 0.0 };
        if g == 0.0 {
            continue;
        }
        for i in 0..nx {
            let row = j * nx + i;
            for col in 0..block.ncols() {
                hs += (g * block[(row, col)]).powi(2);
            }
        }
    }
    let frame = model.frame(a);
    let quad = model::Quadrature { radial: ga.x.clone(), momentum: ga.p.clone() };
    let constants = model::kernel_constants(model.potential(a), model.potential(b), &frame, &quad)?;
    let pref = constants.c * constants.c_prime * constants.c_tilde;
    let radial = quadrature::integrate(
        |p: f64| {
            let g = 1.0 / (z + p.sqrt()) - 1.0 / (z + 1.0);
            p * p * g * g / (p * p + z * z).sqrt()
        },
        0.0,
        1.0,
        1e-13,
        1e-12,
    )?;
    let hs_formula = pref / (2f64.powi(7) * PI.powi(5)) * 4.0 * PI * radial;
    let bound = pref / (2f64.powi(5) * PI.powi(4));
    Ok(HsReport { z, hs_norm_sq: hs, hs_formula, bound, constants })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityRow {
    pub a: Pair,
    pub b: Pair,
    pub z1: f64,
    pub z2: f64,
    pub norm_diff: f64,
    pub bound: f64,
}

impl ContinuityRow {
    pub fn pass(&self) -> bool {
        self.norm_diff <= self.bound + 1e-6
    }
}

/// `‖C_{a;b}(z1) - C_{a;b}(z2)‖ ≤ l √|z1² - z2²|` with
/// `l = √(c_a c_b) / (4π)` for every block and `z` pair.
pub fn continuity_check(model: &ModelSpec, z_pairs: &[(f64, f64)], spec: &GridSpec) -> Result<Vec<ContinuityRow>> {
    let c: Vec<f64> = Pair::ALL.iter().map(|&p| model.frame_potential(p).volume_integral()).collect();
    let mut rows = Vec::new();
    for &(z1, z2) in z_pairs {
        let o1 = BlockOperator::assemble(model, z1, spec)?;
        let o2 = BlockOperator::assemble(model, z2, spec)?;
        let dz = (z1 * z1 - z2 * z2).abs().sqrt();
        for a in 0..3 {
            let mut best = 0.0f64;
            for (m1, m2) in o1.diag[a].iter().zip(&o2.diag[a]) {
                let d = Matrix::from_fn(m1.nrows(), m1.ncols(), |i, j| m1[(i, j)] - m2[(i, j)]);
                best = best.max(linalg::sym_spectral_norm(&d)?);
            }
            rows.push(ContinuityRow { a: Pair::ALL[a], b: Pair::ALL[a], z1, z2, norm_diff: best, bound: c[a] / (4.0 * PI) * dz });
        }
        for (k, &(a, b)) in OFF_PAIRS.iter().enumerate() {
            let (m1, m2) = (&o1.off[k], &o2.off[k]);
            let d = Matrix::from_fn(m1.nrows(), m1.ncols(), |i, j| m1[(i, j)] - m2[(i, j)]);
            let norm = linalg::spectral_norm(&d)?;
            rows.push(ContinuityRow { a: Pair::ALL[a], b: Pair::ALL[b], z1, z2, norm_diff: norm, bound: (c[a] * c[b]).sqrt() / (4.0 * PI) * dz });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubthresholdRow {
    pub z: f64,
    /// `λ ‖C_aa(z)‖`
    pub value: f64,
    /// `1 - ε/(λ + ε)`
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubthresholdReport {
    pub rows: Vec<SubthresholdRow>,
    pub class: PairClass,
    /// Resonant pair: `λ ‖C(z)‖ → 1` as `z → 0`, the margin bound cannot hold.
    pub saturated: bool,
    pub tol: f64,
}

impl SubthresholdReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.value > r.bound + self.tol).count()
    }
}

/// `λ ‖C_aa(z)‖ ≤ 1 - ε/(λ + ε)` on a pair classified unbound with margin.
/// The norm is the two-body `μ_max(λ, z)`: the block is diagonal in the
/// spectator momentum and largest at `p = 0`.
pub fn subthreshold_bound_check(pot: &PotentialSpec, coupling: f64, epsilon: f64, z_list: &[f64], grid: &Grid1d) -> Result<SubthresholdReport> {
    let margins = Margins { epsilon, resonance_tol: twobody::RESONANCE_TOL };
    let class = twobody::classify_pair(pot, coupling, margins, grid)?;
    let saturated = class == PairClass::Resonant;
    if !matches!(class, PairClass::UnboundWithMargin | PairClass::Resonant) {
        return Err(Error::PreconditionViolation(format!("pair classified {} with margin {epsilon}", class.name())));
    }
    let tol = 1e-10;
    let mut rows = Vec::with_capacity(z_list.len());
    for &z in z_list {
        let value = if coupling == 0.0 { 0.0 } else { coupling * twobody::unit_mu(pot, z, grid)? };
        rows.push(SubthresholdRow { z, value, bound: 1.0 - epsilon / (coupling + epsilon) });
    }
    Ok(SubthresholdReport { rows, class, saturated, tol })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Green6Row {
    pub xi: f64,
    pub g0: f64,
    pub bound: f64,
}

impl Green6Row {
    pub fn pass(&self) -> bool {
        self.g0 <= self.bound
    }
}

/// Six-dimensional free Green's function at energy `-1` from its heat-kernel
/// integral, against `4/(9π|ξ|^4) e^{-|ξ|/2}`.
pub fn green6_bound_check(xi_list: &[f64]) -> Result<Vec<Green6Row>> {
    xi_list
        .iter()
        .map(|&xi| {
            if !(xi > 0.0) {
                return Err(Error::InvalidInput(format!("|xi| must be positive, got {xi}")));
            }
            let g0 = green6(xi)?;
            Ok(Green6Row { xi, g0, bound: 4.0 / (9.0 * PI * xi.powi(4)) * (-0.5 * xi).exp() })
        })
        .collect()
}

/// `(4π)^{-3} |ξ|^{-4} ∫_0^∞ t^{-3} e^{-t|ξ|²} e^{-1/(4t)} dt`
pub fn green6(xi: f64) -> Result<f64> {
    let x2 = xi * xi;
    // t = e^v; the integrand peaks at t ≈ 1/(2|ξ|)
    let f = |v: f64| {
        let t = v.exp();
        (-2.0 * v - t * x2 - 0.25 / t).exp()
    };
    let centre = -(2.0 * xi).ln();
    let lead = f(centre).max(1e-300);
    let integral = quadrature::integrate(f, centre - 40.0, centre + 40.0, 1e-14 * lead, 1e-12)?;
    Ok(integral / ((4.0 * PI).powi(3) * x2 * x2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JRow {
    pub z: f64,
    pub j: f64,
    pub lower_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JReport {
    pub rows: Vec<JRow>,
    pub eps0: f64,
    /// `ε = min(ε0, π/(3r))` with `∫_{|y|>r} g = ‖g‖_1 / 4`
    pub eps: f64,
    pub l1_norm: f64,
    /// Least-squares fit `J ≈ slope log(1/z) + intercept` over all `z`.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// The same fit restricted to the smallest decade of `z`.
    pub slope_last_decade: f64,
    pub r_squared_last_decade: f64,
}

impl JReport {
    pub fn bound_violations(&self) -> usize {
        self.rows.iter().filter(|r| r.j < r.lower_bound).count()
    }
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return (0.0, my, 0.0);
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

/// `J_ε0(z) = ∫_{|p|≤ε0} |ĝ(p)|^2 / (p² + z²)^{3/2} d³p` for a radial
/// profile `g`, with `ĝ(p) = ∫ e^{ip·y} g(|y|) d³y`.
pub fn j_epsilon_divergence(g: &PotentialSpec, eps0: f64, z_list: &[f64]) -> Result<JReport> {
    if !(eps0 > 0.0) {
        return Err(Error::InvalidInput(format!("eps0 must be positive, got {eps0}")));
    }
    let rgrid = model::radial_grid(g, 400);
    let l1 = 4.0 * PI * rgrid.integrate(|y| y * y * g.value(y));
    let ghat = |p: f64| 4.0 * PI * rgrid.integrate(|y| y * y * j0(p * y) * g.value(y));
    let mut rows = Vec::with_capacity(z_list.len());
    // r with ∫_{|y|>r} g = ‖g‖/4
    let eps = if l1 > 0.0 {
        let fine = Grid1d::gauss(0.0, rgrid.upper, 2000);
        let tail_fine = |r: f64| 4.0 * PI * fine.integrate(|y| if y > r { y * y * g.value(y) } else { 0.0 });
        let (mut lo, mut hi) = (0.0, rgrid.upper);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if tail_fine(mid) > 0.25 * l1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        eps0.min(PI / (3.0 * 0.5 * (lo + hi)))
    } else {
        eps0
    };
    for &z in z_list {
        if !(z > 0.0) {
            return Err(Error::InvalidInput(format!("z must be positive, got {z}")));
        }
        let j = if l1 == 0.0 {
            0.0
        } else {
            let f = |v: f64| {
                let p = v.exp();
                let gh = ghat(p);
                4.0 * PI * p.powi(3) * gh * gh / (p * p + z * z).powf(1.5)
            };
            let top = eps0.ln();
            let bottom = z.min(eps0).ln() - 40.0;
            quadrature::integrate(f, bottom, top, 1e-12, 1e-11)?
        };
        let ball = 4.0 * PI * ((eps / z).asinh() - eps / (eps * eps + z * z).sqrt());
        rows.push(JRow { z, j, lower_bound: l1 * l1 / 64.0 * ball });
    }
    let x: Vec<f64> = rows.iter().map(|r| (1.0 / r.z).ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.j).collect();
    let (slope, intercept, r_squared) = if rows.len() >= 2 { linear_fit(&x, &y) } else { (0.0, 0.0, 0.0) };
    let zmin = rows.iter().map(|r| r.z).fold(f64::INFINITY, f64::min);
    let (lx, ly): (Vec<f64>, Vec<f64>) = rows.iter().filter(|r| r.z <= 10.0 * zmin * (1.0 + 1e-12)).map(|r| ((1.0 / r.z).ln(), r.j)).unzip();
    let (slope_last_decade, _, r_squared_last_decade) = if lx.len() >= 2 { linear_fit(&lx, &ly) } else { (0.0, 0.0, 0.0) };
    Ok(JReport { rows, eps0, eps, l1_norm: l1, slope, intercept, r_squared, slope_last_decade, r_squared_last_decade })
}
