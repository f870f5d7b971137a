//! Two-body Birman-Schwinger operator `L(k) = √(λV)(-Δ + k²)^{-1}√(λV)` in
//! the s-wave, its threshold data, and a radial shooting oracle.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::model::PotentialSpec;
use crate::quadrature::Grid1d;

/// Below this `k` the reduced Green's function uses its `k = 0` form.
pub const K_ZERO: f64 = 1e-12;
/// `|μ - 1|` tolerance for a coupling to count as critical.
pub const THRESHOLD_TOL: f64 = 1e-8;
/// Default relative tolerance for resonant classification.
pub const RESONANCE_TOL: f64 = 1e-4;

/// Reduced s-wave Green's function `sinh(k r<) e^{-k r>} / k`.
pub fn reduced_green(k: f64, r: f64, rp: f64) -> f64 {
    let (lo, hi) = if r < rp { (r, rp) } else { (rp, r) };
    if k < K_ZERO {
        lo
    } else {
        (-k * (hi - lo)).exp() * (-(-2.0 * k * lo).exp_m1()) / (2.0 * k)
    }
}

/// `∫_0^R g_k(r, r') dr'`.
fn green_row_integral(k: f64, r: f64, upper: f64) -> f64 {
    if k < K_ZERO {
        r * upper - 0.5 * r * r
    } else {
        let inner = (-k * r).exp_m1().powi(2) / (2.0 * k * k);
        let outer = (-2.0 * k * r).exp_m1() * (-k * (upper - r)).exp_m1() / (2.0 * k * k);
        inner + outer
    }
}

/// Nyström matrix of the reduced operator on `(0, grid.upper]` acting on
/// `φ_i = √w_i u(r_i)`.
///
/// The kink of the Green's function on the diagonal is handled by singularity
/// subtraction: each row integral of `g_k` is taken exactly, which keeps the
/// matrix symmetric and raises the convergence order from two to four.
pub fn bs_matrix(sqrt_v: &[f64], grid: &Grid1d, k: f64) -> Matrix {
    let n = grid.len();
    let r = &grid.nodes;
    let w = &grid.weights;
    let sw: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        let mut quad_row = 0.0;
        for j in 0..n {
            let g = reduced_green(k, r[i], r[j]);
            quad_row += w[j] * g;
            if j <= i {
                let v = sw[i] * sw[j] * sqrt_v[i] * sqrt_v[j] * g;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        let d = green_row_integral(k, r[i], grid.upper) - quad_row;
        m[(i, i)] += sqrt_v[i] * sqrt_v[i] * d;
    }
    m
}

#[derive(Debug, Clone)]
pub struct BSOperator {
    pub k: f64,
    pub coupling: f64,
    pub matrix: Matrix,
    pub grid: Grid1d,
    /// `√(λ V(r_i))`
    pub sqrt_v: Vec<f64>,
}

pub fn assemble_bs(pot: &PotentialSpec, coupling: f64, k: f64, grid: &Grid1d) -> Result<BSOperator> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::InvalidInput(format!("k must be non-negative, got {k}")));
    }
    if !(coupling >= 0.0 && coupling.is_finite()) {
        return Err(Error::InvalidInput(format!("coupling must be non-negative, got {coupling}")));
    }
    let sqrt_v: Vec<f64> = grid.nodes.iter().map(|&r| (coupling * pot.value(r)).sqrt()).collect();
    let matrix = bs_matrix(&sqrt_v, grid, k);
    Ok(BSOperator { k, coupling, matrix, grid: grid.clone(), sqrt_v })
}

#[derive(Debug, Clone)]
pub struct Principal {
    pub mu: f64,
    pub phi: Vec<f64>,
    /// `μ_1 - μ_2`
    pub gap: f64,
    pub second: f64,
    pub residual: f64,
}

impl Principal {
    pub fn is_degenerate(&self) -> bool {
        self.gap < 1e-10
    }
}

pub fn principal_eigenpair(op: &BSOperator) -> Result<Principal> {
    principal_of(&op.matrix)
}

pub fn principal_of(m: &Matrix) -> Result<Principal> {
    let n = m.nrows();
    let (vals, vecs) = linalg::sym_eigen(m)?;
    let mu = vals[n - 1];
    let second = if n > 1 { vals[n - 2] } else { f64::NEG_INFINITY };
    let mut phi: Vec<f64> = (0..n).map(|i| vecs[(i, n - 1)]).collect();
    if phi.iter().sum::<f64>() < 0.0 {
        phi.iter_mut().for_each(|x| *x = -*x);
    }
    let mphi = linalg::matvec(m, &phi);
    let residual = mphi.iter().zip(&phi).map(|(a, b)| (a - mu * b).powi(2)).sum::<f64>().sqrt();
    Ok(Principal { mu, phi, gap: mu - second, second, residual })
}

/// `μ_max(λ = 1, k)`.
pub fn unit_mu(pot: &PotentialSpec, k: f64, grid: &Grid1d) -> Result<f64> {
    Ok(principal_eigenpair(&assemble_bs(pot, 1.0, k, grid)?)?.mu)
}

/// Critical coupling `λ*` with `μ_max(λ*, 0) = 1`. Because `μ_max` is linear
/// in `λ`, the root is `1 / μ_max(1, 0)`; `tol` is checked on the result.
pub fn critical_coupling(pot: &PotentialSpec, grid: &Grid1d, tol: f64) -> Result<f64> {
    if pot.is_zero() {
        return Err(Error::ZeroPotential);
    }
    let mu1 = unit_mu(pot, 0.0, grid)?;
    if mu1 <= 0.0 {
        return Err(Error::ZeroPotential);
    }
    let lambda = 1.0 / mu1;
    let check = unit_mu_scaled(pot, lambda, grid)?;
    if (check - 1.0).abs() > tol.max(1e-12) {
        return Err(Error::NotAtThreshold { defect: (check - 1.0).abs(), tol });
    }
    Ok(lambda)
}

fn unit_mu_scaled(pot: &PotentialSpec, coupling: f64, grid: &Grid1d) -> Result<f64> {
    Ok(principal_eigenpair(&assemble_bs(pot, coupling, 0.0, grid)?)?.mu)
}

/// Threshold eigenvector and resonance coefficient at `λ*`.
#[derive(Debug, Clone)]
pub struct ResonanceData {
    pub lambda_star: f64,
    /// Unit-norm, non-negative principal eigenvector of `L(0)` at `λ*`.
    pub phi0: Vec<f64>,
    pub a_coefficient: f64,
    pub grid: Grid1d,
    pub potential: PotentialSpec,
}

pub fn resonance_data(pot: &PotentialSpec, grid: &Grid1d) -> Result<ResonanceData> {
    let lambda_star = critical_coupling(pot, grid, THRESHOLD_TOL)?;
    let op = assemble_bs(pot, lambda_star, 0.0, grid)?;
    let pr = principal_eigenpair(&op)?;
    if pr.is_degenerate() {
        return Err(Error::DegenerateTopEigenvalue { gap: pr.gap });
    }
    let mut res = ResonanceData { lambda_star, phi0: pr.phi, a_coefficient: 0.0, grid: grid.clone(), potential: pot.clone() };
    res.a_coefficient = resonance_coefficient(pot, &res, grid)?;
    Ok(res)
}

/// `a = (φ0, √(λ*V))^2 / (4π)` with the inner product in three dimensions.
///
/// With `φ_i = √w_i u(r_i)` and `∫u^2 dr = 1` the 3D function is
/// `u(r) / (√(4π) r)`, so the squared overlap divided by `4π` reduces to
/// `(Σ_i √w_i r_i φ_i √(λ* V_i))^2`.
pub fn resonance_coefficient(pot: &PotentialSpec, res: &ResonanceData, grid: &Grid1d) -> Result<f64> {
    let op = assemble_bs(pot, res.lambda_star, 0.0, grid)?;
    let mu = principal_eigenpair(&op)?.mu;
    if (mu - 1.0).abs() > THRESHOLD_TOL {
        return Err(Error::NotAtThreshold { defect: (mu - 1.0).abs(), tol: THRESHOLD_TOL });
    }
    let s: f64 = (0..grid.len())
        .map(|i| grid.weights[i].sqrt() * grid.nodes[i] * res.phi0[i] * op.sqrt_v[i])
        .sum();
    Ok(s * s)
}

/// `μ_max(λ, k)` for each `k`.
pub fn mu_curve(pot: &PotentialSpec, coupling: f64, grid: &Grid1d, ks: &[f64]) -> Result<Vec<f64>> {
    ks.iter().map(|&k| Ok(principal_eigenpair(&assemble_bs(pot, coupling, k, grid)?)?.mu)).collect()
}

/// Richardson-extrapolated slope `lim (1 - μ(k))/k` at `λ*` from `k` and `k/2`.
pub fn extrapolated_slope(res: &ResonanceData, k: f64) -> Result<f64> {
    let mu = mu_curve(&res.potential, res.lambda_star, &res.grid, &[k, 0.5 * k])?;
    let s1 = (1.0 - mu[0]) / k;
    let s2 = (1.0 - mu[1]) / (0.5 * k);
    Ok(2.0 * s2 - s1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WProbeRow {
    pub k: f64,
    pub mu: f64,
    pub norm_w: f64,
    pub ak_norm_w: f64,
    pub norm_z: f64,
    pub gap: f64,
}

/// Minimum top spectral gap of `L(k)` inside the probe window.
pub const RHO0_GAP: f64 = 0.05;

/// Splits `W(k) = (1 - L(k))^{-1}` at `λ*` into the pole `P0/(a k)` and the
/// remainder `Z(k)`, reporting spectral norms.
pub fn w_decomposition_probe(res: &ResonanceData, k_list: &[f64]) -> Result<Vec<WProbeRow>> {
    let n = res.grid.len();
    let a = res.a_coefficient;
    let mut rows = Vec::with_capacity(k_list.len());
    for &k in k_list {
        if !(k > 0.0) {
            return Err(Error::OutsideValidityWindow { k, reason: "k must be positive".into() });
        }
        let op = assemble_bs(&res.potential, res.lambda_star, k, &res.grid)?;
        let (vals, vecs) = linalg::sym_eigen(&op.matrix)?;
        let mu = vals[n - 1];
        let second = vals[n - 2];
        if (1.0 - second).abs() < 1e-3 {
            return Err(Error::OutsideValidityWindow { k, reason: format!("second eigenvalue {second} within 1e-3 of 1") });
        }
        if mu - second <= RHO0_GAP {
            return Err(Error::OutsideValidityWindow { k, reason: format!("top gap {} below {RHO0_GAP}", mu - second) });
        }
        let resolvent: Vec<f64> = vals.iter().map(|m| 1.0 / (1.0 - m)).collect();
        let norm_w = resolvent.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let z = Matrix::from_fn(n, n, |i, j| {
            let mut s = 0.0;
            for (l, rl) in resolvent.iter().enumerate() {
                s += vecs[(i, l)] * rl * vecs[(j, l)];
            }
            s - res.phi0[i] * res.phi0[j] / (a * k)
        });
        let norm_z = linalg::sym_spectral_norm(&z)?;
        rows.push(WProbeRow { k, mu, norm_w, ak_norm_w: a * k * norm_w, norm_z, gap: mu - second });
    }
    Ok(rows)
}

/// `‖(1 - L(k))^{-1}‖` at an arbitrary coupling below threshold.
pub fn resolvent_norm(pot: &PotentialSpec, coupling: f64, k: f64, grid: &Grid1d) -> Result<f64> {
    let op = assemble_bs(pot, coupling, k, grid)?;
    let vals = linalg::sym_eigenvalues(&op.matrix)?;
    let top = vals[vals.len() - 1];
    if top >= 1.0 {
        return Err(Error::PreconditionViolation(format!("μ(k) = {top} ≥ 1, resolvent singular")));
    }
    Ok(vals.iter().fold(0.0f64, |acc, m| acc.max(1.0 / (1.0 - m).abs())))
}

/// Ground energy `-k²` from the Birman-Schwinger condition `μ_max(L(k)) = 1`,
/// or `None` when `μ_max(L(0)) ≤ 1`.
pub fn bs_ground_energy(pot: &PotentialSpec, coupling: f64, grid: &Grid1d, tol: f64) -> Result<Option<f64>> {
    let mu = |k: f64| -> Result<f64> { Ok(principal_eigenpair(&assemble_bs(pot, coupling, k, grid)?)?.mu) };
    if mu(0.0)? <= 1.0 {
        return Ok(None);
    }
    let mut lo = 0.0;
    let mut hi = (coupling * pot.depth).sqrt().max(1e-8);
    while mu(hi)? > 1.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mu(mid)? > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol * 0.5 * (lo + hi).max(1e-300) {
            break;
        }
    }
    let k = 0.5 * (lo + hi);
    Ok(Some(-k * k))
}

/// Radial shooting solver for `-u'' - λ V u = E u`.
#[derive(Debug, Clone)]
pub struct Shooter<'a> {
    pot: &'a PotentialSpec,
    coupling: f64,
    panels: Vec<(f64, f64, usize)>,
}

impl<'a> Shooter<'a> {
    pub fn new(pot: &'a PotentialSpec, coupling: f64, steps_per_range: usize) -> Self {
        let mut breaks = vec![0.0];
        breaks.extend(pot.kinks());
        let outer = pot.support_radius();
        breaks.push(outer);
        let h = pot.range / steps_per_range as f64;
        let panels = breaks
            .windows(2)
            .map(|w| (w[0], w[1], (((w[1] - w[0]) / h).ceil() as usize).max(4)))
            .collect();
        Self { pot, coupling, panels }
    }

    /// Number of s-wave bound states strictly below `e < 0`.
    pub fn count_below(&self, e: f64) -> usize {
        let kappa = (-e).max(0.0).sqrt();
        let mut u = 0.0f64;
        let mut du = 1.0f64;
        let mut nodes = 0;
        let f = |r: f64| -(e + self.coupling * self.pot.value(r));
        for &(a, b, n) in &self.panels {
            let h = (b - a) / n as f64;
            // evaluate the potential just inside the panel so that a jump at a
            // panel edge is seen from the correct side
            let inside = |r: f64| r.clamp(a + 1e-14 * (b - a), b - 1e-14 * (b - a));
            for s in 0..n {
                let r = a + s as f64 * h;
                let q0 = f(inside(r));
                let qm = f(inside(r + 0.5 * h));
                let q1 = f(inside(r + h));
                let k1u = du;
                let k1d = q0 * u;
                let k2u = du + 0.5 * h * k1d;
                let k2d = qm * (u + 0.5 * h * k1u);
                let k3u = du + 0.5 * h * k2d;
                let k3d = qm * (u + 0.5 * h * k2u);
                let k4u = du + h * k3d;
                let k4d = q1 * (u + h * k3u);
                let nu = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
                let nd = du + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
                if (u > 0.0 && nu < 0.0) || (u < 0.0 && nu > 0.0) {
                    nodes += 1;
                }
                u = nu;
                du = nd;
                let scale = u.abs().max(du.abs());
                if scale > 1e100 {
                    u /= scale;
                    du /= scale;
                }
            }
        }
        let mismatch = u * (du + kappa * u) < 0.0;
        nodes + usize::from(mismatch)
    }

    fn ground(&self, tol: f64) -> Option<f64> {
        if self.count_below(0.0) == 0 {
            return None;
        }
        let vmax = self.pot.depth.max(self.pot.table.iter().map(|s| s.1).fold(0.0, f64::max));
        let mut lo = -self.coupling * vmax * 1.0001 - 1e-12;
        let mut hi = 0.0;
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) == 0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= tol {
                break;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// Default shooting resolution.
pub const SHOOTING_STEPS_PER_RANGE: usize = 2000;

/// Ground-state energy by outward RK4 shooting with node counting, or `None`
/// if there is no bound state. The result is recomputed with half the step
/// and rejected if the two differ by more than `max(100 tol, 1e-9 |E|)`.
pub fn shooting_ground_energy(pot: &PotentialSpec, coupling: f64, tol: f64) -> Result<Option<f64>> {
    if coupling == 0.0 || pot.is_zero() {
        return Ok(None);
    }
    let tol = tol.max(1e-15);
    let coarse = Shooter::new(pot, coupling, SHOOTING_STEPS_PER_RANGE).ground(tol);
    let fine = Shooter::new(pot, coupling, 2 * SHOOTING_STEPS_PER_RANGE).ground(tol);
    match (coarse, fine) {
        (None, None) => Ok(None),
        (Some(a), Some(b)) => {
            if (a - b).abs() > (100.0 * tol).max(1e-9 * b.abs()) {
                Err(Error::IntegrationUnderresolved(format!("E = {a} vs {b} at half step")))
            } else {
                Ok(Some(b))
            }
        }
        (a, b) => {
            // a bound state this close to zero energy only resolves on one grid
            let e = a.or(b).unwrap();
            if e.abs() <= 100.0 * tol {
                Ok(b)
            } else {
                Err(Error::IntegrationUnderresolved(format!("bound state found on one grid only ({a:?} vs {b:?})")))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairClass {
    /// `(λ + ε) μ_max(1, 0) < 1`
    UnboundWithMargin,
    /// `|λ μ_max(1, 0) - 1| ≤ resonance_tol`
    Resonant,
    /// A negative-energy bound state exists.
    Bound,
    /// Below threshold but closer than the margin `ε`.
    Subcritical,
}

impl PairClass {
    pub fn name(self) -> &'static str {
        match self {
            PairClass::UnboundWithMargin => "unbound_with_margin",
            PairClass::Resonant => "resonant",
            PairClass::Bound => "bound",
            PairClass::Subcritical => "subcritical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margins {
    pub epsilon: f64,
    pub resonance_tol: f64,
}

impl Default for Margins {
    fn default() -> Self {
        Self { epsilon: 0.1, resonance_tol: RESONANCE_TOL }
    }
}

pub fn classify_pair(pot: &PotentialSpec, coupling: f64, margins: Margins, grid: &Grid1d) -> Result<PairClass> {
    if pot.is_zero() || coupling == 0.0 {
        return Ok(PairClass::UnboundWithMargin);
    }
    let mu1 = unit_mu(pot, 0.0, grid)?;
    if (coupling * mu1 - 1.0).abs() <= margins.resonance_tol {
        return Ok(PairClass::Resonant);
    }
    if (coupling + margins.epsilon) * mu1 < 1.0 {
        return Ok(PairClass::UnboundWithMargin);
    }
    match shooting_ground_energy(pot, coupling, 1e-12)? {
        Some(e) if e < 0.0 => Ok(PairClass::Bound),
        _ => Ok(PairClass::Subcritical),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::radial_grid;
    use std::f64::consts::PI;

    fn well() -> PotentialSpec {
        PotentialSpec::square_well(1.0, 1.0).unwrap()
    }

    #[test]
    fn green_row_integral_matches_quadrature() {
        let g = Grid1d::composite(&[0.0, 0.7, 3.0], 40);
        for k in [0.0, 1e-9, 1e-3, 0.5, 4.0] {
            let exact = green_row_integral(k, 0.7, 3.0);
            let num = g.integrate(|x| reduced_green(k, 0.7, x));
            assert!((exact - num).abs() < 1e-12 * exact.max(1.0), "k={k}");
        }
    }

    #[test]
    fn square_well_threshold() {
        let grid = radial_grid(&well(), 64);
        let l = critical_coupling(&well(), &grid, 1e-8).unwrap();
        assert!((l - PI * PI / 4.0).abs() < 1e-6 * l, "{l}");
        let mu = unit_mu(&well(), 0.0, &grid).unwrap();
        assert!((mu - 4.0 / (PI * PI)).abs() < 1e-6);
    }

    #[test]
    fn zero_coupling_gives_zero_matrix() {
        let grid = radial_grid(&well(), 16);
        let op = assemble_bs(&well(), 0.0, 0.3, &grid).unwrap();
        assert!(linalg::frobenius_sq(&op.matrix) == 0.0);
        let p = principal_eigenpair(&op).unwrap();
        assert_eq!(p.mu, 0.0);
        assert!(p.is_degenerate());
        assert!(matches!(critical_coupling(&PotentialSpec::zero(), &grid, 1e-8), Err(Error::ZeroPotential)));
    }

    #[test]
    fn matrix_symmetric_nonnegative_and_decays() {
        let g = PotentialSpec::gaussian(1.0, 1.0).unwrap();
        let grid = radial_grid(&g, 48);
        let op = assemble_bs(&g, 1.0, 0.2, &grid).unwrap();
        assert!(linalg::max_asymmetry(&op.matrix) < 1e-12);
        for i in 0..grid.len() {
            for j in 0..grid.len() {
                assert!(op.matrix[(i, j)] >= 0.0);
            }
        }
        let big = assemble_bs(&g, 1.0, 1e3, &grid).unwrap();
        let norm = linalg::sym_spectral_norm(&big.matrix).unwrap();
        // ‖L(k)‖ ≤ λ ‖V‖_∞ / k²
        assert!(norm < 1e-2 && norm <= 1.0 / 1e6 * 1.0001);
    }

    #[test]
    fn shooting_brackets_threshold() {
        let l = PI * PI / 4.0;
        assert!(shooting_ground_energy(&well(), l + 0.1, 1e-12).unwrap().unwrap() < 0.0);
        assert!(shooting_ground_energy(&well(), l - 0.1, 1e-12).unwrap().is_none());
        assert!(shooting_ground_energy(&well(), 0.0, 1e-12).unwrap().is_none());
    }

    #[test]
    fn shooting_matches_square_well_transcendental_equation() {
        // ground state: √(λ+E) cot √(λ+E) = -√(-E)
        let lam = 5.0;
        let e = shooting_ground_energy(&well(), lam, 1e-13).unwrap().unwrap();
        let q = (lam + e).sqrt();
        assert!((q / q.tan() + (-e).sqrt()).abs() < 1e-8);
    }

    #[test]
    fn classification_examples() {
        let grid = radial_grid(&well(), 64);
        let m = Margins { epsilon: 0.2, resonance_tol: RESONANCE_TOL };
        assert_eq!(classify_pair(&well(), 1.0, m, &grid).unwrap(), PairClass::UnboundWithMargin);
        let ls = critical_coupling(&well(), &grid, 1e-8).unwrap();
        assert_eq!(classify_pair(&well(), ls, m, &grid).unwrap(), PairClass::Resonant);
        assert_eq!(classify_pair(&well(), 2.0 * ls, m, &grid).unwrap(), PairClass::Bound);
        assert_eq!(classify_pair(&well(), ls - 0.1, m, &grid).unwrap(), PairClass::Subcritical);
    }

    #[test]
    fn resonance_data_is_positive_and_normalised() {
        let grid = radial_grid(&well(), 64);
        let res = resonance_data(&well(), &grid).unwrap();
        assert!(res.a_coefficient > 0.0);
        assert!((linalg::norm2(&res.phi0) - 1.0).abs() < 1e-12);
        assert!(res.phi0.iter().all(|&x| x >= -1e-12));
    }

    #[test]
    fn square_well_resonance_coefficient_closed_form() {
        // the zero-energy solution is u = sin(πr/2) and φ0 ∝ √λ u, so
        // a = (λ ∫ r u dr)² / (λ ∫ u² dr) = 8/π²
        let l = PI * PI / 4.0;
        let num = l * 4.0 / (PI * PI);
        let den = l * 0.5; // ∫ sin² = 1/2
        let a_exact = num * num / den;
        let grid = radial_grid(&well(), 64);
        let res = resonance_data(&well(), &grid).unwrap();
        assert!((res.a_coefficient - a_exact).abs() < 1e-7 * a_exact, "{} vs {a_exact}", res.a_coefficient);
    }
}
