//! Pair potentials, masses, Jacobi frames, couplings and kernel constants.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::quadrature::{self, Grid1d};

/// Relative cut below which an analytic potential is treated as zero when
/// choosing a truncation radius.
pub const TAIL_CUT: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PotentialKind {
    Gaussian,
    Exponential,
    SquareWell,
    Tabulated,
}

impl PotentialKind {
    pub fn name(self) -> &'static str {
        match self {
            PotentialKind::Gaussian => "gaussian",
            PotentialKind::Exponential => "exponential",
            PotentialKind::SquareWell => "square_well",
            PotentialKind::Tabulated => "tabulated",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "gaussian" => Some(Self::Gaussian),
            "exponential" => Some(Self::Exponential),
            "square_well" | "square-well" => Some(Self::SquareWell),
            "tabulated" => Some(Self::Tabulated),
            _ => None,
        }
    }
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Non-negative magnitude of an attractive pair potential; Hamiltonians
/// subtract `coupling * value(r)`.
///
/// Analytic kinds are `depth * exp(-r^2/range^2)`, `depth * exp(-r/range)`
/// and `depth * [r < range]`. Tabulated potentials interpolate linearly and
/// vanish beyond the last radius; `depth` and `range` then report the largest
/// value and the last radius.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub depth: f64,
    pub range: f64,
    pub table: Vec<(f64, f64)>,
}

impl PotentialSpec {
    pub fn new(kind: PotentialKind, depth: f64, range: f64) -> Result<Self> {
        if kind == PotentialKind::Tabulated {
            return Err(Error::InvalidInput("tabulated potentials need samples; use PotentialSpec::tabulated".into()));
        }
        if !(depth.is_finite() && depth >= 0.0) {
            return Err(Error::InvalidInput(format!("depth must be finite and non-negative, got {depth}")));
        }
        if !(range.is_finite() && range > 0.0) {
            return Err(Error::InvalidInput(format!("range must be finite and positive, got {range}")));
        }
        Ok(Self { kind, depth, range, table: Vec::new() })
    }

    pub fn gaussian(depth: f64, range: f64) -> Result<Self> {
        Self::new(PotentialKind::Gaussian, depth, range)
    }

    pub fn exponential(depth: f64, range: f64) -> Result<Self> {
        Self::new(PotentialKind::Exponential, depth, range)
    }

    pub fn square_well(depth: f64, range: f64) -> Result<Self> {
        Self::new(PotentialKind::SquareWell, depth, range)
    }

    pub fn zero() -> Self {
        Self { kind: PotentialKind::Gaussian, depth: 0.0, range: 1.0, table: Vec::new() }
    }

    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidInput("tabulated potential needs at least two samples".into()));
        }
        if samples[0].0 < 0.0 {
            return Err(Error::InvalidInput("tabulated radii must be non-negative".into()));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidInput("tabulated radii must be strictly increasing".into()));
        }
        if samples.iter().any(|s| !s.0.is_finite() || !s.1.is_finite()) {
            return Err(Error::NonIntegrablePotential("tabulated samples must be finite".into()));
        }
        if samples.iter().any(|s| s.1 < 0.0) {
            return Err(Error::InvalidInput("tabulated values must be non-negative".into()));
        }
        Ok(Self::tabulated_unchecked(samples))
    }

    /// Builds a tabulated potential without the sign check, so that the
    /// requirement validator can report on data violating it.
    pub fn tabulated_unchecked(samples: Vec<(f64, f64)>) -> Self {
        let depth = samples.iter().map(|s| s.1).fold(0.0, f64::max);
        let range = samples.last().map(|s| s.0).unwrap_or(1.0);
        Self { kind: PotentialKind::Tabulated, depth, range, table: samples }
    }

    pub fn is_zero(&self) -> bool {
        match self.kind {
            PotentialKind::Tabulated => self.table.iter().all(|s| s.1 == 0.0),
            _ => self.depth == 0.0,
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        let r = r.abs();
        match self.kind {
            PotentialKind::Gaussian => self.depth * (-(r / self.range).powi(2)).exp(),
            PotentialKind::Exponential => self.depth * (-r / self.range).exp(),
            PotentialKind::SquareWell => {
                if r < self.range {
                    self.depth
                } else {
                    0.0
                }
            }
            PotentialKind::Tabulated => interpolate(&self.table, r),
        }
    }

    /// Radius beyond which the potential is zero or below `TAIL_CUT * depth`.
    pub fn support_radius(&self) -> f64 {
        match self.kind {
            PotentialKind::Gaussian => self.range * (-TAIL_CUT.ln()).sqrt(),
            PotentialKind::Exponential => self.range * (-TAIL_CUT.ln()),
            PotentialKind::SquareWell | PotentialKind::Tabulated => self.range,
        }
    }

    /// Radii inside the support where the potential is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match self.kind {
            PotentialKind::Tabulated => {
                self.table.iter().map(|s| s.0).filter(|&r| r > 0.0 && r < self.range).collect()
            }
            _ => Vec::new(),
        }
    }

    /// `V(s r)` as a potential of `r`.
    pub fn scaled(&self, s: f64) -> Self {
        assert!(s > 0.0);
        let mut out = self.clone();
        match self.kind {
            PotentialKind::Tabulated => {
                out.table = self.table.iter().map(|&(r, v)| (r / s, v)).collect();
                out.range = self.range / s;
            }
            _ => out.range = self.range / s,
        }
        out
    }

    /// `∫ V(|r|) d^3 r`.
    pub fn volume_integral(&self) -> f64 {
        let r3 = self.range.powi(3);
        match self.kind {
            PotentialKind::Gaussian => self.depth * PI.powf(1.5) * r3,
            PotentialKind::Exponential => self.depth * 8.0 * PI * r3,
            PotentialKind::SquareWell => self.depth * 4.0 * PI / 3.0 * r3,
            PotentialKind::Tabulated => {
                // r^2 times a linear function is cubic, so Simpson is exact per segment.
                let mut s = 0.0;
                let t = &self.table;
                if t[0].0 > 0.0 {
                    let (r1, v1) = t[0];
                    s += v1 * r1.powi(3) / 3.0;
                }
                for w in t.windows(2) {
                    let (a, fa) = (w[0].0, w[0].1 * w[0].0 * w[0].0);
                    let (b, fb) = (w[1].0, w[1].1 * w[1].0 * w[1].0);
                    let m = 0.5 * (a + b);
                    let fm = interpolate(t, m) * m * m;
                    s += (b - a) / 6.0 * (fa + 4.0 * fm + fb);
                }
                4.0 * PI * s
            }
        }
    }

    /// Gaussian average `(g/π)^{3/2} ∫ V(|r|) exp(-g r^2) d^3 r`.
    pub fn gaussian_average(&self, g: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        match self.kind {
            PotentialKind::Gaussian => {
                let q = g * self.range * self.range;
                self.depth * (q / (q + 1.0)).powf(1.5)
            }
            PotentialKind::SquareWell => {
                // (4/√π) ∫_0^t u² e^{-u²} du, i.e. erf(t) - 2t e^{-t²}/√π without the cancellation
                let t = (g.sqrt() * self.range).min(12.0);
                let panels = t.ceil().max(1.0) as usize;
                let grid = Grid1d::composite(&(0..=panels).map(|i| t * i as f64 / panels as f64).collect::<Vec<_>>(), 24);
                self.depth * 4.0 / PI.sqrt() * grid.integrate(|u| u * u * (-u * u).exp())
            }
            PotentialKind::Exponential => {
                let a = 1.0 / self.range;
                let radial = exp_gauss_moment2(a, g);
                self.depth * (g / PI).powf(1.5) * 4.0 * PI * radial
            }
            PotentialKind::Tabulated => {
                let (t, w) = gauss_legendre_cached();
                let mut s = 0.0;
                let mut breaks: Vec<f64> = self.table.iter().map(|p| p.0).collect();
                if breaks[0] > 0.0 {
                    breaks.insert(0, 0.0);
                }
                for seg in breaks.windows(2) {
                    let (a, b) = (seg[0], seg[1]);
                    let h = 0.5 * (b - a);
                    let m = 0.5 * (a + b);
                    for (ti, wi) in t.iter().zip(w.iter()) {
                        let r = m + h * ti;
                        s += h * wi * r * r * self.value(r) * (-g * r * r).exp();
                    }
                }
                (g / PI).powf(1.5) * 4.0 * PI * s
            }
        }
    }

    /// Smallest `b1` with `V(r) ≤ b1 exp(-b2 r)` on `[0, ∞)`, or `None` if no
    /// finite constant exists for this `b2`.
    pub fn minimal_envelope_b1(&self, b2: f64) -> Option<f64> {
        if self.is_zero() {
            return Some(0.0);
        }
        match self.kind {
            PotentialKind::Gaussian => {
                // maximise -r^2/R^2 + b2 r at r = b2 R^2 / 2
                let r = 0.5 * b2 * self.range * self.range;
                Some(self.depth * (-(r / self.range).powi(2) + b2 * r).exp())
            }
            PotentialKind::Exponential => {
                if b2 <= 1.0 / self.range {
                    Some(self.depth)
                } else {
                    None
                }
            }
            PotentialKind::SquareWell => Some(self.depth * (b2 * self.range).exp()),
            PotentialKind::Tabulated => {
                let mut best = 0.0f64;
                for w in self.table.windows(2) {
                    // the ratio of a linear function to exp(-b2 r) is maximised at an
                    // endpoint or at the stationary point of (v0 + s (r - r0)) e^{b2 r}
                    let (r0, v0) = w[0];
                    let (r1, v1) = w[1];
                    let s = (v1 - v0) / (r1 - r0);
                    let mut cands = vec![r0, r1];
                    if s < 0.0 && b2 > 0.0 {
                        let rs = r0 - v0 / s - 1.0 / b2;
                        if rs > r0 && rs < r1 {
                            cands.push(rs);
                        }
                    }
                    for r in cands {
                        best = best.max(self.value(r) * (b2 * r).exp());
                    }
                }
                best = best.max(self.table[0].1 * (b2 * self.table[0].0).exp());
                Some(best)
            }
        }
    }
}

fn interpolate(table: &[(f64, f64)], r: f64) -> f64 {
    let last = table.len() - 1;
    if r > table[last].0 {
        return 0.0;
    }
    if r <= table[0].0 {
        return table[0].1;
    }
    let idx = table.partition_point(|s| s.0 <= r);
    let (r0, v0) = table[idx - 1];
    if idx > last {
        return v0;
    }
    let (r1, v1) = table[idx];
    v0 + (v1 - v0) * (r - r0) / (r1 - r0)
}

fn gauss_legendre_cached() -> &'static (Vec<f64>, Vec<f64>) {
    use std::sync::OnceLock;
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| quadrature::gauss_legendre(24))
}

fn gauss_legendre_64() -> &'static (Vec<f64>, Vec<f64>) {
    use std::sync::OnceLock;
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| quadrature::gauss_legendre(64))
}

/// `∫_0^∞ r^2 e^{-a r - g r^2} dr`, evaluated in whichever scaled variable
/// keeps the integrand smooth on a bounded interval.
fn exp_gauss_moment2(a: f64, g: f64) -> f64 {
    let (t, w) = gauss_legendre_64();
    let eps = g / (a * a);
    let mut s = 0.0;
    if eps < 1.0 {
        let upper = 50.0;
        for (ti, wi) in t.iter().zip(w.iter()) {
            let u = 0.5 * upper * (ti + 1.0);
            s += 0.5 * upper * wi * u * u * (-u - eps * u * u).exp();
        }
        s / a.powi(3)
    } else {
        let upper = 7.5;
        let c = a / g.sqrt();
        for (ti, wi) in t.iter().zip(w.iter()) {
            let u = 0.5 * upper * (ti + 1.0);
            s += 0.5 * upper * wi * u * u * (-u * u - c * u).exp();
        }
        s / g.powf(1.5)
    }
}

/// Particle masses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassSet {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

impl MassSet {
    pub fn new(m1: f64, m2: f64, m3: f64) -> Result<Self> {
        for (i, m) in [m1, m2, m3].into_iter().enumerate() {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::InvalidInput(format!("mass m{} must be finite and positive, got {m}", i + 1)));
            }
        }
        Ok(Self { m1, m2, m3 })
    }

    pub fn equal() -> Self {
        Self { m1: 1.0, m2: 1.0, m3: 1.0 }
    }

    pub fn get(&self, i: usize) -> f64 {
        [self.m1, self.m2, self.m3][i]
    }

    pub fn reduced(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.get(i), self.get(j));
        a * b / (a + b)
    }

    /// Reduced mass of the pair `(i, j)` relative to the spectator.
    pub fn spectator_reduced(&self, pair: Pair) -> f64 {
        let (i, j, l) = pair.indices();
        let mij = self.get(i) + self.get(j);
        mij * self.get(l) / (mij + self.get(l))
    }
}

/// A particle pair; the remaining particle is the spectator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pair {
    P12,
    P13,
    P23,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::P12, Pair::P13, Pair::P23];

    /// Zero-based `(i, j, spectator)`.
    pub fn indices(self) -> (usize, usize, usize) {
        match self {
            Pair::P12 => (0, 1, 2),
            Pair::P13 => (0, 2, 1),
            Pair::P23 => (1, 2, 0),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Pair::P12 => 0,
            Pair::P13 => 1,
            Pair::P23 => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Pair::P12 => "12",
            Pair::P13 => "13",
            Pair::P23 => "23",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "12" | "pair12" => Some(Pair::P12),
            "13" | "pair13" => Some(Pair::P13),
            "23" | "pair23" => Some(Pair::P23),
            _ => None,
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Jacobi coordinates adapted to `pair = (i, j)` with spectator `l`:
/// `x = (r_j - r_i)/alpha`, `y = (r_l - R_ij)/gamma`, so that
/// `r_i - r_l = beta x - gamma y` and `r_j - r_l = beta_prime x - gamma y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiFrame {
    pub pair: Pair,
    pub alpha: f64,
    pub beta: f64,
    pub beta_prime: f64,
    pub gamma: f64,
}

pub fn make_jacobi_frame(masses: &MassSet, pair: Pair) -> JacobiFrame {
    let (i, j, _) = pair.indices();
    let (mi, mj) = (masses.get(i), masses.get(j));
    let alpha = 1.0 / (2.0 * masses.reduced(i, j)).sqrt();
    let gamma = 1.0 / (2.0 * masses.spectator_reduced(pair)).sqrt();
    JacobiFrame { pair, alpha, beta: -mj * alpha / (mi + mj), beta_prime: mi * alpha / (mi + mj), gamma }
}

impl JacobiFrame {
    /// Coefficients of particle positions in `(x, y)` of this frame, and of
    /// the relative-vector expansions used to change frames.
    fn relative(&self, a: usize, b: usize) -> (f64, f64) {
        // r_b - r_a in terms of (x, y) of this frame
        let (i, j, l) = self.pair.indices();
        let pos = |k: usize| -> (f64, f64) {
            // position relative to the three-body centre of mass is not needed;
            // express r_k - r_i.
            if k == i {
                (0.0, 0.0)
            } else if k == j {
                (self.alpha, 0.0)
            } else {
                debug_assert_eq!(k, l);
                (-self.beta, self.gamma)
            }
        };
        let pa = pos(a);
        let pb = pos(b);
        (pb.0 - pa.0, pb.1 - pa.1)
    }

    /// Coefficients `(w_x, w_y)` with `r_j' - r_i' = w_x x + w_y y` for the
    /// pair `other = (i', j')` expressed in this frame.
    pub fn pair_vector(&self, other: Pair) -> (f64, f64) {
        let (i, j, _) = other.indices();
        self.relative(i, j)
    }
}

/// Kinematic rotation between frames: `x_b = c x_a + s y_a` and
/// `y_b = -s' x_a + c' y_a` with `c^2 + s^2 = 1`.
pub fn kinematic_rotation(masses: &MassSet, a: Pair, b: Pair) -> (f64, f64) {
    let fa = make_jacobi_frame(masses, a);
    let fb = make_jacobi_frame(masses, b);
    let (wx, wy) = fa.pair_vector(b);
    (wx / fb.alpha, wy / fb.alpha)
}

/// Pair couplings (the `lambda`, `Theta`, `Lambda` roles) and the safety
/// margin used by the sub-threshold classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConfig {
    pub lambda12: f64,
    pub lambda13: f64,
    pub lambda23: f64,
    pub margin_epsilon: f64,
}

impl CouplingConfig {
    pub fn new(lambda12: f64, lambda13: f64, lambda23: f64, margin_epsilon: f64) -> Result<Self> {
        for (name, v) in [("lambda12", lambda12), ("lambda13", lambda13), ("lambda23", lambda23)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        if !(margin_epsilon.is_finite() && margin_epsilon > 0.0) {
            return Err(Error::InvalidInput(format!("margin_epsilon must be positive, got {margin_epsilon}")));
        }
        Ok(Self { lambda12, lambda13, lambda23, margin_epsilon })
    }

    pub fn get(&self, pair: Pair) -> f64 {
        match pair {
            Pair::P12 => self.lambda12,
            Pair::P13 => self.lambda13,
            Pair::P23 => self.lambda23,
        }
    }

    pub fn set(&mut self, pair: Pair, value: f64) {
        match pair {
            Pair::P12 => self.lambda12 = value,
            Pair::P13 => self.lambda13 = value,
            Pair::P23 => self.lambda23 = value,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.lambda12, self.lambda13, self.lambda23]
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { lambda12: s * self.lambda12, lambda13: s * self.lambda13, lambda23: s * self.lambda23, ..*self }
    }
}

/// Complete three-body problem: `H = -Δ_x - Δ_y - Σ λ_ij V_ij(|r_i - r_j|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub masses: MassSet,
    pub potentials: [PotentialSpec; 3],
    pub couplings: CouplingConfig,
}

impl ModelSpec {
    pub fn new(masses: MassSet, potentials: [PotentialSpec; 3], couplings: CouplingConfig) -> Self {
        Self { masses, potentials, couplings }
    }

    /// Equal unit masses and three identical Gaussian pairs.
    pub fn equal_mass_gaussian(depth: f64, range: f64, couplings: [f64; 3]) -> Result<Self> {
        let v = PotentialSpec::gaussian(depth, range)?;
        Ok(Self {
            masses: MassSet::equal(),
            potentials: [v.clone(), v.clone(), v],
            couplings: CouplingConfig::new(couplings[0], couplings[1], couplings[2], 0.1)?,
        })
    }

    pub fn potential(&self, pair: Pair) -> &PotentialSpec {
        &self.potentials[pair.index()]
    }

    pub fn coupling(&self, pair: Pair) -> f64 {
        self.couplings.get(pair)
    }

    pub fn frame(&self, pair: Pair) -> JacobiFrame {
        make_jacobi_frame(&self.masses, pair)
    }

    /// Pair potential as a function of the frame's own `|x|`: `V(alpha |x|)`.
    pub fn frame_potential(&self, pair: Pair) -> PotentialSpec {
        self.potential(pair).scaled(self.frame(pair).alpha)
    }

    pub fn with_couplings(&self, c: [f64; 3]) -> Self {
        let mut out = self.clone();
        out.couplings.lambda12 = c[0];
        out.couplings.lambda13 = c[1];
        out.couplings.lambda23 = c[2];
        out
    }

    pub fn max_range(&self) -> f64 {
        self.potentials.iter().filter(|p| !p.is_zero()).map(|p| p.range).fold(0.0, f64::max).max(f64::MIN_POSITIVE)
    }
}

/// The constants bounding the three-body kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConstants {
    /// `∫ V_a(alpha x) d^3x`
    pub c: f64,
    /// `∫ e^{-2|x|}/|x|^2 d^3x`
    pub c_prime: f64,
    /// `sup_p (t(p)+1)^2/|p|`
    pub c_dprime: f64,
    /// `γ^{-6} ∫ |F[√V_b](p/γ)|^2 d^3p`
    pub c_tilde: f64,
}

/// Radial quadrature for a potential in its own variable, plus the momentum
/// grid used for the spectator momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub radial: Grid1d,
    pub momentum: Grid1d,
}

impl Quadrature {
    pub fn nodes(&self) -> &[f64] {
        &self.radial.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.radial.weights
    }

    pub fn r_max(&self) -> f64 {
        self.radial.upper
    }

    pub fn p_max(&self) -> f64 {
        self.momentum.upper
    }
}

/// Default momentum panel breaks for the spectator grid.
pub const DEFAULT_MOMENTUM_BREAKS: [f64; 3] = [0.0, 1.0, 4.0];

/// Radial Gauss-Legendre grid on `(0, support]` with panels at the kinks of
/// the potential.
pub fn radial_grid(pot: &PotentialSpec, n: usize) -> Grid1d {
    let upper = if pot.is_zero() { 1.0 } else { pot.support_radius() };
    let mut breaks = vec![0.0];
    breaks.extend(pot.kinks());
    breaks.push(upper);
    if breaks.len() == 2 {
        Grid1d::gauss(0.0, upper, n)
    } else {
        Grid1d::proportional(&breaks, n, 2)
    }
}

/// Composite momentum grid with equal node counts per panel.
pub fn momentum_grid(breaks: &[f64], n: usize) -> Grid1d {
    let panels = breaks.len() - 1;
    Grid1d::composite(breaks, n.div_ceil(panels).max(1))
}

pub fn make_quadrature(pot: &PotentialSpec, radial_nodes: usize, momentum_nodes: usize) -> Quadrature {
    Quadrature { radial: radial_grid(pot, radial_nodes), momentum: momentum_grid(&DEFAULT_MOMENTUM_BREAKS, momentum_nodes) }
}

/// `t(p) = √p - 1` on `p ≤ 1`, zero outside.
pub fn t_function(p: f64) -> f64 {
    if p <= 1.0 {
        p.sqrt() - 1.0
    } else {
        0.0
    }
}

fn constants_on(pot_a: &PotentialSpec, pot_b: &PotentialSpec, frame: &JacobiFrame, grid_a: &Grid1d, grid_b: &Grid1d, momenta: &Grid1d) -> KernelConstants {
    let va = pot_a.scaled(frame.alpha);
    let c = if va.is_zero() { 0.0 } else { 4.0 * PI * grid_a.integrate(|r| r * r * va.value(r)) };
    let c_prime = 4.0 * PI * quadrature::integrate(|r: f64| (-2.0 * r).exp(), 0.0, 40.0, 1e-15, 1e-15).unwrap_or(0.5);
    let mut c_dprime = 0.0f64;
    for &p in momenta.nodes.iter().chain([1.0, momenta.upper].iter()) {
        if p > 0.0 {
            c_dprime = c_dprime.max((t_function(p) + 1.0).powi(2) / p);
        }
    }
    // Plancherel: γ^{-6}∫|F√V(p/γ)|^2 d^3p = γ^{-3} ∫ V_b d^3r
    let c_tilde = if pot_b.is_zero() { 0.0 } else { 4.0 * PI * grid_b.integrate(|r| r * r * pot_b.value(r)) / frame.gamma.powi(3) };
    KernelConstants { c, c_prime, c_dprime, c_tilde }
}

/// Kernel constants by quadrature. `quad.radial` discretises `V_a(alpha r)`;
/// fails if doubling the node counts moves a constant by more than `1e-6`
/// relative.
pub fn kernel_constants(pot_a: &PotentialSpec, pot_b: &PotentialSpec, frame: &JacobiFrame, quad: &Quadrature) -> Result<KernelConstants> {
    let n = quad.radial.len();
    let va = pot_a.scaled(frame.alpha);
    let k1 = constants_on(pot_a, pot_b, frame, &quad.radial, &radial_grid(pot_b, n), &quad.momentum);
    let k2 = constants_on(pot_a, pot_b, frame, &radial_grid(&va, 2 * n), &radial_grid(pot_b, 2 * n), &quad.momentum);
    for (name, a, b) in [("c", k1.c, k2.c), ("c_tilde", k1.c_tilde, k2.c_tilde)] {
        if (a - b).abs() > 1e-6 * b.abs().max(1e-300) {
            return Err(Error::QuadratureUnderresolved(format!("{name}: {a} vs {b} on the doubled grid")));
        }
    }
    Ok(k1)
}

/// Envelope and structural requirements checked on data.
#[derive(Debug, Clone, PartialEq)]
pub struct RequirementCheck {
    pub id: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<RequirementCheck>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, id: &str) -> Option<&RequirementCheck> {
        self.checks.iter().find(|c| c.id == id)
    }
}

/// Checks the hypotheses of the threshold theorems that can be verified on
/// the model data. `envelopes[a] = (b1, b2)` is the claimed exponential
/// envelope of pair `a` in its frame variable.
pub fn validate_requirements(model: &ModelSpec, envelopes: [(f64, f64); 3]) -> ValidationReport {
    let mut checks = Vec::new();
    let m = &model.masses;
    let masses_ok = [m.m1, m.m2, m.m3].iter().all(|x| x.is_finite() && *x > 0.0);
    checks.push(RequirementCheck { id: "R1", pass: masses_ok, detail: format!("masses ({}, {}, {})", m.m1, m.m2, m.m3) });

    for pair in Pair::ALL {
        let pot = model.potential(pair);
        let (nonneg, detail) = match pot.kind {
            PotentialKind::Tabulated => {
                let bad = pot.table.iter().find(|s| s.1 < 0.0);
                (bad.is_none(), bad.map(|s| format!("V({}) = {}", s.0, s.1)).unwrap_or_else(|| "all samples >= 0".into()))
            }
            _ => (pot.depth >= 0.0, format!("depth {}", pot.depth)),
        };
        checks.push(RequirementCheck { id: r6_id(pair), pass: nonneg, detail });
    }

    for pair in Pair::ALL {
        let pot = model.potential(pair);
        let vi = pot.volume_integral();
        let grid = radial_grid(pot, 256);
        let l2 = 4.0 * PI * grid.integrate(|r| r * r * pot.value(r).powi(2));
        let pass = vi.is_finite() && l2.is_finite();
        checks.push(RequirementCheck { id: r2_id(pair), pass, detail: format!("L1 norm {vi:.6e}, L2 norm^2 {l2:.6e}") });
    }

    for pair in Pair::ALL {
        let (b1, b2) = envelopes[pair.index()];
        let fp = model.frame_potential(pair);
        let grid = radial_grid(&fp, 512);
        let mut worst = f64::NEG_INFINITY;
        let mut at = 0.0;
        let mut samples: Vec<f64> = grid.nodes.clone();
        samples.push(0.0);
        samples.extend(fp.kinks());
        for r in samples {
            let excess = fp.value(r) - b1 * (-b2 * r).exp();
            if excess > worst {
                worst = excess;
                at = r;
            }
        }
        let tol = 1e-12 * fp.depth.max(1.0);
        let pass = b1 > 0.0 && b2 > 0.0 && worst <= tol;
        checks.push(RequirementCheck {
            id: env_id(pair),
            pass,
            detail: format!("envelope b1={b1}, b2={b2}; worst excess {worst:.3e} at |x|={at:.4}"),
        });
    }

    let v23_nonzero = !model.potential(Pair::P23).is_zero();
    checks.push(RequirementCheck { id: "R3bar", pass: v23_nonzero, detail: if v23_nonzero { "V23 nonzero".into() } else { "V23 vanishes identically".into() } });

    let couplings_ok = model.couplings.as_array().iter().all(|c| c.is_finite() && *c >= 0.0) && model.couplings.margin_epsilon > 0.0;
    checks.push(RequirementCheck { id: "couplings", pass: couplings_ok, detail: format!("{:?}", model.couplings.as_array()) });

    ValidationReport { checks }
}

fn r6_id(p: Pair) -> &'static str {
    match p {
        Pair::P12 => "R6.12",
        Pair::P13 => "R6.13",
        Pair::P23 => "R6.23",
    }
}

fn r2_id(p: Pair) -> &'static str {
    match p {
        Pair::P12 => "R2.12",
        Pair::P13 => "R2.13",
        Pair::P23 => "R2.23",
    }
}

fn env_id(p: Pair) -> &'static str {
    match p {
        Pair::P12 => "R1bar.12",
        Pair::P13 => "R1bar.13",
        Pair::P23 => "R1bar.23",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn equal_mass_frame() {
        let f = make_jacobi_frame(&MassSet::equal(), Pair::P12);
        assert!(close(f.alpha, 1.0, 1e-15));
        assert!(close(f.gamma, (0.75f64).sqrt(), 1e-15));
        assert!(close(f.beta, -0.5, 1e-15));
    }

    #[test]
    fn unequal_mass_frame_from_definitions() {
        let m = MassSet::new(1.0, 2.0, 3.0).unwrap();
        let f = make_jacobi_frame(&m, Pair::P12);
        assert!(close(f.alpha, 1.0 / (4.0f64 / 3.0).sqrt(), 1e-15));
        assert!(close(f.gamma, 1.0 / 3f64.sqrt(), 1e-15));
    }

    #[test]
    fn infinite_mass_rejected() {
        assert!(MassSet::new(1.0, 1.0, f64::INFINITY).is_err());
        assert!(MassSet::new(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn kinematic_rotation_is_orthogonal() {
        let m = MassSet::new(1.0, 2.5, 0.7).unwrap();
        for a in Pair::ALL {
            for b in Pair::ALL {
                let (c, s) = kinematic_rotation(&m, a, b);
                assert!(close(c * c + s * s, 1.0, 1e-13), "{a}->{b}");
            }
        }
        let (c, s) = kinematic_rotation(&MassSet::equal(), Pair::P12, Pair::P23);
        assert!(close(c.abs(), 0.5, 1e-14) && close(s.abs(), 0.75f64.sqrt(), 1e-14));
    }

    #[test]
    fn pair_distances_match_particle_positions() {
        // r_i - r_l = beta x - gamma y with x=(r_j-r_i)/alpha, y=(r_l-R_ij)/gamma
        let m = MassSet::new(1.3, 0.4, 2.2).unwrap();
        let r = [0.3, -1.1, 0.8];
        for pair in Pair::ALL {
            let f = make_jacobi_frame(&m, pair);
            let (i, j, l) = pair.indices();
            let (mi, mj) = (m.get(i), m.get(j));
            let x = (r[j] - r[i]) / f.alpha;
            let rij = (mi * r[i] + mj * r[j]) / (mi + mj);
            let y = (r[l] - rij) / f.gamma;
            assert!(close(r[i] - r[l], f.beta * x - f.gamma * y, 1e-13));
            assert!(close(r[j] - r[l], f.beta_prime * x - f.gamma * y, 1e-13));
            for other in Pair::ALL {
                let (a, b, _) = other.indices();
                let (wx, wy) = f.pair_vector(other);
                assert!(close(r[b] - r[a], wx * x + wy * y, 1e-13));
            }
        }
    }

    #[test]
    fn volume_integrals() {
        let g = PotentialSpec::gaussian(1.0, 1.0).unwrap();
        assert!(close(g.volume_integral(), PI.powf(1.5), 1e-14));
        let tab = PotentialSpec::tabulated(vec![(0.0, 2.0), (0.5, 2.0), (1.0, 0.0)]).unwrap();
        let grid = Grid1d::composite(&[0.0, 0.5, 1.0], 8);
        let num = 4.0 * PI * grid.integrate(|r| r * r * tab.value(r));
        assert!(close(tab.volume_integral(), num, 1e-13));
    }

    #[test]
    fn gaussian_averages_match_quadrature() {
        let g = 0.37;
        for pot in [
            PotentialSpec::gaussian(1.5, 0.8).unwrap(),
            PotentialSpec::square_well(2.0, 1.2).unwrap(),
            PotentialSpec::exponential(1.0, 0.6).unwrap(),
            PotentialSpec::tabulated(vec![(0.0, 1.0), (1.0, 0.5), (2.0, 0.0)]).unwrap(),
        ] {
            let mut breaks = vec![0.0];
            breaks.extend(pot.kinks());
            breaks.push(pot.range.min(pot.support_radius()));
            breaks.push(60.0);
            let grid = Grid1d::composite(&breaks, 80);
            let num = (g / PI).powf(1.5) * 4.0 * PI * grid.integrate(|r| r * r * pot.value(r) * (-g * r * r).exp());
            assert!(close(pot.gaussian_average(g), num, 1e-11), "{:?} {} {}", pot.kind, pot.gaussian_average(g), num);
        }
        let e = PotentialSpec::exponential(1.0, 1.0).unwrap();
        for g in [1e-8, 1e-3, 0.9, 1.1, 50.0, 1e6] {
            let grid = Grid1d::composite(&[0.0, 0.01, 0.1, 1.0, 4.0, 16.0, 60.0], 40);
            let num = (g / PI).powf(1.5) * 4.0 * PI * grid.integrate(|r| r * r * (-r - g * r * r).exp());
            assert!(close(e.gaussian_average(g), num, 1e-9), "g={g}");
        }
    }

    #[test]
    fn minimal_envelope_for_unit_gaussian() {
        let g = PotentialSpec::gaussian(1.0, 1.0).unwrap();
        let b1 = g.minimal_envelope_b1(1.0).unwrap();
        assert!(close(b1, 0.25f64.exp(), 1e-15));
    }

    #[test]
    fn kernel_constants_for_unit_gaussian() {
        let g = PotentialSpec::gaussian(1.0, 1.0).unwrap();
        let frame = JacobiFrame { pair: Pair::P12, alpha: 1.0, beta: -0.5, beta_prime: 0.5, gamma: 1.0 };
        let q = make_quadrature(&g, 64, 64);
        let k = kernel_constants(&g, &g, &frame, &q).unwrap();
        assert!(close(k.c, PI.powf(1.5), 1e-10));
        assert!(close(k.c_prime, 2.0 * PI, 1e-10));
        assert!(close(k.c_dprime, 1.0, 1e-12));
        assert!(close(k.c_tilde, PI.powf(1.5), 1e-10));
        let zero = kernel_constants(&PotentialSpec::zero(), &g, &frame, &q).unwrap();
        assert_eq!(zero.c, 0.0);
    }

    #[test]
    fn requirement_report() {
        let model = ModelSpec::equal_mass_gaussian(1.0, 1.0, [1.0, 1.0, 1.0]).unwrap();
        let env = [(0.25f64.exp(), 1.0); 3];
        let rep = validate_requirements(&model, env);
        assert!(rep.get("R1bar.12").unwrap().pass);
        let tight = validate_requirements(&model, [(1.0, 1.0); 3]);
        assert!(!tight.get("R1bar.12").unwrap().pass);
        let mut z = model.clone();
        z.potentials[2] = PotentialSpec::zero();
        assert!(!validate_requirements(&z, env).get("R3bar").unwrap().pass);
        let mut neg = model;
        neg.potentials[0] = PotentialSpec::tabulated_unchecked(vec![(0.0, 1.0), (1.0, -0.1), (2.0, 0.0)]);
        assert!(!validate_requirements(&neg, env).get("R6.12").unwrap().pass);
    }
}
