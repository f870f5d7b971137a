use std::f64::consts::PI;

use fewbody::experiments::{find_theta0, merkuriev_spreading};
use fewbody::faddeev::{self, hs_norm_k2, CouplingPath, GridSpec, RadiusScan};
use fewbody::model::{radial_grid, ModelSpec, Pair, PotentialSpec};
use fewbody::twobody::{self, Margins, PairClass};
use fewbody::variational::{build_basis, BasisSpec, VariationalProblem};
use fewbody::Error;

fn square_well() -> PotentialSpec {
    PotentialSpec::square_well(1.0, 1.0).unwrap()
}

fn gaussian_star() -> f64 {
    let g = PotentialSpec::gaussian(1.0, 1.0).unwrap();
    twobody::critical_coupling(&g, &radial_grid(&g, 24), 1e-8).unwrap()
}

fn problem(couplings: [f64; 3]) -> VariationalProblem {
    let model = ModelSpec::equal_mass_gaussian(1.0, 1.0, couplings).unwrap();
    let basis = build_basis(&BasisSpec::for_range(1.0), &model.masses).unwrap();
    VariationalProblem::new(&model, basis).unwrap()
}

#[test]
fn square_well_unit_mu_is_inverse_threshold() {
    let pot = square_well();
    let mu = twobody::unit_mu(&pot, 0.0, &radial_grid(&pot, 48)).unwrap();
    assert!((mu - 4.0 / (PI * PI)).abs() < 1e-5, "{mu}");
}

#[test]
fn bs_norm_decays_at_large_k() {
    let pot = square_well();
    assert!(twobody::unit_mu(&pot, 1e3, &radial_grid(&pot, 48)).unwrap() < 1e-2);
}

#[test]
fn square_well_binding_switches_at_threshold() {
    let pot = square_well();
    let grid = radial_grid(&pot, 48);
    let star = PI * PI / 4.0;
    assert!(twobody::bs_ground_energy(&pot, star + 0.1, &grid, 1e-10).unwrap().unwrap() < 0.0);
    assert_eq!(twobody::bs_ground_energy(&pot, star - 0.1, &grid, 1e-10).unwrap(), None);
    assert_eq!(twobody::bs_ground_energy(&pot, 0.0, &grid, 1e-10).unwrap(), None);
}

#[test]
fn pair_classes_follow_the_coupling() {
    let pot = square_well();
    let grid = radial_grid(&pot, 48);
    let star = twobody::critical_coupling(&pot, &grid, 1e-8).unwrap();
    let m = Margins { epsilon: 0.2, ..Margins::default() };
    assert_eq!(twobody::classify_pair(&pot, 1.0, m, &grid).unwrap(), PairClass::UnboundWithMargin);
    assert_eq!(twobody::classify_pair(&pot, star, m, &grid).unwrap(), PairClass::Resonant);
    assert_eq!(twobody::classify_pair(&pot, 2.0 * star, m, &grid).unwrap(), PairClass::Bound);
    assert!(matches!(twobody::critical_coupling(&PotentialSpec::zero(), &grid, 1e-8), Err(Error::ZeroPotential)));
}

#[test]
fn subthreshold_bound_holds_with_margin() {
    let pot = square_well();
    let rep = faddeev::subthreshold_bound_check(&pot, 1.0, 0.2, &[0.01, 0.1, 1.0], &radial_grid(&pot, 48)).unwrap();
    assert_eq!(rep.violations(), 0);
    assert!(!rep.saturated);
    let resonant = faddeev::subthreshold_bound_check(&pot, PI * PI / 4.0, 0.2, &[1e-3], &radial_grid(&pot, 48)).unwrap();
    assert!(resonant.saturated);
}

#[test]
fn t_function_boundary_values() {
    assert_eq!(faddeev::t_function(0.0), -1.0);
    assert_eq!(faddeev::t_function(1.0), 0.0);
    assert_eq!(faddeev::t_function(4.0), 0.0);
}

#[test]
fn radius_grows_with_overall_scale() {
    let star = gaussian_star();
    let model = ModelSpec::equal_mass_gaussian(1.0, 1.0, [0.8 * star; 3]).unwrap();
    let scan = RadiusScan::new(&model, CouplingPath::Overall, &GridSpec::default()).unwrap();
    let r: Vec<f64> = [0.0, 0.5, 1.0].iter().map(|&s| scan.radius_at(s, 1).unwrap()).collect();
    assert_eq!(r[0], 0.0);
    assert!(r[0] < r[1] && r[1] < r[2], "{r:?}");
}

#[test]
fn hs_bound_and_relabelling_symmetry() {
    let star = gaussian_star();
    let model = ModelSpec::equal_mass_gaussian(1.0, 1.0, [0.8 * star; 3]).unwrap();
    let spec = GridSpec::default();
    let a = hs_norm_k2(&model, Pair::P12, Pair::P23, 0.5, &spec).unwrap();
    let b = hs_norm_k2(&model, Pair::P12, Pair::P13, 0.5, &spec).unwrap();
    assert!(a.pass());
    assert!((a.hs_norm_sq - b.hs_norm_sq).abs() < 1e-12 * a.hs_norm_sq);
}

#[test]
fn green6_decays() {
    let rows = faddeev::green6_bound_check(&[0.5, 1.0, 10.0]).unwrap();
    assert!(rows.iter().all(|r| r.pass()));
    assert!(rows[2].g0 < 1e-4 && rows[2].bound < 1e-4);
}

#[test]
fn j_grows_with_eps0() {
    let g = PotentialSpec::gaussian(1.0, 1.0).unwrap();
    let z = [1e-3, 1e-2];
    let a = faddeev::j_epsilon_divergence(&g, 0.5, &z).unwrap();
    let b = faddeev::j_epsilon_divergence(&g, 1.0, &z).unwrap();
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert!(y.j >= x.j);
    }
}

#[test]
fn free_and_weak_systems_do_not_bind() {
    let star = gaussian_star();
    let p = problem([0.0; 3]);
    assert!(p.lowest([0.0; 3]).unwrap() >= -1e-10);
    assert_eq!(p.threshold([0.0; 3]).unwrap(), 0.0);
    let gs = p.solve([0.5 * star, 0.0, 0.0]).unwrap();
    assert!(gs.bound_energies.is_empty());
}

#[test]
fn ground_energy_falls_with_coupling() {
    let star = gaussian_star();
    let p = problem([star; 3]);
    let e: Vec<f64> = [0.8, 0.9, 1.0].iter().map(|s| p.lowest([s * star; 3]).unwrap()).collect();
    assert!(e[0] >= e[1] && e[1] >= e[2], "{e:?}");
}

#[test]
fn probability_limits() {
    let star = gaussian_star();
    let p = problem([star; 3]);
    let gs = p.solve([star; 3]).unwrap();
    let pr = fewbody::variational::probability_profile(&gs, &[0.0, 1e6]).unwrap().probabilities;
    assert_eq!(pr[0], 0.0);
    assert!((pr[1] - 1.0).abs() < 1e-8);
    assert!((gs.normalization - 1.0).abs() < 1e-10);
}

#[test]
fn theta0_rejects_empty_bracket() {
    let p = problem([1.0; 3]);
    let r = find_theta0(&p, [1.0; 3], CouplingPath::Overall, (1.0, 1.0), 1e-6, 1e-6);
    assert!(matches!(r, Err(Error::BracketInvalid(_))));
}

#[test]
fn merkuriev_limits() {
    let rows = merkuriev_spreading(&[1.0, 1e-6, 1e3], 1.0).unwrap();
    assert!((rows[0].closed_form - 0.8646647167633873).abs() < 1e-15);
    assert!(rows[1].closed_form < 1e-5);
    assert!((rows[2].closed_form - 1.0).abs() < 1e-15);
}
