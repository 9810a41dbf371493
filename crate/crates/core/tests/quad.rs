use std::f64::consts::PI;

use polyspec::geometry::make_polytope;
use polyspec::quad::*;
use polyspec::specfun::{bessel_j, h};

fn osc_spec(tol: f64) -> QuadratureSpec {
    QuadratureSpec {
        tolerance: tol,
        max_evaluations: 2_000_000,
        ..QuadratureSpec::default()
    }
}

#[test]
fn exponential_tail() {
    let r = integrate_osc_semiinfinite(|t| (-t).exp(), 2.0 * PI, &osc_spec(1e-13));
    assert!(r.converged);
    assert!((r.value - 1.0).abs() < 1e-12, "{r:?}");
}

#[test]
fn damped_sinc_against_brute_force() {
    let g = |t: f64| if t == 0.0 { 1.0 } else { t.sin() / t * (-t / 100.0).exp() };
    // brute force: 10^6 Gauss cells out to where e^{-t/100} < 1e-20
    let gl = GaussLegendre::new(6);
    let brute = gl.integrate_panels(0.0, 4700.0, 1_000_000, g);
    assert!((brute - 100f64.atan()).abs() < 1e-12);
    let r = integrate_osc_semiinfinite(g, PI, &osc_spec(1e-12));
    assert!(r.converged);
    assert!((r.value - brute).abs() < 1e-10, "{} vs {brute}", r.value);
}

#[test]
fn squared_bessel_over_t_squared() {
    let g = |t: f64| {
        if t < 1e-8 {
            0.25
        } else {
            let j = bessel_j(1.0, t).unwrap();
            j * j / (t * t)
        }
    };
    let r = integrate_osc_semiinfinite(g, PI, &osc_spec(1e-11));
    assert!(r.converged);
    assert!((r.value - 4.0 / (3.0 * PI)).abs() < 1e-8, "{r:?}");
    // brute force with 10^7 points on [0, T], plus the mean tail ∫_T^∞ dt/(πt³)
    let gl = GaussLegendre::new(5);
    let brute = gl.integrate_panels(0.0, 20_000.0, 2_000_000, g) + 1.0 / (2.0 * PI * 20_000f64.powi(2));
    assert!((r.value - brute).abs() < 1e-8, "{} vs {brute}", r.value);
}

#[test]
fn squared_ball_kernel_moment() {
    let g = |t: f64| h(3, t).unwrap().powi(2) * t;
    let r = integrate_osc_semiinfinite(g, PI, &osc_spec(1e-11));
    assert!(r.converged);
    assert!((r.value - 2.25).abs() < 1e-9, "{r:?}");
}

#[test]
fn qmc_simple_integrals() {
    let spec = QuadratureSpec::qmc(1 << 16);
    let one = qmc_integrate(|_| 1.0, 2, &spec).unwrap();
    assert_eq!(one.value, 1.0);
    let xy = qmc_integrate(|u| u[0] * u[1], 2, &spec).unwrap();
    assert!((xy.value - 0.25).abs() < 1e-5, "{xy:?}");
    assert!(xy.error_estimate > 0.0 && xy.error_estimate < 1e-4);
    assert!(qmc_integrate(|_| 1.0, 9, &spec).is_err());
    assert!(qmc_integrate(|_| 1.0, 2, &QuadratureSpec::qmc(64)).is_err());
}

#[test]
fn qmc_is_deterministic_and_seeded() {
    let f = |u: &[f64]| (u[0] + 2.0 * u[1] * u[2]).sin();
    let a = qmc_integrate(f, 3, &QuadratureSpec::qmc(1 << 14)).unwrap();
    let b = qmc_integrate(f, 3, &QuadratureSpec::qmc(1 << 14)).unwrap();
    assert_eq!(a, b);
    let c = qmc_integrate(f, 3, &QuadratureSpec::qmc(1 << 14).with_seed(7)).unwrap();
    assert_ne!(a.value, c.value);
}

#[test]
fn qmc_error_estimates_cover_truth() {
    // ∫ exp(x+y+z+w) over [0,1]^4 = (e−1)^4
    let exact = (std::f64::consts::E - 1.0).powi(4);
    let mut covered = 0;
    let runs = 60;
    for seed in 0..runs {
        let spec = QuadratureSpec::qmc(1 << 13).with_seed(1000 + seed);
        let r = qmc_integrate(|u| (u[0] + u[1] + u[2] + u[3]).exp(), 4, &spec).unwrap();
        if (r.value - exact).abs() <= 3.0 * r.error_estimate {
            covered += 1;
        }
    }
    assert!(covered as f64 >= 0.95 * runs as f64, "{covered}/{runs}");
}

/// Mean inverse distance in the unit square, closed form.
fn inverse_distance_unit_square() -> f64 {
    let r2 = 2f64.sqrt();
    4.0 / 3.0 * (1.0 - r2) + 4.0 * (1.0 + r2).ln()
}

#[test]
fn singular_pair_integral_unit_square() {
    let sq = make_polytope("square", &[]).unwrap();
    let spec = QuadratureSpec::qmc(1 << 20);
    let r = pair_integral_singular(&sq, |_, _| 1.0, 1.0, &spec).unwrap();
    let exact = inverse_distance_unit_square();
    assert!((r.value - exact).abs() < 1e-4 * exact, "{r:?} vs {exact}");
    assert!((r.value - exact).abs() < 5.0 * r.error_estimate + 1e-6);
    // plain QMC over [0,1]^4 agrees to three digits
    let plain = qmc_integrate(
        |u| 1.0 / ((u[0] - u[2]).powi(2) + (u[1] - u[3]).powi(2)).sqrt(),
        4,
        &QuadratureSpec::qmc(1 << 21),
    )
    .unwrap();
    assert!((plain.value - r.value).abs() < 1e-3 * exact, "{} vs {}", plain.value, r.value);
}

#[test]
fn singular_small_s_limit() {
    let sq = make_polytope("box", &[1.0, 2.0]).unwrap();
    let r = pair_integral_singular(&sq, |_, _| 1.0, 1e-6, &QuadratureSpec::qmc(1 << 16)).unwrap();
    assert!((r.value - 4.0).abs() < 1e-3, "{r:?}");
    assert!(pair_integral_singular(&sq, |_, _| 1.0, 2.0, &QuadratureSpec::qmc(1 << 16)).is_err());
    assert!(pair_integral_singular(&sq, |_, _| 1.0, 0.0, &QuadratureSpec::qmc(1 << 16)).is_err());
}

#[test]
fn singular_oscillating_kernel_cross_check() {
    let sq = make_polytope("square", &[]).unwrap();
    let lam = 5.0;
    let k = |r: &[f64], rp: &[f64]| {
        let d = ((r[0] - rp[0]).powi(2) + (r[1] - rp[1]).powi(2)).sqrt();
        h(2, lam * d).unwrap().powi(2)
    };
    let a = pair_integral_singular(&sq, k, 1.0, &QuadratureSpec::qmc(1 << 20)).unwrap();
    // polar form of the z-integral with the overlap weight (1−|z₁|)(1−|z₂|)
    let gl = GaussLegendre::new(10);
    let oracle = 8.0
        * gl.integrate_panels(0.0, PI / 4.0, 16, |th| {
            gl.integrate_panels(0.0, 1.0 / th.cos(), 16, |rho| {
                h(2, lam * rho).unwrap().powi(2) * (1.0 - rho * th.cos()) * (1.0 - rho * th.sin())
            })
        });
    assert!((a.value - oracle).abs() < 1e-3 * oracle, "{a:?} {oracle}");
    let b = qmc_integrate(
        |u| {
            let d = ((u[0] - u[2]).powi(2) + (u[1] - u[3]).powi(2)).sqrt();
            h(2, lam * d).unwrap().powi(2) / d
        },
        4,
        &QuadratureSpec::qmc(1 << 21),
    )
    .unwrap();
    let tol = 3.0 * (a.error_estimate.powi(2) + b.error_estimate.powi(2)).sqrt();
    assert!((a.value - b.value).abs() < tol, "{a:?} {b:?}");
}

#[test]
fn singular_ladder_matches_plain_sampler() {
    let sq = make_polytope("square", &[]).unwrap();
    let lam = 20.0;
    let k = |r: &[f64], rp: &[f64]| {
        let d = ((r[0] - rp[0]).powi(2) + (r[1] - rp[1]).powi(2)).sqrt();
        h(2, lam * d).unwrap().powi(2)
    };
    let spec = QuadratureSpec::qmc(1 << 20);
    let plain = pair_integral_singular(&sq, k, 1.0, &spec).unwrap();
    let ladder = pair_integral_singular_with(&sq, k, 1.0, &spec, &SingularOptions::ladder(sq.diameter, 2.0 / lam)).unwrap();
    let tol = 4.0 * (plain.error_estimate.powi(2) + ladder.error_estimate.powi(2)).sqrt();
    assert!((plain.value - ladder.value).abs() < tol, "{plain:?} {ladder:?}");
    assert!(ladder.error_estimate < plain.error_estimate);
}

#[test]
fn singular_relabeling_symmetry() {
    for kind in ["square", "equilateral-triangle"] {
        let p = make_polytope(kind, &[]).unwrap();
        let spec = QuadratureSpec::qmc(1 << 18);
        let a = pair_integral_singular(&p, |r, _| r[0] * r[0] + r[1], 1.0, &spec).unwrap();
        let b = pair_integral_singular(&p, |_, rp| rp[0] * rp[0] + rp[1], 1.0, &spec).unwrap();
        let tol = 3.0 * (a.error_estimate.powi(2) + b.error_estimate.powi(2)).sqrt();
        assert!((a.value - b.value).abs() <= tol, "{kind}: {a:?} {b:?}");
    }
}

#[test]
fn singular_on_triangle_and_cube() {
    // triangle: compare against plain QMC with an indicator
    let t = make_polytope("right-isosceles-triangle", &[]).unwrap();
    let r = pair_integral_singular(&t, |_, _| 1.0, 0.5, &QuadratureSpec::qmc(1 << 20)).unwrap();
    let plain = qmc_integrate(
        |u| {
            if u[1] < u[0] && u[3] < u[2] {
                ((u[0] - u[2]).powi(2) + (u[1] - u[3]).powi(2)).powf(-0.25)
            } else {
                0.0
            }
        },
        4,
        &QuadratureSpec::qmc(1 << 21),
    )
    .unwrap();
    assert!((r.value - plain.value).abs() < 2e-3 * r.value, "{r:?} {plain:?}");
    // unit cube, s = 1: mean inverse distance 1.88231...
    let cube = make_polytope("cube", &[]).unwrap();
    let c = pair_integral_singular(&cube, |_, _| 1.0, 1.0, &QuadratureSpec::qmc(1 << 20)).unwrap();
    assert!((c.value - 1.882312644).abs() < 1e-3, "{c:?}");
}
