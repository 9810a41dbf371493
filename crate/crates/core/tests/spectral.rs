use std::f64::consts::PI;

use polyspec::spectral::*;
use polyspec::specfun::h;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use BoundaryCondition::*;

fn dom(kind: &str) -> Domain {
    Domain::from_fixture(kind, &[]).unwrap()
}

#[test]
fn enumeration_examples() {
    let sq = dom("square");
    let e = enumerate_modes(&sq, Dirichlet, 5.0).unwrap();
    assert_eq!(e.modes.len(), 1);
    assert_eq!(e.modes[0].index, vec![1, 1]);
    assert!((e.modes[0].lambda - PI * 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(enumerate_modes(&sq, Dirichlet, 10.0).unwrap().modes.len(), 6);
    let n = enumerate_modes(&sq, Neumann, 1.0).unwrap();
    assert_eq!(n.modes.len(), 1);
    assert_eq!(n.modes[0].lambda, 0.0);
    assert!(enumerate_modes(&dom("torus"), Dirichlet, 5.0).is_err());
    assert!(enumerate_modes(&sq, Periodic, 5.0).is_err());
    assert!(enumerate_modes(&dom("equilateral-triangle"), Dirichlet, 5.0).is_err());
    assert!(enumerate_modes_with_budget(&sq, Dirichlet, 1000.0, 1000).is_err());
}

#[test]
fn counting_is_exhaustive_and_monotone() {
    // brute-force lattice count for the unit square and a 1×2 box
    for (d, sides) in [(dom("square"), [1.0, 1.0]), (Domain::from_fixture("box", &[1.0, 2.0]).unwrap(), [1.0, 2.0])] {
        let e = enumerate_modes(&d, Dirichlet, 60.0).unwrap();
        let mut prev = 0;
        for i in 1..=60 {
            let l = i as f64;
            let mut brute = 0;
            for m in 1..100 {
                for k in 1..100 {
                    if (m as f64 * PI / sides[0]).powi(2) + (k as f64 * PI / sides[1]).powi(2) <= l * l {
                        brute += 1;
                    }
                }
            }
            let c = e.count(l);
            assert_eq!(c, brute, "λ={l}");
            assert!(c >= prev);
            prev = c;
        }
    }
}

#[test]
fn closed_cutoff_includes_ties() {
    let e = enumerate_modes(&dom("square"), Dirichlet, 10.0).unwrap();
    let l = PI * 5f64.sqrt();
    // (1,2) and (2,1) sit exactly on λ
    assert_eq!(e.count(l), 3);
    assert_eq!(e.count(l * (1.0 - 1e-9)), 1);
}

fn grid_quadrature(cell: &polyspec::geometry::Polytope) -> (Vec<Vec<f64>>, Vec<f64>) {
    cell.quadrature(12, 6)
}

#[test]
fn modes_are_orthonormal() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (kind, bc) in [
        ("square", Dirichlet),
        ("square", Neumann),
        ("right-isosceles-triangle", Dirichlet),
        ("right-isosceles-triangle", Neumann),
        ("torus", Periodic),
    ] {
        let d = dom(kind);
        let e = enumerate_modes(&d, bc, 30.0).unwrap();
        let (pts, wts) = grid_quadrature(d.cell());
        let m = e.modes.len();
        let vals: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| {
                let mut v = vec![0.0; m];
                e.eval_modes(p, m, &mut v, None);
                v
            })
            .collect();
        for _ in 0..50 {
            let (i, j) = (rng.gen_range(0..m), rng.gen_range(0..m));
            let ip: f64 = vals.iter().zip(&wts).map(|(v, w)| w * v[i] * v[j]).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((ip - want).abs() < 1e-10, "{kind} {bc}: <{i},{j}> = {ip}");
        }
    }
}

#[test]
fn modes_satisfy_the_eigenvalue_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (kind, bc) in [
        ("square", Dirichlet),
        ("cube", Neumann),
        ("right-isosceles-triangle", Dirichlet),
        ("right-isosceles-triangle", Neumann),
        ("torus", Periodic),
    ] {
        let d = dom(kind);
        let e = enumerate_modes(&d, bc, 15.0).unwrap();
        let n = d.dim();
        let cell = d.cell();
        let hstep = 1e-4;
        for _ in 0..50 {
            let j = rng.gen_range(0..e.modes.len());
            let u: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..0.9)).collect();
            let mut r = vec![0.0; n];
            cell.map_unit_cube(&u, &mut r);
            let f0 = e.mode_value(j, &r);
            let mut lap = 0.0;
            for k in 0..n {
                let mut a = r.clone();
                let mut b = r.clone();
                a[k] += hstep;
                b[k] -= hstep;
                lap += (e.mode_value(j, &a) - 2.0 * f0 + e.mode_value(j, &b)) / (hstep * hstep);
            }
            let res = (-lap - e.modes[j].lambda.powi(2) * f0).abs();
            assert!(res <= 1e-9 * e.modes[j].lambda.powi(4).max(1.0) * 1e3, "{kind}: {res}");
        }
    }
}

#[test]
fn mode_gradients_match_finite_differences() {
    for (kind, bc) in [("square", Dirichlet), ("right-isosceles-triangle", Neumann), ("torus", Periodic)] {
        let d = dom(kind);
        let e = enumerate_modes(&d, bc, 12.0).unwrap();
        let m = e.modes.len();
        let r = [0.61, 0.27];
        let mut v = vec![0.0; m];
        let mut g = vec![0.0; 2 * m];
        e.eval_modes(&r, m, &mut v, Some(&mut g));
        for j in 0..m {
            for k in 0..2 {
                let mut a = r;
                let mut b = r;
                a[k] += 1e-6;
                b[k] -= 1e-6;
                let fd = (e.mode_value(j, &a) - e.mode_value(j, &b)) / 2e-6;
                assert!((fd - g[2 * j + k]).abs() < 1e-6 * e.modes[j].lambda.max(1.0), "{kind} mode {j}");
            }
        }
    }
}

#[test]
fn single_mode_kernel() {
    let e = enumerate_modes(&dom("square"), Dirichlet, 5.0).unwrap();
    let (r, rp) = ([0.3, 0.7], [0.55, 0.2]);
    let want = 4.0 * (PI * r[0]).sin() * (PI * r[1]).sin() * (PI * rp[0]).sin() * (PI * rp[1]).sin();
    assert!((e.s(5.0, &r, &rp).unwrap() - want).abs() < 1e-14);
    assert_eq!(e.s(4.0, &r, &rp).unwrap(), 0.0);
    assert!(e.s(6.0, &r, &rp).is_err());
    let (gr, grp) = e.grad_s(5.0, &r, &rp).unwrap();
    let fd = (e.s(5.0, &[r[0] + 1e-6, r[1]], &rp).unwrap() - e.s(5.0, &[r[0] - 1e-6, r[1]], &rp).unwrap()) / 2e-6;
    assert!((gr[0] - fd).abs() < 1e-7);
    let fd = (e.s(5.0, &r, &[rp[0], rp[1] + 1e-6]).unwrap() - e.s(5.0, &r, &[rp[0], rp[1] - 1e-6]).unwrap()) / 2e-6;
    assert!((grp[1] - fd).abs() < 1e-7);
}

#[test]
fn diagonal_integrates_to_counting_function() {
    for (kind, bc, lam) in [
        ("square", Dirichlet, 23.0),
        ("square", Neumann, 23.0),
        ("box", Dirichlet, 17.0),
        ("right-isosceles-triangle", Dirichlet, 30.0),
        ("right-isosceles-triangle", Neumann, 30.0),
        ("torus", Periodic, 25.0),
        ("cube", Dirichlet, 12.0),
    ] {
        let d = if kind == "box" {
            Domain::from_fixture("box", &[1.0, 2.0]).unwrap()
        } else {
            dom(kind)
        };
        let e = enumerate_modes(&d, bc, lam).unwrap();
        let (pts, wts) = d.cell().quadrature(12, 4);
        let c = e.count(lam);
        let total: f64 = pts.iter().zip(&wts).map(|(p, w)| w * e.diag_count(c, p).0).sum();
        assert!((total - c as f64).abs() < 1e-8 * c as f64, "{kind} {bc}: {total} vs {c}");
        // scaled form over Ω_λ
        let big = d.cell().scaled(lam);
        let (pts, wts) = big.quadrature(12, 4);
        let scaled: f64 = pts.iter().zip(&wts).map(|(p, w)| w * e.s_scaled(lam, p).unwrap()).sum();
        assert!((scaled - c as f64).abs() < 1e-8 * c as f64, "{kind} scaled");
    }
}

#[test]
fn weyl_predictions() {
    let sq = dom("square");
    assert!((weyl_surface_prediction(&sq, Dirichlet) + 1.0 / PI).abs() < 1e-15);
    assert!((weyl_surface_prediction(&sq, Neumann) - 1.0 / PI).abs() < 1e-15);
    assert!((weyl_surface_prediction(&dom("cube"), Dirichlet) + 3.0 / (8.0 * PI)).abs() < 1e-15);
    assert_eq!(weyl_surface_prediction(&dom("torus"), Periodic), 0.0);
    let e = enumerate_modes(&sq, Dirichlet, 100.0).unwrap();
    let avg = weyl_window_average(&e, 50.0, 100.0, 2001).unwrap();
    assert!((avg + 1.0 / PI).abs() < 0.1 / PI, "{avg}");
    assert!(weyl_residual(&e, 101.0).is_err());
}

#[test]
fn continuum_kernel_examples() {
    let torus = dom("torus");
    let k = ContinuumKernel::new(&torus, Periodic).unwrap();
    assert_eq!(k.terms.len(), 9);
    let r = [0.3, 0.4];
    let mut want = 100.0 / (4.0 * PI);
    for v in [[1.0f64, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, -1.0]] {
        let d = (v[0] * v[0] + v[1] * v[1]).sqrt();
        want += 2.0 * 100.0 / (4.0 * PI) * h(2, 10.0 * d).unwrap();
    }
    assert!((k.s(10.0, &r, &r) - want).abs() < 1e-12);

    let sq = dom("square");
    let kd = ContinuumKernel::new(&sq, Dirichlet).unwrap();
    let kn = ContinuumKernel::new(&sq, Neumann).unwrap();
    assert_eq!(kd.terms.len(), 9);
    // r on the face x = 0: identity and that face's reflection cancel (Dirichlet) or double
    let r = [0.0, 0.5];
    let face = kd
        .terms
        .iter()
        .position(|t| t.isometry.sign == -1 && t.isometry.apply(&r).iter().zip(&r).all(|(a, b)| (a - b).abs() < 1e-15))
        .unwrap();
    let pair_d = kd.terms[0].weight * kd.term(0, 10.0, &r, &r) + kd.terms[face].weight * kd.term(face, 10.0, &r, &r);
    let pair_n = kn.terms[0].weight * kn.term(0, 10.0, &r, &r) + kn.terms[face].weight * kn.term(face, 10.0, &r, &r);
    assert_eq!(pair_d, 0.0);
    assert_eq!(pair_n, 2.0);
    assert!(s_ctm(&sq, Periodic, 1.0, &r, &r).is_err());
}

#[test]
fn continuum_diagonal_gradient() {
    for (kind, bc) in [("square", Dirichlet), ("equilateral-triangle", Neumann), ("torus", Periodic), ("prism-30-60-90", Dirichlet)] {
        let d = dom(kind);
        let k = ContinuumKernel::new(&d, bc).unwrap();
        let lam = 7.0;
        let c = &d.cell().centroid;
        let r: Vec<f64> = c.iter().enumerate().map(|(i, x)| lam * (x + 0.05 * (i as f64 + 1.0))).collect();
        let (v, g) = k.diag_scaled(lam, &r);
        let x: Vec<f64> = r.iter().map(|a| a / lam).collect();
        let direct = k.s(lam, &x, &x) / lam.powi(d.dim() as i32);
        assert!((v - direct).abs() < 1e-13);
        for i in 0..d.dim() {
            let mut a = r.clone();
            let mut b = r.clone();
            a[i] += 1e-6;
            b[i] -= 1e-6;
            let fd = (k.diag_scaled(lam, &a).0 - k.diag_scaled(lam, &b).0) / 2e-6;
            assert!((fd - g[i]).abs() < 1e-8, "{kind}: {fd} {}", g[i]);
        }
    }
}

#[test]
fn exact_diagonal_gradient() {
    let d = dom("right-isosceles-triangle");
    let e = enumerate_modes(&d, Neumann, 20.0).unwrap();
    let lam = 20.0;
    let r = [12.0, 5.0];
    let (_, g) = e.diag_scaled(lam, &r).unwrap();
    for i in 0..2 {
        let mut a = r;
        let mut b = r;
        a[i] += 1e-5;
        b[i] -= 1e-5;
        let fd = (e.s_scaled(lam, &a).unwrap() - e.s_scaled(lam, &b).unwrap()) / 2e-5;
        assert!((fd - g[i]).abs() < 1e-8);
    }
}

#[test]
fn poisson_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let f = TestFunction::Gaussian { a: 1.0 };
    for (kind, bc) in [("square", Dirichlet), ("square", Neumann), ("torus", Periodic), ("right-isosceles-triangle", Dirichlet)] {
        let d = dom(kind);
        let e = enumerate_modes(&d, bc, 8.0).unwrap();
        for _ in 0..5 {
            let mut r = vec![0.0; 2];
            let mut rp = vec![0.0; 2];
            d.cell().map_unit_cube(&[rng.gen(), rng.gen()], &mut r);
            d.cell().map_unit_cube(&[rng.gen(), rng.gen()], &mut rp);
            let c = poisson_check(&e, f, &r, &rp).unwrap();
            assert!(c.difference <= 1e-10, "{kind} {bc}: {c:?}");
        }
    }
    let e = enumerate_modes(&dom("square"), Dirichlet, 8.0).unwrap();
    let c = poisson_check(&e, f, &[0.3, 0.4], &[0.3, 0.4]).unwrap();
    assert!(c.difference <= 1e-8 && c.lhs > 0.0);
    let z = poisson_check(&e, TestFunction::Zero, &[0.3, 0.4], &[0.3, 0.4]).unwrap();
    assert_eq!((z.lhs, z.rhs), (0.0, 0.0));
    let short = enumerate_modes(&dom("square"), Dirichlet, 3.0).unwrap();
    assert!(poisson_check(&short, f, &[0.3, 0.4], &[0.3, 0.4]).is_err());
}

#[test]
fn error_scan_basics() {
    let d = dom("square");
    let e = enumerate_modes(&d, Dirichlet, 20.0).unwrap();
    let k = ContinuumKernel::new(&d, Dirichlet).unwrap();
    let scan = error_scan(&e, &k, &[2.0, 10.0, 20.0], 1 << 11, &[4.0]).unwrap();
    assert_eq!(scan.records.len(), 3);
    // below the first eigenvalue S ≡ 0, so the error is |S^ctm| alone
    let first = &scan.records[0];
    assert_eq!(first.n_modes, 0);
    assert!(first.linf.is_finite() && first.linf > 0.0);
    assert!(scan.records.iter().all(|r| r.l2 > 0.0 && r.lp[0].1 > 0.0));
    assert!(error_scan(&e, &k, &[], 1 << 11, &[]).is_err());
    assert!(error_scan(&e, &k, &[30.0], 1 << 11, &[]).is_err());
    // deterministic
    let again = error_scan(&e, &k, &[2.0, 10.0, 20.0], 1 << 11, &[4.0]).unwrap();
    assert_eq!(scan, again);
}

#[test]
fn log_slope_of_power_law() {
    let xs = [1.0, 2.0, 4.0, 8.0];
    let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(0.7)).collect();
    assert!((log_slope(&xs, &ys) - 0.7).abs() < 1e-12);
}

#[test]
fn neumann_square_count() {
    // Neumann count on the unit square equals the number of (m,k) ≥ 0 pairs
    let e = enumerate_modes(&dom("square"), Neumann, 31.0).unwrap();
    let mut brute = 0;
    for m in 0..20 {
        for k in 0..20 {
            if PI * PI * ((m * m + k * k) as f64) <= 31.0 * 31.0 {
                brute += 1;
            }
        }
    }
    assert_eq!(e.count(31.0), brute);
}
