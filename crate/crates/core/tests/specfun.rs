//! Special-function checks against frozen high-precision references.

use polyspec::specfun::{bessel_j, h, hdot, mu_hat, omega, BallKernel};
use std::f64::consts::PI;

/// (order, t, J_order(t)) computed with 30-digit arithmetic.
const BESSEL_TABLE: &[(f64, f64, f64)] = &[
    (0.0, 0.1, 0.99750156206604003228),
    (0.0, 1.0, 0.76519768655796655145),
    (0.0, 3.9, -0.40182601488763990503),
    (0.0, 4.1, -0.38866967983585368303),
    (0.0, 7.0, 0.30007927051955559665),
    (0.0, 12.0, 0.047689310796833536624),
    (0.0, 12.5, 0.14688405470042110231),
    (0.0, 20.0, 0.16702466434058315473),
    (0.0, 24.9, 0.083245968353015681694),
    (0.0, 25.1, 0.10827567149994928907),
    (0.0, 30.0, -0.086367983581040211336),
    (0.0, 50.0, 0.055812327669251815005),
    (0.0, 100.0, 0.019985850304223122424),
    (0.0, 500.0, -0.034100556880731998265),
    (0.0, 1000.0, 0.024786686152420174561),
    (0.5, 0.1, 0.25189294032600094573),
    (0.5, 1.0, 0.67139670714180309042),
    (0.5, 3.9, -0.27787441472791870898),
    (0.5, 4.1, -0.3224397207353059635),
    (0.5, 7.0, 0.19812877407634482015),
    (0.5, 12.0, -0.12358853595594194375),
    (0.5, 12.5, -0.014967249458668382989),
    (0.5, 20.0, 0.16288076385502987091),
    (0.5, 24.9, -0.03687956258717677693),
    (0.5, 25.1, -0.0052133943692701785279),
    (0.5, 30.0, -0.14392965337039988914),
    (0.5, 50.0, -0.029605831888924612568),
    (0.5, 100.0, -0.040402132716252123744),
    (0.5, 500.0, -0.016691259174642976677),
    (0.5, 1000.0, 0.02086326660509382773),
    (1.0, 0.1, 0.049937526036241997556),
    (1.0, 1.0, 0.44005058574493351596),
    (1.0, 3.9, -0.027244039620779926253),
    (1.0, 4.1, -0.10327325774733870179),
    (1.0, 7.0, -0.0046828234823458326991),
    (1.0, 12.0, -0.22344710449062761237),
    (1.0, 12.5, -0.16548380461475971846),
    (1.0, 20.0, 0.066833124175850045579),
    (1.0, 24.9, -0.13485569953140874334),
    (1.0, 25.1, -0.11463478413442272782),
    (1.0, 30.0, -0.11875106261662293652),
    (1.0, 50.0, -0.097511828125175137661),
    (1.0, 100.0, -0.077145352014112158033),
    (1.0, 500.0, 0.010472613470372292844),
    (1.0, 1000.0, 0.0047283119070895239176),
    (1.5, 0.1, 0.0084020343015001428999),
    (1.5, 1.0, 0.2402978391234270109),
    (1.5, 3.9, 0.2220446244606523961),
    (1.5, 4.1, 0.14786387349844929248),
    (1.5, 7.0, -0.19905171329249354882),
    (1.5, 12.0, -0.20466344849652968759),
    (1.5, 12.5, -0.22637633819446598575),
    (1.5, 20.0, -0.064662866592310355005),
    (1.5, 24.9, -0.15706695781298933157),
    (1.5, 25.1, -0.15938106347852936112),
    (1.5, 30.0, -0.027267945711177687796),
    (1.5, 50.0, -0.10947687298831803539),
    (1.5, 100.0, -0.069207112795890604984),
    (1.5, 500.0, 0.031504553557114804935),
    (1.5, 1000.0, -0.014168706104322200496),
    (2.0, 0.1, 0.0012489586587999188454),
    (2.0, 1.0, 0.11490348493190048047),
    (2.0, 3.9, 0.38785471251800917362),
    (2.0, 4.1, 0.33829248093471285289),
    (2.0, 7.0, -0.30141722008594012028),
    (2.0, 12.0, -0.084930494878604805352),
    (2.0, 12.5, -0.17336146343878265726),
    (2.0, 20.0, -0.16034135192299815017),
    (2.0, 24.9, -0.094077751447907950235),
    (2.0, 25.1, -0.11740991724771205623),
    (2.0, 30.0, 0.078451246073265348901),
    (2.0, 50.0, -0.059712800794258820511),
    (2.0, 100.0, -0.021528757344505365585),
    (2.0, 500.0, 0.034142447334613487437),
    (2.0, 1000.0, -0.024777229528605995513),
    (2.5, 0.1, 0.00016808871900334127033),
    (2.5, 1.0, 0.049496810228477942271),
    (2.5, 3.9, 0.44867797200534362906),
    (2.5, 4.1, 0.43063279890490300678),
    (2.5, 7.0, -0.28343665120169919822),
    (2.5, 12.0, 0.072422673831809521857),
    (2.5, 12.5, -0.03936307170800345359),
    (2.5, 20.0, -0.17258019384387642416),
    (2.5, 24.9, 0.017955832730190110477),
    (2.5, 25.1, -0.013836135130155641526),
    (2.5, 30.0, 0.14120285879928212036),
    (2.5, 50.0, 0.023037219509625530445),
    (2.5, 100.0, 0.038325919332375405594),
    (2.5, 500.0, 0.016880286495985665507),
    (2.5, 1000.0, -0.020905772723406794331),
    (3.0, 0.1, 0.000020820315754756261429),
    (3.0, 1.0, 0.019563353982668405919),
    (3.0, 3.9, 0.42504374476745600176),
    (3.0, 4.1, 0.43331470256169270461),
    (3.0, 7.0, -0.16755558799533423603),
    (3.0, 12.0, 0.19513693953109267725),
    (3.0, 12.5, 0.11000813631434926814),
    (3.0, 20.0, -0.098901394560449675613),
    (3.0, 24.9, 0.11974280773254802844),
    (3.0, 25.1, 0.095924040349926782602),
    (3.0, 30.0, 0.12921122875972498304),
    (3.0, 50.0, 0.092734804061634432021),
    (3.0, 100.0, 0.076284201720331943409),
    (3.0, 500.0, -0.010199473891695384945),
    (3.0, 1000.0, -0.0048274208252039478996),
    (4.0, 0.1, 2.6028648545684032338e-7),
    (4.0, 1.0, 0.0024766389641099550438),
    (4.0, 3.9, 0.26605874097038467524),
    (4.0, 4.1, 0.29582659598483744654),
    (4.0, 7.0, 0.15779814466136791797),
    (4.0, 12.0, 0.18249896464415114398),
    (4.0, 12.5, 0.22616536886967030596),
    (4.0, 20.0, 0.13067093355486324749),
    (4.0, 24.9, 0.12293144005816048721),
    (4.0, 25.1, 0.14033996673375033095),
    (4.0, 30.0, -0.052609000321320352293),
    (4.0, 50.0, 0.070840977281654952354),
    (4.0, 100.0, 0.026105809447725282189),
    (4.0, 500.0, -0.034264841021313832056),
    (4.0, 1000.0, 0.024748265003654771826),
];

#[test]
fn bessel_matches_reference_table() {
    for &(nu, t, want) in BESSEL_TABLE {
        let got = bessel_j(nu, t).unwrap();
        // relative accuracy away from zeros, absolute near them
        let tol = 1e-12 * want.abs().max(1e-3 * (1.0 / t.max(1.0)).sqrt());
        assert!((got - want).abs() <= tol, "J_{nu}({t}) = {got}, want {want}");
    }
}

#[test]
fn hdot_matches_central_difference() {
    for n in [2usize, 3] {
        let mut t: f64 = 0.01;
        while t <= 50.0 {
            let d = 1e-5 * t.max(1.0);
            let fd = (h(n, t + d).unwrap() - h(n, t - d).unwrap()) / (2.0 * d);
            let an = hdot(n, t).unwrap();
            assert!((fd - an).abs() < 1e-8, "n={n} t={t}: {fd} vs {an}");
            t *= 1.13;
        }
    }
}

#[test]
fn h_decay_envelope_is_bounded() {
    for n in [2usize, 3] {
        let k = BallKernel::new(n).unwrap();
        let mut worst: f64 = 0.0;
        let mut t: f64 = 10.0;
        while t <= 1e3 {
            worst = worst.max(k.h(t).abs() * t.powf((n as f64 + 1.0) / 2.0));
            t *= 1.01;
        }
        // Asymptotically |h_n| t^{(n+1)/2} ≤ Γ(n/2+1) 2^{n/2} sqrt(2/π) ≈ 1.6 (n=2), 2.4 (n=3).
        assert!(worst < 4.0, "n={n}: envelope {worst}");
    }
}

#[test]
fn h_bounded_by_one() {
    for n in [2usize, 3, 4] {
        for i in 0..5000 {
            let t = i as f64 * 0.05;
            assert!(h(n, t).unwrap().abs() <= 1.0 + 1e-15);
        }
    }
}

fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    polyspec::quad::gauss_legendre(m)
}

/// ω_n h_n(|k|) equals ∫_{B_1} e^{-ik·r} dr; the right side is done here by
/// brute-force quadrature in polar/spherical coordinates without Bessel calls.
#[test]
fn ball_transform_matches_direct_integral() {
    let (x, w) = gauss_legendre(64);
    for i in 0..20 {
        let t = 0.37 + 1.9 * i as f64;
        // n = 2: ∫_0^1 r ∫_0^{2π} cos(t r cos θ) dθ dr with panels in θ
        let mut s2 = 0.0;
        for (xr, wr) in x.iter().zip(&w) {
            let r = 0.5 * (xr + 1.0);
            let mut inner = 0.0;
            for p in 0..16 {
                for (xt, wt) in x.iter().zip(&w) {
                    let th = (p as f64 + 0.5 * (xt + 1.0)) * 2.0 * PI / 16.0;
                    inner += wt * PI / 16.0 * (t * r * th.cos()).cos();
                }
            }
            s2 += 0.5 * wr * r * inner;
        }
        let want2 = omega(2) * h(2, t).unwrap();
        assert!((s2 - want2).abs() < 1e-8, "n=2 t={t}: {s2} vs {want2}");
        // n = 3: 2π ∫_0^1 r² ∫_{-1}^{1} cos(t r u) du dr
        let mut s3 = 0.0;
        for (xr, wr) in x.iter().zip(&w) {
            let r = 0.5 * (xr + 1.0);
            let mut inner = 0.0;
            for p in 0..16 {
                for (xu, wu) in x.iter().zip(&w) {
                    let u = -1.0 + (p as f64 + 0.5 * (xu + 1.0)) * 2.0 / 16.0;
                    inner += wu / 16.0 * (t * r * u).cos();
                }
            }
            s3 += 0.5 * wr * 2.0 * PI * r * r * inner;
        }
        let want3 = omega(3) * h(3, t).unwrap();
        assert!((s3 - want3).abs() < 1e-8, "n=3 t={t}: {s3} vs {want3}");
    }
}

#[test]
fn sphere_transform_in_3d_is_sinc() {
    for i in 0..200 {
        let t = 0.01 + i as f64 * 0.731;
        let v = mu_hat(3, t).unwrap() * t;
        assert!((v - 4.0 * PI * t.sin()).abs() < 1e-12);
    }
}

#[test]
fn h3_closed_form() {
    for i in 1..400 {
        let t = i as f64 * 0.25;
        let want = 3.0 * (t.sin() - t * t.cos()) / (t * t * t);
        let tol = if t < 1.0 { 1e-9 } else { 1e-13 };
        assert!((h(3, t).unwrap() - want).abs() < tol, "t={t}");
    }
}
