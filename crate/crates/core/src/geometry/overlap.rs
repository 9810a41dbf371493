//! Volume of `Ω ∩ (Ω − w)` and its first-order expansion in `w`.

use super::linalg::dot;
use super::polytope::Polytope;
use crate::quad::qmc::shifted_means;

/// Sample count of the quasi-Monte Carlo fallback (3D non-boxes).
const QMC_POINTS: usize = 1 << 15;

/// `|Ω ∩ (Ω − w)|`: product formula for boxes, exact polygon clipping in 2D,
/// quasi-Monte Carlo over `Ω` otherwise.
pub fn overlap_volume(omega: &Polytope, w: &[f64]) -> f64 {
    if let Some((lo, hi)) = omega.as_axis_box() {
        return lo
            .iter()
            .zip(&hi)
            .zip(w)
            .map(|((a, b), x)| (b - a - x.abs()).max(0.0))
            .product();
    }
    if omega.dim == 2 {
        return clipped_area(omega, w);
    }
    let (mean, _, _) = shifted_means(omega.dim, QMC_POINTS, 8, 0xFE121, &|u: &[f64]| {
        let mut r = [0.0; 8];
        omega.map_unit_cube(u, &mut r[..omega.dim]);
        let shifted: Vec<f64> = r[..omega.dim].iter().zip(w).map(|(a, b)| a + b).collect();
        if omega.contains(&shifted, 0.0) {
            1.0
        } else {
            0.0
        }
    });
    mean * omega.volume
}

/// Vertices of a 2D polytope in counterclockwise order.
pub fn polygon(omega: &Polytope) -> Vec<[f64; 2]> {
    let c = &omega.centroid;
    let mut pts: Vec<[f64; 2]> = omega.vertices.iter().map(|v| [v[0], v[1]]).collect();
    pts.sort_by(|a, b| {
        let ta = (a[1] - c[1]).atan2(a[0] - c[0]);
        let tb = (b[1] - c[1]).atan2(b[0] - c[0]);
        ta.partial_cmp(&tb).unwrap()
    });
    pts
}

fn shoelace(p: &[[f64; 2]]) -> f64 {
    let mut s = 0.0;
    for i in 0..p.len() {
        let (a, b) = (p[i], p[(i + 1) % p.len()]);
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s.abs()
}

fn clipped_area(omega: &Polytope, w: &[f64]) -> f64 {
    let mut poly = polygon(omega);
    // r ∈ Ω − w  ⟺  n·r ≥ α − n·w
    for f in &omega.faces {
        let (n, a) = ([f.normal[0], f.normal[1]], f.offset - dot(&f.normal, w));
        let side = |p: &[f64; 2]| n[0] * p[0] + n[1] * p[1] - a;
        let mut out = Vec::with_capacity(poly.len() + 1);
        for i in 0..poly.len() {
            let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
            let (sp, sq) = (side(&p), side(&q));
            if sp >= 0.0 {
                out.push(p);
            }
            if (sp >= 0.0) != (sq >= 0.0) {
                let t = sp / (sp - sq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
        poly = out;
        if poly.len() < 3 {
            return 0.0;
        }
    }
    shoelace(&poly)
}

/// `∫_Ω a − ∫_{∂Ω} a (n·w)₊` with the outward normal `n`.
pub fn overlap_first_order<A: Fn(&[f64]) -> f64>(omega: &Polytope, w: &[f64], a: A) -> f64 {
    let (pts, wts) = omega.quadrature(8, 2);
    let bulk: f64 = pts.iter().zip(&wts).map(|(p, q)| q * a(p)).sum();
    let mut surface = 0.0;
    for j in 0..omega.faces.len() {
        let push = dot(&omega.outward_normal(j), w).max(0.0);
        if push == 0.0 {
            continue;
        }
        let (fp, fw) = omega.face_quadrature(j, 8, 2);
        surface += push * fp.iter().zip(&fw).map(|(p, q)| q * a(p)).sum::<f64>();
    }
    bulk - surface
}
