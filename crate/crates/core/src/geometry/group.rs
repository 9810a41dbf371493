//! Reflection groups generated by the face reflections of a polytope,
//! enumerated by breadth-first search over words, plus the bounded
//! tessellation certificate.

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::isometry::Isometry;
use super::linalg::{cross3, dist, dot, norm, sub};
use super::polytope::Polytope;
use crate::error::{invalid, Error, Result};

/// Default cap on the number of enumerated group elements.
pub const DEFAULT_BUDGET: usize = 200_000;
/// Two isometries closer than this in max-norm on `(Q, t)` are identified.
pub const DEDUP_TOL: f64 = 1e-9;

/// Vertex/normal/edge data of a placed copy `g(Ω)`.
#[derive(Debug, Clone)]
pub struct Placed {
    pub vertices: Vec<Vec<f64>>,
    pub normals: Vec<Vec<f64>>,
    pub edge_dirs: Vec<Vec<f64>>,
    pub centroid: Vec<f64>,
}

impl Placed {
    pub fn new(omega: &Polytope, g: &Isometry) -> Self {
        let vertices = g.image_vertices(omega);
        let normals = omega.faces.iter().map(|f| g.apply_linear(&f.normal)).collect();
        let edge_dirs = omega
            .edges
            .iter()
            .map(|&(i, j)| {
                let d = sub(&vertices[j], &vertices[i]);
                let l = norm(&d);
                d.iter().map(|x| x / l).collect()
            })
            .collect();
        Self {
            centroid: g.apply(&omega.centroid),
            vertices,
            normals,
            edge_dirs,
        }
    }
}

fn project_range(vs: &[Vec<f64>], axis: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in vs {
        let p = dot(v, axis);
        lo = lo.min(p);
        hi = hi.max(p);
    }
    (lo, hi)
}

/// Largest separating gap over the candidate axes of the separating-axis
/// theorem. Positive: disjoint with at least that distance; zero: touching;
/// negative: interiors overlap by at least `-gap` along every axis.
pub fn separation(a: &Placed, b: &Placed) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let mut test = |axis: &[f64]| {
        let (alo, ahi) = project_range(&a.vertices, axis);
        let (blo, bhi) = project_range(&b.vertices, axis);
        let g = (blo - ahi).max(alo - bhi);
        if g > best {
            best = g;
        }
    };
    for nrm in a.normals.iter().chain(&b.normals) {
        test(nrm);
    }
    for ea in &a.edge_dirs {
        for eb in &b.edge_dirs {
            let c = cross3(ea, eb);
            let l = norm(&c);
            if l > 1e-9 {
                let u: Vec<f64> = c.iter().map(|x| x / l).collect();
                test(&u);
            }
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct ReflectionGroup {
    pub radius: f64,
    pub generators: Vec<Isometry>,
    /// All enumerated elements; index 0 is the identity.
    pub elements: Vec<Isometry>,
    /// Separation of each element's image from `Ω̄` (0 when touching).
    pub gaps: Vec<f64>,
    /// Indices of elements whose image closure meets `Ω̄`, identity included.
    pub neighbors: Vec<usize>,
}

impl ReflectionGroup {
    pub fn neighbor_elements(&self) -> Vec<Isometry> {
        self.neighbors.iter().map(|&i| self.elements[i].clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Group elements whose image lies within `radius` of `Ω̄`, found by
/// breadth-first search over words in the face reflections.
pub fn reflection_group(omega: &Polytope, radius: f64) -> Result<ReflectionGroup> {
    let gens = omega.faces.iter().map(Isometry::face_reflection).collect();
    reflection_group_from(omega, gens, radius, DEFAULT_BUDGET)
}

/// Same with explicit generators and element budget.
pub fn reflection_group_from(omega: &Polytope, generators: Vec<Isometry>, radius: f64, budget: usize) -> Result<ReflectionGroup> {
    let enumeration = enumerate(omega, &generators, radius, budget);
    match enumeration.overflow {
        true => Err(Error::Budget(format!(
            "more than {budget} group elements within radius {radius}; the polytope is probably not tessellating"
        ))),
        false => Ok(enumeration.into_group(radius, generators)),
    }
}

struct Enumeration {
    elements: Vec<Isometry>,
    placed: Vec<Placed>,
    gaps: Vec<f64>,
    overflow: bool,
}

impl Enumeration {
    fn into_group(self, radius: f64, generators: Vec<Isometry>) -> ReflectionGroup {
        let scale = self.placed[0].vertices.iter().map(|v| norm(v)).fold(1.0, f64::max);
        let neighbors = self
            .gaps
            .iter()
            .enumerate()
            .filter(|(_, &g)| g <= 1e-9 * scale)
            .map(|(i, _)| i)
            .collect();
        ReflectionGroup {
            radius,
            generators,
            elements: self.elements,
            gaps: self.gaps,
            neighbors,
        }
    }
}

fn hash_key(p: &[f64], cell: f64) -> Vec<i64> {
    p.iter().map(|x| (x / cell).floor() as i64).collect()
}

fn neighbor_keys(key: &[i64]) -> Vec<Vec<i64>> {
    let n = key.len();
    let mut out = Vec::with_capacity(3usize.pow(n as u32));
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        let mut k = key.to_vec();
        for x in k.iter_mut() {
            *x += (c % 3) as i64 - 1;
            c /= 3;
        }
        out.push(k);
    }
    out
}

fn enumerate(omega: &Polytope, generators: &[Isometry], radius: f64, budget: usize) -> Enumeration {
    let id = Isometry::identity(omega.dim);
    let base = Placed::new(omega, &id);
    let scale = omega.diameter.max(omega.vertices.iter().map(|v| norm(v)).fold(0.0, f64::max));
    let cell = 1e-6 * scale.max(1e-12);
    let mut index: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    index.entry(hash_key(&base.centroid, cell)).or_default().push(0);
    let mut out = Enumeration {
        elements: vec![id],
        placed: vec![base.clone()],
        gaps: vec![f64::NEG_INFINITY],
        overflow: false,
    };
    let tol = 1e-9 * scale;
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for gen in generators {
            let cand = out.elements[i].compose(gen);
            let c = cand.apply(&omega.centroid);
            let key = hash_key(&c, cell);
            let dup = neighbor_keys(&key)
                .iter()
                .filter_map(|k| index.get(k))
                .flatten()
                .any(|&j| out.elements[j].distance(&cand) <= DEDUP_TOL * scale.max(1.0));
            if dup {
                continue;
            }
            let placed = Placed::new(omega, &cand);
            let gap = separation(&base, &placed);
            if gap > radius + tol {
                continue;
            }
            if out.elements.len() >= budget {
                out.overflow = true;
                return out;
            }
            let k = out.elements.len();
            index.entry(key).or_default().push(k);
            out.elements.push(cand);
            out.placed.push(placed);
            out.gaps.push(gap.max(0.0));
            queue.push_back(k);
        }
    }
    out.gaps[0] = 0.0;
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateStatus {
    VerifiedToRadius,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// Two distinct group elements whose images have overlapping interiors.
    Overlap { first: Isometry, second: Isometry, penetration: f64 },
    /// A point of the test ball not covered by any enumerated image.
    Uncovered { point: Vec<f64> },
    /// Enumeration hit the element budget without finding an overlap.
    Budget { elements: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TessellationCertificate {
    pub status: CertificateStatus,
    pub radius: f64,
    pub elements: usize,
    pub samples: usize,
    pub uncovered: usize,
    pub witness: Option<Witness>,
}

/// Bounded check of the strict tessellation property: pairwise interior
/// disjointness of all images within `radius`, and Monte Carlo covering of
/// the ball of radius `radius/2` around the centroid. Not a proof for `ℝⁿ`.
pub fn strict_tessellation_check(omega: &Polytope, radius: f64, samples: usize) -> Result<TessellationCertificate> {
    strict_tessellation_check_with(omega, radius, samples, 50_000, 0xFE121)
}

pub fn strict_tessellation_check_with(
    omega: &Polytope,
    radius: f64,
    samples: usize,
    budget: usize,
    seed: u64,
) -> Result<TessellationCertificate> {
    if radius < omega.diameter * (1.0 - 1e-12) {
        return invalid(format!("radius {radius} must be at least the diameter {}", omega.diameter));
    }
    let gens: Vec<Isometry> = omega.faces.iter().map(Isometry::face_reflection).collect();
    let en = enumerate(omega, &gens, radius, budget);
    let n_el = en.elements.len();
    let circum = omega.vertices.iter().map(|v| dist(v, &omega.centroid)).fold(0.0, f64::max);
    let scale = omega.diameter;

    // pairwise interior disjointness
    let cell = 2.0 * circum;
    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, p) in en.placed.iter().enumerate() {
        grid.entry(hash_key(&p.centroid, cell)).or_default().push(i);
    }
    let mut worst: Option<(usize, usize, f64)> = None;
    for (i, p) in en.placed.iter().enumerate() {
        for key in neighbor_keys(&hash_key(&p.centroid, cell)) {
            let Some(list) = grid.get(&key) else { continue };
            for &j in list {
                if j <= i || dist(&p.centroid, &en.placed[j].centroid) > 2.0 * circum {
                    continue;
                }
                let g = separation(p, &en.placed[j]);
                if g < -1e-7 * scale && worst.map_or(true, |w| g < w.2) {
                    worst = Some((i, j, g));
                }
            }
        }
        if worst.is_some() && i > 0 {
            break;
        }
    }
    if let Some((i, j, g)) = worst {
        return Ok(TessellationCertificate {
            status: CertificateStatus::Violated,
            radius,
            elements: n_el,
            samples: 0,
            uncovered: 0,
            witness: Some(Witness::Overlap {
                first: en.elements[i].clone(),
                second: en.elements[j].clone(),
                penetration: -g,
            }),
        });
    }
    if en.overflow {
        return Ok(TessellationCertificate {
            status: CertificateStatus::Violated,
            radius,
            elements: n_el,
            samples: 0,
            uncovered: 0,
            witness: Some(Witness::Budget { elements: n_el }),
        });
    }

    // covering of the ball of radius/2 around the centroid
    let inverses: Vec<Isometry> = en.elements.iter().map(|g| g.inverse()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = omega.dim;
    let half = 0.5 * radius;
    let mut uncovered = 0;
    let mut first_miss = None;
    let mut pre = vec![0.0; n];
    for _ in 0..samples {
        let p = loop {
            let cand: Vec<f64> = (0..n).map(|_| rng.gen_range(-half..half)).collect();
            if norm(&cand) <= half {
                break cand.iter().zip(&omega.centroid).map(|(a, b)| a + b).collect::<Vec<f64>>();
            }
        };
        let mut hit = false;
        'search: for key in neighbor_keys(&hash_key(&p, cell)) {
            let Some(list) = grid.get(&key) else { continue };
            for &j in list {
                if dist(&p, &en.placed[j].centroid) > circum * (1.0 + 1e-9) {
                    continue;
                }
                inverses[j].apply_into(&p, &mut pre);
                if omega.contains(&pre, 1e-9 * scale) {
                    hit = true;
                    break 'search;
                }
            }
        }
        if !hit {
            uncovered += 1;
            first_miss.get_or_insert(p);
        }
    }
    let status = if uncovered == 0 {
        CertificateStatus::VerifiedToRadius
    } else {
        CertificateStatus::Violated
    };
    Ok(TessellationCertificate {
        status,
        radius,
        elements: n_el,
        samples,
        uncovered,
        witness: first_miss.map(|point| Witness::Uncovered { point }),
    })
}
