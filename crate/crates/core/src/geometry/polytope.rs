//! Convex polytopes in half-space form with face data and a cell
//! decomposition used for sampling and quadrature.

use serde::{Deserialize, Serialize};

use super::linalg::{cross3, det, dot, norm, sub};
use crate::error::{invalid, Error, Result};

/// One facet `{ r : n·r = α }` with unit inward normal `n`; the polytope lies
/// on the side `n·r > α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub measure: f64,
}

/// Pieces the interior is cut into.
#[derive(Debug, Clone, PartialEq)]
pub enum Cells {
    /// `origin + B u`, `u ∈ [0,1]^n`, columns of `B` given as `basis[i]`.
    Affine { origin: Vec<f64>, basis: Vec<Vec<f64>> },
    /// Simplices given by their `n+1` vertices.
    Simplices(Vec<Vec<Vec<f64>>>),
}

/// JSON descriptor of a built-in fixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeDescriptor {
    pub kind: String,
    #[serde(default)]
    pub parameters: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    pub descriptor: PolytopeDescriptor,
    pub dim: usize,
    pub faces: Vec<Face>,
    pub vertices: Vec<Vec<f64>>,
    pub volume: f64,
    pub boundary_measure: f64,
    pub diameter: f64,
    pub centroid: Vec<f64>,
    /// Vertex indices lying on each face.
    pub face_vertices: Vec<Vec<usize>>,
    /// Vertex index pairs spanning an edge (only filled for `dim == 3`).
    pub edges: Vec<(usize, usize)>,
    pub cells: Cells,
    cell_cumulative: Vec<f64>,
}

pub const KINDS: &[&str] = &[
    "box",
    "square",
    "cube",
    "equilateral-triangle",
    "right-isosceles-triangle",
    "triangle-30-60-90",
    "triangle-50-60-70",
    "prism-equilateral",
    "prism-30-60-90",
    "prism-45-45-90",
    "tetrahedron-quadrirectangular",
    "tetrahedron-trirectangular",
    "tetrahedron-disphenoid",
    "parallelepiped",
];

/// Build a fixture from its tag and parameter list.
///
/// Tags and parameters:
/// `box` (side lengths, one per dimension), `square`/`cube` (optional side),
/// the triangles (side `a`), the prisms (`a`, height `h`), the tetrahedra
/// (`a`), `parallelepiped` (row-major basis vectors).
pub fn make_polytope(kind: &str, parameters: &[f64]) -> Result<Polytope> {
    if parameters.iter().any(|p| !p.is_finite()) {
        return invalid("parameters must be finite");
    }
    let positive = |ps: &[f64]| -> Result<()> {
        if ps.iter().any(|&p| p <= 0.0) {
            return Err(Error::InvalidArgument(format!("nonpositive side length in {ps:?}")));
        }
        Ok(())
    };
    let one = |ps: &[f64]| -> Result<f64> {
        match ps {
            [] => Ok(1.0),
            [a] => {
                positive(&[*a])?;
                Ok(*a)
            }
            _ => invalid(format!("{kind} takes one parameter")),
        }
    };
    let two = |ps: &[f64]| -> Result<(f64, f64)> {
        match ps {
            [] => Ok((1.0, 1.0)),
            [a, h] => {
                positive(&[*a, *h])?;
                Ok((*a, *h))
            }
            _ => invalid(format!("{kind} takes two parameters")),
        }
    };
    let desc = PolytopeDescriptor {
        kind: kind.to_string(),
        parameters: parameters.to_vec(),
    };
    let s3 = 3f64.sqrt();
    let mut p = match kind {
        "box" => {
            if parameters.len() < 2 {
                return invalid("box needs at least two side lengths");
            }
            positive(parameters)?;
            Polytope::axis_box(parameters)
        }
        "square" => {
            let a = one(parameters)?;
            Polytope::axis_box(&[a, a])
        }
        "cube" => {
            let a = one(parameters)?;
            Polytope::axis_box(&[a, a, a])
        }
        "equilateral-triangle" => {
            let a = one(parameters)?;
            Polytope::simplex(vec![vec![0.0, 0.0], vec![a, 0.0], vec![0.5 * a, 0.5 * s3 * a]])?
        }
        "right-isosceles-triangle" => {
            let a = one(parameters)?;
            Polytope::simplex(vec![vec![0.0, 0.0], vec![a, 0.0], vec![a, a]])?
        }
        "triangle-30-60-90" => {
            let a = one(parameters)?;
            Polytope::simplex(vec![vec![0.0, 0.0], vec![a, 0.0], vec![0.0, s3 * a]])?
        }
        "triangle-50-60-70" => {
            let a = one(parameters)?;
            Polytope::simplex(triangle_from_angles(a, 50.0, 60.0))?
        }
        "prism-equilateral" => {
            let (a, h) = two(parameters)?;
            Polytope::prism(&[[0.0, 0.0], [a, 0.0], [0.5 * a, 0.5 * s3 * a]], h)?
        }
        "prism-30-60-90" => {
            let (a, h) = two(parameters)?;
            Polytope::prism(&[[0.0, 0.0], [a, 0.0], [0.0, s3 * a]], h)?
        }
        "prism-45-45-90" => {
            let (a, h) = two(parameters)?;
            Polytope::prism(&[[0.0, 0.0], [a, 0.0], [a, a]], h)?
        }
        "tetrahedron-quadrirectangular" => {
            let a = one(parameters)?;
            Polytope::simplex(vec![
                vec![0.0, 0.0, 0.0],
                vec![a, 0.0, 0.0],
                vec![a, a, 0.0],
                vec![a, a, a],
            ])?
        }
        "tetrahedron-trirectangular" => {
            let a = one(parameters)?;
            Polytope::simplex(vec![
                vec![0.0, 0.0, 0.0],
                vec![a, 0.0, 0.0],
                vec![0.5 * a, 0.5 * a, 0.0],
                vec![0.5 * a, 0.5 * a, 0.5 * a],
            ])?
        }
        "tetrahedron-disphenoid" => {
            let a = one(parameters)?;
            let c = 0.5 * a;
            Polytope::simplex(vec![
                vec![0.0, 0.0, 0.0],
                vec![2.0 * c, 0.0, 0.0],
                vec![c, c, c],
                vec![c, c, -c],
            ])?
        }
        "parallelepiped" => {
            let n = (parameters.len() as f64).sqrt().round() as usize;
            if n < 2 || n * n != parameters.len() {
                return invalid("parallelepiped needs n*n basis entries, n >= 2");
            }
            let basis: Vec<Vec<f64>> = parameters.chunks(n).map(|c| c.to_vec()).collect();
            Polytope::parallelepiped(&basis)?
        }
        other => return Err(Error::InvalidArgument(format!("unknown polytope kind '{other}'"))),
    };
    p.descriptor = desc;
    Ok(p)
}

/// Triangle with base `a` on the x-axis and the given angles (degrees) at
/// `(0,0)` and `(a,0)`.
fn triangle_from_angles(a: f64, alpha_deg: f64, beta_deg: f64) -> Vec<Vec<f64>> {
    let (al, be) = (alpha_deg.to_radians(), beta_deg.to_radians());
    let gamma = std::f64::consts::PI - al - be;
    let side_b = a * be.sin() / gamma.sin();
    vec![vec![0.0, 0.0], vec![a, 0.0], vec![side_b * al.cos(), side_b * al.sin()]]
}

impl Polytope {
    /// Axis-aligned box `∏ [0, L_i]`.
    pub fn axis_box(sides: &[f64]) -> Polytope {
        let n = sides.len();
        let mut faces = Vec::with_capacity(2 * n);
        for i in 0..n {
            let measure: f64 = sides.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, l)| l).product();
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            faces.push(Face {
                normal: e.clone(),
                offset: 0.0,
                measure,
            });
            e[i] = -1.0;
            faces.push(Face {
                normal: e,
                offset: -sides[i],
                measure,
            });
        }
        let mut vertices = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            vertices.push((0..n).map(|i| if mask >> i & 1 == 1 { sides[i] } else { 0.0 }).collect());
        }
        let basis = (0..n)
            .map(|i| {
                let mut b = vec![0.0; n];
                b[i] = sides[i];
                b
            })
            .collect();
        let volume = sides.iter().product();
        Polytope::assemble(
            PolytopeDescriptor {
                kind: "box".into(),
                parameters: sides.to_vec(),
            },
            faces,
            vertices,
            volume,
            Cells::Affine {
                origin: vec![0.0; n],
                basis,
            },
        )
    }

    /// `{ Σ c_i v_i : 0 < c_i < 1 }`.
    pub fn parallelepiped(basis: &[Vec<f64>]) -> Result<Polytope> {
        let n = basis.len();
        if basis.iter().any(|b| b.len() != n) {
            return invalid("basis must be square");
        }
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| basis[j][i]);
        let vol = m.determinant().abs();
        if vol < 1e-12 {
            return invalid("basis vectors are linearly dependent");
        }
        let inv = m.clone().try_inverse().ok_or_else(|| Error::InvalidArgument("singular basis".into()))?;
        let mut faces = Vec::with_capacity(2 * n);
        for i in 0..n {
            // row i of B^{-1} gives the coordinate functional c_i
            let row: Vec<f64> = (0..n).map(|j| inv[(i, j)]).collect();
            let rn = norm(&row);
            let normal: Vec<f64> = row.iter().map(|x| x / rn).collect();
            let measure = vol * rn;
            faces.push(Face {
                normal: normal.clone(),
                offset: 0.0,
                measure,
            });
            faces.push(Face {
                normal: normal.iter().map(|x| -x).collect(),
                offset: -1.0 / rn,
                measure,
            });
        }
        let mut vertices = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            let mut v = vec![0.0; n];
            for (i, b) in basis.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    for k in 0..n {
                        v[k] += b[k];
                    }
                }
            }
            vertices.push(v);
        }
        Ok(Polytope::assemble(
            PolytopeDescriptor {
                kind: "parallelepiped".into(),
                parameters: basis.concat(),
            },
            faces,
            vertices,
            vol,
            Cells::Affine {
                origin: vec![0.0; n],
                basis: basis.to_vec(),
            },
        ))
    }

    /// Triangle (2D) or tetrahedron (3D) from its vertices.
    pub fn simplex(vertices: Vec<Vec<f64>>) -> Result<Polytope> {
        let n = vertices.len() - 1;
        if !(2..=3).contains(&n) || vertices.iter().any(|v| v.len() != n) {
            return invalid("simplex constructor supports triangles and tetrahedra");
        }
        let volume = simplex_volume(&vertices);
        if volume <= 1e-14 {
            return invalid("degenerate simplex");
        }
        let mut faces = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let others: Vec<&Vec<f64>> = vertices.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, v)| v).collect();
            let (mut normal, measure) = if n == 2 {
                let d = sub(others[1], others[0]);
                let len = norm(&d);
                (vec![-d[1] / len, d[0] / len], len)
            } else {
                let c = cross3(&sub(others[1], others[0]), &sub(others[2], others[0]));
                let len = norm(&c);
                (c.iter().map(|x| x / len).collect::<Vec<_>>(), 0.5 * len)
            };
            if dot(&normal, &sub(&vertices[j], others[0])) < 0.0 {
                normal.iter_mut().for_each(|x| *x = -*x);
            }
            let offset = dot(&normal, others[0]);
            faces.push(Face { normal, offset, measure });
        }
        Ok(Polytope::assemble(
            PolytopeDescriptor {
                kind: "simplex".into(),
                parameters: vertices.concat(),
            },
            faces,
            vertices.clone(),
            volume,
            Cells::Simplices(vec![vertices]),
        ))
    }

    /// Right prism over a triangle, `T × [0, h]`.
    pub fn prism(tri: &[[f64; 2]; 3], h: f64) -> Result<Polytope> {
        let base = Polytope::simplex(tri.iter().map(|p| p.to_vec()).collect())?;
        let mut faces: Vec<Face> = base
            .faces
            .iter()
            .map(|f| Face {
                normal: vec![f.normal[0], f.normal[1], 0.0],
                offset: f.offset,
                measure: f.measure * h,
            })
            .collect();
        faces.push(Face {
            normal: vec![0.0, 0.0, 1.0],
            offset: 0.0,
            measure: base.volume,
        });
        faces.push(Face {
            normal: vec![0.0, 0.0, -1.0],
            offset: -h,
            measure: base.volume,
        });
        let lift = |p: &[f64; 2], z: f64| vec![p[0], p[1], z];
        let (a0, b0, c0) = (lift(&tri[0], 0.0), lift(&tri[1], 0.0), lift(&tri[2], 0.0));
        let (a1, b1, c1) = (lift(&tri[0], h), lift(&tri[1], h), lift(&tri[2], h));
        let cells = vec![
            vec![a0.clone(), b0.clone(), c0.clone(), a1.clone()],
            vec![b0.clone(), c0.clone(), a1.clone(), b1.clone()],
            vec![c0.clone(), a1.clone(), b1.clone(), c1.clone()],
        ];
        Ok(Polytope::assemble(
            PolytopeDescriptor {
                kind: "prism".into(),
                parameters: vec![],
            },
            faces,
            vec![a0, b0, c0, a1, b1, c1],
            base.volume * h,
            Cells::Simplices(cells),
        ))
    }

    fn assemble(descriptor: PolytopeDescriptor, faces: Vec<Face>, vertices: Vec<Vec<f64>>, volume: f64, cells: Cells) -> Polytope {
        let dim = vertices[0].len();
        let boundary_measure = faces.iter().map(|f| f.measure).sum();
        let mut diameter: f64 = 0.0;
        for (i, a) in vertices.iter().enumerate() {
            for b in &vertices[i + 1..] {
                diameter = diameter.max(norm(&sub(a, b)));
            }
        }
        let scale = diameter.max(1e-300);
        let face_vertices: Vec<Vec<usize>> = faces
            .iter()
            .map(|f| {
                vertices
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| (dot(&f.normal, v) - f.offset).abs() < 1e-9 * scale)
                    .map(|(k, _)| k)
                    .collect()
            })
            .collect();
        let mut edges = Vec::new();
        if dim == 3 {
            for i in 0..vertices.len() {
                for j in i + 1..vertices.len() {
                    let shared = face_vertices.iter().filter(|fv| fv.contains(&i) && fv.contains(&j)).count();
                    if shared >= 2 {
                        edges.push((i, j));
                    }
                }
            }
        }
        let (centroid, cell_cumulative) = match &cells {
            Cells::Affine { origin, basis } => {
                let mut c = origin.clone();
                for b in basis {
                    for k in 0..dim {
                        c[k] += 0.5 * b[k];
                    }
                }
                (c, vec![1.0])
            }
            Cells::Simplices(list) => {
                let mut c = vec![0.0; dim];
                let mut cum = Vec::with_capacity(list.len());
                let mut acc = 0.0;
                for s in list {
                    let v = simplex_volume(s);
                    acc += v;
                    cum.push(acc);
                    for p in s {
                        for k in 0..dim {
                            c[k] += v * p[k] / (dim as f64 + 1.0);
                        }
                    }
                }
                c.iter_mut().for_each(|x| *x /= acc);
                cum.iter_mut().for_each(|x| *x /= acc);
                (c, cum)
            }
        };
        Polytope {
            descriptor,
            dim,
            faces,
            vertices,
            volume,
            boundary_measure,
            diameter,
            centroid,
            face_vertices,
            edges,
            cells,
            cell_cumulative,
        }
    }

    pub fn from_descriptor(d: &PolytopeDescriptor) -> Result<Polytope> {
        make_polytope(&d.kind, &d.parameters)
    }

    /// `Ω_L = { r : r/L ∈ Ω }`.
    pub fn scaled(&self, l: f64) -> Polytope {
        let n = self.dim as i32;
        let scale_pts = |v: &Vec<Vec<f64>>| v.iter().map(|p| p.iter().map(|x| x * l).collect()).collect::<Vec<Vec<f64>>>();
        let cells = match &self.cells {
            Cells::Affine { origin, basis } => Cells::Affine {
                origin: origin.iter().map(|x| x * l).collect(),
                basis: scale_pts(basis),
            },
            Cells::Simplices(list) => Cells::Simplices(list.iter().map(scale_pts).collect()),
        };
        Polytope {
            descriptor: self.descriptor.clone(),
            dim: self.dim,
            faces: self
                .faces
                .iter()
                .map(|f| Face {
                    normal: f.normal.clone(),
                    offset: f.offset * l,
                    measure: f.measure * l.powi(n - 1),
                })
                .collect(),
            vertices: scale_pts(&self.vertices),
            volume: self.volume * l.powi(n),
            boundary_measure: self.boundary_measure * l.powi(n - 1),
            diameter: self.diameter * l,
            centroid: self.centroid.iter().map(|x| x * l).collect(),
            face_vertices: self.face_vertices.clone(),
            edges: self.edges.clone(),
            cells,
            cell_cumulative: self.cell_cumulative.clone(),
        }
    }

    /// Signed slack of the tightest constraint: positive inside.
    pub fn depth(&self, r: &[f64]) -> f64 {
        self.faces
            .iter()
            .map(|f| dot(&f.normal, r) - f.offset)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, r: &[f64], tol: f64) -> bool {
        self.faces.iter().all(|f| dot(&f.normal, r) - f.offset >= -tol)
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for v in &self.vertices {
            for k in 0..self.dim {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// `Some((lo, hi))` when the polytope is an axis-aligned box.
    pub fn as_axis_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if self.faces.len() != 2 * self.dim {
            return None;
        }
        let axis = self
            .faces
            .iter()
            .all(|f| f.normal.iter().filter(|x| x.abs() > 1e-14).count() == 1);
        axis.then(|| self.bounding_box())
    }

    /// Measure-preserving map from `[0,1]^n` onto the polytope.
    pub fn map_unit_cube(&self, u: &[f64], out: &mut [f64]) {
        let n = self.dim;
        match &self.cells {
            Cells::Affine { origin, basis } => {
                out[..n].copy_from_slice(&origin[..n]);
                for (i, b) in basis.iter().enumerate() {
                    for k in 0..n {
                        out[k] += u[i] * b[k];
                    }
                }
            }
            Cells::Simplices(list) => {
                let mut u0 = u[0];
                let mut idx = 0;
                if list.len() > 1 {
                    idx = self.cell_cumulative.partition_point(|&c| c <= u0).min(list.len() - 1);
                    let lo = if idx == 0 { 0.0 } else { self.cell_cumulative[idx - 1] };
                    let hi = self.cell_cumulative[idx];
                    u0 = ((u0 - lo) / (hi - lo)).clamp(0.0, 1.0);
                }
                let s = &list[idx];
                let mut bary = [0.0f64; 3];
                if n == 2 {
                    let (mut a, mut b) = (u0, u[1]);
                    if a + b > 1.0 {
                        a = 1.0 - a;
                        b = 1.0 - b;
                    }
                    bary[0] = a;
                    bary[1] = b;
                } else {
                    let (mut a, mut b, mut c) = (u0, u[1], u[2]);
                    if a + b > 1.0 {
                        a = 1.0 - a;
                        b = 1.0 - b;
                    }
                    if b + c > 1.0 {
                        let tmp = c;
                        c = 1.0 - a - b;
                        b = 1.0 - tmp;
                    } else if a + b + c > 1.0 {
                        let tmp = c;
                        c = a + b + c - 1.0;
                        a = 1.0 - b - tmp;
                    }
                    bary = [a, b, c];
                }
                for k in 0..n {
                    let mut x = s[0][k];
                    for j in 0..n {
                        x += bary[j] * (s[j + 1][k] - s[0][k]);
                    }
                    out[k] = x;
                }
            }
        }
    }

    /// Quadrature nodes and weights on the polytope with `order` Gauss points
    /// per direction and `panels` panels per direction in each cell.
    pub fn quadrature(&self, order: usize, panels: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        let gl = crate::quad::GaussLegendre::new(order);
        let (x1, w1) = gl.composite(0.0, 1.0, panels);
        let n = self.dim;
        let mut pts = Vec::new();
        let mut wts = Vec::new();
        match &self.cells {
            Cells::Affine { origin, basis } => {
                let jac = det(basis).abs();
                let m = x1.len();
                let total = m.pow(n as u32);
                for idx in 0..total {
                    let mut rem = idx;
                    let mut p = origin.clone();
                    let mut w = jac;
                    for b in basis.iter() {
                        let k = rem % m;
                        rem /= m;
                        for c in 0..n {
                            p[c] += x1[k] * b[c];
                        }
                        w *= w1[k];
                    }
                    pts.push(p);
                    wts.push(w);
                }
            }
            Cells::Simplices(list) => {
                for s in list {
                    let vol = simplex_volume(s);
                    collapsed_simplex_rule(s, vol, &x1, &w1, &mut pts, &mut wts);
                }
            }
        }
        (pts, wts)
    }

    /// Quadrature on face `j` (a segment in 2D, a convex polygon in 3D).
    pub fn face_quadrature(&self, j: usize, order: usize, panels: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        let gl = crate::quad::GaussLegendre::new(order);
        let (x1, w1) = gl.composite(0.0, 1.0, panels);
        let ids = &self.face_vertices[j];
        let mut pts = Vec::new();
        let mut wts = Vec::new();
        if self.dim == 2 {
            let (a, b) = (&self.vertices[ids[0]], &self.vertices[ids[1]]);
            let len = norm(&sub(b, a));
            for (x, w) in x1.iter().zip(&w1) {
                pts.push(vec![a[0] + x * (b[0] - a[0]), a[1] + x * (b[1] - a[1])]);
                wts.push(w * len);
            }
        } else {
            for tri in self.face_triangles(j) {
                let area = 0.5 * norm(&cross3(&sub(&tri[1], &tri[0]), &sub(&tri[2], &tri[0])));
                collapsed_simplex_rule(&tri, area, &x1, &w1, &mut pts, &mut wts);
            }
        }
        (pts, wts)
    }

    /// Fan triangulation of a 3D face, vertices sorted by angle.
    pub fn face_triangles(&self, j: usize) -> Vec<Vec<Vec<f64>>> {
        let ids = &self.face_vertices[j];
        let pts: Vec<&Vec<f64>> = ids.iter().map(|&i| &self.vertices[i]).collect();
        let k = pts.len() as f64;
        let c: Vec<f64> = (0..3).map(|d| pts.iter().map(|p| p[d]).sum::<f64>() / k).collect();
        let nrm = &self.faces[j].normal;
        let e1 = {
            let d = sub(pts[0], &c);
            let l = norm(&d);
            d.iter().map(|x| x / l).collect::<Vec<_>>()
        };
        let e2 = cross3(nrm, &e1);
        let mut order: Vec<(f64, usize)> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let d = sub(p, &c);
                (dot(&d, &e2).atan2(dot(&d, &e1)), i)
            })
            .collect();
        order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut tris = Vec::new();
        for w in 1..order.len() - 1 {
            tris.push(vec![pts[order[0].1].clone(), pts[order[w].1].clone(), pts[order[w + 1].1].clone()]);
        }
        tris
    }

    /// Outward unit normal of face `j`.
    pub fn outward_normal(&self, j: usize) -> Vec<f64> {
        self.faces[j].normal.iter().map(|x| -x).collect()
    }

    /// Check the structural invariants; used by tests and loaders.
    pub fn validate(&self) -> Result<()> {
        for f in &self.faces {
            if (norm(&f.normal) - 1.0).abs() > 1e-12 {
                return Err(Error::Validation("face normal not unit length".into()));
            }
        }
        if self.depth(&self.centroid) <= 0.0 {
            return Err(Error::Validation("empty interior".into()));
        }
        let sum: f64 = self.faces.iter().map(|f| f.measure).sum();
        if (sum - self.boundary_measure).abs() > 1e-12 * sum {
            return Err(Error::Validation("boundary measure mismatch".into()));
        }
        Ok(())
    }
}

pub fn simplex_volume(s: &[Vec<f64>]) -> f64 {
    let n = s.len() - 1;
    let rows: Vec<Vec<f64>> = (1..=n).map(|i| sub(&s[i], &s[0])).collect();
    let mut fact = 1.0;
    for k in 2..=n {
        fact *= k as f64;
    }
    det(&rows).abs() / fact
}

/// Collapsed-coordinate Gauss rule on a simplex of dimension `s.len()-1`
/// embedded in any ambient dimension; `measure` is its volume.
fn collapsed_simplex_rule(s: &[Vec<f64>], measure: f64, x1: &[f64], w1: &[f64], pts: &mut Vec<Vec<f64>>, wts: &mut Vec<f64>) {
    let d = s.len() - 1;
    let amb = s[0].len();
    let m = x1.len();
    let mut fact = 1.0;
    for k in 2..=d {
        fact *= k as f64;
    }
    let total = m.pow(d as u32);
    for idx in 0..total {
        let mut rem = idx;
        let mut t = [0.0f64; 3];
        let mut w = measure * fact;
        for c in t.iter_mut().take(d) {
            let k = rem % m;
            rem /= m;
            *c = x1[k];
            w *= w1[k];
        }
        // Duffy: barycentric λ_1 = t0, λ_2 = (1-t0) t1, λ_3 = (1-t0)(1-t1) t2
        let mut lam = [0.0f64; 3];
        let mut rest = 1.0;
        for i in 0..d {
            lam[i] = rest * t[i];
            w *= rest;
            rest *= 1.0 - t[i];
        }
        let mut p = s[0].clone();
        for i in 0..d {
            for c in 0..amb {
                p[c] += lam[i] * (s[i + 1][c] - s[0][c]);
            }
        }
        pts.push(p);
        wts.push(w);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_rule_integrates_constants_and_linears() {
        let t = make_polytope("tetrahedron-quadrirectangular", &[1.0]).unwrap();
        let (p, w) = t.quadrature(6, 1);
        let vol: f64 = w.iter().sum();
        assert!((vol - 1.0 / 6.0).abs() < 1e-13);
        let mx: f64 = p.iter().zip(&w).map(|(p, w)| p[0] * w).sum::<f64>() / vol;
        assert!((mx - t.centroid[0]).abs() < 1e-13);
        let tri = make_polytope("equilateral-triangle", &[2.0]).unwrap();
        let (p, w) = tri.quadrature(8, 2);
        let i2: f64 = p.iter().zip(&w).map(|(p, w)| p[1] * p[1] * w).sum();
        // ∫ y² over the equilateral triangle of side a: a^4 √3 / 32 · ... computed directly
        let a: f64 = 2.0;
        let h = a * 3f64.sqrt() / 2.0;
        let want = a * h * h * h / 12.0; // base a, height h: ∫_0^h y² a(1-y/h) dy
        assert!((i2 - want).abs() < 1e-12, "{i2} vs {want}");
    }
}
