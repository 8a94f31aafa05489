//! Structured triangulations of the square `[0, L]^2`.
//!
//! Each of the `n x n` cells is split along its lower-left to upper-right
//! diagonal. Faces are numbered in order of first appearance while walking the
//! triangles, and every face is parameterized from its lower-indexed vertex to
//! its higher-indexed one, whichever element looks at it.

use std::collections::HashMap;
use std::io::Write;

use crate::error::{HdgError, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    /// Canonical orientation: `vertices[0] < vertices[1]`.
    pub vertices: [usize; 2],
    adjacent: [usize; 2],
    local: [usize; 2],
    n_adjacent: usize,
}

impl Face {
    /// Elements sharing this face (one for boundary faces, two otherwise).
    pub fn elements(&self) -> &[usize] {
        &self.adjacent[..self.n_adjacent]
    }

    /// Local face index of this face inside each adjacent element.
    pub fn local_indices(&self) -> &[usize] {
        &self.local[..self.n_adjacent]
    }

    pub fn is_boundary(&self) -> bool {
        self.n_adjacent == 1
    }
}

/// Affine map from the reference triangle `{x, y >= 0, x + y <= 1}`.
#[derive(Debug, Clone, Copy)]
pub struct ElementMap {
    pub origin: Point,
    pub jacobian: [[f64; 2]; 2],
    pub inverse: [[f64; 2]; 2],
    /// Determinant of the jacobian, twice the element area.
    pub det: f64,
}

impl ElementMap {
    pub fn new(a: Point, b: Point, c: Point) -> Self {
        let jacobian = [[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]];
        let det = jacobian[0][0] * jacobian[1][1] - jacobian[0][1] * jacobian[1][0];
        let inverse = [
            [jacobian[1][1] / det, -jacobian[0][1] / det],
            [-jacobian[1][0] / det, jacobian[0][0] / det],
        ];
        Self { origin: a, jacobian, inverse, det }
    }

    pub fn to_physical(&self, xi: Point) -> Point {
        let j = &self.jacobian;
        [
            self.origin[0] + j[0][0] * xi[0] + j[0][1] * xi[1],
            self.origin[1] + j[1][0] * xi[0] + j[1][1] * xi[1],
        ]
    }

    pub fn to_reference(&self, x: Point) -> Point {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        let m = &self.inverse;
        [m[0][0] * d[0] + m[0][1] * d[1], m[1][0] * d[0] + m[1][1] * d[1]]
    }

    /// Maps a reference gradient to the physical gradient (`J^{-T} g`).
    pub fn push_gradient(&self, g: Point) -> Point {
        let m = &self.inverse;
        [m[0][0] * g[0] + m[1][0] * g[1], m[0][1] * g[0] + m[1][1] * g[1]]
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    length: f64,
    subdivisions: usize,
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    faces: Vec<Face>,
    element_faces: Vec<[usize; 3]>,
    diameters: Vec<f64>,
    interior_faces: Vec<usize>,
    boundary_faces: Vec<usize>,
}

impl Mesh {
    /// Uniform triangulation of `[0, L]^2` with `n` cells per side.
    pub fn build_structured(length: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(HdgError::InvalidArgument("subdivision count must be positive".into()));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(HdgError::InvalidArgument(format!(
                "domain length must be positive, got {length}"
            )));
        }
        let cell = length / n as f64;
        let vid = |i: usize, j: usize| j * (n + 1) + i;

        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                // exact endpoints so boundary tests need no tolerance
                let x = if i == n { length } else { i as f64 * cell };
                let y = if j == n { length } else { j as f64 * cell };
                vertices.push([x, y]);
            }
        }

        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (v00, v10, v11, v01) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            }
        }

        let mut lookup: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * n * n + 2 * n);
        let mut faces: Vec<Face> = Vec::with_capacity(3 * n * n + 2 * n);
        let mut element_faces = Vec::with_capacity(triangles.len());
        for (e, tri) in triangles.iter().enumerate() {
            let mut ef = [0usize; 3];
            for l in 0..3 {
                let (a, b) = (tri[l], tri[(l + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let f = *lookup.entry(key).or_insert_with(|| {
                    faces.push(Face {
                        vertices: [key.0, key.1],
                        adjacent: [usize::MAX; 2],
                        local: [usize::MAX; 2],
                        n_adjacent: 0,
                    });
                    faces.len() - 1
                });
                let face = &mut faces[f];
                face.adjacent[face.n_adjacent] = e;
                face.local[face.n_adjacent] = l;
                face.n_adjacent += 1;
                ef[l] = f;
            }
            element_faces.push(ef);
        }

        let diameters = triangles
            .iter()
            .map(|t| {
                let d = |a: usize, b: usize| dist(vertices[a], vertices[b]);
                d(t[0], t[1]).max(d(t[1], t[2])).max(d(t[2], t[0]))
            })
            .collect();
        let interior_faces = (0..faces.len()).filter(|&f| !faces[f].is_boundary()).collect();
        let boundary_faces = (0..faces.len()).filter(|&f| faces[f].is_boundary()).collect();

        Ok(Self {
            length,
            subdivisions: n,
            vertices,
            triangles,
            faces,
            element_faces,
            diameters,
            interior_faces,
            boundary_faces,
        })
    }

    /// Uniform refinement (`n -> 2n`) together with the nesting maps.
    pub fn refine(&self) -> Result<(Mesh, RefinementMap)> {
        let fine = Mesh::build_structured(self.length, 2 * self.subdivisions)?;
        let map = RefinementMap::between(self, &fine)?;
        Ok((fine, map))
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn subdivisions(&self) -> usize {
        self.subdivisions
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> &Face {
        &self.faces[f]
    }

    pub fn element_faces(&self, e: usize) -> [usize; 3] {
        self.element_faces[e]
    }

    pub fn n_elements(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn interior_faces(&self) -> &[usize] {
        &self.interior_faces
    }

    pub fn boundary_faces(&self) -> &[usize] {
        &self.boundary_faces
    }

    pub fn diameter(&self, e: usize) -> f64 {
        self.diameters[e]
    }

    /// Largest element diameter, the mesh size `h`.
    pub fn h(&self) -> f64 {
        self.diameters.iter().cloned().fold(0.0, f64::max)
    }

    pub fn element_map(&self, e: usize) -> ElementMap {
        let [a, b, c] = self.triangles[e];
        ElementMap::new(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    pub fn area(&self, e: usize) -> f64 {
        0.5 * self.element_map(e).det
    }

    pub fn centroid(&self, e: usize) -> Point {
        let [a, b, c] = self.triangles[e].map(|v| self.vertices[v]);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    /// Face endpoints in canonical orientation.
    pub fn face_endpoints(&self, f: usize) -> (Point, Point) {
        let [a, b] = self.faces[f].vertices;
        (self.vertices[a], self.vertices[b])
    }

    pub fn face_length(&self, f: usize) -> f64 {
        let (a, b) = self.face_endpoints(f);
        dist(a, b)
    }

    pub fn face_midpoint(&self, f: usize) -> Point {
        let (a, b) = self.face_endpoints(f);
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }

    /// Unit normal of face `f` pointing out of element `e`, and the face length.
    pub fn face_geometry(&self, f: usize, e: usize) -> Result<(Point, f64)> {
        let face = self
            .faces
            .get(f)
            .ok_or_else(|| HdgError::InvalidArgument(format!("face {f} out of range")))?;
        let pos = face.elements().iter().position(|&k| k == e).ok_or_else(|| {
            HdgError::InvalidArgument(format!("face {f} is not adjacent to element {e}"))
        })?;
        Ok(self.local_face_geometry(e, face.local_indices()[pos]))
    }

    /// Outward normal and length of local face `l` of element `e`.
    pub fn local_face_geometry(&self, e: usize, l: usize) -> (Point, f64) {
        let tri = self.triangles[e];
        let a = self.vertices[tri[l]];
        let b = self.vertices[tri[(l + 1) % 3]];
        let d = [b[0] - a[0], b[1] - a[1]];
        let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
        ([d[1] / len, -d[0] / len], len)
    }

    /// Writes the plain-text mesh dump (VERTICES, TRIANGLES, FACES sections).
    pub fn write_dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "VERTICES {}", self.vertices.len())?;
        for (i, v) in self.vertices.iter().enumerate() {
            writeln!(w, "{i} {:.17e} {:.17e}", v[0], v[1])?;
        }
        writeln!(w, "TRIANGLES {}", self.triangles.len())?;
        for (i, t) in self.triangles.iter().enumerate() {
            writeln!(w, "{i} {} {} {}", t[0], t[1], t[2])?;
        }
        writeln!(w, "FACES {}", self.faces.len())?;
        for (i, f) in self.faces.iter().enumerate() {
            writeln!(w, "{i} {} {} {}", f.vertices[0], f.vertices[1], u8::from(f.is_boundary()))?;
        }
        Ok(())
    }

    /// Structured element index of the cell containing `x` (lower or upper half).
    pub fn locate(&self, x: Point) -> usize {
        let n = self.subdivisions;
        let cell = self.length / n as f64;
        let i = ((x[0] / cell).floor().max(0.0) as usize).min(n - 1);
        let j = ((x[1] / cell).floor().max(0.0) as usize).min(n - 1);
        let (x0, y0) = (self.vertices[j * (n + 1) + i][0], self.vertices[j * (n + 1) + i][1]);
        let upper = (x[1] - y0) > (x[0] - x0);
        2 * (j * n + i) + usize::from(upper)
    }
}

fn dist(a: Point, b: Point) -> f64 {
    ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
}

/// Fine-to-coarse maps between two consecutive nested meshes.
#[derive(Debug, Clone)]
pub struct RefinementMap {
    /// Coarse element containing each fine element.
    pub element_parent: Vec<usize>,
    /// Coarse boundary face containing each fine boundary face; `None` for
    /// interior fine faces.
    pub boundary_face_parent: Vec<Option<usize>>,
}

impl RefinementMap {
    fn between(coarse: &Mesh, fine: &Mesh) -> Result<Self> {
        if fine.subdivisions != 2 * coarse.subdivisions || fine.length != coarse.length {
            return Err(HdgError::NonNested(format!(
                "n={} on L={} is not a refinement of n={} on L={}",
                fine.subdivisions, fine.length, coarse.subdivisions, coarse.length
            )));
        }
        let element_parent: Vec<usize> =
            (0..fine.n_elements()).map(|e| coarse.locate(fine.centroid(e))).collect();

        let mut boundary_face_parent = vec![None; fine.n_faces()];
        for &f in fine.boundary_faces() {
            let parent_elem = element_parent[fine.faces[f].elements()[0]];
            let m = fine.face_midpoint(f);
            let parent = coarse.element_faces(parent_elem).into_iter().find(|&cf| {
                coarse.faces[cf].is_boundary() && {
                    let (a, b) = coarse.face_endpoints(cf);
                    let cross = (b[0] - a[0]) * (m[1] - a[1]) - (b[1] - a[1]) * (m[0] - a[0]);
                    cross.abs() <= 1e-12 * coarse.length * coarse.length
                }
            });
            boundary_face_parent[f] = Some(parent.ok_or_else(|| {
                HdgError::NonNested(format!("fine boundary face {f} has no coarse parent"))
            })?);
        }
        Ok(Self { element_parent, boundary_face_parent })
    }
}

/// Sequence of uniformly refined meshes, level `j + 1` having `2 n_j` cells per side.
#[derive(Debug, Clone)]
pub struct MeshHierarchy {
    levels: Vec<Mesh>,
    maps: Vec<RefinementMap>,
}

impl MeshHierarchy {
    pub fn new(length: f64, coarsest: usize, n_levels: usize) -> Result<Self> {
        if n_levels == 0 {
            return Err(HdgError::InvalidArgument("hierarchy needs at least one level".into()));
        }
        let mut levels = vec![Mesh::build_structured(length, coarsest)?];
        let mut maps = Vec::with_capacity(n_levels - 1);
        for _ in 1..n_levels {
            let (fine, map) = levels.last().expect("non-empty").refine()?;
            levels.push(fine);
            maps.push(map);
        }
        Ok(Self { levels, maps })
    }

    /// Hierarchy spanning `coarsest..=finest` subdivisions; `finest` must be
    /// `coarsest` times a power of two.
    pub fn spanning(length: f64, coarsest: usize, finest: usize) -> Result<Self> {
        let steps = doubling_steps(coarsest, finest).ok_or_else(|| {
            HdgError::NonNested(format!("n={finest} is not n={coarsest} times a power of two"))
        })?;
        Self::new(length, coarsest, steps + 1)
    }

    pub fn levels(&self) -> &[Mesh] {
        &self.levels
    }

    pub fn level(&self, j: usize) -> &Mesh {
        &self.levels[j]
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    /// Map from level `j + 1` to level `j`.
    pub fn map(&self, j: usize) -> &RefinementMap {
        &self.maps[j]
    }

    pub fn level_of(&self, n: usize) -> Option<usize> {
        self.levels.iter().position(|m| m.subdivisions == n)
    }

    /// Element of level `coarse` containing element `e` of level `fine`.
    pub fn ancestor_element(&self, fine: usize, mut e: usize, coarse: usize) -> usize {
        assert!(coarse <= fine && fine < self.levels.len());
        for j in (coarse..fine).rev() {
            e = self.maps[j].element_parent[e];
        }
        e
    }

    /// Boundary face of level `coarse` containing boundary face `f` of level `fine`.
    pub fn ancestor_boundary_face(&self, fine: usize, mut f: usize, coarse: usize) -> Option<usize> {
        assert!(coarse <= fine && fine < self.levels.len());
        for j in (coarse..fine).rev() {
            f = self.maps[j].boundary_face_parent[f]?;
        }
        Some(f)
    }
}

/// `Some(m)` when `finest == coarsest * 2^m`.
pub fn doubling_steps(coarsest: usize, finest: usize) -> Option<usize> {
    if coarsest == 0 || finest < coarsest || finest % coarsest != 0 {
        return None;
    }
    let ratio = finest / coarsest;
    ratio.is_power_of_two().then(|| ratio.trailing_zeros() as usize)
}
