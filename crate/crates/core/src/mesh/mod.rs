//! Uniform rectangular meshes in two and three dimensions.
//!
//! Ids are lexicographic with x fastest. On periodic meshes the
//! representative of an identified node or face is the one with the
//! minimal index. Faces are grouped by the axis of their normal.

mod coloring;
mod strip;
pub mod vtk;

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

pub use coloring::{red_black_coloring, NodeColor};
pub use strip::{strips, Strip, StripFace};

/// Boundary treatment of the box domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    Periodic,
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    pub const ALL: [BoundaryCondition; 3] =
        [BoundaryCondition::Neumann, BoundaryCondition::Dirichlet, BoundaryCondition::Periodic];

    pub fn name(self) -> &'static str {
        match self {
            BoundaryCondition::Periodic => "periodic",
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "periodic" => Ok(BoundaryCondition::Periodic),
            "dirichlet" => Ok(BoundaryCondition::Dirichlet),
            "neumann" => Ok(BoundaryCondition::Neumann),
            other => Err(Error::Parse(format!("unknown boundary condition '{other}'"))),
        }
    }
}

/// Cell counts and box lengths of a structured grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    dim: usize,
    counts: [usize; 3],
    lengths: [f64; 3],
}

impl GridSpec {
    pub fn new(counts: &[usize], lengths: &[f64]) -> Result<Self> {
        let dim = counts.len();
        if dim != 2 && dim != 3 {
            return Err(invalid(format!("dimension must be 2 or 3, got {dim}")));
        }
        if lengths.len() != dim {
            return Err(invalid("counts and lengths differ in length"));
        }
        let mut c = [1usize; 3];
        let mut l = [1.0f64; 3];
        for a in 0..dim {
            if counts[a] == 0 {
                return Err(invalid(format!("cell count along axis {a} is zero")));
            }
            if !(lengths[a] > 0.0 && lengths[a].is_finite()) {
                return Err(invalid(format!("length along axis {a} must be positive")));
            }
            c[a] = counts[a];
            l[a] = lengths[a];
        }
        Ok(GridSpec { dim, counts: c, lengths: l })
    }

    /// Grid on the unit box.
    pub fn unit(counts: &[usize]) -> Result<Self> {
        Self::new(counts, &vec![1.0; counts.len()])
    }

    /// Square cells of side `h`.
    pub fn lattice(counts: &[usize], h: f64) -> Result<Self> {
        let lengths: Vec<f64> = counts.iter().map(|&n| n as f64 * h).collect();
        Self::new(counts, &lengths)
    }

    /// Square cells of side `1 / max(counts)`.
    pub fn square_cells(counts: &[usize]) -> Result<Self> {
        let m = counts.iter().copied().max().unwrap_or(1).max(1);
        Self::lattice(counts, 1.0 / m as f64)
    }

    /// `n` cells per axis on the unit box.
    pub fn cube(dim: usize, n: usize) -> Result<Self> {
        Self::unit(&vec![n; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts[..self.dim]
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths[..self.dim]
    }

    pub fn count(&self, axis: usize) -> usize {
        self.counts[axis]
    }

    pub fn cell_size(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.counts[axis] as f64
    }

    /// Largest cell size.
    pub fn h(&self) -> f64 {
        (0..self.dim).map(|a| self.cell_size(a)).fold(0.0, f64::max)
    }

    pub fn is_uniform(&self) -> bool {
        let h0 = self.cell_size(0);
        (1..self.dim).all(|a| (self.cell_size(a) - h0).abs() <= 1e-12 * h0)
    }

    pub fn num_cells(&self) -> usize {
        self.counts().iter().product()
    }

    pub fn volume(&self) -> f64 {
        self.lengths().iter().product()
    }

    /// Number of faces before any periodic identification.
    pub fn num_lattice_faces(&self) -> usize {
        (0..self.dim)
            .map(|a| (0..self.dim).map(|b| if a == b { self.counts[b] + 1 } else { self.counts[b] }).product::<usize>())
            .sum()
    }
}

/// A face of the unidentified lattice: normal axis and lattice index.
/// Along the normal the index ranges over `0..=N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeFace {
    pub normal: usize,
    pub index: [usize; 3],
}

#[derive(Clone, Debug)]
pub struct Face {
    pub normal: usize,
    pub index: [usize; 3],
    pub midpoint: [f64; 3],
    /// Cell on the negative and positive side of the face.
    pub cells: [Option<usize>; 2],
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub index: [usize; 3],
    /// Lower corner.
    pub origin: [f64; 3],
    /// Local faces ordered `[x-, x+, y-, y+, z-, z+]`.
    pub faces: [usize; 6],
    /// Local corners; bit `a` of the corner number selects the upper side along axis `a`.
    pub nodes: [usize; 8],
}

/// Dice labels of the local faces `[x-, x+, y-, y+, z-, z+]`.
pub const DICE_LABELS: [u8; 6] = [1, 6, 2, 5, 3, 4];

#[derive(Clone, Debug)]
pub struct Mesh {
    spec: GridSpec,
    bc: BoundaryCondition,
    node_dims: [usize; 3],
    face_dims: [[usize; 3]; 3],
    face_offsets: [usize; 4],
    faces: Vec<Face>,
    cells: Vec<Cell>,
    opposite_pairs: Vec<(LatticeFace, LatticeFace)>,
}

pub fn build_mesh(spec: GridSpec, bc: BoundaryCondition) -> Mesh {
    Mesh::new(spec, bc)
}

impl Mesh {
    pub fn new(spec: GridSpec, bc: BoundaryCondition) -> Mesh {
        let d = spec.dim;
        let n = spec.counts;
        let periodic = bc == BoundaryCondition::Periodic;
        let mut node_dims = [1usize; 3];
        for a in 0..d {
            node_dims[a] = if periodic { n[a] } else { n[a] + 1 };
        }
        let mut face_dims = [[1usize; 3]; 3];
        let mut face_offsets = [0usize; 4];
        for m in 0..3 {
            if m < d {
                for a in 0..d {
                    face_dims[m][a] = if a == m { node_dims[a] } else { n[a] };
                }
                face_offsets[m + 1] = face_offsets[m] + face_dims[m][..d].iter().product::<usize>();
            } else {
                face_offsets[m + 1] = face_offsets[m];
            }
        }
        let h = [spec.cell_size(0), spec.cell_size(1), if d == 3 { spec.cell_size(2) } else { 0.0 }];

        let mut mesh = Mesh {
            spec,
            bc,
            node_dims,
            face_dims,
            face_offsets,
            faces: Vec::new(),
            cells: Vec::new(),
            opposite_pairs: Vec::new(),
        };

        let mut faces = Vec::with_capacity(face_offsets[d]);
        for m in 0..d {
            let fd = face_dims[m];
            for k in 0..fd[2] {
                for j in 0..fd[1] {
                    for i in 0..fd[0] {
                        let index = [i, j, k];
                        let mut midpoint = [0.0; 3];
                        for a in 0..d {
                            midpoint[a] = if a == m { index[a] as f64 * h[a] } else { (index[a] as f64 + 0.5) * h[a] };
                        }
                        let lower = if index[m] > 0 {
                            let mut c = index;
                            c[m] -= 1;
                            Some(mesh.cell_id(c))
                        } else if periodic {
                            let mut c = index;
                            c[m] = n[m] - 1;
                            Some(mesh.cell_id(c))
                        } else {
                            None
                        };
                        let upper = if index[m] < n[m] { Some(mesh.cell_id(index)) } else { None };
                        faces.push(Face { normal: m, index, midpoint, cells: [lower, upper] });
                    }
                }
            }
        }

        let mut cells = Vec::with_capacity(mesh.spec.num_cells());
        for k in 0..n[2] {
            for j in 0..n[1] {
                for i in 0..n[0] {
                    let index = [i, j, k];
                    let mut origin = [0.0; 3];
                    for a in 0..d {
                        origin[a] = index[a] as f64 * h[a];
                    }
                    let mut cf = [usize::MAX; 6];
                    for m in 0..d {
                        let mut hi = index;
                        hi[m] += 1;
                        cf[2 * m] = mesh.lattice_face_id(LatticeFace { normal: m, index });
                        cf[2 * m + 1] = mesh.lattice_face_id(LatticeFace { normal: m, index: hi });
                    }
                    let mut nodes = [usize::MAX; 8];
                    for (c, slot) in nodes.iter_mut().enumerate().take(1 << d) {
                        let mut p = index;
                        for (a, pa) in p.iter_mut().enumerate().take(d) {
                            *pa += (c >> a) & 1;
                        }
                        *slot = mesh.lattice_node_id(p);
                    }
                    cells.push(Cell { index, origin, faces: cf, nodes });
                }
            }
        }

        let mut pairs = Vec::new();
        for m in 0..d {
            let mut dims = [1usize; 3];
            for a in 0..d {
                dims[a] = if a == m { 1 } else { n[a] };
            }
            for k in 0..dims[2] {
                for j in 0..dims[1] {
                    for i in 0..dims[0] {
                        let lo = [i, j, k];
                        let mut hi = lo;
                        hi[m] = n[m];
                        pairs.push((LatticeFace { normal: m, index: lo }, LatticeFace { normal: m, index: hi }));
                    }
                }
            }
        }

        mesh.faces = faces;
        mesh.cells = cells;
        mesh.opposite_pairs = pairs;
        mesh
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn is_periodic(&self) -> bool {
        self.bc == BoundaryCondition::Periodic
    }

    pub fn counts(&self) -> &[usize] {
        self.spec.counts()
    }

    /// Common cell size of a uniform mesh.
    pub fn uniform_h(&self) -> Option<f64> {
        self.spec.is_uniform().then(|| self.spec.cell_size(0))
    }

    pub fn num_nodes(&self) -> usize {
        self.node_dims.iter().product()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, id: usize) -> &Face {
        &self.faces[id]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, id: usize) -> &Cell {
        &self.cells[id]
    }

    pub fn cell_faces(&self, id: usize) -> &[usize] {
        &self.cells[id].faces[..2 * self.dim()]
    }

    pub fn cell_nodes(&self, id: usize) -> &[usize] {
        &self.cells[id].nodes[..1 << self.dim()]
    }

    pub fn cell_center(&self, id: usize) -> [f64; 3] {
        let c = &self.cells[id];
        let mut x = c.origin;
        for (a, xa) in x.iter_mut().enumerate().take(self.dim()) {
            *xa += 0.5 * self.spec.cell_size(a);
        }
        x
    }

    pub fn node_dims(&self) -> &[usize] {
        &self.node_dims[..self.dim()]
    }

    pub fn node_id(&self, index: [usize; 3]) -> usize {
        index[0] + self.node_dims[0] * (index[1] + self.node_dims[1] * index[2])
    }

    pub fn node_index(&self, id: usize) -> [usize; 3] {
        let nx = self.node_dims[0];
        let ny = self.node_dims[1];
        [id % nx, (id / nx) % ny, id / (nx * ny)]
    }

    /// Canonical id of a geometric lattice node (indices up to `N` inclusive).
    pub fn lattice_node_id(&self, mut index: [usize; 3]) -> usize {
        if self.is_periodic() {
            for (a, ia) in index.iter_mut().enumerate().take(self.dim()) {
                *ia %= self.spec.counts[a];
            }
        }
        self.node_id(index)
    }

    pub fn node_coords(&self, id: usize) -> [f64; 3] {
        let idx = self.node_index(id);
        let mut x = [0.0; 3];
        for (a, xa) in x.iter_mut().enumerate().take(self.dim()) {
            *xa = idx[a] as f64 * self.spec.cell_size(a);
        }
        x
    }

    pub fn cell_id(&self, index: [usize; 3]) -> usize {
        let n = &self.spec.counts;
        index[0] + n[0] * (index[1] + n[1] * index[2])
    }

    /// Cell containing `x`, clamping to the box; points on a face go to the lower cell id.
    pub fn locate(&self, x: &[f64; 3]) -> usize {
        let mut index = [0usize; 3];
        for a in 0..self.dim() {
            let h = self.spec.cell_size(a);
            let n = self.spec.counts[a];
            let t = (x[a] / h).floor();
            let mut i = if t < 0.0 { 0 } else { (t as usize).min(n - 1) };
            if i > 0 && (x[a] - i as f64 * h).abs() <= 1e-12 * h {
                i -= 1;
            }
            index[a] = i;
        }
        self.cell_id(index)
    }

    pub fn face_id(&self, normal: usize, index: [usize; 3]) -> usize {
        let fd = &self.face_dims[normal];
        self.face_offsets[normal] + index[0] + fd[0] * (index[1] + fd[1] * index[2])
    }

    /// Canonical id of a lattice face after identification.
    pub fn lattice_face_id(&self, lf: LatticeFace) -> usize {
        let mut index = lf.index;
        if self.is_periodic() {
            index[lf.normal] %= self.spec.counts[lf.normal];
        }
        self.face_id(lf.normal, index)
    }

    /// Face ids with normal along `axis`.
    pub fn faces_with_normal(&self, axis: usize) -> std::ops::Range<usize> {
        self.face_offsets[axis]..self.face_offsets[axis + 1]
    }

    /// Faces with a single incident cell (empty on periodic meshes).
    pub fn boundary_faces(&self) -> Vec<usize> {
        (0..self.faces.len()).filter(|&f| self.faces[f].cells.iter().any(Option::is_none)).collect()
    }

    /// Faces that are opposite across the box, listed before identification.
    pub fn opposite_pairs(&self) -> &[(LatticeFace, LatticeFace)] {
        &self.opposite_pairs
    }

    /// Nodes not lying on the boundary of the box.
    pub fn interior_nodes(&self) -> Vec<usize> {
        if self.is_periodic() {
            return (0..self.num_nodes()).collect();
        }
        let d = self.dim();
        (0..self.num_nodes())
            .filter(|&id| {
                let idx = self.node_index(id);
                (0..d).all(|a| idx[a] > 0 && idx[a] < self.spec.counts[a])
            })
            .collect()
    }

    /// Local position of `face` within `cell`, if it is one of its faces.
    pub fn local_face(&self, cell: usize, face: usize) -> Option<usize> {
        self.cell_faces(cell).iter().position(|&f| f == face)
    }
}
