//! Function sets spanning the discrete spaces, their kernels and
//! dimension counts.

mod dims;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem_core::{local_node_basis, CellwiseLinear, LocalLinear};
use crate::mesh::{BoundaryCondition, Mesh};

pub use dims::{constraint_rank_oracle, dim_formulas, stiffness_nullity, DimensionRecord, ORACLE_FACE_CAP};

/// `1` if `n` is even, else `0`.
pub fn e(n: usize) -> usize {
    usize::from(n % 2 == 0)
}

fn alt(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Descriptor of an alternating function.
///
/// Its face values are nonzero only on faces normal to `value_axis`. In 3D
/// the support is the layer `layer.1` of cells along axis `layer.0`; in 2D
/// there is no layer and the support is the whole mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AltSpec {
    pub value_axis: usize,
    pub layer: Option<(usize, usize)>,
}

impl AltSpec {
    pub fn planar(value_axis: usize) -> Self {
        AltSpec { value_axis, layer: None }
    }

    pub fn layered(layer_axis: usize, layer: usize, value_axis: usize) -> Self {
        AltSpec { value_axis, layer: Some((layer_axis, layer)) }
    }

    fn check(&self, mesh: &Mesh) -> Result<()> {
        let d = mesh.dim();
        let n = mesh.counts();
        if !mesh.is_periodic() {
            return Err(Error::NotRepresentable("alternating functions need a periodic mesh".into()));
        }
        if self.value_axis >= d {
            return Err(Error::OutOfRange { index: self.value_axis, len: d });
        }
        match (d, self.layer) {
            (2, None) => {
                if n[self.value_axis] % 2 != 0 {
                    return Err(Error::NotRepresentable(format!(
                        "alternating function along axis {} needs an even cell count",
                        self.value_axis
                    )));
                }
            }
            (3, Some((axis, layer))) => {
                if axis >= 3 || axis == self.value_axis || layer >= n[axis] {
                    return Err(Error::NotRepresentable(format!("bad layer {axis}/{layer}")));
                }
                if (0..3).any(|a| a != axis && n[a] % 2 != 0) {
                    return Err(Error::NotRepresentable(format!(
                        "alternating function in a layer along axis {axis} needs even transverse counts"
                    )));
                }
            }
            _ => return Err(Error::NotRepresentable("layer required exactly in 3D".into())),
        }
        Ok(())
    }

    /// Polynomial on `cell`, or `None` outside the support.
    fn on_cell(&self, mesh: &Mesh, cell: usize, h: f64) -> Option<LocalLinear> {
        let idx = mesh.cell(cell).index;
        let skip = match self.layer {
            Some((axis, layer)) => {
                if idx[axis] != layer {
                    return None;
                }
                axis
            }
            None => usize::MAX,
        };
        let exp: usize = (0..mesh.dim()).filter(|&a| a != skip).map(|a| idx[a]).sum();
        let mut grad = [0.0; 3];
        grad[self.value_axis] = -2.0 * alt(exp) / h;
        Some(LocalLinear { center: 0.0, grad })
    }
}

/// Face-value table (indexed by face id) of an alternating function.
pub fn alternating_function(mesh: &Mesh, spec: AltSpec) -> Result<Vec<f64>> {
    spec.check(mesh)?;
    let h = uniform_h(mesh)?;
    let d = mesh.dim();
    let mut out = vec![0.0; mesh.num_faces()];
    for c in 0..mesh.num_cells() {
        if let Some(p) = spec.on_cell(mesh, c, h) {
            let v = p.face_values(h, d);
            for (lf, &f) in mesh.cell_faces(c).iter().enumerate() {
                out[f] = v[lf];
            }
        }
    }
    Ok(out)
}

fn uniform_h(mesh: &Mesh) -> Result<f64> {
    mesh.uniform_h().ok_or_else(|| Error::Unsupported("non-uniform mesh".into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Member {
    Node(usize),
    Alternating(AltSpec),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CatalogKind {
    B,
    BFlat,
    A,
    AFlat,
    E,
    EFlat,
}

impl CatalogKind {
    pub const ALL: [CatalogKind; 6] =
        [CatalogKind::B, CatalogKind::BFlat, CatalogKind::A, CatalogKind::AFlat, CatalogKind::E, CatalogKind::EFlat];

    fn parts(self) -> (Option<bool>, Option<bool>) {
        // (node part, alternating part); the flag marks the flat variant.
        match self {
            CatalogKind::B => (Some(false), None),
            CatalogKind::BFlat => (Some(true), None),
            CatalogKind::A => (None, Some(false)),
            CatalogKind::AFlat => (None, Some(true)),
            CatalogKind::E => (Some(false), Some(false)),
            CatalogKind::EFlat => (Some(true), Some(true)),
        }
    }
}

impl fmt::Display for CatalogKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CatalogKind::B => "B",
            CatalogKind::BFlat => "Bflat",
            CatalogKind::A => "A",
            CatalogKind::AFlat => "Aflat",
            CatalogKind::E => "E",
            CatalogKind::EFlat => "Eflat",
        };
        f.write_str(s)
    }
}

impl FromStr for CatalogKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CatalogKind::ALL
            .into_iter()
            .find(|k| k.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown catalog kind '{s}'")))
    }
}

const NONE: usize = usize::MAX;

/// An ordered set of functions on a mesh. Node-based members come first.
#[derive(Clone, Debug)]
pub struct BasisCatalog {
    kind: CatalogKind,
    mesh: Arc<Mesh>,
    h: f64,
    members: Vec<Member>,
    dropped: Vec<Member>,
    node_slot: Vec<usize>,
    num_nodes_members: usize,
    alt: Vec<(AltSpec, usize)>,
    // [layer axis][value axis][layer] -> member slot (3D only).
    layered: [[Vec<usize>; 3]; 3],
    corner_basis: Vec<LocalLinear>,
}

/// Alternating functions complementing the node-based span, in family
/// order, together with the members left out of the flat variant.
fn alternating_members(mesh: &Mesh) -> (Vec<AltSpec>, Vec<AltSpec>) {
    let n = mesh.counts();
    if !mesh.is_periodic() {
        return (Vec::new(), Vec::new());
    }
    if mesh.dim() == 2 {
        if n[0] % 2 == 0 && n[1] % 2 == 0 {
            return (vec![AltSpec::planar(0), AltSpec::planar(1)], Vec::new());
        }
        return (Vec::new(), Vec::new());
    }
    let odd: Vec<usize> = (0..3).filter(|&a| n[a] % 2 != 0).collect();
    let mut all = Vec::new();
    let mut dropped = Vec::new();
    match odd.as_slice() {
        [] => {
            for mu in 0..3 {
                let first = (mu + 1) % 3;
                let second = (mu + 2) % 3;
                for l in 0..n[first] {
                    all.push(AltSpec::layered(first, l, mu));
                }
                for l in 0..n[second] {
                    all.push(AltSpec::layered(second, l, mu));
                }
                dropped.push(AltSpec::layered(second, n[second] - 1, mu));
            }
        }
        [iota] => {
            let iota = *iota;
            for mu in (0..3).filter(|&a| a != iota) {
                for l in 0..n[iota] {
                    all.push(AltSpec::layered(iota, l, mu));
                }
            }
        }
        _ => {}
    }
    (all, dropped)
}

pub fn build_catalog(mesh: Arc<Mesh>, kind: CatalogKind) -> Result<BasisCatalog> {
    let h = uniform_h(&mesh)?;
    let d = mesh.dim();
    let (node_part, alt_part) = kind.parts();
    if !mesh.is_periodic() && kind != CatalogKind::B {
        return Err(Error::Unsupported(format!("catalog {kind} needs a periodic mesh")));
    }
    let mut members = Vec::new();
    let mut dropped = Vec::new();
    if let Some(flat) = node_part {
        let nodes: Vec<usize> = match mesh.bc() {
            BoundaryCondition::Dirichlet => mesh.interior_nodes(),
            _ => (0..mesh.num_nodes()).collect(),
        };
        members.extend(nodes.iter().map(|&z| Member::Node(z)));
        if flat {
            let ker = dim_formulas(mesh.spec(), BoundaryCondition::Periodic).ker_representation;
            if ker > 0 {
                if d == 3 {
                    return Err(Error::Unsupported(
                        "no node-based basis subset is constructed for 3D meshes with a nontrivial kernel".into(),
                    ));
                }
                dropped.push(members.pop().expect("periodic mesh has nodes"));
            }
        }
    }
    let num_nodes_members = members.len();
    if let Some(flat) = alt_part {
        let (all, drop) = alternating_members(&mesh);
        for s in all {
            if flat && drop.contains(&s) {
                dropped.push(Member::Alternating(s));
            } else {
                members.push(Member::Alternating(s));
            }
        }
    }

    let mut node_slot = vec![NONE; mesh.num_nodes()];
    let mut alt = Vec::new();
    let mut layered: [[Vec<usize>; 3]; 3] = Default::default();
    if d == 3 {
        for (a, row) in layered.iter_mut().enumerate() {
            for v in row.iter_mut() {
                *v = vec![NONE; mesh.counts()[a]];
            }
        }
    }
    for (slot, m) in members.iter().enumerate() {
        match *m {
            Member::Node(z) => node_slot[z] = slot,
            Member::Alternating(s) => {
                alt.push((s, slot));
                if let Some((axis, l)) = s.layer {
                    layered[axis][s.value_axis][l] = slot;
                }
            }
        }
    }
    let corner_basis = (0..1 << d).map(|c| local_node_basis(c, h, d)).collect();
    Ok(BasisCatalog { kind, mesh, h, members, dropped, node_slot, num_nodes_members, alt, layered, corner_basis })
}

impl BasisCatalog {
    pub fn kind(&self) -> CatalogKind {
        self.kind
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn dropped(&self) -> &[Member] {
        &self.dropped
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// True when no member exists, e.g. alternating functions on an odd grid.
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Number of node-based members; they occupy the leading slots.
    pub fn num_node_members(&self) -> usize {
        self.num_nodes_members
    }

    pub fn num_alternating(&self) -> usize {
        self.members.len() - self.num_nodes_members
    }

    pub fn slot_of(&self, m: &Member) -> Option<usize> {
        match m {
            Member::Node(z) => self.node_slot.get(*z).copied().filter(|&s| s != NONE),
            Member::Alternating(s) => self.alt.iter().find(|(a, _)| a == s).map(|&(_, slot)| slot),
        }
    }

    /// Calls `f(slot, p)` for every member contribution on `cell`. A node
    /// met at several corners (a single cell across a periodic axis) is
    /// reported once per corner; contributions add.
    pub fn for_each_on_cell(&self, cell: usize, mut f: impl FnMut(usize, LocalLinear)) {
        let mesh = &*self.mesh;
        let c = mesh.cell(cell);
        for (corner, &z) in mesh.cell_nodes(cell).iter().enumerate() {
            let slot = self.node_slot[z];
            if slot != NONE {
                f(slot, self.corner_basis[corner]);
            }
        }
        if self.alt.is_empty() {
            return;
        }
        if mesh.dim() == 2 {
            for (s, slot) in &self.alt {
                if let Some(p) = s.on_cell(mesh, cell, self.h) {
                    f(*slot, p);
                }
            }
        } else {
            for axis in 0..3 {
                for mu in 0..3 {
                    if mu == axis {
                        continue;
                    }
                    let slot = self.layered[axis][mu][c.index[axis]];
                    if slot != NONE {
                        let s = AltSpec::layered(axis, c.index[axis], mu);
                        f(slot, s.on_cell(mesh, cell, self.h).expect("cell lies in its layer"));
                    }
                }
            }
        }
    }

    /// Contributions on `cell` with repeated members merged.
    pub fn on_cell(&self, cell: usize) -> Vec<(usize, LocalLinear)> {
        let mut out: Vec<(usize, LocalLinear)> = Vec::with_capacity(14);
        self.for_each_on_cell(cell, |slot, p| match out.iter_mut().find(|(s, _)| *s == slot) {
            Some((_, q)) => *q += p,
            None => out.push((slot, p)),
        });
        out
    }

    /// Polynomial of the combination `sum coeffs[m] member_m` on `cell`.
    pub fn combination_on_cell(&self, coeffs: &[f64], cell: usize) -> LocalLinear {
        let mut p = LocalLinear::default();
        self.for_each_on_cell(cell, |slot, q| p += q * coeffs[slot]);
        p
    }

    /// Face-value table of the combination `sum coeffs[m] member_m`.
    pub fn face_values(&self, coeffs: &[f64]) -> Vec<f64> {
        let mesh = &*self.mesh;
        let d = mesh.dim();
        let mut out = vec![0.0; mesh.num_faces()];
        for c in 0..mesh.num_cells() {
            let v = self.combination_on_cell(coeffs, c).face_values(self.h, d);
            for (lf, &f) in mesh.cell_faces(c).iter().enumerate() {
                out[f] = v[lf];
            }
        }
        out
    }

    /// Dense matrix of member face values (faces x members).
    pub fn representation_matrix(&self) -> nalgebra::DMatrix<f64> {
        let mesh = &*self.mesh;
        let d = mesh.dim();
        let mut r = nalgebra::DMatrix::zeros(mesh.num_faces(), self.len());
        for c in 0..mesh.num_cells() {
            for (slot, p) in self.on_cell(c) {
                let v = p.face_values(self.h, d);
                for (lf, &f) in mesh.cell_faces(c).iter().enumerate() {
                    r[(f, slot)] = v[lf];
                }
            }
        }
        r
    }
}

/// Kernel bases of the node-based representation map and of the node-based
/// stiffness matrix, as coefficient vectors over all nodes.
#[derive(Clone, Debug)]
pub struct KernelVectors {
    pub representation: Vec<Vec<f64>>,
    pub stiffness: Vec<Vec<f64>>,
}

pub fn kernel_vectors(mesh: &Mesh) -> Result<KernelVectors> {
    if !mesh.is_periodic() {
        return Err(Error::Unsupported("kernel vectors are defined on periodic meshes".into()));
    }
    let n = mesh.counts();
    let nn = mesh.num_nodes();
    let mut rep = Vec::new();
    if mesh.dim() == 2 {
        if n[0] % 2 == 0 && n[1] % 2 == 0 {
            rep.push(
                (0..nn)
                    .map(|z| {
                        let [i, j, _] = mesh.node_index(z);
                        alt(i + j)
                    })
                    .collect(),
            );
        }
    } else {
        let mut families = 0;
        for axis in 0..3 {
            if (0..3).any(|a| a != axis && n[a] % 2 != 0) {
                continue;
            }
            let count = if families > 0 { n[axis] - 1 } else { n[axis] };
            families += 1;
            for l in 0..count {
                rep.push(
                    (0..nn)
                        .map(|z| {
                            let idx = mesh.node_index(z);
                            if idx[axis] != l {
                                return 0.0;
                            }
                            alt((0..3).filter(|&a| a != axis).map(|a| idx[a]).sum())
                        })
                        .collect(),
                );
            }
        }
    }
    let mut stiffness = rep.clone();
    stiffness.push(vec![1.0; nn]);
    Ok(KernelVectors { representation: rep, stiffness })
}

/// Coefficients over the flat node set whose combination is identically one.
pub fn unity_representation(catalog: &BasisCatalog) -> Result<Vec<f64>> {
    let mesh = catalog.mesh();
    if catalog.kind() != CatalogKind::BFlat {
        return Err(Error::Unsupported(format!("unity representation needs catalog Bflat, got {}", catalog.kind())));
    }
    let n = mesh.counts();
    if mesh.dim() != 2 || n[0] % 2 != 0 || n[1] % 2 != 0 {
        return Err(Error::Unsupported("unity representation needs a 2D even-by-even periodic mesh".into()));
    }
    let last = match catalog.dropped() {
        [Member::Node(z)] => *z,
        _ => return Err(Error::Internal("flat catalog without a dropped node".into())),
    };
    let parity = |z: usize| {
        let [i, j, _] = mesh.node_index(z);
        (i + j) % 2
    };
    let w: Vec<f64> = catalog
        .members()
        .iter()
        .map(|m| match m {
            Member::Node(z) if parity(*z) != parity(last) => 2.0,
            _ => 0.0,
        })
        .collect();
    let vals = catalog.face_values(&w);
    if let Some(v) = vals.iter().find(|v| (**v - 1.0).abs() > 1e-12) {
        return Err(Error::Internal(format!("unity representation evaluates to {v}")));
    }
    Ok(w)
}

/// A coefficient vector paired with its catalog.
#[derive(Clone, Debug)]
pub struct Combination<'a> {
    pub catalog: &'a BasisCatalog,
    pub coeffs: &'a [f64],
}

impl CellwiseLinear for Combination<'_> {
    fn mesh(&self) -> &Mesh {
        self.catalog.mesh()
    }
    fn on_cell(&self, cell: usize) -> LocalLinear {
        self.catalog.combination_on_cell(self.coeffs, cell)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem_core::{sigma, FaceFunctional, FaceFunctionalKind};
    use crate::mesh::GridSpec;

    fn periodic(n: &[usize]) -> Arc<Mesh> {
        Arc::new(Mesh::new(GridSpec::square_cells(n).unwrap(), BoundaryCondition::Periodic))
    }

    #[test]
    fn catalog_sizes_2d() {
        let m = periodic(&[4, 4]);
        let size = |k| build_catalog(m.clone(), k).unwrap().len();
        assert_eq!(size(CatalogKind::B), 16);
        assert_eq!(size(CatalogKind::BFlat), 15);
        assert_eq!(size(CatalogKind::A), 2);
        assert_eq!(size(CatalogKind::AFlat), 2);
        assert_eq!(size(CatalogKind::E), 18);
        assert_eq!(size(CatalogKind::EFlat), 17);
        let m = periodic(&[3, 4]);
        assert_eq!(build_catalog(m.clone(), CatalogKind::B).unwrap().len(), 12);
        assert!(build_catalog(m, CatalogKind::A).unwrap().is_empty());
    }

    #[test]
    fn catalog_sizes_3d() {
        let m = periodic(&[2, 2, 2]);
        assert_eq!(build_catalog(m.clone(), CatalogKind::A).unwrap().len(), 12);
        assert_eq!(build_catalog(m.clone(), CatalogKind::AFlat).unwrap().len(), 9);
        assert!(matches!(build_catalog(m, CatalogKind::BFlat), Err(Error::Unsupported(_))));
        let m = periodic(&[4, 6, 2]);
        assert_eq!(build_catalog(m.clone(), CatalogKind::A).unwrap().len(), 24);
        assert_eq!(build_catalog(m, CatalogKind::AFlat).unwrap().len(), 21);
        let m = periodic(&[3, 4, 2]);
        assert_eq!(build_catalog(m.clone(), CatalogKind::A).unwrap().len(), 6);
        assert_eq!(build_catalog(m, CatalogKind::AFlat).unwrap().len(), 6);
        let m = periodic(&[3, 3, 2]);
        assert!(build_catalog(m.clone(), CatalogKind::A).unwrap().is_empty());
        assert_eq!(build_catalog(m, CatalogKind::BFlat).unwrap().len(), 18);
    }

    #[test]
    fn psi_x_face_pattern() {
        let m = periodic(&[4, 4]);
        let v = alternating_function(&m, AltSpec::planar(0)).unwrap();
        let vertical: Vec<f64> = m.faces_with_normal(0).map(|f| v[f]).collect();
        assert_eq!(vertical.len(), 16);
        assert!(vertical.iter().all(|x| x.abs() == 1.0));
        assert!(m.faces_with_normal(1).all(|f| v[f] == 0.0));
        assert!(alternating_function(&periodic(&[3, 4]), AltSpec::planar(0)).is_err());
        let cat = build_catalog(m.clone(), CatalogKind::A).unwrap();
        let p = cat.on_cell(5);
        let h = 0.25;
        assert!((p[0].1.grad[0].abs() - 2.0 / h).abs() < 1e-12);
        let horizontal = m.faces_with_normal(1).next().unwrap();
        let coeffs = [1.0, 0.0];
        let u = Combination { catalog: &cat, coeffs: &coeffs };
        let f = FaceFunctional { kind: FaceFunctionalKind::Midpoint, face: horizontal };
        assert_eq!(sigma(f, &u).unwrap(), 0.0);
    }

    #[test]
    fn layered_support() {
        let m = periodic(&[2, 2, 2]);
        let v = alternating_function(&m, AltSpec::layered(0, 1, 1)).unwrap();
        let mut cells = std::collections::BTreeSet::new();
        for (f, &x) in v.iter().enumerate() {
            if x != 0.0 {
                assert_eq!(m.face(f).normal, 1);
                cells.extend(m.face(f).cells.iter().flatten());
            }
        }
        assert_eq!(cells.len(), 4);
        assert!(cells.iter().all(|&c| m.cell(c).index[0] == 1));
    }

    #[test]
    fn node_function_sigma_half() {
        let m = periodic(&[4, 4]);
        let cat = build_catalog(m.clone(), CatalogKind::B).unwrap();
        let mut coeffs = vec![0.0; cat.len()];
        coeffs[5] = 1.0;
        let u = Combination { catalog: &cat, coeffs: &coeffs };
        for f in 0..m.num_faces() {
            let contains = m.face(f).cells.iter().flatten().any(|&c| {
                let lf = m.local_face(c, f).unwrap();
                let corners = m.cell_nodes(c);
                (0..4).any(|k| corners[k] == 5 && ((k >> (lf / 2)) & 1) == lf % 2)
            });
            for kind in [FaceFunctionalKind::Midpoint, FaceFunctionalKind::Average] {
                let s = sigma(FaceFunctional { kind, face: f }, &u).unwrap();
                assert!((s - if contains { 0.5 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn unity_weights() {
        for n in [[2, 2], [4, 6], [8, 8]] {
            let m = periodic(&n);
            let cat = build_catalog(m.clone(), CatalogKind::BFlat).unwrap();
            let w = unity_representation(&cat).unwrap();
            assert!(w.iter().all(|&x| x == 0.0 || x == 2.0));
            assert_eq!(w.iter().sum::<f64>(), (n[0] * n[1]) as f64);
        }
        let m = periodic(&[2, 2]);
        let cat = build_catalog(m, CatalogKind::BFlat).unwrap();
        assert_eq!(unity_representation(&cat).unwrap(), vec![0.0, 2.0, 2.0]);
    }

    #[test]
    fn kernel_vector_counts() {
        assert_eq!(kernel_vectors(&periodic(&[4, 4])).unwrap().stiffness.len(), 2);
        assert_eq!(kernel_vectors(&periodic(&[3, 4])).unwrap().stiffness.len(), 1);
        assert_eq!(kernel_vectors(&periodic(&[2, 2, 2])).unwrap().stiffness.len(), 5);
    }

    #[test]
    fn single_cell_torus_sums_to_constant() {
        let m = periodic(&[1, 1]);
        let cat = build_catalog(m, CatalogKind::B).unwrap();
        let p = cat.combination_on_cell(&[1.0], 0);
        assert!((p.center - 1.0).abs() < 1e-15 && p.grad_norm_sq() < 1e-28);
    }
}
