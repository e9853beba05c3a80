use std::collections::BTreeMap;

use super::{LatticeFace, Mesh};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StripFace {
    pub face: LatticeFace,
    pub sign: i8,
}

/// Ring of boundary faces around one layer of cells, with the signs of the
/// alternating relation induced by the dice rule on that layer.
#[derive(Clone, Debug)]
pub struct Strip {
    pub axis: usize,
    pub position: usize,
    pub faces: Vec<StripFace>,
}

impl Strip {
    /// Transverse axes, in increasing order.
    pub fn transverse(&self) -> (usize, usize) {
        transverse(self.axis)
    }

    /// Relation on canonical face ids; identified faces are merged and
    /// zero coefficients dropped.
    pub fn relation(&self, mesh: &Mesh) -> BTreeMap<usize, f64> {
        let mut out = BTreeMap::new();
        for sf in &self.faces {
            *out.entry(mesh.lattice_face_id(sf.face)).or_insert(0.0) += f64::from(sf.sign);
        }
        out.retain(|_, v| *v != 0.0);
        out
    }

    /// Cells of the layer with the multiplier applied to their dice relation.
    pub fn layer_cells(&self, mesh: &Mesh) -> Vec<(usize, f64)> {
        let (mu, nu) = self.transverse();
        let n = mesh.counts();
        let mut out = Vec::with_capacity(n[mu] * n[nu]);
        for b in 0..n[nu] {
            for a in 0..n[mu] {
                let mut idx = [0usize; 3];
                idx[self.axis] = self.position;
                idx[mu] = a;
                idx[nu] = b;
                out.push((mesh.cell_id(idx), alt(a + b)));
            }
        }
        out
    }
}

fn transverse(axis: usize) -> (usize, usize) {
    match axis {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

fn alt(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The `N_axis` strips perpendicular to `axis` of a 3D mesh.
///
/// Each cell `(a, b)` of a layer contributes its relation
/// `v(mu-) + v(mu+) - v(nu-) - v(nu+) = 0` with multiplier `(-1)^(a+b)`;
/// the interior terms cancel, leaving the faces listed in the strip.
pub fn strips(mesh: &Mesh, axis: usize) -> Result<Vec<Strip>> {
    if mesh.dim() != 3 {
        return Err(Error::UnsupportedDimension { expected: 3, got: mesh.dim() });
    }
    if axis >= 3 {
        return Err(Error::OutOfRange { index: axis, len: 3 });
    }
    let (mu, nu) = transverse(axis);
    let n = mesh.counts();
    let sign = |x: f64| if x > 0.0 { 1i8 } else { -1i8 };
    let mut out = Vec::with_capacity(n[axis]);
    for pos in 0..n[axis] {
        let mut faces = Vec::with_capacity(2 * n[mu] + 2 * n[nu]);
        for b in 0..n[nu] {
            for (at, s) in [(0, alt(b)), (n[mu], alt(n[mu] - 1 + b))] {
                let mut idx = [0usize; 3];
                idx[axis] = pos;
                idx[mu] = at;
                idx[nu] = b;
                faces.push(StripFace { face: LatticeFace { normal: mu, index: idx }, sign: sign(s) });
            }
        }
        for a in 0..n[mu] {
            for (at, s) in [(0, -alt(a)), (n[nu], -alt(a + n[nu] - 1))] {
                let mut idx = [0usize; 3];
                idx[axis] = pos;
                idx[mu] = a;
                idx[nu] = at;
                faces.push(StripFace { face: LatticeFace { normal: nu, index: idx }, sign: sign(s) });
            }
        }
        out.push(Strip { axis, position: pos, faces });
    }
    Ok(out)
}
