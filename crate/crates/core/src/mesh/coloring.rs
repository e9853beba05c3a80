use std::collections::VecDeque;

use super::Mesh;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeColor {
    Red,
    Black,
}

impl NodeColor {
    fn flip(self) -> NodeColor {
        match self {
            NodeColor::Red => NodeColor::Black,
            NodeColor::Black => NodeColor::Red,
        }
    }
}

/// Two-coloring of the node graph (nodes joined by cell edges), or `None`
/// if the graph has an odd cycle, as on a periodic grid with an odd count.
pub fn red_black_coloring(mesh: &Mesh) -> Option<Vec<NodeColor>> {
    let n = mesh.num_nodes();
    let d = mesh.dim();
    let counts = mesh.counts();
    let node_dims = mesh.node_dims();
    let neighbors = |id: usize| {
        let idx = mesh.node_index(id);
        let mut out = Vec::with_capacity(2 * d);
        for a in 0..d {
            let mut up = idx;
            up[a] += 1;
            if mesh.is_periodic() || up[a] < node_dims[a] {
                out.push(mesh.lattice_node_id(up));
            }
            if idx[a] > 0 {
                let mut dn = idx;
                dn[a] -= 1;
                out.push(mesh.lattice_node_id(dn));
            } else if mesh.is_periodic() {
                let mut dn = idx;
                dn[a] = counts[a] - 1;
                out.push(mesh.lattice_node_id(dn));
            }
        }
        out
    };

    let mut color: Vec<Option<NodeColor>> = vec![None; n];
    let mut queue = VecDeque::new();
    for start in 0..n {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(NodeColor::Red);
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            let cv = color[v].unwrap();
            for w in neighbors(v) {
                match color[w] {
                    None => {
                        color[w] = Some(cv.flip());
                        queue.push_back(w);
                    }
                    Some(cw) if cw == cv => return None,
                    Some(_) => {}
                }
            }
        }
    }
    Some(color.into_iter().map(Option::unwrap).collect())
}
