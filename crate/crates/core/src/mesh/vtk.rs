//! Legacy ASCII unstructured-grid output.
//!
//! Points are the unidentified geometric lattice, so periodic meshes are
//! drawn as the full box.

use std::io::{self, Write};

use super::Mesh;

const VTK_QUAD: u8 = 9;
const VTK_HEXAHEDRON: u8 = 12;

fn point_dims(mesh: &Mesh) -> [usize; 3] {
    let mut d = [1usize; 3];
    for (a, da) in d.iter_mut().enumerate().take(mesh.dim()) {
        *da = mesh.counts()[a] + 1;
    }
    d
}

/// Corner offsets in VTK winding order.
fn vtk_corners(dim: usize) -> &'static [[usize; 3]] {
    const QUAD: [[usize; 3]; 4] = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]];
    const HEX: [[usize; 3]; 8] =
        [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]];
    if dim == 2 {
        &QUAD
    } else {
        &HEX
    }
}

/// Writes header, points, cells and cell types.
pub fn write_geometry<W: Write>(mesh: &Mesh, title: &str, w: &mut W) -> io::Result<()> {
    let pd = point_dims(mesh);
    let d = mesh.dim();
    let h: Vec<f64> = (0..d).map(|a| mesh.spec().cell_size(a)).collect();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{}", title.lines().next().unwrap_or(""))?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", pd.iter().product::<usize>())?;
    for k in 0..pd[2] {
        for j in 0..pd[1] {
            for i in 0..pd[0] {
                let z = if d == 3 { k as f64 * h[2] } else { 0.0 };
                writeln!(w, "{} {} {}", i as f64 * h[0], j as f64 * h[1], z)?;
            }
        }
    }
    let corners = vtk_corners(d);
    let nc = mesh.num_cells();
    writeln!(w, "CELLS {} {}", nc, nc * (corners.len() + 1))?;
    for cell in mesh.cells() {
        write!(w, "{}", corners.len())?;
        for off in corners {
            let p = [cell.index[0] + off[0], cell.index[1] + off[1], cell.index[2] + off[2]];
            write!(w, " {}", p[0] + pd[0] * (p[1] + pd[1] * p[2]))?;
        }
        writeln!(w)?;
    }
    writeln!(w, "CELL_TYPES {nc}")?;
    let t = if d == 2 { VTK_QUAD } else { VTK_HEXAHEDRON };
    for _ in 0..nc {
        writeln!(w, "{t}")?;
    }
    Ok(())
}

pub fn write_mesh<W: Write>(mesh: &Mesh, w: &mut W) -> io::Result<()> {
    let counts: Vec<String> = mesh.counts().iter().map(ToString::to_string).collect();
    write_geometry(mesh, &format!("p1nc mesh {} {}", counts.join("x"), mesh.bc()), w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoundaryCondition, GridSpec};

    #[test]
    fn quad_file_layout() {
        let mesh = Mesh::new(GridSpec::unit(&[2, 1]).unwrap(), BoundaryCondition::Periodic);
        let mut buf = Vec::new();
        write_mesh(&mesh, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# vtk DataFile Version 3.0");
        assert_eq!(lines[2], "ASCII");
        assert_eq!(lines[3], "DATASET UNSTRUCTURED_GRID");
        assert_eq!(lines[4], "POINTS 6 double");
        assert_eq!(lines[11], "CELLS 2 10");
        assert_eq!(lines[12], "4 0 1 4 3");
        assert_eq!(lines[14], "CELL_TYPES 2");
        assert_eq!(lines[15], "9");
    }

    #[test]
    fn hex_cell_type() {
        let mesh = Mesh::new(GridSpec::unit(&[1, 1, 1]).unwrap(), BoundaryCondition::Neumann);
        let mut buf = Vec::new();
        write_mesh(&mesh, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("CELLS 1 9\n8 0 1 3 2 4 5 7 6\n"));
        assert!(text.ends_with("CELL_TYPES 1\n12\n"));
    }
}
