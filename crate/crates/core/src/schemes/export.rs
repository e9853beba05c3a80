//! Solution output: legacy ASCII grid files and face-value CSV.

use std::io::Write;

use super::DiscreteSolution;
use crate::error::Result;
use crate::fem_core::CellwiseLinear;
use crate::mesh::vtk::write_geometry;

/// Grid file with per-cell center value, gradient and face-midpoint values.
pub fn write_solution_vtk<W: Write>(u: &DiscreteSolution, title: &str, w: &mut W) -> Result<()> {
    let mesh = u.catalog().mesh();
    let h = u.catalog().h();
    let d = mesh.dim();
    write_geometry(mesh, title, w)?;
    let nc = mesh.num_cells();
    let cells: Vec<_> = (0..nc).map(|c| u.on_cell(c)).collect();
    writeln!(w, "CELL_DATA {nc}")?;
    writeln!(w, "SCALARS center_value double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for p in &cells {
        writeln!(w, "{}", p.center)?;
    }
    writeln!(w, "VECTORS gradient double")?;
    for p in &cells {
        writeln!(w, "{} {} {}", p.grad[0], p.grad[1], p.grad[2])?;
    }
    writeln!(w, "FIELD cell_fields 1")?;
    writeln!(w, "face_values {} {nc} double", 2 * d)?;
    for p in &cells {
        let v: Vec<String> = p.face_values(h, d).iter().map(ToString::to_string).collect();
        writeln!(w, "{}", v.join(" "))?;
    }
    Ok(())
}

/// CSV with header `face_id,midpoint_value`.
pub fn write_face_values_csv<W: Write>(u: &DiscreteSolution, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["face_id", "midpoint_value"])?;
    for (f, v) in u.face_values().iter().enumerate() {
        out.write_record([f.to_string(), v.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::mesh::{BoundaryCondition, GridSpec, Mesh};
    use crate::space::{build_catalog, CatalogKind};

    fn solution() -> DiscreteSolution {
        let m = Arc::new(Mesh::new(GridSpec::unit(&[2, 2]).unwrap(), BoundaryCondition::Periodic));
        let cat = Arc::new(build_catalog(m, CatalogKind::B).unwrap());
        DiscreteSolution::new(cat, vec![1.0, 0.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn vtk_sections() {
        let mut buf = Vec::new();
        write_solution_vtk(&solution(), "t", &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for key in [
            "CELL_TYPES 4",
            "CELL_DATA 4",
            "SCALARS center_value double 1",
            "VECTORS gradient double",
            "face_values 4 4 double",
        ] {
            assert!(text.contains(key), "{key}");
        }
    }

    #[test]
    fn csv_rows() {
        let mut buf = Vec::new();
        write_face_values_csv(&solution(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "face_id,midpoint_value");
        assert_eq!(lines.len(), 9);
        assert_eq!(lines[1], "0,0.5");
    }
}
