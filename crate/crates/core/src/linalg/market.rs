//! Matrix Market coordinate format.

use std::io::{BufRead, Write};

use super::CsrMatrix;
use crate::error::{Error, Result};

/// Writes `real general` coordinate format with 1-based indices.
pub fn write_matrix_market<W: Write>(m: &CsrMatrix, w: &mut W) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for i in 0..m.nrows() {
        for (j, v) in m.row(i) {
            writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
        }
    }
    Ok(())
}

/// Reads `real`/`integer` coordinate matrices, `general` or `symmetric`.
pub fn read_matrix_market<R: BufRead>(r: R) -> Result<CsrMatrix> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty file".into()))??;
    let h: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if h.len() != 5 || h[0] != "%%matrixmarket" || h[1] != "matrix" || h[2] != "coordinate" {
        return Err(Error::Parse(format!("unsupported header '{header}'")));
    }
    if h[3] != "real" && h[3] != "integer" {
        return Err(Error::Parse(format!("unsupported field '{}'", h[3])));
    }
    let symmetric = match h[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(Error::Parse(format!("unsupported symmetry '{other}'"))),
    };
    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|e| Error::Parse(format!("'{s}': {e}")));
        match size {
            None => {
                if parts.len() != 3 {
                    return Err(Error::Parse(format!("bad size line '{t}'")));
                }
                size = Some((num(parts[0])?, num(parts[1])?, num(parts[2])?));
            }
            Some((nr, nc, _)) => {
                if parts.len() != 3 {
                    return Err(Error::Parse(format!("bad entry '{t}'")));
                }
                let i = num(parts[0])?;
                let j = num(parts[1])?;
                if i == 0 || j == 0 || i > nr || j > nc {
                    return Err(Error::Parse(format!("entry ({i}, {j}) outside {nr}x{nc}")));
                }
                let v: f64 = parts[2].parse().map_err(|e| Error::Parse(format!("'{}': {e}", parts[2])))?;
                triplets.push((i - 1, j - 1, v));
                if symmetric && i != j {
                    triplets.push((j - 1, i - 1, v));
                }
            }
        }
    }
    let (nr, nc, nnz) = size.ok_or_else(|| Error::Parse("missing size line".into()))?;
    let stored = if symmetric { triplets.iter().filter(|t| t.0 >= t.1).count() } else { triplets.len() };
    if stored != nnz {
        return Err(Error::Parse(format!("expected {nnz} entries, found {stored}")));
    }
    CsrMatrix::from_triplets(nr, nc, &triplets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let m = CsrMatrix::from_triplets(3, 2, &[(0, 0, 1.5), (2, 1, -2.25e-7), (1, 0, 3.0)]).unwrap();
        let mut buf = Vec::new();
        write_matrix_market(&m, &mut buf).unwrap();
        let back = read_matrix_market(buf.as_slice()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn symmetric_expands() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n% c\n2 2 2\n1 1 4\n2 1 -1\n";
        let m = read_matrix_market(text.as_bytes()).unwrap();
        assert_eq!(m.to_dense(), nalgebra::DMatrix::from_row_slice(2, 2, &[4.0, -1.0, -1.0, 0.0]));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_matrix_market("%%MatrixMarket matrix array real general\n".as_bytes()).is_err());
        assert!(read_matrix_market("%%MatrixMarket matrix coordinate real general\n1 1 1\n2 1 1\n".as_bytes()).is_err());
    }
}
