//! ASCII OFF triangle meshes.

use std::io::Write;
use std::path::Path;

use super::{GeometryError, Result};

fn off_error(line: usize, message: impl Into<String>) -> GeometryError {
    GeometryError::Off { line, message: message.into() }
}

/// Vertex coordinates and triangles.
pub type OffMesh = (Vec<[f64; 3]>, Vec<[usize; 3]>);

/// Parses an ASCII OFF mesh: an `OFF` header, a counts line
/// `vertices faces edges`, vertex lines `x y z`, then face lines `3 i j k`.
/// Comments (`#`) and blank lines are skipped; the counts may share the header
/// line. Only triangles are accepted.
pub fn parse_off(text: &str) -> Result<OffMesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_line, header) = lines.next().ok_or_else(|| off_error(1, "empty file"))?;
    let rest = header
        .strip_prefix("OFF")
        .ok_or_else(|| off_error(header_line, "missing OFF header"))?
        .trim();
    let (counts_line, counts) = if rest.is_empty() {
        lines.next().ok_or_else(|| off_error(header_line, "missing counts line"))?
    } else {
        (header_line, rest)
    };
    let counts: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| off_error(counts_line, format!("bad count '{t}'"))))
        .collect::<Result<_>>()?;
    if counts.len() < 2 {
        return Err(off_error(counts_line, "expected vertex and face counts"));
    }
    let (nv, nf) = (counts[0], counts[1]);

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| off_error(0, "unexpected end of vertex list"))?;
        let xyz: Vec<f64> = l
            .split_whitespace()
            .take(3)
            .map(|t| t.parse().map_err(|_| off_error(ln, format!("bad coordinate '{t}'"))))
            .collect::<Result<_>>()?;
        if xyz.len() != 3 {
            return Err(off_error(ln, "vertex needs three coordinates"));
        }
        vertices.push([xyz[0], xyz[1], xyz[2]]);
    }

    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = lines.next().ok_or_else(|| off_error(0, "unexpected end of face list"))?;
        let ids: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| off_error(ln, format!("bad index '{t}'"))))
            .collect::<Result<_>>()?;
        match ids.as_slice() {
            [3, i, j, k, ..] => faces.push([*i, *j, *k]),
            [m, ..] => return Err(off_error(ln, format!("only triangles are supported, got a {m}-gon"))),
            [] => unreachable!(),
        }
    }
    Ok((vertices, faces))
}

pub fn read_off(path: impl AsRef<Path>) -> Result<OffMesh> {
    parse_off(&std::fs::read_to_string(path)?)
}

pub fn write_off(path: impl AsRef<Path>, vertices: &[[f64; 3]], faces: &[[usize; 3]]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "OFF")?;
    writeln!(out, "{} {} 0", vertices.len(), faces.len())?;
    for p in vertices {
        writeln!(out, "{:.16e} {:.16e} {:.16e}", p[0], p[1], p[2])?;
    }
    for f in faces {
        writeln!(out, "3 {} {} {}", f[0], f[1], f[2])?;
    }
    out.flush()?;
    Ok(())
}
