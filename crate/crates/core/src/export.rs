//! ASCII writers: OBJ and PLY for meshes, OBJ and CSV for polylines, and
//! versioned JSON reports. Floats carry 17 significant digits.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Polyline};
use crate::scalar::Real;

pub const SCHEMA: &str = "caustica/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Obj,
    Ply,
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Obj => "obj",
            Format::Ply => "ply",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "obj" => Ok(Format::Obj),
            "ply" => Ok(Format::Ply),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::InvalidArgument(format!("unknown format `{s}`"))),
        }
    }
}

/// `{:.16e}` of the value widened to `f64`.
pub fn float<T: Real>(x: T) -> String {
    format!("{:.16e}", x.to_f64().unwrap_or(f64::NAN))
}

pub fn write_mesh_obj<T: Real>(w: &mut impl Write, m: &Mesh<T>) -> io::Result<()> {
    for v in &m.vertices {
        writeln!(w, "v {} {} {}", float(v.x), float(v.y), float(v.z))?;
    }
    for t in &m.triangles {
        writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}

pub fn write_mesh_ply<T: Real>(w: &mut impl Write, m: &Mesh<T>) -> io::Result<()> {
    writeln!(w, "ply")?;
    writeln!(w, "format ascii 1.0")?;
    writeln!(w, "element vertex {}", m.vertices.len())?;
    for c in ["x", "y", "z"] {
        writeln!(w, "property double {c}")?;
    }
    writeln!(w, "property uchar sheet")?;
    writeln!(w, "element face {}", m.triangles.len())?;
    writeln!(w, "property list uchar int vertex_indices")?;
    writeln!(w, "end_header")?;
    for (v, s) in m.vertices.iter().zip(&m.sheet) {
        writeln!(w, "{} {} {} {s}", float(v.x), float(v.y), float(v.z))?;
    }
    for t in &m.triangles {
        writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}

/// Every run becomes its own `l` element.
pub fn write_polylines_obj<T: Real>(w: &mut impl Write, lines: &[Polyline<T>]) -> io::Result<()> {
    let mut base = 1;
    for line in lines {
        writeln!(w, "o curve_{}", line.curve)?;
        for piece in &line.pieces {
            for v in &piece.points {
                writeln!(w, "v {} {} {}", float(v.x), float(v.y), float(v.z))?;
            }
            let ids: Vec<String> = (base..base + piece.points.len()).map(|i| i.to_string()).collect();
            writeln!(w, "l {}", ids.join(" "))?;
            base += piece.points.len();
        }
    }
    Ok(())
}

pub fn write_polylines_csv<T: Real>(w: &mut impl Write, lines: &[Polyline<T>]) -> io::Result<()> {
    writeln!(w, "curve_id,t,x,y,z")?;
    for line in lines {
        for piece in &line.pieces {
            for (t, v) in piece.params.iter().zip(&piece.points) {
                writeln!(w, "{},{},{},{},{}", line.curve, float(*t), float(v.x), float(v.y), float(v.z))?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Envelope<'a, S> {
    schema: &'static str,
    kind: &'a str,
    #[serde(flatten)]
    body: &'a S,
}

/// `{"schema": "caustica/1", "kind": kind, ...body}`, pretty-printed with a
/// trailing newline. `body` must serialize as a map.
pub fn write_json<S: Serialize>(w: &mut impl Write, kind: &str, body: &S) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, &Envelope { schema: SCHEMA, kind, body })?;
    writeln!(w)
}

pub fn json_string<S: Serialize>(kind: &str, body: &S) -> String {
    let mut buf = Vec::new();
    write_json(&mut buf, kind, body).expect("writing to memory");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Creates `path` and runs `write` on a buffered handle, attaching the path
/// to any I/O error.
pub fn to_file(path: &Path, write: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    write(&mut w).map_err(io)?;
    w.flush().map_err(io)
}

pub fn export_mesh<T: Real + Serialize>(m: &Mesh<T>, format: Format, path: &Path) -> Result<()> {
    match format {
        Format::Obj => to_file(path, |w| write_mesh_obj(w, m)),
        Format::Ply => to_file(path, |w| write_mesh_ply(w, m)),
        Format::Json => to_file(path, |w| write_json(w, "mesh", m)),
        Format::Csv => Err(Error::InvalidArgument("meshes export as obj, ply or json".into())),
    }
}

pub fn export_polylines<T: Real + Serialize>(lines: &[Polyline<T>], format: Format, path: &Path) -> Result<()> {
    #[derive(Serialize)]
    struct Curves<'a, T> {
        curves: &'a [Polyline<T>],
    }
    match format {
        Format::Obj => to_file(path, |w| write_polylines_obj(w, lines)),
        Format::Csv => to_file(path, |w| write_polylines_csv(w, lines)),
        Format::Json => to_file(path, |w| write_json(w, "curves", &Curves { curves: lines })),
        Format::Ply => Err(Error::InvalidArgument("curves export as obj, csv or json".into())),
    }
}
