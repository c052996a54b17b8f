use std::fmt::Write as _;
use std::path::PathBuf;

use caustica::caustic::points::special_points;
use caustica::caustic::{default_u_max, Sheet};
use caustica::classifier::{case_of, region_census, CensusOptions, Classifier, ClassifierOptions};
use caustica::export::{export_mesh, export_polylines, float, json_string, Format};
use caustica::SpacePoint;
use caustica::mesh::{sample_curve, tessellate_caustic, tessellate_paraboloid, CurveOptions, CurveSpec};
use caustica::normals::{concurrent_normals, SolverOptions};
use caustica::oracle;
use caustica::parabola2d::{Parabola2, PlanePoint};
use caustica::{Error, Paraboloid};
use serde::Serialize;
use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Core(Error::Io { .. }) => 1,
            CliError::Core(e) if e.is_boundary_band() => 3,
            CliError::Core(_) => 2,
        }
    }
}

/// What a subcommand produced.
#[derive(Debug, Default)]
pub struct Output {
    pub text: String,
    pub json: String,
    /// The answer sits in the numerical boundary band.
    pub boundary: bool,
}

impl Output {
    fn new<S: Serialize>(kind: &str, text: String, body: &S, boundary: bool) -> Self {
        Output {
            text,
            json: json_string(kind, body),
            boundary,
        }
    }

    /// A boundary-band error reported as a flagged result.
    fn band(kind: &str, e: &Error) -> Self {
        #[derive(Serialize)]
        struct Band {
            boundary: bool,
            error: String,
        }
        Output::new(
            kind,
            format!("boundary band: {e}\n"),
            &Band {
                boundary: true,
                error: e.to_string(),
            },
            true,
        )
    }
}

/// Settings shared by every subcommand after merging flags and config.
#[derive(Clone, Debug)]
pub struct Common {
    pub tol: f64,
    pub out: Option<PathBuf>,
}

impl Common {
    fn solver(&self) -> SolverOptions<f64> {
        let mut s = SolverOptions::default();
        s.roots.merge = self.tol;
        s
    }

    fn classifier(&self, p: Paraboloid) -> Result<Classifier<f64>, CliError> {
        let opts = ClassifierOptions {
            geometric_eps: self.tol,
            solver: self.solver(),
            ..ClassifierOptions::default()
        };
        Ok(Classifier::new(p, opts)?)
    }

    fn out_dir(&self) -> Result<PathBuf, CliError> {
        let dir = self.out.clone().unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        Ok(dir)
    }
}

fn point3(q: [f64; 3]) -> Result<SpacePoint, CliError> {
    Ok(SpacePoint::new(q[0], q[1], q[2])?)
}

fn fmt_point(q: &SpacePoint) -> String {
    // `+ 0.0` turns -0 into 0
    format!("{} {} {}", float(q.x + 0.0), float(q.y + 0.0), float(q.z + 0.0))
}

fn banded<F: FnOnce() -> Result<Output, CliError>>(kind: &str, f: F) -> Result<Output, CliError> {
    match f() {
        Err(CliError::Core(e)) if e.is_boundary_band() => Ok(Output::band(kind, &e)),
        r => r,
    }
}

pub fn normals(c: &Common, p: Paraboloid, q: [f64; 3]) -> Result<Output, CliError> {
    banded("normals", || {
        let nb = concurrent_normals(&p, point3(q)?, &c.solver())?;
        let mut text = format!("count {}\npattern {:?}\n", nb.count(), nb.pattern);
        for f in &nb.feet {
            writeln!(text, "foot {} t {} multiplicity {}", fmt_point(&f.point), float(f.t), f.multiplicity).unwrap();
        }
        #[derive(Serialize)]
        struct Body<'a> {
            count: usize,
            boundary: bool,
            #[serde(flatten)]
            bundle: &'a caustica::NormalBundle,
        }
        let body = Body {
            count: nb.count(),
            boundary: nb.on_boundary(),
            bundle: &nb,
        };
        Ok(Output::new("normals", text, &body, nb.on_boundary()))
    })
}

pub fn classify(c: &Common, p: Paraboloid, q: [f64; 3]) -> Result<Output, CliError> {
    banded("classification", || {
        let cl = c.classifier(p)?;
        let r = cl.classify_point(point3(q)?)?;
        let mut text = format!("count {}\nlocation {}\npattern {:?}\n", r.count, r.location, r.pattern);
        for d in &r.doubled {
            writeln!(
                text,
                "doubled foot {} sheet {} ({:?} radius)",
                fmt_point(&d.foot),
                d.sheet,
                d.pairing
            )
            .unwrap();
        }
        let boundary = r.pattern.first().is_some_and(|&m| m > 1);
        Ok(Output::new("classification", text, &r, boundary))
    })
}

pub fn on_surface(c: &Common, p: Paraboloid, xy: [f64; 2]) -> Result<Output, CliError> {
    let cl = c.classifier(p)?;
    let s = cl.classify_on_surface(xy[0], xy[1]);
    let alg = s
        .algebraic
        .as_ref()
        .map_or("undecided".to_string(), |a| format!("{} ({})", a.count, a.location));
    let mut text = format!("count {}\nalgebraic {alg}\ngeometric {}\n", s.count(), s.geometric_count);
    if !s.named.is_empty() {
        let names: Vec<_> = s.named.iter().map(|l| l.name()).collect();
        writeln!(text, "named {}", names.join(" ")).unwrap();
    }
    if s.boundary {
        text.push_str("boundary: the two answers disagree\n");
    }
    #[derive(Serialize)]
    struct Body<'a> {
        x: f64,
        y: f64,
        z: f64,
        count: usize,
        #[serde(flatten)]
        s: &'a caustica::classifier::SurfaceClassification<f64>,
    }
    let body = Body {
        x: xy[0],
        y: xy[1],
        z: p.height(xy[0], xy[1]),
        count: s.count(),
        s: &s,
    };
    Ok(Output::new("on_surface", text, &body, s.boundary))
}

pub fn census(c: &Common, p: Paraboloid, samples: usize, seed: u64) -> Result<Output, CliError> {
    if samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let cl = c.classifier(p)?;
    let r = region_census(&cl, &CensusOptions { samples, seed });
    let mut text = format!(
        "{}\nregions {}\ncounts {:?}\ngrid {}x{}\nexcluded {}\ndisagreements {}\n",
        r.case.case_id, r.region_count, r.counts, r.grid[0], r.grid[1], r.excluded, r.disagreements
    );
    for g in &r.regions {
        writeln!(text, "region count {} cells {}", g.count, g.cells).unwrap();
    }
    #[derive(Serialize)]
    struct Body<'a> {
        a: f64,
        b: f64,
        samples: usize,
        seed: u64,
        #[serde(flatten)]
        report: &'a caustica::classifier::CensusReport<f64>,
    }
    let body = Body {
        a: p.a(),
        b: p.b(),
        samples,
        seed,
        report: &r,
    };
    let out = Output::new("census", text, &body, r.disagreements > 0);
    if c.out.is_some() {
        let path = c.out_dir()?.join("census.json");
        std::fs::write(&path, &out.json).map_err(|source| Error::Io { path, source })?;
    }
    Ok(out)
}

pub struct MeshArgs {
    pub sheet: Option<u8>,
    pub n: usize,
    pub u_max: Option<f64>,
    pub x_max: Option<f64>,
    pub format: Format,
}

pub fn caustic_mesh(c: &Common, p: Paraboloid, m: MeshArgs) -> Result<Output, CliError> {
    let (mesh, name) = match m.sheet {
        Some(0) | None if m.x_max.is_some() => {
            let x_max = m.x_max.unwrap();
            (tessellate_paraboloid(&p, x_max, m.n)?, "paraboloid".to_string())
        }
        Some(s @ (1 | 2)) => {
            let sheet = Sheet::from_index(s).unwrap();
            let u_max = m.u_max.unwrap_or_else(|| default_u_max(&p, sheet));
            (tessellate_caustic(&p, sheet, u_max, m.n)?, format!("caustic_sheet{s}"))
        }
        _ => return Err(CliError::Usage("--sheet must be 1 or 2 (or give --x-max for the paraboloid)".into())),
    };
    let path = c.out_dir()?.join(format!("{name}.{}", m.format));
    export_mesh(&mesh, m.format, &path)?;
    let text = format!(
        "wrote {}\nvertices {}\ntriangles {}\n",
        path.display(),
        mesh.vertices.len(),
        mesh.triangles.len()
    );
    #[derive(Serialize)]
    struct Body {
        path: String,
        vertices: usize,
        triangles: usize,
    }
    let body = Body {
        path: path.display().to_string(),
        vertices: mesh.vertices.len(),
        triangles: mesh.triangles.len(),
    };
    Ok(Output::new("mesh_written", text, &body, false))
}

pub fn curves(c: &Common, p: Paraboloid, ids: &str, n: usize, z_max: Option<f64>, format: Format) -> Result<Output, CliError> {
    let specs: Vec<CurveSpec> = if ids == "all" {
        CurveSpec::all()
    } else {
        ids.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>()?
    };
    let mut opts = CurveOptions::new(&p, n);
    if let Some(z) = z_max {
        opts.z_max = z;
    }
    let mut lines = Vec::new();
    let mut text = String::new();
    for s in specs {
        match sample_curve(&p, s, &opts) {
            Ok(l) => {
                writeln!(text, "curve {s}: {} runs, {} points", l.pieces.len(), l.point_count()).unwrap();
                lines.push(l);
            }
            Err(Error::Domain(msg)) if ids == "all" => writeln!(text, "curve {s}: empty ({msg})").unwrap(),
            Err(e) => return Err(e.into()),
        }
    }
    let stem = if ids == "all" { "all".to_string() } else { ids.replace(',', "_") };
    let path = c.out_dir()?.join(format!("curves_{stem}.{format}"));
    export_polylines(&lines, format, &path)?;
    writeln!(text, "wrote {}", path.display()).unwrap();
    #[derive(Serialize)]
    struct Body {
        path: String,
        curves: Vec<String>,
    }
    let body = Body {
        path: path.display().to_string(),
        curves: lines.iter().map(|l| l.curve.to_string()).collect(),
    };
    Ok(Output::new("curves_written", text, &body, false))
}

pub fn points(p: Paraboloid) -> Result<Output, CliError> {
    let pts = special_points(&p);
    let mut text = String::new();
    for n in &pts {
        match n.position {
            Some(q) => writeln!(text, "{:<4} real {}", n.label.name(), fmt_point(&q)).unwrap(),
            None => writeln!(text, "{:<4} {}", n.label.name(), status(n.status)).unwrap(),
        }
    }
    #[derive(Serialize)]
    struct Body<'a> {
        points: &'a [caustica::caustic::points::NamedPoint<f64>],
    }
    Ok(Output::new("points", text, &Body { points: &pts }, false))
}

fn status(s: caustica::caustic::points::Status) -> &'static str {
    use caustica::caustic::points::Status;
    match s {
        Status::Real => "real",
        Status::NotReal => "not_real",
        Status::Infinite => "infinite",
    }
}

pub fn verify(
    c: &Common,
    p: Paraboloid,
    q: [f64; 3],
    half_width: Option<f64>,
    resolution: Option<usize>,
) -> Result<Output, CliError> {
    banded("verify", || {
        let a = point3(q)?;
        let o = match resolution {
            Some(n) => oracle::critical_points(&p, a, half_width.unwrap_or_else(|| oracle::default_half_width(&p, a)), n)?,
            None => oracle::scan(&p, a, half_width)?,
        };
        let s = concurrent_normals(&p, a, &c.solver())?;
        let gap = s
            .feet
            .iter()
            .map(|f| o.feet.iter().map(|g| g.dist(f.point)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        let agree = o.count == s.count();
        let text = format!(
            "oracle {} (grid {})\nsolver {}\n{}\nlargest foot gap {}\n",
            o.count,
            o.grid,
            s.count(),
            if agree { "agree" } else { "DISAGREE" },
            float(gap)
        );
        #[derive(Serialize)]
        struct Body<'a> {
            oracle: &'a caustica::OracleResult,
            solver_count: usize,
            agree: bool,
            foot_gap: f64,
        }
        let body = Body {
            oracle: &o,
            solver_count: s.count(),
            agree,
            foot_gap: gap,
        };
        Ok(Output::new("verify", text, &body, !agree || s.on_boundary()))
    })
}

pub fn parabola2d(a: f64, q: [f64; 2]) -> Result<Output, CliError> {
    let par = Parabola2::new(a)?;
    let pt = PlanePoint::new(q[0], q[1])?;
    let cnt = par.count_normals_2d(pt);
    let side = par.neile_classify(pt);
    let feet = par.normal_feet_2d(pt);
    let mut text = format!("count {}\nside {side:?}\n", cnt.count);
    for r in &feet.roots {
        writeln!(text, "foot x {} multiplicity {}", float(r.value), r.multiplicity).unwrap();
    }
    #[derive(Serialize)]
    struct Body {
        count: usize,
        on_boundary: bool,
        side: caustica::parabola2d::NeileSide,
        feet: caustica::RootSet,
    }
    let body = Body {
        count: cnt.count,
        on_boundary: cnt.on_boundary,
        side,
        feet,
    };
    Ok(Output::new("parabola2d", text, &body, cnt.on_boundary))
}

pub fn case(c: &Common, p: Paraboloid) -> Result<Output, CliError> {
    let k = case_of(&p, caustica::classifier::CASE_EPS);
    let sheets = c.classifier(p)?.intersecting_sheets();
    let mut text = format!("{}\nregions {}\n", k.case_id, k.case_id.regions());
    if k.near_2a {
        text.push_str("near b = 2a\n");
    }
    if k.near_3a {
        text.push_str("near b = 3a\n");
    }
    let names: Vec<String> = sheets.iter().map(|s| s.to_string()).collect();
    writeln!(text, "intersecting sheets {}", names.join(" ")).unwrap();
    #[derive(Serialize)]
    struct Body {
        #[serde(flatten)]
        case: caustica::classifier::CaseClass,
        regions: usize,
        intersecting_sheets: Vec<Sheet>,
    }
    let body = Body {
        case: k,
        regions: k.case_id.regions(),
        intersecting_sheets: sheets,
    };
    Ok(Output::new("case", text, &body, false))
}
