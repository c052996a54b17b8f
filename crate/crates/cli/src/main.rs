mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use caustica::export::Format;
use caustica::Paraboloid;
use clap::{Args, Parser, Subcommand};

use commands::{CliError, Common, MeshArgs, Output};
use config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "caustica", version, about = "Normals, caustics and normal counts of z = (a x² + b y²)/2")]
struct Cli {
    /// `key = value` file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for written files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Root merge tolerance and geometric band.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Exit with status 3 when the answer lies in the boundary band.
    #[arg(long, global = true)]
    strict: bool,
    /// Print the JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone, Copy)]
struct Surface {
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Feet of the normals through a point.
    Normals {
        #[command(flatten)]
        s: Surface,
        #[arg(long, allow_hyphen_values = true, value_parser = triple)]
        point: Option<[f64; 3]>,
    },
    /// Normal count and location of a point in space.
    Classify {
        #[command(flatten)]
        s: Surface,
        #[arg(long, allow_hyphen_values = true, value_parser = triple)]
        point: Option<[f64; 3]>,
    },
    /// Normal count at a point of the paraboloid given by (x, y).
    OnSurface {
        #[command(flatten)]
        s: Surface,
        #[arg(long, allow_hyphen_values = true, value_parser = pair)]
        xy: Option<[f64; 2]>,
    },
    /// Regions of the paraboloid by normal count.
    Census {
        #[command(flatten)]
        s: Surface,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Triangulate a caustic sheet, or the paraboloid with --x-max.
    CausticMesh {
        #[command(flatten)]
        s: Surface,
        #[arg(long)]
        sheet: Option<u8>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        u_max: Option<f64>,
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long)]
        format: Option<String>,
    },
    /// Sample curves: 8, 9, nodal, nodal-uv, 14 to 19, or all.
    Curves {
        #[command(flatten)]
        s: Surface,
        #[arg(long)]
        id: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        z_max: Option<f64>,
        #[arg(long)]
        format: Option<String>,
    },
    /// Named points of the caustic.
    Points {
        #[command(flatten)]
        s: Surface,
    },
    /// Compare the solver with the brute-force critical point scan.
    Verify {
        #[command(flatten)]
        s: Surface,
        #[arg(long, allow_hyphen_values = true, value_parser = triple)]
        point: Option<[f64; 3]>,
        #[arg(long)]
        half_width: Option<f64>,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Normals of the plane parabola y = a x²/2.
    Parabola2d {
        #[arg(long)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true, value_parser = pair)]
        point: Option<[f64; 2]>,
    },
    /// Which of the four cases (a, b) falls in.
    Case {
        #[command(flatten)]
        s: Surface,
    },
}

fn floats<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| format!("expected {N} comma-separated numbers"))
}

fn triple(s: &str) -> Result<[f64; 3], String> {
    floats(s)
}

fn pair(s: &str) -> Result<[f64; 2], String> {
    floats(s)
}

fn required<T>(v: Option<T>, what: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("missing --{what} (flag or config key)")))
}

/// A point flag, else the config entry parsed the same way.
fn point_arg<const N: usize>(cfg: &RunConfig, flag: Option<[f64; N]>, key: &str) -> Result<[f64; N], CliError> {
    if let Some(p) = flag {
        return Ok(p);
    }
    let raw = required(cfg.raw(key), key)?;
    floats(raw).map_err(|e| CliError::Usage(format!("config `{key}`: {e}")))
}

fn surface(cfg: &RunConfig, s: Surface) -> Result<Paraboloid, CliError> {
    let a = required(cfg.pick(s.a, "a")?, "a")?;
    let b = required(cfg.pick(s.b, "b")?, "b")?;
    Ok(Paraboloid::new(a, b)?)
}

fn format_arg(cfg: &RunConfig, flag: Option<String>, default: Format) -> Result<Format, CliError> {
    match cfg.pick(flag, "format")? {
        Some(f) => Ok(f.parse()?),
        None => Ok(default),
    }
}

fn run(cli: Cli) -> Result<(Output, bool), CliError> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let strict = cli.strict || cfg.get::<bool>("strict")?.unwrap_or(false);
    let common = Common {
        tol: cfg.pick(cli.tol, "tol")?.unwrap_or(1e-7),
        out: cfg.pick(cli.out, "out")?,
    };
    if !(common.tol.is_finite() && common.tol > 0.0) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let c = &common;
    let out = match cli.cmd {
        Cmd::Normals { s, point } => commands::normals(c, surface(&cfg, s)?, point_arg(&cfg, point, "point")?),
        Cmd::Classify { s, point } => commands::classify(c, surface(&cfg, s)?, point_arg(&cfg, point, "point")?),
        Cmd::OnSurface { s, xy } => commands::on_surface(c, surface(&cfg, s)?, point_arg(&cfg, xy, "xy")?),
        Cmd::Census { s, samples, seed } => commands::census(
            c,
            surface(&cfg, s)?,
            cfg.pick(samples, "samples")?.unwrap_or(20_000),
            cfg.pick(seed, "seed")?.unwrap_or(0),
        ),
        Cmd::CausticMesh {
            s,
            sheet,
            n,
            u_max,
            x_max,
            format,
        } => {
            let m = MeshArgs {
                sheet: cfg.pick(sheet, "sheet")?,
                n: cfg.pick(n, "n")?.unwrap_or(64),
                u_max: cfg.pick(u_max, "u_max")?,
                x_max: cfg.pick(x_max, "x_max")?,
                format: format_arg(&cfg, format, Format::Obj)?,
            };
            commands::caustic_mesh(c, surface(&cfg, s)?, m)
        }
        Cmd::Curves {
            s,
            id,
            n,
            z_max,
            format,
        } => commands::curves(
            c,
            surface(&cfg, s)?,
            &cfg.pick(id, "id")?.unwrap_or_else(|| "all".into()),
            cfg.pick(n, "n")?.unwrap_or(200),
            cfg.pick(z_max, "z_max")?,
            format_arg(&cfg, format, Format::Csv)?,
        ),
        Cmd::Points { s } => commands::points(surface(&cfg, s)?),
        Cmd::Verify {
            s,
            point,
            half_width,
            resolution,
        } => commands::verify(
            c,
            surface(&cfg, s)?,
            point_arg(&cfg, point, "point")?,
            cfg.pick(half_width, "half_width")?,
            cfg.pick(resolution, "resolution")?,
        ),
        Cmd::Parabola2d { a, point } => commands::parabola2d(
            required(cfg.pick(a, "a")?, "a")?,
            point_arg(&cfg, point, "point")?,
        ),
        Cmd::Case { s } => commands::case(c, surface(&cfg, s)?),
    }?;
    Ok((out, strict))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let json = cli.json;
    match run(cli) {
        Ok((out, strict)) => {
            print!("{}", if json { &out.json } else { &out.text });
            if out.boundary && strict {
                eprintln!("caustica: result lies in the boundary band");
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("caustica: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
