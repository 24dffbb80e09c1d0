use cads_core::geometry::Point;
use cads_core::modes::{frequency, radial_profile, Family, ModeSpec};
use cads_core::products::{regularized_inner, singleton_norm_formula, SingletonSector};
use cads_core::propagators::{ff_mode_sum, gb_decomposition, mode_sum, Kind, PropagatorKind};
use cads_core::quadrature::QuadratureConfig;
use cads_core::report::{Status, SCHEMA_VERSION};
use cads_core::spectral::{level_energies, minimize_potential, potential_v, PotentialSpec};
use cads_core::verify::{self, Suite};
use cads_core::{Complex64, Error};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;

const EDGE: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "cads", version, about = "Scalar modes, propagators and checks on covering AdS_d")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a mode F(t, r) = f(r) e^{-i omega t} on a radial grid.
    Modes {
        #[arg(long)]
        family: String,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        e0: Option<f64>,
        /// Offset m for the degenerate family, E0 = (d-1)/2 + m.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        m: i32,
        #[arg(long, default_value_t = 0)]
        l: u32,
        #[arg(long, default_value_t = 0)]
        k: u32,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value = "0:1.5:16")]
        grid: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Closed-form two-point function, optionally against its mode sum.
    Propagator {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        e0: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, conflicts_with_all = ["r", "t"])]
        z: Option<f64>,
        #[arg(long, requires = "t")]
        r: Option<f64>,
        #[arg(long, requires = "r", allow_hyphen_values = true)]
        t: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        c1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        c2: Option<f64>,
        #[arg(long, value_parser = ["mode-sum"])]
        compare: Option<String>,
        #[arg(long, default_value_t = 500)]
        terms: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Regularized norms of the singleton and gauge modes.
    Norms {
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 0)]
        l: u32,
        #[arg(long, default_value_t = 3)]
        kmax: u32,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3,1e-4")]
        eps: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Split of the dipole two-point function into singleton, gauge and scalar parts.
    Triplet {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        r: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 2000)]
        terms: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Schroedinger potential of a mode, its infimum and the level energies.
    Potential {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        e0: f64,
        #[arg(long, default_value_t = 0)]
        l: u32,
        #[arg(long, default_value = "0:1.5:16")]
        grid: String,
        #[arg(long, default_value_t = 3)]
        levels: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run the property suites and emit a report.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        json: Option<std::path::PathBuf>,
        #[arg(long, env = "CADS_TOL_SCALE", default_value_t = 1.0)]
        tol_scale: f64,
    },
}

enum Fail {
    Input(String),
    Internal(String),
    Verify,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::InvalidSpec(_) | Error::Divergent(_) | Error::Degenerate(_) => {
                Fail::Input(e.to_string())
            }
            _ => Fail::Internal(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Verify) => ExitCode::from(1),
        Err(Fail::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Fail::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}

fn num(x: f64) -> String {
    format!("{:.9e}", x + 0.0)
}

fn parse_grid(s: &str) -> Result<Vec<f64>, Fail> {
    let bad = || Fail::Input(format!("grid must be start:stop:count, got '{s}'"));
    let p: Vec<&str> = s.split(':').collect();
    if p.len() != 3 {
        return Err(bad());
    }
    let start: f64 = p[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = p[1].trim().parse().map_err(|_| bad())?;
    let count: usize = p[2].trim().parse().map_err(|_| bad())?;
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    let clip = |r: f64| r.clamp(EDGE, FRAC_PI_2 - EDGE);
    Ok((0..count)
        .map(|i| {
            let f = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
            clip(start + f * (stop - start))
        })
        .collect())
}

fn emit(format: Format, header: &[&str], rows: &[Vec<f64>], meta: Value) {
    match format {
        Format::Csv => {
            println!("{}", header.join(","));
            for r in rows {
                println!("{}", r.iter().map(|x| num(*x)).collect::<Vec<_>>().join(","));
            }
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| Value::Object(header.iter().zip(r).map(|(h, x)| (h.to_string(), json!(x))).collect()))
                .collect();
            let mut v = meta;
            v["schema_version"] = json!(SCHEMA_VERSION);
            v["rows"] = Value::Array(rows);
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
        }
    }
}

fn run(cmd: Cmd) -> Result<(), Fail> {
    match cmd {
        Cmd::Modes { family, d, e0, m, l, k, a, grid, t, format } => {
            let fam: Family = family.parse()?;
            let spec = if fam == Family::Degenerate {
                ModeSpec::degenerate(d, m, l, k, a)?
            } else {
                match (e0, fam.forced_e0(d)) {
                    (Some(e0), _) => ModeSpec::new(fam, d, e0, l, k, a)?,
                    (None, Some(_)) => ModeSpec::fixed(fam, d, l, k, a)?,
                    (None, None) => return Err(Fail::Input(format!("family {fam} needs --e0"))),
                }
            };
            let prof = radial_profile(&spec)?;
            let omega = frequency(&spec)?;
            let phase = Complex64::from_polar(1.0, -omega * t);
            let rows: Vec<Vec<f64>> = parse_grid(&grid)?
                .into_iter()
                .map(|r| {
                    let v = phase * prof.eval(r);
                    vec![r, v.re + 0.0, v.im + 0.0]
                })
                .collect();
            let meta = json!({ "command": "modes", "spec": spec, "omega": omega, "t": t });
            emit(format, &["r", "re", "im"], &rows, meta);
        }
        Cmd::Propagator { kind, d, e0, a, z, r, t, c1, c2, compare, terms, format } => {
            let mut kind: Kind = kind.parse()?;
            if let Kind::GeneralZ { c1: k1, c2: k2 } = kind {
                kind = Kind::GeneralZ { c1: c1.unwrap_or(k1), c2: c2.unwrap_or(k2) };
            }
            let e0 = match e0 {
                Some(e) => e,
                None if kind.fixes_e0() => 0.5 * (d as f64 - 3.0),
                None => return Err(Fail::Input(format!("propagator kind {kind} needs --e0"))),
            };
            let p = PropagatorKind::new(kind, d, e0, a)?;
            let (r, t) = match (z, r, t) {
                (Some(z), None, None) => {
                    if !(z > 1.0) {
                        return Err(Fail::Input(format!("z must exceed 1, got {z}")));
                    }
                    ((1.0 / z).acos(), 0.0)
                }
                (None, Some(r), Some(t)) => (r, t),
                _ => return Err(Fail::Input("give either --z or both --r and --t".into())),
            };
            let z = t.cos() / r.cos();
            let cf = p.closed_form(z)?;
            let meta = json!({ "command": "propagator", "kind": kind.to_string(), "d": d, "e0": e0, "a": a });
            match compare {
                None => emit(format, &["z", "closed_form"], &[vec![z, cf]], meta),
                Some(_) => {
                    let x = Point::new(t, r, vec![0.0; d.saturating_sub(2) as usize]);
                    let ms = match kind {
                        Kind::DirichletClosed => mode_sum(d, e0, Family::Dirichlet, &x, terms, a)?,
                        Kind::NeumannClosed => mode_sum(d, e0, Family::Neumann, &x, terms, a)?,
                        Kind::SingletonLimit => mode_sum(d, e0, Family::Gauge, &x, terms, a)?,
                        Kind::FlatoFronsdal if a == 1.0 => ff_mode_sum(d, r, t, terms)?,
                        _ => return Err(Fail::Input(format!("no mode sum for kind {kind} (a = {a})"))),
                    };
                    let rel = (ms.re() - cf).abs() / cf.abs();
                    emit(
                        format,
                        &["z", "closed_form", "mode_sum", "rel_diff", "tail_estimate"],
                        &[vec![z, cf, ms.re(), rel, ms.tail_estimate]],
                        meta,
                    );
                }
            }
        }
        Cmd::Norms { d, l, kmax, a, eps, format } => {
            let q = QuadratureConfig::default();
            let mut rows = Vec::new();
            let s = SingletonSector::Singleton { l };
            rows.push(vec![-1.0, regularized_inner(d, a, s, s, &eps, &q)?.value, singleton_norm_formula(d, l, a)]);
            for k in 0..=kmax {
                let g = SingletonSector::Gauge { l, k };
                rows.push(vec![k as f64, regularized_inner(d, a, g, g, &eps, &q)?.value, 0.0]);
            }
            let meta = json!({ "command": "norms", "d": d, "l": l, "a": a, "eps": eps,
                "note": "k = -1 is the singleton; k >= 0 are gauge modes" });
            emit(format, &["k", "norm", "expected"], &rows, meta);
        }
        Cmd::Triplet { d, r, t, terms, format } => {
            let g = gb_decomposition(d, r, t, terms)?;
            let z = t.cos() / r.cos();
            let cf = PropagatorKind::new(Kind::FlatoFronsdal, d, 0.0, 1.0)?.closed_form(z)?;
            let row = vec![
                z,
                g.singleton_term.re,
                g.gauge_series.re,
                g.scalar_series.re,
                g.total.re,
                cf,
                (g.total.re - cf).abs() / cf.abs(),
                g.tail_estimate,
            ];
            let meta = json!({ "command": "triplet", "d": d, "r": r, "t": t, "terms": terms });
            emit(
                format,
                &["z", "singleton", "gauge", "scalar", "total", "closed_form", "rel_diff", "tail_estimate"],
                &[row],
                meta,
            );
        }
        Cmd::Potential { d, e0, l, grid, levels, format } => {
            let spec = PotentialSpec::new(d, e0, l)?;
            let rows = parse_grid(&grid)?
                .into_iter()
                .map(|r| potential_v(&spec, r).map(|v| vec![r, v]))
                .collect::<Result<Vec<_>, _>>()?;
            let min = minimize_potential(&spec)?;
            let meta = json!({ "command": "potential", "d": d, "e0": e0, "l": l,
                "infimum": min, "levels": level_energies(&spec, levels) });
            if let Format::Csv = format {
                eprintln!(
                    "inf V = {} at r = {} ({:?})",
                    num(min.value),
                    num(min.argmin),
                    min.location
                );
            }
            emit(format, &["r", "v"], &rows, meta);
        }
        Cmd::Verify { suite, json, tol_scale } => {
            let suite: Suite = suite.parse()?;
            if !(tol_scale > 0.0 && tol_scale.is_finite()) {
                return Err(Fail::Input(format!("--tol-scale must be positive, got {tol_scale}")));
            }
            let report = verify::run(suite, tol_scale).map_err(|e| Fail::Internal(e.to_string()))?;
            for c in report.cases.iter().filter(|c| c.status != Status::Pass) {
                println!("{:?} {} residual {} tolerance {} {}", c.status, c.name, num(c.residual), num(c.tolerance), c.notes);
            }
            let failed = report.failures().count();
            println!(
                "suite {}: {} cases, {} failed, {} errata",
                report.suite,
                report.cases.len(),
                failed,
                report.errata.len()
            );
            if let Some(path) = json {
                std::fs::write(&path, report.to_json() + "\n")
                    .map_err(|e| Fail::Internal(format!("writing {}: {e}", path.display())))?;
            }
            if failed > 0 {
                return Err(Fail::Verify);
            }
        }
    }
    Ok(())
}
