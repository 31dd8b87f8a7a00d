//! Command-line front end for `toric-obstruct`.
//!
//! Exit codes: 0 success, 1 checked and negative, 2 invalid input or usage.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use toric_obstruct::cech::{bracket_cup, classify, tangent_cohomology, TangentCechComplex};
use toric_obstruct::certify::{
    certify_obstructed_pair, check_certificate, reproduce_paper, search_obstructed,
    ObstructionCertificate,
};
use toric_obstruct::fan::{
    example_fan, product_fan, projective_space_fan, toric_boundary, validate_fan, Fan,
};
use toric_obstruct::formats::{divisor_from_json, fan_from_json, fan_to_json};
use toric_obstruct::nerve::CechNerve;
use toric_obstruct::sheafcoh::{graded_dims, scan_box, SheafDescriptor};
use toric_obstruct::Error;

pub const THREADS_VAR: &str = "TORIC_OBSTRUCT_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "toric-obstruct",
    version,
    about = "Obstructed deformations of toric pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SheafArg {
    Tangent,
    Line,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Tsv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check smoothness, completeness and the fan condition.
    Validate {
        #[arg(long)]
        fan: PathBuf,
    },
    /// Print a fan: `example3fold`, `projective-space:M` or `product A.json B.json`.
    MakeFan {
        builder: String,
        files: Vec<PathBuf>,
    },
    /// Graded cohomology dimensions over a box or at one degree.
    Cohomology {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long, value_enum)]
        sheaf: SheafArg,
        /// Divisor JSON file or `boundary`.
        #[arg(long, default_value = "boundary")]
        divisor: String,
        /// A cohomological index or `all`.
        #[arg(long = "i", default_value = "all")]
        index: String,
        #[arg(
            long = "box",
            conflicts_with = "degree",
            required_unless_present = "degree"
        )]
        bound: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        degree: Option<String>,
        #[arg(long, value_enum, default_value = "tsv")]
        format: FormatArg,
    },
    /// Cup products of the H^1(T_X) basis classes in two degrees.
    Cup {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        u1: String,
        #[arg(long, allow_hyphen_values = true)]
        u2: String,
    },
    /// Certify a degree pair, or search a box for certifiable pairs.
    Certify {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "search")]
        u1: Option<String>,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "search")]
        u2: Option<String>,
        #[arg(long, conflicts_with_all = ["u1", "u2"], requires = "bound")]
        search: bool,
        #[arg(long = "box")]
        bound: Option<i64>,
    },
    /// Re-check every claim of a certificate.
    Verify {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Certificate for the example threefold times P^{n-3}.
    ReproducePaper {
        #[arg(long)]
        dim: usize,
    },
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
enum Failure {
    Negative(String),
    Invalid(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", path.display())))
}

/// Reads a `toricfan-v1` file and builds the fan.
pub fn parse_fan_file(path: &Path) -> toric_obstruct::Result<Fan> {
    let s = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    fan_from_json(&s).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        Error::InvalidFan(m) => Error::InvalidFan(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Comma-separated integers.
pub fn parse_degree(s: &str) -> toric_obstruct::Result<Vec<i64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("degree {s:?}: {x:?} is not an integer")))
        })
        .collect()
}

fn degree_for(f: &Fan, s: &str) -> std::result::Result<Vec<i64>, Failure> {
    let u = parse_degree(s)?;
    if u.len() != f.dim() {
        return Err(Failure::Invalid(format!(
            "degree {s:?} has {} entries, the fan has dimension {}",
            u.len(),
            f.dim()
        )));
    }
    Ok(u)
}

fn make_fan(builder: &str, files: &[PathBuf]) -> std::result::Result<Fan, Failure> {
    let no_files = |f: Fan| {
        if files.is_empty() {
            Ok(f)
        } else {
            Err(Failure::Invalid(format!(
                "builder {builder} takes no files"
            )))
        }
    };
    if builder == "example3fold" {
        return no_files(example_fan());
    }
    if let Some(m) = builder.strip_prefix("projective-space:") {
        let m: usize = m
            .parse()
            .map_err(|_| Failure::Invalid(format!("{m:?} is not a dimension")))?;
        return no_files(projective_space_fan(m)?);
    }
    if builder == "product" {
        if files.len() != 2 {
            return Err(Failure::Invalid(
                "product takes exactly two fan files".into(),
            ));
        }
        let a = parse_fan_file(&files[0])?;
        let b = parse_fan_file(&files[1])?;
        return Ok(product_fan(&a, &b));
    }
    Err(Failure::Invalid(format!(
        "unknown builder {builder:?}; expected example3fold, projective-space:M or product"
    )))
}

fn indices(arg: &str, sheaf: SheafArg, n: usize) -> std::result::Result<Vec<usize>, Failure> {
    if arg == "all" {
        return Ok(match sheaf {
            SheafArg::Tangent => (1..=n).collect(),
            SheafArg::Line => (0..=n).collect(),
        });
    }
    let i: usize = arg
        .parse()
        .map_err(|_| Failure::Invalid(format!("--i expects an index or all, got {arg:?}")))?;
    if i > n {
        return Err(Failure::Invalid(format!(
            "index {i} exceeds the dimension {n}"
        )));
    }
    Ok(vec![i])
}

fn row(u: &[i64], dims: &[usize]) -> String {
    let fields: Vec<String> = u
        .iter()
        .map(ToString::to_string)
        .chain(dims.iter().map(ToString::to_string))
        .collect();
    fields.join("\t") + "\n"
}

#[allow(clippy::too_many_arguments)]
fn cohomology(
    out: &mut dyn Write,
    err: &mut dyn Write,
    fan: &Path,
    sheaf: SheafArg,
    divisor: &str,
    index: &str,
    bound: Option<i64>,
    degree: Option<&str>,
    format: FormatArg,
) -> Outcome {
    let f = parse_fan_file(fan)?;
    let idx = indices(index, sheaf, f.dim())?;
    let descriptor = match sheaf {
        SheafArg::Tangent => SheafDescriptor::tangent(idx.clone()),
        SheafArg::Line => {
            let d = if divisor == "boundary" {
                toric_boundary(&f)
            } else {
                divisor_from_json(&read(Path::new(divisor))?)?
            };
            if d.coeffs.len() != f.num_rays() {
                return Err(Failure::Invalid(format!(
                    "divisor has {} coefficients, the fan has {} rays",
                    d.coeffs.len(),
                    f.num_rays()
                )));
            }
            SheafDescriptor::line_bundle(d, idx.clone())
        }
    };
    if let Some(s) = degree {
        let u = degree_for(&f, s)?;
        let dims = match sheaf {
            SheafArg::Tangent if idx == [0] => vec![tangent_cohomology(&f, &u, 0)?.0],
            _ => graded_dims(&f, &descriptor, &u)?,
        };
        let text = match format {
            FormatArg::Tsv => row(&u, &dims),
            FormatArg::Json => json!([{ "degree": u, "dims": dims }]).to_string() + "\n",
        };
        write_out(out, &text)?;
        return Ok(());
    }
    let bound = bound.expect("clap requires --box or --degree");
    let table = scan_box(&f, &descriptor, bound)?;
    if table.boundary_warning {
        let _ = writeln!(
            err,
            "warning: nonzero entries reach the edge of the box {bound}; enlarge --box"
        );
    }
    let text = match format {
        FormatArg::Tsv => table.to_tsv(),
        FormatArg::Json => table.to_json().to_string() + "\n",
    };
    write_out(out, &text)
}

fn write_out(out: &mut dyn Write, text: &str) -> Outcome {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Invalid(format!("cannot write output: {e}")))
}

fn cup(out: &mut dyn Write, fan: &Path, u1: &str, u2: &str) -> Outcome {
    let f = parse_fan_file(fan)?;
    let u1 = degree_for(&f, u1)?;
    let u2 = degree_for(&f, u2)?;
    let (_, b1) = tangent_cohomology(&f, &u1, 1)?;
    let (_, b2) = tangent_cohomology(&f, &u2, 1)?;
    let w: Vec<i64> = u1.iter().zip(&u2).map(|(a, b)| a + b).collect();
    let nerve = Arc::new(CechNerve::new(&f, 2));
    let target = TangentCechComplex::with_nerve(&f, &w, nerve)?;
    let mut pairs = Vec::new();
    let mut any = false;
    for (a, x1) in b1.iter().enumerate() {
        for (b, x2) in b2.iter().enumerate() {
            let z = bracket_cup(&x1.cochain, &u1, &x2.cochain, &u2);
            let class = classify(&target, z)?;
            any |= class.nonzero;
            pairs.push(json!({ "i": a, "j": b, "nonzero": class.nonzero }));
        }
    }
    let doc = json!({
        "u1": u1,
        "u2": u2,
        "degree": w,
        "h1_dims": [b1.len(), b2.len()],
        "pairs": pairs,
        "nonzero": any,
    });
    write_out(out, &(doc.to_string() + "\n"))?;
    if any {
        Ok(())
    } else {
        Err(Failure::Negative("cup product zero".into()))
    }
}

fn certify(
    out: &mut dyn Write,
    err: &mut dyn Write,
    fan: &Path,
    u1: Option<&str>,
    u2: Option<&str>,
    search: bool,
    bound: Option<i64>,
) -> Outcome {
    let f = parse_fan_file(fan)?;
    if search {
        let bound = bound.expect("clap requires --box with --search");
        let report = search_obstructed(&f, bound)?;
        let certs: Vec<String> = report.certified.iter().map(|c| c.to_json()).collect();
        let near: Vec<serde_json::Value> = report
            .near_misses
            .iter()
            .map(|m| {
                json!({
                    "u1": m.u1,
                    "u2": m.u2,
                    "cup_nonzero": m.cup_nonzero,
                    "boundary_h1_zero": { "u1": m.boundary_h1_zero.0, "u2": m.boundary_h1_zero.1 },
                })
            })
            .collect();
        // certificates are spliced verbatim to keep their field order
        let text = format!(
            "{{\"box\":{bound},\"certified\":[{}],\"near_misses\":{}}}\n",
            certs.join(","),
            serde_json::Value::Array(near)
        );
        write_out(out, &text)?;
        let _ = writeln!(
            err,
            "searched box {bound}: {} certified, {} near misses in {:.3}s",
            report.certified.len(),
            report.near_misses.len(),
            report.elapsed.as_secs_f64()
        );
        return if report.certified.is_empty() {
            Err(Failure::Negative("no obstructed pair found".into()))
        } else {
            Ok(())
        };
    }
    let u1 = degree_for(&f, u1.expect("clap requires --u1"))?;
    let u2 = degree_for(&f, u2.expect("clap requires --u2"))?;
    match certify_obstructed_pair(&f, &u1, &u2)? {
        Ok(c) => write_out(out, &(c.to_json() + "\n")),
        Err(reason) => Err(Failure::Negative(reason.to_string())),
    }
}

fn verify(out: &mut dyn Write, cert: &Path) -> Outcome {
    let c = ObstructionCertificate::from_json(&read(cert)?)?;
    match check_certificate(&c) {
        Ok(()) => write_out(out, "true\n"),
        Err(reason) => {
            write_out(out, "false\n")?;
            Err(Failure::Negative(reason))
        }
    }
}

fn validate(out: &mut dyn Write, fan: &Path) -> Outcome {
    let f = parse_fan_file(fan)?;
    let report = validate_fan(&f);
    let text = serde_json::to_string(&report).expect("report serializes") + "\n";
    write_out(out, &text)?;
    if report.is_valid() {
        Ok(())
    } else {
        Err(Failure::Negative(report.failures.join("; ")))
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match cli.command {
        Command::Validate { fan } => validate(out, &fan),
        Command::MakeFan { builder, files } => {
            let f = make_fan(&builder, &files)?;
            write_out(out, &(fan_to_json(&f) + "\n"))
        }
        Command::Cohomology {
            fan,
            sheaf,
            divisor,
            index,
            bound,
            degree,
            format,
        } => cohomology(
            out,
            err,
            &fan,
            sheaf,
            &divisor,
            &index,
            bound,
            degree.as_deref(),
            format,
        ),
        Command::Cup { fan, u1, u2 } => cup(out, &fan, &u1, &u2),
        Command::Certify {
            fan,
            u1,
            u2,
            search,
            bound,
        } => certify(out, err, &fan, u1.as_deref(), u2.as_deref(), search, bound),
        Command::Verify { cert } => verify(out, &cert),
        Command::ReproducePaper { dim } => {
            let c = reproduce_paper(dim)?;
            write_out(out, &(c.to_json() + "\n"))
        }
    }
}

/// Applies `TORIC_OBSTRUCT_THREADS` to the global worker pool.
pub fn configure_threads(value: Option<&str>) -> std::result::Result<(), String> {
    let Some(v) = value else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_VAR} must be a positive integer, got {v:?}"))?;
    // a pool built earlier in the same process keeps its size
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Runs one command, writing machine output to `out` and diagnostics to `err`.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    if let Err(msg) = configure_threads(std::env::var(THREADS_VAR).ok().as_deref()) {
        let _ = writeln!(err, "error: {msg}");
        return 2;
    }
    match dispatch(cli, out, err) {
        Ok(()) => 0,
        Err(Failure::Negative(msg)) => {
            let _ = writeln!(err, "{msg}");
            1
        }
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees_parse() {
        assert_eq!(parse_degree("-1,-1,0").unwrap(), vec![-1, -1, 0]);
        assert!(parse_degree("1,,2").is_err());
        assert!(parse_degree("a").is_err());
    }

    #[test]
    fn thread_variable() {
        assert!(configure_threads(None).is_ok());
        assert!(configure_threads(Some("0")).is_err());
        assert!(configure_threads(Some("x")).is_err());
    }

    #[test]
    fn index_lists() {
        assert_eq!(indices("all", SheafArg::Tangent, 3).unwrap(), vec![1, 2, 3]);
        assert_eq!(indices("all", SheafArg::Line, 2).unwrap(), vec![0, 1, 2]);
        assert!(indices("4", SheafArg::Line, 3).is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
