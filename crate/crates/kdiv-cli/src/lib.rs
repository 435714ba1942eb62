//! The `kdiv` command line. [`run_command`] does all the work and returns
//! the exit code with the text to print, so tests can drive it directly.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use kdiv::{
    catalog, cover_table, divisibility, execute, parse_recipe, phi_inverse, phi_map, q_set, realizable,
    serialize_recipe, validate, CoverParams, ManifoldDescriptor, Realizability, Recipe, TableRow,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Largest number of lattice points a single scan may visit.
pub const SCAN_LIMIT: usize = 100_000;

pub const CSV_HEADER: &str = "constructor,params,chi_h,c1_sq,e,sigma,spin,divisibility,certified";

#[derive(Debug, Parser)]
#[command(name = "kdiv", version, about = "Construct 4-manifolds and certify the divisibility of K")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Which {
    Barlow,
    Leepark,
    Both,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a constructor and print the resulting descriptor.
    Construct {
        constructor: String,
        #[arg(allow_negative_numbers = true)]
        params: Vec<String>,
        /// Write the construction recipe to this file.
        #[arg(long)]
        recipe_out: Option<PathBuf>,
    },
    /// Re-execute a recipe file and validate the result.
    Verify { file: PathBuf },
    /// Emit CSV rows for every realized point of a constructor over ranges.
    Scan {
        #[arg(long)]
        regime: String,
        /// Comma-separated `name=a..b` or `name=a` entries, e.g. `n=1..5,d=1..5`.
        #[arg(long)]
        ranges: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the invariants of pluricanonical covers of the catalog surfaces.
    Tables {
        #[arg(long, value_enum, default_value = "both")]
        which: Which,
    },
    /// Print the Q-set of a divisor list, largest first.
    Qset { d: u64, divisors: String },
    /// Transport (e, c1^2) under a pluricanonical cover, or invert it.
    Phi {
        #[arg(long)]
        m: i64,
        #[arg(long)]
        d: i64,
        #[arg(long)]
        inverse: bool,
        #[arg(allow_negative_numbers = true)]
        e: i64,
        #[arg(allow_negative_numbers = true)]
        c: i64,
    },
    /// Search the constructors for a point (chi_h, c1^2) with divisibility d.
    Realize {
        chi: i64,
        #[arg(allow_negative_numbers = true)]
        c1_sq: i64,
        d: i64,
    },
}

/// Result of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Self { code: EXIT_OK, output }
    }

    fn usage(output: String) -> Self {
        Self { code: EXIT_USAGE, output }
    }
}

/// Parses `args` (without the program name) and runs the command.
pub fn run_command<S: AsRef<str>>(args: &[S]) -> Outcome {
    let argv = std::iter::once("kdiv").chain(args.iter().map(AsRef::as_ref));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return Outcome { code, output: e.render().to_string() };
        }
    };
    match cli.command {
        Command::Construct { constructor, params, recipe_out } => construct(&constructor, &params, recipe_out),
        Command::Verify { file } => verify(&file),
        Command::Scan { regime, ranges, out } => match scan(&regime, &ranges) {
            Ok(csv) => match out {
                Some(path) => match std::fs::write(&path, &csv) {
                    Ok(()) => Outcome::ok(format!("wrote {}\n", path.display())),
                    Err(e) => Outcome::usage(format!("error: cannot write {}: {e}\n", path.display())),
                },
                None => Outcome::ok(csv),
            },
            Err(e) => Outcome::usage(format!("error: {e:#}\n")),
        },
        Command::Tables { which } => match tables(which) {
            Ok(text) => Outcome::ok(text),
            Err(e) => Outcome { code: EXIT_INVALID, output: format!("error: {e:#}\n") },
        },
        Command::Qset { d, divisors } => match qset(d, &divisors) {
            Ok(text) => Outcome::ok(text),
            Err(e) => Outcome::usage(format!("error: {e:#}\n")),
        },
        Command::Phi { m, d, inverse, e, c } => match phi(m, d, inverse, e, c) {
            Ok(text) => Outcome::ok(text),
            Err(e) => Outcome::usage(format!("error: {e:#}\n")),
        },
        Command::Realize { chi, c1_sq, d } => realize(chi, c1_sq, d),
    }
}

fn ints(params: &[String], names: &[&str]) -> anyhow::Result<Vec<i64>> {
    if params.len() != names.len() {
        bail!("expected {} parameter(s): {}", names.len(), names.join(" "));
    }
    params
        .iter()
        .zip(names)
        .map(|(p, n)| p.parse::<i64>().with_context(|| format!("parameter `{n}` must be an integer, got `{p}`")))
        .collect()
}

fn int_list(text: &str) -> anyhow::Result<Vec<i64>> {
    text.split(',')
        .map(|s| s.trim().parse::<i64>().with_context(|| format!("`{s}` is not an integer")))
        .collect()
}

/// Turns a command-line constructor call into a recipe node.
pub fn constructor_recipe(name: &str, params: &[String]) -> anyhow::Result<Recipe> {
    let with = |keys: &[&str]| -> anyhow::Result<Recipe> {
        let values = ints(params, keys)?;
        Ok(keys.iter().zip(values).fold(Recipe::new(name), |r, (k, v)| r.int(k, v)))
    };
    match name {
        "homotopy_elliptic" => with(&["n", "d"]),
        "spin_surface" => with(&["d", "m", "t"]),
        "nonspin_surface" => with(&["d", "n", "t"]),
        "negative_c1" => with(&["n", "r"]),
        "elliptic_surface" => with(&["n", "p", "q"]),
        "knot_product" => with(&["h"]),
        "surface_bundle_y" => with(&["g", "h"]),
        "singular_double_cover" => with(&["n", "m"]),
        "persson_cover" => with(&["m", "d", "chi", "c1_sq"]),
        "catalog" => {
            let (entry, rest) = params.split_first().ok_or_else(|| anyhow!("catalog needs a surface name"))?;
            let args = rest.iter().map(|s| s.parse::<i64>()).collect::<Result<Vec<_>, _>>()?;
            Ok(Recipe::new("catalog").name("name", entry).ints("args", &args))
        }
        "pluricanonical_cover" => {
            if params.len() < 3 {
                bail!("expected: <catalog-name> <m> <d> [catalog args...]");
            }
            let m = params[1].parse::<i64>().context("m must be an integer")?;
            let d = params[2].parse::<i64>().context("d must be an integer")?;
            let args = params[3..].iter().map(|s| s.parse::<i64>()).collect::<Result<Vec<_>, _>>()?;
            let base = Recipe::new("catalog").name("name", &params[0]).ints("args", &args);
            Ok(Recipe::new("pluricanonical_cover").int("m", m).int("d", d).input(base))
        }
        "inequivalent_family" => {
            // d divisors regime count [t] pattern
            if params.len() < 5 {
                bail!("expected: <d> <d0,d1,...> <regime> <n|m> [t] <pattern>");
            }
            let d = params[0].parse::<i64>().context("d must be an integer")?;
            let divisors = int_list(&params[1])?;
            let regime = params[2].as_str();
            let count = params[3].parse::<i64>().context("n or m must be an integer")?;
            let mut r = Recipe::new("inequivalent_family").int("d", d).ints("divisors", &divisors).name("regime", regime);
            let pattern = match (regime, params.len()) {
                ("c1sq_zero", 5) => {
                    r = r.int("n", count);
                    &params[4]
                }
                ("spin_positive" | "nonspin_positive", 6) => {
                    r = r.int("m", count).int("t", params[4].parse().context("t must be an integer")?);
                    &params[5]
                }
                _ => bail!("regime `{regime}` takes {} parameters", if regime == "c1sq_zero" { 5 } else { 6 }),
            };
            Ok(r.int("pattern", pattern.parse().context("pattern must be an integer")?))
        }
        other => bail!("unknown constructor `{other}`"),
    }
}

/// Text block describing a descriptor, its certificate and validation.
pub fn describe(x: &ManifoldDescriptor) -> (bool, String) {
    let mut s = String::new();
    let report = validate(x);
    let _ = writeln!(s, "e: {}", x.e);
    let _ = writeln!(s, "sigma: {}", x.sigma);
    match x.derived() {
        Ok(inv) => {
            let _ = writeln!(s, "c1_sq: {}", inv.c1_sq);
            let _ = writeln!(s, "chi_h: {}", inv.chi_h);
            match inv.b2_plus {
                Some(b) => writeln!(s, "b2_plus: {b}"),
                None => writeln!(s, "b2_plus: n/a"),
            }
            .ok();
        }
        Err(e) => {
            let _ = writeln!(s, "invariants: {e}");
        }
    }
    let _ = writeln!(s, "spin: {}", x.spin);
    let _ = writeln!(s, "simply_connected: {}", x.simply_connected);
    match divisibility(x) {
        Ok(c) => {
            let _ = writeln!(
                s,
                "divisibility: lower={} upper={} certified={}",
                c.lower, c.upper, c.certified
            );
        }
        Err(e) => {
            let _ = writeln!(s, "divisibility: {e}");
        }
    }
    for f in report.failures() {
        let _ = writeln!(s, "failed {}: {}", f.name, f.detail);
    }
    let ok = report.all_passed();
    let _ = writeln!(s, "{}", if ok { "VALID" } else { "INVALID" });
    (ok, s)
}

fn construct(name: &str, params: &[String], recipe_out: Option<PathBuf>) -> Outcome {
    let recipe = match constructor_recipe(name, params) {
        Ok(r) => r,
        Err(e) => return Outcome::usage(format!("error: {e:#}\n")),
    };
    let x = match execute(&recipe) {
        Ok(x) => x,
        Err(e) => return Outcome::usage(format!("error: {e}\n")),
    };
    let (ok, mut text) = describe(&x);
    if let Some(path) = recipe_out {
        if let Err(e) = std::fs::write(&path, serialize_recipe(&x.recipe)) {
            return Outcome::usage(format!("error: cannot write {}: {e}\n", path.display()));
        }
        let _ = writeln!(text, "recipe written to {}", path.display());
    }
    Outcome { code: if ok { EXIT_OK } else { EXIT_INVALID }, output: text }
}

fn verify(file: &PathBuf) -> Outcome {
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => return Outcome::usage(format!("error: cannot read {}: {e}\n", file.display())),
    };
    let recipe = match parse_recipe(&text) {
        Ok(r) => r,
        Err(e) => return Outcome::usage(format!("error: {e}\n")),
    };
    match execute(&recipe) {
        Ok(x) => {
            let (ok, out) = describe(&x);
            Outcome { code: if ok { EXIT_OK } else { EXIT_INVALID }, output: out }
        }
        Err(e) => Outcome { code: EXIT_INVALID, output: format!("error: {e}\nINVALID\n") },
    }
}

/// Parameter names of each scannable constructor, in iteration order.
pub fn scan_parameters(regime: &str) -> Option<&'static [&'static str]> {
    Some(match regime {
        "homotopy_elliptic" => &["n", "d"],
        "spin_surface" => &["d", "m", "t"],
        "nonspin_surface" => &["d", "n", "t"],
        "negative_c1" => &["n", "r"],
        "singular_double_cover" => &["n", "m"],
        _ => return None,
    })
}

fn parse_ranges(text: &str) -> anyhow::Result<Vec<(String, i64, i64)>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, range) = part.split_once('=').ok_or_else(|| anyhow!("`{part}` is not name=range"))?;
        let (lo, hi) = match range.split_once("..") {
            Some((a, b)) => (a.trim().parse::<i64>()?, b.trim().parse::<i64>()?),
            None => {
                let v = range.trim().parse::<i64>()?;
                (v, v)
            }
        };
        if lo > hi {
            bail!("empty range for `{name}`");
        }
        out.push((name.trim().to_string(), lo, hi));
    }
    Ok(out)
}

/// CSV of every point in the ranges that the constructor realizes.
/// Points the constructor rejects are skipped.
pub fn scan(regime: &str, ranges: &str) -> anyhow::Result<String> {
    let names = scan_parameters(regime).ok_or_else(|| anyhow!("unknown regime `{regime}`"))?;
    let given = parse_ranges(ranges)?;
    for (n, _, _) in &given {
        if !names.contains(&n.as_str()) {
            bail!("`{regime}` has no parameter `{n}`");
        }
    }
    let mut bounds = Vec::new();
    let mut total: usize = 1;
    for name in names {
        let (_, lo, hi) = given
            .iter()
            .find(|(n, _, _)| n == name)
            .ok_or_else(|| anyhow!("missing range for `{name}`"))?;
        total = total.saturating_mul((hi - lo + 1) as usize);
        bounds.push((*lo, *hi));
    }
    if total > SCAN_LIMIT {
        bail!("{total} points exceed the scan limit of {SCAN_LIMIT}");
    }
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    let mut point: Vec<i64> = bounds.iter().map(|b| b.0).collect();
    'outer: loop {
        let recipe = names.iter().zip(&point).fold(Recipe::new(regime), |r, (k, &v)| r.int(k, v));
        if let Ok(x) = execute(&recipe) {
            csv.push_str(&csv_row(regime, names, &point, &x)?);
        }
        for i in (0..point.len()).rev() {
            if point[i] < bounds[i].1 {
                point[i] += 1;
                continue 'outer;
            }
            point[i] = bounds[i].0;
        }
        break;
    }
    Ok(csv)
}

fn csv_row(regime: &str, names: &[&str], point: &[i64], x: &ManifoldDescriptor) -> anyhow::Result<String> {
    let params: Vec<String> = names.iter().zip(point).map(|(k, v)| format!("{k}={v}")).collect();
    let inv = x.derived()?;
    let cert = divisibility(x)?;
    Ok(format!(
        "{regime},{},{},{},{},{},{},{},{}\n",
        params.join(";"),
        inv.chi_h,
        inv.c1_sq,
        x.e,
        x.sigma,
        x.spin,
        cert.lower,
        cert.certified
    ))
}

fn format_rows(title: &str, rows: &[TableRow]) -> String {
    let mut s = format!("# {title}\n");
    let _ = writeln!(
        s,
        "{:>4} {:>4} {:>4} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6}",
        "d", "m", "ma", "Delta", "e", "c1^2", "chi_h", "b2+", "sigma"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:>4} {:>4} {:>4} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6}",
            r.d, r.m, r.ma, r.delta, r.e, r.c1_sq, r.chi_h, r.b2_plus, r.sigma
        );
    }
    s
}

fn tables(which: Which) -> anyhow::Result<String> {
    let mut out = String::new();
    if matches!(which, Which::Barlow | Which::Both) {
        out.push_str(&format_rows("covers of the Barlow surface", &cover_table(&catalog("barlow", &[])?)?));
    }
    if matches!(which, Which::Both) {
        out.push('\n');
    }
    if matches!(which, Which::Leepark | Which::Both) {
        out.push_str(&format_rows("covers of the Lee-Park surface", &cover_table(&catalog("lee_park", &[])?)?));
    }
    Ok(out)
}

fn qset(d: u64, divisors: &str) -> anyhow::Result<String> {
    let list = divisors
        .split(',')
        .map(|s| s.trim().parse::<u64>().with_context(|| format!("`{s}` is not a positive integer")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let q = q_set(d, &list)?;
    let parts: Vec<String> = q.iter().rev().map(u64::to_string).collect();
    Ok(format!("{}\n", parts.join(" ")))
}

fn phi(m: i64, d: i64, inverse: bool, e: i64, c: i64) -> anyhow::Result<String> {
    let p = CoverParams::new(m, d)?;
    if inverse {
        let (x, y) = phi_inverse(&p, e, c)?;
        Ok(format!("{x} {y}\n"))
    } else {
        let (x, y) = phi_map(&p, e, c)?;
        Ok(format!("{x} {y}\n"))
    }
}

fn realize(chi: i64, c1_sq: i64, d: i64) -> Outcome {
    match realizable(chi, c1_sq, d) {
        Ok(Realizability::Realized { constructor, params }) => {
            let shown: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let recipe = params.iter().fold(Recipe::new(constructor), |r, (k, v)| r.int(k, *v));
            let mut out = format!("realized: {constructor} {}\n", shown.join(";"));
            match execute(&recipe) {
                Ok(x) => {
                    let (ok, text) = describe(&x);
                    out.push_str(&text);
                    Outcome { code: if ok { EXIT_OK } else { EXIT_INVALID }, output: out }
                }
                Err(e) => Outcome { code: EXIT_INVALID, output: format!("{out}error: {e}\n") },
            }
        }
        Ok(Realizability::Obstructed(why)) => Outcome::ok(format!("obstructed: {why}\n")),
        Ok(Realizability::Unknown) => Outcome::ok("unknown\n".to_string()),
        Err(e) => Outcome::usage(format!("error: {e}\n")),
    }
}
