//! Command dispatch for the `genein` binary.
//!
//! Exit codes: `verify` exits 0 when the structure is generalised Einstein
//! at the working tolerance and 1 when it is not; every command exits 2 on
//! an input error. `--json` switches any report to a machine-readable form.
//! The environment variable `GENEIN_TOL` replaces the built-in default
//! tolerance; an explicit `--tol` or a tolerance stored in the problem file
//! still wins.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::catalog::{
    self, find_entry, instantiate_family, isomorphism_label, lookup_algebra, CatalogEntry,
    ParamMap,
};
use crate::curvature::{bismut_ricci, curvature_report};
use crate::einstein::{
    admissible_divergences, einstein_residuals, trace_route_residuals, GEProblem,
};
use crate::error::{Error, Result};
use crate::io::{self, VerifyReport};
use crate::search::{random_falsification, residual_scan, Grid};

#[derive(Parser)]
#[command(
    name = "genein",
    version,
    about = "Generalised Einstein structures on Lie algebras"
)]
struct Cli {
    /// Emit machine-readable JSON instead of the text report.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    /// The explicit algebraic equations.
    General,
    /// Traces of the operators built from the Dorfman bracket.
    Trace,
    /// Run both routes and report whether they agree.
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Check the generalised Einstein condition for a problem file.
    Verify {
        /// Problem file path, or inline JSON starting with `{`.
        file: String,
        /// Working tolerance, overriding the file and the default.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = Route::General)]
        route: Route,
    },
    /// Levi-Civita curvature of a problem's metric.
    Curvature {
        /// Problem file path, or inline JSON starting with `{`.
        file: String,
        /// Also report the Ricci curvatures of the two metric connections
        /// with skew torsion +-H.
        #[arg(long)]
        bismut: bool,
    },
    /// Browse the built-in algebra table and problem families.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Residual scan of a family over a parameter grid.
    Scan {
        family_id: String,
        /// Grid specification, e.g. `a=0,0.5,1;b=2`.
        #[arg(long)]
        grid: String,
        /// Write the scan rows as JSON to a file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random search for generalised Einstein structures on a table algebra.
    /// Informational: always exits 0 on valid input.
    Falsify {
        /// Table entry name, e.g. `aff_RR` or `A4,9^a`.
        name: String,
        /// Metric signature `p,q` with p + q = dim.
        #[arg(long)]
        signature: String,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// All table entries and all problem families.
    List,
    /// The full record of one table entry.
    Show { name: String },
    /// Instantiate a family as a problem file.
    Build {
        family_id: String,
        /// Parameter assignment `name=value`; repeatable.
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        /// Write the problem JSON to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `argv` (including the program name) and runs the selected
/// command. Returns the exit code and the text to display; code 2 marks an
/// input error and the text is the error message.
pub fn run_command(argv: &[String]) -> (u8, String) {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    let json = cli.json;
    let outcome = match cli.command {
        Command::Verify { file, tol, route } => cmd_verify(json, &file, tol, route),
        Command::Curvature { file, bismut } => cmd_curvature(json, &file, bismut),
        Command::Catalog { action } => match action {
            CatalogAction::List => cmd_catalog_list(json),
            CatalogAction::Show { name } => cmd_catalog_show(json, &name),
            CatalogAction::Build {
                family_id,
                params,
                out,
            } => cmd_catalog_build(&family_id, &params, out.as_deref()),
        },
        Command::Scan {
            family_id,
            grid,
            out,
        } => cmd_scan(json, &family_id, &grid, out.as_deref()),
        Command::Falsify {
            name,
            signature,
            trials,
            seed,
        } => cmd_falsify(json, &name, &signature, trials, seed),
    };
    match outcome {
        Ok((code, text)) => (code, text),
        Err(e) => (2, format!("error: {e}")),
    }
}

fn bad(name: &str, reason: String) -> Error {
    Error::BadParameter {
        name: name.to_string(),
        reason,
    }
}

fn env_tolerance() -> Result<Option<f64>> {
    match std::env::var("GENEIN_TOL") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(Some(t)),
            _ => Err(bad("GENEIN_TOL", format!("must be a positive real, got {s:?}"))),
        },
    }
}

/// Loads a problem with the tolerance resolution order: `--tol` flag, then
/// the file's own tolerance, then `GENEIN_TOL`, then the built-in default.
fn load_with_tolerance(path_or_text: &str, flag: Option<f64>) -> Result<GEProblem> {
    let mut file = io::load_file(path_or_text)?;
    if let Some(t) = flag {
        file.tolerance = Some(t);
    }
    if file.tolerance.is_none() {
        file.tolerance = env_tolerance()?;
    }
    file.to_problem()
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

fn write_matrix(out: &mut String, m: &DMatrix<f64>) {
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| format!("{:>13.5e}", m[(r, c)])).collect();
        let _ = writeln!(out, "    {}", row.join(" "));
    }
}

fn cmd_verify(json: bool, file: &str, tol: Option<f64>, route: Route) -> Result<(u8, String)> {
    let problem = load_with_tolerance(file, tol)?;
    let report = einstein_residuals(&problem);
    let trace = match route {
        Route::General => None,
        _ => Some(trace_route_residuals(&problem)),
    };
    let verdict = match (&trace, route) {
        (None, _) => report.is_einstein,
        (Some(t), Route::Trace) => t.is_einstein,
        (Some(t), _) => report.is_einstein && t.is_einstein,
    };
    let curv = curvature_report(&problem);
    let div_space_dim = admissible_divergences(
        &problem.algebra,
        &problem.metric,
        &problem.h_form,
        problem.tolerance,
    )
    .ok()
    .map(|s| s.dim());
    let signature = problem.metric.signature();
    let code = if verdict { 0 } else { 1 };

    if json {
        let verify = VerifyReport {
            eq1: report.eq1,
            eq2: report.eq2,
            eq3: report.eq3,
            eq4: report.eq4,
            total: report.total,
            is_einstein: verdict,
            signature: [signature.0, signature.1],
            flat: curv.is_flat,
            div_space_dim,
        };
        let mut value = serde_json::to_value(&verify).expect("report serializes");
        if let Some(t) = &trace {
            let map = value.as_object_mut().expect("report is an object");
            map.insert("trace_pairing".into(), json!(t.pairing_eq));
            map.insert("trace_closure".into(), json!(t.closure_eq));
            if route == Route::Both {
                map.insert(
                    "routes_agree".into(),
                    json!(report.is_einstein == t.is_einstein),
                );
            }
        }
        return Ok((code, serde_json::to_string_pretty(&value).expect("json")));
    }

    let analysis = problem.algebra.structure_analysis(problem.tolerance);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "signature ({},{})   tolerance {:.1e}",
        signature.0, signature.1, problem.tolerance
    );
    let _ = writeln!(
        out,
        "structure: dim {}, commutator dim {}, center dim {}, solvable {}, nilpotent {}, unimodular {}",
        analysis.dim,
        analysis.commutator_dim,
        analysis.center_dim,
        yes_no(analysis.solvable),
        yes_no(analysis.nilpotent),
        yes_no(analysis.unimodular)
    );
    let _ = writeln!(out, "eq1   {}", sci(report.eq1));
    let _ = writeln!(out, "eq2   {}", sci(report.eq2));
    let _ = writeln!(out, "eq3   {}", sci(report.eq3));
    let _ = writeln!(out, "eq4   {}", sci(report.eq4));
    let _ = writeln!(out, "total {}", sci(report.total));
    if let Some(t) = &trace {
        let _ = writeln!(
            out,
            "trace route: pairing {}, closure {}, total {}",
            sci(t.pairing_eq),
            sci(t.closure_eq),
            sci(t.total)
        );
        if route == Route::Both {
            let _ = writeln!(
                out,
                "routes agree: {}",
                yes_no(report.is_einstein == t.is_einstein)
            );
        }
    }
    let _ = writeln!(out, "generalised Einstein: {}", yes_no(verdict));
    let _ = writeln!(out, "flat: {}", yes_no(curv.is_flat));
    match div_space_dim {
        Some(d) => {
            let _ = writeln!(out, "admissible divergences: dim {d}");
        }
        None => {
            let _ = writeln!(out, "admissible divergences: none at zero divergence");
        }
    }
    Ok((code, out))
}

fn cmd_curvature(json: bool, file: &str, bismut: bool) -> Result<(u8, String)> {
    let problem = load_with_tolerance(file, None)?;
    let curv = curvature_report(&problem);
    let torsion = if bismut {
        Some((bismut_ricci(&problem, 1.0), bismut_ricci(&problem, -1.0)))
    } else {
        None
    };

    if json {
        let mut value = json!({
            "ricci": matrix_rows(&curv.ricci),
            "scalar": curv.scalar,
            "curvature_residual": curv.curvature_residual,
            "flat": curv.is_flat,
        });
        if let Some((plus, minus)) = &torsion {
            let map = value.as_object_mut().expect("report is an object");
            map.insert(
                "bismut".into(),
                json!({
                    "plus": matrix_rows(plus),
                    "minus": matrix_rows(minus),
                }),
            );
        }
        return Ok((0, serde_json::to_string_pretty(&value).expect("json")));
    }

    let mut out = String::new();
    let _ = writeln!(out, "ricci:");
    write_matrix(&mut out, &curv.ricci);
    let _ = writeln!(out, "scalar curvature: {:.6e}", curv.scalar);
    let _ = writeln!(out, "curvature residual: {}", sci(curv.curvature_residual));
    let _ = writeln!(out, "flat: {}", yes_no(curv.is_flat));
    if let Some((plus, minus)) = &torsion {
        let _ = writeln!(out, "ricci of the +H/2 connection (sup {}):", sci(plus.amax()));
        write_matrix(&mut out, plus);
        let _ = writeln!(out, "ricci of the -H/2 connection (sup {}):", sci(minus.amax()));
        write_matrix(&mut out, minus);
    }
    Ok((0, out))
}

fn entry_json(entry: &CatalogEntry) -> Value {
    json!({
        "name": entry.name,
        "aliases": entry.aliases,
        "differentials": entry.differentials,
        "parameter_domain": entry.parameter_domain,
        "parameters": entry.parameters.iter().map(|(n, v)| json!({"name": n, "example": v})).collect::<Vec<_>>(),
        "unimodular": entry.unimodular,
        "commutator": entry.commutator_label,
        "codim1_ideals": entry.codim1_ideals,
        "ge_flag": entry.ge_flag.symbol(),
        "ge_flag_note": entry.ge_flag_note,
    })
}

fn cmd_catalog_list(json: bool) -> Result<(u8, String)> {
    let entries = catalog::table_entries();
    let families = catalog::families();
    if json {
        let value = json!({
            "table": entries.iter().map(entry_json).collect::<Vec<_>>(),
            "families": families.iter().map(|f| json!({
                "id": f.family_id,
                "description": f.description,
                "parameters": f.param_names,
                "domain": f.param_domain,
            })).collect::<Vec<_>>(),
        });
        return Ok((0, serde_json::to_string_pretty(&value).expect("json")));
    }
    let mut out = String::new();
    let _ = writeln!(out, "table entries (name, GE flag, differentials):");
    for e in entries {
        let _ = writeln!(out, "  {:<18} {:<3} {}", e.name, e.ge_flag.symbol(), e.differentials);
    }
    let _ = writeln!(out, "families (id, parameters):");
    for f in families {
        let params = if f.param_names.is_empty() {
            String::from("-")
        } else {
            f.param_names.join(", ")
        };
        let _ = writeln!(out, "  {:<18} {:<28} {}", f.family_id, params, f.description);
    }
    Ok((0, out))
}

fn cmd_catalog_show(json: bool, name: &str) -> Result<(u8, String)> {
    let entry = find_entry(name).ok_or_else(|| Error::UnknownEntry {
        name: name.to_string(),
    })?;
    if json {
        return Ok((0, serde_json::to_string_pretty(&entry_json(entry)).expect("json")));
    }
    let mut out = String::new();
    let _ = writeln!(out, "name: {}", entry.name);
    if !entry.aliases.is_empty() {
        let _ = writeln!(out, "aliases: {}", entry.aliases.join(", "));
    }
    let _ = writeln!(out, "differentials: {}", entry.differentials);
    if let Some(domain) = entry.parameter_domain {
        let _ = writeln!(out, "parameter domain: {domain}");
    }
    if !entry.parameters.is_empty() {
        let params: Vec<String> = entry
            .parameters
            .iter()
            .map(|(n, v)| format!("{n} = {v}"))
            .collect();
        let _ = writeln!(out, "example parameters: {}", params.join(", "));
    }
    let _ = writeln!(out, "unimodular: {}", yes_no(entry.unimodular));
    let _ = writeln!(out, "commutator ideal: {}", entry.commutator_label);
    if entry.codim1_ideals.is_empty() {
        let _ = writeln!(out, "unimodular codim-1 ideals: none");
    } else {
        let _ = writeln!(
            out,
            "unimodular codim-1 ideals: {}",
            entry.codim1_ideals.join(", ")
        );
    }
    let _ = writeln!(out, "generalised Einstein flag: {}", entry.ge_flag.symbol());
    if let Some(note) = entry.ge_flag_note {
        let _ = writeln!(out, "flag note: {note}");
    }
    Ok((0, out))
}

fn parse_params(specs: &[String]) -> Result<ParamMap> {
    let mut map = ParamMap::new();
    for spec in specs {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| bad("--param", format!("expected NAME=VALUE, got {spec:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| bad(name.trim(), format!("not a real number: {value:?}")))?;
        if map.insert(name.trim().to_string(), value).is_some() {
            return Err(bad(name.trim(), "given twice".to_string()));
        }
    }
    Ok(map)
}

fn cmd_catalog_build(
    family_id: &str,
    params: &[String],
    out_path: Option<&std::path::Path>,
) -> Result<(u8, String)> {
    let params = parse_params(params)?;
    let problem = instantiate_family(family_id, &params)?;
    let text = io::problem_json(&problem);
    match out_path {
        Some(path) => {
            std::fs::write(path, text + "\n")?;
            let mut line = format!("wrote {}", path.display());
            if let Ok(label) = isomorphism_label(family_id, &params) {
                let _ = write!(line, " ({label})");
            }
            line.push('\n');
            Ok((0, line))
        }
        None => Ok((0, text)),
    }
}

fn parse_grid(spec: &str) -> Result<Grid> {
    let mut grid = Grid::new();
    for part in spec.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (name, values) = part.split_once('=').ok_or_else(|| Error::BadGrid {
            reason: format!("expected NAME=V1,V2,..., got {part:?}"),
        })?;
        let values: Vec<f64> = values
            .split(',')
            .map(|v| {
                v.trim().parse::<f64>().map_err(|_| Error::BadGrid {
                    reason: format!("not a real number: {v:?}"),
                })
            })
            .collect::<Result<_>>()?;
        if grid.insert(name.trim().to_string(), values).is_some() {
            return Err(Error::BadGrid {
                reason: format!("variable `{}` given twice", name.trim()),
            });
        }
    }
    if grid.is_empty() {
        return Err(Error::BadGrid {
            reason: "empty grid specification".to_string(),
        });
    }
    Ok(grid)
}

fn cmd_scan(
    json: bool,
    family_id: &str,
    grid_spec: &str,
    out_path: Option<&std::path::Path>,
) -> Result<(u8, String)> {
    let grid = parse_grid(grid_spec)?;
    let rows = residual_scan(family_id, &grid)?;
    let report = io::scan_report(&rows);
    let report_json = serde_json::to_string_pretty(&report).expect("json");
    if let Some(path) = out_path {
        std::fs::write(path, report_json.clone() + "\n")?;
    }
    if json {
        return Ok((0, report_json));
    }
    let mut out = String::new();
    for row in &rows {
        let params: Vec<String> = row
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        let params = params.join(", ");
        match (&row.residual, &row.error) {
            (Some(r), _) => {
                let _ = writeln!(out, "  {params:<40} residual {}", sci(*r));
            }
            (None, Some(e)) => {
                let _ = writeln!(out, "  {params:<40} error: {e}");
            }
            (None, None) => unreachable!("scan rows carry a residual or an error"),
        }
    }
    if let Some(path) = out_path {
        let _ = writeln!(out, "wrote {}", path.display());
    }
    Ok((0, out))
}

fn parse_signature(spec: &str) -> Result<(usize, usize)> {
    let parse = |s: &str| -> Result<usize> {
        s.trim()
            .parse::<usize>()
            .map_err(|_| bad("--signature", format!("expected p,q with integers, got {spec:?}")))
    };
    let (p, q) = spec
        .split_once(',')
        .ok_or_else(|| bad("--signature", format!("expected p,q, got {spec:?}")))?;
    Ok((parse(p)?, parse(q)?))
}

fn cmd_falsify(
    json: bool,
    name: &str,
    signature: &str,
    trials: usize,
    seed: u64,
) -> Result<(u8, String)> {
    let signature = parse_signature(signature)?;
    let (entry, params) = lookup_algebra(name)?;
    let algebra = entry.algebra_at(&params)?;
    let result = random_falsification(&algebra, signature, trials, seed)?;

    if json {
        let value = json!({
            "name": entry.name,
            "signature": [signature.0, signature.1],
            "trials": result.trials,
            "seed": seed,
            "min_residual": result.min_residual,
            "argmin_trial": result.argmin_trial,
            "min_residual_unit_h": result.min_residual_unit_h,
        });
        return Ok((0, serde_json::to_string_pretty(&value).expect("json")));
    }

    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}, signature ({},{}), {} trials, seed {seed}",
        entry.name, signature.0, signature.1, result.trials
    );
    match result.argmin_trial {
        Some(t) => {
            let _ = writeln!(out, "min residual {} at trial {t}", sci(result.min_residual));
        }
        None => {
            let _ = writeln!(
                out,
                "min residual {} at an injected instance",
                sci(result.min_residual)
            );
        }
    }
    match result.min_residual_unit_h {
        Some(m) => {
            let _ = writeln!(out, "unit-torsion subpopulation min {}", sci(m));
        }
        None => {
            let _ = writeln!(out, "unit-torsion subpopulation min -");
        }
    }
    Ok((0, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (u8, String) {
        let argv: Vec<String> = std::iter::once("genein")
            .chain(args.iter().copied())
            .map(String::from)
            .collect();
        run_command(&argv)
    }

    fn red_so3_json() -> String {
        let problem = instantiate_family("red.so3", &ParamMap::new()).unwrap();
        io::problem_json(&problem)
    }

    #[test]
    fn verify_accepts_a_catalog_export() {
        let (code, text) = run(&["verify", &red_so3_json()]);
        assert_eq!(code, 0, "{text}");
        assert!(text.contains("generalised Einstein: yes"), "{text}");
        assert!(text.contains("signature (4,0)"), "{text}");
    }

    #[test]
    fn verify_json_reports_the_stable_key_set() {
        let (code, text) = run(&["verify", &red_so3_json(), "--json"]);
        assert_eq!(code, 0, "{text}");
        let value: Value = serde_json::from_str(&text).unwrap();
        for key in [
            "eq1",
            "eq2",
            "eq3",
            "eq4",
            "total",
            "is_einstein",
            "signature",
            "flat",
            "div_space_dim",
        ] {
            assert!(value.get(key).is_some(), "missing key {key}: {text}");
        }
        assert_eq!(value["is_einstein"], Value::Bool(true));
        assert_eq!(value["signature"], json!([4, 0]));
    }

    #[test]
    fn verify_route_both_reports_agreement() {
        let (code, text) = run(&["verify", &red_so3_json(), "--route", "both"]);
        assert_eq!(code, 0, "{text}");
        assert!(text.contains("routes agree: yes"), "{text}");
        let (code, text) = run(&["verify", &red_so3_json(), "--route", "both", "--json"]);
        assert_eq!(code, 0, "{text}");
        let value: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["routes_agree"], Value::Bool(true));
        assert!(value.get("trace_pairing").is_some(), "{text}");
    }

    #[test]
    fn verify_flags_a_non_einstein_structure_with_exit_one() {
        // Heisenberg algebra with the Euclidean metric and no torsion.
        let text = r#"{
            "dim": 3,
            "brackets": [{"i": 1, "j": 2, "k": 3, "c": 1.0}],
            "metric": [1,0,0, 0,1,0, 0,0,1],
            "delta": {"on_vectors": [0,0,0], "on_covectors": [0,0,0]}
        }"#;
        let (code, out) = run(&["verify", text]);
        assert_eq!(code, 1, "{out}");
        assert!(out.contains("generalised Einstein: no"), "{out}");
        assert!(out.contains("nilpotent yes"), "{out}");
    }

    #[test]
    fn verify_honours_an_absurd_tolerance() {
        let text = r#"{
            "dim": 3,
            "brackets": [{"i": 1, "j": 2, "k": 3, "c": 1.0}],
            "metric": [1,0,0, 0,1,0, 0,0,1],
            "delta": {"on_vectors": [0,0,0], "on_covectors": [0,0,0]}
        }"#;
        let (code, out) = run(&["verify", text, "--tol", "10"]);
        assert_eq!(code, 0, "{out}");
    }

    #[test]
    fn input_errors_exit_two() {
        let (code, out) = run(&["verify", "/no/such/file.json"]);
        assert_eq!(code, 2, "{out}");
        assert!(out.contains("error:"), "{out}");

        let (code, _) = run(&["frobnicate"]);
        assert_eq!(code, 2);

        let (code, out) = run(&["falsify", "so(3)+R", "--signature", "2,1", "--trials", "5", "--seed", "1"]);
        assert_eq!(code, 2, "{out}");
        assert!(out.contains("signature"), "{out}");
    }

    #[test]
    fn help_is_not_an_error() {
        let (code, out) = run(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("verify"), "{out}");
    }

    #[test]
    fn catalog_list_covers_table_and_families() {
        let (code, out) = run(&["catalog", "list"]);
        assert_eq!(code, 0);
        assert!(out.contains("aff_C"), "{out}");
        assert!(out.contains("aa.Hneq0.4th"), "{out}");
        let (code, out) = run(&["catalog", "list", "--json"]);
        assert_eq!(code, 0);
        let value: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(value["table"].as_array().unwrap().len(), catalog::table_entries().len());
        assert_eq!(value["families"].as_array().unwrap().len(), catalog::families().len());
    }

    #[test]
    fn catalog_show_resolves_aliases() {
        let (code, out) = run(&["catalog", "show", "aff_RR"]);
        assert_eq!(code, 0);
        assert!(out.contains("aff_R+aff_R"), "{out}");
        let (code, out) = run(&["catalog", "show", "no-such-algebra"]);
        assert_eq!(code, 2);
        assert!(out.contains("unknown catalog entry"), "{out}");
    }

    #[test]
    fn catalog_build_pipes_into_verify() {
        let (code, out) = run(&["catalog", "build", "aa.4d.vi", "--param", "a=1.3"]);
        assert_eq!(code, 0, "{out}");
        let (code, text) = run(&["verify", &out]);
        assert_eq!(code, 0, "{text}");

        let (code, out) = run(&["catalog", "build", "aa.4d.vi", "--param", "a=oops"]);
        assert_eq!(code, 2);
        assert!(out.contains("not a real number"), "{out}");

        let (code, out) = run(&["catalog", "build", "aa.4d.vi", "--param", "a=1", "--param", "a=2"]);
        assert_eq!(code, 2);
        assert!(out.contains("given twice"), "{out}");
    }

    #[test]
    fn scan_reports_rows_and_errors() {
        let (code, out) = run(&["scan", "aa.4d.ii", "--grid", "sigma=-1,0,1"]);
        assert_eq!(code, 0, "{out}");
        assert_eq!(out.lines().filter(|l| l.contains("residual")).count(), 3);

        let (code, out) = run(&["scan", "aa.4d.ii", "--grid", "sigma=-1;sigma=1"]);
        assert_eq!(code, 2);
        assert!(out.contains("given twice"), "{out}");

        let (code, out) = run(&["scan", "aa.4d.ii", "--grid", ""]);
        assert_eq!(code, 2);
        assert!(out.contains("empty grid"), "{out}");
    }

    #[test]
    fn falsify_reports_the_minimum() {
        let (code, out) = run(&[
            "falsify", "aff_C", "--signature", "3,1", "--trials", "25", "--seed", "1", "--json",
        ]);
        assert_eq!(code, 0, "{out}");
        let value: Value = serde_json::from_str(&out).unwrap();
        assert!(value["min_residual"].as_f64().unwrap() > 0.0);
        assert_eq!(value["trials"], json!(25));
    }
}
