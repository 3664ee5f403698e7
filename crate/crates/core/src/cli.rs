//! Command-line front end. Every command prints one JSON report on stdout
//! (or a CSV table for `scan --csv`).
//!
//! Exit codes: 0 success, 1 selftest failure, 2 invalid input or failed
//! precondition, 3 with `--strict` when the outcome is evidence only.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde_json::json;

use crate::classify::{consistency_report_with, ClassifyOptions, DEFAULT_MARGIN, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::hermit::{psd_verdict, DEFAULT_TOL_REL};
use crate::kernels::{gram, KernelFamily, KernelSpec};
use crate::opcomp::{defect_compression, parse_grid, section_form, threshold_scan, DefectVariant, Space, TruncationInfo};
use crate::points::{polar_grid, random_points, PointSet, DEFAULT_RHO_MAX};
use crate::report::{strip_version, Report, CAVEAT_EVIDENCE, CAVEAT_SAMPLED, CAVEAT_TRUNCATED};
use crate::subhardy::{
    all_pairs, hardy_decomposition_check, pairing_checks, random_pairs, rank_one_perturbation_check,
    reproducing_property_check, shift_invariance_evidence, v_isometry_residual, KernelSection, SectionSpace,
};
use crate::symbol::{DiskPoint, Symbol};

const DEFAULT_N: usize = 64;
const DEFAULT_GRID: (usize, usize) = (4, 16);
const SUBHARDY_RHO: f64 = 0.7;

#[derive(Debug, Parser)]
#[command(name = "subhardy", version, about = "Kernel positivity and shift-structure checks for analytic symbols on the disk")]
struct Cli {
    /// key=value file with defaults for rho_max, N, seed, tol, margin
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Exit with status 3 when the result is evidence rather than a proof
    #[arg(long, global = true)]
    strict: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a symbol into S, S⁻¹, S_B, S_B¹
    Classify {
        #[arg(long)]
        symbol: String,
        #[command(flatten)]
        points: PointArgs,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        margin: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// PSD verdict for one kernel Gram matrix
    Gram {
        #[arg(long)]
        kernel: KernelFamily,
        #[arg(long)]
        symbol: Option<String>,
        #[command(flatten)]
        points: PointArgs,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// PSD verdict for a defect compression P_N A P_N
    Opcheck {
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value = "hardy")]
        space: Space,
        #[arg(long, default_value = "sb")]
        variant: DefectVariant,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        /// Also compare against the kernel Gram on these points
        #[arg(long)]
        compare: bool,
        #[command(flatten)]
        points: PointArgs,
    },
    /// PSD threshold scan over a one-parameter family
    Scan {
        /// rz, const, blaschke, or an expression containing {r}
        #[arg(long)]
        family: String,
        /// start:stop:step
        #[arg(long)]
        grid: String,
        #[arg(long, default_value = "hardy")]
        space: Space,
        #[arg(long, default_value = "sb")]
        variant: DefectVariant,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        /// Print the table as CSV (r,min_eig,psd) instead of JSON
        #[arg(long)]
        csv: bool,
    },
    /// Checks of the K(φ), L(φ), H(1/φ) structure
    Subhardy {
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value = "all")]
        check: SubhardyCheck,
        /// number of kernel nodes
        #[arg(long, default_value_t = 12)]
        nodes: usize,
        /// number of evaluation points
        #[arg(long = "eval", default_value_t = 30)]
        n_eval: usize,
        #[arg(long = "rho-max")]
        rho_max: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "N")]
        n: Option<usize>,
    },
    /// Regenerate the built-in golden reports and compare them byte for byte
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum SubhardyCheck {
    Isometry,
    Decomposition,
    RankOne,
    Diagram,
    Invariance,
    Reproducing,
    All,
}

#[derive(Debug, Args)]
struct PointArgs {
    /// polar grid with NR rings of NA points plus the origin
    #[arg(long = "grid", value_name = "NR,NA", conflicts_with_all = ["random", "points"])]
    grid: Option<String>,
    /// N seeded uniform points
    #[arg(long, value_name = "N", conflicts_with = "points")]
    random: Option<usize>,
    /// explicit points "re,im;re,im;..."
    #[arg(long, value_name = "LIST")]
    points: Option<String>,
    #[arg(long = "rho-max")]
    rho_max: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

/// Defaults from the config file, overridable per flag.
#[derive(Debug, Clone, Default)]
struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Config::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parameter(format!("cannot read config {}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, val) = line
                .split_once('=')
                .ok_or_else(|| Error::Parameter(format!("config line {}: expected key=value", k + 1)))?;
            let key = key.trim();
            if !matches!(key, "rho_max" | "N" | "seed" | "tol" | "margin") {
                return Err(Error::Parameter(format!("config line {}: unknown key '{key}'", k + 1)));
            }
            values.insert(key.to_string(), val.trim().to_string());
        }
        Ok(Config { values })
    }

    fn get<T: std::str::FromStr>(&self, key: &str, flag: Option<T>, default: T) -> Result<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.values.get(key) {
            Some(s) => s
                .parse()
                .map_err(|_| Error::Parameter(format!("config value for {key} is not valid: '{s}'"))),
            None => Ok(default),
        }
    }
}

struct Outcome {
    report: Report,
    /// true when `--strict` should turn success into exit code 3
    evidence_only: bool,
    csv: Option<String>,
}

fn parse_symbol(text: &str) -> Result<Symbol> {
    text.parse()
}

fn parse_point_list(list: &str) -> Result<Vec<C64>> {
    list.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (re, im) = pair
                .split_once(',')
                .ok_or_else(|| Error::Parameter(format!("point '{pair}' must be re,im")))?;
            let p = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parameter(format!("bad coordinate '{s}'")))
            };
            Ok(C64::new(p(re)?, p(im)?))
        })
        .collect()
}

fn build_points(args: &PointArgs, cfg: &Config, report: &mut Report) -> Result<PointSet> {
    let rho = cfg.get("rho_max", args.rho_max, DEFAULT_RHO_MAX)?;
    report.param("rho_max", rho);
    let set = if let Some(list) = &args.points {
        report.param("points", format!("explicit:{list}"));
        PointSet::from_points(parse_point_list(list)?, rho)?
    } else if let Some(n) = args.random {
        let seed = cfg.get("seed", args.seed, DEFAULT_SEED)?;
        report.param("points", format!("random:{n}")).param("seed", seed);
        random_points(n, rho, seed)?
    } else {
        let (nr, na) = match &args.grid {
            Some(g) => {
                let (a, b) = g
                    .split_once(',')
                    .ok_or_else(|| Error::Parameter(format!("grid '{g}' must be NR,NA")))?;
                let p = |s: &str| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parameter(format!("bad grid size '{s}'")))
                };
                (p(a)?, p(b)?)
            }
            None => DEFAULT_GRID,
        };
        report.param("points", format!("grid:{nr},{na}"));
        polar_grid(nr, na, rho)?
    };
    report.param("n_points", set.len());
    report.caveat(CAVEAT_SAMPLED);
    Ok(set)
}

fn family_symbol(family: &str, r: f64) -> Result<Symbol> {
    match family {
        "rz" => Symbol::real_polynomial(&[0.0, r]),
        "const" => Symbol::real_constant(r),
        "blaschke" => Symbol::blaschke(C64::new(r, 0.0)),
        t if t.contains("{r}") => parse_symbol(&t.replace("{r}", &format!("{r}"))),
        _ => Err(Error::Parameter(format!(
            "unknown family '{family}' (rz|const|blaschke|expression with {{r}})"
        ))),
    }
}

fn truncation_caveat(f: &Symbol, n: usize, report: &mut Report) -> TruncationInfo {
    let info = TruncationInfo::for_symbol(f, n);
    if info.truncated {
        report.caveat(CAVEAT_TRUNCATED);
    }
    info
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let cfg = Config::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Classify { symbol, points, n, margin, tol } => {
            let f = parse_symbol(symbol)?;
            let mut report = Report::new("classify", f.to_string());
            let n = cfg.get("N", *n, DEFAULT_N)?;
            let opts = ClassifyOptions {
                margin: cfg.get("margin", *margin, DEFAULT_MARGIN)?,
                tol_rel: cfg.get("tol", *tol, DEFAULT_TOL_REL)?,
                seed: cfg.get("seed", points.seed, DEFAULT_SEED)?,
            };
            let pts = build_points(points, &cfg, &mut report)?;
            report
                .param("N", n)
                .param("margin", opts.margin)
                .param("tol_rel", opts.tol_rel)
                .param("seed", opts.seed);
            let label = consistency_report_with(&f, &pts, n, &opts);
            truncation_caveat(&f, n, &mut report);
            let evidence_only = label.inconclusive || label.sb_member.psd || !label.consistent;
            if label.sb_member.psd || label.sb1_member.0.psd && label.sb1_member.1.psd {
                report.caveat(CAVEAT_EVIDENCE);
            }
            report.verdict("class_label", &label);
            Ok(Outcome { report, evidence_only, csv: None })
        }
        Command::Gram { kernel, symbol, points, tol } => {
            let f = symbol.as_deref().map(parse_symbol).transpose()?;
            let spec = KernelSpec::new(*kernel, f.clone())?;
            let mut report = Report::new("gram", f.as_ref().map(|s| s.to_string()).unwrap_or_default());
            let tol = cfg.get("tol", *tol, DEFAULT_TOL_REL)?;
            let pts = build_points(points, &cfg, &mut report)?;
            report.param("kernel", kernel.name()).param("tol_rel", tol);
            let v = psd_verdict(&gram(&spec, &pts), tol);
            if v.psd {
                report.caveat(CAVEAT_EVIDENCE);
            }
            let evidence_only = v.psd;
            report.verdict("gram", json!({ "family": kernel.name(), "order": pts.len(), "flag": spec.flag(), "verdict": v }));
            Ok(Outcome { report, evidence_only, csv: None })
        }
        Command::Opcheck { symbol, space, variant, n, tol, compare, points } => {
            let f = parse_symbol(symbol)?;
            let mut report = Report::new("opcheck", f.to_string());
            let n = cfg.get("N", *n, DEFAULT_N)?;
            let tol = cfg.get("tol", *tol, DEFAULT_TOL_REL)?;
            report
                .param("N", n)
                .param("space", space)
                .param("variant", variant.to_string())
                .param("tol_rel", tol);
            let d = defect_compression(&f, n, *space, *variant);
            let v = psd_verdict(&d, tol);
            let info = truncation_caveat(&f, n, &mut report);
            let head: Vec<f64> = d.diagonal().into_iter().take(4).collect();
            report.verdict(
                "compression",
                json!({ "space": space, "variant": variant.to_string(), "order": n + 1, "diagonal_head": head, "verdict": v }),
            );
            report.verdict("truncation", &info);
            if *compare {
                let family = match (space, variant) {
                    (Space::Hardy, DefectVariant::Sb) => KernelFamily::HbTimesOneminus,
                    (Space::Bergman, DefectVariant::Sb) => KernelFamily::SbDefect,
                    (Space::Bergman, DefectVariant::Sb1Lower) => KernelFamily::Sb1Lower,
                    (Space::Bergman, DefectVariant::Sb1Upper) => KernelFamily::Sb1Upper,
                    _ => {
                        return Err(Error::Parameter(format!(
                            "no kernel matches {variant} on the {space} space"
                        )))
                    }
                };
                let pts = build_points(points, &cfg, &mut report)?;
                let q = section_form(&d, &pts, *space);
                let g = gram(&KernelSpec::with_symbol(family, &f)?, &pts);
                report.verdict("section_form", json!({ "family": family.name(), "max_abs_difference": q.max_diff(&g) }));
            }
            if v.psd {
                report.caveat(CAVEAT_EVIDENCE);
            }
            Ok(Outcome { report, evidence_only: v.psd, csv: None })
        }
        Command::Scan { family, grid, space, variant, n, tol, csv } => {
            let mut report = Report::new("scan", family.clone());
            let n = cfg.get("N", *n, 16)?;
            let tol = cfg.get("tol", *tol, DEFAULT_TOL_REL)?;
            let values = parse_grid(grid)?;
            family_symbol(family, values[0])?;
            report
                .param("N", n)
                .param("grid", grid)
                .param("space", space)
                .param("variant", variant.to_string())
                .param("tol_rel", tol);
            let res = threshold_scan(|r| family_symbol(family, r), &values, n, *space, *variant, tol)?;
            for &r in &values {
                truncation_caveat(&family_symbol(family, r)?, n, &mut report);
            }
            let table = res.to_csv();
            let evidence_only = res.flips.is_empty();
            if res.rows.iter().any(|row| row.psd) {
                report.caveat(CAVEAT_EVIDENCE);
            }
            report.verdict("scan", &res);
            Ok(Outcome { report, evidence_only, csv: csv.then_some(table) })
        }
        Command::Subhardy { symbol, check, nodes, n_eval, rho_max, seed, n } => {
            let f = parse_symbol(symbol)?;
            let mut report = Report::new("subhardy", f.to_string());
            let rho = cfg.get("rho_max", *rho_max, SUBHARDY_RHO)?;
            let seed = cfg.get("seed", *seed, DEFAULT_SEED)?;
            let n = cfg.get("N", *n, 32)?;
            report
                .param("rho_max", rho)
                .param("seed", seed)
                .param("nodes", nodes)
                .param("eval_points", n_eval)
                .param("N", n)
                .param("check", check.to_possible_value().map(|v| v.get_name().to_string()));
            report.caveat(CAVEAT_SAMPLED);
            let node_set = random_points(*nodes, rho, seed)?;
            let eval_set = random_points(*n_eval, DEFAULT_RHO_MAX, seed.wrapping_add(1))?;
            let all = *check == SubhardyCheck::All;
            let mut evidence_only = false;
            // In `all` mode a check whose range flag fails is skipped, not fatal.
            let record = |report: &mut Report, kind: &str, res: Result<serde_json::Value>| -> Result<()> {
                match res {
                    Ok(v) => {
                        report.verdict(kind, v);
                        Ok(())
                    }
                    Err(e @ (Error::RangeFlag { .. } | Error::Precondition(_))) if all => {
                        report.verdict(kind, json!({ "skipped": e.to_string() }));
                        Ok(())
                    }
                    Err(e) => Err(e),
                }
            };
            if all || *check == SubhardyCheck::Isometry {
                let res = (|| {
                    let grid = polar_grid(2, 10, DEFAULT_RHO_MAX)?;
                    let pairs = random_pairs(50, DEFAULT_RHO_MAX, seed)?;
                    Ok(json!({
                        "grid_residual": v_isometry_residual(&f, &all_pairs(&grid))?,
                        "random_pairs_residual": v_isometry_residual(&f, &pairs)?,
                    }))
                })();
                record(&mut report, "isometry", res)?;
            }
            if all || *check == SubhardyCheck::RankOne {
                let res = rank_one_perturbation_check(&f, &node_set, &eval_set).map(|r| json!(r));
                record(&mut report, "rank_one", res)?;
            }
            if all || *check == SubhardyCheck::Decomposition {
                let grid = polar_grid(1, 19, DEFAULT_RHO_MAX)?;
                let res = hardy_decomposition_check(&f, &grid, n).map(|r| json!(r));
                if res.is_ok() {
                    report.caveat(CAVEAT_EVIDENCE);
                    truncation_caveat(&f, n, &mut report);
                }
                record(&mut report, "decomposition", res)?;
            }
            if all || *check == SubhardyCheck::Diagram {
                let res = (|| {
                    let h1 = KernelSection::kernel(SectionSpace::K, &f, DiskPoint::origin())?;
                    let h2 = KernelSection::kernel(SectionSpace::L, &f, DiskPoint::real(0.3)?)?;
                    Ok(json!(pairing_checks(&f, &h1, &h2, &eval_set)?))
                })();
                record(&mut report, "diagram", res)?;
            }
            if all || *check == SubhardyCheck::Reproducing {
                for space in [SectionSpace::K, SectionSpace::L, SectionSpace::H] {
                    let res = reproducing_property_check(space, &f, &node_set, seed)
                        .map(|r| json!({ "space": space, "report": r }));
                    record(&mut report, "reproducing", res)?;
                }
            }
            if all || *check == SubhardyCheck::Invariance {
                let res = (|| {
                    let coeffs = (0..node_set.len()).map(|i| C64::new(1.0 / (i + 1) as f64, 0.0)).collect();
                    let h = KernelSection::new(SectionSpace::K, &f, &node_set, coeffs)?;
                    shift_invariance_evidence(&h, rho, seed)
                })();
                if let Ok(ev) = &res {
                    evidence_only = ev.relative_residual > 1e-6;
                    report.caveat(CAVEAT_EVIDENCE);
                }
                record(&mut report, "invariance", res.map(|r| json!(r)))?;
            }
            Ok(Outcome { report, evidence_only, csv: None })
        }
        Command::Selftest => {
            let mut report = Report::new("selftest", "");
            let mut failures = 0;
            for case in GOLDEN {
                let (code, out, _) = run_capture(case.args.iter().copied());
                let pass = code == case.code && strip_version(&out) == strip_version(case.expected);
                if !pass {
                    failures += 1;
                }
                report.verdict("golden", json!({ "name": case.name, "pass": pass }));
            }
            report.param("cases", GOLDEN.len());
            if failures > 0 {
                return Err(Error::Precondition(format!("{failures} golden case(s) differ")));
            }
            Ok(Outcome { report, evidence_only: false, csv: None })
        }
    }
}

/// A command line and its expected report.
pub struct GoldenCase {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub code: i32,
    pub expected: &'static str,
}

pub const GOLDEN: &[GoldenCase] = &[
    GoldenCase {
        name: "scan_rz_hardy",
        args: &["scan", "--family", "rz", "--grid", "0.5:0.9:0.01", "--space", "hardy", "--variant", "sb", "--N", "16"],
        code: 0,
        expected: include_str!("../tests/golden/scan_rz_hardy.json"),
    },
    GoldenCase {
        name: "classify_one_plus_z",
        args: &["classify", "--symbol", "poly:1,1"],
        code: 0,
        expected: include_str!("../tests/golden/classify_one_plus_z.json"),
    },
    GoldenCase {
        name: "classify_inverse_schur",
        args: &["classify", "--symbol", "poly:1.2,0.1", "--N", "32"],
        code: 0,
        expected: include_str!("../tests/golden/classify_inverse_schur.json"),
    },
    GoldenCase {
        name: "gram_sb_two_points",
        args: &["gram", "--kernel", "sb_defect", "--symbol", "poly:1,1", "--points", "0,0;0.5,0"],
        code: 0,
        expected: include_str!("../tests/golden/gram_sb_two_points.json"),
    },
    GoldenCase {
        name: "opcheck_rz_hardy",
        args: &["opcheck", "--symbol", "poly:0,0.8", "--N", "8"],
        code: 0,
        expected: include_str!("../tests/golden/opcheck_rz_hardy.json"),
    },
    GoldenCase {
        name: "subhardy_rank_one",
        args: &["subhardy", "--symbol", "poly:1.2,0.1", "--check", "rank-one"],
        code: 0,
        expected: include_str!("../tests/golden/subhardy_rank_one.json"),
    },
];

/// Runs the CLI and returns (exit code, stdout, stderr).
pub fn run_capture<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once(OsString::from("subhardy")).chain(args.into_iter().map(Into::into));
    let code = run_with(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&err).into_owned(),
    )
}

/// Full argv including the program name.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            let text = outcome.csv.unwrap_or_else(|| outcome.report.to_json());
            let _ = write!(out, "{text}");
            if cli.strict && outcome.evidence_only {
                3
            } else {
                0
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{}", json!({ "error": e.to_string() }));
            if matches!(cli.command, Command::Selftest) {
                1
            } else {
                2
            }
        }
    }
}

pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_lists() {
        let p = parse_point_list("0,0;0.5,-0.25").unwrap();
        assert_eq!(p, vec![C64::new(0.0, 0.0), C64::new(0.5, -0.25)]);
        assert!(parse_point_list("0.5").is_err());
    }

    #[test]
    fn families() {
        assert_eq!(family_symbol("rz", 0.5).unwrap().to_string(), "poly:0,0.5");
        assert_eq!(family_symbol("poly:1,{r}", 0.25).unwrap().to_string(), "poly:1,0.25");
        assert!(family_symbol("blaschke", 1.0).is_err());
        assert!(family_symbol("nope", 0.1).is_err());
    }

    #[test]
    fn config_precedence() {
        let dir = std::env::temp_dir().join(format!("subhardy-cfg-{}", std::process::id()));
        std::fs::write(&dir, "# defaults\nN = 12\nrho_max=0.5\n").unwrap();
        let cfg = Config::load(Some(&dir)).unwrap();
        assert_eq!(cfg.get("N", None, 64usize).unwrap(), 12);
        assert_eq!(cfg.get("N", Some(3usize), 64).unwrap(), 3);
        assert_eq!(cfg.get("seed", None, 7u64).unwrap(), 7);
        std::fs::write(&dir, "bogus=1\n").unwrap();
        assert!(Config::load(Some(&dir)).is_err());
        let _ = std::fs::remove_file(&dir);
    }

    #[test]
    fn exit_codes() {
        let (code, _, err) = run_capture(["classify", "--symbol", "blaschke:1.5"]);
        assert_eq!(code, 2);
        assert!(err.contains("semantic"));
        let (code, _, _) = run_capture(["classify", "--symbol", "poly:0,1", "--bogus"]);
        assert_eq!(code, 2);
        let (code, _, _) = run_capture(["--strict", "gram", "--kernel", "szego", "--grid", "1,4"]);
        assert_eq!(code, 3);
        let (code, out, _) = run_capture(["--strict", "gram", "--kernel", "sb_defect", "--symbol", "poly:1,1", "--points", "0,0;0.5,0"]);
        assert_eq!(code, 0, "{out}");
        let (code, _, _) = run_capture(["gram", "--kernel", "k_space", "--symbol", "0.5"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn scan_csv() {
        let (code, out, _) = run_capture(["scan", "--family", "rz", "--grid", "0.6:0.8:0.1", "--csv"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "r,min_eig,psd");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].ends_with(",true") && lines[3].ends_with(",false"));
    }
}
