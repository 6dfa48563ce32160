//! Command-line front end. [`run`] parses arguments, runs one command and
//! returns the process exit code: 0 on success, 1 when a verification or
//! check fails, 2 on usage or data errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use torsys::admissible::{
    canonical_form, classify_cyclic_strong, classify_length_le5, is_admissible_with, is_cyclic_strong_admissible,
    is_strong_admissible, matching_strong_families, reduction_path_with, strong_not_cyclic, AdmissibleConfig,
};
use torsys::catalog::{catalog, catalog_surface};
use torsys::pseudoheight::{pseudoheight_with_chain, Height};
use torsys::surface::enumerate_r_classes;
use torsys::tables::{verify_table, GoldenSource, TableId};
use torsys::toric::{check_segment_bounds, exceptionality_fast, exceptionality_naive};
use torsys::twist::{reduce, verify_trace};
use torsys::{DivisorClass, Error, PicardLattice, SurfaceModel, ToricSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "torsys", version, about = "Toric systems and exceptional collections on rational surfaces")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "table")]
    format: Format,
    /// Read golden files from this directory instead of the built-in copies.
    #[arg(long, global = true)]
    golden_dir: Option<PathBuf>,
    /// Do not treat (1,1,1) as an admissible base.
    #[arg(long, global = true)]
    no_length3_base: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AdmissibleMode {
    CyclicStrong,
    StrongNotCyclic,
    LengthLe5,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the classes with D^2 = r and D.K = -2 - r on a lattice.
    Classes {
        /// P2, Bl1..Bl8, F0 or F2.
        #[arg(long)]
        lattice: String,
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
        /// Print only the number of classes.
        #[arg(long)]
        count: bool,
    },
    /// Describe a catalog surface, or list the catalog.
    SurfaceInfo {
        #[arg(long, required_unless_present = "list")]
        surface: Option<String>,
        #[arg(long, conflicts_with = "surface")]
        list: bool,
    },
    /// Validate a toric system and decide exceptionality on a surface.
    CheckSystem {
        #[arg(long)]
        surface: String,
        /// JSON file `{"lattice": .., "entries": [..]}`; entries are
        /// coordinate arrays or expressions such as "L - E1".
        #[arg(long)]
        system: PathBuf,
    },
    /// Classify admissible sequences, or check one.
    ClassifyAdmissible {
        #[arg(long, value_enum, required_unless_present = "sequence")]
        mode: Option<AdmissibleMode>,
        /// Parameter bound for length-le5.
        #[arg(long, default_value_t = 10)]
        bound: i64,
        /// Sequence length for strong-not-cyclic.
        #[arg(long)]
        length: Option<usize>,
        /// Lower bound on the last entry for strong-not-cyclic.
        #[arg(long, allow_hyphen_values = true)]
        floor: Option<i64>,
        /// Comma-separated sequence to check, e.g. "0,1,0,-1".
        #[arg(long, allow_hyphen_values = true, conflicts_with = "mode")]
        sequence: Option<String>,
    },
    /// Anticanonical pseudoheight of a toric system.
    Pseudoheight {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=1))]
        p_min: u8,
    },
    /// Reduce a torsion exceptional class to an irreducible (-1)-curve.
    ReduceTorsion {
        #[arg(long)]
        surface: String,
        /// `{"lattice": .., "coords": [..]}`, a coordinate array, or an
        /// expression such as "E1".
        #[arg(long, allow_hyphen_values = true)]
        class: String,
    },
    /// Recompute reference tables and compare them with the golden files.
    VerifyTables {
        /// One table id; all tables when omitted.
        #[arg(long)]
        table: Option<String>,
    },
}

/// What a command produced.
struct Outcome {
    json: Value,
    table: String,
    code: i32,
}

impl Outcome {
    fn ok(json: Value, table: String) -> Self {
        Outcome { json, table, code: 0 }
    }
}

enum Failure {
    Usage(String),
    Other(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Other(e)
    }
}

/// Runs the command line `argv` (including the program name).
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let format = cli.format;
    match execute(cli) {
        Ok(outcome) => {
            let _ = match format {
                Format::Json => writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&outcome.json).expect("JSON values serialize")
                ),
                Format::Table => write!(out, "{}", outcome.table),
            };
            outcome.code
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Other(e)) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Internal(_) => 1,
                Error::Domain(_) | Error::Data(_) => 2,
            }
        }
    }
}

fn execute(cli: Cli) -> Result<Outcome, Failure> {
    let config = AdmissibleConfig { length3_base: !cli.no_length3_base };
    match cli.command {
        Command::Classes { lattice, r, count } => classes(&lattice, r, count),
        Command::SurfaceInfo { surface, list } => match surface {
            Some(name) if !list => surface_info(&load_surface(&name)?),
            _ => list_surfaces(),
        },
        Command::CheckSystem { surface, system } => {
            let x = load_surface(&surface)?;
            let ts = load_system(&system, x.lattice())?;
            check_system(&x, &ts)
        }
        Command::ClassifyAdmissible { mode, bound, length, floor, sequence } => match (sequence, mode) {
            (Some(seq), _) => check_sequence(&parse_sequence(&seq)?, config),
            (None, Some(AdmissibleMode::CyclicStrong)) => cyclic_strong(config),
            (None, Some(AdmissibleMode::LengthLe5)) => length_le5(bound),
            (None, Some(AdmissibleMode::StrongNotCyclic)) => {
                let n = length.ok_or_else(|| Failure::Usage("--mode strong-not-cyclic needs --length".into()))?;
                if !(4..=12).contains(&n) {
                    return Err(Failure::Usage(format!("--length {n} outside 4..=12")));
                }
                strong_list(n, floor.unwrap_or(-(n as i64) - 4), config)
            }
            (None, None) => Err(Failure::Usage("give --mode or --sequence".into())),
        },
        Command::Pseudoheight { surface, system, p_min } => {
            let x = load_surface(&surface)?;
            let ts = load_system(&system, x.lattice())?;
            pseudoheight_cmd(&x, &ts, p_min as usize)
        }
        Command::ReduceTorsion { surface, class } => {
            let x = load_surface(&surface)?;
            let d = parse_class_arg(&class, x.lattice())?;
            reduce_cmd(&x, &d)
        }
        Command::VerifyTables { table } => {
            let ids = match table {
                Some(t) => vec![t.parse::<TableId>().map_err(|_| {
                    let known: Vec<&str> = TableId::ALL.iter().map(|t| t.as_str()).collect();
                    Failure::Usage(format!("unknown table {t:?}; known tables: {}", known.join(", ")))
                })?],
                None => TableId::ALL.to_vec(),
            };
            let source = cli.golden_dir.map_or(GoldenSource::Embedded, GoldenSource::Dir);
            verify_tables(&ids, &source, config)
        }
    }
}

fn load_surface(name: &str) -> Result<SurfaceModel, Failure> {
    catalog_surface(name).map_err(|_| Failure::Usage(format!("unknown surface {name:?}; see `surface-info --list`")))
}

/// Reads a system file. The lattice field is optional and must match the
/// surface's lattice when present.
fn load_system(path: &Path, lattice: &Arc<PicardLattice>) -> Result<ToricSystem, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{} is not JSON: {e}", path.display())))?;
    if let Some(id) = value.get("lattice") {
        let id = id.as_str().unwrap_or_default();
        if id != lattice.id().to_string() {
            return Err(Failure::Usage(format!("system is on {id}, surface is on {}", lattice.id())));
        }
    }
    let entries = value
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Failure::Usage(format!("{} has no \"entries\" array", path.display())))?;
    let classes = entries.iter().map(|e| class_from_value(e, lattice)).collect::<Result<Vec<_>, _>>()?;
    Ok(ToricSystem::new(lattice, classes)?)
}

fn class_from_value(v: &Value, lattice: &Arc<PicardLattice>) -> Result<DivisorClass, Failure> {
    match v {
        Value::String(s) => Ok(lattice.parse_class(s)?),
        Value::Array(_) => {
            let coords: Vec<i64> = serde_json::from_value(v.clone())
                .map_err(|e| Failure::Usage(format!("bad coordinates {v}: {e}")))?;
            Ok(lattice.class(coords)?)
        }
        Value::Object(_) => {
            let d: DivisorClass =
                serde_json::from_value(v.clone()).map_err(|e| Failure::Usage(format!("bad class {v}: {e}")))?;
            if d.lattice().id() != lattice.id() {
                return Err(Failure::Usage(format!("class is on {}, surface is on {}", d.lattice().id(), lattice.id())));
            }
            Ok(d)
        }
        _ => Err(Failure::Usage(format!("cannot read a class from {v}"))),
    }
}

fn parse_class_arg(arg: &str, lattice: &Arc<PicardLattice>) -> Result<DivisorClass, Failure> {
    match serde_json::from_str::<Value>(arg) {
        Ok(v) => class_from_value(&v, lattice),
        Err(_) => Ok(lattice.parse_class(arg)?),
    }
}

fn parse_sequence(s: &str) -> Result<Vec<i64>, Failure> {
    s.trim_matches(|c| c == '(' || c == ')' || c == '[' || c == ']')
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| Failure::Usage(format!("bad sequence entry {t:?}"))))
        .collect()
}

/// Aligned ASCII table.
fn render(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("{}\n", parts.join("  ").trim_end())
    };
    let mut out = line(headers.to_vec());
    out.push_str(&line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect()));
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

fn fmt_seq(s: &[i64]) -> String {
    let parts: Vec<String> = s.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

fn classes(lattice: &str, r: i64, count: bool) -> Result<Outcome, Failure> {
    let lat = PicardLattice::by_name(lattice).map_err(|_| Failure::Usage(format!("unknown lattice {lattice:?}")))?;
    let list = enumerate_r_classes(&lat, r);
    if count {
        let json = json!({"lattice": lat.id(), "r": r, "count": list.len()});
        return Ok(Outcome::ok(json, format!("{}\n", list.len())));
    }
    let rows: Vec<Vec<String>> = list.iter().map(|d| vec![d.to_string(), format!("{:?}", d.coords())]).collect();
    let json = json!({
        "lattice": lat.id(),
        "r": r,
        "count": list.len(),
        "classes": list.iter().map(|d| json!({"class": d.to_string(), "coords": d.coords()})).collect::<Vec<_>>(),
    });
    Ok(Outcome::ok(json, render(&["class", "coords"], &rows)))
}

fn list_surfaces() -> Result<Outcome, Failure> {
    let all = catalog()?;
    let rows: Vec<Vec<String>> = all
        .iter()
        .map(|x| {
            vec![
                x.name().unwrap_or("").to_string(),
                x.degree().to_string(),
                x.lattice().id().to_string(),
                x.dynkin_type().to_string(),
                x.irreducible_minus1().len().to_string(),
            ]
        })
        .collect();
    let json = Value::Array(
        all.iter()
            .map(|x| {
                json!({
                    "name": x.name(),
                    "degree": x.degree(),
                    "lattice": x.lattice().id(),
                    "type": x.dynkin_type().to_string(),
                    "lines": x.irreducible_minus1().len(),
                })
            })
            .collect(),
    );
    Ok(Outcome::ok(json, render(&["name", "degree", "lattice", "type", "lines"], &rows)))
}

fn surface_info(x: &SurfaceModel) -> Result<Outcome, Failure> {
    let partition = x.verify_root_partition()?;
    let strs = |v: &[DivisorClass]| v.iter().map(|d| d.to_string()).collect::<Vec<_>>();
    let json = json!({
        "name": x.name(),
        "degree": x.degree(),
        "lattice": x.lattice().id(),
        "type": x.dynkin_type().to_string(),
        "simple_roots": strs(x.simple_roots()),
        "roots": x.root_system().len(),
        "effective_roots": x.effective_roots().len(),
        "minus1_classes": x.minus1_classes().len(),
        "irreducible_minus1": strs(x.irreducible_minus1()),
        "monoid_generators": x.monoid_generators().len(),
        "ample_probe": x.ample_probe().to_string(),
        "root_partition": partition,
    });
    let rows = vec![
        vec!["name".into(), x.name().unwrap_or("").into()],
        vec!["degree".into(), x.degree().to_string()],
        vec!["lattice".into(), x.lattice().id().to_string()],
        vec!["type".into(), x.dynkin_type().to_string()],
        vec!["simple roots".into(), strs(x.simple_roots()).join(", ")],
        vec!["|R|".into(), x.root_system().len().to_string()],
        vec!["|R eff|".into(), x.effective_roots().len().to_string()],
        vec!["(-1)-classes".into(), x.minus1_classes().len().to_string()],
        vec!["(-1)-curves".into(), x.irreducible_minus1().len().to_string()],
        vec!["ample probe".into(), x.ample_probe().to_string()],
        vec!["root partition".into(), if partition.holds() { "holds".into() } else { "FAILS".into() }],
    ];
    Ok(Outcome::ok(json, render(&["field", "value"], &rows)))
}

fn check_system(x: &SurfaceModel, ts: &ToricSystem) -> Result<Outcome, Failure> {
    let validation = ts.validate();
    let entries: Vec<String> = ts.entries().iter().map(|d| d.to_string()).collect();
    if !validation.is_valid() {
        let msgs: Vec<String> = validation.violations.iter().map(|v| v.to_string()).collect();
        let json = json!({"surface": x.name(), "entries": entries, "valid": false, "violations": validation.violations});
        let table = format!("not a toric system:\n  {}\n", msgs.join("\n  "));
        return Ok(Outcome { json, table, code: 1 });
    }
    let fast = exceptionality_fast(x, ts)?;
    let naive = exceptionality_naive(x, ts)?;
    let agree = fast.flags() == naive.flags();
    let bounds = check_segment_bounds(ts, x.degree());
    let json = json!({
        "surface": x.name(),
        "entries": entries,
        "squares": ts.self_intersections(),
        "valid": true,
        "exceptional": fast.exceptional,
        "strong": fast.strong,
        "cyclic_strong": fast.cyclic_strong,
        "route": fast.route,
        "segments_checked": fast.segments_checked,
        "witnesses": naive.witnesses,
        "naive_agrees": agree,
        "segment_bounds": bounds,
    });
    let witnesses: Vec<String> = naive
        .witnesses
        .iter()
        .map(|w| format!("{} {:?} (square {})", w.segment, w.violated, w.square))
        .collect();
    let rows = vec![
        vec!["entries".into(), entries.join(", ")],
        vec!["squares".into(), fmt_seq(&ts.self_intersections())],
        vec!["exceptional".into(), fast.exceptional.to_string()],
        vec!["strong".into(), fast.strong.to_string()],
        vec!["cyclic_strong".into(), fast.cyclic_strong.to_string()],
        vec!["route".into(), format!("{:?}", fast.route)],
        vec!["naive agrees".into(), agree.to_string()],
        vec!["witnesses".into(), if witnesses.is_empty() { "-".into() } else { witnesses.join("; ") }],
    ];
    Ok(Outcome { json, table: render(&["field", "value"], &rows), code: if agree { 0 } else { 1 } })
}

fn check_sequence(seq: &[i64], config: AdmissibleConfig) -> Result<Outcome, Failure> {
    let admissible = is_admissible_with(seq, config);
    let path = reduction_path_with(seq, config);
    let strong = is_strong_admissible(seq);
    let cyclic = is_cyclic_strong_admissible(seq);
    let families: Vec<String> = if strong && !cyclic {
        matching_strong_families(seq).iter().map(|f| f.to_string()).collect()
    } else {
        Vec::new()
    };
    let json = json!({
        "sequence": seq,
        "canonical": canonical_form(seq),
        "admissible": admissible,
        "strong": strong,
        "cyclic_strong": cyclic,
        "families": families,
        "path": path,
    });
    let rows = vec![
        vec!["sequence".into(), fmt_seq(seq)],
        vec!["canonical".into(), fmt_seq(&canonical_form(seq))],
        vec!["admissible".into(), admissible.to_string()],
        vec!["strong".into(), strong.to_string()],
        vec!["cyclic strong".into(), cyclic.to_string()],
        vec!["families".into(), if families.is_empty() { "-".into() } else { families.join(", ") }],
        vec![
            "path".into(),
            path.map_or("-".into(), |p| {
                let steps: Vec<String> = p.steps.iter().map(|s| s.position.to_string()).collect();
                format!("{} then augment at {}", fmt_seq(&p.base), if steps.is_empty() { "-".into() } else { steps.join(", ") })
            }),
        ],
    ];
    Ok(Outcome::ok(json, render(&["field", "value"], &rows)))
}

fn cyclic_strong(config: AdmissibleConfig) -> Result<Outcome, Failure> {
    let t = classify_cyclic_strong(config);
    let all = t.all();
    let rows: Vec<Vec<String>> = all.iter().map(|s| vec![s.len().to_string(), fmt_seq(s)]).collect();
    let json = json!({"count": all.len(), "sequences": all});
    let mut table = render(&["n", "sequence"], &rows);
    table.push_str(&format!("total: {}\n", all.len()));
    Ok(Outcome::ok(json, table))
}

fn length_le5(bound: i64) -> Result<Outcome, Failure> {
    if bound < 1 {
        return Err(Failure::Usage(format!("--bound must be at least 1, got {bound}")));
    }
    let t = classify_length_le5(bound)?;
    let rows: Vec<Vec<String>> = t
        .generated
        .iter()
        .map(|(n, v)| vec![n.to_string(), v.len().to_string(), t.predicted[n].len().to_string()])
        .collect();
    let json = json!({
        "bound": bound,
        "matches": t.matches(),
        "generated": t.generated,
        "extra": t.extra(),
        "missing": t.missing(),
    });
    let mut table = render(&["n", "generated", "predicted"], &rows);
    table.push_str(&format!("families match: {}\n", t.matches()));
    Ok(Outcome { json, table, code: if t.matches() { 0 } else { 1 } })
}

fn strong_list(n: usize, floor: i64, config: AdmissibleConfig) -> Result<Outcome, Failure> {
    let seqs = strong_not_cyclic(n, floor, config);
    let fams: Vec<Vec<String>> =
        seqs.iter().map(|s| matching_strong_families(s).iter().map(|f| f.to_string()).collect()).collect();
    let rows: Vec<Vec<String>> = seqs
        .iter()
        .zip(&fams)
        .map(|(s, f)| vec![fmt_seq(s), if f.is_empty() { "NONE".into() } else { f.join(", ") }])
        .collect();
    let unmatched = fams.iter().filter(|f| f.is_empty()).count();
    let json = json!({
        "length": n,
        "floor": floor,
        "sequences": seqs.iter().zip(&fams).map(|(s, f)| json!({"sequence": s, "families": f})).collect::<Vec<_>>(),
        "unmatched": unmatched,
    });
    Ok(Outcome { json, table: render(&["sequence", "families"], &rows), code: if unmatched == 0 { 0 } else { 1 } })
}

fn pseudoheight_cmd(x: &SurfaceModel, ts: &ToricSystem, p_min: usize) -> Result<Outcome, Failure> {
    let r = pseudoheight_with_chain(x, ts, p_min)?;
    let json = json!({
        "pseudoheight": r.value,
        "argmin": r.argmin,
        "chains_evaluated": r.chains_evaluated,
        "possibly_full": r.value <= Height::Finite(-2),
    });
    let terms: Vec<String> = r.argmin.term_values.iter().map(|e| e.to_string()).collect();
    let rows = vec![
        vec!["pseudoheight".into(), r.value.to_string()],
        vec!["chain".into(), format!("{:?}", r.argmin.indices)],
        vec!["terms".into(), terms.join(", ")],
        vec!["chains".into(), r.chains_evaluated.to_string()],
    ];
    Ok(Outcome::ok(json, render(&["field", "value"], &rows)))
}

fn reduce_cmd(x: &SurfaceModel, d: &DivisorClass) -> Result<Outcome, Failure> {
    let trace = reduce(x, d)?;
    let verified = verify_trace(x, &trace);
    let json = serde_json::to_value(&trace).expect("trace serializes");
    let classes = trace.classes();
    let mut rows = vec![vec!["0".to_string(), "-".to_string(), classes[0].to_string()]];
    for (i, c) in trace.steps.iter().enumerate() {
        rows.push(vec![(i + 1).to_string(), c.to_string(), classes[i + 1].to_string()]);
    }
    let mut table = render(&["step", "(-2)-curve", "class"], &rows);
    table.push_str(&format!("result: {}\n", trace.result));
    Ok(Outcome { json, table, code: if verified { 0 } else { 1 } })
}

fn verify_tables(ids: &[TableId], source: &GoldenSource, config: AdmissibleConfig) -> Result<Outcome, Failure> {
    let mut reports = Vec::new();
    for id in ids {
        reports.push(verify_table(*id, source, config)?);
    }
    let all_pass = reports.iter().all(|r| r.passed());
    let mut table = String::new();
    for r in &reports {
        table.push_str(&format!("{}: {}\n", r.table_id, if r.passed() { "PASS" } else { "FAIL" }));
        for row in &r.rows {
            table.push_str(&format!("  {}\n", serde_json::to_string(row).expect("row serializes")));
        }
        for d in &r.diffs {
            table.push_str(&format!("  diff {}: expected {} got {}\n", d.row, d.expected, d.actual));
        }
    }
    let json = if reports.len() == 1 {
        serde_json::to_value(&reports[0]).expect("report serializes")
    } else {
        serde_json::to_value(&reports).expect("reports serialize")
    };
    Ok(Outcome { json, table, code: if all_pass { 0 } else { 1 } })
}
