//! The `segeval` command line.
//!
//! Exit codes: 0 success, 2 validation error (bad flags, incompatible grids,
//! empty masks, missing methods), 3 I/O or parse error.

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use segeval_core::phantom::{dilate_ball, flip_noise, gen_box, gen_ellipsoid, translate};
use segeval_core::stats::{cohort_compare, rater_variability, Delineation, Grouping, Metric, MetricRecord};
use segeval_core::{extract_mask, Error, LabelSelector, Mask};

use crate::eval::evaluate_pair;
use crate::manifest::{Manifest, Role};
use crate::nifti::{read_nifti, write_nifti};
use crate::report::{sort_records, ComparisonOut, Metadata, RecordRow, Report, VariabilityOut};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "segeval", version, about = "Evaluate automated segmentations against manual references")]
struct Cli {
    /// Omit the generation timestamp so reports are byte-reproducible.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare one test mask against one reference mask.
    Pair(PairArgs),
    /// Evaluate every case of a manifest.
    Cohort(CohortArgs),
    /// Compare two methods over the records of a cohort run.
    Compare(CompareArgs),
    /// Generate synthetic masks.
    #[command(subcommand)]
    Phantom(PhantomCommand),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
#[group(id = "selector", multiple = false)]
struct SelectorArgs {
    /// Voxels equal to this integer label form the mask.
    #[arg(long, group = "selector")]
    label: Option<i64>,
    /// Voxels with value >= this threshold form the mask.
    #[arg(long, group = "selector")]
    threshold: Option<f64>,
}

impl SelectorArgs {
    fn selector(&self) -> Option<LabelSelector> {
        match (self.label, self.threshold) {
            (Some(l), _) => Some(LabelSelector::ExactLabel(l)),
            (None, Some(t)) => Some(LabelSelector::Threshold(t)),
            (None, None) => None,
        }
    }
}

#[derive(Debug, Args)]
struct PairArgs {
    #[arg(long = "ref", value_name = "PATH")]
    reference: PathBuf,
    #[arg(long, value_name = "PATH")]
    test: PathBuf,
    #[command(flatten)]
    selector: SelectorArgs,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct CohortArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory; receives report.json (and records.csv with --format csv).
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Mask selection for every file; defaults to --threshold 0.5.
    #[command(flatten)]
    selector: SelectorArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// report.json or records.csv from `segeval cohort`.
    #[arg(long)]
    records: PathBuf,
    #[arg(long)]
    method_a: String,
    /// Baseline of the percent difference.
    #[arg(long)]
    method_b: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum PhantomCommand {
    /// Closed index box lo..=hi.
    Box {
        #[arg(long, value_parser = triple::<usize>)]
        dims: [usize; 3],
        #[arg(long, value_parser = triple::<f64>, default_value = "1,1,1")]
        spacing: [f64; 3],
        #[arg(long, value_parser = triple::<usize>)]
        lo: [usize; 3],
        #[arg(long, value_parser = triple::<usize>)]
        hi: [usize; 3],
        #[arg(long)]
        out: PathBuf,
    },
    /// Axis-aligned ellipsoid, center in voxel indices, radii in mm.
    Ellipsoid {
        #[arg(long, value_parser = triple::<usize>)]
        dims: [usize; 3],
        #[arg(long, value_parser = triple::<f64>, default_value = "1,1,1")]
        spacing: [f64; 3],
        #[arg(long, value_parser = triple::<f64>, allow_hyphen_values = true)]
        center: [f64; 3],
        #[arg(long, value_parser = triple::<f64>)]
        radii: [f64; 3],
        #[arg(long)]
        out: PathBuf,
    },
    /// Fabricate a method output from a mask: translate, then dilate, then flip noise.
    Derive {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = triple::<i64>, allow_hyphen_values = true, default_value = "0,0,0")]
        translate: [i64; 3],
        /// Ball radius in voxels.
        #[arg(long, default_value_t = 0.0)]
        dilate: f64,
        /// Per-voxel flip probability.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Mask selection for the input; defaults to --threshold 0.5.
        #[command(flatten)]
        selector: SelectorArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

fn triple<T: FromStr>(s: &str) -> Result<[T; 3], String>
where
    T::Err: Display,
{
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, c] = parts[..] else {
        return Err(format!("expected three comma-separated values, got {s:?}"));
    };
    let p = |v: &str| v.parse::<T>().map_err(|e| format!("{v:?}: {e}"));
    Ok([p(a)?, p(b)?, p(c)?])
}

#[derive(Debug)]
enum Failure {
    Validation(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Validation(_) => EXIT_VALIDATION,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Io(m) => m,
        }
    }
}

fn dims_str(d: [usize; 3]) -> String {
    format!("{}x{}x{}", d[0], d[1], d[2])
}

fn validation(context: &str, e: &Error) -> Failure {
    let detail = match e {
        Error::GridMismatch { a, b } => {
            format!("grid mismatch: reference is {} voxels, test is {} voxels", dims_str(*a), dims_str(*b))
        }
        Error::SpacingMismatch { a, b } => format!("spacing mismatch: reference {a:?} mm, test {b:?} mm"),
        other => other.to_string(),
    };
    if context.is_empty() {
        Failure::Validation(detail)
    } else {
        Failure::Validation(format!("{context}: {detail}"))
    }
}

fn load_mask(path: &Path, sel: LabelSelector) -> Result<Mask, Failure> {
    let v = read_nifti(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    extract_mask(&v, sel).map_err(|e| validation(&path.display().to_string(), &e))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_records_csv(&mut buf).expect("in-memory write");
            String::from_utf8(buf).expect("utf-8 csv")
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let timestamp = !cli.no_timestamp;
    let result = match cli.command {
        Command::Pair(a) => cmd_pair(a, timestamp),
        Command::Cohort(a) => cmd_cohort(a, timestamp),
        Command::Compare(a) => cmd_compare(a, timestamp),
        Command::Phantom(p) => cmd_phantom(p),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("segeval: {}", f.message());
            f.code()
        }
    }
}

fn cmd_pair(a: PairArgs, timestamp: bool) -> Result<(), Failure> {
    let sel =
        a.selector.selector().ok_or_else(|| Failure::Validation("one of --label or --threshold is required".into()))?;
    let reference = load_mask(&a.reference, sel)?;
    let test = load_mask(&a.test, sel)?;
    let eval = evaluate_pair(&reference, &test).map_err(|e| validation("", &e))?;

    let mut report = Report::new(Metadata::new("pair", timestamp));
    let mut records: Vec<RecordRow> = eval.records("pair", "test").iter().map(RecordRow::from).collect();
    records.push(RecordRow {
        case_id: "pair".into(),
        method: "reference".into(),
        metric: Metric::VolumeMm3.name().into(),
        value: eval.reference_volume_mm3,
    });
    sort_records(&mut records);
    report.records = records;
    report.warnings = eval.warnings;
    write_output(a.out.as_deref(), &render(&report, a.format))
}

#[derive(Default)]
struct CaseOutcome {
    records: Vec<RecordRow>,
    variability: Vec<VariabilityOut>,
    warnings: Vec<String>,
    io_failure: bool,
}

impl CaseOutcome {
    fn warn(&mut self, case: &str, msg: impl Display) {
        self.warnings.push(format!("case {case}: {msg}"));
    }

    fn fail(&mut self, case: &str, f: Failure) {
        self.io_failure |= matches!(f, Failure::Io(_));
        self.warn(case, f.message());
    }
}

fn evaluate_case(case: &str, entries: &[&crate::manifest::Entry], sel: LabelSelector) -> CaseOutcome {
    let mut out = CaseOutcome::default();
    let refs: Vec<_> = entries.iter().filter(|e| e.role == Role::Reference).collect();
    let reference = match refs.as_slice() {
        [r] => r,
        [] => {
            out.warn(case, "no reference row; case skipped");
            return out;
        }
        _ => {
            out.warn(case, format!("{} reference rows; case skipped", refs.len()));
            return out;
        }
    };
    let ref_mask = match load_mask(&reference.path, sel) {
        Ok(m) => m,
        Err(f) => {
            out.fail(case, f);
            return out;
        }
    };

    let mut seen = Vec::new();
    let mut delineations = Vec::new();
    for e in entries {
        let method = match &e.role {
            Role::Reference => continue,
            Role::Method(name) => name.clone(),
            Role::Rater { rater, session } => format!("rater:{rater}:{session}"),
        };
        if seen.contains(&method) {
            out.warn(case, format!("duplicate entry for {method}; later one ignored"));
            continue;
        }
        seen.push(method.clone());
        let mask = match load_mask(&e.path, sel) {
            Ok(m) => m,
            Err(f) => {
                out.fail(case, f);
                continue;
            }
        };
        match evaluate_pair(&ref_mask, &mask) {
            Ok(ev) => {
                out.records.extend(ev.records(case, &method).iter().map(RecordRow::from));
                for w in &ev.warnings {
                    out.warn(case, format!("{method}: {w}"));
                }
            }
            Err(err) => out.fail(case, validation(&method, &err)),
        }
        if let Role::Rater { rater, session } = &e.role {
            delineations.push(Delineation { rater: rater.clone(), session: session.clone(), mask });
        }
    }
    if seen.is_empty() {
        out.warn(case, "no method rows");
    }
    for grouping in [Grouping::InterRater, Grouping::IntraRater] {
        match rater_variability(&delineations, grouping) {
            Ok(r) => out.variability.push(VariabilityOut::new(case, &r)),
            Err(Error::TooFewDelineations) => {}
            Err(err) => out.fail(case, validation(grouping.name(), &err)),
        }
    }
    out
}

fn cmd_cohort(a: CohortArgs, timestamp: bool) -> Result<(), Failure> {
    let manifest = Manifest::load(&a.manifest).map_err(|e| {
        let msg = format!("{}: {e}", a.manifest.display());
        if e.is_io() {
            Failure::Io(msg)
        } else {
            Failure::Validation(msg)
        }
    })?;
    let sel = a.selector.selector().unwrap_or(LabelSelector::Threshold(0.5));
    let cases: Vec<(&str, Vec<&crate::manifest::Entry>)> = manifest.cases().into_iter().collect();
    let outcomes: Vec<CaseOutcome> =
        cases.par_iter().map(|(case, entries)| evaluate_case(case, entries, sel)).collect();

    let mut report = Report::new(Metadata::new("cohort", timestamp));
    let mut succeeded = 0;
    let mut io_failure = false;
    for o in outcomes {
        if !o.records.is_empty() {
            succeeded += 1;
        }
        io_failure |= o.io_failure;
        report.records.extend(o.records);
        report.variability.extend(o.variability);
        report.warnings.extend(o.warnings);
    }
    sort_records(&mut report.records);

    fs::create_dir_all(&a.out).map_err(|e| Failure::Io(format!("{}: {e}", a.out.display())))?;
    let json_path = a.out.join("report.json");
    write_output(Some(&json_path), &report.to_json())?;
    if matches!(a.format, Format::Csv) {
        write_output(Some(&a.out.join("records.csv")), &render(&report, Format::Csv))?;
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "cohort: {succeeded}/{} cases evaluated, {} records, {} warnings -> {}",
        cases.len(),
        report.records.len(),
        report.warnings.len(),
        json_path.display()
    );
    if succeeded == 0 {
        let msg = "no case could be evaluated".to_string();
        return Err(if io_failure { Failure::Io(msg) } else { Failure::Validation(msg) });
    }
    Ok(())
}

fn load_records(path: &Path) -> Result<Vec<MetricRecord>, Failure> {
    let io = |e: &dyn Display| Failure::Io(format!("{}: {e}", path.display()));
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let rows = if is_csv {
        let file = fs::File::open(path).map_err(|e| io(&e))?;
        crate::report::read_records_csv(file).map_err(|e| io(&e))?
    } else {
        let text = fs::read_to_string(path).map_err(|e| io(&e))?;
        Report::from_json(&text).map_err(|e| io(&e))?.records
    };
    rows.iter()
        .map(|r| {
            r.to_record().map_err(|e| Failure::Validation(format!("{}: metric {:?}: {e}", path.display(), r.metric)))
        })
        .collect()
}

fn cmd_compare(a: CompareArgs, timestamp: bool) -> Result<(), Failure> {
    let records = load_records(&a.records)?;
    for m in [&a.method_a, &a.method_b] {
        if !records.iter().any(|r| &r.method == m) {
            return Err(Failure::Validation(format!("method {m:?} not found in {}", a.records.display())));
        }
    }
    let cmp = cohort_compare(&records, &a.method_a, &a.method_b).map_err(|e| validation("", &e))?;

    let mut report = Report::new(Metadata::new("compare", timestamp));
    if cmp.unpaired_dropped > 0 {
        report.warnings.push(format!("{} unpaired (case, metric) entries dropped", cmp.unpaired_dropped));
    }
    for row in &cmp.rows {
        let out = ComparisonOut::new(row, &a.method_a, &a.method_b);
        println!("{}", out.summary);
        report.comparisons.push(out);
    }
    write_output(Some(&a.out), &report.to_json())
}

fn cmd_phantom(p: PhantomCommand) -> Result<(), Failure> {
    let invalid = |e: Error| validation("invalid geometry", &e);
    let (mask, out) = match p {
        PhantomCommand::Box { dims, spacing, lo, hi, out } => (gen_box(dims, spacing, lo, hi).map_err(invalid)?, out),
        PhantomCommand::Ellipsoid { dims, spacing, center, radii, out } => {
            (gen_ellipsoid(dims, spacing, center, radii).map_err(invalid)?, out)
        }
        PhantomCommand::Derive { input, translate: offset, dilate, noise, seed, selector, out } => {
            let sel = selector.selector().unwrap_or(LabelSelector::Threshold(0.5));
            let m = load_mask(&input, sel)?;
            let m = translate(&m, offset);
            let m = dilate_ball(&m, dilate).map_err(|e| validation("--dilate", &e))?;
            let m = flip_noise(&m, noise, seed).map_err(|e| validation("--noise", &e))?;
            (m, out)
        }
    };
    write_nifti(&mask.to_volume(), &out).map_err(|e| Failure::Io(format!("{}: {e}", out.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triples() {
        assert_eq!(triple::<usize>("1,2,3").unwrap(), [1, 2, 3]);
        assert_eq!(triple::<f64>(" 1.5, 2 ,-3").unwrap(), [1.5, 2.0, -3.0]);
        assert!(triple::<usize>("1,2").is_err());
        assert!(triple::<usize>("1,2,x").is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["segeval", "pair", "--ref", "a.nii"]), EXIT_VALIDATION);
        assert_eq!(run(["segeval", "bogus"]), EXIT_VALIDATION);
        assert_eq!(
            run(["segeval", "pair", "--ref", "a", "--test", "b", "--label", "1", "--threshold", "0.5"]),
            EXIT_VALIDATION
        );
    }
}
