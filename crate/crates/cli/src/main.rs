//! `leonard`: validate, construct, check and transform Leonard systems given as
//! JSON documents. Exit status 0 means success, 1 a failed check or rejected
//! input, 2 an unreadable input.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use leonard::doc::{
    family_params, family_spec_to_doc, intersection_to_doc, parray_to_doc, parse_document, parse_family_spec,
    realization_to_doc, to_pretty, Document,
};
use leonard::families::{
    closed_intersection, generate_parray, sample_admissible, Family, FamilyError, FamilySpec,
};
use leonard::field::Field;
use leonard::intersection::{brute_intersection, closed_forms, diff, IntersectionData, Method};
use leonard::parray::{D4Word, ParameterArray};
use leonard::suite::{run_suites, Suite};
use leonard::system::{build_split, extract_parray, Realization};

#[derive(Parser)]
#[command(name = "leonard", version, about = "Exact construction and checking of Leonard systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the five parameter array conditions.
    Validate { file: PathBuf },
    /// Run every identity suite and print a report.
    Check {
        file: PathBuf,
        /// Also write the report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Restrict to the named suites (repeatable).
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Run independent suites on separate threads.
        #[arg(long)]
        parallel: bool,
        /// Add wall-clock timings, which makes the report non-reproducible.
        #[arg(long)]
        timing: bool,
    },
    /// Build the split-form realization of a parameter array.
    Construct {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply a word in down, Down and star, e.g. "down.star".
    Transform {
        file: PathBuf,
        #[arg(long)]
        g: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Intersection numbers by brute force or by a closed form.
    Intersections {
        file: PathBuf,
        /// brute, bbcc, cibiform, bici, bcform or all
        #[arg(long, default_value = "all")]
        method: String,
    },
    /// Families of parameter arrays.
    Family {
        #[command(subcommand)]
        command: FamilyCommand,
    },
    /// Parameter array to realization and back (or the reverse).
    Roundtrip { file: PathBuf },
}

#[derive(clap::Args)]
struct SpecArgs {
    /// A family spec document; replaces the other flags.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    /// JSON object of parameter values as strings.
    #[arg(long, default_value = "{}")]
    params: String,
    #[arg(long, default_value = "Q")]
    field: String,
}

#[derive(Subcommand)]
enum FamilyCommand {
    /// Parameter array with the family's intersection numbers embedded.
    Gen {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Admissible specs found by a seeded search.
    Sample {
        #[arg(long)]
        name: String,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Plain-text table of a, b, c and their duals.
    Table {
        #[command(flatten)]
        spec: SpecArgs,
    },
}

/// Why a command stopped: bad input (exit 2) or a rejected or failed check
/// (exit 1). The payload is printed to stderr.
enum Fail {
    Input(String),
    Rejected(String),
}

type Outcome = Result<ExitCode, Fail>;

fn input<E: std::fmt::Display>(ctx: &str) -> impl FnOnce(E) -> Fail + '_ {
    move |e| Fail::Input(format!("{ctx}: {e}"))
}

struct Loaded {
    text: String,
    digest: String,
}

fn load(path: &Path) -> Result<Loaded, Fail> {
    let bytes = std::fs::read(path).map_err(input(&path.display().to_string()))?;
    let digest = format!("sha256:{:x}", Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(input(&path.display().to_string()))?;
    Ok(Loaded { text, digest })
}

fn document(path: &Path) -> Result<(Loaded, Document), Fail> {
    let l = load(path)?;
    let doc = parse_document(&l.text).map_err(input(&path.display().to_string()))?;
    Ok((l, doc))
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    std::fs::write(path, text).map_err(input(&path.display().to_string()))
}

fn print_json(v: &Value) {
    print!("{}", to_pretty(v));
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_validate(file: &Path) -> Outcome {
    let (l, doc) = document(file)?;
    let pa = match doc {
        Document::Parray { pa, .. } => pa,
        Document::Realization(_) => return Err(Fail::Input("validate expects a parameter array document".into())),
    };
    let rep = pa.validate().map_err(|e| Fail::Rejected(e.to_string()))?;
    let mut conditions = serde_json::Map::new();
    for c in ["PA1", "PA2", "PA3", "PA4", "PA5"] {
        let hits: Vec<String> = rep.violations.iter().filter(|v| v.condition() == c).map(|v| v.to_string()).collect();
        let v = if hits.is_empty() { json!("pass") } else { json!({ "fail": hits }) };
        conditions.insert(c.to_string(), v);
    }
    print_json(&json!({
        "input_digest": l.digest,
        "field": pa.field.descriptor(),
        "d": pa.d(),
        "valid": rep.is_valid(),
        "vacuous": rep.vacuous,
        "conditions": conditions,
    }));
    Ok(status(rep.is_valid()))
}

fn cmd_check(file: &Path, report: Option<&Path>, names: &[String], parallel: bool, timing: bool) -> Outcome {
    let suites = names
        .iter()
        .map(|n| n.parse::<Suite>().map_err(Fail::Input))
        .collect::<Result<Vec<_>, _>>()?;
    let (l, doc) = document(file)?;
    let start = Instant::now();
    let (pa, expected) = match doc {
        Document::Parray { pa, expected } => (pa, expected),
        Document::Realization(real) => match extract_parray(&real) {
            Ok(pa) => (pa, None),
            Err(e) => {
                let r = json!({"suite": "leonard-axioms", "status": "fail", "checks": 1, "witnesses": [format!("extract_parray: {e}")]});
                return finish_check(&l.digest, None, vec![r], report, timing.then(|| start.elapsed()));
            }
        },
    };
    let results = run_suites(&pa, expected.as_ref(), &suites, parallel);
    let rows: Vec<Value> = results.iter().map(|r| serde_json::to_value(r).expect("serializable")).collect();
    let (field, d) = (pa.field.descriptor(), pa.d());
    finish_check(&l.digest, Some((field, d)), rows, report, timing.then(|| start.elapsed()))
}

fn finish_check(
    digest: &str,
    shape: Option<(String, usize)>,
    rows: Vec<Value>,
    report: Option<&Path>,
    elapsed: Option<std::time::Duration>,
) -> Outcome {
    let failures: usize = rows.iter().filter(|r| r["status"] == "fail").count();
    let mut doc = json!({
        "input_digest": digest,
        "passed": failures == 0,
        "failed_suites": failures,
        "suites": rows,
    });
    if let Some((field, d)) = shape {
        doc["field"] = json!(field);
        doc["d"] = json!(d);
    }
    if let Some(t) = elapsed {
        doc["timing_ms"] = json!(t.as_secs_f64() * 1000.0);
    }
    let text = to_pretty(&doc);
    if let Some(p) = report {
        write(p, &text)?;
    }
    print!("{text}");
    Ok(status(failures == 0))
}

fn parray_only(doc: Document) -> Result<(ParameterArray, Option<IntersectionData>), Fail> {
    match doc {
        Document::Parray { pa, expected } => Ok((pa, expected)),
        Document::Realization(_) => Err(Fail::Input("expected a parameter array document".into())),
    }
}

fn cmd_construct(file: &Path, out: &Path) -> Outcome {
    let (_, doc) = document(file)?;
    let (pa, _) = parray_only(doc)?;
    let real = build_split(&pa).map_err(|e| Fail::Rejected(e.to_string()))?;
    write(out, &to_pretty(&realization_to_doc(&real)))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_transform(file: &Path, word: &str, out: &Path) -> Outcome {
    let word: D4Word = word.parse().map_err(input("--g"))?;
    let word = word.reduced();
    let (_, doc) = document(file)?;
    let text = match doc {
        Document::Parray { pa, .. } => to_pretty(&parray_to_doc(&pa.transform(&word), None)),
        Document::Realization(real) => to_pretty(&realization_to_doc(&real.transform(&word))),
    };
    write(out, &text)?;
    eprintln!("applied {word}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_intersections(file: &Path, method: &str) -> Outcome {
    let (_, doc) = document(file)?;
    let methods: Vec<Option<Method>> = match method {
        "all" => std::iter::once(None).chain(Method::ALL.into_iter().map(Some)).collect(),
        "brute" => vec![None],
        m => vec![Some(m.parse::<Method>().map_err(Fail::Input)?)],
    };
    let (pa, real) = match doc {
        Document::Parray { pa, .. } => {
            let real = build_split(&pa).map_err(|e| Fail::Rejected(e.to_string()))?;
            (pa, real)
        }
        Document::Realization(real) => (extract_parray(&real).map_err(|e| Fail::Rejected(e.to_string()))?, real),
    };
    let brute = || brute_intersection(&real).map_err(|e| Fail::Rejected(e.to_string()));
    if let [single] = methods.as_slice() {
        let data = match single {
            None => brute()?,
            Some(m) => closed_forms(&pa, *m).map_err(|e| Fail::Rejected(e.to_string()))?,
        };
        print_json(&json!({
            "method": single.map_or("brute", |m| m.name()),
            "intersections": intersection_to_doc(&data),
        }));
        return Ok(ExitCode::SUCCESS);
    }
    let base = brute()?;
    let mut out = serde_json::Map::new();
    out.insert("brute".into(), json!(intersection_to_doc(&base)));
    let mut mismatches = Vec::new();
    for m in Method::ALL {
        let v = match closed_forms(&pa, m) {
            Ok(data) => {
                mismatches.extend(diff(m.name(), &base, &data));
                json!(intersection_to_doc(&data))
            }
            Err(e) => json!({ "skipped": e.to_string() }),
        };
        out.insert(m.name().into(), v);
    }
    let agree = mismatches.is_empty();
    out.insert("agree".into(), json!(agree));
    out.insert("mismatches".into(), json!(mismatches));
    print_json(&Value::Object(out));
    Ok(status(agree))
}

fn family_error(e: FamilyError) -> Fail {
    match e {
        FamilyError::ConstraintViolated(_) | FamilyError::Inadmissible(_) | FamilyError::ExhaustedSearch(_)
        | FamilyError::ZeroDenominator(_) => Fail::Rejected(e.to_string()),
        _ => Fail::Input(e.to_string()),
    }
}

fn spec_from(args: &SpecArgs) -> Result<FamilySpec, Fail> {
    if let Some(p) = &args.spec {
        let l = load(p)?;
        return parse_family_spec(&l.text).map_err(input(&p.display().to_string()));
    }
    let name = args.name.as_deref().ok_or_else(|| Fail::Input("--name or --spec is required".into()))?;
    let family: Family = name.parse().map_err(|e: FamilyError| Fail::Input(e.to_string()))?;
    let field = Field::from_descriptor(&args.field).map_err(input("--field"))?;
    let d = match (args.d, family) {
        (Some(d), _) => d,
        (None, Family::Orphan) => 3,
        (None, _) => return Err(Fail::Input("--d is required".into())),
    };
    let raw: BTreeMap<String, String> = serde_json::from_str(&args.params).map_err(input("--params"))?;
    let params = family_params(&field, &raw).map_err(input("--params"))?;
    Ok(FamilySpec::new(family, d, &field, params))
}

fn cmd_family(cmd: &FamilyCommand) -> Outcome {
    match cmd {
        FamilyCommand::Gen { spec, out } => {
            let spec = spec_from(spec)?.normalized().map_err(family_error)?;
            let pa = generate_parray(&spec).map_err(family_error)?;
            let data = closed_intersection(&spec).map_err(family_error)?;
            let text = to_pretty(&parray_to_doc(&pa, Some(&data)));
            match out {
                Some(p) => write(p, &text)?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        FamilyCommand::Sample { name, d, field, seed, count } => {
            let family: Family = name.parse().map_err(|e: FamilyError| Fail::Input(e.to_string()))?;
            let field = Field::from_descriptor(field).map_err(input("--field"))?;
            let specs = sample_admissible(family, *d, &field, *seed, *count).map_err(family_error)?;
            let docs: Vec<Value> = specs.iter().map(|s| json!(family_spec_to_doc(s))).collect();
            print_json(&Value::Array(docs));
            Ok(ExitCode::SUCCESS)
        }
        FamilyCommand::Table { spec } => {
            let spec = spec_from(spec)?.normalized().map_err(family_error)?;
            let data = closed_intersection(&spec).map_err(family_error)?;
            print!("{}", table(&spec, &data));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn table(spec: &FamilySpec, x: &IntersectionData) -> String {
    let d = spec.d;
    let cell = |v: &[leonard::field::Elem], i: usize| v.get(i).map_or("-".to_string(), |e| e.to_string());
    let mut rows = vec![["i", "a", "b", "c", "a*", "b*", "c*"].map(String::from).to_vec()];
    for i in 0..=d {
        rows.push(vec![
            i.to_string(),
            cell(&x.a, i),
            if i < d { cell(&x.b, i) } else { "-".into() },
            if i > 0 { cell(&x.c, i - 1) } else { "-".into() },
            cell(&x.a_star, i),
            if i < d { cell(&x.b_star, i) } else { "-".into() },
            if i > 0 { cell(&x.c_star, i - 1) } else { "-".into() },
        ]);
    }
    let widths: Vec<usize> = (0..7).map(|j| rows.iter().map(|r| r[j].len()).max().unwrap_or(0)).collect();
    let mut out = format!("{} d={} over {}\n", spec.family, d, spec.field);
    for r in rows {
        let line: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn cmd_roundtrip(file: &Path) -> Outcome {
    let (l, doc) = document(file)?;
    let (kind, ok, note) = match doc {
        Document::Parray { pa, .. } => {
            let real = build_split(&pa).map_err(|e| Fail::Rejected(e.to_string()))?;
            match extract_parray(&real) {
                Ok(back) => ("parameter_array", back == pa, String::new()),
                Err(e) => ("parameter_array", false, e.to_string()),
            }
        }
        Document::Realization(real) => {
            let pa = extract_parray(&real).map_err(|e| Fail::Rejected(e.to_string()))?;
            let rebuilt: Result<Realization, _> = build_split(&pa);
            match rebuilt.map(|r| extract_parray(&r)) {
                Ok(Ok(back)) => ("realization", back == pa, String::new()),
                Ok(Err(e)) | Err(e) => ("realization", false, e.to_string()),
            }
        }
    };
    let mut v = json!({ "input_digest": l.digest, "kind": kind, "roundtrip": ok });
    if !note.is_empty() {
        v["error"] = json!(note);
    }
    print_json(&v);
    Ok(status(ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Validate { file } => cmd_validate(file),
        Command::Check { file, report, suites, parallel, timing } => {
            cmd_check(file, report.as_deref(), suites, *parallel, *timing)
        }
        Command::Construct { file, out } => cmd_construct(file, out),
        Command::Transform { file, g, out } => cmd_transform(file, g, out),
        Command::Intersections { file, method } => cmd_intersections(file, method),
        Command::Family { command } => cmd_family(command),
        Command::Roundtrip { file } => cmd_roundtrip(file),
    };
    match res {
        Ok(code) => code,
        Err(Fail::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Fail::Rejected(msg)) => {
            eprintln!("rejected: {msg}");
            ExitCode::from(1)
        }
    }
}
