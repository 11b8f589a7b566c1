use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};
use serde_json::{json, Value};
use tate_forge::dglie::BracketSign;
use tate_forge_cli::report::{run_job, EXIT_INPUT, EXIT_OK, EXIT_VIOLATION};
use tate_forge_cli::schema::{load_lie, JobSpec, Operation};
use tate_forge_cli::suite::{run_acceptance, SuiteOptions};
use tate_forge_cli::{input_error, JobError};

const USIZE_PARAMS: [(&str, &str); 7] = [
    ("d", "Number of variables"),
    ("n", "Power, or the ind truncation"),
    ("k", "Length of the Koszul sequence"),
    ("p", "Pro truncation"),
    ("m", "Half-dimension of the symplectic target, or nilpotency order"),
    ("n-max", "Largest stage"),
    ("cutoff", "Largest total degree"),
];

fn op_command(op: Operation) -> Command {
    let mut cmd = Command::new(op.name()).about(op.about());
    for (name, help) in USIZE_PARAMS {
        if op.params().contains(&name.replace('-', "_").as_str()) {
            cmd = cmd.arg(Arg::new(name).long(name).help(help).value_parser(value_parser!(u64)));
        }
    }
    let lists = [("e", "Subset E as 1-based indices"), ("degrees", "Generator degrees")];
    for (name, help) in lists {
        if op.params().contains(&name) {
            cmd = cmd.arg(
                Arg::new(name).long(name).help(help).value_delimiter(',').allow_negative_numbers(true).value_parser(value_parser!(i64)),
            );
        }
    }
    if op.params().contains(&"lie") {
        cmd = cmd.arg(Arg::new("lie").long("lie").help("Lie algebra JSON file").value_parser(value_parser!(PathBuf)));
    }
    if op.params().contains(&"coefficients") {
        cmd = cmd.arg(Arg::new("coefficients").long("coefficients").value_parser(["trivial", "adjoint"]));
    }
    if op.params().contains(&"mode") {
        cmd = cmd
            .arg(Arg::new("mode").long("mode").value_parser(["nonempty-d", "all-d"]))
            .arg(Arg::new("seed").long("seed").help("Random family seed").value_parser(value_parser!(u64)))
            .arg(Arg::new("max-dim").long("max-dim").value_parser(value_parser!(u64)));
    }
    cmd
}

fn cli() -> Command {
    let global = |name: &'static str, help: &'static str| Arg::new(name).long(name).help(help).global(true);
    let mut cmd = Command::new("tate-forge")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Exact computations with Koszul complexes, Tate lattices, dg-Lie algebras and loop-space truncations")
        .subcommand_required(true)
        .arg(global("field", "rational or fp:<prime>"))
        .arg(global("window", "Multidegree window").value_parser(value_parser!(u32)))
        .arg(global("weight", "Weight cutoff").value_parser(value_parser!(u32)))
        .arg(global("parallel", "Worker threads").value_parser(value_parser!(usize)))
        .arg(global("out", "Write the report here instead of stdout").value_parser(value_parser!(PathBuf)))
        .arg(global("shuffle", "Shuffle bases with this seed before reducing").value_parser(value_parser!(u64)))
        .arg(global("timing", "Record wall-clock time in reports").action(ArgAction::SetTrue))
        .subcommand(
            Command::new("run").about("Run a JSON job document").arg(Arg::new("job").required(true).value_parser(value_parser!(PathBuf))),
        )
        .subcommand(
            Command::new("suite")
                .about("Run a named test battery")
                .arg(Arg::new("name").required(true).value_parser(["acceptance"]))
                .arg(
                    Arg::new("lie")
                        .long("lie")
                        .help("Extra Lie algebra fixture (repeatable)")
                        .action(ArgAction::Append)
                        .value_parser(value_parser!(PathBuf)),
                )
                .arg(
                    Arg::new("sign-table")
                        .long("sign-table")
                        .help("JSON file choosing the CE bracket sign family")
                        .value_parser(value_parser!(PathBuf)),
                )
                .arg(Arg::new("no-determinism").long("no-determinism").action(ArgAction::SetTrue)),
        );
    for op in Operation::ALL {
        cmd = cmd.subcommand(op_command(op));
    }
    cmd
}

fn job_from_flags(op: Operation, m: &ArgMatches) -> JobSpec {
    let mut params = serde_json::Map::new();
    for (name, _) in USIZE_PARAMS {
        if let Ok(Some(v)) = m.try_get_one::<u64>(name) {
            params.insert(name.replace('-', "_"), json!(v));
        }
    }
    for name in ["seed", "max-dim"] {
        if let Ok(Some(v)) = m.try_get_one::<u64>(name) {
            params.insert(name.replace('-', "_"), json!(v));
        }
    }
    for name in ["e", "degrees"] {
        if let Ok(Some(vs)) = m.try_get_many::<i64>(name) {
            params.insert(name.into(), json!(vs.collect::<Vec<_>>()));
        }
    }
    for name in ["coefficients", "mode"] {
        if let Ok(Some(v)) = m.try_get_one::<String>(name) {
            params.insert(name.into(), json!(v));
        }
    }
    if let Ok(Some(p)) = m.try_get_one::<PathBuf>("lie") {
        params.insert("lie".into(), json!(p));
    }
    JobSpec::new(op, Value::Object(params))
}

fn apply_globals(job: &mut JobSpec, m: &ArgMatches) -> Result<(), JobError> {
    if let Some(f) = m.get_one::<String>("field") {
        job.field = f.clone();
    }
    if let Some(w) = m.get_one::<u32>("window") {
        job.set_param("window", json!(w))?;
    }
    if let Some(w) = m.get_one::<u32>("weight") {
        job.set_param("weight", json!(w))?;
    }
    if let Some(s) = m.get_one::<u64>("shuffle") {
        job.shuffle = Some(*s);
    }
    if let Some(o) = m.get_one::<PathBuf>("out") {
        job.out = Some(o.clone());
    }
    job.exact()?;
    Ok(())
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_single(mut job: JobSpec, base: &Path, m: &ArgMatches) -> Result<u8, JobError> {
    apply_globals(&mut job, m)?;
    let report = in_pool(m.get_one::<usize>("parallel").copied(), || run_job(&job, base, m.get_flag("timing")))?;
    for v in report.verdicts.iter().filter(|v| !v.pass) {
        eprintln!("invariant violated: {}: {}", v.name, v.witness.as_deref().unwrap_or("no witness"));
    }
    emit(&report.to_json(), job.out.as_deref()).map_err(|e| input_error(format!("{e:#}")))?;
    Ok(report.exit_code())
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().expect("thread pool").install(f),
        None => f(),
    }
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct SignTable {
    bracket_sign: BracketSign,
}

fn run_suite(m: &ArgMatches, sub: &ArgMatches) -> Result<u8, JobError> {
    let mut job = JobSpec::new(Operation::ResiduePairing, json!({}));
    if let Some(f) = m.get_one::<String>("field") {
        job.field = f.clone();
    }
    let mut opts = SuiteOptions {
        exact: job.exact()?,
        threads: m.get_one::<usize>("parallel").copied(),
        determinism: !sub.get_flag("no-determinism"),
        ..SuiteOptions::default()
    };
    for p in sub.get_many::<PathBuf>("lie").into_iter().flatten() {
        let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        opts.extra_lie.push((name, load_lie(p)?));
    }
    if let Some(p) = sub.get_one::<PathBuf>("sign-table") {
        let text = std::fs::read_to_string(p).map_err(|e| input_error(format!("{}: {e}", p.display())))?;
        let t: SignTable = serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {e}", p.display())))?;
        opts.sign = t.bracket_sign;
    }
    let report = run_acceptance(&opts, &mut |c| eprintln!("{}", c.line()));
    for f in &report.failures {
        eprintln!("failed: {f}");
    }
    emit(&report.to_json(), m.get_one::<PathBuf>("out").map(PathBuf::as_path)).map_err(|e| input_error(format!("{e:#}")))?;
    Ok(if report.passed { EXIT_OK } else { EXIT_VIOLATION })
}

fn dispatch(m: &ArgMatches) -> Result<u8, JobError> {
    match m.subcommand() {
        Some(("run", sub)) => {
            let path = sub.get_one::<PathBuf>("job").expect("required");
            let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            let job = JobSpec::parse(&text)?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            run_single(job, &base, m)
        }
        Some(("suite", sub)) => run_suite(m, sub),
        Some((name, sub)) => {
            let op: Operation = name.parse().map_err(input_error)?;
            run_single(job_from_flags(op, sub), Path::new("."), m)
        }
        None => unreachable!("a subcommand is required"),
    }
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    match dispatch(&matches) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_violation() { EXIT_VIOLATION } else { EXIT_INPUT })
        }
    }
}
