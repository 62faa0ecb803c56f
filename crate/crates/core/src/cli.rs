//! Command-line front end: single-polytope commands and a resumable batch
//! driver writing JSONL.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Read, Write};
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::amd::{Amd, AmdEngine, AmdOptions, PolytopeContext, SolutionCache};
use crate::error::{AmdError, ParseError};
use crate::geometry::io::{parse_batch, parse_json, parse_text, PolytopeRecord};
use crate::geometry::LatticePolytope3;
use crate::invariants::betti_numbers;
use crate::period::{classical_period, minkowski_polynomial, period_json};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "amd",
    version,
    about = "Admissible Minkowski decomposition data of reflexive 3-polytopes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub job: JobConfig,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reflexivity and the edge table (lattice length, dual length).
    Check,
    /// Admissible Minkowski decompositions of every facet.
    Decomps,
    /// Coherent fine mixed subdivisions for every facet decomposition.
    Subdivs,
    /// Enumerate amd.
    Amd {
        /// Print only the number of amd.
        #[arg(long)]
        count: bool,
    },
    /// Smoothing invariants for every amd.
    Invariants,
    /// Minkowski polynomials and their classical periods.
    Period,
    /// Full pipeline over a collection, streaming JSONL to --output.
    Batch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Text,
    Json,
    BatchJson,
}

#[derive(Debug, Clone, Args)]
pub struct JobConfig {
    /// Input file; standard input when absent or `-`.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: InputFormat,
    /// Maximum number of amd per polytope; 0 means unlimited.
    #[arg(long, default_value_t = 0, global = true)]
    pub limit: usize,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..), global = true)]
    pub jobs: u64,
    #[arg(long, default_value_t = 20, global = true)]
    pub period_order: usize,
    /// Output file; standard output when absent (required for batch).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Identify amd differing only by a relabeling of summands.
    #[arg(long, global = true)]
    pub dedup: bool,
    /// Continue an interrupted batch run from its ledger.
    #[arg(long, global = true)]
    pub resume: bool,
    /// Emit JSON instead of text tables.
    #[arg(long, global = true)]
    pub json: bool,
    /// Enforce the matching condition at every edge, not only dull ones.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Report wall-clock time per polytope.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal invariant violation: {0}")]
    Internal(String),
    /// The reader of standard output went away; not an error for the user.
    #[error("output closed")]
    Closed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Internal(_) => EXIT_INTERNAL,
            CliError::Closed => EXIT_OK,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        match e.kind() {
            io::ErrorKind::BrokenPipe => CliError::Closed,
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<AmdError> for CliError {
    fn from(e: AmdError) -> Self {
        match e {
            AmdError::Geometry(g) => CliError::Input(g.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl JobConfig {
    fn amd_options(&self) -> AmdOptions {
        AmdOptions {
            limit: self.limit,
            dedup: self.dedup,
            strict: self.strict,
            jobs: self.jobs as usize,
        }
    }

    pub fn read_records(&self) -> Result<Vec<PolytopeRecord>, CliError> {
        let text = match &self.input {
            Some(p) if p.as_os_str() != "-" => {
                fs::read_to_string(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?
            }
            _ => {
                let mut s = String::new();
                io::stdin().read_to_string(&mut s)?;
                s
            }
        };
        let id = self
            .input
            .as_deref()
            .and_then(Path::file_stem)
            .map_or_else(|| "input".to_string(), |s| s.to_string_lossy().into_owned());
        Ok(match self.format {
            InputFormat::Text => vec![PolytopeRecord {
                id,
                vertices: parse_text(&text)?,
            }],
            InputFormat::Json => vec![parse_json(&text)?],
            InputFormat::BatchJson => parse_batch(&text)?,
        })
    }
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(CliError::Closed) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let records = cli.job.read_records()?;
    if let Command::Batch = cli.command {
        let out = cli
            .job
            .output
            .as_deref()
            .ok_or_else(|| CliError::Input("batch requires --output".into()))?;
        return run_batch(&cli.job, &records, out);
    }
    let mut sink: Box<dyn Write> = match &cli.job.output {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    };
    let cache = SolutionCache::default();
    let mut code = EXIT_OK;
    for rec in &records {
        let start = Instant::now();
        let result = run_single(&cli.command, &cli.job, rec, &cache, &mut *sink);
        if cli.job.timing {
            eprintln!("{}: {:.3} s", rec.id, start.elapsed().as_secs_f64());
        }
        match result {
            Err(CliError::Closed) => return Ok(code),
            Err(e) => {
                eprintln!("error: {}: {e}", rec.id);
                code = code.max(e.exit_code());
            }
            Ok(()) => {}
        }
    }
    sink.flush()?;
    Ok(code)
}

fn context(rec: &PolytopeRecord, seed: u64, cache: &SolutionCache) -> Result<PolytopeContext, CliError> {
    let p = LatticePolytope3::hull(&rec.vertices).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(PolytopeContext::with_cache(&p, seed, cache)?)
}

fn pt(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    writeln!(out, "{v}")?;
    Ok(())
}

fn run_single(
    cmd: &Command,
    job: &JobConfig,
    rec: &PolytopeRecord,
    cache: &SolutionCache,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    match cmd {
        Command::Check => check(job, rec, out),
        Command::Decomps => decomps(job, rec, cache, out),
        Command::Subdivs => subdivs(job, rec, cache, out),
        Command::Amd { count } => amd(job, rec, cache, *count, out),
        Command::Invariants => invariants(job, rec, cache, out),
        Command::Period => period(job, rec, cache, out),
        Command::Batch => unreachable!("handled by run"),
    }
}

fn check(job: &JobConfig, rec: &PolytopeRecord, out: &mut dyn Write) -> Result<(), CliError> {
    let p = LatticePolytope3::hull(&rec.vertices).map_err(|e| CliError::Input(e.to_string()))?;
    let reflexive = p.is_reflexive();
    let edges: Vec<_> = if reflexive {
        (0..p.edges().len()).map(|e| p.edge_geometry(e)).collect()
    } else {
        Vec::new()
    };
    if job.json {
        let table: Vec<Value> = edges
            .iter()
            .map(|g| {
                json!({
                    "edge": g.edge,
                    "from": g.points[0],
                    "to": g.points[g.points.len() - 1],
                    "length": g.length,
                    "colength": g.colength,
                    "dull": g.colength == 1,
                })
            })
            .collect();
        return emit(
            out,
            &json!({
                "id": rec.id,
                "reflexive": reflexive,
                "vertices": p.vertices().len(),
                "facets": p.facets().len(),
                "edges": table,
            }),
        );
    }
    let mut s = String::new();
    let _ = writeln!(s, "id: {}", rec.id);
    let _ = writeln!(s, "reflexive: {}", if reflexive { "yes" } else { "no" });
    let _ = writeln!(
        s,
        "vertices: {}  facets: {}  edges: {}",
        p.vertices().len(),
        p.facets().len(),
        p.edges().len()
    );
    if reflexive {
        let _ = writeln!(s, "edge  from  to  l  k  dull");
        for g in &edges {
            let _ = writeln!(
                s,
                "{}  {}  {}  {}  {}  {}",
                g.edge,
                pt(&g.points[0]),
                pt(&g.points[g.points.len() - 1]),
                g.length,
                g.colength,
                if g.colength == 1 { "yes" } else { "no" }
            );
        }
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

fn decomps(job: &JobConfig, rec: &PolytopeRecord, cache: &SolutionCache, out: &mut dyn Write) -> Result<(), CliError> {
    let ctx = context(rec, job.seed, cache)?;
    if job.json {
        let facets: Vec<Value> = ctx
            .facets
            .iter()
            .enumerate()
            .map(|(f, data)| {
                json!({
                    "facet": f,
                    "polygon": data.chart.polygon.vertices(),
                    "decompositions": data.solutions().decompositions.iter().map(|d| d.to_json()).collect::<Vec<_>>(),
                })
            })
            .collect();
        return emit(out, &json!({ "id": rec.id, "facets": facets }));
    }
    let mut s = format!("id: {}\n", rec.id);
    for (f, data) in ctx.facets.iter().enumerate() {
        let ds = &data.solutions().decompositions;
        let poly: Vec<String> = data.chart.polygon.vertices().iter().map(|v| pt(v)).collect();
        let _ = writeln!(s, "facet {f}: polygon {}  decompositions: {}", poly.join(" "), ds.len());
        for (i, d) in ds.iter().enumerate() {
            let summands: Vec<String> = d
                .summands()
                .iter()
                .map(|t| {
                    let vs: Vec<String> = t.vertices.iter().map(|v| pt(v)).collect();
                    format!("A{}[{}]", t.n, vs.join(" "))
                })
                .collect();
            let _ = writeln!(s, "  {i}: {}", summands.join(" + "));
        }
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

fn subdivs(job: &JobConfig, rec: &PolytopeRecord, cache: &SolutionCache, out: &mut dyn Write) -> Result<(), CliError> {
    let ctx = context(rec, job.seed, cache)?;
    let mut facets = Vec::new();
    let mut s = format!("id: {}\n", rec.id);
    for (f, data) in ctx.facets.iter().enumerate() {
        let sol = data.solutions();
        let mut per = Vec::new();
        for d in 0..sol.decompositions.len() {
            let subs = sol.subdivisions(d).map_err(AmdError::from)?;
            let _ = writeln!(s, "facet {f} decomposition {d}: {} subdivisions", subs.len());
            for (k, sub) in subs.iter().enumerate() {
                let cells = sub.induced_subdivision().cells.len();
                let _ = writeln!(s, "  {k}: {cells} cells  partitions {:?}", sub.edge_partitions);
            }
            per.push(json!({
                "decomposition": d,
                "subdivisions": subs.iter().map(|x| x.to_json()).collect::<Vec<_>>(),
            }));
        }
        facets.push(json!({ "facet": f, "decompositions": per }));
    }
    if job.json {
        return emit(out, &json!({ "id": rec.id, "facets": facets }));
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

fn amd(
    job: &JobConfig,
    rec: &PolytopeRecord,
    cache: &SolutionCache,
    count: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let ctx = context(rec, job.seed, cache)?;
    let engine = AmdEngine::new(&ctx);
    if count {
        let n = engine.count(&job.amd_options())?;
        return if job.json {
            emit(out, &json!({ "id": rec.id, "count": n }))
        } else {
            writeln!(out, "{n}").map_err(Into::into)
        };
    }
    let mut err = None;
    let mut index = 0usize;
    engine.for_each(&job.amd_options(), |a| {
        let r = if job.json {
            a.to_json(&ctx)
                .map_err(CliError::from)
                .and_then(|v| emit(out, &json!({ "id": rec.id, "index": index, "amd": v })))
        } else {
            writeln!(out, "amd {index}: {}", digest_text(a)).map_err(CliError::from)
        };
        index += 1;
        match r {
            Ok(()) => ControlFlow::Continue(()),
            Err(e) => {
                err = Some(e);
                ControlFlow::Break(())
            }
        }
    })?;
    err.map_or(Ok(()), Err)
}

fn digest(a: &Amd) -> Value {
    Value::Array(
        a.choices
            .iter()
            .map(|c| json!([c.option.decomposition, c.option.subdivision]))
            .collect(),
    )
}

fn digest_text(a: &Amd) -> String {
    let parts: Vec<String> = a
        .choices
        .iter()
        .map(|c| format!("{}:{}/{}", c.facet, c.option.decomposition, c.option.subdivision))
        .collect();
    parts.join(" ")
}

fn invariants(
    job: &JobConfig,
    rec: &PolytopeRecord,
    cache: &SolutionCache,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let ctx = context(rec, job.seed, cache)?;
    let engine = AmdEngine::new(&ctx);
    if !job.json {
        writeln!(out, "id: {}", rec.id)?;
        writeln!(out, "amd  n  q  eY  eYt  eXeta  picY  sigma  b2  b3  degree  h0  t1dim")?;
    }
    let mut err = None;
    let mut index = 0usize;
    engine.for_each(&job.amd_options(), |a| {
        let r = betti_numbers(&ctx, a).map_err(CliError::from).and_then(|inv| {
            if job.json {
                emit(
                    out,
                    &json!({ "id": rec.id, "index": index, "amd": digest(a), "invariants": inv }),
                )
            } else {
                writeln!(
                    out,
                    "{index}  {}  {}  {}  {}  {}  {}  {}  {}  {}  {}  {}  {}",
                    inv.n,
                    inv.q,
                    inv.e_y,
                    inv.e_yt,
                    inv.e_xeta,
                    inv.pic_y,
                    inv.sigma,
                    inv.b2,
                    inv.b3,
                    inv.degree,
                    inv.h0,
                    inv.t1_dim
                )
                .map_err(CliError::from)
            }
        });
        index += 1;
        match r {
            Ok(()) => ControlFlow::Continue(()),
            Err(e) => {
                err = Some(e);
                ControlFlow::Break(())
            }
        }
    })?;
    err.map_or(Ok(()), Err)
}

/// Distinct per-facet decomposition choices occurring in amd, in
/// enumeration order.
fn decomposition_choices(ctx: &PolytopeContext, opts: &AmdOptions) -> Result<Vec<Vec<usize>>, AmdError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let opts = AmdOptions {
        dedup: false,
        ..opts.clone()
    };
    AmdEngine::new(ctx).for_each(&opts, |a| {
        let key: Vec<usize> = a.choices.iter().map(|c| c.option.decomposition).collect();
        if seen.insert(key.clone()) {
            out.push(key);
        }
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

fn period(job: &JobConfig, rec: &PolytopeRecord, cache: &SolutionCache, out: &mut dyn Write) -> Result<(), CliError> {
    let ctx = context(rec, job.seed, cache)?;
    for choice in decomposition_choices(&ctx, &job.amd_options())? {
        let w = minkowski_polynomial(&ctx, &choice)?;
        let c = classical_period(&w, job.period_order)?;
        if job.json {
            emit(
                out,
                &json!({ "id": rec.id, "decompositions": choice, "polynomial": w.to_json(), "period": period_json(&c) }),
            )?;
        } else {
            let cs: Vec<String> = c.iter().map(ToString::to_string).collect();
            writeln!(out, "{} {:?}: {}", rec.id, choice, cs.join(" "))?;
        }
    }
    Ok(())
}

/// One JSONL record of the batch driver.
pub fn batch_record(job: &JobConfig, rec: &PolytopeRecord, cache: &SolutionCache) -> (Value, Option<CliError>) {
    let start = Instant::now();
    let result = (|| -> Result<Value, CliError> {
        let ctx = context(rec, job.seed, cache)?;
        let opts = AmdOptions {
            jobs: 1,
            ..job.amd_options()
        };
        let mut amds = Vec::new();
        let mut err = None;
        AmdEngine::new(&ctx).for_each(&opts, |a| match betti_numbers(&ctx, a) {
            Ok(inv) => {
                amds.push(json!({ "amd": digest(a), "invariants": inv }));
                ControlFlow::Continue(())
            }
            Err(e) => {
                err = Some(e);
                ControlFlow::Break(())
            }
        })?;
        if let Some(e) = err {
            return Err(e.into());
        }
        let period = match decomposition_choices(&ctx, &AmdOptions { limit: 1, ..opts })?.first() {
            Some(choice) => {
                let w = minkowski_polynomial(&ctx, choice)?;
                period_json(&classical_period(&w, job.period_order)?)
            }
            None => Value::Null,
        };
        Ok(json!({ "amd_count": amds.len(), "amd": amds, "period": period }))
    })();
    let (mut v, err) = match result {
        Ok(v) => (v, None),
        Err(e) => {
            let kind = if e.exit_code() == EXIT_INPUT {
                "input"
            } else {
                "internal"
            };
            (json!({ "error": { "kind": kind, "message": e.to_string() } }), Some(e))
        }
    };
    let obj = v.as_object_mut().expect("object");
    obj.insert("id".into(), json!(rec.id));
    obj.insert("status".into(), json!(if err.is_none() { "ok" } else { "error" }));
    if job.timing {
        obj.insert("timing_ms".into(), json!(start.elapsed().as_millis() as u64));
    }
    (v, err)
}

pub fn ledger_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".done");
    PathBuf::from(s)
}

/// Ids recorded as complete, after dropping output lines not backed by the
/// ledger (a record written just before an interruption). An id counts only
/// if its record is also intact, which rules out a torn ledger line.
fn prepare_resume(output: &Path, ledger: &Path) -> Result<BTreeSet<String>, CliError> {
    let listed: BTreeSet<String> = match File::open(ledger) {
        Ok(f) => BufReader::new(f)
            .lines()
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .filter(|l| !l.is_empty())
            .collect(),
        Err(e) if e.kind() == io::ErrorKind::NotFound => BTreeSet::new(),
        Err(e) => return Err(e.into()),
    };
    let text = match fs::read_to_string(output) {
        Ok(text) => text,
        Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
        Err(e) => return Err(e.into()),
    };
    let mut done = BTreeSet::new();
    let mut kept = String::new();
    for line in text.lines() {
        let id = serde_json::from_str::<Value>(line)
            .ok()
            .and_then(|v| v.get("id").and_then(Value::as_str).map(str::to_owned));
        if let Some(id) = id.filter(|id| listed.contains(id) && !done.contains(id)) {
            kept.push_str(line);
            kept.push('\n');
            done.insert(id);
        }
    }
    fs::write(output, kept)?;
    // Rewrite the ledger so it ends with a newline.
    let ids: String = done.iter().map(|id| format!("{id}\n")).collect();
    fs::write(ledger, ids)?;
    Ok(done)
}

struct Sink {
    output: File,
    ledger: File,
}

impl Sink {
    fn write(&mut self, record: &Value, id: &str) -> io::Result<()> {
        writeln!(self.output, "{record}")?;
        self.output.flush()?;
        self.output.sync_data()?;
        writeln!(self.ledger, "{id}")?;
        self.ledger.flush()
    }
}

pub fn run_batch(job: &JobConfig, records: &[PolytopeRecord], output: &Path) -> Result<i32, CliError> {
    let ledger = ledger_path(output);
    let done = if job.resume {
        prepare_resume(output, &ledger)?
    } else {
        File::create(output)?;
        File::create(&ledger)?;
        BTreeSet::new()
    };
    let open = |p: &Path| OpenOptions::new().append(true).create(true).open(p);
    let sink = Mutex::new(Sink {
        output: open(output)?,
        ledger: open(&ledger)?,
    });
    let todo: Vec<&PolytopeRecord> = records.iter().filter(|r| !done.contains(&r.id)).collect();
    let cache = SolutionCache::default();
    let worst = Mutex::new(EXIT_OK);
    let process = |rec: &&PolytopeRecord| -> Result<(), CliError> {
        let (v, err) = batch_record(job, rec, &cache);
        if let Some(e) = err {
            eprintln!("error: {}: {e}", rec.id);
            if e.exit_code() == EXIT_INTERNAL {
                *worst.lock().expect("status lock") = EXIT_INTERNAL;
            }
        }
        sink.lock().expect("sink lock").write(&v, &rec.id)?;
        Ok(())
    };
    if job.jobs <= 1 {
        todo.iter().try_for_each(process)?;
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(job.jobs as usize)
            .build()
            .map_err(|e| CliError::Internal(e.to_string()))?;
        pool.install(|| todo.par_iter().try_for_each(process))?;
    }
    let code = *worst.lock().expect("status lock");
    Ok(code)
}
