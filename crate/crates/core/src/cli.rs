//! The `pvfrag` command line. Everything lives here so the binary is a one
//! liner and tests can drive commands in-process.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::cache::{decompose_cached, PartitionCache};
use crate::duality::{core_orientation, regional_extrema, to_path, CoreOrientation, Extremum};
use crate::dynamics::{simulate, time_grid};
use crate::error::Error;
use crate::krylov::{project_to_core, TableRow};
use crate::models::{build_model, load_model_json, pv_check_model, window_extrema, ModelParams, ModelSpec};
use crate::spinchain::{Alphabet, SectorKey, SpinConfig, DIPOLE_CONVENTION};

/// Sector dimension above which `sectors` refuses to run unless raised.
pub const DEFAULT_SECTOR_CAP: u128 = 1_000_000;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "pvfrag",
    version,
    about = "Peak-valley Hilbert space fragmentation in spin-F domain-wall chains",
    after_help = "Exit codes: 0 success, 1 check failed or core violated, 2 usage error, 3 request too large.\n\
                  PVFRAG_CACHE names a directory where sector partitions are cached."
)]
pub struct Cli {
    /// Weight of the second embedded-Fredkin term (h_em only).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the peak-valley condition on every transition of a model.
    Pvcheck {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Krylov fragmentation metrics of a symmetry sector.
    #[command(after_help = "CSV columns: model,N,r,Sf,DmaxOverDt,Dt")]
    Sectors {
        #[command(flatten)]
        model: ModelArgs,
        /// Chain length, or an inclusive range such as 10-14.
        #[arg(long = "L", value_name = "N")]
        length: String,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0)]
        total_spin: i64,
        #[arg(long, allow_negative_numbers = true)]
        dipole: Option<i64>,
        #[arg(long, value_enum, default_value_t = TableFormat::Table)]
        format: TableFormat,
        /// Refuse sectors larger than this.
        #[arg(long, default_value_t = DEFAULT_SECTOR_CAP)]
        max_dimension: u128,
        /// Write the data here (plus PATH.manifest.json) instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve a product state inside its Krylov class.
    #[command(after_help = "Files: PREFIX_entropy.csv (time,cut,entropy), PREFIX_charge.csv (time,bond,charge),\n\
                            PREFIX.json (metadata and both grids). Cut c sits after site c-1; bond k is the\n\
                            path height after site k.")]
    Evolve {
        #[command(flatten)]
        model: ModelArgs,
        /// Initial product state, e.g. "-1,0,1,0".
        #[arg(long, allow_hyphen_values = true)]
        init: String,
        #[arg(long, default_value_t = 50.0)]
        tmax: f64,
        #[arg(long, default_value_t = 0.25)]
        dt: f64,
        /// "all" or a comma separated list of cuts to export.
        #[arg(long, default_value = "all")]
        cuts: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Induced transitions of a model restricted to the core subspace.
    ProjectCore {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "L", value_name = "N", default_value_t = 8)]
        length: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Charge path, regional peaks and valleys, and core membership of a state.
    Path {
        #[arg(long, allow_hyphen_values = true)]
        config: String,
        /// Bond operator width used for the peak/valley depth.
        #[arg(long, default_value_t = 3)]
        q: usize,
        #[arg(long = "spin", value_name = "F", default_value_t = 1)]
        spin: u8,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ModelArgs {
    /// Built-in model: tjz1, h3_1, h4_1, motzkin, tjz2, h3_2_raw, h3_2, h_em, h3_prime, fredkin.
    #[arg(long)]
    model: Option<String>,
    /// JSON model file: {"F": 1, "q": 3, "transitions": [{"in": [..], "out": [..], "coeff": 1}]}.
    #[arg(long)]
    model_file: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TableFormat {
    Table,
    Csv,
    Json,
}

/// Process-level inputs that do not come from argv.
#[derive(Clone, Debug, Default)]
pub struct Env {
    pub cache_dir: Option<PathBuf>,
}

impl Env {
    pub fn from_process() -> Self {
        Self {
            cache_dir: PartitionCache::from_env().map(|c| c.dir().to_path_buf()),
        }
    }
}

/// Provenance record written next to every data product.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub convention_tag: String,
    pub tool_version: String,
    /// SHA-256 of the data payload this manifest describes.
    pub content_hash: String,
}

impl RunManifest {
    pub fn new(command: &str, parameters: BTreeMap<String, Value>, payload: &[u8]) -> Self {
        Self {
            command: command.to_string(),
            parameters,
            convention_tag: DIPOLE_CONVENTION.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            content_hash: hex::encode(Sha256::digest(payload)),
        }
    }
}

enum Failure {
    Usage(String),
    Refused(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DimensionTooLarge { .. } => Failure::Refused(e.to_string()),
            Error::Io(_) | Error::BasisNotClosed { .. } | Error::NotIndicator(_) => Failure::Other(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Runs one invocation and returns the exit code. `args` includes argv[0].
pub fn run_with<I, T>(args: I, env: &Env, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, cli.alpha, env, out) {
        Ok(code) => code,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (EXIT_USAGE, m),
                Failure::Refused(m) => (EXIT_REFUSED, m),
                Failure::Other(m) => (EXIT_NEGATIVE, m),
            };
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

/// Entry point for the binary.
pub fn main_exit_code() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &Env::from_process(), &mut stdout.lock(), &mut stderr.lock())
}

fn dispatch(command: Command, alpha: Option<f64>, env: &Env, out: &mut dyn Write) -> Outcome {
    let params = ModelParams {
        alpha: alpha.unwrap_or(1.0),
    };
    match command {
        Command::Pvcheck { model, format } => pvcheck(&resolve(&model, &params)?, format, out),
        Command::Sectors {
            model,
            length,
            total_spin,
            dipole,
            format,
            max_dimension,
            out: path,
        } => {
            let m = resolve(&model, &params)?;
            let lengths = parse_lengths(&length)?;
            sectors(&m, lengths, total_spin, dipole, format, max_dimension, path.as_deref(), env, out)
        }
        Command::Evolve {
            model,
            init,
            tmax,
            dt,
            cuts,
            out: prefix,
        } => evolve(&resolve(&model, &params)?, &init, tmax, dt, &cuts, prefix.as_deref(), out),
        Command::ProjectCore { model, length, format } => project(&resolve(&model, &params)?, length, format, out),
        Command::Path { config, q, spin, format } => path(&config, q, spin, format, out),
    }
}

fn resolve(args: &ModelArgs, params: &ModelParams) -> std::result::Result<ModelSpec, Failure> {
    match (&args.model, &args.model_file) {
        (Some(name), _) => Ok(build_model(name, params)?),
        (_, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            Ok(load_model_json(&text)?)
        }
        _ => Err(Failure::Usage("give --model or --model-file".into())),
    }
}

fn model_params(m: &ModelSpec) -> BTreeMap<String, Value> {
    BTreeMap::from([
        ("model".to_string(), json!(m.name)),
        ("spin".to_string(), json!(m.alphabet.to_string())),
    ])
}

fn window(v: &[i8]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn pvcheck(m: &ModelSpec, format: Format, out: &mut dyn Write) -> Outcome {
    let report = pv_check_model(m);
    let code = if report.passed { EXIT_OK } else { EXIT_NEGATIVE };
    match format {
        Format::Text => {
            writeln!(out, "model: {} ({}, {} transitions)", m.name, m.alphabet, m.transition_count())?;
            if report.passed {
                writeln!(out, "PASS")?;
            } else {
                writeln!(out, "FAIL: {} violating transition(s)", report.violations.len())?;
                for v in &report.violations {
                    writeln!(
                        out,
                        "  {} <-> {}  in max/min {}/{}  out max/min {}/{}",
                        window(&v.transition.input),
                        window(&v.transition.output),
                        v.input_extrema.0,
                        v.input_extrema.1,
                        v.output_extrema.0,
                        v.output_extrema.1
                    )?;
                }
            }
        }
        Format::Json => {
            let transitions: Vec<Value> = m
                .pairs()
                .map(|t| {
                    let (a, b) = (window_extrema(&t.input), window_extrema(&t.output));
                    json!({
                        "in": t.input, "out": t.output, "coeff": t.coefficient,
                        "inExtrema": {"max": a.0, "min": a.1},
                        "outExtrema": {"max": b.0, "min": b.1},
                        "ok": a == b,
                    })
                })
                .collect();
            let data = json!({"passed": report.passed, "transitions": transitions});
            emit_json("pvcheck", model_params(m), data, out)?;
        }
    }
    Ok(code)
}

fn emit_json(command: &str, params: BTreeMap<String, Value>, data: Value, out: &mut dyn Write) -> std::io::Result<()> {
    let payload = serde_json::to_vec(&data).map_err(std::io::Error::other)?;
    let manifest = RunManifest::new(command, params, &payload);
    let doc = json!({"manifest": manifest, "data": data});
    writeln!(out, "{}", serde_json::to_string_pretty(&doc).map_err(std::io::Error::other)?)
}

fn parse_lengths(text: &str) -> std::result::Result<Vec<usize>, Failure> {
    let bad = || Failure::Usage(format!("--L expects N or A-B, got `{text}`"));
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let (a, b) = match text.split_once('-') {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let n = parse(text)?;
            (n, n)
        }
    };
    if a == 0 || b < a {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

/// Six significant digits for human-readable tables.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let decimals = (5 - x.abs().log10().floor() as i64).max(0) as usize;
    format!("{x:.decimals$}")
}

#[allow(clippy::too_many_arguments)]
fn sectors(
    m: &ModelSpec,
    lengths: Vec<usize>,
    total_spin: i64,
    dipole: Option<i64>,
    format: TableFormat,
    cap: u128,
    path: Option<&Path>,
    env: &Env,
    out: &mut dyn Write,
) -> Outcome {
    let cache = env.cache_dir.as_ref().map(PartitionCache::new);
    let mut rows = Vec::new();
    for &n in &lengths {
        let sector = SectorKey::new(n, m.alphabet, total_spin, dipole)?;
        let size = sector.dimension();
        if size > cap {
            return Err(Failure::Refused(format!(
                "sector L={n} spin={total_spin} dipole={} has {size} states, above the limit {cap}; \
                 pass --max-dimension to raise it",
                dipole.map_or("*".to_string(), |p| p.to_string())
            )));
        }
        let (partition, _) = decompose_cached(cache.as_ref(), m, &sector)?;
        rows.push(TableRow {
            model: m.name.clone(),
            n,
            metrics: partition.metrics()?,
        });
    }
    let mut params = model_params(m);
    params.insert("L".into(), json!(lengths));
    params.insert("totalSpin".into(), json!(total_spin));
    params.insert("dipole".into(), json!(dipole));

    let body = match format {
        TableFormat::Table => {
            let mut s = format!("{:<10} {:>4} {:>8} {:>10} {:>10} {:>10}\n", "model", "N", "r", "S_f", "Dmax/Dt", "D_t");
            for r in &rows {
                s.push_str(&format!(
                    "{:<10} {:>4} {:>8} {:>10} {:>10} {:>10}\n",
                    r.model,
                    r.n,
                    r.metrics.r,
                    sig6(r.metrics.sf),
                    sig6(r.metrics.dmax_over_dt),
                    r.metrics.dt
                ));
            }
            s
        }
        TableFormat::Csv => {
            let mut s = String::from("model,N,r,Sf,DmaxOverDt,Dt\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.model, r.n, r.metrics.r, r.metrics.sf, r.metrics.dmax_over_dt, r.metrics.dt
                ));
            }
            s
        }
        TableFormat::Json => {
            let data = serde_json::to_value(&rows).map_err(Error::from)?;
            let mut buf = Vec::new();
            emit_json("sectors", params.clone(), data, &mut buf)?;
            String::from_utf8(buf).expect("json is utf-8")
        }
    };
    match path {
        Some(p) => {
            fs::write(p, &body)?;
            let manifest = RunManifest::new("sectors", params, body.as_bytes());
            let mpath = manifest_path(p);
            fs::write(&mpath, to_pretty(&manifest)?)?;
            writeln!(out, "wrote {} and {}", p.display(), mpath.display())?;
        }
        None => out.write_all(body.as_bytes())?,
    }
    Ok(EXIT_OK)
}

fn to_pretty<T: Serialize>(v: &T) -> std::result::Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

fn manifest_path(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn parse_cuts(text: &str, len: usize) -> std::result::Result<Vec<usize>, Failure> {
    if text.trim() == "all" {
        return Ok((1..len).collect());
    }
    text.split(',')
        .map(|c| match c.trim().parse::<usize>() {
            Ok(c) if c >= 1 && c < len => Ok(c),
            _ => Err(Failure::Usage(format!("cut `{c}` must be an integer in 1..{}", len.saturating_sub(1)))),
        })
        .collect()
}

fn evolve(
    m: &ModelSpec,
    init: &str,
    tmax: f64,
    dt: f64,
    cuts: &str,
    prefix: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    let initial = SpinConfig::parse(m.alphabet, init)?;
    let cuts = parse_cuts(cuts, initial.len())?;
    let times = time_grid(tmax, dt)?;
    let result = simulate(m, &initial, &times)?;
    writeln!(out, "D={}", result.dimension())?;

    let mut entropy = String::from("time,cut,entropy\n");
    for (t, row) in result.times.iter().zip(&result.entropies) {
        for &c in &cuts {
            entropy.push_str(&format!("{t},{c},{}\n", row[c - 1]));
        }
    }
    let charge = result.charge_csv();

    let Some(prefix) = prefix else {
        let last = result.entropies.last().cloned().unwrap_or_default();
        let shown: Vec<String> = cuts.iter().map(|&c| sig6(last[c - 1])).collect();
        writeln!(out, "S_E at t={}: {}", sig6(*times.last().unwrap_or(&0.0)), shown.join(" "))?;
        return Ok(EXIT_OK);
    };
    let mut params = model_params(m);
    params.insert("init".into(), json!(initial.to_string()));
    params.insert("tmax".into(), json!(tmax));
    params.insert("dt".into(), json!(dt));
    params.insert("cuts".into(), json!(cuts));

    let epath = with_suffix(prefix, "_entropy.csv");
    let cpath = with_suffix(prefix, "_charge.csv");
    let jpath = with_suffix(prefix, ".json");
    fs::write(&epath, &entropy)?;
    fs::write(&cpath, &charge)?;
    let data = json!({
        "classId": result.basis.first().map(|c| c.rank()),
        "dimension": result.dimension(),
        "basis": result.basis,
        "times": result.times,
        "cuts": cuts,
        "entropies": result.entropies,
        "charges": result.charges,
    });
    let mut buf = Vec::new();
    emit_json("evolve", params.clone(), data, &mut buf)?;
    fs::write(&jpath, &buf)?;
    let mut payload = entropy.into_bytes();
    payload.extend_from_slice(charge.as_bytes());
    let manifest = RunManifest::new("evolve", params, &payload);
    let mpath = with_suffix(prefix, ".manifest.json");
    fs::write(&mpath, to_pretty(&manifest)?)?;
    for p in [&epath, &cpath, &jpath, &mpath] {
        writeln!(out, "wrote {}", p.display())?;
    }
    Ok(EXIT_OK)
}

fn project(m: &ModelSpec, length: usize, format: Format, out: &mut dyn Write) -> Outcome {
    let p = project_to_core(m, length)?;
    let code = if p.protects_core() { EXIT_OK } else { EXIT_NEGATIVE };
    match format {
        Format::Json => {
            let mut params = model_params(m);
            params.insert("L".into(), json!(length));
            let data = json!({
                "protectsCore": p.protects_core(),
                "chargeAlphabet": p.charge_alphabet.to_string(),
                "context": {"left": p.context.0, "right": p.context.1},
                "rules": p.rule_strings(),
                "violations": p.violations.iter().take(20).collect::<Vec<_>>(),
                "violationCount": p.violations.len(),
            });
            emit_json("project-core", params, data, out)?;
        }
        Format::Text if p.protects_core() => {
            writeln!(out, "model: {} on the core subspace (L={length}, charges {})", m.name, p.charge_alphabet)?;
            writeln!(out, "context: {} left, {} right", p.context.0, p.context.1)?;
            for r in p.rule_strings() {
                writeln!(out, "{r}")?;
            }
        }
        Format::Text => {
            writeln!(out, "model: {} does not protect the core subspace (L={length})", m.name)?;
            writeln!(out, "{} move(s) leave the core, for example:", p.violations.len())?;
            for v in p.violations.iter().take(5) {
                writeln!(out, "  {} -> {} at site {}", v.state, v.image, v.site)?;
            }
        }
    }
    Ok(code)
}

fn path(config: &str, q: usize, spin: u8, format: Format, out: &mut dyn Write) -> Outcome {
    if q == 0 {
        return Err(Failure::Usage("--q must be positive".into()));
    }
    let config = SpinConfig::parse(Alphabet::spin(spin)?, config)?;
    let path = to_path(&config);
    let labels = regional_extrema(&path, q);
    let core = core_orientation(&config);
    match format {
        Format::Json => {
            let params = BTreeMap::from([
                ("config".to_string(), json!(config.to_string())),
                ("q".to_string(), json!(q)),
                ("spin".to_string(), json!(spin)),
            ]);
            let data = json!({
                "heights": path,
                "labels": labels,
                "core": core == Some(CoreOrientation::Direct),
                "coreOrientation": core,
            });
            emit_json("path", params, data, out)?;
        }
        Format::Text => {
            let heights: Vec<String> = path.heights().iter().map(|h| h.to_string()).collect();
            writeln!(out, "heights: {}", heights.join(","))?;
            if labels.is_empty() {
                writeln!(out, "labels: none")?;
            } else {
                let shown: Vec<String> = labels
                    .iter()
                    .map(|l| {
                        let kind = match l.kind {
                            Extremum::Peak => "peak",
                            Extremum::Valley => "valley",
                        };
                        format!("{kind} {} at {}", l.height, l.doubled_position() as f64 / 2.0)
                    })
                    .collect();
                writeln!(out, "labels: {}", shown.join("; "))?;
            }
            let core_text = match core {
                Some(CoreOrientation::Direct) => "true",
                Some(CoreOrientation::Flipped) => "false (its spin flip is core)",
                None => "false",
            };
            writeln!(out, "core: {core_text}")?;
        }
    }
    Ok(EXIT_OK)
}
