//! Pipeline CLI: gen | render | probe | build-trfp | train | route | eval |
//! report. All randomness flows from a single --seed; in simulation mode two
//! identical invocations produce byte-identical artifacts.

use std::collections::HashMap;
use std::io::{BufRead as _, BufReader, BufWriter, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng as _;
use serde::{Deserialize, Serialize};

use graphtrf::client::{Client, HttpClient, HttpConfig, SimCell, SimClient, SimProfile};
use graphtrf::error::{Error, Result};
use graphtrf::graph::{
    gen_attributed_instance, gen_qa_instance, read_instances, write_instances, GenConfig, TaskKind,
};
use graphtrf::journal::{build_trfp, frequency_table, probe_question, read_trfp, write_trfp, Journal};
use graphtrf::manifest::RunManifest;
use graphtrf::metrics::GreParams;
use graphtrf::render::{assemble_prompt, Rasterizer};
use graphtrf::report::{eval_report_tsv, eval_strategies, pretty};
use graphtrf::router::{self, Hyper};
use graphtrf::trf::TrfKind;

#[derive(Parser)]
#[command(name = "graphtrf", version, about = "Zero-shot graph QA with dynamic TRF routing")]
struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for every random choice in the pipeline.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate QA instances with construction-time gold answers.
    Gen(GenArgs),
    /// Render prompts (and optionally images) for inspection.
    Render(RenderArgs),
    /// Probe a model over all 8 TRFs, k runs each, into a resumable journal.
    Probe(ProbeArgs),
    /// Label questions from a probe journal into the TRF-preference dataset.
    BuildTrfp(BuildTrfpArgs),
    /// Train the multi-label TRF router on a TRFP dataset.
    Train(TrainArgs),
    /// Emit per-question TRF probabilities and choices for a router model.
    Route(RouteArgs),
    /// Probe an evaluation set (default k=3) to score routing strategies.
    Eval(ProbeArgs),
    /// Summarize an evaluation journal as a TSV report.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Comma-separated task names; defaults to the 7 in-domain tasks.
    #[arg(long)]
    tasks: Option<String>,
    /// Instances per task.
    #[arg(long, default_value_t = 1000)]
    count: usize,
    /// Class count for NC instances.
    #[arg(long, default_value_t = 3)]
    classes: usize,
    #[arg(long, default_value = "instances.jsonl")]
    out: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    instances: PathBuf,
    /// Comma-separated TRF names; defaults to all 8.
    #[arg(long)]
    trfs: Option<String>,
    #[arg(long)]
    cot: bool,
    /// Also rasterize visual TRFs to PNG (requires an external renderer).
    #[arg(long)]
    rasterize: bool,
    #[arg(long, default_value = "rendered")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long)]
    instances: PathBuf,
    #[arg(long)]
    journal: PathBuf,
    /// Runs per (question, TRF); defaults to 10 for probe, 3 for eval.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Simulation profile TOML; switches to the simulated backend.
    #[arg(long)]
    sim: Option<PathBuf>,
    /// Append the chain-of-thought suffix to every prompt.
    #[arg(long)]
    cot: bool,
}

#[derive(Args)]
struct BuildTrfpArgs {
    #[arg(long)]
    instances: PathBuf,
    #[arg(long)]
    journal: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value = "trfp.jsonl")]
    out: PathBuf,
    /// Per-task ranked TRF-preference frequency table.
    #[arg(long, default_value = "trf_frequency.tsv")]
    freq: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    trfp: PathBuf,
    #[arg(long, default_value = "router.json")]
    out: PathBuf,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    l2: Option<f64>,
}

#[derive(Args)]
struct RouteArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    instances: PathBuf,
    #[arg(long, default_value = "router_predictions.jsonl")]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    instances: PathBuf,
    #[arg(long)]
    journal: PathBuf,
    /// Router predictions file from `route`.
    #[arg(long)]
    routes: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value = "report.tsv")]
    out: PathBuf,
    /// Also print an aligned table to stdout.
    #[arg(long)]
    pretty: bool,
}

#[derive(Debug, Clone, Default, Deserialize)]
struct FileConfig {
    #[serde(default)]
    client: ClientConfig,
    #[serde(default)]
    gre: GreConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
struct ClientConfig {
    /// "sim" or "http".
    mode: String,
    base_url: String,
    model: String,
    temperature: f64,
    sim_profile: Option<PathBuf>,
    renderer: String,
    cache_dir: PathBuf,
}

impl Default for ClientConfig {
    fn default() -> ClientConfig {
        ClientConfig {
            mode: "sim".to_string(),
            base_url: "https://api.openai.com/v1".to_string(),
            model: "gpt-4o".to_string(),
            temperature: 0.7,
            sim_profile: None,
            renderer: "dot".to_string(),
            cache_dir: PathBuf::from(".graphtrf-cache"),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
struct GreConfig {
    alpha: f64,
    probe_k: usize,
    eval_k: usize,
}

impl Default for GreConfig {
    fn default() -> GreConfig {
        GreConfig { alpha: 0.5, probe_k: 10, eval_k: 3 }
    }
}

fn load_config(path: Option<&Path>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read config {}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| Error::Toml(e.to_string()))
        }
    }
}

/// The per-question routing interchange format: probabilities for all 8
/// TRFs plus the argmax choice. An externally trained router can produce
/// this file and plug into `report` unchanged.
#[derive(Debug, Serialize, Deserialize)]
struct RoutePrediction {
    question_id: String,
    probs: std::collections::BTreeMap<TrfKind, f64>,
    choice: TrfKind,
}

fn read_routes(path: &Path) -> Result<HashMap<String, TrfKind>> {
    let file = std::fs::File::open(path).map_err(|_| Error::MissingArtifact {
        path: path.display().to_string(),
        producer: "route".to_string(),
    })?;
    let mut out = HashMap::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let pred: RoutePrediction = serde_json::from_str(&line)?;
        out.insert(pred.question_id, pred.choice);
    }
    Ok(out)
}

fn parse_tasks(spec: Option<&str>) -> Result<Vec<TaskKind>> {
    match spec {
        None => Ok(TaskKind::IN_DOMAIN.to_vec()),
        Some(s) => s
            .split(',')
            .map(|name| {
                TaskKind::parse(name.trim())
                    .ok_or_else(|| Error::Config(format!("unknown task `{name}`")))
            })
            .collect(),
    }
}

fn parse_trfs(spec: Option<&str>) -> Result<Vec<TrfKind>> {
    match spec {
        None => Ok(TrfKind::ALL.to_vec()),
        Some(s) => s
            .split(',')
            .map(|name| {
                TrfKind::parse(name.trim())
                    .ok_or_else(|| Error::Config(format!("unknown TRF `{name}`")))
            })
            .collect(),
    }
}

fn make_client(
    args_sim: Option<&Path>,
    config: &FileConfig,
    seed: u64,
) -> Result<Box<dyn Client>> {
    let sim_path = args_sim.or(config.client.sim_profile.as_deref());
    if config.client.mode == "sim" || sim_path.is_some() {
        let profile = match sim_path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    Error::Config(format!("cannot read sim profile {}: {e}", p.display()))
                })?;
                SimProfile::parse(&text)?
            }
            None => SimProfile::uniform(SimCell {
                accuracy_p: 0.9,
                token_mean: 40.0,
                token_spread: 10.0,
            }),
        };
        return Ok(Box::new(SimClient::new(profile, seed)));
    }
    if config.client.mode != "http" {
        return Err(Error::Config(format!(
            "client.mode must be `sim` or `http`, got `{}`",
            config.client.mode
        )));
    }
    // The key lives only in the environment so manifests stay shareable.
    let api_key = std::env::var("GRAPHTRF_API_KEY")
        .map_err(|_| Error::Config("GRAPHTRF_API_KEY is not set (required for http mode)".into()))?;
    let http = HttpConfig {
        base_url: config.client.base_url.clone(),
        api_key,
        model: config.client.model.clone(),
        temperature: config.client.temperature,
    };
    let rasterizer = Rasterizer::new(config.client.renderer.clone(), &config.client.cache_dir);
    Ok(Box::new(HttpClient::new(http, rasterizer)))
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn cmd_gen(args: &GenArgs, seed: u64) -> Result<()> {
    let tasks = parse_tasks(args.tasks.as_deref())?;
    let config = GenConfig { seed, ..GenConfig::default() };
    let mut instances = Vec::with_capacity(tasks.len() * args.count);
    for &task in &tasks {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ (task.index() as u64) << 32);
        for nonce in 0..args.count {
            let inst = match task {
                TaskKind::Lp | TaskKind::Nc => {
                    gen_attributed_instance(task, &config, args.classes, nonce as u64, &mut rng)?
                }
                _ => gen_qa_instance(task, &config, nonce as u64, &mut rng)?,
            };
            instances.push(inst);
        }
    }
    write_instances(&args.out, &instances)?;

    let mut manifest = RunManifest::new("gen", seed);
    manifest.config_entry("tasks", tasks.iter().map(|t| t.name()).collect::<Vec<_>>().join(","));
    manifest.config_entry("count", args.count);
    manifest.config_entry("classes", args.classes);
    manifest.record_output(&args.out)?;
    manifest.save(manifest_path(&args.out))?;
    eprintln!("wrote {} instances to {}", instances.len(), args.out.display());
    Ok(())
}

fn cmd_render(args: &RenderArgs, config: &FileConfig) -> Result<()> {
    let instances = read_instances(&args.instances)?;
    let trfs = parse_trfs(args.trfs.as_deref())?;
    std::fs::create_dir_all(&args.out_dir)?;
    let rasterizer =
        Rasterizer::new(config.client.renderer.clone(), args.out_dir.join(".png-cache"));
    for inst in &instances {
        for &trf in &trfs {
            let prompt = assemble_prompt(inst, trf, args.cot)?;
            let stem = format!("{}_{}", inst.id, trf);
            std::fs::write(args.out_dir.join(format!("{stem}.txt")), prompt.user_text())?;
            if let Some(dot) = &prompt.dot_source {
                std::fs::write(args.out_dir.join(format!("{stem}.dot")), dot)?;
                if args.rasterize {
                    let png = rasterizer.rasterize(dot)?;
                    std::fs::write(args.out_dir.join(format!("{stem}.png")), png)?;
                }
            }
        }
    }
    eprintln!("rendered {} instances x {} TRFs into {}", instances.len(), trfs.len(),
              args.out_dir.display());
    Ok(())
}

fn cmd_probe(args: &ProbeArgs, config: &FileConfig, seed: u64, default_k: usize) -> Result<()> {
    let instances = read_instances(&args.instances)?;
    let client = make_client(args.sim.as_deref(), config, seed)?;
    let k = args.k.unwrap_or(default_k);
    let params = GreParams {
        alpha: args.alpha.unwrap_or(config.gre.alpha),
        temperature: config.client.temperature,
        ..GreParams::default()
    };
    let mut journal = Journal::open(&args.journal)?;
    for inst in &instances {
        probe_question(&mut journal, client.as_ref(), inst, &params, k, args.cot)?;
    }

    let mut manifest = RunManifest::new("probe", seed);
    manifest.config_entry("k", k);
    manifest.config_entry("alpha", params.alpha);
    manifest.config_entry("cot", args.cot);
    manifest.record_input(&args.instances)?;
    manifest.record_output(&args.journal)?;
    manifest.save(manifest_path(&args.journal))?;
    eprintln!("journal {} holds {} records", args.journal.display(), journal.record_count());
    Ok(())
}

fn cmd_build_trfp(args: &BuildTrfpArgs, config: &FileConfig, seed: u64) -> Result<()> {
    let instances = read_instances(&args.instances)?;
    if !args.journal.exists() {
        return Err(Error::MissingArtifact {
            path: args.journal.display().to_string(),
            producer: "probe".to_string(),
        });
    }
    let journal = Journal::open(&args.journal)?;
    let params = GreParams {
        alpha: args.alpha.unwrap_or(config.gre.alpha),
        probe_k: args.k.unwrap_or(config.gre.probe_k),
        ..GreParams::default()
    };
    let examples = build_trfp(&journal, &instances, &params)?;
    write_trfp(&args.out, &examples)?;
    std::fs::write(&args.freq, frequency_table(&examples))?;

    let mut manifest = RunManifest::new("build-trfp", seed);
    manifest.config_entry("k", params.probe_k);
    manifest.config_entry("alpha", params.alpha);
    manifest.record_input(&args.instances)?;
    manifest.record_input(&args.journal)?;
    manifest.record_output(&args.out)?;
    manifest.record_output(&args.freq)?;
    manifest.save(manifest_path(&args.out))?;
    eprintln!("wrote {} TRFP examples to {}", examples.len(), args.out.display());
    Ok(())
}

fn cmd_train(args: &TrainArgs, seed: u64) -> Result<()> {
    if !args.trfp.exists() {
        return Err(Error::MissingArtifact {
            path: args.trfp.display().to_string(),
            producer: "build-trfp".to_string(),
        });
    }
    let examples = read_trfp(&args.trfp)?;
    let defaults = Hyper::default();
    let hyper = Hyper {
        lr: args.lr.unwrap_or(defaults.lr),
        epochs: args.epochs.unwrap_or(defaults.epochs),
        batch: args.batch.unwrap_or(defaults.batch),
        l2: args.l2.unwrap_or(defaults.l2),
        seed,
    };
    let model = router::train(&examples, hyper)?;
    router::save_model(&args.out, &model)?;

    let mut manifest = RunManifest::new("train", seed);
    manifest.config_entry("lr", hyper.lr);
    manifest.config_entry("epochs", hyper.epochs);
    manifest.config_entry("batch", hyper.batch);
    manifest.config_entry("l2", hyper.l2);
    manifest.record_input(&args.trfp)?;
    manifest.record_output(&args.out)?;
    manifest.save(manifest_path(&args.out))?;
    eprintln!(
        "trained router on {} examples; final loss {:.6}",
        examples.len(),
        model.loss_curve.last().unwrap()
    );
    Ok(())
}

fn cmd_route(args: &RouteArgs, seed: u64) -> Result<()> {
    let model = router::load_model(&args.model)?;
    let instances = read_instances(&args.instances)?;
    let mut w = BufWriter::new(std::fs::File::create(&args.out)?);
    for inst in &instances {
        let probs = router::predict(&model, &router::featurize(inst))?;
        let choice = router::argmax_trf(&probs);
        let pred = RoutePrediction {
            question_id: inst.id.clone(),
            probs: TrfKind::ALL.iter().map(|&t| (t, probs[t.index()])).collect(),
            choice,
        };
        serde_json::to_writer(&mut w, &pred)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;

    let mut manifest = RunManifest::new("route", seed);
    manifest.record_input(&args.model)?;
    manifest.record_input(&args.instances)?;
    manifest.record_output(&args.out)?;
    manifest.save(manifest_path(&args.out))?;
    eprintln!("wrote {} predictions to {}", instances.len(), args.out.display());
    Ok(())
}

fn cmd_report(args: &ReportArgs, config: &FileConfig, seed: u64) -> Result<()> {
    let instances = read_instances(&args.instances)?;
    if !args.journal.exists() {
        return Err(Error::MissingArtifact {
            path: args.journal.display().to_string(),
            producer: "eval".to_string(),
        });
    }
    let journal = Journal::open(&args.journal)?;
    let routes = read_routes(&args.routes)?;
    let k = args.k.unwrap_or(config.gre.eval_k);
    let alpha = args.alpha.unwrap_or(config.gre.alpha);

    let outcomes = eval_strategies(&journal, &instances, &routes, k, alpha)?;
    let ids: Vec<String> = instances.iter().map(|i| i.id.clone()).collect();
    let pareto = router::verify_pareto(&journal, &ids, k, alpha)?;
    let tsv = eval_report_tsv(&outcomes, Some(&pareto));
    std::fs::write(&args.out, &tsv)?;
    if args.pretty {
        print!("{}", pretty(&tsv));
    }

    let mut manifest = RunManifest::new("report", seed);
    manifest.config_entry("k", k);
    manifest.config_entry("alpha", alpha);
    manifest.record_input(&args.instances)?;
    manifest.record_input(&args.journal)?;
    manifest.record_input(&args.routes)?;
    manifest.record_output(&args.out)?;
    manifest.save(manifest_path(&args.out))?;
    eprintln!("wrote report to {}", args.out.display());
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let config = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::Gen(args) => cmd_gen(args, cli.seed),
        Command::Render(args) => cmd_render(args, &config),
        Command::Probe(args) => cmd_probe(args, &config, cli.seed, config.gre.probe_k),
        Command::Eval(args) => cmd_probe(args, &config, cli.seed, config.gre.eval_k),
        Command::BuildTrfp(args) => cmd_build_trfp(args, &config, cli.seed),
        Command::Train(args) => cmd_train(args, cli.seed),
        Command::Route(args) => cmd_route(args, cli.seed),
        Command::Report(args) => cmd_report(args, &config, cli.seed),
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Toml(_) => 2,
        Error::MissingArtifact { .. } | Error::IncompleteJournal { .. } => 3,
        Error::Auth(_)
        | Error::RateLimited(_)
        | Error::Transport(_)
        | Error::MalformedResponse(_)
        | Error::RendererMissing(_)
        | Error::RenderFailed { .. }
        | Error::ProfileMissing { .. } => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
