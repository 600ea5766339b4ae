//! Command-line front end.
//!
//! Every option can come from a flag or from a `key = value` file passed with
//! `--config`, where keys are the long flag names. Flags win over the file,
//! and the file wins over built-in defaults.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::corpus::{
    gender_marginals, load_count_table, load_gender_lexicon, Gender, GenderLexicon, Ingest, InputFormat, Relation,
};
use crate::error::{Error, Result};
use crate::eval::{
    all_lists, correlate_judgments, load_judgments, load_labels, permutation_test, sense_difference_suite,
    sentiment_frequency,
};
use crate::lexicons::{load_sense_inventory, load_sentiment_lexicon, SenseKind, SentimentPrior};
use crate::model::{grid_train_average, Checkpoint, FeatureSpace, GridSpec, Instance, ModelParams, TrainConfig};
use crate::pmi::{prop1_check, GenderCollapsedTable, RestrictedConfig};
use crate::synth::{generate, SynthConfig};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const DEFAULT_ALPHAS: &str = "0,1e-5,1e-4,0.001,0.01";
const DEFAULT_BETAS: &str = "1e-5,1e-4,0.001,0.01,0.1,1,10,100";

#[derive(Debug, Parser)]
#[command(
    name = "genlang",
    version,
    about = "Quantify gendered language in dependency-parsed corpora"
)]
pub struct Cli {
    /// `key = value` file supplying defaults for any long flag
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Aggregate arcs or canonical files into per-relation count tables
    Ingest(IngestArgs),
    /// Train the model over a hyperparameter grid and average the runs
    Train(TrainArgs),
    /// Write a TSV report
    #[command(subcommand)]
    Report(Report),
    /// Generate a planted-truth corpus
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Input files (arcs or canonical TSV)
    #[arg(long = "input", num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Input format; detected from the first line when omitted
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub gender_lexicon: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Canonical count table
    #[arg(long)]
    pub counts: Option<PathBuf>,
    #[arg(long)]
    pub relation: Option<Relation>,
    #[arg(long)]
    pub gender_lexicon: Option<PathBuf>,
    #[arg(long)]
    pub sentiment_lexicon: Option<PathBuf>,
    /// Comma-separated L1 weights
    #[arg(long)]
    pub alpha_grid: Option<String>,
    /// Comma-separated posterior-regularization weights
    #[arg(long)]
    pub beta_grid: Option<String>,
    /// 3 for latent sentiment, 1 for the sentiment-free model
    #[arg(long)]
    pub sentiments: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid cells trained concurrently
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Report {
    /// Largest-deviation neighbors per gender and sentiment
    Topk(TopkArgs),
    /// PMI of every neighbor with each gender
    Pmi(PmiArgs),
    /// Sense-frequency permutation tests
    Senses(SensesArgs),
    /// Prior sentiment of male and female lists from sentiment-free models
    Sentiment(SentimentArgs),
    /// Correlation of model femaleness with human judgments
    Correlate(CorrelateArgs),
    /// Permutation test on two samples
    Permtest(PermtestArgs),
    /// Restricted-model fit compared against PMI
    Prop1(PmiArgs),
}

#[derive(Debug, Args)]
pub struct TopkArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Output file; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PmiArgs {
    #[arg(long)]
    pub counts: Option<PathBuf>,
    #[arg(long)]
    pub relation: Option<Relation>,
    #[arg(long)]
    pub gender_lexicon: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SensesArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Sense inventory TSV
    #[arg(long)]
    pub senses: Option<PathBuf>,
    /// `adj` or `verb`; follows the model's relation when omitted
    #[arg(long)]
    pub kind: Option<SenseKind>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub permutations: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SentimentArgs {
    /// Sentiment-free checkpoints, one per relation
    #[arg(long = "model", num_args = 1..)]
    pub models: Vec<PathBuf>,
    #[arg(long)]
    pub sentiment_lexicon: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub permutations: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// `word<TAB>score` annotations
    #[arg(long)]
    pub judgments: Option<PathBuf>,
    /// `word<TAB>m|f` annotations
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub permutations: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Per-word femaleness and score differences
    #[arg(long)]
    pub audit: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PermtestArgs {
    /// File of numbers for group A
    #[arg(long)]
    pub a: Option<PathBuf>,
    /// File of numbers for group B
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long)]
    pub permutations: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub vocab_size: Option<usize>,
    /// Expected number of collocation tokens
    #[arg(long)]
    pub tokens: Option<f64>,
    /// Weight moved onto the body sense of female-leaning positive words
    #[arg(long)]
    pub effect: Option<f64>,
    /// Extra probability that a female-leaning word is positive
    #[arg(long)]
    pub fem_positive: Option<f64>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Values read from a `--config` file.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::parse(origin, i + 1, "expected `key = value`"));
            };
            values.insert(k.trim().replace('_', "-"), v.trim().to_string());
        }
        Ok(Settings { values })
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Settings::default()),
            Some(p) => Self::parse(&fs::read_to_string(p).map_err(|e| Error::io(p, e))?, p),
        }
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.values
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::InvalidArgument(format!("config value for `{key}` is invalid: `{v}`")))
            })
            .transpose()
    }

    /// The flag if given, else the config value.
    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    fn or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }

    fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T> {
        self.pick(flag, key)?
            .ok_or_else(|| Error::InvalidArgument(format!("missing required option --{key}")))
    }

    fn paths(&self, flag: Vec<PathBuf>, key: &str) -> Vec<PathBuf> {
        if !flag.is_empty() {
            return flag;
        }
        self.values
            .get(key)
            .map(|v| {
                v.split(',')
                    .map(|p| PathBuf::from(p.trim()))
                    .filter(|p| !p.as_os_str().is_empty())
                    .collect()
            })
            .unwrap_or_default()
    }
}

fn parse_grid(text: &str, name: &str) -> Result<Vec<f64>> {
    let values = text
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::InvalidArgument(format!("{name} must be a comma-separated list of numbers")))?;
    if values.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "{name} values must be finite and non-negative"
        )));
    }
    Ok(values)
}

fn gender_lexicon(path: Option<PathBuf>) -> Result<GenderLexicon> {
    match path {
        Some(p) => load_gender_lexicon(p),
        None => Ok(GenderLexicon::bundled()),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes a report to `out`, or to stdout when no path is given.
fn emit(out: Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_file(&p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_model(path: &Path) -> Result<(Checkpoint, ModelParams, Instance)> {
    let ck = Checkpoint::load(path)?;
    let params = ck.params()?;
    let inst = ck.instance()?;
    Ok((ck, params, inst))
}

pub fn cmd_ingest(args: IngestArgs, cfg: &Settings) -> Result<()> {
    let inputs = cfg.paths(args.input, "input");
    if inputs.is_empty() {
        return Err(Error::InvalidArgument("missing required option --input".into()));
    }
    let format = match cfg.pick(args.format, "format")? {
        None => None,
        Some(f) => Some(match f.as_str() {
            "arcs" => InputFormat::Arcs,
            "canonical" => InputFormat::Canonical,
            other => return Err(Error::InvalidArgument(format!("unknown format `{other}`"))),
        }),
    };
    let lex = gender_lexicon(cfg.pick(args.gender_lexicon, "gender-lexicon")?)?;
    let out: PathBuf = cfg.require(args.out, "out")?;

    let mut ingest = Ingest::new();
    for path in &inputs {
        ingest.file(path, format, &lex)?;
    }
    if ingest.is_empty() {
        return Err(Error::EmptyTable);
    }
    create_dir(&out)?;
    let mut stats = String::new();
    writeln!(stats, "lines\t{}", ingest.lines).unwrap();
    writeln!(stats, "records\t{}", ingest.records).unwrap();
    writeln!(stats, "malformed\t{}", ingest.malformed).unwrap();
    for relation in Relation::ALL {
        let Some(table) = ingest.table(relation) else {
            log::warn!("no {relation} collocations in the input");
            continue;
        };
        table.write_canonical(out.join(format!("counts.{relation}.tsv")))?;
        writeln!(stats, "{relation}.pairs\t{}", table.cells().len()).unwrap();
        writeln!(stats, "{relation}.tokens\t{}", table.total()).unwrap();
        for (g, total) in gender_marginals(&table, &lex) {
            writeln!(stats, "{relation}.{g}\t{total}").unwrap();
        }
    }
    write_file(&out.join("ingest_stats.tsv"), &stats)?;
    log::info!(
        "ingested {} lines ({} malformed) into {}",
        ingest.lines,
        ingest.malformed,
        out.display()
    );
    Ok(())
}

pub fn cmd_train(args: TrainArgs, cfg: &Settings) -> Result<()> {
    let counts: PathBuf = cfg.require(args.counts, "counts")?;
    let relation = cfg.or(args.relation, "relation", Relation::Amod)?;
    let lex = gender_lexicon(cfg.pick(args.gender_lexicon, "gender-lexicon")?)?;
    let alphas = parse_grid(
        &cfg.or(args.alpha_grid, "alpha-grid", DEFAULT_ALPHAS.to_string())?,
        "alpha-grid",
    )?;
    let betas = parse_grid(
        &cfg.or(args.beta_grid, "beta-grid", DEFAULT_BETAS.to_string())?,
        "beta-grid",
    )?;
    let defaults = TrainConfig::default();
    let base = TrainConfig {
        num_sentiments: cfg.or(args.sentiments, "sentiments", defaults.num_sentiments)?,
        learning_rate: cfg.or(args.learning_rate, "learning-rate", defaults.learning_rate)?,
        max_iterations: cfg.or(args.max_iterations, "max-iterations", defaults.max_iterations)?,
        tolerance: cfg.or(args.tolerance, "tolerance", defaults.tolerance)?,
        seed: cfg.or(args.seed, "seed", defaults.seed)?,
        ..defaults
    };
    base.validate()?;
    let jobs = cfg.or(
        args.jobs,
        "jobs",
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    )?;
    let out: PathBuf = cfg.require(args.out, "out")?;

    let prior: Option<SentimentPrior> = match cfg.pick(args.sentiment_lexicon, "sentiment-lexicon")? {
        Some(p) => Some(load_sentiment_lexicon(p)?),
        None if base.num_sentiments == 3 && betas.iter().any(|&b| b > 0.0) => {
            return Err(Error::InvalidArgument(
                "--sentiment-lexicon is required when a beta is positive".into(),
            ))
        }
        None => None,
    };
    let table = load_count_table(&counts, relation)?;
    table.validate(&lex)?;
    let space = FeatureSpace::from_lexicon(&lex);
    let inst = Instance::new(&table, &lex, &space, prior.as_ref())?;
    log::info!(
        "training {} cells on {} neighbors x {} nouns ({} tokens)",
        alphas.len() * betas.len(),
        inst.num_neighbors(),
        inst.num_nouns(),
        table.total()
    );
    let grid = grid_train_average(&inst, &alphas, &betas, &base, jobs)?;

    create_dir(&out)?;
    let mut summary = String::from("cell\talpha\tbeta\titerations\trejected\tconverged\tobjective\n");
    for (i, cell) in grid.cells.iter().enumerate() {
        let cell_cfg = TrainConfig {
            alpha: cell.alpha,
            beta: cell.beta,
            ..base.clone()
        };
        Checkpoint::new(&cell.outcome.params, &inst, &cell_cfg, None).save(out.join(format!("cell-{i:02}.json")))?;
        let trace: String = cell
            .outcome
            .trace
            .iter()
            .enumerate()
            .map(|(step, obj)| format!("{step}\t{obj}\n"))
            .collect();
        write_file(
            &out.join(format!("trace-{i:02}.tsv")),
            &format!("step\tobjective\n{trace}"),
        )?;
        writeln!(
            summary,
            "{i}\t{}\t{}\t{}\t{}\t{}\t{}",
            cell.alpha,
            cell.beta,
            cell.outcome.iterations,
            cell.outcome.rejected,
            cell.outcome.converged,
            cell.outcome.trace.last().unwrap()
        )
        .unwrap();
        if !cell.outcome.converged {
            log::warn!("cell alpha={} beta={} hit the iteration cap", cell.alpha, cell.beta);
        }
    }
    write_file(&out.join("grid.tsv"), &summary)?;
    Checkpoint::new(&grid.average, &inst, &base, Some(GridSpec { alphas, betas })).save(out.join("model.json"))?;
    log::info!("wrote {}", out.join("model.json").display());
    Ok(())
}

pub fn cmd_report(report: Report, cfg: &Settings) -> Result<()> {
    match report {
        Report::Topk(a) => report_topk(a, cfg),
        Report::Pmi(a) => report_pmi(a, cfg),
        Report::Senses(a) => report_senses(a, cfg),
        Report::Sentiment(a) => report_sentiment(a, cfg),
        Report::Correlate(a) => report_correlate(a, cfg),
        Report::Permtest(a) => report_permtest(a, cfg),
        Report::Prop1(a) => report_prop1(a, cfg),
    }
}

const DEFAULT_K: usize = 200;
const DEFAULT_PERMUTATIONS: usize = 100_000;

fn report_topk(args: TopkArgs, cfg: &Settings) -> Result<()> {
    let model: PathBuf = cfg.require(args.model, "model")?;
    let k = cfg.or(args.k, "k", DEFAULT_K)?;
    let (_, params, inst) = load_model(&model)?;
    let mut out = String::from("gender\tsentiment\trank\tneighbor\tscore\n");
    for list in all_lists(&params, &inst, k)? {
        for (rank, (word, score)) in list.entries.iter().enumerate() {
            writeln!(out, "{}\t{}\t{}\t{word}\t{score}", list.gender, list.slot, rank + 1).unwrap();
        }
    }
    emit(cfg.pick(args.out, "out")?, &out)
}

fn collapsed_table(args: &PmiArgs, cfg: &Settings) -> Result<GenderCollapsedTable> {
    let counts: PathBuf = cfg.require(args.counts.clone(), "counts")?;
    let relation = cfg.or(args.relation, "relation", Relation::Amod)?;
    let lex = gender_lexicon(cfg.pick(args.gender_lexicon.clone(), "gender-lexicon")?)?;
    GenderCollapsedTable::from_table(&load_count_table(counts, relation)?, &lex)
}

fn report_pmi(args: PmiArgs, cfg: &Settings) -> Result<()> {
    let table = collapsed_table(&args, cfg)?;
    let mut out = String::from("gender\tneighbor\tpmi\n");
    for g in Gender::ALL {
        for (word, pmi) in table.ranked_pmi(g) {
            writeln!(out, "{g}\t{word}\t{pmi}").unwrap();
        }
    }
    emit(cfg.pick(args.out, "out")?, &out)
}

fn report_prop1(args: PmiArgs, cfg: &Settings) -> Result<()> {
    let table = collapsed_table(&args, cfg)?;
    let report = prop1_check(&table, &RestrictedConfig::default())?;
    log::info!(
        "restricted fit converged after {} iterations (max |p - p^| = {:e})",
        report.iterations,
        report.fit_deviation
    );
    let mut out = String::from("gender\tmax_deviation\tspearman\tsupport\n");
    for g in &report.genders {
        writeln!(out, "{}\t{}\t{}\t{}", g.gender, g.max_deviation, g.spearman, g.support).unwrap();
    }
    emit(cfg.pick(args.out, "out")?, &out)
}

fn report_senses(args: SensesArgs, cfg: &Settings) -> Result<()> {
    let model: PathBuf = cfg.require(args.model, "model")?;
    let senses: PathBuf = cfg.require(args.senses, "senses")?;
    let k = cfg.or(args.k, "k", DEFAULT_K)?;
    let permutations = cfg.or(args.permutations, "permutations", DEFAULT_PERMUTATIONS)?;
    let seed = cfg.or(args.seed, "seed", 0)?;
    let (ck, params, inst) = load_model(&model)?;
    let default_kind = if ck.relation == Relation::Amod {
        SenseKind::Adj
    } else {
        SenseKind::Verb
    };
    let kind = cfg.or(args.kind, "kind", default_kind)?;
    let inv = load_sense_inventory(senses, kind)?;
    let rows = sense_difference_suite(&params, &inst, &inv, k, permutations, seed)?;
    let mut out = String::from("sentiment\tsense\tfreq_masc\tfreq_fem\tp\tsignificant\n");
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.slot, r.sense, r.freq_masc, r.freq_fem, r.result.p_value, r.result.significant
        )
        .unwrap();
    }
    emit(cfg.pick(args.out, "out")?, &out)
}

fn report_sentiment(args: SentimentArgs, cfg: &Settings) -> Result<()> {
    let models = cfg.paths(args.models, "model");
    if models.is_empty() {
        return Err(Error::InvalidArgument("missing required option --model".into()));
    }
    let prior = load_sentiment_lexicon(cfg.require::<PathBuf>(args.sentiment_lexicon, "sentiment-lexicon")?)?;
    let k = cfg.or(args.k, "k", DEFAULT_K)?;
    let permutations = cfg.or(args.permutations, "permutations", DEFAULT_PERMUTATIONS)?;
    let seed = cfg.or(args.seed, "seed", 0)?;
    let mut out = String::from("relation\tgender\tpos\tneg\tneu\tp_pos\tp_neg\tp_neu\tsig_pos\tsig_neg\tsig_neu\n");
    for path in models {
        let (_, params, inst) = load_model(&path)?;
        let t = sentiment_frequency(&params, &inst, &prior, k, permutations, seed)?;
        for g in &t.genders {
            let [pos, neg, neu] = g.frequencies;
            writeln!(
                out,
                "{}\t{}\t{pos}\t{neg}\t{neu}\t{}\t{}\t{}\t{}\t{}\t{}",
                t.relation,
                g.gender,
                t.tests[0].p_value,
                t.tests[1].p_value,
                t.tests[2].p_value,
                t.tests[0].significant,
                t.tests[1].significant,
                t.tests[2].significant
            )
            .unwrap();
        }
    }
    emit(cfg.pick(args.out, "out")?, &out)
}

fn report_correlate(args: CorrelateArgs, cfg: &Settings) -> Result<()> {
    let model: PathBuf = cfg.require(args.model, "model")?;
    let judgments = load_judgments(cfg.require::<PathBuf>(args.judgments, "judgments")?)?;
    let labels = match cfg.pick::<PathBuf>(args.labels, "labels")? {
        Some(p) => load_labels(p)?,
        None => BTreeMap::new(),
    };
    let permutations = cfg.or(args.permutations, "permutations", DEFAULT_PERMUTATIONS)?;
    let seed = cfg.or(args.seed, "seed", 0)?;
    let (_, params, inst) = load_model(&model)?;
    let c = correlate_judgments(&params, &inst, &judgments, &labels, permutations, seed)?;
    if let Some(path) = cfg.pick::<PathBuf>(args.audit, "audit")? {
        let mut audit = String::from("word\tfemaleness\tscore_diff\tjudgment\tlabel\n");
        for w in &c.words {
            let judgment = w.judgment.map_or("NA".to_string(), |x| x.to_string());
            let label = w.label.map_or("NA".to_string(), |g| g.to_string());
            writeln!(
                audit,
                "{}\t{}\t{}\t{judgment}\t{label}",
                w.word, w.femaleness, w.score_diff
            )
            .unwrap();
        }
        write_file(&path, &audit)?;
    }
    let agreement = c.agreement.map_or("NA".to_string(), |a| a.to_string());
    let out = format!("rho\tp\tagreement\tn\n{}\t{}\t{agreement}\t{}\n", c.rho, c.p_value, c.n);
    emit(cfg.pick(args.out, "out")?, &out)
}

fn read_numbers(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        for tok in line.split_whitespace() {
            out.push(
                tok.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::parse(path, i + 1, format!("bad number `{tok}`")))?,
            );
        }
    }
    Ok(out)
}

fn report_permtest(args: PermtestArgs, cfg: &Settings) -> Result<()> {
    let a = read_numbers(&cfg.require::<PathBuf>(args.a, "a")?)?;
    let b = read_numbers(&cfg.require::<PathBuf>(args.b, "b")?)?;
    let permutations = cfg.or(args.permutations, "permutations", DEFAULT_PERMUTATIONS)?;
    let seed = cfg.or(args.seed, "seed", 0)?;
    let r = permutation_test(&a, &b, permutations, seed)?;
    let out = format!(
        "statistic\tp\tcorrected_alpha\tsignificant\tpermutations\texact\n{}\t{}\t{}\t{}\t{}\t{}\n",
        r.statistic, r.p_value, r.corrected_alpha, r.significant, r.permutations, r.exact
    );
    emit(cfg.pick(args.out, "out")?, &out)
}

pub fn cmd_synth(args: SynthArgs, cfg: &Settings) -> Result<()> {
    let defaults = SynthConfig::default();
    let config = SynthConfig {
        seed: cfg.or(args.seed, "seed", defaults.seed)?,
        vocab_size: cfg.or(args.vocab_size, "vocab-size", defaults.vocab_size)?,
        tokens: cfg.or(args.tokens, "tokens", defaults.tokens)?,
        effect: cfg.or(args.effect, "effect", defaults.effect)?,
        fem_positive: cfg.or(args.fem_positive, "fem-positive", defaults.fem_positive)?,
        ..defaults
    };
    let out: PathBuf = cfg.require(args.out, "out")?;
    let corpus = generate(&config)?;
    let files = corpus.write(&out)?;
    log::info!(
        "wrote {} ({} planted words)",
        files.counts.display(),
        corpus.manifest.planted_words
    );
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    let cfg = Settings::load(cli.config.as_deref())?;
    match cli.command {
        Command::Ingest(a) => cmd_ingest(a, &cfg),
        Command::Train(a) => cmd_train(a, &cfg),
        Command::Report(r) => cmd_report(r, &cfg),
        Command::Synth(a) => cmd_synth(a, &cfg),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else if matches!(err, Error::InvalidArgument(_)) {
        EXIT_USAGE
    } else {
        EXIT_DATA
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Errors are reported on stderr.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
