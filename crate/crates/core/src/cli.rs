//! Command-line front end.
//!
//! Every command reads its inputs from files named by long flags and writes
//! its results to `--out` (plus an optional tab-separated `--table`); nothing
//! but diagnostics goes to the error stream. Outputs are written to a
//! temporary file next to the target and renamed into place.
//!
//! Exit status: 0 on success, 2 for unusable input (bad flags, unreadable or
//! malformed files), 1 for anything else.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{self, AuditScope, BoostSpec};
use crate::corpus::{self, CompletionList, Lexicon};
use crate::error::Error;
use crate::measures::{self, MeasureConfig, MeasureKind};
use crate::prompts::{self, PromptSpec, ValenceFilter};
use crate::scoretable::{self, ScoreKind, ScoreTable, PROBABILITY_FLOOR, SCHEMA_VERSION};
use crate::stats::{self, Adjustment, DEFAULT_PERMUTATIONS};
use crate::vocab::{surface_variants_with, TokenTable, VariantForms};

/// Version of the lexicon, prompt and report documents.
pub const DOCUMENT_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "valuebias", about = "Audit value biases of reward models and language models", disable_version_flag = true)]
struct Cli {
    /// Print the schema version of every file format and exit.
    #[arg(long)]
    version: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dictionary unrolling and filtering.
    #[command(subcommand)]
    Corpus(CorpusCommand),
    /// Prompt generation.
    #[command(subcommand)]
    Prompts(PromptsCommand),
    /// Score-table validation.
    #[command(subcommand)]
    Scores(ScoresCommand),
    /// Implicit-reward measure between two log-probability tables.
    Measure(MeasureArgs),
    /// Construct-rank audit over a directory of score tables.
    Audit(AuditArgs),
    /// Standalone statistical tests.
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Rank movers and Kendall trajectory across checkpoints.
    RankChange(RankChangeArgs),
    /// Synthetic boost-recovery comparison of all measure kinds.
    ValidateBoost(ValidateBoostArgs),
    /// Variant-averaged measure gap between two words for model pairs.
    CompareGrid(CompareGridArgs),
}

#[derive(Debug, Subcommand)]
enum CorpusCommand {
    /// Expand a dictionary with curated completions into a lexicon document.
    Unroll {
        #[arg(long)]
        dictionary: PathBuf,
        #[arg(long)]
        completions: Option<PathBuf>,
        #[arg(long)]
        name: String,
        /// Keep only entries with this part-of-speech tag.
        #[arg(long)]
        pos: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Restrict a lexicon document to one part-of-speech tag.
    Filter {
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long)]
        pos: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ValenceArg {
    Positive,
    Negative,
    All,
}

#[derive(Debug, Subcommand)]
enum PromptsCommand {
    Generate {
        #[arg(long, value_enum, default_value = "all")]
        valence: ValenceArg,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum ScoresCommand {
    /// Check a score-table file against the wire format.
    Validate { file: PathBuf },
}

#[derive(Debug, Args)]
struct MeasureArgs {
    #[arg(long)]
    kind: MeasureKind,
    /// Source log-probability table.
    #[arg(long)]
    p: PathBuf,
    /// Target log-probability table.
    #[arg(long)]
    q: PathBuf,
    #[arg(long, default_value_t = 10)]
    top: usize,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = PROBABILITY_FLOOR)]
    floor: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VariantArgs {
    /// Leave out the UPPERCASE surface variants.
    #[arg(long)]
    no_uppercase: bool,
}

impl VariantArgs {
    fn forms(&self) -> VariantForms {
        VariantForms {
            uppercase: !self.no_uppercase,
        }
    }
}

#[derive(Debug, Args)]
struct AuditArgs {
    /// Directory of `.jsonl` score tables.
    #[arg(long)]
    scores: PathBuf,
    #[arg(long)]
    lexicon: PathBuf,
    /// Prompt document from `prompts generate`.
    #[arg(long)]
    prompts: PathBuf,
    /// `full` or `intersection:<vocabA>,<vocabB>`.
    #[arg(long, default_value = "full")]
    scope: String,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_PERMUTATIONS)]
    n_perm: u64,
    /// Also report the construct profile of each table's top k tokens.
    #[arg(long)]
    top_k: Option<usize>,
    #[command(flatten)]
    variants: VariantArgs,
    #[arg(long)]
    out: PathBuf,
    /// Tab-separated summary export.
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum StatsCommand {
    /// Two-sample permutation t-test.
    PermT {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_PERMUTATIONS)]
        n_perm: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Welch's unequal-variance t-test.
    WelchT {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Kendall's tau-b.
    Kendall {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Bonferroni or Benjamini-Hochberg adjustment.
    Adjust {
        #[arg(long)]
        p: PathBuf,
        #[arg(long, value_enum)]
        method: AdjustMethod,
        /// Family size for Bonferroni; defaults to the number of p-values.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// 2x2 difference-of-differences permutation test.
    Interaction {
        /// JSON array of four sample arrays `[c11, c12, c21, c22]`.
        #[arg(long)]
        cells: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_PERMUTATIONS)]
        n_perm: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AdjustMethod {
    Bonferroni,
    Bh,
}

#[derive(Debug, Args)]
struct RankChangeArgs {
    /// Checkpoint score tables in training order (at least two).
    #[arg(long = "checkpoint", required = true, num_args = 1)]
    checkpoints: Vec<PathBuf>,
    /// Restrict to the surface variants of this lexicon's words.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[command(flatten)]
    variants: VariantArgs,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateBoostArgs {
    /// Base log-probability table.
    #[arg(long)]
    base: PathBuf,
    #[arg(long)]
    factor: f64,
    /// Word list, one target word per line.
    #[arg(long)]
    targets: PathBuf,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[command(flatten)]
    variants: VariantArgs,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareGridArgs {
    #[arg(long = "source", required = true, num_args = 1)]
    sources: Vec<PathBuf>,
    #[arg(long = "target", required = true, num_args = 1)]
    targets: Vec<PathBuf>,
    #[arg(long)]
    word_a: String,
    #[arg(long)]
    word_b: String,
    #[arg(long, default_value = "mwlr")]
    kind: MeasureKind,
    #[command(flatten)]
    variants: VariantArgs,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    table: Option<PathBuf>,
}

/// A failed command: exit status plus diagnostic.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(path: &Path, err: impl std::fmt::Display) -> Self {
        Failure {
            code: 2,
            message: format!("{}: {err}", path.display()),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    /// Analysis errors on validated inputs are still input problems.
    fn analysis(err: Error) -> Self {
        match err {
            Error::Io(e) => Failure::internal(e.to_string()),
            other => Failure::usage(other.to_string()),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Runs the tool on `argv` (program name first) and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if cli.version {
        println!("valuebias {}", env!("CARGO_PKG_VERSION"));
        println!("score-table schema_version {SCHEMA_VERSION}");
        println!("lexicon document version {DOCUMENT_VERSION}");
        println!("prompt document version {DOCUMENT_VERSION}");
        println!("report document version {DOCUMENT_VERSION}");
        return 0;
    }
    let Some(command) = cli.command else {
        eprintln!("error: no subcommand given; run with --help for usage");
        return 2;
    };
    match dispatch(command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command) -> CmdResult {
    match command {
        Command::Corpus(c) => corpus_cmd(c),
        Command::Prompts(PromptsCommand::Generate { valence, out }) => prompts_cmd(valence, &out),
        Command::Scores(ScoresCommand::Validate { file }) => validate_cmd(&file),
        Command::Measure(a) => measure_cmd(a),
        Command::Audit(a) => audit_cmd(a),
        Command::Stats(s) => stats_cmd(s),
        Command::RankChange(a) => rank_change_cmd(a),
        Command::ValidateBoost(a) => validate_boost_cmd(a),
        Command::CompareGrid(a) => compare_grid_cmd(a),
    }
}

fn check_inputs(paths: &[&Path]) -> CmdResult {
    for p in paths {
        if !p.exists() {
            return Err(Failure::input(p, "no such file or directory"));
        }
    }
    Ok(())
}

fn check_output(path: &Path) -> CmdResult {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    if !parent.is_dir() {
        return Err(Failure::input(path, "output directory does not exist"));
    }
    Ok(())
}

/// Writes `bytes` to a temporary sibling of `path`, then renames it into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> CmdResult {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let fail = |e: std::io::Error| Failure::internal(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(parent).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CmdResult {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::internal(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn read_text(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(path, e))
}

fn read_table(path: &Path) -> std::result::Result<ScoreTable, Failure> {
    scoretable::read_score_table(path).map_err(|e| Failure::input(path, e))
}

fn read_lexicon(path: &Path) -> std::result::Result<Lexicon, Failure> {
    Lexicon::from_json(&read_text(path)?).map_err(|e| Failure::input(path, e))
}

fn read_samples(path: &Path) -> std::result::Result<Vec<f64>, Failure> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Failure::input(path, format!("expected a JSON array of numbers: {e}")))
}

fn read_vocab(path: &Path) -> std::result::Result<TokenTable, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::input(path, e))?;
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    TokenTable::parse(id, &bytes).map_err(|e| Failure::input(path, e))
}

fn read_probs(path: &Path, floor: f64) -> std::result::Result<scoretable::ProbTable, Failure> {
    let table = read_table(path)?;
    scoretable::to_probabilities_with_floor(&table, floor).map_err(|e| Failure::input(path, e))
}

fn corpus_cmd(command: CorpusCommand) -> CmdResult {
    match command {
        CorpusCommand::Unroll {
            dictionary,
            completions,
            name,
            pos,
            out,
        } => {
            let mut inputs = vec![dictionary.as_path()];
            inputs.extend(completions.as_deref());
            check_inputs(&inputs)?;
            check_output(&out)?;
            let fragments =
                corpus::parse_dictionary(&read_text(&dictionary)?).map_err(|e| Failure::input(&dictionary, e))?;
            let list = match &completions {
                Some(path) => CompletionList::parse(&read_text(path)?).map_err(|e| Failure::input(path, e))?,
                None => CompletionList::default(),
            };
            let mut lexicon = corpus::unroll(&name, &fragments, &list).map_err(|e| Failure::input(&dictionary, e))?;
            if let Some(pos) = pos {
                lexicon = lexicon.filter_pos(&pos);
            }
            write_atomic(&out, format!("{}\n", lexicon.to_json()).as_bytes())
        }
        CorpusCommand::Filter { lexicon, pos, out } => {
            check_inputs(&[&lexicon])?;
            check_output(&out)?;
            let filtered = read_lexicon(&lexicon)?.filter_pos(&pos);
            write_atomic(&out, format!("{}\n", filtered.to_json()).as_bytes())
        }
    }
}

fn prompts_cmd(valence: ValenceArg, out: &Path) -> CmdResult {
    check_output(out)?;
    let filter = match valence {
        ValenceArg::Positive => ValenceFilter::Positive,
        ValenceArg::Negative => ValenceFilter::Negative,
        ValenceArg::All => ValenceFilter::All,
    };
    write_json(out, &prompts::generate_prompts(filter))
}

fn validate_cmd(file: &Path) -> CmdResult {
    check_inputs(&[file])?;
    let table = read_table(file)?;
    eprintln!(
        "{}: ok ({} rows, {} scores, model `{}`, prompt `{}`)",
        file.display(),
        table.len(),
        match table.score_kind {
            ScoreKind::Reward => "reward",
            ScoreKind::Logprob => "logprob",
        },
        table.model_id,
        table.prompt_id
    );
    Ok(())
}

#[derive(Serialize)]
struct MeasureReport<'a> {
    kind: MeasureKind,
    beta: f64,
    source_model: &'a str,
    target_model: &'a str,
    prompt_id: &'a str,
    n_tokens: usize,
    top: Vec<measures::RankedToken>,
    bottom: Vec<measures::RankedToken>,
}

fn measure_cmd(a: MeasureArgs) -> CmdResult {
    check_inputs(&[&a.p, &a.q])?;
    check_output(&a.out)?;
    let cfg = MeasureConfig::with_beta(a.kind, a.beta).map_err(Failure::analysis)?;
    let p = read_probs(&a.p, a.floor)?;
    let q = read_probs(&a.q, a.floor)?;
    let result = if p.tokenizer_id == q.tokenizer_id {
        measures::compute_measure(&p, &q, cfg)
    } else {
        measures::compute_measure_mapped(&p, &q, cfg, &measures::surface_mapping(&p, &q))
    }
    .map_err(Failure::analysis)?;
    let (top, bottom) = measures::top_bottom(&result, a.top).map_err(Failure::analysis)?;
    write_json(
        &a.out,
        &MeasureReport {
            kind: a.kind,
            beta: a.beta,
            source_model: &result.source_model,
            target_model: &result.target_model,
            prompt_id: &result.prompt_id,
            n_tokens: result.values.len(),
            top,
            bottom,
        },
    )
}

fn score_files(dir: &Path) -> std::result::Result<Vec<PathBuf>, Failure> {
    let entries = std::fs::read_dir(dir).map_err(|e| Failure::input(dir, e))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::input(dir, "no .jsonl score tables found"));
    }
    Ok(files)
}

#[derive(Serialize)]
struct TopkReport {
    model_id: String,
    prompt_id: String,
    k: usize,
    profile: Vec<analysis::TopkEntry>,
}

#[derive(Serialize)]
struct AuditReport {
    version: u32,
    scope: String,
    lexicon: String,
    n_tables: usize,
    seed: u64,
    n_perm: u64,
    summaries: Vec<analysis::ConstructSummary>,
    warnings: Vec<analysis::AuditWarning>,
    contrasts: Vec<analysis::Contrast>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    top_k: Vec<TopkReport>,
}

fn audit_cmd(a: AuditArgs) -> CmdResult {
    check_inputs(&[&a.scores, &a.lexicon, &a.prompts])?;
    check_output(&a.out)?;
    if let Some(t) = &a.table {
        check_output(t)?;
    }
    let forms = a.variants.forms();
    let lexicon = read_lexicon(&a.lexicon)?;
    let prompt_list: Vec<PromptSpec> = serde_json::from_str(&read_text(&a.prompts)?)
        .map_err(|e| Failure::input(&a.prompts, format!("prompt document: {e}")))?;

    let scope = if a.scope == "full" {
        AuditScope::Full
    } else if let Some(pair) = a.scope.strip_prefix("intersection:") {
        let (va, vb) = pair
            .split_once(',')
            .ok_or_else(|| Failure::usage("--scope intersection needs two vocabulary files: intersection:<a>,<b>"))?;
        let (va, vb) = (PathBuf::from(va), PathBuf::from(vb));
        check_inputs(&[&va, &vb])?;
        AuditScope::intersection(&read_vocab(&va)?, &read_vocab(&vb)?, &lexicon, forms)
    } else {
        return Err(Failure::usage(format!("unknown scope `{}`", a.scope)));
    };

    let tables = score_files(&a.scores)?
        .iter()
        .map(|p| read_table(p))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let report = analysis::construct_summaries(&tables, &lexicon, &prompt_list, &scope, forms).map_err(Failure::analysis)?;
    let contrasts = analysis::construct_contrasts(&report.summaries, a.n_perm, a.seed).map_err(Failure::analysis)?;
    let top_k = match a.top_k {
        Some(k) => tables
            .iter()
            .map(|t| {
                Ok(TopkReport {
                    model_id: t.model_id.clone(),
                    prompt_id: t.prompt_id.clone(),
                    k,
                    profile: analysis::topk_profile(t, std::slice::from_ref(&lexicon), k, None)?,
                })
            })
            .collect::<crate::Result<Vec<_>>>()
            .map_err(Failure::analysis)?,
        None => Vec::new(),
    };

    if let Some(t) = &a.table {
        write_atomic(t, analysis::summaries_to_tsv(&report.summaries).as_bytes())?;
    }
    write_json(
        &a.out,
        &AuditReport {
            version: DOCUMENT_VERSION,
            scope: a.scope,
            lexicon: lexicon.name.clone(),
            n_tables: tables.len(),
            seed: a.seed,
            n_perm: a.n_perm,
            summaries: report.summaries,
            warnings: report.warnings,
            contrasts,
            top_k,
        },
    )
}

fn stats_cmd(command: StatsCommand) -> CmdResult {
    match command {
        StatsCommand::PermT { a, b, seed, n_perm, out } => {
            check_inputs(&[&a, &b])?;
            check_output(&out)?;
            let r = stats::perm_t_test(&read_samples(&a)?, &read_samples(&b)?, n_perm, seed).map_err(Failure::analysis)?;
            write_json(&out, &r)
        }
        StatsCommand::WelchT { a, b, out } => {
            check_inputs(&[&a, &b])?;
            check_output(&out)?;
            let r = stats::welch_t(&read_samples(&a)?, &read_samples(&b)?).map_err(Failure::analysis)?;
            write_json(&out, &r)
        }
        StatsCommand::Kendall { x, y, out } => {
            check_inputs(&[&x, &y])?;
            check_output(&out)?;
            let tau = stats::kendall_tau_b(&read_samples(&x)?, &read_samples(&y)?).map_err(Failure::analysis)?;
            write_json(&out, &serde_json::json!({ "tau_b": tau }))
        }
        StatsCommand::Adjust { p, method, m, out } => {
            check_inputs(&[&p])?;
            check_output(&out)?;
            let pvals = read_samples(&p)?;
            let (method, label) = match method {
                AdjustMethod::Bonferroni => {
                    let m = m.unwrap_or(pvals.len());
                    (Adjustment::Bonferroni { m }, format!("bonferroni(m={m})"))
                }
                AdjustMethod::Bh => (Adjustment::BhFdr, "bh_fdr".to_string()),
            };
            let adjusted = stats::adjust(&pvals, method).map_err(Failure::analysis)?;
            write_json(&out, &serde_json::json!({ "method": label, "p_values": pvals, "adjusted": adjusted }))
        }
        StatsCommand::Interaction { cells, seed, n_perm, out } => {
            check_inputs(&[&cells])?;
            check_output(&out)?;
            let parsed: Vec<Vec<f64>> = serde_json::from_str(&read_text(&cells)?)
                .map_err(|e| Failure::input(&cells, format!("expected four JSON sample arrays: {e}")))?;
            let [c11, c12, c21, c22] = <[Vec<f64>; 4]>::try_from(parsed)
                .map_err(|v| Failure::input(&cells, format!("expected 4 cells, found {}", v.len())))?;
            let r = stats::perm_interaction([&c11, &c12, &c21, &c22], n_perm, seed).map_err(Failure::analysis)?;
            write_json(&out, &r)
        }
    }
}

#[derive(Serialize)]
struct TrajectoryPoint {
    checkpoint: String,
    model_id: String,
    tau_b_vs_final: f64,
}

#[derive(Serialize)]
struct RankChangeReport {
    n_tokens: usize,
    movers: analysis::MoverReport,
    trajectory: Vec<TrajectoryPoint>,
}

fn movers_to_tsv(report: &analysis::MoverReport) -> String {
    let mut out = String::from("direction\tid\ttoken\tearly_rank\tlate_rank\tdelta\n");
    for (dir, list) in [("riser", &report.risers), ("faller", &report.fallers)] {
        for m in list {
            let _ = writeln!(
                out,
                "{dir}\t{}\t{}\t{}\t{}\t{}",
                m.id,
                crate::vocab::escape(&m.token),
                m.early_rank,
                m.late_rank,
                m.delta
            );
        }
    }
    out
}

fn rank_change_cmd(a: RankChangeArgs) -> CmdResult {
    if a.checkpoints.len() < 2 {
        return Err(Failure::usage("rank-change needs at least two --checkpoint files"));
    }
    let mut inputs: Vec<&Path> = a.checkpoints.iter().map(PathBuf::as_path).collect();
    inputs.extend(a.lexicon.as_deref());
    check_inputs(&inputs)?;
    check_output(&a.out)?;
    let tables = a
        .checkpoints
        .iter()
        .map(|p| read_table(p))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut subset: BTreeSet<u32> = match &a.lexicon {
        Some(path) => {
            let lexicon = read_lexicon(path)?;
            analysis::word_ids(&tables[0], &lexicon, a.variants.forms())
                .into_values()
                .flatten()
                .collect()
        }
        None => tables[0].rows.keys().copied().collect(),
    };
    for t in &tables[1..] {
        subset.retain(|id| t.rows.contains_key(id));
    }
    let early = &tables[0];
    let late = tables.last().expect("two or more checkpoints");
    let movers = analysis::rank_change(early, late, &subset, a.k).map_err(Failure::analysis)?;
    let taus = analysis::checkpoint_trajectory(&tables, &subset).map_err(Failure::analysis)?;
    let trajectory = a
        .checkpoints
        .iter()
        .zip(&tables)
        .zip(taus)
        .map(|((path, t), tau)| TrajectoryPoint {
            checkpoint: path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
            model_id: t.model_id.clone(),
            tau_b_vs_final: tau,
        })
        .collect();
    if let Some(t) = &a.table {
        write_atomic(t, movers_to_tsv(&movers).as_bytes())?;
    }
    write_json(
        &a.out,
        &RankChangeReport {
            n_tokens: subset.len(),
            movers,
            trajectory,
        },
    )
}

#[derive(Serialize)]
struct BoostTarget {
    word: String,
    id: u32,
    token: String,
}

#[derive(Serialize)]
struct BoostReport {
    base_model: String,
    prompt_id: String,
    factor: f64,
    k: usize,
    targets: Vec<BoostTarget>,
    rows: Vec<analysis::RecoveryRow>,
}

fn validate_boost_cmd(a: ValidateBoostArgs) -> CmdResult {
    check_inputs(&[&a.base, &a.targets])?;
    check_output(&a.out)?;
    let base = read_probs(&a.base, PROBABILITY_FLOOR)?;
    let index: std::collections::BTreeMap<&str, u32> = {
        let mut m = std::collections::BTreeMap::new();
        for (id, row) in &base.rows {
            m.entry(row.token.as_str()).or_insert(*id);
        }
        m
    };
    let mut targets = Vec::new();
    for (line_no, line) in read_text(&a.targets)?.lines().enumerate() {
        let word = line.trim();
        if word.is_empty() || word.starts_with('#') {
            continue;
        }
        let exact = index.get(word).map(|id| (word.to_string(), *id));
        let resolved = exact.or_else(|| {
            let group = surface_variants_with(word, a.variants.forms()).ok()?;
            group.variants.iter().find_map(|v| index.get(v.as_str()).map(|id| (v.clone(), *id)))
        });
        let (token, id) = resolved.ok_or_else(|| {
            Failure::input(&a.targets, format!("line {}: `{word}` is not a token of the base table", line_no + 1))
        })?;
        targets.push(BoostTarget {
            word: word.to_string(),
            id,
            token,
        });
    }
    let spec = BoostSpec::new(targets.iter().map(|t| t.id), a.factor).map_err(Failure::analysis)?;
    let boosted = analysis::boost(&base, &spec).map_err(Failure::analysis)?;
    let rows = analysis::measure_comparison(&base, &boosted, &spec.targets, a.k).map_err(Failure::analysis)?;
    if let Some(t) = &a.table {
        let mut tsv = String::from("kind\trecovered\ttargets\tk\n");
        for r in &rows {
            let _ = writeln!(tsv, "{}\t{}\t{}\t{}", r.kind, r.recovered, r.targets, r.k);
        }
        write_atomic(t, tsv.as_bytes())?;
    }
    write_json(
        &a.out,
        &BoostReport {
            base_model: base.model_id.clone(),
            prompt_id: base.prompt_id.clone(),
            factor: a.factor,
            k: a.k,
            targets,
            rows,
        },
    )
}

#[derive(Serialize)]
struct GridReport {
    kind: MeasureKind,
    word_a: String,
    word_b: String,
    cells: Vec<measures::GapCell>,
}

fn compare_grid_cmd(a: CompareGridArgs) -> CmdResult {
    let inputs: Vec<&Path> = a.sources.iter().chain(&a.targets).map(PathBuf::as_path).collect();
    check_inputs(&inputs)?;
    check_output(&a.out)?;
    let load = |paths: &[PathBuf]| -> std::result::Result<Vec<(String, scoretable::ProbTable)>, Failure> {
        paths
            .iter()
            .map(|p| read_probs(p, PROBABILITY_FLOOR).map(|t| (t.model_id.clone(), t)))
            .collect()
    };
    let sources = load(&a.sources)?;
    let targets = load(&a.targets)?;
    let forms = a.variants.forms();
    let group_a = surface_variants_with(&a.word_a, forms).map_err(Failure::analysis)?;
    let group_b = surface_variants_with(&a.word_b, forms).map_err(Failure::analysis)?;
    let cells = measures::pairwise_gap_grid(&sources, &targets, &group_a, &group_b, MeasureConfig::new(a.kind))
        .map_err(Failure::analysis)?;
    if let Some(t) = &a.table {
        let fmt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
        let mut tsv = String::from("source\ttarget\tvalue_a\tvalue_b\tgap\n");
        for c in &cells {
            let _ = writeln!(tsv, "{}\t{}\t{}\t{}\t{}", c.source, c.target, fmt(c.value_a), fmt(c.value_b), fmt(c.gap));
        }
        write_atomic(t, tsv.as_bytes())?;
    }
    write_json(
        &a.out,
        &GridReport {
            kind: a.kind,
            word_a: a.word_a,
            word_b: a.word_b,
            cells,
        },
    )
}
