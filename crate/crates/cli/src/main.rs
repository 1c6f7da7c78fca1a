//! `w6hea`: validate, analyze, and export w6h architecture repositories.
//!
//! Exit codes: 0 on success, 1 when validation finds error-severity
//! problems, 2 on parse, input, or usage failures.

mod config;
mod discover;

use std::fmt::{self, Write as _};
use std::fs;
use std::io::{IsTerminal, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use w6h_core::analysis::{
    cluster_graph, coverage_matrix, elicitation_plan, retirement_candidates, reuse_candidates, value_graph,
    value_scores, PromptStatus, ViewWeights,
};
use w6h_core::format::{format_document, has_errors, Diagnostic, Severity, SourceDocument};
use w6h_core::ingest::{ingest_k8s, ingest_openapi, merge_proposal, IngestProposal, MergeStrategy};
use w6h_core::report::{export_findings_json, export_graph_dot, render_matrix, scores_json, Report, ReportKind};
use w6h_core::validation::{check_precedence, validate, Finding, FindingSeverity};
use w6h_core::{parse_repository, serialize_elements, serialize_repository, Repository, View};

use config::Config;

#[derive(Debug, Parser)]
#[command(name = "w6hea", version, about = "Lint and analyze w6h architecture repositories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the repository against the rule catalog and cell precedence.
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Print findings as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Show which framework cells hold concerns.
    Matrix {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Write matrix.md into this directory instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Add a generation timestamp and host name.
        #[arg(long)]
        stamp: bool,
    },
    /// List the questions to ask next, in precedence order.
    Elicit {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long)]
        view: Option<View>,
    },
    /// Extract entities and concerns from OpenAPI documents or Kubernetes manifests.
    Ingest {
        source: IngestSource,
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Repository to match against and merge into.
        #[arg(long)]
        repo: Vec<PathBuf>,
        #[arg(long, value_enum, requires = "repo")]
        merge: Option<MergeArg>,
        /// Rewrite the repository file in place (needs a single-file --repo).
        #[arg(long, requires = "merge")]
        write: bool,
    },
    /// Value scores, retirement and reuse candidates, or clusters.
    Analyze {
        what: AnalyzeKind,
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[command(flatten)]
        opts: AnalysisOpts,
    },
    /// Write graph.dot, or findings.json and scores.json, into a directory.
    Export {
        format: ExportFormat,
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        stamp: bool,
        #[command(flatten)]
        opts: AnalysisOpts,
    },
    /// Rewrite repository files in canonical form.
    Fmt {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Apply the changes; without it, only list files that would change.
        #[arg(long)]
        write: bool,
    },
}

#[derive(Debug, clap::Args)]
struct AnalysisOpts {
    /// Retirement threshold: services scoring below it are listed.
    #[arg(long)]
    threshold: Option<f64>,
    /// Seed for clustering.
    #[arg(long)]
    seed: Option<u64>,
    /// Per-view multipliers, e.g. `owner=2,scope=0.5`.
    #[arg(long)]
    weights: Option<String>,
    /// Config file; defaults to ./.w6hea.toml when present.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum IngestSource {
    Openapi,
    K8s,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MergeArg {
    AddOnly,
    Overwrite,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AnalyzeKind {
    Scores,
    Retire,
    Reuse,
    Cluster,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExportFormat {
    Dot,
    Json,
}

/// Failure whose details were already printed.
#[derive(Debug)]
struct Reported;

impl fmt::Display for Reported {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("errors reported above")
    }
}

impl std::error::Error for Reported {}

struct Style {
    color: bool,
}

impl Style {
    fn detect() -> Style {
        Style {
            color: std::env::var_os("EA_NO_COLOR").is_none() && std::io::stdout().is_terminal(),
        }
    }

    fn severity(&self, s: FindingSeverity) -> String {
        let code = match s {
            FindingSeverity::Error => "31",
            FindingSeverity::Warning => "33",
            FindingSeverity::Info => "36",
        };
        if self.color {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let code = match run(cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            if !e.is::<Reported>() {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(2)
        }
    };
    // a closed pipe (`| head`) is not an error worth reporting
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush());
    code
}

fn run(cli: Cli, out: &mut String) -> Result<ExitCode> {
    let style = Style::detect();
    match cli.command {
        Command::Validate { paths, json } => cmd_validate(&paths, json, &style, out),
        Command::Matrix { paths, out: dir, stamp } => {
            let repo = load_repository(&paths)?;
            let report = Report::new(ReportKind::MatrixMd, render_matrix(&coverage_matrix(&repo)));
            emit_report(report, dir.as_deref(), stamp, out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Elicit { paths, view } => {
            let repo = load_repository(&paths)?;
            for p in elicitation_plan(&repo, view).prompts {
                let mark = if p.status == PromptStatus::Answered { "x" } else { " " };
                writeln!(out, "[{mark}] {}: {}", p.cell, p.question)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Ingest {
            source,
            files,
            repo,
            merge,
            write,
        } => cmd_ingest(source, &files, &repo, merge, write, out),
        Command::Analyze { what, paths, opts } => cmd_analyze(what, &paths, &opts, out),
        Command::Export {
            format,
            paths,
            out: dir,
            stamp,
            opts,
        } => {
            let repo = load_repository(&paths)?;
            let reports = match format {
                ExportFormat::Dot => vec![Report::new(ReportKind::GraphDot, export_graph_dot(&value_graph(&repo)))],
                ExportFormat::Json => {
                    let (weights, _, _) = resolve_analysis(&opts)?;
                    vec![
                        Report::new(ReportKind::FindingsJson, export_findings_json(&all_findings(&repo))),
                        Report::new(ReportKind::ScoresJson, scores_json(&value_scores(&repo, &weights))),
                    ]
                }
            };
            for r in reports {
                emit_report(r, Some(&dir), stamp, out)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fmt { paths, write } => cmd_fmt(&paths, write, out),
    }
}

fn print_diagnostics(diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{d}");
    }
}

/// Loads and parses a repository, printing diagnostics. Errors abort.
fn load_repository(paths: &[PathBuf]) -> Result<Repository> {
    let files = discover::repository_files(paths)?;
    let (docs, mut diags) = discover::load(&files)?;
    let (repo, parse_diags) = parse_repository(&docs);
    diags.extend(parse_diags);
    diags.sort();
    print_diagnostics(&diags);
    match repo {
        Some(r) if !has_errors(&diags) => Ok(r),
        _ => Err(Reported.into()),
    }
}

fn all_findings(repo: &Repository) -> Vec<Finding> {
    let mut findings = validate(repo);
    findings.extend(check_precedence(repo));
    findings.sort();
    findings
}

fn cmd_validate(paths: &[PathBuf], json: bool, style: &Style, out: &mut String) -> Result<ExitCode> {
    let repo = load_repository(paths)?;
    let findings = all_findings(&repo);
    if json {
        writeln!(out, "{}", export_findings_json(&findings))?;
    } else {
        for f in &findings {
            writeln!(
                out,
                "{}[{}] {}: {}",
                style.severity(f.severity),
                f.rule_id,
                f.subject,
                f.message
            )?;
        }
    }
    Ok(if findings.iter().any(Finding::is_error) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn stamp_text() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let host = std::env::var("HOSTNAME")
        .ok()
        .or_else(|| fs::read_to_string("/etc/hostname").ok())
        .map(|h| h.trim().to_string())
        .filter(|h| !h.is_empty())
        .unwrap_or_else(|| "unknown-host".to_string());
    format!(
        "generated by w6hea {} at unix time {secs} on {host}",
        env!("CARGO_PKG_VERSION")
    )
}

fn emit_report(report: Report, dir: Option<&Path>, stamp: bool, out: &mut String) -> Result<()> {
    let kind = report.kind;
    let report = if stamp { report.stamped(&stamp_text()) } else { report };
    let mut body = report.body;
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match dir {
        None => out.push_str(&body),
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create `{}`", dir.display()))?;
            let path = dir.join(kind.file_name());
            fs::write(&path, body).with_context(|| format!("cannot write `{}`", path.display()))?;
            writeln!(out, "wrote {}", path.display())?;
        }
    }
    Ok(())
}

/// Weights, threshold, and seed from the config file, overridden by flags.
fn resolve_analysis(opts: &AnalysisOpts) -> Result<(ViewWeights, Option<f64>, u64)> {
    let config = Config::load(opts.config.as_deref())?;
    let mut pairs: Vec<(String, f64)> = config.analysis.weights.into_iter().collect();
    if let Some(spec) = &opts.weights {
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| anyhow!("--weights: expected view=weight, got `{part}`"))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| anyhow!("--weights: `{}` is not a number", v.trim()))?;
            pairs.push((k.trim().to_string(), v));
        }
    }
    let weights = ViewWeights::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), *v)))?;
    let threshold = opts.threshold.or(config.analysis.threshold);
    let seed = opts.seed.or(config.analysis.seed).unwrap_or(0);
    Ok((weights, threshold, seed))
}

fn cmd_analyze(what: AnalyzeKind, paths: &[PathBuf], opts: &AnalysisOpts, out: &mut String) -> Result<ExitCode> {
    let (weights, threshold, seed) = resolve_analysis(opts)?;
    let repo = load_repository(paths)?;
    match what {
        AnalyzeKind::Scores => {
            for (id, score) in value_scores(&repo, &weights) {
                writeln!(out, "{id}\t{score}")?;
            }
        }
        AnalyzeKind::Retire => {
            let threshold = threshold.ok_or_else(|| {
                anyhow!(
                    "retire needs --threshold or `analysis.threshold` in {}",
                    config::FILE_NAME
                )
            })?;
            for (id, score) in retirement_candidates(&repo, &weights, threshold)? {
                writeln!(out, "{id}\t{score}")?;
            }
        }
        AnalyzeKind::Reuse => {
            for (id, count) in reuse_candidates(&repo) {
                writeln!(out, "{id}\t{count}")?;
            }
        }
        AnalyzeKind::Cluster => {
            for (n, cluster) in cluster_graph(&value_graph(&repo), seed).iter().enumerate() {
                writeln!(out, "cluster {}: {}", n + 1, cluster.join(", "))?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn read_source(path: &Path) -> Result<SourceDocument> {
    let bytes = fs::read(path).with_context(|| format!("cannot read `{}`", path.display()))?;
    SourceDocument::from_bytes(path.display().to_string(), bytes).map_err(|d| {
        print_diagnostics(&[d]);
        Reported.into()
    })
}

fn cmd_ingest(
    source: IngestSource,
    files: &[PathBuf],
    repo_paths: &[PathBuf],
    merge: Option<MergeArg>,
    write: bool,
    out: &mut String,
) -> Result<ExitCode> {
    let target = if repo_paths.is_empty() {
        Repository::default()
    } else {
        load_repository(repo_paths)?
    };
    let docs = files.iter().map(|f| read_source(f)).collect::<Result<Vec<_>>>()?;
    let mut proposals: Vec<IngestProposal> = Vec::new();
    let mut diags = Vec::new();
    match source {
        IngestSource::Openapi => {
            for doc in &docs {
                let (p, d) = ingest_openapi(doc);
                proposals.push(p);
                diags.extend(d);
            }
        }
        IngestSource::K8s => {
            let (p, d) = ingest_k8s(&docs, &target);
            proposals.push(p);
            diags.extend(d);
        }
    }
    diags.sort();
    print_diagnostics(&diags);
    if diags.iter().any(|d| d.severity == Severity::Error) {
        return Err(Reported.into());
    }

    let Some(merge) = merge else {
        let entities: Vec<_> = proposals.iter().flat_map(|p| p.entities.iter().cloned()).collect();
        let links: Vec<_> = proposals.iter().flat_map(|p| p.links.iter().cloned()).collect();
        let concerns: Vec<_> = proposals.iter().flat_map(|p| p.concerns.iter().cloned()).collect();
        out.push_str(&serialize_elements(&entities, &links, &concerns));
        return Ok(ExitCode::SUCCESS);
    };
    let strategy = match merge {
        MergeArg::AddOnly => MergeStrategy::AddOnly,
        MergeArg::Overwrite => MergeStrategy::OverwriteAttributes,
    };
    let mut merged = target;
    for p in &proposals {
        let (next, d) = merge_proposal(&merged, p, strategy)
            .with_context(|| format!("cannot merge proposal from {}", p.provenance.source))?;
        print_diagnostics(&d);
        merged = next;
    }
    let text = serialize_repository(&merged);
    if write {
        let [file] = repo_paths else {
            bail!("--write needs exactly one --repo file");
        };
        if !file.is_file() {
            bail!("--write needs --repo to name a file, not `{}`", file.display());
        }
        fs::write(file, text).with_context(|| format!("cannot write `{}`", file.display()))?;
        writeln!(out, "updated {}", file.display())?;
    } else {
        out.push_str(&text);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_fmt(paths: &[PathBuf], write: bool, out: &mut String) -> Result<ExitCode> {
    let files = discover::repository_files(paths)?;
    let mut failed = false;
    for file in files {
        if file.extension().is_some_and(|e| e == "json") {
            eprintln!("{}: skipped; fmt only rewrites YAML files", file.display());
            continue;
        }
        let doc = read_source(&file)?;
        match format_document(&doc) {
            Ok(text) if text == doc.text => {}
            Ok(text) if write => {
                fs::write(&file, text).with_context(|| format!("cannot write `{}`", file.display()))?;
                writeln!(out, "formatted {}", file.display())?;
            }
            Ok(_) => writeln!(out, "would reformat {}", file.display())?,
            Err(diags) => {
                print_diagnostics(&diags);
                failed |= has_errors(&diags);
            }
        }
    }
    if failed {
        Err(Reported.into())
    } else {
        Ok(ExitCode::SUCCESS)
    }
}
