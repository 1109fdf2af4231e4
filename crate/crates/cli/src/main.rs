//! Command-line entry point: pipeline stages, full runs, graph queries,
//! statistics, cleanup, Cypher export, and the HTTP query server.

mod artifacts;
mod config;
mod report;
mod server;
mod stages;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use regkg_core::clean::clean_degenerate;
use regkg_core::corpus::IngestedDocument;
use regkg_core::cypher::export_cypher;
use regkg_core::dump::{dump_to_path, load_from_path};
use regkg_core::eval::{evaluate_spans, MatchMode};
use regkg_core::graph::PropertyGraph;
use regkg_core::query::{
    compute_stats, intersect_documents, shortest_paths, table_of_contents, tag_usage,
    LemmaPredicate, TagStats,
};
use regkg_core::relations::RelationEdge;
use regkg_core::taggers::SpanTag;
use regkg_core::taxonomy::TagType;

use artifacts::{read_lines, split_linked, write_atomic, write_lines, LinkedRecord};
use config::{Overrides, PipelineConfig};

#[derive(Parser)]
#[command(name = "regkg", version, about = "Build, query, and serve a regulatory knowledge graph")]
struct Cli {
    /// Worker threads for per-paragraph stages (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

fn parse_on_off(s: &str) -> std::result::Result<bool, String> {
    match s {
        "on" => Ok(true),
        "off" => Ok(false),
        other => Err(format!("expected on or off, got {other:?}")),
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalModeArg {
    Exact,
    Overlap,
}

impl From<EvalModeArg> for MatchMode {
    fn from(mode: EvalModeArg) -> MatchMode {
        match mode {
            EvalModeArg::Exact => MatchMode::Exact,
            EvalModeArg::Overlap => MatchMode::Overlap,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Read corpus documents and write the paragraph artifact.
    Ingest {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Toggle coreference enrichment regardless of the config.
        #[arg(long, value_parser = parse_on_off)]
        coref: Option<bool>,
    },
    /// Tag paragraph texts, writing one span record per line.
    Tag {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Merge spans into canonical tags plus occurrences.
    Link {
        #[arg(long)]
        tagged: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract relation edges between co-sentence occurrences.
    Relate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        linked: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Assemble the property graph from stage artifacts and dump it.
    Build {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        linked: PathBuf,
        #[arg(long)]
        related: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the whole pipeline and write the dump plus a run report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the configured dump path.
        #[arg(long)]
        dump: Option<PathBuf>,
        /// Toggle coreference enrichment regardless of the config.
        #[arg(long, value_parser = parse_on_off)]
        coref: Option<bool>,
        /// Override the configured degenerate-lemma threshold.
        #[arg(long)]
        max_lemma_len: Option<usize>,
        /// Where to write the JSON report (default: next to the dump).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Query a dumped graph.
    Query {
        #[command(subcommand)]
        query: QueryCommand,
    },
    /// Corpus-wide tag statistics.
    Stats {
        #[arg(long)]
        graph: PathBuf,
        /// Concept type whose per-document lemma shares are reported.
        #[arg(long, default_value = "PROD")]
        ttype: String,
        /// Print only the per-document lemma proportions.
        #[arg(long)]
        per_document: bool,
        /// Also write the statistics as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Delete degenerate tags (short normalized lemmas) and their
    /// occurrences.
    Clean {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 1)]
        max_lemma_len: usize,
        /// Preview what would be deleted without writing anything.
        #[arg(long)]
        dry_run: bool,
        /// Where to write the cleaned dump (default: in place).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a Cypher script that recreates the graph.
    ExportCypher {
        #[arg(long)]
        graph: PathBuf,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the query endpoints over HTTP.
    Serve {
        #[arg(long)]
        graph: PathBuf,
        /// Port to bind on 127.0.0.1 (0 = any free port).
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
    /// Score predicted spans against gold spans.
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long, value_enum, default_value_t = EvalModeArg::Exact)]
        mode: EvalModeArg,
        /// Emit JSON rows instead of the text table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum QueryCommand {
    /// Tags of one concept type occurring in both document sets.
    Intersect {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        ttype: String,
        /// Title substring selecting the left document set.
        #[arg(long)]
        left: String,
        /// Title substring selecting the right document set.
        #[arg(long)]
        right: String,
        #[arg(long, default_value_t = server::DEFAULT_INTERSECT_LIMIT)]
        limit: usize,
    },
    /// Heading tree of one document.
    Toc {
        #[arg(long)]
        graph: PathBuf,
        /// Title substring; must match exactly one document.
        #[arg(long)]
        title: String,
        #[arg(long, default_value_t = 0)]
        max_plevel: u64,
    },
    /// Occurrences of tags whose lemma matches a predicate.
    Usage {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        ttype: String,
        /// Exact lemma to match.
        #[arg(long)]
        lemma: Option<String>,
        /// Substring the lemma must contain; repeatable.
        #[arg(long = "contains")]
        contains: Vec<String>,
    },
    /// Shortest paths between occurrence pairs matched by text substrings.
    Paths {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        src_contains: String,
        #[arg(long)]
        dst_contains: String,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        #[arg(long, default_value_t = server::DEFAULT_PATHS_LIMIT)]
        limit: usize,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if cli.jobs > 0 {
        // Ignore the error when a pool already exists (repeat invocation in
        // tests); the flag is best-effort tuning.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", serde_json::json!({ "error": format!("{err:#}") }));
            ExitCode::FAILURE
        }
    }
}

fn load_graph(path: &Path) -> Result<PropertyGraph> {
    load_from_path(path).with_context(|| format!("loading graph {}", path.display()))
}

fn parse_ttype(code: &str) -> Result<TagType> {
    Ok(code.parse::<TagType>()?)
}

fn write_dump(graph: &PropertyGraph, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    Ok(dump_to_path(graph, path)?)
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Ingest { config, out, coref } => {
            let overrides = Overrides { coref, ..Overrides::default() };
            let config = PipelineConfig::load(&config, &overrides)?;
            let docs = stages::ingest(&config)?;
            write_lines(&out, &docs)
        }
        Command::Tag { config, corpus, out } => {
            let config = PipelineConfig::load(&config, &Overrides::default())?;
            let docs: Vec<IngestedDocument> = read_lines(&corpus)?;
            let spans = stages::tag(&config, &docs)?;
            write_lines(&out, &spans)
        }
        Command::Link { tagged, out } => {
            let spans: Vec<SpanTag> = read_lines(&tagged)?;
            let (tags, occurrences) = stages::link(&spans);
            let mut records: Vec<LinkedRecord> = tags.into_iter().map(LinkedRecord::Tag).collect();
            records.extend(occurrences.into_iter().map(LinkedRecord::Occur));
            write_lines(&out, &records)
        }
        Command::Relate { config, corpus, linked, out } => {
            let config = PipelineConfig::load(&config, &Overrides::default())?;
            let docs: Vec<IngestedDocument> = read_lines(&corpus)?;
            let (_, occurrences) = split_linked(read_lines(&linked)?);
            let relations = stages::relate(&config, &docs, &occurrences)?;
            write_lines(&out, &relations)
        }
        Command::Build { corpus, linked, related, out } => {
            let docs: Vec<IngestedDocument> = read_lines(&corpus)?;
            let (tags, occurrences) = split_linked(read_lines(&linked)?);
            let relations: Vec<RelationEdge> = read_lines(&related)?;
            let graph = stages::build(&docs, &tags, &occurrences, &relations)?;
            write_dump(&graph, &out)
        }
        Command::Run { config, dump, coref, max_lemma_len, report } => {
            let overrides = Overrides { dump, coref, max_lemma_len };
            let config = PipelineConfig::load(&config, &overrides)?;
            let (_, run_report) = stages::run(&config)?;
            let report_path =
                report.unwrap_or_else(|| config.output.dump.with_extension("report.json"));
            write_atomic(&report_path, serde_json::to_string_pretty(&run_report)?.as_bytes())?;
            print!("{}", report::render_run_report(&run_report));
            println!("report written to {}", report_path.display());
            Ok(())
        }
        Command::Query { query } => dispatch_query(query),
        Command::Stats { graph, ttype, per_document, out } => {
            let graph = load_graph(&graph)?;
            let stats = compute_stats(&graph, parse_ttype(&ttype)?);
            if let Some(out) = &out {
                write_atomic(out, stats_csv(&stats)?.as_bytes())?;
            }
            if per_document {
                print_json(&stats.lemma_proportions)
            } else {
                print_json(&stats)
            }
        }
        Command::Clean { graph: graph_path, max_lemma_len, dry_run, out } => {
            let mut graph = load_graph(&graph_path)?;
            let preview = stages::degenerate_preview(&graph, max_lemma_len);
            print!("{}", report::render_degenerate(&preview));
            if dry_run {
                let mut probe = graph.clone();
                let (nodes, edges) = clean_degenerate(&mut probe, max_lemma_len);
                println!("Would delete {nodes} nodes and {edges} relationships.");
                return Ok(());
            }
            let started = Instant::now();
            let (nodes, edges) = clean_degenerate(&mut graph, max_lemma_len);
            let target = out.unwrap_or(graph_path);
            write_dump(&graph, &target)?;
            println!(
                "Deleted {nodes} nodes, deleted {edges} relationships, completed after {} ms.",
                started.elapsed().as_millis()
            );
            Ok(())
        }
        Command::ExportCypher { graph, out } => {
            let graph = load_graph(&graph)?;
            let script = export_cypher(&graph);
            match out {
                Some(path) => write_atomic(&path, script.as_bytes()),
                None => {
                    print!("{script}");
                    Ok(())
                }
            }
        }
        Command::Serve { graph, port } => {
            let graph = load_graph(&graph)?;
            server::serve(graph, port)
        }
        Command::Eval { gold, pred, mode, json } => {
            let gold: Vec<SpanTag> = read_lines(&gold)?;
            let pred: Vec<SpanTag> = read_lines(&pred)?;
            let reports = evaluate_spans(&gold, &pred, mode.into());
            let rows = report::eval_rows(&reports);
            if json {
                print_json(&rows)
            } else {
                print!("{}", report::render_eval(&rows));
                Ok(())
            }
        }
    }
}

fn dispatch_query(query: QueryCommand) -> Result<()> {
    match query {
        QueryCommand::Intersect { graph, ttype, left, right, limit } => {
            let graph = load_graph(&graph)?;
            let results = intersect_documents(&graph, parse_ttype(&ttype)?, &left, &right, limit)?;
            print_json(&results)
        }
        QueryCommand::Toc { graph, title, max_plevel } => {
            let graph = load_graph(&graph)?;
            let toc = table_of_contents(&graph, &title, max_plevel)?;
            print_json(&toc)
        }
        QueryCommand::Usage { graph, ttype, lemma, contains } => {
            let predicate = match (lemma, contains) {
                (Some(lemma), terms) if terms.is_empty() => LemmaPredicate::Exact { lemma },
                (None, terms) if !terms.is_empty() => LemmaPredicate::ContainsAll { terms },
                _ => bail!("pass exactly one of --lemma or --contains"),
            };
            let graph = load_graph(&graph)?;
            print_json(&tag_usage(&graph, parse_ttype(&ttype)?, &predicate))
        }
        QueryCommand::Paths { graph, src_contains, dst_contains, max_len, limit } => {
            let graph = load_graph(&graph)?;
            let paths = shortest_paths(&graph, &src_contains, &dst_contains, max_len, limit)?;
            print_json(&paths)
        }
    }
}

/// Flatten the statistics into rows of `section,a,b,value`.
fn stats_csv(stats: &TagStats) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["section", "a", "b", "value"])?;
    for (ttype, count) in &stats.occurrences_by_ttype {
        writer.write_record(["occurrences_by_ttype", ttype, "", &count.to_string()])?;
    }
    for (ttype, count) in &stats.tags_by_ttype {
        writer.write_record(["tags_by_ttype", ttype, "", &count.to_string()])?;
    }
    for (title, counts) in &stats.document_ttype_counts {
        for (ttype, count) in counts {
            writer.write_record(["document_ttype_counts", title, ttype, &count.to_string()])?;
        }
    }
    for (title, shares) in &stats.lemma_proportions {
        for (lemma, share) in shares {
            writer.write_record(["lemma_proportions", title, lemma, &share.to_string()])?;
        }
    }
    for (row, cols) in &stats.cooccurrence {
        for (col, count) in cols {
            writer.write_record(["cooccurrence", row, col, &count.to_string()])?;
        }
    }
    Ok(String::from_utf8(writer.into_inner()?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn on_off_parser_accepts_only_toggles() {
        assert_eq!(parse_on_off("on"), Ok(true));
        assert_eq!(parse_on_off("off"), Ok(false));
        assert!(parse_on_off("yes").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn stats_csv_has_headers_and_sections() {
        let graph = PropertyGraph::new();
        let stats = compute_stats(&graph, TagType::Prod);
        let csv = stats_csv(&stats).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("section,a,b,value"));
        assert!(csv.contains("occurrences_by_ttype,PERM,,0"));
        assert!(csv.contains("cooccurrence,PROD,PROD,0"));
    }
}
