//! Pipeline stages over in-memory values. Subcommands wrap these with the
//! line-JSON artifacts, and `run` chains them directly, so stage-wise and
//! single-run executions share one code path per stage.

use std::collections::HashMap;
use std::fs;
use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;
use regkg_core::clean::find_degenerate;
use regkg_core::coref::{self, CorefRule};
use regkg_core::corpus::{ingest_document, IngestedDocument, Paragraph};
use regkg_core::graph::{build_graph, GraphCensus, PropertyGraph};
use regkg_core::ids::NodeId;
use regkg_core::linker::{self, Tag, TagOccur};
use regkg_core::relations::{extract_relations, RelationEdge, RelationLexicon};
use regkg_core::taggers::{parse_glossary, run_group, Lexicon, PatternSet, SpanTag, TagResources};
use regkg_core::taxonomy::{standard_groups, verify_partition, TagType};
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;

pub fn load_tag_resources(config: &PipelineConfig) -> Result<TagResources> {
    let glossary_src = fs::read_to_string(&config.resources.glossary)
        .with_context(|| format!("reading {}", config.resources.glossary.display()))?;
    let glossary = parse_glossary(&glossary_src)?;
    let mut lexicons = std::collections::BTreeMap::new();
    for ttype in TagType::ALL {
        if ttype == TagType::Def {
            continue;
        }
        let path = config.lexicon_path(ttype);
        let src =
            fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        lexicons.insert(ttype, Lexicon::parse(&src));
    }
    let patterns_src = fs::read_to_string(&config.resources.patterns)
        .with_context(|| format!("reading {}", config.resources.patterns.display()))?;
    let patterns = PatternSet::parse(&patterns_src)?;
    Ok(TagResources { glossary, lexicons, patterns })
}

pub fn load_coref_rules(config: &PipelineConfig) -> Result<Vec<CorefRule>> {
    let path = config
        .coref
        .rules
        .as_ref()
        .context("coreference is enabled but no rules path is configured")?;
    let src = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(coref::parse_rules(&src)?)
}

pub fn load_relation_lexicon(config: &PipelineConfig) -> Result<RelationLexicon> {
    match (&config.relations.triggers, &config.relations.constraints) {
        (Some(triggers), Some(constraints)) => {
            let triggers_src = fs::read_to_string(triggers)
                .with_context(|| format!("reading {}", triggers.display()))?;
            let constraints_src = fs::read_to_string(constraints)
                .with_context(|| format!("reading {}", constraints.display()))?;
            Ok(RelationLexicon::parse(&triggers_src, &constraints_src)?)
        }
        _ => Ok(RelationLexicon::builtin()),
    }
}

/// Read every corpus document and, when coreference is enabled, rewrite
/// each paragraph's enriched text. Context paragraphs never cross a
/// document boundary and are always original (pre-enrichment) texts, so
/// paragraphs enrich independently.
pub fn ingest(config: &PipelineConfig) -> Result<Vec<IngestedDocument>> {
    let mut docs = Vec::new();
    for entry in &config.corpus.documents {
        let source = fs::read_to_string(&entry.path)
            .with_context(|| format!("reading {}", entry.path.display()))?;
        let doc = ingest_document(&source, &entry.title, entry.format)
            .with_context(|| format!("ingesting {}", entry.path.display()))?;
        docs.push(doc);
    }
    if config.coref.enabled {
        let rules = load_coref_rules(config)?;
        let resources = load_tag_resources(config)?;
        for doc in &mut docs {
            enrich_document(doc, &rules, &resources, config.coref.window)?;
        }
    }
    Ok(docs)
}

fn enrich_document(
    doc: &mut IngestedDocument,
    rules: &[CorefRule],
    resources: &TagResources,
    window: usize,
) -> Result<()> {
    let originals: Vec<String> = doc.paragraphs.iter().map(|p| p.text.clone()).collect();
    let enriched = doc
        .paragraphs
        .par_iter()
        .enumerate()
        .map(|(i, para)| {
            let lo = i.saturating_sub(window);
            let context: Vec<&str> = originals[lo..i].iter().map(String::as_str).collect();
            let enrichment = coref::resolve(&para.para_id, &para.text, &context, rules, resources);
            enrichment.apply(&para.text)
        })
        .collect::<regkg_core::Result<Vec<String>>>()?;
    for (para, text) in doc.paragraphs.iter_mut().zip(enriched) {
        para.enriched_text = text;
    }
    Ok(())
}

fn all_paragraphs(docs: &[IngestedDocument]) -> Vec<&Paragraph> {
    docs.iter().flat_map(|d| d.paragraphs.iter()).collect()
}

/// Run every tagger group over every paragraph's enriched text. Spans per
/// paragraph are ordered by position, paragraphs by corpus order.
pub fn tag(config: &PipelineConfig, docs: &[IngestedDocument]) -> Result<Vec<SpanTag>> {
    let resources = load_tag_resources(config)?;
    let groups = standard_groups();
    verify_partition(&groups)?;
    let per_para = all_paragraphs(docs)
        .par_iter()
        .map(|para| {
            let mut spans = Vec::new();
            for group in &groups {
                spans.extend(run_group(&para.para_id, &para.enriched_text, group, &resources)?);
            }
            spans.sort_by(|a, b| {
                a.start.cmp(&b.start).then(a.end.cmp(&b.end)).then(a.ttype.cmp(&b.ttype))
            });
            Ok(spans)
        })
        .collect::<regkg_core::Result<Vec<Vec<SpanTag>>>>()?;
    Ok(per_para.into_iter().flatten().collect())
}

pub fn link(spans: &[SpanTag]) -> (Vec<Tag>, Vec<TagOccur>) {
    linker::link(spans)
}

/// Extract relation edges per paragraph, in corpus order.
pub fn relate(
    config: &PipelineConfig,
    docs: &[IngestedDocument],
    occurrences: &[TagOccur],
) -> Result<Vec<RelationEdge>> {
    let lexicon = load_relation_lexicon(config)?;
    let mut by_para: HashMap<&NodeId, Vec<TagOccur>> = HashMap::new();
    for occ in occurrences {
        by_para.entry(&occ.para_id).or_default().push(occ.clone());
    }
    let per_para: Vec<Vec<RelationEdge>> = all_paragraphs(docs)
        .par_iter()
        .map(|para| match by_para.get(&para.para_id) {
            Some(occs) => extract_relations(&para.enriched_text, occs, &lexicon),
            None => Vec::new(),
        })
        .collect();
    Ok(per_para.into_iter().flatten().collect())
}

pub fn build(
    docs: &[IngestedDocument],
    tags: &[Tag],
    occurrences: &[TagOccur],
    relations: &[RelationEdge],
) -> Result<PropertyGraph> {
    Ok(build_graph(docs, tags, occurrences, relations)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub millis: u128,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TagCount {
    pub ttype: String,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegenerateRow {
    pub text: String,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub stages: Vec<StageTiming>,
    pub census: GraphCensus,
    pub tag_counts: Vec<TagCount>,
    pub degenerate_preview: Vec<DegenerateRow>,
    pub dump: String,
}

pub const DEGENERATE_PREVIEW_LIMIT: usize = 20;

/// Canonical Tag counts per concept type, most frequent first.
pub fn tag_counts(census: &GraphCensus) -> Vec<TagCount> {
    let mut counts: Vec<TagCount> = census
        .tag_types
        .iter()
        .map(|(ttype, count)| TagCount { ttype: ttype.clone(), count: *count })
        .collect();
    counts.sort_by(|a, b| b.count.cmp(&a.count).then(a.ttype.cmp(&b.ttype)));
    counts
}

pub fn degenerate_preview(graph: &PropertyGraph, max_lemma_len: usize) -> Vec<DegenerateRow> {
    find_degenerate(graph, max_lemma_len)
        .into_iter()
        .take(DEGENERATE_PREVIEW_LIMIT)
        .map(|(text, count)| DegenerateRow { text, count })
        .collect()
}

/// Full pipeline: ingest, tag, link, relate, build, then write the dump.
/// Nothing is written until the graph has been built and validated.
pub fn run(config: &PipelineConfig) -> Result<(PropertyGraph, RunReport)> {
    let mut stages = Vec::new();
    let mut timed = |stage: &str, start: Instant| {
        stages.push(StageTiming { stage: stage.to_string(), millis: start.elapsed().as_millis() });
    };

    let start = Instant::now();
    let docs = ingest(config)?;
    timed("ingest", start);

    let start = Instant::now();
    let spans = tag(config, &docs)?;
    timed("tag", start);

    let start = Instant::now();
    let (tags, occurrences) = link(&spans);
    timed("link", start);

    let start = Instant::now();
    let relations = relate(config, &docs, &occurrences)?;
    timed("relate", start);

    let start = Instant::now();
    let graph = build(&docs, &tags, &occurrences, &relations)?;
    timed("build", start);

    if let Some(parent) = config.output.dump.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    regkg_core::dump::dump_to_path(&graph, &config.output.dump)?;

    let census = graph.census();
    let report = RunReport {
        stages,
        tag_counts: tag_counts(&census),
        degenerate_preview: degenerate_preview(&graph, config.clean.max_lemma_len),
        census,
        dump: config.output.dump.display().to_string(),
    };
    Ok((graph, report))
}
