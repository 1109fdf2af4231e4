//! Pipeline configuration: one declarative TOML document plus a small set
//! of command-line overrides. Validation checks every referenced path
//! before any stage runs.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use regkg_core::corpus::SourceFormat;
use regkg_core::taxonomy::TagType;
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentEntry {
    pub path: PathBuf,
    pub title: String,
    pub format: SourceFormat,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSection {
    pub documents: Vec<DocumentEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceSection {
    pub glossary: PathBuf,
    pub lexicon_dir: PathBuf,
    pub patterns: PathBuf,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorefSection {
    #[serde(default)]
    pub enabled: bool,
    pub rules: Option<PathBuf>,
    /// Preceding paragraphs offered as antecedent context.
    #[serde(default = "default_window")]
    pub window: usize,
}

fn default_window() -> usize {
    3
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationSection {
    pub triggers: Option<PathBuf>,
    pub constraints: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CleanSection {
    #[serde(default = "default_max_lemma_len")]
    pub max_lemma_len: usize,
}

impl Default for CleanSection {
    fn default() -> Self {
        CleanSection { max_lemma_len: default_max_lemma_len() }
    }
}

fn default_max_lemma_len() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dump: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: CorpusSection,
    pub resources: ResourceSection,
    #[serde(default)]
    pub coref: CorefSection,
    #[serde(default)]
    pub relations: RelationSection,
    #[serde(default)]
    pub clean: CleanSection,
    pub output: OutputSection,
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub dump: Option<PathBuf>,
    pub coref: Option<bool>,
    pub max_lemma_len: Option<usize>,
}

impl PipelineConfig {
    /// Load, resolve relative paths against the config file's directory,
    /// apply overrides, and validate.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<PipelineConfig> {
        let src = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut config: PipelineConfig =
            toml::from_str(&src).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        config.resolve_paths(base);
        if let Some(dump) = &overrides.dump {
            config.output.dump = dump.clone();
        }
        if let Some(enabled) = overrides.coref {
            config.coref.enabled = enabled;
        }
        if let Some(len) = overrides.max_lemma_len {
            config.clean.max_lemma_len = len;
        }
        config.validate()?;
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for doc in &mut self.corpus.documents {
            resolve(&mut doc.path);
        }
        resolve(&mut self.resources.glossary);
        resolve(&mut self.resources.lexicon_dir);
        resolve(&mut self.resources.patterns);
        if let Some(rules) = &mut self.coref.rules {
            resolve(rules);
        }
        if let Some(triggers) = &mut self.relations.triggers {
            resolve(triggers);
        }
        if let Some(constraints) = &mut self.relations.constraints {
            resolve(constraints);
        }
        resolve(&mut self.output.dump);
    }

    fn validate(&self) -> Result<()> {
        if self.corpus.documents.is_empty() {
            bail!("config lists no corpus documents");
        }
        let mut titles = std::collections::BTreeSet::new();
        for doc in &self.corpus.documents {
            if doc.title.trim().is_empty() {
                bail!("corpus document {} has an empty title", doc.path.display());
            }
            if !titles.insert(doc.title.as_str()) {
                bail!("duplicate document title {:?}", doc.title);
            }
            require(&doc.path, "corpus document")?;
        }
        require(&self.resources.glossary, "glossary")?;
        require(&self.resources.patterns, "pattern file")?;
        if !self.resources.lexicon_dir.is_dir() {
            bail!("lexicon directory {} does not exist", self.resources.lexicon_dir.display());
        }
        for ttype in TagType::ALL {
            if ttype == TagType::Def {
                continue;
            }
            require(&self.lexicon_path(ttype), "lexicon")?;
        }
        if self.coref.enabled {
            match &self.coref.rules {
                Some(rules) => require(rules, "coreference rules")?,
                None => bail!("coref.enabled is true but coref.rules is not set"),
            }
        }
        match (&self.relations.triggers, &self.relations.constraints) {
            (Some(t), Some(c)) => {
                require(t, "relation triggers")?;
                require(c, "relation constraints")?;
            }
            (None, None) => {}
            _ => bail!("relations.triggers and relations.constraints must be set together"),
        }
        Ok(())
    }

    pub fn lexicon_path(&self, ttype: TagType) -> PathBuf {
        self.resources.lexicon_dir.join(format!("{}.lex", ttype.code()))
    }
}

fn require(path: &Path, what: &str) -> Result<()> {
    if !path.is_file() {
        bail!("{what} {} does not exist", path.display());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_minimal_tree(dir: &Path) {
        fs::create_dir_all(dir.join("lex")).unwrap();
        fs::write(dir.join("doc.md"), "# T\nbody\n").unwrap();
        fs::write(dir.join("glossary.csv"), "term,lemma_mask\n").unwrap();
        fs::write(dir.join("patterns.txt"), "").unwrap();
        for ttype in TagType::ALL {
            if ttype != TagType::Def {
                fs::write(dir.join("lex").join(format!("{}.lex", ttype.code())), "").unwrap();
            }
        }
    }

    fn minimal_toml() -> &'static str {
        concat!(
            "[[corpus.documents]]\n",
            "path = \"doc.md\"\n",
            "title = \"Test Rulebook (TR)\"\n",
            "format = \"md\"\n",
            "[resources]\n",
            "glossary = \"glossary.csv\"\n",
            "lexicon_dir = \"lex\"\n",
            "patterns = \"patterns.txt\"\n",
            "[output]\n",
            "dump = \"out/graph.rkgd\"\n",
        )
    }

    #[test]
    fn loads_and_resolves_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        write_minimal_tree(dir.path());
        let config_path = dir.path().join("config.toml");
        fs::write(&config_path, minimal_toml()).unwrap();
        let config = PipelineConfig::load(&config_path, &Overrides::default()).unwrap();
        assert_eq!(config.corpus.documents[0].path, dir.path().join("doc.md"));
        assert_eq!(config.output.dump, dir.path().join("out/graph.rkgd"));
        assert_eq!(config.clean.max_lemma_len, 1);
        assert!(!config.coref.enabled);
    }

    #[test]
    fn missing_glossary_fails_before_any_work() {
        let dir = tempfile::tempdir().unwrap();
        write_minimal_tree(dir.path());
        fs::remove_file(dir.path().join("glossary.csv")).unwrap();
        let config_path = dir.path().join("config.toml");
        fs::write(&config_path, minimal_toml()).unwrap();
        let err = PipelineConfig::load(&config_path, &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("glossary"));
    }

    #[test]
    fn coref_requires_rules_path() {
        let dir = tempfile::tempdir().unwrap();
        write_minimal_tree(dir.path());
        let config_path = dir.path().join("config.toml");
        fs::write(&config_path, format!("{}[coref]\nenabled = true\n", minimal_toml())).unwrap();
        let err = PipelineConfig::load(&config_path, &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("coref.rules"));
    }

    #[test]
    fn overrides_replace_config_values() {
        let dir = tempfile::tempdir().unwrap();
        write_minimal_tree(dir.path());
        let config_path = dir.path().join("config.toml");
        fs::write(&config_path, minimal_toml()).unwrap();
        let overrides = Overrides {
            dump: Some(dir.path().join("custom.rkgd")),
            coref: None,
            max_lemma_len: Some(2),
        };
        let config = PipelineConfig::load(&config_path, &overrides).unwrap();
        assert_eq!(config.output.dump, dir.path().join("custom.rkgd"));
        assert_eq!(config.clean.max_lemma_len, 2);
    }

    #[test]
    fn duplicate_titles_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write_minimal_tree(dir.path());
        let config_path = dir.path().join("config.toml");
        let entry = "[[corpus.documents]]\npath = \"doc.md\"\ntitle = \"Test Rulebook (TR)\"\nformat = \"md\"\n";
        let doubled = minimal_toml().replacen(entry, &format!("{entry}{entry}"), 1);
        fs::write(&config_path, doubled).unwrap();
        let err = PipelineConfig::load(&config_path, &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("duplicate document title"));
    }
}
