use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nanotrust_core::{Iri, Vocabulary};
use serde::Deserialize;

use crate::Failure;

/// Settings read from `--config`. Relative paths are taken relative to the
/// file's directory.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub ingest: Vec<PathBuf>,
    pub policy: Option<PathBuf>,
    pub context: Option<PathBuf>,
    pub sets: Option<PathBuf>,
    /// Set name to member IRIs.
    #[serde(default)]
    pub roots_sets: BTreeMap<String, Vec<String>>,
    pub out: Option<PathBuf>,
    pub log: Option<PathBuf>,
    pub release_policy: Option<PathBuf>,
    pub requester: Option<String>,
    #[serde(default)]
    pub vocab: VocabConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VocabConfig {
    pub attribution: Option<String>,
    pub derivation: Option<String>,
    pub published: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        let mut cfg: FileConfig =
            toml::from_str(&text).map_err(|e| Failure::usage(format!("{}: {}", path.display(), e.message())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.ingest.iter_mut().for_each(fix);
        for p in [&mut cfg.policy, &mut cfg.context, &mut cfg.sets, &mut cfg.out, &mut cfg.log, &mut cfg.release_policy]
            .into_iter()
            .flatten()
        {
            fix(p);
        }
        Ok(cfg)
    }
}

/// Flag values win over file values; the defaults fill whatever is left.
pub fn vocabulary(
    attribution: Option<&str>,
    derivation: Option<&str>,
    published: Option<&str>,
    file: &VocabConfig,
) -> Result<Vocabulary, Failure> {
    let pick = |flag: Option<&str>, file: &Option<String>, default: Iri, what: &str| -> Result<Iri, Failure> {
        match flag.or(file.as_deref()) {
            Some(raw) => Iri::parse(raw).map_err(|e| Failure::usage(format!("{what} predicate {raw:?}: {e}"))),
            None => Ok(default),
        }
    };
    let d = Vocabulary::default();
    Ok(Vocabulary {
        attribution: pick(attribution, &file.attribution, d.attribution, "attribution")?,
        derivation: pick(derivation, &file.derivation, d.derivation, "derivation")?,
        published: pick(published, &file.published, d.published, "publication-time")?,
    })
}
