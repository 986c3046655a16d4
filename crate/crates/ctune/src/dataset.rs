//! The on-disk dataset: four JSON-lines files in one directory.
//!
//! `context_items.jsonl` carries every item with its `persona_id`, in store
//! order; stores are rebuilt from consecutive `(persona_id, app)` runs.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use ctune_core::corpus::{App, ContextItem, ContextStore, Corpus, LabeledQuery, Persona, Tool};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const PERSONAS_FILE: &str = "personas.jsonl";
pub const ITEMS_FILE: &str = "context_items.jsonl";
pub const TOOLBOX_FILE: &str = "toolbox.jsonl";
pub const QUERIES_FILE: &str = "queries.jsonl";

/// Dataset files in the order they are hashed.
pub const DATASET_FILES: [&str; 4] = [PERSONAS_FILE, ITEMS_FILE, TOOLBOX_FILE, QUERIES_FILE];

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("dataset directory `{0}` does not exist")]
    MissingDir(PathBuf),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: field `{field}`: {message}", file.display())]
    Parse {
        file: PathBuf,
        line: usize,
        field: String,
        message: String,
    },
    #[error("{}:{line}: {message}", file.display())]
    Invalid {
        file: PathBuf,
        line: usize,
        message: String,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// One line of `context_items.jsonl`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ItemRecord {
    persona_id: String,
    id: String,
    app: App,
    title: String,
    body: String,
    timestamp: DateTime<Utc>,
    categorical_tags: BTreeMap<String, String>,
    access_count: u32,
}

impl ItemRecord {
    fn new(persona_id: &str, item: &ContextItem) -> Self {
        Self {
            persona_id: persona_id.to_string(),
            id: item.id.clone(),
            app: item.app,
            title: item.title.clone(),
            body: item.body.clone(),
            timestamp: item.timestamp,
            categorical_tags: item.categorical_tags.clone(),
            access_count: item.access_count,
        }
    }

    fn into_item(self) -> (String, ContextItem) {
        let item = ContextItem {
            id: self.id,
            app: self.app,
            title: self.title,
            body: self.body,
            timestamp: self.timestamp,
            categorical_tags: self.categorical_tags,
            access_count: self.access_count,
        };
        (self.persona_id, item)
    }
}

/// Serializes records one per line.
fn to_lines<T: Serialize>(records: impl IntoIterator<Item = T>) -> Vec<u8> {
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, &r).expect("dataset records always serialize");
        out.push(b'\n');
    }
    out
}

/// The four files' bytes, in [`DATASET_FILES`] order.
pub fn encode_corpus(corpus: &Corpus) -> [(&'static str, Vec<u8>); 4] {
    let items = corpus
        .stores
        .iter()
        .flat_map(|s| s.items.iter().map(|i| ItemRecord::new(&s.persona_id, i)));
    [
        (PERSONAS_FILE, to_lines(&corpus.personas)),
        (ITEMS_FILE, to_lines(items)),
        (TOOLBOX_FILE, to_lines(&corpus.toolbox)),
        (QUERIES_FILE, to_lines(&corpus.queries)),
    ]
}

/// Writes the dataset files into `dir`, creating it if needed.
pub fn save_corpus(corpus: &Corpus, dir: &Path) -> Result<(), DatasetError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for (name, bytes) in encode_corpus(corpus) {
        let path = dir.join(name);
        let f = fs::File::create(&path).map_err(io_err(&path))?;
        let mut w = BufWriter::new(f);
        w.write_all(&bytes)
            .and_then(|_| w.flush())
            .map_err(io_err(&path))?;
    }
    Ok(())
}

/// Name of the field a deserialization error points at. Missing fields are
/// reported by serde against the enclosing object, so the name is recovered
/// from the message.
fn field_of(path: &serde_path_to_error::Path, message: &str) -> String {
    if let Some(rest) = message.strip_prefix("missing field `") {
        if let Some(name) = rest.split('`').next() {
            let parent = path.to_string();
            return if parent == "." {
                name.to_string()
            } else {
                format!("{parent}.{name}")
            };
        }
    }
    path.to_string()
}

fn parse_lines<T: DeserializeOwned>(
    dir: &Path,
    name: &str,
) -> Result<Vec<(usize, T)>, DatasetError> {
    let file = dir.join(name);
    let text = fs::read_to_string(&file).map_err(io_err(&file))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let de = &mut serde_json::Deserializer::from_str(line);
        match serde_path_to_error::deserialize::<_, T>(de) {
            Ok(v) => out.push((i + 1, v)),
            Err(e) => {
                let message = e.inner().to_string();
                // serde_json appends its own position, which is always line 1 here
                let message = message
                    .rsplit_once(" at line ")
                    .map_or(message.as_str(), |(m, _)| m)
                    .to_string();
                return Err(DatasetError::Parse {
                    file,
                    line: i + 1,
                    field: field_of(e.path(), &message),
                    message,
                });
            }
        }
    }
    Ok(out)
}

fn invalid(dir: &Path, name: &str, line: usize, message: String) -> DatasetError {
    DatasetError::Invalid {
        file: dir.join(name),
        line,
        message,
    }
}

/// Reads a dataset directory. Duplicate persona, item (within a persona),
/// tool or query ids are errors; cross-record invariants are left to
/// [`ctune_core::corpus::validate_corpus`].
pub fn load_corpus(dir: &Path) -> Result<Corpus, DatasetError> {
    if !dir.is_dir() {
        return Err(DatasetError::MissingDir(dir.to_path_buf()));
    }

    let mut personas = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, p) in parse_lines::<Persona>(dir, PERSONAS_FILE)? {
        if !seen.insert(p.id.clone()) {
            return Err(invalid(
                dir,
                PERSONAS_FILE,
                line,
                format!("duplicate persona id `{}`", p.id),
            ));
        }
        personas.push(p);
    }

    let mut stores: Vec<ContextStore> = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, rec) in parse_lines::<ItemRecord>(dir, ITEMS_FILE)? {
        let (persona_id, item) = rec.into_item();
        if !seen.insert((persona_id.clone(), item.id.clone())) {
            return Err(invalid(
                dir,
                ITEMS_FILE,
                line,
                format!("duplicate item id `{}` for persona `{persona_id}`", item.id),
            ));
        }
        match stores.last_mut() {
            Some(s) if s.persona_id == persona_id && s.app == item.app => s.items.push(item),
            _ => stores.push(ContextStore {
                persona_id,
                app: item.app,
                items: vec![item],
            }),
        }
    }

    let mut toolbox = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, t) in parse_lines::<Tool>(dir, TOOLBOX_FILE)? {
        if !seen.insert(t.name.clone()) {
            return Err(invalid(
                dir,
                TOOLBOX_FILE,
                line,
                format!("duplicate tool `{}`", t.name),
            ));
        }
        toolbox.push(t);
    }

    let mut queries = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, q) in parse_lines::<LabeledQuery>(dir, QUERIES_FILE)? {
        if !seen.insert(q.id.clone()) {
            return Err(invalid(
                dir,
                QUERIES_FILE,
                line,
                format!("duplicate query id `{}`", q.id),
            ));
        }
        queries.push(q);
    }

    Ok(Corpus {
        personas,
        stores,
        toolbox,
        queries,
    })
}

/// SHA-256 over the dataset files, each prefixed by its name and length.
pub fn corpus_hash_of(files: &[(&str, Vec<u8>)]) -> String {
    let mut h = Sha256::new();
    for (name, bytes) in files {
        h.update(name.as_bytes());
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    hex::encode(h.finalize())
}

/// Hash of the canonical serialization of `corpus`.
pub fn corpus_hash(corpus: &Corpus) -> String {
    corpus_hash_of(&encode_corpus(corpus))
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
