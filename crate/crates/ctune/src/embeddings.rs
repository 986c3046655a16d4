//! Precomputed embedding files: one `id<TAB>v1,v2,...,vD` record per line.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ctune_core::Embedding;

#[derive(Debug, thiserror::Error)]
pub enum EmbeddingsError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

/// Reads and L2-normalizes every vector. All records must share one
/// dimension; blank lines are skipped.
pub fn load_embeddings(path: &Path) -> Result<BTreeMap<String, Embedding>, EmbeddingsError> {
    let text = fs::read_to_string(path).map_err(|source| EmbeddingsError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_embeddings(&text).map_err(|(line, message)| EmbeddingsError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    })
}

/// Parses file contents; errors carry the 1-based line number.
pub fn parse_embeddings(text: &str) -> Result<BTreeMap<String, Embedding>, (usize, String)> {
    let mut out = BTreeMap::new();
    let mut dims: Option<(usize, usize)> = None;
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (id, values) = line
            .split_once('\t')
            .ok_or_else(|| (n, "expected `id<TAB>values`".to_string()))?;
        if id.is_empty() {
            return Err((n, "empty id".into()));
        }
        let values = values
            .split(',')
            .enumerate()
            .map(|(j, v)| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| (n, format!("value {}: {e}", j + 1)))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        match dims {
            None => dims = Some((values.len(), n)),
            Some((d, first)) if d != values.len() => {
                return Err((
                    n,
                    format!("{} values, expected {d} as on line {first}", values.len()),
                ))
            }
            Some(_) => {}
        }
        let emb =
            Embedding::normalized(values).ok_or_else(|| (n, "non-finite value".to_string()))?;
        if out.insert(id.to_string(), emb).is_some() {
            return Err((n, format!("duplicate id `{id}`")));
        }
    }
    Ok(out)
}

/// Formats vectors in the file layout, ids in ascending order.
pub fn format_embeddings(vectors: &BTreeMap<String, Embedding>) -> String {
    let mut out = String::new();
    for (id, v) in vectors {
        out.push_str(id);
        out.push('\t');
        for (j, x) in v.values().iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{x:?}").unwrap();
        }
        out.push('\n');
    }
    out
}
