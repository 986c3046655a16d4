//! Model and training-log files.
//!
//! The model file is line oriented:
//!
//! ```text
//! ctune-ltr 1
//! schema bm25_score cosine_sim ...
//! schema_hash 5c1f...
//! sigma 1.0
//! learning_rate 0.1
//! base_score 0.0
//! trees 2
//! tree S 0 0.5 L -1.0 L 1.0
//! tree L 0.25
//! ```
//!
//! Each `tree` line lists the nodes in preorder: `S feature threshold` for a
//! split, `L value` for a leaf. Floats use the shortest representation that
//! parses back to the same bits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ctune_core::ltr::{schema_hash, Node, RegressionTree, RoundStat};
use ctune_core::LtrModel;

pub const MODEL_MAGIC: &str = "ctune-ltr";
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ModelIoError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("feature schema mismatch: file has [{found}], expected [{expected}]")]
    SchemaMismatch { found: String, expected: String },
    #[error("schema hash {stored} does not match the listed schema ({computed})")]
    HashMismatch { stored: String, computed: String },
    #[error("model is malformed: {0}")]
    Malformed(String),
    #[error("training log: {0}")]
    Csv(#[from] csv::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> ModelIoError {
    ModelIoError::Parse {
        line,
        message: message.into(),
    }
}

/// Serializes a model into the line format.
pub fn format_model(model: &LtrModel) -> String {
    let mut s = String::new();
    writeln!(s, "{MODEL_MAGIC} {MODEL_FORMAT_VERSION}").unwrap();
    writeln!(s, "schema {}", model.feature_schema.join(" ")).unwrap();
    writeln!(s, "schema_hash {:016x}", model.schema_hash()).unwrap();
    writeln!(s, "sigma {:?}", model.sigma).unwrap();
    writeln!(s, "learning_rate {:?}", model.learning_rate).unwrap();
    writeln!(s, "base_score {:?}", model.base_score).unwrap();
    writeln!(s, "trees {}", model.trees.len()).unwrap();
    for tree in &model.trees {
        s.push_str("tree");
        for node in tree.preorder() {
            match node {
                Node::Split {
                    feature, threshold, ..
                } => write!(s, " S {feature} {threshold:?}").unwrap(),
                Node::Leaf { value } => write!(s, " L {value:?}").unwrap(),
            }
        }
        s.push('\n');
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next line split into its key and the rest.
    fn field(&mut self, key: &str) -> Result<(usize, &'a str), ModelIoError> {
        let (i, line) = self
            .inner
            .next()
            .ok_or_else(|| parse_err(self.last + 1, format!("missing `{key}` line")))?;
        self.last = i + 1;
        match line.split_once(' ') {
            Some((k, rest)) if k == key => Ok((i + 1, rest)),
            None if line == key => Ok((i + 1, "")),
            _ => Err(parse_err(i + 1, format!("expected `{key}`"))),
        }
    }

    fn number<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, ModelIoError>
    where
        T::Err: std::fmt::Display,
    {
        let (line, v) = self.field(key)?;
        v.trim()
            .parse()
            .map_err(|e| parse_err(line, format!("{key}: {e}")))
    }
}

fn parse_tree(line: usize, tokens: &str) -> Result<RegressionTree, ModelIoError> {
    fn num<T: std::str::FromStr>(line: usize, tok: Option<&str>) -> Result<T, ModelIoError> {
        let tok = tok.ok_or_else(|| parse_err(line, "truncated node"))?;
        tok.parse()
            .map_err(|_| parse_err(line, format!("bad number `{tok}`")))
    }
    let mut it = tokens.split_ascii_whitespace();
    let mut nodes = Vec::new();
    while let Some(tag) = it.next() {
        nodes.push(match tag {
            "S" => Node::Split {
                feature: num(line, it.next())?,
                threshold: num(line, it.next())?,
                left: 0,
                right: 0,
            },
            "L" => Node::Leaf {
                value: num(line, it.next())?,
            },
            other => return Err(parse_err(line, format!("unknown node tag `{other}`"))),
        });
    }
    RegressionTree::from_preorder(&nodes)
        .ok_or_else(|| parse_err(line, "node list is not a complete preorder tree"))
}

/// Parses a model and checks it against `expected_schema`.
pub fn parse_model<S: AsRef<str>>(
    text: &str,
    expected_schema: &[S],
) -> Result<LtrModel, ModelIoError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let version: u32 = lines.number(MODEL_MAGIC)?;
    if version != MODEL_FORMAT_VERSION {
        return Err(parse_err(
            1,
            format!("unsupported format version {version}"),
        ));
    }
    let (_, names) = lines.field("schema")?;
    let feature_schema: Vec<String> = names.split_ascii_whitespace().map(String::from).collect();
    let (line, stored) = lines.field("schema_hash")?;
    let stored = u64::from_str_radix(stored.trim(), 16)
        .map_err(|e| parse_err(line, format!("schema_hash: {e}")))?;
    let computed = schema_hash(&feature_schema);
    if stored != computed {
        return Err(ModelIoError::HashMismatch {
            stored: format!("{stored:016x}"),
            computed: format!("{computed:016x}"),
        });
    }
    if schema_hash(expected_schema) != computed {
        let join = |v: Vec<&str>| v.join(" ");
        return Err(ModelIoError::SchemaMismatch {
            found: feature_schema.join(" "),
            expected: join(expected_schema.iter().map(AsRef::as_ref).collect()),
        });
    }
    let sigma = lines.number("sigma")?;
    let learning_rate = lines.number("learning_rate")?;
    let base_score = lines.number("base_score")?;
    let n_trees: usize = lines.number("trees")?;
    let mut trees = Vec::with_capacity(n_trees);
    for _ in 0..n_trees {
        let (line, tokens) = lines.field("tree")?;
        trees.push(parse_tree(line, tokens)?);
    }
    if let Some((i, _)) = lines.inner.find(|(_, l)| !l.trim().is_empty()) {
        return Err(parse_err(i + 1, "trailing content after the last tree"));
    }
    let model = LtrModel {
        trees,
        learning_rate,
        base_score,
        feature_schema,
        sigma,
    };
    if !model.is_valid() {
        return Err(ModelIoError::Malformed(
            "non-finite parameter or out-of-range feature index".into(),
        ));
    }
    Ok(model)
}

pub fn save_model(model: &LtrModel, path: &Path) -> Result<(), ModelIoError> {
    fs::write(path, format_model(model)).map_err(|source| ModelIoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_model<S: AsRef<str>>(
    path: &Path,
    expected_schema: &[S],
) -> Result<LtrModel, ModelIoError> {
    let text = fs::read_to_string(path).map_err(|source| ModelIoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_model(&text, expected_schema)
}

/// The training log as CSV: `round,mean_train_ndcg`.
pub fn format_training_log(log: &[RoundStat]) -> Result<Vec<u8>, ModelIoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["round", "mean_train_ndcg"])?;
    for r in log {
        w.write_record([r.round.to_string(), format!("{:?}", r.mean_train_ndcg)])?;
    }
    Ok(w.into_inner()
        .map_err(|e| csv::Error::from(e.into_error()))?)
}
