use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

/// The seven applications whose data forms a persona's context stores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum App {
    Mail,
    Calendar,
    Google,
    Music,
    Reminders,
    Notes,
    Phonecall,
}

impl App {
    pub const ALL: [App; 7] = [
        App::Mail,
        App::Calendar,
        App::Google,
        App::Music,
        App::Reminders,
        App::Notes,
        App::Phonecall,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            App::Mail => "mail",
            App::Calendar => "calendar",
            App::Google => "google",
            App::Music => "music",
            App::Reminders => "reminders",
            App::Notes => "notes",
            App::Phonecall => "phonecall",
        }
    }

    /// Position in [`App::ALL`]; the one-hot feature order.
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for App {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for App {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        App::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| format!("unknown app `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Persona {
    pub id: String,
    pub attributes: BTreeMap<String, String>,
    /// Habitual usage weight per app; sums to 1.
    pub app_usage_profile: BTreeMap<App, f64>,
}

impl Persona {
    pub fn usage_weight(&self, app: App) -> f64 {
        self.app_usage_profile.get(&app).copied().unwrap_or(0.0)
    }

    /// Apps by descending usage weight, ties in [`App::ALL`] order.
    pub fn apps_by_usage(&self) -> Vec<App> {
        let mut apps: Vec<App> = App::ALL.to_vec();
        apps.sort_by(|a, b| {
            self.usage_weight(*b)
                .partial_cmp(&self.usage_weight(*a))
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(a.cmp(b))
        });
        apps
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextItem {
    pub id: String,
    pub app: App,
    pub title: String,
    pub body: String,
    pub timestamp: DateTime<Utc>,
    pub categorical_tags: BTreeMap<String, String>,
    pub access_count: u32,
}

impl ContextItem {
    /// `"title. body"`, the text every retriever sees.
    pub fn text(&self) -> String {
        format!("{}. {}", self.title, self.body)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextStore {
    pub persona_id: String,
    pub app: App,
    pub items: Vec<ContextItem>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolParam {
    pub name: String,
    pub description: String,
    pub required: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub app: App,
    pub description: String,
    /// Required parameters come first.
    pub params: Vec<ToolParam>,
}

impl Tool {
    /// Text the tool retriever indexes: name, description and param names.
    pub fn document(&self) -> String {
        let mut doc = format!("{} {}", self.name, self.description);
        for p in &self.params {
            doc.push(' ');
            doc.push_str(&p.name);
        }
        doc
    }

    pub fn required_params(&self) -> impl Iterator<Item = &ToolParam> {
        self.params.iter().filter(|p| p.required)
    }
}

/// A single resolved API call.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Plan {
    pub api: String,
    pub args: BTreeMap<String, String>,
}

impl Plan {
    pub fn new(api: impl Into<String>) -> Self {
        Self {
            api: api.into(),
            args: BTreeMap::new(),
        }
    }

    pub fn arg(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.args.insert(key.into(), value.into());
        self
    }

    /// `api(k1="v1", k2="v2")` with keys in lexicographic order.
    pub fn canonical(&self) -> String {
        let mut s = format!("{}(", self.api);
        for (i, (k, v)) in self.args.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            s.push_str(&format!("{k}={v:?}"));
        }
        s.push(')');
        s
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            _ => Err(format!("unknown split `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledQuery {
    pub id: String,
    pub persona_id: String,
    pub text: String,
    pub timestamp: DateTime<Utc>,
    pub gold_context_ids: Vec<String>,
    /// Most relevant first, at most three.
    pub gold_tools: Vec<String>,
    pub gold_plan: Plan,
    pub split: Split,
}

/// Personas, their context stores, the toolbox and the labeled queries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub personas: Vec<Persona>,
    pub stores: Vec<ContextStore>,
    pub toolbox: Vec<Tool>,
    pub queries: Vec<LabeledQuery>,
}

impl Corpus {
    pub fn persona(&self, id: &str) -> Option<&Persona> {
        self.personas.iter().find(|p| p.id == id)
    }

    pub fn stores_of<'a>(&'a self, persona_id: &'a str) -> impl Iterator<Item = &'a ContextStore> {
        self.stores
            .iter()
            .filter(move |s| s.persona_id == persona_id)
    }

    pub fn queries_in(&self, split: Split) -> impl Iterator<Item = &LabeledQuery> {
        self.queries.iter().filter(move |q| q.split == split)
    }

    pub fn tool(&self, name: &str) -> Option<&Tool> {
        self.toolbox.iter().find(|t| t.name == name)
    }

    pub fn item_count(&self) -> usize {
        self.stores.iter().map(|s| s.items.len()).sum()
    }

    /// Groups stores by persona for repeated lookups.
    pub fn stores_by_persona(&self) -> BTreeMap<&str, Vec<&ContextStore>> {
        let mut m: BTreeMap<&str, Vec<&ContextStore>> = BTreeMap::new();
        for s in &self.stores {
            m.entry(s.persona_id.as_str()).or_default().push(s);
        }
        m
    }
}
