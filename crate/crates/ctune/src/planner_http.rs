//! Planner backed by an HTTP endpoint that speaks JSON.
//!
//! Request: `{"query": ..., "context": [{"title", "body"}], "tools": [{"name",
//! "description", "params"}]}`. Response: `{"api": ..., "args": {...}}`.
//! A response that does not parse becomes an empty plan, which scores as
//! incorrect; transport failures and timeouts are planner errors.

use std::collections::BTreeMap;
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use ctune_core::corpus::ToolParam;
use ctune_core::pipeline::{PlanRequest, Planner, PlannerError};
use ctune_core::Plan;
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize)]
pub struct WireContext<'a> {
    pub title: &'a str,
    pub body: &'a str,
}

#[derive(Debug, Serialize)]
pub struct WireTool<'a> {
    pub name: &'a str,
    pub description: &'a str,
    pub params: &'a [ToolParam],
}

#[derive(Debug, Serialize)]
pub struct WireRequest<'a> {
    pub query: &'a str,
    pub context: Vec<WireContext<'a>>,
    pub tools: Vec<WireTool<'a>>,
}

impl<'a> WireRequest<'a> {
    /// Tools are sent in ranked order; names missing from the toolbox are
    /// dropped since there is nothing to describe.
    pub fn new(req: &'a PlanRequest<'a>) -> Self {
        Self {
            query: &req.query.text,
            context: req
                .context
                .iter()
                .map(|c| WireContext {
                    title: &c.title,
                    body: &c.body,
                })
                .collect(),
            tools: req
                .tools
                .ids()
                .filter_map(|name| req.toolbox.iter().find(|t| t.name == name))
                .map(|t| WireTool {
                    name: &t.name,
                    description: &t.description,
                    params: &t.params,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Deserialize)]
struct WirePlan {
    api: String,
    #[serde(default)]
    args: BTreeMap<String, serde_json::Value>,
}

/// Decodes a response body. Scalar argument values are taken as their
/// JSON text; anything else makes the plan unparseable.
pub fn parse_plan(body: &str) -> Option<Plan> {
    let wire: WirePlan = serde_json::from_str(body).ok()?;
    let mut plan = Plan::new(wire.api);
    for (k, v) in wire.args {
        let v = match v {
            serde_json::Value::String(s) => s,
            serde_json::Value::Null => String::new(),
            serde_json::Value::Bool(_) | serde_json::Value::Number(_) => v.to_string(),
            _ => return None,
        };
        plan.args.insert(k, v);
    }
    Some(plan)
}

/// Counting semaphore bounding in-flight requests.
struct Gate {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Gate {
    fn acquire(&self) -> GateGuard<'_> {
        let mut free = self.free.lock().unwrap_or_else(|e| e.into_inner());
        while *free == 0 {
            free = self.cv.wait(free).unwrap_or_else(|e| e.into_inner());
        }
        *free -= 1;
        GateGuard(self)
    }
}

struct GateGuard<'a>(&'a Gate);

impl Drop for GateGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap_or_else(|e| e.into_inner()) += 1;
        self.0.cv.notify_one();
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HttpPlannerConfig {
    pub url: String,
    pub timeout_ms: u64,
    /// Upper bound on concurrent requests.
    pub max_in_flight: usize,
}

pub struct HttpPlanner {
    url: String,
    agent: ureq::Agent,
    gate: Gate,
}

impl HttpPlanner {
    pub fn new(cfg: &HttpPlannerConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(cfg.timeout_ms)))
            .build()
            .into();
        Self {
            url: cfg.url.clone(),
            agent,
            gate: Gate {
                free: Mutex::new(cfg.max_in_flight.max(1)),
                cv: Condvar::new(),
            },
        }
    }
}

impl Planner for HttpPlanner {
    fn plan(&self, req: &PlanRequest<'_>) -> Result<Plan, PlannerError> {
        let wire = WireRequest::new(req);
        let _slot = self.gate.acquire();
        let body = self
            .agent
            .post(&self.url)
            .send_json(&wire)
            .and_then(|mut resp| resp.body_mut().read_to_string())
            .map_err(|e| match e {
                ureq::Error::Timeout(_) => PlannerError(format!("timeout calling {}", self.url)),
                other => PlannerError(format!("{}: {other}", self.url)),
            })?;
        Ok(parse_plan(&body).unwrap_or_default())
    }
}
