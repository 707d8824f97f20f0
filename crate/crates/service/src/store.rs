//! Frozen graphs and live sessions, optionally mirrored to a data directory
//! as graph text and session history exports.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use graphview_core::{parse_graph, write_graph, EdgeMode, IngestReport, LabeledGraph, NavState, Navigator};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tokio::sync::Mutex;

use crate::config::Config;
use crate::error::ApiError;

pub struct Session {
    pub id: String,
    pub graph_id: String,
    pub nav: Navigator,
}

#[derive(Serialize, Deserialize)]
struct SessionSnapshot {
    graph: String,
    mode: EdgeMode,
    history: String,
}

pub struct Store {
    config: Config,
    graphs: RwLock<HashMap<String, Arc<LabeledGraph>>>,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
}

/// Content hash of the canonical graph text.
pub fn graph_id(canonical: &str) -> String {
    Sha256::digest(canonical.as_bytes())
        .iter()
        .take(8)
        .fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

fn storage(e: impl std::fmt::Display) -> ApiError {
    ApiError::Storage(e.to_string())
}

impl Store {
    /// Opens the store, reloading persisted graphs and replaying sessions.
    pub fn open(config: Config) -> Result<Self, ApiError> {
        let store = Store {
            config,
            graphs: RwLock::default(),
            sessions: RwLock::default(),
        };
        if let Some(dir) = store.config.data_dir.clone() {
            store.load(&dir)?;
        }
        Ok(store)
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    fn load(&self, dir: &Path) -> Result<(), ApiError> {
        for sub in ["graphs", "sessions"] {
            std::fs::create_dir_all(dir.join(sub)).map_err(storage)?;
        }
        for entry in std::fs::read_dir(dir.join("graphs")).map_err(storage)? {
            let path = entry.map_err(storage)?.path();
            let text = std::fs::read_to_string(&path).map_err(storage)?;
            let (g, _) = parse_graph(&text)?;
            self.graphs
                .write()
                .unwrap()
                .insert(graph_id(&write_graph(&g)), Arc::new(g));
        }
        for entry in std::fs::read_dir(dir.join("sessions")).map_err(storage)? {
            let path = entry.map_err(storage)?.path();
            let Some(id) = path.file_stem().and_then(|s| s.to_str()).map(String::from) else {
                continue;
            };
            let snap: SessionSnapshot =
                serde_json::from_str(&std::fs::read_to_string(&path).map_err(storage)?).map_err(storage)?;
            let graph = self.graph(&snap.graph)?;
            let nav = Navigator::replay(graph, &snap.history, snap.mode)?;
            self.sessions.write().unwrap().insert(
                id.clone(),
                Arc::new(Mutex::new(Session {
                    id,
                    graph_id: snap.graph,
                    nav,
                })),
            );
        }
        tracing::info!(
            graphs = self.graphs.read().unwrap().len(),
            sessions = self.sessions.read().unwrap().len(),
            "restored state"
        );
        Ok(())
    }

    fn dir(&self, sub: &str) -> Option<PathBuf> {
        self.config.data_dir.as_ref().map(|d| d.join(sub))
    }

    /// Parses and freezes a graph. Identical content yields the same id.
    pub fn add_graph(&self, text: &str) -> Result<(String, Arc<LabeledGraph>, IngestReport), ApiError> {
        let (g, report) = parse_graph(text)?;
        let canonical = write_graph(&g);
        let id = graph_id(&canonical);
        if let Some(dir) = self.dir("graphs") {
            std::fs::create_dir_all(&dir).map_err(storage)?;
            std::fs::write(dir.join(format!("{id}.graph")), &canonical).map_err(storage)?;
        }
        let g = self
            .graphs
            .write()
            .unwrap()
            .entry(id.clone())
            .or_insert_with(|| Arc::new(g))
            .clone();
        Ok((id, g, report))
    }

    pub fn graph(&self, id: &str) -> Result<Arc<LabeledGraph>, ApiError> {
        self.graphs
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::UnknownGraph(id.to_string()))
    }

    pub fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::UnknownSession(id.to_string()))
    }

    /// Starts a session at `entry`, or by replaying `history` when given.
    pub fn create_session(
        &self,
        graph_id: &str,
        entry: Option<NavState>,
        history: Option<&str>,
        mode: EdgeMode,
    ) -> Result<Arc<Mutex<Session>>, ApiError> {
        let graph = self.graph(graph_id)?;
        let nav = match (history, entry) {
            (Some(h), _) => Navigator::replay(graph, h, mode)?,
            (None, Some(entry)) => Navigator::new(graph, entry, mode)?,
            (None, None) => return Err(ApiError::BadRequest("no entry labels".into())),
        };
        let session = Session {
            id: uuid::Uuid::new_v4().to_string(),
            graph_id: graph_id.to_string(),
            nav,
        };
        self.persist(&session)?;
        let id = session.id.clone();
        let handle = Arc::new(Mutex::new(session));
        self.sessions.write().unwrap().insert(id, handle.clone());
        Ok(handle)
    }

    /// Writes the session's history snapshot, if persistence is enabled.
    pub fn persist(&self, session: &Session) -> Result<(), ApiError> {
        let Some(dir) = self.dir("sessions") else {
            return Ok(());
        };
        std::fs::create_dir_all(&dir).map_err(storage)?;
        let snap = SessionSnapshot {
            graph: session.graph_id.clone(),
            mode: session.nav.mode(),
            history: session.nav.history().export(),
        };
        let path = dir.join(format!("{}.json", session.id));
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, serde_json::to_vec(&snap).map_err(storage)?).map_err(storage)?;
        std::fs::rename(&tmp, &path).map_err(storage)
    }
}
