//! Read-only HTTP view of one clustering run.
//!
//! `GET /decision-graph` returns the exported document, `POST /cut` applies a
//! cut spec to the stored tree and `GET /meta` describes the run. Cuts never
//! modify the stored tree.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use dnnd_core::cuts::apply_cut;
use dnnd_core::intree::Forest;
use dnnd_core::{CutSpec, DecisionGraph, Error, Method, PotentialMode, PotentialVector};
use serde::Serialize;

/// Parameters of the run being served; all `None` when serving a file.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Meta {
    pub method: Option<Method>,
    pub k: Option<usize>,
    pub sigma: Option<f64>,
    pub mode: Option<PotentialMode>,
}

#[derive(Serialize)]
struct MetaResponse<'a> {
    n: usize,
    #[serde(flatten)]
    meta: &'a Meta,
    trace: &'a [usize],
}

#[derive(Debug)]
pub struct ServeState {
    graph: DecisionGraph,
    graph_json: String,
    forest: Forest,
    potential: PotentialVector,
    meta: Meta,
}

impl ServeState {
    pub fn new(graph: DecisionGraph, meta: Meta) -> dnnd_core::Result<Self> {
        graph.validate()?;
        let graph_json = serde_json::to_string(&graph)
            .map_err(|e| Error::Structure(format!("serializing decision graph: {e}")))?;
        Ok(Self {
            forest: graph.to_forest()?,
            potential: graph.potential_vector()?,
            graph_json,
            graph,
            meta,
        })
    }

    pub fn graph(&self) -> &DecisionGraph {
        &self.graph
    }
}

pub fn router(state: ServeState) -> Router {
    Router::new()
        .route("/decision-graph", get(decision_graph))
        .route("/cut", post(cut))
        .route("/meta", get(meta))
        .with_state(Arc::new(state))
}

async fn decision_graph(State(state): State<Arc<ServeState>>) -> Response {
    (
        [(header::CONTENT_TYPE, "application/json")],
        state.graph_json.clone(),
    )
        .into_response()
}

async fn meta(State(state): State<Arc<ServeState>>) -> Response {
    Json(MetaResponse {
        n: state.graph.n,
        meta: &state.meta,
        trace: &state.graph.trace,
    })
    .into_response()
}

fn error(status: StatusCode, message: String) -> Response {
    (status, Json(serde_json::json!({ "error": message }))).into_response()
}

async fn cut(State(state): State<Arc<ServeState>>, body: Bytes) -> Response {
    let spec: CutSpec = match serde_json::from_slice(&body) {
        Ok(spec) => spec,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("malformed cut spec: {e}")),
    };
    match apply_cut(&state.forest, &state.potential, &spec) {
        Ok(clustering) => Json(clustering).into_response(),
        Err(e @ Error::InvalidCut(_)) => error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}
