//! HTTP and WebSocket front end over a [`SessionHub`].
//!
//! ```text
//! POST /games                 {size, seed?}          -> {id}
//! GET  /games                                        -> [id]
//! GET  /games/{id}                                   -> snapshot
//! POST /games/{id}/moves      {player, kind, ...}    -> outcome | {code, reason}
//! GET  /games/{id}/record                            -> JSONL record
//! GET  /games/{id}/qasm                              -> OpenQASM 2.0
//! GET  /games/{id}/stream     (WebSocket)            -> SessionEvent JSON
//! ```

use std::future::Future;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use qgo_core::{GameError, MoveRequest, SessionError, SessionEvent, SessionHub};
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;

pub const DEFAULT_LISTEN: &str = "127.0.0.1:8080";
pub const DEFAULT_RECORD_DIR: &str = "records";

type Hub = Arc<SessionHub>;

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub reason: String,
}

pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn bad_request(reason: impl ToString) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            body: ErrorBody { code: "bad_request".into(), reason: reason.to_string() },
        }
    }
}

impl From<SessionError> for ApiError {
    fn from(err: SessionError) -> Self {
        let status = match &err {
            SessionError::UnknownGame(_) => StatusCode::NOT_FOUND,
            SessionError::Game(GameError::NotYourTurn { .. } | GameError::GameOver) => StatusCode::CONFLICT,
            SessionError::Game(GameError::InvalidSize(_)) => StatusCode::BAD_REQUEST,
            SessionError::Game(_) | SessionError::Circuit(_) => StatusCode::UNPROCESSABLE_ENTITY,
            SessionError::Record(_) | SessionError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError { status, body: ErrorBody { code: err.code().into(), reason: err.to_string() } }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

#[derive(Debug, Deserialize)]
struct CreateGame {
    size: usize,
    seed: Option<u64>,
}

#[derive(Debug, Serialize)]
struct Created {
    id: String,
}

pub fn router(hub: Hub) -> Router {
    Router::new()
        .route("/games", post(create_game).get(list_games))
        .route("/games/{id}", get(get_state))
        .route("/games/{id}/moves", post(submit_move))
        .route("/games/{id}/record", get(export_record))
        .route("/games/{id}/qasm", get(export_qasm))
        .route("/games/{id}/stream", get(stream))
        .with_state(hub)
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    hub: Hub,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(hub)).with_graceful_shutdown(shutdown).await
}

async fn create_game(
    State(hub): State<Hub>,
    body: Result<Json<CreateGame>, JsonRejection>,
) -> Result<(StatusCode, Json<Created>), ApiError> {
    let Json(req) = body.map_err(ApiError::bad_request)?;
    let id = hub.create_game(req.size, req.seed)?;
    Ok((StatusCode::CREATED, Json(Created { id })))
}

async fn list_games(State(hub): State<Hub>) -> Json<Vec<String>> {
    Json(hub.game_ids())
}

async fn get_state(State(hub): State<Hub>, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(Json(hub.get_state(&id)?).into_response())
}

async fn submit_move(
    State(hub): State<Hub>,
    Path(id): Path<String>,
    body: Result<Json<MoveRequest>, JsonRejection>,
) -> Result<Response, ApiError> {
    let Json(req) = body.map_err(ApiError::bad_request)?;
    Ok(Json(hub.submit_move(&id, req)?).into_response())
}

async fn export_record(State(hub): State<Hub>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let text = hub.export_record(&id)?;
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], text).into_response())
}

async fn export_qasm(State(hub): State<Hub>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let text = hub.export_qasm(&id)?;
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response())
}

async fn stream(
    State(hub): State<Hub>,
    Path(id): Path<String>,
    ws: WebSocketUpgrade,
) -> Result<Response, ApiError> {
    // Subscribe before upgrading so an unknown id is a plain 404.
    let events = hub.subscribe(&id)?;
    Ok(ws.on_upgrade(move |socket| pump(socket, hub, id, events)))
}

fn event_message(event: &SessionEvent) -> Message {
    Message::Text(serde_json::to_string(event).expect("events serialize").into())
}

async fn pump(
    mut socket: WebSocket,
    hub: Hub,
    id: String,
    mut events: tokio::sync::mpsc::UnboundedReceiver<SessionEvent>,
) {
    loop {
        tokio::select! {
            event = events.recv() => {
                let Some(event) = event else { break };
                if socket.send(event_message(&event)).await.is_err() {
                    break;
                }
            }
            incoming = socket.recv() => {
                let text = match incoming {
                    Some(Ok(Message::Text(text))) => text,
                    Some(Ok(Message::Close(_))) | None | Some(Err(_)) => break,
                    Some(Ok(_)) => continue,
                };
                let rejection = match serde_json::from_str::<MoveRequest>(&text) {
                    // Accepted moves come back through the subscription.
                    Ok(req) => hub.submit_move(&id, req).err().map(|e| SessionEvent::rejected(&e)),
                    Err(e) => Some(SessionEvent::MoveRejected { code: "bad_request".into(), reason: e.to_string() }),
                };
                if let Some(event) = rejection {
                    if socket.send(event_message(&event)).await.is_err() {
                        break;
                    }
                }
            }
        }
    }
}
