use std::io::{BufRead, BufReader};
use std::net::SocketAddr;
use std::process::{Command, Stdio};
use std::sync::Arc;
use std::time::Duration;

use futures_util::{SinkExt, StreamExt};
use qgo_cli::server::{serve, ErrorBody};
use qgo_core::{GameRecord, SessionEvent, SessionHub, Snapshot};
use serde_json::{json, Value};
use tokio::net::TcpListener;
use tokio_tungstenite::tungstenite::Message;

async fn start(hub: SessionHub) -> (String, Arc<SessionHub>) {
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr: SocketAddr = listener.local_addr().unwrap();
    let hub = Arc::new(hub);
    tokio::spawn(serve(listener, hub.clone(), std::future::pending()));
    (format!("127.0.0.1:{}", addr.port()), hub)
}

async fn create(client: &reqwest::Client, base: &str, body: Value) -> String {
    let resp = client.post(format!("http://{base}/games")).json(&body).send().await.unwrap();
    assert_eq!(resp.status(), 201);
    resp.json::<Value>().await.unwrap()["id"].as_str().unwrap().to_owned()
}

async fn post_move(client: &reqwest::Client, base: &str, id: &str, body: Value) -> reqwest::Response {
    client.post(format!("http://{base}/games/{id}/moves")).json(&body).send().await.unwrap()
}

#[tokio::test]
async fn http_game_lifecycle() {
    let dir = tempfile::tempdir().unwrap();
    let (base, _hub) = start(SessionHub::open(dir.path()).unwrap()).await;
    let client = reqwest::Client::new();
    let id = create(&client, &base, json!({"size": 3, "seed": 42})).await;
    assert!(dir.path().join(format!("{id}.jsonl")).exists());

    let snap: Snapshot = client.get(format!("http://{base}/games/{id}")).send().await.unwrap().json().await.unwrap();
    assert_eq!(snap.board, ["...", "...", "..."]);

    let resp = post_move(&client, &base, &id, json!({"player": "black", "kind": "classical", "pos": 5})).await;
    assert_eq!(resp.status(), 200);
    let outcome: Value = resp.json().await.unwrap();
    assert_eq!(outcome["measured"][0], 5);

    let resp = post_move(&client, &base, &id, json!({"player": "white", "kind": "classical", "pos": 5})).await;
    assert_eq!(resp.status(), 422);
    let err: ErrorBody = resp.json().await.unwrap();
    assert_eq!(err.code, "already_collapsed");

    let resp = post_move(&client, &base, &id, json!({"player": "black", "kind": "pass"})).await;
    assert_eq!(resp.status(), 409);
    assert_eq!(resp.json::<ErrorBody>().await.unwrap().code, "not_your_turn");

    let resp = post_move(&client, &base, &id, json!({"player": "white", "kind": "teleport"})).await;
    assert_eq!(resp.status(), 400);
    assert_eq!(resp.json::<ErrorBody>().await.unwrap().code, "bad_request");

    let resp = client.get(format!("http://{base}/games/nope")).send().await.unwrap();
    assert_eq!(resp.status(), 404);
    assert_eq!(resp.json::<ErrorBody>().await.unwrap().code, "unknown_game");

    let resp = client.post(format!("http://{base}/games")).json(&json!({"size": 1})).send().await.unwrap();
    assert_eq!(resp.status(), 400);
    assert_eq!(resp.json::<ErrorBody>().await.unwrap().code, "invalid_size");

    let record = client.get(format!("http://{base}/games/{id}/record")).send().await.unwrap().text().await.unwrap();
    let on_disk = std::fs::read_to_string(dir.path().join(format!("{id}.jsonl"))).unwrap();
    assert_eq!(record, on_disk);
    let replayed = GameRecord::from_jsonl(&record).unwrap().replay().unwrap();
    assert_eq!(replayed.marks(), snap_marks(&client, &base, &id).await);

    let qasm = client.get(format!("http://{base}/games/{id}/qasm")).send().await.unwrap().text().await.unwrap();
    assert!(qasm.starts_with("OPENQASM 2.0;\n"));
    assert!(qasm.contains("measure q[4] -> c[4];"));

    let ids: Vec<String> = client.get(format!("http://{base}/games")).send().await.unwrap().json().await.unwrap();
    assert_eq!(ids, std::slice::from_ref(&id));

    // A fresh hub over the same directory resumes the game.
    let reopened = SessionHub::open(dir.path()).unwrap();
    assert_eq!(reopened.game_state(&id).unwrap(), replayed);
}

async fn snap_marks(client: &reqwest::Client, base: &str, id: &str) -> String {
    let snap: Snapshot = client.get(format!("http://{base}/games/{id}")).send().await.unwrap().json().await.unwrap();
    snap.board.concat()
}

#[tokio::test]
async fn qasm_too_large_is_rejected() {
    let (base, _hub) = start(SessionHub::new()).await;
    let client = reqwest::Client::new();
    let id = create(&client, &base, json!({"size": 6})).await;
    let resp = client.get(format!("http://{base}/games/{id}/qasm")).send().await.unwrap();
    assert_eq!(resp.status(), 422);
    assert_eq!(resp.json::<ErrorBody>().await.unwrap().code, "circuit_error");
}

type Ws = tokio_tungstenite::WebSocketStream<tokio_tungstenite::MaybeTlsStream<tokio::net::TcpStream>>;

async fn next_event(ws: &mut Ws) -> SessionEvent {
    loop {
        let msg = tokio::time::timeout(Duration::from_secs(5), ws.next()).await.unwrap().unwrap().unwrap();
        if let Message::Text(text) = msg {
            return serde_json::from_str(&text).unwrap();
        }
    }
}

async fn no_event(ws: &mut Ws) {
    assert!(tokio::time::timeout(Duration::from_millis(200), ws.next()).await.is_err());
}

#[tokio::test]
async fn websocket_stream() {
    let (base, hub) = start(SessionHub::new()).await;
    let id = hub.create_game(2, Some(3)).unwrap();
    let url = format!("ws://{base}/games/{id}/stream");
    let (mut a, _) = tokio_tungstenite::connect_async(&url).await.unwrap();
    let (mut b, _) = tokio_tungstenite::connect_async(&url).await.unwrap();

    for ws in [&mut a, &mut b] {
        match next_event(ws).await {
            SessionEvent::StateUpdate { snapshot, last_move: None } => assert_eq!(snapshot.moves, 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    // Client A plays; both clients see the same update.
    a.send(Message::text(json!({"player": "black", "kind": "classical", "pos": 1}).to_string())).await.unwrap();
    let ea = next_event(&mut a).await;
    let eb = next_event(&mut b).await;
    assert_eq!(ea, eb);
    let SessionEvent::StateUpdate { snapshot, last_move: Some(mv) } = ea else { panic!("{ea:?}") };
    assert_eq!(snapshot, hub.get_state(&id).unwrap());
    assert_eq!(mv.ordinal, 0);

    // Rejections go only to the submitter.
    b.send(Message::text(json!({"player": "white", "kind": "classical", "pos": 1}).to_string())).await.unwrap();
    match next_event(&mut b).await {
        SessionEvent::MoveRejected { code, .. } => assert_eq!(code, "already_collapsed"),
        other => panic!("unexpected {other:?}"),
    }
    b.send(Message::text("not json")).await.unwrap();
    match next_event(&mut b).await {
        SessionEvent::MoveRejected { code, .. } => assert_eq!(code, "bad_request"),
        other => panic!("unexpected {other:?}"),
    }
    no_event(&mut a).await;

    // Moves over HTTP reach stream subscribers too; double pass ends the game.
    let client = reqwest::Client::new();
    let mut seen_a = Vec::new();
    let mut seen_b = Vec::new();
    post_move(&client, &base, &id, json!({"player": "white", "kind": "pass"})).await;
    seen_a.push(next_event(&mut a).await);
    seen_b.push(next_event(&mut b).await);
    b.send(Message::text(json!({"player": "black", "kind": "pass"}).to_string())).await.unwrap();
    seen_a.push(next_event(&mut a).await);
    seen_b.push(next_event(&mut b).await);
    a.send(Message::text(json!({"player": "white", "kind": "pass"}).to_string())).await.unwrap();
    for _ in 0..2 {
        seen_a.push(next_event(&mut a).await);
        seen_b.push(next_event(&mut b).await);
    }
    assert_eq!(seen_a, seen_b);
    assert!(matches!(seen_a[3], SessionEvent::GameOver { .. }));

    // A late subscriber to a finished game gets the snapshot then GameOver.
    let (mut c, _) = tokio_tungstenite::connect_async(&url).await.unwrap();
    assert!(matches!(next_event(&mut c).await, SessionEvent::StateUpdate { .. }));
    assert_eq!(next_event(&mut c).await, seen_a[3]);
}

#[tokio::test]
async fn websocket_unknown_game_is_404() {
    let (base, _hub) = start(SessionHub::new()).await;
    let err = tokio_tungstenite::connect_async(format!("ws://{base}/games/missing/stream")).await.unwrap_err();
    match err {
        tokio_tungstenite::tungstenite::Error::Http(resp) => assert_eq!(resp.status(), 404),
        other => panic!("unexpected {other:?}"),
    }
}

fn spawn_serve(listen: &str, dir: &std::path::Path) -> std::process::Child {
    Command::new(env!("CARGO_BIN_EXE_qgo"))
        .args(["serve", "--listen", listen, "--record-dir", dir.to_str().unwrap()])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap()
}

#[tokio::test]
async fn serve_binary_persists_and_reports_bind_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("records");
    let mut child = spawn_serve("127.0.0.1:0", &dir);
    let mut lines = BufReader::new(child.stdout.take().unwrap()).lines();
    let first = lines.next().unwrap().unwrap();
    let addr = first.strip_prefix("listening on ").unwrap().to_owned();
    assert!(dir.is_dir());

    let client = reqwest::Client::new();
    let id = create(&client, &addr, json!({"size": 4, "seed": 42})).await;

    // Second server on the same port fails cleanly.
    let other = spawn_serve(&addr, &tmp.path().join("other")).wait_with_output().unwrap();
    assert_eq!(other.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&other.stderr).contains(&format!("cannot listen on {addr}")));

    child.kill().unwrap();
    child.wait().unwrap();
    let text = std::fs::read_to_string(dir.join(format!("{id}.jsonl"))).unwrap();
    let record = GameRecord::from_jsonl(&text).unwrap();
    assert_eq!((record.header.size, record.header.seed), (4, 42));
}
