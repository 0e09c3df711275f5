//! Front ends for the quantum Go engine: the interactive console game and
//! the HTTP/WebSocket session server.

pub mod play;
pub mod server;
