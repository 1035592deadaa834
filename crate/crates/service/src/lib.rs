//! Session-based HTTP service for playing the online Thue game against the
//! engine, as Bob or as Alice.

pub mod api;
pub mod session;

use std::net::SocketAddr;
use std::sync::Arc;

pub use api::router;
pub use session::{ColoringSource, Mode, ServiceError, Session, SessionStore, View};

/// Serves until the process is stopped.
pub async fn serve(addr: SocketAddr, store: Arc<SessionStore>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(store)).await
}
