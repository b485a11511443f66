//! Read-only HTTP API over a loaded analysis bundle.
//!
//! | route | response |
//! |---|---|
//! | `GET /api/newspapers` | per-newspaper paragraph, token and issue counts |
//! | `GET /api/themes?newspaper=` | themes with paragraph counts |
//! | `GET /api/graph?newspaper=&themes=&min_weight=&from=&to=` | graph JSON, as `graph` exports it |
//! | `GET /api/nodes/{id}/paragraphs?limit=&offset=&sentiment=` | paragraphs of a node, with mention spans |
//! | `GET /api/identities/{label}/profile?newspaper=` | sentiment profile |
//! | `GET /api/paragraphs/{id}` | full paragraph with its mentions |
//!
//! Errors are `{"error":{"code":"not_found"|"bad_request"|"internal","message":...}}`.
//! Every response carries `X-Bundle-Hash`.

pub mod api;
pub mod bundle;
pub mod cache;
pub mod error;

use std::net::SocketAddr;
use std::sync::Arc;

use axum::http::{HeaderName, HeaderValue, Method};
use axum::routing::get;
use axum::Router;
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::set_header::SetResponseHeaderLayer;

pub use api::AppState;
pub use bundle::AnalysisBundle;
pub use cache::GraphCache;
pub use error::{ApiError, ServerError};

pub const BUNDLE_HASH_HEADER: &str = "x-bundle-hash";

#[derive(Debug, Clone)]
pub struct ServeOptions {
    /// Allowed browser origin; `None` allows any origin.
    pub cors_origin: Option<String>,
    pub cache_capacity: usize,
}

impl Default for ServeOptions {
    fn default() -> Self {
        ServeOptions {
            cors_origin: None,
            cache_capacity: cache::DEFAULT_CAPACITY,
        }
    }
}

pub fn router(bundle: Arc<AnalysisBundle>, options: &ServeOptions) -> Result<Router, ServerError> {
    let hash = HeaderValue::from_str(bundle.hash()).expect("hex digest");
    let origin = match &options.cors_origin {
        None => AllowOrigin::any(),
        Some(o) => AllowOrigin::exact(
            HeaderValue::from_str(o)
                .map_err(|_| ServerError::Invalid(format!("bad CORS origin `{o}`")))?,
        ),
    };
    let cors = CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([Method::GET])
        .expose_headers([HeaderName::from_static(BUNDLE_HASH_HEADER)]);
    let state = Arc::new(AppState {
        bundle,
        cache: GraphCache::new(options.cache_capacity),
    });
    Ok(Router::new()
        .route("/api/newspapers", get(api::newspapers))
        .route("/api/themes", get(api::themes))
        .route("/api/graph", get(api::graph))
        .route("/api/nodes/{id}/paragraphs", get(api::node_paragraphs))
        .route(
            "/api/identities/{label}/profile",
            get(api::identity_profile),
        )
        .route("/api/paragraphs/{id}", get(api::paragraph))
        .fallback(api::fallback)
        .with_state(state)
        .layer(cors)
        .layer(SetResponseHeaderLayer::overriding(
            HeaderName::from_static(BUNDLE_HASH_HEADER),
            hash,
        )))
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(
    bundle: AnalysisBundle,
    addr: SocketAddr,
    options: ServeOptions,
) -> Result<(), ServerError> {
    let app = router(Arc::new(bundle), &options)?;
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| ServerError::Io {
            path: addr.to_string().into(),
            source,
        })?;
    log::info!("listening on {}", listener.local_addr().map_or(addr, |a| a));
    axum::serve(listener, app)
        .await
        .map_err(|source| ServerError::Io {
            path: addr.to_string().into(),
            source,
        })
}
