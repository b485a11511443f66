//! Bounded graph cache keyed by scope, with one computation per key in flight.

use std::future::Future;
use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use lru::LruCache;
use presslens_core::graph::GraphScope;
use tokio::sync::OnceCell;

pub const DEFAULT_CAPACITY: usize = 32;

pub struct GraphCache {
    entries: Mutex<LruCache<GraphScope, Arc<OnceCell<Bytes>>>>,
    builds: AtomicUsize,
}

impl GraphCache {
    pub fn new(capacity: usize) -> Self {
        let capacity = NonZeroUsize::new(capacity).unwrap_or(NonZeroUsize::MIN);
        GraphCache {
            entries: Mutex::new(LruCache::new(capacity)),
            builds: AtomicUsize::new(0),
        }
    }

    /// Returns the cached bytes for `scope`, running `build` at most once per resident key.
    /// Concurrent callers for the same key wait for the first build.
    pub async fn get_or_build<F, Fut, E>(&self, scope: GraphScope, build: F) -> Result<Bytes, E>
    where
        F: FnOnce() -> Fut,
        Fut: Future<Output = Result<Bytes, E>>,
    {
        let cell = {
            let mut entries = self.entries.lock().expect("cache lock");
            entries
                .get_or_insert(scope, || Arc::new(OnceCell::new()))
                .clone()
        };
        cell.get_or_try_init(|| {
            self.builds.fetch_add(1, Ordering::Relaxed);
            build()
        })
        .await
        .cloned()
    }

    /// Number of builds started since creation.
    pub fn builds(&self) -> usize {
        self.builds.load(Ordering::Relaxed)
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
