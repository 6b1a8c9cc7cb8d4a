//! Keyed caches with atomic publication.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Arc;

use parking_lot::RwLock;

use crate::error::Result;

/// Values are computed outside the lock; the first published value wins, so
/// readers never observe two different results for one key.
pub struct Memo<K, V> {
    map: RwLock<HashMap<K, Arc<V>>>,
}

impl<K: Eq + Hash + Clone, V> Default for Memo<K, V> {
    fn default() -> Self {
        Memo { map: RwLock::new(HashMap::new()) }
    }
}

impl<K: Eq + Hash + Clone, V> Memo<K, V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, k: &K) -> Option<Arc<V>> {
        self.map.read().get(k).cloned()
    }

    pub fn get_or_try_insert(&self, k: &K, f: impl FnOnce() -> Result<V>) -> Result<Arc<V>> {
        if let Some(v) = self.get(k) {
            return Ok(v);
        }
        let v = Arc::new(f()?);
        Ok(self.map.write().entry(k.clone()).or_insert(v).clone())
    }

    pub fn len(&self) -> usize {
        self.map.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
