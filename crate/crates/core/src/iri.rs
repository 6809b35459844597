use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Dense handle for an interned IRI or blank-node label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_index(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("node index exceeds u32 range"))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Bidirectional IRI <-> [`NodeId`] map. Ids are handed out contiguously from
/// zero in first-seen order.
///
/// IRIs are stored without angle brackets; blank nodes keep their `_:` prefix,
/// which cannot begin an absolute IRI, so the two never collide.
#[derive(Debug, Default, Clone)]
pub struct IriTable {
    names: Vec<String>,
    ids: HashMap<String, NodeId>,
}

impl IriTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = NodeId::from_index(self.names.len());
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<NodeId> {
        self.ids.get(name).copied()
    }

    pub fn resolve(&self, id: NodeId) -> Option<&str> {
        self.names.get(id.index()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &str)> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, s)| (NodeId::from_index(i), s.as_str()))
    }

    /// The node as an N-Triples term: `<iri>` or `_:label`.
    pub fn term(&self, id: NodeId) -> String {
        let name = self.resolve(id).unwrap_or("");
        if name.starts_with("_:") {
            name.to_owned()
        } else {
            format!("<{name}>")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ids_are_contiguous_in_first_seen_order() {
        let mut t = IriTable::new();
        assert_eq!(t.intern("http://b"), NodeId(0));
        assert_eq!(t.intern("http://a"), NodeId(1));
        assert_eq!(t.intern("http://b"), NodeId(0));
        assert_eq!(t.len(), 2);
        assert_eq!(t.term(NodeId(1)), "<http://a>");
    }

    #[test]
    fn blank_nodes_render_without_brackets() {
        let mut t = IriTable::new();
        let b = t.intern("_:x1");
        assert_eq!(t.term(b), "_:x1");
    }

    proptest! {
        #[test]
        fn intern_resolve_round_trip(names in prop::collection::vec("[a-z]{1,6}", 0..40)) {
            let mut t = IriTable::new();
            let ids: Vec<_> = names.iter().map(|n| t.intern(n)).collect();
            for (n, id) in names.iter().zip(&ids) {
                prop_assert_eq!(t.resolve(*id), Some(n.as_str()));
                prop_assert_eq!(t.intern(n), *id);
            }
            prop_assert!(t.iter().all(|(id, _)| id.index() < t.len()));
        }
    }
}
