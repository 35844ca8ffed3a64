//! The nine-node example network and its PLANE values.
//!
//! The edge list is reconstructed from the example's cluster memberships: node 3
//! monitors 1 and 2, node 4 monitors 5 and 6, node 7 monitors 8 and 9, and
//! nodes 1, 2 and 3 form a triangle so that node 2 can take over its cluster.

use std::collections::BTreeMap;

use crate::power::PlaneValue;
use crate::topology::{Graph, NodeId};

pub const EXAMPLE_EDGES: [(u32, u32); 9] =
    [(1, 2), (1, 3), (2, 3), (3, 4), (4, 5), (4, 6), (4, 7), (7, 8), (7, 9)];

pub const EXAMPLE_PLANE: [(u32, f64); 9] = [
    (1, 5.5),
    (2, 7.2),
    (3, 9.0),
    (4, 8.5),
    (5, 5.0),
    (6, 4.1),
    (7, 7.5),
    (8, 5.7),
    (9, 7.0),
];

pub fn example_network() -> Graph {
    Graph::from_edges(&EXAMPLE_EDGES).expect("fixture edges are valid")
}

pub fn example_plane_values() -> BTreeMap<NodeId, PlaneValue> {
    EXAMPLE_PLANE
        .iter()
        .map(|&(n, p)| (NodeId(n), PlaneValue::new(p).expect("fixture values are valid")))
        .collect()
}
