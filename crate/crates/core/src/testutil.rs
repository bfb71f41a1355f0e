use std::collections::HashMap;

use crate::graph::{EdgeLogic, EdgeRecord, GraphDocument, NodeRecord, NodeRole, PlantGraph};

/// HUB-only graph; logic labels follow head in-degree (SINGLE or AND).
pub(crate) fn hub_graph(ids: &[&str], edges: &[(&str, &str, f64)]) -> PlantGraph {
    let mut indeg: HashMap<&str, usize> = HashMap::new();
    for (_, t, _) in edges {
        *indeg.entry(*t).or_default() += 1;
    }
    let doc = GraphDocument {
        nodes: ids
            .iter()
            .map(|id| NodeRecord {
                id: id.to_string(),
                role: NodeRole::Hub,
                area: "x".into(),
                passive_resistant: false,
                service: None,
                switch: None,
                orphan: None,
            })
            .collect(),
        edges: edges
            .iter()
            .map(|(f, t, w)| EdgeRecord {
                from: f.to_string(),
                to: t.to_string(),
                weight: *w,
                logic: if indeg[t] == 1 {
                    EdgeLogic::Single
                } else {
                    EdgeLogic::And
                },
            })
            .collect(),
    };
    PlantGraph::from_document(doc).unwrap()
}

/// `src -> h -> w -> u` with a single switch `w`.
pub(crate) fn one_switch() -> PlantGraph {
    PlantGraph::load(
        r#"{"nodes":[
            {"id":"src","role":"SOURCE","area":"x","passive_resistant":false,"service":1},
            {"id":"h","role":"HUB","area":"x","passive_resistant":false},
            {"id":"w","role":"SWITCH","area":"x","passive_resistant":false,"switch":true},
            {"id":"u","role":"USER","area":"x","passive_resistant":false}],
          "edges":[
            {"from":"src","to":"h","weight":1,"logic":"SINGLE"},
            {"from":"h","to":"w","weight":1,"logic":"SINGLE"},
            {"from":"w","to":"u","weight":1,"logic":"SINGLE"}]}"#,
    )
    .unwrap()
}
