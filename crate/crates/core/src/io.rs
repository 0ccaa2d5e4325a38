//! JSON documents: layouts, MAX-CROWN instances, embedded DAGs and
//! triangulation instances. Rationals are written as `"p/q"` strings and
//! read from strings or plain JSON numbers.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{detect_contacts, realized_profit, BoxId, BoxSpec, GeometryError, Layout, Orientation, Placed};
use crate::graph::{GraphError, ProfitGraph};
use crate::hier::EmbeddedDag;
use crate::rational::{serde_q, Q};
use crate::triangulation::TriangulationInstance;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxRecord {
    pub id: BoxId,
    #[serde(with = "serde_q")]
    pub w: Q,
    #[serde(with = "serde_q")]
    pub h: Q,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl BoxRecord {
    pub fn spec(&self) -> BoxSpec {
        BoxSpec::new(self.id.clone(), self.w, self.h)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedRecord {
    pub id: BoxId,
    #[serde(with = "serde_q")]
    pub w: Q,
    #[serde(with = "serde_q")]
    pub h: Q,
    #[serde(with = "serde_q")]
    pub x: Q,
    #[serde(with = "serde_q")]
    pub y: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContactRecord {
    pub a: BoxId,
    pub b: BoxId,
    pub orientation: Orientation,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutDoc {
    pub boxes: Vec<PlacedRecord>,
    pub contacts: Vec<ContactRecord>,
    #[serde(with = "serde_q")]
    pub realized_profit: Q,
    #[serde(with = "serde_q")]
    pub total_profit: Q,
}

impl LayoutDoc {
    /// Describes `layout` against `graph`: boxes by id, all contacts, and
    /// the realized and total profit.
    pub fn new(layout: &Layout, graph: &ProfitGraph) -> Result<Self, GeometryError> {
        let contacts = detect_contacts(layout)?
            .into_iter()
            .map(|c| ContactRecord { degenerate: c.is_degenerate(), a: c.a, b: c.b, orientation: c.orientation })
            .collect();
        Ok(LayoutDoc {
            boxes: layout
                .iter()
                .map(|(id, p)| PlacedRecord { id: id.clone(), w: p.width, h: p.height, x: p.x, y: p.y })
                .collect(),
            contacts,
            realized_profit: realized_profit(layout, graph)?,
            total_profit: graph.total_profit(),
        })
    }

    pub fn layout(&self) -> Layout {
        let mut l = Layout::new();
        for b in &self.boxes {
            l.insert(b.id.clone(), Placed { width: b.w, height: b.h, x: b.x, y: b.y });
        }
        l
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub a: BoxId,
    pub b: BoxId,
    #[serde(with = "serde_q")]
    pub p: Q,
}

/// MAX-CROWN instance: boxes (optionally labelled) and weighted edges, with
/// an optional witness layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub boxes: Vec<BoxRecord>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<LayoutDoc>,
}

impl InstanceDoc {
    pub fn new(boxes: &[BoxSpec], graph: &ProfitGraph, labels: &BTreeMap<BoxId, String>) -> Self {
        InstanceDoc {
            boxes: boxes
                .iter()
                .map(|b| BoxRecord { id: b.id.clone(), w: b.width, h: b.height, label: labels.get(&b.id).cloned() })
                .collect(),
            edges: graph.edges().map(|(a, b, p)| EdgeRecord { a: a.clone(), b: b.clone(), p: *p }).collect(),
            witness: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        doc.check()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data");
        s.push('\n');
        s
    }

    fn check(&self) -> Result<(), IoError> {
        crate::geometry::validate_boxes(&self.specs())?;
        let ids: std::collections::BTreeSet<&BoxId> = self.boxes.iter().map(|b| &b.id).collect();
        for e in &self.edges {
            for v in [&e.a, &e.b] {
                if !ids.contains(v) {
                    return Err(IoError::Invalid(format!("edge endpoint {v} has no box")));
                }
            }
        }
        self.graph()?;
        Ok(())
    }

    pub fn specs(&self) -> Vec<BoxSpec> {
        self.boxes.iter().map(BoxRecord::spec).collect()
    }

    pub fn labels(&self) -> BTreeMap<BoxId, String> {
        self.boxes.iter().filter_map(|b| b.label.clone().map(|l| (b.id.clone(), l))).collect()
    }

    /// Graph over every box; repeated edges keep the last profit.
    pub fn graph(&self) -> Result<ProfitGraph, IoError> {
        let mut g = ProfitGraph::new();
        for b in &self.boxes {
            g.add_vertex(b.id.clone());
        }
        for e in &self.edges {
            g.add_edge(e.a.clone(), e.b.clone(), e.p)?;
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DagDoc {
    pub boxes: Vec<BoxRecord>,
    /// Child -> parent.
    pub edges: Vec<(BoxId, BoxId)>,
    pub rotation: BTreeMap<BoxId, Vec<BoxId>>,
}

impl DagDoc {
    pub fn from_json(text: &str) -> Result<Self, IoError> {
        let doc: DagDoc = serde_json::from_str(text)?;
        crate::geometry::validate_boxes(&doc.specs())?;
        Ok(doc)
    }

    pub fn specs(&self) -> Vec<BoxSpec> {
        self.boxes.iter().map(BoxRecord::spec).collect()
    }

    pub fn dag(&self) -> EmbeddedDag {
        EmbeddedDag {
            vertices: self.boxes.iter().map(|b| b.id.clone()).collect(),
            edges: self.edges.clone(),
            rotation: self.rotation.clone(),
        }
    }

    /// Unit-profit undirected view of the edges.
    pub fn graph(&self) -> Result<ProfitGraph, IoError> {
        unit_graph(&self.boxes, &self.edges)
    }
}

fn unit_graph(boxes: &[BoxRecord], edges: &[(BoxId, BoxId)]) -> Result<ProfitGraph, IoError> {
    let mut g = ProfitGraph::new();
    for b in boxes {
        g.add_vertex(b.id.clone());
    }
    for (a, b) in edges {
        g.add_edge(a.clone(), b.clone(), Q::from_integer(1))?;
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct OuterRecord {
    pub N: BoxId,
    pub E: BoxId,
    pub S: BoxId,
    pub W: BoxId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulationDoc {
    pub boxes: Vec<BoxRecord>,
    pub edges: Vec<(BoxId, BoxId)>,
    pub rotation: BTreeMap<BoxId, Vec<BoxId>>,
    pub outer: OuterRecord,
}

impl TriangulationDoc {
    pub fn from_json(text: &str) -> Result<Self, IoError> {
        let doc: TriangulationDoc = serde_json::from_str(text)?;
        crate::geometry::validate_boxes(&doc.boxes.iter().map(BoxRecord::spec).collect::<Vec<_>>())?;
        Ok(doc)
    }

    pub fn instance(&self) -> TriangulationInstance {
        TriangulationInstance {
            boxes: self.boxes.iter().map(BoxRecord::spec).collect(),
            edges: self.edges.clone(),
            rotation: self.rotation.clone(),
            outer: [self.outer.N.clone(), self.outer.E.clone(), self.outer.S.clone(), self.outer.W.clone()],
        }
    }

    pub fn from_instance(inst: &TriangulationInstance) -> Self {
        let [n, e, s, w] = inst.outer.clone();
        TriangulationDoc {
            boxes: inst.boxes.iter().map(|b| BoxRecord { id: b.id.clone(), w: b.width, h: b.height, label: None }).collect(),
            edges: inst.edges.clone(),
            rotation: inst.rotation.clone(),
            outer: OuterRecord { N: n, E: e, S: s, W: w },
        }
    }

    pub fn graph(&self) -> Result<ProfitGraph, IoError> {
        unit_graph(&self.boxes, &self.edges)
    }
}

/// Zero-profit placeholder used when a layout is written without a graph.
pub fn empty_graph(layout: &Layout) -> ProfitGraph {
    let mut g = ProfitGraph::new();
    for id in layout.ids() {
        g.add_vertex(id.clone());
    }
    debug_assert!(g.total_profit().is_zero());
    g
}
