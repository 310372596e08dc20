//! Reducible configurations: matching, graph surgery, extension of an odd
//! 7-coloring of the reduced graph back to the original, and a harness that
//! runs the whole pipeline with the exact solver as the oracle.

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::classify::{classify_vertices, Classification, VertexClass};
use crate::coloring::{is_valid_odd_coloring, odd_colors_raw, Color, Coloring};
use crate::discharge::{apply_rules, Charge, Element};
use crate::embedding::{Embedding, FaceId};
use crate::graph::{Graph, GraphError, Vertex};
use crate::graph6::to_graph6;
use crate::solver::{solve_odd_coloring, SearchConfig, SolveStatus};

pub const PALETTE: Color = 7;

/// Assignments tried by one bounded search before it gives up.
pub const SEARCH_BUDGET: u64 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LemmaId {
    No3v,
    Tool1,
    Tool2,
    Tool3,
    FourFiveFace,
    Nc4v,
    FiveThreeNbr,
    TwoPath4f,
    QuadFourZero,
    Twelve,
}

impl LemmaId {
    pub const ALL: [LemmaId; 10] = [
        LemmaId::No3v,
        LemmaId::Tool1,
        LemmaId::Tool2,
        LemmaId::Tool3,
        LemmaId::FourFiveFace,
        LemmaId::Nc4v,
        LemmaId::FiveThreeNbr,
        LemmaId::TwoPath4f,
        LemmaId::QuadFourZero,
        LemmaId::Twelve,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LemmaId::No3v => "L-no3v",
            LemmaId::Tool1 => "L-tool1",
            LemmaId::Tool2 => "L-tool2",
            LemmaId::Tool3 => "L-tool3",
            LemmaId::FourFiveFace => "L-4f5f",
            LemmaId::Nc4v => "L-nc4v",
            LemmaId::FiveThreeNbr => "L-53nbr",
            LemmaId::TwoPath4f => "L-2path4f",
            LemmaId::QuadFourZero => "L-4040face",
            LemmaId::Twelve => "L-12vert",
        }
    }

    pub fn needs_embedding(self) -> bool {
        matches!(self, LemmaId::FourFiveFace | LemmaId::TwoPath4f | LemmaId::QuadFourZero | LemmaId::Twelve)
    }

    /// Surgeries that add 2-paths rely on the input having no triangles.
    pub fn needs_triangle_free(self) -> bool {
        matches!(self, LemmaId::Nc4v | LemmaId::QuadFourZero)
    }

    /// Extended by the forbidden-set procedure rather than bounded search.
    pub fn is_scripted(self) -> bool {
        matches!(self, LemmaId::No3v | LemmaId::Tool1 | LemmaId::Tool2 | LemmaId::FourFiveFace)
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LemmaId {
    type Err = LemmaError;

    fn from_str(s: &str) -> Result<Self, LemmaError> {
        LemmaId::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| LemmaError::UnknownLemma(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LemmaError {
    #[error("unknown lemma id {0:?}")]
    UnknownLemma(String),
    #[error("{0} needs an embedding")]
    NeedsEmbedding(LemmaId),
    #[error("{0} has no surgery; it is detection only")]
    NoSurgery(LemmaId),
    #[error("match is missing role {0}")]
    MissingRole(&'static str),
    #[error("surgery produced an invalid graph: {0}")]
    Surgery(#[from] GraphError),
    #[error("reduced coloring has {got} entries, reduced graph has {expected} vertices")]
    ColoringSize { expected: usize, got: usize },
    #[error("cannot write reproducer: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConfigMatch {
    pub lemma: LemmaId,
    pub roles: Vec<(&'static str, Vertex)>,
    pub faces: Vec<(&'static str, FaceId)>,
}

impl ConfigMatch {
    fn new(lemma: LemmaId, roles: Vec<(&'static str, Vertex)>) -> Self {
        ConfigMatch { lemma, roles, faces: Vec::new() }
    }

    pub fn role(&self, name: &str) -> Option<Vertex> {
        self.roles.iter().find(|(r, _)| *r == name).map(|&(_, v)| v)
    }

    fn get(&self, name: &'static str) -> Result<Vertex, LemmaError> {
        self.role(name).ok_or(LemmaError::MissingRole(name))
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        self.roles.iter().map(|&(_, v)| v).collect()
    }

    fn key(&self) -> (Vec<Vertex>, Vec<FaceId>) {
        (self.vertices(), self.faces.iter().map(|&(_, f)| f).collect())
    }

    /// `role=vertex` lines, faces as `role=f<id>`.
    pub fn to_role_lines(&self) -> String {
        let mut out = format!("lemma={}\n", self.lemma);
        for (r, v) in &self.roles {
            let _ = writeln!(out, "{r}={v}");
        }
        for (r, f) in &self.faces {
            let _ = writeln!(out, "{r}=f{f}");
        }
        out
    }
}

impl fmt::Display for ConfigMatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .roles
            .iter()
            .map(|(r, v)| format!("{r}={v}"))
            .chain(self.faces.iter().map(|(r, id)| format!("{r}=f{id}")))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A graph, optionally with the embedding it came from.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub graph: Graph,
    pub embedding: Option<Embedding>,
}

impl Instance {
    pub fn bare(name: impl Into<String>, graph: Graph) -> Self {
        Instance { name: name.into(), graph, embedding: None }
    }

    pub fn embedded(name: impl Into<String>, embedding: Embedding) -> Self {
        Instance { name: name.into(), graph: embedding.graph().clone(), embedding: Some(embedding) }
    }
}

fn is_two(c: &VertexClass) -> bool {
    c.degree == 2
}

fn is_five_three(c: &VertexClass) -> bool {
    c.degree == 5 && c.two_neighbors == 3
}

pub fn find_configurations(inst: &Instance, lemma: LemmaId) -> Result<Vec<ConfigMatch>, LemmaError> {
    let g = &inst.graph;
    let mut found = match (lemma.needs_embedding(), &inst.embedding) {
        (true, None) => return Err(LemmaError::NeedsEmbedding(lemma)),
        (true, Some(emb)) => {
            let cls = Classification::new(emb);
            match lemma {
                LemmaId::FourFiveFace => find_four_five_face(emb, &cls.vertices),
                LemmaId::TwoPath4f => find_two_path(emb, &cls.vertices),
                LemmaId::QuadFourZero => find_quad_four_zero(emb, &cls.vertices),
                _ => find_twelve(emb, &cls),
            }
        }
        (false, _) => {
            let vc = classify_vertices(g);
            match lemma {
                LemmaId::No3v => find_no3v(g),
                LemmaId::Tool1 => find_tool1(g),
                LemmaId::Tool2 => find_tool2(g, &vc),
                LemmaId::Tool3 => find_tool3(g, &vc),
                LemmaId::Nc4v => find_nc4v(g, &vc),
                _ => find_five_three_nbr(g, &vc),
            }
        }
    };
    found.sort_by_key(ConfigMatch::key);
    found.dedup();
    Ok(found)
}

fn sorted_neighbors(g: &Graph, v: Vertex) -> Vec<Vertex> {
    let mut n = g.neighbors(v).to_vec();
    n.sort_unstable();
    n
}

fn other_neighbor(g: &Graph, v: Vertex, not: Vertex) -> Vertex {
    g.neighbors(v).iter().copied().find(|&x| x != not).unwrap_or(not)
}

fn find_no3v(g: &Graph) -> Vec<ConfigMatch> {
    g.vertices()
        .filter(|&v| g.degree(v) == 3)
        .map(|v| {
            let n = sorted_neighbors(g, v);
            ConfigMatch::new(LemmaId::No3v, vec![("v", v), ("v1", n[0]), ("v2", n[1]), ("v3", n[2])])
        })
        .collect()
}

fn find_tool1(g: &Graph) -> Vec<ConfigMatch> {
    g.edges()
        .into_iter()
        .filter(|&(a, b)| g.degree(a) == 2 && g.degree(b) == 2)
        .map(|(v, u)| {
            let vp = other_neighbor(g, v, u);
            let up = other_neighbor(g, u, v);
            ConfigMatch::new(LemmaId::Tool1, vec![("v", v), ("u", u), ("v'", vp), ("u'", up)])
        })
        .collect()
}

fn find_tool2(g: &Graph, vc: &[VertexClass]) -> Vec<ConfigMatch> {
    g.edges()
        .into_iter()
        .filter(|&(a, b)| vc[a].convenient && vc[b].convenient)
        .map(|(u, v)| ConfigMatch::new(LemmaId::Tool2, vec![("u", u), ("v", v)]))
        .collect()
}

const NEIGHBOR_ROLES: [&str; 12] = ["v1", "v2", "v3", "v4", "v5", "v6", "v7", "v8", "v9", "v10", "v11", "v12"];

fn with_neighbor_roles(lemma: LemmaId, v: Vertex, nbrs: &[Vertex]) -> ConfigMatch {
    let mut roles = vec![("v", v)];
    roles.extend(NEIGHBOR_ROLES.iter().copied().zip(nbrs.iter().copied()));
    ConfigMatch::new(lemma, roles)
}

fn find_tool3(g: &Graph, vc: &[VertexClass]) -> Vec<ConfigMatch> {
    g.vertices()
        .filter(|&v| (4..=6).contains(&vc[v].degree))
        .filter(|&v| {
            let heavy = g.neighbors(v).iter().filter(|&&u| is_two(&vc[u]) || vc[u].convenient).count();
            heavy + 6 >= 2 * vc[v].degree
        })
        .map(|v| with_neighbor_roles(LemmaId::Tool3, v, &sorted_neighbors(g, v)))
        .collect()
}

fn find_nc4v(g: &Graph, vc: &[VertexClass]) -> Vec<ConfigMatch> {
    let mut out = Vec::new();
    for v in g.vertices().filter(|&v| vc[v].degree == 4 && vc[v].non_convenient()) {
        let n = sorted_neighbors(g, v);
        let conv: Vec<Vertex> = n.iter().copied().filter(|&u| vc[u].convenient).collect();
        let rest: Vec<Vertex> = n.iter().copied().filter(|&u| !vc[u].convenient).collect();
        if conv.len() != 1 || !rest.iter().all(|&u| vc[u].non_convenient()) {
            continue;
        }
        for &v2 in rest.iter().filter(|&&u| vc[u].degree == 4) {
            let others: Vec<Vertex> = rest.iter().copied().filter(|&u| u != v2).collect();
            let outer: Vec<Vertex> = sorted_neighbors(g, v2).into_iter().filter(|&u| u != v).collect();
            out.push(ConfigMatch::new(
                LemmaId::Nc4v,
                vec![
                    ("v", v),
                    ("v1", conv[0]),
                    ("v2", v2),
                    ("v3", others[0]),
                    ("v4", others[1]),
                    ("v2'", outer[0]),
                    ("v2''", outer[1]),
                    ("v2'''", outer[2]),
                ],
            ));
        }
    }
    out
}

fn find_five_three_nbr(g: &Graph, vc: &[VertexClass]) -> Vec<ConfigMatch> {
    let mut out = Vec::new();
    for v in g.vertices().filter(|&v| vc[v].non_convenient() && [4, 6, 8, 10].contains(&vc[v].degree)) {
        let k = vc[v].degree;
        let conv = g.neighbors(v).iter().filter(|&&u| vc[u].convenient).count();
        if 2 * conv + 10 < 3 * k {
            continue;
        }
        for v1 in sorted_neighbors(g, v).into_iter().filter(|&u| vc[u].convenient && is_five_three(&vc[u])) {
            out.push(ConfigMatch::new(LemmaId::FiveThreeNbr, vec![("v", v), ("v1", v1)]));
        }
    }
    out
}

fn simple_face_walk(emb: &Embedding, f: FaceId) -> Option<Vec<Vertex>> {
    let walk: Vec<Vertex> = emb.faces.face(f).vertices().collect();
    let distinct: BTreeSet<Vertex> = walk.iter().copied().collect();
    (distinct.len() == walk.len()).then_some(walk)
}

fn find_four_five_face(emb: &Embedding, vc: &[VertexClass]) -> Vec<ConfigMatch> {
    let mut out = Vec::new();
    for f in 0..emb.faces.len() {
        let d = emb.face_degree(f);
        if d != 4 && d != 5 {
            continue;
        }
        let Some(w) = simple_face_walk(emb, f) else { continue };
        let at = |i: usize| w[i % d];
        if d == 4 {
            for i in 0..2 {
                if !(is_two(&vc[at(i)]) && is_two(&vc[at(i + 2)])) {
                    continue;
                }
                let s = if at(i) < at(i + 2) { i } else { i + 2 };
                let mut m = ConfigMatch::new(
                    LemmaId::FourFiveFace,
                    vec![("v1", at(s)), ("v2", at(s + 1)), ("v3", at(s + 2)), ("v4", at(s + 3))],
                );
                m.faces.push(("f", f));
                out.push(m);
            }
        } else {
            for i in 0..5 {
                let pair = is_two(&vc[at(i)]) && is_two(&vc[at(i + 2)]);
                if !pair || !vc[at(i + 3)].convenient || !vc[at(i + 4)].convenient {
                    continue;
                }
                let mut m = ConfigMatch::new(
                    LemmaId::FourFiveFace,
                    vec![("v1", at(i)), ("v2", at(i + 1)), ("v3", at(i + 2)), ("v4", at(i + 3)), ("v5", at(i + 4))],
                );
                m.faces.push(("f", f));
                out.push(m);
            }
        }
    }
    out
}

fn find_two_path(emb: &Embedding, vc: &[VertexClass]) -> Vec<ConfigMatch> {
    let g = emb.graph();
    let mut out = Vec::new();
    for w in g.vertices().filter(|&w| g.degree(w) == 2) {
        let n = sorted_neighbors(g, w);
        let (u, v) = (n[0], n[1]);
        if !is_five_three(&vc[u]) || !is_five_three(&vc[v]) {
            continue;
        }
        let (Some(f1), Some(f2)) = (emb.faces.face_of((u, w)), emb.faces.face_of((v, w))) else { continue };
        if f1 == f2 || emb.face_degree(f1) != 4 || emb.face_degree(f2) != 4 {
            continue;
        }
        let fourth = |f: FaceId| -> Option<Vertex> {
            let walk = simple_face_walk(emb, f)?;
            walk.into_iter().find(|&z| z != u && z != v && z != w)
        };
        let (Some(x), Some(y)) = (fourth(f1), fourth(f2)) else { continue };
        let mut m = ConfigMatch::new(LemmaId::TwoPath4f, vec![("u", u), ("w", w), ("v", v), ("x", x), ("y", y)]);
        m.faces = vec![("f1", f1), ("f2", f2)];
        out.push(m);
    }
    out
}

fn find_quad_four_zero(emb: &Embedding, vc: &[VertexClass]) -> Vec<ConfigMatch> {
    let g = emb.graph();
    let mut out = Vec::new();
    for f in 0..emb.faces.len() {
        if emb.face_degree(f) != 4 {
            continue;
        }
        let Some(w) = simple_face_walk(emb, f) else { continue };
        if !w.iter().all(|&v| vc[v].is_k_i(4, 0)) {
            continue;
        }
        let outer = |i: usize| -> Vec<Vertex> {
            let (prev, next) = (w[(i + 3) % 4], w[(i + 1) % 4]);
            sorted_neighbors(g, w[i]).into_iter().filter(|&z| z != prev && z != next).collect()
        };
        let (o1, o2) = (outer(0), outer(1));
        if o1.len() != 2 || o2.len() != 2 {
            continue;
        }
        let mut m = ConfigMatch::new(
            LemmaId::QuadFourZero,
            vec![
                ("v1", w[0]),
                ("v2", w[1]),
                ("v3", w[2]),
                ("v4", w[3]),
                ("v1'", o1[0]),
                ("v1''", o1[1]),
                ("v2'", o2[0]),
                ("v2''", o2[1]),
            ],
        );
        m.faces.push(("f", f));
        out.push(m);
    }
    out
}

fn find_twelve(emb: &Embedding, cls: &Classification) -> Vec<ConfigMatch> {
    let g = emb.graph();
    let vc = &cls.vertices;
    g.vertices()
        .filter(|&v| vc[v].degree == 12 && vc[v].non_convenient())
        .filter(|&v| g.neighbors(v).iter().all(|&u| is_five_three(&vc[u]) && cls.is_poor_to(u, v)))
        .map(|v| with_neighbor_roles(LemmaId::Twelve, v, &sorted_neighbors(g, v)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurgeryStep {
    DeleteVertices(Vec<Vertex>),
    SplitEdge(Vertex, Vertex),
    AddTwoPath(Vertex, Vertex),
}

impl fmt::Display for SurgeryStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurgeryStep::DeleteVertices(vs) => {
                let s: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
                write!(f, "delete {}", s.join(","))
            }
            SurgeryStep::SplitEdge(u, v) => write!(f, "split {u}-{v}"),
            SurgeryStep::AddTwoPath(a, b) => write!(f, "2-path {a}-x-{b}"),
        }
    }
}

/// Reduced graph plus the vertex correspondence in both directions.
/// Retained vertices keep their relative order; new 2-vertices follow.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub steps: Vec<SurgeryStep>,
    pub graph: Graph,
    pub to_reduced: Vec<Option<Vertex>>,
    pub to_original: Vec<Option<Vertex>>,
    pub produced: Vec<Vertex>,
}

impl Reduction {
    pub fn deleted(&self) -> Vec<Vertex> {
        (0..self.to_reduced.len()).filter(|&v| self.to_reduced[v].is_none()).collect()
    }
}

pub fn surgery_steps(m: &ConfigMatch) -> Result<Vec<SurgeryStep>, LemmaError> {
    use SurgeryStep::*;
    let r = |name| m.get(name);
    Ok(match m.lemma {
        LemmaId::No3v | LemmaId::Tool1 | LemmaId::Tool3 => vec![DeleteVertices(vec![r("v")?])],
        LemmaId::Tool2 => vec![SplitEdge(r("u")?, r("v")?)],
        LemmaId::FourFiveFace => match m.role("v5") {
            None => vec![DeleteVertices(vec![r("v1")?])],
            Some(v5) => vec![SplitEdge(r("v4")?, v5)],
        },
        LemmaId::FiveThreeNbr => vec![SplitEdge(r("v")?, r("v1")?)],
        LemmaId::TwoPath4f => vec![SplitEdge(r("x")?, r("v")?)],
        LemmaId::Nc4v => {
            let (v1, v3, v4) = (r("v1")?, r("v3")?, r("v4")?);
            let (a, b, c) = (r("v2'")?, r("v2''")?, r("v2'''")?);
            vec![
                DeleteVertices(vec![r("v")?, r("v2")?]),
                AddTwoPath(v1, v3),
                AddTwoPath(v1, v4),
                AddTwoPath(v3, v4),
                AddTwoPath(a, b),
                AddTwoPath(b, c),
                AddTwoPath(c, a),
            ]
        }
        LemmaId::QuadFourZero => {
            let (v3, v4) = (r("v3")?, r("v4")?);
            let (a1, b1, a2, b2) = (r("v1'")?, r("v1''")?, r("v2'")?, r("v2''")?);
            vec![
                DeleteVertices(vec![r("v1")?, r("v2")?]),
                AddTwoPath(a1, b1),
                AddTwoPath(a1, v4),
                AddTwoPath(b1, v4),
                AddTwoPath(a2, b2),
                AddTwoPath(a2, v3),
                AddTwoPath(b2, v3),
            ]
        }
        LemmaId::Twelve => return Err(LemmaError::NoSurgery(m.lemma)),
    })
}

pub fn apply_surgery(g: &Graph, m: &ConfigMatch) -> Result<Reduction, LemmaError> {
    let steps = surgery_steps(m)?;
    let n = g.vertex_count();
    let mut deleted = vec![false; n];
    let mut split: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    for s in &steps {
        match s {
            SurgeryStep::DeleteVertices(vs) => vs.iter().for_each(|&v| deleted[v] = true),
            SurgeryStep::SplitEdge(u, v) => {
                split.insert((*u.min(v), *u.max(v)));
            }
            SurgeryStep::AddTwoPath(..) => {}
        }
    }
    let mut to_reduced = vec![None; n];
    let mut to_original = Vec::new();
    for v in (0..n).filter(|&v| !deleted[v]) {
        to_reduced[v] = Some(to_original.len());
        to_original.push(Some(v));
    }
    let mut edges: Vec<(Vertex, Vertex)> = g
        .edges()
        .into_iter()
        .filter(|e| !split.contains(e))
        .filter_map(|(a, b)| Some((to_reduced[a]?, to_reduced[b]?)))
        .collect();
    let mut produced = Vec::new();
    for s in &steps {
        let (a, b) = match *s {
            SurgeryStep::SplitEdge(a, b) | SurgeryStep::AddTwoPath(a, b) => (a, b),
            SurgeryStep::DeleteVertices(_) => continue,
        };
        let x = to_original.len();
        to_original.push(None);
        produced.push(x);
        let ra = to_reduced[a].expect("surgery endpoint was deleted");
        let rb = to_reduced[b].expect("surgery endpoint was deleted");
        edges.push((ra, x));
        edges.push((x, rb));
    }
    let graph = Graph::from_edges(to_original.len(), edges)?;
    Ok(Reduction { steps, graph, to_reduced, to_original, produced })
}

/// Removes 2-vertex `w` and joins its neighbors; ids above `w` shift down.
pub fn contract_two_vertex(g: &Graph, w: Vertex) -> Result<Graph, GraphError> {
    assert_eq!(g.degree(w), 2, "contract needs a 2-vertex");
    let (a, b) = (g.neighbors(w)[0], g.neighbors(w)[1]);
    let shift = |v: Vertex| if v > w { v - 1 } else { v };
    let mut edges: Vec<(Vertex, Vertex)> =
        g.edges().into_iter().filter(|&(x, y)| x != w && y != w).map(|(x, y)| (shift(x), shift(y))).collect();
    edges.push((shift(a), shift(b)));
    Graph::from_edges(g.vertex_count() - 1, edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionMethod {
    Scripted,
    BoundedSearch { level: usize },
}

impl fmt::Display for ExtensionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtensionMethod::Scripted => f.write_str("scripted"),
            ExtensionMethod::BoundedSearch { level } => write!(f, "search-{level}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub coloring: Coloring,
    pub method: ExtensionMethod,
    pub trace: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("extension failed: {}", trace.join("; "))]
pub struct ExtensionFailure {
    pub trace: Vec<String>,
}

fn fmt_set(s: &BTreeSet<Color>) -> String {
    let v: Vec<String> = s.iter().map(|c| c.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

/// Colors the uncolored `x` may not take: each colored neighbor's color and
/// that neighbor's smallest odd color.
fn forbidden(g: &Graph, colors: &[Color], x: Vertex) -> BTreeSet<Color> {
    let mut out = BTreeSet::new();
    for &y in g.neighbors(x) {
        if colors[y] == 0 {
            continue;
        }
        out.insert(colors[y]);
        if let Some(&o) = odd_colors_raw(g, colors, y).iter().next() {
            out.insert(o);
        }
    }
    out
}

/// `None` while `x` or a neighbor is uncolored.
fn vertex_ok(g: &Graph, colors: &[Color], x: Vertex) -> Option<bool> {
    let c = colors[x];
    if c == 0 || g.neighbors(x).iter().any(|&y| colors[y] == 0) {
        return None;
    }
    if g.neighbors(x).iter().any(|&y| colors[y] == c) {
        return Some(false);
    }
    Some(g.degree(x) == 0 || !odd_colors_raw(g, colors, x).is_empty())
}

fn locally_ok(g: &Graph, colors: &[Color], x: Vertex) -> bool {
    vertex_ok(g, colors, x) != Some(false) && g.neighbors(x).iter().all(|&y| vertex_ok(g, colors, y) != Some(false))
}

/// Gives `v` an odd color by recoloring one of its 2-neighbors with the
/// smallest color that keeps that 2-vertex and both its neighbors valid.
/// Returns the recolored vertex and its new color.
pub fn repair_via_2_neighbor(g: &Graph, colors: &mut [Color], v: Vertex, palette: Color) -> Option<(Vertex, Color)> {
    let mut twos: Vec<Vertex> = g.neighbors(v).iter().copied().filter(|&w| g.degree(w) == 2).collect();
    twos.sort_unstable();
    for w in twos {
        let old = colors[w];
        for c in 1..=palette {
            colors[w] = c;
            if locally_ok(g, colors, w) && vertex_ok(g, colors, v) == Some(true) {
                return Some((w, c));
            }
        }
        colors[w] = old;
    }
    None
}

fn lift(red: &Reduction, reduced: &Coloring) -> Result<Vec<Color>, LemmaError> {
    if reduced.len() != red.graph.vertex_count() {
        return Err(LemmaError::ColoringSize { expected: red.graph.vertex_count(), got: reduced.len() });
    }
    Ok(red.to_reduced.iter().map(|r| r.map_or(0, |r| reduced.color(r))).collect())
}

struct Plan {
    /// Vertices colored greedily, in order.
    greedy: Vec<Vertex>,
    /// Vertices that must end with an odd color, repaired via 2-neighbors.
    repair: Vec<Vertex>,
    /// Search set for the bounded-search path.
    search: Vec<Vertex>,
}

fn plan(g: &Graph, m: &ConfigMatch) -> Result<Plan, LemmaError> {
    let r = |name| m.get(name);
    let twos = |v: Vertex| -> Vec<Vertex> { sorted_neighbors(g, v).into_iter().filter(|&u| g.degree(u) == 2).collect() };
    let p = match m.lemma {
        LemmaId::No3v => Plan { greedy: vec![r("v")?], repair: vec![], search: vec![r("v")?] },
        LemmaId::Tool1 => {
            let (v, u) = (r("v")?, r("u")?);
            Plan { greedy: vec![v], repair: vec![v], search: vec![v, u] }
        }
        LemmaId::Tool2 => {
            let (u, v) = (r("u")?, r("v")?);
            let mut search = vec![u, v];
            search.extend(twos(u));
            search.extend(twos(v));
            Plan { greedy: vec![], repair: vec![u, v], search }
        }
        LemmaId::FourFiveFace => match m.role("v5") {
            None => {
                let v1 = r("v1")?;
                Plan { greedy: vec![v1], repair: vec![v1], search: vec![v1] }
            }
            Some(v5) => {
                let v4 = r("v4")?;
                let mut search = vec![v4, v5];
                search.extend(twos(v4));
                search.extend(twos(v5));
                Plan { greedy: vec![], repair: vec![v4, v5], search }
            }
        },
        LemmaId::Tool3 => {
            let v = r("v")?;
            let mut search = vec![v];
            search.extend(twos(v));
            Plan { greedy: vec![], repair: vec![], search }
        }
        LemmaId::Nc4v => Plan { greedy: vec![], repair: vec![], search: vec![r("v2")?, r("v")?] },
        LemmaId::FiveThreeNbr => Plan { greedy: vec![], repair: vec![], search: vec![r("v")?, r("v1")?] },
        LemmaId::TwoPath4f => Plan { greedy: vec![], repair: vec![], search: vec![r("u")?, r("w")?, r("v")?] },
        LemmaId::QuadFourZero => {
            Plan { greedy: vec![], repair: vec![], search: vec![r("v2")?, r("v1")?, r("v4")?] }
        }
        LemmaId::Twelve => return Err(LemmaError::NoSurgery(m.lemma)),
    };
    Ok(p)
}

fn dedup_keep_order(vs: &mut Vec<Vertex>) {
    let mut seen = BTreeSet::new();
    vs.retain(|v| seen.insert(*v));
}

/// Search sets tried in order: the proof's set, then that set plus every
/// 2-vertex next to its closed neighborhood, then plus all its neighbors.
fn search_levels(g: &Graph, base: &[Vertex]) -> Vec<Vec<Vertex>> {
    let mut levels = vec![base.to_vec()];
    let closed: BTreeSet<Vertex> = base.iter().flat_map(|&v| std::iter::once(v).chain(g.neighbors(v).iter().copied())).collect();
    let mut l1 = base.to_vec();
    for &x in &closed {
        l1.extend(g.neighbors(x).iter().copied().filter(|&w| g.degree(w) == 2));
        if g.degree(x) == 2 {
            l1.push(x);
        }
    }
    dedup_keep_order(&mut l1);
    let mut l2 = l1.clone();
    l2.extend(base.iter().flat_map(|&v| sorted_neighbors(g, v)));
    dedup_keep_order(&mut l2);
    for l in [l1, l2] {
        if l.len() <= 9 && levels.last() != Some(&l) {
            levels.push(l);
        }
    }
    levels
}

pub(crate) enum SearchOutcome {
    Found(Vec<Color>),
    Exhausted(u64),
    Budget,
    Blocked(Vertex),
}

/// Tries every assignment of `1..=palette` to `set` in lexicographic order
/// with all other colors fixed; returns the first valid full coloring.
pub(crate) fn bounded_search(g: &Graph, base: &[Color], set: &[Vertex], palette: Color, budget: u64) -> SearchOutcome {
    let mut colors = base.to_vec();
    for &x in set {
        colors[x] = 0;
    }
    let touched: BTreeSet<Vertex> =
        set.iter().flat_map(|&v| std::iter::once(v).chain(g.neighbors(v).iter().copied())).collect();
    for v in g.vertices().filter(|v| !touched.contains(v)) {
        if vertex_ok(g, &colors, v) != Some(true) {
            return SearchOutcome::Blocked(v);
        }
    }
    let mut nodes = 0u64;

    fn dfs(g: &Graph, colors: &mut [Color], set: &[Vertex], i: usize, palette: Color, nodes: &mut u64, budget: u64) -> Option<bool> {
        if i == set.len() {
            return Some(true);
        }
        let x = set[i];
        for c in 1..=palette {
            *nodes += 1;
            if *nodes > budget {
                return None;
            }
            colors[x] = c;
            if g.neighbors(x).iter().any(|&y| colors[y] == c) {
                continue;
            }
            if !locally_ok(g, colors, x) {
                continue;
            }
            if dfs(g, colors, set, i + 1, palette, nodes, budget)? {
                return Some(true);
            }
        }
        colors[x] = 0;
        Some(false)
    }

    match dfs(g, &mut colors, set, 0, palette, &mut nodes, budget) {
        None => SearchOutcome::Budget,
        Some(true) => SearchOutcome::Found(colors),
        Some(false) => SearchOutcome::Exhausted(nodes),
    }
}

fn search_path(
    g: &Graph,
    base: &[Color],
    sets: &[Vec<Vertex>],
    trace: &mut Vec<String>,
) -> Option<(Vec<Color>, usize)> {
    for (level, set) in sets.iter().enumerate() {
        match bounded_search(g, base, set, PALETTE, SEARCH_BUDGET) {
            SearchOutcome::Found(c) => {
                trace.push(format!("search level {level} over {set:?}: found"));
                return Some((c, level));
            }
            SearchOutcome::Exhausted(n) => trace.push(format!("search level {level} over {set:?}: none after {n} nodes")),
            SearchOutcome::Budget => trace.push(format!("search level {level} over {set:?}: budget exhausted")),
            SearchOutcome::Blocked(v) => trace.push(format!("search level {level} over {set:?}: vertex {v} invalid outside the set")),
        }
    }
    None
}

fn finish(g: &Graph, colors: Vec<Color>, method: ExtensionMethod, trace: Vec<String>) -> Result<Extension, ExtensionFailure> {
    let coloring = match Coloring::new(colors, PALETTE) {
        Ok(c) => c,
        Err(e) => return Err(ExtensionFailure { trace: [trace, vec![format!("incomplete coloring: {e}")]].concat() }),
    };
    if is_valid_odd_coloring(g, &coloring) {
        Ok(Extension { coloring, method, trace })
    } else {
        Err(ExtensionFailure { trace: [trace, vec!["result is not an odd coloring".into()]].concat() })
    }
}

fn scripted(g: &Graph, colors: &mut [Color], p: &Plan, trace: &mut Vec<String>) -> bool {
    for &x in &p.greedy {
        let f = forbidden(g, colors, x);
        match (1..=PALETTE).find(|c| !f.contains(c)) {
            Some(c) => {
                colors[x] = c;
                trace.push(format!("color {x}: forbidden {} -> {c}", fmt_set(&f)));
            }
            None => {
                trace.push(format!("color {x}: forbidden {} leaves nothing", fmt_set(&f)));
                return false;
            }
        }
    }
    for &t in &p.repair {
        if vertex_ok(g, colors, t) == Some(true) {
            continue;
        }
        match repair_via_2_neighbor(g, colors, t, PALETTE) {
            Some((w, c)) => trace.push(format!("repair {t}: recolor 2-neighbor {w} -> {c}")),
            None => {
                trace.push(format!("repair {t}: no 2-neighbor recoloring works"));
                return false;
            }
        }
    }
    true
}

/// Extends an odd 7-coloring of the reduced graph to `g`. Scripted lemmas
/// run the forbidden-set procedure first and fall back to bounded search
/// over the same vertices; the others go straight to bounded search.
pub fn extend_coloring(g: &Graph, m: &ConfigMatch, red: &Reduction, reduced: &Coloring) -> Result<Extension, ExtensionFailure> {
    let base = lift(red, reduced).map_err(|e| ExtensionFailure { trace: vec![e.to_string()] })?;
    let p = plan(g, m).map_err(|e| ExtensionFailure { trace: vec![e.to_string()] })?;
    let mut trace = Vec::new();
    if m.lemma.is_scripted() {
        let mut colors = base.clone();
        if scripted(g, &mut colors, &p, &mut trace) {
            match finish(g, colors, ExtensionMethod::Scripted, trace.clone()) {
                Ok(ext) => return Ok(ext),
                Err(f) => trace = f.trace,
            }
        }
        trace.push("scripted procedure failed; falling back to bounded search".into());
    }
    match search_path(g, &base, &search_levels(g, &p.search), &mut trace) {
        Some((colors, level)) => finish(g, colors, ExtensionMethod::BoundedSearch { level }, trace),
        None => Err(ExtensionFailure { trace }),
    }
}

/// Bounded search over an explicit set, for cross-checks.
pub fn extend_by_search(g: &Graph, red: &Reduction, reduced: &Coloring, set: &[Vertex]) -> Result<Extension, ExtensionFailure> {
    let base = lift(red, reduced).map_err(|e| ExtensionFailure { trace: vec![e.to_string()] })?;
    let mut trace = Vec::new();
    match search_path(g, &base, &[set.to_vec()], &mut trace) {
        Some((colors, _)) => finish(g, colors, ExtensionMethod::BoundedSearch { level: 0 }, trace),
        None => Err(ExtensionFailure { trace }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Passed(ExtensionMethod),
    Failed(Vec<String>),
    Skipped(String),
    /// Detection-only lemmas: final charges around the match.
    Detected(Vec<(Element, Charge)>),
}

#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub instance: usize,
    pub matched: ConfigMatch,
    pub reduction: Option<Reduction>,
    pub oracle: Option<Coloring>,
    pub extension: Option<Coloring>,
    pub outcome: Outcome,
    pub verified: bool,
}

#[derive(Debug, Clone)]
pub struct HarnessConfig {
    pub trials: usize,
    pub seed: u64,
    pub jobs: usize,
    pub time_limit: Option<Duration>,
    pub reproducer_dir: Option<PathBuf>,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig { trials: usize::MAX, seed: 0, jobs: 1, time_limit: Some(Duration::from_secs(60)), reproducer_dir: None }
    }
}

pub fn run_lemma(inst: &Instance, index: usize, m: &ConfigMatch, cfg: &HarnessConfig) -> LemmaReport {
    let mut report =
        LemmaReport { instance: index, matched: m.clone(), reduction: None, oracle: None, extension: None, outcome: Outcome::Skipped(String::new()), verified: false };
    if m.lemma == LemmaId::Twelve {
        report.outcome = Outcome::Detected(neighborhood_finals(inst, m));
        return report;
    }
    if m.lemma.needs_triangle_free() && !inst.graph.is_triangle_free() {
        report.outcome = Outcome::Skipped("input has a triangle".into());
        return report;
    }
    let red = match apply_surgery(&inst.graph, m) {
        Ok(r) => r,
        Err(e) => {
            report.outcome = Outcome::Failed(vec![e.to_string()]);
            return report;
        }
    };
    let mut sc = SearchConfig::new(PALETTE);
    sc.time_limit = cfg.time_limit;
    let oracle = match solve_odd_coloring(&red.graph, &sc) {
        Ok(r) if r.status == SolveStatus::Colorable => r.witness.expect("colorable result carries a witness"),
        Ok(r) => {
            report.outcome = Outcome::Skipped(format!("oracle: {}", r.status.as_str()));
            report.reduction = Some(red);
            return report;
        }
        Err(e) => {
            report.outcome = Outcome::Skipped(format!("oracle: {e}"));
            report.reduction = Some(red);
            return report;
        }
    };
    let oracle = Coloring::new(oracle.colors().to_vec(), PALETTE).expect("solver colors fit the palette");
    match extend_coloring(&inst.graph, m, &red, &oracle) {
        Ok(ext) => {
            report.verified = is_valid_odd_coloring(&inst.graph, &ext.coloring);
            report.outcome =
                if report.verified { Outcome::Passed(ext.method) } else { Outcome::Failed(vec!["unverified".into()]) };
            report.extension = Some(ext.coloring);
        }
        Err(f) => report.outcome = Outcome::Failed(f.trace),
    }
    report.reduction = Some(red);
    report.oracle = Some(oracle);
    report
}

fn neighborhood_finals(inst: &Instance, m: &ConfigMatch) -> Vec<(Element, Charge)> {
    let Some(emb) = &inst.embedding else { return Vec::new() };
    let ledger = apply_rules(emb, &Classification::new(emb));
    m.vertices().into_iter().map(|v| (Element::Vertex(v), ledger.final_charge(Element::Vertex(v)))).collect()
}

#[derive(Debug, Clone)]
pub struct HarnessSummary {
    pub lemma: LemmaId,
    pub matched: usize,
    pub reports: Vec<LemmaReport>,
    pub reproducers: Vec<PathBuf>,
}

impl HarnessSummary {
    pub fn sampled(&self) -> usize {
        self.reports.len()
    }

    fn count(&self, f: impl Fn(&Outcome) -> bool) -> usize {
        self.reports.iter().filter(|r| f(&r.outcome)).count()
    }

    pub fn passed(&self) -> usize {
        self.count(|o| matches!(o, Outcome::Passed(_)))
    }

    pub fn scripted(&self) -> usize {
        self.count(|o| *o == Outcome::Passed(ExtensionMethod::Scripted))
    }

    pub fn searched(&self) -> usize {
        self.count(|o| matches!(o, Outcome::Passed(ExtensionMethod::BoundedSearch { .. })))
    }

    pub fn failed(&self) -> usize {
        self.count(|o| matches!(o, Outcome::Failed(_)))
    }

    pub fn skipped(&self) -> usize {
        self.count(|o| matches!(o, Outcome::Skipped(_)))
    }

    pub fn detected(&self) -> usize {
        self.count(|o| matches!(o, Outcome::Detected(_)))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{}: matched {}, sampled {}, passed {} (scripted {}, search {}), failed {}, skipped {}",
            self.lemma,
            self.matched,
            self.sampled(),
            self.passed(),
            self.scripted(),
            self.searched(),
            self.failed(),
            self.skipped()
        );
        if self.detected() > 0 {
            let _ = write!(out, ", detected {}", self.detected());
        }
        out.push('\n');
        for r in &self.reports {
            match &r.outcome {
                Outcome::Failed(trace) => {
                    let _ = writeln!(out, "FAILURE instance {} {}: {}", r.instance, r.matched, trace.join("; "));
                }
                Outcome::Skipped(why) => {
                    let _ = writeln!(out, "skipped instance {} {}: {why}", r.instance, r.matched);
                }
                Outcome::Detected(finals) => {
                    let parts: Vec<String> = finals.iter().map(|(e, c)| format!("{e}={c}")).collect();
                    let _ = writeln!(out, "detected instance {} {}: {}", r.instance, r.matched, parts.join(" "));
                }
                Outcome::Passed(_) => {}
            }
        }
        for p in &self.reproducers {
            let _ = writeln!(out, "reproducer {}", p.display());
        }
        out
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("lemma\tinstance\tmatch\tstatus\tmethod\treduced_vertices\tdetail\n");
        for r in &self.reports {
            let (status, method, detail) = match &r.outcome {
                Outcome::Passed(m) => ("pass", m.to_string(), String::new()),
                Outcome::Failed(t) => ("fail", String::new(), t.join("; ")),
                Outcome::Skipped(why) => ("skip", String::new(), why.clone()),
                Outcome::Detected(finals) => {
                    let parts: Vec<String> = finals.iter().map(|(e, c)| format!("{e}={c}")).collect();
                    ("detected", String::new(), parts.join(" "))
                }
            };
            let reduced = r.reduction.as_ref().map(|x| x.graph.vertex_count().to_string()).unwrap_or_default();
            let _ = writeln!(out, "{}\t{}\t{}\t{status}\t{method}\t{reduced}\t{detail}", self.lemma, r.instance, r.matched);
        }
        out
    }
}

/// Matches every instance, samples `trials` matches with the seed (all of
/// them when `trials` covers the total), and runs each through
/// surgery, oracle, extension and verification. Reports come back in
/// canonical (instance, match) order regardless of `jobs`.
pub fn run_lemma_harness(instances: &[Instance], lemma: LemmaId, cfg: &HarnessConfig) -> Result<HarnessSummary, LemmaError> {
    let mut all: Vec<(usize, ConfigMatch)> = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        for m in find_configurations(inst, lemma)? {
            all.push((i, m));
        }
    }
    let matched = all.len();
    if cfg.trials < matched {
        let mut idx: Vec<usize> = (0..matched).collect();
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
        let mut keep: Vec<usize> = idx.into_iter().take(cfg.trials).collect();
        keep.sort_unstable();
        all = keep.into_iter().map(|k| all[k].clone()).collect();
    }

    let jobs = cfg.jobs.max(1).min(all.len().max(1));
    let mut reports: Vec<Option<LemmaReport>> = vec![None; all.len()];
    std::thread::scope(|s| {
        let chunks: Vec<_> = reports.chunks_mut(all.len().div_ceil(jobs).max(1)).collect();
        let mut start = 0;
        for chunk in chunks {
            let work = &all[start..start + chunk.len()];
            start += chunk.len();
            s.spawn(move || {
                for (slot, (i, m)) in chunk.iter_mut().zip(work) {
                    *slot = Some(run_lemma(&instances[*i], *i, m, cfg));
                }
            });
        }
    });
    let reports: Vec<LemmaReport> = reports.into_iter().map(|r| r.expect("every slot filled")).collect();

    let mut reproducers = Vec::new();
    if let Some(dir) = &cfg.reproducer_dir {
        for (k, r) in reports.iter().enumerate() {
            if matches!(r.outcome, Outcome::Failed(_)) {
                reproducers.push(write_reproducer(dir, &instances[r.instance], r, k)?);
            }
        }
    }
    Ok(HarnessSummary { lemma, matched, reports, reproducers })
}

/// Writes `<lemma>-<k>.g6`, `.rot` (when embedded), `.match` and
/// `.coloring` (the oracle coloring of the reduced graph) and returns the
/// stem path.
pub fn write_reproducer(dir: &Path, inst: &Instance, r: &LemmaReport, k: usize) -> Result<PathBuf, LemmaError> {
    let io = |e: std::io::Error| LemmaError::Io(e.to_string());
    std::fs::create_dir_all(dir).map_err(io)?;
    let stem = dir.join(format!("{}-{k}", r.matched.lemma));
    let with = |ext: &str| stem.with_extension(ext);
    std::fs::write(with("g6"), to_graph6(&inst.graph) + "\n").map_err(io)?;
    if let Some(emb) = &inst.embedding {
        std::fs::write(with("rot"), emb.rotation.to_rot_string()).map_err(io)?;
    }
    let mut matched = r.matched.to_role_lines();
    let _ = writeln!(matched, "instance={}", inst.name);
    if let Outcome::Failed(trace) = &r.outcome {
        for t in trace {
            let _ = writeln!(matched, "# {t}");
        }
    }
    std::fs::write(with("match"), matched).map_err(io)?;
    if let Some(c) = &r.oracle {
        std::fs::write(with("coloring"), c.to_file_string()).map_err(io)?;
    }
    Ok(stem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::tests::torus_grid;
    use crate::embedding::RotationSystem;

    fn petersen() -> Graph {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((i + 5, (i + 2) % 5 + 5));
        }
        Graph::from_edges(10, e).unwrap()
    }

    fn grid_instance(m: usize, n: usize) -> Instance {
        Instance::embedded(format!("grid{m}x{n}"), Embedding::new(torus_grid(m, n)).unwrap())
    }

    #[test]
    fn lemma_ids_round_trip() {
        for l in LemmaId::ALL {
            assert_eq!(l.as_str().parse::<LemmaId>().unwrap(), l);
        }
        assert!("L-nope".parse::<LemmaId>().is_err());
    }

    #[test]
    fn petersen_three_vertices() {
        let inst = Instance::bare("petersen", petersen());
        let ms = find_configurations(&inst, LemmaId::No3v).unwrap();
        assert_eq!(ms.len(), 10);
        let red = apply_surgery(&inst.graph, &ms[0]).unwrap();
        assert_eq!(red.graph.vertex_count(), 9);
        for v in ms[0].vertices().into_iter().skip(1) {
            assert_eq!(red.graph.degree(red.to_reduced[v].unwrap()), 2);
        }
    }

    #[test]
    fn path_has_one_adjacent_two_vertex_pair() {
        let inst = Instance::bare("p4", Graph::path(4));
        let ms = find_configurations(&inst, LemmaId::Tool1).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].to_string(), "v=1 u=2 v'=0 u'=3");
    }

    #[test]
    fn grid_quad_faces_all_match() {
        let inst = grid_instance(4, 4);
        let ms = find_configurations(&inst, LemmaId::QuadFourZero).unwrap();
        assert_eq!(ms.len(), 16);
        let red = apply_surgery(&inst.graph, &ms[0]).unwrap();
        assert_eq!(red.graph.vertex_count(), 16 - 2 + 6);
        assert_eq!(red.produced.len(), 6);
        assert!(red.graph.is_triangle_free());
    }

    #[test]
    fn face_lemmas_need_an_embedding() {
        let inst = Instance::bare("g", Graph::cycle(4));
        assert_eq!(find_configurations(&inst, LemmaId::QuadFourZero), Err(LemmaError::NeedsEmbedding(LemmaId::QuadFourZero)));
    }

    #[test]
    fn split_then_contract_restores_graph() {
        let g = torus_grid(4, 4).graph().clone();
        let m = ConfigMatch::new(LemmaId::Tool2, vec![("u", 0), ("v", 1)]);
        let red = apply_surgery(&g, &m).unwrap();
        assert_eq!(red.graph.vertex_count(), 17);
        assert!(!red.graph.has_edge(0, 1));
        assert_eq!(red.produced, vec![16]);
        assert_eq!(contract_two_vertex(&red.graph, 16).unwrap(), g);
    }

    #[test]
    fn no3v_forbidden_set_fits_palette() {
        let inst = Instance::bare("petersen", petersen());
        for m in find_configurations(&inst, LemmaId::No3v).unwrap() {
            let r = run_lemma(&inst, 0, &m, &HarnessConfig::default());
            assert_eq!(r.outcome, Outcome::Passed(ExtensionMethod::Scripted), "{m}");
        }
    }

    #[test]
    fn tool1_scripted_and_search_agree() {
        let inst = Instance::bare("c9", Graph::cycle(9));
        for m in find_configurations(&inst, LemmaId::Tool1).unwrap() {
            let red = apply_surgery(&inst.graph, &m).unwrap();
            let oracle = solve_odd_coloring(&red.graph, &SearchConfig::new(PALETTE)).unwrap().witness.unwrap();
            let oracle = Coloring::new(oracle.colors().to_vec(), PALETTE).unwrap();
            let scripted = extend_coloring(&inst.graph, &m, &red, &oracle);
            let searched = extend_by_search(&inst.graph, &red, &oracle, &[m.role("v").unwrap(), m.role("u").unwrap()]);
            assert_eq!(scripted.is_ok(), searched.is_ok(), "{m}");
            assert_eq!(scripted.unwrap().method, ExtensionMethod::Scripted);
        }
    }

    #[test]
    fn tool1_repairs_equal_neighbor_colors() {
        // Reduced coloring gives u and v' the same color, which the
        // forbidden set alone cannot fix.
        let g = Graph::path(5);
        let m = ConfigMatch::new(LemmaId::Tool1, vec![("v", 2), ("u", 3), ("v'", 1), ("u'", 4)]);
        let red = apply_surgery(&g, &m).unwrap();
        // reduced ids: 0,1,3,4 -> 0,1,2,3; colors for 0,1,3,4
        let reduced = Coloring::new(vec![1, 2, 2, 1], PALETTE).unwrap();
        let ext = extend_coloring(&g, &m, &red, &reduced).unwrap();
        assert_eq!(ext.method, ExtensionMethod::Scripted);
        assert!(ext.trace.iter().any(|t| t.starts_with("repair 2")));
        assert!(is_valid_odd_coloring(&g, &ext.coloring));
    }

    #[test]
    fn quad_face_harness_on_grid() {
        let summary = run_lemma_harness(&[grid_instance(4, 4)], LemmaId::QuadFourZero, &HarnessConfig::default()).unwrap();
        assert_eq!(summary.matched, 16);
        assert_eq!(summary.passed(), 16, "{}", summary.to_text());
    }

    #[test]
    fn harness_sampling_is_seeded() {
        let inst = Instance::bare("petersen", petersen());
        let cfg = HarnessConfig { trials: 4, seed: 11, ..HarnessConfig::default() };
        let a = run_lemma_harness(std::slice::from_ref(&inst), LemmaId::No3v, &cfg).unwrap();
        let b = run_lemma_harness(std::slice::from_ref(&inst), LemmaId::No3v, &HarnessConfig { jobs: 3, ..cfg }).unwrap();
        assert_eq!(a.sampled(), 4);
        assert_eq!(a.to_tsv(), b.to_tsv());
    }

    #[test]
    fn two_parallel_paths_make_a_crowded_quad() {
        let (a, x) = torus_grid(4, 4).insert_two_path((1, 0), (4, 5)).unwrap();
        let (b, _) = a.insert_two_path((1, 0), (x, 5)).or_else(|_| a.insert_two_path((x, 0), (4, 5))).unwrap();
        let inst = Instance::embedded("pp", Embedding::new(b).unwrap());
        let ms = find_configurations(&inst, LemmaId::FourFiveFace).unwrap();
        assert_eq!(ms.len(), 1, "{ms:?}");
        let r = run_lemma(&inst, 0, &ms[0], &HarnessConfig::default());
        assert_eq!(r.outcome, Outcome::Passed(ExtensionMethod::Scripted));
    }

    fn twelve_wheel(reverse_outer: bool) -> RotationSystem {
        // center 0, spokes 1..=12, rim 2-vertices 13..=24 between spokes,
        // pendant 2-vertices 25..=36, outer hub 37
        let spoke = |i: usize| 1 + i % 12;
        let rim = |i: usize| 13 + i % 12;
        let pend = |i: usize| 25 + i % 12;
        let hub = 37;
        let mut rot = vec![Vec::new(); 38];
        rot[0] = (0..12).map(spoke).collect();
        for i in 0..12 {
            rot[spoke(i)] = vec![hub, rim(i), 0, rim(i + 11), pend(i)];
            rot[rim(i)] = vec![spoke(i), spoke(i + 1)];
            rot[pend(i)] = vec![spoke(i), hub];
        }
        let mut outer: Vec<usize> = (0..12).flat_map(|i| [pend(i), spoke(i)]).collect();
        if reverse_outer {
            outer.reverse();
        }
        rot[hub] = outer;
        RotationSystem::new(rot).unwrap()
    }

    #[test]
    fn twelve_vertex_detection() {
        let rs = [twelve_wheel(false), twelve_wheel(true)]
            .into_iter()
            .find(|rs| rs.euler_characteristic().unwrap() == 2)
            .expect("one orientation of the hub is planar");
        let inst = Instance::embedded("wheel", Embedding::new(rs).unwrap());
        let ms = find_configurations(&inst, LemmaId::Twelve).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].role("v"), Some(0));
        let r = run_lemma(&inst, 0, &ms[0], &HarnessConfig::default());
        let Outcome::Detected(finals) = r.outcome else { panic!("expected detection") };
        assert_eq!(finals.len(), 13);
        assert!(find_configurations(&grid_instance(4, 4), LemmaId::Twelve).unwrap().is_empty());
    }
}
