//! Rotation systems, face tracing, and corner incidences.
//!
//! Faces are traced with the successor-of-reverse-dart rule: from dart
//! `(u, v)` the walk continues with `(v, w)` where `w` follows `u` in the
//! cyclic rotation at `v`. Every face walk starts at its lexicographically
//! smallest dart and faces are numbered in order of those starting darts.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Graph, GraphError, Vertex};

pub type FaceId = usize;
pub type Dart = (Vertex, Vertex);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbeddingError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("rotation at vertex {0} is not a permutation of its neighbors")]
    NotPermutation(Vertex),
    #[error("rotation system has no edges")]
    NoEdges,
    #[error("graph is disconnected ({0} components)")]
    Disconnected(usize),
    #[error("darts {0:?} and {1:?} do not lie on the same face")]
    DifferentFaces(Dart, Dart),
    #[error("no edge {0}-{1}")]
    MissingEdge(Vertex, Vertex),
}

/// Cyclic neighbor orders for an orientable embedding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationSystem {
    graph: Graph,
    rotation: Vec<Vec<Vertex>>,
}

impl RotationSystem {
    /// The rotation lists double as the adjacency lists.
    pub fn new(rotation: Vec<Vec<Vertex>>) -> Result<Self, EmbeddingError> {
        let graph = Graph::from_adjacency(rotation.clone())?;
        Ok(RotationSystem { graph, rotation })
    }

    pub fn from_graph(graph: Graph, rotation: Vec<Vec<Vertex>>) -> Result<Self, EmbeddingError> {
        if rotation.len() != graph.vertex_count() {
            return Err(EmbeddingError::NotPermutation(rotation.len().min(graph.vertex_count())));
        }
        for v in graph.vertices() {
            let mut a = rotation[v].clone();
            let mut b = graph.neighbors(v).to_vec();
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                return Err(EmbeddingError::NotPermutation(v));
            }
        }
        Ok(RotationSystem { graph, rotation })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn rotation(&self, v: Vertex) -> &[Vertex] {
        &self.rotation[v]
    }

    fn position(&self, at: Vertex, of: Vertex) -> Option<usize> {
        self.rotation[at].iter().position(|&x| x == of)
    }

    /// Neighbor after `u` in the rotation at `v`.
    pub fn successor(&self, v: Vertex, u: Vertex) -> Option<Vertex> {
        let i = self.position(v, u)?;
        let rot = &self.rotation[v];
        Some(rot[(i + 1) % rot.len()])
    }

    /// The dart following `(u, v)` along its face.
    pub fn next_dart(&self, (u, v): Dart) -> Dart {
        (v, self.successor(v, u).expect("dart must be an edge"))
    }

    pub fn trace_faces(&self) -> Result<FaceSet, EmbeddingError> {
        if self.graph.edge_count() == 0 {
            return Err(EmbeddingError::NoEdges);
        }
        let mut face_of_dart: BTreeMap<Dart, FaceId> = BTreeMap::new();
        let mut walks: Vec<Vec<Dart>> = Vec::new();
        for u in self.graph.vertices() {
            for &v in &self.rotation[u] {
                if face_of_dart.contains_key(&(u, v)) {
                    continue;
                }
                let id = walks.len();
                let mut walk = Vec::new();
                let mut d = (u, v);
                loop {
                    face_of_dart.insert(d, id);
                    walk.push(d);
                    d = self.next_dart(d);
                    if d == (u, v) {
                        break;
                    }
                }
                walks.push(walk);
            }
        }
        // Canonical rotation of each walk, then canonical face order.
        for walk in &mut walks {
            let start = (0..walk.len()).min_by_key(|&i| walk[i]).expect("walk is nonempty");
            walk.rotate_left(start);
        }
        walks.sort_by_key(|w| w[0]);
        for (id, walk) in walks.iter().enumerate() {
            for &d in walk {
                face_of_dart.insert(d, id);
            }
        }
        let faces = walks.into_iter().map(|darts| Face { darts }).collect();
        Ok(FaceSet { faces, face_of_dart })
    }

    /// `|V| - |E| + |F|` for a connected embedding.
    pub fn euler_characteristic(&self) -> Result<i64, EmbeddingError> {
        let comps = self.graph.components().into_iter().max().map_or(0, |c| c + 1);
        if comps > 1 {
            return Err(EmbeddingError::Disconnected(comps));
        }
        let faces = self.trace_faces()?;
        Ok(self.graph.vertex_count() as i64 - self.graph.edge_count() as i64 + faces.len() as i64)
    }

    /// Replaces edge `uv` by the path `u - w - v`; `w` takes the edge's slot
    /// in both rotations and gets id `vertex_count()`.
    pub fn subdivide_edge(&self, u: Vertex, v: Vertex) -> Result<(RotationSystem, Vertex), EmbeddingError> {
        let (iu, iv) = match (self.position(u, v), self.position(v, u)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(EmbeddingError::MissingEdge(u, v)),
        };
        let w = self.graph.vertex_count();
        let mut rotation = self.rotation.clone();
        rotation[u][iu] = w;
        rotation[v][iv] = w;
        rotation.push(vec![u, v]);
        Ok((RotationSystem::new(rotation)?, w))
    }

    /// Deletes edge `uv`; the two faces on either side merge.
    pub fn remove_edge(&self, u: Vertex, v: Vertex) -> Result<RotationSystem, EmbeddingError> {
        if !self.graph.has_edge(u, v) {
            return Err(EmbeddingError::MissingEdge(u, v));
        }
        let mut rotation = self.rotation.clone();
        rotation[u].retain(|&x| x != v);
        rotation[v].retain(|&x| x != u);
        RotationSystem::new(rotation)
    }

    /// Adds a new vertex `x` adjacent to `a` and `b` drawn through the face
    /// containing both corners. A corner is named by its incoming dart
    /// `(p, a)`; `x` is inserted right after `p` in the rotation at `a`.
    pub fn insert_two_path(&self, corner_a: Dart, corner_b: Dart) -> Result<(RotationSystem, Vertex), EmbeddingError> {
        let faces = self.trace_faces()?;
        let fa = faces.face_of(corner_a).ok_or(EmbeddingError::MissingEdge(corner_a.0, corner_a.1))?;
        let fb = faces.face_of(corner_b).ok_or(EmbeddingError::MissingEdge(corner_b.0, corner_b.1))?;
        if fa != fb || corner_a.1 == corner_b.1 {
            return Err(EmbeddingError::DifferentFaces(corner_a, corner_b));
        }
        let x = self.graph.vertex_count();
        let mut rotation = self.rotation.clone();
        for (p, a) in [corner_a, corner_b] {
            let i = self.position(a, p).expect("dart checked above");
            rotation[a].insert(i + 1, x);
        }
        rotation.push(vec![corner_a.1, corner_b.1]);
        Ok((RotationSystem::new(rotation)?, x))
    }

    /// Writes the `.rot` text form: one `v: n1 n2 ...` line per vertex.
    pub fn to_rot_string(&self) -> String {
        let mut out = String::new();
        for (v, rot) in self.rotation.iter().enumerate() {
            let _ = write!(out, "{v}:");
            for u in rot {
                let _ = write!(out, " {u}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses `.rot` text. Blank lines and `#` comments are ignored;
    /// vertices without a line are isolated.
    pub fn parse_rot(text: &str) -> Result<RotationSystem, EmbeddingError> {
        let mut entries: BTreeMap<Vertex, (usize, Vec<Vertex>)> = BTreeMap::new();
        let mut max_id: Option<Vertex> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |message: String| EmbeddingError::Parse { line: line_no, message };
            let (head, tail) = line.split_once(':').ok_or_else(|| perr("expected `v: n1 n2 ...`".into()))?;
            let v: Vertex = head.trim().parse().map_err(|_| perr(format!("bad vertex id `{}`", head.trim())))?;
            let nbrs = tail
                .split_whitespace()
                .map(|t| t.parse::<Vertex>().map_err(|_| perr(format!("bad neighbor id `{t}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            for &x in nbrs.iter().chain(std::iter::once(&v)) {
                max_id = Some(max_id.map_or(x, |m| m.max(x)));
            }
            if entries.insert(v, (line_no, nbrs)).is_some() {
                return Err(perr(format!("vertex {v} listed twice")));
            }
        }
        let n = max_id.map_or(0, |m| m + 1);
        let mut rotation = vec![Vec::new(); n];
        for (v, (_, nbrs)) in entries {
            rotation[v] = nbrs;
        }
        RotationSystem::new(rotation)
    }
}

/// A closed boundary walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub darts: Vec<Dart>,
}

impl Face {
    /// Walk length, counting repeated vertices and edges.
    pub fn degree(&self) -> usize {
        self.darts.len()
    }

    /// Boundary vertices in walk order, with repetition.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.darts.iter().map(|d| d.0)
    }

    /// Distinct boundary vertices in first-visit order.
    pub fn distinct_vertices(&self) -> Vec<Vertex> {
        let mut seen = Vec::new();
        for v in self.vertices() {
            if !seen.contains(&v) {
                seen.push(v);
            }
        }
        seen
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceSet {
    faces: Vec<Face>,
    face_of_dart: BTreeMap<Dart, FaceId>,
}

impl FaceSet {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, id: FaceId) -> &Face {
        &self.faces[id]
    }

    pub fn face_of(&self, dart: Dart) -> Option<FaceId> {
        self.face_of_dart.get(&dart).copied()
    }

    pub fn degree_sum(&self) -> usize {
        self.faces.iter().map(Face::degree).sum()
    }

    /// `face <id> (deg k): v1 v2 ... vk` lines.
    pub fn listing(&self) -> String {
        let mut out = String::new();
        for (id, f) in self.faces.iter().enumerate() {
            let _ = write!(out, "face {id} (deg {}):", f.degree());
            for v in f.vertices() {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }
}

/// The angle at `vertex` between consecutive darts of one face walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Corner {
    pub vertex: Vertex,
    pub face: FaceId,
    pub incoming: Dart,
    pub outgoing: Dart,
}

#[derive(Debug, Clone)]
pub struct Incidence {
    pub corners: Vec<Corner>,
    /// Corner ids per vertex, in rotation order: corner `i` at `v` sits
    /// between `rotation(v)[i]` and `rotation(v)[i + 1]`.
    pub vertex_corners: Vec<Vec<usize>>,
    /// Boundary vertices per face with multiplicity, in walk order.
    pub face_vertices: Vec<Vec<Vertex>>,
}

impl Incidence {
    pub fn vertex_faces(&self, v: Vertex) -> impl Iterator<Item = FaceId> + '_ {
        self.vertex_corners[v].iter().map(|&c| self.corners[c].face)
    }
}

/// A rotation system together with its traced faces and corner table.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub rotation: RotationSystem,
    pub faces: FaceSet,
    pub incidence: Incidence,
}

impl Embedding {
    pub fn new(rotation: RotationSystem) -> Result<Self, EmbeddingError> {
        let faces = rotation.trace_faces()?;
        let incidence = incidences(&rotation, &faces);
        Ok(Embedding { rotation, faces, incidence })
    }

    pub fn graph(&self) -> &Graph {
        self.rotation.graph()
    }

    pub fn face_degree(&self, f: FaceId) -> usize {
        self.faces.face(f).degree()
    }

    /// Faces on either side of edge `uv`: the face of dart `(u, v)` and the
    /// face of dart `(v, u)`.
    pub fn faces_at_edge(&self, u: Vertex, v: Vertex) -> Option<(FaceId, FaceId)> {
        Some((self.faces.face_of((u, v))?, self.faces.face_of((v, u))?))
    }

    pub fn euler_characteristic(&self) -> i64 {
        let g = self.graph();
        g.vertex_count() as i64 - g.edge_count() as i64 + self.faces.len() as i64
    }
}

/// Builds the complete corner table; a vertex met twice by one face walk
/// gets two corners on that face.
pub fn incidences(rs: &RotationSystem, faces: &FaceSet) -> Incidence {
    let g = rs.graph();
    let mut corners = Vec::with_capacity(2 * g.edge_count());
    let mut vertex_corners = vec![Vec::new(); g.vertex_count()];
    for v in g.vertices() {
        for &p in rs.rotation(v) {
            let incoming = (p, v);
            let outgoing = rs.next_dart(incoming);
            let face = faces.face_of(incoming).expect("every dart is traced");
            vertex_corners[v].push(corners.len());
            corners.push(Corner { vertex: v, face, incoming, outgoing });
        }
    }
    let face_vertices = faces.faces().iter().map(|f| f.vertices().collect()).collect();
    Incidence { corners, vertex_corners, face_vertices }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn torus_grid(m: usize, n: usize) -> RotationSystem {
        let id = |r: usize, c: usize| (r % m) * n + (c % n);
        let mut rotation = Vec::new();
        for r in 0..m {
            for c in 0..n {
                rotation.push(vec![id(r + m - 1, c), id(r, c + 1), id(r + 1, c), id(r, c + n - 1)]);
            }
        }
        RotationSystem::new(rotation).unwrap()
    }

    fn k7_torus() -> RotationSystem {
        let rotation = (0..7).map(|i| [1, 3, 2, 6, 4, 5].iter().map(|d| (i + d) % 7).collect()).collect();
        RotationSystem::new(rotation).unwrap()
    }

    fn c4() -> RotationSystem {
        RotationSystem::new(vec![vec![1, 3], vec![2, 0], vec![3, 1], vec![0, 2]]).unwrap()
    }

    #[test]
    fn c4_is_a_sphere() {
        let rs = c4();
        let faces = rs.trace_faces().unwrap();
        assert_eq!(faces.len(), 2);
        assert!(faces.faces().iter().all(|f| f.degree() == 4));
        assert_eq!(rs.euler_characteristic().unwrap(), 2);
        let inc = incidences(&rs, &faces);
        for v in 0..4 {
            let fs: Vec<_> = inc.vertex_faces(v).collect();
            assert_eq!(fs.len(), 2);
            assert_ne!(fs[0], fs[1]);
        }
    }

    #[test]
    fn grid_is_a_torus() {
        let rs = torus_grid(4, 4);
        let faces = rs.trace_faces().unwrap();
        assert_eq!(faces.len(), 16);
        assert!(faces.faces().iter().all(|f| f.degree() == 4));
        assert_eq!(rs.euler_characteristic().unwrap(), 0);
        let inc = incidences(&rs, &faces);
        for v in 0..16 {
            let mut fs: Vec<_> = inc.vertex_faces(v).collect();
            fs.sort_unstable();
            fs.dedup();
            assert_eq!(fs.len(), 4);
        }
    }

    #[test]
    fn k7_on_the_torus() {
        let rs = k7_torus();
        let faces = rs.trace_faces().unwrap();
        assert_eq!(faces.len(), 14);
        assert!(faces.faces().iter().all(|f| f.degree() == 3));
        assert_eq!(rs.euler_characteristic().unwrap(), 0);
    }

    #[test]
    fn cut_vertex_corners() {
        // Two 4-cycles sharing vertex 0: 0-1-2-3-0 and 0-4-5-6-0.
        let rs = RotationSystem::new(vec![
            vec![1, 3, 4, 6],
            vec![2, 0],
            vec![3, 1],
            vec![0, 2],
            vec![5, 0],
            vec![6, 4],
            vec![0, 5],
        ])
        .unwrap();
        let emb = Embedding::new(rs).unwrap();
        assert_eq!(emb.euler_characteristic(), 2);
        assert_eq!(emb.faces.len(), 3);
        assert_eq!(emb.incidence.vertex_corners[0].len(), 4);
        let outer = (0..3).find(|&f| emb.face_degree(f) == 8).expect("outer face has degree 8");
        let hits = emb.incidence.face_vertices[outer].iter().filter(|&&v| v == 0).count();
        assert_eq!(hits, 2);
    }

    #[test]
    fn canonical_face_starts() {
        let faces = torus_grid(4, 5).trace_faces().unwrap();
        let starts: Vec<Dart> = faces.faces().iter().map(|f| f.darts[0]).collect();
        let mut sorted = starts.clone();
        sorted.sort_unstable();
        assert_eq!(starts, sorted);
        for f in faces.faces() {
            assert_eq!(f.darts[0], *f.darts.iter().min().unwrap());
        }
        assert_eq!(faces.listing().lines().next().unwrap(), "face 0 (deg 4): 0 1 16 15");
    }

    #[test]
    fn rot_format_round_trip_and_errors() {
        let rs = torus_grid(3, 4);
        let text = rs.to_rot_string();
        assert_eq!(RotationSystem::parse_rot(&text).unwrap(), rs);
        let commented = "# C4\n0: 1 3\n\n1: 2 0 # tail\n2: 3 1\n3: 0 2\n";
        assert_eq!(RotationSystem::parse_rot(commented).unwrap(), c4());
        assert!(matches!(RotationSystem::parse_rot("0 1 2"), Err(EmbeddingError::Parse { line: 1, .. })));
        assert!(matches!(RotationSystem::parse_rot("0: 1\n"), Err(EmbeddingError::Graph(_))));
        assert!(matches!(RotationSystem::parse_rot("0: 1\n1: 0\n0: 1\n"), Err(EmbeddingError::Parse { line: 3, .. })));
    }

    #[test]
    fn from_graph_checks_permutation() {
        let g = Graph::cycle(4);
        assert!(RotationSystem::from_graph(g.clone(), vec![vec![1, 3], vec![0, 2], vec![1, 3], vec![0, 2]]).is_ok());
        assert_eq!(
            RotationSystem::from_graph(g, vec![vec![1, 2], vec![0, 2], vec![1, 3], vec![0, 2]]),
            Err(EmbeddingError::NotPermutation(0))
        );
    }

    #[test]
    fn disconnected_and_edgeless() {
        let rs = RotationSystem::new(vec![vec![1], vec![0], vec![3], vec![2]]).unwrap();
        assert_eq!(rs.euler_characteristic(), Err(EmbeddingError::Disconnected(2)));
        let rs = RotationSystem::new(vec![vec![]]).unwrap();
        assert_eq!(rs.trace_faces(), Err(EmbeddingError::NoEdges));
    }

    #[test]
    fn subdivision_keeps_euler_characteristic() {
        let rs = torus_grid(4, 4);
        let (sub, w) = rs.subdivide_edge(0, 1).unwrap();
        assert_eq!(w, 16);
        assert_eq!(sub.rotation(w), &[0, 1]);
        assert!(!sub.graph().has_edge(0, 1));
        assert_eq!(sub.euler_characteristic().unwrap(), 0);
        let faces = sub.trace_faces().unwrap();
        let mut degs: Vec<_> = faces.faces().iter().map(Face::degree).collect();
        degs.sort_unstable();
        assert_eq!(&degs[14..], &[5, 5]);
        assert!(rs.subdivide_edge(0, 5).is_err());
    }

    #[test]
    fn two_path_splits_a_face() {
        let rs = torus_grid(4, 4);
        // Face [0 4 5 1] via corners at 0 (entered from 1) and 5 (entered from 4).
        let faces = rs.trace_faces().unwrap();
        assert_eq!(faces.face_of((1, 0)), faces.face_of((4, 5)));
        let (next, x) = rs.insert_two_path((1, 0), (4, 5)).unwrap();
        let emb = Embedding::new(next).unwrap();
        assert_eq!(emb.euler_characteristic(), 0);
        assert_eq!(emb.graph().neighbors(x), &[0, 5]);
        let (f1, f2) = emb.faces_at_edge(0, x).unwrap();
        assert_ne!(f1, f2);
        assert_eq!((emb.face_degree(f1), emb.face_degree(f2)), (4, 4));
        assert!(rs.insert_two_path((1, 0), (2, 3)).is_err());
    }
}
