//! Vertex, face, and 2-vertex classifications used by the discharging
//! rules, plus the structural screens a minimal counterexample must avoid.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::embedding::{Embedding, FaceId};
use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexRole {
    TwoVertex,
    Convenient,
    NonConvenient,
    /// Degree 0, 1 or 3: convenience is only defined for 4+-vertices.
    Unclassified,
}

impl VertexRole {
    pub fn as_str(self) -> &'static str {
        match self {
            VertexRole::TwoVertex => "two-vertex",
            VertexRole::Convenient => "convenient",
            VertexRole::NonConvenient => "non-convenient",
            VertexRole::Unclassified => "unclassified",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexClass {
    pub degree: usize,
    /// The `i` of a `k_i`-vertex.
    pub two_neighbors: usize,
    pub convenient: bool,
    pub role: VertexRole,
}

impl VertexClass {
    /// A 4+-vertex that is not convenient.
    pub fn non_convenient(&self) -> bool {
        self.role == VertexRole::NonConvenient
    }

    pub fn is_k_i(&self, k: usize, i: usize) -> bool {
        self.degree == k && self.two_neighbors == i
    }
}

pub fn classify_vertices(g: &Graph) -> Vec<VertexClass> {
    g.vertices()
        .map(|v| {
            let degree = g.degree(v);
            let two_neighbors = g.neighbors(v).iter().filter(|&&u| g.degree(u) == 2).count();
            let convenient = degree >= 4 && (degree % 2 == 1 || two_neighbors > 0);
            let role = match degree {
                2 => VertexRole::TwoVertex,
                d if d >= 4 && convenient => VertexRole::Convenient,
                d if d >= 4 => VertexRole::NonConvenient,
                _ => VertexRole::Unclassified,
            };
            VertexClass { degree, two_neighbors, convenient, role }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Badness {
    Bad,
    SemiBad,
    NonBad,
}

impl Badness {
    pub fn as_str(self) -> &'static str {
        match self {
            Badness::Bad => "bad",
            Badness::SemiBad => "semi-bad",
            Badness::NonBad => "non-bad",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoVertexBadness {
    pub vertex: Vertex,
    pub kind: Badness,
    /// 4-faces among the vertex's two corners.
    pub four_face_corners: usize,
}

pub fn classify_two_vertices(emb: &Embedding) -> Vec<TwoVertexBadness> {
    let g = emb.graph();
    g.vertices()
        .filter(|&v| g.degree(v) == 2)
        .map(|v| {
            let count = emb.incidence.vertex_faces(v).filter(|&f| emb.face_degree(f) == 4).count();
            let kind = match count {
                2 => Badness::Bad,
                1 => Badness::SemiBad,
                _ => Badness::NonBad,
            };
            TwoVertexBadness { vertex: v, kind, four_face_corners: count }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceClass {
    pub face: FaceId,
    pub degree: usize,
    /// Distinct 2-vertices on the boundary (the `i` of a `k_i`-face).
    pub two_vertices: usize,
    /// Vertex degrees in boundary-walk order from the canonical dart.
    pub degree_vector: Vec<usize>,
}

impl FaceClass {
    pub fn is_k_i(&self, k: usize, i: usize) -> bool {
        self.degree == k && self.two_vertices == i
    }
}

pub fn classify_faces(emb: &Embedding) -> Vec<FaceClass> {
    let g = emb.graph();
    emb.faces
        .faces()
        .iter()
        .enumerate()
        .map(|(id, f)| {
            let two_vertices = f.distinct_vertices().into_iter().filter(|&v| g.degree(v) == 2).count();
            FaceClass {
                face: id,
                degree: f.degree(),
                two_vertices,
                degree_vector: f.vertices().map(|v| g.degree(v)).collect(),
            }
        })
        .collect()
}

/// A 5_3-vertex `poor` that is poor to its non-convenient neighbor
/// `beneficiary`: both faces at their shared edge are 4_1-faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PoorRelation {
    pub poor: Vertex,
    pub beneficiary: Vertex,
    pub faces: (FaceId, FaceId),
}

/// Everything the discharging rules and screens consume, computed once.
#[derive(Debug, Clone)]
pub struct Classification {
    pub vertices: Vec<VertexClass>,
    pub two_vertices: Vec<TwoVertexBadness>,
    pub faces: Vec<FaceClass>,
    pub poor: Vec<PoorRelation>,
}

impl Classification {
    pub fn new(emb: &Embedding) -> Self {
        let vertices = classify_vertices(emb.graph());
        let faces = classify_faces(emb);
        let poor = poor_relations_with(emb, &vertices, &faces);
        Classification { vertices, two_vertices: classify_two_vertices(emb), faces, poor }
    }

    pub fn badness(&self, v: Vertex) -> Option<Badness> {
        self.two_vertices.iter().find(|b| b.vertex == v).map(|b| b.kind)
    }

    pub fn is_poor_to(&self, poor: Vertex, beneficiary: Vertex) -> bool {
        self.poor.binary_search_by(|r| (r.poor, r.beneficiary).cmp(&(poor, beneficiary))).is_ok()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str("table\tid\tdegree\ti\trole\tdetail\n");
        for (v, c) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "vertex\t{v}\t{}\t{}\t{}\t", c.degree, c.two_neighbors, c.role.as_str());
        }
        for b in &self.two_vertices {
            let _ = writeln!(out, "two_vertex\t{}\t2\t\t{}\t4-face corners={}", b.vertex, b.kind.as_str(), b.four_face_corners);
        }
        for f in &self.faces {
            let vec: Vec<String> = f.degree_vector.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "face\t{}\t{}\t{}\t\t({})", f.face, f.degree, f.two_vertices, vec.join(","));
        }
        for r in &self.poor {
            let _ = writeln!(out, "poor\t{}\t5\t3\t\tto {} via faces {},{}", r.poor, r.beneficiary, r.faces.0, r.faces.1);
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "vertices:");
        for (v, c) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "  v{v}: {}_{} {}", c.degree, c.two_neighbors, c.role.as_str());
        }
        let _ = writeln!(out, "2-vertices:");
        for b in &self.two_vertices {
            let _ = writeln!(out, "  v{}: {}", b.vertex, b.kind.as_str());
        }
        let _ = writeln!(out, "faces:");
        for f in &self.faces {
            let vec: Vec<String> = f.degree_vector.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "  f{}: {}_{} ({})", f.face, f.degree, f.two_vertices, vec.join(","));
        }
        let _ = writeln!(out, "poor relations:");
        for r in &self.poor {
            let _ = writeln!(out, "  v{} poor to v{} (faces f{}, f{})", r.poor, r.beneficiary, r.faces.0, r.faces.1);
        }
        out
    }
}

pub fn poor_relations(emb: &Embedding) -> Vec<PoorRelation> {
    let vertices = classify_vertices(emb.graph());
    let faces = classify_faces(emb);
    poor_relations_with(emb, &vertices, &faces)
}

fn poor_relations_with(emb: &Embedding, vertices: &[VertexClass], faces: &[FaceClass]) -> Vec<PoorRelation> {
    let g = emb.graph();
    let mut out = Vec::new();
    for v in g.vertices() {
        if !vertices[v].is_k_i(5, 3) {
            continue;
        }
        for &u in g.neighbors(v) {
            if !vertices[u].non_convenient() {
                continue;
            }
            let (f1, f2) = emb.faces_at_edge(v, u).expect("adjacent vertices share an edge");
            if faces[f1].is_k_i(4, 1) && faces[f2].is_k_i(4, 1) {
                out.push(PoorRelation { poor: v, beneficiary: u, faces: (f1, f2) });
            }
        }
    }
    out.sort_unstable();
    out
}

/// Structural screens: shapes that cannot appear in a minimal counterexample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Screen {
    ThreeVertex,
    AdjacentTwoVertices,
    AdjacentConvenient,
    Overloaded,
    CrowdedSmallFace,
    QuadFourZeroFace,
}

impl Screen {
    pub const ALL: [Screen; 6] = [
        Screen::ThreeVertex,
        Screen::AdjacentTwoVertices,
        Screen::AdjacentConvenient,
        Screen::Overloaded,
        Screen::CrowdedSmallFace,
        Screen::QuadFourZeroFace,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Screen::ThreeVertex => "three-vertex",
            Screen::AdjacentTwoVertices => "adjacent-2-vertices",
            Screen::AdjacentConvenient => "adjacent-convenient",
            Screen::Overloaded => "overloaded-k-vertex",
            Screen::CrowdedSmallFace => "4or5-face-two-2-vertices",
            Screen::QuadFourZeroFace => "4_0-quad-face",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ScreenMatch {
    pub screen: Screen,
    pub vertices: Vec<Vertex>,
    pub face: Option<FaceId>,
}

impl ScreenMatch {
    pub fn involves_vertex(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }
}

/// Screens that need no embedding.
pub fn graph_screens(g: &Graph, classes: &[VertexClass]) -> Vec<ScreenMatch> {
    let mut out = Vec::new();
    for v in g.vertices() {
        if g.degree(v) == 3 {
            out.push(ScreenMatch { screen: Screen::ThreeVertex, vertices: vec![v], face: None });
        }
    }
    for (u, v) in g.edges() {
        if g.degree(u) == 2 && g.degree(v) == 2 {
            out.push(ScreenMatch { screen: Screen::AdjacentTwoVertices, vertices: vec![u, v], face: None });
        }
        if classes[u].convenient && classes[v].convenient {
            out.push(ScreenMatch { screen: Screen::AdjacentConvenient, vertices: vec![u, v], face: None });
        }
    }
    for v in g.vertices() {
        let k = g.degree(v);
        if !(4..=6).contains(&k) {
            continue;
        }
        let heavy: Vec<Vertex> =
            g.neighbors(v).iter().copied().filter(|&u| g.degree(u) == 2 || classes[u].convenient).collect();
        if heavy.len() > 2 * k - 7 {
            let mut vs = vec![v];
            vs.extend(heavy);
            out.push(ScreenMatch { screen: Screen::Overloaded, vertices: vs, face: None });
        }
    }
    out
}

pub fn screens(emb: &Embedding, cls: &Classification) -> Vec<ScreenMatch> {
    let g = emb.graph();
    let mut out = graph_screens(g, &cls.vertices);
    for (id, f) in emb.faces.faces().iter().enumerate() {
        let fc = &cls.faces[id];
        if (fc.degree == 4 || fc.degree == 5) && fc.two_vertices >= 2 {
            let twos: Vec<Vertex> = f.distinct_vertices().into_iter().filter(|&v| g.degree(v) == 2).collect();
            out.push(ScreenMatch { screen: Screen::CrowdedSmallFace, vertices: twos, face: Some(id) });
        }
        if is_four_zero_quad(emb, cls, id) {
            out.push(ScreenMatch { screen: Screen::QuadFourZeroFace, vertices: f.vertices().collect(), face: Some(id) });
        }
    }
    out.sort();
    out
}

/// A 4-face on four distinct 4_0-vertices.
pub fn is_four_zero_quad(emb: &Embedding, cls: &Classification, f: FaceId) -> bool {
    let face = emb.faces.face(f);
    face.degree() == 4
        && face.distinct_vertices().len() == 4
        && face.vertices().all(|v| cls.vertices[v].is_k_i(4, 0))
}

pub fn screens_to_tsv(matches: &[ScreenMatch]) -> String {
    let mut out = String::from("screen\tface\tvertices\n");
    for m in matches {
        let vs: Vec<String> = m.vertices.iter().map(usize::to_string).collect();
        let face = m.face.map_or(String::new(), |f| f.to_string());
        let _ = writeln!(out, "{}\t{}\t{}", m.screen.as_str(), face, vs.join(","));
    }
    out
}

/// Distinct vertices in a set of matches.
pub fn matched_vertices(matches: &[ScreenMatch]) -> BTreeSet<Vertex> {
    matches.iter().flat_map(|m| m.vertices.iter().copied()).collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::embedding::RotationSystem;

    pub(crate) fn torus_grid(m: usize, n: usize) -> RotationSystem {
        let id = |r: usize, c: usize| (r % m) * n + (c % n);
        let rotation = (0..m * n)
            .map(|v| {
                let (r, c) = (v / n, v % n);
                vec![id(r + m - 1, c), id(r, c + 1), id(r + 1, c), id(r, c + n - 1)]
            })
            .collect();
        RotationSystem::new(rotation).unwrap()
    }

    #[test]
    fn vertex_examples() {
        // Hub 0 of degree 5 with no 2-neighbors: convenient by odd degree.
        let mut edges: Vec<(usize, usize)> = (1..=5).map(|i| (0, i)).collect();
        for i in 1..=5 {
            edges.push((i, 6));
            edges.push((i, 7));
        }
        let g = Graph::from_edges(8, edges).unwrap();
        let c = classify_vertices(&g);
        assert!(c[0].convenient);
        assert_eq!(c[0].role, VertexRole::Convenient);
        assert_eq!(c[1].role, VertexRole::Unclassified); // degree 3

        // 4-vertex with one 2-neighbor vs. none.
        let rs = torus_grid(4, 4);
        let (sub, w) = rs.subdivide_edge(0, 1).unwrap();
        let c = classify_vertices(sub.graph());
        assert!(c[0].convenient && c[0].is_k_i(4, 1));
        assert_eq!(c[w].role, VertexRole::TwoVertex);
        assert!(!c[5].convenient);
        assert_eq!(c[5].role, VertexRole::NonConvenient);
    }

    #[test]
    fn badness_examples() {
        // One subdivision of a grid edge: the 2-vertex sits between two 5-faces.
        let rs = torus_grid(4, 4);
        let (sub, w) = rs.subdivide_edge(0, 1).unwrap();
        let emb = Embedding::new(sub.clone()).unwrap();
        let b = classify_two_vertices(&emb);
        assert_eq!(b, vec![TwoVertexBadness { vertex: w, kind: Badness::NonBad, four_face_corners: 0 }]);

        // A 2-path drawn diagonally across a grid face: both sides are 4-faces.
        let (chord, x) = rs.insert_two_path((1, 0), (4, 5)).unwrap();
        let emb = Embedding::new(chord).unwrap();
        assert_eq!(classify_two_vertices(&emb)[0], TwoVertexBadness { vertex: x, kind: Badness::Bad, four_face_corners: 2 });

        // Subdivide an edge of one of those 4-faces: x now sees a 4-face and a 5-face.
        let (semi, _) = emb.rotation.subdivide_edge(0, 4).unwrap();
        let emb = Embedding::new(semi).unwrap();
        let bx = classify_two_vertices(&emb).into_iter().find(|b| b.vertex == x).unwrap();
        assert_eq!(bx.kind, Badness::SemiBad);
    }

    #[test]
    fn face_examples() {
        let emb = Embedding::new(torus_grid(4, 4)).unwrap();
        let cls = Classification::new(&emb);
        assert!(cls.faces.iter().all(|f| f.is_k_i(4, 0) && f.degree_vector == vec![4, 4, 4, 4]));
        assert!(cls.poor.is_empty());
        let s = screens(&emb, &cls);
        assert_eq!(s.iter().filter(|m| m.screen == Screen::QuadFourZeroFace).count(), 16);

        let rs = torus_grid(4, 4);
        let (one, _) = rs.insert_two_path((1, 0), (4, 5)).unwrap();
        let emb = Embedding::new(one.clone()).unwrap();
        let cls = Classification::new(&emb);
        assert_eq!(cls.faces.iter().filter(|f| f.is_k_i(4, 1)).count(), 2);

        // Two parallel 2-paths through the same face: the middle face is a 4_2-face.
        let faces = one.trace_faces().unwrap();
        let f = faces.face_of((1, 0)).unwrap();
        assert!(faces.face(f).vertices().any(|v| v == 16));
        let (two, _) = one.insert_two_path((16, 0), (4, 5)).unwrap();
        let emb = Embedding::new(two).unwrap();
        let cls = Classification::new(&emb);
        let crowded: Vec<_> = screens(&emb, &cls).into_iter().filter(|m| m.screen == Screen::CrowdedSmallFace).collect();
        assert_eq!(crowded.len(), 1);
        assert_eq!(crowded[0].vertices.len(), 2);
    }

    #[test]
    fn five_face_with_two_two_vertices_is_flagged() {
        // Subdivide 0-1, then draw a 2-path from 4 to 1 across the resulting
        // 5-face: the face [0 4 x 1 w] carries two 2-vertices.
        let rs = torus_grid(4, 4);
        let (a, w) = rs.subdivide_edge(0, 1).unwrap();
        let (b, x) = a.insert_two_path((0, 4), (5, 1)).unwrap();
        let emb = Embedding::new(b).unwrap();
        let cls = Classification::new(&emb);
        let f = emb.faces.face_of((0, 4)).unwrap();
        assert!(cls.faces[f].is_k_i(5, 2));
        let crowded: Vec<_> = screens(&emb, &cls).into_iter().filter(|m| m.screen == Screen::CrowdedSmallFace).collect();
        assert_eq!(crowded.len(), 1);
        assert_eq!(crowded[0].face, Some(f));
        let mut vs = crowded[0].vertices.clone();
        vs.sort_unstable();
        assert_eq!(vs, vec![w, x]);
    }

    #[test]
    fn poor_relation_fixture() {
        let emb = Embedding::new(poor_fixture()).unwrap();
        let cls = Classification::new(&emb);
        assert!(cls.vertices[0].is_k_i(5, 3));
        assert_eq!(cls.poor.len(), 1);
        let rel = cls.poor[0];
        assert_eq!((rel.poor, rel.beneficiary), (0, 15));
        assert!(cls.vertices[15].non_convenient());
        assert!(cls.faces[rel.faces.0].is_k_i(4, 1) && cls.faces[rel.faces.1].is_k_i(4, 1));
    }

    #[test]
    fn poor_relation_requires_non_convenient_beneficiary() {
        // Subdividing 15-16 (away from both flanking faces) makes 15 convenient.
        let (sub, _) = poor_fixture().subdivide_edge(15, 16).unwrap();
        let emb = Embedding::new(sub).unwrap();
        let cls = Classification::new(&emb);
        assert!(cls.vertices[15].convenient);
        assert!(cls.faces[emb.faces_at_edge(0, 15).unwrap().0].is_k_i(4, 1));
        assert!(cls.poor.is_empty());
    }

    /// Torus fixture: vertex 0 is a 5_3-vertex poor to the non-convenient
    /// 4-vertex 15.
    ///
    /// Built on the 6x6 grid around vertex 14 (relabelled 0): 2-paths from
    /// 14 to 9 and to 21 flank edge 14-15 with two 4_1-faces, edge 14-13 is
    /// removed, and edge 14-20 is subdivided for the third 2-neighbor.
    pub(crate) fn poor_fixture() -> RotationSystem {
        let rs = torus_grid(6, 6);
        let (rs, _) = rs.insert_two_path((8, 14), (15, 9)).unwrap();
        let (rs, _) = rs.insert_two_path((15, 14), (20, 21)).unwrap();
        let rs = rs.remove_edge(14, 13).unwrap();
        let (rs, _) = rs.subdivide_edge(14, 20).unwrap();
        relabel_to_front(&rs, 14)
    }

    /// Swaps vertex `v` with vertex 0 so fixtures can name it 0.
    fn relabel_to_front(rs: &RotationSystem, v: usize) -> RotationSystem {
        let swap = |x: usize| if x == v { 0 } else if x == 0 { v } else { x };
        let n = rs.graph().vertex_count();
        let mut rotation = vec![Vec::new(); n];
        for x in 0..n {
            rotation[swap(x)] = rs.rotation(x).iter().map(|&y| swap(y)).collect();
        }
        RotationSystem::new(rotation).unwrap()
    }
}
