//! Colorings and the odd-coloring predicate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Graph, Vertex};

/// Colors are `1..=palette`.
pub type Color = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoringError {
    #[error("vertex {vertex} has color {color} outside 1..={palette}")]
    OutOfRange { vertex: Vertex, color: Color, palette: Color },
    #[error("coloring covers {got} vertices but the graph has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("vertex {0} is isolated; its odd-color set is undefined")]
    Isolated(Vertex),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coloring {
    colors: Vec<Color>,
    palette: Color,
}

impl Coloring {
    pub fn new(colors: Vec<Color>, palette: Color) -> Result<Self, ColoringError> {
        if let Some((vertex, &color)) = colors.iter().enumerate().find(|(_, &c)| c == 0 || c > palette) {
            return Err(ColoringError::OutOfRange { vertex, color, palette });
        }
        Ok(Coloring { colors, palette })
    }

    /// Palette inferred as the largest color used.
    pub fn inferred(colors: Vec<Color>) -> Result<Self, ColoringError> {
        let palette = colors.iter().copied().max().unwrap_or(1).max(1);
        Coloring::new(colors, palette)
    }

    pub fn rainbow(n: usize) -> Self {
        Coloring { colors: (1..=n as Color).collect(), palette: (n as Color).max(1) }
    }

    pub fn color(&self, v: Vertex) -> Color {
        self.colors[v]
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn palette(&self) -> Color {
        self.palette
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Same colors, different palette size.
    pub fn with_palette(self, palette: Color) -> Result<Self, ColoringError> {
        Coloring::new(self.colors, palette)
    }

    /// Parses `v color` lines (`#` comments and blank lines ignored). Every
    /// vertex `0..n` must appear exactly once. Without `palette` the largest
    /// color used is taken.
    pub fn parse(text: &str, n: usize, palette: Option<Color>) -> Result<Self, ColoringError> {
        let mut colors: Vec<Option<Color>> = vec![None; n];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |message: String| ColoringError::Parse { line: i + 1, message };
            let mut parts = line.split_whitespace();
            let (v, c) = match (parts.next(), parts.next(), parts.next()) {
                (Some(v), Some(c), None) => (v, c),
                _ => return Err(perr("expected `vertex color`".into())),
            };
            let v: Vertex = v.parse().map_err(|_| perr(format!("bad vertex `{v}`")))?;
            let c: Color = c.parse().map_err(|_| perr(format!("bad color `{c}`")))?;
            if v >= n {
                return Err(perr(format!("vertex {v} not in graph on {n} vertices")));
            }
            if colors[v].replace(c).is_some() {
                return Err(perr(format!("vertex {v} colored twice")));
            }
        }
        let got = colors.iter().filter(|c| c.is_some()).count();
        if got != n {
            return Err(ColoringError::LengthMismatch { expected: n, got });
        }
        let colors: Vec<Color> = colors.into_iter().map(|c| c.expect("counted above")).collect();
        match palette {
            Some(k) => Coloring::new(colors, k),
            None => Coloring::inferred(colors),
        }
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for (v, c) in self.colors.iter().enumerate() {
            let _ = writeln!(out, "{v} {c}");
        }
        out
    }
}

/// Colors appearing an odd number of times around `v`, for uncolored-free
/// slices (`0` entries are skipped).
pub(crate) fn odd_colors_raw(g: &Graph, colors: &[Color], v: Vertex) -> BTreeSet<Color> {
    let mut odd = BTreeSet::new();
    for &u in g.neighbors(v) {
        let c = colors[u];
        if c != 0 && !odd.remove(&c) {
            odd.insert(c);
        }
    }
    odd
}

/// True when `v` is isolated or some neighbor color has odd multiplicity.
pub(crate) fn has_odd_color_raw(g: &Graph, colors: &[Color], v: Vertex) -> bool {
    let nbrs = g.neighbors(v);
    if nbrs.is_empty() {
        return true;
    }
    if nbrs.len() % 2 == 1 {
        return true;
    }
    let mut seen: Vec<Color> = nbrs.iter().map(|&u| colors[u]).collect();
    seen.sort_unstable();
    seen.chunk_by(|a, b| a == b).any(|run| run.len() % 2 == 1)
}

pub fn odd_color_set(g: &Graph, c: &Coloring, v: Vertex) -> Result<BTreeSet<Color>, ColoringError> {
    if g.degree(v) == 0 {
        return Err(ColoringError::Isolated(v));
    }
    Ok(odd_colors_raw(g, &c.colors, v))
}

/// Representative odd color: the minimum of `C_o(v)`.
pub fn min_odd_color(g: &Graph, c: &Coloring, v: Vertex) -> Option<Color> {
    odd_color_set(g, c, v).ok().and_then(|s| s.first().copied())
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OddReport {
    /// `C_o(v)` for every non-isolated vertex.
    pub per_vertex: BTreeMap<Vertex, BTreeSet<Color>>,
    /// Non-isolated vertices with an empty odd-color set.
    pub violations: Vec<Vertex>,
    /// Monochromatic edges `(u, v)` with `u < v`.
    pub proper_violations: Vec<(Vertex, Vertex)>,
}

impl OddReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty() && self.proper_violations.is_empty()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("kind\tvertex\tdetail\n");
        for (v, set) in &self.per_vertex {
            let list: Vec<String> = set.iter().map(Color::to_string).collect();
            let _ = writeln!(out, "odd_set\t{v}\t{}", list.join(","));
        }
        for v in &self.violations {
            let _ = writeln!(out, "odd_violation\t{v}\t");
        }
        for (u, v) in &self.proper_violations {
            let _ = writeln!(out, "proper_violation\t{u}\t{v}");
        }
        let _ = writeln!(out, "verdict\t\t{}", if self.passes() { "pass" } else { "fail" });
        out
    }
}

pub fn is_odd_coloring(g: &Graph, c: &Coloring) -> Result<OddReport, ColoringError> {
    if c.len() != g.vertex_count() {
        return Err(ColoringError::LengthMismatch { expected: g.vertex_count(), got: c.len() });
    }
    let mut report = OddReport::default();
    for (u, v) in g.edges() {
        if c.color(u) == c.color(v) {
            report.proper_violations.push((u, v));
        }
    }
    for v in g.vertices() {
        if g.degree(v) == 0 {
            continue;
        }
        let set = odd_colors_raw(g, &c.colors, v);
        if set.is_empty() {
            report.violations.push(v);
        }
        report.per_vertex.insert(v, set);
    }
    Ok(report)
}

/// Proper and odd, without building a report.
pub fn is_valid_odd_coloring(g: &Graph, c: &Coloring) -> bool {
    c.len() == g.vertex_count()
        && g.edges().iter().all(|&(u, v)| c.color(u) != c.color(v))
        && g.vertices().all(|v| has_odd_color_raw(g, &c.colors, v))
}
