//! Exact odd-coloring search.
//!
//! Backtracking over a fixed vertex order with colors tried in ascending
//! order. Two rules keep the tree small without losing completeness:
//!
//! * Canonical color introduction: a vertex may take any color already in
//!   use or exactly one new color (`max_used + 1`). Every coloring is a
//!   color permutation of one canonical coloring, so nothing is lost, and the
//!   first branched vertex is always colored 1.
//! * Parity pruning: a non-isolated vertex whose neighbors are all colored
//!   and whose odd-color set is empty can never recover, so the branch dies.
//!
//! For parallel runs the tree is cut into a fixed list of prefixes in
//! canonical order. The cut does not depend on the worker count, and the
//! witness reported is the one from the first colorable prefix, so every
//! worker count returns the same witness and node count.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::coloring::{is_valid_odd_coloring, Color, Coloring};
use crate::graph::{Graph, Vertex};

/// Largest palette the bitset search supports.
pub const MAX_PALETTE: Color = 63;

/// Number of prefixes the search tree is cut into before any work is shared.
const SPLIT_TARGET: usize = 64;

const CLOCK_CHECK_MASK: u64 = 0xfff;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("palette size must be at least 1")]
    EmptyPalette,
    #[error("palette {0} exceeds the supported maximum {MAX_PALETTE}")]
    PaletteTooLarge(Color),
    #[error("search timed out at k = {k}; odd chromatic number is at least {k}")]
    Timeout { k: Color },
    #[error("brute force is limited to {max} vertices, got {got}")]
    TooLarge { max: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VertexOrder {
    /// Degree descending, ties by vertex id.
    #[default]
    DegreeDescending,
    /// Degree descending, ties shuffled by the config seed.
    SeededTies,
    Natural,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub palette: Color,
    pub order: VertexOrder,
    pub time_limit: Option<Duration>,
    pub seed: u64,
    pub jobs: usize,
}

impl SearchConfig {
    pub fn new(palette: Color) -> Self {
        SearchConfig { palette, order: VertexOrder::default(), time_limit: None, seed: 0, jobs: 1 }
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs.max(1);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Colorable,
    NotColorable,
    Timeout,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Colorable => "colorable",
            SolveStatus::NotColorable => "not-colorable",
            SolveStatus::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub witness: Option<Coloring>,
    pub nodes_expanded: u64,
}

pub fn vertex_order(g: &Graph, policy: VertexOrder, seed: u64) -> Vec<Vertex> {
    let mut order: Vec<Vertex> = g.vertices().collect();
    match policy {
        VertexOrder::Natural => {}
        VertexOrder::DegreeDescending => order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v)),
        VertexOrder::SeededTies => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            order.shuffle(&mut rng);
            order.sort_by_key(|&v| std::cmp::Reverse(g.degree(v)));
        }
    }
    order
}

enum Outcome {
    Found(Vec<Color>),
    Exhausted,
    TimedOut,
    Cancelled,
}

struct Search<'a> {
    g: &'a Graph,
    order: &'a [Vertex],
    palette: Color,
    colors: Vec<Color>,
    parity: Vec<u64>,
    uncolored: Vec<u32>,
    max_used: Color,
    nodes: u64,
    deadline: Option<Instant>,
}

impl<'a> Search<'a> {
    fn new(g: &'a Graph, order: &'a [Vertex], palette: Color, deadline: Option<Instant>) -> Self {
        let n = g.vertex_count();
        Search {
            g,
            order,
            palette,
            colors: vec![0; n],
            parity: vec![0; n],
            uncolored: g.vertices().map(|v| g.degree(v) as u32).collect(),
            max_used: 0,
            nodes: 0,
            deadline,
        }
    }

    fn candidates(&self) -> std::ops::RangeInclusive<Color> {
        1..=self.palette.min(self.max_used + 1)
    }

    /// Colors `v` with `c` if proper and no vertex is left without hope of an
    /// odd color. On failure the state is unchanged.
    fn assign(&mut self, v: Vertex, c: Color) -> bool {
        let nbrs = self.g.neighbors(v);
        if nbrs.iter().any(|&w| self.colors[w] == c) {
            return false;
        }
        let bit = 1u64 << c;
        for &w in nbrs {
            self.parity[w] ^= bit;
            self.uncolored[w] -= 1;
        }
        self.colors[v] = c;
        let dead = |s: &Self, w: Vertex| s.uncolored[w] == 0 && s.parity[w] == 0 && s.g.degree(w) > 0;
        if dead(self, v) || nbrs.iter().any(|&w| dead(self, w)) {
            self.unassign(v);
            return false;
        }
        self.nodes += 1;
        true
    }

    fn unassign(&mut self, v: Vertex) {
        let bit = 1u64 << self.colors[v];
        for &w in self.g.neighbors(v) {
            self.parity[w] ^= bit;
            self.uncolored[w] += 1;
        }
        self.colors[v] = 0;
    }

    /// Replays a prefix; returns false if it is infeasible.
    fn replay(&mut self, prefix: &[Color]) -> bool {
        for (i, &c) in prefix.iter().enumerate() {
            if !self.assign(self.order[i], c) {
                return false;
            }
            self.max_used = self.max_used.max(c);
        }
        true
    }

    fn dfs(&mut self, depth: usize, cancel: &dyn Fn() -> bool) -> Outcome {
        if depth == self.order.len() {
            return Outcome::Found(self.colors.clone());
        }
        if self.nodes & CLOCK_CHECK_MASK == 0 {
            if self.deadline.is_some_and(|d| Instant::now() >= d) {
                return Outcome::TimedOut;
            }
            if cancel() {
                return Outcome::Cancelled;
            }
        }
        let v = self.order[depth];
        let saved_max = self.max_used;
        for c in self.candidates() {
            if !self.assign(v, c) {
                continue;
            }
            self.max_used = saved_max.max(c);
            let out = self.dfs(depth + 1, cancel);
            self.unassign(v);
            self.max_used = saved_max;
            match out {
                Outcome::Exhausted => {}
                other => return other,
            }
        }
        Outcome::Exhausted
    }

    /// Breadth-wise expansion of the top of the tree into at least
    /// `SPLIT_TARGET` prefixes (or complete assignments), in canonical order.
    fn frontier(&mut self) -> Vec<Vec<Color>> {
        let mut level: Vec<Vec<Color>> = vec![Vec::new()];
        let mut depth = 0;
        while depth < self.order.len() && level.len() < SPLIT_TARGET && !level.is_empty() {
            let mut next = Vec::new();
            for prefix in &level {
                let mut probe = Search::new(self.g, self.order, self.palette, None);
                probe.replay(prefix);
                let v = self.order[depth];
                for c in probe.candidates() {
                    if probe.assign(v, c) {
                        let mut p = prefix.clone();
                        p.push(c);
                        next.push(p);
                        probe.unassign(v);
                    }
                }
            }
            self.nodes += next.len() as u64;
            level = next;
            depth += 1;
        }
        level
    }
}

pub fn solve_odd_coloring(g: &Graph, cfg: &SearchConfig) -> Result<SolveResult, SolveError> {
    if cfg.palette == 0 {
        return Err(SolveError::EmptyPalette);
    }
    let n = g.vertex_count();
    // Canonical introduction never uses more colors than vertices.
    let palette = cfg.palette.min(n.max(1) as Color);
    if palette > MAX_PALETTE {
        return Err(SolveError::PaletteTooLarge(cfg.palette));
    }
    let deadline = cfg.time_limit.map(|t| Instant::now() + t);
    let order = vertex_order(g, cfg.order, cfg.seed);

    let mut root = Search::new(g, &order, palette, deadline);
    let prefixes = root.frontier();
    let mut nodes = root.nodes;

    let outcomes: Mutex<Vec<Option<(Outcome, u64)>>> = Mutex::new((0..prefixes.len()).map(|_| None).collect());
    let winner = AtomicUsize::new(usize::MAX);
    let next = AtomicUsize::new(0);
    let timed_out = AtomicBool::new(false);

    let work = || loop {
        let i = next.fetch_add(1, Ordering::SeqCst);
        if i >= prefixes.len() || i > winner.load(Ordering::SeqCst) || timed_out.load(Ordering::SeqCst) {
            break;
        }
        let mut s = Search::new(g, &order, palette, deadline);
        let ok = s.replay(&prefixes[i]);
        debug_assert!(ok, "frontier prefixes are feasible");
        s.nodes = 0;
        let cancel = || winner.load(Ordering::Relaxed) < i;
        let out = s.dfs(prefixes[i].len(), &cancel);
        match out {
            Outcome::Found(_) => {
                winner.fetch_min(i, Ordering::SeqCst);
            }
            Outcome::TimedOut => timed_out.store(true, Ordering::SeqCst),
            _ => {}
        }
        outcomes.lock().expect("no worker panics while holding the lock")[i] = Some((out, s.nodes));
    };

    let jobs = cfg.jobs.max(1).min(prefixes.len().max(1));
    if jobs == 1 {
        work();
    } else {
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(work);
            }
        });
    }

    let outcomes = outcomes.into_inner().expect("workers joined");
    let mut status = SolveStatus::NotColorable;
    let mut witness = None;
    for slot in outcomes {
        match slot {
            Some((Outcome::Exhausted, k)) => nodes += k,
            Some((Outcome::Found(colors), k)) => {
                nodes += k;
                let c = Coloring::new(colors, cfg.palette).expect("search colors are in range");
                assert!(is_valid_odd_coloring(g, &c), "solver produced an invalid witness");
                status = SolveStatus::Colorable;
                witness = Some(c);
                break;
            }
            Some((Outcome::TimedOut, _)) | None => {
                status = SolveStatus::Timeout;
                break;
            }
            Some((Outcome::Cancelled, _)) => unreachable!("only prefixes after the winner are cancelled"),
        }
    }
    if status == SolveStatus::Timeout {
        witness = None;
    }
    Ok(SolveResult { status, witness, nodes_expanded: nodes })
}

/// Least palette size admitting an odd coloring, ascending from a greedy
/// clique bound.
pub fn odd_chromatic_number(g: &Graph, cfg: &SearchConfig) -> Result<(Color, Coloring), SolveError> {
    let mut k = (g.greedy_clique().len() as Color).max(1);
    loop {
        let run = SearchConfig { palette: k, ..cfg.clone() };
        let res = solve_odd_coloring(g, &run)?;
        match res.status {
            SolveStatus::Colorable => return Ok((k, res.witness.expect("colorable carries a witness"))),
            SolveStatus::NotColorable => k += 1,
            SolveStatus::Timeout => return Err(SolveError::Timeout { k }),
        }
    }
}

pub const BRUTE_FORCE_MAX_VERTICES: usize = 10;

/// Exhaustive enumeration of every coloring for each palette up to `k_max`.
/// Shares nothing with the backtracking search beyond the final predicate.
pub fn brute_force_odd_chromatic(g: &Graph, k_max: Color) -> Result<Option<Color>, SolveError> {
    let n = g.vertex_count();
    if n > BRUTE_FORCE_MAX_VERTICES {
        return Err(SolveError::TooLarge { max: BRUTE_FORCE_MAX_VERTICES, got: n });
    }
    let edges = g.edges();
    for k in 1..=k_max {
        let mut colors = vec![1 as Color; n];
        loop {
            let proper = edges.iter().all(|&(u, v)| colors[u] != colors[v]);
            if proper && g.vertices().all(|v| crate::coloring::has_odd_color_raw(g, &colors, v)) {
                return Ok(Some(k));
            }
            // Odometer increment.
            let mut i = 0;
            while i < n && colors[i] == k {
                colors[i] = 1;
                i += 1;
            }
            if i == n {
                break;
            }
            colors[i] += 1;
        }
    }
    Ok(None)
}
