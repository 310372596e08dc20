//! Corpus generators: torus grids, seeded subdivisions, and the small
//! constructed fixtures the lemma harnesses run on.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use oddcolor::embedding::{Dart, Embedding, EmbeddingError, RotationSystem};
use oddcolor::graph::{Graph, Vertex};
use oddcolor::lemmas::Instance;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("torus grid needs m, n >= 3 (got {0} x {1})")]
    TooSmall(usize, usize),
    #[error("C_{0} x C_{1} has triangles; triangle-free grids need m, n >= 4")]
    HasTriangles(usize, usize),
    #[error("edge fraction {0} is outside [0, 1]")]
    BadFraction(Ratio<u64>),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

/// `C_m x C_n` with vertex `r * n + c` and rotation (north, east, south, west).
pub fn gen_torus_grid(m: usize, n: usize, triangle_free: bool) -> Result<RotationSystem, GenError> {
    if m < 3 || n < 3 {
        return Err(GenError::TooSmall(m, n));
    }
    if triangle_free && (m == 3 || n == 3) {
        return Err(GenError::HasTriangles(m, n));
    }
    let id = |r: usize, c: usize| (r % m) * n + (c % n);
    let rotation = (0..m * n)
        .map(|v| {
            let (r, c) = (v / n, v % n);
            vec![id(r + m - 1, c), id(r, c + 1), id(r + 1, c), id(r, c + n - 1)]
        })
        .collect();
    Ok(RotationSystem::new(rotation)?)
}

/// Subdivides `floor(fraction * |E|)` edges picked by a seeded shuffle of
/// the sorted edge list. Picked edges are subdivided in sorted order, so new
/// vertices get ids `n, n + 1, ...` in that order.
pub fn gen_subdivided(rs: &RotationSystem, fraction: Ratio<u64>, seed: u64) -> Result<RotationSystem, GenError> {
    if fraction > Ratio::from_integer(1) {
        return Err(GenError::BadFraction(fraction));
    }
    let mut edges = rs.graph().edges();
    let k = (fraction * edges.len() as u64).floor().to_integer() as usize;
    edges.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut picked = edges[..k].to_vec();
    picked.sort_unstable();
    let mut out = rs.clone();
    for (u, v) in picked {
        out = out.subdivide_edge(u, v)?.0;
    }
    Ok(out)
}

/// Inserts two parallel 2-paths across the grid face whose top-left corner
/// is `(r, c)`, joining its north-west and south-east corners; the face
/// between them is a 4-face with two 2-vertices.
pub fn parallel_paths_fixture(m: usize, n: usize, r: usize, c: usize) -> Result<RotationSystem, GenError> {
    let rs = gen_torus_grid(m, n, true)?;
    let id = |r: usize, c: usize| (r % m) * n + (c % n);
    let (a, b) = (id(r, c), id(r + 1, c + 1));
    let (right, below) = (id(r, c + 1), id(r + 1, c));
    // Corner at a between east and south neighbors; at b between west and north.
    let (rs, x) = rs.insert_two_path((right, a), (below, b))?;
    let (rs, _) = first_ok(&[((right, a), (x, b)), ((x, a), (below, b))], |ca, cb| rs.insert_two_path(ca, cb))?;
    Ok(rs)
}

/// Subdivides the north edge of the grid face at `(r, c)` with `w`, then
/// joins the face's north-west and south-east corners with a 2-path `x`,
/// leaving the 5-face `[a w b e x]` with two 2-vertices.
pub fn five_face_fixture(m: usize, n: usize, r: usize, c: usize) -> Result<RotationSystem, GenError> {
    let rs = gen_torus_grid(m, n, true)?;
    let id = |r: usize, c: usize| (r % m) * n + (c % n);
    let (a, b) = (id(r, c), id(r, c + 1));
    let (d, e) = (id(r + 1, c), id(r + 1, c + 1));
    let (rs, w) = rs.subdivide_edge(a, b)?;
    let candidates = [((w, a), (b, e)), ((w, a), (d, e)), ((d, a), (b, e)), ((d, a), (d, e))];
    let (rs, _) = first_ok(&candidates, |ca, cb| rs.insert_two_path(ca, cb))?;
    Ok(rs)
}

fn first_ok<T>(
    corners: &[(Dart, Dart)],
    f: impl Fn(Dart, Dart) -> Result<T, EmbeddingError>,
) -> Result<T, EmbeddingError> {
    let mut last = None;
    for &(a, b) in corners {
        match f(a, b) {
            Ok(t) => return Ok(t),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one candidate"))
}

/// Every vertex of `C_m x C_n` loses one horizontal edge, leaving a cubic
/// graph (`n` even).
pub fn cubic_brick(m: usize, n: usize) -> Result<Graph, GenError> {
    let rs = gen_torus_grid(m, n, false)?;
    let id = |r: usize, c: usize| (r % m) * n + (c % n);
    let mut out = rs;
    for r in 0..m {
        for c in (0..n).step_by(2) {
            out = out.remove_edge(id(r, c), id(r, c + 1))?;
        }
    }
    Ok(out.graph().clone())
}

pub fn petersen() -> Graph {
    let mut e: Vec<(Vertex, Vertex)> = Vec::new();
    for i in 0..5 {
        e.push((i, (i + 1) % 5));
        e.push((i, i + 5));
        e.push((i + 5, (i + 2) % 5 + 5));
    }
    Graph::from_edges(10, e).expect("petersen edges are simple")
}

/// `K_7` on the torus: vertex `i` sees `i+1, i+3, i+2, i+6, i+4, i+5` (mod 7).
pub fn k7_torus() -> RotationSystem {
    let rotation = (0..7).map(|i| [1, 3, 2, 6, 4, 5].iter().map(|d| (i + d) % 7).collect()).collect();
    RotationSystem::new(rotation).expect("k7 rotation is valid")
}

/// `C_4` in the plane.
pub fn planar_c4() -> RotationSystem {
    RotationSystem::new(vec![vec![1, 3], vec![2, 0], vec![3, 1], vec![0, 2]]).expect("c4 rotation is valid")
}

fn embedded(name: String, rs: RotationSystem) -> Result<Instance, GenError> {
    Ok(Instance::embedded(name, Embedding::new(rs)?))
}

const SIZES: [usize; 3] = [4, 5, 6];

/// Torus grids with m, n in {4, 5, 6}, their 1/4 and full subdivisions,
/// the toroidal `K_7` and planar `C_4`.
pub fn charge_corpus() -> Result<Vec<(String, RotationSystem)>, GenError> {
    let mut out = Vec::new();
    for m in SIZES {
        for n in SIZES {
            let g = gen_torus_grid(m, n, true)?;
            out.push((format!("grid{m}x{n}-quarter"), gen_subdivided(&g, Ratio::new(1, 4), 7)?));
            out.push((format!("grid{m}x{n}-full"), gen_subdivided(&g, Ratio::from_integer(1), 7)?));
            out.push((format!("grid{m}x{n}"), g));
        }
    }
    out.push(("k7".into(), k7_torus()));
    out.push(("c4-planar".into(), planar_c4()));
    Ok(out)
}

/// Triangle-free toroidal graphs on at most 24 vertices: `C_4 x C_4`,
/// `C_4 x C_5` and seeded partial subdivisions of both.
pub fn small_toroidal_corpus() -> Result<Vec<(String, RotationSystem)>, GenError> {
    let mut out = Vec::new();
    for (m, n, frac) in [(4, 4, Ratio::new(1, 4)), (4, 5, Ratio::new(1, 10))] {
        let g = gen_torus_grid(m, n, true)?;
        for seed in 0..4 {
            out.push((format!("grid{m}x{n}-sub{seed}"), gen_subdivided(&g, frac, seed)?));
        }
        out.push((format!("grid{m}x{n}"), g));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// Petersen plus cubic torus bricks.
pub fn no3v_corpus() -> Result<Vec<Instance>, GenError> {
    let mut out = vec![Instance::bare("petersen", petersen())];
    for (m, n) in [(4, 4), (4, 6), (6, 4), (6, 6)] {
        out.push(Instance::bare(format!("brick{m}x{n}"), cubic_brick(m, n)?));
    }
    Ok(out)
}

/// Fully subdivided grids subdivided again, so 2-vertices meet.
pub fn tool1_corpus() -> Result<Vec<Instance>, GenError> {
    let mut out = Vec::new();
    for (m, n) in [(4, 4), (4, 5), (5, 5), (4, 6), (5, 6), (6, 6)] {
        let full = gen_subdivided(&gen_torus_grid(m, n, true)?, Ratio::from_integer(1), 0)?;
        let twice = gen_subdivided(&full, Ratio::new(1, 4), 1)?;
        out.push(embedded(format!("grid{m}x{n}-twice"), twice)?);
    }
    Ok(out)
}

/// Grids with a quarter of their edges subdivided.
pub fn subdivided_corpus() -> Result<Vec<Instance>, GenError> {
    let mut out = Vec::new();
    for m in SIZES {
        for n in SIZES {
            for seed in 0..2 {
                let rs = gen_subdivided(&gen_torus_grid(m, n, true)?, Ratio::new(1, 4), seed)?;
                out.push(embedded(format!("grid{m}x{n}-quarter-s{seed}"), rs)?);
            }
        }
    }
    Ok(out)
}

/// One crowded 4-face per grid face of `C_4 x C_4` and `C_5 x C_5`, plus
/// crowded 5-faces on `C_4 x C_4`, `C_4 x C_5` and `C_5 x C_5`.
pub fn four_five_face_corpus() -> Result<Vec<Instance>, GenError> {
    let mut out = Vec::new();
    for (m, n) in [(4, 4), (5, 5), (4, 5)] {
        for r in 0..m {
            for c in 0..n {
                out.push(embedded(format!("pp{m}x{n}-{r}-{c}"), parallel_paths_fixture(m, n, r, c)?)?);
            }
        }
    }
    for (m, n) in [(4, 4), (4, 5), (5, 5)] {
        for r in 0..m {
            for c in 0..n {
                out.push(embedded(format!("five{m}x{n}-{r}-{c}"), five_face_fixture(m, n, r, c)?)?);
            }
        }
    }
    Ok(out)
}

pub fn grid_instance(m: usize, n: usize) -> Result<Instance, GenError> {
    embedded(format!("grid{m}x{n}"), gen_torus_grid(m, n, true)?)
}
