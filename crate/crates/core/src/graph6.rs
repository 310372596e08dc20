//! graph6 reading and writing.
//!
//! Format: an optional `>>graph6<<` header, the vertex count N(n), then the
//! upper triangle of the adjacency matrix in column order
//! (x(0,1), x(0,2), x(1,2), x(0,3), ...) packed six bits per byte, most
//! significant bit first, each byte offset by 63. Padding bits must be zero.

use thiserror::Error;

use crate::graph::Graph;

const HEADER: &str = ">>graph6<<";
const MAX_VERTICES: usize = 68_719_476_735; // 2^36 - 1

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("graph6 parse error at byte {offset}: {kind}")]
pub struct Graph6Error {
    pub offset: usize,
    pub kind: Graph6ErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Graph6ErrorKind {
    #[error("empty input")]
    Empty,
    #[error("byte 0x{0:02x} is outside the printable graph6 range 63..=126")]
    NonPrintable(u8),
    #[error("malformed vertex-count prefix")]
    BadLength,
    #[error("adjacency data ends early")]
    Truncated,
    #[error("trailing bytes after adjacency data")]
    TrailingGarbage,
    #[error("nonzero padding bits")]
    NonzeroPadding,
}

fn err(offset: usize, kind: Graph6ErrorKind) -> Graph6Error {
    Graph6Error { offset, kind }
}

/// Parses one graph6 line. A trailing `\n` or `\r\n` is tolerated.
pub fn parse_graph6(text: &str) -> Result<Graph, Graph6Error> {
    let line = text.strip_suffix('\n').unwrap_or(text);
    let line = line.strip_suffix('\r').unwrap_or(line);
    let (start, body) = match line.strip_prefix(HEADER) {
        Some(rest) => (HEADER.len(), rest.as_bytes()),
        None => (0, line.as_bytes()),
    };
    if body.is_empty() {
        return Err(err(start, Graph6ErrorKind::Empty));
    }
    for (i, &b) in body.iter().enumerate() {
        if !(63..=126).contains(&b) {
            return Err(err(start + i, Graph6ErrorKind::NonPrintable(b)));
        }
    }

    let sixes = |from: usize, count: usize| -> Result<usize, Graph6Error> {
        if body.len() < from + count {
            return Err(err(start + body.len(), Graph6ErrorKind::BadLength));
        }
        Ok(body[from..from + count].iter().fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize))
    };
    let (n, mut pos) = if body[0] != 126 {
        ((body[0] - 63) as usize, 1)
    } else if body.len() > 1 && body[1] == 126 {
        let n = sixes(2, 6)?;
        if n <= 258_047 {
            return Err(err(start, Graph6ErrorKind::BadLength));
        }
        (n, 8)
    } else {
        let n = sixes(1, 3)?;
        if n <= 62 {
            return Err(err(start, Graph6ErrorKind::BadLength));
        }
        (n, 4)
    };
    debug_assert!(n <= MAX_VERTICES);

    let bits = n * n.saturating_sub(1) / 2;
    let need = bits.div_ceil(6);
    let data = &body[pos..];
    if data.len() < need {
        return Err(err(start + body.len(), Graph6ErrorKind::Truncated));
    }
    if data.len() > need {
        return Err(err(start + pos + need, Graph6ErrorKind::TrailingGarbage));
    }

    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = data[k / 6] - 63;
            if byte & (0x20 >> (k % 6)) != 0 {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    if bits % 6 != 0 {
        let last = data[need - 1] - 63;
        let pad_mask = (1u8 << (6 - bits % 6)) - 1;
        if last & pad_mask != 0 {
            return Err(err(start + pos + need - 1, Graph6ErrorKind::NonzeroPadding));
        }
    }
    pos += need;
    debug_assert_eq!(pos, body.len());
    Ok(Graph::from_edges(n, edges).expect("graph6 upper triangle is always simple"))
}

/// Encodes a graph as a canonical graph6 line (no header, no newline).
pub fn to_graph6(g: &Graph) -> String {
    let n = g.vertex_count();
    let mut out: Vec<u8> = Vec::new();
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(126);
        out.extend((0..3).rev().map(|s| ((n >> (6 * s)) & 63) as u8 + 63));
    } else {
        assert!(n <= MAX_VERTICES, "graph too large for graph6");
        out.extend([126, 126]);
        out.extend((0..6).rev().map(|s| ((n >> (6 * s)) & 63) as u8 + 63));
    }
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    String::from_utf8(out).expect("graph6 bytes are ASCII")
}

/// Parses every non-blank line of a graph6 file.
pub fn parse_graph6_lines(text: &str) -> Result<Vec<Graph>, (usize, Graph6Error)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_graph6(l).map_err(|e| (i + 1, e)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_values() {
        let g = parse_graph6("@").unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));
        let g = parse_graph6("D??").unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (5, 0));
        let g = parse_graph6("?").unwrap();
        assert_eq!(g.vertex_count(), 0);
    }

    #[test]
    fn header_and_newline_are_accepted() {
        let a = parse_graph6(">>graph6<<E?~o\n").unwrap();
        let b = parse_graph6("E?~o").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn error_offsets() {
        assert_eq!(parse_graph6("").unwrap_err().kind, Graph6ErrorKind::Empty);
        let e = parse_graph6("D? ?").unwrap_err();
        assert_eq!((e.offset, e.kind), (2, Graph6ErrorKind::NonPrintable(b' ')));
        let e = parse_graph6("D?").unwrap_err();
        assert_eq!(e.kind, Graph6ErrorKind::Truncated);
        let e = parse_graph6("D???").unwrap_err();
        assert_eq!((e.offset, e.kind), (3, Graph6ErrorKind::TrailingGarbage));
        // 5 vertices -> 10 bits, so the low two bits of the second byte are padding.
        let e = parse_graph6("D?@").unwrap_err();
        assert_eq!((e.offset, e.kind), (2, Graph6ErrorKind::NonzeroPadding));
        let e = parse_graph6("~??").unwrap_err();
        assert_eq!(e.kind, Graph6ErrorKind::BadLength);
        let e = parse_graph6(">>graph6<<D? ?").unwrap_err();
        assert_eq!(e.offset, 12);
    }

    #[test]
    fn long_length_prefix() {
        let g = Graph::path(63);
        let s = to_graph6(&g);
        assert_eq!(&s.as_bytes()[..4], &[126, 63, 63 + 0, 63 + 63]);
        assert_eq!(parse_graph6(&s).unwrap(), g);
    }
}
