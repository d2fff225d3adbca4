//! graph6, DIMACS edge format and JSON edge lists.

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphDoc};

const G6_HEADER: &str = ">>graph6<<";

fn g6_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        format: "graph6",
        offset,
        message: message.into(),
    }
}

/// Parses a single graph6 line; `base` is the byte offset of `line` in the
/// enclosing text, used for error reporting.
fn parse_graph6_at(line: &str, base: usize) -> Result<Graph> {
    let mut bytes = line.as_bytes();
    let mut at = 0;
    if line.starts_with(G6_HEADER) {
        at = G6_HEADER.len();
        bytes = &bytes[at..];
    }
    let digit = |i: usize, bytes: &[u8]| -> Result<u32> {
        match bytes.get(i) {
            Some(&b) if (63..=126).contains(&b) => Ok((b - 63) as u32),
            Some(&b) => Err(g6_err(base + at + i, format!("byte {b:#04x} outside 63..=126"))),
            None => Err(g6_err(base + at + i, "unexpected end of input")),
        }
    };
    let (n, mut pos) = match bytes.first() {
        None => return Err(g6_err(base + at, "empty graph6 string")),
        Some(126) => {
            if bytes.get(1) == Some(&126) {
                let mut n = 0usize;
                for i in 2..8 {
                    n = (n << 6) | digit(i, bytes)? as usize;
                }
                (n, 8)
            } else {
                let mut n = 0usize;
                for i in 1..4 {
                    n = (n << 6) | digit(i, bytes)? as usize;
                }
                (n, 4)
            }
        }
        Some(_) => (digit(0, bytes)? as usize, 1),
    };
    let pairs = n * n.saturating_sub(1) / 2;
    let need = pairs.div_ceil(6);
    if bytes.len() != pos + need {
        return Err(g6_err(
            base + at + bytes.len().min(pos + need),
            format!(
                "expected {need} adjacency bytes for n = {n}, found {}",
                bytes.len().saturating_sub(pos)
            ),
        ));
    }
    let mut edges = Vec::new();
    let mut bit = 0;
    let mut word = 0;
    for j in 1..n {
        for i in 0..j {
            if bit % 6 == 0 {
                word = digit(pos, bytes)?;
                pos += 1;
            }
            if word & (1 << (5 - bit % 6)) != 0 {
                edges.push((i, j));
            }
            bit += 1;
        }
    }
    if bit % 6 != 0 && word & ((1 << (6 - bit % 6)) - 1) != 0 {
        return Err(g6_err(base + at + pos - 1, "nonzero padding bits"));
    }
    Graph::new(n, edges)
}

pub fn parse_graph6(text: &str) -> Result<Graph> {
    let line = text.trim_end_matches(['\n', '\r']);
    parse_graph6_at(line, 0)
}

/// One graph per nonempty line.
pub fn parse_graph6_lines(text: &str) -> Result<Vec<Graph>> {
    let mut out = Vec::new();
    let mut base = 0;
    for raw in text.split_inclusive('\n') {
        let line = raw.trim_end_matches(['\n', '\r']);
        if !line.trim().is_empty() {
            out.push(parse_graph6_at(line, base)?);
        }
        base += raw.len();
    }
    Ok(out)
}

fn push_n(out: &mut String, n: usize) {
    let six = |s: u32| char::from(63 + (s & 63) as u8);
    if n <= 62 {
        out.push(six(n as u32));
    } else if n <= 258_047 {
        out.push('~');
        for sh in [12, 6, 0] {
            out.push(six((n >> sh) as u32));
        }
    } else {
        out.push_str("~~");
        for sh in [30, 24, 18, 12, 6, 0] {
            out.push(six((n >> sh) as u32));
        }
    }
}

pub fn write_graph6(g: &Graph) -> Result<String> {
    if g.is_directed() {
        return Err(Error::Directed);
    }
    let n = g.n();
    let mut out = String::new();
    push_n(&mut out, n);
    let mut word = 0u8;
    let mut bit = 0;
    for j in 1..n {
        for i in 0..j {
            if g.has_edge(i, j) {
                word |= 1 << (5 - bit % 6);
            }
            bit += 1;
            if bit % 6 == 0 {
                out.push(char::from(63 + word));
                word = 0;
            }
        }
    }
    if bit % 6 != 0 {
        out.push(char::from(63 + word));
    }
    Ok(out)
}

fn dimacs_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        format: "dimacs",
        offset,
        message: message.into(),
    }
}

/// DIMACS edge format: `c` comments, one `p edge n m` line, `e u v` edges
/// with 1-based endpoints.
pub fn parse_dimacs(text: &str) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut offset = 0;
    for raw in text.split_inclusive('\n') {
        let line = raw.trim();
        let at = offset + (raw.len() - raw.trim_start().len());
        offset += raw.len();
        let mut parts = line.split_whitespace();
        let num = |s: Option<&str>, what: &str| -> Result<usize> {
            s.ok_or_else(|| dimacs_err(at, format!("missing {what}")))?
                .parse()
                .map_err(|_| dimacs_err(at, format!("{what} is not a nonnegative integer")))
        };
        match parts.next() {
            None | Some("c") => {}
            Some("p") => {
                if header.is_some() {
                    return Err(dimacs_err(at, "duplicate problem line"));
                }
                match parts.next() {
                    Some("edge" | "col") => {}
                    _ => return Err(dimacs_err(at, "expected `p edge <n> <m>`")),
                }
                let n = num(parts.next(), "vertex count")?;
                let m = num(parts.next(), "edge count")?;
                header = Some((n, m));
            }
            Some("e") => {
                let (n, _) = header.ok_or_else(|| dimacs_err(at, "edge before problem line"))?;
                let u = num(parts.next(), "edge endpoint")?;
                let v = num(parts.next(), "edge endpoint")?;
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(dimacs_err(at, format!("endpoint out of range 1..={n}")));
                }
                if u == v {
                    return Err(dimacs_err(at, format!("self-loop at vertex {u}")));
                }
                edges.push((u - 1, v - 1));
            }
            Some(other) => return Err(dimacs_err(at, format!("unknown line type `{other}`"))),
        }
    }
    let (n, m) = header.ok_or_else(|| dimacs_err(text.len(), "missing problem line"))?;
    if edges.len() != m {
        return Err(dimacs_err(
            text.len(),
            format!("problem line declares {m} edges, found {}", edges.len()),
        ));
    }
    Graph::new(n, edges)
}

pub fn write_dimacs(g: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        out.push_str(&format!("e {} {}\n", u + 1, v + 1));
    }
    out
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (start + column.saturating_sub(1)).min(text.len())
}

pub fn parse_json(text: &str) -> Result<Graph> {
    let doc: GraphDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
        format: "json",
        offset: byte_offset(text, e.line(), e.column()),
        message: e.to_string(),
    })?;
    Graph::try_from(doc)
}

/// Canonical JSON: edges sorted, optional fields omitted when unset.
pub fn write_json(g: &Graph) -> String {
    serde_json::to_string(&GraphDoc::from(g)).expect("graph documents serialize")
}

/// Detects the format of `text`: JSON object, DIMACS, or graph6 lines.
pub fn parse_graphs(text: &str) -> Result<Vec<Graph>> {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .ok_or_else(|| Error::Parse {
            format: "input",
            offset: 0,
            message: "no graph found".into(),
        })?;
    if first.starts_with('{') {
        Ok(vec![parse_json(text)?])
    } else if first.starts_with("p ") || first == "c" || first.starts_with("c ") {
        Ok(vec![parse_dimacs(text)?])
    } else {
        parse_graph6_lines(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_decoded_graph6() {
        // "D?{": n = 'D'-63 = 5; '?' = 0 -> 000000, '{' = 60 -> 111100.
        // Bit order (0,1),(0,2),(1,2),(0,3),(1,3),(2,3),(0,4),(1,4),(2,4),(3,4)
        // sets (0,4),(1,4),(2,4),(3,4): the star centred at 4.
        let g = parse_graph6("D?{").unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(
            g.edges().collect::<Vec<_>>(),
            vec![(0, 4), (1, 4), (2, 4), (3, 4)]
        );
        assert_eq!(write_graph6(&g).unwrap(), "D?{");
        // "Bw": n = 3, 'w' = 56 -> 111000: the triangle
        let k3 = parse_graph6(">>graph6<<Bw\n").unwrap();
        assert_eq!(k3.edge_count(), 3);
    }

    #[test]
    fn graph6_errors_carry_offsets() {
        match parse_graph6("D?") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("{other:?}"),
        }
        match parse_graph6_lines("Bw\nD?\x7f") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
        // 'x' = 57 -> 111001: padding bits set
        assert!(parse_graph6("Bx").is_err());
    }

    #[test]
    fn graph6_long_form_size() {
        let g = Graph::new(63, [(0, 62)]).unwrap();
        let s = write_graph6(&g).unwrap();
        assert!(s.starts_with("~??~"));
        assert_eq!(parse_graph6(&s).unwrap(), g);
    }

    #[test]
    fn dimacs() {
        let g = parse_dimacs("c empty\np edge 4 0\n").unwrap();
        assert_eq!((g.n(), g.edge_count()), (4, 0));
        let h = parse_dimacs("p edge 3 2\ne 1 2\ne 2 3\n").unwrap();
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert_eq!(parse_dimacs(&write_dimacs(&h)).unwrap(), h);
        match parse_dimacs("p edge 3 1\ne 1 4\n") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 11),
            other => panic!("{other:?}"),
        }
        assert!(parse_dimacs("p edge 3 1\ne 2 2\n").is_err());
        assert!(parse_dimacs("e 1 2\n").is_err());
    }

    #[test]
    fn json_round_trip_and_errors() {
        let g = Graph::new(4, [(3, 0), (1, 2)]).unwrap();
        let s = write_json(&g);
        assert_eq!(s, r#"{"n":4,"edges":[[0,3],[1,2]]}"#);
        assert_eq!(parse_json(&s).unwrap(), g);
        assert!(matches!(
            parse_json("{\"n\":2,\n\"edges\":[[0,0]]}"),
            Err(Error::InvalidGraph(_))
        ));
        match parse_json("{\"n\":2,\n\"edges\":[[0,1]x}") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 22),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn format_detection() {
        assert_eq!(parse_graphs("Bw\nBw\n").unwrap().len(), 2);
        assert_eq!(parse_graphs("p edge 2 1\ne 1 2").unwrap()[0].edge_count(), 1);
        assert_eq!(parse_graphs(r#"{"n":2,"edges":[]}"#).unwrap()[0].n(), 2);
    }
}
