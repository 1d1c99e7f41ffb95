//! Plain-text edge-list format.
//!
//! ```text
//! # comment
//! 4            vertex count
//! genus 0      optional, defaults to 0
//! 0 1          one edge per line, 0-based ids
//! 1 2  # trailing comments are allowed
//! ```

use std::fmt::Write as _;

use super::{Graph, GraphError, Vertex};

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse { line, column, message: message.into() }
}

/// Tokens of a line with their 1-based starting column, comments stripped.
fn tokens(raw: &str) -> Vec<(usize, &str)> {
    let content = raw.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in content.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &content[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &content[s..]));
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut n: Option<usize> = None;
    let mut genus: Option<u32> = None;
    let mut seen_edge = false;
    let mut adj: Vec<Vec<Vertex>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = tokens(raw);
        if toks.is_empty() {
            continue;
        }
        let Some(count) = n else {
            if toks.len() != 1 {
                return Err(parse_error(line, toks[1].0, "expected a single vertex count"));
            }
            let (col, tok) = toks[0];
            let count =
                tok.parse::<usize>().map_err(|_| parse_error(line, col, format!("invalid vertex count {tok:?}")))?;
            n = Some(count);
            adj = vec![Vec::new(); count];
            continue;
        };
        if toks[0].1 == "genus" {
            if seen_edge || genus.is_some() {
                return Err(parse_error(line, toks[0].0, "genus header must precede edges"));
            }
            let Some(&(col, tok)) = toks.get(1) else {
                return Err(parse_error(line, toks[0].0 + 5, "missing genus value"));
            };
            if toks.len() > 2 {
                return Err(parse_error(line, toks[2].0, "unexpected token after genus"));
            }
            genus = Some(tok.parse().map_err(|_| parse_error(line, col, format!("invalid genus {tok:?}")))?);
            continue;
        }
        if toks.len() != 2 {
            let col = toks.get(2).map_or(toks[0].0, |t| t.0);
            return Err(parse_error(line, col, "expected an edge \"u v\""));
        }
        let mut ends = [0usize; 2];
        for (slot, &(col, tok)) in ends.iter_mut().zip(&toks) {
            *slot = tok.parse().map_err(|_| parse_error(line, col, format!("invalid vertex id {tok:?}")))?;
        }
        let [u, v] = ends;
        if u == v {
            return Err(GraphError::SelfLoop { line, vertex: u });
        }
        for w in [u, v] {
            if w >= count {
                return Err(GraphError::VertexIdGap { line, vertex: w, n: count });
            }
        }
        seen_edge = true;
        adj[u].push(v);
        adj[v].push(u);
    }

    if n.is_none() {
        return Err(parse_error(1, 1, "missing vertex count"));
    }
    Ok(Graph::from_raw_adjacency(adj).with_genus(genus.unwrap_or(0)))
}

pub fn write_edge_list(graph: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", graph.n());
    if graph.genus() != 0 {
        let _ = writeln!(out, "genus {}", graph.genus());
    }
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_examples() {
        let tri = parse_edge_list("3\n0 1\n1 2\n2 0").unwrap();
        assert_eq!((tri.n(), tri.m(), tri.girth()), (3, 3, Some(3)));
        let edge = parse_edge_list("2\n0 1").unwrap();
        assert_eq!(edge.girth(), None);
        let c4 = parse_edge_list("4\n0 1\n1 2\n2 3\n3 0").unwrap();
        assert_eq!(c4.girth(), Some(4));
    }

    #[test]
    fn genus_header_comments_and_duplicates() {
        let g = parse_edge_list("# torus\n3\ngenus 1\n0 1 # first\n1 0\n\n1 2\n").unwrap();
        assert_eq!(g.genus(), 1);
        assert_eq!(g.m(), 2);
    }

    #[test]
    fn errors_carry_positions() {
        match parse_edge_list("3\n0 1\n1 x") {
            Err(GraphError::Parse { line, column, .. }) => assert_eq!((line, column), (3, 3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_edge_list("3\n1 1"), Err(GraphError::SelfLoop { line: 2, .. })));
        assert!(matches!(parse_edge_list("3\n0 5"), Err(GraphError::VertexIdGap { vertex: 5, .. })));
        assert!(parse_edge_list("# nothing\n").is_err());
        assert!(parse_edge_list("3\n0 1 2").is_err());
    }

    #[test]
    fn round_trips_through_text() {
        let g = parse_edge_list("5\ngenus 2\n0 1\n1 2\n3 4\n").unwrap();
        assert_eq!(parse_edge_list(&write_edge_list(&g)).unwrap(), g);
    }
}
