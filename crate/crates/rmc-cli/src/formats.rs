//! Line-oriented text formats for instances and weighted street graphs.
//!
//! Both formats are plain UTF-8, one directive per line, `#` starts a
//! comment and blank lines are ignored. The full grammar lives in
//! `docs/formats.md`. Writers emit a canonical ordering so identical
//! inputs produce byte-identical files.

use std::fmt;

use rmc_core::instgen::WeightedGraph;
use rmc_core::Instance;

/// A syntax or structural error, with 1-based line and column of the
/// offending token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

impl std::error::Error for ParseError {}

/// One whitespace-separated token with its column position.
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut column = 1;
    for piece in line.split(' ') {
        if !piece.is_empty() && !piece.starts_with('#') {
            tokens.push(Token {
                text: piece,
                column,
            });
        }
        if piece.starts_with('#') {
            break;
        }
        column += piece.chars().count() + 1;
    }
    tokens
}

fn parse_number<T: std::str::FromStr>(
    token: &Token<'_>,
    line: usize,
    what: &str,
) -> Result<T, ParseError> {
    token.text.parse().map_err(|_| ParseError {
        line,
        column: token.column,
        message: format!("expected {what}, found `{}`", token.text),
    })
}

fn expect_arity(
    tokens: &[Token<'_>],
    line: usize,
    count: usize,
    usage: &str,
) -> Result<(), ParseError> {
    if tokens.len() != count + 1 {
        return Err(ParseError {
            line,
            column: tokens[0].column,
            message: format!("`{}` takes the form `{usage}`", tokens[0].text),
        });
    }
    Ok(())
}

/// Parses an instance document. The result is structurally validated but
/// not yet normalized; callers normalize before solving.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut q: Option<(u64, usize)> = None;
    let mut gamma: Option<(u64, usize)> = None;
    let mut locations: Option<(usize, usize)> = None;
    let mut demands: Vec<(u64, u64)> = Vec::new();
    let mut edges: Vec<(usize, usize, usize, usize)> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens = tokenize(raw_line);
        if tokens.is_empty() {
            continue;
        }
        let key = &tokens[0];
        match key.text {
            "q" | "gamma" | "locations" => {
                expect_arity(&tokens, line, 1, &format!("{} <int>", key.text))?;
                let slot_taken = match key.text {
                    "q" => q.is_some(),
                    "gamma" => gamma.is_some(),
                    _ => locations.is_some(),
                };
                if slot_taken {
                    return Err(ParseError {
                        line,
                        column: key.column,
                        message: format!("duplicate `{}` directive", key.text),
                    });
                }
                match key.text {
                    "q" => q = Some((parse_number(&tokens[1], line, "an integer")?, line)),
                    "gamma" => gamma = Some((parse_number(&tokens[1], line, "an integer")?, line)),
                    _ => locations = Some((parse_number(&tokens[1], line, "an integer")?, line)),
                }
            }
            "region" => {
                expect_arity(&tokens, line, 2, "region <a> <b>")?;
                let a: u64 = parse_number(&tokens[1], line, "a lower demand")?;
                let b: u64 = parse_number(&tokens[2], line, "an upper demand")?;
                if a > b {
                    return Err(ParseError {
                        line,
                        column: tokens[1].column,
                        message: format!("lower demand {a} exceeds upper demand {b}"),
                    });
                }
                demands.push((a, b));
            }
            "edge" => {
                expect_arity(&tokens, line, 2, "edge <location> <region>")?;
                let i: usize = parse_number(&tokens[1], line, "a location index")?;
                let j: usize = parse_number(&tokens[2], line, "a region index")?;
                edges.push((i, j, line, tokens[1].column));
            }
            other => {
                return Err(ParseError {
                    line,
                    column: key.column,
                    message: format!("unknown directive `{other}`"),
                });
            }
        }
    }

    let (q, _) = q.ok_or(ParseError {
        line: text.lines().count() + 1,
        column: 1,
        message: "missing `q` directive".into(),
    })?;
    let (gamma, _) = gamma.ok_or(ParseError {
        line: text.lines().count() + 1,
        column: 1,
        message: "missing `gamma` directive".into(),
    })?;
    let (num_locations, _) = locations.ok_or(ParseError {
        line: text.lines().count() + 1,
        column: 1,
        message: "missing `locations` directive".into(),
    })?;

    for &(i, j, line, column) in &edges {
        if i >= num_locations {
            return Err(ParseError {
                line,
                column,
                message: format!("location index {i} out of range (locations {num_locations})"),
            });
        }
        if j >= demands.len() {
            return Err(ParseError {
                line,
                column,
                message: format!("region index {j} out of range ({} regions)", demands.len()),
            });
        }
    }
    let plain_edges: Vec<(usize, usize)> = edges.iter().map(|&(i, j, _, _)| (i, j)).collect();
    Instance::with_gamma(q, num_locations, demands, &plain_edges, gamma).map_err(|e| ParseError {
        line: 1,
        column: 1,
        message: e.to_string(),
    })
}

/// Canonical instance document: scalars, regions in index order, edges in
/// (location, region) order.
pub fn write_instance(inst: &Instance) -> String {
    let mut out = String::new();
    out.push_str(&format!("q {}\n", inst.q()));
    out.push_str(&format!("gamma {}\n", inst.gamma()));
    out.push_str(&format!("locations {}\n", inst.num_locations()));
    for j in 0..inst.num_regions() {
        out.push_str(&format!(
            "region {} {}\n",
            inst.lower_demands()[j],
            inst.upper_demands()[j]
        ));
    }
    for (i, j) in inst.edges() {
        out.push_str(&format!("edge {i} {j}\n"));
    }
    out
}

/// Parses a weighted street graph: a `nodes N facilities f1 f2 ...`
/// header followed by `edge u v w` lines with travel times in minutes.
pub fn parse_weighted_graph(text: &str) -> Result<WeightedGraph, ParseError> {
    let mut header: Option<(usize, Vec<usize>)> = None;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens = tokenize(raw_line);
        if tokens.is_empty() {
            continue;
        }
        match tokens[0].text {
            "nodes" => {
                if header.is_some() {
                    return Err(ParseError {
                        line,
                        column: tokens[0].column,
                        message: "duplicate `nodes` header".into(),
                    });
                }
                if tokens.len() < 3 || tokens[2].text != "facilities" {
                    return Err(ParseError {
                        line,
                        column: tokens[0].column,
                        message: "header takes the form `nodes <count> facilities <id>...`".into(),
                    });
                }
                let count: usize = parse_number(&tokens[1], line, "a node count")?;
                let mut facilities = Vec::new();
                for token in &tokens[3..] {
                    facilities.push(parse_number(token, line, "a facility node id")?);
                }
                if facilities.is_empty() {
                    return Err(ParseError {
                        line,
                        column: tokens[2].column,
                        message: "at least one facility is required".into(),
                    });
                }
                header = Some((count, facilities));
            }
            "edge" => {
                expect_arity(&tokens, line, 3, "edge <u> <v> <minutes>")?;
                let u: usize = parse_number(&tokens[1], line, "a node id")?;
                let v: usize = parse_number(&tokens[2], line, "a node id")?;
                let w: f64 = parse_number(&tokens[3], line, "a travel time")?;
                if !w.is_finite() || w < 0.0 {
                    return Err(ParseError {
                        line,
                        column: tokens[3].column,
                        message: format!("travel time must be non-negative, found {w}"),
                    });
                }
                edges.push((u, v, w));
            }
            other => {
                return Err(ParseError {
                    line,
                    column: tokens[0].column,
                    message: format!("unknown directive `{other}`"),
                });
            }
        }
    }

    let (num_nodes, facilities) = header.ok_or(ParseError {
        line: text.lines().count() + 1,
        column: 1,
        message: "missing `nodes ... facilities ...` header".into(),
    })?;
    WeightedGraph::new(num_nodes, edges, facilities).map_err(|e| ParseError {
        line: 1,
        column: 1,
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rmc_core::instgen::{random_instance, GenParams};

    const INST_A: &str = "\
q 3
gamma 4
locations 2
region 0 2
region 0 2
region 0 2
edge 0 0
edge 0 1
edge 1 1
edge 1 2
";

    #[test]
    fn parses_the_reference_document() {
        let inst = parse_instance(INST_A).unwrap();
        assert_eq!(inst.q(), 3);
        assert_eq!(inst.gamma(), 4);
        assert_eq!(inst.num_locations(), 2);
        assert_eq!(inst.num_regions(), 3);
        assert_eq!(inst.region_neighbors(1), &[0, 1]);
    }

    #[test]
    fn write_then_parse_is_identity() {
        for seed in 0..10 {
            let inst = random_instance(&GenParams {
                num_locations: 4,
                num_regions: 9,
                edge_density: 0.5,
                k1: 2,
                k2: 3,
                gamma_factor: 0.4,
                q: 3,
                seed,
            })
            .unwrap();
            let text = write_instance(&inst);
            let back = parse_instance(&text).unwrap();
            assert_eq!(back, inst);
            // canonical output is byte-stable
            assert_eq!(write_instance(&back), text);
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = format!("# header comment\n\n{INST_A}# trailing\n");
        assert!(parse_instance(&text).is_ok());
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let err = parse_instance("q 1\ngamma 0\nlocations 1\nbudget 3\n").unwrap_err();
        assert_eq!((err.line, err.column), (4, 1));
        assert!(err.message.contains("unknown directive"));
    }

    #[test]
    fn bad_numbers_point_at_the_token() {
        let err = parse_instance("q 1\ngamma x\nlocations 1\n").unwrap_err();
        assert_eq!((err.line, err.column), (2, 7));
    }

    #[test]
    fn out_of_range_edges_are_rejected() {
        let err = parse_instance("q 1\ngamma 1\nlocations 1\nregion 0 1\nedge 3 0\n").unwrap_err();
        assert_eq!(err.line, 5);
        assert!(err.message.contains("out of range"));
    }

    #[test]
    fn missing_scalars_are_rejected() {
        let err = parse_instance("gamma 1\nlocations 1\nregion 0 1\n").unwrap_err();
        assert!(err.message.contains("missing `q`"));
    }

    #[test]
    fn weighted_graph_round_trip_of_fields() {
        let g = parse_weighted_graph("nodes 3 facilities 0 2\nedge 0 1 2.5\nedge 1 2 3\n").unwrap();
        assert_eq!(g.num_nodes(), 3);
        assert_eq!(g.facilities(), &[0, 2]);
        assert_eq!(g.edges().len(), 2);
        assert_eq!(g.edges()[0], (0, 1, 2.5));
    }

    #[test]
    fn weighted_graph_rejects_negative_times() {
        let err = parse_weighted_graph("nodes 2 facilities 0\nedge 0 1 -4\n").unwrap_err();
        assert_eq!(err.line, 2);
    }
}
