//! Text formats for sequences, trees and exact-cover instances.
//!
//! Sequence file: one key per line, an integer or `a,b,c`.
//! Tree file: the node count, then one `seq_index parent_line` line per
//! node, `parent_line` counting tree lines from 0 and `-1` for the root.
//! X3C file: `n m`, then `m` lines of three elements.
//! Blank lines and lines starting with `#` are ignored everywhere.

use std::fmt::Write as _;

use thiserror::Error;

use crate::key::{Key, Sequence};
use crate::reduction::{ReductionError, X3CInstance};
use crate::tree::{HeapTree, StructureError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("expected {expected} entries, found {found}")]
    Count { expected: usize, found: usize },
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Instance(#[from] ReductionError),
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, msg: msg.into() }
}

pub fn parse_sequence(text: &str) -> Result<Sequence, FormatError> {
    let items = content_lines(text)
        .map(|(line, l)| l.parse::<Key>().map_err(|e| syntax(line, e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Sequence::new(items))
}

pub fn format_sequence(items: &[Key]) -> String {
    let mut out = String::with_capacity(items.len() * 4);
    for k in items {
        writeln!(out, "{k}").expect("writing to a String");
    }
    out
}

/// Binary values of a sequence of 0/1 ranks.
pub fn binary_values(seq: &Sequence) -> Result<Vec<u8>, FormatError> {
    seq.items
        .iter()
        .enumerate()
        .map(|(i, k)| match k {
            Key::Rank(0) => Ok(0),
            Key::Rank(1) => Ok(1),
            _ => Err(syntax(i + 1, format!("expected 0 or 1, found {k}"))),
        })
        .collect()
}

/// Parent links of a tree file, unchecked against any sequence.
pub fn parse_tree_links(text: &str) -> Result<Vec<(usize, Option<usize>)>, FormatError> {
    let mut lines = content_lines(text);
    let (line, first) = lines.next().ok_or_else(|| syntax(1, "missing node count"))?;
    let n: usize = first.parse().map_err(|_| syntax(line, "node count is not an integer"))?;
    let mut links = Vec::with_capacity(n);
    for (line, l) in lines {
        let fields: Vec<&str> = l.split_whitespace().collect();
        let [idx, parent] = fields[..] else {
            return Err(syntax(line, "expected `seq_index parent_line`"));
        };
        let idx: usize = idx.parse().map_err(|_| syntax(line, "bad sequence index"))?;
        let parent = match parent.parse::<i64>() {
            Ok(-1) => None,
            Ok(p) if p >= 0 => Some(p as usize),
            _ => return Err(syntax(line, "bad parent line")),
        };
        links.push((idx, parent));
    }
    if links.len() != n {
        return Err(FormatError::Count {
            expected: n,
            found: links.len(),
        });
    }
    Ok(links)
}

pub fn parse_tree<K: Clone>(text: &str, seq: &[K]) -> Result<HeapTree<K>, FormatError> {
    let links = parse_tree_links(text)?;
    Ok(HeapTree::from_parent_links(&links, seq)?)
}

pub fn format_tree<K>(tree: &HeapTree<K>) -> String {
    let links = tree.to_parent_links();
    let mut out = format!("{}\n", links.len());
    for (idx, parent) in links {
        match parent {
            Some(p) => writeln!(out, "{idx} {p}"),
            None => writeln!(out, "{idx} -1"),
        }
        .expect("writing to a String");
    }
    out
}

pub fn parse_x3c(text: &str) -> Result<X3CInstance, FormatError> {
    let mut lines = content_lines(text);
    let (line, first) = lines.next().ok_or_else(|| syntax(1, "missing `n m` header"))?;
    let header: Vec<usize> = first
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| syntax(line, "header must be two integers"))?;
    let [n, m] = header[..] else {
        return Err(syntax(line, "header must be `n m`"));
    };
    let mut sets = Vec::with_capacity(m);
    for (line, l) in lines {
        let e: Vec<usize> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| syntax(line, "set elements must be integers"))?;
        let [a, b, c] = e[..] else {
            return Err(syntax(line, "a set has exactly three elements"));
        };
        sets.push([a, b, c]);
    }
    if sets.len() != m {
        return Err(FormatError::Count {
            expected: m,
            found: sets.len(),
        });
    }
    Ok(X3CInstance::new(n, sets)?)
}

pub fn format_x3c(inst: &X3CInstance) -> String {
    let mut out = format!("{} {}\n", inst.n, inst.m());
    for [a, b, c] in &inst.sets {
        writeln!(out, "{a} {b} {c}").expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::decide_heapable;

    #[test]
    fn sequence_round_trip() {
        let text = "# example\n1\n3\n\n5\n2\n4\n";
        let seq = parse_sequence(text).unwrap();
        assert_eq!(seq, Sequence::from_ranks([1, 3, 5, 2, 4]));
        assert_eq!(parse_sequence(&format_sequence(&seq.items)).unwrap(), seq);
        let triples = parse_sequence("10,0,2\n-5,1,1\n").unwrap();
        assert_eq!(triples.items, vec![Key::Triple(10, 0, 2), Key::Triple(-5, 1, 1)]);
        assert_eq!(
            parse_sequence("1\nx\n"),
            Err(FormatError::Syntax {
                line: 2,
                msg: "invalid key \"x\": expected an integer or `a,b,c`".into()
            })
        );
    }

    #[test]
    fn tree_round_trip() {
        let seq = [1, 3, 5, 2, 4];
        let tree = decide_heapable(&seq).unwrap().witness().unwrap().clone();
        let text = format_tree(&tree);
        assert!(text.starts_with("5\n0 -1\n"));
        assert_eq!(parse_tree(&text, &seq).unwrap(), tree);
        assert_eq!(
            parse_tree("3\n0 -1\n1 0\n", &seq),
            Err(FormatError::Count { expected: 3, found: 2 })
        );
        assert!(matches!(parse_tree("2\n0 -1\n1 -2\n", &seq), Err(FormatError::Syntax { line: 3, .. })));
        assert!(matches!(parse_tree("2\n0 -1\n9 0\n", &seq), Err(FormatError::Structure(_))));
    }

    #[test]
    fn x3c_round_trip() {
        let text = "6 3\n1 2 3\n6 5 4\n# note\n2 3 4\n";
        let inst = parse_x3c(text).unwrap();
        assert_eq!(inst.sets[1], [4, 5, 6]);
        assert_eq!(parse_x3c(&format_x3c(&inst)).unwrap(), inst);
        assert!(matches!(parse_x3c("6 2\n1 2 3\n"), Err(FormatError::Count { .. })));
        assert!(matches!(parse_x3c("5 1\n1 2 3\n"), Err(FormatError::Instance(_))));
        assert!(matches!(parse_x3c("6 1\n1 2\n"), Err(FormatError::Syntax { line: 2, .. })));
    }

    #[test]
    fn binary() {
        let seq = parse_sequence("0\n1\n1\n").unwrap();
        assert_eq!(binary_values(&seq).unwrap(), vec![0, 1, 1]);
        assert!(binary_values(&parse_sequence("0\n2\n").unwrap()).is_err());
    }
}
