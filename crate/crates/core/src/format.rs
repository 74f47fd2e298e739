//! Plain-text tree formats: edge list, level sequence, Prüfer sequence.
//!
//! Lines starting with `#` are comments, except `# format: <name>` which pins
//! the format when auto-detection would be ambiguous.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tree::{levels_to_string, Tree};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeFormat {
    /// One `u v` pair per line, 0-based ids.
    EdgeList,
    /// Space-separated preorder depths, e.g. `0 1 2 2 1`.
    LevelSequence,
    /// n−2 space-separated labels.
    Prufer,
}

impl FromStr for TreeFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "edges" | "edge-list" | "edgelist" => Ok(TreeFormat::EdgeList),
            "level" | "levels" | "level-sequence" => Ok(TreeFormat::LevelSequence),
            "prufer" | "prüfer" => Ok(TreeFormat::Prufer),
            other => Err(Error::Parse(format!("unknown tree format `{other}`"))),
        }
    }
}

impl fmt::Display for TreeFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TreeFormat::EdgeList => "edges",
            TreeFormat::LevelSequence => "level",
            TreeFormat::Prufer => "prufer",
        })
    }
}

fn numbers(line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| Error::Parse(format!("not a vertex id or depth: `{tok}`")))
        })
        .collect()
}

fn looks_like_levels(seq: &[usize]) -> bool {
    seq.first() == Some(&0) && seq.windows(2).all(|w| w[1] >= 1 && w[1] <= w[0] + 1)
}

/// Parses a tree, auto-detecting the format unless `format` is given or the
/// text carries a `# format:` header.
///
/// Auto-detection: several data lines → edge list; a single line that is a
/// valid level sequence → level sequence; a single two-token line → edge
/// list; any other single line → Prüfer; no data lines → single vertex.
pub fn parse_tree(text: &str, format: Option<TreeFormat>) -> Result<Tree> {
    let mut pinned = format;
    let mut data = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(name) = comment.trim().strip_prefix("format:") {
                pinned.get_or_insert(name.parse()?);
            }
            continue;
        }
        if !line.is_empty() {
            data.push(line);
        }
    }
    let format = match pinned {
        Some(f) => f,
        None => match data.as_slice() {
            [] => TreeFormat::EdgeList,
            [single] => {
                let seq = numbers(single)?;
                if looks_like_levels(&seq) {
                    TreeFormat::LevelSequence
                } else if seq.len() == 2 {
                    TreeFormat::EdgeList
                } else {
                    TreeFormat::Prufer
                }
            }
            _ => TreeFormat::EdgeList,
        },
    };
    match format {
        TreeFormat::EdgeList => {
            let mut edges = Vec::with_capacity(data.len());
            for line in &data {
                match numbers(line)?.as_slice() {
                    &[u, v] => edges.push((u, v)),
                    _ => return Err(Error::Parse(format!("expected `u v`, got `{line}`"))),
                }
            }
            Tree::from_edges(&edges)
        }
        TreeFormat::LevelSequence => {
            let seq = numbers(&data.join(" "))?;
            let levels: Vec<u32> = seq.iter().map(|&d| d as u32).collect();
            Tree::from_level_sequence(&levels)
        }
        TreeFormat::Prufer => Tree::from_prufer(&numbers(&data.join(" "))?),
    }
}

/// Serializes a tree. Level sequences are written in canonical form, the
/// other two formats preserve the labeling.
pub fn write_tree(t: &Tree, format: TreeFormat) -> String {
    match format {
        TreeFormat::EdgeList => t
            .edges()
            .iter()
            .map(|(u, v)| format!("{u} {v}\n"))
            .collect(),
        TreeFormat::LevelSequence => format!("{}\n", levels_to_string(t.level_sequence())),
        TreeFormat::Prufer => {
            let seq: Vec<String> = t.to_prufer().iter().map(usize::to_string).collect();
            format!("{}\n", seq.join(" "))
        }
    }
}
