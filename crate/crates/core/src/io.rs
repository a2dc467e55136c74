//! Versioned text formats for trees, matrix product states, and dense
//! states, plus DOT export for figures.
//!
//! All three documents are JSON with a leading `format` field naming the
//! schema version:
//!
//! - `statetree/1` — `{ format, n, root }` where a node is one of
//!   `{"kind": "leaf", "qubit", "amp0", "amp1"}`,
//!   `{"kind": "plus", "terms": [{"weight", "node"}, …]}`,
//!   `{"kind": "tensor", "children": […]}`; complex numbers are
//!   `{"re", "im"}` objects.
//! - `mps/1` — `{ format, sites: [{"a0", "a1"}, …] }` with matrices as
//!   row-major nested arrays of complex numbers.
//! - `densestate/1` — `{ format, n, amps }` with `2^n` complex amplitudes,
//!   qubit 1 in the most significant bit of the index.
//!
//! Parse errors carry the line and column reported by the JSON parser.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::DenseState;
use crate::mps::{Mps, MpsSite};
use crate::tree::{StateTree, TreeNode};
use crate::{Error, Result};

pub const TREE_FORMAT: &str = "statetree/1";
pub const MPS_FORMAT: &str = "mps/1";
pub const DENSE_FORMAT: &str = "densestate/1";

#[derive(Serialize, Deserialize)]
struct TreeDoc {
    format: String,
    n: usize,
    root: NodeDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum NodeDoc {
    Leaf {
        qubit: usize,
        amp0: Complex64,
        amp1: Complex64,
    },
    Plus {
        terms: Vec<TermDoc>,
    },
    Tensor {
        children: Vec<NodeDoc>,
    },
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    weight: Complex64,
    node: NodeDoc,
}

#[derive(Serialize, Deserialize)]
struct MpsDoc {
    format: String,
    sites: Vec<SiteDoc>,
}

#[derive(Serialize, Deserialize)]
struct SiteDoc {
    a0: Vec<Vec<Complex64>>,
    a1: Vec<Vec<Complex64>>,
}

#[derive(Serialize, Deserialize)]
struct DenseDoc {
    format: String,
    n: usize,
    amps: Vec<Complex64>,
}

fn node_to_doc(node: &TreeNode) -> NodeDoc {
    match node {
        TreeNode::Leaf { qubit, amp0, amp1 } => NodeDoc::Leaf {
            qubit: *qubit,
            amp0: *amp0,
            amp1: *amp1,
        },
        TreeNode::Plus { terms } => NodeDoc::Plus {
            terms: terms
                .iter()
                .map(|(w, c)| TermDoc {
                    weight: *w,
                    node: node_to_doc(c),
                })
                .collect(),
        },
        TreeNode::Tensor { children } => NodeDoc::Tensor {
            children: children.iter().map(node_to_doc).collect(),
        },
    }
}

fn doc_to_node(doc: NodeDoc) -> TreeNode {
    match doc {
        NodeDoc::Leaf { qubit, amp0, amp1 } => TreeNode::Leaf { qubit, amp0, amp1 },
        NodeDoc::Plus { terms } => TreeNode::Plus {
            terms: terms
                .into_iter()
                .map(|t| (t.weight, doc_to_node(t.node)))
                .collect(),
        },
        NodeDoc::Tensor { children } => TreeNode::Tensor {
            children: children.into_iter().map(doc_to_node).collect(),
        },
    }
}

fn parse_err(context: &str, e: serde_json::Error) -> Error {
    Error::Parse(format!(
        "{context} parse error at line {}, column {}: {e}",
        e.line(),
        e.column()
    ))
}

fn check_format(context: &str, got: &str, want: &str) -> Result<()> {
    if got != want {
        return Err(Error::Parse(format!(
            "{context}: unsupported format {got:?}, expected {want:?}"
        )));
    }
    Ok(())
}

/// Serializes a tree to the `statetree/1` document.
pub fn serialize_tree(tree: &StateTree) -> String {
    let doc = TreeDoc {
        format: TREE_FORMAT.to_string(),
        n: tree.n(),
        root: node_to_doc(tree.root()),
    };
    serde_json::to_string_pretty(&doc).expect("tree documents always serialize")
}

/// Parses a `statetree/1` document. The structure round-trips exactly;
/// validity is *not* implied — run [`StateTree::validate`] on the result.
pub fn deserialize_tree(text: &str) -> Result<StateTree> {
    let doc: TreeDoc = serde_json::from_str(text).map_err(|e| parse_err("tree document", e))?;
    check_format("tree document", &doc.format, TREE_FORMAT)?;
    Ok(StateTree::new(doc.n, doc_to_node(doc.root)))
}

/// Serializes a matrix product state to the `mps/1` document.
pub fn serialize_mps(mps: &Mps) -> String {
    let sites = mps
        .sites()
        .iter()
        .map(|s| SiteDoc {
            a0: matrix_to_rows(&s.a0),
            a1: matrix_to_rows(&s.a1),
        })
        .collect();
    let doc = MpsDoc {
        format: MPS_FORMAT.to_string(),
        sites,
    };
    serde_json::to_string_pretty(&doc).expect("mps documents always serialize")
}

/// Parses an `mps/1` document, re-validating all shape invariants.
pub fn deserialize_mps(text: &str) -> Result<Mps> {
    let doc: MpsDoc = serde_json::from_str(text).map_err(|e| parse_err("mps document", e))?;
    check_format("mps document", &doc.format, MPS_FORMAT)?;
    let sites = doc
        .sites
        .into_iter()
        .enumerate()
        .map(|(i, site)| {
            Ok(MpsSite {
                a0: rows_to_matrix(&site.a0, i, "a0")?,
                a1: rows_to_matrix(&site.a1, i, "a1")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Mps::new(sites)
}

/// Serializes a dense state to the `densestate/1` document.
pub fn serialize_dense(state: &DenseState) -> String {
    let doc = DenseDoc {
        format: DENSE_FORMAT.to_string(),
        n: state.n(),
        amps: state.amps().to_vec(),
    };
    serde_json::to_string_pretty(&doc).expect("dense documents always serialize")
}

/// Parses a `densestate/1` document, checking the amplitude count.
pub fn deserialize_dense(text: &str) -> Result<DenseState> {
    let doc: DenseDoc = serde_json::from_str(text).map_err(|e| parse_err("dense document", e))?;
    check_format("dense document", &doc.format, DENSE_FORMAT)?;
    DenseState::new(doc.n, doc.amps)
}

fn matrix_to_rows(m: &DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

fn rows_to_matrix(rows: &[Vec<Complex64>], site: usize, which: &str) -> Result<DMatrix<Complex64>> {
    if rows.is_empty() {
        return Err(Error::Parse(format!("site {}: {which} has no rows", site + 1)));
    }
    let ncols = rows[0].len();
    if ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse(format!(
            "site {}: {which} rows are empty or ragged",
            site + 1
        )));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c]))
}

/// Renders the tree in Graphviz DOT, one node per gate or leaf, with plus
/// weights as edge labels.
pub fn tree_to_dot(tree: &StateTree) -> String {
    let mut out = String::from("digraph statetree {\n  rankdir=TB;\n  node [fontname=\"monospace\"];\n");
    let mut counter = 0usize;
    dot_node(tree.root(), &mut counter, &mut out);
    out.push_str("}\n");
    out
}

fn fmt_c(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{:.4}", c.re)
    } else {
        format!("{:.4}{}{:.4}i", c.re, if c.im < 0.0 { "-" } else { "+" }, c.im.abs())
    }
}

fn dot_node(node: &TreeNode, counter: &mut usize, out: &mut String) -> usize {
    let id = *counter;
    *counter += 1;
    match node {
        TreeNode::Leaf { qubit, amp0, amp1 } => {
            out.push_str(&format!(
                "  n{id} [shape=box, label=\"q{qubit}: {}|0> + {}|1>\"];\n",
                fmt_c(*amp0),
                fmt_c(*amp1)
            ));
        }
        TreeNode::Plus { terms } => {
            out.push_str(&format!("  n{id} [shape=circle, label=\"+\"];\n"));
            for (w, child) in terms {
                let cid = dot_node(child, counter, out);
                out.push_str(&format!("  n{id} -> n{cid} [label=\"{}\"];\n", fmt_c(*w)));
            }
        }
        TreeNode::Tensor { children } => {
            out.push_str(&format!("  n{id} [shape=circle, label=\"&otimes;\"];\n"));
            for child in children {
                let cid = dot_node(child, counter, out);
                out.push_str(&format!("  n{id} -> n{cid};\n"));
            }
        }
    }
    id
}
