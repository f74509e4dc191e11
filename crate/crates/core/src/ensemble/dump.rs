//! Line-oriented model dump.
//!
//! The first line is a header record, followed by one JSON record per tree:
//!
//! ```text
//! {"format":"leakscope-ensemble","version":1,"num_features":120,"classes":["negative","positive"],"trees":2}
//! {"alpha":0.42,"root":{"split":{"feature":7,"threshold":0.5,"gini_decrease":0.21,"left":{"leaf":{"class_weights":[0.4,0.1]}},"right":{...}}}}
//! ```
//!
//! Feature indices refer to rows of the vocabulary TSV export.

use serde::{Deserialize, Serialize};

use super::boost::BoostedEnsemble;
use super::tree::TreeNode;
use crate::error::{Error, Result};

pub const DUMP_FORMAT: &str = "leakscope-ensemble";

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    num_features: usize,
    classes: [String; 2],
    trees: usize,
}

#[derive(Serialize, Deserialize)]
struct TreeRecord {
    alpha: f64,
    root: TreeNode,
}

pub fn dump_ensemble(ensemble: &BoostedEnsemble) -> String {
    let header = Header {
        format: DUMP_FORMAT.into(),
        version: 1,
        num_features: ensemble.num_features,
        classes: ["negative".into(), "positive".into()],
        trees: ensemble.trees.len(),
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for (tree, alpha) in ensemble.trees.iter().zip(&ensemble.alphas) {
        let rec = TreeRecord {
            alpha: *alpha,
            root: tree.clone(),
        };
        out.push_str(&serde_json::to_string(&rec).expect("tree serializes"));
        out.push('\n');
    }
    out
}

pub fn load_ensemble(text: &str) -> Result<BoostedEnsemble> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Header = serde_json::from_str(lines.next().ok_or_else(|| Error::Dump("missing header".into()))?)
        .map_err(|e| Error::Dump(format!("header: {e}")))?;
    if header.format != DUMP_FORMAT || header.version != 1 {
        return Err(Error::Dump(format!("unsupported format {} v{}", header.format, header.version)));
    }
    let mut ensemble = BoostedEnsemble {
        trees: Vec::with_capacity(header.trees),
        alphas: Vec::with_capacity(header.trees),
        num_features: header.num_features,
    };
    for (i, line) in lines.enumerate() {
        let rec: TreeRecord = serde_json::from_str(line).map_err(|e| Error::Dump(format!("tree {i}: {e}")))?;
        if let Some(f) = rec.root.max_feature() {
            if f >= header.num_features {
                return Err(Error::FeatureOutOfRange {
                    index: f,
                    num_features: header.num_features,
                });
            }
        }
        ensemble.trees.push(rec.root);
        ensemble.alphas.push(rec.alpha);
    }
    if ensemble.trees.len() != header.trees {
        return Err(Error::Dump(format!(
            "header announces {} trees, found {}",
            header.trees,
            ensemble.trees.len()
        )));
    }
    Ok(ensemble)
}
