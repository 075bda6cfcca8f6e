//! Coupling graph of a Hamiltonian in a symmetric basis, exported as DOT.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::hamiltonian::HermitianMatrix;
use crate::symmetric_basis::SymmetricBasis;

#[derive(Clone, Debug, PartialEq)]
pub struct GraphNode {
    pub label: String,
    pub excitations: u32,
    pub rep: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CouplingGraph {
    pub nodes: Vec<GraphNode>,
    /// `(i, j, |H_ij|)` with `i < j`.
    pub edges: Vec<(usize, usize, f64)>,
}

/// `A, B, ..., Z, AA, AB, ...`
fn letters(mut k: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'A' + (k % 26) as u8);
        if k < 26 {
            break;
        }
        k = k / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

impl CouplingGraph {
    pub fn new(basis: &SymmetricBasis, h: &HermitianMatrix) -> Result<Self> {
        if h.dim() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                got: h.dim(),
            });
        }
        let mut per_count = std::collections::HashMap::new();
        for s in basis.states() {
            *per_count.entry(s.excitation_count()).or_insert(0usize) += 1;
        }
        let mut seen = std::collections::HashMap::new();
        let nodes = basis
            .states()
            .iter()
            .map(|s| {
                let k = s.excitation_count();
                let ord = seen.entry(k).or_insert(0usize);
                let label = if per_count[&k] > 1 {
                    format!("{k}{}", letters(*ord))
                } else {
                    k.to_string()
                };
                *ord += 1;
                GraphNode {
                    label,
                    excitations: k,
                    rep: s.rep().bits(),
                }
            })
            .collect();
        let edges = h
            .csr()
            .iter()
            .filter(|&(i, j, v)| i < j && v != 0.0)
            .map(|(i, j, v)| (i, j, v.abs()))
            .collect();
        Ok(Self { nodes, edges })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph coupling {\n  rankdir=LR;\n  node [shape=circle];\n");
        let max_k = self.nodes.iter().map(|n| n.excitations).max().unwrap_or(0);
        for k in 0..=max_k {
            let members: Vec<usize> = (0..self.nodes.len()).filter(|&i| self.nodes[i].excitations == k).collect();
            if members.is_empty() {
                continue;
            }
            let _ = writeln!(s, "  {{ rank=same;");
            for i in members {
                let n = &self.nodes[i];
                let _ = writeln!(s, "    s{i} [label=\"{}\", rep=\"{:b}\"];", n.label, n.rep);
            }
            let _ = writeln!(s, "  }}");
        }
        for &(i, j, w) in &self.edges {
            let _ = writeln!(s, "  s{i} -- s{j} [weight={w:.12}, label=\"{w:.4}\"];");
        }
        s.push_str("}\n");
        s
    }
}

/// DOT rendering of the nonzero off-diagonal couplings of `h`.
pub fn export_coupling_graph(basis: &SymmetricBasis, h: &HermitianMatrix) -> Result<String> {
    Ok(CouplingGraph::new(basis, h)?.to_dot())
}
