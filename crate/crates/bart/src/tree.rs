//! Binary regression trees: evaluation, birth/death edits, rectangular leaf
//! cells, and the domination relation behind monotone constraints.
//!
//! Conventions, fixed so every test is bit-exact:
//! * a split sends `x[var] <= cut_value` to the left child;
//! * leaf cells are therefore half-open boxes `(lo, hi]` per coordinate,
//!   with infinite endpoints where the path never constrains a coordinate;
//! * nodes are stored in preorder, so node 0 is the root and a node's left
//!   child is the next node. Edits rebuild the vector in preorder, which
//!   keeps serialization and structural comparison canonical.

use std::io::{self, Write};

use crate::error::{BartError, Result};
use crate::float::Real;

pub type NodeId = usize;

/// Decision rule at an internal node. `cut_value` duplicates
/// `grid.cuts(var)[cut_index]` so evaluation never needs the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitRule<F> {
    pub var: usize,
    pub cut_index: usize,
    pub cut_value: F,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind<F> {
    Split {
        rule: SplitRule<F>,
        left: NodeId,
        right: NodeId,
    },
    Leaf {
        value: F,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node<F> {
    pub kind: NodeKind<F>,
    pub parent: Option<NodeId>,
    pub depth: u32,
}

impl<F> Node<F> {
    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Leaf { .. })
    }
}

/// One ensemble member: tree structure plus leaf values.
#[derive(Clone, Debug, PartialEq)]
pub struct Tree<F> {
    nodes: Vec<Node<F>>,
}

/// Axis-aligned box owned by one leaf; `(lo, hi]` in every coordinate.
#[derive(Clone, Debug)]
pub struct Cell<F> {
    /// Leaf ordinal (position in preorder leaf enumeration).
    pub leaf: usize,
    pub node: NodeId,
    pub lo: Vec<F>,
    pub hi: Vec<F>,
}

impl<F: Real> Cell<F> {
    pub fn contains(&self, x: &[F]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(self.hi.iter()))
            .all(|(&v, (&lo, &hi))| v > lo && v <= hi)
    }
}

/// Ordered pair of leaves whose values must satisfy `mu[lower] <= mu[upper]`
/// for the tree to be monotone in `coord`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AbovePair {
    pub lower: usize,
    pub upper: usize,
    pub coord: usize,
}

/// Truncation interval for one leaf value implied by its neighbors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstraintBounds<F> {
    pub lower: F,
    pub upper: F,
}

impl<F: Real> Tree<F> {
    /// Single-leaf tree.
    pub fn leaf(value: F) -> Self {
        Tree {
            nodes: vec![Node {
                kind: NodeKind::Leaf { value },
                parent: None,
                depth: 0,
            }],
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> &Node<F> {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node<F>] {
        &self.nodes
    }

    /// Leaf node ids in preorder; a leaf's position here is its ordinal.
    pub fn leaf_ids(&self) -> Vec<NodeId> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.is_leaf())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn num_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    /// Leaf values in ordinal order.
    pub fn leaf_values(&self) -> Vec<F> {
        self.nodes
            .iter()
            .filter_map(|n| match n.kind {
                NodeKind::Leaf { value } => Some(value),
                _ => None,
            })
            .collect()
    }

    pub fn set_leaf_value(&mut self, id: NodeId, value: F) {
        match &mut self.nodes[id].kind {
            NodeKind::Leaf { value: v } => *v = value,
            _ => panic!("node {id} is not a leaf"),
        }
    }

    /// Overwrite all leaf values, given in ordinal order.
    pub fn set_leaf_values(&mut self, values: &[F]) {
        let ids = self.leaf_ids();
        assert_eq!(ids.len(), values.len());
        for (id, &v) in ids.iter().zip(values) {
            self.set_leaf_value(*id, v);
        }
    }

    /// Internal nodes whose children are both leaves (the only legal death sites).
    pub fn nog_ids(&self) -> Vec<NodeId> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| match n.kind {
                NodeKind::Split { left, right, .. } => {
                    self.nodes[left].is_leaf() && self.nodes[right].is_leaf()
                }
                _ => false,
            })
            .map(|(i, _)| i)
            .collect()
    }

    pub fn max_depth(&self) -> u32 {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Value of the leaf whose cell contains `x`.
    pub fn evaluate(&self, x: &[F]) -> F {
        let mut id = 0;
        loop {
            match self.nodes[id].kind {
                NodeKind::Leaf { value } => return value,
                NodeKind::Split { rule, left, right } => {
                    id = if x[rule.var] <= rule.cut_value { left } else { right };
                }
            }
        }
    }

    /// Map every observation to its leaf ordinal in one traversal.
    pub fn assign_leaves<G>(&self, n: usize, x: G) -> Vec<usize>
    where
        G: Fn(usize, usize) -> F,
    {
        let mut out = vec![0usize; n];
        let mut leaf_ordinal = 0usize;
        let all: Vec<u32> = (0..n as u32).collect();
        self.assign_rec(0, &all, &x, &mut leaf_ordinal, &mut out);
        out
    }

    fn assign_rec<G>(
        &self,
        id: NodeId,
        obs: &[u32],
        x: &G,
        leaf_ordinal: &mut usize,
        out: &mut Vec<usize>,
    ) where
        G: Fn(usize, usize) -> F,
    {
        match self.nodes[id].kind {
            NodeKind::Leaf { .. } => {
                for &i in obs {
                    out[i as usize] = *leaf_ordinal;
                }
                *leaf_ordinal += 1;
            }
            NodeKind::Split { rule, left, right } => {
                let (l, r): (Vec<u32>, Vec<u32>) = obs
                    .iter()
                    .partition(|&&i| x(i as usize, rule.var) <= rule.cut_value);
                self.assign_rec(left, &l, x, leaf_ordinal, out);
                self.assign_rec(right, &r, x, leaf_ordinal, out);
            }
        }
    }

    /// Interval of the leaf's cell along one coordinate.
    pub fn cell_interval(&self, id: NodeId, var: usize) -> (F, F) {
        let mut lo = F::neg_infinity();
        let mut hi = F::infinity();
        let mut cur = id;
        while let Some(parent) = self.nodes[cur].parent {
            if let NodeKind::Split { rule, left, .. } = self.nodes[parent].kind {
                if rule.var == var {
                    if cur == left {
                        hi = hi.min(rule.cut_value);
                    } else {
                        lo = lo.max(rule.cut_value);
                    }
                }
            }
            cur = parent;
        }
        (lo, hi)
    }

    /// Replace a leaf with a split carrying two fresh leaves. The original
    /// tree is untouched; the result is in canonical preorder, so the new
    /// leaves take ordinals `k` and `k + 1` where `k` was the ordinal of the
    /// split leaf.
    pub fn birth(
        &self,
        leaf: NodeId,
        rule: SplitRule<F>,
        left_value: F,
        right_value: F,
    ) -> Result<Tree<F>> {
        if leaf >= self.nodes.len() || !self.nodes[leaf].is_leaf() {
            return Err(BartError::InvalidEdit(format!("node {leaf} is not a leaf")));
        }
        let (lo, hi) = self.cell_interval(leaf, rule.var);
        if !(rule.cut_value > lo && rule.cut_value < hi) {
            return Err(BartError::InvalidEdit(format!(
                "cut {} outside the open cell interval ({}, {}) of variable {}",
                rule.cut_value, lo, hi, rule.var
            )));
        }
        Ok(self.rebuild(|id, tree| {
            if id == leaf {
                Some(BuildNode::Split {
                    rule,
                    left: Box::new(BuildNode::Leaf { value: left_value }),
                    right: Box::new(BuildNode::Leaf { value: right_value }),
                })
            } else {
                match tree.nodes[id].kind {
                    NodeKind::Leaf { value } => Some(BuildNode::Leaf { value }),
                    _ => None,
                }
            }
        }))
    }

    /// Collapse a nog node back into a leaf. The merged leaf's value is set
    /// to zero; the caller draws the real value afterwards.
    pub fn death(&self, node: NodeId) -> Result<Tree<F>> {
        let is_nog = match self.nodes.get(node).map(|n| &n.kind) {
            Some(NodeKind::Split { left, right, .. }) => {
                self.nodes[*left].is_leaf() && self.nodes[*right].is_leaf()
            }
            _ => false,
        };
        if !is_nog {
            return Err(BartError::InvalidEdit(format!(
                "node {node} is not an internal node with two leaf children"
            )));
        }
        Ok(self.rebuild(|id, tree| {
            if id == node {
                Some(BuildNode::Leaf { value: F::zero() })
            } else {
                match tree.nodes[id].kind {
                    NodeKind::Leaf { value } => Some(BuildNode::Leaf { value }),
                    _ => None,
                }
            }
        }))
    }

    /// Rebuild in preorder, letting `replace` substitute whole subtrees.
    /// `replace` returning None means "copy this split and recurse".
    fn rebuild<G>(&self, replace: G) -> Tree<F>
    where
        G: Fn(NodeId, &Tree<F>) -> Option<BuildNode<F>>,
    {
        fn shape<F: Real, G: Fn(NodeId, &Tree<F>) -> Option<BuildNode<F>>>(
            tree: &Tree<F>,
            id: NodeId,
            replace: &G,
        ) -> BuildNode<F> {
            if let Some(node) = replace(id, tree) {
                return node;
            }
            match tree.nodes[id].kind {
                NodeKind::Leaf { value } => BuildNode::Leaf { value },
                NodeKind::Split { rule, left, right } => BuildNode::Split {
                    rule,
                    left: Box::new(shape(tree, left, replace)),
                    right: Box::new(shape(tree, right, replace)),
                },
            }
        }
        Tree::from_build(shape(self, 0, &replace))
    }

    fn from_build(root: BuildNode<F>) -> Tree<F> {
        let mut nodes = Vec::new();
        fn push<F>(nodes: &mut Vec<Node<F>>, b: BuildNode<F>, parent: Option<NodeId>, depth: u32) -> NodeId {
            let id = nodes.len();
            match b {
                BuildNode::Leaf { value } => {
                    nodes.push(Node {
                        kind: NodeKind::Leaf { value },
                        parent,
                        depth,
                    });
                }
                BuildNode::Split { rule, left, right } => {
                    nodes.push(Node {
                        kind: NodeKind::Split {
                            rule,
                            left: 0,
                            right: 0,
                        },
                        parent,
                        depth,
                    });
                    let l = push(nodes, *left, Some(id), depth + 1);
                    let r = push(nodes, *right, Some(id), depth + 1);
                    if let NodeKind::Split { left, right, .. } = &mut nodes[id].kind {
                        *left = l;
                        *right = r;
                    }
                }
            }
            id
        }
        push(&mut nodes, root, None, 0);
        Tree { nodes }
    }

    /// One cell per leaf, ordinal order, computed by intersecting the split
    /// half-spaces along each root-to-leaf path.
    pub fn leaf_cells(&self, num_covariates: usize) -> Vec<Cell<F>> {
        let mut cells = Vec::with_capacity(self.num_leaves());
        let mut lo = vec![F::neg_infinity(); num_covariates];
        let mut hi = vec![F::infinity(); num_covariates];
        self.cells_rec(0, &mut lo, &mut hi, &mut cells);
        cells
    }

    fn cells_rec(&self, id: NodeId, lo: &mut Vec<F>, hi: &mut Vec<F>, cells: &mut Vec<Cell<F>>) {
        match self.nodes[id].kind {
            NodeKind::Leaf { .. } => {
                cells.push(Cell {
                    leaf: cells.len(),
                    node: id,
                    lo: lo.clone(),
                    hi: hi.clone(),
                });
            }
            NodeKind::Split { rule, left, right } => {
                let saved_hi = hi[rule.var];
                hi[rule.var] = rule.cut_value;
                self.cells_rec(left, lo, hi, cells);
                hi[rule.var] = saved_hi;

                let saved_lo = lo[rule.var];
                lo[rule.var] = rule.cut_value;
                self.cells_rec(right, lo, hi, cells);
                lo[rule.var] = saved_lo;
            }
        }
    }

    /// True when every domination pair is satisfied by the current leaf values.
    pub fn is_monotone(&self, coords: &[usize], num_covariates: usize) -> bool {
        if coords.is_empty() {
            return true;
        }
        let cells = self.leaf_cells(num_covariates);
        let pairs = above_pairs(&cells, coords);
        let values = self.leaf_values();
        pairs
            .iter()
            .all(|p| values[p.lower] <= values[p.upper])
    }

    /// Same split structure, leaf values ignored.
    pub fn same_structure(&self, other: &Tree<F>) -> bool {
        self.nodes.len() == other.nodes.len()
            && self.nodes.iter().zip(other.nodes.iter()).all(|(a, b)| {
                match (&a.kind, &b.kind) {
                    (NodeKind::Leaf { .. }, NodeKind::Leaf { .. }) => true,
                    (
                        NodeKind::Split { rule: ra, left: la, right: qa },
                        NodeKind::Split { rule: rb, left: lb, right: qb },
                    ) => ra == rb && la == lb && qa == qb,
                    _ => false,
                }
            })
    }

    /// Line-oriented text form: one header line, then one line per node in
    /// preorder (`id parent S var cut_index cut_value` or `id parent L value`).
    pub fn write_text<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "tree {}", self.nodes.len())?;
        for (id, node) in self.nodes.iter().enumerate() {
            let parent = node.parent.map(|p| p as i64).unwrap_or(-1);
            match node.kind {
                NodeKind::Split { rule, .. } => {
                    writeln!(w, "{} {} S {} {} {}", id, parent, rule.var, rule.cut_index, rule.cut_value)?
                }
                NodeKind::Leaf { value } => writeln!(w, "{} {} L {}", id, parent, value)?,
            }
        }
        Ok(())
    }

    /// Parse one tree from `lines[start..]`, returning the tree and the
    /// number of lines consumed.
    pub fn parse_text(lines: &[&str], start: usize) -> Result<(Tree<F>, usize)> {
        let bad = |line: usize, msg: &str| BartError::DrawStore(format!("line {}: {}", line + 1, msg));
        let header = lines
            .get(start)
            .ok_or_else(|| bad(start, "missing tree header"))?;
        let count: usize = header
            .strip_prefix("tree ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| bad(start, "malformed tree header"))?;
        if count == 0 {
            return Err(bad(start, "tree must have at least one node"));
        }
        enum Rec<F> {
            Split { parent: i64, rule: SplitRule<F> },
            Leaf { parent: i64, value: F },
        }
        let mut recs: Vec<Rec<F>> = Vec::with_capacity(count);
        for k in 0..count {
            let line_idx = start + 1 + k;
            let line = lines
                .get(line_idx)
                .ok_or_else(|| bad(line_idx, "truncated tree"))?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse_err = || bad(line_idx, "malformed node line");
            let id: usize = fields
                .first()
                .and_then(|s| s.parse().ok())
                .ok_or_else(parse_err)?;
            if id != k {
                return Err(bad(line_idx, "node ids must be sequential preorder"));
            }
            let parent: i64 = fields.get(1).and_then(|s| s.parse().ok()).ok_or_else(parse_err)?;
            match fields.get(2) {
                Some(&"S") if fields.len() == 6 => {
                    let var = fields[3].parse().map_err(|_| parse_err())?;
                    let cut_index = fields[4].parse().map_err(|_| parse_err())?;
                    let cut_value: F = fields[5].parse().map_err(|_| parse_err())?;
                    recs.push(Rec::Split {
                        parent,
                        rule: SplitRule { var, cut_index, cut_value },
                    });
                }
                Some(&"L") if fields.len() == 4 => {
                    let value: F = fields[3].parse().map_err(|_| parse_err())?;
                    recs.push(Rec::Leaf { parent, value });
                }
                _ => return Err(parse_err()),
            }
        }

        // Records are preorder: rebuild children links with a cursor.
        fn build<F: Real>(
            recs: &[Rec<F>],
            cursor: &mut usize,
            parent: i64,
            depth: u32,
            nodes: &mut Vec<Node<F>>,
        ) -> Result<NodeId> {
            let idx = *cursor;
            let rec = recs
                .get(idx)
                .ok_or_else(|| BartError::DrawStore("tree structure truncated".into()))?;
            *cursor += 1;
            let (rec_parent, kind_is_split) = match rec {
                Rec::Split { parent, .. } => (*parent, true),
                Rec::Leaf { parent, .. } => (*parent, false),
            };
            if rec_parent != parent {
                return Err(BartError::DrawStore(format!(
                    "node {} has parent {} but preorder implies {}",
                    idx, rec_parent, parent
                )));
            }
            let id = nodes.len();
            if kind_is_split {
                let rule = match rec {
                    Rec::Split { rule, .. } => *rule,
                    _ => unreachable!(),
                };
                nodes.push(Node {
                    kind: NodeKind::Split { rule, left: 0, right: 0 },
                    parent: (parent >= 0).then_some(parent as usize),
                    depth,
                });
                let l = build(recs, cursor, idx as i64, depth + 1, nodes)?;
                let r = build(recs, cursor, idx as i64, depth + 1, nodes)?;
                if let NodeKind::Split { left, right, .. } = &mut nodes[id].kind {
                    *left = l;
                    *right = r;
                }
            } else {
                let value = match rec {
                    Rec::Leaf { value, .. } => *value,
                    _ => unreachable!(),
                };
                nodes.push(Node {
                    kind: NodeKind::Leaf { value },
                    parent: (parent >= 0).then_some(parent as usize),
                    depth,
                });
            }
            Ok(id)
        }

        let mut nodes = Vec::with_capacity(count);
        let mut cursor = 0usize;
        build(&recs, &mut cursor, -1, 0, &mut nodes)?;
        if cursor != count {
            return Err(BartError::DrawStore(
                "tree has trailing nodes not reachable from the root".into(),
            ));
        }
        Ok((Tree { nodes }, count + 1))
    }
}

enum BuildNode<F> {
    Split {
        rule: SplitRule<F>,
        left: Box<BuildNode<F>>,
        right: Box<BuildNode<F>>,
    },
    Leaf {
        value: F,
    },
}

/// All ordered pairs (A, B, i) with i constrained such that A's and B's cells
/// overlap as open boxes in every coordinate except i, where B lies entirely
/// above A. These are exactly the leaf pairs whose values must be ordered for
/// coordinatewise monotonicity.
pub fn above_pairs<F: Real>(cells: &[Cell<F>], coords: &[usize]) -> Vec<AbovePair> {
    let mut pairs = Vec::new();
    if coords.is_empty() || cells.is_empty() {
        return pairs;
    }
    let p = cells[0].lo.len();
    for a in cells {
        for b in cells {
            if a.leaf == b.leaf {
                continue;
            }
            for &i in coords {
                if b.lo[i] < a.hi[i] {
                    continue; // b not entirely above a in coordinate i
                }
                let overlap_elsewhere = (0..p)
                    .filter(|&j| j != i)
                    .all(|j| a.lo[j].max(b.lo[j]) < a.hi[j].min(b.hi[j]));
                if overlap_elsewhere {
                    pairs.push(AbovePair {
                        lower: a.leaf,
                        upper: b.leaf,
                        coord: i,
                    });
                }
            }
        }
    }
    pairs
}

/// Truncation interval for `leaf` given the other leaves' current values:
/// max over dominated neighbors below, min over dominating neighbors above.
pub fn constraint_bounds<F: Real>(
    pairs: &[AbovePair],
    leaf: usize,
    values: &[F],
) -> ConstraintBounds<F> {
    constraint_bounds_excluding(pairs, leaf, values, usize::MAX)
}

/// Same as [`constraint_bounds`] but ignoring every pair that touches `skip`
/// (used while a freshly proposed sibling has no value yet).
pub fn constraint_bounds_excluding<F: Real>(
    pairs: &[AbovePair],
    leaf: usize,
    values: &[F],
    skip: usize,
) -> ConstraintBounds<F> {
    let mut lower = F::neg_infinity();
    let mut upper = F::infinity();
    for pair in pairs {
        if pair.lower == skip || pair.upper == skip {
            continue;
        }
        if pair.upper == leaf {
            lower = lower.max(values[pair.lower]);
        } else if pair.lower == leaf {
            upper = upper.min(values[pair.upper]);
        }
    }
    ConstraintBounds { lower, upper }
}
