//! Rooted leaf-labeled trees indexing moduli strata: ordered (disc), unordered
//! (aligned framings), two-colored (discs with interior points), and flavoured
//! variants; stability, dimension formulas, weight propagation and the
//! codimension-1 boundary combinatorics.

use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum TreeKind {
    Unordered,
    Ordered,
    TwoColored,
}

/// `Vertex.solid` are planar-ordered children reached by solid edges,
/// `Vertex.dashed` the canonically sorted children reached by dashed edges.
/// Plain (ordered/unordered) trees use only `solid`. Inside a dashed subtree
/// every vertex has only `dashed` children.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Node {
    Leaf(usize),
    Vertex { solid: Vec<Node>, dashed: Vec<Node> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub kind: TreeKind,
    pub leaves: usize,
    /// Number of solid leaves for two-colored trees (labels 1..=solid_leaves);
    /// dashed leaves carry labels solid_leaves+1..=leaves.
    pub solid_leaves: usize,
    pub root: Node,
}

/// A flavour map p: F → {1..d} with an optional distribution of F over the
/// internal vertices (preorder indexing).
#[derive(Debug, Clone, PartialEq)]
pub struct Flavouring {
    pub targets: Vec<usize>,
    pub partition: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("flavour partition violates (*): flavour {0} sits at a vertex off the root path to leaf {1}")]
    StarViolation(usize, usize),
    #[error("partition has {0} blocks but the tree has {1} vertices")]
    PartitionShape(usize, usize),
    #[error("partition blocks are not a disjoint cover of the flavour set")]
    PartitionCover,
    #[error("tree is not stable at vertex {0}")]
    Unstable(usize),
    #[error("weight equation violated: root {0} != leaf sum {1} + |F| {2}")]
    WeightEquation(i64, i64, i64),
    #[error("flavour constraint violated at leaf {0}: both p and q hit it")]
    FlavourConstraint(usize),
    #[error("flavour {0} with p-target in S+ must be assigned to the upper vertex")]
    BadPlusAssignment(usize),
    #[error("labels {0:?} do not form a valid split of 1..{1}")]
    BadSplit(Vec<usize>, usize),
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf(_))
    }

    pub fn min_leaf(&self) -> usize {
        match self {
            Node::Leaf(l) => *l,
            Node::Vertex { solid, dashed } => solid
                .iter()
                .chain(dashed)
                .map(Node::min_leaf)
                .min()
                .expect("vertex with no children"),
        }
    }

    pub fn leaf_set(&self) -> BTreeSet<usize> {
        match self {
            Node::Leaf(l) => BTreeSet::from([*l]),
            Node::Vertex { solid, dashed } => solid
                .iter()
                .chain(dashed)
                .flat_map(Node::leaf_set)
                .collect(),
        }
    }

    fn count_vertices(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Vertex { solid, dashed } => {
                1 + solid
                    .iter()
                    .chain(dashed)
                    .map(Node::count_vertices)
                    .sum::<usize>()
            }
        }
    }

    fn count_internal_edges(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Vertex { solid, dashed } => solid
                .iter()
                .chain(dashed)
                .map(|c| {
                    if c.is_leaf() {
                        0
                    } else {
                        1 + c.count_internal_edges()
                    }
                })
                .sum(),
        }
    }
}

/// Per-vertex data gathered in preorder.
#[derive(Debug, Clone)]
pub struct VertexInfo {
    pub preorder: usize,
    pub parent: Option<usize>,
    /// Child edge counts by color (leaves included).
    pub solid_out: usize,
    pub dashed_out: usize,
    /// Incoming edge dashed?
    pub dashed_in: bool,
    /// Leaf labels below this vertex.
    pub leaves_below: BTreeSet<usize>,
    /// Labels of children that are leaves.
    pub leaf_children: Vec<usize>,
}

impl Tree {
    pub fn plain(kind: TreeKind, leaves: usize, root: Node) -> Self {
        Tree {
            kind,
            leaves,
            solid_leaves: leaves,
            root,
        }
    }

    pub fn two_colored(solid_leaves: usize, dashed_leaves: usize, root: Node) -> Self {
        Tree {
            kind: TreeKind::TwoColored,
            leaves: solid_leaves + dashed_leaves,
            solid_leaves,
            root,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.root.count_vertices()
    }

    pub fn internal_edges(&self) -> usize {
        self.root.count_internal_edges()
    }

    pub fn vertices(&self) -> Vec<VertexInfo> {
        let mut out = Vec::new();
        fn walk(n: &Node, parent: Option<usize>, dashed_in: bool, out: &mut Vec<VertexInfo>) {
            if let Node::Vertex { solid, dashed } = n {
                let preorder = out.len();
                let leaf_children: Vec<usize> = solid
                    .iter()
                    .chain(dashed)
                    .filter_map(|c| {
                        if let Node::Leaf(l) = c {
                            Some(*l)
                        } else {
                            None
                        }
                    })
                    .collect();
                out.push(VertexInfo {
                    preorder,
                    parent,
                    solid_out: solid.len(),
                    dashed_out: dashed.len(),
                    dashed_in,
                    leaves_below: n.leaf_set(),
                    leaf_children,
                });
                for c in solid {
                    walk(c, Some(preorder), false, out);
                }
                for c in dashed {
                    walk(c, Some(preorder), true, out);
                }
            }
        }
        walk(&self.root, None, false, &mut out);
        out
    }

    /// |V(T)| = |iE(T)| + 1.
    pub fn euler_ok(&self) -> bool {
        self.vertex_count() == self.internal_edges() + 1
    }
}

fn sort_canonical(children: &mut [Node]) {
    children.sort_by_key(|c| c.min_leaf());
}

// ---------------------------------------------------------------------------
// stability
// ---------------------------------------------------------------------------

/// Check the flavour partition against condition (*) and return per-vertex
/// flavour counts (preorder order).
fn flavour_counts(tree: &Tree, fl: &Flavouring) -> Result<Vec<usize>, TreeError> {
    let vs = tree.vertices();
    let nf = fl.targets.len();
    match &fl.partition {
        None => {
            // all flavours at the root keeps (*) satisfiable only through the
            // root; with no partition the stability question uses |F_v| = |F|
            // at the root and 0 elsewhere.
            let mut counts = vec![0; vs.len()];
            if !vs.is_empty() {
                counts[0] = nf;
            }
            Ok(counts)
        }
        Some(blocks) => {
            if blocks.len() != vs.len() {
                return Err(TreeError::PartitionShape(blocks.len(), vs.len()));
            }
            let mut seen = vec![false; nf];
            for (v, block) in vs.iter().zip(blocks) {
                for &f in block {
                    if f >= nf || seen[f] {
                        return Err(TreeError::PartitionCover);
                    }
                    seen[f] = true;
                    let leaf = fl.targets[f];
                    if !v.leaves_below.contains(&leaf) {
                        return Err(TreeError::StarViolation(f, leaf));
                    }
                }
            }
            if seen.iter().any(|s| !s) {
                return Err(TreeError::PartitionCover);
            }
            Ok(blocks.iter().map(Vec::len).collect())
        }
    }
}

/// Stability. Plain kinds: every vertex has ≥ 2 outgoing edges. Flavoured
/// aligned kind: 2·d_v + |F_v| ≥ 3. Two-colored: solid vertices need
/// 2·d_v + k_v ≥ 2, dashed vertices d_v ≥ 2.
pub fn is_stable(tree: &Tree, flavour: Option<&Flavouring>) -> Result<bool, TreeError> {
    let vs = tree.vertices();
    match (tree.kind, flavour) {
        (TreeKind::Ordered, _) | (TreeKind::Unordered, None) => {
            Ok(vs.iter().all(|v| v.solid_out + v.dashed_out >= 2))
        }
        (TreeKind::Unordered, Some(fl)) => {
            let counts = flavour_counts(tree, fl)?;
            Ok(vs
                .iter()
                .zip(&counts)
                .all(|(v, &f)| 2 * (v.solid_out + v.dashed_out) + f >= 3))
        }
        (TreeKind::TwoColored, _) => Ok(vs.iter().all(|v| {
            if v.dashed_in {
                v.dashed_out >= 2
            } else {
                2 * v.dashed_out + v.solid_out >= 2
            }
        })),
    }
}

/// The four displayed dimension formulas.
pub fn stratum_dimension(tree: &Tree, flavour: Option<&Flavouring>) -> Result<i64, TreeError> {
    if !is_stable(tree, flavour)? {
        return Err(TreeError::Unstable(0));
    }
    let ie = tree.internal_edges() as i64;
    Ok(match (tree.kind, flavour) {
        (TreeKind::Ordered, _) => tree.leaves as i64 - 2 - ie,
        (TreeKind::Unordered, None) => 2 * tree.leaves as i64 - 3 - ie,
        (TreeKind::Unordered, Some(fl)) => {
            2 * tree.leaves as i64 + fl.targets.len() as i64 - 3 - ie
        }
        (TreeKind::TwoColored, _) => {
            let d = (tree.leaves - tree.solid_leaves) as i64;
            2 * d + tree.solid_leaves as i64 - 2 - ie
        }
    })
}

// ---------------------------------------------------------------------------
// enumeration
// ---------------------------------------------------------------------------

/// Stable ordered trees on the interval labels lo..lo+len.
fn ordered_on(lo: usize, len: usize) -> Vec<Node> {
    // trees whose root is a vertex covering the interval
    let mut out = Vec::new();
    if len < 2 {
        return out;
    }
    for parts in compositions(len, 2) {
        let mut choices: Vec<Vec<Node>> = Vec::new();
        let mut at = lo;
        for p in &parts {
            let mut opts = Vec::new();
            if *p == 1 {
                opts.push(Node::Leaf(at));
            }
            opts.extend(ordered_on(at, *p));
            choices.push(opts);
            at += p;
        }
        product_into(&choices, &mut |children| {
            out.push(Node::Vertex {
                solid: children.to_vec(),
                dashed: vec![],
            });
        });
    }
    out
}

/// Compositions of n into m ≥ min_parts positive parts, all m.
fn compositions(n: usize, min_parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for m in min_parts..=n {
        comp_rec(n, m, &mut Vec::new(), &mut out);
    }
    out
}

fn comp_rec(n: usize, m: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if m == 1 {
        if n >= 1 {
            acc.push(n);
            out.push(acc.clone());
            acc.pop();
        }
        return;
    }
    for first in 1..=n.saturating_sub(m - 1) {
        acc.push(first);
        comp_rec(n - first, m - 1, acc, out);
        acc.pop();
    }
}

fn product_into(choices: &[Vec<Node>], f: &mut impl FnMut(&[Node])) {
    fn rec(choices: &[Vec<Node>], acc: &mut Vec<Node>, f: &mut impl FnMut(&[Node])) {
        if choices.is_empty() {
            f(acc);
            return;
        }
        for c in &choices[0] {
            acc.push(c.clone());
            rec(&choices[1..], acc, f);
            acc.pop();
        }
    }
    rec(choices, &mut Vec::new(), f);
}

/// Set partitions of `items` into at least `min_blocks` blocks.
fn set_partitions(items: &[usize], min_blocks: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    fn rec(rest: &[usize], blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        match rest.split_first() {
            None => out.push(blocks.clone()),
            Some((&x, tail)) => {
                for i in 0..blocks.len() {
                    blocks[i].push(x);
                    rec(tail, blocks, out);
                    blocks[i].pop();
                }
                blocks.push(vec![x]);
                rec(tail, blocks, out);
                blocks.pop();
            }
        }
    }
    rec(items, &mut Vec::new(), &mut out);
    out.retain(|b| b.len() >= min_blocks);
    out
}

/// Stable unordered trees on the given leaf set (canonical child order).
fn unordered_on(labels: &[usize]) -> Vec<Node> {
    let mut out = Vec::new();
    if labels.len() < 2 {
        return out;
    }
    for blocks in set_partitions(labels, 2) {
        let mut choices: Vec<Vec<Node>> = Vec::new();
        for b in &blocks {
            let mut opts = Vec::new();
            if b.len() == 1 {
                opts.push(Node::Leaf(b[0]));
            }
            opts.extend(unordered_on(b));
            choices.push(opts);
        }
        product_into(&choices, &mut |children| {
            let mut cs = children.to_vec();
            sort_canonical(&mut cs);
            out.push(Node::Vertex {
                solid: cs,
                dashed: vec![],
            });
        });
    }
    dedup_nodes(&mut out);
    out
}

fn dedup_nodes(nodes: &mut Vec<Node>) {
    nodes.dedup();
    nodes.sort();
    nodes.dedup();
}

fn to_dashed(n: &Node) -> Node {
    match n {
        Node::Leaf(l) => Node::Leaf(*l),
        Node::Vertex { solid, dashed } => {
            let mut children: Vec<Node> = solid.iter().chain(dashed).map(to_dashed).collect();
            sort_canonical(&mut children);
            Node::Vertex {
                solid: vec![],
                dashed: children,
            }
        }
    }
}

/// Two-colored trees: solid root, `kls` consecutive solid labels 1..=k,
/// dashed labels k+1..=k+d distributed anywhere below.
fn two_colored_on(dlabels: &[usize], klo: usize, klen: usize) -> Vec<Node> {
    let mut out = Vec::new();
    // number of solid children and their (possibly empty) intervals; every
    // child consumes at least one solid or dashed label
    for msolid in 0..=klen + dlabels.len() {
        // interval split with empty parts allowed: choose sizes
        for sizes in weak_compositions(klen, msolid) {
            // distribute dashed labels: to root blocks or to solid children
            for assign in assignments(dlabels, msolid + 1) {
                // assign[0] = root's own dashed set; assign[1..] per solid child
                let root_dash = &assign[0];
                // a root with no dashed children needs two solid ones; pruning
                // here also keeps the recursion content strictly decreasing
                if root_dash.is_empty() && msolid < 2 {
                    continue;
                }
                // every solid child needs content; check before recursing
                if sizes
                    .iter()
                    .enumerate()
                    .any(|(ci, &sz)| sz == 0 && assign[ci + 1].is_empty())
                {
                    continue;
                }
                // each solid child: interval + dashed subset; leaf only if
                // single label and no dashed content
                let mut choices: Vec<Vec<Node>> = Vec::new();
                let mut at = klo;
                let mut degenerate = false;
                for (ci, &sz) in sizes.iter().enumerate() {
                    let dsub = &assign[ci + 1];
                    let mut opts = Vec::new();
                    if sz == 1 && dsub.is_empty() {
                        opts.push(Node::Leaf(at));
                    }
                    opts.extend(two_colored_on(dsub, at, sz));
                    if opts.is_empty() {
                        degenerate = true;
                        break;
                    }
                    choices.push(opts);
                    at += sz;
                }
                if degenerate {
                    continue;
                }
                // root dashed children: partitions of root_dash into blocks
                let dash_opt: Vec<Vec<Node>> = if root_dash.is_empty() {
                    vec![vec![]]
                } else {
                    let mut all = Vec::new();
                    for blocks in set_partitions(root_dash, 1) {
                        let mut bchoices: Vec<Vec<Node>> = Vec::new();
                        for b in &blocks {
                            let mut opts = Vec::new();
                            if b.len() == 1 {
                                opts.push(Node::Leaf(b[0]));
                            }
                            opts.extend(unordered_on(b).iter().map(to_dashed));
                            bchoices.push(opts);
                        }
                        product_into(&bchoices, &mut |cs| {
                            let mut v = cs.to_vec();
                            sort_canonical(&mut v);
                            all.push(v);
                        });
                    }
                    all.sort();
                    all.dedup();
                    all
                };
                for dash_children in &dash_opt {
                    // root stability: 2 d_v + k_v >= 2
                    if 2 * dash_children.len() + msolid < 2 {
                        continue;
                    }
                    product_into(&choices, &mut |solid_children| {
                        out.push(Node::Vertex {
                            solid: solid_children.to_vec(),
                            dashed: dash_children.clone(),
                        });
                    });
                }
            }
        }
    }
    dedup_nodes(&mut out);
    out
}

/// Weak compositions of n into exactly m parts (parts may be 0).
fn weak_compositions(n: usize, m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    fn rec(n: usize, m: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if m == 1 {
            acc.push(n);
            out.push(acc.clone());
            acc.pop();
            return;
        }
        for first in 0..=n {
            acc.push(first);
            rec(n - first, m - 1, acc, out);
            acc.pop();
        }
    }
    rec(n, m, &mut Vec::new(), &mut out);
    out
}

/// All ways of distributing `items` over `slots` (ordered slots, items keep identity).
fn assignments(items: &[usize], slots: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    fn rec(items: &[usize], acc: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        match items.split_first() {
            None => out.push(acc.clone()),
            Some((&x, rest)) => {
                for i in 0..acc.len() {
                    acc[i].push(x);
                    rec(rest, acc, out);
                    acc[i].pop();
                }
            }
        }
    }
    let mut acc = vec![Vec::new(); slots];
    rec(items, &mut acc, &mut out);
    out
}

/// Complete duplicate-free list of stable trees of the given kind; for
/// TwoColored `leaves` is the number of dashed (interior) leaves and
/// `solid_leaves` must be supplied via [`enumerate_two_colored`].
pub fn enumerate_stable_trees(
    kind: TreeKind,
    leaves: usize,
    max_internal_edges: Option<usize>,
) -> Vec<Tree> {
    let mut trees: Vec<Tree> = match kind {
        TreeKind::Ordered => ordered_on(1, leaves)
            .into_iter()
            .map(|root| Tree::plain(kind, leaves, root))
            .collect(),
        TreeKind::Unordered => {
            let labels: Vec<usize> = (1..=leaves).collect();
            unordered_on(&labels)
                .into_iter()
                .map(|root| Tree::plain(kind, leaves, root))
                .collect()
        }
        TreeKind::TwoColored => panic!("use enumerate_two_colored for the two-colored kind"),
    };
    if let Some(cap) = max_internal_edges {
        trees.retain(|t| t.internal_edges() <= cap);
    }
    trees
}

pub fn enumerate_two_colored(
    dashed_leaves: usize,
    solid_leaves: usize,
    max_internal_edges: Option<usize>,
) -> Vec<Tree> {
    let dlabels: Vec<usize> = (solid_leaves + 1..=solid_leaves + dashed_leaves).collect();
    let mut trees: Vec<Tree> = two_colored_on(&dlabels, 1, solid_leaves)
        .into_iter()
        .map(|root| Tree::two_colored(solid_leaves, dashed_leaves, root))
        .collect();
    if let Some(cap) = max_internal_edges {
        trees.retain(|t| t.internal_edges() <= cap);
    }
    trees
}

/// Flavoured aligned pairs (T, F-partition), T any d-leafed tree (unary
/// vertices allowed when flavours stabilize them), pair-stable.
pub fn enumerate_flavoured(
    leaves: usize,
    targets: &[usize],
    max_internal_edges: Option<usize>,
) -> Vec<(Tree, Flavouring)> {
    let labels: Vec<usize> = (1..=leaves).collect();
    let budget = targets.len();
    let shapes = flavoured_shapes(&labels, budget);
    let mut out = Vec::new();
    for root in shapes {
        let tree = Tree::plain(TreeKind::Unordered, leaves, root);
        if let Some(cap) = max_internal_edges {
            if tree.internal_edges() > cap {
                continue;
            }
        }
        let vs = tree.vertices();
        // all placements of each flavour on the root path to its leaf
        let mut per_flavour: Vec<Vec<usize>> = Vec::new();
        for &leaf in targets {
            let allowed: Vec<usize> = vs
                .iter()
                .filter(|v| v.leaves_below.contains(&leaf))
                .map(|v| v.preorder)
                .collect();
            per_flavour.push(allowed);
        }
        let mut idx = vec![0usize; targets.len()];
        loop {
            let mut blocks = vec![Vec::new(); vs.len()];
            for (f, &choice) in idx.iter().enumerate() {
                blocks[per_flavour[f][choice]].push(f);
            }
            let fl = Flavouring {
                targets: targets.to_vec(),
                partition: Some(blocks),
            };
            if is_stable(&tree, Some(&fl)).unwrap_or(false) {
                out.push((tree.clone(), fl));
            }
            // odometer
            let mut k = targets.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < per_flavour[k].len() {
                    break;
                }
                idx[k] = 0;
                if k == 0 {
                    break;
                }
            }
            if idx.iter().all(|&v| v == 0) {
                break;
            }
            if targets.is_empty() {
                break;
            }
        }
        if targets.is_empty() {
            // single empty placement was already pushed above
        }
    }
    out
}

/// Tree shapes on a leaf set where a vertex may have one child only while
/// flavour budget remains (each such vertex consumes at least one flavour).
fn flavoured_shapes(labels: &[usize], budget: usize) -> Vec<Node> {
    let mut out = Vec::new();
    // vertex with m >= 2 children
    for blocks in set_partitions(labels, 2) {
        let mut choices: Vec<Vec<Node>> = Vec::new();
        for b in &blocks {
            let mut opts = Vec::new();
            if b.len() == 1 {
                opts.push(Node::Leaf(b[0]));
            }
            opts.extend(flavoured_shapes(b, budget.saturating_sub(0)));
            choices.push(opts);
        }
        product_into(&choices, &mut |children| {
            let mut cs = children.to_vec();
            sort_canonical(&mut cs);
            out.push(Node::Vertex {
                solid: cs,
                dashed: vec![],
            });
        });
    }
    // unary vertex (needs a flavour to stabilize)
    if budget >= 1 {
        let mut child_opts = Vec::new();
        if labels.len() == 1 {
            child_opts.push(Node::Leaf(labels[0]));
        }
        child_opts.extend(flavoured_shapes(labels, budget - 1));
        for c in child_opts {
            out.push(Node::Vertex {
                solid: vec![c],
                dashed: vec![],
            });
        }
    }
    dedup_nodes(&mut out);
    out
}

// ---------------------------------------------------------------------------
// weights
// ---------------------------------------------------------------------------

/// Weighted tree: edge weights keyed by the child vertex's preorder index.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedTree {
    pub tree: Tree,
    pub flavour: Flavouring,
    pub root_weight: i64,
    pub leaf_weights: Vec<i64>,
    pub internal_edge_weights: Vec<(usize, i64)>,
}

/// Unique internal-edge weights satisfying n₀ = Σ nᵢ + |F_v| at every vertex.
pub fn propagate_weights(
    tree: &Tree,
    flavour: &Flavouring,
    root_weight: i64,
    leaf_weights: &[i64],
) -> Result<WeightedTree, TreeError> {
    let counts = flavour_counts(tree, flavour)?;
    let leaf_sum: i64 = leaf_weights.iter().sum();
    let nf = flavour.targets.len() as i64;
    if root_weight != leaf_sum + nf {
        return Err(TreeError::WeightEquation(root_weight, leaf_sum, nf));
    }
    // weight of the edge into a subtree = leaf weights below + flavours below
    let vs = tree.vertices();
    let in_subtree = |root: usize, mut w: usize| -> bool {
        loop {
            if w == root {
                return true;
            }
            match vs[w].parent {
                Some(p) => w = p,
                None => return false,
            }
        }
    };
    let mut edge_weights = Vec::new();
    for v in vs.iter().skip(1) {
        let below: i64 = v.leaves_below.iter().map(|&l| leaf_weights[l - 1]).sum();
        let fbelow: i64 = vs
            .iter()
            .filter(|w| in_subtree(v.preorder, w.preorder))
            .map(|w| counts[w.preorder] as i64)
            .sum();
        edge_weights.push((v.preorder, below + fbelow));
    }
    let wt = WeightedTree {
        tree: tree.clone(),
        flavour: flavour.clone(),
        root_weight,
        leaf_weights: leaf_weights.to_vec(),
        internal_edge_weights: edge_weights,
    };
    debug_assert!(verify_weight_equations(&wt, &counts));
    Ok(wt)
}

/// Re-verify the vertex equation post hoc (used by tests too).
pub fn verify_weight_equations(wt: &WeightedTree, counts: &[usize]) -> bool {
    let vs = wt.tree.vertices();
    let incoming = |v: &VertexInfo| -> i64 {
        if v.preorder == 0 {
            wt.root_weight
        } else {
            wt.internal_edge_weights
                .iter()
                .find(|(p, _)| *p == v.preorder)
                .map(|(_, w)| *w)
                .unwrap()
        }
    };
    for v in &vs {
        let direct_leaves: i64 = v
            .leaf_children
            .iter()
            .map(|&l| wt.leaf_weights[l - 1])
            .sum();
        let child_sum: i64 = vs
            .iter()
            .filter(|w| w.parent == Some(v.preorder))
            .map(incoming)
            .sum();
        if incoming(v) != direct_leaves + child_sum + counts[v.preorder] as i64 {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// codimension-1 splits and flavour splitting
// ---------------------------------------------------------------------------

/// All ordered pairs (S₊, S₋) of disjoint complementary subsets of {1..d}
/// with |S₋| ≥ 1, sorted.
pub fn codim1_splits(d: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for mask in 1u64..(1 << d) {
        let s_minus: Vec<usize> = (1..=d).filter(|&i| mask >> (i - 1) & 1 == 1).collect();
        let s_plus: Vec<usize> = (1..=d).filter(|&i| mask >> (i - 1) & 1 == 0).collect();
        out.push((s_plus, s_minus));
    }
    out.sort();
    out
}

/// d!/(d₋!·(d₊−1)!) for d₊ + d₋ = d + 1.
pub fn codim1_count(d: usize, d_minus: usize) -> u64 {
    let d_plus = d + 1 - d_minus;
    let fact = |n: usize| (1..=n as u64).product::<u64>();
    fact(d) / (fact(d_minus) * fact(d_plus - 1))
}

/// Where an element of G₋ came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GMinusOrigin {
    FromF(usize),
    FromG(usize),
}

/// Target of q₊: the internal edge or a leaf of S₊.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlusTarget {
    Edge,
    Leaf(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitFlavours {
    pub q_plus: Vec<PlusTarget>,
    pub g_minus: Vec<(GMinusOrigin, usize)>,
}

/// Break q into flavours q₊ and q₋ for the two-vertex boundary tree with the
/// given split; `f_plus[i]` marks p-flavours assigned to the upper vertex.
pub fn split_flavour_q(
    q_targets: &[usize],
    p_targets: &[usize],
    split: (&[usize], &[usize]),
    f_plus: &[bool],
) -> Result<SplitFlavours, TreeError> {
    let (s_plus, s_minus) = split;
    let d = s_plus.len() + s_minus.len();
    // split validity
    let mut all: Vec<usize> = s_plus.iter().chain(s_minus).copied().collect();
    all.sort_unstable();
    if all != (1..=d).collect::<Vec<_>>() || s_minus.is_empty() {
        return Err(TreeError::BadSplit(all, d));
    }
    // flavour constraint: |p⁻¹(j)|·|q⁻¹(j)| = 0
    for j in 1..=d {
        let pj = p_targets.iter().filter(|&&t| t == j).count();
        let qj = q_targets.iter().filter(|&&t| t == j).count();
        if pj * qj != 0 {
            return Err(TreeError::FlavourConstraint(j));
        }
    }
    if f_plus.len() != p_targets.len() {
        return Err(TreeError::PartitionCover);
    }
    // p-flavours with target in S₊ must be at the upper vertex (condition (*))
    for (f, (&t, &up)) in p_targets.iter().zip(f_plus).enumerate() {
        if s_plus.contains(&t) && !up {
            return Err(TreeError::BadPlusAssignment(f));
        }
    }
    let q_plus: Vec<PlusTarget> = q_targets
        .iter()
        .map(|&t| {
            if s_minus.contains(&t) {
                PlusTarget::Edge
            } else {
                PlusTarget::Leaf(t)
            }
        })
        .collect();
    // G₋ = p₊⁻¹(e) ⊔ q₊⁻¹(e), with q₋ reading off the original targets
    let mut g_minus = Vec::new();
    for (f, (&t, &up)) in p_targets.iter().zip(f_plus).enumerate() {
        if up && s_minus.contains(&t) {
            g_minus.push((GMinusOrigin::FromF(f), t));
        }
    }
    for (g, tgt) in q_plus.iter().enumerate() {
        if *tgt == PlusTarget::Edge {
            g_minus.push((GMinusOrigin::FromG(g), q_targets[g]));
        }
    }
    Ok(SplitFlavours { q_plus, g_minus })
}

// ---------------------------------------------------------------------------
// symmetry groups
// ---------------------------------------------------------------------------

use crate::perm::Permutation;

/// π ∈ Sym(𝐩): p ∘ π = p.
pub fn is_sym_p(pi: &Permutation, p_targets: &[usize]) -> bool {
    pi.degree() == p_targets.len()
        && (0..p_targets.len()).all(|f| p_targets[pi.apply(f)] == p_targets[f])
}

/// (σ, π) ∈ Sym(d, 𝐩): p(π(f)) = σ(p(f)).
pub fn is_sym_d_p(sigma: &Permutation, pi: &Permutation, p_targets: &[usize]) -> bool {
    pi.degree() == p_targets.len()
        && (0..p_targets.len()).all(|f| p_targets[pi.apply(f)] == sigma.apply(p_targets[f] - 1) + 1)
}

/// (σ, π) ∈ Sym(d, k, 𝐩) ⊆ Sym(k+d, 𝐩) with σ identity on {1..k}.
pub fn is_sym_d_k_p(sigma: &Permutation, pi: &Permutation, p_targets: &[usize], k: usize) -> bool {
    (0..k.min(sigma.degree())).all(|i| sigma.apply(i) == i) && is_sym_d_p(sigma, pi, p_targets)
}

/// Sign of the Sym-action on orientations: the signature of π.
pub fn sym_action_sign(pi: &Permutation) -> i8 {
    pi.signature()
}

// ---------------------------------------------------------------------------
// textual form
// ---------------------------------------------------------------------------

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Leaf(l) => write!(f, "{l}"),
            Node::Vertex { solid, dashed } => {
                write!(f, "(")?;
                let mut first = true;
                for c in solid {
                    if !first {
                        write!(f, " ")?;
                    }
                    first = false;
                    write!(f, "{c}")?;
                }
                for c in dashed {
                    if !first {
                        write!(f, " ")?;
                    }
                    first = false;
                    write!(f, "~{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_counts_match_associahedron_faces() {
        // counts per k; k=2: 1, k=3: 3, k=4: 11 faces of K4
        assert_eq!(enumerate_stable_trees(TreeKind::Ordered, 2, None).len(), 1);
        assert_eq!(enumerate_stable_trees(TreeKind::Ordered, 3, None).len(), 3);
        assert_eq!(enumerate_stable_trees(TreeKind::Ordered, 4, None).len(), 11);
    }

    /// Independent oracle: faces of K_k = sets of pairwise non-crossing
    /// diagonals of a convex (k+1)-gon, graded by size.
    pub fn polygon_face_counts(k: usize) -> Vec<usize> {
        let n = k + 1; // polygon vertices 0..n
        let mut diagonals = Vec::new();
        for a in 0..n {
            for b in a + 2..n {
                if !(a == 0 && b == n - 1) {
                    diagonals.push((a, b));
                }
            }
        }
        let crossing = |x: (usize, usize), y: (usize, usize)| {
            let (a, b) = x;
            let (c, d) = y;
            (a < c && c < b && b < d) || (c < a && a < d && d < b)
        };
        let m = diagonals.len();
        let mut counts = vec![0usize; m + 1];
        for mask in 0u64..(1 << m) {
            let chosen: Vec<(usize, usize)> = (0..m)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| diagonals[i])
                .collect();
            let ok = chosen
                .iter()
                .enumerate()
                .all(|(i, &x)| chosen[i + 1..].iter().all(|&y| !crossing(x, y)));
            if ok {
                counts[chosen.len()] += 1;
            }
        }
        counts
    }

    #[test]
    fn ordered_counts_per_codim_match_polygon_subdivisions() {
        for k in 2..=6 {
            let trees = enumerate_stable_trees(TreeKind::Ordered, k, None);
            let oracle = polygon_face_counts(k);
            let max_ie = trees.iter().map(Tree::internal_edges).max().unwrap_or(0);
            for ie in 0..=max_ie {
                let got = trees.iter().filter(|t| t.internal_edges() == ie).count();
                assert_eq!(got, oracle[ie], "k={k} ie={ie}");
            }
        }
    }

    #[test]
    fn unordered_codim1_counts_match_formula() {
        for d in 2..=6 {
            let trees = enumerate_stable_trees(TreeKind::Unordered, d, Some(1));
            for d_minus in 2..=d.saturating_sub(1) {
                let d_plus = d + 1 - d_minus;
                let got = trees
                    .iter()
                    .filter(|t| t.internal_edges() == 1)
                    .filter(|t| {
                        let vs = t.vertices();
                        vs.len() == 2 && vs[1].solid_out == d_minus && vs[0].solid_out == d_plus
                    })
                    .count() as u64;
                assert_eq!(got, codim1_count(d, d_minus), "d={d} d-={d_minus}");
            }
        }
        // the worked value for d = 3
        assert_eq!(codim1_count(3, 2), 3);
    }

    #[test]
    fn split_sum_matches_two_vertex_tree_count() {
        for d in 3..=6 {
            let stable_two_vertex = enumerate_stable_trees(TreeKind::Unordered, d, Some(1))
                .into_iter()
                .filter(|t| t.internal_edges() == 1)
                .count() as u64;
            let total: u64 = (2..=d - 1).map(|dm| codim1_count(d, dm)).sum();
            assert_eq!(total, stable_two_vertex, "d={d}");
        }
    }

    #[test]
    fn stability_examples() {
        // aligned corolla with 2 leaves
        let t = Tree::plain(
            TreeKind::Unordered,
            2,
            Node::Vertex {
                solid: vec![Node::Leaf(1), Node::Leaf(2)],
                dashed: vec![],
            },
        );
        let fl = Flavouring {
            targets: vec![],
            partition: None,
        };
        assert!(is_stable(&t, Some(&fl)).unwrap());
        // single vertex, 1 leaf, one flavour: 2*1 + 1 = 3
        let t1 = Tree::plain(
            TreeKind::Unordered,
            1,
            Node::Vertex {
                solid: vec![Node::Leaf(1)],
                dashed: vec![],
            },
        );
        let fl1 = Flavouring {
            targets: vec![1],
            partition: Some(vec![vec![0]]),
        };
        assert!(is_stable(&t1, Some(&fl1)).unwrap());
        assert!(!is_stable(
            &t1,
            Some(&Flavouring {
                targets: vec![],
                partition: None
            })
        )
        .unwrap());
        // ordered tree with a unary internal vertex
        let bad = Tree::plain(
            TreeKind::Ordered,
            2,
            Node::Vertex {
                solid: vec![
                    Node::Leaf(1),
                    Node::Vertex {
                        solid: vec![Node::Leaf(2)],
                        dashed: vec![],
                    },
                ],
                dashed: vec![],
            },
        );
        assert!(!is_stable(&bad, None).unwrap());
    }

    #[test]
    fn dimension_examples() {
        let corolla2 = Tree::plain(
            TreeKind::Unordered,
            2,
            Node::Vertex {
                solid: vec![Node::Leaf(1), Node::Leaf(2)],
                dashed: vec![],
            },
        );
        assert_eq!(stratum_dimension(&corolla2, None).unwrap(), 1);
        let corolla3 = Tree::plain(
            TreeKind::Ordered,
            3,
            Node::Vertex {
                solid: vec![Node::Leaf(1), Node::Leaf(2), Node::Leaf(3)],
                dashed: vec![],
            },
        );
        assert_eq!(stratum_dimension(&corolla3, None).unwrap(), 1);
        let t1 = Tree::plain(
            TreeKind::Unordered,
            1,
            Node::Vertex {
                solid: vec![Node::Leaf(1)],
                dashed: vec![],
            },
        );
        let fl1 = Flavouring {
            targets: vec![1],
            partition: Some(vec![vec![0]]),
        };
        assert_eq!(stratum_dimension(&t1, Some(&fl1)).unwrap(), 0);
    }

    #[test]
    fn two_colored_small_counts() {
        // (d,k) = (1,1): one top stratum + two codim-1
        let trees = enumerate_two_colored(1, 1, None);
        assert_eq!(trees.iter().filter(|t| t.internal_edges() == 0).count(), 1);
        assert_eq!(trees.iter().filter(|t| t.internal_edges() == 1).count(), 2);
        for t in &trees {
            assert!(is_stable(t, None).unwrap());
            assert!(t.euler_ok());
            let dim = stratum_dimension(t, None).unwrap();
            assert!(dim >= 0);
            assert_eq!(1 - dim, t.internal_edges() as i64);
        }
    }

    #[test]
    fn weight_propagation_examples() {
        // corolla d=2, |F|=1, leaves (1,1) -> root 3, no internal edges
        let t = Tree::plain(
            TreeKind::Unordered,
            2,
            Node::Vertex {
                solid: vec![Node::Leaf(1), Node::Leaf(2)],
                dashed: vec![],
            },
        );
        let fl = Flavouring {
            targets: vec![1],
            partition: Some(vec![vec![0]]),
        };
        let wt = propagate_weights(&t, &fl, 3, &[1, 1]).unwrap();
        assert!(wt.internal_edge_weights.is_empty());
        assert!(propagate_weights(&t, &fl, 4, &[1, 1]).is_err());

        // two-vertex tree: leaves 2,3 below the lower vertex with one flavour
        // at the lower vertex; leaf 1 at the root
        let t2 = Tree::plain(
            TreeKind::Unordered,
            3,
            Node::Vertex {
                solid: vec![
                    Node::Leaf(1),
                    Node::Vertex {
                        solid: vec![Node::Leaf(2), Node::Leaf(3)],
                        dashed: vec![],
                    },
                ],
                dashed: vec![],
            },
        );
        let fl2 = Flavouring {
            targets: vec![2],
            partition: Some(vec![vec![], vec![0]]),
        };
        let wt2 = propagate_weights(&t2, &fl2, 4, &[1, 1, 1]).unwrap();
        assert_eq!(wt2.internal_edge_weights, vec![(1, 3)]);
    }

    #[test]
    fn split_flavour_examples() {
        // G empty
        let r = split_flavour_q(&[], &[], (&[2], &[1]), &[]).unwrap();
        assert!(r.q_plus.is_empty() && r.g_minus.is_empty());
        // d=2, q(g1)=1, split S-={1}
        let r = split_flavour_q(&[1], &[], (&[2], &[1]), &[]).unwrap();
        assert_eq!(r.q_plus, vec![PlusTarget::Edge]);
        assert_eq!(r.g_minus, vec![(GMinusOrigin::FromG(0), 1)]);
        // q(g1)=2, split S-={1}: q+(g1)=2, G- = p+^{-1}(e)
        let r = split_flavour_q(&[2], &[1], (&[2], &[1]), &[true]).unwrap();
        assert_eq!(r.q_plus, vec![PlusTarget::Leaf(2)]);
        assert_eq!(r.g_minus, vec![(GMinusOrigin::FromF(0), 1)]);
        // composability |G-| = |p+^-1(e)| + |q+^-1(e)| by construction
        let pe = 1; // p-flavour 0 sits up with target in S-
        let qe = r.q_plus.iter().filter(|t| **t == PlusTarget::Edge).count();
        assert_eq!(r.g_minus.len(), pe + qe);
        // flavour constraint violation
        assert!(split_flavour_q(&[1], &[1], (&[2], &[1]), &[true]).is_err());
    }

    #[test]
    fn sym_group_membership_and_sign() {
        let id2 = Permutation::identity(2);
        let sw = Permutation::from_one_based(&[2, 1]).unwrap();
        // p sends both flavours to leaf 1: Sym(p) = S2 on F
        assert!(is_sym_p(&sw, &[1, 1]));
        assert!(!is_sym_p(&sw, &[1, 2]));
        assert_eq!(sym_action_sign(&sw), -1);
        assert_eq!(sym_action_sign(&id2), 1);
        let cyc = Permutation::from_one_based(&[2, 3, 1]).unwrap();
        assert_eq!(sym_action_sign(&cyc), 1);
        // (sigma, pi) in Sym(d,p): p(pi(f)) = sigma(p(f))
        let sigma = Permutation::from_one_based(&[2, 1]).unwrap();
        assert!(is_sym_d_p(&sigma, &sw, &[1, 2]));
        assert!(!is_sym_d_k_p(&sigma, &sw, &[1, 2], 1));
    }

    #[test]
    fn enumerated_strata_have_codim_equal_to_internal_edges() {
        for d in 2..=5 {
            let trees = enumerate_stable_trees(TreeKind::Unordered, d, None);
            let top = 2 * d as i64 - 3;
            for t in &trees {
                let dim = stratum_dimension(t, None).unwrap();
                assert!(dim >= 0);
                assert_eq!(top - dim, t.internal_edges() as i64);
                assert!(t.euler_ok());
            }
        }
    }

    #[test]
    fn flavoured_enumeration_small() {
        // d=1, |F|=1: the pair (1-leaf corolla-with-unary-root, F at root) is
        // the unique stable stratum and it is a point
        let pairs = enumerate_flavoured(1, &[1], None);
        assert!(!pairs.is_empty());
        for (t, fl) in &pairs {
            let dim = stratum_dimension(t, Some(fl)).unwrap();
            assert!(dim >= 0);
            let top = 2 * t.leaves as i64 + fl.targets.len() as i64 - 3;
            assert_eq!(top - dim, t.internal_edges() as i64);
        }
        let zero_dim: Vec<_> = pairs
            .iter()
            .filter(|(t, _)| t.internal_edges() == 0)
            .collect();
        assert_eq!(zero_dim.len(), 1);
        assert_eq!(
            stratum_dimension(&zero_dim[0].0, Some(&zero_dim[0].1)).unwrap(),
            0
        );
    }

    #[test]
    fn flavoured_strata_for_two_leaves_one_flavour() {
        // hand count: the top corolla, the full bubble ((1 2)) with the
        // flavour stabilizing the unary root, and ((1) 2) with the flavour
        // stabilizing the single-leaf vertex
        let pairs = enumerate_flavoured(2, &[1], None);
        assert_eq!(pairs.len(), 3);
        let mut dims: Vec<i64> =
            pairs.iter().map(|(t, f)| stratum_dimension(t, Some(f)).unwrap()).collect();
        dims.sort_unstable();
        assert_eq!(dims, vec![1, 1, 2]);
    }

    #[test]
    fn display_round_trip_shape() {
        let t = Tree::two_colored(
            2,
            1,
            Node::Vertex {
                solid: vec![Node::Leaf(1), Node::Leaf(2)],
                dashed: vec![Node::Leaf(3)],
            },
        );
        assert_eq!(t.root.to_string(), "(1 2 ~3)");
    }
}
