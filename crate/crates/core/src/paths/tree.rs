use std::collections::VecDeque;

use super::path::MarkedPath;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub id: usize,
    pub mark: f64,
    pub parent: Option<usize>,
    pub left: Option<usize>,
    pub right: Option<usize>,
}

/// Binary tree with `(id, mark)` labels, stored as an arena. Equality is
/// structural: arena order does not matter.
#[derive(Debug, Clone, Default)]
pub struct LabeledBinaryTree {
    nodes: Vec<TreeNode>,
    root: Option<usize>,
}

impl PartialEq for LabeledBinaryTree {
    fn eq(&self, other: &Self) -> bool {
        fn same(a: &LabeledBinaryTree, x: Option<usize>, b: &LabeledBinaryTree, y: Option<usize>) -> bool {
            match (x, y) {
                (None, None) => true,
                (Some(x), Some(y)) => {
                    let (p, q) = (&a.nodes[x], &b.nodes[y]);
                    p.id == q.id
                        && p.mark == q.mark
                        && same(a, p.left, b, q.left)
                        && same(a, p.right, b, q.right)
                }
                _ => false,
            }
        }
        same(self, self.root, other, other.root)
    }
}

impl LabeledBinaryTree {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_root(id: usize, mark: f64) -> Self {
        Self {
            nodes: vec![TreeNode {
                id,
                mark,
                parent: None,
                left: None,
                right: None,
            }],
            root: Some(0),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn node(&self, i: usize) -> &TreeNode {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn child(&self, i: usize, side: Side) -> Option<usize> {
        match side {
            Side::Left => self.nodes[i].left,
            Side::Right => self.nodes[i].right,
        }
    }

    /// Adds a node as the `side` child of `parent`, which must be free.
    pub fn attach(&mut self, parent: usize, side: Side, id: usize, mark: f64) -> Result<usize> {
        if parent >= self.nodes.len() {
            return Err(Error::malformed("parent not in tree"));
        }
        if self.child(parent, side).is_some() {
            return Err(Error::malformed("child slot already taken"));
        }
        let k = self.nodes.len();
        self.nodes.push(TreeNode {
            id,
            mark,
            parent: Some(parent),
            left: None,
            right: None,
        });
        match side {
            Side::Left => self.nodes[parent].left = Some(k),
            Side::Right => self.nodes[parent].right = Some(k),
        }
        Ok(k)
    }

    /// Checks links, reachability, distinct ids and that every child is
    /// younger than its parent.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        let Some(root) = self.root else {
            return if n == 0 {
                Ok(())
            } else {
                Err(Error::malformed("nodes without a root"))
            };
        };
        if root >= n || self.nodes[root].parent.is_some() {
            return Err(Error::malformed("bad root"));
        }
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            if u >= n || seen[u] {
                return Err(Error::malformed("tree links form a cycle or dangle"));
            }
            seen[u] = true;
            let node = &self.nodes[u];
            if !(node.mark > 0.0 && node.mark <= 1.0) {
                return Err(Error::malformed(format!("mark {} outside (0, 1]", node.mark)));
            }
            for c in [node.left, node.right].into_iter().flatten() {
                if c >= n || self.nodes[c].parent != Some(u) {
                    return Err(Error::malformed("inconsistent parent link"));
                }
                if !(self.nodes[c].mark > node.mark) {
                    return Err(Error::malformed(format!(
                        "child {} is not younger than its parent {}",
                        self.nodes[c].id, node.id
                    )));
                }
                stack.push(c);
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::malformed("unreachable nodes"));
        }
        let mut ids: Vec<usize> = self.nodes.iter().map(|x| x.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::malformed("duplicate node id"));
        }
        Ok(())
    }

    /// Nodes in symmetric order.
    pub fn in_order(&self) -> Vec<(usize, f64)> {
        fn walk(t: &LabeledBinaryTree, x: Option<usize>, out: &mut Vec<(usize, f64)>) {
            if let Some(x) = x {
                let n = &t.nodes[x];
                walk(t, n.left, out);
                out.push((n.id, n.mark));
                walk(t, n.right, out);
            }
        }
        let mut out = Vec::with_capacity(self.len());
        walk(self, self.root, &mut out);
        out
    }

    /// Unlabeled shape, e.g. `(()())` for a root with two leaves; `.` for the
    /// empty tree.
    pub fn shape_code(&self) -> String {
        fn walk(t: &LabeledBinaryTree, x: Option<usize>, out: &mut String) {
            match x {
                None => out.push('.'),
                Some(x) => {
                    out.push('(');
                    walk(t, t.nodes[x].left, out);
                    walk(t, t.nodes[x].right, out);
                    out.push(')');
                }
            }
        }
        let mut s = String::new();
        walk(self, self.root, &mut s);
        s
    }

    /// Branch directions from the root to node `i`.
    pub fn branch_string(&self, i: usize) -> String {
        let mut dirs = Vec::new();
        let mut cur = i;
        while let Some(p) = self.nodes[cur].parent {
            dirs.push(if self.nodes[p].left == Some(cur) { 'L' } else { 'R' });
            cur = p;
        }
        dirs.iter().rev().collect()
    }
}

/// One attachment in the path-to-tree construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AttachStep {
    pub id: usize,
    pub mark: f64,
    /// Branch directions from the root, empty for the root itself.
    pub branch: String,
}

/// Tree of the interior vertices of a path whose endpoints are its two
/// oldest vertices. Interior vertices are attached in order of age,
/// descending left when the path visits the new vertex before the current
/// node and right otherwise.
pub fn path_to_tree(path: &MarkedPath) -> Result<LabeledBinaryTree> {
    path_to_tree_trace(path).map(|x| x.0)
}

pub fn path_to_tree_trace(path: &MarkedPath) -> Result<(LabeledBinaryTree, Vec<AttachStep>)> {
    let n = path.len();
    if n < 2 {
        return Err(Error::pre("path needs two endpoints"));
    }
    let end_max = path.mark(0).max(path.mark(n - 1));
    if (1..n - 1).any(|i| path.mark(i) < end_max) {
        return Err(Error::pre(
            "skeleton has more than two vertices: an interior vertex is older than an endpoint",
        ));
    }
    let mut order: Vec<usize> = (1..n - 1).collect();
    order.sort_by(|&a, &b| path.mark(a).total_cmp(&path.mark(b)));
    let mut tree = LabeledBinaryTree::new();
    let mut pos = Vec::new(); // path position of each arena node
    let mut steps = Vec::new();
    for &i in &order {
        let (id, mark) = path.item(i);
        if tree.root.is_none() {
            tree = LabeledBinaryTree::with_root(id, mark);
            pos.push(i);
        } else {
            let mut cur = 0;
            loop {
                let side = if i < pos[cur] { Side::Left } else { Side::Right };
                match tree.child(cur, side) {
                    Some(c) => cur = c,
                    None => {
                        tree.attach(cur, side, id, mark)?;
                        pos.push(i);
                        break;
                    }
                }
            }
        }
        steps.push(AttachStep {
            id,
            mark,
            branch: tree.branch_string(tree.len() - 1),
        });
    }
    Ok((tree, steps))
}

/// One insertion in the tree-to-path construction: `id` placed between
/// `before` and `after`.
#[derive(Debug, Clone, PartialEq)]
pub struct InsertStep {
    pub id: usize,
    pub before: usize,
    pub after: usize,
}

/// Depth-first reconstruction: starting from `(x, y)`, each explored node
/// is inserted as a local maximum next to its parent, before it for a left
/// child and after it for a right child.
pub fn tree_to_path(
    tree: &LabeledBinaryTree,
    x: (usize, f64),
    y: (usize, f64),
) -> Result<MarkedPath> {
    tree_to_path_trace(tree, x, y).map(|r| r.0)
}

pub fn tree_to_path_trace(
    tree: &LabeledBinaryTree,
    x: (usize, f64),
    y: (usize, f64),
) -> Result<(MarkedPath, Vec<InsertStep>)> {
    tree.validate()?;
    let oldest_node = tree.nodes.iter().map(|n| n.mark).fold(f64::INFINITY, f64::min);
    if !(x.1.max(y.1) < oldest_node) {
        return Err(Error::pre("endpoints must be older than every tree node"));
    }
    if tree.nodes.iter().any(|n| n.id == x.0 || n.id == y.0) || x.0 == y.0 {
        return Err(Error::malformed("endpoint ids clash with tree ids"));
    }
    // linked list over slots: 0 = x, 1 = y, 2 + k = arena node k
    let n = tree.len();
    let mut next = vec![usize::MAX; n + 2];
    let mut prev = vec![usize::MAX; n + 2];
    next[0] = 1;
    prev[1] = 0;
    let label = |s: usize| match s {
        0 => x.0,
        1 => y.0,
        k => tree.nodes[k - 2].id,
    };
    let mut steps = Vec::new();
    let mut link = |a: usize, b: usize, v: usize, next: &mut Vec<usize>, prev: &mut Vec<usize>| {
        next[a] = v;
        prev[v] = a;
        next[v] = b;
        prev[b] = v;
        steps.push(InsertStep {
            id: label(v),
            before: label(a),
            after: label(b),
        });
    };
    if let Some(root) = tree.root {
        link(0, 1, root + 2, &mut next, &mut prev);
        let children = |u: usize| [tree.nodes[u].left, tree.nodes[u].right];
        let mut list: VecDeque<usize> = children(root).into_iter().flatten().collect();
        while let Some(v) = list.pop_front() {
            for c in children(v).into_iter().flatten().rev() {
                list.push_front(c);
            }
            let w = tree.nodes[v].parent.expect("non-root");
            let ws = w + 2;
            if tree.nodes[w].left == Some(v) {
                let z1 = prev[ws];
                link(z1, ws, v + 2, &mut next, &mut prev);
            } else {
                let z2 = next[ws];
                link(ws, z2, v + 2, &mut next, &mut prev);
            }
        }
    }
    let mut items = Vec::with_capacity(n + 2);
    let mut s = 0;
    loop {
        items.push(match s {
            0 => x,
            1 => y,
            k => (tree.nodes[k - 2].id, tree.nodes[k - 2].mark),
        });
        if s == 1 {
            break;
        }
        s = next[s];
    }
    Ok((MarkedPath::new(items)?, steps))
}

/// Counts of the exhaustive enumeration behind [`count_two_skeleton_paths`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoSkeletonEnumeration {
    /// Orderings of the connectors between the fixed endpoints.
    pub orderings: u64,
    /// Orderings whose skeleton is the two endpoints.
    pub two_vertex_skeletons: u64,
    /// Distinct unlabeled tree shapes among those orderings.
    pub distinct_shapes: u64,
}

/// Enumerates every ordering of `k` connectors with fixed ages between two
/// older endpoints, reduces each to its skeleton and encodes the
/// two-vertex ones as trees.
pub fn enumerate_two_skeleton_paths(k: usize) -> TwoSkeletonEnumeration {
    use super::skeleton::skeleton_scan;
    use std::collections::HashSet;

    let end_a = (0usize, 0.1);
    let end_b = (1usize, 0.05);
    let connectors: Vec<(usize, f64)> = (0..k)
        .map(|i| (i + 2, 0.2 + 0.7 * (i as f64 + 1.0) / (k as f64 + 1.0)))
        .collect();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut shapes = HashSet::new();
    let (mut orderings, mut two) = (0u64, 0u64);
    // Heap's algorithm
    let mut c = vec![0usize; k];
    let mut visit = |perm: &[usize]| {
        orderings += 1;
        let mut items = vec![end_a];
        items.extend(perm.iter().map(|&i| connectors[i]));
        items.push(end_b);
        let path = MarkedPath::new(items).expect("distinct");
        if skeleton_scan(&path).indices.len() == 2 {
            two += 1;
            shapes.insert(path_to_tree(&path).expect("two-vertex skeleton").shape_code());
        }
    };
    visit(&perm);
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    TwoSkeletonEnumeration {
        orderings,
        two_vertex_skeletons: two,
        distinct_shapes: shapes.len() as u64,
    }
}

/// Number of binary tree shapes realized by paths with `k` connectors and a
/// two-vertex skeleton.
pub fn count_two_skeleton_paths(k: usize) -> u64 {
    enumerate_two_skeleton_paths(k).distinct_shapes
}
