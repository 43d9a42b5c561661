//! Exhaustive and randomized self-checks of the path combinatorics.

use rand::Rng;
use serde::Serialize;

use crate::paths::{
    count_two_skeleton_paths, path_to_tree, skeleton_local_maxima, skeleton_scan, tree_to_path,
    LabeledBinaryTree, MarkedPath, Side,
};
use crate::rng::stream;

/// One self-check; `expected` and `observed` are counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelftestRow {
    pub check: String,
    pub size: usize,
    pub cases: u64,
    pub expected: u64,
    pub observed: u64,
    pub pass: bool,
}

impl SelftestRow {
    fn new(check: &str, size: usize, cases: u64, expected: u64, observed: u64) -> Self {
        Self {
            check: check.to_string(),
            size,
            cases,
            expected,
            observed,
            pass: expected == observed,
        }
    }
}

/// `(2n)! / (n! (n + 1)!)`, exact for `n <= 33`.
pub fn catalan(n: usize) -> u64 {
    let mut c: u128 = 1;
    for i in 0..n as u128 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c as u64
}

/// Distinct tree shapes with a two-vertex skeleton against the Catalan
/// numbers, `k = 0..=max_k` connectors.
pub fn catalan_check(max_k: usize) -> Vec<SelftestRow> {
    (0..=max_k)
        .map(|k| {
            let cases = (1..=k as u64).product::<u64>();
            SelftestRow::new("catalan", k, cases, catalan(k), count_two_skeleton_paths(k))
        })
        .collect()
}

fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    visit(&perm);
    let mut i = 0;
    while i < n {
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
}

fn skeletons_agree(path: &MarkedPath) -> bool {
    skeleton_scan(path) == skeleton_local_maxima(path)
}

/// Scan against local-maxima removal on every mark permutation of each
/// length up to `max_perm_len`, then on `random_sequences` uniform mark
/// sequences of random length in `1..=max_random_len`. `observed` counts
/// agreements.
pub fn skeleton_check(
    max_perm_len: usize,
    random_sequences: u64,
    max_random_len: usize,
    seed: u64,
) -> Vec<SelftestRow> {
    let mut rows = Vec::new();
    for n in 1..=max_perm_len {
        let (mut cases, mut agree) = (0u64, 0u64);
        for_each_permutation(n, |perm| {
            let marks: Vec<f64> = perm.iter().map(|&i| (i + 1) as f64 / (n + 1) as f64).collect();
            cases += 1;
            agree += skeletons_agree(&MarkedPath::from_marks(&marks).expect("distinct")) as u64;
        });
        rows.push(SelftestRow::new("skeleton_permutations", n, cases, cases, agree));
    }
    if random_sequences > 0 && max_random_len > 0 {
        let mut rng = stream(seed);
        let mut agree = 0u64;
        let mut done = 0u64;
        while done < random_sequences {
            let n = rng.gen_range(1..=max_random_len);
            let marks: Vec<f64> = (0..n).map(|_| 1.0 - rng.gen::<f64>()).collect();
            // ties have probability ~2^-53; redraw
            let Ok(path) = MarkedPath::from_marks(&marks) else { continue };
            done += 1;
            agree += skeletons_agree(&path) as u64;
        }
        rows.push(SelftestRow::new(
            "skeleton_random",
            max_random_len,
            random_sequences,
            random_sequences,
            agree,
        ));
    }
    rows
}

/// All trees on `k` nodes whose marks increase away from the root, the
/// node with rank `r` carrying mark `mark(r)`. Built by attaching nodes
/// oldest first at every free slot, so there are `k!` of them.
fn increasing_trees(k: usize, mark: &dyn Fn(usize) -> f64) -> Vec<LabeledBinaryTree> {
    if k == 0 {
        return vec![LabeledBinaryTree::new()];
    }
    let mut level = vec![LabeledBinaryTree::with_root(2, mark(0))];
    for r in 1..k {
        let mut next = Vec::with_capacity(level.len() * (r + 1));
        for t in &level {
            for parent in 0..t.len() {
                for side in [Side::Left, Side::Right] {
                    if t.child(parent, side).is_none() {
                        let mut u = t.clone();
                        u.attach(parent, side, r + 2, mark(r)).expect("free slot");
                        next.push(u);
                    }
                }
            }
        }
        level = next;
    }
    level
}

/// Both round trips between paths and trees, for every connector ordering
/// and every increasing tree with `k = 0..=max_k` connectors. `observed`
/// counts successful round trips.
pub fn bijection_check(max_k: usize) -> Vec<SelftestRow> {
    let x = (0usize, 0.1);
    let y = (1usize, 0.05);
    let mark = |r: usize| 0.2 + 0.7 * (r as f64 + 1.0) / (max_k as f64 + 1.0);
    let mut rows = Vec::new();
    for k in 0..=max_k {
        let (mut cases, mut ok) = (0u64, 0u64);
        for_each_permutation(k, |perm| {
            let mut items = vec![x];
            items.extend(perm.iter().map(|&r| (r + 2, mark(r))));
            items.push(y);
            let path = MarkedPath::new(items).expect("distinct");
            cases += 1;
            let back = path_to_tree(&path).and_then(|t| tree_to_path(&t, x, y));
            ok += matches!(back, Ok(p) if p == path) as u64;
        });
        rows.push(SelftestRow::new("path_tree_path", k, cases, cases, ok));

        let trees = increasing_trees(k, &mark);
        let n = trees.len() as u64;
        let ok = trees
            .iter()
            .filter(|t| {
                let back = tree_to_path(t, x, y).and_then(|p| path_to_tree(&p));
                matches!(back, Ok(ref u) if u == *t)
            })
            .count() as u64;
        rows.push(SelftestRow::new("tree_path_tree", k, n, n, ok));
    }
    rows
}
