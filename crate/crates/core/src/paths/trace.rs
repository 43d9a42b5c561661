use std::fmt::Write as _;

use super::path::MarkedPath;
use super::skeleton::{classify_regularity, skeleton_local_maxima_trace, Regularity};
use super::tree::{path_to_tree_trace, tree_to_path_trace};
use crate::error::Result;

fn join(v: impl IntoIterator<Item = usize>) -> String {
    v.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Line-oriented trace of the local-maxima removal, the skeleton and, for
/// each pair of consecutive skeleton vertices, the tree of the connectors
/// between them and its depth-first reconstruction.
pub fn trace_marks(marks: &[f64]) -> Result<String> {
    let path = MarkedPath::from_marks(marks)?;
    let mut out = String::new();
    let _ = write!(out, "path");
    for i in 0..path.len() {
        let _ = write!(out, " {}:{}", i, path.mark(i));
    }
    out.push('\n');
    let (skel, steps) = skeleton_local_maxima_trace(&path);
    for (n, s) in steps.iter().enumerate() {
        let _ = writeln!(
            out,
            "remove step={} index={} mark={} remaining={}",
            n + 1,
            s.index,
            s.mark,
            join(s.remaining.iter().copied())
        );
    }
    let regular = classify_regularity(&skel, &path) == Regularity::Regular;
    let _ = writeln!(
        out,
        "skeleton indices={} m={} k={} min_mark={} regular={}",
        join(skel.indices.iter().copied()),
        skel.m(),
        skel.k(),
        skel.min_mark(&path),
        regular
    );
    for (seg, w) in skel.indices.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let sub = path.select(&(a..=b).collect::<Vec<_>>());
        let _ = writeln!(out, "segment {seg} from={a} to={b} connectors={}", b - a - 1);
        let (tree, attach) = path_to_tree_trace(&sub)?;
        for s in &attach {
            let branch = if s.branch.is_empty() { "root" } else { s.branch.as_str() };
            let _ = writeln!(out, "attach segment={seg} index={} mark={} branch={branch}", s.id, s.mark);
        }
        let _ = writeln!(out, "tree segment={seg} shape={}", tree.shape_code());
        let (back, inserts) = tree_to_path_trace(&tree, sub.item(0), sub.item(sub.len() - 1))?;
        for s in &inserts {
            let _ = writeln!(
                out,
                "insert segment={seg} index={} between={},{}",
                s.id, s.before, s.after
            );
        }
        let _ = writeln!(out, "rebuilt segment={seg} path={} ok={}", join(back.ids().iter().copied()), back == sub);
    }
    Ok(out)
}
