//! Skeleton of a marked path by both constructions, the tree of its
//! connectors and the reconstruction, plus the Catalan counts.

use wdrcm::paths::{
    count_two_skeleton_paths, path_to_tree, skeleton_local_maxima, skeleton_scan, trace_marks,
    tree_to_path, MarkedPath,
};

fn main() -> wdrcm::Result<()> {
    let marks = [0.2, 0.6, 0.4, 0.5, 0.7, 0.3, 0.1];
    let path = MarkedPath::from_marks(&marks)?;
    let a = skeleton_scan(&path);
    let b = skeleton_local_maxima(&path);
    assert_eq!(a, b);
    println!("skeleton {:?} (m = {}, oldest at {})", a.indices, a.m(), a.k());

    let two = MarkedPath::from_marks(&[0.2, 0.6, 0.4, 0.5, 0.7, 0.1])?;
    let tree = path_to_tree(&two)?;
    println!("tree shape {}", tree.shape_code());
    let back = tree_to_path(&tree, two.item(0), two.item(two.len() - 1))?;
    assert_eq!(back, two);

    print!("{}", trace_marks(&marks)?);
    let counts: Vec<u64> = (0..=8).map(count_two_skeleton_paths).collect();
    println!("two-vertex skeleton shapes for k = 0..8: {counts:?}");
    Ok(())
}
