//! Shortcuts, skeletons, regularity and the path/tree correspondence.

mod path;
mod skeleton;
mod trace;
mod tree;

pub use path::{find_shortcut, shortcut_free_reduction, MarkedPath};
pub use skeleton::{
    classify_regularity, skeleton_local_maxima, skeleton_local_maxima_trace, skeleton_scan,
    Regularity, RemovalStep, Skeleton,
};
pub use trace::trace_marks;
pub use tree::{
    count_two_skeleton_paths, enumerate_two_skeleton_paths, path_to_tree, path_to_tree_trace,
    tree_to_path, tree_to_path_trace, AttachStep, InsertStep, LabeledBinaryTree, Side, TreeNode,
    TwoSkeletonEnumeration,
};
