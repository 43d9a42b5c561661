use crate::error::{Error, Result};
use crate::sampling::MarkedGraph;

/// A self-avoiding sequence of `(vertex id, mark)` pairs with distinct marks.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedPath {
    ids: Vec<usize>,
    marks: Vec<f64>,
}

impl MarkedPath {
    pub fn new(items: Vec<(usize, f64)>) -> Result<Self> {
        let (ids, marks): (Vec<usize>, Vec<f64>) = items.into_iter().unzip();
        Self::from_parts(ids, marks)
    }

    pub fn from_parts(ids: Vec<usize>, marks: Vec<f64>) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::malformed("a path has at least one vertex"));
        }
        if ids.len() != marks.len() {
            return Err(Error::malformed("ids and marks differ in length"));
        }
        if let Some(m) = marks.iter().find(|&&m| !(m > 0.0 && m <= 1.0)) {
            return Err(Error::malformed(format!("mark {m} outside (0, 1]")));
        }
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::malformed("path revisits a vertex"));
        }
        let mut sm = marks.clone();
        sm.sort_by(f64::total_cmp);
        if sm.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::malformed("path has tied marks"));
        }
        Ok(Self { ids, marks })
    }

    /// Path with ids `0..n`.
    pub fn from_marks(marks: &[f64]) -> Result<Self> {
        Self::from_parts((0..marks.len()).collect(), marks.to_vec())
    }

    /// Path through graph vertices, marks read from the graph.
    pub fn from_graph(graph: &MarkedGraph, ids: &[usize]) -> Result<Self> {
        if let Some(&i) = ids.iter().find(|&&i| i >= graph.n_vertices()) {
            return Err(Error::malformed(format!("vertex {i} not in graph")));
        }
        Self::from_parts(ids.to_vec(), ids.iter().map(|&i| graph.vertex(i).mark).collect())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn marks(&self) -> &[f64] {
        &self.marks
    }

    pub fn id(&self, i: usize) -> usize {
        self.ids[i]
    }

    pub fn mark(&self, i: usize) -> f64 {
        self.marks[i]
    }

    pub fn item(&self, i: usize) -> (usize, f64) {
        (self.ids[i], self.marks[i])
    }

    /// Sub-path on the given positions.
    pub fn select(&self, positions: &[usize]) -> MarkedPath {
        MarkedPath {
            ids: positions.iter().map(|&i| self.ids[i]).collect(),
            marks: positions.iter().map(|&i| self.marks[i]).collect(),
        }
    }

    /// Position of the oldest vertex.
    pub fn argmin_mark(&self) -> usize {
        (0..self.len())
            .min_by(|&a, &b| self.marks[a].total_cmp(&self.marks[b]))
            .expect("nonempty")
    }
}

fn check_in_graph(path: &MarkedPath, graph: &MarkedGraph) -> Result<()> {
    if let Some(&i) = path.ids().iter().find(|&&i| i >= graph.n_vertices()) {
        return Err(Error::malformed(format!("vertex {i} not in graph")));
    }
    for w in path.ids().windows(2) {
        if !graph.has_edge(w[0], w[1]) {
            return Err(Error::malformed(format!(
                "path step {}-{} is not an edge",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// First pair `(i, j)`, `j > i + 1`, of path positions joined by an edge,
/// in lexicographic order.
pub fn find_shortcut(path: &MarkedPath, graph: &MarkedGraph) -> Result<Option<(usize, usize)>> {
    check_in_graph(path, graph)?;
    let n = path.len();
    for i in 0..n {
        for j in i + 2..n {
            if graph.has_edge(path.id(i), path.id(j)) {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

/// From each kept vertex, jump to the furthest later path vertex adjacent
/// to it. The result starts and ends at the original endpoints and has no
/// shortcut.
pub fn shortcut_free_reduction(path: &MarkedPath, graph: &MarkedGraph) -> Result<MarkedPath> {
    check_in_graph(path, graph)?;
    let n = path.len();
    let mut keep = vec![0usize];
    let mut cur = 0;
    while cur + 1 < n {
        let next = (cur + 1..n)
            .rev()
            .find(|&j| graph.has_edge(path.id(cur), path.id(j)))
            .expect("consecutive vertices are adjacent");
        keep.push(next);
        cur = next;
    }
    Ok(path.select(&keep))
}
