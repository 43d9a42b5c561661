//! Samples a Palm instance on a small torus, prints cluster statistics and
//! round-trips the graph through the text format.

use wdrcm::model::{ModelParams, SpatialDomain};
use wdrcm::percolation::{origin_cluster_stats, rooted_report};
use wdrcm::sampling::{from_text, rooted_to_text, sample_rooted_graph};

fn main() -> wdrcm::Result<()> {
    let params = ModelParams::pa_polynomial(2, 0.5, 1.0, 2.0)?.with_p(0.6)?;
    let domain = SpatialDomain::torus(20.0, 2)?;
    let g = sample_rooted_graph(&params, &domain, 7, true)?;
    let report = rooted_report(&g);
    println!(
        "{} vertices, {} edges, {} components, largest {}",
        g.graph.n_vertices(),
        g.graph.n_edges(),
        report.n_components(),
        report.largest_size
    );
    let o = origin_cluster_stats(&g, 5.0)?;
    println!("origin cluster: size {} reach {:.3} reaches R=5: {}", o.size, o.reach, o.reaches_r);

    let text = rooted_to_text(&g);
    let parsed = from_text(&text)?;
    assert_eq!(parsed.graph.edges(), g.graph.edges());
    println!("text format: {} bytes, first line {:?}", text.len(), text.lines().next().unwrap_or(""));
    Ok(())
}
