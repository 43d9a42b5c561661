//! Registry of every CSV layout the runner emits. The first column of each
//! file is `schema`, holding the tag below.

#[derive(Debug)]
pub struct Schema {
    pub tag: &'static str,
    pub columns: &'static [&'static str],
}

const PARAMS: [&str; 5] = ["gamma", "delta", "beta", "p", "d"];

macro_rules! cols {
    ($($c:literal),* $(,)?) => { &["schema", $($c),*] };
}

pub const PERCOLATION: Schema = Schema {
    tag: "percolation.v1",
    columns: cols!(
        "gamma", "delta", "beta", "p", "d", "domain", "L", "R", "seed", "n_vertices", "n_edges",
        "largest_cluster", "origin_size", "origin_reach", "reaches_R", "wraps"
    ),
};

pub const PERCOLATION_SUMMARY: Schema = Schema {
    tag: "percolation_summary.v1",
    columns: cols!(
        "gamma", "delta", "beta", "p", "d", "domain", "L", "R", "seed", "frequency", "ci_low",
        "ci_high", "replications"
    ),
};

pub const TRANSITION_WINDOW: Schema = Schema {
    tag: "transition_window.v1",
    columns: cols!(
        "gamma", "delta", "beta", "d", "domain", "seed", "l_small", "l_large", "p_low", "p_high"
    ),
};

pub const PATHS_SELFTEST: Schema = Schema {
    tag: "paths_selftest.v1",
    columns: cols!("seed", "check", "size", "cases", "expected", "observed", "pass"),
};

pub const VERIFICATION: Schema = Schema {
    tag: "verification.v1",
    columns: cols!(
        "seed", "check", "point", "lhs", "rhs", "relation", "margin", "method", "tolerance",
        "error_estimate", "pass", "note"
    ),
};

pub const CHAIN: Schema = Schema {
    tag: "chain.v1",
    columns: cols!(
        "gamma", "delta", "beta", "p", "d", "s0", "alpha1", "alpha2", "K", "seed",
        "steps_completed", "success"
    ),
};

pub const CHAIN_SUMMARY: Schema = Schema {
    tag: "chain_summary.v1",
    columns: cols!(
        "gamma", "delta", "beta", "p", "d", "K", "alpha1", "alpha2", "seed", "s0", "successes",
        "replications", "probability", "ci_low", "ci_high", "capped"
    ),
};

pub const ABA: Schema = Schema {
    tag: "aba.v1",
    columns: cols!(
        "gamma", "delta", "beta", "p", "d", "t", "seed", "n_vertices", "n_edges",
        "largest_fraction", "oldest_component_fraction", "xi_1", "xi_10", "xi_100"
    ),
};

pub const ABA_SUMMARY: Schema = Schema {
    tag: "aba_summary.v1",
    columns: cols!(
        "gamma", "delta", "beta", "p", "d", "seed", "t", "replications", "mean_largest", "ci_low",
        "ci_high", "mean_oldest"
    ),
};

pub const REGISTRY: [&Schema; 9] = [
    &PERCOLATION,
    &PERCOLATION_SUMMARY,
    &TRANSITION_WINDOW,
    &PATHS_SELFTEST,
    &VERIFICATION,
    &CHAIN,
    &CHAIN_SUMMARY,
    &ABA,
    &ABA_SUMMARY,
];

pub fn lookup(tag: &str) -> Option<&'static Schema> {
    REGISTRY.iter().copied().find(|s| s.tag == tag)
}

/// Tags whose rows carry the scalar model parameters.
pub fn carries_params(schema: &Schema) -> bool {
    PARAMS.iter().filter(|c| schema.columns.contains(c)).count() >= 4
}
