//! Fixed inputs shared by the engine benchmarks.

use cremona_core::marked::HomaloidalType;
use cremona_core::realization::{random_corpus, CorpusEntry};

/// Types named by their text form, from the quadratic map up to a
/// high-degree chain type.
pub fn sample_types() -> Vec<(&'static str, HomaloidalType)> {
    ["2;1,1,1", "5;2,2,2,2,2,2", "3;2,1>1,1,1,1", "17;6,6,6,6,6,6,6,6"]
        .into_iter()
        .filter_map(|s| s.parse().ok().map(|t| (s, t)))
        .collect()
}

/// The last map of a seeded corpus chain.
pub fn corpus_map(seed: u64, k: usize, max_degree: u32) -> CorpusEntry {
    random_corpus(seed, k, 3, Some(max_degree))
        .expect("corpus generation")
        .pop()
        .expect("chains are nonempty")
}
