//! Fixtures shared by the criterion benches.

use foliage::scenario::{bundled, bundled_names, Scenario};

/// Every bundled scenario, loaded once.
pub fn scenarios() -> Vec<Scenario> {
    bundled_names()
        .map(|n| bundled(n).expect("bundled scenarios load"))
        .collect()
}

pub fn scenario(name: &str) -> Scenario {
    bundled(name).expect("bundled scenario")
}
