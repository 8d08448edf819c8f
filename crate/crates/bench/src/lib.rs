//! Shared fixtures for the benchmark targets.

use std::sync::Arc;

use semibrick_core::{enumerate_universe, preset_quiver, Limits, Prime, Universe};

pub fn universe(preset: &str, bound: &[usize]) -> Arc<Universe> {
    let quiver = preset_quiver(preset).expect("known preset");
    Arc::new(
        enumerate_universe(
            quiver,
            Prime::new(2).unwrap(),
            bound.to_vec(),
            Limits::default(),
        )
        .expect("stock universe fits the limits"),
    )
}
