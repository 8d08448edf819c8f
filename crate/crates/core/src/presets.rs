//! Named quivers for the stock universes used by the CLI and test suites.

use std::sync::Arc;

use crate::repcat::Quiver;

pub const PRESET_NAMES: [&str; 3] = ["a1", "a2", "a3"];

/// Quiver for a preset name: `a1`, `a2`, `a3` are the linearly oriented
/// type-A quivers with that many vertices. Case-insensitive.
pub fn preset_quiver(name: &str) -> Option<Arc<Quiver>> {
    match name.to_ascii_lowercase().as_str() {
        "a1" => Some(Quiver::line(1)),
        "a2" => Some(Quiver::line(2)),
        "a3" => Some(Quiver::line(3)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_resolve() {
        for name in PRESET_NAMES {
            let q = preset_quiver(name).unwrap();
            assert_eq!(q.vertices().len(), name[1..].parse::<usize>().unwrap());
        }
        assert!(preset_quiver("A2").is_some());
        assert!(preset_quiver("d4").is_none());
    }
}
