//! Process-wide rayon pool honoring the `HELIOS_THREADS` cap.

use std::sync::OnceLock;

/// Initializes the global rayon pool once, sized by `HELIOS_THREADS` when
/// set. Safe to call from multiple entry points; later calls are no-ops.
pub fn init() {
    static DONE: OnceLock<()> = OnceLock::new();
    DONE.get_or_init(|| {
        if let Ok(v) = std::env::var("HELIOS_THREADS") {
            if let Ok(n) = v.parse::<usize>() {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build_global();
            }
        }
    });
}
