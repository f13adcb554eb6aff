//! Deterministic number formatting shared by reports and CSV exports.
//!
//! 17 significant decimal digits round-trip every f64 exactly, and the fixed
//! width keeps emitted artifacts byte-identical across runs and thread counts.

/// Format a float with 17 significant digits. Infinities are tagged textually
/// so no sentinel number ever appears in an artifact.
pub fn fmt_f64(x: f64) -> String {
    if x == f64::INFINITY {
        return "inf".to_string();
    }
    if x == f64::NEG_INFINITY {
        return "-inf".to_string();
    }
    assert!(!x.is_nan(), "refusing to format NaN");
    format!("{:.16e}", x)
}
