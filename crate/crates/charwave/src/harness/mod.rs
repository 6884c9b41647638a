//! Experiment orchestration: config ingestion, command dispatch, CSV/JSON
//! artifact writing and the run manifest.

/// Formats a double with 17 significant digits, enough for a lossless
/// round trip through text.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_text_roundtrip_is_lossless() {
        for &x in &[
            0.1,
            -1.0 / 3.0,
            std::f64::consts::PI,
            1.2345678901234567e-200,
            6.02214076e23,
        ] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }
}
