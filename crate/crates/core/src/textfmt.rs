//! Deterministic text formatting for CSV output.

/// 17-significant-digit decimal, enough for bit-exact f64 round trips and
/// byte-stable output across runs.
pub fn float17(x: f64) -> String {
    // normalize -0.0 so byte comparisons are stable
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::float17;

    #[test]
    fn round_trips_f64() {
        for &x in &[
            0.0,
            -0.0,
            1.0,
            std::f64::consts::PI,
            1.0 / 3.0,
            1e-300,
            -123.456e77,
        ] {
            let s = float17(x);
            let back: f64 = s.parse().unwrap();
            let want = if x == 0.0 { 0.0 } else { x };
            assert_eq!(back.to_bits(), want.to_bits(), "{s}");
        }
    }
}
