//! Text rendering shared by the CSV and JSON emitters.

/// 17 significant digits in scientific notation, e.g. `1.2500000000000000e0`.
/// Round-trips every finite `f64`.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        assert_eq!(sig17(1.25), "1.2500000000000000e0");
        assert_eq!(sig17(-0.1), "-1.0000000000000001e-1");
        for x in [0.1, 1.0 / 3.0, 9.869604401089358, 1e-300, -7.5e12] {
            assert_eq!(sig17(x).parse::<f64>().unwrap(), x);
        }
    }
}
