/// Composite Simpson weights for `m` equally spaced nodes spanning `length`.
/// Returns `None` unless `m` is odd and at least 3.
pub fn simpson_weights(m: usize, length: f64) -> Option<Vec<f64>> {
    if m < 3 || m.is_multiple_of(2) {
        return None;
    }
    let h = length / (m - 1) as f64;
    Some(
        (0..m)
            .map(|i| {
                let w = if i == 0 || i == m - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                w * h / 3.0
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_cubics_exactly() {
        let m = 11;
        let w = simpson_weights(m, 2.0).unwrap();
        let integral: f64 = w
            .iter()
            .enumerate()
            .map(|(i, wi)| {
                let x = -1.0 + i as f64 * 0.2;
                wi * (x * x * x + 3.0 * x * x - 1.0)
            })
            .sum();
        assert!((integral - 0.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_even_grids() {
        assert!(simpson_weights(4, 1.0).is_none());
        assert!(simpson_weights(1, 1.0).is_none());
    }
}
