//! Number formatting shared by the CSV writers.

/// Fixed-point rendering with six significant digits; scientific notation
/// outside `[1e-6, 1e15)`.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-6..15).contains(&mag) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}
