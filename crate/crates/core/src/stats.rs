//! Exact percentage rounding and nearest-rank percentiles.

/// `100 * num / den` rounded half-up to `decimals` places, computed in
/// integer arithmetic so printed values never drift. `den == 0` gives 0.
pub fn percent(num: u64, den: u64, decimals: u32) -> f64 {
    if den == 0 {
        return 0.0;
    }
    let scale = 10u64.pow(decimals);
    let scaled = (2 * num * 100 * scale + den) / (2 * den);
    scaled as f64 / scale as f64
}

/// Formats a value from [`percent`] with exactly `decimals` places.
pub fn format_percent(value: f64, decimals: u32) -> String {
    format!("{value:.prec$}%", prec = decimals as usize)
}

/// Nearest-rank percentile of `sorted` (ascending). `None` when empty.
pub fn nearest_rank(sorted: &[u64], p: u32) -> Option<u64> {
    if sorted.is_empty() {
        return None;
    }
    let n = sorted.len() as u64;
    let rank = (u64::from(p) * n).div_ceil(100).max(1);
    Some(sorted[(rank - 1) as usize])
}
