use crate::error::{domain, Error, Result};
use crate::sampling::RandomSource;

/// Uniform draws allowed per trajectory of the record construction.
pub const RECORD_DRAW_CAP: u64 = 100_000_000;

/// Counting process built from the records of i.i.d. uniforms.
///
/// With `V_1 < V_2 < ...` the successive record values, returns
/// `Y_t = #{n : V_n <= 1 - exp(-m(t))}` at each grid time. Draws stop at the
/// first record above the largest level; past [`RECORD_DRAW_CAP`] draws the
/// run fails instead of truncating.
pub fn gergely_yezhov_counts<M: Fn(f64) -> f64>(
    intensity: M,
    grid: &[f64],
    rng: &mut RandomSource,
) -> Result<Vec<u64>> {
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(domain("time grid must be nondecreasing"));
    }
    let m0 = intensity(0.0);
    if m0 != 0.0 {
        return Err(domain(format!("intensity must vanish at zero, got m(0) = {m0}")));
    }
    let levels: Vec<f64> = grid.iter().map(|&t| intensity(t)).collect();
    if levels.iter().any(|m| !(m.is_finite() && *m >= 0.0)) || levels.windows(2).any(|w| w[1] < w[0]) {
        return Err(domain("intensity must be finite, nonnegative and nondecreasing on the grid"));
    }
    // compare records on the scale -ln(1 - v), where the levels are m(t)
    let top = levels.last().copied().unwrap_or(0.0);
    let mut records: Vec<f64> = Vec::new();
    let mut best = f64::NEG_INFINITY;
    let mut draws = 0u64;
    while best <= top {
        if draws >= RECORD_DRAW_CAP {
            return Err(Error::Resource(format!(
                "record search hit {RECORD_DRAW_CAP} draws with {} records, below level {top}",
                records.len()
            )));
        }
        draws += 1;
        let v = -(-rng.uniform()).ln_1p();
        if v > best {
            best = v;
            records.push(v);
        }
    }
    Ok(levels.iter().map(|&m| records.partition_point(|&r| r <= m) as u64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_intensity() {
        let grid = [0.0, 0.5, 1.0];
        let y = gergely_yezhov_counts(|_| 0.0, &grid, &mut RandomSource::new(1, 0)).unwrap();
        assert_eq!(y, vec![0, 0, 0]);
    }

    #[test]
    fn nondecreasing_from_zero() {
        let grid: Vec<f64> = (0..=400).map(|i| i as f64 / 100.0).collect();
        for i in 0..50 {
            let y = gergely_yezhov_counts(|t| t, &grid, &mut RandomSource::new(2, i)).unwrap();
            assert!(y.windows(2).all(|w| w[1] >= w[0]));
            assert_eq!(y[0], 0);
        }
    }

    #[test]
    fn rejects_bad_intensity() {
        assert!(gergely_yezhov_counts(|t| 1.0 - t, &[0.0, 1.0], &mut RandomSource::new(1, 0)).is_err());
        assert!(gergely_yezhov_counts(|t| t + 1.0, &[0.0, 1.0], &mut RandomSource::new(1, 0)).is_err());
    }

    #[test]
    fn cap_is_reported() {
        let r = gergely_yezhov_counts(|t| 40.0 * t, &[0.0, 1.0], &mut RandomSource::new(1, 0));
        assert!(matches!(r, Err(Error::Resource(_))));
    }
}
