use serde::{Deserialize, Serialize};

/// Nearest-rank percentile of an ascending slice; `p` in `[0, 100]`.
pub fn percentile(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    Some(sorted[rank.clamp(1, sorted.len()) - 1])
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub max: f64,
    pub median: f64,
    pub p99: f64,
}

impl Summary {
    /// Ignores non-finite values.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Summary {
        let mut v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
        v.sort_by(f64::total_cmp);
        Summary {
            count: v.len(),
            max: v.last().copied().unwrap_or(f64::NAN),
            median: percentile(&v, 50.0).unwrap_or(f64::NAN),
            p99: percentile(&v, 99.0).unwrap_or(f64::NAN),
        }
    }
}
