use crate::error::{check_len, Error, Result};

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// The `k` points nearest to `points[query]` by Euclidean distance, query
/// excluded, nearest first. Equal distances resolve to the smaller index.
pub fn knn<P: AsRef<[f64]>>(points: &[P], query: usize, k: usize) -> Result<Vec<usize>> {
    if query >= points.len() {
        return Err(Error::config(format!(
            "query index {query} out of range for {} points",
            points.len()
        )));
    }
    if k == 0 || k > points.len() - 1 {
        return Err(Error::config(format!(
            "k = {k} must lie in 1..={}",
            points.len() - 1
        )));
    }
    let q = points[query].as_ref();
    let mut ranked = Vec::with_capacity(points.len() - 1);
    for (i, p) in points.iter().enumerate() {
        let p = p.as_ref();
        check_len(q.len(), p.len())?;
        if i != query {
            ranked.push((squared_distance(q, p), i));
        }
    }
    ranked.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(ranked.into_iter().take(k).map(|(_, i)| i).collect())
}
