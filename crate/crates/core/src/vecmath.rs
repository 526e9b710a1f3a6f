//! Small slice-level vector helpers shared by the numeric modules.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Distance from `p` to the segment `[a, b]`, together with the parameter of
/// the closest point (0 at `a`, 1 at `b`).
pub fn point_segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut ab2 = 0.0;
    let mut ap_ab = 0.0;
    for i in 0..p.len() {
        let d = b[i] - a[i];
        ab2 += d * d;
        ap_ab += (p[i] - a[i]) * d;
    }
    if ab2 == 0.0 {
        return (dist(p, a), 0.0);
    }
    let tau = (ap_ab / ab2).clamp(0.0, 1.0);
    let mut d2 = 0.0;
    for i in 0..p.len() {
        let c = a[i] + tau * (b[i] - a[i]);
        d2 += (p[i] - c) * (p[i] - c);
    }
    (d2.sqrt(), tau)
}

/// Sums `term(0) + ... + term(len-1)` pairing the i-th and (len-1-i)-th terms.
///
/// The pairing makes the result bit-identical under reversal of the term
/// order (float addition is commutative), which the curve functionals rely on.
#[inline]
pub fn sum_symmetric(len: usize, mut term: impl FnMut(usize) -> f64) -> f64 {
    let mut acc = 0.0;
    let half = len / 2;
    for i in 0..half {
        acc += term(i) + term(len - 1 - i);
    }
    if len % 2 == 1 {
        acc += term(half);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_distance_basics() {
        let (d, tau) = point_segment_distance(&[0.0, 1.0], &[-1.0, 0.0], &[1.0, 0.0]);
        assert!((d - 1.0).abs() < 1e-15);
        assert!((tau - 0.5).abs() < 1e-15);
        // beyond the endpoint the distance is to the endpoint itself
        let (d, tau) = point_segment_distance(&[3.0, 0.0], &[-1.0, 0.0], &[1.0, 0.0]);
        assert!((d - 2.0).abs() < 1e-15);
        assert!((tau - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_sum_is_reversal_exact() {
        let terms: Vec<f64> = (0..101).map(|i| ((i * 7919) % 1000) as f64 * 1e-3 + 0.1).collect();
        let fwd = sum_symmetric(terms.len(), |i| terms[i]);
        let rev = sum_symmetric(terms.len(), |i| terms[terms.len() - 1 - i]);
        assert_eq!(fwd, rev);
    }
}
