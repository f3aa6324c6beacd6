//! Small robust-statistics helpers shared by the fitting code.

/// Median of a slice; `None` when empty. NaNs are not expected.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// All pairwise slopes `(y_j - y_i) / (x_j - x_i)` for `i < j`, skipping
/// pairs with coincident abscissae.
pub fn pairwise_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len().min(y.len());
    let mut slopes = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[j] - x[i];
            if dx != 0.0 {
                slopes.push((y[j] - y[i]) / dx);
            }
        }
    }
    slopes
}

/// Theil–Sen line: median pairwise slope, intercept the median of `y - slope·x`.
pub fn theil_sen(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let slope = median(&pairwise_slopes(x, y))?;
    let offsets: Vec<f64> = x.iter().zip(y).map(|(xi, yi)| yi - slope * xi).collect();
    Some((slope, median(&offsets)?))
}

/// Ordinary least squares `y ≈ Σ_k c_k·cols[k]`; `None` when the normal
/// equations are singular.
#[allow(clippy::needless_range_loop)]
pub fn least_squares(cols: &[&[f64]], y: &[f64]) -> Option<Vec<f64>> {
    let k = cols.len();
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = cols[i].iter().zip(cols[j]).map(|(p, q)| p * q).sum();
        }
        a[i][k] = cols[i].iter().zip(y).map(|(p, q)| p * q).sum();
    }
    for c in 0..k {
        let piv = (c..k).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, piv);
        for r in 0..k {
            if r != c {
                let f = a[r][c] / a[c][c];
                for j in c..=k {
                    a[r][j] -= f * a[c][j];
                }
            }
        }
    }
    Some((0..k).map(|i| a[i][k] / a[i][i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_odd_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn theil_sen_ignores_one_outlier() {
        let x: Vec<f64> = (0..9).map(f64::from).collect();
        let mut y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        y[0] = 100.0;
        let (slope, intercept) = theil_sen(&x, &y).unwrap();
        assert!((slope - 2.0).abs() < 1e-12);
        assert!((intercept - 1.0).abs() < 1e-12);
    }

    #[test]
    fn least_squares_recovers_exact_model() {
        let x: Vec<f64> = (1..10).map(|i| -(i as f64)).collect();
        let lx: Vec<f64> = x.iter().map(|v: &f64| v.abs().ln()).collect();
        let one = vec![1.0; x.len()];
        let y: Vec<f64> = x.iter().zip(&lx).map(|(a, b)| 0.3 * a - 1.5 * b + 2.0).collect();
        let c = least_squares(&[&x, &lx, &one], &y).unwrap();
        assert!((c[0] - 0.3).abs() < 1e-10 && (c[1] + 1.5).abs() < 1e-10 && (c[2] - 2.0).abs() < 1e-10);
    }
}
