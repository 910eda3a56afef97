//! Finite-difference weights on arbitrary nodes.

/// Fornberg's recursion: `weights[k][j]` is the weight of node `j` in the
/// `k`-th derivative at `z`, for `k = 0..=order`.
pub fn fornberg_weights(z: f64, nodes: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    if n == 0 {
        return c;
    }
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Index range of the five-point stencil used at node `i` of `n`:
/// centred in the interior, one-sided at both ends.
pub fn five_point_window(i: usize, n: usize) -> std::ops::Range<usize> {
    debug_assert!(n >= 5);
    let start = i.saturating_sub(2).min(n - 5);
    start..start + 5
}

/// First derivative of samples `values` taken at `coords`, fourth order.
pub fn first_derivative(coords: &[f64], values: &[f64]) -> Vec<f64> {
    let n = coords.len();
    (0..n)
        .map(|i| {
            let w = five_point_window(i, n);
            let weights = fornberg_weights(coords[i], &coords[w.clone()], 1);
            weights[1].iter().zip(&values[w]).map(|(a, b)| a * b).sum()
        })
        .collect()
}

/// `d/dT` of samples on a temperature grid below the critical point. The
/// stencil is built in `x = ln(1 - T)`, where coexistence data vary on a
/// uniform scale as `T -> 1`, and mapped back with `dx/dT = -1/(1 - T)`.
pub fn d_dt_log_tau(temps: &[f64], values: &[f64]) -> Vec<f64> {
    let x: Vec<f64> = temps.iter().map(|t| (1.0 - t).ln()).collect();
    first_derivative(&x, values)
        .into_iter()
        .zip(temps)
        .map(|(d, t)| -d / (1.0 - t))
        .collect()
}
