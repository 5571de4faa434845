//! Derivative-free minimizers used by the REML and maximum-likelihood fits.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Result of a one-dimensional minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum1d {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
///
/// Stops when the bracket, and hence the distance between successive
/// iterates, is narrower than `tol`. Both interval
/// endpoints are also checked, so a boundary minimum is returned exactly.
pub fn golden_section<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iter: usize,
) -> Minimum1d {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if b - a < tol {
            converged = true;
            break;
        }
    }
    let (mut x, mut value) = if fc < fd { (c, fc) } else { (d, fd) };
    for edge in [lo, hi] {
        let fe = f(edge);
        if fe <= value {
            x = edge;
            value = fe;
        }
    }
    Minimum1d { x, value, iterations, converged }
}

/// Result of a multivariate minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimumNd {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder–Mead simplex minimization with the standard coefficients.
///
/// Converges when the simplex diameter falls below `x_tol` and the spread of
/// function values below `f_tol` relative to `1 + |f_best|`.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    step: f64,
    x_tol: f64,
    f_tol: f64,
    max_iter: usize,
) -> MinimumNd {
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| sanitize(f(v))).collect();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        iterations += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let diameter = simplex[1..]
            .iter()
            .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter < x_tol && (values[n] - values[0]).abs() < f_tol * (1.0 + values[0].abs()) {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (w - c)).collect()
        };

        let reflected = along(-1.0);
        let fr = sanitize(f(&reflected));
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = sanitize(f(&expanded));
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let (contracted, fc) = if fr < values[n] {
                let c = along(-0.5);
                let fc = sanitize(f(&c));
                (c, fc)
            } else {
                let c = along(0.5);
                let fc = sanitize(f(&c));
                (c, fc)
            };
            if fc < values[n].min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    simplex[i] = best.iter().zip(&simplex[i]).map(|(b, v)| b + 0.5 * (v - b)).collect();
                    values[i] = sanitize(f(&simplex[i]));
                }
            }
        }
    }
    let best = (0..=n).min_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap_or(0);
    MinimumNd { x: simplex[best].clone(), value: values[best], iterations, converged }
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}
