//! Derivative-free maximization with the Nelder-Mead simplex method.

/// Outcome of one simplex run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Stopping rule: the run converges once the spread of simplex values is at
/// most `ftol` and every vertex lies within `xtol` of the best one.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub ftol: f64,
    pub xtol: f64,
    pub max_iters: usize,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Maximizes `f` starting from the axis-aligned simplex `x0 + step·eᵢ`.
///
/// Non-finite objective values are treated as `-∞`, which lets callers encode
/// infeasible points.
pub fn maximize(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], step: f64, tol: Tolerances) -> Outcome {
    let n = x0.len();
    // internally minimize g = -f
    let mut g = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            -v
        }
    };
    if n == 0 {
        let value = -g(x0);
        return Outcome {
            x: Vec::new(),
            value,
            iterations: 0,
            converged: true,
        };
    }

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| g(p)).collect();
    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];

    let mut iterations = 0;
    let mut converged = false;
    while iterations < tol.max_iters {
        // stable sort keeps earlier vertices first on ties, so runs are reproducible
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let best = order[0];
        let worst = order[n];
        let second = order[n - 1];

        let spread = vals[worst] - vals[best];
        let size = pts.iter().map(|p| dist(p, &pts[best])).fold(0.0, f64::max);
        if (spread <= tol.ftol && size <= tol.xtol) || size <= 1e-15 {
            converged = true;
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &k in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&pts[k]) {
                *c += x;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);

        let along = |out: &mut Vec<f64>, coef: f64, w: &[f64], c: &[f64]| {
            for ((o, &ci), &wi) in out.iter_mut().zip(c).zip(w) {
                *o = ci + coef * (ci - wi);
            }
        };

        along(&mut trial, 1.0, &pts[worst], &centroid);
        let fr = g(&trial);
        if fr < vals[best] {
            along(&mut trial2, 2.0, &pts[worst], &centroid);
            let fe = g(&trial2);
            if fe < fr {
                pts[worst].copy_from_slice(&trial2);
                vals[worst] = fe;
            } else {
                pts[worst].copy_from_slice(&trial);
                vals[worst] = fr;
            }
            continue;
        }
        if fr < vals[second] {
            pts[worst].copy_from_slice(&trial);
            vals[worst] = fr;
            continue;
        }
        // contraction: outside if the reflected point beats the worst, inside otherwise
        let outside = fr < vals[worst];
        along(&mut trial2, if outside { 0.5 } else { -0.5 }, &pts[worst], &centroid);
        let fc = g(&trial2);
        if (outside && fc <= fr) || (!outside && fc < vals[worst]) {
            pts[worst].copy_from_slice(&trial2);
            vals[worst] = fc;
            continue;
        }
        // shrink toward the best vertex
        let anchor = pts[best].clone();
        for k in 0..=n {
            if k == best {
                continue;
            }
            for (x, a) in pts[k].iter_mut().zip(&anchor) {
                *x = a + 0.5 * (*x - a);
            }
            vals[k] = g(&pts[k]);
        }
    }

    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b))).unwrap_or(0);
    Outcome {
        x: pts[best].clone(),
        value: -vals[best],
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: Tolerances = Tolerances {
        ftol: 1e-14,
        xtol: 1e-9,
        max_iters: 5000,
    };

    #[test]
    fn finds_quadratic_peak() {
        let out = maximize(|x| -(x[0] - 1.0).powi(2) - 3.0 * (x[1] + 0.5).powi(2) + 2.0, &[0.0, 0.0], 0.5, TOL);
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-6 && (out.x[1] + 0.5).abs() < 1e-6);
        assert!((out.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rosenbrock_valley() {
        let out = maximize(
            |x| -((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)),
            &[-1.2, 1.0],
            0.5,
            TOL,
        );
        assert!((out.x[0] - 1.0).abs() < 1e-4 && (out.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn never_returns_worse_than_start() {
        let f = |x: &[f64]| -(x.iter().map(|v| v.abs()).sum::<f64>());
        let out = maximize(f, &[0.0; 6], 0.3, TOL);
        assert!(out.value >= 0.0);
    }

    #[test]
    fn infeasible_points_are_avoided() {
        // maximize x on [0, 1], encoded with -inf outside
        let f = |x: &[f64]| if (0.0..=1.0).contains(&x[0]) { x[0] } else { f64::NEG_INFINITY };
        let out = maximize(f, &[0.2], 0.1, TOL);
        assert!((out.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let out = maximize(|x| -x.iter().map(|v| v * v).sum::<f64>(), &[3.0; 8], 0.1, Tolerances { max_iters: 5, ..TOL });
        assert!(!out.converged);
        assert_eq!(out.iterations, 5);
    }
}
