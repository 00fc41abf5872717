//! Lanczos with full reorthogonalization for the top of a symmetric spectrum.

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Number of eigenvalues of the symmetric tridiagonal `(alpha, beta)` below `x`.
fn sturm_count(alpha: &[f64], beta: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for k in 0..alpha.len() {
        let b2 = if k == 0 { 0.0 } else { beta[k - 1] * beta[k - 1] };
        q = alpha[k] - x - if k == 0 { 0.0 } else { b2 / q };
        if q == 0.0 {
            q = f64::EPSILON * (alpha[k].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue of a symmetric tridiagonal matrix with a unit eigenvector.
pub(crate) fn tridiagonal_largest(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let radius = |k: usize| {
        let left = if k > 0 { beta[k - 1].abs() } else { 0.0 };
        let right = if k + 1 < m { beta[k].abs() } else { 0.0 };
        left + right
    };
    let mut lo = (0..m).map(|k| alpha[k] - radius(k)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..m).map(|k| alpha[k] + radius(k)).fold(f64::NEG_INFINITY, f64::max);
    while hi - lo > 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(alpha, beta, mid) == m {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let theta = hi;
    // Inverse iteration: μI − T is positive semidefinite for μ ≥ θ.
    let mu = theta + 1e-13 * theta.abs().max(f64::MIN_POSITIVE);
    let mut s = vec![1.0; m];
    for _ in 0..3 {
        let mut diag: Vec<f64> = alpha.iter().map(|a| mu - a).collect();
        let mut rhs = s.clone();
        for k in 1..m {
            let f = -beta[k - 1] / diag[k - 1];
            diag[k] -= f * -beta[k - 1];
            rhs[k] -= f * rhs[k - 1];
        }
        s[m - 1] = rhs[m - 1] / diag[m - 1];
        for k in (0..m - 1).rev() {
            s[k] = (rhs[k] + beta[k] * s[k + 1]) / diag[k];
        }
        let nrm = norm(&s);
        s.iter_mut().for_each(|x| *x /= nrm);
    }
    (theta, s)
}

#[derive(Debug, Clone)]
pub(crate) struct LanczosOutcome {
    pub theta: f64,
    pub vector: Vec<f64>,
    /// `‖T y − θ y‖` estimated by `β_m |s_m|`.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Largest eigenpair of the symmetric operator `apply`, restarting from the
/// current Ritz vector every `basis` steps.
pub(crate) fn largest_eigenpair<F>(
    mut apply: F,
    start: &[f64],
    rel_tol: f64,
    basis: usize,
    max_iterations: usize,
) -> LanczosOutcome
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = start.len();
    let mut v0 = start.to_vec();
    let mut iterations = 0;
    let mut best = LanczosOutcome {
        theta: 0.0,
        vector: start.to_vec(),
        residual: f64::INFINITY,
        iterations: 0,
        converged: false,
    };
    let mut w = vec![0.0; n];
    while iterations < max_iterations {
        let nrm = norm(&v0);
        let mut q: Vec<Vec<f64>> = vec![v0.iter().map(|x| x / nrm).collect()];
        let (mut alpha, mut beta) = (Vec::new(), Vec::new());
        loop {
            let k = q.len() - 1;
            apply(&q[k], &mut w);
            iterations += 1;
            let a = dot(&q[k], &w);
            alpha.push(a);
            for _ in 0..2 {
                for qj in &q {
                    let c = dot(qj, &w);
                    w.iter_mut().zip(qj).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = norm(&w);
            let (theta, s) = tridiagonal_largest(&alpha, &beta);
            let residual = b * s[k].abs();
            let invariant = b <= 1e-14 * theta.abs();
            let done = invariant || residual <= rel_tol * theta.abs();
            if done || q.len() == basis || iterations >= max_iterations {
                let mut y = vec![0.0; n];
                for (qj, sj) in q.iter().zip(&s) {
                    y.iter_mut().zip(qj).for_each(|(x, v)| *x += sj * v);
                }
                best = LanczosOutcome { theta, vector: y, residual, iterations, converged: done };
                break;
            }
            beta.push(b);
            q.push(w.iter().map(|x| x / b).collect());
        }
        if best.converged {
            break;
        }
        v0 = best.vector.clone();
    }
    best.iterations = iterations;
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_top_eigenpair() {
        // tridiag(1, 2, 1): eigenvalues 2 + 2cos(kπ/(m+1))
        let m = 12;
        let alpha = vec![2.0; m];
        let beta = vec![1.0; m - 1];
        let (theta, s) = tridiagonal_largest(&alpha, &beta);
        let exact = 2.0 + 2.0 * (std::f64::consts::PI / (m + 1) as f64).cos();
        assert!((theta - exact).abs() < 1e-14);
        for k in 0..m {
            let left = if k > 0 { s[k - 1] } else { 0.0 };
            let right = if k + 1 < m { s[k + 1] } else { 0.0 };
            assert!((2.0 * s[k] + left + right - theta * s[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn single_entry() {
        let (theta, s) = tridiagonal_largest(&[3.5], &[]);
        assert_eq!(theta, 3.5);
        assert_eq!(s, vec![1.0]);
    }

    #[test]
    fn diagonal_operator_with_restarts() {
        let d: Vec<f64> = (0..200).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let out = largest_eigenpair(
            |x, y| y.iter_mut().zip(x).zip(&d).for_each(|((y, x), d)| *y = d * x),
            &vec![1.0; 200],
            1e-12,
            10,
            500,
        );
        assert!(out.converged);
        assert!((out.theta - 1.0).abs() < 1e-12);
        assert!(out.vector[0].abs() > 0.999_999);
    }
}
