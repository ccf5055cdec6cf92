//! Jacobi polynomials by forward three-term recurrence.

/// `P_j^{(a,b)}(x)` for `j = 0..=n`.
pub fn jacobi_all(n: usize, a: f64, b: f64, x: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if n == 0 {
        return;
    }
    out.push((a + 1.0) + (a + b + 2.0) * (x - 1.0) * 0.5);
    for j in 1..n {
        let jf = j as f64;
        let s = 2.0 * jf + a + b;
        let c1 = 2.0 * (jf + 1.0) * (jf + a + b + 1.0) * s;
        let c2 = (s + 1.0) * ((s + 2.0) * s * x + a * a - b * b);
        let c3 = 2.0 * (jf + a) * (jf + b) * (s + 2.0);
        let next = (c2 * out[j] - c3 * out[j - 1]) / c1;
        out.push(next);
    }
}

pub fn jacobi(n: usize, a: f64, b: f64, x: f64) -> f64 {
    let mut v = Vec::with_capacity(n + 1);
    jacobi_all(n, a, b, x, &mut v);
    v[n]
}

/// `d/dx P_n^{(a,b)}(x)`.
pub fn jacobi_derivative(n: usize, a: f64, b: f64, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    0.5 * (n as f64 + a + b + 1.0) * jacobi(n - 1, a + 1.0, b + 1.0, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_special_case() {
        let x: f64 = 0.37;
        assert_relative_eq!(jacobi(2, 0.0, 0.0, x), 0.5 * (3.0 * x * x - 1.0), epsilon = 1e-15);
        assert_relative_eq!(jacobi(3, 0.0, 0.0, x), 0.5 * (5.0 * x.powi(3) - 3.0 * x), epsilon = 1e-15);
    }

    #[test]
    fn value_at_one() {
        // P_n^{(a,b)}(1) = binom(n + a, n)
        assert_relative_eq!(jacobi(4, 2.0, 3.0, 1.0), 15.0, epsilon = 1e-12);
        assert_relative_eq!(jacobi(5, 0.0, 7.0, 1.0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn derivative_matches_differences() {
        let h = 1e-6;
        for &(n, a, b) in &[(3usize, 0.0, 2.0), (6, 0.0, 0.0), (5, 1.0, 4.0)] {
            let x = 0.21;
            let fd = (jacobi(n, a, b, x + h) - jacobi(n, a, b, x - h)) / (2.0 * h);
            assert_relative_eq!(jacobi_derivative(n, a, b, x), fd, max_relative = 1e-7);
        }
    }
}
