//! Gauss-Legendre quadrature on intervals, ordered simplices, and the
//! permuted chain regions used by the class-integral identity.

use crate::grid::C64;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_n' at x
            let mut p0 = 1.0;
            let mut p1 = x;
            if n == 1 {
                p1 = x;
            }
            for k in 2..=n {
                let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// The rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        x.iter().map(|&t| mid + half * t).collect(),
        w.iter().map(|&v| v * half).collect(),
    )
}

/// Values a quadrature loop can accumulate.
pub trait QuadValue: Clone {
    fn zero_like(&self) -> Self;
    fn axpy(&mut self, w: f64, other: &Self);
}

impl QuadValue for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn axpy(&mut self, w: f64, other: &Self) {
        *self += w * other;
    }
}

impl QuadValue for C64 {
    fn zero_like(&self) -> Self {
        C64::new(0.0, 0.0)
    }
    fn axpy(&mut self, w: f64, other: &Self) {
        *self += other * w;
    }
}

impl QuadValue for Vec<C64> {
    fn zero_like(&self) -> Self {
        vec![C64::new(0.0, 0.0); self.len()]
    }
    fn axpy(&mut self, w: f64, other: &Self) {
        for (a, b) in self.iter_mut().zip(other) {
            *a += b * w;
        }
    }
}

/// Integrate over the ordered simplex `{0 <= s_n <= ... <= s_1 <= t}` with
/// the nested substitution `s_1 = t u_1, s_i = s_{i-1} u_i`; the integrand
/// receives `(s_1, ..., s_n)`. Exactness follows the 1-d rule's degree in
/// each nesting level.
pub fn simplex_quadrature<T, F>(n: usize, t: f64, order: usize, mut f: F) -> T
where
    T: QuadValue,
    F: FnMut(&[f64]) -> T,
{
    assert!(n >= 1);
    let (u, w) = gauss_legendre_on(order, 0.0, 1.0);
    let mut s = vec![0.0; n];
    let mut acc: Option<T> = None;
    fn rec<T: QuadValue, F: FnMut(&[f64]) -> T>(
        level: usize,
        n: usize,
        prev: f64,
        jac: f64,
        u: &[f64],
        w: &[f64],
        s: &mut Vec<f64>,
        f: &mut F,
        acc: &mut Option<T>,
    ) {
        if level == n {
            let v = f(s);
            match acc {
                None => {
                    let mut z = v.zero_like();
                    z.axpy(jac, &v);
                    *acc = Some(z);
                }
                Some(a) => a.axpy(jac, &v),
            }
            return;
        }
        for (ui, wi) in u.iter().zip(w) {
            let val = prev * ui;
            s[level] = val;
            // d s_level = prev * d u
            rec(level + 1, n, val, jac * wi * prev, u, w, s, f, acc);
        }
    }
    rec(0, n, t, 1.0, &u, &w, &mut s, &mut f, &mut acc);
    acc.expect("order >= 1 yields at least one node")
}

/// Integrate over the chain region `{t >= s_{chain[0]} >= s_{chain[1]} >=
/// ... >= 0}` by iterated Gauss-Legendre processed bottom-up: the deepest
/// variable ranges over `[0, t]` and each earlier chain variable over
/// `[next, t]`. The integrand receives values by slot (`s[i]` is the value
/// of variable `i + 1`). For the identity chain this is a genuinely
/// different node set than `simplex_quadrature`, which makes two-route
/// comparisons meaningful.
pub fn chain_quadrature<T, F>(chain: &[usize], t: f64, order: usize, mut f: F) -> T
where
    T: QuadValue,
    F: FnMut(&[f64]) -> T,
{
    let n = chain.len();
    assert!(n >= 1);
    let (u, w) = gauss_legendre_on(order, 0.0, 1.0);
    let mut s = vec![0.0; n];
    let mut acc: Option<T> = None;
    #[allow(clippy::too_many_arguments)]
    fn rec<T: QuadValue, F: FnMut(&[f64]) -> T>(
        pos: isize,
        chain: &[usize],
        t: f64,
        lower: f64,
        jac: f64,
        u: &[f64],
        w: &[f64],
        s: &mut Vec<f64>,
        f: &mut F,
        acc: &mut Option<T>,
    ) {
        if pos < 0 {
            let v = f(s);
            match acc {
                None => {
                    let mut z = v.zero_like();
                    z.axpy(jac, &v);
                    *acc = Some(z);
                }
                Some(a) => a.axpy(jac, &v),
            }
            return;
        }
        let var = chain[pos as usize] - 1;
        let span = t - lower;
        for (ui, wi) in u.iter().zip(w) {
            let val = lower + span * ui;
            s[var] = val;
            rec(pos - 1, chain, t, val, jac * wi * span, u, w, s, f, acc);
        }
    }
    rec(n as isize - 1, chain, t, 0.0, 1.0, &u, &w, &mut s, &mut f, &mut acc);
    acc.expect("order >= 1 yields at least one node")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        // degree 2n-1 exactness
        let (x, w) = gauss_legendre_on(6, 0.0, 2.0);
        let val: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(11)).sum();
        let exact = 2.0f64.powi(12) / 12.0;
        assert!((val - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn gl_node_counts() {
        for n in 1..=64 {
            let (x, w) = gauss_legendre(n);
            assert_eq!(x.len(), n);
            let total: f64 = w.iter().sum();
            assert!((total - 2.0).abs() < 1e-12, "n={n} weight sum {total}");
            for win in x.windows(2) {
                assert!(win[0] < win[1]);
            }
        }
    }

    #[test]
    fn simplex_volume() {
        for n in 1..=4 {
            let t: f64 = 0.8;
            let vol: f64 = simplex_quadrature(n, t, 8, |_s| 1.0);
            let mut fact = 1.0;
            for i in 1..=n {
                fact *= i as f64;
            }
            let exact = t.powi(n as i32) / fact;
            assert!((vol - exact).abs() < 1e-12 * exact, "n={n}: {vol} vs {exact}");
        }
    }

    #[test]
    fn simplex_separable_polynomial() {
        // int_{0<=s2<=s1<=t} s1^3 s2^2 = t^7 / (3 * 7)
        let t: f64 = 1.3;
        let val: f64 = simplex_quadrature(2, t, 10, |s| s[0].powi(3) * s[1].powi(2));
        let exact = t.powi(7) / 21.0;
        assert!((val - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn simplex_n1_is_plain_gl() {
        let t = 0.9;
        let a: f64 = simplex_quadrature(1, t, 12, |s| (3.0 * s[0]).sin());
        let exact = (1.0 - (3.0 * t).cos()) / 3.0;
        assert!((a - exact).abs() < 1e-12);
    }

    #[test]
    fn chain_matches_simplex_on_identity_chain() {
        let t = 0.7;
        let f = |s: &[f64]| (s[0] + 0.3 * s[1] * s[1] + s[0] * s[1]).exp();
        let a: f64 = simplex_quadrature(2, t, 16, f);
        let b: f64 = chain_quadrature(&[1, 2], t, 16, f);
        assert!((a - b).abs() < 1e-12 * a.abs());
    }

    #[test]
    fn chain_handles_permuted_regions() {
        // region {s2 >= s1}: integral of s1 over it = t^3 / 6
        let t = 1.1;
        let val: f64 = chain_quadrature(&[2, 1], t, 8, |s| s[0]);
        let exact = t.powi(3) / 6.0;
        assert!((val - exact).abs() < 1e-12 * exact);
        // complementary regions tile the square
        let bottom: f64 = chain_quadrature(&[1, 2], t, 8, |s| s[0]);
        assert!((bottom + val - t.powi(3) / 2.0).abs() < 1e-12);
    }
}
