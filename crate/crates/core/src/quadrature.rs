//! Gauss-Legendre rules on finite intervals.
//!
//! Every oracle in this crate integrates a Gaussian-confined integrand over a
//! truncated box, so a single Legendre family covers all of them. Nodes are
//! found by Newton iteration on the three-term Legendre recurrence, which stays
//! accurate well past the few thousand nodes the density oracle can ask for.

use std::f64::consts::PI;

/// Nodes and weights of an `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// nodes in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "a Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n.div_ceil(2);
        let nf = n as f64;
        for i in 0..half {
            // Tricomi's initial guess for the i-th largest root.
            let theta = PI * (i as f64 + 0.75) / (nf + 0.5);
            let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
            nodes[i] = -x;
            weights[i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Node/weight pairs mapped affinely onto `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| (mid + half * x, half * w))
            .collect()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        self.on_interval(a, b).into_iter().map(|(x, w)| w * f(x)).sum()
    }

    /// Largest gap between neighbouring nodes once mapped onto an interval of
    /// the given length.
    pub fn max_gap(&self, length: f64) -> f64 {
        let widest = self
            .nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max);
        // A one-point rule has no neighbours; the cell is the whole interval.
        if self.nodes.len() < 2 {
            length
        } else {
            0.5 * length * widest
        }
    }
}

/// `P_n(x)` and `P_n'(x)` by upward recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
