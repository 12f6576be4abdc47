//! Gauss-Legendre quadrature, single rules and composite rules over interval
//! unions.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Nodes and weights of a quadrature rule on an explicit point set.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss-Legendre nodes/weights on `[-1, 1]` via the Golub-Welsch
/// eigendecomposition of the Jacobi matrix.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        let b = i as f64 / ((4 * i * i - 1) as f64).sqrt();
        jacobi[(i, i - 1)] = b;
        jacobi[(i - 1, i)] = b;
    }
    let eig = nalgebra::SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(&x, v)| (x, 2.0 * v[0] * v[0]))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

impl Quadrature {
    /// Gauss-Legendre rule with `n` nodes mapped to `[a, b]`.
    pub fn on_interval(a: f64, b: f64, n: usize) -> Self {
        let (xs, ws) = gauss_legendre(n);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        Quadrature {
            nodes: xs.iter().map(|x| mid + half * x).collect(),
            weights: ws.iter().map(|w| half * w).collect(),
        }
    }

    /// Composite rule over a union of intervals, distributing roughly
    /// `n_total` nodes proportionally to interval length (at least
    /// `min_per_interval` each).
    pub fn on_intervals(intervals: &[(f64, f64)], n_total: usize, min_per_interval: usize) -> Self {
        let total_len: f64 = intervals.iter().map(|(a, b)| b - a).sum();
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for &(a, b) in intervals {
            let share = ((b - a) / total_len * n_total as f64).round() as usize;
            let n = share.max(min_per_interval);
            let q = Quadrature::on_interval(a, b, n);
            nodes.extend(q.nodes);
            weights.extend(q.weights);
        }
        Quadrature { nodes, weights }
    }

    /// Composite rule that splits each interval into chunks of length at most
    /// `max_chunk` with `n_per_chunk` Gauss-Legendre nodes each. Suitable for
    /// oscillatory integrands whose wavelength is bounded below.
    pub fn chunked(intervals: &[(f64, f64)], max_chunk: f64, n_per_chunk: usize) -> Self {
        assert!(max_chunk > 0.0);
        let (base_x, base_w) = gauss_legendre(n_per_chunk);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for &(a, b) in intervals {
            let n_chunks = ((b - a) / max_chunk).ceil().max(1.0) as usize;
            let h = (b - a) / n_chunks as f64;
            for c in 0..n_chunks {
                let lo = a + c as f64 * h;
                let mid = lo + 0.5 * h;
                let half = 0.5 * h;
                for (x, w) in base_x.iter().zip(&base_w) {
                    nodes.push(mid + half * x);
                    weights.push(half * w);
                }
            }
        }
        Quadrature { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates a scalar function over the rule's support.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .fold(0.0, |acc, t| acc + t)
    }

    pub fn weights_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.weights)
    }
}

/// Number of quadrature nodes per interval, validated against the minimum
/// resolution the concentration operator requires.
pub fn validate_node_count(n_nodes: usize, min: usize) -> Result<()> {
    if n_nodes < min {
        return Err(Error::invalid_parameter(
            "n_nodes",
            format!("must be >= {min}, got {n_nodes}"),
        ));
    }
    Ok(())
}
