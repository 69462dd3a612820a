//! Barycentric interpolation and differentiation on a fixed node set.

use super::quadrature::{gauss_barycentric_weights, Quadrature1D};

#[derive(Debug, Clone)]
pub struct Barycentric {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Barycentric {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Self {
        assert_eq!(nodes.len(), weights.len());
        Self { nodes, weights }
    }

    /// Interpolant through the Gauss–Legendre nodes of `q`.
    pub fn gauss(q: &Quadrature1D) -> Self {
        Self::new(q.nodes.clone(), gauss_barycentric_weights(q))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn outside(&self, x: f64) -> bool {
        let lo = self.nodes.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.nodes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        x < lo || x > hi
    }

    /// Lagrange basis by explicit products; stable for extrapolation where the
    /// second barycentric form cancels.
    fn lagrange_row(&self, x: f64) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|j| {
                let xj = self.nodes[j];
                (0..n)
                    .filter(|&k| k != j)
                    .map(|k| (x - self.nodes[k]) / (xj - self.nodes[k]))
                    .product()
            })
            .collect()
    }

    /// Row of coefficients c with p(x) = sum c_j f_j.
    pub fn row(&self, x: f64) -> Vec<f64> {
        if self.outside(x) {
            return self.lagrange_row(x);
        }
        let n = self.len();
        let mut c = vec![0.0; n];
        for j in 0..n {
            if x == self.nodes[j] {
                c[j] = 1.0;
                return c;
            }
        }
        let mut s = 0.0;
        for j in 0..n {
            let t = self.weights[j] / (x - self.nodes[j]);
            c[j] = t;
            s += t;
        }
        for cj in &mut c {
            *cj /= s;
        }
        c
    }

    pub fn eval(&self, values: &[f64], x: f64) -> f64 {
        if self.outside(x) {
            return self.lagrange_row(x).iter().zip(values).map(|(c, v)| c * v).sum();
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..self.len() {
            let d = x - self.nodes[j];
            if d == 0.0 {
                return values[j];
            }
            let t = self.weights[j] / d;
            num += t * values[j];
            den += t;
        }
        num / den
    }

    /// Dense differentiation matrix, row-major.
    pub fn diff_matrix(&self) -> Vec<f64> {
        let n = self.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            let mut diag = 0.0;
            for j in 0..n {
                if i != j {
                    let v = (self.weights[j] / self.weights[i]) / (self.nodes[i] - self.nodes[j]);
                    d[i * n + j] = v;
                    diag -= v;
                }
            }
            d[i * n + i] = diag;
        }
        d
    }
}

/// y = M x for a row-major square matrix.
pub fn mat_vec(m: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| m[i * n..(i + 1) * n].iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

/// Barycentric interpolation on each panel of a composite Gauss rule.
#[derive(Debug, Clone)]
pub struct PiecewiseBarycentric {
    pub breaks: Vec<f64>,
    per_panel: usize,
    panels: Vec<Barycentric>,
    diffs: Vec<Vec<f64>>,
}

impl PiecewiseBarycentric {
    /// `q` must come from `composite(breaks, per_panel)`.
    pub fn new(breaks: &[f64], q: &Quadrature1D, per_panel: usize) -> Self {
        assert_eq!(q.len(), per_panel * (breaks.len() - 1));
        let mut panels = Vec::new();
        let mut diffs = Vec::new();
        for p in 0..breaks.len() - 1 {
            let r = p * per_panel..(p + 1) * per_panel;
            let sub = Quadrature1D {
                nodes: q.nodes[r.clone()].to_vec(),
                weights: q.weights[r].to_vec(),
                a: breaks[p],
                b: breaks[p + 1],
            };
            let b = Barycentric::gauss(&sub);
            diffs.push(b.diff_matrix());
            panels.push(b);
        }
        Self {
            breaks: breaks.to_vec(),
            per_panel,
            panels,
            diffs,
        }
    }

    pub fn len(&self) -> usize {
        self.per_panel * self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    fn panel_of(&self, x: f64) -> usize {
        let last = self.panels.len() - 1;
        (1..=last).find(|&p| x < self.breaks[p]).map_or(last, |p| p - 1)
    }

    /// Sparse row: (offset, coefficients) with p(x) = sum c_j f_{offset + j}.
    pub fn row(&self, x: f64) -> (usize, Vec<f64>) {
        let p = self.panel_of(x);
        (p * self.per_panel, self.panels[p].row(x))
    }

    pub fn eval(&self, values: &[f64], x: f64) -> f64 {
        let p = self.panel_of(x);
        let o = p * self.per_panel;
        self.panels[p].eval(&values[o..o + self.per_panel], x)
    }

    pub fn differentiate(&self, values: &[f64]) -> Vec<f64> {
        let m = self.per_panel;
        let mut out = Vec::with_capacity(values.len());
        for (p, d) in self.diffs.iter().enumerate() {
            out.extend(mat_vec(d, &values[p * m..(p + 1) * m]));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::gauss_legendre;

    #[test]
    fn reproduces_polynomials() {
        let q = gauss_legendre(12, 0.0, 1.0).unwrap();
        let b = Barycentric::gauss(&q);
        let f: Vec<f64> = q.nodes.iter().map(|x| x.powi(7) - 2.0 * x).collect();
        for &x in &[0.0, 0.13, 0.5, 0.999, 1.0] {
            assert!((b.eval(&f, x) - (x.powi(7) - 2.0 * x)).abs() < 1e-13);
            let r = b.row(x);
            let v: f64 = r.iter().zip(&f).map(|(a, c)| a * c).sum();
            assert!((v - (x.powi(7) - 2.0 * x)).abs() < 1e-13);
        }
        let d = mat_vec(&b.diff_matrix(), &f);
        for (i, x) in q.nodes.iter().enumerate() {
            assert!((d[i] - (7.0 * x.powi(6) - 2.0)).abs() < 1e-11);
        }
    }

    #[test]
    fn spectral_accuracy_on_smooth_function() {
        let q = gauss_legendre(40, 0.0, 1.0).unwrap();
        let b = Barycentric::gauss(&q);
        let f: Vec<f64> = q.nodes.iter().map(|x| (3.0 * x).sin()).collect();
        let d = mat_vec(&b.diff_matrix(), &f);
        for (i, x) in q.nodes.iter().enumerate() {
            assert!((d[i] - 3.0 * (3.0 * x).cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn extrapolation_to_the_endpoint_is_stable() {
        let q = gauss_legendre(96, 0.0, 1.0).unwrap();
        let b = Barycentric::gauss(&q);
        let f: Vec<f64> = q.nodes.iter().map(|x| x * (2.0 * x).cos()).collect();
        for &x in &[1e-5, 1e-9, 4e-11] {
            let v = b.eval(&f, x);
            assert!((v - x * (2.0 * x).cos()).abs() < 1e-14, "x={x} v={v}");
        }
    }

    #[test]
    fn piecewise_interpolation_and_derivative() {
        use crate::numerics::quadrature::composite;
        let br = [0.0, 0.3, 0.5, 1.0];
        let q = composite(&br, 16).unwrap();
        let pb = PiecewiseBarycentric::new(&br, &q, 16);
        let f: Vec<f64> = q.nodes.iter().map(|x| (5.0 * x).sin()).collect();
        for &x in &[0.0, 0.1, 0.3, 0.42, 0.77, 1.0] {
            assert!((pb.eval(&f, x) - (5.0 * x).sin()).abs() < 1e-12);
            let (o, r) = pb.row(x);
            let v: f64 = r.iter().zip(&f[o..]).map(|(a, b)| a * b).sum();
            assert!((v - (5.0 * x).sin()).abs() < 1e-12);
        }
        let d = pb.differentiate(&f);
        for (i, x) in q.nodes.iter().enumerate() {
            assert!((d[i] - 5.0 * (5.0 * x).cos()).abs() < 1e-9);
        }
    }
}
