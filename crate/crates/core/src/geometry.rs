//! Uniform grids on (0,1), sampled fields with Dirichlet boundary slots, the
//! discrete Laplacian, norms and the interior region used by the smallness
//! dichotomy.

use crate::error::{Error, Result};

/// Uniform grid of `n_interior` nodes `x_i = i·h`, `h = 1/(n_interior+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n_interior: usize,
    spacing: f64,
}

impl Grid {
    pub fn new(n_interior: usize) -> Result<Self> {
        if n_interior < 2 {
            return Err(Error::InvalidInput(format!(
                "grid needs at least 2 interior nodes, got {n_interior}"
            )));
        }
        Ok(Grid {
            n_interior,
            spacing: 1.0 / (n_interior as f64 + 1.0),
        })
    }

    pub fn n_interior(&self) -> usize {
        self.n_interior
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Coordinate of interior node `i` (zero-based).
    pub fn node(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.spacing
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_interior).map(|i| self.node(i)).collect()
    }
}

/// A function sampled at the interior nodes of a grid, plus its two boundary
/// values. Boundary data travels with the samples so no operator can drop it.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
    left: f64,
    right: f64,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>, left: f64, right: f64) -> Result<Self> {
        if values.len() != grid.n_interior {
            return Err(Error::InvalidInput(format!(
                "field has {} values for a grid of {} interior nodes",
                values.len(),
                grid.n_interior
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite field value at node {i}"
            )));
        }
        if !left.is_finite() || !right.is_finite() {
            return Err(Error::InvalidInput("non-finite boundary value".into()));
        }
        Ok(Field {
            grid,
            values,
            left,
            right,
        })
    }

    /// Builds a field without the finiteness scan; callers guarantee the
    /// length matches.
    pub(crate) fn from_parts(grid: Grid, values: Vec<f64>, left: f64, right: f64) -> Self {
        debug_assert_eq!(values.len(), grid.n_interior);
        Field {
            grid,
            values,
            left,
            right,
        }
    }

    /// Samples `f` at the interior nodes and at x = 0, 1.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().into_iter().map(&f).collect();
        Field::from_parts(grid, values, f(0.0), f(1.0))
    }

    pub fn zeros(grid: Grid) -> Self {
        Field::from_parts(grid, vec![0.0; grid.n_interior], 0.0, 0.0)
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Field::from_parts(grid, vec![c; grid.n_interior], c, c)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn left_bc(&self) -> f64 {
        self.left
    }

    pub fn right_bc(&self) -> f64 {
        self.right
    }

    pub fn bc(&self) -> (f64, f64) {
        (self.left, self.right)
    }

    /// Same samples, new boundary values.
    pub fn with_bc(&self, (left, right): (f64, f64)) -> Self {
        Field::from_parts(self.grid, self.values.clone(), left, right)
    }

    /// New samples on the same grid with the same boundary values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Field::new(self.grid, values, self.left, self.right)
    }

    /// Applies `f` node-wise, boundary slots included.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Field::from_parts(
            self.grid,
            self.values.iter().map(|&v| f(v)).collect(),
            f(self.left),
            f(self.right),
        )
    }

    /// Combines two fields node-wise, boundary slots included.
    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        Field::from_parts(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            f(self.left, other.left),
            f(self.right, other.right),
        )
    }

    /// Smallest interior value.
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest interior value.
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest value including the boundary slots.
    pub fn sup(&self) -> f64 {
        self.max().max(self.left).max(self.right)
    }

    /// Smallest value including the boundary slots.
    pub fn inf(&self) -> f64 {
        self.min().min(self.left).min(self.right)
    }

    pub fn is_finite(&self) -> bool {
        self.left.is_finite()
            && self.right.is_finite()
            && self.values.iter().all(|v| v.is_finite())
    }
}

/// Second-order central difference at the interior nodes, using the field's
/// boundary values in the end stencils. The result has zero boundary slots.
pub fn laplacian_dirichlet(f: &Field) -> Field {
    let n = f.grid.n_interior;
    let inv_h2 = 1.0 / (f.grid.spacing * f.grid.spacing);
    let v = &f.values;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let left = if i == 0 { f.left } else { v[i - 1] };
        let right = if i + 1 == n { f.right } else { v[i + 1] };
        out.push((left - 2.0 * v[i] + right) * inv_h2);
    }
    Field::from_parts(f.grid, out, 0.0, 0.0)
}

/// Discrete L² norm `sqrt(h Σ values²)` over the interior nodes.
pub fn l2_norm(f: &Field) -> f64 {
    (f.grid.spacing * f.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

pub fn linf_norm(f: &Field) -> f64 {
    f.values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `l2_norm(a - b)` without allocating.
pub fn l2_distance(a: &Field, b: &Field) -> f64 {
    assert_eq!(a.grid, b.grid, "fields live on different grids");
    let s: f64 = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    (a.grid.spacing * s).sqrt()
}

pub fn linf_distance(a: &Field, b: &Field) -> f64 {
    assert_eq!(a.grid, b.grid, "fields live on different grids");
    a.values
        .iter()
        .zip(&b.values)
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Nodes at distance at least `beta · k^(xi - 1/2)` from the boundary.
pub fn interior_mask(grid: &Grid, beta: f64, xi: f64, k: f64) -> Result<Vec<bool>> {
    if !(xi > 0.0 && xi < 0.5) {
        return Err(Error::InvalidInput(format!("xi must lie in (0, 1/2), got {xi}")));
    }
    if !(k > 0.0) || !(beta > 0.0) {
        return Err(Error::InvalidInput(format!(
            "beta and k must be positive, got beta = {beta}, k = {k}"
        )));
    }
    let threshold = interior_threshold(beta, xi, k);
    Ok(grid
        .nodes()
        .into_iter()
        .map(|x| x.min(1.0 - x) >= threshold)
        .collect())
}

pub fn interior_threshold(beta: f64, xi: f64, k: f64) -> f64 {
    beta * k.powf(xi - 0.5)
}
