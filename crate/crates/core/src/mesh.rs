//! Radial meshes on `[r_in, 1]` and nodal fields living on them.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};

pub const MIN_CELLS: usize = 8;

/// Surface measure `ω_{N-1} = 2π^{N/2}/Γ(N/2)` of the unit sphere in `R^N`.
/// Defined for real `N > 0`.
pub fn sphere_area(dim: f64) -> f64 {
    2.0 * std::f64::consts::PI.powf(dim / 2.0) / libm::tgamma(dim / 2.0)
}

/// `ω_{N-1} ∫_a^b r^{N-1} dr`, the `N`-volume of the shell `a < |x| < b`.
pub fn shell_volume(dim: f64, a: f64, b: f64) -> f64 {
    sphere_area(dim) * (b.powf(dim) - a.powf(dim)) / dim
}

/// Nodes `r_i = r_in + (1 - r_in)(i/M)^g`.
pub fn graded_nodes(cells: usize, grading: f64, r_in: f64) -> Vec<f64> {
    let m = cells as f64;
    let mut nodes: Vec<f64> = (0..=cells)
        .map(|i| r_in + (1.0 - r_in) * (i as f64 / m).powf(grading))
        .collect();
    nodes[cells] = 1.0;
    nodes
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialMesh {
    nodes: Vec<f64>,
    grading: Option<f64>,
}

impl RadialMesh {
    /// Graded mesh with at least [`MIN_CELLS`] cells.
    pub fn build(cells: usize, grading: f64, r_in: f64) -> Result<Self> {
        if cells < MIN_CELLS {
            return Err(Error::invalid(format!(
                "mesh needs at least {MIN_CELLS} cells, got {cells}"
            )));
        }
        if !(grading >= 1.0) || !grading.is_finite() {
            return Err(Error::invalid(format!("grading must be >= 1, got {grading}")));
        }
        if !(0.0..1.0).contains(&r_in) {
            return Err(Error::invalid(format!("inner radius must lie in [0, 1), got {r_in}")));
        }
        let mesh = RadialMesh { nodes: graded_nodes(cells, grading, r_in), grading: Some(grading) };
        mesh.check_increasing()?;
        Ok(mesh)
    }

    /// Mesh from explicit nodes; must be strictly increasing, end at 1, and
    /// start at a nonnegative radius.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::invalid("mesh needs at least two nodes"));
        }
        if nodes[0] < 0.0 || nodes[nodes.len() - 1] != 1.0 {
            return Err(Error::invalid("mesh must span [r_in, 1] with r_in >= 0"));
        }
        let mesh = RadialMesh { nodes, grading: None };
        mesh.check_increasing()?;
        Ok(mesh)
    }

    fn check_increasing(&self) -> Result<()> {
        if self.nodes.windows(2).all(|w| w[1] > w[0]) {
            Ok(())
        } else {
            Err(Error::invalid("mesh nodes must be strictly increasing"))
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Grading exponent, `None` for meshes built from explicit nodes.
    pub fn grading(&self) -> Option<f64> {
        self.grading
    }

    pub fn r_in(&self) -> f64 {
        self.nodes[0]
    }

    /// `true` when the mesh starts at the origin (a ball rather than an annulus).
    pub fn is_ball(&self) -> bool {
        self.nodes[0] == 0.0
    }

    /// Index of the first node carrying an unknown; at the origin this is 0,
    /// on an annulus the inner Dirichlet node is skipped.
    pub fn first_unknown(&self) -> usize {
        if self.is_ball() {
            0
        } else {
            1
        }
    }

    /// Dual cell `[r_{i-1/2}, r_{i+1/2}]` of node `i`, clipped to the domain.
    pub fn dual_cell(&self, i: usize) -> (f64, f64) {
        let n = &self.nodes;
        let lo = if i == 0 { n[0] } else { 0.5 * (n[i - 1] + n[i]) };
        let hi = if i + 1 == n.len() { n[i] } else { 0.5 * (n[i] + n[i + 1]) };
        (lo, hi)
    }

    /// Element volumes `ω ∫_{r_i}^{r_{i+1}} r^{N-1} dr`.
    pub fn element_volumes(&self, dim: f64) -> Vec<f64> {
        self.nodes.windows(2).map(|w| shell_volume(dim, w[0], w[1])).collect()
    }

    /// Volume of the whole domain.
    pub fn domain_volume(&self, dim: f64) -> f64 {
        shell_volume(dim, self.r_in(), 1.0)
    }
}

/// Nodal values of a radial function, linearly interpolated between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteField {
    mesh: Arc<RadialMesh>,
    dim: f64,
    values: Vec<f64>,
}

impl DiscreteField {
    pub fn new(mesh: Arc<RadialMesh>, dim: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.nodes().len() {
            return Err(Error::InvalidState(format!(
                "field has {} values for {} nodes",
                values.len(),
                mesh.nodes().len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidState("field contains NaN or infinite values".into()));
        }
        Ok(DiscreteField { mesh, dim, values })
    }

    pub fn zeros(mesh: Arc<RadialMesh>, dim: f64) -> Self {
        let values = vec![0.0; mesh.nodes().len()];
        DiscreteField { mesh, dim, values }
    }

    /// Sample `f` at every node, then impose the homogeneous boundary values.
    pub fn from_fn(mesh: Arc<RadialMesh>, dim: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut values: Vec<f64> = mesh.nodes().iter().map(|&r| f(r)).collect();
        let last = values.len() - 1;
        values[last] = 0.0;
        if !mesh.is_ball() {
            values[0] = 0.0;
        }
        Self::new(mesh, dim, values)
    }

    pub fn mesh(&self) -> &Arc<RadialMesh> {
        &self.mesh
    }

    pub fn dim(&self) -> f64 {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Nonnegativity and homogeneous Dirichlet data.
    pub fn check_admissible(&self) -> Result<()> {
        if self.min() < 0.0 {
            return Err(Error::InvalidState(format!("field has negative value {}", self.min())));
        }
        let last = *self.values.last().expect("nonempty");
        if last != 0.0 || (!self.mesh.is_ball() && self.values[0] != 0.0) {
            return Err(Error::InvalidState("field violates the boundary condition".into()));
        }
        Ok(())
    }

    /// Element difference quotients `(u_{i+1} - u_i)/(r_{i+1} - r_i)`.
    pub fn gradients(&self) -> Vec<f64> {
        let r = self.mesh.nodes();
        self.values
            .windows(2)
            .zip(r.windows(2))
            .map(|(u, r)| (u[1] - u[0]) / (r[1] - r[0]))
            .collect()
    }

    /// Piecewise-linear interpolant at radius `r`.
    pub fn interpolate(&self, r: f64) -> f64 {
        let nodes = self.mesh.nodes();
        let j = nodes.partition_point(|&x| x <= r).clamp(1, nodes.len() - 1);
        let (a, b) = (nodes[j - 1], nodes[j]);
        let s = ((r - a) / (b - a)).clamp(0.0, 1.0);
        self.values[j - 1] * (1.0 - s) + self.values[j] * s
    }

    /// Two-column `r u` text, 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(48 * self.values.len());
        for (r, u) in self.mesh.nodes().iter().zip(&self.values) {
            let _ = writeln!(out, "{r:.16e} {u:.16e}");
        }
        out
    }

    /// Inverse of [`DiscreteField::to_text`].
    pub fn from_text(text: &str, dim: f64) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split_whitespace().map(str::parse::<f64>);
            match (cols.next(), cols.next(), cols.next()) {
                (Some(Ok(r)), Some(Ok(u)), None) => {
                    nodes.push(r);
                    values.push(u);
                }
                _ => {
                    return Err(Error::InvalidState(format!(
                        "line {}: expected two numeric columns",
                        lineno + 1
                    )))
                }
            }
        }
        let mesh = Arc::new(RadialMesh::from_nodes(nodes)?);
        Self::new(mesh, dim, values)
    }
}
