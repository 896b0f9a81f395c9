//! Meshes and the finite-volume pieces shared by the steady and transient
//! solvers: cell conductances `1/∫_cell 1/h`, nodal masses and
//! Scharfetter-Gummel fluxes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ChannelProfile, ProfileKind};
use crate::numerics::{bernoulli, bernoulli_derivative};
use crate::problem::IonSpecies;

/// Width (in units of `mu`) of the refined zone at each end.
pub const LAYER_WIDTH_FACTOR: f64 = 8.0;
/// Fraction of all intervals placed inside the two refined zones.
pub const LAYER_NODE_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GradingKind {
    Uniform,
    #[default]
    Tanh,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Grading {
    Uniform,
    /// `x(t) = 1/2 + tanh(beta (2t - 1)) / (2 tanh beta)`
    Tanh { beta: f64, layer_width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mesh {
    nodes: Vec<f64>,
    grading: Grading,
}

impl Mesh {
    /// `n` equal intervals.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::BadParameters(format!("need at least 2 intervals, got {n}")));
        }
        let nodes = (0..=n).map(|k| k as f64 / n as f64).collect();
        Ok(Self {
            nodes,
            grading: Grading::Uniform,
        })
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 || nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
            return Err(Error::BadParameters("mesh must start at 0 and end at 1".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::BadParameters("mesh nodes must increase strictly".into()));
        }
        Ok(Self {
            nodes,
            grading: Grading::Uniform,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    /// Number of intervals.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn spacing(&self, cell: usize) -> f64 {
        self.nodes[cell + 1] - self.nodes[cell]
    }
}

/// Solves `tanh(ratio beta) / tanh(beta) = target` for `beta > 0`.
fn stretching_parameter(ratio: f64, target: f64) -> f64 {
    let f = |b: f64| (ratio * b).tanh() / b.tanh() - target;
    let (mut lo, mut hi) = (1e-8, 1.0);
    while f(hi) < 0.0 && hi < 700.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `n` intervals, with a quarter of them inside `[0, 8 mu]` and another
/// quarter inside `[1 - 8 mu, 1]`. Falls back to a uniform mesh when the
/// layers are too wide for stretching to help.
pub fn build_layer_mesh(n: usize, mu: f64, grading: GradingKind) -> Result<Mesh> {
    if grading == GradingKind::Uniform {
        return Mesh::uniform(n);
    }
    if n < 11 {
        return Err(Error::BadParameters(format!("N = {n} must be at least 11")));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::BadParameters(format!("mu = {mu} must be positive")));
    }
    let width = LAYER_WIDTH_FACTOR * mu;
    let t_edge = 0.5 * LAYER_NODE_FRACTION;
    // Uniform spacing already puts t_edge of the nodes within `width`.
    if width >= t_edge {
        return Mesh::uniform(n);
    }
    let beta = stretching_parameter(1.0 - 2.0 * t_edge, 1.0 - 2.0 * width);
    let tb = beta.tanh();
    let map = |t: f64| 0.5 + 0.5 * (beta * (2.0 * t - 1.0)).tanh() / tb;
    let mut nodes = vec![0.0; n + 1];
    for k in 0..=n / 2 {
        let x = map(k as f64 / n as f64);
        nodes[k] = x;
        nodes[n - k] = 1.0 - x;
    }
    nodes[0] = 0.0;
    nodes[n] = 1.0;
    if n % 2 == 0 {
        nodes[n / 2] = 0.5;
    }
    if nodes.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::BadParameters(format!(
            "stretching with mu = {mu} and N = {n} collapses mesh cells"
        )));
    }
    Ok(Mesh {
        nodes,
        grading: Grading::Tanh {
            beta,
            layer_width: width,
        },
    })
}

/// Geometry of a mesh: cell conductances and nodal masses.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGeometry {
    /// `G_i = 1 / ∫_{x_i}^{x_{i+1}} 1/h`, one per cell.
    pub conductance: Vec<f64>,
    /// `m_i = h(x_i) (dx_{i-1/2} + dx_{i+1/2}) / 2`, one per node.
    pub mass: Vec<f64>,
    pub h_nodes: Vec<f64>,
}

pub fn cell_geometry(mesh: &Mesh, profile: &ChannelProfile) -> Result<CellGeometry> {
    let x = mesh.nodes();
    let n = mesh.intervals();
    let mut conductance = Vec::with_capacity(n);
    for i in 0..n {
        let dx = x[i + 1] - x[i];
        let g = match profile.kind() {
            ProfileKind::Constant { value } => value / dx,
            _ => {
                let tol = 1e-14 * dx;
                1.0 / profile.inverse_area_integral(x[i], x[i + 1], tol)?
            }
        };
        conductance.push(g);
    }
    let h_nodes: Vec<f64> = x.iter().map(|&xi| profile.h(xi)).collect();
    let mass = (0..=n)
        .map(|i| {
            let left = if i > 0 { x[i] - x[i - 1] } else { 0.0 };
            let right = if i < n { x[i + 1] - x[i] } else { 0.0 };
            h_nodes[i] * 0.5 * (left + right)
        })
        .collect();
    Ok(CellGeometry {
        conductance,
        mass,
        h_nodes,
    })
}

/// Exponentially fitted flux of `-h (c' + z c phi')` across a cell with
/// conductance `g`.
#[inline]
pub fn sg_flux(g: f64, z: f64, phi_l: f64, phi_r: f64, c_l: f64, c_r: f64) -> f64 {
    let d = z * (phi_r - phi_l);
    g * (bernoulli(d) * c_l - bernoulli(-d) * c_r)
}

/// Partial derivatives of [`sg_flux`] with respect to
/// `(phi_l, phi_r, c_l, c_r)`.
#[inline]
pub fn sg_flux_partials(g: f64, z: f64, phi_l: f64, phi_r: f64, c_l: f64, c_r: f64) -> [f64; 4] {
    let d = z * (phi_r - phi_l);
    let dd = g * (bernoulli_derivative(d) * c_l + bernoulli_derivative(-d) * c_r);
    [-z * dd, z * dd, g * bernoulli(d), -g * bernoulli(-d)]
}

/// Signed valences `(alpha1, -alpha2)`.
pub fn valences(species: &IonSpecies) -> [f64; 2] {
    [species.alpha1, -species.alpha2]
}

/// Cellwise fluxes of both species for nodal fields.
pub fn cell_fluxes(
    geom: &CellGeometry,
    species: &IonSpecies,
    phi: &[f64],
    c1: &[f64],
    c2: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let z = valences(species);
    let n = geom.conductance.len();
    let mut j1 = Vec::with_capacity(n);
    let mut j2 = Vec::with_capacity(n);
    for i in 0..n {
        let g = geom.conductance[i];
        j1.push(sg_flux(g, z[0], phi[i], phi[i + 1], c1[i], c1[i + 1]));
        j2.push(sg_flux(g, z[1], phi[i], phi[i + 1], c2[i], c2[i + 1]));
    }
    (j1, j2)
}

/// `∫_x^1 1/h` at every node, from the cell conductances.
pub fn tail_inverse_area(geom: &CellGeometry) -> Vec<f64> {
    let n = geom.conductance.len();
    let mut out = vec![0.0; n + 1];
    for i in (0..n).rev() {
        out[i] = out[i + 1] + 1.0 / geom.conductance[i];
    }
    out
}
