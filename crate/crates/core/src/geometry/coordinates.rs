//! Jacobian algebra of the straightening map `(X, Y, Z) -> (X, Y/g, Z/g)`.

use crate::error::{Error, Result};

pub type Mat3 = [[f64; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianProducts {
    /// `∂(x,y,z)/∂(X,Y,Z)`
    pub j: Mat3,
    /// `∂(X,Y,Z)/∂(x,y,z)`
    pub j_inv: Mat3,
    /// `J Jᵀ` in closed form.
    pub jjt: Mat3,
    pub det_j_inv: f64,
}

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Closed-form Jacobians at a point with wall radius `g`, slope `g_x` and
/// straightened transverse coordinates `(y, z)`.
pub fn jacobian_products(g: f64, g_x: f64, y: f64, z: f64) -> Result<JacobianProducts> {
    if !(g > 0.0) {
        return Err(Error::DegenerateGeometry { value: g });
    }
    let inv_g2 = 1.0 / (g * g);
    let j = [
        [1.0, 0.0, 0.0],
        [-g * g_x * y * inv_g2, g * inv_g2, 0.0],
        [-g * g_x * z * inv_g2, 0.0, g * inv_g2],
    ];
    let j_inv = [[1.0, 0.0, 0.0], [g_x * y, g, 0.0], [g_x * z, 0.0, g]];
    let g2 = g * g;
    let g3 = g2 * g;
    let inv_g4 = inv_g2 * inv_g2;
    let gx2 = g_x * g_x;
    let jjt = [
        [1.0, -g3 * g_x * y * inv_g4, -g3 * g_x * z * inv_g4],
        [
            -g3 * g_x * y * inv_g4,
            (g2 + g2 * gx2 * y * y) * inv_g4,
            g2 * gx2 * y * z * inv_g4,
        ],
        [
            -g3 * g_x * z * inv_g4,
            g2 * gx2 * y * z * inv_g4,
            (g2 + g2 * gx2 * z * z) * inv_g4,
        ],
    ];
    let det_j_inv = det3(&j_inv);
    Ok(JacobianProducts {
        j,
        j_inv,
        jjt,
        det_j_inv,
    })
}
