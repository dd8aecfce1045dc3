//! Rayleigh fading channel draws and the sinc spatial-correlation model.
//!
//! The Tx-RIS link is a length-`N` vector `h` and the RIS-Rx link an
//! `n_R x N` matrix `G`, both IID `CN(0,1)` per entry. Spatial correlation
//! across RIS elements is applied on both hops as `h~ = R^{1/2} h` and
//! `G~ = G R^{1/2}`, with `R` built from the normalized sinc of the grid
//! distance between elements.

use rand::Rng;

use crate::numerics::{sample_cn01, CMatrix, CVector};
use crate::{Error, Result};

/// One draw of the two-hop channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// Tx-RIS channel, length `N`.
    pub h: CVector,
    /// RIS-Rx channel, `n_R x N`.
    pub g: CMatrix,
}

impl ChannelRealization {
    pub fn elements(&self) -> usize {
        self.h.len()
    }

    pub fn rx_antennas(&self) -> usize {
        self.g.rows()
    }
}

/// Draws an IID channel: every entry of `h` and `G` independent `CN(0,1)`.
pub fn draw_iid<R: Rng + ?Sized>(elements: usize, rx_antennas: usize, rng: &mut R) -> ChannelRealization {
    let h = sample_cn01(rng, elements);
    let g_data = sample_cn01(rng, rx_antennas * elements);
    let g = CMatrix::from_data(rx_antennas, elements, g_data).expect("sized above");
    ChannelRealization { h, g }
}

/// Geometry of the RIS element grid for the correlation model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationSpec {
    /// Grid columns; `grid_h * grid_v` must equal `N`.
    pub grid_h: usize,
    /// Grid rows.
    pub grid_v: usize,
    /// Element spacing in carrier wavelengths, `d_ris / lambda`.
    pub spacing_over_lambda: f64,
}

impl CorrelationSpec {
    pub fn elements(&self) -> usize {
        self.grid_h * self.grid_v
    }
}

/// Normalized sinc: `sin(pi x) / (pi x)`, `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = core::f64::consts::PI * x;
        libm::sin(px) / px
    }
}

/// Spatial correlation matrix: `r[m][n] = sinc(2 d_ris/lambda * d(m, n))`
/// with `d(m, n)` the Euclidean distance between elements `m` and `n` on a
/// unit-spaced `grid_h x grid_v` grid (adjacent elements at distance 1).
///
/// Elements are ordered row-major over `(grid_v, grid_h)`.
pub fn correlation_matrix(spec: &CorrelationSpec) -> Result<CMatrix> {
    if spec.grid_h == 0 || spec.grid_v == 0 {
        return Err(Error::InvalidDimensions { reason: "grid dimensions must be positive" });
    }
    if !(spec.spacing_over_lambda > 0.0) {
        return Err(Error::InvalidParameters { reason: "element spacing must be positive" });
    }
    let n = spec.elements();
    let mut r = CMatrix::zeros(n, n);
    let pos = |idx: usize| ((idx / spec.grid_h) as f64, (idx % spec.grid_h) as f64);
    for m in 0..n {
        let (ym, xm) = pos(m);
        for l in m..n {
            let (yl, xl) = pos(l);
            let d = libm::sqrt((ym - yl) * (ym - yl) + (xm - xl) * (xm - xl));
            let c = sinc(2.0 * spec.spacing_over_lambda * d);
            r[(m, l)] = crate::Complex64::new(c, 0.0);
            r[(l, m)] = crate::Complex64::new(c, 0.0);
        }
    }
    Ok(r)
}

/// Applies a precomputed correlation square root to both hops:
/// `h~ = R^{1/2} h`, `G~ = G R^{1/2}`.
pub fn apply_correlation(ch: &ChannelRealization, r_sqrt: &CMatrix) -> Result<ChannelRealization> {
    let n = ch.elements();
    if r_sqrt.rows() != n || r_sqrt.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: (n, n),
            got: (r_sqrt.rows(), r_sqrt.cols()),
        });
    }
    let h = r_sqrt.matvec(&ch.h)?;
    // G R^{1/2}: row i of the result is (R^{1/2})^T applied to row i of G;
    // R^{1/2} is Hermitian so (G R)_ij = sum_k G_ik R_kj.
    let g = ch.g.matmul(r_sqrt)?;
    Ok(ChannelRealization { h, g })
}
