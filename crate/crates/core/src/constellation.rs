//! Unit-average-power constellations: square/cross QAM and PSK.
//!
//! Symbols are addressed by natural binary index (no Gray mapping), in
//! row-major order over the QAM grid.

use alloc::vec;
use alloc::vec::Vec;

use crate::numerics::Complex64;
use crate::{is_power_of_two, Error, Result};

/// `M`-ary QAM with unit average power. `M = 1` is the unmodulated
/// carrier (`x = 1`). Even `log2(M)` gives square QAM; `M = 8` is a 4x2
/// rectangle; `M = 32` and `M = 128` are cross constellations.
pub fn qam(m: usize) -> Result<Vec<Complex64>> {
    if !is_power_of_two(m) {
        return Err(Error::NotPowerOfTwo { name: "M", value: m });
    }
    if m == 1 {
        return Ok(vec![Complex64::new(1.0, 0.0)]);
    }
    let bits = m.trailing_zeros();
    let points: Vec<Complex64> = if bits % 2 == 0 {
        // square: side x side grid at odd integer coordinates
        let side = 1usize << (bits / 2);
        grid_points(side, side, |_, _| true)
    } else if m == 2 {
        grid_points(2, 1, |_, _| true)
    } else if m == 8 {
        grid_points(4, 2, |_, _| true)
    } else {
        // cross: (3s/2 x 3s/2) grid with (s/4 x s/4) corners removed,
        // where s = 2^((bits-1)/2); covers M = 32, 128, 512, ...
        let s = 1usize << ((bits - 1) / 2);
        let side = 3 * s / 2;
        let corner = s / 4;
        grid_points(side, side, |row, col| {
            let near_v = row < corner || row >= side - corner;
            let near_h = col < corner || col >= side - corner;
            !(near_v && near_h)
        })
    };
    debug_assert_eq!(points.len(), m);
    Ok(normalize(points))
}

/// `M`-ary PSK with unit power: `exp(j 2 pi (m-1) / M)`.
pub fn psk(m: usize) -> Result<Vec<Complex64>> {
    if m == 0 {
        return Err(Error::InvalidParameters { reason: "PSK order must be positive" });
    }
    Ok((0..m)
        .map(|i| {
            let phi = 2.0 * core::f64::consts::PI * i as f64 / m as f64;
            Complex64::new(libm::cos(phi), libm::sin(phi))
        })
        .collect())
}

fn grid_points(cols: usize, rows: usize, keep: impl Fn(usize, usize) -> bool) -> Vec<Complex64> {
    let mut points = Vec::new();
    for row in 0..rows {
        for col in 0..cols {
            if keep(row, col) {
                let re = 2.0 * col as f64 - (cols as f64 - 1.0);
                let im = (rows as f64 - 1.0) - 2.0 * row as f64;
                points.push(Complex64::new(re, im));
            }
        }
    }
    points
}

fn normalize(points: Vec<Complex64>) -> Vec<Complex64> {
    let power: f64 = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / points.len() as f64;
    let scale = 1.0 / libm::sqrt(power);
    points.into_iter().map(|p| p * scale).collect()
}
