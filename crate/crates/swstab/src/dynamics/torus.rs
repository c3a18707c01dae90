//! FFT plumbing on the uniform grid of T^d, d in {1, 2}.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::modes::Mode;
use crate::torus_volume;

/// Uniform n^d grid with cached FFT plans. Grid index = i0 + n * i1.
#[derive(Clone)]
pub struct TorusGrid {
    pub d: usize,
    pub n: usize,
    pub len: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// |m|^2 for each spectral index.
    pub k2: Vec<f64>,
    /// Signed mode for each spectral index.
    pub modes: Vec<Mode>,
}

impl std::fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TorusGrid")
            .field("d", &self.d)
            .field("n", &self.n)
            .finish()
    }
}

impl TorusGrid {
    pub fn new(d: usize, n: usize) -> Self {
        assert!((1..=2).contains(&d));
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let len = n.pow(d as u32);
        let signed = |i: usize| -> i64 {
            if i < n / 2 {
                i as i64
            } else {
                i as i64 - n as i64
            }
        };
        let modes: Vec<Mode> = (0..len)
            .map(|idx| {
                if d == 1 {
                    Mode::one_d(signed(idx))
                } else {
                    Mode::new(&[signed(idx % n), signed(idx / n)])
                }
            })
            .collect();
        let k2 = modes.iter().map(|m| m.norm2() as f64).collect();
        TorusGrid {
            d,
            n,
            len,
            fwd,
            inv,
            k2,
            modes,
        }
    }

    /// Grid point coordinates of index idx.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let h = 2.0 * std::f64::consts::PI / self.n as f64;
        if self.d == 1 {
            [h * idx as f64, 0.0]
        } else {
            [h * (idx % self.n) as f64, h * (idx / self.n) as f64]
        }
    }

    pub fn index_of(&self, m: &Mode) -> usize {
        let n = self.n as i64;
        let i0 = m.c[0].rem_euclid(n) as usize;
        if self.d == 1 {
            i0
        } else {
            i0 + self.n * m.c[1].rem_euclid(n) as usize
        }
    }

    /// True if every component of m lies strictly inside (-n/2, n/2).
    pub fn resolves(&self, m: &Mode) -> bool {
        m.linf() < (self.n / 2) as i64
    }

    fn transform(&self, data: &mut [C64], plan: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.len);
        if self.d == 1 {
            plan.process(data);
            return;
        }
        let n = self.n;
        for row in data.chunks_exact_mut(n) {
            plan.process(row);
        }
        let mut col = vec![C64::new(0.0, 0.0); n];
        for i0 in 0..n {
            for i1 in 0..n {
                col[i1] = data[i0 + n * i1];
            }
            plan.process(&mut col);
            for i1 in 0..n {
                data[i0 + n * i1] = col[i1];
            }
        }
    }

    /// In place: grid values -> coefficients f_m = (2 pi)^{-d} int f e^{-imx}.
    pub fn forward(&self, data: &mut [C64]) {
        self.transform(data, &self.fwd);
        let s = 1.0 / self.len as f64;
        data.iter_mut().for_each(|v| *v *= s);
    }

    /// In place: coefficients -> grid values (plain synthesis sum).
    pub fn inverse(&self, data: &mut [C64]) {
        self.transform(data, &self.inv);
    }

    pub fn spectrum(&self, u: &[C64]) -> Vec<C64> {
        let mut s = u.to_vec();
        self.forward(&mut s);
        s
    }

    /// Coefficients of |u|^2.
    pub fn density_spectrum(&self, u: &[C64]) -> Vec<C64> {
        let mut rho: Vec<C64> = u.iter().map(|z| C64::new(z.norm_sqr(), 0.0)).collect();
        self.forward(&mut rho);
        rho
    }

    /// int |f|^2 dx computed on the grid.
    pub fn l2_sq(&self, u: &[C64]) -> f64 {
        torus_volume(self.d) / self.len as f64 * u.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// Applies exp(-i |m|^2 tau / 2) in Fourier space (free Schrodinger flow for time tau).
    pub fn kinetic_flow(&self, u: &mut [C64], tau: f64) {
        self.forward(u);
        for (v, k2) in u.iter_mut().zip(&self.k2) {
            *v *= C64::from_polar(1.0, -0.5 * k2 * tau);
        }
        self.inverse(u);
    }

    /// Synthesizes the real function sum_m f_m e^{imx} on the grid from a sparse spectrum.
    pub fn synthesize_real(&self, coeffs: &[(Mode, C64)]) -> Vec<f64> {
        let mut spec = vec![C64::new(0.0, 0.0); self.len];
        for (m, v) in coeffs {
            spec[self.index_of(m)] += v;
        }
        self.inverse(&mut spec);
        spec.into_iter().map(|z| z.re).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_inverse_roundtrip_2d() {
        let g = TorusGrid::new(2, 8);
        let u: Vec<C64> = (0..64).map(|i| C64::new(i as f64, (i * i) as f64 * 0.1)).collect();
        let mut v = u.clone();
        g.forward(&mut v);
        g.inverse(&mut v);
        for (a, b) in u.iter().zip(&v) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn single_mode_coefficient() {
        let g = TorusGrid::new(2, 16);
        let m = Mode::new(&[2, -3]);
        let u: Vec<C64> = (0..g.len)
            .map(|i| {
                let x = g.point(i);
                C64::from_polar(1.0, 2.0 * x[0] - 3.0 * x[1])
            })
            .collect();
        let s = g.spectrum(&u);
        assert!((s[g.index_of(&m)] - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((g.l2_sq(&u) - torus_volume(2)).abs() < 1e-10);
    }
}
