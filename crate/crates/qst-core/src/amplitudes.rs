//! Single- and two-particle transition amplitudes from the spectral
//! decomposition.
//!
//! The single-particle amplitude is the spectral sum
//! `f_n^m(t) = sum_k e^{-i eps_k t} a[m][k] a[n][k]`; the two-particle
//! amplitude of the free-fermion chain reduces to a 2x2 determinant of
//! single-particle amplitudes.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::spectral::SpectralDecomposition;
use crate::{Error, Result};

/// All single-particle amplitudes `f_n^m` at a fixed time.
#[derive(Debug, Clone)]
pub struct AmplitudeMatrix {
    time: f64,
    n_sites: usize,
    /// Row-major `N x N`, entry `(n-1)*N + (m-1)` is `f_n^m`.
    entries: Vec<Complex64>,
}

impl AmplitudeMatrix {
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// `f_n^m(t)`, sites 1-based.
    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.entries[(n - 1) * self.n_sites + (m - 1)]
    }

    /// Row `f_n^m` for all `m`, site 1-based.
    pub fn row(&self, n: usize) -> &[Complex64] {
        &self.entries[(n - 1) * self.n_sites..n * self.n_sites]
    }
}

fn check_site(site: usize, n: usize) -> Result<()> {
    if site == 0 || site > n {
        return Err(Error::IndexOutOfRange { index: site, n_sites: n });
    }
    Ok(())
}

/// Phase factors `e^{-i eps_k t}` for all eigenstates.
fn phases(decomp: &SpectralDecomposition, t: f64) -> Vec<Complex64> {
    decomp
        .eigenvalues()
        .iter()
        .map(|&eps| {
            let arg = -eps * t;
            Complex64::new(libm::cos(arg), libm::sin(arg))
        })
        .collect()
}

/// `f_n^m(t)` for a single pair of sites (1-based).
pub fn single_amplitude(
    decomp: &SpectralDecomposition,
    n: usize,
    m: usize,
    t: f64,
) -> Result<Complex64> {
    let size = decomp.n_sites();
    check_site(n, size)?;
    check_site(m, size)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, phase) in phases(decomp, t).into_iter().enumerate() {
        acc += phase * (decomp.amp(m, k + 1) * decomp.amp(n, k + 1));
    }
    Ok(acc)
}

/// One row of the amplitude matrix, `f_s^m(t)` for all `m`, in O(N^2).
/// This is the work unit of the time-grid scans: fidelities only need one or
/// two sender rows per time point.
pub fn amplitude_row(decomp: &SpectralDecomposition, s: usize, t: f64) -> Result<Vec<Complex64>> {
    let n = decomp.n_sites();
    check_site(s, n)?;
    let mut row = alloc::vec![Complex64::new(0.0, 0.0); n];
    for (k, phase) in phases(decomp, t).into_iter().enumerate() {
        let w = phase * decomp.amp(s, k + 1);
        for (m, out) in row.iter_mut().enumerate() {
            *out += w * decomp.amp(m + 1, k + 1);
        }
    }
    Ok(row)
}

/// The full amplitude matrix at time `t`, assembled from phase-weighted
/// outer products of the eigenvectors. The decomposition is reused across
/// time points; nothing is re-diagonalized here.
pub fn amplitude_matrix(decomp: &SpectralDecomposition, t: f64) -> AmplitudeMatrix {
    let n = decomp.n_sites();
    let mut entries = alloc::vec![Complex64::new(0.0, 0.0); n * n];
    for (k, phase) in phases(decomp, t).into_iter().enumerate() {
        let v = decomp.eigenvector(k + 1);
        for i in 0..n {
            let w = phase * v[i];
            let row = &mut entries[i * n..(i + 1) * n];
            for (j, out) in row.iter_mut().enumerate() {
                *out += w * v[j];
            }
        }
    }
    AmplitudeMatrix { time: t, n_sites: n, entries }
}

/// Two-particle amplitude `g_{nm}^{pq}` as the determinant
/// `| f_n^p  f_n^q ; f_m^p  f_m^q |`, for canonical ordered pairs
/// `n < m`, `p < q`.
pub fn two_particle_amplitude(
    ampl: &AmplitudeMatrix,
    n: usize,
    m: usize,
    p: usize,
    q: usize,
) -> Result<Complex64> {
    if n >= m || p >= q {
        return Err(Error::UnorderedPair);
    }
    let size = ampl.n_sites();
    check_site(m, size)?;
    check_site(q, size)?;
    Ok(det2(ampl, n, m, p, q))
}

/// The raw determinant, defined for any site pairs; antisymmetric under
/// swapping either pair.
pub(crate) fn det2(ampl: &AmplitudeMatrix, n: usize, m: usize, p: usize, q: usize) -> Complex64 {
    ampl.get(n, p) * ampl.get(m, q) - ampl.get(n, q) * ampl.get(m, p)
}

/// Same determinant from two precomputed sender rows (`rows[i][m-1] = f_{s_i}^m`).
pub(crate) fn det2_rows(row_n: &[Complex64], row_m: &[Complex64], p: usize, q: usize) -> Complex64 {
    row_n[p - 1] * row_m[q - 1] - row_n[q - 1] * row_m[p - 1]
}
