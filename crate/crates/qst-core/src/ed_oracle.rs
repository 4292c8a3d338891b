//! Brute-force propagation in the spin basis for small chains.
//!
//! Ground truth for the spectral fast path: the Hamiltonian is assembled
//! directly in the magnetization sectors (no Jordan-Wigner, no fermionic
//! signs) and diagonalized with a dense cyclic Jacobi sweep, a code path
//! fully independent of the tridiagonal solver and the determinant identity
//! it validates.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::chain::ChainSpec;
use crate::fidelity::TransferSetup;
use crate::spectral::SpectralDecomposition;
use crate::{Error, Result};

/// Desk-scale cap on the chain length for dense sector work.
pub const SIZE_CAP: usize = 14;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Basis of a fixed-magnetization sector: ordered occupied-site sets
/// (empty, singletons, or lexicographic pairs).
#[derive(Debug, Clone)]
pub struct SectorBasis {
    n_sites: usize,
    excitation_count: usize,
    /// Occupied sites (1-based) of each basis state.
    states: Vec<Vec<usize>>,
}

impl SectorBasis {
    pub fn new(n_sites: usize, excitation_count: usize) -> Result<Self> {
        if n_sites > SIZE_CAP {
            return Err(Error::SizeCapExceeded { n_sites, cap: SIZE_CAP });
        }
        let states: Vec<Vec<usize>> = match excitation_count {
            0 => vec![vec![]],
            1 => (1..=n_sites).map(|n| vec![n]).collect(),
            2 => {
                let mut s = Vec::with_capacity(n_sites * (n_sites - 1) / 2);
                for n in 1..=n_sites {
                    for m in n + 1..=n_sites {
                        s.push(vec![n, m]);
                    }
                }
                s
            }
            _ => return Err(Error::InvalidSetup),
        };
        Ok(SectorBasis { n_sites, excitation_count, states })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn excitation_count(&self) -> usize {
        self.excitation_count
    }

    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    /// Index of the basis state with the given occupied sites.
    pub fn index_of(&self, occupied: &[usize]) -> Option<usize> {
        self.states.iter().position(|s| s == occupied)
    }
}

/// Dense sector Hamiltonian (row-major, `dim x dim`). Diagonal is
/// `sum_{occupied n} (-2 h_n)` in the vacuum-zero gauge; configurations
/// differing by one hop across bond `i` couple with `-2 J_i`.
pub fn sector_hamiltonian(chain: &ChainSpec, sector: &SectorBasis) -> Result<Vec<f64>> {
    let n = chain.n_sites();
    if n > SIZE_CAP {
        return Err(Error::SizeCapExceeded { n_sites: n, cap: SIZE_CAP });
    }
    let dim = sector.dim();
    let mut h = vec![0.0; dim * dim];
    for (a, state) in sector.states().iter().enumerate() {
        h[a * dim + a] = state.iter().map(|&site| -2.0 * chain.fields()[site - 1]).sum();
        // hop each occupied site to a free neighbor
        for (slot, &site) in state.iter().enumerate() {
            for target in [site.wrapping_sub(1), site + 1] {
                if target == 0 || target > n || state.contains(&target) {
                    continue;
                }
                let mut moved = state.clone();
                moved[slot] = target;
                moved.sort_unstable();
                let b = sector.index_of(&moved).unwrap();
                let bond = site.min(target); // 1-based bond index
                h[a * dim + b] = -2.0 * chain.couplings()[bond - 1];
            }
        }
    }
    Ok(h)
}

/// `e^{-iHt} |initial>` via dense Jacobi diagonalization of the sector
/// matrix.
pub fn sector_propagate(
    hmat: &[f64],
    dim: usize,
    initial: usize,
    t: f64,
) -> Result<Vec<Complex64>> {
    let (eigvals, eigvecs) = jacobi_eigen(hmat, dim)?;
    // psi = V e^{-i lambda t} V^T e_initial
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for k in 0..dim {
        let overlap = eigvecs[k * dim + initial];
        let arg = -eigvals[k] * t;
        let w = Complex64::new(libm::cos(arg), libm::sin(arg)) * overlap;
        for (i, o) in out.iter_mut().enumerate() {
            *o += w * eigvecs[k * dim + i];
        }
    }
    Ok(out)
}

/// Cyclic Jacobi for a dense symmetric matrix. Returns eigenvalues and
/// eigenvectors (eigenvector `k` is `vecs[k*dim..(k+1)*dim]`).
fn jacobi_eigen(mat: &[f64], dim: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut a = mat.to_vec();
    let mut v = vec![0.0; dim * dim];
    for i in 0..dim {
        v[i * dim + i] = 1.0;
    }
    if dim == 1 {
        return Ok((vec![a[0]], v));
    }
    let fro_sq: f64 = a.iter().map(|x| x * x).sum();
    let threshold = (4.0 * f64::EPSILON) * (4.0 * f64::EPSILON) * fro_sq;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..dim {
            for q in p + 1..dim {
                off += a[p * dim + q] * a[p * dim + q];
            }
        }
        if off <= threshold {
            let eigvals: Vec<f64> = (0..dim).map(|i| a[i * dim + i]).collect();
            // v currently holds rotations as rows of V^T; transpose to columns
            let mut vecs = vec![0.0; dim * dim];
            for k in 0..dim {
                for i in 0..dim {
                    vecs[k * dim + i] = v[i * dim + k];
                }
            }
            return Ok((eigvals, vecs));
        }
        for p in 0..dim {
            for q in p + 1..dim {
                let apq = a[p * dim + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * dim + p];
                let aqq = a[q * dim + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t_rot =
                    libm::copysign(1.0, theta) / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t_rot * t_rot + 1.0);
                let s = t_rot * c;
                for i in 0..dim {
                    let aip = a[i * dim + p];
                    let aiq = a[i * dim + q];
                    a[i * dim + p] = c * aip - s * aiq;
                    a[i * dim + q] = s * aip + c * aiq;
                }
                for i in 0..dim {
                    let api = a[p * dim + i];
                    let aqi = a[q * dim + i];
                    a[p * dim + i] = c * api - s * aqi;
                    a[q * dim + i] = s * api + c * aqi;
                }
                for i in 0..dim {
                    let vip = v[i * dim + p];
                    let viq = v[i * dim + q];
                    v[i * dim + p] = c * vip - s * viq;
                    v[i * dim + q] = s * vip + c * viq;
                }
            }
        }
    }
    Err(Error::ConvergenceFailure)
}

/// Oracle single-particle amplitude `f_n^m(t)` from one-excitation-sector
/// propagation.
pub fn single_amplitude(chain: &ChainSpec, n: usize, m: usize, t: f64) -> Result<Complex64> {
    let basis = SectorBasis::new(chain.n_sites(), 1)?;
    let h = sector_hamiltonian(chain, &basis)?;
    let init = basis
        .index_of(&[n])
        .ok_or(Error::IndexOutOfRange { index: n, n_sites: chain.n_sites() })?;
    let psi = sector_propagate(&h, basis.dim(), init, t)?;
    let dst = basis
        .index_of(&[m])
        .ok_or(Error::IndexOutOfRange { index: m, n_sites: chain.n_sites() })?;
    Ok(psi[dst])
}

/// Oracle two-particle amplitude `g_{nm}^{pq}(t)` from two-excitation-sector
/// propagation, `n < m`, `p < q`.
pub fn two_particle_amplitude(
    chain: &ChainSpec,
    n: usize,
    m: usize,
    p: usize,
    q: usize,
    t: f64,
) -> Result<Complex64> {
    if n >= m || p >= q {
        return Err(Error::UnorderedPair);
    }
    let basis = SectorBasis::new(chain.n_sites(), 2)?;
    let h = sector_hamiltonian(chain, &basis)?;
    let init = basis.index_of(&[n, m]).ok_or(Error::InvalidSetup)?;
    let psi = sector_propagate(&h, basis.dim(), init, t)?;
    let dst = basis.index_of(&[p, q]).ok_or(Error::InvalidSetup)?;
    Ok(psi[dst])
}

/// Oracle-side 2-QST average fidelity: every amplitude comes from dense
/// sector propagation, and the fidelity expression is written out here
/// independently of the fidelity module.
pub fn fidelity_2q(chain: &ChainSpec, setup: &TransferSetup, t: f64) -> Result<f64> {
    if setup.senders().len() != 2 {
        return Err(Error::SetupArityMismatch { expected: 2, got: setup.senders().len() });
    }
    let size = chain.n_sites();
    let (s1, s2) = (setup.senders()[0], setup.senders()[1]);
    let (r1, r2) = (setup.receivers()[0], setup.receivers()[1]);

    // propagate once per sector
    let basis1 = SectorBasis::new(size, 1)?;
    let h1 = sector_hamiltonian(chain, &basis1)?;
    let psi_s1 = sector_propagate(&h1, basis1.dim(), basis1.index_of(&[s1]).unwrap(), t)?;
    let psi_s2 = sector_propagate(&h1, basis1.dim(), basis1.index_of(&[s2]).unwrap(), t)?;
    let f = |s: usize, m: usize| if s == s1 { psi_s1[m - 1] } else { psi_s2[m - 1] };

    let basis2 = SectorBasis::new(size, 2)?;
    let h2 = sector_hamiltonian(chain, &basis2)?;
    let psi2 = sector_propagate(&h2, basis2.dim(), basis2.index_of(&[s1, s2]).unwrap(), t)?;
    // g(p, q) for arbitrary distinct p, q, antisymmetric under swap
    let g = |p: usize, q: usize| -> Complex64 {
        if p == q {
            return Complex64::new(0.0, 0.0);
        }
        let (lo, hi) = if p < q { (p, q) } else { (q, p) };
        let amp = psi2[basis2.index_of(&[lo, hi]).unwrap()];
        if p < q {
            amp
        } else {
            -amp
        }
    };

    let f11 = f(s1, r1);
    let f22 = f(s2, r2);
    let f12 = f(s1, r2);
    let f21 = f(s2, r1);
    let grr = g(r1, r2);

    let mut fbar = 0.25
        + 5.0 / 54.0 * (f11 + f22 + 7.0 / 5.0 * f22 * f11.conj() + (f11 + f22) * grr.conj()).re
        + 1.0 / 54.0 * (f21.norm_sqr() + f12.norm_sqr())
        + 5.0 / 108.0 * (f22.norm_sqr() + f11.norm_sqr())
        + 1.0 / 36.0 * grr.norm_sqr()
        + 7.0 / 54.0 * grr.re;
    for site in 1..=size {
        if site == r1 || site == r2 {
            continue;
        }
        let gn1 = g(site, r1);
        let gn2 = g(site, r2);
        fbar -= 1.0 / 54.0 * (gn1.norm_sqr() + gn2.norm_sqr());
        fbar -= 1.0 / 27.0 * (f(s2, site).conj() * gn1 + f(s1, site).conj() * gn2).re;
    }
    Ok(fbar)
}

/// Compare the spectral fast path against the oracle at one time; returns the
/// worst deviation over all single-particle amplitudes and a set of
/// two-particle amplitudes out of the edge pair.
pub fn max_deviation(chain: &ChainSpec, decomp: &SpectralDecomposition, t: f64) -> Result<f64> {
    let n = chain.n_sites();
    let mut worst = 0.0f64;
    let ampl = crate::amplitudes::amplitude_matrix(decomp, t);

    let basis1 = SectorBasis::new(n, 1)?;
    let h1 = sector_hamiltonian(chain, &basis1)?;
    for src in 1..=n {
        let psi = sector_propagate(&h1, basis1.dim(), src - 1, t)?;
        for dst in 1..=n {
            worst = worst.max((psi[dst - 1] - ampl.get(src, dst)).norm());
        }
    }

    let basis2 = SectorBasis::new(n, 2)?;
    let h2 = sector_hamiltonian(chain, &basis2)?;
    let init = basis2.index_of(&[1, 2]).unwrap();
    let psi2 = sector_propagate(&h2, basis2.dim(), init, t)?;
    for (idx, state) in basis2.states().iter().enumerate() {
        let det = crate::amplitudes::two_particle_amplitude(&ampl, 1, 2, state[0], state[1])?;
        worst = worst.max((psi2[idx] - det).norm());
    }
    Ok(worst)
}
