//! Chain construction for the QST protocol families and the Bose-Hubbard
//! parameter mapping.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// An open XX chain: `N` sites, `N-1` couplings `J_i > 0` and `N` local
/// fields `h_i`, all in units of the bulk coupling `J = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    n_sites: usize,
    couplings: Vec<f64>,
    fields: Vec<f64>,
}

impl ChainSpec {
    pub fn new(couplings: Vec<f64>, fields: Vec<f64>) -> Result<Self> {
        let n_sites = fields.len();
        if n_sites < 2 {
            return Err(Error::InvalidLength { n_sites, min: 2 });
        }
        if couplings.len() != n_sites - 1 {
            return Err(Error::InvalidLength { n_sites: couplings.len() + 1, min: n_sites });
        }
        for &j in &couplings {
            if !j.is_finite() || j <= 0.0 {
                return Err(Error::NonPositivePerturbation(j));
            }
        }
        Ok(ChainSpec { n_sites, couplings, fields })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    /// Mirror symmetry `J_i = J_{N-i}`, `h_i = h_{N+1-i}`, which forces every
    /// eigenvector to be symmetric or antisymmetric about the chain center.
    pub fn is_mirror_symmetric(&self) -> bool {
        let n = self.n_sites;
        let sym = |a: f64, b: f64| (a - b).abs() < 1e-14;
        (0..n - 1).all(|i| sym(self.couplings[i], self.couplings[n - 2 - i]))
            && (0..n).all(|i| sym(self.fields[i], self.fields[n - 1 - i]))
    }
}

/// The six protocol families studied here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    /// Uniform chain, no perturbation.
    Uniform,
    /// 1-QST, weak outermost couplings `J_1 = J_{N-1} = xi` (protocol (iii)).
    WeakEdge1Q,
    /// 1-QST, strong fields on the edge spins `h_1 = h_N = xi` (protocol (i)).
    BarrierEdge1Q,
    /// 1-QST, strong fields next to the edges `h_2 = h_{N-1} = xi` (protocol (ii)).
    BarrierNN1Q,
    /// 2-QST, weak block couplings `J_2 = J_{N-2} = xi`.
    WeakBlock2Q,
    /// 2-QST, strong fields `h_3 = h_{N-2} = xi`.
    BarrierBlock2Q,
}

impl ProtocolKind {
    /// Number of qubits the protocol transfers.
    pub fn qubits(self) -> usize {
        match self {
            ProtocolKind::Uniform
            | ProtocolKind::WeakEdge1Q
            | ProtocolKind::BarrierEdge1Q
            | ProtocolKind::BarrierNN1Q => 1,
            ProtocolKind::WeakBlock2Q | ProtocolKind::BarrierBlock2Q => 2,
        }
    }

    fn min_sites(self) -> usize {
        match self.qubits() {
            2 => 4,
            _ => 2,
        }
    }

    fn is_weak(self) -> bool {
        matches!(self, ProtocolKind::WeakEdge1Q | ProtocolKind::WeakBlock2Q)
    }

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Uniform => "uniform",
            ProtocolKind::WeakEdge1Q => "weak-edge-1q",
            ProtocolKind::BarrierEdge1Q => "barrier-edge-1q",
            ProtocolKind::BarrierNN1Q => "barrier-nn-1q",
            ProtocolKind::WeakBlock2Q => "weak-block-2q",
            ProtocolKind::BarrierBlock2Q => "barrier-block-2q",
        }
    }
}

/// A protocol kind plus its perturbation strength `xi` (a weak coupling `J_0`
/// for the weak kinds, a field strength `h` for the barrier kinds) and the
/// chain length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolConfig {
    pub kind: ProtocolKind,
    pub perturbation: f64,
    pub n_sites: usize,
}

/// Build the chain realizing a protocol: bulk couplings 1, perturbed bonds or
/// fields per kind.
pub fn build_chain(config: &ProtocolConfig) -> Result<ChainSpec> {
    let n = config.n_sites;
    let xi = config.perturbation;
    let min = config.kind.min_sites();
    if n < min {
        return Err(Error::InvalidLength { n_sites: n, min });
    }
    if config.kind.is_weak() && (!xi.is_finite() || xi <= 0.0) {
        return Err(Error::NonPositivePerturbation(xi));
    }
    let mut couplings = vec![1.0; n - 1];
    let mut fields = vec![0.0; n];
    match config.kind {
        ProtocolKind::Uniform => {}
        ProtocolKind::WeakEdge1Q => {
            couplings[0] = xi;
            couplings[n - 2] = xi;
        }
        ProtocolKind::BarrierEdge1Q => {
            fields[0] = xi;
            fields[n - 1] = xi;
        }
        ProtocolKind::BarrierNN1Q => {
            fields[1] = xi;
            fields[n - 2] = xi;
        }
        ProtocolKind::WeakBlock2Q => {
            couplings[1] = xi;
            couplings[n - 3] = xi;
        }
        ProtocolKind::BarrierBlock2Q => {
            fields[2] = xi;
            fields[n - 3] = xi;
        }
    }
    ChainSpec::new(couplings, fields)
}

/// Effective XXZ parameters of hard-core bosons on a lattice: coupling `K`
/// and anisotropy `Delta = V / K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveXxzParams {
    pub coupling_k: f64,
    pub anisotropy_delta: f64,
}

/// Map Bose-Hubbard parameters (hopping `t`, nearest-neighbor interaction
/// `V`, half-integer filling `f`, hard-core limit) to the effective XXZ
/// couplings: `K = 2t(f + 1/2)`, `Delta = V/K`.
pub fn bose_hubbard_to_xxz(
    hopping_t: f64,
    nn_interaction_v: f64,
    filling_f: f64,
) -> Result<EffectiveXxzParams> {
    if !hopping_t.is_finite() || hopping_t <= 0.0 {
        return Err(Error::NonPositiveHopping(hopping_t));
    }
    let doubled = 2.0 * filling_f;
    if !filling_f.is_finite() || filling_f <= 0.0 || (doubled - libm::round(doubled)).abs() > 1e-12
    {
        return Err(Error::NonHalfIntegerFilling(filling_f));
    }
    let coupling_k = 2.0 * hopping_t * (filling_f + 0.5);
    Ok(EffectiveXxzParams { coupling_k, anisotropy_delta: nn_interaction_v / coupling_k })
}
