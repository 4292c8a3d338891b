//! Property test: the spectral fast path must agree with the spin-basis
//! sector-ED oracle, which shares no diagonalization code with it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qst_core::amplitudes;
use qst_core::chain::{build_chain, ProtocolConfig, ProtocolKind};
use qst_core::ed_oracle;
use qst_core::fidelity::{self, TransferSetup};
use qst_core::spectral;

const KINDS: &[(ProtocolKind, f64)] = &[
    (ProtocolKind::Uniform, 0.0),
    (ProtocolKind::WeakEdge1Q, 0.1),
    (ProtocolKind::BarrierEdge1Q, 5.0),
    (ProtocolKind::BarrierNN1Q, 5.0),
    (ProtocolKind::WeakBlock2Q, 0.1),
    (ProtocolKind::BarrierBlock2Q, 5.0),
];

#[test]
fn amplitudes_and_fidelity_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    for n in [4, 6, 9] {
        for &(kind, xi) in KINDS {
            let chain =
                build_chain(&ProtocolConfig { kind, perturbation: xi, n_sites: n }).unwrap();
            let decomp = spectral::diagonalize(&chain).unwrap();
            let setup = TransferSetup::default_2q(n).unwrap();
            for _ in 0..8 {
                let t = rng.gen::<f64>() * 500.0;
                let dev = ed_oracle::max_deviation(&chain, &decomp, t).unwrap();
                assert!(dev < 1e-9, "{} n={n} t={t}: amplitude dev {dev:e}", kind.name());

                let m = amplitudes::amplitude_matrix(&decomp, t);
                let fast = fidelity::fidelity_2q_exact(&m, &setup).unwrap();
                let oracle = ed_oracle::fidelity_2q(&chain, &setup, t).unwrap();
                let fdev = (fast - oracle).abs();
                assert!(fdev < 1e-8, "{} n={n} t={t}: fidelity dev {fdev:e}", kind.name());
            }
        }
    }
}
