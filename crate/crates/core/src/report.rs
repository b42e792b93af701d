//! Report plumbing: the per-grid constants ledger embedded in every report,
//! and a stable config hash.

use serde::Serialize;

/// The discrete normalization constants in force for a grid of side `N`.
///
/// Reports embed these so that every number they contain can be traced to a
/// fixed convention; see the crate docs for the identities they scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantsLedger {
    pub n: usize,
    /// `sum_z |V_phi(psi)(z)|^2 = stft_energy_factor * ||psi||^2 ||phi||^2`.
    pub stft_energy_factor: f64,
    /// `sum_z ||S pi(z)* psi||^2 = operator_energy_factor * ||S||_HS^2 ||psi||^2`.
    pub operator_energy_factor: f64,
    /// Analysis followed by synthesis equals `inversion_factor * ||S||_HS^2` times the identity.
    pub inversion_factor: f64,
    /// `||V_phi psi|| <= window_change_scale * C_v^m ||phi||_{M1_v} ||psi||`.
    pub window_change_scale: f64,
    /// `<L_a phi, psi> = weyl_pairing_scale * sum_z a(z) conj(W(psi,phi)(z))`.
    pub weyl_pairing_scale: f64,
    /// `F_W(T)(z) = spreading_scale * tr(T rho(z)*)`.
    pub spreading_scale: f64,
    /// `F_sigma(F_sigma(f)) = symplectic_involution_factor * f`.
    pub symplectic_involution_factor: f64,
}

impl ConstantsLedger {
    pub fn for_side(n: usize) -> Self {
        let nf = n as f64;
        ConstantsLedger {
            n,
            stft_energy_factor: nf,
            operator_energy_factor: nf,
            inversion_factor: nf,
            window_change_scale: 1.0 / nf,
            weyl_pairing_scale: 1.0 / nf,
            spreading_scale: nf,
            symplectic_involution_factor: nf * nf,
        }
    }
}

/// FNV-1a over the canonical config string; stable across platforms, used to
/// stamp reports with the configuration that produced them.
pub fn config_hash(canonical: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in canonical.as_bytes() {
        hash ^= *byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01B3);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ledger_scales_with_grid_side() {
        let ledger = ConstantsLedger::for_side(5);
        assert_eq!(ledger.stft_energy_factor, 5.0);
        assert_eq!(ledger.window_change_scale, 0.2);
        assert_eq!(ledger.symplectic_involution_factor, 25.0);
    }

    #[test]
    fn config_hash_is_stable_and_sensitive() {
        let a = config_hash("identity-suite n=5 seed=1");
        assert_eq!(a, config_hash("identity-suite n=5 seed=1"));
        assert_ne!(a, config_hash("identity-suite n=5 seed=2"));
        // FNV-1a of the empty string.
        assert_eq!(config_hash(""), 0xcbf2_9ce4_8422_2325);
    }
}
