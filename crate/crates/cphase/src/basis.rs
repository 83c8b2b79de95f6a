//! Product-basis enumeration for the atomic schemes.
//!
//! Enumeration order is fixed: photon-major (occupations in lexicographic
//! order, mode a before mode b), atom-minor (scheme level order as listed in
//! [`Scheme::levels`]). Every Hamiltonian and jump-operator builder in this
//! crate indexes states through this enumeration.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Atomic level set selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Single two-level atom, one dual-rail mode holding up to two photons.
    TwoLevel,
    /// Single V-type atom: ground state plus two excited states.
    VThreeLevel,
    /// Single M-type atom: V system plus two driven auxiliary ground states.
    MFiveLevel,
    /// Two V-type atoms restricted to the symmetric collective subspace.
    TwoAtomCollectiveV,
}

/// Symbolic atomic level, covering every scheme's level set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomLevel {
    /// Single-atom ground state, or the collective all-ground state.
    G,
    /// Two-level excited state.
    E,
    Ea,
    Eb,
    Ga,
    Gb,
    /// Symmetric single excitation of type a (ψ_a).
    PsiA,
    /// Symmetric single excitation of type b (ψ_b).
    PsiB,
    /// Symmetric double excitation, one a and one b (ψ_ab).
    PsiAb,
}

impl fmt::Display for AtomLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AtomLevel::G => "g",
            AtomLevel::E => "e",
            AtomLevel::Ea => "e_a",
            AtomLevel::Eb => "e_b",
            AtomLevel::Ga => "g_a",
            AtomLevel::Gb => "g_b",
            AtomLevel::PsiA => "psi_a",
            AtomLevel::PsiB => "psi_b",
            AtomLevel::PsiAb => "psi_ab",
        };
        f.write_str(s)
    }
}

impl Scheme {
    /// Atomic levels of the scheme, in enumeration order.
    pub fn levels(&self) -> &'static [AtomLevel] {
        use AtomLevel::*;
        match self {
            Scheme::TwoLevel => &[G, E],
            Scheme::VThreeLevel => &[G, Ea, Eb],
            Scheme::MFiveLevel => &[G, Ea, Eb, Ga, Gb],
            Scheme::TwoAtomCollectiveV => &[G, PsiA, PsiB, PsiAb],
        }
    }

    /// Number of photon modes the scheme is defined for.
    pub fn photon_modes(&self) -> usize {
        match self {
            Scheme::TwoLevel => 1,
            _ => 2,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Scheme::TwoLevel => "two_level",
            Scheme::VThreeLevel => "v_three_level",
            Scheme::MFiveLevel => "m_five_level",
            Scheme::TwoAtomCollectiveV => "two_atom_collective_v",
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two_level" => Ok(Scheme::TwoLevel),
            "v_three_level" => Ok(Scheme::VThreeLevel),
            "m_five_level" => Ok(Scheme::MFiveLevel),
            "two_atom_collective_v" => Ok(Scheme::TwoAtomCollectiveV),
            other => Err(Error::UnknownScheme(other.to_string())),
        }
    }
}

/// One basis state: photon occupation per mode plus an atomic level.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    pub photons: Vec<u8>,
    pub atom: AtomLevel,
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.photons {
            write!(f, "{n}")?;
        }
        write!(f, ",{}", self.atom)
    }
}

/// Ordered basis with index lookup.
#[derive(Debug, Clone)]
pub struct BasisEnumeration {
    pub scheme: Scheme,
    pub labels: Vec<BasisLabel>,
}

impl BasisEnumeration {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Position of the state with the given occupations and level.
    pub fn index(&self, photons: &[u8], atom: AtomLevel) -> Option<usize> {
        self.labels
            .iter()
            .position(|l| l.photons == photons && l.atom == atom)
    }

    /// Indices of every state whose photon occupations match.
    pub fn photon_sector(&self, photons: &[u8]) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.photons == photons)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Enumerate the product basis of a scheme.
///
/// Occupations run over {0,1} per mode for the two-mode schemes and {0,1,2}
/// for the dual-rail single mode. The ordering is deterministic and stable.
pub fn enumerate_basis(scheme: Scheme, n_photon_modes: usize) -> Result<BasisEnumeration> {
    let expected = scheme.photon_modes();
    if n_photon_modes != expected {
        return Err(Error::InvalidModeCount {
            scheme: scheme.name(),
            expected,
            got: n_photon_modes,
        });
    }
    let occupations: Vec<Vec<u8>> = match scheme {
        Scheme::TwoLevel => (0..=2u8).map(|n| vec![n]).collect(),
        _ => (0..=1u8)
            .flat_map(|a| (0..=1u8).map(move |b| vec![a, b]))
            .collect(),
    };
    let mut labels = Vec::with_capacity(occupations.len() * scheme.levels().len());
    for occ in &occupations {
        for &atom in scheme.levels() {
            labels.push(BasisLabel {
                photons: occ.clone(),
                atom,
            });
        }
    }
    Ok(BasisEnumeration { scheme, labels })
}
