use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Level structure of `n_parties` identical atoms sharing one cavity mode.
///
/// Atom levels are numbered `0..n_ground` for the ground states `g_j` and
/// `n_ground..n_ground + n_excited` for the excited states `e_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LevelScheme {
    pub n_parties: usize,
    pub n_ground: usize,
    pub n_excited: usize,
    /// Largest retained Fock occupation (inclusive).
    pub photon_cutoff: usize,
}

impl LevelScheme {
    /// Ground levels only, as used by the adiabatically eliminated models.
    pub fn effective(n_parties: usize, photon_cutoff: usize) -> Self {
        Self {
            n_parties,
            n_ground: n_parties,
            n_excited: 0,
            photon_cutoff,
        }
    }

    /// `N` ground and `N - 1` excited levels per atom.
    pub fn full(n_parties: usize, photon_cutoff: usize) -> Self {
        Self {
            n_parties,
            n_ground: n_parties,
            n_excited: n_parties.saturating_sub(1),
            photon_cutoff,
        }
    }

    pub fn levels_per_atom(&self) -> usize {
        self.n_ground + self.n_excited
    }

    pub fn ground(&self, j: usize) -> u8 {
        debug_assert!(j < self.n_ground);
        j as u8
    }

    pub fn excited(&self, j: usize) -> u8 {
        debug_assert!(j < self.n_excited);
        (self.n_ground + j) as u8
    }

    pub fn is_excited(&self, level: u8) -> bool {
        (level as usize) >= self.n_ground
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_parties == 0 || self.n_ground == 0 {
            return Err(Error::InvalidArgument(format!(
                "level scheme needs at least one atom and one ground level: {self:?}"
            )));
        }
        if self.levels_per_atom() > u8::MAX as usize {
            return Err(Error::InvalidArgument("too many levels per atom".into()));
        }
        Ok(())
    }

    /// Dimension of the full tensor-product space, or `None` on overflow.
    pub fn dimension(&self) -> Option<usize> {
        let per = self.levels_per_atom();
        let mut d = self.photon_cutoff.checked_add(1)?;
        for _ in 0..self.n_parties {
            d = d.checked_mul(per)?;
        }
        Some(d)
    }

    pub fn label_is_valid(&self, label: &BasisLabel) -> bool {
        label.atom_levels.len() == self.n_parties
            && label.photon_number as usize <= self.photon_cutoff
            && label.atom_levels.iter().all(|&l| (l as usize) < self.levels_per_atom())
    }
}

/// One product state `|l_1 l_2 ... l_N> |n>`.
///
/// The derived ordering is lexicographic over `(atom_levels, photon_number)`,
/// which is the enumeration order of every product catalog.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisLabel {
    pub atom_levels: Vec<u8>,
    pub photon_number: u32,
}

impl BasisLabel {
    pub fn new(atom_levels: Vec<u8>, photon_number: u32) -> Self {
        Self {
            atom_levels,
            photon_number,
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, l) in self.atom_levels.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ";{}>", self.photon_number)
    }
}

/// Label of one basis state of a catalog.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StateLabel {
    Product(BasisLabel),
    /// `|zeta_{j,m}> = |g_{j+m-1}>_1 |S_{N-1,N-m}> |j>`.
    Zeta { j: usize, m: usize },
    /// Vector `index` of a photon-number-resolved span produced by closure.
    Span { index: usize, photon_number: u32 },
}

impl StateLabel {
    pub fn photon_number(&self) -> u32 {
        match self {
            StateLabel::Product(b) => b.photon_number,
            StateLabel::Zeta { j, .. } => *j as u32,
            StateLabel::Span { photon_number, .. } => *photon_number,
        }
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateLabel::Product(b) => write!(f, "{b}"),
            StateLabel::Zeta { j, m } => write!(f, "zeta({j},{m})"),
            StateLabel::Span { index, photon_number } => write!(f, "span({index};{photon_number})"),
        }
    }
}

/// Ordered list of basis labels with reverse lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisCatalog {
    labels: Vec<StateLabel>,
    index: HashMap<StateLabel, usize>,
    scheme: Option<LevelScheme>,
}

impl BasisCatalog {
    /// Catalog with the given order. Duplicate labels are rejected.
    pub fn from_labels(labels: Vec<StateLabel>, scheme: Option<LevelScheme>) -> Result<Self> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate basis label {l}")));
            }
        }
        Ok(Self {
            labels,
            index,
            scheme,
        })
    }

    /// All product states of `scheme`, lexicographic over `(atom_levels, photon_number)`.
    pub fn product(scheme: &LevelScheme) -> Result<Self> {
        scheme.validate()?;
        let dim = scheme
            .dimension()
            .ok_or_else(|| Error::InvalidArgument("tensor space dimension overflows".into()))?;
        let per = scheme.levels_per_atom();
        let photons = scheme.photon_cutoff + 1;
        let mut labels = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut rest = i / photons;
            let photon = (i % photons) as u32;
            let mut levels = vec![0u8; scheme.n_parties];
            for slot in levels.iter_mut().rev() {
                *slot = (rest % per) as u8;
                rest /= per;
            }
            labels.push(StateLabel::Product(BasisLabel::new(levels, photon)));
        }
        Self::from_labels(labels, Some(*scheme))
    }

    /// Product states with the given label set, sorted into catalog order.
    pub fn product_subset(scheme: &LevelScheme, mut labels: Vec<BasisLabel>) -> Result<Self> {
        if let Some(bad) = labels.iter().find(|l| !scheme.label_is_valid(l)) {
            return Err(Error::InvalidArgument(format!("label {bad} invalid for {scheme:?}")));
        }
        labels.sort();
        labels.dedup();
        Self::from_labels(labels.into_iter().map(StateLabel::Product).collect(), Some(*scheme))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[StateLabel] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &StateLabel {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &StateLabel) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn index_of_product(&self, label: &BasisLabel) -> Option<usize> {
        self.index.get(&StateLabel::Product(label.clone())).copied()
    }

    /// Level scheme of the underlying tensor space, when there is one.
    pub fn scheme(&self) -> Option<&LevelScheme> {
        self.scheme.as_ref()
    }

    pub fn is_product(&self) -> bool {
        self.labels.iter().all(|l| matches!(l, StateLabel::Product(_)))
    }

    pub fn photon_numbers(&self) -> Vec<f64> {
        self.labels.iter().map(|l| l.photon_number() as f64).collect()
    }
}
