//! Published effective-size bounds for recent experiments, with the model
//! inputs printed alongside them. Values are constants; a checksum test
//! guards them against accidental edits.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntrySystem {
    PhotonicMode,
    TwoPhotonicModes,
    SpinEnsemble,
    IonTrap,
    MicrowaveCavity,
    MotionalMode,
}

/// Which bound produced the published number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    /// Uncertainty relation (squeezing parameter).
    Static,
    /// Bhattacharyya bound on data pairs.
    PairwiseUnfitted,
    /// Bhattacharyya bound on a fitted fringe model.
    Fitted,
    /// `A²S` / `A²N` quick estimate.
    Shortcut,
}

impl MethodTag {
    pub fn label(self) -> &'static str {
        match self {
            MethodTag::Static => "uncertainty relation",
            MethodTag::PairwiseUnfitted => "Bhattacharyya, data pairs",
            MethodTag::Fitted => "Bhattacharyya, fitted model",
            MethodTag::Shortcut => "A²S shortcut",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PublishedBound {
    pub value: f64,
    /// Error bar below / above the value (0 when none was printed).
    pub minus: f64,
    pub plus: f64,
}

impl PublishedBound {
    pub fn interval(&self) -> (f64, f64) {
        (self.value - self.minus, self.value + self.plus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentEntry {
    pub id: &'static str,
    pub description: &'static str,
    pub system: EntrySystem,
    /// Printed inputs: `alpha`, `beta`, `S`, `A`, `N`, `modes`.
    pub inputs: &'static [(&'static str, f64)],
    pub published: PublishedBound,
    pub method: MethodTag,
}

impl ExperimentEntry {
    pub fn input(&self, key: &str) -> Option<f64> {
        self.inputs.iter().find(|(k, _)| *k == key).map(|&(_, v)| v)
    }
}

const fn bound(value: f64, minus: f64, plus: f64) -> PublishedBound {
    PublishedBound { value, minus, plus }
}

static REGISTRY: [ExperimentEntry; 10] = [
    ExperimentEntry {
        id: "vahlbruch2016",
        description: "Squeezed state, single photonic mode",
        system: EntrySystem::PhotonicMode,
        inputs: &[("modes", 1.0)],
        published: bound(31.6, 0.0, 0.0),
        method: MethodTag::Static,
    },
    ExperimentEntry {
        id: "eberle2013",
        description: "Squeezed state, two photonic modes",
        system: EntrySystem::TwoPhotonicModes,
        inputs: &[("modes", 2.0)],
        published: bound(11.1, 0.3, 0.3),
        method: MethodTag::Static,
    },
    ExperimentEntry {
        id: "hosten2016",
        description: "Spin-squeezed state, cold atomic ensemble",
        system: EntrySystem::SpinEnsemble,
        inputs: &[("N", 5.0e5)],
        published: bound(70.8, 4.7, 5.1),
        method: MethodTag::Static,
    },
    ExperimentEntry {
        id: "monz2011",
        description: "GHZ state |0…0⟩ + |1…1⟩, N = 8, ion trap",
        system: EntrySystem::IonTrap,
        inputs: &[("N", 8.0)],
        published: bound(5.0, 0.1, 0.1),
        method: MethodTag::Fitted,
    },
    ExperimentEntry {
        id: "vlastakis2013",
        description: "One-mode photonic cat state, α = 2.8",
        system: EntrySystem::MicrowaveCavity,
        inputs: &[("alpha", 2.8)],
        published: bound(10.2, 0.2, 0.2),
        method: MethodTag::Fitted,
    },
    ExperimentEntry {
        id: "kienzler2016",
        description: "Single ion; cat state in spatial mode, α = 5.9",
        system: EntrySystem::MotionalMode,
        inputs: &[("alpha", 5.9), ("A", 0.57)],
        published: bound(49.4, 11.6, 11.6),
        method: MethodTag::PairwiseUnfitted,
    },
    ExperimentEntry {
        id: "kienzler2016_fit",
        description: "Single ion; cat state in spatial mode, α = 5.9",
        system: EntrySystem::MotionalMode,
        inputs: &[("alpha", 5.9), ("A", 0.57)],
        published: bound(43.4, 4.3, 4.3),
        method: MethodTag::Fitted,
    },
    ExperimentEntry {
        id: "wang2016",
        description: "Two-mode photonic cat state, α = 2.7, β = 3.1",
        system: EntrySystem::TwoPhotonicModes,
        inputs: &[("alpha", 2.7), ("beta", 3.1)],
        published: bound(20.0, 2.5, 2.5),
        method: MethodTag::PairwiseUnfitted,
    },
    ExperimentEntry {
        id: "wang2016_fit",
        description: "Two-mode photonic cat state, α = 2.7, β = 3.1",
        system: EntrySystem::TwoPhotonicModes,
        inputs: &[("alpha", 2.7), ("beta", 3.1)],
        published: bound(21.5, 2.6, 2.6),
        method: MethodTag::Fitted,
    },
    ExperimentEntry {
        id: "deleglise2008",
        description: "Photonic cat state, Wigner reconstruction",
        system: EntrySystem::MicrowaveCavity,
        inputs: &[("S", 11.8), ("A", 0.44)],
        published: bound(2.3, 0.0, 0.0),
        method: MethodTag::Shortcut,
    },
];

pub fn registry() -> &'static [ExperimentEntry] {
    &REGISTRY
}

pub fn lookup(id: &str) -> Option<&'static ExperimentEntry> {
    REGISTRY.iter().find(|e| e.id == id)
}

/// FNV-1a over the bit patterns of every published number and id.
pub fn registry_checksum() -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for b in bytes {
            h ^= *b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    for e in &REGISTRY {
        eat(e.id.as_bytes());
        eat(e.method.label().as_bytes());
        for (k, v) in e.inputs {
            eat(k.as_bytes());
            eat(&v.to_bits().to_le_bytes());
        }
        for v in [e.published.value, e.published.minus, e.published.plus] {
            eat(&v.to_bits().to_le_bytes());
        }
    }
    h
}
