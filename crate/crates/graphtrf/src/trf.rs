//! The zero-shot TRF set: five Graphviz layouts and three textual templates.

use serde::{Deserialize, Serialize};

/// Canonical ordering is fixed and used for tie-breaking and file layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TrfKind {
    Vdot,
    Vneato,
    Vcirco,
    Vfdp,
    Vsfdp,
    Tset,
    Tlist,
    Tmat,
}

impl TrfKind {
    pub const COUNT: usize = 8;

    pub const ALL: [TrfKind; 8] = [
        TrfKind::Vdot,
        TrfKind::Vneato,
        TrfKind::Vcirco,
        TrfKind::Vfdp,
        TrfKind::Vsfdp,
        TrfKind::Tset,
        TrfKind::Tlist,
        TrfKind::Tmat,
    ];

    pub const VISUAL: [TrfKind; 5] = [
        TrfKind::Vdot,
        TrfKind::Vneato,
        TrfKind::Vcirco,
        TrfKind::Vfdp,
        TrfKind::Vsfdp,
    ];

    pub const TEXTUAL: [TrfKind; 3] = [TrfKind::Tset, TrfKind::Tlist, TrfKind::Tmat];

    pub fn is_visual(self) -> bool {
        !matches!(self, TrfKind::Tset | TrfKind::Tlist | TrfKind::Tmat)
    }

    /// Position in the canonical ordering.
    pub fn index(self) -> usize {
        Self::ALL.iter().position(|t| *t == self).unwrap()
    }

    pub fn from_index(i: usize) -> Option<TrfKind> {
        Self::ALL.get(i).copied()
    }

    /// Graphviz layout engine for visual TRFs.
    pub fn engine(self) -> Option<&'static str> {
        match self {
            TrfKind::Vdot => Some("dot"),
            TrfKind::Vneato => Some("neato"),
            TrfKind::Vcirco => Some("circo"),
            TrfKind::Vfdp => Some("fdp"),
            TrfKind::Vsfdp => Some("sfdp"),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TrfKind::Vdot => "Vdot",
            TrfKind::Vneato => "Vneato",
            TrfKind::Vcirco => "Vcirco",
            TrfKind::Vfdp => "Vfdp",
            TrfKind::Vsfdp => "Vsfdp",
            TrfKind::Tset => "Tset",
            TrfKind::Tlist => "Tlist",
            TrfKind::Tmat => "Tmat",
        }
    }

    pub fn parse(s: &str) -> Option<TrfKind> {
        Self::ALL
            .iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .copied()
    }
}

impl std::fmt::Display for TrfKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
