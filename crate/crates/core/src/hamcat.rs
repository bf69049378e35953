//! L1-norms of target Hamiltonians and a Jordan-Wigner Hubbard generator.
//!
//! Qubit layout for the `L × L` Hubbard model: spin-up orbitals occupy
//! `0..L²` in row-major order, spin-down orbitals `L²..2L²`. Jordan-Wigner
//! strings run inside one spin sector between the two hopping sites.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PauliOp {
    X,
    Y,
    Z,
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PauliOp::X => "X",
            PauliOp::Y => "Y",
            PauliOp::Z => "Z",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coefficient: f64,
    /// `(qubit, op)` sorted by qubit, no repeats.
    pub ops: Vec<(u32, PauliOp)>,
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.16e}", self.coefficient)?;
        for (q, op) in &self.ops {
            write!(f, " {op}:{q}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Periodic,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    /// λ from a closed formula in the model parameters.
    Lattice,
    /// Fixed λ in Hartree.
    Molecule,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemEntry {
    pub name: String,
    pub kind: SystemKind,
    pub n_l: u64,
    pub lambda: f64,
    pub unit: &'static str,
    pub parameters: Vec<(&'static str, f64)>,
}

/// `(3J + h/2) N` for the `N`-site random-field Ising chain.
pub fn rfic_lambda(j: f64, h: f64, n: u64) -> f64 {
    (3.0 * j + h / 2.0) * n as f64
}

/// `(2J + h) L²` for the `L × L` transverse-field Ising model.
pub fn tfim_lambda(j: f64, h: f64, l: u64) -> f64 {
    (2.0 * j + h) * (l * l) as f64
}

/// `(4t + U/4) L²` for the periodic `L × L` Hubbard model.
pub fn hubbard_lambda(t: f64, u: f64, l: u64) -> f64 {
    (4.0 * t + u / 4.0) * (l * l) as f64
}

/// `4t L(L-1) + U L²/4` with open boundaries.
pub fn hubbard_lambda_open(t: f64, u: f64, l: u64) -> f64 {
    4.0 * t * (l * (l - 1)) as f64 + u * (l * l) as f64 / 4.0
}

fn molecule(name: &str, n_l: u64, lambda: f64) -> SystemEntry {
    SystemEntry {
        name: name.to_string(),
        kind: SystemKind::Molecule,
        n_l,
        lambda,
        unit: "Hartree",
        parameters: Vec::new(),
    }
}

/// The seven reference systems. Lattice rows are evaluated at
/// representative parameters (RFIC `J=1, h=2, N=10`; TFIM `J=1, h=1,
/// L=10`; Hubbard `t=1, U=4, L=10`).
pub fn catalog() -> Vec<SystemEntry> {
    vec![
        SystemEntry {
            name: "rfic".into(),
            kind: SystemKind::Lattice,
            n_l: 10,
            lambda: rfic_lambda(1.0, 2.0, 10),
            unit: "J",
            parameters: vec![("J", 1.0), ("h", 2.0), ("N", 10.0)],
        },
        SystemEntry {
            name: "tfim".into(),
            kind: SystemKind::Lattice,
            n_l: 100,
            lambda: tfim_lambda(1.0, 1.0, 10),
            unit: "J",
            parameters: vec![("J", 1.0), ("h", 1.0), ("L", 10.0)],
        },
        SystemEntry {
            name: "hubbard".into(),
            kind: SystemKind::Lattice,
            n_l: 200,
            lambda: hubbard_lambda(1.0, 4.0, 10),
            unit: "t",
            parameters: vec![("t", 1.0), ("U", 4.0), ("L", 10.0)],
        },
        molecule("[2Fe-2S]", 40, 38.2),
        molecule("[4Fe-4S]", 72, 137.8),
        molecule("FeMoco(S=0)", 108, 308.2),
        molecule("FeMoco(S=3/2)", 152, 512.5),
    ]
}

pub fn find_system(name: &str) -> Option<SystemEntry> {
    catalog().into_iter().find(|e| e.name.eq_ignore_ascii_case(name))
}

fn hopping_pairs(l: u32, boundary: Boundary) -> Vec<(u32, u32)> {
    let idx = |r: u32, c: u32| r * l + c;
    let mut pairs = Vec::new();
    for r in 0..l {
        for c in 0..l {
            let here = idx(r, c);
            let neighbours = match boundary {
                Boundary::Periodic => vec![idx(r, (c + 1) % l), idx((r + 1) % l, c)],
                Boundary::Open => {
                    let mut v = Vec::new();
                    if c + 1 < l {
                        v.push(idx(r, c + 1));
                    }
                    if r + 1 < l {
                        v.push(idx(r + 1, c));
                    }
                    v
                }
            };
            for n in neighbours {
                pairs.push((here.min(n), here.max(n)));
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

fn string_term(coefficient: f64, i: u32, j: u32, end: PauliOp) -> PauliTerm {
    let mut ops = Vec::with_capacity((j - i + 1) as usize);
    ops.push((i, end));
    ops.extend((i + 1..j).map(|k| (k, PauliOp::Z)));
    ops.push((j, end));
    PauliTerm { coefficient, ops }
}

/// Pauli terms of the `L × L` Hubbard model: for every nearest-neighbour
/// pair and spin, `-(t/2)(X Z…Z X + Y Z…Z Y)`; for every site
/// `(U/4) Z_↑ Z_↓`. Hopping terms come first, in lexicographic site order.
pub fn hubbard_terms(l: u32, t: f64, u: f64, boundary: Boundary) -> Result<Vec<PauliTerm>> {
    ensure_finite("t", t)?;
    ensure_finite("U", u)?;
    if t < 0.0 || u < 0.0 {
        return Err(invalid("t and U must be non-negative"));
    }
    if l == 0 {
        return Err(invalid("L must be at least 1"));
    }
    if boundary == Boundary::Periodic && l < 3 {
        return Err(invalid(format!(
            "periodic lattices need L >= 3 (L = {l} has repeated bonds)"
        )));
    }
    let sites = l * l;
    let mut terms = Vec::new();
    if t != 0.0 {
        let pairs = hopping_pairs(l, boundary);
        for offset in [0, sites] {
            for &(i, j) in &pairs {
                terms.push(string_term(-t / 2.0, i + offset, j + offset, PauliOp::X));
                terms.push(string_term(-t / 2.0, i + offset, j + offset, PauliOp::Y));
            }
        }
    }
    if u != 0.0 {
        for i in 0..sites {
            terms.push(PauliTerm {
                coefficient: u / 4.0,
                ops: vec![(i, PauliOp::Z), (i + sites, PauliOp::Z)],
            });
        }
    }
    Ok(terms)
}

/// `Σ |c_k|`.
pub fn l1_norm(terms: &[PauliTerm]) -> Result<f64> {
    if terms.is_empty() {
        return Err(invalid("L1-norm of an empty term list"));
    }
    Ok(terms.iter().map(|t| t.coefficient.abs()).sum())
}

/// One term per line: `<coefficient> <op>:<qubit> ...`.
pub fn export_terms(terms: &[PauliTerm]) -> String {
    let mut out = String::new();
    for t in terms {
        let _ = writeln!(out, "{t}");
    }
    out
}
