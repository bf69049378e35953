//! Channels that are convex mixtures of single-qubit Z rotations.
//!
//! Every channel the rotation-gate models manipulate (noisy TMR output,
//! over-rotation error, cancellation channel, stochastic Pauli-Z) has the form
//! `ρ ↦ Σ_j w_j R(φ_j) ρ R(φ_j)†` with `R(φ) = exp(iφZ)`. Keeping that form
//! makes composition exact: angles add, weights multiply.
//!
//! [`DensityMatrix2`] is the brute-force oracle used to check the closed forms.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{ensure_finite, invalid, Result};

/// Tolerance on `Σ w_j = 1`.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;
/// Branches whose reduced angles differ by less than this are merged.
pub const ANGLE_MERGE_TOLERANCE: f64 = 1e-14;
const STATE_TOLERANCE: f64 = 1e-12;

/// Maps an angle to its representative modulo π in `(-π/2, π/2]`.
///
/// `R(φ + π) = -R(φ)`, so the channel only depends on `φ mod π`.
pub fn reduce_angle(angle: f64) -> f64 {
    let r = angle.rem_euclid(PI);
    if r > FRAC_PI_2 {
        r - PI
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Branch {
    pub weight: f64,
    pub angle: f64,
}

/// A convex mixture of Z rotations. Invariants: weights non-negative and
/// summing to one, angles reduced into `(-π/2, π/2]`, no two branches within
/// [`ANGLE_MERGE_TOLERANCE`] of each other.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationMixture {
    branches: Vec<Branch>,
}

impl RotationMixture {
    pub fn identity() -> Self {
        Self {
            branches: vec![Branch {
                weight: 1.0,
                angle: 0.0,
            }],
        }
    }

    /// The unitary channel of a single rotation.
    pub fn pure(angle: f64) -> Result<Self> {
        ensure_finite("rotation angle", angle)?;
        Ok(Self {
            branches: vec![Branch {
                weight: 1.0,
                angle: reduce_angle(angle),
            }],
        })
    }

    /// The Pauli-Z gate, `R(π/2) = iZ`.
    pub fn pauli_z() -> Self {
        Self {
            branches: vec![Branch {
                weight: 1.0,
                angle: FRAC_PI_2,
            }],
        }
    }

    /// `(1 - p) ρ + p ZρZ`.
    pub fn stochastic_z(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("flip probability must lie in [0, 1], got {p}")));
        }
        Self::from_branches([(1.0 - p, 0.0), (p, FRAC_PI_2)])
    }

    /// Builds a mixture from `(weight, angle)` pairs, validating the weights
    /// and consolidating branches with coinciding reduced angles.
    pub fn from_branches<I>(branches: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut raw = Vec::new();
        for (weight, angle) in branches {
            ensure_finite("branch weight", weight)?;
            ensure_finite("branch angle", angle)?;
            if weight < 0.0 {
                return Err(invalid(format!("branch weight must be non-negative, got {weight}")));
            }
            raw.push(Branch { weight, angle });
        }
        let total: f64 = raw.iter().map(|b| b.weight).sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(invalid(format!("branch weights must sum to 1, got {total}")));
        }
        Ok(Self::consolidate(raw, 0.0))
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.branches.iter().map(|b| b.weight).sum()
    }

    /// Channel composition (order is irrelevant, Z rotations commute).
    pub fn compose(&self, other: &Self) -> Self {
        self.compose_pruned(other, 0.0)
    }

    /// Composition that drops product branches lighter than `min_weight`.
    ///
    /// Used by the trajectory enumerator, where branches with three or more
    /// independent error events would otherwise grow combinatorially. The
    /// dropped mass is reported through [`Self::total_weight`].
    pub fn compose_pruned(&self, other: &Self, min_weight: f64) -> Self {
        let mut raw = Vec::with_capacity(self.branches.len() * other.branches.len());
        for a in &self.branches {
            for b in &other.branches {
                let weight = a.weight * b.weight;
                if weight > min_weight {
                    raw.push(Branch {
                        weight,
                        angle: a.angle + b.angle,
                    });
                }
            }
        }
        Self::consolidate(raw, 0.0)
    }

    /// Shorthand for composing with `R(angle)`.
    pub fn rotated(&self, angle: f64) -> Self {
        let raw = self
            .branches
            .iter()
            .map(|b| Branch {
                weight: b.weight,
                angle: b.angle + angle,
            })
            .collect();
        Self::consolidate(raw, 0.0)
    }

    /// Mirror image `φ ↦ -φ` of every branch.
    pub fn mirrored(&self) -> Self {
        let raw = self
            .branches
            .iter()
            .map(|b| Branch {
                weight: b.weight,
                angle: -b.angle,
            })
            .collect();
        Self::consolidate(raw, 0.0)
    }

    /// `Σ_j w_j exp(2iφ_j)`: the factor multiplying the off-diagonal element
    /// of ρ. Two mixtures with equal characteristic are the same channel.
    pub fn characteristic(&self) -> Complex64 {
        self.branches
            .iter()
            .map(|b| Complex64::from_polar(b.weight, 2.0 * b.angle))
            .sum()
    }

    /// `Σ_j w_j R(φ_j) ρ R(φ_j)†`, evaluated branch by branch.
    pub fn apply(&self, rho: &DensityMatrix2) -> DensityMatrix2 {
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for b in &self.branches {
            let r = rho.conjugate_by_rotation(b.angle);
            for (row, src) in out.iter_mut().zip(r.m.iter()) {
                for (o, s) in row.iter_mut().zip(src.iter()) {
                    *o += b.weight * s;
                }
            }
        }
        DensityMatrix2 { m: out }
    }

    /// Pauli-Z flip probability of the Pauli twirl of `self ∘ R(-target)`:
    /// `Σ_j w_j sin²(φ_j - target)`.
    pub fn twirled_z_error(&self, target: f64) -> f64 {
        self.branches
            .iter()
            .map(|b| b.weight * (b.angle - target).sin().powi(2))
            .sum::<f64>()
            .clamp(0.0, 1.0)
    }

    /// `Σ_j w_j sin⁴(φ_j - target)`, the second moment of the per-branch
    /// flip probability. Gives the exact variance of a trajectory sampler.
    pub fn twirled_z_second_moment(&self, target: f64) -> f64 {
        self.branches
            .iter()
            .map(|b| b.weight * (b.angle - target).sin().powi(4))
            .sum()
    }

    /// Largest trace distance, over the six Pauli eigenstates, between this
    /// channel and the stochastic-Z model `Z_p ∘ R(target)` with
    /// `p = twirled_z_error(target)`.
    pub fn worst_case_vs_pauli_model(&self, target: f64) -> f64 {
        let p = self.twirled_z_error(target);
        let rotation = RotationMixture {
            branches: vec![Branch {
                weight: 1.0,
                angle: reduce_angle(target),
            }],
        };
        DensityMatrix2::pauli_eigenstates()
            .iter()
            .map(|rho| {
                let exact = self.apply(rho);
                let rotated = rotation.apply(rho);
                let model = rotated.mix(&rotated.z_conjugated(), p);
                exact.trace_distance(&model)
            })
            .fold(0.0, f64::max)
    }

    /// Draws a branch angle with probability equal to its weight.
    pub fn sample_angle<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random::<f64>() * self.total_weight();
        let mut acc = 0.0;
        for b in &self.branches {
            acc += b.weight;
            if u < acc {
                return b.angle;
            }
        }
        self.branches.last().map_or(0.0, |b| b.angle)
    }

    fn consolidate(mut raw: Vec<Branch>, min_weight: f64) -> Self {
        for b in raw.iter_mut() {
            b.angle = reduce_angle(b.angle);
        }
        raw.retain(|b| b.weight > min_weight);
        raw.sort_by(|a, b| a.angle.total_cmp(&b.angle));

        let mut merged: Vec<Branch> = Vec::with_capacity(raw.len());
        for b in raw {
            match merged.last_mut() {
                Some(last) if (b.angle - last.angle).abs() <= ANGLE_MERGE_TOLERANCE => {
                    last.weight += b.weight;
                }
                _ => merged.push(b),
            }
        }
        // -π/2 + ε and π/2 are the same channel.
        if merged.len() > 1 {
            let first = merged[0];
            let last = merged[merged.len() - 1];
            if (first.angle + PI - last.angle).abs() <= ANGLE_MERGE_TOLERANCE {
                let n = merged.len();
                merged[n - 1].weight += first.weight;
                merged.remove(0);
            }
        }
        Self { branches: merged }
    }
}

pub fn pure_rotation(angle: f64) -> Result<RotationMixture> {
    RotationMixture::pure(angle)
}

pub fn compose(a: &RotationMixture, b: &RotationMixture) -> RotationMixture {
    a.compose(b)
}

pub fn apply(channel: &RotationMixture, rho: &DensityMatrix2) -> DensityMatrix2 {
    channel.apply(rho)
}

pub fn twirled_z_error(channel: &RotationMixture, target: f64) -> f64 {
    channel.twirled_z_error(target)
}

pub fn worst_case_vs_pauli_model(channel: &RotationMixture, target: f64) -> f64 {
    channel.worst_case_vs_pauli_model(target)
}

/// A single-qubit density matrix in the computational basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    m: [[Complex64; 2]; 2],
}

impl DensityMatrix2 {
    /// Validates Hermiticity, unit trace and positivity (1e-12 tolerance).
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let rho = Self { m };
        if !rho.is_hermitian(STATE_TOLERANCE) {
            return Err(invalid("density matrix is not Hermitian"));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOLERANCE || tr.im.abs() > STATE_TOLERANCE {
            return Err(invalid(format!("density matrix trace must be 1, got {tr}")));
        }
        if rho.min_eigenvalue() < -STATE_TOLERANCE {
            return Err(invalid("density matrix has a negative eigenvalue"));
        }
        Ok(rho)
    }

    /// `(I + xX + yY + zZ) / 2`; requires `x² + y² + z² ≤ 1`.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new([
            [
                Complex64::new((1.0 + z) / 2.0, 0.0),
                Complex64::new(x / 2.0, -y / 2.0),
            ],
            [
                Complex64::new(x / 2.0, y / 2.0),
                Complex64::new((1.0 - z) / 2.0, 0.0),
            ],
        ])
    }

    fn bloch_unchecked(x: f64, y: f64, z: f64) -> Self {
        Self {
            m: [
                [
                    Complex64::new((1.0 + z) / 2.0, 0.0),
                    Complex64::new(x / 2.0, -y / 2.0),
                ],
                [
                    Complex64::new(x / 2.0, y / 2.0),
                    Complex64::new((1.0 - z) / 2.0, 0.0),
                ],
            ],
        }
    }

    pub fn zero() -> Self {
        Self::bloch_unchecked(0.0, 0.0, 1.0)
    }
    pub fn one() -> Self {
        Self::bloch_unchecked(0.0, 0.0, -1.0)
    }
    pub fn plus() -> Self {
        Self::bloch_unchecked(1.0, 0.0, 0.0)
    }
    pub fn minus() -> Self {
        Self::bloch_unchecked(-1.0, 0.0, 0.0)
    }
    pub fn plus_i() -> Self {
        Self::bloch_unchecked(0.0, 1.0, 0.0)
    }
    pub fn minus_i() -> Self {
        Self::bloch_unchecked(0.0, -1.0, 0.0)
    }
    pub fn maximally_mixed() -> Self {
        Self::bloch_unchecked(0.0, 0.0, 0.0)
    }

    pub fn pauli_eigenstates() -> [Self; 6] {
        [
            Self::zero(),
            Self::one(),
            Self::plus(),
            Self::minus(),
            Self::plus_i(),
            Self::minus_i(),
        ]
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self.m[0][0].im).abs() <= tol
            && (self.m[1][1].im).abs() <= tol
            && (self.m[0][1] - self.m[1][0].conj()).norm() <= tol
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let b = self.m[0][1].norm();
        let disc = ((a - d).powi(2) + 4.0 * b * b).sqrt();
        ((a + d - disc) / 2.0, (a + d + disc) / 2.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().0
    }

    /// `⟨ψ|ρ|ψ⟩` for `|ψ⟩ = a|0⟩ + b|1⟩`.
    pub fn population(&self, a: Complex64, b: Complex64) -> f64 {
        let v = [a, b];
        let mut acc = Complex64::new(0.0, 0.0);
        for (r, vr) in v.iter().enumerate() {
            for (c, vc) in v.iter().enumerate() {
                acc += vr.conj() * self.m[r][c] * vc;
            }
        }
        acc.re
    }

    /// `⟨+|ρ|+⟩`.
    pub fn plus_population(&self) -> f64 {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.population(s, s)
    }

    /// `⟨-|ρ|-⟩`.
    pub fn minus_population(&self) -> f64 {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.population(s, -s)
    }

    /// `R(φ) ρ R(φ)†` with `R(φ) = diag(e^{iφ}, e^{-iφ})`.
    pub fn conjugate_by_rotation(&self, angle: f64) -> Self {
        let phase = Complex64::from_polar(1.0, 2.0 * angle);
        let mut m = self.m;
        m[0][1] = self.m[0][1] * phase;
        m[1][0] = self.m[1][0] * phase.conj();
        Self { m }
    }

    /// `ZρZ`.
    pub fn z_conjugated(&self) -> Self {
        let mut m = self.m;
        m[0][1] = -self.m[0][1];
        m[1][0] = -self.m[1][0];
        Self { m }
    }

    /// `(1 - p) self + p other`.
    pub fn mix(&self, other: &Self, p: f64) -> Self {
        let mut m = self.m;
        for (row, (a, b)) in m.iter_mut().zip(self.m.iter().zip(other.m.iter())) {
            for (o, (x, y)) in row.iter_mut().zip(a.iter().zip(b.iter())) {
                *o = (1.0 - p) * x + p * y;
            }
        }
        Self { m }
    }

    /// `½ ‖self - other‖₁` for two Hermitian matrices.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let d00 = (self.m[0][0] - other.m[0][0]).re;
        let d11 = (self.m[1][1] - other.m[1][1]).re;
        let d01 = self.m[0][1] - other.m[0][1];
        let disc = ((d00 - d11).powi(2) + 4.0 * d01.norm_sqr()).sqrt();
        let lo = (d00 + d11 - disc) / 2.0;
        let hi = (d00 + d11 + disc) / 2.0;
        (lo.abs() + hi.abs()) / 2.0
    }
}
