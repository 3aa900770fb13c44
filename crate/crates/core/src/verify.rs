//! Independent checks on candidate R-matrices.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::Signature;
use crate::tensor::{
    embed_at, kron, mat_power, DenseOperator, EigenMultiset, C64, DEFAULT_CAP, EIG_CLUSTER_TOL,
    ONE, ZERO,
};

/// Floor under `‖LHS‖` when forming the relative residual.
const NORM_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct GybeReport {
    pub signature: Signature,
    /// `‖LHS − RHS‖_F / max(‖LHS‖_F, 1e-12)`.
    pub residual: f64,
    pub abs_residual: f64,
    pub lhs_norm: f64,
    pub tolerance: f64,
    /// `abs_residual ≤ tolerance · max(1, ‖LHS‖_F)`.
    pub pass: bool,
    pub dims: usize,
}

fn power_dim(d: usize, n: usize) -> Result<usize> {
    (0..n)
        .try_fold(1usize, |acc, _| acc.checked_mul(d))
        .filter(|&x| x <= DEFAULT_CAP)
        .ok_or(Error::Capacity {
            requested: usize::MAX,
            cap: DEFAULT_CAP,
        })
}

/// Compare `(R⊗I^l)(I^l⊗R)(R⊗I^l)` with `(I^l⊗R)(R⊗I^l)(I^l⊗R)`.
pub fn check_gybe(r: &DenseOperator, d: usize, m: usize, l: usize, tol: f64) -> Result<GybeReport> {
    if r.dim() != power_dim(d, m)? {
        return Err(Error::Dimension(format!(
            "R has dim {}, expected {d}^{m}",
            r.dim()
        )));
    }
    let dims = power_dim(d, m + l)?;
    let eye = DenseOperator::identity(power_dim(d, l)?);
    let a = kron(r, &eye)?;
    let b = kron(&eye, r)?;
    let ab = a.try_mul(&b)?;
    let lhs = ab.try_mul(&a)?;
    let rhs = b.try_mul(&ab)?;
    let abs_residual = lhs.try_sub(&rhs)?.frobenius_norm();
    let lhs_norm = lhs.frobenius_norm();
    Ok(GybeReport {
        signature: Signature { d, m, l },
        residual: abs_residual / lhs_norm.max(NORM_FLOOR),
        abs_residual,
        lhs_norm,
        tolerance: tol,
        pass: abs_residual <= tol * lhs_norm.max(1.0),
        dims,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FarCommutativityReport {
    pub shift: usize,
    pub sites: usize,
    pub residual: f64,
    pub pass: bool,
}

/// Check that copies of R at site 1 and site `1+shift` commute.
pub fn check_far_commutativity(
    r: &DenseOperator,
    d: usize,
    m: usize,
    shift: usize,
    tol: f64,
) -> Result<FarCommutativityReport> {
    if shift == 0 {
        return Err(Error::Invalid("shift must be positive".into()));
    }
    if r.dim() != power_dim(d, m)? {
        return Err(Error::Dimension(format!(
            "R has dim {}, expected {d}^{m}",
            r.dim()
        )));
    }
    let sites = m + shift;
    power_dim(d, sites)?;
    let x = embed_at(r, 1, sites, d)?;
    let y = embed_at(r, 1 + shift, sites, d)?;
    let xy = x.try_mul(&y)?;
    let yx = y.try_mul(&x)?;
    let residual = xy.try_sub(&yx)?.frobenius_norm() / xy.frobenius_norm().max(1.0);
    Ok(FarCommutativityReport {
        shift,
        sites,
        residual,
        pass: residual <= tol,
    })
}

/// Smallest shift that is in the far-commutativity regime for step-`l` embeddings.
pub fn canonical_far_shift(l: usize) -> usize {
    2 * l
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct UnitaryReport {
    /// `‖R†R − I‖_F / √dim`.
    pub residual: f64,
    pub pass: bool,
}

pub fn check_unitary(r: &DenseOperator, tol: f64) -> UnitaryReport {
    let rr = &r.adjoint() * r;
    let residual = rr
        .try_sub(&DenseOperator::identity(r.dim()))
        .map(|m| m.frobenius_norm())
        .unwrap_or(f64::INFINITY)
        / (r.dim() as f64).sqrt();
    UnitaryReport {
        residual,
        pass: residual <= tol,
    }
}

/// Smallest `n ≤ n_max` with `‖R^n − I‖_F ≤ tol·√dim`.
pub fn braid_order(r: &DenseOperator, n_max: u32, tol: f64) -> Option<u32> {
    let id = DenseOperator::identity(r.dim());
    let bound = tol * (r.dim() as f64).sqrt();
    let mut acc = id.clone();
    for n in 1..=n_max {
        acc = &acc * r;
        if acc.try_sub(&id).ok()?.frobenius_norm() <= bound {
            return Some(n);
        }
    }
    None
}

/// Smallest `n ≤ n_max` with `R^n` proportional to the identity, and the scalar.
pub fn projective_order(r: &DenseOperator, n_max: u32, tol: f64) -> Option<(u32, C64)> {
    let id = DenseOperator::identity(r.dim());
    let bound = tol * (r.dim() as f64).sqrt();
    let mut acc = id.clone();
    for n in 1..=n_max {
        acc = &acc * r;
        let c = acc.trace() / r.dim() as f64;
        if c.norm() > tol && acc.try_sub(&id.scale(c)).ok()?.frobenius_norm() <= bound {
            return Some((n, c));
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    PossiblyEquivalent,
    Obstructed,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalarMatch {
    #[serde(serialize_with = "ser_c64")]
    pub lambda: C64,
    pub inverted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralSearch {
    pub candidates_tried: usize,
    pub found: Option<ScalarMatch>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralObstruction {
    pub spec_a: EigenMultiset,
    pub spec_b: EigenMultiset,
    pub verdict: Verdict,
    pub witness: SpectralSearch,
}

fn ser_c64<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// Search unit scalars `λ = b_j / a_i`, optionally after inverting `a`, for
/// a map of spectrum `a` onto spectrum `b`.
pub fn spectral_obstruction(
    a: &EigenMultiset,
    b: &EigenMultiset,
    tol: f64,
) -> Result<SpectralObstruction> {
    if a.total() != b.total() {
        return Err(Error::Invalid(format!(
            "spectra have {} and {} eigenvalues",
            a.total(),
            b.total()
        )));
    }
    let mut tried = 0;
    let mut found = None;
    'search: for inverted in [false, true] {
        let src = if inverted {
            if a.clusters.iter().any(|c| c.0.norm() < tol) {
                continue;
            }
            a.map(|z| ONE / z)
        } else {
            a.clone()
        };
        for &(x, _) in &src.clusters {
            for &(y, _) in &b.clusters {
                if x.norm() < tol {
                    continue;
                }
                let lambda = y / x;
                if (lambda.norm() - 1.0).abs() > tol {
                    continue;
                }
                tried += 1;
                if src.map(|z| lambda * z).matches(b, tol) {
                    found = Some(ScalarMatch { lambda, inverted });
                    break 'search;
                }
            }
        }
    }
    let verdict = if found.is_some() {
        Verdict::PossiblyEquivalent
    } else {
        Verdict::Obstructed
    };
    Ok(SpectralObstruction {
        spec_a: a.clone(),
        spec_b: b.clone(),
        verdict,
        witness: SpectralSearch {
            candidates_tried: tried,
            found,
        },
    })
}

pub fn spectral_obstruction_default(
    a: &EigenMultiset,
    b: &EigenMultiset,
) -> Result<SpectralObstruction> {
    spectral_obstruction(a, b, 1e-6)
}

/// The 3-qubit GHZ-generating matrix, with its single blank entry read as 0.
pub fn ghz_matrix() -> DenseOperator {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DenseOperator::from_fn(8, |i, j| {
        if i == j {
            C64::new(h, 0.0)
        } else if i + j == 7 {
            C64::new(if i < j { h } else { -h }, 0.0)
        } else {
            ZERO
        }
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DyeCheck {
    pub pass: bool,
    /// Largest modulus outside the diagonal-antidiagonal template.
    pub off_pattern: f64,
    /// Largest deviation of a template entry from unit modulus.
    pub modulus_deviation: f64,
    /// `(ψ1, ψ2, ψ3)` at positions (1,2), (2,1), (3,3) after scaling.
    #[serde(serialize_with = "ser_c64s")]
    pub psi: Vec<C64>,
}

fn ser_c64s<S: serde::Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
    pairs.serialize(s)
}

/// Match `R / R[0][0]` against `[[1,0,0,0],[0,0,ψ1,0],[0,ψ2,0,0],[0,0,0,ψ3]]`
/// with unit-modulus `ψ`.
pub fn dye_template_check(r: &DenseOperator, tol: f64) -> Result<DyeCheck> {
    if r.dim() != 4 {
        return Err(Error::Dimension(format!(
            "template needs a 4x4 matrix, got {}",
            r.dim()
        )));
    }
    let c = r.get(0, 0);
    if c.norm() < tol {
        return Err(Error::Singular("R[0][0] vanishes; cannot normalize".into()));
    }
    let n = r.scale(ONE / c);
    let slots = [(0, 0), (1, 2), (2, 1), (3, 3)];
    let mut off: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if !slots.contains(&(i, j)) {
                off = off.max(n.get(i, j).norm());
            }
        }
    }
    let dev = slots
        .iter()
        .map(|&(i, j)| (n.get(i, j).norm() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(DyeCheck {
        pass: off <= tol && dev <= tol,
        off_pattern: off,
        modulus_deviation: dev,
        psi: vec![n.get(1, 2), n.get(2, 1), n.get(3, 3)],
    })
}

/// `(Q⊗Q) R (Q⊗Q)^{-1}` with `Q = [[1,1],[1,-1]]`.
pub fn q_conjugate(r: &DenseOperator) -> Result<DenseOperator> {
    let q = DenseOperator::from_real_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]])?;
    let qq = kron(&q, &q)?;
    let qq_inv = qq.inverse()?;
    qq.try_mul(r)?.try_mul(&qq_inv)
}

/// `‖R^n − I‖` for a list of exponents, used to report power identities.
pub fn power_residuals(r: &DenseOperator, ns: &[u32]) -> Vec<(u32, f64)> {
    let id = DenseOperator::identity(r.dim());
    ns.iter()
        .map(|&n| {
            (
                n,
                mat_power(r, n)
                    .try_sub(&id)
                    .map(|m| m.frobenius_norm())
                    .unwrap_or(f64::INFINITY),
            )
        })
        .collect()
}

pub fn eigen_multiset(r: &DenseOperator) -> Result<EigenMultiset> {
    crate::tensor::eigen_multiset(r, EIG_CLUSTER_TOL)
}
