//! Dense complex operators on tensor products of small local spaces.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest matrix dimension any constructor will produce unless told otherwise.
pub const DEFAULT_CAP: usize = 1 << 14;
/// Relative Frobenius tolerance for operator comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Distance below which eigenvalues are merged into one cluster.
pub const EIG_CLUSTER_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteMeta {
    pub d: usize,
    pub n: usize,
}

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorJson", into = "OperatorJson")]
pub struct DenseOperator {
    dim: usize,
    data: Vec<C64>,
    meta: Option<SiteMeta>,
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    entries: Vec<[f64; 2]>,
}

impl From<DenseOperator> for OperatorJson {
    fn from(op: DenseOperator) -> Self {
        OperatorJson {
            dim: op.dim,
            d: op.meta.map(|m| m.d),
            n: op.meta.map(|m| m.n),
            entries: op.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<OperatorJson> for DenseOperator {
    type Error = Error;

    fn try_from(js: OperatorJson) -> Result<Self> {
        if js.dim == 0 || js.entries.len() != js.dim * js.dim {
            return Err(Error::Dimension(format!(
                "{} entries for dim {}",
                js.entries.len(),
                js.dim
            )));
        }
        if js
            .entries
            .iter()
            .any(|e| !e[0].is_finite() || !e[1].is_finite())
        {
            return Err(Error::Invalid("non-finite matrix entry".into()));
        }
        let data = js.entries.iter().map(|e| C64::new(e[0], e[1])).collect();
        let op = DenseOperator {
            dim: js.dim,
            data,
            meta: None,
        };
        match (js.d, js.n) {
            (Some(d), Some(n)) => op.with_meta(d, n),
            (None, None) => Ok(op),
            _ => Err(Error::Invalid("`d` and `n` must be given together".into())),
        }
    }
}

fn checked_pow(d: usize, n: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..n {
        acc = acc.checked_mul(d)?;
    }
    Some(acc)
}

impl DenseOperator {
    pub fn zeros(dim: usize) -> Self {
        DenseOperator {
            dim,
            data: vec![ZERO; dim * dim],
            meta: None,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.data[i * dim + i] = ONE;
        }
        op
    }

    /// Identity on `n` sites of local dimension `d`.
    pub fn identity_sites(d: usize, n: usize) -> Result<Self> {
        let dim = checked_pow(d, n)
            .filter(|&x| x <= DEFAULT_CAP)
            .ok_or(Error::Capacity {
                requested: d.saturating_pow(n as u32),
                cap: DEFAULT_CAP,
            })?;
        Self::identity(dim).with_meta(d, n)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        DenseOperator {
            dim,
            data,
            meta: None,
        }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension("rows do not form a square matrix".into()));
        }
        Ok(Self::from_fn(dim, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(values: &[C64]) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { ZERO })
    }

    /// Attach site metadata; fails unless `dim == d^n`.
    pub fn with_meta(mut self, d: usize, n: usize) -> Result<Self> {
        if checked_pow(d, n) != Some(self.dim) {
            return Err(Error::Dimension(format!(
                "dim {} is not {}^{}",
                self.dim, d, n
            )));
        }
        self.meta = Some(SiteMeta { d, n });
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn meta(&self) -> Option<SiteMeta> {
        self.meta
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn scale(&self, c: C64) -> Self {
        DenseOperator {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
            meta: self.meta,
        }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::from_fn(n, |i, j| self.get(j, i).conj());
        out.meta = self.meta;
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::from_fn(n, |i, j| self.get(j, i));
        out.meta = self.meta;
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn merged_meta(&self, other: &Self) -> Option<SiteMeta> {
        if self.meta == other.meta {
            self.meta
        } else {
            None
        }
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::Dimension(format!("{} vs {}", self.dim, rhs.dim)));
        }
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                // Kronecker-embedded operators are mostly zeros; skipping them pays off.
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in row.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(DenseOperator {
            dim: n,
            data: out,
            meta: self.merged_meta(rhs),
        })
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::Dimension(format!("{} vs {}", self.dim, rhs.dim)));
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(DenseOperator {
            dim: self.dim,
            data,
            meta: self.merged_meta(rhs),
        })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    /// `self += c * other`, in place.
    pub fn axpy(&mut self, c: C64, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!("{} vs {}", self.dim, other.dim)));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(Error::Dimension(format!(
                "vector {} vs operator {}",
                v.len(),
                self.dim
            )));
        }
        Ok(self
            .data
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension("not square".into()));
        }
        Ok(Self::from_fn(m.nrows(), |i, j| m[(i, j)]))
    }

    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        let schur = self
            .to_nalgebra()
            .try_schur(f64::EPSILON, 10_000)
            .ok_or_else(|| {
                Error::Numerical(format!(
                    "Schur iteration did not converge (dim {}, norm {:.3e})",
                    self.dim,
                    self.frobenius_norm()
                ))
            })?;
        let ev = schur
            .eigenvalues()
            .ok_or_else(|| Error::Numerical("Schur form is not triangular".into()))?;
        Ok(ev.iter().copied().collect())
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self
            .to_nalgebra()
            .singular_values()
            .iter()
            .copied()
            .collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = self
            .to_nalgebra()
            .try_inverse()
            .ok_or_else(|| Error::Singular("matrix is not invertible".into()))?;
        let mut out = Self::from_nalgebra(&inv)?;
        out.meta = self.meta;
        if !out.is_finite() {
            return Err(Error::Singular("inverse has non-finite entries".into()));
        }
        Ok(out)
    }
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;

    /// Panics on a dimension mismatch; use [`DenseOperator::try_mul`] to recover.
    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        self.try_mul(rhs).expect("operator dimensions must agree")
    }
}

impl Add for &DenseOperator {
    type Output = DenseOperator;

    fn add(self, rhs: &DenseOperator) -> DenseOperator {
        self.try_add(rhs).expect("operator dimensions must agree")
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;

    fn sub(self, rhs: &DenseOperator) -> DenseOperator {
        self.try_sub(rhs).expect("operator dimensions must agree")
    }
}

impl fmt::Display for DenseOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.data.chunks(self.dim) {
            let cells: Vec<String> = row.iter().map(|z| fmt_c64(*z)).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Compact display rounded to 12 decimals; stored values are never rounded.
pub fn fmt_c64(z: C64) -> String {
    let short = |x: f64| -> String {
        let s = format!("{x:.12}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".into()
        } else {
            s.to_string()
        }
    };
    let (re, im) = (short(z.re), short(z.im));
    match (re.as_str(), im.as_str()) {
        (_, "0") => re,
        ("0", _) => format!("{im}i"),
        _ if im.starts_with('-') => format!("{re}{im}i"),
        _ => format!("{re}+{im}i"),
    }
}

pub fn kron_with_cap(a: &DenseOperator, b: &DenseOperator, cap: usize) -> Result<DenseOperator> {
    let dim = a
        .dim
        .checked_mul(b.dim)
        .filter(|&x| x <= cap)
        .ok_or(Error::Capacity {
            requested: a.dim.saturating_mul(b.dim),
            cap,
        })?;
    let (n, m) = (a.dim, b.dim);
    let mut data = vec![ZERO; dim * dim];
    for i in 0..n {
        for j in 0..n {
            let x = a.data[i * n + j];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for k in 0..m {
                let base = (i * m + k) * dim + j * m;
                for l in 0..m {
                    data[base + l] = x * b.data[k * m + l];
                }
            }
        }
    }
    let meta = match (a.meta, b.meta) {
        (Some(x), Some(y)) if x.d == y.d => Some(SiteMeta {
            d: x.d,
            n: x.n + y.n,
        }),
        _ => None,
    };
    Ok(DenseOperator { dim, data, meta })
}

/// Kronecker product `a ⊗ b` with the default capacity.
pub fn kron(a: &DenseOperator, b: &DenseOperator) -> Result<DenseOperator> {
    kron_with_cap(a, b, DEFAULT_CAP)
}

pub fn kron_all(ops: &[DenseOperator]) -> Result<DenseOperator> {
    let mut it = ops.iter();
    let first = it
        .next()
        .ok_or_else(|| Error::Invalid("empty Kronecker product".into()))?
        .clone();
    it.try_fold(first, |acc, op| kron(&acc, op))
}

/// Place `op` on the contiguous sites starting at `first_site` (1-based) of an `n`-site chain.
pub fn embed_at(
    op: &DenseOperator,
    first_site: usize,
    n: usize,
    d: usize,
) -> Result<DenseOperator> {
    let support = (0..=n)
        .find(|&s| checked_pow(d, s) == Some(op.dim))
        .ok_or_else(|| Error::Dimension(format!("dim {} is not a power of {}", op.dim, d)))?;
    if first_site == 0 || first_site + support > n + 1 {
        return Err(Error::IndexOutOfRange(format!(
            "support {} at site {} exceeds {} sites",
            support, first_site, n
        )));
    }
    let left = DenseOperator::identity_sites(d, first_site - 1)?;
    let right = DenseOperator::identity_sites(d, n + 1 - first_site - support)?;
    let op = op.clone().with_meta(d, support)?;
    kron(&kron(&left, &op)?, &right)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub pass: bool,
    pub residual: f64,
}

/// Frobenius distance, passing when it is at most `tol * max(1, ‖a‖_F)`.
pub fn approx_eq(a: &DenseOperator, b: &DenseOperator, tol: f64) -> Result<Comparison> {
    let residual = a.try_sub(b)?.frobenius_norm();
    Ok(Comparison {
        pass: residual <= tol * a.frobenius_norm().max(1.0),
        residual,
    })
}

pub fn mat_power(op: &DenseOperator, n: u32) -> DenseOperator {
    let mut result = DenseOperator::identity(op.dim);
    result.meta = op.meta;
    let mut base = op.clone();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Eigenvalues grouped into clusters with multiplicities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenMultiset {
    pub clusters: Vec<(C64, usize)>,
}

impl EigenMultiset {
    pub fn from_values(values: &[C64], tol: f64) -> Self {
        let n = values.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for i in 0..n {
            for j in i + 1..n {
                if (values[i] - values[j]).norm() <= tol {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<C64>> = Default::default();
        for (i, &v) in values.iter().enumerate() {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(v);
        }
        let clusters = groups
            .into_values()
            .map(|g| (g.iter().sum::<C64>() / g.len() as f64, g.len()))
            .collect();
        Self::from_clusters(clusters)
    }

    pub fn from_clusters(mut clusters: Vec<(C64, usize)>) -> Self {
        clusters.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
        EigenMultiset { clusters }
    }

    pub fn total(&self) -> usize {
        self.clusters.iter().map(|c| c.1).sum()
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self::from_clusters(self.clusters.iter().map(|&(v, m)| (f(v), m)).collect())
    }

    /// Same cluster values (within `tol`) with identical multiplicities.
    pub fn matches(&self, other: &Self, tol: f64) -> bool {
        if self.clusters.len() != other.clusters.len() || self.total() != other.total() {
            return false;
        }
        let mut used = vec![false; other.clusters.len()];
        self.clusters.iter().all(|&(v, m)| {
            let hit = other
                .clusters
                .iter()
                .enumerate()
                .position(|(j, &(w, k))| !used[j] && k == m && (v - w).norm() <= tol);
            match hit {
                Some(j) => {
                    used[j] = true;
                    true
                }
                None => false,
            }
        })
    }
}

impl fmt::Display for EigenMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .clusters
            .iter()
            .map(|&(v, m)| format!("{}({})", fmt_c64(v), m))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub fn eigen_multiset(op: &DenseOperator, tol: f64) -> Result<EigenMultiset> {
    Ok(EigenMultiset::from_values(&op.eigenvalues()?, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> DenseOperator {
        DenseOperator::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    fn pauli_z() -> DenseOperator {
        DenseOperator::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap()
    }

    #[test]
    fn kron_identities() {
        let i2 = DenseOperator::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), DenseOperator::identity(4));
        let xx = kron(&pauli_x(), &pauli_x()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(xx.get(i, j), if i + j == 3 { ONE } else { ZERO });
            }
        }
        let zz = kron(&pauli_z(), &pauli_z()).unwrap();
        let expect = DenseOperator::diagonal(&[ONE, -ONE, -ONE, ONE]);
        assert_eq!(zz, expect);
    }

    #[test]
    fn kron_capacity() {
        let a = DenseOperator::identity(8);
        assert!(matches!(
            kron_with_cap(&a, &a, 32),
            Err(Error::Capacity { .. })
        ));
        assert_eq!(kron_with_cap(&a, &a, 64).unwrap().dim(), 64);
        let big = DenseOperator::identity(1 << 8);
        assert!(matches!(kron(&big, &big), Err(Error::Capacity { .. })));
    }

    #[test]
    fn embed_examples() {
        let swap = DenseOperator::from_real_rows(&[
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        let e = embed_at(&swap, 1, 3, 2).unwrap();
        assert_eq!(
            e.data(),
            kron(&swap, &DenseOperator::identity(2)).unwrap().data()
        );
        let last = embed_at(&swap, 2, 3, 2).unwrap();
        assert_eq!(
            last.data(),
            kron(&DenseOperator::identity(2), &swap).unwrap().data()
        );
        let r = DenseOperator::identity(8);
        let big = embed_at(&r, 1, 5, 2).unwrap();
        assert_eq!(big.dim(), 32);
        assert_eq!(big.meta(), Some(SiteMeta { d: 2, n: 5 }));
        assert!(embed_at(&r, 4, 5, 2).is_err());
    }

    #[test]
    fn approx_eq_semantics() {
        let a = kron(&pauli_x(), &pauli_z()).unwrap();
        let c = approx_eq(&a, &a, 1e-9).unwrap();
        assert!(c.pass && c.residual == 0.0);
        let mut b = a.clone();
        b.set(0, 1, b.get(0, 1) + C64::new(1e-15, 0.0));
        assert!(approx_eq(&a, &b, 1e-9).unwrap().pass);
        let swap = DenseOperator::from_real_rows(&[
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        let c = approx_eq(&swap, &DenseOperator::identity(4), 1e-9).unwrap();
        assert!(!c.pass);
        assert!((c.residual - 2.0).abs() < 1e-15);
        assert!(approx_eq(&swap, &DenseOperator::identity(2), 1e-9).is_err());
    }

    #[test]
    fn powers() {
        let x = pauli_x();
        assert_eq!(mat_power(&x, 0), DenseOperator::identity(2));
        assert_eq!(mat_power(&x, 2), DenseOperator::identity(2));
        assert_eq!(mat_power(&x, 7), x);
    }

    #[test]
    fn eigen_identity_and_clusters() {
        let ms = eigen_multiset(&DenseOperator::identity(8), EIG_CLUSTER_TOL).unwrap();
        assert_eq!(ms.clusters, vec![(ONE, 8)]);
        let d = DenseOperator::diagonal(&[I, -I, ONE, ONE + C64::new(1e-9, 0.0)]);
        let ms = eigen_multiset(&d, EIG_CLUSTER_TOL).unwrap();
        assert_eq!(ms.total(), 4);
        assert_eq!(ms.clusters.len(), 3);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let op = DenseOperator::from_fn(4, |i, j| {
            C64::new(0.1 * i as f64 - 1.0 / 3.0, (j as f64).sqrt())
        })
        .with_meta(2, 2)
        .unwrap();
        let s = serde_json::to_string(&op).unwrap();
        let back: DenseOperator = serde_json::from_str(&s).unwrap();
        assert_eq!(op, back);
        assert!(serde_json::from_str::<DenseOperator>(r#"{"dim":2,"entries":[[1,0]]}"#).is_err());
    }

    #[test]
    fn inverse_and_singular_values() {
        let a = DenseOperator::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let prod = &a * &a.inverse().unwrap();
        assert!(
            approx_eq(&prod, &DenseOperator::identity(2), 1e-14)
                .unwrap()
                .pass
        );
        let s = DenseOperator::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(s.singular_values()[1] < 1e-14);
    }
}
