//! States, SLOCC classification for two to four qubits, the entangling test
//! for gates, and invertible-local-operator (ILO) chains.

use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{kron_all, DenseOperator, C64, I, ONE, ZERO};

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOL: f64 = 1e-8;
/// Normalized 3-tangle above which a (2,2,2) state is GHZ rather than W.
pub const TANGLE_TOL: f64 = 1e-8;

#[derive(Serialize, Deserialize)]
struct StateJson {
    n: usize,
    amplitudes: Vec<[f64; 2]>,
}

/// Qubit state in binary-string index order, site 1 most significant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "StateJson", try_from = "StateJson")]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<C64>,
}

impl From<StateVector> for StateJson {
    fn from(s: StateVector) -> Self {
        StateJson {
            n: s.n,
            amplitudes: s.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<StateJson> for StateVector {
    type Error = Error;

    fn try_from(j: StateJson) -> Result<Self> {
        StateVector::new(
            j.n,
            j.amplitudes
                .into_iter()
                .map(|[re, im]| C64::new(re, im))
                .collect(),
        )
    }
}

impl StateVector {
    pub fn new(n: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if n == 0 || n > 14 || amplitudes.len() != 1 << n {
            return Err(Error::Dimension(format!(
                "{} amplitudes for {n} qubits",
                amplitudes.len()
            )));
        }
        Ok(StateVector { n, amplitudes })
    }

    /// Computational basis state from a bit string such as `"0101"`.
    pub fn basis(bits: &str) -> Result<Self> {
        let idx = parse_bits(bits)?;
        let n = bits.len();
        let mut amps = vec![ZERO; 1 << n];
        amps[idx] = ONE;
        Self::new(n, amps)
    }

    pub fn basis_index(n: usize, idx: usize) -> Result<Self> {
        if idx >= 1 << n {
            return Err(Error::IndexOutOfRange(format!(
                "basis index {idx} on {n} qubits"
            )));
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[idx] = ONE;
        Self::new(n, amps)
    }

    /// `Σ coeff |bits⟩`, each coefficient multiplied by `scale`.
    pub fn from_terms(n: usize, terms: &[(String, C64)], scale: C64) -> Result<Self> {
        let mut amps = vec![ZERO; 1 << n];
        for (bits, c) in terms {
            if bits.len() != n {
                return Err(Error::Dimension(format!("ket |{bits}⟩ on {n} qubits")));
            }
            amps[parse_bits(bits)?] += c * scale;
        }
        Self::new(n, amps)
    }

    /// Tensor product of single-qubit states `(a_i, b_i)`.
    pub fn product(sites: &[[C64; 2]]) -> Result<Self> {
        let mut amps = vec![ONE];
        for s in sites {
            amps = amps.iter().flat_map(|a| [a * s[0], a * s[1]]).collect();
        }
        Self::new(sites.len(), amps)
    }

    pub fn ghz(n: usize) -> Result<Self> {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = h;
        amps[(1 << n) - 1] = h;
        Self::new(n, amps)
    }

    pub fn w3() -> Self {
        let s = C64::new(1.0 / 3f64.sqrt(), 0.0);
        let mut amps = vec![ZERO; 8];
        amps[1] = s;
        amps[2] = s;
        amps[4] = s;
        StateVector {
            n: 3,
            amplitudes: amps,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let nrm = self.norm();
        if nrm < 1e-300 {
            return Err(Error::Numerical("cannot normalize the zero vector".into()));
        }
        Ok(StateVector {
            n: self.n,
            amplitudes: self.amplitudes.iter().map(|z| z / nrm).collect(),
        })
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Nonzero terms as `(bits, amplitude)`.
    pub fn terms(&self, tol: f64) -> Vec<(String, C64)> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > tol)
            .map(|(i, z)| (format!("{:0width$b}", i, width = self.n), *z))
            .collect()
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms(1e-12)
            .into_iter()
            .map(|(b, z)| format!("{}|{}⟩", crate::tensor::fmt_c64(z), b))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

fn parse_bits(bits: &str) -> Result<usize> {
    if bits.is_empty() || bits.len() > 14 || !bits.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::Invalid(format!("'{bits}' is not a bit string")));
    }
    Ok(usize::from_str_radix(bits, 2).expect("validated"))
}

pub fn apply_gate(r: &DenseOperator, state: &StateVector) -> Result<StateVector> {
    StateVector::new(state.n, r.apply(&state.amplitudes)?)
}

/// Rank of the amplitude matrix with rows indexed by `sites` (1-based) and
/// columns by the complement.
pub fn schmidt_rank(state: &StateVector, sites: &[usize], tol: f64) -> Result<usize> {
    let n = state.n;
    if sites.is_empty() || sites.len() >= n || sites.iter().any(|&s| s == 0 || s > n) {
        return Err(Error::Invalid(format!(
            "{sites:?} is not a proper bipartition of {n} sites"
        )));
    }
    let mut rows_sites: Vec<usize> = sites.to_vec();
    rows_sites.sort_unstable();
    rows_sites.dedup();
    if rows_sites.len() != sites.len() {
        return Err(Error::Invalid(format!("repeated site in {sites:?}")));
    }
    let cols_sites: Vec<usize> = (1..=n).filter(|s| !rows_sites.contains(s)).collect();
    let bit = |idx: usize, site: usize| (idx >> (n - site)) & 1;
    let (nr, nc) = (1 << rows_sites.len(), 1 << cols_sites.len());
    let mut m = DMatrix::<C64>::zeros(nr, nc);
    for (idx, &z) in state.amplitudes.iter().enumerate() {
        let r = rows_sites.iter().fold(0, |acc, &s| acc << 1 | bit(idx, s));
        let c = cols_sites.iter().fold(0, |acc, &s| acc << 1 | bit(idx, s));
        m[(r, c)] = z;
    }
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol * top).count())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThreeQubitClass {
    #[serde(rename = "A-B-C")]
    ABC,
    #[serde(rename = "A-BC")]
    ABc,
    #[serde(rename = "AB-C")]
    AbC,
    #[serde(rename = "AC-B")]
    AcB,
    W,
    #[serde(rename = "GHZ")]
    Ghz,
}

impl fmt::Display for ThreeQubitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThreeQubitClass::ABC => "A-B-C",
            ThreeQubitClass::ABc => "A-BC",
            ThreeQubitClass::AbC => "AB-C",
            ThreeQubitClass::AcB => "AC-B",
            ThreeQubitClass::W => "W",
            ThreeQubitClass::Ghz => "GHZ",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coarse4 {
    FullyProduct,
    BellTimesSep,
    BellTimesBell,
    /// An entangled three-site block times a single site.
    TripartiteTimesSep,
    GenuineMultipartite,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile4q {
    /// Ranks across `{1}`, `{2}`, `{3}`, `{4}`, `{1,2}`, `{1,3}`, `{1,4}`.
    pub bipartition_ranks: Vec<usize>,
    pub coarse: Coarse4,
    /// Finest factorization into site blocks.
    pub factors: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "n")]
pub enum SloccLabel {
    #[serde(rename = "2")]
    Two { bell: bool },
    #[serde(rename = "3")]
    Three {
        class: ThreeQubitClass,
        ranks: [usize; 3],
        tangle: f64,
    },
    #[serde(rename = "4")]
    Four(Profile4q),
}

impl SloccLabel {
    /// Short class name: `Product`, `Bell`, `GHZ`, `AC-B`, `GenuineMultipartite`, ...
    pub fn name(&self) -> String {
        match self {
            SloccLabel::Two { bell: false } => "Product".into(),
            SloccLabel::Two { bell: true } => "Bell".into(),
            SloccLabel::Three { class, .. } => class.to_string(),
            SloccLabel::Four(p) => format!("{:?}", p.coarse),
        }
    }

    pub fn is_fully_product(&self) -> bool {
        match self {
            SloccLabel::Two { bell } => !bell,
            SloccLabel::Three { class, .. } => *class == ThreeQubitClass::ABC,
            SloccLabel::Four(p) => p.coarse == Coarse4::FullyProduct,
        }
    }

    pub fn tangle(&self) -> Option<f64> {
        match self {
            SloccLabel::Three { tangle, .. } => Some(*tangle),
            _ => None,
        }
    }
}

impl fmt::Display for SloccLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn require_n(state: &StateVector, n: usize) -> Result<()> {
    if state.n != n {
        return Err(Error::Dimension(format!(
            "expected {n} qubits, got {}",
            state.n
        )));
    }
    Ok(())
}

pub fn slocc_2q(state: &StateVector, tol: f64) -> Result<SloccLabel> {
    require_n(state, 2)?;
    let s = state.normalized()?;
    let a = &s.amplitudes;
    let det = a[0] * a[3] - a[1] * a[2];
    Ok(SloccLabel::Two {
        bell: det.norm() > tol,
    })
}

/// `4 |Hdet(a)|` for a normalized 3-qubit state.
pub fn three_tangle(state: &StateVector) -> Result<f64> {
    require_n(state, 3)?;
    let a = &state.normalized()?.amplitudes;
    let sq = |z: C64| z * z;
    let d1 = sq(a[0]) * sq(a[7]) + sq(a[1]) * sq(a[6]) + sq(a[2]) * sq(a[5]) + sq(a[4]) * sq(a[3]);
    let d2 = a[0] * a[7] * a[3] * a[4]
        + a[0] * a[7] * a[5] * a[2]
        + a[0] * a[7] * a[6] * a[1]
        + a[3] * a[4] * a[5] * a[2]
        + a[3] * a[4] * a[6] * a[1]
        + a[5] * a[2] * a[6] * a[1];
    let d3 = a[0] * a[6] * a[5] * a[3] + a[7] * a[1] * a[2] * a[4];
    Ok(4.0 * (d1 - 2.0 * d2 + 4.0 * d3).norm())
}

pub fn slocc_3q(state: &StateVector, tol: f64) -> Result<SloccLabel> {
    require_n(state, 3)?;
    let r = [
        schmidt_rank(state, &[1], tol)?,
        schmidt_rank(state, &[2], tol)?,
        schmidt_rank(state, &[3], tol)?,
    ];
    if r.contains(&0) {
        return Err(Error::Numerical("zero state has no class".into()));
    }
    let tangle = three_tangle(state)?;
    let class = match r {
        [1, 1, 1] => ThreeQubitClass::ABC,
        [1, _, _] => ThreeQubitClass::ABc,
        [_, 1, _] => ThreeQubitClass::AcB,
        [_, _, 1] => ThreeQubitClass::AbC,
        _ if tangle > TANGLE_TOL => ThreeQubitClass::Ghz,
        _ => ThreeQubitClass::W,
    };
    Ok(SloccLabel::Three {
        class,
        ranks: r,
        tangle,
    })
}

const CUTS_4Q: [&[usize]; 7] = [&[1], &[2], &[3], &[4], &[1, 2], &[1, 3], &[1, 4]];

pub fn profile_4q(state: &StateVector, tol: f64) -> Result<SloccLabel> {
    require_n(state, 4)?;
    let ranks: Vec<usize> = CUTS_4Q
        .iter()
        .map(|c| schmidt_rank(state, c, tol))
        .collect::<Result<_>>()?;
    if ranks.contains(&0) {
        return Err(Error::Numerical("zero state has no class".into()));
    }
    let factors = finest_factorization(state, tol)?;
    let sizes: Vec<usize> = factors.iter().map(Vec::len).collect();
    let coarse = match sizes.as_slice() {
        s if s.iter().all(|&k| k == 1) => Coarse4::FullyProduct,
        s if s.iter().filter(|&&k| k == 2).count() == 1 && s.iter().all(|&k| k <= 2) => {
            Coarse4::BellTimesSep
        }
        [2, 2] => Coarse4::BellTimesBell,
        s if s.contains(&3) => Coarse4::TripartiteTimesSep,
        _ => Coarse4::GenuineMultipartite,
    };
    Ok(SloccLabel::Four(Profile4q {
        bipartition_ranks: ranks,
        coarse,
        factors,
    }))
}

/// Split the site set recursively along any product cut.
pub fn finest_factorization(state: &StateVector, tol: f64) -> Result<Vec<Vec<usize>>> {
    let n = state.n;
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut remaining: Vec<usize> = (1..=n).collect();
    // A subset S is a factor iff the state has rank 1 across S | complement.
    let mut size = 1;
    while !remaining.is_empty() {
        if size >= remaining.len() {
            blocks.push(remaining.clone());
            break;
        }
        let mut found = None;
        for mask in 1usize..(1 << remaining.len()) {
            if mask.count_ones() as usize != size {
                continue;
            }
            let subset: Vec<usize> = remaining
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &s)| s)
                .collect();
            if subset.len() < n && schmidt_rank(state, &subset, tol)? == 1 {
                found = Some(subset);
                break;
            }
        }
        match found {
            Some(sub) => {
                remaining.retain(|s| !sub.contains(s));
                blocks.push(sub);
            }
            None => size += 1,
        }
    }
    blocks.sort();
    Ok(blocks)
}

/// Classifier matching the qubit count.
pub fn classify(state: &StateVector, tol: f64) -> Result<SloccLabel> {
    match state.n {
        2 => slocc_2q(state, tol),
        3 => slocc_3q(state, tol),
        4 => profile_4q(state, tol),
        n => Err(Error::Invalid(format!("no classifier for {n} qubits"))),
    }
}

/// Whether every single-site cut has rank 1.
pub fn is_fully_product(state: &StateVector, tol: f64) -> Result<bool> {
    for s in 1..=state.n {
        if schmidt_rank(state, &[s], tol)? > 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct EntanglingReport {
    pub entangling: bool,
    /// Product input whose image is entangled.
    pub witness: Option<StateVector>,
    pub output: Option<StateVector>,
    pub trials: usize,
    /// For two-qubit gates: whether R is `A⊗B` or `(A⊗B)·SWAP`.
    pub local_or_swap: Option<bool>,
}

fn random_qubit<R: Rng + ?Sized>(rng: &mut R) -> [C64; 2] {
    let mut v = [ZERO; 2];
    for z in &mut v {
        *z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt().max(1e-12);
    [v[0] / n, v[1] / n]
}

/// Search product inputs (all basis states, then `trials` seeded random
/// ones) for one whose image is not fully product.
pub fn is_entangling(r: &DenseOperator, trials: usize, seed: u64) -> Result<EntanglingReport> {
    let n = r.dim().trailing_zeros() as usize;
    if r.dim() != 1 << n || n == 0 {
        return Err(Error::Dimension(format!(
            "dim {} is not a qubit register",
            r.dim()
        )));
    }
    let local_or_swap = if n == 2 {
        Some(is_local_or_swap(r, RANK_TOL)?)
    } else {
        None
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = (0..1usize << n).map(|i| StateVector::basis_index(n, i));
    let randoms: Vec<Result<StateVector>> = (0..trials)
        .map(|_| StateVector::product(&(0..n).map(|_| random_qubit(&mut rng)).collect::<Vec<_>>()))
        .collect();
    for input in basis.chain(randoms) {
        let input = input?;
        let out = apply_gate(r, &input)?;
        if out.norm() > 1e-12 && !is_fully_product(&out, RANK_TOL)? {
            return Ok(EntanglingReport {
                entangling: true,
                witness: Some(input),
                output: Some(out),
                trials,
                local_or_swap,
            });
        }
    }
    Ok(EntanglingReport {
        entangling: false,
        witness: None,
        output: None,
        trials,
        local_or_swap,
    })
}

/// Operator-Schmidt rank of a two-qubit operator across its two sites.
pub fn operator_schmidt_rank(r: &DenseOperator, tol: f64) -> Result<usize> {
    if r.dim() != 4 {
        return Err(Error::Dimension(
            "operator Schmidt rank needs a 4x4 operator".into(),
        ));
    }
    // realign R[(i1 i2),(j1 j2)] into M[(i1 j1),(i2 j2)]
    let mut m = DMatrix::<C64>::zeros(4, 4);
    for i1 in 0..2 {
        for i2 in 0..2 {
            for j1 in 0..2 {
                for j2 in 0..2 {
                    m[(i1 * 2 + j1, i2 * 2 + j2)] = r.get(i1 * 2 + i2, j1 * 2 + j2);
                }
            }
        }
    }
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    Ok(sv.iter().filter(|&&s| s > tol * top).count())
}

pub fn is_local_or_swap(r: &DenseOperator, tol: f64) -> Result<bool> {
    let swap = crate::rep::swap_op(1, 2, 2, 2)?;
    Ok(operator_schmidt_rank(r, tol)? == 1 || operator_schmidt_rank(&r.try_mul(&swap)?, tol)? == 1)
}

/// Layers of single-site 2×2 operators; layer `k` acts after layer `k-1`.
#[derive(Clone, Debug)]
pub struct IloChain {
    layers: Vec<Vec<DenseOperator>>,
}

impl IloChain {
    pub fn new(layers: Vec<Vec<DenseOperator>>) -> Result<Self> {
        let n = layers
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Invalid("empty ILO chain".into()))?;
        for layer in &layers {
            if layer.len() != n {
                return Err(Error::Dimension(format!(
                    "ILO layers of width {} and {n}",
                    layer.len()
                )));
            }
            for f in layer {
                if f.dim() != 2 {
                    return Err(Error::Dimension("ILO factors must be 2x2".into()));
                }
                let det = f.get(0, 0) * f.get(1, 1) - f.get(0, 1) * f.get(1, 0);
                if det.norm() < 1e-14 {
                    return Err(Error::Singular(format!(
                        "ILO factor with determinant {det}"
                    )));
                }
            }
        }
        Ok(IloChain { layers })
    }

    pub fn single(layer: Vec<DenseOperator>) -> Result<Self> {
        Self::new(vec![layer])
    }

    pub fn n(&self) -> usize {
        self.layers[0].len()
    }

    pub fn layers(&self) -> &[Vec<DenseOperator>] {
        &self.layers
    }

    pub fn then(mut self, other: IloChain) -> Result<Self> {
        if other.n() != self.n() {
            return Err(Error::Dimension("ILO chains of different widths".into()));
        }
        self.layers.extend(other.layers);
        Ok(self)
    }

    /// Undo the chain: reversed layers with inverted factors.
    pub fn inverse(&self) -> Result<Self> {
        let layers = self
            .layers
            .iter()
            .rev()
            .map(|l| {
                l.iter()
                    .map(DenseOperator::inverse)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IloChain { layers })
    }

    /// The full operator `L_last ⋯ L_1`.
    pub fn operator(&self) -> Result<DenseOperator> {
        let mut acc = DenseOperator::identity(1 << self.n());
        for l in &self.layers {
            acc = kron_all(l)?.try_mul(&acc)?;
        }
        Ok(acc)
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.n != self.n() {
            return Err(Error::Dimension(format!(
                "chain on {} sites, state on {}",
                self.n(),
                state.n
            )));
        }
        apply_gate(&self.operator()?, state)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IloFit {
    pub equivalent: bool,
    #[serde(serialize_with = "ser_c64")]
    pub scalar: C64,
    /// `‖v − c b‖ / ‖v‖` with `v` the mapped state.
    pub residual: f64,
}

fn ser_c64<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Whether `chain · a = c · b` for some nonzero scalar `c`.
pub fn ilo_equivalent(
    a: &StateVector,
    chain: &IloChain,
    b: &StateVector,
    tol: f64,
) -> Result<IloFit> {
    if a.n != b.n {
        return Err(Error::Dimension(format!(
            "states on {} and {} qubits",
            a.n, b.n
        )));
    }
    let v = chain.apply(a)?;
    let bb = inner(&b.amplitudes, &b.amplitudes);
    if bb.norm() == 0.0 {
        return Err(Error::Invalid("target state is zero".into()));
    }
    let c = inner(&b.amplitudes, &v.amplitudes) / bb;
    let resid: f64 = v
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| (x - c * y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let residual = resid / v.norm().max(1e-300);
    Ok(IloFit {
        equivalent: residual <= tol && c.norm() > tol,
        scalar: c,
        residual,
    })
}

fn m2(a: C64, b: C64, c: C64, d: C64) -> DenseOperator {
    DenseOperator::from_rows(&[vec![a, b], vec![c, d]]).expect("2x2")
}

fn eye2() -> DenseOperator {
    DenseOperator::identity(2)
}

fn pauli_x() -> DenseOperator {
    m2(ZERO, ONE, ONE, ZERO)
}

fn diag2(a: C64, b: C64) -> DenseOperator {
    DenseOperator::diagonal(&[a, b])
}

/// Unnormalized `|0…0⟩ + |1…1⟩`.
pub fn ghz_target(n: usize) -> Result<StateVector> {
    let mut amps = vec![ZERO; 1 << n];
    amps[0] = ONE;
    amps[(1 << n) - 1] = ONE;
    StateVector::new(n, amps)
}

/// First displayed chain, taking `|000⟩+|111⟩` to the first GHZ-class state.
pub fn ghz_chain_first(a1: C64, a2: C64, b1: C64, b2: C64) -> Result<IloChain> {
    let q = |x: C64| ONE / (4.0 * x);
    IloChain::single(vec![
        m2(a1, b1, I * a1, -I * b1),
        m2(a2, b2, -I * a2, I * b2),
        m2(I * q(a1 * a2), -I * q(b1 * b2), -q(a1 * a2), -q(b1 * b2)),
    ])
}

/// Second displayed chain, shared by a GHZ-class F3P state and an F3Pair state.
pub fn ghz_chain_second(a1: C64, a2: C64, b1: C64, b2: C64) -> Result<IloChain> {
    let q = |x: C64| ONE / (4.0 * x);
    IloChain::single(vec![
        m2(a1, b1, I * a1, -I * b1),
        m2(a2, b2, I * a2, -I * b2),
        m2(-q(a1 * a2), -q(b1 * b2), I * q(a1 * a2), -I * q(b1 * b2)),
    ])
}

fn eig2(m: &DenseOperator) -> Result<([C64; 2], DenseOperator)> {
    let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
    let l = [(tr + disc) / 2.0, (tr - disc) / 2.0];
    if (l[0] - l[1]).norm() < 1e-10 * (1.0 + l[0].norm()) {
        return Err(Error::Singular(
            "degenerate slice pencil: state is not in the GHZ class".into(),
        ));
    }
    let scale = m
        .data()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    let vec_for = |lam: C64| -> [C64; 2] {
        let r1 = [b, lam - a];
        let r2 = [lam - d, c];
        if r1[0].norm() + r1[1].norm() > r2[0].norm() + r2[1].norm() {
            r1
        } else if r2[0].norm() + r2[1].norm() > 1e-13 * scale {
            r2
        } else if (a - lam).norm() < (d - lam).norm() {
            [ONE, ZERO]
        } else {
            [ZERO, ONE]
        }
    };
    let (v0, v1) = (vec_for(l[0]), vec_for(l[1]));
    Ok((l, m2(v0[0], v1[0], v0[1], v1[1])))
}

/// `state = (A⊗B⊗C)(|000⟩+|111⟩)` for a GHZ-class state.
#[derive(Clone, Debug)]
pub struct GhzDecomposition {
    /// Maps `|000⟩+|111⟩` to the state.
    pub from_ghz: IloChain,
    /// Maps the state to `|000⟩+|111⟩`.
    pub to_ghz: IloChain,
}

/// Factor a GHZ-class 3-qubit state through the eigenvectors of its slice
/// pencil `M1 M0^{-1}`.
pub fn ghz_decomposition(state: &StateVector) -> Result<GhzDecomposition> {
    require_n(state, 3)?;
    let a = &state.amplitudes;
    let slice = |s: usize| m2(a[4 * s], a[4 * s + 1], a[4 * s + 2], a[4 * s + 3]);
    let (m0, m1) = (slice(0), slice(1));
    let det = |m: &DenseOperator| m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0);
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let t = [ZERO, ONE, -ONE, I, C64::new(2.0, 0.0)]
        .into_iter()
        .find(|&t| det(&(&m0 + &m1.scale(t))).norm() > 1e-8 * scale)
        .ok_or_else(|| Error::Singular("no invertible slice combination".into()))?;
    let m0p = &m0 + &m1.scale(t);
    let pencil = m1.try_mul(&m0p.inverse()?)?;
    let (lam, b) = eig2(&pencil)?;
    let ct = b.inverse()?.try_mul(&m0p)?;
    let a_prime = m2(ONE, ONE, lam[0], lam[1]);
    let t_inv = m2(ONE, -t, ZERO, ONE);
    let a_op = t_inv.try_mul(&a_prime)?;
    let from_ghz = IloChain::single(vec![a_op, b, ct.transpose()])?;
    let to_ghz = from_ghz.inverse()?;
    Ok(GhzDecomposition { from_ghz, to_ghz })
}

#[derive(Clone, Debug, Serialize)]
pub struct GabcdFit {
    #[serde(serialize_with = "ser_c64")]
    pub lambda: C64,
    pub residual: f64,
}

/// Best fit of a 4-qubit state to `c(|0000⟩+|1111⟩ + λ(|0011⟩+|1100⟩))`.
pub fn gabcd_fit(state: &StateVector) -> Result<GabcdFit> {
    require_n(state, 4)?;
    let p = &state.amplitudes;
    let c = (p[0] + p[15]) / 2.0;
    let cl = (p[3] + p[12]) / 2.0;
    if c.norm() < 1e-300 {
        return Err(Error::Numerical("no |0000⟩+|1111⟩ component".into()));
    }
    let mut t = vec![ZERO; 16];
    t[0] = c;
    t[15] = c;
    t[3] = cl;
    t[12] = cl;
    let resid: f64 = p
        .iter()
        .zip(&t)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(GabcdFit {
        lambda: cl / c,
        residual: resid / state.norm(),
    })
}

fn quarter_root_inv(z: C64) -> C64 {
    z.powf(-0.25)
}

/// Case I chain: flip sites 2 and 4, then rescale each site with the
/// `|0101⟩` and `|1010⟩` weights. `c1` is the `|0101⟩` coefficient.
pub fn case_one_chain_with(q: f64, c1: f64) -> Result<IloChain> {
    let delta = q + 1.0 / q;
    let flip = IloChain::single(vec![eye2(), pauli_x(), eye2(), pauli_x()])?;
    let dg = diag2(
        quarter_root_inv(C64::new(c1, 0.0)),
        quarter_root_inv(C64::new(-2.0 / (delta * delta), 0.0)),
    );
    flip.then(IloChain::single(vec![
        dg.clone(),
        dg.clone(),
        dg.clone(),
        dg,
    ])?)
}

/// `1 − 2Q²/Δ²`, the actual `|0101⟩` weight of the Case I output.
pub fn case_one_weight(q: f64) -> f64 {
    let delta = q + 1.0 / q;
    1.0 - 2.0 * q * q / (delta * delta)
}

/// `1 − 2Q/Δ²`, the weight as displayed alongside the chain.
pub fn case_one_weight_printed(q: f64) -> f64 {
    let delta = q + 1.0 / q;
    1.0 - 2.0 * q / (delta * delta)
}

pub fn case_one_chain(q: f64) -> Result<IloChain> {
    case_one_chain_with(q, case_one_weight(q))
}

pub fn case_four_chain(q: f64) -> Result<IloChain> {
    let delta = q + 1.0 / q;
    let c1 = 1.0 - 2.0 * q / delta + 2.0 * q * q / (delta * delta);
    let flip = IloChain::single(vec![eye2(), pauli_x(), eye2(), pauli_x()])?;
    let phase = IloChain::single(vec![eye2(), diag2(I / q, ONE), diag2(-I * q, ONE), eye2()])?;
    let dg = diag2(
        quarter_root_inv(C64::new(c1, 0.0)),
        quarter_root_inv(C64::new(2.0 / (delta * delta), 0.0)),
    );
    flip.then(phase)?.then(IloChain::single(vec![
        dg.clone(),
        dg.clone(),
        dg.clone(),
        dg,
    ])?)
}

/// Random single-site factors with `|det| ≥ 0.2`.
pub fn random_ilo_layer<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<DenseOperator> {
    (0..n)
        .map(|_| loop {
            let mut z = || C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let m = m2(z(), z(), z(), z());
            let det = m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0);
            if det.norm() >= 0.2 {
                break m;
            }
        })
        .collect()
}

pub fn random_product_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<StateVector> {
    StateVector::product(&(0..n).map(|_| random_qubit(rng)).collect::<Vec<_>>())
}
