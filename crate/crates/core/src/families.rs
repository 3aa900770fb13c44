//! The registered R-matrix ansätze: parameter closures, builders, closed-form
//! inverses, unitary angle maps, power recursions, and the general
//! multi-qubit ansatz with its damped least-squares solver.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagram::GeneratorToken::{self, PPair, P, S};
use crate::diagram::GeneratorWord;
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::rep::{represent, RepContext, RepKind};
use crate::tensor::{kron, DenseOperator, C64, ONE, ZERO};
use crate::verify::check_gybe;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyId {
    F2P,
    F2Pair,
    F3P,
    F3Pair,
    F42,
    F43,
    FTL4,
}

impl FamilyId {
    pub const ALL: [FamilyId; 7] = [
        FamilyId::F2P,
        FamilyId::F2Pair,
        FamilyId::F3P,
        FamilyId::F3Pair,
        FamilyId::F42,
        FamilyId::F43,
        FamilyId::FTL4,
    ];

    pub fn signature(self) -> Signature {
        let (m, l) = match self {
            FamilyId::F2P | FamilyId::F2Pair => (2, 1),
            FamilyId::F3P | FamilyId::F3Pair => (3, 2),
            FamilyId::F42 | FamilyId::FTL4 => (4, 2),
            FamilyId::F43 => (4, 3),
        };
        Signature { d: 2, m, l }
    }

    pub fn free_params(self) -> &'static [&'static str] {
        match self {
            FamilyId::F2P | FamilyId::FTL4 => &["alpha", "beta", "gamma"],
            FamilyId::F2Pair => &["alpha"],
            FamilyId::F3P => &["alpha1", "alpha3", "beta1", "beta3"],
            FamilyId::F3Pair => &["alpha", "beta", "delta"],
            FamilyId::F42 => &["alpha1", "alpha3", "beta1", "beta2", "beta3", "gamma2"],
            FamilyId::F43 => &["alpha1", "alpha4", "beta1", "beta2", "beta3", "gamma1"],
        }
    }

    pub fn dependent_params(self) -> &'static [&'static str] {
        match self {
            FamilyId::F2P | FamilyId::F2Pair | FamilyId::FTL4 => &[],
            FamilyId::F3P => &["alpha2", "beta2", "gamma"],
            FamilyId::F3Pair => &["gamma"],
            FamilyId::F42 => &["beta4", "beta6", "gamma1", "gamma3", "gamma4", "delta"],
            FamilyId::F43 => &["beta5", "beta6", "gamma2", "gamma3", "gamma4", "delta"],
        }
    }

    pub fn angle_names(self) -> &'static [&'static str] {
        match self {
            FamilyId::F2P | FamilyId::F3Pair | FamilyId::FTL4 => &["theta", "varphi", "phi"],
            FamilyId::F2Pair => &["theta"],
            FamilyId::F3P => &["theta1", "theta3", "varphi1", "varphi3"],
            FamilyId::F42 => &["theta1", "theta3", "phi1", "phi2", "phi3", "varphi2"],
            FamilyId::F43 => &["theta1", "theta4", "phi1", "phi2", "phi3", "varphi1"],
        }
    }

    /// Qubit form in which the family's published matrices are written.
    pub fn rep_kind(self) -> RepKind {
        match self {
            FamilyId::F2P | FamilyId::F2Pair | FamilyId::F3Pair => RepKind::QubitZ,
            FamilyId::F3P | FamilyId::F42 | FamilyId::F43 => RepKind::QubitX,
            FamilyId::FTL4 => RepKind::TemperleyLieb,
        }
    }

    /// Number of sites of the abstract algebra the word lives in.
    pub fn algebra_sites(self) -> usize {
        match self {
            FamilyId::FTL4 => 2,
            other => other.signature().m,
        }
    }

    pub fn has_closed_inverse(self) -> bool {
        matches!(
            self,
            FamilyId::F2P | FamilyId::F2Pair | FamilyId::F3P | FamilyId::F3Pair
        )
    }

    pub fn has_power_recursion(self) -> bool {
        self.has_closed_inverse()
    }

    pub fn needs_q(self) -> bool {
        self == FamilyId::FTL4
    }

    /// Number of real unitary points obtained from angles in `{0, π}`.
    pub fn real_unitary_count(self) -> usize {
        match self {
            FamilyId::F2P | FamilyId::F3Pair | FamilyId::FTL4 => 8,
            FamilyId::F2Pair => 2,
            FamilyId::F3P => 16,
            FamilyId::F42 | FamilyId::F43 => 64,
        }
    }

    /// Generator product multiplying each parameter, after the swap prefix.
    fn terms(self) -> Vec<(&'static str, Vec<GeneratorToken>)> {
        match self {
            FamilyId::F2P | FamilyId::FTL4 => {
                vec![
                    ("alpha", vec![P(1)]),
                    ("beta", vec![P(2)]),
                    ("gamma", vec![P(1), P(2)]),
                ]
            }
            FamilyId::F2Pair => vec![("alpha", vec![PPair(1, 2)])],
            FamilyId::F3P => vec![
                ("alpha1", vec![P(1)]),
                ("alpha2", vec![P(2)]),
                ("alpha3", vec![P(3)]),
                ("beta1", vec![P(1), P(2)]),
                ("beta2", vec![P(2), P(3)]),
                ("beta3", vec![P(1), P(3)]),
                ("gamma", vec![P(1), P(2), P(3)]),
            ],
            FamilyId::F3Pair => vec![
                ("alpha", vec![PPair(1, 2)]),
                ("beta", vec![PPair(2, 3)]),
                ("gamma", vec![PPair(1, 2), PPair(2, 3)]),
                ("delta", vec![PPair(1, 3)]),
            ],
            FamilyId::F42 => vec![
                ("alpha1", vec![P(1)]),
                ("alpha3", vec![P(3)]),
                ("beta1", vec![P(1), P(2)]),
                ("beta2", vec![P(1), P(3)]),
                ("beta3", vec![P(1), P(4)]),
                ("beta4", vec![P(2), P(3)]),
                ("beta6", vec![P(3), P(4)]),
                ("gamma1", vec![P(1), P(2), P(3)]),
                ("gamma2", vec![P(1), P(2), P(4)]),
                ("gamma3", vec![P(1), P(3), P(4)]),
                ("gamma4", vec![P(2), P(3), P(4)]),
                ("delta", vec![P(1), P(2), P(3), P(4)]),
            ],
            FamilyId::F43 => vec![
                ("alpha1", vec![P(1)]),
                ("alpha4", vec![P(4)]),
                ("beta1", vec![P(1), P(2)]),
                ("beta2", vec![P(1), P(3)]),
                ("beta3", vec![P(1), P(4)]),
                ("beta5", vec![P(2), P(4)]),
                ("beta6", vec![P(3), P(4)]),
                ("gamma1", vec![P(1), P(2), P(3)]),
                ("gamma2", vec![P(1), P(2), P(4)]),
                ("gamma3", vec![P(1), P(3), P(4)]),
                ("gamma4", vec![P(2), P(3), P(4)]),
                ("delta", vec![P(1), P(2), P(3), P(4)]),
            ],
        }
    }

    /// The generalized swap `s_{1,1+l}` that prefixes every term.
    fn swap_word(self) -> Vec<GeneratorToken> {
        match self {
            FamilyId::F2P | FamilyId::F2Pair | FamilyId::FTL4 => vec![S(1)],
            FamilyId::F3P | FamilyId::F3Pair | FamilyId::F42 => long_swap(1, 3),
            FamilyId::F43 => long_swap(1, 4),
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyId::F2P => "F2P",
            FamilyId::F2Pair => "F2Pair",
            FamilyId::F3P => "F3P",
            FamilyId::F3Pair => "F3Pair",
            FamilyId::F42 => "F42",
            FamilyId::F43 => "F43",
            FamilyId::FTL4 => "FTL4",
        };
        f.write_str(s)
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Invalid(format!("unknown family '{s}'")))
    }
}

/// `s_{i,j} = s_{j-1} ⋯ s_{i+1} s_i s_{i+1} ⋯ s_{j-1}`
pub fn long_swap(i: usize, j: usize) -> Vec<GeneratorToken> {
    let mut w: Vec<GeneratorToken> = (i + 1..j).rev().map(S).collect();
    w.push(S(i));
    w.extend((i + 1..j).map(S));
    w
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub d: usize,
    pub m: usize,
    pub l: usize,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.d, self.m, self.l)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnsatzFamily {
    pub id: FamilyId,
    pub signature: Signature,
    pub free_params: Vec<&'static str>,
    pub dependent_params: Vec<&'static str>,
    pub rep_kind: RepKind,
}

pub fn list_families() -> Vec<AnsatzFamily> {
    FamilyId::ALL
        .into_iter()
        .map(|id| AnsatzFamily {
            id,
            signature: id.signature(),
            free_params: id.free_params().to_vec(),
            dependent_params: id.dependent_params().to_vec(),
            rep_kind: id.rep_kind(),
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    family: FamilyId,
    params: BTreeMap<String, [f64; 2]>,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
}

/// A full parameter assignment of a family. `q` is the Temperley-Lieb
/// deformation and is present only for [`FamilyId::FTL4`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "PointJson", try_from = "PointJson")]
pub struct ParameterPoint {
    pub family: FamilyId,
    pub values: BTreeMap<String, C64>,
    pub q: Option<f64>,
}

impl From<ParameterPoint> for PointJson {
    fn from(p: ParameterPoint) -> Self {
        PointJson {
            family: p.family,
            params: p
                .values
                .into_iter()
                .map(|(k, v)| (k, [v.re, v.im]))
                .collect(),
            q: p.q,
        }
    }
}

impl TryFrom<PointJson> for ParameterPoint {
    type Error = Error;

    fn try_from(j: PointJson) -> Result<Self> {
        Ok(ParameterPoint {
            family: j.family,
            values: j
                .params
                .into_iter()
                .map(|(k, [re, im])| (k, C64::new(re, im)))
                .collect(),
            q: j.q,
        })
    }
}

impl ParameterPoint {
    pub fn get(&self, name: &str) -> Result<C64> {
        self.values.get(name).copied().ok_or_else(|| {
            Error::Invalid(format!("{} point lacks parameter '{name}'", self.family))
        })
    }

    pub fn free_values(&self) -> Result<BTreeMap<String, C64>> {
        self.family
            .free_params()
            .iter()
            .map(|&n| Ok((n.to_string(), self.get(n)?)))
            .collect()
    }

    pub fn signature(&self) -> Signature {
        self.family.signature()
    }

    fn rep_context(&self) -> Result<RepContext> {
        let q = match (self.family.needs_q(), self.q) {
            (true, Some(q)) => q,
            (true, None) => return Err(Error::Invalid("FTL4 needs a value of Q".into())),
            (false, _) => 1.0,
        };
        RepContext::new(self.family.rep_kind(), self.family.algebra_sites(), q)
    }
}

impl fmt::Display for ParameterPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.family)?;
        let names = self.family.free_params();
        for (i, n) in names.iter().enumerate() {
            let v = self.values.get(*n).copied().unwrap_or(ZERO);
            write!(
                f,
                "{}{}={}",
                if i > 0 { ", " } else { "" },
                n,
                crate::tensor::fmt_c64(v)
            )?;
        }
        if let Some(q) = self.q {
            write!(f, "; Q={q}")?;
        }
        write!(f, ")")
    }
}

const SINGULAR_EPS: f64 = 1e-12;

fn guard(den: C64, expr: &str) -> Result<C64> {
    if den.norm() < SINGULAR_EPS || !den.is_finite() {
        Err(Error::SingularConstraint {
            expr: expr.to_string(),
        })
    } else {
        Ok(den)
    }
}

/// Closures shared by the two four-site families. Arguments are the
/// first-site parameter, the parameter at the far site, the two free
/// pair couplings and the free triple coupling in the order they enter the
/// denominators; returns `(b_a, b_b, g_a, g_b, gamma4, delta)`.
fn four_site_closures(
    a1: C64,
    af: C64,
    ba: C64,
    bb: C64,
    gc: C64,
    names: [&str; 2],
) -> Result<[C64; 6]> {
    let da = guard(ONE + a1 + ba, &format!("1+alpha1+{}", names[0]))?;
    let db = guard(ONE + a1 + bb, &format!("1+alpha1+{}", names[1]))?;
    let d = guard(
        ONE + a1 + ba + bb + gc,
        &format!("1+alpha1+{}+{}+gamma", names[0], names[1]),
    )?;
    let b_a = -ba * (ONE + af) / da;
    let b_b = -bb * (ONE + af) / db;
    let g_a = -ba * (a1 + ba - af) / da;
    let g_b = -bb * (a1 + bb - af) / db;
    let g4 = (ONE + af) * (ba / da - (ONE + a1) * (ba + gc) / (db * d));
    let num = -ba * bb * (2.0 * a1 + ba + bb + 2.0) + gc * ((ONE + a1) * (ONE + a1) - ba * bb);
    let delta = -gc + (ONE + af) * num / (da * db * d);
    Ok([b_a, b_b, g_a, g_b, g4, delta])
}

fn dependents(family: FamilyId, v: &BTreeMap<String, C64>) -> Result<Vec<(&'static str, C64)>> {
    let g = |n: &str| -> Result<C64> {
        v.get(n)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("{family} needs parameter '{n}'")))
    };
    Ok(match family {
        FamilyId::F2P | FamilyId::F2Pair | FamilyId::FTL4 => vec![],
        FamilyId::F3P => {
            let (a1, a3, b1) = (g("alpha1")?, g("alpha3")?, g("beta1")?);
            let den = guard(ONE + a1 + b1, "1+alpha1+beta1")?;
            vec![
                ("alpha2", ZERO),
                ("beta2", -b1 * (ONE + a3) / den),
                ("gamma", b1 * (a3 - a1 - b1) / den),
            ]
        }
        FamilyId::F3Pair => vec![("gamma", -(g("alpha")? + g("beta")?) / 2.0)],
        FamilyId::F42 => {
            let r = four_site_closures(
                g("alpha1")?,
                g("alpha3")?,
                g("beta1")?,
                g("beta3")?,
                g("gamma2")?,
                ["beta1", "beta3"],
            )?;
            ["beta4", "beta6", "gamma1", "gamma3", "gamma4", "delta"]
                .into_iter()
                .zip(r)
                .collect()
        }
        FamilyId::F43 => {
            let r = four_site_closures(
                g("alpha1")?,
                g("alpha4")?,
                g("beta1")?,
                g("beta2")?,
                g("gamma1")?,
                ["beta1", "beta2"],
            )?;
            ["beta5", "beta6", "gamma2", "gamma3", "gamma4", "delta"]
                .into_iter()
                .zip(r)
                .collect()
        }
    })
}

/// Complete a set of free parameters with the family's dependent ones.
pub fn constrain(
    family: FamilyId,
    free: &BTreeMap<String, C64>,
    q: Option<f64>,
) -> Result<ParameterPoint> {
    for name in free.keys() {
        if !family.free_params().contains(&name.as_str()) {
            return Err(Error::Invalid(format!(
                "'{name}' is not a free parameter of {family}"
            )));
        }
    }
    let mut values = BTreeMap::new();
    for &n in family.free_params() {
        let v = free
            .get(n)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("{family} needs '{n}'")))?;
        if !v.is_finite() {
            return Err(Error::Invalid(format!("non-finite value for '{n}'")));
        }
        values.insert(n.to_string(), v);
    }
    if family.needs_q() {
        let q = q.ok_or_else(|| Error::Invalid("FTL4 needs a value of Q".into()))?;
        RepContext::temperley_lieb(2, q)?;
    }
    for (n, v) in dependents(family, &values)? {
        values.insert(n.to_string(), v);
    }
    Ok(ParameterPoint {
        family,
        values,
        q: if family.needs_q() { q } else { None },
    })
}

/// Positional form of [`constrain`] in the order of `free_params`.
pub fn constrain_values(family: FamilyId, free: &[C64], q: Option<f64>) -> Result<ParameterPoint> {
    let names = family.free_params();
    if free.len() != names.len() {
        return Err(Error::Invalid(format!(
            "{family} takes {} free parameters, got {}",
            names.len(),
            free.len()
        )));
    }
    let map = names
        .iter()
        .map(|n| n.to_string())
        .zip(free.iter().copied())
        .collect();
    constrain(family, &map, q)
}

pub fn constrain_real(family: FamilyId, free: &[f64], q: Option<f64>) -> Result<ParameterPoint> {
    let v: Vec<C64> = free.iter().map(|&x| C64::new(x, 0.0)).collect();
    constrain_values(family, &v, q)
}

/// Deviation of every dependent parameter from its closure, relative to
/// `max(1, |expected|)`.
pub fn closure_residuals(point: &ParameterPoint) -> Result<Vec<(String, f64)>> {
    let free = point.free_values()?;
    dependents(point.family, &free)?
        .into_iter()
        .map(|(n, expect)| {
            let have = point.get(n)?;
            Ok((
                n.to_string(),
                (have - expect).norm() / expect.norm().max(1.0),
            ))
        })
        .collect()
}

pub const CLOSURE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, PartialEq, Eq)]
enum SwapSide {
    Left,
    Right,
    Omit,
}

fn assemble(
    family: FamilyId,
    values: &BTreeMap<String, C64>,
    side: SwapSide,
) -> Result<GeneratorWord> {
    let swap = family.swap_word();
    let wrap = |mut toks: Vec<GeneratorToken>| -> Vec<GeneratorToken> {
        match side {
            SwapSide::Left => swap.iter().copied().chain(toks).collect(),
            SwapSide::Right => {
                toks.extend(swap.iter().copied());
                toks
            }
            SwapSide::Omit => toks,
        }
    };
    let mut w = GeneratorWord {
        terms: vec![(ONE, wrap(vec![]))],
    };
    for (name, toks) in family.terms() {
        let c = values
            .get(name)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("{family} point lacks '{name}'")))?;
        if c != ZERO {
            w.terms.push((c, wrap(toks)));
        }
    }
    Ok(w)
}

/// The generator word `s (1 + Σ c_t T_t)` of a point.
pub fn family_word(point: &ParameterPoint) -> Result<GeneratorWord> {
    assemble(point.family, &point.values, SwapSide::Left)
}

/// Build the matrix of a point after checking its closures.
pub fn build(point: &ParameterPoint) -> Result<DenseOperator> {
    let res = closure_residuals(point)?;
    if res.iter().any(|(_, r)| r.is_nan() || *r > CLOSURE_TOL) {
        return Err(Error::Unconstrained { residuals: res });
    }
    build_unchecked(point)
}

/// Build without checking closures, e.g. to evaluate a violated ansatz.
pub fn build_unchecked(point: &ParameterPoint) -> Result<DenseOperator> {
    represent(&family_word(point)?, &point.rep_context()?)
}

fn inverse_values(point: &ParameterPoint) -> Result<BTreeMap<String, C64>> {
    let g = |n: &str| point.get(n);
    let mut out = BTreeMap::new();
    let mut put = |n: &str, v: C64| {
        out.insert(n.to_string(), v);
    };
    match point.family {
        FamilyId::F2P => {
            let (a, b, c) = (g("alpha")?, g("beta")?, g("gamma")?);
            let da = guard(ONE + a, "1+alpha")?;
            let db = guard(ONE + b, "1+beta")?;
            let dt = guard(ONE + a + b + c, "1+alpha+beta+gamma")?;
            put("alpha", -a / da);
            put("beta", -b / db);
            put("gamma", (a * b * (2.0 + a + b + c) - c) / (da * db * dt));
        }
        FamilyId::F2Pair => {
            let a = g("alpha")?;
            put("alpha", -a / guard(ONE + 2.0 * a, "1+2alpha")?);
        }
        FamilyId::F3P => {
            let (a1, a3, b1, b2, b3) = (
                g("alpha1")?,
                g("alpha3")?,
                g("beta1")?,
                g("beta2")?,
                g("beta3")?,
            );
            let d1 = guard(ONE + a1, "1+alpha1")?;
            let d3 = guard(ONE + a3, "1+alpha3")?;
            let d11 = guard(ONE + a1 + b1, "1+alpha1+beta1")?;
            let d32 = guard(ONE + a3 + b2, "1+alpha3+beta2")?;
            let d13 = guard(ONE + a1 + a3 + b3, "1+alpha1+alpha3+beta3")?;
            put("alpha1", -a1 / d1);
            put("alpha2", ZERO);
            put("alpha3", -a3 / d3);
            put("beta1", -b1 / (d1 * d11));
            put("beta2", -b2 / (d3 * d32));
            put(
                "beta3",
                (a1 * a3 * (2.0 + a1 + a3) - b3 * (ONE - a1 * a3)) / (d1 * d3 * d13),
            );
            put("gamma", -b1 * (a1 - a3 + b1) / (d1 * d3 * d11));
        }
        FamilyId::F3Pair => {
            let (a, b, d) = (g("alpha")?, g("beta")?, g("delta")?);
            put("alpha", -a / guard(ONE + 2.0 * a, "1+2alpha")?);
            put("beta", -b / guard(ONE + 2.0 * b, "1+2beta")?);
            put("delta", -d / guard(ONE + 2.0 * d, "1+2delta")?);
            let den = guard(
                2.0 + 4.0 * (a + b + 2.0 * a * b),
                "1+2alpha+2beta+4alpha*beta",
            )?;
            put("gamma", (a + b + 4.0 * a * b) / den);
        }
        other => {
            return Err(Error::UnsupportedFamily {
                family: other.to_string(),
                what: "closed inverse".into(),
            });
        }
    }
    Ok(out)
}

/// `R^{-1} = (1 + T') s` with the closed-form primed parameters.
pub fn closed_inverse(point: &ParameterPoint) -> Result<DenseOperator> {
    let values = inverse_values(point)?;
    represent(
        &assemble(point.family, &values, SwapSide::Right)?,
        &point.rep_context()?,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnglePoint {
    pub family: FamilyId,
    pub angles: BTreeMap<String, f64>,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

impl AnglePoint {
    pub fn new(family: FamilyId, angles: &[f64], q: Option<f64>) -> Result<Self> {
        let names = family.angle_names();
        if angles.len() != names.len() {
            return Err(Error::Invalid(format!(
                "{family} takes {} angles, got {}",
                names.len(),
                angles.len()
            )));
        }
        Ok(AnglePoint {
            family,
            angles: names
                .iter()
                .map(|n| n.to_string())
                .zip(angles.iter().copied())
                .collect(),
            q,
        })
    }
}

fn cis(t: f64) -> C64 {
    C64::from_polar(1.0, t)
}

/// Map angles to the family's unitary parameter surface.
pub fn unitary_from_angles(ap: &AnglePoint) -> Result<ParameterPoint> {
    let a = |n: &str| -> Result<C64> {
        ap.angles
            .get(n)
            .map(|&t| cis(t))
            .ok_or_else(|| Error::Invalid(format!("{} needs angle '{n}'", ap.family)))
    };
    let half = |z: C64| (z - ONE) / 2.0;
    let free: Vec<C64> = match ap.family {
        FamilyId::F2P => {
            let (t, v, p) = (a("theta")?, a("varphi")?, a("phi")?);
            vec![t - ONE, v - ONE, p - t - v + ONE]
        }
        FamilyId::F2Pair => vec![half(a("theta")?)],
        FamilyId::F3P => {
            let (t1, t3, v1, v3) = (a("theta1")?, a("theta3")?, a("varphi1")?, a("varphi3")?);
            vec![t1 - ONE, t3 - ONE, v1 - t1, v3 - t1 - t3 + ONE]
        }
        FamilyId::F3Pair => vec![half(a("theta")?), half(a("varphi")?), half(a("phi")?)],
        FamilyId::F42 => {
            let (t1, t3) = (a("theta1")?, a("theta3")?);
            let (p1, p2, p3, v2) = (a("phi1")?, a("phi2")?, a("phi3")?, a("varphi2")?);
            vec![
                t1 - ONE,
                t3 - ONE,
                p1 - t1,
                p2 - t1 - t3 + ONE,
                p3 - t1,
                v2 - p1 - p3 + t1,
            ]
        }
        FamilyId::F43 => {
            let (t1, t4) = (a("theta1")?, a("theta4")?);
            let (p1, p2, p3, v1) = (a("phi1")?, a("phi2")?, a("phi3")?, a("varphi1")?);
            vec![
                t1 - ONE,
                t4 - ONE,
                p1 - t1,
                p2 - t1,
                p3 - t1 - t4 + ONE,
                v1 - p1 - p2 + t1,
            ]
        }
        FamilyId::FTL4 => {
            let q =
                ap.q.ok_or_else(|| Error::Invalid("FTL4 needs a value of Q".into()))?;
            let delta = q + 1.0 / q;
            let (t, v, p) = (a("theta")?, a("varphi")?, a("phi")?);
            vec![
                (t - ONE) / delta,
                (v - ONE) / delta,
                (p - t - v + ONE) / (delta * delta),
            ]
        }
    };
    constrain_values(ap.family, &free, ap.q)
}

/// All distinct points reached from angles in `{0, π}`.
pub fn real_unitary_points(family: FamilyId, q: Option<f64>) -> Result<Vec<ParameterPoint>> {
    let n = family.angle_names().len();
    let mut out: Vec<ParameterPoint> = Vec::new();
    for mask in 0..(1usize << n) {
        // most significant angle first, so the listing follows the angle order
        let angles: Vec<f64> = (0..n)
            .map(|i| {
                if mask >> (n - 1 - i) & 1 == 1 {
                    PI
                } else {
                    0.0
                }
            })
            .collect();
        let mut p = unitary_from_angles(&AnglePoint::new(family, &angles, q)?)?;
        for v in p.values.values_mut() {
            *v = C64::new(clean(v.re), clean(v.im));
        }
        let dup = out.iter().any(|o| {
            o.values
                .iter()
                .all(|(k, v)| (p.values[k] - v).norm() < 1e-9)
        });
        if !dup {
            out.push(p);
        }
    }
    Ok(out)
}

fn clean(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-12 {
        r + 0.0
    } else if x.abs() < 1e-12 {
        0.0
    } else {
        x
    }
}

/// Random constrained point with free parameters in the complex box
/// `[-1,1]²`, resampled while any closure denominator is below 0.1 in modulus.
pub fn random_point<R: Rng + ?Sized>(
    family: FamilyId,
    rng: &mut R,
    q: Option<f64>,
) -> Result<ParameterPoint> {
    let n = family.free_params().len();
    for _ in 0..10_000 {
        let free: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        if well_conditioned(family, &free) {
            return constrain_values(family, &free, q);
        }
    }
    Err(Error::Numerical(format!(
        "no well-conditioned random point for {family}"
    )))
}

fn well_conditioned(family: FamilyId, f: &[C64]) -> bool {
    let dens: Vec<C64> = match family {
        FamilyId::F3P => vec![ONE + f[0] + f[2]],
        FamilyId::F42 => vec![
            ONE + f[0] + f[2],
            ONE + f[0] + f[4],
            ONE + f[0] + f[2] + f[4] + f[5],
        ],
        FamilyId::F43 => vec![
            ONE + f[0] + f[2],
            ONE + f[0] + f[3],
            ONE + f[0] + f[2] + f[3] + f[5],
        ],
        _ => vec![],
    };
    dens.iter().all(|d| d.norm() > 0.1)
}

pub fn random_angles<R: Rng + ?Sized>(family: FamilyId, rng: &mut R, q: Option<f64>) -> AnglePoint {
    let angles: Vec<f64> = family
        .angle_names()
        .iter()
        .map(|_| rng.random_range(0.0..2.0 * PI))
        .collect();
    AnglePoint::new(family, &angles, q).expect("angle count matches")
}

/// Parameters of `R^n = s^{n mod 2} (1 + T_n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerPoint {
    pub n: u32,
    pub swap_parity: u32,
    pub point: ParameterPoint,
}

pub fn power_params(point: &ParameterPoint, n: u32) -> Result<PowerPoint> {
    if n == 0 {
        return Err(Error::Invalid("power must be positive".into()));
    }
    if !point.family.has_power_recursion() {
        return Err(Error::UnsupportedFamily {
            family: point.family.to_string(),
            what: "power recursion".into(),
        });
    }
    let one = &point.values;
    let mut cur = one.clone();
    for _ in 1..n {
        cur = power_step(point.family, one, &cur);
    }
    Ok(PowerPoint {
        n,
        swap_parity: n % 2,
        point: ParameterPoint {
            values: cur,
            ..point.clone()
        },
    })
}

fn power_step(
    family: FamilyId,
    one: &BTreeMap<String, C64>,
    prev: &BTreeMap<String, C64>,
) -> BTreeMap<String, C64> {
    let o = |n: &str| one.get(n).copied().unwrap_or(ZERO);
    let p = |n: &str| prev.get(n).copied().unwrap_or(ZERO);
    let mut out: BTreeMap<String, C64> = BTreeMap::new();
    let mut put = |n: &str, v: C64| {
        out.insert(n.to_string(), v);
    };
    match family {
        FamilyId::F2P => {
            let (a, b, g) = (o("alpha"), o("beta"), o("gamma"));
            let (pa, pb, pg) = (p("alpha"), p("beta"), p("gamma"));
            put("alpha", a + pb + a * pb);
            put("beta", pa + b + pa * b);
            put(
                "gamma",
                a * pa + b * pb + g * pg + g * (ONE + pa + pb) + pg * (ONE + a + b),
            );
        }
        FamilyId::F2Pair => {
            let (a, pa) = (o("alpha"), p("alpha"));
            put("alpha", a + pa + 2.0 * a * pa);
        }
        FamilyId::F3P => {
            let (a1, a3, b1, b2, b3, g) = (
                o("alpha1"),
                o("alpha3"),
                o("beta1"),
                o("beta2"),
                o("beta3"),
                o("gamma"),
            );
            let (pa1, pa3, pb1, pb2, pb3, pg) = (
                p("alpha1"),
                p("alpha3"),
                p("beta1"),
                p("beta2"),
                p("beta3"),
                p("gamma"),
            );
            put("alpha1", a1 + pa3 + a1 * pa3);
            put("alpha2", ZERO);
            put("alpha3", pa1 + a3 + pa1 * a3);
            put("beta1", b1 + pb2 + b1 * pb2 + a1 * pb2 + pa3 * b1);
            put("beta2", pb1 + b2 + pb1 * b2 + a3 * pb1 + pa1 * b2);
            put(
                "beta3",
                b3 + pb3 + b3 * pb3 + b3 * (pa1 + pa3) + pb3 * (a1 + a3) + pa1 * a1 + pa3 * a3,
            );
            put(
                "gamma",
                g + pg
                    + g * pg
                    + g * (pa1 + pa3 + pb1 + pb2 + pb3)
                    + pg * (a1 + a3 + b1 + b2 + b3)
                    + pb1 * (b1 + b3)
                    + pb2 * (b2 + b3)
                    + pb3 * (b1 + b2)
                    + pa1 * b1
                    + pa3 * b2
                    + a1 * pb1
                    + a3 * pb2,
            );
        }
        FamilyId::F3Pair => {
            let (a, b, g, d) = (o("alpha"), o("beta"), o("gamma"), o("delta"));
            let (pa, pb, pg, pd) = (p("alpha"), p("beta"), p("gamma"), p("delta"));
            put("alpha", a + pb + 2.0 * a * pb);
            put("beta", pa + b + 2.0 * pa * b);
            put("delta", d + pd + 2.0 * d * pd);
            put(
                "gamma",
                g + pg
                    + 4.0 * g * pg
                    + 2.0 * d * pg
                    + 2.0 * g * pd
                    + pd * (a + b)
                    + d * (pa + pb)
                    + 2.0 * pg * (a + b)
                    + 2.0 * g * (pa + pb)
                    + a * pa
                    + b * pb,
            );
        }
        _ => unreachable!("guarded by has_power_recursion"),
    }
    out
}

/// Rebuild `R^n` from recursion parameters.
pub fn build_power(pp: &PowerPoint) -> Result<DenseOperator> {
    let side = if pp.swap_parity == 1 {
        SwapSide::Left
    } else {
        SwapSide::Omit
    };
    represent(
        &assemble(pp.point.family, &pp.point.values, side)?,
        &pp.point.rep_context()?,
    )
}

/// The general ansatz `s_{1,1+l} (1 + Σ_S c_S Π_{k∈S} p_k)` over site sets
/// that meet site 1 or site `1+l`, in the X-form qubit representation.
#[derive(Clone, Debug, Serialize)]
pub struct GeneralAnsatz {
    pub signature: Signature,
    /// 0-based site sets, ordered by size then lexicographically.
    pub terms: Vec<Vec<usize>>,
}

pub fn general_ansatz(d: usize, m: usize, l: usize) -> Result<GeneralAnsatz> {
    if d != 2 {
        return Err(Error::Invalid(format!(
            "only qubits (d=2) are supported, got d={d}"
        )));
    }
    if l == 0 || l >= m {
        return Err(Error::Invalid(format!("need 0 < l < m, got m={m} l={l}")));
    }
    if 2 * l < m {
        return Err(Error::FarCommutativity { m, l });
    }
    if m > 7 {
        return Err(Error::Capacity {
            requested: 1 << (m + l),
            cap: crate::tensor::DEFAULT_CAP,
        });
    }
    let mut terms: Vec<Vec<usize>> = (1usize..1 << m)
        .filter(|mask| mask & 1 == 1 || mask >> l & 1 == 1)
        .map(|mask| (0..m).filter(|b| mask >> b & 1 == 1).collect())
        .collect();
    terms.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(GeneralAnsatz {
        signature: Signature { d, m, l },
        terms,
    })
}

impl GeneralAnsatz {
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Human name of term `t`, e.g. `p1p3` with 1-based sites.
    pub fn term_name(&self, t: usize) -> String {
        self.terms[t]
            .iter()
            .map(|s| format!("p{}", s + 1))
            .collect()
    }

    /// Family parameter names when the ansatz coincides with a registered
    /// family's term set.
    pub fn family_names(&self) -> Option<(FamilyId, Vec<&'static str>)> {
        let Signature { m, l, .. } = self.signature;
        let name = |t: &[usize]| -> Option<&'static str> {
            Some(match (m, l, t) {
                (2, 1, [0]) => "alpha",
                (2, 1, [1]) => "beta",
                (2, 1, [0, 1]) => "gamma",
                (3, 2, [0]) => "alpha1",
                (3, 2, [2]) => "alpha3",
                (3, 2, [0, 1]) => "beta1",
                (3, 2, [1, 2]) => "beta2",
                (3, 2, [0, 2]) => "beta3",
                (3, 2, [0, 1, 2]) => "gamma",
                _ => return None,
            })
        };
        let fam = match (m, l) {
            (2, 1) => FamilyId::F2P,
            (3, 2) => FamilyId::F3P,
            _ => return None,
        };
        self.terms
            .iter()
            .map(|t| name(t))
            .collect::<Option<Vec<_>>>()
            .map(|v| (fam, v))
    }

    fn word_tokens(&self, t: usize) -> Vec<GeneratorToken> {
        let l = self.signature.l;
        long_swap(1, 1 + l)
            .into_iter()
            .chain(self.terms[t].iter().map(|&s| P(s + 1)))
            .collect()
    }

    pub fn word(&self, coeffs: &[C64]) -> Result<GeneratorWord> {
        if coeffs.len() != self.term_count() {
            return Err(Error::Invalid(format!(
                "{} coefficients for {} terms",
                coeffs.len(),
                self.term_count()
            )));
        }
        let mut w = GeneratorWord::monomial(long_swap(1, 1 + self.signature.l));
        for (t, &c) in coeffs.iter().enumerate() {
            w.terms.push((c, self.word_tokens(t)));
        }
        Ok(w)
    }

    pub fn build(&self, coeffs: &[C64]) -> Result<DenseOperator> {
        represent(&self.word(coeffs)?, &RepContext::qubit_x(self.signature.m))
    }

    fn basis(&self) -> Result<(DenseOperator, Vec<DenseOperator>)> {
        let ctx = RepContext::qubit_x(self.signature.m);
        let swap = represent(
            &GeneratorWord::monomial(long_swap(1, 1 + self.signature.l)),
            &ctx,
        )?;
        let gens = (0..self.term_count())
            .map(|t| represent(&GeneratorWord::monomial(self.word_tokens(t)), &ctx))
            .collect::<Result<Vec<_>>>()?;
        Ok((swap, gens))
    }

    /// Family point carrying the solved coefficients, for closure checks.
    pub fn to_family_point(&self, coeffs: &[C64]) -> Option<ParameterPoint> {
        let (family, names) = self.family_names()?;
        let mut values: BTreeMap<String, C64> = names
            .iter()
            .map(|n| n.to_string())
            .zip(coeffs.iter().copied())
            .collect();
        if family == FamilyId::F3P {
            values.insert("alpha2".into(), ZERO);
        }
        Some(ParameterPoint {
            family,
            values,
            q: None,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveOptions {
    pub starts: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Starts are uniform in the complex box `[-w, w]²`.
    pub box_half_width: f64,
    pub mu0: f64,
    pub keep_tol: f64,
    pub dedup_tol: f64,
    pub min_sigma_ratio: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            starts: 64,
            seed: crate::DEFAULT_SEED,
            max_iter: 200,
            box_half_width: 2.0,
            mu0: 1e-3,
            keep_tol: 1e-10,
            dedup_tol: 1e-6,
            min_sigma_ratio: 1e-8,
        }
    }
}

/// Outcome of one descent run.
#[derive(Clone, Debug, Serialize)]
pub struct SolveAttempt {
    pub start: usize,
    #[serde(serialize_with = "ser_c64s")]
    pub coefficients: Vec<C64>,
    /// Relative gYBE residual at the final iterate.
    pub residual: f64,
    pub iterations: usize,
    /// `σ_min / σ_max` of the final R.
    pub sigma_ratio: f64,
}

fn ser_c64s<S: serde::Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

struct LmProblem {
    swap: DenseOperator,
    gens: Vec<DenseOperator>,
    gens_a: Vec<DenseOperator>,
    gens_b: Vec<DenseOperator>,
    eye_l: DenseOperator,
}

struct Eval {
    r: DenseOperator,
    a: DenseOperator,
    b: DenseOperator,
    ab: DenseOperator,
    ba: DenseOperator,
    f: Vec<C64>,
    cost: f64,
    lhs_norm: f64,
}

impl LmProblem {
    fn new(ans: &GeneralAnsatz) -> Result<Self> {
        let (swap, gens) = ans.basis()?;
        let eye_l = DenseOperator::identity(1 << ans.signature.l);
        let gens_a = gens
            .iter()
            .map(|g| kron(g, &eye_l))
            .collect::<Result<Vec<_>>>()?;
        let gens_b = gens
            .iter()
            .map(|g| kron(&eye_l, g))
            .collect::<Result<Vec<_>>>()?;
        Ok(LmProblem {
            swap,
            gens,
            gens_a,
            gens_b,
            eye_l,
        })
    }

    fn eval(&self, x: &[C64]) -> Result<Eval> {
        let mut r = self.swap.clone();
        for (c, g) in x.iter().zip(&self.gens) {
            r.axpy(*c, g)?;
        }
        let a = kron(&r, &self.eye_l)?;
        let b = kron(&self.eye_l, &r)?;
        let ab = a.try_mul(&b)?;
        let ba = b.try_mul(&a)?;
        let lhs = ab.try_mul(&a)?;
        let rhs = ba.try_mul(&b)?;
        let f: Vec<C64> = lhs
            .data()
            .iter()
            .zip(rhs.data())
            .map(|(l, r)| l - r)
            .collect();
        let cost = f.iter().map(|z| z.norm_sqr()).sum();
        Ok(Eval {
            r,
            a,
            b,
            ab,
            ba,
            f,
            cost,
            lhs_norm: lhs.frobenius_norm(),
        })
    }

    fn jacobian(&self, e: &Eval) -> Result<DMatrix<C64>> {
        let rows = e.f.len();
        let mut j = DMatrix::<C64>::zeros(rows, self.gens.len());
        for (t, (da, db)) in self.gens_a.iter().zip(&self.gens_b).enumerate() {
            let mut col = da.try_mul(&e.ba)?;
            col.axpy(ONE, &e.a.try_mul(db)?.try_mul(&e.a)?)?;
            col.axpy(ONE, &e.ab.try_mul(da)?)?;
            col.axpy(-ONE, &db.try_mul(&e.ab)?)?;
            col.axpy(-ONE, &e.b.try_mul(da)?.try_mul(&e.b)?)?;
            col.axpy(-ONE, &e.ba.try_mul(db)?)?;
            for (i, z) in col.data().iter().enumerate() {
                j[(i, t)] = *z;
            }
        }
        Ok(j)
    }

    fn run(&self, start: usize, x0: Vec<C64>, opts: &SolveOptions) -> Result<SolveAttempt> {
        let mut x = x0;
        let mut cur = self.eval(&x)?;
        let mut mu = opts.mu0;
        let mut iterations = 0;
        'outer: for it in 0..opts.max_iter {
            iterations = it + 1;
            if cur.cost.sqrt() / cur.lhs_norm.max(1.0) < 1e-13 {
                break;
            }
            let j = self.jacobian(&cur)?;
            let jh = j.adjoint();
            let h = &jh * &j;
            let g = &jh * DVector::from_column_slice(&cur.f);
            loop {
                let mut damped = h.clone();
                for i in 0..damped.nrows() {
                    damped[(i, i)] += C64::new(mu * h[(i, i)].re + 1e-12, 0.0);
                }
                let step = damped.lu().solve(&(-&g));
                let accepted = match step {
                    Some(dx) => {
                        let trial: Vec<C64> = x.iter().zip(dx.iter()).map(|(a, b)| a + b).collect();
                        let e = self.eval(&trial)?;
                        if e.cost < cur.cost {
                            x = trial;
                            cur = e;
                            true
                        } else {
                            false
                        }
                    }
                    None => false,
                };
                if accepted {
                    mu = (mu / 3.0).max(1e-12);
                    break;
                }
                mu *= 4.0;
                if mu > 1e8 {
                    break 'outer;
                }
            }
        }
        let sv = cur.r.singular_values();
        let sigma_ratio = match (sv.first(), sv.last()) {
            (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
            _ => 0.0,
        };
        Ok(SolveAttempt {
            start,
            coefficients: x,
            residual: cur.cost.sqrt() / cur.lhs_norm.max(1.0),
            iterations,
            sigma_ratio,
        })
    }
}

/// Seeded random starts, drawn sequentially so every execution mode sees
/// the same sequence.
pub fn random_starts(ans: &GeneralAnsatz, opts: &SolveOptions) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let w = opts.box_half_width;
    (0..opts.starts)
        .map(|_| {
            (0..ans.term_count())
                .map(|_| C64::new(rng.random_range(-w..w), rng.random_range(-w..w)))
                .collect()
        })
        .collect()
}

/// Run the descent from each given start and return every attempt.
pub fn solve_from(
    ans: &GeneralAnsatz,
    starts: &[Vec<C64>],
    opts: &SolveOptions,
    exec: Exec,
) -> Result<Vec<SolveAttempt>> {
    let problem = LmProblem::new(ans)?;
    if let Some(bad) = starts.iter().find(|s| s.len() != ans.term_count()) {
        return Err(Error::Invalid(format!(
            "start has {} coefficients, ansatz has {}",
            bad.len(),
            ans.term_count()
        )));
    }
    let indexed: Vec<(usize, &Vec<C64>)> = starts.iter().enumerate().collect();
    par::map(exec, &indexed, |(i, s)| problem.run(*i, (*s).clone(), opts))
        .into_iter()
        .collect()
}

/// Keep converged, invertible attempts that pass an independent gYBE check,
/// dropping duplicates.
pub fn filter_solutions(
    ans: &GeneralAnsatz,
    attempts: Vec<SolveAttempt>,
    opts: &SolveOptions,
) -> Result<Vec<SolveAttempt>> {
    let Signature { d, m, l } = ans.signature;
    let mut kept: Vec<SolveAttempt> = Vec::new();
    for a in attempts {
        let bad = |x: f64| x.is_nan();
        if bad(a.residual)
            || a.residual >= opts.keep_tol
            || bad(a.sigma_ratio)
            || a.sigma_ratio <= opts.min_sigma_ratio
        {
            continue;
        }
        let dup = kept.iter().any(|k| {
            k.coefficients
                .iter()
                .zip(&a.coefficients)
                .all(|(x, y)| (x - y).norm() < opts.dedup_tol)
        });
        if dup {
            continue;
        }
        if check_gybe(&ans.build(&a.coefficients)?, d, m, l, opts.keep_tol)?.pass {
            kept.push(a);
        }
    }
    Ok(kept)
}

pub fn solve_numeric_with(
    ans: &GeneralAnsatz,
    opts: &SolveOptions,
    exec: Exec,
) -> Result<Vec<SolveAttempt>> {
    let starts = random_starts(ans, opts);
    let attempts = solve_from(ans, &starts, opts, exec)?;
    filter_solutions(ans, attempts, opts)
}

pub fn solve_numeric(ans: &GeneralAnsatz, starts: usize, seed: u64) -> Result<Vec<SolveAttempt>> {
    let opts = SolveOptions {
        starts,
        seed,
        ..SolveOptions::default()
    };
    solve_numeric_with(ans, &opts, Exec::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::approx_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn registry() {
        let fams = list_families();
        assert_eq!(fams.len(), 7);
        let sig = |id| fams.iter().find(|f| f.id == id).unwrap().signature;
        assert_eq!(sig(FamilyId::F3P), Signature { d: 2, m: 3, l: 2 });
        assert_eq!(sig(FamilyId::FTL4), Signature { d: 2, m: 4, l: 2 });
        assert_eq!(sig(FamilyId::F43), Signature { d: 2, m: 4, l: 3 });
        for f in &fams {
            assert!(2 * f.signature.l >= f.signature.m);
            assert_eq!(f.id.to_string().parse::<FamilyId>().unwrap(), f.id);
        }
        assert!("f99".parse::<FamilyId>().is_err());
    }

    #[test]
    fn f3p_closure_example() {
        let p = constrain_real(FamilyId::F3P, &[-2.0, -2.0, 2.0, 2.0], None).unwrap();
        assert_eq!(p.get("alpha2").unwrap(), ZERO);
        assert_eq!(p.get("beta2").unwrap(), c(2.0));
        assert_eq!(p.get("gamma").unwrap(), c(-4.0));
        let err = constrain_real(FamilyId::F3P, &[-2.0, 0.0, 1.0, 0.0], None).unwrap_err();
        assert!(matches!(err, Error::SingularConstraint { ref expr } if expr == "1+alpha1+beta1"));
    }

    #[test]
    fn f3pair_gamma() {
        let p = constrain_real(FamilyId::F3Pair, &[-1.0, -1.0, 0.0], None).unwrap();
        assert_eq!(p.get("gamma").unwrap(), c(1.0));
    }

    #[test]
    fn build_refuses_unconstrained() {
        let mut p = constrain_real(FamilyId::F3P, &[-2.0, -2.0, 2.0, 2.0], None).unwrap();
        p.values.insert("beta2".into(), c(1.0));
        assert!(matches!(build(&p), Err(Error::Unconstrained { .. })));
        assert!(build_unchecked(&p).is_ok());
    }

    #[test]
    fn f2p_matrix_form() {
        let (a, b, g) = (C64::new(0.3, 0.1), C64::new(-0.2, 0.5), C64::new(0.7, -0.4));
        let r = build(&constrain_values(FamilyId::F2P, &[a, b, g], None).unwrap()).unwrap();
        let expect = DenseOperator::from_rows(&[
            vec![ONE + a + b + g, ZERO, ZERO, ZERO],
            vec![ZERO, ZERO, ONE + b, ZERO],
            vec![ZERO, ONE + a, ZERO, ZERO],
            vec![ZERO, ZERO, ZERO, ONE],
        ])
        .unwrap();
        assert!(r.max_abs_diff(&expect) < 1e-15);
        let t1r2 = build(&constrain_real(FamilyId::F2P, &[0.0, 0.0, -2.0], None).unwrap()).unwrap();
        let rows = DenseOperator::from_real_rows(&[
            vec![-1., 0., 0., 0.],
            vec![0., 0., 1., 0.],
            vec![0., 1., 0., 0.],
            vec![0., 0., 0., 1.],
        ])
        .unwrap();
        assert_eq!(t1r2.data(), rows.data());
    }

    #[test]
    fn closed_inverses() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for fam in [
            FamilyId::F2P,
            FamilyId::F2Pair,
            FamilyId::F3P,
            FamilyId::F3Pair,
        ] {
            for _ in 0..10 {
                let p = random_point(fam, &mut rng, None).unwrap();
                let r = build(&p).unwrap();
                let inv = closed_inverse(&p).unwrap();
                let prod = &r * &inv;
                assert!(
                    prod.max_abs_diff(&DenseOperator::identity(r.dim())) < 1e-10,
                    "{p}"
                );
            }
        }
        let swap =
            closed_inverse(&constrain_real(FamilyId::F2P, &[0.0; 3], None).unwrap()).unwrap();
        assert_eq!(swap.data(), crate::rep::swap_op(1, 2, 2, 2).unwrap().data());
        let p = constrain_real(FamilyId::F3Pair, &[-1.0, -1.0, -1.0], None).unwrap();
        assert!(
            approx_eq(&closed_inverse(&p).unwrap(), &build(&p).unwrap(), 1e-14)
                .unwrap()
                .pass
        );
        let p = constrain_real(FamilyId::F42, &[-2.0, -2.0, 0.0, 2.0, 0.0, 0.0], None).unwrap();
        assert!(matches!(
            closed_inverse(&p),
            Err(Error::UnsupportedFamily { .. })
        ));
    }

    #[test]
    fn angle_examples() {
        let p =
            unitary_from_angles(&AnglePoint::new(FamilyId::F2P, &[PI, 0.0, 0.0], None).unwrap())
                .unwrap();
        for (n, v) in [("alpha", -2.0), ("beta", 0.0), ("gamma", 2.0)] {
            assert!((p.get(n).unwrap() - c(v)).norm() < 1e-15);
        }
        let d = 2.5;
        for (phi, g) in [(0.0, 4.0), (PI, 2.0)] {
            let p = unitary_from_angles(
                &AnglePoint::new(FamilyId::FTL4, &[PI, PI, phi], Some(2.0)).unwrap(),
            )
            .unwrap();
            for (n, v) in [
                ("alpha", -2.0 / d),
                ("beta", -2.0 / d),
                ("gamma", g / (d * d)),
            ] {
                assert!((p.get(n).unwrap() - c(v)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn real_point_counts() {
        for fam in FamilyId::ALL {
            let pts = real_unitary_points(fam, Some(2.0)).unwrap();
            assert_eq!(pts.len(), fam.real_unitary_count(), "{fam}");
        }
        let pts = real_unitary_points(FamilyId::F2Pair, None).unwrap();
        let alphas: Vec<C64> = pts.iter().map(|p| p.get("alpha").unwrap()).collect();
        assert_eq!(alphas, vec![c(0.0), c(-1.0)]);
    }

    #[test]
    fn f2pair_square() {
        let p = constrain_real(FamilyId::F2Pair, &[1.0], None).unwrap();
        let pp = power_params(&p, 2).unwrap();
        assert_eq!(pp.point.get("alpha").unwrap(), c(4.0));
        assert_eq!(pp.swap_parity, 0);
        let r = build(&p).unwrap();
        assert!(
            approx_eq(&build_power(&pp).unwrap(), &(&r * &r), 1e-12)
                .unwrap()
                .pass
        );
        let once = power_params(&p, 1).unwrap();
        assert_eq!(once.point, p);
    }

    #[test]
    fn general_ansatz_shapes() {
        assert_eq!(general_ansatz(2, 2, 1).unwrap().term_count(), 3);
        let a = general_ansatz(2, 3, 2).unwrap();
        assert_eq!(a.term_count(), 6);
        assert!(!a.terms.contains(&vec![1]));
        assert_eq!(a.family_names().unwrap().0, FamilyId::F3P);
        assert_eq!(general_ansatz(2, 4, 2).unwrap().term_count() + 1, 13);
        assert_eq!(general_ansatz(2, 4, 3).unwrap().term_count(), 12);
        assert!(matches!(
            general_ansatz(2, 5, 2),
            Err(Error::FarCommutativity { m: 5, l: 2 })
        ));
        assert!(general_ansatz(2, 3, 3).is_err());
    }

    #[test]
    fn general_ansatz_matches_f3p() {
        let a = general_ansatz(2, 3, 2).unwrap();
        let p = constrain_values(
            FamilyId::F3P,
            &[
                C64::new(0.2, 0.1),
                C64::new(-0.3, 0.4),
                C64::new(0.5, 0.0),
                C64::new(0.1, -0.6),
            ],
            None,
        )
        .unwrap();
        let (_, names) = a.family_names().unwrap();
        let coeffs: Vec<C64> = names.iter().map(|n| p.get(n).unwrap()).collect();
        assert!(
            approx_eq(&a.build(&coeffs).unwrap(), &build(&p).unwrap(), 1e-14)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn solver_from_perturbed_f42_point() {
        let ans = general_ansatz(2, 4, 2).unwrap();
        let p = constrain_real(FamilyId::F42, &[-2.0, -2.0, 0.0, 2.0, 0.0, 0.0], None).unwrap();
        let find = |t: &[usize]| -> C64 {
            let names: Vec<String> = t.iter().map(|s| format!("p{}", s + 1)).collect();
            let key = names.concat();
            let fam_terms = FamilyId::F42.terms();
            fam_terms
                .iter()
                .find(|(_, toks)| toks.iter().map(|t| t.to_string()).collect::<String>() == key)
                .map(|(n, _)| p.get(n).unwrap())
                .unwrap_or(ZERO)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let start: Vec<C64> = ans
            .terms
            .iter()
            .map(|t| {
                find(t) + C64::new(rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05))
            })
            .collect();
        let opts = SolveOptions::default();
        let att = solve_from(&ans, &[start], &opts, Exec::Sequential).unwrap();
        assert!(att[0].residual < 1e-10, "{}", att[0].residual);
    }
}
