//! Set-partition diagrams of the partition algebra with loop weight one.
//!
//! Nodes are numbered `0..2k`: bottom nodes `B1..Bk` are `0..k` and top nodes
//! `T1..Tk` are `k..2k`, which is also the total order used by the canonical
//! form. Composition `compose(upper, lower)` stacks `upper` on top of `lower`,
//! so a word `a·b·c` is `compose(a, compose(b, c))`: the rightmost factor sits
//! at the bottom, as for operators acting on a column vector.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::C64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SetPartitionDiagram {
    k: usize,
    blocks: Vec<Vec<usize>>,
}

fn canonical_blocks(mut blocks: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for b in &mut blocks {
        b.sort_unstable();
    }
    blocks.sort_by_key(|b| b[0]);
    blocks
}

impl SetPartitionDiagram {
    /// Validates that `blocks` partition the `2k` nodes, then canonicalizes.
    pub fn new(k: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidPartition("k must be positive".into()));
        }
        let mut seen = vec![false; 2 * k];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &x in b {
                if x >= 2 * k {
                    return Err(Error::InvalidPartition(format!(
                        "node {x} out of range for k={k}"
                    )));
                }
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidPartition(format!(
                        "node {} appears twice",
                        node_label(k, x)
                    )));
                }
            }
        }
        if let Some(x) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidPartition(format!(
                "node {} missing",
                node_label(k, x)
            )));
        }
        Ok(SetPartitionDiagram {
            k,
            blocks: canonical_blocks(blocks),
        })
    }

    /// Build from 1-based labels: positive `i` is `Bi`, negative `-i` is `Ti`.
    pub fn from_labels(k: usize, blocks: &[&[i32]]) -> Result<Self> {
        let conv = |x: i32| -> Result<usize> {
            let i = x.unsigned_abs() as usize;
            if i == 0 || i > k {
                return Err(Error::InvalidPartition(format!(
                    "label {x} out of range for k={k}"
                )));
            }
            Ok(if x > 0 { i - 1 } else { k + i - 1 })
        };
        let blocks = blocks
            .iter()
            .map(|b| b.iter().map(|&x| conv(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(k, blocks)
    }

    pub fn identity(k: usize) -> Self {
        SetPartitionDiagram {
            k,
            blocks: (0..k).map(|i| vec![i, k + i]).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Bottom node `Bi`, 1-based.
    pub fn bottom(&self, i: usize) -> usize {
        i - 1
    }

    /// Top node `Ti`, 1-based.
    pub fn top(&self, i: usize) -> usize {
        self.k + i - 1
    }

    /// Canonical form. Constructors already canonicalize, so this is idempotent.
    pub fn canonicalize(&self) -> Self {
        SetPartitionDiagram {
            k: self.k,
            blocks: canonical_blocks(self.blocks.clone()),
        }
    }

    /// Every block joins exactly one bottom and one top node.
    pub fn is_permutation(&self) -> bool {
        self.blocks
            .iter()
            .all(|b| b.len() == 2 && b[0] < self.k && b[1] >= self.k)
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

pub fn node_label(k: usize, x: usize) -> String {
    if x < k {
        format!("B{}", x + 1)
    } else {
        format!("T{}", x - k + 1)
    }
}

impl fmt::Display for SetPartitionDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |off: usize, tag: &str| -> String {
            (0..self.k)
                .map(|i| {
                    let b = self
                        .blocks
                        .iter()
                        .position(|b| b.contains(&(off + i)))
                        .unwrap_or(0);
                    format!("{tag}{}:{}", i + 1, (b'a' + (b % 26) as u8) as char)
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(f, "top    {}", row(self.k, "T"))?;
        writeln!(f, "bottom {}", row(0, "B"))?;
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .enumerate()
            .map(|(n, b)| {
                let names: Vec<String> = b.iter().map(|&x| node_label(self.k, x)).collect();
                format!(
                    "{}={{{}}}",
                    (b'a' + (n % 26) as u8) as char,
                    names.join(",")
                )
            })
            .collect();
        write!(f, "blocks {}", blocks.join(" "))
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Stack `upper` on top of `lower` and trace connectivity.
///
/// Working nodes: `0..k` lower bottom, `k..2k` shared middle, `2k..3k` upper
/// top. Components living only in the middle row are closed loops and are
/// dropped with weight one.
pub fn compose(
    upper: &SetPartitionDiagram,
    lower: &SetPartitionDiagram,
) -> Result<SetPartitionDiagram> {
    if upper.k != lower.k {
        return Err(Error::Dimension(format!(
            "cannot compose k={} with k={}",
            upper.k, lower.k
        )));
    }
    let k = upper.k;
    let mut dsu = Dsu::new(3 * k);
    for b in &lower.blocks {
        for w in b.windows(2) {
            dsu.union(w[0], w[1]);
        }
    }
    for b in &upper.blocks {
        // upper bottom row lands on the middle row, upper top on the new top
        let shifted: Vec<usize> = b.iter().map(|&x| x + k).collect();
        for w in shifted.windows(2) {
            dsu.union(w[0], w[1]);
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for x in (0..k).chain(2 * k..3 * k) {
        let r = dsu.find(x);
        let node = if x < k { x } else { x - k };
        groups.entry(r).or_default().push(node);
    }
    Ok(SetPartitionDiagram {
        k,
        blocks: canonical_blocks(groups.into_values().collect()),
    })
}

/// Abstract generator symbols. Indices are 1-based sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GeneratorToken {
    /// `p_i`
    P(usize),
    /// `p_{i,j}`, `i < j`
    PPair(usize, usize),
    /// `s_i`, the transposition of sites `i` and `i+1`
    S(usize),
    /// Temperley-Lieb `e_i`; has matrices but no set-partition diagram
    E(usize),
}

impl GeneratorToken {
    /// Check index ranges for an algebra on `k` sites. `E(i)` is checked
    /// against the doubled chain of `2k` sites.
    pub fn validate(&self, k: usize) -> Result<()> {
        let ok = match *self {
            GeneratorToken::P(i) => (1..=k).contains(&i),
            GeneratorToken::PPair(i, j) => i >= 1 && i < j && j <= k,
            GeneratorToken::S(i) => i >= 1 && i < k,
            GeneratorToken::E(i) => i >= 1 && i < 2 * k,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange(format!("{self} with k={k}")))
        }
    }
}

impl fmt::Display for GeneratorToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GeneratorToken::P(i) => write!(f, "p{i}"),
            GeneratorToken::PPair(i, j) => write!(f, "p{i},{j}"),
            GeneratorToken::S(i) => write!(f, "s{i}"),
            GeneratorToken::E(i) => write!(f, "e{i}"),
        }
    }
}

/// Linear combination of generator products. An empty factor list is the identity.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GeneratorWord {
    pub terms: Vec<(C64, Vec<GeneratorToken>)>,
}

impl GeneratorWord {
    pub fn identity() -> Self {
        GeneratorWord {
            terms: vec![(C64::new(1.0, 0.0), vec![])],
        }
    }

    pub fn monomial(factors: Vec<GeneratorToken>) -> Self {
        GeneratorWord {
            terms: vec![(C64::new(1.0, 0.0), factors)],
        }
    }

    pub fn term(mut self, coeff: C64, factors: Vec<GeneratorToken>) -> Self {
        self.terms.push((coeff, factors));
        self
    }

    /// Product `self · rhs`, distributing over terms.
    pub fn times(&self, rhs: &GeneratorWord) -> GeneratorWord {
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (a, fa) in &self.terms {
            for (b, fb) in &rhs.terms {
                let mut f = fa.clone();
                f.extend_from_slice(fb);
                terms.push((a * b, f));
            }
        }
        GeneratorWord { terms }
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        for (c, fs) in &self.terms {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::Invalid("non-finite coefficient".into()));
            }
            for t in fs {
                t.validate(k)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, fs)| {
                let body = if fs.is_empty() {
                    "1".to_string()
                } else {
                    fs.iter()
                        .map(|t| t.to_string())
                        .collect::<Vec<_>>()
                        .join("·")
                };
                format!("({})·{}", crate::tensor::fmt_c64(*c), body)
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn generator_diagram(token: GeneratorToken, k: usize) -> Result<SetPartitionDiagram> {
    token.validate(k)?;
    let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(2 * k);
    let pair = |i: usize| vec![i - 1, k + i - 1];
    match token {
        GeneratorToken::P(i) => {
            for j in 1..=k {
                if j == i {
                    blocks.push(vec![j - 1]);
                    blocks.push(vec![k + j - 1]);
                } else {
                    blocks.push(pair(j));
                }
            }
        }
        GeneratorToken::PPair(i, j) => {
            blocks.push(vec![i - 1, j - 1, k + i - 1, k + j - 1]);
            blocks.extend((1..=k).filter(|&x| x != i && x != j).map(pair));
        }
        GeneratorToken::S(i) => {
            blocks.push(vec![i - 1, k + i]);
            blocks.push(vec![i, k + i - 1]);
            blocks.extend((1..=k).filter(|&x| x != i && x != i + 1).map(pair));
        }
        GeneratorToken::E(_) => return Err(Error::UnsupportedToken(token.to_string())),
    }
    SetPartitionDiagram::new(k, blocks)
}

/// Evaluate a product of generators; the rightmost factor is applied first.
pub fn word_diagram(factors: &[GeneratorToken], k: usize) -> Result<SetPartitionDiagram> {
    word_diagram_with(factors, k, compose)
}

pub fn word_diagram_with<F>(
    factors: &[GeneratorToken],
    k: usize,
    compose_fn: F,
) -> Result<SetPartitionDiagram>
where
    F: Fn(&SetPartitionDiagram, &SetPartitionDiagram) -> Result<SetPartitionDiagram>,
{
    factors
        .iter()
        .try_fold(SetPartitionDiagram::identity(k), |acc, &t| {
            compose_fn(&acc, &generator_diagram(t, k)?)
        })
}

/// The conjugating word `s_{j-1}⋯s_{i+1} p_{i,i+1} s_{i+1}⋯s_{j-1}`.
pub fn p_pair_word(i: usize, j: usize) -> Vec<GeneratorToken> {
    let mut w: Vec<GeneratorToken> = (i + 1..j).rev().map(GeneratorToken::S).collect();
    w.push(GeneratorToken::PPair(i, i + 1));
    w.extend((i + 1..j).map(GeneratorToken::S));
    w
}

/// `p_{i,j}` obtained by composing the conjugating word.
pub fn p_pair_general(i: usize, j: usize, k: usize) -> Result<SetPartitionDiagram> {
    if !(i >= 1 && i < j && j <= k) {
        return Err(Error::IndexOutOfRange(format!("p_{{{i},{j}}} with k={k}")));
    }
    word_diagram(&p_pair_word(i, j), k)
}

/// Check every instance of the defining relations on diagrams.
pub fn verify_diagram_relations(k: usize) -> Result<crate::report::VerificationReport> {
    verify_diagram_relations_with(k, compose)
}

/// Same as [`verify_diagram_relations`] with a caller-supplied composition,
/// which lets tests confirm that a broken composition is caught.
pub fn verify_diagram_relations_with<F>(
    k: usize,
    compose_fn: F,
) -> Result<crate::report::VerificationReport>
where
    F: Fn(&SetPartitionDiagram, &SetPartitionDiagram) -> Result<SetPartitionDiagram> + Copy,
{
    use crate::relations::{relation_families, RelationSuite};
    use crate::report::{RelationCheck, VerificationReport};

    if k < 3 {
        return Err(Error::Invalid(format!(
            "relation suite needs k >= 3, got {k}"
        )));
    }
    let mut checks = Vec::new();
    for fam in relation_families(k, RelationSuite::Diagram) {
        let mut failures = 0;
        let mut failed = Vec::new();
        for inst in &fam.instances {
            let l = word_diagram_with(&inst.lhs, k, compose_fn)?;
            let r = word_diagram_with(&inst.rhs, k, compose_fn)?;
            if l != r {
                failures += 1;
                failed.push(inst.label.clone());
            }
        }
        checks.push(RelationCheck {
            id: fam.id.to_string(),
            statement: fam.statement.to_string(),
            expected: fam.expected,
            instances: fam.instances.len(),
            failures,
            max_residual: if failures > 0 { 1.0 } else { 0.0 },
            failed_instances: failed,
        });
    }
    Ok(VerificationReport {
        suite: format!("diagram k={k}"),
        tolerance: 0.0,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use GeneratorToken::*;

    #[test]
    fn identity_is_canonical() {
        let id = SetPartitionDiagram::from_labels(2, &[&[1, -1], &[2, -2]]).unwrap();
        assert_eq!(id, SetPartitionDiagram::identity(2));
        assert_eq!(id.canonicalize(), id);
    }

    #[test]
    fn seven_site_example_has_one_form() {
        let a = SetPartitionDiagram::from_labels(
            7,
            &[
                &[1, 3, 5, -4, -5],
                &[2, -3],
                &[4, 6, 7, -6],
                &[-1, -2],
                &[-7],
            ],
        )
        .unwrap();
        let b = SetPartitionDiagram::from_labels(
            7,
            &[
                &[-7],
                &[-2, -1],
                &[-6, 7, 6, 4],
                &[-3, 2],
                &[-5, 5, -4, 3, 1],
            ],
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.blocks()[0], vec![0, 2, 4, 10, 11]);
        assert_eq!(a.blocks().len(), 5);
    }

    #[test]
    fn malformed_partitions_rejected() {
        assert!(SetPartitionDiagram::from_labels(2, &[&[1, -1], &[1, 2, -2]]).is_err());
        assert!(SetPartitionDiagram::from_labels(2, &[&[1, -1], &[2]]).is_err());
        assert!(SetPartitionDiagram::new(2, vec![vec![0, 1, 2, 3], vec![]]).is_err());
        assert!(compose(
            &SetPartitionDiagram::identity(2),
            &SetPartitionDiagram::identity(3)
        )
        .is_err());
    }

    #[test]
    fn generator_shapes() {
        let p = generator_diagram(P(1), 1).unwrap();
        assert_eq!(p.blocks(), &[vec![0], vec![1]]);
        let s = generator_diagram(S(1), 2).unwrap();
        assert_eq!(
            s,
            SetPartitionDiagram::from_labels(2, &[&[1, -2], &[2, -1]]).unwrap()
        );
        let pp = generator_diagram(PPair(1, 2), 2).unwrap();
        assert_eq!(pp.blocks(), &[vec![0, 1, 2, 3]]);
        assert!(matches!(
            generator_diagram(E(1), 2),
            Err(Error::UnsupportedToken(_))
        ));
        assert!(generator_diagram(S(2), 2).is_err());
    }

    #[test]
    fn small_compositions() {
        let k = 3;
        let pp = generator_diagram(PPair(1, 2), k).unwrap();
        assert_eq!(compose(&pp, &pp).unwrap(), pp);
        let s = generator_diagram(S(2), k).unwrap();
        assert_eq!(compose(&s, &s).unwrap(), SetPartitionDiagram::identity(k));
        let p = generator_diagram(P(2), k).unwrap();
        assert_eq!(word_diagram(&[P(2), PPair(2, 3), P(2)], k).unwrap(), p);
    }

    #[test]
    fn general_pairs() {
        let k = 4;
        let direct = word_diagram(&[S(2), PPair(1, 2), S(2)], k).unwrap();
        assert_eq!(p_pair_general(1, 3, k).unwrap(), direct);
        assert_eq!(word_diagram(&[S(1), PPair(2, 3), S(1)], k).unwrap(), direct);
        assert_eq!(
            p_pair_general(2, 3, k).unwrap(),
            generator_diagram(PPair(2, 3), k).unwrap()
        );
        let p13 = p_pair_general(1, 3, 3).unwrap();
        assert_eq!(compose(&p13, &p13).unwrap(), p13);
        assert!(p_pair_general(3, 3, 4).is_err());
        assert!(p_pair_general(1, 5, 4).is_err());
    }

    #[test]
    fn rendering_lists_blocks() {
        let s = generator_diagram(S(1), 2).unwrap().render();
        assert!(s.contains("blocks a={B1,T2} b={B2,T1}"), "{s}");
    }
}
