//! Matrix representations of generator words: the two qubit forms and the
//! Temperley-Lieb realization on a doubled chain.
//!
//! Basis convention: site 1 is the most significant bit, so `|01⟩` is index 1.

use serde::{Deserialize, Serialize};

use crate::diagram::{GeneratorToken, GeneratorWord};
use crate::error::{Error, Result};
use crate::relations::{relation_families, RelationSuite};
use crate::report::{RelationCheck, VerificationReport};
use crate::tensor::{embed_at, DenseOperator, C64, I, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RepKind {
    /// `p_i = (1+Z_i)/2`, `p_{i,j} = 1 + X_i X_j`
    QubitZ,
    /// `p_i = (1+X_i)/2`, `p_{i,j} = 1 + Z_i Z_j`
    QubitX,
    /// `p_i = e_{2i-1}`, `p_{i,i+1} = e_{2i}`, `s_i = s_{2i-1,2i+1} s_{2i,2i+2}`
    TemperleyLieb,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepContext {
    pub kind: RepKind,
    /// Number of sites of the abstract algebra.
    pub k: usize,
    /// Deformation parameter, used only by the Temperley-Lieb kind.
    pub q: f64,
}

impl RepContext {
    pub fn qubit_z(k: usize) -> Self {
        RepContext {
            kind: RepKind::QubitZ,
            k,
            q: 1.0,
        }
    }

    pub fn qubit_x(k: usize) -> Self {
        RepContext {
            kind: RepKind::QubitX,
            k,
            q: 1.0,
        }
    }

    pub fn temperley_lieb(k: usize, q: f64) -> Result<Self> {
        if q == 0.0 || !q.is_finite() {
            return Err(Error::Invalid(format!(
                "Q must be real and nonzero, got {q}"
            )));
        }
        Ok(RepContext {
            kind: RepKind::TemperleyLieb,
            k,
            q,
        })
    }

    pub fn new(kind: RepKind, k: usize, q: f64) -> Result<Self> {
        match kind {
            RepKind::TemperleyLieb => Self::temperley_lieb(k, q),
            _ => Ok(RepContext { kind, k, q: 1.0 }),
        }
    }

    /// Number of physical qubits the matrices act on.
    pub fn sites(&self) -> usize {
        match self.kind {
            RepKind::TemperleyLieb => 2 * self.k,
            _ => self.k,
        }
    }

    pub fn delta(&self) -> f64 {
        self.q + 1.0 / self.q
    }

    pub fn dim(&self) -> usize {
        1 << self.sites()
    }
}

pub fn pauli_x() -> DenseOperator {
    DenseOperator::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).expect("2x2")
}

pub fn pauli_y() -> DenseOperator {
    DenseOperator::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).expect("2x2")
}

pub fn pauli_z() -> DenseOperator {
    DenseOperator::diagonal(&[ONE, -ONE])
}

pub fn hadamard() -> DenseOperator {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DenseOperator::from_real_rows(&[vec![h, h], vec![h, -h]]).expect("2x2")
}

/// Single-qubit operator on site `i` (1-based) of an `n`-qubit chain.
pub fn on_site(op: &DenseOperator, i: usize, n: usize) -> Result<DenseOperator> {
    embed_at(op, i, n, 2)
}

/// Permutation exchanging tensor factors `i < j` of an `n`-site chain.
pub fn swap_op(i: usize, j: usize, n: usize, d: usize) -> Result<DenseOperator> {
    if !(i >= 1 && i < j && j <= n) || d < 2 {
        return Err(Error::IndexOutOfRange(format!(
            "s_{{{i},{j}}} on {n} sites"
        )));
    }
    let dim = (0..n)
        .try_fold(1usize, |acc, _| acc.checked_mul(d))
        .filter(|&x| x <= crate::tensor::DEFAULT_CAP);
    let dim = dim.ok_or(Error::Capacity {
        requested: usize::MAX,
        cap: crate::tensor::DEFAULT_CAP,
    })?;
    let place = |site: usize| d.pow((n - site) as u32);
    let (wi, wj) = (place(i), place(j));
    let mut op = DenseOperator::zeros(dim);
    for b in 0..dim {
        let (di, dj) = ((b / wi) % d, (b / wj) % d);
        let c = b - di * wi - dj * wj + dj * wi + di * wj;
        op.set(c, b, ONE);
    }
    op.with_meta(d, n)
}

/// Temperley-Lieb generator on qubits `(h, h+1)`; its `(01,10)` block is
/// `[[Q, -1], [-1, 1/Q]]`.
pub fn tl_generator(h: usize, n: usize, q: f64) -> Result<DenseOperator> {
    if h == 0 || h >= n {
        return Err(Error::IndexOutOfRange(format!("e_{h} on {n} sites")));
    }
    let mut e = DenseOperator::zeros(4);
    e.set(1, 1, C64::new(q, 0.0));
    e.set(1, 2, -ONE);
    e.set(2, 1, -ONE);
    e.set(2, 2, C64::new(1.0 / q, 0.0));
    embed_at(&e, h, n, 2)
}

fn projector(pauli: &DenseOperator, i: usize, n: usize) -> Result<DenseOperator> {
    let mut p = on_site(pauli, i, n)?;
    p.axpy(ONE, &DenseOperator::identity(1 << n))?;
    Ok(p.scale(C64::new(0.5, 0.0)))
}

fn pair_term(pauli: &DenseOperator, i: usize, j: usize, n: usize) -> Result<DenseOperator> {
    let mut p = &on_site(pauli, i, n)? * &on_site(pauli, j, n)?;
    p.axpy(ONE, &DenseOperator::identity(1 << n))?;
    Ok(p)
}

/// Matrix of a single generator in the given context.
pub fn token_matrix(token: GeneratorToken, ctx: &RepContext) -> Result<DenseOperator> {
    let n = ctx.sites();
    match ctx.kind {
        RepKind::QubitZ | RepKind::QubitX => {
            token.validate(ctx.k)?;
            let (single, pair) = if ctx.kind == RepKind::QubitZ {
                (pauli_z(), pauli_x())
            } else {
                (pauli_x(), pauli_z())
            };
            match token {
                GeneratorToken::P(i) => projector(&single, i, n),
                GeneratorToken::PPair(i, j) => pair_term(&pair, i, j, n),
                GeneratorToken::S(i) => swap_op(i, i + 1, n, 2),
                GeneratorToken::E(_) => Err(Error::UnsupportedToken(format!(
                    "{token} in a qubit context"
                ))),
            }
        }
        RepKind::TemperleyLieb => {
            token.validate(ctx.k)?;
            match token {
                GeneratorToken::E(h) => tl_generator(h, n, ctx.q),
                GeneratorToken::P(i) => tl_generator(2 * i - 1, n, ctx.q),
                GeneratorToken::PPair(i, j) if j == i + 1 => tl_generator(2 * i, n, ctx.q),
                GeneratorToken::PPair(..) => Err(Error::UnsupportedToken(format!(
                    "{token}: only adjacent pairs have a Temperley-Lieb realization"
                ))),
                GeneratorToken::S(i) => {
                    Ok(&swap_op(2 * i - 1, 2 * i + 1, n, 2)? * &swap_op(2 * i, 2 * i + 2, n, 2)?)
                }
            }
        }
    }
}

pub fn product_matrix(factors: &[GeneratorToken], ctx: &RepContext) -> Result<DenseOperator> {
    let mut acc = DenseOperator::identity(ctx.dim());
    for &t in factors {
        acc = acc.try_mul(&token_matrix(t, ctx)?)?;
    }
    Ok(acc)
}

/// Evaluate a word in any context.
pub fn represent(word: &GeneratorWord, ctx: &RepContext) -> Result<DenseOperator> {
    let mut acc = DenseOperator::zeros(ctx.dim());
    for (c, factors) in &word.terms {
        acc.axpy(*c, &product_matrix(factors, ctx)?)?;
    }
    acc.with_meta(2, ctx.sites())
}

pub fn qubit_rep(word: &GeneratorWord, ctx: &RepContext) -> Result<DenseOperator> {
    if ctx.kind == RepKind::TemperleyLieb {
        return Err(Error::Invalid("qubit_rep needs a qubit context".into()));
    }
    represent(word, ctx)
}

pub fn tl_rep(word: &GeneratorWord, ctx: &RepContext) -> Result<DenseOperator> {
    if ctx.kind != RepKind::TemperleyLieb {
        return Err(Error::Invalid(
            "tl_rep needs a Temperley-Lieb context".into(),
        ));
    }
    represent(word, ctx)
}

/// Tolerance of the matrix relation suites.
pub const RELATION_TOL: f64 = 1e-12;

fn run_suite(
    suite_name: String,
    ctx: &RepContext,
    suite: RelationSuite,
    tol: f64,
) -> Result<VerificationReport> {
    let mut checks = Vec::new();
    for fam in relation_families(ctx.k, suite) {
        let mut failures = 0;
        let mut failed = Vec::new();
        let mut max_res: f64 = 0.0;
        for inst in &fam.instances {
            let l = product_matrix(&inst.lhs, ctx)?;
            let r = product_matrix(&inst.rhs, ctx)?.scale(C64::new(inst.rhs_scale, 0.0));
            let res = l.try_sub(&r)?.frobenius_norm() / l.frobenius_norm().max(1.0);
            max_res = max_res.max(res);
            if res > tol {
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
            max_residual: max_res,
            failed_instances: failed,
        });
    }
    Ok(VerificationReport {
        suite: suite_name,
        tolerance: tol,
        checks,
    })
}

/// Relation suite in a qubit form, with `p_{i,j}^2 = 2 p_{i,j}`.
pub fn verify_qubit_relations_in(k: usize, kind: RepKind) -> Result<VerificationReport> {
    if k < 3 {
        return Err(Error::Invalid(format!(
            "relation suite needs k >= 3, got {k}"
        )));
    }
    if kind == RepKind::TemperleyLieb {
        return Err(Error::Invalid("use verify_tl_relations".into()));
    }
    let ctx = RepContext::new(kind, k, 1.0)?;
    run_suite(
        format!("qubit {kind:?} k={k}"),
        &ctx,
        RelationSuite::Qubit,
        RELATION_TOL,
    )
}

pub fn verify_qubit_relations(k: usize) -> Result<VerificationReport> {
    verify_qubit_relations_in(k, RepKind::QubitZ)
}

/// Relation suite on the doubled chain. The absorption `s_i p_{i,i+1} =
/// p_{i,i+1}` is expected to fail.
pub fn verify_tl_relations(k: usize, q: f64) -> Result<VerificationReport> {
    if k < 3 {
        return Err(Error::Invalid(format!(
            "relation suite needs k >= 3, got {k}"
        )));
    }
    let ctx = RepContext::temperley_lieb(k, q)?;
    run_suite(
        format!("temperley-lieb k={k} Q={q}"),
        &ctx,
        RelationSuite::TemperleyLieb { delta: ctx.delta() },
        RELATION_TOL,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::approx_eq;
    use GeneratorToken::*;

    fn word(t: GeneratorToken) -> GeneratorWord {
        GeneratorWord::monomial(vec![t])
    }

    #[test]
    fn qubit_generators() {
        let p = qubit_rep(&word(P(1)), &RepContext::qubit_z(1)).unwrap();
        assert_eq!(p.data(), DenseOperator::diagonal(&[ONE, ZERO]).data());
        let s = qubit_rep(&word(S(1)), &RepContext::qubit_z(2)).unwrap();
        assert_eq!(s.data(), swap_op(1, 2, 2, 2).unwrap().data());
        assert_eq!(s.get(1, 2), ONE);
        assert_eq!(s.get(0, 0), ONE);
        let pp = qubit_rep(&word(PPair(1, 2)), &RepContext::qubit_z(2)).unwrap();
        let expect = DenseOperator::from_real_rows(&[
            vec![1., 0., 0., 1.],
            vec![0., 1., 1., 0.],
            vec![0., 1., 1., 0.],
            vec![1., 0., 0., 1.],
        ])
        .unwrap();
        assert_eq!(pp.data(), expect.data());
        assert!(qubit_rep(&word(E(1)), &RepContext::qubit_z(2)).is_err());
    }

    #[test]
    fn s_is_the_sum_of_pauli_products() {
        let n = 2;
        let mut s = DenseOperator::identity(4);
        for p in [pauli_x(), pauli_y(), pauli_z()] {
            s.axpy(
                ONE,
                &(&on_site(&p, 1, n).unwrap() * &on_site(&p, 2, n).unwrap()),
            )
            .unwrap();
        }
        let s = s.scale(C64::new(0.5, 0.0));
        assert_eq!(s.data(), swap_op(1, 2, 2, 2).unwrap().data());
    }

    #[test]
    fn tl_generator_at_q1() {
        let e = tl_rep(&word(E(1)), &RepContext::temperley_lieb(1, 1.0).unwrap()).unwrap();
        let expect = DenseOperator::from_real_rows(&[
            vec![0., 0., 0., 0.],
            vec![0., 1., -1., 0.],
            vec![0., -1., 1., 0.],
            vec![0., 0., 0., 0.],
        ])
        .unwrap();
        assert_eq!(e.data(), expect.data());
        let ctx = RepContext::temperley_lieb(2, 2.0).unwrap();
        let e = token_matrix(E(2), &ctx).unwrap();
        let e2 = &e * &e;
        assert!(
            approx_eq(&e2, &e.scale(C64::new(2.5, 0.0)), 1e-14)
                .unwrap()
                .pass
        );
        assert!(RepContext::temperley_lieb(2, 0.0).is_err());
        assert!(token_matrix(PPair(1, 3), &RepContext::temperley_lieb(3, 2.0).unwrap()).is_err());
    }

    #[test]
    fn tl_s_swaps_site_pairs() {
        let ctx = RepContext::temperley_lieb(2, 2.0).unwrap();
        let s = token_matrix(S(1), &ctx).unwrap();
        let expect = &swap_op(1, 3, 4, 2).unwrap() * &swap_op(2, 4, 4, 2).unwrap();
        assert_eq!(s.data(), expect.data());
        // |0111⟩ -> |1101⟩
        assert_eq!(s.get(0b1101, 0b0111), ONE);
    }

    #[test]
    fn long_swaps_are_conjugated_words() {
        let ctx3 = RepContext::qubit_z(3);
        let s13 = swap_op(1, 3, 3, 2).unwrap();
        assert_eq!(
            s13.data(),
            product_matrix(&[S(1), S(2), S(1)], &ctx3).unwrap().data()
        );
        let ctx4 = RepContext::qubit_z(4);
        let s14 = swap_op(1, 4, 4, 2).unwrap();
        assert_eq!(
            s14.data(),
            product_matrix(&[S(3), S(2), S(1), S(2), S(3)], &ctx4)
                .unwrap()
                .data()
        );
        assert!(swap_op(2, 2, 3, 2).is_err());
        assert!(swap_op(1, 4, 3, 2).is_err());
    }

    #[test]
    fn qubit_suite_passes_with_deformed_norm() {
        for kind in [RepKind::QubitZ, RepKind::QubitX] {
            let rep = verify_qubit_relations_in(3, kind).unwrap();
            assert!(rep.pattern_ok(), "{rep:#?}");
            let undeformed = rep.check("ppair_idempotent_undeformed").unwrap();
            assert_eq!(undeformed.failures, undeformed.instances);
            assert!(rep.check("s_conjugates_p").unwrap().holds());
        }
        assert!(verify_qubit_relations(2).is_err());
    }

    #[test]
    fn tl_suite_pattern() {
        for q in [0.5, 1.0, 2.0] {
            let rep = verify_tl_relations(3, q).unwrap();
            assert!(rep.pattern_ok(), "{rep:#?}");
            assert!(!rep.check("s_absorbs_ppair").unwrap().holds());
            assert!(rep.check("p_idempotent").unwrap().holds());
            assert!(rep.check("ppair_idempotent").unwrap().holds());
        }
    }

    #[test]
    fn z_and_x_forms_are_hadamard_conjugate() {
        let k = 3;
        let h = crate::tensor::kron_all(&vec![hadamard(); k]).unwrap();
        let (zc, xc) = (RepContext::qubit_z(k), RepContext::qubit_x(k));
        let mut tokens = vec![];
        for i in 1..=k {
            tokens.push(P(i));
            for j in i + 1..=k {
                tokens.push(PPair(i, j));
            }
        }
        tokens.extend((1..k).map(S));
        for t in tokens {
            let z = token_matrix(t, &zc).unwrap();
            let x = token_matrix(t, &xc).unwrap();
            let conj = &(&h * &z) * &h;
            assert!(approx_eq(&conj, &x, 1e-12).unwrap().pass, "{t}");
        }
    }
}
