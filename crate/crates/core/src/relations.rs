//! The defining relations of the partition algebra, instantiated over every
//! valid index choice. Each suite (diagrams, qubit matrices, Temperley-Lieb
//! matrices) evaluates the same instance lists with its own deformations and
//! expectations.

use crate::diagram::GeneratorToken::{self, PPair, P, S};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RelationSuite {
    Diagram,
    /// Qubit matrices: `p_{i,j}^2 = 2 p_{i,j}`, everything else undeformed.
    Qubit,
    /// Temperley-Lieb matrices with `Δ = Q + 1/Q`: both planar generators
    /// square to `Δ` times themselves, and the non-planar mixed relations
    /// involving `p_{i,i+1}` are not expected to survive.
    TemperleyLieb {
        delta: f64,
    },
}

#[derive(Clone, Debug)]
pub struct RelationInstance {
    pub label: String,
    pub lhs: Vec<GeneratorToken>,
    pub rhs: Vec<GeneratorToken>,
    /// The relation reads `lhs = rhs_scale · rhs`.
    pub rhs_scale: f64,
}

#[derive(Clone, Debug)]
pub struct RelationFamily {
    pub id: &'static str,
    pub statement: &'static str,
    pub expected: Option<bool>,
    pub instances: Vec<RelationInstance>,
}

fn word_label(w: &[GeneratorToken]) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        w.iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join("·")
    }
}

fn inst(lhs: Vec<GeneratorToken>, rhs: Vec<GeneratorToken>, scale: f64) -> RelationInstance {
    let label = if scale == 1.0 {
        format!("{} = {}", word_label(&lhs), word_label(&rhs))
    } else {
        format!("{} = {}·{}", word_label(&lhs), scale, word_label(&rhs))
    };
    RelationInstance {
        label,
        lhs,
        rhs,
        rhs_scale: scale,
    }
}

/// Planar generator with doubled index `h`: odd `h` is `p_{(h+1)/2}`, even
/// `h` is `p_{h/2, h/2+1}`.
fn planar(h: usize) -> GeneratorToken {
    if h % 2 == 1 {
        P(h.div_ceil(2))
    } else {
        PPair(h / 2, h / 2 + 1)
    }
}

pub fn relation_families(k: usize, suite: RelationSuite) -> Vec<RelationFamily> {
    let tl = matches!(suite, RelationSuite::TemperleyLieb { .. });
    let (p_sq, pp_sq) = match suite {
        RelationSuite::Diagram => (1.0, 1.0),
        RelationSuite::Qubit => (1.0, 2.0),
        RelationSuite::TemperleyLieb { delta } => (delta, delta),
    };
    let planar_count = 2 * k - 1;
    let mut out = Vec::new();
    let mut push = |id, statement, expected, instances| {
        out.push(RelationFamily {
            id,
            statement,
            expected,
            instances,
        });
    };

    push(
        "p_idempotent",
        "p_i p_i = p_i",
        Some(true),
        (1..=k)
            .map(|i| inst(vec![P(i), P(i)], vec![P(i)], p_sq))
            .collect(),
    );
    push(
        "ppair_idempotent",
        "p_{i,i+1} p_{i,i+1} = p_{i,i+1}",
        Some(true),
        (1..k)
            .map(|i| inst(vec![PPair(i, i + 1); 2], vec![PPair(i, i + 1)], pp_sq))
            .collect(),
    );
    if suite == RelationSuite::Qubit {
        push(
            "ppair_idempotent_undeformed",
            "p_{i,i+1} p_{i,i+1} = p_{i,i+1} without the factor d",
            Some(false),
            (1..k)
                .map(|i| inst(vec![PPair(i, i + 1); 2], vec![PPair(i, i + 1)], 1.0))
                .collect(),
        );
    }

    let mut sandwich_p = Vec::new();
    let mut sandwich_pp = Vec::new();
    for h in (1..=planar_count).step_by(2) {
        for nb in [h.wrapping_sub(1), h + 1] {
            if (1..=planar_count).contains(&nb) {
                let (p, x) = (planar(h), planar(nb));
                sandwich_p.push(inst(vec![p, x, p], vec![p], 1.0));
                sandwich_pp.push(inst(vec![x, p, x], vec![x], 1.0));
            }
        }
    }
    push(
        "p_ppair_p",
        "p_i p_{i±1/2} p_i = p_i",
        Some(true),
        sandwich_p,
    );
    push(
        "ppair_p_ppair",
        "p_{i±1/2} p_i p_{i±1/2} = p_{i±1/2}",
        Some(true),
        sandwich_pp,
    );

    let mut commute = Vec::new();
    for a in 1..=planar_count {
        for b in a + 2..=planar_count {
            let (x, y) = (planar(a), planar(b));
            commute.push(inst(vec![x, y], vec![y, x], 1.0));
        }
    }
    push(
        "planar_commute",
        "p_a p_b = p_b p_a for |a-b| > 1/2",
        Some(true),
        commute,
    );

    push(
        "s_involution",
        "s_i s_i = 1",
        Some(true),
        (1..k)
            .map(|i| inst(vec![S(i), S(i)], vec![], 1.0))
            .collect(),
    );
    push(
        "s_braid",
        "s_i s_{i+1} s_i = s_{i+1} s_i s_{i+1}",
        Some(true),
        (1..k.saturating_sub(1))
            .map(|i| {
                inst(
                    vec![S(i), S(i + 1), S(i)],
                    vec![S(i + 1), S(i), S(i + 1)],
                    1.0,
                )
            })
            .collect(),
    );
    let mut far = Vec::new();
    for i in 1..k {
        for j in i + 2..k {
            far.push(inst(vec![S(i), S(j)], vec![S(j), S(i)], 1.0));
        }
    }
    push(
        "s_far_commute",
        "s_i s_j = s_j s_i for |i-j| > 1",
        Some(true),
        far,
    );

    let mut absorb = Vec::new();
    for i in 1..k {
        absorb.push(inst(vec![S(i), P(i), P(i + 1)], vec![P(i), P(i + 1)], 1.0));
        absorb.push(inst(vec![P(i), P(i + 1), S(i)], vec![P(i), P(i + 1)], 1.0));
    }
    push(
        "s_absorbs_p_product",
        "s_i p_i p_{i+1} = p_i p_{i+1} s_i = p_i p_{i+1}",
        Some(true),
        absorb,
    );
    push(
        "s_conjugates_p",
        "s_i p_i s_i = p_{i+1}",
        Some(true),
        (1..k)
            .map(|i| inst(vec![S(i), P(i), S(i)], vec![P(i + 1)], 1.0))
            .collect(),
    );
    let mut distant_p = Vec::new();
    for i in 1..k {
        for m in (1..=k).filter(|&m| m != i && m != i + 1) {
            distant_p.push(inst(vec![S(i), P(m)], vec![P(m), S(i)], 1.0));
        }
    }
    push(
        "s_commutes_distant_p",
        "s_i p_m = p_m s_i for m not in {i, i+1}",
        Some(true),
        distant_p,
    );

    // Mixed relations of s with p_{i,i+1}; the doubled-site realization breaks them.
    let (absorb_expect, other_expect) = if tl {
        (Some(false), None)
    } else {
        (Some(true), Some(true))
    };
    let mut absorb_pp = Vec::new();
    for i in 1..k {
        absorb_pp.push(inst(
            vec![S(i), PPair(i, i + 1)],
            vec![PPair(i, i + 1)],
            1.0,
        ));
        absorb_pp.push(inst(
            vec![PPair(i, i + 1), S(i)],
            vec![PPair(i, i + 1)],
            1.0,
        ));
    }
    push(
        "s_absorbs_ppair",
        "s_i p_{i,i+1} = p_{i,i+1} s_i = p_{i,i+1}",
        absorb_expect,
        absorb_pp,
    );
    push(
        "s_conjugates_ppair",
        "s_i s_{i+1} p_{i,i+1} s_{i+1} s_i = p_{i+1,i+2}",
        other_expect,
        (1..k.saturating_sub(1))
            .map(|i| {
                inst(
                    vec![S(i), S(i + 1), PPair(i, i + 1), S(i + 1), S(i)],
                    vec![PPair(i + 1, i + 2)],
                    1.0,
                )
            })
            .collect(),
    );
    let mut distant_pp = Vec::new();
    for i in 1..k {
        for m in (1..k).filter(|&m| m + 1 != i && m != i + 1) {
            distant_pp.push(inst(
                vec![S(i), PPair(m, m + 1)],
                vec![PPair(m, m + 1), S(i)],
                1.0,
            ));
        }
    }
    push(
        "s_commutes_distant_ppair",
        "s_i p_{m,m+1} = p_{m,m+1} s_i for m not in {i-1, i+1}",
        other_expect,
        distant_pp,
    );
    push(
        "s_swaps_ppair",
        "s_{i+1} p_{i,i+1} s_{i+1} = s_i p_{i+1,i+2} s_i",
        other_expect,
        (1..k.saturating_sub(1))
            .map(|i| {
                inst(
                    vec![S(i + 1), PPair(i, i + 1), S(i + 1)],
                    vec![S(i), PPair(i + 1, i + 2), S(i)],
                    1.0,
                )
            })
            .collect(),
    );

    if tl {
        // p_{i,j} with |i-j| > 1 has no doubled-site realization.
        return out;
    }

    let mut defn = Vec::new();
    let mut idem = Vec::new();
    for i in 1..=k {
        for j in i + 2..=k {
            defn.push(inst(
                vec![PPair(i, j)],
                crate::diagram::p_pair_word(i, j),
                1.0,
            ));
            idem.push(inst(vec![PPair(i, j); 2], vec![PPair(i, j)], pp_sq));
        }
    }
    push(
        "pair_conjugation_word",
        "p_{i,j} = s_{j-1}⋯s_{i+1} p_{i,i+1} s_{i+1}⋯s_{j-1}",
        Some(true),
        defn,
    );
    push(
        "pair_idempotent",
        "p_{i,i+j} p_{i,i+j} = p_{i,i+j}",
        Some(true),
        idem,
    );

    let mut chain = Vec::new();
    let mut tri = Vec::new();
    for i in 1..=k {
        for j2 in 2..=k - i {
            for j1 in 1..j2 {
                chain.push(inst(
                    vec![PPair(i, i + j1), PPair(i, i + j2)],
                    vec![PPair(i, i + j1), PPair(i + j1, i + j2)],
                    1.0,
                ));
                let (l, j) = (j1, j2);
                tri.push(inst(
                    vec![PPair(i + l, i + j), PPair(i, i + j)],
                    vec![PPair(i, i + j), PPair(i + l, i + j)],
                    1.0,
                ));
                tri.push(inst(
                    vec![PPair(i, i + j), PPair(i + l, i + j)],
                    vec![PPair(i, i + l), PPair(i + l, i + j)],
                    1.0,
                ));
            }
        }
    }
    push(
        "pair_chain",
        "p_{i,i+j1} p_{i,i+j2} = p_{i,i+j1} p_{i+j1,i+j2} for j1 < j2",
        Some(true),
        chain,
    );
    push(
        "pair_triangle",
        "p_{i+l,i+j} p_{i,i+j} = p_{i,i+j} p_{i+l,i+j} = p_{i,i+l} p_{i+l,i+j} for l < j",
        Some(true),
        tri,
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_counts_k3() {
        let fams = relation_families(3, RelationSuite::Diagram);
        let count = |id: &str| fams.iter().find(|f| f.id == id).unwrap().instances.len();
        assert_eq!(count("p_idempotent"), 3);
        assert_eq!(count("ppair_idempotent"), 2);
        // planar chain p1, p12, p2, p23, p3: each p has one or two neighbours
        assert_eq!(count("p_ppair_p"), 4);
        assert_eq!(count("planar_commute"), 6);
        assert_eq!(count("s_braid"), 1);
        assert_eq!(count("s_far_commute"), 0);
        assert_eq!(count("pair_chain"), 1);
        assert_eq!(count("pair_triangle"), 2);
        assert!(fams.iter().all(|f| f.id != "ppair_idempotent_undeformed"));
    }

    #[test]
    fn tl_suite_drops_long_pairs() {
        let fams = relation_families(3, RelationSuite::TemperleyLieb { delta: 2.5 });
        assert!(fams.iter().all(|f| !f.id.starts_with("pair_")));
        let absorb = fams.iter().find(|f| f.id == "s_absorbs_ppair").unwrap();
        assert_eq!(absorb.expected, Some(false));
        let sq = fams.iter().find(|f| f.id == "p_idempotent").unwrap();
        assert!(sq.instances.iter().all(|i| i.rhs_scale == 2.5));
    }
}
