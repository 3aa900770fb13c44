//! End-to-end acceptance run. Prints one `criterion N: PASS|FAIL` line per
//! criterion and fails if any criterion fails.

use std::time::{Duration, Instant};

use braidforge_core::diagram::verify_diagram_relations;
use braidforge_core::entangle::{
    apply_gate, classify, ghz_chain_first, ghz_chain_second, ghz_decomposition, ghz_target,
    ilo_equivalent, is_entangling, random_ilo_layer, IloChain, StateVector, RANK_TOL,
};
use braidforge_core::families::{
    build, build_power, closure_residuals, general_ansatz, power_params, random_angles,
    random_point, real_unitary_points, unitary_from_angles, AnglePoint, FamilyId,
};
use braidforge_core::par::Exec;
use braidforge_core::rep::{verify_qubit_relations, verify_tl_relations};
use braidforge_core::tables::{
    compare_ghz, load_table, reproduce_table, reproduce_tl_cases, TableId,
};
use braidforge_core::tensor::{mat_power, DenseOperator, ONE};
use braidforge_core::verify::{
    braid_order, check_gybe, check_unitary, dye_template_check, q_conjugate,
};
use braidforge_core::{families::solve_numeric, DEFAULT_SEED};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn tl_q(family: FamilyId) -> Option<f64> {
    family.needs_q().then_some(2.0)
}

fn diagram_relations() -> Outcome {
    let t = Instant::now();
    let rep = verify_diagram_relations(4).map_err(e)?;
    let dt = t.elapsed();
    ensure(
        rep.total_failures() == 0 && rep.total_instances() > 0,
        || format!("{} failures", rep.total_failures()),
    )?;
    ensure(dt < Duration::from_secs(1), || format!("took {dt:?}"))
}

fn qubit_relations() -> Outcome {
    let rep = verify_qubit_relations(3).map_err(e)?;
    ensure(rep.pattern_ok(), || "qubit suite off pattern".into())?;
    let pp = rep
        .check("ppair_idempotent")
        .ok_or("missing deformed idempotence")?;
    ensure(pp.holds(), || "p_{i,i+1}^2 = 2 p_{i,i+1} fails".into())?;
    for q in [0.5, 1.0, 2.0] {
        let tl = verify_tl_relations(3, q).map_err(e)?;
        ensure(tl.pattern_ok(), || format!("TL suite off pattern at Q={q}"))?;
        let absorb = tl
            .check("s_absorbs_ppair")
            .ok_or("missing s_absorbs_ppair")?;
        ensure(!absorb.holds(), || {
            format!("expected failure absent at Q={q}")
        })?;
    }
    Ok(())
}

fn random_gybe() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    for fam in FamilyId::ALL {
        let sig = fam.signature();
        for i in 0..100 {
            let p = random_point(fam, &mut rng, tl_q(fam)).map_err(e)?;
            let r = build(&p).map_err(e)?;
            let t = Instant::now();
            let rep = check_gybe(&r, sig.d, sig.m, sig.l, 1e-9).map_err(e)?;
            let dt = t.elapsed();
            ensure(rep.residual < 1e-9, || {
                format!("{fam} point {i}: residual {:.2e}", rep.residual)
            })?;
            ensure(dt < Duration::from_secs(1), || {
                format!("{fam} point {i}: took {dt:?}")
            })?;
        }
    }
    Ok(())
}

fn table_one() -> Outcome {
    let rep = reproduce_table(TableId::T1, 1e-9, Exec::Parallel).map_err(e)?;
    ensure(rep.rows.len() == 4, || "expected 4 rows".into())?;
    for r in &rep.rows {
        ensure(r.matrix_residual == 0.0, || {
            format!("{}: matrix off by {:.2e}", r.label, r.matrix_residual)
        })?;
        ensure(r.eigen_match, || {
            format!("{}: spectrum {}", r.label, r.eigenvalues)
        })?;
    }
    let orders: Vec<_> = rep.rows.iter().map(|r| r.order).collect();
    ensure(orders == [Some(2), Some(2), Some(4), Some(4)], || {
        format!("orders {orders:?}")
    })
}

fn three_qubit_tables() -> Outcome {
    let expected = [
        (TableId::T2, "GHZ"),
        (TableId::T3, "AC-B"),
        (TableId::T4, ""),
        (TableId::T5, "A-B-C"),
    ];
    let mut count = 0;
    for (id, class) in expected {
        let rep = reproduce_table(id, 1e-9, Exec::Parallel).map_err(e)?;
        for r in &rep.rows {
            count += 1;
            ensure(r.pass, || format!("{id} {} fails reproduction", r.label))?;
            ensure(class.is_empty() || r.slocc == class, || {
                format!("{id} {}: {}", r.label, r.slocc)
            })?;
        }
        if id == TableId::T4 {
            ensure(
                rep.rows[2].slocc == "GHZ" && rep.rows[3].slocc == "GHZ",
                || "t4 rows 3-4 not GHZ".into(),
            )?;
        }
    }
    ensure(count == 12, || format!("{count} rows"))
}

fn four_qubit_tables() -> Outcome {
    let mut count = 0;
    for id in [TableId::F42set, TableId::F43set] {
        let rep = reproduce_table(id, 1e-9, Exec::Parallel).map_err(e)?;
        for r in &rep.rows {
            count += 1;
            ensure(r.matrix_match, || {
                format!("{id} {}: matrix {:.2e}", r.label, r.matrix_residual)
            })?;
            ensure(r.gybe_pass, || {
                format!("{id} {}: gybe {:.2e}", r.label, r.gybe_residual)
            })?;
            ensure(r.output_residual.is_some_and(|d| d <= 1e-12), || {
                format!("{id} {}: output", r.label)
            })?;
            ensure(r.eigen_match, || {
                format!("{id} {}: spectrum {}", r.label, r.eigenvalues)
            })?;
        }
    }
    ensure(count == 8, || format!("{count} matrices"))
}

fn unitary_parameterizations() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED ^ 7);
    for fam in FamilyId::ALL {
        for _ in 0..50 {
            let a = random_angles(fam, &mut rng, tl_q(fam));
            let r = build(&unitary_from_angles(&a).map_err(e)?).map_err(e)?;
            let u = check_unitary(&r, 1e-10);
            ensure(u.pass, || {
                format!("{fam}: unitary residual {:.2e}", u.residual)
            })?;
        }
    }
    let counts: Vec<usize> = FamilyId::ALL
        .into_iter()
        .map(|f| real_unitary_points(f, tl_q(f)).map(|v| v.len()))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    ensure(counts == [8, 2, 16, 8, 64, 64, 8], || {
        format!("counts {counts:?}")
    })
}

fn power_recursions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED ^ 8);
    for fam in [
        FamilyId::F2P,
        FamilyId::F2Pair,
        FamilyId::F3P,
        FamilyId::F3Pair,
    ] {
        for _ in 0..20 {
            let p = random_point(fam, &mut rng, None).map_err(e)?;
            let r = build(&p).map_err(e)?;
            for n in 1..=6 {
                let direct = mat_power(&r, n);
                let rebuilt = build_power(&power_params(&p, n).map_err(e)?).map_err(e)?;
                let rel = direct.try_sub(&rebuilt).map_err(e)?.frobenius_norm()
                    / direct.frobenius_norm().max(1.0);
                ensure(rel < 1e-9, || format!("{fam} n={n}: {rel:.2e}"))?;
            }
        }
    }
    let generic = AnglePoint::new(FamilyId::F2P, &[0.7, 1.9, 2.3], None).map_err(e)?;
    let r = build(&unitary_from_angles(&generic).map_err(e)?).map_err(e)?;
    let order = braid_order(&r, 64, 1e-9);
    ensure(order.is_none(), || {
        format!("generic angles have order {order:?}")
    })
}

fn temperley_lieb() -> Outcome {
    let mut patterns = Vec::new();
    for q in [0.5, 2.0] {
        let rep = reproduce_tl_cases(q, 1e-9, Exec::Parallel).map_err(e)?;
        for c in &rep.cases {
            match c.label.as_str() {
                "Case I" | "Case VI" => ensure(c.square_residual < 1e-10, || {
                    format!("{} R^2 at Q={q}", c.label)
                })?,
                "Case II" | "Case IV" => ensure(
                    c.fourth_power_residual < 1e-10 && c.square_residual > 1e-6,
                    || format!("{} powers at Q={q}", c.label),
                )?,
                _ => {}
            }
            ensure(c.eigen_match, || {
                format!("{} spectrum {} at Q={q}", c.label, c.eigenvalues)
            })?;
            if let Some(x) = c.expansion_residual {
                ensure(x <= 1e-12, || {
                    format!("{} expansion off by {x:.2e} at Q={q}", c.label)
                })?;
            }
        }
        let mults: Vec<Vec<usize>> = rep
            .cases
            .iter()
            .map(|c| c.eigenvalues.clusters.iter().map(|x| x.1).collect())
            .collect();
        patterns.push(mults);
        for s in rep
            .swap_identities
            .iter()
            .filter(|s| s.conjugator == "s13 s24")
        {
            ensure(s.residual <= 1e-12, || {
                format!("{}: {:.2e}", s.name, s.residual)
            })?;
        }
    }
    let sorted = |v: &Vec<Vec<usize>>| -> Vec<Vec<usize>> {
        v.iter()
            .map(|m| {
                let mut m = m.clone();
                m.sort();
                m
            })
            .collect()
    };
    ensure(sorted(&patterns[0]) == sorted(&patterns[1]), || {
        "multiplicities depend on Q".into()
    })
}

fn ilo_chains() -> Outcome {
    let t2 = load_table(TableId::T2).map_err(e)?;
    let ghz = ghz_target(3).map_err(e)?;
    let zero = StateVector::basis("000").map_err(e)?;
    for (i, row) in t2.rows.iter().enumerate() {
        let out =
            apply_gate(&build(&row.point(t2.family).map_err(e)?).map_err(e)?, &zero).map_err(e)?;
        let chain = match i {
            0 => ghz_chain_first(ONE, ONE, ONE, ONE).and_then(|c| c.inverse()),
            3 => ghz_chain_second(ONE, ONE, ONE, ONE).and_then(|c| c.inverse()),
            _ => ghz_decomposition(&out).map(|d| d.to_ghz),
        }
        .map_err(e)?;
        let fit = ilo_equivalent(&out, &chain, &ghz, 1e-9).map_err(e)?;
        ensure(fit.equivalent, || {
            format!("row {}: residual {:.2e}", i + 1, fit.residual)
        })?;
    }
    for q in [0.5, 2.0] {
        let rep = reproduce_tl_cases(q, 1e-9, Exec::Sequential).map_err(e)?;
        for g in rep.gabcd.iter().filter(|g| !g.chain.contains("displayed")) {
            ensure(g.residual < 1e-9, || {
                format!("{} at Q={q}: {:.2e}", g.case, g.residual)
            })?;
        }
    }
    Ok(())
}

fn slocc_invariance() -> Outcome {
    let mut gates = Vec::new();
    for id in [
        TableId::T2,
        TableId::T3,
        TableId::T4,
        TableId::F42set,
        TableId::F43set,
    ] {
        let t = load_table(id).map_err(e)?;
        for row in &t.rows {
            let r = build(&row.point(t.family).map_err(e)?).map_err(e)?;
            if is_entangling(&r, 16, DEFAULT_SEED).map_err(e)?.entangling {
                gates.push(r);
            }
        }
    }
    ensure(!gates.is_empty(), || "no entangling gates".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED ^ 11);
    let mut agree = 0;
    for trial in 0..50 {
        let r = &gates[trial % gates.len()];
        let n = r.dim().trailing_zeros() as usize;
        let input = StateVector::basis_index(n, trial % r.dim()).map_err(e)?;
        let chain = IloChain::single(random_ilo_layer(n, &mut rng)).map_err(e)?;
        let l = chain.operator().map_err(e)?;
        let conj = l
            .try_mul(r)
            .and_then(|x| x.try_mul(&l.inverse()?))
            .map_err(e)?;
        let original = classify(&apply_gate(r, &input).map_err(e)?, RANK_TOL).map_err(e)?;
        let pulled = apply_gate(&conj, &chain.apply(&input).map_err(e)?).map_err(e)?;
        let pulled = chain.inverse().and_then(|c| c.apply(&pulled)).map_err(e)?;
        let mapped = classify(
            &chain.apply(&apply_gate(r, &input).map_err(e)?).map_err(e)?,
            RANK_TOL,
        )
        .map_err(e)?;
        if classify(&pulled, RANK_TOL).map_err(e)?.name() == original.name()
            && mapped.name() == original.name()
        {
            agree += 1;
        }
    }
    ensure(agree == 50, || format!("{agree}/50 trials agree"))
}

fn ghz_inequivalence() -> Outcome {
    let cmp = compare_ghz(32, DEFAULT_SEED, Exec::Parallel).map_err(e)?;
    ensure(cmp.table_rows.len() == 4, || "expected four rows".into())?;
    ensure(cmp.all_obstructed, || {
        "a spectrum maps onto the GHZ spectrum".into()
    })
}

fn numeric_solver() -> Outcome {
    let t = Instant::now();
    let ans = general_ansatz(2, 3, 2).map_err(e)?;
    let sols = solve_numeric(&ans, 64, DEFAULT_SEED).map_err(e)?;
    let dt = t.elapsed();
    ensure(sols.len() >= 5, || format!("{} solutions", sols.len()))?;
    for s in &sols {
        let r = ans.build(&s.coefficients).map_err(e)?;
        let g = check_gybe(&r, 2, 3, 2, 1e-10).map_err(e)?;
        ensure(g.residual < 1e-10, || {
            format!("start {}: residual {:.2e}", s.start, g.residual)
        })?;
        let p = ans
            .to_family_point(&s.coefficients)
            .ok_or("no family mapping")?;
        let worst = closure_residuals(&p)
            .map_err(e)?
            .into_iter()
            .map(|x| x.1)
            .fold(0.0, f64::max);
        ensure(worst < 1e-6, || {
            format!("start {}: closure residual {worst:.2e}", s.start)
        })?;
    }
    ensure(dt < Duration::from_secs(60), || format!("took {dt:?}"))
}

fn two_qubit_classification() -> Outcome {
    for p in real_unitary_points(FamilyId::F2P, None).map_err(e)? {
        let r = build(&p).map_err(e)?;
        let c = dye_template_check(&r, 1e-12).map_err(e)?;
        ensure(c.pass, || {
            format!(
                "F2P {p}: off {:.2e} dev {:.2e}",
                c.off_pattern, c.modulus_deviation
            )
        })?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED ^ 14);
    let mut points = real_unitary_points(FamilyId::F2Pair, None).map_err(e)?;
    for _ in 0..10 {
        points.push(
            unitary_from_angles(&random_angles(FamilyId::F2Pair, &mut rng, None)).map_err(e)?,
        );
    }
    for p in points {
        let r: DenseOperator = q_conjugate(&build(&p).map_err(e)?).map_err(e)?;
        let c = dye_template_check(&r, 1e-12).map_err(e)?;
        ensure(c.pass, || {
            format!(
                "F2Pair {p}: off {:.2e} dev {:.2e}",
                c.off_pattern, c.modulus_deviation
            )
        })?;
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 14] = [
        ("diagram relations", diagram_relations),
        ("qubit and TL relations", qubit_relations),
        ("gYBE at random points", random_gybe),
        ("two-qubit table", table_one),
        ("three-qubit tables", three_qubit_tables),
        ("four-qubit matrices", four_qubit_tables),
        ("unitary parameterizations", unitary_parameterizations),
        ("power recursions", power_recursions),
        ("Temperley-Lieb cases", temperley_lieb),
        ("ILO chains", ilo_chains),
        ("SLOCC invariance", slocc_invariance),
        ("GHZ inequivalence", ghz_inequivalence),
        ("numeric solver", numeric_solver),
        ("two-qubit classification", two_qubit_classification),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let dt = t.elapsed();
        match &outcome {
            Ok(()) => println!("criterion {}: PASS  {name} ({dt:.2?})", i + 1),
            Err(msg) => {
                println!("criterion {}: FAIL  {name} ({dt:.2?}): {msg}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
