use braidforge_core::entangle::Coarse4;
use braidforge_core::par::Exec;
use braidforge_core::tables::{load_table, reproduce_table, reproduce_tl_cases, TableId};

fn summarize(id: TableId) -> String {
    let rep = reproduce_table(id, 1e-9, Exec::Sequential).unwrap();
    rep.rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| {
            format!(
                "{id} {}: matrix {:.2e} gybe {:.2e} unitary {} eig {} ({} vs {}) order {:?}/{:?} slocc {}/{:?} out {:?}\n",
                r.label,
                r.matrix_residual,
                r.gybe_residual,
                r.unitary_pass,
                r.eigen_match,
                r.eigenvalues,
                r.expected_eigenvalues,
                r.order,
                r.expected_order,
                r.slocc,
                r.expected_slocc,
                r.output_residual
            )
        })
        .collect()
}

#[test]
fn every_matrix_table_reproduces() {
    let failures: String = TableId::ALL
        .into_iter()
        .filter(|&t| t != TableId::TlCases)
        .map(summarize)
        .collect();
    assert!(failures.is_empty(), "\n{failures}");
}

#[test]
fn three_qubit_tables_have_expected_classes() {
    for (id, class) in [
        (TableId::T2, "GHZ"),
        (TableId::T3, "AC-B"),
        (TableId::T5, "A-B-C"),
    ] {
        let rep = reproduce_table(id, 1e-9, Exec::Parallel).unwrap();
        assert!(rep.rows.iter().all(|r| r.slocc == class), "{id}");
    }
    let t4 = reproduce_table(TableId::T4, 1e-9, Exec::Parallel).unwrap();
    assert_eq!(t4.rows[2].slocc, "GHZ");
    assert_eq!(t4.rows[3].slocc, "GHZ");
}

#[test]
fn printed_prefactor_anomaly_is_reported() {
    let t4 = reproduce_table(TableId::T4, 1e-9, Exec::Sequential).unwrap();
    let row = &t4.rows[0];
    assert!(row.matrix_match);
    assert!(row.printed_residual.unwrap() > 0.1);
    assert!(!t4.anomalies.is_empty());
}

#[test]
fn errata_row_fails_as_printed() {
    let rep = reproduce_table(TableId::F43set, 1e-9, Exec::Sequential).unwrap();
    let fx = load_table(TableId::F43set).unwrap();
    for (row, f) in rep.rows.iter().zip(&fx.rows) {
        if f.errata.is_empty() {
            assert!(row.printed_residual.is_none());
        } else {
            assert!(row.printed_residual.unwrap() > 0.25);
            assert!(row.printed_gybe_residual.unwrap() > 1e-3);
        }
    }
}

#[test]
fn temperley_lieb_cases() {
    for q in [0.5, 2.0] {
        let rep = reproduce_tl_cases(q, 1e-9, Exec::Parallel).unwrap();
        let bad: Vec<_> = rep
            .cases
            .iter()
            .filter(|c| !c.pass)
            .map(|c| {
                format!(
                    "{} order {:?}/{} eig {} {} exp {:?}",
                    c.label,
                    c.order,
                    c.expected_order,
                    c.eigen_match,
                    c.eigenvalues,
                    c.expansion_residual
                )
            })
            .collect();
        assert!(bad.is_empty(), "Q={q}: {bad:#?}");
        for c in &rep.cases {
            match c.label.as_str() {
                "Case I" | "Case VI" => assert!(c.square_residual < 1e-10, "{}", c.label),
                "Case II" | "Case IV" => {
                    assert!(c.square_residual > 1e-3);
                    assert!(c.fourth_power_residual < 1e-10);
                }
                _ => {}
            }
        }
        for s in &rep.swap_identities {
            assert_eq!(s.pass, s.conjugator == "s13 s24", "{s:?}");
        }
        for g in &rep.gabcd {
            assert_eq!(g.pass, !g.chain.contains("displayed"), "{g:?}");
        }
        assert!(rep.pass);
    }
}

#[test]
fn temperley_lieb_entanglement_claims() {
    let rep = reproduce_tl_cases(2.0, 1e-9, Exec::Sequential).unwrap();
    let case = |l: &str| rep.cases.iter().find(|c| c.label == l).unwrap();
    for img in &case("Case II").basis_images {
        assert!(
            matches!(img.coarse, Coarse4::FullyProduct | Coarse4::BellTimesSep),
            "{img:?}"
        );
    }
    assert!(case("Case II")
        .basis_images
        .iter()
        .any(|i| i.coarse == Coarse4::BellTimesSep));
    for img in &case("Case VII").basis_images {
        assert!(
            matches!(
                img.coarse,
                Coarse4::FullyProduct | Coarse4::BellTimesSep | Coarse4::BellTimesBell
            ),
            "{img:?}"
        );
    }
    for input in ["0001", "0010", "1101", "1110"] {
        let img = case("Case IV")
            .basis_images
            .iter()
            .find(|i| i.input == input)
            .unwrap();
        assert_eq!(img.coarse, Coarse4::BellTimesSep, "{input}");
    }
}
