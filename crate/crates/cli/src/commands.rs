use std::collections::BTreeMap;
use std::path::Path;

use braidforge_core::diagram::verify_diagram_relations;
use braidforge_core::entangle::{apply_gate, classify, is_entangling, StateVector, RANK_TOL};
use braidforge_core::families::{
    build, closure_residuals, constrain, general_ansatz, list_families, random_starts,
    real_unitary_points, solve_numeric_with, unitary_from_angles, AnglePoint, FamilyId,
    ParameterPoint, SolveOptions,
};
use braidforge_core::par::Exec;
use braidforge_core::rep::{verify_qubit_relations, verify_tl_relations};
use braidforge_core::tables::{
    compare_ghz, reproduce_table, reproduce_tl_cases, TableId, MATRIX_TOL, ORDER_MAX,
};
use braidforge_core::tensor::fmt_c64;
use braidforge_core::verify::{
    braid_order, canonical_far_shift, check_far_commutativity, check_gybe, check_unitary,
    eigen_multiset,
};
use braidforge_core::{DenseOperator, C64};
use serde_json::{json, Value};

use crate::output::{opt, sci, Outcome};
use crate::{Cli, CliError, Command, RepArg};

type CmdResult = Result<Outcome, CliError>;

const UNITARY_TOL: f64 = 1e-10;
const DEFAULT_TL_Q: f64 = 2.0;
const ENTANGLING_TRIALS: usize = 200;

fn to_value<T: serde::Serialize>(x: &T) -> Result<Value, CliError> {
    serde_json::to_value(x).map_err(|e| CliError::Failed(e.to_string()))
}

pub fn dispatch(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Relations { k, rep } => relations(*k, *rep, cli.q),
        Command::Table { id } => table(*id, cli.tol, cli.q),
        Command::Solve {
            d,
            m,
            l,
            starts,
            max_iter,
        } => solve(*d, *m, *l, *starts, *max_iter, cli),
        Command::CompareGhz { samples } => compare(*samples, cli.seed),
        Command::Classify { matrix, state } => classify_cmd(matrix, state),
        Command::Family { id: None, .. } => family_list(),
        Command::Family {
            id: Some(id),
            params,
            angles,
            real_unitary,
            write_matrix,
        } => {
            if *real_unitary {
                family_real_unitary(*id, cli)
            } else {
                family_point(*id, params, angles.as_deref(), write_matrix.as_deref(), cli)
            }
        }
    }
}

fn relations(k: usize, rep: RepArg, q: Option<f64>) -> CmdResult {
    if k < 3 {
        return Err(CliError::Usage(format!(
            "relation suites need k >= 3, got {k}"
        )));
    }
    let report = match rep {
        RepArg::Diagram => verify_diagram_relations(k)?,
        RepArg::Qubit => verify_qubit_relations(k)?,
        RepArg::Tl => verify_tl_relations(k, q.unwrap_or(1.0))?,
    };
    let pass = report.pattern_ok();
    let text = report
        .checks
        .iter()
        .map(|c| {
            let verdict = match (c.expected, c.holds()) {
                (Some(false), false) => "violated as expected",
                (Some(false), true) => "UNEXPECTEDLY holds",
                (_, true) => "holds",
                (None, false) => "fails (recorded only)",
                (Some(true), false) => "VIOLATED",
            };
            format!(
                "{}: {} ({} instances, {} failures, max residual {})",
                c.id,
                verdict,
                c.instances,
                c.failures,
                sci(c.max_residual)
            )
        })
        .collect();
    let rows = report
        .checks
        .iter()
        .map(|c| {
            vec![
                c.id.clone(),
                opt(&c.expected),
                c.instances.to_string(),
                c.failures.to_string(),
                sci(c.max_residual),
                c.as_expected().to_string(),
            ]
        })
        .collect();
    let mut out = Outcome::new(pass, to_value(&report)?)
        .tolerance("relation", report.tolerance)
        .csv(
            [
                "id",
                "expected",
                "instances",
                "failures",
                "max_residual",
                "as_expected",
            ],
            rows,
        );
    out.text = text;
    Ok(out)
}

fn table(id: TableId, tol: f64, q: Option<f64>) -> CmdResult {
    if id == TableId::TlCases {
        let q = q.unwrap_or(DEFAULT_TL_Q);
        let rep = reproduce_tl_cases(q, tol, Exec::Parallel)?;
        let rows = rep
            .cases
            .iter()
            .map(|c| {
                vec![
                    c.label.clone(),
                    sci(c.gybe_residual),
                    c.unitary_pass.to_string(),
                    opt(&c.order),
                    c.expected_order.to_string(),
                    sci(c.square_residual),
                    sci(c.fourth_power_residual),
                    c.eigen_match.to_string(),
                    c.expansion_residual.map(sci).unwrap_or_default(),
                    c.pass.to_string(),
                ]
            })
            .collect();
        let mut text: Vec<String> = rep
            .cases
            .iter()
            .map(|c| {
                format!(
                    "{}: order {} (expected {}), |R^2-1| {}, |R^4-1| {}, spectrum {}{}",
                    c.label,
                    opt(&c.order),
                    c.expected_order,
                    sci(c.square_residual),
                    sci(c.fourth_power_residual),
                    c.eigenvalues,
                    if c.pass { "" } else { "  FAIL" }
                )
            })
            .collect();
        text.extend(rep.swap_identities.iter().map(|s| {
            format!(
                "{} with W = {}: residual {} ({})",
                s.name,
                s.conjugator,
                sci(s.residual),
                if s.pass { "holds" } else { "fails" }
            )
        }));
        text.extend(rep.gabcd.iter().map(|g| {
            format!(
                "{} chain [{}]: lambda {}, residual {}",
                g.case,
                g.chain,
                fmt_c64(g.lambda),
                sci(g.residual)
            )
        }));
        let mut out = Outcome::new(rep.pass, to_value(&rep)?)
            .tolerance("gybe", tol)
            .tolerance("matrix", MATRIX_TOL)
            .tolerance("Q", q)
            .csv(
                [
                    "case",
                    "gybe_residual",
                    "unitary",
                    "order",
                    "expected_order",
                    "r2_residual",
                    "r4_residual",
                    "eigen_match",
                    "expansion_residual",
                    "pass",
                ],
                rows,
            );
        out.anomalies = rep.anomalies.clone();
        out.text = text;
        return Ok(out);
    }
    let rep = reproduce_table(id, tol, Exec::Parallel)?;
    let rows = rep
        .rows
        .iter()
        .map(|r| {
            vec![
                r.label.clone(),
                sci(r.matrix_residual),
                sci(r.gybe_residual),
                r.unitary_pass.to_string(),
                r.eigen_match.to_string(),
                opt(&r.order),
                opt(&r.expected_order),
                r.slocc.clone(),
                opt(&r.expected_slocc),
                r.output_residual.map(sci).unwrap_or_default(),
                r.pass.to_string(),
            ]
        })
        .collect();
    let text = rep
        .rows
        .iter()
        .map(|r| {
            format!(
                "{} {}: matrix {}, gYBE {}, unitary {}, spectrum {}, order {}, class {}{}",
                r.label,
                r.point,
                sci(r.matrix_residual),
                sci(r.gybe_residual),
                r.unitary_pass,
                r.eigenvalues,
                r.order
                    .map(|o| o.to_string())
                    .unwrap_or_else(|| "none".into()),
                r.slocc,
                if r.pass { "" } else { "  FAIL" }
            )
        })
        .collect();
    let mut out = Outcome::new(rep.pass, to_value(&rep)?)
        .tolerance("gybe", tol)
        .tolerance("matrix", MATRIX_TOL)
        .tolerance("unitary", UNITARY_TOL)
        .csv(
            [
                "row",
                "matrix_residual",
                "gybe_residual",
                "unitary",
                "eigen_match",
                "order",
                "expected_order",
                "slocc",
                "expected_slocc",
                "output_residual",
                "pass",
            ],
            rows,
        );
    out.anomalies = rep.anomalies.clone();
    out.text = text;
    Ok(out)
}

fn solve(d: usize, m: usize, l: usize, starts: usize, max_iter: usize, cli: &Cli) -> CmdResult {
    let ans = general_ansatz(d, m, l)?;
    let opts = SolveOptions {
        starts,
        seed: cli.seed,
        max_iter,
        ..SolveOptions::default()
    };
    let sig = ans.signature;

    // An ansatz whose every point already solves the equation needs no search.
    let probes = random_starts(&ans, &opts);
    let probe_residuals = probes
        .iter()
        .map(|c| Ok(check_gybe(&ans.build(c)?, sig.d, sig.m, sig.l, cli.tol)?.residual))
        .collect::<Result<Vec<f64>, braidforge_core::Error>>()?;
    let everywhere =
        !probe_residuals.is_empty() && probe_residuals.iter().all(|&r| r < opts.keep_tol);

    let trivial = check_gybe(
        &ans.build(&vec![C64::new(0.0, 0.0); ans.term_count()])?,
        sig.d,
        sig.m,
        sig.l,
        cli.tol,
    )?;
    let sols = if everywhere {
        Vec::new()
    } else {
        solve_numeric_with(&ans, &opts, Exec::Parallel)?
    };

    let mut rows = Vec::new();
    let mut solutions = Vec::new();
    for s in &sols {
        let point = ans.to_family_point(&s.coefficients);
        let closure = point
            .as_ref()
            .map(closure_residuals)
            .transpose()?
            .map(|v| v.into_iter().map(|x| x.1).fold(0.0, f64::max));
        rows.push(
            [
                s.start.to_string(),
                sci(s.residual),
                s.iterations.to_string(),
                sci(s.sigma_ratio),
                closure.map(sci).unwrap_or_default(),
            ]
            .into_iter()
            .chain(s.coefficients.iter().map(|z| fmt_c64(*z)))
            .collect(),
        );
        solutions
            .push(json!({ "attempt": s, "family_point": point, "max_closure_residual": closure }));
    }
    let terms: Vec<String> = (0..ans.term_count()).map(|t| ans.term_name(t)).collect();
    let finding = if everywhere {
        format!(
            "residual ≈ 0 everywhere: all {} probes solve the equation",
            probe_residuals.len()
        )
    } else {
        format!("{} distinct solutions from {} starts", sols.len(), starts)
    };
    let pass = everywhere || !sols.is_empty() || trivial.pass;
    let result = json!({
        "signature": sig,
        "terms": terms,
        "finding": finding,
        "residual_everywhere_zero": everywhere,
        "max_probe_residual": probe_residuals.iter().copied().fold(0.0, f64::max),
        "trivial_solution": trivial,
        "options": opts,
        "solutions": solutions,
    });
    let mut text = vec![
        format!("ansatz {sig} with terms {}", terms.join(" ")),
        finding,
    ];
    text.push(format!(
        "permutation solution (all coefficients 0): residual {}",
        sci(trivial.residual)
    ));
    text.extend(sols.iter().map(|s| {
        let cs: Vec<String> = s.coefficients.iter().map(|z| fmt_c64(*z)).collect();
        format!(
            "start {}: residual {} [{}]",
            s.start,
            sci(s.residual),
            cs.join(", ")
        )
    }));
    let header = [
        "start",
        "residual",
        "iterations",
        "sigma_ratio",
        "max_closure_residual",
    ]
    .into_iter()
    .map(String::from)
    .chain(terms.iter().cloned())
    .collect::<Vec<_>>();
    let mut out = Outcome::new(pass, result)
        .tolerance("gybe", cli.tol)
        .tolerance("keep", opts.keep_tol)
        .tolerance("dedup", opts.dedup_tol)
        .csv(header, rows);
    out.text = text;
    Ok(out)
}

fn compare(samples: usize, seed: u64) -> CmdResult {
    let cmp = compare_ghz(samples, seed, Exec::Parallel)?;
    let all = cmp.table_rows.iter().chain(&cmp.sampled);
    let rows = all
        .clone()
        .map(|r| {
            vec![
                r.label.clone(),
                format!("{:?}", r.obstruction.verdict),
                r.obstruction.witness.candidates_tried.to_string(),
            ]
        })
        .collect();
    let mut text = vec![format!(
        "GHZ matrix spectrum {}, unitarity residual {}",
        cmp.ghz_spectrum,
        sci(cmp.ghz_unitary_residual)
    )];
    text.extend(cmp.table_rows.iter().map(|r| {
        format!(
            "{}: spectrum {} -> {:?}",
            r.label, r.obstruction.spec_a, r.obstruction.verdict
        )
    }));
    text.push(format!(
        "{} sampled complex unitary points: {} obstructed",
        cmp.sampled.len(),
        cmp.sampled
            .iter()
            .filter(|r| r.obstruction.verdict == braidforge_core::verify::Verdict::Obstructed)
            .count()
    ));
    let mut out = Outcome::new(cmp.all_obstructed, to_value(&cmp)?)
        .tolerance("spectral", 1e-6)
        .csv(["label", "verdict", "candidates_tried"], rows);
    out.anomalies = cmp.anomalies.clone();
    out.text = text;
    Ok(out)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&raw)
        .map_err(|e| CliError::Usage(format!("malformed {what} in {}: {e}", path.display())))
}

fn classify_cmd(matrix: &Path, state: &str) -> CmdResult {
    let r: DenseOperator = read_json(matrix, "matrix")?;
    let input = if !state.is_empty() && state.chars().all(|c| c == '0' || c == '1') {
        StateVector::basis(state)?
    } else {
        read_json(Path::new(state), "state")?
    };
    if r.dim() != 1 << input.n() {
        return Err(CliError::Usage(format!(
            "matrix has dim {} but the state has {} qubits",
            r.dim(),
            input.n()
        )));
    }
    let output = apply_gate(&r, &input)?;
    let label = classify(&output, RANK_TOL)?;
    let terms: Vec<String> = output
        .terms(1e-12)
        .iter()
        .map(|(b, c)| format!("{}|{b}>", fmt_c64(*c)))
        .collect();
    let result =
        json!({ "input": input, "output": output, "label": label.name(), "witness": label });
    let mut out = Outcome::new(true, result).tolerance("rank", RANK_TOL).csv(
        ["input", "label", "output"],
        vec![vec![state.to_string(), label.name(), terms.join(" + ")]],
    );
    out.text = vec![
        format!("output {}", terms.join(" + ")),
        format!("class {}", label.name()),
    ];
    Ok(out)
}

fn family_list() -> CmdResult {
    let fams = list_families();
    let rows = fams
        .iter()
        .map(|f| {
            vec![
                f.id.to_string(),
                f.signature.to_string(),
                f.free_params.join(" "),
                f.dependent_params.join(" "),
            ]
        })
        .collect();
    let text = fams
        .iter()
        .map(|f| {
            format!(
                "{} {}: free [{}] dependent [{}]",
                f.id,
                f.signature,
                f.free_params.join(", "),
                f.dependent_params.join(", ")
            )
        })
        .collect();
    let mut out = Outcome::new(true, to_value(&fams)?)
        .csv(["family", "signature", "free", "dependent"], rows);
    out.text = text;
    Ok(out)
}

fn parse_param(s: &str) -> Result<(String, C64), CliError> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("expected NAME=VALUE, got '{s}'")))?;
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|e| CliError::Usage(format!("bad number '{x}' in '{s}': {e}")))
    };
    let z = match value.split_once(',') {
        Some((re, im)) => C64::new(num(re)?, num(im)?),
        None => C64::new(num(value)?, 0.0),
    };
    Ok((name.trim().to_string(), z))
}

#[derive(serde::Serialize)]
struct PointCheck {
    point: ParameterPoint,
    closure_residuals: Vec<(String, f64)>,
    gybe: braidforge_core::verify::GybeReport,
    far_commutativity: braidforge_core::verify::FarCommutativityReport,
    unitary: braidforge_core::verify::UnitaryReport,
    eigenvalues: braidforge_core::EigenMultiset,
    order: Option<u32>,
    entangling: bool,
}

fn check_point(point: ParameterPoint, cli: &Cli) -> Result<(PointCheck, DenseOperator), CliError> {
    let r = build(&point)?;
    let sig = point.signature();
    let check = PointCheck {
        closure_residuals: closure_residuals(&point)?,
        gybe: check_gybe(&r, sig.d, sig.m, sig.l, cli.tol)?,
        far_commutativity: check_far_commutativity(
            &r,
            sig.d,
            sig.m,
            canonical_far_shift(sig.l),
            cli.tol,
        )?,
        unitary: check_unitary(&r, UNITARY_TOL),
        eigenvalues: eigen_multiset(&r)?,
        order: braid_order(&r, ORDER_MAX, cli.tol),
        entangling: is_entangling(&r, ENTANGLING_TRIALS, cli.seed)?.entangling,
        point,
    };
    Ok((check, r))
}

fn point_row(c: &PointCheck) -> Vec<String> {
    vec![
        c.point.to_string(),
        sci(c.gybe.residual),
        c.gybe.pass.to_string(),
        sci(c.far_commutativity.residual),
        c.unitary.pass.to_string(),
        c.eigenvalues.to_string(),
        opt(&c.order),
        c.entangling.to_string(),
    ]
}

const POINT_HEADER: [&str; 8] = [
    "point",
    "gybe_residual",
    "gybe_pass",
    "far_residual",
    "unitary",
    "eigenvalues",
    "order",
    "entangling",
];

fn point_text(c: &PointCheck) -> String {
    format!(
        "{}: gYBE {} ({}), unitary {}, spectrum {}, order {}, entangling {}",
        c.point,
        sci(c.gybe.residual),
        if c.gybe.pass { "pass" } else { "fail" },
        c.unitary.pass,
        c.eigenvalues,
        c.order
            .map(|o| o.to_string())
            .unwrap_or_else(|| "none".into()),
        c.entangling
    )
}

fn family_point(
    id: FamilyId,
    params: &[String],
    angles: Option<&[f64]>,
    write_matrix: Option<&Path>,
    cli: &Cli,
) -> CmdResult {
    let point = match angles {
        Some(a) => unitary_from_angles(&AnglePoint::new(id, a, cli.q)?)?,
        None => {
            let free: BTreeMap<String, C64> = params
                .iter()
                .map(|s| parse_param(s))
                .collect::<Result<_, _>>()?;
            constrain(id, &free, cli.q)?
        }
    };
    let (check, r) = check_point(point, cli)?;
    if let Some(path) = write_matrix {
        let json = serde_json::to_string(&r).map_err(|e| CliError::Failed(e.to_string()))?;
        std::fs::write(path, json)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let pass = check.gybe.pass && check.far_commutativity.pass;
    let mut out = Outcome::new(pass, to_value(&check)?)
        .tolerance("gybe", cli.tol)
        .tolerance("unitary", UNITARY_TOL)
        .csv(POINT_HEADER, vec![point_row(&check)]);
    out.text = vec![point_text(&check)];
    Ok(out)
}

fn family_real_unitary(id: FamilyId, cli: &Cli) -> CmdResult {
    let q = if id.needs_q() {
        Some(cli.q.unwrap_or(DEFAULT_TL_Q))
    } else {
        cli.q
    };
    let checks = real_unitary_points(id, q)?
        .into_iter()
        .map(|p| check_point(p, cli).map(|c| c.0))
        .collect::<Result<Vec<_>, _>>()?;
    let pass = checks.iter().all(|c| c.gybe.pass && c.unitary.pass);
    let mut text = vec![format!("{} real unitary points", checks.len())];
    text.extend(checks.iter().map(point_text));
    let mut out = Outcome::new(
        pass,
        json!({ "family": id, "count": checks.len(), "points": to_value(&checks)? }),
    )
    .tolerance("gybe", cli.tol)
    .tolerance("unitary", UNITARY_TOL)
    .csv(POINT_HEADER, checks.iter().map(point_row).collect());
    out.text = text;
    Ok(out)
}
