use std::path::Path;

use anyhow::{anyhow, bail, Context};
use serde_json::{json, Value};

use hoalg::acceptance;
use hoalg::convolution::{counterexample_run, show_poly};
use hoalg::deformation::{
    algebra_from_json, cochain_to_json, fuzzed_bilinear, hoch_differential, infinitesimal_deformation_check, is_mc_associative,
    random_cochain, trivial_deformation, Cochain,
};
use hoalg::dupont::verify_contraction;
use hoalg::freelie::{lawrence_sullivan, FreeAlg};
use hoalg::graded::{GMap, GradedSpace, Vector};
use hoalg::htt::{homology_contraction, transfer_slinfty};
use hoalg::lin::Lin;
use hoalg::linfty::{free_nilpotent_lie, is_mc, lie_coords, SLInf, SLInfty};
use hoalg::mcspace::{
    build_mc1, build_mcinf1, cell_to_json, level1_fixture, path_from_json, path_to_json, rect_report, show_lin, Level,
};
use hoalg::scalar::q;
use hoalg::solvers::fixtures::OdeFixture;
use hoalg::solvers::{ode_residual, solve_fixed_point, solve_fixed_point_by_weight, solve_ode_recursive, solve_ode_trees};

use crate::formats::{contraction_from_json, contraction_to_json, read_json, vector_json, vector_list_json, OpTables};
use crate::{Common, DeformCheck, Model, Report};

fn show_vector(space: &GradedSpace, v: &Vector) -> String {
    show_lin(v, |k| space.id(k.idx).to_string())
}

fn pass_line(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

pub fn bch(c: &Common) -> anyhow::Result<Report> {
    let cap = c.cap_or(3);
    let gens = [("λ", 0), ("μ", 0)];
    let alg = FreeAlg::new(&gens, cap)?;
    let z = alg.bch(&alg.gen(0), &alg.gen(1))?;
    let g = free_nilpotent_lie(&gens, cap)?;
    let coords = lie_coords(&g, &alg, &z).ok_or_else(|| anyhow!("BCH series is not a Lie element"))?;
    let lie = show_vector(&g.space, &coords);
    let primitive = alg.is_primitive(&z);
    Ok(Report {
        json: json!({
            "cap": cap,
            "lie": lie,
            "commutators": vector_json(&g.space, &coords),
            "tensor": alg.to_json(&z),
            "primitive": primitive,
        }),
        text: format!("BCH(λ, μ) = {lie}"),
        pass: primitive,
    })
}

pub fn ls_algebra(c: &Common) -> anyhow::Result<Report> {
    let cap = c.cap_or(4);
    let (alg, d) = lawrence_sullivan(cap)?;
    let names: Vec<String> = alg.gens.iter().map(|g| g.name.clone()).collect();
    let images: Vec<(String, String)> =
        names.iter().enumerate().map(|(i, n)| (n.clone(), alg.show(&d.apply(&alg, &alg.gen(i))))).collect();
    let square = d.squares_to_zero(&alg);
    let gauge = alg.gauge_closed_form(&alg.gen(2), &alg.gen(0), &d, &q(1))? == alg.gen(1);
    let text = images.iter().map(|(n, img)| format!("d{n} = {img}")).collect::<Vec<_>>().join("\n");
    Ok(Report {
        json: json!({
            "cap": cap,
            "generators": alg.gens.iter().map(|g| json!({"name": g.name, "degree": g.degree})).collect::<Vec<_>>(),
            "differential": images.iter().map(|(n, img)| json!({"generator": n, "image": img})).collect::<Vec<_>>(),
            "d_squared_zero": square,
            "gauge_x0_to_x1": gauge,
        }),
        text: format!("{text}\nd² = 0: {square}\nexp(λ)·x0 = x1: {gauge}"),
        pass: square && gauge,
    })
}

fn flow_report(space: &GradedSpace, alg: &SLInfty, gauge: &Vector, start: &Vector) -> anyhow::Result<Report> {
    let start_mc = is_mc(alg, start);
    if !start_mc {
        bail!("start is not a Maurer–Cartan element");
    }
    let end = hoalg::linfty::gauge_flow(alg, gauge, start)?;
    let end_mc = is_mc(alg, &end);
    Ok(Report {
        json: json!({
            "gauge": vector_json(space, gauge),
            "start": vector_json(space, start),
            "end": vector_json(space, &end),
            "end_is_mc": end_mc,
        }),
        text: format!("{} ↦ {}", show_vector(space, start), show_vector(space, &end)),
        pass: end_mc,
    })
}

pub fn gauge_flow(c: &Common, input: Option<&Path>) -> anyhow::Result<Report> {
    match input {
        Some(path) => {
            let v = read_json(path)?;
            let (space, alg) = SLInfty::from_json(&v["algebra"])?;
            let gauge = hoalg::mcspace::vector_from_json(&space, &v["gauge"])?;
            let start = hoalg::mcspace::vector_from_json(&space, &v["start"])?;
            flow_report(&space, &alg, &gauge, &start)
        }
        None => {
            let fx = level1_fixture(c.seed)?;
            let mut r = flow_report(&fx.space, &fx.g, &fx.lambda, &fx.x0)?;
            r.json["algebra"] = fx.g.to_json(&fx.space);
            Ok(r)
        }
    }
}

fn differential(space: &GradedSpace, alg: &SLInfty) -> anyhow::Result<GMap> {
    Ok(GMap::new(space.clone(), space.clone(), -1, space.syms().map(|s| alg.differential(&s)).collect())?)
}

pub fn transfer(c: &Common, input: &Path, contraction: Option<&Path>) -> anyhow::Result<Report> {
    let arity = c.arity_cap_or(3);
    let (space, alg) = SLInfty::from_json(&read_json(input)?)?;
    let (small, ctr) = match contraction {
        Some(path) => contraction_from_json(&space, |s| alg.differential(s), &read_json(path)?)?,
        None => homology_contraction(&space, &differential(&space, &alg)?)?,
    };
    let verified = ctr.verify(|k| alg.differential(k), &alg.basis);
    if let Some(v) = &verified.violation {
        bail!("not a contraction: {v}");
    }
    let t = transfer_slinfty(&alg, &ctr, arity)?;
    let result = t.tabulate();
    let rel = result.check(arity);
    Ok(Report {
        json: json!({
            "arity_cap": arity,
            "contraction": contraction_to_json(&space, &small, &ctr),
            "transferred": result.to_json(&small),
            "relations_checked": rel.checked,
            "violation": rel.violation,
        }),
        text: format!("transferred onto {} basis elements; relations {}", small.dim(), pass_line(rel.ok())),
        pass: rel.ok(),
    })
}

pub fn dupont_verify(c: &Common, n: usize) -> anyhow::Result<Report> {
    let cap = c.degree_cap_or(4);
    let r = verify_contraction(n, cap as u32);
    Ok(Report {
        json: json!({"n": n, "degree_cap": cap, "checked": r.checked, "failures": r.failures}),
        text: format!("Δ^{n}, degree ≤ {cap}: {} identities, {}", r.checked, pass_line(r.ok())),
        pass: r.ok(),
    })
}

pub fn counterexample() -> anyhow::Result<Report> {
    let (first, second) = counterexample_run()?;
    let (first, second) = (show_poly(&first), show_poly(&second));
    let pass = first == "-x^3" && second == "0";
    Ok(Report {
        json: json!({"first": first, "second": second, "pass": pass}),
        text: format!("first = {first}, second = {second}: {}", pass_line(pass)),
        pass,
    })
}

pub fn rectify(c: &Common, level: usize, files: Option<(&Path, &Path)>) -> anyhow::Result<Report> {
    if level != 1 {
        bail!("rectification is available at level 1");
    }
    let (space, g, path) = match files {
        Some((algebra, homotopy)) => {
            let (space, g) = SLInfty::from_json(&read_json(algebra)?)?;
            let path = path_from_json(&space, &read_json(homotopy)?)?;
            (space, g, path)
        }
        None => {
            let fx = level1_fixture(c.seed)?;
            (fx.space, fx.g, fx.path)
        }
    };
    if path.level != level {
        bail!("homotopy lives on level {}, expected {level}", path.level);
    }
    let lv = Level::new(&g, level)?;
    let report = rect_report(&lv, &path)?;
    let cell = lv.p_map(&path)?;
    let rect = lv.rect(&path)?;
    Ok(Report {
        json: json!({
            "algebra": g.to_json(&space),
            "homotopy": path_to_json(&space, &path),
            "cell": cell_to_json(&space, &cell),
            "rectified": path_to_json(&space, &rect),
            "checks": {
                "lands_in_mc": report.lands_in_mc,
                "pi_identity": report.pi_identity,
                "gamma": report.gamma,
                "dt_constant": report.dt_constant,
                "endpoints_match": report.endpoints_match,
                "idempotent": report.idempotent,
            },
            "pass": report.ok(),
        }),
        text: format!("rectification {}: {report:?}", pass_line(report.ok())),
        pass: report.ok(),
    })
}

pub fn mc_model(c: &Common, which: Model) -> anyhow::Result<Report> {
    let cap = c.cap_or(3);
    let (lines, checks, pass): (Vec<(String, String)>, Value, bool) = match which {
        Model::Mc1 => {
            let m = build_mc1(cap)?;
            let lines = m.alg.gens.iter().enumerate().map(|(i, g)| (g.name.clone(), m.alg.show(&m.d.apply(&m.alg, &m.alg.gen(i))))).collect();
            (lines, json!({"d_squared_zero": true, "vertices_mc": true}), true)
        }
        Model::Mcinf1 => {
            let m = build_mcinf1(cap as u32)?;
            let lines = (0..m.alg.names.len()).map(|i| (m.alg.names[i].clone(), m.alg.show(&m.alg.images[i]))).collect();
            let checks = json!({
                "tree_sum_agrees": m.tree_sum_agrees,
                "strict_matches_ls": m.strict_matches_ls,
                "d_squared_zero": m.d_squared_zero,
            });
            (lines, checks, m.ok())
        }
    };
    let text = lines.iter().map(|(n, img)| format!("d{n} = {img}")).collect::<Vec<_>>().join("\n");
    Ok(Report {
        json: json!({
            "model": format!("{which:?}").to_lowercase(),
            "cap": cap,
            "differential": lines.iter().map(|(n, img)| json!({"generator": n, "image": img})).collect::<Vec<_>>(),
            "checks": checks,
        }),
        text,
        pass,
    })
}

fn op_tables(c: &Common, input: Option<&Path>) -> anyhow::Result<OpTables> {
    match input {
        Some(path) => OpTables::from_json(&read_json(path)?),
        None => OpTables::from_fixture(&OdeFixture::random(c.seed)),
    }
}

pub fn solve_ode(c: &Common, input: Option<&Path>) -> anyhow::Result<Report> {
    let cap = c.degree_cap_or(6);
    let tables = op_tables(c, input)?;
    let ode = tables.ode(cap);
    let rec = solve_ode_recursive(&ode);
    let trees = solve_ode_trees(&ode);
    let residual_zero = ode_residual(&ode, &rec).iter().all(Lin::is_zero);
    let pass = rec == trees && residual_zero;
    let space = &tables.space;
    let text = rec.iter().enumerate().map(|(m, v)| format!("t^{m}: {}", show_vector(space, v))).collect::<Vec<_>>().join("\n");
    Ok(Report {
        json: json!({
            "input": tables.to_json(),
            "degree_cap": cap,
            "coefficients": vector_list_json(space, &rec),
            "trees_agree": rec == trees,
            "residual_zero": residual_zero,
        }),
        text,
        pass,
    })
}

pub fn solve_fp(c: &Common, input: Option<&Path>) -> anyhow::Result<Report> {
    let tables = op_tables(c, input)?;
    let cap = c.cap_or(tables.space.max_weight() as usize) as u32;
    let eq = tables.fixed_point(cap)?;
    let iterated = solve_fixed_point(&eq)?;
    let by_weight = solve_fixed_point_by_weight(&eq);
    let residual_zero = eq.residual(&iterated).is_zero();
    let pass = iterated == by_weight && residual_zero;
    Ok(Report {
        json: json!({
            "input": tables.to_json(),
            "cap": cap,
            "solution": vector_json(&tables.space, &iterated),
            "schedules_agree": iterated == by_weight,
            "residual_zero": residual_zero,
        }),
        text: format!("x = {}", show_vector(&tables.space, &iterated)),
        pass,
    })
}

pub fn deform(c: &Common, algebra: Option<&Path>, check: DeformCheck) -> anyhow::Result<Report> {
    let (m, f): (Cochain, Option<Cochain>) = match algebra {
        Some(path) => algebra_from_json(&read_json(path)?)?,
        None => {
            let m = fuzzed_bilinear(c.seed, 1).pop().context("empty fixture")?;
            (m, None)
        }
    };
    match check {
        DeformCheck::Mc => {
            let r = is_mc_associative(&m)?;
            Ok(Report {
                json: json!({
                    "m": cochain_to_json(&m),
                    "bracket_vanishes": r.bracket_vanishes,
                    "associative": r.direct,
                    "agree": r.agree(),
                }),
                text: format!("½[m,m] = 0: {}, associative: {}", r.bracket_vanishes, r.direct),
                pass: r.agree(),
            })
        }
        DeformCheck::Cocycle => {
            let f = match f {
                Some(f) => f,
                None if algebra.is_none() => {
                    use rand::SeedableRng;
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(c.seed);
                    trivial_deformation(&m, &random_cochain(&mut rng, m.dim(), 1, 0.6))?
                }
                None => bail!("--check cocycle needs a deformation \"f\" in the algebra file"),
            };
            let closed = infinitesimal_deformation_check(&m, &f)?;
            let df = hoch_differential(&m, &f)?;
            Ok(Report {
                json: json!({"m": cochain_to_json(&m), "f": cochain_to_json(&f), "df": cochain_to_json(&df), "cocycle": closed}),
                text: format!("d f = 0: {closed}"),
                pass: closed,
            })
        }
    }
}

pub fn check_linfty(c: &Common, input: &Path) -> anyhow::Result<Report> {
    let arity = c.arity_cap_or(3);
    let (_, alg) = SLInfty::from_json(&read_json(input)?)?;
    let r = alg.check(arity);
    Ok(Report {
        json: json!({"arity_cap": arity, "checked": r.checked, "violation": r.violation}),
        text: format!("{} relations checked: {}", r.checked, pass_line(r.ok())),
        pass: r.ok(),
    })
}

pub fn acceptance(only: Option<usize>) -> anyhow::Result<Report> {
    let outcomes = match only {
        Some(id) => vec![acceptance::run(id)?],
        None => acceptance::run_all(),
    };
    let pass = outcomes.iter().all(|o| o.pass);
    let json = json!({
        "criteria": outcomes
            .iter()
            .map(|o| json!({"id": o.id, "title": o.title, "pass": o.pass, "detail": o.detail}))
            .collect::<Vec<_>>(),
        "pass": pass,
    });
    let text = outcomes.iter().map(|o| o.line()).collect::<Vec<_>>().join("\n");
    Ok(Report { json, text, pass })
}
