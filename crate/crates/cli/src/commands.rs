use std::collections::BTreeMap;
use std::fmt::Write as _;

use mzf_core::model::{
    build_constraints_s, build_constraints_s_i, build_constraints_s_ij, build_constraints_t_i, domain_kind,
    format_complex, in_domain_w, w_inequalities, ComplexArgs, Constraint, ConstraintSystem, Shape, VarId,
};
use mzf_core::poset::{count_lattice_points, count_weak_orders, decompose_to_mzv, ExponentMap};
use mzf_core::series::{
    eval_mordell_tornheim, eval_mzf, eval_theorem_residual, eval_zeta_c, eval_zeta_c_i, eval_zeta_tilde,
    eval_zeta_tilde_harmonic, DomainPolicy, EvalReport, TheoremPoint, TheoremResidual, TildeVariant, TruncationPlan,
};
use mzf_core::Error;
use serde_json::json;

use crate::cli::{DecomposeArgs, DomainArgs, EvalArgs, Format, Kind, Path, SetKind, Variant};
use crate::{Failure, Settings};

fn parse_args(shape: Option<&str>, s: &str) -> Result<ComplexArgs, Error> {
    match shape {
        Some(sh) => ComplexArgs::parse_with_shape(sh.parse()?, s),
        None => ComplexArgs::parse(s),
    }
}

fn plan(args: &EvalArgs, settings: &Settings) -> Result<TruncationPlan, Error> {
    let plan = match (&args.n, &args.n_list) {
        (Some(n), None) => TruncationPlan::new(*n)?,
        (None, Some(list)) => TruncationPlan::with_refinements(list.clone())?,
        _ => return Err(Error::Parse("one of --N or --N-list is required".into())),
    };
    if plan.cutoff() > settings.max_n {
        return Err(Error::Budget(format!(
            "cutoff {} exceeds --max-n {}",
            plan.cutoff(),
            settings.max_n
        )));
    }
    Ok(plan)
}

fn need(v: Option<usize>, flag: &str) -> Result<usize, Error> {
    v.ok_or_else(|| Error::Parse(format!("{flag} is required here")))
}

enum Evaluated {
    Report(EvalReport),
    Theorem(TheoremResidual),
}

pub fn eval(args: &EvalArgs, settings: &Settings) -> Result<String, Failure> {
    let plan = plan(args, settings)?;
    let policy = if args.allow_outside {
        DomainPolicy::Warn
    } else {
        DomainPolicy::Strict
    };
    let s = parse_args(args.shape.as_deref(), &args.s)?;
    let out = match args.kind {
        Kind::Mzf => Evaluated::Report(eval_mzf(s.values(), &plan, policy)?),
        Kind::ZetaTilde => {
            let (i, j) = (need(args.i, "--i")?, need(args.j, "--j")?);
            let v = match args.variant {
                Variant::First => TildeVariant::First,
                Variant::Second => TildeVariant::Second,
                Variant::Diff => TildeVariant::Diff,
            };
            Evaluated::Report(match args.path {
                Path::Direct => eval_zeta_tilde(&s, i, j, v, &plan, policy)?,
                Path::Harmonic => eval_zeta_tilde_harmonic(&s, i, j, v, &plan, policy)?,
            })
        }
        Kind::ZetaC => Evaluated::Report(match args.i {
            Some(i) => eval_zeta_c_i(&s, i, &plan, policy)?,
            None => eval_zeta_c(&s, &plan, policy)?,
        }),
        Kind::Mt => {
            let v = s.values();
            if v.len() != 3 {
                return Err(Error::Parse(format!("mt takes three arguments s1,s2,s3, got {}", v.len())).into());
            }
            Evaluated::Report(eval_mordell_tornheim(v[0], v[1], v[2], &plan)?)
        }
        Kind::Theorem => Evaluated::Theorem(eval_theorem_residual(&s, &plan, policy)?),
    };
    let warnings = match &out {
        Evaluated::Report(r) => &r.warnings,
        Evaluated::Theorem(t) => &t.warnings,
    };
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(match (&out, settings.format) {
        (Evaluated::Report(r), Format::Json) => pretty(&with_kind(r.to_json(), args.kind)),
        (Evaluated::Theorem(t), Format::Json) => pretty(&with_kind(t.to_json(), args.kind)),
        (Evaluated::Report(r), Format::Csv) => report_csv(r),
        (Evaluated::Theorem(t), Format::Csv) => theorem_csv(t),
        (Evaluated::Report(r), Format::Text) => report_text(r),
        (Evaluated::Theorem(t), Format::Text) => theorem_text(t),
    })
}

fn with_kind(mut v: serde_json::Value, kind: Kind) -> serde_json::Value {
    let name = clap::ValueEnum::to_possible_value(&kind).expect("kinds are not skipped");
    v["kind"] = json!(name.get_name());
    v
}

pub fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn report_csv(r: &EvalReport) -> String {
    let mut out = String::from("N,re,im\n");
    let rows = if r.refinements.is_empty() {
        vec![(r.cutoff, r.value)]
    } else {
        r.refinements.clone()
    };
    for (n, v) in rows {
        writeln!(out, "{n},{},{}", v.re, v.im).unwrap();
    }
    out
}

fn report_text(r: &EvalReport) -> String {
    let mut out = String::new();
    writeln!(out, "value    {}", format_complex(&r.value)).unwrap();
    writeln!(out, "cutoff   {}", r.cutoff).unwrap();
    if r.residual.is_finite() {
        writeln!(out, "residual {:e}  (|v(N) - v(N/2)|)", r.residual).unwrap();
    }
    if !r.refinements.is_empty() {
        writeln!(out, "refinements").unwrap();
        for (n, v) in &r.refinements {
            writeln!(out, "  N={n:<10} {}", format_complex(v)).unwrap();
        }
    }
    out
}

fn theorem_points(t: &TheoremResidual) -> Vec<(u64, TheoremPoint)> {
    if t.refinements.is_empty() {
        vec![(
            t.cutoff,
            TheoremPoint {
                cutoff: t.cutoff,
                lhs: t.lhs,
                rhs: t.rhs,
                residual: t.residual,
            },
        )]
    } else {
        t.refinements.iter().map(|p| (p.cutoff, *p)).collect()
    }
}

fn theorem_csv(t: &TheoremResidual) -> String {
    let mut out = String::from("N,lhs_re,lhs_im,rhs_re,rhs_im,residual\n");
    for (n, p) in theorem_points(t) {
        writeln!(out, "{n},{},{},{},{},{}", p.lhs.re, p.lhs.im, p.rhs.re, p.rhs.im, p.residual).unwrap();
    }
    out
}

fn theorem_text(t: &TheoremResidual) -> String {
    let mut out = String::new();
    writeln!(out, "{:<10} {:<44} {:<44} residual", "N", "lhs", "rhs").unwrap();
    for (n, p) in theorem_points(t) {
        writeln!(
            out,
            "{n:<10} {:<44} {:<44} {:e}",
            format_complex(&p.lhs),
            format_complex(&p.rhs),
            p.residual
        )
        .unwrap();
    }
    out
}

pub fn domain(args: &DomainArgs, settings: &Settings) -> Result<String, Failure> {
    let s = parse_args(args.shape.as_deref(), &args.s)?;
    let ineqs = w_inequalities(&s);
    let inside = in_domain_w(&s);
    Ok(match settings.format {
        Format::Json => {
            let list: Vec<serde_json::Value> = ineqs
                .iter()
                .map(|q| {
                    json!({
                        "lhs": q.lhs,
                        "value": q.value,
                        "threshold": q.threshold,
                        "strict": q.strict,
                        "holds": q.holds,
                        "margin": q.margin(),
                    })
                })
                .collect();
            pretty(&json!({
                "inside": inside,
                "kind": domain_kind(&s),
                "shape": s.shape().depths(),
                "inequalities": list,
            }))
        }
        Format::Csv => {
            let mut out = String::from("lhs,value,threshold,strict,holds,margin\n");
            for q in &ineqs {
                writeln!(
                    out,
                    "\"{}\",{},{},{},{},{}",
                    q.lhs,
                    q.value,
                    q.threshold,
                    q.strict,
                    q.holds,
                    q.margin()
                )
                .unwrap();
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            if inside {
                writeln!(out, "inside W").unwrap();
            } else {
                for q in ineqs.iter().filter(|q| !q.holds) {
                    writeln!(out, "outside W: {q}").unwrap();
                }
            }
            for q in &ineqs {
                writeln!(out, "  {q}  (margin {})", q.margin()).unwrap();
            }
            out
        }
    })
}

fn parse_exponents(text: &str) -> Result<ExponentMap, Error> {
    let mut out = BTreeMap::new();
    for tok in text.split_whitespace() {
        let (v, e) = tok
            .rsplit_once(':')
            .ok_or_else(|| Error::Parse(format!("bad exponent {tok:?} (expected variable:integer)")))?;
        let v: VarId = v.parse()?;
        let e: u32 = e
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent value in {tok:?}")))?;
        if out.insert(v, e).is_some() {
            return Err(Error::Parse(format!("exponent for {v} given twice")));
        }
    }
    Ok(out)
}

fn build_system(args: &DecomposeArgs) -> Result<ConstraintSystem, Error> {
    let shape: Shape = args.shape.parse()?;
    match args.set {
        SetKind::S => Ok(build_constraints_s(&shape)),
        SetKind::SI => build_constraints_s_i(&shape, need(args.i, "--i")?),
        SetKind::SIj => build_constraints_s_ij(&shape, need(args.i, "--i")?, need(args.j, "--j")?),
        SetKind::TI => build_constraints_t_i(&shape, need(args.i, "--i")?),
        SetKind::Custom => {
            let text = args.constraints.as_deref().unwrap_or("");
            let cons: Vec<Constraint> = text
                .split(';')
                .filter(|t| !t.trim().is_empty())
                .map(str::parse)
                .collect::<Result<_, _>>()?;
            ConstraintSystem::new(shape, args.extra, cons)
        }
    }
}

pub fn decompose(args: &DecomposeArgs, settings: &Settings) -> Result<String, Failure> {
    let cs = build_system(args)?;
    let orders = count_weak_orders(&cs);
    if args.count {
        let n = args
            .n
            .ok_or_else(|| Error::Parse("--count needs --N".into()))?;
        let count = count_lattice_points(&cs, n)?;
        return Ok(match settings.format {
            Format::Json => pretty(&json!({
                "system": cs.to_string(),
                "N": n,
                "lattice_points": count.to_string(),
                "weak_orders": orders,
            })),
            Format::Csv => format!("N,lattice_points,weak_orders\n{n},{count},{orders}\n"),
            Format::Text => format!("{count}\nweak orders: {orders}\n"),
        });
    }
    let text = args
        .exponents
        .as_deref()
        .ok_or_else(|| Error::Parse("--exponents is required unless --count is given".into()))?;
    let exps = parse_exponents(text)?;
    for v in cs.variables() {
        if !exps.contains_key(&v) {
            return Err(Error::Parse(format!("no exponent given for {v}")).into());
        }
    }
    if let Some(v) = exps.keys().find(|v| cs.index_of(**v).is_none()) {
        return Err(Error::Parse(format!("{v} is not a variable of {cs}")).into());
    }
    let combo = decompose_to_mzv(&cs, &exps)?;
    Ok(match settings.format {
        Format::Json => pretty(&json!({
            "system": cs.to_string(),
            "combination": combo.to_json(),
            "text": combo.to_string(),
            "weak_orders": orders,
        })),
        Format::Csv => {
            let mut out = String::from("composition,coefficient\n");
            for (c, k) in combo.iter() {
                writeln!(out, "\"{c}\",{k}").unwrap();
            }
            out
        }
        Format::Text => format!("{combo}\nweak orders: {orders}\n"),
    })
}
