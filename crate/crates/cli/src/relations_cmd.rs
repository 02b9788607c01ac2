use std::fmt::Write as _;
use std::fs;

use mzf_core::model::IntArgs;
use mzf_core::relations::{
    enumerate_family, generate, rank_exact, Family, Relation, RelationSet, ALL_RELATIONS_REFERENCE,
};
use mzf_core::Error;
use serde_json::json;

use crate::cache::write_atomic;
use crate::cli::{Format, RankArgs, RelationsArgs, Table1Args};
use crate::commands::pretty;
use crate::{Failure, Settings};

fn cache_key(weight: u32, family: Family, include_d1: bool) -> String {
    format!("relation-set/v1 weight={weight} family={family} include_d1_derivation={include_d1}")
}

fn generate_all(family: Family, args: &[IntArgs], threads: usize) -> Result<Vec<Relation>, Error> {
    if threads <= 1 || args.len() < 2 {
        return args.iter().map(|k| generate(family, k)).collect();
    }
    let chunk = args.len().div_ceil(threads);
    let parts: Vec<Result<Vec<Relation>, Error>> = std::thread::scope(|scope| {
        let handles: Vec<_> = args
            .chunks(chunk)
            .map(|c| scope.spawn(move || c.iter().map(|k| generate(family, k)).collect()))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("relation worker panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(args.len());
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Builds the relation set, reading and filling the cache.
pub fn relation_set(weight: u32, family: Family, include_d1: bool, settings: &Settings) -> Result<RelationSet, Error> {
    if weight > settings.max_weight {
        return Err(Error::Budget(format!(
            "weight {weight} exceeds --max-weight {}",
            settings.max_weight
        )));
    }
    let key = cache_key(weight, family, include_d1);
    if let Some(v) = settings.cache.get(&key) {
        match RelationSet::from_json(&v) {
            Ok(set) if set.weight == weight && set.family == family => return Ok(set),
            _ => eprintln!("warning: cached relation set for {key:?} does not parse; recomputing"),
        }
    }
    let args = enumerate_family(weight, family, include_d1)?;
    if args.len() as u64 > settings.max_rows {
        return Err(Error::Budget(format!(
            "{} relations exceed --max-rows {}",
            args.len(),
            settings.max_rows
        )));
    }
    let relations = generate_all(family, &args, settings.parallel)?;
    let set = RelationSet {
        weight,
        family,
        relations,
    };
    settings.cache.put(&key, &set.to_json()?);
    Ok(set)
}

pub fn relations(args: &RelationsArgs, settings: &Settings) -> Result<String, Failure> {
    let set = relation_set(args.weight, args.family, args.include_d1_derivation, settings)?;
    let text = pretty(&set.to_json()?);
    match &args.out {
        Some(path) => {
            write_atomic(path, text.as_bytes())
                .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

pub fn rank(args: &RankArgs, settings: &Settings) -> Result<String, Failure> {
    let text = fs::read_to_string(&args.input)
        .map_err(|e| Failure::io(format!("cannot read {}: {e}", args.input.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", args.input.display())))?;
    let set = RelationSet::from_json(&value)?;
    if set.relations.len() as u64 > settings.max_rows {
        return Err(Error::Budget(format!(
            "{} rows exceed --max-rows {}",
            set.relations.len(),
            settings.max_rows
        ))
        .into());
    }
    let m = set.matrix()?;
    let r = rank_exact(&m)?;
    Ok(match settings.format {
        Format::Json => pretty(&json!({
            "rank": r,
            "rows": m.nrows(),
            "symbols": m.ncols(),
            "weight": set.weight,
            "family": set.family.name(),
        })),
        Format::Csv => format!("weight,family,rows,symbols,rank\n{},{},{},{},{r}\n", set.weight, set.family, m.nrows(), m.ncols()),
        Format::Text => format!("{r}\n"),
    })
}

pub fn table1(args: &Table1Args, settings: &Settings) -> Result<String, Failure> {
    if args.max_weight < 3 {
        return Err(Error::Invalid(format!("--max-weight must be at least 3, got {}", args.max_weight)).into());
    }
    let mut rows = Vec::new();
    for w in 3..=args.max_weight {
        let mut ranks = Vec::new();
        for &f in &args.families {
            let set = relation_set(w, f, args.include_d1_derivation, settings)?;
            ranks.push(rank_exact(&set.matrix()?)?);
        }
        let reference = ALL_RELATIONS_REFERENCE.iter().find(|(x, _)| *x == w).map(|(_, n)| *n);
        rows.push((w, ranks, reference));
    }
    let names: Vec<&str> = args.families.iter().map(|f| f.name()).collect();
    Ok(match settings.format {
        Format::Json => {
            let list: Vec<serde_json::Value> = rows
                .iter()
                .map(|(w, ranks, reference)| {
                    let mut obj = json!({ "weight": w, "all_reference": reference });
                    for (n, r) in names.iter().zip(ranks) {
                        obj[*n] = json!(r);
                    }
                    obj
                })
                .collect();
            pretty(&json!({ "include_d1_derivation": args.include_d1_derivation, "rows": list }))
        }
        Format::Csv => {
            let mut out = format!("weight,{},all_reference\n", names.join(","));
            for (w, ranks, reference) in &rows {
                let cells: Vec<String> = ranks.iter().map(|r| r.to_string()).collect();
                let reference = reference.map(|r| r.to_string()).unwrap_or_default();
                writeln!(out, "{w},{},{reference}", cells.join(",")).unwrap();
            }
            out
        }
        Format::Text => {
            let mut out = String::from("weight");
            for n in &names {
                write!(out, " {n:>10}").unwrap();
            }
            writeln!(out, " {:>10}", "all (ref)").unwrap();
            for (w, ranks, reference) in &rows {
                write!(out, "{w:>6}").unwrap();
                for r in ranks {
                    write!(out, " {r:>10}").unwrap();
                }
                let reference = reference.map(|r| r.to_string()).unwrap_or_else(|| "-".into());
                writeln!(out, " {reference:>10}").unwrap();
            }
            out
        }
    })
}
