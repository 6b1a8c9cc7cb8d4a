use std::sync::Arc;

use anyhow::bail;
use serde_json::{json, Value};

use qbb::crystal::Crystal;
use qbb::free_algebra::{serre_element, Form, Word};
use qbb::global_basis::{project_aform, AForm, GlobalBasis};
use qbb::highest_weight::VModule;
use qbb::suites::{canonical_name, run_suite, serre_cases, SuiteContext, SUITES};
use qbb::uminus::UMinus;
use qbb::{BorcherdsCartanDatum, DominantWeight, RootVector};

use crate::config::ProjectConfig;

/// What a command printed and whether its checks held.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub passed: bool,
}

impl Outcome {
    fn pass(output: String) -> Self {
        Outcome { output, passed: true }
    }

    pub fn to_json(&self) -> Value {
        json!({"output": self.output, "passed": self.passed})
    }

    pub fn from_json(v: &Value) -> Option<Self> {
        Some(Outcome { output: v.get("output")?.as_str()?.to_string(), passed: v.get("passed")?.as_bool()? })
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

pub fn word_json(d: &BorcherdsCartanDatum, w: &Word) -> Value {
    Value::Array(w.iter().map(|x| json!([d.name(x.i), x.l])).collect())
}

pub fn word_name(d: &BorcherdsCartanDatum, w: &Word) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter().map(|x| format!("f({},{})", d.name(x.i), x.l)).collect::<Vec<_>>().join(" ")
}

fn uminus(cfg: &ProjectConfig, form: Arc<Form>) -> Arc<UMinus> {
    Arc::new(UMinus::new(form, cfg.limits.max_height.max(cfg.limits.max_depth)))
}

fn lambda(d: &BorcherdsCartanDatum, src: &Option<String>) -> anyhow::Result<Option<DominantWeight>> {
    Ok(match src {
        Some(s) => Some(d.parse_lambda(s)?),
        None => None,
    })
}

fn bounded(what: &str, value: u32, bound: u32, key: &str) -> anyhow::Result<()> {
    if value > bound {
        bail!("{what} {value} exceeds limits.{key} = {bound}");
    }
    Ok(())
}

pub fn validate(cfg: &ProjectConfig) -> anyhow::Result<Outcome> {
    let d = &cfg.datum;
    let form = cfg.form()?;
    let nu: Vec<Value> = form
        .nu_looks_regular(8)
        .into_iter()
        .map(|(i, l, ok)| json!({"index": d.name(i), "level": l, "value": form.nu(i, l).to_canonical_string(), "in_1_plus_qZ>=0[[q]]": ok}))
        .collect();
    let passed = nu.iter().all(|v| v["in_1_plus_qZ>=0[[q]]"] == json!(true));
    let kinds: Vec<Value> = (0..d.rank()).map(|i| json!({"index": d.name(i), "kind": format!("{:?}", d.kind(i)).to_lowercase()})).collect();
    let out = json!({
        "datum": d,
        "kinds": kinds,
        "nu_overrides": nu,
        "limits": {"max_height": cfg.limits.max_height, "max_depth": cfg.limits.max_depth},
        "valid": passed,
    });
    Ok(Outcome { output: pretty(&out), passed })
}

pub fn gram(cfg: &ProjectConfig, weight: &str) -> anyhow::Result<Outcome> {
    let d = &cfg.datum;
    let a = d.parse_root(weight)?;
    bounded("height", a.height(), cfg.limits.max_height, "max_height")?;
    let form = cfg.form()?;
    let (words, g) = form.gram_matrix(&a);
    let entries: Vec<Vec<String>> = (0..g.rows()).map(|r| g.row(r).iter().map(|x| x.to_canonical_string()).collect()).collect();
    let out = json!({
        "weight": d.format_root(&a),
        "basis": words.iter().map(|w| word_json(d, w)).collect::<Vec<_>>(),
        "matrix": entries,
    });
    Ok(Outcome::pass(pretty(&out)))
}

pub fn serre_check(cfg: &ProjectConfig, max_m: u32, max_n: u32) -> anyhow::Result<Outcome> {
    let d = &cfg.datum;
    let form = cfg.form()?;
    let cases = serre_cases(d, max_m, max_n);
    let rows: Vec<anyhow::Result<Value>> = {
        use rayon::prelude::*;
        cases
            .par_iter()
            .map(|c| {
                let x = serre_element(d, c.i, c.j, c.m, &c.c, c.sign)?;
                let ok = form.radical_contains(&x)?;
                Ok(json!({
                    "i": d.name(c.i),
                    "j": d.name(c.j),
                    "m": c.m,
                    "c": c.c,
                    "sign": c.sign,
                    "weight": x.weight(d).map_or("0".to_string(), |a| d.format_root(&a)),
                    "in_radical": ok,
                }))
            })
            .collect()
    };
    let rows = rows.into_iter().collect::<anyhow::Result<Vec<_>>>()?;
    let passed = rows.iter().all(|r| r["in_radical"] == json!(true));
    let out = json!({"max_m": max_m, "max_n": max_n, "cases": rows.len(), "passed": passed, "elements": rows});
    Ok(Outcome { output: pretty(&out), passed })
}

pub fn primitives(cfg: &ProjectConfig, index: &str, max_l: u32) -> anyhow::Result<Outcome> {
    let d = &cfg.datum;
    let i = d.index_of(index)?;
    let top = if d.is_real(i) { max_l.min(1) } else { max_l };
    bounded("level", top, cfg.limits.max_height, "max_height")?;
    let u = uminus(cfg, cfg.form()?);
    let mut rows = Vec::new();
    for l in 1..=top {
        let p = u.primitive(i, l)?;
        let mut terms: Vec<(&Word, String)> = p.free.terms().map(|(w, c)| (w, c.to_canonical_string())).collect();
        terms.sort();
        rows.push(json!({
            "i": d.name(i),
            "l": l,
            "expansion": terms.into_iter().map(|(w, c)| json!([word_json(d, w), c])).collect::<Vec<_>>(),
            "tau": p.tau.to_canonical_string(),
        }));
    }
    Ok(Outcome::pass(pretty(&Value::Array(rows))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum GraphFormat {
    Dot,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum TableFormat {
    Json,
    Csv,
}

pub fn crystal(cfg: &ProjectConfig, depth: u32, lam: &Option<String>, format: GraphFormat) -> anyhow::Result<Outcome> {
    let d = &cfg.datum;
    bounded("depth", depth, cfg.limits.max_depth, "max_depth")?;
    let lam = lambda(d, lam)?;
    let u = uminus(cfg, cfg.form()?);
    let (name, dot, js) = match &lam {
        None => {
            let c = Crystal::build(u, depth)?;
            ("B(inf)".to_string(), c.to_dot("B(inf)"), c.to_json())
        }
        Some(l) => {
            let name = format!("B({})", d.format_lambda(l));
            let c = Crystal::build(Arc::new(VModule::new(u, l.clone())?), depth)?;
            (name.clone(), c.to_dot(&name), c.to_json())
        }
    };
    Ok(Outcome::pass(match format {
        GraphFormat::Dot => dot,
        GraphFormat::Json => pretty(&json!({"crystal": name, "graph": js})),
    }))
}

pub fn global(cfg: &ProjectConfig, height: u32, lam: &Option<String>, format: TableFormat) -> anyhow::Result<Outcome> {
    let d = &cfg.datum;
    bounded("height", height, cfg.limits.max_height, "max_height")?;
    let lam = lambda(d, lam)?;
    let u = uminus(cfg, cfg.form()?);
    let af = AForm::new(u.clone());
    let pivot_names = |a: &RootVector| -> qbb::Result<Vec<String>> { Ok(u.model(a)?.pivot_words().iter().map(|w| word_name(d, w)).collect()) };
    let (name, table) = match &lam {
        None => {
            let c = Arc::new(Crystal::build(u.clone(), height)?);
            let gb = GlobalBasis::build(c, height, |a| Ok(af.basis(a)?.to_vec()))?;
            ("U-".to_string(), gb.to_json(pivot_names)?)
        }
        Some(l) => {
            let v = Arc::new(VModule::new(u.clone(), l.clone())?);
            let c = Arc::new(Crystal::build(v.clone(), height)?);
            let gb = GlobalBasis::build(c, height, |a| project_aform(&v, a, &af.basis(a)?))?;
            let names = |a: &RootVector| -> qbb::Result<Vec<String>> {
                let all = pivot_names(a)?;
                Ok(v.space(a)?.free.iter().map(|&k| format!("{} v", all[k])).collect())
            };
            (format!("V({})", d.format_lambda(l)), gb.to_json(names)?)
        }
    };
    let passed = table["weights"].as_array().is_some_and(|ws| {
        ws.iter().all(|w| {
            w["certified"] == json!(true)
                && w["unimodular"] == json!(true)
                && w["entries"].as_array().is_some_and(|es| {
                    es.iter().all(|e| ["bar_invariant", "in_aform", "in_lattice", "residue_match"].iter().all(|k| e[*k] == json!(true)))
                })
        })
    });
    let output = match format {
        TableFormat::Json => pretty(&json!({"module": name, "global_basis": table})),
        TableFormat::Csv => global_csv(&table)?,
    };
    Ok(Outcome { output, passed })
}

fn global_csv(table: &Value) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["weight", "vertex", "word", "expansion", "bar_invariant", "in_aform", "in_lattice", "residue_match"])?;
    for wt in table["weights"].as_array().into_iter().flatten() {
        for e in wt["entries"].as_array().into_iter().flatten() {
            let expansion: Vec<String> = e["expansion"]
                .as_array()
                .into_iter()
                .flatten()
                .map(|t| format!("({})*[{}]", t[1].as_str().unwrap_or(""), t[0].as_str().unwrap_or("")))
                .collect();
            let flag = |k: &str| e[k].as_bool().unwrap_or(false).to_string();
            w.write_record([
                wt["weight"].as_str().unwrap_or(""),
                &e["vertex"].to_string(),
                e["word"].as_str().unwrap_or(""),
                &expansion.join(" + "),
                &flag("bar_invariant"),
                &flag("in_aform"),
                &flag("in_lattice"),
                &flag("residue_match"),
            ])?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn verify(cfg: &ProjectConfig, suite: &str, height: u32, lambdas: &[String]) -> anyhow::Result<Outcome> {
    let d = &cfg.datum;
    bounded("height", height, cfg.limits.max_height, "max_height")?;
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else {
        match canonical_name(suite) {
            Some(s) => vec![s],
            None => bail!("unknown suite '{suite}'; known: all, {}", SUITES.join(", ")),
        }
    };
    let lams = lambdas.iter().map(|s| d.parse_lambda(s)).collect::<qbb::Result<Vec<_>>>()?;
    let ctx = SuiteContext::new(uminus(cfg, cfg.form()?), height, lams)?;
    let reports = names.iter().map(|s| run_suite(s, &ctx)).collect::<qbb::Result<Vec<_>>>()?;
    let passed = reports.iter().all(|r| r.passed);
    let out = json!({
        "height": height,
        "lambdas": ctx.lambdas.iter().map(|l| d.format_lambda(l)).collect::<Vec<_>>(),
        "passed": passed,
        "reports": reports,
    });
    Ok(Outcome { output: pretty(&out), passed })
}
