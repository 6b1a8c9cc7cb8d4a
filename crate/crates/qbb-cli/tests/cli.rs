use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;

use qbb::scalar::parse_rational_function;
use qbb_cli::config::{FormConfig, Limits, NuOverride, ProjectConfig};

const ISO: &str = "[datum]\nindices = [\"i\"]\ncartan = [[0]]\nsymmetrizer = [1]\n";
const MIX: &str = "[datum]\nindices = [\"i\", \"j\"]\ncartan = [[2, -1], [-1, 0]]\nsymmetrizer = [1, 1]\n";

struct Project {
    dir: tempfile::TempDir,
}

impl Project {
    fn new(config: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("qbb.toml"), config).unwrap();
        Project { dir }
    }

    fn cache(&self) -> PathBuf {
        self.dir.path().join("cache")
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_qbb"))
            .current_dir(self.dir.path())
            .env("QBB_CACHE_DIR", self.cache())
            .args(args)
            .output()
            .unwrap()
    }
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn files(dir: &Path) -> usize {
    walk(dir).len()
}

fn walk(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).into_iter().flatten().flatten() {
        let p = e.path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn gram_on_isotropic() {
    let p = Project::new(ISO);
    let o = p.run(&["gram", "--weight", "2*i"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["matrix"], serde_json::json!([["2", "1"], ["1", "1"]]));
    assert_eq!(v["basis"], serde_json::json!([[["i", 1], ["i", 1]], [["i", 2]]]));
}

#[test]
fn crystal_dot_on_isotropic() {
    let p = Project::new(ISO);
    let o = p.run(&["crystal", "--depth", "2", "--format", "dot"]);
    assert_eq!(o.status.code(), Some(0));
    let dot = String::from_utf8(o.stdout).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.lines().filter(|l| l.contains("[label=") && !l.contains("->")).count(), 4);
    assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 3);
}

#[test]
fn crystal_json_with_lambda() {
    let p = Project::new(MIX);
    let o = p.run(&["crystal", "--depth", "2", "--lambda", "i=1,j=0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["crystal"], "B(i=1,j=0)");
}

#[test]
fn verify_serre_on_mixed() {
    let p = Project::new(MIX);
    let o = p.run(&["verify", "--suite", "serre", "--height", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["reports"][0]["suite"], "serre");
    assert!(v["reports"][0]["checks"].as_u64().unwrap() > 0);
}

#[test]
fn serre_check_and_primitives() {
    let p = Project::new(MIX);
    let o = p.run(&["serre-check", "--max-m", "3", "--max-n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["passed"], true);
    let o = p.run(&["primitives", "--index", "j", "--max-l", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v[0]["expansion"], serde_json::json!([[[["j", 1]], "1"]]));
    assert_eq!(v[0]["tau"], "1");
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn global_csv_and_json() {
    let p = Project::new(ISO);
    let o = p.run(&["global", "--height", "2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("weight,vertex,word,expansion,"));
    assert_eq!(text.lines().count(), 1 + 4);
    let o = p.run(&["global", "--height", "2", "--lambda", "i=1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["module"], "V(i=1)");
}

#[test]
fn usage_errors_exit_two() {
    let p = Project::new(ISO);
    for args in [
        &["gram", "--weight", "2*k"][..],
        &["gram", "--weight", "2*"],
        &["gram", "--weight", "9*i"],
        &["crystal", "--depth", "9"],
        &["verify", "--suite", "nope", "--height", "2"],
        &["verify", "--height", "2", "--lambda", "i=-1"],
        &["primitives", "--index", "z", "--max-l", "1"],
        &["frobnicate"],
    ] {
        let o = p.run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
    let o = p.run(&["--config", "missing.toml", "validate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_errors_carry_positions() {
    let p = Project::new("[datum]\nindices = [\"i\"]\ncartan = [[0]]\nsymmetrizer = [1]\n\n[limits]\nmax_hieght = 3\n");
    let o = p.run(&["validate"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("7:1"), "{err}");
    let p = Project::new("[datum]\nindices = [\"i\"]\ncartan = [[1]]\nsymmetrizer = [1]\n");
    assert_eq!(p.run(&["validate"]).status.code(), Some(2));
    let p = Project::new(&format!("{ISO}\n[form]\nnu_default = \"1/(1-q\"\n"));
    let o = p.run(&["validate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("form.nu_default"));
}

#[test]
fn irregular_nu_fails_validation() {
    let p = Project::new(&format!("{ISO}\n[[form.override]]\nindex = \"i\"\nlevel = 2\nvalue = \"2\"\n"));
    let o = p.run(&["validate"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["valid"], false);
    let p = Project::new(&format!("{ISO}\n[[form.override]]\nindex = \"i\"\nlevel = 2\nvalue = \"1/(1-q)\"\n"));
    let o = p.run(&["validate"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["valid"], true);
}

#[test]
fn nu_changes_the_gram_matrix() {
    let p = Project::new(&format!("{ISO}\n[[form.override]]\nindex = \"i\"\nlevel = 2\nvalue = \"1/(1-q)\"\n"));
    let o = p.run(&["gram", "--weight", "2*i"]);
    let got: qbb::Scalar = parse_rational_function(json(&o)["matrix"][1][1].as_str().unwrap()).unwrap();
    assert_eq!(got, parse_rational_function("1/(1-q)").unwrap());
}

#[test]
fn json_config_is_accepted() {
    let p = Project::new(r#"{"datum": {"indices": ["i"], "cartan": [[0]], "symmetrizer": [1]}, "limits": {"max_height": 2, "max_depth": 2}}"#);
    assert_eq!(p.run(&["gram", "--weight", "2*i"]).status.code(), Some(0));
    assert_eq!(p.run(&["gram", "--weight", "3*i"]).status.code(), Some(2));
}

#[test]
fn cache_is_coherent() {
    let p = Project::new(MIX);
    let args = ["crystal", "--depth", "3", "--format", "json"];
    let first = p.run(&args);
    assert_eq!(files(&p.cache()), 1);
    let hit = p.run(&args);
    assert_eq!(first.stdout, hit.stdout);
    std::fs::remove_dir_all(p.cache()).unwrap();
    let again = p.run(&args);
    assert_eq!(first.stdout, again.stdout);
    let fresh = p.run(&["--no-cache", "crystal", "--depth", "3", "--format", "json"]);
    assert_eq!(first.stdout, fresh.stdout);
    assert_eq!(p.run(&["crystal", "--depth", "3", "--format", "dot"]).status.code(), Some(0));
    assert_eq!(files(&p.cache()), 2);
}

#[test]
fn corrupt_cache_entries_are_recomputed() {
    let p = Project::new(ISO);
    let first = p.run(&["gram", "--weight", "3*i"]);
    let entry = walk(&p.cache()).pop().unwrap();
    std::fs::write(&entry, "{not json").unwrap();
    assert_eq!(p.run(&["gram", "--weight", "3*i"]).stdout, first.stdout);
}

#[test]
fn jobs_do_not_change_output() {
    let p = Project::new(MIX);
    let a = p.run(&["--no-cache", "--jobs", "1", "global", "--height", "3"]);
    let b = p.run(&["--no-cache", "--jobs", "4", "global", "--height", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

fn arb_config() -> impl Strategy<Value = ProjectConfig> {
    let datum = prop_oneof![
        Just(qbb::BorcherdsCartanDatum::new(vec!["i".into()], vec![vec![0]], vec![1]).unwrap()),
        Just(qbb::BorcherdsCartanDatum::new(vec!["a".into(), "b".into()], vec![vec![2, -1], vec![-1, 0]], vec![1, 1]).unwrap()),
        Just(qbb::BorcherdsCartanDatum::new(vec!["x".into(), "y".into()], vec![vec![-4, -2], vec![-4, -2]], vec![2, 1]).unwrap()),
    ];
    let values = prop_oneof![Just("1"), Just("1+q"), Just("1/(1-q)"), Just("1+q^2")];
    (datum, values.clone(), proptest::collection::vec((1u32..4, values), 0..3), 1u32..6, 1u32..6, any::<bool>()).prop_map(
        |(datum, default, ovs, h, dep, cache)| {
            let last = datum.indices.last().unwrap().clone();
            let overrides = ovs.into_iter().map(|(level, v)| NuOverride { index: last.clone(), level, value: v.to_string() }).collect();
            ProjectConfig {
                datum,
                form: FormConfig { nu_default: default.to_string(), overrides },
                limits: Limits { max_height: h, max_depth: dep },
                cache_dir: cache.then(|| PathBuf::from("/tmp/qbb-cache")),
            }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trips(cfg in arb_config()) {
        let back = ProjectConfig::parse(&cfg.to_toml()).unwrap();
        prop_assert_eq!(&back, &cfg);
        let js = serde_json::to_string(&cfg).unwrap();
        prop_assert_eq!(ProjectConfig::parse(&js).unwrap(), cfg);
    }
}
