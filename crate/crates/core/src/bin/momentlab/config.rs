//! Typed flat key=value run configuration shared by the config file and the
//! command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use clap::{Arg, ArgMatches, Command};
use serde_json::{Map, Value};

use momentlab::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub enum Kind {
    Int,
    UInt,
    Float,
    UIntList,
    FloatList,
    Choice(&'static [&'static str]),
}

#[derive(Debug)]
pub struct Key {
    pub name: &'static str,
    pub kind: Kind,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn key(name: &'static str, kind: Kind, default: Option<&'static str>, help: &'static str) -> Key {
    Key { name, kind, default, help }
}

#[derive(Debug)]
pub struct CommandSpec {
    pub name: &'static str,
    pub about: &'static str,
    pub keys: &'static [Key],
}

use Kind::*;

pub const COMMANDS: &[CommandSpec] = &[
    CommandSpec {
        name: "kloosterman",
        about: "Kloosterman sums: single value, random batch (Weil bound and symmetry) or CRT multiplicativity",
        keys: &[
            key("mode", Choice(&["single", "batch", "crt"]), Some("single"), "single | batch | crt"),
            key("m", Int, Some("1"), "first argument"),
            key("n", Int, Some("1"), "second argument"),
            key("c", UInt, Some("10"), "modulus"),
            key("count", UInt, Some("1000"), "random tuples in batch and crt modes"),
            key("c_max", UInt, Some("10000"), "largest modulus in batch and crt modes"),
            key("seed", UInt, Some("1"), "random seed"),
        ],
    },
    CommandSpec {
        name: "petersson",
        about: "Petersson formula, spectral against Kloosterman side",
        keys: &[
            key("k", UIntList, Some("12"), "weights, comma separated"),
            key("m", UInt, None, "single m (with n)"),
            key("n", UInt, None, "single n (with m)"),
            key("m_max", UInt, Some("10"), "grid 1 <= m, n <= m_max when m, n are absent"),
            key("tol", Float, Some("1e-8"), "relative tolerance"),
        ],
    },
    CommandSpec {
        name: "voronoi",
        about: "GL(3) Voronoi formula for sym² g, both sides and both branches",
        keys: &[
            key("kappa", UInt, Some("12"), "weight of g"),
            key("x", FloatList, Some("50,200"), "lengths X"),
            key("m_max", UInt, Some("3"), "largest m"),
            key("c_max", UInt, Some("10"), "largest modulus"),
            key("coeffs", UInt, Some("200000"), "GL(3) coefficient table length"),
            key("tol", Float, Some("1e-5"), "relative two-sided tolerance"),
            key("branch_tol", Float, Some("1e-8"), "relative branch tolerance"),
        ],
    },
    CommandSpec {
        name: "bessel-avg",
        about: "Averaged Bessel sums against their main terms",
        keys: &[
            key("K", FloatList, Some("50,100,200"), "averaging lengths K"),
            key("ratio", FloatList, Some("1"), "x/K² values"),
            key("mode", Choice(&["even", "mod4-0", "mod4-2"]), Some("even"), "even | mod4-0 | mod4-2"),
            key("tol", Float, None, "optional bound on |residual|"),
        ],
    },
    CommandSpec {
        name: "bilinear",
        about: "Bilinear forms with Kloosterman sums against the lemma bounds",
        keys: &[
            key("kappa", UInt, Some("12"), "weight of g"),
            key("x", FloatList, Some("100"), "lengths X"),
            key("y", FloatList, Some("100"), "lengths Y"),
            key("q", UIntList, Some("7,11,13"), "moduli"),
            key("h", Int, Some("1"), "shift h"),
            key("lemma", Choice(&["general", "coprime"]), Some("general"), "general | coprime"),
            key("z", Float, Some("1"), "Z"),
            key("z1", Float, Some("1"), "Z1"),
            key("z2", Float, Some("1"), "Z2"),
            key("slack", Float, None, "optional bound on the ratio"),
        ],
    },
    CommandSpec {
        name: "lvalue",
        about: "Central values L(1/2, sym² g ⊗ f) and L(1/2, f) at one weight",
        keys: &[
            key("k", UInt, Some("24"), "weight of f"),
            key("kappa", UInt, Some("12"), "weight of g"),
            key("index", UInt, None, "single eigenform index"),
        ],
    },
    CommandSpec {
        name: "moment",
        about: "Weight-aspect first moments",
        keys: &[
            key("K", FloatList, Some("20"), "lengths K"),
            key("theorem", Choice(&["1.3", "1.4"]), Some("1.4"), "1.4: L(1/2,F⊗f); 1.3: with L(1/2,f)"),
            key("ell", UInt, Some("1"), "twist ℓ"),
            key("kappa", UInt, Some("12"), "weight of g"),
            key("y_exponent", Float, Some("2.75"), "off-diagonal length 𝒴 = K^e"),
            key("slack", Float, None, "optional bound |gap| <= slack·K^(-1/4)"),
        ],
    },
    CommandSpec {
        name: "amplifier",
        about: "Amplifier expansion identity and self-amplification",
        keys: &[
            key("k", UInt, Some("24"), "weight"),
            key("f0", UInt, Some("0"), "index of the amplified form"),
            key("L", UIntList, Some("5,11,23"), "amplifier lengths"),
            key("tol", Float, Some("1e-10"), "expansion tolerance"),
        ],
    },
];

pub const GLOBAL_KEYS: &[&str] = &["command", "output", "csv", "threads"];

pub fn spec(name: &str) -> Option<&'static CommandSpec> {
    COMMANDS.iter().find(|c| c.name == name)
}

pub fn cli() -> Command {
    let mut cmd = Command::new("momentlab")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Numerical verification suites and moment experiments")
        .arg(Arg::new("config").long("config").global(true).help("flat key = value config file"))
        .arg(Arg::new("output").long("output").global(true).help("JSON-lines output path (stdout if absent)"))
        .arg(Arg::new("csv").long("csv").global(true).help("CSV table output path"))
        .arg(Arg::new("threads").long("threads").global(true).value_parser(clap::value_parser!(usize)).help("worker threads"));
    for spec in COMMANDS {
        let mut sub = Command::new(spec.name).about(spec.about);
        for k in spec.keys {
            sub = sub.arg(Arg::new(k.name).long(k.name).help(k.help).allow_hyphen_values(true));
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

/// Lines `key = value`; `#` starts a comment.
pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if k.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", i + 1)));
        }
        if out.insert(k.clone(), v).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key {k}", i + 1)));
        }
    }
    Ok(out)
}

fn parse_value(k: &Key, raw: &str) -> Result<Value> {
    let bad = |what: &str| Error::Config(format!("{} = {raw:?}: expected {what}", k.name));
    let list = |raw: &str| raw.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect::<Vec<_>>();
    Ok(match k.kind {
        Int => Value::from(raw.parse::<i64>().map_err(|_| bad("an integer"))?),
        UInt => Value::from(raw.parse::<u64>().map_err(|_| bad("a nonnegative integer"))?),
        Float => {
            let v = raw.parse::<f64>().map_err(|_| bad("a number"))?;
            if !v.is_finite() {
                return Err(bad("a finite number"));
            }
            Value::from(v)
        }
        UIntList => Value::from(
            list(raw)
                .iter()
                .map(|s| s.parse::<u64>().map_err(|_| bad("a list of nonnegative integers")))
                .collect::<Result<Vec<_>>>()?,
        ),
        FloatList => Value::from(
            list(raw)
                .iter()
                .map(|s| s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| bad("a list of numbers")))
                .collect::<Result<Vec<_>>>()?,
        ),
        Choice(options) => {
            if !options.contains(&raw) {
                return Err(bad(&format!("one of {}", options.join(", "))));
            }
            Value::from(raw)
        }
    })
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: &'static CommandSpec,
    pub params: Map<String, Value>,
    pub output: Option<String>,
    pub csv: Option<String>,
    pub threads: Option<usize>,
}

impl RunConfig {
    /// Flags override file values, file values override defaults.
    pub fn resolve(matches: &ArgMatches) -> Result<Self> {
        let file = match matches.get_one::<String>("config") {
            Some(path) => parse_file(&fs::read_to_string(Path::new(path)).map_err(|e| Error::Config(format!("{path}: {e}")))?)?,
            None => BTreeMap::new(),
        };
        let (name, sub) = match matches.subcommand() {
            Some((name, sub)) => (name.to_string(), Some(sub)),
            None => (file.get("command").cloned().ok_or_else(|| Error::Config("no command given".into()))?, None),
        };
        if let Some(c) = file.get("command") {
            if c != &name {
                return Err(Error::Config(format!("config file is for command {c}, not {name}")));
            }
        }
        let command = spec(&name).ok_or_else(|| Error::Config(format!("unknown command {name}")))?;
        for k in file.keys() {
            if !GLOBAL_KEYS.contains(&k.as_str()) && !command.keys.iter().any(|s| s.name == k) {
                return Err(Error::Config(format!("unknown key {k} for command {name}")));
            }
        }
        let mut params = Map::new();
        for k in command.keys {
            let raw = sub
                .and_then(|s| s.get_one::<String>(k.name).cloned())
                .or_else(|| file.get(k.name).cloned())
                .or_else(|| k.default.map(String::from));
            if let Some(raw) = raw {
                params.insert(k.name.to_string(), parse_value(k, &raw)?);
            }
        }
        let global = |key: &str| matches.get_one::<String>(key).cloned().or_else(|| file.get(key).cloned());
        let threads = match matches.get_one::<usize>("threads") {
            Some(&t) => Some(t),
            None => file
                .get("threads")
                .map(|t| t.parse::<usize>().map_err(|_| Error::Config(format!("threads = {t:?}: expected a positive integer"))))
                .transpose()?,
        };
        if threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        Ok(RunConfig { command, params, output: global("output"), csv: global("csv"), threads })
    }

    pub fn u64(&self, key: &str) -> Option<u64> {
        self.params.get(key).and_then(Value::as_u64)
    }

    pub fn i64(&self, key: &str) -> Option<i64> {
        self.params.get(key).and_then(Value::as_i64)
    }

    pub fn f64(&self, key: &str) -> Option<f64> {
        self.params.get(key).and_then(Value::as_f64)
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.params.get(key).and_then(Value::as_str)
    }

    pub fn u64_list(&self, key: &str) -> Vec<u64> {
        self.params.get(key).and_then(Value::as_array).map(|a| a.iter().filter_map(Value::as_u64).collect()).unwrap_or_default()
    }

    pub fn f64_list(&self, key: &str) -> Vec<f64> {
        self.params.get(key).and_then(Value::as_array).map(|a| a.iter().filter_map(Value::as_f64).collect()).unwrap_or_default()
    }

    /// The parameters embedded in every output header; thread count excluded.
    pub fn provenance(&self) -> Value {
        serde_json::json!({
            "command": self.command.name,
            "version": env!("CARGO_PKG_VERSION"),
            "config": Value::Object(self.params.clone()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(args: &[&str]) -> Result<RunConfig> {
        RunConfig::resolve(&cli().try_get_matches_from(args).unwrap())
    }

    #[test]
    fn file_parsing() {
        let m = parse_file("# c\nk = 12,16\n\nm_max=5 # trailing\n").unwrap();
        assert_eq!(m["k"], "12,16");
        assert_eq!(m["m_max"], "5");
        assert!(parse_file("k 12").is_err());
        assert!(parse_file("k=1\nk=2").is_err());
    }

    #[test]
    fn flags_and_defaults() {
        let c = resolve(&["momentlab", "petersson", "--k", "12,16", "--m", "2"]).unwrap();
        assert_eq!(c.u64_list("k"), vec![12, 16]);
        assert_eq!(c.u64("m"), Some(2));
        assert_eq!(c.u64("n"), None);
        assert_eq!(c.f64("tol"), Some(1e-8));
        let c = resolve(&["momentlab", "kloosterman", "--m", "-3"]).unwrap();
        assert_eq!(c.i64("m"), Some(-3));
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(resolve(&["momentlab", "petersson", "--k", "x"]).is_err());
        assert!(resolve(&["momentlab", "moment", "--theorem", "2"]).is_err());
        assert!(cli().try_get_matches_from(["momentlab", "petersson", "--bogus", "1"]).is_err());
    }

    #[test]
    fn provenance_excludes_threads() {
        let a = resolve(&["momentlab", "--threads", "1", "amplifier"]).unwrap();
        let b = resolve(&["momentlab", "--threads", "4", "amplifier"]).unwrap();
        assert_eq!(a.provenance(), b.provenance());
    }
}
