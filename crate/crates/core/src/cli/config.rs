//! JSON run configuration: schema check, defaults, resolution of
//! `"golden"` and `"auto:M"`, and the inverse serialization written next to
//! every run.

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::diophantine::estimate_constants;
use crate::error::{Error, Result};
use crate::funcspace::Interval;
use crate::GOLDEN;

/// What a run does; the CLI names are kebab-case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Subcommand {
    Cohomology,
    Kam,
    StandardMap,
    Diagnose,
    #[value(name = "counterexample-2d")]
    Counterexample2d,
    Constants,
}

impl Subcommand {
    /// Payload key in the config file.
    pub fn key(self) -> &'static str {
        match self {
            Subcommand::Cohomology => "cohomology",
            Subcommand::Kam => "kam",
            Subcommand::StandardMap => "standard-map",
            Subcommand::Diagnose => "diagnose",
            Subcommand::Counterexample2d => "counterexample-2d",
            Subcommand::Constants => "constants",
        }
    }

    const ALL: [Subcommand; 6] = [
        Subcommand::Cohomology,
        Subcommand::Kam,
        Subcommand::StandardMap,
        Subcommand::Diagnose,
        Subcommand::Counterexample2d,
        Subcommand::Constants,
    ];

    fn needs_alpha(self) -> bool {
        matches!(self, Subcommand::Cohomology | Subcommand::Kam | Subcommand::Diagnose)
    }
}

/// `(sigma, tau)` given explicitly, or to be estimated from `|m| <= M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DioSpec {
    Explicit {
        sigma: f64,
        tau: f64,
    },
    /// Kept only when estimation failed; execution reports the failure.
    Auto(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum SemiSpec {
    /// `W = π₁`
    Projection,
    /// `W = π₁∘H^-1` of a manufactured pair.
    Manufactured,
    Expr {
        v: String,
        lipschitz: Option<f64>,
    },
}

/// Map pair for `kam` and `diagnose`: `F = U0 + f` (or `F0(omega) + f`),
/// `K = T_alpha + k`, or a manufactured pair.
#[derive(Clone, Debug, PartialEq)]
pub struct MapsPayload {
    /// `‖h‖_1` of the manufacturing generator; excludes `f`, `k`, `frequency`.
    pub manufactured: Option<f64>,
    pub f: [String; 2],
    pub k: [String; 2],
    pub frequency: Option<String>,
    pub semiconjugacy: Option<SemiSpec>,
    pub lipschitz0: Option<f64>,
    pub y_scale: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    /// `None`: the bundled ten-member corpus.
    Cohomology {
        phi: Option<String>,
    },
    Kam(MapsPayload),
    StandardMap {
        eps: f64,
        q: u32,
        r: u32,
        seeds: usize,
        iterations: usize,
    },
    Diagnose(MapsPayload),
    Counterexample2d {
        delta: f64,
        n_scan: usize,
    },
    Constants {
        n_list: Vec<f64>,
        s: f64,
        l: f64,
        decay_ls: Vec<f64>,
        y_scale: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub alpha: Option<f64>,
    pub dio: DioSpec,
    /// Range over which the Diophantine condition is verified.
    pub check_bound: u64,
    pub interval: Interval,
    pub delta0: f64,
    pub nx: usize,
    pub ny: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    pub threads: Option<usize>,
    pub payload: Payload,
}

pub const DEFAULT_CHECK_BOUND: u64 = 10_000;

/// Collects every violation before failing.
struct Checker<'a> {
    errors: Vec<String>,
    obj: &'a Map<String, Value>,
    path: String,
}

impl<'a> Checker<'a> {
    fn new(obj: &'a Map<String, Value>, path: &str, errors: Vec<String>) -> Self {
        Self { errors, obj, path: path.to_string() }
    }

    fn name(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn only(&mut self, allowed: &[&str]) {
        for k in self.obj.keys() {
            if !allowed.contains(&k.as_str()) {
                let n = self.name(k);
                self.errors.push(format!("unknown key '{n}'"));
            }
        }
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.obj.get(key)
    }

    fn bad(&mut self, key: &str, what: &str) {
        let n = self.name(key);
        self.errors.push(format!("'{n}' {what}"));
    }

    fn num(&mut self, key: &str, default: f64, ok: impl Fn(f64) -> bool, rule: &str) -> f64 {
        match self.get(key) {
            None => default,
            Some(v) => match v.as_f64() {
                Some(x) if ok(x) => x,
                _ => {
                    self.bad(key, &format!("must be a number {rule}"));
                    default
                }
            },
        }
    }

    fn uint(&mut self, key: &str, default: u64, min: u64) -> u64 {
        match self.get(key) {
            None => default,
            Some(v) => match v.as_u64() {
                Some(x) if x >= min => x,
                _ => {
                    self.bad(key, &format!("must be an integer >= {min}"));
                    default
                }
            },
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        match self.get(key) {
            None => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => {
                self.bad(key, "must be a string");
                None
            }
        }
    }

    fn num_list(&mut self, key: &str, default: &[f64], ok: impl Fn(f64) -> bool, rule: &str) -> Vec<f64> {
        match self.get(key) {
            None => default.to_vec(),
            Some(Value::Array(a)) if !a.is_empty() => {
                let v: Option<Vec<f64>> = a.iter().map(|x| x.as_f64().filter(|&x| ok(x))).collect();
                v.unwrap_or_else(|| {
                    self.bad(key, &format!("must be a list of numbers {rule}"));
                    default.to_vec()
                })
            }
            Some(_) => {
                self.bad(key, &format!("must be a non-empty list of numbers {rule}"));
                default.to_vec()
            }
        }
    }

    fn object(&mut self, key: &str) -> Option<&'a Map<String, Value>> {
        match self.get(key) {
            None => None,
            Some(Value::Object(o)) => Some(o),
            Some(_) => {
                self.bad(key, "must be an object");
                None
            }
        }
    }

    fn sub(&mut self, key: &str, obj: &'a Map<String, Value>) -> Checker<'a> {
        let errors = std::mem::take(&mut self.errors);
        Checker::new(obj, &self.name(key), errors)
    }

    fn absorb(&mut self, child: Checker<'_>) {
        self.errors = child.errors;
    }
}

const COMMON: &[&str] = &[
    "alpha",
    "sigma",
    "tau",
    "check_bound",
    "interval",
    "delta0",
    "grid",
    "tol",
    "max_iter",
    "output_dir",
    "seed",
    "threads",
];

/// Reads and validates `path` for `subcommand`.
pub fn load_config(path: &Path, subcommand: Subcommand) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, subcommand)
}

/// Validates a JSON document; all violations are reported together.
pub fn parse_config(text: &str, subcommand: Subcommand) -> Result<RunConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Config(vec![format!("invalid JSON: {e}")]))?;
    let Value::Object(obj) = value else {
        return Err(Error::Config(vec!["config must be a JSON object".into()]));
    };
    let mut c = Checker::new(&obj, "", Vec::new());
    let mut allowed: Vec<&str> = COMMON.to_vec();
    allowed.push(subcommand.key());
    for other in Subcommand::ALL {
        if other != subcommand && obj.contains_key(other.key()) {
            c.errors.push(format!("payload '{}' does not match subcommand '{}'", other.key(), subcommand.key()));
        }
    }
    c.only(&allowed.iter().copied().chain(Subcommand::ALL.iter().map(|s| s.key())).collect::<Vec<_>>());

    let alpha = match c.get("alpha") {
        None => {
            if subcommand.needs_alpha() {
                c.errors.push("missing required key 'alpha'".into());
            }
            None
        }
        Some(Value::String(s)) if s == "golden" => Some(GOLDEN),
        Some(v) => match v.as_f64() {
            Some(a) if a > 0.0 && a < 1.0 => Some(a),
            _ => {
                c.bad("alpha", "must be a number in (0, 1) or \"golden\"");
                None
            }
        },
    };

    let mut check_bound = c.uint("check_bound", DEFAULT_CHECK_BOUND, 1);
    let dio = match (c.get("sigma"), c.get("tau")) {
        (None, None) => DioSpec::Auto(check_bound),
        (Some(Value::String(s)), t) => match s.strip_prefix("auto:").and_then(|m| m.parse::<u64>().ok()) {
            Some(m) if m >= 100 && t.map_or(true, |t| t.as_str() == Some(s.as_str())) => {
                if c.get("check_bound").is_none() {
                    check_bound = m;
                }
                DioSpec::Auto(m)
            }
            _ => {
                c.bad("sigma", "must be a number or \"auto:M\" with M >= 100 (tau absent or the same string)");
                DioSpec::Auto(check_bound)
            }
        },
        (Some(s), Some(t)) => match (s.as_f64(), t.as_f64()) {
            (Some(s), Some(t)) if s > 0.0 && t > 0.0 => DioSpec::Explicit { sigma: s, tau: t },
            _ => {
                c.bad("sigma", "and 'tau' must be positive numbers");
                DioSpec::Auto(check_bound)
            }
        },
        (None, Some(_)) | (Some(_), None) => {
            c.errors.push("'sigma' and 'tau' must be given together".into());
            DioSpec::Auto(check_bound)
        }
    };

    let interval = match c.object("interval") {
        None => Interval::new(0.25, 0.75).expect("default interval"),
        Some(o) => {
            let mut s = c.sub("interval", o);
            s.only(&["lo", "hi"]);
            let lo = s.num("lo", f64::NAN, f64::is_finite, "");
            let hi = s.num("hi", f64::NAN, f64::is_finite, "");
            if o.get("lo").is_none() || o.get("hi").is_none() {
                s.errors.push("'interval' needs both 'lo' and 'hi'".into());
            }
            c.absorb(s);
            Interval::new(lo, hi).unwrap_or_else(|_| {
                if lo.is_finite() && hi.is_finite() {
                    c.errors.push(format!("'interval' must have lo < hi, got [{lo}, {hi}]"));
                }
                Interval::new(0.25, 0.75).expect("default interval")
            })
        }
    };
    let delta0 = c.num("delta0", 0.25, |d| d > 0.0 && d <= 0.5, "in (0, 1/2]");
    let (nx, ny) = match c.object("grid") {
        None => (64, 32),
        Some(o) => {
            let mut s = c.sub("grid", o);
            s.only(&["nx", "ny"]);
            let nx = s.uint("nx", 64, 8) as usize;
            let ny = s.uint("ny", 32, 4) as usize;
            if !nx.is_power_of_two() {
                s.bad("nx", "must be a power of two");
            }
            c.absorb(s);
            (nx, ny)
        }
    };
    let tol = c.num("tol", 1e-9, |t| t > 0.0, "> 0");
    let max_iter = c.uint("max_iter", 12, 0) as usize;
    let output_dir = c.string("output_dir").map(PathBuf::from);
    let seed = c.uint("seed", 0x5eed, 0);
    let threads = c.get("threads").map(|_| c.uint("threads", 1, 1) as usize);

    let payload_obj = match c.get(subcommand.key()) {
        None => Map::new(),
        Some(Value::Object(o)) => o.clone(),
        Some(_) => {
            c.bad(subcommand.key(), "must be an object");
            Map::new()
        }
    };
    let mut p = Checker::new(&payload_obj, subcommand.key(), std::mem::take(&mut c.errors));
    let payload = match subcommand {
        Subcommand::Cohomology => {
            p.only(&["phi"]);
            Payload::Cohomology { phi: p.string("phi") }
        }
        Subcommand::Kam => Payload::Kam(maps_payload(&mut p, true)),
        Subcommand::Diagnose => Payload::Diagnose(maps_payload(&mut p, false)),
        Subcommand::StandardMap => {
            p.only(&["eps", "q", "r", "seeds", "iterations"]);
            Payload::StandardMap {
                eps: p.num("eps", 1.0, f64::is_finite, ""),
                q: p.uint("q", 3, 1).min(u32::MAX as u64) as u32,
                r: p.uint("r", 2, 0).min(u32::MAX as u64) as u32,
                seeds: p.uint("seeds", 50, 1) as usize,
                iterations: p.uint("iterations", 2000, 1) as usize,
            }
        }
        Subcommand::Counterexample2d => {
            p.only(&["delta", "n_scan"]);
            Payload::Counterexample2d {
                delta: p.num("delta", 0.05, |d| d > 0.0 && d < 1.0 / (2.0 * std::f64::consts::PI), "in (0, 1/(2 pi))"),
                n_scan: p.uint("n_scan", 100_000, 1) as usize,
            }
        }
        Subcommand::Constants => {
            p.only(&["n_list", "s", "l", "decay_ls", "y_scale"]);
            Payload::Constants {
                n_list: p.num_list("n_list", &[4.0, 8.0, 16.0], |n| n > 1.0, "> 1"),
                s: p.num("s", 0.0, |s| s >= 0.0, ">= 0"),
                l: p.num("l", 2.0, |l| l >= 0.0, ">= 0"),
                decay_ls: p.num_list("decay_ls", &[1.0, 2.0, 3.0], |l| l >= 0.0, ">= 0"),
                y_scale: p.num("y_scale", 1.0, |s| s > 0.0, "> 0"),
            }
        }
    };
    if let Payload::Constants { s, l, .. } = &payload {
        if s > l {
            p.errors.push(format!("'constants.s' = {s} must not exceed 'constants.l' = {l}"));
        }
    }
    let errors = p.errors;
    if !errors.is_empty() {
        return Err(Error::Config(errors));
    }
    let dio = match dio {
        DioSpec::Auto(m) if alpha.is_some() => match estimate_constants(alpha.unwrap(), m) {
            Ok((sigma, tau)) => DioSpec::Explicit { sigma, tau },
            Err(_) => DioSpec::Auto(m),
        },
        d => d,
    };
    Ok(RunConfig {
        subcommand,
        alpha,
        dio,
        check_bound,
        interval,
        delta0,
        nx,
        ny,
        tol,
        max_iter,
        output_dir,
        seed,
        threads,
        payload,
    })
}

fn maps_payload(p: &mut Checker<'_>, needs_w: bool) -> MapsPayload {
    p.only(&["manufactured", "f", "k", "frequency", "semiconjugacy", "lipschitz0", "y_scale"]);
    let manufactured = p.object("manufactured").map(|o| {
        let mut s = p.sub("manufactured", o);
        s.only(&["c1"]);
        if o.get("c1").is_none() {
            s.errors.push("'manufactured' needs 'c1'".into());
        }
        let c1 = s.num("c1", 1e-3, |c| c > 0.0 && c < 0.125, "in (0, 1/8)");
        p.absorb(s);
        c1
    });
    let pair = |p: &mut Checker<'_>, key: &str| -> [String; 2] {
        match p.object(key) {
            None => ["0".into(), "0".into()],
            Some(o) => {
                let mut s = p.sub(key, o);
                s.only(&["x", "y"]);
                let x = s.string("x").unwrap_or_else(|| "0".into());
                let y = s.string("y").unwrap_or_else(|| "0".into());
                p.absorb(s);
                [x, y]
            }
        }
    };
    let f = pair(p, "f");
    let k = pair(p, "k");
    let frequency = p.string("frequency");
    if manufactured.is_some() && (p.get("f").is_some() || p.get("k").is_some() || frequency.is_some()) {
        p.errors.push(format!("'{}.manufactured' excludes 'f', 'k' and 'frequency'", p.path));
    }
    let semiconjugacy = match p.get("semiconjugacy") {
        None => {
            if needs_w {
                p.errors.push(format!("missing required key '{}.semiconjugacy'", p.path));
            }
            None
        }
        Some(Value::String(s)) if s == "projection" => Some(SemiSpec::Projection),
        Some(Value::String(s)) if s == "manufactured" => {
            if manufactured.is_none() {
                p.bad("semiconjugacy", "can be \"manufactured\" only with 'manufactured'");
            }
            Some(SemiSpec::Manufactured)
        }
        Some(Value::Object(o)) => {
            let mut s = p.sub("semiconjugacy", o);
            s.only(&["v", "lipschitz"]);
            let v = s.string("v");
            if v.is_none() {
                s.errors.push("'semiconjugacy' object needs 'v'".into());
            }
            let lipschitz = o.get("lipschitz").map(|_| s.num("lipschitz", 2.0, |l| l > 1.0, "> 1"));
            p.absorb(s);
            Some(SemiSpec::Expr { v: v.unwrap_or_default(), lipschitz })
        }
        Some(_) => {
            p.bad("semiconjugacy", "must be \"projection\", \"manufactured\" or {\"v\": expr, \"lipschitz\": L}");
            None
        }
    };
    MapsPayload {
        manufactured,
        f,
        k,
        frequency,
        semiconjugacy,
        lipschitz0: p.get("lipschitz0").map(|_| p.num("lipschitz0", 2.0, |l| l > 1.0, "> 1")),
        y_scale: p.num("y_scale", 1.0, |s| s > 0.0, "> 0"),
    }
}

impl RunConfig {
    /// The configuration as a document [`parse_config`] maps back to `self`.
    pub fn to_json(&self) -> Value {
        let mut o = Map::new();
        if let Some(a) = self.alpha {
            o.insert("alpha".into(), json!(a));
        }
        match self.dio {
            DioSpec::Explicit { sigma, tau } => {
                o.insert("sigma".into(), json!(sigma));
                o.insert("tau".into(), json!(tau));
            }
            DioSpec::Auto(m) => {
                o.insert("sigma".into(), json!(format!("auto:{m}")));
            }
        }
        o.insert("check_bound".into(), json!(self.check_bound));
        o.insert("interval".into(), json!({"lo": self.interval.lo(), "hi": self.interval.hi()}));
        o.insert("delta0".into(), json!(self.delta0));
        o.insert("grid".into(), json!({"nx": self.nx, "ny": self.ny}));
        o.insert("tol".into(), json!(self.tol));
        o.insert("max_iter".into(), json!(self.max_iter));
        if let Some(d) = &self.output_dir {
            o.insert("output_dir".into(), json!(d.to_string_lossy()));
        }
        o.insert("seed".into(), json!(self.seed));
        if let Some(t) = self.threads {
            o.insert("threads".into(), json!(t));
        }
        let payload = match &self.payload {
            Payload::Cohomology { phi } => match phi {
                Some(p) => json!({ "phi": p }),
                None => json!({}),
            },
            Payload::Kam(m) | Payload::Diagnose(m) => maps_json(m),
            Payload::StandardMap { eps, q, r, seeds, iterations } => {
                json!({"eps": eps, "q": q, "r": r, "seeds": seeds, "iterations": iterations})
            }
            Payload::Counterexample2d { delta, n_scan } => json!({"delta": delta, "n_scan": n_scan}),
            Payload::Constants { n_list, s, l, decay_ls, y_scale } => {
                json!({"n_list": n_list, "s": s, "l": l, "decay_ls": decay_ls, "y_scale": y_scale})
            }
        };
        o.insert(self.subcommand.key().into(), payload);
        Value::Object(o)
    }
}

fn maps_json(m: &MapsPayload) -> Value {
    let mut o = Map::new();
    if let Some(c1) = m.manufactured {
        o.insert("manufactured".into(), json!({ "c1": c1 }));
    } else {
        o.insert("f".into(), json!({"x": m.f[0], "y": m.f[1]}));
        o.insert("k".into(), json!({"x": m.k[0], "y": m.k[1]}));
        if let Some(w) = &m.frequency {
            o.insert("frequency".into(), json!(w));
        }
    }
    match &m.semiconjugacy {
        None => {}
        Some(SemiSpec::Projection) => {
            o.insert("semiconjugacy".into(), json!("projection"));
        }
        Some(SemiSpec::Manufactured) => {
            o.insert("semiconjugacy".into(), json!("manufactured"));
        }
        Some(SemiSpec::Expr { v, lipschitz }) => {
            let mut w = Map::new();
            w.insert("v".into(), json!(v));
            if let Some(l) = lipschitz {
                w.insert("lipschitz".into(), json!(l));
            }
            o.insert("semiconjugacy".into(), Value::Object(w));
        }
    }
    if let Some(l) = m.lipschitz0 {
        o.insert("lipschitz0".into(), json!(l));
    }
    o.insert("y_scale".into(), json!(m.y_scale));
    Value::Object(o)
}
