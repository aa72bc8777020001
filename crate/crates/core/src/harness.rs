//! Batch sweeps over edge probabilities and the witness-size trend table.
//!
//! A sweep config is a flat `key = value` file; see the README for the
//! grammar. Rows are computed on a worker pool and sorted by
//! `(grid index, trial, method)` before emission.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::cliques::clique_total;
use crate::coloring::{chromatic_number, Budget};
use crate::construct::{sparse_k_chromatic, ConstructionParams};
use crate::density::{ky_bound, m2};
use crate::ensemble::{critical_exponents, expected_clique_count, sample_gnp, CriticalExponents, PSpec};
use crate::error::{domain, Error, Result};
use crate::extremal::{
    certify_partite, deletion_heuristic, exact_max_hfree_cliques, partite_heuristic, ExactBudget, ExtremalResult,
    Method,
};
use crate::graph::{read_edge_list, Graph};
use crate::rational::{binomial, ExactRational};

/// Time allowed for computing `χ(H)` when `k` is not configured.
const CHROMATIC_BUDGET_SECS: f64 = 60.0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepConfig {
    pub n: usize,
    pub m: usize,
    /// Resolved against the config file's directory when relative.
    pub forbidden: PathBuf,
    pub grid: Vec<PSpec>,
    pub trials: usize,
    pub seed: u64,
    /// Sorted, without duplicates.
    pub methods: Vec<Method>,
    /// Number of parts plus one for the partite heuristic; `χ(H)` if absent.
    pub k: Option<usize>,
    pub restarts: usize,
    /// Cap on enumerated copies for the deletion heuristic.
    pub cap: usize,
}

const KEYS: [&str; 12] =
    ["n", "m", "forbidden", "exponents", "p", "trials", "seed", "methods", "exact", "k", "restarts", "cap"];

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse { line, msg: format!("invalid value for {key}: {v:?}") })
}

impl SweepConfig {
    /// Parses config text; relative `forbidden` paths are joined to `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut seen: Vec<(String, usize, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return parse_err(line, format!("expected key = value, found {content:?}"));
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return parse_err(line, format!("unknown key {key:?}"));
            }
            if seen.iter().any(|(k, _, _)| k == key) {
                return parse_err(line, format!("duplicate key {key:?}"));
            }
            seen.push((key.to_string(), line, value.to_string()));
        }
        let get = |key: &str| seen.iter().find(|(k, _, _)| k == key).map(|(_, l, v)| (*l, v.as_str()));
        let required = |key: &str| get(key).ok_or_else(|| Error::Parse { line: 0, msg: format!("missing key {key:?}") });

        let (l, v) = required("n")?;
        let n: usize = parse_num(l, "n", v)?;
        let (l, v) = required("m")?;
        let m: usize = parse_num(l, "m", v)?;
        let (l, v) = required("forbidden")?;
        if v.is_empty() {
            return parse_err(l, "empty forbidden path");
        }
        let forbidden = base.join(v);

        let list = |v: &str| -> Vec<String> { v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect() };
        let grid = match (get("exponents"), get("p")) {
            (Some(_), Some((l, _))) => return parse_err(l, "give either exponents or p, not both"),
            (None, None) => return parse_err(0, "missing key \"exponents\" or \"p\""),
            (Some((l, v)), None) => list(v)
                .iter()
                .map(|a| {
                    let a: ExactRational = a.parse().map_err(|_| Error::Parse { line: l, msg: format!("invalid exponent {a:?}") })?;
                    if a.is_negative() {
                        return parse_err(l, format!("exponent {a} is negative"));
                    }
                    Ok(PSpec::Exponent(a))
                })
                .collect::<Result<Vec<_>>>()?,
            (None, Some((l, v))) => list(v)
                .iter()
                .map(|p| {
                    let p: ExactRational = p.parse().map_err(|_| Error::Parse { line: l, msg: format!("invalid probability {p:?}") })?;
                    if p.is_zero() || p.is_negative() || p > ExactRational::one() {
                        return parse_err(l, format!("probability {p} outside (0, 1]"));
                    }
                    Ok(PSpec::Exact(p))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        if grid.is_empty() {
            return parse_err(0, "empty probability grid");
        }

        let trials = match get("trials") {
            Some((l, v)) => parse_num(l, "trials", v)?,
            None => 1,
        };
        let seed = match get("seed") {
            Some((l, v)) => parse_num(l, "seed", v)?,
            None => 0,
        };
        let mut methods = Vec::new();
        if let Some((l, v)) = get("methods") {
            for name in list(v) {
                match name.parse::<Method>() {
                    Ok(Method::Exact) => return parse_err(l, "enable the exact method with `exact = true`"),
                    Ok(method) => methods.push(method),
                    Err(_) => return parse_err(l, format!("unknown method {name:?}")),
                }
            }
        } else {
            methods = vec![Method::Partite, Method::Delete];
        }
        if let Some((l, v)) = get("exact") {
            match v {
                "true" => methods.push(Method::Exact),
                "false" => {}
                _ => return parse_err(l, format!("exact must be true or false, found {v:?}")),
            }
        }
        methods.sort();
        methods.dedup();
        if methods.is_empty() {
            return parse_err(get("methods").map_or(0, |x| x.0), "methods must be nonempty");
        }
        let k = match get("k") {
            Some((l, v)) => Some(parse_num(l, "k", v)?),
            None => None,
        };
        let restarts = match get("restarts") {
            Some((l, v)) => parse_num(l, "restarts", v)?,
            None => 4,
        };
        let cap = match get("cap") {
            Some((l, v)) => parse_num(l, "cap", v)?,
            None => 1_000_000,
        };
        let cfg = SweepConfig { n, m, forbidden, grid, trials, seed, methods, k, restarts, cap };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Domain(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return domain("m must be >= 2");
        }
        if self.n < self.m {
            return domain(format!("n = {} is smaller than m = {}", self.n, self.m));
        }
        if self.trials == 0 {
            return domain("trials must be >= 1");
        }
        if self.restarts == 0 {
            return domain("restarts must be >= 1");
        }
        if self.cap == 0 {
            return domain("cap must be >= 1");
        }
        if self.methods.is_empty() {
            return domain("methods must be nonempty");
        }
        for spec in &self.grid {
            if spec.resolve(self.n)?.is_zero() {
                return domain(format!("probability {spec} is zero at n = {}", self.n));
            }
        }
        Ok(())
    }

    /// Seed of the host sample for `trial` at grid point `point`.
    pub fn trial_seed(&self, point: usize, trial: usize) -> u64 {
        self.seed ^ ((point as u64) << 32) ^ trial as u64
    }
}

/// One CSV record. Counts are absent when the method failed.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub point: usize,
    pub n: usize,
    pub a: Option<ExactRational>,
    pub p: ExactRational,
    pub trial: usize,
    pub seed: u64,
    pub host_cliques: u64,
    pub expected_cliques: ExactRational,
    pub method: Method,
    pub surviving_cliques: Option<u64>,
    pub partite_prediction: ExactRational,
    pub wall_ms: Option<u128>,
    pub status: String,
}

pub const SWEEP_HEADER: &str = "n,a,p,trial,seed,host_cliques,expected_cliques,method,surviving_cliques,ratio_to_host,ratio_to_partite_prediction,wall_ms,status";

impl SweepRow {
    pub fn ratio_to_host(&self) -> Option<f64> {
        let s = self.surviving_cliques?;
        (self.host_cliques > 0).then(|| s as f64 / self.host_cliques as f64)
    }

    pub fn ratio_to_partite_prediction(&self) -> Option<f64> {
        let s = self.surviving_cliques?;
        (!self.partite_prediction.is_zero())
            .then(|| (&ExactRational::from_integer(s as i64) / &self.partite_prediction).to_f64())
    }

    pub fn csv(&self) -> String {
        let opt = |x: Option<String>| x.unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            opt(self.a.as_ref().map(|a| a.to_string())),
            self.p.to_f64(),
            self.trial,
            self.seed,
            self.host_cliques,
            self.expected_cliques.to_f64(),
            self.method,
            opt(self.surviving_cliques.map(|s| s.to_string())),
            opt(self.ratio_to_host().map(|r| r.to_string())),
            opt(self.ratio_to_partite_prediction().map(|r| r.to_string())),
            opt(self.wall_ms.map(|w| w.to_string())),
            self.status
        )
    }
}

/// `C(k-1, m) · (n/(k-1))^m · p^{C(m,2)}`.
pub fn partite_prediction(n: usize, k: usize, m: usize, p: &ExactRational) -> Result<ExactRational> {
    if k < 2 {
        return domain("k must be >= 2");
    }
    let parts = k as i64 - 1;
    let choose = ExactRational::from_big(binomial(parts as u64, m as u64), 1.into())?;
    let side = ExactRational::new(n as i64, parts)?.pow(m as u32);
    Ok(&(&choose * &side) * &p.pow((m * (m - 1) / 2) as u32))
}

/// Everything a sweep needs besides the config.
pub struct SweepContext {
    pub forbidden: Graph,
    pub k: usize,
    /// Whether `χ(H) ≥ k` has been established.
    pub chromatic_at_least_k: bool,
    pub exponents: CriticalExponents,
}

impl SweepContext {
    pub fn new(cfg: &SweepConfig, forbidden: Graph) -> Result<Self> {
        let exponents = critical_exponents(cfg.m, &forbidden)?;
        let chi = chromatic_number(&forbidden, Budget::seconds(CHROMATIC_BUDGET_SECS)).map(|(c, _)| c);
        let (k, chromatic_at_least_k) = match (cfg.k, chi) {
            (Some(k), Ok(chi)) => (k, chi >= k),
            (Some(k), Err(_)) => (k, false),
            (None, Ok(chi)) => (chi, true),
            (None, Err(e)) => return Err(e),
        };
        Ok(SweepContext { forbidden, k, chromatic_at_least_k, exponents })
    }

    pub fn load(cfg: &SweepConfig) -> Result<Self> {
        let text = std::fs::read_to_string(&cfg.forbidden)
            .map_err(|e| Error::Domain(format!("{}: {e}", cfg.forbidden.display())))?;
        Self::new(cfg, read_edge_list(&text)?)
    }
}

fn run_method(cfg: &SweepConfig, ctx: &SweepContext, host: &Graph, method: Method, seed: u64) -> Result<ExtremalResult> {
    match method {
        Method::Exact => exact_max_hfree_cliques(host, &ctx.forbidden, cfg.m, ExactBudget::default()),
        Method::Delete => deletion_heuristic(host, &ctx.forbidden, cfg.m, cfg.cap),
        Method::Partite => {
            let mut r = partite_heuristic(host, ctx.k, cfg.m, cfg.restarts, seed)?;
            if !ctx.chromatic_at_least_k {
                certify_partite(&mut r, &ctx.forbidden, ctx.k, Budget::seconds(CHROMATIC_BUDGET_SECS))?;
            }
            Ok(r)
        }
    }
}

fn sanitize(msg: &str) -> String {
    msg.chars().map(|c| if c == ',' || c == '\n' || c == '\r' { ';' } else { c }).collect()
}

/// All rows of a sweep, sorted. `timing` fills the `wall_ms` column.
pub fn run_sweep(cfg: &SweepConfig, ctx: &SweepContext, timing: bool) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let mut points = Vec::with_capacity(cfg.grid.len());
    for spec in &cfg.grid {
        let p = spec.resolve(cfg.n)?;
        let expected = expected_clique_count(cfg.n, &p, cfg.m)?;
        let prediction = partite_prediction(cfg.n, ctx.k, cfg.m, &p)?;
        points.push((spec.exponent().cloned(), p, expected, prediction));
    }
    let tasks: Vec<(usize, usize)> =
        (0..points.len()).flat_map(|i| (0..cfg.trials).map(move |t| (i, t))).collect();
    let mut rows: Vec<SweepRow> = tasks
        .par_iter()
        .map(|&(point, trial)| -> Result<Vec<SweepRow>> {
            let (a, p, expected, prediction) = &points[point];
            let seed = cfg.trial_seed(point, trial);
            let host = sample_gnp(cfg.n, p, seed)?;
            let host_cliques = clique_total(&host, cfg.m)?;
            Ok(cfg
                .methods
                .iter()
                .map(|&method| {
                    let start = Instant::now();
                    let outcome = run_method(cfg, ctx, &host, method, seed);
                    let wall_ms = timing.then(|| start.elapsed().as_millis());
                    let (surviving_cliques, status) = match outcome {
                        Ok(r) if r.h_free_certified => (Some(r.clique_count), "ok".to_string()),
                        Ok(r) => (Some(r.clique_count), "uncertified".to_string()),
                        Err(e) => (None, format!("error: {}", sanitize(&e.to_string()))),
                    };
                    SweepRow {
                        point,
                        n: cfg.n,
                        a: a.clone(),
                        p: p.clone(),
                        trial,
                        seed,
                        host_cliques,
                        expected_cliques: expected.clone(),
                        method,
                        surviving_cliques,
                        partite_prediction: prediction.clone(),
                        wall_ms,
                        status,
                    }
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    rows.sort_by_key(|r| (r.point, r.trial, r.method));
    Ok(rows)
}

/// Header plus one line per row, LF-terminated.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv());
        out.push('\n');
    }
    out
}

/// Instances above this many vertices are skipped by the trend table.
pub const TREND_VERTEX_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrendRow {
    pub t: usize,
    pub vertices: usize,
    pub m2: Option<ExactRational>,
    pub witness_size: Option<usize>,
    /// `(1 + k³/t) · (k+1)(k-2)/(2(k-1))`.
    pub bound: ExactRational,
    pub skipped: bool,
}

impl TrendRow {
    pub const CSV_HEADER: &'static str = "t,vertices,m2,witness_size,bound,status";

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.t,
            self.vertices,
            self.m2.as_ref().map(|x| x.to_string()).unwrap_or_default(),
            self.witness_size.map(|x| x.to_string()).unwrap_or_default(),
            self.bound,
            if self.skipped { "skipped" } else { "ok" }
        )
    }
}

/// Parametric `m₂` and its witness size for `sparse_k_chromatic(k, t)`.
pub fn witness_trend(k: usize, t_list: &[usize]) -> Result<Vec<TrendRow>> {
    t_list
        .iter()
        .map(|&t| {
            ConstructionParams::new(k, t)?;
            let eps = ExactRational::new((k * k * k) as i64, t as i64)?;
            let bound = &(&ExactRational::one() + &eps) * &ky_bound(k);
            let vertices = sparse_vertex_count(k, t);
            if vertices > TREND_VERTEX_CAP {
                return Ok(TrendRow { t, vertices, m2: None, witness_size: None, bound, skipped: true });
            }
            let g = sparse_k_chromatic(k, t)?;
            let report = m2(&g, true)?;
            Ok(TrendRow {
                t,
                vertices: g.vertex_count(),
                m2: Some(report.value),
                witness_size: Some(report.witness.len()),
                bound,
                skipped: false,
            })
        })
        .collect()
}

/// `k + C(k,2) · k·t·(k-1)`: the skeleton plus each supercomplex's
/// non-base vertices.
fn sparse_vertex_count(k: usize, t: usize) -> usize {
    let per_copy = k * t * (k - 1);
    k + (k * (k - 1) / 2) * per_copy
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::complete_graph;

    fn cfg(text: &str) -> Result<SweepConfig> {
        SweepConfig::parse(text, Path::new("/cfg"))
    }

    #[test]
    fn config_grammar() {
        let c = cfg("# sweep\nn = 60\nm=3\nforbidden = k4.txt\nexponents = 0.3, 1/2 ,0.7\ntrials=5\nseed=9\nmethods = delete, partite # both\n").unwrap();
        assert_eq!(c.forbidden, PathBuf::from("/cfg/k4.txt"));
        assert_eq!(c.grid.len(), 3);
        assert_eq!(c.grid[1], PSpec::Exponent(ExactRational::new(1, 2).unwrap()));
        assert_eq!(c.methods, vec![Method::Partite, Method::Delete]);
        assert_eq!((c.trials, c.seed, c.restarts, c.k), (5, 9, 4, None));

        let c = cfg("n=8\nm=3\nforbidden=/abs/h\np=1/2\nexact=true\nmethods=delete\n").unwrap();
        assert_eq!(c.forbidden, PathBuf::from("/abs/h"));
        assert_eq!(c.methods, vec![Method::Exact, Method::Delete]);
    }

    #[test]
    fn config_errors() {
        let base = "n=60\nm=3\nforbidden=h\n";
        for (extra, line) in [
            ("exponents=0.5\nbogus=1\n", 5),
            ("exponents=0.5\np=1/2\n", 5),
            ("p=0\n", 4),
            ("p=3/2\n", 4),
            ("exponents=-1\n", 4),
            ("exponents=0.5\nmethods=exact\n", 5),
            ("exponents=0.5\nexact=yes\n", 5),
            ("exponents=0.5\nn=3\n", 5),
            ("exponents=0.5\nno equals sign\n", 5),
        ] {
            match cfg(&format!("{base}{extra}")) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{extra}"),
                other => panic!("{extra}: {other:?}"),
            }
        }
        assert!(cfg("n=60\nm=3\nforbidden=h\nexponents=0.5\ntrials=0\n").is_err());
        assert!(cfg("n=60\nm=3\nforbidden=h\n").is_err());
    }

    #[test]
    fn sweep_shape_and_order() {
        let c = cfg("n=30\nm=3\nforbidden=h\nexponents=0.3,0.5,0.7\ntrials=5\nseed=1\nmethods=partite,delete\n").unwrap();
        let ctx = SweepContext::new(&c, complete_graph(4).unwrap()).unwrap();
        assert_eq!(ctx.k, 4);
        let rows = run_sweep(&c, &ctx, false).unwrap();
        assert_eq!(rows.len(), 30);
        let csv = sweep_csv(&rows);
        assert_eq!(csv.lines().count(), 31);
        assert_eq!(csv, sweep_csv(&run_sweep(&c, &ctx, false).unwrap()));
        for r in &rows {
            let s = r.surviving_cliques.unwrap();
            assert!(s <= r.host_cliques);
            assert_eq!(r.status, "ok");
        }
        let keys: Vec<_> = rows.iter().map(|r| (r.point, r.trial, r.method)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn prediction_arithmetic() {
        // C(3,3) (60/3)³ (1/2)³ = 1000.
        let p = ExactRational::new(1, 2).unwrap();
        assert_eq!(partite_prediction(60, 4, 3, &p).unwrap(), ExactRational::from_integer(1000));
    }

    #[test]
    fn trend_vertex_counts() {
        assert_eq!(sparse_vertex_count(4, 1), 76);
        assert_eq!(sparse_vertex_count(4, 2), 148);
    }
}
