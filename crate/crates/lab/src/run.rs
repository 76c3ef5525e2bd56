use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anosov_core::classical::{
    dynamical_variance, pressure_curve, rate_function, topological_pressure, TrigPolynomial,
};
use anosov_core::entropy::{
    build_partition, limit_entropy_estimate, norm_decay_scan, observability_constant,
    subadditivity_check, survivor_set, uncertainty_check, uncertainty_constant, QuantumPartition,
    SmoothPartition,
};
use anosov_core::measures::{
    deviation_rate_report, family_measures, family_statistics, gof_eigenbasis, gof_random,
};
use anosov_core::quantum::{egorov_defect_unbounded, CatPropagator, PlanckData, QuantumState};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{linspace, ExperimentConfig, Kind};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Setup(String),
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TaskRecord {
    pub cell: String,
    pub status: &'static str,
    pub seconds: f64,
    pub rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub code_version: &'static str,
    pub kind: String,
    pub seed: u64,
    pub threads: usize,
    pub tasks: Vec<TaskRecord>,
    pub outputs: Vec<String>,
    pub summary: Map<String, Value>,
}

impl RunManifest {
    pub fn skipped(&self) -> impl Iterator<Item = &TaskRecord> {
        self.tasks.iter().filter(|t| t.status != "ok")
    }
}

/// One table: file name, header, rows.
struct Table {
    name: String,
    header: String,
    rows: Vec<String>,
}

struct CellOutput {
    rows: Vec<Vec<String>>,
    summary: Map<String, Value>,
}

/// Writes `bytes` to `path` through a sibling temp file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    write_atomic_with(path, |f| f.write_all(bytes))
}

/// As [`write_atomic`], with the body produced by a writer callback. If the
/// callback fails the temp file is removed and `path` is left untouched.
pub fn write_atomic_with(
    path: &Path,
    body: impl FnOnce(&mut std::fs::File) -> std::io::Result<()>,
) -> Result<(), RunError> {
    let io = |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    };
    let name = path
        .file_name()
        .ok_or_else(|| RunError::Setup(format!("{} has no file name", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        body(&mut f)?;
        f.sync_all()
    })();
    if let Err(e) = result {
        let _ = std::fs::remove_file(&tmp);
        return Err(io(e));
    }
    std::fs::rename(&tmp, path).map_err(io)
}

pub fn num(x: f64) -> String {
    // −0 prints as "-0"
    format!("{:.12e}", x + 0.0)
}

/// Runs every (experiment, N) cell on a pool of `threads` workers and writes
/// CSVs, then `manifest.json`.
pub fn run(cfg: &ExperimentConfig, threads: usize) -> Result<RunManifest, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| RunError::Setup(e.to_string()))?;
    pool.install(|| run_inner(cfg, threads.max(1)))
}

fn run_inner(cfg: &ExperimentConfig, threads: usize) -> Result<RunManifest, RunError> {
    std::fs::create_dir_all(&cfg.out).map_err(|source| RunError::Io {
        path: cfg.out.clone(),
        source,
    })?;
    let hash = cfg.hash();
    let partition = if matches!(
        cfg.kind,
        Kind::Uncertainty | Kind::NormDecay | Kind::Subadditivity | Kind::Entropy
    ) {
        let p = cfg.partition;
        Some(build_partition(p.k, p.width, p.band).map_err(|e| RunError::Setup(e.to_string()))?)
    } else {
        None
    };

    let cells: Vec<(String, usize)> = match cfg.kind {
        Kind::Pressure => (1..=cfg.order).map(|m| (format!("order={m}"), m)).collect(),
        Kind::Rate | Kind::Variance | Kind::Survivor => vec![(cfg.kind.name().to_string(), 0)],
        _ => cfg.dims.iter().map(|&n| (format!("N={n}"), n)).collect(),
    };
    let results: Vec<(Result<CellOutput, String>, f64)> = cells
        .par_iter()
        .map(|(_, param)| {
            let t0 = Instant::now();
            let r = run_cell(cfg, *param, partition.as_ref()).map_err(|e| e.to_string());
            (r, t0.elapsed().as_secs_f64())
        })
        .collect();

    let mut tables = headers(cfg);
    let mut tasks = Vec::new();
    let mut summary = Map::new();
    for ((label, _), (res, seconds)) in cells.iter().zip(&results) {
        match res {
            Ok(out) => {
                let mut rows = 0;
                for (t, r) in tables.iter_mut().zip(&out.rows) {
                    rows += r.len();
                    t.rows.extend(r.iter().cloned());
                }
                if !out.summary.is_empty() {
                    summary.insert(label.clone(), Value::Object(out.summary.clone()));
                }
                tasks.push(TaskRecord {
                    cell: label.clone(),
                    status: "ok",
                    seconds: *seconds,
                    rows,
                    error: None,
                });
            }
            Err(e) => tasks.push(TaskRecord {
                cell: label.clone(),
                status: "skipped",
                seconds: *seconds,
                rows: 0,
                error: Some(e.clone()),
            }),
        }
    }
    if cfg.kind == Kind::Deviation {
        summary.insert("rate_reports".into(), deviation_summary(cfg, &tables[0]));
    }

    let mut outputs = Vec::new();
    for t in &tables {
        let mut text = format!("# config_hash={hash}\n{}\n", t.header);
        for r in &t.rows {
            text.push_str(r);
            text.push('\n');
        }
        write_atomic(&cfg.out.join(&t.name), text.as_bytes())?;
        outputs.push(t.name.clone());
    }
    let manifest = RunManifest {
        config_hash: hash,
        code_version: env!("CARGO_PKG_VERSION"),
        kind: cfg.kind.name().into(),
        seed: cfg.seed,
        threads,
        tasks,
        outputs,
        summary,
    };
    let body = serde_json::to_vec_pretty(&manifest).map_err(|e| RunError::Setup(e.to_string()))?;
    write_atomic(&cfg.out.join("manifest.json"), &body)?;
    Ok(manifest)
}

fn headers(cfg: &ExperimentConfig) -> Vec<Table> {
    let t = |name: &str, header: &str| Table {
        name: name.into(),
        header: header.into(),
        rows: Vec::new(),
    };
    match cfg.kind {
        Kind::Pressure => vec![t(
            "pressure.csv",
            "n,fixed_points,p_zero,p_unstable,p_observable",
        )],
        Kind::Rate => vec![
            t("pressure_curve.csv", "s,pressure"),
            t("rate.csv", "delta,rate,minimizer_s,attainable"),
        ],
        Kind::Variance => vec![t("variance.csv", "quantity,value")],
        Kind::Deviation => vec![t(
            "deviation.csv",
            "N,hbar,delta,prob,mean,second_moment,chebyshev_bound",
        )],
        Kind::Egorov => vec![t("egorov.csv", "N,n,defect")],
        Kind::Uncertainty => vec![t("uncertainty.csv", "N,n,c,state,lhs,bound,gap,holds")],
        Kind::NormDecay => vec![t("norm_decay.csv", "N,n,c,predicted,nodes")],
        Kind::Subadditivity => vec![t("subadditivity.csv", "N,state,r_plus,r_minus,defect")],
        Kind::Observability => vec![t("observability.csv", "N,T,lambda_min,constant")],
        Kind::Survivor => vec![t("survivor.csv", "x,xi")],
        Kind::Entropy => vec![t("entropy.csv", "N,state,h_plus_rate,h_minus_rate")],
    }
}

fn observable(cfg: &ExperimentConfig) -> anosov_core::Result<&TrigPolynomial> {
    cfg.observable.as_ref().ok_or_else(|| {
        anosov_core::Error::InvalidArgument(format!("{} needs an observable", cfg.kind))
    })
}

fn random_states(
    plk: PlanckData,
    count: usize,
    seed: u64,
) -> anosov_core::Result<Vec<QuantumState>> {
    gof_random(plk, count, seed)?
        .states
        .into_iter()
        .map(|s| QuantumState::new(plk, s))
        .collect()
}

fn run_cell(
    cfg: &ExperimentConfig,
    param: usize,
    partition: Option<&SmoothPartition>,
) -> anosov_core::Result<CellOutput> {
    let map = &cfg.map;
    let mut rows: Vec<Vec<String>> = vec![Vec::new()];
    let mut summary = Map::new();
    if cfg.kind == Kind::Pressure {
        let m = param;
        let zero = topological_pressure(map, &TrigPolynomial::zero(), m)?;
        let unstable = topological_pressure(map, &TrigPolynomial::constant(-map.log_lambda()), m)?;
        let obs = match &cfg.observable {
            Some(a) => num(topological_pressure(map, a, m)?.value),
            None => String::new(),
        };
        rows[0].push(format!(
            "{m},{},{},{},{obs}",
            zero.fixed_points,
            num(zero.value),
            num(unstable.value)
        ));
        return Ok(CellOutput { rows, summary });
    }
    if cfg.kind == Kind::Rate {
        let a = observable(cfg)?;
        let curve = pressure_curve(map, a, &cfg.s_grid, cfg.order)?;
        let rate = rate_function(&curve, &cfg.deltas)?;
        let curve_rows = curve
            .s_grid
            .iter()
            .zip(&curve.values)
            .map(|(s, p)| format!("{},{}", num(*s), num(*p)))
            .collect();
        let rate_rows = (0..rate.delta_grid.len())
            .map(|i| {
                format!(
                    "{},{},{},{}",
                    num(rate.delta_grid[i]),
                    num(rate.values[i]),
                    num(rate.minimizer_s[i]),
                    rate.attainable[i]
                )
            })
            .collect();
        return Ok(CellOutput {
            rows: vec![curve_rows, rate_rows],
            summary,
        });
    }
    if cfg.kind == Kind::Variance {
        let a = observable(cfg)?;
        let var = dynamical_variance(map, a, cfg.order.max(1))?;
        let curve = pressure_curve(map, a, &linspace(-0.05, 0.05, 3), cfg.order)?;
        rows[0].push(format!("dynamical_variance,{}", num(var)));
        rows[0].push(format!(
            "pressure_second_difference,{}",
            num(curve.second_difference(0.05))
        ));
        return Ok(CellOutput { rows, summary });
    }
    if cfg.kind == Kind::Survivor {
        let a = observable(cfg)?;
        let rep = survivor_set(a, cfg.steps, cfg.resolution, map)?;
        rows[0] = rep.points.iter().map(|(x, y)| format!("{x},{y}")).collect();
        summary.insert("count".into(), json!(rep.count()));
        summary.insert("dimension".into(), json!(rep.dimension));
        summary.insert("hypothesis_holds".into(), json!(rep.hypothesis_holds));
        summary.insert("entropy_estimate".into(), json!(rep.entropy_estimate));
        return Ok(CellOutput { rows, summary });
    }

    let n = param;
    let plk = PlanckData::new(n)?;
    let prop = CatPropagator::new(map, plk)?;
    let qp = match partition {
        Some(p) => Some(QuantumPartition::new(p, &prop)?),
        None => None,
    };
    let seed = cfg.seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    match cfg.kind {
        Kind::Deviation => {
            let a = observable(cfg)?;
            let fam = gof_eigenbasis(&prop.operator())?;
            let theta = cfg.theta.weights(plk)?;
            let measures = family_measures(&fam, a, &theta, &prop)?;
            for &delta in &cfg.deltas {
                let st = family_statistics(&measures, &fam.probabilities, delta)?;
                rows[0].push(format!(
                    "{n},{},{},{},{},{},{}",
                    num(plk.hbar()),
                    num(delta),
                    num(st.probability),
                    num(st.mean),
                    num(st.second_moment),
                    num(st.chebyshev_bound)
                ));
            }
        }
        Kind::Egorov => {
            let a = observable(cfg)?;
            for k in 1..=cfg.steps {
                let d = egorov_defect_unbounded(a, k, map, plk)?;
                rows[0].push(format!("{n},{k},{}", num(d)));
            }
        }
        Kind::Uncertainty => {
            let qp = qp.as_ref().expect("partition");
            let states = random_states(plk, cfg.states, seed)?;
            let mut holds = true;
            for k in 1..=cfg.steps {
                let c = uncertainty_constant(qp, k)?;
                for (i, u) in states.iter().enumerate() {
                    let r = uncertainty_check(u, qp, &c)?;
                    holds &= r.holds;
                    rows[0].push(format!(
                        "{n},{k},{},{i},{},{},{},{}",
                        num(c.value),
                        num(r.lhs),
                        num(r.bound),
                        num(r.gap),
                        r.holds
                    ));
                }
            }
            summary.insert("all_hold".into(), json!(holds));
        }
        Kind::NormDecay => {
            let qp = qp.as_ref().expect("partition");
            let rep = norm_decay_scan(qp, 0..=cfg.steps)?;
            for r in &rep.rows {
                rows[0].push(format!(
                    "{n},{},{},{},{}",
                    r.n,
                    num(r.value),
                    num(r.predicted),
                    r.nodes
                ));
            }
            summary.insert("fitted_rate".into(), json!(rep.fitted_rate));
            summary.insert("predicted_rate".into(), json!(rep.predicted_rate));
            summary.insert("ehrenfest".into(), json!(rep.ehrenfest));
        }
        Kind::Subadditivity => {
            let qp = qp.as_ref().expect("partition");
            let mut worst: f64 = 0.0;
            for (i, u) in random_states(plk, cfg.states, seed)?.iter().enumerate() {
                let r = subadditivity_check(u, cfg.split.0, cfg.split.1, qp)?;
                worst = worst.max(r.defect);
                rows[0].push(format!(
                    "{n},{i},{},{},{}",
                    num(r.r_plus),
                    num(r.r_minus),
                    num(r.defect)
                ));
            }
            summary.insert("max_defect".into(), json!(worst));
        }
        Kind::Observability => {
            let a = observable(cfg)?;
            let rep = observability_constant(a, cfg.steps, &prop)?;
            rows[0].push(format!(
                "{n},{},{},{}",
                cfg.steps,
                num(rep.lambda_min),
                num(rep.constant)
            ));
            summary.insert("observable".into(), json!(rep.observable));
        }
        Kind::Entropy => {
            let qp = qp.as_ref().expect("partition");
            let states = random_states(plk, cfg.states, seed)?;
            let rep = limit_entropy_estimate(&[(qp, &states)], cfg.steps)?;
            for r in &rep.rows {
                rows[0].push(format!(
                    "{n},{},{},{}",
                    r.state,
                    num(r.h_plus_rate),
                    num(r.h_minus_rate)
                ));
            }
            summary.insert("lower_target".into(), json!(rep.lower_target));
        }
        _ => unreachable!("single-cell kinds return early"),
    }
    Ok(CellOutput { rows, summary })
}

/// Slope of log ℙ against log ℏ per δ, when at least four N values completed.
fn deviation_summary(cfg: &ExperimentConfig, table: &Table) -> Value {
    let Some(a) = cfg.observable.as_ref() else {
        return Value::Null;
    };
    let rate = pressure_curve(&cfg.map, a, &cfg.s_grid, cfg.order)
        .and_then(|c| rate_function(&c, &cfg.deltas));
    let rate = match rate {
        Ok(r) => r,
        Err(e) => return json!({ "error": e.to_string() }),
    };
    let mut out = Vec::new();
    for &delta in &cfg.deltas {
        let scan: Vec<(usize, f64)> = table
            .rows
            .iter()
            .filter_map(|r| {
                let f: Vec<&str> = r.split(',').collect();
                let d: f64 = f[2].parse().ok()?;
                ((d - delta).abs() <= 1e-12 * delta.abs().max(1.0))
                    .then(|| Some((f[0].parse().ok()?, f[3].parse().ok()?)))?
            })
            .collect();
        out.push(match deviation_rate_report(&scan, delta, &rate, &cfg.map) {
            Ok(r) => json!({
                "delta": delta,
                "slope": r.slope,
                "bound": r.bound,
                "bound_half": r.bound_half,
                "consistent": r.consistent,
                "below_resolution": r.below_resolution,
            }),
            Err(e) => json!({ "delta": delta, "error": e.to_string() }),
        });
    }
    Value::Array(out)
}
