//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod oracle;

use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use dnnd_core::cuts::apply_cut;
use dnnd_core::dataset::{generate_gaussian_mixture, write_csv, GaussianMixtureConfig};
use dnnd_core::eval::cluster_stats;
use dnnd_core::pipeline::{bottom_up, Structure};
use dnnd_core::{
    build_knn, dnnd, graph_ga, kernel_density, nd, nnd_layer, rl_delta, CutSpec, Dataset,
    DistanceMatrix, InTree, Method, Metric, PairwiseDistances, ParentLinks, PotentialConfig,
    PotentialVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const IT_INSTANCES: usize = 500;
const IT_MAX_N: usize = 300;
const IT_MAX_DIM: usize = 10;
const IT_BUDGET: Duration = Duration::from_secs(60);

const ORACLE_INSTANCES: usize = 100;
const ORACLE_MAX_N: usize = 200;

const GAUSS_DIMS: [usize; 5] = [32, 64, 256, 512, 1024];
const GAUSS_POINTS: usize = 1024;
const GAUSS_COMPONENTS: usize = 16;
const GAUSS_SEPARATION: f64 = 10.0;
const GAUSS_KS: [usize; 2] = [5, 500];
const GAUSS_SIGMAS: [f64; 2] = [1.0, 100_000.0];
const GAUSS_MAX_ERROR: f64 = 0.0;
const GAUSS_NONSINGLETON: (usize, usize) = (16, 18);
const GAUSS_BUDGET_PER_DATASET: Duration = Duration::from_secs(30);

const BLOBS_POINTS: usize = 5000;
const BLOBS_COMPONENTS: usize = 15;
// Close enough that the tails overlap, so the error is small but non-zero.
const BLOBS_SEPARATION: f64 = 5.0;
const BLOBS_KS: [usize; 3] = [2, 10, 40];
const BLOBS_SIGMAS: [f64; 3] = [0.1, 100.0, 10_000.0];
const BLOBS_CUT: usize = 14;
const BLOBS_MAX_MEAN_ERROR: f64 = 0.01;
const BLOBS_BUDGET: Duration = Duration::from_secs(120);

const IDENTITY_INSTANCES: usize = 50;
const CUT_INSTANCES: usize = 200;

const USPS_POINTS: usize = 11_000;
const USPS_DIM: usize = 256;
const USPS_BUDGET: Duration = Duration::from_secs(300);

type Verdict = Result<String, String>;

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, name: &str, f: impl FnOnce() -> Verdict) {
        let start = Instant::now();
        let verdict = f();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                self.failures += 1;
                println!("FAIL {name}: {detail} [{secs:.1}s]");
            }
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, dim: usize, grid: bool) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    if grid {
                        f64::from(rng.random_range(0..5))
                    } else {
                        rng.random_range(-10.0..10.0)
                    }
                })
                .collect()
        })
        .collect()
}

/// Acyclic and every node reaches a self-loop.
fn is_forest(parent: &[usize]) -> bool {
    let n = parent.len();
    parent.iter().all(|&p| p < n)
        && (0..n).all(|start| {
            let mut v = start;
            for _ in 0..n {
                v = parent[v];
            }
            parent[v] == v
        })
}

fn it_validity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut checked = 0;
    for case in 0..IT_INSTANCES {
        let n = rng.random_range(1..=IT_MAX_N);
        let dim = rng.random_range(1..=IT_MAX_DIM);
        let k = if n == 1 { 1 } else { rng.random_range(1..n) };
        let grid = rng.random_bool(0.3);
        let data = Dataset::from_rows(random_points(&mut rng, n, dim, grid), None).unwrap();
        let metric = if case % 2 == 0 { Metric::Euclidean } else { Metric::Cosine };
        let potential = if case % 4 < 2 {
            PotentialConfig::sum_distance()
        } else {
            PotentialConfig::exp_kernel([0.1, 1.0, 10.0][case % 3]).unwrap()
        };
        let dist = PairwiseDistances::new(&data, metric);
        for method in [Method::Dnnd, Method::Nd, Method::Hnnd, Method::GraphGa] {
            let built = bottom_up(&dist, method, k, &potential)
                .map_err(|e| format!("case {case} {method}: {e}"))?;
            match &built.structure {
                Structure::Tree(t) => ensure(oracle::is_intree(t.parents()), || {
                    format!("case {case} {method} (n={n}, k={k}, {metric}, {}): not an in-tree", potential.mode)
                })?,
                Structure::Forest(f) => ensure(is_forest(f.parents()), || {
                    format!("case {case} graphga (n={n}, k={k}): not a forest")
                })?,
            }
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < IT_BUDGET, || format!("took {elapsed:?}, budget {IT_BUDGET:?}"))?;
    Ok(format!("{checked} structures from {IT_INSTANCES} instances"))
}

fn oracle_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..ORACLE_INSTANCES {
        let n = rng.random_range(2..=ORACLE_MAX_N);
        let dim = rng.random_range(1..=6);
        let pts = random_points(&mut rng, n, dim, case % 2 == 0);
        let d = oracle::euclidean_matrix(&pts);
        let m = DistanceMatrix::from_square(d.clone()).unwrap();
        let k = rng.random_range(1..n);
        let all: Vec<usize> = (0..n).collect();
        let graph = build_knn(&all, &m, k);

        for i in 0..n {
            let got: Vec<usize> = graph.neighbors(i).unwrap().iter().map(|nb| nb.id).collect();
            ensure(got == oracle::knn(&d, &all, i, k), || format!("case {case}: kNN list of {i}"))?;
        }

        let p: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(0..6))).collect();
        let pv = PotentialVector::from_vec(p.clone()).unwrap();
        let layer = nnd_layer(&graph, &pv);
        let mut nnd_parent: Vec<usize> = (0..n).collect();
        for l in &layer.links {
            nnd_parent[l.node] = l.parent;
        }
        let nnd_oracle: Vec<usize> = (0..n)
            .map(|i| {
                oracle::knn(&d, &all, i, k)
                    .into_iter()
                    .find(|&j| oracle::before(&p, j, i))
                    .unwrap_or(i)
            })
            .collect();
        ensure(nnd_parent == nnd_oracle, || format!("case {case}: nnd_layer"))?;

        let tree = nd(&m, &pv).map_err(|e| e.to_string())?;
        ensure(tree.parents() == oracle::nd(&d, &p), || format!("case {case}: nd"))?;

        let rho = if case % 3 == 0 {
            p.iter().map(|v| -v).collect()
        } else {
            kernel_density(&m, [0.5, 2.0][case % 2]).unwrap()
        };
        let forest = graph_ga(&graph, &rho).map_err(|e| e.to_string())?;
        ensure(forest.parents() == oracle::graph_ga(&d, &rho, k), || format!("case {case}: graph_ga"))?;

        let delta = rl_delta(&rho, &m).map_err(|e| e.to_string())?;
        ensure(delta == oracle::delta(&d, &rho), || format!("case {case}: rl_delta"))?;
    }
    Ok(format!("{ORACLE_INSTANCES} instances, 5 operations each, exact"))
}

struct Traces(Vec<(String, Vec<usize>)>);

fn monotone(trace: &[usize]) -> bool {
    trace.windows(2).all(|w| w[1] < w[0]) && trace.last() == Some(&1)
}

fn gaussian_replication(traces: &mut Traces) -> Verdict {
    let mut summary = Vec::new();
    for (i, &dim) in GAUSS_DIMS.iter().enumerate() {
        let start = Instant::now();
        let data = generate_gaussian_mixture(&GaussianMixtureConfig {
            components: GAUSS_COMPONENTS,
            points: GAUSS_POINTS,
            dim,
            separation: GAUSS_SEPARATION,
            seed: 100 + i as u64,
        })
        .map_err(|e| e.to_string())?;
        let dist = PairwiseDistances::new(&data, Metric::Euclidean);
        let mut counts = Vec::new();
        for k in GAUSS_KS {
            for sigma in GAUSS_SIGMAS {
                let out = dnnd(&dist, k, &PotentialConfig::exp_kernel(sigma).unwrap()).map_err(|e| e.to_string())?;
                let trace = out.trace.root_counts();
                traces.0.push((format!("gauss d={dim} k={k} sigma={sigma}"), trace.clone()));
                let clustering = apply_cut(&out.tree, &out.potential, &CutSpec::default()).map_err(|e| e.to_string())?;
                let stats = cluster_stats(&clustering.labels, data.labels()).map_err(|e| e.to_string())?;
                let error = stats.error.unwrap();
                let cell = format!("d={dim} k={k} sigma={sigma}: error {error}, {} clusters ({} non-singleton), layers {trace:?}", stats.clusters, stats.clusters_nonsingleton);
                ensure(error <= GAUSS_MAX_ERROR, || cell.clone())?;
                ensure(
                    (GAUSS_NONSINGLETON.0..=GAUSS_NONSINGLETON.1).contains(&stats.clusters_nonsingleton),
                    || cell.clone(),
                )?;
                counts.push(stats.clusters);
            }
        }
        let elapsed = start.elapsed();
        ensure(elapsed < GAUSS_BUDGET_PER_DATASET, || {
            format!("d={dim} took {elapsed:?}, budget {GAUSS_BUDGET_PER_DATASET:?}")
        })?;
        summary.push(format!("d={dim} C={counts:?} {:.1}s", elapsed.as_secs_f64()));
    }
    Ok(format!("error 0 in all 20 runs; {}", summary.join("; ")))
}

fn blobs_replication(traces: &mut Traces) -> Verdict {
    let start = Instant::now();
    let data = generate_gaussian_mixture(&GaussianMixtureConfig {
        components: BLOBS_COMPONENTS,
        points: BLOBS_POINTS,
        dim: 2,
        separation: BLOBS_SEPARATION,
        seed: 15,
    })
    .map_err(|e| e.to_string())?
    .normalize_minmax();
    let dist = PairwiseDistances::new(&data, Metric::Euclidean);
    let mut errors = Vec::new();
    for k in BLOBS_KS {
        for sigma in BLOBS_SIGMAS {
            let out = dnnd(&dist, k, &PotentialConfig::exp_kernel(sigma).unwrap()).map_err(|e| e.to_string())?;
            traces.0.push((format!("blobs k={k} sigma={sigma}"), out.trace.root_counts()));
            let clustering = apply_cut(&out.tree, &out.potential, &CutSpec::TopK(BLOBS_CUT)).map_err(|e| e.to_string())?;
            let stats = cluster_stats(&clustering.labels, data.labels()).map_err(|e| e.to_string())?;
            errors.push(stats.error.unwrap());
        }
    }
    let elapsed = start.elapsed();
    let mean = errors.iter().sum::<f64>() / errors.len() as f64;
    let detail = format!("mean error {mean:.4} over {} cells, per cell {errors:?}", errors.len());
    ensure(mean <= BLOBS_MAX_MEAN_ERROR, || detail.clone())?;
    ensure(elapsed < BLOBS_BUDGET, || format!("took {elapsed:?}, budget {BLOBS_BUDGET:?}"))?;
    Ok(detail)
}

fn trace_monotonicity(traces: &Traces) -> Verdict {
    ensure(!traces.0.is_empty(), || "no traces were recorded".into())?;
    for (name, trace) in &traces.0 {
        ensure(monotone(trace), || format!("{name}: {trace:?}"))?;
    }
    let longest = traces.0.iter().max_by_key(|t| t.1.len()).unwrap();
    Ok(format!("{} runs strictly decreasing to 1; longest {} {:?}", traces.0.len(), longest.0, longest.1))
}

fn nnd_becomes_nd() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..IDENTITY_INSTANCES {
        let n = rng.random_range(2..=150);
        let dim = rng.random_range(1..=5);
        let pts = random_points(&mut rng, n, dim, case % 2 == 0);
        let data = Dataset::from_rows(pts, None).unwrap();
        let dist = PairwiseDistances::new(&data, Metric::Euclidean);
        let p = PotentialVector::from_vec((0..n).map(|_| f64::from(rng.random_range(0..8))).collect()).unwrap();
        let all: Vec<usize> = (0..n).collect();
        let layer = nnd_layer(&build_knn(&all, &dist, n - 1), &p);
        let reference = nd(&dist, &p).map_err(|e| e.to_string())?;
        ensure(layer.roots == vec![reference.root()], || format!("case {case}: roots differ"))?;
        for l in &layer.links {
            ensure(l.parent == reference.parent(l.node), || format!("case {case}: node {}", l.node))?;
        }
    }
    Ok(format!("{IDENTITY_INSTANCES} instances identical"))
}

fn random_intree(rng: &mut ChaCha8Rng, n: usize) -> InTree {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut parent: Vec<usize> = (0..n).collect();
    let mut weight = vec![f64::NEG_INFINITY; n];
    for pos in 1..n {
        parent[order[pos]] = order[rng.random_range(0..pos)];
        weight[order[pos]] = f64::from(rng.random_range(0..20));
    }
    InTree::new(parent, weight, vec![1; n]).unwrap()
}

fn cut_arithmetic() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..CUT_INSTANCES {
        let n = rng.random_range(1..=200);
        let tree = random_intree(&mut rng, n);
        let potential = PotentialVector::zeros(n);
        let k = rng.random_range(0..n);
        let c = apply_cut(&tree, &potential, &CutSpec::TopK(k)).map_err(|e| e.to_string())?;
        ensure(c.clusters == k + 1, || format!("case {case}: {} clusters after {k} cuts", c.clusters))?;
        let mut used = vec![false; c.clusters];
        for &l in &c.labels {
            ensure(l < c.clusters, || format!("case {case}: label {l} out of range"))?;
            used[l] = true;
        }
        ensure(c.labels.len() == n && used.iter().all(|&u| u), || format!("case {case}: not a partition"))?;
        let removed: Vec<usize> = dnnd_core::e_cut_rank(&tree).into_iter().take(k).map(|e| e.0).collect();
        let want = oracle::roots_after_cut(tree.parents(), &removed);
        ensure(oracle::same_partition(&c.labels, &want), || format!("case {case}: partition differs"))?;
    }
    Ok(format!("{CUT_INSTANCES} random trees"))
}

fn two_blob_golden() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("blobs.csv");
    let labels = dir.path().join("labels.csv");
    let graph = dir.path().join("graph.json");
    fs::write(&input, "0,a\n1,a\n2,a\n10,b\n11,b\n12,b\n").map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_dnnd"))
        .args(["cluster", "--has-labels", "--k", "2", "--mode", "sumdist", "--cut", "topk:1", "--input"])
        .arg(&input)
        .arg("--labels-out")
        .arg(&labels)
        .arg("--graph-out")
        .arg(&graph)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;

    let doc: dnnd_core::DecisionGraph =
        serde_json::from_str(&fs::read_to_string(&graph).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(doc.parent == [1, 1, 1, 4, 1, 4], || format!("parents {:?}", doc.parent))?;
    ensure(
        doc.edge_len == [Some(1.0), None, Some(1.0), Some(1.0), Some(10.0), Some(1.0)],
        || format!("edge lengths {:?}", doc.edge_len),
    )?;
    ensure(doc.potential == [3.0, 12.0, 3.0, 3.0, 12.0, 3.0], || format!("potentials {:?}", doc.potential))?;
    ensure(doc.trace == [2, 1], || format!("trace {:?}", doc.trace))?;

    let text = fs::read_to_string(&labels).map_err(|e| e.to_string())?;
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let predicted: Vec<usize> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    let truth: Vec<&str> = rows.iter().map(|r| r[2]).collect();
    let stats = cluster_stats(&predicted, Some(&truth)).map_err(|e| e.to_string())?;
    ensure(stats.clusters == 2 && stats.error == Some(0.0), || format!("{stats:?}"))?;
    Ok("traced tree, length-10 top edge at node 4, 2 clusters, error 0".into())
}

/// Not a primary criterion: an 11000 x 256 CSV clusters end to end under
/// the cosine metric within the time budget.
fn usps_scale() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("usps_like.csv");
    let mut data = generate_gaussian_mixture(&GaussianMixtureConfig {
        components: 10,
        points: USPS_POINTS,
        dim: USPS_DIM,
        separation: 10.0,
        seed: 11,
    })
    .map_err(|e| e.to_string())?;
    data = data.normalize_minmax();
    let mut buf = Vec::new();
    write_csv(&data, &mut buf).map_err(|e| e.to_string())?;
    fs::write(&input, buf).map_err(|e| e.to_string())?;

    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_dnnd"))
        .args(["cluster", "--has-labels", "--metric", "cosine", "--k", "10", "--cut", "topk:9", "--input"])
        .arg(&input)
        .arg("--labels-out")
        .arg(dir.path().join("labels.csv"))
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    ensure(elapsed < USPS_BUDGET, || format!("took {elapsed:?}, budget {USPS_BUDGET:?}"))?;
    Ok(String::from_utf8_lossy(&out.stderr).trim().to_string())
}

fn main() {
    let mut report = Report { failures: 0 };
    let mut traces = Traces(Vec::new());
    report.check("[PRIMARY] in-tree validity (500 random instances)", it_validity);
    report.check("[PRIMARY] oracle equivalence (kNN, NND layer, ND, Graph-GA, delta)", oracle_equivalence);
    report.check("[PRIMARY] 16-Gaussian replication: error 0, 16-18 non-singleton clusters", || {
        gaussian_replication(&mut traces)
    });
    report.check("[PRIMARY] 15-blob 2-D replication: mean error <= 0.01", || blobs_replication(&mut traces));
    report.check("[PRIMARY] trace monotonicity", || trace_monotonicity(&traces));
    report.check("[PRIMARY] NND with k = N-1 equals ND (50 instances)", nnd_becomes_nd);
    report.check("[PRIMARY] cut arithmetic: K removals give K+1 clusters", cut_arithmetic);
    report.check("[PRIMARY] two-blob golden pipeline through the CLI", two_blob_golden);
    report.check("[SCALE] 11000 x 256 cosine run under 5 minutes", usps_scale);

    if report.failures > 0 {
        println!("{} criteria failed", report.failures);
        std::process::exit(1);
    }
    println!("all criteria passed");
}
