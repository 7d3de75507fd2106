//! Rainbow perfect matchings of an edge-coloured `K_{2n}`: the flaw family of
//! monochromatic vertex-disjoint edge pairs, the closed-form parameters
//! `μ = 3/(4n²)` and `θ`, and Monte Carlo experiments against the tail bound.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::domain::rng::{self, RNG_NAME};
use crate::domain::{DependencyGraph, FlawId, Model};
use crate::engine::{run_trials, Executor, Strategy, TrialRecord};
use crate::error::{LllError, Result};
use crate::oracles::matching::{edge, Edge, Vertex};
use crate::oracles::{build_matching_instance, HostGraph, MatchingInitial, MatchingModel, MatchingState};

/// Wire form: `{"n": …, "edges": [[u, v, colour], …]}` with 0-based vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringFile {
    pub n: usize,
    pub edges: Vec<(Vertex, Vertex, u32)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// An edge colouring of `K_{2n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    n: usize,
    color: BTreeMap<Edge, u32>,
    q: usize,
}

impl ColoredGraph {
    /// Every pair of the `2n` vertices must be coloured exactly once.
    pub fn new(n: usize, edges: &[(Vertex, Vertex, u32)]) -> Result<Self> {
        if n < 2 {
            return Err(LllError::input("the rainbow problem needs 2n ≥ 4 vertices"));
        }
        let v = 2 * n as Vertex;
        let mut color = BTreeMap::new();
        for &(a, b, c) in edges {
            if a == b || a >= v || b >= v {
                return Err(LllError::input(format!("edge ({a},{b}) is not an edge of K_{}", 2 * n)));
            }
            if color.insert(edge(a, b), c).is_some() {
                return Err(LllError::input(format!("edge ({a},{b}) is coloured twice")));
            }
        }
        let want = n * (2 * n - 1);
        if color.len() != want {
            return Err(LllError::input(format!(
                "the colouring covers {} of the {want} edges; the graph must be complete",
                color.len()
            )));
        }
        let mut sizes: HashMap<u32, usize> = HashMap::new();
        for c in color.values() {
            *sizes.entry(*c).or_default() += 1;
        }
        let q = sizes.values().copied().max().unwrap_or(0);
        Ok(ColoredGraph { n, color, q })
    }

    pub fn from_file(f: &ColoringFile) -> Result<Self> {
        ColoredGraph::new(f.n, &f.edges)
    }

    pub fn to_file(&self, seed: Option<u64>) -> ColoringFile {
        ColoringFile { n: self.n, edges: self.color.iter().map(|(&(u, v), &c)| (u, v, c)).collect(), seed }
    }

    /// Half the number of vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest colour class.
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn color(&self, e: Edge) -> Option<u32> {
        self.color.get(&edge(e.0, e.1)).copied()
    }

    /// Colour classes in colour order, edges sorted.
    pub fn classes(&self) -> BTreeMap<u32, Vec<Edge>> {
        let mut out: BTreeMap<u32, Vec<Edge>> = BTreeMap::new();
        for (&e, &c) in &self.color {
            out.entry(c).or_default().push(e);
        }
        out
    }

    /// Monochromatic vertex-disjoint edge pairs, by colour and then edge order.
    pub fn monochromatic_pairs(&self) -> Vec<(u32, Edge, Edge)> {
        let mut out = Vec::new();
        for (c, es) in self.classes() {
            for (i, &a) in es.iter().enumerate() {
                for &b in &es[i + 1..] {
                    if a.0 != b.0 && a.0 != b.1 && a.1 != b.0 && a.1 != b.1 {
                        out.push((c, a, b));
                    }
                }
            }
        }
        out
    }

    pub fn is_rainbow(&self, s: &MatchingState) -> bool {
        let mut seen = std::collections::HashSet::new();
        s.edges().into_iter().all(|e| seen.insert(self.color[&e]))
    }
}

/// A random colouring whose classes all have exactly `q` edges, except the
/// last when `q` does not divide `n(2n−1)`.
pub fn generate_coloring(n: usize, q: usize, seed: u64) -> Result<ColoredGraph> {
    if q == 0 {
        return Err(LllError::input("q must be positive"));
    }
    if n < 2 {
        return Err(LllError::input("the rainbow problem needs 2n ≥ 4 vertices"));
    }
    let v = 2 * n as Vertex;
    let mut edges: Vec<Edge> = (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).collect();
    edges.shuffle(&mut rng::seeded(seed));
    let colored: Vec<(Vertex, Vertex, u32)> =
        edges.iter().enumerate().map(|(i, &(a, b))| (a, b, (i / q) as u32)).collect();
    ColoredGraph::new(n, &colored)
}

/// The matching model on `K_{2n}` with one flaw per monochromatic pair and
/// `ω^init = ω`.
pub struct RainbowInstance {
    pub graph: ColoredGraph,
    pub model: MatchingModel,
    pub dep: Arc<DependencyGraph>,
    /// `flaw_index[f] = (colour, e, e′)`.
    pub flaw_index: Vec<(u32, Edge, Edge)>,
}

pub fn build_rainbow_instance(g: &ColoredGraph) -> Result<RainbowInstance> {
    let host = HostGraph::complete(g.n)?;
    let flaw_index = g.monochromatic_pairs();
    let flaws: Vec<Vec<Edge>> = flaw_index.iter().map(|&(_, a, b)| vec![a, b]).collect();
    let (model, dep) = build_matching_instance(host, flaws, MatchingInitial::Uniform)?;
    Ok(RainbowInstance { graph: g.clone(), model, dep: Arc::new(dep), flaw_index })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RainbowParams {
    pub n: usize,
    pub q: usize,
    /// `q/n`.
    pub gamma: f64,
    pub mu: f64,
    pub theta: f64,
    pub a_f: u64,
    /// `(2n−3)(2n−1)μ`.
    pub beta: f64,
    pub flaw_count: usize,
    /// `|F|·ln(1+μ)/ln θ⁻¹` (sequential walk, `ω^init = ω`); zero when `F` is empty.
    pub t_seq: f64,
    /// `ln(|F|μ)/ln θ⁻¹` (rounds); zero when `F` is empty.
    pub t_par: f64,
    pub certified: bool,
}

/// `θ = (1 + (2n−1)(q−1)μ)⁴ / ((2n−3)(2n−1)μ)` with `μ = 3/(4n²)`, exactly.
pub fn theta_exact(n: usize, q: usize) -> BigRational {
    let big = |x: i64| BigRational::from_integer(BigInt::from(x));
    let (n, q) = (n as i64, q as i64);
    let mu = BigRational::new(BigInt::from(3), BigInt::from(4 * n * n));
    let base = big(1) + big((2 * n - 1) * (q - 1)) * &mu;
    let num = &base * &base * &base * &base;
    num / (big((2 * n - 3) * (2 * n - 1)) * mu)
}

/// `n_k = C(4,k)(2n−1)^k(q−1)^k`, the bound on independent subsets of
/// `Γ(f_M)` of size `k`.
pub fn nk_bound(n: usize, q: usize, k: u32) -> u128 {
    let binom = [1u128, 4, 6, 4, 1];
    if k > 4 {
        return 0;
    }
    binom[k as usize] * ((2 * n as u128 - 1) * (q as u128).saturating_sub(1)).pow(k)
}

/// Closed-form parameters for `n`, `q` and `|F|`.
pub fn params_for(n: usize, q: usize, flaw_count: usize) -> Result<RainbowParams> {
    if n < 2 || q == 0 {
        return Err(LllError::input("need n ≥ 2 and q ≥ 1"));
    }
    let nf = n as f64;
    let mu = 3.0 / (4.0 * nf * nf);
    let a_f = ((2 * n - 3) * (2 * n - 1)) as u64;
    let theta = theta_exact(n, q).to_f64().unwrap_or(f64::INFINITY);
    let certified = theta < 1.0;
    let (t_seq, t_par) = if flaw_count == 0 || !certified {
        (0.0, 0.0)
    } else {
        let l = (1.0 / theta).ln();
        (flaw_count as f64 * mu.ln_1p() / l, (flaw_count as f64 * mu).ln() / l)
    };
    Ok(RainbowParams {
        n,
        q,
        gamma: q as f64 / nf,
        mu,
        theta,
        a_f,
        beta: a_f as f64 * mu,
        flaw_count,
        t_seq,
        t_par,
        certified,
    })
}

/// Parameters of a colouring. An uncertified `θ ≥ 1` is reported, not raised.
pub fn compute_params(g: &ColoredGraph) -> Result<RainbowParams> {
    params_for(g.n, g.q.max(1), g.monochromatic_pairs().len())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailRow {
    pub r: usize,
    /// `T + r`.
    pub threshold: f64,
    pub empirical: f64,
    /// `θ^r`.
    pub bound: f64,
    /// `sqrt(b(1−b)/N)` with `b = min(θ^r, 1)`.
    pub sigma: f64,
    pub ok: bool,
}

/// Empirical `Pr[X ≥ T + r]` against `θ^r + 3σ` for `r = 0..=r_max`.
pub fn tail_profile(samples: &[usize], t: f64, theta: f64, r_max: usize) -> Vec<TailRow> {
    let n = samples.len().max(1) as f64;
    (0..=r_max)
        .map(|r| {
            let threshold = t + r as f64;
            let empirical = samples.iter().filter(|&&x| x as f64 >= threshold).count() as f64 / n;
            let bound = theta.powi(r as i32);
            let b = bound.min(1.0);
            let sigma = (b * (1.0 - b) / n).sqrt();
            TailRow { r, threshold, empirical, bound, sigma, ok: empirical <= bound + 3.0 * sigma }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct RainbowReport {
    pub params: RainbowParams,
    pub strategy: &'static str,
    pub executor: &'static str,
    pub base_seed: u64,
    pub rng: &'static str,
    pub trials: Vec<TrialRecord>,
    pub all_terminated: bool,
    pub mean: f64,
    pub max: usize,
    /// Against `t_seq` for sequential runs and `t_par` for rounds.
    pub tail: Vec<TailRow>,
}

/// Runs `trials` seeded runs with `ω^init = ω`; every terminating run is
/// checked to end in a rainbow matching.
pub fn run_rainbow_experiment(
    inst: &RainbowInstance,
    strategy: &Strategy,
    executor: Executor,
    base_seed: u64,
    trials: usize,
    jobs: usize,
    force: bool,
) -> Result<RainbowReport> {
    let params = compute_params(&inst.graph)?;
    if !params.certified && !force {
        return Err(LllError::NoCertificate { theta: params.theta });
    }
    let records = run_trials(
        &inst.model,
        Some(&inst.dep),
        strategy,
        executor,
        base_seed,
        trials,
        jobs,
        |s: &MatchingState| {
            if !inst.model.flaws_present(s).is_empty() || !inst.graph.is_rainbow(s) {
                return Err(LllError::Contract { step: 0, reason: format!("final matching {s:?} is not rainbow") });
            }
            Ok(())
        },
    )?;
    let (samples, t, name): (Vec<usize>, f64, &'static str) = match executor {
        Executor::Sequential { .. } => (records.iter().map(|r| r.steps).collect(), params.t_seq, "sequential"),
        Executor::Parallel { .. } => {
            (records.iter().map(|r| r.rounds.unwrap_or(0)).collect(), params.t_par, "parallel")
        }
    };
    let mean = samples.iter().sum::<usize>() as f64 / samples.len().max(1) as f64;
    let max = samples.iter().copied().max().unwrap_or(0);
    let tail = tail_profile(&samples, t, params.theta, 10);
    Ok(RainbowReport {
        all_terminated: records.iter().all(|r| r.terminated),
        strategy: strategy.name(),
        executor: name,
        base_seed,
        rng: RNG_NAME,
        trials: records,
        mean,
        max,
        tail,
        params,
    })
}

/// Sizes of the independent subsets of `Γ(f)`, as counts indexed by size.
pub fn independent_counts_by_size(dep: &DependencyGraph, f: FlawId, cap: usize) -> Result<Vec<usize>> {
    let subsets = dep.enumerate_independent_subsets(dep.gamma(f), cap)?;
    let mut counts = vec![0usize; subsets.iter().map(|s| s.len()).max().unwrap_or(0) + 1];
    for s in subsets {
        counts[s.len()] += 1;
    }
    Ok(counts)
}
