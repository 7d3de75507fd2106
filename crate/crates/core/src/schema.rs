//! JSON instance descriptions.
//!
//! Every file is an object tagged by `"kind"`:
//!
//! ```json
//! {"kind": "matching", "host": {"case": "complete", "n": 2}, "flaws": "single_edges"}
//! {"kind": "matching", "host": {"case": "bipartite", "blocks": [[[0,1,2],[3,4,5]]]},
//!  "flaws": [[[0,3]], [[1,4],[2,5]]], "initial": {"point": [[0,3],[1,4],[2,5]]}}
//! {"kind": "variable", "domains": [2, 2],
//!  "flaws": [{"clause": [{"var": 0, "value": 1}, {"var": 1, "value": 1}]},
//!            {"vbl": [0], "assignments": [[1]]}]}
//! {"kind": "explicit", "states": 3, "flaws": 1,
//!  "actions": [{"state": 1, "flaw": 0, "targets": [[0, "1/2"], [2, "1/2"]]}]}
//! {"kind": "rainbow", "coloring": {"n": 2, "edges": [[0,1,0], …]}}
//! {"kind": "rainbow", "generate": {"n": 20, "q": 4, "seed": 1}}
//! ```
//!
//! Vertices, variables, states and flaws are 0-based. Probabilities are
//! numbers or rational strings such as `"1/3"`. Optional keys common to all
//! kinds: `"relation"` (flaw pairs replacing the built-in causality graph,
//! loops written as `[f, f]`) and `"order"` (a permutation of the flaws for
//! the π-stable strategy). Matching flaws may be an explicit list of edge
//! lists or one of `"single_edges"` and `"disjoint_pairs"`; `"initial"` is
//! `"uniform"` (default) or `{"point": edges}`. Variable flaws are clauses (the
//! flaw is present when every literal fails) or assignment lists over `vbl`;
//! `"distributions"` defaults to uniform and `"initial"` to `"product"`.
//! Explicit instances take optional `"measure"`, `"initial"` and `"labels"`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{DependencyGraph, ExplicitInstance, FlawId, FlawOrder, Prob, StateId};
use crate::error::{LllError, Result};
use crate::oracles::matching::{Edge, Vertex};
use crate::oracles::{
    build_matching_instance, build_variable_model, disjoint_pair_flaws, single_edge_flaws, Assignment, HostCase,
    HostGraph, Literal, MatchingInitial, MatchingModel, MatchingState, VariableFlaw, VariableInitial, VariableModel,
};
use crate::rainbow::{build_rainbow_instance, generate_coloring, ColoredGraph, ColoringFile, RainbowInstance};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatchingFlawsSpec {
    Family(MatchingFamily),
    List(Vec<Vec<Edge>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchingFamily {
    SingleEdges,
    DisjointPairs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchingInitialSpec {
    Uniform,
    Point(Vec<Edge>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VariableFlawSpec {
    Clause { clause: Vec<Literal> },
    Assignments { vbl: Vec<usize>, assignments: Vec<Assignment> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableInitialSpec {
    Product,
    Point(Assignment),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionSpec {
    pub state: StateId,
    pub flaw: usize,
    pub targets: Vec<(StateId, Prob)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerateSpec {
    pub n: usize,
    pub q: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceBody {
    Matching {
        host: HostCase,
        flaws: MatchingFlawsSpec,
        #[serde(default)]
        initial: Option<MatchingInitialSpec>,
    },
    Variable {
        domains: Vec<usize>,
        #[serde(default)]
        distributions: Option<Vec<Vec<Prob>>>,
        flaws: Vec<VariableFlawSpec>,
        #[serde(default)]
        initial: Option<VariableInitialSpec>,
    },
    Explicit {
        states: usize,
        flaws: usize,
        actions: Vec<ActionSpec>,
        #[serde(default)]
        measure: Option<Vec<Prob>>,
        #[serde(default)]
        initial: Option<Vec<Prob>>,
        #[serde(default)]
        labels: Option<Vec<String>>,
    },
    Rainbow {
        #[serde(default)]
        coloring: Option<ColoringFile>,
        #[serde(default)]
        generate: Option<GenerateSpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(flatten)]
    pub body: InstanceBody,
    #[serde(default)]
    pub relation: Option<Vec<(usize, usize)>>,
    #[serde(default)]
    pub order: Option<Vec<usize>>,
}

/// A loaded model with its causality graph.
pub enum Loaded {
    Matching(MatchingModel),
    Variable(VariableModel),
    Explicit(ExplicitInstance),
    Rainbow(RainbowInstance),
}

pub struct Instance {
    pub model: Loaded,
    pub dep: Arc<DependencyGraph>,
    pub order: FlawOrder,
}

impl Instance {
    pub fn flaw_count(&self) -> usize {
        self.dep.flaw_count()
    }

    pub fn kind(&self) -> &'static str {
        match self.model {
            Loaded::Matching(_) => "matching",
            Loaded::Variable(_) => "variable",
            Loaded::Explicit(_) => "explicit",
            Loaded::Rainbow(_) => "rainbow",
        }
    }

    /// The enumerated form, refusing more than `cap` states.
    pub fn explicit(&self, cap: usize) -> Result<ExplicitInstance> {
        match &self.model {
            Loaded::Matching(m) => ExplicitInstance::from_model(m, cap),
            Loaded::Variable(m) => ExplicitInstance::from_model(m, cap),
            Loaded::Explicit(e) if e.state_count() <= cap => Ok(e.clone()),
            Loaded::Explicit(_) => Err(LllError::resource("enumerated states", cap)),
            Loaded::Rainbow(r) => ExplicitInstance::from_model(&r.model, cap),
        }
    }
}

pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    serde_json::from_str(text).map_err(|e| LllError::input(format!("instance file: {e}")))
}

pub fn load_instance(file: &InstanceFile) -> Result<Instance> {
    let (model, builtin) = match &file.body {
        InstanceBody::Matching { host, flaws, initial } => {
            let host = HostGraph::from_case(host.clone())?;
            let flaws = match flaws {
                MatchingFlawsSpec::Family(MatchingFamily::SingleEdges) => single_edge_flaws(&host),
                MatchingFlawsSpec::Family(MatchingFamily::DisjointPairs) => disjoint_pair_flaws(&host),
                MatchingFlawsSpec::List(l) => l.clone(),
            };
            let initial = match initial {
                None | Some(MatchingInitialSpec::Uniform) => MatchingInitial::Uniform,
                Some(MatchingInitialSpec::Point(edges)) => MatchingInitial::Point(MatchingState::from_edges(&host, edges)?),
            };
            let (m, dep) = build_matching_instance(host, flaws, initial)?;
            (Loaded::Matching(m), dep)
        }
        InstanceBody::Variable { domains, distributions, flaws, initial } => {
            let flaws = flaws
                .iter()
                .map(|f| match f {
                    VariableFlawSpec::Clause { clause } => VariableFlaw::clause(clause.clone()),
                    VariableFlawSpec::Assignments { vbl, assignments } => {
                        VariableFlaw::assignments(vbl.clone(), assignments.clone())
                    }
                })
                .collect();
            let initial = match initial {
                None | Some(VariableInitialSpec::Product) => VariableInitial::Product,
                Some(VariableInitialSpec::Point(a)) => VariableInitial::Point(a.clone()),
            };
            let m = build_variable_model(domains.clone(), distributions.clone(), flaws, initial)?;
            let dep = m.dependency_graph();
            (Loaded::Variable(m), dep)
        }
        InstanceBody::Explicit { states, flaws, actions, measure, initial, labels } => {
            let mut b = ExplicitInstance::builder(*states, *flaws);
            for a in actions {
                if a.state >= *states {
                    return Err(LllError::input(format!("action at state {} out of range", a.state)));
                }
                b = b.action(a.state, FlawId(a.flaw as u32), a.targets.clone());
            }
            if let Some(l) = labels {
                if l.len() != *states {
                    return Err(LllError::input("one label per state is required"));
                }
                for (i, s) in l.iter().enumerate() {
                    b = b.label(i, s.clone());
                }
            }
            if let Some(m) = measure {
                b = b.measure(m.clone());
            }
            if let Some(m) = initial {
                b = b.initial(m.clone());
            }
            let inst = b.build()?;
            let dep = crate::verify::infer_minimal_causality(&inst);
            (Loaded::Explicit(inst), dep)
        }
        InstanceBody::Rainbow { coloring, generate } => {
            let g = match (coloring, generate) {
                (Some(c), None) => ColoredGraph::from_file(c)?,
                (None, Some(s)) => generate_coloring(s.n, s.q, s.seed)?,
                _ => return Err(LllError::input("a rainbow instance needs exactly one of coloring and generate")),
            };
            let r = build_rainbow_instance(&g)?;
            let dep = (*r.dep).clone();
            (Loaded::Rainbow(r), dep)
        }
    };
    let n = builtin.flaw_count();
    let dep = match &file.relation {
        Some(edges) => DependencyGraph::from_edges(n, edges)?,
        None => builtin,
    };
    let order = match &file.order {
        Some(o) => FlawOrder::from_sequence(&o.iter().map(|&f| FlawId(f as u32)).collect::<Vec<_>>())?,
        None => FlawOrder::identity(n),
    };
    if order.len() != n {
        return Err(LllError::input("order must be a permutation of all flaws"));
    }
    Ok(Instance { model, dep: Arc::new(dep), order })
}

/// Vertex pairs of a host, exposed for callers building point states.
pub fn point_state(host: &HostGraph, edges: &[(Vertex, Vertex)]) -> Result<MatchingState> {
    MatchingState::from_edges(host, edges)
}
