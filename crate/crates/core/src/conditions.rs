//! LLL preconditions and runtime bounds: the cluster-expansion and symmetric
//! forms of the charge condition, Shearer's polynomials `q_S`, and the
//! step/round bounds `T`.

use std::collections::HashSet;

use num_traits::Signed;
use serde::Serialize;

use crate::domain::{DependencyGraph, ExplicitInstance, FlawId, FlawSet};
use crate::error::{LllError, Result};

/// Default bound on the number of independent sets visited by one sum.
pub const DEFAULT_IND_CAP: usize = 1_000_000;
/// Default bound on `|F|` for the full `q_S` table.
pub const DEFAULT_SHEARER_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaReport {
    pub per_flaw: Vec<f64>,
    pub theta: f64,
    /// `θ < 1`.
    pub certified: bool,
}

impl ThetaReport {
    fn from_values(per_flaw: Vec<f64>) -> Self {
        let theta = per_flaw.iter().copied().fold(0.0, f64::max);
        ThetaReport { per_flaw, theta, certified: theta < 1.0 }
    }
}

fn check_vec(dep: &DependencyGraph, v: &[f64], name: &str) -> Result<()> {
    if v.len() != dep.flaw_count() {
        return Err(LllError::input(format!("{name} must have one entry per flaw")));
    }
    if v.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(LllError::input(format!("{name} must be positive")));
    }
    Ok(())
}

/// `Σ_{S ∈ Ind(X)} Π_{g∈S} w_g`, visiting at most `cap` independent sets.
pub fn independent_weight_sum(dep: &DependencyGraph, x: &FlawSet, w: &[f64], cap: usize) -> Result<f64> {
    dep.check_range(x)?;
    fn go(
        dep: &DependencyGraph,
        rest: &[FlawId],
        chosen: &FlawSet,
        w: &[f64],
        acc: f64,
        visits: &mut usize,
        cap: usize,
    ) -> Result<f64> {
        *visits += 1;
        if *visits > cap {
            return Err(LllError::resource("independent subsets", cap));
        }
        let mut total = acc;
        for (i, &f) in rest.iter().enumerate() {
            if dep.gamma(f).is_disjoint(chosen) {
                let mut next = chosen.clone();
                next.insert(f);
                total += go(dep, &rest[i + 1..], &next, w, acc * w[f.index()], visits, cap)?;
            }
        }
        Ok(total)
    }
    let items: Vec<FlawId> = x.iter().collect();
    let mut visits = 0;
    go(dep, &items, &FlawSet::new(), w, 1.0, &mut visits, cap)
}

/// `θ_f = (λ_f/μ_f) Σ_{S∈Ind(Γ(f))} μ(S)`.
pub fn evaluate_cluster_theta(dep: &DependencyGraph, lambda: &[f64], mu: &[f64], cap: usize) -> Result<ThetaReport> {
    check_vec(dep, lambda, "lambda")?;
    check_vec(dep, mu, "mu")?;
    let mut per = Vec::with_capacity(dep.flaw_count());
    for f in 0..dep.flaw_count() {
        let s = independent_weight_sum(dep, dep.gamma(FlawId(f as u32)), mu, cap)?;
        per.push(lambda[f] / mu[f] * s);
    }
    Ok(ThetaReport::from_values(per))
}

/// `θ_f = (λ_f/μ_f) Π_{g∈Γ(f)} (1 + μ_g)`.
pub fn evaluate_symmetric_theta(dep: &DependencyGraph, lambda: &[f64], mu: &[f64]) -> Result<ThetaReport> {
    check_vec(dep, lambda, "lambda")?;
    check_vec(dep, mu, "mu")?;
    let per = (0..dep.flaw_count())
        .map(|f| {
            let prod: f64 = dep.gamma(FlawId(f as u32)).iter().map(|g| 1.0 + mu[g.index()]).product();
            lambda[f] / mu[f] * prod
        })
        .collect();
    Ok(ThetaReport::from_values(per))
}

/// `q_S` for every `S ⊆ F`, indexed by bitmask.
#[derive(Clone, Debug, PartialEq)]
pub struct QTable<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Clone> QTable<T> {
    pub fn flaw_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, s: &FlawSet) -> T {
        self.values[mask_of(s)].clone()
    }

    pub fn by_mask(&self, mask: usize) -> &T {
        &self.values[mask]
    }

    pub fn iter(&self) -> impl Iterator<Item = (FlawSet, &T)> {
        self.values.iter().enumerate().map(|(m, v)| (set_of(m), v))
    }
}

fn mask_of(s: &FlawSet) -> usize {
    s.iter().fold(0usize, |m, f| m | (1 << f.index()))
}

fn set_of(mask: usize) -> FlawSet {
    (0..usize::BITS).filter(|b| mask >> b & 1 == 1).map(FlawId).collect()
}

/// `q_S(p) = Σ_{I ⊇ S, I ∈ Ind(F)} (−1)^{|I|−|S|} p^I`, computed by a signed
/// superset transform of the independent monomials. Exact for rational `p`.
pub fn shearer_q<T: Signed + Clone>(dep: &DependencyGraph, p: &[T], cap: usize) -> Result<QTable<T>> {
    let n = dep.flaw_count();
    if n > cap || n >= usize::BITS as usize {
        return Err(LllError::resource("flaws in the Shearer table", cap));
    }
    if p.len() != n {
        return Err(LllError::input("p must have one entry per flaw"));
    }
    let size = 1usize << n;
    // Neighbour masks ignoring loops.
    let nb: Vec<usize> = (0..n)
        .map(|f| mask_of(dep.gamma(FlawId(f as u32))) & !(1 << f))
        .collect();
    let mut a = vec![T::zero(); size];
    a[0] = T::one();
    for m in 1..size {
        let low = m.trailing_zeros() as usize;
        let rest = m & (m - 1);
        // Dependent `rest` already holds zero, so the product stays zero.
        if nb[low] & rest == 0 {
            a[m] = a[rest].clone() * p[low].clone();
        }
    }
    for b in 0..n {
        let bit = 1 << b;
        for m in 0..size {
            if m & bit == 0 {
                let hi = a[m | bit].clone();
                a[m] = a[m].clone() - hi;
            }
        }
    }
    Ok(QTable { n, values: a })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShearerReport {
    pub passed: bool,
    pub q_empty: String,
    /// Sets with `q_S < 0`.
    pub negative: Vec<FlawSet>,
    /// Flaws with `λ_f > θ p_f`.
    pub charge_violations: Vec<FlawId>,
}

/// Checks `q_S ≥ 0` for all `S`, `q_∅ > 0`, and `λ_f ≤ θ p_f`.
pub fn check_shearer<T>(dep: &DependencyGraph, lambda: &[T], p: &[T], theta: &T, cap: usize) -> Result<ShearerReport>
where
    T: Signed + Clone + PartialOrd + std::fmt::Display,
{
    if lambda.len() != dep.flaw_count() {
        return Err(LllError::input("lambda must have one entry per flaw"));
    }
    let q = shearer_q(dep, p, cap)?;
    let negative: Vec<FlawSet> = q.iter().filter(|(_, v)| v.is_negative()).map(|(s, _)| s).collect();
    let charge_violations: Vec<FlawId> = (0..dep.flaw_count())
        .filter(|&f| lambda[f] > theta.clone() * p[f].clone())
        .map(|f| FlawId(f as u32))
        .collect();
    let q0 = q.by_mask(0).clone();
    Ok(ShearerReport {
        passed: negative.is_empty() && q0.is_positive() && charge_violations.is_empty(),
        q_empty: q0.to_string(),
        negative,
        charge_violations,
    })
}

/// Weights defining `μ(R)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Weights {
    /// `μ(R) = Π_{f∈R} μ_f`.
    Cluster { mu: Vec<f64> },
    /// `μ(R) = q_R(p)/q_∅(p)`.
    Shearer { p: Vec<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVariant {
    /// π-stable strategy.
    SeqA,
    /// Atomic and weakly commutative.
    SeqB,
    /// Strongly commutative.
    SeqC,
    /// Rounds of the parallel walk.
    Parallel,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub variant: BoundVariant,
    pub theta: f64,
    pub gamma_init: f64,
    pub ind_sum: f64,
    #[serde(rename = "T")]
    pub t: f64,
}

/// `max_σ ω^init(σ)/ω(σ)`.
pub fn gamma_init(inst: &ExplicitInstance) -> f64 {
    (0..inst.state_count())
        .map(|s| (inst.initial(s) / inst.measure(s)).to_f64())
        .fold(0.0, f64::max)
}

/// `T = (ln γ^init + ln Σ) / ln θ⁻¹`. Without an instance `ω^init = ω` is
/// assumed (`γ^init = 1`); cases a and b need the instance for `Ind^init`.
pub fn bound_t(
    inst: Option<&ExplicitInstance>,
    dep: &DependencyGraph,
    weights: &Weights,
    theta: f64,
    variant: BoundVariant,
    cap: usize,
) -> Result<BoundReport> {
    if !(theta > 0.0) {
        return Err(LllError::input("theta must be positive"));
    }
    if theta >= 1.0 {
        return Err(LllError::NoCertificate { theta });
    }
    if let Some(i) = inst {
        if i.flaw_count() != dep.flaw_count() {
            return Err(LllError::input("instance and graph disagree on the number of flaws"));
        }
    }
    let gamma = inst.map_or(1.0, gamma_init);
    let n = dep.flaw_count();
    let q = match weights {
        Weights::Cluster { mu } => {
            check_vec(dep, mu, "mu")?;
            None
        }
        Weights::Shearer { p } => {
            if p.len() != n {
                return Err(LllError::input("p must have one entry per flaw"));
            }
            let q = shearer_q(dep, p, DEFAULT_SHEARER_CAP)?;
            if !(*q.by_mask(0) > 0.0) {
                return Err(LllError::input("q_∅(p) must be positive"));
            }
            Some(q)
        }
    };
    let mu_of = |r: &FlawSet| -> f64 {
        match (&q, weights) {
            (Some(q), _) => q.get(r) / q.by_mask(0),
            (None, Weights::Cluster { mu }) => r.iter().map(|f| mu[f.index()]).product(),
            _ => unreachable!(),
        }
    };
    let ind_sum = match variant {
        BoundVariant::SeqA | BoundVariant::SeqB => {
            let inst = inst.ok_or_else(|| LllError::capability("cases a and b range over supp(ω^init) and need an enumerable instance"))?;
            let mut seen: HashSet<FlawSet> = HashSet::new();
            for s in inst.initial_support() {
                for r in dep.enumerate_independent_subsets(inst.present(s), cap)? {
                    seen.insert(r);
                    if seen.len() > cap {
                        return Err(LllError::resource("Ind^init", cap));
                    }
                }
            }
            seen.iter().map(mu_of).sum()
        }
        BoundVariant::SeqC => match weights {
            Weights::Cluster { mu } => independent_weight_sum(dep, &(0..n).map(FlawId::from).collect(), mu, cap)?,
            Weights::Shearer { .. } => {
                let q = q.as_ref().expect("shearer table");
                q.iter().map(|(_, v)| *v).sum::<f64>() / q.by_mask(0)
            }
        },
        BoundVariant::Parallel => (0..n).map(|f| mu_of(&FlawSet::singleton(FlawId(f as u32)))).sum(),
    };
    let t = (gamma.ln() + ind_sum.ln()) / (1.0 / theta).ln();
    Ok(BoundReport { variant, theta, gamma_init: gamma, ind_sum, t })
}

/// `μ(R)` under the given weights.
pub fn mu_of_set(dep: &DependencyGraph, weights: &Weights, r: &FlawSet) -> Result<f64> {
    dep.check_range(r)?;
    match weights {
        Weights::Cluster { mu } => {
            check_vec(dep, mu, "mu")?;
            Ok(r.iter().map(|f| mu[f.index()]).product())
        }
        Weights::Shearer { p } => {
            if p.len() != dep.flaw_count() {
                return Err(LllError::input("p must have one entry per flaw"));
            }
            let q = shearer_q(dep, p, DEFAULT_SHEARER_CAP)?;
            if !(*q.by_mask(0) > 0.0) {
                return Err(LllError::input("q_∅(p) must be positive"));
            }
            Ok(q.get(r) / q.by_mask(0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn loop_flaw_theta() {
        let dep = DependencyGraph::complete(1, true);
        let c = evaluate_cluster_theta(&dep, &[0.25], &[0.5], 100).unwrap();
        assert!((c.theta - 0.75).abs() < 1e-15);
        let s = evaluate_symmetric_theta(&dep, &[0.25], &[0.5]).unwrap();
        assert!((s.theta - 0.75).abs() < 1e-15);
    }

    #[test]
    fn isolated_flaw_theta() {
        let dep = DependencyGraph::edgeless(1);
        let c = evaluate_cluster_theta(&dep, &[0.25], &[0.5], 100).unwrap();
        assert_eq!(c.per_flaw, vec![0.5]);
    }

    #[test]
    fn triangle_symmetric_theta() {
        let dep = DependencyGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let s = evaluate_symmetric_theta(&dep, &[0.125; 3], &[0.5; 3]).unwrap();
        assert!((s.theta - 0.5625).abs() < 1e-15);
        let c = evaluate_cluster_theta(&dep, &[0.125; 3], &[0.5; 3], 100).unwrap();
        assert!((c.theta - 0.25 * 2.0).abs() < 1e-15);
    }

    #[test]
    fn q_table_for_an_edge() {
        let dep = DependencyGraph::from_edges(2, &[(0, 1)]).unwrap();
        let q = shearer_q(&dep, &[r(2, 5), r(1, 3)], 20).unwrap();
        assert_eq!(*q.by_mask(0), r(1, 1) - r(2, 5) - r(1, 3));
        assert_eq!(*q.by_mask(1), r(2, 5));
        assert_eq!(*q.by_mask(2), r(1, 3));
        assert_eq!(*q.by_mask(3), r(0, 1));
    }

    #[test]
    fn q_table_for_a_lone_flaw_and_zero_p() {
        let dep = DependencyGraph::edgeless(1);
        let q = shearer_q(&dep, &[r(1, 4)], 20).unwrap();
        assert_eq!(*q.by_mask(0), r(3, 4));
        assert_eq!(*q.by_mask(1), r(1, 4));
        let dep = DependencyGraph::edgeless(3);
        let q = shearer_q(&dep, &vec![r(0, 1); 3], 20).unwrap();
        assert_eq!(*q.by_mask(0), r(1, 1));
        assert!((1..8).all(|m| q.by_mask(m) == &r(0, 1)));
    }

    #[test]
    fn shearer_examples() {
        let dep = DependencyGraph::from_edges(2, &[(0, 1)]).unwrap();
        let pass = check_shearer(&dep, &vec![r(1, 5); 2], &vec![r(2, 5); 2], &r(1, 2), 20).unwrap();
        assert!(pass.passed);
        assert_eq!(pass.q_empty, "1/5");
        let fail = check_shearer(&dep, &vec![r(1, 5); 2], &vec![r(3, 5); 2], &r(1, 2), 20).unwrap();
        assert!(!fail.passed);
        assert_eq!(fail.q_empty, "-1/5");
        let charge = check_shearer(&dep, &vec![r(2, 5); 2], &vec![r(2, 5); 2], &r(9, 10), 20).unwrap();
        assert_eq!(charge.charge_violations.len(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let dep = DependencyGraph::edgeless(21);
        assert!(matches!(shearer_q(&dep, &vec![0.0; 21], 20), Err(LllError::Resource { .. })));
    }

    #[test]
    fn bound_for_loop_toy() {
        let dep = DependencyGraph::complete(1, true);
        let b = bound_t(None, &dep, &Weights::Cluster { mu: vec![0.5] }, 0.75, BoundVariant::SeqC, 100).unwrap();
        assert!((b.t - 1.5f64.ln() / (4.0f64 / 3.0).ln()).abs() < 1e-12);
        assert!((b.t - 1.4094).abs() < 1e-4);
        assert!(matches!(
            bound_t(None, &dep, &Weights::Cluster { mu: vec![0.5] }, 1.0, BoundVariant::SeqC, 100),
            Err(LllError::NoCertificate { .. })
        ));
    }
}
