//! Forward canonicalization: valid swaps that turn any word (or walk) into a
//! π-stable one.

use serde::Serialize;

use crate::domain::{walk_probability, DependencyGraph, ExplicitInstance, FlawId, FlawOrder, StateId, Walk, Word};
use crate::error::{LllError, Result};
use crate::verify::SwapMap;

/// A canonical image with the swaps that produced it. Trace entry `k` swaps
/// positions `k` and `k+1` (0-based).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForwardResult<T> {
    pub result: T,
    pub trace: Vec<usize>,
}

/// Builds the stable prefix one flaw at a time: each flaw moves left to just
/// after the rightmost segment holding a flaw equal or adjacent to it, then
/// every segment is sorted.
pub fn forward_canonicalize_word(dep: &DependencyGraph, order: &FlawOrder, w: &[FlawId]) -> ForwardResult<Word> {
    let mut cur = w.to_vec();
    let mut trace = Vec::new();
    let mut lens: Vec<usize> = Vec::new();
    for i in 0..cur.len() {
        let f = cur[i];
        let mut start = 0;
        let mut rightmost = None;
        for (r, &len) in lens.iter().enumerate() {
            if cur[start..start + len].iter().any(|&g| dep.congruent(f, g)) {
                rightmost = Some(r);
            }
            start += len;
        }
        let s = lens.len();
        match rightmost {
            Some(r) if r + 1 == s => lens.push(1),
            _ if s == 0 => lens.push(1),
            found => {
                let join = found.map_or(0, |r| r + 1);
                let target: usize = lens[..=join].iter().sum();
                for k in (target..i).rev() {
                    debug_assert!(!dep.congruent(cur[k], cur[k + 1]));
                    cur.swap(k, k + 1);
                    trace.push(k);
                }
                lens[join] += 1;
            }
        }
    }
    let mut start = 0;
    for len in lens {
        for i in start + 1..start + len {
            let mut k = i;
            while k > start && order.precedes(cur[k], cur[k - 1]) {
                cur.swap(k - 1, k);
                trace.push(k - 1);
                k -= 1;
            }
        }
        start += len;
    }
    ForwardResult { result: cur, trace }
}

/// The π-stable representative of the swap-equivalence class of `w`.
pub fn canonical_word(dep: &DependencyGraph, order: &FlawOrder, w: &[FlawId]) -> Word {
    forward_canonicalize_word(dep, order, w).result
}

/// Applies the swap at position `k` to a walk, realizing the new middle state
/// through `swap`.
pub(crate) fn swap_walk(walk: &mut Walk<StateId>, k: usize, swap: &SwapMap) -> Result<()> {
    let f = walk.steps[k].flaw;
    let g = walk.steps[k + 1].flaw;
    let key = (f, g, *walk.state(k), *walk.state(k + 1), *walk.state(k + 2));
    let mid = *swap.get(&key).ok_or_else(|| {
        LllError::capability(format!(
            "no SWAP image for {f} then {g} through states {} → {} → {}",
            key.2, key.3, key.4
        ))
    })?;
    let end = walk.steps[k + 1].next;
    walk.steps[k].flaw = g;
    walk.steps[k].next = mid;
    walk.steps[k + 1].flaw = f;
    walk.steps[k + 1].next = end;
    Ok(())
}

/// Walk version of [`forward_canonicalize_word`]; the returned walk carries
/// its recomputed probability.
pub fn forward_canonicalize_walk(
    inst: &ExplicitInstance,
    swap: &SwapMap,
    dep: &DependencyGraph,
    order: &FlawOrder,
    walk: &Walk<StateId>,
) -> Result<ForwardResult<Walk<StateId>>> {
    let plan = forward_canonicalize_word(dep, order, &walk.word());
    let mut out = walk.clone();
    for &k in &plan.trace {
        swap_walk(&mut out, k, swap)?;
    }
    out.prob = walk_probability(inst, &out)?;
    debug_assert_eq!(out.word(), plan.result);
    Ok(ForwardResult { result: out, trace: plan.trace })
}
