use crate::distances::Measure;
use crate::error::{Result, TmbError};
use crate::graph::{Instance, Labeling, ReachFastInstance, Time};
use crate::solvers::{for_each_product, labeling_value, subsets_of_size, BruteForceLimits};

/// Labels `{1, …, µ(e)}` on every edge.
pub fn tmb_to_reachfast(instance: &Instance) -> ReachFastInstance {
    let labels = Labeling::new(
        instance
            .multiplicity
            .iter()
            .map(|&mu| (1..=mu).collect())
            .collect(),
    );
    ReachFastInstance::new(
        instance.graph.clone(),
        instance.sources.clone(),
        instance.traversal.clone(),
        labels,
        instance.tau,
    )
    .expect("a valid instance has 1 <= µ(e) <= tau")
}

/// Multiplicity `|λ(e)|` on every edge.
pub fn reachfast_to_tmb(rf: &ReachFastInstance) -> Result<Instance> {
    Instance::new(
        rf.graph.clone(),
        rf.sources.clone(),
        rf.traversal.clone(),
        rf.labels.sets().iter().map(|s| s.len() as u64).collect(),
        rf.tau,
    )
}

/// Moves the label at `from` by `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shift {
    pub from: Time,
    pub delta: i64,
}

/// Shifts turning `before` into `after`: the largest surplus labels of
/// `before` are dropped, labels present in both stay put, and the rest are
/// paired by rank.
pub fn shift_schedule(before: &[Time], after: &[Time]) -> Vec<Shift> {
    let mut b: Vec<Time> = before.to_vec();
    b.sort_unstable();
    b.truncate(after.len());
    let mut a: Vec<Time> = after.to_vec();
    a.sort_unstable();
    let moving_b: Vec<Time> = b.iter().copied().filter(|t| !a.contains(t)).collect();
    let moving_a: Vec<Time> = a.iter().copied().filter(|t| !b.contains(t)).collect();
    moving_b
        .iter()
        .zip(&moving_a)
        .map(|(&from, &to)| Shift {
            from,
            delta: to as i64 - from as i64,
        })
        .collect()
}

/// Applies `shifts` simultaneously to the `keep` smallest labels of `before`.
pub fn apply_shifts(before: &[Time], keep: usize, shifts: &[Shift]) -> Vec<Time> {
    let mut b: Vec<Time> = before.to_vec();
    b.sort_unstable();
    b.truncate(keep);
    let mut out: Vec<Time> = b
        .into_iter()
        .map(|t| match shifts.iter().find(|s| s.from == t) {
            Some(s) => (t as i64 + s.delta) as Time,
            None => t,
        })
        .collect();
    out.sort_unstable();
    out
}

/// Exhaustive optimum of a ReachFast instance: every edge keeps between one
/// and `|λ(e)|` labels anywhere in `1..=τ`. Returns the optimal value with the
/// lexicographically smallest optimal labeling, or `None` when infeasible.
pub fn reachfast_brute_force(
    rf: &ReachFastInstance,
    measure: Measure,
    limits: BruteForceLimits,
) -> Result<Option<(Time, Labeling)>> {
    let instance = reachfast_to_tmb(rf)?;
    let choices: Vec<Vec<Vec<Time>>> = rf
        .labels
        .sets()
        .iter()
        .map(|s| {
            let mut all = Vec::new();
            for k in 1..=s.len() {
                all.extend(subsets_of_size(rf.tau, k));
            }
            all.sort();
            all
        })
        .collect();
    let size = choices
        .iter()
        .fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128));
    if rf.graph.edge_count() > limits.max_edges
        || rf.tau > limits.max_tau
        || size > limits.max_labelings
    {
        return Err(TmbError::SearchSpaceTooLarge(size.to_string()));
    }
    let mut best: Option<(Time, Labeling)> = None;
    for_each_product(&choices, |lab| {
        if let Some(v) = labeling_value(&instance, lab, measure) {
            if best
                .as_ref()
                .map_or(true, |(b, _)| measure.better_objective(v, *b))
            {
                best = Some((v, lab.clone()));
            }
        }
        true
    });
    Ok(best)
}
