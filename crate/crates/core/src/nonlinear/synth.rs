//! Per-register basis permutations whose Hadamard product yields a set of
//! monomials at chosen slots.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::Scheme;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialSpec {
    pub target_index: usize,
    /// Source slot feeding each register, one per degree.
    pub factor_indices: Vec<usize>,
}

impl MonomialSpec {
    pub fn degree(&self) -> usize {
        self.factor_indices.len()
    }
}

/// Monomial specs of a scheme: slot i carries the monomial in slot i.
pub fn scheme_specs(scheme: Scheme) -> Vec<MonomialSpec> {
    scheme
        .monomials()
        .iter()
        .enumerate()
        .map(|(i, m)| MonomialSpec { target_index: i, factor_indices: m.to_vec() })
        .collect()
}

/// `sources[r][i]` is the input slot that lands on slot i of register r; the
/// gate on register r is the inverse map (slot `sources[r][i]` → i).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationGateSet {
    pub degree: usize,
    pub sources: Vec<Vec<usize>>,
}

impl PermutationGateSet {
    /// Table for `Gate::permutation`: local |i⟩ → |table[i]⟩.
    pub fn gate_table(&self, register: usize) -> Vec<usize> {
        let src = &self.sources[register];
        let mut t = vec![0; src.len()];
        for (i, &s) in src.iter().enumerate() {
            t[s] = i;
        }
        t
    }

    /// Product over registers of the permuted input, slot by slot.
    pub fn evaluate(&self, psi: &[f64]) -> Vec<f64> {
        (0..psi.len()).map(|i| self.sources.iter().map(|s| psi[s[i]]).product()).collect()
    }

    /// Composite permutation on the product space, register 0 least significant.
    pub fn composite_table(&self) -> Vec<usize> {
        let d = self.sources[0].len();
        let tables: Vec<Vec<usize>> = (0..self.degree).map(|r| self.gate_table(r)).collect();
        (0..d.pow(self.degree as u32))
            .map(|idx| {
                let mut out = 0;
                let mut rest = idx;
                let mut place = 1;
                for t in &tables {
                    out += t[rest % d] * place;
                    rest /= d;
                    place *= d;
                }
                out
            })
            .collect()
    }
}

/// Finds one gate set realizing every spec (all of the same degree) on
/// registers of dimension `dim`, assuming inputs vanish outside `support`.
pub fn synthesize_permutations(specs: &[MonomialSpec], dim: usize, support: &[usize]) -> Result<PermutationGateSet> {
    let degree = specs.first().map(MonomialSpec::degree).ok_or(Error::InvalidParameter("no monomials".into()))?;
    let fail = |reason: String| Error::Unrealizable { degree, reason };
    let mut targets = vec![false; dim];
    for s in specs {
        if s.degree() != degree {
            return Err(Error::InvalidParameter("mixed degrees in one gate set".into()));
        }
        if s.target_index >= dim || s.factor_indices.iter().any(|&f| f >= dim || !support.contains(&f)) {
            return Err(Error::InvalidParameter(format!("spec {s:?} outside register")));
        }
        if std::mem::replace(&mut targets[s.target_index], true) {
            return Err(Error::InvalidParameter(format!("duplicate target {}", s.target_index)));
        }
    }

    let mut assign: Vec<Vec<Option<usize>>> = vec![vec![None; dim]; degree];
    if !search(specs, 0, &mut assign) {
        return Err(fail("no injective per-register assignment of factors".into()));
    }

    // every non-target slot must see an off-support source in some register
    let free_slots: Vec<usize> = (0..dim).filter(|&i| !targets[i]).collect();
    let mut on_support = vec![0usize; dim];
    for r in 0..degree {
        let used: Vec<usize> = assign[r].iter().flatten().copied().collect();
        for v in support.iter().copied().filter(|v| !used.contains(v)) {
            let slot = free_slots
                .iter()
                .copied()
                .filter(|&i| assign[r][i].is_none() && on_support[i] + 1 < degree)
                .min_by_key(|&i| on_support[i])
                .ok_or_else(|| fail(format!("input slot {v} of register {r} cannot be hidden")))?;
            assign[r][slot] = Some(v);
            on_support[slot] += 1;
        }
        let used: Vec<usize> = assign[r].iter().flatten().copied().collect();
        let mut spare = (0..dim).filter(|v| !used.contains(v));
        for a in assign[r].iter_mut().filter(|a| a.is_none()) {
            *a = spare.next();
        }
    }
    let set = PermutationGateSet {
        degree,
        sources: assign.into_iter().map(|r| r.into_iter().map(|a| a.expect("filled")).collect()).collect(),
    };
    verify(&set, specs, dim, support).map_err(fail)?;
    Ok(set)
}

fn search(specs: &[MonomialSpec], k: usize, assign: &mut [Vec<Option<usize>>]) -> bool {
    let Some(spec) = specs.get(k) else { return true };
    let mut orders = permutations(&spec.factor_indices);
    orders.sort();
    orders.dedup();
    for order in orders {
        let ok = order.iter().enumerate().all(|(r, f)| !assign[r].contains(&Some(*f)));
        if !ok {
            continue;
        }
        for (r, &f) in order.iter().enumerate() {
            assign[r][spec.target_index] = Some(f);
        }
        if search(specs, k + 1, assign) {
            return true;
        }
        for r in assign.iter_mut() {
            r[spec.target_index] = None;
        }
    }
    false
}

fn permutations(v: &[usize]) -> Vec<Vec<usize>> {
    if v.len() <= 1 {
        return vec![v.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// Direct evaluation against the monomials on generic inputs.
fn verify(set: &PermutationGateSet, specs: &[MonomialSpec], dim: usize, support: &[usize]) -> std::result::Result<(), String> {
    for seed in [[0.37, -0.61, 0.53, 0.29], [1.3, 0.7, -2.1, 0.41]] {
        let mut psi = vec![0.0; dim];
        for (k, &s) in support.iter().enumerate() {
            psi[s] = seed[k % seed.len()] + 0.1 * k as f64;
        }
        let out = set.evaluate(&psi);
        for (i, o) in out.iter().enumerate() {
            let want = specs
                .iter()
                .find(|s| s.target_index == i)
                .map_or(0.0, |s| s.factor_indices.iter().map(|&f| psi[f]).product());
            if (o - want).abs() > 1e-12 * (1.0 + want.abs()) {
                return Err(format!("slot {i}: got {o}, want {want}"));
            }
        }
    }
    Ok(())
}

/// One LCU term: a same-degree group of monomials and its gate set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcuTerm {
    pub degree: usize,
    pub specs: Vec<MonomialSpec>,
    pub gates: PermutationGateSet,
}

/// Groups specs by degree and splits a degree class into the fewest
/// realizable parts.
pub fn plan_terms(specs: &[MonomialSpec], dim: usize, support: &[usize]) -> Result<Vec<LcuTerm>> {
    let mut degrees: Vec<usize> = specs.iter().map(MonomialSpec::degree).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let mut terms = Vec::new();
    for d in degrees {
        let class: Vec<MonomialSpec> = specs.iter().filter(|s| s.degree() == d).cloned().collect();
        terms.extend(split_class(&class, dim, support)?);
    }
    Ok(terms)
}

fn split_class(class: &[MonomialSpec], dim: usize, support: &[usize]) -> Result<Vec<LcuTerm>> {
    let mut last = None;
    for parts in 1..=class.len() {
        for labels in set_partitions(class.len(), parts) {
            let groups: Vec<Vec<MonomialSpec>> = (0..parts)
                .map(|g| class.iter().zip(&labels).filter(|(_, &l)| l == g).map(|(s, _)| s.clone()).collect())
                .collect();
            let built: Result<Vec<LcuTerm>> = groups
                .into_iter()
                .map(|specs| {
                    let gates = synthesize_permutations(&specs, dim, support)?;
                    Ok(LcuTerm { degree: gates.degree, specs, gates })
                })
                .collect();
            match built {
                Ok(t) => return Ok(t),
                Err(e) => last = Some(e),
            }
        }
    }
    Err(last.unwrap_or(Error::InvalidParameter("empty degree class".into())))
}

/// Restricted-growth labelings of n items into exactly k blocks.
fn set_partitions(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, n: usize, k: usize, used: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            if used == k {
                out.push(cur.clone());
            }
            return;
        }
        for l in 0..=used.min(k - 1) {
            cur.push(l);
            rec(i + 1, n, k, used.max(l + 1), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, 0, &mut Vec::new(), &mut out);
    out
}
