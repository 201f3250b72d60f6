//! Maximum cycle mean, critical graph and visualization scalings.

use std::collections::BTreeSet;

use crate::digraph::{associated_digraph, global_cyclicity, maximal_girth, scc_decompose, SccDecomposition, WeightedDigraph};
use crate::error::{Error, Result};
use crate::matrix::{DiagonalScaling, Matrix};
use crate::semiring::{MaxPlus, Rational};

/// The critical graph: nodes and arcs of all cycles with maximal mean.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CritGraph {
    pub nodes: Vec<usize>,
    pub arcs: BTreeSet<(usize, usize)>,
    /// Critical arcs with their weights in the original matrix.
    pub digraph: WeightedDigraph,
    /// Components of the critical graph; every one of them carries a cycle.
    pub scc: SccDecomposition,
    /// Maximal girth over the components.
    pub girth: usize,
    /// lcm of the component cyclicities.
    pub cyclicity: usize,
}

impl CritGraph {
    pub fn contains_node(&self, v: usize) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.scc.components.len() == 1
    }

    /// Membership mask over all `n` nodes.
    pub fn node_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in &self.nodes {
            mask[v] = true;
        }
        mask
    }

    /// Builds the critical-graph record for an arc set of `a` that is a union
    /// of strongly connected pieces.
    pub(crate) fn from_arc_set(a: &Matrix, arcs: BTreeSet<(usize, usize)>) -> Result<CritGraph> {
        let digraph = WeightedDigraph::from_arcs(a, arcs.iter().copied());
        let all = scc_decompose(&digraph);
        let nodes: BTreeSet<usize> = arcs.iter().flat_map(|&(i, j)| [i, j]).collect();
        let scc = SccDecomposition { components: all.components.into_iter().filter(|c| c.has_cycle()).collect() };
        let covered: usize = scc.components.iter().map(|c| c.nodes.len()).sum();
        let comp = scc.component_of(a.dim());
        if covered != nodes.len() || arcs.iter().any(|&(i, j)| comp[i] != comp[j] || comp[i] == usize::MAX) {
            return Err(Error::Precondition("arc set is not completely reducible".into()));
        }
        let girth = maximal_girth(&scc)?;
        let cyclicity = global_cyclicity(&scc)?;
        Ok(CritGraph { nodes: nodes.into_iter().collect(), arcs, digraph, scc, girth, cyclicity })
    }
}

/// `lambda` together with the critical graph (absent when `lambda = -inf`).
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub lambda: MaxPlus,
    pub crit: Option<CritGraph>,
}

/// Maximum cycle mean by Karp's algorithm, run exactly on every strongly
/// connected component; `-inf` when the digraph is acyclic.
pub fn max_cycle_mean(a: &Matrix) -> MaxPlus {
    let g = associated_digraph(a);
    let d = scc_decompose(&g);
    let mut best = MaxPlus::Bottom;
    for comp in d.cyclic_components() {
        best.oplus_assign(MaxPlus::Finite(karp(a, &comp.nodes)));
    }
    best
}

fn karp(a: &Matrix, nodes: &[usize]) -> Rational {
    let k = nodes.len();
    // dist[m][v]: best weight of a walk of length m from nodes[0] to nodes[v]
    let mut dist = vec![vec![MaxPlus::Bottom; k]; k + 1];
    dist[0][0] = MaxPlus::one();
    for m in 1..=k {
        for v in 0..k {
            let mut best = MaxPlus::Bottom;
            for u in 0..k {
                best.oplus_assign(dist[m - 1][u].otimes(a.get(nodes[u], nodes[v])));
            }
            dist[m][v] = best;
        }
    }
    let mut lambda: Option<Rational> = None;
    for v in 0..k {
        let MaxPlus::Finite(top) = &dist[k][v] else { continue };
        let worst = (0..k)
            .filter_map(|m| dist[m][v].finite().map(|dm| (top - dm).div_int((k - m) as i64)))
            .min()
            .expect("dist[k][v] finite implies some shorter prefix");
        if lambda.as_ref().is_none_or(|l| worst > *l) {
            lambda = Some(worst);
        }
    }
    lambda.expect("strongly connected component with a cycle")
}

/// `lambda^-1 ⊗ A`, the matrix with maximum cycle mean 0.
pub fn normalize(a: &Matrix, lambda: &MaxPlus) -> Matrix {
    match lambda.inverse() {
        Some(inv) => a.scalar_mul(&inv),
        None => a.clone(),
    }
}

/// Critical arcs of a matrix whose maximum cycle mean is 0: `(i, j)` is
/// critical iff `a_ij + (A*)_ji = 0`.
fn critical_arcs(normalized: &Matrix) -> Result<BTreeSet<(usize, usize)>> {
    let star = normalized.kleene_star()?;
    let zero = MaxPlus::one();
    Ok(normalized
        .entries()
        .filter(|((i, j), v)| v.is_finite() && v.otimes(star.get(*j, *i)) == zero)
        .map(|(ij, _)| ij)
        .collect())
}

pub fn critical_graph(a: &Matrix) -> Result<CritGraph> {
    spectrum(a)?.crit.ok_or(Error::Acyclic)
}

pub fn spectrum(a: &Matrix) -> Result<Spectrum> {
    let lambda = max_cycle_mean(a);
    if lambda.is_bottom() {
        return Ok(Spectrum { lambda, crit: None });
    }
    let arcs = critical_arcs(&normalize(a, &lambda))?;
    let crit = CritGraph::from_arc_set(a, arcs)
        .map_err(|e| Error::Invariant(format!("critical graph is not completely reducible: {e}")))?;
    Ok(Spectrum { lambda, crit: Some(crit) })
}

/// A strict visualization `D^-1 A D` of `a`.
///
/// Every column of `K = (lambda^-1 A)*` is a subeigenvector, and column `i`
/// satisfies the constraint of every noncritical arc leaving `i` strictly.
/// Columns are lifted to finite vectors by a max with a far-below copy of
/// `K ⊗ 0`, then averaged in ordinary arithmetic, which keeps all
/// inequalities and makes every noncritical one strict.
pub fn visualize(a: &Matrix) -> Result<(DiagonalScaling, Matrix)> {
    let sp = spectrum(a)?;
    let crit = sp.crit.as_ref().ok_or(Error::Acyclic)?;
    let n = a.dim();
    let norm = normalize(a, &sp.lambda);
    let star = norm.kleene_star()?;

    // x_i = max_k K_ik >= K_ii = 0
    let x: Vec<Rational> = (0..n)
        .map(|i| star.row(i).iter().max().and_then(MaxPlus::finite).cloned().expect("K_ii = 0"))
        .collect();
    let max_x = x.iter().max().cloned().unwrap_or_else(Rational::zero);
    let max_arc = norm.entries().filter_map(|(_, v)| v.finite().cloned()).max().unwrap_or_else(Rational::zero);
    let offset = -(&(&max_x.abs() + &max_arc.abs()) + &Rational::from_integer(1));

    let mut sum = vec![Rational::zero(); n];
    for col in 0..n {
        for (i, s) in sum.iter_mut().enumerate() {
            let low = &offset + &x[i];
            let y = match star.get(i, col) {
                MaxPlus::Finite(k) if *k > low => k.clone(),
                _ => low,
            };
            *s = &*s + &y;
        }
    }
    let d = DiagonalScaling::new(sum.into_iter().map(|s| s.div_int(n as i64)).collect());
    let b = a.scale(&d)?;
    if !strictly_visualized_against(&b, &sp.lambda, &crit.arcs) {
        return Err(Error::Invariant("strict visualization postcondition failed".into()));
    }
    Ok((d, b))
}

fn strictly_visualized_against(b: &Matrix, lambda: &MaxPlus, crit: &BTreeSet<(usize, usize)>) -> bool {
    b.entries().all(|(ij, v)| if crit.contains(&ij) { v == lambda } else { v < lambda || v.is_bottom() })
}

/// `a_ij <= lambda` everywhere and `a_ij = lambda` on critical arcs.
pub fn is_visualized(a: &Matrix) -> Result<bool> {
    let sp = spectrum(a)?;
    let Some(crit) = sp.crit else {
        return Ok(a.is_zero());
    };
    Ok(a.entries().all(|(ij, v)| *v <= sp.lambda && (!crit.arcs.contains(&ij) || *v == sp.lambda)))
}

/// Visualized, and `a_ij = lambda` only on critical arcs.
pub fn is_strictly_visualized(a: &Matrix) -> Result<bool> {
    let sp = spectrum(a)?;
    let Some(crit) = sp.crit else {
        return Ok(a.is_zero());
    };
    Ok(strictly_visualized_against(a, &sp.lambda, &crit.arcs))
}
