//! CSR terms, the Nachtigall matrix, the weak CSR threshold `T1`, the
//! transient `T` and transients of critical rows and columns.
//!
//! All thresholds are reported on the domain `t >= 1`.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::bounds::{dm_bound, wielandt_bound};
use crate::digraph::{associated_digraph, scc_decompose};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::semiring::MaxPlus;
use crate::spectral::{normalize, spectrum, CritGraph, Spectrum};

/// Default iteration ceiling for [`transient`].
pub const TRANSIENT_LIMIT: usize = 100_000;

/// The matrices `C`, `S`, `R` of a CSR expansion, with `lambda` and the
/// period `gamma` of the defining critical subgraph.
#[derive(Clone, Debug)]
pub struct CsrTriple {
    pub c: Matrix,
    pub s: Matrix,
    pub r: Matrix,
    pub lambda: MaxPlus,
    pub gamma: usize,
    // C S'^t R for t = 1..=gamma, where S' = lambda^-1 S
    normalized: Vec<Matrix>,
}

impl CsrTriple {
    fn all_zero(n: usize) -> Self {
        CsrTriple {
            c: Matrix::zero(n),
            s: Matrix::zero(n),
            r: Matrix::zero(n),
            lambda: MaxPlus::Bottom,
            gamma: 1,
            normalized: vec![Matrix::zero(n)],
        }
    }

    pub fn dim(&self) -> usize {
        self.c.dim()
    }

    /// `C S^t R` for `t >= 1`, from the cached period and `lambda^t`.
    pub fn at(&self, t: usize) -> Result<Matrix> {
        if t == 0 {
            return Err(Error::Precondition("CSR terms are evaluated for t >= 1".into()));
        }
        Ok(self.at_unchecked(t))
    }

    pub(crate) fn at_unchecked(&self, t: usize) -> Matrix {
        let base = &self.normalized[(t - 1) % self.gamma];
        if self.lambda.is_bottom() {
            return base.clone();
        }
        base.scalar_mul(&self.lambda.power(t as u64))
    }

    /// `C ⊗ S^t ⊗ R` evaluated literally.
    pub fn at_direct(&self, t: usize) -> Result<Matrix> {
        let st = self.s.power(t as u64)?;
        Ok(self.c.mul_unchecked(&st).mul_unchecked(&self.r))
    }
}

/// CSR terms of `a` with respect to its whole critical graph.
pub fn build_csr(a: &Matrix) -> Result<CsrTriple> {
    let sp = spectrum(a)?;
    build_from_spectrum(a, &sp)
}

pub(crate) fn build_from_spectrum(a: &Matrix, sp: &Spectrum) -> Result<CsrTriple> {
    match &sp.crit {
        None => Ok(CsrTriple::all_zero(a.dim())),
        Some(crit) => Ok(build_with(a, &sp.lambda, crit)),
    }
}

/// CSR terms with respect to a completely reducible subgraph of the
/// critical graph, given by its arcs.
pub fn build_csr_on(a: &Matrix, arcs: &BTreeSet<(usize, usize)>) -> Result<CsrTriple> {
    let sp = spectrum(a)?;
    let crit = sp.crit.as_ref().ok_or(Error::Acyclic)?;
    if let Some(bad) = arcs.iter().find(|arc| !crit.arcs.contains(arc)) {
        return Err(Error::Precondition(format!("arc {bad:?} is not critical")));
    }
    let sub = CritGraph::from_arc_set(a, arcs.clone())?;
    Ok(build_with(a, &sp.lambda, &sub))
}

fn build_with(a: &Matrix, lambda: &MaxPlus, sub: &CritGraph) -> CsrTriple {
    let n = a.dim();
    let gamma = sub.cyclicity;
    let norm = normalize(a, lambda);
    let m = norm.power_unchecked(gamma as u64).kleene_star().expect("normalized matrix has no positive cycle");
    let mask = sub.node_mask(n);
    let c = m.masked(|_, j| mask[j]);
    let r = m.masked(|i, _| mask[i]);
    let s = a.masked(|i, j| sub.arcs.contains(&(i, j)));
    let s_norm = normalize(&s, lambda);
    let mut normalized = Vec::with_capacity(gamma);
    let mut cs = c.mul_unchecked(&s_norm);
    for _ in 0..gamma {
        normalized.push(cs.mul_unchecked(&r));
        cs = cs.mul_unchecked(&s_norm);
    }
    CsrTriple { c, s, r, lambda: lambda.clone(), gamma, normalized }
}

/// `A` with every row and column of a critical node set to `-inf`.
pub fn nachtigall_matrix(a: &Matrix, crit: Option<&CritGraph>) -> Matrix {
    match crit {
        None => a.clone(),
        Some(crit) => {
            let mask = crit.node_mask(a.dim());
            a.masked(|i, j| !mask[i] && !mask[j])
        }
    }
}

/// Upper end of the `T1` scan: `min(Wi(n), DM(g, n))`, or `Wi(n)` when
/// there is no critical graph.
fn scan_ceiling(n: usize, crit: Option<&CritGraph>) -> usize {
    let wi = wielandt_bound(n).expect("n >= 1");
    match crit {
        Some(c) => wi.min(dm_bound(c.girth, n).expect("girth within 1..=n")),
        None => wi,
    }
}

/// The weak CSR expansion `A^t = CS^tR ⊕ B^t` with its threshold.
#[derive(Clone, Debug)]
pub struct WeakExpansion {
    pub csr: CsrTriple,
    pub nachtigall: Matrix,
    pub t1: usize,
    /// The identity was checked for every `t` in `t1..=verified_through`.
    pub verified_through: usize,
}

/// Least `T >= 1` such that `A^t = CS^tR ⊕ B_N^t` for all `t >= T`.
///
/// Scans up to `min(Wi(n), DM(g, n))`, which bounds the threshold, plus one
/// further period as a consistency check.
pub fn weak_threshold(a: &Matrix) -> Result<WeakExpansion> {
    let sp = spectrum(a)?;
    weak_threshold_with(a, &sp)
}

pub(crate) fn weak_threshold_with(a: &Matrix, sp: &Spectrum) -> Result<WeakExpansion> {
    let csr = build_from_spectrum(a, sp)?;
    let b = nachtigall_matrix(a, sp.crit.as_ref());
    let ceiling = scan_ceiling(a.dim(), sp.crit.as_ref());
    let horizon = ceiling + csr.gamma;
    let mut at = a.clone();
    let mut bt = b.clone();
    let mut last_failure = 0;
    for t in 1..=horizon {
        if t > 1 {
            at = at.mul_unchecked(a);
            bt = bt.mul_unchecked(&b);
        }
        let expansion = csr.at_unchecked(t).oplus(&bt)?;
        if at != expansion {
            last_failure = t;
        }
    }
    if last_failure > ceiling {
        return Err(Error::Invariant(format!(
            "weak CSR expansion fails at t = {last_failure}, above the ceiling {ceiling}"
        )));
    }
    Ok(WeakExpansion { csr, nachtigall: b, t1: last_failure + 1, verified_through: horizon })
}

/// Least `T >= 0` with `A^(t+gamma) = lambda^gamma ⊗ A^t` for all `t >= T`,
/// for irreducible `a`.
pub fn transient(a: &Matrix) -> Result<usize> {
    transient_with_limit(a, TRANSIENT_LIMIT)
}

pub fn transient_with_limit(a: &Matrix, limit: usize) -> Result<usize> {
    let d = scc_decompose(&associated_digraph(a));
    if d.components.len() != 1 {
        return Err(Error::Reducible);
    }
    let sp = spectrum(a)?;
    let crit = sp.crit.as_ref().ok_or(Error::Acyclic)?;
    periodic_transient(a, &sp.lambda, crit.cyclicity, limit)
}

/// Least `T` with `A^(T+gamma) = lambda^gamma ⊗ A^T`; one equality
/// propagates to all later `t` by multiplying with `A`.
pub(crate) fn periodic_transient(a: &Matrix, lambda: &MaxPlus, gamma: usize, limit: usize) -> Result<usize> {
    let shift = lambda.power(gamma as u64);
    let mut window: VecDeque<Matrix> = VecDeque::with_capacity(gamma + 1);
    window.push_back(Matrix::identity(a.dim()));
    for _ in 0..gamma {
        let next = window.back().unwrap().mul_unchecked(a);
        window.push_back(next);
    }
    for t in 0..=limit {
        if *window.back().unwrap() == window.front().unwrap().scalar_mul(&shift) {
            return Ok(t);
        }
        let next = window.back().unwrap().mul_unchecked(a);
        window.pop_front();
        window.push_back(next);
    }
    Err(Error::BudgetExhausted(format!("transient exceeds {limit}")))
}

/// Transients of the critical rows and columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CritRowColTransient {
    /// The largest transient over all critical rows and columns.
    pub max: usize,
    /// `(node, transient)` per critical row.
    pub rows: Vec<(usize, usize)>,
    /// `(node, transient)` per critical column.
    pub cols: Vec<(usize, usize)>,
}

/// For each critical index `i`, the least `T >= 1` from which row `i` (and
/// column `i`) of `A^t` agrees with `CS^tR`.
pub fn crit_row_col_transient(a: &Matrix) -> Result<CritRowColTransient> {
    let sp = spectrum(a)?;
    crit_row_col_with(a, &sp)
}

pub(crate) fn crit_row_col_with(a: &Matrix, sp: &Spectrum) -> Result<CritRowColTransient> {
    let crit = sp.crit.as_ref().ok_or(Error::Acyclic)?;
    let csr = build_from_spectrum(a, sp)?;
    let n = a.dim();
    let horizon = scan_ceiling(n, Some(crit)) + csr.gamma;
    let mut row_fail = vec![0; n];
    let mut col_fail = vec![0; n];
    let mut at = a.clone();
    for t in 1..=horizon {
        if t > 1 {
            at = at.mul_unchecked(a);
        }
        let ct = csr.at_unchecked(t);
        for &i in &crit.nodes {
            if (0..n).any(|j| at.get(i, j) != ct.get(i, j)) {
                row_fail[i] = t;
            }
            if (0..n).any(|j| at.get(j, i) != ct.get(j, i)) {
                col_fail[i] = t;
            }
        }
    }
    let rows: Vec<_> = crit.nodes.iter().map(|&i| (i, row_fail[i] + 1)).collect();
    let cols: Vec<_> = crit.nodes.iter().map(|&i| (i, col_fail[i] + 1)).collect();
    let max = rows.iter().chain(&cols).map(|&(_, t)| t).max().unwrap_or(1);
    Ok(CritRowColTransient { max, rows, cols })
}

/// Summary of all thresholds of a matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransientReport {
    #[serde(skip)]
    pub n: usize,
    pub lambda: MaxPlus,
    pub g: Option<usize>,
    pub gamma: Option<usize>,
    /// `None` when the matrix is reducible.
    #[serde(rename = "T")]
    pub transient: Option<usize>,
    #[serde(rename = "T1")]
    pub t1: usize,
    pub wi: usize,
    pub dm: Option<usize>,
    pub attains_dm: bool,
    pub attains_wiel: bool,
    #[serde(rename = "crit_rc_transient")]
    pub crit_rc_transient: Option<usize>,
}

pub fn analyze(a: &Matrix) -> Result<TransientReport> {
    let n = a.dim();
    let sp = spectrum(a)?;
    let weak = weak_threshold_with(a, &sp)?;
    let wi = wielandt_bound(n)?;
    let g = sp.crit.as_ref().map(|c| c.girth);
    let gamma = sp.crit.as_ref().map(|c| c.cyclicity);
    let dm = g.map(|g| dm_bound(g, n)).transpose()?;
    let transient = match transient(a) {
        Ok(t) => Some(t),
        Err(Error::Reducible | Error::Acyclic) => None,
        Err(e) => return Err(e),
    };
    let crit_rc_transient = match &sp.crit {
        Some(_) => Some(crit_row_col_with(a, &sp)?.max),
        None => None,
    };
    Ok(TransientReport {
        n,
        lambda: sp.lambda,
        g,
        gamma,
        transient,
        t1: weak.t1,
        wi,
        dm,
        attains_dm: dm == Some(weak.t1),
        attains_wiel: weak.t1 == wi,
        crit_rc_transient,
    })
}
