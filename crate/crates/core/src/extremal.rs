//! Matrices attaining the Wielandt and Dulmage-Mendelsohn bounds.
//!
//! Node numberings are permutations `p` with `p[new] = old`; all indices in
//! this module are 0-based, so the Hamiltonian path of the decomposition is
//! `0 -> 1 -> ... -> n-1 -> 0` and the girth cycle is `0 -> ... -> g-1 -> 0`.

use std::collections::BTreeSet;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{dm_bound, wielandt_bound};
use crate::csr::{build_csr, crit_row_col_transient, periodic_transient, weak_threshold, TRANSIENT_LIMIT};
use crate::digraph::cycles_with_min_node;
use crate::error::{Error, Result};
use crate::matrix::{check_permutation, DiagonalScaling, Matrix};
use crate::semiring::{MaxPlus, Rational};
use crate::spectral::{normalize, spectrum, CritGraph};

/// Largest `n` for which numberings are searched over Hamiltonian cycles.
pub const SEARCH_LIMIT: usize = 10;
/// Largest `n` accepted by [`twice_optimal_walk`].
pub const WALK_ORACLE_LIMIT: usize = 8;
const GENERATOR_ATTEMPTS: usize = 64;

/// Arc `(i, j)` belongs to the Hamiltonian-plus-chord skeleton `A1`.
pub fn in_a1_pattern(i: usize, j: usize, n: usize, g: usize) -> bool {
    (j == i + 1 && j < n) || (j == 0 && (i == n - 1 || i == g - 1))
}

/// Arc `(i, j)` belongs to the chord part `B1`: both ends outside the girth
/// cycle and `j = i + 1 (mod g)`.
pub fn in_b1_pattern(i: usize, j: usize, g: usize) -> bool {
    i >= g && j >= g && j % g == (i + 1) % g
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub a1: Matrix,
    pub b1: Matrix,
    pub a2: Matrix,
    pub g: usize,
    pub numbering: Vec<usize>,
}

impl Decomposition {
    /// `A1 ⊕ B1 ⊕ A2`, which is the renumbered input.
    pub fn reassemble(&self) -> Matrix {
        let n = self.a1.dim();
        Matrix::from_fn(n, |i, j| self.a1.get(i, j).oplus(self.b1.get(i, j)).oplus(self.a2.get(i, j)))
    }
}

/// Renumbers `a` by `numbering` and splits it into `A1`, `B1` and `A2`.
///
/// `A1` and `B1` share the path arcs `(i, i+1)` with `i >= g`; `A2` holds
/// every entry outside both patterns.
pub fn decompose(a: &Matrix, g: usize, numbering: &[usize]) -> Result<Decomposition> {
    let n = a.dim();
    if g == 0 || g > n {
        return Err(Error::Precondition(format!("g = {g} outside 1..={n}")));
    }
    let pa = a.permute(numbering)?;
    let a1 = pa.masked(|i, j| in_a1_pattern(i, j, n, g));
    let b1 = pa.masked(|i, j| in_b1_pattern(i, j, g));
    let a2 = pa.masked(|i, j| !in_a1_pattern(i, j, n, g) && !in_b1_pattern(i, j, g));
    Ok(Decomposition { a1, b1, a2, g, numbering: numbering.to_vec() })
}

/// `A1` on the Wielandt skeleton (`g = n - 1`) and everything else as `A2`.
fn wielandt_split(pa: &Matrix) -> (Matrix, Matrix) {
    let n = pa.dim();
    let a1 = pa.masked(|i, j| in_a1_pattern(i, j, n, n - 1));
    let a2 = pa.masked(|i, j| !in_a1_pattern(i, j, n, n - 1));
    (a1, a2)
}

/// Outcome of a single condition, with the first violating entry in the
/// renumbered frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub holds: bool,
    pub vacuous: bool,
    pub witness: Option<(usize, usize)>,
}

impl Condition {
    fn check(witness: Option<(usize, usize)>) -> Self {
        Condition { holds: witness.is_none(), vacuous: false, witness }
    }

    fn flag(holds: bool) -> Self {
        Condition { holds, vacuous: false, witness: None }
    }

    fn vacuous() -> Self {
        Condition { holds: true, vacuous: true, witness: None }
    }
}

/// `x < y` in the sense used for `A2 < CSR[A1]`: `-inf` is below everything.
fn below(x: &MaxPlus, y: &MaxPlus) -> bool {
    x.is_bottom() || x < y
}

fn first_violation(a: &Matrix, b: &Matrix) -> Option<(usize, usize)> {
    a.entries().find(|&((i, j), x)| !below(x, b.get(i, j))).map(|(ij, _)| ij)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DmConditions {
    pub coprime: Condition,
    pub a2_dominated: Condition,
    pub chord: Condition,
    pub power: Condition,
}

impl DmConditions {
    pub fn all(&self) -> bool {
        self.coprime.holds && self.a2_dominated.holds && self.chord.holds && self.power.holds
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DmPrerequisites {
    pub crit_strongly_connected: bool,
    pub unique_girth_cycle: bool,
    pub girth_cycle_critical: bool,
}

impl DmPrerequisites {
    pub fn all(&self) -> bool {
        self.crit_strongly_connected && self.unique_girth_cycle && self.girth_cycle_critical
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DmVerdict {
    pub holds: bool,
    pub g: Option<usize>,
    pub numbering: Option<Vec<usize>>,
    pub prerequisites: Option<DmPrerequisites>,
    pub conditions: Option<DmConditions>,
    /// The `n = g = 2` rule `a11 != a22` decided the verdict.
    pub two_by_two: bool,
}

impl DmVerdict {
    fn negative(g: Option<usize>) -> Self {
        DmVerdict { holds: false, g, numbering: None, prerequisites: None, conditions: None, two_by_two: false }
    }
}

fn girth_cycles(crit: &CritGraph, n: usize, g: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for start in 0..n {
        cycles_with_min_node(&crit.digraph, start, g, &mut |nodes, _| {
            if nodes.len() == g {
                out.push(nodes.to_vec());
            }
        });
    }
    out
}

fn leading_cycle_critical(crit: &CritGraph, p: &[usize], len: usize) -> bool {
    (0..len).all(|k| crit.arcs.contains(&(p[k], p[(k + 1) % len])))
}

fn dm_conditions(a: &Matrix, lambda: &MaxPlus, g: usize, p: &[usize]) -> Result<DmConditions> {
    let n = a.dim();
    let d = decompose(a, g, p)?;
    let coprime = Condition::flag(g.gcd(&n) == 1);
    let csr = build_csr(&d.a1)?;
    let a2_dominated = Condition::check(first_violation(&d.a2, &csr.at(1)?));
    if n < 2 * g {
        return Ok(DmConditions { coprime, a2_dominated, chord: Condition::vacuous(), power: Condition::vacuous() });
    }
    let mut powers = vec![Matrix::identity(n), d.a1.clone()];
    for k in 2..n {
        let next = powers[k - 1].mul_unchecked(&d.a1);
        powers.push(next);
    }
    let mut chord_witness = None;
    'outer: for i in g..n {
        for j in i + 2..n {
            if (j - i - 1) % g != 0 {
                continue;
            }
            let lhs = lambda.power((j - i - 1) as u64).otimes(d.b1.get(i, j));
            if !below(&lhs, powers[j - i].get(i, j)) {
                chord_witness = Some((i, j));
                break 'outer;
            }
        }
    }
    let dm = dm_bound(g, n)?;
    let lhs = d.b1.power((dm - 1) as u64)?;
    let rhs = csr.at(dm - 1)?;
    let power = Condition::check((!below(lhs.get(g, n - 1), rhs.get(g, n - 1))).then_some((g, n - 1)));
    Ok(DmConditions { coprime, a2_dominated, chord: Condition::check(chord_witness), power })
}

/// All maximum-weight Hamiltonian cycles of the associated digraph, each
/// listed once starting from node 0, together with their common weight.
pub fn max_weight_hamiltonian_cycles(a: &Matrix) -> Result<(MaxPlus, Vec<Vec<usize>>)> {
    let n = a.dim();
    if n > SEARCH_LIMIT {
        return Err(Error::TooLarge { n, limit: SEARCH_LIMIT, what: "Hamiltonian cycle search" });
    }
    let mut best = MaxPlus::Bottom;
    let mut cycles = Vec::new();
    for_each_hamiltonian_cycle(a, &mut |cycle, w| {
        if cycles.is_empty() || w > best {
            best = w;
            cycles = vec![cycle.to_vec()];
        } else if w == best {
            cycles.push(cycle.to_vec());
        }
    });
    Ok((best, cycles))
}

fn for_each_hamiltonian_cycle(a: &Matrix, emit: &mut dyn FnMut(&[usize], MaxPlus)) {
    let n = a.dim();
    if n == 0 {
        return;
    }
    fn go(a: &Matrix, path: &mut Vec<usize>, used: &mut [bool], w: MaxPlus, emit: &mut dyn FnMut(&[usize], MaxPlus)) {
        let n = a.dim();
        let u = *path.last().unwrap();
        if path.len() == n {
            let back = a.get(u, path[0]);
            if back.is_finite() {
                emit(path, w.otimes(back));
            }
            return;
        }
        for v in 0..n {
            let x = a.get(u, v);
            if !used[v] && x.is_finite() {
                used[v] = true;
                path.push(v);
                go(a, path, used, w.otimes(x), emit);
                path.pop();
                used[v] = false;
            }
        }
    }
    let mut used = vec![false; n];
    used[0] = true;
    go(a, &mut vec![0], &mut used, MaxPlus::one(), emit);
}

fn rotations(cycle: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let n = cycle.len();
    (0..n).map(move |r| (0..n).map(|k| cycle[(k + r) % n]).collect())
}

fn identity(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Checks whether `T1(A) = DM(g, n)` through the structural prerequisites
/// and the four conditions on `A1`, `B1`, `A2`.
///
/// With `numbering = None` the numbering is searched among rotations of the
/// maximum-weight Hamiltonian cycles (`n <= SEARCH_LIMIT`).
pub fn verify_dm(a: &Matrix, numbering: Option<&[usize]>) -> Result<DmVerdict> {
    let n = a.dim();
    let sp = spectrum(a)?;
    let Some(crit) = sp.crit.as_ref() else {
        return Ok(DmVerdict::negative(None));
    };
    let g = crit.girth;
    if g < 2 {
        return Err(Error::Unsupported("critical girth 1 is outside the characterization".into()));
    }
    let candidates = match numbering {
        Some(p) => {
            check_permutation(p, n)?;
            vec![p.to_vec()]
        }
        None => {
            let (_, cycles) = max_weight_hamiltonian_cycles(a)?;
            cycles.iter().flat_map(|c| rotations(c)).filter(|p| leading_cycle_critical(crit, p, g)).collect()
        }
    };
    let crit_strongly_connected = crit.is_strongly_connected();
    let unique_girth_cycle = girth_cycles(crit, n, g).len() == 1;
    let two_by_two = n == 2 && g == 2;
    let mut first = None;
    for p in candidates {
        let prerequisites = DmPrerequisites {
            crit_strongly_connected,
            unique_girth_cycle,
            girth_cycle_critical: leading_cycle_critical(crit, &p, g),
        };
        let conditions = dm_conditions(a, &sp.lambda, g, &p)?;
        let holds = if two_by_two {
            prerequisites.all() && a.get(0, 0) != a.get(1, 1)
        } else {
            prerequisites.all() && conditions.all()
        };
        let verdict = DmVerdict {
            holds,
            g: Some(g),
            numbering: Some(p),
            prerequisites: Some(prerequisites),
            conditions: Some(conditions),
            two_by_two,
        };
        if holds {
            return Ok(verdict);
        }
        first.get_or_insert(verdict);
    }
    Ok(first.unwrap_or_else(|| DmVerdict::negative(Some(g))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum WielandtCase {
    /// `g = n - 1` with the cycle `0 ... n-2 0` critical.
    #[serde(rename = "n-1")]
    GirthNMinus1,
    /// `g = n` with the Hamiltonian cycle critical.
    #[serde(rename = "n")]
    GirthN,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WielandtVerdict {
    pub holds: bool,
    pub g: Option<usize>,
    pub numbering: Option<Vec<usize>>,
    pub case: Option<WielandtCase>,
    pub cycle_critical: Condition,
    /// Every arc of the Wielandt skeleton is present; the witness is a missing one.
    pub skeleton: Option<Condition>,
    pub a2_dominated: Option<Condition>,
    /// The `n = g = 2` rule `a11 != a22` decided the verdict.
    pub two_by_two: bool,
}

/// Checks whether `T1(A) = Wi(n)`: critical girth `n - 1` or `n` with the
/// matching cycle critical, and `A2 < CSR[A1]` on the Wielandt skeleton.
pub fn verify_wielandt(a: &Matrix, numbering: Option<&[usize]>) -> Result<WielandtVerdict> {
    let n = a.dim();
    if n < 2 {
        return Err(Error::Precondition("the Wielandt check needs n >= 2".into()));
    }
    let sp = spectrum(a)?;
    let negative = |g, case| WielandtVerdict {
        holds: false,
        g,
        numbering: None,
        case,
        cycle_critical: Condition::flag(false),
        skeleton: None,
        a2_dominated: None,
        two_by_two: false,
    };
    let Some(crit) = sp.crit.as_ref() else {
        return Ok(negative(None, None));
    };
    let g = crit.girth;
    let (case, len) = if g == n - 1 {
        (WielandtCase::GirthNMinus1, n - 1)
    } else if g == n {
        (WielandtCase::GirthN, n)
    } else {
        return Ok(negative(Some(g), None));
    };
    let candidates = match numbering {
        Some(p) => {
            check_permutation(p, n)?;
            vec![p.to_vec()]
        }
        None => {
            let (_, cycles) = max_weight_hamiltonian_cycles(a)?;
            cycles.iter().flat_map(|c| rotations(c)).filter(|p| leading_cycle_critical(crit, p, len)).collect()
        }
    };
    let two_by_two = n == 2 && g == 2;
    let mut first = None;
    for p in candidates {
        let cycle_critical = Condition::flag(leading_cycle_critical(crit, &p, len));
        let pa = a.permute(&p)?;
        let skeleton = Condition::check(
            pa.entries().find(|&((i, j), x)| in_a1_pattern(i, j, n, n - 1) && x.is_bottom()).map(|(ij, _)| ij),
        );
        let (a1, a2) = wielandt_split(&pa);
        let a2_dominated = Condition::check(first_violation(&a2, &build_csr(&a1)?.at(1)?));
        let holds = if two_by_two {
            cycle_critical.holds && a.get(0, 0) != a.get(1, 1)
        } else {
            cycle_critical.holds && skeleton.holds && a2_dominated.holds
        };
        let verdict = WielandtVerdict {
            holds,
            g: Some(g),
            numbering: Some(p),
            case: Some(case),
            cycle_critical,
            skeleton: Some(skeleton),
            a2_dominated: Some(a2_dominated),
            two_by_two,
        };
        if verdict.holds {
            return Ok(verdict);
        }
        first.get_or_insert(verdict);
    }
    Ok(first.unwrap_or_else(|| negative(Some(g), Some(case))))
}

/// Transient of a 0/-inf matrix: the least `T` with `P^(t+c) = P^t` for
/// `t >= T`, `c` being the cyclicity of its digraph.
pub fn boolean_index(pattern: &Matrix) -> Result<usize> {
    let sp = spectrum(pattern)?;
    let crit = sp.crit.as_ref().ok_or(Error::Acyclic)?;
    periodic_transient(pattern, &MaxPlus::one(), crit.cyclicity, TRANSIENT_LIMIT)
}

fn crit_pattern(crit: &CritGraph, n: usize) -> Matrix {
    Matrix::from_fn(n, |i, j| if crit.arcs.contains(&(i, j)) { MaxPlus::one() } else { MaxPlus::Bottom })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CritRcDmVerdict {
    pub holds: bool,
    pub g: usize,
    pub bound: usize,
    pub crit_index: usize,
    pub crit_rc_transient: usize,
    /// The critical row/column transient reaches the bound exactly when the
    /// index of the critical graph does.
    pub consistent: bool,
}

/// Whether the critical rows and columns have transient `DM(g, n)`, decided
/// through the index of the critical graph.
pub fn verify_crit_rc_dm(a: &Matrix) -> Result<CritRcDmVerdict> {
    let n = a.dim();
    let sp = spectrum(a)?;
    let crit = sp.crit.as_ref().ok_or(Error::Acyclic)?;
    let g = crit.girth;
    let bound = dm_bound(g, n)?;
    let crit_index = boolean_index(&crit_pattern(crit, n))?;
    let crit_rc_transient = crit_row_col_transient(a)?.max;
    let holds = crit_index == bound;
    Ok(CritRcDmVerdict {
        holds,
        g,
        bound,
        crit_index,
        crit_rc_transient,
        consistent: (crit_rc_transient == bound) == holds,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CritRcWielandtVerdict {
    pub holds: bool,
    pub bound: usize,
    pub numbering: Option<Vec<usize>>,
    /// Index of the digraph of `A1` under the witnessing numbering.
    pub a1_index: Option<usize>,
    pub crit_rc_transient: usize,
    pub consistent: bool,
}

/// Whether `A = A1 ⊕ A2` with the digraph of `A1` of index `Wi(n)`, a
/// critical Hamiltonian cycle in `A1` and `A2 < CSR[A1]`.
pub fn verify_crit_rc_wielandt(a: &Matrix) -> Result<CritRcWielandtVerdict> {
    let n = a.dim();
    if n > SEARCH_LIMIT {
        return Err(Error::TooLarge { n, limit: SEARCH_LIMIT, what: "Hamiltonian cycle search" });
    }
    let sp = spectrum(a)?;
    let crit = sp.crit.as_ref().ok_or(Error::Acyclic)?;
    let bound = wielandt_bound(n)?;
    let crit_rc_transient = crit_row_col_transient(a)?.max;
    let mut cycles = Vec::new();
    for_each_hamiltonian_cycle(&crit_pattern(crit, n), &mut |c, _| cycles.push(c.to_vec()));
    let mut witness = None;
    if n >= 2 {
        'search: for c in &cycles {
            for p in rotations(c) {
                let (a1, a2) = wielandt_split(&a.permute(&p)?);
                let index = boolean_index(&a1.pattern())?;
                if index == bound && first_violation(&a2, &build_csr(&a1)?.at(1)?).is_none() {
                    witness = Some((p, index));
                    break 'search;
                }
            }
        }
    }
    let holds = witness.is_some();
    let (numbering, a1_index) = witness.map_or((None, None), |(p, i)| (Some(p), Some(i)));
    Ok(CritRcWielandtVerdict {
        holds,
        bound,
        numbering,
        a1_index,
        crit_rc_transient,
        consistent: (crit_rc_transient == bound) == holds,
    })
}

/// Record written next to a generated matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub family: &'static str,
    pub n: usize,
    pub g: usize,
    pub case: Option<WielandtCase>,
    pub seed: u64,
    /// Witnessing numbering, 1-based.
    pub numbering: Vec<usize>,
    pub lambda: MaxPlus,
    pub t1: usize,
    pub bound: usize,
    pub attempts: usize,
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub matrix: Matrix,
    pub provenance: Provenance,
}

/// Negative grid value in `[-4, -1/4]`.
fn margin(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(-rng.gen_range(1..=16), 4)
}

/// Entries outside the skeleton: finite with probability one half, and then
/// strictly below `limit`.
fn below_sample(rng: &mut ChaCha8Rng, limit: &MaxPlus) -> MaxPlus {
    match limit.finite() {
        Some(x) if rng.gen_bool(0.5) => MaxPlus::Finite(x + &margin(rng)),
        _ => MaxPlus::Bottom,
    }
}

fn disguise(rng: &mut ChaCha8Rng, a: &Matrix) -> Result<Matrix> {
    let n = a.dim();
    let d = DiagonalScaling::new((0..n).map(|_| Rational::new(rng.gen_range(-8..=8), 2)).collect());
    let shift = MaxPlus::ratio(rng.gen_range(-9..=9), 3);
    Ok(a.scale(&d)?.scalar_mul(&shift))
}

fn skeleton(n: usize, g: usize, chord: MaxPlus) -> Matrix {
    Matrix::from_fn(n, |i, j| {
        if i == g - 1 && j == 0 && g != n {
            chord.clone()
        } else if in_a1_pattern(i, j, n, g) {
            MaxPlus::one()
        } else {
            MaxPlus::Bottom
        }
    })
}

/// A random matrix with `T1 = DM(g, n)` under the identity numbering.
///
/// Every output passes [`verify_dm`] and a direct `T1` scan before it is
/// returned.
pub fn generate_dm(n: usize, g: usize, seed: u64) -> Result<Generated> {
    if g < 2 || g >= n {
        return Err(Error::Precondition(format!("need 2 <= g < n, got g = {g}, n = {n}")));
    }
    if g.gcd(&n) != 1 {
        return Err(Error::Precondition(format!("g = {g} and n = {n} are not coprime")));
    }
    let bound = dm_bound(g, n)?;
    let a1 = skeleton(n, g, MaxPlus::one());
    let csr1 = build_csr(&a1)?.at(1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=GENERATOR_ATTEMPTS {
        let base = Matrix::from_fn(n, |i, j| {
            if in_a1_pattern(i, j, n, g) {
                MaxPlus::one()
            } else if in_b1_pattern(i, j, g) {
                if rng.gen_bool(0.5) {
                    MaxPlus::Finite(margin(&mut rng))
                } else {
                    MaxPlus::Bottom
                }
            } else {
                below_sample(&mut rng, csr1.get(i, j))
            }
        });
        let a = disguise(&mut rng, &base)?;
        let id = identity(n);
        let verdict = verify_dm(&a, Some(&id))?;
        let t1 = weak_threshold(&a)?.t1;
        if verdict.holds && t1 == bound {
            let provenance = Provenance {
                family: "dm",
                n,
                g,
                case: None,
                seed,
                numbering: (1..=n).collect(),
                lambda: spectrum(&a)?.lambda,
                t1,
                bound,
                attempts: attempt,
            };
            return Ok(Generated { matrix: a, provenance });
        }
    }
    Err(Error::BudgetExhausted(format!("no DM-extremal sample for n = {n}, g = {g} in {GENERATOR_ATTEMPTS} attempts")))
}

/// A random matrix with `T1 = Wi(n)` whose critical girth is `n - 1` or `n`
/// as selected by `case`.
pub fn generate_wielandt(n: usize, seed: u64, case: WielandtCase) -> Result<Generated> {
    if n < 2 {
        return Err(Error::Precondition("the Wielandt generator needs n >= 2".into()));
    }
    let bound = wielandt_bound(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=GENERATOR_ATTEMPTS {
        let chord = match case {
            WielandtCase::GirthNMinus1 => MaxPlus::one(),
            WielandtCase::GirthN => MaxPlus::Finite(margin(&mut rng)),
        };
        let mut a1 = skeleton(n, n - 1, MaxPlus::one());
        a1[(n - 2, 0)] = chord;
        let csr1 = build_csr(&a1)?.at(1)?;
        let base = Matrix::from_fn(n, |i, j| {
            if in_a1_pattern(i, j, n, n - 1) {
                a1.get(i, j).clone()
            } else {
                below_sample(&mut rng, csr1.get(i, j))
            }
        });
        let a = disguise(&mut rng, &base)?;
        let id = identity(n);
        let verdict = verify_wielandt(&a, Some(&id))?;
        let t1 = weak_threshold(&a)?.t1;
        if verdict.holds && verdict.case == Some(case) && t1 == bound {
            let provenance = Provenance {
                family: "wielandt",
                n,
                g: verdict.g.expect("critical graph exists"),
                case: Some(case),
                seed,
                numbering: (1..=n).collect(),
                lambda: spectrum(&a)?.lambda,
                t1,
                bound,
                attempts: attempt,
            };
            return Ok(Generated { matrix: a, provenance });
        }
    }
    Err(Error::BudgetExhausted(format!("no Wielandt-extremal sample for n = {n} in {GENERATOR_ATTEMPTS} attempts")))
}

/// A walk with its weight measured in the normalized matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Walk {
    pub nodes: Vec<usize>,
    pub weight: MaxPlus,
    /// Length equals `DM(g, n) + g - 1`.
    pub interesting: bool,
}

impl Walk {
    pub fn len(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The twice optimal walk from `i` to `j`: among walks visiting the unique
/// critical cycle `Z0` of length `g` with length `= t (mod g)`, maximal
/// weight first and minimal length second. Ties between predecessors go to
/// the smaller node.
///
/// Walk lengths are searched up to `DM(g, n) + 2g - 1`.
pub fn twice_optimal_walk(a: &Matrix, i: usize, j: usize, t: usize) -> Result<Option<Walk>> {
    let n = a.dim();
    if n > WALK_ORACLE_LIMIT {
        return Err(Error::TooLarge { n, limit: WALK_ORACLE_LIMIT, what: "the walk oracle" });
    }
    if i >= n || j >= n {
        return Err(Error::Precondition(format!("node out of range 0..{n}")));
    }
    let sp = spectrum(a)?;
    let crit = sp.crit.as_ref().ok_or(Error::Acyclic)?;
    let g = crit.girth;
    let z0 = match girth_cycles(crit, n, g).as_slice() {
        [only] => only.iter().copied().collect::<BTreeSet<_>>(),
        _ => return Err(Error::Precondition(format!("no unique critical cycle of length {g}"))),
    };
    let norm = normalize(a, &sp.lambda);
    let max_len = dm_bound(g, n)? + 2 * g - 1;

    type State = Option<(MaxPlus, usize, bool)>;
    // best[len][node][visited] = (weight, predecessor, predecessor flag)
    let mut best: Vec<Vec<[State; 2]>> = vec![vec![[None, None]; n]; max_len + 1];
    best[0][i][usize::from(z0.contains(&i))] = Some((MaxPlus::one(), usize::MAX, false));
    for len in 1..=max_len {
        for u in 0..n {
            for flag in [false, true] {
                let Some((w, _, _)) = best[len - 1][u][usize::from(flag)].clone() else {
                    continue;
                };
                for v in 0..n {
                    let x = norm.get(u, v);
                    if x.is_bottom() {
                        continue;
                    }
                    let nw = w.otimes(x);
                    let nf = flag || z0.contains(&v);
                    let slot = &mut best[len][v][usize::from(nf)];
                    if slot.as_ref().is_none_or(|(cur, _, _)| nw > *cur) {
                        *slot = Some((nw, u, flag));
                    }
                }
            }
        }
    }
    let mut pick: Option<(MaxPlus, usize)> = None;
    for len in (0..=max_len).filter(|l| l % g == t % g) {
        if let Some((w, _, _)) = &best[len][j][1] {
            if pick.as_ref().is_none_or(|(pw, _)| w > pw) {
                pick = Some((w.clone(), len));
            }
        }
    }
    let Some((weight, len)) = pick else {
        return Ok(None);
    };
    let mut nodes = vec![j];
    let (mut v, mut flag) = (j, true);
    for l in (1..=len).rev() {
        let (_, u, uf) = best[l][v][usize::from(flag)].clone().expect("state on the optimal walk");
        nodes.push(u);
        v = u;
        flag = uf;
    }
    nodes.reverse();
    let interesting = len == dm_bound(g, n)? + g - 1;
    Ok(Some(Walk { nodes, weight, interesting }))
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: Option<i64> = None;

    fn one_based(p: &[usize]) -> Vec<usize> {
        p.iter().map(|v| v + 1).collect()
    }

    fn skeleton_support(n: usize, g: usize) -> Matrix {
        skeleton(n, g, MaxPlus::one())
    }

    #[test]
    fn patterns_on_twelve_nodes() {
        let (n, g) = (12, 3);
        let a1: Vec<_> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| in_a1_pattern(i, j, n, g)).collect();
        assert_eq!(a1.len(), 13);
        assert!(in_a1_pattern(2, 0, n, g) && in_a1_pattern(11, 0, n, g));
        // thin arcs 5->9, 5->12, 10->8, 10->5 (1-based) and the path 4..12
        for (i, j) in [(5, 9), (5, 12), (10, 8), (10, 5)] {
            assert!(in_b1_pattern(i - 1, j - 1, g));
            assert!(!in_a1_pattern(i - 1, j - 1, n, g));
        }
        for i in 4..12 {
            assert!(in_b1_pattern(i - 1, i, g) && in_a1_pattern(i - 1, i, n, g));
        }
        assert!(!in_b1_pattern(2, 3, g));
    }

    #[test]
    fn decomposition_of_the_twelve_node_example() {
        let (n, g) = (12, 3);
        let thin = [(5, 9), (5, 12), (10, 8), (10, 5)];
        let a = Matrix::from_fn(n, |i, j| {
            if in_a1_pattern(i, j, n, g) || thin.contains(&(i + 1, j + 1)) {
                MaxPlus::one()
            } else {
                MaxPlus::Bottom
            }
        });
        let d = decompose(&a, g, &identity(n)).unwrap();
        assert!(d.a2.is_zero());
        assert_eq!(d.a1, skeleton_support(n, g));
        assert_eq!(d.b1.entries().filter(|(_, x)| x.is_finite()).count(), 8 + 4);
        assert_eq!(d.reassemble(), a);
    }

    #[test]
    fn decompose_skeleton_only_and_errors() {
        let a = skeleton_support(5, 2);
        let d = decompose(&a, 2, &identity(5)).unwrap();
        assert!(d.a2.is_zero());
        assert_eq!(d.a1, a);
        assert!(decompose(&a, 0, &identity(5)).is_err());
        assert!(matches!(decompose(&a, 2, &[0, 1, 2, 3, 3]), Err(Error::InvalidNumbering(_))));
    }

    #[test]
    fn reassembly_under_a_numbering() {
        let a = Matrix::from_fn(4, |i, j| MaxPlus::int((3 * i + j) as i64 % 5 - 4));
        let p = [2, 0, 3, 1];
        let d = decompose(&a, 2, &p).unwrap();
        assert_eq!(d.reassemble(), a.permute(&p).unwrap());
    }

    #[test]
    fn hamiltonian_cycles_of_complete_three() {
        let a = Matrix::from_ints(&[&[B, Some(1), Some(0)], &[Some(0), B, Some(1)], &[Some(1), Some(0), B]]).unwrap();
        let (w, cycles) = max_weight_hamiltonian_cycles(&a).unwrap();
        assert_eq!(w, MaxPlus::int(3));
        assert_eq!(cycles, vec![vec![0, 1, 2]]);
        assert!(max_weight_hamiltonian_cycles(&Matrix::zero(11)).is_err());
    }

    #[test]
    fn skeleton_satisfies_dm_conditions() {
        for (n, g) in [(3, 2), (5, 2), (5, 3), (7, 3)] {
            let a = skeleton_support(n, g);
            let v = verify_dm(&a, None).unwrap();
            assert!(v.holds, "n = {n}, g = {g}: {v:?}");
            assert_eq!(v.numbering.unwrap(), identity(n));
            assert_eq!(weak_threshold(&a).unwrap().t1, dm_bound(g, n).unwrap());
        }
    }

    #[test]
    fn short_girth_conditions_are_vacuous() {
        let v = verify_dm(&skeleton_support(5, 3), Some(&identity(5))).unwrap();
        let c = v.conditions.unwrap();
        assert!(c.chord.vacuous && c.power.vacuous);
        let d = decompose(&skeleton_support(5, 3), 3, &identity(5)).unwrap();
        assert!(d.b1.power(2).unwrap().is_zero());
    }

    #[test]
    fn shared_factor_fails_coprimality() {
        let a = skeleton_support(4, 2);
        let v = verify_dm(&a, None).unwrap();
        assert!(!v.holds);
        assert!(!v.conditions.unwrap().coprime.holds);
        assert!(weak_threshold(&a).unwrap().t1 < dm_bound(2, 4).unwrap());
    }

    #[test]
    fn girth_one_is_unsupported() {
        let a = Matrix::from_ints(&[&[Some(0), Some(0)], &[Some(0), Some(-1)]]).unwrap();
        assert!(matches!(verify_dm(&a, None), Err(Error::Unsupported(_))));
    }

    #[test]
    fn two_by_two_rule() {
        let differ = Matrix::from_ints(&[&[Some(-1), Some(0)], &[Some(0), Some(-2)]]).unwrap();
        let v = verify_dm(&differ, None).unwrap();
        assert!(v.holds && v.two_by_two);
        let equal = Matrix::from_ints(&[&[Some(-1), Some(0)], &[Some(0), Some(-1)]]).unwrap();
        assert!(!verify_dm(&equal, None).unwrap().holds);
    }

    #[test]
    fn wielandt_verdicts() {
        for n in 2..=6 {
            let mut a = skeleton_support(n, n - 1);
            let v = verify_wielandt(&a, None).unwrap();
            assert!(v.holds);
            assert_eq!(v.case, Some(WielandtCase::GirthNMinus1));
            a[(n - 2, 0)] = MaxPlus::int(-1);
            let v = verify_wielandt(&a, None).unwrap();
            assert!(v.holds, "{v:?}");
            assert_eq!(v.case, Some(WielandtCase::GirthN));
        }
        // critical girth 2 on five nodes cannot reach the Wielandt bound
        let v = verify_wielandt(&skeleton_support(5, 2), None).unwrap();
        assert!(!v.holds && v.case.is_none());
        assert!(verify_wielandt(&Matrix::zero(1), None).is_err());
        for n in 3..=6 {
            let cycle = Matrix::from_fn(n, |i, j| if j == (i + 1) % n { MaxPlus::one() } else { MaxPlus::Bottom });
            let v = verify_wielandt(&cycle, None).unwrap();
            assert!(!v.holds && !v.skeleton.unwrap().holds);
            assert_eq!(weak_threshold(&cycle).unwrap().t1, 1);
        }
    }

    #[test]
    fn wielandt_two_by_two_matches_loop_rule() {
        for (a11, a22) in [(Some(-1), Some(-2)), (Some(-2), Some(-1)), (Some(-1), Some(-1)), (Some(0), Some(-1)), (Some(-3), Some(-3)), (B, B), (B, Some(-1))] {
            let a = Matrix::from_ints(&[&[a11, Some(0)], &[Some(0), a22]]).unwrap();
            let v = verify_wielandt(&a, None).unwrap();
            assert_eq!(v.holds, a11 != a22, "a11 = {a11:?}, a22 = {a22:?}");
            assert_eq!(weak_threshold(&a).unwrap().t1 == 2, a11 != a22);
        }
    }

    #[test]
    fn explicit_numbering_is_checked() {
        let a = skeleton_support(5, 2);
        assert!(verify_dm(&a, Some(&[0, 1, 2])).is_err());
        let shifted = [1, 2, 3, 4, 0];
        let v = verify_dm(&a, Some(&shifted)).unwrap();
        assert!(!v.holds && !v.prerequisites.unwrap().girth_cycle_critical);
    }

    #[test]
    fn search_finds_a_relabelled_instance() {
        let a = skeleton_support(5, 3);
        let p = [3, 0, 4, 1, 2];
        // q is the inverse of p, so relabelling by q moves node k to p[k]
        let mut q = [0; 5];
        for (k, &v) in p.iter().enumerate() {
            q[v] = k;
        }
        let b = a.permute(&q).unwrap();
        let v = verify_dm(&b, None).unwrap();
        assert!(v.holds);
        assert_eq!(b.permute(v.numbering.as_ref().unwrap()).unwrap(), a);
        assert_eq!(one_based(&identity(2)), vec![1, 2]);
    }

    #[test]
    fn generators_post_verify() {
        let g = generate_dm(5, 2, 7).unwrap();
        assert_eq!(g.provenance.t1, 11);
        let g = generate_dm(5, 3, 7).unwrap();
        assert_eq!(g.provenance.t1, 14);
        assert!(generate_dm(4, 2, 1).is_err());
        assert!(generate_dm(3, 3, 1).is_err());
        for case in [WielandtCase::GirthNMinus1, WielandtCase::GirthN] {
            let g = generate_wielandt(4, 3, case).unwrap();
            assert_eq!(g.provenance.t1, 10);
            let g = generate_wielandt(2, 3, case).unwrap();
            assert_eq!(g.provenance.t1, 2);
            assert_ne!(g.matrix[(0, 0)], g.matrix[(1, 1)]);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(generate_dm(5, 2, 11).unwrap().matrix, generate_dm(5, 2, 11).unwrap().matrix);
    }

    #[test]
    fn crit_rc_on_skeletons() {
        let v = verify_crit_rc_dm(&skeleton_support(5, 3)).unwrap();
        assert!(v.holds && v.consistent);
        assert_eq!(v.crit_rc_transient, 14);

        // critical graph is a bare Hamiltonian cycle of index 0
        let mut a = skeleton_support(5, 4);
        a[(3, 0)] = MaxPlus::int(-1);
        let w = verify_crit_rc_wielandt(&a).unwrap();
        assert!(w.holds && w.consistent);
        assert_eq!(w.crit_rc_transient, 17);
        assert_eq!(boolean_index(&crit_pattern(&spectrum(&a).unwrap().crit.unwrap(), 5)).unwrap(), 0);
    }

    #[test]
    fn oracle_on_dm_skeleton() {
        let (n, g) = (5, 2);
        let a = skeleton_support(n, g);
        let dm = dm_bound(g, n).unwrap();
        let w = twice_optimal_walk(&a, g, n - 1, dm - 1).unwrap().unwrap();
        let mut expected: Vec<usize> = (g..n).collect();
        for _ in 0..g {
            expected.extend(0..n);
        }
        assert_eq!(w.nodes, expected);
        assert!(w.interesting);
        assert_eq!(w.weight, MaxPlus::one());
    }

    #[test]
    fn oracle_guards() {
        assert!(twice_optimal_walk(&Matrix::zero(9), 0, 0, 1).is_err());
        assert!(matches!(twice_optimal_walk(&skeleton_support(4, 2), 0, 9, 1), Err(Error::Precondition(_))));
        // two critical loops: no unique girth cycle
        assert!(twice_optimal_walk(&Matrix::from_fn(2, |i, j| if i == j { MaxPlus::one() } else { MaxPlus::Bottom }), 0, 0, 1).is_err());
    }
}
