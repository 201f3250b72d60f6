//! Reference computations for the integration tests.
//!
//! Everything here works from first principles on walks: naive matrix
//! products, the maximum cycle mean as the best diagonal entry of `A^k / k`,
//! critical arcs via best closing walks, and CSR terms as best weights of
//! walks through critical nodes. Only `MaxPlus`, `Rational` and `Matrix`
//! storage are taken from the library.
#![allow(dead_code)]

use maxplus::{Matrix, MaxPlus, Rational};
use num_integer::Integer;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn naive_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.dim();
    Matrix::from_fn(n, |i, j| {
        (0..n).map(|k| a.get(i, k).otimes(b.get(k, j))).max().unwrap_or(MaxPlus::Bottom)
    })
}

pub fn naive_powers(a: &Matrix, upto: usize) -> Vec<Matrix> {
    let mut out = vec![Matrix::identity(a.dim())];
    for k in 1..=upto {
        let next = naive_mul(&out[k - 1], a);
        out.push(next);
    }
    out
}

pub fn naive_oplus(a: &Matrix, b: &Matrix) -> Matrix {
    Matrix::from_fn(a.dim(), |i, j| a.get(i, j).clone().max(b.get(i, j).clone()))
}

pub fn shift(a: &Matrix, c: &MaxPlus) -> Matrix {
    Matrix::from_fn(a.dim(), |i, j| a.get(i, j).otimes(c))
}

/// `max_{k <= n, i} (A^k)_ii / k`.
pub fn lambda(a: &Matrix) -> MaxPlus {
    let n = a.dim();
    let pows = naive_powers(a, n);
    let mut best = MaxPlus::Bottom;
    for (k, p) in pows.iter().enumerate().skip(1) {
        for i in 0..n {
            if let Some(x) = p.get(i, i).finite() {
                let mean = MaxPlus::Finite(x.div_int(k as i64));
                best = best.max(mean);
            }
        }
    }
    best
}

pub fn normalized(a: &Matrix, lambda: &MaxPlus) -> Matrix {
    match lambda.finite() {
        Some(l) => shift(a, &MaxPlus::Finite(-l.clone())),
        None => a.clone(),
    }
}

/// Structure of the critical graph computed from walks.
pub struct CritOracle {
    pub lambda: MaxPlus,
    pub arcs: Vec<(usize, usize)>,
    pub nodes: Vec<bool>,
    /// Maximal girth over the components.
    pub girth: usize,
    pub gamma: usize,
}

/// Arc `(i, j)` is critical when `a'_ij` plus the best walk `j -> i` of
/// length below `n` is zero in the normalized matrix.
pub fn crit(a: &Matrix) -> Option<CritOracle> {
    let n = a.dim();
    let lambda = lambda(a);
    lambda.finite()?;
    let na = normalized(a, &lambda);
    let pows = naive_powers(&na, n);
    let back = |j: usize, i: usize| (0..n).map(|k| pows[k].get(j, i).clone()).max().unwrap();
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if na.get(i, j).otimes(&back(j, i)) == MaxPlus::one() {
                arcs.push((i, j));
            }
        }
    }
    let mut nodes = vec![false; n];
    for &(i, _) in &arcs {
        nodes[i] = true;
    }
    // reachability inside the critical graph
    let c = Matrix::from_fn(n, |i, j| if arcs.contains(&(i, j)) { MaxPlus::one() } else { MaxPlus::Bottom });
    let cp = naive_powers(&c, 3 * n);
    let reach = |i: usize, j: usize| (0..=n).any(|k| cp[k].get(i, j).is_finite());
    let closed: Vec<Vec<usize>> = (0..n).map(|i| (1..=3 * n).filter(|&k| cp[k].get(i, i).is_finite()).collect()).collect();
    let mut girth = 0;
    let mut gamma = 1;
    for i in (0..n).filter(|&i| nodes[i]) {
        let comp: Vec<usize> = (0..n).filter(|&j| nodes[j] && reach(i, j) && reach(j, i)).collect();
        let comp_girth = comp.iter().map(|&j| closed[j][0]).min().unwrap();
        let comp_gcd = closed[i].iter().fold(0, |g, &k| g.gcd(&k));
        girth = girth.max(comp_girth);
        gamma = gamma.lcm(&comp_gcd);
    }
    Some(CritOracle { lambda, arcs, nodes, girth, gamma })
}

/// `table[r]` holds the best normalized weight of walks `i -> j` through a
/// critical node with length `= r (mod gamma)`; `CS^tR = lambda^t ⊗ table[t mod gamma]`.
pub struct CsrOracle {
    pub lambda: MaxPlus,
    pub gamma: usize,
    table: Vec<Matrix>,
}

impl CsrOracle {
    pub fn new(a: &Matrix, c: &CritOracle) -> Self {
        let n = a.dim();
        let na = normalized(a, &c.lambda);
        let max_len = c.gamma * (n * n + n) + n;
        let mut table = vec![Matrix::zero(n); c.gamma];
        for i in 0..n {
            // layer[v][flag]: best weight of a walk i -> v of the current length
            let mut layer = vec![[MaxPlus::Bottom, MaxPlus::Bottom]; n];
            layer[i][usize::from(c.nodes[i])] = MaxPlus::one();
            for len in 0..=max_len {
                let r = len % c.gamma;
                for v in 0..n {
                    let cur = table[r].get(i, v).clone();
                    table[r][(i, v)] = cur.max(layer[v][1].clone());
                }
                let mut next = vec![[MaxPlus::Bottom, MaxPlus::Bottom]; n];
                for u in 0..n {
                    for f in 0..2 {
                        if layer[u][f].is_bottom() {
                            continue;
                        }
                        for v in 0..n {
                            let w = layer[u][f].otimes(na.get(u, v));
                            let nf = usize::from(f == 1 || c.nodes[v]);
                            if w > next[v][nf] {
                                next[v][nf] = w;
                            }
                        }
                    }
                }
                layer = next;
            }
        }
        CsrOracle { lambda: c.lambda.clone(), gamma: c.gamma, table }
    }

    pub fn at(&self, t: usize) -> Matrix {
        shift(&self.table[t % self.gamma], &self.lambda.power(t as u64))
    }
}

pub fn wi(n: usize) -> usize {
    if n == 1 {
        0
    } else {
        (n - 1) * (n - 1) + 1
    }
}

pub fn dm(g: usize, n: usize) -> usize {
    (g as i64 * (n as i64 - 2) + n as i64) as usize
}

/// `T1` by a direct scan of `A^t` against `CS^tR ⊕ B^t`, where `B` zeroes
/// the critical rows and columns.
pub fn t1(a: &Matrix) -> usize {
    let n = a.dim();
    let c = crit(a);
    let (csr, b, horizon) = match &c {
        Some(c) => {
            let b = Matrix::from_fn(n, |i, j| {
                if c.nodes[i] || c.nodes[j] {
                    MaxPlus::Bottom
                } else {
                    a.get(i, j).clone()
                }
            });
            (Some(CsrOracle::new(a, c)), b, wi(n).max(dm(c.girth, n)) + c.gamma)
        }
        None => (None, a.clone(), wi(n) + 1),
    };
    let ap = naive_powers(a, horizon);
    let bp = naive_powers(&b, horizon);
    let mut last = 0;
    for t in 1..=horizon {
        let expansion = match &csr {
            Some(csr) => naive_oplus(&csr.at(t), &bp[t]),
            None => bp[t].clone(),
        };
        if ap[t] != expansion {
            last = t;
        }
    }
    last + 1
}

/// Random entry `k / d` with `k` in `-6..=6` and `d` in `{1, 2, 3}`.
pub fn random_entry(rng: &mut ChaCha8Rng) -> MaxPlus {
    MaxPlus::Finite(Rational::new(rng.gen_range(-6..=6), rng.gen_range(1..=3)))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Matrix {
    Matrix::from_fn(n, |_, _| if rng.gen_bool(density) { random_entry(rng) } else { MaxPlus::Bottom })
}

/// A random matrix whose digraph has a cycle.
pub fn random_cyclic_matrix(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    loop {
        let density = rng.gen_range(0.2..0.8);
        let a = random_matrix(rng, n, density);
        if lambda(&a).is_finite() {
            return a;
        }
    }
}

/// Negative margin in `[-3, -1/4]`.
pub fn random_margin(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(-rng.gen_range(1..=12), 4)
}
