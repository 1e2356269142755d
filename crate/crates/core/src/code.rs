//! Sparse parity-check codes over Z_q.
//!
//! A code is stored row-wise: each check node lists `(variable, coefficient)`
//! pairs with unit coefficients. Edges are numbered in row-major order and
//! the variable-side adjacency indexes into the same numbering, so message
//! buffers in the decoders are flat `edge × q` arrays.
//!
//! Text format: a header line `q m n`, then one line per check,
//! `deg idx_1 coef_1 ... idx_deg coef_deg`, with 0-based indices.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::ring::{RingContext, Symbol};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckCode {
    ctx: RingContext,
    n: usize,
    check_ptr: Vec<usize>,
    edge_var: Vec<usize>,
    edge_coef: Vec<Symbol>,
    edge_check: Vec<usize>,
    var_edges: Vec<Vec<usize>>,
}

impl ParityCheckCode {
    /// Builds a code from per-check `(column, coefficient)` lists.
    pub fn from_rows(ctx: &RingContext, n: usize, rows: Vec<Vec<(usize, Symbol)>>) -> Result<Self> {
        let mut check_ptr = vec![0];
        let mut edge_var = Vec::new();
        let mut edge_coef = Vec::new();
        let mut edge_check = Vec::new();
        let mut var_edges = vec![Vec::new(); n];
        for (c, row) in rows.iter().enumerate() {
            let mut seen = std::collections::HashSet::new();
            for &(v, h) in row {
                if v >= n {
                    return Err(Error::domain(format!("row {c}: column {v} out of range (n = {n})")));
                }
                if !ctx.is_unit(h) {
                    return Err(Error::domain(format!(
                        "row {c}: coefficient {h} is not a unit of Z_{}",
                        ctx.q()
                    )));
                }
                if !seen.insert(v) {
                    return Err(Error::domain(format!("row {c}: duplicate column {v}")));
                }
                var_edges[v].push(edge_var.len());
                edge_var.push(v);
                edge_coef.push(h);
                edge_check.push(c);
            }
            check_ptr.push(edge_var.len());
        }
        Ok(ParityCheckCode {
            ctx: ctx.clone(),
            n,
            check_ptr,
            edge_var,
            edge_coef,
            edge_check,
            var_edges,
        })
    }

    pub fn ctx(&self) -> &RingContext {
        &self.ctx
    }

    /// Number of variable nodes (block length).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of check nodes.
    pub fn m(&self) -> usize {
        self.check_ptr.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.edge_var.len()
    }

    /// `1 - m/n`.
    pub fn design_rate(&self) -> f64 {
        1.0 - self.m() as f64 / self.n as f64
    }

    /// Edge ids of check `c`.
    #[inline]
    pub fn check_edges(&self, c: usize) -> std::ops::Range<usize> {
        self.check_ptr[c]..self.check_ptr[c + 1]
    }

    /// Edge ids of variable `v`.
    #[inline]
    pub fn var_edges(&self, v: usize) -> &[usize] {
        &self.var_edges[v]
    }

    #[inline]
    pub fn edge_var(&self, e: usize) -> usize {
        self.edge_var[e]
    }

    #[inline]
    pub fn edge_check(&self, e: usize) -> usize {
        self.edge_check[e]
    }

    #[inline]
    pub fn edge_coef(&self, e: usize) -> Symbol {
        self.edge_coef[e]
    }

    pub fn row(&self, c: usize) -> Vec<(usize, Symbol)> {
        self.check_edges(c)
            .map(|e| (self.edge_var[e], self.edge_coef[e]))
            .collect()
    }

    pub fn check_degree(&self, c: usize) -> usize {
        self.check_ptr[c + 1] - self.check_ptr[c]
    }

    pub fn var_degree(&self, v: usize) -> usize {
        self.var_edges[v].len()
    }

    /// `Some((v, c))` when every column has degree v and every row degree c.
    pub fn regular_degrees(&self) -> Option<(usize, usize)> {
        let v = self.var_degree(0);
        let c = self.check_degree(0);
        let ok = (0..self.n).all(|j| self.var_degree(j) == v)
            && (0..self.m()).all(|i| self.check_degree(i) == c);
        ok.then_some((v, c))
    }

    /// `s_i = Σ_j h_ij x_j mod q`.
    pub fn syndrome(&self, x: &[Symbol]) -> Result<Vec<Symbol>> {
        if x.len() != self.n {
            return Err(Error::domain(format!(
                "word length {} differs from n = {}",
                x.len(),
                self.n
            )));
        }
        if let Some(&bad) = x.iter().find(|&&a| a >= self.ctx.q()) {
            return Err(Error::domain(format!("symbol {bad} not in Z_{}", self.ctx.q())));
        }
        Ok((0..self.m()).map(|c| self.check_sum(c, x)).collect())
    }

    #[inline]
    fn check_sum(&self, c: usize, x: &[Symbol]) -> Symbol {
        let q = self.ctx.q();
        self.check_edges(c)
            .map(|e| self.edge_coef[e] * x[self.edge_var[e]])
            .sum::<usize>()
            % q
    }

    /// True when every check is satisfied. `x` must have length n.
    pub fn is_codeword(&self, x: &[Symbol]) -> bool {
        x.len() == self.n && (0..self.m()).all(|c| self.check_sum(c, x) == 0)
    }

    /// Length of the shortest cycle of the Tanner graph, `None` if acyclic.
    pub fn girth(&self) -> Option<usize> {
        // node ids: variables 0..n, checks n..n+m
        let total = self.n + self.m();
        let neighbors = |u: usize| -> Vec<(usize, usize)> {
            if u < self.n {
                self.var_edges[u].iter().map(|&e| (self.n + self.edge_check[e], e)).collect()
            } else {
                self.check_edges(u - self.n).map(|e| (self.edge_var[e], e)).collect()
            }
        };
        let mut best = usize::MAX;
        let mut dist = vec![usize::MAX; total];
        let mut via = vec![usize::MAX; total];
        for start in 0..total {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[start] = 0;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                if 2 * dist[u] + 1 >= best {
                    break;
                }
                for (w, e) in neighbors(u) {
                    if e == via[u] && dist[u] > 0 {
                        continue;
                    }
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        via[w] = e;
                        queue.push_back(w);
                    } else {
                        best = best.min(dist[u] + dist[w] + 1);
                    }
                }
            }
        }
        (best != usize::MAX).then_some(best)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.ctx.q(), self.m(), self.n);
        for c in 0..self.m() {
            write!(s, "{}", self.check_degree(c)).unwrap();
            for e in self.check_edges(c) {
                write!(s, " {} {}", self.edge_var[e], self.edge_coef[e]).unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let perr = |line: usize, msg: String| Error::Parse { line: line + 1, msg };
        let (hl, header) = lines.next().ok_or_else(|| perr(0, "missing header".into()))?;
        let nums = |i: usize, l: &str| -> Result<Vec<usize>> {
            l.split_whitespace()
                .map(|t| t.parse().map_err(|_| perr(i, format!("bad integer `{t}`"))))
                .collect()
        };
        let h = nums(hl, header)?;
        if h.len() != 3 {
            return Err(perr(hl, "header must be `q m n`".into()));
        }
        let (q, m, n) = (h[0], h[1], h[2]);
        let ctx = RingContext::new(q)?;
        let mut rows = Vec::with_capacity(m);
        for _ in 0..m {
            let (i, l) = lines.next().ok_or_else(|| perr(usize::MAX - 1, format!("expected {m} rows")))?;
            let f = nums(i, l)?;
            let deg = *f.first().ok_or_else(|| perr(i, "empty row".into()))?;
            if f.len() != 1 + 2 * deg {
                return Err(perr(i, format!("row declares degree {deg} but has {} fields", f.len())));
            }
            rows.push(f[1..].chunks(2).map(|p| (p[0], p[1])).collect());
        }
        if let Some((i, _)) = lines.next() {
            return Err(perr(i, "trailing data after the last row".into()));
        }
        Self::from_rows(&ctx, n, rows)
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn check_regular_params(n: usize, v: usize, c: usize) -> Result<usize> {
    if n == 0 || v == 0 || c == 0 {
        return Err(Error::domain("n, v and c must be positive"));
    }
    if !(n * v).is_multiple_of(c) {
        return Err(Error::domain(format!("n·v = {} is not divisible by c = {c}", n * v)));
    }
    let m = n * v / c;
    if c > n || v > m {
        return Err(Error::domain(format!("degrees ({v}, {c}) impossible for n = {n}")));
    }
    Ok(m)
}

fn random_unit<R: Rng + ?Sized>(ctx: &RingContext, rng: &mut R) -> Symbol {
    *ctx.units().choose(rng).expect("Z_q has at least one unit")
}

fn attach_coefficients<R: Rng + ?Sized>(
    ctx: &RingContext,
    n: usize,
    adjacency: Vec<Vec<usize>>,
    rng: &mut R,
) -> Result<ParityCheckCode> {
    let rows = adjacency
        .into_iter()
        .map(|cols| cols.into_iter().map(|v| (v, random_unit(ctx, rng))).collect())
        .collect();
    ParityCheckCode::from_rows(ctx, n, rows)
}

/// Draws a code from the unstructured regular (v, c) ensemble.
///
/// The `n·v` variable sockets are matched to a uniformly shuffled list of
/// `m·c` check sockets. A socket that would duplicate an edge is swapped
/// with a random later socket that does not; if none exists the whole
/// matching is redrawn. Coefficients are i.i.d. uniform units.
pub fn sample_regular_ensemble<R: Rng + ?Sized>(
    ctx: &RingContext,
    n: usize,
    v: usize,
    c: usize,
    rng: &mut R,
) -> Result<ParityCheckCode> {
    let m = check_regular_params(n, v, c)?;
    'redraw: for _ in 0..1000 {
        let mut sockets: Vec<usize> = (0..m).flat_map(|ch| std::iter::repeat_n(ch, c)).collect();
        sockets.shuffle(rng);
        let mut adjacency = vec![Vec::with_capacity(c); m];
        for k in 0..sockets.len() {
            let var = k / v;
            let first = var * v;
            let taken = |ch: usize, s: &[usize]| s[first..k].contains(&ch);
            if taken(sockets[k], &sockets) {
                let options: Vec<usize> = (k + 1..sockets.len())
                    .filter(|&j| !taken(sockets[j], &sockets))
                    .collect();
                match options.choose(rng) {
                    Some(&j) => sockets.swap(k, j),
                    None => continue 'redraw,
                }
            }
            adjacency[sockets[k]].push(var);
        }
        for row in adjacency.iter_mut() {
            row.sort_unstable();
        }
        return attach_coefficients(ctx, n, adjacency, rng);
    }
    Err(Error::domain("could not draw a simple regular graph"))
}

/// Progressive edge growth for a regular (v, c) Tanner graph.
///
/// Variables are processed in order. The first edge of a variable goes to
/// a check of minimum current degree; each further edge goes to a check
/// that is unreachable from the variable's current subtree or, if all are
/// reachable, at maximum BFS depth. Ties are broken toward the lowest
/// check degree and then uniformly with `rng`. Only checks with spare
/// degree are eligible. Coefficients are drawn after the graph is complete.
/// If the greedy pass dead-ends (no eligible check) it restarts.
pub fn peg_construct<R: Rng + ?Sized>(
    ctx: &RingContext,
    n: usize,
    v: usize,
    c: usize,
    rng: &mut R,
) -> Result<ParityCheckCode> {
    let m = check_regular_params(n, v, c)?;
    for _ in 0..100 {
        if let Some(adjacency) = peg_graph(n, m, v, c, rng) {
            return attach_coefficients(ctx, n, adjacency, rng);
        }
    }
    Err(Error::domain(format!("PEG failed to place all edges for ({v}, {c}), n = {n}")))
}

fn peg_graph<R: Rng + ?Sized>(n: usize, m: usize, v: usize, c: usize, rng: &mut R) -> Option<Vec<Vec<usize>>> {
    let mut check_adj: Vec<Vec<usize>> = vec![Vec::with_capacity(c); m];
    let mut var_adj: Vec<Vec<usize>> = vec![Vec::with_capacity(v); n];
    let mut depth = vec![usize::MAX; m];
    let mut var_seen = vec![false; n];
    for var in 0..n {
        for k in 0..v {
            depth.iter_mut().for_each(|d| *d = usize::MAX);
            if k > 0 {
                // BFS over checks from `var`, depth counted in check layers
                var_seen.iter_mut().for_each(|s| *s = false);
                var_seen[var] = true;
                let mut frontier: Vec<usize> = var_adj[var].clone();
                for &ch in &frontier {
                    depth[ch] = 0;
                }
                let mut level = 0;
                while !frontier.is_empty() {
                    level += 1;
                    let mut next = Vec::new();
                    for &ch in &frontier {
                        for &u in &check_adj[ch] {
                            if var_seen[u] {
                                continue;
                            }
                            var_seen[u] = true;
                            for &ch2 in &var_adj[u] {
                                if depth[ch2] == usize::MAX {
                                    depth[ch2] = level;
                                    next.push(ch2);
                                }
                            }
                        }
                    }
                    frontier = next;
                }
            }
            let eligible = (0..m).filter(|&ch| check_adj[ch].len() < c && !var_adj[var].contains(&ch));
            let key = |ch: usize| (std::cmp::Reverse(depth[ch]), check_adj[ch].len());
            let best = eligible.clone().map(key).min()?;
            let ties: Vec<usize> = eligible.filter(|&ch| key(ch) == best).collect();
            let ch = *ties.choose(rng)?;
            check_adj[ch].push(var);
            var_adj[var].push(ch);
        }
    }
    Some(check_adj)
}

/// Draws codewords by elimination over Z_q with unit pivots.
///
/// Rows are reduced using only unit pivots. Rows left without a unit pivot
/// constrain only free columns; every free column touching such a row is
/// pinned to zero, the other free columns are uniform, and the pivot
/// columns are solved. Every output is a codeword; when H has no
/// non-unit obstructions the draw is uniform over the code.
#[derive(Debug, Clone)]
pub struct CodewordSampler {
    ctx: RingContext,
    n: usize,
    reduced: Vec<Vec<Symbol>>,
    pivots: Vec<(usize, usize)>,
    free: Vec<usize>,
    pinned: Vec<bool>,
}

impl CodewordSampler {
    pub fn new(code: &ParityCheckCode) -> Self {
        let ctx = code.ctx().clone();
        let n = code.n();
        let mut a: Vec<Vec<Symbol>> = (0..code.m())
            .map(|c| {
                let mut row = vec![0; n];
                for (v, h) in code.row(c) {
                    row[v] = h;
                }
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut is_pivot = vec![false; n];
        let mut residual = Vec::new();
        for r in 0..a.len() {
            let Some(col) = (0..n).find(|&j| !is_pivot[j] && ctx.is_unit(a[r][j])) else {
                residual.push(r);
                continue;
            };
            let inv = ctx.inverse(a[r][col]).unwrap();
            for x in a[r].iter_mut() {
                *x = ctx.mul(*x, inv);
            }
            let pivot_row = a[r].clone();
            for (r2, row) in a.iter_mut().enumerate() {
                if r2 == r || row[col] == 0 {
                    continue;
                }
                let f = row[col];
                for (x, &p) in row.iter_mut().zip(&pivot_row) {
                    *x = ctx.sub(*x, ctx.mul(f, p));
                }
            }
            is_pivot[col] = true;
            pivots.push((r, col));
        }
        let mut pinned = vec![false; n];
        for &r in &residual {
            for j in 0..n {
                if a[r][j] != 0 {
                    pinned[j] = true;
                }
            }
        }
        let free = (0..n).filter(|&j| !is_pivot[j]).collect();
        CodewordSampler {
            ctx,
            n,
            reduced: a,
            pivots,
            free,
            pinned,
        }
    }

    /// Number of free coordinates that are drawn at random.
    pub fn dimension(&self) -> usize {
        self.free.iter().filter(|&&j| !self.pinned[j]).count()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Symbol> {
        let q = self.ctx.q();
        let mut x = vec![0; self.n];
        for &j in &self.free {
            if !self.pinned[j] {
                x[j] = rng.gen_range(0..q);
            }
        }
        for &(r, col) in &self.pivots {
            let s: usize = self
                .free
                .iter()
                .map(|&j| self.reduced[r][j] * x[j])
                .sum::<usize>()
                % q;
            x[col] = self.ctx.neg(s);
        }
        x
    }
}
