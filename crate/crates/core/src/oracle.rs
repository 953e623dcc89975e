//! Ground truth at small `n`: enumerate S_n, build the graph whose edges join
//! permutations at distance at least `d`, and search it for a maximum clique.
//! A maximum clique is exactly a largest PA(n,d).

use rand::seq::{IteratorRandom, SliceRandom};
use rand::Rng;

use crate::code::PermutationCode;
use crate::error::{invalid, Error, Result};
use crate::perm::{distance, Permutation};

/// Largest `n` that [`enumerate_sn`] accepts.
pub const ENUMERATION_CAP: usize = 8;
/// Largest `n` that [`exact_max_code`] accepts.
pub const EXACT_CAP: usize = 5;

/// All permutations of length `n` in lexicographic order.
pub fn enumerate_sn(n: usize) -> Result<Vec<Permutation>> {
    enumerate_sn_with_cap(n, ENUMERATION_CAP)
}

pub fn enumerate_sn_with_cap(n: usize, cap: usize) -> Result<Vec<Permutation>> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if n > cap {
        return Err(Error::TooLarge(format!("enumerating S_{n} exceeds the cap n <= {cap}")));
    }
    let mut cur: Vec<u8> = (0..n as u8).collect();
    let mut out = vec![Permutation::from_raw(cur.clone())];
    while next_lexicographic(&mut cur) {
        out.push(Permutation::from_raw(cur.clone()));
    }
    Ok(out)
}

fn next_lexicographic(v: &mut [u8]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len())
        .rev()
        .find(|&j| v[j] > v[i - 1])
        .expect("a larger suffix element exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Fixed-size bitset over graph vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn full(len: usize) -> Self {
        let mut b = Self::empty(len);
        for i in 0..len {
            b.insert(i);
        }
        b
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    fn intersect(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn difference_in_place(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + t)
            })
        })
    }
}

/// A simple undirected graph with bitset adjacency.
#[derive(Clone, Debug)]
pub struct Graph {
    adj: Vec<Bits>,
}

impl Graph {
    pub fn new(order: usize) -> Self {
        Graph {
            adj: vec![Bits::empty(order); order],
        }
    }

    pub fn order(&self) -> usize {
        self.adj.len()
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adj[a].insert(b);
            self.adj[b].insert(a);
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count()
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &a)| vertices[i + 1..].iter().all(|&b| self.has_edge(a, b)))
    }

    /// Subgraph induced by `keep`, with vertices renumbered in the given order.
    fn induced(&self, keep: &[usize]) -> Graph {
        let mut g = Graph::new(keep.len());
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate().skip(i + 1) {
                if self.has_edge(a, b) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Degeneracy order, highest core first: repeatedly peel a minimum-degree
    /// vertex, then reverse.
    fn degeneracy_order(&self) -> Vec<usize> {
        let n = self.order();
        let mut alive = Bits::full(n);
        let mut deg: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        let mut peeled = Vec::with_capacity(n);
        for _ in 0..n {
            let v = alive.iter().min_by_key(|&v| (deg[v], v)).expect("vertices left");
            alive.remove(v);
            for u in self.adj[v].intersect(&alive).iter() {
                deg[u] -= 1;
            }
            peeled.push(v);
        }
        peeled.reverse();
        peeled
    }

    /// An exact maximum clique, by branch and bound with greedy colouring bounds.
    pub fn max_clique(&self) -> Vec<usize> {
        if self.order() == 0 {
            return Vec::new();
        }
        let order = self.degeneracy_order();
        let g = self.induced(&order);
        let mut search = CliqueSearch {
            graph: &g,
            current: Vec::new(),
            best: Vec::new(),
        };
        search.expand(Bits::full(g.order()));
        let mut clique: Vec<usize> = search.best.iter().map(|&v| order[v]).collect();
        clique.sort_unstable();
        clique
    }
}

struct CliqueSearch<'g> {
    graph: &'g Graph,
    current: Vec<usize>,
    best: Vec<usize>,
}

impl CliqueSearch<'_> {
    /// Greedy sequential colouring of `cands`. Returns vertices in colour order
    /// with their colour numbers (1-based), skipping vertices whose colour is
    /// too small to ever beat the incumbent.
    fn colour_sort(&self, cands: &Bits) -> (Vec<usize>, Vec<usize>) {
        let min_useful = (self.best.len() + 1).saturating_sub(self.current.len()).max(1);
        let mut uncoloured = cands.clone();
        let mut order = Vec::new();
        let mut colours = Vec::new();
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = q.first() {
                q.remove(v);
                uncoloured.remove(v);
                q.difference_in_place(&self.graph.adj[v]);
                if colour >= min_useful {
                    order.push(v);
                    colours.push(colour);
                }
            }
        }
        (order, colours)
    }

    fn expand(&mut self, mut cands: Bits) {
        let (order, colours) = self.colour_sort(&cands);
        for k in (0..order.len()).rev() {
            if self.current.len() + colours[k] <= self.best.len() {
                return;
            }
            let v = order[k];
            self.current.push(v);
            let next = cands.intersect(&self.graph.adj[v]);
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            cands.remove(v);
        }
    }
}

/// S_n with an edge between every pair at Hamming distance at least `d`.
#[derive(Clone, Debug)]
pub struct CompatGraph {
    pub n: usize,
    pub d: usize,
    pub nodes: Vec<Permutation>,
    pub graph: Graph,
}

impl CompatGraph {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        Self::with_cap(n, d, ENUMERATION_CAP)
    }

    pub fn with_cap(n: usize, d: usize, cap: usize) -> Result<Self> {
        if d == 0 || d > n {
            return Err(invalid(format!("need 1 <= d <= n, got n={n}, d={d}")));
        }
        let nodes = enumerate_sn_with_cap(n, cap)?;
        let mut graph = Graph::new(nodes.len());
        for (i, a) in nodes.iter().enumerate() {
            for (j, b) in nodes.iter().enumerate().skip(i + 1) {
                if distance(a.as_slice(), b.as_slice()) >= d {
                    graph.add_edge(i, j);
                }
            }
        }
        Ok(CompatGraph { n, d, nodes, graph })
    }

    fn code_from(&self, vertices: &[usize]) -> Result<PermutationCode> {
        PermutationCode::from_rows(
            self.n,
            self.d,
            vertices.iter().map(|&v| self.nodes[v].clone()).collect(),
        )
    }
}

/// Exact M(n,d) with a witness code, for `n <= EXACT_CAP`.
pub fn exact_max_code(n: usize, d: usize) -> Result<(usize, PermutationCode)> {
    exact_max_code_with_cap(n, d, EXACT_CAP)
}

/// As [`exact_max_code`], with an explicit size cap (opt-in for larger instances).
pub fn exact_max_code_with_cap(n: usize, d: usize, cap: usize) -> Result<(usize, PermutationCode)> {
    if n > cap {
        return Err(Error::TooLarge(format!(
            "exact search for n = {n} exceeds the cap n <= {cap}"
        )));
    }
    let cg = CompatGraph::with_cap(n, d, cap.max(n))?;
    // Left translation by any permutation is an isometry of S_n acting
    // transitively, so some maximum clique contains the identity (node 0).
    let neighbours: Vec<usize> = cg.graph.adj[0].iter().collect();
    let sub = cg.graph.induced(&neighbours);
    let mut clique = vec![0];
    clique.extend(sub.max_clique().into_iter().map(|v| neighbours[v]));
    let code = cg.code_from(&clique)?;
    Ok((code.len(), code))
}

/// Randomized greedy clique: start from a random permutation and keep adding
/// a uniformly chosen compatible one until none is left.
pub fn greedy_clique<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<PermutationCode> {
    let cg = CompatGraph::new(n, d)?;
    let seed = (0..cg.nodes.len())
        .collect::<Vec<_>>()
        .choose(rng)
        .copied()
        .expect("S_n is non-empty");
    let mut chosen = vec![seed];
    let mut cands = cg.graph.adj[seed].clone();
    while let Some(v) = cands.iter().choose(rng) {
        chosen.push(v);
        cands = cands.intersect(&cg.graph.adj[v]);
    }
    cg.code_from(&chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{ceil_u, floor_u, gv_lower_bound, sphere_packing_upper_bound};
    use num_bigint::BigUint;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(v: &[usize]) -> Permutation {
        Permutation::from_one_based(v).unwrap()
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_sn(3).unwrap().len(), 6);
        let s5 = enumerate_sn(5).unwrap();
        assert_eq!(s5.len(), 120);
        assert_eq!(s5[0], p(&[1, 2, 3, 4, 5]));
        assert_eq!(s5[119], p(&[5, 4, 3, 2, 1]));
        assert!(s5.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(enumerate_sn(1).unwrap(), vec![p(&[1])]);
        assert!(matches!(enumerate_sn(9), Err(Error::TooLarge(_))));
        assert!(enumerate_sn(0).is_err());
    }

    #[test]
    fn compat_graph_is_regular() {
        for (n, d) in [(4, 3), (5, 4), (5, 5)] {
            let cg = CompatGraph::new(n, d).unwrap();
            let deg = cg.graph.degree(0);
            assert!((0..cg.nodes.len()).all(|v| cg.graph.degree(v) == deg));
        }
    }

    // Brute force over all vertex subsets.
    fn brute_clique_number(g: &Graph) -> usize {
        let n = g.order();
        (0u32..1 << n)
            .filter(|mask| {
                let vs: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                g.is_clique(&vs)
            })
            .map(|mask| mask.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn max_clique_matches_brute_force_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..60 {
            let order = rng.gen_range(1..=14);
            let density = rng.gen_range(0.1..0.95);
            let mut g = Graph::new(order);
            for a in 0..order {
                for b in a + 1..order {
                    if rng.gen_bool(density) {
                        g.add_edge(a, b);
                    }
                }
            }
            let clique = g.max_clique();
            assert!(g.is_clique(&clique));
            assert_eq!(clique.len(), brute_clique_number(&g));
        }
    }

    #[test]
    fn exact_small_cases() {
        let expect = [((3, 3), 3), ((4, 2), 24), ((4, 3), 12), ((4, 4), 4), ((5, 5), 5)];
        for ((n, d), m) in expect {
            let (size, code) = exact_max_code(n, d).unwrap();
            assert_eq!(size, m, "M({n},{d})");
            assert_eq!(code.len(), m);
            assert!(code.is_valid());
        }
    }

    #[test]
    fn exact_full_distance_one() {
        // Any two distinct permutations differ somewhere.
        let (size, _) = exact_max_code(4, 1).unwrap();
        assert_eq!(size, 24);
    }

    #[test]
    fn exact_refuses_large_instances() {
        assert!(matches!(exact_max_code(6, 6), Err(Error::TooLarge(_))));
        assert!(exact_max_code(3, 4).is_err());
    }

    #[test]
    fn exact_values_respect_bounds_up_to_four() {
        for n in 1..=4 {
            for d in 1..=n {
                let (size, _) = exact_max_code(n, d).unwrap();
                let size = BigUint::from(size);
                assert!(ceil_u(&gv_lower_bound(n, d).unwrap()) <= size);
                assert!(size <= floor_u(&sphere_packing_upper_bound(n, d).unwrap()));
            }
        }
    }

    #[test]
    fn greedy_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let code = greedy_clique(3, 3, &mut rng).unwrap();
            assert_eq!(code.len(), 3);
            let code = greedy_clique(4, 4, &mut rng).unwrap();
            assert!(code.len() <= 4 && code.is_valid());
            let code = greedy_clique(5, 3, &mut rng).unwrap();
            assert!(code.len() <= 60 && code.is_valid());
        }
    }
}
