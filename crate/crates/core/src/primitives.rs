//! The two local exchange moves used by the greedy family and the
//! post-processor.
//!
//! `swap_in(e, c)` trades the (at most two) edges of color `c` around `e` for
//! `e` itself when `e` is strictly heavier. `swap_out(e)` does the reverse:
//! it trades `e` for up to two non-adjacent uncolored neighbors that can take
//! `e`'s color and are strictly heavier in sum.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Color, Coloring, EdgeId, Graph, Node};

/// Edges uncolored by a successful [`swap_in`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Displaced(pub [Option<EdgeId>; 2]);

impl Displaced {
    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.0.iter().flatten().copied()
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Colors the uncolored edge `e` with `col` if `w(e) > w[N_col(e)]`,
/// uncoloring `N_col(e)`. Returns the displaced edges on success.
pub fn swap_in(g: &Graph, c: &mut Coloring, e: EdgeId, col: Color) -> Result<Option<Displaced>> {
    if c.is_colored(e) {
        return Err(Error::Contract(format!("swap_in on colored edge {e:?}")));
    }
    if !g.is_present(e) {
        return Err(Error::Contract(format!("swap_in on absent edge {e:?}")));
    }
    c.stats.touched += 1;
    if g.weight(e) <= c.colored_neighborhood_weight(g, e, col) {
        return Ok(None);
    }
    let displaced = Displaced(c.colored_neighbors(g, e, col));
    for f in displaced.iter() {
        c.unset(g, f);
    }
    c.set(g, e, col);
    Ok(Some(displaced))
}

/// Best replacement for the colored edge `e` (or for a just-vacated slot).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Replacement {
    weight: u64,
    at_u: Option<EdgeId>,
    at_v: Option<EdgeId>,
}

/// Uncolored edges at `x` (excluding `skip`) that could take `col`:
/// `col` must be free at the far endpoint and free at `x` apart from `skip`.
fn candidates<R: Rng + ?Sized>(
    g: &Graph,
    c: &mut Coloring,
    x: Node,
    skip: Option<EdgeId>,
    col: Color,
    beta: Option<usize>,
    rng: &mut R,
) -> Vec<(EdgeId, Node)> {
    if c.occupant(x, col).is_some_and(|f| Some(f) != skip) {
        return Vec::new();
    }
    let incident: Vec<(Node, EdgeId)> = g.neighbors(x).iter().copied().filter(|&(_, f)| Some(f) != skip).collect();
    let pool: Vec<(Node, EdgeId)> = match beta {
        Some(b) if b < incident.len() => {
            rand::seq::index::sample(rng, incident.len(), b).iter().map(|i| incident[i]).collect()
        }
        _ => incident,
    };
    c.stats.touched += pool.len() as u64;
    let mut out: Vec<(EdgeId, Node)> = pool
        .into_iter()
        .filter(|&(y, f)| !c.is_colored(f) && c.is_free(y, col))
        .map(|(y, f)| (f, y))
        .collect();
    out.sort_unstable_by(|a, b| g.weight(b.0).cmp(&g.weight(a.0)).then(a.0.cmp(&b.0)));
    out
}

/// Maximum-weight choice of at most one candidate per side whose far
/// endpoints differ. Ties resolve to the lexicographically first pair in
/// (weight desc, id asc) candidate order.
fn best_replacement(g: &Graph, at_u: &[(EdgeId, Node)], at_v: &[(EdgeId, Node)]) -> Option<Replacement> {
    let mut best: Option<Replacement> = None;
    let options_u = at_u.iter().map(|&(f, y)| Some((f, y))).chain(std::iter::once(None));
    for a in options_u {
        let b = at_v.iter().find(|&&(_, y)| a.is_none_or(|(_, ya)| ya != y)).copied();
        let weight = a.map_or(0, |(f, _)| g.weight(f)) + b.map_or(0, |(f, _)| g.weight(f));
        if weight > 0 && best.is_none_or(|r| weight > r.weight) {
            best = Some(Replacement { weight, at_u: a.map(|(f, _)| f), at_v: b.map(|(f, _)| f) });
        }
    }
    best
}

fn search<R: Rng + ?Sized>(
    g: &Graph,
    c: &mut Coloring,
    (u, v): (Node, Node),
    skip: Option<EdgeId>,
    col: Color,
    beta: Option<usize>,
    rng: &mut R,
) -> Option<Replacement> {
    let at_u = candidates(g, c, u, skip, col, beta, rng);
    let at_v = candidates(g, c, v, skip, col, beta, rng);
    best_replacement(g, &at_u, &at_v)
}

fn apply(g: &Graph, c: &mut Coloring, r: Replacement, col: Color) {
    for f in [r.at_u, r.at_v].into_iter().flatten() {
        c.set(g, f, col);
    }
}

fn swap_out_impl<R: Rng + ?Sized>(g: &Graph, c: &mut Coloring, e: EdgeId, beta: Option<usize>, rng: &mut R) -> Result<bool> {
    let col = c.color(e).ok_or_else(|| Error::Contract(format!("swap_out on uncolored edge {e:?}")))?;
    c.stats.touched += 1;
    let found = search(g, c, g.endpoints(e), Some(e), col, beta, rng);
    match found {
        Some(r) if r.weight > g.weight(e) => {
            c.unset(g, e);
            apply(g, c, r, col);
            Ok(true)
        }
        _ => Ok(false),
    }
}

/// Replaces the colored edge `e` by its best pair of non-adjacent uncolored
/// neighbors when they are strictly heavier. Freeness of `e`'s color is
/// judged as if `e` were already uncolored.
pub fn swap_out(g: &Graph, c: &mut Coloring, e: EdgeId) -> Result<bool> {
    swap_out_impl(g, c, e, None, &mut NoRng)
}

/// [`swap_out`] restricted to `beta` incident edges sampled per endpoint.
/// With `beta` at least the degree of both endpoints it is exactly
/// [`swap_out`] and does not draw from `rng`.
pub fn swap_out_sampled<R: Rng + ?Sized>(g: &Graph, c: &mut Coloring, e: EdgeId, beta: usize, rng: &mut R) -> Result<bool> {
    swap_out_impl(g, c, e, Some(beta), rng)
}

/// After a colored edge `{u, v}` was deleted, colors the best pair of
/// uncolored edges at `u` and `v` with the vacated color `col`.
pub fn fill_vacancy<R: Rng + ?Sized>(
    g: &Graph,
    c: &mut Coloring,
    (u, v): (Node, Node),
    col: Color,
    beta: Option<usize>,
    rng: &mut R,
) -> bool {
    match search(g, c, (u, v), None, col, beta, rng) {
        Some(r) => {
            apply(g, c, r, col);
            true
        }
        None => false,
    }
}

/// Rng that is never asked for anything: only handed to code paths that
/// take every candidate.
struct NoRng;

impl rand::RngCore for NoRng {
    fn next_u32(&mut self) -> u32 {
        unreachable!("unsampled path drew a random number")
    }
    fn next_u64(&mut self) -> u64 {
        unreachable!("unsampled path drew a random number")
    }
    fn fill_bytes(&mut self, _: &mut [u8]) {
        unreachable!("unsampled path drew a random number")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::validate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn path(ws: &[u64]) -> Graph {
        let edges: Vec<_> = ws.iter().enumerate().map(|(i, &w)| (i as u32, i as u32 + 1, w)).collect();
        Graph::from_edges(ws.len() as u32 + 1, &edges).unwrap()
    }

    #[test]
    fn swap_in_strict() {
        let g = path(&[12, 10, 4]);
        let (e01, e12) = (g.find_edge(0, 1).unwrap(), g.find_edge(1, 2).unwrap());
        let mut c = Coloring::new(4, 1);
        c.set(&g, e12, Color(0));
        let d = swap_in(&g, &mut c, e01, Color(0)).unwrap().unwrap();
        assert_eq!(d.iter().collect::<Vec<_>>(), vec![e12]);
        assert_eq!(c.color(e01), Some(Color(0)));
        assert!(!c.is_colored(e12));

        let g = path(&[10, 10, 4]);
        let mut c = Coloring::new(4, 1);
        c.set(&g, e12, Color(0));
        assert_eq!(swap_in(&g, &mut c, e01, Color(0)).unwrap(), None);
        assert_eq!(c.color(e12), Some(Color(0)));
    }

    #[test]
    fn swap_in_empty_neighborhood() {
        let g = path(&[5]);
        let mut c = Coloring::new(2, 1);
        let e = g.find_edge(0, 1).unwrap();
        let d = swap_in(&g, &mut c, e, Color(0)).unwrap().unwrap();
        assert!(d.is_empty());
        assert!(swap_in(&g, &mut c, e, Color(0)).is_err());
    }

    #[test]
    fn swap_out_examples() {
        let g = path(&[4, 10, 4]);
        let e12 = g.find_edge(1, 2).unwrap();
        let mut c = Coloring::new(4, 1);
        c.set(&g, e12, Color(0));
        assert!(!swap_out(&g, &mut c, e12).unwrap());

        let g = path(&[4, 6, 4]);
        let mut c = Coloring::new(4, 1);
        c.set(&g, e12, Color(0));
        assert!(swap_out(&g, &mut c, e12).unwrap());
        assert!(!c.is_colored(e12));
        assert_eq!(c.color(g.find_edge(0, 1).unwrap()), Some(Color(0)));
        assert_eq!(c.color(g.find_edge(2, 3).unwrap()), Some(Color(0)));
        assert_eq!(c.total_weight(), 8);
        validate(&g, &c).unwrap();
    }

    #[test]
    fn swap_out_no_candidates() {
        let g = path(&[4, 10, 4]);
        let mut c = Coloring::new(4, 1);
        let e12 = g.find_edge(1, 2).unwrap();
        c.set(&g, e12, Color(0));
        assert!(swap_out(&g, &mut c, g.find_edge(0, 1).unwrap()).is_err());
        let g = path(&[10]);
        let mut c = Coloring::new(2, 1);
        let e = g.find_edge(0, 1).unwrap();
        c.set(&g, e, Color(0));
        assert!(!swap_out(&g, &mut c, e).unwrap());
    }

    #[test]
    fn swap_out_rejects_adjacent_pair() {
        // triangle 0-1-2 plus colored 0-1: the two candidates meet at 2
        let g = Graph::from_edges(3, &[(0, 1, 10), (0, 2, 6), (1, 2, 6)]).unwrap();
        let e01 = g.find_edge(0, 1).unwrap();
        let mut c = Coloring::new(3, 1);
        c.set(&g, e01, Color(0));
        assert!(!swap_out(&g, &mut c, e01).unwrap());
        assert_eq!(c.color(e01), Some(Color(0)));
    }

    #[test]
    fn sampled_with_large_beta_matches() {
        let g = Graph::from_edges(6, &[(0, 1, 5), (0, 2, 3), (0, 3, 4), (1, 4, 2), (1, 5, 1)]).unwrap();
        let e01 = g.find_edge(0, 1).unwrap();
        for seed in 0..5 {
            let mut a = Coloring::new(6, 1);
            a.set(&g, e01, Color(0));
            let mut b = a.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ra = swap_out(&g, &mut a, e01).unwrap();
            let rb = swap_out_sampled(&g, &mut b, e01, g.max_degree(), &mut rng).unwrap();
            assert_eq!(ra, rb);
            assert!(a.same_assignment(&b));
        }
    }
}
