//! Exact k-coloring by backtracking with DSATUR vertex selection.

/// Returns a proper coloring with colors `0..k` if one exists.
pub fn find_coloring(adj: &[Vec<usize>], k: usize) -> Option<Vec<u16>> {
    let n = adj.len();
    if n == 0 {
        return Some(Vec::new());
    }
    if k == 0 {
        return None;
    }
    let k = k.min(n);
    let mut colors = vec![UNCOLORED; n];
    let mut state = Search { adj, k, colors: &mut colors };
    state.extend(0, 0).then_some(colors)
}

/// Smallest number of colors that properly colors the graph.
pub fn chromatic_number(adj: &[Vec<usize>]) -> usize {
    (0..=adj.len())
        .find(|&k| find_coloring(adj, k).is_some())
        .expect("n colors always suffice")
}

const UNCOLORED: u16 = u16::MAX;

struct Search<'a> {
    adj: &'a [Vec<usize>],
    k: usize,
    colors: &'a mut [u16],
}

impl Search<'_> {
    /// `used` is the number of distinct colors in play; new colors are only
    /// opened one at a time, which removes color-permutation symmetry.
    fn extend(&mut self, assigned: usize, used: usize) -> bool {
        if assigned == self.adj.len() {
            return true;
        }
        let v = self.pick_vertex();
        let limit = (used + 1).min(self.k);
        for c in 0..limit {
            if self.adj[v].iter().any(|&w| self.colors[w] == c as u16) {
                continue;
            }
            self.colors[v] = c as u16;
            if self.extend(assigned + 1, used.max(c + 1)) {
                return true;
            }
        }
        self.colors[v] = UNCOLORED;
        false
    }

    /// Uncolored vertex with the most distinct neighbor colors, then the
    /// highest degree.
    fn pick_vertex(&self) -> usize {
        let mut best = (0usize, 0usize, usize::MAX);
        for v in 0..self.adj.len() {
            if self.colors[v] != UNCOLORED {
                continue;
            }
            let mut seen: Vec<u16> = self.adj[v]
                .iter()
                .map(|&w| self.colors[w])
                .filter(|&c| c != UNCOLORED)
                .collect();
            seen.sort_unstable();
            seen.dedup();
            let key = (seen.len(), self.adj[v].len());
            if best.2 == usize::MAX || key > (best.0, best.1) {
                best = (key.0, key.1, v);
            }
        }
        best.2
    }
}
