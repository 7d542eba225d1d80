use std::collections::VecDeque;

/// Small dense max-flow via BFS augmenting paths (Edmonds-Karp). Float
/// capacities are fine here: separation networks carry LP values bounded
/// by sum(x) + 1 and only need 1e-7 resolution.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    n: usize,
    // Paired edge list: edge 2i and 2i+1 are a forward/backward pair.
    to: Vec<usize>,
    cap: Vec<f64>,
    adj: Vec<Vec<usize>>,
}

const EPS: f64 = 1e-12;

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        FlowNetwork {
            n,
            to: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: f64) {
        debug_assert!(from < self.n && to < self.n && cap >= 0.0);
        self.adj[from].push(self.to.len());
        self.to.push(to);
        self.cap.push(cap);
        self.adj[to].push(self.to.len());
        self.to.push(from);
        self.cap.push(0.0);
    }

    /// Max flow from s to t; mutates residual capacities.
    pub fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        loop {
            // BFS for a shortest augmenting path.
            let mut pre: Vec<Option<usize>> = vec![None; self.n];
            let mut seen = vec![false; self.n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            'bfs: while let Some(u) = queue.pop_front() {
                for &e in &self.adj[u] {
                    let v = self.to[e];
                    if !seen[v] && self.cap[e] > EPS {
                        seen[v] = true;
                        pre[v] = Some(e);
                        if v == t {
                            break 'bfs;
                        }
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut bottleneck = f64::INFINITY;
            let mut v = t;
            while v != s {
                let e = pre[v].unwrap();
                bottleneck = bottleneck.min(self.cap[e]);
                v = self.to[e ^ 1];
            }
            let mut v = t;
            while v != s {
                let e = pre[v].unwrap();
                self.cap[e] -= bottleneck;
                self.cap[e ^ 1] += bottleneck;
                v = self.to[e ^ 1];
            }
            total += bottleneck;
        }
    }

    /// Nodes reachable from s in the residual graph; call after max_flow to
    /// read off the source side of a minimum cut.
    pub fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.to[e];
                if !seen[v] && self.cap[e] > EPS {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_disjoint_paths() {
        let mut net = FlowNetwork::new(4);
        net.add_arc(0, 1, 1.0);
        net.add_arc(1, 3, 1.0);
        net.add_arc(0, 2, 1.0);
        net.add_arc(2, 3, 1.0);
        assert!((net.max_flow(0, 3) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn bottleneck_respected() {
        let mut net = FlowNetwork::new(3);
        net.add_arc(0, 1, 0.25);
        net.add_arc(1, 2, 5.0);
        assert!((net.max_flow(0, 2) - 0.25).abs() < 1e-9);
        let cut = net.residual_reachable(0);
        assert!(cut[0] && !cut[1] && !cut[2]);
    }

    #[test]
    fn augmenting_through_residual_arcs() {
        // Classic diamond where the naive path must be partially undone.
        let mut net = FlowNetwork::new(4);
        net.add_arc(0, 1, 1.0);
        net.add_arc(0, 2, 1.0);
        net.add_arc(1, 2, 1.0);
        net.add_arc(1, 3, 1.0);
        net.add_arc(2, 3, 1.0);
        assert!((net.max_flow(0, 3) - 2.0).abs() < 1e-9);
    }
}
