//! Dinic max-flow on i128 capacities.
//!
//! Small and deterministic: arcs are scanned in insertion order, so the
//! residual-reachable set after a run (the minimal min-cut source side) is
//! reproducible. Capacities are i128 because density networks clear rational
//! thresholds into integers by multiplying through large denominators.

pub(crate) struct FlowNetwork {
    head: Vec<u32>,
    cap: Vec<i128>,
    adj: Vec<Vec<u32>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl FlowNetwork {
    pub(crate) fn new(nodes: usize) -> Self {
        FlowNetwork {
            head: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); nodes],
            level: vec![-1; nodes],
            iter: vec![0; nodes],
        }
    }

    /// Adds an arc pair: forward capacity `fwd`, reverse capacity `rev`
    /// (use `rev = fwd` for an undirected edge gadget).
    pub(crate) fn add_arc(&mut self, from: usize, to: usize, fwd: i128, rev: i128) {
        debug_assert!(fwd >= 0 && rev >= 0);
        let id = self.head.len() as u32;
        self.head.push(to as u32);
        self.cap.push(fwd);
        self.adj[from].push(id);
        self.head.push(from as u32);
        self.cap.push(rev);
        self.adj[to].push(id + 1);
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut queue = std::collections::VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &arc in &self.adj[u] {
                let v = self.head[arc as usize] as usize;
                if self.cap[arc as usize] > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, limit: i128) -> i128 {
        if u == t {
            return limit;
        }
        while self.iter[u] < self.adj[u].len() {
            let arc = self.adj[u][self.iter[u]] as usize;
            let v = self.head[arc] as usize;
            if self.cap[arc] > 0 && self.level[v] == self.level[u] + 1 {
                let pushed = self.dfs(v, t, limit.min(self.cap[arc]));
                if pushed > 0 {
                    self.cap[arc] -= pushed;
                    self.cap[arc ^ 1] += pushed;
                    return pushed;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    pub(crate) fn max_flow(&mut self, s: usize, t: usize) -> i128 {
        let mut flow = 0i128;
        while self.bfs(s, t) {
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let pushed = self.dfs(s, t, i128::MAX);
                if pushed == 0 {
                    break;
                }
                flow += pushed;
            }
        }
        flow
    }

    /// Nodes reachable from `s` in the residual graph; after `max_flow` this
    /// is the inclusion-minimal min-cut source side.
    pub(crate) fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for &arc in &self.adj[u] {
                let v = self.head[arc as usize] as usize;
                if self.cap[arc as usize] > 0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}
