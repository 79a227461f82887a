//! Exact discrete optimal transport by successive shortest paths.
//!
//! Masses are integers (the caller scales real weights); costs are real.
//! Every augmentation saturates a supply, a demand or cancels flow on an
//! edge, so the loop terminates after finitely many rounds with an optimal
//! integral plan.

const INF: f64 = f64::INFINITY;

/// Optimal plan as `(source, sink, mass)` triples plus its total cost.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    pub flows: Vec<(usize, usize, i64)>,
    pub cost: f64,
}

/// Solves `min sum c_ij x_ij` with row sums `supply` and column sums
/// `demand`. Both must have the same total.
pub fn min_cost_transport(supply: &[i64], demand: &[i64], cost: &[Vec<f64>]) -> TransportPlan {
    let n = supply.len();
    let m = demand.len();
    debug_assert_eq!(supply.iter().sum::<i64>(), demand.iter().sum::<i64>());
    // node layout: 0 = super source, 1..=n sources, n+1..=n+m sinks, n+m+1 super sink
    let src = 0;
    let sink = n + m + 1;
    let nodes = n + m + 2;
    let mut supply_left = supply.to_vec();
    let mut demand_left = demand.to_vec();
    let mut flow = vec![vec![0i64; m]; n];
    let mut potential = vec![0.0f64; nodes];

    loop {
        if supply_left.iter().all(|&s| s == 0) {
            break;
        }
        let mut dist = vec![INF; nodes];
        let mut prev = vec![usize::MAX; nodes];
        let mut done = vec![false; nodes];
        dist[src] = 0.0;
        loop {
            let mut u = usize::MAX;
            let mut best = INF;
            for v in 0..nodes {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            let relax = |v: usize, c: f64, dist: &mut Vec<f64>, prev: &mut Vec<usize>| {
                let reduced = (c + potential[u] - potential[v]).max(0.0);
                let nd = dist[u] + reduced;
                if nd < dist[v] {
                    dist[v] = nd;
                    prev[v] = u;
                }
            };
            if u == src {
                for (i, &left) in supply_left.iter().enumerate() {
                    if left > 0 {
                        relax(1 + i, 0.0, &mut dist, &mut prev);
                    }
                }
            } else if u <= n {
                let i = u - 1;
                for (j, &c) in cost[i].iter().enumerate() {
                    relax(n + 1 + j, c, &mut dist, &mut prev);
                }
            } else if u < sink {
                let j = u - n - 1;
                for i in 0..n {
                    if flow[i][j] > 0 {
                        relax(1 + i, -cost[i][j], &mut dist, &mut prev);
                    }
                }
                if demand_left[j] > 0 {
                    relax(sink, 0.0, &mut dist, &mut prev);
                }
            }
        }
        if !dist[sink].is_finite() {
            break;
        }
        for v in 0..nodes {
            if dist[v].is_finite() {
                potential[v] += dist[v];
            }
        }
        // bottleneck along the path
        let mut amount = i64::MAX;
        let mut v = sink;
        while v != src {
            let u = prev[v];
            let cap = if u == src {
                supply_left[v - 1]
            } else if v == sink {
                demand_left[u - n - 1]
            } else if u <= n {
                i64::MAX
            } else {
                flow[v - 1][u - n - 1]
            };
            amount = amount.min(cap);
            v = u;
        }
        let mut v = sink;
        while v != src {
            let u = prev[v];
            if u == src {
                supply_left[v - 1] -= amount;
            } else if v == sink {
                demand_left[u - n - 1] -= amount;
            } else if u <= n {
                flow[u - 1][v - n - 1] += amount;
            } else {
                flow[v - 1][u - n - 1] -= amount;
            }
            v = u;
        }
    }

    let mut flows = Vec::new();
    let mut total = 0.0;
    for (i, row) in flow.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if x > 0 {
                flows.push((i, j, x));
                total += x as f64 * cost[i][j];
            }
        }
    }
    TransportPlan { flows, cost: total }
}
