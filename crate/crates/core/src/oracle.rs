//! Slow reference implementations, compiled only for tests.
//!
//! Nothing here shares code with the count tables: estimates come from
//! enumerating every ordered node pair, and likelihoods are evaluated node by
//! node with explicit indicator products.

use crate::dataset::NodeDataset;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiteralPlr {
    pub log_l0: f64,
    pub log_lj: f64,
    pub lambda: f64,
    pub lambda_self: f64,
    pub lambda_network: f64,
}

fn term(weight: f64, p: f64) -> f64 {
    if weight == 0.0 {
        0.0
    } else {
        weight * p.ln()
    }
}

/// Edge and pair counts for every `(r1, r2, k1, k2)` cell by enumerating
/// ordered pairs `(i1, i2)`, `i1 != i2`.
fn enumerate_cells(ds: &NodeDataset, x: &[u32], k: usize) -> (Vec<f64>, Vec<f64>) {
    let r = ds.r_levels();
    let y = ds.response();
    let cells = r * r * k * k;
    let mut edges = vec![0.0; cells];
    let mut pairs = vec![0.0; cells];
    for i1 in 0..ds.n() {
        for i2 in 0..ds.n() {
            if i1 == i2 {
                continue;
            }
            let c = (((y[i1] as usize - 1) * r + y[i2] as usize - 1) * k + x[i1] as usize - 1) * k
                + x[i2] as usize
                - 1;
            pairs[c] += 1.0;
            if ds.graph().has_edge(i1, i2) {
                edges[c] += 1.0;
            }
        }
    }
    (edges, pairs)
}

/// Per-node pseudo-likelihoods at each node's observed response, with every
/// ordered pair split evenly between its two endpoints.
pub fn literal_plr(ds: &NodeDataset, j: usize) -> LiteralPlr {
    let n = ds.n();
    let r = ds.r_levels();
    let k = ds.k_levels(j);
    let y: Vec<usize> = ds.response().iter().map(|&v| v as usize - 1).collect();
    let x: Vec<usize> = ds.column(j).iter().map(|&v| v as usize - 1).collect();
    let ones = vec![1u32; n];

    let (e_j, n_j) = enumerate_cells(ds, ds.column(j), k);
    let (e_0, n_0) = enumerate_cells(ds, &ones, 1);
    let pi = |e: &[f64], p: &[f64], c: usize| if p[c] > 0.0 { e[c] / p[c] } else { f64::NAN };

    let mut cnt_y = vec![0.0; r];
    let mut cnt_yx = vec![0.0; r * k];
    let mut cnt_x = vec![0.0; k];
    for i in 0..n {
        cnt_y[y[i]] += 1.0;
        cnt_yx[y[i] * k + x[i]] += 1.0;
        cnt_x[x[i]] += 1.0;
    }

    let a = |s: usize, t: usize| if ds.graph().has_edge(s, t) { 1.0 } else { 0.0 };
    let (mut self0, mut selfj, mut net0, mut netj) = (0.0, 0.0, 0.0, 0.0);
    for i1 in 0..n {
        for r1 in 0..r {
            let ind1 = if y[i1] == r1 { 1.0 } else { 0.0 };
            self0 += term(ind1, cnt_y[r1] / n as f64);
            selfj += term(ind1, cnt_yx[r1 * k + x[i1]] / cnt_x[x[i1]]);
            for i2 in 0..n {
                if i2 == i1 {
                    continue;
                }
                for r2 in 0..r {
                    let ind = ind1 * if y[i2] == r2 { 1.0 } else { 0.0 };
                    let (a12, a21) = (a(i1, i2), a(i2, i1));
                    let f = r1 * r + r2;
                    let b = r2 * r + r1;
                    let (pf, pb) = (pi(&e_0, &n_0, f), pi(&e_0, &n_0, b));
                    net0 += 0.5
                        * (term(ind * a12, pf)
                            + term(ind * (1.0 - a12), 1.0 - pf)
                            + term(ind * a21, pb)
                            + term(ind * (1.0 - a21), 1.0 - pb));
                    for k1 in 0..k {
                        for k2 in 0..k {
                            let indk = ind
                                * if x[i1] == k1 && x[i2] == k2 { 1.0 } else { 0.0 };
                            let f = ((r1 * r + r2) * k + k1) * k + k2;
                            let b = ((r2 * r + r1) * k + k2) * k + k1;
                            let (pf, pb) = (pi(&e_j, &n_j, f), pi(&e_j, &n_j, b));
                            netj += 0.5
                                * (term(indk * a12, pf)
                                    + term(indk * (1.0 - a12), 1.0 - pf)
                                    + term(indk * a21, pb)
                                    + term(indk * (1.0 - a21), 1.0 - pb));
                        }
                    }
                }
            }
        }
    }
    let log_l0 = self0 + net0;
    let log_lj = selfj + netj;
    LiteralPlr {
        log_l0,
        log_lj,
        lambda: (log_lj - log_l0) / n as f64,
        lambda_self: selfj - self0,
        lambda_network: netj - net0,
    }
}

/// Pearson correlation by the textbook two-pass formula. Zero variance
/// yields 0.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}
