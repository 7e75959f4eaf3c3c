//! Dense re-implementation of GCN training used as an oracle for the sparse
//! library path on the three-block SBM fixture.
//!
//! The oracle shares only the dataset, the split and the initial weights with
//! the library. Normalization, forward pass, gradients, Adam and epoch
//! selection are written out here with plain nested vectors.

use adagcn::harness::{
    run_experiment, split_for, ExperimentSpec, ModelKind, ModelSpec, SplitProtocol,
};
use adagcn::rng::{derive_seed, rng_from_seed, stream};
use adagcn::{generate_sbm, Dataset, GcnParams, SbmSpec};

type Dense = Vec<Vec<f64>>;

fn matmul(a: &Dense, b: &Dense) -> Dense {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for t in 0..k {
            for j in 0..m {
                out[i][j] += a[i][t] * b[t][j];
            }
        }
    }
    out
}

fn transpose(a: &Dense) -> Dense {
    (0..a[0].len())
        .map(|j| a.iter().map(|r| r[j]).collect())
        .collect()
}

fn to_dense(m: &adagcn::Matrix) -> Dense {
    m.iter_rows().map(<[f64]>::to_vec).collect()
}

fn normalized_adjacency(ds: &Dataset) -> Dense {
    let n = ds.num_nodes();
    let mut a = vec![vec![0.0; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 1.0;
        for (j, _) in ds.graph.neighbors(i) {
            row[j] = 1.0;
        }
    }
    let d: Vec<f64> = a.iter().map(|r| r.iter().sum::<f64>()).collect();
    for i in 0..n {
        for j in 0..n {
            a[i][j] /= (d[i] * d[j]).sqrt();
        }
    }
    a
}

fn row_normalized(ds: &Dataset) -> Dense {
    to_dense(&ds.features)
        .into_iter()
        .map(|r| {
            let s: f64 = r.iter().sum();
            if s == 0.0 {
                r
            } else {
                r.into_iter().map(|v| v / s).collect()
            }
        })
        .collect()
}

struct Adam {
    m: Dense,
    v: Dense,
}

impl Adam {
    fn new(rows: usize, cols: usize) -> Self {
        Self {
            m: vec![vec![0.0; cols]; rows],
            v: vec![vec![0.0; cols]; rows],
        }
    }

    fn step(&mut self, w: &mut Dense, g: &Dense, lr: f64, t: i32) {
        for i in 0..w.len() {
            for j in 0..w[0].len() {
                self.m[i][j] = 0.9 * self.m[i][j] + 0.1 * g[i][j];
                self.v[i][j] = 0.999 * self.v[i][j] + 0.001 * g[i][j] * g[i][j];
                let mh = self.m[i][j] / (1.0 - 0.9f64.powi(t));
                let vh = self.v[i][j] / (1.0 - 0.999f64.powi(t));
                w[i][j] -= lr * mh / (vh.sqrt() + 1e-8);
            }
        }
    }
}

fn forward(a: &Dense, ax: &Dense, w0: &Dense, w1: &Dense) -> (Dense, Dense, Dense) {
    let z0 = matmul(ax, w0);
    let h: Dense = z0
        .iter()
        .map(|r| r.iter().map(|v| v.max(0.0)).collect())
        .collect();
    let ah = matmul(a, &h);
    let z = matmul(&ah, w1);
    let p = z
        .iter()
        .map(|r| {
            let mx = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let e: Vec<f64> = r.iter().map(|v| (v - mx).exp()).collect();
            let s: f64 = e.iter().sum();
            e.into_iter().map(|v| v / s).collect()
        })
        .collect();
    (z0, ah, p)
}

fn argmax(r: &[f64]) -> usize {
    let mut best = 0;
    for k in 1..r.len() {
        if r[k] > r[best] {
            best = k;
        }
    }
    best
}

fn accuracy(p: &Dense, labels: &[usize], nodes: &[usize]) -> f64 {
    nodes
        .iter()
        .filter(|&&i| argmax(&p[i]) == labels[i])
        .count() as f64
        / nodes.len() as f64
}

/// Cross-entropy GCN with uniform `1/|train|` weights, L2 on both layers and
/// best-validation epoch selection (earliest on ties).
fn dense_gcn_test_accuracy(
    ds: &Dataset,
    split: &adagcn::NodeSplit,
    init: GcnParams,
    epochs: usize,
) -> f64 {
    let (lr, l2) = (0.01, 5e-4);
    let labels: Vec<usize> = ds.labels.as_slice().iter().map(|l| l.unwrap()).collect();
    let a = normalized_adjacency(ds);
    let ax = matmul(&a, &row_normalized(ds));
    let (mut w0, mut w1) = (to_dense(&init.w0), to_dense(&init.w1));
    let (mut adam0, mut adam1) = (
        Adam::new(w0.len(), w0[0].len()),
        Adam::new(w1.len(), w1[0].len()),
    );
    let c = w1[0].len();
    let s = 1.0 / split.train.len() as f64;
    let mut best: Option<(f64, Dense, Dense)> = None;
    for t in 1..=epochs {
        let (z0, ah, p) = forward(&a, &ax, &w0, &w1);
        let mut g = vec![vec![0.0; c]; ds.num_nodes()];
        for &i in &split.train {
            for k in 0..c {
                g[i][k] = s * (p[i][k] - if k == labels[i] { 1.0 } else { 0.0 });
            }
        }
        let mut gw1 = matmul(&transpose(&ah), &g);
        let gh = matmul(&matmul(&a, &g), &transpose(&w1));
        let gz0: Dense = gh
            .iter()
            .zip(&z0)
            .map(|(gr, zr)| {
                gr.iter()
                    .zip(zr)
                    .map(|(g, z)| if *z > 0.0 { *g } else { 0.0 })
                    .collect()
            })
            .collect();
        let mut gw0 = matmul(&transpose(&ax), &gz0);
        for (gw, w) in [(&mut gw0, &w0), (&mut gw1, &w1)] {
            for (gr, wr) in gw.iter_mut().zip(w) {
                for (gv, wv) in gr.iter_mut().zip(wr) {
                    *gv += l2 * wv;
                }
            }
        }
        adam0.step(&mut w0, &gw0, lr, t as i32);
        adam1.step(&mut w1, &gw1, lr, t as i32);
        let (_, _, p) = forward(&a, &ax, &w0, &w1);
        let val = accuracy(&p, &labels, &split.val);
        if best.as_ref().is_none_or(|(b, _, _)| val > *b) {
            best = Some((val, w0.clone(), w1.clone()));
        }
    }
    let (_, bw0, bw1) = best.unwrap();
    let (_, _, p) = forward(&a, &ax, &bw0, &bw1);
    accuracy(&p, &labels, &split.test)
}

fn fixture_spec() -> ExperimentSpec {
    ExperimentSpec {
        models: vec![ModelSpec::new(ModelKind::Gcn)],
        split: SplitProtocol {
            n_majority: 30,
            n_minority: 5,
            val_size: 30,
            test_size: 80,
            ..Default::default()
        },
        seeds: (0..10).collect(),
        ..Default::default()
    }
}

#[test]
fn sparse_gcn_matches_dense_reimplementation() {
    let ds = generate_sbm(&SbmSpec::new(vec![50, 50, 50], 0.3, 0.02, 16, 7)).unwrap();
    let spec = fixture_spec();
    let result = run_experiment(&ds, &spec, 1).unwrap();
    assert!(result.is_complete());

    let mut dense_mean = 0.0;
    for report in result.reports() {
        let (_, split) = split_for(&ds, &spec.split, 5, report.seed).unwrap();
        let model_seed = derive_seed(report.seed, stream::MODEL);
        let init = GcnParams::glorot(16, 16, 3, &mut rng_from_seed(model_seed));
        let dense = dense_gcn_test_accuracy(&ds, &split, init, 100);
        assert!(
            (dense - report.metrics.accuracy).abs() <= 1.0 / 80.0 + 1e-12,
            "seed {}: dense {dense} vs sparse {}",
            report.seed,
            report.metrics.accuracy
        );
        dense_mean += dense / 10.0;
    }
    let sparse_mean = result.summary.rows[0].mean_accuracy;
    assert!(
        (dense_mean - sparse_mean).abs() < 0.005,
        "dense {dense_mean} vs sparse {sparse_mean}"
    );
}
