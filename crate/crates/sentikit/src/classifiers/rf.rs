//! Random Forest of Gini-split decision trees over sparse TF-IDF vectors,
//! grown on bootstrap samples with per-tree PRNG streams forked from one
//! seed so results are reproducible.

use crate::classifiers::{argmax3, Prediction};
use crate::corpus::Sentiment;
use crate::error::{Error, Result};
use crate::features::SparseVector;
use crate::rng::Rng;

/// Forest settings. `features_per_split = None` means ⌈√dim⌉. Bootstrap can
/// be disabled for exact-fit debugging on toy data.
#[derive(Debug, Clone)]
pub struct RfConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for RfConfig {
    fn default() -> RfConfig {
        RfConfig {
            n_trees: 100,
            max_depth: 32,
            features_per_split: None,
            bootstrap: true,
            seed: 42,
        }
    }
}

/// One tree node in the arena; children are arena indices.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        counts: [usize; 3],
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// A decision tree stored as an arena with the root at index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    /// Class vote of this tree: the majority class of the reached leaf,
    /// ties toward the lowest class index.
    fn vote(&self, x: &SparseVector) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { counts } => {
                    let as_f = [counts[0] as f64, counts[1] as f64, counts[2] as f64];
                    return argmax3(&as_f);
                }
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x.get(*feature) <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    fn depth_from(&self, at: usize) -> usize {
        match &self.nodes[at] {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => {
                1 + self.depth_from(*left).max(self.depth_from(*right))
            }
        }
    }

    pub fn depth(&self) -> usize {
        self.depth_from(0)
    }
}

/// Trained forest; prediction probabilities are vote fractions.
#[derive(Debug, Clone)]
pub struct RfModel {
    pub dim: usize,
    pub trees: Vec<Tree>,
    pub max_depth: usize,
    pub features_per_split: usize,
}

/// Gini impurity of a class-count vector (0 for empty or pure nodes).
pub fn gini3(counts: &[usize; 3]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            p * p
        })
        .sum::<f64>()
}

fn tally(y: &[Sentiment], samples: &[usize]) -> [usize; 3] {
    let mut counts = [0usize; 3];
    for &i in samples {
        counts[y[i].index()] += 1;
    }
    counts
}

/// Draws `k` distinct feature indices in draw order; all features when
/// `k ≥ dim`.
fn sample_features(dim: usize, k: usize, rng: &mut Rng) -> Vec<usize> {
    if k >= dim {
        return (0..dim).collect();
    }
    let mut feats = Vec::with_capacity(k);
    while feats.len() < k {
        let f = rng.index(dim);
        if !feats.contains(&f) {
            feats.push(f);
        }
    }
    feats
}

struct TreeBuilder<'a> {
    x: &'a [SparseVector],
    y: &'a [Sentiment],
    dim: usize,
    max_depth: usize,
    k: usize,
    nodes: Vec<Node>,
}

impl TreeBuilder<'_> {
    /// Grows the subtree for `samples`, returning its arena index. The best
    /// split minimizes weighted child Gini over `k` random features; ties
    /// keep the first candidate found (draw order, then threshold order).
    fn grow(&mut self, samples: &[usize], depth: usize, rng: &mut Rng) -> usize {
        let counts = tally(self.y, samples);
        let parent_gini = gini3(&counts);
        if depth >= self.max_depth || parent_gini == 0.0 || samples.len() < 2 {
            self.nodes.push(Node::Leaf { counts });
            return self.nodes.len() - 1;
        }

        let mut best: Option<(f64, usize, f64)> = None;
        for feature in sample_features(self.dim, self.k, rng) {
            let mut vals: Vec<(f64, usize)> = samples
                .iter()
                .map(|&i| (self.x[i].get(feature), self.y[i].index()))
                .collect();
            vals.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite weights"));
            if vals[0].0 == vals[vals.len() - 1].0 {
                continue;
            }
            let m = vals.len() as f64;
            let mut left = [0usize; 3];
            let mut right = counts;
            for i in 0..vals.len() - 1 {
                left[vals[i].1] += 1;
                right[vals[i].1] -= 1;
                if vals[i].0 < vals[i + 1].0 {
                    let nl = (i + 1) as f64;
                    let score = (nl * gini3(&left) + (m - nl) * gini3(&right)) / m;
                    if best.is_none_or(|(s, _, _)| score < s) {
                        best = Some((score, feature, (vals[i].0 + vals[i + 1].0) / 2.0));
                    }
                }
            }
        }

        match best {
            Some((score, feature, threshold)) if score < parent_gini - 1e-12 => {
                let (mut ls, mut rs) = (Vec::new(), Vec::new());
                for &i in samples {
                    if self.x[i].get(feature) <= threshold {
                        ls.push(i);
                    } else {
                        rs.push(i);
                    }
                }
                let at = self.nodes.len();
                self.nodes.push(Node::Leaf { counts });
                let left = self.grow(&ls, depth + 1, rng);
                let right = self.grow(&rs, depth + 1, rng);
                self.nodes[at] = Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                };
                at
            }
            _ => {
                self.nodes.push(Node::Leaf { counts });
                self.nodes.len() - 1
            }
        }
    }
}

/// Trains the forest sequentially; each tree consumes its own forked PRNG
/// stream, so any other scheduling of trees would produce identical output.
pub fn train_rf(x: &[SparseVector], y: &[Sentiment], cfg: &RfConfig) -> Result<RfModel> {
    assert!(cfg.n_trees >= 1, "need at least one tree");
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let dim = x[0].dim;
    for v in x {
        if v.dim != dim {
            return Err(Error::DimMismatch {
                expected: dim,
                got: v.dim,
            });
        }
    }
    let k = cfg
        .features_per_split
        .unwrap_or_else(|| (dim as f64).sqrt().ceil() as usize)
        .max(1);

    let mut master = Rng::new(cfg.seed);
    let mut trees = Vec::with_capacity(cfg.n_trees);
    for _ in 0..cfg.n_trees {
        let mut rng = master.fork();
        let samples: Vec<usize> = if cfg.bootstrap {
            (0..x.len()).map(|_| rng.index(x.len())).collect()
        } else {
            (0..x.len()).collect()
        };
        let mut builder = TreeBuilder {
            x,
            y,
            dim,
            max_depth: cfg.max_depth,
            k,
            nodes: Vec::new(),
        };
        builder.grow(&samples, 0, &mut rng);
        trees.push(Tree {
            nodes: builder.nodes,
        });
    }
    Ok(RfModel {
        dim,
        trees,
        max_depth: cfg.max_depth,
        features_per_split: k,
    })
}

impl RfModel {
    /// Vote-fraction probabilities across trees.
    pub fn predict(&self, x: &SparseVector) -> Result<Prediction> {
        if x.dim != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                got: x.dim,
            });
        }
        let mut votes = [0usize; 3];
        for tree in &self.trees {
            votes[tree.vote(x)] += 1;
        }
        let n = self.trees.len() as f64;
        Ok(Prediction::from_probs([
            votes[0] as f64 / n,
            votes[1] as f64 / n,
            votes[2] as f64 / n,
        ]))
    }
}
