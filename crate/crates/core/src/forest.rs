//! CART trees with Gini impurity and a bagged random forest on top.
//!
//! Features are read from sparse vectors with implicit zeros, so a feature
//! that is absent from every sample at a node is constant there and never
//! considered for a split.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseVector;
use crate::sentiment::{argmax, ClassProbs, Sentiment, N_CLASSES};

/// Gains at or below this are treated as no improvement.
const MIN_GAIN: f64 = 1e-12;

type Counts = [usize; N_CLASSES];

/// `1 - sum_c p_c^2` over the class counts.
pub fn gini(counts: &Counts) -> Result<f64> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::DegenerateNode);
    }
    Ok(gini_unchecked(counts, total))
}

fn gini_unchecked(counts: &Counts, total: usize) -> f64 {
    let t = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    /// `floor(sqrt(dim))`, at least 1.
    Sqrt,
    All,
    Count(usize),
}

impl MaxFeatures {
    fn resolve(self, dim: usize) -> usize {
        match self {
            MaxFeatures::Sqrt => ((dim as f64).sqrt().floor() as usize).max(1),
            MaxFeatures::All => dim.max(1),
            MaxFeatures::Count(k) => k.max(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub max_features: MaxFeatures,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_samples_split: 2,
            max_features: MaxFeatures::Sqrt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Resample N points with replacement per tree.
    pub bootstrap: bool,
    pub tree: TreeParams,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            bootstrap: true,
            tree: TreeParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    /// `x[feature] <= threshold` goes left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        counts: Counts,
    },
}

/// Nodes in a flat arena; the root is node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub dim: usize,
    pub nodes: Vec<TreeNode>,
}

impl DecisionTree {
    pub fn leaf_counts(&self, x: &SparseVector) -> Result<&Counts> {
        x.check_dim(self.dim)?;
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x.get(*feature) <= *threshold { *left } else { *right },
                TreeNode::Leaf { counts } => return Ok(counts),
            }
        }
    }

    pub fn predict_proba(&self, x: &SparseVector) -> Result<ClassProbs> {
        let counts = self.leaf_counts(x)?;
        let total: usize = counts.iter().sum();
        Ok(counts.map(|c| c as f64 / total as f64))
    }

    pub fn predict(&self, x: &SparseVector) -> Result<Sentiment> {
        Ok(argmax(&self.predict_proba(x)?))
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], at: usize) -> usize {
            match &nodes[at] {
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
                TreeNode::Leaf { .. } => 0,
            }
        }
        walk(&self.nodes, 0)
    }
}

struct Split {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl Split {
    fn beats(&self, other: &Option<Split>) -> bool {
        match other {
            None => true,
            Some(o) => {
                self.gain > o.gain || (self.gain == o.gain && (self.feature, self.threshold) < (o.feature, o.threshold))
            }
        }
    }
}

/// Per-tree buffers indexed by feature, reset after every node.
struct Scratch {
    stats: Vec<(usize, f64, f64)>,
    touched: Vec<usize>,
    chosen: Vec<bool>,
}

struct TreeBuilder<'a> {
    xs: &'a [SparseVector],
    dim: usize,
    classes: Vec<usize>,
    params: TreeParams,
    n_features: usize,
}

impl TreeBuilder<'_> {
    fn counts(&self, samples: &[usize]) -> Counts {
        let mut c = [0; N_CLASSES];
        for &s in samples {
            c[self.classes[s]] += 1;
        }
        c
    }

    /// Best split among up to `n_features` randomly chosen features that
    /// are non-constant at this node. Positive-gain splits are preferred;
    /// failing those, a zero-gain split is taken so that an impure node with
    /// distinct inputs can always be divided further.
    fn best_split(
        &self,
        samples: &[usize],
        counts: &Counts,
        rng: &mut ChaCha8Rng,
        scratch: &mut Scratch,
    ) -> Option<Split> {
        let n = samples.len();
        let parent = gini_unchecked(counts, n);

        // one pass over the node's nonzeros: (count, min, max) per feature
        let Scratch { stats, touched, chosen } = scratch;
        for &s in samples {
            for (f, v) in self.xs[s].iter() {
                let e = &mut stats[f];
                if e.0 == 0 {
                    touched.push(f);
                    *e = (0, v, v);
                }
                e.0 += 1;
                e.1 = e.1.min(v);
                e.2 = e.2.max(v);
            }
        }
        touched.sort_unstable();
        // a feature missing from some sample also takes the value zero
        let mut features: Vec<usize> = touched
            .iter()
            .copied()
            .filter(|&f| {
                let (count, lo, hi) = stats[f];
                count < n || lo != hi
            })
            .collect();
        for &f in touched.iter() {
            stats[f].0 = 0;
        }
        touched.clear();
        features.shuffle(rng);
        features.truncate(self.n_features);
        for &f in &features {
            chosen[f] = true;
        }

        let mut entries: Vec<(usize, f64, usize)> = samples
            .iter()
            .flat_map(|&s| self.xs[s].iter().map(move |(f, v)| (f, v, s)))
            .filter(|&(f, _, _)| chosen[f])
            .map(|(f, v, s)| (f, v, self.classes[s]))
            .collect();
        for &f in &features {
            chosen[f] = false;
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));

        // (feature, range into entries), ascending by feature
        let mut ranges: Vec<(usize, usize, usize)> = Vec::with_capacity(features.len());
        let mut start = 0;
        while start < entries.len() {
            let f = entries[start].0;
            let end = start + entries[start..].iter().take_while(|e| e.0 == f).count();
            ranges.push((f, start, end));
            start = end;
        }
        let candidates: Vec<(usize, usize, usize)> = features
            .iter()
            .map(|f| {
                ranges[ranges
                    .binary_search_by_key(f, |r| r.0)
                    .expect("sampled feature has entries")]
            })
            .collect();

        self.scan(&candidates, &entries, n, counts, parent, MIN_GAIN)
            .or_else(|| self.scan(&candidates, &entries, n, counts, parent, f64::NEG_INFINITY))
    }

    fn scan(
        &self,
        candidates: &[(usize, usize, usize)],
        entries: &[(usize, f64, usize)],
        n: usize,
        counts: &Counts,
        parent: f64,
        min_gain: f64,
    ) -> Option<Split> {
        let mut best: Option<Split> = None;
        for &(feature, lo, hi) in candidates {
            // distinct values in ascending order with their class counts,
            // implicit zeros merged in
            let mut zero_counts = *counts;
            for e in &entries[lo..hi] {
                zero_counts[e.2] -= 1;
            }
            let n_zero = n - (hi - lo);
            let mut groups: Vec<(f64, Counts)> = Vec::new();
            let mut zero_pending = n_zero > 0;
            for e in &entries[lo..hi] {
                if zero_pending && e.1 > 0.0 {
                    groups.push((0.0, zero_counts));
                    zero_pending = false;
                }
                match groups.last_mut() {
                    Some((v, c)) if *v == e.1 => c[e.2] += 1,
                    _ => {
                        let mut c = [0; N_CLASSES];
                        c[e.2] = 1;
                        groups.push((e.1, c));
                    }
                }
            }
            if zero_pending {
                groups.push((0.0, zero_counts));
            }

            let mut left = [0; N_CLASSES];
            let mut n_left = 0;
            for w in groups.windows(2) {
                let (v, c) = &w[0];
                for k in 0..N_CLASSES {
                    left[k] += c[k];
                }
                n_left += c.iter().sum::<usize>();
                let mut right = *counts;
                for k in 0..N_CLASSES {
                    right[k] -= left[k];
                }
                let n_right = n - n_left;
                let weighted = (n_left as f64 * gini_unchecked(&left, n_left)
                    + n_right as f64 * gini_unchecked(&right, n_right))
                    / n as f64;
                let gain = parent - weighted;
                if gain <= min_gain {
                    continue;
                }
                let next = w[1].0;
                let mut threshold = 0.5 * (v + next);
                if threshold >= next {
                    threshold = *v;
                }
                let cand = Split {
                    feature,
                    threshold,
                    gain,
                };
                if cand.beats(&best) {
                    best = Some(cand);
                }
            }
        }
        best
    }

    fn build(&self, root_samples: Vec<usize>, rng: &mut ChaCha8Rng) -> Vec<TreeNode> {
        let mut nodes = vec![TreeNode::Leaf { counts: [0; N_CLASSES] }];
        let mut scratch = Scratch {
            stats: vec![(0, 0.0, 0.0); self.dim],
            touched: Vec::new(),
            chosen: vec![false; self.dim],
        };
        // (node slot, samples, depth); depth-first
        let mut stack = vec![(0usize, root_samples, 0usize)];
        while let Some((slot, samples, depth)) = stack.pop() {
            let counts = self.counts(&samples);
            let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
            let depth_capped = self.params.max_depth.is_some_and(|d| depth >= d);
            let split = if pure || depth_capped || samples.len() < self.params.min_samples_split {
                None
            } else {
                self.best_split(&samples, &counts, rng, &mut scratch)
            };
            let Some(split) = split else {
                nodes[slot] = TreeNode::Leaf { counts };
                continue;
            };
            let (l, r): (Vec<usize>, Vec<usize>) = samples
                .iter()
                .partition(|&&s| self.xs[s].get(split.feature) <= split.threshold);
            let left = nodes.len();
            let right = left + 1;
            nodes.push(TreeNode::Leaf { counts: [0; N_CLASSES] });
            nodes.push(TreeNode::Leaf { counts: [0; N_CLASSES] });
            nodes[slot] = TreeNode::Split {
                feature: split.feature,
                threshold: split.threshold,
                left,
                right,
            };
            stack.push((right, r, depth + 1));
            stack.push((left, l, depth + 1));
        }
        nodes
    }
}

fn check_inputs(xs: &[SparseVector], labels: &[Sentiment]) -> Result<usize> {
    if xs.len() != labels.len() {
        return Err(Error::Arity {
            left: xs.len(),
            right: labels.len(),
        });
    }
    if xs.is_empty() {
        return Err(Error::Fit("cannot grow a tree from zero samples".into()));
    }
    crate::features::sparse::common_dim(xs)
}

fn grow(
    xs: &[SparseVector],
    labels: &[Sentiment],
    dim: usize,
    samples: Vec<usize>,
    rng: &mut ChaCha8Rng,
    params: &TreeParams,
) -> DecisionTree {
    let builder = TreeBuilder {
        xs,
        dim,
        classes: labels.iter().map(|l| l.index()).collect(),
        params: *params,
        n_features: params.max_features.resolve(dim),
    };
    DecisionTree {
        dim,
        nodes: builder.build(samples, rng),
    }
}

/// Grows one tree on all samples, drawing feature subsets from `rng`.
pub fn fit_tree(
    xs: &[SparseVector],
    labels: &[Sentiment],
    rng: &mut ChaCha8Rng,
    params: &TreeParams,
) -> Result<DecisionTree> {
    let dim = check_inputs(xs, labels)?;
    Ok(grow(xs, labels, dim, (0..xs.len()).collect(), rng, params))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub seed: u64,
    pub trees: Vec<DecisionTree>,
}

/// Tree `t` owns a generator seeded with `seed + t`, used first for its
/// bootstrap draw and then for feature sampling, so trees can be grown in
/// any order or in parallel with identical results.
pub fn fit_forest(xs: &[SparseVector], labels: &[Sentiment], params: &ForestParams, seed: u64) -> Result<RandomForest> {
    let dim = check_inputs(xs, labels)?;
    if params.n_trees == 0 {
        return Err(Error::Config("forest needs at least one tree".into()));
    }
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| forest_member(xs, labels, dim, params, seed, t))
        .collect();
    Ok(RandomForest { seed, trees })
}

fn forest_member(
    xs: &[SparseVector],
    labels: &[Sentiment],
    dim: usize,
    params: &ForestParams,
    seed: u64,
    t: usize,
) -> DecisionTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
    let n = xs.len();
    let samples = if params.bootstrap {
        (0..n).map(|_| rng.gen_range(0..n)).collect()
    } else {
        (0..n).collect()
    };
    grow(xs, labels, dim, samples, &mut rng, &params.tree)
}

impl RandomForest {
    pub fn dim(&self) -> usize {
        self.trees[0].dim
    }

    /// Unweighted mean of the trees' leaf distributions.
    pub fn predict_proba(&self, x: &SparseVector) -> Result<(Sentiment, ClassProbs)> {
        let mut probs = [0.0; N_CLASSES];
        for tree in &self.trees {
            let p = tree.predict_proba(x)?;
            for k in 0..N_CLASSES {
                probs[k] += p[k];
            }
        }
        let n = self.trees.len() as f64;
        let probs = probs.map(|p| p / n);
        Ok((argmax(&probs), probs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(d: &[f64]) -> SparseVector {
        SparseVector::from_dense(d)
    }

    fn random_set(seed: u64, n: usize, dim: usize) -> (Vec<SparseVector>, Vec<Sentiment>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<SparseVector> = (0..n)
            .map(|_| {
                let d: Vec<f64> = (0..dim)
                    .map(|_| {
                        if rng.gen_bool(0.6) {
                            0.0
                        } else {
                            rng.gen_range(0.0..1.0)
                        }
                    })
                    .collect();
                sv(&d)
            })
            .collect();
        let ys: Vec<Sentiment> = (0..n).map(|_| Sentiment::from_index(rng.gen_range(0..3))).collect();
        // keep only the first copy of any repeated input
        let mut seen: Vec<&SparseVector> = Vec::new();
        let keep: Vec<bool> = xs
            .iter()
            .map(|x| {
                let fresh = !seen.contains(&x);
                seen.push(x);
                fresh
            })
            .collect();
        let (xs, ys): (Vec<_>, Vec<_>) = xs
            .iter()
            .zip(&ys)
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|((x, &y), _)| (x.clone(), y))
            .unzip();
        (xs, ys)
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini(&[4, 0, 0]).unwrap(), 0.0);
        assert!((gini(&[2, 2, 0]).unwrap() - 0.5).abs() < 1e-15);
        assert!((gini(&[1, 1, 1]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(gini(&[0, 0, 0]), Err(Error::DegenerateNode)));
    }

    #[test]
    fn one_dimensional_stump() {
        let xs = [sv(&[0.0]), sv(&[1.0]), sv(&[0.0]), sv(&[1.0])];
        let ys = [
            Sentiment::Negative,
            Sentiment::Positive,
            Sentiment::Negative,
            Sentiment::Positive,
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = fit_tree(&xs, &ys, &mut rng, &TreeParams::default()).unwrap();
        assert_eq!(t.depth(), 1);
        match &t.nodes[0] {
            TreeNode::Split { feature, threshold, .. } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 0.5);
            }
            other => panic!("{other:?}"),
        }
        for (x, &y) in xs.iter().zip(&ys) {
            assert_eq!(t.predict(x).unwrap(), y);
        }
    }

    #[test]
    fn pure_and_conflicting_inputs_give_single_leaf() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let xs = [sv(&[0.3, 1.0]), sv(&[0.7, 0.0])];
        let t = fit_tree(&xs, &[Sentiment::Neutral; 2], &mut rng, &TreeParams::default()).unwrap();
        assert_eq!(t.nodes, vec![TreeNode::Leaf { counts: [0, 2, 0] }]);

        let same = [sv(&[0.5, 0.5]), sv(&[0.5, 0.5]), sv(&[0.5, 0.5])];
        let ys = [Sentiment::Negative, Sentiment::Positive, Sentiment::Positive];
        let t = fit_tree(&same, &ys, &mut rng, &TreeParams::default()).unwrap();
        assert_eq!(t.nodes, vec![TreeNode::Leaf { counts: [1, 0, 2] }]);
    }

    #[test]
    fn empty_input_is_an_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            fit_tree(&[], &[], &mut rng, &TreeParams::default()),
            Err(Error::Fit(_))
        ));
        assert!(matches!(
            fit_forest(&[], &[], &ForestParams::default(), 0),
            Err(Error::Fit(_))
        ));
    }

    #[test]
    fn unbounded_tree_memorizes() {
        for seed in 0..5 {
            let (xs, ys) = random_set(seed, 50, 9);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = fit_tree(&xs, &ys, &mut rng, &TreeParams::default()).unwrap();
            for (x, &y) in xs.iter().zip(&ys) {
                assert_eq!(t.predict(x).unwrap(), y);
            }
        }
    }

    #[test]
    fn splits_never_increase_impurity() {
        let (xs, ys) = random_set(3, 60, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = fit_tree(&xs, &ys, &mut rng, &TreeParams::default()).unwrap();
        fn counts_under(t: &DecisionTree, at: usize) -> Counts {
            match &t.nodes[at] {
                TreeNode::Leaf { counts } => *counts,
                TreeNode::Split { left, right, .. } => {
                    let (a, b) = (counts_under(t, *left), counts_under(t, *right));
                    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
                }
            }
        }
        for (i, node) in t.nodes.iter().enumerate() {
            if let TreeNode::Split { left, right, .. } = node {
                let (p, l, r) = (counts_under(&t, i), counts_under(&t, *left), counts_under(&t, *right));
                let (np, nl, nr) = (
                    p.iter().sum::<usize>(),
                    l.iter().sum::<usize>(),
                    r.iter().sum::<usize>(),
                );
                let weighted = (nl as f64 * gini(&l).unwrap() + nr as f64 * gini(&r).unwrap()) / np as f64;
                assert!(weighted <= gini(&p).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn depth_cap_is_respected() {
        let (xs, ys) = random_set(4, 50, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let params = TreeParams {
            max_depth: Some(2),
            ..Default::default()
        };
        assert!(fit_tree(&xs, &ys, &mut rng, &params).unwrap().depth() <= 2);
    }

    #[test]
    fn single_unbagged_tree_forest_matches_tree() {
        let (xs, ys) = random_set(5, 40, 7);
        let params = ForestParams {
            n_trees: 1,
            bootstrap: false,
            ..Default::default()
        };
        let forest = fit_forest(&xs, &ys, &params, 11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let tree = fit_tree(&xs, &ys, &mut rng, &params.tree).unwrap();
        assert_eq!(forest.trees[0], tree);
        for x in &xs {
            assert_eq!(forest.predict_proba(x).unwrap().1, tree.predict_proba(x).unwrap());
        }
    }

    #[test]
    fn forest_is_deterministic_and_order_independent() {
        let (xs, ys) = random_set(6, 40, 12);
        let params = ForestParams {
            n_trees: 8,
            ..Default::default()
        };
        let a = fit_forest(&xs, &ys, &params, 3).unwrap();
        let b = fit_forest(&xs, &ys, &params, 3).unwrap();
        assert_eq!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());
        for t in (0..8).rev() {
            assert_eq!(a.trees[t], forest_member(&xs, &ys, 12, &params, 3, t));
        }
        assert_eq!(ForestParams::default().n_trees, 100);
    }

    #[test]
    fn averaged_probabilities() {
        let forest = RandomForest {
            seed: 0,
            trees: vec![
                DecisionTree {
                    dim: 1,
                    nodes: vec![TreeNode::Leaf { counts: [3, 0, 0] }],
                },
                DecisionTree {
                    dim: 1,
                    nodes: vec![TreeNode::Leaf { counts: [1, 1, 0] }],
                },
            ],
        };
        let (label, probs) = forest.predict_proba(&sv(&[0.2])).unwrap();
        assert_eq!(probs, [0.75, 0.25, 0.0]);
        assert_eq!(label, Sentiment::Negative);
        assert!(matches!(forest.predict_proba(&sv(&[0.2, 0.1])), Err(Error::Dim { .. })));
    }

    #[test]
    fn probability_rows_sum_to_one() {
        let (xs, ys) = random_set(8, 60, 10);
        let forest = fit_forest(
            &xs,
            &ys,
            &ForestParams {
                n_trees: 15,
                ..Default::default()
            },
            1,
        )
        .unwrap();
        let (probe, _) = random_set(9, 100, 10);
        for x in &probe {
            let (_, p) = forest.predict_proba(x).unwrap();
            assert!(p.iter().all(|&v| v >= 0.0));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
