use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{majority, validate_params, DtModel, DtParams, Grower};
use super::{check_rows, n_classes, ClassifierError};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RfParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub bootstrap: bool,
    /// Features considered per split; `None` means `⌈√d⌉`.
    pub max_features: Option<usize>,
}

impl Default for RfParams {
    fn default() -> Self {
        RfParams {
            n_trees: 10,
            max_depth: None,
            min_samples_split: 2,
            bootstrap: true,
            max_features: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RfModel {
    pub trees: Vec<DtModel>,
    pub seed: u64,
    /// ChaCha stream id used by each tree.
    pub tree_streams: Vec<u64>,
    pub max_features: usize,
    pub n_classes: usize,
}

impl RfModel {
    pub fn n_features(&self) -> usize {
        self.trees.first().map_or(0, DtModel::n_features)
    }

    /// Majority over trees, ties to the lower class.
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut votes = vec![0usize; self.n_classes];
        for t in &self.trees {
            votes[t.predict(x)] += 1;
        }
        majority(&votes)
    }
}

/// Tree `t` draws from stream `t` of a ChaCha generator keyed by `seed`, so
/// trees can be grown in any order and still come out identical.
pub fn tree_rng(seed: u64, tree: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree);
    rng
}

pub fn train_rf(x: &[Vec<f64>], y: &[usize], params: RfParams, seed: u64) -> Result<RfModel, ClassifierError> {
    let d = check_rows(x, y.len())?;
    if params.n_trees == 0 {
        return Err(ClassifierError::InvalidParameter("random forest needs at least one tree".into()));
    }
    let dt = DtParams {
        max_depth: params.max_depth,
        min_samples_split: params.min_samples_split,
    };
    validate_params(&dt)?;
    let m = params
        .max_features
        .unwrap_or_else(|| (d as f64).sqrt().ceil() as usize)
        .clamp(1, d);
    let k = n_classes(y);
    let n = x.len();

    let trees: Vec<DtModel> = (0..params.n_trees as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = tree_rng(seed, t);
            let rows: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let mut grower = Grower {
                x,
                y,
                n_classes: k,
                params: dt,
                features: |d: usize| {
                    let mut f = sample(&mut rng, d, m).into_vec();
                    f.sort_unstable();
                    f
                },
                nodes: Vec::new(),
            };
            grower.grow(rows, 0);
            DtModel {
                nodes: grower.nodes,
                n_features: d,
                n_classes: k,
            }
        })
        .collect();

    Ok(RfModel {
        trees,
        seed,
        tree_streams: (0..params.n_trees as u64).collect(),
        max_features: m,
        n_classes: k,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tree::train_dt;
    use super::*;

    fn data() -> (Vec<Vec<f64>>, Vec<usize>) {
        let x: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let t = i as f64;
                vec![(t * 0.31).sin(), (t * 0.17).cos(), t / 40.0, (t * 0.9).sin()]
            })
            .collect();
        let y = x.iter().map(|r| (r[0] + r[2] > 0.5) as usize).collect();
        (x, y)
    }

    #[test]
    fn degenerate_forest_matches_tree() {
        let (x, y) = data();
        let params = RfParams {
            n_trees: 1,
            bootstrap: false,
            max_features: Some(4),
            ..RfParams::default()
        };
        let rf = train_rf(&x, &y, params, 3).unwrap();
        let dt = train_dt(&x, &y, DtParams::default()).unwrap();
        assert_eq!(rf.trees[0], dt);
    }

    #[test]
    fn same_seed_same_forest() {
        let (x, y) = data();
        let a = train_rf(&x, &y, RfParams::default(), 11).unwrap();
        let b = train_rf(&x, &y, RfParams::default(), 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.max_features, 2);
    }

    #[test]
    fn seed_changes_trees() {
        let (x, y) = data();
        let a = train_rf(&x, &y, RfParams::default(), 1).unwrap();
        let b = train_rf(&x, &y, RfParams::default(), 2).unwrap();
        assert_ne!(a.trees, b.trees);
    }
}
