use serde::{Deserialize, Serialize};

use super::{check_rows, n_classes, ClassifierError};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DtParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for DtParams {
    fn default() -> Self {
        DtParams {
            max_depth: None,
            min_samples_split: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf { counts: Vec<usize> },
}

/// CART tree stored as an arena; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DtModel {
    pub nodes: Vec<Node>,
    pub n_features: usize,
    pub n_classes: usize,
}

impl DtModel {
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn leaf_counts(&self, x: &[f64]) -> &[usize] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[*feature] <= *threshold { *left } else { *right },
                Node::Leaf { counts } => return counts,
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        majority(self.leaf_counts(x))
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
                Node::Leaf { .. } => 0,
            }
        }
        go(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

/// Largest count; ties go to the lower class.
pub(crate) fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &n) in counts.iter().enumerate() {
        if n > counts[best] {
            best = c;
        }
    }
    best
}

fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>()
}

struct Best {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

/// Builds a tree over a (possibly repeated) list of row indices. The
/// `features` callback picks the candidate columns at each split, in
/// ascending order.
pub(crate) struct Grower<'a, F: FnMut(usize) -> Vec<usize>> {
    pub x: &'a [Vec<f64>],
    pub y: &'a [usize],
    pub n_classes: usize,
    pub params: DtParams,
    pub features: F,
    pub nodes: Vec<Node>,
}

impl<F: FnMut(usize) -> Vec<usize>> Grower<'_, F> {
    pub fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let mut counts = vec![0usize; self.n_classes];
        for &r in &rows {
            counts[self.y[r]] += 1;
        }
        let n = rows.len();
        let parent = gini(&counts, n);
        let stop = parent == 0.0
            || n < self.params.min_samples_split
            || self.params.max_depth.is_some_and(|m| depth >= m);
        let split = if stop { None } else { self.best_split(&rows, parent) };
        let Some(best) = split else {
            self.nodes.push(Node::Leaf { counts });
            return self.nodes.len() - 1;
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&r| self.x[r][best.feature] <= best.threshold);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { counts: Vec::new() });
        let left = self.grow(left_rows, depth + 1);
        let right = self.grow(right_rows, depth + 1);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }

    fn best_split(&mut self, rows: &[usize], parent: f64) -> Option<Best> {
        let n = rows.len();
        let d = self.x[0].len();
        let mut best: Option<Best> = None;
        let mut sorted = rows.to_vec();
        for feature in (self.features)(d) {
            sorted.sort_by(|&a, &b| self.x[a][feature].total_cmp(&self.x[b][feature]));
            let mut left = vec![0usize; self.n_classes];
            let mut right = vec![0usize; self.n_classes];
            for &r in &sorted {
                right[self.y[r]] += 1;
            }
            for i in 0..n - 1 {
                let c = self.y[sorted[i]];
                left[c] += 1;
                right[c] -= 1;
                let (v, next) = (self.x[sorted[i]][feature], self.x[sorted[i + 1]][feature]);
                if v == next {
                    continue;
                }
                let nl = i + 1;
                let nr = n - nl;
                let impurity = (nl as f64 * gini(&left, nl) + nr as f64 * gini(&right, nr)) / n as f64;
                if impurity < parent - 1e-12
                    && best.as_ref().is_none_or(|b| impurity < b.impurity - 1e-12)
                {
                    let mut threshold = 0.5 * (v + next);
                    // guard against the midpoint rounding onto the upper value
                    if threshold >= next {
                        threshold = v;
                    }
                    best = Some(Best {
                        feature,
                        threshold,
                        impurity,
                    });
                }
            }
        }
        best
    }
}

pub fn train_dt(x: &[Vec<f64>], y: &[usize], params: DtParams) -> Result<DtModel, ClassifierError> {
    let d = check_rows(x, y.len())?;
    validate_params(&params)?;
    let k = n_classes(y);
    let mut grower = Grower {
        x,
        y,
        n_classes: k,
        params,
        features: |d: usize| (0..d).collect(),
        nodes: Vec::new(),
    };
    grower.grow((0..x.len()).collect(), 0);
    Ok(DtModel {
        nodes: grower.nodes,
        n_features: d,
        n_classes: k,
    })
}

pub(crate) fn validate_params(params: &DtParams) -> Result<(), ClassifierError> {
    if params.min_samples_split < 2 {
        return Err(ClassifierError::InvalidParameter(format!(
            "min_samples_split must be at least 2 (got {})",
            params.min_samples_split
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_input_is_single_leaf() {
        let x = vec![vec![0.0], vec![5.0], vec![9.0]];
        let m = train_dt(&x, &[1, 1, 1], DtParams::default()).unwrap();
        assert_eq!(m.nodes.len(), 1);
        assert_eq!(m.predict(&[-100.0]), 1);
    }

    #[test]
    fn root_split_at_midpoint() {
        let x = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]];
        let y = [0, 0, 1, 1];
        let m = train_dt(&x, &y, DtParams::default()).unwrap();
        match &m.nodes[0] {
            Node::Split { feature, threshold, .. } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 1.5);
            }
            other => panic!("expected split, got {other:?}"),
        }
        for (xi, &yi) in x.iter().zip(&y) {
            assert_eq!(m.predict(xi), yi);
        }
    }

    #[test]
    fn ties_prefer_lowest_feature() {
        // both columns separate perfectly
        let x = vec![vec![0.0, 10.0], vec![1.0, 11.0], vec![2.0, 12.0], vec![3.0, 13.0]];
        let m = train_dt(&x, &[0, 0, 1, 1], DtParams::default()).unwrap();
        assert!(matches!(m.nodes[0], Node::Split { feature: 0, .. }));
    }

    #[test]
    fn max_depth_zero_is_majority_leaf() {
        let x = vec![vec![0.0], vec![1.0], vec![2.0]];
        let params = DtParams {
            max_depth: Some(0),
            ..DtParams::default()
        };
        let m = train_dt(&x, &[1, 0, 1], params).unwrap();
        assert_eq!(m.n_leaves(), 1);
        assert_eq!(m.predict(&[0.0]), 1);
    }

    #[test]
    fn leaves_are_nonempty() {
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![(i as f64 * 0.37).sin(), (i as f64).sqrt()]).collect();
        let y: Vec<usize> = (0..30).map(|i| (i * 7 % 3 == 0) as usize).collect();
        let m = train_dt(&x, &y, DtParams::default()).unwrap();
        for node in &m.nodes {
            if let Node::Leaf { counts } = node {
                assert!(counts.iter().sum::<usize>() > 0);
            }
        }
        assert!(x.iter().zip(&y).all(|(xi, &yi)| m.predict(xi) == yi));
    }
}
