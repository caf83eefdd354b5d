//! Prior densities and hyperparameter calibration for tree structure, leaf
//! values, and the error variance.

use crate::data::CutpointGrid;
use crate::error::{BartError, Result};
use crate::float::{cnt, cst, Real};
use crate::math::{chi_square_quantile, norm_ln_pdf};
use crate::sampler::ModelVariant;
use crate::tree::{NodeKind, Tree};

/// Depth-regularizing tree prior: a node at depth d is internal with
/// probability alpha * (1 + d)^(-beta).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreePriorParams<F> {
    pub alpha: F,
    pub beta: F,
}

impl<F: Real> TreePriorParams<F> {
    pub fn new(alpha: F, beta: F) -> Result<Self> {
        if !(alpha > F::zero() && alpha < F::one()) {
            return Err(BartError::InvalidConfig(format!(
                "alpha must be in (0, 1), got {alpha}"
            )));
        }
        if !(beta >= F::zero()) {
            return Err(BartError::InvalidConfig(format!(
                "beta must be nonnegative, got {beta}"
            )));
        }
        Ok(TreePriorParams { alpha, beta })
    }

    /// Probability that a node at depth `d` is internal.
    #[inline]
    pub fn split_probability(&self, depth: u32) -> F {
        self.alpha * (F::one() + cnt::<F>(depth as usize)).powf(-self.beta)
    }
}

/// Leaf-value prior N(mu_mean, inflation * mu_sd^2). `inflation` is
/// pi/(pi - 1) for monotone variants and 1 otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeafPriorParams<F> {
    pub mu_mean: F,
    pub mu_sd: F,
    pub inflation: F,
}

impl<F: Real> LeafPriorParams<F> {
    /// Prior variance including inflation.
    #[inline]
    pub fn variance(&self) -> F {
        self.inflation * self.mu_sd * self.mu_sd
    }

    /// Log density of the (inflated) normal leaf prior at `mu`. The monotone
    /// indicator is applied at the tree level, not here, because it couples
    /// all leaves of a tree.
    #[inline]
    pub fn log_density(&self, mu: F) -> F {
        let sd = self.variance().sqrt();
        norm_ln_pdf((mu - self.mu_mean) / sd) - sd.ln()
    }
}

/// Scaled-inverse-chi-square prior on sigma^2: nu * lambda / chi2_nu.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaPriorParams<F> {
    pub nu: F,
    pub lambda: F,
}

/// Leaf prior calibration. Under the [-0.5, 0.5] outcome scaling the interval
/// conditions m*mu_mean -/+ k*sqrt(m)*mu_sd = y_min/y_max reduce to mu_mean = 0
/// and mu_sd = 0.5/(k sqrt(m)); probit variants widen the numerator to 3 so the
/// latent sum lands in (-3, 3) with high probability. Monotone variants
/// inflate the variance by pi/(pi - 1) to undo the shrinkage the order
/// constraints would otherwise impose on small trees.
pub fn calibrate_leaf_prior<F: Real>(
    variant: &ModelVariant,
    k: F,
    num_trees: usize,
) -> LeafPriorParams<F> {
    assert!(k > F::zero(), "k must be positive");
    assert!(num_trees >= 1, "need at least one tree");
    let numerator = if variant.is_probit() { cst::<F>(3.0) } else { cst::<F>(0.5) };
    let mu_sd = numerator / (k * cnt::<F>(num_trees).sqrt());
    let inflation = if variant.is_monotone() {
        F::PI() / (F::PI() - F::one())
    } else {
        F::one()
    };
    LeafPriorParams {
        mu_mean: F::zero(),
        mu_sd,
        inflation,
    }
}

/// Log prior of a tree structure under the depth prior with uniform variable
/// and cutpoint choices.
///
/// Internal nodes contribute log p_split(d) minus log(#splittable variables)
/// minus log(#cutpoints available for the chosen variable); leaves contribute
/// log(1 - p_split(d)) when they still have an available cutpoint and nothing
/// otherwise (a node that cannot split is a leaf with probability one, which
/// keeps this density consistent with forward simulation). A split stored
/// with no available cutpoints yields -inf.
pub fn tree_log_prior<F: Real>(
    tree: &Tree<F>,
    params: &TreePriorParams<F>,
    grid: &CutpointGrid<F>,
) -> F {
    let p = grid.num_covariates();
    let mut lo = vec![F::neg_infinity(); p];
    let mut hi = vec![F::infinity(); p];
    fn walk<F: Real>(
        tree: &Tree<F>,
        id: usize,
        params: &TreePriorParams<F>,
        grid: &CutpointGrid<F>,
        lo: &mut Vec<F>,
        hi: &mut Vec<F>,
    ) -> F {
        let depth = tree.node(id).depth;
        let p_split = params.split_probability(depth);
        match tree.node(id).kind {
            NodeKind::Leaf { .. } => {
                let splittable = (0..lo.len()).any(|v| grid.cuts_within(v, lo[v], hi[v]).1 > 0);
                if splittable {
                    (F::one() - p_split).ln()
                } else {
                    F::zero()
                }
            }
            NodeKind::Split { rule, left, right } => {
                let available_vars = (0..lo.len())
                    .filter(|&v| grid.cuts_within(v, lo[v], hi[v]).1 > 0)
                    .count();
                let cuts_for_var = grid.cuts_within(rule.var, lo[rule.var], hi[rule.var]).1;
                if cuts_for_var == 0 {
                    return F::neg_infinity();
                }
                let mut acc =
                    p_split.ln() - cnt::<F>(available_vars).ln() - cnt::<F>(cuts_for_var).ln();

                let saved = hi[rule.var];
                hi[rule.var] = rule.cut_value;
                acc = acc + walk(tree, left, params, grid, lo, hi);
                hi[rule.var] = saved;

                let saved = lo[rule.var];
                lo[rule.var] = rule.cut_value;
                acc = acc + walk(tree, right, params, grid, lo, hi);
                lo[rule.var] = saved;
                acc
            }
        }
    }
    walk(tree, 0, params, grid, &mut lo, &mut hi)
}

/// Log density of the leaf prior at `mu` (no truncation).
#[inline]
pub fn leaf_log_prior<F: Real>(mu: F, params: &LeafPriorParams<F>) -> F {
    params.log_density(mu)
}

/// Sample standard deviation (n - 1 divisor).
pub fn sample_sd<F: Real>(y: &[F]) -> F {
    assert!(y.len() >= 2, "sample SD needs at least two observations");
    let n = cnt::<F>(y.len());
    let mean = y.iter().fold(F::zero(), |a, &v| a + v) / n;
    let ss = y
        .iter()
        .fold(F::zero(), |a, &v| a + (v - mean) * (v - mean));
    (ss / (n - F::one())).sqrt()
}

/// Pick lambda so that P(sigma < sigma_hat) = q under sigma^2 ~ nu*lambda/chi2_nu,
/// with sigma_hat the sample SD of the scaled outcome.
pub fn calibrate_sigma_prior<F: Real>(
    y_scaled: &[F],
    nu: F,
    q: F,
) -> Result<SigmaPriorParams<F>> {
    if !(q > F::zero() && q < F::one()) {
        return Err(BartError::InvalidConfig(format!(
            "sigma-prior quantile q must be in (0, 1), got {q}"
        )));
    }
    if !(nu > F::zero()) {
        return Err(BartError::InvalidConfig(format!(
            "sigma-prior nu must be positive, got {nu}"
        )));
    }
    if y_scaled.len() < 2 {
        return Err(BartError::InvalidData(
            "sigma prior needs at least two observations".into(),
        ));
    }
    let sigma_hat = sample_sd(y_scaled);
    if !(sigma_hat > F::zero()) {
        return Err(BartError::InvalidData(
            "outcome has zero sample variance".into(),
        ));
    }
    let lambda = sigma_hat * sigma_hat * chi_square_quantile(F::one() - q, nu) / nu;
    Ok(SigmaPriorParams { nu, lambda })
}
