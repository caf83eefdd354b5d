//! Independent validators used by the test suites: closed-form truncated
//! normal moments, brute-force quadrature over small fixed-tree posteriors,
//! and pointwise monotonicity checks.
//!
//! Nothing here shares a numeric kernel with the sampler path: the normal CDF
//! uses a Taylor series plus a Mills-ratio continued fraction instead of
//! erfc rational approximations, and quantiles come from bisection. Agreement
//! between the two paths is evidence, not tautology.

use rand::Rng;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::data::Dataset;
use crate::error::{BartError, Result};
use crate::float::{cnt, cst, Real};
use crate::priors::LeafPriorParams;
use crate::tree::{above_pairs, Tree};

/// Standard normal density (direct formula).
#[inline]
pub fn normal_pdf<F: Real>(x: F) -> F {
    (-(x * x) * cst::<F>(0.5)).exp() / F::TAU().sqrt()
}

/// Standard normal CDF via Taylor series for the body and a Mills-ratio
/// continued fraction for the tails.
pub fn normal_cdf<F: Real>(x: F) -> F {
    let threshold = cst::<F>(4.0);
    if x > threshold {
        return F::one() - mills_sf(x);
    }
    if x < -threshold {
        return mills_sf(-x);
    }
    // Phi(x) = 1/2 + phi(x) * sum_k x^(2k+1) / (1*3*...*(2k+1))
    let mut term = x;
    let mut sum = x;
    let mut k = F::one();
    loop {
        term = term * x * x / (cst::<F>(2.0) * k + F::one());
        let next = sum + term;
        if next == sum {
            break;
        }
        sum = next;
        k += F::one();
    }
    cst::<F>(0.5) + normal_pdf(x) * sum
}

/// Upper tail probability for x > 0 via the Laplace continued fraction for
/// the Mills ratio.
fn mills_sf<F: Real>(x: F) -> F {
    normal_pdf(x) * mills_ratio(x)
}

/// Mills ratio (1 - Phi(x)) / phi(x) for x > 0.
fn mills_ratio<F: Real>(x: F) -> F {
    // Bottom-up evaluation of 1/(x + 1/(x + 2/(x + 3/(x + ...)))).
    let mut t = x;
    let mut k = 120usize;
    while k > 0 {
        t = x + cnt::<F>(k) / t;
        k -= 1;
    }
    F::one() / t
}

/// Normal quantile by bisection. Solved in survival space so tail quantiles
/// keep full precision instead of comparing probabilities against 1.
pub fn normal_quantile<F: Real>(p: F) -> F {
    assert!(p > F::zero() && p < F::one());
    let half = cst::<F>(0.5);
    if p == half {
        return F::zero();
    }
    if p < half {
        -quantile_from_sf(p)
    } else {
        quantile_from_sf(F::one() - p)
    }
}

/// x >= 0 with 1 - Phi(x) = sf.
fn quantile_from_sf<F: Real>(sf: F) -> F {
    debug_assert!(sf > F::zero() && sf <= cst(0.5));
    let surv = |x: F| {
        if x >= cst(4.0) {
            mills_sf(x)
        } else {
            F::one() - normal_cdf(x)
        }
    };
    let mut lo = F::zero();
    let mut hi = cst::<F>(42.0);
    for _ in 0..300 {
        let mid = (lo + hi) * cst::<F>(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if surv(mid) > sf {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * cst::<F>(0.5)
}

/// Exact first two moments of N(mean, sd^2) truncated to [lo, hi], by the
/// phi/Phi ratio formulas with Mills-ratio rewrites in the far tails.
pub fn truncated_normal_moments<F: Real>(mean: F, sd: F, lo: F, hi: F) -> (F, F) {
    assert!(sd > F::zero());
    assert!(lo < hi, "degenerate truncation interval");
    let a = (lo - mean) / sd;
    let b = (hi - mean) / sd;

    // r1 = (phi(a) - phi(b)) / Z and r2 = (a phi(a) - b phi(b)) / Z with
    // Z = Phi(b) - Phi(a), using conventions phi(+-inf) = 0, x phi(x) -> 0.
    let (r1, r2) = standardized_ratios(a, b);
    let m = mean + sd * r1;
    let v = sd * sd * (F::one() + r2 - r1 * r1);
    (m, v)
}

fn standardized_ratios<F: Real>(a: F, b: F) -> (F, F) {
    let zero = F::zero();
    let tail = cst::<F>(4.0);
    if a > tail {
        // Both bounds in the upper tail: divide through by phi(a).
        // Z = phi(a) M(a) - phi(b) M(b) and phi(b)/phi(a) = exp((a^2-b^2)/2).
        let (ma, r) = if b == F::infinity() {
            (mills_ratio(a), zero)
        } else {
            (mills_ratio(a), ((a * a - b * b) * cst::<F>(0.5)).exp())
        };
        let mb = if b == F::infinity() { zero } else { mills_ratio(b) };
        let z = ma - mb * r;
        let r1 = (F::one() - r) / z;
        let r2 = (a - b * r) / z;
        return (r1, r2);
    }
    if b < -tail {
        // Mirror image of the upper-tail case.
        let (r1, r2) = standardized_ratios(-b, -a);
        return (-r1, r2);
    }
    let phi_a = if a == F::neg_infinity() { zero } else { normal_pdf(a) };
    let phi_b = if b == F::infinity() { zero } else { normal_pdf(b) };
    let cdf_a = if a == F::neg_infinity() { zero } else { normal_cdf(a) };
    let cdf_b = if b == F::infinity() { F::one() } else { normal_cdf(b) };
    let z = cdf_b - cdf_a;
    let a_term = if a == F::neg_infinity() { zero } else { a * phi_a };
    let b_term = if b == F::infinity() { zero } else { b * phi_b };
    ((phi_a - phi_b) / z, (a_term - b_term) / z)
}

/// Observation model for [`fixed_tree_posterior`].
#[derive(Clone, Copy, Debug)]
pub enum OracleLink<F> {
    /// Gaussian likelihood with known sigma on the (scaled) outcome.
    Continuous { sigma: F },
    /// Exact Bernoulli likelihood with success probability Phi(mu + offset).
    /// Deliberately latent-free so the oracle is independent of the
    /// augmentation scheme it validates.
    Probit { offset: F },
}

/// Posterior means of the leaf values of a small fixed tree, by nested
/// Simpson quadrature over the (possibly order-constrained) joint posterior.
///
/// The order constraints are handled as moving integration limits along a
/// topological order of the domination pairs, so every one-dimensional
/// integrand stays smooth and the quadrature converges at full Simpson rate.
/// Limited to trees with at most 3 leaves and n <= 20; `resolution` is the
/// number of grid points per level (must be odd and >= 3).
pub fn fixed_tree_posterior<F: Real>(
    data: &Dataset<F>,
    tree: &Tree<F>,
    monotone_coords: &[usize],
    leaf_prior: &LeafPriorParams<F>,
    link: OracleLink<F>,
    resolution: usize,
) -> Result<Vec<F>> {
    let b = tree.num_leaves();
    if b > 3 {
        return Err(BartError::InvalidConfig(
            "fixed-tree oracle supports at most 3 leaves".into(),
        ));
    }
    if data.n() > 20 {
        return Err(BartError::InvalidConfig(
            "fixed-tree oracle supports at most 20 observations".into(),
        ));
    }
    if resolution < 3 || resolution % 2 == 0 {
        return Err(BartError::InvalidConfig(
            "quadrature resolution must be odd and at least 3".into(),
        ));
    }

    let assign = tree.assign_leaves(data.n(), |i, j| data.x(i, j));
    let cells = tree.leaf_cells(data.num_covariates());
    let pairs = above_pairs(&cells, monotone_coords);

    // Topological order of the domination DAG: every pair's lower leaf
    // integrates before its upper leaf, so limits only look backwards.
    let order = topological_order(b, &pairs)?;

    // Per-leaf observation lists and integration boxes around a Laplace-style
    // mode estimate.
    let prior_sd = leaf_prior.variance().sqrt();
    let mut obs_by_leaf: Vec<Vec<usize>> = vec![Vec::new(); b];
    for (i, &a) in assign.iter().enumerate() {
        obs_by_leaf[a].push(i);
    }
    let mut box_lo = vec![F::zero(); b];
    let mut box_hi = vec![F::zero(); b];
    for leaf in 0..b {
        let (center, spread) = leaf_mode(data, &obs_by_leaf[leaf], leaf_prior, link);
        let half_width = cst::<F>(10.0) * spread + cst::<F>(2.0) * prior_sd;
        box_lo[leaf] = center - half_width;
        box_hi[leaf] = center + half_width;
    }

    struct Ctx<'a, F: Real> {
        data: &'a Dataset<F>,
        obs_by_leaf: &'a [Vec<usize>],
        leaf_prior: &'a LeafPriorParams<F>,
        link: OracleLink<F>,
        pairs: &'a [crate::tree::AbovePair],
        order: &'a [usize],
        box_lo: &'a [F],
        box_hi: &'a [F],
        resolution: usize,
        log_shift: F,
    }

    // Integrate level `k` of the nested quadrature given the values already
    // fixed for order[0..k]. Returns the mass and the per-leaf first-moment
    // integrals of the remaining levels.
    fn level<F: Real>(ctx: &Ctx<'_, F>, k: usize, mu: &mut Vec<F>) -> (F, Vec<F>) {
        let b = ctx.order.len();
        let leaf = ctx.order[k];
        let mut lo = ctx.box_lo[leaf];
        let mut hi = ctx.box_hi[leaf];
        for pair in ctx.pairs {
            if pair.upper == leaf && ctx.order[..k].contains(&pair.lower) {
                lo = lo.max(mu[pair.lower]);
            }
            if pair.lower == leaf && ctx.order[..k].contains(&pair.upper) {
                hi = hi.min(mu[pair.upper]);
            }
        }
        if !(hi > lo) {
            return (F::zero(), vec![F::zero(); b]);
        }
        let step = (hi - lo) / cnt::<F>(ctx.resolution - 1);
        let third = step / cst::<F>(3.0);
        let mut mass = F::zero();
        let mut moments = vec![F::zero(); b];
        for g in 0..ctx.resolution {
            let x = lo + step * cnt::<F>(g);
            let w = simpson_weight::<F>(g, ctx.resolution) * third;
            let density = (leaf_log_posterior_term(
                ctx.data,
                &ctx.obs_by_leaf[leaf],
                x,
                ctx.leaf_prior,
                ctx.link,
            ) - ctx.log_shift)
                .exp();
            if density == F::zero() {
                continue;
            }
            mu[leaf] = x;
            let (inner_mass, inner_moments) = if k + 1 < b {
                level(ctx, k + 1, mu)
            } else {
                (F::one(), vec![F::zero(); b])
            };
            if inner_mass == F::zero() {
                continue;
            }
            let contrib = w * density * inner_mass;
            mass += contrib;
            for l in 0..b {
                if l == leaf {
                    moments[l] += contrib * x;
                } else {
                    moments[l] += w * density * inner_moments[l];
                }
            }
        }
        (mass, moments)
    }

    // A common log shift keeps the exponentials in range.
    let mut log_shift = F::neg_infinity();
    for leaf in 0..b {
        let (center, _) = leaf_mode(data, &obs_by_leaf[leaf], leaf_prior, link);
        let v = leaf_log_posterior_term(data, &obs_by_leaf[leaf], center, leaf_prior, link);
        log_shift = log_shift.max(v);
    }
    let log_shift = log_shift / cnt::<F>(b);

    let ctx = Ctx {
        data,
        obs_by_leaf: &obs_by_leaf,
        leaf_prior,
        link,
        pairs: &pairs,
        order: &order,
        box_lo: &box_lo,
        box_hi: &box_hi,
        resolution,
        log_shift,
    };
    let mut mu = vec![F::zero(); b];
    let (mass, moments) = level(&ctx, 0, &mut mu);
    if !(mass > F::zero()) {
        return Err(BartError::NonConvergence(
            "posterior mass vanished on the quadrature grid".into(),
        ));
    }
    Ok(moments.into_iter().map(|m| m / mass).collect())
}

fn topological_order(b: usize, pairs: &[crate::tree::AbovePair]) -> Result<Vec<usize>> {
    let mut order = Vec::with_capacity(b);
    let mut placed = vec![false; b];
    while order.len() < b {
        let mut advanced = false;
        for leaf in 0..b {
            if placed[leaf] {
                continue;
            }
            let ready = pairs
                .iter()
                .all(|p| p.upper != leaf || placed[p.lower] || p.lower == leaf);
            if ready {
                placed[leaf] = true;
                order.push(leaf);
                advanced = true;
            }
        }
        if !advanced {
            return Err(BartError::InvalidConfig(
                "domination pairs contain a cycle".into(),
            ));
        }
    }
    Ok(order)
}

#[inline]
fn simpson_weight<F: Real>(i: usize, resolution: usize) -> F {
    if i == 0 || i == resolution - 1 {
        F::one()
    } else if i % 2 == 1 {
        cst(4.0)
    } else {
        cst(2.0)
    }
}

/// Crude mode and curvature scale of one leaf's unconstrained conditional,
/// used only to center the quadrature box.
fn leaf_mode<F: Real>(
    data: &Dataset<F>,
    obs: &[usize],
    leaf_prior: &LeafPriorParams<F>,
    link: OracleLink<F>,
) -> (F, F) {
    let v0 = leaf_prior.variance();
    match link {
        OracleLink::Continuous { sigma } => {
            let n = cnt::<F>(obs.len());
            let sum: F = obs.iter().fold(F::zero(), |a, &i| a + data.y()[i]);
            let prec = n / (sigma * sigma) + F::one() / v0;
            let mean = (sum / (sigma * sigma) + leaf_prior.mu_mean / v0) / prec;
            (mean, (F::one() / prec).sqrt())
        }
        OracleLink::Probit { offset } => {
            // A few Newton steps on the Bernoulli-Phi log posterior.
            let mut mu = leaf_prior.mu_mean;
            for _ in 0..60 {
                let mut grad = -(mu - leaf_prior.mu_mean) / v0;
                let mut hess = -F::one() / v0;
                for &i in obs {
                    let eta = mu + offset;
                    let p = normal_cdf(eta).max(cst(1e-300)).min(F::one() - cst(1e-16));
                    let d = normal_pdf(eta);
                    if data.y()[i] == F::one() {
                        let r = d / p;
                        grad += r;
                        hess -= r * (eta + r);
                    } else {
                        let r = d / (F::one() - p);
                        grad -= r;
                        hess -= r * (r - eta);
                    }
                }
                let step = grad / hess;
                mu = mu - step;
                if step.abs() < cst(1e-12) {
                    break;
                }
            }
            let mut hess = -F::one() / v0;
            for &i in obs {
                let eta = mu + offset;
                let p = normal_cdf(eta).max(cst(1e-300)).min(F::one() - cst(1e-16));
                let d = normal_pdf(eta);
                if data.y()[i] == F::one() {
                    let r = d / p;
                    hess -= r * (eta + r);
                } else {
                    let r = d / (F::one() - p);
                    hess -= r * (r - eta);
                }
            }
            (mu, (-F::one() / hess).max(v0 * cst(1e-6)).sqrt())
        }
    }
}

fn leaf_log_posterior_term<F: Real>(
    data: &Dataset<F>,
    obs: &[usize],
    mu: F,
    leaf_prior: &LeafPriorParams<F>,
    link: OracleLink<F>,
) -> F {
    let v0 = leaf_prior.variance();
    let mut acc = -(mu - leaf_prior.mu_mean) * (mu - leaf_prior.mu_mean) / (cst::<F>(2.0) * v0);
    match link {
        OracleLink::Continuous { sigma } => {
            for &i in obs {
                let r = data.y()[i] - mu;
                acc = acc - r * r / (cst::<F>(2.0) * sigma * sigma);
            }
        }
        OracleLink::Probit { offset } => {
            for &i in obs {
                let p = normal_cdf(mu + offset);
                let p = p.max(cst(1e-300)).min(F::one() - cst(1e-300));
                acc = acc
                    + if data.y()[i] == F::one() {
                        p.ln()
                    } else {
                        (F::one() - p).ln()
                    };
            }
        }
    }
    acc
}

/// Check coordinatewise monotonicity of the forest sum pointwise: sample
/// `num_pairs` random (x, x + h e_i) pairs inside the box and verify the sum
/// of tree evaluations never decreases.
pub fn pointwise_monotone_check<F: Real>(
    forest: &[Tree<F>],
    coords: &[usize],
    box_lo: &[F],
    box_hi: &[F],
    num_pairs: usize,
    seed: u64,
) -> bool {
    if coords.is_empty() {
        return true;
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let p = box_lo.len();
    let eval = |x: &[F]| -> F {
        forest
            .iter()
            .fold(F::zero(), |acc, t| acc + t.evaluate(x))
    };
    for _ in 0..num_pairs {
        let mut x: Vec<F> = (0..p)
            .map(|j| box_lo[j] + (box_hi[j] - box_lo[j]) * F::unit_open(&mut rng))
            .collect();
        let coord = coords[rng.random_range(0..coords.len())];
        let low = eval(&x);
        let headroom = box_hi[coord] - x[coord];
        x[coord] = x[coord] + headroom * F::unit_open(&mut rng);
        let high = eval(&x);
        if high < low {
            return false;
        }
    }
    true
}
