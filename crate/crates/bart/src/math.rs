//! Normal and chi-square special functions used by the samplers.
//!
//! The normal CDF goes through Cody's rational approximations for erfc and
//! the quantile through Wichura's PPND16 algorithm. The validation code in
//! [`crate::oracle`] deliberately uses different algorithms (Taylor series,
//! continued fractions, bisection) so the two paths can cross-check each
//! other in tests.

use crate::float::{cst, Real};

/// Standard normal density.
#[inline]
pub fn norm_pdf<F: Real>(x: F) -> F {
    let half = cst::<F>(0.5);
    (-(x * x) * half).exp() / (F::TAU()).sqrt()
}

/// Log of the standard normal density.
#[inline]
pub fn norm_ln_pdf<F: Real>(x: F) -> F {
    let half = cst::<F>(0.5);
    -(x * x) * half - half * F::TAU().ln()
}

// Cody's coefficients for erf on |x| <= 0.46875.
const ERF_A: [f64; 5] = [
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
];
const ERF_B: [f64; 4] = [
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
];
// Coefficients for erfc on 0.46875 < x <= 4.
const ERF_C: [f64; 9] = [
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
    2.15311535474403846e-8,
];
const ERF_D: [f64; 8] = [
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
];
// Coefficients for erfc on x > 4.
const ERF_P: [f64; 6] = [
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
];
const ERF_Q: [f64; 5] = [
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];
const ONE_OVER_SQRT_PI: f64 = 5.6418958354775628695e-1;

/// Complementary error function (Cody 1969).
pub fn erfc<F: Real>(x: F) -> F {
    let y = x.abs();
    let one = F::one();
    let sixteen = cst::<F>(16.0);
    let result = if y <= cst(0.46875) {
        let z = y * y;
        let mut num = cst::<F>(ERF_A[4]) * z;
        let mut den = z;
        for i in 0..3 {
            num = (num + cst(ERF_A[i])) * z;
            den = (den + cst(ERF_B[i])) * z;
        }
        return one - x * (num + cst(ERF_A[3])) / (den + cst(ERF_B[3]));
    } else if y <= cst(4.0) {
        let mut num = cst::<F>(ERF_C[8]) * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + cst(ERF_C[i])) * y;
            den = (den + cst(ERF_D[i])) * y;
        }
        let r = (num + cst(ERF_C[7])) / (den + cst(ERF_D[7]));
        let ysq = (y * sixteen).trunc() / sixteen;
        let del = (y - ysq) * (y + ysq);
        (-ysq * ysq).exp() * (-del).exp() * r
    } else {
        let z = one / (y * y);
        let mut num = cst::<F>(ERF_P[5]) * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + cst(ERF_P[i])) * z;
            den = (den + cst(ERF_Q[i])) * z;
        }
        let mut r = z * (num + cst(ERF_P[4])) / (den + cst(ERF_Q[4]));
        r = (cst::<F>(ONE_OVER_SQRT_PI) - r) / y;
        let ysq = (y * sixteen).trunc() / sixteen;
        let del = (y - ysq) * (y + ysq);
        (-ysq * ysq).exp() * (-del).exp() * r
    };
    if x < F::zero() {
        cst::<F>(2.0) - result
    } else {
        result
    }
}

/// Standard normal CDF Phi(x).
#[inline]
pub fn norm_cdf<F: Real>(x: F) -> F {
    cst::<F>(0.5) * erfc(-x / F::SQRT_2())
}

/// Standard normal survival function 1 - Phi(x).
#[inline]
pub fn norm_sf<F: Real>(x: F) -> F {
    cst::<F>(0.5) * erfc(x / F::SQRT_2())
}

/// Log of the standard normal survival function, stable far into the tail.
pub fn ln_norm_sf<F: Real>(x: F) -> F {
    if x <= cst(30.0) {
        norm_sf(x).ln()
    } else {
        // Asymptotic expansion of Mills' ratio; erfc underflows near x ~ 37.
        let z = F::one() / (x * x);
        let series = F::one()
            - z * (F::one() - cst::<F>(3.0) * z * (F::one() - cst::<F>(5.0) * z * (F::one() - cst::<F>(7.0) * z)));
        norm_ln_pdf(x) - x.ln() + series.ln()
    }
}

/// log(Phi(b) - Phi(a)) for a standardized interval, computed from whichever
/// tail keeps the subtraction well conditioned.
pub fn ln_norm_interval<F: Real>(a: F, b: F) -> F {
    debug_assert!(a < b);
    let zero = F::zero();
    if a == F::neg_infinity() && b == F::infinity() {
        return zero;
    }
    if a > zero {
        let la = ln_norm_sf(a);
        if b == F::infinity() {
            return la;
        }
        let lb = ln_norm_sf(b);
        return la + (-(lb - la).exp()).ln_1p();
    }
    if b < zero {
        return ln_norm_interval(-b, -a);
    }
    // Interval straddles zero; the direct difference is well conditioned.
    let upper = if b == F::infinity() { F::one() } else { norm_cdf(b) };
    let lower = if a == F::neg_infinity() { zero } else { norm_cdf(a) };
    (upper - lower).ln()
}

// PPND16 coefficients (Wichura, AS 241).
const PPND_A: [f64; 8] = [
    3.3871328727963666080e0,
    1.3314166789178437745e2,
    1.9715909503065514427e3,
    1.3731693765509461125e4,
    4.5921953931549871457e4,
    6.7265770927008700853e4,
    3.3430575583588128105e4,
    2.5090809287301226727e3,
];
const PPND_B: [f64; 7] = [
    4.2313330701600911252e1,
    6.8718700749205790830e2,
    5.3941960214247511077e3,
    2.1213794301586595867e4,
    3.9307895800092710610e4,
    2.8729085735721942674e4,
    5.2264952788528545610e3,
];
const PPND_C: [f64; 8] = [
    1.42343711074968357734e0,
    4.63033784615654529590e0,
    5.76949722146069140550e0,
    3.64784832476320460504e0,
    1.27045825245236838258e0,
    2.41780725177450611770e-1,
    2.27238449892691845833e-2,
    7.74545014278341407640e-4,
];
const PPND_D: [f64; 7] = [
    2.05319162663775882187e0,
    1.67638483018380384940e0,
    6.89767334985100004550e-1,
    1.48103976427480074590e-1,
    1.51986665636164571966e-2,
    5.47593808499534494600e-4,
    1.05075007164441684324e-9,
];
const PPND_E: [f64; 8] = [
    6.65790464350110377720e0,
    5.46378491116411436990e0,
    1.78482653991729133580e0,
    2.96560571828504891230e-1,
    2.65321895265761230930e-2,
    1.24266094738807843860e-3,
    2.71155556874348757815e-5,
    2.01033439929228813265e-7,
];
const PPND_F: [f64; 7] = [
    5.99832206555887937690e-1,
    1.36929880922735805310e-1,
    1.48753612908506148525e-2,
    7.86869131145613259100e-4,
    1.84631831751005468180e-6,
    1.42151175831644588870e-7,
    2.04426310338993978564e-15,
];

fn ppnd_ratio<F: Real>(num: &[f64; 8], den: &[f64; 7], r: F) -> F {
    let mut top = cst::<F>(num[7]);
    for i in (0..7).rev() {
        top = top * r + cst(num[i]);
    }
    let mut bot = cst::<F>(den[6]);
    for i in (0..6).rev() {
        bot = bot * r + cst(den[i]);
    }
    top / (bot * r + F::one())
}

/// Standard normal quantile Phi^{-1}(p) (Wichura, AS 241).
///
/// Returns -inf for p <= 0 and +inf for p >= 1.
pub fn norm_quantile<F: Real>(p: F) -> F {
    let zero = F::zero();
    let one = F::one();
    if p <= zero {
        return F::neg_infinity();
    }
    if p >= one {
        return F::infinity();
    }
    let half = cst::<F>(0.5);
    let q = p - half;
    if q.abs() <= cst(0.425) {
        let r = cst::<F>(0.180625) - q * q;
        return q * ppnd_ratio(&PPND_A, &PPND_B, r);
    }
    let r = if q < zero { p } else { one - p };
    let r = (-r.ln()).sqrt();
    let val = if r <= cst(5.0) {
        ppnd_ratio(&PPND_C, &PPND_D, r - cst(1.6))
    } else {
        ppnd_ratio(&PPND_E, &PPND_F, r - cst(5.0))
    };
    if q < zero {
        -val
    } else {
        val
    }
}

// Lanczos (g = 7, n = 9).
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Log-gamma via the Lanczos approximation.
pub fn ln_gamma<F: Real>(x: F) -> F {
    let half = cst::<F>(0.5);
    if x < half {
        // Reflection formula.
        return F::PI().ln() - (F::PI() * x).sin().ln() - ln_gamma(F::one() - x);
    }
    let x = x - F::one();
    let mut acc = cst::<F>(LANCZOS[0]);
    for (i, &coef) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + cst::<F>(coef) / (x + cnt_f(i));
    }
    let t = x + cst(7.5);
    half * F::TAU().ln() + (x + half) * t.ln() - t + acc.ln()
}

#[inline]
fn cnt_f<F: Real>(i: usize) -> F {
    F::from_usize(i).expect("index fits scalar")
}

/// Regularized lower incomplete gamma P(a, x).
pub fn gamma_p<F: Real>(a: F, x: F) -> F {
    debug_assert!(a > F::zero() && x >= F::zero());
    if x == F::zero() {
        return F::zero();
    }
    if x < a + F::one() {
        gamma_p_series(a, x)
    } else {
        F::one() - gamma_q_cf(a, x)
    }
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
pub fn gamma_q<F: Real>(a: F, x: F) -> F {
    debug_assert!(a > F::zero() && x >= F::zero());
    if x == F::zero() {
        return F::one();
    }
    if x < a + F::one() {
        F::one() - gamma_p_series(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

fn gamma_p_series<F: Real>(a: F, x: F) -> F {
    let mut ap = a;
    let mut sum = F::one() / a;
    let mut del = sum;
    for _ in 0..500 {
        ap += F::one();
        del = del * x / ap;
        sum += del;
        if del.abs() < sum.abs() * F::epsilon() {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_q_cf<F: Real>(a: F, x: F) -> F {
    let fpmin = F::min_positive_value() / F::epsilon();
    let mut b = x + F::one() - a;
    let mut c = F::one() / fpmin;
    let mut d = F::one() / b;
    let mut h = d;
    let mut i = F::one();
    for _ in 0..500 {
        let an = -i * (i - a);
        b += cst(2.0);
        d = an * d + b;
        if d.abs() < fpmin {
            d = fpmin;
        }
        c = b + an / c;
        if c.abs() < fpmin {
            c = fpmin;
        }
        d = F::one() / d;
        let del = d * c;
        h = h * del;
        if (del - F::one()).abs() < F::epsilon() {
            break;
        }
        i += F::one();
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Chi-square CDF with `dof` degrees of freedom.
#[inline]
pub fn chi_square_cdf<F: Real>(x: F, dof: F) -> F {
    let half = cst::<F>(0.5);
    gamma_p(dof * half, x * half)
}

/// Chi-square survival function.
#[inline]
pub fn chi_square_sf<F: Real>(x: F, dof: F) -> F {
    let half = cst::<F>(0.5);
    gamma_q(dof * half, x * half)
}

/// Chi-square quantile by bracketed bisection on the CDF.
pub fn chi_square_quantile<F: Real>(p: F, dof: F) -> F {
    assert!(
        p > F::zero() && p < F::one(),
        "chi-square quantile needs p in (0, 1)"
    );
    assert!(dof > F::zero());
    let mut lo = F::zero();
    let mut hi = dof + cst::<F>(10.0) * (cst::<F>(2.0) * dof).sqrt() + cst(10.0);
    while chi_square_cdf(hi, dof) < p {
        hi = hi * cst(2.0);
    }
    for _ in 0..200 {
        let mid = cst::<F>(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if chi_square_cdf(mid, dof) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    cst::<F>(0.5) * (lo + hi)
}
