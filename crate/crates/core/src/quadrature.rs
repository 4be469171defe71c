//! Adaptive Gauss–Kronrod (15/31 point) quadrature with global bisection.

use crate::error::{BevmError, Result};

const XGK: [f64; 16] = [
    0.998002298693397060285172840152271,
    0.987992518020485428489565718586613,
    0.967739075679139134257347978784337,
    0.937273392400705904307758947710209,
    0.897264532344081900882509656454496,
    0.848206583410427216200648320774217,
    0.790418501442465932967649294817947,
    0.724417731360170047416186054613938,
    0.650996741297416970533735895313275,
    0.570972172608538847537226737253911,
    0.485081863640239680693655740232351,
    0.394151347077563369897207370981045,
    0.299180007153168812166780024266389,
    0.201194093997434522300628303394596,
    0.101142066918717499027074231447392,
    0.0,
];

const WGK: [f64; 16] = [
    0.005377479872923348987792051430128,
    0.015007947329316122538374763075807,
    0.025460847326715320186874001019653,
    0.035346360791375846222037948478360,
    0.044589751324764876608227299373280,
    0.053481524690928087265343147239430,
    0.062009567800670640285139230960803,
    0.069854121318728258709520077099147,
    0.076849680757720378894432777482659,
    0.083080502823133021038289247286104,
    0.088564443056211770647275443693774,
    0.093126598170825321225486872747346,
    0.096642726983623678505179907627589,
    0.099173598721791959332393173484603,
    0.100769845523875595044946662617570,
    0.101330007014791549017374792767493,
];

// Gauss weights for the odd-indexed nodes of XGK (1, 3, ..., 13) and the centre.
const WG: [f64; 8] = [
    0.030753241996117268354628393577204,
    0.070366047488108124709267416450667,
    0.107159220467171935011869546685869,
    0.139570677926154314447804794511028,
    0.166269205816993933553200860481209,
    0.186161000015562211026800561866423,
    0.198431485327111576456118326443839,
    0.202578241925561272880620199967519,
];

/// Value and estimated absolute error of an integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
}

impl std::ops::Add for Quad {
    type Output = Quad;
    fn add(self, o: Quad) -> Quad {
        Quad {
            value: self.value + o.value,
            error: self.error + o.error,
        }
    }
}

/// Tolerances and subdivision budget.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_intervals: 2000,
        }
    }
}

fn kronrod_rule<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Quad {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut gauss = fc * WG[7];
    let mut kronrod = fc * WGK[15];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(15).enumerate() {
        let dx = half * x;
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Quad {
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]` to `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<Quad> {
    if a == b {
        return Ok(Quad {
            value: 0.0,
            error: 0.0,
        });
    }
    let mut intervals: Vec<(f64, f64, Quad)> = vec![(a, b, kronrod_rule(&f, a, b))];
    loop {
        let total = intervals
            .iter()
            .fold(Quad { value: 0.0, error: 0.0 }, |acc, iv| acc + iv.2);
        if !total.value.is_finite() {
            return Err(BevmError::Numeric {
                message: format!("non-finite integrand on [{a}, {b}]"),
                achieved: f64::INFINITY,
            });
        }
        let target = opts.abs_tol.max(opts.rel_tol * total.value.abs());
        if total.error <= target {
            return Ok(total);
        }
        if intervals.len() >= opts.max_intervals {
            return Err(BevmError::Numeric {
                message: format!(
                    "quadrature on [{a}, {b}] did not converge within {} intervals",
                    opts.max_intervals
                ),
                achieved: total.error,
            });
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.error.total_cmp(&y.1 .2.error))
            .expect("non-empty");
        let (lo, hi, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval can no longer be split in floating point
            return Err(BevmError::Numeric {
                message: format!("quadrature interval collapsed near {lo}"),
                achieved: total.error,
            });
        }
        intervals.push((lo, mid, kronrod_rule(&f, lo, mid)));
        intervals.push((mid, hi, kronrod_rule(&f, mid, hi)));
    }
}

/// Sums [`integrate`] over consecutive breakpoints.
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    opts: &QuadOptions,
) -> Result<Quad> {
    let mut acc = Quad {
        value: 0.0,
        error: 0.0,
    };
    for w in breaks.windows(2) {
        acc = acc + integrate(&f, w[0], w[1], opts)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let q = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, &QuadOptions::default()).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((q.value - exact).abs() < 1e-13);
    }

    #[test]
    fn kinked_integrand_with_breakpoint() {
        let f = |x: f64| (x - 0.3).abs();
        let q = integrate_pieces(f, &[0.0, 0.3, 1.0], &QuadOptions::default()).unwrap();
        assert!((q.value - (0.045 + 0.245)).abs() < 1e-14);
    }

    #[test]
    fn smooth_transcendental() {
        let q = integrate(f64::exp, 0.0, 1.0, &QuadOptions::default()).unwrap();
        assert!((q.value - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn reports_non_convergence() {
        let opts = QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 0.0,
            max_intervals: 3,
        };
        let err = integrate(|x: f64| x.powf(-0.9), 0.0, 1.0, &opts).unwrap_err();
        match err {
            BevmError::Numeric { achieved, .. } => assert!(achieved > 1e-14),
            other => panic!("unexpected {other:?}"),
        }
    }
}
