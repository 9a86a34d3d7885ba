//! Globally adaptive Gauss-Kronrod (7, 15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("integral did not converge (estimate {estimate}, error {error}); endpoint singularity is not integrable or too strong")]
    NonIntegrableEndpoint { estimate: f64, error: f64 },
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
}

/// Endpoint treatment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Endpoint {
    #[default]
    Plain,
    /// `x = c + h sin(phi)`, which absorbs inverse square-root endpoint behavior.
    SqrtSub,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_INTERVALS: usize = 4000;

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    floor: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Kronrod value, error estimate and roundoff floor of the estimate.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = h * XGK[j];
        let (f1, f2) = (f(c - dx), f(c + dx));
        k += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    let (k, g, abs) = (k * h, g * h, abs * h.abs());
    let floor = 50.0 * f64::EPSILON * abs;
    let err = (k - g).abs();
    if k.is_finite() && err.is_finite() {
        (k, err, floor)
    } else {
        (k, f64::INFINITY, 0.0)
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`, or to the
/// roundoff level of the integrand when that is larger.
pub fn quad_detail(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    endpoint: Endpoint,
) -> Result<QuadResult, QuadError> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(QuadError::InvalidInterval { a, b });
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    match endpoint {
        Endpoint::Plain => adapt(&f, a, b, tol),
        Endpoint::SqrtSub => {
            let c = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            let g = |p: f64| {
                let (s, co) = p.sin_cos();
                f(c + h * s) * h * co
            };
            adapt(&g, -FRAC_PI_2, FRAC_PI_2, tol)
        }
    }
}

pub fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, endpoint: Endpoint) -> Result<f64, QuadError> {
    quad_detail(f, a, b, tol, endpoint).map(|r| r.value)
}

fn adapt(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<QuadResult, QuadError> {
    let (v, e, fl) = gk15(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece {
        a,
        b,
        value: v,
        error: e,
        floor: fl,
    });
    let (mut err, mut floor) = (e, fl);
    let mut evals = 15;
    let min_width = (b - a) * 1e-14;
    loop {
        if err <= tol.max(floor) {
            // the running sums drift; confirm before stopping
            err = heap.iter().map(|p| p.error).sum();
            floor = heap.iter().map(|p| p.floor).sum();
            if err <= tol.max(floor) {
                break;
            }
        }
        if heap.len() >= MAX_INTERVALS {
            break;
        }
        let p = heap.pop().expect("non-empty");
        if p.b - p.a < min_width {
            heap.push(p);
            break;
        }
        let m = 0.5 * (p.a + p.b);
        let (v1, e1, f1) = gk15(f, p.a, m);
        let (v2, e2, f2) = gk15(f, m, p.b);
        evals += 30;
        err += e1 + e2 - p.error;
        floor += f1 + f2 - p.floor;
        heap.push(Piece {
            a: p.a,
            b: m,
            value: v1,
            error: e1,
            floor: f1,
        });
        heap.push(Piece {
            a: m,
            b: p.b,
            value: v2,
            error: e2,
            floor: f2,
        });
        if !err.is_finite() {
            // inf - inf after a non-finite piece was split
            err = heap.iter().map(|p| p.error).sum();
        }
    }
    let total_sum: f64 = heap.iter().map(|p| p.value).sum();
    let err_sum: f64 = heap.iter().map(|p| p.error).sum();
    let floor_sum: f64 = heap.iter().map(|p| p.floor).sum();
    if err_sum <= tol.max(floor_sum) && total_sum.is_finite() {
        Ok(QuadResult {
            value: total_sum,
            error: err_sum,
            evaluations: evals,
        })
    } else {
        Err(QuadError::NonIntegrableEndpoint {
            estimate: total_sum,
            error: err_sum,
        })
    }
}
