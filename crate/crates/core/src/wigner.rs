//! Closed-form and quadrature evaluation of Wigner quasi-distributions.
//!
//! Natural units throughout (ħ = 1); `r` and `p` are dimensionless. Fock states
//! use the `e^{-(r²+p²)}` convention, cat and coherent states the
//! `e^{-2|β-α|²}` convention with `β - α = r + ip`.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Below this shift magnitude the cat formula is 0/0 and callers should use
/// the first Fock state instead.
pub const CAT_EPSILON: f64 = 1e-3;

const CAT_IMAG_LIMIT: f64 = 1e-10;
const TRANSFORM_IMAG_LIMIT: f64 = 1e-8;
const TRANSFORM_TAIL_LIMIT: f64 = 1e-6;
const NORM_TOLERANCE: f64 = 1e-9;
/// Nodes at each end of a sampled ψ that must carry negligible mass.
const EDGE_NODES: usize = 3;

/// Default sampling for oscillator eigenstates: span ±12 with 2049 nodes.
pub const DEFAULT_PSI_SPAN: f64 = 12.0;
pub const DEFAULT_PSI_NODES: usize = 2049;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub r: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(r: f64, p: f64) -> Self {
        debug_assert!(r.is_finite() && p.is_finite());
        PhasePoint { r, p }
    }

    fn as_complex(self) -> Complex64 {
        Complex64::new(self.r, self.p)
    }
}

/// Laguerre polynomial `L_m(x)` by the three-term recurrence.
pub fn laguerre(m: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if m == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for k in 1..m {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Wigner function of the Fock state `|m⟩`.
pub fn eval_fock(m: u32, pt: PhasePoint) -> f64 {
    let s = pt.r * pt.r + pt.p * pt.p;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    sign / PI * (-s).exp() * laguerre(m, 2.0 * s)
}

/// Wigner function of the shifted-coherent-minus-projection ("kitten") state
/// with amplitude shift `delta_alpha`, evaluated at `β - α = r + ip`.
pub fn eval_cat(delta_alpha: Complex64, pt: PhasePoint) -> Result<f64> {
    let d2 = delta_alpha.norm_sqr();
    if d2.sqrt() <= CAT_EPSILON {
        return Err(Error::DegenerateShift {
            magnitude: d2.sqrt(),
            eps: CAT_EPSILON,
        });
    }
    let z = pt.as_complex();
    let z2 = z.norm_sqr();
    // -expm1 keeps the denominator accurate for small shifts
    let prefactor = 2.0 / (PI * -(-d2).exp_m1());

    let lobe_shifted = (-2.0 * (z - delta_alpha).norm_sqr()).exp();
    let lobe_origin = (-d2 - 2.0 * z2).exp();
    // the two interference exponents are folded into one argument each so the
    // e^{2 z δα*} growth never overflows on its own
    let fringe = (Complex64::new(-d2 - 2.0 * z2, 0.0) + 2.0 * z * delta_alpha.conj()).exp()
        + (Complex64::new(-d2 - 2.0 * z2, 0.0) + 2.0 * z.conj() * delta_alpha).exp();

    let bracket = Complex64::new(lobe_shifted + lobe_origin, 0.0) - fringe;
    let value = bracket * prefactor;
    if value.im.abs() >= CAT_IMAG_LIMIT {
        return Err(Error::ImaginaryResidue {
            residue: value.im.abs(),
            limit: CAT_IMAG_LIMIT,
        });
    }
    Ok(value.re)
}

/// Wigner function of the coherent state `|α⟩`, a Gaussian lobe of peak `2/π`.
pub fn eval_coherent(alpha: Complex64, pt: PhasePoint) -> f64 {
    let dr = pt.r - alpha.re;
    let dp = pt.p - alpha.im;
    2.0 / PI * (-2.0 * (dr * dr + dp * dp)).exp()
}

/// A pure state sampled on a uniform position grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    x0: f64,
    dx: f64,
    values: Vec<Complex64>,
    /// prefix[k] = Σ_{j<k} |ψ_j|² dx
    prefix: Vec<f64>,
}

impl Wavefunction {
    pub fn new(x0: f64, dx: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite() && x0.is_finite()) {
            return Err(Error::InvalidWavefunction(format!("bad grid x0={x0}, dx={dx}")));
        }
        if values.len() < 7 {
            return Err(Error::InvalidWavefunction(format!(
                "need at least 7 samples, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidWavefunction("non-finite sample".into()));
        }
        let mut prefix = Vec::with_capacity(values.len() + 1);
        let mut acc = 0.0;
        prefix.push(acc);
        for v in &values {
            acc += v.norm_sqr() * dx;
            prefix.push(acc);
        }
        if (acc - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidWavefunction(format!("norm {acc} differs from 1")));
        }
        Ok(Wavefunction { x0, dx, values, prefix })
    }

    /// The `m`-th harmonic-oscillator eigenfunction on `[-span, span]`.
    pub fn oscillator_eigenstate(m: u32, span: f64, nodes: usize) -> Result<Self> {
        if nodes < 7 || !(span > 0.0) {
            return Err(Error::InvalidWavefunction("bad sampling".into()));
        }
        let dx = 2.0 * span / (nodes - 1) as f64;
        let values = (0..nodes)
            .map(|k| Complex64::new(hermite_function(m, -span + k as f64 * dx), 0.0))
            .collect();
        Self::new(-span, dx, values)
    }

    /// Reads a `x,re,im` CSV with a uniform x column.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next().map(str::trim) {
            Some("x,re,im") => {}
            other => {
                return Err(Error::Parse(format!(
                    "{}: expected header `x,re,im`, found {other:?}",
                    path.display()
                )))
            }
        }
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for (n, line) in lines.enumerate() {
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("{} row {}: {e}", path.display(), n + 1)))?;
            if cols.len() != 3 {
                return Err(Error::Parse(format!(
                    "{} row {}: expected 3 columns",
                    path.display(),
                    n + 1
                )));
            }
            xs.push(cols[0]);
            values.push(Complex64::new(cols[1], cols[2]));
        }
        if xs.len() < 2 {
            return Err(Error::InvalidWavefunction("too few samples".into()));
        }
        let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        for (k, x) in xs.iter().enumerate() {
            let expected = xs[0] + k as f64 * dx;
            if (x - expected).abs() > 1e-9 * dx.abs().max(1.0) {
                return Err(Error::InvalidWavefunction(format!(
                    "x grid is not uniform at row {}",
                    k + 1
                )));
            }
        }
        Self::new(xs[0], dx, values)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn x_end(&self) -> f64 {
        self.x0 + (self.values.len() - 1) as f64 * self.dx
    }

    /// ⟨x⟩ and ⟨p⟩ of the sampled state.
    pub fn mean_position_momentum(&self) -> (f64, f64) {
        let n = self.values.len();
        let mut x_mean = 0.0;
        let mut p_mean = 0.0;
        for k in 0..n {
            let psi = self.values[k];
            x_mean += (self.x0 + k as f64 * self.dx) * psi.norm_sqr() * self.dx;
            if k > 0 && k + 1 < n {
                let deriv = (self.values[k + 1] - self.values[k - 1]) / (2.0 * self.dx);
                p_mean += (psi.conj() * deriv).im * self.dx;
            }
        }
        (x_mean, p_mean)
    }

    /// Six-point Lagrange interpolation of ψ at `x`.
    fn interpolate(&self, x: f64) -> Complex64 {
        let n = self.values.len();
        let pos = (x - self.x0) / self.dx;
        let base = (pos.floor() as isize - 2).clamp(0, n as isize - 6) as usize;
        let t = pos - base as f64;
        let mut out = Complex64::new(0.0, 0.0);
        for j in 0..6 {
            let mut w = 1.0;
            for i in 0..6 {
                if i != j {
                    w *= (t - i as f64) / (j as f64 - i as f64);
                }
            }
            if w != 0.0 {
                out += self.values[base + j] * w;
            }
        }
        out
    }

    /// Mass on the outermost nodes. Past the samples ψ is taken to vanish,
    /// which is only sound when this is negligible.
    fn edge_mass(&self) -> f64 {
        let n = self.values.len();
        self.prefix[EDGE_NODES] + (self.prefix[n] - self.prefix[n - EDGE_NODES])
    }
}

/// Normalized Hermite function `ψ_m(x)` (oscillator eigenfunction, ħ = m = ω = 1).
pub fn hermite_function(m: u32, x: f64) -> f64 {
    let mut prev = PI.powf(-0.25) * (-x * x / 2.0).exp();
    if m == 0 {
        return prev;
    }
    let mut cur = 2f64.sqrt() * x * prev;
    for n in 1..m {
        let n = n as f64;
        let next = (2.0 / (n + 1.0)).sqrt() * x * cur - (n / (n + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Wigner transform of a sampled wavefunction at one phase-space point.
pub fn wigner_transform(psi: &Wavefunction, pt: PhasePoint) -> Result<f64> {
    Ok(wigner_transform_row(psi, pt.r, &[pt.p])?[0])
}

/// Wigner transform along a line of constant `r`.
///
/// With `y = 2u` the integrand is `ψ(r+u) ψ*(r-u) e^{-2ipu}`; the products
/// depend only on `r`, so they are formed once and reused for every `p`.
/// Composite Simpson over the symmetric node set `u = k·dx`, `|k| ≤ K`.
pub fn wigner_transform_row(psi: &Wavefunction, r: f64, ps: &[f64]) -> Result<Vec<f64>> {
    let dx = psi.dx;
    let half_span = (psi.x_end() - r).min(r - psi.x0);
    let k_max = if half_span > 0.0 {
        (half_span / dx + 1e-9).floor() as usize
    } else {
        0
    };
    let tail = psi.edge_mass();
    if tail > TRANSFORM_TAIL_LIMIT {
        return Err(Error::QuadratureSpanTooSmall { tail });
    }
    // beyond |u| = k_max·dx one of ψ(r ± u) lies past the samples
    if r < psi.x0 || r > psi.x_end() {
        return Ok(vec![0.0; ps.len()]);
    }

    // products for u ≥ 0; the u < 0 half is their conjugate
    let products: Vec<Complex64> = (0..=k_max)
        .map(|k| {
            let u = k as f64 * dx;
            let w = simpson_weight(k, k_max) * dx / 3.0;
            psi.interpolate(r + u) * psi.interpolate(r - u).conj() * w
        })
        .collect();

    ps.iter()
        .map(|&p| {
            let step = Complex64::from_polar(1.0, -2.0 * p * dx);
            let mut phase = Complex64::new(1.0, 0.0);
            let mut sum = products[0];
            for k in 1..=k_max {
                phase *= step;
                sum += products[k] * phase + (products[k] * phase).conj();
            }
            let value = sum / PI;
            if value.im.abs() >= TRANSFORM_IMAG_LIMIT {
                return Err(Error::ImaginaryResidue {
                    residue: value.im.abs(),
                    limit: TRANSFORM_IMAG_LIMIT,
                });
            }
            Ok(value.re)
        })
        .collect()
}

/// Simpson weight (without the h/3 factor) of node `±k` on the symmetric set
/// `-k_max..=k_max`, whose 2·k_max intervals are always even in number.
fn simpson_weight(k: usize, k_max: usize) -> f64 {
    if k == k_max {
        1.0
    } else if (k + k_max) % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

/// A quantum state whose Wigner function the library can evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Fock {
        m: u32,
    },
    Cat {
        delta_alpha: Complex64,
        alpha: Complex64,
    },
    Coherent {
        alpha: Complex64,
    },
    Numeric {
        psi: Arc<Wavefunction>,
        source: Option<PathBuf>,
    },
}

impl StateSpec {
    pub fn fock(m: u32) -> Self {
        StateSpec::Fock { m }
    }

    pub fn cat(delta_alpha: f64) -> Result<Self> {
        Self::cat_complex(Complex64::new(delta_alpha, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn cat_complex(delta_alpha: Complex64, alpha: Complex64) -> Result<Self> {
        if delta_alpha.norm() <= CAT_EPSILON {
            return Err(Error::DegenerateShift {
                magnitude: delta_alpha.norm(),
                eps: CAT_EPSILON,
            });
        }
        Ok(StateSpec::Cat { delta_alpha, alpha })
    }

    pub fn coherent(alpha: Complex64) -> Self {
        StateSpec::Coherent { alpha }
    }

    pub fn numeric(psi: Wavefunction) -> Self {
        StateSpec::Numeric {
            psi: Arc::new(psi),
            source: None,
        }
    }

    /// Parses `fock:<m> | cat:<re[,im]>[@<re[,im]>] | coherent:<re[,im]> | psi:<csv-path>`.
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, arg) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("state `{text}` lacks a `kind:` prefix")))?;
        match kind {
            "fock" => arg
                .parse::<u32>()
                .map(StateSpec::fock)
                .map_err(|e| Error::Parse(format!("fock index `{arg}`: {e}"))),
            "cat" => {
                let (shift, alpha) = match arg.split_once('@') {
                    Some((s, a)) => (parse_complex(s)?, parse_complex(a)?),
                    None => (parse_complex(arg)?, Complex64::new(0.0, 0.0)),
                };
                Self::cat_complex(shift, alpha)
            }
            "coherent" => Ok(StateSpec::coherent(parse_complex(arg)?)),
            "psi" => {
                let path = PathBuf::from(arg);
                let psi = Wavefunction::read_csv(&path)?;
                Ok(StateSpec::Numeric {
                    psi: Arc::new(psi),
                    source: Some(path),
                })
            }
            other => Err(Error::Parse(format!("unknown state kind `{other}`"))),
        }
    }

    pub fn evaluate(&self, pt: PhasePoint) -> Result<f64> {
        match self {
            StateSpec::Fock { m } => Ok(eval_fock(*m, pt)),
            StateSpec::Cat { delta_alpha, alpha } => {
                eval_cat(*delta_alpha, PhasePoint::new(pt.r - alpha.re, pt.p - alpha.im))
            }
            StateSpec::Coherent { alpha } => Ok(eval_coherent(*alpha, pt)),
            StateSpec::Numeric { psi, .. } => wigner_transform(psi, pt),
        }
    }

    /// Values along a line of constant `r`.
    pub fn evaluate_row(&self, r: f64, ps: &[f64]) -> Result<Vec<f64>> {
        match self {
            StateSpec::Numeric { psi, .. } => wigner_transform_row(psi, r, ps),
            _ => ps.iter().map(|&p| self.evaluate(PhasePoint::new(r, p))).collect(),
        }
    }

    /// Point the default and reference grids are centred on: the origin for
    /// Fock states, the lobe for coherent states, the midpoint between the two
    /// lobes of a cat state and ⟨x⟩, ⟨p⟩ for sampled states.
    pub fn frame_center(&self) -> PhasePoint {
        match self {
            StateSpec::Fock { .. } => PhasePoint::new(0.0, 0.0),
            StateSpec::Coherent { alpha } => PhasePoint::new(alpha.re, alpha.im),
            StateSpec::Cat { delta_alpha, alpha } => {
                let c = alpha + delta_alpha * 0.5;
                PhasePoint::new(c.re, c.im)
            }
            StateSpec::Numeric { psi, .. } => {
                let (x, p) = psi.mean_position_momentum();
                PhasePoint::new(x, p)
            }
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Fock { m } => write!(f, "fock:{m}"),
            StateSpec::Cat { delta_alpha, alpha } => {
                write!(f, "cat:{},{}", delta_alpha.re, delta_alpha.im)?;
                if alpha.norm() != 0.0 {
                    write!(f, "@{},{}", alpha.re, alpha.im)?;
                }
                Ok(())
            }
            StateSpec::Coherent { alpha } => write!(f, "coherent:{},{}", alpha.re, alpha.im),
            StateSpec::Numeric { source: Some(path), .. } => write!(f, "psi:{}", path.display()),
            StateSpec::Numeric { psi, source: None } => {
                write!(f, "psi:<{} samples>", psi.values.len())
            }
        }
    }
}

fn parse_complex(text: &str) -> Result<Complex64> {
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("number `{s}`: {e}")))
    };
    let z = match text.split_once(',') {
        Some((re, im)) => Complex64::new(parse(re)?, parse(im)?),
        None => Complex64::new(parse(text)?, 0.0),
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Parse(format!("non-finite amplitude `{text}`")));
    }
    Ok(z)
}
