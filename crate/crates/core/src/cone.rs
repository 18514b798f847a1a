//! Function representations: step functions on `(0, a_N]`, piecewise
//! closed-form functions, and the analytic test families.
//!
//! Intervals are half-open `(lo, hi]`. Values at isolated endpoints never
//! affect an `L^p` quantity, but a fixed convention keeps evaluation
//! deterministic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Step functions
// ---------------------------------------------------------------------------

/// `f = Σ b_n χ_(a_{n-1}, a_n]` with `a_0 = 0 < a_1 < … < a_N` and `b_n > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepFunctionJson", into = "StepFunctionJson")]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    cone: bool,
}

#[derive(Serialize, Deserialize)]
struct StepFunctionJson {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<StepFunctionJson> for StepFunction {
    type Error = Error;
    fn try_from(j: StepFunctionJson) -> Result<Self> {
        make_step(j.breakpoints, j.values)
    }
}

impl From<StepFunction> for StepFunctionJson {
    fn from(f: StepFunction) -> Self {
        StepFunctionJson {
            breakpoints: f.breakpoints,
            values: f.values,
        }
    }
}

/// Validates and builds a step function. The cone flag is set iff the
/// values are nonincreasing.
pub fn make_step(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<StepFunction> {
    if breakpoints.is_empty() || breakpoints.len() != values.len() {
        return Err(Error::Validation {
            index: 0,
            msg: format!(
                "need equal nonempty lists, got {} breakpoints and {} values",
                breakpoints.len(),
                values.len()
            ),
        });
    }
    let mut prev = 0.0;
    for (i, &a) in breakpoints.iter().enumerate() {
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::Validation {
                index: i,
                msg: format!("breakpoint {a} is not a positive finite number"),
            });
        }
        if a <= prev {
            return Err(Error::Validation {
                index: i,
                msg: format!("breakpoints must increase strictly ({a} after {prev})"),
            });
        }
        prev = a;
    }
    for (i, &b) in values.iter().enumerate() {
        if !b.is_finite() || b <= 0.0 {
            return Err(Error::Validation {
                index: i,
                msg: format!("value {b} is not a positive finite number"),
            });
        }
    }
    let cone = values.windows(2).all(|w| w[0] >= w[1]);
    Ok(StepFunction {
        breakpoints,
        values,
        cone,
    })
}

impl StepFunction {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Nonincreasing, hence a member of the cone.
    pub fn is_cone(&self) -> bool {
        self.cone
    }

    /// `d_n = ln a_n`.
    pub fn log_breakpoints(&self) -> Vec<f64> {
        self.breakpoints.iter().map(|a| a.ln()).collect()
    }

    /// Right end of the support, `a_N`.
    pub fn support_end(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        // first n with x <= a_n
        let n = self.breakpoints.partition_point(|&a| a < x);
        self.values.get(n).copied().unwrap_or(0.0)
    }

    /// `x ↦ b · f(x / a)`.
    pub fn rescaled(&self, a: f64, b: f64) -> Result<StepFunction> {
        make_step(
            self.breakpoints.iter().map(|x| x * a).collect(),
            self.values.iter().map(|v| v * b).collect(),
        )
    }

    pub fn to_piecewise(&self) -> PiecewiseFunction {
        let mut lo = 0.0;
        let pieces = self
            .breakpoints
            .iter()
            .zip(&self.values)
            .map(|(&hi, &b)| {
                let p = Piece {
                    lo,
                    hi,
                    form: Form::constant(b),
                };
                lo = hi;
                p
            })
            .collect();
        PiecewiseFunction { pieces }
    }
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// `constant + linear·x + log·ln x + log_sq·(ln x)^2 + reciprocal/x + power·x^exponent`.
///
/// The operator images needed here all live in this family; each operator
/// supports the subset of terms it can integrate in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Form {
    pub constant: f64,
    pub linear: f64,
    pub log: f64,
    pub log_sq: f64,
    pub reciprocal: f64,
    pub power: f64,
    pub exponent: f64,
}

impl Form {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Form {
            constant: c,
            ..Self::default()
        }
    }

    /// `u + v ln x`.
    pub fn log_affine(u: f64, v: f64) -> Self {
        Form {
            constant: u,
            log: v,
            ..Self::default()
        }
    }

    /// `c x^α`.
    pub fn power(c: f64, alpha: f64) -> Self {
        Form {
            power: c,
            exponent: alpha,
            ..Self::default()
        }
        .normalized()
    }

    pub fn reciprocal(c: f64) -> Self {
        Form {
            reciprocal: c,
            ..Self::default()
        }
    }

    /// `u + w x + v ln x`.
    pub fn linear_plus_log(u: f64, w: f64, v: f64) -> Self {
        Form {
            constant: u,
            linear: w,
            log: v,
            ..Self::default()
        }
    }

    /// Folds power terms with exponent 0, 1 or -1 into the matching slot.
    pub fn normalized(mut self) -> Self {
        if self.power == 0.0 {
            self.exponent = 0.0;
        } else if self.exponent == 0.0 {
            self.constant += self.power;
            self.power = 0.0;
        } else if self.exponent == 1.0 {
            self.linear += self.power;
            self.power = 0.0;
            self.exponent = 0.0;
        } else if self.exponent == -1.0 {
            self.reciprocal += self.power;
            self.power = 0.0;
            self.exponent = 0.0;
        }
        self
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        let (power, exponent) = match (self.power != 0.0, other.power != 0.0) {
            (false, false) => (0.0, 0.0),
            (true, false) => (self.power, self.exponent),
            (false, true) => (other.power, other.exponent),
            (true, true) => {
                if self.exponent != other.exponent {
                    return Err(Error::Unrepresentable(format!(
                        "power terms with exponents {} and {}",
                        self.exponent, other.exponent
                    )));
                }
                (self.power + other.power, self.exponent)
            }
        };
        Ok(Form {
            constant: self.constant + other.constant,
            linear: self.linear + other.linear,
            log: self.log + other.log,
            log_sq: self.log_sq + other.log_sq,
            reciprocal: self.reciprocal + other.reciprocal,
            power,
            exponent,
        }
        .normalized())
    }

    pub fn scale(&self, c: f64) -> Form {
        Form {
            constant: c * self.constant,
            linear: c * self.linear,
            log: c * self.log,
            log_sq: c * self.log_sq,
            reciprocal: c * self.reciprocal,
            power: c * self.power,
            exponent: self.exponent,
        }
        .normalized()
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.add(&other.scale(-1.0))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut v = self.constant;
        if self.linear != 0.0 {
            v += self.linear * x;
        }
        if self.log != 0.0 || self.log_sq != 0.0 {
            let l = x.ln();
            v += self.log * l + self.log_sq * l * l;
        }
        if self.reciprocal != 0.0 {
            v += self.reciprocal / x;
        }
        if self.power != 0.0 {
            v += self.power * x.powf(self.exponent);
        }
        v
    }

    /// Whether the form tends to zero at infinity fast enough to be a tail.
    pub fn decays(&self) -> bool {
        self.constant == 0.0
            && self.linear == 0.0
            && self.log == 0.0
            && self.log_sq == 0.0
            && (self.power == 0.0 || self.exponent < 0.0)
    }

    pub fn is_zero(&self) -> bool {
        *self == Form::zero()
    }

    pub fn kind(&self) -> PieceKind {
        PieceKind::classify(self)
    }
}

/// Tagged view of a [`Form`], used for display and JSON.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PieceKind {
    Constant(f64),
    /// `u + v ln x`
    LogAffine { u: f64, v: f64 },
    /// `c x^α`
    Power { c: f64, alpha: f64 },
    /// `c / x`
    Reciprocal(f64),
    /// `u + w x + v ln x`
    LinearPlusLog { u: f64, w: f64, v: f64 },
    General(Form),
}

impl PieceKind {
    pub fn classify(f: &Form) -> PieceKind {
        let has = |v: f64| v != 0.0;
        let pow = has(f.power);
        let rec = has(f.reciprocal);
        let lin = has(f.linear);
        let log = has(f.log);
        let lsq = has(f.log_sq);
        let cst = has(f.constant);
        match (cst, lin, log, lsq, rec, pow) {
            (_, false, false, false, false, false) => PieceKind::Constant(f.constant),
            (_, false, true, false, false, false) => PieceKind::LogAffine {
                u: f.constant,
                v: f.log,
            },
            (false, false, false, false, false, true) => PieceKind::Power {
                c: f.power,
                alpha: f.exponent,
            },
            (false, false, false, false, true, false) => PieceKind::Reciprocal(f.reciprocal),
            (_, true, _, false, false, false) => PieceKind::LinearPlusLog {
                u: f.constant,
                w: f.linear,
                v: f.log,
            },
            _ => PieceKind::General(*f),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PieceKind::Constant(_) => "constant",
            PieceKind::LogAffine { .. } => "log_affine",
            PieceKind::Power { .. } => "power",
            PieceKind::Reciprocal(_) => "reciprocal",
            PieceKind::LinearPlusLog { .. } => "linear_plus_log",
            PieceKind::General(_) => "general",
        }
    }

    pub fn coeffs(&self) -> Vec<f64> {
        match *self {
            PieceKind::Constant(c) => vec![c],
            PieceKind::LogAffine { u, v } => vec![u, v],
            PieceKind::Power { c, alpha } => vec![c, alpha],
            PieceKind::Reciprocal(c) => vec![c],
            PieceKind::LinearPlusLog { u, w, v } => vec![u, w, v],
            PieceKind::General(f) => vec![
                f.constant,
                f.linear,
                f.log,
                f.log_sq,
                f.reciprocal,
                f.power,
                f.exponent,
            ],
        }
    }

    pub fn from_parts(name: &str, c: &[f64]) -> Result<Form> {
        let need = |n: usize| -> Result<()> {
            if c.len() == n {
                Ok(())
            } else {
                Err(Error::Validation {
                    index: 0,
                    msg: format!("kind {name} takes {n} coefficients, got {}", c.len()),
                })
            }
        };
        Ok(match name {
            "constant" => {
                need(1)?;
                Form::constant(c[0])
            }
            "log_affine" => {
                need(2)?;
                Form::log_affine(c[0], c[1])
            }
            "power" => {
                need(2)?;
                Form::power(c[0], c[1])
            }
            "reciprocal" => {
                need(1)?;
                Form::reciprocal(c[0])
            }
            "linear_plus_log" => {
                need(3)?;
                Form::linear_plus_log(c[0], c[1], c[2])
            }
            "general" => {
                need(7)?;
                Form {
                    constant: c[0],
                    linear: c[1],
                    log: c[2],
                    log_sq: c[3],
                    reciprocal: c[4],
                    power: c[5],
                    exponent: c[6],
                }
                .normalized()
            }
            other => {
                return Err(Error::Validation {
                    index: 0,
                    msg: format!("unknown piece kind {other:?}"),
                })
            }
        })
    }
}

/// One closed-form piece on `(lo, hi]`; `hi` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub form: Form,
}

impl Piece {
    pub fn new(lo: f64, hi: f64, form: Form) -> Result<Piece> {
        let p = Piece { lo, hi, form };
        p.validate(0)?;
        Ok(p)
    }

    pub fn kind(&self) -> PieceKind {
        self.form.kind()
    }

    fn validate(&self, index: usize) -> Result<()> {
        if !(self.lo >= 0.0) || !self.lo.is_finite() || !(self.lo < self.hi) {
            return Err(Error::Validation {
                index,
                msg: format!("bad interval ({}, {}]", self.lo, self.hi),
            });
        }
        if self.hi.is_infinite() && !self.form.decays() {
            return Err(Error::Validation {
                index,
                msg: "infinite tail must decay (power with negative exponent or reciprocal)".into(),
            });
        }
        Ok(())
    }
}

/// Contiguous pieces covering `(0, X]` or `(0, ∞)`; zero beyond `X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PiecewiseJson", into = "PiecewiseJson")]
pub struct PiecewiseFunction {
    pieces: Vec<Piece>,
}

#[derive(Serialize, Deserialize)]
struct PieceJson {
    lo: f64,
    /// `null` encodes `+∞`.
    hi: Option<f64>,
    kind: String,
    coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PiecewiseJson {
    pieces: Vec<PieceJson>,
}

impl TryFrom<PiecewiseJson> for PiecewiseFunction {
    type Error = Error;
    fn try_from(j: PiecewiseJson) -> Result<Self> {
        let pieces = j
            .pieces
            .into_iter()
            .map(|p| {
                Ok(Piece {
                    lo: p.lo,
                    hi: p.hi.unwrap_or(f64::INFINITY),
                    form: PieceKind::from_parts(&p.kind, &p.coeffs)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        PiecewiseFunction::new(pieces)
    }
}

impl From<PiecewiseFunction> for PiecewiseJson {
    fn from(f: PiecewiseFunction) -> Self {
        PiecewiseJson {
            pieces: f
                .pieces
                .into_iter()
                .map(|p| {
                    let k = p.kind();
                    PieceJson {
                        lo: p.lo,
                        hi: p.hi.is_finite().then_some(p.hi),
                        kind: k.name().to_string(),
                        coeffs: k.coeffs(),
                    }
                })
                .collect(),
        }
    }
}

impl PiecewiseFunction {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Validation {
                index: 0,
                msg: "no pieces".into(),
            });
        }
        if pieces[0].lo != 0.0 {
            return Err(Error::Validation {
                index: 0,
                msg: format!("first piece must start at 0, starts at {}", pieces[0].lo),
            });
        }
        for (i, p) in pieces.iter().enumerate() {
            p.validate(i)?;
            if i + 1 < pieces.len() && p.hi != pieces[i + 1].lo {
                return Err(Error::Validation {
                    index: i + 1,
                    msg: format!("piece starts at {} but previous ends at {}", pieces[i + 1].lo, p.hi),
                });
            }
        }
        Ok(Self { pieces })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Right end of the last piece (possibly infinite).
    pub fn support_end(&self) -> f64 {
        self.pieces.last().unwrap().hi
    }

    /// Interior breakpoints, in increasing order.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces
            .iter()
            .map(|p| p.hi)
            .filter(|h| h.is_finite())
            .collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        let i = self.pieces.partition_point(|p| p.hi < x);
        match self.pieces.get(i) {
            Some(p) => p.form.eval(x),
            None => 0.0,
        }
    }

    /// Pointwise `self - other`, on the common refinement of the two
    /// partitions.
    pub fn sub(&self, other: &PiecewiseFunction) -> Result<PiecewiseFunction> {
        let mut cuts: Vec<f64> = self
            .pieces
            .iter()
            .chain(&other.pieces)
            .map(|p| p.hi)
            .collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        let mut pieces = Vec::with_capacity(cuts.len());
        let mut lo = 0.0;
        for hi in cuts {
            let fa = form_on(self, lo, hi);
            let fb = form_on(other, lo, hi);
            pieces.push(Piece {
                lo,
                hi,
                form: fa.sub(&fb)?,
            });
            lo = hi;
        }
        PiecewiseFunction::new(pieces)
    }

    /// Merges adjacent pieces with identical forms.
    pub fn simplified(&self) -> PiecewiseFunction {
        let mut out: Vec<Piece> = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            match out.last_mut() {
                Some(last) if last.form == p.form => last.hi = p.hi,
                _ => out.push(*p),
            }
        }
        PiecewiseFunction { pieces: out }
    }
}

/// The form that `f` uses on `(lo, hi]`, assuming that interval lies within
/// a single piece or entirely beyond the support.
fn form_on(f: &PiecewiseFunction, lo: f64, hi: f64) -> Form {
    let mid = if hi.is_finite() { 0.5 * (lo + hi) } else { lo + 1.0 };
    let i = f.pieces.partition_point(|p| p.hi < mid);
    f.pieces.get(i).map(|p| p.form).unwrap_or_default()
}

// ---------------------------------------------------------------------------
// Test families
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `g_q(x) = (1/q) x^{-1/q} χ_(1,∞)`
    GQ,
    /// `f_q = H* g_q = χ_(0,1] + q g_q`
    FQ,
    /// `f_q - g_q = χ_(0,1] + (q-1) g_q`
    FQMinusGQ,
    /// `k_ε(s) = (s/ε) χ_(1-ε,1]`
    KEps,
    /// `χ_(0,1]`
    Chi01,
}

pub fn family(kind: FamilyKind, param: f64) -> Result<PiecewiseFunction> {
    let check_q = |q: f64| -> Result<()> {
        if q > 1.0 && q.is_finite() {
            Ok(())
        } else {
            Err(crate::error::domain("family", format!("need q > 1, got {q}")))
        }
    };
    let pieces = match kind {
        FamilyKind::GQ => {
            check_q(param)?;
            vec![
                Piece::new(0.0, 1.0, Form::zero())?,
                Piece::new(1.0, f64::INFINITY, Form::power(1.0 / param, -1.0 / param))?,
            ]
        }
        FamilyKind::FQ => {
            check_q(param)?;
            vec![
                Piece::new(0.0, 1.0, Form::constant(1.0))?,
                Piece::new(1.0, f64::INFINITY, Form::power(1.0, -1.0 / param))?,
            ]
        }
        FamilyKind::FQMinusGQ => {
            check_q(param)?;
            vec![
                Piece::new(0.0, 1.0, Form::constant(1.0))?,
                Piece::new(
                    1.0,
                    f64::INFINITY,
                    Form::power(1.0 - 1.0 / param, -1.0 / param),
                )?,
            ]
        }
        FamilyKind::KEps => {
            if !(param > 0.0 && param < 1.0) {
                return Err(crate::error::domain(
                    "family",
                    format!("need 0 < eps < 1, got {param}"),
                ));
            }
            vec![
                Piece::new(0.0, 1.0 - param, Form::zero())?,
                Piece::new(1.0 - param, 1.0, Form::linear_plus_log(0.0, 1.0 / param, 0.0))?,
            ]
        }
        FamilyKind::Chi01 => vec![Piece::new(0.0, 1.0, Form::constant(1.0))?],
    };
    PiecewiseFunction::new(pieces)
}

// ---------------------------------------------------------------------------
// Random samples
// ---------------------------------------------------------------------------

/// Ranges for random step functions, in natural-log units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleScale {
    pub log_breakpoint_min: f64,
    pub log_breakpoint_max: f64,
    pub log_value_min: f64,
    pub log_value_max: f64,
}

impl Default for SampleScale {
    fn default() -> Self {
        Self {
            log_breakpoint_min: -3.0,
            log_breakpoint_max: 3.0,
            log_value_min: -2.0,
            log_value_max: 2.0,
        }
    }
}

/// Seed for sample `index` of a sweep seeded with `seed` (splitmix64 mix).
pub fn sample_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A random cone member with between 1 and `n_max` steps, log-uniform
/// breakpoints and values sorted in decreasing order. Deterministic in
/// `seed`.
pub fn random_cone_sample(seed: u64, n_max: usize, scale: &SampleScale) -> StepFunction {
    random_step(seed, n_max, scale, true)
}

/// As [`random_cone_sample`]; with `monotone = false` the values are left
/// in random order.
pub fn random_step(seed: u64, n_max: usize, scale: &SampleScale, monotone: bool) -> StepFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=n_max.max(1));
    let mut logs: Vec<f64> = (0..n)
        .map(|_| rng.random_range(scale.log_breakpoint_min..=scale.log_breakpoint_max))
        .collect();
    logs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut breakpoints: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
    for i in 1..n {
        if breakpoints[i] <= breakpoints[i - 1] {
            breakpoints[i] = breakpoints[i - 1] * (1.0 + 1e-6);
        }
    }
    let mut values: Vec<f64> = (0..n)
        .map(|_| {
            rng.random_range(scale.log_value_min..=scale.log_value_max)
                .exp()
        })
        .collect();
    if monotone {
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    }
    make_step(breakpoints, values).expect("sampled step function is valid")
}
