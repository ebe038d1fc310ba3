//! Closed symbolic algebra for spatial profiles a(x, y, z).
//!
//! An expression is a sum of terms `c · f₁ · f₂ · …` whose factors are drawn
//! from x_i^n, sin(c·x_i), cos(c·x_i) and exp(linear form). The class is
//! closed under partial differentiation and multiplication. Products of
//! atoms stay as products (sin x·cos x is never rewritten as sin 2x/2);
//! multiplication does distribute over sums so that structurally identical
//! terms meet and cancel.
//!
//! Factor lists are kept sorted, which makes `a*b` and `b*a` the same term.
//! Equality beyond that structural level is decided by sampling, see
//! [`sample_eq`].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const MAX_DIM: usize = 3;
pub const VAR_NAMES: [char; MAX_DIM] = ['x', 'y', 'z'];

/// Merged coefficients smaller than this fraction of the merged parts are
/// treated as an exact cancellation.
pub const CANCEL_TOL: f64 = 1e-14;

/// Number of sample points used by [`sample_eq`].
pub const SAMPLE_POINTS: usize = 32;

/// `offset + Σ coeffs[i]·x_i`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinearForm {
    pub offset: f64,
    pub coeffs: [f64; MAX_DIM],
}

impl LinearForm {
    pub fn new(offset: f64, coeffs: [f64; MAX_DIM]) -> Self {
        // +0.0 turns any -0.0 into 0.0 so ordering stays consistent
        LinearForm {
            offset: offset + 0.0,
            coeffs: coeffs.map(|c| c + 0.0),
        }
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .zip(point)
            .fold(self.offset, |acc, (c, x)| acc + c * x)
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    fn cmp_total(&self, other: &Self) -> Ordering {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
            .then(self.offset.total_cmp(&other.offset))
    }

    fn highest_var(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0.0)
    }
}

/// An atomic factor of a term.
#[derive(Debug, Clone, Copy)]
pub enum Factor {
    Pow { var: usize, exp: u32 },
    Sin { var: usize, freq: f64 },
    Cos { var: usize, freq: f64 },
    Exp(LinearForm),
}

impl Factor {
    fn rank(&self) -> u8 {
        match self {
            Factor::Pow { .. } => 0,
            Factor::Sin { .. } => 1,
            Factor::Cos { .. } => 2,
            Factor::Exp(_) => 3,
        }
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        match *self {
            Factor::Pow { var, exp } => point[var].powi(exp as i32),
            Factor::Sin { var, freq } => (freq * point[var]).sin(),
            Factor::Cos { var, freq } => (freq * point[var]).cos(),
            Factor::Exp(l) => l.eval(point).exp(),
        }
    }

    fn highest_var(&self) -> Option<usize> {
        match *self {
            Factor::Pow { var, .. } | Factor::Sin { var, .. } | Factor::Cos { var, .. } => {
                Some(var)
            }
            Factor::Exp(l) => l.highest_var(),
        }
    }

    /// ∂/∂x_var as (multiplier, replacement factor); `None` means the
    /// derivative vanishes, a `None` replacement means the factor became 1.
    fn derivative(&self, v: usize) -> Option<(f64, Option<Factor>)> {
        match *self {
            Factor::Pow { var, exp } if var == v => {
                let next = (exp > 1).then_some(Factor::Pow { var, exp: exp - 1 });
                Some((exp as f64, next))
            }
            Factor::Sin { var, freq } if var == v => Some((freq, Some(Factor::Cos { var, freq }))),
            Factor::Cos { var, freq } if var == v => Some((-freq, Some(Factor::Sin { var, freq }))),
            Factor::Exp(l) if l.coeffs[v] != 0.0 => Some((l.coeffs[v], Some(Factor::Exp(l)))),
            _ => None,
        }
    }
}

impl PartialEq for Factor {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Factor {}

impl PartialOrd for Factor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Factor {
    fn cmp(&self, other: &Self) -> Ordering {
        use Factor::*;
        match (self, other) {
            (Pow { var: a, exp: e }, Pow { var: b, exp: f }) => a.cmp(b).then(e.cmp(f)),
            (Sin { var: a, freq: p }, Sin { var: b, freq: q })
            | (Cos { var: a, freq: p }, Cos { var: b, freq: q }) => a.cmp(b).then(p.total_cmp(q)),
            (Exp(l), Exp(m)) => l.cmp_total(m),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

/// Sorted factor list of one term; the empty list is the constant 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<Factor>);

impl Monomial {
    pub fn factors(&self) -> &[Factor] {
        &self.0
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    /// Canonicalizes a raw factor list, returning the scalar it produced.
    /// Returns `None` when a factor is identically zero (sin 0).
    fn normalize(raw: Vec<Factor>) -> Option<(f64, Monomial)> {
        let mut scale = 1.0;
        let mut exp_form: Option<LinearForm> = None;
        let mut pows = [0u32; MAX_DIM];
        let mut rest = Vec::with_capacity(raw.len());
        for f in raw {
            match f {
                Factor::Pow { var, exp } => pows[var] += exp,
                Factor::Sin { freq: 0.0, .. } => return None,
                Factor::Sin { var, freq } if freq < 0.0 => {
                    scale = -scale;
                    rest.push(Factor::Sin { var, freq: -freq });
                }
                Factor::Cos { freq: 0.0, .. } => {}
                Factor::Cos { var, freq } => rest.push(Factor::Cos {
                    var,
                    freq: freq.abs(),
                }),
                Factor::Exp(l) => {
                    exp_form = Some(match exp_form {
                        None => l,
                        Some(m) => {
                            let mut c = m.coeffs;
                            for (ci, li) in c.iter_mut().zip(l.coeffs) {
                                *ci += li;
                            }
                            LinearForm::new(m.offset + l.offset, c)
                        }
                    })
                }
                other => rest.push(other),
            }
        }
        for (var, &exp) in pows.iter().enumerate() {
            if exp > 0 {
                rest.push(Factor::Pow { var, exp });
            }
        }
        if let Some(l) = exp_form {
            if l.is_constant() {
                scale *= l.offset.exp();
            } else {
                rest.push(Factor::Exp(LinearForm::new(l.offset, l.coeffs)));
            }
        }
        rest.sort();
        Some((scale, Monomial(rest)))
    }

    fn eval(&self, point: &[f64]) -> f64 {
        self.0.iter().map(|f| f.eval(point)).product()
    }
}

/// Partial derivative orders along x, y, z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(pub [u8; MAX_DIM]);

impl MultiIndex {
    pub const NONE: MultiIndex = MultiIndex([0; MAX_DIM]);

    pub fn along(var: usize, order: u8) -> Self {
        let mut m = [0; MAX_DIM];
        m[var] = order;
        MultiIndex(m)
    }

    pub fn is_none(&self) -> bool {
        self.0 == [0; MAX_DIM]
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&o| o as u32).sum()
    }

    pub fn bumped(&self, var: usize) -> Self {
        let mut m = self.0;
        m[var] += 1;
        MultiIndex(m)
    }

    /// (var, order) when the derivative acts along a single axis.
    pub fn single_axis(&self) -> Option<(usize, u8)> {
        let nonzero: Vec<_> = self.0.iter().enumerate().filter(|(_, &o)| o > 0).collect();
        match nonzero.as_slice() {
            [] => None,
            [(v, &o)] => Some((*v, o)),
            _ => None,
        }
    }

    pub fn highest_var(&self) -> Option<usize> {
        self.0.iter().rposition(|&o| o > 0)
    }
}

impl fmt::Display for MultiIndex {
    /// Suffix notation: `_xx`, `_xy`; empty for no derivative.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_none() {
            return Ok(());
        }
        write!(f, "_")?;
        for (var, &o) in self.0.iter().enumerate() {
            for _ in 0..o {
                write!(f, "{}", VAR_NAMES[var])?;
            }
        }
        Ok(())
    }
}

/// A spatial profile over `dim` variables (1 to 3).
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialExpr {
    dim: usize,
    terms: BTreeMap<Monomial, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CombineOp {
    Add,
    Mul,
    Scale(f64),
}

fn accumulate(terms: &mut BTreeMap<Monomial, f64>, mono: Monomial, c: f64) {
    if c == 0.0 {
        return;
    }
    match terms.get_mut(&mono) {
        None => {
            terms.insert(mono, c);
        }
        Some(existing) => {
            let merged = *existing + c;
            if merged == 0.0 || merged.abs() <= CANCEL_TOL * existing.abs().max(c.abs()) {
                terms.remove(&mono);
            } else {
                *existing = merged;
            }
        }
    }
}

impl SpatialExpr {
    fn check_dim(dim: usize) -> usize {
        assert!(
            (1..=MAX_DIM).contains(&dim),
            "spatial dimension must be 1..=3, got {dim}"
        );
        dim
    }

    pub fn zero(dim: usize) -> Self {
        SpatialExpr {
            dim: Self::check_dim(dim),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::from_factors(dim, c, vec![])
    }

    pub fn var(dim: usize, var: usize) -> Self {
        Self::pow(dim, var, 1)
    }

    pub fn pow(dim: usize, var: usize, exp: u32) -> Self {
        assert!(var < dim);
        Self::from_factors(dim, 1.0, vec![Factor::Pow { var, exp }])
    }

    pub fn sin(dim: usize, var: usize, freq: f64) -> Self {
        assert!(var < dim);
        Self::from_factors(dim, 1.0, vec![Factor::Sin { var, freq }])
    }

    pub fn cos(dim: usize, var: usize, freq: f64) -> Self {
        assert!(var < dim);
        Self::from_factors(dim, 1.0, vec![Factor::Cos { var, freq }])
    }

    /// exp(offset + Σ coeffs[i]·x_i); only the first `dim` coefficients are used.
    pub fn exp(dim: usize, offset: f64, coeffs: &[f64]) -> Self {
        assert!(coeffs.len() <= dim);
        let mut c = [0.0; MAX_DIM];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Self::from_factors(dim, 1.0, vec![Factor::Exp(LinearForm::new(offset, c))])
    }

    /// Single term `coeff · Π factors`, normalized.
    pub fn from_factors(dim: usize, coeff: f64, factors: Vec<Factor>) -> Self {
        let mut e = SpatialExpr::zero(dim);
        if let Some((s, mono)) = Monomial::normalize(factors) {
            assert!(
                mono.0
                    .iter()
                    .filter_map(Factor::highest_var)
                    .all(|v| v < dim),
                "factor variable outside dimension {dim}"
            );
            accumulate(&mut e.terms, mono, coeff * s);
        }
        e
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Same expression viewed in a space of at least `dim` variables.
    pub fn embed(&self, dim: usize) -> Self {
        SpatialExpr {
            dim: Self::check_dim(dim.max(self.dim)),
            terms: self.terms.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (f64, &Monomial)> {
        self.terms.iter().map(|(m, &c)| (c, m))
    }

    /// The value when the expression has no spatial dependence.
    pub fn constant_value(&self) -> Option<f64> {
        match self.terms.len() {
            0 => Some(0.0),
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(m, _)| m.is_constant())
                .map(|(_, &c)| c),
            _ => None,
        }
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        assert!(
            point.len() >= self.dim,
            "point has {} coordinates, expression needs {}",
            point.len(),
            self.dim
        );
        self.terms.iter().map(|(m, &c)| c * m.eval(point)).sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = SpatialExpr::zero(self.dim);
        if c != 0.0 {
            for (m, &k) in &self.terms {
                accumulate(&mut out.terms, m.clone(), c * k);
            }
        }
        out
    }

    pub fn add(&self, other: &SpatialExpr) -> Self {
        let mut out = self.embed(other.dim);
        for (m, &c) in &other.terms {
            accumulate(&mut out.terms, m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &SpatialExpr) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &SpatialExpr) -> Self {
        let mut out = SpatialExpr::zero(self.dim.max(other.dim));
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                let mut raw = ma.0.clone();
                raw.extend_from_slice(&mb.0);
                if let Some((s, mono)) = Monomial::normalize(raw) {
                    accumulate(&mut out.terms, mono, ca * cb * s);
                }
            }
        }
        out
    }

    /// Structural combination: add and mul fold over all operands, scale
    /// applies to the single operand.
    pub fn combine(op: CombineOp, operands: &[&SpatialExpr]) -> Self {
        let dim = operands.iter().map(|e| e.dim).max().unwrap_or(1);
        match op {
            CombineOp::Add => operands
                .iter()
                .fold(SpatialExpr::zero(dim), |acc, e| acc.add(e)),
            CombineOp::Mul => operands
                .iter()
                .fold(SpatialExpr::constant(dim, 1.0), |acc, e| acc.mul(e)),
            CombineOp::Scale(c) => {
                assert_eq!(operands.len(), 1, "scale takes exactly one operand");
                operands[0].scale(c)
            }
        }
    }

    fn diff_once(&self, var: usize) -> Self {
        let mut out = SpatialExpr::zero(self.dim);
        for (mono, &c) in &self.terms {
            for (j, f) in mono.0.iter().enumerate() {
                let Some((mult, replacement)) = f.derivative(var) else {
                    continue;
                };
                let mut raw: Vec<Factor> = Vec::with_capacity(mono.0.len());
                raw.extend_from_slice(&mono.0[..j]);
                raw.extend(replacement);
                raw.extend_from_slice(&mono.0[j + 1..]);
                if let Some((s, m)) = Monomial::normalize(raw) {
                    accumulate(&mut out.terms, m, c * mult * s);
                }
            }
        }
        out
    }

    /// ∂^order/∂x_var^order.
    pub fn diff(&self, var: usize, order: u32) -> Self {
        assert!(var < MAX_DIM, "variable index {var} out of range");
        let mut e = self.clone();
        for _ in 0..order {
            e = e.diff_once(var);
        }
        e
    }

    pub fn partial(&self, index: MultiIndex) -> Self {
        let mut e = self.clone();
        for (var, &o) in index.0.iter().enumerate() {
            if o > 0 {
                e = e.diff(var, o as u32);
            }
        }
        e
    }

    /// Largest |value| over the given points.
    pub fn max_abs_on(&self, points: &[Vec<f64>]) -> f64 {
        points
            .iter()
            .map(|p| self.eval(p).abs())
            .fold(0.0, f64::max)
    }

    pub fn parse(text: &str) -> Result<Self, ExprParseError> {
        let mut p = ExprParser::new(text);
        let e = p.expr()?;
        p.expect_end()?;
        Ok(e)
    }

    /// Parses and embeds into `dim` variables, rejecting variables beyond it.
    pub fn parse_in(text: &str, dim: usize) -> Result<Self, ExprParseError> {
        let e = Self::parse(text)?;
        if e.dim > dim {
            return Err(ExprParseError {
                pos: 0,
                message: format!(
                    "expression uses {} variables but the problem has {dim}",
                    e.dim
                ),
            });
        }
        Ok(e.embed(dim))
    }
}

impl Add for &SpatialExpr {
    type Output = SpatialExpr;
    fn add(self, rhs: &SpatialExpr) -> SpatialExpr {
        SpatialExpr::add(self, rhs)
    }
}

impl Sub for &SpatialExpr {
    type Output = SpatialExpr;
    fn sub(self, rhs: &SpatialExpr) -> SpatialExpr {
        SpatialExpr::sub(self, rhs)
    }
}

impl Mul for &SpatialExpr {
    type Output = SpatialExpr;
    fn mul(self, rhs: &SpatialExpr) -> SpatialExpr {
        SpatialExpr::mul(self, rhs)
    }
}

impl Neg for &SpatialExpr {
    type Output = SpatialExpr;
    fn neg(self) -> SpatialExpr {
        self.scale(-1.0)
    }
}

fn write_linear(f: &mut fmt::Formatter<'_>, l: &LinearForm) -> fmt::Result {
    let mut first = true;
    let mut piece = |f: &mut fmt::Formatter<'_>, c: f64, var: Option<char>| -> fmt::Result {
        let neg = c < 0.0;
        match (first, neg) {
            (true, true) => write!(f, "-")?,
            (true, false) => {}
            (false, true) => write!(f, " - ")?,
            (false, false) => write!(f, " + ")?,
        }
        first = false;
        let a = c.abs();
        match var {
            None => write!(f, "{a}"),
            Some(v) if a == 1.0 => write!(f, "{v}"),
            Some(v) => write!(f, "{a}*{v}"),
        }
    };
    if l.offset != 0.0 {
        piece(f, l.offset, None)?;
    }
    for (i, &c) in l.coeffs.iter().enumerate() {
        if c != 0.0 {
            piece(f, c, Some(VAR_NAMES[i]))?;
        }
    }
    Ok(())
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Factor::Pow { var, exp: 1 } => write!(f, "{}", VAR_NAMES[var]),
            Factor::Pow { var, exp } => write!(f, "{}^{exp}", VAR_NAMES[var]),
            Factor::Sin { var, freq: 1.0 } => write!(f, "sin({})", VAR_NAMES[var]),
            Factor::Sin { var, freq } => write!(f, "sin({freq}*{})", VAR_NAMES[var]),
            Factor::Cos { var, freq: 1.0 } => write!(f, "cos({})", VAR_NAMES[var]),
            Factor::Cos { var, freq } => write!(f, "cos({freq}*{})", VAR_NAMES[var]),
            Factor::Exp(ref l) => {
                write!(f, "exp(")?;
                write_linear(f, l)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for SpatialExpr {
    /// Renders in the grammar accepted by [`SpatialExpr::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (mono, &c)) in self.terms.iter().enumerate() {
            match (i, c < 0.0) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            if mono.is_constant() {
                write!(f, "{a}")?;
                continue;
            }
            if a != 1.0 {
                write!(f, "{a}*")?;
            }
            for (j, fac) in mono.0.iter().enumerate() {
                if j > 0 {
                    write!(f, "*")?;
                }
                write!(f, "{fac}")?;
            }
        }
        Ok(())
    }
}

/// A small family of profiles spanning every factor kind, used to build
/// random test series.
pub fn basis(dim: usize) -> Vec<SpatialExpr> {
    let mut out = vec![SpatialExpr::constant(dim, 1.0)];
    for var in 0..dim {
        out.push(SpatialExpr::var(dim, var));
        out.push(SpatialExpr::pow(dim, var, 2));
        out.push(SpatialExpr::sin(dim, var, 1.0));
        out.push(SpatialExpr::cos(dim, var, 1.0));
        out.push(SpatialExpr::sin(dim, var, 2.0));
        let mut c = [0.0; MAX_DIM];
        c[var] = 1.0;
        out.push(SpatialExpr::exp(dim, 0.0, &c[..dim]));
        c[var] = -0.5;
        out.push(SpatialExpr::exp(dim, 0.0, &c[..dim]));
    }
    out
}

/// Deterministic sample points in [-1.5, 1.5]^dim.
pub fn sample_points(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.5..1.5)).collect())
        .collect()
}

/// Largest difference |a − b| / max(1, |a|, |b|) over the sample points.
pub fn sample_distance(a: &SpatialExpr, b: &SpatialExpr) -> f64 {
    let dim = a.dim.max(b.dim);
    sample_points(dim, SAMPLE_POINTS, 0x5eed)
        .iter()
        .map(|p| {
            let (va, vb) = (a.eval(p), b.eval(p));
            (va - vb).abs() / 1f64.max(va.abs()).max(vb.abs())
        })
        .fold(0.0, f64::max)
}

/// Sampling equality: agreement at 32 pseudo-random points within `tol`
/// (relative to max(1, |value|)).
pub fn sample_eq(a: &SpatialExpr, b: &SpatialExpr, tol: f64) -> bool {
    sample_distance(a, b) <= tol
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("at byte {pos}: {message}")]
pub struct ExprParseError {
    pub pos: usize,
    pub message: String,
}

struct ExprParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> ExprParser<'a> {
    fn new(src: &'a str) -> Self {
        ExprParser { src, pos: 0 }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ExprParseError> {
        Err(ExprParseError {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect_end(&mut self) -> Result<(), ExprParseError> {
        self.skip_ws();
        match self.peek() {
            None => Ok(()),
            Some(c) => self.err(format!("unexpected '{c}'")),
        }
    }

    fn expr(&mut self) -> Result<SpatialExpr, ExprParseError> {
        let mut neg = false;
        if self.eat('-') {
            neg = true;
        } else {
            self.eat('+');
        }
        let first = self.term()?;
        let mut acc = if neg { -&first } else { first };
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<SpatialExpr, ExprParseError> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.power()?;
            } else if self.eat('/') {
                let at = self.pos;
                let d = self.power()?;
                match d.constant_value() {
                    Some(v) if v != 0.0 => acc = acc.scale(1.0 / v),
                    _ => {
                        self.pos = at;
                        return self.err("division only by nonzero constants");
                    }
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<SpatialExpr, ExprParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            self.skip_ws();
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let Ok(n) = self.src[start..self.pos].parse::<u32>() else {
                return self.err("expected a nonnegative integer exponent");
            };
            let mut out = SpatialExpr::constant(base.dim, 1.0);
            for _ in 0..n {
                out = &out * &base;
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<f64, ExprParseError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        self.pos = i;
        self.src[start..i].parse().or_else(|_| {
            self.pos = start;
            self.err("malformed number")
        })
    }

    fn atom(&mut self) -> Result<SpatialExpr, ExprParseError> {
        self.skip_ws();
        let Some(c) = self.peek() else {
            return self.err("unexpected end of input");
        };
        if c.is_ascii_digit() || c == '.' {
            let v = self.number()?;
            return Ok(SpatialExpr::constant(1, v));
        }
        if c == '(' {
            self.pos += 1;
            let e = self.expr()?;
            if !self.eat(')') {
                return self.err("expected ')'");
            }
            return Ok(e);
        }
        if c.is_ascii_alphabetic() {
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
                self.pos += 1;
            }
            let word = &self.src[start..self.pos];
            if let Some(var) = VAR_NAMES
                .iter()
                .position(|&v| word.len() == 1 && word.starts_with(v))
            {
                return Ok(SpatialExpr::var(var + 1, var));
            }
            return match word {
                "pi" => Ok(SpatialExpr::constant(1, std::f64::consts::PI)),
                "sin" | "cos" | "exp" => {
                    if !self.eat('(') {
                        return self.err(format!("expected '(' after {word}"));
                    }
                    let arg_at = self.pos;
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return self.err("expected ')'");
                    }
                    let Some(l) = as_linear_form(&arg) else {
                        self.pos = arg_at;
                        return self.err(format!("argument of {word} must be linear in x, y, z"));
                    };
                    Ok(apply_function(word, arg.dim, l))
                }
                _ => {
                    self.pos = start;
                    self.err(format!("unknown identifier '{word}'"))
                }
            };
        }
        self.err(format!("unexpected '{c}'"))
    }
}

fn as_linear_form(e: &SpatialExpr) -> Option<LinearForm> {
    let mut l = LinearForm::default();
    for (c, mono) in e.terms() {
        match mono.factors() {
            [] => l.offset += c,
            [Factor::Pow { var, exp: 1 }] => l.coeffs[*var] += c,
            _ => return None,
        }
    }
    Some(LinearForm::new(l.offset, l.coeffs))
}

/// sin/cos of a linear form expand by the angle-addition formulas into
/// products of single-variable sinusoids.
fn apply_function(name: &str, dim: usize, l: LinearForm) -> SpatialExpr {
    if name == "exp" {
        return SpatialExpr::from_factors(dim, 1.0, vec![Factor::Exp(l)]);
    }
    let mut s = SpatialExpr::constant(dim, l.offset.sin());
    let mut c = SpatialExpr::constant(dim, l.offset.cos());
    for (var, &k) in l.coeffs.iter().enumerate() {
        if k == 0.0 {
            continue;
        }
        let sv = SpatialExpr::sin(dim, var, k);
        let cv = SpatialExpr::cos(dim, var, k);
        let next_s = &(&s * &cv) + &(&c * &sv);
        let next_c = &(&c * &cv) - &(&s * &sv);
        s = next_s;
        c = next_c;
    }
    if name == "sin" {
        s
    } else {
        c
    }
}
