//! Compartmental systems `c' = A c + b`, their kinetic and compartmental
//! structure, and the correspondence with generalized compartmental reaction
//! networks (steps `y^p X_p -> y^m X_m`, outflows `y^m X_m -> O` and inflows
//! `O -> y^m X_m`).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;
use core::ops::Neg;

use num_rational::Ratio;
use num_traits::{Num, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, C64};

/// Number type for model coefficients: `f64`, or an exact rational for
/// bit-exact round trips.
pub trait Coefficient: Clone + PartialOrd + Debug + Num + Neg<Output = Self> {
    fn from_count(n: u32) -> Self;
    fn is_finite(&self) -> bool;
    fn to_f64(&self) -> f64;
    /// Whether `self` is zero up to rounding, relative to `scale`.
    fn is_negligible(&self, scale: &Self) -> bool;
}

impl Coefficient for f64 {
    fn from_count(n: u32) -> Self {
        n as f64
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_negligible(&self, scale: &Self) -> bool {
        self.abs() <= 1e-12 * scale.abs()
    }
}

impl Coefficient for Ratio<i64> {
    fn from_count(n: u32) -> Self {
        Ratio::from_integer(n as i64)
    }
    fn is_finite(&self) -> bool {
        true
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_negligible(&self, _scale: &Self) -> bool {
        self.is_zero()
    }
}

fn abs_max<T: Coefficient>(values: impl Iterator<Item = T>) -> T {
    values.fold(T::zero(), |acc, x| {
        let ax = if x < T::zero() { -x } else { x };
        if ax > acc {
            ax
        } else {
            acc
        }
    })
}

/// `c' = A c + b` over `species`, where in the generalized setting `A` acts
/// on the monomials `c_p^{y_p}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompartmentalModel<T = f64> {
    species: Vec<String>,
    a: Matrix<T>,
    b: Vec<T>,
    y: Vec<u32>,
}

impl<T: Coefficient> CompartmentalModel<T> {
    pub fn new(species: Vec<String>, a: Matrix<T>, b: Vec<T>, y: Vec<u32>) -> Result<Self> {
        let n = species.len();
        if a.rows() != n || a.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if a.rows() != n { a.rows() } else { a.cols() },
            });
        }
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: y.len(),
            });
        }
        if !a.as_slice().iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("A"));
        }
        if !b.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("b"));
        }
        if y.iter().any(|&v| v == 0) {
            return Err(Error::InvalidModel("complex lengths y must be positive".to_string()));
        }
        if y.iter().any(|&v| v > 1) {
            for i in 0..n {
                for j in i + 1..n {
                    if y[i] == y[j] {
                        return Err(Error::InvalidModel(format!(
                            "complex lengths must be pairwise distinct, y[{i}] = y[{j}] = {}",
                            y[i]
                        )));
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if species[i] == species[j] {
                    return Err(Error::InvalidModel(format!("duplicate species label {}", species[i])));
                }
            }
        }
        Ok(Self { species, a, b, y })
    }

    /// Model with labels `X1..Xn`, no inflow and unit complexes.
    pub fn from_matrix(a: Matrix<T>) -> Result<Self> {
        let n = a.rows();
        Self::new(default_labels("X", n), a, vec![T::zero(); n], vec![1; n])
    }

    /// Same as [`from_matrix`](Self::from_matrix) with an inflow vector.
    pub fn with_inflow(a: Matrix<T>, b: Vec<T>) -> Result<Self> {
        let n = a.rows();
        Self::new(default_labels("X", n), a, b, vec![1; n])
    }

    pub fn dim(&self) -> usize {
        self.species.len()
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn y(&self) -> &[u32] {
        &self.y
    }

    pub fn to_f64(&self) -> CompartmentalModel<f64> {
        CompartmentalModel {
            species: self.species.clone(),
            a: self.a.map(|x| x.to_f64()),
            b: self.b.iter().map(|x| x.to_f64()).collect(),
            y: self.y.clone(),
        }
    }
}

pub fn default_labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Which inequality a violation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// Off-diagonal coefficient `a_mp` is negative.
    NegativeOffDiagonal,
    /// Inflow `b_m` is negative.
    NegativeInflow,
    /// Column `m` fails `-a_mm >= sum_{p != m} a_pm`.
    ColumnDominance,
    /// Some coefficient has a nonzero imaginary part.
    ComplexValued,
}

impl Condition {
    pub fn code(self) -> &'static str {
        match self {
            Condition::NegativeOffDiagonal => "negative-off-diagonal",
            Condition::NegativeInflow => "negative-inflow",
            Condition::ColumnDominance => "column-dominance",
            Condition::ComplexValued => "complex-valued",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    pub row: Option<usize>,
    pub col: Option<usize>,
    /// The offending entry, or the (negative) slack of a failed column.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KineticReport {
    pub is_kinetic: bool,
    pub is_compartmental: bool,
    pub violations: Vec<Violation>,
}

impl KineticReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        let is_kinetic = !violations.iter().any(|v| v.condition != Condition::ColumnDominance);
        let is_compartmental = violations.is_empty();
        Self {
            is_kinetic,
            is_compartmental,
            violations,
        }
    }
}

/// Checks nonnegativity of off-diagonal coefficients and inflows, then
/// column dominance. Exact comparisons.
pub fn validate_kinetic<T: Coefficient>(model: &CompartmentalModel<T>) -> KineticReport {
    let a = model.a.map(|x| x.to_f64());
    let b: Vec<f64> = model.b.iter().map(|x| x.to_f64()).collect();
    let n = model.dim();
    let mut violations = Vec::new();
    for m in 0..n {
        for p in 0..n {
            if m != p && model.a[(m, p)] < T::zero() {
                violations.push(Violation {
                    condition: Condition::NegativeOffDiagonal,
                    row: Some(m),
                    col: Some(p),
                    value: a[(m, p)],
                });
            }
        }
    }
    for m in 0..n {
        if model.b[m] < T::zero() {
            violations.push(Violation {
                condition: Condition::NegativeInflow,
                row: Some(m),
                col: None,
                value: b[m],
            });
        }
    }
    for m in 0..n {
        let mut slack = T::zero() - model.a[(m, m)].clone();
        for p in 0..n {
            if p != m {
                slack = slack - model.a[(p, m)].clone();
            }
        }
        if slack < T::zero() {
            violations.push(Violation {
                condition: Condition::ColumnDominance,
                row: None,
                col: Some(m),
                value: slack.to_f64(),
            });
        }
    }
    KineticReport::from_violations(violations)
}

/// Kinetic check of a floating matrix where entries down to `-tol * scale`
/// count as zero; `scale` is the largest entry modulus (at least 1).
pub fn validate_kinetic_tol(a: &Matrix<f64>, b: &[f64], tol: f64) -> KineticReport {
    check_real(a, b, tol)
}

/// Kinetic check of a complex matrix: any imaginary part above the
/// tolerance makes the system non-kinetic.
pub fn validate_kinetic_complex(a: &Matrix<C64>, b: &[C64], tol: f64) -> KineticReport {
    let scale = a.max_abs().max(b.iter().map(|z| z.norm()).fold(0.0, f64::max)).max(1.0);
    let mut report = check_real(&a.real_part(), &b.iter().map(|z| z.re).collect::<Vec<_>>(), tol);
    let mut complex = Vec::new();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if a[(i, j)].im.abs() > tol * scale {
                complex.push(Violation {
                    condition: Condition::ComplexValued,
                    row: Some(i),
                    col: Some(j),
                    value: a[(i, j)].im,
                });
            }
        }
    }
    for (i, z) in b.iter().enumerate() {
        if z.im.abs() > tol * scale {
            complex.push(Violation {
                condition: Condition::ComplexValued,
                row: Some(i),
                col: None,
                value: z.im,
            });
        }
    }
    if !complex.is_empty() {
        complex.append(&mut report.violations);
        report = KineticReport::from_violations(complex);
    }
    report
}

fn check_real(a: &Matrix<f64>, b: &[f64], tol: f64) -> KineticReport {
    let n = a.rows();
    let scale = a.max_abs().max(b.iter().map(|x| x.abs()).fold(0.0, f64::max)).max(1.0);
    let eps = tol * scale;
    let mut violations = Vec::new();
    for m in 0..n {
        for p in 0..n {
            if m != p && a[(m, p)] < -eps {
                violations.push(Violation {
                    condition: Condition::NegativeOffDiagonal,
                    row: Some(m),
                    col: Some(p),
                    value: a[(m, p)],
                });
            }
        }
    }
    for (m, &bm) in b.iter().enumerate() {
        if bm < -eps {
            violations.push(Violation {
                condition: Condition::NegativeInflow,
                row: Some(m),
                col: None,
                value: bm,
            });
        }
    }
    for m in 0..n {
        let slack = -(0..n).map(|p| a[(p, m)]).sum::<f64>();
        if slack < -eps * n as f64 {
            violations.push(Violation {
                condition: Condition::ColumnDominance,
                row: None,
                col: Some(m),
                value: slack,
            });
        }
    }
    KineticReport::from_violations(violations)
}

/// A complex `sum y_i X_i`; empty is the zero complex `O`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReactionComplex {
    terms: Vec<(usize, u32)>,
}

impl ReactionComplex {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// `y X_species`.
    pub fn single(species: usize, y: u32) -> Self {
        Self::new(vec![(species, y)])
    }

    /// Builds a complex, merging repeated species and dropping zero
    /// coefficients.
    pub fn new(mut terms: Vec<(usize, u32)>) -> Self {
        terms.sort_unstable();
        let mut merged: Vec<(usize, u32)> = Vec::with_capacity(terms.len());
        for (s, y) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == s => last.1 += y,
                _ => merged.push((s, y)),
            }
        }
        merged.retain(|t| t.1 > 0);
        Self { terms: merged }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(usize, u32)] {
        &self.terms
    }

    pub fn coefficient(&self, species: usize) -> u32 {
        self.terms.iter().find(|t| t.0 == species).map_or(0, |t| t.1)
    }

    pub fn render(&self, species: &[String]) -> String {
        if self.terms.is_empty() {
            return "O".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|&(s, y)| {
                let name = species.get(s).cloned().unwrap_or_else(|| format!("#{s}"));
                if y == 1 {
                    name
                } else {
                    format!("{y}{name}")
                }
            })
            .collect();
        parts.join(" + ")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReactionStep<T = f64> {
    pub reactant: ReactionComplex,
    pub product: ReactionComplex,
    pub rate: T,
}

impl<T> ReactionStep<T> {
    pub fn new(reactant: ReactionComplex, product: ReactionComplex, rate: T) -> Self {
        Self {
            reactant,
            product,
            rate,
        }
    }
}

/// Closed: no exchange with the environment. Strictly half-open: outflow
/// only. Strictly open: some inflow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Openness {
    Closed,
    StrictlyHalfOpen,
    StrictlyOpen,
}

impl Openness {
    pub fn code(self) -> &'static str {
        match self {
            Openness::Closed => "closed",
            Openness::StrictlyHalfOpen => "strictly-half-open",
            Openness::StrictlyOpen => "strictly-open",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReactionNetwork<T = f64> {
    species: Vec<String>,
    steps: Vec<ReactionStep<T>>,
    classification: Openness,
}

impl<T: Coefficient> ReactionNetwork<T> {
    /// Validates a mechanism. Steps with rate exactly zero are dropped.
    pub fn new(species: Vec<String>, steps: Vec<ReactionStep<T>>) -> Result<Self> {
        let n = species.len();
        let mut kept: Vec<ReactionStep<T>> = Vec::with_capacity(steps.len());
        for (r, step) in steps.into_iter().enumerate() {
            if !step.rate.is_finite() {
                return Err(Error::InvalidNetwork(format!("step {r} has a non-finite rate")));
            }
            if step.rate < T::zero() {
                return Err(Error::InvalidNetwork(format!("step {r} has a negative rate")));
            }
            if step.rate.is_zero() {
                continue;
            }
            for &(s, _) in step.reactant.terms().iter().chain(step.product.terms()) {
                if s >= n {
                    return Err(Error::IndexOutOfRange { index: s, len: n });
                }
            }
            if step.reactant == step.product {
                return Err(Error::InvalidNetwork(format!("step {r} has equal reactant and product")));
            }
            if kept
                .iter()
                .any(|k| k.reactant == step.reactant && k.product == step.product)
            {
                return Err(Error::InvalidNetwork(format!(
                    "duplicate step {} -> {}",
                    step.reactant.render(&species),
                    step.product.render(&species)
                )));
            }
            kept.push(step);
        }
        for (s, name) in species.iter().enumerate() {
            let present = kept
                .iter()
                .any(|k| k.reactant.coefficient(s) > 0 || k.product.coefficient(s) > 0);
            if !present {
                return Err(Error::InvalidNetwork(format!("species {name} takes part in no step")));
            }
        }
        let classification = if kept.iter().any(|k| k.reactant.is_zero()) {
            Openness::StrictlyOpen
        } else if kept.iter().any(|k| k.product.is_zero()) {
            Openness::StrictlyHalfOpen
        } else {
            Openness::Closed
        };
        Ok(Self {
            species,
            steps: kept,
            classification,
        })
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn steps(&self) -> &[ReactionStep<T>] {
        &self.steps
    }

    pub fn classification(&self) -> Openness {
        self.classification
    }

    /// Complex length of every species when each complex holds at most one
    /// species and each species always appears with the same coefficient.
    pub fn compartmental_lengths(&self) -> Result<Vec<u32>> {
        let mut y: Vec<Option<u32>> = vec![None; self.species.len()];
        for step in &self.steps {
            for c in [&step.reactant, &step.product] {
                match c.terms() {
                    [] => {}
                    [(s, ys)] => match y[*s] {
                        None => y[*s] = Some(*ys),
                        Some(prev) if prev == *ys => {}
                        Some(prev) => {
                            return Err(Error::NotCompartmentalShape(format!(
                                "species {} appears as {prev}{0} and {ys}{0}",
                                self.species[*s]
                            )))
                        }
                    },
                    _ => {
                        return Err(Error::NotCompartmentalShape(format!(
                            "complex {} holds more than one species",
                            c.render(&self.species)
                        )))
                    }
                }
            }
        }
        Ok(y.into_iter().map(|v| v.unwrap_or(1)).collect())
    }
}

/// Builds the generalized compartmental network whose induced equation is
/// the model: `y^p X_p -> y^m X_m` at rate `a_mp / y^m`, `y^p X_p -> O` at
/// rate `d_p = -a_pp / y^p - sum_{m != p} a_mp / y^m`, and `O -> y^m X_m` at
/// rate `b_m / y^m`. For unit complexes `d_p` is minus the column sum.
pub fn induce_reaction_network<T: Coefficient>(model: &CompartmentalModel<T>) -> Result<ReactionNetwork<T>> {
    let n = model.dim();
    let a = &model.a;
    let yv: Vec<T> = model.y.iter().map(|&v| T::from_count(v)).collect();
    let scale = abs_max(a.as_slice().iter().cloned().chain(model.b.iter().cloned()));
    let mut steps = Vec::new();
    for p in 0..n {
        for m in 0..n {
            if m == p {
                continue;
            }
            let amp = a[(m, p)].clone();
            if amp < T::zero() {
                return Err(Error::NotKinetic(format!("a[{m}][{p}] is negative")));
            }
            if !amp.is_zero() {
                steps.push(ReactionStep::new(
                    ReactionComplex::single(p, model.y[p]),
                    ReactionComplex::single(m, model.y[m]),
                    amp / yv[m].clone(),
                ));
            }
        }
    }
    for p in 0..n {
        let mut d = T::zero() - a[(p, p)].clone() / yv[p].clone();
        for m in 0..n {
            if m != p {
                d = d - a[(m, p)].clone() / yv[m].clone();
            }
        }
        if d.is_negligible(&scale) {
            continue;
        }
        if d < T::zero() {
            return Err(Error::NotKinetic(format!(
                "outflow coefficient of {} would be negative",
                model.species[p]
            )));
        }
        steps.push(ReactionStep::new(ReactionComplex::single(p, model.y[p]), ReactionComplex::zero(), d));
    }
    for m in 0..n {
        let bm = model.b[m].clone();
        if bm < T::zero() {
            return Err(Error::NotKinetic(format!("b[{m}] is negative")));
        }
        if !bm.is_zero() {
            steps.push(ReactionStep::new(ReactionComplex::zero(), ReactionComplex::single(m, model.y[m]), bm / yv[m].clone()));
        }
    }
    ReactionNetwork::new(model.species.clone(), steps)
}

/// Induced kinetic equation of a generalized compartmental network.
pub fn derive_ode<T: Coefficient>(network: &ReactionNetwork<T>) -> Result<CompartmentalModel<T>> {
    let y = network.compartmental_lengths()?;
    let n = network.species.len();
    let mut a: Matrix<T> = Matrix::from_fn(n, n, |_, _| T::zero());
    let mut b = vec![T::zero(); n];
    for step in &network.steps {
        let k = step.rate.clone();
        match (step.reactant.terms(), step.product.terms()) {
            ([(p, yp)], prod) => {
                let loss = T::from_count(*yp) * k.clone();
                a[(*p, *p)] = a[(*p, *p)].clone() - loss;
                if let [(m, ym)] = prod {
                    a[(*m, *p)] = a[(*m, *p)].clone() + T::from_count(*ym) * k;
                }
            }
            ([], [(m, ym)]) => {
                b[*m] = b[*m].clone() + T::from_count(*ym) * k;
            }
            _ => {
                return Err(Error::NotCompartmentalShape("step between zero complexes".to_string()));
            }
        }
    }
    CompartmentalModel::new(network.species.clone(), a, b, y)
}

/// For generalized compartmental networks, mass conservation holds exactly
/// when the network is closed.
pub fn is_mass_conserving<T: Coefficient>(network: &ReactionNetwork<T>) -> Result<bool> {
    network.compartmental_lengths()?;
    Ok(network.classification == Openness::Closed)
}

impl<T: Coefficient + Signed> CompartmentalModel<T> {
    /// Sum of absolute column sums; zero exactly for closed unit-complex models.
    pub fn column_sum_defect(&self) -> T {
        let n = self.dim();
        let mut total = T::zero();
        for m in 0..n {
            let mut s = T::zero();
            for p in 0..n {
                s = s + self.a[(p, m)].clone();
            }
            total = total + s.abs();
        }
        total
    }
}
