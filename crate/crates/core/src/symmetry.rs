//! Minkowski vector fields: exact polynomial commutator checks and the
//! discrete commuted-field hierarchy on radial grids.
//!
//! Exact layer. Polynomials over (t, x^1, .., x^n) carry integer
//! coefficients. The generators
//!
//! ```text
//!   d_mu                          translations,
//!   Z_ij = x^i d_j - x^j d_i      rotations,
//!   B_i  = x^i d_t + t d_i        boosts,
//!   S    = t d_t + sum_i x^i d_i  scaling,
//! ```
//!
//! map integer polynomials to integer polynomials, so the commutation
//! relations with the flat wave operator box = -d_t^2 + sum_i d_i^2,
//!
//! ```text
//!   [box, Z_ij] = 0,  [box, B_i] = 0,  [box, S] = 2 box,  [S, d_mu] = -d_mu,
//! ```
//!
//! are checked with zero tolerance, no rounding anywhere.
//!
//! Discrete layer. Words over {d_t, S} act on radial profiles phi(t, r),
//! together with single first-order boost and rotation entries:
//!
//! ```text
//!   S phi   = t d_t phi + r d_r phi,
//!   B_i phi = (x_i/r) (r d_t + t d_r) phi,   weight 1/n in squared norms
//!             because int_{S^{n-1}} (x_i/r)^2 dsigma = |S^{n-1}|/n,
//!   Z_ij phi = 0.
//! ```
//!
//! Every word expands exactly into operator terms c t^p r^s d_t^a d_r^b
//! with integer c. Time derivatives come from the tower d_t^0 = u,
//! d_t^1 = pi, d_t^2 = accel (supplied by the caller from the evolution
//! right-hand side), and d_t^{k+2} = (d_r^2 + (n-1)/r d_r) d_t^k; radial
//! derivatives come from the parity-aware stencils. The tower recursion
//! beyond order two is the flat one, exact for the free wave and accurate
//! to quadratic order in the perturbation otherwise.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::LieValue;
use crate::fields::{ComponentField, Family};
use crate::grid::{deriv2_r, deriv_r, Parity, RadialGrid};
use crate::mat::DMAX;
use crate::num;

/// Hard cap on polynomial degree in the exact layer.
pub const MAX_POLY_DEGREE: u32 = 8;

/// Hard cap on the hierarchy level; the stencil accuracy budget (4th order,
/// two-wide boundary bias) does not support deeper words.
pub const MAX_HIERARCHY_LEVEL: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymmetryError {
    /// A vector-field index is out of range for the polynomial's dimension.
    BadIndex(&'static str),
    /// An operation would push the polynomial degree past [`MAX_POLY_DEGREE`].
    DegreeOverflow { degree: u32 },
    /// An integer coefficient overflowed i64.
    CoefficientOverflow,
    /// Requested hierarchy level exceeds [`MAX_HIERARCHY_LEVEL`].
    LevelBudget { requested: usize },
    /// The supplied acceleration arrays do not match the field layout.
    AccelShape,
    /// A grid operation failed while building derived profiles.
    Grid(&'static str),
}

impl core::fmt::Display for SymmetryError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SymmetryError::BadIndex(what) => write!(f, "bad vector-field index: {what}"),
            SymmetryError::DegreeOverflow { degree } => {
                write!(
                    f,
                    "polynomial degree {degree} exceeds the exact-layer cap {MAX_POLY_DEGREE}"
                )
            }
            SymmetryError::CoefficientOverflow => write!(f, "integer coefficient overflow"),
            SymmetryError::LevelBudget { requested } => {
                write!(
                    f,
                    "hierarchy level {requested} exceeds the stencil accuracy budget {MAX_HIERARCHY_LEVEL}"
                )
            }
            SymmetryError::AccelShape => {
                write!(f, "acceleration arrays do not match the field layout")
            }
            SymmetryError::Grid(msg) => write!(f, "grid operation failed: {msg}"),
        }
    }
}

/// Identifier of one flat vector field. Index 0 is t; 1..=n are spatial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorFieldId {
    /// d_mu, mu in 0..=n.
    Translation(usize),
    /// Z_ij = x^i d_j - x^j d_i, 1 <= i < j <= n.
    Rotation(usize, usize),
    /// B_i = x^i d_t + t d_i, 1 <= i <= n.
    Boost(usize),
    /// S = t d_t + sum_i x^i d_i.
    Scaling,
}

/// Exponent vector of one monomial; slot 0 is the t exponent.
type Expo = [u8; DMAX];

/// Exact polynomial in (t, x^1, .., x^n) with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    n: usize,
    terms: BTreeMap<Expo, i64>,
}

fn expo_degree(e: &Expo) -> u32 {
    let mut d = 0u32;
    for k in e.iter() {
        d += u32::from(*k);
    }
    d
}

impl Poly {
    pub fn zero(n: usize) -> Poly {
        Poly {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// Single term `coeff * t^{exps[0]} * (x^1)^{exps[1]} * ..`. Unlisted
    /// exponents are zero.
    pub fn monomial(n: usize, exps: &[u8], coeff: i64) -> Result<Poly, SymmetryError> {
        if n == 0 || n >= DMAX || exps.len() > n + 1 {
            return Err(SymmetryError::BadIndex("monomial exponent list"));
        }
        let mut e: Expo = [0; DMAX];
        e[..exps.len()].copy_from_slice(exps);
        if expo_degree(&e) > MAX_POLY_DEGREE {
            return Err(SymmetryError::DegreeOverflow {
                degree: expo_degree(&e),
            });
        }
        let mut p = Poly::zero(n);
        p.insert_term(e, coeff)?;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(expo_degree).max().unwrap_or(0)
    }

    fn insert_term(&mut self, e: Expo, c: i64) -> Result<(), SymmetryError> {
        if c == 0 {
            return Ok(());
        }
        let d = expo_degree(&e);
        if d > MAX_POLY_DEGREE {
            return Err(SymmetryError::DegreeOverflow { degree: d });
        }
        let slot = self.terms.entry(e).or_insert(0);
        *slot = slot
            .checked_add(c)
            .ok_or(SymmetryError::CoefficientOverflow)?;
        if *slot == 0 {
            self.terms.remove(&e);
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Result<Poly, SymmetryError> {
        let mut out = self.clone();
        for (e, c) in other.terms.iter() {
            out.insert_term(*e, *c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly, SymmetryError> {
        let mut out = self.clone();
        for (e, c) in other.terms.iter() {
            out.insert_term(*e, c.checked_neg().ok_or(SymmetryError::CoefficientOverflow)?)?;
        }
        Ok(out)
    }

    pub fn scale(&self, k: i64) -> Result<Poly, SymmetryError> {
        let mut out = Poly::zero(self.n);
        for (e, c) in self.terms.iter() {
            out.insert_term(*e, c.checked_mul(k).ok_or(SymmetryError::CoefficientOverflow)?)?;
        }
        Ok(out)
    }

    /// Exact partial derivative along coordinate `axis` (0 = t).
    pub fn diff(&self, axis: usize) -> Result<Poly, SymmetryError> {
        if axis > self.n {
            return Err(SymmetryError::BadIndex("derivative axis"));
        }
        let mut out = Poly::zero(self.n);
        for (e, c) in self.terms.iter() {
            if e[axis] == 0 {
                continue;
            }
            let mut e2 = *e;
            e2[axis] -= 1;
            let k = i64::from(e[axis]);
            out.insert_term(e2, c.checked_mul(k).ok_or(SymmetryError::CoefficientOverflow)?)?;
        }
        Ok(out)
    }

    /// Multiplication by coordinate `axis`; fails past the degree cap.
    pub fn mul_var(&self, axis: usize) -> Result<Poly, SymmetryError> {
        if axis > self.n {
            return Err(SymmetryError::BadIndex("coordinate axis"));
        }
        let mut out = Poly::zero(self.n);
        for (e, c) in self.terms.iter() {
            let mut e2 = *e;
            if e2[axis] == u8::MAX {
                return Err(SymmetryError::DegreeOverflow {
                    degree: MAX_POLY_DEGREE + 1,
                });
            }
            e2[axis] += 1;
            out.insert_term(e2, *c)?;
        }
        Ok(out)
    }

    /// Point evaluation; `point[0]` is t.
    pub fn eval(&self, point: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in self.terms.iter() {
            let mut term = *c as f64;
            for (axis, k) in e.iter().enumerate().take(self.n + 1) {
                if *k > 0 {
                    let x = point.get(axis).copied().unwrap_or(0.0);
                    term *= num::powi(x, u32::from(*k));
                }
            }
            acc += term;
        }
        acc
    }
}

/// Exact application of one vector field to a polynomial.
pub fn apply_z_exact(z: VectorFieldId, p: &Poly) -> Result<Poly, SymmetryError> {
    let n = p.n;
    match z {
        VectorFieldId::Translation(mu) => {
            if mu > n {
                return Err(SymmetryError::BadIndex("translation index"));
            }
            p.diff(mu)
        }
        VectorFieldId::Rotation(i, j) => {
            if i == 0 || j == 0 || i >= j || j > n {
                return Err(SymmetryError::BadIndex("rotation indices"));
            }
            p.diff(j)?.mul_var(i)?.sub(&p.diff(i)?.mul_var(j)?)
        }
        VectorFieldId::Boost(i) => {
            if i == 0 || i > n {
                return Err(SymmetryError::BadIndex("boost index"));
            }
            p.diff(0)?.mul_var(i)?.add(&p.diff(i)?.mul_var(0)?)
        }
        VectorFieldId::Scaling => {
            let mut out = p.diff(0)?.mul_var(0)?;
            for i in 1..=n {
                out = out.add(&p.diff(i)?.mul_var(i)?)?;
            }
            Ok(out)
        }
    }
}

/// Flat wave operator box = -d_t^2 + sum_i d_i^2, exactly.
pub fn box_m(p: &Poly) -> Result<Poly, SymmetryError> {
    let mut out = p.diff(0)?.diff(0)?.scale(-1)?;
    for i in 1..=p.n {
        out = out.add(&p.diff(i)?.diff(i)?)?;
    }
    Ok(out)
}

/// Outcome of the exact commutator sweep.
#[derive(Debug, Clone)]
pub struct CommutatorReport {
    pub n: usize,
    pub monomials: usize,
    pub checks: usize,
    /// One line per violated identity; empty on success.
    pub failures: Vec<String>,
}

impl CommutatorReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn monomials_up_to(n: usize, deg: u32) -> Vec<Expo> {
    // Enumerate exponent vectors over n+1 slots with total degree <= deg.
    let mut out = Vec::new();
    let mut e: Expo = [0; DMAX];
    fn rec(axis: usize, n: usize, left: u32, e: &mut Expo, out: &mut Vec<Expo>) {
        if axis > n {
            out.push(*e);
            return;
        }
        for k in 0..=left {
            e[axis] = k as u8;
            rec(axis + 1, n, left - k, e, out);
        }
        e[axis] = 0;
    }
    rec(0, n, deg, &mut e, &mut out);
    out
}

/// Checks, exactly on every monomial of degree <= 4:
/// [box, Z] = 0 for all rotations and boosts, [box, S] = 2 box, and
/// [S, d_mu] = -d_mu. Any nonzero residual polynomial is reported with the
/// offending (field, monomial) pair.
pub fn commutator_table_check(n: usize) -> Result<CommutatorReport, SymmetryError> {
    if n == 0 || n >= DMAX {
        return Err(SymmetryError::BadIndex("dimension"));
    }
    let mut lorentz = Vec::new();
    for i in 1..=n {
        for j in (i + 1)..=n {
            lorentz.push(VectorFieldId::Rotation(i, j));
        }
    }
    for i in 1..=n {
        lorentz.push(VectorFieldId::Boost(i));
    }

    let monos = monomials_up_to(n, 4);
    let mut checks = 0usize;
    let mut failures = Vec::new();

    for e in monos.iter() {
        let p = {
            let mut q = Poly::zero(n);
            q.insert_term(*e, 1)?;
            q
        };
        // [box, Z] p = box(Z p) - Z(box p).
        for z in lorentz.iter() {
            let lhs = box_m(&apply_z_exact(*z, &p)?)?;
            let rhs = apply_z_exact(*z, &box_m(&p)?)?;
            checks += 1;
            if lhs != rhs {
                failures.push(format!("[box, {z:?}] != 0 on monomial {e:?}"));
            }
        }
        // [box, S] p = 2 box p.
        {
            let lhs = box_m(&apply_z_exact(VectorFieldId::Scaling, &p)?)?
                .sub(&apply_z_exact(VectorFieldId::Scaling, &box_m(&p)?)?)?;
            let rhs = box_m(&p)?.scale(2)?;
            checks += 1;
            if lhs != rhs {
                failures.push(format!("[box, S] != 2 box on monomial {e:?}"));
            }
        }
        // [S, d_mu] p = -d_mu p.
        for mu in 0..=n {
            let d = VectorFieldId::Translation(mu);
            let lhs = apply_z_exact(VectorFieldId::Scaling, &apply_z_exact(d, &p)?)?
                .sub(&apply_z_exact(d, &apply_z_exact(VectorFieldId::Scaling, &p)?)?)?;
            let rhs = apply_z_exact(d, &p)?.scale(-1)?;
            checks += 1;
            if lhs != rhs {
                failures.push(format!("[S, d_{mu}] != -d_{mu} on monomial {e:?}"));
            }
        }
    }

    Ok(CommutatorReport {
        n,
        monomials: monos.len(),
        checks,
        failures,
    })
}

// --------------------------------------------------------------------------
// Discrete hierarchy on radial profiles.
// --------------------------------------------------------------------------

/// Generators of discrete words: d_t, S, and the radial boost profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordOp {
    Dt,
    Scale,
    Boost,
}

impl WordOp {
    fn label(self) -> &'static str {
        match self {
            WordOp::Dt => "Dt",
            WordOp::Scale => "S",
            WordOp::Boost => "B",
        }
    }
}

/// One expanded operator term `coeff * t^tp * r^rp * d_t^dt * d_r^dr`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpTerm {
    pub coeff: i64,
    pub tp: u32,
    pub rp: u32,
    pub dt: u32,
    pub dr: u32,
}

type TermKey = (u32, u32, u32, u32);

fn compose_op(op: WordOp, terms: &[OpTerm]) -> Vec<OpTerm> {
    let mut acc: BTreeMap<TermKey, i64> = BTreeMap::new();
    let mut push = |tp: u32, rp: u32, dt: u32, dr: u32, c: i64| {
        if c != 0 {
            *acc.entry((tp, rp, dt, dr)).or_insert(0) += c;
        }
    };
    for t in terms {
        let c = t.coeff;
        match op {
            // d_t (c t^p r^s D) = c p t^{p-1} r^s D + c t^p r^s d_t D.
            WordOp::Dt => {
                if t.tp > 0 {
                    push(t.tp - 1, t.rp, t.dt, t.dr, c * i64::from(t.tp));
                }
                push(t.tp, t.rp, t.dt + 1, t.dr, c);
            }
            // S (c t^p r^s D) = c (p+s) t^p r^s D
            //   + c t^{p+1} r^s d_t D + c t^p r^{s+1} d_r D.
            WordOp::Scale => {
                let w = i64::from(t.tp + t.rp);
                if w != 0 {
                    push(t.tp, t.rp, t.dt, t.dr, c * w);
                }
                push(t.tp + 1, t.rp, t.dt + 1, t.dr, c);
                push(t.tp, t.rp + 1, t.dt, t.dr + 1, c);
            }
            // (r d_t + t d_r)(c t^p r^s D) = c p t^{p-1} r^{s+1} D
            //   + c t^p r^{s+1} d_t D + c s t^{p+1} r^{s-1} D
            //   + c t^{p+1} r^s d_r D.
            WordOp::Boost => {
                if t.tp > 0 {
                    push(t.tp - 1, t.rp + 1, t.dt, t.dr, c * i64::from(t.tp));
                }
                push(t.tp, t.rp + 1, t.dt + 1, t.dr, c);
                if t.rp > 0 {
                    push(t.tp + 1, t.rp - 1, t.dt, t.dr, c * i64::from(t.rp));
                }
                push(t.tp + 1, t.rp, t.dt, t.dr + 1, c);
            }
        }
    }
    acc.into_iter()
        .filter(|(_, c)| *c != 0)
        .map(|((tp, rp, dt, dr), coeff)| OpTerm {
            coeff,
            tp,
            rp,
            dt,
            dr,
        })
        .collect()
}

/// Expands a word (outermost op first) into exact operator terms.
pub fn expand_word(word: &[WordOp]) -> Vec<OpTerm> {
    let mut terms = vec![OpTerm {
        coeff: 1,
        tp: 0,
        rp: 0,
        dt: 0,
        dr: 0,
    }];
    for op in word.iter().rev() {
        terms = compose_op(*op, &terms);
    }
    terms
}

/// Flat radial Laplacian d_r^2 + (n-1)/r d_r with the parity limit at r = 0:
/// n d_r^2 f(0) for even profiles, 0 for odd ones.
pub fn flat_laplacian(
    f: &[LieValue],
    grid: &RadialGrid,
    parity: Parity,
) -> Result<Vec<LieValue>, SymmetryError> {
    let d1 = deriv_r(f, grid, parity).map_err(|_| SymmetryError::Grid("first derivative"))?;
    let d2 = deriv2_r(f, grid, parity).map_err(|_| SymmetryError::Grid("second derivative"))?;
    let nm1 = (grid.n - 1) as f64;
    let mut out = Vec::with_capacity(f.len());
    for j in 0..f.len() {
        if j == 0 {
            out.push(match parity {
                Parity::Even => d2[0].scale(grid.n as f64),
                Parity::Odd => LieValue::zero(f[0].alg),
            });
        } else {
            out.push(d2[j].add_scaled(nm1 / grid.r(j), &d1[j]));
        }
    }
    Ok(out)
}

/// Time-derivative tower for one component: tower[a] = d_t^a of the profile.
/// Levels 0, 1, 2 are u, pi, accel; higher levels use the flat recursion
/// d_t^{a} = lap_r d_t^{a-2}.
pub fn time_tower(
    u: &[LieValue],
    pi: &[LieValue],
    accel: &[LieValue],
    grid: &RadialGrid,
    parity: Parity,
    depth: usize,
) -> Result<Vec<Vec<LieValue>>, SymmetryError> {
    if u.len() != pi.len() || u.len() != accel.len() || u.len() != grid.len() {
        return Err(SymmetryError::AccelShape);
    }
    let mut tower = vec![u.to_vec()];
    if depth >= 1 {
        tower.push(pi.to_vec());
    }
    if depth >= 2 {
        tower.push(accel.to_vec());
    }
    for a in 3..=depth {
        let next = flat_laplacian(&tower[a - 2], grid, parity)?;
        tower.push(next);
    }
    Ok(tower)
}

/// One derived component profile: the word applied to a named field.
#[derive(Debug, Clone)]
pub struct DerivedComp {
    pub name: &'static str,
    pub family: Family,
    pub parity: Parity,
    pub u: Vec<LieValue>,
    pub pi: Vec<LieValue>,
}

/// All components pushed through one word.
#[derive(Debug, Clone)]
pub struct DerivedWord {
    /// Outermost-first label, e.g. "Dt.S"; "1" for the identity word.
    pub label: String,
    /// Word length (0 for the identity).
    pub order: usize,
    /// Multiplier on squared norms; 1/n for the boost entry, else 1.
    pub angular_weight: f64,
    pub comps: Vec<DerivedComp>,
}

/// The commuted-field hierarchy of one snapshot.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    pub t: f64,
    pub level: usize,
    pub words: Vec<DerivedWord>,
}

struct WordEvaluator<'a> {
    grid: &'a RadialGrid,
    tower: Vec<Vec<LieValue>>,
    parity0: Parity,
    /// Memo of d_t^a d_r^b profiles keyed by (a, b).
    memo: BTreeMap<(u32, u32), Vec<LieValue>>,
}

impl<'a> WordEvaluator<'a> {
    fn new(
        grid: &'a RadialGrid,
        u: &[LieValue],
        pi: &[LieValue],
        accel: &[LieValue],
        parity: Parity,
        depth: usize,
    ) -> Result<Self, SymmetryError> {
        let tower = time_tower(u, pi, accel, grid, parity, depth)?;
        Ok(WordEvaluator {
            grid,
            tower,
            parity0: parity,
            memo: BTreeMap::new(),
        })
    }

    fn profile(&mut self, a: u32, b: u32) -> Result<&Vec<LieValue>, SymmetryError> {
        for bb in 0..=b {
            if self.memo.contains_key(&(a, bb)) {
                continue;
            }
            let arr = if bb == 0 {
                self.tower
                    .get(a as usize)
                    .ok_or(SymmetryError::AccelShape)?
                    .clone()
            } else {
                // Parity of d_t^a d_r^{bb-1} u flips once per radial derivative.
                let mut par = self.parity0;
                for _ in 0..(bb - 1) {
                    par = par.flip();
                }
                let prev = self.memo.get(&(a, bb - 1)).expect("filled in order");
                deriv_r(prev, self.grid, par).map_err(|_| SymmetryError::Grid("word derivative"))?
            };
            self.memo.insert((a, bb), arr);
        }
        Ok(self.memo.get(&(a, b)).expect("just filled"))
    }

    fn eval_terms(&mut self, terms: &[OpTerm], t: f64, alg: crate::algebra::Algebra) -> Result<Vec<LieValue>, SymmetryError> {
        let len = self.grid.len();
        let mut out = vec![LieValue::zero(alg); len];
        for term in terms {
            let cpow = term.coeff as f64 * num::powi(t, term.tp);
            if cpow == 0.0 {
                continue;
            }
            let prof = self.profile(term.dt, term.dr)?.clone();
            for (j, slot) in out.iter_mut().enumerate() {
                let w = cpow * num::powi(self.grid.r(j), term.rp);
                *slot = slot.add_scaled(w, &prof[j]);
            }
        }
        Ok(out)
    }
}

fn word_label(word: &[WordOp]) -> String {
    if word.is_empty() {
        return String::from("1");
    }
    let mut s = String::new();
    for (k, op) in word.iter().enumerate() {
        if k > 0 {
            s.push('.');
        }
        s.push_str(op.label());
    }
    s
}

/// Builds the commuted-field hierarchy of a snapshot up to `level`: all
/// words over {d_t, S} of length <= level, plus (for level >= 1) the single
/// first-order boost entry (angular weight 1/n) and the rotation entry,
/// which vanishes identically on radial profiles.
///
/// `accel[c]` must hold d_t^2 of component c, as produced by the evolution
/// right-hand side at this snapshot.
pub fn lie_hierarchy(
    field: &ComponentField,
    grid: &RadialGrid,
    accel: &[Vec<LieValue>],
    level: usize,
) -> Result<Hierarchy, SymmetryError> {
    if level > MAX_HIERARCHY_LEVEL {
        return Err(SymmetryError::LevelBudget { requested: level });
    }
    if accel.len() != field.comps.len() {
        return Err(SymmetryError::AccelShape);
    }
    for (comp, acc) in field.comps.iter().zip(accel.iter()) {
        if acc.len() != comp.u.len() || comp.u.len() != grid.len() {
            return Err(SymmetryError::AccelShape);
        }
    }

    // Evaluators carry the tower to depth level + 1 so that pi of each word
    // (one extra d_t) stays inside the tower.
    let mut evals = Vec::new();
    for (comp, acc) in field.comps.iter().zip(accel.iter()) {
        evals.push(WordEvaluator::new(
            grid,
            &comp.u,
            &comp.pi,
            acc,
            comp.spec.parity,
            level + 1,
        )?);
    }

    let mut words: Vec<Vec<WordOp>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<WordOp>> = vec![Vec::new()];
    for _ in 1..=level {
        let mut next = Vec::new();
        for w in frontier.iter() {
            for op in [WordOp::Dt, WordOp::Scale] {
                let mut w2 = w.clone();
                w2.push(op);
                next.push(w2);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }

    let t = field.t;
    let mut out_words = Vec::new();
    for word in words.iter() {
        let terms = expand_word(word);
        let mut dt_word = vec![WordOp::Dt];
        dt_word.extend_from_slice(word);
        let terms_dt = expand_word(&dt_word);
        let mut comps = Vec::new();
        for (c, comp) in field.comps.iter().enumerate() {
            let u = evals[c].eval_terms(&terms, t, field.alg)?;
            let pi = evals[c].eval_terms(&terms_dt, t, field.alg)?;
            comps.push(DerivedComp {
                name: comp.spec.name,
                family: comp.spec.family,
                parity: comp.spec.parity,
                u,
                pi,
            });
        }
        out_words.push(DerivedWord {
            label: word_label(word),
            order: word.len(),
            angular_weight: 1.0,
            comps,
        });
    }

    if level >= 1 {
        // Single first-order boost: radial profile (r d_t + t d_r) phi with
        // angular weight 1/n, parity flipped by the odd factor x_i/r.
        let bword = [WordOp::Boost];
        let terms = expand_word(&bword);
        let terms_dt = expand_word(&[WordOp::Dt, WordOp::Boost]);
        let mut comps = Vec::new();
        for (c, comp) in field.comps.iter().enumerate() {
            let u = evals[c].eval_terms(&terms, t, field.alg)?;
            let pi = evals[c].eval_terms(&terms_dt, t, field.alg)?;
            comps.push(DerivedComp {
                name: comp.spec.name,
                family: comp.spec.family,
                parity: comp.spec.parity.flip(),
                u,
                pi,
            });
        }
        out_words.push(DerivedWord {
            label: String::from("B"),
            order: 1,
            angular_weight: 1.0 / (grid.n as f64),
            comps,
        });

        // Rotations annihilate radial profiles; kept as an explicit zero
        // entry so energy sums enumerate the whole subfamily.
        let mut comps = Vec::new();
        for comp in field.comps.iter() {
            comps.push(DerivedComp {
                name: comp.spec.name,
                family: comp.spec.family,
                parity: comp.spec.parity,
                u: vec![LieValue::zero(field.alg); grid.len()],
                pi: vec![LieValue::zero(field.alg); grid.len()],
            });
        }
        out_words.push(DerivedWord {
            label: String::from("Rot"),
            order: 1,
            angular_weight: 1.0,
            comps,
        });
    }

    Ok(Hierarchy {
        t,
        level,
        words: out_words,
    })
}
