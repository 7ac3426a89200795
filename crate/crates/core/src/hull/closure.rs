use crate::arith::Quad;
use crate::error::{Error, Result};
use crate::lp::{self, pad, LpOutcome};
use crate::model::{Constraint, ConstraintSystem, IntPoint, LatticeSet, LatticeSetSpec, LinearForm, Sense};

use super::{recession_cone, same_cone};

/// One convex piece of a closure given as a convex hull of a union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosurePiece {
    /// The polyhedron itself is the closed convex hull of its lattice points.
    Exact(ConstraintSystem),
    /// `conv(outer ∩ Zⁿ)`: closed, contained in `outer`, with the same
    /// recession cone, and disjoint from the hyperplane of `strict`.
    StrictLatticeHull { outer: ConstraintSystem, strict: Constraint },
}

impl ClosurePiece {
    pub fn outer(&self) -> &ConstraintSystem {
        match self {
            ClosurePiece::Exact(s) => s,
            ClosurePiece::StrictLatticeHull { outer, .. } => outer,
        }
    }
}

/// The closed convex hull of a lattice set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosureDescription {
    HalfspaceForm(ConstraintSystem),
    ConvOfUnion(Vec<ClosurePiece>),
    Unknown,
}

impl ClosureDescription {
    pub fn dim(&self) -> Option<usize> {
        match self {
            ClosureDescription::HalfspaceForm(s) => Some(s.dim()),
            ClosureDescription::ConvOfUnion(p) => p.first().map(|p| p.outer().dim()),
            ClosureDescription::Unknown => None,
        }
    }
}

/// A closure from one of the registered families, with the irrational
/// facets (in `≥` form) that the plain convex hull only partially reaches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisteredClosure {
    pub family: &'static str,
    pub closure: ClosureDescription,
    pub open_facets: Vec<Constraint>,
    pub pieces: Vec<ConstraintSystem>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Interior,
    Boundary,
    Outside,
}

fn split(q: &Quad) -> (Quad, Quad) {
    (Quad::rational(q.rational_part().clone()), Quad::rational(q.surd_part().clone()))
}

/// Rational and surd parts of a form, coefficientwise.
pub(crate) fn split_form(f: &LinearForm) -> (LinearForm, LinearForm) {
    let (a, b): (Vec<Quad>, Vec<Quad>) = f.coeffs().iter().map(split).unzip();
    (LinearForm(a), LinearForm(b))
}

/// The two rational equations satisfied by every lattice point on the
/// hyperplane of `row`.
pub(crate) fn lattice_equations(row: &Constraint) -> [Constraint; 2] {
    let (fr, fs) = split_form(&row.form);
    let (hr, hs) = split(&row.rhs);
    [Constraint::eq(fr, hr), Constraint::eq(fs, hs)]
}

/// Whether the normal of `form` is not a multiple of a rational vector.
pub fn irrational_direction(form: &LinearForm) -> bool {
    let (r, s) = split_form(form);
    let n = form.dim();
    (0..n).any(|i| (i + 1..n).any(|j| !(&(&r.0[i] * &s.0[j]) - &(&r.0[j] * &s.0[i])).is_zero()))
}

/// Recognizes the single-piece families: an irrational half-space, or a
/// full-dimensional planar cone with one irrational facet, possibly after
/// fixing coordinates to integers.
fn registered_poly(sys: &ConstraintSystem) -> Option<(&'static str, Constraint)> {
    let n = sys.dim();
    let mut fixed: Vec<Option<Quad>> = vec![None; n];
    let mut ineq: Vec<Constraint> = Vec::new();
    for r in sys.rows() {
        if r.sense == Sense::Eq {
            let nz: Vec<usize> = (0..n).filter(|&j| !r.form.0[j].is_zero()).collect();
            if !r.is_rational() || nz.len() != 1 {
                return None;
            }
            let v = &r.rhs / &r.form.0[nz[0]];
            if !v.is_integer() || fixed[nz[0]].as_ref().is_some_and(|w| *w != v) {
                return None;
            }
            fixed[nz[0]] = Some(v);
        } else {
            ineq.extend(r.ge_rows());
        }
    }
    let free: Vec<usize> = (0..n).filter(|&j| fixed[j].is_none()).collect();
    let mut restricted: Vec<(Constraint, Constraint)> = Vec::new();
    for r in ineq {
        let shift: Quad = (0..n).filter_map(|j| fixed[j].as_ref().map(|v| &r.form.0[j] * v)).sum();
        let form = LinearForm(free.iter().map(|&j| r.form.0[j].clone()).collect());
        let rhs = &r.rhs - &shift;
        if form.is_zero() {
            if rhs.is_positive() {
                return None;
            }
            continue;
        }
        restricted.push((Constraint::ge(form, rhs), r));
    }
    let irr: Vec<&(Constraint, Constraint)> = restricted.iter().filter(|(r, _)| irrational_direction(&r.form)).collect();
    if irr.len() != 1 {
        return None;
    }
    let row = irr[0].1.clone();
    if restricted.len() == 1 {
        return Some(("surd-halfspace", row));
    }
    let rows: Vec<Constraint> = restricted.iter().map(|(r, _)| r.clone()).collect();
    if free.len() == 2 && rows.iter().all(|r| r.rhs.is_zero()) {
        if let Some((_, tau)) = lp::max_margin(2, &rows, &rows) {
            if tau.is_positive() {
                return Some(("surd-cone-2d", row));
            }
        }
    }
    None
}

/// A strict piece: some irrational row of the piece carries no lattice point
/// of the piece on its hyperplane.
fn strict_row(sys: &ConstraintSystem) -> Option<Constraint> {
    sys.rows().iter().flat_map(Constraint::ge_rows).find(|r| {
        if !irrational_direction(&r.form) {
            return false;
        }
        let mut rows = sys.rows().to_vec();
        rows.extend(lattice_equations(r));
        lp::feasible_point(sys.dim(), &rows).is_none()
    })
}

/// The registered closed form for `spec`, if it belongs to a known family.
pub fn registered_closure(spec: &LatticeSetSpec) -> Option<RegisteredClosure> {
    let pieces = spec.pieces();
    match &spec.set {
        LatticeSet::Finite(_) => None,
        LatticeSet::Poly(_) => {
            let (family, row) = registered_poly(&pieces[0])?;
            Some(RegisteredClosure { family, closure: ClosureDescription::HalfspaceForm(pieces[0].clone()), open_facets: vec![row], pieces })
        }
        LatticeSet::Union(_) => {
            let mut out = Vec::new();
            let mut facets = Vec::new();
            for p in &pieces {
                if let Some((_, row)) = registered_poly(p) {
                    facets.push(row);
                    out.push(ClosurePiece::Exact(p.clone()));
                } else {
                    let strict = strict_row(p)?;
                    out.push(ClosurePiece::StrictLatticeHull { outer: p.clone(), strict });
                }
            }
            let first = recession_cone(&pieces[0]);
            if facets.is_empty() || !pieces.iter().all(|p| same_cone(&recession_cone(p), &first)) {
                return None;
            }
            let closure = ClosureDescription::ConvOfUnion(out);
            let relaxed = union_system(&pieces, &[]);
            let valid: Vec<Constraint> = facets.into_iter().filter(|f| implied(&relaxed, f)).collect();
            Some(RegisteredClosure { family: "union-equal-recession", closure, open_facets: valid, pieces })
        }
    }
}

pub fn analytic_closure(spec: &LatticeSetSpec) -> ClosureDescription {
    registered_closure(spec).map(|r| r.closure).unwrap_or(ClosureDescription::Unknown)
}

/// Balas' lifted description of `conv(P¹ ∪ … ∪ Pᵏ)` (closure thereof).
/// Variables: `x`, then `(yᵢ, tᵢ)` per piece. Pieces flagged in `zero_weight`
/// contribute only recession directions.
#[derive(Clone, Debug)]
pub(crate) struct UnionLp {
    pub n: usize,
    pub nvars: usize,
    pub rows: Vec<Constraint>,
}

impl UnionLp {
    pub fn piece_offset(&self, i: usize) -> usize {
        self.n + i * (self.n + 1)
    }

    /// `row` on `x`, lifted.
    pub fn on_x(&self, row: &Constraint) -> Constraint {
        pad(row, self.nvars)
    }
}

pub(crate) fn union_system(pieces: &[ConstraintSystem], zero_weight: &[usize]) -> UnionLp {
    let n = pieces[0].dim();
    let k = pieces.len();
    let nvars = n + k * (n + 1);
    let mut rows = Vec::new();
    let unit = |j: usize, v: i64| {
        let mut c = vec![Quad::zero(); nvars];
        c[j] = Quad::from_int(v);
        c
    };
    for j in 0..n {
        let mut c = unit(j, 1);
        for i in 0..k {
            c[n + i * (n + 1) + j] = Quad::from_int(-1);
        }
        rows.push(Constraint::eq(LinearForm(c), Quad::zero()));
    }
    let mut sum = vec![Quad::zero(); nvars];
    for (i, p) in pieces.iter().enumerate() {
        let off = n + i * (n + 1);
        sum[off + n] = Quad::one();
        rows.push(Constraint::ge(LinearForm(unit(off + n, 1)), Quad::zero()));
        if zero_weight.contains(&i) {
            rows.push(Constraint::eq(LinearForm(unit(off + n, 1)), Quad::zero()));
        }
        for r in p.rows() {
            let mut c = vec![Quad::zero(); nvars];
            for j in 0..n {
                c[off + j] = r.form.0[j].clone();
            }
            c[off + n] = -&r.rhs;
            rows.push(Constraint::new(LinearForm(c), r.sense, Quad::zero()));
        }
    }
    rows.push(Constraint::eq(LinearForm(sum), Quad::one()));
    UnionLp { n, nvars, rows }
}

/// Whether `row` (on `x`) holds on all of the lifted system.
fn implied(u: &UnionLp, row: &Constraint) -> bool {
    row.ge_rows().iter().all(|g| match lp::minimize(u.on_x(g).form.coeffs(), &u.rows) {
        LpOutcome::Optimal { value, .. } => value >= g.rhs,
        LpOutcome::Infeasible => true,
        LpOutcome::Unbounded { .. } => false,
    })
}

/// An exact LP description of `closure ∩ extra` in lifted variables whose
/// first `n` coordinates are `x`. Strict pieces are dropped to their
/// recession cones when `extra` forces them onto their strict hyperplane;
/// otherwise the description is not available.
pub(crate) fn closure_lp(closure: &ClosureDescription, extra: &[Constraint]) -> Result<UnionLp> {
    match closure {
        ClosureDescription::Unknown => Err(Error::Unsupported("closure of the lattice set is not known".into())),
        ClosureDescription::HalfspaceForm(s) => {
            let mut rows = s.rows().to_vec();
            rows.extend(extra.iter().cloned());
            Ok(UnionLp { n: s.dim(), nvars: s.dim(), rows })
        }
        ClosureDescription::ConvOfUnion(pieces) => {
            let outers: Vec<ConstraintSystem> = pieces.iter().map(|p| p.outer().clone()).collect();
            let mut relaxed = union_system(&outers, &[]);
            let lifted: Vec<Constraint> = extra.iter().map(|r| relaxed.on_x(r)).collect();
            relaxed.rows.extend(lifted);
            let mut zero = Vec::new();
            for (i, p) in pieces.iter().enumerate() {
                let ClosurePiece::StrictLatticeHull { strict, .. } = p else { continue };
                let off = relaxed.piece_offset(i);
                let mut c = vec![Quad::zero(); relaxed.nvars];
                for j in 0..relaxed.n {
                    c[off + j] = strict.form.0[j].clone();
                }
                c[off + relaxed.n] = -&strict.rhs;
                let forced = match lp::maximize(&c, &relaxed.rows) {
                    LpOutcome::Optimal { value, .. } => value.is_zero(),
                    LpOutcome::Infeasible => true,
                    LpOutcome::Unbounded { .. } => false,
                };
                if !forced {
                    return Err(Error::Undecided("the lattice hull of a strict piece meets the region; its facets are not known".into()));
                }
                zero.push(i);
            }
            let mut u = union_system(&outers, &zero);
            let lifted: Vec<Constraint> = extra.iter().map(|r| u.on_x(r)).collect();
            u.rows.extend(lifted);
            Ok(u)
        }
    }
}

/// An inner approximation: strict pieces replaced by the hull of their
/// lattice points in `[-radius, radius]ⁿ` plus their recession cone.
fn inner_lp(pieces: &[ClosurePiece], radius: i64) -> UnionLp {
    let n = pieces[0].outer().dim();
    let mut systems = Vec::new();
    let mut samples: Vec<(usize, Vec<IntPoint>)> = Vec::new();
    for (i, p) in pieces.iter().enumerate() {
        match p {
            ClosurePiece::Exact(s) => systems.push(s.clone()),
            ClosurePiece::StrictLatticeHull { outer, .. } => {
                systems.push(recession_cone(outer));
                let pts = box_points(n, radius).filter(|z| outer.contains_int(z)).collect();
                samples.push((i, pts));
            }
        }
    }
    let mut u = union_system(&systems, &[]);
    // weights μ for each sample point; a strict piece is cone + Σ μ p with Σ μ = t
    for (i, pts) in samples {
        let off = u.piece_offset(i);
        let base = u.nvars;
        u.nvars += pts.len();
        for r in u.rows.iter_mut() {
            r.form.0.resize(u.nvars, Quad::zero());
        }
        // the cone rows were homogeneous in t; redirect x-coupling through μ
        for j in 0..n {
            let row = &mut u.rows[j];
            for (m, p) in pts.iter().enumerate() {
                row.form.0[base + m] = Quad::from_int(-p[j]);
            }
        }
        let mut sum = vec![Quad::zero(); u.nvars];
        sum[off + n] = Quad::from_int(-1);
        for m in 0..pts.len() {
            sum[base + m] = Quad::one();
            let mut c = vec![Quad::zero(); u.nvars];
            c[base + m] = Quad::one();
            u.rows.push(Constraint::ge(LinearForm(c), Quad::zero()));
        }
        u.rows.push(Constraint::eq(LinearForm(sum), Quad::zero()));
    }
    u
}

fn box_points(n: usize, r: i64) -> impl Iterator<Item = IntPoint> {
    let side = (2 * r + 1) as usize;
    (0..side.pow(n as u32)).map(move |mut k| {
        (0..n)
            .map(|_| {
                let v = (k % side) as i64 - r;
                k /= side;
                v
            })
            .collect()
    })
}

fn fix_x(u: &UnionLp, x: &[Quad]) -> Vec<Constraint> {
    let mut rows = u.rows.clone();
    for (j, v) in x.iter().enumerate() {
        let mut c = vec![Quad::zero(); u.nvars];
        c[j] = Quad::one();
        rows.push(Constraint::eq(LinearForm(c), v.clone()));
    }
    rows
}

fn feasible(u: &UnionLp, x: &[Quad]) -> bool {
    lp::feasible_point(u.nvars, &fix_x(u, x)).is_some()
}

/// Classifies `point` against the closure. Points of a union closure that
/// the exact reduction cannot settle are checked against an inner
/// approximation; anything still unresolved is `Undecided`.
pub fn membership(closure: &ClosureDescription, point: &[Quad]) -> Result<Membership> {
    let n = closure.dim().ok_or_else(|| Error::Precondition("membership needs a known closure".into()))?;
    if point.len() != n {
        return Err(Error::Dimension(format!("point has {} coordinates, closure lives in dimension {n}", point.len())));
    }
    match closure {
        ClosureDescription::Unknown => unreachable!(),
        ClosureDescription::HalfspaceForm(s) => {
            if !s.contains(point) {
                Ok(Membership::Outside)
            } else if s.rows().iter().any(|r| r.slack(point).is_zero()) {
                Ok(Membership::Boundary)
            } else {
                Ok(Membership::Interior)
            }
        }
        ClosureDescription::ConvOfUnion(pieces) => {
            let outers: Vec<ConstraintSystem> = pieces.iter().map(|p| p.outer().clone()).collect();
            let relaxed = union_system(&outers, &[]);
            if !feasible(&relaxed, point) {
                return Ok(Membership::Outside);
            }
            let pin: Vec<Constraint> = (0..n)
                .map(|j| {
                    let mut e = vec![Quad::zero(); n];
                    e[j] = Quad::one();
                    Constraint::eq(LinearForm(e), point[j].clone())
                })
                .collect();
            let inner = inner_lp(pieces, 4);
            let inside = match closure_lp(closure, &pin) {
                Ok(u) => lp::feasible_point(u.nvars, &u.rows).is_some(),
                Err(Error::Undecided(_)) => {
                    let lattice = point.iter().all(Quad::is_integer) && outers.iter().any(|s| s.contains(point));
                    if lattice || feasible(&inner, point) {
                        true
                    } else {
                        return Err(Error::Undecided(format!("cannot place {point:?} against the lattice hull of a strict piece")));
                    }
                }
                Err(e) => return Err(e),
            };
            if !inside {
                return Ok(Membership::Outside);
            }
            let tight = outers.iter().flat_map(|s| s.rows().iter().flat_map(Constraint::ge_rows)).any(|r| !r.form.is_zero() && r.slack(point).is_zero() && implied(&relaxed, &r));
            if tight {
                return Ok(Membership::Boundary);
            }
            let eps = Quad::ratio(1, 1000);
            let all_in = (0..n).all(|j| {
                [1, -1].iter().all(|&s| {
                    let mut q = point.to_vec();
                    q[j] = &q[j] + &eps.scale_int(s);
                    feasible(&inner, &q)
                })
            });
            if all_in {
                Ok(Membership::Interior)
            } else {
                Err(Error::Undecided(format!("{point:?} is in the closure but neither a valid facet nor a ball certifies its position")))
            }
        }
    }
}

/// Lattice points of the box that lie in `conv(P¹ ∪ … ∪ Pᵏ)` but in no piece.
/// A correctly specified union has none.
pub fn validate_union(spec: &LatticeSetSpec, bounds: &[(i64, i64)]) -> Result<Vec<IntPoint>> {
    let pieces = spec.pieces();
    if pieces.is_empty() {
        return Ok(Vec::new());
    }
    if bounds.len() != spec.dim {
        return Err(Error::Dimension(format!("{} box bounds for dimension {}", bounds.len(), spec.dim)));
    }
    let u = union_system(&pieces, &[]);
    let mut out = Vec::new();
    let mut z: Vec<i64> = bounds.iter().map(|b| b.0).collect();
    loop {
        if !spec.contains(&z) && feasible(&u, &crate::model::to_quads(&z)) {
            out.push(z.clone());
        }
        let mut j = 0;
        loop {
            if j == z.len() {
                return Ok(out);
            }
            if z[j] < bounds[j].1 {
                z[j] += 1;
                break;
            }
            z[j] = bounds[j].0;
            j += 1;
        }
    }
}
