use num_traits::ToPrimitive;

use crate::arith::{convergents, Quad};
use crate::error::{Error, Result};
use crate::model::{Constraint, ExtReal, IntPoint, LatticeMembership, LinearForm};

/// How the points of a witness sequence are produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    /// `pₖ = base + k·step`, `k = 1, 2, …`.
    Ray { base: IntPoint, step: IntPoint },
    /// Walks a facet `row·x ≥ rhs` with irrational slope: coordinate `free`
    /// takes the values `start + stride·k` and coordinate `dep` is the
    /// floor or ceiling that keeps the row satisfied as tightly as possible.
    FacetFloor { base: IntPoint, free: usize, dep: usize, start: i64, stride: i64, row: Constraint },
    /// `pₖ = base + sign·(qₖ, pₖ)` in coordinates `(free, dep)`, where `pₖ/qₖ`
    /// runs over the continued-fraction convergents of `slope` lying on
    /// `side` of it, after dropping the first `skip` of them.
    Pell { base: IntPoint, free: usize, dep: usize, sign: i64, slope: Quad, side: i8, skip: usize },
}

/// A replayable sequence of lattice points whose objective values decrease
/// strictly towards `limit`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessSequence {
    pub generator: Generator,
    pub objective: LinearForm,
    pub limit: ExtReal,
}

impl WitnessSequence {
    /// The first `count` points. Pell sequences may come back shorter when the
    /// convergents outgrow 64-bit integers.
    pub fn points(&self, count: usize) -> Vec<IntPoint> {
        match &self.generator {
            Generator::Ray { base, step } => (1..=count as i64)
                .map_while(|k| base.iter().zip(step).map(|(b, s)| s.checked_mul(k).and_then(|v| v.checked_add(*b))).collect::<Option<Vec<_>>>())
                .collect(),
            Generator::FacetFloor { base, free, dep, start, stride, row } => (0..count as i64)
                .map_while(|k| {
                    let mut p = base.clone();
                    p[*free] = stride.checked_mul(k)?.checked_add(*start)?;
                    p[*dep] = 0;
                    let coef = &row.form.coeffs()[*dep];
                    let bound = (&row.rhs - &row.form.eval_int(&p)) / coef;
                    let v = if coef.is_positive() { bound.ceil() } else { bound.floor() };
                    p[*dep] = v.to_i64()?;
                    Some(p)
                })
                .collect(),
            Generator::Pell { base, free, dep, sign, slope, side, skip } => convergents(slope)
                .filter(|(p, q)| (&Quad::from_bigint(p.clone()) - &slope.scale(&q.clone().into())).signum() == *side)
                .skip(*skip)
                .take(count)
                .map_while(|(p, q)| {
                    let (p, q) = (p.to_i64()?, q.to_i64()?);
                    let mut pt = base.clone();
                    pt[*free] = pt[*free].checked_add(sign.checked_mul(q)?)?;
                    pt[*dep] = pt[*dep].checked_add(sign.checked_mul(p)?)?;
                    Some(pt)
                })
                .collect(),
        }
    }

    pub fn values(&self, count: usize) -> Vec<Quad> {
        self.points(count).iter().map(|p| self.objective.eval_int(p)).collect()
    }

    /// Checks that the first `count` points lie in `set`, that their values
    /// decrease strictly, and that they stay above a finite limit.
    pub fn verify(&self, set: &dyn LatticeMembership, count: usize) -> Result<()> {
        let pts = self.points(count);
        if pts.len() < count {
            return Err(Error::Undecided(format!("witness sequence produced only {} of {count} points", pts.len())));
        }
        for (k, p) in pts.iter().enumerate() {
            if !set.contains_point(p) {
                return Err(Error::Undecided(format!("witness point #{k} {p:?} is not in the lattice set")));
            }
        }
        let vals: Vec<Quad> = pts.iter().map(|p| self.objective.eval_int(p)).collect();
        if let Some(k) = vals.windows(2).position(|v| v[1] >= v[0]) {
            return Err(Error::Undecided(format!("witness values do not decrease at #{}", k + 1)));
        }
        if let ExtReal::Finite(l) = &self.limit {
            if let Some(k) = vals.iter().position(|v| v <= l) {
                return Err(Error::Undecided(format!("witness value #{k} reaches the claimed infimum")));
            }
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        match &self.generator {
            Generator::Ray { base, step } => format!("ray {base:?} + k·{step:?}"),
            Generator::FacetFloor { base, free, dep, start, stride, row } => {
                let round = if row.form.coeffs()[*dep].is_positive() { "ceil" } else { "floor" };
                let mut p = base.iter().map(|v| v.to_string()).collect::<Vec<_>>();
                p[*free] = format!("{start} + {stride}k");
                p[*dep] = format!("{round}(facet {row})");
                format!("facet walk ({}), k = 0, 1, …", p.join(", "))
            }
            Generator::Pell { base, free, dep, sign, slope, .. } => {
                format!("{base:?} + {sign}·(q_k, p_k) on coordinates (x{}, x{}), p_k/q_k convergents of {slope}", free + 1, dep + 1)
            }
        }
    }
}

/// The first `k` convergents of `√2` from `p₀/q₀ = 1/1`,
/// `p_{k+1} = p_k + 2q_k`, `q_{k+1} = p_k + q_k`.
pub fn pell_convergents(k: usize) -> Vec<(num_bigint::BigInt, num_bigint::BigInt)> {
    let mut out = Vec::with_capacity(k);
    let (mut p, mut q) = (num_bigint::BigInt::from(1), num_bigint::BigInt::from(1));
    for _ in 0..k {
        out.push((p.clone(), q.clone()));
        let np = &p + &q * 2;
        let nq = &p + &q;
        p = np;
        q = nq;
    }
    out
}
