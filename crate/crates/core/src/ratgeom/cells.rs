//! Cells of a central hyperplane arrangement, optionally inside a base cone.

use num_traits::Signed;

use super::{HCone, VCone};
use crate::error::GeomError;
use crate::rational::{dot, neg, zeros, QVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn of(q: &crate::rational::Rational) -> Sign {
        if q.is_negative() {
            Sign::Neg
        } else if q.is_positive() {
            Sign::Pos
        } else {
            Sign::Zero
        }
    }
}

/// A relatively open cell `{y ∈ base : sign⟨h_i,y⟩ = signs[i]}`.
#[derive(Clone, Debug)]
pub struct Cell {
    pub signs: Vec<Sign>,
    /// Closure of the cell.
    pub closure: HCone,
    pub generators: VCone,
    /// A point of the cell: the relint point of the closure, or 0 when the
    /// cell is `{0}`.
    pub point: QVec,
}

impl Cell {
    pub fn is_origin(&self) -> bool {
        self.generators.is_trivial()
    }

    pub fn dim(&self) -> usize {
        self.generators.span_dim()
    }
}

struct Search<'a, F> {
    base: &'a HCone,
    hyperplanes: &'a [QVec],
    prune: F,
    cap: usize,
    out: Vec<Cell>,
}

fn build(base: &HCone, hyperplanes: &[QVec], signs: &[Sign]) -> Result<Option<Cell>, GeomError> {
    let mut ineq = Vec::new();
    let mut eq = Vec::new();
    let mut strict = Vec::new();
    for (h, s) in hyperplanes.iter().zip(signs) {
        match s {
            Sign::Zero => eq.push(h.clone()),
            Sign::Neg => {
                ineq.push(h.clone());
                strict.push(h.clone());
            }
            Sign::Pos => {
                ineq.push(neg(h));
                strict.push(neg(h));
            }
        }
    }
    let closure = base.with_rows(&ineq, &eq)?;
    let generators = closure.generators();
    let point = match generators.relint_point() {
        Ok(p) => p,
        Err(_) => {
            if strict.is_empty() {
                zeros(base.dim())
            } else {
                return Ok(None);
            }
        }
    };
    if strict.iter().any(|a| !dot(a, &point).is_negative()) {
        return Ok(None);
    }
    Ok(Some(Cell {
        signs: signs.to_vec(),
        closure,
        generators,
        point,
    }))
}

impl<F: FnMut(&[Sign]) -> bool> Search<'_, F> {
    fn run(&mut self, signs: &mut Vec<Sign>) -> Result<(), GeomError> {
        let Some(cell) = build(self.base, self.hyperplanes, signs)? else {
            return Ok(());
        };
        if (self.prune)(signs) {
            return Ok(());
        }
        if signs.len() == self.hyperplanes.len() {
            if self.out.len() >= self.cap {
                return Err(GeomError::CapExceeded { cap: self.cap });
            }
            self.out.push(cell);
            return Ok(());
        }
        for s in [Sign::Neg, Sign::Zero, Sign::Pos] {
            signs.push(s);
            self.run(signs)?;
            signs.pop();
        }
        Ok(())
    }
}

/// Enumerates every nonempty cell of the arrangement inside `base`, in
/// lexicographic order of sign vectors (`Neg < Zero < Pos`). `prune` is
/// called on each feasible sign prefix; returning `true` drops the whole
/// subtree.
pub fn arrangement_cells<F>(
    base: &HCone,
    hyperplanes: &[QVec],
    cap: usize,
    prune: F,
) -> Result<Vec<Cell>, GeomError>
where
    F: FnMut(&[Sign]) -> bool,
{
    for h in hyperplanes {
        if h.len() != base.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: base.dim(),
                found: h.len(),
            });
        }
    }
    let mut search = Search {
        base,
        hyperplanes,
        prune,
        cap,
        out: Vec::new(),
    };
    search.run(&mut Vec::new())?;
    Ok(search.out)
}
