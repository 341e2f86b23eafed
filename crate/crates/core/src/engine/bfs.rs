//! Bounded breadth-first exploration of a congruence class, used as an
//! oracle independent of completion.

use std::collections::BTreeSet;

use rustc_hash::FxHashSet;

use super::monomial::Monomial;
use super::{to_element, to_monomial};
use crate::error::Result;
use crate::monoid::{MonoidElement, Presentation};

/// Alphabets up to this size are explored with one byte per generator packed
/// into a `u128`.
const PACKED_WIDTH: usize = 16;
const HIGH_BITS: u128 = u128::from_ne_bytes([0x80; 16]);

/// Relation sides as exponent vectors, both directions.
pub struct BfsOracle<'p> {
    presentation: &'p Presentation,
    moves: Vec<(Monomial, Monomial)>,
    packed: Option<Vec<(u128, u128)>>,
}

#[derive(Debug)]
enum Reached {
    Packed(FxHashSet<u128>),
    Plain(FxHashSet<Monomial>),
}

/// Elements reached from a start element.
#[derive(Debug)]
pub struct CongruenceBall<'p> {
    presentation: &'p Presentation,
    elements: Reached,
    /// No further element is reachable: the ball is the whole class.
    pub saturated: bool,
    /// Exploration stopped at the element cap.
    pub truncated: bool,
}

/// Packs exponents below 128 into byte lanes; the free high bit of every lane
/// lets subtraction detect a missing factor without borrowing across lanes.
fn pack(m: &Monomial) -> Option<u128> {
    if m.0.len() > PACKED_WIDTH {
        return None;
    }
    let mut bytes = [0u8; 16];
    for (b, &e) in bytes.iter_mut().zip(&m.0) {
        *b = u8::try_from(e).ok().filter(|&e| e < 0x80)?;
    }
    Some(u128::from_le_bytes(bytes))
}

fn unpack(x: u128, width: usize) -> Monomial {
    Monomial(
        x.to_le_bytes()[..width]
            .iter()
            .map(|&b| u32::from(b))
            .collect(),
    )
}

fn packed_degree(x: u128) -> u64 {
    x.to_le_bytes().iter().map(|&b| u64::from(b)).sum()
}

/// `m - from + to` when `from` divides `m`; `Err` when a lane would leave the
/// packed range.
fn packed_step(m: u128, from: u128, to: u128) -> Option<std::result::Result<u128, ()>> {
    if ((m | HIGH_BITS) - from) & HIGH_BITS != HIGH_BITS {
        return None;
    }
    let y = m - from + to;
    Some(if y & HIGH_BITS == 0 { Ok(y) } else { Err(()) })
}

impl<'p> BfsOracle<'p> {
    pub fn new(p: &'p Presentation) -> Result<Self> {
        let mut moves = Vec::with_capacity(2 * p.relations().len());
        for r in p.relations() {
            let l = to_monomial(p, &r.lhs)?;
            let rr = to_monomial(p, &r.rhs)?;
            moves.push((l.clone(), rr.clone()));
            moves.push((rr, l));
        }
        let packed = moves
            .iter()
            .map(|(a, b)| Some((pack(a)?, pack(b)?)))
            .collect::<Option<Vec<_>>>();
        Ok(BfsOracle {
            presentation: p,
            moves,
            packed,
        })
    }

    /// All elements reachable from `x` within `depth` relation applications,
    /// stopping early once `max_elements` have been found.
    pub fn ball(
        &self,
        x: &MonoidElement,
        depth: usize,
        max_elements: usize,
    ) -> Result<CongruenceBall<'p>> {
        let start = to_monomial(self.presentation, x)?;
        if let (Some(moves), Some(packed_start)) = (&self.packed, pack(&start)) {
            if let Some(ball) = self.packed_ball(moves, packed_start, depth, max_elements) {
                return Ok(ball);
            }
        }
        Ok(self.plain_ball(start, depth, max_elements))
    }

    fn packed_ball(
        &self,
        moves: &[(u128, u128)],
        start: u128,
        depth: usize,
        max_elements: usize,
    ) -> Option<CongruenceBall<'p>> {
        let mut seen = FxHashSet::default();
        seen.insert(start);
        let mut frontier = vec![start];
        let mut truncated = false;
        for _ in 0..depth {
            let mut next = Vec::new();
            'frontier: for &m in &frontier {
                for &(from, to) in moves {
                    match packed_step(m, from, to) {
                        None => {}
                        Some(Err(())) => return None,
                        Some(Ok(y)) if seen.insert(y) => {
                            next.push(y);
                            if seen.len() >= max_elements {
                                truncated = true;
                                break 'frontier;
                            }
                        }
                        Some(Ok(_)) => {}
                    }
                }
            }
            frontier = next;
            if frontier.is_empty() || truncated {
                break;
            }
        }
        Some(CongruenceBall {
            presentation: self.presentation,
            elements: Reached::Packed(seen),
            saturated: frontier.is_empty() && !truncated,
            truncated,
        })
    }

    fn plain_ball(&self, start: Monomial, depth: usize, max_elements: usize) -> CongruenceBall<'p> {
        let mut seen = FxHashSet::default();
        seen.insert(start.clone());
        let mut frontier = vec![start];
        let mut truncated = false;
        for _ in 0..depth {
            let mut next = Vec::new();
            'frontier: for m in &frontier {
                for (from, to) in &self.moves {
                    if from.divides(m) {
                        let y = m.minus(from).plus(to);
                        if seen.insert(y.clone()) {
                            next.push(y);
                            if seen.len() >= max_elements {
                                truncated = true;
                                break 'frontier;
                            }
                        }
                    }
                }
            }
            frontier = next;
            if frontier.is_empty() || truncated {
                break;
            }
        }
        CongruenceBall {
            presentation: self.presentation,
            elements: Reached::Plain(seen),
            saturated: frontier.is_empty() && !truncated,
            truncated,
        }
    }
}

impl CongruenceBall<'_> {
    pub fn contains(&self, x: &MonoidElement) -> bool {
        let Ok(m) = to_monomial(self.presentation, x) else {
            return false;
        };
        match &self.elements {
            Reached::Packed(set) => pack(&m).is_some_and(|k| set.contains(&k)),
            Reached::Plain(set) => set.contains(&m),
        }
    }

    pub fn len(&self) -> usize {
        match &self.elements {
            Reached::Packed(set) => set.len(),
            Reached::Plain(set) => set.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_set(&self) -> BTreeSet<MonoidElement> {
        self.elements().collect()
    }

    /// Reached elements of degree at most `max_degree`, in no fixed order.
    pub fn elements_up_to_degree(
        &self,
        max_degree: u64,
    ) -> Box<dyn Iterator<Item = MonoidElement> + '_> {
        let p = self.presentation;
        match &self.elements {
            Reached::Packed(set) => {
                let width = p.alphabet().len();
                Box::new(
                    set.iter()
                        .filter(move |&&x| packed_degree(x) <= max_degree)
                        .map(move |&x| to_element(p, &unpack(x, width))),
                )
            }
            Reached::Plain(set) => Box::new(
                set.iter()
                    .filter(move |m| m.degree() <= max_degree)
                    .map(move |m| to_element(p, m)),
            ),
        }
    }

    pub fn elements(&self) -> Box<dyn Iterator<Item = MonoidElement> + '_> {
        self.elements_up_to_degree(u64::MAX)
    }
}

/// Every element reachable from `x` by at most `depth` applications of a
/// relation in either direction.
pub fn congruence_bfs(
    p: &Presentation,
    x: &MonoidElement,
    depth: usize,
) -> Result<BTreeSet<MonoidElement>> {
    Ok(BfsOracle::new(p)?.ball(x, depth, usize::MAX)?.to_set())
}
