use std::cmp::Ordering;

/// Dense exponent vector over a presentation's alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Monomial(pub(crate) Vec<u32>);

impl Monomial {
    pub(crate) fn zero(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub(crate) fn degree(&self) -> u64 {
        self.0.iter().map(|&e| u64::from(e)).sum()
    }

    /// `self <= other` pointwise.
    pub(crate) fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self - other`; caller guarantees `other.divides(self)`.
    pub(crate) fn minus(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub(crate) fn plus(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub(crate) fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    /// Supports intersect. Pairs of rules with disjoint supports never need
    /// a critical-pair check.
    pub(crate) fn overlaps(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| *a > 0 && *b > 0)
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

/// Graded order, ties broken lexicographically with the first generator most
/// significant.
pub(crate) fn term_order(a: &Monomial, b: &Monomial) -> Ordering {
    a.degree().cmp(&b.degree()).then_with(|| a.0.cmp(&b.0))
}
