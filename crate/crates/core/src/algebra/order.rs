use std::cmp::Ordering;

use super::monomial::Monomial;

/// Graded reverse lexicographic order with an explicit variable priority.
///
/// `priority[0]` is the largest variable, `priority[n-1]` the smallest.
/// Towers use [`TermOrder::tower`]: variables are indexed in adjunction order and
/// the most recently adjoined variable is the largest, so relations such as
/// `f^s - g` lead with the adjoined variable whenever `deg g < s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermOrder {
    priority: Vec<usize>,
}

impl TermOrder {
    pub fn grevlex(priority: Vec<usize>) -> Self {
        let mut seen = vec![false; priority.len()];
        for &p in &priority {
            assert!(p < priority.len() && !seen[p], "priority must be a permutation");
            seen[p] = true;
        }
        TermOrder { priority }
    }

    /// Newest variable largest: priority `n-1, n-2, ..., 0`.
    pub fn tower(nvars: usize) -> Self {
        TermOrder { priority: (0..nvars).rev().collect() }
    }

    pub fn nvars(&self) -> usize {
        self.priority.len()
    }

    pub fn priority(&self) -> &[usize] {
        &self.priority
    }

    /// The same order on one more variable, which becomes the largest.
    pub fn with_new_largest(&self) -> Self {
        let mut p = Vec::with_capacity(self.priority.len() + 1);
        p.push(self.priority.len());
        p.extend_from_slice(&self.priority);
        TermOrder { priority: p }
    }

    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Ordering {
        let (da, db) = (a.degree(), b.degree());
        if da != db {
            return da.cmp(&db);
        }
        let (ea, eb) = (a.exponents(), b.exponents());
        for &v in self.priority.iter().rev() {
            if ea[v] != eb[v] {
                // smaller exponent in the smallest differing variable wins
                return eb[v].cmp(&ea[v]);
            }
        }
        Ordering::Equal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newest_variable_leads_even_power() {
        // vars (t, u): u^2 > t^2 in the tower order
        let ord = TermOrder::tower(2);
        let t2 = Monomial::new(vec![2, 0]);
        let u2 = Monomial::new(vec![0, 2]);
        assert_eq!(ord.compare(&u2, &t2), Ordering::Greater);
    }

    #[test]
    fn refines_degree() {
        let ord = TermOrder::tower(3);
        let a = Monomial::new(vec![3, 0, 0]);
        let b = Monomial::new(vec![0, 0, 2]);
        assert_eq!(ord.compare(&a, &b), Ordering::Greater);
    }

    #[test]
    fn grevlex_classic() {
        // x > y > z: x*z^2 vs y^3 -> y^3 larger in grevlex
        let ord = TermOrder::grevlex(vec![0, 1, 2]);
        let xz2 = Monomial::new(vec![1, 0, 2]);
        let y3 = Monomial::new(vec![0, 3, 0]);
        assert_eq!(ord.compare(&y3, &xz2), Ordering::Greater);
    }
}
