//! Deterministic enumeration of support selections.

use crate::ts::EventId;

/// Candidate events allowed to produce on (`allowed_pro`) and consume from (`allowed_con`)
/// the region being searched for. Both lists are sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SupportSelection {
    pub allowed_pro: Vec<EventId>,
    pub allowed_con: Vec<EventId>,
}

impl SupportSelection {
    pub fn all(n: usize) -> Self {
        let every: Vec<EventId> = (0..n).map(EventId).collect();
        SupportSelection { allowed_pro: every.clone(), allowed_con: every }
    }

    pub fn is_disjoint(&self) -> bool {
        self.allowed_pro.iter().all(|e| !self.allowed_con.contains(e))
    }
}

/// Size-`k` subsets of `0..n` in lexicographic order.
#[derive(Clone, Debug)]
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations { n, current: (k <= n).then(|| (0..k).collect()) }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

fn ids(v: Vec<usize>) -> Vec<EventId> {
    v.into_iter().map(EventId).collect()
}

/// All selections with `|allowed_pro| ≤ rho` and `|allowed_con| ≤ kappa` over `n` events,
/// ordered by total size, then pro size, then lexicographically (pro first). In pure
/// mode only disjoint pairs are produced.
pub fn selections(n: usize, rho: usize, kappa: usize, pure: bool) -> impl Iterator<Item = SupportSelection> {
    let (rho, kappa) = (rho.min(n), kappa.min(n));
    (0..=rho + kappa).flat_map(move |total| {
        let lo = total.saturating_sub(kappa);
        (lo..=rho.min(total)).flat_map(move |p| {
            let c = total - p;
            Combinations::new(n, p).flat_map(move |pro| {
                Combinations::new(n, c).filter_map(move |con| {
                    let sel = SupportSelection { allowed_pro: ids(pro.clone()), allowed_con: ids(con) };
                    (!pure || sel.is_disjoint()).then_some(sel)
                })
            })
        })
    })
}
