//! Permutations of `{1, …, n}`.
//!
//! Stored 0-based internally; constructors and accessors speak 1-based labels
//! so that examples read like the mathematics. Composition is right-to-left:
//! `(σ * τ)(i) = σ(τ(i))`.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm { images: (0..n).collect() }
    }

    /// Build from one-line notation with 1-based images.
    pub fn from_images(images: &[usize]) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for &x in images {
            if x == 0 || x > n || seen[x - 1] {
                return None;
            }
            seen[x - 1] = true;
            out.push(x - 1);
        }
        Some(Perm { images: out })
    }

    /// Build from disjoint cycles written with 1-based labels, e.g. `(12)(354)`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Option<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cyc in cycles {
            for (idx, &a) in cyc.iter().enumerate() {
                let b = cyc[(idx + 1) % cyc.len()];
                if a == 0 || a > n || b == 0 || b > n || touched[a - 1] {
                    return None;
                }
                touched[a - 1] = true;
                images[a - 1] = b - 1;
            }
        }
        Some(Perm { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Image of the 1-based label `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1] + 1
    }

    /// Image of a 0-based index.
    pub fn apply0(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|x| x + 1).collect()
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Perm { images: inv }
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.len(), other.len(), "permutation sizes differ");
        Perm { images: other.images.iter().map(|&x| self.images[x]).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Pairs `i < j` (0-based) with `σ(i) > σ(j)`.
    pub fn inversions(&self) -> Vec<(usize, usize)> {
        let n = self.images.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.images[i] > self.images[j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Block permutation `σ(τ₁, …, τₙ)` for blocks of sizes `τₖ.len()`:
    /// `(M_{k−1}+i) ↦ τ_k(i) + Σ_{j<σ(k)} m_{σ⁻¹(j)}`.
    pub fn block_compose(sigma: &Perm, taus: &[Perm]) -> Perm {
        assert_eq!(sigma.len(), taus.len());
        let sizes: Vec<usize> = taus.iter().map(Perm::len).collect();
        let inv = sigma.inverse();
        // offset of the block that lands in position σ(k)
        let mut offset_at = vec![0; sizes.len()];
        let mut acc = 0;
        for pos in 0..sizes.len() {
            offset_at[pos] = acc;
            acc += sizes[inv.images[pos]];
        }
        let mut images = Vec::with_capacity(acc);
        for (k, tau) in taus.iter().enumerate() {
            let base = offset_at[sigma.images[k]];
            for i in 0..tau.len() {
                images.push(base + tau.images[i]);
            }
        }
        Perm { images }
    }

    /// `σ ∘ᵢ τ = σ(1, …, τ, …, 1)` with `τ` at the 1-based position `i`.
    pub fn circle(sigma: &Perm, i: usize, tau: &Perm) -> Perm {
        let taus: Vec<Perm> = (1..=sigma.len())
            .map(|k| if k == i { tau.clone() } else { Perm::identity(1) })
            .collect();
        Perm::block_compose(sigma, &taus)
    }

    /// All permutations of `n` letters in lexicographic order of one-line notation.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Perm { images: cur.clone() });
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }

    /// The `(p, q)`-shuffles: `σ(1) < … < σ(p)` and `σ(p+1) < … < σ(p+q)`.
    pub fn shuffles(p: usize, q: usize) -> Vec<Perm> {
        let n = p + q;
        let mut out = Vec::new();
        let mut chosen = Vec::with_capacity(p);
        fn rec(start: usize, n: usize, p: usize, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if chosen.len() == p {
                out.push(chosen.clone());
                return;
            }
            for x in start..n {
                chosen.push(x);
                rec(x + 1, n, p, chosen, out);
                chosen.pop();
            }
        }
        let mut subsets = Vec::new();
        rec(0, n, p, &mut chosen, &mut subsets);
        for first in subsets {
            let rest: Vec<usize> = (0..n).filter(|x| !first.contains(x)).collect();
            let mut images = first;
            images.extend(rest);
            out.push(Perm { images });
        }
        out
    }

    /// Adjacent transpositions `(i i+1)` generating `S_n`.
    pub fn adjacent_transpositions(n: usize) -> Vec<Perm> {
        (1..n).map(|i| Perm::from_cycles(n, &[&[i, i + 1]]).unwrap()).collect()
    }
}

impl fmt::Display for Perm {
    /// Cycle notation, e.g. `(132)`; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut wrote = false;
        let sep = if n >= 10 { "," } else { "" };
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cyc = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cyc.push((x + 1).to_string());
                x = self.images[x];
            }
            write!(f, "({})", cyc.join(sep))?;
            wrote = true;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycles_and_display() {
        let s = Perm::from_cycles(5, &[&[1, 4, 5], &[2, 3]]).unwrap();
        assert_eq!(s.images(), vec![4, 3, 2, 5, 1]);
        assert_eq!(s.to_string(), "(145)(23)");
        assert_eq!(Perm::identity(3).to_string(), "()");
    }

    #[test]
    fn compose_is_right_to_left() {
        let a = Perm::from_cycles(3, &[&[1, 2]]).unwrap();
        let b = Perm::from_cycles(3, &[&[2, 3]]).unwrap();
        // (12)(23) sends 3 -> 2 -> 1
        assert_eq!(a.compose(&b).apply(3), 1);
        assert!(a.compose(&a.inverse()).is_identity());
    }

    #[test]
    fn shuffle_counts() {
        assert_eq!(Perm::shuffles(2, 1).len(), 3);
        assert_eq!(Perm::shuffles(0, 1).len(), 1);
        assert_eq!(Perm::shuffles(3, 2).len(), 10);
        assert_eq!(Perm::all(4).len(), 24);
    }

    #[test]
    fn circle_of_permutations() {
        // (132) = (12) ∘₂ (1)
        let s = Perm::from_cycles(2, &[&[1, 2]]).unwrap();
        let got = Perm::circle(&s, 2, &Perm::identity(2));
        assert_eq!(got, Perm::from_cycles(3, &[&[1, 3, 2]]).unwrap());
    }
}
