//! Small combinatorial helpers shared across modules.

/// `base^exp` saturating into `u128`.
pub fn pow_count(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

/// Visits every tuple of `[base]^len` in lexicographic order. The visitor
/// returns `false` to stop early; the function reports whether it ran to
/// completion.
pub fn for_each_tuple(base: usize, len: usize, mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    if len == 0 {
        return visit(&[]);
    }
    if base == 0 {
        return true;
    }
    let mut cur = vec![0usize; len];
    loop {
        if !visit(&cur) {
            return false;
        }
        let mut pos = len;
        loop {
            if pos == 0 {
                return true;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < base {
                break;
            }
            cur[pos] = 0;
        }
    }
}

/// Visits every tuple whose `i`-th entry is drawn from `choices[i]`, in the
/// lexicographic order induced by the choice lists.
pub fn for_each_choice(choices: &[Vec<usize>], mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    if choices.iter().any(|c| c.is_empty()) {
        return true;
    }
    let len = choices.len();
    let mut idx = vec![0usize; len];
    let mut cur: Vec<usize> = choices.iter().map(|c| c[0]).collect();
    loop {
        if !visit(&cur) {
            return false;
        }
        let mut pos = len;
        loop {
            if pos == 0 {
                return true;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                cur[pos] = choices[pos][idx[pos]];
                break;
            }
            idx[pos] = 0;
            cur[pos] = choices[pos][0];
        }
    }
}

/// Advances `perm` to the next permutation in lexicographic order.
pub fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).fold(1u128, |acc, x| acc.saturating_mul(x))
}

/// Iterative union-find with path compression and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(len: usize) -> Self {
        UnionFind { parent: (0..len).collect(), size: vec![1; len] }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_enumeration_counts() {
        let mut n = 0;
        for_each_tuple(3, 4, |_| {
            n += 1;
            true
        });
        assert_eq!(n, 81);
        let mut n = 0;
        for_each_tuple(5, 0, |_| {
            n += 1;
            true
        });
        assert_eq!(n, 1);
    }

    #[test]
    fn permutations_are_lexicographic() {
        let mut p = vec![0, 1, 2];
        let mut seen = vec![p.clone()];
        while next_permutation(&mut p) {
            seen.push(p.clone());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[1], vec![0, 2, 1]);
        assert_eq!(seen[5], vec![2, 1, 0]);
    }

    #[test]
    fn union_find_merges() {
        let mut uf = UnionFind::new(5);
        uf.union(0, 1);
        uf.union(3, 4);
        uf.union(1, 4);
        assert_eq!(uf.find(0), uf.find(3));
        assert_ne!(uf.find(0), uf.find(2));
    }
}
