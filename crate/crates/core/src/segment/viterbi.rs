use super::Tag;

/// Sum of lattice scores along `tags`, `-inf` for an illegal sequence.
/// Summation runs right to left.
pub fn path_score(lattice: &[[f64; 4]], tags: &[Tag]) -> f64 {
    if tags.len() != lattice.len() || !super::is_legal(tags) {
        return f64::NEG_INFINITY;
    }
    tags.iter()
        .zip(lattice)
        .rev()
        .fold(0.0, |acc, (t, row)| row[t.index()] + acc)
}

/// Best legal tag sequence; among equal scores the lexicographically
/// smallest under `B < M < E < S`.
pub fn viterbi_decode(lattice: &[[f64; 4]]) -> Vec<Tag> {
    let n = lattice.len();
    if n == 0 {
        return Vec::new();
    }
    // suffix[i][t]: best score of positions i.. given tag t at i
    let mut suffix = vec![[f64::NEG_INFINITY; 4]; n];
    for t in Tag::ALL {
        if t.can_end() {
            suffix[n - 1][t.index()] = lattice[n - 1][t.index()];
        }
    }
    for i in (0..n - 1).rev() {
        for t in Tag::ALL {
            let next = Tag::ALL
                .iter()
                .filter(|u| t.can_precede(**u))
                .map(|u| suffix[i + 1][u.index()])
                .fold(f64::NEG_INFINITY, f64::max);
            suffix[i][t.index()] = lattice[i][t.index()] + next;
        }
    }
    let pick = |allowed: &dyn Fn(Tag) -> bool, row: &[f64; 4]| -> Tag {
        let best = Tag::ALL
            .iter()
            .filter(|t| allowed(**t))
            .map(|t| row[t.index()])
            .fold(f64::NEG_INFINITY, f64::max);
        Tag::ALL
            .into_iter()
            .find(|t| allowed(*t) && row[t.index()] == best)
            .unwrap_or(Tag::S)
    };
    let mut tags = Vec::with_capacity(n);
    let mut prev = pick(&|t: Tag| t.can_start(), &suffix[0]);
    tags.push(prev);
    for row in &suffix[1..] {
        let p = prev;
        prev = pick(&|t: Tag| p.can_precede(t), row);
        tags.push(prev);
    }
    tags
}
