use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};

pub const DYCK_CAP: usize = 8;

/// Dyck path as a sequence of steps, `true` for an ascent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyckPath {
    steps: Vec<bool>,
}

impl DyckPath {
    pub fn new(steps: Vec<bool>) -> Result<Self> {
        let mut h: i64 = 0;
        for &s in &steps {
            h += if s { 1 } else { -1 };
            if h < 0 {
                return Err(invalid("Dyck path goes below zero"));
            }
        }
        if h != 0 {
            return Err(invalid("Dyck path does not return to zero"));
        }
        Ok(DyckPath { steps })
    }

    /// Parses a word over `U` / `D`.
    pub fn from_word(w: &str) -> Result<Self> {
        let steps = w
            .chars()
            .map(|c| match c {
                'U' => Ok(true),
                'D' => Ok(false),
                _ => Err(Error::Parse(format!("unexpected step `{c}`"))),
            })
            .collect::<Result<_>>()?;
        DyckPath::new(steps)
    }

    pub fn word(&self) -> String {
        self.steps.iter().map(|&s| if s { 'U' } else { 'D' }).collect()
    }

    pub fn steps(&self) -> &[bool] {
        &self.steps
    }

    /// Number of ascents.
    pub fn semi_length(&self) -> usize {
        self.steps.len() / 2
    }

    /// Heights `δ(0), …, δ(2r)`.
    pub fn heights(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut h = 0u32;
        out.push(0);
        for &s in &self.steps {
            if s {
                h += 1;
            } else {
                h -= 1;
            }
            out.push(h);
        }
        out
    }

    /// Ascent before and descent after the path.
    pub fn lift(&self) -> DyckPath {
        let mut steps = Vec::with_capacity(self.steps.len() + 2);
        steps.push(true);
        steps.extend_from_slice(&self.steps);
        steps.push(false);
        DyckPath { steps }
    }

    /// `Π_{i=1}^{2r−1} δ(i)`.
    pub fn interior_height_product(&self) -> BigInt {
        let h = self.heights();
        if h.len() < 3 {
            return BigInt::one();
        }
        h[1..h.len() - 1].iter().map(|&v| BigInt::from(v)).product()
    }
}

/// Dyck path with a label in `1..=δ(k)` on every descent (listed in path order).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelledDyckPath {
    pub path: DyckPath,
    pub labels: Vec<u32>,
}

impl LabelledDyckPath {
    pub fn new(path: DyckPath, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != path.semi_length() {
            return Err(invalid("one label per descent"));
        }
        let h = path.heights();
        let mut li = 0;
        for (k, &s) in path.steps().iter().enumerate() {
            if !s {
                if labels[li] < 1 || labels[li] > h[k] {
                    return Err(invalid(format!("label {} out of range 1..={}", labels[li], h[k])));
                }
                li += 1;
            }
        }
        Ok(LabelledDyckPath { path, labels })
    }

    pub fn unlabelled(path: DyckPath) -> Self {
        let r = path.semi_length();
        LabelledDyckPath { path, labels: vec![1; r] }
    }
}

/// Perfect matching of `1..=2r`, pairs sorted by their smaller point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pairing {
    pairs: Vec<(u32, u32)>,
}

impl Pairing {
    pub fn new(pairs: Vec<(u32, u32)>) -> Result<Self> {
        let m = 2 * pairs.len();
        let mut seen = vec![false; m + 1];
        let mut norm = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            let (a, b) = (a.min(b), a.max(b));
            if a == b || a < 1 || b as usize > m || seen[a as usize] || seen[b as usize] {
                return Err(invalid("not a pairing of 1..=2r"));
            }
            seen[a as usize] = true;
            seen[b as usize] = true;
            norm.push((a, b));
        }
        norm.sort_unstable();
        Ok(Pairing { pairs: norm })
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn size(&self) -> usize {
        2 * self.pairs.len()
    }

    pub fn is_non_crossing(&self) -> bool {
        self.pairs.iter().all(|&(a, b)| self.pairs.iter().all(|&(c, d)| !(a < c && c < b && b < d)))
    }

    /// `Σ (i_b − i_a)` over pairs, for point values `values[p − 1]`.
    pub fn exponent(&self, values: &[u64]) -> u64 {
        self.pairs.iter().map(|&(a, b)| values[b as usize - 1] - values[a as usize - 1]).sum()
    }
}

pub fn pairing_to_labelled_dyck(p: &Pairing) -> Result<LabelledDyckPath> {
    let m = p.size();
    let mut partner = vec![0u32; m + 1];
    for &(a, b) in p.pairs() {
        partner[a as usize] = b;
        partner[b as usize] = a;
    }
    let mut open: Vec<u32> = Vec::new();
    let mut steps = Vec::with_capacity(m);
    let mut labels = Vec::new();
    for k in 1..=m as u32 {
        let q = partner[k as usize];
        if q > k {
            open.push(k);
            steps.push(true);
        } else {
            let pos = open.iter().position(|&o| o == q).ok_or_else(|| invalid("malformed pairing"))?;
            labels.push((open.len() - pos) as u32);
            open.remove(pos);
            steps.push(false);
        }
    }
    LabelledDyckPath::new(DyckPath::new(steps)?, labels)
}

pub fn labelled_dyck_to_pairing(l: &LabelledDyckPath) -> Result<Pairing> {
    let mut open: Vec<u32> = Vec::new();
    let mut pairs = Vec::new();
    let mut li = 0;
    for (k, &s) in l.path.steps().iter().enumerate() {
        let pos = k as u32 + 1;
        if s {
            open.push(pos);
        } else {
            let i = l.labels.get(li).copied().ok_or_else(|| invalid("missing label"))? as usize;
            if i < 1 || i > open.len() {
                return Err(invalid("label exceeds the number of open bonds"));
            }
            let a = open.remove(open.len() - i);
            pairs.push((a, pos));
            li += 1;
        }
    }
    Pairing::new(pairs)
}

/// The non-crossing pairing of a Dyck path shape.
pub fn non_crossing_pairing(path: &DyckPath) -> Pairing {
    labelled_dyck_to_pairing(&LabelledDyckPath::unlabelled(path.clone())).expect("all-ones labels are valid")
}

/// Planar rooted tree with a label on the edge to each child.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LabelledTree {
    pub children: Vec<(u32, LabelledTree)>,
}

impl LabelledTree {
    pub fn edge_count(&self) -> usize {
        self.children.iter().map(|(_, c)| 1 + c.edge_count()).sum()
    }

    /// `(height, label)` for every edge in depth-first order.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        fn rec(t: &LabelledTree, depth: u32, out: &mut Vec<(u32, u32)>) {
            for (l, c) in &t.children {
                out.push((depth + 1, *l));
                rec(c, depth + 1, out);
            }
        }
        let mut out = Vec::new();
        rec(self, 0, &mut out);
        out
    }

    pub fn shape(&self) -> PlanarTree {
        PlanarTree { children: self.children.iter().map(|(_, c)| c.shape()).collect() }
    }
}

pub fn dyck_to_tree(l: &LabelledDyckPath) -> Result<LabelledTree> {
    let mut stack: Vec<LabelledTree> = vec![LabelledTree::default()];
    let mut li = 0;
    for &s in l.path.steps() {
        if s {
            stack.push(LabelledTree::default());
        } else {
            let child = stack.pop().ok_or_else(|| invalid("malformed path"))?;
            let parent = stack.last_mut().ok_or_else(|| invalid("malformed path"))?;
            parent.children.push((l.labels[li], child));
            li += 1;
        }
    }
    if stack.len() != 1 {
        return Err(invalid("malformed path"));
    }
    Ok(stack.pop().unwrap())
}

pub fn tree_to_dyck(t: &LabelledTree) -> Result<LabelledDyckPath> {
    fn rec(t: &LabelledTree, steps: &mut Vec<bool>, labels: &mut Vec<u32>) {
        for (l, c) in &t.children {
            steps.push(true);
            rec(c, steps, labels);
            steps.push(false);
            labels.push(*l);
        }
    }
    let (mut steps, mut labels) = (Vec::new(), Vec::new());
    rec(t, &mut steps, &mut labels);
    LabelledDyckPath::new(DyckPath::new(steps)?, labels)
}

/// Unlabelled planar rooted tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PlanarTree {
    pub children: Vec<PlanarTree>,
}

impl PlanarTree {
    pub fn from_dyck(path: &DyckPath) -> Self {
        dyck_to_tree(&LabelledDyckPath::unlabelled(path.clone())).expect("valid path").shape()
    }

    pub fn star(r: usize) -> Self {
        PlanarTree { children: vec![PlanarTree::default(); r] }
    }

    pub fn path(r: usize) -> Self {
        (0..r).fold(PlanarTree::default(), |t, _| PlanarTree { children: vec![t] })
    }

    pub fn edge_heights(&self) -> Vec<u32> {
        fn rec(t: &PlanarTree, depth: u32, out: &mut Vec<u32>) {
            for c in &t.children {
                out.push(depth + 1);
                rec(c, depth + 1, out);
            }
        }
        let mut out = Vec::new();
        rec(self, 0, &mut out);
        out
    }
}

/// `N(T) = Π h(e)`, the size of the uncrossing lattice above `T`.
pub fn functional_n(t: &PlanarTree) -> BigInt {
    t.edge_heights().into_iter().map(BigInt::from).product()
}

/// Sum of Möbius weights of the even set partitions collapsing to `T`.
pub fn functional_f(t: &PlanarTree) -> BigInt {
    if t.children.len() != 1 {
        return BigInt::zero();
    }
    let h = t.edge_heights();
    let r = h.len();
    let mag: BigInt = h.iter().filter(|&&v| v != 1).map(|&v| BigInt::from(v - 1)).product();
    if r % 2 == 1 {
        mag
    } else {
        -mag
    }
}

fn dyck_rec(up: usize, down: usize, cur: &mut Vec<bool>, out: &mut Vec<DyckPath>) {
    if up == 0 && down == 0 {
        out.push(DyckPath { steps: cur.clone() });
        return;
    }
    if up > 0 {
        cur.push(true);
        dyck_rec(up - 1, down + 1, cur, out);
        cur.pop();
    }
    if down > 0 {
        cur.push(false);
        dyck_rec(up, down - 1, cur, out);
        cur.pop();
    }
}

/// Dyck paths of semi-length `r` in lexicographic order with `U < D`.
pub fn enumerate_dyck_capped(r: usize, cap: usize) -> Result<Vec<DyckPath>> {
    if r > cap {
        return Err(Error::TooLarge { what: "Dyck enumeration", size: r as u64, cap: cap as u64 });
    }
    let mut out = Vec::new();
    dyck_rec(r, 0, &mut Vec::with_capacity(2 * r), &mut out);
    Ok(out)
}

pub fn enumerate_dyck(r: usize) -> Result<Vec<DyckPath>> {
    if r < 1 {
        return Err(invalid("r must be at least 1"));
    }
    enumerate_dyck_capped(r, DYCK_CAP)
}

/// Lifts of the paths of semi-length `r − 1`: the family of size `C_{r−1}`.
pub fn starred_dyck_capped(r: usize, cap: usize) -> Result<Vec<DyckPath>> {
    if r < 1 {
        return Err(invalid("r must be at least 1"));
    }
    Ok(enumerate_dyck_capped(r - 1, cap)?.iter().map(DyckPath::lift).collect())
}

pub fn starred_dyck(r: usize) -> Result<Vec<DyckPath>> {
    starred_dyck_capped(r, DYCK_CAP)
}

/// All `(2r − 1)!!` pairings of `1..=2r`.
pub fn enumerate_pairings(r: usize) -> Vec<Pairing> {
    fn rec(free: &mut Vec<u32>, cur: &mut Vec<(u32, u32)>, out: &mut Vec<Pairing>) {
        if free.is_empty() {
            out.push(Pairing::new(cur.clone()).unwrap());
            return;
        }
        let a = free.remove(0);
        for i in 0..free.len() {
            let b = free.remove(i);
            cur.push((a, b));
            rec(free, cur, out);
            cur.pop();
            free.insert(i, b);
        }
        free.insert(0, a);
    }
    let mut out = Vec::new();
    rec(&mut (1..=2 * r as u32).collect(), &mut Vec::new(), &mut out);
    out
}

/// Set partitions of `1..=m` whose blocks all have even size.
pub fn even_set_partitions(m: usize) -> Vec<Vec<Vec<u32>>> {
    fn rec(k: u32, m: u32, blocks: &mut Vec<Vec<u32>>, out: &mut Vec<Vec<Vec<u32>>>) {
        if k > m {
            if blocks.iter().all(|b| b.len() % 2 == 0) {
                out.push(blocks.clone());
            }
            return;
        }
        // Prune: odd blocks need at least one more point each.
        let odd = blocks.iter().filter(|b| b.len() % 2 == 1).count() as u32;
        if odd > m - k + 1 {
            return;
        }
        for i in 0..blocks.len() {
            blocks[i].push(k);
            rec(k + 1, m, blocks, out);
            blocks[i].pop();
        }
        blocks.push(vec![k]);
        rec(k + 1, m, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    rec(1, m as u32, &mut Vec::new(), &mut out);
    out
}

/// `μ = (−1)^{ℓ−1} (ℓ − 1)!` for a partition with `ℓ` blocks.
pub fn mobius(blocks: usize) -> BigInt {
    let f: BigInt = (1..blocks).map(BigInt::from).product();
    if blocks % 2 == 1 {
        f
    } else {
        -f
    }
}

/// Cuts each even block `a₁ < a₂ < …` into `{a₁, a₂}, {a₃, a₄}, …`.
pub fn cut_to_pairing(blocks: &[Vec<u32>]) -> Pairing {
    let mut pairs = Vec::new();
    for b in blocks {
        let mut s = b.clone();
        s.sort_unstable();
        for c in s.chunks(2) {
            pairs.push((c[0], c[1]));
        }
    }
    Pairing::new(pairs).expect("even blocks")
}

/// Composition of an integer into positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    parts: Vec<u32>,
}

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(invalid("composition parts must be positive"));
        }
        Ok(Composition { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Proper prefix sums.
    pub fn descents(&self) -> Vec<u32> {
        let mut acc = 0;
        let mut out = Vec::with_capacity(self.parts.len().saturating_sub(1));
        for &p in &self.parts[..self.parts.len() - 1] {
            acc += p;
            out.push(acc);
        }
        out
    }

    /// `m! / Π c_i!`.
    pub fn multinomial(&self) -> BigInt {
        let fact = |k: u32| -> BigInt { (1..=k).map(BigInt::from).product() };
        self.parts.iter().fold(fact(self.size()), |acc, &p| acc / fact(p))
    }
}

/// All compositions of `m` in lexicographic order of their parts.
pub fn enumerate_compositions(m: u32) -> Vec<Composition> {
    fn rec(left: u32, cur: &mut Vec<u32>, out: &mut Vec<Composition>) {
        if left == 0 {
            out.push(Composition { parts: cur.clone() });
            return;
        }
        for p in 1..=left {
            cur.push(p);
            rec(left - p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if m > 0 {
        rec(m, &mut Vec::new(), &mut out);
    }
    out
}

/// Open-bond counts between consecutive blocks after merging the points of
/// each block of `c`.
pub fn contract_diagram(nu: &Pairing, c: &Composition) -> Result<Vec<u32>> {
    if nu.size() != c.size() as usize {
        return Err(invalid(format!("pairing of size {} against composition of {}", nu.size(), c.size())));
    }
    if !nu.is_non_crossing() {
        return Err(invalid("contraction needs a non-crossing pairing"));
    }
    let mut block = vec![0usize; nu.size() + 1];
    let mut pos = 1;
    for (bi, &p) in c.parts().iter().enumerate() {
        for _ in 0..p {
            block[pos] = bi;
            pos += 1;
        }
    }
    let gaps = c.parts().len() - 1;
    Ok((0..gaps)
        .map(|g| nu.pairs().iter().filter(|&&(a, b)| block[a as usize] <= g && g < block[b as usize]).count() as u32)
        .collect())
}
