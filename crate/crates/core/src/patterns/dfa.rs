//! Subset construction, minimization and boolean operations on DFAs.
//!
//! The alphabet is the set of Unicode scalar values, renumbered so that the
//! surrogate block disappears. It is split into intervals ("classes") such
//! that every transition treats all members of a class alike.

use std::collections::{HashMap, VecDeque};

use rand::Rng;

use super::{normalize_ranges, CharClass, Pattern, PatternError};

const SURROGATE_LO: u32 = 0xD800;
const SURROGATE_LEN: u32 = 0x800;
/// One past the last scalar index.
const ALPHA_END: u32 = 0x110000 - SURROGATE_LEN;
const MAX_NFA_STATES: usize = 200_000;
const MAX_DFA_STATES: usize = 50_000;

fn to_index(cp: u32) -> Option<u32> {
    if cp < SURROGATE_LO {
        Some(cp)
    } else if cp < SURROGATE_LO + SURROGATE_LEN {
        None
    } else {
        Some(cp - SURROGATE_LEN)
    }
}

fn to_code_point(i: u32) -> u32 {
    if i < SURROGATE_LO {
        i
    } else {
        i + SURROGATE_LEN
    }
}

fn index_char(i: u32) -> char {
    char::from_u32(to_code_point(i)).expect("scalar index maps to a char")
}

/// Code-point ranges to scalar-index ranges.
fn index_ranges(ranges: &[(u32, u32)]) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for &(a, b) in ranges {
        let lo = if (SURROGATE_LO..SURROGATE_LO + SURROGATE_LEN).contains(&a) {
            SURROGATE_LO + SURROGATE_LEN
        } else {
            a
        };
        let hi = if (SURROGATE_LO..SURROGATE_LO + SURROGATE_LEN).contains(&b) {
            SURROGATE_LO - 1
        } else {
            b
        };
        if lo > hi {
            continue;
        }
        if lo < SURROGATE_LO && hi >= SURROGATE_LO + SURROGATE_LEN {
            out.push((lo, SURROGATE_LO - 1));
            out.push((SURROGATE_LO, hi - SURROGATE_LEN));
        } else {
            out.push((to_index(lo).unwrap(), to_index(hi).unwrap()));
        }
    }
    out
}

/// Scalar-index ranges back to code-point ranges.
fn code_point_ranges(ranges: &[(u32, u32)]) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for &(a, b) in ranges {
        if a < SURROGATE_LO && b >= SURROGATE_LO {
            out.push((a, SURROGATE_LO - 1));
            out.push((SURROGATE_LO + SURROGATE_LEN, to_code_point(b)));
        } else {
            out.push((to_code_point(a), to_code_point(b)));
        }
    }
    normalize_ranges(out)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Eps {
    Plain,
    Start,
    End,
}

type Ranges = Vec<(u32, u32)>;

#[derive(Default)]
struct Nfa {
    eps: Vec<Vec<(Eps, usize)>>,
    edges: Vec<Vec<(Ranges, usize)>>,
}

impl Nfa {
    fn state(&mut self) -> Result<usize, PatternError> {
        if self.eps.len() >= MAX_NFA_STATES {
            return Err(PatternError::LimitExceeded("pattern automaton too large".into()));
        }
        self.eps.push(Vec::new());
        self.edges.push(Vec::new());
        Ok(self.eps.len() - 1)
    }

    fn eps(&mut self, from: usize, kind: Eps, to: usize) {
        self.eps[from].push((kind, to));
    }

    fn edge(&mut self, from: usize, ranges: Vec<(u32, u32)>, to: usize) {
        if !ranges.is_empty() {
            self.edges[from].push((ranges, to));
        }
    }

    fn fragment(&mut self, p: &Pattern) -> Result<(usize, usize), PatternError> {
        match p {
            Pattern::Empty => Ok((self.state()?, self.state()?)),
            Pattern::Epsilon => {
                let s = self.state()?;
                Ok((s, s))
            }
            Pattern::Char(c) => {
                let (s, e) = (self.state()?, self.state()?);
                let i = to_index(*c as u32).expect("chars are scalar values");
                self.edge(s, vec![(i, i)], e);
                Ok((s, e))
            }
            Pattern::Class(cls) => {
                let (s, e) = (self.state()?, self.state()?);
                self.edge(s, index_ranges(&cls.ranges), e);
                Ok((s, e))
            }
            Pattern::Concat(items) => {
                let s = self.state()?;
                let mut cur = s;
                for item in items {
                    let (a, b) = self.fragment(item)?;
                    self.eps(cur, Eps::Plain, a);
                    cur = b;
                }
                Ok((s, cur))
            }
            Pattern::Union(items) if !p.has_meta() => {
                let (s, e) = (self.state()?, self.state()?);
                for item in items {
                    let (a, b) = self.fragment(item)?;
                    self.eps(s, Eps::Plain, a);
                    self.eps(b, Eps::Plain, e);
                }
                Ok((s, e))
            }
            Pattern::Star(q) => self.star(q),
            Pattern::Plus(q) => {
                let (a, b) = self.fragment(q)?;
                let (s, e) = self.star(q)?;
                self.eps(b, Eps::Plain, s);
                Ok((a, e))
            }
            Pattern::Opt(q) => {
                let (a, b) = self.fragment(q)?;
                self.eps(a, Eps::Plain, b);
                Ok((a, b))
            }
            Pattern::Repeat(q, lo, hi) => {
                let s = self.state()?;
                let mut cur = s;
                for _ in 0..*lo {
                    let (a, b) = self.fragment(q)?;
                    self.eps(cur, Eps::Plain, a);
                    cur = b;
                }
                match hi {
                    None => {
                        let (a, b) = self.star(q)?;
                        self.eps(cur, Eps::Plain, a);
                        cur = b;
                    }
                    Some(h) => {
                        let e = self.state()?;
                        for _ in *lo..*h {
                            self.eps(cur, Eps::Plain, e);
                            let (a, b) = self.fragment(q)?;
                            self.eps(cur, Eps::Plain, a);
                            cur = b;
                        }
                        self.eps(cur, Eps::Plain, e);
                        cur = e;
                    }
                }
                Ok((s, cur))
            }
            Pattern::AnchorStart => {
                let (s, e) = (self.state()?, self.state()?);
                self.eps(s, Eps::Start, e);
                Ok((s, e))
            }
            Pattern::AnchorEnd => {
                let (s, e) = (self.state()?, self.state()?);
                self.eps(s, Eps::End, e);
                Ok((s, e))
            }
            Pattern::Not(_) | Pattern::And(..) | Pattern::Union(_) => {
                // A meta-operator inside a regex stands for its exact language.
                let d = compile(p)?;
                self.embed(&d)
            }
        }
    }

    fn star(&mut self, q: &Pattern) -> Result<(usize, usize), PatternError> {
        let (s, e) = (self.state()?, self.state()?);
        let (a, b) = self.fragment(q)?;
        self.eps(s, Eps::Plain, a);
        self.eps(b, Eps::Plain, a);
        self.eps(s, Eps::Plain, e);
        self.eps(b, Eps::Plain, e);
        Ok((s, e))
    }

    fn embed(&mut self, d: &CompiledDfa) -> Result<(usize, usize), PatternError> {
        let live = d.live_states();
        let e = self.state()?;
        let mut ids = vec![usize::MAX; d.num_states()];
        for s in 0..d.num_states() {
            if live[s] || s == d.start as usize {
                ids[s] = self.state()?;
            }
        }
        for s in 0..d.num_states() {
            if ids[s] == usize::MAX {
                continue;
            }
            if d.accept[s] {
                self.eps(ids[s], Eps::Plain, e);
            }
            let mut by_target: HashMap<usize, Vec<(u32, u32)>> = HashMap::new();
            for c in 0..d.num_classes() {
                let t = d.next(s as u32, c) as usize;
                if live[t] {
                    by_target.entry(t).or_default().push((d.bounds[c], d.bounds[c + 1] - 1));
                }
            }
            let mut targets: Vec<_> = by_target.into_iter().collect();
            targets.sort_by_key(|(t, _)| *t);
            for (t, ranges) in targets {
                self.edge(ids[s], normalize_ranges(ranges), ids[t]);
            }
        }
        Ok((ids[d.start as usize], e))
    }

    fn closure(&self, seed: &[usize], allow_start: bool, allow_end: bool) -> Vec<usize> {
        let mut seen = vec![false; self.eps.len()];
        let mut stack: Vec<usize> = seed.to_vec();
        let mut out = Vec::new();
        while let Some(s) = stack.pop() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            out.push(s);
            for &(kind, t) in &self.eps[s] {
                let ok = match kind {
                    Eps::Plain => true,
                    Eps::Start => allow_start,
                    Eps::End => allow_end,
                };
                if ok && !seen[t] {
                    stack.push(t);
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn determinize(&self, start: usize, fin: usize) -> Result<CompiledDfa, PatternError> {
        let mut points = vec![0, ALPHA_END];
        for edges in &self.edges {
            for (ranges, _) in edges {
                for &(a, b) in ranges {
                    points.push(a);
                    points.push(b + 1);
                }
            }
        }
        points.sort_unstable();
        points.dedup();
        let bounds = points;
        let n = bounds.len() - 1;
        let class_span = |a: u32, b: u32| {
            let lo = bounds.binary_search(&a).unwrap();
            let hi = bounds.binary_search(&(b + 1)).unwrap();
            lo..hi
        };
        let moves: Vec<Vec<(std::ops::Range<usize>, usize)>> = self
            .edges
            .iter()
            .map(|es| {
                let mut v = Vec::new();
                for (ranges, t) in es {
                    for &(a, b) in ranges {
                        v.push((class_span(a, b), *t));
                    }
                }
                v
            })
            .collect();

        let mut index: HashMap<(Vec<usize>, bool), u32> = HashMap::new();
        let mut sets: Vec<(Vec<usize>, bool)> = Vec::new();
        let mut trans: Vec<u32> = Vec::new();
        let init = (self.closure(&[start], true, false), true);
        index.insert(init.clone(), 0);
        sets.push(init);
        let mut i = 0;
        while i < sets.len() {
            let (set, _) = sets[i].clone();
            let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); n];
            for &s in &set {
                for (span, t) in &moves[s] {
                    for c in span.clone() {
                        buckets[c].push(*t);
                    }
                }
            }
            for bucket in buckets {
                let key = (self.closure(&bucket, false, false), false);
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        if sets.len() >= MAX_DFA_STATES {
                            return Err(PatternError::LimitExceeded("pattern automaton too large".into()));
                        }
                        let id = sets.len() as u32;
                        index.insert(key.clone(), id);
                        sets.push(key);
                        id
                    }
                };
                trans.push(id);
            }
            i += 1;
        }
        let accept = sets
            .iter()
            .map(|(set, initial)| self.closure(set, *initial, true).binary_search(&fin).is_ok())
            .collect();
        Ok(CompiledDfa {
            bounds,
            trans,
            accept,
            start: 0,
        })
    }
}

/// A total DFA over scalar-index classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledDfa {
    /// Class `c` is the index interval `bounds[c]..bounds[c + 1]`.
    bounds: Vec<u32>,
    trans: Vec<u32>,
    accept: Vec<bool>,
    start: u32,
}

pub(super) fn compile(p: &Pattern) -> Result<CompiledDfa, PatternError> {
    match p {
        Pattern::Not(q) => Ok(compile(q)?.complement()),
        Pattern::And(a, b) => Ok(compile(a)?.intersect(&compile(b)?)),
        Pattern::Union(items) if p.has_meta() => {
            let mut acc = CompiledDfa::empty();
            for item in items {
                acc = acc.union(&compile(item)?);
            }
            Ok(acc)
        }
        _ => {
            let mut nfa = Nfa::default();
            let (a, b) = nfa.fragment(p)?;
            let all = vec![(0, ALPHA_END - 1)];
            let pre = nfa.state()?;
            let fin = nfa.state()?;
            nfa.edge(pre, all.clone(), pre);
            nfa.eps(pre, Eps::Plain, a);
            nfa.eps(b, Eps::Plain, fin);
            nfa.edge(fin, all, fin);
            Ok(nfa.determinize(pre, fin)?.minimize())
        }
    }
}

impl CompiledDfa {
    /// The automaton accepting nothing.
    pub fn empty() -> CompiledDfa {
        CompiledDfa {
            bounds: vec![0, ALPHA_END],
            trans: vec![0],
            accept: vec![false],
            start: 0,
        }
    }

    /// The automaton accepting every string.
    pub fn universal() -> CompiledDfa {
        CompiledDfa {
            bounds: vec![0, ALPHA_END],
            trans: vec![0],
            accept: vec![true],
            start: 0,
        }
    }

    pub fn num_states(&self) -> usize {
        self.accept.len()
    }

    pub fn num_classes(&self) -> usize {
        self.bounds.len() - 1
    }

    fn next(&self, s: u32, c: usize) -> u32 {
        self.trans[s as usize * self.num_classes() + c]
    }

    fn class_of(&self, i: u32) -> usize {
        self.bounds.partition_point(|&b| b <= i) - 1
    }

    fn class_size(&self, c: usize) -> u64 {
        (self.bounds[c + 1] - self.bounds[c]) as u64
    }

    pub fn matches(&self, s: &str) -> bool {
        let mut state = self.start;
        for ch in s.chars() {
            let i = to_index(ch as u32).expect("chars are scalar values");
            state = self.next(state, self.class_of(i));
        }
        self.accept[state as usize]
    }

    pub fn complement(&self) -> CompiledDfa {
        let mut d = self.clone();
        for a in &mut d.accept {
            *a = !*a;
        }
        d.minimize()
    }

    pub fn intersect(&self, other: &CompiledDfa) -> CompiledDfa {
        self.product(other, |a, b| a && b)
    }

    pub fn union(&self, other: &CompiledDfa) -> CompiledDfa {
        self.product(other, |a, b| a || b)
    }

    fn product(&self, other: &CompiledDfa, op: impl Fn(bool, bool) -> bool) -> CompiledDfa {
        let mut bounds: Vec<u32> = self.bounds.iter().chain(other.bounds.iter()).copied().collect();
        bounds.sort_unstable();
        bounds.dedup();
        let n = bounds.len() - 1;
        let map: Vec<(usize, usize)> = (0..n)
            .map(|c| (self.class_of(bounds[c]), other.class_of(bounds[c])))
            .collect();
        let mut index: HashMap<(u32, u32), u32> = HashMap::new();
        let mut pairs = vec![(self.start, other.start)];
        index.insert((self.start, other.start), 0);
        let mut trans = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (a, b) = pairs[i];
            for &(ca, cb) in &map {
                let key = (self.next(a, ca), other.next(b, cb));
                let id = *index.entry(key).or_insert_with(|| {
                    pairs.push(key);
                    (pairs.len() - 1) as u32
                });
                trans.push(id);
            }
            i += 1;
        }
        let accept = pairs
            .iter()
            .map(|&(a, b)| op(self.accept[a as usize], other.accept[b as usize]))
            .collect();
        CompiledDfa {
            bounds,
            trans,
            accept,
            start: 0,
        }
        .minimize()
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![self.start];
        seen[self.start as usize] = true;
        while let Some(s) = stack.pop() {
            for c in 0..self.num_classes() {
                let t = self.next(s, c);
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// States that are reachable and can still reach an accepting state.
    fn live_states(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
        for s in 0..n {
            for c in 0..self.num_classes() {
                rev[self.next(s as u32, c) as usize].push(s as u32);
            }
        }
        let mut co = vec![false; n];
        let mut stack: Vec<u32> = (0..n as u32).filter(|&s| self.accept[s as usize]).collect();
        for &s in &stack {
            co[s as usize] = true;
        }
        while let Some(s) = stack.pop() {
            for &p in &rev[s as usize] {
                if !co[p as usize] {
                    co[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        let reach = self.reachable();
        (0..n).map(|s| reach[s] && co[s]).collect()
    }

    /// Moore partition refinement followed by merging of adjacent classes
    /// with identical columns.
    pub fn minimize(&self) -> CompiledDfa {
        let reach = self.reachable();
        let old: Vec<u32> = (0..self.num_states() as u32).filter(|&s| reach[s as usize]).collect();
        let mut renum = vec![u32::MAX; self.num_states()];
        for (i, &s) in old.iter().enumerate() {
            renum[s as usize] = i as u32;
        }
        let nc = self.num_classes();
        let mut block: Vec<u32> = old.iter().map(|&s| self.accept[s as usize] as u32).collect();
        let mut count = block.iter().collect::<std::collections::HashSet<_>>().len();
        loop {
            let mut sig_index: HashMap<Vec<u32>, u32> = HashMap::new();
            let mut next_block = Vec::with_capacity(old.len());
            for (i, &s) in old.iter().enumerate() {
                let mut sig = Vec::with_capacity(nc + 1);
                sig.push(block[i]);
                for c in 0..nc {
                    sig.push(block[renum[self.next(s, c) as usize] as usize]);
                }
                let len = sig_index.len() as u32;
                next_block.push(*sig_index.entry(sig).or_insert(len));
            }
            let new_count = sig_index.len();
            block = next_block;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        let mut trans = vec![0u32; count * nc];
        let mut accept = vec![false; count];
        for (i, &s) in old.iter().enumerate() {
            let b = block[i] as usize;
            accept[b] = self.accept[s as usize];
            for c in 0..nc {
                trans[b * nc + c] = block[renum[self.next(s, c) as usize] as usize];
            }
        }
        let start = block[renum[self.start as usize] as usize];
        // Merge adjacent classes whose columns agree.
        let mut keep = vec![0usize];
        for c in 1..nc {
            let prev = *keep.last().unwrap();
            if (0..count).any(|s| trans[s * nc + c] != trans[s * nc + prev]) {
                keep.push(c);
            }
        }
        let mut bounds: Vec<u32> = keep.iter().map(|&c| self.bounds[c]).collect();
        bounds.push(ALPHA_END);
        let k = keep.len();
        let mut merged = vec![0u32; count * k];
        for s in 0..count {
            for (j, &c) in keep.iter().enumerate() {
                merged[s * k + j] = trans[s * nc + c];
            }
        }
        let mut d = CompiledDfa {
            bounds,
            trans: merged,
            accept,
            start,
        };
        d.canonical_order();
        d
    }

    /// Renumbers states in breadth-first order from the start state.
    fn canonical_order(&mut self) {
        let n = self.num_states();
        let nc = self.num_classes();
        let mut order = vec![u32::MAX; n];
        let mut queue = VecDeque::from([self.start]);
        order[self.start as usize] = 0;
        let mut seq = vec![self.start];
        while let Some(s) = queue.pop_front() {
            for c in 0..nc {
                let t = self.next(s, c);
                if order[t as usize] == u32::MAX {
                    order[t as usize] = seq.len() as u32;
                    seq.push(t);
                    queue.push_back(t);
                }
            }
        }
        let mut trans = vec![0; seq.len() * nc];
        let mut accept = vec![false; seq.len()];
        for (i, &s) in seq.iter().enumerate() {
            accept[i] = self.accept[s as usize];
            for c in 0..nc {
                trans[i * nc + c] = order[self.next(s, c) as usize];
            }
        }
        self.trans = trans;
        self.accept = accept;
        self.start = 0;
    }

    pub fn is_empty(&self) -> bool {
        !self.live_states()[self.start as usize]
    }

    pub fn is_finite(&self) -> bool {
        let live = self.live_states();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut color = vec![0u8; self.num_states()];
        if !live[self.start as usize] {
            return true;
        }
        let mut stack: Vec<(u32, usize)> = vec![(self.start, 0)];
        color[self.start as usize] = 1;
        while let Some((s, c)) = stack.pop() {
            if c == self.num_classes() {
                color[s as usize] = 2;
                continue;
            }
            stack.push((s, c + 1));
            let t = self.next(s, c);
            if !live[t as usize] {
                continue;
            }
            match color[t as usize] {
                1 => return false,
                0 => {
                    color[t as usize] = 1;
                    stack.push((t, 0));
                }
                _ => {}
            }
        }
        true
    }

    /// Every string of a finite language, shortest first and then by code
    /// points. Fails when the language has more than `limit` strings.
    pub fn enumerate(&self, limit: usize) -> Result<Vec<String>, PatternError> {
        if !self.is_finite() {
            return Err(PatternError::LimitExceeded("language is infinite".into()));
        }
        let live = self.live_states();
        let mut memo: HashMap<u32, u128> = HashMap::new();
        let total = self.count_from(self.start, &live, &mut memo);
        if total > limit as u128 {
            return Err(PatternError::LimitExceeded(format!(
                "language has more than {limit} strings"
            )));
        }
        let mut out = Vec::new();
        let mut prefix = String::new();
        self.collect(self.start, &live, &mut prefix, &mut out);
        out.sort_by(|a, b| a.chars().count().cmp(&b.chars().count()).then_with(|| a.cmp(b)));
        Ok(out)
    }

    fn count_from(&self, s: u32, live: &[bool], memo: &mut HashMap<u32, u128>) -> u128 {
        if let Some(&v) = memo.get(&s) {
            return v;
        }
        let mut total = self.accept[s as usize] as u128;
        for c in 0..self.num_classes() {
            let t = self.next(s, c);
            if live[t as usize] {
                let sub = self.count_from(t, live, memo);
                total = total.saturating_add(sub.saturating_mul(self.class_size(c) as u128));
            }
        }
        memo.insert(s, total);
        total
    }

    fn collect(&self, s: u32, live: &[bool], prefix: &mut String, out: &mut Vec<String>) {
        if self.accept[s as usize] {
            out.push(prefix.clone());
        }
        for c in 0..self.num_classes() {
            let t = self.next(s, c);
            if !live[t as usize] {
                continue;
            }
            for i in self.bounds[c]..self.bounds[c + 1] {
                prefix.push(index_char(i));
                self.collect(t, live, prefix, out);
                prefix.pop();
            }
        }
    }

    /// A representative of class `c`, preferring printable ASCII.
    fn representative(&self, c: usize) -> char {
        let (a, b) = (self.bounds[c], self.bounds[c + 1]);
        for pref in ['a', 'A', '0', '_', ' '] {
            let i = pref as u32;
            if a <= i && i < b {
                return pref;
            }
        }
        let lo = a.max(0x21);
        if lo < b && lo <= 0x7E {
            return index_char(lo);
        }
        index_char(a)
    }

    /// Up to `limit` accepted strings in breadth-first (shortest-first)
    /// order, one representative character per class.
    pub fn witnesses(&self, limit: usize) -> Vec<String> {
        let live = self.live_states();
        let mut out = Vec::new();
        if !live[self.start as usize] {
            return out;
        }
        let mut queue = VecDeque::from([(self.start, String::new())]);
        let mut budget = 20_000usize;
        while let Some((s, w)) = queue.pop_front() {
            if self.accept[s as usize] {
                out.push(w.clone());
                if out.len() >= limit {
                    break;
                }
            }
            for c in 0..self.num_classes() {
                let t = self.next(s, c);
                if live[t as usize] && budget > 0 {
                    budget -= 1;
                    let mut w2 = w.clone();
                    w2.push(self.representative(c));
                    queue.push_back((t, w2));
                }
            }
        }
        out
    }

    /// A random accepted string, or `None` for the empty language.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, max_len: usize) -> Option<String> {
        let live = self.live_states();
        if !live[self.start as usize] {
            return None;
        }
        let mut s = self.start;
        let mut w = String::new();
        let mut steps = 0;
        loop {
            let options: Vec<usize> = (0..self.num_classes())
                .filter(|&c| live[self.next(s, c) as usize])
                .collect();
            if self.accept[s as usize] && (options.is_empty() || steps >= max_len || rng.gen_bool(0.3)) {
                return Some(w);
            }
            if options.is_empty() || steps > 4 * max_len + 16 {
                return self.witnesses(1).pop();
            }
            let c = options[rng.gen_range(0..options.len())];
            let ch = if rng.gen_bool(0.7) {
                self.representative(c)
            } else {
                index_char(rng.gen_range(self.bounds[c]..self.bounds[c + 1]))
            };
            w.push(ch);
            s = self.next(s, c);
            steps += 1;
        }
    }

    /// Characters at which some transition changes; useful for sampling.
    pub fn boundary_chars(&self) -> Vec<char> {
        let mut out = Vec::new();
        for c in 0..self.num_classes() {
            out.push(index_char(self.bounds[c]));
            out.push(self.representative(c));
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// An anchored regex denoting exactly the accepted strings, by state
    /// elimination.
    pub fn to_pattern(&self) -> Pattern {
        let live = self.live_states();
        if !live[self.start as usize] {
            return Pattern::Empty;
        }
        let states: Vec<u32> = (0..self.num_states() as u32).filter(|&s| live[s as usize]).collect();
        let n = states.len();
        let (src, dst) = (n, n + 1);
        let mut pos = vec![usize::MAX; self.num_states()];
        for (i, &s) in states.iter().enumerate() {
            pos[s as usize] = i;
        }
        let mut label: HashMap<(usize, usize), Pattern> = HashMap::new();
        label.insert((src, pos[self.start as usize]), Pattern::Epsilon);
        for (i, &s) in states.iter().enumerate() {
            if self.accept[s as usize] {
                label.insert((i, dst), Pattern::Epsilon);
            }
            let mut by_target: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
            for c in 0..self.num_classes() {
                let t = self.next(s, c);
                if live[t as usize] {
                    by_target[pos[t as usize]].push((self.bounds[c], self.bounds[c + 1] - 1));
                }
            }
            for (j, ranges) in by_target.into_iter().enumerate() {
                if !ranges.is_empty() {
                    label.insert((i, j), class_pattern(code_point_ranges(&normalize_ranges(ranges))));
                }
            }
        }
        let mut remaining: Vec<usize> = (0..n).collect();
        while !remaining.is_empty() {
            let degree = |k: usize| {
                let ins = label.keys().filter(|&&(p, q)| q == k && p != k).count();
                let outs = label.keys().filter(|&&(p, q)| p == k && q != k).count();
                ins * outs
            };
            let (idx, &k) = remaining
                .iter()
                .enumerate()
                .min_by_key(|(_, &k)| (degree(k), k))
                .unwrap();
            remaining.swap_remove(idx);
            let self_loop = label.remove(&(k, k)).map(star);
            let ins: Vec<(usize, Pattern)> = label
                .iter()
                .filter(|(&(p, q), _)| q == k && p != k)
                .map(|(&(p, _), r)| (p, r.clone()))
                .collect();
            let outs: Vec<(usize, Pattern)> = label
                .iter()
                .filter(|(&(p, q), _)| p == k && q != k)
                .map(|(&(_, q), r)| (q, r.clone()))
                .collect();
            label.retain(|&(p, q), _| p != k && q != k);
            for (p, rin) in &ins {
                for (q, rout) in &outs {
                    let mut parts = vec![rin.clone()];
                    if let Some(l) = &self_loop {
                        parts.push(l.clone());
                    }
                    parts.push(rout.clone());
                    let path = cat(parts);
                    let merged = match label.remove(&(*p, *q)) {
                        Some(old) => alt(old, path),
                        None => path,
                    };
                    label.insert((*p, *q), merged);
                }
            }
        }
        let body = label.remove(&(src, dst)).unwrap_or(Pattern::Empty);
        Pattern::concat(vec![Pattern::AnchorStart, body, Pattern::AnchorEnd])
    }
}

fn class_pattern(ranges: Vec<(u32, u32)>) -> Pattern {
    if ranges.len() == 1 && ranges[0].0 == ranges[0].1 {
        if let Some(c) = char::from_u32(ranges[0].0) {
            return Pattern::Char(c);
        }
    }
    // The surrogate block never occurs, so it may be left out of a negated form.
    let with_surrogates = normalize_ranges(
        ranges
            .iter()
            .copied()
            .chain([(SURROGATE_LO, SURROGATE_LO + SURROGATE_LEN - 1)])
            .collect(),
    );
    let excluded = super::complement_ranges(&with_surrogates);
    if excluded.len() < ranges.len() {
        Pattern::Class(CharClass::negated(excluded))
    } else {
        Pattern::Class(CharClass::new(ranges))
    }
}

fn star(p: Pattern) -> Pattern {
    match p {
        Pattern::Empty | Pattern::Epsilon => Pattern::Epsilon,
        Pattern::Star(_) => p,
        Pattern::Plus(q) | Pattern::Opt(q) => Pattern::Star(q),
        p => Pattern::Star(Box::new(p)),
    }
}

fn cat(parts: Vec<Pattern>) -> Pattern {
    let mut items = Vec::new();
    for p in parts {
        match p {
            Pattern::Empty => return Pattern::Empty,
            Pattern::Epsilon => {}
            Pattern::Concat(v) => items.extend(v),
            p => items.push(p),
        }
    }
    Pattern::concat(items)
}

fn nullable(p: &Pattern) -> bool {
    match p {
        Pattern::Epsilon | Pattern::Star(_) | Pattern::Opt(_) => true,
        Pattern::Concat(v) => v.iter().all(nullable),
        Pattern::Union(v) => v.iter().any(nullable),
        _ => false,
    }
}

fn alt(a: Pattern, b: Pattern) -> Pattern {
    let mut items = Vec::new();
    let mut has_eps = false;
    for p in [a, b] {
        match p {
            Pattern::Empty => {}
            Pattern::Epsilon => has_eps = true,
            Pattern::Union(v) => items.extend(v),
            Pattern::Opt(q) => {
                has_eps = true;
                items.push(*q);
            }
            p => items.push(p),
        }
    }
    let mut dedup: Vec<Pattern> = Vec::new();
    for p in items {
        if !dedup.contains(&p) {
            dedup.push(p);
        }
    }
    let body = Pattern::union(dedup);
    if has_eps && !nullable(&body) {
        if body == Pattern::Empty {
            return Pattern::Epsilon;
        }
        Pattern::Opt(Box::new(body))
    } else {
        body
    }
}
