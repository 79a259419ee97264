//! Isomorphism search between finite structures.

use std::collections::{BTreeMap, HashMap};

use super::{Config, EventId, Ident, SLabel, Structure};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IsoOptions {
    /// Labels must be preserved verbatim.
    pub fix_labels: bool,
    /// Identifiers must be preserved verbatim (identified structures only).
    pub fix_idents: bool,
}

/// An isomorphism: `index[k]` is the image of event `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructIso {
    pub index: Vec<usize>,
    pub labels: BTreeMap<SLabel, SLabel>,
    pub idents: BTreeMap<Ident, Ident>,
}

impl StructIso {
    pub fn apply(&self, x: &Config, target_len: usize) -> Config {
        super::bits(target_len, x.ones().map(|k| self.index[k]))
    }

    pub fn event_pairs(&self, s1: &Structure, s2: &Structure) -> Vec<(EventId, EventId)> {
        self.index.iter().enumerate().map(|(k, &j)| (s1.event(k).id.clone(), s2.event(j).id.clone())).collect()
    }
}

pub fn iso_search(s1: &Structure, s2: &Structure, fix_labels: bool) -> Option<StructIso> {
    iso_search_with(s1, s2, IsoOptions { fix_labels, fix_idents: false })
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
struct Signature {
    depth: usize,
    occurrences: usize,
    label_class: usize,
    ident_class: usize,
    label: Option<SLabel>,
    ident: Option<Ident>,
}

fn signatures(s: &Structure, opts: IsoOptions) -> Vec<Signature> {
    let n = s.len();
    let mut depth = vec![usize::MAX; n];
    let mut occurrences = vec![0; n];
    for x in s.configs() {
        let size = x.count_ones(..);
        for k in x.ones() {
            occurrences[k] += 1;
            depth[k] = depth[k].min(size);
        }
    }
    let mut label_count: HashMap<&SLabel, usize> = HashMap::new();
    let mut ident_count: HashMap<Option<&Ident>, usize> = HashMap::new();
    for e in s.events() {
        *label_count.entry(&e.label).or_default() += 1;
        *ident_count.entry(e.ident.as_ref()).or_default() += 1;
    }
    (0..n)
        .map(|k| {
            let e = s.event(k);
            Signature {
                depth: depth[k],
                occurrences: occurrences[k],
                label_class: label_count[&e.label],
                ident_class: ident_count[&e.ident.as_ref()],
                label: opts.fix_labels.then(|| e.label.clone()),
                ident: opts.fix_idents.then(|| e.ident.clone()).flatten(),
            }
        })
        .collect()
}

struct Search<'a> {
    s1: &'a Structure,
    s2: &'a Structure,
    opts: IsoOptions,
    use_idents: bool,
    order: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    /// Configurations of `s1` grouped by the search step completing them.
    due: Vec<Vec<Config>>,
    map: Vec<usize>,
    used: Vec<bool>,
    labels: BTreeMap<SLabel, SLabel>,
    labels_back: BTreeMap<SLabel, SLabel>,
    idents: BTreeMap<Ident, Ident>,
    idents_back: BTreeMap<Ident, Ident>,
}

impl Search<'_> {
    fn bind<K: Ord + Clone>(
        fwd: &mut BTreeMap<K, K>,
        back: &mut BTreeMap<K, K>,
        a: &K,
        b: &K,
    ) -> Option<bool> {
        match (fwd.get(a), back.get(b)) {
            (Some(x), _) if x != b => None,
            (_, Some(y)) if y != a => None,
            (Some(_), _) => Some(false),
            _ => {
                fwd.insert(a.clone(), b.clone());
                back.insert(b.clone(), a.clone());
                Some(true)
            }
        }
    }

    fn run(&mut self, step: usize) -> bool {
        if step == self.order.len() {
            return true;
        }
        let e1 = self.order[step];
        for c in 0..self.candidates[step].len() {
            let e2 = self.candidates[step][c];
            if self.used[e2] {
                continue;
            }
            let (l1, l2) = (self.s1.label_of(e1).clone(), self.s2.label_of(e2).clone());
            let new_label = if self.opts.fix_labels {
                if l1 != l2 {
                    continue;
                }
                false
            } else {
                match Self::bind(&mut self.labels, &mut self.labels_back, &l1, &l2) {
                    Some(b) => b,
                    None => continue,
                }
            };
            let mut new_ident = false;
            let mut ident_pair = None;
            if self.use_idents {
                let (i1, i2) = (self.s1.ident_of(e1).unwrap().clone(), self.s2.ident_of(e2).unwrap().clone());
                if self.opts.fix_idents && i1 != i2 {
                    if new_label {
                        self.labels.remove(&l1);
                        self.labels_back.remove(&l2);
                    }
                    continue;
                }
                match Self::bind(&mut self.idents, &mut self.idents_back, &i1, &i2) {
                    Some(b) => new_ident = b,
                    None => {
                        if new_label {
                            self.labels.remove(&l1);
                            self.labels_back.remove(&l2);
                        }
                        continue;
                    }
                }
                ident_pair = Some((i1, i2));
            }
            self.map[e1] = e2;
            self.used[e2] = true;
            let n2 = self.s2.len();
            let consistent = self.due[step].iter().all(|x| self.s2.contains(&super::bits(n2, x.ones().map(|k| self.map[k]))));
            if consistent && self.run(step + 1) {
                return true;
            }
            self.used[e2] = false;
            if new_label {
                self.labels.remove(&l1);
                self.labels_back.remove(&l2);
            }
            if new_ident {
                let (i1, i2) = ident_pair.unwrap();
                self.idents.remove(&i1);
                self.idents_back.remove(&i2);
            }
        }
        false
    }
}

/// Backtracking search for an isomorphism. Events of `s1` are tried in order
/// of causal depth, candidates in index order, so the witness is
/// reproducible.
pub fn iso_search_with(s1: &Structure, s2: &Structure, opts: IsoOptions) -> Option<StructIso> {
    if s1.len() != s2.len() || s1.config_count() != s2.config_count() || s1.is_identified() != s2.is_identified() {
        return None;
    }
    let sizes = |s: &Structure| {
        let mut v: Vec<usize> = s.configs().map(|x| x.count_ones(..)).collect();
        v.sort_unstable();
        v
    };
    if sizes(s1) != sizes(s2) {
        return None;
    }
    let (sig1, sig2) = (signatures(s1, opts), signatures(s2, opts));
    let mut sorted1 = sig1.clone();
    let mut sorted2 = sig2.clone();
    sorted1.sort();
    sorted2.sort();
    if sorted1 != sorted2 {
        return None;
    }
    let mut order: Vec<usize> = (0..s1.len()).collect();
    order.sort_by_key(|&k| (sig1[k].depth, k));
    let mut step_of = vec![0; s1.len()];
    for (step, &k) in order.iter().enumerate() {
        step_of[k] = step;
    }
    let mut due = vec![Vec::new(); s1.len()];
    for x in s1.configs() {
        if let Some(last) = x.ones().map(|k| step_of[k]).max() {
            due[last].push(x.clone());
        }
    }
    let candidates = order.iter().map(|&k| (0..s2.len()).filter(|&j| sig2[j] == sig1[k]).collect()).collect();
    let mut search = Search {
        s1,
        s2,
        opts,
        use_idents: s1.is_identified(),
        order,
        candidates,
        due,
        map: vec![usize::MAX; s1.len()],
        used: vec![false; s2.len()],
        labels: BTreeMap::new(),
        labels_back: BTreeMap::new(),
        idents: BTreeMap::new(),
        idents_back: BTreeMap::new(),
    };
    if !search.run(0) {
        return None;
    }
    let mut labels = search.labels;
    let mut idents = search.idents;
    for k in 0..s1.len() {
        let j = search.map[k];
        labels.insert(s1.label_of(k).clone(), s2.label_of(j).clone());
        if let (Some(a), Some(b)) = (s1.ident_of(k), s2.ident_of(j)) {
            idents.insert(a.clone(), b.clone());
        }
    }
    Some(StructIso { index: search.map, labels, idents })
}
