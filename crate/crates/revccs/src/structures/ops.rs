//! The operation algebra on (identified) configuration structures.

use std::collections::{BTreeSet, HashSet};

use fixedbitset::FixedBitSet;

use super::{bits, Config, Event, EventId, Ident, SLabel, StructError, Structure, SyncAlgebra};

/// Largest number of product events the powerset oracle accepts.
pub const PRODUCT_ORACLE_LIMIT: usize = 12;

/// One event of the product in a parallel composition of identified
/// structures, before the final restriction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionRow {
    pub event: EventId,
    pub product_ident: Ident,
    /// The new identifier, `Ident::Bottom(k)` in the error case.
    pub ident: Ident,
    pub label: SLabel,
}

type Pair = (Option<usize>, Option<usize>);

fn fresh_atom(s: &Structure) -> u32 {
    s.events
        .iter()
        .filter_map(|e| match e.id {
            EventId::Atom(n) => Some(n),
            _ => None,
        })
        .max()
        .map_or(1, |n| n + 1)
}

fn fresh_base(s: &Structure) -> Ident {
    let n = s
        .events
        .iter()
        .filter_map(|e| match e.ident {
            Some(Ident::Base(n)) => Some(n),
            _ => None,
        })
        .max()
        .map_or(1, |n| n + 1);
    Ident::Base(n)
}

impl Structure {
    pub fn relabel(&self, f: impl Fn(&Event) -> SLabel) -> Structure {
        let mut s = self.clone();
        for e in &mut s.events {
            e.label = f(e);
        }
        s
    }

    /// Replaces identifiers; fails when two events of one configuration
    /// would share one.
    pub fn reidentify(&self, f: impl Fn(&Event) -> Ident) -> Result<Structure, StructError> {
        let mut s = self.clone();
        for e in &mut s.events {
            e.ident = Some(f(e));
        }
        s.identified = true;
        for x in s.maximal_configs() {
            let mut seen = BTreeSet::new();
            for k in x.ones() {
                let i = s.events[k].ident.clone().unwrap();
                if !seen.insert(i.clone()) {
                    return Err(StructError::Collision(i, s.config_literal(&x)));
                }
            }
        }
        Ok(s)
    }

    /// Keeps the events flagged in `keep` and the configurations made of them.
    fn keep_events(&self, keep: &[bool]) -> Structure {
        let mut kept = FixedBitSet::with_capacity(self.len());
        for (k, &b) in keep.iter().enumerate() {
            kept.set(k, b);
        }
        let remap: Vec<usize> = keep
            .iter()
            .scan(0, |n, &b| {
                let r = *n;
                if b {
                    *n += 1;
                }
                Some(r)
            })
            .collect();
        let m = kept.count_ones(..);
        let events = self.events.iter().zip(keep).filter(|(_, &b)| b).map(|(e, _)| e.clone()).collect();
        let configs =
            self.configs.iter().filter(|x| x.is_subset(&kept)).map(|x| bits(m, x.ones().map(|k| remap[k]))).collect();
        Structure { events, configs, identified: self.identified }
    }

    pub fn restrict_events(&self, a: &BTreeSet<EventId>) -> Structure {
        let keep: Vec<bool> = self.events.iter().map(|e| !a.contains(&e.id)).collect();
        self.keep_events(&keep)
    }

    pub fn restrict_labels(&self, l: &BTreeSet<SLabel>) -> Structure {
        let keep: Vec<bool> = self.events.iter().map(|e| !l.contains(&e.label)).collect();
        self.keep_events(&keep)
    }

    /// `a.I`: a fresh event below every non-empty configuration.
    pub fn prefix(&self, label: SLabel) -> Structure {
        let ident = self.identified.then(|| fresh_base(self));
        let id = EventId::Atom(fresh_atom(self));
        let n = self.len();
        let mut events = self.events.clone();
        events.push(Event { id, label, ident });
        let mut configs = vec![FixedBitSet::with_capacity(n + 1)];
        for x in &self.configs {
            let mut y = bits(n + 1, x.ones());
            y.insert(n);
            configs.push(y);
        }
        Structure::assemble(events, configs, self.identified)
    }

    /// `I ⊲ (a, i)`: a fresh event above every maximal configuration.
    pub fn postfix(&self, label: SLabel, ident: Ident) -> Result<Structure, StructError> {
        if !self.identified && !self.is_empty() {
            return Err(StructError::NotIdentified);
        }
        if self.events.iter().any(|e| e.ident.as_ref() == Some(&ident)) {
            return Err(StructError::IdentInUse(ident));
        }
        let id = EventId::Atom(fresh_atom(self));
        let n = self.len();
        let mut events = self.events.clone();
        events.push(Event { id, label, ident: Some(ident) });
        let mut configs: Vec<Config> = self.configs.iter().map(|x| bits(n + 1, x.ones())).collect();
        for x in self.maximal_configs() {
            let mut y = bits(n + 1, x.ones());
            y.insert(n);
            configs.push(y);
        }
        Ok(Structure::assemble(events, configs, true))
    }

    fn tagged_union(&self, other: &Structure, keep_tags: bool) -> Structure {
        let identified = self.identified && other.identified;
        let n1 = self.len();
        let n = n1 + other.len();
        let tag = |k: u8, e: &Event| Event {
            id: EventId::Tagged(k, Box::new(e.id.clone())),
            label: if keep_tags { SLabel::Tagged(k, Box::new(e.label.clone())) } else { e.label.clone() },
            ident: e.ident.as_ref().map(|i| if keep_tags { Ident::Tagged(k, Box::new(i.clone())) } else { i.clone() }),
        };
        let events = self.events.iter().map(|e| tag(1, e)).chain(other.events.iter().map(|e| tag(2, e))).collect();
        let configs: Vec<Config> = self
            .configs
            .iter()
            .map(|x| bits(n, x.ones()))
            .chain(other.configs.iter().map(|x| bits(n, x.ones().map(|k| k + n1))))
            .collect();
        Structure::assemble(events, configs, identified)
    }

    /// `I₁ + I₂`; branch tags are kept on events only.
    pub fn choice(&self, other: &Structure) -> Result<Structure, StructError> {
        if self.identified && other.identified {
            if let Some(i) = self.idents().intersection(&other.idents()).next() {
                return Err(StructError::IdentOverlap(i.clone()));
            }
        }
        Ok(self.tagged_union(other, false))
    }

    /// The coproduct: like choice, with branch tags on labels and identifiers.
    pub fn coproduct(&self, other: &Structure) -> Structure {
        self.tagged_union(other, true)
    }

    fn all_pairs(&self, other: &Structure) -> Vec<Pair> {
        let mut pairs: Vec<Pair> = (0..self.len()).map(|a| (Some(a), None)).collect();
        pairs.extend((0..other.len()).map(|b| (None, Some(b))));
        for a in 0..self.len() {
            for b in 0..other.len() {
                pairs.push((Some(a), Some(b)));
            }
        }
        pairs
    }

    fn pair_id(&self, other: &Structure, (a, b): Pair) -> EventId {
        EventId::pair(a.map(|a| &self.events[a].id), b.map(|b| &other.events[b].id))
    }

    /// `I₁ × I₂`.
    pub fn product(&self, other: &Structure) -> Structure {
        let pairs = self.all_pairs(other);
        let identified = self.identified && other.identified;
        let events = pairs
            .iter()
            .map(|&(a, b)| Event {
                id: self.pair_id(other, (a, b)),
                label: SLabel::pair(a.map(|a| &self.events[a].label), b.map(|b| &other.events[b].label)),
                ident: identified.then(|| {
                    Ident::pair(a.and_then(|a| self.events[a].ident.as_ref()), b.and_then(|b| other.events[b].ident.as_ref()))
                }),
            })
            .collect();
        let configs = product_closure(self, other, &pairs);
        Structure::assemble(events, configs, identified)
    }

    /// The product computed by filtering every subset of `E₁ ×⋆ E₂` through
    /// the defining conditions. `None` above [`PRODUCT_ORACLE_LIMIT`] events.
    pub fn product_by_powerset(&self, other: &Structure) -> Option<Structure> {
        let pairs = self.all_pairs(other);
        if pairs.len() > PRODUCT_ORACLE_LIMIT {
            return None;
        }
        let base = self.product(other);
        let configs = product_powerset(self, other, &pairs);
        // Same events, positions follow `pairs`; reassemble to sort them.
        Some(Structure::assemble(
            pairs
                .iter()
                .map(|&p| base.events[base.index_of(&self.pair_id(other, p)).unwrap()].clone())
                .collect(),
            configs,
            base.identified,
        ))
    }

    /// `(C₁ × C₂)[ℓ′/ℓ]↾⊥` with `ℓ′(e) = ℓ₁(e₁) • ℓ₂(e₂)`.
    pub fn parallel_compose_proc(&self, other: &Structure, alg: &SyncAlgebra) -> Structure {
        let mut pairs = Vec::new();
        let mut events = Vec::new();
        for p in self.all_pairs(other) {
            let l = alg.combine(p.0.map(|a| &self.events[a].label), p.1.map(|b| &other.events[b].label));
            if let Some(label) = l {
                events.push(Event { id: self.pair_id(other, p), label, ident: None });
                pairs.push(p);
            }
        }
        let configs = product_closure(self, other, &pairs);
        Structure::assemble(events, configs, false)
    }

    /// The full re-identification and re-labelling table of the identified
    /// parallel composition, including the events removed at the end.
    pub fn composition_table(&self, other: &Structure, alg: &SyncAlgebra) -> Result<Vec<CompositionRow>, StructError> {
        if !self.identified || !other.identified {
            return Err(StructError::NotIdentified);
        }
        let (i1, i2) = (self.idents(), other.idents());
        let mut rows = Vec::new();
        for p in self.all_pairs(other) {
            let m1 = p.0.map(|a| self.events[a].ident.clone().unwrap());
            let m2 = p.1.map(|b| other.events[b].ident.clone().unwrap());
            let k = Ident::pair(m1.as_ref(), m2.as_ref());
            let ident = match (&m1, &m2) {
                (Some(x), Some(y)) if x == y => Some(x.clone()),
                (Some(x), None) if !i2.contains(x) => Some(x.clone()),
                (None, Some(y)) if !i1.contains(y) => Some(y.clone()),
                _ => None,
            };
            let label = match ident {
                Some(_) => alg.combine(p.0.map(|a| &self.events[a].label), p.1.map(|b| &other.events[b].label)),
                None => None,
            };
            rows.push(CompositionRow {
                event: self.pair_id(other, p),
                product_ident: k.clone(),
                ident: ident.unwrap_or_else(|| Ident::Bottom(Box::new(k))),
                label: label.unwrap_or(SLabel::Bottom),
            });
        }
        Ok(rows)
    }

    /// `(I₃[m′/m₃][ℓ′/ℓ₃])↾⊥` over the product `I₃ = I₁ × I₂`.
    pub fn parallel_compose_mem(&self, other: &Structure, alg: &SyncAlgebra) -> Result<Structure, StructError> {
        let rows = self.composition_table(other, alg)?;
        let mut pairs = Vec::new();
        let mut events = Vec::new();
        for (p, row) in self.all_pairs(other).into_iter().zip(rows) {
            if row.label != SLabel::Bottom {
                events.push(Event { id: row.event, label: row.label, ident: Some(row.ident) });
                pairs.push(p);
            }
        }
        let configs = product_closure(self, other, &pairs);
        Ok(Structure::assemble(events, configs, true))
    }

    /// `x↓`: the configurations included in `x`.
    pub fn generate_below(&self, x: &Config) -> Result<Structure, StructError> {
        if !self.contains(x) {
            return Err(StructError::NotAConfig);
        }
        let keep: Vec<bool> = (0..self.len()).map(|k| x.contains(k)).collect();
        Ok(self.keep_events(&keep))
    }

    pub fn forget(&self) -> Structure {
        Structure::assemble(self.events.clone(), self.configs.iter().cloned(), false)
    }

    /// Numbers the events `1..=n` following `order`.
    pub fn enrich(&self, order: &[EventId]) -> Result<Structure, StructError> {
        let mut pos = vec![None; self.len()];
        for (n, id) in order.iter().enumerate() {
            let k = self.index_of(id).ok_or(StructError::BadOrder)?;
            if pos[k].replace(n as u32 + 1).is_some() {
                return Err(StructError::BadOrder);
            }
        }
        if pos.iter().any(Option::is_none) {
            return Err(StructError::BadOrder);
        }
        let mut s = self.clone();
        for (e, p) in s.events.iter_mut().zip(pos) {
            e.ident = Some(Ident::Base(p.unwrap()));
        }
        s.identified = true;
        Ok(s)
    }

    /// Enrichment along the event order of the structure.
    pub fn enrich_trivially(&self) -> Structure {
        let order: Vec<EventId> = self.events.iter().map(|e| e.id.clone()).collect();
        self.enrich(&order).expect("event order is total")
    }
}

/// Projections of a set of product events, or `None` when the set is not
/// injective on either side.
fn projections(n1: usize, n2: usize, pairs: &[Pair], x: &Config) -> Option<(Config, Config)> {
    let (mut g1, mut g2) = (FixedBitSet::with_capacity(n1), FixedBitSet::with_capacity(n2));
    for k in x.ones() {
        let (a, b) = pairs[k];
        if let Some(a) = a {
            if g1.put(a) {
                return None;
            }
        }
        if let Some(b) = b {
            if g2.put(b) {
                return None;
            }
        }
    }
    Some((g1, g2))
}

/// Product configurations over the events `pairs`, generated by single-event
/// extension from the empty set.
fn product_closure(s1: &Structure, s2: &Structure, pairs: &[Pair]) -> Vec<Config> {
    let m = pairs.len();
    let start = FixedBitSet::with_capacity(m);
    let mut seen: HashSet<Config> = HashSet::from([start.clone()]);
    let mut stack = vec![(start, s1.empty_config(), s2.empty_config())];
    while let Some((x, g1, g2)) = stack.pop() {
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if x.contains(k) || a.is_some_and(|a| g1.contains(a)) || b.is_some_and(|b| g2.contains(b)) {
                continue;
            }
            let mut y = x.clone();
            y.insert(k);
            if seen.contains(&y) {
                continue;
            }
            let (mut h1, mut h2) = (g1.clone(), g2.clone());
            if let Some(a) = a {
                h1.insert(a);
                if !s1.contains(&h1) {
                    continue;
                }
            }
            if let Some(b) = b {
                h2.insert(b);
                if !s2.contains(&h2) {
                    continue;
                }
            }
            seen.insert(y.clone());
            stack.push((y, h1, h2));
        }
    }
    seen.into_iter().collect()
}

/// Literal reading of the product conditions over all subsets: both
/// projections are configurations, projections are injective, and any two
/// distinct events are separated by a subset whose projections are both
/// configurations.
fn product_powerset(s1: &Structure, s2: &Structure, pairs: &[Pair]) -> Vec<Config> {
    let m = pairs.len();
    let (n1, n2) = (s1.len(), s2.len());
    let ok = |z: &Config| projections(n1, n2, pairs, z).is_some_and(|(g1, g2)| s1.contains(&g1) && s2.contains(&g2));
    let mut out = Vec::new();
    for mask in 0u32..(1 << m) {
        let x = bits(m, (0..m).filter(|k| mask >> k & 1 == 1));
        if !ok(&x) {
            continue;
        }
        let members: Vec<usize> = x.ones().collect();
        let subs: Vec<Config> = (0u32..(1 << members.len()))
            .map(|sm| bits(m, members.iter().enumerate().filter(|(i, _)| sm >> i & 1 == 1).map(|(_, &k)| k)))
            .filter(|z| ok(z))
            .collect();
        let separated = members.iter().enumerate().all(|(i, &d)| {
            members[i + 1..].iter().all(|&e| subs.iter().any(|z| z.contains(d) != z.contains(e)))
        });
        if separated {
            out.push(x);
        }
    }
    out
}
