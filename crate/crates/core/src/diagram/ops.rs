//! Composition, products, substitution, encapsulation and flattening.

use std::collections::{BTreeMap, BTreeSet};

use super::{
    compatible, AnyOrder, Block, BoxContent, BoxId, DiagramError, PortOrder, Source, Target,
    Wire, WiringDiagram,
};

/// Copy `src`'s boxes into `dst` under fresh ids, returning the id map.
fn splice_boxes(dst: &mut WiringDiagram, src: &WiringDiagram) -> BTreeMap<BoxId, BoxId> {
    let first = dst.next_box_id().0;
    let mut map = BTreeMap::new();
    for (k, (id, block)) in (first..).zip(&src.boxes) {
        let fresh = BoxId(k);
        dst.boxes.insert(fresh, block.clone());
        map.insert(*id, fresh);
    }
    map
}

fn map_source(s: Source, map: &BTreeMap<BoxId, BoxId>) -> Source {
    match s {
        Source::BoxOut(b, j) => Source::BoxOut(map[&b], j),
        s => s,
    }
}

fn map_target(t: Target, map: &BTreeMap<BoxId, BoxId>) -> Target {
    match t {
        Target::BoxIn(b, i) => Target::BoxIn(map[&b], i),
        t => t,
    }
}

fn incoming_or_err(d: &WiringDiagram, tgt: Target) -> Result<Source, DiagramError> {
    d.source_of(tgt)
        .ok_or_else(|| DiagramError::Invalid(format!("{tgt:?} is not wired")))
}

/// Sequential composite: first `f`, then `g`.
pub fn compose(
    f: &WiringDiagram,
    g: &WiringDiagram,
    order: &dyn PortOrder,
) -> Result<WiringDiagram, DiagramError> {
    if f.outputs.len() != g.inputs.len() {
        return Err(DiagramError::ArityMismatch {
            expected: g.inputs.len(),
            found: f.outputs.len(),
        });
    }
    for (index, (s, t)) in f.outputs.iter().zip(&g.inputs).enumerate() {
        if !compatible(order, s, t) {
            return Err(DiagramError::TypeMismatch {
                index,
                source_type: s.clone(),
                target_type: t.clone(),
            });
        }
    }
    let joined: Vec<Source> = (0..f.outputs.len())
        .map(|k| incoming_or_err(f, Target::OuterOut(k)))
        .collect::<Result<_, _>>()?;

    let mut out = WiringDiagram::new(f.inputs.clone(), g.outputs.clone());
    out.boxes = f.boxes.clone();
    out.elements = f.elements.clone();
    let map = splice_boxes(&mut out, g);
    for w in &f.wires {
        if !matches!(w.tgt, Target::OuterOut(_)) {
            out.wires.insert(*w);
        }
    }
    let glue = |s: Source| match s {
        Source::OuterIn(k) => joined[k],
        s => map_source(s, &map),
    };
    for w in &g.wires {
        out.wires.insert(Wire::new(glue(w.src), map_target(w.tgt, &map)));
    }
    for (s, e) in &g.elements {
        out.elements.entry(glue(*s)).or_insert_with(|| e.clone());
    }
    Ok(out)
}

/// Parallel juxtaposition of `f` and `g`.
pub fn product(f: &WiringDiagram, g: &WiringDiagram) -> WiringDiagram {
    let mut inputs = f.inputs.clone();
    inputs.extend(g.inputs.iter().cloned());
    let mut outputs = f.outputs.clone();
    outputs.extend(g.outputs.iter().cloned());
    let (ni, no) = (f.inputs.len(), f.outputs.len());

    let mut out = WiringDiagram::new(inputs, outputs);
    out.boxes = f.boxes.clone();
    out.wires = f.wires.clone();
    out.elements = f.elements.clone();
    let map = splice_boxes(&mut out, g);
    let shift_src = |s: Source| match s {
        Source::OuterIn(k) => Source::OuterIn(k + ni),
        s => map_source(s, &map),
    };
    for w in &g.wires {
        let tgt = match w.tgt {
            Target::OuterOut(k) => Target::OuterOut(k + no),
            t => map_target(t, &map),
        };
        out.wires.insert(Wire::new(shift_src(w.src), tgt));
    }
    for (s, e) in &g.elements {
        out.elements.insert(shift_src(*s), e.clone());
    }
    out
}

/// Replace box `id` of `d` by the diagram `replacement`.
///
/// Element values on the replaced box's outputs move to the replacement
/// endpoints that now feed the same targets.
pub fn substitute(
    d: &WiringDiagram,
    id: BoxId,
    replacement: &WiringDiagram,
    order: &dyn PortOrder,
) -> Result<WiringDiagram, DiagramError> {
    let block = d.boxes.get(&id).ok_or(DiagramError::UnknownBox(id))?;
    if block.inputs.len() != replacement.inputs.len() {
        return Err(DiagramError::ArityMismatch {
            expected: block.inputs.len(),
            found: replacement.inputs.len(),
        });
    }
    if block.outputs.len() != replacement.outputs.len() {
        return Err(DiagramError::ArityMismatch {
            expected: block.outputs.len(),
            found: replacement.outputs.len(),
        });
    }
    let feeds: Vec<Source> = (0..block.inputs.len())
        .map(|i| incoming_or_err(d, Target::BoxIn(id, i)))
        .collect::<Result<_, _>>()?;
    for (index, s) in feeds.iter().enumerate() {
        let s_ty = d.source_type(*s).expect("wired source exists");
        let t_ty = &replacement.inputs[index];
        if !compatible(order, s_ty, t_ty) {
            return Err(DiagramError::TypeMismatch {
                index,
                source_type: s_ty.clone(),
                target_type: t_ty.clone(),
            });
        }
    }

    let mut out = WiringDiagram::new(d.inputs.clone(), d.outputs.clone());
    out.boxes = d.boxes.clone();
    out.boxes.remove(&id);
    let map = splice_boxes(&mut out, replacement);
    let inner = |s: Source| match s {
        Source::OuterIn(i) => feeds[i],
        s => map_source(s, &map),
    };
    let exits: Vec<Source> = (0..replacement.outputs.len())
        .map(|j| incoming_or_err(replacement, Target::OuterOut(j)).map(inner))
        .collect::<Result<_, _>>()?;

    for w in &d.wires {
        if matches!(w.tgt, Target::BoxIn(b, _) if b == id) {
            continue;
        }
        let src = match w.src {
            Source::BoxOut(b, j) if b == id => exits[j],
            s => s,
        };
        out.wires.insert(Wire::new(src, w.tgt));
    }
    for w in &replacement.wires {
        if let Target::OuterOut(_) = w.tgt {
            continue;
        }
        out.wires.insert(Wire::new(inner(w.src), map_target(w.tgt, &map)));
    }

    for (s, e) in &d.elements {
        if !matches!(s, Source::BoxOut(b, _) if *b == id) {
            out.elements.insert(*s, e.clone());
        }
    }
    for (s, e) in &replacement.elements {
        out.elements.entry(inner(*s)).or_insert_with(|| e.clone());
    }
    for (s, e) in &d.elements {
        if let Source::BoxOut(b, j) = s {
            if *b == id {
                let to = exits[*j];
                match to {
                    Source::BoxOut(nb, _) if map.values().any(|v| *v == nb) => {
                        out.elements.insert(to, e.clone());
                    }
                    _ => {
                        out.elements.entry(to).or_insert_with(|| e.clone());
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Box-level successor sets induced by wires.
fn successors(d: &WiringDiagram) -> BTreeMap<BoxId, BTreeSet<BoxId>> {
    let mut succ: BTreeMap<BoxId, BTreeSet<BoxId>> =
        d.boxes.keys().map(|b| (*b, BTreeSet::new())).collect();
    for w in &d.wires {
        if let (Source::BoxOut(a, _), Target::BoxIn(b, _)) = (w.src, w.tgt) {
            succ.entry(a).or_default().insert(b);
        }
    }
    succ
}

/// Kahn's algorithm with ties broken by smallest box id.
pub fn topological_order(d: &WiringDiagram) -> Result<Vec<BoxId>, DiagramError> {
    let succ = successors(d);
    let mut indeg: BTreeMap<BoxId, usize> = d.boxes.keys().map(|b| (*b, 0)).collect();
    for targets in succ.values() {
        for b in targets {
            *indeg.get_mut(b).ok_or(DiagramError::UnknownBox(*b))? += 1;
        }
    }
    let mut ready: BTreeSet<BoxId> = indeg
        .iter()
        .filter(|(_, n)| **n == 0)
        .map(|(b, _)| *b)
        .collect();
    let mut order = Vec::with_capacity(d.boxes.len());
    while let Some(b) = ready.pop_first() {
        order.push(b);
        for s in &succ[&b] {
            let n = indeg.get_mut(s).expect("known box");
            *n -= 1;
            if *n == 0 {
                ready.insert(*s);
            }
        }
    }
    if order.len() != d.boxes.len() {
        return Err(DiagramError::Cycle);
    }
    Ok(order)
}

/// True when no path leaves `set` and comes back.
pub(crate) fn is_convex(d: &WiringDiagram, set: &BTreeSet<BoxId>) -> bool {
    let succ = successors(d);
    let mut stack: Vec<BoxId> = set
        .iter()
        .flat_map(|b| succ[b].iter().copied())
        .filter(|b| !set.contains(b))
        .collect();
    let mut seen: BTreeSet<BoxId> = stack.iter().copied().collect();
    while let Some(b) = stack.pop() {
        for n in &succ[&b] {
            if set.contains(n) {
                return false;
            }
            if seen.insert(*n) {
                stack.push(*n);
            }
        }
    }
    true
}

/// Replace a convex set of boxes by one unlabeled atomic box.
///
/// The new box has one input per distinct outside source feeding the set and
/// one output per inside source read from outside. Inputs are ordered by the
/// topological rank of the source box (outer inputs first) then port index;
/// outputs by the earliest outside consumer (outer outputs last) likewise.
pub fn encapsulate(
    d: &WiringDiagram,
    set: &BTreeSet<BoxId>,
) -> Result<WiringDiagram, DiagramError> {
    encapsulate_as(d, set).map(|(out, _)| out)
}

/// [`encapsulate`], also returning the id of the new box.
pub(crate) fn encapsulate_as(
    d: &WiringDiagram,
    set: &BTreeSet<BoxId>,
) -> Result<(WiringDiagram, BoxId), DiagramError> {
    if set.is_empty() {
        return Err(DiagramError::EmptySubset);
    }
    if let Some(b) = set.iter().find(|b| !d.boxes.contains_key(b)) {
        return Err(DiagramError::UnknownBox(*b));
    }
    if set.len() == 1 {
        let only = *set.first().expect("nonempty");
        if d.boxes[&only].is_blank() {
            return Ok((d.clone(), only));
        }
    }
    if !is_convex(d, set) {
        return Err(DiagramError::NonConvexSubset);
    }
    let rank: BTreeMap<BoxId, usize> = topological_order(d)?
        .into_iter()
        .enumerate()
        .map(|(i, b)| (b, i))
        .collect();
    let inside_src = |s: &Source| matches!(s, Source::BoxOut(b, _) if set.contains(b));
    let inside_tgt = |t: &Target| matches!(t, Target::BoxIn(b, _) if set.contains(b));

    let mut in_keys: BTreeMap<Source, (usize, usize, usize)> = BTreeMap::new();
    let mut out_keys: BTreeMap<Source, (usize, usize, usize)> = BTreeMap::new();
    for w in &d.wires {
        match (inside_src(&w.src), inside_tgt(&w.tgt)) {
            (false, true) => {
                let key = match w.src {
                    Source::OuterIn(k) => (0, 0, k),
                    Source::BoxOut(b, j) => (1, rank[&b], j),
                };
                in_keys.insert(w.src, key);
            }
            (true, false) => {
                let key = match w.tgt {
                    Target::BoxIn(b, i) => (0, rank[&b], i),
                    Target::OuterOut(k) => (1, 0, k),
                };
                let e = out_keys.entry(w.src).or_insert(key);
                *e = (*e).min(key);
            }
            _ => {}
        }
    }
    let sorted = |keys: BTreeMap<Source, (usize, usize, usize)>| {
        let mut v: Vec<(Source, (usize, usize, usize))> = keys.into_iter().collect();
        v.sort_by_key(|(_, k)| *k);
        v.into_iter().map(|(s, _)| s).collect::<Vec<_>>()
    };
    let ins = sorted(in_keys);
    let outs = sorted(out_keys);
    let in_index: BTreeMap<Source, usize> = ins.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let out_index: BTreeMap<Source, usize> =
        outs.iter().enumerate().map(|(i, s)| (*s, i)).collect();

    let block = Block::unlabeled(
        ins.iter().map(|s| d.source_type(*s).cloned().expect("wired")).collect(),
        outs.iter().map(|s| d.source_type(*s).cloned().expect("wired")).collect(),
    );
    let mut out = WiringDiagram::new(d.inputs.clone(), d.outputs.clone());
    out.boxes = d.boxes.clone();
    for b in set {
        out.boxes.remove(b);
    }
    let new_id = out.next_box_id().max(d.next_box_id());
    out.boxes.insert(new_id, block);

    for w in &d.wires {
        match (inside_src(&w.src), inside_tgt(&w.tgt)) {
            (false, false) => {
                out.wires.insert(*w);
            }
            (false, true) => {
                out.wires
                    .insert(Wire::new(w.src, Target::BoxIn(new_id, in_index[&w.src])));
            }
            (true, false) => {
                out.wires
                    .insert(Wire::new(Source::BoxOut(new_id, out_index[&w.src]), w.tgt));
            }
            (true, true) => {}
        }
    }
    for (s, e) in &d.elements {
        if inside_src(s) {
            if let Some(j) = out_index.get(s) {
                out.elements.insert(Source::BoxOut(new_id, *j), e.clone());
            }
        } else {
            out.elements.insert(*s, e.clone());
        }
    }
    Ok((out, new_id))
}

/// Inline every nested box, recursively.
pub fn flatten(d: &WiringDiagram) -> WiringDiagram {
    let mut out = d.clone();
    let nested: Vec<BoxId> = d
        .boxes
        .iter()
        .filter(|(_, b)| !b.is_atomic())
        .map(|(id, _)| *id)
        .collect();
    for id in nested {
        let inner = match &out.boxes[&id].content {
            BoxContent::Nested { inner, .. } => flatten(inner),
            BoxContent::Atomic { .. } => unreachable!("filtered"),
        };
        out = substitute(&out, id, &inner, &AnyOrder)
            .expect("nested box ports match its inner diagram");
    }
    out
}
