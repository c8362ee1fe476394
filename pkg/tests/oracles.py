"""Definition-literal evaluators used as oracles by the logic tests.

Everything here recomputes semantics by direct enumeration: no caching, no
snapshot bucketing, no reuse of the library's search logic. Kernel data
classes are used only as containers.
"""
from __future__ import annotations

import random
from itertools import product

from bsm.formulas import (
    And,
    Atom,
    Box,
    DirStar,
    DirWand,
    DisjStar,
    Not,
    Star,
    Top,
    Wand,
    in_language,
)
from bsm.kernel import System, pair_label


def snapshot_dict(system: System, behaviour: str) -> dict[str, str]:
    return {c: system.local_value(behaviour, c) for c in system.component_names}


def compatible_oracle(f: System, x: str, g: System, y: str) -> bool:
    shared = set(f.component_names) & set(g.component_names)
    fx, gy = snapshot_dict(f, x), snapshot_dict(g, y)
    return all(fx[c] == gy[c] for c in shared)


def input_components_oracle(system: System, names) -> bool:
    names = sorted(set(names))
    if not names:
        return bool(system.behaviours)
    pools = [system.component(n).behaviours for n in names]
    realized = {
        tuple(system.local_value(x, n) for n in names) for x in system.behaviours
    }
    return all(combo in realized for combo in product(*pools))


def joint_system_oracle(f: System, g: System) -> System:
    """Free composition built by direct pair enumeration."""
    merged = {c.name: c for c in f.components}
    for c in g.components:
        merged.setdefault(c.name, c)
    comps = tuple(sorted(merged.values(), key=lambda c: c.name))
    behaviours = []
    assignments = []
    for a in f.behaviours:
        for b in g.behaviours:
            if not compatible_oracle(f, a, g, b):
                continue
            behaviours.append(pair_label(a, b))
            joint = {**snapshot_dict(g, b), **snapshot_dict(f, a)}
            assignments.append(
                tuple(sorted((c.name, joint[c.name]) for c in comps))
            )
    from bsm.kernel import Snapshot

    return System(
        f"{f.name}|{g.name}",
        comps,
        tuple(behaviours),
        tuple(Snapshot(a) for a in assignments),
    )


def equivalent_oracle(f: System, g: System) -> bool:
    if [(c.name, c.behaviours) for c in f.components] != [
        (c.name, c.behaviours) for c in g.components
    ]:
        return False
    images = [
        {tuple(sorted(snapshot_dict(s, x).items())) for x in s.behaviours}
        for s in (f, g)
    ]
    return images[0] == images[1]


def decompose_oracle(f, x, f1, x1, f2, x2) -> bool:
    """Literal decomposition relation, via the independent joint system."""
    if {c.name: c for c in f1.components} | {c.name: c for c in f2.components} != {
        c.name: c for c in f.components
    }:
        return False
    for c in set(f1.component_names) & set(f2.component_names):
        if f1.component(c) != f2.component(c):
            return False
    if not equivalent_oracle(f, joint_system_oracle(f1, f2)):
        return False
    for part, part_x in ((f1, x1), (f2, x2)):
        for c in part.component_names:
            if snapshot_dict(f, x)[c] != part.local_value(part_x, c):
                return False
    return True


def naive_satisfies(f, valuation, x, formula, universe=None) -> bool:
    """Recursive evaluation straight off the defining clauses."""
    if isinstance(formula, Atom):
        labels = valuation.labels_for(formula.component, formula.name)
        return f.local_value(x, formula.component) in labels
    if isinstance(formula, Top):
        return True
    if isinstance(formula, Not):
        return not naive_satisfies(f, valuation, x, formula.body, universe)
    if isinstance(formula, And):
        return naive_satisfies(
            f, valuation, x, formula.left, universe
        ) and naive_satisfies(f, valuation, x, formula.right, universe)
    if isinstance(formula, Box):
        return all(
            naive_satisfies(f, valuation, y, formula.body, universe)
            for y in f.behaviours
        )
    if isinstance(formula, (Star, DirStar, DisjStar)):
        for f1 in universe:
            if not in_language(formula.left, f1.component_names):
                continue
            for f2 in universe:
                if not in_language(formula.right, f2.component_names):
                    continue
                shared = set(f1.component_names) & set(f2.component_names)
                if isinstance(formula, DisjStar) and shared:
                    continue
                if isinstance(formula, DirStar) and not input_components_oracle(
                    f2, shared
                ):
                    continue
                for x1 in f1.behaviours:
                    for x2 in f2.behaviours:
                        if not decompose_oracle(f, x, f1, x1, f2, x2):
                            continue
                        if naive_satisfies(
                            f1, valuation, x1, formula.left, universe
                        ) and naive_satisfies(
                            f2, valuation, x2, formula.right, universe
                        ):
                            return True
        return False
    if isinstance(formula, (Wand, DirWand)):
        for g in universe:
            shared = set(f.component_names) & set(g.component_names)
            if isinstance(formula, DirWand) and not input_components_oracle(g, shared):
                continue
            if not in_language(formula.left, g.component_names):
                continue
            joint_names = set(f.component_names) | set(g.component_names)
            right_ok = in_language(formula.right, joint_names)
            joint = None
            for y in g.behaviours:
                if not naive_satisfies(g, valuation, y, formula.left, universe):
                    continue
                if not compatible_oracle(f, x, g, y):
                    continue
                if not right_ok:
                    return False
                if joint is None:
                    joint = joint_system_oracle(f, g)
                if not naive_satisfies(
                    joint, valuation, pair_label(x, y), formula.right, universe
                ):
                    return False
        return True
    raise AssertionError(f"unhandled node {formula!r}")


def naive_valid(f, valuation, formula, universe=None) -> bool:
    return all(naive_satisfies(f, valuation, x, formula, universe) for x in f.behaviours)


# ------------------------------------------------------------- formula zoo

def rand_formula(rng: random.Random, atom_pool, depth: int, structural: bool = False):
    """Random formula tree over the given (component, variable) pool."""
    if depth <= 0 or rng.random() < 0.25:
        if atom_pool and rng.random() < 0.85:
            comp, var = rng.choice(atom_pool)
            return Atom(comp, var)
        return Top()
    kinds = ["not", "and", "and", "box"]
    if structural:
        kinds += ["star", "dirstar", "disjstar", "wand", "dirwand"]
    kind = rng.choice(kinds)
    sub = lambda: rand_formula(rng, atom_pool, depth - 1, structural)
    if kind == "not":
        return Not(sub())
    if kind == "box":
        return Box(sub())
    node = {
        "and": And,
        "star": Star,
        "dirstar": DirStar,
        "disjstar": DisjStar,
        "wand": Wand,
        "dirwand": DirWand,
    }[kind]
    return node(sub(), sub())


# ------------------------------------------------- formula-agreement oracle

def _closure_masks(f: System, g: System, valuation, with_box: bool):
    """All (bitmask over f, bitmask over g) pairs denotable by formulas.

    Masks are built from the atom denotations and closed under complement,
    intersection, and (optionally) the universal modality applied to both
    sides at once; that is exactly the formula algebra, so the fixpoint
    decides agreement on all formulas of the fragment.
    """
    nf, ng = len(f.behaviours), len(g.behaviours)
    full_f, full_g = (1 << nf) - 1, (1 << ng) - 1

    def mask(system, full, predicate):
        out = 0
        for i, x in enumerate(system.behaviours):
            if predicate(system, x):
                out |= 1 << i
        return out

    seeds = {(full_f, full_g)}
    names = sorted(set(f.component_names))
    for c in names:
        for var in valuation.variables_for(c):
            labels = valuation.labels_for(c, var)
            seeds.add(
                (
                    mask(f, full_f, lambda s, x: s.local_value(x, c) in labels),
                    mask(g, full_g, lambda s, x: s.local_value(x, c) in labels),
                )
            )
    known = set(seeds)
    frontier = list(seeds)
    while frontier:
        fresh = set()
        for mf, mg in frontier:
            candidates = [((~mf) & full_f, (~mg) & full_g)]
            if with_box:
                candidates.append(
                    (
                        full_f if mf == full_f else 0,
                        full_g if mg == full_g else 0,
                    )
                )
            for of, og in known:
                candidates.append((mf & of, mg & og))
            for cand in candidates:
                if cand not in known and cand not in fresh:
                    fresh.add(cand)
        known |= fresh
        frontier = list(fresh)
    return known


def hm_agreement_oracle(
    f: System, g: System, x: str, y: str, valuation, with_box: bool
) -> bool:
    """Do x and y agree on every formula of the fragment? Decided exactly,
    by saturating the denotable-set algebra."""
    ix = f.behaviours.index(x)
    iy = g.behaviours.index(y)
    for mf, mg in _closure_masks(f, g, valuation, with_box):
        if bool(mf & (1 << ix)) != bool(mg & (1 << iy)):
            return False
    return True
