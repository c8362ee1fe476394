"""Walkthrough: guarantee families and the consistency/availability/
partition-tolerance trade-off.

A two-user register is seen through one view per user. Guarantees are
predicates on the subsets of behaviours an implementation can realize;
the exhaustive verifier searches every non-empty subset for one satisfying
all three groups at once. On this tiny register a subset survives, and the
verifier names which guarantee defeats each failing subset.

Run: python3 demos/03_guarantee_tradeoffs.py
"""
from bsm import (
    BehaviourRelation,
    CapInstance,
    Component,
    Conjunction,
    Consistency,
    ImplementationMap,
    PartitionTolerance,
    Snapshot,
    StrongAvailability,
    System,
    WeakAvailability,
    cap_verify_exhaustive,
    guarantee_satisfied,
    is_entangled,
)


def main():
    u1 = Component("u1", ("l", "r"))
    u2 = Component("u2", ("l", "r"))
    toy = System.from_table(
        "toy", [u1, u2],
        {"x": {"u1": "l", "u2": "l"}, "y": {"u1": "r", "u2": "r"}},
    )
    v1 = System.from_table("v1", [u1], {"l": {"u1": "l"}, "r": {"u1": "r"}})
    v2 = System.from_table("v2", [u2], {"l": {"u2": "l"}, "r": {"u2": "r"}})
    sigma1 = ImplementationMap(toy, v1, (("x", "l"), ("y", "r")))
    sigma2 = ImplementationMap(toy, v2, (("x", "l"), ("y", "r")))
    print("== a two-user register ==")
    print(f"  behaviours: {toy.behaviours} (both users always agree)")

    empty = BehaviourRelation(toy, frozenset())
    guarantees = {
        "consistency": Consistency(toy, frozenset({"x", "y"})),
        "strong availability": StrongAvailability(empty),
        "weak availability": WeakAvailability(empty),
        "partition tolerance": PartitionTolerance(sigma1, sigma2),
    }
    print("\n== which subsets satisfy which guarantee ==")
    for subset in (("x",), ("y",), ("x", "y")):
        verdicts = {
            name: guarantee_satisfied(subset, g) for name, g in guarantees.items()
        }
        failing = [name for name, ok in verdicts.items() if not ok]
        label = "all four" if not failing else f"fails {', '.join(failing)}"
        print(f"  {set(subset)}: {label}")
    print("  the pair fails partition tolerance: it would need the mixed")
    print("  observation (u1 sees 'l', u2 sees 'r'), which no behaviour realizes")

    both = Conjunction(tuple(guarantees.values()))
    print(f"\n  conjunction on {{'x'}}: {guarantee_satisfied(('x',), both)}")

    inst = CapInstance(toy, sigma1, sigma2, frozenset({"x", "y"}), empty, empty)
    report = cap_verify_exhaustive(inst)
    print("\n== exhaustive search over every non-empty subset ==")
    print(f"  verdict (no subset satisfies all three groups): {report.verdict}")
    counts = dict(report.violation_counts)
    print(f"  defeat counts: {counts}")
    print("  with empty successor relations, availability never bites, so the")
    print("  singletons survive and the trade-off does not yet bind")

    print("\n== entanglement is what forces the trade-off ==")
    ent = is_entangled(inst)
    print(f"  this register entangled: {ent.entangled}")
    print("  every behaviour would need a successor whose merges with the old")
    print("  views are unacceptable; see demos/04_write_read_scenario.py for a")
    print("  generated instance where that holds and every subset fails")


if __name__ == "__main__":
    main()
