"""Walkthrough: ordered observers and the order they induce on behaviours.

An observer is a component whose local behaviours carry a partial order.
Pairing a system with an observer and mapping the composition onto both
induces a relation on the base behaviours: x comes before y when every
observation of x is ordered below every observation of y. The relation is
always transitive; reflexivity can genuinely fail, and the quotient view
exists only when it does not.

Run: python3 demos/05_timed_observers.py
"""
from bsm import (
    Component,
    ImplementationMap,
    OrderedComponent,
    PreconditionError,
    Snapshot,
    System,
    TimedImplementation,
    derived_order,
    minimal_behaviours,
    observer_system,
    preorder_quotient,
    timed_product,
    validate_timed,
)


def main():
    print("== two events observed strictly in sequence ==")
    c = Component("c", ("c0", "c1"))
    f = System("f", (c,), ("x", "y"),
               (Snapshot((("c", "c0"),)), Snapshot((("c", "c1"),))))
    clock = Component("t", ("t0", "t1"))
    observer = OrderedComponent.of(clock, [("t0", "t1")])
    joint = System(
        "h", (c, clock), ("x@t0", "y@t1"),
        (Snapshot((("c", "c0"), ("t", "t0"))), Snapshot((("c", "c1"), ("t", "t1")))),
    )
    chain = TimedImplementation(
        f, observer, joint,
        ImplementationMap(joint, f, (("x@t0", "x"), ("y@t1", "y"))),
        ImplementationMap(joint, observer_system(observer),
                          (("x@t0", "t0"), ("y@t1", "t1"))),
    )
    print(f"  valid instance: {validate_timed(chain).valid}")
    relation = derived_order(chain)
    print(f"  derived pairs: {sorted(relation.pairs)}")
    print(f"  minimal behaviours: {minimal_behaviours(chain)}")
    view = preorder_quotient(chain)
    print(f"  quotient classes: {view.classes}")

    print("\n== a constant reading relates everything ==")
    flat_clock = Component("t", ("t0",))
    flat = timed_product(f, OrderedComponent.of(flat_clock, []))
    print(f"  valid: {validate_timed(flat).valid}")
    print(f"  derived pairs: {sorted(derived_order(flat).pairs)}")
    print(f"  quotient classes: {preorder_quotient(flat).classes}")

    print("\n== incomparable observations break reflexivity ==")
    c1 = Component("c", ("c0",))
    single = System("f", (c1,), ("x",), (Snapshot((("c", "c0"),)),))
    two_ticks = OrderedComponent.of(Component("t", ("t0", "t1")), [])
    t = timed_product(single, two_ticks)
    print(f"  valid: {validate_timed(t).valid}")
    relation = derived_order(t)
    print(f"  ('x', 'x') in the relation: {('x', 'x') in relation.pairs}")
    print(f"  minimal behaviours: {minimal_behaviours(t)} "
          "(nothing is strictly below x)")
    try:
        preorder_quotient(t)
    except PreconditionError as err:
        print(f"  quotient refused: {err}")
    print("  x is seen at t0 and at t1, and the ticks are incomparable, so")
    print("  not every observation of x precedes every observation of x")


if __name__ == "__main__":
    main()
