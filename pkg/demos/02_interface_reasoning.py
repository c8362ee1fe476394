"""Walkthrough: formulas, absoluteness, and certified interface reasoning.

A Celsius recorder g and an exact Celsius-to-Fahrenheit converter h share
the sensor component c. A fact about g's interface plus a conditional fact
about h certify a conclusion about the composition, without ever evaluating
the composition directly. An audit then evaluates it directly anyway and
agrees.

Run: python3 demos/02_interface_reasoning.py
"""
from bsm import (
    Atom,
    Box,
    Component,
    Implies,
    Not,
    Snapshot,
    System,
    Valuation,
    check_absoluteness,
    compute_types,
    hm_equivalent,
    local_reasoning_1,
    render,
    tensor,
    valid_in,
)


def temperature_systems():
    celsius = [str(i) for i in range(11)]
    fahrenheit = []
    for i in range(11):
        fifths = 9 * i + 160  # value scaled by five, exact
        whole, rem = divmod(fifths, 5)
        fahrenheit.append(str(whole) if rem == 0 else f"{whole}.{rem * 2}")
    c = Component("c", tuple(celsius))
    d = Component("d", tuple(fahrenheit))
    g = System("g", (c,), tuple(celsius), tuple(Snapshot((("c", v),)) for v in celsius))
    h = System(
        "h", (c, d), tuple(fahrenheit),
        tuple(Snapshot((("c", cv), ("d", fv))) for cv, fv in zip(celsius, fahrenheit)),
    )
    return g, h, celsius, fahrenheit


def main():
    g, h, celsius, fahrenheit = temperature_systems()
    valuation = Valuation.of({
        "c::p_c": celsius,         # plausible Celsius readings: all of them
        "d::p_d": fahrenheit,      # plausible Fahrenheit readings: all of them
        "c::freezing": ["0"],
    })
    print("== systems ==")
    print(f"  g records Celsius: {len(g.behaviours)} behaviours over {g.component_names}")
    print(f"  h converts exactly: {len(h.behaviours)} behaviours over {h.component_names}")

    alpha, beta = Atom("c", "p_c"), Atom("d", "p_d")
    print("\n== the two premises, checked locally ==")
    print(f"  g satisfies {render(alpha)} everywhere: {valid_in(g, valuation, alpha)}")
    bridge = Implies(alpha, beta)
    print(f"  h satisfies {render(bridge)} everywhere: {valid_in(h, valuation, bridge)}")

    t = tensor(g, h)
    out = local_reasoning_1(t.onto_left, t.onto_right, valuation, alpha, beta, audit=True)
    print("\n== rule application ==")
    print(f"  rule {out.rule!r} certified: {out.certified}")
    print(f"  conclusion: {out.conclusion}")
    print(f"  audit (direct evaluation of the conclusion): {out.audit}")

    print("\n== absoluteness along the projection onto g ==")
    local = Atom("c", "freezing")
    res = check_absoluteness(t.onto_left, valuation, local)
    print(f"  {render(local)}: direction {res.direction!r}, holds {res.holds}")
    boxed = Box(local)
    res = check_absoluteness(t.onto_left, valuation, boxed)
    print(f"  {render(boxed)}: direction {res.direction!r}, holds {res.holds}")
    res = check_absoluteness(t.onto_left, valuation, Not(boxed))
    print(f"  {render(Not(boxed))}: direction {res.direction!r}, holds {res.holds}")

    print("\n== variable types tell behaviours apart ==")
    types = compute_types(g, valuation)
    freezing_point = types.type_of("0")
    print(f"  type of g's behaviour '0': {sorted(render(a) for a in freezing_point)}")
    print(f"  g behaviours realize {len(types.all_types)} distinct types")
    same = hm_equivalent(g, g, "0", "5", valuation, "elementary")
    print(f"  '0' and '5' satisfy the same modality-free formulas: {same}")
    same = hm_equivalent(g, g, "4", "5", valuation, "elementary")
    print(f"  '4' and '5' do: {same} (freezing separates only '0')")


if __name__ == "__main__":
    main()
