"""Shared generators for small polymer universes."""
import math

from rccount.polymer import Polymer, PolymerModel, kp_bound_exponent

# host is a cycle, so every site has two neighbours
HOST_DEGREE = 2
B = 1.0
A_KP = kp_bound_exponent(B, HOST_DEGREE)


def interval_universe(host, specs):
    """Polymers are arcs (start, length, slack) on a host cycle of ``host`` sites,
    weighted e^{-(A_KP + slack) * length} so the convergence bound holds."""
    pol = []
    for i, (start, length, slack) in enumerate(specs):
        sites = frozenset((start + j) % host for j in range(length))
        pol.append(Polymer(i, -(A_KP + slack) * length, float(length), len(sites), sites))
    return PolymerModel(pol, host)


def universe_strategy(st, max_polymers=6):
    @st.composite
    def build(draw):
        host = draw(st.integers(3, 8))
        k = draw(st.integers(0, max_polymers))
        specs = [(draw(st.integers(0, host - 1)), draw(st.integers(1, 3)),
                  draw(st.floats(0, 4))) for _ in range(k)]
        return interval_universe(host, specs)
    return build()


def perturbed(model, eps, signs):
    """Every weight moved by a relative factor e^{s eps size^2}, |s| <= 1."""
    return model.with_log_weights([g.log_weight + s * eps * g.size ** 2
                                   for g, s in zip(model.polymers, signs)])


def log1p_series(w, terms):
    return sum((-1) ** (k - 1) * w ** k / k for k in range(1, terms + 1))


def lse(xs):
    mx = max(xs)
    return mx + math.log(sum(math.exp(x - mx) for x in xs))


ACCEPTANCE = []


def report(number, passed, detail, seconds, budget):
    """Record and print one acceptance line; the time budget is part of the verdict."""
    ok = bool(passed) and seconds <= budget
    line = (f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}  "
            f"[{seconds:.1f}s of {budget:.0f}s]")
    ACCEPTANCE.append(line)
    print(line)
    return ok
