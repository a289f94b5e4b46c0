"""Build Q(2,6) and Q(4,12), print their shape, and walk a few Steenrod operations."""
from browngitler.bg import build_q_module, to_dot
from browngitler.graded import a1_free_decomposition, margolis
from browngitler.polyalg import parse_poly


def show(n, m):
    qm = build_q_module(n, m, check="all")
    Q = qm.module
    dec = a1_free_decomposition(Q)
    print(f"Q({n},{m}): dim {Q.total_dim}, degrees {Q.lo}..{Q.hi}, profile {Q.poincare(Q.lo)}")
    for d in Q.degrees:
        print(f"  {d:3d}: {', '.join(Q.labels(d))}")
    print(f"  Q0 acyclic {margolis(Q, 0).acyclic}, Q1 acyclic {margolis(Q, 1).acyclic}")
    print(f"  A(1)-free {dec.free}, generators in degrees {dec.generator_degrees}")
    return qm


show(2, 6)
qm = show(4, 12)

# follow the bottom class up through Sq^1 then Sq^2
Q = qm.module
d, v = qm.desusp(parse_poly("x2"))
for i in (1, 2):
    d, v = Q.apply_word((i,), d, v)
    print(f"after Sq^{i}: degree {d}: {Q.describe(d, v)}")

print()
print(to_dot(build_q_module(2, 6).module))
