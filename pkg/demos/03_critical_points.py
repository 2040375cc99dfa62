# %% [markdown]
# # Critical points in the torus
#
# The closed-form points have all x = 1 and y = eps^r d^(1/i_X).  Random
# Newton probing looks for anything else; the cubic surface also has a
# central-fiber locus x1 + x2 + 1 = 0 where f and its gradient vanish.

# %%
from lgfano import SolverConfig, locate_critical_points, newton_refine, parse_descriptor, symmetric_critical_points
from lgfano.model import build_givental

for p in symmetric_critical_points(parse_descriptor("@2")):
    print(p.branch, complex(p.value), p.hessian_rank)

# %% Newton from nearby starts
f = build_givental(parse_descriptor("2@3"))
rec = newton_refine(f, [1.05, 1.9])
print([complex(z) for z in rec.coordinates], complex(rec.value), float(rec.residual))

# %% Probing the cubic surface
search = locate_critical_points(parse_descriptor("3@3"), SolverConfig(trials=100))
print("nonzero values:", [complex(p.value) for p in search.nonzero_value])
print("near-zero points:", len(search.near_zero_value), "clusters:", search.near_zero_clusters)
print("failures:", search.probe.failures)
for p in search.near_zero_value[:3]:
    x1, x2 = (complex(z) for z in p.coordinates)
    print(f"x1 + x2 + 1 = {abs(x1 + x2 + 1):.2e}")
