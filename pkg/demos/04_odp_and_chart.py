# %% [markdown]
# # Ordinary double points
#
# Numerically, the Hessian of f_X has full rank at each nonzero-value critical
# point.  Exactly, the chart polynomial G over Q[t]/(t^i_X - d) has no constant
# or linear part and a block quadratic form whose blocks are nondegenerate.

# %%
from lgfano import build_chart_polynomial, certify_odp, closed_form_matrix, easy_lemma_det, extract_quadratic_matrix
from lgfano import parse_descriptor, symmetric_critical_points
from lgfano.hessian import block_nondegeneracy, matching_conventions

m = parse_descriptor("3@4")
for p in symmetric_critical_points(m):
    rep = certify_odp(m, p)
    print("branch", p.branch, "rank", rep.rank, "sigma", [float(s) for s in rep.singular_values])

# %% The chart polynomial and its quadratic part
G = build_chart_polynomial(m)
print(G)
for row in extract_quadratic_matrix(G):
    print([x.poly_str() for x in row])

# %% Two diagonal conventions; the expansion decides between them
for desc in ["2@3", "3@4", "2,2@5", "@3"]:
    print(desc, matching_conventions(parse_descriptor(desc)))
print([[x.poly_str() for x in row] for row in closed_form_matrix(parse_descriptor("2@3"), "paper")])

# %% Block factors from the determinant lemma
blocks, ok = block_nondegeneracy(parse_descriptor("2,3@6"))
for b in blocks:
    print(b.kind, b.group, b.size, [(label, str(el), k) for label, el, k in b.factors])
print("nondegenerate:", ok)
print(easy_lemma_det(1, -2, 3), easy_lemma_det(0, 2, 4))
