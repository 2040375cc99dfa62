# %% [markdown]
# # Period sequence against the closed form
#
# The period of f_X is realized as ct(f^m).  For a complete intersection it
# should equal (i_X l)! prod (d_i l)! / (l!)^(N+1) at m = i_X l and vanish
# otherwise.

# %%
from lgfano import compare_periods, givental_coefficients, parse_descriptor, period_sequence
from lgfano.periods import periods_csv

for desc in ["@1", "@2", "2@3", "3@3", "2,2@5"]:
    m = parse_descriptor(desc)
    rep = compare_periods(m, 10)
    print(f"{desc:6} match={rep.match}  {list(rep.constant_terms)}")

# %% Closed form alone is cheap, so it can go much further than the expansion
print(givental_coefficients(parse_descriptor("3@4"), 20)[::2])

# %% CSV rows for one model
print(periods_csv(compare_periods(parse_descriptor("3@3"), 5)))
