# %% [markdown]
# # Spectrum of c_1 on the h-subring
#
# With q = 1, h^(n+1) = d h^(n+1-i_X).  The nonzero eigenvalues of i_X h should
# be the critical values of f_X.

# %%
from lgfano import c1_spectrum, companion_matrix, locate_critical_points, match_spectrum, parse_descriptor
from lgfano.critical import SolverConfig
from lgfano.spectrum import characteristic_polynomial

m = parse_descriptor("2@4")
C = companion_matrix(m)
for row in C:
    print(row)
print("charpoly (low to high):", characteristic_polynomial(C))
print([complex(z) for z in c1_spectrum(m)])

# %%
search = locate_critical_points(m, SolverConfig(trials=50))
rep = match_spectrum(m, [p.value for p in search.nonzero_value])
print("matched:", rep.matched, "max error:", float(rep.max_pairing_error), "|", rep.note)
for eig, crit in rep.pairing:
    print(complex(eig), complex(crit))
