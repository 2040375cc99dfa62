# %% [markdown]
# # Laurent polynomials and the Givental-type model
#
# `LaurentPoly` holds exact rational coefficients keyed by signed exponent
# vectors.  `build_givental` expands f_X for a descriptor `d1,...,dk@N`.

# %%
from fractions import Fraction

from lgfano import LaurentPoly, build_givental, format_poly, invariants, parse_descriptor, parse_poly
from lgfano.laurent import constant_term, gradient_at, hessian_at, partial_derivative

x, = LaurentPoly.generators(("x",))
p = x + x ** -1
print(format_poly(p * p))
print(format_poly(partial_derivative((x + 1) ** 2 * x ** -1, 0)))
print(constant_term(p ** 4))

# %% Text round trip
q = parse_poly("3/2 * x^2 + -1 * x^-3", ("x",))
assert format_poly(q) == "3/2 * x^2 + -1 * x^-3"
assert q * 2 == parse_poly("3 * x^2 + -2 * x^-3", ("x",))

# %% Numeric evaluation at a chosen precision
print(gradient_at(p, [2], 128))
print(hessian_at(p, [1], 128))

# %% The quadric surface and its invariants
model = parse_descriptor("2@3")
f = build_givental(model)
print(model.var_names, format_poly(f))
inv = invariants(model)
print("n =", inv.n, "i_X =", inv.index, "d =", inv.dconst, "h^{1,1} =", inv.h1nm1)
print("expected critical values:", [complex(v) for v in inv.expected_critical_values])

# %% Projective space is the baseline: f = y1 + ... + yN + 1/(y1...yN)
print(format_poly(build_givental(parse_descriptor("@3"))))
