"""Independent reference computations used by the self-test, ``validate`` and the tests.

Nothing here shares code with the production paths it checks.
"""

from gmpy2 import mpq


def poly_from_roots(roots):
    """Exact coefficients (ascending powers) of prod (s - r)**k."""
    coeffs = [mpq(1)]
    for r, k in roots:
        for _ in range(k):
            nxt = [mpq(0)] * (len(coeffs) + 1)
            for idx, c in enumerate(coeffs):
                nxt[idx + 1] += c
                nxt[idx] -= r * c
            coeffs = nxt
    return coeffs


def taylor_shift(coeffs, a):
    """Coefficients of P(u + a) by repeated synthetic division (ascending powers)."""
    work = list(reversed(coeffs))  # descending
    out = []
    n = len(work)
    for step in range(n):
        # one synthetic division by (s - a): remainder is the next Taylor coefficient
        acc = mpq(0)
        quotient = []
        for c in work[: n - step]:
            acc = acc * a + c
            quotient.append(acc)
        out.append(quotient.pop())
        work[: n - step - 1] = quotient
    return out


def partial_fractions(poles, zeros):
    """Partial-fraction coefficients of prod (s - z)**q / prod (s - a)**p.

    ``poles`` and ``zeros`` are ``(location, multiplicity)`` lists with exact
    rational locations. Returns ``{(i, j): c}`` with ``c`` the coefficient of
    ``1 / (s - a_i)**j``.
    """
    num = poly_from_roots(zeros)
    out = {}
    for i, (a, p) in enumerate(poles):
        rest = poly_from_roots([pl for l, pl in enumerate(poles) if l != i])
        N = taylor_shift(num, a)
        D = taylor_shift(rest, a)
        e = []
        for k in range(p):
            nk = N[k] if k < len(N) else mpq(0)
            acc = nk - sum(D[r] * e[k - r] for r in range(1, min(k, len(D) - 1) + 1))
            e.append(acc / D[0])
        for j in range(1, p + 1):
            out[(i, j)] = e[p - j]
    return out


def residues_bruteforce(rpz):
    """``(A, C)`` residue tables of ``R(s)`` and ``R(s)/s`` for a rational pole/zero system."""
    poles = [(-b, p) for b, p in rpz.poles]
    zeros = [(-1 / lt, q) for lt, q in rpz.zeros]
    A = {(i + 1, j): v for (i, j), v in partial_fractions(poles, zeros).items()}
    C_all = partial_fractions(poles + [(mpq(0), 1)], zeros)
    C = {(i + 1, j): v for (i, j), v in C_all.items() if i < len(poles)}
    return A, C


def eval_r(rpz, s):
    """Exact value of ``R(s) = prod (s + 1/lt)**q / prod (s + b)**p``."""
    num = mpq(1)
    for lt, q in rpz.zeros:
        num *= (s + 1 / lt) ** q
    den = mpq(1)
    for b, p in rpz.poles:
        den *= (s + b) ** p
    return num / den


def random_rational_system(rng, max_total=20, m=1):
    """Random proper pole/zero system: small rational locations, sum(q) < sum(p) <= max_total."""
    from .residues import RationalPoleZeroSystem

    while True:
        n_poles = rng.randint(1, 5)
        n_zeros = rng.randint(0, 4)
        locs = set()
        while len(locs) < n_poles + n_zeros:
            v = mpq(rng.choice([-1, 1]) * rng.randint(1, 40), rng.randint(1, 12))
            locs.add(v)
        locs = list(locs)
        rng.shuffle(locs)
        budget = max_total
        poles = []
        for b in locs[:n_poles]:
            p = rng.randint(1, max(1, min(8, budget - (n_poles - len(poles) - 1))))
            budget -= p
            poles.append((b, p))
        zbudget = sum(p for _, p in poles) - 1
        zeros = []
        for z in locs[n_poles:]:
            if zbudget < 1:
                break
            q = rng.randint(1, min(6, zbudget))
            zbudget -= q
            zeros.append((1 / z, q))
        if budget >= 0:
            return RationalPoleZeroSystem(m=m, poles=tuple(poles), zeros=tuple(zeros))
