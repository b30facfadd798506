"""Closed-form statistics for the slot-code comparison game.

The receiver's check draws r slots from the pulse bin and r from the empty
bin and compares aggregate energy. These functions give the exact probability
that an attacker (or plain noise) wins that comparison, under the unit-power
model: an untouched pulse contributes energy 1, an annihilated pulse 0, a
pulse hit with the same sign 4, and an attacker pulse landing in the empty
bin 1.

Every function has two evaluation paths. The default float path works with
log-binomials, exponentiating each term only after numerator and denominator
cancel, so slot counts in the hundreds stay far from overflow; terms are
probabilities <= 1 throughout. With exact=True the same sums run over
Fraction arithmetic on math.comb, which the tests use as a small-instance
oracle. Both paths agree to ~1e-12 relative.

Argument conventions:
    alpha  pulse slots, beta empty slots, n = alpha + beta
    r      slots sampled per bin by the receiver
    k      attacker injections (distinct slots, random signs)
    x      injections that landed in the pulse bin, g of them annihilating
    zeta   energy headroom ratio: budget / worst-case received power
    kappa  high-energy noise slots (for the noise acceptance probability)
"""

from fractions import Fraction
from math import comb, exp, fsum, isinf, lgamma, log

HALF_LOG = log(2.0)


def _log_choose(n: int, r: int) -> float:
    # caller guarantees 0 <= r <= n
    return lgamma(n + 1) - lgamma(r + 1) - lgamma(n - r + 1)


def hypergeom(na: int, nb: int, ka: int, kb: int, exact: bool = False):
    """Probability that a uniform (ka+kb)-subset of na+nb items splits ka|kb.

    Out-of-range counts (ka > na, negative values, ...) give probability 0,
    which lets callers sum over unconstrained index ranges.
    """
    if min(na, nb, ka, kb) < 0 or ka > na or kb > nb:
        return Fraction(0) if exact else 0.0
    if exact:
        return Fraction(comb(na, ka) * comb(nb, kb), comb(na + nb, ka + kb))
    return exp(
        _log_choose(na, ka) + _log_choose(nb, kb) - _log_choose(na + nb, ka + kb)
    )


def _draw_pmf(hit: int, miss: int, r: int, exact: bool) -> list:
    """pmf of the number of hit slots in an r-draw from hit+miss slots."""
    return [hypergeom(hit, miss, i, r - i, exact) for i in range(r + 1)]


def _suffix_tail(pmf: list, exact: bool) -> list:
    """tail[m] = P(count >= m); tail has length len(pmf)+1, tail[-1] = 0."""
    zero = Fraction(0) if exact else 0.0
    tail = [zero] * (len(pmf) + 1)
    for m in range(len(pmf) - 1, -1, -1):
        tail[m] = tail[m + 1] + pmf[m]
    return tail


def _prefix_cdf(pmf: list, exact: bool) -> list:
    """cdf[y] = P(count <= y)."""
    zero = Fraction(0) if exact else 0.0
    out = []
    acc = zero
    for p in pmf:
        acc = acc + p
        out.append(acc)
    return out


def _check_game(alpha: int, beta: int, r: int, k: int) -> None:
    if alpha < 1 or beta < 1:
        raise ValueError("need at least one pulse slot and one empty slot")
    if not 1 <= r <= alpha or r > beta:
        raise ValueError("sample size r must satisfy 1 <= r <= min(alpha, beta)")
    if not 0 <= k <= alpha + beta:
        raise ValueError("injection count k must lie in [0, alpha + beta]")


def _p_inner_reduced(alpha, x, g, beta_tail, exact: bool):
    # r = alpha: the pulse-bin aggregate is fully determined by (x, g)
    m = 4 * (x - g) + (alpha - x) + 1
    zero = Fraction(0) if exact else 0.0
    return beta_tail[m] if m < len(beta_tail) else zero


def _p_inner_general(alpha, r, x, g, beta_tail, exact: bool):
    # sum over the composition of the pulse-bin draw: y1 annihilated,
    # y2 doubled, r - y1 - y2 untouched
    terms = []
    log_cr = None if exact else _log_choose(alpha, r)
    for y1 in range(0, min(r, g) + 1):
        y2_lo = max(0, r - y1 - (alpha - x))
        y2_hi = min(r - y1, x - g)
        for y2 in range(y2_lo, y2_hi + 1):
            m = r - y1 + 3 * y2 + 1
            tail = beta_tail[m] if m < len(beta_tail) else None
            if tail is None or tail == 0:
                continue
            if exact:
                w = Fraction(
                    comb(g, y1) * comb(x - g, y2) * comb(alpha - x, r - y1 - y2),
                    comb(alpha, r),
                )
                terms.append(w * tail)
            else:
                lw = (
                    _log_choose(g, y1)
                    + _log_choose(x - g, y2)
                    + _log_choose(alpha - x, r - y1 - y2)
                    - log_cr
                )
                terms.append(exp(lw) * tail)
    if exact:
        return sum(terms, Fraction(0))
    return fsum(terms)


def p_inner(alpha: int, beta: int, r: int, k: int, x: int, g: int, exact: bool = False):
    """P(empty-bin aggregate beats pulse-bin aggregate | x landed, g annihilated).

    Conditions on the attacker having placed x of its k injections in the
    pulse bin with exactly g sign-matches cancelled; the remaining k - x sit
    in the empty bin. The receiver then draws r slots per bin.
    """
    _check_game(alpha, beta, r, k)
    if not 0 <= g <= x <= min(k, alpha) or k - x > beta:
        raise ValueError("need 0 <= g <= x <= min(k, alpha) and k - x <= beta")
    beta_tail = _suffix_tail(_draw_pmf(k - x, beta - (k - x), r, exact), exact)
    if r == alpha:
        return _p_inner_reduced(alpha, x, g, beta_tail, exact)
    return _p_inner_general(alpha, r, x, g, beta_tail, exact)


def p_given_x(alpha: int, beta: int, r: int, k: int, x: int, exact: bool = False):
    """Evasion probability given x injections landed in the pulse bin.

    Averages p_inner over the binomial number of annihilations g (each of the
    x in-bin injections cancels independently with probability 1/2).
    """
    _check_game(alpha, beta, r, k)
    if not 0 <= x <= min(k, alpha) or k - x > beta:
        raise ValueError("need 0 <= x <= min(k, alpha) and k - x <= beta")
    beta_tail = _suffix_tail(_draw_pmf(k - x, beta - (k - x), r, exact), exact)
    reduced = r == alpha
    terms = []
    for g in range(x + 1):
        inner = (
            _p_inner_reduced(alpha, x, g, beta_tail, exact)
            if reduced
            else _p_inner_general(alpha, r, x, g, beta_tail, exact)
        )
        if exact:
            terms.append(Fraction(comb(x, g), 2**x) * inner)
        else:
            terms.append(exp(_log_choose(x, g) - x * HALF_LOG) * inner)
    return sum(terms, Fraction(0)) if exact else fsum(terms)


def prob_evade_rcv(alpha: int, beta: int, r: int, k: int, exact: bool = False):
    """P that k random-sign injections make the empty bin outscore the pulse bin.

    This is the attacker's chance of surviving one code-verification
    comparison when energy budgets are ignored (no headroom constraint).
    """
    _check_game(alpha, beta, r, k)
    terms = []
    for x in range(max(0, k - beta), min(k, alpha) + 1):
        w = hypergeom(alpha, beta, x, k - x, exact)
        if w == 0:
            continue
        terms.append(w * p_given_x(alpha, beta, r, k, x, exact))
    return sum(terms, Fraction(0)) if exact else fsum(terms)


def prob_success(
    alpha: int, beta: int, r: int, zeta: float, k: int, exact: bool = False
):
    """Evasion probability with the receiver's energy budget enforced.

    Outcomes where the distorted frame's aggregate would blow the budget are
    removed: a term survives only while k + 2x - 4g <= alpha (zeta - 1), the
    unit-power audit of the received aggregate against the threshold. zeta is
    the headroom ratio (budget over worst-case power); zeta = inf recovers
    prob_evade_rcv.
    """
    _check_game(alpha, beta, r, k)
    if zeta < 0:
        raise ValueError("headroom ratio zeta must be >= 0")
    budget = None if isinf(zeta) else alpha * (zeta - 1.0)
    terms = []
    for x in range(max(0, k - beta), min(k, alpha) + 1):
        w = hypergeom(alpha, beta, x, k - x, exact)
        if w == 0:
            continue
        beta_tail = _suffix_tail(_draw_pmf(k - x, beta - (k - x), r, exact), exact)
        reduced = r == alpha
        for g in range(x + 1):
            if budget is not None and k + 2 * x - 4 * g > budget:
                continue
            inner = (
                _p_inner_reduced(alpha, x, g, beta_tail, exact)
                if reduced
                else _p_inner_general(alpha, r, x, g, beta_tail, exact)
            )
            if exact:
                terms.append(w * Fraction(comb(x, g), 2**x) * inner)
            else:
                terms.append(w * exp(_log_choose(x, g) - x * HALF_LOG) * inner)
    return sum(terms, Fraction(0)) if exact else fsum(terms)


def prob_noise_pass(alpha: int, beta: int, r: int, kappa: int, exact: bool = False):
    """P that pure noise passes one comparison (pulse-bin draw >= empty-bin draw).

    Noise is modelled as kappa high-energy slots scattered uniformly over the
    frame; a draw's aggregate is its count of high slots. Ties pass, the
    receiver's convention.
    """
    if alpha < 1 or beta < 1:
        raise ValueError("need at least one slot per bin")
    if not 1 <= r <= min(alpha, beta):
        raise ValueError("sample size r must satisfy 1 <= r <= min(alpha, beta)")
    if not 0 <= kappa <= alpha + beta:
        raise ValueError("high-energy slot count kappa must lie in [0, alpha + beta]")
    terms = []
    for x in range(max(0, kappa - beta), min(kappa, alpha) + 1):
        w = hypergeom(alpha, beta, x, kappa - x, exact)
        if w == 0:
            continue
        beta_cdf = _prefix_cdf(_draw_pmf(kappa - x, beta - (kappa - x), r, exact), exact)
        log_cr = None if exact else _log_choose(alpha, r)
        inner = []
        y_lo = max(0, r - (alpha - x))
        for y in range(y_lo, min(r, x) + 1):
            if exact:
                wy = Fraction(comb(x, y) * comb(alpha - x, r - y), comb(alpha, r))
            else:
                wy = exp(
                    _log_choose(x, y) + _log_choose(alpha - x, r - y) - log_cr
                )
            inner.append(wy * beta_cdf[y])
        total = sum(inner, Fraction(0)) if exact else fsum(inner)
        terms.append(w * total)
    return sum(terms, Fraction(0)) if exact else fsum(terms)


def appendix_prob_delta(n: int, alpha: int, k: int, delta: int, exact: bool = False):
    """pmf of the attacker's net aggregate change after k random injections.

    delta counts unit-power energy added to the frame: each injection adds 1
    except a sign-matched hit on a pulse slot, which removes 1 instead of
    adding (net -1 versus +1, so (k - delta)/2 of the in-bin hits cancelled).
    Odd k - delta or |delta| > k is impossible and returns 0.
    """
    if not 0 <= alpha <= n or n < 1:
        raise ValueError("need 0 <= alpha <= n with n >= 1")
    if not 0 <= k <= n:
        raise ValueError("injection count k must lie in [0, n]")
    zero = Fraction(0) if exact else 0.0
    if delta > k or delta < -k or (k - delta) % 2:
        return zero
    b = (k - delta) // 2
    terms = []
    for x1 in range(b, min(k, alpha) + 1):
        w = hypergeom(alpha, n - alpha, x1, k - x1, exact)
        if w == 0:
            continue
        if exact:
            terms.append(Fraction(comb(x1, b), 2**x1) * w)
        else:
            terms.append(exp(_log_choose(x1, b) - x1 * HALF_LOG) * w)
    return sum(terms, Fraction(0)) if exact else fsum(terms)


def appendix_prob_within_threshold(
    n: int, alpha: int, k: int, gamma_factor: float, exact: bool = False
):
    """P that k injections keep the frame aggregate inside the energy budget.

    Sums the delta pmf up to alpha (gamma_factor - 1), the largest net energy
    addition the budget tolerates; gamma_factor is the budget expressed as a
    multiple of the honest frame's aggregate.
    """
    if gamma_factor < 0:
        raise ValueError("gamma_factor must be >= 0")
    if not 0 <= alpha <= n or n < 1:
        raise ValueError("need 0 <= alpha <= n with n >= 1")
    if not 0 <= k <= n:
        raise ValueError("injection count k must lie in [0, n]")
    hi = alpha * (gamma_factor - 1.0)
    terms = []
    for delta in range(-k, k + 1):
        if (k - delta) % 2:
            continue
        if delta > hi:
            break
        terms.append(appendix_prob_delta(n, alpha, k, delta, exact))
    return sum(terms, Fraction(0)) if exact else fsum(terms)
