"""Compiled chain kernels for the builtin benchmark setup.

The benchmark grid (hundreds of runs, tens of thousands of steps, up to a
hundred tries per step) is far too heavy for the general pure-Python
kernels, so the bimodal-quartic target with the Gaussian sequential /
random-walk proposals gets a numba fast path.  Weight families W1, W2 and
W3 are supported; the arithmetic mirrors the reference kernels step for
step (identical random-draw consumption order), which lets the tests drive
both implementations with the same legacy Mersenne-Twister stream and
compare acceptance probabilities directly.

Per-point Gaussian log-density constants are dropped: they cancel inside
the weight normalization (one proposal factor per weight at fixed arity)
and between the numerator and denominator of the acceptance ratio.
"""

from __future__ import annotations

import numpy as np
from numba import njit

W1, W2, W3 = 1, 2, 3

WEIGHT_IDS = {"W1": W1, "W2": W2, "W3": W3}


@njit(cache=True)
def _lp(x):
    # log of the bimodal quartic target, -(x^2-4)^2/4
    d = x * x - 4.0
    return -d * d * 0.25


@njit(cache=True)
def _generic_step(x, lpx, N, sd, inv2s, g1, g2, wid, theta,
                  ys, mu_f, lw_f, lps_y, refs, mu_b, lw_b):
    # forward draws: candidates in index order
    prefix = 0.0
    last = x
    cum_lp = lpx
    for idx in range(N):
        j = idx + 1
        if j == 1:
            mu = x
        else:
            mu = g1 * prefix / (j - 1) + g2 * last
        y = mu + sd * np.random.standard_normal()
        if j == 1:
            prefix = x
        else:
            prefix += last
        last = y
        ys[idx] = y
        mu_f[idx] = mu
        lpy = _lp(y)
        lps_y[idx] = lpy
        if wid == W1:
            lw_f[idx] = theta * lpy
        elif wid == W2:
            cum_lp += lpy
            lw_f[idx] = cum_lp
        else:
            lw_f[idx] = lpy + (y - mu) * (y - mu) * inv2s
    # selection: one uniform, inverse CDF over max-shifted weights
    m = lw_f[0]
    for i in range(1, N):
        if lw_f[i] > m:
            m = lw_f[i]
    tot = 0.0
    for i in range(N):
        tot += np.exp(lw_f[i] - m)
    u = np.random.random() * tot
    run = 0.0
    k = N
    for i in range(N):
        run += np.exp(lw_f[i] - m)
        if u < run:
            k = i + 1
            break
    y = ys[k - 1]
    lp_y = lps_y[k - 1]
    # reference set: reversed head, old state, sampled tail in index order
    for i in range(k - 1):
        refs[i] = ys[k - 2 - i]
    refs[k - 1] = x
    prefix = 0.0
    last = y
    cum_lp = lp_y
    for idx in range(N):
        j = idx + 1
        if j == 1:
            mu = y
        else:
            mu = g1 * prefix / (j - 1) + g2 * last
        if j > k:
            refs[idx] = mu + sd * np.random.standard_normal()
        r = refs[idx]
        if j == 1:
            prefix = y
        else:
            prefix += last
        last = r
        mu_b[idx] = mu
        lpr = _lp(r)
        if wid == W1:
            lw_b[idx] = theta * lpr
        elif wid == W2:
            cum_lp += lpr
            lw_b[idx] = cum_lp
        else:
            lw_b[idx] = lpr + (r - mu) * (r - mu) * inv2s
    # acceptance: q_k ratio plus normalized-weight ratio, all in log domain
    sq_num = 0.0
    sq_den = 0.0
    for idx in range(k):
        dn = refs[idx] - mu_b[idx]
        dd = ys[idx] - mu_f[idx]
        sq_num -= dn * dn * inv2s
        sq_den -= dd * dd * inv2s
    mb = lw_b[0]
    for i in range(1, N):
        if lw_b[i] > mb:
            mb = lw_b[i]
    tot_b = 0.0
    for i in range(N):
        tot_b += np.exp(lw_b[i] - mb)
    lse_f = m + np.log(tot)
    lse_b = mb + np.log(tot_b)
    log_ratio = (lp_y + sq_num - lpx - sq_den
                 + (lw_b[k - 1] - lse_b) - (lw_f[k - 1] - lse_f))
    alpha = 1.0 if log_ratio >= 0.0 else np.exp(log_ratio)
    accepted = np.random.random() < alpha
    if accepted:
        return y, lp_y, True, alpha, k
    return x, lpx, False, alpha, k


@njit(cache=True)
def _iid_step(x, lpx, N, sd, inv2s, wid, theta, ys, lw_f, lps_y, refs, lw_b):
    # i.i.d. candidates from N(x, sigma^2)
    for idx in range(N):
        y = x + sd * np.random.standard_normal()
        ys[idx] = y
        lpy = _lp(y)
        lps_y[idx] = lpy
        if wid == W1:
            lw_f[idx] = theta * lpy
        elif wid == W2:
            lw_f[idx] = lpy + lpx
        else:
            lw_f[idx] = lpy + (y - x) * (y - x) * inv2s
    m = lw_f[0]
    for i in range(1, N):
        if lw_f[i] > m:
            m = lw_f[i]
    tot = 0.0
    for i in range(N):
        tot += np.exp(lw_f[i] - m)
    u = np.random.random() * tot
    run = 0.0
    k = N
    for i in range(N):
        run += np.exp(lw_f[i] - m)
        if u < run:
            k = i + 1
            break
    y = ys[k - 1]
    lp_y = lps_y[k - 1]
    # every non-anchor reference redrawn i.i.d. from N(y, sigma^2)
    for idx in range(N):
        j = idx + 1
        if j == k:
            refs[idx] = x
        else:
            refs[idx] = y + sd * np.random.standard_normal()
        r = refs[idx]
        lpr = _lp(r)
        if wid == W1:
            lw_b[idx] = theta * lpr
        elif wid == W2:
            lw_b[idx] = lpr + lp_y
        else:
            lw_b[idx] = lpr + (r - y) * (r - y) * inv2s
    mb = lw_b[0]
    for i in range(1, N):
        if lw_b[i] > mb:
            mb = lw_b[i]
    tot_b = 0.0
    for i in range(N):
        tot_b += np.exp(lw_b[i] - mb)
    lse_f = m + np.log(tot)
    lse_b = mb + np.log(tot_b)
    # the random-walk proposal is symmetric: pi(x|y)/pi(y|x) = 1
    log_ratio = lp_y - lpx + (lw_b[k - 1] - lse_b) - (lw_f[k - 1] - lse_f)
    alpha = 1.0 if log_ratio >= 0.0 else np.exp(log_ratio)
    accepted = np.random.random() < alpha
    if accepted:
        return y, lp_y, True, alpha, k
    return x, lpx, False, alpha, k


@njit(cache=True)
def _mh_step(x, lpx, sd):
    y = x + sd * np.random.standard_normal()
    lpy = _lp(y)
    log_ratio = lpy - lpx
    alpha = 1.0 if log_ratio >= 0.0 else np.exp(log_ratio)
    accepted = np.random.random() < alpha
    if accepted:
        return y, lpy, True, alpha
    return x, lpx, False, alpha


@njit(cache=True)
def run_generic_chain(seed, x0, n_steps, N, sigma2, g1, g2, wid, theta):
    """Full trace of the generic multi-point chain on the builtin setup."""
    np.random.seed(seed)
    sd = np.sqrt(sigma2)
    inv2s = 0.5 / sigma2
    states = np.empty(n_steps)
    accept = np.zeros(n_steps, np.uint8)
    alphas = np.empty(n_steps)
    ys = np.empty(N)
    mu_f = np.empty(N)
    lw_f = np.empty(N)
    lps_y = np.empty(N)
    refs = np.empty(N)
    mu_b = np.empty(N)
    lw_b = np.empty(N)
    x = x0
    lpx = _lp(x)
    for t in range(n_steps):
        x, lpx, acc, alpha, _ = _generic_step(
            x, lpx, N, sd, inv2s, g1, g2, wid, theta,
            ys, mu_f, lw_f, lps_y, refs, mu_b, lw_b)
        states[t] = x
        accept[t] = 1 if acc else 0
        alphas[t] = alpha
    return states, accept, alphas


@njit(cache=True)
def run_iid_chain(seed, x0, n_steps, N, sigma2, wid, theta):
    np.random.seed(seed)
    sd = np.sqrt(sigma2)
    inv2s = 0.5 / sigma2
    states = np.empty(n_steps)
    accept = np.zeros(n_steps, np.uint8)
    alphas = np.empty(n_steps)
    ys = np.empty(N)
    lw_f = np.empty(N)
    lps_y = np.empty(N)
    refs = np.empty(N)
    lw_b = np.empty(N)
    x = x0
    lpx = _lp(x)
    for t in range(n_steps):
        x, lpx, acc, alpha, _ = _iid_step(
            x, lpx, N, sd, inv2s, wid, theta, ys, lw_f, lps_y, refs, lw_b)
        states[t] = x
        accept[t] = 1 if acc else 0
        alphas[t] = alpha
    return states, accept, alphas


@njit(cache=True)
def run_mh_chain(seed, x0, n_steps, sigma2):
    np.random.seed(seed)
    sd = np.sqrt(sigma2)
    states = np.empty(n_steps)
    accept = np.zeros(n_steps, np.uint8)
    alphas = np.empty(n_steps)
    x = x0
    lpx = _lp(x)
    for t in range(n_steps):
        x, lpx, acc, alpha = _mh_step(x, lpx, sd)
        states[t] = x
        accept[t] = 1 if acc else 0
        alphas[t] = alpha
    return states, accept, alphas


@njit(cache=True)
def _corr_from_sums(n, sa, sb, saa, sbb, sab):
    va = saa - sa * sa / n
    vb = sbb - sb * sb / n
    if va <= 0.0 or vb <= 0.0:
        return np.nan
    return (sab - sa * sb / n) / np.sqrt(va * vb)


@njit(cache=True)
def replica_stats(seeds, sampler_id, x0, n_steps, burn_in, N, sigma2,
                  g1, g2, wid, theta):
    """Per-replica acceptance rate and lag-1 correlation (post burn-in).

    sampler_id: 0 = generic, 1 = iid, 2 = mh.  Correlation is accumulated
    online over consecutive post-burn-in states, matching the Pearson
    estimator of the diagnostics module.
    """
    R = seeds.shape[0]
    acc_out = np.empty(R)
    corr_out = np.empty(R)
    sd = np.sqrt(sigma2)
    inv2s = 0.5 / sigma2
    ys = np.empty(N)
    mu_f = np.empty(N)
    lw_f = np.empty(N)
    lps_y = np.empty(N)
    refs = np.empty(N)
    mu_b = np.empty(N)
    lw_b = np.empty(N)
    for r in range(R):
        np.random.seed(seeds[r])
        x = x0
        lpx = _lp(x)
        n_acc = 0
        n_post = 0
        prev = 0.0
        n_pair = 0
        sa = 0.0
        sb = 0.0
        saa = 0.0
        sbb = 0.0
        sab = 0.0
        for t in range(n_steps):
            if sampler_id == 0:
                x, lpx, acc, alpha, _ = _generic_step(
                    x, lpx, N, sd, inv2s, g1, g2, wid, theta,
                    ys, mu_f, lw_f, lps_y, refs, mu_b, lw_b)
            elif sampler_id == 1:
                x, lpx, acc, alpha, _ = _iid_step(
                    x, lpx, N, sd, inv2s, wid, theta,
                    ys, lw_f, lps_y, refs, lw_b)
            else:
                x, lpx, acc, alpha = _mh_step(x, lpx, sd)
            if t >= burn_in:
                n_post += 1
                if acc:
                    n_acc += 1
                if n_post >= 2:
                    n_pair += 1
                    sa += prev
                    sb += x
                    saa += prev * prev
                    sbb += x * x
                    sab += prev * x
                prev = x
        acc_out[r] = n_acc / n_post
        corr_out[r] = _corr_from_sums(n_pair, sa, sb, saa, sbb, sab)
    return acc_out, corr_out
