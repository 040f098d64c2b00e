"""Pure-Python kernels with the same signatures and results as ``_kernels``."""
from __future__ import annotations

from ..rng import word

CTL_STATE = 0
CTL_STEP = 1
CTL_FLAG_HITS = 2
CTL_MARKS = 3
CTL_FIRST_RETURN = 4
CTL_LAST_MARK = 5


def _in_flags(x, flag_kind, base, hnf, piv):
    if flag_kind == 0:
        return False
    v = [a - b for a, b in zip(x, base)]
    for row, c in zip(hnf, piv):
        qq, r = divmod(v[c], row[c])
        if r:
            return False
        if qq:
            v = [a - qq * b for a, b in zip(v, row)]
    return not any(v)


def advance(moves, carry, nxt, npeb, flag_kind, flag_base, flag_hnf, flag_piv,
            robot, peb, ctl, seed, nsteps, mark, mark_hist, mark_limit,
            ball_lut, ball_r, first_visit, pos_log, peb_log, state_log):
    moves = moves.tolist()
    carry = carry.tolist()
    nxt = nxt.tolist()
    mark = mark.tolist()
    base = flag_base.tolist()
    hnf = flag_hnf.tolist()
    piv = [int(c) for c in flag_piv.tolist()]
    lut = ball_lut.tolist() if ball_lut.shape[0] else None
    side = 2 * ball_r + 1
    log_pos, log_peb, log_state = pos_log.shape[0] > 0, peb_log.shape[0] > 0, state_log.shape[0] > 0

    a = robot.tolist()
    s = [row.tolist() for row in peb]
    q = int(ctl[CTL_STATE])
    stepk = int(ctl[CTL_STEP])
    flag_hits = int(ctl[CTL_FLAG_HITS])
    marks = int(ctl[CTL_MARKS])
    first_ret = int(ctl[CTL_FIRST_RETURN])
    last_mark = int(ctl[CTL_LAST_MARK])
    cache_j, cache_w = -1, 0
    executed = 0
    for t in range(nsteps):
        code = moves[q]
        if code:
            axis = abs(code) - 1
            sign = 1 if code > 0 else -1
            for j in range(npeb):
                if (carry[q] >> j) & 1 and s[j] == a:
                    s[j][axis] += sign
            a[axis] += sign
        obs = 0
        for j in range(npeb):
            if s[j] == a:
                obs |= 1 << j
        if _in_flags(a, flag_kind, base, hnf, piv):
            obs |= 1 << npeb
            flag_hits += 1
        bitpos = stepk - 1
        if bitpos >> 6 != cache_j:
            cache_j = bitpos >> 6
            cache_w = word(seed, cache_j)
        if (cache_w >> (bitpos & 63)) & 1:
            obs |= 1 << (npeb + 1)
        elapsed = stepk
        if mark[q]:
            marks += 1
            mark_hist[q] += 1
            last_mark = q
        q = nxt[q][obs]
        stepk += 1
        if first_ret < 0 and not any(a):
            first_ret = elapsed
        if lut is not None and all(-ball_r <= x <= ball_r for x in a):
            idx = 0
            stride = 1
            for x in a:
                idx += (x + ball_r) * stride
                stride *= side
            b = lut[idx]
            if b >= 0 and first_visit[b] < 0:
                first_visit[b] = elapsed
        if log_pos:
            pos_log[t] = a
        if log_peb:
            peb_log[t] = [x for row in s for x in row]
        if log_state:
            state_log[t] = q
        executed += 1
        if mark_limit > 0 and marks >= mark_limit:
            break
    robot[:] = a
    for j in range(npeb):
        peb[j] = s[j]
    ctl[CTL_STATE] = q
    ctl[CTL_STEP] = stepk
    ctl[CTL_FLAG_HITS] = flag_hits
    ctl[CTL_MARKS] = marks
    ctl[CTL_FIRST_RETURN] = first_ret
    ctl[CTL_LAST_MARK] = last_mark
    return executed


def walk_first_return(vecs, cum, denom, nbits, seed, budget, stop_at_first):
    vecs = vecs.tolist()
    cum = cum.tolist()
    k = len(vecs[0])
    pos = [0] * k
    first, nret, bitpos = -1, 0, 0
    cache_j, cache_w = -1, 0
    for t in range(1, budget + 1):
        while True:
            u = 0
            for b in range(nbits):
                if bitpos >> 6 != cache_j:
                    cache_j = bitpos >> 6
                    cache_w = word(seed, cache_j)
                u |= ((cache_w >> (bitpos & 63)) & 1) << b
                bitpos += 1
            if u < denom:
                break
        i = 0
        while cum[i] <= u:
            i += 1
        step = vecs[i]
        for b in range(k):
            pos[b] += step[b]
        if not any(pos):
            nret += 1
            if first < 0:
                first = t
                if stop_at_first:
                    break
    return first, nret, bitpos
