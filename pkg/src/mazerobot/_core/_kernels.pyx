# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled simulation kernels. Semantics mirror mazerobot._core.fallback exactly."""

from libc.stdint cimport int32_t, int64_t, uint8_t, uint64_t

cdef enum:
    CTL_STATE = 0
    CTL_STEP = 1
    CTL_FLAG_HITS = 2
    CTL_MARKS = 3
    CTL_FIRST_RETURN = 4
    CTL_LAST_MARK = 5
    MAXK = 64


cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t word_at(uint64_t seed, uint64_t j) nogil:
    return mix64(seed + (j + 1) * <uint64_t>0x9E3779B97F4A7C15ULL)


cdef inline bint in_flags(const int64_t* x, int k, int flag_kind,
                          const int64_t[::1] base, const int64_t[:, ::1] hnf,
                          const int64_t[::1] piv) nogil:
    cdef int64_t v[MAXK]
    cdef int i, j, c
    cdef int64_t h, q, r
    if flag_kind == 0:
        return 0
    for i in range(k):
        v[i] = x[i] - base[i]
    for i in range(hnf.shape[0]):
        c = <int>piv[i]
        h = hnf[i, c]
        q = v[c] // h
        r = v[c] - q * h
        if r < 0:
            r += h
            q -= 1
        if r != 0:
            return 0
        if q != 0:
            for j in range(k):
                v[j] -= q * hnf[i, j]
    for i in range(k):
        if v[i] != 0:
            return 0
    return 1


def advance(const int64_t[::1] moves, const int64_t[::1] carry, const int32_t[:, ::1] nxt,
            int npeb, int flag_kind, const int64_t[::1] flag_base,
            const int64_t[:, ::1] flag_hnf, const int64_t[::1] flag_piv,
            int64_t[::1] robot, int64_t[:, ::1] peb, int64_t[::1] ctl, uint64_t seed,
            int64_t nsteps, const uint8_t[::1] mark, int64_t[::1] mark_hist, int64_t mark_limit,
            const int32_t[::1] ball_lut, int ball_r, int64_t[::1] first_visit,
            int64_t[:, ::1] pos_log, int64_t[:, ::1] peb_log, int32_t[::1] state_log):
    """Run up to ``nsteps`` automaton steps in place; returns the number executed."""
    cdef int k = robot.shape[0]
    cdef int i, j, axis, sign, obs, code, side
    cdef int64_t t, stepk, elapsed, idx, stride
    cdef int64_t q = ctl[CTL_STATE]
    cdef int64_t pre[MAXK]
    cdef bint same, log_pos = pos_log.shape[0] > 0, log_peb = peb_log.shape[0] > 0
    cdef bint log_state = state_log.shape[0] > 0, use_ball = ball_lut.shape[0] > 0
    cdef uint64_t w
    cdef int64_t executed = 0
    if k > MAXK:
        raise ValueError("dimension too large for the compiled kernel")
    side = 2 * ball_r + 1
    with nogil:
        for t in range(nsteps):
            stepk = ctl[CTL_STEP]
            code = <int>moves[q]
            for i in range(k):
                pre[i] = robot[i]
            if code != 0:
                axis = (code if code > 0 else -code) - 1
                sign = 1 if code > 0 else -1
                robot[axis] += sign
                for j in range(npeb):
                    if (carry[q] >> j) & 1:
                        same = 1
                        for i in range(k):
                            if peb[j, i] != pre[i]:
                                same = 0
                                break
                        if same:
                            peb[j, axis] += sign
            # observation on the post-move configuration
            obs = 0
            for j in range(npeb):
                same = 1
                for i in range(k):
                    if peb[j, i] != robot[i]:
                        same = 0
                        break
                if same:
                    obs |= (1 << j)
            if in_flags(&robot[0], k, flag_kind, flag_base, flag_hnf, flag_piv):
                obs |= (1 << npeb)
                ctl[CTL_FLAG_HITS] += 1
            w = word_at(seed, <uint64_t>((stepk - 1) >> 6))
            if (w >> ((stepk - 1) & 63)) & 1:
                obs |= (1 << (npeb + 1))
            elapsed = stepk
            if mark[q]:
                ctl[CTL_MARKS] += 1
                mark_hist[q] += 1
                ctl[CTL_LAST_MARK] = q
            q = nxt[q, obs]
            ctl[CTL_STATE] = q
            ctl[CTL_STEP] = stepk + 1
            if ctl[CTL_FIRST_RETURN] < 0:
                same = 1
                for i in range(k):
                    if robot[i] != 0:
                        same = 0
                        break
                if same:
                    ctl[CTL_FIRST_RETURN] = elapsed
            if use_ball:
                idx = 0
                stride = 1
                for i in range(k):
                    if robot[i] > ball_r or robot[i] < -ball_r:
                        idx = -1
                        break
                    idx += (robot[i] + ball_r) * stride
                    stride *= side
                if idx >= 0 and ball_lut[idx] >= 0 and first_visit[ball_lut[idx]] < 0:
                    first_visit[ball_lut[idx]] = elapsed
            if log_pos:
                for i in range(k):
                    pos_log[t, i] = robot[i]
            if log_peb:
                for j in range(npeb):
                    for i in range(k):
                        peb_log[t, j * k + i] = peb[j, i]
            if log_state:
                state_log[t] = <int32_t>q
            executed += 1
            if mark_limit > 0 and ctl[CTL_MARKS] >= mark_limit:
                break
    return executed


def walk_first_return(const int64_t[:, ::1] vecs, const int64_t[::1] cum, int64_t denom,
                      int nbits, uint64_t seed, int64_t budget, bint stop_at_first):
    """Simulate a rational-weight walk from the origin using fair bits.

    Each step draws ``nbits`` bits as an integer ``u`` (LSB first) and retries
    while ``u >= denom``; the step is the first index with ``u < cum[i]``.
    Returns ``(first_return or -1, number_of_returns, bits_used)``.
    """
    cdef int k = vecs.shape[1], m = vecs.shape[0]
    cdef int64_t pos[MAXK]
    cdef int64_t t, u, first = -1, nret = 0
    cdef uint64_t bitpos = 0, w = 0, off
    cdef uint64_t mask = (<uint64_t>1 << nbits) - 1 if nbits < 64 else <uint64_t>0xFFFFFFFFFFFFFFFFULL
    cdef int i, b, zero
    if k > MAXK:
        raise ValueError("dimension too large for the compiled kernel")
    for i in range(k):
        pos[i] = 0
    cdef const int64_t* vp = &vecs[0, 0]
    cdef const int64_t* cp = &cum[0]
    cdef const int64_t* row
    with nogil:
        w = word_at(seed, 0)
        for t in range(1, budget + 1):
            while True:
                off = bitpos & 63
                if off + nbits <= 64:
                    # all bits in the current word
                    if off == 0:
                        w = word_at(seed, bitpos >> 6)
                    u = <int64_t>((w >> off) & mask)
                    bitpos += nbits
                else:
                    u = 0
                    for b in range(nbits):
                        if (bitpos & 63) == 0:
                            w = word_at(seed, bitpos >> 6)
                        u |= <int64_t>((w >> (bitpos & 63)) & 1) << b
                        bitpos += 1
                if u < denom:
                    break
            i = 0
            while cp[i] <= u:
                i += 1
            row = vp + i * k
            zero = 1
            for b in range(k):
                pos[b] += row[b]
                if pos[b] != 0:
                    zero = 0
            if zero:
                nret += 1
                if first < 0:
                    first = t
                    if stop_at_first:
                        break
    return first, nret, bitpos
