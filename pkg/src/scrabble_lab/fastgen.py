"""JIT-compiled argmax over legal moves for linear evaluators.

Rollouts evaluate thousands of greedy plies per decision, far beyond what
the object-based generator can serve on one core. This module runs the
same anchor search on flat arrays (trie as an int64 edge table, premiums
and cross-check bitmasks as 225-vectors) and folds the linear evaluation
into the search, returning only the best move. The search is iterative
(explicit stack) so the compiled kernels can be disk-cached.

The fast path is bit-compatible with the generic ranker: it is only used
for linear models whose features are a canonically ordered subset of
(move_score, leave_value, cv_diff, blanks_left, leave_length), with a
leave table that has no learned entries and exactly representable per-tile
values, so both routes compute identical floats and identical tie-breaks.
Equivalence tests against the plain generator cover it; without numba the
callers silently keep the slow path.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    NUMBA_OK = True
except Exception:  # pragma: no cover - exercised only without numba
    NUMBA_OK = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap

from .board import Board
from .config import BOARD_SIZE, CENTER, LETTERS, VOWELS
from .moves import ACROSS, DOWN, Exchange, PASS, Place, move_sort_key

N = BOARD_SIZE
FULL_MASK = (1 << 26) - 1
NEG_INF = -1.0e300
_RIGHT = 0
_LEFT = 1
_BLANK_OPT = 32  # option cursor base for blank designations
_OPT_END = 60


@njit(cache=True)
def _compute_cross(letters, blanks, children, terminal, values, ri, ci, mask, csum):
    """Cross-check bitmask and perpendicular score sum per cell, for plays
    running along lines of stride (ri, ci). csum == -1 means no cross word."""
    for r in range(N):
        for c in range(N):
            idx = r * ri + c * ci
            if letters[idx] != 0:
                mask[idx] = 0
                csum[idx] = -1
                continue
            up_occ = r > 0 and letters[idx - ri] != 0
            down_occ = r < N - 1 and letters[idx + ri] != 0
            if not up_occ and not down_occ:
                mask[idx] = FULL_MASK
                csum[idx] = -1
                continue
            top = r
            while top > 0 and letters[(top - 1) * ri + c * ci] != 0:
                top -= 1
            bot = r + 1
            while bot < N and letters[bot * ri + c * ci] != 0:
                bot += 1
            s = 0
            node = 0
            ok = True
            for r2 in range(top, r):
                j = r2 * ri + c * ci
                L = letters[j] - 1
                if blanks[j] == 0:
                    s += values[L]
                if ok:
                    nxt = children[node, L]
                    if nxt < 0:
                        ok = False
                    else:
                        node = nxt
            for r2 in range(r + 1, bot):
                j = r2 * ri + c * ci
                L = letters[j] - 1
                if blanks[j] == 0:
                    s += values[L]
            m = 0
            if ok:
                for L in range(26):
                    child = children[node, L]
                    if child < 0:
                        continue
                    walk = child
                    good = True
                    for r2 in range(r + 1, bot):
                        j = r2 * ri + c * ci
                        walk = children[walk, letters[j] - 1]
                        if walk < 0:
                            good = False
                            break
                    if good and terminal[walk] == 1:
                        m |= 1 << L
            mask[idx] = m
            csum[idx] = s
    return 0


@njit(cache=True)
def _compute_anchors(letters, anchor):
    any_tile = False
    for idx in range(N * N):
        anchor[idx] = 0
    for r in range(N):
        for c in range(N):
            idx = r * N + c
            if letters[idx] == 0:
                continue
            any_tile = True
            if r > 0 and letters[idx - N] == 0:
                anchor[idx - N] = 1
            if r < N - 1 and letters[idx + N] == 0:
                anchor[idx + N] = 1
            if c > 0 and letters[idx - 1] == 0:
                anchor[idx - 1] = 1
            if c < N - 1 and letters[idx + 1] == 0:
                anchor[idx + 1] = 1
    if not any_tile:
        anchor[CENTER[0] * N + CENTER[1]] = 1
    return 0


@njit(cache=True)
def _consider(best_val, best_meta, best_word, val, kind, row, col, dirn, word_buf, wlen, score):
    """Keep the better of the incumbent and the candidate; ties go to the
    canonically smaller move (kind, row, col, direction, word)."""
    if best_meta[5] == 1:
        if val < best_val[0]:
            return 0
        if val == best_val[0]:
            if kind > best_meta[0]:
                return 0
            if kind == best_meta[0]:
                if row > best_meta[1]:
                    return 0
                if row == best_meta[1]:
                    if col > best_meta[2]:
                        return 0
                    if col == best_meta[2]:
                        if dirn > best_meta[3]:
                            return 0
                        if dirn == best_meta[3]:
                            n = wlen if wlen < best_meta[4] else best_meta[4]
                            worse = True
                            for i in range(n):
                                if word_buf[i] < best_word[i]:
                                    worse = False
                                    break
                                if word_buf[i] > best_word[i]:
                                    return 0
                            if worse and wlen >= best_meta[4]:
                                return 0
    best_val[0] = val
    best_meta[0] = kind
    best_meta[1] = row
    best_meta[2] = col
    best_meta[3] = dirn
    best_meta[4] = wlen
    best_meta[5] = 1
    best_meta[6] = score
    for i in range(wlen):
        best_word[i] = word_buf[i]
    return 0


@njit(cache=True)
def _search_anchor(r, ac, forced, f_node, f_wlen, f_msum, f_start, limit,
                   ri, ci, dirn, letters, blanks, children, terminal, values,
                   cv_sign, lmult, wmult, mask, csum, rack, rack_letters, n_rl,
                   has_blank, word_buf, W, base, tile_leave,
                   best_val, best_meta, best_word,
                   s_phase, s_pos, s_node, s_wlen, s_limit, s_msum, s_mmult,
                   s_cross, s_placed, s_start, s_ulv, s_ucv, s_ubl, s_opt, s_undo,
                   mode, out_meta, out_words, out_count):
    """Depth-first backtracking search for all plays anchored at (r, ac).

    mode 0 folds the linear evaluation into the search and keeps only the
    incumbent best move; mode 1 appends every play to the output arrays
    (out_count may exceed the capacity, signalling the caller to retry
    with more room). `forced` starts from an existing prefix (f_*),
    otherwise left parts up to `limit` tiles are grown. Natural placements
    iterate only the letters present in the rack."""
    sp = 0
    if forced == 1:
        s_phase[sp] = _RIGHT
        s_pos[sp] = ac
        s_node[sp] = f_node
        s_wlen[sp] = f_wlen
        s_msum[sp] = f_msum
        s_mmult[sp] = 1
        s_cross[sp] = 0
        s_placed[sp] = 0
        s_start[sp] = f_start
        s_ulv[sp] = 0.0
        s_ucv[sp] = 0
        s_ubl[sp] = 0
    else:
        s_phase[sp] = _LEFT
        s_node[sp] = 0
        s_wlen[sp] = 0
        s_limit[sp] = limit
        s_ulv[sp] = 0.0
        s_ucv[sp] = 0
        s_ubl[sp] = 0
    s_opt[sp] = -1
    s_undo[sp] = -1
    sp += 1

    while sp > 0:
        i = sp - 1
        if s_opt[i] == -1:
            s_opt[i] = 0
            if s_phase[i] == _RIGHT:
                c = s_pos[i]
                node = s_node[i]
                if c >= N or letters[r * ri + c * ci] == 0:
                    canonical = True
                    if s_placed[i] == 1 and dirn == 1:
                        # a one-tile play that also forms an across word is
                        # owned by the across pass (canonical representation)
                        for k in range(s_start[i], c):
                            j = r * ri + k * ci
                            if letters[j] == 0:
                                if csum[j] >= 0:
                                    canonical = False
                                break
                    if canonical and terminal[node] == 1 and c > ac:
                        score = s_msum[i] * s_mmult[i] + s_cross[i]
                        if s_placed[i] == 7:
                            score += 50
                        row = r if dirn == 0 else s_start[i]
                        col = s_start[i] if dirn == 0 else r
                        if mode == 0:
                            val = (W[0] * score
                                   + W[1] * (base[0] - s_ulv[i])
                                   + W[2] * (base[1] - s_ucv[i])
                                   + W[3] * (base[2] - s_ubl[i])
                                   + W[4] * (base[3] - s_placed[i]))
                            _consider(best_val, best_meta, best_word, val, 0,
                                      row, col, dirn, word_buf, s_wlen[i], score)
                        else:
                            k = out_count[0]
                            out_count[0] = k + 1
                            if k < out_meta.shape[0]:
                                out_meta[k, 0] = row
                                out_meta[k, 1] = col
                                out_meta[k, 2] = dirn
                                out_meta[k, 3] = s_wlen[i]
                                out_meta[k, 4] = score
                                for w in range(s_wlen[i]):
                                    out_words[k, w] = word_buf[w]
                    if c >= N or mask[r * ri + c * ci] == 0:
                        if s_undo[i] >= 0:
                            rack[s_undo[i]] += 1
                        sp -= 1
                        continue
                else:
                    # occupied: forced crossing, transform frame in place
                    idx = r * ri + c * ci
                    L = letters[idx] - 1
                    child = children[node, L]
                    if child < 0:
                        if s_undo[i] >= 0:
                            rack[s_undo[i]] += 1
                        sp -= 1
                        continue
                    word_buf[s_wlen[i]] = 97 + L if blanks[idx] == 1 else 65 + L
                    if blanks[idx] == 0:
                        s_msum[i] += values[L]
                    s_node[i] = child
                    s_wlen[i] += 1
                    s_pos[i] = c + 1
                    s_opt[i] = -1
                    continue
            else:
                # left phase, first visit: run the right extension for the
                # current prefix before growing it further
                wlen = s_wlen[i]
                psum = 0
                pmult = 1
                for k in range(wlen):
                    idx = r * ri + (ac - wlen + k) * ci
                    code = word_buf[k]
                    if code < 97:
                        psum += values[code - 65] * lmult[idx]
                    pmult *= wmult[idx]
                j = sp
                s_phase[j] = _RIGHT
                s_pos[j] = ac
                s_node[j] = s_node[i]
                s_wlen[j] = wlen
                s_msum[j] = psum
                s_mmult[j] = pmult
                s_cross[j] = 0
                s_placed[j] = wlen
                s_start[j] = ac - wlen
                s_ulv[j] = s_ulv[i]
                s_ucv[j] = s_ucv[i]
                s_ubl[j] = s_ubl[i]
                s_opt[j] = -1
                s_undo[j] = -1
                sp += 1
                continue

        # iteration over placement options: rack letters, then blank letters
        node = s_node[i]
        is_right = s_phase[i] == _RIGHT
        if not is_right and s_limit[i] <= 0:
            if s_undo[i] >= 0:
                rack[s_undo[i]] += 1
            sp -= 1
            continue
        if is_right:
            c = s_pos[i]
            idx = r * ri + c * ci
            m = mask[idx]
            cs = csum[idx]
            lm = lmult[idx]
            wm = wmult[idx]
        else:
            m = FULL_MASK
            cs = -1
            lm = 1
            wm = 1
        advanced = False
        opt = s_opt[i]
        while opt < _OPT_END:
            if opt < _BLANK_OPT:
                if opt >= n_rl:
                    opt = _BLANK_OPT if has_blank == 1 else _OPT_END
                    continue
                L = rack_letters[opt]
                opt += 1
                if rack[L] == 0:
                    continue
                child = children[node, L]
                if child < 0 or (m >> L) & 1 == 0:
                    continue
                slot = L
                ls = values[L] * lm
                ulv = s_ulv[i] + tile_leave[L]
                ucv = s_ucv[i] + cv_sign[L]
                ubl = s_ubl[i]
                code = 65 + L
            else:
                L = opt - _BLANK_OPT
                if L >= 26:
                    break
                opt += 1
                if rack[26] == 0:
                    opt = _OPT_END
                    continue
                child = children[node, L]
                if child < 0 or (m >> L) & 1 == 0:
                    continue
                slot = 26
                ls = 0
                ulv = s_ulv[i] + tile_leave[26]
                ucv = s_ucv[i]
                ubl = s_ubl[i] + 1
                code = 97 + L
            s_opt[i] = opt
            rack[slot] -= 1
            word_buf[s_wlen[i]] = code
            j = sp
            if is_right:
                s_phase[j] = _RIGHT
                s_pos[j] = c + 1
                s_node[j] = child
                s_wlen[j] = s_wlen[i] + 1
                s_msum[j] = s_msum[i] + ls
                s_mmult[j] = s_mmult[i] * wm
                s_cross[j] = s_cross[i] if cs < 0 else s_cross[i] + (cs + ls) * wm
                s_placed[j] = s_placed[i] + 1
                s_start[j] = s_start[i]
            else:
                s_phase[j] = _LEFT
                s_node[j] = child
                s_wlen[j] = s_wlen[i] + 1
                s_limit[j] = s_limit[i] - 1
            s_ulv[j] = ulv
            s_ucv[j] = ucv
            s_ubl[j] = ubl
            s_opt[j] = -1
            s_undo[j] = slot
            sp += 1
            advanced = True
            break
        if not advanced:
            if s_undo[i] >= 0:
                rack[s_undo[i]] += 1
            sp -= 1
    return 0


@njit(cache=True)
def _exchanges(rack_list, n_tiles, W, tile_leave, cv_sign, base,
               ex_buf, best_val, best_meta, best_word):
    """Try every distinct exchange subset of the rack (as positions of the
    sorted tile list; duplicate multisets only repeat identical candidates)."""
    for sel in range(1, 1 << n_tiles):
        exlen = 0
        ulv = 0.0
        ucv = 0
        ubl = 0
        for p in range(n_tiles):
            if (sel >> p) & 1 == 1:
                t = rack_list[p]
                ex_buf[exlen] = 63 if t == 26 else 65 + t
                exlen += 1
                ulv += tile_leave[t]
                ucv += cv_sign[t]
                if t == 26:
                    ubl += 1
        val = (W[1] * (base[0] - ulv)
               + W[2] * (base[1] - ucv)
               + W[3] * (base[2] - ubl)
               + W[4] * (base[3] - exlen))
        _consider(best_val, best_meta, best_word, val, 1, 0, 0, 0, ex_buf, exlen, 0)
    return 0


@njit(cache=True)
def _best_static_kernel(children, terminal, letters, blanks, rack, values, cv_sign,
                        lmult, wmult, W, tile_leave, bag_size,
                        best_val, best_meta, best_word,
                        anchor, mask, csum, word_buf,
                        s_phase, s_pos, s_node, s_wlen, s_limit, s_msum, s_mmult,
                        s_cross, s_placed, s_start, s_ulv, s_ucv, s_ubl, s_opt, s_undo):
    base = np.zeros(4, dtype=np.float64)
    rack_total = 0
    for t in range(27):
        cnt = rack[t]
        if cnt == 0:
            continue
        rack_total += cnt
        base[0] += tile_leave[t] * cnt
        base[1] += cv_sign[t] * cnt
        if t == 26:
            base[2] += cnt
        base[3] += cnt

    best_val[0] = NEG_INF
    best_meta[5] = 0
    out_meta_unused = np.zeros((1, 5), dtype=np.int64)
    out_words_unused = np.zeros((1, 16), dtype=np.int64)
    out_count_unused = np.zeros(1, dtype=np.int64)

    val_pass = W[1] * base[0] + W[2] * base[1] + W[3] * base[2] + W[4] * base[3]
    _consider(best_val, best_meta, best_word, val_pass, 2, 0, 0, 0, word_buf, 0, 0)

    rack_letters = np.zeros(8, dtype=np.int64)
    n_rl = 0
    for L in range(26):
        if rack[L] > 0:
            rack_letters[n_rl] = L
            n_rl += 1
    has_blank = 1 if rack[26] > 0 else 0

    if rack_total > 0 and bag_size >= 7:
        rack_list = np.zeros(8, dtype=np.int64)
        n_tiles = 0
        if rack[26] > 0:  # '?' sorts before letters
            for _ in range(rack[26]):
                rack_list[n_tiles] = 26
                n_tiles += 1
        for L in range(26):
            for _ in range(rack[L]):
                rack_list[n_tiles] = L
                n_tiles += 1
        ex_buf = np.zeros(8, dtype=np.int64)
        _exchanges(rack_list, n_tiles, W, tile_leave, cv_sign, base,
                   ex_buf, best_val, best_meta, best_word)

    if rack_total == 0:
        return best_val[0]

    _compute_anchors(letters, anchor)

    for dirn in range(2):
        ri = N if dirn == 0 else 1
        ci = 1 if dirn == 0 else N
        _compute_cross(letters, blanks, children, terminal, values, ri, ci, mask, csum)
        for r in range(N):
            for ac in range(N):
                if anchor[r * ri + ac * ci] == 0:
                    continue
                if ac > 0 and letters[r * ri + (ac - 1) * ci] != 0:
                    s = ac - 1
                    while s > 0 and letters[r * ri + (s - 1) * ci] != 0:
                        s -= 1
                    node = 0
                    ok = True
                    psum = 0
                    wlen = 0
                    for cc in range(s, ac):
                        j = r * ri + cc * ci
                        L = letters[j] - 1
                        node = children[node, L]
                        if node < 0:
                            ok = False
                            break
                        if blanks[j] == 0:
                            psum += values[L]
                        word_buf[wlen] = 97 + L if blanks[j] == 1 else 65 + L
                        wlen += 1
                    if ok:
                        _search_anchor(r, ac, 1, node, wlen, psum, s, 0,
                                       ri, ci, dirn, letters, blanks, children,
                                       terminal, values, cv_sign, lmult, wmult,
                                       mask, csum, rack, rack_letters, n_rl,
                                       has_blank, word_buf, W, base, tile_leave,
                                       best_val, best_meta, best_word,
                                       s_phase, s_pos, s_node, s_wlen, s_limit,
                                       s_msum, s_mmult, s_cross, s_placed, s_start,
                                       s_ulv, s_ucv, s_ubl, s_opt, s_undo,
                                       0, out_meta_unused, out_words_unused, out_count_unused)
                else:
                    limit = 0
                    cc = ac - 1
                    while cc >= 0 and letters[r * ri + cc * ci] == 0 and anchor[r * ri + cc * ci] == 0:
                        limit += 1
                        cc -= 1
                    if limit > rack_total - 1:
                        limit = rack_total - 1
                    _search_anchor(r, ac, 0, 0, 0, 0, 0, limit,
                                   ri, ci, dirn, letters, blanks, children,
                                   terminal, values, cv_sign, lmult, wmult,
                                   mask, csum, rack, rack_letters, n_rl,
                                   has_blank, word_buf, W, base, tile_leave,
                                   best_val, best_meta, best_word,
                                   s_phase, s_pos, s_node, s_wlen, s_limit,
                                   s_msum, s_mmult, s_cross, s_placed, s_start,
                                   s_ulv, s_ucv, s_ubl, s_opt, s_undo,
                                   0, out_meta_unused, out_words_unused, out_count_unused)
    return best_val[0]


@njit(cache=True)
def _enumerate_kernel(children, terminal, letters, blanks, rack, values, cv_sign,
                      lmult, wmult, out_meta, out_words, out_count,
                      anchor, mask, csum, word_buf,
                      s_phase, s_pos, s_node, s_wlen, s_limit, s_msum, s_mmult,
                      s_cross, s_placed, s_start, s_ulv, s_ucv, s_ubl, s_opt, s_undo):
    """Every legal placement with its score, into the output arrays."""
    out_count[0] = 0
    rack_total = 0
    for t in range(27):
        rack_total += rack[t]
    if rack_total == 0:
        return 0

    rack_letters = np.zeros(8, dtype=np.int64)
    n_rl = 0
    for L in range(26):
        if rack[L] > 0:
            rack_letters[n_rl] = L
            n_rl += 1
    has_blank = 1 if rack[26] > 0 else 0

    w_unused = np.zeros(5, dtype=np.float64)
    base_unused = np.zeros(4, dtype=np.float64)
    tl_unused = np.zeros(27, dtype=np.float64)
    bv_unused = np.zeros(1, dtype=np.float64)
    bm_unused = np.zeros(8, dtype=np.int64)
    bw_unused = np.zeros(20, dtype=np.int64)

    _compute_anchors(letters, anchor)

    for dirn in range(2):
        ri = N if dirn == 0 else 1
        ci = 1 if dirn == 0 else N
        _compute_cross(letters, blanks, children, terminal, values, ri, ci, mask, csum)
        for r in range(N):
            for ac in range(N):
                if anchor[r * ri + ac * ci] == 0:
                    continue
                if ac > 0 and letters[r * ri + (ac - 1) * ci] != 0:
                    s = ac - 1
                    while s > 0 and letters[r * ri + (s - 1) * ci] != 0:
                        s -= 1
                    node = 0
                    ok = True
                    psum = 0
                    wlen = 0
                    for cc in range(s, ac):
                        j = r * ri + cc * ci
                        L = letters[j] - 1
                        node = children[node, L]
                        if node < 0:
                            ok = False
                            break
                        if blanks[j] == 0:
                            psum += values[L]
                        word_buf[wlen] = 97 + L if blanks[j] == 1 else 65 + L
                        wlen += 1
                    if ok:
                        _search_anchor(r, ac, 1, node, wlen, psum, s, 0,
                                       ri, ci, dirn, letters, blanks, children,
                                       terminal, values, cv_sign, lmult, wmult,
                                       mask, csum, rack, rack_letters, n_rl,
                                       has_blank, word_buf, w_unused, base_unused,
                                       tl_unused, bv_unused, bm_unused, bw_unused,
                                       s_phase, s_pos, s_node, s_wlen, s_limit,
                                       s_msum, s_mmult, s_cross, s_placed, s_start,
                                       s_ulv, s_ucv, s_ubl, s_opt, s_undo,
                                       1, out_meta, out_words, out_count)
                else:
                    limit = 0
                    cc = ac - 1
                    while cc >= 0 and letters[r * ri + cc * ci] == 0 and anchor[r * ri + cc * ci] == 0:
                        limit += 1
                        cc -= 1
                    if limit > rack_total - 1:
                        limit = rack_total - 1
                    _search_anchor(r, ac, 0, 0, 0, 0, 0, limit,
                                   ri, ci, dirn, letters, blanks, children,
                                   terminal, values, cv_sign, lmult, wmult,
                                   mask, csum, rack, rack_letters, n_rl,
                                   has_blank, word_buf, w_unused, base_unused,
                                   tl_unused, bv_unused, bm_unused, bw_unused,
                                   s_phase, s_pos, s_node, s_wlen, s_limit,
                                   s_msum, s_mmult, s_cross, s_placed, s_start,
                                   s_ulv, s_ucv, s_ubl, s_opt, s_undo,
                                   1, out_meta, out_words, out_count)
    return 0


# ---------------------------------------------------------------------------
# python wrappers
# ---------------------------------------------------------------------------


class _Workspace:
    """Preallocated kernel scratch; one per context, reused per call.
    Kernel calls are not reentrant (rollouts are single-threaded)."""

    def __init__(self):
        self.best_val = np.zeros(1, dtype=np.float64)
        self.best_meta = np.zeros(8, dtype=np.int64)
        self.best_word = np.zeros(20, dtype=np.int64)
        self.anchor = np.zeros(N * N, dtype=np.uint8)
        self.mask = np.zeros(N * N, dtype=np.int64)
        self.csum = np.zeros(N * N, dtype=np.int64)
        self.word_buf = np.zeros(20, dtype=np.int64)
        depth = 40
        self.stack = [np.zeros(depth, dtype=np.int64) for _ in range(14)]
        self.stack_f = np.zeros(depth, dtype=np.float64)
        self.out_cap = 4096
        self.out_meta = np.zeros((self.out_cap, 5), dtype=np.int64)
        self.out_words = np.zeros((self.out_cap, 16), dtype=np.int64)
        self.out_count = np.zeros(1, dtype=np.int64)


class FastContext:
    """Flat-array view of a (lexicon, config) pair, built once and reused."""

    def __init__(self, lexicon, config):
        n_nodes = lexicon.node_count()
        children = np.full((n_nodes, 26), -1, dtype=np.int64)
        for node, edges in enumerate(lexicon.edges):
            for letter, child in edges.items():
                children[node, ord(letter) - 65] = child
        self.children = children
        self.terminal = np.asarray(lexicon.terminal, dtype=np.uint8)
        values = np.zeros(27, dtype=np.int64)
        for i, letter in enumerate(LETTERS):
            values[i] = config.distribution.value(letter)
        self.values = values
        cv_sign = np.zeros(27, dtype=np.int64)
        for i, letter in enumerate(LETTERS):
            cv_sign[i] = -1 if letter in VOWELS else 1
        self.cv_sign = cv_sign
        layout = config.layout
        self.lmult = np.asarray(
            [layout.letter_multiplier(r, c) for r in range(N) for c in range(N)],
            dtype=np.int64,
        )
        self.wmult = np.asarray(
            [layout.word_multiplier(r, c) for r in range(N) for c in range(N)],
            dtype=np.int64,
        )
        self.workspace = _Workspace()
        self._refs = (lexicon, config)


_CONTEXTS = {}


def get_context(lexicon, config) -> FastContext:
    key = (id(lexicon), id(config))
    ctx = _CONTEXTS.get(key)
    if ctx is None:
        ctx = FastContext(lexicon, config)
        _CONTEXTS[key] = ctx
    return ctx


def board_arrays(board: Board):
    raw = np.frombuffer("".join(board.cells).encode("ascii"), dtype=np.uint8)
    upper = (raw >= 65) & (raw <= 90)
    lower = raw >= 97
    letters = np.where(upper, raw - 64, np.where(lower, raw - 96, 0)).astype(np.int64)
    blanks = lower.astype(np.uint8)
    return letters, blanks


def rack_counts(rack: str):
    counts = np.zeros(27, dtype=np.int64)
    for tile in rack:
        counts[26 if tile == "?" else ord(tile) - 65] += 1
    return counts


_FAST_FEATURE_ORDER = ("move_score", "leave_value", "cv_diff", "blanks_left", "leave_length")

_PARAMS_CACHE = {}


def fast_linear_params(model, leave_table, playability_samples: int = 0):
    """Kernel weights for an eligible model, or None.

    Eligibility guarantees float-exact agreement with the generic ranker:
    linear model, features a canonically ordered subset of the cheap five,
    no learned leave entries, per-tile defaults on a 1/16 grid.
    """
    from .evaluation import LinearModel

    if not NUMBA_OK or playability_samples > 0:
        return None
    key = (id(model), id(leave_table))
    cached = _PARAMS_CACHE.get(key)
    if cached is not None:
        return cached[0]
    if not isinstance(model, LinearModel) or leave_table.values:
        result = None
    else:
        weights = np.zeros(5, dtype=np.float64)
        last = -1
        result = "pending"
        for name, w in zip(model.feature_names, model.weights):
            try:
                i = _FAST_FEATURE_ORDER.index(name)
            except ValueError:
                result = None
                break
            if i <= last:
                result = None
                break
            weights[i] = w
            last = i
        if result is not None:
            tile_leave = np.zeros(27, dtype=np.float64)
            for i, letter in enumerate(LETTERS):
                tile_leave[i] = leave_table.tile_defaults.get(letter, 0.0)
            tile_leave[26] = leave_table.tile_defaults.get("?", 0.0)
            if np.any(tile_leave * 16 != np.round(tile_leave * 16)):
                result = None
            else:
                result = (weights, tile_leave)
    _PARAMS_CACHE[key] = (result, model, leave_table)
    return result


def best_static_move(state, lexicon, weights, tile_leave, with_score: bool = False):
    """The argmax move for kernel-eligible linear parameters."""
    ctx = get_context(lexicon, state.config)
    ws = ctx.workspace
    letters, blanks = board_arrays(state.board)
    rack = rack_counts(state.rack())
    st = ws.stack
    _best_static_kernel(
        ctx.children, ctx.terminal, letters, blanks, rack, ctx.values, ctx.cv_sign,
        ctx.lmult, ctx.wmult, weights, tile_leave, len(state.bag),
        ws.best_val, ws.best_meta, ws.best_word,
        ws.anchor, ws.mask, ws.csum, ws.word_buf,
        st[0], st[1], st[2], st[3], st[4], st[5], st[6],
        st[7], st[8], st[9], ws.stack_f, st[10], st[11], st[12], st[13],
    )
    meta = ws.best_meta
    kind = int(meta[0])
    wlen = int(meta[4])
    word = "".join(chr(int(code)) for code in ws.best_word[:wlen])
    if kind == 0:
        direction = ACROSS if meta[3] == 0 else DOWN
        move = Place(row=int(meta[1]), col=int(meta[2]), direction=direction, word=word)
        score = int(meta[6])
    elif kind == 1:
        move, score = Exchange(word), 0
    else:
        move, score = PASS, 0
    return (move, score) if with_score else move


def fast_scored_placements(state, lexicon):
    """All legal placements with scores via the compiled search, or None
    when numba is unavailable. Matches the plain generator's output."""
    if not NUMBA_OK:
        return None
    ctx = get_context(lexicon, state.config)
    ws = ctx.workspace
    letters, blanks = board_arrays(state.board)
    rack = rack_counts(state.rack())
    st = ws.stack
    while True:
        _enumerate_kernel(
            ctx.children, ctx.terminal, letters, blanks, rack, ctx.values,
            ctx.cv_sign, ctx.lmult, ctx.wmult,
            ws.out_meta, ws.out_words, ws.out_count,
            ws.anchor, ws.mask, ws.csum, ws.word_buf,
            st[0], st[1], st[2], st[3], st[4], st[5], st[6],
            st[7], st[8], st[9], ws.stack_f, st[10], st[11], st[12], st[13],
        )
        n = int(ws.out_count[0])
        if n <= ws.out_cap:
            break
        ws.out_cap = n + 256
        ws.out_meta = np.zeros((ws.out_cap, 5), dtype=np.int64)
        ws.out_words = np.zeros((ws.out_cap, 16), dtype=np.int64)
    meta = ws.out_meta
    words = ws.out_words
    results = []
    for k in range(n):
        wlen = int(meta[k, 3])
        word = "".join(chr(int(words[k, w])) for w in range(wlen))
        direction = ACROSS if meta[k, 2] == 0 else DOWN
        move = Place(row=int(meta[k, 0]), col=int(meta[k, 1]), direction=direction, word=word)
        results.append((move, int(meta[k, 4])))
    results.sort(key=lambda pair: move_sort_key(pair[0]))
    return results
